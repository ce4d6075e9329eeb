const handlers = {
  id: (x) => x,
};
