const api = {
  run: (x) => { return x + 5; },
};
