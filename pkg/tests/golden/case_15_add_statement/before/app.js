function track(x) {
  const y = x + 1;
  return y;
}
