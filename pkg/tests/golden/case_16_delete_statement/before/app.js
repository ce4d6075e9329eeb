function track(x) {
  const y = x + 1;
  log(y);
  return y;
}
