function combine(a) {
  return a;
}
