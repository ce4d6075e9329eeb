function first(a) {
  return a + 1;
}
