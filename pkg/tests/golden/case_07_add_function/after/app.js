function first(a) {
  return a + 1;
}

function second(b) {
  const shifted = b - 7;
  return shifted;
}
