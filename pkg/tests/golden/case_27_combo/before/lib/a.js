function solo(n) {
  const total = n + 2;
  return total;
}
