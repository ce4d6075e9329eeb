function held(q) {
  return q * q;
}
