function held(q) {
  return q * q;
}
function gained(w) { return w + 1; }
