// entry point
const limit = 10;

function scale(x) {
  const doubled = x * 2;
  return doubled + limit;
}

function clamp(v) {
  if (v > limit) { return limit; }
  return v;
}
