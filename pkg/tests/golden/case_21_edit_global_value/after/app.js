const base = 2;

function use() {
  return base;
}
