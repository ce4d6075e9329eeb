const base = 1;

function use() {
  return base;
}
