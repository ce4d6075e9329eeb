const extra = 5;
const base = 1;

function use() {
  return base;
}
