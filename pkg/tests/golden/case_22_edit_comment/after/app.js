// fresh words entirely
function scaleUp(v) {
  return v * 3;
}
