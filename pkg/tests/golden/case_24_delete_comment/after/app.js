// old note about scaling
function scaleUp(v) {
  return v * 3;
}
