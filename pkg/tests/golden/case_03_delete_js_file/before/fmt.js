// helpers for formatting
const SEP = ":";

function join(a, b) {
  return a + SEP + b;
}

function split(s) {
  return s.split(SEP);
}

setup();
