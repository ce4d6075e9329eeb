class Alpha {
  run(x) { return x + 1; }
  stop(code) { this.halt(code); return 0; }
  init() { this.ready = true; }
}
class Beta {
  idle() { return 2; }
  flush(buf) { buf.clear(); }
}
