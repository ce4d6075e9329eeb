function setupAll() {
  prepare();
}
function teardownAll() {
  work();
  cleanup();
}
