function setupAll() {
  prepare();
  work();
}
function teardownAll() {
  cleanup();
}
