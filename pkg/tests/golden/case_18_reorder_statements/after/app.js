function pair() {
  beta();
  alpha();
}
