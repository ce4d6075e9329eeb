function fresh() { return 9; }
