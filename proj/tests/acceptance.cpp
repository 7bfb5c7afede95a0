// Acceptance gate; filled in with oracle-frozen thresholds.
int main() { return 1; }
