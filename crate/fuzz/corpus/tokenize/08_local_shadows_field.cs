class S {
    int x;
    void M() { int x; x = 1; }
}
