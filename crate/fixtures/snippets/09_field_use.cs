class F {
    int x;
    void M() { x = 1; }
}
