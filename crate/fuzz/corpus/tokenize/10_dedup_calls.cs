class D {
    void Init() { }
    void Run() { Init(); Init(); }
}
