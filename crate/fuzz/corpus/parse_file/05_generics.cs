class G {
    List<List<int>> m;
    void Shift(int a) {
        a >>= 1;
        a = a << 2;
    }
}
