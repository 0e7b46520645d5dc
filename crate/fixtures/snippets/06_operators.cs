class Ops {
    bool Test(int a, int b) {
        a += b++;
        return a != b && a <= b || !(a >= b);
    }
}
