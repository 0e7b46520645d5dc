enum Color { Red, Green }
class U {
    public static U operator +(U a, U b) { return a; }
    public int this[int i] { get { return i; } }
    ~U() { }
    void Kept() { }
}
