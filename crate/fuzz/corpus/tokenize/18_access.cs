class Acc {
    public int a;
    private int b;
    protected int c;
    internal int d;
    protected internal int e;
    int f;
}
