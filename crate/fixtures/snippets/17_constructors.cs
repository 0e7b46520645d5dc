class Node : Base {
    static Node() { Registry.Add(); }
    public Node() : this(0) { }
    Node(int depth) : base(depth) { Setup(); }
}
