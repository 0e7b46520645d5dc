class Loops {
    void Walk(Tree tree) {
        foreach (Node n in tree.Nodes) { Visit(n); }
        for (int i = 0; i < Limit; i++) { Step(i); }
        try { Risky(); } catch (IOException ex) { Log(ex); }
    }
}
