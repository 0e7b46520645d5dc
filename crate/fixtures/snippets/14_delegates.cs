namespace Ev {
    public delegate void Handler(object sender, EventArgs e);
    class Bus {
        delegate int Filter(ref int level);
    }
}
