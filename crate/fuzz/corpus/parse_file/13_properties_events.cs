public class Model {
    private int count;
    public event EventHandler Changed;
    public int Count {
        get { return count; }
        set { count = value; Notify(); }
    }
}
