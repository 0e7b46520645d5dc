namespace N {
    public class Shape {
        public void Draw() { }
        public void Draw(int scale) { }
        public void Draw(int scale, bool fill) { }
    }
}
