class Top { }
struct Point { int X; }
interface IShape {
    void Draw();
    int Area { get; }
}
