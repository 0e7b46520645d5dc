class Chain {
    Curve m_drag_curve;
    void Paint(Graphics g) {
        g.Canvas.DrawLine(m_drag_curve.Start);
        Console.Out.Flush();
        this.m_drag_curve.Reset();
        Palette.Default.Ink = null;
    }
}
