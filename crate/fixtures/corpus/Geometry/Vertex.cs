using System;

namespace GeomKernel
{
    /// <summary>
    /// A point in the plane. Vertices are shared between edges, so
    /// moving one moves every edge that ends at it.
    /// </summary>
    public class Vertex
    {
        public double X;
        public double Y;
        private int m_valence;

        public Vertex(double x, double y)
        {
            X = x;
            Y = y;
        }

        public int Valence
        {
            get { return m_valence; }
        }

        // Called by Mesh when an edge is attached or detached.
        internal void Attach()
        {
            m_valence++;
        }

        internal void Detach()
        {
            m_valence--;
        }

        public double Distance(Vertex other)
        {
            double dx = other.X - X;
            double dy = other.Y - Y;
            return Math.Sqrt(dx * dx + dy * dy);
        }

        public void MoveBy(double dx, double dy)
        {
            X += dx;
            Y += dy;
        }
    }
}
