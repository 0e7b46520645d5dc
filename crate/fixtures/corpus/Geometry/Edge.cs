using System;

namespace GeomKernel
{
    public class Edge
    {
        public Vertex Start;
        public Vertex End;

        public Edge(Vertex start, Vertex end)
        {
            Start = start;
            End = end;
            start.Attach();
            end.Attach();
        }

        public double Length()
        {
            return Start.Distance(End);
        }

        /// Splits the edge at its midpoint and returns the new vertex.
        /// The caller is responsible for re-linking the halves.
        public Vertex Split()
        {
            double mx = (Start.X + End.X) / 2.0;
            double my = (Start.Y + End.Y) / 2.0;
            return new Vertex(mx, my);
        }

        public bool Touches(Vertex v)
        {
            return Start == v || End == v;
        }

        public void Release()
        {
            Start.Detach();
            End.Detach();
        }
    }
}
