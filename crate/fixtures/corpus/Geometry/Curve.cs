using System;
using System.Collections;

namespace GeomKernel
{
    /// <summary>Open polyline used while dragging.</summary>
    public class Curve
    {
        private ArrayList m_points = new ArrayList();

        public Curve()
        {
        }

        public Curve(Vertex first)
        {
            AddPoint(first);
        }

        public int Count
        {
            get { return m_points.Count; }
        }

        public void AddPoint(Vertex v)
        {
            m_points.Add(v);
        }

        public Vertex Last()
        {
            if (Count == 0)
                return null;
            return (Vertex) m_points[Count - 1];
        }

        public void Clear()
        {
            m_points.Clear();
        }

        public double Length()
        {
            double total = 0;
            for (int i = 1; i < Count; i++)
            {
                Vertex a = (Vertex) m_points[i - 1];
                Vertex b = (Vertex) m_points[i];
                total += a.Distance(b);
            }
            return total;
        }
    }
}
