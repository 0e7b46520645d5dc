using System;
using System.Collections;

namespace GeomKernel
{
    public delegate void MeshChangedHandler(object sender, EventArgs e);

    public class Mesh
    {
        private ArrayList vertices = new ArrayList();
        private ArrayList edges = new ArrayList();

        public event MeshChangedHandler Changed;

        public int VertexCount
        {
            get { return vertices.Count; }
        }

        public Vertex AddVertex(double x, double y)
        {
            Vertex v = new Vertex(x, y);
            vertices.Add(v);
            OnChanged();
            return v;
        }

        public Edge AddEdge(Vertex a, Vertex b)
        {
            Edge e = new Edge(a, b);
            edges.Add(e);
            OnChanged();
            return e;
        }

        public void RemoveVertex(Vertex v)
        {
            foreach (Edge e in edges.ToArray())
            {
                if (e.Touches(v))
                {
                    e.Release();
                    edges.Remove(e);
                }
            }
            vertices.Remove(v);
            OnChanged();
        }

        protected void OnChanged()
        {
            if (Changed != null)
                Changed(this, EventArgs.Empty);
        }
    }
}
