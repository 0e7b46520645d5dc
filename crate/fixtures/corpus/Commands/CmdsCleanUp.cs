using System;
using GeomKernel.UI;

namespace GeomKernel.CmdsCleanUp
{
    /// Clean-up tools: splitting and merging vertices of the active mesh.
    public class CleanUpCommands
    {
        private Canvas glControl;
        private Curve m_drag_curve;
        private Mesh m_mesh;

        public CleanUpCommands(Canvas canvas, Mesh mesh)
        {
            glControl = canvas;
            m_mesh = mesh;
            Init();
        }

        private void Init()
        {
            m_drag_curve = new Curve();
        }

        /// Menu handler: split the edge under the cursor.
        public void SplitVertex(object sender, EventArgs e)
        {
            Vertex last = m_drag_curve.Last();
            if (last == null)
                return;
            Edge hit = glControl.PickEdge(last);
            if (hit != null)
            {
                Vertex mid = hit.Split();
                m_mesh.AddVertex(mid.X, mid.Y);
            }
            Init();
            glControl.Invalidate();
        }

        public void MergeVertices(Vertex a, Vertex b)
        {
            a.MoveBy((b.X - a.X) / 2, (b.Y - a.Y) / 2);
            m_mesh.RemoveVertex(b);
            glControl.Invalidate();
        }
    }
}
