using System;
using System.Drawing;
using GeomKernel;

namespace GeomKernel.UI
{
    public class Canvas
    {
        private Mesh m_mesh;
        private bool dirty;
        private Color background = Color.White;

        public event EventHandler Resized;

        public Canvas(Mesh mesh)
        {
            m_mesh = mesh;
            m_mesh.Changed += new MeshChangedHandler(OnMeshChanged);
        }

        public Mesh Mesh
        {
            get { return m_mesh; }
            set { m_mesh = value; Invalidate(); }
        }

        public void Invalidate()
        {
            dirty = true;
        }

        public Edge PickEdge(Vertex near)
        {
            // Picking against edges needs the spatial index; not wired yet.
            return null;
        }

        private void OnMeshChanged(object sender, EventArgs e)
        {
            Invalidate();
        }

        public void Resize(int width, int height)
        {
            if (Resized != null)
                Resized(this, EventArgs.Empty);
            dirty = true;
        }

        public void Paint(Graphics g)
        {
            if (!dirty)
                return;
            g.Clear(background);
            dirty = false;
        }
    }
}
