using System;
using System.Windows.Forms;
using GeomKernel.Commands;
using GeomKernel.CmdsCleanUp;

namespace GeomKernel.UI
{
    public partial class MainForm : Form
    {
        private Mesh mesh;
        private Canvas canvas;
        private History history;
        private CleanUpCommands cleanUp;

        public MainForm()
        {
            InitializeComponent();
            mesh = new Mesh();
            canvas = new Canvas(mesh);
            history = new History();
            cleanUp = new CleanUpCommands(canvas, mesh);
            canvas.Resized += new EventHandler(OnCanvasResized);
        }

        private void OnCanvasResized(object sender, EventArgs e)
        {
            canvas.Invalidate();
        }

        private void OnAddVertex(object sender, EventArgs e)
        {
            history.Run(new AddVertexCommand(mesh, 0.0, 0.0));
        }

        private void OnUndo(object sender, EventArgs e)
        {
            history.Undo();
        }
    }
}
