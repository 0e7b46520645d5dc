namespace GeomKernel.UI
{
    partial class MainForm
    {
        private Toolbar toolbar;

        /// Designer-generated layout.
        private void InitializeComponent()
        {
            toolbar = new Toolbar();
            toolbar.AddButton("Add", new EventHandler(OnAddVertex));
            toolbar.AddButton("Undo", new EventHandler(OnUndo));
            toolbar.AddButton("Split", new EventHandler(cleanUp.SplitVertex));
            Text = "Geometry Kernel";
        }
    }
}
