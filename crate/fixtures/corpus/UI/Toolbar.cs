using System;
using System.Collections;

namespace GeomKernel.UI
{
    enum DockSide { Top, Left }

    public class Toolbar
    {
        private ArrayList buttons = new ArrayList();

        public void AddButton(string caption, EventHandler handler)
        {
            Button b = new Button(caption);
            b.Click += handler;
            buttons.Add(b);
        }

        public int ButtonCount
        {
            get { return buttons.Count; }
        }

        /// One clickable entry on the toolbar.
        public class Button
        {
            public string Caption;
            public event EventHandler Click;

            public Button(string caption)
            {
                Caption = caption;
            }

            public void PerformClick()
            {
                if (Click != null)
                    Click(this, EventArgs.Empty);
            }
        }
    }
}
