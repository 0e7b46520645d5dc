using System;
using System.IO;
using GeomKernel;

namespace GeomKernel.IO
{
    /// Writes meshes in a line-oriented text format:
    ///   v x y
    ///   e i j
    public class MeshWriter
    {
        private TextWriter output;
        private int written;

        public MeshWriter(TextWriter w)
        {
            output = w;
        }

        public int Written
        {
            get { return written; }
        }

        public void WriteVertex(Vertex v)
        {
            output.WriteLine("v " + v.X + " " + v.Y);
            written++;
        }

        public void WriteEdge(int i, int j)
        {
            output.WriteLine("e " + i + " " + j);
            written++;
        }

        public void Flush()
        {
            output.Flush();
        }
    }
}
