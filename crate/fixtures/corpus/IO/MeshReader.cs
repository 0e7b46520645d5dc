using System;
using System.IO;
using GeomKernel;

namespace GeomKernel.IO
{
    public struct ParsedLine
    {
        public char Tag;
        public double A;
        public double B;
    }

    public class MeshReader
    {
        private TextReader input;

        public MeshReader(TextReader r)
        {
            input = r;
        }

        public Mesh Read()
        {
            Mesh mesh = new Mesh();
            string line;
            while ((line = input.ReadLine()) != null)
            {
                ParsedLine p = ParseLine(line);
                if (p.Tag == 'v')
                    mesh.AddVertex(p.A, p.B);
            }
            return mesh;
        }

        public static ParsedLine ParseLine(string text)
        {
            ParsedLine p = new ParsedLine();
            string[] parts = text.Split(' ');
            p.Tag = parts[0][0];
            p.A = Double.Parse(parts[1]);
            p.B = Double.Parse(parts[2]);
            return p;
        }
    }
}
