using System;
using System.Collections;

namespace GeomKernel.Commands
{
    public interface ICommand
    {
        string Name { get; }
        void Execute();
        void Undo();
    }

    /// Base class for undoable edits on a mesh.
    public abstract class CommandBase : ICommand
    {
        protected Mesh mesh;
        private string name;

        protected CommandBase(Mesh target, string title)
        {
            mesh = target;
            name = title;
        }

        public string Name
        {
            get { return name; }
        }

        public abstract void Execute();
        public abstract void Undo();
    }

    public class AddVertexCommand : CommandBase
    {
        private double x, y;
        private Vertex added;

        public AddVertexCommand(Mesh target, double px, double py) : base(target, "Add vertex")
        {
            x = px;
            y = py;
        }

        public override void Execute()
        {
            added = mesh.AddVertex(x, y);
        }

        public override void Undo()
        {
            mesh.RemoveVertex(added);
        }
    }

    /// <summary>Linear undo/redo history.</summary>
    public class History
    {
        private Stack done = new Stack();
        private Stack undone = new Stack();

        public bool CanUndo
        {
            get { return done.Count > 0; }
        }

        public void Run(ICommand cmd)
        {
            cmd.Execute();
            done.Push(cmd);
            undone.Clear();
        }

        public void Undo()
        {
            if (!CanUndo)
                return;
            ICommand cmd = (ICommand) done.Pop();
            cmd.Undo();
            undone.Push(cmd);
        }

        public void Redo()
        {
            if (undone.Count == 0)
                return;
            ICommand cmd = (ICommand) undone.Pop();
            cmd.Execute();
            done.Push(cmd);
        }
    }
}
