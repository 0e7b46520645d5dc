namespace Broken
{
    class B
    {
        string s = "never closed;
    }
}
