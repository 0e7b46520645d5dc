// leading comment
#region Fields
[Serializable]
public class T {
    /* block
       comment */
    [Obsolete("no")] int x;
}
#endregion
