class L {
    string s = @"a""b";
    char c = '\n';
    double d = 1.5e3;
    long n = 0xFFL;
    float f = .5f;
    string t = "x\"y";
}
