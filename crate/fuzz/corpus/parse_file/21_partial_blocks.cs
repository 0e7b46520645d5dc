namespace P {
    partial class Part { void One() { } }
    partial class Part { void Two() { One(); } }
}
