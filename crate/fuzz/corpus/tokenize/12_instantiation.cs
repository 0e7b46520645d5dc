class Factory {
    object Make() {
        Widget w = new Widget(3);
        int[] xs = new int[4];
        return new System.Collections.Generic.List<Widget>();
    }
}
