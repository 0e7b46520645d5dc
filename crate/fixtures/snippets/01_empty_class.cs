namespace A { class B { } }
