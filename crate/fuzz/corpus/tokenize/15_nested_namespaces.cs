using System;
namespace Outer {
    using System.Text;
    namespace Inner.Deep {
        class K { }
    }
}
