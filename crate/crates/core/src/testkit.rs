//! Shared fixtures for unit tests.

use crate::kb::Database;
use crate::text::parse_kb;

/// The 9-variable, 10-rule database used as the running example throughout
/// the test suite. The header pins the index order.
pub const EXAMPLE1_SRC: &str = "\
vars p1, p2, p3, p4, p5, p6, p7, p8, p9.
-> p1.
p1 -> p2.
p1 & p2 -> p3.
p3 & p6 -> p4.
p4 -> p5.
p7 -> p6.
p6 -> p5.
p8 -> p9.
p7 -> p2.
p9 -> p8.
";

/// Three-variable toy database: `p1 -> p2` and `p1 & p2 -> p3`.
pub const THREE_VAR_SRC: &str = "\
vars p1, p2, p3.
p1 -> p2.
p1 & p2 -> p3.
";

pub fn example1() -> Database {
    parse_kb(EXAMPLE1_SRC).expect("fixture parses")
}

pub fn three_var_db() -> Database {
    parse_kb(THREE_VAR_SRC).expect("fixture parses")
}
