//! Class table construction and type checking.

mod class_table;
mod typecheck;

pub use class_table::*;
pub use typecheck::typecheck;
