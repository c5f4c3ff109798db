//! The chapters of `book/` as modules, so `cargo test --doc` runs their code
//! blocks. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}
#[doc = include_str!("../../../book/src/forms.md")]
pub mod forms {}
#[doc = include_str!("../../../book/src/g2.md")]
pub mod g2 {}
#[doc = include_str!("../../../book/src/definite.md")]
pub mod definite {}
#[doc = include_str!("../../../book/src/invariant.md")]
pub mod invariant {}
#[doc = include_str!("../../../book/src/flow.md")]
pub mod flow {}
#[doc = include_str!("../../../book/src/flat.md")]
pub mod flat {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../CONVENTIONS.md")]
pub mod conventions {}
