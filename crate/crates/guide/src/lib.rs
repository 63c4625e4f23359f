//! The chapters of the guide in `book/`, compiled so that `cargo test` runs
//! their code blocks.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}
#[doc = include_str!("../../../book/src/rotation.md")]
pub mod rotation {}
#[doc = include_str!("../../../book/src/germs.md")]
pub mod germs {}
#[doc = include_str!("../../../book/src/hedgehogs.md")]
pub mod hedgehogs {}
#[doc = include_str!("../../../book/src/petals.md")]
pub mod petals {}
#[doc = include_str!("../../../book/src/normal-forms.md")]
pub mod normal_forms {}
#[doc = include_str!("../../../book/src/beltrami.md")]
pub mod beltrami {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
