//! The guide chapters, compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/fourier.md")]
pub mod fourier {}
#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}
#[doc = include_str!("../../../book/src/splines.md")]
pub mod splines {}
#[doc = include_str!("../../../book/src/measurements.md")]
pub mod measurements {}
#[doc = include_str!("../../../book/src/reconstruction.md")]
pub mod reconstruction {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
