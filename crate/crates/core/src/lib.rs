pub mod circle;
pub mod clausen;
pub mod construction;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod halfnorm;
pub mod homeo;
pub mod optimize;
pub mod seminorm;
pub mod stieltjes;

pub use error::{Error, Result};
