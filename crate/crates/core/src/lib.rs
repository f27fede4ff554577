pub mod body;
pub mod canonical;
pub mod error;
pub mod face_family;
pub mod gallery;
pub mod hyperbolic;
pub mod linalg;
pub mod normal_cycle;
pub mod patch;
pub mod poly;

pub use body::{Body, BodySpec, Rep, SupportResult};
pub use error::{Error, Result};
pub use poly::Polynomial;
