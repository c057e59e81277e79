//! Thompson group elements, their oriented links and the HOMFLYPT positive
//! definite function on the oriented subgroup.
//!
//! The pipeline runs tree pair → sign membership test → oriented link
//! diagram → exact HOMFLYPT polynomial → Gram matrices at roots of unity.

pub mod error;
pub mod forest;
pub mod gram;
pub mod homfly;
pub mod laurent;
pub mod signs;
pub mod tangle;

pub use error::{Error, Result};
pub use forest::{common_refinement, Forest, Generator, GeneratorWord, GroupElement, Tree};
pub use gram::{GramMatrix, SpectrumReport};
pub use homfly::{ComplexValue, EvalParams, HomflyEngine};
pub use laurent::LaurentPoly;
pub use signs::{Sign, SignSeq};
pub use tangle::{Convention, LinkDiagram, Tangle};
