//! Degree and excess-weight laws, the size-biased offspring law, and the
//! explosiveness criterion.

mod degree;
mod excess;
mod explosive;
mod size_biased;

pub use degree::{sample_degrees, BandReport, DegreeLaw};
pub use excess::{ExcessWeightLaw, TailControl};
pub use explosive::{explosiveness_check, ExplosivenessVerdict, Verdict, QUADRATURE_RTOL, TAIL_MARGIN};
pub use size_biased::{size_biased, SizeBiasedLaw};
