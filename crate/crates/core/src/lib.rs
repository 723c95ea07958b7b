//! Exact computations for democratic systems of translates along torsion
//! lattices, carried out on finite truncations `M_N` of the lattice.

pub mod autocorr;
pub mod cache;
pub mod democracy;
pub mod error;
pub mod group;
pub mod hull;
pub mod lp;
pub mod oracles;
pub mod presentation;
pub mod rational;

pub use autocorr::{AutocorrVector, GSpectrum, SubsetGamma};
pub use democracy::{eval_functional, DemocracyReport, Family, PeriodizationSpec};
pub use error::{Error, Result};
pub use group::{prufer_truncation, Element, FiniteAbelianGroup, Subgroup};
pub use hull::{classify_vertices, HullReport, PointCloud};
pub use presentation::GroupSpec;
pub use rational::{Rational, Scalar};
