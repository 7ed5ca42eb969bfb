//! Pseudospectral Klein-Gordon-Hartree dynamics on a periodic box, with a
//! Littlewood-Paley toolkit and numerical probes of the dispersive and
//! commutator estimates used in low-regularity well-posedness arguments.

// `!(x > 0.0)` is used throughout to reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod lp;
pub mod probes;
pub mod propagator;
pub mod random;
pub mod report;
pub mod spectral;
pub mod split;

pub use dynamics::{EnergyReport, PicardOutcome, RhsMode, SolverConfig};
pub use error::{KghError, Result};
pub use lp::{BallWindow, BesovParams, DyadicBank};
pub use probes::ProbeReport;
pub use propagator::{AdmissibleTriple, Scheme, SlopeFit, SpaceTimeNormRecord, Trajectory};
pub use spectral::{CauchyPair, Complex64, GridSpec, RealField, Spectrum, Wavevector};
pub use split::{ExponentSet, GateReport, NormLedger, RecombinationReport};
