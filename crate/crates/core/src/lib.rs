//! Exact symbolic engine for truncated pseudodifferential operators, their
//! q-deformations and phase-space star products.

pub mod coeffring;
pub mod correspond;
pub mod error;
pub mod exactnum;
pub mod psdo;
pub mod qpsdo;
pub mod sample;
pub mod series;
pub mod starcalc;
pub mod verify;

pub use coeffring::{Coeff, DPoly, ParseCoeff, TimesPoly, XLaurent};
pub use error::{Error, Result};
pub use exactnum::{QValue, Rational};
pub use psdo::{LaxKP, OperatorSeries};
pub use qpsdo::{QDressing, QOperatorSeries};
pub use series::{SymbolSeries, TruncationPolicy};
pub use starcalc::{FormalLambdaSeries, PhaseSymbol, StarKind, StarProduct, TorusElement};
