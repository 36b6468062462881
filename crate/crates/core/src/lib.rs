//! Exact calculus of the different function on skeletons of curve coverings.
//!
//! The crate is organised bottom-up:
//!
//! * [`valuation`]: log-scale absolute values and `|n|` in each characteristic regime;
//! * [`pm_func`]: piecewise monomial functions and Newton profiles of valued series;
//! * [`annulus`]: multiplicity and different along the skeleton of an annulus;
//! * [`graph`]: genus graphs, metric genus graphs and divisors;
//! * [`morphism`]: δ-morphisms, Riemann–Hurwitz bookkeeping, contractions and skeleton checks;
//! * [`special`]: root subtrees, the classification of special δ-morphisms and metric lifts;
//! * [`elliptic`]: minimal skeletons of double covers by elliptic curves;
//! * [`radial`]: radial sets and the degree-`p` ramification locus.
//!
//! All of it is generic over a [`Scalar`]; the aliases below fix the default
//! exact rational type.

pub mod annulus;
pub mod canon;
pub mod elliptic;
pub mod graph;
pub mod io;
pub mod morphism;
pub mod pm_func;
pub mod radial;
pub mod scalar;
pub mod special;
pub mod valuation;

pub use scalar::Scalar;

/// Default exact scalar.
pub type Rational = num_rational::Ratio<i64>;
/// Arbitrary precision rational, for inputs whose denominators outgrow `i64`.
pub type BigRational = num_rational::BigRational;

pub type LogAbsQ = valuation::LogAbs<Rational>;
pub type SettingQ = valuation::ResidueSetting<Rational>;
pub type PmFunctionQ = pm_func::PmFunction<Rational>;
pub type SeriesQ = pm_func::ValuedSeries<Rational>;

/// Outcome of a check that either holds or fails for a stated reason.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Violated(String),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }

    pub fn violated(reason: impl Into<String>) -> Self {
        Verdict::Violated(reason.into())
    }
}
