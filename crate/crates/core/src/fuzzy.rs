//! Membership functions over the probability axis, linguistic probability
//! labels, defuzzification, t-norms / t-conorms and the discrete probability
//! of a fuzzy event.
//!
//! All shapes are piecewise linear on `[0, 1]`. A triangle `(a, b, c)` is
//! handled as the trapezoid `(a, b, b, c)`; a crisp label is a single spike.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance accepted on the total mass of a probability mass function.
pub const PMF_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("value {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("invalid shape for label `{name}`: {reason}")]
    InvalidShape { name: String, reason: String },
    #[error("label `{0}` has zero membership mass")]
    ZeroMass(String),
    #[error("alpha level {0} outside (0, 1]")]
    InvalidAlpha(f64),
    #[error("outcome `{0}` present in only one of membership/pmf")]
    DomainMismatch(String),
    #[error("pmf sums to {0}, expected 1")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Crisp(f64),
    Triangular(f64, f64, f64),
    Trapezoidal(f64, f64, f64, f64),
}

impl Shape {
    /// Trapezoid breakpoints `(a, b, c, d)`; crisp values collapse to a point.
    fn breakpoints(&self) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Crisp(v) => (v, v, v, v),
            Shape::Triangular(a, b, c) => (a, b, b, c),
            Shape::Trapezoidal(a, b, c, d) => (a, b, c, d),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Shape::Crisp(v) => write!(f, "crisp({v})"),
            Shape::Triangular(a, b, c) => write!(f, "tri({a},{b},{c})"),
            Shape::Trapezoidal(a, b, c, d) => write!(f, "trap({a},{b},{c},{d})"),
        }
    }
}

/// A named linguistic probability predicate such as "highly probable".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyLabel {
    pub name: String,
    pub shape: Shape,
}

impl FuzzyLabel {
    pub fn new(name: impl Into<String>, shape: Shape) -> Result<Self, FuzzyError> {
        let name = name.into();
        let (a, b, c, d) = shape.breakpoints();
        let invalid = |reason: &str| FuzzyError::InvalidShape {
            name: name.clone(),
            reason: reason.to_string(),
        };
        if [a, b, c, d].iter().any(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(invalid("breakpoints must lie in [0, 1]"));
        }
        if !(a <= b && b <= c && c <= d) {
            return Err(invalid("breakpoints must be non-decreasing"));
        }
        Ok(FuzzyLabel { name, shape })
    }

    pub fn crisp(name: impl Into<String>, v: f64) -> Result<Self, FuzzyError> {
        Self::new(name, Shape::Crisp(v))
    }

    pub fn triangular(name: impl Into<String>, a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        Self::new(name, Shape::Triangular(a, b, c))
    }

    pub fn trapezoidal(name: impl Into<String>, a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        Self::new(name, Shape::Trapezoidal(a, b, c, d))
    }

    /// Closed support `[a, d]`.
    pub fn support(&self) -> (f64, f64) {
        let (a, _, _, d) = self.shape.breakpoints();
        (a, d)
    }

    /// Total area under the membership function.
    pub fn mass(&self) -> f64 {
        match self.shape {
            Shape::Crisp(_) => 0.0,
            _ => {
                let (a, b, c, d) = self.shape.breakpoints();
                (b - a) / 2.0 + (c - b) + (d - c) / 2.0
            }
        }
    }
}

/// Default vocabulary of linguistic probabilities. Documents may redefine any
/// of these names.
pub fn builtin_labels() -> Vec<FuzzyLabel> {
    vec![
        FuzzyLabel::new("unlikely", Shape::Trapezoidal(0.0, 0.0, 0.1, 0.3)).unwrap(),
        FuzzyLabel::new("possible", Shape::Triangular(0.3, 0.5, 0.7)).unwrap(),
        FuzzyLabel::new("highly_probable", Shape::Triangular(0.6, 0.8, 1.0)).unwrap(),
        FuzzyLabel::new("almost_certain", Shape::Trapezoidal(0.8, 0.95, 1.0, 1.0)).unwrap(),
    ]
}

pub fn builtin_label(name: &str) -> Option<FuzzyLabel> {
    builtin_labels().into_iter().find(|l| l.name == name)
}

fn check_unit(x: f64) -> Result<(), FuzzyError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(FuzzyError::OutOfRange(x))
    }
}

/// Degree of membership of `x` in `label`.
pub fn membership(label: &FuzzyLabel, x: f64) -> Result<f64, FuzzyError> {
    check_unit(x)?;
    Ok(membership_unchecked(&label.shape, x))
}

fn membership_unchecked(shape: &Shape, x: f64) -> f64 {
    if let Shape::Crisp(v) = *shape {
        return if x == v { 1.0 } else { 0.0 };
    }
    let (a, b, c, d) = shape.breakpoints();
    if x >= b && x <= c {
        1.0
    } else if x > a && x < b {
        (x - a) / (b - a)
    } else if x > c && x < d {
        (d - x) / (d - c)
    } else {
        0.0
    }
}

/// Centre of gravity of the membership function, in closed form.
pub fn defuzzify_centroid(label: &FuzzyLabel) -> Result<f64, FuzzyError> {
    if let Shape::Crisp(v) = label.shape {
        return Ok(v);
    }
    let (a, b, c, d) = label.shape.breakpoints();
    // rising triangle, core rectangle, falling triangle
    let pieces = [
        ((b - a) / 2.0, a + 2.0 * (b - a) / 3.0),
        (c - b, (b + c) / 2.0),
        ((d - c) / 2.0, c + (d - c) / 3.0),
    ];
    let mass: f64 = pieces.iter().map(|(m, _)| m).sum();
    if mass <= 0.0 {
        return Err(FuzzyError::ZeroMass(label.name.clone()));
    }
    let moment: f64 = pieces.iter().map(|(m, x)| m * x).sum();
    Ok(moment / mass)
}

/// The closed interval `{x : membership(x) >= alpha}`.
pub fn alpha_cut(label: &FuzzyLabel, alpha: f64) -> Result<(f64, f64), FuzzyError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(FuzzyError::InvalidAlpha(alpha));
    }
    let (a, b, c, d) = label.shape.breakpoints();
    Ok((a + alpha * (b - a), d - alpha * (d - c)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum NormKind {
    #[default]
    Godel,
    Product,
    Lukasiewicz,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Godel, NormKind::Product, NormKind::Lukasiewicz];

    pub fn as_str(&self) -> &'static str {
        match self {
            NormKind::Godel => "godel",
            NormKind::Product => "product",
            NormKind::Lukasiewicz => "lukasiewicz",
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "godel" => Ok(NormKind::Godel),
            "product" => Ok(NormKind::Product),
            "lukasiewicz" => Ok(NormKind::Lukasiewicz),
            other => Err(format!("unknown norm kind `{other}`")),
        }
    }
}

/// Fuzzy conjunction.
pub fn tnorm(kind: NormKind, a: f64, b: f64) -> Result<f64, FuzzyError> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(match kind {
        NormKind::Godel => a.min(b),
        NormKind::Product => a * b,
        NormKind::Lukasiewicz => (a + b - 1.0).max(0.0),
    })
}

/// Fuzzy disjunction.
pub fn tconorm(kind: NormKind, a: f64, b: f64) -> Result<f64, FuzzyError> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(match kind {
        NormKind::Godel => a.max(b),
        NormKind::Product => a + b - a * b,
        NormKind::Lukasiewicz => (a + b).min(1.0),
    })
}

/// Zadeh's probability of a fuzzy event over a discrete outcome space:
/// the expectation of the membership function under `pmf`.
pub fn fuzzy_event_probability<K: Ord + fmt::Display>(
    memberships: &BTreeMap<K, f64>,
    pmf: &BTreeMap<K, f64>,
) -> Result<f64, FuzzyError> {
    for key in memberships.keys() {
        if !pmf.contains_key(key) {
            return Err(FuzzyError::DomainMismatch(key.to_string()));
        }
    }
    for key in pmf.keys() {
        if !memberships.contains_key(key) {
            return Err(FuzzyError::DomainMismatch(key.to_string()));
        }
    }
    let total: f64 = pmf.values().sum();
    if (total - 1.0).abs() > PMF_TOLERANCE || pmf.values().any(|p| *p < 0.0) {
        return Err(FuzzyError::NotNormalized(total));
    }
    let mut acc = 0.0;
    for (key, mu) in memberships {
        check_unit(*mu)?;
        acc += mu * pmf[key];
    }
    Ok(acc.clamp(0.0, 1.0))
}
