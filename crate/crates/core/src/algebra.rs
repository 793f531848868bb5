//! Path-length algebras on `[0, +inf]`.
//!
//! A [`LengthOperator`] is a commutative, associative, monotone binary
//! operation with identity 0, used to fold edge distances into a path
//! length. Together with `min` selecting among paths it determines a
//! shortest-path closure. Five operators are built in; anything else can
//! be supplied by implementing the trait.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rng::SplitMix64;

/// Relative tolerance for the algebraic law checks. Associativity of the
/// floating-point evaluations drifts by a few ulps, not more.
pub const LAW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("proximity {0} outside [0, 1]")]
    ProximityOutOfRange(f64),
    #[error("distance {0} is negative or NaN")]
    InvalidDistance(f64),
    #[error("path length of an empty edge list is undefined")]
    EmptyPath,
    #[error("unknown operator {0:?}; expected sum, max, minkowski(r=R), product or drastic")]
    UnknownOperator(String),
    #[error("minkowski exponent must satisfy r >= 1, got {0}")]
    InvalidExponent(f64),
}

/// Binary path-length operation on `[0, +inf]`.
pub trait LengthOperator: Sync {
    /// Stable identifier used in file headers and reports.
    fn id(&self) -> String;
    fn combine(&self, a: f64, b: f64) -> f64;
}

/// The built-in operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operator {
    /// `a + b`: standard additive path length.
    Sum,
    /// `max(a, b)`: weakest-link (minimax) path length.
    Max,
    /// `(a^r + b^r)^(1/r)` with `r >= 1`. `r = 1` is `Sum`; `r -> inf`
    /// approaches `Max`.
    Minkowski(f64),
    /// `(a+1)(b+1) - 1`: multiplicative accumulation with identity 0.
    Product,
    /// `a` if `b = 0`, `b` if `a = 0`, `+inf` otherwise. The largest
    /// possible path-length operator.
    Drastic,
}

impl Operator {
    pub const BUILTINS: [Operator; 5] = [
        Operator::Max,
        Operator::Sum,
        Operator::Minkowski(2.0),
        Operator::Product,
        Operator::Drastic,
    ];

    pub fn new_minkowski(r: f64) -> Result<Operator, AlgebraError> {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(AlgebraError::InvalidExponent(r));
        }
        Ok(Operator::Minkowski(r))
    }
}

impl LengthOperator for Operator {
    fn id(&self) -> String {
        match self {
            Operator::Sum => "sum".into(),
            Operator::Max => "max".into(),
            Operator::Minkowski(r) => format!("minkowski(r={r})"),
            Operator::Product => "product".into(),
            Operator::Drastic => "drastic".into(),
        }
    }

    fn combine(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a >= 0.0 && b >= 0.0, "lengths must be non-negative");
        match *self {
            Operator::Sum => a + b,
            Operator::Max => a.max(b),
            Operator::Minkowski(r) => minkowski(a, b, r),
            Operator::Product => {
                if a == 0.0 {
                    b
                } else if b == 0.0 {
                    a
                } else if a.is_infinite() || b.is_infinite() {
                    f64::INFINITY
                } else {
                    a + b + a * b
                }
            }
            Operator::Drastic => {
                if a == 0.0 {
                    b
                } else if b == 0.0 {
                    a
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// Minkowski mean evaluated in the log domain with max-factoring, so large
/// exponents neither overflow nor underflow: `m * (1 + (s/m)^r)^(1/r)`.
fn minkowski(a: f64, b: f64, r: f64) -> f64 {
    if a == 0.0 {
        return b;
    }
    if b == 0.0 {
        return a;
    }
    if a.is_infinite() || b.is_infinite() {
        return f64::INFINITY;
    }
    if r == 1.0 {
        return a + b;
    }
    let (m, s) = if a >= b { (a, b) } else { (b, a) };
    let t = (r * (s / m).ln()).exp();
    m * (t.ln_1p() / r).exp()
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for Operator {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "sum" | "metric" => return Ok(Operator::Sum),
            "max" | "ultrametric" => return Ok(Operator::Max),
            "product" => return Ok(Operator::Product),
            "drastic" => return Ok(Operator::Drastic),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("minkowski") {
            let rest = rest.trim();
            let inner = rest
                .strip_prefix("(r=")
                .and_then(|t| t.strip_suffix(')'))
                .or_else(|| rest.strip_prefix(':'));
            if let Some(num) = inner {
                let r: f64 = num
                    .trim()
                    .parse()
                    .map_err(|_| AlgebraError::UnknownOperator(s.to_string()))?;
                return Operator::new_minkowski(r);
            }
        }
        Err(AlgebraError::UnknownOperator(s.to_string()))
    }
}

/// Folds edge distances into a path length: left fold of `combine`.
pub fn path_length<O: LengthOperator + ?Sized>(op: &O, weights: &[f64]) -> Result<f64, AlgebraError> {
    let (&first, rest) = weights.split_first().ok_or(AlgebraError::EmptyPath)?;
    for &w in weights {
        if w.is_nan() || w < 0.0 {
            return Err(AlgebraError::InvalidDistance(w));
        }
    }
    Ok(rest.iter().fold(first, |acc, &w| op.combine(acc, w)))
}

/// `d = 1/p - 1`, the isomorphism from proximity to distance.
/// `p = 0` maps to `+inf` (no edge), `p = 1` to distance 0.
pub fn proximity_to_distance(p: f64) -> Result<f64, AlgebraError> {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(AlgebraError::ProximityOutOfRange(p));
    }
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / p - 1.0)
}

/// `p = 1/(d + 1)`, inverse of [`proximity_to_distance`].
pub fn distance_to_proximity(d: f64) -> Result<f64, AlgebraError> {
    if d.is_nan() || d < 0.0 {
        return Err(AlgebraError::InvalidDistance(d));
    }
    if d.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 / (d + 1.0))
}

/// Pulls a length operator back through the isomorphism to obtain its
/// proximity-side conjunction: `phi^-1(g(phi(p1), phi(p2)))`.
///
/// For `Sum` this is the Hamacher form `p1*p2 / (p1 + p2 - p1*p2)`.
pub fn derive_conjunction<O: LengthOperator + ?Sized>(
    op: &O,
    p1: f64,
    p2: f64,
) -> Result<f64, AlgebraError> {
    let d1 = proximity_to_distance(p1)?;
    let d2 = proximity_to_distance(p2)?;
    distance_to_proximity(op.combine(d1, d2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Commutativity,
    Associativity,
    Monotonicity,
    Identity,
    /// `g(a, b) >= max(a, b)`; follows from monotonicity and identity and
    /// is what makes label-setting shortest-path search valid.
    Extension,
}

#[derive(Debug, Clone)]
pub struct LawViolation {
    pub law: Law,
    pub inputs: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LawReport {
    pub operator_id: String,
    pub samples: usize,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn close(a: f64, b: f64) -> bool {
    if a == b {
        return true; // covers both infinite
    }
    if a.is_infinite() || b.is_infinite() {
        return false;
    }
    (a - b).abs() <= LAW_TOLERANCE * a.abs().max(b.abs()).max(1e-300)
}

fn sample_length(rng: &mut SplitMix64) -> f64 {
    match rng.next_below(16) {
        0 => 0.0,
        1 => f64::INFINITY,
        _ => rng.next_f64() * 1e6,
    }
}

/// Randomized check of the monoid laws over `[0, 1e6]` plus the boundary
/// values `{0, +inf}`. Records the first counterexample found per law.
pub fn check_operator_laws<O: LengthOperator + ?Sized>(
    op: &O,
    samples: usize,
    seed: u64,
) -> LawReport {
    let mut rng = SplitMix64::new(seed);
    let mut violations: Vec<LawViolation> = Vec::new();
    let record = |law: Law, inputs: &[f64], lhs: f64, rhs: f64, seen: &mut Vec<LawViolation>| {
        if !seen.iter().any(|v| v.law == law) {
            seen.push(LawViolation {
                law,
                inputs: inputs.to_vec(),
                lhs,
                rhs,
            });
        }
    };
    for _ in 0..samples {
        let a = sample_length(&mut rng);
        let b = sample_length(&mut rng);
        let c = sample_length(&mut rng);

        let ab = op.combine(a, b);
        let ba = op.combine(b, a);
        if !close(ab, ba) {
            record(Law::Commutativity, &[a, b], ab, ba, &mut violations);
        }

        let left = op.combine(ab, c);
        let right = op.combine(a, op.combine(b, c));
        if !close(left, right) {
            record(Law::Associativity, &[a, b, c], left, right, &mut violations);
        }

        let ia = op.combine(a, 0.0);
        if !close(ia, a) {
            record(Law::Identity, &[a], ia, a, &mut violations);
        }

        // monotone in both arguments: compare against a dominating pair
        let (lo1, hi1) = if a <= c { (a, c) } else { (c, a) };
        let d = sample_length(&mut rng);
        let (lo2, hi2) = if b <= d { (b, d) } else { (d, b) };
        let small = op.combine(lo1, lo2);
        let big = op.combine(hi1, hi2);
        if small > big && !close(small, big) {
            record(
                Law::Monotonicity,
                &[lo1, lo2, hi1, hi2],
                small,
                big,
                &mut violations,
            );
        }

        let bound = a.max(b);
        if ab < bound && !close(ab, bound) {
            record(Law::Extension, &[a, b], ab, bound, &mut violations);
        }
    }
    LawReport {
        operator_id: op.id(),
        samples,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DominanceVerdict {
    /// `g1 <= g2` pointwise on every sample.
    Holds,
    Counterexample { a: f64, b: f64, lhs: f64, rhs: f64 },
}

/// Samples whether `g1(a, b) <= g2(a, b)` pointwise.
pub fn dominance_check<A: LengthOperator + ?Sized, B: LengthOperator + ?Sized>(
    g1: &A,
    g2: &B,
    samples: usize,
    seed: u64,
) -> DominanceVerdict {
    let mut rng = SplitMix64::new(seed);
    for _ in 0..samples {
        let a = sample_length(&mut rng);
        let b = sample_length(&mut rng);
        let lhs = g1.combine(a, b);
        let rhs = g2.combine(a, b);
        if lhs > rhs && !close(lhs, rhs) {
            return DominanceVerdict::Counterexample { a, b, lhs, rhs };
        }
    }
    DominanceVerdict::Holds
}
