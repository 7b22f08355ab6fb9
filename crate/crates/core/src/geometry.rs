//! Norms on ℝ^d, exact unit-ball volumes, and the covering-constant bracket.
//!
//! Every norm here is a (possibly axis-weighted) ℓ_p norm,
//! `‖x‖ = ‖(w_1 x_1, …, w_d x_d)‖_p`, so its unit ball is the ℓ_p ball
//! stretched by `1/w_i` along axis `i`. These norms are absolute (monotone in
//! each |x_i|), which is what makes the box distance bounds below exact.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

/// The exponent of an ℓ_p norm. `Infinity` is its own tag so the cube case stays exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `1/p`, zero for p = ∞.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" || t == "∞" {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::InvalidNorm(format!("cannot parse exponent {s:?}")))?;
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else {
            Ok(Exponent::Finite(p))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExpVisitor;

        impl Visitor<'_> for ExpVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number p >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExpVisitor)
    }
}

#[derive(Deserialize)]
struct RawNorm {
    p: Exponent,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

/// A weighted ℓ_p norm; its unit ball `B` defines both the metric and the Lipschitz class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNorm")]
pub struct NormSpec {
    p: Exponent,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawNorm> for NormSpec {
    type Error = Error;

    fn try_from(raw: RawNorm) -> Result<Self> {
        NormSpec::new(raw.p, raw.weights)
    }
}

impl NormSpec {
    pub fn new(p: Exponent, weights: Option<Vec<f64>>) -> Result<Self> {
        if let Exponent::Finite(v) = p {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::InvalidNorm(format!("exponent must be >= 1, got {v}")));
            }
        }
        if let Some(w) = &weights {
            if w.is_empty() {
                return Err(Error::InvalidNorm("weights must not be empty".into()));
            }
            if let Some(bad) = w.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
                return Err(Error::InvalidNorm(format!("weights must be positive, got {bad}")));
            }
        }
        Ok(Self { p, weights })
    }

    pub fn lp(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Self::linf());
        }
        Self::new(Exponent::Finite(p), None)
    }

    pub fn l1() -> Self {
        Self { p: Exponent::Finite(1.0), weights: None }
    }

    pub fn l2() -> Self {
        Self { p: Exponent::Finite(2.0), weights: None }
    }

    pub fn linf() -> Self {
        Self { p: Exponent::Infinity, weights: None }
    }

    /// Same exponent, every axis scaled by `w`: `‖x‖ = ‖w·x‖_p`.
    pub fn uniformly_weighted(p: Exponent, d: usize, w: f64) -> Result<Self> {
        Self::new(p, Some(vec![w; d]))
    }

    pub fn exponent(&self) -> Exponent {
        self.p
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Checks that the norm can act on ℝ^d.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        match &self.weights {
            Some(w) => check_dim(w.len(), d),
            None => Ok(()),
        }
    }

    #[inline]
    fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0,
        }
    }

    /// Norm of the vector whose i-th absolute coordinate is `f(i)`.
    #[inline]
    fn norm_by<F: Fn(usize) -> f64>(&self, d: usize, f: F) -> f64 {
        match self.p {
            Exponent::Infinity => (0..d).fold(0.0, |m, i| f64::max(m, self.weight(i) * f(i))),
            Exponent::Finite(p) if p == 1.0 => (0..d).map(|i| self.weight(i) * f(i)).sum(),
            Exponent::Finite(p) if p == 2.0 => (0..d)
                .map(|i| {
                    let t = self.weight(i) * f(i);
                    t * t
                })
                .sum::<f64>()
                .sqrt(),
            Exponent::Finite(p) => {
                // Scale by the largest term to avoid overflow for large p.
                let m = (0..d).fold(0.0, |m, i| f64::max(m, self.weight(i) * f(i)));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = (0..d).map(|i| (self.weight(i) * f(i) / m).powf(p)).sum();
                m * s.powf(1.0 / p)
            }
        }
    }

    /// `‖v‖_B` without a dimension check.
    #[inline]
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.norm_by(v.len(), |i| v[i].abs())
    }

    /// `‖x − y‖_B` without a dimension check; the hot path for estimators.
    #[inline]
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        self.norm_by(x.len(), |i| (x[i] - y[i]).abs())
    }

    /// `‖x − y‖_B`, checking that both points and the norm agree on the dimension.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(x.len(), y.len())?;
        self.check_dim(x.len())?;
        Ok(self.dist(x, y))
    }

    /// Distance from `x` to the nearest point of the box `[lo, hi]`.
    #[inline]
    pub fn min_dist_to_box(&self, x: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
        self.norm_by(x.len(), |i| {
            if x[i] < lo[i] {
                lo[i] - x[i]
            } else if x[i] > hi[i] {
                x[i] - hi[i]
            } else {
                0.0
            }
        })
    }

    /// Distance from `x` to the farthest point (a vertex) of the box `[lo, hi]`.
    #[inline]
    pub fn max_dist_to_box(&self, x: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
        self.norm_by(x.len(), |i| f64::max((x[i] - lo[i]).abs(), (hi[i] - x[i]).abs()))
    }

    /// Unit vector (in this norm) along `v`; `None` for the zero vector.
    pub fn normalize(&self, v: &[f64]) -> Option<Vec<f64>> {
        let n = self.norm(v);
        (n > 0.0).then(|| v.iter().map(|t| t / n).collect())
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l_{}", self.p)?;
        if let Some(w) = &self.weights {
            write!(f, " weights {w:?}")?;
        }
        Ok(())
    }
}

/// `ln λ^d(B)`. The log form keeps large `d` from underflowing.
pub fn ln_unit_ball_volume(d: usize, norm: &NormSpec) -> Result<f64> {
    norm.check_dim(d)?;
    let df = d as f64;
    let base = match norm.exponent() {
        Exponent::Infinity => df * std::f64::consts::LN_2,
        Exponent::Finite(p) => {
            df * std::f64::consts::LN_2 + df * libm::lgamma(1.0 + 1.0 / p) - libm::lgamma(1.0 + df / p)
        }
    };
    let weight_log: f64 = norm.weights().map_or(0.0, |w| w.iter().map(|w| w.ln()).sum());
    Ok(base - weight_log)
}

/// `λ^d(B)` from the Dirichlet integral `2^d Γ(1+1/p)^d / Γ(1+d/p)`, divided by `∏ w_i`.
pub fn unit_ball_volume(d: usize, norm: &NormSpec) -> Result<f64> {
    ln_unit_ball_volume(d, norm).map(f64::exp)
}

/// `λ^d(B)^{1/d}`, computed in log space.
pub fn unit_ball_volume_root(d: usize, norm: &NormSpec) -> Result<f64> {
    Ok((ln_unit_ball_volume(d, norm)? / d as f64).exp())
}

/// Large-`d` approximation `2Γ(1+1/p)(pe)^{1/p} d^{-1/p}` of `λ^d(B_p^d)^{1/d}`.
pub fn ball_volume_root_asymptotic(d: usize, p: Exponent) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    match p {
        Exponent::Infinity => Err(Error::InvalidArgument(
            "p = inf has the exact value 2; the asymptotic form needs finite p".into(),
        )),
        Exponent::Finite(p) if !(p >= 1.0) => {
            Err(Error::InvalidNorm(format!("exponent must be >= 1, got {p}")))
        }
        Exponent::Finite(p) => {
            let e = std::f64::consts::E;
            Ok(2.0 * libm::tgamma(1.0 + 1.0 / p) * (p * e).powf(1.0 / p) * (d as f64).powf(-1.0 / p))
        }
    }
}

/// Bracket `[lower, upper]` for the covering density `Θ_B` of ℝ^d by translates of `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringBracket {
    pub lower: f64,
    /// `f64::INFINITY` when no finite bound is available.
    pub upper: f64,
    /// The ball tiles space, so `Θ_B = 1` exactly.
    pub tiles: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl CoveringBracket {
    pub fn is_finite(&self) -> bool {
        self.upper.is_finite()
    }
}

/// Rogers' covering bound `d ln d + d ln ln d + 5d` (natural logarithms), evaluated verbatim.
pub fn rogers_bound(d: usize) -> f64 {
    let d = d as f64;
    d * d.ln() + d * d.ln().ln() + 5.0 * d
}

/// `[1, d ln d + d ln ln d + 5d]`, collapsing to `[1, 1]` when the ball tiles space
/// (any ℓ_∞ box, and every norm on the line).
pub fn covering_constant_bracket(d: usize, norm: &NormSpec) -> CoveringBracket {
    if norm.exponent().is_infinite() || d == 1 {
        return CoveringBracket { lower: 1.0, upper: 1.0, tiles: true, warning: None };
    }
    if d < 2 {
        return CoveringBracket {
            lower: 1.0,
            upper: f64::INFINITY,
            tiles: false,
            warning: Some(format!("Rogers bound undefined for d = {d}")),
        };
    }
    CoveringBracket { lower: 1.0, upper: rogers_bound(d), tiles: false, warning: None }
}
