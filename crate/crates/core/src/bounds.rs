//! Closed-form bounds and asymptotes for `e_n` on `F^B(D)`, curse-of-dimension
//! thresholds, and the `C^r` integration lower bound.
//!
//! Formula ids:
//!
//! | id | quantity | valid |
//! |---|---|---|
//! | `lower2` | `λ(B)^{-1/d} vol^{1/d} n^{-1/d}` (L∞, every `D` of that volume) | all `n` |
//! | `lower4` | `(d/(d+1)) λ(B)^{-1/d} vol^{(d+1)/d} n^{-1/d}` (integration) | all `n` |
//! | `upper1` | `[λ(B)^{-1/d} vol^{1/d} (n+1)^{-1/d}, 2 λ(B)^{-1/d} vol^{1/d} n^{-1/d}]` | all `n` |
//! | `asy1` | `Θ_B^{1/d} (vol/λ(B))^{1/d} n^{-1/d}` | `n → ∞` |
//! | `asy3` | `ξ_B vol (vol/λ(B))^{1/d} n^{-1/d}`, `d/(d+1) ≤ ξ_B ≤ (d/(d+1)) Θ_B^{1/d}` | `n → ∞` |
//! | `curse` | `n ≥ (c̃_p(d)/ε)^d` for integration on the unit cube with `Lip = d^{-1/p}` | all `n` |
//! | `cr` | `min{1/2, c_r d n^{-r/d}}` for `C^r` integration | all `n` |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{covering_constant_bracket, ln_unit_ball_volume, Exponent, NormSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaId {
    Lower2,
    Lower4,
    Upper1,
    Asy1,
    Asy3,
    Curse,
    Cr,
}

impl FormulaId {
    pub const ALL: [FormulaId; 7] =
        [Self::Lower2, Self::Lower4, Self::Upper1, Self::Asy1, Self::Asy3, Self::Curse, Self::Cr];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lower2 => "lower2",
            Self::Lower4 => "lower4",
            Self::Upper1 => "upper1",
            Self::Asy1 => "asy1",
            Self::Asy3 => "asy3",
            Self::Curse => "curse",
            Self::Cr => "cr",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown formula '{s}' (expected lower2, lower4, upper1, asy1, asy3, curse or cr)")))
    }
}

/// Inputs echoed into every report; unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: Option<f64>,
    pub d: usize,
    pub norm: Option<NormSpec>,
    pub vol: Option<f64>,
    pub eps: Option<f64>,
    pub r: Option<f64>,
    pub c_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: String,
    pub formula: FormulaId,
    /// Representative value; the lower end for intervals.
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// Holds only as `n → ∞`; not a finite-`n` statement.
    pub asymptotic: bool,
    /// The bound carries no information for these inputs.
    pub vacuous: bool,
    pub inputs: BoundInputs,
    /// Auxiliary constants (coefficients, brackets) by name.
    pub constants: BTreeMap<String, f64>,
}

impl BoundReport {
    fn point(quantity: &str, formula: FormulaId, value: f64, inputs: BoundInputs) -> Self {
        Self::interval(quantity, formula, value, value, inputs)
    }

    fn interval(quantity: &str, formula: FormulaId, lo: f64, hi: f64, inputs: BoundInputs) -> Self {
        Self {
            quantity: quantity.into(),
            formula,
            value: lo,
            lo,
            hi,
            asymptotic: matches!(formula, FormulaId::Asy1 | FormulaId::Asy3),
            vacuous: false,
            inputs,
            constants: BTreeMap::new(),
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_common(n: f64, d: usize, norm: &NormSpec, vol: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("n must be >= 1, got {n}")));
    }
    check_positive("volume", vol)?;
    norm.check_dim(d)
}

fn inputs(n: f64, d: usize, norm: &NormSpec, vol: f64) -> BoundInputs {
    BoundInputs { n: Some(n), d, norm: Some(norm.clone()), vol: Some(vol), ..Default::default() }
}

/// `(vol/λ(B))^{1/d} n^{-1/d}`, in log space.
fn base(n: f64, d: usize, norm: &NormSpec, vol: f64) -> Result<f64> {
    let df = d as f64;
    Ok(((vol.ln() - ln_unit_ball_volume(d, norm)? - n.ln()) / df).exp())
}

/// Uniform L∞ lower bound: no domain of volume `vol` has `e_n` below this.
pub fn linf_uniform_lower(n: f64, d: usize, norm: &NormSpec, vol: f64) -> Result<BoundReport> {
    check_common(n, d, norm, vol)?;
    Ok(BoundReport::point("inf_D e_n(APP_inf)", FormulaId::Lower2, base(n, d, norm, vol)?, inputs(n, d, norm, vol)))
}

/// Range of `sup_D e_n` over domains of volume `vol` with boundary of measure zero.
pub fn linf_boundary_zero_bracket(n: f64, d: usize, norm: &NormSpec, vol: f64) -> Result<BoundReport> {
    check_common(n, d, norm, vol)?;
    let lo = base(n + 1.0, d, norm, vol)?;
    let hi = 2.0 * base(n, d, norm, vol)?;
    Ok(BoundReport::interval("sup_D e_n(APP_inf)", FormulaId::Upper1, lo, hi, inputs(n, d, norm, vol)))
}

/// L∞ asymptote with `Θ_B` replaced by its bracket; a point for ℓ∞ norms.
pub fn linf_asymptote(n: f64, d: usize, norm: &NormSpec, vol: f64) -> Result<BoundReport> {
    check_common(n, d, norm, vol)?;
    let theta = covering_constant_bracket(d, norm);
    let b = base(n, d, norm, vol)?;
    let df = d as f64;
    let mut r = BoundReport::interval(
        "e_n(APP_inf) asymptote",
        FormulaId::Asy1,
        theta.lower.powf(1.0 / df) * b,
        theta.upper.powf(1.0 / df) * b,
        inputs(n, d, norm, vol),
    );
    r.constants.insert("theta_lo".into(), theta.lower);
    r.constants.insert("theta_hi".into(), theta.upper);
    Ok(r)
}

/// Uniform integration lower bound, attained by unions of `n` equal disjoint balls.
pub fn int_uniform_lower(n: f64, d: usize, norm: &NormSpec, vol: f64) -> Result<BoundReport> {
    check_common(n, d, norm, vol)?;
    let df = d as f64;
    let v = df / (df + 1.0) * vol * base(n, d, norm, vol)?;
    Ok(BoundReport::point("inf_D e_n(INT)", FormulaId::Lower4, v, inputs(n, d, norm, vol)))
}

/// Integration asymptote with `ξ_B` replaced by its bracket. Also reports the
/// range of `asy1 / (asy3 / vol)`, the L∞-to-integration ratio of constants.
pub fn int_asymptote(n: f64, d: usize, norm: &NormSpec, vol: f64) -> Result<BoundReport> {
    check_common(n, d, norm, vol)?;
    let theta = covering_constant_bracket(d, norm);
    let df = d as f64;
    let xi_lo = df / (df + 1.0);
    let xi_hi = xi_lo * theta.upper.powf(1.0 / df);
    let b = vol * base(n, d, norm, vol)?;
    let mut r = BoundReport::interval("e_n(INT) asymptote", FormulaId::Asy3, xi_lo * b, xi_hi * b, inputs(n, d, norm, vol));
    r.constants.insert("xi_lo".into(), xi_lo);
    r.constants.insert("xi_hi".into(), xi_hi);
    r.constants.insert("ratio_lo".into(), 1.0);
    r.constants.insert("ratio_hi".into(), (df + 1.0) / df * theta.upper.powf(1.0 / df));
    Ok(r)
}

/// `c̃_p(d) = (d/(d+1)) d^{-1/p} λ(B_p^d)^{-1/d}` from the exact Γ volume.
pub fn curse_coefficient(d: usize, p: f64) -> Result<f64> {
    let norm = NormSpec::lp(p)?;
    let df = d as f64;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    Ok(df / (df + 1.0) * df.powf(-1.0 / p) * (-ln_unit_ball_volume(d, &norm)? / df).exp())
}

/// The same coefficient with `λ(B_p^d)^{1/d}` replaced by its large-`d` form;
/// `d/(d+1) · 1/(2Γ(1+1/p)(pe)^{1/p})`, which tends to `(2πe)^{-1/2}` for `p = 2`.
pub fn curse_coefficient_asymptotic(d: usize, p: f64) -> Result<f64> {
    NormSpec::lp(p)?;
    let df = d as f64;
    let limit = 1.0 / (2.0 * libm::tgamma(1.0 + 1.0 / p) * (p * std::f64::consts::E).powf(1.0 / p));
    Ok(df / (df + 1.0) * limit)
}

/// Smallest `n` allowed by the integration lower bound to reach error `ε` on
/// the unit cube for functions of Lipschitz constant `d^{-1/p}` in ℓ_p.
///
/// The count is returned as `f64` (`value`); it overflows integers for large `d`.
pub fn curse_min_n(eps: f64, d: usize, p: f64) -> Result<BoundReport> {
    check_positive("epsilon", eps)?;
    let c = curse_coefficient(d, p)?;
    let asy = curse_coefficient_asymptotic(d, p)?;
    let vacuous = eps >= c;
    let n = if vacuous { 1.0 } else { (d as f64 * (c / eps).ln()).exp().ceil() };
    let mut r = BoundReport::point(
        "n(eps, d)",
        FormulaId::Curse,
        n,
        BoundInputs { d, norm: Some(NormSpec::lp(p)?), vol: Some(1.0), eps: Some(eps), ..Default::default() },
    );
    r.vacuous = vacuous;
    r.constants.insert("coefficient".into(), c);
    r.constants.insert("coefficient_asymptotic".into(), asy);
    r.constants.insert("log10_n".into(), d as f64 * (c / eps).max(1.0).log10());
    Ok(r)
}

/// `min{1/2, c_r d n^{-r/d}}`; `c_r` has no known value and must be supplied.
pub fn cr_class_lower(n: f64, d: usize, r: f64, c_r: f64) -> Result<BoundReport> {
    if d == 0 || !(n >= 1.0) {
        return Err(Error::InvalidArgument("need n >= 1 and d >= 1".into()));
    }
    check_positive("r", r)?;
    check_positive("c_r", c_r)?;
    let tail = c_r * d as f64 * n.powf(-r / d as f64);
    let mut rep = BoundReport::point(
        "e_n(C^r, INT)",
        FormulaId::Cr,
        tail.min(0.5),
        BoundInputs { n: Some(n), d, r: Some(r), c_r: Some(c_r), ..Default::default() },
    );
    rep.constants.insert("tail".into(), tail);
    Ok(rep)
}

/// Dispatch by formula id. Missing required inputs are configuration errors.
pub fn compute(formula: FormulaId, inputs: &BoundInputs) -> Result<BoundReport> {
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| Error::InvalidArgument(format!("formula {formula} needs --{name}")));
    let d = inputs.d;
    let norm = || inputs.norm.clone().unwrap_or_else(|| NormSpec::l2());
    match formula {
        FormulaId::Lower2 => linf_uniform_lower(need("n", inputs.n)?, d, &norm(), inputs.vol.unwrap_or(1.0)),
        FormulaId::Lower4 => int_uniform_lower(need("n", inputs.n)?, d, &norm(), inputs.vol.unwrap_or(1.0)),
        FormulaId::Upper1 => linf_boundary_zero_bracket(need("n", inputs.n)?, d, &norm(), inputs.vol.unwrap_or(1.0)),
        FormulaId::Asy1 => linf_asymptote(need("n", inputs.n)?, d, &norm(), inputs.vol.unwrap_or(1.0)),
        FormulaId::Asy3 => int_asymptote(need("n", inputs.n)?, d, &norm(), inputs.vol.unwrap_or(1.0)),
        FormulaId::Curse => {
            let p = match norm().exponent() {
                Exponent::Finite(p) => p,
                Exponent::Infinity => return Err(Error::InvalidArgument("curse needs a finite p".into())),
            };
            curse_min_n(need("eps", inputs.eps)?, d, p)
        }
        FormulaId::Cr => cr_class_lower(need("n", inputs.n)?, d, inputs.r.unwrap_or(1.0), need("c-r", inputs.c_r)?),
    }
}
