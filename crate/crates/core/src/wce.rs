//! Worst-case errors (radii of information) for function values at fixed nodes
//! on the class `F^ω(D) = {f : |f(x) − f(y)| ≤ ω(‖x − y‖)}`.
//!
//! For fixed nodes `X`, the worst function vanishing on `X` is
//! `g(x) = ω(min_i ‖x − x_i‖)`. Hence
//!
//! * L∞ recovery: `r(X, APP_∞) = ω(sup_D min_i ‖x − x_i‖) = ω(covering radius)`;
//! * integration: `r(X, INT) = ∫_D ω(min_i ‖x − x_i‖) dx`.
//!
//! `g` is nonnegative and the class is symmetric, so the one-sided and
//! two-sided integration errors coincide.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{map_sample_chunks, volume, BallUnion, Domain, VolumeMethod};
use crate::error::{check_dim, Error, Result};
use crate::geometry::NormSpec;
use crate::nearest::NearestIndex;
use crate::points::PointSet;

/// A modulus of continuity `ω`: nondecreasing, subadditive, `ω(0) = 0`.
#[derive(Clone)]
pub enum Modulus {
    /// `ω(h) = h`, the Lipschitz class.
    Identity,
    /// `ω(h) = h^α` with `α ∈ (0, 1]`.
    Power(f64),
    Custom { name: String, f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Identity => f.write_str("Identity"),
            Modulus::Power(a) => write!(f, "Power({a})"),
            Modulus::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Modulus {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
        }
        Ok(if alpha == 1.0 { Modulus::Identity } else { Modulus::Power(alpha) })
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Modulus::Custom { name: name.into(), f: Arc::new(f) }
    }

    #[inline]
    pub fn eval(&self, h: f64) -> f64 {
        match self {
            Modulus::Identity => h,
            Modulus::Power(a) => h.powf(*a),
            Modulus::Custom { f, .. } => f(h),
        }
    }

    /// Samples the modulus axioms on `[0, h_max]`: `ω(0) = 0`, monotonicity,
    /// subadditivity on `pairs` random pairs, and continuity at zero.
    pub fn check_axioms(&self, h_max: f64, pairs: usize, seed: u64) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidArgument(format!("{self:?} is not a modulus: {what}")));
        if self.eval(0.0).abs() > 1e-12 {
            return bad(format!("ω(0) = {}", self.eval(0.0)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..pairs {
            let a = rng.gen_range(0.0..h_max);
            let b = rng.gen_range(0.0..h_max);
            let (wa, wb, wab) = (self.eval(a), self.eval(b), self.eval(a + b));
            if wab > wa + wb + 1e-12 * (1.0 + wa + wb) {
                return bad(format!("ω({}) > ω({a}) + ω({b})", a + b));
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if self.eval(lo) > self.eval(hi) + 1e-12 {
                return bad(format!("decreasing between {lo} and {hi}"));
            }
        }
        let tiny = self.eval(h_max * 1e-12);
        if tiny > 1e-3 * self.eval(h_max).max(1e-300) && tiny > 1e-6 {
            return bad(format!("not continuous at 0: ω({}) = {tiny}", h_max * 1e-12));
        }
        Ok(())
    }
}

/// `N(f) = (f(x_1), …, f(x_n))` for nodes inside a domain, with the metric norm.
#[derive(Debug, Clone)]
pub struct InformationMap {
    domain: Domain,
    nodes: PointSet,
    norm: NormSpec,
}

impl InformationMap {
    /// Checks that every node lies in the domain.
    pub fn new(domain: Domain, nodes: PointSet, norm: NormSpec) -> Result<Self> {
        let d = domain.dim();
        check_dim(d, nodes.dim())?;
        norm.check_dim(d)?;
        for (i, p) in nodes.iter().enumerate() {
            if !domain.contains_unchecked(p) {
                return Err(Error::InvalidArgument(format!("node {i} at {p:?} lies outside the domain")));
            }
        }
        Ok(Self { domain, nodes, norm })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Evaluates `f` at the nodes.
    pub fn apply(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.nodes.iter().map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Exact,
    Certified,
    MonteCarlo,
}

/// A computed worst-case error with the estimator's metadata.
///
/// `certified`: the true value lies in `[lo, hi]`. `monte-carlo`: `stderr` is set
/// for mean-type estimates; a sampled supremum only has `lo` (it is a lower estimate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub value: f64,
    pub kind: ReportKind,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl ErrorReport {
    pub fn exact(value: f64) -> Self {
        Self { value, kind: ReportKind::Exact, lo: Some(value), hi: Some(value), stderr: None, seed: None, samples: None }
    }

    /// `hi − lo` for certified reports.
    pub fn width(&self) -> Option<f64> {
        Some(self.hi? - self.lo?)
    }

    /// Pushes the value and bounds through a nondecreasing map.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            value: f(self.value),
            lo: self.lo.map(&f),
            hi: self.hi.map(&f),
            stderr: None,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoverMode {
    /// Branch and bound over the 1-Lipschitz distance field until `hi − lo ≤ tol`.
    Certified { tol: f64, max_boxes: usize },
    /// Maximum over `budget` uniform samples; a lower estimate.
    MonteCarlo { budget: usize, seed: u64 },
}

impl CoverMode {
    pub fn certified(tol: f64) -> Self {
        CoverMode::Certified { tol, max_boxes: 4_000_000 }
    }
}

/// `sup_{x ∈ D} min_i ‖x − x_i‖`.
pub fn covering_radius(info: &InformationMap, mode: CoverMode) -> Result<ErrorReport> {
    if info.is_empty() {
        return Err(Error::EmptyInformation);
    }
    match mode {
        CoverMode::MonteCarlo { budget, seed } => covering_radius_mc(info, budget, seed),
        CoverMode::Certified { tol, max_boxes } => {
            if !(tol > 0.0) {
                return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
            }
            match info.domain() {
                Domain::Mask(_) => Err(Error::Unsupported(
                    "certified covering radius needs a box or ball-union domain".into(),
                )),
                _ => Ok(certify(info, tol, max_boxes)),
            }
        }
    }
}

fn covering_radius_mc(info: &InformationMap, budget: usize, seed: u64) -> Result<ErrorReport> {
    if budget == 0 {
        return Err(Error::InvalidArgument("sample budget must be positive".into()));
    }
    let index = NearestIndex::new(info.nodes(), info.norm());
    let parts = map_sample_chunks(info.domain(), budget, seed, |pts| {
        pts.iter().map(|x| index.nearest(x).map_or(f64::INFINITY, |(_, d)| d)).fold(0.0, f64::max)
    })?;
    let value = parts.into_iter().fold(0.0, f64::max);
    Ok(ErrorReport {
        value,
        kind: ReportKind::MonteCarlo,
        lo: Some(value),
        hi: None,
        stderr: None,
        seed: Some(seed),
        samples: Some(budget),
    })
}

// ---- certified branch and bound ----

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    upper: f64,
    /// Nodes that can be nearest somewhere in the cell.
    cand: Vec<u32>,
    /// Balls of the domain meeting the cell (ball unions only).
    balls: Vec<u32>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

struct Certifier<'a> {
    info: &'a InformationMap,
    /// For ball unions: per ball, `sup_{u ∈ ball_j − c_j} ‖u‖_metric`.
    ball_reach: Vec<f64>,
}

impl<'a> Certifier<'a> {
    fn new(info: &'a InformationMap) -> Self {
        let ball_reach = match info.domain() {
            Domain::BallUnion(u) => (0..u.len())
                .map(|j| {
                    if u.norm() == info.norm() {
                        u.radii()[j]
                    } else {
                        let (lo, hi) = u.ball_bbox(j);
                        info.norm().max_dist_to_box(u.centers().point(j), &lo, &hi)
                    }
                })
                .collect(),
            _ => Vec::new(),
        };
        Self { info, ball_reach }
    }

    fn node(&self, i: u32) -> &[f64] {
        self.info.nodes().point(i as usize)
    }

    fn f(&self, cand: &[u32], x: &[f64]) -> f64 {
        let norm = self.info.norm();
        cand.iter().fold(f64::INFINITY, |m, &i| m.min(norm.dist(x, self.node(i))))
    }

    /// Upper bound on `sup_{x ∈ cell ∩ D} min_i ‖x − x_i‖`, the surviving
    /// candidates, and the balls meeting the cell. `None` if the cell misses `D`.
    fn bound(&self, lo: &[f64], hi: &[f64], parent_cand: &[u32], parent_balls: &[u32]) -> Option<(f64, Vec<u32>, Vec<u32>)> {
        let norm = self.info.norm();
        let (upper, balls) = match self.info.domain() {
            Domain::BallUnion(u) => {
                let balls: Vec<u32> = parent_balls
                    .iter()
                    .copied()
                    .filter(|&j| u.norm().min_dist_to_box(u.centers().point(j as usize), lo, hi) <= u.radii()[j as usize])
                    .collect();
                if balls.is_empty() {
                    return None;
                }
                let upper = balls
                    .iter()
                    .map(|&j| self.ball_piece_bound(u, j as usize, lo, hi, parent_cand))
                    .fold(0.0, f64::max);
                (upper, balls)
            }
            _ => {
                let upper = parent_cand
                    .iter()
                    .map(|&i| norm.max_dist_to_box(self.node(i), lo, hi))
                    .fold(f64::INFINITY, f64::min);
                (upper, Vec::new())
            }
        };
        let cand: Vec<u32> = parent_cand
            .iter()
            .copied()
            .filter(|&i| norm.min_dist_to_box(self.node(i), lo, hi) <= upper)
            .collect();
        Some((upper, cand, balls))
    }

    /// Bound over `cell ∩ ball_j`: the cell clipped to the ball's bounding box,
    /// and the ball's own reach around its center.
    fn ball_piece_bound(&self, u: &BallUnion, j: usize, lo: &[f64], hi: &[f64], cand: &[u32]) -> f64 {
        let norm = self.info.norm();
        let (blo, bhi) = u.ball_bbox(j);
        let clo: Vec<f64> = lo.iter().zip(&blo).map(|(a, b)| a.max(*b)).collect();
        let chi: Vec<f64> = hi.iter().zip(&bhi).map(|(a, b)| a.min(*b)).collect();
        let c = u.centers().point(j);
        cand.iter()
            .map(|&i| {
                let x = self.node(i);
                norm.max_dist_to_box(x, &clo, &chi).min(norm.dist(c, x) + self.ball_reach[j])
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Points of `cell ∩ D` at which the distance field is evaluated for the lower bound.
    fn witnesses(&self, lo: &[f64], hi: &[f64], cand: &[u32], balls: &[u32]) -> Vec<Vec<f64>> {
        let norm = self.info.norm();
        let d = lo.len();
        let center: Vec<f64> = (0..d).map(|i| 0.5 * (lo[i] + hi[i])).collect();
        let far_vertex = |from: &[f64]| -> Vec<f64> {
            (0..d).map(|i| if (from[i] - lo[i]).abs() >= (hi[i] - from[i]).abs() { lo[i] } else { hi[i] }).collect()
        };
        let mut out = Vec::new();
        match self.info.domain() {
            Domain::BallUnion(u) => {
                if self.info.domain().contains_unchecked(&center) {
                    out.push(center.clone());
                }
                for &j in balls.iter().take(4) {
                    let j = j as usize;
                    let c = u.centers().point(j);
                    let a: Vec<f64> = (0..d).map(|i| c[i].clamp(lo[i], hi[i])).collect();
                    // farthest vertex from the node nearest to a
                    let near = cand
                        .iter()
                        .min_by(|&&p, &&q| norm.dist(&a, self.node(p)).total_cmp(&norm.dist(&a, self.node(q))))
                        .copied();
                    for v in [Some(far_vertex(c)), near.map(|k| far_vertex(self.node(k)))].into_iter().flatten() {
                        out.push(last_inside_on_segment(&a, &v, |y| u.in_ball(j, y)));
                    }
                }
            }
            _ => {
                out.push(center);
                let best = cand
                    .iter()
                    .min_by(|&&p, &&q| {
                        norm.max_dist_to_box(self.node(p), lo, hi).total_cmp(&norm.max_dist_to_box(self.node(q), lo, hi))
                    })
                    .copied();
                if let Some(k) = best {
                    out.push(far_vertex(self.node(k)));
                }
            }
        }
        out
    }

    /// Split position along `axis`: a midpoint between node coordinates near the
    /// cell center when one exists (it aligns cells with bisectors of regular
    /// node sets), otherwise the cell midpoint.
    fn split_at(&self, lo: &[f64], hi: &[f64], axis: usize, cand: &[u32]) -> f64 {
        let (a, b) = (lo[axis], hi[axis]);
        let (inner_lo, inner_hi) = (a + 0.25 * (b - a), b - 0.25 * (b - a));
        let mid = 0.5 * (a + b);
        if cand.len() > 64 {
            return mid;
        }
        let mut coords: Vec<f64> = cand.iter().map(|&i| self.node(i)[axis]).collect();
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        coords
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .filter(|m| *m > inner_lo && *m < inner_hi)
            .min_by(|p, q| (p - mid).abs().total_cmp(&(q - mid).abs()))
            .unwrap_or(mid)
    }
}

/// Moves from `a` (inside) towards `v` and returns the last point found inside.
fn last_inside_on_segment(a: &[f64], v: &[f64], inside: impl Fn(&[f64]) -> bool) -> Vec<f64> {
    if inside(v) {
        return v.to_vec();
    }
    let at = |t: f64| -> Vec<f64> { a.iter().zip(v).map(|(p, q)| p + t * (q - p)).collect() };
    let (mut s, mut t) = (0.0, 1.0);
    for _ in 0..60 {
        let m = 0.5 * (s + t);
        if inside(&at(m)) {
            s = m;
        } else {
            t = m;
        }
    }
    at(s)
}

fn certify(info: &InformationMap, tol: f64, max_boxes: usize) -> ErrorReport {
    let cert = Certifier::new(info);
    let (lo, hi) = info.domain().bounding_box();
    let d = lo.len();
    let all: Vec<u32> = (0..info.len() as u32).collect();
    let all_balls: Vec<u32> = match info.domain() {
        Domain::BallUnion(u) => (0..u.len() as u32).collect(),
        _ => Vec::new(),
    };
    let weights: Vec<f64> = (0..d).map(|i| info.norm().weights().map_or(1.0, |w| w[i])).collect();

    let mut best_lo = 0.0f64;
    let mut heap = BinaryHeap::new();
    let mut processed = 0usize;
    if let Some((upper, cand, balls)) = cert.bound(&lo, &hi, &all, &all_balls) {
        for w in cert.witnesses(&lo, &hi, &cand, &balls) {
            best_lo = best_lo.max(cert.f(&cand, &w));
        }
        heap.push(Cell { lo, hi, upper, cand, balls });
    }
    let upper = loop {
        let Some(cell) = heap.pop() else { break best_lo };
        if cell.upper <= best_lo + tol || processed >= max_boxes {
            break cell.upper.max(best_lo);
        }
        processed += 1;
        let axis = (0..d)
            .max_by(|&i, &j| (weights[i] * (cell.hi[i] - cell.lo[i])).total_cmp(&(weights[j] * (cell.hi[j] - cell.lo[j]))))
            .unwrap_or(0);
        let at = cert.split_at(&cell.lo, &cell.hi, axis, &cell.cand);
        for half in 0..2 {
            let mut clo = cell.lo.clone();
            let mut chi = cell.hi.clone();
            if half == 0 {
                chi[axis] = at;
            } else {
                clo[axis] = at;
            }
            let Some((upper, cand, balls)) = cert.bound(&clo, &chi, &cell.cand, &cell.balls) else { continue };
            for w in cert.witnesses(&clo, &chi, &cand, &balls) {
                best_lo = best_lo.max(cert.f(&cand, &w));
            }
            if upper > best_lo {
                heap.push(Cell { lo: clo, hi: chi, upper, cand, balls });
            }
        }
    };
    let hi = upper.max(best_lo);
    ErrorReport {
        value: 0.5 * (best_lo + hi),
        kind: ReportKind::Certified,
        lo: Some(best_lo),
        hi: Some(hi),
        stderr: None,
        seed: None,
        samples: Some(processed),
    }
}

/// `r(X, APP_∞) = ω(covering radius)`; certified endpoints map through `ω`.
pub fn wce_linf(info: &InformationMap, omega: &Modulus, mode: CoverMode) -> Result<ErrorReport> {
    Ok(covering_radius(info, mode)?.map_monotone(|h| omega.eval(h)))
}

/// `r(X, INT) = ∫_D ω(min_i ‖x − x_i‖) dx`, estimated as `vol(D)` times the mean over uniform samples.
pub fn wce_integration(info: &InformationMap, omega: &Modulus, budget: usize, seed: u64) -> Result<ErrorReport> {
    if info.is_empty() {
        return Err(Error::EmptyInformation);
    }
    if budget < 2 {
        return Err(Error::InvalidArgument("sample budget must be at least 2".into()));
    }
    let index = NearestIndex::new(info.nodes(), info.norm());
    let parts = map_sample_chunks(info.domain(), budget, seed, |pts| {
        let (mut s, mut s2) = (0.0, 0.0);
        for x in pts.iter() {
            let g = omega.eval(index.nearest(x).map_or(0.0, |(_, d)| d));
            s += g;
            s2 += g * g;
        }
        (s, s2)
    })?;
    let (sum, sum2) = parts.into_iter().fold((0.0, 0.0), |(a, b), (c, e)| (a + c, b + e));
    let n = budget as f64;
    let mean = sum / n;
    let var = ((sum2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let se_mean = (var / n).sqrt();
    let vol = volume(info.domain(), budget, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let (value, stderr) = match vol.method {
        VolumeMethod::Exact => (vol.value * mean, vol.value * se_mean),
        VolumeMethod::MonteCarlo => (
            vol.value * mean,
            ((vol.value * se_mean).powi(2) + (mean * vol.stderr).powi(2)).sqrt(),
        ),
    };
    Ok(ErrorReport {
        value,
        kind: ReportKind::MonteCarlo,
        lo: None,
        hi: None,
        stderr: Some(stderr),
        seed: Some(seed),
        samples: Some(budget),
    })
}

/// The central algorithm: midpoint of the tightest upper and lower envelopes
/// consistent with the data, `½[max_i(v_i − ω(‖x−x_i‖)) + min_i(v_i + ω(‖x−x_i‖))]`.
pub fn central_algorithm(info: &InformationMap, values: &[f64], omega: &Modulus, x: &[f64]) -> Result<f64> {
    if info.is_empty() {
        return Err(Error::EmptyInformation);
    }
    check_dim(info.len(), values.len())?;
    check_dim(info.domain().dim(), x.len())?;
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("data value {v} is not finite")));
    }
    if !info.domain().contains_unchecked(x) {
        return Err(Error::OutsideDomain);
    }
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, v) in info.nodes().iter().zip(values) {
        let w = omega.eval(info.norm().dist(x, p));
        lower = lower.max(v - w);
        upper = upper.min(v + w);
    }
    Ok(0.5 * (lower + upper))
}

/// Voronoi-weight quadrature with Monte-Carlo cell volumes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiQuadrature {
    pub value: f64,
    /// `ŵ_i`; they sum to `volume` exactly.
    pub weights: Vec<f64>,
    pub volume: f64,
    /// Sampling error of the estimate of `∫_D f̂` for the nearest-node interpolant `f̂`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `Σ_i ŵ_i v_i` with `ŵ_i = vol(D) · (fraction of uniform samples nearest to x_i)`;
/// ties go to the lowest node index.
pub fn voronoi_quadrature(info: &InformationMap, values: &[f64], budget: usize, seed: u64) -> Result<VoronoiQuadrature> {
    if info.is_empty() {
        return Err(Error::EmptyInformation);
    }
    check_dim(info.len(), values.len())?;
    if budget < 2 {
        return Err(Error::InvalidArgument("sample budget must be at least 2".into()));
    }
    let n_nodes = info.len();
    let index = NearestIndex::new(info.nodes(), info.norm());
    let parts = map_sample_chunks(info.domain(), budget, seed, |pts| {
        let mut counts = vec![0usize; n_nodes];
        for x in pts.iter() {
            if let Some((i, _)) = index.nearest(x) {
                counts[i] += 1;
            }
        }
        counts
    })?;
    let mut counts = vec![0usize; n_nodes];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    let vol = volume(info.domain(), budget, seed ^ 0x9e37_79b9_7f4a_7c15)?.value;
    let n = budget as f64;
    let weights: Vec<f64> = counts.iter().map(|&c| vol * c as f64 / n).collect();
    let value: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();
    let mean = value / vol;
    let second: f64 = counts.iter().zip(values).map(|(&c, v)| c as f64 / n * v * v).sum();
    let var = ((second - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(VoronoiQuadrature { value, weights, volume: vol, stderr: vol * (var / n).sqrt(), samples: budget, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::sample_uniform;
    use std::f64::consts::PI;

    fn grid2(m: usize) -> PointSet {
        let mut p = PointSet::new(2);
        for i in 0..m {
            for j in 0..m {
                p.push(&[(i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64]).unwrap();
            }
        }
        p
    }

    #[test]
    fn modulus_axioms() {
        Modulus::Identity.check_axioms(2.0, 10_000, 1).unwrap();
        Modulus::power(0.5).unwrap().check_axioms(2.0, 10_000, 1).unwrap();
        Modulus::custom("log", |h: f64| (1.0 + h).ln()).check_axioms(5.0, 10_000, 1).unwrap();
        assert!(Modulus::custom("square", |h: f64| h * h).check_axioms(2.0, 10_000, 1).is_err());
        assert!(Modulus::custom("offset", |h: f64| h + 1.0).check_axioms(2.0, 100, 1).is_err());
        assert!(Modulus::power(1.5).is_err());
    }

    #[test]
    fn information_map_rejects_outside_nodes() {
        let x = PointSet::from_points(2, &[[2.0, 0.5]]).unwrap();
        assert!(InformationMap::new(Domain::unit_cube(2), x, NormSpec::l2()).is_err());
    }

    #[test]
    fn grid_covering_radius_is_quarter() {
        let info = InformationMap::new(Domain::unit_cube(2), grid2(2), NormSpec::linf()).unwrap();
        let r = covering_radius(&info, CoverMode::certified(1e-9)).unwrap();
        assert!((r.lo.unwrap() - 0.25).abs() < 1e-12 && (r.hi.unwrap() - 0.25).abs() < 1e-9, "{r:?}");
        let h = wce_linf(&info, &Modulus::power(0.5).unwrap(), CoverMode::certified(1e-9)).unwrap();
        assert!((h.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn origin_in_unit_disk_has_radius_one() {
        let disk = Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::l2()).unwrap();
        let info = InformationMap::new(disk, PointSet::from_points(2, &[[0.0, 0.0]]).unwrap(), NormSpec::l2()).unwrap();
        let r = covering_radius(&info, CoverMode::certified(1e-9)).unwrap();
        assert!((r.lo.unwrap() - 1.0).abs() < 1e-9 && r.hi.unwrap() <= 1.0 + 1e-9, "{r:?}");
        let mc = covering_radius(&info, CoverMode::MonteCarlo { budget: 20_000, seed: 1 }).unwrap();
        assert!(mc.value <= 1.0 && mc.value > 0.98 && mc.hi.is_none());
    }

    #[test]
    fn certified_matches_brute_force_grid() {
        // Oracle: exhaustive maximum over a grid of step 1e-3.
        let nodes = PointSet::from_points(2, &[[0.2, 0.3], [0.7, 0.8], [0.9, 0.1]]).unwrap();
        let norm = NormSpec::l2();
        let m = 1000;
        let mut brute = 0.0f64;
        for i in 0..=m {
            for j in 0..=m {
                brute = brute.max(nodes.min_dist(&norm, &[i as f64 / m as f64, j as f64 / m as f64]));
            }
        }
        let info = InformationMap::new(Domain::unit_cube(2), nodes, norm).unwrap();
        let r = covering_radius(&info, CoverMode::certified(1e-7)).unwrap();
        assert!(r.width().unwrap() <= 1e-7);
        assert!((r.value - brute).abs() <= 2e-3, "{} vs {brute}", r.value);
        assert!(r.hi.unwrap() >= brute - 1e-12);
    }

    #[test]
    fn certified_rejects_masks_and_empty_sets() {
        let l = Domain::builtin_mask("l_shape", None).unwrap();
        let info = InformationMap::new(l.clone(), PointSet::from_points(2, &[[0.25, 0.25]]).unwrap(), NormSpec::l2()).unwrap();
        assert!(matches!(covering_radius(&info, CoverMode::certified(1e-3)), Err(Error::Unsupported(_))));
        assert!(covering_radius(&info, CoverMode::MonteCarlo { budget: 1000, seed: 0 }).is_ok());
        let empty = InformationMap::new(l, PointSet::new(2), NormSpec::l2()).unwrap();
        assert_eq!(covering_radius(&empty, CoverMode::certified(1e-3)), Err(Error::EmptyInformation));
        assert_eq!(wce_integration(&empty, &Modulus::Identity, 100, 0), Err(Error::EmptyInformation));
        assert_eq!(central_algorithm(&empty, &[], &Modulus::Identity, &[0.1, 0.1]), Err(Error::EmptyInformation));
    }

    #[test]
    fn integration_of_distance_over_disk() {
        let disk = Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::l2()).unwrap();
        let info = InformationMap::new(disk, PointSet::from_points(2, &[[0.0, 0.0]]).unwrap(), NormSpec::l2()).unwrap();
        let r = wce_integration(&info, &Modulus::Identity, 400_000, 3).unwrap();
        // ∫_disk |x| dx = 2π/3 in polar coordinates
        assert!((r.value - 2.0 * PI / 3.0).abs() <= 3.0 * r.stderr.unwrap(), "{r:?}");
    }

    #[test]
    fn extremal_function_is_admissible_and_vanishes_on_nodes() {
        let nodes = PointSet::from_points(2, &[[0.1, 0.2], [0.6, 0.9], [0.8, 0.3]]).unwrap();
        let norm = NormSpec::lp(3.0).unwrap();
        let omega = Modulus::power(0.7).unwrap();
        let g = |x: &[f64]| omega.eval(nodes.min_dist(&norm, x));
        for p in nodes.iter() {
            assert_eq!(g(p), 0.0);
        }
        let pts = sample_uniform(&Domain::unit_cube(2), 2000, 4).unwrap();
        for k in 0..1999 {
            let (x, y) = (pts.point(k), pts.point(k + 1));
            assert!((g(x) - g(y)).abs() <= omega.eval(norm.dist(x, y)) + 1e-12);
        }
    }

    #[test]
    fn central_algorithm_examples() {
        let nodes = grid2(3);
        let info = InformationMap::new(Domain::unit_cube(2), nodes, NormSpec::l2()).unwrap();
        let c = vec![2.5; 9];
        for x in [[0.0, 0.0], [0.3, 0.9], [1.0, 0.5]] {
            assert_eq!(central_algorithm(&info, &c, &Modulus::Identity, &x).unwrap(), 2.5);
        }
        let one = InformationMap::new(Domain::unit_cube(2), PointSet::from_points(2, &[[0.4, 0.4]]).unwrap(), NormSpec::l2()).unwrap();
        assert_eq!(central_algorithm(&one, &[-1.0], &Modulus::Identity, &[0.9, 0.1]).unwrap(), -1.0);
        assert_eq!(central_algorithm(&one, &[0.0], &Modulus::Identity, &[1.5, 0.1]), Err(Error::OutsideDomain));
    }

    #[test]
    fn central_algorithm_error_within_covering_radius() {
        let mut nodes = PointSet::new(2);
        for i in 0..5 {
            for j in 0..5 {
                nodes.push(&[(i as f64 + 0.5) / 5.0, (j as f64 + 0.5) / 5.0]).unwrap();
            }
        }
        let norm = NormSpec::l2();
        let info = InformationMap::new(Domain::unit_cube(2), nodes, norm.clone()).unwrap();
        let a = [0.37, 0.81];
        let f = |x: &[f64]| norm.dist(x, &a);
        let values = info.apply(f);
        let radius = covering_radius(&info, CoverMode::certified(1e-9)).unwrap().hi.unwrap();
        let pts = sample_uniform(&Domain::unit_cube(2), 20_000, 6).unwrap();
        let worst = pts
            .iter()
            .map(|x| (central_algorithm(&info, &values, &Modulus::Identity, x).unwrap() - f(x)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= radius + 1e-9, "{worst} > {radius}");
    }

    #[test]
    fn voronoi_quadrature_examples() {
        let info = InformationMap::new(Domain::unit_cube(2), grid2(4), NormSpec::l2()).unwrap();
        let ones = vec![1.0; 16];
        let q = voronoi_quadrature(&info, &ones, 100_000, 2).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
        assert!((q.weights.iter().sum::<f64>() - q.volume).abs() < 1e-12);
        let xs = info.apply(|x| x[0]);
        let q = voronoi_quadrature(&info, &xs, 200_000, 2).unwrap();
        assert!((q.value - 0.5).abs() <= 3.0 * q.stderr.max(1e-3), "{q:?}");
    }

    #[test]
    fn monotone_in_information() {
        let norm = NormSpec::l2();
        let mut nodes = PointSet::from_points(2, &[[0.3, 0.3]]).unwrap();
        let mut last_cov = f64::INFINITY;
        let mut last_int = (f64::INFINITY, 0.0);
        for extra in [[0.8, 0.7], [0.2, 0.9], [0.9, 0.1], [0.5, 0.5]] {
            nodes.push(&extra).unwrap();
            let info = InformationMap::new(Domain::unit_cube(2), nodes.clone(), norm.clone()).unwrap();
            let cov = covering_radius(&info, CoverMode::certified(1e-6)).unwrap();
            assert!(cov.lo.unwrap() <= last_cov + 1e-12);
            last_cov = cov.hi.unwrap();
            let int = wce_integration(&info, &Modulus::Identity, 100_000, 9).unwrap();
            let se = int.stderr.unwrap();
            assert!(int.value <= last_int.0 + 3.0 * (se + last_int.1));
            last_int = (int.value, se);
        }
    }

    #[test]
    fn scaling_law() {
        let norm = NormSpec::l2();
        let nodes = PointSet::from_points(2, &[[0.2, 0.3], [0.7, 0.8], [0.9, 0.1]]).unwrap();
        let base = InformationMap::new(Domain::unit_cube(2), nodes.clone(), norm.clone()).unwrap();
        let big = InformationMap::new(Domain::unit_cube(2).scaled(2.0).unwrap(), nodes.scaled(2.0), norm).unwrap();
        let r1 = covering_radius(&base, CoverMode::certified(1e-9)).unwrap();
        let r2 = covering_radius(&big, CoverMode::certified(2e-9)).unwrap();
        assert!((r2.value - 2.0 * r1.value).abs() < 3e-9);
        // identical sample streams in scaled coordinates make the MC ratio exact
        let i1 = wce_integration(&base, &Modulus::Identity, 50_000, 5).unwrap();
        let i2 = wce_integration(&big, &Modulus::Identity, 50_000, 5).unwrap();
        assert!((i2.value / i1.value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn report_json_shape() {
        let r = ErrorReport { value: 0.25, kind: ReportKind::Certified, lo: Some(0.25), hi: Some(0.25), stderr: None, seed: None, samples: Some(3) };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"value":0.25,"kind":"certified","lo":0.25,"hi":0.25,"stderr":null,"seed":null,"samples":3}"#);
        let back: ErrorReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
