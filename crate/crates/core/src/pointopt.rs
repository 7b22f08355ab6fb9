//! Node-set construction: greedy covering, Lloyd-type descent for the covering
//! and quantization objectives, exact reference configurations, and the
//! quadratic-spline fooling function for grid nodes in a box.
//!
//! Optimized node sets are heuristics. Their errors are upper bounds on the
//! optimal `e_n`, never `e_n` itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{probe_directions, sample_uniform, volume, Domain};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Exponent, NormSpec};
use crate::nearest::NearestIndex;
use crate::points::PointSet;
use crate::wce::Modulus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Covering radius, the L∞ worst-case error for `ω = id`.
    Covering,
    /// `∫_D ω(min_i ‖x − x_i‖) dx`, the integration worst-case error.
    Quantization,
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub iterations: usize,
    pub restarts: usize,
    /// Uniform samples per node and iteration.
    pub cell_budget: usize,
    /// Candidate pool for the greedy start (raised to `16 n` when smaller).
    pub pool: usize,
    pub seed: u64,
    pub objective: Objective,
    pub omega: Modulus,
    /// Use a codebook-splitting start for the first restart.
    pub splitting: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            iterations: 40,
            restarts: 8,
            cell_budget: 64,
            pool: 10_000,
            seed: 0,
            objective: Objective::Covering,
            omega: Modulus::Identity,
            splitting: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("iterations", self.iterations),
            ("restarts", self.restarts),
            ("cell_budget", self.cell_budget),
            ("pool", self.pool),
        ] {
            if v == 0 {
                return Err(Error::InvalidArgument(format!("optimizer {name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// SplitMix64 finalizer over `(seed, a, b)`: independent seeds per restart and iteration.
pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xd1b5_4a32_d192_ed03);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Farthest-point insertion over a sampled candidate pool.
///
/// The first node is the pool point of smallest sampled eccentricity (an
/// approximate Chebyshev center); each further node is the pool point farthest
/// from the nodes chosen so far. Relative to the pool, the result covers within
/// twice the optimal radius.
pub fn greedy_farthest_point(domain: &Domain, n: usize, norm: &NormSpec, pool: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    norm.check_dim(domain.dim())?;
    let size = pool.max(16 * n);
    let cands = sample_uniform(domain, size, seed)?;
    let probe = 256.min(size);
    let stride = size / probe;
    let first = (0..probe)
        .into_par_iter()
        .map(|k| {
            let c = cands.point(k * stride);
            (k * stride, cands.iter().map(|y| norm.dist(c, y)).fold(0.0, f64::max))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut out = PointSet::new(domain.dim());
    let mut mind = vec![f64::INFINITY; size];
    let mut next = first;
    for _ in 0..n {
        let x = cands.point(next).to_vec();
        out.push(&x)?;
        let mut far = (0, -1.0);
        for (j, m) in mind.iter_mut().enumerate() {
            *m = m.min(norm.dist(&x, cands.point(j)));
            if *m > far.1 {
                far = (j, *m);
            }
        }
        next = far.0;
    }
    Ok(out)
}

/// One row of the optimization trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Sampled objective of the iterate entering this step.
    pub objective: f64,
    /// Best objective seen so far; nonincreasing.
    pub best: f64,
    /// Nodes whose cells held no samples and were re-seeded.
    pub reseeded: usize,
}

struct Evaluation {
    value: f64,
    /// Sample indices per node.
    cells: Vec<Vec<usize>>,
}

fn evaluate(
    domain_volume: f64,
    nodes: &PointSet,
    samples: &PointSet,
    norm: &NormSpec,
    objective: Objective,
    omega: &Modulus,
) -> Evaluation {
    let index = NearestIndex::new(nodes, norm);
    let near: Vec<(usize, f64)> = (0..samples.len())
        .into_par_iter()
        .map(|k| index.nearest(samples.point(k)).unwrap_or((0, f64::INFINITY)))
        .collect();
    let mut cells = vec![Vec::new(); nodes.len()];
    for (k, &(i, _)) in near.iter().enumerate() {
        cells[i].push(k);
    }
    let value = match objective {
        Objective::Covering => near.iter().map(|p| p.1).fold(0.0, f64::max),
        Objective::Quantization => {
            domain_volume * near.iter().map(|p| omega.eval(p.1)).sum::<f64>() / near.len() as f64
        }
    };
    Evaluation { value, cells }
}

/// Pattern search on a convex-ish cost from `start`, halving the step on failure.
fn compass_search(start: Vec<f64>, step: f64, dirs: &[Vec<f64>], cost: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut x = start;
    let mut fx = cost(&x);
    let mut step = step;
    let floor = step * 1e-4;
    let mut y = x.clone();
    while step > floor {
        let mut moved = false;
        for u in dirs {
            for i in 0..x.len() {
                y[i] = x[i] + step * u[i];
            }
            let fy = cost(&y);
            if fy < fx {
                std::mem::swap(&mut x, &mut y);
                fx = fy;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    x
}

fn bbox_of(cell: &[&[f64]]) -> (Vec<f64>, Vec<f64>) {
    let d = cell[0].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in cell {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

/// New position for one node given the samples of its cell.
fn update_node(
    node: &[f64],
    cell: &[&[f64]],
    norm: &NormSpec,
    objective: Objective,
    omega: &Modulus,
    dirs: &[Vec<f64>],
) -> Vec<f64> {
    let (lo, hi) = bbox_of(cell);
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let width = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max).max(1e-12);
    match objective {
        Objective::Covering => {
            // ℓ∞ (weighted too): the box midpoint is an exact 1-center of the samples.
            if norm.exponent().is_infinite() {
                return mid;
            }
            let cost = |y: &[f64]| cell.iter().map(|s| norm.dist(y, s)).fold(0.0, f64::max);
            let start = if cost(&mid) <= cost(node) { mid } else { node.to_vec() };
            compass_search(start, 0.25 * width, dirs, cost)
        }
        Objective::Quantization => {
            let d = node.len();
            let mut centroid = vec![0.0; d];
            for s in cell {
                for i in 0..d {
                    centroid[i] += s[i] / cell.len() as f64;
                }
            }
            let plain_l2 = norm.exponent() == Exponent::Finite(2.0) && !norm.is_weighted();
            if plain_l2 && matches!(omega, Modulus::Identity) {
                weiszfeld(centroid, cell)
            } else {
                let cost = |y: &[f64]| cell.iter().map(|s| omega.eval(norm.dist(y, s))).sum::<f64>();
                compass_search(centroid, 0.25 * width, dirs, cost)
            }
        }
    }
}

/// Geometric median by iteratively reweighted averaging.
fn weiszfeld(start: Vec<f64>, cell: &[&[f64]]) -> Vec<f64> {
    let d = start.len();
    let mut y = start;
    for _ in 0..50 {
        let mut num = vec![0.0; d];
        let mut den = 0.0;
        for s in cell {
            let r = s.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt().max(1e-12);
            for i in 0..d {
                num[i] += s[i] / r;
            }
            den += 1.0 / r;
        }
        let next: Vec<f64> = num.iter().map(|v| v / den).collect();
        let shift: f64 = next.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        y = next;
        if shift < 1e-12 {
            break;
        }
    }
    y
}

/// Lloyd-type descent from `x0`. Returns the best iterate by the sampled
/// objective and the per-iteration trace.
///
/// Each iteration classifies fresh uniform samples to their nearest node and
/// moves every node to the optimum of its cell: the 1-center for the covering
/// objective, the `ω`-weighted median for quantization. A node landing outside
/// `D` snaps to the nearest sample of its cell; a node with an empty cell is
/// re-seeded at a uniform sample.
pub fn lloyd_descent(domain: &Domain, x0: &PointSet, norm: &NormSpec, cfg: &OptimizerConfig) -> Result<(PointSet, Vec<TraceEntry>)> {
    cfg.validate()?;
    if x0.is_empty() {
        return Err(Error::EmptyInformation);
    }
    crate::error::check_dim(domain.dim(), x0.dim())?;
    norm.check_dim(domain.dim())?;
    for (i, p) in x0.iter().enumerate() {
        if !domain.contains_unchecked(p) {
            return Err(Error::InvalidArgument(format!("initial node {i} lies outside the domain")));
        }
    }
    let vol = volume(domain, 100_000, derive_seed(cfg.seed, u64::MAX, 0))?.value;
    let dirs = probe_directions(domain.dim());
    let n = x0.len();
    let mut nodes = x0.clone();
    let mut best = (f64::INFINITY, nodes.clone());
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    for it in 0..=cfg.iterations {
        let seed = derive_seed(cfg.seed, 1, it as u64);
        let samples = sample_uniform(domain, n * cfg.cell_budget, seed)?;
        let eval = evaluate(vol, &nodes, &samples, norm, cfg.objective, &cfg.omega);
        if eval.value < best.0 {
            best = (eval.value, nodes.clone());
        }
        let mut entry = TraceEntry { iteration: it, objective: eval.value, best: best.0, reseeded: 0 };
        if it == cfg.iterations {
            trace.push(entry);
            break;
        }
        let moved: Vec<Option<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let cell: Vec<&[f64]> = eval.cells[i].iter().map(|&k| samples.point(k)).collect();
                if cell.is_empty() {
                    return None;
                }
                let y = update_node(nodes.point(i), &cell, norm, cfg.objective, &cfg.omega, &dirs);
                if domain.contains_unchecked(&y) {
                    Some(y)
                } else {
                    cell.iter()
                        .min_by(|a, b| norm.dist(&y, a).total_cmp(&norm.dist(&y, b)))
                        .map(|s| s.to_vec())
                }
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2, it as u64));
        for (i, y) in moved.into_iter().enumerate() {
            let y = y.unwrap_or_else(|| {
                entry.reseeded += 1;
                samples.point(rng.gen_range(0..samples.len())).to_vec()
            });
            nodes.point_mut(i).copy_from_slice(&y);
        }
        trace.push(entry);
    }
    Ok((best.1, trace))
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeResult {
    pub points: PointSet,
    /// Sampled objective of `points` on the common evaluation sample.
    pub objective: f64,
    pub restart: usize,
    pub trace: Vec<TraceEntry>,
}

/// Codebook splitting: optimize `⌊n / 2^d⌋` nodes, replace each by `2^d`
/// children offset by `±r/2` per axis (`r` the sampled covering radius of the
/// coarse set), and add any remaining nodes by farthest-point insertion.
pub fn splitting_start(domain: &Domain, n: usize, norm: &NormSpec, cfg: &OptimizerConfig) -> Result<PointSet> {
    let d = domain.dim();
    let fan = 1usize.checked_shl(d as u32).filter(|f| d <= 16 && *f <= n);
    let Some(fan) = fan else {
        return greedy_farthest_point(domain, n, norm, cfg.pool, derive_seed(cfg.seed, 6, n as u64));
    };
    let coarse_cfg = OptimizerConfig { seed: derive_seed(cfg.seed, 7, n as u64), ..cfg.clone() };
    let coarse_start = splitting_start(domain, n / fan, norm, &coarse_cfg)?;
    let (coarse, trace) = lloyd_descent(domain, &coarse_start, norm, &coarse_cfg)?;
    let r = trace.iter().map(|t| t.objective).fold(f64::INFINITY, f64::min);
    let r = match cfg.objective {
        Objective::Covering => r,
        Objective::Quantization => {
            let vol = volume(domain, 100_000, derive_seed(cfg.seed, u64::MAX, 0))?.value;
            let samples = sample_uniform(domain, coarse.len() * cfg.cell_budget, derive_seed(cfg.seed, 8, n as u64))?;
            evaluate(vol, &coarse, &samples, norm, Objective::Covering, &cfg.omega).value
        }
    };
    let pool = sample_uniform(domain, cfg.pool.max(16 * n), derive_seed(cfg.seed, 9, n as u64))?;
    let mut out = PointSet::new(d);
    let mut child = vec![0.0; d];
    for p in coarse.iter() {
        for bits in 0..fan {
            for i in 0..d {
                let step = 0.5 * r / norm.weights().map_or(1.0, |w| w[i]);
                child[i] = p[i] + if bits >> i & 1 == 1 { step } else { -step };
            }
            if domain.contains_unchecked(&child) {
                out.push(&child)?;
            } else if let Some((k, _)) = pool.nearest(norm, &child) {
                out.push(pool.point(k))?;
            }
        }
    }
    let mut mind: Vec<f64> = pool.iter().map(|y| out.min_dist(norm, y)).collect();
    while out.len() < n {
        let (j, _) = mind.iter().enumerate().fold((0, -1.0), |b, (j, m)| if *m > b.1 { (j, *m) } else { b });
        let x = pool.point(j).to_vec();
        for (k, m) in mind.iter_mut().enumerate() {
            *m = m.min(norm.dist(&x, pool.point(k)));
        }
        out.push(&x)?;
    }
    Ok(out)
}

/// Lloyd descent from independent starts (a splitting start for restart 0 when
/// enabled, greedy starts otherwise); the best result on a common evaluation
/// sample wins.
pub fn optimize(domain: &Domain, n: usize, norm: &NormSpec, cfg: &OptimizerConfig) -> Result<OptimizeResult> {
    cfg.validate()?;
    let runs: Vec<Result<(PointSet, Vec<TraceEntry>)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 && cfg.splitting {
                splitting_start(domain, n, norm, cfg)?
            } else {
                greedy_farthest_point(domain, n, norm, cfg.pool, derive_seed(cfg.seed, 3, r as u64))?
            };
            let sub = OptimizerConfig { seed: derive_seed(cfg.seed, 4, r as u64), ..cfg.clone() };
            lloyd_descent(domain, &start, norm, &sub)
        })
        .collect();
    let vol = volume(domain, 100_000, derive_seed(cfg.seed, u64::MAX, 0))?.value;
    let common = sample_uniform(domain, (n * cfg.cell_budget * 4).max(20_000), derive_seed(cfg.seed, 5, 0))?;
    let mut best: Option<OptimizeResult> = None;
    for (r, run) in runs.into_iter().enumerate() {
        let (points, trace) = run?;
        let objective = evaluate(vol, &points, &common, norm, cfg.objective, &cfg.omega).value;
        if best.as_ref().map_or(true, |b| objective < b.objective) {
            best = Some(OptimizeResult { points, objective, restart: r, trace });
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no restarts ran".into()))
}

/// The `m^d` cell-center grid of a box. Its ℓ∞ covering radius is `max_i side_i / (2m)`.
pub fn make_grid_points(domain: &Domain, m: usize) -> Result<PointSet> {
    let Domain::Box(b) = domain else {
        return Err(Error::InvalidDomain(format!("grid points need a box, got {}", domain.kind_name())));
    };
    if m == 0 {
        return Err(Error::InvalidArgument("grid needs m >= 1".into()));
    }
    let d = b.lo().len();
    let total = m.checked_pow(d as u32).filter(|t| *t <= 50_000_000).ok_or_else(|| {
        Error::InvalidArgument(format!("grid {m}^{d} is too large"))
    })?;
    let mut out = PointSet::new(d);
    let mut p = vec![0.0; d];
    for k in 0..total {
        let mut r = k;
        for i in (0..d).rev() {
            p[i] = b.lo()[i] + (r % m) as f64 * b.side(i) / m as f64 + 0.5 * b.side(i) / m as f64;
            r /= m;
        }
        out.push(&p)?;
    }
    Ok(out)
}

/// `n` disjoint balls of radius `δ` centred at `(k·spacing, 0, …, 0)`, with the
/// centers as nodes. Covering radius `δ`, integration error `(d/(d+1)) δ vol(D)`.
pub fn make_extremal_ball_union(n: usize, delta: f64, d: usize, norm: &NormSpec, spacing: f64) -> Result<(Domain, PointSet)> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and d >= 1".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {delta}")));
    }
    norm.check_dim(d)?;
    // balls along the first axis are disjoint iff the gap in the norm of e_1 exceeds 2δ
    let mut e1 = vec![0.0; d];
    e1[0] = spacing;
    if !(norm.norm(&e1) > 2.0 * delta) {
        return Err(Error::InvalidDomain(format!("spacing {spacing} does not separate balls of radius {delta}")));
    }
    let mut centers = PointSet::new(d);
    for k in 0..n {
        let mut c = vec![0.0; d];
        c[0] = k as f64 * spacing;
        centers.push(&c)?;
    }
    let domain = Domain::ball_union(centers.clone(), vec![delta; n], norm.clone(), true)?;
    Ok((domain, centers))
}

/// Exact integration error of the extremal ball union: `(d/(d+1)) δ · n δ^d λ(B)`.
pub fn extremal_integration_error(n: usize, delta: f64, d: usize, norm: &NormSpec) -> Result<f64> {
    let vol = n as f64 * delta.powi(d as i32) * unit_ball_volume(d, norm)?;
    Ok(d as f64 / (d as f64 + 1.0) * delta * vol)
}

/// Periodic C¹ quadratic spline with period `h`, vanishing at the cell centers
/// `lo + (k + ½)h`: `a u²` within `h/4` of a node, `a(h²/8 − (u − h/2)²)` around
/// the midpoints, `a = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spline1 {
    pub h: f64,
    pub lo: f64,
}

impl Spline1 {
    pub const AMPLITUDE: f64 = 0.5;

    pub fn eval(&self, x: f64) -> f64 {
        let h = self.h;
        let t = (x - self.lo) / h - 0.5;
        let frac = (t - t.round()).abs();
        // node coordinates reach here through rounding; they are zeros of the spline
        if frac <= 8.0 * f64::EPSILON * t.abs().max(1.0) {
            return 0.0;
        }
        let u = frac * h;
        let a = Self::AMPLITUDE;
        if u <= 0.25 * h {
            a * u * u
        } else {
            a * (h * h / 8.0 - (u - 0.5 * h).powi(2))
        }
    }

    /// Mean value over one period, `a h²/16`.
    pub fn mean(&self) -> f64 {
        Self::AMPLITUDE * self.h * self.h / 16.0
    }

    /// `sup |f'| = a h / 2`.
    pub fn lipschitz(&self) -> f64 {
        Self::AMPLITUDE * self.h / 2.0
    }

    /// `sup |f''| = 2a`.
    pub fn curvature(&self) -> f64 {
        2.0 * Self::AMPLITUDE
    }
}

/// `f_d(x) = (1/d) Σ_i f_1^{(i)}(x_i)`, a nonnegative function vanishing on the
/// `m^d` grid of a box with integral of order `m^{-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoolingFunction {
    pub m: usize,
    pub splines: Vec<Spline1>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoolingCertificate {
    /// `max |f_d|` over the grid nodes; exactly zero.
    pub max_at_nodes: f64,
    /// Closed-form `∫_box f_d`.
    pub integral: f64,
    /// `∫ f_d · m²`: the constant `c` in `∫ f_d = c m^{-2}` (in box units).
    pub constant: f64,
    /// Finite-difference estimate of `Lip_2(f_d)` on a fine 1-D grid per axis.
    pub lipschitz: f64,
    pub lipschitz_bound: f64,
    /// Finite-difference estimate of the largest second directional derivative.
    pub curvature: f64,
    pub curvature_bound: f64,
    pub ok: bool,
}

impl FoolingFunction {
    pub fn dim(&self) -> usize {
        self.splines.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.splines.iter().zip(x).map(|(s, xi)| s.eval(*xi)).sum::<f64>() / self.dim() as f64
    }

    pub fn integral(&self) -> f64 {
        let vol: f64 = self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product();
        vol * self.splines.iter().map(Spline1::mean).sum::<f64>() / self.dim() as f64
    }

    /// Checks the construction numerically: zeros at the nodes and the
    /// derivative bounds `Lip(f_d) ≤ d^{-1/2}`, `Lip(D^θ f_d) ≤ d^{-1}`.
    pub fn certificate(&self, nodes: &PointSet) -> FoolingCertificate {
        let d = self.dim() as f64;
        let max_at_nodes = nodes.iter().map(|p| self.eval(p).abs()).fold(0.0, f64::max);
        let mut slopes = Vec::new();
        let mut curv: f64 = 0.0;
        for (i, s) in self.splines.iter().enumerate() {
            let steps = 20_000 * self.m;
            let dx = (self.hi[i] - self.lo[i]) / steps as f64;
            let f: Vec<f64> = (0..=steps).map(|k| s.eval(self.lo[i] + k as f64 * dx)).collect();
            let slope = f.windows(2).map(|w| (w[1] - w[0]).abs() / dx).fold(0.0, f64::max);
            let second = f.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]).abs() / (dx * dx)).fold(0.0, f64::max);
            slopes.push(slope / d);
            curv = curv.max(second / d);
        }
        let lipschitz = slopes.iter().map(|s| s * s).sum::<f64>().sqrt();
        let lipschitz_bound = d.powf(-0.5);
        let curvature_bound = 1.0 / d;
        let integral = self.integral();
        let ok = max_at_nodes == 0.0 && lipschitz <= lipschitz_bound * (1.0 + 1e-9) && curv <= curvature_bound * (1.0 + 1e-6);
        FoolingCertificate {
            max_at_nodes,
            integral,
            constant: integral * (self.m * self.m) as f64,
            lipschitz,
            lipschitz_bound,
            curvature: curv,
            curvature_bound,
            ok,
        }
    }
}

/// The quadratic-spline fooling function for the `m^d` grid of a box, with its certificate.
pub fn fooling_function(domain: &Domain, m: usize) -> Result<(FoolingFunction, FoolingCertificate)> {
    let nodes = make_grid_points(domain, m)?;
    let Domain::Box(b) = domain else { unreachable!("make_grid_points accepts only boxes") };
    let splines = (0..b.lo().len())
        .map(|i| {
            let h = b.side(i) / m as f64;
            Spline1 { h, lo: b.lo()[i] }
        })
        .collect();
    let f = FoolingFunction { m, splines, lo: b.lo().to_vec(), hi: b.hi().to_vec() };
    let cert = f.certificate(&nodes);
    Ok((f, cert))
}
