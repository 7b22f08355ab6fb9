//! Bounded domains `D ⊂ ℝ^d`: membership, volume, uniform sampling, and the
//! boundary shrink `D^ε = {x ∈ D : dist(x, ∂D) > ε}`.
//!
//! Jordan measurability cannot be decided from a membership oracle. It is a
//! property the caller asserts when picking a domain; [`boundary_shell_volume`]
//! is the diagnostic for it (the shell volume should go to zero with ε).
//!
//! Which hypothesis each result needs:
//!
//! | result | hypothesis on `D` |
//! |---|---|
//! | covering / L∞ asymptotics | bounded, Jordan measurable, interior point |
//! | integration asymptotics | bounded, Jordan measurable, `0 < vol < ∞` |
//! | uniform lower bounds | any bounded set of positive volume |
//! | spectral shape independence | bounded open set (Lipschitz boundary for Neumann) |

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{unit_ball_volume, NormSpec};
use crate::points::PointSet;

/// Points per sampling chunk; each chunk draws from its own stream of `(seed, chunk)`.
pub const SAMPLE_CHUNK: usize = 4096;

/// Draws per chunk after which a zero-ish acceptance rate is declared a thin domain.
const THIN_PROBE: usize = 1_000_000;
const THIN_RATE: f64 = 1e-6;

pub type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn side(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn volume(&self) -> f64 {
        (0..self.lo.len()).map(|i| self.side(i)).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallUnion {
    centers: PointSet,
    radii: Vec<f64>,
    norm: NormSpec,
    disjoint: bool,
}

impl BallUnion {
    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjoint
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Axis-aligned bounding box of ball `j`.
    pub fn ball_bbox(&self, j: usize) -> (Vec<f64>, Vec<f64>) {
        let c = self.centers.point(j);
        let r = self.radii[j];
        let d = c.len();
        let ext: Vec<f64> = (0..d).map(|i| r / self.norm.weights().map_or(1.0, |w| w[i])).collect();
        (
            (0..d).map(|i| c[i] - ext[i]).collect(),
            (0..d).map(|i| c[i] + ext[i]).collect(),
        )
    }

    pub fn in_ball(&self, j: usize, x: &[f64]) -> bool {
        self.norm.dist(x, self.centers.point(j)) <= self.radii[j]
    }
}

/// A domain given by a membership predicate inside a bounding box.
#[derive(Clone)]
pub struct Mask {
    name: String,
    predicate: Predicate,
    lo: Vec<f64>,
    hi: Vec<f64>,
    exact_volume: Option<f64>,
    /// Builtin name and target box, when the mask came from the named corpus.
    builtin: Option<(String, Vec<f64>, Vec<f64>)>,
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mask")
            .field("name", &self.name)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("exact_volume", &self.exact_volume)
            .finish()
    }
}

impl PartialEq for Mask {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.predicate, &other.predicate) && self.lo == other.lo && self.hi == other.hi
    }
}

impl Mask {
    pub fn new(
        name: impl Into<String>,
        lo: Vec<f64>,
        hi: Vec<f64>,
        exact_volume: Option<f64>,
        predicate: Predicate,
    ) -> Result<Self> {
        validate_box(&lo, &hi)?;
        if let Some(v) = exact_volume {
            if !(v > 0.0) {
                return Err(Error::InvalidDomain(format!("mask volume must be positive, got {v}")));
            }
        }
        Ok(Self { name: name.into(), predicate, lo, hi, exact_volume, builtin: None })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact_volume(&self) -> Option<f64> {
        self.exact_volume
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        in_box(x, &self.lo, &self.hi) && (self.predicate)(x)
    }
}

/// Reference shapes of the builtin mask corpus: name, reference box, reference volume.
fn builtin_reference(name: &str) -> Option<(Vec<f64>, Vec<f64>, f64, fn(&[f64]) -> bool)> {
    use std::f64::consts::PI;
    match name {
        // [0,1]² without the open upper-right quarter [0.5,1]².
        "l_shape" => Some((vec![0.0, 0.0], vec![1.0, 1.0], 0.75, |x| !(x[0] > 0.5 && x[1] > 0.5))),
        "annulus" => Some((vec![-1.0, -1.0], vec![1.0, 1.0], 0.75 * PI, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            (0.25..=1.0).contains(&r2)
        })),
        "disk" => Some((vec![-1.0, -1.0], vec![1.0, 1.0], PI, |x| x[0] * x[0] + x[1] * x[1] <= 1.0)),
        // Unit square with a vertical slit from the bottom edge to the center.
        "slit_square" => Some((vec![0.0, 0.0], vec![1.0, 1.0], 1.0, |x| {
            !((x[0] - 0.5).abs() < 1e-9 && x[1] < 0.5)
        })),
        _ => None,
    }
}

pub const BUILTIN_MASKS: &[&str] = &["l_shape", "annulus", "disk", "slit_square"];

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Box(BoxDomain),
    BallUnion(BallUnion),
    Mask(Mask),
}

fn validate_box(lo: &[f64], hi: &[f64]) -> Result<()> {
    check_dim(lo.len(), hi.len())?;
    if lo.is_empty() {
        return Err(Error::InvalidDomain("dimension must be >= 1".into()));
    }
    for (l, h) in lo.iter().zip(hi) {
        if !(l.is_finite() && h.is_finite() && l < h) {
            return Err(Error::InvalidDomain(format!("degenerate box side [{l}, {h}]")));
        }
    }
    Ok(())
}

#[inline]
fn in_box(x: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    x.iter().zip(lo.iter().zip(hi)).all(|(t, (l, h))| *l <= *t && *t <= *h)
}

impl Domain {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        validate_box(&lo, &hi)?;
        Ok(Domain::Box(BoxDomain { lo, hi }))
    }

    pub fn unit_cube(d: usize) -> Self {
        Domain::Box(BoxDomain { lo: vec![0.0; d], hi: vec![1.0; d] })
    }

    /// A union of closed `norm`-balls. With `disjoint` set, the pairwise separation is checked.
    pub fn ball_union(centers: PointSet, radii: Vec<f64>, norm: NormSpec, disjoint: bool) -> Result<Self> {
        let d = centers.dim();
        norm.check_dim(d)?;
        check_dim(centers.len(), radii.len())?;
        if radii.is_empty() {
            return Err(Error::InvalidDomain("ball union needs at least one ball".into()));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidDomain(format!("radii must be positive, got {r}")));
        }
        if disjoint {
            for i in 0..radii.len() {
                for j in i + 1..radii.len() {
                    let sep = norm.dist(centers.point(i), centers.point(j));
                    if sep <= radii[i] + radii[j] {
                        return Err(Error::InvalidDomain(format!(
                            "balls {i} and {j} overlap: center distance {sep} <= {}",
                            radii[i] + radii[j]
                        )));
                    }
                }
            }
        }
        Ok(Domain::BallUnion(BallUnion { centers, radii, norm, disjoint }))
    }

    pub fn ball(center: Vec<f64>, radius: f64, norm: NormSpec) -> Result<Self> {
        let d = center.len();
        Self::ball_union(PointSet::from_flat(d, center)?, vec![radius], norm, true)
    }

    /// A builtin mask mapped affinely onto `[lo, hi]` (the reference box when `None`).
    pub fn builtin_mask(name: &str, bbox: Option<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let (rlo, rhi, rvol, pred) = builtin_reference(name).ok_or_else(|| {
            Error::InvalidDomain(format!("unknown builtin mask {name:?}; known: {BUILTIN_MASKS:?}"))
        })?;
        let (lo, hi) = bbox.unwrap_or_else(|| (rlo.clone(), rhi.clone()));
        validate_box(&lo, &hi)?;
        check_dim(rlo.len(), lo.len())?;
        let scale: Vec<f64> = (0..lo.len()).map(|i| (rhi[i] - rlo[i]) / (hi[i] - lo[i])).collect();
        let volume = rvol / scale.iter().product::<f64>();
        let (plo, prlo) = (lo.clone(), rlo.clone());
        let predicate: Predicate = Arc::new(move |x: &[f64]| {
            let mut r = [0.0f64; 2];
            for i in 0..2 {
                r[i] = prlo[i] + (x[i] - plo[i]) * scale[i];
            }
            pred(&r)
        });
        let mut mask = Mask::new(name, lo.clone(), hi.clone(), Some(volume), predicate)?;
        mask.builtin = Some((name.to_string(), lo, hi));
        Ok(Domain::Mask(mask))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box(b) => b.lo.len(),
            Domain::BallUnion(u) => u.centers.dim(),
            Domain::Mask(m) => m.lo.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Domain::Box(_) => "box",
            Domain::BallUnion(_) => "ball_union",
            Domain::Mask(_) => "mask",
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box(b) => (b.lo.clone(), b.hi.clone()),
            Domain::BallUnion(u) => {
                let d = u.centers.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for j in 0..u.len() {
                    let (l, h) = u.ball_bbox(j);
                    for i in 0..d {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                (lo, hi)
            }
            Domain::Mask(m) => (m.lo.clone(), m.hi.clone()),
        }
    }

    /// Membership without a dimension check.
    #[inline]
    pub fn contains_unchecked(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box(b) => in_box(x, &b.lo, &b.hi),
            Domain::BallUnion(u) => (0..u.len()).any(|j| u.in_ball(j, x)),
            Domain::Mask(m) => m.contains(x),
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_unchecked(x))
    }

    /// Closed-form volume when one exists.
    pub fn exact_volume(&self) -> Option<f64> {
        match self {
            Domain::Box(b) => Some(b.volume()),
            Domain::BallUnion(u) if u.disjoint || u.len() == 1 => {
                let d = u.centers.dim();
                let unit = unit_ball_volume(d, &u.norm).ok()?;
                Some(u.radii.iter().map(|r| r.powi(d as i32) * unit).sum())
            }
            Domain::BallUnion(_) => None,
            Domain::Mask(m) => m.exact_volume,
        }
    }

    /// `D^ε`. Exact for boxes and ball unions (an under-approximation when balls
    /// overlap); for masks, the superlevel set `{δ > ε}` of a ray-marched boundary
    /// distance `δ` probed along a fixed Euclidean direction set.
    pub fn shrink(&self, eps: f64) -> Result<Domain> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("shrink needs eps > 0, got {eps}")));
        }
        match self {
            Domain::Box(b) => {
                let lo: Vec<f64> = b.lo.iter().map(|l| l + eps).collect();
                let hi: Vec<f64> = b.hi.iter().map(|h| h - eps).collect();
                if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
                    return Err(Error::EmptyDomain(eps));
                }
                Ok(Domain::Box(BoxDomain { lo, hi }))
            }
            Domain::BallUnion(u) => {
                let d = u.centers.dim();
                let mut centers = PointSet::new(d);
                let mut radii = Vec::new();
                for j in 0..u.len() {
                    if u.radii[j] > eps {
                        centers.push(u.centers.point(j))?;
                        radii.push(u.radii[j] - eps);
                    }
                }
                if radii.is_empty() {
                    return Err(Error::EmptyDomain(eps));
                }
                Ok(Domain::BallUnion(BallUnion { centers, radii, norm: u.norm.clone(), disjoint: u.disjoint }))
            }
            Domain::Mask(m) => {
                let lo: Vec<f64> = m.lo.iter().map(|l| l + eps).collect();
                let hi: Vec<f64> = m.hi.iter().map(|h| h - eps).collect();
                if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
                    return Err(Error::EmptyDomain(eps));
                }
                let parent = Domain::Mask(m.clone());
                let probe = BoundaryProbe::new(m);
                let predicate: Predicate = Arc::new(move |x: &[f64]| probe.clears(&parent, x, eps));
                let name = format!("shrink({}, {eps})", m.name);
                Ok(Domain::Mask(Mask::new(name, lo, hi, None, predicate)?))
            }
        }
    }

    /// Returns a copy scaled about the origin by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Domain> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {s}")));
        }
        match self {
            Domain::Box(b) => Domain::new_box(
                b.lo.iter().map(|t| t * s).collect(),
                b.hi.iter().map(|t| t * s).collect(),
            ),
            Domain::BallUnion(u) => Domain::ball_union(
                u.centers.scaled(s),
                u.radii.iter().map(|r| r * s).collect(),
                u.norm.clone(),
                u.disjoint,
            ),
            Domain::Mask(m) => {
                let inner = m.predicate.clone();
                let predicate: Predicate = Arc::new(move |x: &[f64]| {
                    let y: Vec<f64> = x.iter().map(|t| t / s).collect();
                    inner(&y)
                });
                let d = m.lo.len();
                Ok(Domain::Mask(Mask::new(
                    format!("{}*{s}", m.name),
                    m.lo.iter().map(|t| t * s).collect(),
                    m.hi.iter().map(|t| t * s).collect(),
                    m.exact_volume.map(|v| v * s.powi(d as i32)),
                    predicate,
                )?))
            }
        }
    }

    /// Volume of the bounding box.
    pub fn bbox_volume(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(l, h)| h - l).product()
    }
}

/// Ray-marched boundary distance for mask shrinking.
///
/// `δ(x)` is the smallest first-exit distance over the probe directions, found
/// by marching with a fixed step and bisecting the first failing step. Since
/// `D^ε = {δ > ε}` uses one fixed function, shrinks are nested in ε.
struct BoundaryProbe {
    directions: Vec<Vec<f64>>,
    step: f64,
}

/// Probe directions: the 2d axis directions, then the 2^d diagonal sign patterns, at most 64 in all.
pub fn probe_directions(d: usize) -> Vec<Vec<f64>> {
    const CAP: usize = 64;
    let mut dirs = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[i] = s;
            dirs.push(v);
        }
    }
    if d >= 2 {
        let inv = 1.0 / (d as f64).sqrt();
        let patterns = 1usize.checked_shl(d as u32).unwrap_or(usize::MAX);
        for bits in 0..patterns {
            if dirs.len() >= CAP {
                break;
            }
            dirs.push((0..d).map(|i| if bits >> i & 1 == 1 { -inv } else { inv }).collect());
        }
    }
    dirs.truncate(CAP);
    dirs
}

impl BoundaryProbe {
    const BISECTIONS: usize = 40;

    fn new(m: &Mask) -> Self {
        let diam = m.lo.iter().zip(&m.hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt();
        Self { directions: probe_directions(m.lo.len()), step: diam / 256.0 }
    }

    fn clears(&self, domain: &Domain, x: &[f64], eps: f64) -> bool {
        if !domain.contains_unchecked(x) {
            return false;
        }
        let mut y = vec![0.0; x.len()];
        let at = |u: &[f64], t: f64, y: &mut Vec<f64>| {
            for i in 0..x.len() {
                y[i] = x[i] + t * u[i];
            }
            domain.contains_unchecked(y)
        };
        for u in &self.directions {
            let mut k = 1usize;
            loop {
                let t = k as f64 * self.step;
                let prev = t - self.step;
                if prev > eps {
                    break;
                }
                if !at(u, t, &mut y) {
                    let (mut a, mut b) = (prev, t);
                    for _ in 0..Self::BISECTIONS {
                        let mid = 0.5 * (a + b);
                        if at(u, mid, &mut y) {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    }
                    if b <= eps {
                        return false;
                    }
                    break;
                }
                k += 1;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub method: VolumeMethod,
    pub samples: usize,
    pub stderr: f64,
    pub seed: Option<u64>,
}

impl VolumeEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, method: VolumeMethod::Exact, samples: 0, stderr: 0.0, seed: None }
    }
}

/// `λ^d(D)`: closed form when available, otherwise hit-or-miss Monte Carlo over the bounding box.
pub fn volume(domain: &Domain, budget: usize, seed: u64) -> Result<VolumeEstimate> {
    match domain.exact_volume() {
        Some(v) => Ok(VolumeEstimate::exact(v)),
        None => volume_monte_carlo(domain, budget, seed),
    }
}

/// Hit-or-miss estimate from `budget` uniform bounding-box draws, even when a closed form exists.
pub fn volume_monte_carlo(domain: &Domain, budget: usize, seed: u64) -> Result<VolumeEstimate> {
    if budget == 0 {
        return Err(Error::InvalidArgument("Monte-Carlo volume needs a positive sample budget".into()));
    }
    let (lo, hi) = domain.bounding_box();
    let bbox_vol = domain.bbox_volume();
    let d = lo.len();
    let chunks = budget.div_ceil(SAMPLE_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = SAMPLE_CHUNK.min(budget - c * SAMPLE_CHUNK);
            let mut rng = chunk_rng(seed, c as u64);
            let mut x = vec![0.0; d];
            (0..n)
                .filter(|_| {
                    for i in 0..d {
                        x[i] = rng.gen_range(lo[i]..hi[i]);
                    }
                    domain.contains_unchecked(&x)
                })
                .count()
        })
        .sum();
    let frac = hits as f64 / budget as f64;
    Ok(VolumeEstimate {
        value: bbox_vol * frac,
        method: VolumeMethod::MonteCarlo,
        samples: budget,
        stderr: bbox_vol * (frac * (1.0 - frac) / budget as f64).sqrt(),
        seed: Some(seed),
    })
}

/// Fills one chunk of `n` uniform points by rejection from the bounding box.
fn sample_chunk(domain: &Domain, lo: &[f64], hi: &[f64], n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let d = lo.len();
    let mut out = Vec::with_capacity(n * d);
    let mut x = vec![0.0; d];
    let (mut accepted, mut attempts) = (0usize, 0usize);
    while accepted < n {
        for i in 0..d {
            x[i] = rng.gen_range(lo[i]..hi[i]);
        }
        attempts += 1;
        if domain.contains_unchecked(&x) {
            out.extend_from_slice(&x);
            accepted += 1;
        }
        if attempts % THIN_PROBE == 0 && (accepted as f64) < THIN_RATE * attempts as f64 {
            return Err(Error::ThinDomain { accepted, attempts });
        }
    }
    Ok(out)
}

/// Runs `f` on consecutive chunks of `n` i.i.d. uniform points in `D`, in parallel.
///
/// Chunk `c` draws from the stream `(seed, c)`, so the points (and any per-chunk
/// reduction) depend only on `(domain, n, seed)`.
pub fn map_sample_chunks<T, F>(domain: &Domain, n: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&PointSet) -> T + Sync + Send,
{
    let (lo, hi) = domain.bounding_box();
    let d = lo.len();
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let m = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
            let mut rng = chunk_rng(seed, c as u64);
            let coords = sample_chunk(domain, &lo, &hi, m, &mut rng)?;
            let pts = PointSet::from_flat(d, coords)?;
            Ok(f(&pts))
        })
        .collect()
}

/// `n` i.i.d. uniform points in `D` by rejection from the bounding box; deterministic in `seed`.
pub fn sample_uniform(domain: &Domain, n: usize, seed: u64) -> Result<PointSet> {
    let parts = map_sample_chunks(domain, n, seed, |p| p.as_flat().to_vec())?;
    PointSet::from_flat(domain.dim(), parts.concat())
}

/// Estimated volume of the inner boundary shell `D \ D^ε`; tends to zero for Jordan-measurable `D`.
pub fn boundary_shell_volume(domain: &Domain, eps: f64, budget: usize, seed: u64) -> Result<f64> {
    let full = volume(domain, budget, seed)?.value;
    let inner = match domain.shrink(eps) {
        Ok(s) => volume(&s, budget, seed)?.value,
        Err(Error::EmptyDomain(_)) => 0.0,
        Err(e) => return Err(e),
    };
    Ok((full - inner).max(0.0))
}

// ---- JSON schema ----

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BBoxSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum DomainSpec {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    BallUnion {
        centers: Vec<Vec<f64>>,
        radii: Vec<f64>,
        norm: NormSpec,
        #[serde(default)]
        disjoint: bool,
    },
    Mask {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bbox: Option<BBoxSpec>,
    },
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(spec: DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Box { lo, hi } => Domain::new_box(lo, hi),
            DomainSpec::BallUnion { centers, radii, norm, disjoint } => {
                let d = centers.first().map_or(0, Vec::len);
                if d == 0 {
                    return Err(Error::InvalidDomain("ball union needs centers".into()));
                }
                Domain::ball_union(PointSet::from_points(d, &centers)?, radii, norm, disjoint)
            }
            DomainSpec::Mask { builtin, bbox } => Domain::builtin_mask(&builtin, bbox.map(|b| (b.lo, b.hi))),
        }
    }
}

impl Domain {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.try_into()
    }

    /// JSON form; masks serialize only when they came from the builtin corpus.
    pub fn to_json(&self) -> Result<String> {
        let spec = match self {
            Domain::Box(b) => DomainSpec::Box { lo: b.lo.clone(), hi: b.hi.clone() },
            Domain::BallUnion(u) => DomainSpec::BallUnion {
                centers: u.centers.to_vecs(),
                radii: u.radii.clone(),
                norm: u.norm.clone(),
                disjoint: u.disjoint,
            },
            Domain::Mask(m) => match &m.builtin {
                Some((name, lo, hi)) => DomainSpec::Mask {
                    builtin: name.clone(),
                    bbox: Some(BBoxSpec { lo: lo.clone(), hi: hi.clone() }),
                },
                None => {
                    return Err(Error::Unsupported(format!("mask {:?} has no JSON form", m.name)))
                }
            },
        };
        serde_json::to_string(&spec).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn l_shape() -> Domain {
        Domain::builtin_mask("l_shape", None).unwrap()
    }

    fn two_disks() -> Domain {
        let c = PointSet::from_points(2, &[[0.0, 0.0], [3.0, 0.0]]).unwrap();
        Domain::ball_union(c, vec![1.0, 1.0], NormSpec::l2(), true).unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(Domain::unit_cube(2).contains(&[0.5, 0.5]).unwrap());
        let disk = Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::l2()).unwrap();
        assert!(!disk.contains(&[1.1, 0.0]).unwrap());
        assert!(!l_shape().contains(&[0.75, 0.75]).unwrap());
        assert!(l_shape().contains(&[0.25, 0.75]).unwrap());
        assert!(matches!(disk.contains(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_overlapping_disjoint_union() {
        let c = PointSet::from_points(2, &[[0.0, 0.0], [1.5, 0.0]]).unwrap();
        assert!(Domain::ball_union(c.clone(), vec![1.0, 1.0], NormSpec::l2(), true).is_err());
        assert!(Domain::ball_union(c, vec![1.0, 1.0], NormSpec::l2(), false).is_ok());
        assert!(Domain::new_box(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Domain::builtin_mask("teapot", None).is_err());
    }

    #[test]
    fn exact_volumes() {
        for d in 1..6 {
            let v = volume(&Domain::unit_cube(d), 0, 0).unwrap();
            assert_eq!((v.value, v.method, v.stderr), (1.0, VolumeMethod::Exact, 0.0));
        }
        let v = volume(&two_disks(), 0, 0).unwrap();
        assert!((v.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn l_shape_monte_carlo_volume() {
        let v = volume_monte_carlo(&l_shape(), 1_000_000, 3).unwrap();
        assert!(v.stderr > 0.0);
        assert!((v.value - 0.75).abs() <= 3.0 * v.stderr, "{v:?}");
        assert!(matches!(volume_monte_carlo(&l_shape(), 0, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn overlapping_union_volume_is_monte_carlo() {
        let c = PointSet::from_points(2, &[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let d = Domain::ball_union(c, vec![1.0, 1.0], NormSpec::l2(), false).unwrap();
        let v = volume(&d, 400_000, 1).unwrap();
        // Two unit disks at distance 1 overlap in a lens of area 2π/3 − √3/2.
        let exact = 2.0 * PI - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0);
        assert_eq!(v.method, VolumeMethod::MonteCarlo);
        assert!((v.value - exact).abs() <= 4.0 * v.stderr);
    }

    #[test]
    fn sampling_examples() {
        let sq = sample_uniform(&Domain::unit_cube(2), 100_000, 9).unwrap();
        for i in 0..2 {
            let mean = sq.iter().map(|p| p[i]).sum::<f64>() / sq.len() as f64;
            assert!((mean - 0.5).abs() < 0.005);
        }
        let disk = Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::l2()).unwrap();
        let pts = sample_uniform(&disk, 100_000, 2).unwrap();
        let frac = pts.iter().filter(|p| p[0].hypot(p[1]) <= 0.5).count() as f64 / pts.len() as f64;
        assert!((frac - 0.25).abs() < 0.005);
        assert_eq!(sample_uniform(&disk, 5000, 7).unwrap(), sample_uniform(&disk, 5000, 7).unwrap());
        assert_ne!(sample_uniform(&disk, 5000, 7).unwrap(), sample_uniform(&disk, 5000, 8).unwrap());
    }

    #[test]
    fn thin_domain_is_reported() {
        let needle: Predicate = Arc::new(|x: &[f64]| x[0].abs() < 1e-12 && x[1].abs() < 1e-12);
        let m = Mask::new("needle", vec![-1.0, -1.0], vec![1.0, 1.0], None, needle).unwrap();
        let err = sample_uniform(&Domain::Mask(m), 10, 0).unwrap_err();
        assert!(matches!(err, Error::ThinDomain { .. }));
    }

    #[test]
    fn shrink_examples() {
        let s = Domain::unit_cube(2).shrink(0.1).unwrap();
        let (lo, hi) = s.bounding_box();
        assert!((lo[0] - 0.1).abs() < 1e-15 && (hi[1] - 0.9).abs() < 1e-15);
        assert!((s.exact_volume().unwrap() - 0.64).abs() < 1e-12);
        let b = Domain::ball(vec![0.0; 3], 1.0, NormSpec::l2()).unwrap().shrink(0.25).unwrap();
        match b {
            Domain::BallUnion(u) => assert_eq!(u.radii(), &[0.75]),
            _ => unreachable!(),
        }
        assert!(matches!(Domain::unit_cube(2).shrink(0.5), Err(Error::EmptyDomain(_))));
        assert!(Domain::unit_cube(2).shrink(-1.0).is_err());
        let c = PointSet::from_points(1, &[[0.0], [5.0]]).unwrap();
        let u = Domain::ball_union(c, vec![0.5, 2.0], NormSpec::l2(), true).unwrap();
        match u.shrink(1.0).unwrap() {
            Domain::BallUnion(u) => assert_eq!(u.len(), 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn l_shape_shrink_volume_close_to_full() {
        let s = l_shape().shrink(1e-3).unwrap();
        let v = volume(&s, 4_000_000, 17).unwrap();
        // Inset area 0.75 − 4ε + (5 − π/4)ε² = 0.746004.
        assert!(v.value >= 0.745, "{v:?}");
        assert!(v.value <= 0.75);
    }

    fn corpus() -> Vec<Domain> {
        vec![
            Domain::unit_cube(2),
            Domain::new_box(vec![-1.0, 0.0, 0.0], vec![1.0, 0.5, 2.0]).unwrap(),
            two_disks(),
            Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::linf()).unwrap(),
            l_shape(),
            Domain::builtin_mask("annulus", None).unwrap(),
        ]
    }

    #[test]
    fn shrink_is_inside_and_nested() {
        for dom in corpus() {
            let pts = sample_uniform(&dom, 20_000, 4).unwrap();
            let (lo, hi) = dom.bounding_box();
            let scale = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(f64::INFINITY, f64::min);
            let eps = [0.01 * scale, 0.03 * scale, 0.06 * scale];
            let shrunk: Vec<Domain> = eps.iter().map(|e| dom.shrink(*e).unwrap()).collect();
            for p in pts.iter() {
                let inside: Vec<bool> = shrunk.iter().map(|s| s.contains_unchecked(p)).collect();
                assert!(dom.contains_unchecked(p));
                // ε1 < ε2 ⇒ D^{ε2} ⊆ D^{ε1}
                assert!(!inside[2] || inside[1], "{} at {p:?}", dom.kind_name());
                assert!(!inside[1] || inside[0], "{} at {p:?}", dom.kind_name());
            }
            // no false interior claims on points sampled from the shrunk domain
            for s in &shrunk {
                let inner = sample_uniform(s, 2000, 5).unwrap();
                assert!(inner.iter().all(|p| dom.contains_unchecked(p)));
            }
        }
    }

    #[test]
    fn shell_volume_shrinks_with_eps() {
        for dom in corpus() {
            let mut last = f64::INFINITY;
            for eps in [0.1, 0.03, 0.01, 0.003] {
                let shell = boundary_shell_volume(&dom, eps, 200_000, 8).unwrap();
                let tol = if dom.exact_volume().is_some() && !matches!(dom, Domain::Mask(_)) { 1e-12 } else { 0.01 };
                assert!(shell <= last + tol, "{}: {shell} > {last}", dom.kind_name());
                last = shell;
            }
            assert!(last < 0.05 * volume(&dom, 200_000, 8).unwrap().value);
        }
    }

    #[test]
    fn probe_direction_count() {
        assert_eq!(probe_directions(1).len(), 2);
        assert_eq!(probe_directions(2).len(), 8);
        assert_eq!(probe_directions(6).len(), 64);
        for u in probe_directions(3) {
            assert!((u.iter().map(|t| t * t).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_and_schema() {
        let d = Domain::from_json(r#"{"kind":"box","lo":[0,0],"hi":[1,2]}"#).unwrap();
        assert_eq!(d.exact_volume(), Some(2.0));
        let u = Domain::from_json(
            r#"{"kind":"ball_union","centers":[[0,0],[3,0]],"radii":[1,1],"norm":{"p":2},"disjoint":true}"#,
        )
        .unwrap();
        assert_eq!(u, two_disks());
        let m = Domain::from_json(r#"{"kind":"mask","builtin":"l_shape","bbox":{"lo":[0,0],"hi":[2,2]}}"#).unwrap();
        assert!((m.exact_volume().unwrap() - 3.0).abs() < 1e-12);
        assert!(!m.contains_unchecked(&[1.5, 1.5]) && m.contains_unchecked(&[0.5, 1.5]));
        let back = Domain::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back.bounding_box(), m.bounding_box());
        assert!(Domain::from_json(r#"{"kind":"sphere"}"#).is_err());
    }
}
