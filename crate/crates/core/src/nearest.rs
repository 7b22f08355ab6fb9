//! Bucket-grid nearest-node queries for any weighted ℓ_p norm.

use crate::geometry::NormSpec;
use crate::points::PointSet;

/// Uniform bucket grid over the bounding box of a node set.
///
/// Queries scan Chebyshev rings of buckets outward and stop once every
/// unvisited bucket is provably farther than the best node found. Results
/// match a linear scan exactly, including the lowest-index tie rule.
pub struct NearestIndex<'a> {
    points: &'a PointSet,
    norm: &'a NormSpec,
    lo: Vec<f64>,
    cell: Vec<f64>,
    counts: Vec<usize>,
    buckets: Vec<Vec<u32>>,
    /// Metric length of one cell step along the cheapest axis.
    ring_step: f64,
}

impl<'a> NearestIndex<'a> {
    pub fn new(points: &'a PointSet, norm: &'a NormSpec) -> Self {
        let d = points.dim();
        let n = points.len().max(1);
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in points.iter() {
            for i in 0..d {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        if points.is_empty() {
            lo = vec![0.0; d];
            hi = vec![1.0; d];
        }
        let per_axis = ((n as f64).powf(1.0 / d as f64).round() as usize).max(1);
        let mut counts = vec![per_axis; d];
        let mut cell = vec![0.0; d];
        for i in 0..d {
            let w = hi[i] - lo[i];
            if w <= 0.0 {
                counts[i] = 1;
                cell[i] = 1.0;
                continue;
            }
            cell[i] = w / counts[i] as f64;
        }
        let total: usize = counts.iter().product();
        let mut buckets = vec![Vec::new(); total];
        let mut index = Self { points, norm, lo, cell, counts, buckets: Vec::new(), ring_step: 0.0 };
        for (k, p) in points.iter().enumerate() {
            let b = index.bucket_of(p);
            buckets[index.flat(&b)].push(k as u32);
        }
        index.buckets = buckets;
        index.ring_step = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = index.cell[i];
                norm.norm(&e)
            })
            .fold(f64::INFINITY, f64::min);
        index
    }

    fn bucket_of(&self, x: &[f64]) -> Vec<usize> {
        (0..x.len())
            .map(|i| {
                let t = ((x[i] - self.lo[i]) / self.cell[i]).floor();
                if t < 0.0 {
                    0
                } else {
                    (t as usize).min(self.counts[i] - 1)
                }
            })
            .collect()
    }

    fn flat(&self, b: &[usize]) -> usize {
        b.iter().zip(&self.counts).fold(0, |acc, (bi, c)| acc * c + bi)
    }

    fn bucket_box(&self, b: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let lo: Vec<f64> = (0..b.len()).map(|i| self.lo[i] + b[i] as f64 * self.cell[i]).collect();
        let hi: Vec<f64> = (0..b.len()).map(|i| lo[i] + self.cell[i]).collect();
        (lo, hi)
    }

    /// Index and distance of the nearest node; ties go to the lowest index.
    pub fn nearest(&self, x: &[f64]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let d = x.len();
        let home = self.bucket_of(x);
        let max_ring = self.counts.iter().copied().max().unwrap_or(1);
        let mut best = (usize::MAX, f64::INFINITY);
        let mut idx = vec![0usize; d];
        for r in 0..=max_ring {
            // Every bucket at ring r sits at least (r - 1) full cells away along some axis.
            if r >= 2 && (r - 1) as f64 * self.ring_step > best.1 {
                break;
            }
            let ranges: Vec<(usize, usize)> = (0..d)
                .map(|i| (home[i].saturating_sub(r), (home[i] + r).min(self.counts[i] - 1)))
                .collect();
            for (i, slot) in idx.iter_mut().enumerate() {
                *slot = ranges[i].0;
            }
            loop {
                let on_ring = (0..d).any(|i| idx[i].abs_diff(home[i]) == r);
                if on_ring {
                    let bucket = &self.buckets[self.flat(&idx)];
                    if !bucket.is_empty() {
                        let (blo, bhi) = self.bucket_box(&idx);
                        if self.norm.min_dist_to_box(x, &blo, &bhi) <= best.1 {
                            for &k in bucket {
                                let k = k as usize;
                                let dist = self.norm.dist(x, self.points.point(k));
                                if dist < best.1 || (dist == best.1 && k < best.0) {
                                    best = (k, dist);
                                }
                            }
                        }
                    }
                }
                // odometer over the ring's bounding cube
                let mut axis = d;
                while axis > 0 {
                    axis -= 1;
                    if idx[axis] < ranges[axis].1 {
                        idx[axis] += 1;
                        for (j, slot) in idx.iter_mut().enumerate().skip(axis + 1) {
                            *slot = ranges[j].0;
                        }
                        break;
                    }
                    if axis == 0 {
                        axis = usize::MAX;
                        break;
                    }
                }
                if axis == usize::MAX {
                    break;
                }
            }
        }
        Some(best)
    }
}
