//! Ordered node sets, stored flat.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::NormSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        Self { dim, coords: Vec::new() }
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut set = Self::new(dim);
        for p in points {
            set.push(p.as_ref())?;
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        crate::error::check_dim(self.dim, p.len())?;
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, coords: self.coords.iter().map(|c| c * s).collect() }
    }

    /// Index of and distance to the node nearest `x`; ties go to the lowest index.
    #[inline]
    pub fn nearest(&self, norm: &NormSpec, x: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.iter().enumerate() {
            let d = norm.dist(x, p);
            if best.map_or(true, |(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best
    }

    /// `min_i ‖x − x_i‖`, infinite for an empty set.
    #[inline]
    pub fn min_dist(&self, norm: &NormSpec, x: &[f64]) -> f64 {
        self.iter().fold(f64::INFINITY, |m, p| m.min(norm.dist(x, p)))
    }

    /// One point per line, coordinates comma separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in self.iter() {
            for (k, c) in p.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses CSV as written by [`PointSet::to_csv`]; blank lines and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut coords = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::Parse(format!(
                        "line {}: expected {d} coordinates, got {}",
                        lineno + 1,
                        row.len()
                    )))
                }
                _ => {}
            }
            coords.extend(row);
        }
        match dim {
            Some(d) => Self::from_flat(d, coords),
            None => Err(Error::Parse("no points in CSV".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_breaks_ties_low() {
        let x = PointSet::from_points(1, &[[0.0], [2.0]]).unwrap();
        assert_eq!(x.nearest(&NormSpec::l2(), &[1.0]), Some((0, 1.0)));
        assert_eq!(PointSet::new(2).nearest(&NormSpec::l2(), &[0.0, 0.0]), None);
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        assert!(PointSet::from_csv("1,2\n3\n").is_err());
        assert!(PointSet::from_csv("1,x\n").is_err());
        assert!(PointSet::from_csv("\n# nothing\n").is_err());
    }

    proptest::proptest! {
        #[test]
        fn csv_round_trip(pairs in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..20)) {
            let coords: Vec<f64> = pairs.iter().flat_map(|(a, b)| [*a, *b]).collect();
            let set = PointSet::from_flat(2, coords).unwrap();
            let back = PointSet::from_csv(&set.to_csv()).unwrap();
            proptest::prop_assert_eq!(set, back);
        }
    }
}
