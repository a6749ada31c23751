//! Hypercubic lattices with open boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance function on integer site coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Chebyshev,
    Manhattan,
}

impl Metric {
    pub fn distance(self, a: &[i64], b: &[i64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Metric::Euclidean => (diffs.map(|v| (v * v) as f64).sum::<f64>()).sqrt(),
            Metric::Chebyshev => diffs.max().unwrap_or(0) as f64,
            Metric::Manhattan => diffs.sum::<i64>() as f64,
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "chebyshev" => Ok(Metric::Chebyshev),
            "manhattan" => Ok(Metric::Manhattan),
            _ => Err(Error::UnknownSelector {
                kind: "metric",
                value: s.to_string(),
            }),
        }
    }
}

/// A `d`-dimensional hypercubic lattice with open boundary conditions.
///
/// Sites are enumerated in row-major order (last axis fastest). Distances
/// are in units of the lattice spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    dimension: usize,
    extents: Vec<usize>,
    metric: Metric,
    coords: Vec<Vec<i64>>,
    diameter: f64,
}

/// Plain description of a lattice, used in configuration and JSON documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub d: usize,
    pub extents: Vec<usize>,
    #[serde(default)]
    pub metric: Metric,
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice> {
        Lattice::new(self.d, &self.extents, self.metric)
    }
}

impl Lattice {
    pub fn new(dimension: usize, extents: &[usize], metric: Metric) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidLattice("dimension must be at least 1".into()));
        }
        if extents.is_empty() {
            return Err(Error::InvalidLattice("extents must not be empty".into()));
        }
        if extents.len() != dimension {
            return Err(Error::InvalidLattice(format!(
                "{} extents given for a {}-dimensional lattice",
                extents.len(),
                dimension
            )));
        }
        if let Some(&e) = extents.iter().find(|&&e| e < 2) {
            return Err(Error::InvalidLattice(format!(
                "every extent must be at least 2, got {e}"
            )));
        }

        let count: usize = extents.iter().product();
        let mut coords = Vec::with_capacity(count);
        for index in 0..count {
            let mut rem = index;
            let mut c = vec![0i64; dimension];
            for axis in (0..dimension).rev() {
                c[axis] = (rem % extents[axis]) as i64;
                rem /= extents[axis];
            }
            coords.push(c);
        }

        // Opposite corners realise the diameter for all three metrics, but a
        // brute-force pass keeps this independent of that argument.
        let mut diameter = 0.0f64;
        for i in 0..count {
            for j in (i + 1)..count {
                diameter = diameter.max(metric.distance(&coords[i], &coords[j]));
            }
        }

        Ok(Lattice {
            dimension,
            extents: extents.to_vec(),
            metric,
            coords,
            diameter,
        })
    }

    /// Open chain of `len` sites with the Euclidean metric.
    pub fn chain(len: usize) -> Result<Self> {
        Lattice::new(1, &[len], Metric::Euclidean)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn num_sites(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, site: usize) -> &[i64] {
        &self.coords[site]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(&self.coords[i], &self.coords[j])
    }

    /// Lattice diameter `r*`: the largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec {
            d: self.dimension,
            extents: self.extents.clone(),
            metric: self.metric,
        }
    }

    /// `τ = max_i Σ_{j≠i} dist(i,j)^{-α}`.
    pub fn tau(&self, alpha: f64) -> f64 {
        (0..self.num_sites())
            .map(|i| {
                (0..self.num_sites())
                    .filter(|&j| j != i)
                    .map(|j| self.distance(i, j).powf(-alpha))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Sites within distance `radius` of `center` (closed ball).
    pub fn ball(&self, center: usize, radius: f64) -> Vec<usize> {
        (0..self.num_sites())
            .filter(|&j| self.distance(center, j) <= radius)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chain_geometry() {
        let l = Lattice::new(1, &[5], Metric::Euclidean).unwrap();
        assert_eq!(l.num_sites(), 5);
        assert_eq!(l.diameter(), 4.0);
    }

    #[test]
    fn square_diameter_matches_corner_distance() {
        let l = Lattice::new(2, &[3, 3], Metric::Euclidean).unwrap();
        assert_eq!(l.num_sites(), 9);
        assert_relative_eq!(l.diameter(), 8f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(l.diameter(), 2.8284, epsilon = 1e-4);
    }

    #[test]
    fn two_site_manhattan() {
        let l = Lattice::new(1, &[2], Metric::Manhattan).unwrap();
        assert_eq!(l.num_sites(), 2);
        assert_eq!(l.diameter(), 1.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Lattice::new(0, &[3], Metric::Euclidean).is_err());
        assert!(Lattice::new(1, &[], Metric::Euclidean).is_err());
        assert!(Lattice::new(1, &[1], Metric::Euclidean).is_err());
        assert!(Lattice::new(2, &[3], Metric::Euclidean).is_err());
    }

    #[test]
    fn metrics_on_a_square() {
        let l2 = Lattice::new(2, &[3, 3], Metric::Chebyshev).unwrap();
        assert_eq!(l2.diameter(), 2.0);
        let l1 = Lattice::new(2, &[3, 3], Metric::Manhattan).unwrap();
        assert_eq!(l1.diameter(), 4.0);
    }

    fn brute_tau(l: &Lattice, alpha: f64) -> f64 {
        let mut best = 0.0f64;
        for i in 0..l.num_sites() {
            let mut s = 0.0;
            for j in 0..l.num_sites() {
                if i != j {
                    s += 1.0 / l.distance(i, j).powf(alpha);
                }
            }
            best = best.max(s);
        }
        best
    }

    #[test]
    fn tau_examples() {
        let five = Lattice::chain(5).unwrap();
        assert_relative_eq!(five.tau(3.0), 2.25, epsilon = 1e-15);
        assert_relative_eq!(five.tau(3.0), brute_tau(&five, 3.0), epsilon = 1e-15);
        let two = Lattice::chain(2).unwrap();
        assert_eq!(two.tau(1.7), 1.0);
        assert_eq!(two.tau(4.0), 1.0);
        let three = Lattice::chain(3).unwrap();
        assert_relative_eq!(three.tau(3.0), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn tau_nonincreasing_in_alpha() {
        let l = Lattice::new(2, &[4, 3], Metric::Euclidean).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..30 {
            let a = 2.05 + 0.1 * k as f64;
            let t = l.tau(a);
            assert!(t <= prev + 1e-15);
            prev = t;
        }
    }

    #[test]
    fn metric_axioms() {
        for metric in [Metric::Euclidean, Metric::Chebyshev, Metric::Manhattan] {
            let l = Lattice::new(2, &[3, 4], metric).unwrap();
            let n = l.num_sites();
            for i in 0..n {
                assert_eq!(l.distance(i, i), 0.0);
                for j in 0..n {
                    assert_eq!(l.distance(i, j), l.distance(j, i));
                    for k in 0..n {
                        assert!(l.distance(i, k) <= l.distance(i, j) + l.distance(j, k) + 1e-12);
                    }
                }
            }
        }
    }
}
