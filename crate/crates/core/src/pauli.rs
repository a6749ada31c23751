//! Pauli-string expansion of dense operators and the spatial projector `P_r`.
//!
//! Coefficients are `c_P = Tr(P† O) / 2^n`. They are computed with an
//! in-place per-qubit transform of the matrix (cost `n·4^n`) rather than
//! `4^n` separate traces; [`PauliCoefficients`] keeps the result in a dense
//! array whose `(row, col)` entry holds the coefficient of the string whose
//! letter on each qubit is read off that qubit's `(row bit, col bit)`:
//! `00 → I`, `01 → X`, `10 → Y`, `11 → Z`. The support of an entry is then
//! simply `row | col`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{qubits_for_dim, site_mask, CMatrix, I, ONE, ZERO};

/// Largest system [`decompose`] accepts.
pub const MAX_DECOMPOSE_QUBITS: usize = 14;

/// Coefficients below this magnitude are dropped from decompositions.
pub const DEFAULT_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }

    fn from_bits(row_bit: bool, col_bit: bool) -> Option<Pauli> {
        match (row_bit, col_bit) {
            (false, false) => None,
            (false, true) => Some(Pauli::X),
            (true, false) => Some(Pauli::Y),
            (true, true) => Some(Pauli::Z),
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (false, true),
            Pauli::Y => (true, false),
            Pauli::Z => (true, true),
        }
    }
}

impl std::fmt::Display for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(c)
    }
}

/// A weighted tensor product of single-site Paulis. Sites absent from
/// `letters` carry the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub letters: BTreeMap<usize, Pauli>,
    #[serde(flatten)]
    pub coeff: Coefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Coefficient {
    fn from(z: Complex64) -> Self {
        Coefficient { re: z.re, im: z.im }
    }
}

impl From<Coefficient> for Complex64 {
    fn from(c: Coefficient) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl PauliString {
    pub fn new(letters: impl IntoIterator<Item = (usize, Pauli)>, coeff: Complex64) -> Self {
        PauliString {
            letters: letters.into_iter().collect(),
            coeff: coeff.into(),
        }
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coeff.into()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.keys().copied()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Dense matrix of `coeff · P` on `n` qubits.
    pub fn to_matrix(&self, n: usize) -> CMatrix {
        let dim = 1usize << n;
        let mut out = CMatrix::zeros(dim, dim);
        let c = self.coefficient();
        for row in 0..dim {
            let mut col = row;
            let mut phase = c;
            for (&site, &p) in &self.letters {
                let m = site_mask(site, n);
                let bit = row & m != 0;
                match p {
                    Pauli::X => col ^= m,
                    Pauli::Y => {
                        col ^= m;
                        // <row|Y|col>: <0|Y|1> = -i, <1|Y|0> = i.
                        phase *= if bit { I } else { -I };
                    }
                    Pauli::Z => {
                        if bit {
                            phase = -phase;
                        }
                    }
                }
            }
            out[(row, col)] = phase;
        }
        out
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.letters.iter().cmp(other.letters.iter())
    }
}

/// Pauli expansion of an `n`-qubit operator, strings in canonical order
/// (lexicographic in `(site, letter)` sequences; identity first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDecomposition {
    pub n: usize,
    pub strings: Vec<PauliString>,
}

impl OperatorDecomposition {
    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut coeffs = PauliCoefficients::zeros(self.n);
        for s in &self.strings {
            let (row, col) = s.letters.iter().fold((0, 0), |(r, c), (&site, &p)| {
                let m = site_mask(site, self.n);
                let (rb, cb) = p.bits();
                (r | if rb { m } else { 0 }, c | if cb { m } else { 0 })
            });
            coeffs.data[(row, col)] += s.coefficient();
        }
        coeffs.into_matrix()
    }

    /// `sqrt(Σ |c_P|²)`, equal to the normalized Frobenius norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.strings
            .iter()
            .map(|s| s.coefficient().norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.strings)?)
    }

    pub fn from_json(n: usize, s: &str) -> Result<Self> {
        let mut strings: Vec<PauliString> = serde_json::from_str(s)?;
        strings.sort_by(PauliString::canonical_cmp);
        Ok(OperatorDecomposition { n, strings })
    }
}

/// Dense array of all `4^n` Pauli coefficients; see the module docs for the
/// index encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    n: usize,
    data: CMatrix,
}

impl PauliCoefficients {
    pub fn zeros(n: usize) -> Self {
        let dim = 1usize << n;
        PauliCoefficients {
            n,
            data: CMatrix::zeros(dim, dim),
        }
    }

    pub fn from_matrix(op: &CMatrix) -> Result<Self> {
        let n = check_square_power_of_two(op)?;
        let mut data = op.clone();
        let dim = 1usize << n;
        let half = Complex64::new(0.5, 0.0);
        for q in 0..n {
            let m = site_mask(q, n);
            for col in (0..dim).filter(|c| c & m == 0) {
                for row in (0..dim).filter(|r| r & m == 0) {
                    let a = data[(row, col)];
                    let b = data[(row, col | m)];
                    let c = data[(row | m, col)];
                    let d = data[(row | m, col | m)];
                    data[(row, col)] = (a + d) * half;
                    data[(row, col | m)] = (b + c) * half;
                    data[(row | m, col)] = (b - c) * I * half;
                    data[(row | m, col | m)] = (a - d) * half;
                }
            }
        }
        Ok(PauliCoefficients { n, data })
    }

    pub fn into_matrix(self) -> CMatrix {
        let n = self.n;
        let dim = 1usize << n;
        let mut data = self.data;
        for q in 0..n {
            let m = site_mask(q, n);
            for col in (0..dim).filter(|c| c & m == 0) {
                for row in (0..dim).filter(|r| r & m == 0) {
                    let id = data[(row, col)];
                    let x = data[(row, col | m)];
                    let y = data[(row | m, col)];
                    let z = data[(row | m, col | m)];
                    data[(row, col)] = id + z;
                    data[(row, col | m)] = x - I * y;
                    data[(row | m, col)] = x + I * y;
                    data[(row | m, col | m)] = id - z;
                }
            }
        }
        data
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Zero every coefficient whose support mask fails `keep`. Support masks
    /// use the basis-index convention of [`site_mask`].
    pub fn retain_support(&mut self, mut keep: impl FnMut(usize) -> bool) {
        let dim = 1usize << self.n;
        let verdicts: Vec<bool> = (0..dim).map(&mut keep).collect();
        for col in 0..dim {
            for row in 0..dim {
                if !verdicts[row | col] {
                    self.data[(row, col)] = ZERO;
                }
            }
        }
    }

    pub fn norm_sqr_sum(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_decomposition(&self, cutoff: f64) -> OperatorDecomposition {
        let n = self.n;
        let dim = 1usize << n;
        let mut strings = Vec::new();
        for col in 0..dim {
            for row in 0..dim {
                let c = self.data[(row, col)];
                if c.norm() < cutoff {
                    continue;
                }
                let letters = (0..n).filter_map(|site| {
                    let m = site_mask(site, n);
                    Pauli::from_bits(row & m != 0, col & m != 0).map(|p| (site, p))
                });
                strings.push(PauliString::new(letters, c));
            }
        }
        strings.sort_by(PauliString::canonical_cmp);
        OperatorDecomposition { n, strings }
    }
}

fn check_square_power_of_two(op: &CMatrix) -> Result<usize> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch {
            expected: op.nrows(),
            actual: op.ncols(),
        });
    }
    qubits_for_dim(op.nrows()).ok_or(Error::DimensionMismatch {
        expected: op.nrows().next_power_of_two(),
        actual: op.nrows(),
    })
}

/// Pauli expansion of `op` on `n` qubits, dropping coefficients below
/// [`DEFAULT_CUTOFF`].
pub fn decompose(op: &CMatrix, n: usize) -> Result<OperatorDecomposition> {
    decompose_with_cutoff(op, n, DEFAULT_CUTOFF)
}

pub fn decompose_with_cutoff(op: &CMatrix, n: usize, cutoff: f64) -> Result<OperatorDecomposition> {
    if n > MAX_DECOMPOSE_QUBITS {
        return Err(Error::TooLarge {
            qubits: n,
            limit: MAX_DECOMPOSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: op.nrows(),
        });
    }
    Ok(PauliCoefficients::from_matrix(op)?.to_decomposition(cutoff))
}

/// Largest distance from `center` over the sites in `support`; 0 for the
/// empty support.
pub fn support_reach(lattice: &Lattice, center: usize, support: impl IntoIterator<Item = usize>) -> f64 {
    support
        .into_iter()
        .map(|j| lattice.distance(center, j))
        .fold(0.0, f64::max)
}

/// Keep exactly the strings with some support site at distance `≥ r` from
/// `center`. For `r > 0` the identity string is always removed.
pub fn project_outside(
    dec: &OperatorDecomposition,
    center: usize,
    r: f64,
    lattice: &Lattice,
) -> OperatorDecomposition {
    let strings = dec
        .strings
        .iter()
        .filter(|s| keeps(lattice, center, r, s.support(), s.is_identity()))
        .cloned()
        .collect();
    OperatorDecomposition { n: dec.n, strings }
}

fn keeps(lattice: &Lattice, center: usize, r: f64, support: impl Iterator<Item = usize>, identity: bool) -> bool {
    if identity {
        return r <= 0.0;
    }
    support_reach(lattice, center, support) >= r
}

/// Reach `max_{j ∈ supp} dist(j, center)` for every support mask of an
/// `n = lattice.num_sites()` register.
pub fn reach_table(lattice: &Lattice, center: usize) -> Vec<f64> {
    let n = lattice.num_sites();
    let site_dist: Vec<f64> = (0..n).map(|j| lattice.distance(center, j)).collect();
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .filter(|&site| mask & site_mask(site, n) != 0)
                .map(|site| site_dist[site])
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Dense-matrix form of [`project_outside`]: `P_r^{(center)} O`.
pub fn project_outside_matrix(op: &CMatrix, lattice: &Lattice, center: usize, r: f64) -> Result<CMatrix> {
    let table = reach_table(lattice, center);
    let mut coeffs = PauliCoefficients::from_matrix(op)?;
    if coeffs.num_qubits() != lattice.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: 1 << lattice.num_sites(),
            actual: op.nrows(),
        });
    }
    coeffs.retain_support(|mask| if mask == 0 { r <= 0.0 } else { table[mask] >= r });
    Ok(coeffs.into_matrix())
}

/// Keep the strings supported inside `region` (a support mask). With the
/// identity kept this equals `Tr_{region^c}[O] ⊗ I / 2^{|region^c|}`.
pub fn restrict_to_region(op: &CMatrix, region: usize) -> Result<CMatrix> {
    let mut coeffs = PauliCoefficients::from_matrix(op)?;
    coeffs.retain_support(|mask| mask & !region == 0);
    Ok(coeffs.into_matrix())
}

pub fn region_mask(sites: impl IntoIterator<Item = usize>, n: usize) -> usize {
    sites.into_iter().fold(0, |acc, s| acc | site_mask(s, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, op_norm};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(dim: usize, seed: u64, hermitian: bool) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        if hermitian {
            (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
        } else {
            m
        }
    }

    /// Oracle: every coefficient from an explicit trace.
    fn trace_coefficients(op: &CMatrix, n: usize) -> Vec<(Vec<Option<Pauli>>, Complex64)> {
        let mut out = Vec::new();
        let letters = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
        for code in 0..(1usize << (2 * n)) {
            let word: Vec<Option<Pauli>> = (0..n).map(|q| letters[(code >> (2 * (n - 1 - q))) & 3]).collect();
            let mut p = CMatrix::identity(1, 1);
            for l in &word {
                let local = l.map(Pauli::matrix).unwrap_or_else(|| CMatrix::identity(2, 2));
                p = kron(&p, &local);
            }
            let c = (p.adjoint() * op).trace() / Complex64::new((1 << n) as f64, 0.0);
            out.push((word, c));
        }
        out
    }

    #[test]
    fn projector_onto_zero() {
        let op = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let dec = decompose(&op, 1).unwrap();
        assert_eq!(dec.len(), 2);
        assert!(dec.strings[0].is_identity());
        assert_relative_eq!(dec.strings[0].coeff.re, 0.5);
        assert_eq!(dec.strings[1].letters, BTreeMap::from([(0, Pauli::Z)]));
        assert_relative_eq!(dec.strings[1].coeff.re, 0.5);
    }

    #[test]
    fn single_string() {
        let op = kron(&Pauli::X.matrix(), &Pauli::Z.matrix());
        let dec = decompose(&op, 2).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(dec.strings[0].letters, BTreeMap::from([(0, Pauli::X), (1, Pauli::Z)]));
        assert_relative_eq!(dec.strings[0].coeff.re, 1.0);
        assert_eq!(dec.strings[0].coeff.im, 0.0);
    }

    #[test]
    fn transform_agrees_with_trace_oracle() {
        for n in 1..=3 {
            let op = random_matrix(1 << n, 40 + n as u64, false);
            let fast = PauliCoefficients::from_matrix(&op).unwrap().to_decomposition(0.0);
            let slow = trace_coefficients(&op, n);
            assert_eq!(fast.len(), slow.len());
            for (word, c) in slow {
                let letters: BTreeMap<usize, Pauli> =
                    word.iter().enumerate().filter_map(|(s, l)| l.map(|p| (s, p))).collect();
                let found = fast.strings.iter().find(|s| s.letters == letters).unwrap();
                assert!((found.coefficient() - c).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn reconstruction_of_random_hermitian() {
        let op = random_matrix(4, 1, true);
        let dec = decompose(&op, 2).unwrap();
        let back = dec.to_matrix();
        assert!((back - &op).iter().all(|z| z.norm() < 1e-10));
        // Each string rebuilt on its own also sums to the source.
        let summed = dec.strings.iter().fold(CMatrix::zeros(4, 4), |acc, s| acc + s.to_matrix(2));
        assert!((summed - op).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn string_matrix_matches_kronecker() {
        let s = PauliString::new([(0, Pauli::Y), (2, Pauli::X)], Complex64::new(0.0, 2.0));
        let expected = kron(&kron(&Pauli::Y.matrix(), &CMatrix::identity(2, 2)), &Pauli::X.matrix())
            * Complex64::new(0.0, 2.0);
        assert_eq!(s.to_matrix(3), expected);
    }

    #[test]
    fn dimension_guards() {
        assert!(decompose(&CMatrix::zeros(3, 3), 1).is_err());
        assert!(decompose(&CMatrix::zeros(4, 4), 1).is_err());
        assert!(matches!(
            decompose(&CMatrix::zeros(2, 2), 15),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let chain3 = Lattice::chain(3).unwrap();
        let z0 = OperatorDecomposition {
            n: 3,
            strings: vec![PauliString::new([(0, Pauli::Z)], ONE)],
        };
        assert!(project_outside(&z0, 0, 1.0, &chain3).is_empty());

        let z0z2 = OperatorDecomposition {
            n: 3,
            strings: vec![PauliString::new([(0, Pauli::Z), (2, Pauli::Z)], ONE)],
        };
        assert_eq!(project_outside(&z0z2, 0, 1.0, &chain3).len(), 1);

        let chain2 = Lattice::chain(2).unwrap();
        let a = Complex64::new(0.3, 0.0);
        let b = Complex64::new(0.0, -0.7);
        let mixed = OperatorDecomposition {
            n: 2,
            strings: vec![
                PauliString::new([(0, Pauli::X)], a),
                PauliString::new([(0, Pauli::Y), (1, Pauli::Z)], b),
            ],
        };
        let kept = project_outside(&mixed, 0, 1.0, &chain2);
        assert_eq!(kept.strings, vec![PauliString::new([(0, Pauli::Y), (1, Pauli::Z)], b)]);
    }

    #[test]
    fn identity_kept_only_at_zero_radius() {
        let chain2 = Lattice::chain(2).unwrap();
        let dec = decompose(&CMatrix::identity(4, 4), 2).unwrap();
        assert_eq!(project_outside(&dec, 0, 0.0, &chain2).len(), 1);
        assert!(project_outside(&dec, 0, 0.5, &chain2).is_empty());
    }

    #[test]
    fn matrix_projection_agrees_with_string_projection() {
        let lattice = Lattice::chain(4).unwrap();
        let op = random_matrix(16, 9, true);
        for r in [0.0, 0.5, 1.0, 2.0, 3.0, 3.5] {
            for center in 0..4 {
                let via_strings = project_outside(&decompose(&op, 4).unwrap(), center, r, &lattice).to_matrix();
                let direct = project_outside_matrix(&op, &lattice, center, r).unwrap();
                assert!((via_strings - direct).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn restriction_is_normalized_partial_trace() {
        // O = A ⊗ B on two qubits; restricting to site 0 gives A ⊗ I · Tr(B)/2.
        let a = random_matrix(2, 3, true);
        let b = random_matrix(2, 4, true);
        let op = kron(&a, &b);
        let restricted = restrict_to_region(&op, region_mask([0], 2)).unwrap();
        let expected = kron(&a, &CMatrix::identity(2, 2)) * (b.trace() / Complex64::new(2.0, 0.0));
        assert!((restricted - expected).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn projected_norm_at_most_twice() {
        let lattice = Lattice::chain(3).unwrap();
        for seed in 0..10 {
            let op = random_matrix(8, 100 + seed, true);
            let full = op_norm(&op);
            for r in [1.0, 2.0] {
                let p = project_outside_matrix(&op, &lattice, 0, r).unwrap();
                assert!(op_norm(&p) <= 2.0 * full + 1e-12);
            }
        }
    }

    #[test]
    fn json_shape() {
        let dec = OperatorDecomposition {
            n: 2,
            strings: vec![PauliString::new([(1, Pauli::Y)], Complex64::new(0.5, -0.25))],
        };
        let s = dec.to_json().unwrap();
        assert_eq!(s, r#"[{"letters":{"1":"Y"},"re":0.5,"im":-0.25}]"#);
        assert_eq!(OperatorDecomposition::from_json(2, &s).unwrap(), dec);
    }
}
