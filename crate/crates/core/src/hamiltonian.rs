//! Power-law two-body Hamiltonians and interaction-range bucketing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Metric};
use crate::linalg::{embed_two_site, hermitian_op_norm, is_hermitian, kron, CMatrix, ZERO};
use crate::pauli::Pauli;

/// Random coupling ensembles. Every ensemble draws `u_ij ~ U[-1, 1]` and
/// produces a term of operator norm exactly `|u_ij| dist(i,j)^{-α}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// `u Z⊗Z`.
    IsingZz,
    /// `u (X⊗X + Y⊗Y)/2`.
    Xy,
    /// Gaussian random Hermitian 4×4, rescaled to norm `|u|`.
    RandomTwoBody,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::IsingZz => "ising_zz",
            Ensemble::Xy => "xy",
            Ensemble::RandomTwoBody => "random_two_body",
        }
    }
}

impl std::fmt::Display for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ising_zz" => Ok(Ensemble::IsingZz),
            "xy" => Ok(Ensemble::Xy),
            "random_two_body" => Ok(Ensemble::RandomTwoBody),
            _ => Err(Error::UnknownSelector {
                kind: "ensemble",
                value: s.to_string(),
            }),
        }
    }
}

/// A two-site term `h_ij` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTerm {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    /// 4×4 Hermitian matrix in the `|b_i b_j⟩` basis.
    pub matrix: CMatrix,
}

impl CouplingTerm {
    pub fn norm(&self) -> f64 {
        hermitian_op_norm(&self.matrix)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawHamiltonian {
    lattice: Lattice,
    alpha: f64,
    ensemble: Ensemble,
    seed: u64,
    terms: Vec<CouplingTerm>,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl PowerLawHamiltonian {
    /// Sample a Hamiltonian with one term per unordered site pair.
    ///
    /// Terms are generated in lexicographic `(i, j)` order from a ChaCha8
    /// stream seeded with `seed`, so identical inputs give bit-identical
    /// couplings on every platform.
    pub fn sample(lattice: &Lattice, alpha: f64, ensemble: Ensemble, seed: u64) -> Result<Self> {
        let d = lattice.dimension() as f64;
        if !(alpha > d) || !alpha.is_finite() {
            return Err(Error::domain("alpha", alpha, format!("({d}, inf)")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = lattice.num_sites();
        let mut terms = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let distance = lattice.distance(i, j);
                let u: f64 = rng.random_range(-1.0..=1.0);
                let scale = u * distance.powf(-alpha);
                let shape = match ensemble {
                    Ensemble::IsingZz => kron(&Pauli::Z.matrix(), &Pauli::Z.matrix()),
                    Ensemble::Xy => {
                        (kron(&Pauli::X.matrix(), &Pauli::X.matrix())
                            + kron(&Pauli::Y.matrix(), &Pauli::Y.matrix()))
                            * Complex64::new(0.5, 0.0)
                    }
                    Ensemble::RandomTwoBody => random_unit_hermitian(&mut rng),
                };
                terms.push(CouplingTerm {
                    i,
                    j,
                    distance,
                    matrix: shape * Complex64::new(scale, 0.0),
                });
            }
        }
        Ok(PowerLawHamiltonian {
            lattice: lattice.clone(),
            alpha,
            ensemble,
            seed,
            terms,
        })
    }

    /// Build from explicit terms, validating Hermiticity and the norm cap.
    pub fn from_terms(
        lattice: &Lattice,
        alpha: f64,
        ensemble: Ensemble,
        seed: u64,
        terms: Vec<(usize, usize, CMatrix)>,
    ) -> Result<Self> {
        let n = lattice.num_sites();
        let mut out = Vec::with_capacity(terms.len());
        for (i, j, matrix) in terms {
            if i == j || i >= n || j >= n {
                return Err(Error::Precondition(format!("invalid site pair ({i}, {j})")));
            }
            if matrix.nrows() != 4 || matrix.ncols() != 4 {
                return Err(Error::DimensionMismatch {
                    expected: 4,
                    actual: matrix.nrows(),
                });
            }
            if !is_hermitian(&matrix, HERMITIAN_TOL) {
                return Err(Error::Precondition(format!("term ({i}, {j}) is not Hermitian")));
            }
            let distance = lattice.distance(i, j);
            let cap = distance.powf(-alpha);
            let norm = hermitian_op_norm(&matrix);
            if norm > cap * (1.0 + 1e-12) {
                return Err(Error::Precondition(format!(
                    "term ({i}, {j}) has norm {norm} above dist^-alpha = {cap}"
                )));
            }
            out.push(CouplingTerm {
                i,
                j,
                distance,
                matrix,
            });
        }
        Ok(PowerLawHamiltonian {
            lattice: lattice.clone(),
            alpha,
            ensemble,
            seed,
            terms: out,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn terms(&self) -> &[CouplingTerm] {
        &self.terms
    }

    pub fn num_qubits(&self) -> usize {
        self.lattice.num_sites()
    }

    /// Same Hamiltonian keeping only the terms accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&CouplingTerm) -> bool) -> Self {
        PowerLawHamiltonian {
            terms: self.terms.iter().filter(|t| keep(t)).cloned().collect(),
            ..self.clone()
        }
    }

    /// Terms with both endpoints within `radius` of `center`.
    pub fn restricted_to_ball(&self, center: usize, radius: f64) -> Self {
        let lattice = &self.lattice;
        self.filtered(|t| {
            lattice.distance(center, t.i) <= radius && lattice.distance(center, t.j) <= radius
        })
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn dense(&self) -> CMatrix {
        let n = self.num_qubits();
        let dim = 1usize << n;
        let mut h = DMatrix::from_element(dim, dim, ZERO);
        for t in &self.terms {
            h += embed_two_site(&t.matrix, t.i, t.j, n);
        }
        h
    }

    /// Split the terms into `V_1..V_{n+1}` by range, with `ℓ_k = L^k` for
    /// `k ≤ n` and `ℓ_{n+1} = r*`. Bucket `k` holds terms with
    /// `ℓ_{k-1} < dist ≤ ℓ_k` (with `ℓ_0 = 0`).
    pub fn range_buckets(&self, base: f64, levels: usize) -> Result<Vec<RangeBucket>> {
        if !(base > 1.0) {
            return Err(Error::domain("L", base, "(1, inf)"));
        }
        if levels == 0 {
            return Err(Error::Precondition("at least one level is required".into()));
        }
        let r_star = self.lattice.diameter();
        let mut edges: Vec<f64> = (1..=levels).map(|k| base.powi(k as i32)).collect();
        edges.push(r_star);
        let mut buckets: Vec<RangeBucket> = edges
            .iter()
            .enumerate()
            .map(|(k, &upper)| RangeBucket {
                lower: if k == 0 { 0.0 } else { edges[k - 1] },
                upper,
                terms: Vec::new(),
            })
            .collect();
        for (idx, t) in self.terms.iter().enumerate() {
            let k = edges[..levels]
                .iter()
                .position(|&edge| t.distance <= edge)
                .unwrap_or(levels);
            buckets[k].terms.push(idx);
        }
        Ok(buckets)
    }

    pub fn to_document(&self) -> HamiltonianDocument {
        HamiltonianDocument {
            d: self.lattice.dimension(),
            extents: self.lattice.extents().to_vec(),
            metric: self.lattice.metric(),
            alpha: self.alpha,
            ensemble: self.ensemble,
            seed: self.seed,
            terms: self
                .terms
                .iter()
                .map(|t| TermDocument {
                    i: t.i,
                    j: t.j,
                    matrix: (0..4)
                        .flat_map(|r| (0..4).map(move |c| (r, c)))
                        .map(|(r, c)| [t.matrix[(r, c)].re, t.matrix[(r, c)].im])
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &HamiltonianDocument) -> Result<Self> {
        let lattice = Lattice::new(doc.d, &doc.extents, doc.metric)?;
        let terms = doc
            .terms
            .iter()
            .map(|t| {
                if t.matrix.len() != 16 {
                    return Err(Error::DimensionMismatch {
                        expected: 16,
                        actual: t.matrix.len(),
                    });
                }
                let m = CMatrix::from_row_iterator(
                    4,
                    4,
                    t.matrix.iter().map(|p| Complex64::new(p[0], p[1])),
                );
                Ok((t.i, t.j, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(&lattice, doc.alpha, doc.ensemble, doc.seed, terms)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: HamiltonianDocument = serde_json::from_str(s)?;
        Self::from_document(&doc)
    }
}

/// Terms of one interaction-range bucket, as indices into
/// [`PowerLawHamiltonian::terms`].
#[derive(Debug, Clone, PartialEq)]
pub struct RangeBucket {
    pub lower: f64,
    pub upper: f64,
    pub terms: Vec<usize>,
}

/// JSON form of a Hamiltonian. Matrices are row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianDocument {
    pub d: usize,
    pub extents: Vec<usize>,
    pub metric: Metric,
    pub alpha: f64,
    pub ensemble: Ensemble,
    pub seed: u64,
    pub terms: Vec<TermDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub i: usize,
    pub j: usize,
    pub matrix: Vec<[f64; 2]>,
}

fn random_unit_hermitian(rng: &mut ChaCha8Rng) -> CMatrix {
    let mut g = CMatrix::zeros(4, 4);
    for r in 0..4 {
        for c in 0..4 {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(r, c)] = Complex64::new(re, im);
        }
    }
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let norm = hermitian_op_norm(&h);
    let mut out = h / Complex64::new(norm, 0.0);
    // Exact Hermiticity after the division.
    for r in 0..4 {
        out[(r, r)].im = 0.0;
        for c in (r + 1)..4 {
            out[(c, r)] = out[(r, c)].conj();
        }
    }
    out
}
