//! Exact Heisenberg-picture evolution and the spreading functionals that the
//! bounds control.
//!
//! Evolution uses the full eigendecomposition of `H`, so results are exact up
//! to floating point. The Hilbert space is capped at [`MAX_QUBITS`].

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::PowerLawHamiltonian;
use crate::lattice::Lattice;
use crate::linalg::{
    embed_one_site, fast_op_norm, hermitian_eigen, is_hermitian, matmul, qubits_for_dim, site_mask, CMatrix, I, ZERO,
};
use crate::pauli::{reach_table, region_mask, restrict_to_region, Pauli, PauliCoefficients};

pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    Operator,
    /// `sqrt(Tr(O†O)/2^n)`.
    Frobenius,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            NormKind::Operator => "operator",
            NormKind::Frobenius => "frobenius",
        }
    }
}

/// Spectral data of a fixed Hamiltonian.
#[derive(Debug, Clone)]
pub struct EvolutionContext {
    n: usize,
    energies: DVector<f64>,
    vectors: CMatrix,
}

impl EvolutionContext {
    pub fn new(h: &PowerLawHamiltonian) -> Result<Self> {
        guard(h.num_qubits())?;
        Self::from_matrix(&h.dense())
    }

    /// Context for an arbitrary Hermitian matrix on `n` qubits.
    pub fn from_matrix(h: &CMatrix) -> Result<Self> {
        let n = qubits_for_dim(h.nrows()).ok_or(Error::DimensionMismatch {
            expected: h.nrows().next_power_of_two(),
            actual: h.nrows(),
        })?;
        guard(n)?;
        if !is_hermitian(h, 1e-10) {
            return Err(Error::Precondition("Hamiltonian is not Hermitian".into()));
        }
        let (energies, vectors) = hermitian_eigen(h);
        Ok(EvolutionContext {
            n,
            energies: DVector::from_vec(energies),
            vectors,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `e^{-iHt}`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let phases = self.energies.map(|e| Complex64::from_polar(1.0, -e * t));
        let scaled = CMatrix::from_fn(self.dim(), self.dim(), |r, c| self.vectors[(r, c)] * phases[c]);
        matmul(&scaled, &self.vectors.adjoint())
    }

    /// Prepare `O` for repeated evolution; see [`HeisenbergOperator`].
    pub fn heisenberg(&self, op: &CMatrix) -> Result<HeisenbergOperator<'_>> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: op.nrows(),
            });
        }
        Ok(HeisenbergOperator {
            ctx: self,
            eigenbasis: matmul(&matmul(&self.vectors.adjoint(), op), &self.vectors),
            original: op.clone(),
        })
    }

    /// `O(t) = e^{iHt} O e^{-iHt}`.
    pub fn evolve(&self, op: &CMatrix, t: f64) -> Result<CMatrix> {
        Ok(self.heisenberg(op)?.at(t))
    }
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooLarge {
            qubits: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// An operator cached in the energy eigenbasis, so each time point costs two
/// matrix products.
#[derive(Debug, Clone)]
pub struct HeisenbergOperator<'a> {
    ctx: &'a EvolutionContext,
    eigenbasis: CMatrix,
    original: CMatrix,
}

impl HeisenbergOperator<'_> {
    pub fn at(&self, t: f64) -> CMatrix {
        if t == 0.0 {
            return self.original.clone();
        }
        let e = &self.ctx.energies;
        let rotated = CMatrix::from_fn(self.ctx.dim(), self.ctx.dim(), |a, b| {
            self.eigenbasis[(a, b)] * Complex64::from_polar(1.0, (e[a] - e[b]) * t)
        });
        matmul(&matmul(&self.ctx.vectors, &rotated), &self.ctx.vectors.adjoint())
    }
}

/// Norm of `op` in the requested flavour.
pub fn norm_of(op: &CMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Operator => fast_op_norm(op),
        NormKind::Frobenius => {
            let total: f64 = op.iter().map(|z| z.norm_sqr()).sum();
            (total / op.nrows() as f64).sqrt()
        }
    }
}

/// `‖P_r O‖` for every `r` in `radii`, from one Pauli transform of `O`.
pub fn leakage_profile(
    op: &CMatrix,
    lattice: &Lattice,
    center: usize,
    radii: &[f64],
    kind: NormKind,
) -> Result<Vec<f64>> {
    let coeffs = PauliCoefficients::from_matrix(op)?;
    if coeffs.num_qubits() != lattice.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: 1 << lattice.num_sites(),
            actual: op.nrows(),
        });
    }
    let table = reach_table(lattice, center);
    radii
        .iter()
        .map(|&r| {
            let mut kept = coeffs.clone();
            kept.retain_support(|mask| if mask == 0 { r <= 0.0 } else { table[mask] >= r });
            Ok(match kind {
                NormKind::Frobenius => kept.norm_sqr_sum().sqrt(),
                NormKind::Operator => {
                    if kept.norm_sqr_sum() == 0.0 {
                        0.0
                    } else {
                        fast_op_norm(&kept.into_matrix())
                    }
                }
            })
        })
        .collect()
}

/// `‖P_r e^{ℒt} O‖` for `O` initially at `center`.
pub fn leakage(
    ctx: &EvolutionContext,
    op: &CMatrix,
    lattice: &Lattice,
    center: usize,
    r: f64,
    t: f64,
    kind: NormKind,
) -> Result<f64> {
    let evolved = ctx.evolve(op, t)?;
    Ok(leakage_profile(&evolved, lattice, center, &[r], kind)?[0])
}

/// One measured point of `‖P_r O(t)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakagePoint {
    pub r: f64,
    pub t: f64,
    pub leakage: f64,
    pub norm_kind: NormKind,
}

/// Leakage of an operator initially at `center`, sampled on an `(r, t)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageCurve {
    pub center: usize,
    pub points: Vec<LeakagePoint>,
}

impl LeakageCurve {
    /// Points at radius `r`, in time order.
    pub fn at_radius(&self, r: f64) -> Vec<LeakagePoint> {
        let mut pts: Vec<LeakagePoint> = self.points.iter().copied().filter(|p| p.r == r).collect();
        pts.sort_by(|a, b| a.t.total_cmp(&b.t));
        pts
    }

    pub fn radii(&self) -> Vec<f64> {
        let mut rs: Vec<f64> = self.points.iter().map(|p| p.r).collect();
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        rs
    }

    pub fn times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.points.iter().map(|p| p.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

/// Sample [`leakage`] over `radii × times`, points ordered by `(t, r)`.
pub fn leakage_curve(
    ctx: &EvolutionContext,
    op: &CMatrix,
    lattice: &Lattice,
    center: usize,
    radii: &[f64],
    times: &[f64],
    kind: NormKind,
) -> Result<LeakageCurve> {
    let h = ctx.heisenberg(op)?;
    let mut points = Vec::with_capacity(radii.len() * times.len());
    for &t in times {
        let values = leakage_profile(&h.at(t), lattice, center, radii, kind)?;
        points.extend(radii.iter().zip(values).map(|(&r, leakage)| LeakagePoint {
            r,
            t,
            leakage,
            norm_kind: kind,
        }));
    }
    Ok(LeakageCurve { center, points })
}

/// `‖[A, O(t)]‖`.
pub fn commutator_norm(ctx: &EvolutionContext, op: &CMatrix, a: &CMatrix, t: f64) -> Result<f64> {
    let evolved = ctx.evolve(op, t)?;
    Ok(fast_op_norm(&(a * &evolved - &evolved * a)))
}

/// `[P_site, M]` without forming the embedded Pauli.
pub fn pauli_commutator(p: Pauli, site: usize, n: usize, m: &CMatrix) -> CMatrix {
    let mask = site_mask(site, n);
    let dim = 1usize << n;
    // P|b> = phase(b) |b ^ flip>.
    let (flip, phase): (usize, fn(bool) -> Complex64) = match p {
        Pauli::X => (mask, |_| Complex64::new(1.0, 0.0)),
        Pauli::Y => (mask, |bit| if bit { -I } else { I }),
        Pauli::Z => (0, |bit| if bit { Complex64::new(-1.0, 0.0) } else { Complex64::new(1.0, 0.0) }),
    };
    CMatrix::from_fn(dim, dim, |row, col| {
        // (P M)[row, col] = <row|P|row^flip> M[row^flip, col];  <row|P|k> = phase(k)
        let k = row ^ flip;
        let left = phase(k & mask != 0) * m[(k, col)];
        // (M P)[row, col] = M[row, col^flip] <col^flip|P|col> = M[.., col^flip] phase(col)
        let right = m[(row, col ^ flip)] * phase(col & mask != 0);
        left - right
    })
}

/// Result of the restricted supremum over exterior single-site Paulis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    pub witness: Option<(usize, Pauli)>,
    /// Set when no site lies at distance `≥ r`; `value` is then 0.
    pub no_exterior_sites: bool,
}

/// Lower bound on `sup_A ‖[A, O(t)]‖` over unit-norm `A` supported at
/// distance `≥ r` from `center`, taken over single-site Paulis only.
pub fn sup_commutator_estimate(
    ctx: &EvolutionContext,
    op: &CMatrix,
    lattice: &Lattice,
    center: usize,
    r: f64,
    t: f64,
) -> Result<SupEstimate> {
    let evolved = ctx.evolve(op, t)?;
    Ok(sup_commutator_of(&evolved, lattice, center, r))
}

pub fn sup_commutator_of(evolved: &CMatrix, lattice: &Lattice, center: usize, r: f64) -> SupEstimate {
    let n = lattice.num_sites();
    let mut best = SupEstimate {
        value: 0.0,
        witness: None,
        no_exterior_sites: true,
    };
    for site in (0..n).filter(|&j| lattice.distance(center, j) >= r) {
        best.no_exterior_sites = false;
        for p in Pauli::ALL {
            let v = fast_op_norm(&pauli_commutator(p, site, n, evolved));
            if best.witness.is_none() || v > best.value {
                best.value = v;
                best.witness = Some((site, p));
            }
        }
    }
    if best.no_exterior_sites {
        log::warn!("no sites at distance >= {r} from site {center}; restricted sup is 0");
    }
    best
}

/// Per-site single-qubit states.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductStateSpec {
    /// `|0…0⟩`.
    #[default]
    Zero,
    /// Computational basis state written as a bit string, site 0 first.
    Basis(String),
    /// Independent Haar-random qubit on every site.
    Haar(u64),
}

impl ProductStateSpec {
    pub fn build(&self, n: usize) -> Result<DVector<Complex64>> {
        let mut sites: Vec<[Complex64; 2]> = Vec::with_capacity(n);
        match self {
            ProductStateSpec::Zero => sites.resize(n, [Complex64::new(1.0, 0.0), ZERO]),
            ProductStateSpec::Basis(bits) => {
                if bits.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: bits.len(),
                    });
                }
                for ch in bits.chars() {
                    sites.push(match ch {
                        '0' => [Complex64::new(1.0, 0.0), ZERO],
                        '1' => [ZERO, Complex64::new(1.0, 0.0)],
                        _ => {
                            return Err(Error::Config(format!("basis state `{bits}` must contain only 0/1")))
                        }
                    });
                }
            }
            ProductStateSpec::Haar(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for _ in 0..n {
                    let mut v = [ZERO; 2];
                    for z in &mut v {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        *z = Complex64::new(re, im);
                    }
                    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
                    sites.push([v[0] / norm, v[1] / norm]);
                }
            }
        }
        let dim = 1usize << n;
        Ok(DVector::from_fn(dim, |index, _| {
            (0..n).fold(Complex64::new(1.0, 0.0), |acc, site| {
                acc * sites[site][(index & site_mask(site, n) != 0) as usize]
            })
        }))
    }
}

/// Two disjoint regions around `x` and `y` used by the correlator bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorRegions {
    pub x: usize,
    pub y: usize,
    pub r: f64,
    pub region_x: usize,
    pub region_y: usize,
}

impl CorrelatorRegions {
    /// Balls of radius `r/2` with `r = dist(x, y)`: closed balls when they are
    /// disjoint, open balls otherwise (ties at exactly `r/2` are dropped).
    pub fn new(lattice: &Lattice, x: usize, y: usize) -> Result<Self> {
        if x == y {
            return Err(Error::Precondition("correlator sites must differ".into()));
        }
        let n = lattice.num_sites();
        let r = lattice.distance(x, y);
        let half = r / 2.0;
        let closed = |c: usize| region_mask(lattice.ball(c, half), n);
        let (mut rx, mut ry) = (closed(x), closed(y));
        if rx & ry != 0 {
            let open = |c: usize| {
                region_mask((0..n).filter(|&j| lattice.distance(c, j) < half), n)
            };
            rx = open(x);
            ry = open(y);
        }
        Ok(CorrelatorRegions {
            x,
            y,
            r,
            region_x: rx,
            region_y: ry,
        })
    }
}

/// Check that `psi` factorizes across `region` and its complement; returns the
/// second Schmidt coefficient.
pub fn schmidt_gap(psi: &DVector<Complex64>, region: usize, n: usize) -> f64 {
    let inside: Vec<usize> = (0..n).map(|s| site_mask(s, n)).filter(|m| region & m != 0).collect();
    let outside: Vec<usize> = (0..n).map(|s| site_mask(s, n)).filter(|m| region & m == 0).collect();
    let compose = |bits: usize, masks: &[usize]| {
        masks
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &m)| if bits >> k & 1 == 1 { acc | m } else { acc })
    };
    let rows = 1usize << inside.len();
    let cols = 1usize << outside.len();
    let m = CMatrix::from_fn(rows, cols, |a, b| psi[compose(a, &inside) | compose(b, &outside)]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.get(1).copied().unwrap_or(0.0)
}

pub const PRODUCT_TOL: f64 = 1e-8;

fn expectation(psi: &DVector<Complex64>, op: &CMatrix) -> Complex64 {
    (psi.adjoint() * op * psi)[(0, 0)]
}

/// `⟨A(t)B(t)⟩ − ⟨A(t)⟩⟨B(t)⟩` in the state `psi`, which must be normalized
/// and a product across `regions.region_x` and its complement.
pub fn connected_correlator(
    ctx: &EvolutionContext,
    a: &CMatrix,
    b: &CMatrix,
    psi: &DVector<Complex64>,
    regions: &CorrelatorRegions,
    t: f64,
) -> Result<Complex64> {
    let a_t = ctx.evolve(a, t)?;
    let b_t = ctx.evolve(b, t)?;
    correlator_of(&a_t, &b_t, psi, regions, ctx.num_qubits())
}

fn correlator_of(
    a_t: &CMatrix,
    b_t: &CMatrix,
    psi: &DVector<Complex64>,
    regions: &CorrelatorRegions,
    n: usize,
) -> Result<Complex64> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let gap = schmidt_gap(psi, regions.region_x, n);
    if gap > PRODUCT_TOL {
        return Err(Error::NotProduct(gap));
    }
    Ok(expectation(psi, &(a_t * b_t)) - expectation(psi, a_t) * expectation(psi, b_t))
}

/// Both sides of `|C(r,t)| ≤ 2‖A(t) − Ã(t)‖ + 2‖B(t) − B̃(t)‖`, where `Ã` keeps
/// the Pauli strings of `A(t)` supported in the ball around `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorChain {
    pub correlator: Complex64,
    pub restriction_error_a: f64,
    pub restriction_error_b: f64,
}

impl CorrelatorChain {
    pub fn rhs(&self) -> f64 {
        2.0 * self.restriction_error_a + 2.0 * self.restriction_error_b
    }
}

pub fn correlator_chain(
    ctx: &EvolutionContext,
    a: &CMatrix,
    b: &CMatrix,
    psi: &DVector<Complex64>,
    regions: &CorrelatorRegions,
    t: f64,
) -> Result<CorrelatorChain> {
    let a_t = ctx.evolve(a, t)?;
    let b_t = ctx.evolve(b, t)?;
    let correlator = correlator_of(&a_t, &b_t, psi, regions, ctx.num_qubits())?;
    let err_a = fast_op_norm(&(&a_t - restrict_to_region(&a_t, regions.region_x)?));
    let err_b = fast_op_norm(&(&b_t - restrict_to_region(&b_t, regions.region_y)?));
    Ok(CorrelatorChain {
        correlator,
        restriction_error_a: err_a,
        restriction_error_b: err_b,
    })
}

/// `‖A(t) − Ã(t)‖` where `Ã` evolves under the terms of `h` supported inside
/// the ball of radius `r` around `x`.
pub fn truncation_error(h: &PowerLawHamiltonian, a: &CMatrix, x: usize, r: f64, t: f64) -> Result<f64> {
    Ok(truncation_errors(h, a, x, &[r], &[t])?[0][0])
}

/// Truncation errors on an `r × t` grid; `a` is the local 2×2 observable at `x`.
pub fn truncation_errors(
    h: &PowerLawHamiltonian,
    a: &CMatrix,
    x: usize,
    radii: &[f64],
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let n = h.num_qubits();
    let op = embed_local(a, x, n)?;
    let full = EvolutionContext::new(h)?;
    let full_op = full.heisenberg(&op)?;
    let full_t: Vec<CMatrix> = times.iter().map(|&t| full_op.at(t)).collect();
    radii
        .iter()
        .map(|&r| {
            let restricted = h.restricted_to_ball(x, r);
            if restricted.terms().len() == h.terms().len() {
                return Ok(vec![0.0; times.len()]);
            }
            let ctx = EvolutionContext::new(&restricted)?;
            let trunc = ctx.heisenberg(&op)?;
            Ok(times
                .iter()
                .zip(&full_t)
                .map(|(&t, ft)| if t == 0.0 { 0.0 } else { fast_op_norm(&(ft - trunc.at(t))) })
                .collect())
        })
        .collect()
}

/// Embed a 2×2 operator at `site`, or pass through a full-space operator.
pub fn embed_local(a: &CMatrix, site: usize, n: usize) -> Result<CMatrix> {
    let dim = 1usize << n;
    match a.nrows() {
        2 if a.ncols() == 2 => Ok(embed_one_site(a, site, n)),
        d if d == dim && a.ncols() == dim => Ok(a.clone()),
        d => Err(Error::DimensionMismatch { expected: dim, actual: d }),
    }
}
