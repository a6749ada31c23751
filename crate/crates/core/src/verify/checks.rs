//! Measurements for one `(α, seed)` realization and the report sections
//! assembled from them.

use super::config::{CheckName, ResolvedSweep, SweepConfig};
use super::fit::{fit_front, fit_tail, ols};
use super::report::{CheckRecord, FittedConstant, FittedExponent, Section};
use crate::bounds::{compare_bounds, light_cone_exponent, theorem_envelope, theorem_epsilon_limit, EnvelopeConstants};
use crate::dynamics::{
    correlator_chain, leakage_profile, pauli_commutator, truncation_errors, CorrelatorChain, CorrelatorRegions,
    EvolutionContext, LeakageCurve, LeakagePoint, NormKind,
};
use crate::error::Result;
use crate::grid::refine;
use crate::hamiltonian::{Ensemble, PowerLawHamiltonian};
use crate::linalg::{embed_one_site, fast_op_norm};
use crate::pauli::Pauli;

/// Everything measured for one realization.
#[derive(Debug, Clone)]
pub struct UnitData {
    pub alpha: f64,
    pub seed: u64,
    /// Evaluation times: the sweep grid, refined when dominance is enabled.
    pub times: Vec<f64>,
    /// Whether `times[k]` belongs to the original grid.
    pub on_grid: Vec<bool>,
    /// `[t][r]` leakage in the configured norm.
    pub leakage: Vec<Vec<f64>>,
    /// `[t][r]` leakage in operator norm.
    pub leakage_op: Vec<Vec<f64>>,
    /// `[t][r]` largest `‖[A, O(t)]‖` over exterior single-site Paulis.
    pub sup: Vec<Vec<f64>>,
    /// `[t][r]` number of exterior Paulis tested.
    pub sup_count: Vec<Vec<usize>>,
    /// `J` of a 2-site Ising model, when the closed form applies.
    pub ising_coupling: Option<f64>,
    pub truncation_radii: Vec<f64>,
    /// `[r][t]` over `truncation_radii × truncation_times`.
    pub truncation: Vec<Vec<f64>>,
    /// `(pair index, t index, chain)`.
    pub correlators: Vec<(usize, usize, CorrelatorChain)>,
}

fn needs_dynamics(cfg: &SweepConfig) -> bool {
    [
        CheckName::ClosedForm,
        CheckName::Sandwich,
        CheckName::Dominance,
        CheckName::FrontFit,
        CheckName::TailFit,
    ]
    .into_iter()
    .any(|c| cfg.enabled(c))
}

pub fn measure_unit(cfg: &SweepConfig, sweep: &ResolvedSweep, alpha: f64, seed: u64) -> Result<UnitData> {
    let lattice = &sweep.lattice;
    let n = lattice.num_sites();
    let h = PowerLawHamiltonian::sample(lattice, alpha, cfg.ensemble, seed)?;
    let observable = cfg.observable.matrix();
    let op = embed_one_site(&observable, cfg.center, n);

    let times = if cfg.enabled(CheckName::Dominance) {
        refine(&sweep.times)
    } else {
        sweep.times.clone()
    };
    let on_grid: Vec<bool> = times.iter().map(|t| sweep.times.contains(t)).collect();

    let mut data = UnitData {
        alpha,
        seed,
        times: Vec::new(),
        on_grid: Vec::new(),
        leakage: Vec::new(),
        leakage_op: Vec::new(),
        sup: Vec::new(),
        sup_count: Vec::new(),
        ising_coupling: None,
        truncation_radii: Vec::new(),
        truncation: Vec::new(),
        correlators: Vec::new(),
    };

    if n == 2 && cfg.ensemble == Ensemble::IsingZz {
        data.ising_coupling = h.terms().first().map(|t| t.matrix[(0, 0)].re);
    }

    let needs_sup = cfg.enabled(CheckName::Sandwich) || cfg.enabled(CheckName::ClosedForm);
    if needs_dynamics(cfg) {
        let ctx = EvolutionContext::new(&h)?;
        let heis = ctx.heisenberg(&op)?;
        let distances: Vec<f64> = (0..n).map(|j| lattice.distance(cfg.center, j)).collect();
        for &t in &times {
            let ot = heis.at(t);
            let op_leak = leakage_profile(&ot, lattice, cfg.center, &sweep.radii, NormKind::Operator)?;
            let leak = match cfg.norm {
                NormKind::Operator => op_leak.clone(),
                kind => leakage_profile(&ot, lattice, cfg.center, &sweep.radii, kind)?,
            };
            let (sup, count) = if needs_sup {
                let site_max: Vec<f64> = (0..n)
                    .map(|j| {
                        Pauli::ALL
                            .iter()
                            .map(|&p| fast_op_norm(&pauli_commutator(p, j, n, &ot)))
                            .fold(0.0, f64::max)
                    })
                    .collect();
                sweep
                    .radii
                    .iter()
                    .map(|&r| {
                        let exterior = (0..n).filter(|&j| distances[j] >= r);
                        exterior.fold((0.0f64, 0usize), |(m, c), j| (m.max(site_max[j]), c + 3))
                    })
                    .unzip()
            } else {
                (vec![0.0; sweep.radii.len()], vec![0; sweep.radii.len()])
            };
            data.leakage.push(leak);
            data.leakage_op.push(op_leak);
            data.sup.push(sup);
            data.sup_count.push(count);
        }
        data.times = times;
        data.on_grid = on_grid;
    }

    if cfg.enabled(CheckName::Truncation) {
        let r_star = (0..n).map(|j| lattice.distance(cfg.center, j)).fold(0.0, f64::max);
        let mut radii: Vec<f64> = sweep.radii.iter().copied().filter(|&r| r > 0.0 && r < r_star).collect();
        radii.push(r_star);
        data.truncation = truncation_errors(&h, &observable, cfg.center, &radii, &sweep.truncation_times)?;
        data.truncation_radii = radii;
    }

    if cfg.enabled(CheckName::Correlator) {
        let ctx = EvolutionContext::new(&h)?;
        let psi = cfg.correlator.state.build(n)?;
        for (pi, &(x, y)) in sweep.correlator_pairs.iter().enumerate() {
            let regions = CorrelatorRegions::new(lattice, x, y)?;
            let a = embed_one_site(&observable, x, n);
            let b = embed_one_site(&observable, y, n);
            for (ti, &t) in sweep.correlator_times.iter().enumerate() {
                data.correlators.push((pi, ti, correlator_chain(&ctx, &a, &b, &psi, &regions, t)?));
            }
        }
    }
    Ok(data)
}

/// Worst-point accumulator for `lhs ≤ rhs + tol` comparisons.
struct Tally {
    points: usize,
    failures: usize,
    worst: Option<(f64, f64, f64, String)>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            points: 0,
            failures: 0,
            worst: None,
        }
    }

    /// `excess` is the amount by which the relation is violated before slack.
    fn add(&mut self, lhs: f64, rhs: f64, excess: f64, tol: f64, at: impl FnOnce() -> String) {
        self.points += 1;
        if !(excess <= tol) {
            self.failures += 1;
        }
        let worse = match &self.worst {
            None => true,
            Some((_, _, e, _)) => excess > *e || excess.is_nan(),
        };
        if worse {
            self.worst = Some((lhs, rhs, excess, at()));
        }
    }

    fn record(self, name: String, tol: f64) -> CheckRecord {
        let (measured, reference, detail) = match self.worst {
            Some((l, r, _, at)) => (l, r, Some(at)),
            None => (0.0, 0.0, Some("no grid points".to_string())),
        };
        CheckRecord {
            name,
            passed: self.failures == 0,
            measured,
            reference,
            tolerance: tol,
            points: self.points,
            failures: self.failures,
            detail,
        }
    }
}

fn unit_label(u: &UnitData) -> String {
    format!("alpha={} seed={}", u.alpha, u.seed)
}

pub fn closed_form_section(cfg: &SweepConfig, sweep: &ResolvedSweep, units: &[UnitData]) -> Section {
    let mut section = Section::new(CheckName::ClosedForm.name(), true);
    let tol = cfg.tolerances.closed_form;
    let bond = if sweep.lattice.num_sites() == 2 {
        sweep.lattice.distance(0, 1)
    } else {
        0.0
    };
    for u in units {
        let Some(j) = u.ising_coupling else {
            section.notes.push(format!("{}: not a 2-site ising_zz model; skipped", unit_label(u)));
            continue;
        };
        let mut leak = Tally::new();
        let mut comm = Tally::new();
        for (ti, &t) in u.times.iter().enumerate() {
            let s = match cfg.observable {
                Pauli::Z => 0.0,
                _ => (2.0 * j * t).sin().abs(),
            };
            for (ri, &r) in sweep.radii.iter().enumerate() {
                if r <= 0.0 {
                    continue;
                }
                let expected = if r <= bond { s } else { 0.0 };
                let got = u.leakage_op[ti][ri];
                leak.add(got, expected, (got - expected).abs(), tol, || format!("r={r} t={t}"));
                let got = u.sup[ti][ri];
                comm.add(got, 2.0 * expected, (got - 2.0 * expected).abs(), tol, || format!("r={r} t={t}"));
            }
        }
        section.push(leak.record(format!("leakage = |sin 2Jt| ({}, J={j})", unit_label(u)), tol));
        section.push(comm.record(format!("commutator = 2|sin 2Jt| ({}, J={j})", unit_label(u)), tol));
    }
    section
}

pub fn sandwich_section(cfg: &SweepConfig, sweep: &ResolvedSweep, units: &[UnitData]) -> Section {
    let mut section = Section::new(CheckName::Sandwich.name(), true);
    let tol = cfg.tolerances.sandwich;
    let mut min_ratio = f64::INFINITY;
    let mut below_half = 0usize;
    for u in units {
        let mut tally = Tally::new();
        let mut checked = 0usize;
        for (ti, &t) in u.times.iter().enumerate() {
            for (ri, &r) in sweep.radii.iter().enumerate() {
                if u.sup_count[ti][ri] == 0 {
                    continue;
                }
                checked += u.sup_count[ti][ri];
                let lhs = u.sup[ti][ri];
                let rhs = 2.0 * u.leakage_op[ti][ri];
                tally.add(lhs, rhs, lhs - rhs, tol, || format!("r={r} t={t}"));
                if lhs > 0.0 {
                    let ratio = u.leakage_op[ti][ri] / lhs;
                    min_ratio = min_ratio.min(ratio);
                    if ratio < 0.5 {
                        below_half += 1;
                    }
                }
            }
        }
        let mut rec = tally.record(format!("||[A,O(t)]|| <= 2||P_r O(t)|| ({})", unit_label(u)), tol);
        rec.detail = Some(format!("{}; {checked} Pauli commutators", rec.detail.unwrap_or_default()));
        section.push(rec);
    }
    section.notes.push(format!(
        "lower arm (reported only): min ||P_r O|| / max_A ||[A,O]|| = {min_ratio}; points below 1/2: {below_half}"
    ));
    section
}

pub fn dominance_section(
    cfg: &SweepConfig,
    sweep: &ResolvedSweep,
    units: &[UnitData],
    constants: &mut Vec<FittedConstant>,
) -> Section {
    let mut section = Section::new(CheckName::Dominance.name(), true);
    let dom = cfg.dominance;
    let d = sweep.lattice.dimension();
    let consts = EnvelopeConstants {
        c1: 1.0,
        c2: 1.0,
        c: dom.window,
    };
    let mut evaluated = 0usize;
    for u in units {
        let label = unit_label(u);
        let dd = d as f64;
        if !(u.alpha > 2.0 * dd && u.alpha < 2.0 * dd + 1.0) {
            section.notes.push(format!("{label}: alpha outside (2d, 2d+1); envelope undefined, skipped"));
            continue;
        }
        let limit = theorem_epsilon_limit(u.alpha, d);
        if !(dom.theorem_epsilon > 0.0 && dom.theorem_epsilon < limit) {
            section.notes.push(format!(
                "{label}: theorem_epsilon = {} outside (0, {limit}); envelope undefined, skipped",
                dom.theorem_epsilon
            ));
            continue;
        }
        evaluated += 1;
        let mut c_grid = 0.0f64;
        let mut c_all = 0.0f64;
        let mut n_grid = 0usize;
        let mut n_all = 0usize;
        let mut error = None;
        for (ti, &t) in u.times.iter().enumerate() {
            for (ri, &r) in sweep.radii.iter().enumerate() {
                if !(r > 0.0 && t > 0.0) {
                    continue;
                }
                let point = match theorem_envelope(r, t, u.alpha, d, dom.theorem_epsilon, consts) {
                    Ok(p) => p,
                    Err(e) => {
                        error = Some(e.to_string());
                        continue;
                    }
                };
                if !point.valid {
                    continue;
                }
                let ratio = u.leakage[ti][ri] / point.value;
                c_all = c_all.max(ratio);
                n_all += 1;
                if u.on_grid[ti] {
                    c_grid = c_grid.max(ratio);
                    n_grid += 1;
                }
            }
        }
        if let Some(e) = error {
            section.fail(format!("C_fit ({label})"), e);
            continue;
        }
        if n_grid == 0 {
            section.fail(format!("C_fit ({label})"), "empty valid region".into());
            continue;
        }
        let drift = if c_grid > 0.0 {
            (c_all - c_grid).abs() / c_grid
        } else if c_all == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        section.push(CheckRecord {
            name: format!("C_fit <= cap ({label})"),
            passed: c_grid.is_finite() && c_all.is_finite() && c_grid <= dom.cap && c_all <= dom.cap,
            measured: c_grid,
            reference: dom.cap,
            tolerance: 0.0,
            points: n_grid,
            failures: usize::from(!(c_grid <= dom.cap && c_all <= dom.cap)),
            detail: Some(format!("refined grid: C_fit = {c_all} over {n_all} points")),
        });
        section.push(CheckRecord {
            name: format!("C_fit stable under t refinement ({label})"),
            passed: drift <= dom.stability,
            measured: drift,
            reference: 0.0,
            tolerance: dom.stability,
            points: n_all,
            failures: usize::from(!(drift <= dom.stability)),
            detail: Some(format!("C_fit grid = {c_grid}, refined = {c_all}")),
        });
        constants.push(FittedConstant {
            label: "C_fit".into(),
            alpha: u.alpha,
            seed: Some(u.seed),
            value: c_all,
        });
    }
    if evaluated == 0 && !units.is_empty() {
        section.fail("C_fit".into(), "no realization has alpha and theorem_epsilon inside the envelope domain".into());
    }
    let mut alphas: Vec<f64> = constants.iter().filter(|c| c.label == "C_fit").map(|c| c.alpha).collect();
    alphas.dedup();
    for a in alphas {
        let worst = constants
            .iter()
            .filter(|c| c.label == "C_fit" && c.alpha == a)
            .map(|c| c.value)
            .fold(0.0, f64::max);
        constants.push(FittedConstant {
            label: "C_fit (max over seeds)".into(),
            alpha: a,
            seed: None,
            value: worst,
        });
    }
    section
}

/// Leakage on the original t grid as a curve.
pub fn grid_curve(cfg: &SweepConfig, sweep: &ResolvedSweep, u: &UnitData) -> LeakageCurve {
    let mut points = Vec::new();
    for (ti, &t) in u.times.iter().enumerate() {
        if !u.on_grid[ti] {
            continue;
        }
        for (ri, &r) in sweep.radii.iter().enumerate() {
            points.push(LeakagePoint {
                r,
                t,
                leakage: u.leakage[ti][ri],
                norm_kind: cfg.norm,
            });
        }
    }
    LeakageCurve {
        center: cfg.center,
        points,
    }
}

fn thresholds(cfg: &SweepConfig) -> Vec<f64> {
    let mut all: Vec<f64> = std::iter::once(cfg.theta).chain(cfg.theta_sensitivity.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

pub fn front_section(
    cfg: &SweepConfig,
    sweep: &ResolvedSweep,
    units: &[UnitData],
    exponents: &mut Vec<FittedExponent>,
) -> Section {
    let mut section = Section::new(CheckName::FrontFit.name(), false);
    let d = sweep.lattice.dimension();
    for u in units {
        let curve = grid_curve(cfg, sweep, u);
        let reference = light_cone_exponent(u.alpha, d).ok().and_then(|c| c.exponent());
        for theta in thresholds(cfg) {
            match fit_front(&curve, theta) {
                Ok(front) => {
                    section.push(CheckRecord {
                        name: format!("front slope theta={theta} ({})", unit_label(u)),
                        passed: true,
                        measured: front.fit.slope,
                        reference: reference.unwrap_or(f64::NAN),
                        tolerance: front.fit.slope_stderr,
                        points: front.fit.points,
                        failures: 0,
                        detail: (!front.excluded.is_empty())
                            .then(|| format!("radii without a crossing: {:?}", front.excluded)),
                    });
                    exponents.push(FittedExponent {
                        label: format!("front theta={theta}"),
                        alpha: u.alpha,
                        seed: u.seed,
                        fit: front.fit,
                        reference,
                    });
                }
                Err(e) => section.notes.push(format!("{} theta={theta}: {e}", unit_label(u))),
            }
        }
    }
    section
}

pub fn tail_section(
    cfg: &SweepConfig,
    sweep: &ResolvedSweep,
    units: &[UnitData],
    exponents: &mut Vec<FittedExponent>,
) -> Section {
    let mut section = Section::new(CheckName::TailFit.name(), false);
    let d = sweep.lattice.dimension() as f64;
    let t = *sweep.times.last().expect("grid is nonempty");
    for u in units {
        let curve = grid_curve(cfg, sweep, u);
        let reference = -(u.alpha - d);
        match fit_tail(&curve, t) {
            Ok(fit) => {
                section.push(CheckRecord {
                    name: format!("tail slope t={t} ({})", unit_label(u)),
                    passed: true,
                    measured: fit.slope,
                    reference,
                    tolerance: fit.slope_stderr,
                    points: fit.points,
                    failures: 0,
                    detail: None,
                });
                exponents.push(FittedExponent {
                    label: format!("tail t={t}"),
                    alpha: u.alpha,
                    seed: u.seed,
                    fit,
                    reference: Some(reference),
                });
            }
            Err(e) => section.notes.push(format!("{}: {e}", unit_label(u))),
        }
    }
    section
}

pub fn truncation_section(
    cfg: &SweepConfig,
    sweep: &ResolvedSweep,
    units: &[UnitData],
    exponents: &mut Vec<FittedExponent>,
) -> Section {
    let mut section = Section::new(CheckName::Truncation.name(), true);
    let tol = cfg.tolerances.monotone;
    let d = sweep.lattice.dimension();
    let times = &sweep.truncation_times;
    for u in units {
        let radii = &u.truncation_radii;
        let mut mono = Tally::new();
        for (ti, &t) in times.iter().enumerate() {
            for k in 1..radii.len() {
                let (prev, next) = (u.truncation[k - 1][ti], u.truncation[k][ti]);
                mono.add(next, prev, next - prev, tol, || format!("r={} -> {} t={t}", radii[k - 1], radii[k]));
            }
        }
        section.push(mono.record(format!("error nonincreasing in r ({})", unit_label(u)), tol));
        let r_star = *radii.last().expect("r* is always present");
        let mut zero = Tally::new();
        for (ti, &t) in times.iter().enumerate() {
            let e = u.truncation[radii.len() - 1][ti];
            zero.add(e, 0.0, e, tol, || format!("t={t}"));
        }
        section.push(zero.record(format!("error = 0 at r* = {r_star} ({})", unit_label(u)), tol));

        let last = times.len() - 1;
        let (x, y): (Vec<f64>, Vec<f64>) = radii[..radii.len() - 1]
            .iter()
            .zip(&u.truncation)
            .filter(|(_, row)| row[last] > 0.0)
            .map(|(&r, row)| (r.ln(), row[last].ln()))
            .unzip();
        let reference = compare_bounds(u.alpha, d)
            .ok()
            .and_then(|c| c.bound("B1").map(|b| -b.beta_prime.value));
        match ols(&x, &y) {
            Ok(fit) => exponents.push(FittedExponent {
                label: format!("truncation slope t={}", times[last]),
                alpha: u.alpha,
                seed: u.seed,
                fit,
                reference,
            }),
            Err(e) => section.notes.push(format!("{}: truncation slope not fitted: {e}", unit_label(u))),
        }
    }
    section
}

pub fn correlator_section(
    cfg: &SweepConfig,
    sweep: &ResolvedSweep,
    units: &[UnitData],
    constants: &mut Vec<FittedConstant>,
) -> Section {
    let mut section = Section::new(CheckName::Correlator.name(), true);
    let tol = cfg.tolerances.correlator;
    let d = sweep.lattice.dimension();
    section.notes.push(
        "restriction A~ keeps the Pauli strings of A(t) supported in the ball around x, i.e. the partial trace \
         over the exterior normalized by its dimension, tensored with the identity"
            .into(),
    );
    for u in units {
        let mut tally = Tally::new();
        let exps = compare_bounds(u.alpha, d).ok().and_then(|c| {
            c.bound("B1").map(|b| (b.gamma.value, b.beta.value))
        });
        let mut c_fit = 0.0f64;
        for &(pi, ti, chain) in &u.correlators {
            let (x, y) = sweep.correlator_pairs[pi];
            let t = sweep.correlator_times[ti];
            let lhs = chain.correlator.norm();
            let rhs = chain.rhs();
            tally.add(lhs, rhs, lhs - rhs, tol, || format!("x={x} y={y} t={t}"));
            if let Some((gamma, beta)) = exps {
                if t > 0.0 {
                    let r = sweep.lattice.distance(x, y);
                    c_fit = c_fit.max(lhs * r.powf(beta) / (2f64.powf(beta + 2.0) * t.powf(gamma)));
                }
            }
        }
        section.push(tally.record(format!("|C| <= 2||A-A~|| + 2||B-B~|| ({})", unit_label(u)), tol));
        if exps.is_some() {
            constants.push(FittedConstant {
                label: "correlator c".into(),
                alpha: u.alpha,
                seed: Some(u.seed),
                value: c_fit,
            });
        }
    }
    section
}

/// Fit recovery on synthetic data with known exponents.
pub fn synthetic_section(cfg: &SweepConfig, sweep: &ResolvedSweep) -> Section {
    let mut section = Section::new(CheckName::SyntheticRecovery.name(), true);
    let tol = cfg.tolerances.synthetic;
    let radii: Vec<f64> = (1..=10).map(f64::from).collect();
    let times: Vec<f64> = (0..=300).map(|k| 1e-3 * 1e5f64.powf(k as f64 / 300.0)).collect();
    let make = |f: &dyn Fn(f64, f64) -> f64| LeakageCurve {
        center: 0,
        points: times
            .iter()
            .flat_map(|&t| radii.iter().map(move |&r| (r, t)))
            .map(|(r, t)| LeakagePoint {
                r,
                t,
                leakage: f(r, t),
                norm_kind: NormKind::Operator,
            })
            .collect(),
    };
    let mut push = |name: String, got: Result<f64>, planted: f64| match got {
        Ok(slope) => section.push(CheckRecord {
            name,
            passed: (slope - planted).abs() <= tol,
            measured: slope,
            reference: planted,
            tolerance: tol,
            points: radii.len(),
            failures: usize::from(!((slope - planted).abs() <= tol)),
            detail: None,
        }),
        Err(e) => section.fail(name, e.to_string()),
    };
    for p in [0.5, 1.0] {
        let curve = make(&|r: f64, t: f64| (t / r.powf(p)).min(1.0));
        push(format!("front exponent {p}"), fit_front(&curve, cfg.theta).map(|f| f.fit.slope), p);
    }
    let d = sweep.lattice.dimension() as f64;
    for &alpha in &cfg.alphas {
        let curve = make(&|r: f64, t: f64| t / r.powf(alpha - d));
        push(format!("tail exponent alpha={alpha}"), fit_tail(&curve, 1.0).map(|f| f.slope), -(alpha - d));
    }
    section
}
