use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use lrcone_core::bounds::{
    choose_l, choose_n, compare_bounds, default_nu, fixpoint_gamma, lambda_constant, run_recursion,
    theorem_envelope, xi_constant, EnvelopeConstants, RecursionInputs,
};
use lrcone_core::dynamics::{leakage_profile, pauli_commutator, EvolutionContext};
use lrcone_core::grid::parse_range;
use lrcone_core::linalg::{embed_one_site, fast_op_norm};
use lrcone_core::verify::table::{self, format_float, Row};
use lrcone_core::verify::{run_verification, CheckName, SimulateConfig, SweepConfig};
use lrcone_core::{Error, Lattice, Metric, Pauli, Result};

use crate::args::{BoundArgs, CompareArgs, FixpointArgs, Format, SimulateArgs, VerifyArgs};

/// `println!` that ignores a closed stdout (e.g. output piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

pub enum Outcome {
    Success,
    ChecksFailed(Vec<String>),
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing `{name}` (pass --{name} or set it in the config)")))
}

/// Config file for `bound`; every field may be overridden by a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundConfig {
    alpha: Option<f64>,
    d: Option<usize>,
    r_grid: Option<String>,
    t_grid: Option<String>,
    theorem_epsilon: Option<f64>,
    constants: Option<EnvelopeConstants>,
    eta: Option<f64>,
    shell_epsilon: Option<f64>,
    nu: Option<f64>,
    tau: Option<f64>,
}

/// `τ` on a hypercubic lattice large enough to cover `r_star`, capped at 4096 sites.
fn default_tau(alpha: f64, d: usize, r_star: f64) -> Result<f64> {
    let cap = (4096f64.powf(1.0 / d as f64)).floor() as usize;
    let side = (2 * r_star.ceil() as usize + 1).clamp(3, cap.max(3));
    Ok(Lattice::new(d, &vec![side; d], Metric::Euclidean)?.tau(alpha))
}

#[derive(Serialize)]
struct BoundSummary {
    alpha: f64,
    d: usize,
    theorem_epsilon: f64,
    constants: EnvelopeConstants,
    eta: f64,
    shell_epsilon: f64,
    tau: f64,
    r_star: f64,
    t_max: f64,
    level_clamped: bool,
    degenerate: bool,
    recursion: Option<lrcone_core::bounds::RecursionTrace>,
}

pub fn bound(args: &BoundArgs, out: &Path) -> Result<Outcome> {
    let cfg: BoundConfig = match &args.config {
        Some(p) => read_config(p)?,
        None => BoundConfig::default(),
    };
    let alpha = required(args.alpha.or(cfg.alpha), "alpha")?;
    let d = required(args.d.or(cfg.d), "d")?;
    let radii = parse_range(args.r.as_deref().or(cfg.r_grid.as_deref()).unwrap_or("1:100:10"))?;
    let times = parse_range(args.t.as_deref().or(cfg.t_grid.as_deref()).unwrap_or("0.1:10:20"))?;
    let epsilon = args.epsilon.or(cfg.theorem_epsilon).unwrap_or(0.1);
    let base = cfg.constants.unwrap_or_default();
    let constants = EnvelopeConstants {
        c1: args.c1.unwrap_or(base.c1),
        c2: args.c2.unwrap_or(base.c2),
        c: args.window.unwrap_or(base.c),
    };
    let eta = args.eta.or(cfg.eta).unwrap_or(0.1);
    let shell_epsilon = args.shell_epsilon.or(cfg.shell_epsilon).unwrap_or(0.25);
    let nu = args.nu.or(cfg.nu).unwrap_or_else(default_nu);

    let mut csv = String::from("r,t,envelope,valid\n");
    for &r in &radii {
        for &t in &times {
            let p = theorem_envelope(r, t, alpha, d, epsilon, constants)?;
            writeln!(csv, "{},{},{},{}", format_float(r), format_float(t), format_float(p.value), p.valid)
                .expect("writing to a String cannot fail");
        }
    }

    let r_star = radii.iter().copied().fold(f64::MIN, f64::max);
    let t_max = times.iter().copied().fold(f64::MIN, f64::max);
    let tau = match args.tau.or(cfg.tau) {
        Some(t) => t,
        None => default_tau(alpha, d, r_star)?,
    };
    let xi = xi_constant(d)?;
    let lambda = lambda_constant(shell_epsilon, d)?;
    let l = choose_l(r_star, xi, alpha, d)?;
    let (recursion, clamped) = if l.degenerate {
        log::warn!("L = {} <= 1: r* = {r_star} is outside the asymptotic regime; no recursion trace", l.value);
        (None, false)
    } else {
        let level = choose_n(r_star, t_max, alpha, d, eta, l.value)?;
        if level.clamped {
            log::warn!("level count clamped to n = 1 at r* = {r_star}, t = {t_max}");
        }
        let inputs = RecursionInputs {
            tau,
            base: l.value,
            n: level.n,
            xi,
            nu,
            lambda,
            alpha,
            d,
            r_star,
        };
        (Some(run_recursion(inputs)?), level.clamped)
    };
    let summary = BoundSummary {
        alpha,
        d,
        theorem_epsilon: epsilon,
        constants,
        eta,
        shell_epsilon,
        tau,
        r_star,
        t_max,
        level_clamped: clamped,
        degenerate: l.degenerate,
        recursion,
    };
    let dir = out.join("bound");
    let csv_path = write_file(&dir, "envelope.csv", &csv)?;
    let json_path = write_file(&dir, "recursion.json", &serde_json::to_string_pretty(&summary)?)?;
    say!("envelope: {} ({} rows)", csv_path.display(), radii.len() * times.len());
    say!("recursion: {}", json_path.display());
    if let Some(trace) = &summary.recursion {
        say!("L = {}, n = {}, v_n = {:e}", l.value, trace.inputs.n, trace.final_velocity());
    }
    Ok(Outcome::Success)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixpointConfig {
    alpha: Option<f64>,
    d: Option<usize>,
    eta: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
}

pub fn fixpoint(args: &FixpointArgs, out: &Path) -> Result<Outcome> {
    let cfg: FixpointConfig = match &args.config {
        Some(p) => read_config(p)?,
        None => FixpointConfig::default(),
    };
    let alpha = required(args.alpha.or(cfg.alpha), "alpha")?;
    let d = required(args.d.or(cfg.d), "d")?;
    let eta = args.eta.or(cfg.eta).unwrap_or(0.0);
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-12);
    let max_iter = args.max_iter.or(cfg.max_iter).unwrap_or(10_000);
    let trace = fixpoint_gamma(alpha, d, eta, tol, max_iter)?;
    let path = write_file(&out.join("fixpoint"), "fixpoint.json", &trace.to_json()?)?;
    say!("limit = {}", trace.limit);
    say!("closed form = {}", trace.closed_form_limit);
    say!("iterations = {}", trace.steps.len() - 1);
    say!("trace: {}", path.display());
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    seed: u64,
    alpha: f64,
    ensemble: &'static str,
    num_qubits: usize,
    config: &'a SimulateConfig,
    hamiltonian: lrcone_core::hamiltonian::HamiltonianDocument,
}

pub fn simulate(args: &SimulateArgs, out: &Path) -> Result<Outcome> {
    let mut cfg = SimulateConfig::from_path(&args.config)?;
    if cfg.hamiltonian.is_some() && (args.alpha.is_some() || args.seed.is_some()) {
        return Err(Error::Config("--alpha and --seed apply only to sampled models".into()));
    }
    if let Some(a) = args.alpha {
        cfg.alpha = Some(a);
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(n) = args.norm {
        cfg.norm = n.into();
    }
    let h = cfg.hamiltonian()?;
    let lattice = h.lattice().clone();
    let n = lattice.num_sites();
    if cfg.center >= n {
        return Err(Error::Config(format!("center {} outside a lattice of {n} sites", cfg.center)));
    }
    let radii = cfg.r_grid.values()?;
    let times = cfg.t_grid.values()?;
    let ctx = EvolutionContext::new(&h)?;
    let op = embed_one_site(&cfg.observable.matrix(), cfg.center, n);
    let heis = ctx.heisenberg(&op)?;

    let ensemble = h.ensemble().name();
    let row = |r, t, value, norm_kind| Row {
        center: cfg.center,
        r,
        t,
        value,
        norm_kind,
        seed: h.seed(),
        alpha: h.alpha(),
        ensemble,
    };
    let mut leak_rows = Vec::with_capacity(radii.len() * times.len());
    let mut comm_rows = Vec::with_capacity(radii.len() * times.len());
    let mut per_t = Vec::with_capacity(times.len());
    for &t in &times {
        let ot = heis.at(t);
        let leak = leakage_profile(&ot, &lattice, cfg.center, &radii, cfg.norm)?;
        let site_max: Vec<f64> = (0..n)
            .map(|j| {
                Pauli::ALL
                    .iter()
                    .map(|&p| fast_op_norm(&pauli_commutator(p, j, n, &ot)))
                    .fold(0.0, f64::max)
            })
            .collect();
        per_t.push((leak, site_max));
    }
    for (ri, &r) in radii.iter().enumerate() {
        for (ti, &t) in times.iter().enumerate() {
            let (leak, site_max) = &per_t[ti];
            leak_rows.push(row(r, t, leak[ri], cfg.norm.name()));
            let sup = (0..n)
                .filter(|&j| lattice.distance(cfg.center, j) >= r)
                .map(|j| site_max[j])
                .fold(0.0, f64::max);
            comm_rows.push(row(r, t, sup, "operator"));
        }
    }
    let summary = SimulateSummary {
        seed: h.seed(),
        alpha: h.alpha(),
        ensemble,
        num_qubits: n,
        config: &cfg,
        hamiltonian: h.to_document(),
    };
    let dir = out.join("simulate");
    let leak = write_file(&dir, "leakage.csv", &table::render(&leak_rows))?;
    write_file(&dir, "commutator.csv", &table::render(&comm_rows))?;
    let json = write_file(&dir, "simulate.json", &serde_json::to_string_pretty(&summary)?)?;
    say!("seed = {}", h.seed());
    say!("leakage: {}", leak.display());
    say!("summary: {}", json.display());
    Ok(Outcome::Success)
}

pub fn verify(args: &VerifyArgs, out: &Path) -> Result<Outcome> {
    if args.list_checks {
        for c in CheckName::ALL {
            let kind = if c.asserted() { "asserted" } else { "reported" };
            say!("{:<20} {:<9} {}", c.name(), kind, c.description());
        }
        return Ok(Outcome::Success);
    }
    let mut cfg = match (&args.config, args.preset) {
        (Some(path), _) => SweepConfig::from_path(path)?,
        (None, Some(p)) => SweepConfig::from_json(p.json())?,
        (None, None) => return Err(Error::Config("pass --config or --preset".into())),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let run = run_verification(&cfg, args.jobs)?;
    let dir = run.write(out)?;
    for section in &run.report.sections {
        let status = match (section.asserted, section.passed) {
            (false, _) => "REPORTED",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        say!("{status:<8} {} ({} records)", section.name, section.records.len());
    }
    say!("master seed = {}", run.report.master_seed);
    say!("report: {}", dir.join("report.json").display());
    if run.passed() {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::ChecksFailed(
            run.report.failed_sections().into_iter().map(String::from).collect(),
        ))
    }
}

pub fn compare(args: &CompareArgs) -> Result<Outcome> {
    let cmp = compare_bounds(args.alpha, args.d)?;
    match args.format {
        Format::Json => say!("{}", serde_json::to_string_pretty(&cmp)?),
        Format::Table => {
            say!("alpha = {} ({}), d = {}", cmp.alpha.value, cmp.alpha.exact, cmp.d);
            say!("{:<6}{:>12}{:>12}{:>12}{:>12}{:>12}", "bound", "gamma", "beta", "gamma'", "beta'", "phi");
            for b in &cmp.bounds {
                say!(
                    "{:<6}{:>12}{:>12}{:>12}{:>12}{:>12}",
                    b.name, b.gamma.exact, b.beta.exact, b.gamma_prime.exact, b.beta_prime.exact, b.phi.exact
                );
            }
            for diff in &cmp.differences {
                let flag = if diff.agree { "agree" } else { "DISCREPANCY" };
                say!(
                    "phi {}: direct {} vs stated formula {} [{flag}]",
                    diff.pair, diff.direct.exact, diff.stated_formula.exact
                );
            }
        }
    }
    Ok(Outcome::Success)
}
