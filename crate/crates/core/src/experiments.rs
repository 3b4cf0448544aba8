//! Subcommand drivers behind `discevo`. Each writes its artifacts plus a
//! `manifest.json` into the output directory and reports pass/fail.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::acceptance::{run_suite, summary_line};
use crate::config::{ExperimentConfig, OperatorKind};
use crate::eigen_engine::{extend_eigenvector, growth_audit, unit_seeds, verify_eigen};
use crate::error::{Error, Result};
use crate::evolution::{
    evolution_residual, model_solution_heat, model_solution_heat_derivative, model_solution_schrodinger,
    model_solution_schrodinger_derivative, propagate, time_grid,
};
use crate::favard::{build_all_families, completeness_probe, reconstruct_coordinate};
use crate::lattice_ops::build_laplacian_1d;
use crate::sampling::{random_seeds, trial_rng};
use crate::special_fn::log_envelope;
use crate::state::{LatticeState, Window};
use crate::stationary::{check_stationary_decay, kernel_vector, separable_bound_state, shell_decay_audit, write_shell_csv};
use crate::uniqueness_probe::{
    check_entire_identity, decay_audit_in, full_shell_limit, growth_bound_check, indicator_estimate, phi_on_ray,
    write_phi_csv, IndicatorEntry, ProbeReport, Verdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Simulate,
    Models,
    Eigen,
    Favard,
    Probe,
    Stationary,
    Verify,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Models => "models",
            Self::Eigen => "eigen",
            Self::Favard => "favard",
            Self::Probe => "probe",
            Self::Stationary => "stationary",
            Self::Verify => "verify",
        }
    }
}

/// Seed used by `verify` when none is given.
pub const DEFAULT_VERIFY_SEED: u64 = 0;

pub struct RunOutcome {
    pub passed: bool,
    pub artifacts: Vec<PathBuf>,
}

struct Sink<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Sink<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }
}

/// Runs a subcommand and writes `manifest.json` next to its artifacts.
pub fn run(cmd: Subcommand, cfg: &ExperimentConfig, out: &Path, quiet: bool) -> Result<RunOutcome> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    let start = Instant::now();
    let mut sink = Sink { dir: out, written: Vec::new() };
    let passed = match cmd {
        Subcommand::Simulate => simulate(cfg, &mut sink)?,
        Subcommand::Models => models(cfg, &mut sink)?,
        Subcommand::Eigen => eigen(cfg, &mut sink)?,
        Subcommand::Favard => favard(cfg, &mut sink)?,
        Subcommand::Probe => probe(cfg, &mut sink)?,
        Subcommand::Stationary => stationary(cfg, &mut sink)?,
        Subcommand::Verify => verify(cfg, &mut sink, quiet)?,
    };
    let manifest = json!({
        "subcommand": cmd.name(),
        "passed": passed,
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "versions": {
            "discrete-evolution": env!("CARGO_PKG_VERSION"),
            "platform": format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
        },
        "wall_time_seconds": start.elapsed().as_secs_f64(),
        "artifacts": sink.written.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    let mut artifacts = sink.written.clone();
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    artifacts.push(out.join("manifest.json"));
    Ok(RunOutcome { passed, artifacts })
}

fn heat_alpha(cfg: &ExperimentConfig) -> Option<Complex64> {
    let a = cfg.alpha();
    (cfg.operator.kind == OperatorKind::Laplacian && (a.im == 0.0 || a.re == 0.0)).then_some(a)
}

fn interior(w: Window) -> impl Iterator<Item = i64> {
    let margin = (w.len() / 9).max(1) as i64;
    w.indices().filter(move |&j| w.edge_distance(j) >= margin)
}

fn simulate(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<bool> {
    let a = cfg.build_operator()?;
    let w = a.window();
    let m = a.block_dim();
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    x[0] = Complex64::new(1.0, 0.0);
    let times = time_grid(cfg.time.t0, cfg.time.t1, cfg.time.samples);
    let traj = propagate(&a, &LatticeState::embed(w, 0, &x, cfg.time.t0)?, &times)?;
    traj.write_csv(sink.file("trajectory.csv")?)?;
    let tol = 1e-9 * cfg.tolerance_scale();
    let error = match heat_alpha(cfg) {
        Some(alpha) => {
            let exact = model_solution_heat(alpha, cfg.time.t1, cfg.time.t0, w)?;
            let top = interior(w).map(|n| exact.at(n).norm()).fold(0.0, f64::max);
            Some(interior(w).map(|n| (exact.at(n) - traj.last().at(n)).norm()).fold(0.0, f64::max) / top)
        }
        None => None,
    };
    let passed = error.is_none_or(|e| e <= tol);
    sink.json("simulate.json", &json!({ "interior_relative_error": error, "tolerance": tol, "passed": passed }))?;
    Ok(passed)
}

fn models(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<bool> {
    let w = cfg.window()?;
    let alpha = heat_alpha(cfg).unwrap_or(Complex64::new(1.0, 0.0));
    let lap = build_laplacian_1d(alpha, w)?;
    let t = cfg.time.t1;
    let heat = model_solution_heat(alpha, t, cfg.time.t0, w)?;
    let heat_res = evolution_residual(&lap, &heat, &model_solution_heat_derivative(alpha, t, cfg.time.t0, w)?, 1)?;
    let sch = model_solution_schrodinger(t, w, Complex64::new(1.0, 0.0))?;
    let dsch = model_solution_schrodinger_derivative(t, w, Complex64::new(1.0, 0.0))?;
    let plus = evolution_residual(&build_laplacian_1d(Complex64::new(0.0, 1.0), w)?, &sch, &dsch, 1)?;
    let minus = evolution_residual(&build_laplacian_1d(Complex64::new(0.0, -1.0), w)?, &sch, &dsch, 1)?;
    heat.write_csv(sink.file("heat.csv")?)?;
    sch.write_csv(sink.file("schrodinger.csv")?)?;
    let tol = 1e-8 * cfg.tolerance_scale();
    let passed = heat_res <= tol && plus <= tol;
    sink.json(
        "models.json",
        &json!({
            "t": t,
            "heat": { "alpha": [alpha.re, alpha.im], "residual": heat_res },
            "schrodinger": { "residual_plus_i": plus, "residual_minus_i": minus },
            "tolerance": tol,
            "passed": passed,
        }),
    )?;
    Ok(passed)
}

fn eigen(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<bool> {
    let a = cfg.build_operator()?;
    let consts = a.audit_constants()?;
    let seeds = match cfg.seed {
        Some(seed) => random_seeds(&mut trial_rng(seed, 1), a.s(), a.block_dim()),
        None => unit_seeds(a.s(), a.block_dim(), 0, &vec![Complex64::new(1.0, 0.0); a.block_dim()]),
    };
    let tol = 1e-10 * cfg.tolerance_scale();
    let mut rows = Vec::new();
    let mut passed = true;
    for (i, lam) in cfg.lambda.values().into_iter().enumerate() {
        let fam = extend_eigenvector(&a, &seeds, lam)?;
        let check = verify_eigen(&a, &fam)?;
        let growth = growth_audit(&fam, &consts)?;
        passed &= check.max_relative <= tol && growth.bound_holds;
        fam.write_csv(sink.file(&format!("eigen_{i:03}.csv"))?)?;
        rows.push(json!({ "lambda": [lam.re, lam.im], "residual": check, "growth": growth }));
    }
    sink.json("eigen.json", &json!({ "a": consts.a, "delta": consts.delta, "families": rows, "passed": passed }))?;
    Ok(passed)
}

/// Coordinates past this reach need polynomials of such high degree that Horner
/// evaluation cancels catastrophically; they are reported but not gated.
const RECONSTRUCTION_REACH: i64 = 15;

fn favard(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<bool> {
    let a = cfg.build_operator()?;
    let w = a.window();
    let m = a.block_dim();
    let fams = build_all_families(&a)?;
    let docs: Vec<serde_json::Value> = fams.iter().map(|f| serde_json::from_str(&f.to_json())).collect::<std::result::Result<_, _>>()?;
    sink.json("families.json", &docs)?;
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    x[0] = Complex64::new(1.0, 0.0);
    let mut worst: f64 = 0.0;
    let mut checked = Vec::new();
    let mut errors = Vec::new();
    for n in w.indices() {
        match reconstruct_coordinate(&a, n, &fams, &x) {
            Ok(out) => {
                let want = LatticeState::embed(w, n, &x, 0.0)?;
                let err = out.combine(Complex64::new(1.0, 0.0), &want, Complex64::new(-1.0, 0.0))?.norm();
                if n.abs() <= RECONSTRUCTION_REACH {
                    worst = worst.max(err);
                    checked.push(n);
                }
                errors.push(json!({"n": n, "error": err}));
            }
            Err(Error::InvalidArgument(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let probe_state = if m == 1 {
        model_solution_heat(Complex64::new(1.0, 0.0), 0.5, 0.0, w)?
    } else {
        let heat = model_solution_heat(Complex64::new(1.0, 0.0), 0.5, 0.0, w)?;
        let mut values = Vec::with_capacity(w.len() * m);
        for j in w.indices() {
            values.extend(std::iter::repeat_n(heat.at(j), m));
        }
        LatticeState::from_values(w, m, 0.5, values)?
    };
    let rep = completeness_probe(&probe_state, &a, &x)?;
    let scale = cfg.tolerance_scale();
    let passed = worst <= 1e-6 * scale && rep.max_defect <= 1e-7 * scale;
    sink.json(
        "favard.json",
        &json!({
            "reconstructed_indices": [checked.first(), checked.last()],
            "max_reconstruction_error": worst,
            "reconstruction_errors": errors,
            "completeness_max_defect": rep.max_defect,
            "completeness_admissible": [rep.admissible.0, rep.admissible.1],
            "truncation_warning": rep.truncation_warning,
            "passed": passed,
        }),
    )?;
    Ok(passed)
}

fn probe(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<bool> {
    let name = cfg.experiment.clone().unwrap_or_else(|| "sharpness".into());
    let t = cfg.probe.horizon;
    let eps = cfg.probe.eps;
    let scale = cfg.tolerance_scale();
    let a = cfg.build_operator()?;
    let w = a.window();
    let seeds = unit_seeds(a.s(), a.block_dim(), 0, &vec![Complex64::new(1.0, 0.0); a.block_dim()]);
    let mut report = ProbeReport { experiment: name.clone(), defect_max: None, verdict: None, indicator: Vec::new(), margins: Vec::new() };
    let heat = |time: f64| model_solution_heat(Complex64::new(1.0, 0.0), time, t / 2.0, w);
    let passed = match name.as_str() {
        "entire" => {
            let u0 = LatticeState::delta(w, 0, 0.0)?;
            let traj = propagate(&a, &u0, &time_grid(0.0, t, cfg.time.samples))?;
            let rep = check_entire_identity(&traj, &a, &seeds, &cfg.lambda.values())?;
            write_phi_csv(&rep.samples, sink.file("phi.csv")?)?;
            report.defect_max = Some(rep.max_defect);
            rep.max_defect <= 1e-6 * scale
        }
        "growth" => {
            // synthetic data on the envelope at level 1, audited at the configured level
            let delta = a.audit_constants()?.delta;
            let syn = LatticeState::from_fn(w, 0.0, |j| {
                Complex64::new(log_envelope(j.unsigned_abs(), t, delta, 1.0, 1.0).log_abs.exp(), 0.0)
            });
            let g = growth_bound_check(&syn, &syn, &a, t, eps.min(1.0), &cfg.lambda.values())?;
            report.verdict = Some(Verdict::SubCritical);
            report.margins = vec![g.worst_margin];
            g.holds
        }
        "indicator" => {
            let (u0, ut) = (heat(0.0)?, heat(t)?);
            let mut samples = Vec::new();
            let mut ok = true;
            for &theta in &cfg.probe.thetas {
                let p0 = phi_on_ray(&u0, &a, &seeds, theta, &cfg.probe.radii)?;
                let pt = phi_on_ray(&ut, &a, &seeds, theta, &cfg.probe.radii)?;
                let l0: Vec<f64> = p0.iter().map(|p| p.value.log_abs).collect();
                let lt: Vec<f64> = pt.iter().map(|p| p.value.log_abs).collect();
                let h0 = indicator_estimate(theta, &cfg.probe.radii, &l0)?;
                let ht = indicator_estimate(theta, &cfg.probe.radii, &lt)?;
                if theta == 0.0 {
                    ok &= ((ht.slope - h0.slope) - t).abs() <= 0.1 * t * scale;
                }
                report.indicator.push(IndicatorEntry { theta, slope: h0.slope });
                report.indicator.push(IndicatorEntry { theta, slope: ht.slope });
                samples.extend(p0.into_iter().chain(pt));
            }
            write_phi_csv(&samples, sink.file("phi.csv")?)?;
            ok
        }
        "decay" | "sharpness" => {
            let (u0, ut) = (heat(0.0)?, heat(t)?);
            let hi = full_shell_limit(&u0, a.s()).min(60);
            let lo = if name == "sharpness" { 10.min(hi) } else { 5.min(hi) };
            let rep = decay_audit_in(&u0, &ut, t, a.audit_constants()?.delta, eps, a.s(), (lo, hi))?;
            report.verdict = Some(rep.verdict);
            report.margins = rep.margins.clone();
            name == "decay" || rep.verdict == Verdict::Critical
        }
        other => {
            return Err(Error::Config(format!(
                "unknown probe experiment `{other}` (expected entire, growth, indicator, decay or sharpness)"
            )))
        }
    };
    sink.json("probe.json", &report)?;
    Ok(passed)
}

fn stationary(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<bool> {
    let a = cfg.build_operator()?;
    let seeds = match cfg.seed {
        Some(seed) => random_seeds(&mut trial_rng(seed, 2), a.s(), a.block_dim()),
        None => vec![vec![Complex64::new(1.0, 0.0); a.block_dim()]; 2 * a.s()],
    };
    let u = kernel_vector(&a, &seeds)?;
    let verdict = check_stationary_decay(&u, &a)?;
    let (u1, v1) = separable_bound_state(1, 30);
    let (u2, v2) = separable_bound_state(2, 20);
    let s1 = shell_decay_audit(&u1, &v1)?;
    let s2 = shell_decay_audit(&u2, &v2)?;
    write_shell_csv(&s1, sink.file("shells.csv")?)?;
    let passed = !verdict.forces_zero && s1.violations == 0 && s2.violations == 0;
    sink.json("stationary.json", &json!({ "kernel": verdict, "shells_d1": s1, "shells_d2": s2, "passed": passed }))?;
    Ok(passed)
}

fn verify(cfg: &ExperimentConfig, sink: &mut Sink, quiet: bool) -> Result<bool> {
    let seed = cfg.seed.unwrap_or(DEFAULT_VERIFY_SEED);
    let (report, timings) = run_suite(seed, cfg.tolerance_scale(), |c| {
        if !quiet {
            println!("{}", summary_line(c));
        }
    });
    fs::write(sink.path("verify.json"), report.to_json() + "\n")?;
    sink.json("timings.json", &timings)?;
    Ok(report.all_passed)
}
