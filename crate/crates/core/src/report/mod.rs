//! Configuration-driven batch runner and its CSV/SVG artifacts.
//!
//! [`run`] enumerates the grid of a [`RunConfig`], executes the cases on a
//! bounded worker pool and writes `report.csv`, `ledger.csv`, per-case
//! `field_<id>.csv` and, on request, `plot_<id>.svg` into the output
//! directory. Every numeric column uses 17 significant digits, so identical
//! configurations reproduce identical bytes.

mod config;
mod svg;

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use config::{parse_config, parse_config_str, Axis, CaseParams, Command, Grid, ModelChoice, RunConfig};
pub use svg::{line_plot, YScale};

use crate::barrier::{certify_supersolution, BarrierParams, GridSpec};
use crate::error::{Error, Result};
use crate::estimates::{
    compare_to_barrier, global_gradient_bound, harnack_field_check, interior_check, liouville_sweep, EstimateOutcome,
    LiouvilleVerdict,
};
use crate::geometry::ModelManifold;
use crate::proof_constants::{certify_bochner, fmt_sig17, harnack_constant, write_ledger_csv, Exponents, ProofConstants};
use crate::radial_solver::{
    constant_slope, constant_slope_solution, exact_p_harmonic_log_model, fit_flux, p_harmonic_energy_minimizer,
    p_harmonic_radial_quadrature, solve_radial_hj, z_equation_residual, EnergyOptions, RadialField, UniformSamples,
};

pub const REPORT_HEADER: [&str; 12] =
    ["case_id", "command", "n", "p", "q", "B", "R", "extra", "bound", "observed", "min_margin", "pass"];

/// Max-norm agreement required between the energy minimizer and quadrature.
pub const ORACLE_TOLERANCE: f64 = 1e-6;
/// Relative drift of the blow-up radius allowed under tolerance tightening.
pub const BLOWUP_DRIFT_TOLERANCE: f64 = 1e-4;
/// Half-width of the horospherical slab used by the Harnack and estimate checks.
const SLAB: f64 = 2.0;
const MAX_FIELD_SAMPLES: usize = 100_001;

/// Classification of one report row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStatus {
    Pass,
    Fail,
    /// A failed estimate on a valid solution, recorded under `--allow-findings`,
    /// or a Liouville run surviving the full range.
    Finding,
    /// The run ended before a verdict could be reached.
    Inconclusive,
    /// The case could not be evaluated.
    Error,
}

impl fmt::Display for CaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseStatus::Pass => "true",
            CaseStatus::Fail => "false",
            CaseStatus::Finding => "finding",
            CaseStatus::Inconclusive => "inconclusive",
            CaseStatus::Error => "error",
        })
    }
}

/// One row of `report.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub case_id: usize,
    pub command: Command,
    pub n: usize,
    pub p: f64,
    pub q: Option<f64>,
    pub b: Option<f64>,
    pub r: Option<f64>,
    pub extra: String,
    pub bound: f64,
    pub observed: f64,
    pub min_margin: f64,
    pub status: CaseStatus,
}

impl CaseRecord {
    fn new(case_id: usize, command: Command, c: &CaseParams) -> Self {
        let axes = command.axes();
        Self {
            case_id,
            command,
            n: c.n,
            p: c.p,
            q: axes.contains(&Axis::Q).then_some(c.q),
            b: axes.contains(&Axis::B).then_some(c.b),
            r: axes.contains(&Axis::R).then_some(c.r),
            extra: String::new(),
            bound: f64::NAN,
            observed: f64::NAN,
            min_margin: f64::NAN,
            status: CaseStatus::Error,
        }
    }

    fn with_outcome(mut self, o: &EstimateOutcome<f64>, status: CaseStatus) -> Self {
        self.bound = o.bound_value;
        self.observed = o.observed_sup;
        self.min_margin = o.relative_margin();
        self.status = status;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub finding: usize,
    pub inconclusive: usize,
    pub error: usize,
}

impl Summary {
    fn of(records: &[CaseRecord]) -> Self {
        let mut s = Summary::default();
        for r in records {
            match r.status {
                CaseStatus::Pass => s.pass += 1,
                CaseStatus::Fail => s.fail += 1,
                CaseStatus::Finding => s.finding += 1,
                CaseStatus::Inconclusive => s.inconclusive += 1,
                CaseStatus::Error => s.error += 1,
            }
        }
        s
    }

    pub fn all_pass(&self) -> bool {
        self.fail + self.finding + self.inconclusive + self.error == 0
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pass={} fail={} finding={} inconclusive={} error={}",
            self.pass, self.fail, self.finding, self.inconclusive, self.error
        )
    }
}

/// Options that do not belong in the configuration file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record failed estimate checks as findings instead of failures.
    pub allow_findings: bool,
    /// Worker count; `None` uses the available parallelism.
    pub jobs: Option<usize>,
}

/// Everything a run produced besides the files.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub records: Vec<CaseRecord>,
    pub ledger: Vec<ProofConstants<f64>>,
    pub summary: Summary,
    pub wall_time: Duration,
    pub version: &'static str,
    pub seed: u64,
}

impl VerificationReport {
    /// Process exit code: 0 when every case passes, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.summary.all_pass() {
            0
        } else {
            1
        }
    }
}

/// Output of one case before aggregation.
#[derive(Default)]
struct CaseOutput {
    records: Vec<CaseRecord>,
    ledger: Option<ProofConstants<f64>>,
    field: Option<RadialField<f64>>,
    /// Extra per-case table written instead of a field (barrier margins).
    table: Option<String>,
    plot: Option<String>,
}

/// Executes every case of `cfg` and writes the artifacts.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    fs::create_dir_all(&cfg.out_dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let cases = cfg.cases();

    let outputs: Vec<(usize, CaseOutput)> = pool.install(|| {
        if cfg.command == Command::Liouville {
            liouville_groups(&cases)
                .into_par_iter()
                .map(|(first, group)| (first, run_liouville_group(cfg, first, group)))
                .collect()
        } else {
            cases.par_iter().enumerate().map(|(id, c)| (id, run_case(cfg, opts, id, c))).collect()
        }
    });

    let mut records = Vec::new();
    let mut ledger = Vec::new();
    for (id, out) in outputs {
        if let Some(field) = &out.field {
            let file = BufWriter::new(fs::File::create(cfg.out_dir.join(format!("field_{id}.csv")))?);
            field.write_csv(file)?;
        }
        if let Some(table) = &out.table {
            fs::write(cfg.out_dir.join(format!("field_{id}.csv")), table)?;
        }
        if cfg.emit_svg {
            if let Some(plot) = &out.plot {
                fs::write(cfg.out_dir.join(format!("plot_{id}.svg")), plot)?;
            }
        }
        ledger.extend(out.ledger);
        records.extend(out.records);
    }
    if !ledger.is_empty() {
        write_ledger_csv(BufWriter::new(fs::File::create(cfg.out_dir.join("ledger.csv"))?), &ledger)?;
    }
    if cfg.command != Command::Ledger {
        write_report_csv(BufWriter::new(fs::File::create(cfg.out_dir.join("report.csv"))?), &records)?;
    }
    for r in records.iter().filter(|r| r.status == CaseStatus::Finding) {
        eprintln!("FINDING: case {} ({}): {}", r.case_id, r.command, r.extra);
    }
    let summary = Summary::of(&records);
    let report = VerificationReport {
        config: cfg.clone(),
        records,
        ledger,
        summary,
        wall_time: start.elapsed(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
    };
    write_summary(&cfg.out_dir.join("summary.txt"), &report)?;
    Ok(report)
}

/// Writes report rows with the columns of [`REPORT_HEADER`].
pub fn write_report_csv<W: Write>(out: W, records: &[CaseRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    let opt = |x: Option<f64>| x.map(fmt_sig17).unwrap_or_default();
    for r in records {
        w.write_record([
            r.case_id.to_string(),
            r.command.to_string(),
            r.n.to_string(),
            fmt_sig17(r.p),
            opt(r.q),
            opt(r.b),
            opt(r.r),
            r.extra.clone(),
            fmt_sig17(r.bound),
            fmt_sig17(r.observed),
            fmt_sig17(r.min_margin),
            r.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(path: &Path, rep: &VerificationReport) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    writeln!(f, "hjlab {}", rep.version)?;
    writeln!(f, "command = {}", rep.config.command)?;
    writeln!(f, "seed = {}", rep.seed)?;
    writeln!(f, "cases = {}", rep.records.len())?;
    writeln!(f, "{}", rep.summary)?;
    writeln!(f, "wall_time_s = {:.3}", rep.wall_time.as_secs_f64())?;
    writeln!(f, "config = {:?}", rep.config)?;
    f.flush()?;
    Ok(())
}

fn estimate_status(pass: bool, opts: &RunOptions) -> CaseStatus {
    match (pass, opts.allow_findings) {
        (true, _) => CaseStatus::Pass,
        (false, true) => CaseStatus::Finding,
        (false, false) => CaseStatus::Fail,
    }
}

fn manifold(choice: ModelChoice, b: f64, n: usize) -> Result<ModelManifold<f64>> {
    match choice {
        ModelChoice::Euclidean => ModelManifold::euclidean(n),
        ModelChoice::Hyperbolic => ModelManifold::hyperbolic(b, n),
        ModelChoice::LogModel => ModelManifold::log_model(b, n),
    }
}

fn field_samples(cfg: &RunConfig) -> usize {
    cfg.grid_points.clamp(3, MAX_FIELD_SAMPLES)
}

fn run_case(cfg: &RunConfig, opts: &RunOptions, id: usize, c: &CaseParams) -> CaseOutput {
    let result = match cfg.command {
        Command::CertifyBarrier => case_barrier(cfg, id, c),
        Command::CertifyBochner => case_bochner(cfg, id, c),
        Command::SolveHj => case_solve_hj(cfg, opts, id, c),
        Command::SolvePharmonic => case_pharmonic(cfg, id, c),
        Command::CheckEstimates => case_estimates(cfg, opts, id, c),
        Command::Harnack => case_harnack(cfg, opts, id, c),
        Command::Ledger => case_ledger(id, c),
        Command::Liouville => unreachable!("Liouville cases run in groups"),
    };
    result.unwrap_or_else(|e| {
        let mut rec = CaseRecord::new(id, cfg.command, c);
        rec.extra = format!("error={e}");
        CaseOutput { records: vec![rec], ..CaseOutput::default() }
    })
}

fn case_ledger(_id: usize, c: &CaseParams) -> Result<CaseOutput> {
    let m = ModelManifold::hyperbolic(c.b, c.n)?;
    let pc = ProofConstants::derive(c.n, Exponents::new(c.p, c.q)?, m.curvature(), c.r)?;
    Ok(CaseOutput { ledger: Some(pc), ..CaseOutput::default() })
}

fn case_barrier(cfg: &RunConfig, id: usize, c: &CaseParams) -> Result<CaseOutput> {
    let m = ModelManifold::hyperbolic(c.b, c.n)?;
    let pc = ProofConstants::derive(c.n, Exponents::new(c.p, c.q)?, m.curvature(), c.r)?;
    let grid = GridSpec::with_points(cfg.grid_points);
    let plain = certify_supersolution(&BarrierParams::from_constants(&pc, false), &pc, &m, &grid)?;
    let amplified_bp = BarrierParams::from_constants(&pc, true);
    let amplified = certify_supersolution(&amplified_bp, &pc, &m, &grid)?;
    let (worst, worst_r) = if plain.min_margin <= amplified.min_margin {
        (plain.min_margin, plain.argmin_r)
    } else {
        (amplified.min_margin, amplified.argmin_r)
    };
    let mut rec = CaseRecord::new(id, cfg.command, c);
    rec.bound = 0.0;
    rec.observed = worst;
    rec.min_margin = worst;
    rec.status = if plain.passed && amplified.passed { CaseStatus::Pass } else { CaseStatus::Fail };
    rec.extra = format!(
        "lambda={};mu={};A={};c={};argmin_r={}",
        fmt_sig17(pc.lambda),
        fmt_sig17(pc.mu),
        fmt_sig17(pc.amplification),
        fmt_sig17(pc.c_barrier),
        fmt_sig17(worst_r)
    );
    let mut table = String::from("r,w,lower_bound,lower_bound_amplified\n");
    for (a, b) in plain.margins.iter().zip(&amplified.margins) {
        let w = amplified_bp.eval(a.0)?.w;
        table.push_str(&format!("{},{},{},{}\n", fmt_sig17(a.0), fmt_sig17(w), fmt_sig17(a.1), fmt_sig17(b.1)));
    }
    let plot = line_plot(
        &format!("barrier lower bound, case {id}"),
        "r",
        "L*(w) lower bound",
        &amplified.margins,
        YScale::SymLog,
    );
    Ok(CaseOutput { records: vec![rec], ledger: Some(pc), table: Some(table), plot: Some(plot), ..CaseOutput::default() })
}

fn case_bochner(cfg: &RunConfig, id: usize, c: &CaseParams) -> Result<CaseOutput> {
    let cert = certify_bochner(&Exponents::new(c.p, c.q)?, c.n, cfg.grid_points, cfg.seed, id as u64)?;
    let mut rec = CaseRecord::new(id, cfg.command, c);
    rec.bound = -crate::proof_constants::BOCHNER_SLACK;
    rec.observed = cert.min_margin;
    rec.min_margin = cert.min_margin;
    rec.status = if cert.passed() { CaseStatus::Pass } else { CaseStatus::Fail };
    rec.extra = format!(
        "samples={};worst_z={};worst_G={};worst_P={}",
        cert.samples,
        fmt_sig17(cert.worst.0),
        fmt_sig17(cert.worst.1),
        fmt_sig17(cert.worst.2)
    );
    Ok(CaseOutput { records: vec![rec], ..CaseOutput::default() })
}

fn case_solve_hj(cfg: &RunConfig, opts: &RunOptions, id: usize, c: &CaseParams) -> Result<CaseOutput> {
    let e = Exponents::new(c.p, c.q)?;
    let m = manifold(cfg.model, c.b, c.n)?;
    let field = solve_radial_hj(&m, e, c.s0, cfg.r0, cfg.r_max, cfg.tol_ode)?;
    let outcome = interior_check(&field, &m.curvature(), 2000)?;
    let z_res = if field.samples().iter().all(|s| s.s > 0.0) {
        fmt_sig17(z_equation_residual(&field)?)
    } else {
        "n/a".into()
    };
    let mut rec = CaseRecord::new(id, cfg.command, c).with_outcome(&outcome, estimate_status(outcome.pass, opts));
    rec.extra = format!(
        "s0={};status={};samples={};z_residual={};witness={}",
        fmt_sig17(c.s0),
        field.status(),
        field.samples().len(),
        z_res,
        fmt_sig17(outcome.witness)
    );
    let pts: Vec<_> = field.samples().iter().map(|s| (s.r, s.s)).collect();
    let plot = line_plot(&format!("slope u', case {id}"), "r", "u'", &pts, YScale::SymLog);
    Ok(CaseOutput { records: vec![rec], field: Some(field), plot: Some(plot), ..CaseOutput::default() })
}

fn case_pharmonic(cfg: &RunConfig, id: usize, c: &CaseParams) -> Result<CaseOutput> {
    let m = manifold(cfg.model, c.b, c.n)?;
    let opts = EnergyOptions { rel_energy_tol: cfg.tol_energy, ..EnergyOptions::default() };
    let (field, energy) = p_harmonic_energy_minimizer(&m, c.p, cfg.annulus, cfg.boundary, cfg.grid_points, opts)?;
    let flux = fit_flux(&m, c.p, cfg.annulus, cfg.boundary)?;
    let range = UniformSamples::new(cfg.annulus.0, cfg.annulus.1, cfg.grid_points + 1)?;
    let oracle = p_harmonic_radial_quadrature(&m, c.p, flux, range, cfg.boundary.0)?;
    let (dev, at) = field
        .samples()
        .iter()
        .zip(oracle.samples())
        .map(|(a, b)| ((a.u - b.u).abs(), a.r))
        .fold((0.0, cfg.annulus.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let outcome = EstimateOutcome::new(ORACLE_TOLERANCE, dev, at);
    let status = if outcome.pass { CaseStatus::Pass } else { CaseStatus::Fail };
    let mut rec = CaseRecord::new(id, cfg.command, c).with_outcome(&outcome, status);
    rec.extra = format!(
        "flux={};iterations={};energy={};witness={}",
        fmt_sig17(flux),
        energy.iterations,
        fmt_sig17(energy.energy),
        fmt_sig17(at)
    );
    let pts: Vec<_> = field.samples().iter().map(|s| (s.r, s.u)).collect();
    let plot = line_plot(&format!("p-harmonic profile, case {id}"), "r", "v", &pts, YScale::Linear);
    Ok(CaseOutput { records: vec![rec], field: Some(field), plot: Some(plot), ..CaseOutput::default() })
}

fn case_estimates(cfg: &RunConfig, opts: &RunOptions, id: usize, c: &CaseParams) -> Result<CaseOutput> {
    let e = Exponents::new(c.p, c.q)?;
    let lm = ModelManifold::log_model(c.b, c.n)?;
    let pc = ProofConstants::derive(c.n, e, lm.curvature(), c.r)?;
    let kappa = constant_slope(c.n, c.b, &e);
    let global = EstimateOutcome::new(global_gradient_bound(&e, c.b, pc.c_grad), kappa, 0.0);
    let field = constant_slope_solution(c.n, c.b, e, UniformSamples::new(-c.r, c.r, field_samples(cfg))?)?;
    let barrier = compare_to_barrier(&field, &pc, 0.0)?;
    let pass = global.pass && barrier.pass;
    let mut rec = CaseRecord::new(id, cfg.command, c).with_outcome(&global, estimate_status(pass, opts));
    rec.min_margin = global.relative_margin().min(barrier.relative_margin());
    let ratio = if kappa > 0.0 { global.bound_value / kappa } else { f64::NAN };
    rec.extra = format!(
        "c_grad={};sharpness_ratio={};barrier_w={};barrier_z={}",
        fmt_sig17(pc.c_grad),
        fmt_sig17(ratio),
        fmt_sig17(barrier.bound_value),
        fmt_sig17(barrier.observed_sup)
    );
    Ok(CaseOutput { records: vec![rec], ledger: Some(pc), field: Some(field), ..CaseOutput::default() })
}

fn case_harnack(cfg: &RunConfig, opts: &RunOptions, id: usize, c: &CaseParams) -> Result<CaseOutput> {
    let ch = harnack_constant(c.n, c.p)?;
    let range = UniformSamples::new(-SLAB, SLAB, field_samples(cfg))?;
    let exact = exact_p_harmonic_log_model(c.n, c.b, c.p, range)?;
    let lm = ModelManifold::log_model(c.b, c.n)?;
    let ends = horospherical_boundary(c.n, c.b, c.p);
    let flux = fit_flux(&lm, c.p, (-SLAB, SLAB), ends)?;
    let quad = p_harmonic_radial_quadrature(&lm, c.p, flux, range, ends.0)?;
    let a = harnack_field_check(&exact, c.b, ch)?;
    let b = harnack_field_check(&quad, c.b, ch)?;
    let exact_ratio = (c.n as f64 - 1.0) / (c.p - 1.0);
    let worst = if a.outcome.relative_margin() <= b.outcome.relative_margin() { a.outcome } else { b.outcome };
    let pass = a.outcome.pass && b.outcome.pass && exact_ratio <= ch;
    let mut rec = CaseRecord::new(id, cfg.command, c).with_outcome(&worst, estimate_status(pass, opts));
    rec.extra = format!(
        "c_harnack={};exact_ratio={};gradient_ratio_sup={};reference_level={};reference_exceeded={}",
        fmt_sig17(ch),
        fmt_sig17(exact_ratio),
        fmt_sig17(a.gradient_ratio_sup),
        fmt_sig17(a.reference_level),
        a.gradient_ratio_sup > a.reference_level
    );
    let pts: Vec<_> = exact.samples().iter().map(|s| (s.r, s.u)).collect();
    let plot = line_plot(&format!("exact p-harmonic function, case {id}"), "t", "v", &pts, YScale::SymLog);
    Ok(CaseOutput { records: vec![rec], field: Some(exact), plot: Some(plot), ..CaseOutput::default() })
}

/// Boundary values on `[-SLAB, SLAB]` of `1 + exp(-k t)`, `k = (n-1)B/(p-1)`.
/// The fitted field is positive on the whole space, not only on the slab.
pub fn horospherical_boundary(n: usize, b: f64, p: f64) -> (f64, f64) {
    let k = (n as f64 - 1.0) * b / (p - 1.0);
    (1.0 + (k * SLAB).exp(), 1.0 + (-k * SLAB).exp())
}

/// Contiguous runs of cases sharing `(n, p, q)`, with the index of their first case.
fn liouville_groups(cases: &[CaseParams]) -> Vec<(usize, Vec<CaseParams>)> {
    let mut groups: Vec<(usize, Vec<CaseParams>)> = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        match groups.last_mut() {
            Some((_, g)) if g[0].n == c.n && g[0].p == c.p && g[0].q == c.q => g.push(*c),
            _ => groups.push((i, vec![*c])),
        }
    }
    groups
}

fn run_liouville_group(cfg: &RunConfig, first: usize, group: Vec<CaseParams>) -> CaseOutput {
    let c0 = group[0];
    let s0s: Vec<f64> = group.iter().map(|c| c.s0).collect();
    let sweep = Exponents::new(c0.p, c0.q).and_then(|e| liouville_sweep(e, c0.n, &s0s, cfg.r_max, cfg.tol_ode));
    let records = group
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut rec = CaseRecord::new(first + k, cfg.command, c);
            let rep = match &sweep {
                Ok(rep) => rep,
                Err(e) => {
                    rec.extra = format!("s0={};error={e}", fmt_sig17(c.s0));
                    return rec;
                }
            };
            let entry = rep.entries.iter().find(|en| en.s0 == c.s0).expect("every slope has an entry");
            let drift = entry.tolerance_drift();
            rec.bound = cfg.r_max;
            rec.observed = entry.r_star.unwrap_or(cfg.r_max);
            rec.min_margin = drift.map(|d| 1.0 - d / BLOWUP_DRIFT_TOLERANCE).unwrap_or(f64::NAN);
            let stable = drift.is_some_and(|d| d <= BLOWUP_DRIFT_TOLERANCE);
            let monotone = rep.monotone || group.len() == 1;
            rec.status = match entry.verdict {
                LiouvilleVerdict::BlewUp if stable && monotone => CaseStatus::Pass,
                LiouvilleVerdict::BlewUp => CaseStatus::Fail,
                LiouvilleVerdict::Inconclusive => CaseStatus::Inconclusive,
                LiouvilleVerdict::Finding => CaseStatus::Finding,
            };
            let verdict = match entry.verdict {
                LiouvilleVerdict::BlewUp => "blew_up",
                LiouvilleVerdict::Inconclusive => "inconclusive",
                LiouvilleVerdict::Finding => "finding",
            };
            rec.extra = format!(
                "s0={};verdict={};r_star_exact={};drift={};monotone={}",
                fmt_sig17(c.s0),
                verdict,
                fmt_sig17(entry.r_star_exact),
                drift.map(fmt_sig17).unwrap_or_else(|| "n/a".into()),
                rep.monotone
            );
            rec
        })
        .collect();
    CaseOutput { records, ..CaseOutput::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(text: &str, dir: &Path, opts: RunOptions) -> VerificationReport {
        let text = format!("out_dir = {:?}\n{text}", dir.to_str().unwrap());
        run(&parse_config_str(&text, None).unwrap(), &opts).unwrap()
    }

    #[test]
    fn ledger_command_writes_only_constants() {
        let dir = tempfile::tempdir().unwrap();
        let rep = run_text("command = \"ledger\"\n[grid]\nn = [2, 3]\n", dir.path(), RunOptions::default());
        assert_eq!(rep.ledger.len(), 2);
        assert!(dir.path().join("ledger.csv").exists());
        assert!(!dir.path().join("report.csv").exists());
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn liouville_truncated_range_is_inconclusive() {
        let dir = tempfile::tempdir().unwrap();
        let rep = run_text("command = \"liouville\"\nr_max = 0.01\n[grid]\ns0 = [0.1]\n", dir.path(), RunOptions::default());
        assert_eq!(rep.records[0].status, CaseStatus::Inconclusive);
        assert_eq!(rep.exit_code(), 1);
    }

    #[test]
    fn undersized_run_reports_failure_rows() {
        let dir = tempfile::tempdir().unwrap();
        let rep = run_text(
            "command = \"solve-pharmonic\"\ngrid_points = 16\n[grid]\np = [4.0]\n",
            dir.path(),
            RunOptions::default(),
        );
        assert_eq!(rep.records[0].status, CaseStatus::Fail);
        assert_eq!(rep.exit_code(), 1);
    }

    #[test]
    fn findings_flag_reclassifies_estimate_failures() {
        assert_eq!(estimate_status(false, &RunOptions { allow_findings: true, jobs: None }), CaseStatus::Finding);
        assert_eq!(estimate_status(false, &RunOptions::default()), CaseStatus::Fail);
        assert_eq!(estimate_status(true, &RunOptions { allow_findings: true, jobs: None }), CaseStatus::Pass);
    }

    #[test]
    fn identical_runs_are_byte_identical() {
        let text = "command = \"solve-hj\"\nemit_svg = true\nr_max = 4.0\n[grid]\nn = [2, 3]\ns0 = [0.5, 3.0]\n";
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_text(text, a.path(), RunOptions { allow_findings: false, jobs: Some(1) });
        run_text(text, b.path(), RunOptions { allow_findings: false, jobs: Some(4) });
        for name in ["report.csv", "field_0.csv", "field_3.csv", "plot_2.svg"] {
            assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
        }
    }
}
