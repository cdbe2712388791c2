//! Seeded Monte Carlo harness: sample, classify, solve and measure Bernoulli
//! systems, persist one JSONL file per degree and aggregate a summary.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{hash_words, sample_bernoulli_system, IntPolynomial, PolySystem, SystemJson};
use crate::resultant::{classify_exceptional, DirectionalRecord};
use crate::solver::{count_check, solve_system, VerdictStatus, ZeroCycle};
use crate::stats::{
    arg, discrepancy_bounds, discrepancy_report, erdos_turan_size_with, eta_upper_bound, expected_measure_estimate,
    AngleMode, EtaOutcome, MeasureEstimate, MeasureSample, PolarBox, SupNormMode,
};

/// Relative slack on the inequality checks, absorbing rounding in the
/// floating-point evaluation of both sides.
pub const BOUND_SLACK: f64 = 1e-12;
/// Argument histogram bins over `(-pi, pi]`.
pub const ARG_BINS: usize = 64;
/// Log-spaced modulus bins over `[10^-LOG_SPAN, 10^LOG_SPAN]`.
pub const MODULUS_BINS: usize = 40;
pub const LOG_SPAN: f64 = 1.0;

fn default_epsilons() -> Vec<f64> {
    vec![0.1, 0.2]
}

fn default_angle_mode() -> AngleMode {
    AngleMode::Exact
}

fn default_grid() -> usize {
    256
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub trials_per_degree: u64,
    pub master_seed: u64,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_angle_mode")]
    pub angle_mode: AngleMode,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    #[serde(default)]
    pub box_probes: Vec<NamedBox>,
    /// No files are written when absent.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; the rayon default when absent. Never affects results.
    #[serde(default)]
    pub parallelism: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NamedBox {
    pub name: String,
    #[serde(flatten)]
    pub bx: PolarBox,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n) {
            return config_err(format!("n must be 1 or 2, got {}", self.n));
        }
        if self.degrees.is_empty() {
            return config_err("degree list is empty");
        }
        if self.degrees[0] == 0 || self.degrees.windows(2).any(|w| w[0] >= w[1]) {
            return config_err(format!("degrees must be positive and strictly ascending: {:?}", self.degrees));
        }
        if self.trials_per_degree == 0 {
            return config_err("trialsPerDegree must be at least 1");
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return config_err(format!("epsilon {e} outside (0, 1)"));
        }
        if self.grid_size == 0 {
            return config_err("gridSize must be positive");
        }
        if self.parallelism == Some(0) {
            return config_err("parallelism must be positive");
        }
        for b in &self.box_probes {
            if b.bx.dim() != self.n {
                return config_err(format!("box probe {:?} has dimension {}, expected {}", b.name, b.bx.dim(), self.n));
            }
            b.bx.validate()
                .map_err(|e| Error::Config(format!("box probe {:?}: {e}", b.name)))?;
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&s)
    }

    /// Seed of trial `trial_id` at degree `d`, independent of scheduling.
    pub fn trial_seed(&self, d: u32, trial_id: u64) -> u64 {
        hash_words(&[self.master_seed, self.n as u64, d as u64, trial_id])
    }
}

/// One line of a `trials_d<d>.jsonl` file. Measured discrepancies are null
/// on exceptional trials, which carry `conventionDelta = 1` instead. A null
/// `eta` means a facet resultant vanishes (`eta = inf`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub n: usize,
    pub d: u32,
    pub trial_id: u64,
    pub seed: u64,
    pub exceptional: bool,
    pub directional: DirectionalRecord,
    pub count_found: Option<usize>,
    pub count_expected: u64,
    pub count_verdict: VerdictStatus,
    pub count_reason: Option<String>,
    pub cross_check_agrees: Option<bool>,
    pub max_residual: Option<f64>,
    pub delta_ang: Option<f64>,
    pub angle_mode: Option<String>,
    pub delta_rad: Option<Vec<(f64, f64)>>,
    pub convention_delta: Option<f64>,
    pub eta: Option<f64>,
    pub eta_upper_bound: f64,
    pub b_ang: Option<f64>,
    pub b_rad: Option<Vec<(f64, f64)>>,
    pub bound_violations: Vec<String>,
    pub zeros: Option<ZeroCycle>,
}

impl TrialRecord {
    pub fn count_failed(&self) -> bool {
        self.count_verdict == VerdictStatus::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialTiming {
    pub d: u32,
    pub trial_id: u64,
    pub micros: u64,
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound + BOUND_SLACK * bound.abs()
}

/// Runs one trial. Pure given the config, degree and trial id.
pub fn run_trial(cfg: &ExperimentConfig, d: u32, trial_id: u64) -> Result<TrialRecord> {
    let seed = cfg.trial_seed(d, trial_id);
    let sys = sample_bernoulli_system(cfg.n, d, seed, trial_id)?;
    let report = classify_exceptional(&sys)?;
    let eta = erdos_turan_size_with(&sys, &report, SupNormMode::Upper)?;
    let eta_ub = eta_upper_bound(&sys)?;
    let eta_value = match &eta {
        EtaOutcome::Finite(r) => Some(r.eta),
        EtaOutcome::Infinite { .. } => None,
    };
    let mut violations = Vec::new();
    if let Some(e) = eta_value {
        if !within(e, eta_ub) {
            violations.push(format!("eta {e} exceeds its upper bound {eta_ub}"));
        }
    }
    let mut rec = TrialRecord {
        n: cfg.n,
        d,
        trial_id,
        seed,
        exceptional: report.exceptional,
        directional: report.to_record(),
        count_found: None,
        count_expected: (d as u64).pow(cfg.n as u32),
        count_verdict: VerdictStatus::Skipped,
        count_reason: None,
        cross_check_agrees: None,
        max_residual: None,
        delta_ang: None,
        angle_mode: None,
        delta_rad: None,
        convention_delta: None,
        eta: eta_value,
        eta_upper_bound: eta_ub,
        b_ang: None,
        b_rad: None,
        bound_violations: Vec::new(),
        zeros: None,
    };
    if report.exceptional {
        rec.convention_delta = Some(1.0);
        rec.count_reason = Some("system lies in the exceptional set".into());
        rec.bound_violations = violations;
        return Ok(rec);
    }
    let sol = match solve_system(&sys) {
        Ok(s) => s,
        Err(e) => {
            rec.count_verdict = VerdictStatus::Fail;
            rec.count_reason = Some(format!("solver failed: {e}"));
            rec.bound_violations = violations;
            return Ok(rec);
        }
    };
    let verdict = count_check(&sys, &sol.cycle, &report)?;
    let disc = discrepancy_report(&sol.cycle, cfg.angle_mode, cfg.grid_size, &cfg.epsilons)?;
    let eta_b = eta_value.unwrap_or(f64::INFINITY);
    let b_ang = discrepancy_bounds(eta_b, cfg.n, 0.5).0;
    let b_rad: Vec<(f64, f64)> = cfg
        .epsilons
        .iter()
        .map(|&e| (e, discrepancy_bounds(eta_b, cfg.n, e).1))
        .collect();
    if !within(disc.delta_ang, b_ang) {
        violations.push(format!("angle discrepancy {} exceeds {b_ang}", disc.delta_ang));
    }
    for (&(e, got), &(_, bound)) in disc.delta_rad.iter().zip(&b_rad) {
        if !within(got, bound) {
            violations.push(format!("radius discrepancy {got} at eps={e} exceeds {bound}"));
        }
    }
    rec.count_found = Some(verdict.found);
    rec.count_verdict = verdict.status;
    rec.count_reason = verdict.reason;
    rec.cross_check_agrees = sol.diagnostics.cross_check_agrees;
    rec.max_residual = Some(sol.diagnostics.max_residual);
    rec.delta_ang = Some(disc.delta_ang);
    rec.angle_mode = Some(disc.angle_mode);
    rec.delta_rad = Some(disc.delta_rad);
    rec.b_ang = Some(b_ang);
    rec.b_rad = Some(b_rad);
    rec.bound_violations = violations;
    rec.zeros = Some(sol.cycle);
    Ok(rec)
}

/// Records of one degree, sorted by trial id.
#[derive(Clone, Debug)]
pub struct DegreeRun {
    pub d: u32,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub runs: Vec<DegreeRun>,
    pub summary: SummaryTable,
    pub timings: Vec<TrialTiming>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutput {
    pub fn records(&self) -> impl Iterator<Item = &TrialRecord> {
        self.runs.iter().flat_map(|r| &r.records)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(p) = cfg.parallelism {
        builder = builder.num_threads(p);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    let mut runs = Vec::new();
    let mut timings = Vec::new();
    for &d in &cfg.degrees {
        let results: Vec<(TrialRecord, u64)> = pool.install(|| {
            (0..cfg.trials_per_degree)
                .into_par_iter()
                .map(|t| {
                    let start = Instant::now();
                    let rec = run_trial(cfg, d, t)?;
                    Ok((rec, start.elapsed().as_micros() as u64))
                })
                .collect::<Result<_>>()
        })?;
        let mut records = Vec::with_capacity(results.len());
        for (rec, micros) in results {
            timings.push(TrialTiming {
                d,
                trial_id: rec.trial_id,
                micros,
            });
            records.push(rec);
        }
        records.sort_by_key(|r| r.trial_id);
        runs.push(DegreeRun { d, records });
    }
    let all: Vec<&TrialRecord> = runs.iter().flat_map(|r| &r.records).collect();
    let summary = SummaryTable::from_records(cfg, all.iter().copied())?;
    let mut files = Vec::new();
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        files.push(write_json(&dir.join("config.json"), cfg)?);
        for run in &runs {
            files.push(write_jsonl(&dir.join(format!("trials_d{}.jsonl", run.d)), &run.records)?);
        }
        files.push(write_jsonl(&dir.join("timings.jsonl"), &timings)?);
        files.extend(emit_report(cfg, &all, ReportFormat::Json, true, dir)?);
        files.push(write_summary_csv(&summary, &dir.join("summary.csv"))?);
    }
    if let Some(bad) = all.iter().find(|r| !r.bound_violations.is_empty()) {
        let dump_dir = cfg.output_dir.clone().unwrap_or_else(std::env::temp_dir);
        fs::create_dir_all(&dump_dir).map_err(|e| Error::io(&dump_dir, e))?;
        let dump = dump_dir.join(format!("violation_n{}_d{}_t{}.json", bad.n, bad.d, bad.trial_id));
        let sys = sample_bernoulli_system(bad.n, bad.d, bad.seed, bad.trial_id)?;
        write_json(&dump, &ViolationDump {
            system: sys.to_json(),
            record: (*bad).clone(),
        })?;
        return Err(Error::BoundViolation {
            d: bad.d,
            trial: bad.trial_id,
            detail: bad.bound_violations.join("; "),
            dump,
        });
    }
    Ok(ExperimentOutput {
        runs,
        summary,
        timings,
        files,
    })
}

#[derive(Serialize)]
struct ViolationDump {
    system: SystemJson,
    record: TrialRecord,
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<PathBuf> {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<PathBuf> {
    let mut bytes = Vec::new();
    for item in items {
        serde_json::to_writer(&mut bytes, item)?;
        bytes.push(b'\n');
    }
    atomic_write(path, &bytes)
}

/// Reads every `trials_d<d>.jsonl` in `dir`, ordered by degree then trial.
pub fn read_records(dir: &Path) -> Result<Vec<TrialRecord>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if name.starts_with("trials_d") && name.ends_with(".jsonl") {
            paths.push(path);
        }
    }
    let mut records = Vec::new();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            records.push(serde_json::from_str::<TrialRecord>(line)?);
        }
    }
    records.sort_by_key(|r| (r.d, r.trial_id));
    Ok(records)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Mean of values summed in sorted order, so the result does not depend on
/// the order records arrive in.
fn mean(v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let len = v.len() as f64;
    Some(sorted(v).iter().sum::<f64>() / len)
}

fn median(v: Vec<f64>) -> Option<f64> {
    let v = sorted(v);
    let m = v.len();
    match m {
        0 => None,
        _ if m % 2 == 1 => Some(v[m / 2]),
        _ => Some((v[m / 2 - 1] + v[m / 2]) / 2.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxProbe {
    pub name: String,
    #[serde(flatten)]
    pub estimate: MeasureEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeSummary {
    pub d: u32,
    pub trials: usize,
    pub exceptional: usize,
    pub exceptional_rate: f64,
    pub mean_delta_ang: Option<f64>,
    pub median_delta_ang: Option<f64>,
    /// Mean over all trials with exceptional ones counted as 1.
    pub mean_delta_ang_with_convention: Option<f64>,
    pub angle_modes: Vec<String>,
    /// `(eps, mean)` over non-exceptional trials.
    pub mean_delta_rad: Vec<(f64, Option<f64>)>,
    /// Mean over trials with finite `eta`.
    pub mean_eta: Option<f64>,
    pub infinite_eta: usize,
    pub violations: usize,
    pub count_failures: usize,
    pub cross_check_disagreements: usize,
    /// The whole of `(C^*)^n` followed by the configured probes.
    pub box_probes: Vec<BoxProbe>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SummaryTable {
    pub n: usize,
    pub degrees: Vec<DegreeSummary>,
    pub exceptional_rate_non_increasing: bool,
    pub mean_delta_ang_decreasing: bool,
    /// Per probe name: estimates non-increasing in `d`.
    pub box_probe_non_increasing: BTreeMap<String, bool>,
    /// Least-squares `c` in `exceptionalRate ~ c / d`.
    pub fitted_rate_constant: f64,
    pub total_violations: usize,
    pub total_count_failures: usize,
}

pub const FULL_BOX: &str = "full";

fn decreasing(v: &[Option<f64>], strict: bool) -> bool {
    v.windows(2).all(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) if strict => b < a,
        (Some(a), Some(b)) => b <= a,
        _ => false,
    })
}

impl SummaryTable {
    /// Aggregates records of any order; the result depends only on the set.
    pub fn from_records<'a>(cfg: &ExperimentConfig, records: impl IntoIterator<Item = &'a TrialRecord>) -> Result<Self> {
        let mut by_degree: BTreeMap<u32, Vec<&TrialRecord>> = BTreeMap::new();
        for r in records {
            by_degree.entry(r.d).or_default().push(r);
        }
        let mut probes = vec![NamedBox {
            name: FULL_BOX.into(),
            bx: PolarBox::full(cfg.n),
        }];
        probes.extend(cfg.box_probes.iter().cloned());
        let mut degrees = Vec::new();
        for (&d, recs) in &mut by_degree {
            recs.sort_by_key(|r| r.trial_id);
            let measured: Vec<&&TrialRecord> = recs.iter().filter(|r| !r.exceptional).collect();
            let exceptional = recs.len() - measured.len();
            let angles: Vec<f64> = measured.iter().filter_map(|r| r.delta_ang).collect();
            let with_convention: Vec<f64> = recs
                .iter()
                .filter_map(|r| r.delta_ang.or(r.convention_delta))
                .collect();
            let mut modes: Vec<String> = measured.iter().filter_map(|r| r.angle_mode.clone()).collect();
            modes.sort();
            modes.dedup();
            let mean_delta_rad = cfg
                .epsilons
                .iter()
                .map(|&e| {
                    let vals = measured
                        .iter()
                        .filter_map(|r| r.delta_rad.as_ref()?.iter().find(|p| p.0 == e).map(|p| p.1))
                        .collect();
                    (e, mean(vals))
                })
                .collect();
            let samples: Vec<MeasureSample> = recs
                .iter()
                .map(|r| MeasureSample {
                    d,
                    exceptional: r.exceptional,
                    cycle: r.zeros.as_ref(),
                })
                .collect();
            let box_probes = probes
                .iter()
                .map(|p| {
                    Ok(BoxProbe {
                        name: p.name.clone(),
                        estimate: expected_measure_estimate(&samples, &p.bx)?,
                    })
                })
                .collect::<Result<_>>()?;
            degrees.push(DegreeSummary {
                d,
                trials: recs.len(),
                exceptional,
                exceptional_rate: exceptional as f64 / recs.len() as f64,
                mean_delta_ang: mean(angles.clone()),
                median_delta_ang: median(angles),
                mean_delta_ang_with_convention: mean(with_convention),
                angle_modes: modes,
                mean_delta_rad,
                mean_eta: mean(recs.iter().filter_map(|r| r.eta).collect()),
                infinite_eta: recs.iter().filter(|r| r.eta.is_none()).count(),
                violations: recs.iter().filter(|r| !r.bound_violations.is_empty()).count(),
                count_failures: recs.iter().filter(|r| r.count_failed()).count(),
                cross_check_disagreements: recs.iter().filter(|r| r.cross_check_agrees == Some(false)).count(),
                box_probes,
            });
        }
        let rates: Vec<Option<f64>> = degrees.iter().map(|s| Some(s.exceptional_rate)).collect();
        let angles: Vec<Option<f64>> = degrees.iter().map(|s| s.mean_delta_ang).collect();
        let box_probe_non_increasing = probes
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let est: Vec<Option<f64>> = degrees.iter().map(|s| Some(s.box_probes[i].estimate.estimate)).collect();
                (p.name.clone(), decreasing(&est, false))
            })
            .collect();
        let (num, den) = degrees.iter().fold((0.0, 0.0), |(num, den), s| {
            let inv = 1.0 / s.d as f64;
            (num + s.exceptional_rate * inv, den + inv * inv)
        });
        Ok(SummaryTable {
            n: cfg.n,
            exceptional_rate_non_increasing: decreasing(&rates, false),
            mean_delta_ang_decreasing: decreasing(&angles, true),
            box_probe_non_increasing,
            fitted_rate_constant: if den > 0.0 { num / den } else { 0.0 },
            total_violations: degrees.iter().map(|s| s.violations).sum(),
            total_count_failures: degrees.iter().map(|s| s.count_failures).sum(),
            degrees,
        })
    }
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Columns `d, trials, exceptional_rate, mean_delta_ang,
/// mean_delta_rad_eps<eps>..., mean_eta, violations`.
pub fn summary_csv(summary: &SummaryTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let eps: Vec<f64> = summary
        .degrees
        .first()
        .map(|s| s.mean_delta_rad.iter().map(|p| p.0).collect())
        .unwrap_or_default();
    let mut header = vec!["d".to_string(), "trials".into(), "exceptional_rate".into(), "mean_delta_ang".into()];
    header.extend(eps.iter().map(|e| format!("mean_delta_rad_eps{e}")));
    header.extend(["mean_eta".to_string(), "violations".into()]);
    w.write_record(&header)?;
    for s in &summary.degrees {
        let mut row = vec![
            s.d.to_string(),
            s.trials.to_string(),
            s.exceptional_rate.to_string(),
            csv_opt(s.mean_delta_ang),
        ];
        row.extend(s.mean_delta_rad.iter().map(|p| csv_opt(p.1)));
        row.extend([csv_opt(s.mean_eta), s.violations.to_string()]);
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of numbers is UTF-8"))
}

pub fn write_summary_csv(summary: &SummaryTable, path: &Path) -> Result<PathBuf> {
    atomic_write(path, summary_csv(summary)?.as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Bin `k` is `(-pi + k w, -pi + (k + 1) w]` with `w = 2 pi / bins`.
pub fn argument_histogram(cycles: &[&ZeroCycle], coord: usize, bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    let width = 2.0 * PI / bins as f64;
    for c in cycles {
        for p in &c.points {
            let t = arg(p.coords.0[coord]);
            let k = (((t + PI) / width).ceil() as usize).clamp(1, bins) - 1;
            h[k] += p.mult as u64;
        }
    }
    h
}

/// Counts of `log10 |z|` below `-span`, in `bins` equal cells of
/// `[-span, span)`, and at or above `span`.
pub fn modulus_histogram(cycles: &[&ZeroCycle], coord: usize, bins: usize, span: f64) -> Vec<u64> {
    let mut h = vec![0u64; bins + 2];
    for c in cycles {
        for p in &c.points {
            let l = p.coords.0[coord].norm().log10();
            let k = if l < -span {
                0
            } else if l >= span {
                bins + 1
            } else {
                1 + (((l + span) / (2.0 * span) * bins as f64) as usize).min(bins - 1)
            };
            h[k] += p.mult as u64;
        }
    }
    h
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlatnessCheck {
    pub d: u32,
    pub coord: usize,
    /// Largest over smallest argument-bin count; infinite if a bin is empty.
    pub max_min_ratio: Option<f64>,
}

/// Writes the summary (CSV or JSON) and, optionally, argument and modulus
/// histograms, box-probe estimates and an argument flatness check.
pub fn emit_report(
    cfg: &ExperimentConfig,
    records: &[&TrialRecord],
    format: ReportFormat,
    histograms: bool,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Domain("no trial records to report".into()));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let summary = SummaryTable::from_records(cfg, records.iter().copied())?;
    let mut files = vec![match format {
        ReportFormat::Json => write_json(&out.join("summary.json"), &summary)?,
        ReportFormat::Csv => write_summary_csv(&summary, &out.join("summary.csv"))?,
    }];
    let mut probes = csv::Writer::from_writer(Vec::new());
    probes.write_record(["d", "box", "estimate", "haar", "hits", "normalizer"])?;
    for s in &summary.degrees {
        for p in &s.box_probes {
            let e = &p.estimate;
            probes.write_record([
                s.d.to_string(),
                p.name.clone(),
                e.estimate.to_string(),
                e.haar.to_string(),
                e.hits.to_string(),
                e.normalizer.to_string(),
            ])?;
        }
    }
    files.push(atomic_write(
        &out.join("box_probes.csv"),
        &probes.into_inner().map_err(|e| Error::Domain(e.to_string()))?,
    )?);
    if !histograms {
        return Ok(files);
    }
    let mut by_degree: BTreeMap<u32, Vec<&ZeroCycle>> = BTreeMap::new();
    for r in records {
        let entry = by_degree.entry(r.d).or_default();
        if let Some(z) = &r.zeros {
            entry.push(z);
        }
    }
    let mut args = csv::Writer::from_writer(Vec::new());
    args.write_record(["d", "coord", "bin", "lo", "hi", "count"])?;
    let mut mods = csv::Writer::from_writer(Vec::new());
    mods.write_record(["d", "coord", "bin", "lo", "hi", "count"])?;
    let mut flatness = Vec::new();
    let width = 2.0 * PI / ARG_BINS as f64;
    let step = 2.0 * LOG_SPAN / MODULUS_BINS as f64;
    for (&d, cycles) in &by_degree {
        for coord in 0..cfg.n {
            let h = argument_histogram(cycles, coord, ARG_BINS);
            for (k, c) in h.iter().enumerate() {
                let lo = -PI + k as f64 * width;
                args.write_record([
                    d.to_string(),
                    coord.to_string(),
                    k.to_string(),
                    lo.to_string(),
                    (lo + width).to_string(),
                    c.to_string(),
                ])?;
            }
            let (lo, hi) = (h.iter().min().copied(), h.iter().max().copied());
            flatness.push(FlatnessCheck {
                d,
                coord,
                max_min_ratio: match (lo, hi) {
                    (Some(lo), Some(hi)) if lo > 0 => Some(hi as f64 / lo as f64),
                    _ => None,
                },
            });
            let m = modulus_histogram(cycles, coord, MODULUS_BINS, LOG_SPAN);
            for (k, c) in m.iter().enumerate() {
                let (lo, hi) = match k {
                    0 => (0.0, 10f64.powf(-LOG_SPAN)),
                    _ if k == MODULUS_BINS + 1 => (10f64.powf(LOG_SPAN), f64::INFINITY),
                    _ => {
                        let a = -LOG_SPAN + (k - 1) as f64 * step;
                        (10f64.powf(a), 10f64.powf(a + step))
                    }
                };
                mods.write_record([
                    d.to_string(),
                    coord.to_string(),
                    k.to_string(),
                    lo.to_string(),
                    hi.to_string(),
                    c.to_string(),
                ])?;
            }
        }
    }
    files.push(atomic_write(
        &out.join("hist_arg.csv"),
        &args.into_inner().map_err(|e| Error::Domain(e.to_string()))?,
    )?);
    files.push(atomic_write(
        &out.join("hist_modulus.csv"),
        &mods.into_inner().map_err(|e| Error::Domain(e.to_string()))?,
    )?);
    files.push(write_json(&out.join("flatness.json"), &flatness)?);
    Ok(files)
}

/// One of the 64 systems `a_i + b_i x + c_i y` with `±1` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct D1Row {
    pub pattern: u8,
    /// `[[a1, b1, c1], [a2, b2, c2]]`.
    pub coefficients: [[i64; 3]; 2],
    pub oracle_exceptional: bool,
    pub oracle_reason: Option<String>,
    pub classifier_exceptional: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct D1Table {
    pub rows: Vec<D1Row>,
    pub exceptional_count: usize,
    pub exceptional_fraction: f64,
}

/// Bit `3 i + j` of `pattern` set means coefficient `j` of `f_{i+1}` is `-1`.
pub fn d1_coefficients(pattern: u8) -> [[i64; 3]; 2] {
    let mut c = [[1i64; 3]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if pattern >> (3 * i + j) & 1 == 1 {
                *v = -1;
            }
        }
    }
    c
}

/// Linear-algebra verdict: parallel lines, or a Cramer solution with a zero
/// coordinate.
pub fn d1_oracle(c: &[[i64; 3]; 2]) -> Option<String> {
    let [[a1, b1, c1], [a2, b2, c2]] = *c;
    let det = b1 * c2 - b2 * c1;
    if det == 0 {
        return Some("parallel lines".into());
    }
    // Cramer on b x + c y = -a.
    let x_num = a2 * c1 - a1 * c2;
    let y_num = a1 * b2 - a2 * b1;
    if x_num == 0 || y_num == 0 {
        return Some(format!("solution ({}/{det}, {}/{det}) has a zero coordinate", x_num, y_num));
    }
    None
}

pub fn enumerate_d1() -> Result<D1Table> {
    let rows = (0u8..64)
        .map(|pattern| {
            let c = d1_coefficients(pattern);
            let polys = c
                .iter()
                .map(|[a, b, cc]| {
                    IntPolynomial::from_terms(2, [(vec![0, 0], *a), (vec![1, 0], *b), (vec![0, 1], *cc)])
                })
                .collect::<Result<Vec<_>>>()?;
            let sys = PolySystem::new(2, 1, polys)?;
            let classifier = classify_exceptional(&sys)?.exceptional;
            let reason = d1_oracle(&c);
            if classifier != reason.is_some() {
                return Err(Error::Domain(format!(
                    "classifier disagrees with linear algebra on pattern {pattern}: {c:?} (oracle {reason:?}, classifier {classifier})"
                )));
            }
            Ok(D1Row {
                pattern,
                coefficients: c,
                oracle_exceptional: reason.is_some(),
                oracle_reason: reason,
                classifier_exceptional: classifier,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let exceptional_count = rows.iter().filter(|r| r.oracle_exceptional).count();
    Ok(D1Table {
        exceptional_fraction: exceptional_count as f64 / rows.len() as f64,
        exceptional_count,
        rows,
    })
}
