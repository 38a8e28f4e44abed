//! Commands behind the `dofcsit` binary.
//!
//! Each `cmd_*` function is pure: it takes parsed inputs and returns a
//! report. [`run`] wires them to files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use dofcsit_core::io::{
    fmt_num, parse_profile, sig15, sweep_csv, sweep_summary, to_json, DofPairDoc, PlanDoc, PlanReport, ProfileDoc,
    RegionDoc, ScheduleDoc, SweepSummary, WeightsDoc,
};
use dofcsit_core::{
    all_passed, classify, compose_weighted, decompose, dof_region, pair_u0, rate_accounting, reduce_to_balanced,
    sum_dof_optimal, sum_dof_suboptimal, sweep, synthesize_with, validate_plan, weights, CsitProfile, Error,
    ReducePolicy, SimConfig, SubchannelUse, SweepResult, User,
};

/// Slope tolerance used for simulate pass/fail.
pub const SLOPE_TOL: f64 = 0.1;

/// Composition residual above which `region` reports failure.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Region,
    Decompose,
    Synth,
    Simulate,
    Compare,
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub profile_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub sim: Option<SimConfig>,
    pub owner: User,
    pub reduce_policy: ReducePolicy,
    pub grid: CompareGrid,
}

impl RunManifest {
    pub fn new(command: Command) -> Self {
        RunManifest {
            command,
            profile_path: None,
            output_path: None,
            sim: (command == Command::Simulate).then(SimConfig::default),
            owner: User::One,
            reduce_policy: ReducePolicy::default(),
            grid: CompareGrid::default(),
        }
    }

    pub fn check(&self) -> anyhow::Result<()> {
        if self.command != Command::Compare && self.profile_path.is_none() {
            bail!("--profile is required for this command");
        }
        if (self.command == Command::Simulate) != self.sim.is_some() {
            bail!("simulation settings are only valid for `simulate`");
        }
        if let Some(p) = &self.profile_path {
            if !p.is_file() {
                bail!("profile file {} not found", p.display());
            }
        }
        Ok(())
    }
}

/// Optional config file; every field mirrors a command-line flag.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub profile: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub owner: Option<u8>,
    pub reduce_policy: Option<ReducePolicy>,
    pub snr_db: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub fit_points: Option<usize>,
    pub threads: Option<usize>,
    pub step: Option<f64>,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Machine-readable main output.
    pub output: String,
    /// Extra files as `(path, contents)`, written next to the main output.
    pub extra: Vec<(PathBuf, String)>,
    /// Human-readable summary.
    pub summary: String,
    pub warnings: Vec<String>,
    /// All internal checks passed.
    pub ok: bool,
}

pub fn load_profile(path: &Path) -> anyhow::Result<CsitProfile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_profile(&text).with_context(|| format!("in {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub profile: ProfileDoc,
    pub class: &'static str,
    pub region: RegionDoc,
    pub weights: WeightsDoc,
    /// Largest vertex distance between the region and its weighted composition.
    pub composition_residual: f64,
}

pub fn cmd_region(profile: &CsitProfile) -> Result<RegionReport, Error> {
    let region = dof_region(profile);
    let w = weights(profile);
    let composed = compose_weighted(&w, profile.len())?;
    Ok(RegionReport {
        profile: profile.into(),
        class: classify(profile).kind.label(),
        region: (&region).into(),
        weights: (&w).into(),
        composition_residual: region.vertex_distance(&composed),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionDoc {
    pub reduced_user: Option<u8>,
    pub deltas: Vec<f64>,
    pub reduced: ProfileDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposeReport {
    pub profile: ProfileDoc,
    pub class: &'static str,
    /// Balanced subband groups, numbered from 1.
    pub separable_groups: Option<Vec<Vec<usize>>>,
    pub subchannels: Vec<SubchannelUse>,
    pub reduce_policy: String,
    pub reduction: ReductionDoc,
    pub schedule: ScheduleDoc,
}

pub fn cmd_decompose(profile: &CsitProfile, policy: ReducePolicy) -> Result<DecomposeReport, Error> {
    let class = classify(profile);
    let reduction = reduce_to_balanced(profile, policy)?;
    let schedule = pair_u0(&reduction.reduced)?;
    let subchannels = decompose(profile)
        .into_iter()
        .map(|s| SubchannelUse {
            subband: s.subband + 1,
            pp: sig15(s.pp),
            pn: sig15(s.pn),
            np: sig15(s.np),
            nn: sig15(s.nn),
        })
        .collect();
    Ok(DecomposeReport {
        profile: profile.into(),
        class: class.kind.label(),
        separable_groups: class
            .balanced_partition
            .map(|s| s.groups.iter().map(|g| g.iter().map(|j| j + 1).collect()).collect()),
        subchannels,
        reduce_policy: policy.to_string(),
        reduction: ReductionDoc {
            reduced_user: reduction.reduced_user.map(User::number),
            deltas: reduction.deltas.iter().map(|&d| sig15(d)).collect(),
            reduced: (&reduction.reduced).into(),
        },
        schedule: (&schedule).into(),
    })
}

pub fn cmd_synth(profile: &CsitProfile, owner: User, policy: ReducePolicy) -> Result<PlanReport, Error> {
    let plan = synthesize_with(profile, owner, policy)?;
    let checks = validate_plan(&plan);
    Ok(PlanReport {
        plan: PlanDoc::from(&plan),
        rate_accounting: rate_accounting(&plan).into(),
        all_checks_passed: all_passed(&checks),
        checks,
    })
}

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub result: SweepResult,
    pub csv: String,
    pub summary: SweepSummary,
}

pub fn cmd_simulate(
    profile: &CsitProfile,
    owner: User,
    policy: ReducePolicy,
    cfg: &SimConfig,
) -> anyhow::Result<SimulateReport> {
    cfg.validate()?;
    let plan = synthesize_with(profile, owner, policy)?;
    let result = sweep(&plan, cfg)?;
    let csv = sweep_csv(&result)?;
    let summary = sweep_summary(&result, cfg.fit_points, cfg.seed, SLOPE_TOL);
    Ok(SimulateReport { result, csv, summary })
}

/// Points of the `(alpha, beta)` comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum CompareGrid {
    /// Every `alpha <= beta` on `{0, step, 2 step, ..., 1}`.
    Step(f64),
    /// Cartesian product of the two lists.
    Lists { alpha: Vec<f64>, beta: Vec<f64> },
}

impl Default for CompareGrid {
    fn default() -> Self {
        CompareGrid::Step(0.01)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub alpha: f64,
    pub beta: f64,
    pub d_sub: f64,
    pub d_opt: f64,
    pub gap: f64,
    /// `3 beta - alpha > 2`.
    pub strict_gap: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub rows: Vec<CompareRow>,
    pub warnings: Vec<String>,
}

impl CompareTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,beta,d_sub,d_opt,gap,strict_gap\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                fmt_num(r.alpha),
                fmt_num(r.beta),
                fmt_num(r.d_sub),
                fmt_num(r.d_opt),
                fmt_num(r.gap),
                r.strict_gap
            );
        }
        s
    }
}

fn step_points(step: f64) -> anyhow::Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        bail!("--step must be in (0, 1], got {step}");
    }
    let n = (1.0 / step + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|k| sig15(k as f64 * step)).collect();
    if v.last().is_some_and(|&x| x < 1.0 - 1e-12) {
        v.push(1.0);
    }
    Ok(v)
}

pub fn compare_row(alpha: f64, beta: f64) -> Result<CompareRow, Error> {
    let d_opt = sum_dof_optimal(alpha, beta)?;
    let d_sub = sum_dof_suboptimal(alpha, beta)?;
    let gap = d_opt - d_sub;
    Ok(CompareRow {
        alpha,
        beta,
        d_sub,
        d_opt,
        gap: if gap.abs() <= 1e-12 { 0.0 } else { gap },
        strict_gap: 3.0 * beta - alpha > 2.0 + 1e-12,
    })
}

pub fn cmd_compare(grid: &CompareGrid) -> anyhow::Result<CompareTable> {
    let pairs: Vec<(f64, f64)> = match grid {
        CompareGrid::Step(step) => {
            let pts = step_points(*step)?;
            pts.iter()
                .flat_map(|&b| pts.iter().filter(move |&&a| a <= b).map(move |&a| (a, b)))
                .collect()
        }
        CompareGrid::Lists { alpha, beta } => beta
            .iter()
            .flat_map(|&b| alpha.iter().map(move |&a| (a, b)))
            .collect(),
    };
    let mut table = CompareTable {
        rows: Vec::with_capacity(pairs.len()),
        warnings: Vec::new(),
    };
    for (a, b) in pairs {
        match compare_row(a, b) {
            Ok(row) => table.rows.push(row),
            Err(e @ Error::OrderViolation { .. }) => table.warnings.push(format!("skipped: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(table)
}

/// Path of the summary document written alongside a sweep CSV.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    out.with_file_name(format!("{stem}.summary.json"))
}

fn fmt_pair(d: &DofPairDoc) -> String {
    format!("({}, {})", fmt_num(d.d1), fmt_num(d.d2))
}

/// Runs one command and returns its outputs without touching the filesystem
/// beyond reading the profile.
pub fn execute(m: &RunManifest) -> anyhow::Result<Outcome> {
    m.check()?;
    let profile = match &m.profile_path {
        Some(p) => Some(load_profile(p)?),
        None => None,
    };
    let profile = || profile.as_ref().expect("checked by RunManifest::check");
    let mut warnings = Vec::new();
    let (output, extra, summary, ok) = match m.command {
        Command::Region => {
            let r = cmd_region(profile())?;
            let ok = r.composition_residual <= RESIDUAL_TOL;
            let summary = format!(
                "class {}; sum DoF {}; vertices {}; r_bar {}, r_hat {}, r_tilde {}, r_hat' {}; composition residual {:e}",
                r.class,
                fmt_num(1.0 + r.region.min_avg),
                r.region
                    .vertices
                    .iter()
                    .map(|v| format!("({}, {})", fmt_num(v[0]), fmt_num(v[1])))
                    .collect::<Vec<_>>()
                    .join(" "),
                fmt_num(r.weights.r_bar),
                fmt_num(r.weights.r_hat),
                fmt_num(r.weights.r_tilde),
                fmt_num(r.weights.r_hat_prime),
                r.composition_residual
            );
            (to_json(&r)?, vec![], summary, ok)
        }
        Command::Decompose => {
            let r = cmd_decompose(profile(), m.reduce_policy)?;
            let summary = format!(
                "class {}; {} u0 message(s), total pre-log {}; reduced user {}",
                r.class,
                r.schedule.messages.len(),
                fmt_num(r.schedule.messages.iter().map(|x| x.rate_prelog).sum()),
                r.reduction.reduced_user.map_or("none".into(), |u| u.to_string())
            );
            (to_json(&r)?, vec![], summary, true)
        }
        Command::Synth => {
            let r = cmd_synth(profile(), m.owner, m.reduce_policy)?;
            let failed: Vec<String> = r
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} at {}: {}", c.check, c.location, c.detail))
                .collect();
            let mut summary = format!(
                "DoF {}; {} checks, {} failed",
                fmt_pair(&r.rate_accounting),
                r.checks.len(),
                failed.len()
            );
            for f in &failed {
                let _ = write!(summary, "\n  {f}");
            }
            (to_json(&r)?, vec![], summary, r.all_checks_passed)
        }
        Command::Simulate => {
            let cfg = m.sim.as_ref().expect("checked by RunManifest::check");
            let r = cmd_simulate(profile(), m.owner, m.reduce_policy, cfg)?;
            let s = &r.summary;
            let summary = format!(
                "fitted {} vs target {}; sum {} vs {}; {}",
                fmt_pair(&s.fitted),
                fmt_pair(&s.target),
                fmt_num(s.fitted_sum),
                fmt_num(s.target_sum),
                if s.pass { "pass" } else { "FAIL" }
            );
            let extra = match &m.output_path {
                Some(out) => vec![(summary_path(out), to_json(s)?)],
                None => vec![],
            };
            (r.csv, extra, summary, s.pass)
        }
        Command::Compare => {
            let t = cmd_compare(&m.grid)?;
            warnings.extend(t.warnings.iter().cloned());
            let strict = t.rows.iter().filter(|r| r.strict_gap).count();
            let summary = format!("{} rows, {} with a strict gap", t.rows.len(), strict);
            (t.to_csv(), vec![], summary, true)
        }
    };
    Ok(Outcome {
        output,
        extra,
        summary,
        warnings,
        ok,
    })
}

/// Executes and writes outputs; without an output path the main output goes
/// to stdout.
pub fn run(m: &RunManifest) -> anyhow::Result<Outcome> {
    let outcome = execute(m)?;
    match &m.output_path {
        Some(out) => {
            fs::write(out, &outcome.output).with_context(|| format!("writing {}", out.display()))?;
            for (path, text) in &outcome.extra {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        None => print!("{}", outcome.output),
    }
    Ok(outcome)
}
