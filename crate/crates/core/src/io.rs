//! File formats: profile documents (TOML), region / schedule / plan reports
//! (JSON) and sweep tables (CSV).
//!
//! Numbers are written with at most 15 significant digits. Subbands are
//! numbered from 1 in every document.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::decomposition::U0Schedule;
use crate::error::Error as CoreError;
use crate::profile::{validate_profile, CsitProfile};
use crate::region::{DofRegion, Weights};
use crate::scheme::{CheckResult, DofPair, Precoder, SymbolKind, TransmissionPlan};
use crate::sim::SweepResult;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error{}{}: {message}", .line.map(|l| format!(" at line {l}")).unwrap_or_default(), .field.as_ref().map(|f| format!(" (field `{f}`)")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] CoreError),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

pub(crate) fn serialize_display<T: fmt::Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

/// Rounds to 15 significant digits.
pub fn sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` rounded to 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    let r = sig15(x);
    if r == 0.0 {
        return "0".into();
    }
    if r.abs() < 1e-6 {
        return format!("{r:e}");
    }
    format!("{r}")
}

fn round_all(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| sig15(x)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    #[serde(rename = "L")]
    pub l: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl From<&CsitProfile> for ProfileDoc {
    fn from(p: &CsitProfile) -> Self {
        ProfileDoc {
            l: p.len(),
            a: round_all(p.a()),
            b: round_all(p.b()),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn field_in(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

pub fn parse_profile(text: &str) -> Result<CsitProfile, FormatError> {
    let doc: ProfileDoc = toml::from_str(text).map_err(|e| {
        let message = e.message().to_string();
        FormatError::Parse {
            line: e.span().map(|s| line_of(text, s.start)),
            field: field_in(&message),
            message,
        }
    })?;
    let field_line = |name: &str| {
        text.lines()
            .position(|l| l.trim_start().starts_with(name))
            .map(|i| i + 1)
    };
    validate_profile(doc.l, doc.a, doc.b).map_err(|e| match e {
        CoreError::OutOfRange { user, .. } => {
            let field = if user == 1 { "a" } else { "b" };
            FormatError::Parse {
                line: field_line(field),
                field: Some(field.into()),
                message: e.to_string(),
            }
        }
        CoreError::LengthMismatch { .. } | CoreError::NoSubbands => FormatError::Parse {
            line: field_line("L"),
            field: Some("L".into()),
            message: e.to_string(),
        },
        other => FormatError::Invalid(other),
    })
}

pub fn serialize_profile(profile: &CsitProfile) -> String {
    toml::to_string(&ProfileDoc::from(profile)).expect("profile documents always serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionDoc {
    pub min_avg: f64,
    pub vertices: Vec<[f64; 2]>,
}

impl From<&DofRegion> for RegionDoc {
    fn from(r: &DofRegion) -> Self {
        RegionDoc {
            min_avg: sig15(r.min_avg),
            vertices: r.vertices.iter().map(|&(x, y)| [sig15(x), sig15(y)]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightsDoc {
    pub r_bar: f64,
    pub r_hat: f64,
    pub r_tilde: f64,
    pub r_hat_prime: f64,
}

impl From<&Weights> for WeightsDoc {
    fn from(w: &Weights) -> Self {
        WeightsDoc {
            r_bar: sig15(w.r_bar),
            r_hat: sig15(w.r_hat),
            r_tilde: sig15(w.r_tilde),
            r_hat_prime: sig15(w.r_hat_prime),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofPairDoc {
    pub d1: f64,
    pub d2: f64,
}

impl From<DofPair> for DofPairDoc {
    fn from(d: DofPair) -> Self {
        DofPairDoc {
            d1: sig15(d.d1),
            d2: sig15(d.d2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessageDoc {
    pub id: usize,
    pub rate_prelog: f64,
    pub donor: usize,
    pub receiver: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerStackDoc {
    pub subband: usize,
    pub layers: Vec<usize>,
    pub tau: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleDoc {
    pub messages: Vec<MessageDoc>,
    pub per_subband: Vec<LayerStackDoc>,
}

impl From<&U0Schedule> for ScheduleDoc {
    fn from(s: &U0Schedule) -> Self {
        ScheduleDoc {
            messages: s
                .messages
                .iter()
                .map(|m| MessageDoc {
                    id: m.id,
                    rate_prelog: sig15(m.rate_prelog),
                    donor: m.donor + 1,
                    receiver: m.receiver + 1,
                })
                .collect(),
            per_subband: s
                .per_subband
                .iter()
                .enumerate()
                .map(|(j, ids)| LayerStackDoc {
                    subband: j + 1,
                    layers: ids.clone(),
                    tau: round_all(&s.tau(j)),
                })
                .collect(),
        }
    }
}

/// Lower power edge: an exponent, or the string `"floor"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PowerLo {
    Exponent(f64),
    Floor(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolDoc {
    pub kind: &'static str,
    pub message: String,
    pub power_hi: f64,
    pub power_lo: PowerLo,
    pub share: f64,
    pub rate_prelog: f64,
    pub precoder: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubbandDoc {
    pub subband: usize,
    pub symbols: Vec<SymbolDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeStepDoc {
    pub symbol: String,
    pub interference: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeOrderDoc {
    pub user: u8,
    pub subband: usize,
    pub known: Vec<String>,
    pub steps: Vec<DecodeStepDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanDoc {
    pub common_owner: u8,
    pub reduce_policy: String,
    pub original: ProfileDoc,
    pub profile: ProfileDoc,
    pub schedule: ScheduleDoc,
    pub subbands: Vec<SubbandDoc>,
    pub decode_orders: Vec<DecodeOrderDoc>,
}

fn kind_name(kind: SymbolKind) -> &'static str {
    match kind {
        SymbolKind::CommonI => "common_i",
        SymbolKind::PrivateU => "private_u",
        SymbolKind::PrivateV => "private_v",
        SymbolKind::CommonII { .. } => "common_ii",
    }
}

fn precoder_name(p: Precoder) -> &'static str {
    match p {
        Precoder::AntennaOne => "antenna_one",
        Precoder::OrthoToGhat => "ortho_to_g_hat",
        Precoder::OrthoToHhat => "ortho_to_h_hat",
    }
}

impl From<&TransmissionPlan> for PlanDoc {
    fn from(plan: &TransmissionPlan) -> Self {
        let label = |i: usize| plan.symbols[i].message().to_string();
        PlanDoc {
            common_owner: plan.common_owner.number(),
            reduce_policy: plan.policy.to_string(),
            original: ProfileDoc::from(&plan.original),
            profile: ProfileDoc::from(&plan.profile),
            schedule: ScheduleDoc::from(&plan.schedule),
            subbands: (0..plan.subbands())
                .map(|j| SubbandDoc {
                    subband: j + 1,
                    symbols: plan
                        .subband_symbols(j)
                        .map(|(_, s)| SymbolDoc {
                            kind: kind_name(s.kind),
                            message: s.message().to_string(),
                            power_hi: sig15(s.power_hi),
                            power_lo: s.power_lo.map_or(PowerLo::Floor("floor"), |e| PowerLo::Exponent(sig15(e))),
                            share: s.share,
                            rate_prelog: sig15(s.rate_prelog),
                            precoder: precoder_name(s.precoder),
                        })
                        .collect(),
                })
                .collect(),
            decode_orders: plan
                .decode
                .iter()
                .map(|c| DecodeOrderDoc {
                    user: c.user.number(),
                    subband: c.subband + 1,
                    known: c.known.iter().map(|&i| label(i)).collect(),
                    steps: c
                        .steps
                        .iter()
                        .map(|s| DecodeStepDoc {
                            symbol: label(s.symbol),
                            interference: s.interference.iter().map(|&i| label(i)).collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Plan file contents: the plan, its checks and its DoF accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub plan: PlanDoc,
    pub rate_accounting: DofPairDoc,
    pub checks: Vec<CheckResult>,
    pub all_checks_passed: bool,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, FormatError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| FormatError::Serialize(e.to_string()))
}

/// Long-format rate table: one row per (SNR, message, decoding context),
/// plus a `deliverable` row per message holding the minimum over contexts.
pub fn sweep_csv(result: &SweepResult) -> Result<String, FormatError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let ser = |e: csv::Error| FormatError::Serialize(e.to_string());
    w.write_record(["snr_db", "message_id", "context", "rate_bits"]).map_err(ser)?;
    for pt in &result.points {
        let snr = fmt_num(pt.snr_db);
        for step in &pt.evaluation.steps {
            let ctx = format!("{}@subband{}", step.user, step.subband + 1);
            w.write_record([snr.as_str(), &step.message.to_string(), &ctx, &fmt_num(step.mean_rate_bits)])
                .map_err(ser)?;
        }
        for m in &pt.evaluation.messages {
            w.write_record([snr.as_str(), &m.message.to_string(), "deliverable", &fmt_num(m.deliverable_bits)])
                .map_err(ser)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| FormatError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| FormatError::Serialize(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserRateDoc {
    pub snr_db: f64,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginDoc {
    pub message: String,
    pub margin_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub fitted: DofPairDoc,
    pub target: DofPairDoc,
    pub fitted_sum: f64,
    pub target_sum: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub fit_points: usize,
    pub trials: usize,
    pub seed: u64,
    pub user_rates: Vec<UserRateDoc>,
    pub margins: Vec<MarginDoc>,
}

pub fn sweep_summary(result: &SweepResult, fit_points: usize, seed: u64, tolerance: f64) -> SweepSummary {
    SweepSummary {
        fitted: result.fitted.into(),
        target: result.target.into(),
        fitted_sum: sig15(result.fitted.sum()),
        target_sum: sig15(result.target.sum()),
        tolerance,
        pass: result.within(tolerance) && (result.fitted.sum() - result.target.sum()).abs() <= tolerance,
        fit_points,
        trials: result.points.first().map_or(0, |p| p.evaluation.trials),
        seed,
        user_rates: result
            .points
            .iter()
            .map(|p| UserRateDoc {
                snr_db: sig15(p.snr_db),
                r1: sig15(p.user_rates[0]),
                r2: sig15(p.user_rates[1]),
            })
            .collect(),
        margins: result
            .margins
            .iter()
            .map(|(m, x)| MarginDoc {
                message: m.to_string(),
                margin_bits: sig15(*x),
            })
            .collect(),
    }
}
