//! Ergodic per-message rates of a plan at one SNR.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::channel::{draw_channels, gain, ortho, C2, ChannelDraw};
use super::stream_seed;
use crate::profile::User;
use crate::scheme::{MessageId, Precoder, TransmissionPlan};

/// Trials summed together before chunk totals are combined. Fixed so the
/// floating-point summation order never depends on the thread count.
const CHUNK: usize = 64;

/// One decode step averaged over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub user: User,
    pub subband: usize,
    #[serde(serialize_with = "crate::io::serialize_display")]
    pub message: MessageId,
    pub target_prelog: f64,
    /// Mean of `log2(1 + SINR)`.
    pub mean_rate_bits: f64,
    /// Mean of `log2(SINR)`.
    pub mean_log2_sinr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessageRate {
    #[serde(serialize_with = "crate::io::serialize_display")]
    pub message: MessageId,
    pub target_prelog: f64,
    /// Smallest ergodic rate over every context that must decode the message.
    pub deliverable_bits: f64,
    /// Indices into [`Evaluation::steps`].
    pub contexts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub snr: f64,
    pub trials: usize,
    pub steps: Vec<StepRecord>,
    pub messages: Vec<MessageRate>,
}

impl Evaluation {
    pub fn message(&self, id: MessageId) -> Option<&MessageRate> {
        self.messages.iter().find(|m| m.message == id)
    }

    pub fn step(&self, user: User, subband: usize, id: MessageId) -> Option<&StepRecord> {
        self.steps
            .iter()
            .find(|s| s.user == user && s.subband == subband && s.message == id)
    }

    /// Rate of each user in bits per channel use per subband, with both
    /// kinds of common message counted for `owner`.
    pub fn user_rates(&self, owner: User, subbands: usize) -> [f64; 2] {
        let mut r = [0.0; 2];
        for m in &self.messages {
            let user = match m.message {
                MessageId::U(_) => User::One,
                MessageId::V(_) => User::Two,
                MessageId::Common(_) | MessageId::U0(_) => owner,
            };
            r[user.index()] += m.deliverable_bits;
        }
        r.map(|x| x / subbands as f64)
    }
}

struct Step {
    user: User,
    subband: usize,
    symbol: usize,
    interference: Vec<usize>,
}

fn flatten(plan: &TransmissionPlan) -> Vec<Step> {
    plan.decode
        .iter()
        .flat_map(|ctx| {
            ctx.steps.iter().map(move |s| Step {
                user: ctx.user,
                subband: ctx.subband,
                symbol: s.symbol,
                interference: s.interference.clone(),
            })
        })
        .collect()
}

fn precoder_vectors(plan: &TransmissionPlan, draw: &ChannelDraw) -> Vec<C2> {
    let one = num_complex::Complex64::new(1.0, 0.0);
    let zero = num_complex::Complex64::new(0.0, 0.0);
    plan.symbols
        .iter()
        .map(|s| {
            let ch = &draw.subbands[s.subband];
            match s.precoder {
                Precoder::AntennaOne => Ok([one, zero]),
                Precoder::OrthoToGhat => ortho(&ch.g_hat),
                Precoder::OrthoToHhat => ortho(&ch.h_hat),
            }
            // a zero estimate has probability zero; any direction will do
            .unwrap_or([zero, one])
        })
        .collect()
}

/// Adds one trial's `(rate, log2 sinr)` per step into `acc`.
fn run_trial(plan: &TransmissionPlan, steps: &[Step], powers: &[f64], p: f64, seed: u64, acc: &mut [(f64, f64)]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = draw_channels(&mut rng, &plan.original, p);
    let w = precoder_vectors(plan, &draw);
    for (k, step) in steps.iter().enumerate() {
        let ch = &draw.subbands[step.subband];
        let c = match step.user {
            User::One => &ch.h,
            User::Two => &ch.g,
        };
        let rx = |i: usize| powers[i] * gain(c, &w[i]);
        let signal = rx(step.symbol);
        let interference: f64 = step.interference.iter().map(|&i| rx(i)).sum();
        let sinr = signal / (1.0 + interference);
        acc[k].0 += (1.0 + sinr).log2();
        acc[k].1 += sinr.max(f64::MIN_POSITIVE).log2();
    }
}

/// Monte-Carlo ergodic rates of every decode step of `plan` at transmit SNR
/// `p` (linear), treating undecoded symbols as Gaussian noise.
pub fn evaluate_plan(plan: &TransmissionPlan, p: f64, trials: usize, seed: u64) -> Evaluation {
    let steps = flatten(plan);
    let powers: Vec<f64> = plan.symbols.iter().map(|s| s.allocated_power(p)).collect();
    let n = steps.len();

    let chunks: Vec<Vec<(f64, f64)>> = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![(0.0, 0.0); n];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                run_trial(plan, &steps, &powers, p, stream_seed(seed, t as u64), &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![(0.0, 0.0); n];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.0 += c.0;
            t.1 += c.1;
        }
    }

    let denom = trials.max(1) as f64;
    let records: Vec<StepRecord> = steps
        .iter()
        .zip(&total)
        .map(|(s, &(rate, lsinr))| {
            let sym = &plan.symbols[s.symbol];
            StepRecord {
                user: s.user,
                subband: s.subband,
                message: sym.message(),
                target_prelog: sym.rate_prelog,
                mean_rate_bits: rate / denom,
                mean_log2_sinr: lsinr / denom,
            }
        })
        .collect();

    let mut messages: Vec<MessageRate> = Vec::new();
    for sym in &plan.symbols {
        let id = sym.message();
        if messages.iter().any(|m| m.message == id) {
            continue;
        }
        let contexts: Vec<usize> = (0..records.len()).filter(|&k| records[k].message == id).collect();
        let deliverable_bits = contexts
            .iter()
            .map(|&k| records[k].mean_rate_bits)
            .fold(f64::INFINITY, f64::min);
        messages.push(MessageRate {
            message: id,
            target_prelog: sym.rate_prelog,
            deliverable_bits: if contexts.is_empty() { 0.0 } else { deliverable_bits },
            contexts,
        });
    }

    Evaluation {
        snr: p,
        trials,
        steps: records,
        messages,
    }
}
