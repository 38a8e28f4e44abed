//! Subchannel decomposition, `u0` pairing and reduction of unbalanced
//! profiles to balanced ones.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{CsitProfile, User, EQ_TOL};

/// Residual gaps at or below this are considered exhausted.
const RESIDUAL_TOL: f64 = 1e-12;

/// Split of one subband into channel-use fractions by CSIT state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubchannelUse {
    pub subband: usize,
    /// Both users known: `min(a_j, b_j)`.
    pub pp: f64,
    /// Only user 1 known: `max(a_j - b_j, 0)`.
    pub pn: f64,
    /// Only user 2 known: `max(b_j - a_j, 0)`.
    pub np: f64,
    /// Neither known: `1 - max(a_j, b_j)`.
    pub nn: f64,
}

pub fn decompose(profile: &CsitProfile) -> Vec<SubchannelUse> {
    profile
        .a()
        .iter()
        .zip(profile.b())
        .enumerate()
        .map(|(subband, (&a, &b))| SubchannelUse {
            subband,
            pp: a.min(b),
            pn: (a - b).max(0.0),
            np: (b - a).max(0.0),
            nn: 1.0 - a.max(b),
        })
        .collect()
}

/// A common message sent twice: once where user 1 decodes it (`donor`,
/// `a > b`) and once where user 2 decodes it (`receiver`, `b > a`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct U0Message {
    /// One-based generation index.
    pub id: usize,
    /// Rate in units of `log P`.
    pub rate_prelog: f64,
    pub donor: usize,
    pub receiver: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct U0Schedule {
    pub messages: Vec<U0Message>,
    /// For each subband, the ids carried there from the top power layer down.
    pub per_subband: Vec<Vec<usize>>,
}

impl U0Schedule {
    pub fn message(&self, id: usize) -> Option<&U0Message> {
        self.messages.get(id.checked_sub(1)?)
    }

    /// Layer rates of subband `j`, top layer first.
    pub fn tau(&self, subband: usize) -> Vec<f64> {
        self.per_subband[subband]
            .iter()
            .map(|&id| self.messages[id - 1].rate_prelog)
            .collect()
    }

    pub fn total_rate(&self) -> f64 {
        self.messages.iter().map(|m| m.rate_prelog).sum()
    }
}

/// Greedy lowest-index pairing of surplus (`a > b`) against deficit
/// (`b > a`) subbands. Each step emits one message at the smaller residual
/// and exhausts at least one side of the pair.
pub fn pair_u0(profile: &CsitProfile) -> Result<U0Schedule> {
    let gap = profile.a_mean() - profile.b_mean();
    if gap.abs() > EQ_TOL {
        return Err(Error::Unbalanced { gap });
    }
    let l = profile.len();
    let mut plus: Vec<f64> = Vec::with_capacity(l);
    let mut minus: Vec<f64> = Vec::with_capacity(l);
    for (&a, &b) in profile.a().iter().zip(profile.b()) {
        let d = a - b;
        plus.push(if d > EQ_TOL { d } else { 0.0 });
        minus.push(if -d > EQ_TOL { -d } else { 0.0 });
    }

    let mut schedule = U0Schedule {
        messages: Vec::new(),
        per_subband: vec![Vec::new(); l],
    };
    let live = |v: &[f64]| v.iter().position(|&q| q > RESIDUAL_TOL);
    while let (Some(j1), Some(j2)) = (live(&plus), live(&minus)) {
        let rate = plus[j1].min(minus[j2]);
        let id = schedule.messages.len() + 1;
        schedule.messages.push(U0Message {
            id,
            rate_prelog: rate,
            donor: j1,
            receiver: j2,
        });
        schedule.per_subband[j1].push(id);
        schedule.per_subband[j2].push(id);
        if plus[j1] <= minus[j2] {
            minus[j2] -= plus[j1];
            plus[j1] = 0.0;
        } else {
            plus[j1] -= minus[j2];
            minus[j2] = 0.0;
        }
        for q in [&mut plus[j1], &mut minus[j2]] {
            if *q <= RESIDUAL_TOL {
                *q = 0.0;
            }
        }
    }
    Ok(schedule)
}

/// Order in which the surplus of the better-informed user is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducePolicy {
    /// Shrink the surplus subbands, largest gap first, never below the other
    /// user's quality.
    #[default]
    LargestGap,
    /// Lower the richer user's quality in the deficit subbands first, in
    /// index order and down to zero, widening the gaps there. Whatever is
    /// left comes off the surplus subbands in index order.
    LowestIndex,
}

impl fmt::Display for ReducePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReducePolicy::LargestGap => "largest-gap",
            ReducePolicy::LowestIndex => "lowest-index",
        })
    }
}

impl FromStr for ReducePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "largest-gap" => Ok(ReducePolicy::LargestGap),
            "lowest-index" => Ok(ReducePolicy::LowestIndex),
            other => Err(format!("unknown reduce policy `{other}` (expected largest-gap or lowest-index)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub original: CsitProfile,
    pub reduced: CsitProfile,
    /// Whose qualities were lowered; `None` for an already balanced profile.
    pub reduced_user: Option<User>,
    /// Per-subband amount removed from `reduced_user`'s quality.
    pub deltas: Vec<f64>,
}

/// Lowers the richer user's qualities until both averages match.
pub fn reduce_to_balanced(profile: &CsitProfile, policy: ReducePolicy) -> Result<Reduction> {
    let gap = profile.a_mean() - profile.b_mean();
    if gap.abs() <= EQ_TOL {
        return Ok(Reduction {
            original: profile.clone(),
            reduced: profile.clone(),
            reduced_user: None,
            deltas: vec![0.0; profile.len()],
        });
    }
    if gap < 0.0 {
        let r = reduce_user1(&profile.swapped(), policy)?;
        return Ok(Reduction {
            original: profile.clone(),
            reduced: r.swapped(),
            reduced_user: Some(User::Two),
            deltas: deltas(profile.b(), r.a()),
        });
    }
    let r = reduce_user1(profile, policy)?;
    Ok(Reduction {
        original: profile.clone(),
        deltas: deltas(profile.a(), r.a()),
        reduced: r,
        reduced_user: Some(User::One),
    })
}

fn deltas(before: &[f64], after: &[f64]) -> Vec<f64> {
    before.iter().zip(after).map(|(x, y)| x - y).collect()
}

/// Reduction for `sum(a) > sum(b)`.
fn reduce_user1(profile: &CsitProfile, policy: ReducePolicy) -> Result<CsitProfile> {
    let b = profile.b();
    let mut a = profile.a().to_vec();
    let mut surplus = profile.sum_a() - profile.sum_b();

    let mut plus: Vec<usize> = (0..a.len()).filter(|&j| a[j] - b[j] > EQ_TOL).collect();
    // (subband, floor) visiting order
    let mut visits: Vec<(usize, f64)> = Vec::new();
    match policy {
        ReducePolicy::LargestGap => {
            plus.sort_by(|&i, &j| (a[j] - b[j]).total_cmp(&(a[i] - b[i])).then(i.cmp(&j)));
            visits.extend(plus.iter().map(|&j| (j, b[j])));
        }
        ReducePolicy::LowestIndex => {
            visits.extend((0..a.len()).filter(|&j| b[j] - a[j] > EQ_TOL).map(|j| (j, 0.0)));
            visits.extend(plus.iter().map(|&j| (j, b[j])));
        }
    }

    for (j, floor) in visits {
        if surplus <= RESIDUAL_TOL {
            break;
        }
        let cut = (a[j] - floor).max(0.0).min(surplus);
        a[j] -= cut;
        surplus -= cut;
    }
    if surplus > 1e-9 {
        return Err(Error::InternalImbalance { remaining: surplus });
    }
    Ok(CsitProfile::from_parts_unchecked(a, b.to_vec()))
}
