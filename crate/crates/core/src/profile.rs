//! CSIT quality profiles and the problem taxonomy built on them.
//!
//! A profile holds, for each of the `L` subbands, the CSIT quality exponent
//! of user 1 (`a_j`) and user 2 (`b_j`). The estimation error variance of
//! user 1 in subband `j` scales as `P^-a_j`, so `1` means perfect CSIT and
//! `0` means no usable CSIT.
//!
//! Subband indices are zero-based throughout the Rust API. Serialized
//! documents and human-facing reports use one-based subband numbers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two qualities closer than this are treated as equal.
pub const EQ_TOL: f64 = 1e-12;

/// Tolerance used when testing a subset of subbands for balance.
pub const BALANCE_TOL: f64 = 1e-9;

/// Above this many subbands [`split_separable`] skips the exhaustive search.
pub const MAX_EXHAUSTIVE_SUBBANDS: usize = 20;

/// One of the two receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum User {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<User> {
        match n {
            1 => Some(User::One),
            2 => Some(User::Two),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        self.number() as usize - 1
    }
}

impl fmt::Display for User {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "user{}", self.number())
    }
}

/// Per-subband CSIT quality exponents of both users.
#[derive(Debug, Clone, PartialEq)]
pub struct CsitProfile {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CsitProfile {
    /// Builds a profile, checking lengths and ranges.
    ///
    /// Values within [`EQ_TOL`] outside `[0, 1]` are clamped; anything further
    /// out (or NaN) is rejected.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        validate_profile(a.len(), a, b)
    }

    /// Number of subbands `L`.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Qualities of user 1.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Qualities of user 2.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn quality(&self, user: User, subband: usize) -> f64 {
        match user {
            User::One => self.a[subband],
            User::Two => self.b[subband],
        }
    }

    pub fn sum_a(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn sum_b(&self) -> f64 {
        self.b.iter().sum()
    }

    /// Average quality of user 1, `a_e`.
    pub fn a_mean(&self) -> f64 {
        self.sum_a() / self.len() as f64
    }

    /// Average quality of user 2, `b_e`.
    pub fn b_mean(&self) -> f64 {
        self.sum_b() / self.len() as f64
    }

    /// The same channel with the roles of the two users exchanged.
    pub fn swapped(&self) -> CsitProfile {
        CsitProfile {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    pub(crate) fn from_parts_unchecked(a: Vec<f64>, b: Vec<f64>) -> CsitProfile {
        debug_assert_eq!(a.len(), b.len());
        CsitProfile { a, b }
    }
}

/// Validates `L`, `a` and `b` and returns the profile.
pub fn validate_profile(l: usize, a: Vec<f64>, b: Vec<f64>) -> Result<CsitProfile> {
    if a.len() != l || b.len() != l {
        return Err(Error::LengthMismatch {
            expected: l,
            a: a.len(),
            b: b.len(),
        });
    }
    if l == 0 {
        return Err(Error::NoSubbands);
    }
    let a = clamp_qualities(a, 1)?;
    let b = clamp_qualities(b, 2)?;
    Ok(CsitProfile { a, b })
}

fn clamp_qualities(values: Vec<f64>, user: u8) -> Result<Vec<f64>> {
    values
        .into_iter()
        .enumerate()
        .map(|(j, v)| {
            if !(-EQ_TOL..=1.0 + EQ_TOL).contains(&v) {
                Err(Error::OutOfRange {
                    user,
                    subband: j,
                    value: v,
                })
            } else {
                Ok(v.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// How the subbands split by which user has the better CSIT.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    /// Subbands with `a_j > b_j`.
    pub plus_set: Vec<usize>,
    /// Subbands with `a_j < b_j`.
    pub minus_set: Vec<usize>,
    /// Subbands with `a_j = b_j` (within [`EQ_TOL`]).
    pub equal_set: Vec<usize>,
    /// `a_j - b_j` on the plus set.
    pub q_plus: BTreeMap<usize, f64>,
    /// `b_j - a_j` on the minus set.
    pub q_minus: BTreeMap<usize, f64>,
    pub a_e: f64,
    pub b_e: f64,
}

impl GapSummary {
    pub fn q_plus_sum(&self) -> f64 {
        self.q_plus.values().sum()
    }

    pub fn q_minus_sum(&self) -> f64 {
        self.q_minus.values().sum()
    }

    /// Number of subbands where user 1 is at least as well informed as user 2.
    pub fn user1_favoured(&self) -> usize {
        self.plus_set.len() + self.equal_set.len()
    }
}

pub fn gaps(profile: &CsitProfile) -> GapSummary {
    let mut out = GapSummary {
        plus_set: Vec::new(),
        minus_set: Vec::new(),
        equal_set: Vec::new(),
        q_plus: BTreeMap::new(),
        q_minus: BTreeMap::new(),
        a_e: profile.a_mean(),
        b_e: profile.b_mean(),
    };
    for (j, (&a, &b)) in profile.a.iter().zip(&profile.b).enumerate() {
        let d = a - b;
        if d.abs() <= EQ_TOL {
            out.equal_set.push(j);
        } else if d > 0.0 {
            out.plus_set.push(j);
            out.q_plus.insert(j, d);
        } else {
            out.minus_set.push(j);
            out.q_minus.insert(j, -d);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProblemKind {
    /// Equal average CSIT quality, `a_e = b_e`.
    #[serde(rename = "P_L")]
    Balanced,
    /// `a_e > b_e`.
    #[serde(rename = "Q_L_plus")]
    User1Richer,
    /// `a_e < b_e`.
    #[serde(rename = "Q_L_minus")]
    User2Richer,
}

impl ProblemKind {
    pub fn label(self) -> &'static str {
        match self {
            ProblemKind::Balanced => "P_L",
            ProblemKind::User1Richer => "Q_L+",
            ProblemKind::User2Richer => "Q_L-",
        }
    }
}

/// Partition of the subbands into independently solvable balanced groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separation {
    pub groups: Vec<Vec<usize>>,
    /// Set when the profile was too long for the exhaustive search and the
    /// trivial single-group partition was returned instead.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemClass {
    pub kind: ProblemKind,
    pub balanced_partition: Option<Separation>,
}

fn kind_of(profile: &CsitProfile) -> ProblemKind {
    let d = profile.a_mean() - profile.b_mean();
    if d.abs() <= EQ_TOL {
        ProblemKind::Balanced
    } else if d > 0.0 {
        ProblemKind::User1Richer
    } else {
        ProblemKind::User2Richer
    }
}

pub fn classify(profile: &CsitProfile) -> ProblemClass {
    let kind = kind_of(profile);
    let balanced_partition = match kind {
        ProblemKind::Balanced => split_separable(profile).ok(),
        _ => None,
    };
    ProblemClass {
        kind,
        balanced_partition,
    }
}

/// Splits a balanced profile into minimal balanced groups of subbands.
///
/// Groups are found greedily: the smallest, lexicographically first balanced
/// subset of the remaining subbands is removed until nothing is left. Each
/// group therefore has no balanced proper subset.
pub fn split_separable(profile: &CsitProfile) -> Result<Separation> {
    let gap = profile.a_mean() - profile.b_mean();
    if gap.abs() > EQ_TOL {
        return Err(Error::NotBalanced { gap });
    }
    let l = profile.len();
    if l > MAX_EXHAUSTIVE_SUBBANDS {
        return Ok(Separation {
            groups: vec![(0..l).collect()],
            truncated: true,
        });
    }

    let diff: Vec<f64> = profile.a.iter().zip(&profile.b).map(|(a, b)| a - b).collect();
    let mut remaining: Vec<usize> = (0..l).collect();
    let mut groups = Vec::new();
    while !remaining.is_empty() {
        let group = smallest_balanced_subset(&remaining, &diff).unwrap_or_else(|| remaining.clone());
        remaining.retain(|j| !group.contains(j));
        groups.push(group);
    }
    Ok(Separation {
        groups,
        truncated: false,
    })
}

/// First balanced proper subset of `pool` in (size, lexicographic) order.
fn smallest_balanced_subset(pool: &[usize], diff: &[f64]) -> Option<Vec<usize>> {
    let n = pool.len();
    for k in 1..n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let s: f64 = idx.iter().map(|&i| diff[pool[i]]).sum();
            if s.abs() <= BALANCE_TOL {
                return Some(idx.iter().map(|&i| pool[i]).collect());
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    None
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for t in i + 1..k {
                idx[t] = idx[t - 1] + 1;
            }
            return true;
        }
    }
    false
}
