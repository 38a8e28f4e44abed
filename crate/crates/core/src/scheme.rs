//! Transmission plans that reach the corner points of the DoF region.
//!
//! Every subband carries, from the top of the power stack down:
//!
//! * a common message `c_j` on antenna 1, spanning `(max(a_j, b_j), 1]`;
//! * the `u0` layers scheduled there, on antenna 1, stacked from
//!   `max(a_j, b_j)` down to `min(a_j, b_j)`;
//! * the private symbols `u_j` (for user 1, zero-forced against user 2's
//!   estimate, power `P^b_j / 2`) and `v_j` (for user 2, zero-forced against
//!   user 1's estimate, power `P^a_j / 2`).
//!
//! Power exponents are stored instead of powers. A symbol with exponents
//! `(hi, lo)` and share `s` is allocated `(P^hi - P^lo) / s`; a missing `lo`
//! is the floor, `P^lo -> 0`.

use std::fmt;

use serde::Serialize;

use crate::decomposition::{pair_u0, reduce_to_balanced, ReducePolicy, U0Schedule};
use crate::error::Result;
use crate::profile::{CsitProfile, User, EQ_TOL};

const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SymbolKind {
    /// FDMA-style common message `c_j`.
    CommonI,
    /// Private symbol `u_j` for user 1.
    PrivateU,
    /// Private symbol `v_j` for user 2.
    PrivateV,
    /// Layer of the common message `u0(id)`.
    CommonII { id: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Precoder {
    /// `[1, 0]^T`.
    AntennaOne,
    /// Orthogonal to user 2's channel estimate.
    OrthoToGhat,
    /// Orthogonal to user 1's channel estimate.
    OrthoToHhat,
}

/// A message carried by the plan. `u0` messages span two subbands; all
/// others live in one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageId {
    Common(usize),
    U(usize),
    V(usize),
    U0(usize),
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MessageId::Common(j) => write!(f, "c{}", j + 1),
            MessageId::U(j) => write!(f, "u{}", j + 1),
            MessageId::V(j) => write!(f, "v{}", j + 1),
            MessageId::U0(id) => write!(f, "u0({id})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub subband: usize,
    pub power_hi: f64,
    /// `None` is the floor.
    pub power_lo: Option<f64>,
    pub share: f64,
    pub rate_prelog: f64,
    pub precoder: Precoder,
}

impl SymbolSpec {
    pub fn allocated_power(&self, p: f64) -> f64 {
        let lo = self.power_lo.map_or(0.0, |e| p.powf(e));
        (p.powf(self.power_hi) - lo) / self.share
    }

    pub fn message(&self) -> MessageId {
        match self.kind {
            SymbolKind::CommonI => MessageId::Common(self.subband),
            SymbolKind::PrivateU => MessageId::U(self.subband),
            SymbolKind::PrivateV => MessageId::V(self.subband),
            SymbolKind::CommonII { id } => MessageId::U0(id),
        }
    }

    /// Power exponent of this symbol as seen by `user`, given the original
    /// CSIT qualities `(a_j, b_j)`. Zero-forced symbols leak at
    /// `P^(hi - quality)` towards the user they are steered away from.
    pub fn received_exponent(&self, user: User, qualities: (f64, f64)) -> f64 {
        match (self.precoder, user) {
            (Precoder::OrthoToHhat, User::One) => self.power_hi - qualities.0,
            (Precoder::OrthoToGhat, User::Two) => self.power_hi - qualities.1,
            _ => self.power_hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeStep {
    /// Index into [`TransmissionPlan::symbols`].
    pub symbol: usize,
    /// Symbols of the subband still present when this one is decoded.
    pub interference: Vec<usize>,
}

/// Successive decoding at one user in one subband.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeContext {
    pub user: User,
    pub subband: usize,
    /// `u0` layers the user already decoded in another subband and removes
    /// before decoding anything here.
    pub known: Vec<usize>,
    pub steps: Vec<DecodeStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionPlan {
    /// Profile the power and rate allocation is built on (balanced).
    pub profile: CsitProfile,
    /// Profile of the physical channel. The zero-forcing leakage follows it.
    pub original: CsitProfile,
    pub policy: ReducePolicy,
    pub schedule: U0Schedule,
    pub symbols: Vec<SymbolSpec>,
    pub decode: Vec<DecodeContext>,
    /// The user both kinds of common message are counted for.
    pub common_owner: User,
}

impl TransmissionPlan {
    pub fn subbands(&self) -> usize {
        self.profile.len()
    }

    pub fn subband_symbols(&self, subband: usize) -> impl Iterator<Item = (usize, &SymbolSpec)> {
        self.symbols.iter().enumerate().filter(move |(_, s)| s.subband == subband)
    }

    pub fn find(&self, kind: SymbolKind, subband: usize) -> Option<&SymbolSpec> {
        self.symbols.iter().find(|s| s.kind == kind && s.subband == subband)
    }

    pub fn context(&self, user: User, subband: usize) -> Option<&DecodeContext> {
        self.decode.iter().find(|c| c.user == user && c.subband == subband)
    }

    fn original_qualities(&self, subband: usize) -> (f64, f64) {
        (self.original.a()[subband], self.original.b()[subband])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DofPair {
    pub d1: f64,
    pub d2: f64,
}

impl DofPair {
    pub fn sum(&self) -> f64 {
        self.d1 + self.d2
    }

    pub fn get(&self, user: User) -> f64 {
        match user {
            User::One => self.d1,
            User::Two => self.d2,
        }
    }
}

/// Plan with the default reduction policy.
pub fn synthesize(profile: &CsitProfile, common_owner: User) -> Result<TransmissionPlan> {
    synthesize_with(profile, common_owner, ReducePolicy::default())
}

pub fn synthesize_with(
    profile: &CsitProfile,
    common_owner: User,
    policy: ReducePolicy,
) -> Result<TransmissionPlan> {
    let reduction = reduce_to_balanced(profile, policy)?;
    let balanced = reduction.reduced;
    let schedule = pair_u0(&balanced)?;

    let mut symbols = Vec::new();
    for j in 0..balanced.len() {
        let (a, b) = (balanced.a()[j], balanced.b()[j]);
        let top = a.max(b);
        let bottom = a.min(b);
        let mut push = |kind, power_hi, power_lo, share, rate_prelog: f64, precoder| {
            if rate_prelog > EQ_TOL {
                symbols.push(SymbolSpec {
                    kind,
                    subband: j,
                    power_hi,
                    power_lo,
                    share,
                    rate_prelog,
                    precoder,
                });
            }
        };
        push(SymbolKind::CommonI, 1.0, Some(top), 1.0, 1.0 - top, Precoder::AntennaOne);
        push(SymbolKind::PrivateU, b, None, 2.0, b, Precoder::OrthoToGhat);
        let ids = &schedule.per_subband[j];
        let mut hi = top;
        for (k, &id) in ids.iter().enumerate() {
            let tau = schedule.messages[id - 1].rate_prelog;
            let lo = if k + 1 == ids.len() { bottom } else { hi - tau };
            push(SymbolKind::CommonII { id }, hi, Some(lo), 2.0, tau, Precoder::AntennaOne);
            hi = lo;
        }
        push(SymbolKind::PrivateV, a, None, 2.0, a, Precoder::OrthoToHhat);
    }

    let mut plan = TransmissionPlan {
        profile: balanced,
        original: reduction.original,
        policy,
        schedule,
        symbols,
        decode: Vec::new(),
        common_owner,
    };
    plan.decode = build_decode_orders(&plan);
    Ok(plan)
}

/// Whether `user` decodes the `u0` layers of `subband` (it is the better
/// informed user there) or receives them already known.
fn decodes_u0_here(profile: &CsitProfile, user: User, subband: usize) -> bool {
    let d = profile.a()[subband] - profile.b()[subband];
    match user {
        User::One => d > EQ_TOL,
        User::Two => -d > EQ_TOL,
    }
}

fn build_decode_orders(plan: &TransmissionPlan) -> Vec<DecodeContext> {
    let mut contexts = Vec::new();
    for user in [User::One, User::Two] {
        for j in 0..plan.subbands() {
            let here: Vec<(usize, &SymbolSpec)> = plan.subband_symbols(j).collect();
            let find = |pred: &dyn Fn(&SymbolKind) -> bool| -> Vec<usize> {
                here.iter().filter(|(_, s)| pred(&s.kind)).map(|&(i, _)| i).collect()
            };
            let commons = find(&|k| *k == SymbolKind::CommonI);
            let layers = find(&|k| matches!(k, SymbolKind::CommonII { .. }));
            let own = find(&|k| {
                *k == match user {
                    User::One => SymbolKind::PrivateU,
                    User::Two => SymbolKind::PrivateV,
                }
            });

            let (known, order): (Vec<usize>, Vec<usize>) = if decodes_u0_here(&plan.profile, user, j) {
                (Vec::new(), commons.into_iter().chain(layers).chain(own).collect())
            } else {
                (layers, commons.into_iter().chain(own).collect())
            };

            let mut removed: Vec<usize> = known.clone();
            let mut steps = Vec::with_capacity(order.len());
            for s in order {
                let interference = here
                    .iter()
                    .map(|&(i, _)| i)
                    .filter(|i| *i != s && !removed.contains(i))
                    .collect();
                steps.push(DecodeStep { symbol: s, interference });
                removed.push(s);
            }
            contexts.push(DecodeContext { user, subband: j, known, steps });
        }
    }
    contexts
}

/// DoF pair delivered by the plan, counting every `u0` message once.
pub fn rate_accounting(plan: &TransmissionPlan) -> DofPair {
    let mut per_user = [0.0f64; 2];
    let owner = plan.common_owner.index();
    for s in &plan.symbols {
        match s.kind {
            SymbolKind::CommonI => per_user[owner] += s.rate_prelog,
            SymbolKind::PrivateU => per_user[0] += s.rate_prelog,
            SymbolKind::PrivateV => per_user[1] += s.rate_prelog,
            SymbolKind::CommonII { .. } => {}
        }
    }
    per_user[owner] += plan.schedule.total_rate();
    let l = plan.subbands() as f64;
    DofPair {
        d1: per_user[0] / l,
        d2: per_user[1] / l,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub location: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(check: &'static str, location: String, passed: bool, detail: String) -> Self {
        CheckResult { check, location, passed, detail }
    }
}

pub fn all_passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Structural checks on a plan. Failures are reported, never raised.
pub fn validate_plan(plan: &TransmissionPlan) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let l = plan.subbands();
    for j in 0..l {
        out.push(check_exponents(plan, j));
        out.push(check_telescoping(plan, j));
        out.push(check_tau_sum(plan, j));
        out.push(check_rates(plan, j));
    }
    out.extend(check_double_transmission(plan));
    for ctx in &plan.decode {
        out.push(check_decode_context(plan, ctx));
    }
    out.extend(check_coverage(plan));
    out
}

fn sb(j: usize) -> String {
    format!("subband {}", j + 1)
}

fn check_exponents(plan: &TransmissionPlan, j: usize) -> CheckResult {
    let bad: Vec<String> = plan
        .subband_symbols(j)
        .filter(|(_, s)| {
            let lo_ok = s.power_lo.is_none_or(|lo| lo < s.power_hi);
            !(lo_ok && s.power_hi <= 1.0 + EQ_TOL && s.rate_prelog >= 0.0 && s.share > 0.0)
        })
        .map(|(_, s)| s.message().to_string())
        .collect();
    CheckResult::new("power-exponents", sb(j), bad.is_empty(), format!("malformed: {bad:?}"))
}

fn check_telescoping(plan: &TransmissionPlan, j: usize) -> CheckResult {
    // Omitted zero-rate symbols sit at P^0, so allow an O(1) residue.
    let mut worst = 0.0f64;
    let mut passed = true;
    for p in [1e4, 1e8, 1e12] {
        let total: f64 = plan.subband_symbols(j).map(|(_, s)| s.allocated_power(p)).sum();
        let err = (total - p).abs();
        worst = worst.max(err / p);
        passed &= err <= 1.0 + 1e-9 * p;
    }
    CheckResult::new("power-telescoping", sb(j), passed, format!("max relative error {worst:e}"))
}

fn check_tau_sum(plan: &TransmissionPlan, j: usize) -> CheckResult {
    let total: f64 = plan
        .subband_symbols(j)
        .filter(|(_, s)| matches!(s.kind, SymbolKind::CommonII { .. }))
        .map(|(_, s)| s.rate_prelog)
        .sum();
    let gap = (plan.profile.a()[j] - plan.profile.b()[j]).abs();
    let gap = if gap <= EQ_TOL { 0.0 } else { gap };
    CheckResult::new(
        "tau-sum",
        sb(j),
        (total - gap).abs() <= CHECK_TOL,
        format!("sum of u0 layer rates {total} vs |a_j - b_j| = {gap}"),
    )
}

fn check_rates(plan: &TransmissionPlan, j: usize) -> CheckResult {
    let (a, b) = (plan.profile.a()[j], plan.profile.b()[j]);
    let (a0, b0) = plan.original_qualities(j);
    let mut problems = Vec::new();
    for (_, s) in plan.subband_symbols(j) {
        let (want_rate, ceiling) = match s.kind {
            SymbolKind::CommonI => (1.0 - a.max(b), 1.0),
            SymbolKind::PrivateU => (b, b0),
            SymbolKind::PrivateV => (a, a0),
            SymbolKind::CommonII { .. } => continue,
        };
        if (s.rate_prelog - want_rate).abs() > EQ_TOL {
            problems.push(format!("{} rate {} != {}", s.message(), s.rate_prelog, want_rate));
        }
        if s.power_hi > ceiling + EQ_TOL {
            problems.push(format!("{} power P^{} above CSIT quality {}", s.message(), s.power_hi, ceiling));
        }
    }
    CheckResult::new("rate-allocation", sb(j), problems.is_empty(), problems.join("; "))
}

fn check_double_transmission(plan: &TransmissionPlan) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut ids: Vec<usize> = plan
        .symbols
        .iter()
        .filter_map(|s| match s.kind {
            SymbolKind::CommonII { id } => Some(id),
            _ => None,
        })
        .chain(plan.schedule.messages.iter().map(|m| m.id))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    for id in ids {
        let carriers: Vec<&SymbolSpec> = plan
            .symbols
            .iter()
            .filter(|s| s.kind == SymbolKind::CommonII { id })
            .collect();
        let d = |s: &SymbolSpec| plan.profile.a()[s.subband] - plan.profile.b()[s.subband];
        let mut problems = Vec::new();
        if carriers.len() != 2 {
            problems.push(format!("sent in {} subband(s)", carriers.len()));
        } else {
            if d(carriers[0]) * d(carriers[1]) >= 0.0 || d(carriers[0]).is_nan() {
                problems.push("both copies on the same side of the quality gap".to_string());
            }
            if (carriers[0].rate_prelog - carriers[1].rate_prelog).abs() > EQ_TOL {
                problems.push("copies carry different rates".to_string());
            }
            if let Some(m) = plan.schedule.message(id) {
                let mut subbands = [carriers[0].subband, carriers[1].subband];
                subbands.sort_unstable();
                let mut want = [m.donor, m.receiver];
                want.sort_unstable();
                if subbands != want {
                    problems.push(format!("carried in {subbands:?}, scheduled in {want:?}"));
                }
            } else {
                problems.push("not in the schedule".to_string());
            }
        }
        out.push(CheckResult::new(
            "u0-double-transmission",
            format!("u0({id})"),
            problems.is_empty(),
            problems.join("; "),
        ));
    }
    out
}

/// Every interference term must sit at or below the decoded symbol's lower
/// power edge (or at noise level), and the symbol's rate must fit in the
/// resulting SINR exponent.
fn check_decode_context(plan: &TransmissionPlan, ctx: &DecodeContext) -> CheckResult {
    let q = plan.original_qualities(ctx.subband);
    let mut problems = Vec::new();
    for step in &ctx.steps {
        let s = &plan.symbols[step.symbol];
        let edge = s.power_lo.unwrap_or(0.0).max(0.0);
        let worst = step
            .interference
            .iter()
            .map(|&i| plan.symbols[i].received_exponent(ctx.user, q))
            .fold(0.0f64, f64::max);
        if worst > edge + CHECK_TOL {
            problems.push(format!("{}: interference at P^{worst} above P^{edge}", s.message()));
        }
        let sinr_exponent = s.received_exponent(ctx.user, q) - worst;
        if s.rate_prelog > sinr_exponent + CHECK_TOL {
            problems.push(format!(
                "{}: rate {} exceeds SINR exponent {sinr_exponent}",
                s.message(),
                s.rate_prelog
            ));
        }
        if step.interference.iter().any(|i| ctx.known.contains(i)) {
            problems.push(format!("{}: known symbol counted as interference", s.message()));
        }
    }
    for &k in &ctx.known {
        let decoded_elsewhere = match plan.symbols[k].kind {
            SymbolKind::CommonII { id } => plan.decode.iter().any(|c| {
                c.user == ctx.user
                    && c.subband != ctx.subband
                    && c.steps.iter().any(|st| plan.symbols[st.symbol].kind == SymbolKind::CommonII { id })
            }),
            _ => false,
        };
        if !decoded_elsewhere {
            problems.push(format!("{} assumed known but never decoded", plan.symbols[k].message()));
        }
    }
    CheckResult::new(
        "decode-order",
        format!("{} {}", ctx.user, sb(ctx.subband)),
        problems.is_empty(),
        problems.join("; "),
    )
}

fn check_coverage(plan: &TransmissionPlan) -> Vec<CheckResult> {
    let decoded_by = |user: User, idx: usize| {
        plan.decode
            .iter()
            .filter(|c| c.user == user)
            .any(|c| c.steps.iter().any(|s| s.symbol == idx))
    };
    let mut out = Vec::new();
    for (i, s) in plan.symbols.iter().enumerate() {
        let ok = match s.kind {
            SymbolKind::CommonI => decoded_by(User::One, i) && decoded_by(User::Two, i),
            SymbolKind::PrivateU => decoded_by(User::One, i),
            SymbolKind::PrivateV => decoded_by(User::Two, i),
            // one of the two copies per user suffices
            SymbolKind::CommonII { id } => [User::One, User::Two].into_iter().all(|u| {
                plan.symbols
                    .iter()
                    .enumerate()
                    .any(|(k, t)| t.kind == SymbolKind::CommonII { id } && decoded_by(u, k))
            }),
        };
        if !ok {
            out.push(CheckResult::new(
                "decode-coverage",
                format!("{} in {}", s.message(), sb(s.subband)),
                false,
                "not decoded by every user that needs it".to_string(),
            ));
        }
    }
    if out.is_empty() {
        out.push(CheckResult::new("decode-coverage", "plan".to_string(), true, String::new()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: &[f64], b: &[f64]) -> CsitProfile {
        CsitProfile::new(a.to_vec(), b.to_vec()).unwrap()
    }

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 1e-12
    }

    #[test]
    fn two_subband_unmatched_rows() {
        let plan = synthesize(&p(&[0.7, 0.3], &[0.3, 0.7]), User::One).unwrap();
        let c1 = plan.find(SymbolKind::CommonI, 0).unwrap();
        assert!(close(c1.rate_prelog, 0.3) && c1.power_lo == Some(0.7) && c1.share == 1.0);
        let u1 = plan.find(SymbolKind::PrivateU, 0).unwrap();
        assert!(close(u1.power_hi, 0.3) && u1.power_lo.is_none() && u1.share == 2.0);
        assert_eq!(u1.precoder, Precoder::OrthoToGhat);
        let u0 = plan.find(SymbolKind::CommonII { id: 1 }, 0).unwrap();
        assert!(close(u0.power_hi, 0.7) && close(u0.power_lo.unwrap(), 0.3) && close(u0.rate_prelog, 0.4));
        let v1 = plan.find(SymbolKind::PrivateV, 0).unwrap();
        assert!(close(v1.power_hi, 0.7) && close(v1.rate_prelog, 0.7));
        assert_eq!(v1.precoder, Precoder::OrthoToHhat);

        let d = rate_accounting(&plan);
        assert!(close(d.d1, 1.0) && close(d.d2, 0.5));
        assert!(all_passed(&validate_plan(&plan)));
    }

    #[test]
    fn decode_order_of_two_subband_plan() {
        let plan = synthesize(&p(&[0.7, 0.3], &[0.3, 0.7]), User::One).unwrap();
        let label = |i: usize| plan.symbols[i].message().to_string();
        let order = |u, j| {
            let c = plan.context(u, j).unwrap();
            (c.known.iter().map(|&i| label(i)).collect::<Vec<_>>(),
             c.steps.iter().map(|s| label(s.symbol)).collect::<Vec<_>>())
        };
        assert_eq!(order(User::One, 0), (vec![], vec!["c1".into(), "u0(1)".into(), "u1".into()]));
        assert_eq!(order(User::Two, 0), (vec!["u0(1)".into()], vec!["c1".into(), "v1".into()]));
        assert_eq!(order(User::Two, 1), (vec![], vec!["c2".into(), "u0(1)".into(), "v2".into()]));
        assert_eq!(order(User::One, 1), (vec!["u0(1)".into()], vec!["c2".into(), "u2".into()]));
    }

    #[test]
    fn three_subband_stack() {
        let plan = synthesize(&p(&[0.8, 0.6, 0.2], &[0.5, 0.4, 0.7]), User::One).unwrap();
        let l1 = plan.find(SymbolKind::CommonII { id: 1 }, 2).unwrap();
        let l2 = plan.find(SymbolKind::CommonII { id: 2 }, 2).unwrap();
        assert!(close(l1.power_hi, 0.7) && close(l1.power_lo.unwrap(), 0.4) && close(l1.rate_prelog, 0.3));
        assert!(close(l2.power_hi, 0.4) && close(l2.power_lo.unwrap(), 0.2) && close(l2.rate_prelog, 0.2));
        assert!(all_passed(&validate_plan(&plan)));
    }

    #[test]
    fn matched_profile_has_no_common_ii() {
        let plan = synthesize(&p(&[0.7, 0.6, 0.4], &[0.7, 0.6, 0.4]), User::Two).unwrap();
        assert!(plan.symbols.iter().all(|s| !matches!(s.kind, SymbolKind::CommonII { .. })));
        assert_eq!(plan.symbols.len(), 9);
        let d = rate_accounting(&plan);
        assert!(close(d.d2, 1.0) && close(d.d1, (0.7 + 0.6 + 0.4) / 3.0));
    }

    #[test]
    fn accounting_examples() {
        let q = synthesize(&p(&[0.9, 0.5], &[0.4, 0.7]), User::One).unwrap();
        let d = rate_accounting(&q);
        assert!(close(d.d1, 1.0) && close(d.d2, 0.55));

        let nn = synthesize(&p(&[0.0, 0.0], &[0.0, 0.0]), User::One).unwrap();
        assert_eq!(rate_accounting(&nn), DofPair { d1: 1.0, d2: 0.0 });
        assert!(all_passed(&validate_plan(&nn)));

        let perfect = synthesize(&p(&[1.0], &[1.0]), User::One).unwrap();
        assert!(perfect.find(SymbolKind::CommonI, 0).is_none());
        assert_eq!(rate_accounting(&perfect), DofPair { d1: 1.0, d2: 1.0 });
    }

    #[test]
    fn perturbed_tau_fails_tau_sum() {
        let mut plan = synthesize(&p(&[0.8, 0.6, 0.2], &[0.5, 0.4, 0.7]), User::One).unwrap();
        let idx = plan
            .symbols
            .iter()
            .position(|s| s.kind == SymbolKind::CommonII { id: 2 } && s.subband == 2)
            .unwrap();
        plan.symbols[idx].rate_prelog += 0.01;
        let failed: Vec<_> = validate_plan(&plan).into_iter().filter(|c| !c.passed).collect();
        assert!(failed.iter().any(|c| c.check == "tau-sum" && c.location == "subband 3"));
        assert!(!failed.iter().any(|c| c.check == "tau-sum" && c.location != "subband 3"));
    }

    #[test]
    fn single_copy_fails_double_transmission() {
        let mut plan = synthesize(&p(&[0.7, 0.3], &[0.3, 0.7]), User::One).unwrap();
        plan.symbols.retain(|s| !(s.kind == SymbolKind::CommonII { id: 1 } && s.subband == 1));
        plan.decode = build_decode_orders(&plan);
        let checks = validate_plan(&plan);
        assert!(checks.iter().any(|c| c.check == "u0-double-transmission" && !c.passed));
    }

    #[test]
    fn raising_a_private_power_breaks_decoding() {
        let mut plan = synthesize(&p(&[0.7, 0.3], &[0.3, 0.7]), User::One).unwrap();
        let idx = plan.symbols.iter().position(|s| s.kind == SymbolKind::PrivateU && s.subband == 0).unwrap();
        plan.symbols[idx].power_hi = 0.5;
        plan.symbols[idx].rate_prelog = 0.5;
        let checks = validate_plan(&plan);
        assert!(checks.iter().any(|c| c.check == "decode-order" && !c.passed));
        assert!(checks.iter().any(|c| c.check == "power-telescoping" && !c.passed));
    }

    #[test]
    fn message_labels() {
        assert_eq!(MessageId::Common(0).to_string(), "c1");
        assert_eq!(MessageId::V(2).to_string(), "v3");
        assert_eq!(MessageId::U0(4).to_string(), "u0(4)");
    }
}
