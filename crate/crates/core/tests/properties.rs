use proptest::prelude::*;

use dofcsit_core::sim::{draw_channels, ortho, sweep, SimConfig};
use dofcsit_core::{
    all_passed, classify, compose_weighted, decompose, dof_region, evaluate_plan, gaps, pair_u0, reduce_to_balanced,
    split_separable, synthesize, synthesize_with, validate_plan, weights, CsitProfile, MessageId, ProblemKind,
    ReducePolicy, SymbolKind, User,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quality() -> impl Strategy<Value = f64> {
    prop_oneof![3 => 0.0..=1.0f64, 1 => (0u32..=10).prop_map(|k| k as f64 / 10.0)]
}

fn profile_strategy(max_l: usize) -> impl Strategy<Value = CsitProfile> {
    (1..=max_l)
        .prop_flat_map(|l| (prop::collection::vec(quality(), l), prop::collection::vec(quality(), l)))
        .prop_map(|(a, b)| CsitProfile::new(a, b).unwrap())
}

/// Balanced profiles: user 2's qualities are a rotation of user 1's.
fn balanced_strategy(max_l: usize) -> impl Strategy<Value = CsitProfile> {
    (1..=max_l)
        .prop_flat_map(|l| (prop::collection::vec(quality(), l), 0..l))
        .prop_map(|(a, k)| {
            let mut b = a.clone();
            b.rotate_left(k);
            CsitProfile::new(a, b).unwrap()
        })
}

fn any_profile(max_l: usize) -> impl Strategy<Value = CsitProfile> {
    prop_oneof![profile_strategy(max_l), balanced_strategy(max_l)]
}

fn same_region(x: &CsitProfile, y: &CsitProfile) -> bool {
    dof_region(x).vertex_distance(&dof_region(y)) <= 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gap_sums_match_averages(p in profile_strategy(16)) {
        let g = gaps(&p);
        let lhs = g.q_plus_sum() - g.q_minus_sum();
        prop_assert!((lhs - p.len() as f64 * (g.a_e - g.b_e)).abs() <= 1e-12);
        prop_assert_eq!(gaps(&p), g);
    }

    #[test]
    fn weight_identities(p in profile_strategy(16)) {
        let w = weights(&p);
        let l = p.len() as f64;
        let sum_max: f64 = p.a().iter().zip(p.b()).map(|(a, b)| a.max(*b)).sum();
        prop_assert!((w.r_bar + w.r_hat / 2.0 + w.r_hat_prime + (l - sum_max) + w.r_hat / 2.0 - l).abs() <= 1e-9);
        prop_assert!((w.r_bar + w.r_hat + w.r_tilde - l).abs() <= 1e-9);
        prop_assert!((w.r_bar + w.r_hat / 2.0 - p.sum_a().min(p.sum_b())).abs() <= 1e-9);
    }

    #[test]
    fn composition_matches_region(p in profile_strategy(16)) {
        let composed = compose_weighted(&weights(&p), p.len()).unwrap();
        let region = dof_region(&p);
        prop_assert_eq!(composed.vertices.len(), region.vertices.len());
        prop_assert!(composed.vertex_distance(&region) <= 1e-9);
    }
}

proptest! {
    #[test]
    fn classify_is_antisymmetric(p in any_profile(8)) {
        let k = classify(&p).kind;
        let swapped = classify(&p.swapped()).kind;
        let expect = match k {
            ProblemKind::Balanced => ProblemKind::Balanced,
            ProblemKind::User1Richer => ProblemKind::User2Richer,
            ProblemKind::User2Richer => ProblemKind::User1Richer,
        };
        prop_assert_eq!(swapped, expect);
    }

    #[test]
    fn separable_groups_partition_the_subbands(p in balanced_strategy(10)) {
        let s = split_separable(&p).unwrap();
        let mut all: Vec<usize> = s.groups.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..p.len()).collect::<Vec<_>>());
        for g in &s.groups {
            let da: f64 = g.iter().map(|&j| p.a()[j] - p.b()[j]).sum();
            prop_assert!(da.abs() <= 1e-9);
        }
    }

    #[test]
    fn region_is_symmetric_under_user_swap(p in profile_strategy(8)) {
        let mirrored = dof_region(&p.swapped()).mirrored();
        prop_assert!(dof_region(&p).vertex_distance(&mirrored) <= 1e-12);
    }

    #[test]
    fn raising_the_weaker_user_never_shrinks_the_region(p in profile_strategy(8), j in 0usize..8, up in 0.0..=1.0f64) {
        prop_assume!(p.b_mean() < p.a_mean());
        let j = j % p.len();
        let mut b = p.b().to_vec();
        b[j] = (b[j] + up).min(1.0);
        let raised = CsitProfile::new(p.a().to_vec(), b).unwrap();
        prop_assert!(dof_region(&raised).min_avg >= dof_region(&p).min_avg);
    }

    #[test]
    fn decomposition_fills_every_subband(p in profile_strategy(16)) {
        let total: f64 = decompose(&p).iter().map(|s| s.pp + s.pn + s.np + s.nn).sum();
        prop_assert!((total - p.len() as f64).abs() <= 1e-12);
    }

    #[test]
    fn pairing_carries_the_whole_gap(p in balanced_strategy(12)) {
        let g = gaps(&p);
        let s = pair_u0(&p).unwrap();
        let w = weights(&p);
        prop_assert!((s.total_rate() - g.q_plus_sum().min(g.q_minus_sum())).abs() <= 1e-9);
        prop_assert!((s.total_rate() - w.r_hat / 2.0).abs() <= 1e-9);
        let bound = (g.plus_set.len() + g.minus_set.len()).saturating_sub(1);
        prop_assert!(s.messages.len() <= bound);
        for (j, ids) in s.per_subband.iter().enumerate() {
            let tau: f64 = s.tau(j).iter().sum();
            prop_assert!((tau - (p.a()[j] - p.b()[j]).abs()).abs() <= 1e-9 || ids.is_empty() && (p.a()[j] - p.b()[j]).abs() <= 1e-12);
        }
    }

    #[test]
    fn reduction_balances_and_keeps_the_region(
        p in profile_strategy(12),
        policy in prop_oneof![Just(ReducePolicy::LargestGap), Just(ReducePolicy::LowestIndex)],
    ) {
        let r = reduce_to_balanced(&p, policy).unwrap();
        let g = gaps(&r.reduced);
        prop_assert!((g.a_e - g.b_e).abs() <= 1e-9);
        prop_assert!(same_region(&r.reduced, &p));
        for j in 0..p.len() {
            prop_assert!(r.reduced.a()[j] <= p.a()[j] && r.reduced.b()[j] <= p.b()[j]);
        }
    }

    #[test]
    fn plans_pass_their_own_checks(
        p in any_profile(10),
        owner in prop_oneof![Just(User::One), Just(User::Two)],
        policy in prop_oneof![Just(ReducePolicy::LargestGap), Just(ReducePolicy::LowestIndex)],
    ) {
        let plan = synthesize_with(&p, owner, policy).unwrap();
        let checks = validate_plan(&plan);
        prop_assert!(all_passed(&checks), "{:?}", checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        for s in &plan.symbols {
            if s.kind == SymbolKind::PrivateV {
                prop_assert!(s.power_hi <= p.a()[s.subband] + 1e-12);
            }
            if s.kind == SymbolKind::PrivateU {
                prop_assert!(s.power_hi <= p.b()[s.subband] + 1e-12);
            }
        }
    }

    #[test]
    fn reduction_is_transparent_to_synthesis(p in profile_strategy(10)) {
        let reduced = reduce_to_balanced(&p, ReducePolicy::default()).unwrap().reduced;
        let direct = synthesize(&p, User::One).unwrap();
        let mut via = synthesize(&reduced, User::One).unwrap();
        via.original = direct.original.clone();
        prop_assert_eq!(direct, via);
    }
}

fn p3() -> CsitProfile {
    CsitProfile::new(vec![0.8, 0.6, 0.2], vec![0.5, 0.4, 0.7]).unwrap()
}

fn fig4() -> CsitProfile {
    CsitProfile::new(vec![0.7, 0.6, 0.4, 0.3], vec![0.3, 0.4, 0.7, 0.6]).unwrap()
}

#[test]
fn u0_layers_telescope_on_plus_subbands() {
    let p = 1e6f64;
    for profile in [p3(), fig4()] {
        let plan = synthesize(&profile, User::One).unwrap();
        let ev = evaluate_plan(&plan, p, 2000, 21);
        let g = gaps(&plan.profile);
        for &j in &g.plus_set {
            let ids = &plan.schedule.per_subband[j];
            for (&id, tau) in ids.iter().zip(plan.schedule.tau(j)) {
                let step = ev.step(User::One, j, MessageId::U0(id)).unwrap();
                let e = step.mean_log2_sinr / p.log2();
                assert!((e - tau).abs() <= 0.1, "subband {} u0({id}): {e} vs {tau}", j + 1);
            }
        }
    }
}

#[test]
fn zero_forcing_leakage_is_at_noise_level() {
    let profile = CsitProfile::new(vec![1.0, 0.7, 0.4, 0.0], vec![0.5; 4]).unwrap();
    let p = 1e6f64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 4000;
    let mut acc = [0.0f64; 4];
    for _ in 0..trials {
        let d = draw_channels(&mut rng, &profile, p);
        for (j, ch) in d.subbands.iter().enumerate() {
            let w = ortho(&ch.h_hat).unwrap();
            let leak = (ch.h[0].conj() * w[0] + ch.h[1].conj() * w[1]).norm_sqr();
            acc[j] += leak.max(f64::MIN_POSITIVE).log2();
        }
    }
    for (j, &a) in profile.a().iter().enumerate() {
        let e = acc[j] / trials as f64 / p.log2();
        assert!(e <= -a * 0.9 + 0.1, "subband {}: exponent {e} for a = {a}", j + 1);
    }
}

#[test]
fn rates_grow_with_snr() {
    for profile in [p3(), fig4()] {
        let plan = synthesize(&profile, User::Two).unwrap();
        let cfg = SimConfig {
            trials: 1000,
            ..SimConfig::default()
        };
        let r = sweep(&plan, &cfg).unwrap();
        for w in r.points.windows(2) {
            for (lo, hi) in w[0].evaluation.messages.iter().zip(&w[1].evaluation.messages) {
                assert_eq!(lo.message, hi.message);
                assert!(hi.deliverable_bits >= lo.deliverable_bits, "{}: {} then {}", lo.message, lo.deliverable_bits, hi.deliverable_bits);
            }
        }
    }
}

#[test]
fn sweeps_repeat_exactly() {
    let plan = synthesize(&p3(), User::One).unwrap();
    let cfg = SimConfig {
        trials: 150,
        seed: 4,
        ..SimConfig::default()
    };
    assert_eq!(sweep(&plan, &cfg).unwrap(), sweep(&plan, &cfg).unwrap());
}
