mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wtmac::conferencing::*;
use wtmac::probkit::{pos, Channel, Dist, FactoredInput, WiretapMAC};
use wtmac::regions::*;
use wtmac::Error;

fn rhs(poly: &RatePolytope, label: &str) -> f64 {
    poly.constraints
        .iter()
        .find(|c| c.label == label)
        .unwrap_or_else(|| panic!("no constraint {label}"))
        .rhs
}

fn caps(c1: f64, c2: f64) -> ConferencingCapacities {
    ConferencingCapacities::new(c1, c2).unwrap()
}

fn prof62() -> InfoProfile {
    info_profile(&input62(true)).unwrap()
}

/// Inputs whose auxiliaries ignore `U` (|U| = 1).
fn arb_trivial_u_input() -> impl Strategy<Value = FactoredInput> {
    (
        arb_dist(2),
        arb_dist(2),
        arb_channel(2, 2),
        arb_channel(2, 2),
        arb_channel(4, 2),
        arb_channel(4, 2),
    )
        .prop_map(|(v1, v2, x, y, wb, we)| {
            let mac = WiretapMAC::from_marginals(2, 2, &wb, &we).unwrap();
            FactoredInput::new(
                Dist::point(1, 0).unwrap(),
                Channel::from_arith(vec![v1]).unwrap(),
                Channel::from_arith(vec![v2]).unwrap(),
                x,
                y,
                mac,
            )
            .unwrap()
        })
}

fn arb_caps() -> impl Strategy<Value = ConferencingCapacities> {
    (0.001f64..0.6, 0.001f64..0.6).prop_map(|(a, b)| caps(a, b))
}

/// Largest violation of the β-elementary region, minimized over β by
/// ternary search (the violation is convex in β).
fn best_beta_violation(
    prof: &InfoProfile,
    case: CaseLabel,
    alpha: f64,
    c: &ConferencingCapacities,
    pt: &[f64],
) -> f64 {
    let (mut lo, mut hi) = beta_bounds(prof, case, alpha, c).unwrap().bounds();
    let f = |b: f64| {
        elementary_conf_from_profile(prof, case, alpha, b, c)
            .unwrap()
            .violation(pt)
    };
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi))
}

#[test]
fn j0_examples() {
    let prof = prof62();
    let j3 = j0_alpha(&prof, CaseLabel::Case3, 0.3).unwrap();
    assert!((j3 - 0.2147).abs() < 1e-3, "{j3}");
    assert_eq!(j0_alpha(&prof, CaseLabel::Case2, 1.0).unwrap(), prof.z_v2u);
    assert_eq!(j0_alpha(&prof, CaseLabel::Case2, 0.0).unwrap(), prof.z_v1u);
    // product inputs carry no information in U
    assert!(j0_alpha(&prof, CaseLabel::Case1, 0.0).unwrap().abs() < 1e-12);
    assert!(matches!(
        j0_alpha(&prof, CaseLabel::Case0, 0.0),
        Err(Error::Precondition(_))
    ));
    assert!(j0_alpha(&prof, CaseLabel::Case2, 1.5).is_err());
}

#[test]
fn beta_examples() {
    let prof = prof62();
    let j0 = prof.z_v1v2;
    let r = beta_bounds(&prof, CaseLabel::Case3, 0.0, &caps(j0 + 0.1, j0 + 0.2)).unwrap();
    assert_eq!(r.bounds(), (0.0, 1.0));
    let r = beta_bounds(&prof, CaseLabel::Case3, 0.0, &caps(j0 + 0.1, 0.0)).unwrap();
    assert_eq!(r.bounds(), (1.0, 1.0));
    let r = beta_bounds(&prof, CaseLabel::Case1, 0.0, &caps(0.1, 0.1)).unwrap();
    assert_eq!(r, BetaRange::NoRandomnessNeeded);
    let r = beta_bounds(&prof, CaseLabel::Case3, 0.0, &caps(0.05, 0.1)).unwrap();
    let (b0, b1) = r.bounds();
    assert!((b0 - (1.0 - 0.1 / j0)).abs() < 1e-15 && (b1 - 0.05 / j0).abs() < 1e-15);
    assert!(!r.is_feasible());
}

#[test]
fn capacities_validate() {
    assert!(ConferencingCapacities::new(-0.1, 0.0).is_err());
    assert!(ConferencingCapacities::new(f64::INFINITY, 0.0).is_err());
    assert_eq!(caps(0.2, 0.3).total(), 0.5);
}

#[test]
fn region_large_capacities() {
    let prof = prof62();
    let c = caps(50.0, 50.0);
    let reg = region_conferencing_profile(&prof, &c, CaseLabel::Case3, ALPHA_GRID).unwrap();
    let ConfRegion::Polytope(poly) = &reg else {
        panic!("Case 3 is a single polytope")
    };
    assert_eq!(rhs(poly, "R1+R2 bound"), prof.t_v1v2 - prof.z_v1v2);
    let (best, _) = reg.max_sum_rate().unwrap();
    assert!((best - (prof.t_v1v2 - prof.z_v1v2)).abs() < 1e-12);
}

#[test]
fn region_constant_eavesdropper() {
    let eve = Channel::constant(4, &Dist::new(vec![0.3, 0.7]).unwrap()).unwrap();
    let mac = WiretapMAC::from_marginals(2, 2, &wb62(), &eve).unwrap();
    let p = FactoredInput::product(
        mac,
        &Dist::bernoulli(0.4).unwrap(),
        &Dist::bernoulli(0.55).unwrap(),
    )
    .unwrap();
    let prof = info_profile(&p).unwrap();
    let c = caps(0.01, 0.02);
    let ConfRegion::Polytope(poly) = region_conferencing(&p, &c, CaseLabel::Case3).unwrap() else {
        panic!()
    };
    assert!((rhs(&poly, "R1 bound") - (prof.t_v1_g_v2u + 0.01)).abs() < 1e-12);
    assert!((rhs(&poly, "R2 bound") - (prof.t_v2_g_v1u + 0.02)).abs() < 1e-12);
}

#[test]
fn region_case_gates() {
    let prof = prof62();
    // H_C = C1 + C2 below I(Z∧V1V2) rules Case 3 out
    let err = region_conferencing_profile(&prof, &caps(0.05, 0.05), CaseLabel::Case3, ALPHA_GRID)
        .unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    assert!(
        region_conferencing_profile(&prof, &caps(0.1, 0.1), CaseLabel::Case0, ALPHA_GRID).is_err()
    );
    assert!(
        region_conferencing_profile(&prof, &caps(0.0, 0.0), CaseLabel::Case1, ALPHA_GRID).is_err()
    );
}

#[test]
fn region_without_conferencing_is_r0_slice() {
    let p = input62(true);
    let prof = info_profile(&p).unwrap();
    let reg = region_conferencing(&p, &caps(0.0, 0.0), CaseLabel::Case0).unwrap();
    let r0 = region_common_profile(&prof, 0.0, CaseLabel::Case0).unwrap();
    for w in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 2.0]] {
        let a = reg
            .vertices()
            .iter()
            .map(|v| w[0] * v[0] + w[1] * v[1])
            .fold(f64::NEG_INFINITY, f64::max);
        let b = r0.max_weighted(&[0.0, w[0], w[1]]).unwrap().0;
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn case2_union_region() {
    let prof = prof62();
    let hc = 0.5 * (prof.z_v1u.min(prof.z_v2u) + prof.z_v1v2);
    let c = caps(0.6 * hc, 0.4 * hc);
    let cls = classify_profile(&prof, hc).unwrap();
    assert!(cls.contains(CaseLabel::Case2), "{cls:?}");
    let reg = region_conferencing_profile(&prof, &c, CaseLabel::Case2, 11).unwrap();
    let ConfRegion::Union {
        alphas,
        parts,
        hull,
    } = &reg
    else {
        panic!()
    };
    assert_eq!(alphas.len(), 11);
    assert_eq!(parts.len(), 11);
    let (lo, hi) = alpha_range(&prof, hc, CaseLabel::Case2).unwrap().bounds();
    assert_eq!(alphas[0], lo);
    assert!((alphas[10] - hi).abs() < 1e-15);
    for part in parts {
        for v in part.vertices() {
            assert!(reg.contains(&v, 1e-12).unwrap());
        }
    }
    assert!(hull.len() >= 3);
}

#[test]
fn elementary_beta1_removes_r1_gain() {
    let prof = prof62();
    let j0 = prof.z_v1v2;
    let c = caps(0.15, 0.12);
    let (_, b1) = beta_bounds(&prof, CaseLabel::Case3, 0.0, &c)
        .unwrap()
        .bounds();
    assert!((b1 - 0.15 / j0).abs() < 1e-15);
    let poly = elementary_conf_region(&input62(true), CaseLabel::Case3, 0.0, b1, &c).unwrap();
    assert!((rhs(&poly, "R1 bound") - prof.t_v1_g_v2u).abs() < 1e-12);
    assert!(matches!(
        elementary_conf_region(&input62(true), CaseLabel::Case3, 0.0, b1 + 0.01, &c),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn rate_split_examples() {
    let prof = prof62();
    let c = caps(0.15, 0.12);
    let j0 = prof.z_v1v2;
    let beta = 0.5;
    let s = rate_split(0.01, 0.02, &prof, CaseLabel::Case3, 0.0, beta, &c).unwrap();
    assert!(0.01 <= c.c1 - beta * j0);
    assert_eq!(s.r0_from_1, 0.01);
    assert_eq!(s.r1, 0.0);
    assert_eq!(s.r0, s.r0_from_1 + s.r0_from_2);
    assert!(s.target.contains(&s.triple(), 1e-9).unwrap());

    // no conferencing: nothing moves into the common message
    let s = rate_split(0.0, 0.0, &prof, CaseLabel::Case0, 0.5, 0.0, &caps(0.0, 0.0)).unwrap();
    assert_eq!(s.triple(), [0.0, 0.0, 0.0]);

    let elem = elementary_conf_from_profile(&prof, CaseLabel::Case3, 0.0, beta, &c).unwrap();
    let far = [rhs(&elem, "R1 bound") + 0.1, 0.0];
    assert!(matches!(
        rate_split(far[0], far[1], &prof, CaseLabel::Case3, 0.0, beta, &c),
        Err(Error::Precondition(_))
    ));
}

/// `I(T∧V1|U) − a + [a − I(T∧V1|V2U)]_+` and its mirror; a negative value
/// lets the common `R2` bound of `R^(1)(p)` exceed its sum bound.
fn case1_split_margins(p: &InfoProfile) -> (f64, f64) {
    (
        p.t_v1_g_u - p.z_v1_g_v2u + pos(p.z_v1_g_v2u - p.t_v1_g_v2u),
        p.t_v2_g_u - p.z_v2_g_v1u + pos(p.z_v2_g_v1u - p.t_v2_g_v1u),
    )
}

#[test]
fn rate_split_case1_counterexample() {
    // search a seeded family for a Case-1 profile with a negative margin
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = None;
    for _ in 0..20_000 {
        let mut row = |k: usize| -> Vec<f64> {
            let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        };
        let pu = row(2);
        let v1 = vec![row(2), row(2)];
        let v2 = vec![row(2), row(2)];
        let x = vec![row(2), row(2)];
        let y = vec![row(2), row(2)];
        let wb: Vec<Vec<f64>> = (0..4).map(|_| row(2)).collect();
        let we: Vec<Vec<f64>> = (0..4).map(|_| row(2)).collect();
        let mac = WiretapMAC::from_marginals(
            2,
            2,
            &Channel::from_arith(wb).unwrap(),
            &Channel::from_arith(we).unwrap(),
        )
        .unwrap();
        let p = FactoredInput::new(
            Dist::from_arith(pu).unwrap(),
            Channel::from_arith(v1).unwrap(),
            Channel::from_arith(v2).unwrap(),
            Channel::from_arith(x).unwrap(),
            Channel::from_arith(y).unwrap(),
            mac,
        )
        .unwrap();
        let prof = info_profile(&p).unwrap();
        let c = caps(prof.z_u + 0.05, 0.0);
        if !classify_profile(&prof, c.total())
            .unwrap()
            .contains(CaseLabel::Case1)
        {
            continue;
        }
        let (m1, _) = case1_split_margins(&prof);
        if m1 < -1e-3 && prof.t_u - prof.z_u > 1e-3 {
            found = Some((prof, c));
            break;
        }
    }
    let (prof, c) = found.expect("a Case-1 profile with a negative split margin");
    // encoder 1 supplies all of J_0 and link 2 moves nothing
    let beta = 1.0;
    let elem = elementary_conf_from_profile(&prof, CaseLabel::Case1, 0.0, beta, &c).unwrap();
    // R1 = 0 keeps R̃0^(1) = R1, so the whole R2 stays private
    let r2 = rhs(&elem, "R2 bound").min(rhs(&elem, "R1+R2 bound"));
    assert!(elem.contains(&[0.0, r2], 1e-12).unwrap());
    match rate_split(0.0, r2, &prof, CaseLabel::Case1, 0.0, beta, &c) {
        Err(Error::ReductionInfeasible { constraint, excess }) => {
            assert_eq!(constraint, "R1+R2 bound");
            assert!(excess > 0.0);
        }
        other => panic!("expected an infeasible reduction, got {other:?}"),
    }
}

#[test]
fn conference_trivial() {
    let c = caps(0.1, 0.1);
    let conf = build_conference([1, 1], [1, 1], 1, 0.5, &c, 4).unwrap();
    assert_eq!(conf.j_sizes(), [1, 1]);
    assert_eq!(conf.iterations(), 1);
    assert_eq!(conf.joint(0, 0).unwrap(), vec![1.0]);
    assert!(conf.satisfies_capacity(4, &c));
}

#[test]
fn conference_beta_one() {
    let c = caps(1.0, 1.0);
    let conf = build_conference([2, 1], [3, 2], 8, 1.0, &c, 6).unwrap();
    let layout = conf.layout.as_ref().unwrap();
    assert_eq!(layout.randomness, [8, 1]);
    assert_eq!(layout.realized_beta, 1.0);
    assert_eq!(conf.j_sizes(), [16, 1]);
    let conf = build_conference([1, 1], [1, 1], 8, 0.0, &c, 6).unwrap();
    assert_eq!(conf.layout.unwrap().randomness, [1, 8]);
}

#[test]
fn conference_rounding() {
    let c = caps(2.0, 2.0);
    let conf = build_conference([1, 1], [1, 1], 10, 0.5, &c, 4).unwrap();
    let layout = conf.layout.unwrap();
    // ⌊√10⌋ = 3, ⌈10/3⌉ = 4
    assert_eq!(layout.randomness, [3, 4]);
    assert!((layout.realized_beta - 3f64.ln() / 12f64.ln()).abs() < 1e-15);
    let conf = build_conference([1, 1], [1, 1], 16, 0.5, &c, 4).unwrap();
    assert_eq!(conf.layout.unwrap().randomness, [4, 4]);
}

#[test]
fn conference_carries_common_part() {
    let c = caps(1.0, 1.0);
    let (common, private, l0) = ([3, 2], [2, 3], 6);
    let conf = build_conference(common, private, l0, 0.5, &c, 5).unwrap();
    let lr = conf.layout.clone().unwrap().randomness;
    for k1 in 0..6 {
        for k2 in 0..6 {
            for nu in 0..2 {
                let k = if nu == 0 { k1 } else { k2 };
                let m = conf.marginal(nu, k1, k2).unwrap();
                for (j, &mass) in m.iter().enumerate() {
                    let expect = if j / lr[nu] == k / private[nu] {
                        1.0 / lr[nu] as f64
                    } else {
                        0.0
                    };
                    assert!((mass - expect).abs() < 1e-15);
                }
            }
        }
    }
    assert!(conf.is_non_iterative(1e-15).unwrap());
    let back: WillemsConference = serde_json::from_value(conf.to_json()).unwrap();
    assert_eq!(back, conf);
}

#[test]
fn conference_overflow_names_link() {
    let c = caps(1.0, 0.25);
    // link 2 carries 2 x 2 symbols but ⌊2^(4 x 0.25)⌋ = 2
    let err = build_conference([1, 2], [1, 1], 4, 0.5, &c, 4).unwrap_err();
    match err {
        Error::Constraint(msg) => assert!(msg.starts_with("link 2"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(build_conference([1, 1], [1, 1], 4, 1.5, &c, 4).is_err());
    assert!(build_conference([0, 1], [1, 1], 4, 0.5, &c, 4).is_err());
}

#[test]
fn iterative_conference_is_detected() {
    // round 1: encoder 1 sends its bit; round 2: encoder 2 echoes it
    let r1 = ConferenceRound {
        j_size: [2, 1],
        maps: [vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0]]],
    };
    let r2 = ConferenceRound {
        j_size: [1, 2],
        maps: [
            vec![vec![1.0], vec![1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ],
    };
    let conf = WillemsConference::new([2, 1], vec![r1.clone(), r2]).unwrap();
    assert_eq!(conf.iterations(), 2);
    let j = conf.joint(1, 0).unwrap();
    assert_eq!(j, vec![0.0, 0.0, 0.0, 1.0]);
    assert!(!conf.is_non_iterative(1e-12).unwrap());
    let bad = ConferenceRound {
        j_size: [1, 2],
        maps: [
            vec![vec![1.0], vec![1.0]],
            vec![vec![0.7, 0.2], vec![0.0, 1.0]],
        ],
    };
    assert!(WillemsConference::new([2, 1], vec![r1, bad]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beta_interval_nonempty(p in arb_input(), c in arb_caps(), alpha in 0.0f64..1.0) {
        let prof = info_profile(&p).unwrap();
        for case in [CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3] {
            let j0 = j0_alpha(&prof, case, alpha).unwrap();
            let r = beta_bounds(&prof, case, alpha, &c).unwrap();
            let (b0, b1) = r.bounds();
            prop_assert!((0.0..=1.0).contains(&b0) && (0.0..=1.0).contains(&b1));
            if j0 > 0.0 && j0 < c.total() {
                prop_assert!(b0 <= b1 + 1e-15, "{b0} > {b1}");
            }
        }
    }

    #[test]
    fn beta_union_reproduces_region(p in arb_input(), c in arb_caps(), seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        let cls = classify_profile(&prof, c.total()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for case in [CaseLabel::Case1, CaseLabel::Case3] {
            if !cls.contains(case) {
                continue;
            }
            let ConfRegion::Polytope(reg) = region_conferencing_profile(&prof, &c, case, ALPHA_GRID).unwrap() else {
                unreachable!()
            };
            for pt in reg.sample_points(30, &mut rng) {
                prop_assert!(best_beta_violation(&prof, case, 0.0, &c, &pt) <= 1e-9, "{case} {pt:?}");
            }
            let (b0, b1) = beta_bounds(&prof, case, 0.0, &c).unwrap().bounds();
            let beta = rng.gen_range(b0..=b1);
            let elem = elementary_conf_from_profile(&prof, case, 0.0, beta, &c).unwrap();
            for pt in elem.sample_points(30, &mut rng) {
                prop_assert!(reg.contains(&pt, 1e-9).unwrap(), "{case} β={beta} {pt:?}");
            }
        }
        if cls.contains(CaseLabel::Case2) {
            let (lo, hi) = alpha_range(&prof, c.total(), CaseLabel::Case2).unwrap().bounds();
            let alpha = rng.gen_range(lo..=hi);
            let part = conf_case2_alpha(&prof, alpha, &c);
            for pt in part.sample_points(30, &mut rng) {
                prop_assert!(best_beta_violation(&prof, CaseLabel::Case2, alpha, &c, &pt) <= 1e-9);
            }
        }
    }

    #[test]
    fn vanishing_capacities_approach_r0(p in arb_trivial_u_input(), eps in 1e-9f64..1e-6) {
        let prof = info_profile(&p).unwrap();
        prop_assume!(classify_profile(&prof, 0.0).unwrap().contains(CaseLabel::Case0));
        let small = caps(eps, eps);
        prop_assume!(classify_profile(&prof, small.total()).unwrap().contains(CaseLabel::Case1));
        let conf = region_conferencing_profile(&prof, &small, CaseLabel::Case1, ALPHA_GRID).unwrap();
        let zero = region_conferencing_profile(&prof, &caps(0.0, 0.0), CaseLabel::Case0, ALPHA_GRID).unwrap();
        for w in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [1.0, 3.0]] {
            let best = |r: &ConfRegion| {
                r.vertices().iter().map(|v| w[0] * v[0] + w[1] * v[1]).fold(f64::NEG_INFINITY, f64::max)
            };
            let (a, b) = (best(&conf), best(&zero));
            prop_assert!((a - b).abs() <= 10.0 * eps * (w[0] + w[1]) + 1e-12, "{w:?}: {a} vs {b}");
        }
    }

    #[test]
    fn rate_split_sound_case3(p in arb_input(), c in arb_caps(), seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        prop_assume!(classify_profile(&prof, c.total()).unwrap().contains(CaseLabel::Case3));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b0, b1) = beta_bounds(&prof, CaseLabel::Case3, 0.0, &c).unwrap().bounds();
        let beta = rng.gen_range(b0..=b1);
        let elem = elementary_conf_from_profile(&prof, CaseLabel::Case3, 0.0, beta, &c).unwrap();
        for pt in elem.sample_points(40, &mut rng) {
            let s = rate_split(pt[0], pt[1], &prof, CaseLabel::Case3, 0.0, beta, &c).unwrap();
            prop_assert!((s.r0 - s.r0_from_1 - s.r0_from_2).abs() < 1e-15);
            prop_assert!(s.r1 >= 0.0 && s.r2 >= 0.0);
            prop_assert!(polytope_contains(&region_from_profile(&prof, c.total(), CaseLabel::Case3), &s.triple(), 1e-9).unwrap());
        }
    }

    #[test]
    fn rate_split_case1_with_margins(p in arb_input(), c in arb_caps(), seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        prop_assume!(classify_profile(&prof, c.total()).unwrap().contains(CaseLabel::Case1));
        let (m1, m2) = case1_split_margins(&prof);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b0, b1) = beta_bounds(&prof, CaseLabel::Case1, 0.0, &c).unwrap().bounds();
        let beta = rng.gen_range(b0..=b1);
        let elem = elementary_conf_from_profile(&prof, CaseLabel::Case1, 0.0, beta, &c).unwrap();
        for pt in elem.sample_points(40, &mut rng) {
            match rate_split(pt[0], pt[1], &prof, CaseLabel::Case1, 0.0, beta, &c) {
                Ok(s) => {
                    prop_assert!(s.target.contains(&s.triple(), 1e-9).unwrap());
                    prop_assert!(s.r1 >= 0.0 && s.r2 >= 0.0);
                }
                Err(Error::ReductionInfeasible { .. }) => {
                    prop_assert!(m1 < 0.0 || m2 < 0.0, "margins {m1} {m2} at {pt:?}");
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn rate_split_case2_sound_where_margins_hold(p in arb_input(), seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        let lo = prof.z_v1u.min(prof.z_v2u);
        prop_assume!(lo < prof.z_v1v2);
        let hc = 0.5 * (lo + prof.z_v1v2);
        prop_assume!(classify_profile(&prof, hc).unwrap().contains(CaseLabel::Case2));
        let c = caps(0.5 * hc, 0.5 * hc);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a0, a1) = alpha_range(&prof, hc, CaseLabel::Case2).unwrap().bounds();
        let alpha = rng.gen_range(a0..=a1);
        let (b0, b1) = beta_bounds(&prof, CaseLabel::Case2, alpha, &c).unwrap().bounds();
        prop_assume!(b0 <= b1);
        let beta = rng.gen_range(b0..=b1);
        let ok_margins = prof.t_v1_g_u >= alpha * prof.z_v1_g_v2u && prof.t_v2_g_u >= (1.0 - alpha) * prof.z_v2_g_v1u;
        let elem = elementary_conf_from_profile(&prof, CaseLabel::Case2, alpha, beta, &c).unwrap();
        for pt in elem.sample_points(40, &mut rng) {
            match rate_split(pt[0], pt[1], &prof, CaseLabel::Case2, alpha, beta, &c) {
                Ok(s) => prop_assert!(s.target.contains(&s.triple(), 1e-9).unwrap()),
                Err(Error::ReductionInfeasible { .. }) => prop_assert!(!ok_margins),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn conference_respects_links(
        common in (1usize..5, 1usize..5),
        private in (1usize..4, 1usize..4),
        l0 in 1usize..40,
        beta in 0.0f64..=1.0,
        c in (0.0f64..1.5, 0.0f64..1.5),
        n in 1usize..6,
    ) {
        let c = caps(c.0, c.1);
        match build_conference([common.0, common.1], [private.0, private.1], l0, beta, &c, n) {
            Ok(conf) => {
                prop_assert!(conf.satisfies_capacity(n, &c));
                let layout = conf.layout.clone().unwrap();
                prop_assert!(layout.randomness[0] * layout.randomness[1] >= l0);
                prop_assert!(conf.is_non_iterative(1e-12).unwrap());
                let j = conf.joint(0, conf.k[1] - 1).unwrap();
                prop_assert!((j.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            Err(Error::Constraint(msg)) => prop_assert!(msg.starts_with("link ")),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
