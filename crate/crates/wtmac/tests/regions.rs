mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wtmac::probkit::{mutual_information, Channel, Dist, FactoredInput, WiretapMAC};
use wtmac::regions::*;
use wtmac::Error;

fn rhs(poly: &RatePolytope, label: &str) -> f64 {
    poly.constraints
        .iter()
        .find(|c| c.label == label)
        .unwrap_or_else(|| panic!("no constraint {label}"))
        .rhs
}

fn const_eve_input() -> FactoredInput {
    let eve = Channel::constant(4, &Dist::new(vec![0.3, 0.7]).unwrap()).unwrap();
    let mac = WiretapMAC::from_marginals(2, 2, &wb62(), &eve).unwrap();
    FactoredInput::product(
        mac,
        &Dist::bernoulli(0.4).unwrap(),
        &Dist::bernoulli(0.55).unwrap(),
    )
    .unwrap()
}

#[test]
fn profile_constant_eavesdropper() {
    let p = info_profile(&const_eve_input()).unwrap();
    for z in [
        p.z_v1_g_v2u,
        p.z_v2_g_v1u,
        p.z_v1v2_g_u,
        p.z_v1v2,
        p.z_v1_g_u,
        p.z_v2_g_u,
        p.z_u,
        p.z_v1u,
        p.z_v2u,
    ] {
        assert!(z.abs() < 1e-12);
    }
    assert!(p.t_v1v2 > 0.1);
}

#[test]
fn profile_degenerate_inputs() {
    let mac = WiretapMAC::from_marginals(2, 2, &wb62(), &we62()).unwrap();
    let p = FactoredInput::new(
        Dist::point(1, 0).unwrap(),
        Channel::new(vec![vec![1.0]]).unwrap(),
        Channel::new(vec![vec![1.0]]).unwrap(),
        Channel::new(vec![vec![0.5, 0.5]]).unwrap(),
        Channel::new(vec![vec![0.2, 0.8]]).unwrap(),
        mac,
    )
    .unwrap();
    let prof = info_profile(&p).unwrap();
    assert!(prof.values().iter().all(|v| v.abs() < 1e-12));
    assert_eq!(prof.aux_sizes, (1, 1, 1));
}

#[test]
fn profile_of_binary_example() {
    let prof = info_profile(&input62(true)).unwrap();
    assert!((prof.z_v1_g_v2u - 0.2101).abs() < 1e-3);
    assert!((prof.z_v2_g_v1u - 0.0590).abs() < 1e-3);
    assert!((prof.t_v1_g_v2u - 0.2847).abs() < 1e-3);
    assert!((prof.t_v2_g_v1u - 0.0566).abs() < 1e-3);
}

#[test]
fn profile_matches_full_joint() {
    // axes of the full joint: U V1 V2 X Y T Z
    let p = input62(false);
    let j = p.joint().unwrap();
    let prof = info_profile(&p).unwrap();
    let mi = |a: &[usize], b: &[usize], c: &[usize]| mutual_information(&j, a, b, c).unwrap();
    assert!((prof.t_v1_g_v2u - mi(&[5], &[1], &[2, 0])).abs() < 1e-12);
    assert!((prof.z_v1v2 - mi(&[6], &[1, 2], &[])).abs() < 1e-12);
    assert!((prof.z_v2u - mi(&[6], &[2, 0], &[])).abs() < 1e-12);
}

#[test]
fn classify_examples() {
    let c = classify_case(&const_eve_input(), 0.5).unwrap();
    assert!(c.contains(CaseLabel::Case3));

    // Eve sees through Bob's channel, Bob sees nothing.
    let nothing = Channel::constant(4, &Dist::uniform(2).unwrap()).unwrap();
    let mac = WiretapMAC::from_marginals(2, 2, &nothing, &wb62()).unwrap();
    let p = FactoredInput::product(mac, &Dist::uniform(2).unwrap(), &Dist::uniform(2).unwrap())
        .unwrap();
    for hc in [0.0, 0.1, 5.0] {
        assert!(classify_case(&p, hc).unwrap().cases.is_empty());
    }

    for v1_is_y in [true, false] {
        let c = classify_case(&input62(v1_is_y), 0.0).unwrap();
        assert_eq!(c.cases, vec![CaseLabel::Case0]);
    }
    assert!(matches!(
        classify_case(&input62(true), -1.0),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn boundary_gates_warn() {
    let prof = info_profile(&input62(true)).unwrap();
    let c = classify_profile(&prof, prof.z_v1v2 + 1e-11).unwrap();
    assert!(c.contains(CaseLabel::Case3));
    assert!(c.warnings.iter().any(|w| w.contains("Case3")));
    let c = classify_profile(&prof, prof.z_v1v2).unwrap();
    assert!(!c.contains(CaseLabel::Case3));
}

#[test]
fn alpha1_bounds_binary_example() {
    let prof = info_profile(&input62(true)).unwrap();
    let AlphaRange::Interval { alpha0, alpha1 } = alpha_bounds_case1(&prof) else {
        panic!("unexpected degenerate range")
    };
    assert_eq!(alpha1, 1.0);
    assert!(alpha0 > 0.0);
    // (I(Z∧X|Y) - I(T∧X|Y)) / (I(Z∧X|Y) - I(Z∧X)) with the printed values
    let oracle = (0.05901 - 0.05662) / (0.05901 - 0.00467);
    assert!((alpha0 - oracle).abs() < 2e-3);
    assert!((alpha0 - 0.0442).abs() < 1e-3);
}

#[test]
fn alpha1_zero_when_positive_part_vanishes() {
    let prof = info_profile(&input62(false)).unwrap();
    assert!(prof.t_v2_g_v1u >= prof.z_v2_g_v1u);
    let AlphaRange::Interval { alpha0, .. } = alpha_bounds_case1(&prof) else {
        panic!("unexpected degenerate range")
    };
    assert_eq!(alpha0, 0.0);
}

#[test]
fn alpha2_gate_and_branches() {
    let prof = info_profile(&input62(true)).unwrap();
    assert!(matches!(
        alpha_bounds_case2(&prof, 0.0),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        alpha_bounds_case2(&prof, prof.z_v1v2 + 0.1),
        Err(Error::Precondition(_))
    ));

    let mut eq = prof.clone();
    eq.z_v2_g_v1u = eq.z_v1_g_v2u;
    let hc = 0.5 * (eq.z_v1u.min(eq.z_v2u) + eq.z_v1v2);
    assert_eq!(
        alpha_bounds_case2(&eq, hc).unwrap(),
        AlphaRange::DegenerateEqual
    );

    // H_C >= I(Z∧V1U), I(T∧V2|V1U) >= I(Z∧V2|V1U), I(T∧V1V2|U) >= I(Z∧V1|V2U)
    let mut p = prof.clone();
    p.t_v2_g_v1u = p.z_v2_g_v1u + 0.001;
    assert!(p.z_v1_g_v2u > p.z_v2_g_v1u && p.t_v1v2_g_u >= p.z_v1_g_v2u);
    let hc = 0.5 * (p.z_v1u + p.z_v1v2);
    let AlphaRange::Interval { alpha0, .. } = alpha_bounds_case2(&p, hc).unwrap() else {
        panic!("expected an interval")
    };
    assert_eq!(alpha0, 0.0);
}

#[test]
fn region_examples() {
    let p = const_eve_input();
    let prof = info_profile(&p).unwrap();
    let r = region_common(&p, 0.5, CaseLabel::Case3).unwrap();
    assert!((rhs(&r, "R0+R1+R2 <= I(T∧V1V2) - I(Z∧V1V2)") - prof.t_v1v2).abs() < 1e-12);

    let r = region_common(&input62(true), 0.0, CaseLabel::Case0).unwrap();
    // I(T∧Y|X) - I(Z∧Y) - [I(Z∧X|Y) - I(T∧X|Y)]_+ from the printed values
    let oracle = 0.28468 - 0.15573 - (0.05901f64 - 0.05662).max(0.0);
    assert!((rhs(&r, "R1 bound") - oracle).abs() < 5e-5);
    assert_eq!(rhs(&r, "R0 = 0"), 0.0);
    assert!(r.contains(&[0.0, 0.1, 0.0], 1e-12).unwrap());
    assert!(!r.contains(&[0.01, 0.0, 0.0], 1e-12).unwrap());

    assert!(matches!(
        region_common(&input62(true), 0.0, CaseLabel::Case3),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn elementary_examples() {
    let p = input62(true);
    let prof = info_profile(&p).unwrap();
    let r = elementary_region(&p, 0.0, CaseLabel::Case0, 1.0).unwrap();
    assert!((rhs(&r, "R1 bound") - (prof.t_v1_g_v2u - prof.z_v1_g_v2u)).abs() < 1e-12);
    assert!(matches!(
        elementary_region(&p, 0.0, CaseLabel::Case0, 0.01),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn polytope_contains_examples() {
    let r = region_common(&const_eve_input(), 0.5, CaseLabel::Case3).unwrap();
    assert!(r.constraints.iter().all(|c| c.rhs >= 0.0));
    assert!(polytope_contains(&r, &[0.0, 0.0, 0.0], 0.0).unwrap());
    let tol = 1e-9;
    let b = rhs(&r, "R1 bound");
    assert!(!polytope_contains(&r, &[0.0, b + 2.0 * tol, 0.0], tol).unwrap());
    assert!(polytope_contains(&r, &[0.0, b + 0.5 * tol, 0.0], tol).unwrap());
    assert!(matches!(
        polytope_contains(&r, &[0.0, 0.0], tol),
        Err(Error::Validation(_))
    ));
}

#[test]
fn polytope_rejects_bad_constraints() {
    let mut p = RatePolytope::new(2);
    assert!(p.push(vec![0.0, 0.0], 1.0, "zero").is_err());
    assert!(p.push(vec![1.0, 0.0], f64::NAN, "nan").is_err());
    assert!(p.push(vec![1.0], 1.0, "short").is_err());
    p.push(vec![1.0, 1.0], 1.0, "sum").unwrap();
    let back = RatePolytope::from_json_str(&p.to_json().to_string()).unwrap();
    assert_eq!(back, p);
    assert!(
        RatePolytope::from_json_str(r#"{"dim":2,"constraints":[{"coeffs":[0,0],"rhs":1}]}"#)
            .is_err()
    );
}

#[test]
fn polytope_vertices_of_simplex() {
    let mut p = RatePolytope::new(3);
    p.push(vec![1.0, 1.0, 1.0], 1.0, "").unwrap();
    let mut v = p.vertices();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(
        v,
        vec![
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0]
        ]
    );
    let (best, _) = p.max_weighted(&[0.0, 2.0, 1.0]).unwrap();
    assert!((best - 2.0).abs() < 1e-12);
}

fn union_instance() -> UnionLemmaInstance {
    UnionLemmaInstance {
        a1: 0.8,
        a2: 0.2,
        b1: 0.3,
        b2: 0.7,
        c: 1.0,
        d: 0.4,
        r1: 1.5,
        r2: 1.2,
        r12: 2.0,
        r012: 2.5,
        alpha0: 0.3,
        alpha1: 0.3,
    }
}

#[test]
fn union_lemma_single_alpha() {
    let inst = union_instance();
    let k = inst.k();
    let ka = inst.k_alpha(inst.alpha0);
    assert_eq!(k.constraints.len(), ka.constraints.len());
    for (x, y) in k.constraints.iter().zip(&ka.constraints) {
        assert_eq!(x.coeffs, y.coeffs);
        assert!((x.rhs - y.rhs).abs() < 1e-15);
    }
    let rep = verify_union_lemma(&inst, &LemmaOptions::default()).unwrap();
    assert!(rep.passed(), "{:?}", rep.counterexamples);
    assert!(rep.points_checked >= 200);
}

#[test]
fn union_lemma_empty_sides() {
    let inst = UnionLemmaInstance {
        d: 3.0,
        ..union_instance()
    };
    let rep = verify_union_lemma(&inst, &LemmaOptions::default()).unwrap();
    assert!(rep.trivially_equal);
    assert!(rep.note.contains("both empty"));
    assert!(inst.k().is_empty());
    assert!(inst.k_alpha(0.3).is_empty());
}

#[test]
fn union_lemma_hypotheses() {
    let opts = LemmaOptions::default();
    for bad in [
        UnionLemmaInstance {
            b1: 0.9,
            ..union_instance()
        },
        UnionLemmaInstance {
            c: 1.1,
            ..union_instance()
        },
        UnionLemmaInstance {
            r12: 3.0,
            ..union_instance()
        },
        UnionLemmaInstance {
            alpha0: 0.6,
            ..union_instance()
        },
        UnionLemmaInstance {
            r2: -0.1,
            ..union_instance()
        },
        UnionLemmaInstance {
            r1: 0.1,
            ..union_instance()
        },
    ] {
        assert!(
            matches!(verify_union_lemma(&bad, &opts), Err(Error::Precondition(_))),
            "{bad:?}"
        );
    }
}

fn hull_instance() -> HullLemmaInstance {
    HullLemmaInstance {
        r1: 1.2,
        r2: 1.0,
        r12: 1.8,
        r012: 2.2,
        a: 0.4,
        b: 0.7,
        c: 0.3,
        alpha0: 0.2,
        alpha1: 0.7,
    }
}

#[test]
fn hull_lemma_equal_weights() {
    let inst = HullLemmaInstance {
        b: 0.4,
        ..hull_instance()
    };
    let k = inst.k();
    let w = k.constraints.iter().find(|c| c.label == "bR1+aR2").unwrap();
    let s = k.constraints.iter().find(|c| c.label == "R1+R2").unwrap();
    // a(R1+R2) <= a r12 - a^2 is the sum bound scaled by a
    assert!((w.coeffs[1] - inst.a).abs() < 1e-15 && (w.coeffs[2] - inst.a).abs() < 1e-15);
    assert!((w.rhs - inst.a * (inst.r12 - inst.a)).abs() < 1e-12);
    assert!((s.rhs - (inst.r12 - inst.a)).abs() < 1e-12);
    assert!(verify_convexhull_lemma(&inst, &LemmaOptions::default())
        .unwrap()
        .passed());
}

#[test]
fn hull_lemma_single_alpha() {
    let inst = HullLemmaInstance {
        alpha1: 0.2,
        ..hull_instance()
    };
    let k = inst.k();
    let ka = inst.k_alpha(0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in k.sample_points(200, &mut rng) {
        assert!(ka.contains(&p, 1e-9).unwrap());
    }
    for p in ka.sample_points(200, &mut rng) {
        assert!(k.contains(&p, 1e-9).unwrap());
    }
}

#[test]
fn hull_lemma_both_orders() {
    let opts = LemmaOptions::default();
    for (a, b) in [(0.4, 0.7), (0.7, 0.4)] {
        let inst = HullLemmaInstance {
            a,
            b,
            ..hull_instance()
        };
        let rep = verify_convexhull_lemma(&inst, &opts).unwrap();
        assert!(rep.passed(), "{:?}", rep.counterexamples);
        assert!(!rep.witnesses.is_empty());
    }
}

#[test]
fn hull_lemma_hypotheses() {
    let opts = LemmaOptions::default();
    for bad in [
        HullLemmaInstance {
            r12: 1.0,
            ..hull_instance()
        },
        HullLemmaInstance {
            r12: 2.5,
            ..hull_instance()
        },
        HullLemmaInstance {
            alpha0: 0.8,
            ..hull_instance()
        },
        HullLemmaInstance {
            c: 3.0,
            ..hull_instance()
        },
        HullLemmaInstance {
            a: -0.1,
            ..hull_instance()
        },
    ] {
        assert!(
            matches!(
                verify_convexhull_lemma(&bad, &opts),
                Err(Error::Precondition(_))
            ),
            "{bad:?}"
        );
    }
}

#[test]
fn lemma_suite_small() {
    let opts = LemmaOptions {
        seed: 11,
        ..LemmaOptions::default()
    };
    let rep = verify_lemma_suite(100, &opts).unwrap();
    assert!(
        rep.passed(),
        "{:?} {:?}",
        rep.union_failures,
        rep.hull_failures
    );
    assert!(rep.union_points >= 100 * 200 && rep.hull_points >= 100 * 190);
    let again = verify_lemma_suite(100, &opts).unwrap();
    assert_eq!(rep, again);
}

#[test]
fn random_instances_satisfy_hypotheses() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        assert!(!random_union_instance(&mut rng).validate().unwrap());
        random_hull_instance(&mut rng).validate().unwrap();
    }
}

/// Admissible α for Case 2, found without the closed form: the elementary
/// region must be nonempty and the randomness it spends must fit in H_C.
fn case2_alpha_oracle(p: &InfoProfile, hc: f64, alpha: f64) -> bool {
    let e = elementary_from_profile(p, CaseLabel::Case2, alpha);
    let nonempty = e.constraints.iter().all(|c| c.rhs >= -1e-12);
    let j0 = alpha * p.z_v2u + (1.0 - alpha) * p.z_v1u;
    nonempty && j0 <= hc + 1e-12
}

fn case2_hc(p: &InfoProfile, lambda: f64) -> f64 {
    let lo = p.z_v1u.min(p.z_v2u);
    lo + lambda * (p.z_v1v2 - lo)
}

/// Dense grid containment of `inner` in `outer` through vertices and samples.
fn assert_inside(
    inner: &RatePolytope,
    outer: &RatePolytope,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<(), TestCaseError> {
    for v in inner
        .vertices()
        .into_iter()
        .chain(inner.sample_points(40, rng))
    {
        prop_assert!(
            outer.violation(&v) <= 1e-9,
            "{v:?} violates {:?}",
            outer.violated(&v, 1e-9)
        );
    }
    Ok(())
}

/// Smallest violation of `point` over `elem(α)`, α ∈ [lo, hi]. Every bound
/// is affine in α, so the violation is convex in α and ternary search finds
/// its minimum.
fn best_alpha(elem: &impl Fn(f64) -> RatePolytope, point: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let f = |a: f64| elem(a).violation(point);
    let (mut l, mut h) = (lo, hi);
    for _ in 0..200 {
        let m1 = l + (h - l) / 3.0;
        let m2 = h - (h - l) / 3.0;
        if f(m1) <= f(m2) {
            h = m2;
        } else {
            l = m1;
        }
    }
    let a = 0.5 * (l + h);
    (a, f(a))
}

/// Checks `region = ∪_α elementary(α)` by sampling both sides.
fn check_alpha_union(
    region: &RatePolytope,
    elem: impl Fn(f64) -> RatePolytope,
    lo: f64,
    hi: f64,
    seed: u64,
) -> std::result::Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 {
        let a = rng.gen_range(lo..=hi);
        assert_inside(&elem(a), region, &mut rng)?;
    }
    for p in region
        .vertices()
        .into_iter()
        .chain(region.sample_points(60, &mut rng))
    {
        let (a, v) = best_alpha(&elem, &p, lo, hi);
        prop_assert!(v <= 1e-9, "{p:?} not covered; best α = {a} misses by {v}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn profile_invariants(p in arb_input()) {
        let prof = info_profile(&p).unwrap();
        prop_assert!(prof.values().iter().all(|&v| v >= -1e-12));
        prop_assert!((prof.z_v1v2_g_u + prof.z_u - prof.z_v1v2).abs() < 1e-9);
        prop_assert!((prof.t_v1v2_g_u + prof.t_u - prof.t_v1v2).abs() < 1e-9);
        prop_assert!((prof.z_v1_g_u + prof.z_v2_g_v1u - prof.z_v1v2_g_u).abs() < 1e-9);
        prop_assert!((prof.z_v2_g_u - prof.z_v1_g_u - (prof.z_v2_g_v1u - prof.z_v1_g_v2u)).abs() < 1e-9);
        prop_assert!(prof.z_v1_g_v2u >= prof.z_v1_g_u - 1e-12);
        prop_assert_eq!(prof.swap().swap(), prof.clone());
        let swapped = info_profile(&p.swap_roles()).unwrap();
        for (x, y) in swapped.values().iter().zip(prof.swap().values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn compi_iff_alpha1_interval(p in arb_input()) {
        let prof = info_profile(&p).unwrap();
        let compi = prof.z_v1_g_u <= prof.t_v1_g_v2u
            && prof.z_v2_g_u <= prof.t_v2_g_v1u
            && prof.z_v1v2_g_u <= prof.t_v1_g_v2u + prof.t_v2_g_v1u;
        let margin = [
            prof.t_v1_g_v2u - prof.z_v1_g_u,
            prof.t_v2_g_v1u - prof.z_v2_g_u,
            prof.t_v1_g_v2u + prof.t_v2_g_v1u - prof.z_v1v2_g_u,
        ]
        .iter()
        .fold(f64::INFINITY, |m, x| m.min(x.abs()));
        prop_assume!(margin > 1e-9);
        let r = alpha_bounds_case1(&prof);
        prop_assert_eq!(r.is_feasible(), compi);
        if let AlphaRange::Interval { alpha0, alpha1 } = r {
            prop_assert!(alpha0 >= 0.0 && alpha1 <= 1.0);
        }
    }

    #[test]
    fn alpha2_matches_oracle(p in arb_input(), lambda in 0.05f64..1.0) {
        let prof = info_profile(&p).unwrap();
        let hc = case2_hc(&prof, lambda);
        prop_assume!(prof.z_v1u.min(prof.z_v2u) < hc && prof.z_v1v2 <= prof.t_v1v2);
        let r = alpha_bounds_case2(&prof, hc).unwrap();
        prop_assume!(r != AlphaRange::DegenerateEqual);
        let (lo, hi) = r.bounds();
        for k in 0..=200 {
            let a = k as f64 / 200.0;
            if (a - lo).abs() < 1e-9 || (a - hi).abs() < 1e-9 {
                continue;
            }
            prop_assert_eq!(case2_alpha_oracle(&prof, hc, a), a >= lo && a <= hi, "α = {}", a);
        }
    }

    #[test]
    fn case2_sum_and_weighted_forms(p in arb_input(), lambda in 0.05f64..1.0) {
        let prof = info_profile(&p).unwrap();
        let hc = case2_hc(&prof, lambda);
        prop_assume!(classify_profile(&prof, hc).unwrap().contains(CaseLabel::Case2));
        prop_assume!((prof.z_v1_g_v2u - prof.z_v2_g_v1u).abs() > 1e-9);
        let region = region_common_profile(&prof, hc, CaseLabel::Case2).unwrap();
        let q = if prof.z_v1_g_v2u > prof.z_v2_g_v1u { prof.clone() } else { prof.swap() };
        let (a, b) = (q.z_v1_g_v2u, q.z_v2_g_v1u);
        let mut third = q.z_v1_g_u;
        if b > 0.0 {
            third -= (a - b) * (1.0 - q.t_v2_g_v1u / b);
        }
        let min_form = q.t_v1v2_g_u - q.z_v1v2_g_u + (hc - q.z_u).min(q.z_v1_g_u).min(third);
        prop_assert!((rhs(&region, "R1+R2 bound") - min_form).abs() < 1e-9);
        if b > 0.0 {
            let w = region.constraints.iter().find(|c| c.label == "weighted sum bound").unwrap();
            let (c1, c2) = if prof.z_v1_g_v2u > prof.z_v2_g_v1u { (w.coeffs[1], w.coeffs[2]) } else { (w.coeffs[2], w.coeffs[1]) };
            // R1/a + R2/b <= I(T∧V1|U)/a + I(T∧V2|V1U)/b - 1, scaled by ab
            prop_assert!((c1 - b).abs() < 1e-12 && (c2 - a).abs() < 1e-12);
            let sym = a * b * (q.t_v1_g_u / a + q.t_v2_g_v1u / b - 1.0);
            prop_assert!((w.rhs - sym).abs() < 1e-9);
        }
    }

    #[test]
    fn case2_role_swap_is_involution(p in arb_input(), lambda in 0.05f64..1.0) {
        let prof = info_profile(&p).unwrap();
        let hc = case2_hc(&prof, lambda);
        let r = region_from_profile(&prof, hc, CaseLabel::Case2);
        let back = region_from_profile(&prof.swap(), hc, CaseLabel::Case2).swap_coords(1, 2);
        prop_assert_eq!(r.constraints.len(), back.constraints.len());
        for (x, y) in r.constraints.iter().zip(&back.constraints) {
            prop_assert!((x.rhs - y.rhs).abs() < 1e-12);
            for (c, d) in x.coeffs.iter().zip(&y.coeffs) {
                prop_assert!((c - d).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn elementary_case2_at_alpha0(p in arb_input(), lambda in 0.05f64..1.0) {
        let prof = info_profile(&p).unwrap();
        let hc = case2_hc(&prof, lambda);
        prop_assume!(classify_profile(&prof, hc).unwrap().contains(CaseLabel::Case2));
        prop_assume!(prof.z_v1_g_v2u > prof.z_v2_g_v1u + 1e-9);
        let AlphaRange::Interval { alpha0, alpha1 } = alpha_bounds_case2(&prof, hc).unwrap() else {
            unreachable!()
        };
        let region = region_common_profile(&prof, hc, CaseLabel::Case2).unwrap();
        let e0 = elementary_region_profile(&prof, hc, CaseLabel::Case2, alpha0).unwrap();
        prop_assert!((rhs(&e0, "R1 bound") - rhs(&region, "R1 bound")).abs() < 1e-12);
        let e1 = elementary_region_profile(&prof, hc, CaseLabel::Case2, alpha1).unwrap();
        prop_assert!((rhs(&e1, "R2 bound") - rhs(&region, "R2 bound")).abs() < 1e-12);
    }

    #[test]
    fn alpha_union_case1(p in arb_input(), extra in 0.01f64..1.0, seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        let hc = prof.z_u + extra;
        prop_assume!(classify_profile(&prof, hc).unwrap().contains(CaseLabel::Case1));
        let region = region_common_profile(&prof, hc, CaseLabel::Case1).unwrap();
        let (lo, hi) = alpha_range(&prof, hc, CaseLabel::Case1).unwrap().bounds();
        check_alpha_union(&region, |a| elementary_from_profile(&prof, CaseLabel::Case1, a), lo, hi, seed)?;
    }

    #[test]
    fn alpha_union_case2(p in arb_input(), lambda in 0.05f64..1.0, seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        let hc = case2_hc(&prof, lambda);
        prop_assume!(classify_profile(&prof, hc).unwrap().contains(CaseLabel::Case2));
        let region = region_common_profile(&prof, hc, CaseLabel::Case2).unwrap();
        let (lo, hi) = alpha_range(&prof, hc, CaseLabel::Case2).unwrap().bounds();
        // the union of the elementary regions is convex here and equals the region
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let a = rng.gen_range(lo..=hi);
            assert_inside(&elementary_from_profile(&prof, CaseLabel::Case2, a), &region, &mut rng)?;
        }
        if (prof.z_v1_g_v2u - prof.z_v2_g_v1u).abs() > EQ_TOL {
            check_alpha_union(&region, |a| elementary_from_profile(&prof, CaseLabel::Case2, a), lo, hi, seed)?;
        }
    }

    #[test]
    fn nesting(p in arb_input(), extra in 0.01f64..1.0, seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        let hc = prof.z_u + extra;
        prop_assume!(classify_profile(&prof, hc).unwrap().contains(CaseLabel::Case1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r1 = region_from_profile(&prof, hc, CaseLabel::Case1);
        let r2 = region_from_profile(&prof, hc.max(prof.z_v1v2), CaseLabel::Case2);
        let r3 = region_from_profile(&prof, hc, CaseLabel::Case3);
        assert_inside(&r1, &r2, &mut rng)?;
        assert_inside(&r2, &r3, &mut rng)?;
        assert_inside(&r1, &r3, &mut rng)?;
    }

    #[test]
    fn classification_monotone(p in arb_input(), h in 0.0f64..1.5, dh in 0.0f64..1.0) {
        let prof = info_profile(&p).unwrap();
        let small = classify_profile(&prof, h).unwrap();
        let large = classify_profile(&prof, h + dh).unwrap();
        for c in [CaseLabel::Case1, CaseLabel::Case3] {
            prop_assert!(!small.contains(c) || large.contains(c));
        }
        if small.contains(CaseLabel::Case2) {
            prop_assert!(large.contains(CaseLabel::Case2) || large.contains(CaseLabel::Case3));
        }
    }

    #[test]
    fn origin_in_regions(p in arb_input(), h in 0.0f64..1.5) {
        let prof = info_profile(&p).unwrap();
        for case in [CaseLabel::Case0, CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3] {
            let r = region_from_profile(&prof, h, case);
            if r.constraints.iter().all(|c| c.rhs >= 0.0) {
                prop_assert!(r.contains(&[0.0, 0.0, 0.0], 0.0).unwrap());
            }
        }
    }

    #[test]
    fn contains_agrees_with_direct_check(
        rows in proptest::collection::vec((proptest::collection::vec(-2.0f64..2.0, 3), -1.0f64..3.0), 1..6),
        point in proptest::collection::vec(-0.5f64..2.0, 3),
    ) {
        let mut poly = RatePolytope::new(3);
        for (c, r) in &rows {
            prop_assume!(c.iter().any(|&x| x != 0.0));
            poly.push(c.clone(), *r, "").unwrap();
        }
        let direct = point.iter().all(|&x| x >= 0.0)
            && rows.iter().all(|(c, r)| c.iter().zip(&point).map(|(a, b)| a * b).sum::<f64>() <= *r);
        prop_assert_eq!(poly.contains(&point, 0.0).unwrap(), direct);
    }

    #[test]
    fn sampled_points_lie_inside(p in arb_input(), seed in any::<u64>()) {
        let prof = info_profile(&p).unwrap();
        let r = region_from_profile(&prof, 1.0, CaseLabel::Case3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for q in r.sample_points(50, &mut rng) {
            prop_assert!(r.violation(&q) <= 1e-9);
        }
    }
}
