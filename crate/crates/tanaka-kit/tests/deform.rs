use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use serde_json::json;
use tanaka_kit::deform::*;
use tanaka_kit::liealg::{LieAlgJson, LieAlgebra};
use tanaka_kit::poly::Poly;
use tanaka_kit::{Gauss, Scalar};

fn path(name: &str) -> String {
    format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

const CASES: [&str; 11] = [
    "sec3_5_case_i",
    "sec3_5_case_ii",
    "sec3_5_case_iii",
    "sec3_5_case_iv",
    "sec3_5_case_v",
    "sec3_5_case_vi",
    "sec3_5_case_vii",
    "sec3_5_3_case_i",
    "sec3_5_3_case_ii",
    "sec3_5_3_case_iii",
    "sec3_6_3_nonint_full",
];

fn case_from(v: serde_json::Value) -> DeformCase {
    let j: DeformJson = serde_json::from_value(v).unwrap();
    DeformCase::from_json(&j).unwrap()
}

fn g(n: i64) -> Gauss {
    Gauss::from_int(n)
}

#[test]
fn all_fixture_cases_are_inconsistent_with_valid_certificates() {
    let mut names: Vec<&str> = CASES.to_vec();
    names.push("sec3_6_3_nonint_line");
    for name in names {
        let case = DeformCase::load(path(name)).unwrap();
        assert_eq!(case.expected_verdict().as_deref(), Some("Inconsistent"), "{name}");
        let ds = case.system().unwrap();
        assert!(ds.graded_bracket_variables().is_empty(), "{name}");
        let el = eliminate(&ds);
        assert_eq!(el.verdict, VerdictKind::Inconsistent, "{name}");
        for b in &el.branches {
            assert!(matches!(b.terminal, Terminal::Inconsistent(_)), "{name}");
            assert!(!b.exhausted, "{name}");
            replay(&el.equations, b).unwrap();
            assert!(check_certificate(&el.equations, b), "{name}");
        }
        let report = DeformReport::new(&case, &ds, &el);
        assert!(report.branches.iter().all(|b| b.replay_ok && b.certificate_ok), "{name}");
        assert!(DeformReport::trace_text(&ds, &el).contains("=> inconsistent"), "{name}");
    }
}

#[test]
fn tampered_trace_is_rejected() {
    let case = DeformCase::load(path("sec3_5_case_i")).unwrap();
    let ds = case.system().unwrap();
    let el = eliminate(&ds);
    let mut b = el.branches[0].clone();
    let Some(pos) = b.steps.iter().position(|s| matches!(s, Step::Substitute { .. })) else { panic!("no substitution") };
    if let Step::Substitute { expr, .. } = &mut b.steps[pos] {
        *expr = expr.add(&Poly::constant(Scalar::one(ds.m())));
    }
    assert!(replay(&el.equations, &b).is_err());
    let mut b = el.branches[0].clone();
    b.steps.truncate(pos);
    assert!(replay(&el.equations, &b).is_err());
}

#[test]
fn no_unknowns_gives_no_equations() {
    let case = DeformCase::load(path("sec3_5_case_i")).unwrap();
    let ds = build_deformation(&case.base, UnknownPolicy::None, &[], None).unwrap();
    assert!(ds.unknowns.is_empty());
    assert!(jacobi_system(&ds).is_empty());
    assert_eq!(eliminate(&ds).verdict, VerdictKind::Consistent);
}

#[test]
fn two_dimensional_algebra_has_no_triples() {
    let case = case_from(json!({
        "schema": "deform.v1",
        "basis": [{"name": "a", "degree": -1, "conj": "a"}, {"name": "b", "degree": 0, "conj": "b"}],
        "unknowns": {"policy": "all_positive_excess"}
    }));
    let ds = case.system().unwrap();
    assert_eq!(ds.unknowns.len(), 1);
    assert!(jacobi_system(&ds).is_empty());
    let el = eliminate(&ds);
    assert_eq!(el.verdict, VerdictKind::Consistent);
}

#[test]
fn pins_out_of_filtration_are_errors() {
    let base = json!({
        "schema": "deform.v1",
        "basis": [
            {"name": "e1", "degree": -1, "conj": "e1"},
            {"name": "e2", "degree": -1, "conj": "e2"},
            {"name": "e3", "degree": -2, "conj": "e3"}
        ],
        "brackets": [{"x": "e1", "y": "e2", "terms": [{"z": "e3", "c": "1"}]}],
        "unknowns": {"policy": "all_positive_excess"}
    });
    let with_pin = |terms: serde_json::Value| {
        let mut v = base.clone();
        v["pinned"] = json!([{"x": "e1", "y": "e2", "mode": "exact", "terms": terms}]);
        case_from(v).system()
    };
    assert!(matches!(with_pin(json!([{"z": "e3", "c": "2"}])), Err(DeformError::Pin(..))));
    assert!(matches!(with_pin(json!([])), Err(DeformError::Pin(..))));
    let ds = with_pin(json!([{"z": "e3", "c": "1"}, {"z": "e1", "free": true}])).unwrap();
    let names: Vec<&str> = ds.unknowns.iter().map(|u| u.name.as_str()).collect();
    assert_eq!(names.len(), 7);
    assert!(names.contains(&"[e1,e2]_e1") && !names.contains(&"[e1,e2]_e2"));
}

/// The Jacobi system of the general filtered deformation of the Heisenberg
/// algebra, checked against a dense Jacobiator of the evaluated brackets.
#[test]
fn heisenberg_jacobi_matches_dense_jacobiator() {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path("heis3")).unwrap()).unwrap();
    v["unknowns"] = json!({"policy": "all_positive_excess"});
    let case = case_from(v);
    let ds = case.system().unwrap();
    // [e1,e2] gains e1, e2 components; [e1,e3], [e2,e3] gain e1, e2, e3
    assert_eq!(ds.unknowns.len(), 8);
    let n = 3;
    let eqs = jacobi_system(&ds);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let vars: Vec<Gauss> = (0..ds.variables.len()).map(|_| g(rng.gen_range(-5..=5))).collect();
        let c: Vec<Vec<Vec<Gauss>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let b = ds.bracket(i, j);
                        (0..n).map(|k| b.get(&k).map_or(Gauss::zero(), |p| p.eval(&vars, &[]))).collect()
                    })
                    .collect()
            })
            .collect();
        let (i, j, k) = (0, 1, 2);
        let mut dense = vec![Gauss::zero(); n];
        for (a, b, d) in [(i, j, k), (j, k, i), (k, i, j)] {
            for z in 0..n {
                for w in 0..n {
                    dense[w] = dense[w].add(&c[a][b][z].mul(&c[z][d][w]));
                }
            }
        }
        for (w, want) in dense.iter().enumerate() {
            let got = eqs.iter().find(|e| e.component == w).map_or(Gauss::zero(), |e| e.poly.eval(&vars, &[]));
            assert_eq!(&got, want, "component {w}");
        }
    }
}

#[test]
fn grading_element_acts_diagonally() {
    for name in CASES {
        let case = DeformCase::load(path(name)).unwrap();
        let ds = case.system().unwrap();
        assert!(ds.graded_bracket_variables().is_empty(), "{name}");
        if let Some(s) = case.graded_by {
            for x in 0..ds.base.dim() {
                let b = ds.bracket(s, x);
                assert!(b.keys().all(|&k| k == x), "{name}: [S,{}]", ds.base.name(x));
            }
        }
    }
}

/// Samples accepted across the non-inconsistent branches; every accepted
/// sample must satisfy all original equations.
fn soundness_samples(el: &Elimination, nvars: usize, nunits: usize, want: usize, seed: u64) -> usize {
    let rep = sample_soundness(el, nvars, nunits, want, seed);
    assert!(rep.violations.is_empty(), "unsound: {:?}", rep.violations);
    rep.accepted
}

fn var(i: usize) -> Poly {
    Poly::var(0, i)
}

fn cst(n: i64) -> Poly {
    Poly::constant(Scalar::from_int(0, n))
}

#[test]
fn residual_branches_are_sound() {
    // v2 = v0 + 1, v0·v1 = 0, v3 = v1²
    let eqs = vec![
        var(2).sub(&var(0)).sub(&cst(1)),
        var(0).mul(&var(1)),
        var(3).sub(&var(1).mul(&var(1))),
    ];
    let el = eliminate_equations(&eqs);
    assert_eq!(el.verdict, VerdictKind::Residual);
    for b in &el.branches {
        replay(&el.equations, b).unwrap();
    }
    assert_eq!(soundness_samples(&el, 4, 0, 100, 1), 100);
}

#[test]
fn consistent_branches_are_sound() {
    // v0 = v1·v2, v3 = v1 − v0
    let eqs = vec![var(0).sub(&var(1).mul(&var(2))), var(3).sub(&var(1)).add(&var(0))];
    let el = eliminate_equations(&eqs);
    assert_eq!(el.verdict, VerdictKind::Consistent);
    assert_eq!(soundness_samples(&el, 4, 0, 100, 2), 100);
}

#[test]
fn case_splits_on_unit_coefficients_are_sound() {
    // (1 + u1)·v0 = 1, v1 = v0: splits on 1 + u1
    let m = 1;
    let u = Scalar::parse("1 + u1", m).unwrap();
    let eqs = vec![
        Poly::var(m, 0).scale(&u).sub(&Poly::constant(Scalar::one(m))),
        Poly::var(m, 1).sub(&Poly::var(m, 0)),
    ];
    let el = eliminate_equations(&eqs);
    assert_eq!(el.branches.len(), 2);
    let kinds: Vec<VerdictKind> = el.branches.iter().map(|b| b.terminal.kind()).collect();
    assert!(kinds.contains(&VerdictKind::Inconsistent));
    assert_eq!(el.verdict, VerdictKind::Consistent);
    for b in &el.branches {
        replay(&el.equations, b).unwrap();
        if let Terminal::Inconsistent(_) = b.terminal {
            assert!(check_certificate(&el.equations, b));
        }
    }
    assert_eq!(soundness_samples(&el, 2, 1, 100, 3), 100);
}

#[test]
fn unit_modulus_contradiction() {
    // u1 = 2 has no unimodular solution
    let m = 1;
    let eqs = vec![Poly::constant(Scalar::parse("u1 - 2", m).unwrap())];
    let el = eliminate_equations(&eqs);
    let Terminal::Inconsistent(c) = &el.branches[0].terminal else { panic!() };
    assert_eq!(c.kind, CertificateKind::UnitModulus);
}

/// Dropping the sub-frame pin of case (i) leaves a consistent family; every
/// sample of it is a genuine Lie bracket.
#[test]
fn relaxed_case_is_consistent_and_sound() {
    let mut case = DeformCase::load(path("sec3_5_case_i")).unwrap();
    let z10 = case.base.index("Z10").unwrap();
    let x01 = case.base.index("X01").unwrap();
    case.pinned.retain(|p| !(p.x == z10 && p.y == x01 || p.x == x01 && p.y == z10));
    let ds = case.system().unwrap();
    let el = eliminate(&ds);
    assert_ne!(el.verdict, VerdictKind::Inconsistent);
    assert!(soundness_samples(&el, ds.variables.len(), ds.m(), 100, 4) >= 100);
}

fn small_poly(nvars: usize) -> impl Strategy<Value = Poly> {
    let term = (-2i64..=2, proptest::collection::vec(0u32..=1, nvars));
    proptest::collection::vec(term, 1..4).prop_map(move |ts| {
        let mut p = Poly::zero(0);
        for (c, exps) in ts {
            let mut t = cst(c);
            for (v, e) in exps.iter().enumerate() {
                if *e > 0 {
                    t = t.mul(&var(v));
                }
            }
            p = p.add(&t);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_traces_replay_and_are_sound(eqs in proptest::collection::vec(small_poly(3), 1..4)) {
        let el = eliminate_equations(&eqs);
        for b in &el.branches {
            prop_assert!(replay(&el.equations, b).is_ok());
            if let Terminal::Inconsistent(_) = b.terminal {
                prop_assert!(check_certificate(&el.equations, b));
            }
        }
        soundness_samples(&el, 3, 0, 5, 9);
        if el.verdict == VerdictKind::Inconsistent {
            // no integer point in a small box solves the system
            for a in -2..=2 {
                for b in -2..=2 {
                    for c in -2..=2 {
                        let p = [g(a), g(b), g(c)];
                        prop_assert!(eqs.iter().any(|e| !e.eval(&p, &[]).is_zero()));
                    }
                }
            }
        }
    }
}

#[test]
fn json_round_trip() {
    let text = std::fs::read_to_string(path("sec3_5_case_iii")).unwrap();
    let j: DeformJson = serde_json::from_str(&text).unwrap();
    let again: DeformJson = serde_json::from_value(serde_json::to_value(&j).unwrap()).unwrap();
    assert_eq!(j, again);
    let _: LieAlgJson = serde_json::from_str(&text).unwrap();
    let _ = LieAlgebra::from_json(&j.base).unwrap();
}

fn verdicts_without(name: &str) -> BTreeMap<String, VerdictKind> {
    let case = DeformCase::load(path(name)).unwrap();
    case.sensitivity().unwrap().into_iter().map(|s| (s.bracket, s.verdict_without)).collect()
}

#[test]
fn reconstructed_pins_carry_the_contradictions() {
    use VerdictKind::*;
    let v = verdicts_without("sec3_5_3_case_iii");
    for (pin, want) in [("[X10,Y10]", Residual), ("[Z,X01]", Residual), ("[X10,X01]", Inconsistent), ("[Y10,X01]", Inconsistent), ("[Y10,Y01]", Inconsistent), ("[Z,Y10]", Inconsistent)] {
        assert_eq!(v[pin], want, "{pin}");
    }
    for name in ["sec3_5_case_i", "sec3_5_case_v"] {
        let v = verdicts_without(name);
        for (pin, verdict) in &v {
            let want = if pin == "[Z10,X01]" { Consistent } else { Inconsistent };
            assert_eq!(*verdict, want, "{name} {pin}");
        }
    }
}

