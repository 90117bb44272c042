use std::collections::BTreeMap;

use proptest::prelude::*;
use serde_json::Value;
use tanaka_kit::liealg::{BasisElement, BracketTable, LieAlgebra};
use tanaka_kit::prolong::{
    ce_differential, prolong_step, spencer_delta1, tanaka_prolong, Coefficients, Cochain, ProlongError, SymbolAlgebra,
};
use tanaka_kit::{Gauss, Scalar};

fn path(name: &str) -> String {
    format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn load(name: &str) -> LieAlgebra {
    LieAlgebra::load(path(name)).unwrap()
}

fn symbol_fixtures() -> Vec<String> {
    let dir = format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"));
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        if v["schema"] == "liealg.v1" {
            out.push(p.file_stem().unwrap().to_string_lossy().into_owned());
        }
    }
    out.sort();
    out
}

fn s(t: &str, m: usize) -> Scalar {
    Scalar::parse(t, m).unwrap()
}

fn cochain(alg: &LieAlgebra, arity: usize, terms: &[(&[&str], Option<&str>, &str)]) -> Cochain {
    let mut c = Cochain::zero(arity);
    for (args, t, coef) in terms {
        let args: Vec<usize> = args.iter().map(|a| alg.index(a).unwrap()).collect();
        c.add_term(&args, t.map(|t| alg.index(t).unwrap()), &s(coef, alg.m()));
    }
    c
}

#[test]
fn fixture_expectations() {
    for name in symbol_fixtures() {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(path(&name)).unwrap()).unwrap();
        let alg = load(&name);
        assert!(alg.check_jacobi().passed(), "{name}");
        let Some(pe) = v["expect"].get("prolong") else { continue };
        let kmax = pe["kmax"].as_u64().unwrap() as usize;
        let sym = SymbolAlgebra::new(alg).unwrap();
        let p = tanaka_prolong(&sym, kmax).unwrap();
        let dims: Vec<usize> = pe["dims"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap() as usize).collect();
        assert_eq!(p.dims(), dims, "{name}");
        assert_eq!(p.total() as u64, pe["total"].as_u64().unwrap(), "{name}");
        assert!(p.terminated, "{name}");
        assert!(p.algebra.check_jacobi().passed(), "{name}");
        assert!(p.assumptions.is_empty(), "{name}");
    }
}

#[test]
fn fprime_spectrum_of_grading_element() {
    let sym = SymbolAlgebra::new(load("sec3_5_fprime")).unwrap();
    let p = tanaka_prolong(&sym, 3).unwrap();
    let mut lam = p.algebra.zero();
    lam[p.algebra.index("Lambda").unwrap()] = s("-1", 0);
    let spec: Vec<String> = p.algebra.ad_spectrum(&lam).unwrap().iter().map(|x| x.to_string()).collect();
    assert_eq!(spec, ["-2", "-1", "-1", "1", "1", "0", "2", "3", "3"]);
}

#[test]
fn unit_parameter_basis() {
    let sym = SymbolAlgebra::new(load("sec3_5_3_symbol")).unwrap();
    let p = tanaka_prolong(&sym, 3).unwrap();
    assert_eq!(p.dims(), vec![2, 0, 0]);
    let a = &p.algebra;
    // expected: u·ξ10⊗B − iρ⊗Y01 and its conjugate, up to scalar
    let want = [
        cochain(a, 1, &[(&["X10"], Some("B"), "u1"), (&["R"], Some("Y01"), "-I")]),
        cochain(a, 1, &[(&["X01"], Some("B"), "u1^-1"), (&["R"], Some("Y10"), "I")]),
    ];
    for (i, w) in want.iter().enumerate() {
        let got = p.cochain(1, i);
        let key = w.entries.keys().next().unwrap();
        let ratio = w.entries[key].div_unit(&got.entries[key]).unwrap();
        let scaled: BTreeMap<_, _> = got.entries.iter().map(|(k, c)| (k.clone(), c * &ratio)).collect();
        assert_eq!(scaled, w.entries, "basis {i}: {}", got.format(a));
        assert!(ratio.is_unit());
    }
}

#[test]
fn paper_differentials() {
    let a = load("sec3_5_fprime");
    let d = |c: &Cochain, k| ce_differential(&a, c, k);
    let lam = cochain(&a, 0, &[(&[], Some("Lambda"), "1")]);
    let want = cochain(
        &a,
        1,
        &[
            (&["X10"], Some("X10"), "-1"),
            (&["X01"], Some("X01"), "-1"),
            (&["Z10"], Some("Z10"), "1"),
            (&["Z01"], Some("Z01"), "1"),
            (&["R"], Some("R"), "-2"),
        ],
    );
    assert_eq!(d(&lam, Coefficients::Adjoint), want);
    let b = cochain(&a, 0, &[(&[], Some("B"), "1")]);
    let want = cochain(&a, 1, &[(&["X10"], Some("Z10"), "-I"), (&["X01"], Some("Z01"), "I")]);
    assert_eq!(d(&b, Coefficients::Adjoint), want);
    // ρ = R^* with trivial coefficients
    let mut rho = Cochain::zero(1);
    rho.add_term(&[a.index("R").unwrap()], None, &Scalar::one(0));
    let want = {
        let mut c = Cochain::zero(2);
        c.add_term(&[a.index("X10").unwrap(), a.index("X01").unwrap()], None, &s("-I", 0));
        c
    };
    assert_eq!(d(&rho, Coefficients::Trivial), want);
    assert_eq!(d(&rho, Coefficients::Trivial).format(&a), "-I*X10^*∧X01^*");
}

#[test]
fn spencer_rejects_wrong_domain() {
    let sym = SymbolAlgebra::new(load("sec3_5_fprime")).unwrap();
    let a = sym.algebra();
    assert!(spencer_delta1(&sym, &Cochain::zero(1)).unwrap().is_zero());
    let bad = cochain(a, 1, &[(&["X10"], Some("Z10"), "1")]);
    assert!(matches!(spencer_delta1(&sym, &bad), Err(ProlongError::CochainDomain(_))));
    let bad = cochain(a, 0, &[(&[], Some("B"), "1")]);
    assert!(matches!(spencer_delta1(&sym, &bad), Err(ProlongError::CochainDomain(_))));
    let ok = cochain(a, 1, &[(&["X10"], Some("B"), "1"), (&["R"], Some("Z01"), "-1")]);
    assert!(spencer_delta1(&sym, &ok).unwrap().is_zero());
}

/// All weight-`w` basis cochains of the given arity with adjoint values.
fn basis_cochains(a: &LieAlgebra, arity: usize) -> Vec<Cochain> {
    let neg: Vec<usize> = (0..a.dim()).filter(|&i| a.degree(i) < 0).collect();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..arity {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                let start = t.last().map_or(0, |&l| l + 1);
                neg.iter().filter(move |&&x| x >= start).map(move |&x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for args in tuples {
        for t in 0..a.dim() {
            let mut c = Cochain::zero(arity);
            c.add_term(&args, Some(t), &Scalar::one(a.m()));
            out.push(c);
        }
        let mut c = Cochain::zero(arity);
        c.add_term(&args, None, &Scalar::one(a.m()));
        out.push(c);
    }
    out
}

#[test]
fn differential_squares_to_zero_on_fixtures() {
    for name in symbol_fixtures() {
        let a = load(&name);
        for arity in 0..=2 {
            for c in basis_cochains(&a, arity) {
                let k = c.coefficients().unwrap();
                let dd = ce_differential(&a, &ce_differential(&a, &c, k), k);
                assert!(dd.is_zero(), "{name}: d∘d({}) = {}", c.format(&a), dd.format(&a));
            }
        }
    }
}

#[test]
fn first_prolongation_is_spencer_kernel() {
    let sym = SymbolAlgebra::new(load("sec3_5_fprime")).unwrap();
    let a = sym.algebra();
    let m = a.m();
    // weight-1 domain: g_{-1}^*⊗g_0 ⊕ g_{-2}^*⊗g_{-1}
    let mut cols = Vec::new();
    for x in 0..a.dim() {
        for t in 0..a.dim() {
            let (dx, dt) = (a.degree(x), a.degree(t));
            if (dx == -1 && dt == 0) || (dx == -2 && dt == -1) {
                cols.push((x, t));
            }
        }
    }
    assert_eq!(cols.len(), 4 * 2 + 4);
    let images: Vec<Cochain> = cols
        .iter()
        .map(|&(x, t)| spencer_delta1(&sym, &{
            let mut c = Cochain::zero(1);
            c.add_term(&[x], Some(t), &Scalar::one(m));
            c
        }).unwrap())
        .collect();
    let keys: Vec<_> = images.iter().flat_map(|c| c.entries.keys().cloned()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let rows: Vec<Vec<Scalar>> = keys
        .iter()
        .map(|k| images.iter().map(|c| c.entries.get(k).cloned().unwrap_or_else(|| Scalar::zero(m))).collect())
        .collect();
    let (ker, _) = tanaka_kit::linalg::kernel(rows, cols.len(), m);
    let level = prolong_step(&sym, &[], 1).unwrap();
    assert_eq!(ker.len(), 2);
    assert_eq!(level.dim(), 2);
    // same subspace: stacking both bases keeps rank 2
    let as_vec = |mp: &tanaka_kit::prolong::LevelMap| -> Vec<Scalar> {
        cols.iter().map(|(x, t)| mp.values.get(x).and_then(|v| v.get(t)).cloned().unwrap_or_else(|| Scalar::zero(m))).collect()
    };
    let mut stacked = ker.clone();
    stacked.extend(level.maps.iter().map(as_vec));
    assert_eq!(tanaka_kit::linalg::echelon(stacked, cols.len()).rank(), 2);
}

#[test]
fn direct_sum_of_prolongations() {
    let f1 = SymbolAlgebra::new(load("sec3_5_fprime")).unwrap();
    let f2 = SymbolAlgebra::new(load("sec3_5_yplane")).unwrap();
    let sum = SymbolAlgebra::new(load("sec3_5_fprime").direct_sum(&load("sec3_5_yplane")).unwrap()).unwrap();
    let full = SymbolAlgebra::new(load("sec3_5_full")).unwrap();
    let p1 = tanaka_prolong(&f1, 3).unwrap();
    let p2 = tanaka_prolong(&f2, 3).unwrap();
    for s in [&sum, &full] {
        let p = tanaka_prolong(s, 3).unwrap();
        assert_eq!(p.total(), p1.total() + p2.total());
        let d: Vec<usize> = p1.dims().iter().zip(p2.dims()).map(|(a, b)| a + b).collect();
        assert_eq!(p.dims(), d);
    }
    // the constructed sum reproduces the degree-1 cochains of the summand
    let p = tanaka_prolong(&sum, 3).unwrap();
    let texts: Vec<String> = p.report().basis.into_iter().map(|b| b.cochain).collect();
    let t1: Vec<String> = p1.report().basis.into_iter().map(|b| b.cochain).collect();
    assert_eq!(texts, t1);
}

#[test]
fn non_fundamental_symbol_is_rejected() {
    // R of degree -2 not reached by brackets of degree -1
    let basis = vec![
        BasisElement { name: "X".into(), degree: -1, conj: 0 },
        BasisElement { name: "R".into(), degree: -2, conj: 1 },
    ];
    let a = LieAlgebra::new(vec![], basis, BracketTable::new()).unwrap();
    assert!(matches!(SymbolAlgebra::new(a), Err(ProlongError::NotFundamental(-2))));
}

#[test]
fn abelian_without_structure_algebra() {
    let basis = (0..3).map(|i| BasisElement { name: format!("e{i}"), degree: -1, conj: i }).collect();
    let a = LieAlgebra::new(vec![], basis, BracketTable::new()).unwrap();
    let sym = SymbolAlgebra::new(a).unwrap();
    assert_eq!(prolong_step(&sym, &[], 1).unwrap().dim(), 0);
}

/// Heisenberg algebra with a two-dimensional diagonal structure algebra.
fn heis_with_torus() -> LieAlgebra {
    let b = |n: &str, d: i32, c: usize| BasisElement { name: n.into(), degree: d, conj: c };
    let basis = vec![b("e1", -1, 0), b("e2", -1, 1), b("e3", -2, 2), b("E", 0, 3), b("H", 0, 4)];
    let one = |t: &str| s(t, 0);
    let mut t = BracketTable::new();
    t.insert((0, 1), vec![(2, one("1"))]);
    t.insert((0, 3), vec![(0, one("1"))]);
    t.insert((1, 3), vec![(1, one("1"))]);
    t.insert((2, 3), vec![(2, one("2"))]);
    t.insert((0, 4), vec![(0, one("-1"))]);
    t.insert((1, 4), vec![(1, one("1"))]);
    LieAlgebra::new(vec![], basis, t).unwrap()
}

/// Dense rank over Q(i) by plain Gaussian elimination.
fn dense_rank(mut rows: Vec<Vec<Gauss>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        let prow: Vec<Gauss> = rows[r].iter().map(|x| x.mul(&inv)).collect();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = x.sub(&f.mul(y));
            }
        }
        rows[r] = prow;
        r += 1;
    }
    r
}

/// Dimension of the first prolongation from the derivation rule, with
/// unknowns for every pair (negative element, element of degree +1 higher).
fn oracle_first_dim(a: &LieAlgebra) -> usize {
    let n = a.dim();
    let neg: Vec<usize> = (0..n).filter(|&i| a.degree(i) < 0).collect();
    let cols: Vec<(usize, usize)> =
        neg.iter().flat_map(|&x| (0..n).filter(move |&t| a.degree(t) == a.degree(x) + 1).map(move |t| (x, t))).collect();
    let c = |v: &Scalar| v.constant_value().unwrap_or_else(Gauss::zero);
    let mut rows = Vec::new();
    for &x in &neg {
        for &y in &neg {
            // component w of f([x,y]) − [f x, y] − [x, f y]
            for w in 0..n {
                let mut row = vec![Gauss::zero(); cols.len()];
                for (j, &(z, t)) in cols.iter().enumerate() {
                    let mut e = Gauss::zero();
                    if t == w {
                        e = e.add(&c(&a.bracket_basis(x, y)[z]));
                    }
                    if z == x {
                        e = e.sub(&c(&a.bracket_basis(t, y)[w]));
                    }
                    if z == y {
                        e = e.sub(&c(&a.bracket_basis(x, t)[w]));
                    }
                    row[j] = e;
                }
                rows.push(row);
            }
        }
    }
    cols.len() - dense_rank(rows)
}

#[test]
fn dense_oracle_agrees_on_small_symbols() {
    let mut algs = vec![load("heis3"), load("sec3_5_yplane"), heis_with_torus()];
    algs.push(load("heis3").direct_sum(&load("sec3_5_yplane")).unwrap());
    for a in algs {
        assert!(a.dim() <= 5);
        let want = oracle_first_dim(&a);
        let sym = SymbolAlgebra::new(a).unwrap();
        assert_eq!(prolong_step(&sym, &[], 1).unwrap().dim(), want);
    }
    // by hand: f(e1) = a(E - 3H), f(e2) = c(E + 3H), f(e3) = -2c e1 - 2a e2
    assert_eq!(oracle_first_dim(&heis_with_torus()), 2);
}

#[test]
fn torus_prolongation_is_a_lie_algebra() {
    let sym = SymbolAlgebra::new(heis_with_torus()).unwrap();
    let p = tanaka_prolong(&sym, 4).unwrap();
    assert!(p.terminated);
    assert!(p.algebra.check_jacobi().passed());
}

#[test]
fn report_json_shape() {
    let sym = SymbolAlgebra::new(load("sec3_5_fprime")).unwrap();
    let r = tanaka_prolong(&sym, 2).unwrap().report();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["dims"], serde_json::json!([2, 0]));
    assert_eq!(v["total"], 9);
    assert_eq!(v["basis"][0]["cochain"], "X10^*⊗B - R^*⊗Z01");
    assert_eq!(v["genericity_assumptions"], serde_json::json!([]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differential_squares_to_zero_on_random_cochains(
        coeffs in proptest::collection::vec((-3i64..=3, -3i64..=3), 64),
        arity in 0usize..=2,
    ) {
        let a = load("sec3_5_3_symbol");
        let basis: Vec<Cochain> = basis_cochains(&a, arity).into_iter().filter(|c| c.coefficients() == Some(Coefficients::Adjoint)).collect();
        let mut phi = Cochain::zero(arity);
        for (c, (re, im)) in basis.iter().zip(coeffs.iter().cycle()) {
            let ((args, t), _) = c.entries.iter().next().unwrap();
            let k = Scalar::constant(1, Gauss::new(tanaka_kit::scalars::rat(*re, 1), tanaka_kit::scalars::rat(*im, 1))) * Scalar::unit(1, 0, (*re % 2) as i32);
            phi.add_term(args, *t, &k);
        }
        let dd = ce_differential(&a, &ce_differential(&a, &phi, Coefficients::Adjoint), Coefficients::Adjoint);
        prop_assert!(dd.is_zero());
    }
}
