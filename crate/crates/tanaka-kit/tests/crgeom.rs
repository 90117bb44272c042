use num_rational::BigRational;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tanaka_kit::crgeom::catalog::catalog;
use tanaka_kit::crgeom::curve::{curve_nondegenerate, jordan_nondegenerate, wronskian4, Curve, Decision};
use tanaka_kit::crgeom::field::{Matrix, Subspace, VectorField};
use tanaka_kit::crgeom::func::{Chart, CoordFunction, GenPoly, ParamPoly};
use tanaka_kit::crgeom::parse::{parse_curve_json, parse_function};
use tanaka_kit::crgeom::symmetry::{is_cr_symmetry, rnc_spectrum_test, tube_symmetry_algebra, Candidate};
use tanaka_kit::crgeom::tube::{
    build_hyperquadric, build_tube, check_bracket_inclusions, freeman, freeman_ranks, levi_form, normalized_sections, section_field, TubeModel, Variant,
};
use tanaka_kit::crgeom::CrError;
use tanaka_kit::scalars::{rat, Gauss};

type F = CoordFunction;

fn curve(components: [&str; 4]) -> Curve {
    let doc = serde_json::json!({ "schema": "curve.v1", "name": "test", "components": components });
    parse_curve_json(&doc.to_string()).unwrap()
}

fn curve_in(var: &str, components: [&str; 4], domain: &[&str]) -> Curve {
    let doc = serde_json::json!({ "schema": "curve.v1", "name": "test", "variable": var, "components": components, "domain": domain });
    parse_curve_json(&doc.to_string()).unwrap()
}

fn rnc() -> Curve {
    curve(["1", "t", "t^2", "t^3"])
}

fn r(n: i64) -> BigRational {
    rat(n, 1)
}

fn int(n: i64) -> F {
    F::from_int(n)
}

// ------------------------------------------------------------ fields --

#[test]
fn coordinate_field_brackets() {
    let c = Chart::new(&["r", "s", "t"], Some(2));
    let dr = VectorField::coord(&c, 0);
    let ds = VectorField::coord(&c, 1);
    let dt = VectorField::coord(&c, 2);
    assert!(dr.bracket(&ds).unwrap().is_zero());
    let t_dr = dr.scale(&F::coord(&c, 2));
    assert_eq!(dt.bracket(&t_dr).unwrap(), dr);
}

fn random_field(rng: &mut StdRng, c: &Chart) -> VectorField {
    let mono = |rng: &mut StdRng| {
        let mut f = F::from_int(rng.gen_range(-3..=3));
        for j in 0..c.dim() {
            f = f.mul(&F::coord(c, j).pow(rng.gen_range(0..=2)));
        }
        f
    };
    let comps = (0..c.dim()).map(|_| mono(rng).add(&mono(rng))).collect();
    VectorField::new(c, comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn vector_field_brackets_satisfy_jacobi(seed in any::<u64>()) {
        let c = Chart::new(&["r", "s", "t"], Some(2));
        let mut rng = StdRng::seed_from_u64(seed);
        let (x, y, z) = (random_field(&mut rng, &c), random_field(&mut rng, &c), random_field(&mut rng, &c));
        let j = x.bracket(&y.bracket(&z).unwrap()).unwrap()
            .add(&y.bracket(&z.bracket(&x).unwrap()).unwrap()).unwrap()
            .add(&z.bracket(&x.bracket(&y).unwrap()).unwrap()).unwrap();
        prop_assert!(j.is_zero());
        prop_assert_eq!(x.bracket(&y).unwrap(), y.bracket(&x).unwrap().scale(&int(-1)));
    }
}

#[test]
fn bracket_rejects_chart_mismatch() {
    let a = VectorField::coord(&Chart::new(&["r", "s", "t"], Some(2)), 0);
    let b = VectorField::coord(&Chart::new(&["x1", "x2", "x3"], None), 0);
    assert!(matches!(a.bracket(&b), Err(CrError::ChartMismatch(_))));
}

// --------------------------------------------------------- Wronskian --

#[test]
fn wronskian_of_rational_normal_curve_is_product_of_factorials() {
    // 0!·1!·2!·3!
    assert_eq!(wronskian4(&rnc()), int(12));
}

#[test]
fn wronskian_examples() {
    assert!(wronskian4(&curve(["1", "t", "t^2", "0"])).is_zero());
    // Column reduction: subtracting the t² column leaves the RNC.
    assert_eq!(wronskian4(&curve(["1", "t", "t^2", "t^3+t^2"])), int(12));
    // [cos t, sin t, cos 2t, sin 2t] = M·[e^{it}, e^{-it}, e^{2it}, e^{-2it}] with
    // det M = (i/2)², and the exponential Wronskian is the Vandermonde product
    // Π_{j<k}(λ_k − λ_j) = −72 for λ = (i, −i, 2i, −2i): W = −¼·(−72) = 18.
    assert_eq!(wronskian4(&curve(["cos(t)", "sin(t)", "cos(2*t)", "sin(2*t)"])), int(18));
}

/// `W(τ^{e_0}, …, τ^{e_3}) = Π_{i<j}(e_j − e_i) · τ^{Σe − 6}`.
#[test]
fn power_curve_wronskian_matches_vandermonde() {
    let c = curve_in("tau", ["1", "tau", "tau^alpha", "tau^beta"], &["tau > 0", "1 < alpha < beta"]);
    let e = [ParamPoly::zero(), ParamPoly::one(), ParamPoly::param(0), ParamPoly::param(1)];
    let mut v = ParamPoly::one();
    for i in 0..4 {
        for j in i + 1..4 {
            v = v.mul(&e[j].sub(&e[i]));
        }
    }
    let tau = parse_function("tau^(alpha+beta-5)", &c.chart).unwrap();
    let want = F::from(GenPoly::constant(v)).mul(&tau);
    assert_eq!(wronskian4(&c), want);
    let n = curve_nondegenerate(&c);
    assert_eq!(n.decision, Decision::True);
    assert!(n.wronskian.contains("tau^(α + β - 5)"), "{}", n.wronskian);
}

#[test]
fn nondegeneracy_respects_the_declared_domain() {
    let bad = curve_in("tau", ["1", "tau", "tau^alpha", "tau^beta"], &["tau > 0", "0 < alpha < beta"]);
    let n = curve_nondegenerate(&bad);
    assert_eq!(n.decision, Decision::False);
    assert!(n.locus.iter().any(|l| l.contains("α - 1")), "{:?}", n.locus);
    // W = 12 + 48t has its only root at t = −1/4.
    let q = curve_in("t", ["1", "t", "t^2", "t^3+t^4"], &["t > 0"]);
    assert_eq!(wronskian4(&q), parse_function("12 + 48*t", &q.chart).unwrap());
    assert!(curve_nondegenerate(&q).is_true());
    let q_all = curve(["1", "t", "t^2", "t^3+t^4"]);
    assert_eq!(curve_nondegenerate(&q_all).decision, Decision::False);
    assert_eq!(curve_nondegenerate(&curve(["1", "t", "t^2", "0"])).decision, Decision::False);
    let rnc_cat = catalog().into_iter().find(|h| h.segre == "(4)").unwrap();
    assert!(curve_nondegenerate(&rnc_cat.curve).is_true());
}

#[test]
fn unfactored_coefficients_are_undecided() {
    // W = 2(α² + α + 1 − …): not a product of exponent differences.
    let c = curve_in("tau", ["1", "tau", "tau^alpha + tau^(alpha+1)", "tau^(alpha+3)"], &["tau > 0", "alpha > 5"]);
    let n = curve_nondegenerate(&c);
    assert_ne!(n.decision, Decision::False, "{n:?}");
}

// ------------------------------------------------------------ Jordan --

fn mat(rows: [[i64; 4]; 4]) -> [[BigRational; 4]; 4] {
    rows.map(|row| row.map(r))
}

#[test]
fn jordan_examples() {
    assert!(jordan_nondegenerate(&mat([[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [0, 0, 0, 3]])).nonderogatory);
    assert!(jordan_nondegenerate(&mat([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]])).nonderogatory);
    assert!(!jordan_nondegenerate(&mat([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]])).nonderogatory);
    // A 2-block and a separate eigenvalue-0 block: derogatory.
    assert!(!jordan_nondegenerate(&mat([[0, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 5]])).nonderogatory);
}

/// Random admissible parameter points for a catalog row.
fn admissible_samples(hc: &tanaka_kit::crgeom::catalog::HomogeneousCurve, rng: &mut StdRng, n: usize) -> Vec<[BigRational; 2]> {
    let mut out = vec![hc.sample.clone()];
    while out.len() < n {
        let a = rat(rng.gen_range(-40..=40), rng.gen_range(1..=5));
        let b = rat(rng.gen_range(-40..=40), rng.gen_range(1..=5));
        let p = [a, b];
        if hc.admits(&p) {
            out.push(p);
        }
    }
    out
}

#[test]
fn catalog_rows_are_consistent_and_nondegenerate() {
    let cat = catalog();
    assert_eq!(cat.len(), 12);
    let mut rng = StdRng::seed_from_u64(7);
    for hc in &cat {
        assert!(hc.generator_consistent(), "{}", hc.name());
        let sym = curve_nondegenerate(&hc.curve);
        assert_eq!(sym.decision, Decision::True, "{}: {sym:?}", hc.name());
        for p in admissible_samples(hc, &mut rng, 6) {
            assert!(hc.jordan(&p).nonderogatory, "{} at {p:?}", hc.name());
            let inst = hc.instantiate(&p).unwrap();
            assert!(curve_nondegenerate(&inst).is_true(), "{} at {p:?}", hc.name());
        }
    }
    let inf = cat.iter().find(|h| h.segre == "(211)" && h.label == "γ_∞").unwrap();
    assert_eq!(inf.curve.comps[1], parse_function("ln(tau)", &inf.curve.chart).unwrap());
    assert_eq!(inf.curve.comps[3], parse_function("1/tau", &inf.curve.chart).unwrap());
}

#[test]
fn excluded_parameters_are_rejected() {
    let row = catalog().into_iter().find(|h| h.segre == "(211)" && h.label == "γ_β").unwrap();
    for b in [1, -1, -3] {
        assert!(row.instantiate(&[r(0), r(b)]).is_err());
        assert!(tube_symmetry_algebra(&row, &[r(0), r(b)]).is_err());
    }
    // At the excluded values the Wronskian vanishes (the exclusions are sharp).
    let w = wronskian4(&row.curve.specialize(&[r(0), r(1)]));
    assert!(w.is_zero());
}

// -------------------------------------------------------------- tubes --

#[test]
fn rnc_tube_frame_and_bracket_generation() {
    let m = build_tube(&rnc(), Variant::TangentVariety).unwrap();
    assert!(m.bracket_generating());
    // rank D = 6: the decomposition of every frame field is exact.
    for k in 0..3 {
        let d = m.decompose(&m.xframe[k]).unwrap();
        assert!(d.c.is_zero());
        assert_eq!(m.decompose(&m.jx(k)).unwrap().a[k], F::constant(Gauss::i()));
    }
    // The intrinsic X2 maps to γ''.
    let g2 = rnc().derivative(2);
    assert_eq!(m.images[2].to_vec(), g2.to_vec());
    let planar = build_tube(&curve(["1", "t", "t^2", "0"]), Variant::TangentVariety).unwrap();
    assert!(!planar.bracket_generating());
    let ranks = freeman_ranks(&planar).unwrap();
    assert!(!ranks.bracket_generating && !ranks.three_nondegenerate());
    let m2 = build_tube(&rnc(), Variant::OsculatingRuled).unwrap();
    let g = rnc();
    for k in 0..3 {
        assert_eq!(m2.images[k].to_vec(), g.derivative(k + 1).to_vec());
    }
}

#[test]
fn rnc_brackets_and_levi_kernels() {
    let m = build_tube(&rnc(), Variant::TangentVariety).unwrap();
    let s = F::coord(&m.chart, 1);
    let half_inv_s = s.scale(&Gauss::from_int(2)).inv().unwrap();
    // Hand computation: [Z2, Z̄0] = (1/2s) Z̄1, [Z2, Z̄1] = (1/2s) Z̄2.
    let d = m.decompose(&m.z(2).bracket(&m.zbar(0)).unwrap()).unwrap();
    assert_eq!(d.b, vec![F::zero(), half_inv_s.clone(), F::zero()]);
    assert!(d.a.iter().all(F::is_zero) && d.c.is_zero());
    let d = m.decompose(&m.z(2).bracket(&m.zbar(1)).unwrap()).unwrap();
    assert_eq!(d.b[2], half_inv_s);
    let e = |i: usize| (0..3).map(|j| if i == j { F::one() } else { F::zero() }).collect::<Vec<_>>();
    let l1 = levi_form(&m, 1).unwrap();
    assert_eq!(l1.kernel, vec![e(0), e(1)]);
    let l2 = levi_form(&m, 2).unwrap();
    assert_eq!(l2.kernel, vec![e(0)]);
    assert!(levi_form(&m, 3).unwrap().kernel.is_empty());
    let ranks = freeman_ranks(&m).unwrap();
    assert_eq!((ranks.d10, ranks.k10, ranks.l10, ranks.hol_nondeg), (3, 2, 1, true));
    let hq = build_hyperquadric();
    assert!(levi_form(&hq, 1).unwrap().kernel.is_empty());
    assert_eq!(freeman_ranks(&hq).unwrap().k10, 0);
}

fn hermitian(m: &TubeModel) -> bool {
    let h = levi_form(m, 1).unwrap().matrix;
    (0..3).all(|a| (0..3).all(|b| h[a][b].conj() == h[b][a]))
}

#[test]
fn catalog_tubes_are_three_nondegenerate_with_hermitian_levi_forms() {
    for hc in catalog() {
        let m = build_tube(&hc.instantiate(&hc.sample).unwrap(), Variant::TangentVariety).unwrap();
        assert!(freeman_ranks(&m).unwrap().three_nondegenerate(), "{}", hc.name());
        assert!(hermitian(&m), "{}", hc.name());
    }
    assert!(hermitian(&build_hyperquadric()));
}

#[test]
fn symbolic_power_curve_tube_is_three_nondegenerate() {
    let hc = catalog().into_iter().next().unwrap();
    let m = build_tube(&hc.curve, Variant::TangentVariety).unwrap();
    assert!(freeman_ranks(&m).unwrap().three_nondegenerate());
}

/// Unimodular change of the holomorphic frame with function entries.
fn random_frame(rng: &mut StdRng, c: &Chart) -> Matrix {
    let f = |rng: &mut StdRng| {
        let k = rng.gen_range(-2..=2);
        let j = rng.gen_range(0..3);
        let mut x = F::from_int(k).mul(&F::coord(c, j).pow(rng.gen_range(0..=2)));
        if rng.gen_bool(0.5) {
            x = x.scale(&Gauss::i());
        }
        x
    };
    let mut upper: Matrix = (0..3).map(|i| (0..3).map(|j| if i == j { F::one() } else { F::zero() }).collect()).collect();
    let mut lower = upper.clone();
    for i in 0..3 {
        for j in 0..3 {
            if i < j {
                upper[i][j] = f(rng);
            } else if i > j {
                lower[i][j] = f(rng);
            }
        }
    }
    let p = [0, 1, 2].map(|_| rng.gen_range(0..3));
    let mut prod: Matrix = (0..3).map(|i| (0..3).map(|j| (0..3).fold(F::zero(), |a, k| a.add(&upper[i][k].mul(&lower[k][j])))).collect()).collect();
    prod.swap(p[0], p[1]);
    prod
}

/// Kernel vectors of `mg` (coefficients in its frame) in the frame of `m`.
fn bundle_fields(m: &TubeModel, mg: &TubeModel, basis: &[Vec<F>]) -> Vec<Vec<F>> {
    basis.iter().map(|v| m.decompose(&section_field(mg, v)).unwrap().a).collect()
}

#[test]
fn freeman_filtration_is_frame_independent() {
    let mut rng = StdRng::seed_from_u64(11);
    let models = vec![
        build_tube(&rnc(), Variant::TangentVariety).unwrap(),
        build_tube(&catalog()[0].instantiate(&[r(2), r(4)]).unwrap(), Variant::TangentVariety).unwrap(),
        build_hyperquadric(),
    ];
    for m in &models {
        let base = freeman(m).unwrap();
        for _ in 0..3 {
            let g = random_frame(&mut rng, &m.chart);
            let mg = m.with_frame(g).unwrap();
            let f = freeman(&mg).unwrap();
            assert_eq!(f.ranks(), base.ranks(), "{}", m.label);
            // Same bundles: express the new kernels in the original frame.
            for (kmg, korig) in [(&f.k10, &base.k10), (&f.l10, &base.l10)] {
                let orig = Subspace::span(korig, 3);
                for back in bundle_fields(m, &mg, kmg) {
                    assert!(orig.contains(&back), "{}", m.label);
                }
            }
        }
    }
}

// -------------------------------------------------- bracket inclusions --

#[test]
fn bracket_inclusion_table_holds() {
    let rnc_m = build_tube(&rnc(), Variant::TangentVariety).unwrap();
    let rep = check_bracket_inclusions(&rnc_m).unwrap();
    assert_eq!(rep.rows.len(), 12);
    assert!(rep.passed(), "{:?}", rep.rows.iter().filter(|r| !r.passed).collect::<Vec<_>>());
    let hc = &catalog()[0];
    for (a, b) in [(2, 3), (2, 4), (3, 5)] {
        let m = build_tube(&hc.instantiate(&[r(a), r(b)]).unwrap(), Variant::TangentVariety).unwrap();
        assert!(check_bracket_inclusions(&m).unwrap().passed(), "({a},{b})");
    }
}

#[test]
fn corrupted_complex_structure_breaks_integrability() {
    let m = build_tube(&rnc(), Variant::TangentVariety).unwrap().with_j_signs([1, -1, 1]);
    let rep = check_bracket_inclusions(&m).unwrap();
    let row = rep.row("D10", "D10").unwrap();
    assert!(!row.passed);
    assert!(!row.violations.is_empty());
}

// ------------------------------------------------ normalized sections --

#[test]
fn rnc_normalized_sections() {
    let m = build_tube(&rnc(), Variant::TangentVariety).unwrap();
    let n = normalized_sections(&m).unwrap();
    let s = F::coord(&m.chart, 1);
    assert!(n.verified);
    assert_eq!(n.x10, vec![F::zero(), F::zero(), F::one()]);
    assert_eq!(n.y10, vec![F::zero(), s.scale(&Gauss::from_int(-2)), F::zero()]);
    assert_eq!(n.z10, vec![s.pow(2).scale(&Gauss::from_int(4)), F::zero(), F::zero()]);
    // Gauge λ = 4s turns Z10 into s·Z0.
    assert_eq!(n.z10[0].div(&s.scale(&Gauss::from_int(4))).unwrap(), s);
}

#[test]
fn normalized_sections_are_gauge_covariant() {
    let m = build_tube(&rnc(), Variant::TangentVariety).unwrap();
    let two: Matrix = (0..3).map(|i| (0..3).map(|j| if i == j { int(2) } else { F::zero() }).collect()).collect();
    let m2 = m.with_frame(two).unwrap();
    let (n, n2) = (normalized_sections(&m).unwrap(), normalized_sections(&m2).unwrap());
    let field = |m: &TubeModel, v: &[F]| section_field(m, v);
    let ratio = |a: &VectorField, b: &VectorField| {
        let k = (0..a.comps.len()).find(|&k| !b.comps[k].is_zero()).unwrap();
        let f = a.comps[k].div(&b.comps[k]).unwrap();
        assert_eq!(*a, b.scale(&f));
        f
    };
    let rx = ratio(&field(&m2, &n2.x10), &field(&m, &n.x10));
    let ry = ratio(&field(&m2, &n2.y10), &field(&m, &n.y10));
    let rz = ratio(&field(&m2, &n2.z10), &field(&m, &n.z10));
    // X ↦ λe^{iφ}X, Y ↦ e^{2iφ}Y, Z ↦ λ⁻¹e^{3iφ}Z: ry·r̄x = rx and rz·r̄x² = rx.
    assert_eq!(ry.mul(&rx.conj()), rx);
    assert_eq!(rz.mul(&rx.conj().pow(2)), rx);
    assert!(matches!(normalized_sections(&build_hyperquadric()), Err(CrError::Degenerate(_))));
}

// ----------------------------------------------------------- symmetry --

#[test]
fn radial_and_scaling_symmetries() {
    let m = build_tube(&rnc(), Variant::TangentVariety).unwrap();
    assert!(is_cr_symmetry(&m, &Candidate::identity()).unwrap().is_symmetry);
    let hc = &catalog()[0];
    let sym = build_tube(&hc.curve, Variant::TangentVariety).unwrap();
    let v = Candidate::from_params(&hc.v);
    let check = is_cr_symmetry(&sym, &v).unwrap();
    assert!(check.tangent && check.is_symmetry, "{check:?}");
    // A generic linear field is not tangent.
    let mut a: [[F; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| F::zero()));
    a[0][1] = F::one();
    let no = is_cr_symmetry(&m, &Candidate::Linear(a)).unwrap();
    assert!(!no.is_symmetry && !no.tangent && no.residue != "0");
}

fn quartic() -> Curve {
    curve(["1+t^4", "t", "t^2", "t^3"])
}

#[test]
fn osculating_model_has_only_translations() {
    let c = quartic();
    let m = build_tube(&c, Variant::OsculatingRuled).unwrap();
    assert!(freeman_ranks(&m).unwrap().three_nondegenerate());
    for k in 0..4 {
        assert!(is_cr_symmetry(&m, &Candidate::Translation(k)).unwrap().is_symmetry);
    }
    let rho = is_cr_symmetry(&m, &Candidate::identity()).unwrap();
    assert!(!rho.is_symmetry && !rho.tangent);
    // det[ψ, γ', γ'', ψ_t] = s·W(γ).
    let s = F::coord(&m.chart, 1);
    let w = wronskian4(&c);
    assert_eq!(rho.residue, s.mul(&w).format(&m.chart));
    // The RNC itself spans only a hyperplane here, so that tube is Levi flat.
    assert!(!build_tube(&rnc(), Variant::OsculatingRuled).unwrap().bracket_generating());
}

#[test]
fn translations_commute() {
    let m = build_tube(&rnc(), Variant::TangentVariety).unwrap();
    let p: Vec<VectorField> = (0..4).map(|k| is_cr_symmetry(&m, &Candidate::Translation(k)).unwrap().field.unwrap()).collect();
    for a in 0..4 {
        for b in 0..4 {
            assert!(p[a].bracket(&p[b]).unwrap().is_zero());
        }
        for k in 0..3 {
            assert!(p[a].bracket(&m.xframe[k]).unwrap().is_zero());
        }
    }
}

#[test]
fn symmetry_algebras_of_power_curves() {
    let hc = &catalog()[0];
    let rep = tube_symmetry_algebra(hc, &[r(2), r(4)]).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.generators.len(), 6);
    assert_eq!(rep.algebra.as_ref().unwrap().dim(), 6);
    assert_eq!(rep.traceless_spectrum, vec!["-7", "-3", "1", "9"]);
    assert!(!rep.maximal);
    let spectra: Vec<_> = [(2, 4), (2, 5), (3, 5)].iter().map(|&(a, b)| tube_symmetry_algebra(hc, &[r(a), r(b)]).unwrap().normalized_spectrum().unwrap()).collect();
    assert!(spectra[0] != spectra[1] && spectra[1] != spectra[2] && spectra[0] != spectra[2]);
    let four = catalog().into_iter().find(|h| h.segre == "(4)").unwrap();
    let rep4 = tube_symmetry_algebra(&four, &four.sample).unwrap();
    assert!(rep4.maximal && rep4.passed());
    assert!(tube_symmetry_algebra(hc, &[r(2), r(3)]).unwrap().maximal);
}

#[test]
fn every_catalog_symmetry_algebra_verifies() {
    for hc in catalog() {
        let rep = tube_symmetry_algebra(&hc, &hc.sample).unwrap();
        assert!(rep.passed(), "{}: {:?}", hc.name(), rep.generators.iter().filter(|g| !g.check.is_symmetry).map(|g| &g.name).collect::<Vec<_>>());
    }
}

#[test]
fn spectrum_test_matches_the_traceless_generator() {
    let (ok, spec) = rnc_spectrum_test(&r(2), &r(3));
    assert!(ok);
    assert_eq!(spec, [r(-6), r(-2), r(2), r(6)]);
    assert!(!rnc_spectrum_test(&r(2), &r(4)).0);
    assert!(!rnc_spectrum_test(&rat(3, 2), &rat(5, 2)).0);
    let hc = &catalog()[0];
    let mut rng = StdRng::seed_from_u64(3);
    let mut n = 0;
    while n < 50 {
        let a = rat(rng.gen_range(5..=40), rng.gen_range(1..=4));
        let b = &a + rat(rng.gen_range(1..=40), rng.gen_range(1..=4));
        if a <= r(1) || (a == r(2) && b == r(3)) {
            continue;
        }
        n += 1;
        let (ok, spec) = rnc_spectrum_test(&a, &b);
        assert!(!ok, "({a}, {b})");
        // Oracle: the traceless eigenvalues from the symmetry report.
        let rep = tube_symmetry_algebra(hc, &[a.clone(), b.clone()]).unwrap();
        let mut want: Vec<String> = spec.iter().map(|x| if x.is_integer() { x.numer().to_string() } else { format!("{}/{}", x.numer(), x.denom()) }).collect();
        want.sort_by(|x, y| parse(x).cmp(&parse(y)));
        assert_eq!(rep.traceless_spectrum, want);
    }
}

fn parse(s: &str) -> BigRational {
    match s.split_once('/') {
        Some((n, d)) => BigRational::new(n.parse().unwrap(), d.parse().unwrap()),
        None => BigRational::from_integer(s.parse().unwrap()),
    }
}

// --------------------------------------------------------------- input --

#[test]
fn curve_documents_report_positions() {
    let err = parse_curve_json("{\"schema\": \"curve.v1\",\n \"components\": [1, 2]}").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let err = parse_curve_json(r#"{"schema":"curve.v1","components":["1","t","t^2","t^%"]}"#).unwrap_err();
    assert!(err.to_string().contains("column 3"), "{err}");
    let err = parse_curve_json(r#"{"schema":"curve.v1","components":["1","t","t^2"]}"#).unwrap_err();
    assert!(matches!(err, CrError::InvalidCurve(_)));
    let c = parse_curve_json(r#"{"schema":"curve.v1","variable":"tau","components":["1","tau","tau^alpha","tau^beta"],"domain":["tau > 0","1 < alpha < beta"],"params":{"alpha":"2","beta":"4"}}"#).unwrap();
    assert_eq!(wronskian4(&c), parse_function("48*tau", &c.chart).unwrap());
    let err = parse_curve_json(r#"{"schema":"curve.v1","variable":"tau","components":["1","tau","tau^alpha","tau^beta"],"domain":["1 < alpha < beta"],"params":{"alpha":"4","beta":"2"}}"#).unwrap_err();
    assert!(err.to_string().contains("domain"), "{err}");
}
