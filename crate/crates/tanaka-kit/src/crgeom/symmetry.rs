//! Affine CR symmetries of tubes and the symmetry algebras of homogeneous
//! curves.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::catalog::HomogeneousCurve;
use super::curve::{char_poly, rational_roots};
use super::field::{det, solve, Matrix, VectorField};
use super::func::{CoordFunction, GenPoly, ParamPoly, NPARAM};
use super::tube::{build_tube, TubeModel, Variant};
use super::CrError;
use crate::liealg::{BasisElement, BracketTable, JacobiReport, LieAlgebra};
use crate::scalars::{Gauss, Scalar};

type F = CoordFunction;

/// Candidate infinitesimal symmetry of a tube.
#[derive(Debug, Clone)]
pub enum Candidate {
    /// The real part of the holomorphic field `(Az)·∂_z`, i.e.
    /// `(Ax)·∂_x + (Ay)·∂_y` restricted to the tube.
    Linear([[F; 4]; 4]),
    /// `∂_{y^k}`.
    Translation(usize),
}

impl Candidate {
    pub fn identity() -> Candidate {
        Candidate::Linear(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { F::one() } else { F::zero() })))
    }
    pub fn from_params(v: &[[ParamPoly; 4]; 4]) -> Candidate {
        Candidate::Linear(std::array::from_fn(|i| std::array::from_fn(|j| F::from(GenPoly::constant(v[i][j].clone())))))
    }
    pub fn from_rational(v: &[[BigRational; 4]; 4]) -> Candidate {
        Candidate::Linear(std::array::from_fn(|i| std::array::from_fn(|j| F::constant(Gauss::from_rat(v[i][j].clone())))))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryCheck {
    pub is_symmetry: bool,
    /// `det[Aψ, ∂ψ]` vanishes identically.
    pub tangent: bool,
    /// `[ξ, D] ⊂ D`.
    pub preserves_d: bool,
    /// `[ξ, JX] = J[ξ, X]` on the frame.
    pub commutes_with_j: bool,
    /// The tangency determinant, or the first failing bracket.
    pub residue: String,
    #[serde(skip)]
    pub field: Option<VectorField>,
}

/// Intrinsic field of a candidate, when it is tangent to the tube.
fn intrinsic_field(m: &TubeModel, cand: &Candidate) -> (Option<VectorField>, F) {
    let n = m.chart.dim();
    match cand {
        Candidate::Translation(k) => (Some(VectorField::coord(&m.chart, 3 + k)), F::zero()),
        Candidate::Linear(a) => {
            let apsi: Vec<F> = (0..4).map(|i| (0..4).fold(F::zero(), |acc, j| acc.add(&a[i][j].mul(&m.psi[j])))).collect();
            let partials: Matrix = (0..4).map(|i| (0..3).map(|j| m.psi[i].d(&m.chart, j)).collect()).collect();
            let full: Matrix = (0..4).map(|i| std::iter::once(apsi[i].clone()).chain(partials[i].iter().cloned()).collect()).collect();
            let residue = det(&full);
            if !residue.is_zero() {
                return (None, residue);
            }
            let Some(w) = solve(&partials, 3, &apsi) else { return (None, residue) };
            let mut comps = vec![F::zero(); n];
            comps[..3].clone_from_slice(&w);
            for i in 0..4 {
                comps[3 + i] = (0..4).fold(F::zero(), |acc, j| acc.add(&a[i][j].mul(&F::coord(&m.chart, 3 + j))));
            }
            (Some(VectorField { chart: m.chart.clone(), comps }), residue)
        }
    }
}

pub fn is_cr_symmetry(m: &TubeModel, cand: &Candidate) -> Result<SymmetryCheck, CrError> {
    let (field, residue) = intrinsic_field(m, cand);
    let Some(xi) = field else {
        return Ok(SymmetryCheck {
            is_symmetry: false,
            tangent: false,
            preserves_d: false,
            commutes_with_j: false,
            residue: residue.format(&m.chart),
            field: None,
        });
    };
    let mut preserves_d = true;
    let mut commutes_with_j = true;
    let mut residue = String::from("0");
    let i = Gauss::i();
    for k in 0..3 {
        let dx = m.decompose(&xi.bracket(&m.xframe[k])?)?;
        let dj = m.decompose(&xi.bracket(&m.jx(k))?)?;
        for (name, d) in [(format!("X{k}"), &dx), (format!("JX{k}"), &dj)] {
            if preserves_d && !d.c.is_zero() {
                preserves_d = false;
                residue = format!("transversal part of [ξ, {name}]: {}", d.c.format(&m.chart));
            }
        }
        let ja: Vec<F> = dx.a.iter().map(|f| f.scale(&i)).collect();
        let jb: Vec<F> = dx.b.iter().map(|f| f.scale(&i).neg()).collect();
        if commutes_with_j && (ja != dj.a || jb != dj.b) {
            commutes_with_j = false;
            if preserves_d {
                residue = format!("[ξ, JX{k}] ≠ J[ξ, X{k}]");
            }
        }
    }
    Ok(SymmetryCheck { is_symmetry: preserves_d && commutes_with_j, tangent: true, preserves_d, commutes_with_j, residue, field: Some(xi) })
}

/// Whether the spectrum `(−1−α−β, 3−α−β, 3α−1−β, 3β−1−α)` is proportional
/// to `(−3, −1, 1, 3)`.
pub fn rnc_spectrum_test(alpha: &BigRational, beta: &BigRational) -> (bool, [BigRational; 4]) {
    let one = BigRational::one();
    let three = BigRational::from_integer(3.into());
    let spec = [
        -&one - alpha - beta,
        &three - alpha - beta,
        &three * alpha - &one - beta,
        &three * beta - &one - alpha,
    ];
    let nu = spec[2].clone();
    let want = [-&three * &nu, -nu.clone(), nu.clone(), &three * &nu];
    (!nu.is_zero() && spec == want, spec)
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorCheck {
    pub name: String,
    pub check: SymmetryCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryAlgebraReport {
    pub curve: String,
    pub segre: String,
    pub params: Vec<String>,
    pub generators: Vec<GeneratorCheck>,
    /// Abstract brackets agree with the vector-field brackets of the generators.
    pub brackets_match_fields: bool,
    pub jacobi: bool,
    /// Characteristic polynomial `det(x − v)` of the generator on `R⁴`, low degree first.
    pub char_poly: Vec<String>,
    /// Rational eigenvalues of `v` and of its traceless part `4v − tr(v)ρ`.
    pub spectrum: Vec<String>,
    pub traceless_spectrum: Vec<String>,
    /// Rational normal curve: the tube is maximally symmetric (8-dimensional
    /// algebra containing this one); not recomputed here.
    pub maximal: bool,
    #[serde(skip)]
    pub algebra: Option<LieAlgebra>,
}

impl SymmetryAlgebraReport {
    pub fn passed(&self) -> bool {
        self.generators.iter().all(|g| g.check.is_symmetry) && self.brackets_match_fields && self.jacobi
    }
    /// Spectral invariant up to nonzero scaling: traceless eigenvalues
    /// divided by the first nonzero one, sorted.
    pub fn normalized_spectrum(&self) -> Option<Vec<BigRational>> {
        normalized(&self.traceless_values()?)
    }
    fn traceless_values(&self) -> Option<Vec<BigRational>> {
        self.traceless_spectrum.iter().map(|s| parse_rat(s)).collect()
    }
}

fn parse_rat(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => Some(BigRational::new(n.parse().ok()?, d.parse().ok()?)),
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn normalized(vals: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut v = vals.to_vec();
    v.sort();
    let scale = v.iter().find(|x| !x.is_zero())?.clone();
    let mut out: Vec<BigRational> = v.iter().map(|x| x / &scale).collect();
    out.sort();
    Some(out)
}

/// Eigenvalues with multiplicity when all are rational.
fn rational_spectrum(v: &[[BigRational; 4]; 4]) -> Option<Vec<BigRational>> {
    let roots = rational_roots(&char_poly(v));
    let mut out: Vec<BigRational> = roots.iter().flat_map(|(r, m)| std::iter::repeat_n(r.clone(), *m)).collect();
    out.sort();
    (out.len() == 4).then_some(out)
}

fn abstract_algebra(v: &[[BigRational; 4]; 4]) -> LieAlgebra {
    let names = ["v", "rho", "p0", "p1", "p2", "p3"];
    let basis: Vec<BasisElement> = names.iter().enumerate().map(|(i, n)| BasisElement { name: n.to_string(), degree: 0, conj: i }).collect();
    let mut table: BracketTable = BTreeMap::new();
    for k in 0..4 {
        // [ξ_v, ∂_{y_k}] = −Σ_j v_jk ∂_{y_j}
        let terms: Vec<(usize, Scalar)> = (0..4).filter(|&j| !v[j][k].is_zero()).map(|j| (2 + j, Scalar::from_rat(0, -v[j][k].clone()))).collect();
        table.insert((0, 2 + k), terms);
        table.insert((1, 2 + k), vec![(2 + k, Scalar::from_int(0, -1))]);
    }
    LieAlgebra::new(vec![], basis, table).expect("valid semidirect product")
}

pub fn tube_symmetry_algebra(hc: &HomogeneousCurve, params: &[BigRational; NPARAM]) -> Result<SymmetryAlgebraReport, CrError> {
    let curve = hc.instantiate(params)?;
    let m = build_tube(&curve, Variant::TangentVariety)?;
    let v = hc.v_at(params);
    let mut cands = vec![("v".to_string(), Candidate::from_rational(&v)), ("rho".to_string(), Candidate::identity())];
    cands.extend((0..4).map(|k| (format!("p{k}"), Candidate::Translation(k))));
    let mut generators = Vec::new();
    for (name, c) in &cands {
        generators.push(GeneratorCheck { name: name.clone(), check: is_cr_symmetry(&m, c)? });
    }
    let alg = abstract_algebra(&v);
    let mut brackets_match_fields = true;
    let fields: Vec<Option<VectorField>> = generators.iter().map(|g| g.check.field.clone()).collect();
    if fields.iter().all(Option::is_some) {
        let fields: Vec<VectorField> = fields.into_iter().map(Option::unwrap).collect();
        for a in 0..6 {
            for b in a + 1..6 {
                let got = fields[a].bracket(&fields[b])?;
                let want = alg.bracket_basis(a, b).iter().enumerate().fold(VectorField::zero(&m.chart), |acc, (k, c)| {
                    let c = c.constant_value().expect("constant structure constants");
                    acc.add(&fields[k].scale(&F::constant(c))).expect("chart")
                });
                if got != want {
                    brackets_match_fields = false;
                }
            }
        }
    } else {
        brackets_match_fields = false;
    }
    let jacobi: JacobiReport = alg.check_jacobi();
    let tr = (0..4).fold(BigRational::zero(), |acc, i| acc + &v[i][i]);
    let four = BigRational::from_integer(4.into());
    let traceless: [[BigRational; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| &four * &v[i][j] - if i == j { tr.clone() } else { BigRational::zero() }));
    let spec = |m: &[[BigRational; 4]; 4]| rational_spectrum(m).map(|s| s.iter().map(fmt_rat).collect()).unwrap_or_default();
    let params_used = curve_params(hc);
    Ok(SymmetryAlgebraReport {
        curve: hc.name(),
        segre: hc.segre.clone(),
        params: params_used.iter().map(|&j| format!("{} = {}", super::func::PARAM_NAMES[j], fmt_rat(&params[j]))).collect(),
        generators,
        brackets_match_fields,
        jacobi: jacobi.passed(),
        char_poly: char_poly(&v).iter().map(fmt_rat).collect(),
        spectrum: spec(&v),
        traceless_spectrum: spec(&traceless),
        maximal: hc.is_rational_normal(params),
        algebra: Some(alg),
    })
}

fn curve_params(hc: &HomogeneousCurve) -> Vec<usize> {
    let mut used: Vec<usize> = hc.curve.params().into_iter().collect();
    used.sort();
    used
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    #[test]
    fn spectrum_formula() {
        let (ok, s) = rnc_spectrum_test(&rat(2, 1), &rat(3, 1));
        assert!(ok);
        assert_eq!(s, [rat(-6, 1), rat(-2, 1), rat(2, 1), rat(6, 1)]);
        let (ok, s) = rnc_spectrum_test(&rat(2, 1), &rat(4, 1));
        assert!(!ok);
        assert_eq!(s, [rat(-7, 1), rat(-3, 1), rat(1, 1), rat(9, 1)]);
        assert!(!rnc_spectrum_test(&rat(3, 2), &rat(5, 2)).0);
    }
}
