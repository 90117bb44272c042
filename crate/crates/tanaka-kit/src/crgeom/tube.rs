//! Tube hypersurfaces `Σ × iR⁴` over curve-generated hypersurfaces `Σ ⊂ R⁴`,
//! with their CR frame, Levi forms and Freeman filtration.

use serde::Serialize;

use super::curve::Curve;
use super::field::{combine, det, inverse, left_kernel, mat_vec, transpose, unit_vector, Matrix, Subspace, VectorField};
use super::func::{Chart, CoordFunction};
use super::CrError;
use crate::scalars::{rat, Gauss};

type F = CoordFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `ψ = rγ + sγ'`.
    TangentVariety,
    /// `ψ = γ + rγ' + sγ''`.
    OsculatingRuled,
}

/// A tube over a parametrized hypersurface `ψ: U ⊂ R³ → R⁴`.
///
/// The chart holds three coordinates `x` on `U` followed by `y⁰..y³`. The
/// frame fields `X_k` act on `x` only, and `JX_k = σ_k Σ_i dψ(X_k)_i ∂_{y^i}`
/// with `σ_k = 1` for the tube structure (other signs give a corrupted J).
#[derive(Debug, Clone)]
pub struct TubeModel {
    pub label: String,
    pub curve: Option<Curve>,
    pub variant: Option<Variant>,
    pub chart: Chart,
    pub psi: [F; 4],
    pub xframe: Vec<VectorField>,
    pub images: Vec<[F; 4]>,
    /// Transversal direction in `R⁴(y)` completing the images to a basis.
    pub normal: [F; 4],
    /// Coefficients of the contact form `θ = Σ ν_i dy^i`.
    pub conormal: [F; 4],
    pub jsign: [i64; 3],
    /// Chart loci excluded from the model.
    pub excluded: Vec<String>,
    /// Holomorphic frame `Z'_a = Σ_b G_ab Z_b`.
    pub frame: Matrix,
    x_inv: Option<Matrix>,
    y_inv: Option<Matrix>,
    g_inv_t: Matrix,
    gbar_inv_t: Matrix,
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| unit_vector(n, i)).collect()
}

/// Coefficients along `Z'_a` (`a`), along `Z̄'_a` (`b`) and along `∂_y·normal` (`c`).
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub a: Vec<F>,
    pub b: Vec<F>,
    pub c: F,
}

pub fn build_tube(c: &Curve, variant: Variant) -> Result<TubeModel, CrError> {
    let chart = Chart::new(&["r", "s", c.var(), "y0", "y1", "y2", "y3"], Some(2));
    let g = [c.derivative(0), c.derivative(1), c.derivative(2), c.derivative(3)];
    let r = F::coord(&chart, 0);
    let s = F::coord(&chart, 1);
    let inv_s = s.inv().expect("s");
    let (psi, x2, normal): ([F; 4], Vec<F>, [F; 4]) = match variant {
        Variant::TangentVariety => (
            std::array::from_fn(|i| r.mul(&g[0][i]).add(&s.mul(&g[1][i]))),
            vec![F::zero(), r.neg().mul(&inv_s), inv_s.clone()],
            g[3].clone(),
        ),
        Variant::OsculatingRuled => (
            std::array::from_fn(|i| g[0][i].add(&r.mul(&g[1][i])).add(&s.mul(&g[2][i]))),
            vec![inv_s.neg(), r.neg().mul(&inv_s), inv_s.clone()],
            g[0].clone(),
        ),
    };
    let pad = |x: Vec<F>| x.into_iter().chain((0..4).map(|_| F::zero())).collect::<Vec<_>>();
    let xframe = vec![
        VectorField::coord(&chart, 0),
        VectorField::coord(&chart, 1),
        VectorField::new(&chart, pad(x2))?,
    ];
    let label = format!("{} ({})", c.name, match variant {
        Variant::TangentVariety => "tangent variety",
        Variant::OsculatingRuled => "osculating ruled",
    });
    TubeModel::assemble(label, Some(c.clone()), Some(variant), chart, psi, xframe, normal, vec!["s = 0".into()])
}

/// Tube over the paraboloid `x⁰ = (x¹)² + (x²)² + (x³)²`.
pub fn build_hyperquadric() -> TubeModel {
    let chart = Chart::new(&["x1", "x2", "x3", "y0", "y1", "y2", "y3"], None);
    let x: Vec<F> = (0..3).map(|j| F::coord(&chart, j)).collect();
    let psi = [x[0].pow(2).add(&x[1].pow(2)).add(&x[2].pow(2)), x[0].clone(), x[1].clone(), x[2].clone()];
    let xframe = (0..3).map(|j| VectorField::coord(&chart, j)).collect();
    let normal = [F::one(), F::zero(), F::zero(), F::zero()];
    TubeModel::assemble("hyperquadric".into(), None, None, chart, psi, xframe, normal, vec![]).expect("hyperquadric")
}

impl TubeModel {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        label: String,
        curve: Option<Curve>,
        variant: Option<Variant>,
        chart: Chart,
        psi: [F; 4],
        xframe: Vec<VectorField>,
        normal: [F; 4],
        excluded: Vec<String>,
    ) -> Result<TubeModel, CrError> {
        let images: Vec<[F; 4]> = xframe.iter().map(|x| std::array::from_fn(|i| x.apply(&psi[i]))).collect();
        let partials: Vec<[F; 4]> = (0..3).map(|j| std::array::from_fn(|i| psi[i].d(&chart, j))).collect();
        let conormal: [F; 4] = std::array::from_fn(|i| {
            let minor: Matrix = (0..4).filter(|&k| k != i).map(|k| partials.iter().map(|p| p[k].clone()).collect()).collect();
            let d = det(&minor);
            if i % 2 == 0 {
                d
            } else {
                d.neg()
            }
        });
        let xm: Matrix = (0..3).map(|j| xframe.iter().map(|x| x.comps[j].clone()).collect()).collect();
        let mut m = TubeModel {
            label,
            curve,
            variant,
            chart,
            psi,
            xframe,
            images,
            normal,
            conormal,
            jsign: [1; 3],
            excluded,
            frame: identity(3),
            x_inv: inverse(&xm),
            y_inv: None,
            g_inv_t: identity(3),
            gbar_inv_t: identity(3),
        };
        m.refresh_y();
        Ok(m)
    }

    fn refresh_y(&mut self) {
        let ym: Matrix = (0..4)
            .map(|i| (0..4).map(|k| if k < 3 { self.images[k][i].scale(&Gauss::from_int(self.jsign[k])) } else { self.normal[i].clone() }).collect())
            .collect();
        self.y_inv = inverse(&ym);
    }

    /// Same model with `JX_k` multiplied by `signs[k]`.
    pub fn with_j_signs(&self, signs: [i64; 3]) -> TubeModel {
        let mut m = self.clone();
        m.jsign = signs;
        m.label = format!("{} [J signs {:?}]", self.label, signs);
        m.refresh_y();
        m
    }

    /// Same model in the holomorphic frame `Z'_a = Σ_b G_ab Z_b`.
    pub fn with_frame(&self, g: Matrix) -> Result<TubeModel, CrError> {
        let inv_t = inverse(&transpose(&g, 3)).ok_or_else(|| CrError::Degenerate("frame change is not invertible".into()))?;
        let gbar: Matrix = g.iter().map(|r| r.iter().map(F::conj).collect()).collect();
        let gbar_inv_t = inverse(&transpose(&gbar, 3)).expect("conjugate of invertible");
        let mut m = self.clone();
        m.frame = g;
        m.g_inv_t = inv_t;
        m.gbar_inv_t = gbar_inv_t;
        Ok(m)
    }

    pub fn jx(&self, k: usize) -> VectorField {
        let mut v = VectorField::zero(&self.chart);
        for i in 0..4 {
            v.comps[3 + i] = self.images[k][i].scale(&Gauss::from_int(self.jsign[k]));
        }
        v
    }

    /// `Z_k = ½(X_k − i JX_k)` in the original frame.
    fn z_base(&self, k: usize) -> VectorField {
        let half = Gauss::new(rat(1, 2), rat(0, 1));
        let mi = Gauss::new(rat(0, 1), rat(-1, 2));
        let x = self.xframe[k].scale(&F::constant(half));
        let j = self.jx(k).scale(&F::constant(mi));
        x.add(&j).expect("same chart")
    }

    /// `Σ_a f_a Z'_a` (holomorphic) or `Σ_a f_a Z̄'_a`.
    pub fn section(&self, coeffs: &[F], holomorphic: bool) -> VectorField {
        let base: Vec<F> = if holomorphic {
            mat_vec(&transpose(&self.frame, 3), coeffs)
        } else {
            let gbar: Matrix = self.frame.iter().map(|r| r.iter().map(F::conj).collect()).collect();
            mat_vec(&transpose(&gbar, 3), coeffs)
        };
        let fields: Vec<VectorField> = (0..3).map(|k| if holomorphic { self.z_base(k) } else { self.z_base(k).conj() }).collect();
        combine(&self.chart, &base, &fields)
    }

    pub fn z(&self, a: usize) -> VectorField {
        self.section(&unit_vector(3, a), true)
    }
    pub fn zbar(&self, a: usize) -> VectorField {
        self.section(&unit_vector(3, a), false)
    }

    /// Coordinates of a field in the frame `(Z', Z̄', normal·∂_y)`.
    pub fn decompose(&self, v: &VectorField) -> Result<Decomposition, CrError> {
        let xi = self.x_inv.as_ref().ok_or_else(|| CrError::Degenerate("x-frame is singular".into()))?;
        let yi = self.y_inv.as_ref().ok_or_else(|| CrError::Degenerate("images and transversal do not span R⁴".into()))?;
        let p = mat_vec(xi, &v.comps[..3]);
        let q = mat_vec(yi, &v.comps[3..]);
        let i = Gauss::i();
        let a: Vec<F> = (0..3).map(|k| p[k].add(&q[k].scale(&i))).collect();
        let b: Vec<F> = (0..3).map(|k| p[k].sub(&q[k].scale(&i))).collect();
        Ok(Decomposition { a: mat_vec(&self.g_inv_t, &a), b: mat_vec(&self.gbar_inv_t, &b), c: q[3].clone() })
    }

    /// `θ(V)`.
    pub fn theta(&self, v: &VectorField) -> F {
        (0..4).fold(F::zero(), |acc, i| acc.add(&self.conormal[i].mul(&v.comps[3 + i])))
    }

    /// Whether `[D, D]` leaves `D`, tested through the contact form.
    pub fn bracket_generating(&self) -> bool {
        if self.conormal.iter().all(F::is_zero) {
            return false;
        }
        let mut fields = self.xframe.clone();
        fields.extend((0..3).map(|k| self.jx(k)));
        (0..6).any(|a| (a + 1..6).any(|b| !self.theta(&fields[a].bracket(&fields[b]).expect("chart")).is_zero()))
    }

    fn bracket_decomp(&self, x: &VectorField, y: &VectorField) -> Result<Decomposition, CrError> {
        self.decompose(&x.bracket(y)?)
    }

    fn format_vec(&self, v: &[F]) -> Vec<String> {
        v.iter().map(|f| f.format(&self.chart)).collect()
    }
}

// ------------------------------------------------------------- Levi forms --

#[derive(Debug, Clone)]
pub struct LeviForm {
    pub order: u8,
    /// Rows indexed by the filtrand basis, columns by `(b, a)`: the `Z'_a`
    /// coefficient of the class of `[row section, Z̄'_b]`.
    pub matrix: Matrix,
    /// Left kernel, as `Z'`-coefficient vectors.
    pub kernel: Vec<Vec<F>>,
    pub loci: Vec<F>,
}

#[derive(Debug, Clone)]
pub struct Freeman {
    pub bracket_generating: bool,
    pub forms: Vec<LeviForm>,
    pub k10: Vec<Vec<F>>,
    pub l10: Vec<Vec<F>>,
    pub ker3: Vec<Vec<F>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FreemanRanks {
    pub bracket_generating: bool,
    pub d10: usize,
    pub k10: usize,
    pub l10: usize,
    pub hol_nondeg: bool,
}

impl FreemanRanks {
    pub fn three_nondegenerate(&self) -> bool {
        self.bracket_generating && (self.d10, self.k10, self.l10) == (3, 2, 1) && self.hol_nondeg
    }
}

impl Freeman {
    pub fn ranks(&self) -> FreemanRanks {
        FreemanRanks { bracket_generating: self.bracket_generating, d10: 3, k10: self.k10.len(), l10: self.l10.len(), hol_nondeg: self.ker3.is_empty() }
    }
}

fn order1(m: &TubeModel) -> Result<LeviForm, CrError> {
    let i = F::constant(Gauss::i());
    let mut h: Matrix = vec![vec![F::zero(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            h[a][b] = i.mul(&m.bracket_decomp(&m.z(a), &m.zbar(b))?.c);
        }
    }
    let (kernel, loci) = left_kernel(&h, 3);
    Ok(LeviForm { order: 1, matrix: h, kernel, loci })
}

/// `(X, Ȳ) ↦ [X, Ȳ] mod (modulus ⊕ D₀₁)` for `X` in the span of `rows`.
fn higher(m: &TubeModel, order: u8, rows: &[Vec<F>]) -> Result<LeviForm, CrError> {
    let modulus = Subspace::span(rows, 3);
    let mut mat: Matrix = Vec::new();
    for k in rows {
        let x = m.section(k, true);
        let mut row = Vec::new();
        for b in 0..3 {
            let d = m.bracket_decomp(&x, &m.zbar(b))?;
            if !d.c.is_zero() {
                return Err(CrError::Degenerate(format!("order-{order} Levi form leaves D: [{}, Z̄{b}] has transversal part", m.format_vec(k).join(", "))));
            }
            row.extend(modulus.reduce(&d.a));
        }
        mat.push(row);
    }
    let (lam, loci) = left_kernel(&mat, 9);
    let kernel = lam.iter().map(|l| (0..3).map(|j| rows.iter().zip(l).fold(F::zero(), |acc, (r, c)| acc.add(&c.mul(&r[j])))).collect()).collect();
    Ok(LeviForm { order, matrix: mat, kernel, loci })
}

pub fn freeman(m: &TubeModel) -> Result<Freeman, CrError> {
    if !m.bracket_generating() {
        return Ok(Freeman { bracket_generating: false, forms: vec![], k10: vec![], l10: vec![], ker3: vec![] });
    }
    let l1 = order1(m)?;
    let k10 = Subspace::span(&l1.kernel, 3).basis().to_vec();
    let mut forms = vec![l1];
    let (l10, ker3) = if k10.is_empty() {
        (vec![], vec![])
    } else {
        let l2 = higher(m, 2, &k10)?;
        let l10 = Subspace::span(&l2.kernel, 3).basis().to_vec();
        forms.push(l2);
        if l10.is_empty() {
            (l10, vec![])
        } else {
            let l3 = higher(m, 3, &l10)?;
            let ker = l3.kernel.clone();
            forms.push(l3);
            (l10, ker)
        }
    };
    Ok(Freeman { bracket_generating: true, forms, k10, l10, ker3 })
}

pub fn levi_form(m: &TubeModel, order: u8) -> Result<LeviForm, CrError> {
    if !(1..=3).contains(&order) {
        return Err(CrError::Unsupported(format!("Levi form of order {order}")));
    }
    let f = freeman(m)?;
    if !f.bracket_generating {
        return Err(CrError::Degenerate("D is not bracket generating".into()));
    }
    f.forms
        .into_iter()
        .find(|l| l.order == order)
        .ok_or_else(|| CrError::Degenerate(format!("order-{order} Levi form undefined: previous filtrand is zero")))
}

pub fn freeman_ranks(m: &TubeModel) -> Result<FreemanRanks, CrError> {
    Ok(freeman(m)?.ranks())
}

// ------------------------------------------------------ bracket table --

#[derive(Debug, Clone, Serialize)]
pub struct InclusionRow {
    pub left: &'static str,
    pub right: &'static str,
    pub target: &'static str,
    pub passed: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub ranks: FreemanRanks,
    pub rows: Vec<InclusionRow>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
    pub fn row(&self, left: &str, right: &str) -> Option<&InclusionRow> {
        self.rows.iter().find(|r| r.left == left && r.right == right)
    }
}

#[derive(Clone, Copy)]
enum Bundle {
    D,
    K,
    L,
}

pub fn check_bracket_inclusions(m: &TubeModel) -> Result<InclusionReport, CrError> {
    let f = freeman(m)?;
    let ranks = f.ranks();
    let sub = |b: Bundle| match b {
        Bundle::D => Subspace::full(3),
        Bundle::K => Subspace::span(&f.k10, 3),
        Bundle::L => Subspace::span(&f.l10, 3),
    };
    let zero = Subspace::zero(3);
    use Bundle::*;
    // (left, right, right holomorphic, holomorphic target, antiholomorphic target, transversal allowed)
    let table: [(&str, &str, &str, Bundle, Bundle, bool, Option<Bundle>, Option<Bundle>, bool); 12] = [
        ("D10", "D10", "D10", D, D, true, Some(D), None, false),
        ("D10", "K10", "D10", D, K, true, Some(D), None, false),
        ("D10", "L10", "D10", D, L, true, Some(D), None, false),
        ("D10", "D01", "TM⊗C", D, D, false, Some(D), Some(D), true),
        ("D10", "K01", "D⊗C", D, K, false, Some(D), Some(D), false),
        ("D10", "L01", "D10⊕K01", D, L, false, Some(D), Some(K), false),
        ("K10", "K10", "K10", K, K, true, Some(K), None, false),
        ("K10", "L10", "K10", K, L, true, Some(K), None, false),
        ("K10", "K01", "K⊗C", K, K, false, Some(K), Some(K), false),
        ("K10", "L01", "K10⊕L01", K, L, false, Some(K), Some(L), false),
        ("L10", "L10", "L10", L, L, true, Some(L), None, false),
        ("L10", "L01", "L⊗C", L, L, false, Some(L), Some(L), false),
    ];
    let mut rows = Vec::new();
    for (left, right, target, lb, rb, rhol, th, ta, tc) in table {
        let (ls, rs) = (sub(lb), sub(rb));
        let rbasis: Vec<Vec<F>> = if rhol { rs.basis().to_vec() } else { rs.conj().basis().to_vec() };
        let hs = th.map_or(zero.clone(), sub);
        let as_ = ta.map_or(zero.clone(), |b| sub(b).conj());
        let mut violations = Vec::new();
        for u in ls.basis() {
            for w in &rbasis {
                let d = m.bracket_decomp(&m.section(u, true), &m.section(w, rhol))?;
                let ok = hs.contains(&d.a) && as_.contains(&d.b) && (tc || d.c.is_zero());
                if !ok {
                    violations.push(format!(
                        "[Σ({})Z, Σ({}){}] = Z:({}) Z̄:({}) T:{}",
                        m.format_vec(u).join(", "),
                        m.format_vec(w).join(", "),
                        if rhol { "Z" } else { "Z̄" },
                        m.format_vec(&d.a).join(", "),
                        m.format_vec(&d.b).join(", "),
                        d.c.format(&m.chart)
                    ));
                }
            }
        }
        rows.push(InclusionRow { left, right, target, passed: violations.is_empty(), violations });
    }
    Ok(InclusionReport { ranks, rows })
}

// ------------------------------------------------- normalized sections --

#[derive(Debug, Clone)]
pub struct NormalizedSections {
    /// `Z'`-coefficients of `X₁₀`, `Y₁₀`, `Z₁₀`.
    pub x10: Vec<F>,
    pub y10: Vec<F>,
    pub z10: Vec<F>,
    /// Both normalization conditions re-verified on the returned sections.
    pub verified: bool,
    pub gauge: &'static str,
}

pub const GAUGE: &str = "X₁₀ ↦ λe^{iφ}X₁₀, Y₁₀ ↦ e^{2iφ}Y₁₀, Z₁₀ ↦ λ⁻¹e^{3iφ}Z₁₀ (λ > 0), modulo lower filtrands";

/// The class of `[Σ u Z', Z̄'(x̄)]` modulo `modulus ⊕ D₀₁`.
fn pairing(m: &TubeModel, u: &[F], x: &[F], modulus: &Subspace) -> Result<Vec<F>, CrError> {
    let xbar: Vec<F> = x.iter().map(F::conj).collect();
    let d = m.bracket_decomp(&m.section(u, true), &m.section(&xbar, false))?;
    Ok(modulus.reduce(&d.a))
}

/// `f` with `u ≡ f·w` modulo `modulus`, if `u` is such a multiple.
fn ratio(u: &[F], w: &[F], modulus: &Subspace) -> Option<F> {
    let (u, w) = (modulus.reduce(u), modulus.reduce(w));
    let k = (0..w.len()).find(|&k| !w[k].is_zero())?;
    let f = u[k].div(&w[k])?;
    (0..w.len()).all(|j| u[j] == f.mul(&w[j])).then_some(f)
}

pub fn normalized_sections(m: &TubeModel) -> Result<NormalizedSections, CrError> {
    let f = freeman(m)?;
    if !f.ranks().three_nondegenerate() {
        return Err(CrError::Degenerate(format!("model is not 3-nondegenerate: {:?}", f.ranks())));
    }
    let k = Subspace::span(&f.k10, 3);
    let l = Subspace::span(&f.l10, 3);
    let x = (0..3).map(|j| unit_vector(3, j)).find(|e| !k.contains(e)).expect("K10 is proper");
    let y = f.k10.iter().find(|v| !l.contains(v)).expect("L10 is proper in K10").clone();
    let z = f.l10[0].clone();
    let p = ratio(&pairing(m, &y, &x, &k)?, &x, &k).ok_or_else(|| CrError::Degenerate("L₂(y, x̄) is not a multiple of x".into()))?;
    let q = ratio(&pairing(m, &z, &x, &l)?, &y, &l).ok_or_else(|| CrError::Degenerate("L₃(z, x̄) is not a multiple of y".into()))?;
    let pinv = p.inv().expect("nonzero");
    let pqinv = p.mul(&q).inv().ok_or_else(|| CrError::Degenerate("L₃ vanishes".into()))?;
    let y10: Vec<F> = y.iter().map(|c| c.mul(&pinv)).collect();
    let z10: Vec<F> = z.iter().map(|c| c.mul(&pqinv)).collect();
    let c2 = ratio(&pairing(m, &y10, &x, &k)?, &x, &k).is_some_and(|r| r == F::one());
    let c3 = ratio(&pairing(m, &z10, &x, &l)?, &y10, &l).is_some_and(|r| r == F::one());
    Ok(NormalizedSections { x10: x, y10, z10, verified: c2 && c3, gauge: GAUGE })
}

/// Field of `Σ coeffs_a Z'_a` in chart components (frame independent).
pub fn section_field(m: &TubeModel, coeffs: &[F]) -> VectorField {
    m.section(coeffs, true)
}

pub fn format_coeffs(m: &TubeModel, v: &[F]) -> Vec<String> {
    m.format_vec(v)
}



