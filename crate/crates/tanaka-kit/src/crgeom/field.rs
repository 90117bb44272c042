//! Vector fields on a chart and linear algebra over coordinate functions.

use super::func::{Chart, CoordFunction};
use super::CrError;
use crate::scalars::Gauss;

type F = CoordFunction;

/// Complex vector field `Σ f_j ∂_j` on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub chart: Chart,
    pub comps: Vec<F>,
}

impl VectorField {
    pub fn zero(chart: &Chart) -> Self {
        VectorField { chart: chart.clone(), comps: vec![F::zero(); chart.dim()] }
    }
    /// The coordinate field `∂_j`.
    pub fn coord(chart: &Chart, j: usize) -> Self {
        let mut v = VectorField::zero(chart);
        v.comps[j] = F::one();
        v
    }
    pub fn new(chart: &Chart, comps: Vec<F>) -> Result<Self, CrError> {
        if comps.len() != chart.dim() {
            return Err(CrError::ChartMismatch(format!("{} components on a {}-dimensional chart", comps.len(), chart.dim())));
        }
        Ok(VectorField { chart: chart.clone(), comps })
    }
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(F::is_zero)
    }
    /// Directional derivative `V(f)`.
    pub fn apply(&self, f: &F) -> F {
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(F::zero(), |acc, (j, c)| acc.add(&c.mul(&f.d(&self.chart, j))))
    }
    pub fn bracket(&self, o: &VectorField) -> Result<VectorField, CrError> {
        self.check(o)?;
        let comps = (0..self.chart.dim()).map(|k| self.apply(&o.comps[k]).sub(&o.apply(&self.comps[k]))).collect();
        Ok(VectorField { chart: self.chart.clone(), comps })
    }
    fn check(&self, o: &VectorField) -> Result<(), CrError> {
        if self.chart != o.chart {
            return Err(CrError::ChartMismatch(format!("[{}] vs [{}]", self.chart.names.join(","), o.chart.names.join(","))));
        }
        Ok(())
    }
    pub fn add(&self, o: &VectorField) -> Result<VectorField, CrError> {
        self.check(o)?;
        Ok(VectorField { chart: self.chart.clone(), comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() })
    }
    pub fn sub(&self, o: &VectorField) -> Result<VectorField, CrError> {
        self.add(&o.scale(&F::from_int(-1)))
    }
    pub fn scale(&self, f: &F) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(|c| c.mul(f)).collect() }
    }
    pub fn conj(&self) -> VectorField {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(F::conj).collect() }
    }
    pub fn format(&self) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({})∂_{}", c.format(&self.chart), self.chart.names[j]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Linear combination `Σ c_k V_k` of fields on a common chart.
pub fn combine(chart: &Chart, coeffs: &[F], fields: &[VectorField]) -> VectorField {
    let mut out = VectorField::zero(chart);
    for (c, v) in coeffs.iter().zip(fields) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.comps.iter_mut().zip(&v.comps) {
            *o = o.add(&c.mul(x));
        }
    }
    out
}

// ------------------------------------------------------- linear algebra --

pub type Matrix = Vec<Vec<F>>;

/// Row-reduced form. Pivots are chosen among nonzero entries preferring
/// units, then the smallest expression; every non-unit pivot is recorded,
/// since the result is valid only where it does not vanish.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub loci: Vec<F>,
}

pub fn rref(mut m: Matrix, ncols: usize) -> Reduced {
    let mut pivots = Vec::new();
    let mut loci = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let best = (r..m.len()).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| (!m[i][c].is_unit(), m[i][c].complexity(), i));
        let Some(p) = best else { continue };
        m.swap(r, p);
        let piv = m[r][c].clone();
        if !piv.is_unit() {
            loci.push(piv.clone());
        }
        let inv = piv.inv().expect("nonzero pivot");
        m[r] = m[r].iter().map(|x| x.mul(&inv)).collect();
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            m[i] = m[i].iter().zip(&m[r]).map(|(a, b)| a.sub(&f.mul(b))).collect();
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Reduced { rows: m, pivots, loci }
}

pub fn rank(m: &Matrix, ncols: usize) -> usize {
    rref(m.clone(), ncols).pivots.len()
}

/// Basis of `{x : m x = 0}`.
pub fn kernel(m: &Matrix, ncols: usize) -> (Vec<Vec<F>>, Vec<F>) {
    let red = rref(m.clone(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !red.pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (row, &p) in red.rows.iter().zip(&red.pivots) {
                v[p] = row[f].neg();
            }
            v
        })
        .collect();
    (basis, red.loci)
}

/// Basis of `{y : yᵀ m = 0}`.
pub fn left_kernel(m: &Matrix, ncols: usize) -> (Vec<Vec<F>>, Vec<F>) {
    kernel(&transpose(m, ncols), m.len())
}

pub fn transpose(m: &Matrix, ncols: usize) -> Matrix {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Solution of `a x = b`, if one exists.
pub fn solve(a: &Matrix, ncols: usize, b: &[F]) -> Option<Vec<F>> {
    let aug: Matrix = a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    let red = rref(aug, ncols + 1);
    if red.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![F::zero(); ncols];
    for (row, &p) in red.rows.iter().zip(&red.pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().cloned().chain((0..n).map(|j| if i == j { F::one() } else { F::zero() })).collect())
        .collect();
    let red = rref(aug, n);
    if red.pivots.len() < n {
        return None;
    }
    Some(red.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant by cofactor expansion (division free).
pub fn det(a: &Matrix) -> F {
    let n = a.len();
    match n {
        0 => F::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut acc = F::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Matrix = a[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = a[0][j].mul(&det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

pub fn mat_vec(a: &Matrix, v: &[F]) -> Vec<F> {
    a.iter().map(|row| row.iter().zip(v).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y)))).collect()
}

/// Subspace of a coefficient space, kept in reduced row form.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub dim: usize,
    red: Reduced,
}

impl Subspace {
    pub fn span(vectors: &[Vec<F>], dim: usize) -> Self {
        Subspace { dim, red: rref(vectors.to_vec(), dim) }
    }
    pub fn zero(dim: usize) -> Self {
        Subspace::span(&[], dim)
    }
    pub fn full(dim: usize) -> Self {
        let id: Vec<Vec<F>> = (0..dim).map(|i| unit_vector(dim, i)).collect();
        Subspace::span(&id, dim)
    }
    pub fn rank(&self) -> usize {
        self.red.pivots.len()
    }
    pub fn basis(&self) -> &[Vec<F>] {
        &self.red.rows
    }
    pub fn loci(&self) -> &[F] {
        &self.red.loci
    }
    /// Remainder of `v` after clearing the pivot coordinates.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (row, &p) in self.red.rows.iter().zip(&self.red.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x = x.sub(&f.mul(y));
            }
        }
        v
    }
    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(F::is_zero)
    }
    pub fn conj(&self) -> Subspace {
        let rows: Vec<Vec<F>> = self.red.rows.iter().map(|r| r.iter().map(F::conj).collect()).collect();
        Subspace::span(&rows, self.dim)
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<F> {
    (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect()
}

pub fn i_times(v: &[F]) -> Vec<F> {
    v.iter().map(|x| x.scale(&Gauss::i())).collect()
}
