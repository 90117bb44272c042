//! Graded and filtered Lie algebras given by sparse structure constants.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::scalars::{Scalar, ScalarError};

pub type Vector = Vec<Scalar>;

#[derive(Debug, Error)]
pub enum LieError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("unknown basis element {0:?}")]
    UnknownBasis(String),
    #[error("duplicate basis name {0:?}")]
    DuplicateName(String),
    #[error("bracket [{0},{1}] is given twice")]
    DuplicateBracket(String, String),
    #[error("bracket [{0},{0}] must vanish")]
    SelfBracket(String),
    #[error("conjugation partner of {0:?} is not an involution")]
    ConjNotInvolution(String),
    #[error("{0:?} and its conjugate {1:?} have different degrees")]
    ConjDegree(String, String),
    #[error("[{x},{y}] has a {z} component violating the {kind} condition")]
    Degree { x: String, y: String, z: String, kind: &'static str },
    #[error("bracket table is not compatible with conjugation at [{0},{1}]")]
    ConjBracket(String, String),
    #[error("vector has length {got}, expected {want}")]
    Dimension { got: usize, want: usize },
    #[error("ad is not triangular in any ordering of the basis")]
    NotTriangularizable,
    #[error("basis change matrix is not invertible over the unit ring")]
    Singular,
    #[error("element {0:?} is not self-conjugate, cannot realify/complexify")]
    NotReal(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
    /// Index of the conjugate basis element.
    pub conj: usize,
}

/// Structure constants stored for `i < j` only.
pub type BracketTable = BTreeMap<(usize, usize), Vec<(usize, Scalar)>>;

#[derive(Debug, Clone, PartialEq, Eq, Copy)]
pub enum Grading {
    Graded,
    Filtered,
}

/// A finite-dimensional Lie algebra with a basis of homogeneous elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    units: Vec<String>,
    basis: Vec<BasisElement>,
    table: BracketTable,
    grading: Grading,
}

/// Graded algebra: `[g_a, g_b] ⊂ g_{a+b}`.
pub type GradedLieAlgebra = LieAlgebra;

/// Filtered algebra: components of `[x, y]` have degree `≥ deg x + deg y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredLieAlgebra(pub LieAlgebra);

impl FilteredLieAlgebra {
    pub fn new(
        units: Vec<String>,
        basis: Vec<BasisElement>,
        table: BracketTable,
    ) -> Result<Self, LieError> {
        LieAlgebra::build(units, basis, table, Grading::Filtered).map(FilteredLieAlgebra)
    }
    /// The associated graded algebra: keep only the degree-preserving part.
    pub fn associated_graded(&self) -> GradedLieAlgebra {
        let a = &self.0;
        let table = a
            .table
            .iter()
            .map(|(&(i, j), v)| {
                let want = a.basis[i].degree + a.basis[j].degree;
                ((i, j), v.iter().filter(|(k, _)| a.basis[*k].degree == want).cloned().collect())
            })
            .collect();
        LieAlgebra::build(a.units.clone(), a.basis.clone(), table, Grading::Graded)
            .expect("graded part of a valid filtered algebra")
    }
}

impl LieAlgebra {
    /// Build a graded algebra, validating degrees and conjugation.
    pub fn new(
        units: Vec<String>,
        basis: Vec<BasisElement>,
        table: BracketTable,
    ) -> Result<Self, LieError> {
        Self::build(units, basis, table, Grading::Graded)
    }

    fn build(
        units: Vec<String>,
        basis: Vec<BasisElement>,
        table: BracketTable,
        grading: Grading,
    ) -> Result<Self, LieError> {
        let m = units.len();
        let n = basis.len();
        let mut seen = BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.name.clone()) {
                return Err(LieError::DuplicateName(b.name.clone()));
            }
        }
        for (i, b) in basis.iter().enumerate() {
            if b.conj >= n || basis[b.conj].conj != i {
                return Err(LieError::ConjNotInvolution(b.name.clone()));
            }
            if basis[b.conj].degree != b.degree {
                return Err(LieError::ConjDegree(b.name.clone(), basis[b.conj].name.clone()));
            }
        }
        let mut clean = BracketTable::new();
        for (&(i, j), terms) in &table {
            if i >= n || j >= n {
                return Err(LieError::UnknownBasis(format!("#{}", i.max(j))));
            }
            if i >= j {
                return Err(LieError::SelfBracket(basis[i].name.clone()));
            }
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, c) in terms {
                if *k >= n {
                    return Err(LieError::UnknownBasis(format!("#{k}")));
                }
                if c.units() != m {
                    return Err(ScalarError::ContextMismatch(c.units(), m).into());
                }
                let e = acc.entry(*k).or_insert_with(|| Scalar::zero(m));
                *e += c;
            }
            let v: Vec<(usize, Scalar)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            for (k, _) in &v {
                let want = basis[i].degree + basis[j].degree;
                let got = basis[*k].degree;
                let bad = match grading {
                    Grading::Graded => got != want,
                    Grading::Filtered => got < want,
                };
                if bad {
                    return Err(LieError::Degree {
                        x: basis[i].name.clone(),
                        y: basis[j].name.clone(),
                        z: basis[*k].name.clone(),
                        kind: if grading == Grading::Graded { "degree-additivity" } else { "filtration" },
                    });
                }
            }
            if !v.is_empty() {
                clean.insert((i, j), v);
            }
        }
        let alg = LieAlgebra { units, basis, table: clean, grading };
        alg.check_conjugation()?;
        Ok(alg)
    }

    fn check_conjugation(&self) -> Result<(), LieError> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.conj_vector(&self.bracket_basis(i, j));
                let rhs = self.bracket_basis(self.basis[i].conj, self.basis[j].conj);
                if lhs != rhs {
                    return Err(LieError::ConjBracket(
                        self.basis[i].name.clone(),
                        self.basis[j].name.clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }
    /// Number of unit symbols in the scalar context.
    pub fn m(&self) -> usize {
        self.units.len()
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }
    pub fn table(&self) -> &BracketTable {
        &self.table
    }
    pub fn grading(&self) -> Grading {
        self.grading
    }
    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }
    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }
    pub fn index(&self, name: &str) -> Result<usize, LieError> {
        self.basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| LieError::UnknownBasis(name.to_string()))
    }
    pub fn zero(&self) -> Vector {
        vec![Scalar::zero(self.m()); self.dim()]
    }
    pub fn e(&self, i: usize) -> Vector {
        let mut v = self.zero();
        v[i] = Scalar::one(self.m());
        v
    }
    /// Basis vector by name.
    pub fn el(&self, name: &str) -> Result<Vector, LieError> {
        Ok(self.e(self.index(name)?))
    }

    /// `[e_i, e_j]` from the table, using antisymmetry for `i > j`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        let mut v = self.zero();
        if i == j {
            return v;
        }
        let (a, b, neg) = if i < j { (i, j, false) } else { (j, i, true) };
        if let Some(terms) = self.table.get(&(a, b)) {
            for (k, c) in terms {
                v[*k] = if neg { -c } else { c.clone() };
            }
        }
        v
    }

    /// Sparse form of `[e_i, e_j]`.
    pub fn bracket_terms(&self, i: usize, j: usize) -> Vec<(usize, Scalar)> {
        if i == j {
            return Vec::new();
        }
        let (a, b, neg) = if i < j { (i, j, false) } else { (j, i, true) };
        match self.table.get(&(a, b)) {
            Some(t) if neg => t.iter().map(|(k, c)| (*k, -c)).collect(),
            Some(t) => t.clone(),
            None => Vec::new(),
        }
    }

    /// Bilinear extension of the table.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vector, LieError> {
        for v in [x, y] {
            if v.len() != self.dim() {
                return Err(LieError::Dimension { got: v.len(), want: self.dim() });
            }
            if let Some(s) = v.iter().find(|s| s.units() != self.m()) {
                return Err(ScalarError::ContextMismatch(s.units(), self.m()).into());
            }
        }
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                if i == j {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.bracket_terms(i, j) {
                    out[k] += &(&ab * &c);
                }
            }
        }
        Ok(out)
    }

    /// Coefficient-wise conjugation combined with the basis involution.
    pub fn conj_vector(&self, v: &[Scalar]) -> Vector {
        let mut out = self.zero();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out[self.basis[i].conj] = c.conj();
            }
        }
        out
    }

    /// Jacobiator `[[x,y],z] + [[y,z],x] + [[z,x],y]` on basis elements.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> Vector {
        let mut out = self.zero();
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            for (p, s) in self.bracket_terms(a, b) {
                for (q, t) in self.bracket_terms(p, c) {
                    out[q] += &(&s * &t);
                }
            }
        }
        out
    }

    pub fn check_jacobi(&self) -> JacobiReport {
        let n = self.dim();
        let mut failures = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let r = self.jacobiator(i, j, k);
                    if r.iter().any(|c| !c.is_zero()) {
                        failures.push(JacobiFailure {
                            triple: [i, j, k],
                            names: [self.name(i).into(), self.name(j).into(), self.name(k).into()],
                            residue: self.format_vector(&r),
                        });
                    }
                }
            }
        }
        JacobiReport { failures }
    }

    /// Matrix of `ad x`, columns indexed by basis elements.
    pub fn ad_matrix(&self, x: &[Scalar]) -> Result<Vec<Vector>, LieError> {
        let n = self.dim();
        let cols: Vec<Vector> =
            (0..n).map(|j| self.bracket(x, &self.e(j))).collect::<Result<_, _>>()?;
        Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
    }

    /// Eigenvalues of `ad x` (listed in basis order), provided `ad x` is
    /// triangular for some ordering of the basis.
    pub fn ad_spectrum(&self, x: &[Scalar]) -> Result<Vec<Scalar>, LieError> {
        let a = self.ad_matrix(x)?;
        let n = self.dim();
        let mut placed = vec![false; n];
        for _ in 0..n {
            let next = (0..n).find(|&j| {
                !placed[j] && (0..n).all(|i| i == j || placed[i] || a[i][j].is_zero())
            });
            match next {
                Some(j) => placed[j] = true,
                None => return Err(LieError::NotTriangularizable),
            }
        }
        Ok((0..n).map(|i| a[i][i].clone()).collect())
    }

    /// Basis (in echelon form) of the span of the given vectors.
    pub fn span(&self, vs: Vec<Vector>) -> Vec<Vector> {
        linalg::echelon(vs, self.dim()).rows
    }

    /// `[g, g]`.
    pub fn derived_algebra(&self) -> Vec<Vector> {
        let n = self.dim();
        let mut vs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                vs.push(self.bracket_basis(i, j));
            }
        }
        self.span(vs)
    }

    /// Center of the algebra as a kernel basis.
    pub fn center(&self) -> Vec<Vector> {
        let n = self.dim();
        // x is central iff Σ_i x_i [e_i, e_j] = 0 for all j.
        let mut rows = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.bracket_basis(i, j)[k].clone()).collect());
            }
        }
        linalg::kernel(rows, n, self.m()).0
    }

    /// Express the algebra in a new basis `new[p] = Σ_i new[p][i] e_i`.
    pub fn change_basis(&self, new: &[NewBasisElement]) -> Result<LieAlgebra, LieError> {
        let n = self.dim();
        let m = self.m();
        if new.len() != n {
            return Err(LieError::Dimension { got: new.len(), want: n });
        }
        // columns of P are the new basis vectors; coordinates = P^{-1} v
        let p: Vec<Vector> =
            (0..n).map(|i| (0..n).map(|q| new[q].vector[i].clone()).collect()).collect();
        let pinv = linalg::inverse(&p, m).ok_or(LieError::Singular)?;
        let mut table = BracketTable::new();
        for a in 0..n {
            for b in a + 1..n {
                let v = self.bracket(&new[a].vector, &new[b].vector)?;
                let c = linalg::mat_vec(&pinv, &v, m);
                let terms: Vec<(usize, Scalar)> =
                    c.into_iter().enumerate().filter(|(_, s)| !s.is_zero()).collect();
                if !terms.is_empty() {
                    table.insert((a, b), terms);
                }
            }
        }
        let basis = new
            .iter()
            .map(|e| BasisElement { name: e.name.clone(), degree: e.degree, conj: e.conj })
            .collect();
        LieAlgebra::build(self.units.clone(), basis, table, self.grading)
    }

    /// Real form: each conjugate pair `(a, ā)` becomes `A = a + ā`,
    /// `JA = i(a − ā)`, so that `a = ½(A − i·JA)`. Self-conjugate elements
    /// are kept. The result has every element self-conjugate.
    pub fn realify(&self) -> Result<LieAlgebra, LieError> {
        let m = self.m();
        let mut new = Vec::new();
        for (i, b) in self.basis.iter().enumerate() {
            let mut v = self.zero();
            if b.conj == i {
                v[i] = Scalar::one(m);
                new.push(NewBasisElement { name: b.name.clone(), degree: b.degree, conj: i, vector: v });
                continue;
            }
            let (a, abar) = if i < b.conj { (i, b.conj) } else { (b.conj, i) };
            let (na, nb) = real_names(&self.basis[a].name, &self.basis[abar].name);
            if i == a {
                v[a] = Scalar::one(m);
                v[abar] = Scalar::one(m);
                new.push(NewBasisElement { name: na, degree: b.degree, conj: i, vector: v });
            } else {
                v[a] = Scalar::i(m);
                v[abar] = -Scalar::i(m);
                new.push(NewBasisElement { name: nb, degree: b.degree, conj: i, vector: v });
            }
        }
        self.change_basis(&new)
    }

    /// Inverse of [`realify`](Self::realify): every `(A, B)` in `pairs`
    /// becomes `Z10 = ½(A − iB)` (at A's position) and `Z01 = ½(A + iB)`
    /// (at B's position).
    pub fn complexify(&self, pairs: &[(usize, usize)]) -> Result<LieAlgebra, LieError> {
        let m = self.m();
        let n = self.dim();
        for (i, b) in self.basis.iter().enumerate() {
            if b.conj != i {
                return Err(LieError::NotReal(b.name.clone()));
            }
        }
        let half = Scalar::parse("1/2", m)?;
        let ihalf = Scalar::parse("(1/2)*I", m)?;
        let mut new: Vec<NewBasisElement> = (0..n)
            .map(|i| NewBasisElement {
                name: self.basis[i].name.clone(),
                degree: self.basis[i].degree,
                conj: i,
                vector: self.e(i),
            })
            .collect();
        for &(a, b) in pairs {
            let (n10, n01) = complex_names(&self.basis[a].name, &self.basis[b].name);
            let mut z10 = self.zero();
            z10[a] = half.clone();
            z10[b] = -&ihalf;
            let mut z01 = self.zero();
            z01[a] = half.clone();
            z01[b] = ihalf.clone();
            new[a] = NewBasisElement { name: n10, degree: self.basis[a].degree, conj: b, vector: z10 };
            new[b] = NewBasisElement { name: n01, degree: self.basis[b].degree, conj: a, vector: z01 };
        }
        self.change_basis(&new)
    }

    /// Block direct sum `self ⊕ other` (disjoint names required).
    pub fn direct_sum(&self, other: &LieAlgebra) -> Result<LieAlgebra, LieError> {
        if self.units != other.units {
            return Err(ScalarError::ContextMismatch(self.m(), other.m()).into());
        }
        let n = self.dim();
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().map(|b| BasisElement {
            name: b.name.clone(),
            degree: b.degree,
            conj: b.conj + n,
        }));
        let mut table = self.table.clone();
        for (&(i, j), t) in &other.table {
            table.insert((i + n, j + n), t.iter().map(|(k, c)| (k + n, c.clone())).collect());
        }
        LieAlgebra::build(self.units.clone(), basis, table, self.grading)
    }

    /// `Σ c_k e_k` as text, e.g. `I*R - Z01`.
    pub fn format_vector(&self, v: &[Scalar]) -> String {
        format_combination(v.iter().enumerate().map(|(k, c)| (self.name(k).to_string(), c.clone())))
    }

    pub fn to_json(&self) -> LieAlgJson {
        LieAlgJson {
            schema: Some("liealg.v1".into()),
            units: self.units.clone(),
            basis: self
                .basis
                .iter()
                .map(|b| BasisJson {
                    name: b.name.clone(),
                    degree: b.degree,
                    conj: self.basis[b.conj].name.clone(),
                })
                .collect(),
            brackets: self
                .table
                .iter()
                .map(|(&(i, j), t)| BracketJson {
                    x: self.name(i).into(),
                    y: self.name(j).into(),
                    terms: t
                        .iter()
                        .map(|(k, c)| TermJson { z: self.name(*k).into(), c: c.to_string() })
                        .collect(),
                })
                .collect(),
            ..Default::default()
        }
    }

    pub fn from_json(j: &LieAlgJson) -> Result<Self, LieError> {
        let (units, basis, table) = j.parts()?;
        LieAlgebra::new(units, basis, table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LieError> {
        let text = std::fs::read_to_string(path)?;
        let j: LieAlgJson = serde_json::from_str(&text)?;
        LieAlgebra::from_json(&j)
    }
}

/// A new basis element for [`LieAlgebra::change_basis`].
#[derive(Debug, Clone)]
pub struct NewBasisElement {
    pub name: String,
    pub degree: i32,
    pub conj: usize,
    pub vector: Vector,
}

fn real_names(a: &str, b: &str) -> (String, String) {
    if let (Some(s), Some(t)) = (a.strip_suffix("10"), b.strip_suffix("01")) {
        if s == t && !s.is_empty() {
            return (s.to_string(), format!("J{s}"));
        }
    }
    (format!("{a}_re"), format!("{a}_im"))
}

fn complex_names(a: &str, b: &str) -> (String, String) {
    if b == format!("J{a}") {
        return (format!("{a}10"), format!("{a}01"));
    }
    if let (Some(s), Some(t)) = (a.strip_suffix("_re"), b.strip_suffix("_im")) {
        if s == t {
            let other = if let Some(x) = s.strip_suffix("10") { format!("{x}01") } else { format!("{s}_bar") };
            return (s.to_string(), other);
        }
    }
    (format!("{a}10"), format!("{a}01"))
}

/// Render `Σ c·name` with canonical signs.
pub fn format_combination(terms: impl IntoIterator<Item = (String, Scalar)>) -> String {
    let mut out = String::new();
    for (name, c) in terms {
        if c.is_zero() {
            continue;
        }
        let text = c.to_string();
        let (neg, body) = if c.is_unit() {
            match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            }
        } else {
            (false, format!("({text})"))
        };
        let piece = if body == "1" { name } else { format!("{body}*{name}") };
        if out.is_empty() {
            out = if neg { format!("-{piece}") } else { piece };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&piece);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiFailure {
    pub triple: [usize; 3],
    pub names: [String; 3],
    pub residue: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiReport {
    pub failures: Vec<JacobiFailure>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub name: String,
    pub degree: i32,
    pub conj: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub z: String,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketJson {
    pub x: String,
    pub y: String,
    pub terms: Vec<TermJson>,
}

/// The `liealg.v1` document. Extra keys (used by `deform.v1`) are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LieAlgJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub units: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_meanings: Option<BTreeMap<String, String>>,
    pub basis: Vec<BasisJson>,
    #[serde(default)]
    pub brackets: Vec<BracketJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<serde_json::Value>,
}

impl LieAlgJson {
    /// Resolve names and parse scalars.
    pub fn parts(&self) -> Result<(Vec<String>, Vec<BasisElement>, BracketTable), LieError> {
        let m = self.units.len();
        for (k, u) in self.units.iter().enumerate() {
            if *u != format!("u{}", k + 1) {
                return Err(ScalarError::UnknownUnit(k + 1, m).into());
            }
        }
        let idx = |name: &str| {
            self.basis
                .iter()
                .position(|b| b.name == name)
                .ok_or_else(|| LieError::UnknownBasis(name.to_string()))
        };
        let basis = self
            .basis
            .iter()
            .map(|b| Ok(BasisElement { name: b.name.clone(), degree: b.degree, conj: idx(&b.conj)? }))
            .collect::<Result<Vec<_>, LieError>>()?;
        let mut table = BracketTable::new();
        for br in &self.brackets {
            let (x, y) = (idx(&br.x)?, idx(&br.y)?);
            if x == y {
                return Err(LieError::SelfBracket(br.x.clone()));
            }
            let (a, b, neg) = if x < y { (x, y, false) } else { (y, x, true) };
            if table.contains_key(&(a, b)) {
                return Err(LieError::DuplicateBracket(br.x.clone(), br.y.clone()));
            }
            let mut terms = Vec::new();
            for t in &br.terms {
                let c = Scalar::parse(&t.c, m)?;
                terms.push((idx(&t.z)?, if neg { -c } else { c }));
            }
            table.insert((a, b), terms);
        }
        Ok((self.units.clone(), basis, table))
    }
}
