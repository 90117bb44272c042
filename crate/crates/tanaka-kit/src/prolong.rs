//! Tanaka prolongation of a non-positively graded Lie algebra.
//!
//! A degree-`k` element is a map `f: g_{<0} → g` raising degree by `k`
//! that satisfies the derivation rule `f([x,y]) = [f(x),y] + [x,f(y)]`.
//! Levels are computed one at a time as exact kernels; the prolonged
//! algebra is then assembled with `[[A,B],x] = [A,[B,x]] − [B,[A,x]]`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::liealg::{format_combination, BasisElement, BracketTable, LieAlgebra, LieError};
use crate::linalg;
use crate::scalars::Scalar;

#[derive(Debug, Error)]
pub enum ProlongError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("basis element {0:?} has positive degree; symbols live in degrees ≤ 0")]
    PositiveDegree(String),
    #[error("negative part is not generated by degree -1 (degree {0} is not reached)")]
    NotFundamental(i32),
    #[error("degree-0 part does not act by derivations (Jacobi fails on {0:?})")]
    NotDerivations([String; 3]),
    #[error("cochain entry {0} is outside g_(-1)*⊗g_0 ⊕ g_(-2)*⊗g_(-1)")]
    CochainDomain(String),
    #[error("level {0} is not closed under conjugation in its canonical basis")]
    ConjugationBasis(usize),
    #[error("bracket map of degree {0} is not in the computed level")]
    NotInLevel(usize),
}

/// A graded algebra concentrated in non-positive degrees.
#[derive(Debug, Clone)]
pub struct SymbolAlgebra {
    alg: LieAlgebra,
    neg: Vec<usize>,
    depth: i32,
}

impl SymbolAlgebra {
    pub fn new(alg: LieAlgebra) -> Result<Self, ProlongError> {
        if let Some(b) = alg.basis().iter().find(|b| b.degree > 0) {
            return Err(ProlongError::PositiveDegree(b.name.clone()));
        }
        let jac = alg.check_jacobi();
        if let Some(f) = jac.failures.first() {
            return Err(ProlongError::NotDerivations(f.names.clone()));
        }
        let neg: Vec<usize> = (0..alg.dim()).filter(|&i| alg.degree(i) < 0).collect();
        let depth = neg.iter().map(|&i| -alg.degree(i)).max().unwrap_or(0);
        let sym = SymbolAlgebra { alg, neg, depth };
        sym.check_fundamental()?;
        Ok(sym)
    }

    fn check_fundamental(&self) -> Result<(), ProlongError> {
        let a = &self.alg;
        let of_degree = |d: i32| -> Vec<usize> { self.neg.iter().copied().filter(|&i| a.degree(i) == d).collect() };
        for k in 1..self.depth {
            let target = of_degree(-k - 1);
            let mut vs = Vec::new();
            for &x in &of_degree(-1) {
                for &y in &of_degree(-k) {
                    vs.push(a.bracket_basis(x, y));
                }
            }
            if a.span(vs).len() != target.len() {
                return Err(ProlongError::NotFundamental(-k - 1));
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }
    /// Indices of the negative-degree basis elements.
    pub fn negative(&self) -> &[usize] {
        &self.neg
    }
    pub fn depth(&self) -> i32 {
        self.depth
    }
}

/// Sparse vector over the prolonged basis.
pub type Sparse = BTreeMap<usize, Scalar>;

/// One element of a prolongation level: its value on each negative basis
/// element (keys are indices into the prolonged basis).
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMap {
    pub values: BTreeMap<usize, Sparse>,
}

#[derive(Debug, Clone)]
pub struct ProlongationLevel {
    pub k: usize,
    pub maps: Vec<LevelMap>,
    /// Column in the unknown space used to read off coordinates.
    pivots: Vec<(usize, usize)>,
    /// Index (within the level) of the conjugate of each basis map.
    conj: Vec<usize>,
    pub assumptions: Vec<String>,
}

impl ProlongationLevel {
    pub fn dim(&self) -> usize {
        self.maps.len()
    }
}

/// Working state: the symbol, levels computed so far, and the names and
/// degrees of every element of the prolonged basis.
#[derive(Debug, Clone)]
struct Workspace<'a> {
    sym: &'a SymbolAlgebra,
    levels: Vec<ProlongationLevel>,
    names: Vec<String>,
    degrees: Vec<i32>,
}

impl<'a> Workspace<'a> {
    fn new(sym: &'a SymbolAlgebra, levels: &[ProlongationLevel]) -> Self {
        let a = &sym.alg;
        let mut ws = Workspace {
            sym,
            levels: Vec::new(),
            names: a.basis().iter().map(|b| b.name.clone()).collect(),
            degrees: a.basis().iter().map(|b| b.degree).collect(),
        };
        for l in levels {
            ws.push_level(l.clone());
        }
        ws
    }

    fn m(&self) -> usize {
        self.sym.alg.m()
    }

    fn push_level(&mut self, level: ProlongationLevel) {
        for i in 0..level.dim() {
            self.names.push(format!("g{}_{}", level.k, i + 1));
            self.degrees.push(level.k as i32);
        }
        self.levels.push(level);
    }

    fn level_of(&self, p: usize) -> Option<(usize, usize)> {
        let mut off = self.sym.alg.dim();
        for (li, l) in self.levels.iter().enumerate() {
            if p < off + l.dim() {
                return Some((li, p - off));
            }
            off += l.dim();
        }
        None
    }

    /// `[e_p, x]` for `x` a negative basis element of the symbol.
    fn bracket_neg(&self, p: usize, x: usize) -> Sparse {
        let a = &self.sym.alg;
        if p < a.dim() {
            return a.bracket_terms(p, x).into_iter().collect();
        }
        let (li, i) = self.level_of(p).expect("index in range");
        self.levels[li].maps[i].values.get(&x).cloned().unwrap_or_default()
    }
}

fn add_scaled(acc: &mut Sparse, v: &Sparse, c: &Scalar) {
    for (k, x) in v {
        let e = acc.entry(*k).or_insert_with(|| Scalar::zero(c.units()));
        *e += &(c * x);
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

/// Compute the degree-`k` prolongation given levels `1..k−1`.
pub fn prolong_step(
    sym: &SymbolAlgebra,
    levels: &[ProlongationLevel],
    k: usize,
) -> Result<ProlongationLevel, ProlongError> {
    assert_eq!(levels.len() + 1, k, "levels 1..k-1 must be supplied");
    let ws = Workspace::new(sym, levels);
    let m = ws.m();
    let a = &sym.alg;
    let kk = k as i32;
    // unknown f(x)_t for x negative and deg t = deg x + k
    let mut cols: Vec<(usize, usize)> = Vec::new();
    for &x in &sym.neg {
        for t in 0..ws.names.len() {
            if ws.degrees[t] == a.degree(x) + kk {
                cols.push((x, t));
            }
        }
    }
    let col_of: BTreeMap<(usize, usize), usize> = cols.iter().enumerate().map(|(c, &p)| (p, c)).collect();
    // f([x,y]) − [f(x),y] − [x,f(y)] = 0, with [x, f(y)] = −[f(y), x]
    let mut rows: BTreeMap<(usize, usize, usize), Vec<Scalar>> = BTreeMap::new();
    let ncols = cols.len();
    let put = |rows: &mut BTreeMap<(usize, usize, usize), Vec<Scalar>>, key, col: usize, c: &Scalar| {
        let r = rows.entry(key).or_insert_with(|| vec![Scalar::zero(m); ncols]);
        r[col] += c;
    };
    for (ix, &x) in sym.neg.iter().enumerate() {
        for &y in &sym.neg[ix + 1..] {
            for (z, c) in a.bracket_terms(x, y) {
                for (&(zz, t), &col) in col_of.range((z, 0)..(z + 1, 0)) {
                    debug_assert_eq!(zz, z);
                    put(&mut rows, (x, y, t), col, &c);
                }
            }
            for (&(xx, t), &col) in col_of.range((x, 0)..(x + 1, 0)) {
                debug_assert_eq!(xx, x);
                for (w, c) in ws.bracket_neg(t, y) {
                    put(&mut rows, (x, y, w), col, &-c);
                }
            }
            for (&(yy, t), &col) in col_of.range((y, 0)..(y + 1, 0)) {
                debug_assert_eq!(yy, y);
                for (w, c) in ws.bracket_neg(t, x) {
                    put(&mut rows, (x, y, w), col, &c);
                }
            }
        }
    }
    let (kernel, assumptions) = linalg::kernel(rows.into_values().collect(), ncols, m);
    let mut maps = Vec::new();
    for v in kernel {
        let mut values: BTreeMap<usize, Sparse> = BTreeMap::new();
        for (c, s) in v.iter().enumerate() {
            if !s.is_zero() {
                let (x, t) = cols[c];
                values.entry(x).or_default().insert(t, s.clone());
            }
        }
        maps.push(LevelMap { values });
    }
    let pivots = free_columns(&maps, &cols);
    let conj = (0..maps.len()).collect();
    Ok(ProlongationLevel { k, maps, pivots, conj, assumptions })
}

fn free_columns(maps: &[LevelMap], cols: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let get = |m: &LevelMap, (x, t): (usize, usize)| m.values.get(&x).and_then(|v| v.get(&t)).cloned();
    maps.iter()
        .enumerate()
        .map(|(i, mi)| {
            *cols
                .iter()
                .find(|&&c| {
                    get(mi, c).is_some()
                        && maps.iter().enumerate().all(|(j, mj)| j == i || get(mj, c).is_none())
                })
                .expect("kernel basis has distinguished free columns")
        })
        .collect()
}

/// Result of [`tanaka_prolong`].
#[derive(Debug, Clone)]
pub struct Prolongation {
    pub symbol: SymbolAlgebra,
    pub levels: Vec<ProlongationLevel>,
    pub kmax: usize,
    /// A zero level was reached at or below `kmax`.
    pub terminated: bool,
    /// The prolonged graded algebra; brackets landing above `kmax` are
    /// dropped when the prolongation has not terminated.
    pub algebra: LieAlgebra,
    pub assumptions: Vec<String>,
}

impl Prolongation {
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.levels.iter().map(|l| l.dim()).collect();
        d.resize(self.kmax, 0);
        d
    }

    pub fn total(&self) -> usize {
        self.algebra.dim()
    }

    /// Index in [`Prolongation::algebra`] of basis map `i` of level `k`.
    pub fn index_of(&self, k: usize, i: usize) -> usize {
        self.symbol.alg.dim() + self.levels[..k - 1].iter().map(|l| l.dim()).sum::<usize>() + i
    }

    /// A level element as a cochain on the negative part.
    pub fn cochain(&self, k: usize, i: usize) -> Cochain {
        let mut entries = BTreeMap::new();
        for (x, v) in &self.levels[k - 1].maps[i].values {
            for (t, c) in v {
                entries.insert((vec![*x], Some(*t)), c.clone());
            }
        }
        Cochain { arity: 1, entries }
    }

    pub fn report(&self) -> ProlongReport {
        let mut basis = Vec::new();
        for l in &self.levels {
            for i in 0..l.dim() {
                basis.push(NamedCochain {
                    name: self.algebra.name(self.index_of(l.k, i)).to_string(),
                    degree: l.k,
                    cochain: self.cochain(l.k, i).format(&self.algebra),
                });
            }
        }
        ProlongReport {
            dims: self.dims(),
            total: self.total(),
            terminated: self.terminated,
            basis,
            genericity_assumptions: self.assumptions.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCochain {
    pub name: String,
    pub degree: usize,
    pub cochain: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProlongReport {
    pub dims: Vec<usize>,
    pub total: usize,
    pub terminated: bool,
    pub basis: Vec<NamedCochain>,
    pub genericity_assumptions: Vec<String>,
}

/// Prolong up to degree `kmax` and assemble the prolonged algebra.
pub fn tanaka_prolong(sym: &SymbolAlgebra, kmax: usize) -> Result<Prolongation, ProlongError> {
    let mut levels: Vec<ProlongationLevel> = Vec::new();
    let mut terminated = false;
    let mut assumptions: Vec<String> = Vec::new();
    for k in 1..=kmax {
        let mut level = prolong_step(sym, &levels, k)?;
        for a in &level.assumptions {
            if !assumptions.contains(a) {
                assumptions.push(a.clone());
            }
        }
        if level.dim() == 0 {
            terminated = true;
            break;
        }
        adapt_conjugation(sym, &levels, &mut level)?;
        levels.push(level);
    }
    let algebra = assemble(sym, &levels, terminated)?;
    Ok(Prolongation { symbol: sym.clone(), levels, kmax, terminated, algebra, assumptions })
}

/// Index of the conjugate of a prolonged basis element.
fn conj_index(ws: &Workspace, p: usize) -> usize {
    let a = &ws.sym.alg;
    if p < a.dim() {
        return a.basis()[p].conj;
    }
    let (li, i) = ws.level_of(p).expect("index in range");
    p - i + ws.levels[li].conj[i]
}

/// `f̄(x) = conj(f(x̄))`.
fn conj_map(ws: &Workspace, f: &LevelMap) -> LevelMap {
    let a = &ws.sym.alg;
    let values = f
        .values
        .iter()
        .map(|(x, v)| (a.basis()[*x].conj, v.iter().map(|(t, c)| (conj_index(ws, *t), c.conj())).collect()))
        .collect();
    LevelMap { values }
}

/// Rescale a fresh level so that conjugation permutes its basis.
fn adapt_conjugation(
    sym: &SymbolAlgebra,
    levels: &[ProlongationLevel],
    level: &mut ProlongationLevel,
) -> Result<(), ProlongError> {
    let ws = Workspace::new(sym, levels);
    let n = level.dim();
    let conj_maps: Vec<LevelMap> = level.maps.iter().map(|f| conj_map(&ws, f)).collect();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let bad = ProlongError::ConjugationBasis(level.k);
        let coords = coordinates(level, &conj_maps[i]).ok_or(bad)?;
        let nz: Vec<usize> = (0..n).filter(|&j| !coords[j].is_zero()).collect();
        let [j] = nz[..] else { return Err(ProlongError::ConjugationBasis(level.k)) };
        if !coords[j].is_unit() || (j == i && !coords[j].is_one()) || (j != i && done[j]) {
            return Err(ProlongError::ConjugationBasis(level.k));
        }
        level.maps[j] = conj_maps[i].clone();
        level.conj[i] = j;
        level.conj[j] = i;
        done[i] = true;
        done[j] = true;
    }
    Ok(())
}

/// Coordinates of a map in the level basis, read at the free columns and
/// verified by reconstruction.
fn coordinates(level: &ProlongationLevel, f: &LevelMap) -> Option<Vec<Scalar>> {
    let get = |mp: &LevelMap, (x, t): (usize, usize)| mp.values.get(&x).and_then(|v| v.get(&t)).cloned();
    let mut coords = Vec::new();
    for (i, &col) in level.pivots.iter().enumerate() {
        let b = get(&level.maps[i], col).expect("pivot entry");
        coords.push(match get(f, col) {
            Some(w) => w.div_unit(&b).ok()?,
            None => Scalar::zero(b.units()),
        });
    }
    let mut recon: BTreeMap<usize, Sparse> = BTreeMap::new();
    for (c, mp) in coords.iter().zip(&level.maps) {
        for (x, v) in &mp.values {
            add_scaled(recon.entry(*x).or_default(), v, c);
        }
    }
    recon.retain(|_, v| !v.is_empty());
    let mut want = f.values.clone();
    want.retain(|_, v| !v.is_empty());
    (recon == want).then_some(coords)
}

/// Assemble the bracket table of `g_{≤0} ⊕ levels`.
fn assemble(sym: &SymbolAlgebra, levels: &[ProlongationLevel], terminated: bool) -> Result<LieAlgebra, ProlongError> {
    let ws = Workspace::new(sym, levels);
    let a = &sym.alg;
    let m = a.m();
    let n = ws.names.len();
    let top = levels.len();
    let mut table: BTreeMap<(usize, usize), Sparse> = BTreeMap::new();
    for (&(i, j), v) in a.table() {
        table.insert((i, j), v.iter().cloned().collect());
    }
    for p in a.dim()..n {
        for &x in &sym.neg {
            let v = ws.bracket_neg(p, x);
            if !v.is_empty() {
                table.insert((x, p), v.iter().map(|(k, c)| (*k, -c)).collect());
            }
        }
    }
    let nonneg: Vec<usize> = (0..n).filter(|&p| ws.degrees[p] >= 0).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (ip, &p) in nonneg.iter().enumerate() {
        for &q in &nonneg[ip + 1..] {
            if ws.degrees[p] + ws.degrees[q] > 0 {
                pairs.push((p, q));
            }
        }
    }
    pairs.sort_by_key(|&(p, q)| ws.degrees[p] + ws.degrees[q]);
    for (p, q) in pairs {
        let d = (ws.degrees[p] + ws.degrees[q]) as usize;
        let mut values: BTreeMap<usize, Sparse> = BTreeMap::new();
        for &x in &sym.neg {
            let mut acc = Sparse::new();
            let one = Scalar::one(m);
            add_scaled(&mut acc, &bracket_vec(&table, p, &ws.bracket_neg(q, x), m), &one);
            add_scaled(&mut acc, &bracket_vec(&table, q, &ws.bracket_neg(p, x), m), &-one);
            if !acc.is_empty() {
                values.insert(x, acc);
            }
        }
        if values.is_empty() {
            continue;
        }
        let f = LevelMap { values };
        if d > top {
            if terminated {
                return Err(ProlongError::NotInLevel(d));
            }
            continue;
        }
        let level = &levels[d - 1];
        let coords = coordinates(level, &f).ok_or(ProlongError::NotInLevel(d))?;
        let off = a.dim() + levels[..d - 1].iter().map(|l| l.dim()).sum::<usize>();
        let v: Sparse = coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (off + i, c)).collect();
        table.insert((p, q), v);
    }
    let basis = (0..n)
        .map(|p| BasisElement { name: ws.names[p].clone(), degree: ws.degrees[p], conj: conj_index(&ws, p) })
        .collect();
    let table: BracketTable = table.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect();
    Ok(LieAlgebra::new(a.units().to_vec(), basis, table)?)
}

fn bracket_vec(table: &BTreeMap<(usize, usize), Sparse>, p: usize, v: &Sparse, m: usize) -> Sparse {
    let mut acc = Sparse::new();
    for (s, c) in v {
        let (key, sign) = if p < *s { ((p, *s), Scalar::one(m)) } else { ((*s, p), -Scalar::one(m)) };
        if p == *s {
            continue;
        }
        if let Some(b) = table.get(&key) {
            add_scaled(&mut acc, b, &(c * &sign));
        }
    }
    acc
}

/// Alternating cochain on the negative part of an algebra, valued in the
/// algebra (`Some(target)`) or in the trivial module (`None`). Arguments are
/// stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cochain {
    pub arity: usize,
    pub entries: BTreeMap<(Vec<usize>, Option<usize>), Scalar>,
}

/// Coefficient module of a cochain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Adjoint,
    Trivial,
}

impl Cochain {
    pub fn zero(arity: usize) -> Self {
        Cochain { arity, entries: BTreeMap::new() }
    }

    /// The 0-cochain given by an element of the algebra.
    pub fn element(v: &[Scalar]) -> Self {
        let entries = v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(t, c)| ((vec![], Some(t)), c.clone())).collect();
        Cochain { arity: 0, entries }
    }

    /// `c · x_1^*∧…∧x_n^* ⊗ target`, normalizing argument order.
    pub fn add_term(&mut self, args: &[usize], target: Option<usize>, c: &Scalar) {
        assert_eq!(args.len(), self.arity);
        let Some((sorted, sign)) = sort_sign(args) else { return };
        let key = (sorted, target);
        let e = self.entries.entry(key.clone()).or_insert_with(|| Scalar::zero(c.units()));
        if sign < 0 {
            *e -= c;
        } else {
            *e += c;
        }
        if e.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coefficients(&self) -> Option<Coefficients> {
        let (_, t) = self.entries.keys().next()?;
        Some(if t.is_some() { Coefficients::Adjoint } else { Coefficients::Trivial })
    }

    /// Value on the given basis arguments, as a sparse vector (index 0 for
    /// trivial coefficients).
    pub fn eval(&self, args: &[usize]) -> Sparse {
        let mut out = Sparse::new();
        let Some((sorted, sign)) = sort_sign(args) else { return out };
        let lo = (sorted.clone(), None);
        for ((a, t), c) in self.entries.range(lo..) {
            if *a != sorted {
                break;
            }
            out.insert(t.unwrap_or(0), if sign < 0 { -c } else { c.clone() });
        }
        out
    }

    /// Dual-basis notation, e.g. `X10^*∧X01^*⊗R`; arguments of higher
    /// degree come first.
    pub fn format(&self, alg: &LieAlgebra) -> String {
        let mut entries: Vec<_> = self.entries.iter().collect();
        entries.sort_by_key(|((args, _), _)| -args.iter().map(|x| alg.degree(*x)).sum::<i32>());
        format_combination(entries.into_iter().map(|((args, t), c)| {
            let mut name = args.iter().map(|x| format!("{}^*", alg.name(*x))).collect::<Vec<_>>().join("∧");
            match (t, name.is_empty()) {
                (Some(t), true) => name = alg.name(*t).to_string(),
                (Some(t), false) => name = format!("{name}⊗{}", alg.name(*t)),
                (None, true) => name = "1".into(),
                (None, false) => {}
            }
            (name, c.clone())
        }))
    }
}

fn sort_sign(args: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = args.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Chevalley–Eilenberg differential of a cochain on the negative part:
/// `dφ(x_0..x_n) = Σ (−1)^i x_i·φ(..x̂_i..) + Σ_{i<j} (−1)^{i+j} φ([x_i,x_j], ..x̂_i..x̂_j..)`.
pub fn ce_differential(alg: &LieAlgebra, phi: &Cochain, coeff: Coefficients) -> Cochain {
    let m = alg.m();
    let neg: Vec<usize> = (0..alg.dim()).filter(|&i| alg.degree(i) < 0).collect();
    let n = phi.arity;
    let mut out = Cochain::zero(n + 1);
    for xs in combinations(&neg, n + 1) {
        let mut val = Sparse::new();
        for i in 0..=n {
            if coeff == Coefficients::Trivial {
                break;
            }
            let rest: Vec<usize> = xs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
            let sign = if i % 2 == 0 { Scalar::one(m) } else { -Scalar::one(m) };
            for (t, c) in phi.eval(&rest) {
                for (w, b) in alg.bracket_terms(xs[i], t) {
                    add_scaled(&mut val, &Sparse::from([(w, b)]), &(&c * &sign));
                }
            }
        }
        for i in 0..=n {
            for j in i + 1..=n {
                let sign = if (i + j) % 2 == 0 { Scalar::one(m) } else { -Scalar::one(m) };
                let others: Vec<usize> =
                    xs.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                for (z, c) in alg.bracket_terms(xs[i], xs[j]) {
                    let mut args = vec![z];
                    args.extend(&others);
                    add_scaled(&mut val, &phi.eval(&args), &(&c * &sign));
                }
            }
        }
        for (t, c) in val {
            let target = match coeff {
                Coefficients::Adjoint => Some(t),
                Coefficients::Trivial => None,
            };
            out.add_term(&xs, target, &c);
        }
    }
    out
}

/// Degree-1 Spencer operator on `g_{−1}^*⊗g_0 ⊕ g_{−2}^*⊗g_{−1}`.
pub fn spencer_delta1(sym: &SymbolAlgebra, phi: &Cochain) -> Result<Cochain, ProlongError> {
    let a = &sym.alg;
    if phi.arity != 1 {
        return Err(ProlongError::CochainDomain(format!("{}-cochain", phi.arity)));
    }
    for (args, t) in phi.entries.keys() {
        let ok = t.is_some_and(|t| {
                let (dx, dt) = (a.degree(args[0]), a.degree(t));
                (dx == -1 && dt == 0) || (dx == -2 && dt == -1)
            });
        if !ok {
            let text = Cochain { arity: phi.arity, entries: BTreeMap::from([((args.clone(), *t), Scalar::one(a.m()))]) };
            return Err(ProlongError::CochainDomain(text.format(a)));
        }
    }
    Ok(ce_differential(a, phi, Coefficients::Adjoint))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> LieAlgebra {
        LieAlgebra::load(format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
    }

    #[test]
    fn fprime_first_level() {
        let sym = SymbolAlgebra::new(fixture("sec3_5_fprime")).unwrap();
        let p = tanaka_prolong(&sym, 3).unwrap();
        assert_eq!(p.dims(), vec![2, 0, 0]);
        assert!(p.terminated);
        assert_eq!(p.total(), 9);
        let texts: Vec<String> = p.report().basis.into_iter().map(|b| b.cochain).collect();
        assert_eq!(texts, vec!["X10^*⊗B - R^*⊗Z01", "X01^*⊗B - R^*⊗Z10"]);
        assert!(p.algebra.check_jacobi().passed());
    }

    #[test]
    fn sort_sign_tracks_parity() {
        assert_eq!(sort_sign(&[3, 1, 2]), Some((vec![1, 2, 3], 1)));
        assert_eq!(sort_sign(&[2, 1]), Some((vec![1, 2], -1)));
        assert_eq!(sort_sign(&[1, 1]), None);
    }
}
