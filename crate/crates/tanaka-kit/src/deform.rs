//! Filtered deformations of a graded bracket and their Jacobi obstructions.
//!
//! Every bracket component that raises the filtration degree gets an
//! unknown coefficient unless pinned. Coefficients are written in real
//! variables compatible with conjugation; the Jacobi identities then give
//! polynomial equations, which [`eliminate`] resolves by cascading
//! substitutions of linear equations with invertible coefficients.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liealg::{LieAlgJson, LieAlgebra, LieError};
use crate::poly::{eval_scalar, Poly};
use crate::scalars::{Gauss, Scalar, ScalarError};

#[derive(Debug, Error)]
pub enum DeformError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("inconsistent pinning of [{0},{1}] along {2}: {3}")]
    Pin(String, String, String, String),
    #[error("unknown policy {0:?}")]
    Policy(String),
    #[error("malformed deformation input: {0}")]
    Input(String),
}

/// `(i, j, k)` with `i < j`: the `e_k` component of `[e_i, e_j]`.
pub type Slot = (usize, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownPolicy {
    AllPositiveExcess,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinMode {
    /// Every component is given; unlisted ones vanish.
    Exact,
    /// Components along negative degrees are given (unlisted ones vanish);
    /// components along degrees `≥ 0` stay unknown unless listed.
    ModNonneg,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PinValue {
    Fixed(Scalar),
    /// An arbitrary complex coefficient.
    Free,
    /// `factor · s` with `s` real.
    FreeReal(Scalar),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinnedRelation {
    pub x: usize,
    pub y: usize,
    pub mode: PinMode,
    pub terms: Vec<(usize, PinValue)>,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationUnknown {
    pub name: String,
    pub slot: Slot,
    pub excess: i32,
    /// Linear expression in the real variables.
    pub value: Poly,
}

#[derive(Debug, Clone)]
pub struct DeformationSystem {
    pub base: LieAlgebra,
    pub unknowns: Vec<DeformationUnknown>,
    pub variables: Vec<String>,
    pub pinned: Vec<PinnedRelation>,
    pub graded_by: Option<usize>,
    brackets: BTreeMap<(usize, usize), BTreeMap<usize, Poly>>,
}

struct Builder<'a> {
    base: &'a LieAlgebra,
    values: BTreeMap<Slot, Poly>,
    variables: Vec<String>,
    weights: Option<Vec<Scalar>>,
}

impl Builder<'_> {
    fn m(&self) -> usize {
        self.base.m()
    }

    fn slot_name(&self, (i, j, k): Slot) -> String {
        let a = self.base;
        format!("[{},{}]_{}", a.name(i), a.name(j), a.name(k))
    }

    fn err(&self, (i, j, k): Slot, why: &str) -> DeformError {
        let a = self.base;
        DeformError::Pin(a.name(i).into(), a.name(j).into(), a.name(k).into(), why.into())
    }

    fn conj_slot(&self, (i, j, k): Slot) -> (Slot, Scalar) {
        let b = self.base.basis();
        let (ci, cj, ck) = (b[i].conj, b[j].conj, b[k].conj);
        let one = Scalar::one(self.m());
        if ci < cj {
            ((ci, cj, ck), one)
        } else {
            ((cj, ci, ck), -one)
        }
    }

    fn weight_ok(&self, (i, j, k): Slot) -> bool {
        match &self.weights {
            Some(w) => &w[i] + &w[j] == w[k],
            None => true,
        }
    }

    fn excess(&self, (i, j, k): Slot) -> i32 {
        self.base.degree(k) - self.base.degree(i) - self.base.degree(j)
    }

    fn set(&mut self, slot: Slot, v: Poly) -> Result<(), DeformError> {
        let (cs, sign) = self.conj_slot(slot);
        let cv = v.map_scalars(|c| c.conj()).scale(&sign);
        if cs == slot && cv != v {
            return Err(self.err(slot, "value is not compatible with conjugation"));
        }
        for (s, val) in [(slot, v), (cs, cv)] {
            match self.values.get(&s) {
                Some(old) if *old != val => return Err(self.err(s, "pinned twice with different values")),
                Some(_) => {}
                None => {
                    self.values.insert(s, val);
                }
            }
        }
        Ok(())
    }

    fn new_var(&mut self, name: String) -> Poly {
        self.variables.push(name);
        Poly::var(self.m(), self.variables.len() - 1)
    }

    fn free(&mut self, slot: Slot) -> Result<(), DeformError> {
        if self.values.contains_key(&slot) {
            // already determined as the conjugate of another free component
            return Ok(());
        }
        let m = self.m();
        let (cs, sign) = self.conj_slot(slot);
        let name = self.slot_name(slot);
        let v = if cs == slot {
            let a = self.new_var(name);
            if sign.is_one() {
                a
            } else {
                a.scale(&Scalar::i(m))
            }
        } else {
            let a = self.new_var(format!("re{name}"));
            let b = self.new_var(format!("im{name}"));
            a.add(&b.scale(&Scalar::i(m)))
        };
        self.set(slot, v)
    }

    fn free_real(&mut self, slot: Slot, factor: &Scalar) -> Result<(), DeformError> {
        if self.values.contains_key(&slot) {
            return Err(self.err(slot, "real multiple of an already determined component"));
        }
        let (cs, sign) = self.conj_slot(slot);
        if cs == slot && factor.conj().scale(&sign.constant_value().unwrap()) != *factor {
            return Err(self.err(slot, "real multiple is not compatible with conjugation"));
        }
        let name = self.slot_name(slot);
        let a = self.new_var(name);
        self.set(slot, a.scale(factor))
    }
}

/// Assemble the deformation unknowns for `base`.
pub fn build_deformation(
    base: &LieAlgebra,
    policy: UnknownPolicy,
    pinned: &[PinnedRelation],
    graded_by: Option<usize>,
) -> Result<DeformationSystem, DeformError> {
    let n = base.dim();
    let m = base.m();
    let weights = graded_by.map(|s| {
        let ad = base.ad_matrix(&base.e(s)).expect("valid element");
        (0..n).map(|i| ad[i][i].clone()).collect::<Vec<_>>()
    });
    let mut b = Builder { base, values: BTreeMap::new(), variables: Vec::new(), weights };
    let zero = Poly::zero(m);
    // the grading element acts with its graded eigenvalues
    if let Some(s) = graded_by {
        for x in (0..n).filter(|&x| x != s) {
            let (i, j) = (s.min(x), s.max(x));
            for k in 0..n {
                if b.excess((i, j, k)) > 0 {
                    b.set((i, j, k), zero.clone())?;
                }
            }
        }
    }
    for pin in pinned {
        let (i, j) = (pin.x.min(pin.y), pin.x.max(pin.y));
        if i == j {
            return Err(DeformError::Input(format!("pinned bracket of {} with itself", base.name(i))));
        }
        let flip = if pin.x < pin.y { Scalar::one(m) } else { -Scalar::one(m) };
        let mut listed: BTreeMap<usize, &PinValue> = BTreeMap::new();
        for (k, v) in &pin.terms {
            if listed.insert(*k, v).is_some() {
                return Err(b.err((i, j, *k), "component listed twice"));
            }
        }
        let graded = base.bracket_basis(i, j);
        for k in 0..n {
            let slot = (i, j, k);
            let exc = b.excess(slot);
            let given = listed.get(&k).copied();
            if pin.mode == PinMode::ModNonneg && base.degree(k) >= 0 && given.is_none() {
                continue;
            }
            match (exc, given) {
                (e, None) if e < 0 => {}
                (e, Some(PinValue::Fixed(c))) if e < 0 && c.is_zero() => {}
                (e, Some(_)) if e < 0 => return Err(b.err(slot, "component of negative filtration excess")),
                (0, None) if graded[k].is_zero() => {}
                (0, Some(PinValue::Fixed(c))) if (c * &flip) == graded[k] => {}
                (0, _) => return Err(b.err(slot, "disagrees with the graded bracket")),
                (_, None) => b.set(slot, zero.clone())?,
                (_, Some(PinValue::Fixed(c))) => {
                    if !c.is_zero() && !b.weight_ok(slot) {
                        return Err(b.err(slot, "violates the grading by S"));
                    }
                    b.set(slot, Poly::constant(c * &flip))?
                }
                (_, Some(_)) if !b.weight_ok(slot) => b.set(slot, zero.clone())?,
                (_, Some(PinValue::Free)) => b.free(slot)?,
                (_, Some(PinValue::FreeReal(f))) => b.free_real(slot, &(f * &flip))?,
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let slot = (i, j, k);
                if b.excess(slot) <= 0 || b.values.contains_key(&slot) {
                    continue;
                }
                if policy == UnknownPolicy::None || !b.weight_ok(slot) {
                    b.set(slot, zero.clone())?;
                } else {
                    b.free(slot)?;
                }
            }
        }
    }
    let mut brackets: BTreeMap<(usize, usize), BTreeMap<usize, Poly>> = BTreeMap::new();
    for (&(i, j), terms) in base.table() {
        for (k, c) in terms {
            brackets.entry((i, j)).or_default().insert(*k, Poly::constant(c.clone()));
        }
    }
    let mut unknowns = Vec::new();
    for (&slot, v) in &b.values {
        if v.is_zero() {
            continue;
        }
        let (i, j, k) = slot;
        brackets.entry((i, j)).or_default().insert(k, v.clone());
        if !v.is_constant() {
            unknowns.push(DeformationUnknown { name: b.slot_name(slot), slot, excess: b.excess(slot), value: v.clone() });
        }
    }
    Ok(DeformationSystem {
        base: base.clone(),
        unknowns,
        variables: b.variables,
        pinned: pinned.to_vec(),
        graded_by,
        brackets,
    })
}

/// One component of one Jacobi identity.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiEquation {
    pub triple: [usize; 3],
    pub component: usize,
    pub poly: Poly,
}

impl DeformationSystem {
    pub fn m(&self) -> usize {
        self.base.m()
    }

    /// Deformed `[e_i, e_j]` as a sparse vector of polynomials.
    pub fn bracket(&self, i: usize, j: usize) -> BTreeMap<usize, Poly> {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => BTreeMap::new(),
            Less => self.brackets.get(&(i, j)).cloned().unwrap_or_default(),
            Greater => self.bracket(j, i).into_iter().map(|(k, p)| (k, p.neg())).collect(),
        }
    }

    fn bracket_with(&self, v: &BTreeMap<usize, Poly>, k: usize) -> BTreeMap<usize, Poly> {
        let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
        for (z, p) in v {
            for (w, q) in self.bracket(*z, k) {
                let e = out.entry(w).or_insert_with(|| Poly::zero(self.m()));
                *e = e.add(&p.mul(&q));
            }
        }
        out
    }

    pub fn format_poly(&self, p: &Poly) -> String {
        p.format(&self.variables)
    }

    /// Every variable appearing in `[S, x]`; empty when the grading
    /// element acts exactly by its graded eigenvalues.
    pub fn graded_bracket_variables(&self) -> Vec<usize> {
        let Some(s) = self.graded_by else { return vec![] };
        let mut out: Vec<usize> = (0..self.base.dim())
            .flat_map(|x| self.bracket(s, x).into_values().flat_map(|p| p.vars()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// The nonzero components of all Jacobi identities.
pub fn jacobi_system(ds: &DeformationSystem) -> Vec<JacobiEquation> {
    let n = ds.base.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut acc: BTreeMap<usize, Poly> = BTreeMap::new();
                for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                    for (w, p) in ds.bracket_with(&ds.bracket(a, b), c) {
                        let e = acc.entry(w).or_insert_with(|| Poly::zero(ds.m()));
                        *e = e.add(&p);
                    }
                }
                for (w, p) in acc {
                    if !p.is_zero() {
                        out.push(JacobiEquation { triple: [i, j, k], component: w, poly: p });
                    }
                }
            }
        }
    }
    out
}

/// Where an equation in the working set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Index into the original equation list.
    Original(usize),
    /// Introduced by the step with this index (a `coefficient = 0` branch).
    Assumption(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// `var := expr`, solved from the equation at `equation`.
    Substitute { var: usize, expr: Poly, equation: usize },
    /// Branch on `den ≠ 0` and substitute `var := num/den` fraction-free.
    SplitNonzero { var: usize, num: Poly, den: Scalar, equation: usize },
    /// Branch on `coefficient = 0`, added as an equation.
    SplitZero { coefficient: Scalar },
    /// `u_unit := value·Π u^exps`, solved from a constant equation.
    UnitSubstitute { unit: usize, value: Gauss, exps: Vec<i32>, equation: usize },
    /// Move a constant equation with no usable solution to the residual.
    SetAside { equation: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// The equation reduces to a nonzero constant.
    NonzeroConstant,
    /// The equation reduces to `a·u^α + b·u^β` with `|b/a| ≠ 1`, impossible
    /// for unimodular units.
    UnitModulus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub source: Source,
    pub kind: CertificateKind,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Terminal {
    Inconsistent(Certificate),
    Residual(Vec<Poly>),
    Consistent,
}

impl Terminal {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Terminal::Inconsistent(_) => VerdictKind::Inconsistent,
            Terminal::Residual(_) => VerdictKind::Residual,
            Terminal::Consistent => VerdictKind::Consistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum VerdictKind {
    Inconsistent,
    Consistent,
    Residual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub assumptions: Vec<String>,
    pub steps: Vec<Step>,
    pub terminal: Terminal,
    /// Stopped because the equations outgrew [`MAX_TERMS`].
    pub exhausted: bool,
}

#[derive(Debug, Clone)]
pub struct Elimination {
    pub verdict: VerdictKind,
    pub branches: Vec<Branch>,
    pub equations: Vec<Poly>,
}

#[derive(Debug, Clone)]
struct State {
    eqs: Vec<Poly>,
    sources: Vec<Source>,
    aside: Vec<Poly>,
}

impl State {
    fn new(eqs: &[Poly]) -> Self {
        let mut s = State {
            eqs: eqs.to_vec(),
            sources: (0..eqs.len()).map(Source::Original).collect(),
            aside: Vec::new(),
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let mut seen = HashSet::new();
        let mut eqs = Vec::new();
        let mut sources = Vec::new();
        for (p, s) in self.eqs.drain(..).zip(self.sources.drain(..)) {
            if p.is_zero() {
                continue;
            }
            let p = p.monic();
            if seen.insert(format!("{p:?}")) {
                eqs.push(p);
                sources.push(s);
            }
        }
        self.eqs = eqs;
        self.sources = sources;
    }

    fn map(&mut self, f: impl Fn(&Poly) -> Poly) {
        self.eqs = self.eqs.iter().map(&f).collect();
        self.aside = self.aside.iter().map(&f).filter(|p| !p.is_zero()).collect();
        self.normalize();
    }
}

/// `a·u^α + b·u^β` as `u^{α−β} = −b/a`.
fn binomial(c: &Scalar) -> Option<(Vec<i32>, Gauss)> {
    let terms: Vec<_> = c.terms().collect();
    let [(ea, a), (eb, b)] = terms[..] else { return None };
    let d: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x - y).collect();
    Some((d, b.neg().mul(&a.inv().expect("nonzero"))))
}

fn modulus_violated(c: &Scalar) -> bool {
    binomial(c).is_some_and(|(_, r)| !r.norm_sq().is_one())
}

fn is_contradiction(p: &Poly) -> Option<CertificateKind> {
    let c = p.constant_value()?;
    if c.is_zero() {
        None
    } else if c.is_unit() {
        Some(CertificateKind::NonzeroConstant)
    } else if modulus_violated(&c) {
        Some(CertificateKind::UnitModulus)
    } else {
        None
    }
}

fn terminal_now(st: &State) -> Option<Terminal> {
    for (p, s) in st.eqs.iter().zip(&st.sources) {
        if let Some(kind) = is_contradiction(p) {
            return Some(Terminal::Inconsistent(Certificate { source: *s, kind, value: p.to_string() }));
        }
    }
    None
}

enum Choice {
    Step(Step),
    Split { var: usize, equation: usize, coefficient: Scalar },
}

fn linear_coefficient(p: &Poly, v: usize) -> Option<(Scalar, Poly)> {
    if p.degree_in(v) != 1 {
        return None;
    }
    let mut cs = p.coefficients_in(v);
    let c = cs[1].constant_value()?;
    Some((c, cs.swap_remove(0)))
}

fn choose(st: &State) -> Option<Choice> {
    for (idx, p) in st.eqs.iter().enumerate() {
        let Some(c) = p.constant_value() else { continue };
        if let Some((d, r)) = binomial(&c) {
            if let Some(j) = d.iter().position(|e| e.abs() == 1) {
                // u^d = r  ⇒  u_j = r^{±1} Π_{l≠j} u_l^{∓d_l}
                let s = d[j];
                let value = if s == 1 { r } else { r.inv().expect("unit modulus") };
                let exps = d.iter().enumerate().map(|(l, e)| if l == j { 0 } else { -e * s }).collect();
                return Some(Choice::Step(Step::UnitSubstitute { unit: j, value, exps, equation: idx }));
            }
        }
        return Some(Choice::Step(Step::SetAside { equation: idx }));
    }
    // unit coefficients first, then fewest unknowns, lowest variable, lowest equation
    let mut best: Option<((bool, usize, usize, usize), Scalar)> = None;
    for (idx, p) in st.eqs.iter().enumerate() {
        let vars = p.vars();
        for &v in &vars {
            let Some((c, _)) = linear_coefficient(p, v) else { continue };
            let key = (!c.is_unit(), vars.len(), v, idx);
            if best.as_ref().is_none_or(|(b, _)| key < *b) {
                best = Some((key, c));
            }
        }
    }
    let ((split, _, var, equation), c) = best?;
    if !split {
        let (_, rest) = linear_coefficient(&st.eqs[equation], var).expect("linear");
        let expr = rest.scale(&-c.inv_unit().expect("unit"));
        return Some(Choice::Step(Step::Substitute { var, expr, equation }));
    }
    Some(Choice::Split { var, equation, coefficient: c })
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ReplayError {
    #[error("step {0} does not apply to the current equations")]
    Invalid(usize),
    #[error("replayed terminal status differs")]
    Mismatch,
}

fn apply(st: &mut State, step: &Step, at: usize) -> Result<(), ReplayError> {
    let bad = ReplayError::Invalid(at);
    match step {
        Step::Substitute { var, expr, equation } => {
            let p = st.eqs.get(*equation).ok_or(bad.clone())?;
            let (c, rest) = linear_coefficient(p, *var).ok_or(bad.clone())?;
            let inv = c.inv_unit().ok_or(bad.clone())?;
            if rest.scale(&-inv) != *expr {
                return Err(bad);
            }
            st.map(|q| q.substitute(*var, expr));
        }
        Step::SplitNonzero { var, num, den, equation } => {
            let p = st.eqs.get(*equation).ok_or(bad.clone())?;
            let (c, rest) = linear_coefficient(p, *var).ok_or(bad.clone())?;
            if c != *den || rest.neg() != *num {
                return Err(bad);
            }
            st.map(|q| q.substitute_fraction(*var, num, den));
        }
        Step::SplitZero { coefficient } => {
            st.eqs.push(Poly::constant(coefficient.clone()));
            st.sources.push(Source::Assumption(at));
            st.normalize();
        }
        Step::UnitSubstitute { unit, value, exps, equation } => {
            let c = st.eqs.get(*equation).and_then(|p| p.constant_value()).ok_or(bad.clone())?;
            let sub = c.substitute_unit(*unit, value, exps);
            if !sub.is_zero() {
                return Err(bad);
            }
            st.map(|q| q.map_scalars(|s| s.substitute_unit(*unit, value, exps)));
        }
        Step::SetAside { equation } => {
            if *equation >= st.eqs.len() || !st.eqs[*equation].is_constant() {
                return Err(bad);
            }
            st.aside.push(st.eqs.remove(*equation));
            st.sources.remove(*equation);
        }
    }
    Ok(())
}

fn finish(st: &State) -> Option<Terminal> {
    if let Some(t) = terminal_now(st) {
        return Some(t);
    }
    match choose(st) {
        Some(_) => None,
        None if st.eqs.is_empty() && st.aside.is_empty() => Some(Terminal::Consistent),
        None => Some(Terminal::Residual(st.aside.iter().chain(&st.eqs).cloned().collect())),
    }
}

/// Maximum nesting of case splits before a branch is left as residual.
pub const MAX_SPLITS: usize = 8;

/// Total number of terms in the working equations beyond which a branch
/// stops with a residual verdict.
pub const MAX_TERMS: usize = 40_000;

fn residual(st: &State) -> Terminal {
    Terminal::Residual(st.aside.iter().chain(&st.eqs).cloned().collect())
}

fn too_large(st: &State) -> bool {
    st.eqs.iter().map(Poly::num_terms).sum::<usize>() > MAX_TERMS
}

/// Eliminate the Jacobi system of `ds`.
pub fn eliminate(ds: &DeformationSystem) -> Elimination {
    let eqs: Vec<Poly> = jacobi_system(ds).into_iter().map(|e| e.poly).collect();
    eliminate_equations(&eqs)
}

pub fn eliminate_equations(eqs: &[Poly]) -> Elimination {
    eliminate_streaming(eqs, |_| {})
}

/// As [`eliminate_equations`], calling `on_branch` as each branch terminates.
pub fn eliminate_streaming(eqs: &[Poly], mut on_branch: impl FnMut(&Branch)) -> Elimination {
    let mut branches: Vec<Branch> = Vec::new();
    let mut push = |b: Branch, branches: &mut Vec<Branch>| {
        on_branch(&b);
        branches.push(b);
    };
    let mut stack = vec![(State::new(eqs), Vec::new(), Vec::new(), 0usize)];
    while let Some((mut st, mut steps, assumptions, depth)) = stack.pop() {
        loop {
            if let Some(t) = terminal_now(&st) {
                push(Branch { assumptions, steps, terminal: t, exhausted: false }, &mut branches);
                break;
            }
            if too_large(&st) {
                push(Branch { assumptions, steps, terminal: residual(&st), exhausted: true }, &mut branches);
                break;
            }
            match choose(&st) {
                Some(Choice::Step(step)) => {
                    apply(&mut st, &step, steps.len()).expect("chosen step applies");
                    steps.push(step);
                }
                Some(Choice::Split { var, equation, coefficient }) if depth < MAX_SPLITS => {
                    let (_, rest) = linear_coefficient(&st.eqs[equation], var).expect("linear");
                    let nz = Step::SplitNonzero { var, num: rest.neg(), den: coefficient.clone(), equation };
                    let z = Step::SplitZero { coefficient: coefficient.clone() };
                    for (step, note) in [(z, format!("{coefficient} = 0")), (nz, format!("{coefficient} != 0"))] {
                        let mut st2 = st.clone();
                        let mut steps2 = steps.clone();
                        apply(&mut st2, &step, steps2.len()).expect("split applies");
                        steps2.push(step);
                        let mut a2 = assumptions.clone();
                        a2.push(note);
                        stack.push((st2, steps2, a2, depth + 1));
                    }
                    break;
                }
                _ => {
                    let t = finish(&st).unwrap_or_else(|| residual(&st));
                    push(Branch { assumptions, steps, terminal: t, exhausted: false }, &mut branches);
                    break;
                }
            }
        }
    }
    let verdict = branches.iter().map(|b| b.terminal.kind()).max().unwrap_or(VerdictKind::Consistent);
    Elimination { verdict, branches, equations: eqs.to_vec() }
}

/// Re-run a branch's steps on the original equations and compare the
/// terminal status.
pub fn replay(eqs: &[Poly], branch: &Branch) -> Result<(), ReplayError> {
    let mut st = State::new(eqs);
    for (i, step) in branch.steps.iter().enumerate() {
        apply(&mut st, step, i)?;
    }
    let t = match terminal_now(&st) {
        Some(t) => t,
        None if branch.exhausted && too_large(&st) => residual(&st),
        None => match choose(&st) {
            Some(Choice::Split { .. }) => residual(&st),
            _ => finish(&st).ok_or(ReplayError::Mismatch)?,
        },
    };
    if t == branch.terminal {
        Ok(())
    } else {
        Err(ReplayError::Mismatch)
    }
}

/// Push the certificate's source equation through the step transforms
/// alone and confirm it ends as an impossible constant.
pub fn check_certificate(eqs: &[Poly], branch: &Branch) -> bool {
    let Terminal::Inconsistent(cert) = &branch.terminal else { return false };
    let (mut p, start) = match cert.source {
        Source::Original(i) => match eqs.get(i) {
            Some(p) => (p.clone(), 0),
            None => return false,
        },
        Source::Assumption(k) => match branch.steps.get(k) {
            Some(Step::SplitZero { coefficient }) => (Poly::constant(coefficient.clone()), k + 1),
            _ => return false,
        },
    };
    for step in &branch.steps[start..] {
        p = match step {
            Step::Substitute { var, expr, .. } => p.substitute(*var, expr),
            Step::SplitNonzero { var, num, den, .. } => p.substitute_fraction(*var, num, den),
            Step::UnitSubstitute { unit, value, exps, .. } => p.map_scalars(|s| s.substitute_unit(*unit, value, exps)),
            Step::SplitZero { .. } | Step::SetAside { .. } => p,
        };
    }
    is_contradiction(&p) == Some(cert.kind)
}

/// Extend an assignment of the variables left free by a branch (and of the
/// units) to all variables by back-substitution. Returns `None` when a
/// split denominator vanishes at the point.
pub fn back_substitute(branch: &Branch, vars: &mut [Gauss], units: &mut [Gauss]) -> Option<()> {
    for step in branch.steps.iter().rev() {
        match step {
            Step::Substitute { var, expr, .. } => vars[*var] = expr.eval(vars, units),
            Step::SplitNonzero { var, num, den, .. } => {
                let d = eval_scalar(den, units);
                vars[*var] = num.eval(vars, units).mul(&d.inv()?);
            }
            Step::UnitSubstitute { unit, value, exps, .. } => {
                let mut v = value.clone();
                for (l, e) in exps.iter().enumerate() {
                    let b = if *e < 0 { units[l].inv()? } else { units[l].clone() };
                    for _ in 0..e.unsigned_abs() {
                        v = v.mul(&b);
                    }
                }
                units[*unit] = v;
            }
            Step::SplitZero { .. } | Step::SetAside { .. } => {}
        }
    }
    Some(())
}

impl Step {
    pub fn describe(&self, names: &[String]) -> String {
        match self {
            Step::Substitute { var, expr, equation } => {
                format!("substitute {} := {} (from equation #{equation})", names[*var], expr.format(names))
            }
            Step::SplitNonzero { var, num, den, equation } => format!(
                "case {den} != 0: substitute {} := ({}) / ({den}) (from equation #{equation})",
                names[*var],
                num.format(names)
            ),
            Step::SplitZero { coefficient } => format!("case {coefficient} = 0"),
            Step::UnitSubstitute { unit, value, exps, equation } => {
                let rest = Scalar::monomial(exps.len(), value.clone(), exps.clone());
                format!("solve unit u{} := {rest} (from equation #{equation})", unit + 1)
            }
            Step::SetAside { equation } => format!("keep constant equation #{equation} as a residual constraint"),
        }
    }
}

// ---------------------------------------------------------------- input --

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinTermJson {
    pub z: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_real: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinJson {
    pub x: String,
    pub y: String,
    pub mode: PinMode,
    pub terms: Vec<PinTermJson>,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnknownsJson {
    pub policy: UnknownPolicy,
}

/// The `deform.v1` document: a `liealg.v1` base plus deformation data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformJson {
    #[serde(flatten)]
    pub base: LieAlgJson,
    pub unknowns: UnknownsJson,
    #[serde(default)]
    pub pinned: Vec<PinJson>,
    #[serde(default)]
    pub graded_by: Option<String>,
}

/// A parsed deformation problem.
#[derive(Debug, Clone)]
pub struct DeformCase {
    pub name: String,
    pub base: LieAlgebra,
    pub policy: UnknownPolicy,
    pub pinned: Vec<PinnedRelation>,
    pub graded_by: Option<usize>,
    pub expect: Option<serde_json::Value>,
}

impl DeformCase {
    pub fn from_json(j: &DeformJson) -> Result<Self, DeformError> {
        let base = LieAlgebra::from_json(&j.base)?;
        let m = base.m();
        let mut pinned = Vec::new();
        for p in &j.pinned {
            let mut terms = Vec::new();
            for t in &p.terms {
                let v = match (&t.c, t.free, &t.free_real) {
                    (Some(c), None, None) => PinValue::Fixed(Scalar::parse(c, m)?),
                    (None, Some(true), None) => PinValue::Free,
                    (None, None, Some(f)) => PinValue::FreeReal(Scalar::parse(f, m)?),
                    _ => return Err(DeformError::Input(format!("term {:?} of [{},{}]", t.z, p.x, p.y))),
                };
                terms.push((base.index(&t.z)?, v));
            }
            pinned.push(PinnedRelation {
                x: base.index(&p.x)?,
                y: base.index(&p.y)?,
                mode: p.mode,
                terms,
                provenance: p.provenance.clone(),
            });
        }
        let graded_by = j.graded_by.as_deref().map(|s| base.index(s)).transpose()?;
        Ok(DeformCase {
            name: j.base.name.clone().unwrap_or_default(),
            base,
            policy: j.unknowns.policy,
            pinned,
            graded_by,
            expect: j.base.expect.clone(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DeformError> {
        let text = std::fs::read_to_string(path).map_err(LieError::from)?;
        let j: DeformJson = serde_json::from_str(&text).map_err(LieError::from)?;
        Self::from_json(&j)
    }

    pub fn system(&self) -> Result<DeformationSystem, DeformError> {
        build_deformation(&self.base, self.policy, &self.pinned, self.graded_by)
    }

    pub fn expected_verdict(&self) -> Option<String> {
        self.expect.as_ref()?.get("verdict")?.as_str().map(String::from)
    }

    /// Verdict with each pinned relation dropped in turn.
    pub fn sensitivity(&self) -> Result<Vec<PinSensitivity>, DeformError> {
        use rayon::prelude::*;
        (0..self.pinned.len())
            .into_par_iter()
            .map(|i| {
                let mut pins = self.pinned.clone();
                let dropped = pins.remove(i);
                let ds = build_deformation(&self.base, self.policy, &pins, self.graded_by)?;
                Ok(PinSensitivity {
                    bracket: format!("[{},{}]", self.base.name(dropped.x), self.base.name(dropped.y)),
                    provenance: dropped.provenance,
                    verdict_without: eliminate(&ds).verdict,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinSensitivity {
    pub bracket: String,
    pub provenance: String,
    pub verdict_without: VerdictKind,
}

// --------------------------------------------------------------- report --

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    pub assumptions: Vec<String>,
    pub status: VerdictKind,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residual: Vec<String>,
    pub replay_ok: bool,
    pub certificate_ok: bool,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformReport {
    pub name: String,
    pub verdict: VerdictKind,
    pub unknowns: usize,
    pub variables: usize,
    pub equations: usize,
    pub branches: Vec<BranchReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sensitivity: Vec<PinSensitivity>,
}

impl DeformReport {
    pub fn new(case: &DeformCase, ds: &DeformationSystem, el: &Elimination) -> Self {
        let branches = el
            .branches
            .iter()
            .map(|b| {
                let (certificate, residual) = match &b.terminal {
                    Terminal::Inconsistent(c) => (Some(c.clone()), vec![]),
                    Terminal::Residual(r) => (None, r.iter().map(|p| ds.format_poly(p)).collect()),
                    Terminal::Consistent => (None, vec![]),
                };
                BranchReport {
                    assumptions: b.assumptions.clone(),
                    status: b.terminal.kind(),
                    steps: b.steps.len(),
                    certificate_ok: certificate.is_some() && check_certificate(&el.equations, b),
                    certificate,
                    residual,
                    replay_ok: replay(&el.equations, b).is_ok(),
                    budget_exhausted: b.exhausted,
                }
            })
            .collect();
        DeformReport {
            name: case.name.clone(),
            verdict: el.verdict,
            unknowns: ds.unknowns.len(),
            variables: ds.variables.len(),
            equations: el.equations.len(),
            branches,
            expected: case.expected_verdict(),
            sensitivity: Vec::new(),
        }
    }

    /// Human-readable trace.
    pub fn trace_text(ds: &DeformationSystem, el: &Elimination) -> String {
        el.branches.iter().enumerate().map(|(bi, b)| branch_text(ds, bi, b)).collect()
    }
}

/// Human-readable trace of one branch.
pub fn branch_text(ds: &DeformationSystem, index: usize, b: &Branch) -> String {
    let mut out = format!("branch {index}");
    if !b.assumptions.is_empty() {
        out.push_str(&format!(" [{}]", b.assumptions.join(", ")));
    }
    out.push('\n');
    for (i, s) in b.steps.iter().enumerate() {
        out.push_str(&format!("  {i:4}  {}\n", s.describe(&ds.variables)));
    }
    match &b.terminal {
        Terminal::Inconsistent(c) => out.push_str(&format!("  => inconsistent: {} = 0 ({:?}, from {:?})\n", c.value, c.kind, c.source)),
        Terminal::Residual(r) => {
            out.push_str(if b.exhausted { "  => residual (term budget exhausted):\n" } else { "  => residual:\n" });
            for p in r {
                out.push_str(&format!("       {} = 0\n", ds.format_poly(p)));
            }
        }
        Terminal::Consistent => out.push_str("  => consistent\n"),
    }
    out
}

// ------------------------------------------------------------ soundness --

/// Variables never assigned by a branch.
pub fn free_variables(branch: &Branch, nvars: usize) -> Vec<usize> {
    let bound: std::collections::BTreeSet<usize> = branch
        .steps
        .iter()
        .filter_map(|s| match s {
            Step::Substitute { var, .. } | Step::SplitNonzero { var, .. } => Some(*var),
            _ => None,
        })
        .collect();
    (0..nvars).filter(|v| !bound.contains(v)).collect()
}

/// Unimodular Gaussian rationals from Pythagorean triples.
fn unimodular(k: usize) -> Gauss {
    let triples = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29)];
    let (a, b, c) = triples[k % triples.len()];
    let (a, b) = if k / triples.len() % 2 == 0 { (a, b) } else { (b, -a) };
    Gauss::new(crate::scalars::rat(a, c), crate::scalars::rat(b, c))
}

/// Soundness samples drawn from one branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub accepted: usize,
    pub attempts: usize,
    /// Original equations violated by an accepted sample.
    pub violations: Vec<String>,
}

/// Draw small integer values for the free variables of each non-inconsistent
/// branch and unimodular values for the units, keep points satisfying the
/// residual and the split assumptions, extend them by back-substitution and
/// evaluate every original equation. Up to `want` samples per branch.
pub fn sample_soundness(el: &Elimination, nvars: usize, nunits: usize, want: usize, seed: u64) -> SoundnessReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut rep = SoundnessReport { accepted: 0, attempts: 0, violations: Vec::new() };
    for b in el.branches.iter().filter(|b| !matches!(b.terminal, Terminal::Inconsistent(_))) {
        let residual: &[Poly] = match &b.terminal {
            Terminal::Residual(r) => r,
            _ => &[],
        };
        let assumptions: Vec<&Scalar> = b
            .steps
            .iter()
            .filter_map(|s| match s {
                Step::SplitZero { coefficient } => Some(coefficient),
                _ => None,
            })
            .collect();
        let free = free_variables(b, nvars);
        let mut got = 0;
        for _ in 0..50 * want {
            if got == want {
                break;
            }
            rep.attempts += 1;
            let mut vars = vec![Gauss::zero(); nvars];
            for &v in &free {
                vars[v] = Gauss::from_int(rng.gen_range(-2..=2));
            }
            let mut units: Vec<Gauss> = (0..nunits).map(|_| unimodular(rng.gen_range(0..10))).collect();
            if residual.iter().any(|p| !p.eval(&vars, &units).is_zero()) {
                continue;
            }
            if back_substitute(b, &mut vars, &mut units).is_none() {
                continue;
            }
            if assumptions.iter().any(|c| !eval_scalar(c, &units).is_zero()) {
                continue;
            }
            for p in &el.equations {
                if !p.eval(&vars, &units).is_zero() {
                    rep.violations.push(format!("{:?}: {p}", b.assumptions));
                }
            }
            got += 1;
        }
        rep.accepted += got;
    }
    rep
}
