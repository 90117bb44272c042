//! Curves in R⁴, Wronskian nondegeneracy and the Jordan-block test.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::field::{det, Matrix};
use super::func::{Affine, Chart, CoordFunction, GenPoly, ParamPoly, NPARAM};
use crate::linalg::echelon;
use crate::scalars::{Gauss, Scalar};

type F = CoordFunction;

/// Strict constraint on the curve parameters: `expr > 0` or `expr ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Positive(Affine),
    NonZero(Affine),
}

impl Constraint {
    pub fn holds(&self, p: &[BigRational; NPARAM]) -> bool {
        match self {
            Constraint::Positive(a) => a.eval(p).is_positive(),
            Constraint::NonZero(a) => !a.eval(p).is_zero(),
        }
    }
    pub fn describe(&self) -> String {
        match self {
            Constraint::Positive(a) => format!("{a} > 0"),
            Constraint::NonZero(a) => format!("{a} ≠ 0"),
        }
    }
}

/// Declared domain: the sign of the curve variable and parameter constraints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Domain {
    pub t_positive: bool,
    pub params: Vec<Constraint>,
}

impl Domain {
    pub fn admits(&self, p: &[BigRational; NPARAM]) -> bool {
        self.params.iter().all(|c| c.holds(p))
    }
    pub fn describe(&self, tname: &str) -> Vec<String> {
        let mut out = Vec::new();
        if self.t_positive {
            out.push(format!("{tname} > 0"));
        }
        out.extend(self.params.iter().map(Constraint::describe));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    /// One-coordinate chart holding the curve variable.
    pub chart: Chart,
    pub comps: [F; 4],
    pub domain: Domain,
    pub segre: Option<String>,
}

impl Curve {
    pub fn new(name: &str, var: &str, comps: [F; 4], domain: Domain) -> Self {
        Curve { name: name.into(), chart: Chart::new(&[var], Some(0)), comps, domain, segre: None }
    }
    pub fn var(&self) -> &str {
        &self.chart.names[0]
    }
    /// `γ^{(k)}`.
    pub fn derivative(&self, k: usize) -> [F; 4] {
        let mut g = self.comps.clone();
        for _ in 0..k {
            g = g.map(|c| c.d(&self.chart, 0));
        }
        g
    }
    pub fn specialize(&self, p: &[BigRational; NPARAM]) -> Curve {
        Curve { comps: self.comps.clone().map(|c| c.specialize(p)), domain: Domain { params: vec![], ..self.domain.clone() }, ..self.clone() }
    }
    /// Parameters the components depend on.
    pub fn params(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for c in &self.comps {
            for (g, p) in c.numerator().terms() {
                out.extend(p.params());
                for a in [&g.tpow, &g.exp_re, &g.exp_im] {
                    out.extend((0..NPARAM).filter(|&j| !a.0[j + 1].is_zero()));
                }
            }
        }
        out
    }
}

/// `det[γ, γ', γ'', γ''']`.
pub fn wronskian4(c: &Curve) -> F {
    let m: Matrix = (0..4).map(|k| c.derivative(k).to_vec()).collect();
    det(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    True,
    False,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct Nondegeneracy {
    pub decision: Decision,
    /// Wronskian in canonical form.
    pub wronskian: String,
    /// Factors of the parameter coefficient, as extracted.
    pub factors: Vec<String>,
    /// Where the Wronskian vanishes inside the declared domain, or the
    /// reason no decision was reached.
    pub locus: Vec<String>,
}

impl Nondegeneracy {
    pub fn is_true(&self) -> bool {
        self.decision == Decision::True
    }
}

pub fn curve_nondegenerate(c: &Curve) -> Nondegeneracy {
    let w = wronskian4(c);
    let mut out = Nondegeneracy { decision: Decision::True, wronskian: w.format(&c.chart), factors: vec![], locus: vec![] };
    if w.is_zero() {
        out.decision = Decision::False;
        out.locus.push("identically zero".into());
        return out;
    }
    let tn = c.var().to_string();
    let num = w.numerator();
    if let Some((g, p)) = num.single() {
        if g.ln > 0 {
            out.decision = Decision::False;
            out.locus.push(format!("{tn} = 1"));
        }
        if !g.pows.is_empty() {
            out.decision = Decision::Undecided;
            out.locus.push("unexpected coordinate factor".into());
        }
        if !c.domain.t_positive && (!g.tpow.is_zero() || g.ln > 0) {
            if g.tpow.is_constant() && g.tpow.0[0].is_integer() && !g.tpow.0[0].is_positive() {
                // t^{-k}: nonzero where defined.
            } else {
                out.decision = Decision::False;
                out.locus.push(format!("{tn} = 0"));
            }
        }
        analyze_coefficient(c, p, &mut out);
        return out;
    }
    match univariate(num) {
        Some(poly) => {
            let (lo, hi) = if c.domain.t_positive { (Some(BigRational::zero()), None) } else { (None, None) };
            let roots = count_real_roots(&poly, lo.as_ref(), hi.as_ref(), !c.domain.t_positive);
            if roots > 0 {
                out.decision = Decision::False;
                out.locus.push(format!("{roots} real root(s) of the numerator in the domain"));
            }
        }
        None => {
            out.decision = Decision::Undecided;
            out.locus.push("numerator is not a polynomial in the curve variable with constant coefficients".into());
        }
    }
    out
}

/// Exponents of the generalized monomials in the components, as complex
/// affine forms `re + i·im` (rendered as parameter polynomials).
fn exponents(c: &Curve) -> Vec<ParamPoly> {
    let mut out = vec![ParamPoly::zero()];
    for comp in &c.comps {
        for (g, _) in comp.numerator().terms() {
            out.push(g.tpow.to_poly());
            let i = ParamPoly::constant(Gauss::i());
            out.push(g.exp_re.to_poly().add(&g.exp_im.to_poly().mul(&i)));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Scale so the lex-leading coefficient is 1.
fn monic(p: &ParamPoly) -> ParamPoly {
    let lead = p.terms().last().map(|(_, c)| c.clone()).expect("nonzero");
    p.scale(&lead.inv().expect("nonzero"))
}

fn analyze_coefficient(c: &Curve, p: &ParamPoly, out: &mut Nondegeneracy) {
    let ex = exponents(c);
    let mut cands: Vec<ParamPoly> = Vec::new();
    for a in &ex {
        for b in &ex {
            for k in -3..=3 {
                let l = a.sub(b).add(&ParamPoly::from_int(k));
                if !l.is_constant() {
                    let m = monic(&l);
                    if !cands.contains(&m) {
                        cands.push(m);
                    }
                }
            }
        }
    }
    cands.sort();
    let mut rest = p.clone();
    let mut found: Vec<(ParamPoly, u32)> = Vec::new();
    for l in &cands {
        let mut e = 0;
        while let Some(q) = rest.div_exact(l) {
            rest = q;
            e += 1;
        }
        if e > 0 {
            found.push((l.clone(), e));
        }
    }
    for (l, e) in &found {
        out.factors.push(if *e == 1 { format!("({l})") } else { format!("({l})^{e}") });
    }
    if !rest.is_constant() {
        out.factors.push(format!("({rest})"));
        out.decision = Decision::Undecided;
        out.locus.push(format!("unfactored coefficient {rest}; constraints {}", c.domain.describe(c.var()).join(", ")));
        return;
    }
    out.factors.insert(0, rest.to_string());
    for (l, _) in &found {
        if linear_zero_meets(l, &c.domain.params) {
            out.decision = Decision::False;
            out.locus.push(format!("{l} = 0"));
        }
    }
}

/// Whether `{l = 0}` (l complex-affine in real parameters) meets the open
/// set cut out by the constraints.
pub fn linear_zero_meets(l: &ParamPoly, cons: &[Constraint]) -> bool {
    let (re, im) = l.re_im();
    let eqs: Vec<Affine> = [re, im].iter().filter(|p| !p.is_zero()).map(|p| Affine::from_poly(p).expect("linear factor")).collect();
    affine_zero_meets(&eqs, cons)
}

fn dot(a: &Affine, p: &[BigRational; NPARAM]) -> BigRational {
    (0..NPARAM).fold(BigRational::zero(), |acc, j| acc + &a.0[j + 1] * &p[j])
}

pub fn affine_zero_meets(eqs: &[Affine], cons: &[Constraint]) -> bool {
    let zero = || BigRational::zero();
    if eqs.iter().any(|e| e.is_constant()) {
        return false;
    }
    let point_ok = |p: &[BigRational; NPARAM]| cons.iter().all(|c| c.holds(p));
    let line = |e: &Affine| -> ([BigRational; NPARAM], [BigRational; NPARAM]) {
        let (a, b, c) = (&e.0[1], &e.0[2], &e.0[0]);
        if !b.is_zero() {
            ([zero(), -c / b], [-b.clone(), a.clone()])
        } else {
            ([-c / a, zero()], [zero(), a.clone()])
        }
    };
    let on_line = |p0: &[BigRational; NPARAM], d: &[BigRational; NPARAM]| {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for c in cons {
            match c {
                Constraint::Positive(g) => {
                    let v = g.eval(p0);
                    let s = dot(g, d);
                    if s.is_zero() {
                        if !v.is_positive() {
                            return false;
                        }
                    } else if s.is_positive() {
                        let b = -v / s;
                        lo = Some(lo.map_or(b.clone(), |x: BigRational| x.max(b)));
                    } else {
                        let b = -v / s;
                        hi = Some(hi.map_or(b.clone(), |x: BigRational| x.min(b)));
                    }
                }
                Constraint::NonZero(h) => {
                    if h.eval(p0).is_zero() && dot(h, d).is_zero() {
                        return false;
                    }
                }
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) => l < h,
            _ => true,
        }
    };
    match eqs {
        [] => true,
        [e] => {
            let (p0, d) = line(e);
            on_line(&p0, &d)
        }
        [e1, e2] => {
            let (a1, b1, c1) = (&e1.0[1], &e1.0[2], &e1.0[0]);
            let (a2, b2, c2) = (&e2.0[1], &e2.0[2], &e2.0[0]);
            let dt = a1 * b2 - a2 * b1;
            if !dt.is_zero() {
                let x = (b1 * c2 - b2 * c1) / &dt;
                let y = (a2 * c1 - a1 * c2) / &dt;
                return point_ok(&[x, y]);
            }
            let (p0, d) = line(e1);
            if e2.eval(&p0).is_zero() {
                on_line(&p0, &d)
            } else {
                false
            }
        }
        _ => unreachable!("two parameters"),
    }
}

// ------------------------------------------------------- real roots --

/// Numerator as a real polynomial in the curve variable (after clearing
/// a power of it); complex coefficients give the gcd of real and imaginary
/// parts, which has the same real roots.
fn univariate(num: &GenPoly) -> Option<Vec<BigRational>> {
    let mut pairs = Vec::new();
    for (g, p) in num.terms() {
        if !g.pows.is_empty() || g.ln > 0 || !g.exp_re.is_zero() || !g.exp_im.is_zero() || !g.tpow.is_constant() {
            return None;
        }
        let e = &g.tpow.0[0];
        if !e.is_integer() {
            return None;
        }
        let k: i64 = e.to_integer().try_into().ok()?;
        pairs.push((k, p.constant_value()?));
    }
    let min = pairs.iter().map(|(k, _)| *k).min()?;
    let deg = (pairs.iter().map(|(k, _)| *k).max()? - min) as usize;
    let mut re = vec![BigRational::zero(); deg + 1];
    let mut im = vec![BigRational::zero(); deg + 1];
    for (k, c) in pairs {
        re[(k - min) as usize] = c.re.clone();
        im[(k - min) as usize] = c.im.clone();
    }
    let (re, im) = (trim(re), trim(im));
    Some(if im.is_empty() {
        re
    } else if re.is_empty() {
        im
    } else {
        poly_gcd(re, im)
    })
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let f = r.last().unwrap() / b.last().unwrap();
        let off = r.len() - 1 - db;
        for (i, c) in b.iter().enumerate() {
            r[off + i] = &r[off + i] - &f * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn poly_gcd(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn eval_poly(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(k.into())).collect()
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let s: Vec<i8> = signs.filter(|&s| s != 0).collect();
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

fn sign_at(p: &[BigRational], x: Option<&BigRational>, plus_inf: bool) -> i8 {
    let v = match x {
        Some(x) => eval_poly(p, x),
        None => {
            let lead = p.last().cloned().unwrap_or_else(BigRational::zero);
            let odd = p.len() % 2 == 0;
            if plus_inf || !odd {
                lead
            } else {
                -lead
            }
        }
    };
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Distinct real roots of `p` in the open interval `(lo, hi)` (`None` is
/// infinite); with `include_zero`, a root at 0 counts when 0 is in range.
pub fn count_real_roots(p: &[BigRational], lo: Option<&BigRational>, hi: Option<&BigRational>, include_zero: bool) -> usize {
    let mut p = trim(p.to_vec());
    if p.is_empty() {
        return usize::MAX;
    }
    let mut zero_root = false;
    while p.len() > 1 && p[0].is_zero() {
        zero_root = true;
        p.remove(0);
    }
    let mut seq = vec![p.clone(), derivative(&p)];
    while seq.last().is_some_and(|q| q.len() > 1) {
        let n = seq.len();
        let r: Vec<BigRational> = poly_rem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    // Endpoints that are roots are excluded by nudging nothing: the domain
    // endpoints used here are 0 (cleared above) or infinite.
    let v = |x: Option<&BigRational>, plus: bool| sign_changes(seq.iter().map(|q| sign_at(q, x, plus)));
    let count = v(lo, false) - v(hi, true);
    let zero_inside = include_zero && lo.is_none_or(|l| l.is_negative()) && hi.is_none_or(|h| h.is_positive());
    count + usize::from(zero_root && zero_inside)
}

// ------------------------------------------------------------ Jordan --

#[derive(Debug, Clone, Serialize)]
pub struct JordanReport {
    /// One Jordan block per eigenvalue, i.e. `I, v, v², v³` independent.
    pub nonderogatory: bool,
    pub char_poly: Vec<String>,
}

/// Every eigenvalue of `v` has geometric multiplicity 1 exactly when the
/// minimal polynomial has degree 4.
pub fn jordan_nondegenerate(v: &[[BigRational; 4]; 4]) -> JordanReport {
    let mul = |a: &[[BigRational; 4]; 4], b: &[[BigRational; 4]; 4]| -> [[BigRational; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j])))
    };
    let id: [[BigRational; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
    let mut powers = vec![id];
    for k in 1..4 {
        let next = mul(&powers[k - 1], v);
        powers.push(next);
    }
    let rows: Vec<Vec<Scalar>> = powers.iter().map(|m| m.iter().flatten().map(|x| Scalar::from_rat(0, x.clone())).collect()).collect();
    let nonderogatory = echelon(rows, 16).rank() == 4;
    JordanReport { nonderogatory, char_poly: char_poly(v).iter().map(|c| c.to_string()).collect() }
}

/// Coefficients `c_0..c_4` of `det(x I − v)` (Faddeev–LeVerrier).
pub fn char_poly(v: &[[BigRational; 4]; 4]) -> Vec<BigRational> {
    let n = 4;
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut am: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| (0..n).fold(BigRational::zero(), |acc, l| acc + &v[i][l] * &m[l][j])).collect()).collect();
        for (i, row) in am.iter_mut().enumerate() {
            row[i] = &row[i] + &c[n - k + 1];
        }
        m = am;
        let vm: BigRational = (0..n).map(|i| (0..n).fold(BigRational::zero(), |acc, l| acc + &v[i][l] * &m[l][i])).fold(BigRational::zero(), |a, b| a + b);
        c[n - k] = -vm / BigRational::from_integer((k as i64).into());
    }
    c
}

/// Rational roots of a rational polynomial, with multiplicities.
pub fn rational_roots(p: &[BigRational]) -> Vec<(BigRational, usize)> {
    use num_integer::Integer;
    let mut p = trim(p.to_vec());
    let mut out: Vec<(BigRational, usize)> = Vec::new();
    let push = |r: BigRational, out: &mut Vec<(BigRational, usize)>| match out.iter_mut().find(|(x, _)| *x == r) {
        Some((_, m)) => *m += 1,
        None => out.push((r, 1)),
    };
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        push(BigRational::zero(), &mut out);
    }
    loop {
        if p.len() <= 1 {
            break;
        }
        let l = p.iter().fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<num_bigint::BigInt> = p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let divisors = |n: &num_bigint::BigInt| -> Vec<num_bigint::BigInt> {
            let n: i64 = n.try_into().unwrap_or(0);
            (1..=n.min(100_000)).filter(|d| n % d == 0).map(num_bigint::BigInt::from).collect()
        };
        let mut found = None;
        'search: for num in divisors(&a0) {
            for den in divisors(&an) {
                for s in [1, -1] {
                    let r = BigRational::new(num.clone() * s, den.clone());
                    if eval_poly(&p, &r).is_zero() {
                        found = Some(r);
                        break 'search;
                    }
                }
            }
        }
        let Some(r) = found else { break };
        // Synthetic division by (x − r).
        let n = p.len() - 1;
        let mut q = vec![BigRational::zero(); n];
        let mut acc = BigRational::zero();
        for k in (0..=n).rev() {
            acc = acc * &r + &p[k];
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        p = q;
        push(r, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn sturm_counts() {
        // (x − 1)(x + 2)(x − 3)
        let p = vec![r(6), r(-5), r(-2), r(1)];
        assert_eq!(count_real_roots(&p, None, None, true), 3);
        assert_eq!(count_real_roots(&p, Some(&r(0)), None, false), 2);
        // x² + 1
        assert_eq!(count_real_roots(&[r(1), r(0), r(1)], None, None, true), 0);
        // 12 + 48x has its root at −1/4.
        assert_eq!(count_real_roots(&[r(12), r(48)], Some(&r(0)), None, false), 0);
        assert_eq!(count_real_roots(&[r(12), r(48)], None, None, true), 1);
    }

    #[test]
    fn roots_and_char_poly() {
        let v: [[BigRational; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { r(i as i64) } else { r(0) }));
        let cp = char_poly(&v);
        let mut roots = rational_roots(&cp);
        roots.sort();
        assert_eq!(roots, vec![(r(0), 1), (r(1), 1), (r(2), 1), (r(3), 1)]);
        assert_eq!(rational_roots(&[rat(-1, 4), r(0), r(1)]).len(), 2);
    }

    #[test]
    fn affine_domains() {
        let a = Affine::param(0);
        let b = Affine::param(1);
        let cons = vec![Constraint::Positive(a.sub(&Affine::int(1))), Constraint::Positive(b.sub(&a))];
        // α = 0 misses 1 < α < β; β − α − 1 = 0 meets it.
        assert!(!affine_zero_meets(&[a.clone()], &cons));
        assert!(affine_zero_meets(&[b.sub(&a).sub(&Affine::int(1))], &cons));
        assert!(!affine_zero_meets(&[b.sub(&a)], &cons));
        let ne = vec![Constraint::NonZero(b.clone())];
        assert!(!affine_zero_meets(&[b.clone()], &ne));
        assert!(affine_zero_meets(&[b.clone(), a.sub(&Affine::int(1))], &[]));
    }
}
