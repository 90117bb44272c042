//! Coordinate functions: rational expressions in generalized monomials.
//!
//! A generalized monomial is a product of Laurent powers of plain chart
//! coordinates and, in the curve parameter `t`, of `t^a`, `(ln t)^k` and
//! `e^{c t}`, where the exponents `a` and `c` are affine in the curve
//! parameters `α, β`. Trigonometric functions are stored through complex
//! exponentials, so `cos² + sin² = 1` holds in the canonical form and the
//! zero test reduces to coefficient comparison: distinct generalized
//! monomials are linearly independent for generic parameters.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalars::Gauss;

/// Number of symbolic curve parameters.
pub const NPARAM: usize = 2;
pub const PARAM_NAMES: [&str; NPARAM] = ["α", "β"];

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ------------------------------------------------------------ parameters --

/// Polynomial in the curve parameters with Gaussian-rational coefficients.
/// Terms are keyed by exponent vectors; the last key is the lex-leading one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ParamPoly {
    terms: BTreeMap<[u32; NPARAM], Gauss>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }
    pub fn constant(c: Gauss) -> Self {
        let mut p = ParamPoly::zero();
        p.add_term([0; NPARAM], c);
        p
    }
    pub fn one() -> Self {
        ParamPoly::constant(Gauss::one())
    }
    pub fn from_int(n: i64) -> Self {
        ParamPoly::constant(Gauss::from_int(n))
    }
    pub fn param(j: usize) -> Self {
        let mut e = [0; NPARAM];
        e[j] = 1;
        let mut p = ParamPoly::zero();
        p.add_term(e, Gauss::one());
        p
    }
    fn add_term(&mut self, e: [u32; NPARAM], c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (&[u32; NPARAM], &Gauss)> {
        self.terms.iter()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn constant_value(&self) -> Option<Gauss> {
        match self.terms.len() {
            0 => Some(Gauss::zero()),
            1 => self.terms.get(&[0; NPARAM]).cloned(),
            _ => None,
        }
    }
    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }
    pub fn params(&self) -> Vec<usize> {
        (0..NPARAM).filter(|&j| self.terms.keys().any(|e| e[j] > 0)).collect()
    }
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }
    pub fn add(&self, o: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
    pub fn neg(&self) -> ParamPoly {
        ParamPoly { terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect() }
    }
    pub fn sub(&self, o: &ParamPoly) -> ParamPoly {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &Gauss) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v.mul(c));
        }
        out
    }
    pub fn mul(&self, o: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let e = std::array::from_fn(|j| a[j] + b[j]);
                out.add_term(e, x.mul(y));
            }
        }
        out
    }
    pub fn conj(&self) -> ParamPoly {
        ParamPoly { terms: self.terms.iter().map(|(e, c)| (*e, c.conj())).collect() }
    }
    /// Real and imaginary parts (parameters are real).
    pub fn re_im(&self) -> (ParamPoly, ParamPoly) {
        let mut re = ParamPoly::zero();
        let mut im = ParamPoly::zero();
        for (e, c) in &self.terms {
            re.add_term(*e, Gauss::from_rat(c.re.clone()));
            im.add_term(*e, Gauss::from_rat(c.im.clone()));
        }
        (re, im)
    }
    /// Exact quotient, if `d` divides `self`.
    pub fn div_exact(&self, d: &ParamPoly) -> Option<ParamPoly> {
        let (de, dc) = d.terms.iter().next_back()?;
        let dinv = dc.inv()?;
        let mut r = self.clone();
        let mut q = ParamPoly::zero();
        while let Some((re, rc)) = r.terms.iter().next_back() {
            if (0..NPARAM).any(|j| re[j] < de[j]) {
                return None;
            }
            let e: [u32; NPARAM] = std::array::from_fn(|j| re[j] - de[j]);
            let mut t = ParamPoly::zero();
            t.add_term(e, rc.mul(&dinv));
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }
    /// Substitute rational values for all parameters.
    pub fn eval(&self, params: &[BigRational; NPARAM]) -> Gauss {
        let mut acc = Gauss::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for j in 0..NPARAM {
                for _ in 0..e[j] {
                    t = t.mul(&Gauss::from_rat(params[j].clone()));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
    pub fn eval_f64(&self, params: &[f64; NPARAM]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = gauss_f64(c);
            for j in 0..NPARAM {
                t *= params[j].powi(e[j] as i32);
            }
            acc += t;
        }
        acc
    }
    /// Coefficients as a polynomial in parameter `j`.
    pub fn coefficients_in(&self, j: usize) -> Vec<ParamPoly> {
        let d = self.terms.keys().map(|e| e[j]).max().unwrap_or(0) as usize;
        let mut out = vec![ParamPoly::zero(); d + 1];
        for (e, c) in &self.terms {
            let mut f = *e;
            f[j] = 0;
            out[e[j] as usize].add_term(f, c.clone());
        }
        out
    }
    fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = (0..NPARAM)
                .filter(|&j| e[j] > 0)
                .map(|j| if e[j] == 1 { PARAM_NAMES[j].to_string() } else { format!("{}^{}", PARAM_NAMES[j], e[j]) })
                .collect();
            let text = c.to_string();
            let simple = c.im.is_zero() || c.re.is_zero();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if simple => (true, rest.to_string()),
                _ => (false, text),
            };
            let piece = match (mono.is_empty(), body.as_str()) {
                (true, _) => body,
                (false, "1") => mono.join("*"),
                (false, _) => format!("{body}*{}", mono.join("*")),
            };
            if out.is_empty() {
                out = if neg { format!("-{piece}") } else { piece };
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&piece);
            }
        }
        out
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn gauss_f64(g: &Gauss) -> Complex64 {
    Complex64::new(g.re.to_f64().unwrap_or(f64::NAN), g.im.to_f64().unwrap_or(f64::NAN))
}

/// `c₀ + c_α α + c_β β` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine(pub [BigRational; NPARAM + 1]);

impl Affine {
    pub fn zero() -> Self {
        Affine(std::array::from_fn(|_| BigRational::zero()))
    }
    pub fn constant(c: BigRational) -> Self {
        let mut a = Affine::zero();
        a.0[0] = c;
        a
    }
    pub fn int(n: i64) -> Self {
        Affine::constant(BigRational::from_integer(n.into()))
    }
    pub fn param(j: usize) -> Self {
        let mut a = Affine::zero();
        a.0[j + 1] = BigRational::one();
        a
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
    pub fn is_constant(&self) -> bool {
        self.0[1..].iter().all(Zero::is_zero)
    }
    pub fn add(&self, o: &Affine) -> Affine {
        Affine(std::array::from_fn(|j| &self.0[j] + &o.0[j]))
    }
    pub fn neg(&self) -> Affine {
        Affine(std::array::from_fn(|j| -&self.0[j]))
    }
    pub fn sub(&self, o: &Affine) -> Affine {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &BigRational) -> Affine {
        Affine(std::array::from_fn(|j| &self.0[j] * c))
    }
    pub fn to_poly(&self) -> ParamPoly {
        let mut p = ParamPoly::constant(Gauss::from_rat(self.0[0].clone()));
        for j in 0..NPARAM {
            p = p.add(&ParamPoly::param(j).scale(&Gauss::from_rat(self.0[j + 1].clone())));
        }
        p
    }
    /// Inverse of [`Affine::to_poly`] for real polynomials of degree ≤ 1.
    pub fn from_poly(p: &ParamPoly) -> Option<Affine> {
        let mut a = Affine::zero();
        for (e, c) in p.terms() {
            if !c.im.is_zero() {
                return None;
            }
            match e.iter().sum::<u32>() {
                0 => a.0[0] = c.re.clone(),
                1 => a.0[e.iter().position(|&x| x == 1)? + 1] = c.re.clone(),
                _ => return None,
            }
        }
        Some(a)
    }
    pub fn eval(&self, params: &[BigRational; NPARAM]) -> BigRational {
        let mut acc = self.0[0].clone();
        for j in 0..NPARAM {
            acc += &self.0[j + 1] * &params[j];
        }
        acc
    }
    pub fn eval_f64(&self, params: &[f64; NPARAM]) -> f64 {
        let mut acc = self.0[0].to_f64().unwrap_or(f64::NAN);
        for j in 0..NPARAM {
            acc += self.0[j + 1].to_f64().unwrap_or(f64::NAN) * params[j];
        }
        acc
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for j in 0..NPARAM {
            let c = &self.0[j + 1];
            if c.is_zero() {
                continue;
            }
            let a = c.abs();
            let body = if a.is_one() { PARAM_NAMES[j].to_string() } else { format!("{}*{}", fmt_rat(&a), PARAM_NAMES[j]) };
            parts.push((c.is_negative(), body));
        }
        if !self.0[0].is_zero() || parts.is_empty() {
            parts.push((self.0[0].is_negative(), fmt_rat(&self.0[0].abs())));
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

// ------------------------------------------------------------- monomials --

/// Named coordinates; `t` marks the curve parameter, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub names: Vec<String>,
    pub t: Option<usize>,
}

impl Chart {
    pub fn new(names: &[&str], t: Option<usize>) -> Self {
        Chart { names: names.iter().map(|s| s.to_string()).collect(), t }
    }
    pub fn dim(&self) -> usize {
        self.names.len()
    }
    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// `Π x_j^{p_j} · t^a · (ln t)^k · e^{(c_re + i c_im) t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    /// Sorted `(coordinate, exponent)` pairs with nonzero exponents.
    pub pows: Vec<(usize, i32)>,
    pub tpow: Affine,
    pub ln: u32,
    pub exp_re: Affine,
    pub exp_im: Affine,
}

impl Gen {
    pub fn one() -> Self {
        Gen { pows: vec![], tpow: Affine::zero(), ln: 0, exp_re: Affine::zero(), exp_im: Affine::zero() }
    }
    pub fn is_one(&self) -> bool {
        *self == Gen::one()
    }
    pub fn coord(j: usize, e: i32) -> Self {
        let mut g = Gen::one();
        if e != 0 {
            g.pows.push((j, e));
        }
        g
    }
    pub fn mul(&self, o: &Gen) -> Gen {
        let mut pows: BTreeMap<usize, i32> = self.pows.iter().copied().collect();
        for (j, e) in &o.pows {
            *pows.entry(*j).or_default() += e;
        }
        Gen {
            pows: pows.into_iter().filter(|(_, e)| *e != 0).collect(),
            tpow: self.tpow.add(&o.tpow),
            ln: self.ln + o.ln,
            exp_re: self.exp_re.add(&o.exp_re),
            exp_im: self.exp_im.add(&o.exp_im),
        }
    }
    /// Inverse, when the monomial is free of logarithms.
    pub fn inv(&self) -> Option<Gen> {
        if self.ln > 0 {
            return None;
        }
        Some(Gen {
            pows: self.pows.iter().map(|(j, e)| (*j, -e)).collect(),
            tpow: self.tpow.neg(),
            ln: 0,
            exp_re: self.exp_re.neg(),
            exp_im: self.exp_im.neg(),
        })
    }
    pub fn conj(&self) -> Gen {
        Gen { exp_im: self.exp_im.neg(), ..self.clone() }
    }
    pub fn has_t(&self) -> bool {
        !self.tpow.is_zero() || self.ln > 0 || !self.exp_re.is_zero() || !self.exp_im.is_zero()
    }
    pub fn eval_f64(&self, chart: &Chart, x: &[f64], params: &[f64; NPARAM]) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for (j, e) in &self.pows {
            v *= x[*j].powi(*e);
        }
        if let Some(ti) = chart.t {
            let t = x[ti];
            if !self.tpow.is_zero() {
                v *= t.powf(self.tpow.eval_f64(params));
            }
            v *= t.ln().powi(self.ln as i32);
            let c = Complex64::new(self.exp_re.eval_f64(params), self.exp_im.eval_f64(params));
            v *= (c * t).exp();
        }
        v
    }
    fn render(&self, chart: &Chart) -> Vec<String> {
        let mut out = Vec::new();
        for (j, e) in &self.pows {
            let n = &chart.names[*j];
            out.push(if *e == 1 { n.clone() } else { format!("{n}^{e}") });
        }
        let tn = chart.t.map_or("t", |i| chart.names[i].as_str());
        if !self.tpow.is_zero() {
            let a = self.tpow.to_string();
            out.push(match (self.tpow.is_constant(), a.as_str()) {
                (_, "1") => tn.to_string(),
                (true, _) if !a.contains('/') => format!("{tn}^{a}"),
                _ => format!("{tn}^({a})"),
            });
        }
        if self.ln > 0 {
            out.push(if self.ln == 1 { format!("ln({tn})") } else { format!("ln({tn})^{}", self.ln) });
        }
        if !self.exp_re.is_zero() || !self.exp_im.is_zero() {
            let re = (!self.exp_re.is_zero()).then(|| self.exp_re.to_string());
            let im = (!self.exp_im.is_zero()).then(|| match self.exp_im.to_string().as_str() {
                "1" => "I".to_string(),
                "-1" => "-I".to_string(),
                s => format!("I*({s})"),
            });
            let c = match (re, im) {
                (Some(r), Some(i)) => format!("({r} + {i})"),
                (Some(r), None) if r == "1" => String::new(),
                (Some(r), None) => format!("({r})"),
                (None, Some(i)) => i,
                (None, None) => unreachable!(),
            };
            out.push(if c.is_empty() { format!("e^{tn}") } else { format!("e^({c}*{tn})") });
        }
        out
    }
}

// ---------------------------------------------------------- polynomials --

/// Finite sum of generalized monomials with parameter-polynomial
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GenPoly {
    terms: BTreeMap<Gen, ParamPoly>,
}

impl GenPoly {
    pub fn zero() -> Self {
        GenPoly::default()
    }
    pub fn term(g: Gen, c: ParamPoly) -> Self {
        let mut p = GenPoly::zero();
        p.add_term(g, c);
        p
    }
    pub fn constant(c: ParamPoly) -> Self {
        GenPoly::term(Gen::one(), c)
    }
    pub fn one() -> Self {
        GenPoly::constant(ParamPoly::one())
    }
    fn add_term(&mut self, g: Gen, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Gen, &ParamPoly)> {
        self.terms.iter()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn single(&self) -> Option<(&Gen, &ParamPoly)> {
        match self.terms.len() {
            1 => self.terms.iter().next(),
            _ => None,
        }
    }
    /// The parameter polynomial, when no coordinate function occurs.
    pub fn param_value(&self) -> Option<ParamPoly> {
        match self.terms.len() {
            0 => Some(ParamPoly::zero()),
            1 => self.terms.get(&Gen::one()).cloned(),
            _ => None,
        }
    }
    pub fn add(&self, o: &GenPoly) -> GenPoly {
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }
    pub fn neg(&self) -> GenPoly {
        GenPoly { terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg())).collect() }
    }
    pub fn sub(&self, o: &GenPoly) -> GenPoly {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &ParamPoly) -> GenPoly {
        let mut out = GenPoly::zero();
        for (g, v) in &self.terms {
            out.add_term(g.clone(), v.mul(c));
        }
        out
    }
    pub fn mul_gen(&self, h: &Gen) -> GenPoly {
        GenPoly { terms: self.terms.iter().map(|(g, c)| (g.mul(h), c.clone())).collect() }
    }
    pub fn mul(&self, o: &GenPoly) -> GenPoly {
        let mut out = GenPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.add_term(a.mul(b), x.mul(y));
            }
        }
        out
    }
    pub fn pow(&self, k: u32) -> GenPoly {
        let mut out = GenPoly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
    pub fn conj(&self) -> GenPoly {
        let mut out = GenPoly::zero();
        for (g, c) in &self.terms {
            out.add_term(g.conj(), c.conj());
        }
        out
    }
    /// Partial derivative along chart coordinate `j`.
    pub fn d(&self, chart: &Chart, j: usize) -> GenPoly {
        let mut out = GenPoly::zero();
        for (g, c) in &self.terms {
            if chart.t == Some(j) {
                let tm1 = Gen { tpow: g.tpow.sub(&Affine::int(1)), ..g.clone() };
                if !g.tpow.is_zero() {
                    out.add_term(tm1.clone(), c.mul(&g.tpow.to_poly()));
                }
                if g.ln > 0 {
                    let h = Gen { ln: g.ln - 1, ..tm1 };
                    out.add_term(h, c.scale(&Gauss::from_int(g.ln as i64)));
                }
                if !g.exp_re.is_zero() || !g.exp_im.is_zero() {
                    let rate = g.exp_re.to_poly().add(&g.exp_im.to_poly().scale(&Gauss::i()));
                    out.add_term(g.clone(), c.mul(&rate));
                }
            } else if let Some(&(_, e)) = g.pows.iter().find(|(w, _)| *w == j) {
                out.add_term(g.mul(&Gen::coord(j, -1)), c.scale(&Gauss::from_int(e as i64)));
            }
        }
        out
    }
    /// Divide by a parameter polynomial, if it divides every coefficient.
    pub fn div_param(&self, d: &ParamPoly) -> Option<GenPoly> {
        let mut out = GenPoly::zero();
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.div_exact(d)?);
        }
        Some(out)
    }
    /// Substitute rational parameter values.
    pub fn specialize(&self, params: &[BigRational; NPARAM]) -> GenPoly {
        let mut out = GenPoly::zero();
        for (g, c) in &self.terms {
            let h = Gen {
                tpow: Affine::constant(g.tpow.eval(params)),
                exp_re: Affine::constant(g.exp_re.eval(params)),
                exp_im: Affine::constant(g.exp_im.eval(params)),
                ..g.clone()
            };
            out.add_term(h, ParamPoly::constant(c.eval(params)));
        }
        out
    }
    pub fn eval_f64(&self, chart: &Chart, x: &[f64], params: &[f64; NPARAM]) -> Complex64 {
        self.terms.iter().map(|(g, c)| c.eval_f64(params) * g.eval_f64(chart, x, params)).sum()
    }
    pub fn format(&self, chart: &Chart) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (g, c) in self.terms.iter().rev() {
            let mono = g.render(chart);
            let text = c.to_string();
            let compound = c.terms.len() > 1 || text.contains(' ');
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if !compound => (true, rest.to_string()),
                _ => (false, if compound && !mono.is_empty() { format!("({text})") } else { text }),
            };
            let piece = match (mono.is_empty(), body.as_str()) {
                (true, _) => body,
                (false, "1") => mono.join("*"),
                (false, _) => format!("{body}*{}", mono.join("*")),
            };
            if out.is_empty() {
                out = if neg { format!("-{piece}") } else { piece };
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&piece);
            }
        }
        out
    }
}

// -------------------------------------------------------------- fractions --

/// `num / Π f_i^{e_i}` with the denominator kept factored.
///
/// Monomial denominators with constant coefficients are folded into the
/// numerator, so functions built from homogeneous curves stay Laurent
/// polynomials. Parameter-polynomial factors are cancelled when they divide
/// the numerator.
#[derive(Debug, Clone)]
pub struct CoordFunction {
    num: GenPoly,
    den: Vec<(GenPoly, u32)>,
}

impl PartialEq for CoordFunction {
    fn eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl From<GenPoly> for CoordFunction {
    fn from(num: GenPoly) -> Self {
        CoordFunction { num, den: vec![] }
    }
}

impl CoordFunction {
    pub fn zero() -> Self {
        GenPoly::zero().into()
    }
    pub fn one() -> Self {
        GenPoly::one().into()
    }
    pub fn constant(c: Gauss) -> Self {
        GenPoly::constant(ParamPoly::constant(c)).into()
    }
    pub fn from_int(n: i64) -> Self {
        CoordFunction::constant(Gauss::from_int(n))
    }
    pub fn param(j: usize) -> Self {
        GenPoly::constant(ParamPoly::param(j)).into()
    }
    pub fn gen(g: Gen) -> Self {
        GenPoly::term(g, ParamPoly::one()).into()
    }
    /// The chart coordinate `j` (for the curve parameter, `t`).
    pub fn coord(chart: &Chart, j: usize) -> Self {
        if chart.t == Some(j) {
            CoordFunction::gen(Gen { tpow: Affine::int(1), ..Gen::one() })
        } else {
            CoordFunction::gen(Gen::coord(j, 1))
        }
    }
    pub fn numerator(&self) -> &GenPoly {
        &self.num
    }
    pub fn denominator(&self) -> GenPoly {
        self.den.iter().fold(GenPoly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }
    pub fn denominator_factors(&self) -> &[(GenPoly, u32)] {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    /// Constant Gaussian value, if the function is one.
    pub fn constant_value(&self) -> Option<Gauss> {
        if self.den.is_empty() {
            self.num.param_value()?.constant_value()
        } else {
            None
        }
    }
    /// Nonzero everywhere on the chart and for all parameter values:
    /// a single logarithm-free monomial with a constant coefficient.
    pub fn is_unit(&self) -> bool {
        self.num.single().is_some_and(|(g, c)| g.ln == 0 && c.is_constant())
    }
    /// Number of numerator terms plus denominator factors.
    pub fn complexity(&self) -> usize {
        self.num.num_terms() + self.den.iter().map(|(f, e)| f.num_terms() * *e as usize).sum::<usize>()
    }

    fn with_den(num: GenPoly, den: Vec<(GenPoly, u32)>) -> Self {
        let mut f = CoordFunction { num, den };
        f.cancel();
        f
    }

    /// Remove parameter factors that divide the numerator.
    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, e) in self.den.iter_mut() {
            let Some(p) = f.param_value() else { continue };
            while *e > 0 {
                match self.num.div_param(&p) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
    }

    /// Split `g` into a unit part folded into the numerator and a
    /// normalized factor (or none).
    fn absorb(mut num: GenPoly, g: &GenPoly) -> (GenPoly, Option<GenPoly>) {
        let (g0, c0) = g.terms().next().expect("nonzero divisor");
        let mut f = g.clone();
        if let Some(inv) = g0.inv() {
            num = num.mul_gen(&inv);
            f = f.mul_gen(&inv);
        }
        if let Some(c) = c0.constant_value() {
            let ci = c.inv().expect("nonzero");
            num = num.scale(&ParamPoly::constant(ci.clone()));
            f = f.scale(&ParamPoly::constant(ci));
        }
        if f == GenPoly::one() {
            (num, None)
        } else {
            (num, Some(f))
        }
    }

    fn push_factor(den: &mut Vec<(GenPoly, u32)>, f: GenPoly, e: u32) {
        match den.iter_mut().find(|(g, _)| *g == f) {
            Some((_, k)) => *k += e,
            None => {
                den.push((f, e));
                den.sort();
            }
        }
    }

    pub fn add(&self, o: &CoordFunction) -> CoordFunction {
        if self.den == o.den {
            return CoordFunction::with_den(self.num.add(&o.num), self.den.clone());
        }
        let mut lcm = self.den.clone();
        for (f, e) in &o.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => lcm.push((f.clone(), *e)),
            }
        }
        lcm.sort();
        let lift = |x: &CoordFunction| {
            let mut n = x.num.clone();
            for (f, e) in &lcm {
                let have = x.den.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k);
                if e > &have {
                    n = n.mul(&f.pow(e - have));
                }
            }
            n
        };
        CoordFunction::with_den(lift(self).add(&lift(o)), lcm.clone())
    }
    pub fn neg(&self) -> CoordFunction {
        CoordFunction { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn sub(&self, o: &CoordFunction) -> CoordFunction {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &CoordFunction) -> CoordFunction {
        if self.is_zero() || o.is_zero() {
            return CoordFunction::zero();
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            CoordFunction::push_factor(&mut den, f.clone(), *e);
        }
        CoordFunction::with_den(self.num.mul(&o.num), den)
    }
    pub fn scale(&self, c: &Gauss) -> CoordFunction {
        CoordFunction { num: self.num.scale(&ParamPoly::constant(c.clone())), den: self.den.clone() }.normalized()
    }
    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
        }
        self
    }
    pub fn inv(&self) -> Option<CoordFunction> {
        if self.is_zero() {
            return None;
        }
        let (num, f) = CoordFunction::absorb(self.denominator(), &self.num);
        let mut den = Vec::new();
        if let Some(f) = f {
            den.push((f, 1));
        }
        Some(CoordFunction::with_den(num, den))
    }
    pub fn div(&self, o: &CoordFunction) -> Option<CoordFunction> {
        Some(self.mul(&o.inv()?))
    }
    pub fn pow(&self, k: u32) -> CoordFunction {
        let mut out = CoordFunction::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
    pub fn conj(&self) -> CoordFunction {
        let mut out = CoordFunction::from(self.num.conj());
        for (f, e) in &self.den {
            let g = CoordFunction::from(f.conj()).inv().expect("nonzero factor");
            out = out.mul(&g.pow(*e));
        }
        out
    }
    /// Partial derivative along chart coordinate `j`.
    pub fn d(&self, chart: &Chart, j: usize) -> CoordFunction {
        let mut out = CoordFunction::with_den(self.num.d(chart, j), self.den.clone());
        for (i, (f, e)) in self.den.iter().enumerate() {
            let df = f.d(chart, j);
            if df.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            den[i].1 += 1;
            let term = self.num.mul(&df).scale(&ParamPoly::from_int(-(*e as i64)));
            out = out.add(&CoordFunction::with_den(term, den));
        }
        out
    }
    pub fn specialize(&self, params: &[BigRational; NPARAM]) -> CoordFunction {
        let mut out = CoordFunction::from(self.num.specialize(params));
        for (f, e) in &self.den {
            let g = CoordFunction::from(f.specialize(params)).inv().expect("factor stays nonzero");
            out = out.mul(&g.pow(*e));
        }
        out
    }
    pub fn eval_f64(&self, chart: &Chart, x: &[f64], params: &[f64; NPARAM]) -> Complex64 {
        let mut v = self.num.eval_f64(chart, x, params);
        for (f, e) in &self.den {
            v /= f.eval_f64(chart, x, params).powi(*e as i32);
        }
        v
    }
    pub fn format(&self, chart: &Chart) -> String {
        let n = self.num.format(chart);
        if self.den.is_empty() {
            return n;
        }
        let d: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                let s = f.format(chart);
                let s = if f.num_terms() > 1 || s.contains(' ') { format!("({s})") } else { s };
                if *e == 1 { s } else { format!("{s}^{e}") }
            })
            .collect();
        let n = if self.num.num_terms() > 1 { format!("({n})") } else { n };
        format!("{n}/{}", d.join("/"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn chart() -> Chart {
        Chart::new(&["r", "s", "t"], Some(2))
    }

    #[test]
    fn trig_identity_holds_canonically() {
        let c = chart();
        let e = |s: i64| CoordFunction::gen(Gen { exp_im: Affine::param(1).scale(&rat(s, 1)), ..Gen::one() });
        let half = Gauss::new(rat(1, 2), rat(0, 1));
        let cos = e(1).add(&e(-1)).scale(&half);
        let sin = e(1).sub(&e(-1)).scale(&Gauss::new(rat(0, 1), rat(-1, 2)));
        assert_eq!(cos.mul(&cos).add(&sin.mul(&sin)), CoordFunction::one());
        assert_eq!(cos.d(&c, 2), sin.mul(&CoordFunction::param(1)).neg());
        assert_eq!(cos.conj(), cos);
    }

    #[test]
    fn rational_functions() {
        let c = chart();
        let s = CoordFunction::coord(&c, 1);
        let t = CoordFunction::coord(&c, 2);
        let w = CoordFunction::from_int(12).add(&t.scale(&Gauss::from_int(48)));
        let f = s.div(&w).unwrap();
        assert_eq!(f.mul(&w), s);
        assert_eq!(f.d(&c, 2), s.scale(&Gauss::from_int(-48)).div(&w.mul(&w)).unwrap());
        let inv_s = s.inv().unwrap();
        assert!(inv_s.denominator_factors().is_empty());
        assert_eq!(inv_s.d(&c, 1), s.pow(2).inv().unwrap().neg());
        let a = CoordFunction::param(0).sub(&CoordFunction::one());
        let g = t.div(&a).unwrap();
        assert_eq!(g.mul(&a), t);
        assert!(g.mul(&a).denominator_factors().is_empty());
    }

    #[test]
    fn power_and_log_derivatives() {
        let c = chart();
        let ta = CoordFunction::gen(Gen { tpow: Affine::param(0), ..Gen::one() });
        let want = CoordFunction::param(0).mul(&CoordFunction::gen(Gen { tpow: Affine::param(0).sub(&Affine::int(1)), ..Gen::one() }));
        assert_eq!(ta.d(&c, 2), want);
        let ln = CoordFunction::gen(Gen { ln: 1, ..Gen::one() });
        assert_eq!(ln.d(&c, 2), CoordFunction::coord(&c, 2).inv().unwrap());
        assert_eq!(ln.format(&c), "ln(t)");
    }
}
