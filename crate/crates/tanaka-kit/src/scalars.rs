//! Exact scalars: Gaussian rationals extended by formal unit symbols.
//!
//! A [`Scalar`] is a Laurent polynomial over `Q(i)` in the unit symbols
//! `u1..um`. Units model phases such as `e^{iθ}`, so conjugation sends
//! `u_j` to `u_j^{-1}` and `a + bi` to `a - bi`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("unit context mismatch: {0} vs {1} unit symbols")]
    ContextMismatch(usize, usize),
    #[error("cannot parse scalar {input:?}: {msg}")]
    Parse { input: String, msg: String },
    #[error("unit symbol u{0} is outside the declared context of {1} units")]
    UnknownUnit(usize, usize),
    #[error("division by a non-unit scalar {0}")]
    NotInvertible(String),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An element `re + im·i` of the Gaussian rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gauss {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gauss {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gauss { re, im }
    }
    pub fn zero() -> Self {
        Gauss::new(BigRational::zero(), BigRational::zero())
    }
    pub fn one() -> Self {
        Gauss::from_int(1)
    }
    pub fn i() -> Self {
        Gauss::new(BigRational::zero(), BigRational::one())
    }
    pub fn from_int(n: i64) -> Self {
        Gauss::new(rat(n, 1), BigRational::zero())
    }
    pub fn from_rat(r: BigRational) -> Self {
        Gauss::new(r, BigRational::zero())
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Gauss::new(self.re.clone(), -self.im.clone())
    }
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Gauss::new(&self.re / &n, -(&self.im / &n)))
    }
    pub fn add(&self, o: &Gauss) -> Gauss {
        Gauss::new(&self.re + &o.re, &self.im + &o.im)
    }
    pub fn sub(&self, o: &Gauss) -> Gauss {
        Gauss::new(&self.re - &o.re, &self.im - &o.im)
    }
    pub fn mul(&self, o: &Gauss) -> Gauss {
        Gauss::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    pub fn neg(&self) -> Gauss {
        Gauss::new(-self.re.clone(), -self.im.clone())
    }

    /// Text form used inside larger expressions. `bare` is true when the
    /// coefficient stands alone (no factor follows).
    fn render(&self, bare: bool) -> (bool, String) {
        if self.im.is_zero() {
            let neg = self.re.is_negative();
            let a = self.re.abs();
            let s = if a.is_one() && !bare {
                String::new()
            } else if a.denom().is_one() || bare {
                fmt_rat(&a)
            } else {
                format!("({})", fmt_rat(&a))
            };
            (neg, s)
        } else if self.re.is_zero() {
            let neg = self.im.is_negative();
            let a = self.im.abs();
            let s = if a.is_one() {
                "I".to_string()
            } else if a.denom().is_one() {
                format!("{}*I", fmt_rat(&a))
            } else {
                format!("({})*I", fmt_rat(&a))
            };
            (neg, s)
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            let a = self.im.abs();
            let im = if a.is_one() {
                "I".to_string()
            } else {
                format!("{}*I", fmt_rat(&a))
            };
            (false, format!("({} {} {})", fmt_rat(&self.re), sign, im))
        }
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (neg, s) = self.render(true);
        if neg {
            write!(f, "-{s}")
        } else {
            write!(f, "{s}")
        }
    }
}

/// Laurent polynomial over `Q(i)` in `m` unit symbols, kept in canonical
/// form: no zero coefficients and terms ordered lexicographically by
/// exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    m: usize,
    terms: BTreeMap<Vec<i32>, Gauss>,
}

impl Scalar {
    pub fn zero(m: usize) -> Self {
        Scalar { m, terms: BTreeMap::new() }
    }
    pub fn one(m: usize) -> Self {
        Scalar::constant(m, Gauss::one())
    }
    pub fn i(m: usize) -> Self {
        Scalar::constant(m, Gauss::i())
    }
    pub fn from_int(m: usize, n: i64) -> Self {
        Scalar::constant(m, Gauss::from_int(n))
    }
    pub fn from_rat(m: usize, r: BigRational) -> Self {
        Scalar::constant(m, Gauss::from_rat(r))
    }
    pub fn constant(m: usize, c: Gauss) -> Self {
        Scalar::monomial(m, c, vec![0; m])
    }
    pub fn monomial(m: usize, c: Gauss, exps: Vec<i32>) -> Self {
        assert_eq!(exps.len(), m, "exponent vector length must equal the unit count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Scalar { m, terms }
    }
    /// The unit symbol `u_{j+1}` raised to `e`.
    pub fn unit(m: usize, j: usize, e: i32) -> Self {
        let mut exps = vec![0; m];
        exps[j] = e;
        Scalar::monomial(m, Gauss::one(), exps)
    }

    /// Canonical form of an arbitrary term list; merges repeated exponent
    /// vectors and drops zeros.
    pub fn normalize(m: usize, raw: impl IntoIterator<Item = (Gauss, Vec<i32>)>) -> Self {
        let mut s = Scalar::zero(m);
        for (c, e) in raw {
            assert_eq!(e.len(), m, "exponent vector length must equal the unit count");
            s.add_term(e, c);
        }
        s
    }

    fn add_term(&mut self, e: Vec<i32>, c: Gauss) {
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

    pub fn units(&self) -> usize {
        self.m
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Gauss)> {
        self.terms.iter()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(e, c)| c.is_one() && e.iter().all(|&x| x == 0))
    }
    /// True when the scalar has no unit symbols in it.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }
    /// The Gaussian-rational value of a constant scalar.
    pub fn constant_value(&self) -> Option<Gauss> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Gauss::zero))
    }
    /// A unit of the ring: a single term (nonzero coefficient times a unit
    /// monomial).
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }
    pub fn inv_unit(&self) -> Option<Scalar> {
        if !self.is_unit() {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        Some(Scalar::monomial(self.m, c.inv()?, e.iter().map(|x| -x).collect()))
    }
    /// Exact division by a unit.
    pub fn div_unit(&self, d: &Scalar) -> Result<Scalar, ScalarError> {
        let inv = d.inv_unit().ok_or_else(|| ScalarError::NotInvertible(d.to_string()))?;
        Ok(self * &inv)
    }

    pub fn conj(&self) -> Scalar {
        Scalar::normalize(
            self.m,
            self.terms.iter().map(|(e, c)| (c.conj(), e.iter().map(|x| -x).collect())),
        )
    }
    /// Self-conjugate scalars are the "real" ones.
    pub fn is_self_conjugate(&self) -> bool {
        *self == self.conj()
    }

    pub fn scale(&self, c: &Gauss) -> Scalar {
        if c.is_zero() {
            return Scalar::zero(self.m);
        }
        Scalar {
            m: self.m,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one(self.m);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn try_add(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_context(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_context(o)?;
        let mut out = Scalar::zero(self.m);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn same_context(&self, o: &Scalar) -> Result<(), ScalarError> {
        if self.m != o.m {
            return Err(ScalarError::ContextMismatch(self.m, o.m));
        }
        Ok(())
    }

    /// Ring homomorphism `u_j ↦ c·u^exps` (with `exps[j] == 0`), used when a
    /// unit is pinned by a binomial relation.
    pub fn substitute_unit(&self, j: usize, c: &Gauss, exps: &[i32]) -> Scalar {
        assert_eq!(exps[j], 0);
        let cinv = c.inv().expect("unit substitution needs a nonzero coefficient");
        let mut out = Scalar::zero(self.m);
        for (e, v) in &self.terms {
            let k = e[j];
            let mut ne = e.clone();
            ne[j] = 0;
            for (a, b) in ne.iter_mut().zip(exps) {
                *a += k * b;
            }
            let base = if k >= 0 { c } else { &cinv };
            let mut coef = v.clone();
            for _ in 0..k.unsigned_abs() {
                coef = coef.mul(base);
            }
            out.add_term(ne, coef);
        }
        out
    }

    /// Parse the text grammar (`p/q`, `I`, `u1..um` with integer powers,
    /// `+ - *`, parentheses).
    pub fn parse(text: &str, m: usize) -> Result<Scalar, ScalarError> {
        let mut p = Parser { src: text, pos: 0, m };
        let s = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.err("trailing input"));
        }
        Ok(s)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(format!("u{}", j + 1)),
                    _ => factors.push(format!("u{}^{}", j + 1, k)),
                }
            }
            let (neg, cs) = c.render(factors.is_empty());
            let body = match (cs.is_empty(), factors.is_empty()) {
                (true, _) => factors.join("*"),
                (false, true) => cs,
                (false, false) => format!("{}*{}", cs, factors.join("*")),
            };
            match (n, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;
    /// Parses with as many units as the text mentions.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut m = 0;
        let b = s.as_bytes();
        for (i, ch) in b.iter().enumerate() {
            if *ch == b'u' {
                let digits: String =
                    s[i + 1..].chars().take_while(|c| c.is_ascii_digit()).collect();
                if let Ok(k) = digits.parse::<usize>() {
                    m = m.max(k);
                }
            }
        }
        Scalar::parse(s, m)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    m: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse {
            input: self.src.to_string(),
            msg: format!("{msg} at byte {}", self.pos),
        }
    }
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }
    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }
    fn int(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse::<BigInt>().map_err(|_| self.err("expected integer"))
    }
    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = Scalar::zero(self.m);
        let mut first = true;
        loop {
            let neg = if self.eat('-') {
                true
            } else if self.eat('+') {
                false
            } else if first {
                false
            } else {
                break;
            };
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            first = false;
        }
        Ok(acc)
    }
    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }
    fn factor(&mut self) -> Result<Scalar, ScalarError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some('I') => {
                self.pos += 1;
                Ok(Scalar::i(self.m))
            }
            Some('u') => {
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let j: usize =
                    self.src[start..self.pos].parse().map_err(|_| self.err("expected unit index"))?;
                if j == 0 || j > self.m {
                    return Err(ScalarError::UnknownUnit(j, self.m));
                }
                let e = if self.eat('^') {
                    let k = self.int()?;
                    i32::try_from(k).map_err(|_| self.err("exponent out of range"))?
                } else {
                    1
                };
                Ok(Scalar::unit(self.m, j - 1, e))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.int()?;
                let mut r = BigRational::from_integer(n);
                self.skip_ws();
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let d = self.int()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    r /= BigRational::from_integer(d);
                }
                Ok(Scalar::from_rat(self.m, r))
            }
            _ => Err(self.err("unexpected character")),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.try_add(o).expect("scalar contexts must match")
    }
}
impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.try_add(&-o).expect("scalar contexts must match")
    }
}
impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.try_mul(o).expect("scalar contexts must match")
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            m: self.m,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}
impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}
impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}
impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.same_context(o).expect("scalar contexts must match");
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}
impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.same_context(o).expect("scalar contexts must match");
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.neg());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str, m: usize) -> Scalar {
        Scalar::parse(t, m).unwrap()
    }

    #[test]
    fn cancellation_and_merge() {
        let z = Scalar::normalize(1, [(Gauss::one(), vec![0]), (Gauss::from_int(-1), vec![0])]);
        assert!(z.is_zero());
        let two_i = Scalar::normalize(1, [(Gauss::i(), vec![1]), (Gauss::i(), vec![1])]);
        assert_eq!(two_i, Scalar::monomial(1, Gauss::new(rat(0, 1), rat(2, 1)), vec![1]));
        assert_eq!(two_i.to_string(), "2*I*u1");
    }

    #[test]
    fn printing() {
        assert_eq!(s("(1/2)*I*u1^-1", 1).to_string(), "(1/2)*I*u1^-1");
        assert_eq!(s("u1^2", 1).to_string(), "u1^2");
        assert_eq!(s("-1/3", 0).to_string(), "-1/3");
        assert_eq!(s("1 + I", 0).to_string(), "(1 + I)");
        assert_eq!(s("u1 - u1^-1", 1).to_string(), "-u1^-1 + u1");
        assert_eq!(s("0", 2).to_string(), "0");
        assert_eq!(s("2*u1*u2^-3 - 7/2*I", 2).to_string(), "-(7/2)*I + 2*u1*u2^-3");
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(s("I", 0).conj(), s("-I", 0));
        assert_eq!(s("u1^2", 1).conj(), s("u1^-2", 1));
        assert_eq!(s("2*u1 + I", 1).conj(), s("2*u1^-1 - I", 1));
    }

    #[test]
    fn mixing_contexts_is_an_error() {
        let a = Scalar::one(1);
        let b = Scalar::one(2);
        assert_eq!(a.try_add(&b), Err(ScalarError::ContextMismatch(1, 2)));
        assert!(Scalar::parse("u2", 1).is_err());
    }

    #[test]
    fn unit_inverse() {
        let a = s("(2/3)*I*u1^-2", 1);
        assert!((&a * &a.inv_unit().unwrap()).is_one());
        assert!(s("1 + u1", 1).inv_unit().is_none());
    }

    #[test]
    fn unit_substitution() {
        // u1 := -I·u2 sends u1^2·u2 + u1^-1 to -u2^3 + I·u2^-1
        let x = s("u1^2*u2 + u1^-1", 2);
        let y = x.substitute_unit(0, &Gauss::i().neg(), &[0, 1]);
        assert_eq!(y, s("-u2^3 + I*u2^-1", 2));
    }

    #[test]
    fn parse_errors() {
        assert!(Scalar::parse("1/0", 0).is_err());
        assert!(Scalar::parse("(1", 0).is_err());
        assert!(Scalar::parse("x", 0).is_err());
        assert!(Scalar::parse("1 2", 0).is_err());
    }
}
