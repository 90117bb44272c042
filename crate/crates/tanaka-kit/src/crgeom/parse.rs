//! Expression grammar for coordinate functions and the `curve.v1` format.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'I' | param | var | func '(' expr ')' | '(' expr ')'
//! func   := 'ln' | 'exp' | 'cos' | 'sin'
//! ```
//!
//! Parameters are `alpha`/`α` and `beta`/`β`; `var` is the curve variable.
//! Powers of the variable may have parameter-affine exponents; `exp`,
//! `cos`, `sin` take arguments `c·var` with `c` parameter-affine.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;

use super::curve::{Constraint, Curve, Domain};
use super::func::{Affine, Chart, CoordFunction, Gen, ParamPoly};
use super::CrError;
use crate::scalars::{rat, Gauss};

type F = CoordFunction;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn err(col: usize, msg: impl Into<String>) -> CrError {
    CrError::Parse { col, msg: msg.into() }
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, CrError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
            let digits = format!("{int}{frac}");
            let n: BigInt = digits.parse().map_err(|_| err(col, format!("bad number {text:?}")))?;
            out.push((Tok::Num(BigRational::new(n, BigInt::from(10).pow(frac.len() as u32))), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else if c == '−' {
            out.push((Tok::Op('-'), col));
            i += 1;
        } else {
            return Err(err(col, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    chart: &'a Chart,
    end: usize,
}

pub fn param_index(name: &str) -> Option<usize> {
    match name {
        "alpha" | "α" => Some(0),
        "beta" | "β" => Some(1),
        _ => None,
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<(), CrError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(self.col(), format!("expected '{c}'")))
        }
    }
    fn expr(&mut self) -> Result<F, CrError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }
    fn term(&mut self) -> Result<F, CrError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let col = self.col();
                self.pos += 1;
                let d = self.unary()?;
                acc = acc.div(&d).ok_or_else(|| err(col, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }
    fn unary(&mut self) -> Result<F, CrError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }
    fn power(&mut self) -> Result<F, CrError> {
        let (base, is_var) = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let col = self.col();
        let e = self.unary()?;
        let a = affine_value(&e).ok_or_else(|| err(col, "exponent must be affine in the parameters"))?;
        if is_var {
            return Ok(F::gen(Gen { tpow: a, ..Gen::one() }));
        }
        let k = (a.is_constant() && a.0[0].is_integer()).then(|| a.0[0].to_integer().to_i32()).flatten();
        let k = k.ok_or_else(|| err(col, "only the curve variable takes non-integer exponents"))?;
        if k >= 0 {
            Ok(base.pow(k as u32))
        } else {
            Ok(base.inv().ok_or_else(|| err(col, "zero to a negative power"))?.pow((-k) as u32))
        }
    }
    fn atom(&mut self) -> Result<(F, bool), CrError> {
        let col = self.col();
        let Some(tok) = self.peek().cloned() else { return Err(err(col, "unexpected end of expression")) };
        self.pos += 1;
        match tok {
            Tok::Num(r) => Ok((F::constant(Gauss::from_rat(r)), false)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                let is_var = e == F::coord(self.chart, 0);
                Ok((e, is_var))
            }
            Tok::Op(c) => Err(err(col, format!("unexpected '{c}'"))),
            Tok::Ident(name) => {
                if name == "I" || name == "i" {
                    return Ok((F::constant(Gauss::i()), false));
                }
                if let Some(j) = param_index(&name) {
                    return Ok((F::param(j), false));
                }
                if self.chart.names[0] == name {
                    return Ok((F::coord(self.chart, 0), true));
                }
                if !["ln", "exp", "cos", "sin"].contains(&name.as_str()) {
                    return Err(err(col, format!("unknown symbol {name:?}")));
                }
                self.expect('(')?;
                let acol = self.col();
                let arg = self.expr()?;
                self.expect(')')?;
                let var = F::coord(self.chart, 0);
                if name == "ln" {
                    if arg != var {
                        return Err(err(acol, format!("ln takes the curve variable {}", self.chart.names[0])));
                    }
                    return Ok((F::gen(Gen { ln: 1, ..Gen::one() }), false));
                }
                let c = arg.div(&var).and_then(|q| q.numerator().param_value().filter(|_| q.denominator_factors().is_empty()));
                let c = c.ok_or_else(|| err(acol, format!("{name} takes c*{} with c affine in the parameters", self.chart.names[0])))?;
                let (re, im) = c.re_im();
                let (re, im) = match (Affine::from_poly(&re), Affine::from_poly(&im)) {
                    (Some(r), Some(i)) => (r, i),
                    _ => return Err(err(acol, "frequency must be affine in the parameters")),
                };
                let e = |re: &Affine, im: &Affine| F::gen(Gen { exp_re: re.clone(), exp_im: im.clone(), ..Gen::one() });
                match name.as_str() {
                    "exp" => Ok((e(&re, &im), false)),
                    _ => {
                        if !im.is_zero() {
                            return Err(err(acol, "cos and sin take real frequencies"));
                        }
                        let (p, m) = (e(&Affine::zero(), &re), e(&Affine::zero(), &re.neg()));
                        let half = Gauss::new(rat(1, 2), rat(0, 1));
                        if name == "cos" {
                            Ok((p.add(&m).scale(&half), false))
                        } else {
                            Ok((p.sub(&m).scale(&Gauss::new(rat(0, 1), rat(-1, 2))), false))
                        }
                    }
                }
            }
        }
    }
}

fn affine_value(f: &F) -> Option<Affine> {
    if !f.denominator_factors().is_empty() {
        return None;
    }
    let p = f.numerator().param_value()?;
    let (re, im) = p.re_im();
    if !im.is_zero() {
        return None;
    }
    Affine::from_poly(&re)
}

/// Parse an expression in the single curve variable of `chart`.
pub fn parse_function(text: &str, chart: &Chart) -> Result<F, CrError> {
    let toks = lex(text)?;
    let end = text.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, chart, end };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(p.col(), "trailing input"));
    }
    Ok(f)
}

/// Parameter-affine expression (no curve variable).
pub fn parse_affine(text: &str) -> Result<Affine, CrError> {
    let chart = Chart::new(&["\u{0}"], Some(0));
    let f = parse_function(text, &chart)?;
    affine_value(&f).ok_or_else(|| err(1, format!("{text:?} is not a real affine expression in the parameters")))
}

/// Constraint chains such as `1 < alpha < beta`, `beta != 0`, `tau > 0`.
pub fn parse_constraint(text: &str, var: &str) -> Result<(Vec<Constraint>, bool), CrError> {
    let mut parts = Vec::new();
    let mut ops = Vec::new();
    let mut rest = text;
    loop {
        let hit = ["!=", "≠", "<", ">"].iter().filter_map(|op| rest.find(op).map(|i| (i, *op))).min();
        match hit {
            Some((i, op)) => {
                parts.push(rest[..i].trim());
                ops.push(op);
                rest = &rest[i + op.len()..];
            }
            None => {
                parts.push(rest.trim());
                break;
            }
        }
    }
    if ops.is_empty() {
        return Err(err(1, format!("no relation in constraint {text:?}")));
    }
    let mut cons = Vec::new();
    let mut t_positive = false;
    for (k, op) in ops.iter().enumerate() {
        let (l, r) = (parts[k], parts[k + 1]);
        if (l == var && *op == ">" && r == "0") || (r == var && *op == "<" && l == "0") {
            t_positive = true;
            continue;
        }
        let (a, b) = (parse_affine(l)?, parse_affine(r)?);
        cons.push(match *op {
            "<" => Constraint::Positive(b.sub(&a)),
            ">" => Constraint::Positive(a.sub(&b)),
            _ => Constraint::NonZero(a.sub(&b)),
        });
    }
    Ok((cons, t_positive))
}

/// `curve.v1` document.
#[derive(Debug, Clone, Deserialize)]
pub struct CurveJson {
    pub schema: String,
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_var")]
    pub variable: String,
    pub components: Vec<String>,
    #[serde(default)]
    pub domain: Vec<String>,
    /// Optional values substituted for the parameters.
    #[serde(default)]
    pub params: std::collections::BTreeMap<String, String>,
    /// Expected verdicts, checked by `verify-paper`.
    #[serde(default)]
    pub expect: Option<serde_json::Value>,
}

fn default_var() -> String {
    "t".into()
}

impl CurveJson {
    pub fn to_curve(&self) -> Result<Curve, CrError> {
        if self.schema != "curve.v1" {
            return Err(CrError::InvalidCurve(format!("schema {:?}, expected \"curve.v1\"", self.schema)));
        }
        if self.components.len() != 4 {
            return Err(CrError::InvalidCurve(format!("{} components, expected 4", self.components.len())));
        }
        let chart = Chart::new(&[self.variable.as_str()], Some(0));
        let comps: Vec<F> = self
            .components
            .iter()
            .enumerate()
            .map(|(k, s)| parse_function(s, &chart).map_err(|e| CrError::InvalidCurve(format!("component {k}: {e}"))))
            .collect::<Result<_, _>>()?;
        let mut domain = Domain::default();
        for d in &self.domain {
            let (cons, tp) = parse_constraint(d, &self.variable).map_err(|e| CrError::InvalidCurve(format!("domain {d:?}: {e}")))?;
            domain.params.extend(cons);
            domain.t_positive |= tp;
        }
        let comps: [F; 4] = comps.try_into().expect("four components");
        if comps.iter().all(F::is_zero) {
            return Err(CrError::InvalidCurve("all components vanish".into()));
        }
        let mut curve = Curve::new(&self.name, &self.variable, comps, domain);
        if !self.params.is_empty() {
            let mut vals = [BigRational::zero(), BigRational::zero()];
            let mut seen = [false; 2];
            for (k, v) in &self.params {
                let j = param_index(k).ok_or_else(|| CrError::InvalidCurve(format!("unknown parameter {k:?}")))?;
                let a = parse_affine(v)?;
                if !a.is_constant() {
                    return Err(CrError::InvalidCurve(format!("parameter value {v:?} is not a number")));
                }
                vals[j] = a.0[0].clone();
                seen[j] = true;
            }
            let used = curve.params();
            if let Some(j) = used.iter().find(|&&j| !seen[j]) {
                return Err(CrError::InvalidCurve(format!("no value for parameter {}", super::func::PARAM_NAMES[*j])));
            }
            if !curve.domain.admits(&vals) {
                return Err(CrError::InvalidCurve("parameter values violate the domain".into()));
            }
            curve = curve.specialize(&vals);
        }
        Ok(curve)
    }
}

pub fn parse_curve_json(text: &str) -> Result<Curve, CrError> {
    let doc: CurveJson = serde_json::from_str(text).map_err(|e| CrError::InvalidCurve(format!("line {} column {}: {e}", e.line(), e.column())))?;
    doc.to_curve()
}

/// Parameter polynomial from text (used by catalog generator entries).
pub fn parse_param_poly(text: &str) -> Result<ParamPoly, CrError> {
    let chart = Chart::new(&["\u{0}"], Some(0));
    let f = parse_function(text, &chart)?;
    f.numerator().param_value().filter(|_| f.denominator_factors().is_empty()).ok_or_else(|| err(1, format!("{text:?} is not a parameter polynomial")))
}
