//! Sparse polynomials in numbered variables with [`Scalar`] coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::scalars::{Gauss, Scalar};

/// Sorted `(variable, exponent)` pairs with positive exponents.
pub type Mono = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    m: usize,
    terms: BTreeMap<Mono, Scalar>,
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out: Mono = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

impl Poly {
    pub fn zero(m: usize) -> Self {
        Poly { m, terms: BTreeMap::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        let m = c.units();
        let mut p = Poly::zero(m);
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(m: usize, v: usize) -> Self {
        let mut p = Poly::zero(m);
        p.terms.insert(vec![(v, 1)], Scalar::one(m));
        p
    }

    pub fn units(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_empty())
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.get(&Vec::new()).cloned().unwrap_or_else(|| Scalar::zero(self.m)))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().map(|(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|k| k.iter().map(|(v, _)| *v)).collect()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().filter_map(|k| k.iter().find(|(w, _)| *w == v).map(|(_, e)| *e)).max().unwrap_or(0)
    }

    fn add_term(&mut self, k: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(e) => {
                *e += &c;
                if e.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Scalar::one(self.m))
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let mut out = Poly::zero(self.m);
        if c.is_zero() {
            return out;
        }
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.m);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.add_term(mono_mul(a, b), x * y);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(Scalar::one(self.m));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Coefficients of `v^0, v^1, …` as polynomials free of `v`.
    pub fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(self.m); d + 1];
        for (k, c) in &self.terms {
            let e = k.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e) as usize;
            let rest: Mono = k.iter().copied().filter(|(w, _)| *w != v).collect();
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// `Σ_k p_k·e^k` where `p_k` are the coefficients in `v`.
    pub fn substitute(&self, v: usize, e: &Poly) -> Poly {
        if self.degree_in(v) == 0 {
            return self.clone();
        }
        let cs = self.coefficients_in(v);
        let mut out = Poly::zero(self.m);
        let mut pw = Poly::constant(Scalar::one(self.m));
        for (k, c) in cs.iter().enumerate() {
            if k > 0 {
                pw = pw.mul(e);
            }
            if !c.is_zero() {
                out = out.add(&c.mul(&pw));
            }
        }
        out
    }

    /// Fraction-free substitution of `v = num/den`: `Σ p_k num^k den^{d−k}`
    /// with `d` the degree in `v`.
    pub fn substitute_fraction(&self, v: usize, num: &Poly, den: &Scalar) -> Poly {
        let cs = self.coefficients_in(v);
        let d = cs.len() - 1;
        if d == 0 {
            return self.clone();
        }
        let mut out = Poly::zero(self.m);
        for (k, c) in cs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&c.mul(&num.pow(k as u32)).scale(&den.pow((d - k) as u32)));
            }
        }
        out
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> Poly {
        let mut out = Poly::zero(self.m);
        for (k, c) in &self.terms {
            let c = f(c);
            out.m = c.units();
            out.add_term(k.clone(), c);
        }
        out
    }

    /// Divide by the leading coefficient when it is a unit.
    pub fn monic(&self) -> Poly {
        match self.terms.values().next_back() {
            Some(c) if c.is_unit() => self.scale(&c.inv_unit().expect("unit")),
            _ => self.clone(),
        }
    }

    /// Evaluate with variables and units replaced by Gaussian rationals.
    pub fn eval(&self, vars: &[Gauss], units: &[Gauss]) -> Gauss {
        let mut acc = Gauss::zero();
        for (k, c) in &self.terms {
            let mut t = eval_scalar(c, units);
            for (v, e) in k {
                for _ in 0..*e {
                    t = t.mul(&vars[*v]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.terms.iter().rev() {
            let mono: Vec<String> = k
                .iter()
                .map(|(v, e)| if *e == 1 { names[*v].clone() } else { format!("{}^{e}", names[*v]) })
                .collect();
            let text = c.to_string();
            let (neg, body) = match (c.is_unit(), text.strip_prefix('-')) {
                (true, Some(rest)) => (true, rest.to_string()),
                (true, None) => (false, text),
                (false, _) => (false, format!("({text})")),
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

/// Evaluate a scalar with `u_j ↦ units[j]`.
pub fn eval_scalar(c: &Scalar, units: &[Gauss]) -> Gauss {
    let mut acc = Gauss::zero();
    for (exps, g) in c.terms() {
        let mut t = g.clone();
        for (j, e) in exps.iter().enumerate() {
            let b = if *e < 0 { units[j].inv().expect("nonzero unit value") } else { units[j].clone() };
            for _ in 0..e.unsigned_abs() {
                t = t.mul(&b);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..=self.vars().last().copied().unwrap_or(0)).map(|v| format!("v{v}")).collect();
        f.write_str(&self.format(&names))
    }
}
