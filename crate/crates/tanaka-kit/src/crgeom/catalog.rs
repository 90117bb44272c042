//! Locally homogeneous nondegenerate curves in RP³ and their generators.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::curve::{jordan_nondegenerate, Curve, JordanReport};
use super::func::{CoordFunction, ParamPoly, NPARAM};
use super::parse::{parse_constraint, parse_function, parse_param_poly};
use super::CrError;
use crate::scalars::rat;

type F = CoordFunction;

/// How the one-parameter group moves along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flow {
    /// `v·γ = τ dγ/dτ` (scaling in `τ > 0`).
    Scaling,
    /// `v·γ = dγ/dt`.
    Translation,
}

#[derive(Debug, Clone)]
pub struct HomogeneousCurve {
    pub segre: String,
    pub label: String,
    pub curve: Curve,
    /// Generator of the projective symmetry, entries in the parameters.
    pub v: [[ParamPoly; 4]; 4],
    pub flow: Flow,
    /// An admissible parameter point.
    pub sample: [BigRational; NPARAM],
}

struct Row {
    segre: &'static str,
    label: &'static str,
    var: &'static str,
    comps: [&'static str; 4],
    domain: &'static [&'static str],
    v: [[&'static str; 4]; 4],
    sample: (i64, i64),
}

const ROWS: &[Row] = &[
    Row {
        segre: "(1111)",
        label: "γ_αβ",
        var: "tau",
        comps: ["1", "tau", "tau^alpha", "tau^beta"],
        domain: &["tau > 0", "1 < alpha < beta"],
        v: [["0", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "alpha", "0"], ["0", "0", "0", "beta"]],
        sample: (2, 4),
    },
    Row {
        segre: "(211)",
        label: "γ_β",
        var: "tau",
        comps: ["1", "ln(tau)", "tau^(beta-1)", "tau^(-beta-3)"],
        domain: &["tau > 0", "beta != 1", "beta != -1", "beta != -3"],
        v: [["0", "0", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "beta-1", "0"], ["0", "0", "0", "-beta-3"]],
        sample: (0, 2),
    },
    Row {
        segre: "(211)",
        label: "γ_∞",
        var: "tau",
        comps: ["1", "ln(tau)", "tau", "tau^(-1)"],
        domain: &["tau > 0"],
        v: [["0", "0", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "-1"]],
        sample: (0, 0),
    },
    Row {
        segre: "(31)",
        label: "γ",
        var: "tau",
        comps: ["1", "ln(tau)", "ln(tau)^2", "tau^(-4)"],
        domain: &["tau > 0"],
        v: [["0", "0", "0", "0"], ["1", "0", "0", "0"], ["0", "2", "0", "0"], ["0", "0", "0", "-4"]],
        sample: (0, 0),
    },
    Row {
        segre: "(22)",
        label: "γ",
        var: "tau",
        comps: ["1", "ln(tau)", "tau^(-2)", "tau^(-2)*ln(tau)"],
        domain: &["tau > 0"],
        v: [["0", "0", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "-2", "0"], ["0", "0", "1", "-2"]],
        sample: (0, 0),
    },
    Row {
        segre: "(4)",
        label: "γ",
        var: "tau",
        comps: ["1", "tau", "tau^2", "tau^3"],
        domain: &["tau > 0"],
        v: [["0", "0", "0", "0"], ["1", "0", "0", "0"], ["0", "2", "0", "0"], ["0", "0", "3", "0"]],
        sample: (0, 0),
    },
    Row {
        segre: "(1ᶜ11)",
        label: "γ_αβ",
        var: "t",
        comps: ["cos(beta*t)", "sin(beta*t)", "exp((alpha-1)*t)", "exp(-(alpha+3)*t)"],
        domain: &["alpha != -1", "beta != 0"],
        v: [["0", "-beta", "0", "0"], ["beta", "0", "0", "0"], ["0", "0", "alpha-1", "0"], ["0", "0", "0", "-alpha-3"]],
        sample: (2, 3),
    },
    Row {
        segre: "(1ᶜ11)",
        label: "γ_∞β",
        var: "t",
        comps: ["cos(beta*t)", "sin(beta*t)", "exp(t)", "exp(-t)"],
        domain: &["beta != 0"],
        v: [["0", "-beta", "0", "0"], ["beta", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "-1"]],
        sample: (0, 1),
    },
    Row {
        segre: "(1ᶜ2)",
        label: "γ_β",
        var: "t",
        comps: ["cos(beta*t)", "sin(beta*t)", "t*exp(-2*t)", "exp(-2*t)"],
        domain: &["beta != 0"],
        v: [["0", "-beta", "0", "0"], ["beta", "0", "0", "0"], ["0", "0", "-2", "1"], ["0", "0", "0", "-2"]],
        sample: (0, 1),
    },
    Row {
        segre: "(2ᶜ)",
        label: "γ",
        var: "t",
        comps: ["cos(t)", "sin(t)", "t*cos(t)", "t*sin(t)"],
        domain: &[],
        v: [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["1", "0", "0", "-1"], ["0", "1", "1", "0"]],
        sample: (0, 0),
    },
    Row {
        segre: "(1ᶜ1ᶜ)",
        label: "γ_αβ",
        var: "t",
        comps: ["cos(alpha*t)", "sin(alpha*t)", "exp(-2*t)*cos(beta*t)", "exp(-2*t)*sin(beta*t)"],
        domain: &["alpha != 0", "beta != 0"],
        v: [["0", "-alpha", "0", "0"], ["alpha", "0", "0", "0"], ["0", "0", "-2", "-beta"], ["0", "0", "beta", "-2"]],
        sample: (1, 2),
    },
    Row {
        segre: "(1ᶜ1ᶜ)",
        label: "γ_β",
        var: "t",
        comps: ["cos(t)", "sin(t)", "cos(beta*t)", "sin(beta*t)"],
        domain: &["beta != 0", "beta != 1", "beta != -1"],
        v: [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-beta"], ["0", "0", "beta", "0"]],
        sample: (0, 2),
    },
];

fn build(row: &Row) -> Result<HomogeneousCurve, CrError> {
    let chart = super::func::Chart::new(&[row.var], Some(0));
    let comps: Vec<F> = row.comps.iter().map(|s| parse_function(s, &chart)).collect::<Result<_, _>>()?;
    let mut domain = super::curve::Domain::default();
    for d in row.domain {
        let (cons, tp) = parse_constraint(d, row.var)?;
        domain.params.extend(cons);
        domain.t_positive |= tp;
    }
    let mut curve = Curve::new(&format!("{} {}", row.segre, row.label), row.var, comps.try_into().expect("four"), domain);
    curve.segre = Some(row.segre.to_string());
    let mut v: [[ParamPoly; 4]; 4] = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            v[i][j] = parse_param_poly(row.v[i][j])?;
        }
    }
    let flow = if row.var == "tau" && row.segre != "(4)" { Flow::Scaling } else { Flow::Translation };
    Ok(HomogeneousCurve {
        segre: row.segre.into(),
        label: row.label.into(),
        curve,
        v,
        flow,
        sample: [rat(row.sample.0, 1), rat(row.sample.1, 1)],
    })
}

/// The twelve rows of the classification table.
pub fn catalog() -> Vec<HomogeneousCurve> {
    ROWS.iter().map(|r| build(r).expect("catalog rows parse")).collect()
}

impl HomogeneousCurve {
    pub fn name(&self) -> String {
        format!("{} {}", self.segre, self.label)
    }
    /// `v·γ` equals the flow derivative of `γ`, symbolically in the parameters.
    pub fn generator_consistent(&self) -> bool {
        let c = &self.curve;
        let d = c.derivative(1);
        let t = F::coord(&c.chart, 0);
        (0..4).all(|i| {
            let lhs = (0..4).fold(F::zero(), |acc, j| acc.add(&F::from(super::func::GenPoly::constant(self.v[i][j].clone())).mul(&c.comps[j])));
            let rhs = match self.flow {
                Flow::Scaling => t.mul(&d[i]),
                Flow::Translation => d[i].clone(),
            };
            lhs == rhs
        })
    }
    pub fn admits(&self, p: &[BigRational; NPARAM]) -> bool {
        self.curve.domain.admits(p)
    }
    pub fn instantiate(&self, p: &[BigRational; NPARAM]) -> Result<Curve, CrError> {
        if !self.admits(p) {
            return Err(CrError::InvalidCurve(format!("{}: parameters outside {}", self.name(), self.curve.domain.describe(self.curve.var()).join(", "))));
        }
        Ok(self.curve.specialize(p))
    }
    /// `v` at a parameter point; entries are real.
    pub fn v_at(&self, p: &[BigRational; NPARAM]) -> [[BigRational; 4]; 4] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let g = self.v[i][j].eval(p);
                debug_assert!(g.im.is_zero());
                g.re
            })
        })
    }
    pub fn jordan(&self, p: &[BigRational; NPARAM]) -> JordanReport {
        jordan_nondegenerate(&self.v_at(p))
    }
    /// Whether this is the rational normal curve, whose tube is maximally
    /// symmetric.
    pub fn is_rational_normal(&self, p: &[BigRational; NPARAM]) -> bool {
        self.segre == "(4)" || (self.segre == "(1111)" && p[0] == rat(2, 1) && p[1] == rat(3, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_generated_by_v() {
        let cat = catalog();
        assert_eq!(cat.len(), 12);
        for hc in &cat {
            assert!(hc.generator_consistent(), "{}", hc.name());
            assert!(hc.admits(&hc.sample), "{}", hc.name());
        }
    }
}

