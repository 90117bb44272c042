//! Serializable reports for curves and tubes, and checks of the expectations
//! embedded in `curve.v1` documents.

use serde::Serialize;
use serde_json::Value;

use super::curve::{curve_nondegenerate, Curve, Decision};
use super::func::CoordFunction;
use super::parse::{parse_curve_json, CurveJson};
use super::symmetry::{is_cr_symmetry, Candidate};
use super::tube::{build_tube, check_bracket_inclusions, format_coeffs, freeman, normalized_sections, FreemanRanks, TubeModel, Variant};
use super::CrError;

#[derive(Debug, Clone, Serialize)]
pub struct CurveReport {
    pub name: String,
    pub variable: String,
    pub components: Vec<String>,
    pub domain: Vec<String>,
    pub wronskian: String,
    pub nondegenerate: Decision,
    pub factors: Vec<String>,
    pub locus: Vec<String>,
}

pub fn curve_report(c: &Curve) -> CurveReport {
    let n = curve_nondegenerate(c);
    CurveReport {
        name: c.name.clone(),
        variable: c.var().to_string(),
        components: c.comps.iter().map(|f| f.format(&c.chart)).collect(),
        domain: c.domain.describe(c.var()),
        wronskian: n.wronskian,
        nondegenerate: n.decision,
        factors: n.factors,
        locus: n.locus,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionsReport {
    pub x10: Vec<String>,
    pub y10: Vec<String>,
    pub z10: Vec<String>,
    pub verified: bool,
    pub gauge: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionSummary {
    pub bracket: String,
    pub target: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrySummary {
    pub name: String,
    pub is_symmetry: bool,
    pub residue: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TubeReport {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    pub chart: Vec<String>,
    pub excluded: Vec<String>,
    pub ranks: FreemanRanks,
    pub three_nondegenerate: bool,
    /// Kernels as coefficient vectors in the frame `Z_a`.
    pub k10: Vec<Vec<String>>,
    pub l10: Vec<Vec<String>>,
    /// Pivots assumed nonzero while computing the kernels.
    pub genericity_loci: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inclusions: Option<Vec<InclusionSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sections: Option<SectionsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetries: Option<Vec<SymmetrySummary>>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TubeOptions {
    pub inclusions: bool,
    pub sections: bool,
    pub symmetries: bool,
}

pub fn tube_report(m: &TubeModel, opts: TubeOptions) -> Result<TubeReport, CrError> {
    let f = freeman(m)?;
    let ranks = f.ranks();
    let fmt = |vs: &[Vec<CoordFunction>]| vs.iter().map(|v| format_coeffs(m, v)).collect::<Vec<_>>();
    let mut loci: Vec<String> = f.forms.iter().flat_map(|l| l.loci.iter().map(|x| format!("{} ≠ 0", x.format(&m.chart)))).collect();
    loci.sort();
    loci.dedup();
    let inclusions = if opts.inclusions {
        let rep = check_bracket_inclusions(m)?;
        Some(
            rep.rows
                .into_iter()
                .map(|r| InclusionSummary { bracket: format!("[{}, {}]", r.left, r.right), target: r.target, passed: r.passed, violations: r.violations })
                .collect(),
        )
    } else {
        None
    };
    let sections = if opts.sections && ranks.three_nondegenerate() {
        let n = normalized_sections(m)?;
        Some(SectionsReport { x10: format_coeffs(m, &n.x10), y10: format_coeffs(m, &n.y10), z10: format_coeffs(m, &n.z10), verified: n.verified, gauge: n.gauge })
    } else {
        None
    };
    let symmetries = if opts.symmetries {
        let mut out = Vec::new();
        let mut cands = vec![("rho".to_string(), Candidate::identity())];
        cands.extend((0..4).map(|k| (format!("p{k}"), Candidate::Translation(k))));
        for (name, c) in cands {
            let s = is_cr_symmetry(m, &c)?;
            out.push(SymmetrySummary { name, is_symmetry: s.is_symmetry, residue: s.residue });
        }
        Some(out)
    } else {
        None
    };
    Ok(TubeReport {
        label: m.label.clone(),
        variant: m.variant,
        chart: m.chart.names.clone(),
        excluded: m.excluded.clone(),
        three_nondegenerate: ranks.three_nondegenerate(),
        ranks,
        k10: fmt(&f.k10),
        l10: fmt(&f.l10),
        genericity_loci: loci,
        inclusions,
        sections,
        symmetries,
    })
}

pub fn parse_variant(s: &str) -> Result<Variant, CrError> {
    match s {
        "tangent" | "tangent_variety" => Ok(Variant::TangentVariety),
        "osculating" | "osculating_ruled" => Ok(Variant::OsculatingRuled),
        _ => Err(CrError::InvalidCurve(format!("unknown tube variant {s:?} (expected \"tangent\" or \"osculating\")"))),
    }
}

/// Compare a `curve.v1` document against its `expect` block:
/// `wronskian`, `nondegenerate` and a `tube` object with `variant`, `ranks`,
/// `hol_nondeg`, `bracket_generating`, `inclusions` (`"pass"`/`"fail"`) and
/// `sections_verified`. Returns `(name, passed, detail)` triples.
pub fn curve_expectations(text: &str) -> Result<Vec<(String, bool, String)>, CrError> {
    let doc: CurveJson = serde_json::from_str(text).map_err(|e| CrError::InvalidCurve(e.to_string()))?;
    let curve = parse_curve_json(text)?;
    let mut out = Vec::new();
    let Some(expect) = &doc.expect else { return Ok(out) };
    let rep = curve_report(&curve);
    if let Some(w) = expect.get("wronskian").and_then(Value::as_str) {
        out.push(("wronskian".into(), rep.wronskian == w, rep.wronskian.clone()));
    }
    if let Some(n) = expect.get("nondegenerate").and_then(Value::as_str) {
        let got = serde_json::to_value(rep.nondegenerate).expect("serializable");
        out.push(("nondegenerate".into(), got == n, format!("{got}")));
    }
    if let Some(t) = expect.get("tube") {
        let variant = parse_variant(t.get("variant").and_then(Value::as_str).unwrap_or("tangent"))?;
        let m = build_tube(&curve, variant)?;
        let opts = TubeOptions { inclusions: t.get("inclusions").is_some(), sections: t.get("sections_verified").is_some(), symmetries: false };
        let tr = tube_report(&m, opts)?;
        if let Some(b) = t.get("bracket_generating").and_then(Value::as_bool) {
            out.push(("bracket generating".into(), tr.ranks.bracket_generating == b, format!("{}", tr.ranks.bracket_generating)));
        }
        if let Some(r) = t.get("ranks").and_then(Value::as_array) {
            let want: Vec<u64> = r.iter().filter_map(Value::as_u64).collect();
            let got = vec![tr.ranks.d10 as u64, tr.ranks.k10 as u64, tr.ranks.l10 as u64];
            out.push(("Freeman ranks".into(), got == want, format!("{got:?}")));
        }
        if let Some(h) = t.get("hol_nondeg").and_then(Value::as_bool) {
            out.push(("holomorphically nondegenerate".into(), tr.ranks.hol_nondeg == h, format!("{}", tr.ranks.hol_nondeg)));
        }
        if let (Some(want), Some(rows)) = (t.get("inclusions").and_then(Value::as_str), &tr.inclusions) {
            let pass = rows.iter().all(|r| r.passed);
            out.push(("bracket inclusions".into(), (want == "pass") == pass, if pass { "pass".into() } else { "fail".into() }));
        }
        if let Some(v) = t.get("sections_verified").and_then(Value::as_bool) {
            let got = tr.sections.as_ref().is_some_and(|s| s.verified);
            out.push(("normalized sections".into(), got == v, format!("{got}")));
        }
    }
    Ok(out)
}
