use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use tanaka_kit::crgeom::catalog::catalog;
use tanaka_kit::crgeom::curve::Decision;
use tanaka_kit::crgeom::parse::parse_curve_json;
use tanaka_kit::crgeom::report::{curve_expectations, curve_report, parse_variant, tube_report, TubeOptions};
use tanaka_kit::crgeom::symmetry::tube_symmetry_algebra;
use tanaka_kit::crgeom::tube::{build_hyperquadric, build_tube};
use tanaka_kit::deform::{branch_text, eliminate, eliminate_streaming, jacobi_system, DeformCase, DeformReport};
use tanaka_kit::liealg::LieAlgebra;
use tanaka_kit::prolong::{tanaka_prolong, SymbolAlgebra};
use tanaka_kit::verify;

#[derive(Parser)]
#[command(name = "tanaka-kit", version, about = "Exact Tanaka prolongation, filtered-deformation and tube CR-geometry computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Machine-readable JSON report.
    #[arg(long)]
    json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tanaka prolongation of a graded symbol algebra (`liealg.v1`).
    Prolong {
        fixture: PathBuf,
        /// Highest positive degree to compute.
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Jacobi obstructions to filtered deformations (`deform.v1`).
    Deform {
        #[arg(required = true)]
        fixtures: Vec<PathBuf>,
        /// Also report the verdict with each pinned relation dropped.
        #[arg(long)]
        sensitivity: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Freeman filtration of the tube over a curve (`curve.v1`), or of the
    /// hyperquadric when the input is `hyperquadric`.
    Tube {
        input: String,
        /// `tangent` (ψ = rγ + sγ') or `osculating` (ψ = γ + rγ' + sγ'').
        #[arg(long, default_value = "tangent")]
        variant: String,
        /// Check the bracket-inclusion table.
        #[arg(long)]
        inclusions: bool,
        /// Compute normalized sections X₁₀, Y₁₀, Z₁₀.
        #[arg(long)]
        sections: bool,
        /// Test ρ and the imaginary translations as CR symmetries.
        #[arg(long)]
        symmetries: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Wronskian nondegeneracy of a curve (`curve.v1`).
    Curve {
        fixture: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// The homogeneous nondegenerate curves and their generators.
    Catalog {
        /// Verify the symmetry algebra of each tube at its sample parameters.
        #[arg(long)]
        symmetries: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Run every acceptance criterion and the fixture expectations.
    VerifyPaper {
        #[arg(long, value_name = "DIR")]
        fixtures: Option<PathBuf>,
        /// Criteria to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Print wall-clock times (makes the output nondeterministic).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        out: Output,
    },
}

/// Failure modes mapped to exit codes.
enum Failure {
    /// Verdicts disagree with expectations: exit 1.
    Mismatch(String),
    /// Unreadable or malformed input: exit 2.
    Input(String),
}

type Outcome = Result<(), Failure>;

fn input_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn emit(out: &Output, text: String) -> Outcome {
    match &out.output {
        Some(p) => std::fs::write(p, text).map_err(|e| input_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable report") + "\n"
}

fn jobs() -> Result<(), Failure> {
    let Ok(v) = std::env::var("TANAKA_KIT_JOBS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::Input(format!("TANAKA_KIT_JOBS={v:?}: expected a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Input(e.to_string()))
}

fn prolong(fixture: &Path, kmax: usize, out: &Output) -> Outcome {
    let alg = LieAlgebra::load(fixture).map_err(|e| input_err(fixture, e))?;
    let sym = SymbolAlgebra::new(alg).map_err(|e| input_err(fixture, e))?;
    let rep = tanaka_prolong(&sym, kmax).map_err(|e| input_err(fixture, e))?.report();
    if out.json {
        return emit(out, to_json(&rep));
    }
    let mut s = format!("dims {:?}\ntotal {}\n", rep.dims, rep.total);
    if !rep.terminated {
        s.push_str(&format!("not terminated at degree {kmax}\n"));
    }
    for b in &rep.basis {
        s.push_str(&format!("  {} (degree {}): {}\n", b.name, b.degree, b.cochain));
    }
    for a in &rep.genericity_assumptions {
        s.push_str(&format!("assuming {a}\n"));
    }
    emit(out, s)
}

fn deform(fixtures: &[PathBuf], sensitivity: bool, out: &Output) -> Outcome {
    let cases: Vec<DeformCase> = fixtures.iter().map(|p| DeformCase::load(p).map_err(|e| input_err(p, e))).collect::<Result<_, _>>()?;
    let systems = cases.iter().zip(fixtures).map(|(c, p)| c.system().map_err(|e| input_err(p, e))).collect::<Result<Vec<_>, _>>()?;
    let mut reports = Vec::new();
    if out.json || out.output.is_some() {
        let done: Vec<(DeformReport, String)> = cases
            .par_iter()
            .zip(&systems)
            .map(|(case, ds)| {
                let el = eliminate(ds);
                let mut rep = DeformReport::new(case, ds, &el);
                if sensitivity {
                    rep.sensitivity = case.sensitivity().unwrap_or_default();
                }
                let trace = format!("{}\n{}verdict {:?}\n", case.name, DeformReport::trace_text(ds, &el), rep.verdict);
                (rep, trace)
            })
            .collect();
        let text = if out.json { to_json(&done.iter().map(|(r, _)| r).collect::<Vec<_>>()) } else { done.iter().map(|(_, t)| t.as_str()).collect() };
        reports = done.into_iter().map(|(r, _)| r).collect();
        emit(out, text)?;
    } else {
        // stream each branch as it terminates
        let stdout = std::io::stdout();
        for (case, ds) in cases.iter().zip(&systems) {
            let eqs: Vec<_> = jacobi_system(ds).into_iter().map(|e| e.poly).collect();
            println!("{}: {} unknowns, {} variables, {} Jacobi equations", case.name, ds.unknowns.len(), ds.variables.len(), eqs.len());
            let mut index = 0;
            let el = eliminate_streaming(&eqs, |b| {
                let mut lock = stdout.lock();
                let _ = lock.write_all(branch_text(ds, index, b).as_bytes());
                let _ = lock.flush();
                index += 1;
            });
            let mut rep = DeformReport::new(case, ds, &el);
            println!("verdict {:?}", rep.verdict);
            if sensitivity {
                rep.sensitivity = case.sensitivity().map_err(|e| Failure::Input(e.to_string()))?;
                for s in &rep.sensitivity {
                    println!("  without {} ({}): {:?}", s.bracket, s.provenance, s.verdict_without);
                }
            }
            reports.push(rep);
        }
    }
    let mismatched: Vec<String> = reports
        .iter()
        .filter(|r| r.expected.as_deref().is_some_and(|e| e != format!("{:?}", r.verdict)) || r.branches.iter().any(|b| !b.replay_ok))
        .map(|r| r.name.clone())
        .collect();
    if mismatched.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("unexpected verdict or failed replay: {}", mismatched.join(", "))))
    }
}

fn tube(input: &str, variant: &str, opts: TubeOptions, out: &Output) -> Outcome {
    let path = Path::new(input);
    let model = if input == "hyperquadric" {
        build_hyperquadric()
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| input_err(path, e))?;
        let curve = parse_curve_json(&text).map_err(|e| input_err(path, e))?;
        let v = parse_variant(variant).map_err(|e| Failure::Input(e.to_string()))?;
        build_tube(&curve, v).map_err(|e| input_err(path, e))?
    };
    let rep = tube_report(&model, opts).map_err(|e| input_err(path, e))?;
    if out.json {
        return emit(out, to_json(&rep));
    }
    let r = rep.ranks;
    let mut s = format!("{}\n", rep.label);
    s.push_str(&format!("bracket generating {}\n", r.bracket_generating));
    s.push_str(&format!("ranks D10 {}, K10 {}, L10 {}, holomorphically nondegenerate {}\n", r.d10, r.k10, r.l10, r.hol_nondeg));
    s.push_str(&format!("3-nondegenerate {}\n", rep.three_nondegenerate));
    s.push_str(&format!("K10 = {:?}\nL10 = {:?}\n", rep.k10, rep.l10));
    for l in &rep.genericity_loci {
        s.push_str(&format!("assuming {l}\n"));
    }
    for x in &rep.excluded {
        s.push_str(&format!("excluded {x}\n"));
    }
    if let Some(rows) = &rep.inclusions {
        for row in rows {
            s.push_str(&format!("  {} ⊂ {}: {}\n", row.bracket, row.target, if row.passed { "ok" } else { "FAILS" }));
        }
    }
    if let Some(n) = &rep.sections {
        s.push_str(&format!("X10 = {:?}\nY10 = {:?}\nZ10 = {:?}\nverified {}\ngauge {}\n", n.x10, n.y10, n.z10, n.verified, n.gauge));
    }
    if let Some(sy) = &rep.symmetries {
        for g in sy {
            s.push_str(&format!("  {}: {} (residue {})\n", g.name, if g.is_symmetry { "symmetry" } else { "not a symmetry" }, g.residue));
        }
    }
    emit(out, s)
}

fn decision(d: Decision) -> &'static str {
    match d {
        Decision::True => "true",
        Decision::False => "false",
        Decision::Undecided => "undecided",
    }
}

fn curve(fixture: &Path, out: &Output) -> Outcome {
    let text = std::fs::read_to_string(fixture).map_err(|e| input_err(fixture, e))?;
    let c = parse_curve_json(&text).map_err(|e| input_err(fixture, e))?;
    let rep = curve_report(&c);
    let s = if out.json {
        to_json(&rep)
    } else {
        let mut s = format!("{}\nW = {}\nnondegenerate {}\n", rep.name, rep.wronskian, decision(rep.nondegenerate));
        for f in &rep.factors {
            s.push_str(&format!("  factor {f}\n"));
        }
        for l in &rep.locus {
            s.push_str(&format!("  {l}\n"));
        }
        s
    };
    emit(out, s)?;
    let failed: Vec<String> = curve_expectations(&text).map_err(|e| input_err(fixture, e))?.into_iter().filter(|(_, ok, _)| !ok).map(|(n, _, d)| format!("{n} ({d})")).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("expectation mismatch: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct CatalogRow {
    segre: String,
    label: String,
    components: Vec<String>,
    domain: Vec<String>,
    generator: Vec<Vec<String>>,
    wronskian: String,
    nondegenerate: Decision,
    sample: Vec<String>,
    jordan_nondegenerate_at_sample: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry_algebra: Option<tanaka_kit::crgeom::symmetry::SymmetryAlgebraReport>,
}

fn catalog_cmd(symmetries: bool, out: &Output) -> Outcome {
    let rows: Vec<CatalogRow> = catalog()
        .par_iter()
        .map(|hc| {
            let rep = curve_report(&hc.curve);
            CatalogRow {
                segre: hc.segre.clone(),
                label: hc.label.clone(),
                components: rep.components,
                domain: rep.domain,
                generator: hc.v.iter().map(|row| row.iter().map(|p| p.to_string()).collect()).collect(),
                wronskian: rep.wronskian,
                nondegenerate: rep.nondegenerate,
                sample: hc.sample.iter().map(|x| x.to_string()).collect(),
                jordan_nondegenerate_at_sample: hc.jordan(&hc.sample).nonderogatory,
                symmetry_algebra: symmetries.then(|| tube_symmetry_algebra(hc, &hc.sample).ok()).flatten(),
            }
        })
        .collect();
    let s = if out.json {
        to_json(&rows)
    } else {
        let mut s = String::new();
        for r in &rows {
            s.push_str(&format!("{} {}: [{}]\n", r.segre, r.label, r.components.join(" : ")));
            s.push_str(&format!("  W = {}  nondegenerate {}  Jordan at sample ({}) {}\n", r.wronskian, decision(r.nondegenerate), r.sample.join(", "), r.jordan_nondegenerate_at_sample));
            if let Some(a) = &r.symmetry_algebra {
                s.push_str(&format!("  symmetries verified {}  spec ad(v) [{}]{}\n", a.passed(), a.spectrum.join(", "), if a.maximal { "  (maximally symmetric)" } else { "" }));
            }
        }
        s
    };
    emit(out, s)?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.jordan_nondegenerate_at_sample || r.symmetry_algebra.as_ref().is_some_and(|a| !a.passed()) || (symmetries && r.symmetry_algebra.is_none()))
        .map(|r| format!("{} {}", r.segre, r.label))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("catalog rows failing: {}", bad.join(", "))))
    }
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    criteria: Vec<verify::Criterion>,
    fixtures: Vec<verify::Check>,
}

fn verify_paper(fixtures: Option<PathBuf>, only: &[u8], timings: bool, out: &Output) -> Outcome {
    let dir = fixtures.unwrap_or_else(|| PathBuf::from("fixtures"));
    if !dir.is_dir() {
        return Err(input_err(&dir, "fixture directory not found"));
    }
    let fx = verify::Fixtures::new(&dir);
    let ids: Vec<u8> = if only.is_empty() { (1..=verify::CRITERIA).collect() } else { only.to_vec() };
    let (criteria, fixture_checks) = rayon::join(|| verify::run_many(&ids, &fx), || if only.is_empty() { verify::fixture_expectations(&fx) } else { Vec::new() });
    let passed = criteria.iter().all(|c| c.passed) && fixture_checks.iter().all(|c| c.passed);
    let rep = VerifyReport { passed, criteria, fixtures: fixture_checks };
    let s = if out.json {
        to_json(&rep)
    } else {
        let mut s = String::new();
        for c in &rep.criteria {
            s.push_str(&c.line(timings));
            s.push('\n');
            for k in c.checks.iter().filter(|k| !k.passed) {
                s.push_str(&format!("    failed: {} {}\n", k.name, k.detail));
            }
        }
        if !rep.fixtures.is_empty() {
            let bad: Vec<&verify::Check> = rep.fixtures.iter().filter(|k| !k.passed).collect();
            s.push_str(&format!("fixtures      {}  {} expectations checked\n", if bad.is_empty() { "PASS" } else { "FAIL" }, rep.fixtures.len()));
            for k in bad {
                s.push_str(&format!("    failed: {} {}\n", k.name, k.detail));
            }
        }
        s
    };
    emit(out, s)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Mismatch("some criteria failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = jobs().and_then(|()| match &cli.command {
        Command::Prolong { fixture, kmax, out } => prolong(fixture, *kmax, out),
        Command::Deform { fixtures, sensitivity, out } => deform(fixtures, *sensitivity, out),
        Command::Tube { input, variant, inclusions, sections, symmetries, out } => {
            tube(input, variant, TubeOptions { inclusions: *inclusions, sections: *sections, symmetries: *symmetries }, out)
        }
        Command::Curve { fixture, out } => curve(fixture, out),
        Command::Catalog { symmetries, out } => catalog_cmd(*symmetries, out),
        Command::VerifyPaper { fixtures, only, timings, out } => verify_paper(fixtures.clone(), only, *timings, out),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
