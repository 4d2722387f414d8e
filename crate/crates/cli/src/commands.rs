//! One function per subcommand; each prints a report and returns the exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use linfty_core::coalgebra::{check_equivariance, coderivation_square, compose_formal, MorphismComponents};
use linfty_core::deformation::{
    base_change, check_weighted_equivariance, check_window_morphism, deformation_from_morphism, semiuniversal_deformation,
    tangent_base, tangent_complex, unidef_correspondence, universal_deformation, FormalDgManifold,
    Window,
};
use linfty_core::io::{self, Document, Kind};
use linfty_core::linfty::{check_linfty, check_lmorphism, DglAxiom};
use linfty_core::report::{CheckReport, Failure, Status};
use linfty_core::trees::{enumerate_ot, sign_e, weight_w, Node};
use linfty_core::{build_splitting, contractible_factor, decompose as split_dgl, minimal_model, transfer_morphism, Dgl, HodgeData};
use linfty_core::scalar::format_scalar;
use serde::Serialize;

use crate::report::{FailureInfo, Report, WindowInfo};
use crate::{Flags, Format};

const DEFAULT_ARITY: usize = 4;
const DEFAULT_POLY_DEGREE: usize = 3;
pub const MAX_ARITY_VAR: &str = "LINFTY_MAX_ARITY";

/// A usage error: bad flags, environment or input shape.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(String);

fn usage<T>(message: impl Into<String>) -> Result<T> {
    Err(Usage(message.into()).into())
}

/// 2 for usage and parse errors, 1 for unmet mathematical preconditions.
pub fn exit_code(error: &anyhow::Error) -> u8 {
    if error.downcast_ref::<Usage>().is_some() || error.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    match error.downcast_ref::<linfty_core::Error>() {
        Some(linfty_core::Error::Precondition(_)) => 1,
        _ => 2,
    }
}

fn cap() -> Result<Option<usize>> {
    match std::env::var(MAX_ARITY_VAR) {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) => Ok(Some(n)),
            Err(_) => usage(format!("{MAX_ARITY_VAR}={text:?} is not a nonnegative integer")),
        },
        Err(_) => Ok(None),
    }
}

/// Flag, then document option, then the default; never above the cap.
fn resolve_arity(flags: &Flags, doc: Option<&Document>) -> Result<usize> {
    let arity = flags.arity.or(doc.and_then(|d| d.options.arity)).unwrap_or(DEFAULT_ARITY);
    if arity == 0 {
        return usage("the arity bound must be at least 1");
    }
    if let Some(limit) = cap()? {
        if arity > limit {
            return usage(format!("arity {arity} exceeds {MAX_ARITY_VAR}={limit}"));
        }
    }
    Ok(arity)
}

fn resolve_poly_degree(flags: &Flags, doc: Option<&Document>) -> usize {
    flags.poly_degree.or(doc.and_then(|d| d.options.poly_degree)).unwrap_or(DEFAULT_POLY_DEGREE)
}

fn load(path: &Path, flags: &Flags) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut doc = io::parse(&text)?;
    if doc.kind == Kind::RandomDgl {
        if let Some(seed) = flags.seed {
            doc.options.seed = Some(seed);
        }
    }
    Ok(doc)
}

fn seed_of(doc: &Document) -> Option<u64> {
    (doc.kind == Kind::RandomDgl).then(|| doc.options.seed.unwrap_or(0))
}

fn stem(path: &Path) -> String {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    name.strip_suffix(".json").unwrap_or(name).to_string()
}

fn write_output(flags: &Flags, name: String, doc: &Document, report: &mut Report) -> Result<()> {
    let dir = flags.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, doc.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
    report.outputs.push(path.display().to_string());
    Ok(())
}

fn emit(report: &Report, flags: &Flags) -> ExitCode {
    match flags.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    match report.status {
        Status::Fail => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}

fn kebab(value: impl Serialize) -> String {
    serde_json::to_value(value).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn axiom_name(axiom: DglAxiom) -> &'static str {
    match axiom {
        DglAxiom::DifferentialSquare => "differential-square",
        DglAxiom::Antisymmetry => "antisymmetry",
        DglAxiom::Jacobi => "jacobi",
        DglAxiom::Leibniz => "leibniz",
    }
}

fn square_report(manifold: &FormalDgManifold) -> CheckReport {
    let square = coderivation_square(manifold.vector_field());
    let first_failure = square.components().iter().find_map(|c| {
        c.entries().iter().next().map(|(word, value)| Failure { arity: c.arity(), word: word.clone(), residual: value.clone() })
    });
    CheckReport { max_arity: manifold.max_arity(), first_failure }
}

pub fn check(path: &Path, flags: &Flags) -> Result<ExitCode> {
    let doc = load(path, flags)?;
    let arity = resolve_arity(flags, Some(&doc))?;
    let mut report = Report::new("check", WindowInfo { arity, poly_degree: None }, seed_of(&doc));
    report.fact("kind", doc.kind);
    match doc.kind {
        Kind::Dgl | Kind::RandomDgl => {
            let (d, bracket) = match doc.kind {
                Kind::Dgl => io::dgl_parts(&doc)?,
                _ => {
                    let g = io::dgl(&doc)?;
                    (g.differential().clone(), g.bracket().clone())
                }
            };
            if let Some((axiom, failure)) = Dgl::first_violation(&d, &bracket)? {
                let module = d.source();
                report.fail(FailureInfo::new(axiom_name(axiom), &failure, module, module));
            }
        }
        Kind::Linfty => {
            let algebra = io::linfty_unchecked(&doc, arity)?;
            report.absorb("generalized-jacobi", &check_linfty(&algebra), algebra.module(), algebra.module());
        }
        Kind::FormalManifold => {
            let manifold = io::formal_manifold(&doc, arity)?;
            report.absorb("square-zero", &square_report(&manifold), manifold.module(), manifold.module());
        }
        Kind::Morphism if io::is_formal_morphism(&doc) => {
            let (source, target, f) = io::formal_morphism(&doc, arity)?;
            report.absorb("source-square-zero", &square_report(&source), source.module(), source.module());
            report.absorb("target-square-zero", &square_report(&target), target.module(), target.module());
            let weights = io::morphism_ends(&doc)?.1.weights.unwrap_or_else(|| vec![0; target.module().dim()]);
            if weights.len() != target.module().dim() {
                return usage("one weight per target coordinate is required");
            }
            let a = arity.min(f.max_arity());
            let equivariance = check_weighted_equivariance(
                &f.truncated(a),
                &source.vector_field().truncated(a),
                &target.vector_field().truncated(a),
                a,
                |j| weights[j],
            )?;
            report.absorb("equivariance", &equivariance, f.source(), f.target());
        }
        Kind::Morphism => {
            let morphism = io::linfty_morphism(&doc, arity)?;
            for (name, algebra) in [("source", morphism.source()), ("target", morphism.target())] {
                report.absorb(&format!("{name}-generalized-jacobi"), &check_linfty(algebra), algebra.module(), algebra.module());
            }
            let morphism_report = check_lmorphism(&morphism)?;
            report.absorb("morphism", &morphism_report, morphism.source().module(), morphism.target().module());
        }
        Kind::Deformation => {
            let deformation = io::deformation(&doc, arity)?;
            if let Some((axiom, failure)) = deformation.first_defect() {
                let module = deformation.product().module();
                report.fail(FailureInfo::new(&kebab(axiom), &failure, module, module));
            }
            report.fact("base_dim", deformation.base().module().dim());
            report.fact("fiber_dim", deformation.fiber().module().dim());
        }
    }
    Ok(emit(&report, flags))
}

struct Transferred {
    dgl: Dgl,
    hodge: HodgeData,
    minimal: linfty_core::LInftyAlgebra,
    morphism: linfty_core::LInftyMorphism,
}

fn run_transfer(doc: &Document, arity: usize, report: &mut Report) -> Result<Transferred> {
    let dgl = io::dgl(doc)?;
    let splitting = build_splitting(&dgl);
    report.provenance("pivots", splitting.pivots());
    let hodge = HodgeData::new(&dgl, &splitting)?;
    let minimal = minimal_model(&hodge, arity)?;
    let morphism = transfer_morphism(&hodge, &minimal)?;
    report.fact("dim_l", dgl.module().dim());
    report.fact("dim_h", hodge.homology().dim());
    report.fact("dim_f", hodge.contractible().dim());
    Ok(Transferred { dgl, hodge, minimal, morphism })
}

pub fn transfer(path: &Path, flags: &Flags) -> Result<ExitCode> {
    let doc = load(path, flags)?;
    let arity = resolve_arity(flags, Some(&doc))?;
    let mut report = Report::new("transfer", WindowInfo { arity, poly_degree: None }, seed_of(&doc));
    let t = run_transfer(&doc, arity, &mut report)?;
    let h = t.minimal.module();
    report.absorb("generalized-jacobi", &check_linfty(&t.minimal), h, h);
    report.absorb("morphism", &check_lmorphism(&t.morphism)?, h, t.dgl.module());
    let nonzero: Vec<usize> = (2..=arity).filter(|&n| !t.minimal.mu(n).is_zero()).collect();
    report.fact("nonzero_brackets", nonzero);
    let minimal_doc = io::linfty_document(&t.minimal, true);
    let morphism_doc = io::linfty_morphism_document(&t.morphism, minimal_doc.clone(), io::dgl_document(&t.dgl), true);
    let name = stem(path);
    write_output(flags, format!("{name}.minimal.json"), &minimal_doc, &mut report)?;
    write_output(flags, format!("{name}.morphism.json"), &morphism_doc, &mut report)?;
    Ok(emit(&report, flags))
}

pub fn decompose(path: &Path, flags: &Flags) -> Result<ExitCode> {
    let doc = load(path, flags)?;
    let arity = resolve_arity(flags, Some(&doc))?;
    let mut report = Report::new("decompose", WindowInfo { arity, poly_degree: None }, seed_of(&doc));
    let t = run_transfer(&doc, arity, &mut report)?;
    let factor = contractible_factor(&t.hodge, arity)?;
    let split = split_dgl(&t.hodge, &t.minimal, &t.morphism, &factor)?;
    let target = t.dgl.to_linfty(arity);
    let q_target = target.shifted();
    report.absorb("morphism", &check_equivariance(&split.morphism, &split.product, q_target)?, &split.sum, q_target.module());
    report.absorb("inverse", &check_equivariance(&split.inverse, q_target, &split.product)?, q_target.module(), &split.sum);
    let roundtrip = compose_formal(&split.inverse, &split.morphism)?;
    if let Some(f) = roundtrip.first_difference(&MorphismComponents::identity(split.sum.clone(), roundtrip.max_arity())) {
        report.fail(FailureInfo::new("inverse-roundtrip", &f, &split.sum, &split.sum));
    }
    let product = FormalDgManifold::unchecked(split.product.clone());
    let product_doc = io::formal_manifold_document(&product, None);
    let target_doc = io::formal_manifold_document(&FormalDgManifold::from_linfty(&target), None);
    let forward = io::formal_morphism_document(&split.morphism, product_doc.clone(), target_doc.clone());
    let backward = io::formal_morphism_document(&split.inverse, target_doc, product_doc);
    let name = stem(path);
    write_output(flags, format!("{name}.decomposition.json"), &forward, &mut report)?;
    write_output(flags, format!("{name}.inverse.json"), &backward, &mut report)?;
    Ok(emit(&report, flags))
}

fn window(flags: &Flags, doc: &Document) -> Result<Window> {
    let arity = resolve_arity(flags, Some(doc))?;
    let poly = resolve_poly_degree(flags, Some(doc));
    Window::new(arity, poly).map_err(|e| Usage(e.to_string()).into())
}

pub fn deform(path: &Path, universal: bool, flags: &Flags) -> Result<ExitCode> {
    let doc = load(path, flags)?;
    let win = window(flags, &doc)?;
    let command = if universal { "deform --universal" } else { "deform --semiuniversal" };
    let mut report = Report::new(command, WindowInfo { arity: win.arity, poly_degree: Some(win.poly_degree) }, seed_of(&doc));
    let fiber = FormalDgManifold::new(io::formal_manifold(&doc, win.arity.max(win.poly_degree))?.vector_field().clone())?;
    let tangent = tangent_complex(&fiber, win)?;
    report.fact("dim_fiber", fiber.module().dim());
    report.fact("dim_tangent", tangent.module().dim());
    let universal_def = universal_deformation(&tangent)?;
    let (deformation, suffix) = if universal {
        (universal_def, "universal")
    } else {
        let semi = semiuniversal_deformation(&tangent)?;
        report.provenance("pivots", semi.hodge.splitting().pivots());
        report.fact("dim_base", semi.deformation.base().module().dim());
        report.fact("base_minimal", semi.deformation.base().is_minimal());
        let (pulled, _) = base_change(&universal_def, semi.deformation.base(), semi.transfer.shifted())?;
        let agrees = pulled.perturbation() == semi.deformation.perturbation();
        report.fact("agrees_with_base_change", agrees);
        if !agrees {
            report.fail_with_reason("the semiuniversal deformation differs from the base change of the universal one");
        }
        (semi.deformation, "semiuniversal")
    };
    if let Some((axiom, failure)) = deformation.first_defect() {
        let module = deformation.product().module();
        report.fail(FailureInfo::new(&kebab(axiom), &failure, module, module));
    }
    let mut out = io::deformation_document(&deformation);
    out.options.poly_degree = Some(win.poly_degree);
    write_output(flags, format!("{}.{suffix}.json", stem(path)), &out, &mut report)?;
    Ok(emit(&report, flags))
}

pub fn correspond(path: &Path, flags: &Flags) -> Result<ExitCode> {
    let doc = load(path, flags)?;
    let win = window(flags, &doc)?;
    let mut report = Report::new("correspond", WindowInfo { arity: win.arity, poly_degree: Some(win.poly_degree) }, None);
    let deformation = io::deformation(&doc, win.arity)?;
    if let Some((axiom, failure)) = deformation.first_defect() {
        let module = deformation.product().module();
        report.fail(FailureInfo::new(&kebab(axiom), &failure, module, module));
        return Ok(emit(&report, flags));
    }
    let fiber_doc = doc.fiber.as_deref().context("deformation without fiber")?;
    let fiber = io::formal_manifold(fiber_doc, win.arity.max(win.poly_degree))?;
    let fiber = FormalDgManifold::new(fiber.vector_field().clone())?;
    let tangent = tangent_complex(&fiber, win)?;
    let f = unidef_correspondence(&deformation.truncated(win.arity), &tangent)?;
    let base = deformation.base();
    let window_check = check_window_morphism(&f, base, &tangent, win.arity)?;
    report.absorb("window-equivariance", &window_check, base.module(), tangent.suspension());
    let rebuilt = deformation_from_morphism(base, &f, &tangent, win.arity)?;
    let roundtrip = rebuilt.perturbation() == deformation.perturbation();
    report.fact("roundtrip", roundtrip);
    if !roundtrip {
        report.fail_with_reason("the deformation rebuilt from f differs from the input");
    }
    report.fact("dim_tangent", tangent.module().dim());
    let source = io::formal_manifold_document(base, None);
    let target = io::formal_manifold_document(&tangent_base(&tangent), Some(tangent.weights()));
    let mut out = io::formal_morphism_document(&f, source, target);
    out.options.poly_degree = Some(win.poly_degree);
    write_output(flags, format!("{}.classifying.json", stem(path)), &out, &mut report)?;
    Ok(emit(&report, flags))
}

#[derive(Serialize)]
struct TreeRow {
    literal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e: Option<String>,
}

#[derive(Serialize)]
struct TreeListing {
    leaves: usize,
    trees: Vec<TreeRow>,
    count: usize,
}

pub fn trees(leaves: usize, invariants: bool, flags: &Flags) -> Result<ExitCode> {
    if leaves < 1 {
        return usage("--leaves must be at least 1");
    }
    let rows = enumerate_ot(leaves)?
        .iter()
        .map(|tree| -> Result<TreeRow> {
            let mut row = TreeRow { literal: tree.literal(), v: None, w: None, e: None };
            if invariants {
                let v = (0..tree.n_ramifications())
                    .map(|k| tree.node_value(Node::Ramification(k)).map(|value| value.to_string()))
                    .collect::<linfty_core::Result<Vec<_>>>()?;
                let w = if leaves >= 2 {
                    (1..=leaves).map(|i| weight_w(tree, Node::Leaf(i))).collect::<linfty_core::Result<Vec<_>>>()?
                } else {
                    Vec::new()
                };
                row.v = Some(v);
                row.w = Some(w);
                row.e = Some(format_scalar(&sign_e(tree)));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let listing = TreeListing { leaves, count: rows.len(), trees: rows };
    match flags.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&listing)?);
        }
        Format::Text => {
            for row in &listing.trees {
                match (&row.v, &row.w, &row.e) {
                    (Some(v), Some(w), Some(e)) => {
                        let w: Vec<String> = w.iter().map(i64::to_string).collect();
                        println!("{}\tv={}\tw={}\te={}", row.literal, v.join(","), w.join(","), e);
                    }
                    _ => println!("{}", row.literal),
                }
            }
            println!("count {}", listing.count);
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_drop_the_json_extension() {
        assert_eq!(stem(Path::new("dir/massey.json")), "massey");
        assert_eq!(stem(Path::new("x.minimal.json")), "x.minimal");
    }

    #[test]
    fn preconditions_map_to_one_and_parse_errors_to_two() {
        let pre: anyhow::Error = linfty_core::Error::Precondition("x".into()).into();
        let parse: anyhow::Error = linfty_core::Error::Parse("x".into()).into();
        let bad: anyhow::Error = Usage("x".into()).into();
        assert_eq!(exit_code(&pre), 1);
        assert_eq!(exit_code(&parse), 2);
        assert_eq!(exit_code(&bad), 2);
    }

    #[test]
    fn default_window() {
        assert_eq!((DEFAULT_ARITY, DEFAULT_POLY_DEGREE), (4, 3));
    }
}
