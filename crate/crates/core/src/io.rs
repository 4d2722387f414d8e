//! Versioned JSON documents for modules, multilinear maps and the structures
//! built from them.
//!
//! A map value is the dense list of its coordinates in the target basis, every
//! coordinate a rational literal `"p/q"` (or `"p"`) in lowest terms. Inputs are
//! basis labels in any order; the declared symmetry supplies the sign.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::random_dgl;
use crate::coalgebra::{CoderivationComponents, MorphismComponents};
use crate::deformation::{Deformation, FormalDgManifold};
use crate::error::{Error, Result};
use crate::graded::{Component, GradedModule, Symmetry};
use crate::lincomb::Vector;
use crate::linfty::{Dgl, LInftyAlgebra, LInftyMorphism};
use crate::multimap::MultiMap;
use crate::random::seeded;
use crate::scalar::{format_scalar, parse_scalar};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Maps `d` (arity 1, degree 1) and `bracket` (arity 2, degree 0).
    Dgl,
    /// Maps `mu1`, `mu2`, … with `mu_n` of degree `2 − n`.
    Linfty,
    /// Maps `Q1`, `Q2`, … on the shifted module, symmetric of degree 1.
    FormalManifold,
    /// `source`, `target` and maps `f1`, … (L∞) or `F1`, … (formal manifolds).
    Morphism,
    /// `base`, `fiber`, the product module and maps `Q1`, … of the perturbation.
    Deformation,
    /// A DGL drawn from the seeded generator; only `options.seed` is read.
    RandomDgl,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Set on emitted structures whose higher components were cut off at `arity`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

impl Options {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub degree: i64,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub inputs: Vec<String>,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub arity: usize,
    pub symmetry: Symmetry,
    pub degree: i64,
    #[serde(default)]
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub module: Vec<ComponentDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Box<Document>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Box<Document>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<Document>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<Box<Document>>,
    /// Polynomial degree of each coordinate of a tangent-window base.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
}

fn parse_error<T>(message: impl Into<String>) -> Result<T> {
    Err(Error::Parse(message.into()))
}

/// Parses a document and checks its schema version.
pub fn parse(text: &str) -> Result<Document> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.check_version()?;
    Ok(doc)
}

impl Document {
    pub fn new(kind: Kind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            kind,
            module: Vec::new(),
            maps: BTreeMap::new(),
            source: None,
            target: None,
            base: None,
            fiber: None,
            weights: None,
            options: Options::default(),
        }
    }

    fn check_version(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return parse_error(format!("unsupported schema_version {:?}", self.schema_version));
        }
        for child in [&self.source, &self.target, &self.base, &self.fiber].into_iter().flatten() {
            child.check_version()?;
        }
        Ok(())
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents serialize");
        text.push('\n');
        text
    }

    pub fn graded_module(&self) -> Result<Arc<GradedModule>> {
        let components = self.module.iter().map(|c| Component { degree: c.degree, labels: c.labels.clone() }).collect();
        Ok(Arc::new(GradedModule::new(components)?))
    }

    fn expect_kind(&self, kinds: &[Kind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            parse_error(format!("expected a {kinds:?} document, got {:?}", self.kind))
        }
    }

    fn child(&self, slot: &Option<Box<Document>>, name: &str) -> Result<Document> {
        match slot {
            Some(doc) => Ok((**doc).clone()),
            None => parse_error(format!("{:?} document needs a {name:?} field", self.kind)),
        }
    }

    /// The map `name`, or zero of the given shape when absent.
    pub fn map(&self, name: &str, shape: MapShape, source: &Arc<GradedModule>, target: &Arc<GradedModule>) -> Result<MultiMap> {
        match self.maps.get(name) {
            Some(doc) => {
                if doc.arity != shape.arity || doc.degree != shape.degree {
                    return parse_error(format!(
                        "map {name:?} must have arity {} and degree {}, got {} and {}",
                        shape.arity, shape.degree, doc.arity, doc.degree
                    ));
                }
                map_from_doc(doc, source, target).map_err(|e| Error::Parse(format!("map {name:?}: {e}")))
            }
            None => Ok(MultiMap::zero(shape.arity, source.clone(), target.clone(), shape.degree, shape.symmetry)),
        }
    }

    /// Largest `n` among maps named `{prefix}{n}`, at least `options.arity`.
    fn indexed_arity(&self, prefix: &str) -> Result<usize> {
        let mut top = self.options.arity.unwrap_or(0);
        for name in self.maps.keys() {
            let n = name
                .strip_prefix(prefix)
                .and_then(|rest| rest.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Parse(format!("unexpected map name {name:?}, expected {prefix}1, {prefix}2, …")))?;
            top = top.max(n);
        }
        Ok(top)
    }

    fn indexed_maps(
        &self,
        prefix: &str,
        max_arity: usize,
        source: &Arc<GradedModule>,
        target: &Arc<GradedModule>,
        shape: impl Fn(usize) -> MapShape,
    ) -> Result<Vec<MultiMap>> {
        (1..=max_arity).map(|n| self.map(&format!("{prefix}{n}"), shape(n), source, target)).collect()
    }
}

/// Arity, degree and default symmetry expected of a named map.
#[derive(Clone, Copy, Debug)]
pub struct MapShape {
    pub arity: usize,
    pub degree: i64,
    pub symmetry: Symmetry,
}

pub fn module_doc(module: &GradedModule) -> Vec<ComponentDoc> {
    module.components().iter().map(|c| ComponentDoc { degree: c.degree, labels: c.labels.clone() }).collect()
}

/// Reads a map; every input word must be given at most once.
pub fn map_from_doc(doc: &MapDoc, source: &Arc<GradedModule>, target: &Arc<GradedModule>) -> Result<MultiMap> {
    let mut map = MultiMap::zero(doc.arity, source.clone(), target.clone(), doc.degree, doc.symmetry);
    let mut seen = std::collections::BTreeSet::new();
    for entry in &doc.entries {
        let word = entry
            .inputs
            .iter()
            .map(|l| source.index_of(l).ok_or_else(|| Error::Parse(format!("unknown input label {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if word.len() != doc.arity {
            return parse_error(format!("entry {:?} has {} inputs, arity is {}", entry.inputs, word.len(), doc.arity));
        }
        if !seen.insert(word.clone()) {
            return parse_error(format!("entry {:?} is given twice", entry.inputs));
        }
        if entry.value.len() != target.dim() {
            return parse_error(format!(
                "entry {:?} lists {} coordinates, the target has dimension {}",
                entry.inputs,
                entry.value.len(),
                target.dim()
            ));
        }
        let mut value = Vector::new();
        for (j, text) in entry.value.iter().enumerate() {
            value.add_term(j, parse_scalar(text)?);
        }
        map.insert(&word, &value).map_err(|e| Error::Parse(format!("entry {:?}: {e}", entry.inputs)))?;
    }
    Ok(map)
}

/// Canonical entries only, in canonical word order.
pub fn map_doc(map: &MultiMap) -> MapDoc {
    let source = map.source();
    let target = map.target();
    let entries = map
        .entries()
        .iter()
        .map(|(word, value)| Entry {
            inputs: word.iter().map(|&i| source.label(i).to_string()).collect(),
            value: (0..target.dim()).map(|j| format_scalar(&value.coeff(&j))).collect(),
        })
        .collect();
    MapDoc { arity: map.arity(), symmetry: map.symmetry(), degree: map.degree(), entries }
}

fn differential_shape() -> MapShape {
    MapShape { arity: 1, degree: 1, symmetry: Symmetry::Symmetric }
}

fn bracket_shape() -> MapShape {
    MapShape { arity: 2, degree: 0, symmetry: Symmetry::Exterior }
}

fn mu_shape(n: usize) -> MapShape {
    MapShape { arity: n, degree: 2 - n as i64, symmetry: Symmetry::Exterior }
}

fn vector_field_shape(n: usize) -> MapShape {
    MapShape { arity: n, degree: 1, symmetry: Symmetry::Symmetric }
}

fn morphism_shape(n: usize) -> MapShape {
    MapShape { arity: n, degree: 1 - n as i64, symmetry: Symmetry::Exterior }
}

fn shifted_morphism_shape(n: usize) -> MapShape {
    MapShape { arity: n, degree: 0, symmetry: Symmetry::Symmetric }
}

/// `(d, [·,·])` of a DGL document, unvalidated.
pub fn dgl_parts(doc: &Document) -> Result<(MultiMap, MultiMap)> {
    doc.expect_kind(&[Kind::Dgl])?;
    let module = doc.graded_module()?;
    for name in doc.maps.keys() {
        if name != "d" && name != "bracket" {
            return parse_error(format!("unexpected map {name:?} in a DGL document"));
        }
    }
    Ok((doc.map("d", differential_shape(), &module, &module)?, doc.map("bracket", bracket_shape(), &module, &module)?))
}

/// A validated DGL from a `dgl` or `random-dgl` document.
pub fn dgl(doc: &Document) -> Result<Dgl> {
    match doc.kind {
        Kind::RandomDgl => Ok(random_dgl(&mut seeded(doc.options.seed.unwrap_or(0)))),
        _ => {
            let (d, bracket) = dgl_parts(doc)?;
            Dgl::new(d, bracket)
        }
    }
}

pub fn dgl_document(dgl: &Dgl) -> Document {
    let mut doc = Document::new(Kind::Dgl);
    doc.module = module_doc(dgl.module());
    for (name, map) in [("d", dgl.differential()), ("bracket", dgl.bracket())] {
        if !map.is_zero() {
            doc.maps.insert(name.into(), map_doc(map));
        }
    }
    doc
}

/// An unvalidated L∞-algebra up to `max_arity` from a `dgl`, `random-dgl` or `linfty` document.
pub fn linfty_unchecked(doc: &Document, max_arity: usize) -> Result<LInftyAlgebra> {
    match doc.kind {
        Kind::RandomDgl => Ok(dgl(doc)?.to_linfty(max_arity)),
        Kind::Dgl => {
            let (d, bracket) = dgl_parts(doc)?;
            let module = d.source().clone();
            let mut mu = vec![d.relabel_symmetry(Symmetry::Exterior), bracket.relabel_symmetry(Symmetry::Exterior)];
            mu.extend((3..=max_arity).map(|n| MultiMap::zero(n, module.clone(), module.clone(), 2 - n as i64, Symmetry::Exterior)));
            mu.truncate(max_arity);
            LInftyAlgebra::unchecked(module, mu)
        }
        Kind::Linfty => {
            let module = doc.graded_module()?;
            doc.indexed_arity("mu")?;
            let mu = doc.indexed_maps("mu", max_arity, &module, &module, mu_shape)?;
            LInftyAlgebra::unchecked(module, mu)
        }
        other => parse_error(format!("a {other:?} document does not describe an L∞-algebra")),
    }
}

/// `mu2, …, muA`; `mu1` is listed only when nonzero.
pub fn linfty_document(algebra: &LInftyAlgebra, truncated: bool) -> Document {
    let mut doc = Document::new(Kind::Linfty);
    doc.module = module_doc(algebra.module());
    for (i, mu) in algebra.brackets().iter().enumerate() {
        if i > 0 || !mu.is_zero() {
            doc.maps.insert(format!("mu{}", i + 1), map_doc(mu));
        }
    }
    doc.options.arity = Some(algebra.max_arity());
    doc.options.truncated = truncated;
    doc
}

/// A formal DG manifold from a `formal-manifold` document, or the shifted
/// structure of an L∞ or DGL document. Unvalidated.
pub fn formal_manifold(doc: &Document, max_arity: usize) -> Result<FormalDgManifold> {
    match doc.kind {
        Kind::FormalManifold => {
            let module = doc.graded_module()?;
            let comps = doc.indexed_maps("Q", max_arity, &module, &module, vector_field_shape)?;
            Ok(FormalDgManifold::unchecked(CoderivationComponents::new(module, comps)?))
        }
        _ => Ok(FormalDgManifold::from_linfty(&linfty_unchecked(doc, max_arity)?)),
    }
}

pub fn formal_manifold_document(manifold: &FormalDgManifold, weights: Option<Vec<usize>>) -> Document {
    let mut doc = Document::new(Kind::FormalManifold);
    doc.module = module_doc(manifold.module());
    for (i, q) in manifold.vector_field().components().iter().enumerate() {
        if !q.is_zero() {
            doc.maps.insert(format!("Q{}", i + 1), map_doc(q));
        }
    }
    doc.options.arity = Some(manifold.max_arity());
    doc.weights = weights;
    doc
}

/// `f: source → target` between L∞-algebras, with both ends embedded.
pub fn linfty_morphism_document(morphism: &LInftyMorphism, source: Document, target: Document, truncated: bool) -> Document {
    let mut doc = Document::new(Kind::Morphism);
    for (i, f) in morphism.components().iter().enumerate() {
        doc.maps.insert(format!("f{}", i + 1), map_doc(f));
    }
    doc.source = Some(Box::new(source));
    doc.target = Some(Box::new(target));
    doc.options.arity = Some(morphism.max_arity());
    doc.options.truncated = truncated;
    doc
}

/// `F: source → target` between formal DG manifolds.
pub fn formal_morphism_document(morphism: &MorphismComponents, source: Document, target: Document) -> Document {
    let mut doc = Document::new(Kind::Morphism);
    for (i, f) in morphism.components().iter().enumerate() {
        doc.maps.insert(format!("F{}", i + 1), map_doc(f));
    }
    doc.source = Some(Box::new(source));
    doc.target = Some(Box::new(target));
    doc.options.arity = Some(morphism.max_arity());
    doc
}

/// The two ends of a morphism document.
pub fn morphism_ends(doc: &Document) -> Result<(Document, Document)> {
    doc.expect_kind(&[Kind::Morphism])?;
    Ok((doc.child(&doc.source, "source")?, doc.child(&doc.target, "target")?))
}

/// Whether the morphism document lists shifted components `F1, …`.
pub fn is_formal_morphism(doc: &Document) -> bool {
    doc.maps.keys().next().is_some_and(|k| k.starts_with('F'))
        || doc.source.as_ref().is_some_and(|s| s.kind == Kind::FormalManifold)
}

/// An L∞-morphism between the embedded algebras, unvalidated.
pub fn linfty_morphism(doc: &Document, max_arity: usize) -> Result<LInftyMorphism> {
    let (source, target) = morphism_ends(doc)?;
    let (source, target) = (linfty_unchecked(&source, max_arity)?, linfty_unchecked(&target, max_arity)?);
    let top = doc.indexed_arity("f")?.min(max_arity);
    let f = doc.indexed_maps("f", top, source.module(), target.module(), morphism_shape)?;
    LInftyMorphism::unchecked(source, target, f)
}

/// Shifted components `F1, …` between the embedded formal DG manifolds.
pub fn formal_morphism(doc: &Document, max_arity: usize) -> Result<(FormalDgManifold, FormalDgManifold, MorphismComponents)> {
    let (source_doc, target_doc) = morphism_ends(doc)?;
    let source = formal_manifold(&source_doc, max_arity)?;
    let target = formal_manifold(&target_doc, max_arity)?;
    let top = doc.indexed_arity("F")?.min(max_arity);
    let comps = doc.indexed_maps("F", top, source.module(), target.module(), shifted_morphism_shape)?;
    let f = MorphismComponents::new(source.module().clone(), target.module().clone(), comps)?;
    Ok((source, target, f))
}

pub fn deformation_document(deformation: &Deformation) -> Document {
    let mut doc = Document::new(Kind::Deformation);
    doc.module = module_doc(deformation.product().module());
    for (i, q) in deformation.perturbation().components().iter().enumerate() {
        if !q.is_zero() {
            doc.maps.insert(format!("Q{}", i + 1), map_doc(q));
        }
    }
    let weights = deformation.weights().iter().any(|&w| w > 0).then(|| deformation.weights().to_vec());
    doc.base = Some(Box::new(formal_manifold_document(deformation.base(), weights)));
    doc.fiber = Some(Box::new(formal_manifold_document(deformation.fiber(), None)));
    doc.options.arity = Some(deformation.max_arity());
    doc
}

/// A deformation with its defining conditions unchecked; see [`Deformation::first_defect`].
pub fn deformation(doc: &Document, max_arity: usize) -> Result<Deformation> {
    doc.expect_kind(&[Kind::Deformation])?;
    let base_doc = doc.child(&doc.base, "base")?;
    let base = formal_manifold(&base_doc, max_arity)?;
    let fiber = formal_manifold(&doc.child(&doc.fiber, "fiber")?, max_arity)?;
    let product = crate::deformation::Product::new(base.module(), fiber.module());
    let declared = doc.graded_module()?;
    if *declared != **product.module() {
        return parse_error("the module of a deformation must be the tagged product of base and fiber");
    }
    let comps = doc.indexed_maps("Q", max_arity, product.module(), product.module(), vector_field_shape)?;
    let perturbation = CoderivationComponents::new(product.module().clone(), comps)?;
    let weights = base_doc.weights.clone().unwrap_or_else(|| vec![0; base.module().dim()]);
    if weights.len() != base.module().dim() {
        return parse_error("one weight per base coordinate is required");
    }
    Deformation::unchecked(base, fiber, perturbation, weights)
}
