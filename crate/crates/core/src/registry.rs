//! Named strategy registries.
//!
//! Profile families, scalar-curvature methods and mass methods are trait
//! objects looked up by name, so the CLI and the verify driver pick them at
//! runtime from configuration.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ads::AdsProfile;
use crate::curvature::{DivergenceForm, FaultyFormula, GraphFormula, ScalarCurvatureMethod, WarpedOracle};
use crate::error::{Error, Result};
use crate::hyperbolic::Dimension;
use crate::mass::{BoundaryLimit, FourTerm, LevelSet, MassMethod};
use crate::profile::{BoundaryKind, ConstantProfile, ExponentialProfile, Profile, RadialProfile, Sample, SampledProfile};

/// Name → strategy map with deterministic iteration order.
pub struct Registry<T: ?Sized> {
    what: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
    hidden: Vec<&'static str>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(what: &'static str) -> Self {
        Self {
            what,
            entries: BTreeMap::new(),
            hidden: Vec::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, entry: Arc<T>) -> &mut Self {
        self.entries.insert(name, entry);
        self
    }

    /// Registered but left out of `names`.
    pub fn register_hidden(&mut self, name: &'static str, entry: Arc<T>) -> &mut Self {
        self.hidden.push(name);
        self.register(name, entry)
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries.get(name).cloned().ok_or_else(|| {
            Error::InvalidParameter(format!("unknown {} '{name}'; known: {}", self.what, self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().filter(|k| !self.hidden.contains(k)).collect()
    }
}

pub fn curvature_methods() -> Registry<dyn ScalarCurvatureMethod> {
    let mut r: Registry<dyn ScalarCurvatureMethod> = Registry::new("scalar-curvature method");
    r.register("formula", Arc::new(GraphFormula))
        .register("warped-oracle", Arc::new(WarpedOracle))
        .register("divergence", Arc::new(DivergenceForm))
        .register_hidden("faulty-formula", Arc::new(FaultyFormula));
    r
}

pub fn mass_methods() -> Registry<dyn MassMethod> {
    let mut r: Registry<dyn MassMethod> = Registry::new("mass method");
    r.register("boundary-limit", Arc::new(BoundaryLimit))
        .register("four-term", Arc::new(FourTerm))
        .register("level-set", Arc::new(LevelSet));
    r
}

/// Serialized description of a profile; `kind` names the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Height of the constant family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wiggle: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Sample>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
}

impl ProfileDocument {
    pub fn new(kind: &str, n: usize) -> Self {
        Self {
            kind: kind.to_string(),
            n,
            m: None,
            c: None,
            amplitude: None,
            rate: None,
            wiggle: None,
            samples: None,
            boundary: None,
            decay_rate: None,
        }
    }

    pub fn ads(n: usize, m: f64) -> Self {
        Self { m: Some(m), ..Self::new("ads", n) }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile documents serialize")
    }

    fn require(&self, field: Option<f64>, name: &str) -> Result<f64> {
        field.ok_or_else(|| Error::Document(format!("kind '{}' needs field '{name}'", self.kind)))
    }

    /// Samples `f` on `radii` into a sampled-profile document.
    pub fn sample(f: &dyn Profile, radii: &[f64]) -> Self {
        let samples = radii
            .iter()
            .map(|&r| Sample {
                r,
                f: f.value(r),
                f1: f.d1(r),
                f2: f.d2(r),
            })
            .collect();
        Self {
            samples: Some(samples),
            boundary: Some(f.boundary_kind()),
            decay_rate: Some(f.decay_rate()),
            ..Self::new("sampled", f.dimension().get())
        }
    }
}

/// Builds a profile from a document.
pub trait ProfileFamily: Send + Sync {
    fn describe(&self) -> &'static str;
    fn build(&self, doc: &ProfileDocument) -> Result<RadialProfile>;
}

struct AdsFamily;
struct ConstantFamily;
struct ExponentialFamily;
struct SampledFamily;

impl ProfileFamily for AdsFamily {
    fn describe(&self) -> &'static str {
        "AdS-Schwarzschild graph of mass m (fields: n, m)"
    }
    fn build(&self, doc: &ProfileDocument) -> Result<RadialProfile> {
        AdsProfile::shared(Dimension::new(doc.n)?, doc.require(doc.m, "m")?)
    }
}

impl ProfileFamily for ConstantFamily {
    fn describe(&self) -> &'static str {
        "f ≡ c (fields: n, c = 0 by default)"
    }
    fn build(&self, doc: &ProfileDocument) -> Result<RadialProfile> {
        Ok(ConstantProfile::shared(Dimension::new(doc.n)?, doc.c.unwrap_or(0.0)))
    }
}

impl ProfileFamily for ExponentialFamily {
    fn describe(&self) -> &'static str {
        "a·e^{−λr}(1 + b·e^{−νr} sin ωr) (fields: n, amplitude, rate, wiggle = [b, ν, ω])"
    }
    fn build(&self, doc: &ProfileDocument) -> Result<RadialProfile> {
        let n = Dimension::new(doc.n)?;
        let rate = doc.require(doc.rate, "rate")?;
        if !(rate > 1.0) {
            return Err(Error::Document(format!("rate must exceed 1, got {rate}")));
        }
        let mut p = ExponentialProfile::new(n, doc.require(doc.amplitude, "amplitude")?, rate);
        if let Some([b, nu, w]) = doc.wiggle {
            p = p.with_wiggle(b, nu, w);
        }
        Ok(p.shared())
    }
}

impl ProfileFamily for SampledFamily {
    fn describe(&self) -> &'static str {
        "interpolated samples [{r, f, f1, f2}] (fields: n, samples, boundary, decay_rate)"
    }
    fn build(&self, doc: &ProfileDocument) -> Result<RadialProfile> {
        let samples = doc
            .samples
            .clone()
            .ok_or_else(|| Error::Document("kind 'sampled' needs field 'samples'".into()))?;
        let boundary = doc.boundary.unwrap_or(BoundaryKind::Entire);
        let p = SampledProfile::new(Dimension::new(doc.n)?, samples, boundary, doc.require(doc.decay_rate, "decay_rate")?)?;
        Ok(Arc::new(p))
    }
}

pub fn profile_families() -> Registry<dyn ProfileFamily> {
    let mut r: Registry<dyn ProfileFamily> = Registry::new("profile family");
    r.register("ads", Arc::new(AdsFamily))
        .register("constant", Arc::new(ConstantFamily))
        .register("exponential", Arc::new(ExponentialFamily))
        .register("sampled", Arc::new(SampledFamily));
    r
}

/// Looks up `doc.kind` and builds the profile.
pub fn build_profile(doc: &ProfileDocument) -> Result<RadialProfile> {
    profile_families().get(&doc.kind)?.build(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::ScaleKappa;
    use crate::mass::MassTolerances;

    #[test]
    fn names_are_sorted_and_hidden_entries_resolve() {
        let c = curvature_methods();
        assert_eq!(c.names(), vec!["divergence", "formula", "warped-oracle"]);
        assert_eq!(c.get("faulty-formula").unwrap().name(), "faulty-formula");
        assert!(matches!(c.get("nope"), Err(Error::InvalidParameter(_))));
        assert_eq!(mass_methods().names(), vec!["boundary-limit", "four-term", "level-set"]);
    }

    #[test]
    fn documents_round_trip() {
        let doc = ProfileDocument::ads(3, 1.0);
        let back = ProfileDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        let f = build_profile(&back).unwrap();
        let m = mass_methods().get("boundary-limit").unwrap();
        assert!((m.mass(f.as_ref(), ScaleKappa::ONE, &MassTolerances::default()).unwrap() - 1.0).abs() < 1e-9);
        assert!(ProfileDocument::from_json(r#"{"kind":"ads","n":3,"m":1,"colour":2}"#).is_err());
        assert!(build_profile(&ProfileDocument::new("ads", 3)).is_err());
        assert!(build_profile(&ProfileDocument::ads(2, 1.0)).is_err());
    }

    #[test]
    fn sampled_document_reproduces_profile() {
        let f = ExponentialProfile::new(Dimension::new(3).unwrap(), -1.0, 2.5);
        let radii: Vec<f64> = (0..=400).map(|i| 0.05 * i as f64).collect();
        let doc = ProfileDocument::sample(&f, &radii);
        let g = build_profile(&ProfileDocument::from_json(&doc.to_json()).unwrap()).unwrap();
        for &r in &[0.33, 2.71, 9.9] {
            assert!((g.value(r) - f.value(r)).abs() < 1e-9);
            assert!((g.d1(r) / f.d1(r) - 1.0).abs() < 1e-6);
        }
    }
}
