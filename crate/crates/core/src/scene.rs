//! Scene files: named tetrahedra and pedal chains in strict JSON.
//!
//! ```json
//! {
//!   "tetrahedra": { "A": [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]] },
//!   "chains": { "c": { "host": "A", "sources": [[0, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]] } },
//!   "tolerance": { "eps_abs": 1e-9, "eps_rel": 1e-7 },
//!   "metadata": { "description": "regular tetrahedron", "seed": 7 }
//! }
//! ```
//!
//! Only `tetrahedra` is required. Unknown keys and duplicate names are
//! rejected. Numbers are written in shortest round-trip form, so saving and
//! reloading reproduces every coordinate bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::geom::{Point, Tolerance, DEFAULT_EPS_ABS, DEFAULT_EPS_REL};
use crate::orthology::Tetrahedron;

pub type Coords = [[f64; 3]; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub host: String,
    /// `B*_i` in the face plane opposite host vertex `i`.
    pub sources: Coords,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(deserialize_with = "unique_map")]
    pub tetrahedra: BTreeMap<String, Coords>,
    #[serde(default, deserialize_with = "unique_map", skip_serializing_if = "BTreeMap::is_empty")]
    pub chains: BTreeMap<String, ChainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

fn unique_map<'de, D, V>(d: D) -> Result<BTreeMap<String, V>, D::Error>
where
    D: Deserializer<'de>,
    V: Deserialize<'de>,
{
    struct UniqueVisitor<V>(PhantomData<V>);

    impl<'de, V: Deserialize<'de>> Visitor<'de> for UniqueVisitor<V> {
        type Value = BTreeMap<String, V>;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a map with unique names")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((k, v)) = access.next_entry::<String, V>()? {
                if out.contains_key(&k) {
                    return Err(de::Error::custom(format!("duplicate name {k:?}")));
                }
                out.insert(k, v);
            }
            Ok(out)
        }
    }

    d.deserialize_map(UniqueVisitor(PhantomData))
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: at `{field}`: {message}")]
    Parse {
        path: String,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

impl Scene {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, SceneError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scene: Scene = serde_path_to_error::deserialize(&mut *de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            SceneError::Parse {
                path: origin.to_string(),
                field,
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            }
        })?;
        de.end().map_err(|e| SceneError::Parse {
            path: origin.to_string(),
            field: ".".into(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene serializes");
        s.push('\n');
        s
    }

    /// Rejects non-finite numbers, degenerate tetrahedra, chains on unknown
    /// hosts and invalid tolerance overrides.
    pub fn validate(&self) -> Result<(), SceneError> {
        for (name, coords) in &self.tetrahedra {
            if coords.iter().flatten().any(|v| !v.is_finite()) {
                return Err(SceneError::Invalid(format!("tetrahedron {name:?} has a non-finite coordinate")));
            }
            Tetrahedron::from_coords(*coords)
                .map_err(|e| SceneError::Invalid(format!("tetrahedron {name:?}: {e}")))?;
        }
        for (name, chain) in &self.chains {
            if !self.tetrahedra.contains_key(&chain.host) {
                return Err(SceneError::Invalid(format!(
                    "chain {name:?} refers to unknown tetrahedron {:?}",
                    chain.host
                )));
            }
            if chain.sources.iter().flatten().any(|v| !v.is_finite()) {
                return Err(SceneError::Invalid(format!("chain {name:?} has a non-finite coordinate")));
            }
        }
        if let Some(t) = &self.tolerance {
            for (key, v) in [("eps_abs", t.eps_abs), ("eps_rel", t.eps_rel)] {
                if let Some(v) = v {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(SceneError::Invalid(format!("tolerance.{key} must be finite and positive")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tetrahedron(&self, name: &str) -> Result<Tetrahedron, SceneError> {
        let coords = self.tetrahedra.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.tetrahedra.keys().map(String::as_str).collect();
            SceneError::Invalid(format!("no tetrahedron named {name:?} (scene has {known:?})"))
        })?;
        Tetrahedron::from_coords(*coords).map_err(|e| SceneError::Invalid(format!("tetrahedron {name:?}: {e}")))
    }

    pub fn insert(&mut self, name: &str, t: &Tetrahedron) {
        self.tetrahedra.insert(name.to_string(), t.coords());
    }

    /// Scene epsilons, with `eps_rel_override` (from the environment) taking
    /// precedence, at the given scale.
    pub fn tolerance(&self, scene_scale: f64, eps_rel_override: Option<f64>) -> crate::Result<Tolerance> {
        let spec = self.tolerance.unwrap_or_default();
        Tolerance::with_eps(
            spec.eps_abs.unwrap_or(DEFAULT_EPS_ABS),
            eps_rel_override.or(spec.eps_rel).unwrap_or(DEFAULT_EPS_REL),
            scene_scale,
        )
    }

    pub fn chain_sources(&self, name: &str) -> Result<(&str, [Point; 4]), SceneError> {
        let c = self
            .chains
            .get(name)
            .ok_or_else(|| SceneError::Invalid(format!("no chain named {name:?}")))?;
        Ok((&c.host, c.sources.map(|p| Point::new(p[0], p[1], p[2]))))
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_scene(path: &Path) -> Result<Scene, SceneError> {
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scene::from_json(&text, &path.display().to_string())
}

pub fn save_scene(scene: &Scene, path: &Path) -> Result<(), SceneError> {
    std::fs::write(path, scene.to_json()).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"tetrahedra":{"A":[[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]]}}"#;

    #[test]
    fn minimal_scene_loads() {
        let s = Scene::from_json(MINIMAL, "mem").unwrap();
        let a = s.tetrahedron("A").unwrap();
        assert_eq!(a.vertex(1), Point::new(1., -1., -1.));
        assert!(s.chains.is_empty() && s.tolerance.is_none());
    }

    #[test]
    fn three_vertices_name_the_entry() {
        let text = r#"{"tetrahedra":{"A":[[1,1,1],[1,-1,-1],[-1,1,-1]]}}"#;
        match Scene::from_json(text, "mem").unwrap_err() {
            SceneError::Parse { field, message, line, .. } => {
                assert_eq!(field, "tetrahedra.A");
                assert!(message.contains("length 3"), "{message}");
                assert_eq!(line, 1);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        let unknown = r#"{"tetrahedra":{},"extra":1}"#;
        assert!(matches!(Scene::from_json(unknown, "m"), Err(SceneError::Parse { .. })));
        let dup = r#"{"tetrahedra":{"A":[[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]],"A":[[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]]}}"#;
        let e = Scene::from_json(dup, "m").unwrap_err().to_string();
        assert!(e.contains("duplicate name"), "{e}");
        let overflow = r#"{"tetrahedra":{"A":[[1e999,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]]}}"#;
        assert!(Scene::from_json(overflow, "m").is_err());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut s = Scene::from_json(MINIMAL, "mem").unwrap();
        s.tetrahedra.insert(
            "B".into(),
            [[0.1 + 0.2, 1.0 / 3.0, -2e-300], [5e-324, 1e300, std::f64::consts::PI], [0., -0., 1.], [7., 8., 9.]],
        );
        s.metadata = Some(Metadata {
            description: Some("x".into()),
            seed: Some(u64::MAX),
        });
        let back = Scene::from_json(&s.to_json(), "mem").unwrap();
        assert_eq!(back, s);
        for (k, v) in &s.tetrahedra {
            let w = &back.tetrahedra[k];
            for (p, q) in v.iter().flatten().zip(w.iter().flatten()) {
                assert_eq!(p.to_bits(), q.to_bits());
            }
        }
    }
}
