//! JSON file format for polytopes with an optional characteristic map:
//! `{"dim": n, "facets": [names], "vertices": [[facet indices]], "char": {name: vector}}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::char_map::{CharMap, CharMapError};
use crate::lattice::IntVector;
use crate::polytope::{Polytope, PolytopeError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed polytope file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    CharMap(#[from] CharMapError),
}

/// Facet name to vector; repeated names are rejected while parsing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct NamedVectors(pub BTreeMap<String, IntVector>);

impl<'de> Deserialize<'de> for NamedVectors {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = NamedVectors;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object from facet names to integer vectors")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<NamedVectors, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = map.next_entry::<String, IntVector>()? {
                    if out.contains_key(&k) {
                        return Err(serde::de::Error::custom(format!("duplicate facet name {k:?} in char")));
                    }
                    out.insert(k, v);
                }
                Ok(NamedVectors(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub dim: usize,
    pub facets: Vec<String>,
    pub vertices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char: Option<NamedVectors>,
}

impl PolytopeFile {
    pub fn new(p: &Polytope, lambda: Option<&CharMap>) -> Self {
        PolytopeFile {
            dim: p.dim(),
            facets: p.facet_names().to_vec(),
            vertices: p.vertices().iter().map(|s| s.iter().copied().collect()).collect(),
            char: lambda.map(|l| NamedVectors(l.to_named(p))),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Builds the incidence without running validation.
    pub fn polytope_unchecked(&self) -> Result<Polytope, PolytopeError> {
        let verts = self.vertices.iter().map(|v| v.iter().copied().collect()).collect();
        Polytope::new_unchecked(self.dim, self.facets.clone(), verts)
    }

    pub fn polytope(&self) -> Result<Polytope, PolytopeError> {
        let p = self.polytope_unchecked()?;
        p.validate().map_err(PolytopeError::Invalid)?;
        Ok(p)
    }

    /// The map in facet order of `p`; not checked for non-degeneracy.
    pub fn char_map(&self, p: &Polytope) -> Result<Option<CharMap>, CharMapError> {
        self.char.as_ref().map(|named| CharMap::from_named(p, &named.0)).transpose()
    }

    /// Validated polytope plus its map, if any.
    pub fn into_parts(self) -> Result<(Polytope, Option<CharMap>), IoError> {
        let p = self.polytope()?;
        let l = self.char_map(&p)?;
        Ok((p, l))
    }
}
