//! The GFG JSON file format: a portable encoding of graphs of finite
//! groups. Groups are given by permutation generators; edge maps are given
//! by the element indices of the generator images, referring to the
//! deterministic (lexicographic) element ordering of the group machinery.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use vfree::fingrp::{enumerate_elements, FinGroup, GrpHom, Perm};
use vfree::gog::{Edge, GraphOfGroups};

/// Current format version tag.
pub const GFG_VERSION: u32 = 1;

/// Cap on group orders accepted from files.
const ELEMENT_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum GfgError {
    #[error("{field}: {detail}")]
    Field { field: String, detail: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn field_err(field: impl Into<String>, detail: impl ToString) -> GfgError {
    GfgError::Field {
        field: field.into(),
        detail: detail.to_string(),
    }
}

/// A finite permutation group: degree plus generator image arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GroupSpec {
    pub fn of(g: &FinGroup) -> GroupSpec {
        GroupSpec {
            degree: g.degree(),
            generators: g.generators().iter().map(|p| p.images().to_vec()).collect(),
        }
    }

    pub fn build(&self, field: &str) -> Result<FinGroup, GfgError> {
        let mut perms = Vec::new();
        for (i, images) in self.generators.iter().enumerate() {
            perms.push(
                Perm::new(images.clone())
                    .map_err(|e| field_err(format!("{field}.generators[{i}]"), e))?,
            );
        }
        enumerate_elements(self.degree, perms, ELEMENT_CAP).map_err(|e| field_err(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GFGVertex {
    pub id: String,
    pub group: GroupSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GFGEdge {
    pub id: String,
    pub group: GroupSpec,
    pub from: String,
    pub to: String,
    /// Element indices in the `from` vertex group of the images of the edge
    /// group's generators.
    pub map_from: Vec<usize>,
    /// Same for the `to` vertex group.
    pub map_to: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GFGFile {
    pub version: u32,
    pub vertices: Vec<GFGVertex>,
    pub edges: Vec<GFGEdge>,
}

fn parse_id(field: &str, text: &str) -> Result<usize, GfgError> {
    text.parse::<usize>()
        .map_err(|_| field_err(field, format!("id {text:?} is not a non-negative integer")))
}

fn hom_to_gen_images(src: &FinGroup, hom: &GrpHom) -> Vec<usize> {
    src.generators()
        .iter()
        .map(|p| hom.apply(src.index_of(p).expect("generator is an element")))
        .collect()
}

impl GFGFile {
    pub fn of(g: &GraphOfGroups) -> GFGFile {
        GFGFile {
            version: GFG_VERSION,
            vertices: g
                .vertices
                .iter()
                .map(|(&v, gv)| GFGVertex {
                    id: v.to_string(),
                    group: GroupSpec::of(gv),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| GFGEdge {
                    id: e.id.to_string(),
                    group: GroupSpec::of(&e.group),
                    from: e.from.to_string(),
                    to: e.to.to_string(),
                    map_from: hom_to_gen_images(&e.group, &e.inj_from),
                    map_to: hom_to_gen_images(&e.group, &e.inj_to),
                })
                .collect(),
        }
    }

    /// Build and validate the graph of groups; errors carry the offending
    /// field path.
    pub fn to_graph(&self) -> Result<GraphOfGroups, GfgError> {
        if self.version != GFG_VERSION {
            return Err(field_err(
                "version",
                format!("unsupported version {}, expected {GFG_VERSION}", self.version),
            ));
        }
        let mut vertices: BTreeMap<usize, FinGroup> = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let field = format!("vertices[{i}]");
            let id = parse_id(&format!("{field}.id"), &v.id)?;
            if vertices
                .insert(id, v.group.build(&format!("{field}.group"))?)
                .is_some()
            {
                return Err(field_err(format!("{field}.id"), "duplicate vertex id"));
            }
        }
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let field = format!("edges[{i}]");
            let id = parse_id(&format!("{field}.id"), &e.id)?;
            let from = parse_id(&format!("{field}.from"), &e.from)?;
            let to = parse_id(&format!("{field}.to"), &e.to)?;
            let group = e.group.build(&format!("{field}.group"))?;
            let endpoint_hom = |name: &str, v: usize, map: &[usize]| {
                let gv = vertices
                    .get(&v)
                    .ok_or_else(|| field_err(format!("{field}.{name}"), "unknown vertex id"))?;
                for (j, &x) in map.iter().enumerate() {
                    if x >= gv.order() {
                        return Err(field_err(
                            format!("{field}.map_{name}[{j}]"),
                            format!("element index {x} out of range for a group of order {}", gv.order()),
                        ));
                    }
                }
                GrpHom::from_gen_images(&group, gv, map)
                    .map_err(|e| field_err(format!("{field}.map_{name}"), e))
            };
            let inj_from = endpoint_hom("from", from, &e.map_from)?;
            let inj_to = endpoint_hom("to", to, &e.map_to)?;
            edges.push(Edge {
                id,
                group,
                from,
                to,
                inj_from,
                inj_to,
            });
        }
        let g = GraphOfGroups::new(vertices, edges);
        if let Err(errs) = g.validate() {
            return Err(field_err("graph", &errs[0]));
        }
        Ok(g)
    }
}

/// Serialize a graph as pretty-printed GFG JSON (byte-stable for a fixed
/// graph).
pub fn to_json(g: &GraphOfGroups) -> String {
    serde_json::to_string_pretty(&GFGFile::of(g)).expect("GFG serialization is infallible")
}

/// Parse GFG JSON into a validated graph of groups.
pub fn from_json(text: &str) -> Result<GraphOfGroups, GfgError> {
    let file: GFGFile = serde_json::from_str(text)?;
    file.to_graph()
}
