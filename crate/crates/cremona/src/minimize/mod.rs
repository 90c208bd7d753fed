//! Birational classification of pairs and emission of Cremona minimal plane
//! models.

use serde::{Deserialize, Serialize};

use crate::systems::{PlaneSystem, System};

mod apps;
mod classify;
mod forest;
mod hirz;
mod nef;
mod rational;
mod reduce;
mod search;

pub use apps::{smooth_model_test, SmoothModelReport, SmoothVerdict};
pub use classify::{classify, minimal_models};
pub use forest::{build_forest, forest_pipeline, good_clusters, good_plane_models};
pub use hirz::{flat_model, natural_model, sharp_model, sharp_status};
pub use nef::{nef_part, nefify, NefPart, NegativeCurve};
pub use rational::{classify_rational_system, RationalClass, RationalType};
pub use reduce::{dejonquieres_reduction, dejonquieres_reduction_seq, noether_reduce, JonquieresWitness, Reduction};
pub use search::{brute_force_min_oracle, brute_force_min_oracle_kind, brute_force_min_oracle_seq, OracleResult};

/// Whether the data describes one curve (general points of it are simple
/// points) or a linear system (general points are not base points).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Curve,
    System,
}

impl Kind {
    /// Multiplicity at a general point of the surface.
    pub fn general_mult(self) -> i64 {
        match self {
            Kind::Curve => 1,
            Kind::System => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharpStatus {
    pub sharp: bool,
    pub sharpsharp: bool,
    pub flat_index: i64,
    pub natural: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestVertex {
    pub id: String,
    pub weight: i64,
    pub parent: Option<usize>,
    pub general: bool,
}

/// One component: `vertices[0]` is the weight-zero fiber vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestComponent {
    pub fiber: String,
    pub vertices: Vec<ForestVertex>,
}

impl ForestComponent {
    pub fn depth(&self, v: usize) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.vertices[cur].parent {
            d += 1;
            cur = p;
        }
        d
    }

    /// Vertices from the fiber vertex's child down to `v`.
    pub fn chain_to(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(p) = self.vertices[cur].parent {
            out.push(cur);
            cur = p;
        }
        out.reverse();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedForest {
    pub n: i64,
    pub components: Vec<ForestComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodCluster {
    /// One chain per used component, each read from the fiber outwards.
    pub chains: Vec<Vec<String>>,
    pub points: Vec<String>,
    /// The good sequence, decreasing.
    pub multiplicities: Vec<i64>,
    pub weight: i64,
    /// Ids in `points` that are synthesized general points.
    pub general: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Case {
    Line,
    Dp1,
    Dp2,
    R,
    B1,
    B2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessCaveat {
    None,
    /// `(dp1)` with three points of multiplicity `m`.
    ThreePointsOfMultM,
    /// `(r)` with at least two points of multiplicity `m`.
    TwoPointsOfMultM,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub case: Case,
    pub m: i64,
    pub alpha: i64,
    pub n: Option<i64>,
    pub model: Option<System>,
    pub uniqueness_caveat: UniquenessCaveat,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeTag {
    Cdp1,
    Cdp2,
    Cdp3,
    Cr0,
    Cr1,
    Cr2,
    Cb1,
    Cb2,
    Cb3,
    Cb4,
}

impl TypeTag {
    pub fn needs_noether_type(self) -> bool {
        !matches!(self, TypeTag::Cr2 | TypeTag::Cb4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Minimality {
    /// Noether type, minimal by Jung's criterion.
    NoetherType,
    /// Good model of a natural model with flat index at least two.
    GoodModel,
    OracleVerified,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalModel {
    pub type_tag: TypeTag,
    pub system: PlaneSystem,
    pub notation: String,
    /// Other minimal models of the same pair that may differ projectively.
    pub ambiguity: Vec<PlaneSystem>,
    pub minimality: Minimality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_sequence: Option<Vec<i64>>,
}
