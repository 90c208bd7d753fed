//! The JSON document format for systems and homaloidal nets. Systems serialize through
//! it, so anything the engine emits parses back to an equal value.
//!
//! ```json
//! {"format": 1, "surface": {"type": "P2"}, "degree": 3,
//!  "points": [{"id": "p", "mult": 2}, {"id": "q", "mult": 1, "predecessor": "p"}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::cluster::{Cluster, Flags, PointNode};
use crate::minimize::Kind;
use crate::systems::{HirzebruchSystem, PlaneSystem, System};

pub const FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    System,
    Net,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum SurfaceSpec {
    P2,
    Fn { n: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub k: i64,
    pub h: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub id: String,
    #[serde(default)]
    pub mult: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predecessor: Option<String>,
    /// Defaults to `[predecessor]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proximate: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub flags: Flags,
}

fn is_default<T: Default + PartialEq>(x: &T) -> bool {
    *x == T::default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub format: u32,
    #[serde(default, skip_serializing_if = "is_default")]
    pub role: Role,
    #[serde(default, skip_serializing_if = "is_default")]
    pub kind: Kind,
    pub surface: SurfaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassSpec>,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<Vec<String>>,
    /// Irreducibility is taken on trust, never checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<Irreducible>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Irreducible {
    Asserted,
}

/// A malformed document: shape errors, not cluster violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError(pub String);

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

fn cluster_of(points: &[PointSpec]) -> (Cluster, Vec<i64>) {
    let nodes = points
        .iter()
        .map(|p| PointNode {
            id: p.id.clone(),
            predecessor: p.predecessor.clone(),
            proximate_to: p.proximate.clone().unwrap_or_else(|| p.predecessor.iter().cloned().collect()),
            flags: p.flags.clone(),
        })
        .collect();
    (Cluster::new(nodes), points.iter().map(|p| p.mult).collect())
}

fn points_of(c: &Cluster, mult: &[i64]) -> Vec<PointSpec> {
    c.nodes
        .iter()
        .zip(mult)
        .map(|(n, &m)| {
            let default: Vec<String> = n.predecessor.iter().cloned().collect();
            PointSpec {
                id: n.id.clone(),
                mult: m,
                predecessor: n.predecessor.clone(),
                proximate: (n.proximate_to != default).then(|| n.proximate_to.clone()),
                flags: n.flags.clone(),
            }
        })
        .collect()
}

impl Document {
    pub fn to_system(&self) -> Result<System, FormatError> {
        if self.format != FORMAT {
            return Err(FormatError(format!("unsupported format {}, expected {FORMAT}", self.format)));
        }
        let (cluster, mult) = cluster_of(&self.points);
        match self.surface {
            SurfaceSpec::P2 => {
                if self.class.is_some() {
                    return Err(FormatError("plane systems take `degree`, not `class`".into()));
                }
                let degree = self.degree.ok_or_else(|| FormatError("plane system without `degree`".into()))?;
                Ok(System::Plane(PlaneSystem { degree, cluster, mult, lines: self.lines.clone() }))
            }
            SurfaceSpec::Fn { n } => {
                if self.degree.is_some() {
                    return Err(FormatError("Hirzebruch systems take `class`, not `degree`".into()));
                }
                if !self.lines.is_empty() {
                    return Err(FormatError("`lines` only apply to plane systems".into()));
                }
                if n < 0 {
                    return Err(FormatError(format!("negative Hirzebruch index {n}")));
                }
                let c = self.class.ok_or_else(|| FormatError("Hirzebruch system without `class`".into()))?;
                Ok(System::Hirzebruch(HirzebruchSystem { n, k: c.k, h: c.h, cluster, mult }))
            }
        }
    }

    pub fn from_system(s: &System) -> Self {
        let mut d = Document {
            format: FORMAT,
            role: Role::System,
            kind: Kind::Curve,
            surface: SurfaceSpec::P2,
            degree: None,
            class: None,
            points: Vec::new(),
            lines: Vec::new(),
            irreducible: None,
        };
        match s {
            System::Plane(p) => {
                d.degree = Some(p.degree);
                d.points = points_of(&p.cluster, &p.mult);
                d.lines = p.lines.clone();
            }
            System::Hirzebruch(h) => {
                d.surface = SurfaceSpec::Fn { n: h.n };
                d.class = Some(ClassSpec { k: h.k, h: h.h });
                d.points = points_of(&h.cluster, &h.mult);
            }
        }
        d
    }
}

impl From<System> for Document {
    fn from(s: System) -> Self {
        Document::from_system(&s)
    }
}

impl From<PlaneSystem> for Document {
    fn from(s: PlaneSystem) -> Self {
        Document::from_system(&System::Plane(s))
    }
}

impl From<HirzebruchSystem> for Document {
    fn from(s: HirzebruchSystem) -> Self {
        Document::from_system(&System::Hirzebruch(s))
    }
}

impl TryFrom<Document> for System {
    type Error = FormatError;
    fn try_from(d: Document) -> Result<Self, FormatError> {
        d.to_system()
    }
}

impl TryFrom<Document> for PlaneSystem {
    type Error = FormatError;
    fn try_from(d: Document) -> Result<Self, FormatError> {
        match d.to_system()? {
            System::Plane(p) => Ok(p),
            System::Hirzebruch(_) => Err(FormatError("expected a plane system".into())),
        }
    }
}

impl TryFrom<Document> for HirzebruchSystem {
    type Error = FormatError;
    fn try_from(d: Document) -> Result<Self, FormatError> {
        match d.to_system()? {
            System::Hirzebruch(h) => Ok(h),
            System::Plane(_) => Err(FormatError("expected a Hirzebruch system".into())),
        }
    }
}
