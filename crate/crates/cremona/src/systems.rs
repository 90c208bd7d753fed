//! Linear systems on the plane and on Hirzebruch surfaces: virtual dimension,
//! genus, adjoints, and the Noether-type / admissibility / line-case tests.

use serde::{Deserialize, Serialize};

use crate::io::Document;

use crate::cluster::{unload_vec, Cluster, PointNode};
use crate::error::{Error, Result};
use crate::lattice::{self, BlowupLattice, DivisorClass, Surface};
use crate::model::Model;

/// `L(d; m_1, ...)`: plane curves of degree `d` with assigned base points.
/// `lines` lists declared collinear triples (or larger sets) of points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Document", try_from = "Document")]
pub struct PlaneSystem {
    pub degree: i64,
    pub cluster: Cluster,
    pub mult: Vec<i64>,
    pub lines: Vec<Vec<String>>,
}

/// `L_n(k, h; m_1, ...)`: curves in `|kE + hF|` on `F_n`, with `E^2 = -n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Document", try_from = "Document")]
pub struct HirzebruchSystem {
    pub n: i64,
    pub k: i64,
    pub h: i64,
    pub cluster: Cluster,
    pub mult: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Document", try_from = "Document")]
pub enum System {
    Plane(PlaneSystem),
    Hirzebruch(HirzebruchSystem),
}

impl From<PlaneSystem> for System {
    fn from(s: PlaneSystem) -> Self {
        System::Plane(s)
    }
}

impl From<HirzebruchSystem> for System {
    fn from(s: HirzebruchSystem) -> Self {
        System::Hirzebruch(s)
    }
}

impl PlaneSystem {
    /// Degree `d` with the given multiplicities at distinct general points
    /// named `p0, p1, ...`.
    pub fn general(d: i64, mult: &[i64]) -> Self {
        let nodes = (0..mult.len()).map(|i| PointNode::proper(format!("p{i}"))).collect();
        PlaneSystem { degree: d, cluster: Cluster::new(nodes), mult: mult.to_vec(), lines: vec![] }
    }

    pub fn lattice(&self) -> BlowupLattice {
        BlowupLattice::new(Surface::P2, self.cluster.clone())
    }

    pub fn class(&self) -> Result<DivisorClass> {
        self.lattice().plane_class(self.degree, &self.mult)
    }

    pub fn mult_of(&self, id: &str) -> Option<i64> {
        self.cluster.index_of(id).map(|i| self.mult[i])
    }

    pub fn unloaded(&self) -> Result<Self> {
        let prox = self.cluster.proximity()?;
        Ok(PlaneSystem { mult: unload_vec(&prox, &self.mult)?, ..self.clone() })
    }

    /// Removes points of multiplicity zero that carry nothing beneath them.
    pub fn drop_zero(&self) -> Self {
        let (cluster, mult) = drop_zero_points(&self.cluster, &self.mult);
        let lines = self
            .lines
            .iter()
            .map(|l| l.iter().filter(|id| cluster.index_of(id).is_some()).cloned().collect::<Vec<_>>())
            .filter(|l| l.len() >= 3)
            .collect();
        PlaneSystem { degree: self.degree, cluster, mult, lines }
    }

    /// Multiplicities sorted in decreasing order.
    pub fn sorted_mults(&self) -> Vec<i64> {
        let mut v = self.mult.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Index of the maximal point: largest multiplicity, ties to the point
    /// that comes first in the cluster (proper points precede their tree).
    pub fn max_point(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &m) in self.mult.iter().enumerate() {
            if best.is_none_or(|b| m > self.mult[b]) {
                best = Some(i);
            }
        }
        best
    }

    pub fn is_degenerate(&self) -> Result<bool> {
        Ok(self.unloaded()?.mult.iter().any(|&m| m > self.degree))
    }
}

impl HirzebruchSystem {
    pub fn general(n: i64, k: i64, h: i64, mult: &[i64]) -> Self {
        let nodes = (0..mult.len()).map(|i| PointNode::proper(format!("p{i}"))).collect();
        HirzebruchSystem { n, k, h, cluster: Cluster::new(nodes), mult: mult.to_vec() }
    }

    pub fn lattice(&self) -> BlowupLattice {
        BlowupLattice::new(Surface::Fn { n: self.n }, self.cluster.clone())
    }

    pub fn class(&self) -> Result<DivisorClass> {
        self.lattice().hirzebruch_class(self.k, self.h, &self.mult)
    }

    pub fn unloaded(&self) -> Result<Self> {
        let prox = self.cluster.proximity()?;
        Ok(HirzebruchSystem { mult: unload_vec(&prox, &self.mult)?, ..self.clone() })
    }

    pub fn drop_zero(&self) -> Self {
        let (cluster, mult) = drop_zero_points(&self.cluster, &self.mult);
        HirzebruchSystem { cluster, mult, ..self.clone() }
    }

    pub fn sorted_mults(&self) -> Vec<i64> {
        let mut v = self.mult.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

fn drop_zero_points(c: &Cluster, mult: &[i64]) -> (Cluster, Vec<i64>) {
    let n = c.len();
    let mut keep: Vec<bool> = mult.iter().map(|&m| m != 0).collect();
    for j in (0..n).rev() {
        if keep[j] {
            for p in &c.nodes[j].proximate_to {
                if let Some(i) = c.index_of(p) {
                    keep[i] = true;
                }
            }
        }
    }
    let nodes = c.nodes.iter().zip(&keep).filter(|(_, k)| **k).map(|(x, _)| x.clone()).collect();
    let mult = mult.iter().zip(&keep).filter(|(_, k)| **k).map(|(m, _)| *m).collect();
    (Cluster::new(nodes), mult)
}

impl System {
    pub fn cluster(&self) -> &Cluster {
        match self {
            System::Plane(s) => &s.cluster,
            System::Hirzebruch(s) => &s.cluster,
        }
    }

    pub fn mult(&self) -> &[i64] {
        match self {
            System::Plane(s) => &s.mult,
            System::Hirzebruch(s) => &s.mult,
        }
    }

    pub fn lattice(&self) -> BlowupLattice {
        match self {
            System::Plane(s) => s.lattice(),
            System::Hirzebruch(s) => s.lattice(),
        }
    }

    pub fn class(&self) -> Result<DivisorClass> {
        match self {
            System::Plane(s) => s.class(),
            System::Hirzebruch(s) => s.class(),
        }
    }

    pub fn unloaded(&self) -> Result<Self> {
        Ok(match self {
            System::Plane(s) => System::Plane(s.unloaded()?),
            System::Hirzebruch(s) => System::Hirzebruch(s.unloaded()?),
        })
    }

    /// Negative degree (plane) or negative `k`/`h` (Hirzebruch).
    pub fn negative_degree(&self) -> bool {
        match self {
            System::Plane(s) => s.degree < 0,
            System::Hirzebruch(s) => s.k < 0 || s.h < 0,
        }
    }

    pub fn as_plane(&self) -> Option<&PlaneSystem> {
        match self {
            System::Plane(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_hirzebruch(&self) -> Option<&HirzebruchSystem> {
        match self {
            System::Hirzebruch(s) => Some(s),
            _ => None,
        }
    }
}

fn point_conditions(mult: &[i64]) -> i64 {
    mult.iter().map(|m| m * (m + 1) / 2).sum()
}

pub fn virtual_dimension(l: &System) -> i64 {
    match l {
        System::Plane(s) => s.degree * (s.degree + 3) / 2 - point_conditions(&s.mult),
        System::Hirzebruch(s) => {
            (s.k + 1) * (s.h + 1) - s.n * s.k * (s.k + 1) / 2 - 1 - point_conditions(&s.mult)
        }
    }
}

pub fn arithmetic_genus(l: &System) -> Result<i64> {
    lattice::genus(&l.lattice(), &l.class()?)
}

/// What is left after removing the known curves the system meets
/// negatively: exceptional curves by unloading, lines through pairs of
/// points, fibers through proper points and the negative section. Each such
/// curve is a fixed component. `None` once the class leaves the effective
/// cone.
pub fn mobile_part(l: &System) -> Result<Option<System>> {
    if l.negative_degree() {
        return Ok(None);
    }
    let mut m = match l {
        System::Plane(s) => Model::from_plane(s)?,
        System::Hirzebruch(s) => Model::from_hirzebruch(s)?,
    };
    let size = match l {
        System::Plane(s) => s.degree,
        System::Hirzebruch(s) => s.k + s.h,
    };
    for _ in 0..=size + 1 {
        m.unload_all()?;
        let outside = match l {
            System::Plane(_) => m.degree() < 0,
            System::Hirzebruch(_) => {
                let (k, h) = m.kh();
                k < 0 || h < 0
            }
        };
        if outside {
            return Ok(None);
        }
        let d = m.system().clone();
        let Some((_, c)) = m.known_curves().into_iter().find(|(_, c)| m.dot(&d, c) < 0) else {
            return Ok(Some(match l {
                System::Plane(_) => System::Plane(m.to_plane(0, true)?),
                System::Hirzebruch(_) => System::Hirzebruch(m.to_hirzebruch(0, true)?),
            }));
        };
        for (x, y) in m.classes[0].iter_mut().zip(&c) {
            *x -= y;
        }
    }
    Err(Error::IterationBound("removing fixed curves".into()))
}

/// Known curves other than exceptional ones that the unloaded system meets
/// negatively. Data for an irreducible curve has none.
pub fn fixed_curves(l: &System) -> Result<Vec<String>> {
    let mut m = match l {
        System::Plane(s) => Model::from_plane(s)?,
        System::Hirzebruch(s) => Model::from_hirzebruch(s)?,
    };
    m.unload_all()?;
    let d = m.system().clone();
    Ok(m
        .known_curves()
        .into_iter()
        .filter(|(label, c)| !label.starts_with("E'(") && m.dot(&d, c) < 0)
        .map(|(label, _)| label)
        .collect())
}

/// Expected dimension: the virtual dimension of the mobile part, `-1` when
/// the system is empty.
pub fn dimension(l: &System) -> Result<i64> {
    Ok(match mobile_part(l)? {
        Some(r) => virtual_dimension(&r).max(-1),
        None => -1,
    })
}

/// Empty when the degree is negative or the expected dimension is.
pub fn is_empty(l: &System) -> Result<bool> {
    Ok(dimension(l)? < 0)
}

/// The `m`-adjoint: curves of `C + mK`. `None` when empty.
pub fn adjoint(l: &System, m: i64) -> Result<Option<System>> {
    if m < 1 {
        return Err(Error::Precondition("adjoint index must be positive".into()));
    }
    let base = l.unloaded()?;
    let shifted: Vec<i64> = base.mult().iter().map(|&x| x - m).collect();
    let keep: Vec<bool> = shifted.iter().map(|&x| x > 0).collect();
    let nodes: Vec<PointNode> = base
        .cluster()
        .nodes
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(n, _)| n.clone())
        .collect();
    let mult: Vec<i64> = shifted.iter().zip(&keep).filter(|(_, k)| **k).map(|(x, _)| *x).collect();
    let cluster = Cluster::new(nodes);
    let out = match &base {
        System::Plane(s) => System::Plane(PlaneSystem {
            degree: s.degree - 3 * m,
            lines: s
                .lines
                .iter()
                .map(|ln| ln.iter().filter(|id| cluster.index_of(id).is_some()).cloned().collect::<Vec<_>>())
                .filter(|ln| ln.len() >= 3)
                .collect(),
            cluster,
            mult,
        }),
        System::Hirzebruch(s) => System::Hirzebruch(HirzebruchSystem {
            n: s.n,
            k: s.k - 2 * m,
            h: s.h - (2 + s.n) * m,
            cluster,
            mult,
        }),
    };
    if out.negative_degree() {
        return Ok(None);
    }
    let out = out.unloaded()?;
    if is_empty(&out)? {
        return Ok(None);
    }
    Ok(Some(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointChain {
    /// `systems[i]` is `ad_i`, with `systems[0]` the system itself. Entries
    /// can be `None` before the last nonempty one.
    pub systems: Vec<Option<System>>,
    pub m: i64,
    /// Expected dimension of `ad_m`.
    pub alpha: i64,
    /// Indices below `m` whose adjoint is empty.
    pub gaps: Vec<i64>,
    pub generic_position_assumed: bool,
}

impl AdjointChain {
    pub fn ad(&self, i: usize) -> Option<&System> {
        self.systems.get(i).and_then(|s| s.as_ref())
    }
}

pub fn adjoint_chain(l: &System) -> Result<AdjointChain> {
    let mut systems = vec![Some(l.unloaded()?)];
    let mut i = 1;
    loop {
        let still = match l {
            System::Plane(s) => s.degree - 3 * i >= 0,
            System::Hirzebruch(s) => s.k - 2 * i >= 0 && s.h - (2 + s.n) * i >= 0,
        };
        if !still {
            break;
        }
        systems.push(adjoint(l, i)?);
        i += 1;
    }
    let m = systems.iter().rposition(|s| s.is_some()).unwrap_or(0);
    systems.truncate(m + 1);
    let gaps = (1..m).filter(|&i| systems[i].is_none()).map(|i| i as i64).collect();
    let alpha = match &systems[m] {
        Some(s) => dimension(s)?,
        None => -1,
    };
    Ok(AdjointChain { systems, m: m as i64, alpha, gaps, generic_position_assumed: true })
}

pub fn is_line_case(l: &System) -> Result<bool> {
    Ok(adjoint(l, 1)?.is_none() && adjoint(l, 2)?.is_none())
}

/// `d >= m_1 + m_2 + m_3` over the base points of the system.
pub fn is_noether_type(l: &PlaneSystem) -> Result<bool> {
    is_noether_type_padded(l, 0)
}

/// Same test when every point outside the cluster has multiplicity
/// `general`. A single curve passes simply through its general points, so
/// `L(3;2)` read as a curve is not of Noether type.
pub fn is_noether_type_padded(l: &PlaneSystem, general: i64) -> Result<bool> {
    let mut m = l.unloaded()?.sorted_mults();
    m.extend([general; 3]);
    m.sort_by(|a, b| b.cmp(a));
    let top: i64 = m.iter().take(3).sum();
    Ok(l.degree >= top)
}

/// The maximal point together with `k = d - m_p`.
pub fn admissible_data(l: &PlaneSystem) -> Result<(usize, i64)> {
    let p = l.max_point().ok_or(Error::EmptySystem)?;
    Ok((p, l.degree - l.mult[p]))
}

/// Admissibility, in the scale-invariant form
/// `2d - 3k > sum over other points with 2v > k of (2v - k)`, where every
/// such point must lie infinitely near the maximal point.
pub fn is_admissible(l: &PlaneSystem) -> Result<bool> {
    let l = l.unloaded()?;
    let (p, k) = admissible_data(&l)?;
    let mut excess = 0;
    for (i, &v) in l.mult.iter().enumerate() {
        if i == p || 2 * v <= k {
            continue;
        }
        if !l.cluster.is_ancestor(p, i)? {
            return Ok(false);
        }
        excess += 2 * v - k;
    }
    Ok(2 * l.degree - 3 * k > excess)
}
