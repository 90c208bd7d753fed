//! Proximity forests of proper and infinitely near points, and unloading of
//! multiplicity assignments over them.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(rename = "on_E", default, skip_serializing_if = "is_false")]
    pub on_e: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub on_fiber_strict: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub general: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointNode {
    pub id: String,
    pub predecessor: Option<String>,
    pub proximate_to: Vec<String>,
    pub flags: Flags,
}

impl PointNode {
    pub fn proper(id: impl Into<String>) -> Self {
        PointNode {
            id: id.into(),
            predecessor: None,
            proximate_to: Vec::new(),
            flags: Flags::default(),
        }
    }

    /// A free point infinitely near of order one to `pred`.
    pub fn near(id: impl Into<String>, pred: impl Into<String>) -> Self {
        let pred = pred.into();
        PointNode {
            id: id.into(),
            predecessor: Some(pred.clone()),
            proximate_to: vec![pred],
            flags: Flags::default(),
        }
    }

    /// A point infinitely near to `pred` and satellite to `other`.
    pub fn satellite(
        id: impl Into<String>,
        pred: impl Into<String>,
        other: impl Into<String>,
    ) -> Self {
        let pred = pred.into();
        PointNode {
            id: id.into(),
            predecessor: Some(pred.clone()),
            proximate_to: vec![pred, other.into()],
            flags: Flags::default(),
        }
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn is_proper(&self) -> bool {
        self.predecessor.is_none()
    }

    pub fn is_satellite(&self) -> bool {
        self.proximate_to.len() == 2
    }

    /// The non-predecessor point a satellite is proximate to.
    pub fn satellite_target(&self) -> Option<&String> {
        self.proximate_to
            .iter()
            .find(|p| Some(*p) != self.predecessor.as_ref())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cluster {
    pub nodes: Vec<PointNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub node: String,
    pub rule: String,
}

impl Violation {
    fn new(node: &str, rule: &str) -> Self {
        Violation {
            node: node.to_string(),
            rule: rule.to_string(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.node, self.rule)
    }
}

impl Cluster {
    pub fn new(nodes: Vec<PointNode>) -> Self {
        Cluster { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.id.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&PointNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// For every node, the indices of the points it is proximate to.
    pub fn proximity(&self) -> Result<Vec<Vec<usize>>> {
        let pos: HashMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        self.nodes
            .iter()
            .map(|n| {
                n.proximate_to
                    .iter()
                    .map(|p| pos.get(p.as_str()).copied().ok_or_else(|| Error::UnknownPoint(p.clone())))
                    .collect()
            })
            .collect()
    }

    /// Predecessor index for every node.
    pub fn predecessors(&self) -> Result<Vec<Option<usize>>> {
        self.nodes
            .iter()
            .map(|n| match &n.predecessor {
                None => Ok(None),
                Some(p) => self
                    .index_of(p)
                    .map(Some)
                    .ok_or_else(|| Error::UnknownPoint(p.clone())),
            })
            .collect()
    }

    /// Number of blow-ups separating each point from a proper point.
    pub fn depths(&self) -> Result<Vec<usize>> {
        let pred = self.predecessors()?;
        let mut depth = vec![0usize; pred.len()];
        for i in 0..pred.len() {
            let mut d = 0;
            let mut cur = pred[i];
            while let Some(p) = cur {
                d += 1;
                if d > pred.len() {
                    return Err(Error::InvalidCluster("cycle in predecessor relation".into()));
                }
                cur = pred[p];
            }
            depth[i] = d;
        }
        Ok(depth)
    }

    /// The proper point each node lies over.
    pub fn roots(&self) -> Result<Vec<usize>> {
        let pred = self.predecessors()?;
        let depth = self.depths()?;
        Ok((0..pred.len())
            .map(|i| {
                let mut cur = i;
                for _ in 0..depth[i] {
                    cur = pred[cur].unwrap();
                }
                cur
            })
            .collect())
    }

    pub fn is_ancestor(&self, anc: usize, of: usize) -> Result<bool> {
        let pred = self.predecessors()?;
        let mut cur = pred[of];
        let mut steps = 0;
        while let Some(p) = cur {
            if p == anc {
                return Ok(true);
            }
            steps += 1;
            if steps > pred.len() {
                break;
            }
            cur = pred[p];
        }
        Ok(false)
    }
}

/// Structural checks on a cluster. Returns one entry per broken rule.
pub fn validate_cluster(c: &Cluster) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, n) in c.nodes.iter().enumerate() {
        if seen.insert(n.id.as_str(), i).is_some() {
            out.push(Violation::new(&n.id, "duplicate id"));
        }
    }
    let pos = |id: &str| c.nodes.iter().position(|n| n.id == id);

    for (i, n) in c.nodes.iter().enumerate() {
        let mut refs_ok = true;
        for r in n.predecessor.iter().chain(n.proximate_to.iter()) {
            if pos(r).is_none() {
                out.push(Violation::new(&n.id, &format!("unknown reference `{r}`")));
                refs_ok = false;
            }
        }
        let Some(pred) = &n.predecessor else {
            if !n.proximate_to.is_empty() {
                out.push(Violation::new(&n.id, "proper point with nonempty proximate_to"));
            }
            continue;
        };
        if !n.proximate_to.contains(pred) {
            out.push(Violation::new(&n.id, "predecessor not in proximate_to"));
            continue;
        }
        if n.proximate_to.len() > 2 {
            out.push(Violation::new(&n.id, "proximate to more than two points"));
            continue;
        }
        let mut uniq = n.proximate_to.clone();
        uniq.sort();
        uniq.dedup();
        if uniq.len() != n.proximate_to.len() {
            out.push(Violation::new(&n.id, "repeated entry in proximate_to"));
            continue;
        }
        if !refs_ok {
            continue;
        }
        let pi = pos(pred).unwrap();
        if pi >= i {
            out.push(Violation::new(&n.id, "predecessor must precede the point"));
            continue;
        }
        if let Some(other) = n.proximate_to.iter().find(|p| *p != pred) {
            let oi = pos(other).unwrap();
            let anc = c.is_ancestor(oi, pi).unwrap_or(false);
            if !anc {
                out.push(Violation::new(&n.id, "satellite target is not an ancestor of the predecessor"));
            } else if !c.nodes[pi].proximate_to.contains(other) {
                out.push(Violation::new(
                    &n.id,
                    "satellite target must also be proximate from the predecessor",
                ));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    // two free or two satellite siblings cannot share the same satellite target
    for (i, n) in c.nodes.iter().enumerate() {
        if !n.is_satellite() {
            continue;
        }
        for m in &c.nodes[..i] {
            if m.predecessor == n.predecessor && m.is_satellite() && m.satellite_target() == n.satellite_target() {
                out.push(Violation::new(&n.id, "two satellite siblings proximate to the same point"));
            }
        }
    }
    out
}

fn check_valid(c: &Cluster) -> Result<()> {
    let v = validate_cluster(c);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidCluster(
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
        ))
    }
}

/// Defects in index form: `m_i - sum of m_j over points j proximate to i`.
pub fn defects_vec(prox: &[Vec<usize>], m: &[i64]) -> Vec<i64> {
    let mut d = m.to_vec();
    for (j, ps) in prox.iter().enumerate() {
        for &i in ps {
            d[i] -= m[j];
        }
    }
    d
}

fn to_vec(c: &Cluster, m: &BTreeMap<String, i64>) -> Result<Vec<i64>> {
    for k in m.keys() {
        if c.index_of(k).is_none() {
            return Err(Error::UnknownPoint(k.clone()));
        }
    }
    Ok(c.nodes
        .iter()
        .map(|n| m.get(&n.id).copied().unwrap_or(0))
        .collect())
}

fn to_map(c: &Cluster, v: &[i64]) -> BTreeMap<String, i64> {
    c.nodes.iter().zip(v).map(|(n, &x)| (n.id.clone(), x)).collect()
}

pub fn proximity_defects(c: &Cluster, m: &BTreeMap<String, i64>) -> Result<BTreeMap<String, i64>> {
    check_valid(c)?;
    let v = to_vec(c, m)?;
    Ok(to_map(c, &defects_vec(&c.proximity()?, &v)))
}

pub fn is_pure(prox: &[Vec<usize>], m: &[i64]) -> bool {
    defects_vec(prox, m).iter().all(|&d| d >= 0)
}

/// Unit-step unloading in index form. Each step picks the first point with a
/// negative defect, raises it by one and lowers every point proximate to it.
pub fn unload_vec(prox: &[Vec<usize>], m: &[i64]) -> Result<Vec<i64>> {
    let n = m.len();
    let mut sources: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, ps) in prox.iter().enumerate() {
        for &i in ps {
            sources[i].push(j);
        }
    }
    let total: i64 = m.iter().map(|x| x.abs()).sum();
    let bound = (total as u64 + n as u64 + 1).saturating_mul(n as u64 + 1).saturating_mul(n as u64 + 1) + 1000;
    let mut out = m.to_vec();
    let mut steps = 0u64;
    loop {
        let defect = |out: &[i64], i: usize| out[i] - sources[i].iter().map(|&j| out[j]).sum::<i64>();
        let Some(i) = (0..n).find(|&i| defect(&out, i) < 0) else {
            return Ok(out);
        };
        out[i] += 1;
        for &j in &sources[i] {
            out[j] -= 1;
        }
        steps += 1;
        if steps > bound {
            return Err(Error::IterationBound("unloading did not terminate".into()));
        }
    }
}

pub fn unload(c: &Cluster, m: &BTreeMap<String, i64>) -> Result<BTreeMap<String, i64>> {
    check_valid(c)?;
    let v = to_vec(c, m)?;
    Ok(to_map(c, &unload_vec(&c.proximity()?, &v)?))
}
