//! Degree reduction: greedy quadratic reduction to Noether type, and the
//! search over de Jonquieres maps centered at the maximal point.

use serde::{Deserialize, Serialize};

use crate::cluster::{Cluster, PointNode};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::par;
use crate::systems::{is_admissible, PlaneSystem};
use crate::transforms::{apply_net, NetAnchoring};

/// Applies quadratic maps at the three heaviest admissible centers while the
/// degree drops. Returns the reduced system and the centers used.
pub fn noether_reduce(l: &PlaneSystem) -> Result<(PlaneSystem, Vec<[String; 3]>)> {
    let mut m = Model::from_plane(&l.unloaded()?)?;
    m.unload_all()?;
    let mut used = Vec::new();
    for _ in 0..=l.degree.max(0) {
        let d = m.degree();
        let mults = m.mults();
        let pts: Vec<usize> = (0..mults.len()).filter(|&i| mults[i] > 0).collect();
        let mut best: Option<(i64, [usize; 3])> = None;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                for c in b + 1..pts.len() {
                    let t = [pts[a], pts[b], pts[c]];
                    let s = mults[t[0]] + mults[t[1]] + mults[t[2]];
                    if s <= d || best.is_some_and(|(bs, _)| bs >= s) {
                        continue;
                    }
                    if m.quadratic_pattern(t[0], t[1], t[2]).is_ok() {
                        best = Some((s, t));
                    }
                }
            }
        }
        let Some((_, t)) = best else {
            return Ok((m.to_plane(0, true)?, used));
        };
        used.push(t.map(|i| m.points[i].id.clone()));
        m.quadratic(t[0], t[1], t[2])?;
    }
    Err(Error::IterationBound("Noether reduction".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JonquieresWitness {
    pub delta: i64,
    pub center: String,
    /// Base points of the system used as simple base points of the map.
    pub simple: Vec<String>,
    /// Number of further simple base points in general position.
    pub general: usize,
    pub image_degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub degree: i64,
    pub best_degree: i64,
    pub witness: Option<JonquieresWitness>,
    pub image: PlaneSystem,
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u64..(1u64 << n))
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Smallest valid degree of a de Jonquieres net through `simple`, with the
/// resulting image degree.
fn best_net(m: &Model, p: usize, simple: &[usize], max_delta: i64) -> Option<(i64, i64)> {
    let d = m.degree();
    let k = d - m.mult(p);
    let lo = ((simple.len() as i64 + 1) / 2 + 1).max(2);
    for delta in lo..=max_delta.max(lo) {
        let mut net = m.base[0].iter().map(|&x| x * delta).collect::<Vec<i64>>();
        for (x, z) in net.iter_mut().zip(&m.points[p].z) {
            *x -= (delta - 1) * z;
        }
        for &q in simple {
            for (x, z) in net.iter_mut().zip(&m.points[q].z) {
                *x -= z;
            }
        }
        if !m.is_pure(&net) {
            continue;
        }
        if m.curves.iter().any(|c| !m.is_contracted(c) && m.dot(&net, c) < 0) {
            continue;
        }
        let sum: i64 = simple.iter().map(|&q| m.mult(q)).sum();
        return Some((delta, d + (delta - 1) * k - sum));
    }
    None
}

fn reduce_with(l: &PlaneSystem, parallel: bool) -> Result<Reduction> {
    if !is_admissible(l)? {
        return Err(Error::NotAdmissible);
    }
    let l = l.unloaded()?;
    let mut m = Model::from_plane(&l)?;
    m.unload_all()?;
    let p = l.max_point().ok_or(Error::EmptySystem)?;
    let eligible: Vec<usize> = (0..l.mult.len()).filter(|&i| i != p && l.mult[i] > 0).collect();
    if eligible.len() > 16 {
        return Err(Error::Precondition("too many base points for the de Jonquieres search".into()));
    }
    let max_delta = 1 + eligible.len() as i64;
    let cand: Vec<Vec<usize>> = subsets(eligible.len())
        .into_iter()
        .map(|s| s.into_iter().map(|i| eligible[i]).collect())
        .collect();
    let eval = |s: &Vec<usize>| best_net(&m, p, s, max_delta).map(|(delta, img)| (img, delta, s.clone()));
    let scored: Vec<Option<(i64, i64, Vec<usize>)>> = if parallel { par::map(&cand, eval) } else { par::seq::map(&cand, eval) };
    let best = scored.into_iter().flatten().min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let Some((img, delta, simple)) = best else {
        return Ok(Reduction { degree: l.degree, best_degree: l.degree, witness: None, image: l.drop_zero() });
    };
    let general = (2 * delta - 2) as usize - simple.len();
    let witness = JonquieresWitness {
        delta,
        center: l.cluster.nodes[p].id.clone(),
        simple: simple.iter().map(|&i| l.cluster.nodes[i].id.clone()).collect(),
        general,
        image_degree: img,
    };
    if img >= l.degree {
        return Ok(Reduction { degree: l.degree, best_degree: l.degree, witness: Some(witness), image: l.drop_zero() });
    }
    // realize the map to get the image system
    let mut nodes = l.cluster.nodes.clone();
    let mut mult: Vec<i64> = vec![0; nodes.len()];
    mult[p] = delta - 1;
    for &q in &simple {
        mult[q] = 1;
    }
    for g in 0..general {
        let mut id = format!("j{}", g + 1);
        while nodes.iter().any(|n| n.id == id) {
            id.push('~');
        }
        nodes.push(PointNode::proper(id));
        mult.push(1);
    }
    let net = PlaneSystem { degree: delta, cluster: Cluster::new(nodes), mult, lines: l.lines.clone() };
    let anchor: NetAnchoring = l.cluster.nodes.iter().map(|n| (n.id.clone(), n.id.clone())).collect();
    let image = apply_net(&l, &net, &anchor)?.drop_zero();
    if image.degree != img {
        return Err(Error::Internal(format!("de Jonquieres image degree {} != predicted {img}", image.degree)));
    }
    Ok(Reduction { degree: l.degree, best_degree: img, witness: Some(witness), image })
}

/// Minimal image degree over de Jonquieres maps centered at the maximal
/// point whose simple base points are base points of `l` or general.
pub fn dejonquieres_reduction(l: &PlaneSystem) -> Result<Reduction> {
    reduce_with(l, true)
}

/// Sequential version of `dejonquieres_reduction`.
pub fn dejonquieres_reduction_seq(l: &PlaneSystem) -> Result<Reduction> {
    reduce_with(l, false)
}
