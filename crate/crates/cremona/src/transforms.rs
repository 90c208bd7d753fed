//! Cremona and elementary transformations acting on system data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::{defects_vec, Cluster, PointNode};
use crate::error::{Error, Result};
use crate::factorize;
use crate::lattice::{self};
use crate::model::{ElmRecord, Model};
use crate::systems::{HirzebruchSystem, PlaneSystem};

/// A plane system meant as the net of a Cremona map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomaloidalNet {
    pub net: PlaneSystem,
}

/// Net point id -> system point id.
pub type NetAnchoring = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplicity {
    pub k: i64,
    pub h: i64,
    pub s: i64,
}

impl Simplicity {
    pub const QUADRATIC: Simplicity = Simplicity { k: 1, h: 2, s: 0 };
}

pub fn is_homaloidal(net: &PlaneSystem) -> bool {
    if !crate::cluster::validate_cluster(&net.cluster).is_empty() {
        return false;
    }
    let d = net.degree;
    let sq: i64 = net.mult.iter().map(|a| a * a).sum();
    let lin: i64 = net.mult.iter().sum();
    if d < 1 || d * d - 1 != sq || 3 * (d - 1) != lin {
        return false;
    }
    match net.cluster.proximity() {
        Ok(prox) => net.mult.iter().all(|&a| a >= 0) && defects_vec(&prox, &net.mult).iter().all(|&x| x >= 0),
        Err(_) => false,
    }
}

/// The maximal point and the remaining points with `2 alpha > k`, ordered by
/// decreasing multiplicity (ties by cluster order).
pub fn simplicity_points(net: &PlaneSystem) -> Result<(usize, i64, Vec<usize>)> {
    let p0 = net.max_point().ok_or(Error::EmptySystem)?;
    let k = net.degree - net.mult[p0];
    let mut rest: Vec<usize> = (0..net.mult.len())
        .filter(|&i| i != p0 && 2 * net.mult[i] > k)
        .collect();
    rest.sort_by(|&a, &b| net.mult[b].cmp(&net.mult[a]).then(a.cmp(&b)));
    Ok((p0, k, rest))
}

fn satellite_to(c: &Cluster, i: usize, p0: usize) -> bool {
    let node = &c.nodes[i];
    let target = &c.nodes[p0].id;
    node.is_satellite() && node.satellite_target() == Some(target)
}

pub fn simplicity(net: &PlaneSystem) -> Result<Simplicity> {
    let (p0, k, rest) = simplicity_points(net)?;
    let s = rest.iter().filter(|&&i| satellite_to(&net.cluster, i, p0)).count() as i64;
    Ok(Simplicity { k, h: rest.len() as i64, s })
}

fn model_with(l: &PlaneSystem, ids: &[&str]) -> Result<(Model, Vec<usize>)> {
    let mut m = Model::from_plane(l)?;
    let mut idx = Vec::new();
    for id in ids {
        let i = match m.index(id) {
            Some(i) => i,
            None => m.add_named_point(id.to_string(), &[0]),
        };
        idx.push(i);
    }
    Ok((m, idx))
}

/// Quadratic map centered at three points of `l`. Ids that are not in the
/// cluster become fresh general points of multiplicity zero.
pub fn apply_quadratic(l: &PlaneSystem, centers: [&str; 3]) -> Result<PlaneSystem> {
    let (mut m, idx) = model_with(l, &centers)?;
    m.quadratic(idx[0], idx[1], idx[2])?;
    m.to_plane(0, false)
}

/// `d delta - sum alpha_i m_i` over anchored net points.
pub fn virtual_image_degree(l: &PlaneSystem, net: &PlaneSystem, anchor: &NetAnchoring) -> Result<i64> {
    let mut v = l.degree * net.degree;
    for (i, node) in net.cluster.nodes.iter().enumerate() {
        if let Some(sid) = anchor.get(&node.id) {
            let m = l.mult_of(sid).ok_or_else(|| Error::UnknownPoint(sid.clone()))?;
            v -= net.mult[i] * m;
        }
    }
    Ok(v)
}

/// The system and the net rewritten on one shared cluster. Anchored net
/// points take the system id; the others are appended with system
/// multiplicity zero.
pub fn merge_with_net(
    l: &PlaneSystem,
    net: &PlaneSystem,
    anchor: &NetAnchoring,
) -> Result<(PlaneSystem, PlaneSystem)> {
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    let mut nodes = l.cluster.nodes.clone();
    let mut sys_mult = l.mult.clone();
    for node in &net.cluster.nodes {
        if let Some(sid) = anchor.get(&node.id) {
            if l.cluster.index_of(sid).is_none() {
                return Err(Error::UnknownPoint(sid.clone()));
            }
            rename.insert(node.id.clone(), sid.clone());
            continue;
        }
        let mut id = node.id.clone();
        while nodes.iter().any(|n| n.id == id) {
            id.push('~');
        }
        rename.insert(node.id.clone(), id);
    }
    for node in &net.cluster.nodes {
        if anchor.contains_key(&node.id) {
            continue;
        }
        let r = |s: &String| rename[s].clone();
        nodes.push(PointNode {
            id: r(&node.id),
            predecessor: node.predecessor.as_ref().map(r),
            proximate_to: node.proximate_to.iter().map(r).collect(),
            flags: node.flags.clone(),
        });
        sys_mult.push(0);
    }
    let cluster = Cluster::new(nodes);
    let mut net_mult = vec![0; cluster.len()];
    for (i, node) in net.cluster.nodes.iter().enumerate() {
        let j = cluster.index_of(&rename[&node.id]).unwrap();
        net_mult[j] = net.mult[i];
    }
    let mut lines = l.lines.clone();
    for ln in &net.lines {
        lines.push(ln.iter().map(|x| rename[x].clone()).collect());
    }
    let sys = PlaneSystem { degree: l.degree, cluster: cluster.clone(), mult: sys_mult, lines: lines.clone() };
    let net2 = PlaneSystem { degree: net.degree, cluster, mult: net_mult, lines };
    Ok((sys, net2))
}

/// Image of `l` under the map defined by `net`, computed by running the net's
/// quadratic factorization on both classes in one model.
pub fn apply_net(l: &PlaneSystem, net: &PlaneSystem, anchor: &NetAnchoring) -> Result<PlaneSystem> {
    if !is_homaloidal(net) {
        return Err(Error::NotHomaloidal("net fails the homaloidal identities".into()));
    }
    let (sys, net2) = merge_with_net(l, net, anchor)?;
    let f = factorize::nc_factor(&net2)?;
    let mut m = Model::from_plane(&sys)?;
    let mut tracked = Model::from_plane(&net2)?.classes.remove(0);
    // both models share the basis, so the class transfers verbatim
    tracked.truncate(m.dim);
    m.add_class(tracked);
    for step in f.all_quadratics() {
        let mut idx = Vec::new();
        for id in &step {
            let i = match m.index(id) {
                Some(i) => i,
                None => m.add_named_point(id.clone(), &[0, 0]),
            };
            idx.push(i);
        }
        m.quadratic(idx[0], idx[1], idx[2])?;
    }
    if m.degree_of(&m.classes[1]) != 1 {
        return Err(Error::Internal("net did not become linear".into()));
    }
    m.to_plane(0, false)
}

/// Blows up the maximal point, giving a system on `F_1`.
pub fn blow_up_max_point(l: &PlaneSystem) -> Result<HirzebruchSystem> {
    let p = l.max_point().ok_or(Error::EmptySystem)?;
    blow_up_point(l, &l.cluster.nodes[p].id.clone())
}

pub fn blow_up_point(l: &PlaneSystem, id: &str) -> Result<HirzebruchSystem> {
    let mut m = Model::from_plane(l)?;
    let p = m.idx(id)?;
    if !m.is_proper(p) {
        return Err(Error::Precondition(format!("{id} is not a proper point")));
    }
    m.blow_up(p)?;
    m.to_hirzebruch(0, false)
}

/// Contracts `E_1`; the new point is called `o` (primed if taken).
pub fn contract_e1(l: &HirzebruchSystem) -> Result<PlaneSystem> {
    if l.n != 1 {
        return Err(Error::WrongSurface(format!("contraction of E needs n = 1, got {}", l.n)));
    }
    let mut m = Model::from_hirzebruch(l)?;
    m.contract()?;
    m.to_plane(0, false)
}

/// Checks a rule prediction against the lattice pushforward.
pub fn check_elm_against_lattice(before: &Model, p: usize, rec: &ElmRecord) -> Result<()> {
    let sys = before.to_hirzebruch(0, false)?;
    let pos = sys
        .cluster
        .index_of(&before.points[p].id)
        .ok_or_else(|| Error::Internal("elm point lost on export".into()))?;
    let lat = sys.lattice();
    let img = lattice::elm_pushforward(&lat, &sys.class()?, pos, rec.on_e)?;
    if (img.n, img.k, img.h, img.new_mult) != (rec.n, rec.k, rec.h, rec.new_mult) {
        return Err(Error::Internal(format!(
            "elm rule {:?} disagrees with lattice pushforward {:?}",
            rec, img
        )));
    }
    Ok(())
}

/// `elm` in a model with the lattice check applied.
pub fn checked_elm(m: &mut Model, p: usize) -> Result<ElmRecord> {
    let mut before = m.clone();
    let prediction = before.elm_prediction(p)?;
    if prediction.on_e && !before.on_e(p) {
        // F_0 off the tracked section: the move uses the section through p
        let s: Vec<i64> = before.base[0].iter().zip(&before.points[p].z).map(|(a, b)| a - b).collect();
        before.section = Some(before.push_curve(s));
    }
    let rec = m.elm(p)?;
    check_elm_against_lattice(&before, p, &rec)?;
    Ok(rec)
}

pub fn elementary_transform(l: &HirzebruchSystem, p: &str) -> Result<HirzebruchSystem> {
    let mut m = Model::from_hirzebruch(l)?;
    let i = m.idx(p)?;
    checked_elm(&mut m, i)?;
    m.to_hirzebruch(0, false)
}

/// `elm` at a fresh general point of multiplicity `mu`.
pub fn elementary_transform_general(l: &HirzebruchSystem, mu: i64) -> Result<HirzebruchSystem> {
    let mut m = Model::from_hirzebruch(l)?;
    let i = m.add_general_point(&[mu]);
    checked_elm(&mut m, i)?;
    m.to_hirzebruch(0, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{arithmetic_genus, System};

    fn jonq(d: i64) -> PlaneSystem {
        let mut m = vec![d - 1];
        m.extend(std::iter::repeat_n(1, (2 * d - 2) as usize));
        PlaneSystem::general(d, &m)
    }

    #[test]
    fn homaloidal_identities() {
        assert!(is_homaloidal(&PlaneSystem::general(2, &[1, 1, 1])));
        assert!(is_homaloidal(&jonq(5)));
        assert!(!is_homaloidal(&PlaneSystem::general(3, &[2, 2])));
    }

    #[test]
    fn simplicities() {
        assert_eq!(simplicity(&PlaneSystem::general(2, &[1, 1, 1])).unwrap(), Simplicity { k: 1, h: 2, s: 0 });
        assert_eq!(simplicity(&jonq(4)).unwrap(), Simplicity { k: 1, h: 6, s: 0 });
        let c = Cluster::new(vec![
            PointNode::proper("p0"),
            PointNode::near("p1", "p0"),
            PointNode::satellite("p2", "p1", "p0"),
            PointNode::proper("p3"),
            PointNode::proper("p4"),
        ]);
        let net = PlaneSystem { degree: 3, cluster: c, mult: vec![2, 1, 1, 1, 1], lines: vec![] };
        assert!(is_homaloidal(&net));
        assert_eq!(simplicity(&net).unwrap(), Simplicity { k: 1, h: 4, s: 1 });
    }

    #[test]
    fn quadratic_examples() {
        let l = PlaneSystem::general(1, &[]);
        let img = apply_quadratic(&l, ["a", "b", "c"]).unwrap();
        assert_eq!((img.degree, img.mult.clone()), (2, vec![1, 1, 1]));
        let back = apply_quadratic(&img, ["a", "b", "c"]).unwrap();
        assert_eq!(back.drop_zero(), PlaneSystem::general(1, &[]));
        let s = PlaneSystem::general(6, &[2, 2, 2]);
        let img = apply_quadratic(&s, ["p0", "p1", "p2"]).unwrap();
        assert_eq!((img.degree, img.mult.clone()), (6, vec![2, 2, 2]));
    }

    #[test]
    fn image_degrees() {
        let l = PlaneSystem::general(5, &[2, 1]);
        let q = PlaneSystem::general(2, &[1, 1, 1]);
        assert_eq!(virtual_image_degree(&l, &q, &NetAnchoring::new()).unwrap(), 10);
        let a: NetAnchoring = [("p0".to_string(), "p0".to_string()), ("p1".to_string(), "p1".to_string())].into();
        assert_eq!(virtual_image_degree(&l, &q, &a).unwrap(), 10 - 2 - 1);
    }

    #[test]
    fn nets_apply() {
        let l = PlaneSystem::general(1, &[]);
        let img = apply_net(&l, &jonq(3), &NetAnchoring::new()).unwrap();
        assert_eq!(img.degree, 3);
        let l = PlaneSystem::general(4, &[1, 1]);
        let q = PlaneSystem::general(2, &[1, 1, 1]);
        let a: NetAnchoring = [("p0".to_string(), "p0".to_string())].into();
        let direct = apply_net(&l, &q, &a).unwrap();
        assert_eq!(direct.degree, virtual_image_degree(&l, &q, &a).unwrap());
    }

    #[test]
    fn plane_and_f1() {
        let l = PlaneSystem::general(3, &[1]);
        let f = blow_up_max_point(&l).unwrap();
        assert_eq!((f.n, f.k, f.h), (1, 2, 3));
        let l = PlaneSystem::general(7, &[6]);
        let f = blow_up_max_point(&l).unwrap();
        assert_eq!((f.n, f.k, f.h), (1, 1, 7));
        let back = contract_e1(&f).unwrap();
        assert_eq!((back.degree, back.mult.clone()), (7, vec![6]));
    }

    #[test]
    fn elm_rule_and_genus() {
        let s = HirzebruchSystem::general(3, 1, 4, &[]);
        let img = elementary_transform_general(&s, 0).unwrap();
        assert_eq!((img.n, img.k, img.h), (2, 1, 4));
        assert_eq!(img.mult, vec![1]);
        assert!(img.cluster.nodes[0].flags.on_e);
        let s = HirzebruchSystem::general(2, 4, 9, &[2, 1]);
        let g = arithmetic_genus(&System::from(s.clone())).unwrap();
        let img = elementary_transform(&s, "p0").unwrap();
        assert_eq!((img.n, img.k, img.h), (1, 4, 7));
        assert_eq!(arithmetic_genus(&System::from(img.clone())).unwrap(), g);
        let twice = elementary_transform(&img, "p0'").unwrap();
        assert_eq!((twice.n, twice.k, twice.h), (2, 4, 9));
        assert_eq!(twice.sorted_mults(), vec![2, 1]);
    }
}
