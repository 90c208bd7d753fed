#![allow(dead_code)]

use std::collections::BTreeMap;

use cremona::cluster::{validate_cluster, Cluster, PointNode};
use cremona::model::Model;
use cremona::systems::{HirzebruchSystem, PlaneSystem};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

/// How to attach point `i`: 0 proper, 1 free near `parent`, 2 satellite of
/// `parent` (falls back to free when no target is available).
pub type Step = (u8, usize, usize);

/// A valid cluster from arbitrary steps.
pub fn build_cluster(steps: &[Step]) -> Cluster {
    let mut nodes: Vec<PointNode> = Vec::new();
    for (i, &(how, parent, target)) in steps.iter().enumerate() {
        let id = format!("x{i}");
        if i == 0 || how == 0 {
            nodes.push(PointNode::proper(id));
            continue;
        }
        let pred = nodes[parent % i].clone();
        if how == 2 && !pred.proximate_to.is_empty() {
            let t = pred.proximate_to[target % pred.proximate_to.len()].clone();
            let taken = nodes
                .iter()
                .any(|n| n.predecessor.as_ref() == Some(&pred.id) && n.satellite_target() == Some(&t));
            if !taken {
                nodes.push(PointNode::satellite(id, pred.id.clone(), t));
                continue;
            }
        }
        nodes.push(PointNode::near(id, pred.id.clone()));
    }
    let c = Cluster::new(nodes);
    debug_assert!(validate_cluster(&c).is_empty());
    c
}

pub fn steps(max_points: usize) -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec((0u8..3, any::<usize>(), any::<usize>()), 1..=max_points)
}

/// Steps whose first `k` points are proper.
pub fn steps_with_proper(max_points: usize, k: usize) -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec((0u8..3, any::<usize>(), any::<usize>()), k..=max_points.max(k)).prop_map(move |mut s| {
        for x in s.iter_mut().take(k) {
            x.0 = 0;
        }
        s
    })
}

/// Cluster with multiplicities in `0..=max_mult`, unconstrained by proximity.
pub fn marked_cluster(max_points: usize, max_mult: i64) -> impl Strategy<Value = (Cluster, Vec<i64>)> {
    steps(max_points).prop_flat_map(move |s| {
        let n = s.len();
        (Just(build_cluster(&s)), prop::collection::vec(0..=max_mult, n))
    })
}

pub fn plane_system(max_points: usize, max_degree: i64) -> impl Strategy<Value = PlaneSystem> {
    (1..=max_degree, marked_cluster(max_points, max_degree))
        .prop_map(|(d, (cluster, mult))| PlaneSystem { degree: d, cluster, mult, lines: vec![] })
}

/// Plane systems with multiplicities below the degree, unloaded.
pub fn pure_plane_system(max_points: usize, max_degree: i64) -> impl Strategy<Value = PlaneSystem> {
    pure_plane_system_from(steps(max_points), max_points, max_degree)
}

/// As `pure_plane_system`, with at least three proper points.
pub fn pure_plane_system3(max_points: usize, max_degree: i64) -> impl Strategy<Value = PlaneSystem> {
    pure_plane_system_from(steps_with_proper(max_points, 3), max_points, max_degree)
}

fn pure_plane_system_from(
    steps: impl Strategy<Value = Vec<Step>>,
    max_points: usize,
    max_degree: i64,
) -> impl Strategy<Value = PlaneSystem> {
    (2..=max_degree, steps, prop::collection::vec(0i64..64, max_points)).prop_map(|(d, s, raw)| {
        let cluster = build_cluster(&s);
        let mult = raw[..cluster.len()].iter().map(|m| m % d).collect();
        PlaneSystem { degree: d, cluster, mult, lines: vec![] }.unloaded().unwrap()
    })
}

/// Points on `F_n` with no fiber or section flags.
pub fn hirzebruch_system(max_points: usize) -> impl Strategy<Value = HirzebruchSystem> {
    (0i64..=4, 1i64..=6, steps(max_points), prop::collection::vec(0i64..64, max_points)).prop_map(
        |(n, k, s, raw)| {
            let cluster = build_cluster(&s);
            let h = n * k + (raw[0] % 6);
            let mult = raw[..cluster.len()].iter().map(|m| m % (k + 1)).collect();
            HirzebruchSystem { n, k, h, cluster, mult }.unloaded().unwrap()
        },
    )
}

pub fn random_steps(rng: &mut StdRng, n: usize) -> Vec<Step> {
    (0..n).map(|_| (rng.gen_range(0..3), rng.gen(), rng.gen())).collect()
}

pub fn mult_map(c: &Cluster, m: &[i64]) -> BTreeMap<String, i64> {
    c.ids().into_iter().zip(m.iter().copied()).collect()
}

/// Proximity defects `m_p - sum of m_q` over `q` proximate to `p`.
pub fn defects(c: &Cluster, m: &[i64]) -> Vec<i64> {
    let prox = c.proximity().unwrap();
    let mut d = m.to_vec();
    for (q, ps) in prox.iter().enumerate() {
        for &p in ps {
            d[p] -= m[q];
        }
    }
    d
}

/// Homaloidal net from a random chain of quadratic maps starting at the
/// identity, with degree in `2..=max_degree`.
pub fn random_net(rng: &mut StdRng, max_degree: i64) -> Option<PlaneSystem> {
    let mut m = Model::from_plane(&PlaneSystem::general(1, &[])).unwrap();
    let maps = rng.gen_range(2..=6);
    for _ in 0..maps {
        let existing = m.n_points();
        let mut pick = Vec::new();
        while pick.len() < 3 {
            let fresh = existing == 0 || rng.gen_bool(0.6);
            let i = if fresh {
                match rng.gen_range(0..3) {
                    0 if existing > 0 => {
                        let parent = rng.gen_range(0..m.n_points());
                        m.add_infinitely_near(parent, &[0])
                    }
                    _ => m.add_general_point(&[0]),
                }
            } else {
                rng.gen_range(0..existing)
            };
            if !pick.contains(&i) {
                pick.push(i);
            }
        }
        if m.quadratic(pick[0], pick[1], pick[2]).is_err() {
            continue;
        }
        if m.degree() > max_degree {
            return None;
        }
    }
    let net = m.to_plane(0, true).ok()?;
    (net.degree >= 2).then_some(net)
}

/// `L(d; d-1, 1^(2d-2))` at general points.
pub fn jonquieres(d: i64) -> PlaneSystem {
    let mut m = vec![d - 1];
    m.extend(std::iter::repeat_n(1, (2 * d - 2) as usize));
    PlaneSystem::general(d, &m)
}

/// Order-free comparison key: degree plus sorted (id, mult, predecessor,
/// proximate) rows, zero multiplicities dropped.
pub fn shape(s: &PlaneSystem) -> (i64, Vec<(String, i64, Option<String>, Vec<String>)>) {
    let s = s.drop_zero();
    let mut rows: Vec<_> = s
        .cluster
        .nodes
        .iter()
        .zip(&s.mult)
        .map(|(n, &m)| {
            let mut p = n.proximate_to.clone();
            p.sort();
            (n.id.clone(), m, n.predecessor.clone(), p)
        })
        .collect();
    rows.sort();
    (s.degree, rows)
}
