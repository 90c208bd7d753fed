//! Factorization of a homaloidal net into quadratic maps by strict descent
//! on simplicity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::systems::PlaneSystem;
use crate::transforms::{apply_quadratic, is_homaloidal, simplicity, simplicity_points, Simplicity};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub centers: [String; 3],
    pub aux_general: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    /// Descent steps, ending at a quadratic net.
    pub steps: Vec<Step>,
    /// Simplicity before each step and of the final net.
    pub certificate: Vec<Simplicity>,
    /// Base points of the final quadratic net, if the input was not linear.
    pub final_centers: Option<[String; 3]>,
}

impl Factorization {
    /// Every quadratic map of the decomposition, final one included.
    pub fn all_quadratics(&self) -> Vec<[String; 3]> {
        let mut v: Vec<[String; 3]> = self.steps.iter().map(|s| s.centers.clone()).collect();
        if let Some(c) = &self.final_centers {
            v.push(c.clone());
        }
        v
    }

    pub fn quadratic_count(&self) -> usize {
        self.all_quadratics().len()
    }
}

fn ids3(m: &Model, a: usize, b: usize, c: usize) -> [String; 3] {
    [m.points[a].id.clone(), m.points[b].id.clone(), m.points[c].id.clone()]
}

/// One descent step. Branch (a) uses the maximal point and two heavy points
/// when they admit a quadratic map; otherwise branch (b) uses the maximal
/// point, a heavy point infinitely near to it that carries a satellite, and
/// a fresh general point.
pub fn descent_step(net: &PlaneSystem) -> Result<(Step, PlaneSystem)> {
    if !is_homaloidal(net) {
        return Err(Error::NotHomaloidal("descent input".into()));
    }
    if net.degree <= 2 {
        return Err(Error::BaseCase);
    }
    let (p0, _k, rest) = simplicity_points(net)?;
    if rest.len() < 2 {
        return Err(Error::Internal("heavy point count below two".into()));
    }
    let mut m = Model::from_plane(net)?;
    let mut best: Option<(i64, usize, usize)> = None;
    for a in 0..rest.len() {
        for b in a + 1..rest.len() {
            let (i, j) = (rest[a], rest[b]);
            if m.quadratic_pattern(p0, i, j).is_err() {
                continue;
            }
            let w = net.mult[i] + net.mult[j];
            if best.is_none_or(|(bw, _, _)| w > bw) {
                best = Some((w, i, j));
            }
        }
    }
    if let Some((_, i, j)) = best {
        let centers = ids3(&m, p0, i, j);
        m.quadratic(p0, i, j)?;
        return Ok((Step { centers, aux_general: false }, m.to_plane(0, false)?));
    }
    let prox = m.prox();
    let pred = m.predecessors();
    for &i in &rest {
        if pred[i] != Some(p0) {
            continue;
        }
        let sat = rest
            .iter()
            .any(|&j| pred[j] == Some(i) && prox[j].len() == 2 && prox[j].contains(&p0));
        if sat {
            let q = m.add_general_point(&[0]);
            let centers = ids3(&m, p0, i, q);
            m.quadratic(p0, i, q)?;
            return Ok((Step { centers, aux_general: true }, m.to_plane(0, false)?));
        }
    }
    Err(Error::NotRealizable("no quadratic lowers the simplicity".into()))
}

pub fn nc_factor(net: &PlaneSystem) -> Result<Factorization> {
    if !is_homaloidal(net) {
        return Err(Error::NotHomaloidal("factorization input".into()));
    }
    if net.degree == 1 {
        return Ok(Factorization { steps: vec![], certificate: vec![], final_centers: None });
    }
    let first = simplicity(net)?;
    let bound = (first.k * (first.h + 1) * (first.s + 1) + first.h) as usize;
    let mut cur = net.clone();
    let mut steps = Vec::new();
    let mut cert = vec![first];
    while cur.degree > 2 {
        let (step, next) = descent_step(&cur)?;
        let s = simplicity(&next)?;
        if s >= *cert.last().unwrap() {
            return Err(Error::Internal(format!("simplicity did not drop: {:?} -> {:?}", cert.last(), s)));
        }
        if !is_homaloidal(&next) {
            return Err(Error::Internal("descent left the homaloidal locus".into()));
        }
        steps.push(step);
        cert.push(s);
        cur = next;
        if steps.len() > bound.max(1) {
            return Err(Error::Internal("descent exceeded its termination bound".into()));
        }
    }
    let base: Vec<String> = cur
        .cluster
        .nodes
        .iter()
        .zip(&cur.mult)
        .filter(|(_, &a)| a == 1)
        .map(|(n, _)| n.id.clone())
        .collect();
    if base.len() != 3 {
        return Err(Error::Internal("final net is not quadratic".into()));
    }
    let final_centers = Some([base[0].clone(), base[1].clone(), base[2].clone()]);
    Ok(Factorization { steps, certificate: cert, final_centers })
}

/// Replays every quadratic of a factorization through `apply_quadratic`.
pub fn replay(l: &PlaneSystem, f: &Factorization) -> Result<PlaneSystem> {
    let mut cur = l.clone();
    for c in f.all_quadratics() {
        cur = apply_quadratic(&cur, [&c[0], &c[1], &c[2]])?;
    }
    Ok(cur)
}

/// Replays only the descent steps, leaving the final quadratic out.
pub fn replay_steps(l: &PlaneSystem, f: &Factorization) -> Result<PlaneSystem> {
    let mut cur = l.clone();
    for s in &f.steps {
        let c = &s.centers;
        cur = apply_quadratic(&cur, [&c[0], &c[1], &c[2]])?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Cluster, PointNode};

    fn jonq(d: i64) -> PlaneSystem {
        let mut m = vec![d - 1];
        m.extend(std::iter::repeat_n(1, (2 * d - 2) as usize));
        PlaneSystem::general(d, &m)
    }

    #[test]
    fn base_case() {
        let q = PlaneSystem::general(2, &[1, 1, 1]);
        assert_eq!(descent_step(&q), Err(Error::BaseCase));
        let f = nc_factor(&q).unwrap();
        assert!(f.steps.is_empty());
        assert_eq!(f.certificate, vec![Simplicity::QUADRATIC]);
    }

    #[test]
    fn cubic_jonquieres() {
        let (step, next) = descent_step(&jonq(3)).unwrap();
        assert!(!step.aux_general);
        assert_eq!(next.degree, 2);
        let f = nc_factor(&jonq(3)).unwrap();
        assert_eq!(f.steps.len(), 1);
        assert_eq!(f.quadratic_count(), 2);
    }

    #[test]
    fn satellite_branch() {
        let c = Cluster::new(vec![
            PointNode::proper("p0"),
            PointNode::near("p1", "p0"),
            PointNode::satellite("p2", "p1", "p0"),
            PointNode::proper("p3"),
            PointNode::proper("p4"),
        ]);
        let net = PlaneSystem { degree: 3, cluster: c, mult: vec![2, 1, 1, 1, 1], lines: vec![] };
        let f = nc_factor(&net).unwrap();
        for w in f.certificate.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert_eq!(*f.certificate.last().unwrap(), Simplicity::QUADRATIC);
    }

    #[test]
    fn forced_satellite_branch() {
        // every heavy point is infinitely near p0, so only branch (b) applies
        let c = Cluster::new(vec![
            PointNode::proper("p0"),
            PointNode::near("p1", "p0"),
            PointNode::satellite("p2", "p1", "p0"),
            PointNode::near("p3", "p2"),
            PointNode::near("p4", "p3"),
        ]);
        let net = PlaneSystem { degree: 3, cluster: c, mult: vec![2, 1, 1, 1, 1], lines: vec![] };
        assert!(is_homaloidal(&net));
        let before = simplicity(&net).unwrap();
        let (step, next) = descent_step(&net).unwrap();
        assert!(step.aux_general);
        // the degree rises by k - alpha_1 = 0
        assert_eq!(next.degree, 3);
        let after = simplicity(&next).unwrap();
        assert_eq!((after.k, after.h, after.s), (before.k, before.h, before.s - 1));
        let f = nc_factor(&net).unwrap();
        assert_eq!(*f.certificate.last().unwrap(), Simplicity::QUADRATIC);
    }

    #[test]
    fn quintic_jonquieres() {
        let f = nc_factor(&jonq(5)).unwrap();
        assert!(f.steps.len() <= 8);
        for w in f.certificate.windows(2) {
            assert!(w[1] < w[0]);
        }
        let back = replay_steps(&jonq(5), &f).unwrap();
        assert_eq!(back.degree, 2);
    }
}
