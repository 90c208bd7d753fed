//! Picard lattices of blow-ups of the plane and of Hirzebruch surfaces, with
//! plain integer vectors and the diagonal intersection form. Used as a
//! brute-force check on everything the combinatorial code does.

use serde::{Deserialize, Serialize};

use crate::cluster::Cluster;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Surface {
    P2,
    Fn { n: i64 },
}

impl Surface {
    /// Number of basis classes pulled back from the base surface.
    pub fn rank(&self) -> usize {
        match self {
            Surface::P2 => 1,
            Surface::Fn { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass(pub Vec<i64>);

impl DivisorClass {
    pub fn zero(len: usize) -> Self {
        DivisorClass(vec![0; len])
    }

    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        DivisorClass(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, -1)
    }

    /// `self + c * o`
    pub fn combine(&self, o: &Self, c: i64) -> Result<Self> {
        if self.len() != o.len() {
            return Err(Error::DimensionMismatch(self.len(), o.len()));
        }
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| b.checked_mul(c).and_then(|x| a.checked_add(x)).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(DivisorClass)
    }

    pub fn scale(&self, c: i64) -> Result<Self> {
        self.0
            .iter()
            .map(|a| a.checked_mul(c).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(DivisorClass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupLattice {
    pub base: Surface,
    pub cluster: Cluster,
}

impl BlowupLattice {
    pub fn new(base: Surface, cluster: Cluster) -> Self {
        BlowupLattice { base, cluster }
    }

    pub fn dim(&self) -> usize {
        self.base.rank() + self.cluster.len()
    }

    /// Basis index of the exceptional class `Z_i`.
    pub fn z(&self, i: usize) -> usize {
        self.base.rank() + i
    }

    fn self_product(&self, i: usize) -> i64 {
        match (self.base, i) {
            (Surface::P2, 0) => 1,
            (Surface::Fn { n }, 0) => -n,
            (Surface::Fn { .. }, 1) => 0,
            _ => -1,
        }
    }

    /// `dH - sum m_i Z_i` on a plane blow-up.
    pub fn plane_class(&self, d: i64, mult: &[i64]) -> Result<DivisorClass> {
        if self.base != Surface::P2 {
            return Err(Error::WrongSurface("plane class on a Hirzebruch lattice".into()));
        }
        if mult.len() != self.cluster.len() {
            return Err(Error::DimensionMismatch(mult.len(), self.cluster.len()));
        }
        let mut v = vec![d];
        v.extend(mult.iter().map(|m| -m));
        Ok(DivisorClass(v))
    }

    /// `kE + hF - sum m_i Z_i` on a Hirzebruch blow-up.
    pub fn hirzebruch_class(&self, k: i64, h: i64, mult: &[i64]) -> Result<DivisorClass> {
        if self.base == Surface::P2 {
            return Err(Error::WrongSurface("Hirzebruch class on a plane lattice".into()));
        }
        if mult.len() != self.cluster.len() {
            return Err(Error::DimensionMismatch(mult.len(), self.cluster.len()));
        }
        let mut v = vec![k, h];
        v.extend(mult.iter().map(|m| -m));
        Ok(DivisorClass(v))
    }
}

pub fn intersect(l: &BlowupLattice, a: &DivisorClass, b: &DivisorClass) -> Result<i64> {
    let dim = l.dim();
    if a.len() != dim {
        return Err(Error::DimensionMismatch(a.len(), dim));
    }
    if b.len() != dim {
        return Err(Error::DimensionMismatch(b.len(), dim));
    }
    let mut acc: i64 = 0;
    for i in 0..dim {
        let t = a.0[i]
            .checked_mul(b.0[i])
            .and_then(|x| x.checked_mul(l.self_product(i)))
            .ok_or(Error::Overflow)?;
        acc = acc.checked_add(t).ok_or(Error::Overflow)?;
    }
    if let Surface::Fn { .. } = l.base {
        // E.F = 1
        let t = a.0[0]
            .checked_mul(b.0[1])
            .and_then(|x| a.0[1].checked_mul(b.0[0]).and_then(|y| x.checked_add(y)))
            .ok_or(Error::Overflow)?;
        acc = acc.checked_add(t).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

pub fn canonical_class(l: &BlowupLattice) -> DivisorClass {
    let mut v = match l.base {
        Surface::P2 => vec![-3],
        Surface::Fn { n } => vec![-2, -2 - n],
    };
    v.extend(std::iter::repeat_n(1, l.cluster.len()));
    DivisorClass(v)
}

/// Arithmetic genus by adjunction.
pub fn genus(l: &BlowupLattice, d: &DivisorClass) -> Result<i64> {
    let k = canonical_class(l);
    let dd = intersect(l, d, d)?;
    let dk = intersect(l, d, &k)?;
    Ok(1 + dd.checked_add(dk).ok_or(Error::Overflow)? / 2)
}

pub fn strict_exceptional_classes(l: &BlowupLattice) -> Result<Vec<DivisorClass>> {
    let prox = l.cluster.proximity()?;
    let dim = l.dim();
    let mut out: Vec<DivisorClass> = (0..l.cluster.len())
        .map(|i| DivisorClass::basis(dim, l.z(i)))
        .collect();
    for (j, ps) in prox.iter().enumerate() {
        for &i in ps {
            out[i].0[l.z(j)] -= 1;
        }
    }
    Ok(out)
}

/// Repeatedly subtracts a strict exceptional class meeting `d` negatively.
/// Scans from the last point backwards, the opposite order to the cluster
/// code, so agreement is a real check of order independence.
pub fn effective_multiplicities_oracle(l: &BlowupLattice, d: &DivisorClass) -> Result<DivisorClass> {
    let es = strict_exceptional_classes(l)?;
    let mut cur = d.clone();
    let size: i64 = d.0.iter().map(|x| x.abs()).sum();
    let r = es.len() as i64;
    let bound = (size + r + 1) * (r + 1) * (r + 1) + 1000;
    let mut steps = 0;
    loop {
        let mut hit = None;
        for (i, e) in es.iter().enumerate().rev() {
            if intersect(l, &cur, e)? < 0 {
                hit = Some(i);
                break;
            }
        }
        let Some(i) = hit else { return Ok(cur) };
        cur = cur.sub(&es[i])?;
        steps += 1;
        if steps > bound {
            return Err(Error::IterationBound("lattice unloading".into()));
        }
    }
}

/// Multiplicities read back from a class: `m_i = D . Z_i`.
pub fn multiplicities(l: &BlowupLattice, d: &DivisorClass) -> Result<Vec<i64>> {
    (0..l.cluster.len())
        .map(|i| intersect(l, d, &DivisorClass::basis(l.dim(), l.z(i))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElmImage {
    pub n: i64,
    pub k: i64,
    pub h: i64,
    /// Multiplicity at the point created from the contracted fiber.
    pub new_mult: i64,
    /// Multiplicities of the other points, in cluster order, with the
    /// elementary point itself removed.
    pub others: Vec<i64>,
}

/// Pushes the class `d` through an elementary transformation centered at the
/// proper point `p` of an `F_n` blow-up. The target basis is
/// `E' = E - Z_p` (p on E) or `E' = E + F - Z_p` (p off E), `F' = F`, and the
/// new point has total transform `F - Z_p`. Coefficients are read off with
/// the intersection form of the old lattice.
pub fn elm_pushforward(l: &BlowupLattice, d: &DivisorClass, p: usize, on_e: bool) -> Result<ElmImage> {
    let Surface::Fn { n } = l.base else {
        return Err(Error::WrongSurface("elementary transformation needs F_n".into()));
    };
    let dim = l.dim();
    let e = DivisorClass::basis(dim, 0);
    let f = DivisorClass::basis(dim, 1);
    let zp = DivisorClass::basis(dim, l.z(p));
    let (e2, n2) = if on_e {
        (e.sub(&zp)?, n + 1)
    } else {
        (e.add(&f)?.sub(&zp)?, n - 1)
    };
    let zq = f.sub(&zp)?;
    let k = intersect(l, d, &f)?;
    let h = intersect(l, d, &e2)? + n2 * k;
    let new_mult = intersect(l, d, &zq)?;
    let others = (0..l.cluster.len())
        .filter(|&i| i != p)
        .map(|i| intersect(l, d, &DivisorClass::basis(dim, l.z(i))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ElmImage { n: n2, k, h, new_mult, others })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::PointNode;

    fn plane(c: Vec<PointNode>) -> BlowupLattice {
        BlowupLattice::new(Surface::P2, Cluster::new(c))
    }

    fn chain() -> BlowupLattice {
        plane(vec![
            PointNode::proper("p0"),
            PointNode::near("p1", "p0"),
            PointNode::satellite("p2", "p1", "p0"),
        ])
    }

    #[test]
    fn intersections() {
        let l = plane(vec![]);
        assert_eq!(intersect(&l, &DivisorClass(vec![1]), &DivisorClass(vec![1])).unwrap(), 1);
        let l = chain();
        let d = DivisorClass(vec![3, -1, -1, -1]);
        let e0 = DivisorClass(vec![0, 1, -1, -1]);
        // 3*0 - (1*1)(-1)... expanded: -(-1)(1) - (-1)(-1) - (-1)(-1) = 1 - 1 - 1
        assert_eq!(intersect(&l, &d, &e0).unwrap(), -1);
        let f3 = BlowupLattice::new(Surface::Fn { n: 3 }, Cluster::default());
        assert_eq!(intersect(&f3, &DivisorClass(vec![6, 18]), &DivisorClass(vec![1, 0])).unwrap(), 0);
        assert!(intersect(&f3, &DivisorClass(vec![1]), &DivisorClass(vec![1, 0])).is_err());
    }

    #[test]
    fn canonical_classes() {
        assert_eq!(canonical_class(&plane(vec![])), DivisorClass(vec![-3]));
        assert_eq!(canonical_class(&plane(vec![PointNode::proper("a")])), DivisorClass(vec![-3, 1]));
        let f2 = BlowupLattice::new(Surface::Fn { n: 2 }, Cluster::default());
        assert_eq!(canonical_class(&f2), DivisorClass(vec![-2, -4]));
    }

    #[test]
    fn genera() {
        assert_eq!(genus(&plane(vec![]), &DivisorClass(vec![3])).unwrap(), 1);
        let pts: Vec<_> = (0..8).map(|i| PointNode::proper(format!("q{i}"))).collect();
        let l = plane(pts);
        let d = l.plane_class(6, &[2; 8]).unwrap();
        assert_eq!(genus(&l, &d).unwrap(), 2);
    }

    #[test]
    fn strict_classes() {
        let l = plane(vec![PointNode::proper("a")]);
        assert_eq!(strict_exceptional_classes(&l).unwrap(), vec![DivisorClass(vec![0, 1])]);
        let l = plane(vec![PointNode::proper("a"), PointNode::near("b", "a")]);
        assert_eq!(
            strict_exceptional_classes(&l).unwrap(),
            vec![DivisorClass(vec![0, 1, -1]), DivisorClass(vec![0, 0, 1])]
        );
        let es = strict_exceptional_classes(&chain()).unwrap();
        assert_eq!(es[0], DivisorClass(vec![0, 1, -1, -1]));
        assert_eq!(es[1], DivisorClass(vec![0, 0, 1, -1]));
        assert_eq!(es[2], DivisorClass(vec![0, 0, 0, 1]));
        let l = chain();
        let k = canonical_class(&l);
        // total transforms are (-1)-cycles, strict transforms are smooth rational
        for i in 0..3 {
            let z = DivisorClass::basis(l.dim(), l.z(i));
            assert_eq!(intersect(&l, &z, &z).unwrap(), -1);
            assert_eq!(intersect(&l, &z, &k).unwrap(), -1);
        }
        for e in es {
            assert_eq!(intersect(&l, &e, &e).unwrap() + intersect(&l, &e, &k).unwrap(), -2);
        }
    }

    #[test]
    fn oracle_examples() {
        let l = chain();
        assert_eq!(
            effective_multiplicities_oracle(&l, &DivisorClass(vec![3, -1, -1, -1])).unwrap(),
            DivisorClass(vec![3, -2, 0, 0])
        );
        let pure = DivisorClass(vec![3, -2, -1, -1]);
        assert_eq!(effective_multiplicities_oracle(&l, &pure).unwrap(), pure);
        let l2 = plane(vec![PointNode::proper("a"), PointNode::near("b", "a")]);
        let d = DivisorClass(vec![1, -1, -1]);
        assert_eq!(effective_multiplicities_oracle(&l2, &d).unwrap(), d);
    }

    #[test]
    fn elm_on_general_point() {
        // L_3(1,4) at a general point of F_3 with mu = 0
        let l = BlowupLattice::new(Surface::Fn { n: 3 }, Cluster::new(vec![PointNode::proper("g")]));
        let d = l.hirzebruch_class(1, 4, &[0]).unwrap();
        let img = elm_pushforward(&l, &d, 0, false).unwrap();
        assert_eq!((img.n, img.k, img.h, img.new_mult), (2, 1, 4, 1));
    }
}
