//! Positive-dimensional systems of rational curves: reduction to one of five
//! plane normal forms.

use serde::{Deserialize, Serialize};

use super::reduce::noether_reduce;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::notation;
use crate::systems::{arithmetic_genus, virtual_dimension, PlaneSystem, System};
use crate::transforms::checked_elm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RationalType {
    /// Pencil of lines through a point.
    I,
    /// Lines or conics.
    Ii,
    /// `L(d; d-1)`.
    Iii,
    /// `L(d; d-1, 1)`.
    Iv,
    /// `L(d; (d-1, [1^(n-1)]))`.
    V,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalClass {
    #[serde(rename = "type")]
    pub rtype: RationalType,
    pub system: PlaneSystem,
    pub notation: String,
    pub dimension: i64,
    /// Index of the scroll for types (iii)-(v).
    pub n: Option<i64>,
}

fn self_intersection(l: &System) -> i64 {
    match l {
        System::Plane(s) => s.degree * s.degree - s.mult.iter().map(|m| m * m).sum::<i64>(),
        System::Hirzebruch(h) => -h.n * h.k * h.k + 2 * h.k * h.h - h.mult.iter().map(|m| m * m).sum::<i64>(),
    }
}

/// The scroll model `L_n(1, b)` reached by clearing simple base points.
fn scroll(mut m: Model) -> Result<Model> {
    if m.hirzebruch_n() == Some(0) {
        let (k, h) = m.kh();
        if k != 1 && h == 1 {
            m.swap_rulings()?;
        }
    }
    if m.kh().0 != 1 {
        return Err(Error::NotRealizable(format!("expected curves of the ruling class with k = 1, got k = {}", m.kh().0)));
    }
    for _ in 0..=4 * m.n_points() + 4 {
        let prox = m.prox();
        let mults = m.mults();
        let Some(p) = (0..mults.len()).find(|&i| prox[i].is_empty() && mults[i] > 0) else {
            return Ok(m);
        };
        checked_elm(&mut m, p)?;
    }
    Err(Error::IterationBound("clearing simple base points".into()))
}

fn plane_of(mut m: Model) -> Result<PlaneSystem> {
    m.contract()?;
    m.to_plane(0, true)
}

/// Type and Cremona minimal plane form of a genus-0 system of positive
/// dimension.
pub fn classify_rational_system(l: &System) -> Result<RationalClass> {
    let l = l.unloaded()?;
    let g = arithmetic_genus(&l)?;
    if g != 0 {
        return Err(Error::Precondition(format!("arithmetic genus is {g}, expected 0")));
    }
    let dim = virtual_dimension(&l);
    if dim < 1 {
        return Err(Error::Precondition(format!("dimension {dim} is not positive")));
    }
    let pack = |rtype, system: PlaneSystem, dimension, n| {
        let v = virtual_dimension(&system.clone().into());
        if v != dimension {
            return Err(Error::Internal(format!("normal form has dimension {v}, expected {dimension}")));
        }
        Ok(RationalClass { rtype, notation: notation::plane(&system), system, dimension, n })
    };
    if self_intersection(&l) == 0 {
        let mut s = PlaneSystem::general(1, &[1]);
        s.cluster.nodes[0].id = "o".into();
        return pack(RationalType::I, s, 1, None);
    }
    let model = match &l {
        System::Plane(s) => {
            let (r, _) = noether_reduce(s)?;
            let r = r.drop_zero();
            let top = r.mult.iter().copied().max().unwrap_or(0);
            if top == 0 && (r.degree == 1 || r.degree == 2) {
                let dimension = if r.degree == 1 { 2 } else { 5 };
                return pack(RationalType::Ii, PlaneSystem::general(r.degree, &[]), dimension, None);
            }
            let p = r
                .mult
                .iter()
                .position(|&x| x == r.degree - 1)
                .ok_or_else(|| Error::NotRealizable(format!("no point of multiplicity d - 1 on {}", notation::plane(&r))))?;
            let mut m = Model::from_plane(&r)?;
            m.unload_all()?;
            m.blow_up(p)?;
            m
        }
        System::Hirzebruch(h) => Model::from_hirzebruch(&h.drop_zero())?,
    };
    let mut m = scroll(model)?;
    let n = m.hirzebruch_n().ok_or_else(|| Error::Internal("scroll off F_n".into()))?;
    let (_, b) = m.kh();
    match n {
        1 => pack(RationalType::Iii, plane_of(m)?, 2 * b, Some(1)),
        0 => {
            let p = m.add_general_point(&[0]);
            checked_elm(&mut m, p)?;
            pack(RationalType::Iv, plane_of(m)?, 2 * (b + 1) - 1, Some(0))
        }
        _ => {
            for _ in 1..n {
                let p = m.add_general_point(&[0]);
                checked_elm(&mut m, p)?;
            }
            pack(RationalType::V, plane_of(m)?, 2 * b - n + 1, Some(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::HirzebruchSystem;

    fn plane(d: i64, m: &[i64]) -> System {
        PlaneSystem::general(d, m).into()
    }

    #[test]
    fn pencil_of_lines() {
        let r = classify_rational_system(&plane(1, &[1])).unwrap();
        assert_eq!((r.rtype, r.dimension), (RationalType::I, 1));
    }

    #[test]
    fn lines_and_conics() {
        assert_eq!(classify_rational_system(&plane(1, &[])).unwrap().dimension, 2);
        let r = classify_rational_system(&plane(4, &[2, 2, 2])).unwrap();
        assert_eq!((r.rtype, r.dimension, r.notation.as_str()), (RationalType::Ii, 5, "L(2)"));
    }

    #[test]
    fn monoids() {
        let r = classify_rational_system(&plane(5, &[4])).unwrap();
        assert_eq!((r.rtype, r.dimension), (RationalType::Iii, 10));
        let r = classify_rational_system(&plane(5, &[4, 1])).unwrap();
        assert_eq!((r.rtype, r.dimension, r.notation.as_str()), (RationalType::Iv, 9, "L(5;4,1)"));
    }

    #[test]
    fn scrolls() {
        let r = classify_rational_system(&HirzebruchSystem::general(3, 1, 5, &[]).into()).unwrap();
        assert_eq!((r.rtype, r.dimension), (RationalType::V, 8));
        assert_eq!(r.notation, "L(5;(4,[1^2]))");
    }

    #[test]
    fn genus_must_vanish() {
        assert!(classify_rational_system(&plane(3, &[])).is_err());
    }
}
