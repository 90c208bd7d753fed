//! Zariski decomposition of adjoint classes over the curves the data knows
//! about: strict exceptional curves, lines through pairs of points, fibers
//! and the negative section.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Surface;
use crate::model::Model;
use crate::systems::{adjoint_chain, System};

type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeCurve {
    pub label: String,
    pub class: Vec<i64>,
    /// Coefficient as `numerator/denominator`.
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefPart {
    pub m: i64,
    pub alpha: i64,
    /// Nef part in the basis of the adjoint's lattice, as reduced fractions.
    pub class: Vec<String>,
    pub is_zero: bool,
    pub square: String,
    pub square_sign: i8,
    pub negative: Vec<NegativeCurve>,
    /// Set when the nef part is a multiple of the pencil of lines through
    /// this point.
    pub pencil_vertex: Option<String>,
    /// Set when the nef part is a multiple of the ruling.
    pub fiber_multiple: bool,
}

fn q(x: i64) -> Q {
    Q::from_integer(x as i128)
}

fn show(x: &Q) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn dotq(m: &Model, a: &[Q], b: &[i64]) -> Q {
    let bq: Vec<Q> = b.iter().map(|&x| q(x)).collect();
    let sign = |i: usize| -> Q {
        match m.root {
            Surface::P2 => {
                if i == 0 {
                    q(1)
                } else {
                    q(-1)
                }
            }
            Surface::Fn { .. } => q(-1),
        }
    };
    match m.root {
        Surface::P2 => (0..a.len()).map(|i| sign(i) * a[i] * bq[i]).sum(),
        Surface::Fn { n } => {
            let head = q(-n) * a[0] * bq[0] + a[0] * bq[1] + a[1] * bq[0];
            head + (2..a.len()).map(|i| sign(i) * a[i] * bq[i]).sum::<Q>()
        }
    }
}

fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != q(0))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        for r in 0..n {
            if r == col || a[r][col] == q(0) {
                continue;
            }
            let f = a[r][col] / p;
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Zariski decomposition of a system's class.
pub fn nef_part(ad: &System, m_index: i64, alpha: i64) -> Result<NefPart> {
    let mut model = match ad {
        System::Plane(s) => Model::from_plane(s)?,
        System::Hirzebruch(s) => Model::from_hirzebruch(s)?,
    };
    model.unload_all()?;
    let d: Vec<Q> = model.system().iter().map(|&x| q(x)).collect();
    let cands = model.known_curves();
    let mut support: Vec<usize> = Vec::new();
    let mut coeffs: Vec<Q> = Vec::new();
    let mut p = d.clone();
    for _ in 0..=cands.len() {
        let hit = (0..cands.len())
            .filter(|c| !support.contains(c))
            .map(|c| (c, dotq(&model, &p, &cands[c].1)))
            .filter(|(_, v)| *v < q(0))
            .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((c, _)) = hit else { break };
        support.push(c);
        let gram: Vec<Vec<Q>> = support
            .iter()
            .map(|&i| {
                let ci: Vec<Q> = cands[i].1.iter().map(|&x| q(x)).collect();
                support.iter().map(|&j| dotq(&model, &ci, &cands[j].1)).collect()
            })
            .collect();
        let rhs: Vec<Q> = support.iter().map(|&i| dotq(&model, &d, &cands[i].1)).collect();
        coeffs = solve(gram, rhs).ok_or_else(|| Error::Internal("singular intersection matrix on the negative part".into()))?;
        p = d.clone();
        for (&i, x) in support.iter().zip(&coeffs) {
            for (pv, &cv) in p.iter_mut().zip(&cands[i].1) {
                *pv -= *x * q(cv);
            }
        }
    }
    let sq = {
        let pint: Vec<Q> = p.clone();
        // P.P with both sides rational
        let mut s = q(0);
        let l = pint.len();
        match model.root {
            Surface::P2 => {
                s += pint[0] * pint[0];
                for i in 1..l {
                    s -= pint[i] * pint[i];
                }
            }
            Surface::Fn { n } => {
                s += q(-n) * pint[0] * pint[0] + q(2) * pint[0] * pint[1];
                for i in 2..l {
                    s -= pint[i] * pint[i];
                }
            }
        }
        s
    };
    let is_zero = p.iter().all(|x| *x == q(0));
    let off = model.root.rank();
    let nonzero: Vec<usize> = (off..p.len()).filter(|&i| p[i] != q(0)).collect();
    let pencil_vertex = match model.root {
        Surface::P2 if p[0] > q(0) && nonzero.len() == 1 && p[nonzero[0]] == -p[0] => {
            // no move was made, so slot i of the basis is point i
            model.points.get(nonzero[0] - off).map(|pt| pt.id.clone())
        }
        _ => None,
    };
    let fiber_multiple = matches!(model.root, Surface::Fn { .. }) && p[0] == q(0) && p[1] > q(0) && nonzero.is_empty();
    let negative = support
        .iter()
        .zip(&coeffs)
        .map(|(&i, x)| NegativeCurve { label: cands[i].0.clone(), class: cands[i].1.clone(), coeff: show(x) })
        .collect();
    let sign = if sq > q(0) {
        1
    } else if sq < q(0) {
        -1
    } else {
        0
    };
    Ok(NefPart {
        m: m_index,
        alpha,
        class: p.iter().map(show).collect(),
        is_zero,
        square: show(&sq),
        square_sign: sign,
        negative,
        pencil_vertex,
        fiber_multiple,
    })
}

/// Nef part of the last nonempty adjoint `C + mK`.
pub fn nefify(l: &System) -> Result<NefPart> {
    let chain = adjoint_chain(l)?;
    if chain.m < 1 {
        return Err(Error::Precondition("no nonempty adjoint".into()));
    }
    let ad = chain.ad(chain.m as usize).ok_or(Error::EmptySystem)?;
    nef_part(ad, chain.m, chain.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Cluster, PointNode};
    use crate::systems::{HirzebruchSystem, PlaneSystem};

    #[test]
    fn cubic_is_trivial() {
        let n = nefify(&PlaneSystem::general(3, &[]).into()).unwrap();
        assert_eq!((n.m, n.alpha), (1, 0));
        assert!(n.is_zero);
        assert!(n.negative.is_empty());
    }

    #[test]
    fn eight_nodes_is_del_pezzo() {
        let n = nefify(&PlaneSystem::general(6, &[2; 8]).into()).unwrap();
        assert_eq!((n.m, n.alpha), (2, 0));
        assert!(n.is_zero);
        assert_eq!(n.square_sign, 0);
    }

    #[test]
    fn quartic_is_big() {
        let n = nefify(&PlaneSystem::general(4, &[]).into()).unwrap();
        assert_eq!((n.m, n.alpha), (1, 2));
        assert_eq!(n.square, "1");
    }

    #[test]
    fn fixed_lines_of_a_chain() {
        // ad_3 of L(14;(8,[4^2]),3) is L(5;5,1,1) with the 1s infinitely near
        let c = Cluster::new(vec![
            PointNode::proper("o"),
            PointNode::near("a", "o"),
            PointNode::satellite("b", "a", "o"),
        ]);
        let ad = PlaneSystem { degree: 5, cluster: c, mult: vec![5, 1, 1], lines: vec![] };
        let n = nef_part(&ad.into(), 3, 3).unwrap();
        assert_eq!(n.class, vec!["3", "-3", "0", "0"]);
        assert_eq!(n.square_sign, 0);
        assert_eq!(n.pencil_vertex.as_deref(), Some("o"));
        let line = n.negative.iter().find(|c| c.label.starts_with("line")).unwrap();
        assert_eq!(line.coeff, "2");
    }

    #[test]
    fn ruled_on_f3() {
        let l = HirzebruchSystem::general(3, 6, 18, &[3, 2]);
        let n = nefify(&l.into()).unwrap();
        assert_eq!((n.m, n.alpha), (3, 3));
        assert!(n.fiber_multiple);
        assert_eq!(n.class[..2], ["0".to_string(), "3".to_string()]);
    }
}
