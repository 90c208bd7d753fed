//! Sharp, flat and natural models on Hirzebruch surfaces.

use super::{Kind, SharpStatus};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::systems::HirzebruchSystem;
use crate::transforms::checked_elm;

fn fn_index(m: &Model) -> Result<i64> {
    m.hirzebruch_n().ok_or_else(|| Error::WrongSurface("expected a Hirzebruch model".into()))
}

pub(crate) fn max_mult(m: &Model) -> i64 {
    m.mults().into_iter().max().unwrap_or(0).max(0)
}

/// Heaviest proper point satisfying `keep`, earliest on ties.
pub(crate) fn heaviest(m: &Model, keep: impl Fn(usize, i64) -> bool) -> Option<usize> {
    let mults = m.mults();
    let prox = m.prox();
    let mut best: Option<usize> = None;
    for i in 0..mults.len() {
        if !prox[i].is_empty() || !keep(i, mults[i]) {
            continue;
        }
        if best.is_none_or(|b| mults[i] > mults[b]) {
            best = Some(i);
        }
    }
    best
}

pub(crate) fn sharp_ok(n: i64, k: i64, h: i64, m1: i64, strict: bool) -> bool {
    let ge = |a: i64, b: i64| if strict { a > b } else { a >= b };
    match n {
        0 => ge(h, 2 * m1) && ge(k, 2 * m1),
        1 => ge(k, 2 * m1) && ge(h - k, m1),
        _ => ge(k, 2 * m1),
    }
}

pub(crate) fn is_sharp(m: &Model, strict: bool) -> bool {
    let Some(n) = m.hirzebruch_n() else { return false };
    let (k, h) = m.kh();
    sharp_ok(n, k, h, max_mult(m), strict)
}

pub(crate) fn is_natural(m: &Model) -> bool {
    let Some(n) = m.hirzebruch_n() else { return false };
    let (k, _) = m.kh();
    if k < 2 {
        return false;
    }
    let mults = m.mults();
    if mults.iter().any(|&mu| mu >= k - 1) {
        return false;
    }
    n == 0 || (0..mults.len()).all(|i| mults[i] < 2 || !m.on_e(i))
}

fn check_section(m: &Model) -> Result<()> {
    let n = fn_index(m)?;
    let (k, h) = m.kh();
    if h < k * n {
        return Err(Error::SectionSplits(format!("h = {h} < kn = {}", k * n)));
    }
    Ok(())
}

fn bound(m: &Model) -> usize {
    let (k, h) = m.kh();
    8 * (m.n_points() + (k + h).max(0) as usize + fn_index(m).unwrap_or(0).max(0) as usize) + 16
}

pub(crate) fn sharpen(m: &mut Model) -> Result<()> {
    for _ in 0..bound(m) {
        check_section(m)?;
        let n = fn_index(m)?;
        let (k, h) = m.kh();
        let m1 = max_mult(m);
        if sharp_ok(n, k, h, m1, false) {
            return Ok(());
        }
        // on F_0 work with the ruling of smaller degree, so k never grows
        if n == 0 && h < k {
            m.swap_rulings()?;
            continue;
        }
        if let Some(p) = heaviest(m, |_, mu| 2 * mu > k) {
            checked_elm(m, p)?;
            continue;
        }
        if n == 1 && h - k < m1 {
            if let Some(p) = heaviest(m, |_, mu| mu == m1) {
                checked_elm(m, p)?;
                continue;
            }
        }
        if n == 0 && h < 2 * m1 {
            m.swap_rulings()?;
            continue;
        }
        return Err(Error::NotRealizable("no elementary transformation sharpens the model".into()));
    }
    Err(Error::IterationBound("sharp model".into()))
}

/// From a sharp model, lowers `n` by elementary transformations at points of
/// multiplicity `k/2` off `E` while sharpness survives.
pub(crate) fn flatten(m: &mut Model, kind: Kind) -> Result<()> {
    for _ in 0..bound(m) {
        let n = fn_index(m)?;
        let (k, _) = m.kh();
        if n == 0 || k % 2 != 0 {
            return Ok(());
        }
        let half = k / 2;
        let prox = m.prox();
        let mults = m.mults();
        let mut cands: Vec<Option<usize>> = (0..mults.len())
            .filter(|&i| prox[i].is_empty() && mults[i] == half && !m.on_e(i))
            .map(Some)
            .collect();
        if kind.general_mult() == half && half > 0 {
            cands.push(None);
        }
        let mut moved = false;
        for c in cands {
            let mut t = m.clone();
            let p = match c {
                Some(p) => p,
                None => t.add_general_point(&[half]),
            };
            checked_elm(&mut t, p)?;
            if is_sharp(&t, false) && check_section(&t).is_ok() {
                *m = t;
                moved = true;
                break;
            }
        }
        if !moved {
            return Ok(());
        }
    }
    Err(Error::IterationBound("flat model".into()))
}

/// Elementary transformations at the singular points on `E`.
pub(crate) fn naturalize(m: &mut Model) -> Result<()> {
    for _ in 0..bound(m) {
        if fn_index(m)? == 0 {
            return Ok(());
        }
        let on: Vec<bool> = (0..m.n_points()).map(|i| m.on_e(i)).collect();
        let Some(p) = heaviest(m, |i, mu| mu >= 2 && on[i]) else { return Ok(()) };
        checked_elm(m, p)?;
    }
    Err(Error::IterationBound("natural model".into()))
}

fn start(l: &HirzebruchSystem) -> Result<Model> {
    let m = Model::from_hirzebruch(&l.drop_zero())?;
    check_section(&m)?;
    Ok(m)
}

pub(crate) fn status_of(m: &Model, kind: Kind) -> Result<SharpStatus> {
    let mut f = m.clone();
    sharpen(&mut f)?;
    flatten(&mut f, kind)?;
    Ok(SharpStatus {
        sharp: is_sharp(m, false),
        sharpsharp: is_sharp(m, true),
        flat_index: fn_index(&f)?,
        natural: is_natural(m),
    })
}

pub(crate) fn flat_of(l: &HirzebruchSystem, kind: Kind) -> Result<Model> {
    let mut m = start(l)?;
    sharpen(&mut m)?;
    flatten(&mut m, kind)?;
    Ok(m)
}

pub(crate) fn natural_of(l: &HirzebruchSystem, kind: Kind) -> Result<Model> {
    let mut m = flat_of(l, kind)?;
    naturalize(&mut m)?;
    Ok(m)
}

pub fn sharp_status(l: &HirzebruchSystem, kind: Kind) -> Result<SharpStatus> {
    status_of(&start(l)?, kind)
}

pub fn sharp_model(l: &HirzebruchSystem, kind: Kind) -> Result<(HirzebruchSystem, SharpStatus)> {
    let mut m = start(l)?;
    sharpen(&mut m)?;
    Ok((m.to_hirzebruch(0, true)?, status_of(&m, kind)?))
}

pub fn flat_model(l: &HirzebruchSystem, kind: Kind) -> Result<(HirzebruchSystem, SharpStatus)> {
    let m = flat_of(l, kind)?;
    Ok((m.to_hirzebruch(0, true)?, status_of(&m, kind)?))
}

pub fn natural_model(l: &HirzebruchSystem, kind: Kind) -> Result<(HirzebruchSystem, SharpStatus)> {
    let m = natural_of(l, kind)?;
    Ok((m.to_hirzebruch(0, true)?, status_of(&m, kind)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Cluster, Flags, PointNode};

    fn on_fiber(id: &str, f: &str) -> PointNode {
        PointNode::proper(id).with_flags(Flags { fiber: Some(f.into()), ..Flags::default() })
    }

    pub(crate) fn tacnode_f3() -> HirzebruchSystem {
        let c = Cluster::new(vec![on_fiber("p", "f1"), on_fiber("q", "f1"), PointNode::near("r", "q")]);
        HirzebruchSystem { n: 3, k: 6, h: 18, cluster: c, mult: vec![3, 2, 2] }
    }

    #[test]
    fn tacnode_status() {
        let st = sharp_status(&tacnode_f3(), Kind::Curve).unwrap();
        assert!(st.sharp);
        assert!(st.natural);
        // the triple point is off E with multiplicity k/2
        assert_eq!(st.flat_index, 2);
        let (nat, _) = natural_model(&tacnode_f3(), Kind::Curve).unwrap();
        assert_eq!((nat.n, nat.k, nat.h), (3, 6, 18));
    }

    #[test]
    fn flat_drops_to_f1() {
        let l = HirzebruchSystem::general(2, 4, 10, &[2]);
        let (f, st) = flat_model(&l, Kind::System).unwrap();
        assert_eq!(f.n, 1);
        assert_eq!(st.flat_index, 1);
        assert_eq!(f.h, 8);
    }

    #[test]
    fn natural_moves_off_e() {
        let c = Cluster::new(vec![PointNode::proper("p").with_flags(Flags { on_e: true, ..Flags::default() })]);
        let l = HirzebruchSystem { n: 2, k: 6, h: 14, cluster: c, mult: vec![2] };
        let (nat, st) = natural_model(&l, Kind::System).unwrap();
        assert_eq!((nat.n, nat.h), (3, 18));
        assert!(st.natural);
        assert_eq!(nat.mult, vec![4]);
    }

    #[test]
    fn sharpen_heavy_point() {
        // a point of multiplicity 3 > k/2 off E on F_2
        let l = HirzebruchSystem::general(2, 4, 9, &[3]);
        let (s, st) = sharp_model(&l, Kind::System).unwrap();
        assert!(st.sharp);
        assert_eq!((s.n, s.k, s.h), (1, 4, 6));
        assert_eq!(s.mult, vec![1]);
    }
}
