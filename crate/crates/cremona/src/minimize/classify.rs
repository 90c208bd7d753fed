//! Birational classification of pairs (plane or Hirzebruch data) and the
//! moves that turn each case into Cremona minimal plane models.

use super::forest::pipeline_flat;
use super::hirz::{flatten, heaviest, sharpen};
use super::nef::nefify;
use super::reduce::noether_reduce;
use super::search::brute_force_min_oracle_kind;
use super::{Case, ClassificationResult, Kind, MinimalModel, Minimality, TypeTag, UniquenessCaveat};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::notation;
use crate::systems::{fixed_curves, is_empty, is_line_case, is_noether_type_padded, PlaneSystem, System};
use crate::transforms::checked_elm;

enum Work {
    Plane(PlaneSystem),
    Hirz(Model),
}

struct Classified {
    res: ClassificationResult,
    work: Option<Work>,
}

fn result(case: Case, m: i64, alpha: i64, n: Option<i64>, kind: Kind) -> ClassificationResult {
    ClassificationResult {
        case,
        m,
        alpha,
        n,
        model: None,
        uniqueness_caveat: UniquenessCaveat::None,
        kind,
        diagnostics: Vec::new(),
    }
}

fn count_mult(mults: &[i64], v: i64) -> usize {
    mults.iter().filter(|&&x| x == v).count()
}

/// Moves Hirzebruch data to the plane: elementary transformations at
/// general points until `F_1`, then contraction of `E_1`.
fn to_plane_data(l: &System) -> Result<PlaneSystem> {
    match l {
        System::Plane(s) => Ok(s.clone()),
        System::Hirzebruch(h) => {
            if h.h < h.k * h.n {
                return Err(Error::SectionSplits(format!("h = {} < kn = {}", h.h, h.k * h.n)));
            }
            let mut m = Model::from_hirzebruch(&h.drop_zero())?;
            for _ in 0..(h.n + 2) {
                if m.hirzebruch_n() == Some(1) {
                    m.contract()?;
                    return m.to_plane(0, true);
                }
                let p = m.add_general_point(&[0]);
                checked_elm(&mut m, p)?;
            }
            Err(Error::IterationBound("moving to F_1".into()))
        }
    }
}

fn settle(w: &mut Model, kind: Kind) -> Result<i64> {
    sharpen(w)?;
    flatten(w, kind)?;
    w.hirzebruch_n().ok_or_else(|| Error::Internal("lost the Hirzebruch surface".into()))
}

fn dp1(s: PlaneSystem, m: i64, alpha: i64, kind: Kind, mut diagnostics: Vec<String>) -> Classified {
    let top = s.mult.iter().copied().max().unwrap_or(0);
    if s.degree != 3 * m || top > m {
        diagnostics.push(format!("del Pezzo plane model L({};..) has max multiplicity {top}, expected degree {} and max <= {m}", s.degree, 3 * m));
    }
    let mut res = result(Case::Dp1, m, alpha, None, kind);
    if count_mult(&s.mult, m) >= 3 {
        res.uniqueness_caveat = UniquenessCaveat::ThreePointsOfMultM;
    }
    res.diagnostics = diagnostics;
    res.model = Some(s.clone().into());
    Classified { res, work: Some(Work::Plane(s)) }
}

fn dp_hirz(mut w: Model, m: i64, alpha: i64, kind: Kind) -> Result<Classified> {
    let mut n = settle(&mut w, kind)?;
    if n == 0 {
        if let Some(p) = heaviest(&w, |_, mu| mu == m && m > 0) {
            checked_elm(&mut w, p)?;
            n = 1;
        }
    }
    if n == 1 {
        w.contract()?;
        return Ok(dp1(w.to_plane(0, true)?, m, alpha, kind, Vec::new()));
    }
    let mut res = result(Case::Dp2, m, alpha, Some(n), kind);
    if n != 0 && n != 2 {
        res.diagnostics.push(format!("del Pezzo model on F_{n}, expected F_0 or F_2"));
    }
    let (k, _) = w.kh();
    if k != 2 * m {
        res.diagnostics.push(format!("del Pezzo model has k = {k}, expected {}", 2 * m));
    }
    res.model = Some(w.to_hirzebruch(0, true)?.into());
    Ok(Classified { res, work: Some(Work::Hirz(w)) })
}

fn ruled_hirz(mut w: Model, m: i64, alpha: i64, kind: Kind) -> Result<Classified> {
    let n = settle(&mut w, kind)?;
    let (k, _) = w.kh();
    let mut res = result(Case::R, m, alpha, Some(n), kind);
    if k != 2 * m {
        res.diagnostics.push(format!("ruled model has k = {k}, expected {}", 2 * m));
    }
    if m > 0 && n > 2 + alpha / m {
        res.diagnostics.push(format!("flat index {n} exceeds 2 + [alpha/m] = {}", 2 + alpha / m));
    }
    if n == 0 && count_mult(&w.mults(), m) >= 2 {
        res.uniqueness_caveat = UniquenessCaveat::TwoPointsOfMultM;
    }
    res.model = Some(w.to_hirzebruch(0, true)?.into());
    Ok(Classified { res, work: Some(Work::Hirz(w)) })
}

fn b1_form(s: &PlaneSystem, m: i64, alpha: i64) -> bool {
    let top = s.mult.iter().copied().max().unwrap_or(0);
    (alpha == 2 || alpha == 5) && s.degree == 3 * m + alpha / 2 && top <= m
}

fn b1(s: PlaneSystem, m: i64, alpha: i64, kind: Kind) -> Classified {
    let mut res = result(Case::B1, m, alpha, None, kind);
    res.model = Some(s.clone().into());
    Classified { res, work: Some(Work::Plane(s)) }
}

fn big_hirz(mut w: Model, m: i64, alpha: i64, kind: Kind) -> Result<Classified> {
    let n = settle(&mut w, kind)?;
    let (k, _) = w.kh();
    if k != 2 * m + 1 && n == 1 {
        let mut t = w.clone();
        t.contract()?;
        let (s, _) = noether_reduce(&t.to_plane(0, true)?)?;
        if b1_form(&s, m, alpha) {
            return Ok(b1(s, m, alpha, kind));
        }
    }
    let mut res = result(Case::B2, m, alpha, Some(n), kind);
    if k != 2 * m + 1 {
        res.diagnostics.push(format!("big model has k = {k}, expected {}", 2 * m + 1));
    }
    if (alpha + n) % 2 == 0 {
        res.diagnostics.push(format!("alpha + n = {} is even", alpha + n));
    }
    if n >= 2 && alpha < 3 + (n - 2) * (2 * m + 1) {
        res.diagnostics.push(format!("alpha = {alpha} < 3 + (n - 2)(2m + 1) = {}", 3 + (n - 2) * (2 * m + 1)));
    }
    res.model = Some(w.to_hirzebruch(0, true)?.into());
    Ok(Classified { res, work: Some(Work::Hirz(w)) })
}

fn blown_up_at(s: &PlaneSystem, id: Option<&str>) -> Result<Model> {
    let mut w = Model::from_plane(s)?;
    w.unload_all()?;
    let p = match id {
        Some(id) => w.idx(id)?,
        None => s.max_point().ok_or(Error::EmptySystem)?,
    };
    w.blow_up(p)?;
    Ok(w)
}

fn plane_route(l: &System, kind: Kind) -> Result<Classified> {
    let (s, _) = noether_reduce(&to_plane_data(l)?)?;
    let nef = nefify(&s.clone().into())?;
    let (m, alpha) = (nef.m, nef.alpha);
    if nef.is_zero {
        if s.degree == 3 * m && s.mult.iter().all(|&x| x <= m) {
            return Ok(dp1(s, m, alpha, kind, Vec::new()));
        }
        return dp_hirz(blown_up_at(&s, None)?, m, alpha, kind);
    }
    match nef.square_sign {
        0 => {
            let mut c = ruled_hirz(blown_up_at(&s, nef.pencil_vertex.as_deref())?, m, alpha, kind)?;
            if nef.pencil_vertex.is_none() {
                c.res.diagnostics.push("nef part is not a pencil of lines; blew up the maximal point".into());
            }
            Ok(c)
        }
        1 => {
            if b1_form(&s, m, alpha) {
                return Ok(b1(s, m, alpha, kind));
            }
            big_hirz(blown_up_at(&s, None)?, m, alpha, kind)
        }
        _ => Err(Error::Internal("nef part with negative square".into())),
    }
}

fn classify_inner(l: &System, kind: Kind) -> Result<Classified> {
    let l = l.unloaded()?;
    let degenerate = match &l {
        System::Plane(s) => s.degree <= 0,
        System::Hirzebruch(h) => h.k <= 0 && h.h <= 0,
    };
    // a curve is nonempty by assumption even when its system is special
    if degenerate || (kind == Kind::System && is_empty(&l)?) {
        let mut res = result(Case::Line, 0, -1, None, kind);
        res.diagnostics.push(if degenerate { "degenerate input: degree 0".into() } else { "empty system".into() });
        return Ok(Classified { res, work: None });
    }
    let mut fixed = fixed_curves(&l)?;
    if fixed.is_empty() && matches!(l, System::Hirzebruch(_)) {
        if let Ok(p) = to_plane_data(&l) {
            fixed = fixed_curves(&p.into())?;
        }
    }
    if !fixed.is_empty() {
        return Err(Error::NotRealizable(format!("fixed components {}", fixed.join(", "))));
    }
    if is_line_case(&l)? {
        let mut res = result(Case::Line, 0, -1, None, kind);
        res.model = Some(match &l {
            System::Plane(s) => noether_reduce(s)?.0.into(),
            System::Hirzebruch(_) => l.clone(),
        });
        return Ok(Classified { res, work: None });
    }
    let System::Hirzebruch(h) = &l else {
        return plane_route(&l, kind);
    };
    // the sharp model has fewer negative curves the data cannot see
    let mut w = Model::from_hirzebruch(&h.drop_zero())?;
    let mut sharp = w.clone();
    if sharpen(&mut sharp).is_ok() {
        w = sharp;
    }
    let h = w.to_hirzebruch(0, true)?;
    let nef = nefify(&h.clone().into())?;
    if nef.square_sign < 0 {
        return plane_route(&l, kind);
    }
    let (m, alpha) = (nef.m, nef.alpha);
    if nef.is_zero {
        return dp_hirz(w, m, alpha, kind);
    }
    match nef.square_sign {
        0 => {
            if nef.fiber_multiple {
                return ruled_hirz(w, m, alpha, kind);
            }
            let along_e = nef.class.len() >= 2 && nef.class[1] == "0" && nef.class[2..].iter().all(|c| c == "0");
            if h.n == 0 && along_e {
                w.swap_rulings()?;
                return ruled_hirz(w, m, alpha, kind);
            }
            plane_route(&l, kind)
        }
        1 => big_hirz(w, m, alpha, kind),
        _ => Err(Error::Internal("nef part with negative square".into())),
    }
}

/// Birational class of the pair given by an irreducible curve in `l`.
pub fn classify(l: &System, kind: Kind) -> Result<ClassificationResult> {
    Ok(classify_inner(l, kind)?.res)
}

fn minimality(tag: TypeTag, s: &PlaneSystem, kind: Kind) -> Result<Minimality> {
    if !tag.needs_noether_type() {
        return Ok(Minimality::GoodModel);
    }
    if is_noether_type_padded(s, kind.general_mult())? {
        return Ok(Minimality::NoetherType);
    }
    if s.mult.len() <= 10 {
        let o = brute_force_min_oracle_kind(s, 2, 1, kind)?;
        if !o.partial && o.degree >= s.degree {
            return Ok(Minimality::OracleVerified);
        }
    }
    Ok(Minimality::Unverified)
}

fn model(tag: TypeTag, s: PlaneSystem, ambiguity: Vec<PlaneSystem>, kind: Kind) -> Result<MinimalModel> {
    Ok(MinimalModel {
        type_tag: tag,
        notation: notation::plane(&s),
        minimality: minimality(tag, &s, kind)?,
        ambiguity,
        good_sequence: None,
        system: s,
    })
}

/// Proper points to use for an elementary transformation, heaviest first.
fn elm_centers(w: &Model, off_e: bool) -> Vec<usize> {
    let prox = w.prox();
    let mults = w.mults();
    let mut c: Vec<usize> = (0..mults.len())
        .filter(|&i| prox[i].is_empty() && mults[i] > 0 && !(off_e && w.on_e(i)))
        .collect();
    c.sort_by(|&a, &b| mults[b].cmp(&mults[a]).then(a.cmp(&b)));
    c
}

fn elm_contract(w: &Model, p: Option<usize>, kind: Kind) -> Result<PlaneSystem> {
    let mut t = w.clone();
    let p = match p {
        Some(p) => p,
        None => t.add_general_point(&[kind.general_mult()]),
    };
    checked_elm(&mut t, p)?;
    t.contract()?;
    t.to_plane(0, true)
}

/// `elm` at the heaviest point then contraction, plus the alternative at
/// the second point when the two top multiplicities agree.
fn elm_models(w: &Model, off_e: bool, kind: Kind) -> Result<(PlaneSystem, Vec<PlaneSystem>)> {
    let c = elm_centers(w, off_e);
    let mults = w.mults();
    let first = c.first().copied().filter(|&p| mults[p] >= kind.general_mult());
    let main = elm_contract(w, first, kind)?;
    let mut alt = Vec::new();
    if c.len() >= 2 && first.is_some() && mults[c[0]] == mults[c[1]] {
        alt.push(elm_contract(w, Some(c[1]), kind)?);
    }
    Ok((main, alt))
}

/// Image under the quadratic map at the maximal point and two points of
/// multiplicity `m`, when that map keeps the degree.
fn quadratic_alternative(s: &PlaneSystem, m: i64, three_equal: bool) -> Result<Vec<PlaneSystem>> {
    let mut w = Model::from_plane(s)?;
    w.unload_all()?;
    let mults = w.mults();
    let mut pts: Vec<usize> = (0..mults.len()).filter(|&i| mults[i] == m).collect();
    if !three_equal {
        let Some(top) = s.max_point() else { return Ok(Vec::new()) };
        pts.retain(|&i| i != top);
        pts.insert(0, top);
    }
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for c in b + 1..pts.len() {
                if three_equal || a == 0 {
                    let t = [pts[a], pts[b], pts[c]];
                    if mults[t[0]] + mults[t[1]] + mults[t[2]] == w.degree() && w.quadratic_pattern(t[0], t[1], t[2]).is_ok() {
                        let mut u = w.clone();
                        u.quadratic(t[0], t[1], t[2])?;
                        return Ok(vec![u.to_plane(0, true)?]);
                    }
                }
            }
        }
    }
    Ok(Vec::new())
}

/// Cremona minimal plane models of the pair, one per good sequence when
/// there are several.
pub fn minimal_models(l: &System, kind: Kind) -> Result<Vec<MinimalModel>> {
    let Classified { res, work } = classify_inner(l, kind)?;
    let (m, alpha) = (res.m, res.alpha);
    let Some(work) = work else {
        return Err(Error::Precondition("the line case has no Cremona minimal model".into()));
    };
    let out = match (res.case, work) {
        (Case::Dp1, Work::Plane(s)) => {
            let amb = if count_mult(&s.mult, m) >= 3 { quadratic_alternative(&s, m, true)? } else { Vec::new() };
            vec![model(TypeTag::Cdp1, s, amb, kind)?]
        }
        (Case::B1, Work::Plane(s)) => vec![model(TypeTag::Cb1, s, Vec::new(), kind)?],
        (case, Work::Hirz(w)) => {
            let n = w.hirzebruch_n().ok_or_else(|| Error::Internal("lost the Hirzebruch surface".into()))?;
            match (case, n) {
                (Case::Dp2, 0) | (Case::R, 0) => {
                    let tag = if case == Case::Dp2 { TypeTag::Cdp2 } else { TypeTag::Cr0 };
                    let (s, amb) = elm_models(&w, false, kind)?;
                    vec![model(tag, s, amb, kind)?]
                }
                (Case::Dp2, _) => {
                    let (s, amb) = elm_models(&w, true, kind)?;
                    vec![model(TypeTag::Cdp3, s, amb, kind)?]
                }
                (Case::R, 1) | (Case::B2, 1) => {
                    let mut t = w.clone();
                    t.contract()?;
                    let s = t.to_plane(0, true)?;
                    if case == Case::R {
                        let two = s.mult.iter().filter(|&&x| x == m).count() >= 2 && alpha > 0;
                        let amb = if two { quadratic_alternative(&s, m, false)? } else { Vec::new() };
                        vec![model(TypeTag::Cr1, s, amb, kind)?]
                    } else {
                        vec![model(TypeTag::Cb2, s, Vec::new(), kind)?]
                    }
                }
                (Case::B2, 0) => {
                    let (s, _) = elm_models(&w, false, kind)?;
                    vec![model(TypeTag::Cb3, s, Vec::new(), kind)?]
                }
                (Case::R, _) | (Case::B2, _) => pipeline_flat(&w, kind)?.2,
                _ => return Err(Error::Internal(format!("unexpected case {case:?} on F_{n}"))),
            }
        }
        (case, _) => return Err(Error::Internal(format!("unexpected working model for {case:?}"))),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Cluster, Flags, PointNode};
    use crate::systems::{arithmetic_genus, HirzebruchSystem};

    fn plane(d: i64, m: &[i64]) -> System {
        PlaneSystem::general(d, m).into()
    }

    #[test]
    fn cubic_is_dp1() {
        let r = classify(&plane(3, &[]), Kind::Curve).unwrap();
        assert_eq!((r.case, r.m, r.alpha), (Case::Dp1, 1, 0));
    }

    #[test]
    fn line_cases() {
        assert_eq!(classify(&plane(3, &[2]), Kind::Curve).unwrap().case, Case::Line);
        assert_eq!(classify(&plane(2, &[1]), Kind::Curve).unwrap().case, Case::Line);
        assert_eq!(classify(&plane(0, &[]), Kind::Curve).unwrap().case, Case::Line);
    }

    #[test]
    fn eight_nodes() {
        let r = classify(&plane(6, &[2; 8]), Kind::Curve).unwrap();
        assert_eq!((r.case, r.m, r.alpha), (Case::Dp1, 2, 0));
        let mm = minimal_models(&plane(6, &[2; 8]), Kind::Curve).unwrap();
        assert_eq!(mm.len(), 1);
        assert_eq!(mm[0].type_tag, TypeTag::Cdp1);
        assert_eq!(mm[0].notation, "L(6;2^8)");
        assert_eq!(mm[0].minimality, Minimality::NoetherType);
    }

    #[test]
    fn quartic_is_b1() {
        let r = classify(&plane(4, &[]), Kind::Curve).unwrap();
        assert_eq!((r.case, r.m, r.alpha), (Case::B1, 1, 2));
    }

    #[test]
    fn genus_two_family() {
        for (d, ms, m, alpha, case, tag) in [
            (6, vec![2; 8], 2, 0, Case::Dp1, TypeTag::Cdp1),
            (7, [vec![3], vec![2; 10]].concat(), 2, 1, Case::R, TypeTag::Cr0),
            (9, [vec![3; 8], vec![2; 2]].concat(), 3, 0, Case::Dp1, TypeTag::Cdp1),
            (13, [vec![5], vec![4; 9]].concat(), 4, 1, Case::R, TypeTag::Cr0),
        ] {
            let s = plane(d, &ms);
            assert_eq!(arithmetic_genus(&s).unwrap(), 2);
            let r = classify(&s, Kind::Curve).unwrap();
            assert_eq!((r.case, r.m, r.alpha), (case, m, alpha), "L({d};{ms:?})");
            let mm = minimal_models(&s, Kind::Curve).unwrap();
            assert_eq!(mm[0].type_tag, tag);
            assert_eq!(mm[0].system.sorted_mults(), PlaneSystem::general(d, &ms).sorted_mults());
            assert_eq!(mm[0].system.degree, d);
        }
    }

    #[test]
    fn tacnode_gives_two_models() {
        let f = |id: &str| PointNode::proper(id).with_flags(Flags { fiber: Some("f1".into()), ..Flags::default() });
        let c = Cluster::new(vec![f("p"), f("q"), PointNode::near("r", "q")]);
        let l = HirzebruchSystem { n: 3, k: 6, h: 18, cluster: c, mult: vec![3, 2, 2] };
        let r = classify(&l.clone().into(), Kind::Curve).unwrap();
        assert_eq!((r.case, r.m, r.alpha), (Case::R, 3, 3));
        let mm = minimal_models(&l.into(), Kind::Curve).unwrap();
        let names: Vec<&str> = mm.iter().map(|m| m.notation.as_str()).collect();
        assert_eq!(names, vec!["L(14;(8,[5,3]),2^2)", "L(14;(8,[4^2]),3)"]);
        assert!(mm.iter().all(|m| m.type_tag == TypeTag::Cr2 && m.ambiguity.len() == 1));
    }

    #[test]
    fn pencil_on_f3_gives_tangent_model() {
        let l = HirzebruchSystem::general(3, 2, 6, &[]);
        let r = classify(&l.clone().into(), Kind::System).unwrap();
        assert_eq!((r.case, r.m, r.alpha), (Case::R, 1, 1));
        let mm = minimal_models(&l.into(), Kind::System).unwrap();
        assert_eq!(mm[0].notation, "L(6;(4,[2^2]))");
    }
}
