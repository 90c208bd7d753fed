//! Weighted forests of a natural model, good clusters, and the plane models
//! obtained by elementary transformations along them.

use std::collections::BTreeSet;

use super::hirz::{is_natural, natural_of, naturalize};
use super::{ForestComponent, ForestVertex, GoodCluster, Kind, MinimalModel, Minimality, TypeTag, WeightedForest};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::notation;
use crate::systems::HirzebruchSystem;
use crate::transforms::checked_elm;

fn grow(m: &Model, p: usize, parent: usize, depth: i64, n: i64, kind: Kind, comp: &mut ForestComponent) -> Result<()> {
    comp.vertices.push(ForestVertex {
        id: m.points[p].id.clone(),
        weight: m.mult(p),
        parent: Some(parent),
        general: false,
    });
    let me = comp.vertices.len() - 1;
    if depth >= n - 1 {
        return Ok(());
    }
    let mut t = m.clone();
    let old = t.points[p].strict;
    checked_elm(&mut t, p)?;
    let prox = t.prox();
    let fiber = t.curves[old].clone();
    let kids: Vec<usize> = (0..t.n_points())
        .filter(|&i| i != p && prox[i].is_empty() && t.mult(i) > kind.general_mult() && !t.on_e(i))
        .filter(|&i| t.dot(&fiber, &t.points[i].z) >= 1)
        .collect();
    for c in kids {
        grow(&t, c, me, depth + 1, n, kind, comp)?;
    }
    Ok(())
}

pub(crate) fn forest_of(m: &Model, kind: Kind) -> Result<WeightedForest> {
    let n = m.hirzebruch_n().ok_or_else(|| Error::WrongSurface("forest needs F_n".into()))?;
    if n < 2 {
        return Err(Error::Precondition(format!("forest needs n >= 2, got {n}")));
    }
    let mut work = m.clone();
    let prox = work.prox();
    // points heavier than a general point; for curves the singular ones
    let singular: Vec<usize> = (0..work.n_points())
        .filter(|&i| prox[i].is_empty() && work.mult(i) > kind.general_mult() && !work.on_e(i))
        .collect();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut components = Vec::new();
    for &p in &singular {
        if seen.contains(&p) {
            continue;
        }
        let mates: Vec<usize> = work.fiber_mates(p).into_iter().filter(|i| singular.contains(i)).collect();
        let ids: Vec<String> = mates.iter().map(|&i| work.points[i].id.clone()).collect();
        let mut comp = ForestComponent {
            fiber: format!("F[{}]", ids.join(",")),
            vertices: vec![ForestVertex { id: format!("F[{}]", ids.join(",")), weight: 0, parent: None, general: false }],
        };
        for &q in &mates {
            seen.insert(q);
            grow(&work, q, 0, 1, n, kind, &mut comp)?;
        }
        components.push(comp);
    }
    let w = kind.general_mult();
    for i in 0..(n - 1) {
        let id = format!("gen{}", i + 1);
        components.push(ForestComponent {
            fiber: format!("F[{id}]"),
            vertices: vec![
                ForestVertex { id: format!("F[{id}]"), weight: 0, parent: None, general: false },
                ForestVertex { id, weight: w, parent: Some(0), general: true },
            ],
        });
    }
    Ok(WeightedForest { n, components })
}

/// The weighted forest of a natural model with `n >= 2`.
pub fn build_forest(l: &HirzebruchSystem, kind: Kind) -> Result<WeightedForest> {
    let m = Model::from_hirzebruch(&l.drop_zero())?;
    if !is_natural(&m) {
        return Err(Error::Precondition("forest needs a natural model".into()));
    }
    forest_of(&m, kind)
}

/// Maximal-weight paths of length `n - 1`, one per good sequence.
pub fn good_clusters(g: &WeightedForest) -> Vec<GoodCluster> {
    let target = (g.n - 1).max(0) as usize;
    // per component: the empty chain and every chain from the fiber vertex
    let options: Vec<Vec<Vec<usize>>> = g
        .components
        .iter()
        .map(|c| {
            let mut v = vec![Vec::new()];
            v.extend((1..c.vertices.len()).map(|i| c.chain_to(i)));
            v
        })
        .collect();
    let mut best_w = i64::MIN;
    let mut found: Vec<Vec<(usize, Vec<usize>)>> = Vec::new();
    let mut pick: Vec<(usize, Vec<usize>)> = Vec::new();
    fn rec(
        g: &WeightedForest,
        options: &[Vec<Vec<usize>>],
        ci: usize,
        left: usize,
        pick: &mut Vec<(usize, Vec<usize>)>,
        best_w: &mut i64,
        found: &mut Vec<Vec<(usize, Vec<usize>)>>,
    ) {
        if left == 0 {
            let w: i64 = pick.iter().flat_map(|(c, ch)| ch.iter().map(move |&v| g.components[*c].vertices[v].weight)).sum();
            if w > *best_w {
                *best_w = w;
                found.clear();
            }
            if w == *best_w {
                found.push(pick.clone());
            }
            return;
        }
        if ci == options.len() {
            return;
        }
        for ch in &options[ci] {
            if ch.len() > left {
                continue;
            }
            if !ch.is_empty() {
                pick.push((ci, ch.clone()));
            }
            rec(g, options, ci + 1, left - ch.len(), pick, best_w, found);
            if !ch.is_empty() {
                pick.pop();
            }
        }
    }
    rec(g, &options, 0, target, &mut pick, &mut best_w, &mut found);
    let mut out: Vec<GoodCluster> = Vec::new();
    let mut seqs: BTreeSet<Vec<i64>> = BTreeSet::new();
    for path in found {
        let mut chains = Vec::new();
        let mut points = Vec::new();
        let mut mults = Vec::new();
        let mut general = Vec::new();
        for (c, ch) in &path {
            let comp = &g.components[*c];
            let ids: Vec<String> = ch.iter().map(|&v| comp.vertices[v].id.clone()).collect();
            for &v in ch {
                mults.push(comp.vertices[v].weight);
                if comp.vertices[v].general {
                    general.push(comp.vertices[v].id.clone());
                }
            }
            points.extend(ids.iter().cloned());
            chains.push(ids);
        }
        mults.sort_unstable_by(|a, b| b.cmp(a));
        if seqs.insert(mults.clone()) {
            out.push(GoodCluster { chains, points, multiplicities: mults, weight: best_w, general });
        }
    }
    out
}

pub(crate) fn good_models_of(m: &Model, clusters: &[GoodCluster], kind: Kind) -> Result<Vec<MinimalModel>> {
    let (k, _) = m.kh();
    let tag = if k % 2 == 0 { TypeTag::Cr2 } else { TypeTag::Cb4 };
    let mut systems = Vec::new();
    for gc in clusters {
        let mut t = m.clone();
        for chain in &gc.chains {
            for id in chain {
                let p = if gc.general.contains(id) {
                    t.add_named_point(id.clone(), &[kind.general_mult()])
                } else {
                    t.idx(id)?
                };
                checked_elm(&mut t, p)?;
            }
        }
        if t.hirzebruch_n() != Some(1) {
            return Err(Error::Internal(format!("good cluster ended on F_{:?}", t.hirzebruch_n())));
        }
        t.contract()?;
        systems.push((gc.multiplicities.clone(), t.to_plane(0, true)?));
    }
    let all: Vec<_> = systems.iter().map(|s| s.1.clone()).collect();
    Ok(systems
        .into_iter()
        .enumerate()
        .map(|(i, (seq, s))| MinimalModel {
            type_tag: tag,
            notation: notation::plane(&s),
            ambiguity: all.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect(),
            minimality: Minimality::GoodModel,
            good_sequence: Some(seq),
            system: s,
        })
        .collect())
}

/// Plane models from elementary transformations along each good cluster,
/// followed by contraction of `E_1`.
pub fn good_plane_models(l: &HirzebruchSystem, clusters: &[GoodCluster], kind: Kind) -> Result<Vec<MinimalModel>> {
    let m = Model::from_hirzebruch(&l.drop_zero())?;
    good_models_of(&m, clusters, kind)
}

/// Natural model, forest, good clusters and good models in one go.
pub fn forest_pipeline(l: &HirzebruchSystem, kind: Kind) -> Result<(WeightedForest, Vec<GoodCluster>, Vec<MinimalModel>)> {
    let nat = natural_of(l, kind)?;
    pipeline_natural(&nat, kind)
}

/// Same as `pipeline`, starting from a flat model already in hand.
pub(crate) fn pipeline_flat(flat: &Model, kind: Kind) -> Result<(WeightedForest, Vec<GoodCluster>, Vec<MinimalModel>)> {
    let mut nat = flat.clone();
    naturalize(&mut nat)?;
    pipeline_natural(&nat, kind)
}

fn pipeline_natural(nat: &Model, kind: Kind) -> Result<(WeightedForest, Vec<GoodCluster>, Vec<MinimalModel>)> {
    let g = forest_of(nat, kind)?;
    let cl = good_clusters(&g);
    let models = good_models_of(nat, &cl, kind)?;
    Ok((g, cl, models))
}
