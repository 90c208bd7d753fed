//! Breadth-first search over short sequences of quadratic maps. Used as an
//! independent check on minimality claims.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::Kind;
use crate::error::Result;
use crate::model::Model;
use crate::par;
use crate::systems::PlaneSystem;

/// Stop expanding after this many distinct states.
pub const STATE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Least degree seen, the input's own degree included.
    pub degree: i64,
    /// Set when the state budget cut the search short.
    pub partial: bool,
    pub explored: usize,
}

/// Form of a system up to relabeling of points. Declared lines pin the
/// labels, so systems carrying lines are keyed verbatim.
pub(crate) fn canonical(s: &PlaneSystem) -> String {
    if !s.lines.is_empty() {
        return format!("{}|{:?}|{:?}|{:?}", s.degree, s.cluster.ids(), s.mult, s.lines);
    }
    let (Ok(prox), Ok(pred), Ok(depth)) = (s.cluster.proximity(), s.cluster.predecessors(), s.cluster.depths()) else {
        return format!("{}|{:?}|{:?}", s.degree, s.cluster.ids(), s.mult);
    };
    let n = s.mult.len();
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        if let Some(p) = pred[i] {
            kids[p].push(i);
        }
    }
    fn code(i: usize, kids: &[Vec<usize>], s: &PlaneSystem, prox: &[Vec<usize>], depth: &[usize]) -> String {
        let sat = prox[i]
            .iter()
            .map(|&t| depth[i] - depth[t])
            .filter(|&g| g > 1)
            .map(|g| format!("s{g}"))
            .collect::<String>();
        let mut c: Vec<String> = kids[i].iter().map(|&j| code(j, kids, s, prox, depth)).collect();
        c.sort();
        format!("{}{}({})", s.mult[i], sat, c.join(","))
    }
    let mut roots: Vec<String> = (0..n).filter(|&i| pred[i].is_none()).map(|i| code(i, &kids, s, &prox, &depth)).collect();
    roots.sort();
    format!("{}|{}", s.degree, roots.join(","))
}

/// Multiplicity patterns for `j` fresh general points, each `0` or, when
/// `on_curve`, `1`.
fn fresh_patterns(j: usize, on_curve: bool) -> Vec<Vec<i64>> {
    let top = if on_curve { j } else { 0 };
    (0..=top).map(|ones| (0..j).map(|i| i64::from(i < ones)).collect()).collect()
}

/// Least image degree over one quadratic map from `s`, and the images
/// themselves unless `arithmetic_only`.
fn step(s: &PlaneSystem, aux: usize, on_curve: bool, arithmetic_only: bool) -> Result<(i64, Vec<(String, PlaneSystem)>)> {
    let mut base = Model::from_plane(s)?;
    base.unload_all()?;
    let d = base.degree();
    let existing = base.n_points();
    let mut best = i64::MAX;
    let mut out = Vec::new();
    for j in 0..=aux.min(3) {
        for pat in fresh_patterns(j, on_curve) {
            let mut w = base.clone();
            let fresh: Vec<usize> = pat.iter().map(|&mu| w.add_general_point(&[mu])).collect();
            let mults = w.mults();
            let need = 3 - j;
            let mut pick = Vec::with_capacity(3);
            let combos = choose(existing, need);
            for c in combos {
                pick.clear();
                pick.extend(c.iter().copied());
                pick.extend(fresh.iter().copied());
                let img = 2 * d - pick.iter().map(|&i| mults[i]).sum::<i64>();
                if img < 1 || w.quadratic_pattern(pick[0], pick[1], pick[2]).is_err() {
                    continue;
                }
                best = best.min(img);
                if !arithmetic_only {
                    let mut u = w.clone();
                    if u.quadratic(pick[0], pick[1], pick[2]).is_ok() {
                        let t = u.to_plane(0, true)?;
                        out.push((canonical(&t), t));
                    }
                }
            }
        }
    }
    Ok((best, out))
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn search(l: &PlaneSystem, depth: usize, aux: usize, kind: Kind, parallel: bool) -> Result<OracleResult> {
    let start = l.unloaded()?.drop_zero();
    let mut best = start.degree;
    let mut seen: HashSet<String> = HashSet::from([canonical(&start)]);
    let mut frontier = vec![start];
    let mut explored = 1;
    let mut partial = false;
    for level in 1..=depth {
        if frontier.is_empty() || best <= 1 || partial {
            break;
        }
        let last = level == depth;
        let on_curve = kind == Kind::Curve;
        let run = |s: &PlaneSystem| step(s, aux, on_curve, last);
        let outs = if parallel { par::map(&frontier, run) } else { par::seq::map(&frontier, run) };
        let mut next = Vec::new();
        for o in outs {
            let (b, kids) = o?;
            best = best.min(b);
            for (key, k) in kids {
                if !seen.insert(key) {
                    continue;
                }
                if explored >= STATE_BUDGET {
                    partial = true;
                    break;
                }
                explored += 1;
                next.push(k);
            }
        }
        frontier = next;
    }
    Ok(OracleResult { degree: best, partial, explored })
}

/// Least degree reachable by at most `depth` quadratic maps centered at base
/// points and at up to `aux` fresh general points per map. `l` is read as a
/// curve: a fresh point may lie on it.
pub fn brute_force_min_oracle(l: &PlaneSystem, depth: usize, aux: usize) -> Result<OracleResult> {
    search(l, depth, aux, Kind::Curve, true)
}

/// Sequential version of `brute_force_min_oracle`.
pub fn brute_force_min_oracle_seq(l: &PlaneSystem, depth: usize, aux: usize) -> Result<OracleResult> {
    search(l, depth, aux, Kind::Curve, false)
}

/// As `brute_force_min_oracle`; for a linear system fresh points are never
/// base points.
pub fn brute_force_min_oracle_kind(l: &PlaneSystem, depth: usize, aux: usize, kind: Kind) -> Result<OracleResult> {
    search(l, depth, aux, kind, true)
}
