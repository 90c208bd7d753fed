//! Bracket notation: `L(14;(8,[4^2]),3)`. Points proximate to a proper point
//! are listed in brackets after it; every other point is listed flat.
//! Multiplicities are decreasing, repeats use `^`, zeros are omitted.

use crate::cluster::Cluster;
use crate::systems::{HirzebruchSystem, PlaneSystem, System};

fn run_length(vals: &[i64]) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < vals.len() {
        let mut j = i;
        while j < vals.len() && vals[j] == vals[i] {
            j += 1;
        }
        if j - i > 1 {
            out.push(format!("{}^{}", vals[i], j - i));
        } else {
            out.push(vals[i].to_string());
        }
        i = j;
    }
    out.join(",")
}

fn body(cluster: &Cluster, mult: &[i64]) -> String {
    let Ok(prox) = cluster.proximity() else {
        let mut v: Vec<i64> = mult.iter().copied().filter(|&x| x != 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        return run_length(&v);
    };
    let n = mult.len();
    let mut in_bracket = vec![false; n];
    let mut brackets: Vec<(i64, String)> = Vec::new();
    for p in 0..n {
        if !prox[p].is_empty() {
            continue;
        }
        let mut inner: Vec<i64> = Vec::new();
        for j in 0..n {
            if prox[j].contains(&p) && mult[j] != 0 {
                inner.push(mult[j]);
                in_bracket[j] = true;
            }
        }
        if !inner.is_empty() {
            inner.sort_unstable_by(|a, b| b.cmp(a));
            in_bracket[p] = true;
            brackets.push((mult[p], format!("({},[{}])", mult[p], run_length(&inner))));
        }
    }
    let mut flat: Vec<i64> = (0..n).filter(|&i| !in_bracket[i] && mult[i] != 0).map(|i| mult[i]).collect();
    flat.sort_unstable_by(|a, b| b.cmp(a));
    brackets.sort_by(|a, b| b.0.cmp(&a.0));
    let mut parts: Vec<String> = Vec::new();
    let mut fi = 0;
    for (lead, s) in brackets {
        let start = fi;
        while fi < flat.len() && flat[fi] > lead {
            fi += 1;
        }
        if fi > start {
            parts.push(run_length(&flat[start..fi]));
        }
        parts.push(s);
    }
    if fi < flat.len() {
        parts.push(run_length(&flat[fi..]));
    }
    parts.join(",")
}

pub fn plane(s: &PlaneSystem) -> String {
    let b = body(&s.cluster, &s.mult);
    if b.is_empty() {
        format!("L({})", s.degree)
    } else {
        format!("L({};{})", s.degree, b)
    }
}

pub fn hirzebruch(s: &HirzebruchSystem) -> String {
    let b = body(&s.cluster, &s.mult);
    if b.is_empty() {
        format!("L_{}({},{})", s.n, s.k, s.h)
    } else {
        format!("L_{}({},{};{})", s.n, s.k, s.h, b)
    }
}

pub fn system(s: &System) -> String {
    match s {
        System::Plane(p) => plane(p),
        System::Hirzebruch(h) => hirzebruch(h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::PointNode;

    #[test]
    fn flat_points() {
        assert_eq!(plane(&PlaneSystem::general(6, &[2; 8])), "L(6;2^8)");
        assert_eq!(plane(&PlaneSystem::general(7, &[2, 3, 0, 2])), "L(7;3,2^2)");
        assert_eq!(plane(&PlaneSystem::general(3, &[])), "L(3)");
    }

    #[test]
    fn brackets() {
        let c = Cluster::new(vec![
            PointNode::proper("o"),
            PointNode::near("a", "o"),
            PointNode::satellite("b", "a", "o"),
            PointNode::near("c", "b"),
        ]);
        let s = PlaneSystem { degree: 14, cluster: c, mult: vec![8, 4, 4, 3], lines: vec![] };
        assert_eq!(plane(&s), "L(14;(8,[4^2]),3)");
        let c = Cluster::new(vec![
            PointNode::proper("o"),
            PointNode::near("a", "o"),
            PointNode::near("b", "o"),
            PointNode::near("c", "b"),
            PointNode::near("d", "c"),
        ]);
        let s = PlaneSystem { degree: 14, cluster: c, mult: vec![8, 5, 3, 2, 2], lines: vec![] };
        assert_eq!(plane(&s), "L(14;(8,[5,3]),2^2)");
    }

    #[test]
    fn hirzebruch_form() {
        let c = Cluster::new(vec![PointNode::proper("p"), PointNode::proper("q"), PointNode::near("r", "q")]);
        let s = HirzebruchSystem { n: 3, k: 6, h: 18, cluster: c, mult: vec![3, 2, 2] };
        assert_eq!(hirzebruch(&s), "L_3(6,18;3,(2,[2]))");
    }
}
