//! A birational model tracked inside one fixed common resolution `X`.
//!
//! Every class lives in the basis of `X` built from the starting surface:
//! `(H, Z_1, ...)` for the plane or `(E, F, Z_1, ...)` for `F_n`. A move
//! (quadratic map, elementary transformation, blow-up or contraction of
//! `E_1`) only rewrites which classes play the role of the hyperplane, the
//! ruling and the exceptional total transforms. Proximity, strict transforms
//! and multiplicities are read back from intersection numbers, so the
//! bookkeeping of infinitely near points never has to be updated by hand.

use crate::cluster::{Cluster, Flags, PointNode};
use crate::error::{Error, Result};
use crate::lattice::Surface;
use crate::systems::{HirzebruchSystem, PlaneSystem};

pub type Class = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoint {
    pub id: String,
    /// Total transform in `X` of the exceptional curve of this point.
    pub z: Class,
    /// Index into `curves` of the strict transform of that curve.
    pub strict: usize,
    pub general: bool,
}

/// Values an elementary transformation must produce, computed from the rule
/// before the move is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElmRecord {
    pub on_e: bool,
    pub mu: i64,
    pub n: i64,
    pub k: i64,
    pub h: i64,
    pub new_mult: i64,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub root: Surface,
    pub cur: Surface,
    /// `[H]` on the plane, `[E, F]` on `F_n`.
    pub base: Vec<Class>,
    pub points: Vec<MPoint>,
    /// Known irreducible curves on `X`: strict exceptional curves, declared
    /// and generated lines, fibers and sections.
    pub curves: Vec<Class>,
    pub section: Option<usize>,
    /// Tracked divisor classes. Slot 0 is the system.
    pub classes: Vec<Class>,
    pub dim: usize,
    pub trace: Option<Vec<String>>,
    fresh: usize,
}

fn unit(dim: usize, i: usize) -> Class {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

fn add(a: &[i64], b: &[i64]) -> Class {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Class {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(a: &[i64], c: i64) -> Class {
    a.iter().map(|x| x * c).collect()
}

impl Model {
    fn empty(root: Surface, npts: usize) -> Self {
        let dim = root.rank() + npts;
        let base = (0..root.rank()).map(|i| unit(dim, i)).collect();
        Model {
            root,
            cur: root,
            base,
            points: Vec::new(),
            curves: Vec::new(),
            section: None,
            classes: Vec::new(),
            dim,
            trace: None,
            fresh: 0,
        }
    }

    fn install_cluster(&mut self, c: &Cluster) -> Result<()> {
        let bad = crate::cluster::validate_cluster(c);
        if let Some(v) = bad.first() {
            return Err(Error::InvalidCluster(v.to_string()));
        }
        let prox = c.proximity()?;
        let off = self.root.rank();
        for (i, node) in c.nodes.iter().enumerate() {
            let mut e = unit(self.dim, off + i);
            for (j, ps) in prox.iter().enumerate() {
                if ps.contains(&i) {
                    e[off + j] -= 1;
                }
            }
            let strict = self.push_curve(e);
            self.points.push(MPoint {
                id: node.id.clone(),
                z: unit(self.dim, off + i),
                strict,
                general: node.flags.general,
            });
        }
        Ok(())
    }

    pub fn from_plane(s: &PlaneSystem) -> Result<Self> {
        if s.mult.len() != s.cluster.len() {
            return Err(Error::DimensionMismatch(s.mult.len(), s.cluster.len()));
        }
        let mut m = Model::empty(Surface::P2, s.cluster.len());
        m.install_cluster(&s.cluster)?;
        for line in &s.lines {
            let mut c = m.base[0].clone();
            for id in line {
                let i = s.cluster.index_of(id).ok_or_else(|| Error::UnknownPoint(id.clone()))?;
                c = sub(&c, &m.points[i].z);
            }
            m.push_curve(c);
        }
        let mut d = scale(&m.base[0], s.degree);
        for (p, &mu) in m.points.iter().zip(&s.mult) {
            d = sub(&d, &scale(&p.z, mu));
        }
        m.classes.push(d);
        Ok(m)
    }

    pub fn from_hirzebruch(s: &HirzebruchSystem) -> Result<Self> {
        if s.mult.len() != s.cluster.len() {
            return Err(Error::DimensionMismatch(s.mult.len(), s.cluster.len()));
        }
        if s.n < 0 {
            return Err(Error::Precondition("negative n".into()));
        }
        let mut m = Model::empty(Surface::Fn { n: s.n }, s.cluster.len());
        m.install_cluster(&s.cluster)?;
        let roots = s.cluster.roots()?;
        let any_on_e = s.cluster.nodes.iter().any(|x| x.flags.on_e);
        if s.n >= 1 || any_on_e {
            let mut c = m.base[0].clone();
            for (i, node) in s.cluster.nodes.iter().enumerate() {
                if node.flags.on_e {
                    c = sub(&c, &m.points[i].z);
                }
            }
            m.section = Some(m.push_curve(c));
        }
        // fibers: proper points grouped by label, plus points on the strict
        // transform of the fiber through their root
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, node) in s.cluster.nodes.iter().enumerate() {
            if !node.is_proper() {
                continue;
            }
            let key = match &node.flags.fiber {
                Some(f) => format!("label:{f}"),
                None => format!("point:{}", node.id),
            };
            match groups.iter_mut().find(|g| g.0 == key) {
                Some(g) => g.1.push(i),
                None => groups.push((key, vec![i])),
            }
        }
        for (_, members) in &groups {
            let mut c = m.base[1].clone();
            for &i in members {
                c = sub(&c, &m.points[i].z);
            }
            for (j, node) in s.cluster.nodes.iter().enumerate() {
                if !node.is_proper() && node.flags.on_fiber_strict && members.contains(&roots[j]) {
                    c = sub(&c, &m.points[j].z);
                }
            }
            m.push_curve(c);
        }
        let mut d = add(&scale(&m.base[0], s.k), &scale(&m.base[1], s.h));
        for (p, &mu) in m.points.iter().zip(&s.mult) {
            d = sub(&d, &scale(&p.z, mu));
        }
        m.classes.push(d);
        Ok(m)
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self.log("start");
        self
    }

    fn log(&mut self, what: &str) {
        if let Some(t) = &mut self.trace {
            let line = format!("{what}: surface={:?} system={:?}", self.cur, self.classes.first());
            t.push(line);
        }
    }

    pub fn dot(&self, a: &[i64], b: &[i64]) -> i64 {
        match self.root {
            Surface::P2 => a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<i64>(),
            Surface::Fn { n } => {
                -n * a[0] * b[0] + a[0] * b[1] + a[1] * b[0]
                    - a[2..].iter().zip(&b[2..]).map(|(x, y)| x * y).sum::<i64>()
            }
        }
    }

    pub fn push_curve(&mut self, c: Class) -> usize {
        if let Some(i) = self.curves.iter().position(|x| *x == c) {
            return i;
        }
        self.curves.push(c);
        self.curves.len() - 1
    }

    pub fn add_class(&mut self, c: Class) -> usize {
        self.classes.push(c);
        self.classes.len() - 1
    }

    fn grow(&mut self) -> usize {
        let i = self.dim;
        self.dim += 1;
        for c in self.base.iter_mut() {
            c.push(0);
        }
        for p in self.points.iter_mut() {
            p.z.push(0);
        }
        for c in self.curves.iter_mut() {
            c.push(0);
        }
        for c in self.classes.iter_mut() {
            c.push(0);
        }
        i
    }

    fn fresh_id(&mut self, stem: &str) -> String {
        loop {
            self.fresh += 1;
            let id = format!("{stem}{}", self.fresh);
            if self.index(&id).is_none() {
                return id;
            }
        }
    }

    fn unique_id(&self, base: &str) -> String {
        let mut id = base.to_string();
        while self.index(&id).is_some() {
            id.push('\'');
        }
        id
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn idx(&self, id: &str) -> Result<usize> {
        self.index(id).ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    // ---- numerical data -------------------------------------------------

    pub fn system(&self) -> &Class {
        &self.classes[0]
    }

    pub fn mult_in(&self, class: usize, i: usize) -> i64 {
        self.dot(&self.classes[class], &self.points[i].z)
    }

    pub fn mult(&self, i: usize) -> i64 {
        self.mult_in(0, i)
    }

    pub fn mults(&self) -> Vec<i64> {
        (0..self.points.len()).map(|i| self.mult(i)).collect()
    }

    pub fn hirzebruch_n(&self) -> Option<i64> {
        match self.cur {
            Surface::Fn { n } => Some(n),
            Surface::P2 => None,
        }
    }

    pub fn degree_of(&self, c: &[i64]) -> i64 {
        self.dot(c, &self.base[0])
    }

    pub fn degree(&self) -> i64 {
        self.degree_of(&self.classes[0])
    }

    /// `(k, h)` of a class on the current `F_n`.
    pub fn kh_of(&self, c: &[i64]) -> (i64, i64) {
        let n = self.hirzebruch_n().unwrap_or(0);
        let k = self.dot(c, &self.base[1]);
        (k, self.dot(c, &self.base[0]) + n * k)
    }

    pub fn kh(&self) -> (i64, i64) {
        self.kh_of(&self.classes[0])
    }

    pub fn is_contracted(&self, c: &[i64]) -> bool {
        self.base.iter().all(|b| self.dot(c, b) == 0)
    }

    /// Known irreducible curves with labels: strict exceptional curves,
    /// tracked curves, and on the plane the lines through free pairs.
    pub fn known_curves(&self) -> Vec<(String, Class)> {
        let m = self;
        let mut out: Vec<(String, Class)> = Vec::new();
        let push = |label: String, c: Class, out: &mut Vec<(String, Class)>| {
            if !out.iter().any(|x| x.1 == c) {
                out.push((label, c));
            }
        };
        for (i, p) in m.points.iter().enumerate() {
            push(format!("E'({})", p.id), m.strict_class(i).clone(), &mut out);
        }
        for (ci, c) in m.curves.iter().enumerate() {
            if m.is_contracted(c) {
                continue;
            }
            let label = if Some(ci) == m.section { "E".to_string() } else { format!("curve{ci}") };
            push(label, c.clone(), &mut out);
        }
        if m.root == Surface::P2 {
            let prox = m.prox();
            let np = m.n_points();
            for u in 0..np {
                for v in u + 1..np {
                    // a tangent direction counts only at a proper point
                    let free_pair = (prox[u].is_empty() && (prox[v].is_empty() || prox[v] == [u]))
                        || (prox[v].is_empty() && prox[u] == [v]);
                    if !free_pair || m.line_through(u, v).is_some() {
                        continue;
                    }
                    let mut c = m.base[0].clone();
                    for (x, (zu, zv)) in c.iter_mut().zip(m.points[u].z.iter().zip(&m.points[v].z)) {
                        *x -= zu + zv;
                    }
                    push(format!("line({},{})", m.points[u].id, m.points[v].id), c, &mut out);
                }
            }
        }
        out
    }

    pub fn strict_class(&self, i: usize) -> &Class {
        &self.curves[self.points[i].strict]
    }

    /// For each point, the points it is proximate to.
    pub fn prox(&self) -> Vec<Vec<usize>> {
        let es: Vec<&Class> = (0..self.points.len()).map(|i| self.strict_class(i)).collect();
        self.points
            .iter()
            .map(|pj| {
                (0..es.len())
                    .filter(|&i| self.dot(es[i], &pj.z) == 1)
                    .collect()
            })
            .collect()
    }

    /// Topological order: a point comes after every point it is proximate to.
    /// Ties keep vector position.
    pub fn topo(&self) -> Vec<usize> {
        let prox = self.prox();
        topo_from(&prox)
    }

    pub fn predecessors(&self) -> Vec<Option<usize>> {
        let prox = self.prox();
        preds_from(&prox)
    }

    pub fn is_proper(&self, i: usize) -> bool {
        self.prox()[i].is_empty()
    }

    pub fn on_e(&self, i: usize) -> bool {
        match self.section {
            Some(s) => self.dot(&self.curves[s], &self.points[i].z) >= 1,
            None => false,
        }
    }

    /// Points lying on a curve (positive multiplicity of its strict transform).
    pub fn points_on(&self, c: &[i64]) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| self.dot(c, &self.points[i].z) >= 1)
            .collect()
    }

    // ---- bookkeeping ----------------------------------------------------

    pub fn recompute_strict(&mut self) -> Result<()> {
        for x in 0..self.points.len() {
            let z = &self.points[x].z;
            let found = (0..self.curves.len()).find(|&c| {
                self.is_contracted(&self.curves[c]) && self.dot(&self.curves[c], z) == -1
            });
            match found {
                Some(c) => self.points[x].strict = c,
                None => {
                    return Err(Error::Internal(format!(
                        "no strict exceptional curve for point {}",
                        self.points[x].id
                    )))
                }
            }
        }
        Ok(())
    }

    /// Subtract strict exceptional classes meeting the class negatively.
    pub fn unload_class(&self, c: &mut Class) -> Result<()> {
        let size: i64 = c.iter().map(|x| x.abs()).sum();
        let r = self.points.len() as i64;
        let bound = (size + r + 1) * (r + 1) * (r + 1) + 1000;
        let mut steps = 0;
        loop {
            let hit = (0..self.points.len()).find(|&i| self.dot(c, self.strict_class(i)) < 0);
            let Some(i) = hit else { return Ok(()) };
            *c = sub(c, self.strict_class(i));
            steps += 1;
            if steps > bound {
                return Err(Error::IterationBound("model unloading".into()));
            }
        }
    }

    pub fn unload_all(&mut self) -> Result<()> {
        let mut cs = std::mem::take(&mut self.classes);
        let r = cs.iter_mut().try_for_each(|c| self.unload_class(c));
        self.classes = cs;
        r
    }

    pub fn is_pure(&self, c: &[i64]) -> bool {
        (0..self.points.len()).all(|i| self.dot(c, self.strict_class(i)) >= 0)
    }

    // ---- adding points --------------------------------------------------

    /// A fresh proper point in general position. `mults[c]` is its
    /// multiplicity in tracked class `c` (missing entries are zero).
    pub fn add_general_point(&mut self, mults: &[i64]) -> usize {
        let id = self.fresh_id("g");
        self.add_named_point(id, mults)
    }

    /// Like `add_general_point` with a caller-chosen id.
    pub fn add_named_point(&mut self, id: String, mults: &[i64]) -> usize {
        let slot = self.grow();
        let z = unit(self.dim, slot);
        let strict = self.push_curve(z.clone());
        if let Surface::Fn { .. } = self.cur {
            let fiber = sub(&self.base[1], &z);
            self.push_curve(fiber);
        }
        for (c, &mu) in mults.iter().enumerate() {
            self.classes[c] = sub(&self.classes[c], &scale(&z, mu));
        }
        self.points.push(MPoint { id, z, strict, general: true });
        self.log("add general point");
        self.points.len() - 1
    }

    /// A fresh free point infinitely near of order one to `parent`, in a
    /// general direction.
    pub fn add_infinitely_near(&mut self, parent: usize, mults: &[i64]) -> usize {
        let slot = self.grow();
        let z = unit(self.dim, slot);
        let ps = self.points[parent].strict;
        self.curves[ps] = sub(&self.curves[ps], &z);
        let strict = self.push_curve(z.clone());
        let id = self.fresh_id("g");
        for (c, &mu) in mults.iter().enumerate() {
            self.classes[c] = sub(&self.classes[c], &scale(&z, mu));
        }
        self.points.push(MPoint { id, z, strict, general: true });
        self.log("add infinitely near point");
        self.points.len() - 1
    }

    // ---- plane moves ----------------------------------------------------

    /// A known line through two points, if any.
    pub fn line_through(&self, u: usize, v: usize) -> Option<usize> {
        let (zu, zv) = (&self.points[u].z, &self.points[v].z);
        (0..self.curves.len()).find(|&c| {
            let cl = &self.curves[c];
            self.degree_of(cl) == 1 && self.dot(cl, zu) >= 1 && self.dot(cl, zv) >= 1
        })
    }

    pub fn ensure_line(&mut self, u: usize, v: usize) -> usize {
        if let Some(c) = self.line_through(u, v) {
            return c;
        }
        let c = sub(&sub(&self.base[0], &self.points[u].z), &self.points[v].z);
        self.push_curve(c)
    }

    /// Classifies three centers of a quadratic map. Returns the pairs whose
    /// lines get contracted.
    pub fn quadratic_pattern(&self, a: usize, b: usize, c: usize) -> Result<Vec<(usize, usize)>> {
        if self.cur != Surface::P2 {
            return Err(Error::WrongSurface("quadratic map needs the plane".into()));
        }
        if a == b || b == c || a == c {
            return Err(Error::InvalidCenters("centers must be distinct".into()));
        }
        let prox = self.prox();
        let pred = preds_from(&prox);
        let proper: Vec<usize> = [a, b, c].into_iter().filter(|&x| prox[x].is_empty()).collect();
        let on_line = |x: usize, y: usize, z: usize| -> bool {
            self.line_through(x, y)
                .map(|l| self.dot(&self.curves[l], &self.points[z].z) >= 1)
                .unwrap_or(false)
        };
        match proper.len() {
            3 => {
                if on_line(a, b, c) {
                    return Err(Error::InvalidCenters("three aligned centers".into()));
                }
                Ok(vec![(a, b), (a, c), (b, c)])
            }
            2 => {
                let y = [a, b, c].into_iter().find(|x| !proper.contains(x)).unwrap();
                let Some(x) = pred[y].filter(|p| proper.contains(p)) else {
                    return Err(Error::InvalidCenters("infinitely near center must follow a proper center".into()));
                };
                if prox[y].len() != 1 {
                    return Err(Error::InvalidCenters("satellite center".into()));
                }
                let z = *proper.iter().find(|&&p| p != x).unwrap();
                if on_line(x, y, z) {
                    return Err(Error::InvalidCenters("third center on the line through the other two".into()));
                }
                Ok(vec![(x, y), (x, z)])
            }
            1 => {
                let x = proper[0];
                let rest: Vec<usize> = [a, b, c].into_iter().filter(|&t| t != x).collect();
                let (y, z) = if pred[rest[0]] == Some(x) { (rest[0], rest[1]) } else { (rest[1], rest[0]) };
                if pred[y] != Some(x) || pred[z] != Some(y) {
                    return Err(Error::InvalidCenters("centers must form a chain".into()));
                }
                if prox[z].len() != 1 {
                    return Err(Error::InvalidCenters("third center satellite to the first".into()));
                }
                if on_line(x, y, z) {
                    return Err(Error::InvalidCenters("third center on the line through the other two".into()));
                }
                Ok(vec![(x, y)])
            }
            _ => Err(Error::InvalidCenters("no proper center".into())),
        }
    }

    /// The quadratic map centered at `a, b, c`. Image points keep the ids of
    /// the centers, so applying it again at the same ids undoes it.
    pub fn quadratic(&mut self, a: usize, b: usize, c: usize) -> Result<()> {
        let pairs = self.quadratic_pattern(a, b, c)?;
        for (u, v) in pairs {
            self.ensure_line(u, v);
        }
        let h = self.base[0].clone();
        let (za, zb, zc) = (self.points[a].z.clone(), self.points[b].z.clone(), self.points[c].z.clone());
        self.base[0] = sub(&sub(&sub(&scale(&h, 2), &za), &zb), &zc);
        self.points[a].z = sub(&sub(&h, &zb), &zc);
        self.points[b].z = sub(&sub(&h, &za), &zc);
        self.points[c].z = sub(&sub(&h, &za), &zb);
        self.recompute_strict()?;
        self.unload_all()?;
        self.log("quadratic");
        Ok(())
    }

    pub fn blow_up(&mut self, p: usize) -> Result<()> {
        if self.cur != Surface::P2 {
            return Err(Error::WrongSurface("blow-up of a plane point needs the plane".into()));
        }
        if !self.is_proper(p) {
            return Err(Error::Precondition("blown-up point must be proper".into()));
        }
        let h = self.base[0].clone();
        let z = self.points[p].z.clone();
        self.base = vec![z.clone(), sub(&h, &z)];
        self.section = Some(self.points[p].strict);
        // the fiber of every remaining proper point is the line through p
        self.points.remove(p);
        self.cur = Surface::Fn { n: 1 };
        for i in 0..self.points.len() {
            if self.is_proper(i) && self.fiber_known(i).is_none() {
                let f = sub(&self.base[1], &self.points[i].z);
                self.push_curve(f);
            }
        }
        self.recompute_strict()?;
        self.log("blow up");
        Ok(())
    }

    /// Contracts `E_1`. The new point is inserted first and returned.
    pub fn contract(&mut self) -> Result<usize> {
        if self.cur != (Surface::Fn { n: 1 }) {
            return Err(Error::WrongSurface("contraction needs F_1".into()));
        }
        let s = self.section.ok_or_else(|| Error::Internal("F_1 without section".into()))?;
        if self.dot(&self.classes[0], &self.curves[s]) < 0 {
            return Err(Error::SectionSplits("E_1 is a fixed component".into()));
        }
        let e = self.base[0].clone();
        let h = add(&e, &self.base[1]);
        self.base = vec![h];
        let id = self.unique_id("o");
        self.points.insert(0, MPoint { id, z: e, strict: s, general: false });
        self.section = None;
        self.cur = Surface::P2;
        self.recompute_strict()?;
        self.unload_all()?;
        self.log("contract");
        Ok(0)
    }

    // ---- Hirzebruch moves -----------------------------------------------

    fn fiber_known(&self, p: usize) -> Option<usize> {
        let f = &self.base[1];
        let zp = &self.points[p].z;
        (0..self.curves.len()).find(|&c| {
            let cl = &self.curves[c];
            self.dot(cl, f) == 0 && !self.is_contracted(cl) && self.dot(cl, zp) >= 1
        })
    }

    /// The known fiber through a proper point, generated if missing.
    pub fn fiber_through(&mut self, p: usize) -> usize {
        if let Some(c) = self.fiber_known(p) {
            return c;
        }
        let c = sub(&self.base[1], &self.points[p].z);
        self.push_curve(c)
    }

    /// Proper points lying on the fiber through `p`, including `p`.
    pub fn fiber_mates(&mut self, p: usize) -> Vec<usize> {
        let f = self.fiber_through(p);
        let prox = self.prox();
        let c = self.curves[f].clone();
        self.points_on(&c).into_iter().filter(|&i| prox[i].is_empty()).collect()
    }

    pub fn swap_rulings(&mut self) -> Result<()> {
        if self.cur != (Surface::Fn { n: 0 }) {
            return Err(Error::WrongSurface("ruling swap needs F_0".into()));
        }
        self.base.swap(0, 1);
        self.section = None;
        self.log("swap rulings");
        Ok(())
    }

    /// Rule-based prediction for an elementary transformation at `p`.
    pub fn elm_prediction(&mut self, p: usize) -> Result<ElmRecord> {
        let Surface::Fn { n } = self.cur else {
            return Err(Error::WrongSurface("elementary transformation needs F_n".into()));
        };
        let on_e = n == 0 || self.on_e(p);
        let mu = self.mult(p);
        let (k, h) = self.kh();
        let (n2, h2) = if on_e { (n + 1, h + k - mu) } else { (n - 1, h - mu) };
        Ok(ElmRecord { on_e, mu, n: n2, k, h: h2, new_mult: k - mu })
    }

    /// Elementary transformation at the proper point `p`. The point created
    /// from the contracted fiber takes `p`'s slot and a primed id.
    pub fn elm(&mut self, p: usize) -> Result<ElmRecord> {
        let Surface::Fn { n } = self.cur else {
            return Err(Error::WrongSurface("elementary transformation needs F_n".into()));
        };
        if !self.is_proper(p) {
            return Err(Error::Precondition(format!(
                "elementary transformation at infinitely near point {}",
                self.points[p].id
            )));
        }
        if n == 0 && !self.on_e(p) {
            // on F_0 use the horizontal section through p
            let s = sub(&self.base[0], &self.points[p].z);
            self.section = Some(self.push_curve(s));
        }
        let rec = self.elm_prediction(p)?;
        if rec.mu > rec.k {
            return Err(Error::FiberSplits { mu: rec.mu, k: rec.k });
        }
        let fiber = self.fiber_through(p);
        let e = self.base[0].clone();
        let f = self.base[1].clone();
        let zp = self.points[p].z.clone();
        self.base[0] = if rec.on_e { sub(&e, &zp) } else { sub(&add(&e, &f), &zp) };
        let id = self.unique_id(&format!("{}'", self.points[p].id));
        self.points[p] = MPoint { id, z: sub(&f, &zp), strict: fiber, general: false };
        self.cur = Surface::Fn { n: rec.n };
        self.recompute_strict()?;
        self.unload_all()?;
        self.log("elm");
        Ok(rec)
    }

    // ---- export ---------------------------------------------------------

    fn kept(&self, class: usize, drop_zero: bool) -> Vec<bool> {
        let n = self.points.len();
        if !drop_zero {
            return vec![true; n];
        }
        let prox = self.prox();
        let mut keep: Vec<bool> = (0..n).map(|i| self.mult_in(class, i) != 0).collect();
        let order = self.topo();
        for &j in order.iter().rev() {
            if keep[j] {
                for &i in &prox[j] {
                    keep[i] = true;
                }
            }
        }
        keep
    }

    fn export_cluster(&self, keep: &[bool]) -> (Cluster, Vec<usize>) {
        let prox = self.prox();
        let order = topo_from(&prox);
        let pred = preds_from(&prox);
        let mut nodes = Vec::new();
        let mut idx = Vec::new();
        for &j in &order {
            if !keep[j] {
                continue;
            }
            let mut node = PointNode::proper(self.points[j].id.clone());
            if let Some(p) = pred[j] {
                node.predecessor = Some(self.points[p].id.clone());
                node.proximate_to.push(self.points[p].id.clone());
                for &i in &prox[j] {
                    if i != p {
                        node.proximate_to.push(self.points[i].id.clone());
                    }
                }
            }
            node.flags = Flags { general: self.points[j].general, ..Flags::default() };
            nodes.push(node);
            idx.push(j);
        }
        (Cluster::new(nodes), idx)
    }

    pub fn to_plane(&self, class: usize, drop_zero: bool) -> Result<PlaneSystem> {
        if self.cur != Surface::P2 {
            return Err(Error::WrongSurface("plane export from F_n".into()));
        }
        let keep = self.kept(class, drop_zero);
        let (cluster, idx) = self.export_cluster(&keep);
        let mult = idx.iter().map(|&i| self.mult_in(class, i)).collect();
        let mut lines = Vec::new();
        for c in &self.curves {
            if self.degree_of(c) != 1 {
                continue;
            }
            let on: Vec<String> = idx
                .iter()
                .filter(|&&i| self.dot(c, &self.points[i].z) >= 1)
                .map(|&i| self.points[i].id.clone())
                .collect();
            if on.len() >= 3 && !lines.contains(&on) {
                lines.push(on);
            }
        }
        Ok(PlaneSystem { degree: self.degree_of(&self.classes[class]), cluster, mult, lines })
    }

    pub fn to_hirzebruch(&self, class: usize, drop_zero: bool) -> Result<HirzebruchSystem> {
        let Surface::Fn { n } = self.cur else {
            return Err(Error::WrongSurface("Hirzebruch export from the plane".into()));
        };
        let keep = self.kept(class, drop_zero);
        let (mut cluster, idx) = self.export_cluster(&keep);
        let prox = self.prox();
        // group proper points by known fiber
        let mut fiber_of: Vec<Option<usize>> = vec![None; self.points.len()];
        for &i in &idx {
            if prox[i].is_empty() {
                fiber_of[i] = self.fiber_known(i);
            }
        }
        let roots = cluster.roots()?;
        let mut labels: Vec<(usize, String)> = Vec::new();
        for (pos, &i) in idx.iter().enumerate() {
            let node = &mut cluster.nodes[pos];
            node.flags.on_e = self.on_e(i);
            if let Some(f) = fiber_of[i] {
                let shared = idx.iter().filter(|&&j| fiber_of[j] == Some(f)).count() > 1;
                if shared {
                    let label = match labels.iter().find(|l| l.0 == f) {
                        Some(l) => l.1.clone(),
                        None => {
                            let l = format!("f{}", labels.len() + 1);
                            labels.push((f, l.clone()));
                            l
                        }
                    };
                    node.flags.fiber = Some(label);
                }
            }
        }
        for (pos, &i) in idx.iter().enumerate() {
            if prox[i].is_empty() {
                continue;
            }
            let root = idx[roots[pos]];
            let f = self.fiber_known(root);
            if let Some(f) = f {
                cluster.nodes[pos].flags.on_fiber_strict = self.dot(&self.curves[f], &self.points[i].z) >= 1;
            }
        }
        let (k, h) = self.kh_of(&self.classes[class]);
        let mult = idx.iter().map(|&i| self.mult_in(class, i)).collect();
        Ok(HirzebruchSystem { n, k, h, cluster, mult })
    }
}

pub fn topo_from(prox: &[Vec<usize>]) -> Vec<usize> {
    let n = prox.len();
    let mut indeg: Vec<usize> = prox.iter().map(|p| p.len()).collect();
    let mut done = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let Some(next) = (0..n).find(|&i| !done[i] && indeg[i] == 0) else {
            // cannot happen for a resolution, keep the rest in place
            out.extend((0..n).filter(|&i| !done[i]));
            break;
        };
        done[next] = true;
        out.push(next);
        for j in 0..n {
            if prox[j].contains(&next) {
                indeg[j] -= 1;
            }
        }
    }
    out
}

pub fn preds_from(prox: &[Vec<usize>]) -> Vec<Option<usize>> {
    let order = topo_from(prox);
    let mut rank = vec![0; prox.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    prox.iter()
        .map(|ps| ps.iter().copied().max_by_key(|&i| rank[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(d: i64, nodes: Vec<PointNode>, mult: Vec<i64>) -> Model {
        Model::from_plane(&PlaneSystem { degree: d, cluster: Cluster::new(nodes), mult, lines: vec![] }).unwrap()
    }

    #[test]
    fn quadratic_is_an_involution() {
        let mut m = plane(
            7,
            vec![PointNode::proper("a"), PointNode::proper("b"), PointNode::proper("c")],
            vec![4, 2, 2],
        );
        m.quadratic(0, 1, 2).unwrap();
        // 14 - 8 = 6; a' = 7 - 4 = 3, b' = c' = 7 - 6 = 1
        assert_eq!(m.degree(), 6);
        assert_eq!(m.mults(), vec![3, 1, 1]);
        m.quadratic(0, 1, 2).unwrap();
        assert_eq!(m.degree(), 7);
        assert_eq!(m.mults(), vec![4, 2, 2]);
    }

    #[test]
    fn quadratic_with_near_center() {
        // x proper, y > x, z proper; L(4; 2, 1, 1) -> 8 - 4 = 4
        let mut m = plane(
            4,
            vec![PointNode::proper("x"), PointNode::near("y", "x"), PointNode::proper("z")],
            vec![2, 1, 1],
        );
        m.quadratic(0, 1, 2).unwrap();
        assert_eq!(m.degree(), 4);
        let prox = m.prox();
        assert!(prox[0].is_empty());
        assert_eq!(prox[1], vec![0]);
        assert!(prox[2].is_empty());
    }

    #[test]
    fn chain_pattern_keeps_shape() {
        let mut m = plane(
            5,
            vec![PointNode::proper("x"), PointNode::near("y", "x"), PointNode::near("z", "y")],
            vec![2, 2, 1],
        );
        m.quadratic(0, 1, 2).unwrap();
        assert_eq!(m.degree(), 5);
        let prox = m.prox();
        assert_eq!(prox[1], vec![0]);
        assert_eq!(prox[2], vec![1]);
        m.quadratic(0, 1, 2).unwrap();
        assert_eq!(m.mults(), vec![2, 2, 1]);
    }

    #[test]
    fn rejects_aligned_centers() {
        let s = PlaneSystem {
            degree: 3,
            cluster: Cluster::new(vec![PointNode::proper("a"), PointNode::proper("b"), PointNode::proper("c")]),
            mult: vec![1, 1, 1],
            lines: vec![vec!["a".into(), "b".into(), "c".into()]],
        };
        let mut m = Model::from_plane(&s).unwrap();
        assert!(matches!(m.quadratic(0, 1, 2), Err(Error::InvalidCenters(_))));
    }

    #[test]
    fn blow_up_and_contract_round_trip() {
        let mut m = plane(3, vec![PointNode::proper("p"), PointNode::near("q", "p")], vec![2, 1]);
        m.blow_up(0).unwrap();
        assert_eq!(m.kh(), (1, 3));
        assert!(m.on_e(0));
        m.contract().unwrap();
        assert_eq!(m.degree(), 3);
        assert_eq!(m.mults(), vec![2, 1]);
        assert_eq!(m.prox()[1], vec![0]);
    }
}
