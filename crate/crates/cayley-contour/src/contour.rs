//! Subcontours, contours, contour removal, and the counting bounds.
//!
//! For a window with boundary mark `i`, the vertices of each other spin `j`
//! split into connected components. Each component, together with the edges
//! leaving it (its support) and its mark, is a subcontour. Subcontours whose
//! vertex spans come within `2(r'-1)` of each other group into contours; on
//! a tree, distinct contours share no improper ball, which is what makes the
//! contour-removal map well behaved.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::ground::{improper_balls, SpectrumReport};
use crate::potential::{BallModel, Spin, SpinWindow};
use crate::tree::{geodesic, outer_boundary, vertices_within, volume, Ball, Vertex, VertexSet};
use crate::{Error, Result};

/// An edge of the tree, keyed by its deeper endpoint.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    child: Vertex,
}

impl Edge {
    /// The edge between a vertex and its parent. The root has no such edge.
    pub fn above(child: Vertex) -> Result<Edge> {
        if child.is_root() {
            return Err(Error::Invalid("the root has no parent edge".into()));
        }
        Ok(Edge { child })
    }

    pub fn child(&self) -> &Vertex {
        &self.child
    }

    pub fn parent(&self) -> Vertex {
        self.child.parent().expect("edge child is never the root")
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.parent(), self.child.clone())
    }

    /// Whether both endpoints lie in `V_n`.
    pub fn within(&self, n: usize) -> bool {
        self.child.depth() <= n
    }

    pub fn shares_endpoint(&self, other: &Edge) -> bool {
        let (p1, c1) = self.endpoints();
        let (p2, c2) = other.endpoints();
        p1 == p2 || p1 == c2 || c1 == p2 || c1 == c2
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.parent(), self.child)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All boundary edges of the window: edges inside `V_{n+1}` whose endpoint
/// spins differ (spins outside `V_n` read as the boundary mark).
pub fn edge_boundary(w: &SpinWindow) -> Vec<Edge> {
    let mut out = Vec::new();
    for v in volume(w.n() + 1, w.k()).iter() {
        if v.is_root() {
            continue;
        }
        let p = v.parent().unwrap();
        if w.spin(v) != w.spin(&p) {
            out.push(Edge { child: v.clone() });
        }
    }
    out
}

/// A maximal monochromatic deviation component: its mark, its vertex set,
/// and the edges leaving it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subcontour {
    pub mark: Spin,
    pub interior: VertexSet,
    pub support: Vec<Edge>,
}

impl Subcontour {
    /// Rebuilds a subcontour from its mark and interior; the support is
    /// recomputable from the interior.
    pub fn from_interior(mark: Spin, interior: VertexSet, k: u8) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::Invalid("subcontour interior is empty".into()));
        }
        if !interior.is_connected(k) {
            return Err(Error::Invalid(
                "subcontour interior is not connected".into(),
            ));
        }
        let support = support_edges(&interior, k);
        Ok(Subcontour {
            mark,
            interior,
            support,
        })
    }

    /// `V(T)`: the endpoints of the support edges.
    pub fn span(&self) -> VertexSet {
        let mut vs = Vec::with_capacity(self.support.len() * 2);
        for e in &self.support {
            let (p, c) = e.endpoints();
            vs.push(p);
            vs.push(c);
        }
        VertexSet::new(vs)
    }

    fn id_key(&self) -> (Spin, Vec<Vertex>) {
        (self.mark, self.interior.iter().cloned().collect())
    }
}

/// Connected components of `{t in V_n : sigma(t) = j}` for every mark
/// `j != i`, each with its support `B(K)`.
pub fn subcontours(w: &SpinWindow) -> Vec<Subcontour> {
    let k = w.k();
    let mut by_mark: BTreeMap<Spin, Vec<Vertex>> = BTreeMap::new();
    for (v, s) in w.assignments() {
        if s != w.boundary() {
            by_mark.entry(s).or_default().push(v.clone());
        }
    }
    let mut out = Vec::new();
    for (mark, verts) in by_mark {
        let set = VertexSet::new(verts);
        let mut seen: HashSet<&Vertex> = HashSet::new();
        for start in set.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = vec![start.clone()];
            let mut queue = vec![start];
            seen.insert(start);
            while let Some(v) = queue.pop() {
                for nb in v.neighbors(k) {
                    if let Ok(pos) = set.as_slice().binary_search(&nb) {
                        let r = &set.as_slice()[pos];
                        if seen.insert(r) {
                            comp.push(r.clone());
                            queue.push(r);
                        }
                    }
                }
            }
            let interior = VertexSet::new(comp);
            let support = support_edges(&interior, k);
            out.push(Subcontour {
                mark,
                interior,
                support,
            });
        }
    }
    out.sort_by_key(|a| a.id_key());
    out
}

/// Edges with exactly one endpoint in the set (the cut around it); for a
/// single vertex this is all of its incident edges.
fn support_edges(interior: &VertexSet, k: u8) -> Vec<Edge> {
    let mut edges = Vec::new();
    for v in interior.iter() {
        if let Some(p) = v.parent() {
            if !interior.contains(&p) {
                edges.push(Edge { child: v.clone() });
            }
        }
        for c in v.children(k) {
            if !interior.contains(&c) {
                edges.push(Edge { child: c });
            }
        }
    }
    edges.sort();
    edges
}

/// Canonical identity of a contour: its sorted (mark, interior) pairs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ContourId(pub Vec<(Spin, Vec<Vertex>)>);

/// A maximal set of subcontours pairwise connected under the
/// distance-`2(r'-1)` adjacency.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Contour {
    pub subcontours: Vec<Subcontour>,
}

impl Contour {
    /// Union of the subcontour interiors.
    pub fn interior(&self) -> VertexSet {
        let mut all = VertexSet::empty();
        for t in &self.subcontours {
            all = all.union(&t.interior);
        }
        all
    }

    /// `V(gamma)`: union of the subcontour spans.
    pub fn span(&self) -> VertexSet {
        let mut all = VertexSet::empty();
        for t in &self.subcontours {
            all = all.union(&t.span());
        }
        all
    }

    pub fn id(&self) -> ContourId {
        let mut keys: Vec<(Spin, Vec<Vertex>)> =
            self.subcontours.iter().map(|t| t.id_key()).collect();
        keys.sort();
        ContourId(keys)
    }

    pub fn marks(&self) -> Vec<Spin> {
        self.subcontours.iter().map(|t| t.mark).collect()
    }
}

/// Groups subcontours into contours: adjacency holds when the spans come
/// within `2(r'-1)` of each other, so for `r' = 1` exactly when they touch.
pub fn group_contours(subs: Vec<Subcontour>, rprime: usize) -> Vec<Contour> {
    let threshold = 2 * (rprime - 1);
    let n = subs.len();
    let spans: Vec<VertexSet> = subs.iter().map(|t| t.span()).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if spans[i].distance_between(&spans[j]) <= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Subcontour>> = BTreeMap::new();
    for (i, sub) in subs.into_iter().enumerate() {
        groups.entry(find(&mut parent, i)).or_default().push(sub);
    }
    let mut out: Vec<Contour> = groups
        .into_values()
        .map(|mut subcontours| {
            subcontours.sort_by_key(|a| a.id_key());
            Contour { subcontours }
        })
        .collect();
    out.sort_by_key(|c| c.id());
    out
}

/// Full decomposition of a window into contours.
pub fn decompose(w: &SpinWindow, rprime: usize) -> Vec<Contour> {
    group_contours(subcontours(w), rprime)
}

/// `imp(gamma)`: the improper balls meeting the contour, i.e. containing at
/// least one of its support edges. Meeting is by edges, not vertices: a ball
/// holding two support edges pins their contours within `2(r'-1)` of each
/// other, so distinct contours can never share an imp ball, while a ball
/// that only grazes a span vertex stays unassigned. Every improper ball of
/// a window whose spins all minimize as constants still lands in exactly one
/// imp set, because a mixed ball contains a differing adjacent pair and that
/// pair is a support edge.
pub fn imp_balls<'a>(contour: &Contour, boundary: &'a [Ball]) -> Vec<&'a Ball> {
    let edges: Vec<&Edge> = contour
        .subcontours
        .iter()
        .flat_map(|t| t.support.iter())
        .collect();
    boundary
        .iter()
        .filter(|b| {
            edges.iter().any(|e| {
                let (p, c) = e.endpoints();
                b.contains(&p) && b.contains(&c)
            })
        })
        .collect()
}

/// The contour-removal map: resets the interior of `gamma` to the boundary
/// mark. Errors unless `gamma` is one of the window's contours.
pub fn remove_contour(w: &SpinWindow, contour: &Contour, rprime: usize) -> Result<SpinWindow> {
    let id = contour.id();
    if !decompose(w, rprime).iter().any(|c| c.id() == id) {
        return Err(Error::Invalid(
            "contour is not part of the window's decomposition".into(),
        ));
    }
    let mut out = w.clone();
    for v in contour.interior().iter() {
        out.set(v.clone(), w.boundary())?;
    }
    Ok(out)
}

/// The four vertex classes around a contour interior used by the counting
/// argument, plus the minimal connected supergraph.
#[derive(Clone, Debug)]
pub struct InteriorClassification {
    /// Interior vertices farther than `r'` from the complement.
    pub m_minus: VertexSet,
    /// Interior vertices within `r'` of the complement.
    pub m_zero: VertexSet,
    /// Outside vertices within `r'` of the interior.
    pub m_plus: VertexSet,
    /// Vertices of the minimal connected supergraph not in the interior or
    /// its outer boundary.
    pub y_gamma: VertexSet,
    /// Vertex set of the minimal connected subgraph containing the interior.
    pub k_gamma: VertexSet,
}

pub fn classify_interior(contour: &Contour, rprime: usize, k: u8) -> InteriorClassification {
    let interior = contour.interior();
    let mut m_minus = Vec::new();
    let mut m_zero = Vec::new();
    for x in interior.iter() {
        let deep = crate::tree::ball(x, rprime, k)
            .members()
            .iter()
            .all(|y| interior.contains(y));
        if deep {
            m_minus.push(x.clone());
        } else {
            m_zero.push(x.clone());
        }
    }
    let m_plus = vertices_within(&interior, rprime, k).minus(&interior);
    // minimal connected subgraph spanning the interior: union of pairwise
    // geodesics
    let mut span = Vec::new();
    let verts = interior.as_slice();
    for (i, a) in verts.iter().enumerate() {
        span.push(a.clone());
        for b in &verts[i + 1..] {
            span.extend(geodesic(a, b));
        }
    }
    let k_gamma = VertexSet::new(span);
    let y_gamma = k_gamma
        .minus(&interior)
        .minus(&outer_boundary(&interior, k));
    InteriorClassification {
        m_minus: VertexSet::new(m_minus),
        m_zero: VertexSet::new(m_zero),
        m_plus,
        y_gamma,
        k_gamma,
    }
}

/// Enumerates connected vertex sets of the given size containing `root`,
/// delivering each exactly once (exclusive-neighbourhood extension). The
/// `work` counter is charged per recursion step and enforced against `cap`.
fn enumerate_connected_containing(
    root: &Vertex,
    size: usize,
    k: u8,
    work: &mut u128,
    cap: u128,
    emit: &mut dyn FnMut(&[Vertex]),
) -> Result<()> {
    if size == 0 {
        return Ok(());
    }
    let mut sub = vec![root.clone()];
    let ext: Vec<Vertex> = root.neighbors(k);
    let mut closed: HashSet<Vertex> = ext.iter().cloned().collect();
    closed.insert(root.clone());
    extend_connected(&mut sub, ext, &closed, size, k, work, cap, emit)
}

#[allow(clippy::too_many_arguments)]
fn extend_connected(
    sub: &mut Vec<Vertex>,
    mut ext: Vec<Vertex>,
    closed: &HashSet<Vertex>,
    size: usize,
    k: u8,
    work: &mut u128,
    cap: u128,
    emit: &mut dyn FnMut(&[Vertex]),
) -> Result<()> {
    *work += 1;
    if *work > cap {
        return Err(Error::CapExceeded {
            task: "connected subgraph enumeration".into(),
            needed: *work,
            cap,
        });
    }
    if sub.len() == size {
        emit(sub);
        return Ok(());
    }
    while let Some(w) = ext.pop() {
        let mut new_closed = closed.clone();
        let mut new_ext = ext.clone();
        for u in w.neighbors(k) {
            if new_closed.insert(u.clone()) {
                new_ext.push(u);
            }
        }
        sub.push(w);
        extend_connected(sub, new_ext, &new_closed, size, k, work, cap, emit)?;
        sub.pop();
    }
    Ok(())
}

/// Exact number of connected `n`-vertex subgraphs of the ball-adjacency
/// graph containing a fixed ball. That graph is a Cayley tree of the same
/// order (balls correspond to their centers, adjacent exactly when the
/// centers are), so the count is taken on the tree itself.
pub fn connected_ball_subgraph_count(n: usize, k: u8, cap: u128) -> Result<u64> {
    let mut count = 0u64;
    let mut work = 0u128;
    enumerate_connected_containing(&Vertex::root(), n, k, &mut work, cap, &mut |_| {
        count += 1;
    })?;
    Ok(count)
}

/// Independent route to the same counts: coefficients of the generating
/// series. With `B = x(1+B)^k` counting subtrees hanging off one branch,
/// the number of connected `n`-sets containing a fixed vertex is the `x^n`
/// coefficient of `x(1+B)^{k+1}`.
pub fn subtree_count_series(n_max: usize, k: u8) -> Vec<u128> {
    let mul = |a: &[u128], b: &[u128]| -> Vec<u128> {
        let mut out = vec![0u128; n_max + 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if i + j <= n_max {
                    out[i + j] += x * y;
                }
            }
        }
        out
    };
    let pow = |base: &[u128], e: u8| -> Vec<u128> {
        let mut acc = vec![0u128; n_max + 1];
        acc[0] = 1;
        for _ in 0..e {
            acc = mul(&acc, base);
        }
        acc
    };
    let mut branch = vec![0u128; n_max + 1];
    for _ in 0..=n_max {
        // B = x (1 + B)^k, iterated to the fixed point degree by degree
        let mut one_plus = branch.clone();
        one_plus[0] += 1;
        let p = pow(&one_plus, k);
        let mut next = vec![0u128; n_max + 1];
        next[1..].copy_from_slice(&p[..n_max]);
        branch = next;
    }
    let mut one_plus = branch.clone();
    one_plus[0] += 1;
    let p = pow(&one_plus, k + 1);
    let mut series = vec![0u128; n_max + 1];
    series[1..].copy_from_slice(&p[..n_max]);
    series
}

/// The published constants of the contour-count bound `N_l(x) <= C0 * theta^l`.
pub fn contour_bound_constants(k: u8, rprime: usize) -> (u64, f64) {
    let kk = k as u64;
    let c0 = 1 + (kk + 1) * (kk.pow(rprime as u32) - 1) / (kk - 1);
    let exponent = 2 * (kk + 1) * (rprime as u64 - 1) * kk.pow(rprime as u32 - 1) + 2;
    let theta = (2.0 * std::f64::consts::E * kk as f64).powi(exponent as i32);
    (c0, theta)
}

/// Result of the exact contour enumeration at one size.
#[derive(Clone, Debug)]
pub struct ContourCountReport {
    pub l: usize,
    pub count: u64,
    pub c0: u64,
    pub theta: f64,
    pub bound: f64,
    pub contours: Vec<Contour>,
}

/// Counts, exactly, the distinct contours `gamma` with `x` in `V(gamma)`
/// and `|imp gamma| = l`, for one fixed boundary mark. Contours are
/// enumerated through their interiors: families of disjoint marked
/// components chained within the grouping reach, each realized standalone
/// and decomposed; the counted objects are the canonical contour
/// identities. The interior budget comes from the rigorous size relations
/// (every interior vertex near the outside owns a distinct improper ball,
/// and for q = 2 the leaf and outer-boundary counts sharpen this), so the
/// enumeration is exhaustive; the work cap is the safety valve.
pub fn count_contours(
    model: &BallModel,
    spec: &SpectrumReport,
    x: &Vertex,
    l: usize,
    boundary: Spin,
    work_cap: u128,
) -> Result<ContourCountReport> {
    if !spec.is_ground_spin(boundary) {
        return Err(Error::Invalid(format!(
            "boundary mark {boundary} is not a ground-state spin"
        )));
    }
    let k = model.k();
    let q = model.q();
    let rp = model.rprime();
    let (c0, theta) = contour_bound_constants(k, rp);
    let bound = c0 as f64 * theta.powi(l as i32);
    let mut report = ContourCountReport {
        l,
        count: 0,
        c0,
        theta,
        bound,
        contours: Vec::new(),
    };
    if l == 0 {
        return Ok(report);
    }
    // Size budget. For a standalone contour, every interior vertex within
    // r' of the outside and every outer-boundary vertex of the interior
    // owns a distinct imp ball. Group the interior into chunks (maximal
    // connected pieces of the union; components of different marks may
    // touch inside one chunk, chunks sit pairwise at distance >= 2). Each
    // chunk keeps its leaves in M0 and the largest chunk keeps its whole
    // outer boundary in M+, giving the monotone lower bound
    //   sum_chunks (size == 1 ? 1 : 2) + (k-1) * max_chunk + 2  <=  l,
    // which caps every chunk at (l-2)/(k-1) vertices.
    let kk = k as usize;
    let chunk_cap = l.saturating_sub(2) / (kk - 1);
    if chunk_cap == 0 {
        return Ok(report);
    }
    let marks: Vec<Spin> = (1..=q).filter(|&s| s != boundary).collect();
    let mut work: u128 = 0;
    let mut explored: HashSet<Vec<(Vertex, Spin)>> = HashSet::new();
    let mut found: HashMap<ContourId, Contour> = HashMap::new();
    // chunks are enumerated as (connected set, mark assignment) pairs
    type MarkedChunk = (VertexSet, Vec<Spin>);
    let assignments = |set: &VertexSet, marks: &[Spin]| -> Vec<Vec<Spin>> {
        let m = set.len();
        let mut out = Vec::new();
        let mut idx = vec![0usize; m];
        loop {
            out.push(idx.iter().map(|&i| marks[i]).collect());
            let mut t = 0;
            loop {
                if t == m {
                    break;
                }
                if idx[t] + 1 < marks.len() {
                    idx[t] += 1;
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
            if t == m {
                break;
            }
        }
        out
    };
    let chunk_lb = |family: &[MarkedChunk]| -> usize {
        let leaf_terms: usize = family
            .iter()
            .map(|(s, _)| if s.len() >= 2 { 2 } else { 1 })
            .sum();
        let max_n = family.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
        leaf_terms + kk.saturating_sub(1) * max_n + 2
    };
    let gs_indices: Vec<usize> = spec
        .gs_spins
        .iter()
        .map(|&s| model.constant_index(s))
        .collect();
    // per-vertex memo of connected sets through that vertex
    let mut sets_through: HashMap<Vertex, Vec<VertexSet>> = HashMap::new();
    let mut sets_at = |z: &Vertex, work: &mut u128| -> Result<Vec<VertexSet>> {
        if let Some(cached) = sets_through.get(z) {
            return Ok(cached.clone());
        }
        let mut out = Vec::new();
        for size in 1..=chunk_cap {
            enumerate_connected_containing(z, size, k, work, work_cap, &mut |verts| {
                out.push(VertexSet::new(verts.to_vec()));
            })?;
        }
        sets_through.insert(z.clone(), out.clone());
        Ok(out)
    };
    let collect_zone = |zone: &VertexSet,
                        sets_at: &mut dyn FnMut(&Vertex, &mut u128) -> Result<Vec<VertexSet>>,
                        work: &mut u128|
     -> Result<Vec<VertexSet>> {
        let mut seen: HashSet<VertexSet> = HashSet::new();
        let mut out = Vec::new();
        for z in zone.iter() {
            for set in sets_at(z, work)? {
                if seen.insert(set.clone()) {
                    out.push(set);
                }
            }
        }
        Ok(out)
    };
    // seed chunks must touch the closed 1-neighbourhood of x, since every
    // vertex of V(gamma) is within distance 1 of the interior
    let seed_zone = vertices_within(&VertexSet::singleton(x.clone()), 1, k);
    let seeds = collect_zone(&seed_zone, &mut sets_at, &mut work)?;
    let mut stack: Vec<Vec<MarkedChunk>> = Vec::new();
    for set in &seeds {
        for assign in assignments(set, &marks) {
            stack.push(vec![(set.clone(), assign)]);
        }
    }
    while let Some(family) = stack.pop() {
        let mut key: Vec<(Vertex, Spin)> = family
            .iter()
            .flat_map(|(s, a)| s.iter().cloned().zip(a.iter().copied()))
            .collect();
        key.sort();
        if !explored.insert(key) {
            continue;
        }
        let lb = chunk_lb(&family);
        if lb > l {
            continue;
        }
        // decompose the family standalone: the subcontours are exactly the
        // same-mark components within each chunk
        let spin_of: HashMap<Vertex, Spin> = family
            .iter()
            .flat_map(|(s, a)| s.iter().cloned().zip(a.iter().copied()))
            .collect();
        let mut subs = Vec::new();
        for (set, assign) in &family {
            let mut remaining: Vec<usize> = (0..set.len()).collect();
            while let Some(&start) = remaining.first() {
                let mark = assign[start];
                let mut comp = vec![set.as_slice()[start].clone()];
                let mut queue = vec![set.as_slice()[start].clone()];
                let mut in_comp: HashSet<usize> = [start].into();
                while let Some(v) = queue.pop() {
                    for nb in v.neighbors(k) {
                        if let Ok(pos) = set.as_slice().binary_search(&nb) {
                            if assign[pos] == mark && in_comp.insert(pos) {
                                comp.push(nb.clone());
                                queue.push(nb);
                            }
                        }
                    }
                }
                remaining.retain(|i| !in_comp.contains(i));
                subs.push(Subcontour::from_interior(
                    mark,
                    VertexSet::new(comp),
                    k,
                )?);
            }
        }
        let contours = group_contours(subs, rp);
        if contours.len() == 1 {
            let gamma = &contours[0];
            if gamma.span().contains(x) {
                // improper balls of the standalone configuration live within
                // r' of the interior; everything farther is constant
                let mut union = VertexSet::empty();
                for (s, _) in &family {
                    union = union.union(s);
                }
                let mut boundary_balls = Vec::new();
                for center in vertices_within(&union, rp, k).iter() {
                    let b = crate::tree::ball(center, rp, k);
                    let idx = model.config_index(
                        b.members()
                            .iter()
                            .map(|v| spin_of.get(v).copied().unwrap_or(boundary)),
                    );
                    if !gs_indices.contains(&idx) {
                        boundary_balls.push(b);
                    }
                }
                let imp = imp_balls(gamma, &boundary_balls);
                if imp.len() == l {
                    found.entry(gamma.id()).or_insert_with(|| gamma.clone());
                }
            }
        }
        // extensions: a new chunk must sit within grouping reach of the
        // existing interior while staying detached from every chunk; the
        // cheapest chunk raises the lower bound by one, so a saturated
        // family needs no extension pass
        if lb + 1 > l {
            continue;
        }
        let mut union = VertexSet::empty();
        for (s, _) in &family {
            union = union.union(s);
        }
        let zone = vertices_within(&union, 2 * rp, k);
        let candidates = collect_zone(&zone, &mut sets_at, &mut work)?;
        'cand: for set in &candidates {
            for (s, _) in &family {
                if set.distance_between(s) < 2 {
                    continue 'cand;
                }
            }
            for assign in assignments(set, &marks) {
                let mut next = family.clone();
                next.push((set.clone(), assign));
                if chunk_lb(&next) <= l {
                    stack.push(next);
                }
            }
        }
    }
    let mut contours: Vec<Contour> = found.into_values().collect();
    contours.sort_by_key(|c| c.id());
    report.count = contours.len() as u64;
    report.contours = contours;
    Ok(report)
}

/// Sweeps every configuration on `V_n` with the given boundary mark and
/// returns the canonical ids of all contours of size `l` containing `x`
/// seen across the sweep. Used to cross-check the interior enumeration.
pub fn sweep_contour_ids(
    model: &BallModel,
    spec: &SpectrumReport,
    n: usize,
    boundary: Spin,
    l: usize,
    x: &Vertex,
    cap: u128,
) -> Result<HashSet<ContourId>> {
    let k = model.k();
    let q = model.q();
    let verts: Vec<Vertex> = volume(n, k).iter().cloned().collect();
    let total = (q as u128)
        .checked_pow(verts.len() as u32)
        .ok_or(Error::CapExceeded {
            task: "window sweep".into(),
            needed: u128::MAX,
            cap,
        })?;
    if total > cap {
        return Err(Error::CapExceeded {
            task: format!("window sweep over {} vertices", verts.len()),
            needed: total,
            cap,
        });
    }
    let mut ids = HashSet::new();
    let mut spins = vec![1 as Spin; verts.len()];
    loop {
        let mut w = SpinWindow::constant(n, k, boundary);
        for (v, &s) in verts.iter().zip(spins.iter()) {
            w.set(v.clone(), s)?;
        }
        let contours = decompose(&w, model.rprime());
        if !contours.is_empty() {
            let bd = improper_balls(model, spec, &w)?;
            for c in &contours {
                if c.span().contains(x) && imp_balls(c, &bd.improper).len() == l {
                    ids.insert(c.id());
                }
            }
        }
        let mut t = 0;
        loop {
            if t == spins.len() {
                break;
            }
            if spins[t] < q {
                spins[t] += 1;
                break;
            }
            spins[t] = 1;
            t += 1;
        }
        if t == spins.len() {
            break;
        }
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::spectrum;
    use crate::potential::{generalized_kronecker, DEFAULT_ENUM_CAP};
    use crate::Rational;

    fn rat(s: &str) -> Rational {
        crate::parse_rational(s).unwrap()
    }

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn kron_q2() -> (BallModel, SpectrumReport) {
        let m = generalized_kronecker(rat("1"), 1, 2, 2, DEFAULT_ENUM_CAP).unwrap();
        let sp = spectrum(&m);
        (m, sp)
    }

    #[test]
    fn constant_window_no_boundary_edges() {
        let w = SpinWindow::constant(2, 2, 1);
        assert!(edge_boundary(&w).is_empty());
        assert!(subcontours(&w).is_empty());
    }

    #[test]
    fn single_flip_edges_and_subcontour() {
        let mut w = SpinWindow::constant(2, 2, 1);
        w.set(Vertex::root(), 2).unwrap();
        let edges = edge_boundary(&w);
        assert_eq!(edges.len(), 3);
        let subs = subcontours(&w);
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].mark, 2);
        assert_eq!(subs[0].interior.len(), 1);
        assert_eq!(subs[0].support.len(), 3);
    }

    #[test]
    fn rim_flip_has_one_inner_and_k_outer_edges() {
        let mut w = SpinWindow::constant(2, 2, 1);
        let rim = v("1.2");
        w.set(rim.clone(), 2).unwrap();
        let edges = edge_boundary(&w);
        assert_eq!(edges.len(), 3);
        let inner = edges.iter().filter(|e| e.within(2)).count();
        assert_eq!(inner, 1);
    }

    #[test]
    fn distant_flips_make_two_subcontours_and_contours() {
        let mut w = SpinWindow::constant(2, 2, 1);
        w.set(v("1.2"), 2).unwrap();
        w.set(v("3.2"), 2).unwrap();
        let subs = subcontours(&w);
        assert_eq!(subs.len(), 2);
        let sup0 = &subs[0].support;
        let sup1 = &subs[1].support;
        assert!(sup0.iter().all(|e| !sup1.contains(e)));
        let contours = decompose(&w, 1);
        assert_eq!(contours.len(), 2);
    }

    #[test]
    fn touching_flips_group_into_one_contour() {
        // two flips at distance 2 share a span vertex, so they interact
        let mut w = SpinWindow::constant(2, 2, 1);
        w.set(v("1"), 2).unwrap();
        w.set(v("2"), 2).unwrap();
        let subs = subcontours(&w);
        assert_eq!(subs.len(), 2);
        let contours = decompose(&w, 1);
        assert_eq!(contours.len(), 1);
        assert_eq!(contours[0].subcontours.len(), 2);
    }

    #[test]
    fn separated_flips_stay_separate_contours() {
        // distance 1 between spans means no interaction at r' = 1
        let mut w = SpinWindow::constant(3, 2, 1);
        w.set(v("1"), 2).unwrap();
        w.set(v("2.1"), 2).unwrap();
        let spans: Vec<VertexSet> = subcontours(&w).iter().map(|t| t.span()).collect();
        assert_eq!(spans[0].distance_between(&spans[1]), 1);
        assert_eq!(decompose(&w, 1).len(), 2);
        // at r' = 2 the same pair would group
        assert_eq!(decompose(&w, 2).len(), 1);
    }

    #[test]
    fn grouping_threshold_is_exact_at_rprime_two() {
        // span distance exactly 2: grouped at r' = 2, separate at r' = 1
        let mut w = SpinWindow::constant(4, 2, 1);
        w.set(v("1"), 2).unwrap();
        w.set(v("2.1.2"), 2).unwrap();
        let spans: Vec<VertexSet> = subcontours(&w).iter().map(|t| t.span()).collect();
        assert_eq!(spans[0].distance_between(&spans[1]), 2);
        assert_eq!(decompose(&w, 1).len(), 2);
        assert_eq!(decompose(&w, 2).len(), 1);
        // span distance 3 stays separate even at r' = 2
        let mut w = SpinWindow::constant(4, 2, 1);
        w.set(v("1"), 2).unwrap();
        w.set(v("2.1.2.1"), 2).unwrap();
        let spans: Vec<VertexSet> = subcontours(&w).iter().map(|t| t.span()).collect();
        assert_eq!(spans[0].distance_between(&spans[1]), 3);
        assert_eq!(decompose(&w, 2).len(), 2);
    }

    #[test]
    fn removal_energy_difference_is_the_imp_excess() {
        // the conditional-energy drop under removal is exactly the summed
        // excess of the removed contour's imp balls
        let (m, sp) = kron_q2();
        let mut w = SpinWindow::constant(3, 2, 1);
        w.set(Vertex::root(), 2).unwrap();
        w.set(v("1"), 2).unwrap();
        w.set(v("2.1.2"), 2).unwrap();
        let contours = decompose(&w, 1);
        assert_eq!(contours.len(), 2);
        let bd = improper_balls(&m, &sp, &w).unwrap();
        for gamma in &contours {
            let removed = remove_contour(&w, gamma, 1).unwrap();
            let diff = m.conditional_energy(&w).unwrap() - m.conditional_energy(&removed).unwrap();
            let mut excess = rat("0");
            for b in imp_balls(gamma, &bd.improper) {
                excess += m.energy(m.ball_config_index(&w, b)) - &sp.u_min;
            }
            assert_eq!(diff, excess);
        }
    }

    #[test]
    fn single_flip_imp_size() {
        let (m, sp) = kron_q2();
        let mut w = SpinWindow::constant(2, 2, 1);
        w.set(Vertex::root(), 2).unwrap();
        let contours = decompose(&w, 1);
        assert_eq!(contours.len(), 1);
        let bd = improper_balls(&m, &sp, &w).unwrap();
        assert_eq!(imp_balls(&contours[0], &bd.improper).len(), 4);
    }

    #[test]
    fn removal_restores_constant_window() {
        let (m, sp) = kron_q2();
        let mut w = SpinWindow::constant(2, 2, 1);
        w.set(Vertex::root(), 2).unwrap();
        let contours = decompose(&w, 1);
        let removed = remove_contour(&w, &contours[0], 1).unwrap();
        assert!(removed.is_constant());
        let bd_before = improper_balls(&m, &sp, &w).unwrap();
        let bd_after = improper_balls(&m, &sp, &removed).unwrap();
        assert_eq!(bd_before.len(), 4);
        assert_eq!(bd_after.len(), 0);
    }

    #[test]
    fn removal_rejects_foreign_contour() {
        let w = SpinWindow::constant(2, 2, 1);
        let mut other = SpinWindow::constant(2, 2, 1);
        other.set(Vertex::root(), 2).unwrap();
        let gamma = decompose(&other, 1).pop().unwrap();
        assert!(remove_contour(&w, &gamma, 1).is_err());
    }

    #[test]
    fn classification_of_single_vertex_interior() {
        let mut w = SpinWindow::constant(1, 2, 1);
        w.set(Vertex::root(), 2).unwrap();
        let gamma = decompose(&w, 1).pop().unwrap();
        let cls = classify_interior(&gamma, 1, 2);
        assert!(cls.m_minus.is_empty());
        assert_eq!(cls.m_zero.len(), 1);
        assert_eq!(cls.m_plus.len(), 3);
        assert!(cls.y_gamma.is_empty());
        assert_eq!(cls.m_minus.len() + cls.m_zero.len(), gamma.interior().len());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn ball_subgraph_counts_match_series() {
        let cap = 1 << 24;
        let series = subtree_count_series(8, 2);
        assert_eq!(connected_ball_subgraph_count(1, 2, cap).unwrap(), 1);
        assert_eq!(connected_ball_subgraph_count(2, 2, cap).unwrap(), 3);
        for n in 1..=8 {
            let enumerated = connected_ball_subgraph_count(n, 2, cap).unwrap();
            assert_eq!(enumerated as u128, series[n], "n = {n}");
            let bound = (std::f64::consts::E * 2.0).powi(n as i32);
            assert!((enumerated as f64) <= bound);
        }
    }

    #[test]
    fn bound_constants() {
        let (c0, theta) = contour_bound_constants(2, 1);
        assert_eq!(c0, 4);
        let want = (4.0 * std::f64::consts::E).powi(2);
        assert!((theta - want).abs() < 1e-12);
    }

    #[test]
    fn count_contours_small_sizes() {
        let (m, sp) = kron_q2();
        let cap = 1 << 26;
        // below the minimum achievable size
        for l in 0..4 {
            let rep = count_contours(&m, &sp, &Vertex::root(), l, 1, cap).unwrap();
            assert_eq!(rep.count, 0, "l = {l}");
        }
        // single flips at the root or a neighbour
        let rep = count_contours(&m, &sp, &Vertex::root(), 4, 1, cap).unwrap();
        assert_eq!(rep.count, 4);
        assert!((rep.count as f64) <= rep.bound);
        // l = 5 is not realizable
        let rep = count_contours(&m, &sp, &Vertex::root(), 5, 1, cap).unwrap();
        assert_eq!(rep.count, 0);
    }

    #[test]
    fn count_contours_cross_checked_by_sweep() {
        let (m, sp) = kron_q2();
        let cap = 1 << 26;
        for l in [4usize, 6] {
            let rep = count_contours(&m, &sp, &Vertex::root(), l, 1, cap).unwrap();
            // restrict to contours realizable inside V_2, then compare with
            // the exhaustive configuration sweep at n = 2
            let within: HashSet<ContourId> = rep
                .contours
                .iter()
                .filter(|c| c.interior().iter().all(|u| u.depth() <= 2))
                .map(|c| c.id())
                .collect();
            let swept = sweep_contour_ids(&m, &sp, 2, 1, l, &Vertex::root(), 1 << 20).unwrap();
            assert_eq!(within, swept, "l = {l}");
        }
    }
}
