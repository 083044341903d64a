//! The Cayley tree of order `k` addressed by reduced group words.
//!
//! Vertices are words over generators `a_1..a_{k+1}` with `a_i^2 = e`, so a
//! reduced word never repeats a letter twice in a row. The empty word is the
//! root. Right multiplication by a generator steps to a neighbour, left
//! multiplication by a fixed word is a graph automorphism. Nothing here ever
//! materializes the infinite tree; only vertices reachable from the inputs
//! are created.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use smallvec::SmallVec;

use crate::{Error, Result};

type Word = SmallVec<[u8; 16]>;

/// A vertex of the Cayley tree: a reduced word of generator indices,
/// each in `1..=k+1`. The root is the empty word.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Vertex {
    word: Word,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex { word: Word::new() }
    }

    /// Builds a vertex from generator indices, rejecting non-reduced words.
    pub fn from_letters(letters: &[u8]) -> Result<Self> {
        for (i, &l) in letters.iter().enumerate() {
            if l == 0 {
                return Err(Error::InvalidVertex("generator indices start at 1".into()));
            }
            if i > 0 && letters[i - 1] == l {
                return Err(Error::InvalidVertex(format!(
                    "word is not reduced: repeated generator {l}"
                )));
            }
        }
        Ok(Vertex {
            word: Word::from_slice(letters),
        })
    }

    pub fn letters(&self) -> &[u8] {
        &self.word
    }

    /// Word length, which equals the distance to the root.
    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    /// Largest generator index used, for validating a vertex against an order `k`.
    pub fn max_letter(&self) -> u8 {
        self.word.iter().copied().max().unwrap_or(0)
    }

    /// Right multiplication by generator `gen`: one step along the tree.
    pub fn step(&self, gen: u8) -> Vertex {
        let mut w = self.word.clone();
        if w.last() == Some(&gen) {
            w.pop();
        } else {
            w.push(gen);
        }
        Vertex { word: w }
    }

    /// The neighbour closer to the root (drop the last letter).
    pub fn parent(&self) -> Option<Vertex> {
        if self.word.is_empty() {
            None
        } else {
            let mut w = self.word.clone();
            w.pop();
            Some(Vertex { word: w })
        }
    }

    /// All `k+1` neighbours, in generator order.
    pub fn neighbors(&self, k: u8) -> Vec<Vertex> {
        (1..=k + 1).map(|g| self.step(g)).collect()
    }

    /// Neighbours farther from the root: every generator except the last
    /// letter. The root has `k+1` children, everything else has `k`.
    pub fn children(&self, k: u8) -> Vec<Vertex> {
        let skip = self.word.last().copied();
        (1..=k + 1)
            .filter(|g| Some(*g) != skip)
            .map(|g| self.step(g))
            .collect()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.word.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" {
            return Ok(Vertex::root());
        }
        let letters: Vec<u8> = s
            .split('.')
            .map(|p| {
                p.parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad generator index '{p}' in vertex '{s}'")))
            })
            .collect::<Result<_>>()?;
        Vertex::from_letters(&letters)
    }
}

/// Length-lexicographic order: by depth first, then by letters. This is the
/// canonical order used for every vertex listing in the crate.
impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Tree distance: `d(x,y) = |x| + |y| - 2*(common prefix)`, since words are
/// root-anchored paths and the deepest common ancestor is the common prefix.
pub fn distance(x: &Vertex, y: &Vertex) -> usize {
    let common = x
        .word
        .iter()
        .zip(y.word.iter())
        .take_while(|(a, b)| a == b)
        .count();
    x.word.len() + y.word.len() - 2 * common
}

/// Left shift `g·x` with reduction at the junction; an isometry of the tree.
pub fn translate(x: &Vertex, g: &Vertex) -> Vertex {
    let mut w = g.word.clone();
    for &l in x.word.iter() {
        if w.last() == Some(&l) {
            w.pop();
        } else {
            w.push(l);
        }
    }
    Vertex { word: w }
}

/// Inverse word (reversal; each generator is its own inverse).
pub fn inverse(x: &Vertex) -> Vertex {
    let mut w = Word::with_capacity(x.word.len());
    for &l in x.word.iter().rev() {
        w.push(l);
    }
    Vertex { word: w }
}

/// The geodesic from `x` to `y` inclusive: climb to the common ancestor,
/// then descend.
pub fn geodesic(x: &Vertex, y: &Vertex) -> Vec<Vertex> {
    let common = x
        .word
        .iter()
        .zip(y.word.iter())
        .take_while(|(a, b)| a == b)
        .count();
    let mut path = Vec::with_capacity(distance(x, y) + 1);
    let mut up = x.clone();
    while up.word.len() > common {
        path.push(up.clone());
        up = up.parent().expect("non-root while climbing");
    }
    path.push(up);
    for i in common..y.word.len() {
        let next = path.last().unwrap().step(y.word[i]);
        path.push(next);
    }
    path
}

/// A sorted, duplicate-free set of vertices in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct VertexSet {
    items: Vec<Vertex>,
}

impl VertexSet {
    pub fn new(mut items: Vec<Vertex>) -> Self {
        items.sort();
        items.dedup();
        VertexSet { items }
    }

    pub fn empty() -> Self {
        VertexSet { items: Vec::new() }
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet { items: vec![v] }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.items.binary_search(v).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vertex> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.items
    }

    pub fn insert(&mut self, v: Vertex) {
        if let Err(pos) = self.items.binary_search(&v) {
            self.items.insert(pos, v);
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut items = self.items.clone();
        items.extend_from_slice(&other.items);
        VertexSet::new(items)
    }

    pub fn minus(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            items: self
                .items
                .iter()
                .filter(|v| !other.contains(v))
                .cloned()
                .collect(),
        }
    }

    /// Max pairwise distance; 0 for singletons and the empty set.
    pub fn diameter(&self) -> usize {
        let mut best = 0;
        for (i, x) in self.items.iter().enumerate() {
            for y in &self.items[i + 1..] {
                best = best.max(distance(x, y));
            }
        }
        best
    }

    /// Min distance from `v` to the set. Panics on an empty set.
    pub fn distance_to(&self, v: &Vertex) -> usize {
        self.items
            .iter()
            .map(|a| distance(v, a))
            .min()
            .expect("distance to empty set")
    }

    /// Min distance between two nonempty sets.
    pub fn distance_between(&self, other: &VertexSet) -> usize {
        self.items
            .iter()
            .map(|a| other.distance_to(a))
            .min()
            .expect("distance between empty sets")
    }

    /// Whether the set induces a connected subgraph, checked by traversal.
    pub fn is_connected(&self, k: u8) -> bool {
        if self.items.len() <= 1 {
            return !self.items.is_empty();
        }
        let mut seen: HashSet<&Vertex> = HashSet::new();
        let mut queue = VecDeque::new();
        queue.push_back(&self.items[0]);
        seen.insert(&self.items[0]);
        while let Some(v) = queue.pop_front() {
            for nb in v.neighbors(k) {
                if let Ok(pos) = self.items.binary_search(&nb) {
                    let r = &self.items[pos];
                    if seen.insert(r) {
                        queue.push_back(r);
                    }
                }
            }
        }
        seen.len() == self.items.len()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// A metric ball `{y : d(center, y) <= rprime}`. Members are kept in the
/// canonical breadth-first order from the center, children visited in
/// generator order; index `t` of the member list lines up across balls
/// related by translation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ball {
    pub center: Vertex,
    pub rprime: usize,
    members: Vec<Vertex>,
}

impl Ball {
    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        distance(&self.center, v) <= self.rprime
    }

    pub fn meets(&self, set: &VertexSet) -> bool {
        !set.is_empty() && set.distance_to(&self.center) <= self.rprime
    }
}

/// The metric ball around `center` of radius `rprime >= 1` on the order-`k` tree.
pub fn ball(center: &Vertex, rprime: usize, k: u8) -> Ball {
    assert!(rprime >= 1, "ball radius must be >= 1");
    let mut members = Vec::with_capacity(ball_size(k, rprime));
    let mut seen: HashSet<Vertex> = HashSet::new();
    let mut queue = VecDeque::new();
    queue.push_back((center.clone(), 0usize));
    seen.insert(center.clone());
    while let Some((v, d)) = queue.pop_front() {
        members.push(v.clone());
        if d == rprime {
            continue;
        }
        for g in 1..=k + 1 {
            let nb = v.step(g);
            if seen.insert(nb.clone()) {
                queue.push_back((nb, d + 1));
            }
        }
    }
    Ball {
        center: center.clone(),
        rprime,
        members,
    }
}

/// `1 + (k+1)(k^{r'} - 1)/(k - 1)`, the member count of any radius-`r'` ball.
pub fn ball_size(k: u8, rprime: usize) -> usize {
    let k = k as usize;
    1 + (k + 1) * (k.pow(rprime as u32) - 1) / (k - 1)
}

/// `V_n`, all vertices within distance `n` of the root, in canonical order.
pub fn volume(n: usize, k: u8) -> VertexSet {
    let mut items = vec![Vertex::root()];
    let mut frontier = vec![Vertex::root()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(frontier.len() * k as usize);
        for v in &frontier {
            next.extend(v.children(k));
        }
        items.extend_from_slice(&next);
        frontier = next;
    }
    VertexSet::new(items)
}

/// `W_n`, the sphere at distance exactly `n`.
pub fn sphere(n: usize, k: u8) -> VertexSet {
    let mut frontier = vec![Vertex::root()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(frontier.len() * k as usize);
        for v in &frontier {
            next.extend(v.children(k));
        }
        frontier = next;
    }
    VertexSet::new(frontier)
}

/// `D(A)`: vertices outside `A` adjacent to some vertex of `A`.
pub fn outer_boundary(a: &VertexSet, k: u8) -> VertexSet {
    let mut out = Vec::new();
    for v in a.iter() {
        for nb in v.neighbors(k) {
            if !a.contains(&nb) {
                out.push(nb);
            }
        }
    }
    VertexSet::new(out)
}

/// `C(A)`: every ball whose member set meets `A`, found by scanning all
/// candidate centers within distance `rprime` of `A`.
pub fn intersecting_balls(a: &VertexSet, rprime: usize, k: u8) -> Vec<Ball> {
    let centers = vertices_within(a, rprime, k);
    centers
        .iter()
        .map(|c| ball(c, rprime, k))
        .collect()
}

/// All vertices within distance `d` of the set `A` (including `A` itself).
pub fn vertices_within(a: &VertexSet, d: usize, k: u8) -> VertexSet {
    if d == 0 {
        return a.clone();
    }
    let mut items: Vec<Vertex> = a.iter().cloned().collect();
    let mut seen: HashSet<Vertex> = items.iter().cloned().collect();
    let mut frontier = items.clone();
    for _ in 0..d {
        let mut next = Vec::new();
        for v in &frontier {
            for g in 1..=k + 1 {
                let nb = v.step(g);
                if seen.insert(nb.clone()) {
                    next.push(nb);
                }
            }
        }
        items.extend_from_slice(&next);
        frontier = next;
    }
    VertexSet::new(items)
}

/// The closed form `k^{r'-1}((k-1)n + 2)` together with the recurrence
/// iterates `u_0..u_{r'}` from `u_l = 2 + (k-1) * sum(u_0..u_{l-1})`.
/// This is the published count for `|C(V(K))|`; the brute-force count from
/// [`intersecting_balls`] is deliberately kept separate (the two disagree,
/// see `lemma44` reports).
pub fn lemma44_formula(n: u64, k: u8, rprime: usize) -> (u64, Vec<u64>) {
    let kk = k as u64;
    let closed = kk.pow(rprime as u32 - 1) * ((kk - 1) * n + 2);
    let mut iterates = vec![n];
    let mut sum = n;
    for _ in 1..=rprime {
        let next = 2 + (kk - 1) * sum;
        iterates.push(next);
        sum += next;
    }
    (closed, iterates)
}

/// `n(A)`: the number of balls of radius `r' = floor((r+1)/2)` containing `A`.
/// Rejects sets of diameter above `r`, for which no covering ball is required
/// to exist.
pub fn covering_multiplicity(a: &VertexSet, r: usize, k: u8) -> Result<u64> {
    if a.is_empty() {
        return Err(Error::InvalidVertex("covering multiplicity of empty set".into()));
    }
    let diam = a.diameter();
    if diam > r {
        return Err(Error::DiameterExceedsRange { diam, r });
    }
    let rprime = r.div_ceil(2);
    let candidates = ball(a.iter().next().unwrap(), rprime, k);
    let count = candidates
        .members()
        .iter()
        .filter(|c| a.iter().all(|v| distance(c, v) <= rprime))
        .count() as u64;
    Ok(count)
}

/// Grows a random connected subgraph of the given size by repeatedly
/// adjoining a uniformly random outer-boundary vertex. Uniformity over
/// subgraphs is not attempted, only connectivity.
pub fn random_connected<R: Rng>(k: u8, size: usize, start: Vertex, rng: &mut R) -> VertexSet {
    let mut set = VertexSet::singleton(start);
    while set.len() < size {
        let boundary = outer_boundary(&set, k);
        let pick = rng.gen_range(0..boundary.len());
        set.insert(boundary.as_slice()[pick].clone());
    }
    set
}
