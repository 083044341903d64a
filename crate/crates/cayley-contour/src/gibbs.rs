//! Exact finite-volume Gibbs measures with constant boundary conditions.
//!
//! Two engines compute the same quantities. Full enumeration tallies the
//! exact rational energy of every window on `V_n` and is the oracle for
//! everything else; it is feasible only for tiny volumes. For `r' = 1` a
//! bottom-up message recursion charges each ball to its center and runs in
//! milliseconds for any practical depth. Energies stay exact until the
//! single conversion to `f64` per `(beta, energy)` pair; all Gibbs sums run
//! in log space.

use std::collections::{BTreeMap, HashSet};

use num::Zero;

use crate::contour::{decompose, imp_balls, remove_contour, Contour};
use crate::ground::{improper_balls, SpectrumReport};
use crate::potential::{BallModel, Spin, SpinWindow};
use crate::tree::{ball, volume, Vertex};
use crate::{rational_to_f64, Error, Rational, Result};

/// Summary of one finite-volume Gibbs evaluation.
#[derive(Clone, Debug)]
pub struct GibbsSummary {
    pub beta: f64,
    pub boundary: Spin,
    pub n: usize,
    pub log_z: f64,
    pub root_marginals: Vec<f64>,
}

/// Exact window-energy multiset for one `(model, n, boundary)` triple,
/// split by the root spin. Reusable across any number of temperatures.
#[derive(Clone, Debug)]
pub struct WindowTally {
    pub n: usize,
    pub boundary: Spin,
    q: Spin,
    /// For each root spin (index `s-1`): sorted distinct energies with
    /// multiplicities.
    by_root: Vec<Vec<(Rational, u64)>>,
}

impl WindowTally {
    /// Merged (energy, count) pairs over all root spins.
    pub fn total(&self) -> Vec<(Rational, u64)> {
        let mut merged: BTreeMap<Rational, u64> = BTreeMap::new();
        for group in &self.by_root {
            for (e, c) in group {
                *merged.entry(e.clone()).or_insert(0) += c;
            }
        }
        merged.into_iter().collect()
    }

    pub fn log_partition(&self, beta: f64) -> f64 {
        log_sum_exp(
            &self
                .total()
                .iter()
                .map(|(e, c)| (*c, rational_to_f64(e) * -beta))
                .collect::<Vec<_>>(),
        )
    }

    /// Probability that the root carries spin `j`.
    pub fn root_marginal(&self, beta: f64, j: Spin) -> f64 {
        let part = log_sum_exp(
            &self.by_root[j as usize - 1]
                .iter()
                .map(|(e, c)| (*c, rational_to_f64(e) * -beta))
                .collect::<Vec<_>>(),
        );
        (part - self.log_partition(beta)).exp()
    }

    pub fn root_marginals(&self, beta: f64) -> Vec<f64> {
        (1..=self.q).map(|j| self.root_marginal(beta, j)).collect()
    }

    pub fn window_count(&self) -> u64 {
        self.by_root.iter().flatten().map(|(_, c)| c).sum()
    }
}

fn log_sum_exp(terms: &[(u64, f64)]) -> f64 {
    let max = terms
        .iter()
        .map(|&(_, x)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|&(c, x)| c as f64 * (x - max).exp()).sum();
    max + sum.ln()
}

/// Precomputed ball layout for window sweeps: for each ball meeting `V_n`,
/// the window slot (or boundary) of each member in canonical order.
struct SweepLayout {
    verts: Vec<Vertex>,
    ball_slots: Vec<Vec<Option<usize>>>,
}

fn sweep_layout(model: &BallModel, n: usize) -> SweepLayout {
    let verts: Vec<Vertex> = volume(n, model.k()).iter().cloned().collect();
    let index: std::collections::HashMap<&Vertex, usize> =
        verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut ball_slots = Vec::new();
    for center in model.conditional_centers(n).iter() {
        let b = ball(center, model.rprime(), model.k());
        ball_slots.push(b.members().iter().map(|m| index.get(m).copied()).collect());
    }
    SweepLayout { verts, ball_slots }
}

/// Enumerates every window on `V_n` and tallies exact energies by root
/// spin. Refuses when `q^{|V_n|}` exceeds the cap.
pub fn enumerate_windows(
    model: &BallModel,
    n: usize,
    boundary: Spin,
    cap: u128,
) -> Result<WindowTally> {
    if boundary < 1 || boundary > model.q() {
        return Err(Error::Invalid(format!(
            "boundary spin {boundary} out of range"
        )));
    }
    let layout = sweep_layout(model, n);
    let q = model.q();
    let count = (q as u128)
        .checked_pow(layout.verts.len() as u32)
        .ok_or(Error::CapExceeded {
            task: "window enumeration".into(),
            needed: u128::MAX,
            cap,
        })?;
    if count > cap {
        return Err(Error::CapExceeded {
            task: format!("window enumeration over {} vertices", layout.verts.len()),
            needed: count,
            cap,
        });
    }
    // fast path: exact integer energies over the table's common denominator
    let scaled = model.scaled().filter(|s| {
        let max = s.nums.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        max.checked_mul(layout.ball_slots.len() as u128).is_some()
    });
    let mut scaled_tallies: Vec<BTreeMap<i128, u64>> = vec![BTreeMap::new(); q as usize];
    let mut big_tallies: Vec<BTreeMap<Rational, u64>> = vec![BTreeMap::new(); q as usize];
    let mut spins = vec![1 as Spin; layout.verts.len()];
    let qq = q as usize;
    loop {
        let root_spin = spins[0];
        match scaled {
            Some(table) => {
                let mut sum = 0i128;
                for slots in &layout.ball_slots {
                    let mut idx = 0usize;
                    let mut place = 1usize;
                    for slot in slots {
                        let s = slot.map(|i| spins[i]).unwrap_or(boundary);
                        idx += (s as usize - 1) * place;
                        place *= qq;
                    }
                    sum += table.nums[idx];
                }
                *scaled_tallies[root_spin as usize - 1]
                    .entry(sum)
                    .or_insert(0) += 1;
            }
            None => {
                let mut sum = Rational::zero();
                for slots in &layout.ball_slots {
                    let mut idx = 0usize;
                    let mut place = 1usize;
                    for slot in slots {
                        let s = slot.map(|i| spins[i]).unwrap_or(boundary);
                        idx += (s as usize - 1) * place;
                        place *= qq;
                    }
                    sum += model.energy(idx);
                }
                *big_tallies[root_spin as usize - 1].entry(sum).or_insert(0) += 1;
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
    let by_root = if let Some(table) = scaled {
        scaled_tallies
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|(num, c)| (Rational::new(num.into(), table.denom.into()), c))
                    .collect()
            })
            .collect()
    } else {
        big_tallies
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect()
    };
    Ok(WindowTally {
        n,
        boundary,
        q,
        by_root,
    })
}

/// Brute-force log partition function: the oracle engine.
pub fn log_partition_enum(
    model: &BallModel,
    n: usize,
    boundary: Spin,
    beta: f64,
    cap: u128,
) -> Result<f64> {
    Ok(enumerate_windows(model, n, boundary, cap)?.log_partition(beta))
}

/// Message-passing engine for `r' = 1`, where every ball is the star of its
/// center. Each ball is charged to its center: the message from the subtree
/// at `x`, conditioned on the spins of `x` and its parent, sums the ball
/// weight at `x` against the children's messages; balls centered on
/// `W_{n+1}` see a single free spin and fold into the leaf initialization.
struct StarDp<'a> {
    model: &'a BallModel,
    n: usize,
    boundary: Spin,
    beta: f64,
    /// running sum of the per-message log normalizers
    log_scale: f64,
}

impl<'a> StarDp<'a> {
    fn new(model: &'a BallModel, n: usize, boundary: Spin, beta: f64) -> Result<Self> {
        if model.rprime() != 1 {
            return Err(Error::Invalid(format!(
                "message passing supports r' = 1 only (model has r' = {}); use the enumeration engine",
                model.rprime()
            )));
        }
        if n < 1 {
            return Err(Error::Invalid("message passing needs n >= 1".into()));
        }
        if boundary < 1 || boundary > model.q() {
            return Err(Error::Invalid(format!(
                "boundary spin {boundary} out of range"
            )));
        }
        Ok(StarDp {
            model,
            n,
            boundary,
            beta,
            log_scale: 0.0,
        })
    }

    /// `exp(-beta U)` for the ball at `center` with the given spin lookup.
    fn ball_weight(&self, center: &Vertex, spin_of: &dyn Fn(&Vertex) -> Spin) -> f64 {
        let b = ball(center, 1, self.model.k());
        let idx = self
            .model
            .config_index(b.members().iter().map(spin_of));
        (-self.beta * rational_to_f64(self.model.energy(idx))).exp()
    }

    /// Message of the subtree rooted at `x` (depth >= 1): indexed by
    /// (parent spin, own spin) as `(u-1) * q + (s-1)`.
    fn message(&mut self, x: &Vertex) -> Vec<f64> {
        let q = self.model.q() as usize;
        let children = x.children(self.model.k());
        let depth = x.depth();
        let mut out = vec![0.0; q * q];
        if depth == self.n {
            // leaf layer: own ball with fixed children, plus each child's
            // boundary ball, which depends on this spin alone
            for u in 1..=self.model.q() {
                for s in 1..=self.model.q() {
                    let spin_of = |v: &Vertex| -> Spin {
                        if v == x {
                            s
                        } else if v.depth() < depth {
                            u
                        } else {
                            self.boundary
                        }
                    };
                    let mut w = self.ball_weight(x, &spin_of);
                    for y in &children {
                        let spin_of_y =
                            |v: &Vertex| -> Spin { if v == x { s } else { self.boundary } };
                        w *= self.ball_weight(y, &spin_of_y);
                    }
                    out[(u as usize - 1) * q + (s as usize - 1)] = w;
                }
            }
        } else {
            let child_msgs: Vec<Vec<f64>> = children.iter().map(|y| self.message(y)).collect();
            for u in 1..=self.model.q() {
                for s in 1..=self.model.q() {
                    let mut total = 0.0;
                    let mut assignment = vec![1 as Spin; children.len()];
                    loop {
                        let spin_of = |v: &Vertex| -> Spin {
                            if v == x {
                                s
                            } else if v.depth() < depth {
                                u
                            } else {
                                let pos = children.iter().position(|c| c == v).unwrap();
                                assignment[pos]
                            }
                        };
                        let mut w = self.ball_weight(x, &spin_of);
                        for (j, msg) in child_msgs.iter().enumerate() {
                            w *= msg[(s as usize - 1) * q + (assignment[j] as usize - 1)];
                        }
                        total += w;
                        let mut t = 0;
                        loop {
                            if t == assignment.len() {
                                break;
                            }
                            if assignment[t] < self.model.q() {
                                assignment[t] += 1;
                                break;
                            }
                            assignment[t] = 1;
                            t += 1;
                        }
                        if t == assignment.len() {
                            break;
                        }
                    }
                    out[(u as usize - 1) * q + (s as usize - 1)] = total;
                }
            }
        }
        // normalize to keep the recursion in range
        let max = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max > 0.0 {
            for v in &mut out {
                *v /= max;
            }
            self.log_scale += max.ln();
        }
        out
    }

    /// Per-root-spin partition weights (relative, with the shared log scale).
    fn root_weights(&mut self) -> Vec<f64> {
        let q = self.model.q() as usize;
        let root = Vertex::root();
        let children = root.children(self.model.k());
        let child_msgs: Vec<Vec<f64>> = children.iter().map(|y| self.message(y)).collect();
        let mut weights = vec![0.0; q];
        for s in 1..=self.model.q() {
            let mut total = 0.0;
            let mut assignment = vec![1 as Spin; children.len()];
            loop {
                let spin_of = |v: &Vertex| -> Spin {
                    if v.is_root() {
                        s
                    } else {
                        let pos = children.iter().position(|c| c == v).unwrap();
                        assignment[pos]
                    }
                };
                let mut w = self.ball_weight(&root, &spin_of);
                for (j, msg) in child_msgs.iter().enumerate() {
                    w *= msg[(s as usize - 1) * q + (assignment[j] as usize - 1)];
                }
                total += w;
                let mut t = 0;
                loop {
                    if t == assignment.len() {
                        break;
                    }
                    if assignment[t] < self.model.q() {
                        assignment[t] += 1;
                        break;
                    }
                    assignment[t] = 1;
                    t += 1;
                }
                if t == assignment.len() {
                    break;
                }
            }
            weights[s as usize - 1] = total;
        }
        weights
    }
}

/// Log partition function via the tree recursion (`r' = 1` only).
pub fn log_partition_dp(model: &BallModel, n: usize, boundary: Spin, beta: f64) -> Result<f64> {
    let mut dp = StarDp::new(model, n, boundary, beta)?;
    let weights = dp.root_weights();
    let sum: f64 = weights.iter().sum();
    Ok(dp.log_scale + sum.ln())
}

/// Root marginals via the tree recursion (`r' = 1` only).
pub fn root_marginals_dp(
    model: &BallModel,
    n: usize,
    boundary: Spin,
    beta: f64,
) -> Result<Vec<f64>> {
    let mut dp = StarDp::new(model, n, boundary, beta)?;
    let weights = dp.root_weights();
    let sum: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / sum).collect())
}

/// Engine choice for Gibbs evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Dp,
    Enum,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp" => Ok(Engine::Dp),
            "enum" => Ok(Engine::Enum),
            other => Err(Error::Parse(format!("unknown engine '{other}'"))),
        }
    }
}

/// One-stop Gibbs summary through either engine.
pub fn gibbs_summary(
    model: &BallModel,
    n: usize,
    boundary: Spin,
    beta: f64,
    engine: Engine,
    cap: u128,
) -> Result<GibbsSummary> {
    let (log_z, root_marginals) = match engine {
        Engine::Dp => (
            log_partition_dp(model, n, boundary, beta)?,
            root_marginals_dp(model, n, boundary, beta)?,
        ),
        Engine::Enum => {
            let tally = enumerate_windows(model, n, boundary, cap)?;
            (tally.log_partition(beta), tally.root_marginals(beta))
        }
    };
    Ok(GibbsSummary {
        beta,
        boundary,
        n,
        log_z,
        root_marginals,
    })
}

/// Exact tallies for one contour event: the energies of all windows whose
/// decomposition contains the contour, alongside the full tally, plus the
/// removal-map counts for the injectivity check.
#[derive(Clone, Debug)]
pub struct ContourEventTally {
    pub imp_size: usize,
    pub omega_count: u64,
    pub chi_image_count: u64,
    event: Vec<(Rational, u64)>,
    tally: WindowTally,
}

impl ContourEventTally {
    /// `p_i(gamma)` at one temperature, with the bound
    /// `exp(-beta * lambda0 * |gamma|)`.
    pub fn probability(&self, beta: f64, lambda0: &Rational) -> ContourProbability {
        let log_event = log_sum_exp(
            &self
                .event
                .iter()
                .map(|(e, c)| (*c, rational_to_f64(e) * -beta))
                .collect::<Vec<_>>(),
        );
        let p = (log_event - self.tally.log_partition(beta)).exp();
        let bound = (-beta * rational_to_f64(lambda0) * self.imp_size as f64).exp();
        ContourProbability {
            beta,
            p,
            bound,
            imp_size: self.imp_size,
        }
    }

    pub fn window_count(&self) -> u64 {
        self.tally.window_count()
    }
}

/// Probability of seeing a fixed contour, with its exponential bound.
#[derive(Clone, Debug)]
pub struct ContourProbability {
    pub beta: f64,
    pub p: f64,
    pub bound: f64,
    pub imp_size: usize,
}

/// Enumerates all windows on `V_n`, recording those whose contour
/// decomposition contains `gamma` (by canonical identity, i.e. `gamma` is
/// one of the window's contours, not merely a boundary subset). Also
/// applies the contour-removal map to every such window and counts distinct
/// images.
pub fn contour_event_tally(
    model: &BallModel,
    spec: &SpectrumReport,
    gamma: &Contour,
    n: usize,
    boundary: Spin,
    cap: u128,
) -> Result<ContourEventTally> {
    if !spec.is_ground_spin(boundary) {
        return Err(Error::Invalid(format!(
            "boundary mark {boundary} is not a ground-state spin"
        )));
    }
    let interior = gamma.interior();
    if interior.iter().any(|v| v.depth() > n) {
        return Err(Error::Invalid(format!(
            "contour interior does not fit inside V_{n}"
        )));
    }
    let k = model.k();
    let q = model.q();
    let verts: Vec<Vertex> = volume(n, k).iter().cloned().collect();
    let total = (q as u128)
        .checked_pow(verts.len() as u32)
        .ok_or(Error::CapExceeded {
            task: "contour event enumeration".into(),
            needed: u128::MAX,
            cap,
        })?;
    if total > cap {
        return Err(Error::CapExceeded {
            task: format!("contour event enumeration over {} vertices", verts.len()),
            needed: total,
            cap,
        });
    }
    let id = gamma.id();
    let mut event: BTreeMap<Rational, u64> = BTreeMap::new();
    let mut by_root: Vec<BTreeMap<Rational, u64>> = vec![BTreeMap::new(); q as usize];
    let mut omega_count = 0u64;
    let mut chi_images: HashSet<Vec<Spin>> = HashSet::new();
    let mut imp_size: Option<usize> = None;
    let mut spins = vec![1 as Spin; verts.len()];
    loop {
        let mut w = SpinWindow::constant(n, k, boundary);
        for (v, &s) in verts.iter().zip(spins.iter()) {
            w.set(v.clone(), s)?;
        }
        let energy = model.conditional_energy(&w)?;
        *by_root[spins[0] as usize - 1]
            .entry(energy.clone())
            .or_insert(0) += 1;
        let contours = decompose(&w, model.rprime());
        if contours.iter().any(|c| c.id() == id) {
            omega_count += 1;
            *event.entry(energy).or_insert(0) += 1;
            if imp_size.is_none() {
                let bd = improper_balls(model, spec, &w)?;
                let target = contours.iter().find(|c| c.id() == id).unwrap();
                imp_size = Some(imp_balls(target, &bd.improper).len());
            }
            let image = remove_contour(&w, gamma, model.rprime())?;
            let key: Vec<Spin> = verts.iter().map(|v| image.spin(v)).collect();
            chi_images.insert(key);
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
    let imp_size = imp_size.ok_or_else(|| {
        Error::Invalid("contour is not realizable in any window of this volume".into())
    })?;
    Ok(ContourEventTally {
        imp_size,
        omega_count,
        chi_image_count: chi_images.len() as u64,
        event: event.into_iter().collect(),
        tally: WindowTally {
            n,
            boundary,
            q,
            by_root: by_root
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect(),
        },
    })
}

/// One row of a coexistence scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub beta: f64,
    pub boundary: Spin,
    pub marginals: Vec<f64>,
}

/// Result of scanning the temperature grid for every ground-state boundary
/// condition, with the per-temperature disagreement statistic
/// `Delta(beta) = min_i [ mu^i(root = i) - max_{j != i} mu^i(root = j) ]`.
#[derive(Clone, Debug)]
pub struct CoexistenceScan {
    pub rows: Vec<ScanRow>,
    pub deltas: Vec<(f64, f64)>,
}

pub fn coexistence_scan(
    model: &BallModel,
    spec: &SpectrumReport,
    n: usize,
    betas: &[f64],
    engine: Engine,
    cap: u128,
) -> Result<CoexistenceScan> {
    if spec.s() == 0 {
        return Err(Error::Invalid("model has no ground-state spins".into()));
    }
    let mut rows = Vec::new();
    let mut deltas = Vec::new();
    // enumeration tallies are beta-independent, so build them once
    let mut tallies: BTreeMap<Spin, WindowTally> = BTreeMap::new();
    if engine == Engine::Enum {
        for &i in &spec.gs_spins {
            tallies.insert(i, enumerate_windows(model, n, i, cap)?);
        }
    }
    for &beta in betas {
        let mut delta: Option<f64> = None;
        for &i in &spec.gs_spins {
            let marginals = match engine {
                Engine::Dp => root_marginals_dp(model, n, i, beta)?,
                Engine::Enum => tallies[&i].root_marginals(beta),
            };
            let own = marginals[i as usize - 1];
            let other = marginals
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i as usize - 1)
                .map(|(_, &m)| m)
                .fold(f64::NEG_INFINITY, f64::max);
            let gap = own - other;
            delta = Some(delta.map_or(gap, |d: f64| d.min(gap)));
            rows.push(ScanRow {
                beta,
                boundary: i,
                marginals,
            });
        }
        deltas.push((beta, delta.unwrap()));
    }
    Ok(CoexistenceScan { rows, deltas })
}

/// Total-variation distance between two probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p
        .iter()
        .zip(q.iter())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}
