//! Kamada-Kawai spring-energy layout.
//!
//! Every node pair (i, j) within a connected component gets a spring of
//! rest length ℓᵢⱼ = L·dᵢⱼ and strength kᵢⱼ = K/dᵢⱼ², where dᵢⱼ is the
//! graph-theoretic distance and L scales the component's diameter to
//! `unit_length` display units. The layout minimizes
//!
//! ```text
//! E = Σ_{i<j} ½·kᵢⱼ·(‖pᵢ − pⱼ‖ − ℓᵢⱼ)²
//! ```
//!
//! by repeatedly moving the node with the largest gradient magnitude via
//! a 2-D Newton step (gradient step when the local Hessian is
//! near-singular), with step halving until the move lowers the energy.
//! Accepted moves therefore never increase the energy. Connected
//! components are laid out independently and packed on a grid.
//!
//! A run is deterministic given (graph, seed, epsilon, max_iter): the
//! circular initialization jitter comes from a seeded generator, per
//! component, so components may be processed in parallel without
//! changing a single bit of the result.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::netbuild::SemanticGraph;

const NEAR_SINGULAR_DET: f64 = 1e-12;
const MAX_HALVINGS: u32 = 20;
const COINCIDENT_DIST: f64 = 1e-12;
const COINCIDENT_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub seed: u64,
    /// Convergence bound on the per-node gradient magnitude.
    pub epsilon: f64,
    /// Node-move budget; `None` means 1000 moves per node.
    pub max_iter: Option<usize>,
    /// Display length of a component diameter (L0).
    pub unit_length: f64,
    /// Spring constant K.
    pub spring_constant: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            seed: 42,
            epsilon: 1e-4,
            max_iter: None,
            unit_length: 1.0,
            spring_constant: 1.0,
        }
    }
}

/// Pairwise spring targets derived from graph distances.
#[derive(Debug, Clone)]
pub struct TargetDistances {
    n: usize,
    /// Graph distance; infinite across components.
    dist: Vec<f64>,
    /// Rest length ℓᵢⱼ = L·dᵢⱼ; 0 across components.
    ideal: Vec<f64>,
    /// Spring strength kᵢⱼ = K/dᵢⱼ²; 0 across components.
    strength: Vec<f64>,
    /// Node indices per connected component, each ascending.
    components: Vec<Vec<usize>>,
    /// Per-component ideal length of one graph-distance unit.
    component_unit: Vec<f64>,
}

impl TargetDistances {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn ideal(&self, i: usize, j: usize) -> f64 {
        self.ideal[i * self.n + j]
    }

    pub fn strength(&self, i: usize, j: usize) -> f64 {
        self.strength[i * self.n + j]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_unit(&self, comp: usize) -> f64 {
        self.component_unit[comp]
    }
}

/// All-pairs shortest paths with unit edge lengths, plus the spring
/// table. Each component's unit length L is `unit_length / diameter`,
/// so its farthest pair rests at `unit_length`.
pub fn target_distances(g: &SemanticGraph, params: &LayoutParams) -> TargetDistances {
    let n = g.node_count();
    let adj = g.adjacency();
    let mut dist = vec![f64::INFINITY; n * n];

    // BFS from every node.
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        dist[start * n + start] = 0.0;
        queue.clear();
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let du = dist[start * n + u];
            for &(v, _) in &adj[u] {
                if dist[start * n + v].is_infinite() {
                    dist[start * n + v] = du + 1.0;
                    queue.push_back(v);
                }
            }
        }
    }

    // Connected components in ascending order of their smallest node.
    let mut component_of = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if component_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| dist[i * n + j].is_finite()).collect();
        for &m in &members {
            component_of[m] = components.len();
        }
        components.push(members);
    }

    let component_unit: Vec<f64> = components
        .iter()
        .map(|members| {
            let mut diameter = 0.0f64;
            for &i in members {
                for &j in members {
                    diameter = diameter.max(dist[i * n + j]);
                }
            }
            if diameter > 0.0 {
                params.unit_length / diameter
            } else {
                params.unit_length
            }
        })
        .collect();

    let mut ideal = vec![0.0; n * n];
    let mut strength = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = dist[i * n + j];
            if i != j && d.is_finite() {
                ideal[i * n + j] = component_unit[component_of[i]] * d;
                strength[i * n + j] = params.spring_constant / (d * d);
            }
        }
    }

    TargetDistances {
        n,
        dist,
        ideal,
        strength,
        components,
        component_unit,
    }
}

/// Total spring energy of a full position assignment (one entry per
/// graph node, in node order).
pub fn layout_energy(positions: &[(f64, f64)], td: &TargetDistances) -> f64 {
    let n = td.n;
    let mut e = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let k = td.strength[i * n + j];
            if k == 0.0 {
                continue;
            }
            let dx = positions[i].0 - positions[j].0;
            let dy = positions[i].1 - positions[j].1;
            let de = (dx * dx + dy * dy).sqrt();
            let stretch = de - td.ideal[i * n + j];
            e += 0.5 * k * stretch * stretch;
        }
    }
    e
}

/// Analytic energy gradient with respect to one node's position.
pub fn energy_gradient(positions: &[(f64, f64)], td: &TargetDistances, node: usize) -> (f64, f64) {
    let n = td.n;
    let (x, y) = positions[node];
    let mut gx = 0.0;
    let mut gy = 0.0;
    for (j, pj) in positions.iter().enumerate() {
        let k = td.strength[node * n + j];
        if j == node || k == 0.0 {
            continue;
        }
        let dx = x - pj.0;
        let dy = y - pj.1;
        let de = (dx * dx + dy * dy).sqrt();
        let coeff = k * (1.0 - td.ideal[node * n + j] / de);
        gx += coeff * dx;
        gy += coeff * dy;
    }
    (gx, gy)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub positions: BTreeMap<String, (f64, f64)>,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Accepted node moves.
    pub iterations: usize,
    pub seed: u64,
    pub converged: bool,
}

impl LayoutResult {
    pub fn position(&self, stem: &str) -> Option<(f64, f64)> {
        self.positions.get(stem).copied()
    }
}

/// Lays out the graph; see the module docs for the procedure.
pub fn kamada_kawai(g: &SemanticGraph, td: &TargetDistances, params: &LayoutParams) -> LayoutResult {
    kamada_kawai_observed(g, td, params, |_| {})
}

/// Like [`kamada_kawai`], invoking `on_accept` with the total energy
/// after every accepted move. The emitted series never increases.
pub fn kamada_kawai_observed(
    g: &SemanticGraph,
    td: &TargetDistances,
    params: &LayoutParams,
    mut on_accept: impl FnMut(f64),
) -> LayoutResult {
    let n = td.n;
    let total_budget = params.max_iter.unwrap_or(1000 * n.max(1));

    let comps: Vec<ComponentRun> = td
        .components
        .iter()
        .enumerate()
        .map(|(ci, members)| prepare_component(ci, members, td, params, total_budget, n))
        .collect();

    // Components are independent; their energies just add up. While
    // component `idx` runs, the others contribute either their settled
    // final energy or their untouched initial energy.
    let initials: Vec<f64> = comps.iter().map(|c| c.initial_energy).collect();
    let initial_total: f64 = initials.iter().sum();
    let mut settled = 0.0;

    let mut done: Vec<ComponentDone> = Vec::with_capacity(comps.len());
    for (idx, comp) in comps.into_iter().enumerate() {
        let pending: f64 = initials[idx + 1..].iter().sum();
        let base = settled + pending;
        let result = run_component(comp, |local_energy| on_accept(base + local_energy));
        settled += result.final_energy;
        done.push(result);
    }

    assemble_result(g, td, params, done, initial_total)
}

struct ComponentRun {
    members: Vec<usize>,
    positions: Vec<(f64, f64)>,
    ideal: Vec<f64>,
    strength: Vec<f64>,
    initial_energy: f64,
    budget: usize,
    epsilon: f64,
    unit_length: f64,
    rng: ChaCha8Rng,
}

struct ComponentDone {
    members: Vec<usize>,
    positions: Vec<(f64, f64)>,
    final_energy: f64,
    moves: usize,
    converged: bool,
}

fn prepare_component(
    comp_idx: usize,
    members: &[usize],
    td: &TargetDistances,
    params: &LayoutParams,
    total_budget: usize,
    n_total: usize,
) -> ComponentRun {
    let m = members.len();
    // Independent stream per component so execution order cannot matter.
    let mut rng = ChaCha8Rng::seed_from_u64(
        params
            .seed
            .wrapping_add((comp_idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    );

    // Circular start in component node order, with a small angular
    // jitter so symmetric configurations do not start on a knife edge.
    let radius = params.unit_length * m as f64 / (2.0 * std::f64::consts::PI);
    let mut positions: Vec<(f64, f64)> = (0..m)
        .map(|rank| {
            let jitter: f64 = rng.gen::<f64>() * 1e-3;
            let angle = 2.0 * std::f64::consts::PI * rank as f64 / m as f64 + jitter;
            (radius * angle.cos(), radius * angle.sin())
        })
        .collect();
    separate_coincident(&mut positions, &mut rng);

    // Local copies of the spring tables, indexed by component rank.
    let mut ideal = vec![0.0; m * m];
    let mut strength = vec![0.0; m * m];
    for (a, &i) in members.iter().enumerate() {
        for (b, &j) in members.iter().enumerate() {
            ideal[a * m + b] = td.ideal[i * td.n + j];
            strength[a * m + b] = td.strength[i * td.n + j];
        }
    }

    let budget = if n_total == 0 {
        0
    } else {
        (total_budget * m).div_ceil(n_total)
    };
    let initial_energy = local_energy(&positions, &ideal, &strength, m);

    ComponentRun {
        members: members.to_vec(),
        positions,
        ideal,
        strength,
        initial_energy,
        budget,
        epsilon: params.epsilon,
        unit_length: params.unit_length,
        rng,
    }
}

fn local_energy(positions: &[(f64, f64)], ideal: &[f64], strength: &[f64], m: usize) -> f64 {
    let mut e = 0.0;
    for a in 0..m {
        for b in (a + 1)..m {
            let k = strength[a * m + b];
            if k == 0.0 {
                continue;
            }
            let dx = positions[a].0 - positions[b].0;
            let dy = positions[a].1 - positions[b].1;
            let de = (dx * dx + dy * dy).sqrt();
            let stretch = de - ideal[a * m + b];
            e += 0.5 * k * stretch * stretch;
        }
    }
    e
}

/// Energy of the springs incident to node `a` only.
fn node_energy(positions: &[(f64, f64)], ideal: &[f64], strength: &[f64], m: usize, a: usize, p: (f64, f64)) -> f64 {
    let mut e = 0.0;
    for b in 0..m {
        let k = strength[a * m + b];
        if b == a || k == 0.0 {
            continue;
        }
        let dx = p.0 - positions[b].0;
        let dy = p.1 - positions[b].1;
        let de = (dx * dx + dy * dy).sqrt();
        let stretch = de - ideal[a * m + b];
        e += 0.5 * k * stretch * stretch;
    }
    e
}

fn node_gradient(positions: &[(f64, f64)], ideal: &[f64], strength: &[f64], m: usize, a: usize) -> (f64, f64) {
    let (x, y) = positions[a];
    let mut gx = 0.0;
    let mut gy = 0.0;
    for b in 0..m {
        let k = strength[a * m + b];
        if b == a || k == 0.0 {
            continue;
        }
        let dx = x - positions[b].0;
        let dy = y - positions[b].1;
        let de = (dx * dx + dy * dy).sqrt();
        let coeff = k * (1.0 - ideal[a * m + b] / de);
        gx += coeff * dx;
        gy += coeff * dy;
    }
    (gx, gy)
}

/// Gradient and Hessian of the springs incident to node `a`.
fn node_gradient_hessian(
    positions: &[(f64, f64)],
    ideal: &[f64],
    strength: &[f64],
    m: usize,
    a: usize,
) -> ((f64, f64), (f64, f64, f64)) {
    let (x, y) = positions[a];
    let (mut gx, mut gy) = (0.0, 0.0);
    let (mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0);
    for b in 0..m {
        let k = strength[a * m + b];
        if b == a || k == 0.0 {
            continue;
        }
        let dx = x - positions[b].0;
        let dy = y - positions[b].1;
        let d2 = dx * dx + dy * dy;
        let de = d2.sqrt();
        let l = ideal[a * m + b];
        let coeff = k * (1.0 - l / de);
        gx += coeff * dx;
        gy += coeff * dy;
        let de3 = de * d2;
        hxx += k * (1.0 - l * dy * dy / de3);
        hyy += k * (1.0 - l * dx * dx / de3);
        hxy += k * (l * dx * dy / de3);
    }
    ((gx, gy), (hxx, hxy, hyy))
}

/// Nudges coincident points apart so gradients stay finite.
fn separate_coincident(positions: &mut [(f64, f64)], rng: &mut ChaCha8Rng) {
    let m = positions.len();
    loop {
        let mut clean = true;
        for a in 0..m {
            for b in (a + 1)..m {
                let dx = positions[a].0 - positions[b].0;
                let dy = positions[a].1 - positions[b].1;
                if (dx * dx + dy * dy).sqrt() < COINCIDENT_DIST {
                    let angle: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                    positions[b].0 += COINCIDENT_NUDGE * angle.cos();
                    positions[b].1 += COINCIDENT_NUDGE * angle.sin();
                    clean = false;
                }
            }
        }
        if clean {
            return;
        }
    }
}

fn separate_one(positions: &mut [(f64, f64)], a: usize, rng: &mut ChaCha8Rng) {
    loop {
        let mut clean = true;
        for b in 0..positions.len() {
            if b == a {
                continue;
            }
            let dx = positions[a].0 - positions[b].0;
            let dy = positions[a].1 - positions[b].1;
            if (dx * dx + dy * dy).sqrt() < COINCIDENT_DIST {
                let angle: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                positions[a].0 += COINCIDENT_NUDGE * angle.cos();
                positions[a].1 += COINCIDENT_NUDGE * angle.sin();
                clean = false;
            }
        }
        if clean {
            return;
        }
    }
}

fn run_component(mut comp: ComponentRun, mut on_accept: impl FnMut(f64)) -> ComponentDone {
    let m = comp.members.len();
    let (ideal, strength) = (std::mem::take(&mut comp.ideal), std::mem::take(&mut comp.strength));
    let mut positions = std::mem::take(&mut comp.positions);
    let mut running = comp.initial_energy;
    let mut moves = 0usize;
    let mut converged = false;

    if m < 2 {
        on_accept(running);
        return ComponentDone {
            members: comp.members,
            positions,
            final_energy: 0.0,
            moves: 0,
            converged: true,
        };
    }

    // Cached per-node gradients for picking the worst node. The cache is
    // updated incrementally after each move and refreshed in full every
    // `refresh_every` moves to keep rounding drift from accumulating.
    let refresh_every = 2 * m;
    let mut grads: Vec<(f64, f64)> =
        (0..m).map(|a| node_gradient(&positions, &ideal, &strength, m, a)).collect();
    let mut since_refresh = 0usize;

    'outer: while moves < comp.budget {
        // Worst node by cached gradient magnitude; ties go to the lower index.
        let (mut worst, mut worst_mag) = (0usize, -1.0f64);
        for (a, &(gx, gy)) in grads.iter().enumerate() {
            let mag = (gx * gx + gy * gy).sqrt();
            if mag > worst_mag {
                worst = a;
                worst_mag = mag;
            }
        }

        if worst_mag < comp.epsilon {
            // Cache says we are done; confirm against fresh gradients.
            for (a, g) in grads.iter_mut().enumerate() {
                *g = node_gradient(&positions, &ideal, &strength, m, a);
            }
            since_refresh = 0;
            let confirmed = grads
                .iter()
                .all(|&(gx, gy)| (gx * gx + gy * gy).sqrt() < comp.epsilon);
            if confirmed {
                converged = true;
                break;
            }
            continue;
        }

        separate_one(&mut positions, worst, &mut comp.rng);
        let ((gx, gy), (hxx, hxy, hyy)) =
            node_gradient_hessian(&positions, &ideal, &strength, m, worst);
        let fresh_mag = (gx * gx + gy * gy).sqrt();
        if fresh_mag < comp.epsilon {
            // The cache overestimated this node; record the truth and repick.
            grads[worst] = (gx, gy);
            continue;
        }

        let det = hxx * hyy - hxy * hxy;
        let newton = if det.abs() >= NEAR_SINGULAR_DET {
            Some(((-gx * hyy + gy * hxy) / det, (gx * hxy - gy * hxx) / det))
        } else {
            None
        };
        // Plain gradient step, capped at one display unit.
        let scale = (comp.unit_length / fresh_mag).min(1.0);
        let descent = (-gx * scale, -gy * scale);

        let old_pos = positions[worst];
        let e_old = node_energy(&positions, &ideal, &strength, m, worst, old_pos);
        let mut accepted: Option<((f64, f64), f64)> = None;
        'tries: for step in newton.into_iter().chain(std::iter::once(descent)) {
            let mut factor = 1.0;
            for _ in 0..=MAX_HALVINGS {
                let candidate = (old_pos.0 + step.0 * factor, old_pos.1 + step.1 * factor);
                let e_new = node_energy(&positions, &ideal, &strength, m, worst, candidate);
                if e_new < e_old {
                    accepted = Some((candidate, e_new));
                    break 'tries;
                }
                factor *= 0.5;
            }
        }

        let Some((new_pos, e_new)) = accepted else {
            // No step along either direction improves the energy: we are
            // at the numerical floor for this configuration.
            grads[worst] = (gx, gy);
            break 'outer;
        };

        // Incremental gradient updates: only the springs touching the
        // moved node changed.
        for b in 0..m {
            let k = strength[worst * m + b];
            if b == worst || k == 0.0 {
                continue;
            }
            let l = ideal[worst * m + b];
            let sub = pair_gradient_term(positions[b], old_pos, k, l);
            let add = pair_gradient_term(positions[b], new_pos, k, l);
            grads[b].0 += add.0 - sub.0;
            grads[b].1 += add.1 - sub.1;
        }
        positions[worst] = new_pos;
        grads[worst] = node_gradient(&positions, &ideal, &strength, m, worst);

        running += e_new - e_old;
        moves += 1;
        since_refresh += 1;
        if since_refresh >= refresh_every {
            for (a, g) in grads.iter_mut().enumerate() {
                *g = node_gradient(&positions, &ideal, &strength, m, a);
            }
            since_refresh = 0;
        }
        on_accept(running);
    }

    let final_energy = local_energy(&positions, &ideal, &strength, m);
    ComponentDone {
        members: comp.members,
        positions,
        final_energy,
        moves,
        converged,
    }
}

/// Gradient contribution to the node at `p` from its spring to `q`.
fn pair_gradient_term(p: (f64, f64), q: (f64, f64), k: f64, l: f64) -> (f64, f64) {
    let dx = p.0 - q.0;
    let dy = p.1 - q.1;
    let de = (dx * dx + dy * dy).sqrt();
    if de < COINCIDENT_DIST {
        return (0.0, 0.0);
    }
    let coeff = k * (1.0 - l / de);
    (coeff * dx, coeff * dy)
}

fn assemble_result(
    g: &SemanticGraph,
    td: &TargetDistances,
    params: &LayoutParams,
    done: Vec<ComponentDone>,
    initial_energy: f64,
) -> LayoutResult {
    // Pack component bounding boxes on a grid, padded by one display unit.
    let boxes: Vec<(f64, f64, f64, f64)> = done
        .iter()
        .map(|c| {
            let min_x = c.positions.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let max_x = c.positions.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            let min_y = c.positions.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let max_y = c.positions.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            (min_x, min_y, max_x, max_y)
        })
        .collect();
    let pad = params.unit_length;
    let cell_w = boxes.iter().map(|b| b.2 - b.0).fold(0.0f64, f64::max) + pad;
    let cell_h = boxes.iter().map(|b| b.3 - b.1).fold(0.0f64, f64::max) + pad;
    let cols = (done.len() as f64).sqrt().ceil().max(1.0) as usize;

    let mut full = vec![(0.0, 0.0); td.n];
    for (ci, c) in done.iter().enumerate() {
        let col = (ci % cols) as f64;
        let row = (ci / cols) as f64;
        let (min_x, min_y, _, _) = boxes[ci];
        for (rank, &node) in c.members.iter().enumerate() {
            full[node] = (
                c.positions[rank].0 - min_x + col * cell_w,
                c.positions[rank].1 - min_y + row * cell_h,
            );
        }
    }

    let positions: BTreeMap<String, (f64, f64)> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.stem.clone(), full[i]))
        .collect();

    LayoutResult {
        positions,
        initial_energy,
        final_energy: layout_energy(&full, td),
        iterations: done.iter().map(|c| c.moves).sum(),
        seed: params.seed,
        converged: done.iter().all(|c| c.converged),
    }
}
