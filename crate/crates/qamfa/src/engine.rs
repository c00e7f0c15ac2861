//! Exact per-iteration analysis: breadth-first closure of the reachable
//! configuration graph, absorbing-chain solving by dense elimination,
//! infinite-repetition composition, and a seeded Monte-Carlo cross-check.
//!
//! One iteration runs from the initial configuration until the machine
//! accepts, rejects, or returns to the initial configuration (a restart).
//! Restarts are absorbed, so per-iteration probabilities compose over the
//! repeated process as a geometric series.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{mat_apply, CVec};
use crate::machine::{
    initial_config, step, Action, Configuration, StateId, StateKind, Tape, VerifierSpec,
};
use crate::prover::ProverStrategy;

/// Default cap on distinct configurations per graph.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;
/// Default per-trajectory step cap for Monte-Carlo runs.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;
/// Residual tolerance for the absorption linear systems.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

const FINGERPRINT_GRID: f64 = 1e9;
const PHASE_ANCHOR_MIN: f64 = 1e-6;

/// Graph construction options.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub node_cap: usize,
    /// How many iterations to unroll before restarts absorb; 1 gives the
    /// per-iteration law, larger values are used for composition checks.
    pub iterations: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            node_cap: DEFAULT_NODE_CAP,
            iterations: 1,
        }
    }
}

/// Where an edge lands: another transient node or one of the three absorbing
/// classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Node(usize),
    Accept,
    Reject,
    Restart,
}

#[derive(Debug)]
pub struct GraphNode {
    pub config: Configuration,
    pub iteration: usize,
}

/// Deduplicated reachable-configuration graph with unit step costs.
#[derive(Debug)]
pub struct ConfigGraph {
    pub nodes: Vec<GraphNode>,
    edges: Vec<Vec<(Target, f64)>>,
    root: usize,
}

impl ConfigGraph {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self, node: usize) -> &[(Target, f64)] {
        &self.edges[node]
    }

    /// First node satisfying the predicate, in BFS discovery order.
    pub fn find_node<F: Fn(&GraphNode) -> bool>(&self, pred: F) -> Option<usize> {
        self.nodes.iter().position(pred)
    }
}

#[derive(PartialEq, Eq, Hash, Clone)]
struct Fingerprint {
    iteration: usize,
    classical: StateId,
    head: usize,
    amps: Vec<(i64, i64)>,
    history: Vec<(String, String)>,
}

/// Global-phase-normalized amplitudes rounded to a 1e-9 grid. Distinct
/// quantum states of one iteration are far apart, so grid collisions do not
/// occur at desk scale.
fn round_amps(v: &CVec) -> Vec<(i64, i64)> {
    let phase = v
        .amps()
        .iter()
        .find(|a| a.norm() > PHASE_ANCHOR_MIN)
        .map(|a| a.conj() / a.norm())
        .unwrap_or_else(|| Complex64::new(1.0, 0.0));
    v.amps()
        .iter()
        .map(|a| {
            let b = a * phase;
            (
                (b.re * FINGERPRINT_GRID).round() as i64,
                (b.im * FINGERPRINT_GRID).round() as i64,
            )
        })
        .collect()
}

fn fingerprint(cfg: &Configuration, iteration: usize) -> Fingerprint {
    Fingerprint {
        iteration,
        classical: cfg.classical,
        head: cfg.head,
        amps: round_amps(&cfg.quantum),
        history: cfg.history.clone(),
    }
}

/// Breadth-first closure of the initial configuration under `step`; halting
/// successors and returns to the initial configuration become absorbing
/// targets.
pub fn build_config_graph(
    spec: &VerifierSpec,
    input: &str,
    prover: &ProverStrategy,
    opts: &BuildOptions,
) -> Result<ConfigGraph> {
    let tape = Tape::new(spec, input)?;
    let root_cfg = initial_config(spec, input)?;
    let restart_amps = round_amps(&root_cfg.quantum);

    let mut nodes: Vec<GraphNode> = Vec::new();
    let mut edges: Vec<Vec<(Target, f64)>> = Vec::new();
    let mut index: HashMap<Fingerprint, usize> = HashMap::new();

    let root_fp = fingerprint(&root_cfg, 0);
    nodes.push(GraphNode {
        config: root_cfg,
        iteration: 0,
    });
    edges.push(Vec::new());
    index.insert(root_fp, 0);

    let mut cursor = 0usize;
    while cursor < nodes.len() {
        let (config, iteration) = {
            let n = &nodes[cursor];
            (n.config.clone(), n.iteration)
        };
        let successors = step(spec, &tape, &config, prover, input)?;
        let mut merged: Vec<(Target, f64)> = Vec::new();
        for (succ, p) in successors {
            let target = match spec.state_kind(succ.classical) {
                StateKind::Accept => Target::Accept,
                StateKind::Reject => Target::Reject,
                _ => {
                    let is_restart = succ.classical == spec.initial
                        && succ.head == 0
                        && round_amps(&succ.quantum) == restart_amps;
                    if is_restart {
                        if iteration + 1 < opts.iterations {
                            let fresh = Configuration {
                                history: Vec::new(),
                                ..succ
                            };
                            Target::Node(intern(
                                &mut nodes,
                                &mut edges,
                                &mut index,
                                fresh,
                                iteration + 1,
                                opts.node_cap,
                            )?)
                        } else {
                            Target::Restart
                        }
                    } else {
                        Target::Node(intern(
                            &mut nodes,
                            &mut edges,
                            &mut index,
                            succ,
                            iteration,
                            opts.node_cap,
                        )?)
                    }
                }
            };
            match merged.iter_mut().find(|(t, _)| *t == target) {
                Some((_, q)) => *q += p,
                None => merged.push((target, p)),
            }
        }
        edges[cursor] = merged;
        cursor += 1;
    }

    Ok(ConfigGraph {
        nodes,
        edges,
        root: 0,
    })
}

fn intern(
    nodes: &mut Vec<GraphNode>,
    edges: &mut Vec<Vec<(Target, f64)>>,
    index: &mut HashMap<Fingerprint, usize>,
    config: Configuration,
    iteration: usize,
    cap: usize,
) -> Result<usize> {
    let fp = fingerprint(&config, iteration);
    if let Some(&id) = index.get(&fp) {
        return Ok(id);
    }
    if nodes.len() >= cap {
        return Err(Error::BudgetExceeded(format!(
            "configuration graph exceeded {cap} nodes"
        )));
    }
    let id = nodes.len();
    nodes.push(GraphNode { config, iteration });
    edges.push(Vec::new());
    index.insert(fp, id);
    Ok(id)
}

/// Exact per-iteration law: absorption probabilities and the expected number
/// of steps until absorption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOutcome {
    pub p_accept: f64,
    pub p_reject: f64,
    pub p_restart: f64,
    pub expected_steps: f64,
}

impl IterationOutcome {
    /// Per-iteration halting probability.
    pub fn halting_probability(&self) -> f64 {
        self.p_accept + self.p_reject
    }
}

/// Full solution of the absorption systems, one row per graph node.
#[derive(Debug)]
pub struct AbsorptionSolution {
    root: usize,
    absorb: Vec<[f64; 3]>,
    steps: Vec<f64>,
    pub residual: f64,
}

impl AbsorptionSolution {
    pub fn outcome(&self) -> IterationOutcome {
        self.outcome_from(self.root)
    }

    pub fn outcome_from(&self, node: usize) -> IterationOutcome {
        IterationOutcome {
            p_accept: self.absorb[node][0],
            p_reject: self.absorb[node][1],
            p_restart: self.absorb[node][2],
            expected_steps: self.steps[node],
        }
    }
}

/// Solve the absorption linear systems (I−Q)B = R and (I−Q)t = 1 by dense
/// elimination with partial pivoting plus one iterative-refinement pass.
pub fn solve_absorption(graph: &ConfigGraph) -> Result<AbsorptionSolution> {
    let n = graph.node_count();

    // Every node must reach an absorbing class with positive probability.
    if let Some(stuck) = find_diverging_node(graph) {
        let node = &graph.nodes[stuck];
        return Err(Error::DivergingChain {
            node: format!(
                "node {stuck} (state index {}, head {})",
                node.config.classical, node.config.head
            ),
        });
    }

    // A = I − Q, rhs columns: accept, reject, restart, ones.
    let mut a = vec![0.0f64; n * n];
    let mut rhs = vec![0.0f64; n * 4];
    for i in 0..n {
        a[i * n + i] = 1.0;
        rhs[i * 4 + 3] = 1.0;
        for &(target, p) in graph.edges(i) {
            match target {
                Target::Node(j) => a[i * n + j] -= p,
                Target::Accept => rhs[i * 4] += p,
                Target::Reject => rhs[i * 4 + 1] += p,
                Target::Restart => rhs[i * 4 + 2] += p,
            }
        }
    }

    let lu = LuFactors::factor(a.clone(), n).ok_or(Error::DivergingChain {
        node: "singular absorption system".to_string(),
    })?;
    let mut x = rhs.clone();
    lu.solve_in_place(&mut x, 4);

    // One refinement pass sharpens the bound-exactness checks.
    let mut residual = residual_matrix(&a, &x, &rhs, n, 4);
    let mut correction = residual.clone();
    lu.solve_in_place(&mut correction, 4);
    for (xi, ci) in x.iter_mut().zip(correction.iter()) {
        *xi += ci;
    }
    residual = residual_matrix(&a, &x, &rhs, n, 4);
    let rmax = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if rmax > SOLVE_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge {
            residual: rmax,
            tolerance: SOLVE_RESIDUAL_TOL,
        });
    }

    let mut absorb = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    for i in 0..n {
        absorb.push([x[i * 4], x[i * 4 + 1], x[i * 4 + 2]]);
        steps.push(x[i * 4 + 3]);
    }
    Ok(AbsorptionSolution {
        root: graph.root(),
        absorb,
        steps,
        residual: rmax,
    })
}

fn residual_matrix(a: &[f64], x: &[f64], rhs: &[f64], n: usize, k: usize) -> Vec<f64> {
    let mut r = rhs.to_vec();
    for i in 0..n {
        for j in 0..n {
            let aij = a[i * n + j];
            if aij != 0.0 {
                for c in 0..k {
                    r[i * k + c] -= aij * x[j * k + c];
                }
            }
        }
    }
    r
}

fn find_diverging_node(graph: &ConfigGraph) -> Option<usize> {
    let n = graph.node_count();
    let mut live = vec![false; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = Vec::new();
    for i in 0..n {
        for &(target, p) in graph.edges(i) {
            if p <= 0.0 {
                continue;
            }
            match target {
                Target::Node(j) => preds[j].push(i),
                _ => {
                    if !live[i] {
                        live[i] = true;
                        queue.push(i);
                    }
                }
            }
        }
    }
    while let Some(j) = queue.pop() {
        for &i in &preds[j] {
            if !live[i] {
                live[i] = true;
                queue.push(i);
            }
        }
    }
    live.iter().position(|l| !l)
}

struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    fn factor(mut a: Vec<f64>, n: usize) -> Option<LuFactors> {
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[perm[col] * n + col].abs();
            for row in (col + 1)..n {
                let v = a[perm[row] * n + col].abs();
                if v > best {
                    best = v;
                    pivot = row;
                }
            }
            if best < 1e-300 {
                return None;
            }
            perm.swap(col, pivot);
            let p = perm[col];
            let diag = a[p * n + col];
            for row in (col + 1)..n {
                let r = perm[row];
                let factor = a[r * n + col] / diag;
                if factor != 0.0 {
                    a[r * n + col] = factor;
                    for k in (col + 1)..n {
                        a[r * n + k] -= factor * a[p * n + k];
                    }
                } else {
                    a[r * n + col] = 0.0;
                }
            }
        }
        Some(LuFactors { n, lu: a, perm })
    }

    /// Solve A·X = B for `k` right-hand-side columns stored row-major in `b`.
    fn solve_in_place(&self, b: &mut [f64], k: usize) {
        let n = self.n;
        let mut y = vec![0.0f64; n * k];
        for (i, &pi) in self.perm.iter().enumerate() {
            for c in 0..k {
                let mut acc = b[pi * k + c];
                for j in 0..i {
                    acc -= self.lu[pi * n + j] * y[j * k + c];
                }
                y[i * k + c] = acc;
            }
        }
        for i in (0..n).rev() {
            let pi = self.perm[i];
            let diag = self.lu[pi * n + i];
            for c in 0..k {
                let mut acc = y[i * k + c];
                for j in (i + 1)..n {
                    acc -= self.lu[pi * n + j] * b[j * k + c];
                }
                b[i * k + c] = acc / diag;
            }
        }
    }
}

/// Acceptance probability of the indefinitely repeated process:
/// P_a / (P_a + P_r − P_a·P_r).
pub fn overall_acceptance(outcome: &IterationOutcome) -> Result<f64> {
    let h = outcome.halting_probability();
    if h <= 0.0 {
        return Err(Error::NonHalting);
    }
    Ok(outcome.p_accept
        / (outcome.p_accept + outcome.p_reject - outcome.p_accept * outcome.p_reject))
}

/// Expected total steps of the repeated process: per-iteration expected
/// steps times the expected number of iterations 1/h.
pub fn expected_runtime(outcome: &IterationOutcome) -> Result<f64> {
    let h = outcome.halting_probability();
    if h <= 0.0 {
        return Err(Error::NonHalting);
    }
    Ok(outcome.expected_steps * (1.0 / h))
}

/// Expected number of iterations computed along an independent route: rewire
/// restart edges back to the root and count expected visits to the root in
/// the resulting chain. Equals 1/h for the absorbing per-iteration law.
pub fn expected_iterations_via_loop(graph: &ConfigGraph) -> Result<f64> {
    let n = graph.node_count();
    let root = graph.root();
    let mut a = vec![0.0f64; n * n];
    let mut rhs = vec![0.0f64; n];
    for i in 0..n {
        a[i * n + i] = 1.0;
        for &(target, p) in graph.edges(i) {
            match target {
                Target::Node(j) => a[i * n + j] -= p,
                Target::Restart => a[i * n + root] -= p,
                _ => {}
            }
        }
    }
    rhs[root] = 1.0;
    let lu = LuFactors::factor(a, n).ok_or(Error::NonHalting)?;
    let mut x = rhs;
    lu.solve_in_place(&mut x, 1);
    Ok(x[root])
}

/// Monte-Carlo estimate of the overall acceptance probability.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub trials: u64,
    pub accepts: u64,
    pub rejects: u64,
    /// Trials that hit the step cap without halting.
    pub censored: u64,
    pub p_accept: f64,
    pub std_error: f64,
    pub seed: u64,
    pub step_cap: u64,
}

/// Sample `trials` independent trajectories of the full repeated process
/// with a seeded deterministic generator. Identical (seed, inputs) produce
/// identical estimates.
pub fn monte_carlo(
    spec: &VerifierSpec,
    input: &str,
    prover: &ProverStrategy,
    trials: u64,
    seed: u64,
    step_cap: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let tape = Tape::new(spec, input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepts = 0u64;
    let mut rejects = 0u64;
    let mut censored = 0u64;

    for _ in 0..trials {
        match sample_trajectory(spec, &tape, input, prover, &mut rng, step_cap)? {
            TrajectoryEnd::Accept => accepts += 1,
            TrajectoryEnd::Reject => rejects += 1,
            TrajectoryEnd::Censored => censored += 1,
        }
    }

    let p = accepts as f64 / trials as f64;
    Ok(McEstimate {
        trials,
        accepts,
        rejects,
        censored,
        p_accept: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        seed,
        step_cap,
    })
}

enum TrajectoryEnd {
    Accept,
    Reject,
    Censored,
}

fn sample_trajectory(
    spec: &VerifierSpec,
    tape: &Tape,
    input: &str,
    prover: &ProverStrategy,
    rng: &mut ChaCha8Rng,
    step_cap: u64,
) -> Result<TrajectoryEnd> {
    let mut classical = spec.initial;
    let mut head = 0usize;
    let mut quantum = spec.initial_quantum.clone();
    let mut history: Vec<(String, String)> = Vec::new();

    for _ in 0..step_cap {
        match spec.state_kind(classical) {
            StateKind::Accept => return Ok(TrajectoryEnd::Accept),
            StateKind::Reject => return Ok(TrajectoryEnd::Reject),
            StateKind::Reading => {
                let sym = tape.symbol(head);
                let action = spec.action(classical, sym).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "no action for state {} on symbol {sym}",
                        spec.state_name(classical)
                    ))
                })?;
                match action {
                    Action::Unitary { op, next, mv } => {
                        if quantum.dim() > 0 {
                            quantum = mat_apply(op, &quantum)?;
                        }
                        classical = *next;
                        head = (head as isize + *mv as isize) as usize;
                    }
                    Action::Measure { m, arms } => {
                        let mut projections: Vec<(usize, f64, CVec)> = Vec::new();
                        for (idx, (_, projector)) in m.outcomes().iter().enumerate() {
                            let projected = mat_apply(projector, &quantum)?;
                            let p = projected.norm_sqr();
                            if p > 0.0 {
                                projections.push((idx, p, projected));
                            }
                        }
                        let total: f64 = projections.iter().map(|(_, p, _)| p).sum();
                        let mut draw = rng.gen::<f64>() * total;
                        let mut chosen = projections.len() - 1;
                        for (i, (_, p, _)) in projections.iter().enumerate() {
                            if draw < *p {
                                chosen = i;
                                break;
                            }
                            draw -= p;
                        }
                        let (idx, p, projected) = projections.swap_remove(chosen);
                        quantum = projected.scaled(1.0 / p.sqrt());
                        let (next, mv) = arms[idx];
                        classical = next;
                        head = (head as isize + mv as isize) as usize;
                    }
                    Action::Coin { arms } => {
                        let mut draw = rng.gen::<f64>();
                        let mut pick = arms.len() - 1;
                        for (i, (p, _, _)) in arms.iter().enumerate() {
                            if draw < *p {
                                pick = i;
                                break;
                            }
                            draw -= p;
                        }
                        let (_, next, mv) = arms[pick];
                        classical = next;
                        head = (head as isize + mv as isize) as usize;
                    }
                }
            }
            StateKind::Communication => {
                let entry = spec.comm_entry(classical).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "communication state {} has no entry",
                        spec.state_name(classical)
                    ))
                })?;
                let response = prover.respond(input, &history, &entry.emit);
                let next = *entry.responses.get(&response).ok_or_else(|| {
                    Error::ProtocolViolation {
                        state: spec.state_name(classical).to_string(),
                        response: response.clone(),
                    }
                })?;
                history.push((entry.emit.clone(), response));
                classical = next;
            }
        }
        // A return to the initial configuration starts a fresh iteration.
        if classical == spec.initial
            && head == 0
            && (quantum.dim() == 0 || quantum.max_abs_diff(&spec.initial_quantum) <= 1e-9)
        {
            history.clear();
        }
    }
    Ok(TrajectoryEnd::Censored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVec;
    use crate::machine::{SpecBuilder, StateKind, TapeSymbol};

    fn immediate_accept() -> VerifierSpec {
        let mut b = SpecBuilder::new("immediate-accept", &['a'], 0);
        let s0 = b.state("s0", StateKind::Reading);
        let acc = b.state("acc", StateKind::Accept);
        let rej = b.state("rej", StateKind::Reject);
        b.coin(s0, &[TapeSymbol::LeftMarker], vec![(1.0, acc, 0)]);
        b.finish(s0, CVec::new(vec![]), rej)
    }

    /// Accept on heads-heads, restart otherwise.
    fn two_coins() -> VerifierSpec {
        let mut b = SpecBuilder::new("two-coins", &['a'], 0);
        let s0 = b.state("s0", StateKind::Reading);
        let c2 = b.state("c2", StateKind::Reading);
        let acc = b.state("acc", StateKind::Accept);
        let rej = b.state("rej", StateKind::Reject);
        b.coin(
            s0,
            &[TapeSymbol::LeftMarker],
            vec![(0.5, c2, 0), (0.5, s0, 0)],
        );
        b.coin(
            c2,
            &[TapeSymbol::LeftMarker],
            vec![(0.5, acc, 0), (0.5, s0, 0)],
        );
        b.finish(s0, CVec::new(vec![]), rej)
    }

    fn ruin() -> VerifierSpec {
        let mut b = SpecBuilder::new("ruin", &['a'], 0);
        let s0 = b.state("s0", StateKind::Reading);
        let walk = b.state("walk", StateKind::Reading);
        let acc = b.state("acc", StateKind::Accept);
        let rej = b.state("rej", StateKind::Reject);
        b.coin(s0, &[TapeSymbol::LeftMarker], vec![(1.0, walk, 1)]);
        b.coin(
            walk,
            &[TapeSymbol::Input('a')],
            vec![(0.5, walk, -1), (0.5, walk, 1)],
        );
        b.coin(walk, &[TapeSymbol::LeftMarker], vec![(1.0, rej, 0)]);
        b.coin(walk, &[TapeSymbol::RightMarker], vec![(1.0, acc, 0)]);
        b.finish(s0, CVec::new(vec![]), rej)
    }

    #[test]
    fn immediate_accept_graph() {
        let spec = immediate_accept();
        let g = build_config_graph(&spec, "", &ProverStrategy::silent(), &Default::default())
            .unwrap();
        assert_eq!(g.node_count(), 1);
        let outcome = solve_absorption(&g).unwrap().outcome();
        assert_eq!(outcome.p_accept, 1.0);
        assert_eq!(outcome.expected_steps, 1.0);
    }

    #[test]
    fn two_fair_coins_accept_quarter() {
        let spec = two_coins();
        let g = build_config_graph(&spec, "", &ProverStrategy::silent(), &Default::default())
            .unwrap();
        let outcome = solve_absorption(&g).unwrap().outcome();
        assert!((outcome.p_accept - 0.25).abs() < 1e-14);
        assert!((outcome.p_restart - 0.75).abs() < 1e-14);
        assert!((outcome.p_reject).abs() < 1e-14);
    }

    #[test]
    fn ruin_walk_absorbs_right_with_probability_one_over_n_plus_one() {
        let spec = ruin();
        // n = 3: the start node plus walk nodes at positions 0..4.
        let g = build_config_graph(&spec, "aaa", &ProverStrategy::silent(), &Default::default())
            .unwrap();
        assert_eq!(g.node_count(), 6);
        let outcome = solve_absorption(&g).unwrap().outcome();
        assert!((outcome.p_accept - 0.25).abs() < 1e-12);
        assert!((outcome.p_reject - 0.75).abs() < 1e-12);
        for n in [1usize, 4, 9] {
            let input = "a".repeat(n);
            let g =
                build_config_graph(&spec, &input, &ProverStrategy::silent(), &Default::default())
                    .unwrap();
            let o = solve_absorption(&g).unwrap().outcome();
            assert!((o.p_accept - 1.0 / (n as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ruin_walk_matches_million_trial_simulation() {
        let spec = ruin();
        let est = monte_carlo(&spec, "aaa", &ProverStrategy::silent(), 1_000_000, 11, 100_000)
            .unwrap();
        assert_eq!(est.censored, 0);
        assert!((est.p_accept - 0.25).abs() <= 4.0 * est.std_error);
    }

    #[test]
    fn overall_acceptance_matches_closed_form() {
        let o = IterationOutcome {
            p_accept: 1.0 / 8.0,
            p_reject: 1.0 / 3.0,
            p_restart: 1.0 - 1.0 / 8.0 - 1.0 / 3.0,
            expected_steps: 1.0,
        };
        assert!((overall_acceptance(&o).unwrap() - 0.3).abs() < 1e-15);

        let complete = IterationOutcome {
            p_accept: 0.01,
            p_reject: 0.0,
            p_restart: 0.99,
            expected_steps: 1.0,
        };
        assert_eq!(overall_acceptance(&complete).unwrap(), 1.0);

        let never = IterationOutcome {
            p_accept: 0.0,
            p_reject: 0.2,
            p_restart: 0.8,
            expected_steps: 1.0,
        };
        assert_eq!(overall_acceptance(&never).unwrap(), 0.0);

        let stuck = IterationOutcome {
            p_accept: 0.0,
            p_reject: 0.0,
            p_restart: 1.0,
            expected_steps: 1.0,
        };
        assert!(matches!(overall_acceptance(&stuck), Err(Error::NonHalting)));
    }

    #[test]
    fn expected_runtime_scales_by_inverse_halting_probability() {
        let o = IterationOutcome {
            p_accept: 0.25,
            p_reject: 0.0,
            p_restart: 0.75,
            expected_steps: 10.0,
        };
        assert!((expected_runtime(&o).unwrap() - 40.0).abs() < 1e-12);
        let halt_always = IterationOutcome {
            p_accept: 1.0,
            p_reject: 0.0,
            p_restart: 0.0,
            expected_steps: 7.0,
        };
        assert_eq!(expected_runtime(&halt_always).unwrap(), 7.0);
    }

    #[test]
    fn expected_iterations_equal_inverse_halting_probability() {
        let spec = two_coins();
        let g = build_config_graph(&spec, "", &ProverStrategy::silent(), &Default::default())
            .unwrap();
        let iters = expected_iterations_via_loop(&g).unwrap();
        assert!((iters - 4.0).abs() < 1e-10);
    }

    #[test]
    fn two_iteration_unroll_composes_the_per_iteration_law() {
        let spec = two_coins();
        let one = solve_absorption(
            &build_config_graph(&spec, "", &ProverStrategy::silent(), &Default::default())
                .unwrap(),
        )
        .unwrap()
        .outcome();
        let two = solve_absorption(
            &build_config_graph(
                &spec,
                "",
                &ProverStrategy::silent(),
                &BuildOptions {
                    iterations: 2,
                    ..Default::default()
                },
            )
            .unwrap(),
        )
        .unwrap()
        .outcome();
        let pa1 = one.p_accept;
        let restart1 = one.p_restart;
        assert!((two.p_accept - (pa1 + restart1 * pa1)).abs() < 1e-12);
        assert!((two.p_restart - restart1 * restart1).abs() < 1e-12);
        assert!(
            (two.expected_steps - (one.expected_steps + restart1 * one.expected_steps)).abs()
                < 1e-12
        );
    }

    #[test]
    fn node_cap_is_enforced() {
        let spec = ruin();
        let err = build_config_graph(
            &spec,
            "aaaaaa",
            &ProverStrategy::silent(),
            &BuildOptions {
                node_cap: 3,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }

    #[test]
    fn diverging_chain_is_reported() {
        let mut b = SpecBuilder::new("livelock", &['a'], 0);
        let s0 = b.state("s0", StateKind::Reading);
        let spin = b.state("spin", StateKind::Reading);
        let acc = b.state("acc", StateKind::Accept);
        let rej = b.state("rej", StateKind::Reject);
        b.coin(s0, &[TapeSymbol::LeftMarker], vec![(0.5, acc, 0), (0.5, spin, 1)]);
        b.coin(spin, &[TapeSymbol::Input('a')], vec![(1.0, spin, 0)]);
        let spec = b.finish(s0, CVec::new(vec![]), rej);
        let g = build_config_graph(&spec, "a", &ProverStrategy::silent(), &Default::default())
            .unwrap();
        let err = solve_absorption(&g).unwrap_err();
        assert!(matches!(err, Error::DivergingChain { .. }));
    }

    #[test]
    fn monte_carlo_is_deterministic_and_validates_trials() {
        let spec = two_coins();
        let a = monte_carlo(&spec, "", &ProverStrategy::silent(), 20_000, 7, 10_000).unwrap();
        let b = monte_carlo(&spec, "", &ProverStrategy::silent(), 20_000, 7, 10_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, a.accepts + a.rejects + a.censored);

        let err = monte_carlo(&spec, "", &ProverStrategy::silent(), 0, 7, 10).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn step_cap_censors_instead_of_failing() {
        let spec = two_coins();
        let est = monte_carlo(&spec, "", &ProverStrategy::silent(), 500, 3, 2).unwrap();
        assert!(est.censored > 0);
        assert_eq!(est.trials, est.accepts + est.rejects + est.censored);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// The closed form equals the numerically summed geometric series
            /// Σ (1−Pa)^i (1−Pr)^i Pa truncated at relative tail 1e-12.
            #[test]
            fn overall_acceptance_matches_series(
                pa in 1e-6f64..1.0,
                pr in 0.0f64..1.0,
                scale in 0.0f64..1.0,
            ) {
                // Keep pa + pr <= 1 so the outcome is a probability law.
                let pa = pa * (1.0 - pr).max(1e-9);
                let pa = pa.max(1e-12);
                let _ = scale;
                let o = IterationOutcome {
                    p_accept: pa,
                    p_reject: pr,
                    p_restart: (1.0 - pa - pr).max(0.0),
                    expected_steps: 1.0,
                };
                let closed = overall_acceptance(&o).unwrap();
                let ratio = (1.0 - pa) * (1.0 - pr);
                let mut sum = 0.0;
                let mut term = pa;
                while term > 1e-12 * (sum + term) {
                    sum += term;
                    term *= ratio;
                    if ratio == 0.0 { break; }
                }
                prop_assert!((closed - sum).abs() < 1e-9, "closed={closed} series={sum}");
            }
        }
    }
}
