//! Pheromone trails and the ant colony system transition rule.
//!
//! Trails live on directed edges `(r, s)` between operations, plus a virtual
//! source node from which the first operation of every sequence is chosen.

use crate::decode::{Eligibility, OperationSequence};
use crate::model::{lower_bound, Instance, OpId, Time};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Stand-in processing time for zero-duration operations when computing desirability.
pub const ZERO_DURATION_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionParams {
    /// Exponent on desirability.
    pub beta: f64,
    /// Probability of exploiting the best-scored edge instead of sampling.
    pub q0: f64,
    /// Local evaporation rate.
    pub rho: f64,
    /// Global decay rate.
    pub alpha_g: f64,
    /// Base trail. `None` derives `1 / (N * lower_bound)` from the instance.
    pub tau0: Option<f64>,
}

impl Default for TransitionParams {
    fn default() -> Self {
        TransitionParams {
            beta: 2.0,
            q0: 0.9,
            rho: 0.1,
            alpha_g: 0.1,
            tau0: None,
        }
    }
}

impl TransitionParams {
    pub fn resolve_tau0(&self, inst: &Instance) -> f64 {
        self.tau0.unwrap_or_else(|| {
            let lb = (lower_bound(inst) as f64).max(ZERO_DURATION_EPSILON);
            1.0 / (inst.num_ops() as f64 * lb)
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ColonyError {
    #[error("initial trail must be positive, got {0}")]
    NonPositiveTau0(f64),
    #[error("no candidate operations to choose from")]
    NoCandidates,
}

/// Read access to trail levels.
pub trait Trail {
    fn level(&self, from: usize, to: OpId) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    ops: usize,
    tau0: f64,
    /// Row-major, `(ops + 1) x ops`; the last row is the source node.
    tau: Vec<f64>,
}

impl PheromoneMatrix {
    pub fn new(ops: usize, tau0: f64) -> Result<Self, ColonyError> {
        if !(tau0 > 0.0 && tau0.is_finite()) {
            return Err(ColonyError::NonPositiveTau0(tau0));
        }
        Ok(PheromoneMatrix {
            ops,
            tau0,
            tau: vec![tau0; (ops + 1) * ops],
        })
    }

    /// Row index of the virtual source node.
    pub fn source(&self) -> usize {
        self.ops
    }

    pub fn ops(&self) -> usize {
        self.ops
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn rows(&self) -> usize {
        self.ops + 1
    }

    pub fn get(&self, from: usize, to: OpId) -> f64 {
        self.tau[from * self.ops + to]
    }

    pub fn set(&mut self, from: usize, to: OpId, value: f64) {
        self.tau[from * self.ops + to] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.tau
    }

    pub fn scale(&mut self, factor: f64) {
        self.tau.iter_mut().for_each(|t| *t *= factor);
    }
}

impl Trail for PheromoneMatrix {
    fn level(&self, from: usize, to: OpId) -> f64 {
        self.get(from, to)
    }
}

/// Trails that accept local (per-edge) evaporation.
pub trait TrailMut: Trail {
    fn local_update(&mut self, edge: (usize, OpId), params: &TransitionParams);
}

impl TrailMut for PheromoneMatrix {
    fn local_update(&mut self, edge: (usize, OpId), params: &TransitionParams) {
        local_update(self, edge, params);
    }
}

/// Private view over a shared matrix that records local updates without
/// touching the shared state. The log can later be replayed with
/// [`PheromoneMatrix::replay_local`].
#[derive(Debug)]
pub struct LocalTrail<'a> {
    base: &'a PheromoneMatrix,
    touched: HashMap<(usize, OpId), f64>,
    log: Vec<(usize, OpId)>,
}

impl<'a> LocalTrail<'a> {
    pub fn new(base: &'a PheromoneMatrix) -> Self {
        LocalTrail {
            base,
            touched: HashMap::new(),
            log: Vec::new(),
        }
    }

    pub fn into_log(self) -> Vec<(usize, OpId)> {
        self.log
    }
}

impl Trail for LocalTrail<'_> {
    fn level(&self, from: usize, to: OpId) -> f64 {
        self.touched
            .get(&(from, to))
            .copied()
            .unwrap_or_else(|| self.base.get(from, to))
    }
}

impl TrailMut for LocalTrail<'_> {
    fn local_update(&mut self, edge: (usize, OpId), params: &TransitionParams) {
        let old = self.level(edge.0, edge.1);
        self.touched
            .insert(edge, evaporate(old, params.rho, self.base.tau0));
        self.log.push(edge);
    }
}

fn evaporate(old: f64, rho: f64, tau0: f64) -> f64 {
    (1.0 - rho) * old + rho * tau0
}

/// Best sequence found so far and its makespan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalBest {
    pub sequence: OperationSequence,
    pub makespan: Time,
}

impl GlobalBest {
    /// Replaces the incumbent on strict improvement. Returns whether it did.
    pub fn offer(&mut self, sequence: &[OpId], makespan: Time) -> bool {
        if makespan < self.makespan {
            self.makespan = makespan;
            self.sequence.clear();
            self.sequence.extend_from_slice(sequence);
            true
        } else {
            false
        }
    }
}

pub fn init_pheromone(inst: &Instance, params: &TransitionParams) -> Result<PheromoneMatrix, ColonyError> {
    PheromoneMatrix::new(inst.num_ops(), params.resolve_tau0(inst))
}

/// Operations that may extend `partial` while keeping it precedence-feasible.
pub fn candidates(inst: &Instance, partial: &[OpId]) -> Vec<OpId> {
    let mut elig = Eligibility::new(inst);
    for &op in partial {
        elig.push(op);
    }
    elig.candidates()
}

/// Inverse processing time of the target operation.
pub fn desirability(inst: &Instance, op: OpId) -> f64 {
    let d = inst.duration_of(op);
    if d == 0 {
        1.0 / ZERO_DURATION_EPSILON
    } else {
        1.0 / d as f64
    }
}

/// `desirability^beta` for every operation, indexed by id.
pub fn desirability_weights(inst: &Instance, beta: f64) -> Vec<f64> {
    (0..inst.num_ops())
        .map(|op| desirability(inst, op).powf(beta))
        .collect()
}

/// Pseudo-random proportional rule.
///
/// With `q <= q0` returns the candidate maximising `tau * weight`, lowest id on
/// ties. Otherwise samples proportionally to `tau * weight`, using `u` in `[0, 1)`
/// as the roulette position.
pub fn select_next<T: Trail + ?Sized>(
    trail: &T,
    from: usize,
    cands: &[OpId],
    weights: &[f64],
    params: &TransitionParams,
    q: f64,
    u: f64,
) -> Result<OpId, ColonyError> {
    match cands {
        [] => return Err(ColonyError::NoCandidates),
        [only] => return Ok(*only),
        _ => {}
    }
    let score = |op: OpId| trail.level(from, op) * weights[op];
    if q <= params.q0 {
        let mut best = cands[0];
        let mut best_score = score(best);
        for &op in &cands[1..] {
            let s = score(op);
            if s > best_score || (s == best_score && op < best) {
                best = op;
                best_score = s;
            }
        }
        return Ok(best);
    }
    let total: f64 = cands.iter().map(|&op| score(op)).sum();
    let target = u * total;
    let mut acc = 0.0;
    for &op in cands {
        acc += score(op);
        if acc > target {
            return Ok(op);
        }
    }
    Ok(*cands.last().expect("non-empty"))
}

/// Sampling distribution used when exploring.
pub fn transition_probabilities<T: Trail + ?Sized>(
    trail: &T,
    from: usize,
    cands: &[OpId],
    weights: &[f64],
) -> Vec<f64> {
    let scores: Vec<f64> = cands
        .iter()
        .map(|&op| trail.level(from, op) * weights[op])
        .collect();
    let total: f64 = scores.iter().sum();
    scores.into_iter().map(|s| s / total).collect()
}

/// Pulls one edge toward the base trail.
pub fn local_update(tau: &mut PheromoneMatrix, edge: (usize, OpId), params: &TransitionParams) {
    let old = tau.get(edge.0, edge.1);
    tau.set(edge.0, edge.1, evaporate(old, params.rho, tau.tau0));
}

impl PheromoneMatrix {
    /// Applies logged local updates in order.
    pub fn replay_local(&mut self, log: &[(usize, OpId)], params: &TransitionParams) {
        for &edge in log {
            local_update(self, edge, params);
        }
    }
}

/// Decays every edge and reinforces the edges of the best tour by `1 / L_gb`.
pub fn global_update(tau: &mut PheromoneMatrix, best: &GlobalBest, params: &TransitionParams) {
    let alpha = params.alpha_g;
    if alpha == 0.0 {
        return;
    }
    let deposit = alpha / (best.makespan as f64).max(ZERO_DURATION_EPSILON);
    tau.scale(1.0 - alpha);
    let mut from = tau.source();
    for &op in &best.sequence {
        let v = tau.get(from, op);
        tau.set(from, op, v + deposit);
        from = op;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Instance, Job, ShopClass};

    fn two_op_instance() -> Instance {
        Instance::new(
            "pair",
            1,
            vec![
                Job::new(ShopClass::Job, vec![0], vec![2]),
                Job::new(ShopClass::Job, vec![0], vec![1]),
            ],
        )
        .unwrap()
    }

    /// A has trail 0.5 and desirability 0.5; B has trail 0.2 and desirability 1.0.
    fn ab_setup() -> (PheromoneMatrix, Vec<f64>, TransitionParams) {
        let inst = two_op_instance();
        let mut tau = PheromoneMatrix::new(2, 0.1).unwrap();
        let src = tau.source();
        tau.set(src, 0, 0.5);
        tau.set(src, 1, 0.2);
        let params = TransitionParams {
            beta: 1.0,
            q0: 0.5,
            ..TransitionParams::default()
        };
        let weights = desirability_weights(&inst, params.beta);
        assert_eq!(weights, vec![0.5, 1.0]);
        (tau, weights, params)
    }

    #[test]
    fn init_fills_uniformly() {
        let t1 = Instance::table1();
        let params = TransitionParams {
            tau0: Some(0.1),
            ..TransitionParams::default()
        };
        let tau = init_pheromone(&t1, &params).unwrap();
        assert_eq!(tau.rows(), 10);
        assert_eq!(tau.values().len(), 90);
        assert!(tau.values().iter().all(|&v| v == 0.1));
    }

    #[test]
    fn init_rejects_zero_tau0() {
        let params = TransitionParams {
            tau0: Some(0.0),
            ..TransitionParams::default()
        };
        assert_eq!(
            init_pheromone(&Instance::table1(), &params),
            Err(ColonyError::NonPositiveTau0(0.0))
        );
    }

    #[test]
    fn default_tau0_for_table1() {
        let t1 = Instance::table1();
        let tau0 = TransitionParams::default().resolve_tau0(&t1);
        assert!((tau0 - 1.0 / 63.0).abs() < 1e-15);
    }

    #[test]
    fn table1_first_candidates() {
        let t1 = Instance::table1();
        assert_eq!(candidates(&t1, &[]), vec![0, 3, 6, 7, 8]);
        let full = crate::decode::tests::reference_sequence(&t1);
        assert!(candidates(&t1, &full).is_empty());
        let one = Instance::new("one", 1, vec![Job::new(ShopClass::Open, vec![0], vec![3])]).unwrap();
        assert_eq!(candidates(&one, &[]), vec![0]);
    }

    #[test]
    fn desirability_values() {
        let inst = Instance::new(
            "d",
            3,
            vec![Job::new(ShopClass::Flow, vec![0, 1, 2], vec![2, 1, 0])],
        )
        .unwrap();
        assert_eq!(desirability(&inst, 0), 0.5);
        assert_eq!(desirability(&inst, 1), 1.0);
        assert_eq!(desirability(&inst, 2), 2.0);
    }

    #[test]
    fn exploitation_picks_highest_score() {
        let (tau, w, params) = ab_setup();
        let src = tau.source();
        assert_eq!(select_next(&tau, src, &[0, 1], &w, &params, 0.0, 0.99), Ok(0));
    }

    #[test]
    fn exploitation_ties_prefer_lowest_id() {
        let tau = PheromoneMatrix::new(3, 1.0).unwrap();
        let w = vec![1.0, 2.0, 2.0];
        let params = TransitionParams::default();
        assert_eq!(select_next(&tau, 3, &[2, 1, 0], &w, &params, 0.0, 0.0), Ok(1));
    }

    #[test]
    fn exploration_probabilities() {
        let (tau, w, _) = ab_setup();
        let p = transition_probabilities(&tau, tau.source(), &[0, 1], &w);
        assert!((p[0] - 0.25 / 0.45).abs() < 1e-12);
        assert!((p[1] - 0.20 / 0.45).abs() < 1e-12);
    }

    #[test]
    fn single_candidate_always_chosen() {
        let (tau, w, params) = ab_setup();
        for q in [0.0, 0.5, 1.0] {
            assert_eq!(select_next(&tau, tau.source(), &[1], &w, &params, q, 0.3), Ok(1));
        }
        assert_eq!(
            select_next(&tau, tau.source(), &[], &w, &params, 0.0, 0.0),
            Err(ColonyError::NoCandidates)
        );
    }

    #[test]
    fn local_update_arithmetic() {
        let params = TransitionParams {
            rho: 0.1,
            ..TransitionParams::default()
        };
        let mut tau = PheromoneMatrix::new(2, 0.1).unwrap();
        local_update(&mut tau, (0, 1), &params);
        assert_eq!(tau.get(0, 1), 0.1);
        tau.set(0, 1, 1.0);
        local_update(&mut tau, (0, 1), &params);
        assert!((tau.get(0, 1) - 0.91).abs() < 1e-12);
        assert_eq!(tau.get(1, 0), 0.1);
        let frozen = TransitionParams { rho: 0.0, ..params };
        local_update(&mut tau, (0, 1), &frozen);
        assert!((tau.get(0, 1) - 0.91).abs() < 1e-12);
    }

    #[test]
    fn local_trail_replay_matches_direct_updates() {
        let params = TransitionParams::default();
        let mut direct = PheromoneMatrix::new(3, 0.2).unwrap();
        direct.set(3, 1, 0.9);
        let base = direct.clone();
        let mut view = LocalTrail::new(&base);
        for edge in [(3, 1), (1, 0), (3, 1)] {
            view.local_update(edge, &params);
            local_update(&mut direct, edge, &params);
            assert_eq!(view.level(edge.0, edge.1), direct.get(edge.0, edge.1));
        }
        let log = view.into_log();
        let mut replayed = base.clone();
        replayed.replay_local(&log, &params);
        assert_eq!(replayed, direct);
    }

    #[test]
    fn global_update_arithmetic() {
        let params = TransitionParams {
            alpha_g: 0.1,
            ..TransitionParams::default()
        };
        let mut tau = PheromoneMatrix::new(2, 0.5).unwrap();
        let best = GlobalBest {
            sequence: vec![1, 0],
            makespan: 7,
        };
        global_update(&mut tau, &best, &params);
        let on = 0.45 + 0.1 / 7.0;
        assert!((tau.get(2, 1) - on).abs() < 1e-12);
        assert!((tau.get(1, 0) - on).abs() < 1e-12);
        assert_eq!(tau.get(2, 0), 0.5 * (1.0 - 0.1));
        assert_eq!(tau.get(0, 1), 0.5 * (1.0 - 0.1));

        let mut untouched = PheromoneMatrix::new(2, 0.5).unwrap();
        global_update(
            &mut untouched,
            &best,
            &TransitionParams {
                alpha_g: 0.0,
                ..params
            },
        );
        assert_eq!(untouched, PheromoneMatrix::new(2, 0.5).unwrap());
    }
}
