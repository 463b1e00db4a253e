//! Bacterial foraging over operation sequences.
//!
//! A bacterium's position is a precedence-feasible operation sequence and its
//! fitness is the decoded makespan. Tumbles rebuild a whole sequence, swims
//! rebuild the suffix after a random cut. Under [`Algorithm::Abfo`] every
//! rebuild follows the ant transition rule over a shared pheromone matrix;
//! [`Algorithm::Bfo`] picks uniformly among eligible operations instead.

use crate::colony::{
    desirability_weights, global_update, init_pheromone, select_next, GlobalBest, LocalTrail,
    PheromoneMatrix, TrailMut, TransitionParams,
};
use crate::decode::{Decoder, Eligibility, OperationSequence, Schedule};
use crate::model::{lower_bound, Instance, OpId, ParamsError, SolverParams, SwarmParams, Time};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Ant-guided bacterial foraging.
    Abfo,
    /// Plain bacterial foraging with uniform random moves.
    Bfo,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Abfo => "abfo",
            Algorithm::Bfo => "bfo",
        }
    }

    fn stream_tag(self) -> u64 {
        match self {
            Algorithm::Abfo => 0xA_BF0,
            Algorithm::Bfo => 0xB_F0,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abfo" => Ok(Algorithm::Abfo),
            "bfo" => Ok(Algorithm::Bfo),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bacterium {
    pub position: OperationSequence,
    /// Makespan of `position`.
    pub fitness: Time,
    /// Sum of fitness values seen since the last reproduction.
    pub health: Time,
    /// Start times of `position`, scaled by the instance lower bound.
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub bacteria: Vec<Bacterium>,
    pub best: GlobalBest,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForageError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("population size {0} is odd")]
    OddPopulation(usize),
}

/// Extends `prefix` to a full sequence with the ant transition rule, applying a
/// local trail update to every edge taken.
pub fn construct_sequence<T: TrailMut, R: Rng>(
    inst: &Instance,
    trail: &mut T,
    weights: &[f64],
    params: &TransitionParams,
    rng: &mut R,
    prefix: &[OpId],
) -> OperationSequence {
    let source = inst.num_ops();
    let mut elig = Eligibility::new(inst);
    let mut seq = Vec::with_capacity(inst.num_ops());
    for &op in prefix {
        elig.push(op);
        seq.push(op);
    }
    let mut cands = Vec::new();
    let mut from = prefix.last().copied().unwrap_or(source);
    loop {
        elig.fill_candidates(&mut cands);
        if cands.is_empty() {
            break;
        }
        let q: f64 = rng.gen();
        let u: f64 = if q > params.q0 && cands.len() > 1 {
            rng.gen()
        } else {
            0.0
        };
        let next = select_next(&*trail, from, &cands, weights, params, q, u)
            .expect("candidates are non-empty before completion");
        trail.local_update((from, next), params);
        elig.push(next);
        seq.push(next);
        from = next;
    }
    seq
}

/// Extends `prefix` by choosing uniformly among eligible operations at each step.
pub fn random_sequence<R: Rng>(inst: &Instance, rng: &mut R, prefix: &[OpId]) -> OperationSequence {
    let mut elig = Eligibility::new(inst);
    let mut seq = Vec::with_capacity(inst.num_ops());
    for &op in prefix {
        elig.push(op);
        seq.push(op);
    }
    let mut cands = Vec::new();
    loop {
        elig.fill_candidates(&mut cands);
        if cands.is_empty() {
            break;
        }
        let next = cands[rng.gen_range(0..cands.len())];
        elig.push(next);
        seq.push(next);
    }
    seq
}

/// Cell-to-cell attraction/repulsion felt at `theta` from every bacterium in `others`.
pub fn swarm_cost_at<'a>(
    theta: &[f64],
    others: impl IntoIterator<Item = &'a [f64]>,
    params: &SwarmParams,
) -> f64 {
    if !params.enabled || params.magnitude == 0.0 {
        return 0.0;
    }
    let (mut attract, mut repel) = (0.0, 0.0);
    for other in others {
        let dist2: f64 = theta
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        attract += (-params.attract_width * dist2).exp();
        repel += (-params.repel_width * dist2).exp();
    }
    -params.magnitude * (attract - repel)
}

pub fn swarm_cost(pop: &Population, i: usize, params: &SwarmParams) -> f64 {
    swarm_cost_at(
        &pop.bacteria[i].theta,
        pop.bacteria.iter().map(|b| b.theta.as_slice()),
        params,
    )
}

/// Keeps the healthier half (lowest accumulated makespan, stable on ties) and
/// duplicates it. Survivors come first, followed by their copies in the same order.
pub fn reproduce(pop: &mut Population) -> Result<(), ForageError> {
    let s = pop.bacteria.len();
    if !s.is_multiple_of(2) {
        return Err(ForageError::OddPopulation(s));
    }
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by_key(|&i| pop.bacteria[i].health);
    let mut survivors: Vec<Bacterium> = order[..s / 2]
        .iter()
        .map(|&i| pop.bacteria[i].clone())
        .collect();
    survivors.iter_mut().for_each(|b| b.health = 0);
    let copies = survivors.clone();
    survivors.extend(copies);
    pop.bacteria = survivors;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Chemotactic step count; 0 is the initial population.
    pub step: usize,
    pub makespan: Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverRun {
    pub best_makespan: Time,
    pub sequence: OperationSequence,
    pub schedule: Schedule,
    pub evaluations: u64,
    pub steps: usize,
    pub trace: Vec<TracePoint>,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one `(seed, parts...)` coordinate.
fn substream(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    let key = parts.iter().fold(mix(seed), |h, &p| mix(h ^ mix(p)));
    ChaCha8Rng::seed_from_u64(key)
}

const INIT_STREAM: u64 = 1;
const STEP_STREAM: u64 = 2;
const DISPERSE_STREAM: u64 = 3;

/// Outcome of one bacterium's chemotactic step, merged in index order.
struct Moved {
    bacterium: Bacterium,
    best: Option<(OperationSequence, Time)>,
    evaluations: u64,
    log: Vec<(usize, OpId)>,
}

/// Solver state shared across the foraging loops.
pub struct Forager<'a> {
    inst: &'a Instance,
    params: SolverParams,
    algo: Algorithm,
    weights: Vec<f64>,
    scale: f64,
    floor: Time,
    pub tau: PheromoneMatrix,
    evaluations: u64,
    steps: usize,
    parallel: bool,
}

impl<'a> Forager<'a> {
    pub fn new(inst: &'a Instance, params: &SolverParams, algo: Algorithm) -> Result<Self, ForageError> {
        params.validate()?;
        if let Some(cap) = params.max_evaluations {
            if cap < params.population as u64 {
                return Err(ParamsError::Invalid {
                    key: "max_evaluations",
                    reason: format!("{cap} is below the population size {}", params.population),
                }
                .into());
            }
        }
        let tau = init_pheromone(inst, &params.transition).map_err(|e| ParamsError::Invalid {
            key: "tau0",
            reason: e.to_string(),
        })?;
        let floor = lower_bound(inst);
        Ok(Forager {
            inst,
            params: params.clone(),
            algo,
            weights: desirability_weights(inst, params.transition.beta),
            scale: (floor as f64).max(1.0),
            floor,
            tau,
            evaluations: 0,
            steps: 0,
            parallel: false,
        })
    }

    /// Evaluate bacteria concurrently within each chemotactic step. Results do not change.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn remaining(&self) -> u64 {
        self.params
            .max_evaluations
            .map_or(u64::MAX, |cap| cap.saturating_sub(self.evaluations))
    }

    fn evaluate(&self, position: OperationSequence, decoder: &mut Decoder, starts: &mut Vec<Time>) -> Bacterium {
        let fitness = decoder.start_times(&position, starts);
        let theta = starts.iter().map(|&t| t as f64 / self.scale).collect();
        Bacterium {
            position,
            fitness,
            health: 0,
            theta,
        }
    }

    fn rebuild<R: Rng>(&self, trail: &mut LocalTrail, rng: &mut R, prefix: &[OpId]) -> OperationSequence {
        match self.algo {
            Algorithm::Abfo => construct_sequence(
                self.inst,
                trail,
                &self.weights,
                &self.params.transition,
                rng,
                prefix,
            ),
            Algorithm::Bfo => random_sequence(self.inst, rng, prefix),
        }
    }

    /// Population of uniformly random feasible sequences.
    pub fn init_population(&mut self) -> Population {
        let mut decoder = Decoder::new(self.inst);
        let mut starts = Vec::new();
        let bacteria: Vec<Bacterium> = (0..self.params.population)
            .map(|i| {
                let mut rng = substream(
                    self.params.seed,
                    &[self.algo.stream_tag(), INIT_STREAM, i as u64],
                );
                let seq = random_sequence(self.inst, &mut rng, &[]);
                self.evaluate(seq, &mut decoder, &mut starts)
            })
            .collect();
        self.evaluations += bacteria.len() as u64;
        let leader = bacteria
            .iter()
            .min_by_key(|b| b.fitness)
            .expect("population is non-empty");
        let best = GlobalBest {
            sequence: leader.position.clone(),
            makespan: leader.fitness,
        };
        Population { bacteria, best }
    }

    fn move_one(&self, pop: &Population, i: usize, allowance: u64) -> Moved {
        let inst = self.inst;
        let swarm = &self.params.swarm;
        let mut rng = substream(
            self.params.seed,
            &[self.algo.stream_tag(), STEP_STREAM, self.steps as u64, i as u64],
        );
        let mut trail = LocalTrail::new(&self.tau);
        let mut decoder = Decoder::new(inst);
        let mut starts = Vec::new();
        let others = || pop.bacteria.iter().map(|b| b.theta.as_slice());
        let cost = |b: &Bacterium| b.fitness as f64 + swarm_cost_at(&b.theta, others(), swarm);

        let mut current = pop.bacteria[i].clone();
        let mut current_cost = cost(&current);
        let mut best: Option<(OperationSequence, Time)> = None;
        let mut used = 0;
        let note_best = |b: &Bacterium, best: &mut Option<(OperationSequence, Time)>| {
            if best.as_ref().is_none_or(|(_, mk)| b.fitness < *mk) {
                *best = Some((b.position.clone(), b.fitness));
            }
        };

        if allowance > 0 {
            // tumble
            let seq = self.rebuild(&mut trail, &mut rng, &[]);
            let cand = self.evaluate(seq, &mut decoder, &mut starts);
            used += 1;
            note_best(&cand, &mut best);
            let cand_cost = cost(&cand);
            if cand_cost < current_cost {
                current = Bacterium {
                    health: current.health,
                    ..cand
                };
                current_cost = cand_cost;
            }
            // swim while it pays off
            for _ in 0..self.params.swims {
                if used >= allowance {
                    break;
                }
                let cut = rng.gen_range(0..inst.num_ops());
                let seq = self.rebuild(&mut trail, &mut rng, &current.position[..cut]);
                let cand = self.evaluate(seq, &mut decoder, &mut starts);
                used += 1;
                note_best(&cand, &mut best);
                let cand_cost = cost(&cand);
                if cand_cost < current_cost {
                    current = Bacterium {
                        health: current.health,
                        ..cand
                    };
                    current_cost = cand_cost;
                } else {
                    break;
                }
            }
        }
        current.health += current.fitness;
        Moved {
            bacterium: current,
            best,
            evaluations: used,
            log: trail.into_log(),
        }
    }

    /// One tumble-and-swim round for every bacterium, followed by the global trail update.
    ///
    /// Every bacterium reads the trail and its neighbours as they were at the start
    /// of the step; local trail updates are merged afterwards in index order, so the
    /// outcome does not depend on evaluation order.
    pub fn chemotaxis_step(&mut self, pop: &mut Population) -> bool {
        let per = 1 + self.params.swims as u64;
        let remaining = self.remaining();
        let allowance = |i: usize| per.min(remaining.saturating_sub(i as u64 * per));
        let this: &Self = self;
        let snapshot: &Population = pop;
        let moved: Vec<Moved> = if self.parallel {
            (0..snapshot.bacteria.len())
                .into_par_iter()
                .map(|i| this.move_one(snapshot, i, allowance(i)))
                .collect()
        } else {
            (0..snapshot.bacteria.len())
                .map(|i| this.move_one(snapshot, i, allowance(i)))
                .collect()
        };

        let mut improved = false;
        for (slot, m) in pop.bacteria.iter_mut().zip(moved) {
            self.evaluations += m.evaluations;
            if self.algo == Algorithm::Abfo {
                self.tau.replay_local(&m.log, &self.params.transition);
            }
            if let Some((seq, mk)) = m.best {
                improved |= pop.best.offer(&seq, mk);
            }
            *slot = m.bacterium;
        }
        if self.algo == Algorithm::Abfo {
            global_update(&mut self.tau, &pop.best, &self.params.transition);
        }
        self.steps += 1;
        improved
    }

    /// Replaces each bacterium with probability `p_ed` by a uniformly random
    /// sequence. The global best is kept regardless.
    pub fn eliminate_disperse(&mut self, pop: &mut Population, event: usize) -> bool {
        let mut rng = substream(
            self.params.seed,
            &[self.algo.stream_tag(), DISPERSE_STREAM, event as u64],
        );
        let mut decoder = Decoder::new(self.inst);
        let mut starts = Vec::new();
        let mut improved = false;
        for i in 0..pop.bacteria.len() {
            let draw: f64 = rng.gen();
            if draw >= self.params.dispersal_prob || self.remaining() == 0 {
                continue;
            }
            let seq = random_sequence(self.inst, &mut rng, &[]);
            let fresh = self.evaluate(seq, &mut decoder, &mut starts);
            self.evaluations += 1;
            improved |= pop.best.offer(&fresh.position, fresh.fitness);
            pop.bacteria[i] = fresh;
        }
        improved
    }

    fn finished(&self, pop: &Population) -> bool {
        self.remaining() == 0 || pop.best.makespan <= self.floor
    }

    /// Full elimination-dispersal / reproduction / chemotaxis nesting.
    ///
    /// Stops early once the evaluation budget is spent or the best makespan
    /// reaches the instance lower bound.
    pub fn run(mut self) -> Result<SolverRun, ForageError> {
        let mut pop = self.init_population();
        let mut trace = vec![TracePoint {
            step: 0,
            makespan: pop.best.makespan,
        }];
        let p = self.params.clone();
        'search: for event in 0..p.dispersals {
            for _ in 0..p.reproductions {
                for _ in 0..p.chemotactic_steps {
                    if self.finished(&pop) {
                        break 'search;
                    }
                    if self.chemotaxis_step(&mut pop) {
                        trace.push(TracePoint {
                            step: self.steps,
                            makespan: pop.best.makespan,
                        });
                    }
                }
                reproduce(&mut pop)?;
            }
            if self.finished(&pop) {
                break;
            }
            if self.eliminate_disperse(&mut pop, event) {
                trace.push(TracePoint {
                    step: self.steps,
                    makespan: pop.best.makespan,
                });
            }
        }
        let schedule = Decoder::new(self.inst).schedule(&pop.best.sequence);
        Ok(SolverRun {
            best_makespan: pop.best.makespan,
            sequence: pop.best.sequence,
            schedule,
            evaluations: self.evaluations,
            steps: self.steps,
            trace,
        })
    }
}

pub fn run_solver(inst: &Instance, params: &SolverParams, algo: Algorithm) -> Result<SolverRun, ForageError> {
    Forager::new(inst, params, algo)?.run()
}
