use super::{Decoder, Eligibility, OperationSequence, Schedule};
use crate::model::{lower_bound, Instance, OpId, Time};

pub const DEFAULT_OP_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("instance has {ops} operations, exhaustive search is limited to {limit}")]
    TooLarge { ops: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOptimum {
    pub makespan: Time,
    /// Lexicographically smallest sequence attaining `makespan`.
    pub sequence: OperationSequence,
    pub schedule: Schedule,
}

/// Minimum makespan over every precedence-feasible sequence.
///
/// Sequences are enumerated depth-first in ascending operation order. A branch
/// is cut only when its partial bound cannot strictly beat the incumbent, so the
/// first optimal sequence found, which is the lexicographically smallest, is kept.
pub fn exact_optimum(inst: &Instance, op_limit: usize) -> Result<ExactOptimum, ExactError> {
    let ops = inst.num_ops();
    if ops > op_limit {
        return Err(ExactError::TooLarge {
            ops,
            limit: op_limit,
        });
    }
    let mut search = Search {
        inst,
        floor: lower_bound(inst),
        elig: Eligibility::new(inst),
        machine_free: vec![0; inst.m],
        job_free: vec![0; inst.n],
        machine_left: (0..inst.m)
            .map(|mc| inst.jobs.iter().map(|j| j.durations[mc]).sum())
            .collect(),
        job_left: inst.jobs.iter().map(|j| j.durations.iter().sum()).collect(),
        prefix: Vec::with_capacity(ops),
        best: Time::MAX,
        best_seq: Vec::new(),
        buffers: vec![Vec::new(); ops + 1],
    };
    search.descend(0);
    let schedule = Decoder::new(inst).schedule(&search.best_seq);
    debug_assert_eq!(schedule.makespan, search.best);
    Ok(ExactOptimum {
        makespan: search.best,
        sequence: search.best_seq,
        schedule,
    })
}

struct Search<'a> {
    inst: &'a Instance,
    floor: Time,
    elig: Eligibility<'a>,
    machine_free: Vec<Time>,
    job_free: Vec<Time>,
    machine_left: Vec<Time>,
    job_left: Vec<Time>,
    prefix: Vec<OpId>,
    best: Time,
    best_seq: Vec<OpId>,
    buffers: Vec<Vec<OpId>>,
}

impl Search<'_> {
    fn bound(&self, current: Time) -> Time {
        let machines = self
            .machine_free
            .iter()
            .zip(&self.machine_left)
            .map(|(f, l)| f + l)
            .max()
            .unwrap_or(0);
        let jobs = self
            .job_free
            .iter()
            .zip(&self.job_left)
            .map(|(f, l)| f + l)
            .max()
            .unwrap_or(0);
        current.max(machines).max(jobs)
    }

    /// Returns true once the incumbent reaches the instance lower bound.
    fn descend(&mut self, current: Time) -> bool {
        if self.elig.is_complete() {
            if current < self.best {
                self.best = current;
                self.best_seq = self.prefix.clone();
            }
            return self.best <= self.floor;
        }
        let depth = self.prefix.len();
        let mut cands = std::mem::take(&mut self.buffers[depth]);
        self.elig.fill_candidates(&mut cands);
        let m = self.inst.m;
        let mut done = false;
        for &op in &cands {
            let job = op / m;
            let machine = self.inst.machine_of(op);
            let d = self.inst.duration_of(op);
            let (mf, jf) = (self.machine_free[machine], self.job_free[job]);
            let end = mf.max(jf) + d;
            self.machine_free[machine] = end;
            self.job_free[job] = end;
            self.machine_left[machine] -= d;
            self.job_left[job] -= d;
            let next = current.max(end);
            if self.bound(next) < self.best {
                self.elig.push(op);
                self.prefix.push(op);
                done = self.descend(next);
                self.prefix.pop();
                self.elig.pop(op);
            }
            self.machine_free[machine] = mf;
            self.job_free[job] = jf;
            self.machine_left[machine] += d;
            self.job_left[job] += d;
            if done {
                break;
            }
        }
        self.buffers[depth] = cands;
        done
    }
}
