//! Semi-active decoding of operation sequences into timed schedules.

mod exact;
mod gantt;

pub use exact::{exact_optimum, ExactError, ExactOptimum, DEFAULT_OP_LIMIT};
pub use gantt::render_gantt;

use crate::model::{Instance, OpId, Time};
use serde::{Deserialize, Serialize};

/// A total order over all `n * m` operations, by [`OpId`].
pub type OperationSequence = Vec<OpId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: Time,
    pub end: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    /// Indexed by [`OpId`].
    pub intervals: Vec<Interval>,
    pub makespan: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("sequence has {found} operations, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("operation {op} is out of range")]
    UnknownOp { op: OpId },
    #[error("operation {op} appears more than once")]
    Duplicate { op: OpId },
    #[error("operation {op} is sequenced before its route predecessor {predecessor}")]
    Precedence { predecessor: OpId, op: OpId },
}

/// Tracks which operations may be sequenced next.
///
/// Routed (JOB/FLOW) jobs expose only their next route operation; OPEN jobs
/// expose every operation not yet sequenced.
#[derive(Debug, Clone)]
pub struct Eligibility<'a> {
    inst: &'a Instance,
    next: Vec<usize>,
    done: Vec<bool>,
    remaining: usize,
}

impl<'a> Eligibility<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Eligibility {
            inst,
            next: vec![0; inst.n],
            done: vec![false; inst.num_ops()],
            remaining: inst.num_ops(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.remaining == 0
    }

    pub fn is_eligible(&self, op: OpId) -> bool {
        let m = self.inst.m;
        let job = op / m;
        if self.done[op] {
            return false;
        }
        !self.inst.jobs[job].class.is_routed() || self.next[job] == op % m
    }

    /// Eligible operations in ascending id order (i.e. by `(job, op_index)`).
    pub fn fill_candidates(&self, out: &mut Vec<OpId>) {
        out.clear();
        let m = self.inst.m;
        for (j, job) in self.inst.jobs.iter().enumerate() {
            if job.class.is_routed() {
                if self.next[j] < m {
                    out.push(j * m + self.next[j]);
                }
            } else {
                out.extend((j * m..(j + 1) * m).filter(|&op| !self.done[op]));
            }
        }
    }

    pub fn candidates(&self) -> Vec<OpId> {
        let mut out = Vec::new();
        self.fill_candidates(&mut out);
        out
    }

    /// Marks `op` as sequenced. The caller must have checked eligibility.
    pub fn push(&mut self, op: OpId) {
        debug_assert!(self.is_eligible(op));
        self.done[op] = true;
        self.next[op / self.inst.m] += 1;
        self.remaining -= 1;
    }

    /// Undoes the most recent [`push`](Self::push) of `op`.
    pub fn pop(&mut self, op: OpId) {
        self.done[op] = false;
        self.next[op / self.inst.m] -= 1;
        self.remaining += 1;
    }
}

/// Checks that `seq` is a precedence-feasible permutation of all operations.
pub fn check_sequence(inst: &Instance, seq: &[OpId]) -> Result<(), DecodeError> {
    let total = inst.num_ops();
    if seq.len() != total {
        return Err(DecodeError::WrongLength {
            expected: total,
            found: seq.len(),
        });
    }
    let mut seen = vec![false; total];
    for &op in seq {
        if op >= total {
            return Err(DecodeError::UnknownOp { op });
        }
        if std::mem::replace(&mut seen[op], true) {
            return Err(DecodeError::Duplicate { op });
        }
    }
    let mut elig = Eligibility::new(inst);
    for &op in seq {
        if !elig.is_eligible(op) {
            let m = inst.m;
            let job = op / m;
            return Err(DecodeError::Precedence {
                predecessor: job * m + elig.next[job],
                op,
            });
        }
        elig.push(op);
    }
    Ok(())
}

/// Start each operation, in sequence order, as soon as both its machine and its job are free.
pub fn decode_sequence(inst: &Instance, seq: &[OpId]) -> Result<Schedule, DecodeError> {
    check_sequence(inst, seq)?;
    Ok(Decoder::new(inst).schedule(seq))
}

/// Reusable decoding buffers for hot loops. Assumes sequences are already feasible.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    inst: &'a Instance,
    machine_free: Vec<Time>,
    job_free: Vec<Time>,
}

impl<'a> Decoder<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Decoder {
            inst,
            machine_free: vec![0; inst.m],
            job_free: vec![0; inst.n],
        }
    }

    fn run(&mut self, seq: &[OpId], mut visit: impl FnMut(OpId, Time, Time)) -> Time {
        self.machine_free.iter_mut().for_each(|t| *t = 0);
        self.job_free.iter_mut().for_each(|t| *t = 0);
        let m = self.inst.m;
        let mut makespan = 0;
        for &op in seq {
            let job = op / m;
            let machine = self.inst.machine_of(op);
            let start = self.machine_free[machine].max(self.job_free[job]);
            let end = start + self.inst.duration_of(op);
            self.machine_free[machine] = end;
            self.job_free[job] = end;
            makespan = makespan.max(end);
            visit(op, start, end);
        }
        makespan
    }

    pub fn makespan(&mut self, seq: &[OpId]) -> Time {
        self.run(seq, |_, _, _| {})
    }

    pub fn schedule(&mut self, seq: &[OpId]) -> Schedule {
        let mut intervals = vec![Interval { start: 0, end: 0 }; self.inst.num_ops()];
        let makespan = self.run(seq, |op, start, end| intervals[op] = Interval { start, end });
        Schedule {
            intervals,
            makespan,
        }
    }

    /// Start times indexed by operation id.
    pub fn start_times(&mut self, seq: &[OpId], out: &mut Vec<Time>) -> Time {
        out.clear();
        out.resize(self.inst.num_ops(), 0);
        self.run(seq, |op, start, _| out[op] = start)
    }
}

/// Lists every violated schedule invariant. An empty list means the schedule is feasible.
pub fn check_feasible(inst: &Instance, sched: &Schedule) -> Vec<String> {
    let mut out = Vec::new();
    let total = inst.num_ops();
    if sched.intervals.len() != total {
        out.push(format!(
            "schedule has {} intervals, expected {total}",
            sched.intervals.len()
        ));
        return out;
    }
    let label = |op: OpId| inst.op_label(op);
    let overlaps = |a: &Interval, b: &Interval| a.start < b.end && b.start < a.end;

    for (op, iv) in sched.intervals.iter().enumerate() {
        if iv.start < 0 {
            out.push(format!("{} starts at negative time {}", label(op), iv.start));
        }
        let d = inst.duration_of(op);
        if iv.end - iv.start != d {
            out.push(format!(
                "{} spans {}..{} but its duration is {d}",
                label(op),
                iv.start,
                iv.end
            ));
        }
    }

    for a in 0..total {
        for b in a + 1..total {
            let (ia, ib) = (&sched.intervals[a], &sched.intervals[b]);
            if !overlaps(ia, ib) {
                continue;
            }
            if inst.machine_of(a) == inst.machine_of(b) {
                out.push(format!(
                    "machine overlap on M{}: {} {}..{} and {} {}..{}",
                    inst.machine_of(a) + 1,
                    label(a),
                    ia.start,
                    ia.end,
                    label(b),
                    ib.start,
                    ib.end
                ));
            }
            if a / inst.m == b / inst.m {
                out.push(format!(
                    "job overlap: {} {}..{} and {} {}..{}",
                    label(a),
                    ia.start,
                    ia.end,
                    label(b),
                    ib.start,
                    ib.end
                ));
            }
        }
    }

    for (j, job) in inst.jobs.iter().enumerate() {
        if !job.class.is_routed() {
            continue;
        }
        for k in 1..inst.m {
            let (prev, next) = (inst.op_id(j, k - 1), inst.op_id(j, k));
            if sched.intervals[prev].end > sched.intervals[next].start {
                out.push(format!(
                    "route violation: {} ends at {} after {} starts at {}",
                    label(prev),
                    sched.intervals[prev].end,
                    label(next),
                    sched.intervals[next].start
                ));
            }
        }
    }

    let max_end = sched.intervals.iter().map(|iv| iv.end).max().unwrap_or(0).max(0);
    if sched.makespan != max_end {
        out.push(format!(
            "makespan {} differs from latest end {max_end}",
            sched.makespan
        ));
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{Instance, Job, ShopClass};

    /// J@M2, F@M1, O@M3, J@M3, F@M2, O@M1, J@M1, F@M3, O@M2
    pub(crate) fn reference_sequence(inst: &Instance) -> Vec<OpId> {
        vec![
            inst.op_id(0, 0),
            inst.op_id(1, 0),
            inst.op_id(2, 2),
            inst.op_id(0, 1),
            inst.op_id(1, 1),
            inst.op_id(2, 0),
            inst.op_id(0, 2),
            inst.op_id(1, 2),
            inst.op_id(2, 1),
        ]
    }

    fn iv(start: Time, end: Time) -> Interval {
        Interval { start, end }
    }

    #[test]
    fn reference_schedule() {
        let t1 = Instance::table1();
        let sched = decode_sequence(&t1, &reference_sequence(&t1)).unwrap();
        assert_eq!(sched.makespan, 7);
        // J: M2, M3, M1
        assert_eq!(&sched.intervals[0..3], &[iv(0, 2), iv(2, 5), iv(5, 7)]);
        // F: M1, M2, M3
        assert_eq!(&sched.intervals[3..6], &[iv(0, 1), iv(2, 5), iv(5, 7)]);
        // O by machine: M1, M2, M3
        assert_eq!(&sched.intervals[6..9], &[iv(2, 5), iv(5, 6), iv(0, 2)]);
        assert!(check_feasible(&t1, &sched).is_empty());
    }

    #[test]
    fn single_operation() {
        let inst = Instance::new("one", 1, vec![Job::new(ShopClass::Job, vec![0], vec![5])]).unwrap();
        let sched = decode_sequence(&inst, &[0]).unwrap();
        assert_eq!(sched.intervals, vec![iv(0, 5)]);
        assert_eq!(sched.makespan, 5);
    }

    #[test]
    fn zero_durations_give_zero_makespan() {
        let mut t1 = Instance::table1();
        t1.jobs.iter_mut().for_each(|j| j.durations = vec![0; 3]);
        let sched = decode_sequence(&t1, &reference_sequence(&t1)).unwrap();
        assert_eq!(sched.makespan, 0);
        assert!(check_feasible(&t1, &sched).is_empty());
    }

    #[test]
    fn sequence_errors() {
        let t1 = Instance::table1();
        let good = reference_sequence(&t1);
        assert!(matches!(
            decode_sequence(&t1, &good[..8]),
            Err(DecodeError::WrongLength { expected: 9, found: 8 })
        ));
        let mut dup = good.clone();
        dup[8] = dup[0];
        assert!(matches!(decode_sequence(&t1, &dup), Err(DecodeError::Duplicate { .. })));
        let mut far = good.clone();
        far[8] = 99;
        assert!(matches!(decode_sequence(&t1, &far), Err(DecodeError::UnknownOp { op: 99 })));
        // J's second op first
        let mut bad = good.clone();
        bad.swap(0, 3);
        assert_eq!(
            decode_sequence(&t1, &bad),
            Err(DecodeError::Precedence {
                predecessor: 0,
                op: 1
            })
        );
    }

    #[test]
    fn machine_overlap_is_detected() {
        let t1 = Instance::table1();
        let mut sched = decode_sequence(&t1, &reference_sequence(&t1)).unwrap();
        // F on M1 at 0..1 and O on M1 at 2..5; move O to overlap F's slot
        sched.intervals[3] = iv(0, 1);
        sched.intervals[6] = iv(0, 3);
        let v = check_feasible(&t1, &sched);
        assert!(v.iter().any(|s| s.starts_with("machine overlap on M1")), "{v:?}");
    }

    #[test]
    fn route_violation_is_detected() {
        let t1 = restrict_flow_table1();
        let seq: Vec<OpId> = (0..9).collect();
        let mut sched = decode_sequence(&t1, &seq).unwrap();
        // F's M2 op pushed past its M3 op
        let (m2, m3) = (t1.op_id(1, 1), t1.op_id(1, 2));
        let d2 = t1.duration_of(m2);
        sched.intervals[m2] = iv(20, 20 + d2);
        sched.makespan = sched.intervals.iter().map(|i| i.end).max().unwrap();
        let v = check_feasible(&t1, &sched);
        assert!(v.iter().any(|s| s.starts_with("route violation: F2.1")), "{v:?} {m3}");
    }

    #[test]
    fn wrong_duration_and_makespan_are_detected() {
        let t1 = Instance::table1();
        let mut sched = decode_sequence(&t1, &reference_sequence(&t1)).unwrap();
        sched.intervals[0].end = 3;
        sched.makespan = 8;
        let v = check_feasible(&t1, &sched);
        assert!(v.iter().any(|s| s.contains("duration")));
        assert!(v.iter().any(|s| s.contains("makespan 8")));
    }

    #[test]
    fn eligibility_on_table1() {
        let t1 = Instance::table1();
        let mut e = Eligibility::new(&t1);
        // J@M2, F@M1, O@M1, O@M2, O@M3
        assert_eq!(e.candidates(), vec![0, 3, 6, 7, 8]);
        e.push(0);
        assert_eq!(e.candidates(), vec![1, 3, 6, 7, 8]);
        e.pop(0);
        assert_eq!(e.candidates(), vec![0, 3, 6, 7, 8]);
    }

    fn restrict_flow_table1() -> Instance {
        crate::model::restrict_to_shop(&Instance::table1(), crate::model::ShopVariant::Flow)
    }
}
