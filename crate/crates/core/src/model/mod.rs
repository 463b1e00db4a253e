//! Problem instances: jobs, machines, processing times and per-job shop constraints.

mod format;
mod generate;
mod params;

pub use format::{parse_instance, write_instance, InstanceFormat, ParseError};
pub use generate::{generate_rnd, ClassPolicy};
pub use params::{ParamsError, SolverParams, SwarmParams};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Time units. Signed so that malformed inputs can be represented and reported.
pub type Time = i64;

/// Dense operation identifier: `job * m + op_index`.
pub type OpId = usize;

/// Constraint regime a single job obeys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShopClass {
    /// Fixed, job-specific machine route.
    Job,
    /// Route is always machine 0, 1, ..., m-1.
    Flow,
    /// Operations may run in any order.
    Open,
}

impl ShopClass {
    pub fn tag(self) -> char {
        match self {
            ShopClass::Job => 'J',
            ShopClass::Flow => 'F',
            ShopClass::Open => 'O',
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "J" => Some(ShopClass::Job),
            "F" => Some(ShopClass::Flow),
            "O" => Some(ShopClass::Open),
            _ => None,
        }
    }

    /// Whether the job's operations must follow its stored route.
    pub fn is_routed(self) -> bool {
        !matches!(self, ShopClass::Open)
    }
}

/// Shop regime applied uniformly to every job of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShopVariant {
    Job,
    Flow,
    Open,
    /// Classes as stored in the instance.
    Mixed,
}

impl ShopVariant {
    pub const ALL: [ShopVariant; 4] = [
        ShopVariant::Job,
        ShopVariant::Flow,
        ShopVariant::Open,
        ShopVariant::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShopVariant::Job => "job",
            ShopVariant::Flow => "flow",
            ShopVariant::Open => "open",
            ShopVariant::Mixed => "mixed",
        }
    }
}

impl fmt::Display for ShopVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ShopVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "job" => Ok(ShopVariant::Job),
            "flow" => Ok(ShopVariant::Flow),
            "open" => Ok(ShopVariant::Open),
            "mixed" => Ok(ShopVariant::Mixed),
            other => Err(format!("unknown shop variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub class: ShopClass,
    /// Machine visited at each route position. For OPEN jobs this is only a
    /// default used when the job is converted to a routed class.
    pub route: Vec<usize>,
    /// Processing time indexed by machine, not by route position.
    pub durations: Vec<Time>,
}

impl Job {
    pub fn new(class: ShopClass, route: Vec<usize>, durations: Vec<Time>) -> Self {
        Job {
            class,
            route,
            durations,
        }
    }
}

/// One operation of one job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpRef {
    pub job: usize,
    /// Position of the operation in the job's (stored) route.
    pub op_index: usize,
    pub machine: usize,
    pub duration: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub jobs: Vec<Job>,
}

impl Instance {
    /// Builds an instance and rejects it if any invariant is violated.
    pub fn new(name: impl Into<String>, m: usize, jobs: Vec<Job>) -> Result<Self, InvalidInstance> {
        let inst = Instance {
            name: name.into(),
            n: jobs.len(),
            m,
            jobs,
        };
        let violations = validate_instance(&inst);
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(InvalidInstance(violations))
        }
    }

    /// The 3x3 mixed instance with one job of each class: job route M2 -> M3 -> M1,
    /// flow route M1 -> M2 -> M3, and a free open job.
    pub fn table1() -> Self {
        Instance::new(
            "table1",
            3,
            vec![
                Job::new(ShopClass::Job, vec![1, 2, 0], vec![2, 2, 3]),
                Job::new(ShopClass::Flow, vec![0, 1, 2], vec![1, 3, 2]),
                Job::new(ShopClass::Open, vec![0, 1, 2], vec![3, 1, 2]),
            ],
        )
        .expect("example instance is valid")
    }

    /// Total number of operations, `n * m`.
    pub fn num_ops(&self) -> usize {
        self.n * self.m
    }

    pub fn op_id(&self, job: usize, op_index: usize) -> OpId {
        job * self.m + op_index
    }

    pub fn op(&self, id: OpId) -> OpRef {
        let job = id / self.m;
        let op_index = id % self.m;
        let machine = self.jobs[job].route[op_index];
        OpRef {
            job,
            op_index,
            machine,
            duration: self.jobs[job].durations[machine],
        }
    }

    pub fn machine_of(&self, id: OpId) -> usize {
        self.jobs[id / self.m].route[id % self.m]
    }

    pub fn duration_of(&self, id: OpId) -> Time {
        let job = &self.jobs[id / self.m];
        job.durations[job.route[id % self.m]]
    }

    /// Short label used in charts and diagnostics, e.g. `J1.0` for the first
    /// route operation of job 1 (1-based job numbering).
    pub fn op_label(&self, id: OpId) -> String {
        let op = self.op(id);
        format!("{}{}.{}", self.jobs[op.job].class.tag(), op.job + 1, op.op_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid instance: {}", .0.join("; "))]
pub struct InvalidInstance(pub Vec<String>);

/// Lists every violated instance invariant. An empty list means the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<String> {
    let mut out = Vec::new();
    if inst.n == 0 {
        out.push("instance has no jobs".to_string());
    }
    if inst.m == 0 {
        out.push("instance has no machines".to_string());
    }
    if inst.jobs.len() != inst.n {
        out.push(format!(
            "job count {} does not match declared n = {}",
            inst.jobs.len(),
            inst.n
        ));
    }
    for (j, job) in inst.jobs.iter().enumerate() {
        if job.durations.len() != inst.m {
            out.push(format!(
                "job {j}: {} durations, expected {}",
                job.durations.len(),
                inst.m
            ));
        }
        for (machine, &d) in job.durations.iter().enumerate() {
            if d < 0 {
                out.push(format!("job {j} on machine {machine}: negative duration {d}"));
            }
        }
        if job.route.len() != inst.m {
            out.push(format!(
                "job {j}: route has {} entries, expected {}",
                job.route.len(),
                inst.m
            ));
            continue;
        }
        let mut seen = vec![false; inst.m];
        let mut permutation = true;
        for &machine in &job.route {
            if machine >= inst.m {
                out.push(format!("job {j}: route machine {machine} out of range"));
                permutation = false;
            } else if std::mem::replace(&mut seen[machine], true) {
                out.push(format!("job {j}: machine {machine} repeated in route"));
                permutation = false;
            }
        }
        if permutation
            && job.class == ShopClass::Flow
            && job.route.iter().enumerate().any(|(k, &mc)| k != mc)
        {
            out.push(format!(
                "job {j}: flow route {:?} is not the identity order",
                job.route
            ));
        }
    }
    out
}

/// Classical bound: the larger of the longest job and the most loaded machine.
pub fn lower_bound(inst: &Instance) -> Time {
    let longest_job = inst
        .jobs
        .iter()
        .map(|job| job.durations.iter().sum::<Time>())
        .max()
        .unwrap_or(0);
    let busiest_machine = (0..inst.m)
        .map(|mc| inst.jobs.iter().map(|job| job.durations[mc]).sum::<Time>())
        .max()
        .unwrap_or(0);
    longest_job.max(busiest_machine)
}

/// Re-imposes one constraint regime on every job, keeping processing times.
pub fn restrict_to_shop(inst: &Instance, target: ShopVariant) -> Instance {
    let mut out = inst.clone();
    for job in &mut out.jobs {
        match target {
            ShopVariant::Mixed => {}
            ShopVariant::Open => job.class = ShopClass::Open,
            ShopVariant::Flow => {
                job.class = ShopClass::Flow;
                job.route = (0..inst.m).collect();
            }
            ShopVariant::Job => job.class = ShopClass::Job,
        }
    }
    out
}
