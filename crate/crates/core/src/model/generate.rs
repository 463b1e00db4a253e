use super::{Instance, Job, ShopClass};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How job classes are assigned by [`generate_rnd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassPolicy {
    /// J, F, O, J, F, O, ... by job index.
    MixedCycle,
    AllJob,
    AllFlow,
    AllOpen,
}

impl ClassPolicy {
    fn class_of(self, job: usize) -> ShopClass {
        match self {
            ClassPolicy::MixedCycle => [ShopClass::Job, ShopClass::Flow, ShopClass::Open][job % 3],
            ClassPolicy::AllJob => ShopClass::Job,
            ClassPolicy::AllFlow => ShopClass::Flow,
            ClassPolicy::AllOpen => ShopClass::Open,
        }
    }
}

pub const RND_MIN_DURATION: i64 = 1;
pub const RND_MAX_DURATION: i64 = 99;

/// Random instance with durations uniform in `[1, 99]`.
///
/// Durations are drawn before routes, so a given `(n, m, seed)` yields the same
/// processing times under every class policy.
pub fn generate_rnd(n: usize, m: usize, seed: u64, policy: ClassPolicy) -> Instance {
    assert!(n >= 1 && m >= 1, "instance needs at least one job and one machine");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let durations: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| rng.gen_range(RND_MIN_DURATION..=RND_MAX_DURATION))
                .collect()
        })
        .collect();
    let jobs = durations
        .into_iter()
        .enumerate()
        .map(|(j, durations)| {
            let class = policy.class_of(j);
            let mut route: Vec<usize> = (0..m).collect();
            if class == ShopClass::Job {
                route.shuffle(&mut rng);
            }
            Job::new(class, route, durations)
        })
        .collect();
    Instance {
        name: format!("rnd{n}x{m}-s{seed}"),
        n,
        m,
        jobs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = generate_rnd(3, 3, 1, ClassPolicy::MixedCycle);
        let b = generate_rnd(3, 3, 1, ClassPolicy::MixedCycle);
        assert_eq!(a, b);
        assert_ne!(a, generate_rnd(3, 3, 2, ClassPolicy::MixedCycle));
    }

    #[test]
    fn large_instance_shape_and_range() {
        let inst = generate_rnd(20, 20, 7, ClassPolicy::MixedCycle);
        assert_eq!(inst.num_ops(), 400);
        assert!(validate_instance(&inst).is_empty());
        assert!(inst
            .jobs
            .iter()
            .flat_map(|j| &j.durations)
            .all(|&d| (1..=99).contains(&d)));
    }

    #[test]
    fn policies_force_classes() {
        let open = generate_rnd(3, 3, 5, ClassPolicy::AllOpen);
        assert!(open.jobs.iter().all(|j| j.class == ShopClass::Open));
        let mixed = generate_rnd(4, 3, 5, ClassPolicy::MixedCycle);
        let tags: String = mixed.jobs.iter().map(|j| j.class.tag()).collect();
        assert_eq!(tags, "JFOJ");
        let job = generate_rnd(4, 3, 5, ClassPolicy::AllJob);
        assert!(validate_instance(&job).is_empty());
        // same processing times whatever the policy
        for (a, b) in open.jobs.iter().zip(&generate_rnd(3, 3, 5, ClassPolicy::AllFlow).jobs) {
            assert_eq!(a.durations, b.durations);
        }
    }
}
