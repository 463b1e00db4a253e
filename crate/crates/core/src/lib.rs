//! Mixed shop scheduling.
//!
//! Each job carries its own constraint regime: a fixed job-specific route, the
//! common flow route, or no route at all (open). Solutions are operation
//! sequences decoded into semi-active schedules. The search is bacterial
//! foraging (tumble, swim, reproduce, disperse) whose moves are built with an
//! ant colony transition rule over learned pheromone trails; a plain
//! uniform-move variant serves as the baseline, and small instances can be
//! solved exactly by exhaustive enumeration.
//!
//! ```
//! use mixedshop::decode::{check_feasible, exact_optimum};
//! use mixedshop::forage::{run_solver, Algorithm};
//! use mixedshop::model::{Instance, SolverParams};
//!
//! let inst = Instance::table1();
//! let params = SolverParams { seed: 0, max_evaluations: Some(2_000), ..Default::default() };
//! let run = run_solver(&inst, &params, Algorithm::Abfo).unwrap();
//! assert!(check_feasible(&inst, &run.schedule).is_empty());
//! assert!(run.best_makespan >= exact_optimum(&inst, 12).unwrap().makespan);
//! ```

pub mod colony;
pub mod decode;
pub mod forage;
pub mod harness;
pub mod model;
