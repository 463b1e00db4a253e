use super::report::{sort_reports, RunReport};
use crate::forage::{Algorithm, ForageError, Forager};
use crate::model::{generate_rnd, restrict_to_shop, ClassPolicy, Instance, ShopVariant, SolverParams};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::time::Instant;

pub const DEFAULT_BENCH_BUDGET: u64 = 50_000;

/// Grid of generated instances, shop variants, algorithms and seeds.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub sizes: Vec<(usize, usize)>,
    pub seeds: Vec<u64>,
    pub algos: Vec<Algorithm>,
    pub shops: Vec<ShopVariant>,
    /// Base parameters; the seed is overridden per cell.
    pub params: SolverParams,
    /// Run grid cells concurrently.
    pub parallel: bool,
    pub timing: bool,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            sizes: vec![(3, 3), (5, 5), (7, 7)],
            seeds: (0..10).collect(),
            algos: vec![Algorithm::Bfo, Algorithm::Abfo],
            shops: ShopVariant::ALL.to_vec(),
            params: SolverParams {
                max_evaluations: Some(DEFAULT_BENCH_BUDGET),
                ..SolverParams::default()
            },
            parallel: false,
            timing: false,
        }
    }
}

/// Runs one solver configuration and wraps the result as a report row.
pub fn run_one(
    inst: &Instance,
    shop: ShopVariant,
    algo: Algorithm,
    params: &SolverParams,
    parallel: bool,
    timing: bool,
) -> Result<(RunReport, crate::forage::SolverRun), ForageError> {
    let restricted = restrict_to_shop(inst, shop);
    let clock = Instant::now();
    let run = Forager::new(&restricted, params, algo)?.parallel(parallel).run()?;
    let seconds = timing.then(|| clock.elapsed().as_secs_f64());
    let report = RunReport {
        instance: inst.name.clone(),
        shop,
        algo,
        seed: params.seed,
        best_makespan: run.best_makespan,
        evaluations: run.evaluations,
        seconds,
        trace: run.trace.clone(),
    };
    Ok((report, run))
}

/// Instance used for one `(size, seed)` grid cell, named `rnd{n}x{m}`.
pub fn bench_instance(n: usize, m: usize, seed: u64) -> Instance {
    let mut inst = generate_rnd(n, m, seed, ClassPolicy::MixedCycle);
    inst.name = format!("rnd{n}x{m}");
    inst
}

pub fn bench_compare(spec: &BenchSpec) -> Result<Vec<RunReport>, ForageError> {
    let mut cells = Vec::new();
    for &(n, m) in &spec.sizes {
        for &seed in &spec.seeds {
            for &shop in &spec.shops {
                for &algo in &spec.algos {
                    cells.push((n, m, seed, shop, algo));
                }
            }
        }
    }
    let run_cell = |&(n, m, seed, shop, algo): &(usize, usize, u64, ShopVariant, Algorithm)| {
        let inst = bench_instance(n, m, seed);
        let params = SolverParams {
            seed,
            ..spec.params.clone()
        };
        run_one(&inst, shop, algo, &params, false, spec.timing).map(|(r, _)| r)
    };
    let mut reports = if spec.parallel {
        cells.par_iter().map(run_cell).collect::<Result<Vec<_>, _>>()?
    } else {
        cells.iter().map(run_cell).collect::<Result<Vec<_>, _>>()?
    };
    sort_reports(&mut reports);
    Ok(reports)
}

/// Mean best makespan for one `(instance, algo, shop)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMean {
    pub instance: String,
    pub algo: Algorithm,
    pub shop: ShopVariant,
    pub mean: f64,
    pub runs: usize,
}

pub fn cell_means(reports: &[RunReport]) -> Vec<CellMean> {
    let mut sorted = reports.to_vec();
    sort_reports(&mut sorted);
    let mut out: Vec<CellMean> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for r in &sorted {
        match out.last_mut() {
            Some(c) if c.instance == r.instance && c.algo == r.algo && c.shop == r.shop => {
                c.runs += 1;
                *sums.last_mut().unwrap() += r.best_makespan as f64;
            }
            _ => {
                out.push(CellMean {
                    instance: r.instance.clone(),
                    algo: r.algo,
                    shop: r.shop,
                    mean: 0.0,
                    runs: 1,
                });
                sums.push(r.best_makespan as f64);
            }
        }
    }
    for (c, s) in out.iter_mut().zip(sums) {
        c.mean = s / c.runs as f64;
    }
    out
}

pub fn mean_of(means: &[CellMean], instance: &str, algo: Algorithm, shop: ShopVariant) -> Option<f64> {
    means
        .iter()
        .find(|c| c.instance == instance && c.algo == algo && c.shop == shop)
        .map(|c| c.mean)
}

/// Per-algorithm tables of mean best makespan: one row per instance, one column per shop variant.
pub fn render_summary(reports: &[RunReport]) -> String {
    let means = cell_means(reports);
    let mut instances: Vec<&str> = Vec::new();
    let mut algos: Vec<Algorithm> = Vec::new();
    let mut shops: Vec<ShopVariant> = Vec::new();
    for c in &means {
        if !instances.contains(&c.instance.as_str()) {
            instances.push(&c.instance);
        }
        if !algos.contains(&c.algo) {
            algos.push(c.algo);
        }
        if !shops.contains(&c.shop) {
            shops.push(c.shop);
        }
    }
    algos.sort();
    algos.reverse();
    shops.sort();
    let mut out = String::new();
    for algo in algos {
        let _ = writeln!(out, "{}", algo.as_str().to_uppercase());
        let _ = write!(out, "{:<12}", "instance");
        for shop in &shops {
            let _ = write!(out, " {:>10}", format!("{} shop", shop.as_str()));
        }
        out.push('\n');
        for inst in &instances {
            let _ = write!(out, "{inst:<12}");
            for &shop in &shops {
                match mean_of(&means, inst, algo, shop) {
                    Some(v) => {
                        let _ = write!(out, " {v:>10.1}");
                    }
                    None => {
                        let _ = write!(out, " {:>10}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
