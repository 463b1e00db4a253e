use super::bench::{bench_compare, render_summary, run_one, BenchSpec, DEFAULT_BENCH_BUDGET};
use super::report::{render_reports, write_report, ReportFormat};
use crate::decode::{check_feasible, decode_sequence, exact_optimum, render_gantt};
use crate::forage::Algorithm;
use crate::model::{
    generate_rnd, lower_bound, parse_instance, restrict_to_shop, write_instance, ClassPolicy,
    Instance, InstanceFormat, OpId, ShopVariant, SolverParams,
};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable naming a default parameter file.
pub const PARAMS_ENV: &str = "MIXEDSHOP_PARAMS";

#[derive(Debug, Parser)]
#[command(name = "mixedshop", version, about = "Mixed shop scheduling with ant-guided bacterial foraging")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// PRNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parameter file (`key = value` lines); defaults to $MIXEDSHOP_PARAMS
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Constraint regime applied to every job; `mixed` keeps the stored classes
    #[arg(long, global = true)]
    shop: Option<ShopVariant>,
    /// Search algorithm: abfo or bfo
    #[arg(long, global = true)]
    algo: Option<Algorithm>,
    /// Report format
    #[arg(long, global = true)]
    format: Option<ReportFormat>,
    /// Output path for the report or generated instance
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance with one algorithm
    Solve {
        instance: PathBuf,
        /// Input format: mixed, orlib or taillard
        #[arg(long, default_value = "mixed")]
        input_format: InstanceFormat,
        /// Cap on schedule decodings
        #[arg(long)]
        budget: Option<u64>,
        /// Evaluate bacteria concurrently (results are unchanged)
        #[arg(long)]
        parallel: bool,
        /// Record wall-clock seconds in the report
        #[arg(long)]
        timing: bool,
        /// Write the best operation sequence here
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Exhaustive optimum for small instances
    Exact {
        instance: PathBuf,
        #[arg(long, default_value = "mixed")]
        input_format: InstanceFormat,
        /// Largest operation count accepted
        #[arg(long, default_value_t = crate::decode::DEFAULT_OP_LIMIT)]
        op_limit: usize,
    },
    /// Emit a random instance in mixed format
    Gen {
        n: usize,
        m: usize,
        /// mixed-cycle, all-job, all-flow or all-open
        #[arg(long, default_value = "mixed-cycle")]
        policy: String,
    },
    /// Benchmark grid of generated instances
    Bench {
        /// Comma-separated sizes such as 3x3,5x5
        #[arg(long, default_value = "3x3,5x5,7x7")]
        sizes: String,
        /// Number of seeds, starting at --seed (default 0)
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Cap on schedule decodings per run
        #[arg(long, default_value_t = DEFAULT_BENCH_BUDGET)]
        budget: u64,
        /// Run grid cells concurrently (results are unchanged)
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        timing: bool,
    },
    /// Decode a stored witness sequence and draw its schedule
    Gantt {
        instance: PathBuf,
        witness: PathBuf,
        #[arg(long, default_value = "mixed")]
        input_format: InstanceFormat,
    },
}

fn load_instance(path: &Path, format: InstanceFormat, shop: Option<ShopVariant>) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut inst = parse_instance(format, &text).with_context(|| format!("in {}", path.display()))?;
    inst.name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(match shop {
        Some(variant) => restrict_to_shop(&inst, variant),
        None => inst,
    })
}

fn load_params(cli: &Cli) -> Result<SolverParams> {
    let path = cli
        .params
        .clone()
        .or_else(|| std::env::var_os(PARAMS_ENV).map(PathBuf::from));
    let mut params = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
            SolverParams::from_text(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => SolverParams::default(),
    };
    if let Some(seed) = cli.seed {
        params.seed = seed;
    }
    Ok(params)
}

fn parse_policy(s: &str) -> Result<ClassPolicy> {
    Ok(match s {
        "mixed-cycle" => ClassPolicy::MixedCycle,
        "all-job" => ClassPolicy::AllJob,
        "all-flow" => ClassPolicy::AllFlow,
        "all-open" => ClassPolicy::AllOpen,
        other => bail!("unknown class policy `{other}`"),
    })
}

fn parse_sizes(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|part| {
            let (n, m) = part
                .trim()
                .split_once('x')
                .ok_or_else(|| anyhow!("size `{part}` is not of the form NxM"))?;
            let (n, m): (usize, usize) = (n.parse()?, m.parse()?);
            if n == 0 || m == 0 {
                bail!("size `{part}` must be at least 1x1");
            }
            Ok((n, m))
        })
        .collect()
}

/// Witness files hold `job:op_index` tokens (0-based) in sequence order.
pub fn format_witness(inst: &Instance, seq: &[OpId]) -> String {
    let tokens: Vec<String> = seq
        .iter()
        .map(|&op| format!("{}:{}", op / inst.m, op % inst.m))
        .collect();
    format!("{}\n", tokens.join(" "))
}

pub fn parse_witness(inst: &Instance, text: &str) -> Result<Vec<OpId>> {
    text.split_whitespace()
        .map(|tok| {
            let (j, k) = tok
                .split_once(':')
                .ok_or_else(|| anyhow!("witness token `{tok}` is not `job:op`"))?;
            let (j, k): (usize, usize) = (j.parse()?, k.parse()?);
            if j >= inst.n || k >= inst.m {
                bail!("witness token `{tok}` is out of range");
            }
            Ok(inst.op_id(j, k))
        })
        .collect()
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(Into::into),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Solve {
            instance,
            input_format,
            budget,
            parallel,
            timing,
            witness,
        } => {
            let inst = load_instance(instance, *input_format, None)?;
            let shop = cli.shop.unwrap_or(ShopVariant::Mixed);
            let algo = cli.algo.unwrap_or(Algorithm::Abfo);
            let mut params = load_params(&cli)?;
            if budget.is_some() {
                params.max_evaluations = *budget;
            }
            let (report, run) = run_one(&inst, shop, algo, &params, *parallel, *timing)?;
            let solved = restrict_to_shop(&inst, shop);
            if let Some(path) = witness {
                std::fs::write(path, format_witness(&solved, &run.sequence))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            let reports = [report];
            match (&cli.out, cli.format) {
                (Some(path), format) => {
                    write_report(&reports, format.unwrap_or(ReportFormat::Csv), path)?;
                }
                (None, Some(format)) => {
                    out.write_all(render_reports(&reports, format)?.as_bytes())?;
                    return Ok(());
                }
                (None, None) => {}
            }
            writeln!(
                out,
                "{} [{shop}] {algo} seed {}: best makespan {} (lower bound {}, {} evaluations)",
                inst.name,
                params.seed,
                run.best_makespan,
                lower_bound(&solved),
                run.evaluations
            )?;
            out.write_all(render_gantt(&solved, &run.schedule).as_bytes())?;
        }
        Command::Exact {
            instance,
            input_format,
            op_limit,
        } => {
            let inst = load_instance(instance, *input_format, cli.shop)?;
            let opt = exact_optimum(&inst, *op_limit)?;
            writeln!(
                out,
                "{}: optimal makespan {} (lower bound {})",
                inst.name,
                opt.makespan,
                lower_bound(&inst)
            )?;
            out.write_all(render_gantt(&inst, &opt.schedule).as_bytes())?;
        }
        Command::Gen { n, m, policy } => {
            if *n == 0 || *m == 0 {
                bail!("instance needs at least one job and one machine");
            }
            let mut inst = generate_rnd(*n, *m, cli.seed.unwrap_or(0), parse_policy(policy)?);
            if let Some(shop) = cli.shop {
                inst = restrict_to_shop(&inst, shop);
            }
            emit(out, cli.out.as_deref(), &write_instance(&inst))?;
        }
        Command::Bench {
            sizes,
            seeds,
            budget,
            parallel,
            timing,
        } => {
            let mut params = load_params(&cli)?;
            params.max_evaluations = Some(*budget);
            let base = cli.seed.unwrap_or(0);
            let spec = BenchSpec {
                sizes: parse_sizes(sizes)?,
                seeds: (base..base + seeds).collect(),
                algos: match cli.algo {
                    Some(a) => vec![a],
                    None => vec![Algorithm::Bfo, Algorithm::Abfo],
                },
                shops: match cli.shop {
                    Some(s) => vec![s],
                    None => ShopVariant::ALL.to_vec(),
                },
                params,
                parallel: *parallel,
                timing: *timing,
            };
            let reports = bench_compare(&spec)?;
            let format = cli.format.unwrap_or(ReportFormat::Csv);
            match &cli.out {
                Some(path) => {
                    write_report(&reports, format, path)?;
                    out.write_all(render_summary(&reports).as_bytes())?;
                }
                None => out.write_all(render_reports(&reports, format)?.as_bytes())?,
            }
        }
        Command::Gantt {
            instance,
            witness,
            input_format,
        } => {
            let inst = load_instance(instance, *input_format, cli.shop)?;
            let text = std::fs::read_to_string(witness)
                .with_context(|| format!("cannot read {}", witness.display()))?;
            let seq = parse_witness(&inst, &text)?;
            let sched = decode_sequence(&inst, &seq)?;
            let violations = check_feasible(&inst, &sched);
            if !violations.is_empty() {
                bail!("infeasible schedule: {}", violations.join("; "));
            }
            writeln!(out, "{}: makespan {}", inst.name, sched.makespan)?;
            out.write_all(render_gantt(&inst, &sched).as_bytes())?;
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the command and returns the exit status.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_sizes("3x3, 5x7").unwrap(), vec![(3, 3), (5, 7)]);
        assert!(parse_sizes("3by3").is_err());
        assert!(parse_sizes("0x3").is_err());
    }

    #[test]
    fn witness_round_trip() {
        let t1 = Instance::table1();
        let seq = vec![0, 3, 8, 1, 4, 6, 2, 5, 7];
        let text = format_witness(&t1, &seq);
        assert_eq!(text, "0:0 1:0 2:2 0:1 1:1 2:0 0:2 1:2 2:1\n");
        assert_eq!(parse_witness(&t1, &text).unwrap(), seq);
        assert!(parse_witness(&t1, "3:0").is_err());
        assert!(parse_witness(&t1, "x").is_err());
    }
}
