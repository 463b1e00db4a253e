//! Command line, benchmark grid and report output.

mod bench;
mod cli;
mod report;

pub use bench::{
    bench_compare, bench_instance, cell_means, mean_of, render_summary, run_one, BenchSpec,
    CellMean, DEFAULT_BENCH_BUDGET,
};
pub use cli::{format_witness, parse_witness, run_cli, PARAMS_ENV};
pub use report::{
    natural_cmp, read_json_reports, render_reports, reports_to_csv, reports_to_json,
    sort_reports, write_report, ReportError, ReportFormat, RunReport, CSV_HEADER,
};
