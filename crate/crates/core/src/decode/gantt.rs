use super::Schedule;
use crate::model::{Instance, Time};
use std::fmt::Write as _;

const MAX_WIDTH: i64 = 120;
const MAX_UNIT_WIDTH: i64 = 8;

/// Text Gantt chart: one row per machine, highest machine first, idle time as `-`,
/// and a time axis underneath.
pub fn render_gantt(inst: &Instance, sched: &Schedule) -> String {
    let span = sched.makespan.max(0);
    let width = if span == 0 {
        0
    } else if span * MAX_UNIT_WIDTH <= MAX_WIDTH {
        span * MAX_UNIT_WIDTH
    } else if span <= MAX_WIDTH {
        span * (MAX_WIDTH / span)
    } else {
        MAX_WIDTH
    };
    let col = |t: Time| -> usize {
        if span == 0 {
            0
        } else {
            (t.clamp(0, span) * width / span) as usize
        }
    };
    let gutter = format!("M{}", inst.m).len() + 1;
    let mut out = String::new();

    if span > 0 {
        for machine in (0..inst.m).rev() {
            let mut row = vec!['-'; width as usize];
            let mut ops: Vec<usize> = (0..inst.num_ops())
                .filter(|&op| inst.machine_of(op) == machine)
                .collect();
            ops.sort_by_key(|&op| (sched.intervals[op].start, op));
            for op in ops {
                let iv = sched.intervals[op];
                let (a, b) = (col(iv.start), col(iv.end));
                if b <= a {
                    continue;
                }
                let label: Vec<char> = inst.op_label(op).chars().collect();
                for (k, cell) in row[a..b].iter_mut().enumerate() {
                    *cell = label.get(k).copied().unwrap_or(' ');
                }
            }
            let _ = writeln!(
                out,
                "{:<gutter$}|{}|",
                format!("M{}", machine + 1),
                row.into_iter().collect::<String>()
            );
        }
    }

    // time axis: a tick label wherever it fits without colliding
    let mut axis = vec![' '; width as usize + 8];
    let mut next_free = 0usize;
    for t in 0..=span {
        let c = col(t);
        let text = t.to_string();
        if c < next_free || c + text.len() > axis.len() {
            continue;
        }
        for (k, ch) in text.chars().enumerate() {
            axis[c + k] = ch;
        }
        next_free = c + text.len() + 1;
    }
    let axis: String = axis.into_iter().collect();
    let _ = writeln!(out, "{:gutter$} {}", "", axis.trim_end());
    out
}
