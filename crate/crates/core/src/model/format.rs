use super::{Instance, Job, ShopClass, Time};
use std::fmt::Write as _;

/// Text formats accepted by [`parse_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    /// `n m` header, then per job `CLASS [route] : durations-by-machine`.
    Mixed,
    /// OR-Library job shop: per job, `m` pairs of `machine duration` in route order.
    OrlibJss,
    /// Flow shop: per job, `m` durations for machines `0..m`.
    TaillardFs,
}

impl std::str::FromStr for InstanceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mixed" => Ok(InstanceFormat::Mixed),
            "orlib" | "orlib-jss" => Ok(InstanceFormat::OrlibJss),
            "taillard" | "taillard-fs" => Ok(InstanceFormat::TaillardFs),
            other => Err(format!("unknown instance format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected `n m` with n, m >= 1")]
    MalformedHeader { line: usize },
    #[error("line {line}: expected {expected} tokens, found {found}")]
    TokenCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: `{token}` is not an integer")]
    NotInteger { line: usize, token: String },
    #[error("line {line}: machine {machine} out of range for {m} machines")]
    MachineOutOfRange { line: usize, machine: i64, m: usize },
    #[error("line {line}: machine {machine} appears twice in the route")]
    DuplicateMachine { line: usize, machine: usize },
    #[error("line {line}: unknown job class `{token}`, expected J, F or O")]
    BadClass { line: usize, token: String },
    #[error("line {line}: negative duration {value}")]
    NegativeDuration { line: usize, value: i64 },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("expected {expected} job lines, found {found}")]
    MissingJobs { expected: usize, found: usize },
}

impl ParseError {
    /// 1-based source line, when the error is tied to one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::MalformedHeader { line }
            | ParseError::TokenCount { line, .. }
            | ParseError::NotInteger { line, .. }
            | ParseError::MachineOutOfRange { line, .. }
            | ParseError::DuplicateMachine { line, .. }
            | ParseError::BadClass { line, .. }
            | ParseError::NegativeDuration { line, .. }
            | ParseError::Malformed { line, .. } => Some(*line),
            ParseError::MissingJobs { .. } => None,
        }
    }
}

/// Parses an instance. The name is left empty; callers usually set it from the file name.
pub fn parse_instance(format: InstanceFormat, text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(ParseError::MalformedHeader { line: 1 })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match head.as_slice() {
        [n, m] => match (n.parse::<usize>(), m.parse::<usize>()) {
            (Ok(n), Ok(m)) if n >= 1 && m >= 1 => (n, m),
            _ => return Err(ParseError::MalformedHeader { line: header_line }),
        },
        _ => return Err(ParseError::MalformedHeader { line: header_line }),
    };

    let mut jobs = Vec::with_capacity(n);
    for (line, body) in lines {
        if jobs.len() == n {
            return Err(ParseError::Malformed {
                line,
                reason: format!("unexpected content after {n} job lines"),
            });
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let job = match format {
            InstanceFormat::Mixed => parse_mixed_job(line, &tokens, m)?,
            InstanceFormat::OrlibJss => parse_orlib_job(line, &tokens, m)?,
            InstanceFormat::TaillardFs => {
                let durations = parse_durations(line, &tokens, m)?;
                Job::new(ShopClass::Flow, (0..m).collect(), durations)
            }
        };
        jobs.push(job);
    }
    if jobs.len() != n {
        return Err(ParseError::MissingJobs {
            expected: n,
            found: jobs.len(),
        });
    }
    Ok(Instance {
        name: String::new(),
        n,
        m,
        jobs,
    })
}

fn parse_int(line: usize, token: &str) -> Result<i64, ParseError> {
    token.parse::<i64>().map_err(|_| ParseError::NotInteger {
        line,
        token: token.to_string(),
    })
}

fn parse_machine(line: usize, token: &str, m: usize) -> Result<usize, ParseError> {
    let machine = parse_int(line, token)?;
    if machine < 0 || machine as usize >= m {
        return Err(ParseError::MachineOutOfRange { line, machine, m });
    }
    Ok(machine as usize)
}

fn parse_durations(line: usize, tokens: &[&str], m: usize) -> Result<Vec<Time>, ParseError> {
    if tokens.len() != m {
        return Err(ParseError::TokenCount {
            line,
            expected: m,
            found: tokens.len(),
        });
    }
    tokens
        .iter()
        .map(|t| {
            let value = parse_int(line, t)?;
            if value < 0 {
                Err(ParseError::NegativeDuration { line, value })
            } else {
                Ok(value)
            }
        })
        .collect()
}

fn check_route(line: usize, route: &[usize], m: usize) -> Result<(), ParseError> {
    let mut seen = vec![false; m];
    for &machine in route {
        if std::mem::replace(&mut seen[machine], true) {
            return Err(ParseError::DuplicateMachine { line, machine });
        }
    }
    Ok(())
}

fn parse_mixed_job(line: usize, tokens: &[&str], m: usize) -> Result<Job, ParseError> {
    let (&tag, rest) = tokens.split_first().ok_or(ParseError::Malformed {
        line,
        reason: "empty job line".to_string(),
    })?;
    let class = ShopClass::from_tag(tag).ok_or_else(|| ParseError::BadClass {
        line,
        token: tag.to_string(),
    })?;
    let colon = rest.iter().position(|&t| t == ":").ok_or(ParseError::Malformed {
        line,
        reason: "missing `:` separating route and durations".to_string(),
    })?;
    let (route_tokens, duration_tokens) = (&rest[..colon], &rest[colon + 1..]);
    let route = match class {
        ShopClass::Job => {
            if route_tokens.len() != m {
                return Err(ParseError::TokenCount {
                    line,
                    expected: m,
                    found: route_tokens.len(),
                });
            }
            let route = route_tokens
                .iter()
                .map(|t| parse_machine(line, t, m))
                .collect::<Result<Vec<_>, _>>()?;
            check_route(line, &route, m)?;
            route
        }
        ShopClass::Flow | ShopClass::Open => {
            if !route_tokens.is_empty() {
                return Err(ParseError::Malformed {
                    line,
                    reason: format!("class {tag} takes no route"),
                });
            }
            (0..m).collect()
        }
    };
    let durations = parse_durations(line, duration_tokens, m)?;
    Ok(Job::new(class, route, durations))
}

fn parse_orlib_job(line: usize, tokens: &[&str], m: usize) -> Result<Job, ParseError> {
    if tokens.len() != 2 * m {
        return Err(ParseError::TokenCount {
            line,
            expected: 2 * m,
            found: tokens.len(),
        });
    }
    let mut route = Vec::with_capacity(m);
    let mut durations = vec![0; m];
    for pair in tokens.chunks(2) {
        let machine = parse_machine(line, pair[0], m)?;
        let value = parse_int(line, pair[1])?;
        if value < 0 {
            return Err(ParseError::NegativeDuration { line, value });
        }
        route.push(machine);
        check_route(line, &route, m)?;
        durations[machine] = value;
    }
    Ok(Job::new(ShopClass::Job, route, durations))
}

/// Canonical mixed-format text. The instance name is not part of the format.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("{} {}\n", inst.n, inst.m);
    for job in &inst.jobs {
        out.push(job.class.tag());
        if job.class == ShopClass::Job {
            for machine in &job.route {
                let _ = write!(out, " {machine}");
            }
        }
        out.push_str(" :");
        for d in &job.durations {
            let _ = write!(out, " {d}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE1: &str = "3 3\nJ 1 2 0 : 2 2 3\nF : 1 3 2\nO : 3 1 2\n";

    #[test]
    fn mixed_table1() {
        let mut inst = parse_instance(InstanceFormat::Mixed, TABLE1).unwrap();
        inst.name = "table1".into();
        assert_eq!(inst, Instance::table1());
    }

    #[test]
    fn write_table1_is_canonical() {
        assert_eq!(write_instance(&Instance::table1()), TABLE1);
    }

    #[test]
    fn single_operation_documents() {
        let inst = parse_instance(InstanceFormat::OrlibJss, "1 1\n0 5\n").unwrap();
        assert_eq!((inst.n, inst.m), (1, 1));
        assert_eq!(inst.duration_of(0), 5);
        assert_eq!(write_instance(&inst), "1 1\nJ 0 : 5\n");
        assert_eq!(write_instance(&inst).lines().count(), 2);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# table one\n\n3 3\n# jobs\nJ 1 2 0 : 2 2 3\nF : 1 3 2\n\nO : 3 1 2\n";
        let inst = parse_instance(InstanceFormat::Mixed, text).unwrap();
        assert_eq!(inst.jobs, Instance::table1().jobs);
    }

    #[test]
    fn bad_class_names_its_line() {
        let err = parse_instance(InstanceFormat::Mixed, "3 3\nQ : 1 2 3\nF : 1 3 2\nO : 3 1 2\n")
            .unwrap_err();
        assert!(matches!(err, ParseError::BadClass { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn error_kinds() {
        use InstanceFormat::*;
        let cases: &[(InstanceFormat, &str, usize)] = &[
            (Mixed, "3\n", 1),
            (Mixed, "0 3\n", 1),
            (Mixed, "1 3\nF : 1 2\n", 2),
            (Mixed, "1 3\nF : 1 x 2\n", 2),
            (Mixed, "1 3\nJ 0 3 1 : 1 2 3\n", 2),
            (Mixed, "1 3\nJ 0 0 1 : 1 2 3\n", 2),
            (Mixed, "1 3\nO 0 1 2 : 1 2 3\n", 2),
            (Mixed, "1 3\nF 1 2 3\n", 2),
            (OrlibJss, "1 2\n0 5 0 4\n", 2),
            (OrlibJss, "1 2\n0 5 2 4\n", 2),
            (TaillardFs, "1 2\n5 -4\n", 2),
        ];
        for (format, text, line) in cases {
            let err = parse_instance(*format, text).unwrap_err();
            assert_eq!(err.line(), Some(*line), "{text:?} -> {err}");
        }
        assert!(matches!(
            parse_instance(TaillardFs, "2 2\n1 2\n").unwrap_err(),
            ParseError::MissingJobs { expected: 2, found: 1 }
        ));
    }

    #[test]
    fn taillard_is_all_flow() {
        let inst = parse_instance(InstanceFormat::TaillardFs, "2 3\n1 2 3\n4 5 6\n").unwrap();
        assert!(inst.jobs.iter().all(|j| j.class == ShopClass::Flow && j.route == vec![0, 1, 2]));
        assert_eq!(inst.jobs[1].durations, vec![4, 5, 6]);
    }

    #[test]
    fn orlib_durations_are_machine_indexed() {
        let inst = parse_instance(InstanceFormat::OrlibJss, "1 3\n2 7 0 1 1 4\n").unwrap();
        assert_eq!(inst.jobs[0].route, vec![2, 0, 1]);
        assert_eq!(inst.jobs[0].durations, vec![1, 4, 7]);
    }
}
