use crate::colony::TransitionParams;
use serde::{Deserialize, Serialize};

/// Attractant/repellent cell-to-cell signalling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwarmParams {
    pub enabled: bool,
    /// Signalling magnitude `M`.
    pub magnitude: f64,
    /// Attractant width `W_a`.
    pub attract_width: f64,
    /// Repellent width `W_r`.
    pub repel_width: f64,
}

impl Default for SwarmParams {
    fn default() -> Self {
        SwarmParams {
            enabled: false,
            magnitude: 0.1,
            attract_width: 0.2,
            repel_width: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Population size `S`; must be even.
    pub population: usize,
    /// Chemotactic steps per reproduction cycle (`N_c`).
    pub chemotactic_steps: usize,
    /// Maximum swims per chemotactic step (`N_s`). Zero means tumble only.
    pub swims: usize,
    /// Reproduction cycles per elimination-dispersal event (`N_re`).
    pub reproductions: usize,
    /// Elimination-dispersal events (`N_ed`).
    pub dispersals: usize,
    /// Per-bacterium dispersal probability `p_ed`.
    pub dispersal_prob: f64,
    pub transition: TransitionParams,
    pub swarm: SwarmParams,
    pub seed: u64,
    /// Hard cap on schedule decodings for one run.
    pub max_evaluations: Option<u64>,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            population: 20,
            chemotactic_steps: 50,
            swims: 4,
            reproductions: 4,
            dispersals: 2,
            dispersal_prob: 0.25,
            transition: TransitionParams::default(),
            swarm: SwarmParams::default(),
            seed: 0,
            max_evaluations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamsError {
    #[error("invalid parameter `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("line {line}: unknown parameter `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: cannot parse value `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ParamsError {
    ParamsError::Invalid {
        key,
        reason: reason.into(),
    }
}

fn unit_interval(key: &'static str, v: f64) -> Result<(), ParamsError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(key, format!("{v} is outside [0, 1]")))
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.population < 2 || !self.population.is_multiple_of(2) {
            return Err(invalid("population", "must be even and at least 2"));
        }
        for (key, value) in [
            ("chemotactic_steps", self.chemotactic_steps),
            ("reproductions", self.reproductions),
            ("dispersals", self.dispersals),
        ] {
            if value == 0 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        unit_interval("dispersal_prob", self.dispersal_prob)?;
        let t = &self.transition;
        if !(t.beta >= 0.0 && t.beta.is_finite()) {
            return Err(invalid("beta", "must be finite and non-negative"));
        }
        unit_interval("q0", t.q0)?;
        unit_interval("rho", t.rho)?;
        unit_interval("alpha_g", t.alpha_g)?;
        if let Some(tau0) = t.tau0 {
            if !(tau0 > 0.0 && tau0.is_finite()) {
                return Err(invalid("tau0", "must be positive"));
            }
        }
        let s = &self.swarm;
        if s.enabled {
            if !(s.magnitude >= 0.0) {
                return Err(invalid("swarm_magnitude", "must be non-negative"));
            }
            if !(s.attract_width > 0.0) {
                return Err(invalid("swarm_attract_width", "must be positive"));
            }
            if !(s.repel_width > 0.0) {
                return Err(invalid("swarm_repel_width", "must be positive"));
            }
        }
        if self.max_evaluations == Some(0) {
            return Err(invalid("max_evaluations", "must be at least 1"));
        }
        Ok(())
    }

    /// Applies a flat `key = value` document on top of `self`. `#` starts a comment.
    ///
    /// Keys are the field names (`population`, `q0`, `swarm_magnitude`, ...) or
    /// their usual symbols (`S`, `Nc`, `Ns`, `Nre`, `Ned`, `p_ed`, `M`, `W_a`, `W_r`).
    pub fn apply_text(&mut self, text: &str) -> Result<(), ParamsError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or(ParamsError::Syntax { line })?;
            self.set(line, key.trim(), value.trim())?;
        }
        self.validate()
    }

    pub fn from_text(text: &str) -> Result<Self, ParamsError> {
        let mut params = SolverParams::default();
        params.apply_text(text)?;
        Ok(params)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ParamsError> {
        fn parse<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ParamsError> {
            value.parse().map_err(|_| ParamsError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        match key {
            "population" | "S" => self.population = parse(line, key, value)?,
            "chemotactic_steps" | "Nc" => self.chemotactic_steps = parse(line, key, value)?,
            "swims" | "Ns" => self.swims = parse(line, key, value)?,
            "reproductions" | "Nre" => self.reproductions = parse(line, key, value)?,
            "dispersals" | "Ned" => self.dispersals = parse(line, key, value)?,
            "dispersal_prob" | "p_ed" => self.dispersal_prob = parse(line, key, value)?,
            "beta" => self.transition.beta = parse(line, key, value)?,
            "q0" => self.transition.q0 = parse(line, key, value)?,
            "rho" => self.transition.rho = parse(line, key, value)?,
            "alpha_g" => self.transition.alpha_g = parse(line, key, value)?,
            "tau0" => {
                self.transition.tau0 = if value == "auto" {
                    None
                } else {
                    Some(parse(line, key, value)?)
                }
            }
            "swarm_enabled" => self.swarm.enabled = parse(line, key, value)?,
            "swarm_magnitude" | "M" => self.swarm.magnitude = parse(line, key, value)?,
            "swarm_attract_width" | "W_a" => self.swarm.attract_width = parse(line, key, value)?,
            "swarm_repel_width" | "W_r" => self.swarm.repel_width = parse(line, key, value)?,
            "seed" => self.seed = parse(line, key, value)?,
            "max_evaluations" => {
                self.max_evaluations = if value == "none" {
                    None
                } else {
                    Some(parse(line, key, value)?)
                }
            }
            _ => {
                return Err(ParamsError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }
}
