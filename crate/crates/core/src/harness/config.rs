//! Experiment configuration and its `key = value` text form.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Lipschitz,
    Quasigeo,
    Counterexample,
    Bergman,
    Ladder,
    Geodesic,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Self::Lipschitz,
        Self::Quasigeo,
        Self::Counterexample,
        Self::Bergman,
        Self::Ladder,
        Self::Geodesic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lipschitz => "lipschitz",
            Self::Quasigeo => "quasigeo",
            Self::Counterexample => "counterexample",
            Self::Bergman => "bergman",
            Self::Ladder => "ladder",
            Self::Geodesic => "geodesic",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything an experiment reads. Two runs with equal configs produce
/// byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Line bundle degrees `d` (the quantization power `k`).
    pub degrees: Vec<usize>,
    /// Quadrature nodes on the sphere.
    pub grid: usize,
    /// Time steps of weak geodesics on `[0, 1]`.
    pub steps: usize,
    pub p: f64,
    /// Time window `[−tmax, tmax]` (or `[0, tmax]`) for matrix geodesics.
    pub tmax: f64,
    /// Random pairs, or time samples for path experiments.
    pub samples: usize,
    pub seed: u64,
    /// Compact `K_δ = {δ ≤ x ≤ 1/δ}`.
    pub delta: f64,
    pub ell_max: usize,
    pub j_cap: usize,
    pub k_cap: usize,
    /// Sizes at which weak geodesics are cross-checked by the envelope sweep.
    pub oracle_steps: usize,
    pub oracle_grid: usize,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = Self {
            experiment,
            degrees: vec![1],
            grid: crate::toric::DEFAULT_GRID,
            steps: 16,
            p: 2.0,
            tmax: 20.0,
            samples: 20,
            seed: 20240917,
            delta: crate::toric::DEFAULT_DELTA,
            ell_max: 4,
            j_cap: 256,
            k_cap: 128,
            oracle_steps: 16,
            oracle_grid: 64,
        };
        match experiment {
            Experiment::Lipschitz => {
                c.degrees = vec![8, 16, 32];
                c.samples = 50;
            }
            Experiment::Quasigeo => {
                c.degrees = vec![2, 4];
                c.samples = 81;
            }
            Experiment::Counterexample => {
                c.tmax = 50.0;
                c.samples = 501;
            }
            Experiment::Bergman => {
                c.degrees = vec![4, 8, 16, 32];
                c.samples = 2;
            }
            Experiment::Ladder => c.samples = 1,
            Experiment::Geodesic => c.steps = 64,
        }
        c
    }

    /// Sets one field from its text form.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
        }
        match key {
            "experiment" => {
                let e: Experiment = value.parse()?;
                if e != self.experiment {
                    return Err(Error::Parse(format!(
                        "config is for {e}, running {}",
                        self.experiment
                    )));
                }
            }
            "degree" | "degrees" => {
                self.degrees = value
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "grid" => self.grid = num(key, value)?,
            "steps" => self.steps = num(key, value)?,
            "p" => self.p = num(key, value)?,
            "tmax" => self.tmax = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "ell_max" => self.ell_max = num(key, value)?,
            "j_cap" => self.j_cap = num(key, value)?,
            "k_cap" => self.k_cap = num(key, value)?,
            "oracle_steps" => self.oracle_steps = num(key, value)?,
            "oracle_grid" => self.oracle_grid = num(key, value)?,
            _ => return Err(Error::Parse(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Canonical text form; parsing it with [`apply_text`](Self::apply_text)
    /// restores the config.
    pub fn to_text(&self) -> String {
        let degrees: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "degree = {}", degrees.join(","));
        let _ = writeln!(s, "grid = {}", self.grid);
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "p = {}", self.p);
        let _ = writeln!(s, "tmax = {}", self.tmax);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "ell_max = {}", self.ell_max);
        let _ = writeln!(s, "j_cap = {}", self.j_cap);
        let _ = writeln!(s, "k_cap = {}", self.k_cap);
        let _ = writeln!(s, "oracle_steps = {}", self.oracle_steps);
        let _ = writeln!(s, "oracle_grid = {}", self.oracle_grid);
        s
    }

    /// SHA-256 of [`to_text`](Self::to_text), hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return bad("degrees must be positive".into());
        }
        if self.grid < crate::toric::MIN_GRID || self.oracle_grid < crate::toric::MIN_GRID {
            return bad(format!(
                "grid sizes must be at least {}",
                crate::toric::MIN_GRID
            ));
        }
        if self.steps < 2 || self.oracle_steps < 2 {
            return bad("need at least two time steps".into());
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad(format!("p = {} must be at least 1", self.p));
        }
        if !(self.tmax > 0.0 && self.tmax.is_finite()) {
            return bad(format!("tmax = {} must be positive", self.tmax));
        }
        if self.samples == 0 {
            return bad("samples must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} not in (0, 1)", self.delta));
        }
        if self.ell_max == 0 || self.j_cap == 0 || self.k_cap == 0 {
            return bad("ell_max and caps must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_round_trips() {
        for e in Experiment::ALL {
            let mut c = ExperimentConfig::defaults(e);
            c.p = 1.5;
            c.degrees = vec![3, 5];
            let mut back = ExperimentConfig::defaults(e);
            back.apply_text(&c.to_text()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.hash(), c.hash());
        }
    }

    #[test]
    fn comments_and_errors() {
        let mut c = ExperimentConfig::defaults(Experiment::Lipschitz);
        c.apply_text("# note\n\n seed = 9 # trailing\ndegree=4, 8\n")
            .unwrap();
        assert_eq!((c.seed, c.degrees.clone()), (9, vec![4, 8]));
        assert!(c.apply_text("grid 12").is_err());
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.apply_text("experiment = ladder").is_err());
        assert!(c.apply_text("p = two").is_err());
    }
}
