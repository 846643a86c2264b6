//! Problem configuration files: one `key = value` pair per line, `#` starts a
//! comment.
//!
//! ```text
//! # 8×8 mesh, quadratic elements
//! n = 8
//! k = 2
//! family = full
//! bc = displacement
//! lambda = 1
//! mu = 0.5
//! problem = 1
//! ```
//!
//! Every key is optional. `bc` defaults to the boundary condition of `problem` (or
//! `displacement` without one); giving both requires them to agree.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::assembly::{BoundaryCondition, Discretization, Material};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::refelem::Family;
use crate::study::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub n: usize,
    pub k: usize,
    pub family: Family,
    pub bc: BoundaryCondition,
    pub lambda: f64,
    pub mu: f64,
    pub problem: Option<Problem>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        let m = Material::default();
        Self {
            n: 4,
            k: 2,
            family: Family::Full,
            bc: BoundaryCondition::Displacement,
            lambda: m.lambda,
            mu: m.mu,
            problem: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: invalid value '{value}' for '{key}'")))
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        let mut bc = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value'")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|s| s == key) {
                return Err(Error::Config(format!("line {line}: duplicate key '{key}'")));
            }
            seen.push(key.to_string());
            match key {
                "n" => cfg.n = parse_value(key, value, line)?,
                "k" => cfg.k = parse_value(key, value, line)?,
                "family" => cfg.family = parse_value(key, value, line)?,
                "bc" => bc = Some(parse_value::<BoundaryCondition>(key, value, line)?),
                "lambda" => cfg.lambda = parse_value(key, value, line)?,
                "mu" => cfg.mu = parse_value(key, value, line)?,
                "problem" => cfg.problem = Some(Problem::from_id(parse_value(key, value, line)?)?),
                other => return Err(Error::Config(format!("line {line}: unknown key '{other}'"))),
            }
        }
        cfg.bc = match (bc, cfg.problem) {
            (Some(b), Some(p)) if b != p.boundary_condition() => {
                return Err(Error::Config(format!(
                    "bc = {b} contradicts problem {} ({})",
                    p.id(),
                    p.boundary_condition()
                )))
            }
            (Some(b), _) => b,
            (None, Some(p)) => p.boundary_condition(),
            (None, None) => BoundaryCondition::Displacement,
        };
        cfg.material()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "k = {}", self.k);
        let _ = writeln!(out, "family = {}", self.family);
        let _ = writeln!(out, "bc = {}", self.bc);
        let _ = writeln!(out, "lambda = {:?}", self.lambda);
        let _ = writeln!(out, "mu = {:?}", self.mu);
        if let Some(p) = self.problem {
            let _ = writeln!(out, "problem = {}", p.id());
        }
        out
    }

    pub fn material(&self) -> Result<Material> {
        Material::new(self.lambda, self.mu)
    }

    pub fn discretization(&self) -> Result<Discretization> {
        Discretization::new(Mesh::uniform(self.n)?, self.k, self.family, self.bc)
    }
}
