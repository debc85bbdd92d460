//! Named residual checks and their JSON form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// First probe radius of [`doubling_radius`].
pub const RADIUS_START: f64 = 1e-3;
/// Largest probe radius of [`doubling_radius`].
pub const RADIUS_CAP: f64 = 8.0;

/// Largest radius among `1e-3, 2e-3, 4e-3, …` (capped at 8) such that
/// `holds` is true there and at every smaller probe; zero when the first
/// probe already fails. Reaching the cap means the estimate saturated.
pub fn doubling_radius(mut holds: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    let mut last = 0.0;
    let mut rho = RADIUS_START;
    while rho <= RADIUS_CAP {
        if !holds(rho)? {
            break;
        }
        last = rho;
        rho *= 2.0;
    }
    Ok(last)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// A hypothesis the statement relies on.
    Premise,
    /// Something the statement concludes.
    Conclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub kind: CheckKind,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, kind: CheckKind) -> Self {
        Check {
            name: name.into(),
            residual,
            tolerance,
            // NaN never passes.
            pass: residual <= tolerance,
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, f64>,
    #[serde(default)]
    pub config_echo: serde_json::Value,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>) -> Self {
        CheckReport {
            suite: suite.into(),
            checks: Vec::new(),
            values: BTreeMap::new(),
            config_echo: serde_json::Value::Null,
        }
    }

    pub fn conclusion(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let c = Check::new(name, residual, tolerance, CheckKind::Conclusion);
        let pass = c.pass;
        self.checks.push(c);
        pass
    }

    pub fn premise(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let c = Check::new(name, residual, tolerance, CheckKind::Premise);
        let pass = c.pass;
        self.checks.push(c);
        pass
    }

    pub fn value(&mut self, name: impl Into<String>, v: f64) {
        self.values.insert(name.into(), v);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn premises_hold(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::Premise)
            .all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Appends another report's checks and values under `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.values {
            self.values.insert(format!("{prefix}.{k}"), v);
        }
    }

    /// Largest `residual / tolerance` over all checks (infinite for a failed
    /// zero-tolerance check).
    pub fn worst_ratio(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| {
                if c.tolerance > 0.0 {
                    c.residual / c.tolerance
                } else if c.residual <= 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite)?;
        for c in &self.checks {
            let tag = match c.kind {
                CheckKind::Premise => "premise",
                CheckKind::Conclusion => "check",
            };
            writeln!(
                f,
                "  [{}] {tag:7} {:<40} residual {:>12.4e}  tol {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            )?;
        }
        for (k, v) in &self.values {
            writeln!(f, "  {k} = {v:e}")?;
        }
        Ok(())
    }
}
