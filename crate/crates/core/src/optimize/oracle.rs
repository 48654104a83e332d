//! Property oracles: built-in scores or an external command.

use std::io::Write;
use std::process::{Command, Stdio};

use crate::chem_io::write_smiles;
use crate::molgraph::MolecularGraph;

use super::property::{penalized_logp, PropertySpec};
use super::OptimizeError;

pub trait Oracle {
    fn evaluate(&self, g: &MolecularGraph) -> Result<f64, OptimizeError>;
}

impl<F: Fn(&MolecularGraph) -> f64> Oracle for F {
    fn evaluate(&self, g: &MolecularGraph) -> Result<f64, OptimizeError> {
        Ok(self(g))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOracle(pub PropertySpec);

impl Oracle for PropertyOracle {
    fn evaluate(&self, g: &MolecularGraph) -> Result<f64, OptimizeError> {
        penalized_logp(g, &self.0)
    }
}

/// Runs `program args...` once per molecule with the SMILES on stdin and
/// reads a decimal score from stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOracle {
    pub program: String,
    pub args: Vec<String>,
}

impl CommandOracle {
    /// Splits a command line on whitespace.
    pub fn parse(command: &str) -> Option<CommandOracle> {
        let mut parts = command.split_whitespace().map(str::to_owned);
        let program = parts.next()?;
        Some(CommandOracle { program, args: parts.collect() })
    }
}

impl Oracle for CommandOracle {
    fn evaluate(&self, g: &MolecularGraph) -> Result<f64, OptimizeError> {
        let smiles = write_smiles(g).map_err(|e| OptimizeError::Oracle(e.to_string()))?;
        let fail = |e: std::io::Error| OptimizeError::Oracle(format!("{}: {e}", self.program));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(fail)?;
        child.stdin.take().expect("piped stdin").write_all(format!("{smiles}\n").as_bytes()).map_err(fail)?;
        let out = child.wait_with_output().map_err(fail)?;
        if !out.status.success() {
            return Err(OptimizeError::Oracle(format!("{} exited with {} on {smiles}", self.program, out.status)));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        match text.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(OptimizeError::Oracle(format!("{} printed {:?} for {smiles}", self.program, text.trim()))),
        }
    }
}
