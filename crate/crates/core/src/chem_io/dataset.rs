use std::fs;
use std::io;
use std::path::Path;

use super::smiles::{parse_smiles, SmilesError};
use crate::molgraph::MolecularGraph;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    /// 1-based line number in the source text.
    pub line: usize,
    pub smiles: String,
    pub graph: MolecularGraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: usize,
    pub smiles: String,
    pub reason: SmilesError,
}

/// Blank and `#` comment lines are neither accepted nor rejected.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusReport {
    pub accepted: usize,
    pub rejected: Vec<Rejection>,
}

impl CorpusReport {
    pub fn total(&self) -> usize {
        self.accepted + self.rejected.len()
    }
}

/// Parses one-SMILES-per-line text; trailing whitespace-separated fields are ignored.
pub fn parse_corpus(text: &str) -> (Vec<CorpusEntry>, CorpusReport) {
    let mut entries = Vec::new();
    let mut report = CorpusReport::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let smiles = line.split_whitespace().next().unwrap_or_default();
        match parse_smiles(smiles) {
            Ok(graph) => {
                report.accepted += 1;
                entries.push(CorpusEntry {
                    line: i + 1,
                    smiles: smiles.to_string(),
                    graph,
                });
            }
            Err(reason) => report.rejected.push(Rejection {
                line: i + 1,
                smiles: smiles.to_string(),
                reason,
            }),
        }
    }
    (entries, report)
}

pub fn load_dataset(path: impl AsRef<Path>) -> io::Result<(Vec<MolecularGraph>, CorpusReport)> {
    let text = fs::read_to_string(path)?;
    let (entries, report) = parse_corpus(&text);
    Ok((entries.into_iter().map(|e| e.graph).collect(), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn load(text: &str) -> (Vec<MolecularGraph>, CorpusReport) {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        load_dataset(f.path()).unwrap()
    }

    #[test]
    fn loads_two_molecules() {
        let (g, r) = load("CC\nCCO\n");
        assert_eq!(g.len(), 2);
        assert_eq!(r.accepted, 2);
        assert!(r.rejected.is_empty());
    }

    #[test]
    fn records_aromatic_rejection() {
        let (g, r) = load("# header\nCC\nc1ccccc1 benzene\n\nCCO 1.25\n");
        assert_eq!(g.len(), 2);
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.rejected[0].line, 3);
        assert_eq!(r.rejected[0].reason.kind(), "AromaticNotSupported");
        assert_eq!(r.total(), 3);
        assert_eq!(g[1].atom_count(), 3);
    }

    #[test]
    fn empty_file() {
        let (g, r) = load("");
        assert!(g.is_empty());
        assert_eq!(r, CorpusReport::default());
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(load_dataset("/nonexistent/corpus.smi").is_err());
    }
}
