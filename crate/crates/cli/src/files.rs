//! On-disk formats. Grammar and sequence files are JSON with sorted keys and a
//! `format_version` field; reports are tab-separated.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use mhg_core::{ParseSequence, ProductionRule, RuleId, MHG};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct RuleEntry {
    id: RuleId,
    /// Canonical key, hex encoded.
    key: String,
    #[serde(flatten)]
    rule: ProductionRule,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GrammarFile {
    format_version: u32,
    rules: Vec<RuleEntry>,
    start_rules: Vec<RuleId>,
}

impl GrammarFile {
    pub fn from_mhg(mhg: &MHG) -> GrammarFile {
        let rules = mhg
            .rules()
            .iter()
            .enumerate()
            .map(|(id, rule)| RuleEntry { id, key: hex::encode(mhg.key(id)), rule: rule.clone() })
            .collect();
        GrammarFile { format_version: FORMAT_VERSION, rules, start_rules: mhg.start_rules().to_vec() }
    }

    /// Rebuilds the grammar, rejecting files whose keys or start-rule table
    /// disagree with the stored rules.
    pub fn into_mhg(self) -> Result<MHG> {
        if self.format_version != FORMAT_VERSION {
            bail!("unsupported grammar format version {}", self.format_version);
        }
        let mut rules = Vec::with_capacity(self.rules.len());
        for (i, e) in self.rules.into_iter().enumerate() {
            if e.id != i {
                bail!("rule table out of order at entry {i} (id {})", e.id);
            }
            let key = hex::decode(&e.key).with_context(|| format!("rule {i}: key is not hex"))?;
            rules.push((e.rule, key));
        }
        let mhg = MHG::from_canonical_rules(rules)?;
        if mhg.start_rules() != self.start_rules.as_slice() {
            bail!("start-rule table does not match the rules");
        }
        Ok(mhg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEntry {
    /// 1-based line of the source SMILES file.
    pub line: usize,
    pub smiles: String,
    pub rules: ParseSequence,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SequenceFile {
    pub format_version: u32,
    pub sequences: Vec<SequenceEntry>,
}

impl SequenceFile {
    pub fn new(sequences: Vec<SequenceEntry>) -> SequenceFile {
        SequenceFile { format_version: FORMAT_VERSION, sequences }
    }
}

/// Pretty JSON with object keys sorted.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Map is a BTreeMap without the preserve_order feature
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn save_grammar(path: &Path, mhg: &MHG) -> Result<()> {
    let text = to_sorted_json(&GrammarFile::from_mhg(mhg))?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn load_grammar(path: &Path) -> Result<MHG> {
    let text = fs::read_to_string(path).with_context(|| format!("reading grammar {}", path.display()))?;
    let file: GrammarFile = serde_json::from_str(&text).with_context(|| format!("parsing grammar {}", path.display()))?;
    file.into_mhg().with_context(|| format!("loading grammar {}", path.display()))
}

pub fn save_sequences(path: &Path, entries: Vec<SequenceEntry>) -> Result<()> {
    let text = to_sorted_json(&SequenceFile::new(entries))?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn load_sequences(path: &Path) -> Result<Vec<SequenceEntry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading sequences {}", path.display()))?;
    let file: SequenceFile = serde_json::from_str(&text).with_context(|| format!("parsing sequences {}", path.display()))?;
    if file.format_version != FORMAT_VERSION {
        bail!("unsupported sequence format version {}", file.format_version);
    }
    Ok(file.sequences)
}

/// Tab-separated report accumulated in memory.
#[derive(Debug, Default)]
pub struct Tsv(String);

impl Tsv {
    pub fn new() -> Tsv {
        Tsv::default()
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.0.push('\t');
            }
            first = false;
            // tabs and newlines would break the column layout
            self.0.extend(f.as_ref().chars().map(|c| if c == '\t' || c == '\n' { ' ' } else { c }));
        }
        self.0.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Writes `text` to `path`, or to stdout when `path` is None.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.6}")
}
