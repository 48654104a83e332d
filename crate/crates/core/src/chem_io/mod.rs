//! SMILES text I/O and corpus loading.

mod dataset;
mod smiles;

pub use dataset::{load_dataset, parse_corpus, CorpusEntry, CorpusReport, Rejection};
pub use smiles::{parse_smiles, write_smiles, SmilesError};
