//! Molecular hypergraph grammars.
//!
//! Molecules are converted to hypergraphs (atoms become hyperedges, bonds
//! become nodes), decomposed into irredundant tree decompositions, and turned
//! into hyperedge replacement rules. Every derivation of the resulting grammar
//! decodes to a valence-correct molecule, which makes the grammar a drop-in
//! search space for Bayesian optimization.

pub mod chem_io;
pub mod grammar;
pub mod hashing;
pub mod hypergraph;
pub mod inference;
pub mod molgraph;
pub mod optimize;
pub mod treedecomp;

pub use chem_io::{load_dataset, parse_smiles, write_smiles, SmilesError};
pub use grammar::{ParseSequence, ProductionRule, RuleId, MHG};
pub use hypergraph::{dec_h, enc_h, Hypergraph, HyperedgeLabel, MolecularHypergraph};
pub use inference::{encode, infer, GrammarStats};
pub use molgraph::{AtomLabel, BondLabel, MolecularGraph};
pub use treedecomp::TreeDecomposition;
