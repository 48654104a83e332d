//! Penalized logP with deterministic logP and synthetic-accessibility proxies.

use crate::molgraph::{ring_sizes, Element, MolecularGraph};

use super::OptimizeError;

/// Largest ring of the minimum cycle basis minus six, floored at zero.
pub fn cycle_score(g: &MolecularGraph) -> f64 {
    ring_sizes(g).into_iter().max().map_or(0.0, |m| m.saturating_sub(6) as f64)
}

/// Additive per-atom contributions plus 0.1 per implicit hydrogen.
pub fn logp_proxy(g: &MolecularGraph) -> f64 {
    g.atoms()
        .iter()
        .map(|a| {
            let base = match a.element {
                Element::C => 0.2,
                Element::N => -0.2,
                Element::O => -0.4,
                Element::S => 0.1,
                Element::P => -0.3,
                Element::F | Element::Cl | Element::Br | Element::I => 0.4,
                Element::B | Element::H => 0.0,
            };
            base + 0.1 * f64::from(a.implicit_h)
        })
        .sum()
}

/// 0.05 per heavy atom, 0.3 per ring, 0.5 per atom with three or more heavy
/// neighbors.
pub fn sa_proxy(g: &MolecularGraph) -> f64 {
    let rings = g.bond_count() + g.connected_components() - g.atom_count();
    let branched = (0..g.atom_count()).filter(|&v| g.heavy_neighbor_count(v) >= 3).count();
    0.05 * g.atom_count() as f64 + 0.3 * rings as f64 + 0.5 * branched as f64
}

/// Per-component mean and population standard deviation. A constant
/// component has `std == 0` and is only centered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer {
    pub mean: f64,
    pub std: f64,
}

impl Standardizer {
    pub fn fit(column: &[f64]) -> Standardizer {
        if column.is_empty() {
            return Standardizer { mean: 0.0, std: 1.0 };
        }
        let n = column.len() as f64;
        let mean = column.iter().sum::<f64>() / n;
        let var = column.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        Standardizer { mean, std: if std > 1e-12 * mean.abs().max(1.0) { std } else { 0.0 } }
    }

    pub fn is_constant(&self) -> bool {
        self.std == 0.0
    }

    pub fn transform(&self, x: f64) -> f64 {
        if self.is_constant() {
            x - self.mean
        } else {
            (x - self.mean) / self.std
        }
    }

    pub fn inverse(&self, z: f64) -> f64 {
        if self.is_constant() {
            z + self.mean
        } else {
            z * self.std + self.mean
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreMode {
    /// Standardized logP − SA − cycle.
    Standardized,
    /// logP − SA, no cycle term.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertySpec {
    pub mode: ScoreMode,
    /// logP, SA and cycle standardizers.
    pub scalers: Option<[Standardizer; 3]>,
}

impl PropertySpec {
    pub fn raw() -> PropertySpec {
        PropertySpec { mode: ScoreMode::Raw, scalers: None }
    }

    pub fn standardized() -> PropertySpec {
        PropertySpec { mode: ScoreMode::Standardized, scalers: None }
    }

    /// Standardized spec fitted on a training set.
    pub fn fit(train: &[MolecularGraph]) -> PropertySpec {
        let col = |f: fn(&MolecularGraph) -> f64| Standardizer::fit(&train.iter().map(f).collect::<Vec<_>>());
        PropertySpec { mode: ScoreMode::Standardized, scalers: Some([col(logp_proxy), col(sa_proxy), col(cycle_score)]) }
    }
}

pub fn penalized_logp(g: &MolecularGraph, spec: &PropertySpec) -> Result<f64, OptimizeError> {
    match spec.mode {
        ScoreMode::Raw => Ok(logp_proxy(g) - sa_proxy(g)),
        ScoreMode::Standardized => {
            let [l, s, c] = spec.scalers.ok_or(OptimizeError::UnfittedStandardizer)?;
            Ok(l.transform(logp_proxy(g)) - s.transform(sa_proxy(g)) - c.transform(cycle_score(g)))
        }
    }
}
