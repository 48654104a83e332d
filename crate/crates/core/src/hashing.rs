//! Stable 64-bit hashing with fixed constants (FNV-1a), independent of the
//! standard library's randomized hasher.

use crate::molgraph::{AtomLabel, BondLabel, BondOrder, Chirality, EzTag};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, Copy)]
pub struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Fnv64(FNV_OFFSET)
    }
}

impl Fnv64 {
    pub fn new() -> Fnv64 {
        Fnv64::default()
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        // splitmix finalizer spreads low-entropy FNV states across all bits
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

pub fn atom_label_bytes(l: &AtomLabel) -> [u8; 5] {
    [
        l.element as u8,
        l.charge as u8,
        l.implicit_h,
        l.valence,
        match l.chirality {
            Chirality::None => 0,
            Chirality::Ccw => 1,
            Chirality::Cw => 2,
        },
    ]
}

pub fn bond_label_bytes(l: &BondLabel) -> [u8; 2] {
    [
        match l.order {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        },
        match l.ez {
            EzTag::None => 0,
            EzTag::E => 1,
            EzTag::Z => 2,
        },
    ]
}

pub fn hash_atom_label(l: &AtomLabel) -> u64 {
    let mut h = Fnv64::new();
    h.write(b"atom");
    h.write(&atom_label_bytes(l));
    h.finish()
}

pub fn hash_bond_label(l: &BondLabel) -> u64 {
    let mut h = Fnv64::new();
    h.write(b"bond");
    h.write(&bond_label_bytes(l));
    h.finish()
}
