//! Kekulé SMILES subset.
//!
//! Accepted: organic-subset atoms, bracket atoms with `@`/`@@`, H counts and
//! charges, bonds `- = # / \`, branches, ring closures (`1`..`9`, `%nn`).
//! Lowercase (aromatic) atoms are rejected rather than kekulized.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::molgraph::{
    lowest_valence, AtomLabel, BondLabel, BondOrder, Chirality, Element, EzTag, MolecularGraph,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("aromatic atom '{symbol}' at byte {pos}; only Kekulé SMILES is supported")]
    AromaticNotSupported { pos: usize, symbol: String },
    #[error("valence error on atom {atom} ({symbol}): {msg}")]
    Valence { atom: usize, symbol: String, msg: String },
    #[error("ring closure {0} was never closed")]
    UnclosedRing(u32),
    #[error("cannot write SMILES: {0}")]
    UnsupportedFeature(String),
}

impl SmilesError {
    /// Short machine-readable category used in corpus reports.
    pub fn kind(&self) -> &'static str {
        match self {
            SmilesError::Syntax { .. } => "SyntaxError",
            SmilesError::AromaticNotSupported { .. } => "AromaticNotSupported",
            SmilesError::Valence { .. } => "ValenceError",
            SmilesError::UnclosedRing(_) => "UnclosedRing",
            SmilesError::UnsupportedFeature(_) => "UnsupportedFeature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondSym {
    Single,
    Double,
    Triple,
    Up,
    Down,
}

impl BondSym {
    fn order(self) -> BondOrder {
        match self {
            BondSym::Double => BondOrder::Double,
            BondSym::Triple => BondOrder::Triple,
            _ => BondOrder::Single,
        }
    }

    fn direction(self) -> Option<i8> {
        match self {
            BondSym::Up => Some(1),
            BondSym::Down => Some(-1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ParsedAtom {
    element: Element,
    /// `Some(h)` for bracket atoms.
    bracket_h: Option<u8>,
    charge: i8,
    chirality: Chirality,
}

/// A `/` or `\` on a single bond, read from `from` towards `to`.
#[derive(Debug, Clone, Copy)]
struct Mark {
    from: usize,
    to: usize,
    dir: i8,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<ParsedAtom>,
    bonds: Vec<(usize, usize, BondOrder)>,
    marks: BTreeMap<usize, Mark>,
}

fn syntax(pos: usize, msg: impl Into<String>) -> SmilesError {
    SmilesError::Syntax {
        pos,
        msg: msg.into(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn add_bond(&mut self, a: usize, b: usize, sym: BondSym, pos: usize) -> Result<(), SmilesError> {
        if a == b {
            return Err(syntax(pos, "ring closure bonds an atom to itself"));
        }
        if self
            .bonds
            .iter()
            .any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a))
        {
            return Err(syntax(pos, "duplicate bond between the same atoms"));
        }
        let idx = self.bonds.len();
        self.bonds.push((a, b, sym.order()));
        if let Some(dir) = sym.direction() {
            self.marks.insert(idx, Mark { from: a, to: b, dir });
        }
        Ok(())
    }

    fn parse_bracket(&mut self) -> Result<ParsedAtom, SmilesError> {
        let start = self.pos;
        self.pos += 1; // '['
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(syntax(self.pos, "isotopes are not supported"));
        }
        let first = self.peek().ok_or_else(|| syntax(self.pos, "unterminated bracket atom"))?;
        if first.is_ascii_lowercase() {
            let mut sym = (first as char).to_string();
            if let Some(c) = self.bytes.get(self.pos + 1) {
                if matches!((first, *c), (b's', b'e') | (b'a', b's')) {
                    sym.push(*c as char);
                }
            }
            return Err(SmilesError::AromaticNotSupported {
                pos: self.pos,
                symbol: sym,
            });
        }
        if !first.is_ascii_uppercase() {
            return Err(syntax(self.pos, "expected element symbol"));
        }
        let mut symbol = (first as char).to_string();
        self.pos += 1;
        if let Some(c) = self.peek() {
            if c.is_ascii_lowercase() {
                let two = format!("{}{}", first as char, c as char);
                if Element::from_symbol(&two).is_ok() {
                    symbol = two;
                    self.pos += 1;
                } else {
                    return Err(syntax(self.pos, format!("unsupported element '{two}'")));
                }
            }
        }
        let element = Element::from_symbol(&symbol)
            .map_err(|_| syntax(start + 1, format!("unsupported element '{symbol}'")))?;

        let mut chirality = Chirality::None;
        if self.peek() == Some(b'@') {
            self.pos += 1;
            chirality = Chirality::Ccw;
            if self.peek() == Some(b'@') {
                self.pos += 1;
                chirality = Chirality::Cw;
            }
            if self.peek().is_some_and(|c| c.is_ascii_uppercase() && c != b'H') {
                return Err(syntax(self.pos, "only @ and @@ chirality is supported"));
            }
        }

        let mut h = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            h = 1;
            if let Some(c) = self.peek().filter(u8::is_ascii_digit) {
                h = c - b'0';
                self.pos += 1;
            }
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(c) = self.peek().filter(u8::is_ascii_digit) {
                charge = unit * i32::from(c - b'0');
                self.pos += 1;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    charge += unit;
                    self.pos += 1;
                }
            }
        }
        if self.peek() != Some(b']') {
            return Err(syntax(self.pos, "expected ']'"));
        }
        self.pos += 1;
        let charge = i8::try_from(charge).map_err(|_| syntax(start, "charge out of range"))?;
        Ok(ParsedAtom {
            element,
            bracket_h: Some(h),
            charge,
            chirality,
        })
    }

    fn parse_organic(&mut self) -> Result<ParsedAtom, SmilesError> {
        let c = self.peek().unwrap();
        let next = self.bytes.get(self.pos + 1).copied();
        let (element, len) = match (c, next) {
            (b'C', Some(b'l')) => (Element::Cl, 2),
            (b'B', Some(b'r')) => (Element::Br, 2),
            (b'B', _) => (Element::B, 1),
            (b'C', _) => (Element::C, 1),
            (b'N', _) => (Element::N, 1),
            (b'O', _) => (Element::O, 1),
            (b'P', _) => (Element::P, 1),
            (b'S', _) => (Element::S, 1),
            (b'F', _) => (Element::F, 1),
            (b'I', _) => (Element::I, 1),
            (b'b' | b'c' | b'n' | b'o' | b'p' | b's', _) => {
                return Err(SmilesError::AromaticNotSupported {
                    pos: self.pos,
                    symbol: (c as char).to_string(),
                })
            }
            _ => return Err(syntax(self.pos, format!("unexpected character '{}'", c as char))),
        };
        self.pos += len;
        Ok(ParsedAtom {
            element,
            bracket_h: None,
            charge: 0,
            chirality: Chirality::None,
        })
    }

    fn parse_ring_number(&mut self) -> Result<u32, SmilesError> {
        let c = self.peek().unwrap();
        if c == b'%' {
            let d: Vec<u8> = self.bytes[self.pos + 1..].iter().take(2).copied().collect();
            if d.len() != 2 || !d.iter().all(u8::is_ascii_digit) {
                return Err(syntax(self.pos, "'%' must be followed by two digits"));
            }
            self.pos += 3;
            Ok(u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0'))
        } else {
            self.pos += 1;
            Ok(u32::from(c - b'0'))
        }
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        if self.bytes.is_empty() {
            return Err(syntax(0, "empty SMILES"));
        }
        let mut prev: Option<usize> = None;
        let mut pending: Option<(BondSym, usize)> = None;
        let mut branches: Vec<usize> = Vec::new();
        let mut rings: BTreeMap<u32, (usize, Option<BondSym>, usize)> = BTreeMap::new();

        while let Some(c) = self.peek() {
            let here = self.pos;
            match c {
                b'-' | b'=' | b'#' | b'/' | b'\\' => {
                    if pending.is_some() {
                        return Err(syntax(here, "two consecutive bond symbols"));
                    }
                    if prev.is_none() {
                        return Err(syntax(here, "bond symbol before any atom"));
                    }
                    let sym = match c {
                        b'-' => BondSym::Single,
                        b'=' => BondSym::Double,
                        b'#' => BondSym::Triple,
                        b'/' => BondSym::Up,
                        _ => BondSym::Down,
                    };
                    pending = Some((sym, here));
                    self.pos += 1;
                }
                b':' => {
                    return Err(SmilesError::AromaticNotSupported {
                        pos: here,
                        symbol: ":".into(),
                    })
                }
                b'$' => return Err(syntax(here, "quadruple bonds are not supported")),
                b'.' => return Err(syntax(here, "disconnected structures are not supported")),
                b'(' => {
                    let p = prev.ok_or_else(|| syntax(here, "branch before any atom"))?;
                    if pending.is_some() {
                        return Err(syntax(here, "bond symbol before '('"));
                    }
                    branches.push(p);
                    self.pos += 1;
                    if self.peek() == Some(b')') {
                        return Err(syntax(self.pos, "empty branch"));
                    }
                }
                b')' => {
                    if pending.is_some() {
                        return Err(syntax(here, "dangling bond symbol before ')'"));
                    }
                    prev = Some(branches.pop().ok_or_else(|| syntax(here, "unbalanced ')'"))?);
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let atom = prev.ok_or_else(|| syntax(here, "ring closure before any atom"))?;
                    let number = self.parse_ring_number()?;
                    let sym = pending.take().map(|(s, _)| s);
                    match rings.remove(&number) {
                        None => {
                            rings.insert(number, (atom, sym, here));
                        }
                        Some((open, open_sym, _)) => {
                            let chosen = match (open_sym, sym) {
                                (None, None) => BondSym::Single,
                                (Some(s), None) => s,
                                (None, Some(s)) => s,
                                (Some(a), Some(b)) => {
                                    let ok = a == b
                                        || matches!(
                                            (a, b),
                                            (BondSym::Up, BondSym::Down) | (BondSym::Down, BondSym::Up)
                                        );
                                    if !ok {
                                        return Err(syntax(here, "conflicting ring-closure bond symbols"));
                                    }
                                    a
                                }
                            };
                            // A mark written at the closing digit reads from this atom.
                            let (from, to) = if open_sym.is_none() && sym.is_some() {
                                (atom, open)
                            } else {
                                (open, atom)
                            };
                            self.add_bond(from, to, chosen, here)?;
                        }
                    }
                }
                b'[' | b'A'..=b'Z' | b'a'..=b'z' => {
                    let atom = if c == b'[' {
                        self.parse_bracket()?
                    } else {
                        self.parse_organic()?
                    };
                    let idx = self.atoms.len();
                    self.atoms.push(atom);
                    if let Some(p) = prev {
                        let sym = pending.take().map_or(BondSym::Single, |(s, _)| s);
                        self.add_bond(p, idx, sym, here)?;
                    }
                    prev = Some(idx);
                }
                _ => return Err(syntax(here, format!("unexpected character '{}'", c as char))),
            }
        }
        if let Some((_, pos)) = pending {
            return Err(syntax(pos, "dangling bond symbol at end of input"));
        }
        if !branches.is_empty() {
            return Err(syntax(self.bytes.len(), "unbalanced '('"));
        }
        if let Some((&number, _)) = rings.iter().next() {
            return Err(SmilesError::UnclosedRing(number));
        }
        Ok(())
    }
}

/// Reference-neighbor sign for one end of a double bond.
fn side_sign(mark: &Mark, end: usize) -> i8 {
    // Mark read as "x / end" means x sits on the reference side; reading it
    // from `end` outward flips the sense.
    if mark.to == end {
        mark.dir
    } else {
        -mark.dir
    }
}

/// Parses a Kekulé SMILES string into a molecular graph.
pub fn parse_smiles(text: &str) -> Result<MolecularGraph, SmilesError> {
    let mut p = Parser {
        bytes: text.trim().as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        marks: BTreeMap::new(),
    };
    p.run()?;

    let n = p.atoms.len();
    let mut bond_sum = vec![0u32; n];
    for &(a, b, o) in &p.bonds {
        bond_sum[a] += u32::from(o.weight());
        bond_sum[b] += u32::from(o.weight());
    }

    let mut g = MolecularGraph::new();
    for (i, atom) in p.atoms.iter().enumerate() {
        let symbol = atom.element.symbol().to_string();
        let valence_err = |msg: String| SmilesError::Valence {
            atom: i,
            symbol: symbol.clone(),
            msg,
        };
        let label = match atom.bracket_h {
            None => {
                let v = lowest_valence(atom.element, 0, bond_sum[i]).map_err(|e| valence_err(e.to_string()))?;
                AtomLabel {
                    element: atom.element,
                    charge: 0,
                    implicit_h: v - bond_sum[i] as u8,
                    valence: v,
                    chirality: atom.chirality,
                }
            }
            Some(h) => {
                let total = bond_sum[i] + u32::from(h);
                let table = crate::molgraph::allowed_valences(atom.element, atom.charge).ok_or_else(|| {
                    valence_err(format!("charge {:+} is not supported for this element", atom.charge))
                })?;
                let valence = table
                    .iter()
                    .copied()
                    .find(|&v| u32::from(v) == total)
                    .ok_or_else(|| valence_err(format!("{total} bonding units match no allowed valence {table:?}")))?;
                AtomLabel {
                    element: atom.element,
                    charge: atom.charge,
                    implicit_h: h,
                    valence,
                    chirality: atom.chirality,
                }
            }
        };
        g.add_atom(label);
    }
    for &(a, b, o) in &p.bonds {
        g.add_bond(a, b, BondLabel { order: o, ez: EzTag::None })
            .map_err(|e| syntax(0, e.to_string()))?;
    }

    // E/Z from directional marks on both ends of a double bond.
    if !p.marks.is_empty() {
        for (bi, &(a, b, o)) in p.bonds.iter().enumerate() {
            if o != BondOrder::Double {
                continue;
            }
            let side = |end: usize, other: usize| -> Option<i8> {
                p.marks
                    .iter()
                    .filter(|(_, m)| (m.from == end || m.to == end) && m.from != other && m.to != other)
                    .min_by_key(|(_, m)| if m.from == end { m.to } else { m.from })
                    .map(|(_, m)| side_sign(m, end))
            };
            // The far end is read in the opposite direction.
            let sa = side(a, b);
            let sb = side(b, a).map(|s| -s);
            if let (Some(sa), Some(sb)) = (sa, sb) {
                let ez = if sa == sb { EzTag::E } else { EzTag::Z };
                g.set_bond_label(bi, BondLabel { order: o, ez });
            }
        }
    }
    Ok(g)
}

/// Writes a deterministic (not canonical) SMILES string for `g`.
pub fn write_smiles(g: &MolecularGraph) -> Result<String, SmilesError> {
    let n = g.atom_count();
    if n == 0 {
        return Err(SmilesError::UnsupportedFeature("empty graph".into()));
    }
    if g.connected_components() != 1 {
        return Err(SmilesError::UnsupportedFeature("disconnected graph".into()));
    }
    for (i, a) in g.atoms().iter().enumerate() {
        if !a.is_supported() {
            return Err(SmilesError::UnsupportedFeature(format!("atom {i} has label {a}")));
        }
    }
    if g.bonds().iter().any(|b| !b.label.is_valid()) {
        return Err(SmilesError::UnsupportedFeature("E/Z tag on non-double bond".into()));
    }

    // DFS spanning tree from atom 0, neighbors in ascending index order.
    let mut order = Vec::with_capacity(n);
    let mut rank = vec![usize::MAX; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut tree_bond = vec![false; g.bond_count()];
    fn dfs(
        g: &MolecularGraph,
        v: usize,
        order: &mut Vec<usize>,
        rank: &mut [usize],
        children: &mut [Vec<(usize, usize)>],
        tree_bond: &mut [bool],
    ) {
        rank[v] = order.len();
        order.push(v);
        let mut nbrs = g.neighbors(v).to_vec();
        nbrs.sort_unstable();
        for (w, e) in nbrs {
            if rank[w] == usize::MAX {
                tree_bond[e] = true;
                children[v].push((w, e));
                dfs(g, w, order, rank, children, tree_bond);
            }
        }
    }
    dfs(g, 0, &mut order, &mut rank, &mut children, &mut tree_bond);

    let marks = assign_direction_marks(g, &rank)?;

    // Ring closures: opened at the earlier atom, closed at the later one.
    let mut ring_bonds_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, b) in g.bonds().iter().enumerate() {
        if !tree_bond[e] {
            ring_bonds_at[b.a].push(e);
            ring_bonds_at[b.b].push(e);
        }
    }
    for list in &mut ring_bonds_at {
        list.sort_by_key(|&e| e);
    }

    let mut out = String::new();
    let mut open: BTreeMap<usize, u32> = BTreeMap::new();
    let mut free: Vec<bool> = vec![true; 100];
    let bond_text = |e: usize, from: usize| -> String {
        let label = g.bond(e).label;
        match label.order {
            BondOrder::Double => "=".into(),
            BondOrder::Triple => "#".into(),
            BondOrder::Single => match marks.get(&e) {
                // Marks are stored relative to the earlier-ranked atom.
                Some(&d) => {
                    let b = g.bond(e);
                    let other = b.other(from);
                    let d = if rank[from] < rank[other] { d } else { -d };
                    if d > 0 { "/".into() } else { "\\".into() }
                }
                None => String::new(),
            },
        }
    };

    let mut stack: Vec<Frame> = vec![Frame::Atom(0, None)];
    enum Frame {
        Atom(usize, Option<usize>),
        Text(&'static str),
    }
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Text(t) => out.push_str(t),
            Frame::Atom(v, via) => {
                if let Some(e) = via {
                    let parent = g.bond(e).other(v);
                    out.push_str(&bond_text(e, parent));
                }
                write_atom(g, v, &mut out);
                let mut released = Vec::new();
                for &e in &ring_bonds_at[v] {
                    let partner = g.bond(e).other(v);
                    if rank[partner] < rank[v] {
                        if let Some(d) = open.remove(&e) {
                            released.push(d);
                            push_ring_digit(&mut out, d);
                        }
                    }
                }
                for &e in &ring_bonds_at[v] {
                    let partner = g.bond(e).other(v);
                    if rank[partner] > rank[v] {
                        let d = free
                            .iter()
                            .enumerate()
                            .skip(1)
                            .find(|(_, f)| **f)
                            .map(|(i, _)| i)
                            .ok_or_else(|| SmilesError::UnsupportedFeature("more than 99 open rings".into()))?;
                        free[d] = false;
                        open.insert(e, d as u32);
                        out.push_str(&bond_text(e, v));
                        push_ring_digit(&mut out, d as u32);
                    }
                }
                for d in released {
                    free[d as usize] = true;
                }
                let kids = &children[v];
                // Push in reverse so the first child is emitted first; all but
                // the last child go in parentheses.
                for (i, &(w, e)) in kids.iter().enumerate().rev() {
                    if i + 1 == kids.len() {
                        stack.push(Frame::Atom(w, Some(e)));
                    } else {
                        stack.push(Frame::Text(")"));
                        stack.push(Frame::Atom(w, Some(e)));
                        stack.push(Frame::Text("("));
                    }
                }
            }
        }
    }

    if !marks.is_empty() || g.bonds().iter().any(|b| b.label.ez != EzTag::None) {
        verify_stereo_roundtrip(g, &order, &out)?;
    }
    Ok(out)
}

fn push_ring_digit(out: &mut String, d: u32) {
    if d < 10 {
        out.push(char::from(b'0' + d as u8));
    } else {
        out.push_str(&format!("%{d:02}"));
    }
}

fn write_atom(g: &MolecularGraph, v: usize, out: &mut String) {
    let a = g.atom(v);
    let sum = g.weighted_degree(v);
    let organic = matches!(
        a.element,
        Element::B
            | Element::C
            | Element::N
            | Element::O
            | Element::P
            | Element::S
            | Element::F
            | Element::Cl
            | Element::Br
            | Element::I
    ) && a.charge == 0
        && a.chirality == Chirality::None
        && lowest_valence(a.element, 0, sum).is_ok_and(|lv| lv == a.valence && u32::from(lv) - sum == u32::from(a.implicit_h));
    if organic {
        out.push_str(a.element.symbol());
        return;
    }
    out.push('[');
    out.push_str(a.element.symbol());
    match a.chirality {
        Chirality::None => {}
        Chirality::Ccw => out.push('@'),
        Chirality::Cw => out.push_str("@@"),
    }
    match a.implicit_h {
        0 => {}
        1 => out.push('H'),
        h => out.push_str(&format!("H{h}")),
    }
    match a.charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        c if c > 0 => out.push_str(&format!("+{c}")),
        c => out.push_str(&format!("-{}", -c)),
    }
    out.push(']');
}

/// Chooses `/` `\` marks (relative to the earlier-ranked atom of each bond)
/// so that the parser recovers every E/Z tag.
fn assign_direction_marks(
    g: &MolecularGraph,
    rank: &[usize],
) -> Result<BTreeMap<usize, i8>, SmilesError> {
    let stereo: Vec<usize> = g
        .bonds()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.label.ez != EzTag::None)
        .map(|(i, _)| i)
        .collect();
    if stereo.is_empty() {
        return Ok(BTreeMap::new());
    }
    // Reference neighbor: lowest-ranked single-bonded neighbor.
    let reference = |end: usize, other: usize| -> Option<(usize, usize)> {
        g.neighbors(end)
            .iter()
            .filter(|&&(w, e)| w != other && g.bond(e).label.order == BondOrder::Single)
            .min_by_key(|&&(w, _)| rank[w])
            .copied()
    };
    // Parity union-find over marked bonds.
    let mut parent: BTreeMap<usize, (usize, i8)> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<usize, (usize, i8)>, x: usize) -> (usize, i8) {
        let (p, s) = *parent.entry(x).or_insert((x, 1));
        if p == x {
            return (x, 1);
        }
        let (root, sp) = find(parent, p);
        parent.insert(x, (root, s * sp));
        (root, s * sp)
    }
    for &bi in &stereo {
        let b = *g.bond(bi);
        let (Some((x, ex)), Some((y, ey))) = (reference(b.a, b.b), reference(b.b, b.a)) else {
            return Err(SmilesError::UnsupportedFeature(format!(
                "E/Z bond {bi} lacks a single-bonded substituent on one end"
            )));
        };
        // Parser sign at end `a` is side_sign(mark, a); at end `b` the reading
        // is reversed. With mark d stored relative to the earlier atom:
        //   sign_a = d_x * (+1 if x earlier than a else -1)
        //   sign_b = -(d_y * (+1 if y earlier than b else -1))
        let oa: i8 = if rank[x] < rank[b.a] { 1 } else { -1 };
        let ob: i8 = if rank[y] < rank[b.b] { -1 } else { 1 };
        // E: sign_a == sign_b  =>  d_x * d_y == oa * ob; Z flips it.
        let want: i8 = oa * ob * if b.label.ez == EzTag::E { 1 } else { -1 };
        let (rx, sx) = find(&mut parent, ex);
        let (ry, sy) = find(&mut parent, ey);
        if rx == ry {
            if sx * sy != want {
                return Err(SmilesError::UnsupportedFeature(format!(
                    "conflicting E/Z constraints around bond {bi}"
                )));
            }
        } else {
            parent.insert(rx, (ry, sx * sy * want));
        }
    }
    let keys: Vec<usize> = parent.keys().copied().collect();
    Ok(keys
        .into_iter()
        .map(|e| {
            let (_, s) = find(&mut parent, e);
            (e, s)
        })
        .collect())
}

fn verify_stereo_roundtrip(g: &MolecularGraph, order: &[usize], text: &str) -> Result<(), SmilesError> {
    let re = parse_smiles(text)?;
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for b in g.bonds() {
        let e = re
            .bond_between(pos[b.a], pos[b.b])
            .ok_or_else(|| SmilesError::UnsupportedFeature("stereo round-trip lost a bond".into()))?;
        if re.bond(e).label != b.label {
            return Err(SmilesError::UnsupportedFeature(
                "E/Z tags cannot be expressed with local direction marks".into(),
            ));
        }
    }
    Ok(())
}
