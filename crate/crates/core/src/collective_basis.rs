//! Three-atom collective basis: products of in-scope Rydberg sublevels near
//! the reference energy, optionally extended with logical ground states.

use std::collections::HashMap;
use std::fmt;

use crate::atomic_data::{level_energy, AtomicConstants, RydbergLevel};
use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

pub const ATOMS: usize = 3;

/// State of one atom in the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomState {
    /// Logical ground state `|0>` or `|1>`.
    Ground(u8),
    Rydberg(RydbergLevel),
}

impl AtomState {
    pub fn is_rydberg(&self) -> bool {
        matches!(self, AtomState::Rydberg(_))
    }

    pub fn rydberg(&self) -> Option<&RydbergLevel> {
        match self {
            AtomState::Rydberg(l) => Some(l),
            AtomState::Ground(_) => None,
        }
    }
}

impl fmt::Display for AtomState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomState::Ground(b) => write!(f, "{b}"),
            AtomState::Rydberg(l) => write!(f, "{l}"),
        }
    }
}

pub type Label = [AtomState; ATOMS];

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveState<T> {
    pub atoms: Label,
    /// Twice the total `m_j` of the Rydberg-excited atoms.
    pub twice_m: i32,
    /// Zero-field energy relative to the reference, GHz. Each Rydberg atom
    /// contributes `E_i - E_ref`, ground atoms contribute nothing (laser frame).
    pub e0_ghz: T,
}

impl<T> CollectiveState<T> {
    pub fn rydberg_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_rydberg()).count()
    }

    pub fn label(&self) -> String {
        format_label(&self.atoms)
    }
}

pub fn format_label(atoms: &Label) -> String {
    let parts: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
    format!("|{}>", parts.join(", "))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet<T> {
    pub states: Vec<CollectiveState<T>>,
    pub index: HashMap<Label, usize>,
    /// Position of the all-reference `|R R R>` state, when present.
    pub reference: Option<usize>,
    pub n: u32,
    pub reference_level: RydbergLevel,
    pub window_ghz: T,
}

/// The single-atom inventory for principal number `n`: nS, (n+1)S, nP1/2 at
/// `m_j = ±1/2` and nP3/2 at all four projections.
pub fn sublevel_inventory(n: u32) -> Vec<RydbergLevel> {
    let mut v = Vec::with_capacity(10);
    for m in [-1, 1] {
        v.push(RydbergLevel::s12(n, m));
        v.push(RydbergLevel::s12(n + 1, m));
        v.push(RydbergLevel::p12(n, m));
    }
    for m in [-3, -1, 1, 3] {
        v.push(RydbergLevel::p32(n, m));
    }
    v.sort();
    v
}

/// The laser-addressed Rydberg level `nP3/2(+1/2)`.
pub fn reference_level(n: u32) -> RydbergLevel {
    RydbergLevel::p32(n, 1)
}

/// All `k`-atom ordered tuples of inventory levels with total `M = k/2` and
/// energy within `window_ghz` of `k` reference atoms.
pub fn rydberg_sector<T: Scalar>(
    n: u32,
    k: usize,
    window_ghz: T,
    constants: &AtomicConstants<T>,
) -> Result<Vec<(Vec<RydbergLevel>, T)>> {
    let inventory = sublevel_inventory(n);
    let e_ref = level_energy(&reference_level(n), constants)?;
    let shifts: Vec<T> = inventory
        .iter()
        .map(|l| level_energy(l, constants).map(|e| e - e_ref))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    let total = inventory.len().pow(k as u32);
    for code in 0..total {
        let mut rest = code;
        for slot in idx.iter_mut().rev() {
            *slot = rest % inventory.len();
            rest /= inventory.len();
        }
        let twice_m: i32 = idx.iter().map(|&i| inventory[i].twice_mj).sum();
        if twice_m != k as i32 {
            continue;
        }
        let e: T = idx.iter().map(|&i| shifts[i]).sum();
        if e.abs() <= window_ghz {
            out.push((idx.iter().map(|&i| inventory[i]).collect(), e));
        }
    }
    Ok(out)
}

impl<T: Scalar> BasisSet<T> {
    fn from_states(mut states: Vec<CollectiveState<T>>, n: u32, window_ghz: T) -> Self {
        states.sort_by(|a, b| {
            a.rydberg_count()
                .cmp(&b.rydberg_count())
                .then(a.e0_ghz.partial_cmp(&b.e0_ghz).unwrap_or(std::cmp::Ordering::Equal))
                .then(a.atoms.cmp(&b.atoms))
        });
        let index = states.iter().enumerate().map(|(i, s)| (s.atoms, i)).collect::<HashMap<_, _>>();
        let r = AtomState::Rydberg(reference_level(n));
        let reference = index.get(&[r; ATOMS]).copied();
        Self { states, index, reference, n, reference_level: reference_level(n), window_ghz }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn position(&self, atoms: &Label) -> Option<usize> {
        self.index.get(atoms).copied()
    }

    /// Sub-basis of the states satisfying `keep`, order preserved.
    pub fn restrict(&self, keep: impl Fn(&CollectiveState<T>) -> bool) -> Self {
        let states: Vec<_> = self.states.iter().filter(|s| keep(s)).cloned().collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.atoms, i)).collect::<HashMap<_, _>>();
        let r = AtomState::Rydberg(self.reference_level);
        let reference = index.get(&[r; ATOMS]).copied();
        Self { states, index, reference, n: self.n, reference_level: self.reference_level, window_ghz: self.window_ghz }
    }

    /// Plain-text table: index, label, 2M, E0 (GHz).
    pub fn dump(&self) -> String {
        let mut s = String::from("# index\tlabel\t2M\tE0_GHz\n");
        for (i, st) in self.states.iter().enumerate() {
            s.push_str(&format!("{i}\t{}\t{}\t{:.9}\n", st.label(), st.twice_m, st.e0_ghz));
        }
        s
    }
}

/// Fully Rydberg `M = 3/2` states within `window_ghz` of `|nP3/2(1/2)>^3`,
/// sorted by energy with ties broken on the label.
pub fn build_interaction_basis<T: Scalar>(n: u32, window_ghz: T, constants: &AtomicConstants<T>) -> Result<BasisSet<T>> {
    if n < 30 {
        return Err(Error::InvalidBasis(format!("n = {n} below 30")));
    }
    if !(window_ghz > T::zero()) {
        return Err(Error::InvalidBasis(format!("window {window_ghz} GHz must be positive")));
    }
    let states = rydberg_sector(n, ATOMS, window_ghz, constants)?
        .into_iter()
        .map(|(levels, e)| CollectiveState {
            atoms: [0, 1, 2].map(|i| AtomState::Rydberg(levels[i])),
            twice_m: ATOMS as i32,
            e0_ghz: e,
        })
        .collect();
    let basis = BasisSet::from_states(states, n, window_ghz);
    if basis.reference.is_none() {
        return Err(Error::EmptyBasis { window_ghz: window_ghz.as_f64() });
    }
    Ok(basis)
}

/// Adds every state where some atoms are logical (`|0>` or `|1>`) and the
/// rest occupy a Rydberg configuration reachable from `|1>` (sector with
/// `M = k/2` inside the same window), including the 8 logical states.
pub fn extend_with_logical<T: Scalar>(basis: &BasisSet<T>, constants: &AtomicConstants<T>) -> Result<BasisSet<T>> {
    let mut states = basis.states.clone();
    let sectors: Vec<Vec<(Vec<RydbergLevel>, T)>> = (0..ATOMS)
        .map(|k| rydberg_sector(basis.n, k, basis.window_ghz, constants))
        .collect::<Result<_>>()?;
    for mask in 0u8..(1 << ATOMS) - 1 {
        // `mask` marks Rydberg positions; the full mask is the interaction basis.
        let positions: Vec<usize> = (0..ATOMS).filter(|i| mask >> i & 1 == 1).collect();
        let ground: Vec<usize> = (0..ATOMS).filter(|i| mask >> i & 1 == 0).collect();
        for (levels, e) in &sectors[positions.len()] {
            for bits in 0u8..(1 << ground.len()) {
                let mut atoms = [AtomState::Ground(0); ATOMS];
                for (slot, &p) in positions.iter().enumerate() {
                    atoms[p] = AtomState::Rydberg(levels[slot]);
                }
                for (slot, &g) in ground.iter().enumerate() {
                    atoms[g] = AtomState::Ground(bits >> slot & 1);
                }
                states.push(CollectiveState { atoms, twice_m: positions.len() as i32, e0_ghz: *e });
            }
        }
    }
    Ok(BasisSet::from_states(states, basis.n, basis.window_ghz))
}

/// Window used by default, GHz.
pub fn default_window<T: Scalar>() -> T {
    c(2.0)
}
