//! Atoms, the atom chain, flipping patterns and the bounds that order the
//! flipping-pattern tree.
//!
//! An atom `(j, δ)` hypothesizes error value δ ≠ 0 at coordinate j and costs
//! λ_j(δ). The atom chain sorts all n(q−1) atoms by (weight, coord, δ). A
//! flipping pattern is a rank-ascending sub-chain with pairwise distinct
//! coordinates; the tree hangs `f + (j, δ)` below `f` for every atom ranked
//! after f's last atom at a free coordinate.
//!
//! Ranks are 0-based chain positions internally; traces print them as atoms.

use std::cmp::Ordering;
use std::fmt;

use crate::channel::SoftWeights;
use crate::galois::Fe;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub coord: usize,
    pub delta: Fe,
    pub weight: f64,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.coord, self.delta)
    }
}

/// All atoms in ascending total order.
#[derive(Clone, Debug)]
pub struct AtomChain {
    atoms: Vec<Atom>,
    // rank_of[coord * (q-1) + delta - 1]
    rank_of: Vec<u32>,
    n: usize,
    q: usize,
}

impl AtomChain {
    pub fn build(sw: &SoftWeights) -> AtomChain {
        let (q, n) = (sw.q(), sw.n());
        let mut atoms: Vec<Atom> = (0..n)
            .flat_map(|coord| {
                (1..q).map(move |d| {
                    let delta = Fe(d as u16);
                    Atom {
                        coord,
                        delta,
                        weight: sw.get(delta, coord),
                    }
                })
            })
            .collect();
        atoms.sort_by(|a, b| {
            a.weight
                .total_cmp(&b.weight)
                .then(a.coord.cmp(&b.coord))
                .then(a.delta.cmp(&b.delta))
        });
        let mut rank_of = vec![0u32; n * (q - 1)];
        for (pos, a) in atoms.iter().enumerate() {
            rank_of[a.coord * (q - 1) + a.delta.value() - 1] = pos as u32;
        }
        AtomChain { atoms, rank_of, n, q }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn atom(&self, pos: u32) -> &Atom {
        &self.atoms[pos as usize]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// 0-based chain position of `(coord, delta)`, δ ≠ 0.
    #[inline]
    pub fn position(&self, coord: usize, delta: Fe) -> u32 {
        debug_assert!(!delta.is_zero());
        self.rank_of[coord * (self.q - 1) + delta.value() - 1]
    }

    /// Chain rendered as `(3,2),(1,3),...`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.atoms.iter().map(Atom::to_string).collect();
        parts.join(",")
    }
}

/// A set of atoms with pairwise distinct coordinates, kept in rank order.
#[derive(Clone, Debug, PartialEq)]
pub struct FlippingPattern {
    ranks: Vec<u32>,
    weight: f64,
}

impl Default for FlippingPattern {
    fn default() -> Self {
        Self::root()
    }
}

impl FlippingPattern {
    /// The all-zero pattern.
    pub fn root() -> FlippingPattern {
        FlippingPattern {
            ranks: Vec::new(),
            weight: 0.0,
        }
    }

    /// Pattern from chain positions; panics on duplicate coordinates.
    pub fn from_positions(chain: &AtomChain, positions: &[u32]) -> FlippingPattern {
        let mut ranks = positions.to_vec();
        ranks.sort_unstable();
        ranks.dedup();
        let mut seen = vec![false; chain.n()];
        let mut weight = 0.0;
        for &r in &ranks {
            let a = chain.atom(r);
            assert!(!std::mem::replace(&mut seen[a.coord], true), "coordinate {} repeated", a.coord);
            weight += a.weight;
        }
        FlippingPattern { ranks, weight }
    }

    /// Pattern from atoms given as (coord, delta) pairs.
    pub fn from_atoms(chain: &AtomChain, atoms: &[(usize, u16)]) -> FlippingPattern {
        let pos: Vec<u32> = atoms.iter().map(|&(j, d)| chain.position(j, Fe(d))).collect();
        Self::from_positions(chain, &pos)
    }

    /// Nonzero entries of `v` as a pattern.
    pub fn from_vector(chain: &AtomChain, v: &[Fe]) -> FlippingPattern {
        let pos: Vec<u32> = v
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(j, &d)| chain.position(j, d))
            .collect();
        Self::from_positions(chain, &pos)
    }

    pub fn to_vector(&self, chain: &AtomChain) -> Vec<Fe> {
        let mut v = vec![Fe::ZERO; chain.n()];
        for a in self.atoms(chain) {
            v[a.coord] = a.delta;
        }
        v
    }

    #[inline]
    pub fn is_root(&self) -> bool {
        self.ranks.is_empty()
    }

    /// W_H(f).
    #[inline]
    pub fn hamming_weight(&self) -> usize {
        self.ranks.len()
    }

    /// λ(f).
    #[inline]
    pub fn soft_weight(&self) -> f64 {
        self.weight
    }

    pub fn positions(&self) -> &[u32] {
        &self.ranks
    }

    /// R_ℓ(f) as a chain position; `None` (+∞) for the root.
    pub fn lower_rank(&self) -> Option<u32> {
        self.ranks.first().copied()
    }

    /// R_u(f) as a chain position; `None` (−∞) for the root.
    pub fn upper_rank(&self) -> Option<u32> {
        self.ranks.last().copied()
    }

    pub fn atoms<'a>(&'a self, chain: &'a AtomChain) -> impl Iterator<Item = &'a Atom> + 'a {
        self.ranks.iter().map(move |&r| chain.atom(r))
    }

    /// The right-most (highest ranked) atom.
    pub fn last_atom<'a>(&self, chain: &'a AtomChain) -> Option<&'a Atom> {
        self.upper_rank().map(|r| chain.atom(r))
    }

    pub fn parent(&self, chain: &AtomChain) -> Option<FlippingPattern> {
        let (_, rest) = self.ranks.split_last()?;
        // re-summed in rank order so λ is bit-identical to a fresh pattern
        Some(FlippingPattern::from_positions(chain, rest))
    }

    fn coord_mask(&self, chain: &AtomChain) -> Vec<bool> {
        let mut used = vec![false; chain.n()];
        for a in self.atoms(chain) {
            used[a.coord] = true;
        }
        used
    }

    fn extended(&self, chain: &AtomChain, pos: u32) -> FlippingPattern {
        let mut ranks = self.ranks.clone();
        ranks.push(pos);
        FlippingPattern {
            ranks,
            weight: self.weight + chain.atom(pos).weight,
        }
    }

    /// Renders as `0` or `(3,3)+(2,2)`.
    pub fn describe(&self, chain: &AtomChain) -> String {
        if self.is_root() {
            return "0".into();
        }
        let parts: Vec<String> = self.atoms(chain).map(Atom::to_string).collect();
        parts.join("+")
    }
}

fn next_free(chain: &AtomChain, start: usize, used: &[bool]) -> Option<u32> {
    (start..chain.len())
        .find(|&p| !used[chain.atoms[p].coord])
        .map(|p| p as u32)
}

/// min over 𝒢(f) of λ(g): greedily collects the first t_min atoms after
/// R_u(f) at coordinates not yet used. +∞ when fewer are available.
pub fn greedy_g_min(f: &FlippingPattern, chain: &AtomChain, t_min: usize) -> f64 {
    if t_min == 0 {
        return 0.0;
    }
    let mut used = f.coord_mask(chain);
    let start = f.upper_rank().map_or(0, |r| r as usize + 1);
    let mut sum = 0.0;
    let mut count = 0;
    for a in &chain.atoms[start..] {
        if !used[a.coord] {
            used[a.coord] = true;
            sum += a.weight;
            count += 1;
            if count == t_min {
                return sum;
            }
        }
    }
    f64::INFINITY
}

/// B(f) = λ(f) + min_{g ∈ 𝒢(f)} λ(g), +∞ when 𝒢(f) is empty.
pub fn bound(f: &FlippingPattern, chain: &AtomChain, t_min: usize) -> f64 {
    f.soft_weight() + greedy_g_min(f, chain, t_min)
}

/// f + (j, δ) for the lowest-ranked atom after R_u(f) at a free coordinate.
pub fn leftmost_child(f: &FlippingPattern, chain: &AtomChain) -> Option<FlippingPattern> {
    let used = f.coord_mask(chain);
    let start = f.upper_rank().map_or(0, |r| r as usize + 1);
    next_free(chain, start, &used).map(|p| f.extended(chain, p))
}

/// The adjacent right sibling: f's last atom replaced by the next atom in
/// rank order whose coordinate is free in the parent.
pub fn next_sibling(f: &FlippingPattern, chain: &AtomChain) -> Result<Option<FlippingPattern>> {
    let last = f.upper_rank().ok_or(Error::RootHasNoSibling)?;
    let parent = f.parent(chain).expect("nonzero pattern");
    let used = parent.coord_mask(chain);
    Ok(next_free(chain, last as usize + 1, &used).map(|p| parent.extended(chain, p)))
}

/// B₀(e): the lightest d_min − W_H(e) atoms at distinct coordinates outside
/// S(e), scanning the chain from the start. Zero when W_H(e) ≥ d_min.
pub fn kaneko_bound(e: &[Fe], chain: &AtomChain, d_min: usize) -> f64 {
    let weight = crate::rscode::hamming_weight(e);
    let Some(need) = d_min.checked_sub(weight).filter(|&k| k > 0) else {
        return 0.0;
    };
    let mut used: Vec<bool> = e.iter().map(|d| !d.is_zero()).collect();
    let mut sum = 0.0;
    let mut count = 0;
    for a in &chain.atoms {
        if !used[a.coord] {
            used[a.coord] = true;
            sum += a.weight;
            count += 1;
            if count == need {
                return sum;
            }
        }
    }
    f64::INFINITY
}

/// Splits e = f + g with |S(g)| = t_min and R_u(f) < R_ℓ(g): g takes the
/// t_min highest-ranked atoms of e, f the rest.
pub fn minimal_decompose(
    e: &[Fe],
    chain: &AtomChain,
    t_min: usize,
) -> Result<(FlippingPattern, FlippingPattern)> {
    let whole = FlippingPattern::from_vector(chain, e);
    let weight = whole.hamming_weight();
    if weight < t_min {
        return Err(Error::WeightBelowTmin { weight, t_min });
    }
    let (f, g) = whole.ranks.split_at(weight - t_min);
    Ok((
        FlippingPattern::from_positions(chain, f),
        FlippingPattern::from_positions(chain, g),
    ))
}

/// A tree vertex with its bound.
#[derive(Clone, Debug)]
pub struct TreeNode {
    pub pattern: FlippingPattern,
    pub bound: f64,
}

impl TreeNode {
    pub fn new(pattern: FlippingPattern, chain: &AtomChain, t_min: usize) -> TreeNode {
        let bound = bound(&pattern, chain, t_min);
        TreeNode { pattern, bound }
    }
}

impl PartialEq for TreeNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TreeNode {}

impl PartialOrd for TreeNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// (B, W_H, left position) with left position taken as the lexicographic
/// order of rank sequences.
impl Ord for TreeNode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.pattern.hamming_weight().cmp(&other.pattern.hamming_weight()))
            .then_with(|| self.pattern.ranks.cmp(&other.pattern.ranks))
    }
}

pub fn pattern_order_less(a: &TreeNode, b: &TreeNode) -> bool {
    a < b
}
