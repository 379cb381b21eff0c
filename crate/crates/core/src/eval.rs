//! LCC baseline decoder and ML-bound bookkeeping.

use crate::channel::LikelihoodMatrix;
use crate::decoder::{preprocess, Best, DecodeResult, ExitReason, Verdict};
use crate::galois::Fe;
use crate::interp::GroebnerBasis;
use crate::rscode::Code;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LccConfig {
    /// Number of least reliable positions; 2^eta test vectors.
    pub eta: usize,
}

/// Per coordinate: (reliability, second most likely symbol). Reliability is
/// the gap between the two largest entries of the column.
pub fn reliabilities(pi: &LikelihoodMatrix, z: &[Fe]) -> Vec<(f64, Fe)> {
    z.iter()
        .enumerate()
        .map(|(j, zj)| {
            let mut second: Option<usize> = None;
            for i in 0..pi.q() {
                if i == zj.value() {
                    continue;
                }
                if second.is_none_or(|s| pi.get(i, j) > pi.get(s, j)) {
                    second = Some(i);
                }
            }
            let s = second.expect("q ≥ 2");
            (pi.get(zj.value(), j) - pi.get(s, j), Fe(s as u16))
        })
        .collect()
}

/// The `eta` least reliable coordinates, least reliable first; equal
/// reliabilities go to the smaller coordinate.
pub fn least_reliable(rel: &[(f64, Fe)], eta: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rel.len()).collect();
    idx.sort_by(|&a, &b| rel[a].0.total_cmp(&rel[b].0).then(a.cmp(&b)));
    idx.truncate(eta);
    idx
}

/// Chase decoding over the 2^eta test vectors that keep z or the second
/// best symbol at each LRP. Test vectors are visited in Gray-code order, so
/// every trial after the first swaps one interpolation point.
pub fn lcc_decode(pi: &LikelihoodMatrix, code: &Code, cfg: &LccConfig) -> Result<DecodeResult> {
    if cfg.eta > code.n() || cfg.eta >= usize::BITS as usize {
        return Err(Error::Config(format!("eta = {} out of range for n = {}", cfg.eta, code.n())));
    }
    let gf = code.field();
    let pre = preprocess(pi, code)?;
    let rel = reliabilities(pi, &pre.z);
    let lrp = least_reliable(&rel, cfg.eta);
    let points = code.points();

    let mut best = Best::new(code, &pre);
    let mut basis = GroebnerBasis::interpolate(gf, code.k(), points.iter().copied().zip(pre.z.iter().copied()))?;
    let forward_adds_init = code.n();
    let mut swaps = 0;
    let mut flipped = vec![false; cfg.eta];
    let total = 1usize << cfg.eta;

    let mut trial = 0;
    loop {
        let trials = trial + 1;
        match best.consider(trial, basis.factorize(gf), None, &mut None) {
            Verdict::Kaneko => {
                return Ok(best.finish(ExitReason::CertifiedKaneko, trials, forward_adds_init + swaps, swaps))
            }
            Verdict::Genie | Verdict::Continue => {}
        }
        trial += 1;
        if trial == total {
            return Ok(best.finish(ExitReason::BudgetExhausted, trials, forward_adds_init + swaps, swaps));
        }
        let bit = trial.trailing_zeros() as usize;
        let j = lrp[bit];
        let (zj, sj) = (pre.z[j], rel[j].1);
        let (old, new) = if flipped[bit] { (sj, zj) } else { (zj, sj) };
        flipped[bit] = !flipped[bit];
        basis = basis.swap_point(gf, (points[j], old), (points[j], new))?;
        swaps += 1;
    }
}

/// Simulation-based bound indicators (E_u, E_ℓ) for one frame.
///
/// | case | output vs transmitted | (E_u, E_ℓ) |
/// |---|---|---|
/// | 1 | equal, certified | (0, 0) |
/// | 2 | equal, not certified | (1, 0) |
/// | 3 | different, output strictly more likely | (1, 1) |
/// | 4 | different, output not more likely | (1, 0) |
///
/// A result without any codeword counts as case 4.
pub fn classify_ml(transmitted: &[Fe], result: &DecodeResult, pi: &LikelihoodMatrix) -> (bool, bool) {
    match result.codeword.as_deref() {
        Some(c) if c == transmitted => (!result.certified, false),
        Some(c) => (true, pi.metric(c) > pi.metric(transmitted)),
        None => (true, false),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundTally {
    pub frames: u64,
    pub e_upper: u64,
    pub e_lower: u64,
    /// Frames whose output differs from the transmitted codeword.
    pub observed: u64,
}

impl BoundTally {
    pub fn record(&mut self, e_upper: bool, e_lower: bool, error: bool) {
        self.frames += 1;
        self.e_upper += e_upper as u64;
        self.e_lower += e_lower as u64;
        self.observed += error as u64;
    }

    pub fn merge(&mut self, other: &BoundTally) {
        self.frames += other.frames;
        self.e_upper += other.e_upper;
        self.e_lower += other.e_lower;
        self.observed += other.observed;
    }

    pub fn is_consistent(&self) -> bool {
        self.e_lower <= self.observed && self.observed <= self.e_upper && self.e_upper <= self.frames
    }

    pub fn upper_rate(&self) -> f64 {
        self.e_upper as f64 / self.frames.max(1) as f64
    }

    pub fn lower_rate(&self) -> f64 {
        self.e_lower as f64 / self.frames.max(1) as f64
    }
}
