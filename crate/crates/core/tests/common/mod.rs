//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_distr::StandardNormal;
use tcgs::channel::{hard_decision, soft_weights, LikelihoodMatrix};
use tcgs::chase::{AtomChain, FlippingPattern};
use tcgs::decoder::field_for_order;
use tcgs::{Code, Fe, Field};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// A random codeword sent over q-PSK with complex AWGN of variance σ² per
/// dimension. Works for any field, which BPSK does not.
pub fn psk_frame<R: Rng>(code: &Code, sigma: f64, rng: &mut R) -> (Vec<Fe>, LikelihoodMatrix) {
    let c = code.encode(&code.random_message(rng)).unwrap();
    let q = code.field().order();
    let point = |i: usize| {
        let a = std::f64::consts::TAU * i as f64 / q as f64;
        (a.cos(), a.sin())
    };
    let s2 = sigma * sigma;
    let mut rows = vec![vec![0.0; code.n()]; q];
    for (j, s) in c.iter().enumerate() {
        let (px, py) = point(s.value());
        let nx: f64 = rng.sample(StandardNormal);
        let ny: f64 = rng.sample(StandardNormal);
        let (yx, yy) = (px + sigma * nx, py + sigma * ny);
        for (i, row) in rows.iter_mut().enumerate() {
            let (ix, iy) = point(i);
            let d2 = (yx - ix).powi(2) + (yy - iy).powi(2);
            row[j] = -d2 / (2.0 * s2) - (std::f64::consts::TAU * s2).ln();
        }
    }
    (c, LikelihoodMatrix::from_rows(rows).unwrap())
}

/// Uniform random log-likelihoods in [−3, 0).
pub fn random_matrix<R: Rng>(q: usize, n: usize, rng: &mut R) -> LikelihoodMatrix {
    let rows = (0..q)
        .map(|_| (0..n).map(|_| -3.0 * rng.random::<f64>()).collect())
        .collect();
    LikelihoodMatrix::from_rows(rows).unwrap()
}

pub fn chain_of(pi: &LikelihoodMatrix) -> (Field, Vec<Fe>, AtomChain) {
    let gf = field_for_order(pi.q()).unwrap();
    let z = hard_decision(pi);
    let sw = soft_weights(pi, &z, &gf).unwrap();
    let chain = AtomChain::build(&sw);
    (gf, z, chain)
}

/// A uniformly random flipping pattern: each coordinate carries a random
/// atom with probability 1/2.
pub fn random_pattern<R: Rng>(chain: &AtomChain, rng: &mut R) -> FlippingPattern {
    let mut positions = Vec::new();
    for j in 0..chain.n() {
        if rng.random_bool(0.5) {
            positions.push(chain.position(j, Fe(rng.random_range(1..chain.q()) as u16)));
        }
    }
    FlippingPattern::from_positions(chain, &positions)
}

/// min λ(g) over 𝒢(f) by enumerating every set of `t_min` atoms ranked after
/// R_u(f) at distinct coordinates outside S(f).
pub fn brute_force_g_min(f: &FlippingPattern, chain: &AtomChain, t_min: usize) -> f64 {
    let mut used = vec![false; chain.n()];
    for a in f.atoms(chain) {
        used[a.coord] = true;
    }
    let start = f.upper_rank().map_or(0, |r| r as usize + 1);
    fn go(chain: &AtomChain, from: usize, left: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        if left == 0 {
            *best = best.min(acc);
            return;
        }
        for p in from..chain.len() {
            let a = chain.atom(p as u32);
            if used[a.coord] {
                continue;
            }
            used[a.coord] = true;
            go(chain, p + 1, left - 1, used, acc + a.weight, best);
            used[a.coord] = false;
        }
    }
    let mut best = f64::INFINITY;
    go(chain, start, t_min, &mut used, 0.0, &mut best);
    best
}

/// Every vector of GF(q)^n, in lexicographic order.
pub fn all_vectors(q: usize, n: usize) -> impl Iterator<Item = Vec<Fe>> {
    (0..q.pow(n as u32)).map(move |mut idx| {
        let mut v = vec![Fe::ZERO; n];
        for s in v.iter_mut() {
            *s = Fe((idx % q) as u16);
            idx /= q;
        }
        v
    })
}
