mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution};
use rayon::prelude::*;

use common::{all_vectors, brute_force_g_min, chain_of, psk_frame, random_matrix, random_pattern};
use tcgs::chase::{bound, greedy_g_min, leftmost_child, minimal_decompose, next_sibling, FlippingPattern, TreeNode};
use tcgs::decoder::{mld_oracle, tcgs_decode, tcgs_decode_traced, DecoderConfig, Mode, TraceEvent};
use tcgs::eval::{lcc_decode, LccConfig};
use tcgs::rscode::hamming_weight;
use tcgs::sim::{chi2_threshold, run_sweep, wilson_interval, Algorithm, SweepConfig};
use tcgs::Code;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_matches_brute_force(seed in any::<u64>(), q in prop::sample::select(vec![2usize, 3, 4, 5, 7]), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t_min = rng.random_range(1..=(n / 2).max(1));
        let pi = random_matrix(q, n, &mut rng);
        let (_, _, chain) = chain_of(&pi);
        let f = random_pattern(&chain, &mut rng);
        let g = greedy_g_min(&f, &chain, t_min);
        let b = brute_force_g_min(&f, &chain, t_min);
        prop_assert!(g == b || (g - b).abs() < 1e-12, "greedy {} brute {}", g, b);
    }

    #[test]
    fn bound_grows_towards_children_and_right_siblings(seed in any::<u64>(), n in 3usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = random_matrix(5, n, &mut rng);
        let (_, _, chain) = chain_of(&pi);
        let t_min = rng.random_range(1..=n / 2);
        let f = random_pattern(&chain, &mut rng);
        let bf = bound(&f, &chain, t_min);
        if let Some(c) = leftmost_child(&f, &chain) {
            prop_assert!(bound(&c, &chain, t_min) >= bf - 1e-12);
        }
        if !f.is_root() {
            if let Some(s) = next_sibling(&f, &chain).unwrap() {
                prop_assert!(bound(&s, &chain, t_min) >= bf - 1e-12);
            }
        }
    }

    #[test]
    fn bound_is_below_every_generated_error(seed in any::<u64>()) {
        // any e whose minimal pattern is f weighs at least B(f)
        let code = Code::from_params(5, 1, 4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = random_matrix(5, 4, &mut rng);
        let (_, _, chain) = chain_of(&pi);
        for e in all_vectors(5, 4).filter(|e| hamming_weight(e) >= code.t_min()) {
            let (f, _) = minimal_decompose(&e, &chain, code.t_min()).unwrap();
            let le = FlippingPattern::from_vector(&chain, &e).soft_weight();
            prop_assert!(le >= bound(&f, &chain, code.t_min()) - 1e-12);
        }
    }
}

fn decode_invariants(code: &Code, sigma: f64, max_trials: usize, frames: u64, seed: u64) {
    let n = code.n();
    (0..frames).into_par_iter().for_each(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let (_, pi) = psk_frame(code, sigma, &mut rng);
        let mut ev = Vec::new();
        let r = tcgs_decode_traced(&pi, code, &DecoderConfig::budget(max_trials), None, &mut ev).unwrap();
        assert!(r.trials >= 1 && r.trials <= max_trials);
        assert_eq!(r.certified, r.exit.is_certified());
        // one backward removal and one forward addition per trial after the first
        assert_eq!(r.backward_removes, r.trials - 1);
        assert_eq!(r.forward_adds, n + r.trials - 1);

        let TraceEvent::AtomChain { .. } = &ev[1] else { panic!("missing chain") };
        let chain = chain_of(&pi).2;
        let mut prev: Option<TreeNode> = None;
        let mut prev_best = f64::INFINITY;
        for e in &ev {
            if let TraceEvent::Pop { positions, bound, best, .. } = e {
                let node = TreeNode::new(FlippingPattern::from_positions(&chain, positions), &chain, code.t_min());
                assert_eq!(node.bound, *bound);
                if let Some(p) = &prev {
                    assert!(p < &node, "pop order not monotone");
                }
                assert!(*best <= prev_best);
                prev_best = *best;
                prev = Some(node);
            }
        }
        assert!(r.best_weight <= prev_best);
    });
}

#[test]
fn decoder_invariants_prime_fields() {
    decode_invariants(&Code::from_params(5, 1, 4, 2).unwrap(), 0.45, 500, 300, 1);
    decode_invariants(&Code::from_params(7, 1, 6, 2).unwrap(), 0.35, 64, 300, 2);
    decode_invariants(&Code::from_params(11, 1, 10, 4).unwrap(), 0.25, 200, 200, 3);
}

#[test]
fn certified_exits_match_ml_on_c5() {
    let code = Code::from_params(5, 1, 4, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut certified = 0;
    for _ in 0..200 {
        let pi = random_matrix(5, 4, &mut rng);
        let r = tcgs_decode(&pi, &code, &DecoderConfig::budget(500), None).unwrap();
        if r.certified {
            certified += 1;
            assert_eq!(r.codeword, Some(mld_oracle(&pi, &code).unwrap().1));
        }
    }
    assert!(certified > 100);
}

#[test]
fn budget_exhaustion_returns_best_seen() {
    let code = Code::from_params(7, 1, 6, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let pi = random_matrix(7, 6, &mut rng);
        let mut ev = Vec::new();
        let r = tcgs_decode_traced(&pi, &code, &DecoderConfig::budget(8), None, &mut ev).unwrap();
        let lightest = ev
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Candidate { lambda, .. } => Some(*lambda),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min);
        let init = ev
            .iter()
            .find_map(|e| match e {
                TraceEvent::Init { lambda } => Some(*lambda),
                _ => None,
            })
            .unwrap();
        // e* starts at z, so only candidates lighter than z replace it
        if lightest < init {
            assert!(r.best_weight <= lightest);
            assert!(r.message.is_some());
        }
    }
}

#[test]
fn genie_and_threshold_never_use_more_trials() {
    let code = Code::from_params(2, 4, 15, 11).unwrap();
    let sigma2 = tcgs::channel::sigma2_from_snr(4.0, code.rate());
    for i in 0..400u64 {
        let mut rng = tcgs::sim::frame_rng(3, i);
        let c = code.encode(&code.random_message(&mut rng)).unwrap();
        let s = tcgs::channel::modulate(&c, code.field()).unwrap();
        let mut frame = tcgs::channel::transmit(&s, sigma2.sqrt(), &mut rng);
        frame.sigma2 = sigma2;
        let pi = tcgs::channel::likelihoods(&frame, &code).unwrap();
        let budget = tcgs_decode(&pi, &code, &DecoderConfig::budget(64), None).unwrap();
        let genie = tcgs_decode(&pi, &code, &DecoderConfig::genie(64), Some(&c)).unwrap();
        assert!(genie.trials <= budget.trials);
        let thr = DecoderConfig::threshold(64, 1e-2, sigma2, 60).unwrap();
        assert!(matches!(thr.mode, Mode::Threshold { .. }));
        let t = tcgs_decode(&pi, &code, &thr, None).unwrap();
        assert!(t.trials <= budget.trials);
        // HDD budget of the LCC baseline with eta = 4 is 16 calls
        assert!(lcc_decode(&pi, &code, &LccConfig { eta: 4 }).unwrap().trials <= 16);
    }
}

#[test]
fn chi2_tail_matches_sampling() {
    // dof = 60, ε = 10⁻³: empirical tail over 10⁷ χ² draws within 3 SE
    let (eps, dof) = (1e-3, 60);
    let t = chi2_threshold(eps, dof).unwrap();
    let chunks = 100u64;
    let per = 100_000u64;
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(4242 + c);
            let d = ChiSquared::new(dof as f64).unwrap();
            (0..per).filter(|_| d.sample(&mut rng) >= t).count() as u64
        })
        .sum();
    let n = (chunks * per) as f64;
    let p = hits as f64 / n;
    let target = eps / 2.0;
    let se = (target * (1.0 - target) / n).sqrt();
    assert!((p - target).abs() <= 3.0 * se, "tail {p} target {target}");
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for k in i..=j {
                r[idx[k]] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    };
    let (rx, ry) = (rank(x), rank(y));
    let m = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (m(&rx), m(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}

#[test]
fn sweep_rows_are_self_consistent_and_trials_fall_with_snr() {
    let snrs = vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
    let mut cfg = SweepConfig::new((2, 4, 15, 11), snrs.clone(), vec![Algorithm::Tcgs, Algorithm::Lcc]);
    cfg.max_frames = 3000;
    cfg.min_errors = 200;
    cfg.workers = 4;
    let rows = run_sweep(&cfg).unwrap();
    for r in &rows {
        let (lo, hi) = wilson_interval(r.frame_errors, r.frames, 2.576);
        assert!(lo <= r.fer && r.fer <= hi, "{r:?}");
        assert!((r.fer - r.frame_errors as f64 / r.frames as f64).abs() < 1e-15);
        assert!(r.e_lower_rate <= r.fer && r.fer <= r.e_upper_rate, "{r:?}");
        assert!(r.tally.is_consistent());
    }
    for alg in [Algorithm::Tcgs, Algorithm::Lcc] {
        let trials: Vec<f64> = rows.iter().filter(|r| r.algorithm == alg).map(|r| -r.avg_trials).collect();
        let rho = spearman(&snrs, &trials);
        assert!(rho > 0.9, "{alg}: ρ = {rho}");
    }
}
