//! Monte-Carlo FER sweeps over BPSK/AWGN and the χ² sphere threshold.
//!
//! Every frame draws its message and noise from a ChaCha8 stream keyed by
//! `(seed, frame_index)`. Frames are decoded in parallel batches and folded
//! in index order, so the stopping point and all counts are independent of
//! the worker count. The same frame index carries the same message and unit
//! noise at every SNR and for every algorithm.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::gamma_ur;

use crate::channel::{likelihoods, modulate, sigma2_from_snr, transmit};
use crate::decoder::{tcgs_decode, DecodeResult, DecoderConfig};
use crate::eval::{classify_ml, lcc_decode, BoundTally, LccConfig};
use crate::rscode::Code;
use crate::{Error, Result};

pub const CSV_HEADER: &str =
    "algorithm,snr_db,frames,frame_errors,fer,avg_trials,e_upper_rate,e_lower_rate,wall_seconds";

const BATCH: u64 = 256;

/// Upper (ε/2)-quantile of χ² with `dof` degrees of freedom. Multiply by σ²
/// to get the squared radius T.
pub fn chi2_threshold(epsilon: f64, dof: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if dof == 0 {
        return Err(Error::Config("dof must be at least 1".into()));
    }
    let target = epsilon / 2.0;
    let a = dof as f64 / 2.0;
    let tail = |t: f64| gamma_ur(a, t / 2.0);
    let (mut lo, mut hi) = (0.0f64, dof as f64 + 1.0);
    while tail(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Tcgs,
    Lcc,
    /// Plain GS(m=1) decoding of z.
    Hdd,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Tcgs => "tcgs",
            Algorithm::Lcc => "lcc",
            Algorithm::Hdd => "hdd",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tcgs" => Ok(Algorithm::Tcgs),
            "lcc" => Ok(Algorithm::Lcc),
            "hdd" => Ok(Algorithm::Hdd),
            other => Err(Error::Config(format!("unsupported algorithm {other:?}"))),
        }
    }
}

/// `a:b:step` (inclusive), a comma list, or a single value.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Config(format!("bad SNR value {t:?}")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let list = match parts[..] {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= 0.0 || b < a {
                return Err(Error::Config(format!("bad SNR range {s:?}")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| a + i as f64 * step).collect()
        }
        [single] => single.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Config(format!("bad SNR range {s:?}"))),
    };
    if list.is_empty() {
        return Err(Error::Config("empty SNR list".into()));
    }
    Ok(list)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// (p, m, n, k).
    pub code: (u32, u32, usize, usize),
    pub snrs: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    /// TCGS budget L.
    pub max_trials: usize,
    /// LCC least reliable positions.
    pub eta: usize,
    /// TCGS threshold mode target ε.
    pub threshold_eps: Option<f64>,
    /// TCGS genie stop.
    pub genie: bool,
    pub seed: u64,
    pub max_frames: u64,
    pub min_errors: u64,
    pub workers: usize,
    /// Report measured wall time; otherwise the column is 0 so reruns are
    /// byte-identical.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(code: (u32, u32, usize, usize), snrs: Vec<f64>, algorithms: Vec<Algorithm>) -> SweepConfig {
        SweepConfig {
            code,
            snrs,
            algorithms,
            max_trials: 16,
            eta: 4,
            threshold_eps: None,
            genie: false,
            seed: 1,
            max_frames: 10_000,
            min_errors: 100,
            workers: 1,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<Code> {
        if self.snrs.is_empty() {
            return Err(Error::Config("empty SNR list".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithm selected".into()));
        }
        if self.max_frames == 0 || self.min_errors == 0 || self.workers == 0 || self.max_trials == 0 {
            return Err(Error::Config(
                "frames, min errors, workers and L must all be at least 1".into(),
            ));
        }
        let (p, m, n, k) = self.code;
        let code = Code::from_params(p, m, n, k)?;
        if code.field().characteristic() != 2 {
            return Err(Error::NotBinary(code.field().order()));
        }
        if self.eta > n {
            return Err(Error::Config(format!("eta = {} exceeds n = {n}", self.eta)));
        }
        if let Some(eps) = self.threshold_eps {
            chi2_threshold(eps, n * m as usize)?;
        }
        Ok(code)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub snr_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub avg_trials: f64,
    pub e_upper_rate: f64,
    pub e_lower_rate: f64,
    pub wall_seconds: f64,
    pub tally: BoundTally,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{:.2},{},{},{:.6e},{:.4},{:.6e},{:.6e},{:.3}",
            self.algorithm,
            self.snr_db,
            self.frames,
            self.frame_errors,
            self.fer,
            self.avg_trials,
            self.e_upper_rate,
            self.e_lower_rate,
            self.wall_seconds
        )
    }

    /// Wilson interval of the FER at normal quantile z.
    pub fn fer_interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.frame_errors, self.frames, z)
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameOutcome {
    pub error: bool,
    pub trials: usize,
    pub e_upper: bool,
    pub e_lower: bool,
    pub certified: bool,
}

/// Decoder selection and parameters for one operating point.
#[derive(Clone, Debug)]
pub enum DecoderChoice {
    Tcgs(DecoderConfig),
    Lcc(LccConfig),
}

impl DecoderChoice {
    pub fn for_point(cfg: &SweepConfig, alg: Algorithm, code: &Code, sigma2: f64) -> Result<DecoderChoice> {
        Ok(match alg {
            Algorithm::Tcgs => {
                let mut d = match cfg.threshold_eps {
                    Some(eps) => {
                        let dof = code.n() * code.field().degree() as usize;
                        DecoderConfig::threshold(cfg.max_trials, eps, sigma2, dof)?
                    }
                    None if cfg.genie => DecoderConfig::genie(cfg.max_trials),
                    None => DecoderConfig::budget(cfg.max_trials),
                };
                d.sigma2 = sigma2;
                DecoderChoice::Tcgs(d)
            }
            Algorithm::Lcc => DecoderChoice::Lcc(LccConfig { eta: cfg.eta }),
            Algorithm::Hdd => DecoderChoice::Lcc(LccConfig { eta: 0 }),
        })
    }
}

/// The RNG stream of one frame.
pub fn frame_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn simulate_frame(code: &Code, dec: &DecoderChoice, sigma2: f64, seed: u64, index: u64) -> Result<FrameOutcome> {
    let mut rng = frame_rng(seed, index);
    let u = code.random_message(&mut rng);
    let c = code.encode(&u)?;
    let signal = modulate(&c, code.field())?;
    let mut frame = transmit(&signal, sigma2.sqrt(), &mut rng);
    frame.sigma2 = sigma2;
    let pi = likelihoods(&frame, code)?;
    let res: DecodeResult = match dec {
        DecoderChoice::Tcgs(d) => tcgs_decode(&pi, code, d, Some(&c))?,
        DecoderChoice::Lcc(l) => lcc_decode(&pi, code, l)?,
    };
    let (e_upper, e_lower) = classify_ml(&c, &res, &pi);
    Ok(FrameOutcome {
        error: res.codeword.as_deref() != Some(&c[..]),
        trials: res.trials,
        e_upper,
        e_lower,
        certified: res.certified,
    })
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let code = cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut rows = Vec::new();
    for &alg in &cfg.algorithms {
        for &snr in &cfg.snrs {
            let start = Instant::now();
            let sigma2 = sigma2_from_snr(snr, code.rate());
            let dec = DecoderChoice::for_point(cfg, alg, &code, sigma2)?;
            let mut tally = BoundTally::default();
            let mut trials = 0u64;
            let mut next = 0u64;
            'point: while next < cfg.max_frames {
                let end = (next + BATCH * cfg.workers as u64).min(cfg.max_frames);
                let batch: Vec<FrameOutcome> = pool.install(|| {
                    (next..end)
                        .into_par_iter()
                        .map(|i| simulate_frame(&code, &dec, sigma2, cfg.seed, i))
                        .collect::<Result<_>>()
                })?;
                for o in batch {
                    tally.record(o.e_upper, o.e_lower, o.error);
                    trials += o.trials as u64;
                    if tally.observed >= cfg.min_errors {
                        break 'point;
                    }
                }
                next = end;
            }
            let frames = tally.frames;
            rows.push(SweepRow {
                algorithm: alg,
                snr_db: snr,
                frames,
                frame_errors: tally.observed,
                fer: tally.observed as f64 / frames as f64,
                avg_trials: trials as f64 / frames as f64,
                e_upper_rate: tally.upper_rate(),
                e_lower_rate: tally.lower_rate(),
                wall_seconds: if cfg.timing {
                    start.elapsed().as_secs_f64()
                } else {
                    0.0
                },
                tally,
            });
        }
    }
    Ok(rows)
}
