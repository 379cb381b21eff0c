//! BPSK over AWGN, log-likelihood matrices, hard decisions and soft weights.
//!
//! Bit mapping is LSB-first with 0 ↦ +1 and 1 ↦ −1. A likelihood matrix can
//! also be read from a plain-text file, which is how non-binary fields (the
//! GF(5) worked example) are driven.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::galois::{Fe, Field};
use crate::rscode::Code;
use crate::{Error, Result};

/// Received samples, n·m real values, plus the per-dimension noise variance.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedFrame {
    pub samples: Vec<f64>,
    pub sigma2: f64,
}

/// q×n matrix with `get(i, j) = log Pr(r_j | α_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LikelihoodMatrix {
    q: usize,
    n: usize,
    data: Vec<f64>,
}

impl LikelihoodMatrix {
    /// Row-major: `rows[i][j]` for symbol i, coordinate j.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<LikelihoodMatrix> {
        let q = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if q < 2 || n == 0 {
            return Err(Error::Parse(format!("degenerate {q}x{n} matrix")));
        }
        let mut data = Vec::with_capacity(q * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite entry {bad}")));
        }
        Ok(LikelihoodMatrix { q, n, data })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<LikelihoodMatrix> {
        std::fs::read_to_string(path)?.parse()
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, symbol: usize, coord: usize) -> f64 {
        self.data[symbol * self.n + coord]
    }

    /// Σ_j log Pr(r_j | v_j).
    pub fn metric(&self, v: &[Fe]) -> f64 {
        v.iter().enumerate().map(|(j, s)| self.get(s.value(), j)).sum()
    }

    /// Writes the text format: `q n` then one row per symbol.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.q, self.n);
        for i in 0..self.q {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        s
    }
}

impl FromStr for LikelihoodMatrix {
    type Err = Error;

    /// Blank lines and lines starting with `#` are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [q, n] = dims[..] else {
            return Err(Error::Parse(format!("header must be `q n`, got {header:?}")));
        };
        let mut rows = Vec::with_capacity(q);
        for line in lines {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        if rows.len() != q {
            return Err(Error::Parse(format!("expected {q} rows, found {}", rows.len())));
        }
        let m = LikelihoodMatrix::from_rows(rows)?;
        if m.n != n {
            return Err(Error::Parse(format!("expected {n} columns, found {}", m.n)));
        }
        Ok(m)
    }
}

/// λ_j(δ) = π[z_j][j] − π[z_j − δ][j] for every nonzero δ, together with z.
#[derive(Clone, Debug)]
pub struct SoftWeights {
    q: usize,
    n: usize,
    z: Vec<Fe>,
    lambda: Vec<f64>,
}

impl SoftWeights {
    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hard_decision(&self) -> &[Fe] {
        &self.z
    }

    /// λ_j(δ); zero for δ = 0.
    #[inline]
    pub fn get(&self, delta: Fe, coord: usize) -> f64 {
        match delta.value() {
            0 => 0.0,
            d => self.lambda[(d - 1) * self.n + coord],
        }
    }

    /// λ(e) = Σ_{e_j ≠ 0} λ_j(e_j).
    pub fn weight_of(&self, e: &[Fe]) -> f64 {
        e.iter().enumerate().map(|(j, &d)| self.get(d, j)).sum()
    }
}

/// Expands each symbol to m antipodal samples, LSB first.
pub fn modulate(codeword: &[Fe], gf: &Field) -> Result<Vec<f64>> {
    if gf.characteristic() != 2 {
        return Err(Error::NotBinary(gf.order()));
    }
    let m = gf.degree();
    Ok(codeword
        .iter()
        .flat_map(|s| (0..m).map(move |b| if (s.0 >> b) & 1 == 0 { 1.0 } else { -1.0 }))
        .collect())
}

/// Adds i.i.d. N(0, σ²) noise to every dimension.
pub fn transmit<R: Rng + ?Sized>(signal: &[f64], sigma: f64, rng: &mut R) -> ReceivedFrame {
    let samples = signal
        .iter()
        .map(|&s| {
            let w: f64 = rng.sample(StandardNormal);
            s + sigma * w
        })
        .collect();
    ReceivedFrame {
        samples,
        sigma2: sigma * sigma,
    }
}

/// Per-dimension noise variance for an Eb/N0 (dB) operating point at code
/// rate `rate`, unit-energy BPSK.
pub fn sigma2_from_snr(snr_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))
}

fn gaussian_log_density(x: f64, mean: f64, sigma2: f64) -> f64 {
    let d = x - mean;
    -d * d / (2.0 * sigma2) - 0.5 * (2.0 * std::f64::consts::PI * sigma2).ln()
}

/// Inverts the per-symbol BPSK log-density back to the squared Euclidean
/// distance Σ_b (r_b − φ_b)² that produced it.
pub fn squared_distance_from_loglik(loglik: f64, sigma2: f64, bits: u32) -> f64 {
    -2.0 * sigma2 * (loglik + 0.5 * bits as f64 * (2.0 * std::f64::consts::PI * sigma2).ln())
}

/// π[i][j] = Σ_b log N(r_{j,b}; φ(bit_b(α_i)), σ²).
pub fn likelihoods(frame: &ReceivedFrame, code: &Code) -> Result<LikelihoodMatrix> {
    let gf = code.field();
    if gf.characteristic() != 2 {
        return Err(Error::NotBinary(gf.order()));
    }
    let m = gf.degree() as usize;
    let (q, n) = (gf.order(), code.n());
    if frame.samples.len() != n * m {
        return Err(Error::Length {
            expected: n * m,
            got: frame.samples.len(),
        });
    }
    if frame.sigma2 <= 0.0 || !frame.sigma2.is_finite() {
        return Err(Error::Config(format!("sigma2 must be positive, got {}", frame.sigma2)));
    }
    // ld[j*m + b] = (log-density for bit 0, log-density for bit 1)
    let ld: Vec<(f64, f64)> = frame
        .samples
        .iter()
        .map(|&r| {
            (
                gaussian_log_density(r, 1.0, frame.sigma2),
                gaussian_log_density(r, -1.0, frame.sigma2),
            )
        })
        .collect();
    let mut data = vec![0.0; q * n];
    for i in 0..q {
        for j in 0..n {
            data[i * n + j] = (0..m)
                .map(|b| {
                    let (l0, l1) = ld[j * m + b];
                    if (i >> b) & 1 == 0 {
                        l0
                    } else {
                        l1
                    }
                })
                .sum();
        }
    }
    Ok(LikelihoodMatrix { q, n, data })
}

/// Column-wise argmax; ties go to the smallest field value.
pub fn hard_decision(pi: &LikelihoodMatrix) -> Vec<Fe> {
    (0..pi.n)
        .map(|j| {
            let mut best = 0;
            for i in 1..pi.q {
                if pi.get(i, j) > pi.get(best, j) {
                    best = i;
                }
            }
            Fe(best as u16)
        })
        .collect()
}

pub fn soft_weights(pi: &LikelihoodMatrix, z: &[Fe], gf: &Field) -> Result<SoftWeights> {
    if pi.q != gf.order() {
        return Err(Error::Length {
            expected: gf.order(),
            got: pi.q,
        });
    }
    if z.len() != pi.n {
        return Err(Error::Length {
            expected: pi.n,
            got: z.len(),
        });
    }
    let (q, n) = (pi.q, pi.n);
    let mut lambda = vec![0.0; (q - 1) * n];
    for d in 1..q {
        let delta = Fe(d as u16);
        for (j, &zj) in z.iter().enumerate() {
            let alt = gf.sub(zj, delta);
            lambda[(d - 1) * n + j] = pi.get(zj.value(), j) - pi.get(alt.value(), j);
        }
    }
    Ok(SoftWeights {
        q,
        n,
        z: z.to_vec(),
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) const EXAMPLE_PI: &str = "5 4
-2.44 -1.41 -1.37 -1.45
-1.20 -1.87 -3.24 -2.18
-2.76 -1.50 -1.22 -1.56
-2.32 -1.63 -2.64 -1.48
-1.45 -2.35 -1.81 -1.77
";

    // Λ as printed for the worked example: row δ−1, column j.
    const EXAMPLE_LAMBDA: [[f64; 4]; 4] = [
        [1.24, 0.94, 2.02, 0.32],
        [0.25, 0.22, 0.15, 0.03],
        [1.12, 0.09, 0.59, 0.11],
        [1.56, 0.46, 1.42, 0.73],
    ];

    #[test]
    fn parses_example_matrix() {
        let pi: LikelihoodMatrix = EXAMPLE_PI.parse().unwrap();
        assert_eq!((pi.q(), pi.n()), (5, 4));
        assert_eq!(pi.get(1, 0), -1.20);
        let again: LikelihoodMatrix = pi.to_text().parse().unwrap();
        assert_eq!(again, pi);
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<LikelihoodMatrix>().is_err());
        assert!("2 2\n1 2\n".parse::<LikelihoodMatrix>().is_err());
        assert!("2 2\n1 2\n3\n".parse::<LikelihoodMatrix>().is_err());
        assert!("2 2\n1 x\n3 4\n".parse::<LikelihoodMatrix>().is_err());
        assert!("2\n1 2\n3 4\n".parse::<LikelihoodMatrix>().is_err());
        assert!("2 3\n1 2\n3 4\n".parse::<LikelihoodMatrix>().is_err());
    }

    #[test]
    fn example_hard_decision_and_weights() {
        let gf = Field::prime(5).unwrap();
        let pi: LikelihoodMatrix = EXAMPLE_PI.parse().unwrap();
        let z = hard_decision(&pi);
        assert_eq!(z, vec![Fe(1), Fe(0), Fe(2), Fe(0)]);
        let sw = soft_weights(&pi, &z, &gf).unwrap();
        assert!((sw.get(Fe(1), 0) - 1.24).abs() < 1e-9);
        assert!((sw.get(Fe(2), 3) - 0.03).abs() < 1e-9);
        assert_eq!(sw.get(Fe(0), 2), 0.0);
        for (d, row) in EXAMPLE_LAMBDA.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                let got = sw.get(Fe(d as u16 + 1), j);
                assert!((got - want).abs() <= 0.005, "λ_{j}({}) = {got}", d + 1);
                assert!(got >= 0.0);
            }
        }
    }

    #[test]
    fn hard_decision_ties_and_peaks() {
        let pi = LikelihoodMatrix::from_rows(vec![
            vec![0.0, -9.0],
            vec![-1.0, 50.0],
            vec![3.0, -9.0],
            vec![-1.0, -9.0],
            vec![3.0, -9.0],
        ])
        .unwrap();
        assert_eq!(hard_decision(&pi), vec![Fe(2), Fe(1)]);
    }

    #[test]
    fn column_shift_invariance() {
        let gf = Field::prime(5).unwrap();
        let pi: LikelihoodMatrix = EXAMPLE_PI.parse().unwrap();
        let mut rows: Vec<Vec<f64>> = (0..5).map(|i| (0..4).map(|j| pi.get(i, j)).collect()).collect();
        for row in rows.iter_mut() {
            row[2] += 17.5;
        }
        let shifted = LikelihoodMatrix::from_rows(rows).unwrap();
        let z = hard_decision(&shifted);
        assert_eq!(z, hard_decision(&pi));
        let a = soft_weights(&pi, &z, &gf).unwrap();
        let b = soft_weights(&shifted, &z, &gf).unwrap();
        for d in 1..5 {
            for j in 0..4 {
                assert!((a.get(Fe(d), j) - b.get(Fe(d), j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn modulation_mapping() {
        let gf4 = Field::new(2, 2).unwrap();
        assert_eq!(modulate(&[Fe(0)], &gf4).unwrap(), vec![1.0, 1.0]);
        assert_eq!(modulate(&[Fe(0b01)], &gf4).unwrap(), vec![-1.0, 1.0]);
        let code = Code::from_params(2, 4, 15, 11).unwrap();
        let c = code.encode(&crate::Poly::from_values(&[1, 2, 3])).unwrap();
        assert_eq!(modulate(&c, code.field()).unwrap().len(), 60);
        let gf5 = Field::prime(5).unwrap();
        assert!(matches!(modulate(&[Fe(1)], &gf5), Err(Error::NotBinary(5))));
    }

    #[test]
    fn transmit_is_seeded_and_noise_has_sigma2() {
        let signal = vec![1.0; 64];
        let a = transmit(&signal, 0.5, &mut ChaCha8Rng::seed_from_u64(99));
        let b = transmit(&signal, 0.5, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
        let quiet = transmit(&signal, 1e-300, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(quiet.samples, signal);

        let zeros = vec![0.0; 1_000_000];
        let f = transmit(&zeros, 0.5, &mut ChaCha8Rng::seed_from_u64(5));
        let var = f.samples.iter().map(|x| x * x).sum::<f64>() / f.samples.len() as f64;
        assert!((var / 0.25 - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn binary_log_likelihood_difference() {
        let code = Code::new(
            std::sync::Arc::new(Field::prime(2).unwrap()),
            1,
            vec![Fe(0), Fe(1)],
        )
        .unwrap();
        let frame = ReceivedFrame {
            samples: vec![0.3, 0.0],
            sigma2: 1.0,
        };
        let pi = likelihoods(&frame, &code).unwrap();
        assert!((pi.get(0, 0) - pi.get(1, 0) - 0.6).abs() < 1e-12);
        assert!(pi.get(0, 1) == pi.get(1, 1));
        let bad = ReceivedFrame { samples: vec![0.3], sigma2: 1.0 };
        assert!(likelihoods(&bad, &code).is_err());
        let gf5 = Code::from_params(5, 1, 4, 2).unwrap();
        assert!(likelihoods(&frame, &gf5).is_err());
    }

    #[test]
    fn noiseless_frame_maximizes_transmitted_symbols() {
        let code = Code::from_params(2, 4, 15, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = code.encode(&code.random_message(&mut rng)).unwrap();
        let frame = ReceivedFrame {
            samples: modulate(&c, code.field()).unwrap(),
            sigma2: 0.3,
        };
        let pi = likelihoods(&frame, &code).unwrap();
        assert_eq!(hard_decision(&pi), c);
        // inverting the density recovers the zero residual
        for (j, s) in c.iter().enumerate() {
            let d = squared_distance_from_loglik(pi.get(s.value(), j), 0.3, 4);
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn snr_to_sigma() {
        // RS(15,11) at 5 dB Eb/N0: 1 / (2 · 11/15 · 10^0.5)
        let s2 = sigma2_from_snr(5.0, 11.0 / 15.0);
        assert!((s2 - 0.215_609_840_466).abs() < 1e-9);
    }
}
