//! Reed-Solomon code parameters and evaluation-map encoding.

use std::sync::Arc;

use rand::Rng;

use crate::galois::{Fe, Field, Poly};
use crate::{Error, Result};

/// An RS code C_q[n, k]: messages are polynomials of degree < k, codewords
/// are their evaluations on `n` distinct points.
#[derive(Clone, Debug)]
pub struct Code {
    field: Arc<Field>,
    n: usize,
    k: usize,
    points: Vec<Fe>,
}

impl Code {
    pub fn new(field: Arc<Field>, k: usize, points: Vec<Fe>) -> Result<Code> {
        let n = points.len();
        if k == 0 || k >= n {
            return Err(Error::InvalidCode(format!("need 0 < k < n, got n={n}, k={k}")));
        }
        if n > field.order() {
            return Err(Error::InvalidCode(format!(
                "n = {n} exceeds field size {}",
                field.order()
            )));
        }
        let mut seen = vec![false; field.order()];
        for p in &points {
            if p.value() >= field.order() {
                return Err(Error::InvalidCode(format!("point {p} not in field")));
            }
            if std::mem::replace(&mut seen[p.value()], true) {
                return Err(Error::InvalidCode(format!("duplicate evaluation point {p}")));
            }
        }
        Ok(Code { field, n, k, points })
    }

    /// Default evaluation set: {0, 1, …, n−1} over a prime field, and
    /// {α⁰, α¹, …, α^{n−1}} (exp-table order, nonzero) over GF(2^m).
    pub fn with_default_points(field: Arc<Field>, n: usize, k: usize) -> Result<Code> {
        let points = if field.degree() == 1 {
            if n > field.order() {
                return Err(Error::InvalidCode(format!("n = {n} exceeds field size")));
            }
            field.elements().take(n).collect()
        } else {
            if n >= field.order() {
                return Err(Error::InvalidCode(format!(
                    "n = {n} exceeds the {} nonzero elements",
                    field.order() - 1
                )));
            }
            (0..n).map(|i| field.alpha_pow(i)).collect()
        };
        Code::new(field, k, points)
    }

    /// Builds C_{p^m}[n, k] with default evaluation points.
    pub fn from_params(p: u32, m: u32, n: usize, k: usize) -> Result<Code> {
        Code::with_default_points(Arc::new(Field::new(p, m)?), n, k)
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn points(&self) -> &[Fe] {
        &self.points
    }

    pub fn d_min(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn t_min(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Number of codewords, q^k (saturating).
    pub fn size(&self) -> u128 {
        (self.field.order() as u128).saturating_pow(self.k as u32)
    }

    /// c_j = u(β_j).
    pub fn encode(&self, message: &Poly) -> Result<Vec<Fe>> {
        if message.degree().is_some_and(|d| d >= self.k) {
            return Err(Error::InvalidCode(format!(
                "message degree {} ≥ k = {}",
                message.degree().unwrap(),
                self.k
            )));
        }
        Ok(self
            .points
            .iter()
            .map(|&b| message.eval(&self.field, b))
            .collect())
    }

    /// Lagrange interpolation of `values` on the evaluation set: the unique
    /// polynomial of degree < n through all (β_j, v_j).
    pub fn interpolate(&self, values: &[Fe]) -> Result<Poly> {
        if values.len() != self.n {
            return Err(Error::Length {
                expected: self.n,
                got: values.len(),
            });
        }
        let gf = &*self.field;
        let mut acc = Poly::zero();
        for (j, (&bj, &vj)) in self.points.iter().zip(values).enumerate() {
            if vj.is_zero() {
                continue;
            }
            let mut basis = Poly::constant(Fe::ONE);
            let mut denom = Fe::ONE;
            for (i, &bi) in self.points.iter().enumerate() {
                if i != j {
                    basis = basis.mul_linear(bi, gf);
                    denom = gf.mul(denom, gf.sub(bj, bi));
                }
            }
            let s = gf.mul(vj, gf.inv_nonzero(denom));
            acc = acc.add(&basis.scale(s, gf), gf);
        }
        Ok(acc)
    }

    pub fn is_codeword(&self, v: &[Fe]) -> bool {
        match self.interpolate(v) {
            Ok(p) => p.degree().is_none_or(|d| d < self.k),
            Err(_) => false,
        }
    }

    /// The `index`-th message in lexicographic coefficient order
    /// (u₀ most significant).
    pub fn message_from_index(&self, mut index: u128) -> Poly {
        let q = self.field.order() as u128;
        let mut coeffs = vec![Fe::ZERO; self.k];
        for c in coeffs.iter_mut().rev() {
            *c = Fe((index % q) as u16);
            index /= q;
        }
        Poly::new(coeffs)
    }

    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Poly {
        let q = self.field.order();
        Poly::new(
            (0..self.k)
                .map(|_| Fe(rng.random_range(0..q) as u16))
                .collect(),
        )
    }

    /// z − c, elementwise.
    pub fn difference(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        a.iter().zip(b).map(|(&x, &y)| self.field.sub(x, y)).collect()
    }
}

pub fn hamming_weight(v: &[Fe]) -> usize {
    v.iter().filter(|c| !c.is_zero()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn c5() -> Code {
        Code::from_params(5, 1, 4, 2).unwrap()
    }

    fn fes(v: &[u16]) -> Vec<Fe> {
        v.iter().map(|&x| Fe(x)).collect()
    }

    #[test]
    fn parameters() {
        let c = c5();
        assert_eq!((c.n(), c.k(), c.d_min(), c.t_min()), (4, 2, 3, 1));
        assert_eq!(c.points(), &fes(&[0, 1, 2, 3])[..]);
        let c16 = Code::from_params(2, 4, 15, 11).unwrap();
        assert_eq!((c16.d_min(), c16.t_min()), (5, 2));
        assert_eq!(c16.points()[0], Fe(1));
        assert_eq!(c16.points()[1], Fe(2));
    }

    #[test]
    fn invalid_codes() {
        assert!(Code::from_params(5, 1, 4, 4).is_err());
        assert!(Code::from_params(5, 1, 6, 2).is_err());
        assert!(Code::from_params(2, 4, 16, 11).is_err());
        let f = Arc::new(Field::prime(5).unwrap());
        assert!(Code::new(f, 2, fes(&[0, 1, 1, 3])).is_err());
    }

    #[test]
    fn encode_examples() {
        let c = c5();
        assert_eq!(c.encode(&Poly::from_values(&[1, 2])).unwrap(), fes(&[1, 3, 0, 2]));
        assert_eq!(c.encode(&Poly::zero()).unwrap(), fes(&[0, 0, 0, 0]));
        assert_eq!(c.encode(&Poly::from_values(&[1, 4])).unwrap(), fes(&[1, 0, 4, 3]));
        assert!(c.encode(&Poly::from_values(&[1, 1, 1])).is_err());
    }

    #[test]
    fn codeword_membership() {
        let c = c5();
        assert!(c.is_codeword(&fes(&[1, 3, 0, 2])));
        assert!(c.is_codeword(&fes(&[0, 0, 0, 0])));
        assert!(!c.is_codeword(&fes(&[1, 0, 2, 0])));
        assert!(!c.is_codeword(&fes(&[1, 3, 0])));
    }

    #[test]
    fn minimum_distance_exhaustive() {
        let c = c5();
        let words: Vec<_> = (0..c.size())
            .map(|i| c.encode(&c.message_from_index(i)).unwrap())
            .collect();
        assert_eq!(words.iter().collect::<HashSet<_>>().len(), 25);
        for (i, a) in words.iter().enumerate() {
            assert!(c.is_codeword(a));
            for b in &words[i + 1..] {
                let d = a.iter().zip(b).filter(|(x, y)| x != y).count();
                assert!(d >= c.d_min());
            }
        }
    }

    #[test]
    fn encode_injective_random() {
        let c = Code::from_params(2, 4, 15, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = c.random_message(&mut rng);
            let b = c.random_message(&mut rng);
            let (ca, cb) = (c.encode(&a).unwrap(), c.encode(&b).unwrap());
            assert_eq!(a == b, ca == cb);
            assert!(c.is_codeword(&ca));
            assert_eq!(c.interpolate(&ca).unwrap(), a);
        }
    }

    #[test]
    fn message_indexing_is_lexicographic() {
        let c = c5();
        assert_eq!(c.message_from_index(0), Poly::zero());
        assert_eq!(c.message_from_index(1), Poly::from_values(&[0, 1]));
        assert_eq!(c.message_from_index(5), Poly::from_values(&[1]));
        assert_eq!(c.message_from_index(24), Poly::from_values(&[4, 4]));
    }
}
