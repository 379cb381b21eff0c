//! Multiplicity-one Guruswami-Sudan interpolation with y-degree ≤ 1.
//!
//! A [`GroebnerBasis`] holds two bivariate polynomials `q0(x) + q1(x)·y`
//! spanning the F_q[x]-module of polynomials that vanish on the current
//! point set. Points are added with Kötter's update and removed with the
//! backward update, so a trial that flips one coordinate costs one of each.
//!
//! Monomials are ordered by (1, k−1)-weighted degree, ties broken by
//! y-degree. The two basis polynomials always have distinct leading
//! monomials, so "minimal" is never ambiguous.

use crate::galois::{Fe, Field, Poly};
use crate::{Error, Result};

/// Leading monomial of a bivariate polynomial under the (1, k−1) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeightedDegree {
    pub value: usize,
    pub y_degree: u8,
}

/// q0(x) + q1(x)·y.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivarPoly {
    pub q0: Poly,
    pub q1: Poly,
}

impl BivarPoly {
    pub fn new(q0: Poly, q1: Poly) -> BivarPoly {
        BivarPoly { q0, q1 }
    }

    pub fn is_zero(&self) -> bool {
        self.q0.is_zero() && self.q1.is_zero()
    }

    /// max(deg q0, deg q1 + k − 1); the y-bearing term wins ties.
    pub fn weighted_degree(&self, k: usize) -> WeightedDegree {
        let lead0 = self.q0.degree().map(|d| WeightedDegree {
            value: d,
            y_degree: 0,
        });
        let lead1 = self.q1.degree().map(|d| WeightedDegree {
            value: d + k - 1,
            y_degree: 1,
        });
        lead0.max(lead1).unwrap_or(WeightedDegree {
            value: 0,
            y_degree: 0,
        })
    }

    pub fn eval(&self, gf: &Field, x: Fe, y: Fe) -> Fe {
        gf.add(self.q0.eval(gf, x), gf.mul(self.q1.eval(gf, x), y))
    }

    /// `a·self − b·other`.
    fn cross(&self, a: Fe, other: &BivarPoly, b: Fe, gf: &Field) -> BivarPoly {
        BivarPoly {
            q0: self.q0.cross(a, &other.q0, b, gf),
            q1: self.q1.cross(a, &other.q1, b, gf),
        }
    }

    fn mul_linear(&self, beta: Fe, gf: &Field) -> BivarPoly {
        BivarPoly {
            q0: self.q0.mul_linear(beta, gf),
            q1: self.q1.mul_linear(beta, gf),
        }
    }

    /// Exact division by (x − β); `None` if either part leaves a remainder.
    fn div_linear(&self, beta: Fe, gf: &Field) -> Option<BivarPoly> {
        let (q0, r0) = self.q0.div_linear(beta, gf);
        let (q1, r1) = self.q1.div_linear(beta, gf);
        (r0.is_zero() && r1.is_zero()).then_some(BivarPoly { q0, q1 })
    }
}

impl std::fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.q0.is_zero(), self.q1.is_zero()) {
            (_, true) => write!(f, "{}", self.q0),
            (true, false) => write!(f, "({})y", self.q1),
            (false, false) => write!(f, "{}+({})y", self.q0, self.q1),
        }
    }
}

/// Two-element Gröbner basis plus the points it currently interpolates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    polys: [BivarPoly; 2],
    points: Vec<(Fe, Fe)>,
    k: usize,
}

impl GroebnerBasis {
    /// {1, y}, no points.
    pub fn new(k: usize) -> GroebnerBasis {
        assert!(k >= 1, "dimension must be positive");
        GroebnerBasis {
            polys: [
                BivarPoly::new(Poly::constant(Fe::ONE), Poly::zero()),
                BivarPoly::new(Poly::zero(), Poly::constant(Fe::ONE)),
            ],
            points: Vec::new(),
            k,
        }
    }

    /// Basis for the module vanishing on all `points`, added in order.
    pub fn interpolate(gf: &Field, k: usize, points: impl IntoIterator<Item = (Fe, Fe)>) -> Result<GroebnerBasis> {
        let mut basis = GroebnerBasis::new(k);
        for p in points {
            basis.add_point(gf, p)?;
        }
        Ok(basis)
    }

    pub fn polys(&self) -> &[BivarPoly; 2] {
        &self.polys
    }

    pub fn points(&self) -> &[(Fe, Fe)] {
        &self.points
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weighted_degrees(&self) -> [WeightedDegree; 2] {
        [
            self.polys[0].weighted_degree(self.k),
            self.polys[1].weighted_degree(self.k),
        ]
    }

    /// Index of the polynomial with the smaller leading monomial.
    pub fn minimal_index(&self) -> usize {
        let [d0, d1] = self.weighted_degrees();
        usize::from(d1 < d0)
    }

    pub fn minimal(&self) -> &BivarPoly {
        &self.polys[self.minimal_index()]
    }

    /// Pure forward update: a new basis that additionally vanishes at `point`.
    pub fn forward_add(&self, gf: &Field, point: (Fe, Fe)) -> Result<GroebnerBasis> {
        let mut next = self.clone();
        next.add_point(gf, point)?;
        Ok(next)
    }

    /// Pure backward update: a basis for the module on `points \ {point}`.
    pub fn backward_remove(&self, gf: &Field, point: (Fe, Fe)) -> Result<GroebnerBasis> {
        let mut next = self.clone();
        next.remove_point(gf, point)?;
        Ok(next)
    }

    /// Replaces the point at `old.0` by `new`, one backward and one forward
    /// update. Both points must share their x-coordinate.
    pub fn swap_point(&self, gf: &Field, old: (Fe, Fe), new: (Fe, Fe)) -> Result<GroebnerBasis> {
        let mut next = self.clone();
        next.remove_point(gf, old)?;
        next.add_point(gf, new)?;
        Ok(next)
    }

    /// Kötter step: evaluate both polynomials at the point, take μ as the
    /// minimal one among nonzero evaluations, cross-eliminate ν with μ, then
    /// multiply μ by (x − β).
    pub fn add_point(&mut self, gf: &Field, (x, y): (Fe, Fe)) -> Result<()> {
        if self.points.iter().any(|&(px, _)| px == x) {
            return Err(Error::DuplicatePoint(x));
        }
        let evals = [self.polys[0].eval(gf, x, y), self.polys[1].eval(gf, x, y)];
        let mu = self
            .pick(|l| !evals[l].is_zero())
            .ok_or(Error::BasisInconsistent("both polynomials vanish at a new point"))?;
        let nu = 1 - mu;
        if !evals[nu].is_zero() {
            self.polys[nu] = self.polys[nu].cross(evals[mu], &self.polys[mu], evals[nu], gf);
        }
        self.polys[mu] = self.polys[mu].mul_linear(x, gf);
        self.points.push((x, y));
        Ok(())
    }

    /// Backward step: μ is the minimal polynomial among those with
    /// q1(β) ≠ 0; ν is cross-eliminated against μ so that q1^ν(β) = 0, after
    /// which ν is divisible by (x − β).
    pub fn remove_point(&mut self, gf: &Field, (x, y): (Fe, Fe)) -> Result<()> {
        let pos = self
            .points
            .iter()
            .position(|&p| p == (x, y))
            .ok_or(Error::MissingPoint(x, y))?;
        let evals = [self.polys[0].q1.eval(gf, x), self.polys[1].q1.eval(gf, x)];
        let mu = self
            .pick(|l| !evals[l].is_zero())
            .ok_or(Error::BasisInconsistent("no y-term survives at the removed point"))?;
        let nu = 1 - mu;
        let reduced = if evals[nu].is_zero() {
            self.polys[nu].clone()
        } else {
            self.polys[nu].cross(evals[mu], &self.polys[mu], evals[nu], gf)
        };
        self.polys[nu] = reduced
            .div_linear(x, gf)
            .ok_or(Error::BasisInconsistent("division by (x - beta) left a remainder"))?;
        self.points.swap_remove(pos);
        Ok(())
    }

    /// Among l ∈ {0, 1} satisfying `ok`, the one with smaller weighted degree.
    fn pick(&self, ok: impl Fn(usize) -> bool) -> Option<usize> {
        let [d0, d1] = self.weighted_degrees();
        match (ok(0), ok(1)) {
            (true, true) => Some(usize::from(d1 < d0)),
            (true, false) => Some(0),
            (false, true) => Some(1),
            (false, false) => None,
        }
    }

    /// Factorizes the minimal polynomial: if q1 | q0, returns u = −q0/q1
    /// provided deg u < k.
    pub fn factorize(&self, gf: &Field) -> Option<Poly> {
        factorize(self.minimal(), self.k, gf)
    }
}

/// Single-root factorization of `q0 + q1·y`.
pub fn factorize(poly: &BivarPoly, k: usize, gf: &Field) -> Option<Poly> {
    if poly.q1.is_zero() {
        return None;
    }
    let (quot, rem) = poly.q0.divrem(&poly.q1, gf).ok()?;
    if !rem.is_zero() {
        return None;
    }
    let u = quot.neg(gf);
    match u.degree() {
        Some(d) if d >= k => None,
        _ => Some(u),
    }
}
