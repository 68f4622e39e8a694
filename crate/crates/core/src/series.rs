//! Truncated power series with exact rational coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `sum_{k < len} coeffs[k] x^k`, with everything from `x^len` on unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn new(mut coeffs: Vec<BigRational>, len: usize) -> Self {
        coeffs.resize(len, BigRational::zero());
        PowerSeries { coeffs }
    }

    pub fn from_integers(values: &[i64], len: usize) -> Self {
        Self::new(
            values.iter().map(|&v| BigRational::from_integer(v.into())).collect(),
            len,
        )
    }

    /// The series `x`.
    pub fn variable(len: usize) -> Self {
        let mut c = vec![BigRational::zero(); len];
        if len > 1 {
            c[1] = BigRational::one();
        }
        PowerSeries { coeffs: c }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let len = self.len();
        let mut c: Vec<BigRational> = (1..len)
            .map(|k| &self.coeffs[k] * BigRational::from_integer(BigInt::from(k)))
            .collect();
        c.push(BigRational::zero());
        PowerSeries { coeffs: c }
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let len = self.len();
        let mut c = vec![BigRational::zero(); len];
        for k in 1..len {
            c[k] = &self.coeffs[k - 1] / BigRational::from_integer(BigInt::from(k));
        }
        PowerSeries { coeffs: c }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Self {
        let len = self.len();
        assert!(!self.coeffs[0].is_zero(), "reciprocal needs a unit constant term");
        let mut out = vec![BigRational::zero(); len];
        out[0] = self.coeffs[0].recip();
        for k in 1..len {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &out[k - j];
            }
            out[k] = -acc * &out[0];
        }
        PowerSeries { coeffs: out }
    }

    /// `log f` for a series with constant term 1.
    pub fn ln(&self) -> Self {
        assert!(self.coeffs[0].is_one(), "log needs constant term 1");
        (self.derivative() * self.reciprocal()).integral()
    }

    /// `f(g)`; `g` must have zero constant term.
    pub fn compose(&self, g: &PowerSeries) -> Self {
        assert!(g.coeffs[0].is_zero(), "inner series must vanish at 0");
        let len = self.len().min(g.len());
        let mut out = PowerSeries::new(Vec::new(), len);
        let mut power = PowerSeries::new(vec![BigRational::one()], len);
        for k in 0..len {
            out = out + power.scale(&self.coeffs[k]);
            power = power * g.truncate(len);
        }
        out
    }

    pub fn truncate(&self, len: usize) -> Self {
        PowerSeries::new(self.coeffs.iter().take(len).cloned().collect(), len)
    }

    /// Compositional inverse `g` with `f(g(x)) = x`; requires zero constant
    /// and nonzero linear coefficient.
    pub fn reversion(&self) -> Self {
        let len = self.len();
        assert!(self.coeffs[0].is_zero() && !self.coeffs[1].is_zero());
        let lead = self.coeffs[1].clone();
        let mut g = PowerSeries::variable(len).scale(&lead.recip());
        for k in 2..len {
            let residual = self.compose(&g);
            let err = residual.coeffs[k].clone();
            g.coeffs[k] -= err / &lead;
        }
        g
    }
}

impl Add for PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: PowerSeries) -> PowerSeries {
        let len = self.len().min(rhs.len());
        PowerSeries {
            coeffs: (0..len).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: PowerSeries) -> PowerSeries {
        self + (-rhs)
    }
}

impl Neg for PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: PowerSeries) -> PowerSeries {
        let len = self.len().min(rhs.len());
        let mut out = vec![BigRational::zero(); len];
        for i in 0..len {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..len - i {
                out[i + j] += &self.coeffs[i] * &rhs.coeffs[j];
            }
        }
        PowerSeries { coeffs: out }
    }
}
