//! Forward-mode dual numbers.
//!
//! `Dual<f64>` carries one directional derivative; nesting it as
//! `Dual<Dual<f64>>` carries a mixed second derivative, which is how
//! Hessians of Hamiltonians are obtained to roundoff.

use std::ops::{Add, Mul, Neg, Sub};

/// Arithmetic needed to evaluate a Hamiltonian expression.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    /// The underlying real value (innermost component).
    fn real(&self) -> f64;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;

    fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut exp = n;
        let mut acc = Self::constant(1.0);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            exp >>= 1;
            if exp > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn real(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    pub fn variable(re: T) -> Self {
        Self {
            re,
            eps: T::constant(1.0),
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.re * rhs.re, self.re * rhs.eps + self.eps * rhs.re)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn constant(c: f64) -> Self {
        Self::new(T::constant(c), T::constant(0.0))
    }

    fn real(&self) -> f64 {
        self.re.real()
    }

    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        // d sqrt(x) = dx / (2 sqrt(x))
        Self::new(s, self.eps * (s * T::constant(2.0)).recip())
    }

    fn recip(self) -> Self {
        let r = self.re.recip();
        Self::new(r, -(self.eps * r * r))
    }

    fn powi(self, n: u32) -> Self {
        if n == 0 {
            return Self::constant(1.0);
        }
        let lower = self.re.powi(n - 1);
        Self::new(lower * self.re, self.eps * lower * T::constant(n as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D2 = Dual<Dual<f64>>;

    fn seed2(x: f64, outer: bool, inner: bool) -> D2 {
        Dual::new(
            Dual::new(x, if inner { 1.0 } else { 0.0 }),
            Dual::new(if outer { 1.0 } else { 0.0 }, 0.0),
        )
    }

    #[test]
    fn first_derivative_of_polynomial() {
        let x = Dual::variable(3.0);
        let y = x.powi(3) - x * Dual::constant(2.0);
        assert_eq!(y.re, 21.0);
        assert_eq!(y.eps, 25.0);
    }

    #[test]
    fn second_derivative_of_sqrt() {
        // f = sqrt(x), f'' = -1/4 x^{-3/2}
        let x = seed2(4.0, true, true);
        let f = x.sqrt();
        assert!((f.re.re - 2.0).abs() < 1e-15);
        assert!((f.re.eps - 0.25).abs() < 1e-15);
        assert!((f.eps.re - 0.25).abs() < 1e-15);
        assert!((f.eps.eps + 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_partial() {
        // f = x^2 y, d2f/dxdy = 2x
        let x = seed2(1.5, true, false);
        let y = seed2(-2.0, false, true);
        let f = x.powi(2) * y;
        assert!((f.eps.eps - 3.0).abs() < 1e-15);
    }

    #[test]
    fn recip_derivatives() {
        let x = seed2(2.0, true, true);
        let f = x.recip();
        assert!((f.re.eps + 0.25).abs() < 1e-15);
        assert!((f.eps.eps - 0.25).abs() < 1e-15);
    }

    #[test]
    fn powi_zero_is_one() {
        let x = Dual::variable(5.0);
        let y = x.powi(0);
        assert_eq!((y.re, y.eps), (1.0, 0.0));
    }
}
