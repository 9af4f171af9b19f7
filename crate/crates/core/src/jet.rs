//! Truncated multilinear jets: polynomials in nilpotent symbols e_k with e_k^2 = 0.
//!
//! Substituting G -> (1 + e_1 X_1) ... G ... (1 + e_n X_n) and reading off the
//! coefficient of e_1...e_n gives the iterated left/right translation derivative
//! of any rational expression in matrix elements, exactly.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{Rational, Scalar};

/// Coefficients indexed by subset bitmask. A shorter vector is padded with zeros,
/// so a length-1 jet is a plain constant and mixes freely with longer ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(v: S) -> Self {
        Jet { coeffs: vec![v] }
    }

    /// The symbol e_k in a jet over `nvars` symbols.
    pub fn symbol(k: usize, nvars: usize) -> Self {
        assert!(k < nvars);
        let mut coeffs = vec![S::zero(); 1 << nvars];
        coeffs[1 << k] = S::one();
        Jet { coeffs }
    }

    /// `v * e_k`.
    pub fn scaled_symbol(v: S, k: usize, nvars: usize) -> Self {
        let mut j = Self::symbol(k, nvars);
        j.coeffs[1 << k] = v;
        j
    }

    pub fn value(&self) -> S {
        self.coeffs[0].clone()
    }

    pub fn coeff(&self, mask: usize) -> S {
        self.coeffs.get(mask).cloned().unwrap_or_else(S::zero)
    }

    /// Partial derivative in e_k: the jet of coefficients carrying e_k, with e_k removed.
    pub fn derivative(&self, k: usize) -> Self {
        let bit = 1 << k;
        let coeffs = (0..self.coeffs.len())
            .map(|m| if m & bit == 0 { self.coeff(m | bit) } else { S::zero() })
            .collect();
        Jet { coeffs }
    }

    /// Coefficient of e_0 e_1 ... e_{n-1}.
    pub fn top(&self, nvars: usize) -> S {
        self.coeff((1 << nvars) - 1)
    }

    fn get(&self, i: usize) -> S {
        self.coeff(i)
    }

    fn zip(self, rhs: Self, f: impl Fn(S, S) -> S) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| f(self.get(i), rhs.get(i))).collect();
        Jet { coeffs }
    }

    fn nvars(&self) -> usize {
        self.coeffs.len().trailing_zeros() as usize
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet {
            coeffs: self.coeffs.into_iter().map(|a| -a).collect(),
        }
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![S::zero(); n];
        for (a_mask, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (b_mask, b) in rhs.coeffs.iter().enumerate() {
                if a_mask & b_mask == 0 && !b.is_zero() {
                    let slot = &mut out[a_mask | b_mask];
                    *slot = slot.clone() + a.clone() * b.clone();
                }
            }
        }
        Jet { coeffs: out }
    }
}

impl<S: Scalar> Div for Jet<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // 1/(b0 + d) = sum_k (-d)^k / b0^(k+1); d^k vanishes past the symbol count
        let b0 = rhs.value();
        let mut delta = rhs.clone();
        delta.coeffs[0] = S::zero();
        let inv_b0 = Jet::constant(S::one() / b0);
        let mut term = inv_b0.clone();
        let mut inv = inv_b0.clone();
        for _ in 0..rhs.nvars() {
            term = term * (-delta.clone()) * inv_b0.clone();
            inv = inv + term.clone();
        }
        self * inv
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    fn zero() -> Self {
        Jet::constant(S::zero())
    }
    fn one() -> Self {
        Jet::constant(S::one())
    }
    fn from_rational(r: &Rational) -> Self {
        Jet::constant(S::from_rational(r))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    type J = Jet<Rational>;

    #[test]
    fn symbols_square_to_zero() {
        let e = J::symbol(0, 2);
        assert!((e.clone() * e).is_zero());
    }

    #[test]
    fn product_rule_on_two_symbols() {
        // (a + e0)(b + e1) has e0 e1 coefficient 1
        let x = J::constant(rat(3, 1)) + J::symbol(0, 2);
        let y = J::constant(rat(5, 1)) + J::symbol(1, 2);
        let p = x * y;
        assert_eq!(p.value(), rat(15, 1));
        assert_eq!(p.top(2), rat(1, 1));
        assert_eq!(p.coeff(1), rat(5, 1));
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = J::constant(rat(2, 1)) + J::symbol(0, 3) + J::scaled_symbol(rat(1, 3), 2, 3);
        let y = J::constant(rat(-7, 4)) + J::symbol(1, 3) * J::symbol(2, 3);
        let q = x.clone() / y.clone();
        assert_eq!(q * y, x);
    }

    #[test]
    fn derivative_of_reciprocal() {
        // d/de (1/(2+e)) = -1/4
        let x = J::constant(rat(2, 1)) + J::symbol(0, 1);
        let r = J::one() / x;
        assert_eq!(r.top(1), rat(-1, 4));
    }

    #[test]
    fn derivative_drops_the_symbol() {
        let x = J::constant(rat(2, 1)) + J::symbol(0, 2);
        let y = J::constant(rat(3, 1)) + J::scaled_symbol(rat(4, 1), 1, 2);
        let p = x * y;
        assert_eq!(p.derivative(0).value(), rat(3, 1));
        assert_eq!(p.derivative(0).coeff(2), rat(4, 1));
        assert_eq!(p.derivative(1).derivative(0).value(), rat(4, 1));
    }
}
