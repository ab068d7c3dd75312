//! Truncated multivariate Taylor arithmetic in up to four variables, total
//! degree at most four.
//!
//! A [`Taylor4`] value represents the Taylor expansion of a quantity along up
//! to four chart directions, truncated at a runtime order. Arithmetic is exact
//! on the retained coefficients, so mixed partial derivatives read off the
//! coefficients are exact up to floating-point rounding — no step-size error.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Maximum number of expansion variables.
pub const MAX_VARS: usize = 4;
/// Maximum truncation order.
pub const MAX_ORDER: usize = 4;
/// Monomials of total degree <= 4 in 4 variables.
pub const NUM_MONOMIALS: usize = 70;

/// Monomial count with total degree <= d (degree-sorted layout).
pub const DEGREE_OFFSET: [usize; 6] = [0, 1, 5, 15, 35, 70];

struct Tables {
    /// Exponent vector of each monomial, sorted by total degree then lexicographically.
    exponents: [[u8; MAX_VARS]; NUM_MONOMIALS],
    /// Total degree of each monomial.
    degree: [u8; NUM_MONOMIALS],
    /// Index of the product monomial, or -1 when the product exceeds degree 4.
    product: Vec<i8>,
    /// alpha! = prod of factorials of the exponents.
    factorial: [f64; NUM_MONOMIALS],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exps: Vec<[u8; MAX_VARS]> = Vec::with_capacity(NUM_MONOMIALS);
        for total in 0..=MAX_ORDER as u8 {
            for a in (0..=total).rev() {
                for b in (0..=(total - a)).rev() {
                    for c in (0..=(total - a - b)).rev() {
                        let d = total - a - b - c;
                        exps.push([a, b, c, d]);
                    }
                }
            }
        }
        assert_eq!(exps.len(), NUM_MONOMIALS);

        let mut exponents = [[0u8; MAX_VARS]; NUM_MONOMIALS];
        let mut degree = [0u8; NUM_MONOMIALS];
        let mut factorial = [1.0; NUM_MONOMIALS];
        let fact = |n: u8| -> f64 { (1..=n as u64).product::<u64>().max(1) as f64 };
        for (i, e) in exps.iter().enumerate() {
            exponents[i] = *e;
            degree[i] = e.iter().sum();
            factorial[i] = e.iter().map(|&k| fact(k)).product();
        }

        let index_of = |e: &[u8; MAX_VARS]| -> Option<usize> { exps.iter().position(|x| x == e) };

        let mut product = vec![-1i8; NUM_MONOMIALS * NUM_MONOMIALS];
        for i in 0..NUM_MONOMIALS {
            for j in 0..NUM_MONOMIALS {
                if degree[i] + degree[j] <= MAX_ORDER as u8 {
                    let mut e = [0u8; MAX_VARS];
                    for k in 0..MAX_VARS {
                        e[k] = exponents[i][k] + exponents[j][k];
                    }
                    product[i * NUM_MONOMIALS + j] =
                        index_of(&e).expect("product monomial missing") as i8;
                }
            }
        }

        Tables {
            exponents,
            degree,
            product,
            factorial,
        }
    })
}

/// Truncated Taylor value of one scalar quantity.
#[derive(Debug, Clone, Copy)]
pub struct Taylor4 {
    order: usize,
    c: [f64; NUM_MONOMIALS],
}

impl Taylor4 {
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order >= 1 && order <= MAX_ORDER);
        let mut c = [0.0; NUM_MONOMIALS];
        c[0] = value;
        Self { order, c }
    }

    /// `value + t_var`, the expansion variable seed.
    pub fn variable(value: f64, var: usize, order: usize) -> Self {
        assert!(var < MAX_VARS);
        let mut out = Self::constant(value, order);
        out.c[1 + var] = 1.0;
        out
    }

    /// `c0 + sum_a lin[a] * t_a`.
    pub fn affine(c0: f64, lin: &[f64], order: usize) -> Self {
        assert!(lin.len() <= MAX_VARS);
        let mut out = Self::constant(c0, order);
        for (a, &l) in lin.iter().enumerate() {
            out.c[1 + a] = l;
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    fn len(&self) -> usize {
        DEGREE_OFFSET[self.order + 1]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        let mut out = *self;
        for k in 0..self.len() {
            out.c[k] += other.c[k];
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        let mut out = *self;
        for k in 0..self.len() {
            out.c[k] -= other.c[k];
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = *self;
        for k in 0..self.len() {
            out.c[k] = -out.c[k];
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for k in 0..self.len() {
            out.c[k] *= s;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        let t = tables();
        let mut out = Self {
            order: self.order,
            c: [0.0; NUM_MONOMIALS],
        };
        let n = self.len();
        for i in 0..n {
            let ai = self.c[i];
            if ai == 0.0 {
                continue;
            }
            let remaining = self.order as u8 - t.degree[i];
            let jmax = DEGREE_OFFSET[remaining as usize + 1];
            let row = &t.product[i * NUM_MONOMIALS..];
            for j in 0..jmax {
                let bj = other.c[j];
                if bj == 0.0 {
                    continue;
                }
                out.c[row[j] as usize] += ai * bj;
            }
        }
        out
    }

    /// The nonconstant (nilpotent) part.
    fn nilpotent(&self) -> Self {
        let mut out = *self;
        out.c[0] = 0.0;
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.c[0];
        if c0 == 0.0 || !c0.is_finite() {
            return Err(Error::LeftInterior);
        }
        // 1/(c0 (1 + w)) = (1 - w + w^2 - w^3 + w^4) / c0, w nilpotent.
        let w = self.nilpotent().scale(1.0 / c0);
        let one = Self::constant(1.0, self.order);
        let mut acc = one;
        for _ in 0..self.order {
            acc = one.sub(&w.mul(&acc));
        }
        Ok(acc.scale(1.0 / c0))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Natural logarithm; requires a positive constant term.
    pub fn ln(&self) -> Result<Self> {
        let c0 = self.c[0];
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(Error::LeftInterior);
        }
        // ln(c0 (1 + w)) = ln c0 + w - w^2/2 + w^3/3 - w^4/4.
        let w = self.nilpotent().scale(1.0 / c0);
        let mut acc = Self::constant(0.0, self.order);
        for m in (1..=self.order).rev() {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            acc = acc.add(&Self::constant(sign / m as f64, self.order));
            if m > 1 {
                acc = acc.mul(&w);
            }
        }
        acc = acc.mul(&w);
        acc.c[0] = c0.ln();
        Ok(acc)
    }

    /// Raw coefficient of the monomial with the given exponents.
    pub fn coefficient(&self, exponents: &[u8; MAX_VARS]) -> f64 {
        let t = tables();
        let deg: u8 = exponents.iter().sum();
        assert!(deg as usize <= self.order);
        for k in 0..self.len() {
            if &t.exponents[k] == exponents {
                return self.c[k];
            }
        }
        unreachable!("monomial not found");
    }

    /// Mixed partial derivative with the given exponent multiplicities:
    /// coefficient times alpha!.
    pub fn partial(&self, exponents: &[u8; MAX_VARS]) -> f64 {
        let t = tables();
        let deg: u8 = exponents.iter().sum();
        assert!(deg as usize <= self.order);
        for k in 0..self.len() {
            if &t.exponents[k] == exponents {
                return self.c[k] * t.factorial[k];
            }
        }
        unreachable!("monomial not found");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_series_coefficients() {
        // ln(1 + t): coefficients 1, -1/2, 1/3, -1/4.
        let x = Taylor4::variable(1.0, 0, 4);
        let l = x.ln().unwrap();
        assert_relative_eq!(l.coefficient(&[0, 0, 0, 0]), 0.0, epsilon = 1e-15);
        assert_relative_eq!(l.coefficient(&[1, 0, 0, 0]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(l.coefficient(&[2, 0, 0, 0]), -0.5, epsilon = 1e-15);
        assert_relative_eq!(l.coefficient(&[3, 0, 0, 0]), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(l.coefficient(&[4, 0, 0, 0]), -0.25, epsilon = 1e-15);
    }

    #[test]
    fn recip_is_geometric_series() {
        // 1/(1 - t) = 1 + t + t^2 + t^3 + t^4.
        let x = Taylor4::affine(1.0, &[-1.0], 4);
        let r = x.recip().unwrap();
        for k in 0..=4u8 {
            assert_relative_eq!(r.coefficient(&[k, 0, 0, 0]), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn product_of_affine_factors() {
        // (1 + s)(1 + t) = 1 + s + t + st.
        let a = Taylor4::variable(1.0, 0, 2);
        let b = Taylor4::variable(1.0, 1, 2);
        let p = a.mul(&b);
        assert_relative_eq!(p.coefficient(&[0, 0, 0, 0]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.coefficient(&[1, 0, 0, 0]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.coefficient(&[0, 1, 0, 0]), 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.coefficient(&[1, 1, 0, 0]), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mixed_partials_of_log_product() {
        // f = ln((2 + s)(3 + t)) separates; cross partials vanish.
        let a = Taylor4::variable(2.0, 0, 4);
        let b = Taylor4::variable(3.0, 1, 4);
        let f = a.mul(&b).ln().unwrap();
        assert_relative_eq!(f.partial(&[1, 0, 0, 0]), 0.5, epsilon = 1e-14);
        assert_relative_eq!(f.partial(&[0, 1, 0, 0]), 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(f.partial(&[1, 1, 0, 0]), 0.0, epsilon = 1e-14);
        assert_relative_eq!(f.partial(&[2, 0, 0, 0]), -0.25, epsilon = 1e-14);
        assert_relative_eq!(f.partial(&[3, 0, 0, 0]), 2.0 / 8.0, epsilon = 1e-14);
        assert_relative_eq!(f.partial(&[2, 2, 0, 0]), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn division_roundtrip() {
        let a = Taylor4::affine(2.0, &[1.0, -0.5, 0.25, 0.125], 4);
        let b = Taylor4::affine(1.5, &[-0.3, 0.7, 0.1, -0.2], 4);
        let q = a.div(&b).unwrap();
        let back = q.mul(&b);
        for k in 0..DEGREE_OFFSET[5] {
            assert_relative_eq!(back.c[k], a.c[k], epsilon = 1e-13);
        }
    }

    #[test]
    fn ln_requires_positive_value() {
        let x = Taylor4::constant(-1.0, 2);
        assert!(x.ln().is_err());
    }
}
