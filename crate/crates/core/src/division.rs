//! Real division algebras ℝ, ℂ, ℍ, 𝕆 via the Cayley–Dickson doubling construction.
//!
//! Every scalar is stored as a fixed-width array of 8 real coordinates with a
//! dimension tag, zero-padded beyond `dim`, so mixed-family code paths share a
//! single layout. The multiplication rule is the recursion
//! `(x, y)(u, v) = (xu − v̄y, vx + yū)`; all basis multiplication tables are
//! derived from it rather than transcribed.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Maximum scalar width (octonions).
pub const MAX_DIM: usize = 8;

/// An element of ℝ, ℂ, ℍ or 𝕆, tagged by its real dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisionScalar {
    dim: usize,
    coords: [f64; MAX_DIM],
}

impl DivisionScalar {
    pub fn new(dim: usize, coords: &[f64]) -> Result<Self> {
        if !matches!(dim, 1 | 2 | 4 | 8) {
            return Err(Error::BadScalarDim(dim));
        }
        if coords.len() != dim {
            return Err(Error::ScalarDimMismatch(coords.len(), dim));
        }
        let mut c = [0.0; MAX_DIM];
        c[..dim].copy_from_slice(coords);
        Ok(Self { dim, coords: c })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coords: [0.0; MAX_DIM],
        }
    }

    pub fn real(dim: usize, value: f64) -> Self {
        let mut coords = [0.0; MAX_DIM];
        coords[0] = value;
        Self { dim, coords }
    }

    pub fn one(dim: usize) -> Self {
        Self::real(dim, 1.0)
    }

    /// The k-th basis unit (k = 0 is the real unit).
    pub fn basis_unit(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut coords = [0.0; MAX_DIM];
        coords[k] = 1.0;
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.coords[k]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut coords = self.coords;
        for (c, o) in coords.iter_mut().zip(other.coords.iter()) {
            *c += o;
        }
        Self {
            dim: self.dim,
            coords,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut coords = self.coords;
        for (c, o) in coords.iter_mut().zip(other.coords.iter()) {
            *c -= o;
        }
        Self {
            dim: self.dim,
            coords,
        }
    }

    pub fn neg(&self) -> Self {
        let mut coords = self.coords;
        for c in coords.iter_mut() {
            *c = -*c;
        }
        Self {
            dim: self.dim,
            coords,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut coords = self.coords;
        for c in coords.iter_mut() {
            *c *= s;
        }
        Self {
            dim: self.dim,
            coords,
        }
    }

    /// Cayley–Dickson product. Errors when the operands live in different algebras.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ScalarDimMismatch(self.dim, other.dim));
        }
        let mut out = [0.0; MAX_DIM];
        cd_mul_slices(
            &self.coords[..self.dim],
            &other.coords[..self.dim],
            &mut out[..self.dim],
        );
        Ok(Self {
            dim: self.dim,
            coords: out,
        })
    }

    /// Product of two scalars known to share a dimension.
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = [0.0; MAX_DIM];
        cd_mul_slices(
            &self.coords[..self.dim],
            &other.coords[..self.dim],
            &mut out[..self.dim],
        );
        Self {
            dim: self.dim,
            coords: out,
        }
    }

    pub fn conj(&self) -> Self {
        let mut coords = self.coords;
        for c in coords.iter_mut().skip(1) {
            *c = -*c;
        }
        Self {
            dim: self.dim,
            coords,
        }
    }

    pub fn real_part(&self) -> f64 {
        self.coords[0]
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords[..self.dim].iter().map(|c| c * c).sum()
    }
}

/// Recursive Cayley–Dickson multiplication on coordinate slices:
/// `(x, y)(u, v) = (xu − v̄y, vx + yū)`.
fn cd_mul_slices(a: &[f64], b: &[f64], out: &mut [f64]) {
    let n = a.len();
    if n == 1 {
        out[0] = a[0] * b[0];
        return;
    }
    let h = n / 2;
    let (x, y) = a.split_at(h);
    let (u, v) = b.split_at(h);

    let mut t1 = [0.0; MAX_DIM / 2];
    let mut t2 = [0.0; MAX_DIM / 2];
    let mut vc = [0.0; MAX_DIM / 2];
    let mut uc = [0.0; MAX_DIM / 2];
    conj_slice(v, &mut vc[..h]);
    conj_slice(u, &mut uc[..h]);

    // xu − v̄y
    cd_mul_slices(x, u, &mut t1[..h]);
    cd_mul_slices(&vc[..h], y, &mut t2[..h]);
    for i in 0..h {
        out[i] = t1[i] - t2[i];
    }
    // vx + yū
    cd_mul_slices(v, x, &mut t1[..h]);
    cd_mul_slices(y, &uc[..h], &mut t2[..h]);
    for i in 0..h {
        out[h + i] = t1[i] + t2[i];
    }
}

fn conj_slice(a: &[f64], out: &mut [f64]) {
    out[0] = a[0];
    for i in 1..a.len() {
        out[i] = -a[i];
    }
}

/// Signed entry of the octonion basis multiplication table:
/// `e_i · e_j = sign · e_index`.
#[derive(Debug, Clone, Copy)]
pub struct TableEntry {
    pub index: usize,
    pub sign: f64,
}

/// The 8×8 octonion basis table derived from the Cayley–Dickson recursion.
///
/// The product of two basis units is always ± another basis unit, so the table
/// stores one signed index per pair. Generic scalar rings (jets) multiply
/// octonions through this table.
pub fn octonion_table() -> &'static [[TableEntry; 8]; 8] {
    static TABLE: OnceLock<[[TableEntry; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[TableEntry {
            index: 0,
            sign: 0.0,
        }; 8]; 8];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let p = DivisionScalar::basis_unit(8, i)
                    .mul_unchecked(&DivisionScalar::basis_unit(8, j));
                let mut found = None;
                for (k, &c) in p.coords().iter().enumerate() {
                    if c != 0.0 {
                        assert!(found.is_none(), "basis product is not a signed unit");
                        assert!(c == 1.0 || c == -1.0);
                        found = Some(TableEntry { index: k, sign: c });
                    }
                }
                *entry = found.expect("basis product vanished");
            }
        }
        table
    })
}
