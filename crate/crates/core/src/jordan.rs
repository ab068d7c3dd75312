//! Euclidean Jordan algebras underlying the irreducible symmetric cones, plus
//! their direct sums.
//!
//! Five families are realized: symmetric real matrices, Hermitian complex and
//! quaternionic matrices, the 27-dimensional Albert algebra of 3×3 Hermitian
//! octonionic matrices, and the spin factors. Every algebra carries an
//! orthonormal realization basis for its trace form, so elements are coordinate
//! vectors and the Gram matrix of the basis is the identity.

use crate::division::DivisionScalar;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

pub type AlgebraRef = Arc<JordanAlgebra>;

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// The five irreducible families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Symmetric n×n real matrices; cone of positive definite matrices.
    SymR,
    /// Hermitian n×n complex matrices.
    HermC,
    /// Hermitian n×n quaternionic matrices.
    HermH,
    /// Hermitian 3×3 octonionic matrices (n = 3 only).
    Albert,
    /// Spin factor on R ⊕ R^{n-1}; cone is the Lorentz cone in dimension n.
    Spin,
}

impl Family {
    /// Real dimension of the scalar field of the matrix realization.
    pub fn scalar_dim(&self) -> usize {
        match self {
            Family::SymR => 1,
            Family::HermC => 2,
            Family::HermH => 4,
            Family::Albert => 8,
            Family::Spin => 0,
        }
    }

    pub fn is_matrix(&self) -> bool {
        !matches!(self, Family::Spin)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Family::SymR => "symr",
            Family::HermC => "hermc",
            Family::HermH => "hermh",
            Family::Albert => "albert",
            Family::Spin => "spin",
        }
    }
}

/// Square matrix over a division algebra, row-major.
#[derive(Debug, Clone)]
pub(crate) struct KMatrix {
    pub n: usize,
    pub sdim: usize,
    pub entries: Vec<DivisionScalar>,
}

impl KMatrix {
    pub fn zero(n: usize, sdim: usize) -> Self {
        Self {
            n,
            sdim,
            entries: vec![DivisionScalar::zero(sdim); n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &DivisionScalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: DivisionScalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Self {
            n: self.n,
            sdim: self.sdim,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Self {
            n: self.n,
            sdim: self.sdim,
            entries,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let entries = self.entries.iter().map(|a| a.scale(s)).collect();
        Self {
            n: self.n,
            sdim: self.sdim,
            entries,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n, self.sdim);
        for i in 0..n {
            for j in 0..n {
                let mut acc = DivisionScalar::zero(self.sdim);
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul_unchecked(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n, self.sdim);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    /// Symmetrize: (M + M†)/2, removing rounding drift off the self-adjoint part.
    pub fn hermitize(&self) -> Self {
        self.add(&self.conj_transpose()).scale(0.5)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn re_trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).real_part()).sum()
    }

    /// Re tr(AB) without forming the product.
    pub fn re_trace_product(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += self.get(i, j).mul_unchecked(other.get(j, i)).real_part();
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|e| e.coords().iter().map(|c| c.abs()))
            .fold(0.0, f64::max)
    }
}

/// One irreducible summand with its coordinate window in the direct sum.
#[derive(Debug, Clone)]
pub struct Part {
    pub family: Family,
    pub n: usize,
    pub dim: usize,
    pub rank: usize,
    pub offset: usize,
    basis_mats: Option<Vec<KMatrix>>,
}

impl Part {
    fn new(family: Family, n: usize, offset: usize) -> Result<Self> {
        let (dim, rank) = match family {
            Family::SymR => (n * (n + 1) / 2, n),
            Family::HermC => (n * n, n),
            Family::HermH => (n * (2 * n - 1), n),
            Family::Albert => {
                if n != 3 {
                    return Err(Error::UnsupportedRank {
                        family: "albert",
                        expected: 3,
                        got: n,
                    });
                }
                (27, 3)
            }
            Family::Spin => (n, 2),
        };
        if n < 1 {
            return Err(Error::BadAlgebra(format!(
                "{} requires n >= 1, got {n}",
                family.tag()
            )));
        }
        if family == Family::Spin && n < 2 {
            return Err(Error::BadAlgebra(
                "spin factor requires ambient dimension n >= 2".into(),
            ));
        }
        let basis_mats = family.is_matrix().then(|| matrix_basis(family, n));
        Ok(Self {
            family,
            n,
            dim,
            rank,
            offset,
            basis_mats,
        })
    }

    pub(crate) fn basis_mats(&self) -> &[KMatrix] {
        self.basis_mats.as_ref().expect("matrix family")
    }

    /// Matrix realization of the coordinate slice (matrix families only).
    pub(crate) fn reconstitute(&self, coords: &[f64]) -> KMatrix {
        let mats = self.basis_mats();
        let sdim = self.family.scalar_dim();
        let mut out = KMatrix::zero(self.n, sdim);
        for (c, b) in coords.iter().zip(mats.iter()) {
            if *c != 0.0 {
                out = out.add(&b.scale(*c));
            }
        }
        out
    }

    /// Coordinates of a self-adjoint matrix in the orthonormal basis.
    /// Exact inverse of `reconstitute`.
    pub(crate) fn coords_of(&self, m: &KMatrix) -> Vec<f64> {
        let sdim = self.family.scalar_dim();
        let n = self.n;
        let mut coords = Vec::with_capacity(self.dim);
        for i in 0..n {
            coords.push(m.get(i, i).real_part());
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for u in 0..sdim {
                    coords.push(SQRT_2 * m.get(i, j).coord(u));
                }
            }
        }
        coords
    }

    /// Ambient spin coordinates (t, x̄) of the coordinate slice.
    pub(crate) fn spin_ambient(&self, coords: &[f64]) -> Vec<f64> {
        coords.iter().map(|c| c / SQRT_2).collect()
    }

    /// Real symmetric embedding of a self-adjoint matrix (dims 1, 2, 4 only).
    pub(crate) fn embed_real(&self, coords: &[f64]) -> DMatrix<f64> {
        let d = self.family.scalar_dim();
        assert!(d <= 4, "no real matrix embedding for octonions");
        let m = self.reconstitute(coords);
        let n = self.n;
        let mut out = DMatrix::zeros(n * d, n * d);
        for i in 0..n {
            for j in 0..n {
                let block = left_mult_block(m.get(i, j));
                for (r, row) in block.iter().enumerate().take(d) {
                    for (c, val) in row.iter().enumerate().take(d) {
                        out[(i * d + r, j * d + c)] = *val;
                    }
                }
            }
        }
        out
    }

    /// Jordan spectrum of the coordinate slice.
    pub(crate) fn eigenvalues(&self, coords: &[f64]) -> Vec<f64> {
        match self.family {
            Family::Spin => {
                let a = self.spin_ambient(coords);
                let t = a[0];
                let xn = a[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                vec![t - xn, t + xn]
            }
            Family::Albert => {
                let (t1, t2, det) = self.albert_invariants(coords);
                let sigma = 0.5 * (t1 * t1 - t2);
                cubic_roots(t1, sigma, det)
            }
            _ => {
                let d = self.family.scalar_dim();
                let emb = self.embed_real(coords);
                let mut eigs: Vec<f64> =
                    emb.symmetric_eigen().eigenvalues.iter().copied().collect();
                eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                // each Jordan eigenvalue appears d times in the embedding
                eigs.into_iter().step_by(d).collect()
            }
        }
    }

    /// (tr x, tr x², det x) for an Albert element.
    fn albert_invariants(&self, coords: &[f64]) -> (f64, f64, f64) {
        let t1: f64 = coords[0] + coords[1] + coords[2];
        let t2: f64 = coords.iter().map(|c| c * c).sum();
        (t1, t2, self.determinant(coords))
    }

    /// Leading principal minors of an Albert element: (Δ1, Δ2, Δ3).
    pub(crate) fn albert_minors(&self, coords: &[f64]) -> (f64, f64, f64) {
        let a = coords[0];
        let b = coords[1];
        let n01: f64 = coords[3..11].iter().map(|v| v * v / 2.0).sum();
        (a, a * b - n01, albert_determinant(coords))
    }

    pub(crate) fn determinant(&self, coords: &[f64]) -> f64 {
        match self.family {
            Family::SymR => self.embed_real(coords).determinant(),
            Family::HermC | Family::HermH => {
                let d = self.family.scalar_dim();
                let emb = self.embed_real(coords);
                let mut eigs: Vec<f64> =
                    emb.symmetric_eigen().eigenvalues.iter().copied().collect();
                eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                eigs.into_iter().step_by(d).product()
            }
            Family::Albert => albert_determinant(coords),
            Family::Spin => {
                let a = self.spin_ambient(coords);
                a[0] * a[0] - a[1..].iter().map(|v| v * v).sum::<f64>()
            }
        }
    }

    fn identity_coords(&self) -> Vec<f64> {
        let mut coords = vec![0.0; self.dim];
        match self.family {
            Family::Spin => coords[0] = SQRT_2,
            _ => {
                for c in coords.iter_mut().take(self.n) {
                    *c = 1.0;
                }
            }
        }
        coords
    }

    fn product(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        match self.family {
            Family::Spin => {
                // (t, x̄)∘(s, ȳ) = (ts + x̄·ȳ, tȳ + sx̄)
                let a = self.spin_ambient(x);
                let b = self.spin_ambient(y);
                let mut out = vec![0.0; self.dim];
                out[0] = a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(p, q)| p * q).sum::<f64>();
                for k in 1..self.dim {
                    out[k] = a[0] * b[k] + b[0] * a[k];
                }
                out.iter().map(|v| v * SQRT_2).collect()
            }
            _ => {
                let mx = self.reconstitute(x);
                let my = self.reconstitute(y);
                let sym = mx.mul(&my).add(&my.mul(&mx)).scale(0.5).hermitize();
                self.coords_of(&sym)
            }
        }
    }

    fn trace_form(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.family {
            Family::Spin => {
                // 2(ts + x̄·ȳ); equals the coordinate dot product after the
                // 1/sqrt(2) basis normalization.
                let a = self.spin_ambient(x);
                let b = self.spin_ambient(y);
                2.0 * a.iter().zip(&b).map(|(p, q)| p * q).sum::<f64>()
            }
            _ => {
                let mx = self.reconstitute(x);
                let my = self.reconstitute(y);
                mx.re_trace_product(&my)
            }
        }
    }
}

/// d×d real matrix of left multiplication by a scalar of dimension d <= 4.
fn left_mult_block(q: &DivisionScalar) -> [[f64; 4]; 4] {
    let a = q.coord(0);
    let b = q.coord(1);
    let c = q.coord(2);
    let d = q.coord(3);
    [
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ]
}

fn matrix_basis(family: Family, n: usize) -> Vec<KMatrix> {
    let sdim = family.scalar_dim();
    let mut basis = Vec::new();
    for i in 0..n {
        let mut m = KMatrix::zero(n, sdim);
        m.set(i, i, DivisionScalar::one(sdim));
        basis.push(m);
    }
    let inv_sqrt2 = 1.0 / SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            for u in 0..sdim {
                let unit = DivisionScalar::basis_unit(sdim, u);
                let mut m = KMatrix::zero(n, sdim);
                m.set(i, j, unit.scale(inv_sqrt2));
                m.set(j, i, unit.conj().scale(inv_sqrt2));
                basis.push(m);
            }
        }
    }
    basis
}

/// Freudenthal cubic determinant of an Albert element, read off the
/// orthonormal coordinates: diagonal (a, b, c), off-diagonal octonions at
/// slots (0,1), (0,2), (1,2) scaled by 1/sqrt(2).
fn albert_determinant(coords: &[f64]) -> f64 {
    let (a, b, c) = (coords[0], coords[1], coords[2]);
    let oct = |s: &[f64]| {
        let scaled: Vec<f64> = s.iter().map(|v| v / SQRT_2).collect();
        DivisionScalar::new(8, &scaled).unwrap()
    };
    let o01 = oct(&coords[3..11]);
    let o02 = oct(&coords[11..19]);
    let o12 = oct(&coords[19..27]);
    // layout [[a, x̄, y], [x, b, z̄], [ȳ, z, c]] with x = ō01, y = o02, z = ō12
    let x = o01.conj();
    let y = o02;
    let z = o12.conj();
    a * b * c - a * z.norm_sq() - b * y.norm_sq() - c * x.norm_sq()
        + 2.0 * x.mul_unchecked(&y.mul_unchecked(&z)).real_part()
}

/// Real roots of λ³ − t1 λ² + σ λ − d (all real for Jordan spectra), ascending.
pub(crate) fn cubic_roots(t1: f64, sigma: f64, d: f64) -> Vec<f64> {
    // depressed form: λ = μ + t1/3, μ³ + p μ + q = 0
    let p = sigma - t1 * t1 / 3.0;
    let q = -d + t1 * sigma / 3.0 - 2.0 * t1 * t1 * t1 / 27.0;
    let shift = t1 / 3.0;
    if p.abs() < 1e-300 {
        let r = (-q).cbrt();
        return vec![r + shift; 3];
    }
    let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots: Vec<f64> = (0..3)
        .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// A Euclidean Jordan algebra: a list of irreducible parts with coordinate
/// windows. Irreducible algebras have a single part.
#[derive(Debug)]
pub struct JordanAlgebra {
    parts: Vec<Part>,
    dim: usize,
    rank: usize,
}

impl JordanAlgebra {
    pub fn new(family: Family, n: usize) -> Result<AlgebraRef> {
        let part = Part::new(family, n, 0)?;
        let (dim, rank) = (part.dim, part.rank);
        Ok(Arc::new(Self {
            parts: vec![part],
            dim,
            rank,
        }))
    }

    /// Concatenation of coordinates, products, traces, determinants and ranks.
    pub fn direct_sum(a: &AlgebraRef, b: &AlgebraRef) -> AlgebraRef {
        let mut parts = Vec::new();
        let mut offset = 0;
        for p in a.parts.iter().chain(b.parts.iter()) {
            let mut q = p.clone();
            q.offset = offset;
            offset += q.dim;
            parts.push(q);
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        let rank = parts.iter().map(|p| p.rank).sum();
        Arc::new(Self { parts, dim, rank })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn is_irreducible(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn label(&self) -> String {
        self.parts
            .iter()
            .map(|p| match p.family {
                Family::Albert => "albert".to_string(),
                f => format!("{}:{}", f.tag(), p.n),
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    pub(crate) fn structurally_eq(&self, other: &Self) -> bool {
        self.parts.len() == other.parts.len()
            && self
                .parts
                .iter()
                .zip(&other.parts)
                .all(|(a, b)| a.family == b.family && a.n == b.n)
    }

    pub fn element(self: &Arc<Self>, coords: Vec<f64>) -> Result<JordanElement> {
        if coords.len() != self.dim {
            return Err(Error::BadCoordinateLength {
                got: coords.len(),
                want: self.dim,
            });
        }
        Ok(JordanElement {
            algebra: Arc::clone(self),
            coords,
        })
    }

    pub fn zero(self: &Arc<Self>) -> JordanElement {
        JordanElement {
            algebra: Arc::clone(self),
            coords: vec![0.0; self.dim],
        }
    }

    /// The Jordan unit.
    pub fn identity(self: &Arc<Self>) -> JordanElement {
        let mut coords = vec![0.0; self.dim];
        for p in &self.parts {
            coords[p.offset..p.offset + p.dim].copy_from_slice(&p.identity_coords());
        }
        JordanElement {
            algebra: Arc::clone(self),
            coords,
        }
    }

    /// The i-th orthonormal basis element.
    pub fn basis_element(self: &Arc<Self>, i: usize) -> JordanElement {
        let mut coords = vec![0.0; self.dim];
        coords[i] = 1.0;
        JordanElement {
            algebra: Arc::clone(self),
            coords,
        }
    }

    /// Coordinates i.i.d. standard normal in the orthonormal basis.
    pub fn random_element<R: Rng>(self: &Arc<Self>, rng: &mut R) -> JordanElement {
        let coords = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
        JordanElement {
            algebra: Arc::clone(self),
            coords,
        }
    }

    fn check_member(&self, x: &JordanElement) -> Result<()> {
        if Arc::as_ptr(&x.algebra) == self as *const _ || self.structurally_eq(&x.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// Jordan product x ∘ y.
    pub fn product(
        self: &Arc<Self>,
        x: &JordanElement,
        y: &JordanElement,
    ) -> Result<JordanElement> {
        self.check_member(x)?;
        self.check_member(y)?;
        let mut coords = vec![0.0; self.dim];
        for p in &self.parts {
            let r = p.product(
                &x.coords[p.offset..p.offset + p.dim],
                &y.coords[p.offset..p.offset + p.dim],
            );
            coords[p.offset..p.offset + p.dim].copy_from_slice(&r);
        }
        Ok(JordanElement {
            algebra: Arc::clone(self),
            coords,
        })
    }

    /// Trace form ⟨x, y⟩ = Re Tr(xy) (matrix families), 2(ts + x̄·ȳ) (spin),
    /// summed over parts.
    pub fn trace_form(&self, x: &JordanElement, y: &JordanElement) -> Result<f64> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self
            .parts
            .iter()
            .map(|p| {
                p.trace_form(
                    &x.coords[p.offset..p.offset + p.dim],
                    &y.coords[p.offset..p.offset + p.dim],
                )
            })
            .sum())
    }

    /// Determinant; degree-r homogeneous, product over parts.
    pub fn determinant(&self, x: &JordanElement) -> f64 {
        self.parts
            .iter()
            .map(|p| p.determinant(&x.coords[p.offset..p.offset + p.dim]))
            .product()
    }

    /// Jordan spectrum, ascending per part then concatenated.
    pub fn eigenvalues(&self, x: &JordanElement) -> Vec<f64> {
        self.parts
            .iter()
            .flat_map(|p| p.eigenvalues(&x.coords[p.offset..p.offset + p.dim]))
            .collect()
    }

    /// Left-iterated power x^(m+1) = x ∘ x^m, m >= 1.
    pub fn power(self: &Arc<Self>, x: &JordanElement, m: usize) -> Result<JordanElement> {
        assert!(m >= 1, "power requires m >= 1");
        let mut acc = x.clone();
        for _ in 1..m {
            acc = self.product(x, &acc)?;
        }
        Ok(acc)
    }
}

/// Element of a Jordan algebra: coefficients in the orthonormal basis.
#[derive(Debug, Clone)]
pub struct JordanElement {
    algebra: AlgebraRef,
    coords: Vec<f64>,
}

impl JordanElement {
    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            algebra: Arc::clone(&self.algebra),
            coords,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            algebra: Arc::clone(&self.algebra),
            coords,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs_coord(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
