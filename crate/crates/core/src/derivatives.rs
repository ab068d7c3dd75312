//! Mixed directional derivatives of the potential up to order 4 by independent
//! routes, and assembly of the metric, C-tensor and Q-tensor in a chart.
//!
//! Route 1 (the workhorse): truncated Taylor jets of Φ composed per family —
//! log of a Gaussian-eliminated determinant over jet entries for the matrix
//! families (through their real symmetric embedding), log of the Lorentz
//! quadratic for spin factors, log of the Freudenthal cubic with
//! octonion-of-jet entries for the Albert algebra.
//!
//! Route 2: closed-form log-det derivative formulas built from matrix inverse
//! chains (matrix families) or from the quadratic form (spin factors).
//!
//! Route 3: central finite differences, optionally Richardson-extrapolated;
//! this is also the independent high-order route for the Albert algebra, where
//! no matrix-inverse formula is assumed over the octonions.

use crate::cone::{contains, kv_potential, ConePoint, PotentialSpec};
use crate::division::{octonion_table, TableEntry};
use crate::error::{Error, Result};
use crate::jordan::{Family, JordanElement, Part, SQRT_2};
use crate::taylor::Taylor4;
use nalgebra::DMatrix;

/// Charts whose metric condition number exceeds this are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Affine frame: an interior base point plus tangent directions, in which
/// derivatives of the potential are taken.
#[derive(Debug, Clone)]
pub struct Chart {
    base: ConePoint,
    dirs: Vec<JordanElement>,
}

impl Chart {
    pub fn new(base: ConePoint, dirs: Vec<JordanElement>) -> Result<Self> {
        let alg = base.element().algebra();
        if dirs.is_empty() || dirs.len() > alg.dim() {
            return Err(Error::DegenerateChart(0.0));
        }
        let m = dirs.len();
        let mut gram = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                gram[(i, j)] = alg.trace_form(&dirs[i], &dirs[j])?;
            }
        }
        let det = gram.determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::DegenerateChart(det));
        }
        Ok(Self { base, dirs })
    }

    /// Full ambient chart: directions are the orthonormal basis elements.
    pub fn ambient(base: ConePoint) -> Self {
        let alg = base.element().algebra().clone();
        let dirs = (0..alg.dim()).map(|i| alg.basis_element(i)).collect();
        Self { base, dirs }
    }

    pub fn base(&self) -> &ConePoint {
        &self.base
    }

    pub fn dirs(&self) -> &[JordanElement] {
        &self.dirs
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }
}

/// Value and mixed partials of Φ along up to four directions.
#[derive(Debug, Clone)]
pub struct Jet {
    order: usize,
    ndirs: usize,
    taylor: Taylor4,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.taylor.value()
    }

    /// Mixed partial with the given multiplicity per direction.
    pub fn partial(&self, exponents: &[u8; 4]) -> f64 {
        self.taylor.partial(exponents)
    }

    /// Mixed partial along a list of direction indices (repeats allowed).
    pub fn mixed(&self, dir_indices: &[usize]) -> f64 {
        let mut exps = [0u8; 4];
        for &i in dir_indices {
            assert!(i < self.ndirs);
            exps[i] += 1;
        }
        self.taylor.partial(&exps)
    }
}

/// Taylor expansion of Φ(base + Σ t_a d_a) truncated at `order`.
fn potential_taylor(
    spec: &PotentialSpec,
    base: &JordanElement,
    dirs: &[&JordanElement],
    order: usize,
) -> Result<Taylor4> {
    if order < 1 || order > 4 {
        return Err(Error::BadOrder(order));
    }
    assert!(dirs.len() <= 4, "at most 4 expansion directions");
    let alg = spec.algebra();
    let mut total = Taylor4::constant(spec.constant, order);
    for part in alg.parts() {
        let window = part.offset..part.offset + part.dim;
        let base_slice = &base.coords()[window.clone()];
        let dir_slices: Vec<&[f64]> = dirs.iter().map(|d| &d.coords()[window.clone()]).collect();
        let log_det = match part.family {
            Family::Spin => spin_logdet_taylor(part, base_slice, &dir_slices, order)?,
            Family::Albert => albert_logdet_taylor(base_slice, &dir_slices, order)?,
            _ => {
                let d = part.family.scalar_dim() as f64;
                embedded_logdet_taylor(part, base_slice, &dir_slices, order)?.scale(1.0 / d)
            }
        };
        total = total.add(&log_det.scale(-spec.exponent));
    }
    Ok(total)
}

fn embedded_logdet_taylor(
    part: &Part,
    base: &[f64],
    dirs: &[&[f64]],
    order: usize,
) -> Result<Taylor4> {
    let eb = part.embed_real(base);
    let eds: Vec<DMatrix<f64>> = dirs.iter().map(|d| part.embed_real(d)).collect();
    let n = eb.nrows();
    let mut m: Vec<Vec<Taylor4>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let lin: Vec<f64> = eds.iter().map(|e| e[(r, c)]).collect();
                    Taylor4::affine(eb[(r, c)], &lin, order)
                })
                .collect()
        })
        .collect();
    det_taylor(&mut m)?.ln()
}

/// Determinant by Gaussian elimination with pivoting on the constant part.
fn det_taylor(m: &mut [Vec<Taylor4>]) -> Result<Taylor4> {
    let n = m.len();
    let order = m[0][0].order();
    let mut det = Taylor4::constant(1.0, order);
    let mut sign = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .value()
                    .abs()
                    .partial_cmp(&m[b][col].value().abs())
                    .unwrap()
            })
            .unwrap();
        if m[pivot_row][col].value().abs() < 1e-300 {
            return Err(Error::LeftInterior);
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            sign = -sign;
        }
        let inv = m[col][col].recip()?;
        for row in col + 1..n {
            let factor = m[row][col].mul(&inv);
            for k in col..n {
                let t = factor.mul(&m[col][k]);
                m[row][k] = m[row][k].sub(&t);
            }
        }
        det = det.mul(&m[col][col]);
    }
    Ok(det.scale(sign))
}

fn spin_logdet_taylor(
    part: &Part,
    base: &[f64],
    dirs: &[&[f64]],
    order: usize,
) -> Result<Taylor4> {
    let ab = part.spin_ambient(base);
    let ads: Vec<Vec<f64>> = dirs.iter().map(|d| part.spin_ambient(d)).collect();
    let coord = |k: usize| {
        let lin: Vec<f64> = ads.iter().map(|a| a[k]).collect();
        Taylor4::affine(ab[k], &lin, order)
    };
    let t = coord(0);
    let mut q = t.mul(&t);
    for k in 1..part.dim {
        let x = coord(k);
        q = q.sub(&x.mul(&x));
    }
    q.ln()
}

/// Octonion with truncated-Taylor coordinates; multiplies through the basis
/// table derived from the Cayley–Dickson recursion.
#[derive(Clone)]
struct OctTaylor {
    c: [Taylor4; 8],
}

impl OctTaylor {
    fn from_affine(base: &[f64], dirs: &[&[f64]], offset: usize, scale: f64, order: usize) -> Self {
        let c = std::array::from_fn(|u| {
            let lin: Vec<f64> = dirs.iter().map(|d| d[offset + u] * scale).collect();
            Taylor4::affine(base[offset + u] * scale, &lin, order)
        });
        Self { c }
    }

    fn conj(&self) -> Self {
        let c = std::array::from_fn(|u| if u == 0 { self.c[0] } else { self.c[u].neg() });
        Self { c }
    }

    fn mul(&self, other: &Self) -> Self {
        let order = self.c[0].order();
        let table: &[[TableEntry; 8]; 8] = octonion_table();
        let mut out: [Taylor4; 8] = std::array::from_fn(|_| Taylor4::constant(0.0, order));
        for i in 0..8 {
            for j in 0..8 {
                let e = table[i][j];
                let p = self.c[i].mul(&other.c[j]);
                out[e.index] = if e.sign > 0.0 {
                    out[e.index].add(&p)
                } else {
                    out[e.index].sub(&p)
                };
            }
        }
        Self { c: out }
    }

    fn norm_sq(&self) -> Taylor4 {
        let mut acc = self.c[0].mul(&self.c[0]);
        for u in 1..8 {
            acc = acc.add(&self.c[u].mul(&self.c[u]));
        }
        acc
    }

    fn real_part(&self) -> Taylor4 {
        self.c[0]
    }
}

fn albert_logdet_taylor(base: &[f64], dirs: &[&[f64]], order: usize) -> Result<Taylor4> {
    let diag = |k: usize| {
        let lin: Vec<f64> = dirs.iter().map(|d| d[k]).collect();
        Taylor4::affine(base[k], &lin, order)
    };
    let (a, b, c) = (diag(0), diag(1), diag(2));
    let inv_sqrt2 = 1.0 / SQRT_2;
    let o01 = OctTaylor::from_affine(base, dirs, 3, inv_sqrt2, order);
    let o02 = OctTaylor::from_affine(base, dirs, 11, inv_sqrt2, order);
    let o12 = OctTaylor::from_affine(base, dirs, 19, inv_sqrt2, order);
    // layout [[a, x̄, y], [x, b, z̄], [ȳ, z, c]]: x = ō01, y = o02, z = ō12
    let x = o01.conj();
    let y = o02;
    let z = o12.conj();
    let det = a
        .mul(&b)
        .mul(&c)
        .sub(&a.mul(&z.norm_sq()))
        .sub(&b.mul(&y.norm_sq()))
        .sub(&c.mul(&x.norm_sq()))
        .add(&x.mul(&y.mul(&z)).real_part().scale(2.0));
    det.ln()
}

/// Mixed-derivative jet of Φ at an interior point along the given directions.
pub fn directional_jet(
    spec: &PotentialSpec,
    base: &ConePoint,
    dirs: &[&JordanElement],
    order: usize,
) -> Result<Jet> {
    let taylor = potential_taylor(spec, base.element(), dirs, order)?;
    Ok(Jet {
        order,
        ndirs: dirs.len(),
        taylor,
    })
}

/// Closed-form mixed derivative of Φ along `dirs` (one direction per order).
///
/// Matrix families use inverse chains in the real symmetric embedding; spin
/// factors use the symbolic derivatives of −k·log(t² − |x̄|²). The octonionic
/// family has no such formula and is served by [`finite_difference_partial`].
pub fn logdet_oracle(
    spec: &PotentialSpec,
    x: &ConePoint,
    dirs: &[&JordanElement],
    order: usize,
) -> Result<f64> {
    if order < 1 || order > 4 {
        return Err(Error::BadOrder(order));
    }
    assert_eq!(dirs.len(), order, "one direction per derivative order");
    let alg = spec.algebra();
    let mut total = 0.0;
    for part in alg.parts() {
        let window = part.offset..part.offset + part.dim;
        let base_slice = &x.element().coords()[window.clone()];
        let dir_slices: Vec<&[f64]> = dirs.iter().map(|d| &d.coords()[window.clone()]).collect();
        total += match part.family {
            Family::Albert => {
                return Err(Error::UnsupportedOracle("albert".into()));
            }
            Family::Spin => spin_oracle(part, base_slice, &dir_slices, spec.exponent),
            _ => matrix_oracle(part, base_slice, &dir_slices, spec.exponent)?,
        };
    }
    Ok(total)
}

fn matrix_oracle(part: &Part, base: &[f64], dirs: &[&[f64]], k: f64) -> Result<f64> {
    let keff = k / part.family.scalar_dim() as f64;
    let xe = part.embed_real(base);
    let xi = xe
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    let chains: Vec<DMatrix<f64>> = dirs.iter().map(|d| &xi * part.embed_real(d)).collect();
    let trace = |ms: &[&DMatrix<f64>]| -> f64 {
        let mut acc = ms[0].clone();
        for m in &ms[1..] {
            acc = &acc * *m;
        }
        acc.trace()
    };
    Ok(match dirs.len() {
        1 => -keff * chains[0].trace(),
        2 => keff * trace(&[&chains[0], &chains[1]]),
        3 => {
            -keff
                * (trace(&[&chains[0], &chains[1], &chains[2]])
                    + trace(&[&chains[0], &chains[2], &chains[1]]))
        }
        4 => {
            let perms: [[usize; 3]; 6] = [
                [1, 2, 3],
                [1, 3, 2],
                [2, 1, 3],
                [2, 3, 1],
                [3, 1, 2],
                [3, 2, 1],
            ];
            keff
                * perms
                    .iter()
                    .map(|p| trace(&[&chains[0], &chains[p[0]], &chains[p[1]], &chains[p[2]]]))
                    .sum::<f64>()
        }
        _ => unreachable!(),
    })
}

fn spin_oracle(part: &Part, base: &[f64], dirs: &[&[f64]], k: f64) -> f64 {
    let amb = part.spin_ambient(base);
    let ads: Vec<Vec<f64>> = dirs.iter().map(|d| part.spin_ambient(d)).collect();
    let lorentz = |a: &[f64], b: &[f64]| -> f64 {
        a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(p, q)| p * q).sum::<f64>()
    };
    let s = lorentz(&amb, &amb);
    let qa: Vec<f64> = ads.iter().map(|d| 2.0 * lorentz(&amb, d)).collect();
    let qab = |i: usize, j: usize| 2.0 * lorentz(&ads[i], &ads[j]);
    let log_part = match dirs.len() {
        1 => qa[0] / s,
        2 => qab(0, 1) / s - qa[0] * qa[1] / (s * s),
        3 => {
            -(qab(0, 1) * qa[2] + qab(0, 2) * qa[1] + qab(1, 2) * qa[0]) / (s * s)
                + 2.0 * qa[0] * qa[1] * qa[2] / (s * s * s)
        }
        4 => {
            let s2 = s * s;
            let s3 = s2 * s;
            let s4 = s3 * s;
            -(qab(0, 1) * qab(2, 3) + qab(0, 2) * qab(1, 3) + qab(0, 3) * qab(1, 2)) / s2
                + 2.0
                    * (qab(0, 1) * qa[2] * qa[3]
                        + qab(0, 2) * qa[1] * qa[3]
                        + qab(0, 3) * qa[1] * qa[2]
                        + qab(1, 2) * qa[0] * qa[3]
                        + qab(1, 3) * qa[0] * qa[2]
                        + qab(2, 3) * qa[0] * qa[1])
                    / s3
                - 6.0 * qa[0] * qa[1] * qa[2] * qa[3] / s4
        }
        _ => unreachable!(),
    };
    -k * log_part
}

/// Central-difference mixed partial of Φ along `dirs`, tensor-product stencil,
/// optionally Richardson-extrapolated from steps h and h/2.
pub fn finite_difference_partial(
    spec: &PotentialSpec,
    x: &ConePoint,
    dirs: &[&JordanElement],
    order: usize,
    h: f64,
    richardson: bool,
) -> Result<f64> {
    if order < 1 || order > 4 {
        return Err(Error::BadOrder(order));
    }
    assert_eq!(dirs.len(), order);
    let stencil = |step: f64| -> Result<f64> {
        let mut acc = 0.0;
        for mask in 0..(1usize << order) {
            let mut p = x.element().clone();
            let mut parity = 1.0;
            for (i, d) in dirs.iter().enumerate() {
                let s = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
                parity *= s;
                p = p.add(&d.scale(s * step));
            }
            if !contains(&p) {
                return Err(Error::LeftInterior);
            }
            acc += parity * kv_potential(spec, &p)?;
        }
        Ok(acc / (2.0 * step).powi(order as i32))
    };
    let d_h = stencil(h)?;
    if !richardson {
        return Ok(d_h);
    }
    let d_h2 = stencil(h / 2.0)?;
    Ok((4.0 * d_h2 - d_h) / 3.0)
}

/// Hessian of the potential in chart directions, with inverse and condition
/// number.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    pub m: usize,
    pub g: DMatrix<f64>,
    pub inv: DMatrix<f64>,
    pub cond: f64,
}

impl MetricTensor {
    pub fn min_eigenvalue(&self) -> f64 {
        self.g
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn from_matrix(g: DMatrix<f64>) -> Result<Self> {
        let m = g.nrows();
        let eigs = g.clone().symmetric_eigen().eigenvalues;
        let max_abs = eigs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let min_abs = eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
        let cond = if min_abs == 0.0 {
            f64::INFINITY
        } else {
            max_abs / min_abs
        };
        if cond > CONDITION_LIMIT {
            return Err(Error::IllConditioned(cond));
        }
        let inv = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
        Ok(Self { m, g, inv, cond })
    }
}

/// Totally symmetric rank-3 tensor of third partials.
#[derive(Debug, Clone)]
pub struct CTensor {
    pub m: usize,
    vals: Vec<f64>,
}

impl CTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.vals[(i * self.m + j) * self.m + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn from_vals(m: usize, vals: Vec<f64>) -> Self {
        assert_eq!(vals.len(), m * m * m);
        Self { m, vals }
    }
}

/// Totally symmetric rank-4 tensor of fourth partials.
#[derive(Debug, Clone)]
pub struct QTensor {
    pub m: usize,
    vals: Vec<f64>,
}

impl QTensor {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.vals[((i * self.m + j) * self.m + k) * self.m + l]
    }
}

/// One jet evaluation for a multiset of chart directions.
fn multiset_partial(
    spec: &PotentialSpec,
    chart: &Chart,
    indices: &[usize],
) -> Result<f64> {
    let mut distinct: Vec<usize> = Vec::with_capacity(4);
    let mut exps = [0u8; 4];
    for &i in indices {
        match distinct.iter().position(|&d| d == i) {
            Some(pos) => exps[pos] += 1,
            None => {
                exps[distinct.len()] += 1;
                distinct.push(i);
            }
        }
    }
    let dirs: Vec<&JordanElement> = distinct.iter().map(|&i| &chart.dirs()[i]).collect();
    let taylor = potential_taylor(spec, chart.base().element(), &dirs, indices.len())?;
    Ok(taylor.partial(&exps))
}

/// g_ij = ∂_i∂_j Φ at the chart base.
pub fn metric(spec: &PotentialSpec, chart: &Chart) -> Result<MetricTensor> {
    let m = chart.dim();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = multiset_partial(spec, chart, &[i, j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let eigs = g.clone().symmetric_eigen().eigenvalues;
    let max_abs = eigs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let min_abs = eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    let cond = if min_abs == 0.0 {
        f64::INFINITY
    } else {
        max_abs / min_abs
    };
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }
    let inv = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
    Ok(MetricTensor { m, g, inv, cond })
}

/// C_ijk = ∂_i∂_j∂_k Φ at the chart base.
pub fn c_tensor(spec: &PotentialSpec, chart: &Chart) -> Result<CTensor> {
    let m = chart.dim();
    let mut vals = vec![0.0; m * m * m];
    for i in 0..m {
        for j in i..m {
            for k in j..m {
                let v = multiset_partial(spec, chart, &[i, j, k])?;
                for (a, b, c) in [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ] {
                    vals[(a * m + b) * m + c] = v;
                }
            }
        }
    }
    Ok(CTensor { m, vals })
}

/// Q_ijkl = ∂_i∂_j∂_k∂_l Φ at the chart base.
pub fn q_tensor(spec: &PotentialSpec, chart: &Chart) -> Result<QTensor> {
    let m = chart.dim();
    let mut vals = vec![0.0; m * m * m * m];
    let mut idx = [0usize; 4];
    for i in 0..m {
        for j in i..m {
            for k in j..m {
                for l in k..m {
                    let v = multiset_partial(spec, chart, &[i, j, k, l])?;
                    idx[0] = i;
                    idx[1] = j;
                    idx[2] = k;
                    idx[3] = l;
                    write_sym4(&mut vals, m, &idx, v);
                }
            }
        }
    }
    Ok(QTensor { m, vals })
}

fn write_sym4(vals: &mut [f64], m: usize, idx: &[usize; 4], v: f64) {
    let mut perm = *idx;
    permutations4(&mut perm, 0, vals, m, v);
}

fn permutations4(perm: &mut [usize; 4], k: usize, vals: &mut [f64], m: usize, v: f64) {
    if k == 4 {
        let pos = ((perm[0] * m + perm[1]) * m + perm[2]) * m + perm[3];
        vals[pos] = v;
        return;
    }
    for i in k..4 {
        perm.swap(k, i);
        permutations4(perm, k + 1, vals, m, v);
        perm.swap(k, i);
    }
}

/// det(g(x))·exp(−2Φ(x)) in the full ambient chart — constant on the cone by
/// homogeneity and transitivity of the automorphism group.
pub fn monge_ampere_invariant(spec: &PotentialSpec, x: &ConePoint) -> Result<f64> {
    let chart = Chart::ambient(x.clone());
    let g = metric(spec, &chart)?;
    let phi = kv_potential(spec, x.element())?;
    Ok(g.g.determinant() * (-2.0 * phi).exp())
}
