//! Structure constants from (g, C), the induced ∘ product, and residual
//! evaluators for associativity/WDVV, Frobenius compatibility, the unit axiom,
//! and pencil flatness.
//!
//! Residuals are normalized by (1 + magnitude of the compared terms) so they
//! are comparable across families with different potential scalings. The sign
//! and ½ convention flags (σ, κ) rescale the product but never change any
//! zero/nonzero verdict.

use crate::cone::PotentialSpec;
use crate::derivatives::{c_tensor, metric, q_tensor, CTensor, Chart, MetricTensor, QTensor};
use crate::error::{Error, Result};
use crate::jordan::AlgebraRef;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Connection-algebra structure constants Γ^i_jk = σ·κ·Σ_l C_jkl g^li.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    pub m: usize,
    pub sigma: f64,
    pub kappa: f64,
    gamma: Vec<f64>,
}

impl StructureConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.m + j) * self.m + k]
    }
}

pub fn structure_constants(
    g: &MetricTensor,
    c: &CTensor,
    sigma: f64,
    kappa: f64,
) -> Result<StructureConstants> {
    if g.m != c.m {
        return Err(Error::Config("metric and C-tensor dimensions differ".into()));
    }
    let m = g.m;
    let mut gamma = vec![0.0; m * m * m];
    for j in 0..m {
        for k in 0..m {
            for i in 0..m {
                let mut acc = 0.0;
                for l in 0..m {
                    acc += c.get(j, k, l) * g.inv[(l, i)];
                }
                gamma[(i * m + j) * m + k] = sigma * kappa * acc;
            }
        }
    }
    Ok(StructureConstants {
        m,
        sigma,
        kappa,
        gamma,
    })
}

/// (X∘Y)^i = Σ_jk Γ^i_jk X^j Y^k in the chart frame.
pub fn circ(sc: &StructureConstants, x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = sc.m;
    let mut out = vec![0.0; m];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..m {
            for k in 0..m {
                acc += sc.get(i, j, k) * x[j] * y[k];
            }
        }
        *o = acc;
    }
    out
}

/// Normalized associativity defect: max over (a,b,c,d) of
/// |Σ C_abe g^ef C_fcd − Σ C_bce g^ef C_fad| / (1 + max |sides|).
pub fn wdvv_residual(g: &MetricTensor, c: &CTensor) -> f64 {
    let m = g.m;
    // P[f][a][b] = Σ_e C_abe g^ef
    let mut p = vec![0.0; m * m * m];
    for a in 0..m {
        for b in 0..m {
            for f in 0..m {
                let mut acc = 0.0;
                for e in 0..m {
                    acc += c.get(a, b, e) * g.inv[(e, f)];
                }
                p[(f * m + a) * m + b] = acc;
            }
        }
    }
    let pget = |f: usize, a: usize, b: usize| p[(f * m + a) * m + b];
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                for d in 0..m {
                    let mut lhs = 0.0;
                    let mut rhs = 0.0;
                    for f in 0..m {
                        lhs += pget(f, a, b) * c.get(f, cc, d);
                        rhs += pget(f, b, cc) * c.get(f, a, d);
                    }
                    let r = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
                    worst = worst.max(r);
                }
            }
        }
    }
    worst
}

/// Max defect of g(e_a∘e_b, e_c) against σκ·C_abc and against
/// g(e_a, e_b∘e_c), normalized.
pub fn frobenius_compat_residual(
    g: &MetricTensor,
    sc: &StructureConstants,
    c: &CTensor,
) -> f64 {
    let m = g.m;
    let factor = sc.sigma * sc.kappa;
    let pairing = |a: usize, b: usize, cc: usize| -> f64 {
        // g(e_a ∘ e_b, e_c)
        let mut acc = 0.0;
        for i in 0..m {
            acc += sc.get(i, a, b) * g.g[(i, cc)];
        }
        acc
    };
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                let v1 = pairing(a, b, cc);
                let target = factor * c.get(a, b, cc);
                let r1 = (v1 - target).abs() / (1.0 + v1.abs().max(target.abs()));
                let v2 = pairing(b, cc, a);
                let r2 = (v1 - v2).abs() / (1.0 + v1.abs().max(v2.abs()));
                worst = worst.max(r1).max(r2);
            }
        }
    }
    worst
}

/// Max over (a,b) of |Σ_i e^i C_iab − g_ab|, normalized: does the candidate
/// field act as a ∘-unit through the raw C-contraction.
pub fn unit_residual(g: &MetricTensor, c: &CTensor, e_components: &[f64]) -> f64 {
    let m = g.m;
    assert_eq!(e_components.len(), m);
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            for (i, e) in e_components.iter().enumerate() {
                acc += e * c.get(i, a, b);
            }
            let target = g.g[(a, b)];
            let r = (acc - target).abs() / (1.0 + acc.abs().max(target.abs()));
            worst = worst.max(r);
        }
    }
    worst
}

/// Least-squares solution of e^i C_iab = g_ab over the chart frame, with its
/// normalized residual.
pub fn solve_unit_field(g: &MetricTensor, c: &CTensor) -> (Vec<f64>, f64) {
    let m = g.m;
    let rows = m * (m + 1) / 2;
    let mut a_mat = DMatrix::zeros(rows, m);
    let mut rhs = DVector::zeros(rows);
    let mut row = 0;
    for a in 0..m {
        for b in a..m {
            for i in 0..m {
                a_mat[(row, i)] = c.get(i, a, b);
            }
            rhs[row] = g.g[(a, b)];
            row += 1;
        }
    }
    let sol = a_mat
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(m));
    let e: Vec<f64> = sol.iter().copied().collect();
    let res = unit_residual(g, c, &e);
    (e, res)
}

/// Curvature data of the pencil ∇_λ = ∇₀ + λΓ in an affine chart:
/// R(λ)^i_jkl = λ·A^i_jkl + λ²·B^i_jkl with
/// A = ∂_k Γ^i_lj − ∂_l Γ^i_kj (assembled from Q, C and g) and
/// B = Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj.
#[derive(Debug, Clone)]
pub struct PencilData {
    m: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PencilData {
    pub fn new(
        spec: &PotentialSpec,
        chart: &Chart,
        sigma: f64,
        kappa: f64,
    ) -> Result<Self> {
        let g = metric(spec, chart)?;
        let c = c_tensor(spec, chart)?;
        let q = q_tensor(spec, chart)?;
        Ok(Self::from_tensors(&g, &c, &q, sigma, kappa))
    }

    pub fn from_tensors(
        g: &MetricTensor,
        c: &CTensor,
        q: &QTensor,
        sigma: f64,
        kappa: f64,
    ) -> Self {
        let m = g.m;
        let factor = sigma * kappa;
        // ∂_k g^{mi} = −g^{ma} C_kab g^{bi}
        let mut dginv = vec![0.0; m * m * m]; // [k][mm][i]
        for k in 0..m {
            for mm in 0..m {
                for i in 0..m {
                    let mut acc = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            acc -= g.inv[(mm, a)] * c.get(k, a, b) * g.inv[(b, i)];
                        }
                    }
                    dginv[(k * m + mm) * m + i] = acc;
                }
            }
        }
        // ∂_k Γ^i_{lj} = σκ [ Q_kljm g^{mi} + C_ljm ∂_k g^{mi} ]
        let dgamma = |k: usize, l: usize, j: usize, i: usize| -> f64 {
            let mut acc = 0.0;
            for mm in 0..m {
                acc += q.get(k, l, j, mm) * g.inv[(mm, i)];
                acc += c.get(l, j, mm) * dginv[(k * m + mm) * m + i];
            }
            factor * acc
        };
        let gamma = structure_constants(g, c, sigma, kappa).expect("dims checked");
        let mut a_t = vec![0.0; m * m * m * m];
        let mut b_t = vec![0.0; m * m * m * m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let idx = ((i * m + j) * m + k) * m + l;
                        a_t[idx] = dgamma(k, l, j, i) - dgamma(l, k, j, i);
                        let mut acc = 0.0;
                        for mm in 0..m {
                            acc += gamma.get(i, k, mm) * gamma.get(mm, l, j)
                                - gamma.get(i, l, mm) * gamma.get(mm, k, j);
                        }
                        b_t[idx] = acc;
                    }
                }
            }
        }
        Self { m, a: a_t, b: b_t }
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Normalized max curvature component at a given pencil parameter.
    pub fn residual(&self, lambda: f64) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.a.len() {
            let r = lambda * self.a[idx] + lambda * lambda * self.b[idx];
            worst = worst.max(r.abs());
        }
        let scale = (lambda.abs() * Self::max_abs(&self.a))
            .max(lambda * lambda * Self::max_abs(&self.b));
        worst / (1.0 + scale)
    }

    /// Normalized λ- and λ²-coefficient magnitudes recovered by a least-squares
    /// polynomial fit of R(λ) over λ ∈ {1, 2, 3}.
    pub fn fitted_coefficient_residuals(&self) -> (f64, f64) {
        // fit r(λ) = aλ + bλ² per component from three evaluations
        let lambdas = [1.0, 2.0, 3.0];
        let mut s11 = 0.0;
        let mut s12 = 0.0;
        let mut s22 = 0.0;
        for &l in &lambdas {
            s11 += l * l;
            s12 += l * l * l;
            s22 += l * l * l * l;
        }
        let det = s11 * s22 - s12 * s12;
        let mut max_a = 0.0f64;
        let mut max_b = 0.0f64;
        for idx in 0..self.a.len() {
            let mut t1 = 0.0;
            let mut t2 = 0.0;
            for &l in &lambdas {
                let r = l * self.a[idx] + l * l * self.b[idx];
                t1 += l * r;
                t2 += l * l * r;
            }
            let a_fit = (s22 * t1 - s12 * t2) / det;
            let b_fit = (s11 * t2 - s12 * t1) / det;
            max_a = max_a.max(a_fit.abs());
            max_b = max_b.max(b_fit.abs());
        }
        (max_a / (1.0 + max_a), max_b / (1.0 + max_b))
    }
}

/// Pencil curvature residual at one λ (λ = 0 is exactly flat by construction).
pub fn pencil_curvature_residual(
    spec: &PotentialSpec,
    chart: &Chart,
    lambda: f64,
    sigma: f64,
    kappa: f64,
) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(PencilData::new(spec, chart, sigma, kappa)?.residual(lambda))
}

/// Algebra-level Frobenius property: max normalized defect of
/// ⟨x∘y, z⟩ = ⟨x, y∘z⟩ over random triples, using the Jordan product and
/// trace form.
pub fn trace_assoc_residual<R: Rng>(alg: &AlgebraRef, samples: usize, rng: &mut R) -> f64 {
    assert!(samples >= 1);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = alg.random_element(rng);
        let y = alg.random_element(rng);
        let z = alg.random_element(rng);
        let lhs = alg
            .trace_form(&alg.product(&x, &y).unwrap(), &z)
            .unwrap();
        let rhs = alg
            .trace_form(&x, &alg.product(&y, &z).unwrap())
            .unwrap();
        let r = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
        worst = worst.max(r);
    }
    worst
}
