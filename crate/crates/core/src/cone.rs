//! The open symmetric cone attached to a Jordan algebra: interior membership,
//! interior sampling, the Koszul–Vinberg potential in closed form, and a Monte
//! Carlo cross-check of the defining dual-cone integral in low dimension.
//!
//! Sign convention: the potential is Φ(x) = −(N/r)·log det(x) + c, the strictly
//! convex branch that blows up at the cone boundary; the characteristic
//! function χ = e^Φ is then homogeneous of degree −N (see
//! [`PotentialSpec::chi_degree`], exposed so either sign convention is
//! testable).

use crate::error::{Error, Result};
use crate::jordan::{AlgebraRef, Family, JordanElement};
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};

/// Points sampled for derivative work are rejected below this margin.
pub const MIN_SAMPLING_MARGIN: f64 = 1e-6;

/// Interior cone point with a certified positive margin.
#[derive(Debug, Clone)]
pub struct ConePoint {
    element: JordanElement,
    interior_margin: f64,
}

impl ConePoint {
    pub fn new(element: JordanElement) -> Result<Self> {
        let margin = interior_margin(&element);
        if !(margin > 0.0) || !contains(&element) {
            return Err(Error::NotInterior(margin));
        }
        Ok(Self {
            element,
            interior_margin: margin,
        })
    }

    pub fn element(&self) -> &JordanElement {
        &self.element
    }

    pub fn margin(&self) -> f64 {
        self.interior_margin
    }

    /// Positive rescaling keeps the point interior.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::NotInterior(lambda));
        }
        Self::new(self.element.scale(lambda))
    }
}

/// Interior membership predicate, total on the algebra.
///
/// Matrix families: all Jordan eigenvalues positive. Spin: t > 0 and
/// t² − |x̄|² > 0. Albert: the three leading principal minors positive.
/// Direct sums: every component.
pub fn contains(x: &JordanElement) -> bool {
    let alg = x.algebra();
    for p in alg.parts() {
        let coords = &x.coords()[p.offset..p.offset + p.dim];
        let ok = match p.family {
            Family::Albert => {
                let (m1, m2, m3) = p.albert_minors(coords);
                m1 > 0.0 && m2 > 0.0 && m3 > 0.0
            }
            Family::Spin => {
                let a = p.spin_ambient(coords);
                let t = a[0];
                t > 0.0 && t * t - a[1..].iter().map(|v| v * v).sum::<f64>() > 0.0
            }
            _ => p
                .eigenvalues(coords)
                .into_iter()
                .all(|l| l > 0.0),
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Distance proxy to the boundary: the smallest Jordan eigenvalue
/// (t − |x̄| for spin factors, minimum over direct-sum components).
pub fn interior_margin(x: &JordanElement) -> f64 {
    x.algebra()
        .eigenvalues(x)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// `a∘a + spread·e` for a given element; lies in the interior for spread > 0.
pub fn shifted_square(a: &JordanElement, spread: f64) -> Result<ConePoint> {
    let alg = a.algebra();
    let sq = alg.product(a, a)?;
    ConePoint::new(sq.add(&alg.identity().scale(spread)))
}

/// Random interior point: squares a standard-normal element and shifts by
/// `spread` times the unit.
pub fn sample_interior<R: Rng>(alg: &AlgebraRef, rng: &mut R, spread: f64) -> ConePoint {
    assert!(spread > 0.0, "spread must be positive");
    let a = alg.random_element(rng);
    shifted_square(&a, spread).expect("shifted square is interior")
}

/// Necessary self-duality condition Ω ⊆ Ω*: ⟨x, y⟩ > 0 over sampled interior
/// pairs.
pub fn self_duality_sample<R: Rng>(alg: &AlgebraRef, rng: &mut R, trials: usize) -> bool {
    assert!(trials >= 1);
    for _ in 0..trials {
        let x = sample_interior(alg, rng, 0.5);
        let y = sample_interior(alg, rng, 0.5);
        let t = alg
            .trace_form(x.element(), y.element())
            .expect("same algebra");
        if !(t > 0.0) {
            return false;
        }
    }
    true
}

/// The Koszul–Vinberg potential specification: Φ = −k·log det + c, k = N/r.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    algebra: AlgebraRef,
    pub exponent: f64,
    pub constant: f64,
}

impl PotentialSpec {
    pub fn new(algebra: &AlgebraRef) -> Self {
        let exponent = algebra.dim() as f64 / algebra.rank() as f64;
        Self {
            algebra: AlgebraRef::clone(algebra),
            exponent,
            constant: 0.0,
        }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = c;
        self
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    /// Homogeneity degree of χ = e^Φ: χ(λx) = λ^degree χ(x). Negative under
    /// the boundary-blow-up convention used here.
    pub fn chi_degree(&self) -> f64 {
        -(self.algebra.dim() as f64)
    }
}

/// Φ(x) = −k Σ_parts log det_part(x) + c; errors off the interior.
pub fn kv_potential(spec: &PotentialSpec, x: &JordanElement) -> Result<f64> {
    if !contains(x) {
        return Err(Error::NotInterior(interior_margin(x)));
    }
    let mut log_det = 0.0;
    for p in spec.algebra.parts() {
        let d = p.determinant(&x.coords()[p.offset..p.offset + p.dim]);
        if !(d > 0.0) {
            return Err(Error::NotInterior(d));
        }
        log_det += d.ln();
    }
    Ok(-spec.exponent * log_det + spec.constant)
}

/// Monte Carlo estimate of the dual-cone integral ∫ exp(−⟨x, a⟩) da over the
/// (self-dual) cone, by importance sampling. Supported for ambient dimension
/// N ≤ 3: SymR(1), Spin(2), Spin(3).
pub fn kv_integral_mc<R: Rng>(
    alg: &AlgebraRef,
    x: &JordanElement,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    assert!(n_samples >= 1);
    if !contains(x) {
        return Err(Error::NotInterior(interior_margin(x)));
    }
    if !alg.is_irreducible() {
        return Err(Error::UnsupportedMcDimension(alg.dim()));
    }
    let part = &alg.parts()[0];
    match (part.family, part.n) {
        (Family::SymR, 1) => {
            // Ω = R_+, ⟨x, a⟩ = x·a; exact value 1/x.
            let xv = x.coords()[0];
            let margin = xv;
            let beta = 1.4 * margin;
            let exp = Exp::new(beta).map_err(|e| Error::Config(e.to_string()))?;
            let mut acc = 0.0;
            for _ in 0..n_samples {
                let a: f64 = exp.sample(rng);
                let weight = (-(xv * a)).exp() / (beta * (-(beta * a)).exp());
                acc += weight;
            }
            Ok(acc / n_samples as f64)
        }
        (Family::Spin, 2) => {
            // light-cone coordinates u = t + x1, v = t − x1; da = du dv / 2
            let amb = ambient_spin(x);
            let (t, x1) = (amb[0], amb[1]);
            let u_rate = t + x1;
            let v_rate = t - x1;
            let (bu, bv) = (0.7 * u_rate, 0.7 * v_rate);
            let eu = Exp::new(bu).map_err(|e| Error::Config(e.to_string()))?;
            let ev = Exp::new(bv).map_err(|e| Error::Config(e.to_string()))?;
            let mut acc = 0.0;
            for _ in 0..n_samples {
                let u: f64 = eu.sample(rng);
                let v: f64 = ev.sample(rng);
                let q = bu * bv * (-(bu * u + bv * v)).exp();
                acc += 0.5 * (-(u_rate * u + v_rate * v)).exp() / q;
            }
            Ok(acc / n_samples as f64)
        }
        (Family::Spin, 3) => {
            // t ~ Gamma(3, 1/beta) cancels the disk area factor πt²;
            // x̄ | t uniform in the disk of radius t.
            let amb = ambient_spin(x);
            let (t0, x1, x2) = (amb[0], amb[1], amb[2]);
            let margin = t0 - (x1 * x1 + x2 * x2).sqrt();
            let beta = 1.4 * margin;
            let gamma = Gamma::new(3.0, 1.0 / beta).map_err(|e| Error::Config(e.to_string()))?;
            let two_pi = 2.0 * std::f64::consts::PI;
            let norm = beta.powi(3) / two_pi;
            let mut acc = 0.0;
            for _ in 0..n_samples {
                let t: f64 = gamma.sample(rng);
                let r = t * rng.gen::<f64>().sqrt();
                let phi = two_pi * rng.gen::<f64>();
                let (a1, a2) = (r * phi.cos(), r * phi.sin());
                // q(t, x̄) = beta³ e^{−beta t} / (2π)
                let inner = 2.0 * (t0 * t + x1 * a1 + x2 * a2);
                acc += (-inner + beta * t).exp() / norm;
            }
            Ok(acc / n_samples as f64)
        }
        _ => Err(Error::UnsupportedMcDimension(alg.dim())),
    }
}

fn ambient_spin(x: &JordanElement) -> Vec<f64> {
    let p = &x.algebra().parts()[0];
    p.spin_ambient(&x.coords()[p.offset..p.offset + p.dim])
}

/// Affine fit of log(MC estimate) against log det over sampled points.
#[derive(Debug, Clone)]
pub struct McFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub expected_slope: f64,
}

/// Fits log Î(x_j) = a + b·log det(x_j) over random interior points and
/// reports the slope against the expected −N/r.
pub fn mc_logdet_fit<R: Rng>(
    alg: &AlgebraRef,
    n_points: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<McFit> {
    let mut logs = Vec::with_capacity(n_points);
    let mut dets = Vec::with_capacity(n_points);
    let mut attempts = 0;
    while logs.len() < n_points {
        attempts += 1;
        if attempts > 100 * n_points {
            return Err(Error::Config("mc fit sampling stalled".into()));
        }
        let p = sample_interior(alg, rng, 0.7);
        if p.margin() < 0.3 {
            continue;
        }
        let est = kv_integral_mc(alg, p.element(), n_samples, rng)?;
        logs.push(est.ln());
        dets.push(alg.determinant(p.element()).ln());
    }
    let n = n_points as f64;
    let mx = dets.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let sxx: f64 = dets.iter().map(|d| (d - mx) * (d - mx)).sum();
    let sxy: f64 = dets
        .iter()
        .zip(&logs)
        .map(|(d, l)| (d - mx) * (l - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = dets
        .iter()
        .zip(&logs)
        .map(|(d, l)| (l - (intercept + slope * d)).abs())
        .fold(0.0, f64::max);
    let expected_slope = -(alg.dim() as f64) / alg.rank() as f64;
    Ok(McFit {
        slope,
        intercept,
        max_abs_residual,
        expected_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{Family, JordanAlgebra, SQRT_2};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn families_under_test() -> Vec<AlgebraRef> {
        vec![
            JordanAlgebra::new(Family::SymR, 3).unwrap(),
            JordanAlgebra::new(Family::HermC, 2).unwrap(),
            JordanAlgebra::new(Family::HermH, 2).unwrap(),
            JordanAlgebra::new(Family::Albert, 3).unwrap(),
            JordanAlgebra::new(Family::Spin, 4).unwrap(),
        ]
    }

    #[test]
    fn identity_is_interior_everywhere() {
        for j in families_under_test() {
            let e = j.identity();
            assert!(contains(&e));
            assert_relative_eq!(interior_margin(&e), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn spin_point_outside_lorentz_cone() {
        let j = JordanAlgebra::new(Family::Spin, 3).unwrap();
        // ambient (1, (2, 0)): spatial norm exceeds the time component
        let x = j.element(vec![SQRT_2, 2.0 * SQRT_2, 0.0]).unwrap();
        assert!(!contains(&x));
    }

    #[test]
    fn symr2_indefinite_matrix_rejected() {
        let j = JordanAlgebra::new(Family::SymR, 2).unwrap();
        // [[1,2],[2,1]] has eigenvalues 3 and −1
        let x = j.element(vec![1.0, 1.0, 2.0 * SQRT_2]).unwrap();
        assert!(!contains(&x));
        let eigs = j.eigenvalues(&x);
        assert_relative_eq!(eigs[0], -1.0, epsilon = 1e-10);
        assert_relative_eq!(eigs[1], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_square_shift_gives_identity() {
        for j in families_under_test() {
            let p = shifted_square(&j.zero(), 1.0).unwrap();
            for (a, b) in p.element().coords().iter().zip(j.identity().coords()) {
                assert_relative_eq!(a, b, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn sampled_points_are_interior_and_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for j in families_under_test() {
            for _ in 0..200 {
                let p = sample_interior(&j, &mut rng, 1.0);
                assert!(contains(p.element()));
                assert!(p.margin() > 0.0);
                let lambda: f64 = rng.gen_range(0.1..10.0);
                assert!(contains(&p.element().scale(lambda)));
            }
        }
    }

    #[test]
    fn cone_is_closed_under_addition() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for j in families_under_test() {
            for _ in 0..50 {
                let x = sample_interior(&j, &mut rng, 0.3);
                let y = sample_interior(&j, &mut rng, 0.3);
                assert!(contains(&x.element().add(y.element())));
            }
        }
    }

    #[test]
    fn albert_minors_agree_with_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let j = JordanAlgebra::new(Family::Albert, 3).unwrap();
        let mut seen_inside = 0;
        for _ in 0..500 {
            let x = j.random_element(&mut rng).add(&j.identity().scale(0.8));
            let by_minors = contains(&x);
            let by_spectrum = j.eigenvalues(&x).into_iter().all(|l| l > 1e-12);
            let near_boundary = j.eigenvalues(&x).into_iter().any(|l| l.abs() < 1e-8);
            if !near_boundary {
                assert_eq!(by_minors, by_spectrum);
            }
            if by_minors {
                seen_inside += 1;
            }
        }
        assert!(seen_inside > 0);
    }

    #[test]
    fn potential_normalization_and_scaling() {
        for j in families_under_test() {
            let spec = PotentialSpec::new(&j);
            let e = j.identity();
            assert_relative_eq!(kv_potential(&spec, &e).unwrap(), 0.0, epsilon = 1e-12);
            let n = j.dim() as f64;
            for lambda in [0.5f64, 2.0, 7.5] {
                assert_relative_eq!(
                    kv_potential(&spec, &e.scale(lambda)).unwrap(),
                    -n * lambda.ln(),
                    max_relative = 1e-12
                );
            }
            assert_relative_eq!(spec.chi_degree(), -n, epsilon = 0.0);
        }
    }

    #[test]
    fn symr2_diag_potential_value() {
        let j = JordanAlgebra::new(Family::SymR, 2).unwrap();
        let spec = PotentialSpec::new(&j);
        let x = j.element(vec![2.0, 2.0, 0.0]).unwrap();
        assert_relative_eq!(
            kv_potential(&spec, &x).unwrap(),
            -1.5 * 4.0f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn potential_homogeneity_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for j in families_under_test() {
            let spec = PotentialSpec::new(&j);
            let n = j.dim() as f64;
            for _ in 0..50 {
                let p = sample_interior(&j, &mut rng, 0.8);
                let lambda: f64 = rng.gen_range(0.1..10.0);
                let lhs = kv_potential(&spec, &p.element().scale(lambda)).unwrap();
                let rhs = kv_potential(&spec, p.element()).unwrap() - n * lambda.ln();
                assert!((lhs - rhs).abs() / (1.0 + rhs.abs()) < 1e-10);
            }
        }
    }

    #[test]
    fn potential_is_convex_along_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for j in families_under_test() {
            let spec = PotentialSpec::new(&j);
            for _ in 0..50 {
                let x = sample_interior(&j, &mut rng, 0.5);
                let y = sample_interior(&j, &mut rng, 0.5);
                let mid = x.element().add(y.element()).scale(0.5);
                let fm = kv_potential(&spec, &mid).unwrap();
                let avg = 0.5
                    * (kv_potential(&spec, x.element()).unwrap()
                        + kv_potential(&spec, y.element()).unwrap());
                assert!(fm <= avg + 1e-12);
            }
        }
    }

    #[test]
    fn potential_errors_off_interior() {
        let j = JordanAlgebra::new(Family::SymR, 2).unwrap();
        let spec = PotentialSpec::new(&j);
        let x = j.element(vec![1.0, -1.0, 0.0]).unwrap();
        assert!(kv_potential(&spec, &x).is_err());
    }

    #[test]
    fn mc_integral_matches_exact_on_half_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let j = JordanAlgebra::new(Family::SymR, 1).unwrap();
        for t in [0.5f64, 1.0, 3.0] {
            let x = j.element(vec![t]).unwrap();
            let est = kv_integral_mc(&j, &x, 200_000, &mut rng).unwrap();
            assert!(
                (est - 1.0 / t).abs() * t < 0.01,
                "estimate {est} vs exact {}",
                1.0 / t
            );
        }
    }

    #[test]
    fn mc_integral_scaling_on_spin2() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let j = JordanAlgebra::new(Family::Spin, 2).unwrap();
        let e = j.identity();
        let lambda = 1.7;
        let i1 = kv_integral_mc(&j, &e, 300_000, &mut rng).unwrap();
        let i2 = kv_integral_mc(&j, &e.scale(lambda), 300_000, &mut rng).unwrap();
        // degree −N: estimate(x)/estimate(λx) = λ^N = λ²
        assert_relative_eq!(i1 / i2, lambda * lambda, max_relative = 0.02);
    }

    #[test]
    fn mc_fit_recovers_slope_spin3() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let j = JordanAlgebra::new(Family::Spin, 3).unwrap();
        let fit = mc_logdet_fit(&j, 12, 100_000, &mut rng).unwrap();
        assert_relative_eq!(fit.slope, -1.5, max_relative = 0.05);
        assert!(fit.max_abs_residual < 0.05);
    }

    #[test]
    fn mc_unsupported_dimension_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let j = JordanAlgebra::new(Family::SymR, 2).unwrap();
        assert!(kv_integral_mc(&j, &j.identity(), 10, &mut rng).is_err());
    }

    #[test]
    fn self_duality_positive_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        for j in families_under_test() {
            assert!(self_duality_sample(&j, &mut rng, 500));
        }
    }

    #[test]
    fn boundary_probe_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let j = JordanAlgebra::new(Family::SymR, 3).unwrap();
        for _ in 0..100 {
            let x = sample_interior(&j, &mut rng, 0.5);
            // square of a rank-deficient element lies on the boundary
            let mut a = j.random_element(&mut rng);
            let mut coords = a.coords().to_vec();
            coords[0] = 0.0;
            coords[3] = 0.0;
            coords[4] = 0.0;
            a = j.element(coords).unwrap();
            let y = j.product(&a, &a).unwrap();
            assert!(j.trace_form(x.element(), &y).unwrap() >= 0.0);
        }
    }
}
