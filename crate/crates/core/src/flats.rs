//! Maximal abelian subalgebras, Lie-triple-system and curvature checks, the
//! exponentiated maximal flat, Weyl chamber membership, and flat charts.
//!
//! For the matrix families the flat tangent basis is the diagonal units (the
//! identity ray plus traceless diagonals); for the spin factor it is the
//! 2-plane spanned by the unit and the first spatial direction, whose chart
//! frame is the pair of light-cone idempotents. Flat charts use ambient affine
//! coordinates restricted to the slice (diagonal entries, light-cone u/v), so
//! the restricted potential is separable — which is what the Frobenius checks
//! consume.

use crate::cone::{ConePoint, PotentialSpec};
use crate::derivatives::{directional_jet, metric, Chart};
use crate::error::{Error, Result};
use crate::jordan::{AlgebraRef, Family, JordanElement, KMatrix};
use nalgebra::{DMatrix, DVector};

/// A maximal flat through the identity: abelian tangent basis plus the
/// idempotent chart frame spanning the same slice.
#[derive(Debug, Clone)]
pub struct FlatDescriptor {
    algebra: AlgebraRef,
    abasis: Vec<JordanElement>,
    frame: Vec<JordanElement>,
    family_note: String,
}

impl FlatDescriptor {
    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    /// Basis of the maximal abelian tangent subspace.
    pub fn abasis(&self) -> &[JordanElement] {
        &self.abasis
    }

    /// Complete orthogonal idempotent frame spanning the flat slice.
    pub fn frame(&self) -> &[JordanElement] {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.abasis.len()
    }

    pub fn note(&self) -> &str {
        &self.family_note
    }
}

/// The canonical maximal flat of each family, concatenated over direct sums.
pub fn cartan_flat(alg: &AlgebraRef) -> FlatDescriptor {
    let mut abasis = Vec::new();
    let mut frame = Vec::new();
    let mut notes = Vec::new();
    for part in alg.parts() {
        match part.family {
            Family::Spin => {
                let mut s0 = vec![0.0; alg.dim()];
                s0[part.offset] = crate::jordan::SQRT_2;
                let mut s1 = vec![0.0; alg.dim()];
                s1[part.offset + 1] = crate::jordan::SQRT_2;
                let s0 = alg.element(s0).unwrap();
                let s1 = alg.element(s1).unwrap();
                // light-cone idempotents c± = (e ± s1)/2
                frame.push(s0.add(&s1).scale(0.5));
                frame.push(s0.sub(&s1).scale(0.5));
                abasis.push(s0);
                abasis.push(s1);
                notes.push("lorentz light-cone 2-flat");
            }
            Family::Albert => {
                for a in 0..part.n {
                    let e = alg.basis_element(part.offset + a);
                    abasis.push(e.clone());
                    frame.push(e);
                }
                notes.push("diagonal idempotent frame (jordan-level checks only)");
            }
            _ => {
                for a in 0..part.n {
                    let e = alg.basis_element(part.offset + a);
                    abasis.push(e.clone());
                    frame.push(e);
                }
                notes.push("diagonal traceless plus identity ray");
            }
        }
    }
    let family_note = if notes.len() == 1 {
        notes[0].to_string()
    } else {
        format!("product of component flats: {}", notes.join("; "))
    };
    FlatDescriptor {
        algebra: AlgebraRef::clone(alg),
        abasis,
        frame,
        family_note,
    }
}

/// exp(Σ params_a · abasis_a) · e, expressed through the idempotent frame.
///
/// Diagonal models: the element with diagonal entries e^{t_a}. Spin factors:
/// light-cone coordinates u = e^{t0+t1}, v = e^{t0−t1}.
pub fn flat_point(flat: &FlatDescriptor, params: &[f64]) -> Result<ConePoint> {
    if params.len() != flat.dim() {
        return Err(Error::BadFlatParams {
            got: params.len(),
            want: flat.dim(),
        });
    }
    let alg = &flat.algebra;
    let mut x = alg.zero();
    let mut offset = 0;
    for part in alg.parts() {
        let r = part.rank;
        let t = &params[offset..offset + r];
        let frame = &flat.frame[offset..offset + r];
        match part.family {
            Family::Spin => {
                let u = (t[0] + t[1]).exp();
                let v = (t[0] - t[1]).exp();
                x = x.add(&frame[0].scale(u)).add(&frame[1].scale(v));
            }
            _ => {
                for (ta, fa) in t.iter().zip(frame) {
                    x = x.add(&fa.scale(ta.exp()));
                }
            }
        }
        offset += r;
    }
    ConePoint::new(x)
}

/// Affine-slice chart at a flat point: base = flat_point(params), directions =
/// the idempotent frame.
pub fn flat_chart(flat: &FlatDescriptor, params: &[f64]) -> Result<Chart> {
    let base = flat_point(flat, params)?;
    Chart::new(base, flat.frame.clone())
}

/// Coordinates of an element in the (orthonormal) idempotent frame of a flat.
pub fn frame_coordinates(flat: &FlatDescriptor, x: &JordanElement) -> Vec<f64> {
    flat.frame
        .iter()
        .map(|f| {
            f.coords()
                .iter()
                .zip(x.coords())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Ambient Lie algebra element [X, Y], one component per direct summand.
#[derive(Debug, Clone)]
pub(crate) enum BracketPart {
    /// Anti-Hermitian matrix over R, C or H.
    MatrixSkew(KMatrix),
    /// Skew rotation block of o(1, n−1) acting on the spatial factor.
    SpinRotation(DMatrix<f64>),
}

/// Opaque isotropy-algebra element produced by [`lie_bracket`].
#[derive(Debug, Clone)]
pub struct BracketElement {
    pub(crate) parts: Vec<BracketPart>,
}

impl BracketElement {
    pub fn max_abs(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| match p {
                BracketPart::MatrixSkew(m) => m.max_abs(),
                BracketPart::SpinRotation(w) => w.iter().fold(0.0, |a: f64, &b| a.max(b.abs())),
            })
            .fold(0.0, f64::max)
    }
}

/// Matrix commutator XY − YX (lands in the isotropy algebra); spin factors
/// bracket through the o(1, n−1) boost representation. Octonionic family
/// unsupported.
pub fn lie_bracket(x: &JordanElement, y: &JordanElement) -> Result<BracketElement> {
    let alg = x.algebra();
    let mut parts = Vec::new();
    for part in alg.parts() {
        let window = part.offset..part.offset + part.dim;
        let xs = &x.coords()[window.clone()];
        let ys = &y.coords()[window.clone()];
        parts.push(match part.family {
            Family::Albert => return Err(Error::UnsupportedBracket),
            Family::Spin => {
                let a = part.spin_ambient(xs);
                let b = part.spin_ambient(ys);
                let s = part.dim - 1;
                let mut w = DMatrix::zeros(s, s);
                for i in 0..s {
                    for j in 0..s {
                        w[(i, j)] = a[1 + i] * b[1 + j] - b[1 + i] * a[1 + j];
                    }
                }
                BracketPart::SpinRotation(w)
            }
            _ => {
                let mx = part.reconstitute(xs);
                let my = part.reconstitute(ys);
                BracketPart::MatrixSkew(mx.commutator(&my))
            }
        });
    }
    Ok(BracketElement { parts })
}

/// [K, Z] for an isotropy element K and tangent Z; lands back in the tangent
/// space.
fn bracket_action(
    alg: &AlgebraRef,
    k: &BracketElement,
    z: &JordanElement,
) -> Result<JordanElement> {
    let mut coords = vec![0.0; alg.dim()];
    for (part, kp) in alg.parts().iter().zip(&k.parts) {
        let window = part.offset..part.offset + part.dim;
        let zs = &z.coords()[window.clone()];
        match kp {
            BracketPart::MatrixSkew(km) => {
                let mz = part.reconstitute(zs);
                let action = km.mul(&mz).sub(&mz.mul(km)).hermitize();
                coords[window].copy_from_slice(&part.coords_of(&action));
            }
            BracketPart::SpinRotation(w) => {
                let a = part.spin_ambient(zs);
                let s = part.dim - 1;
                let mut amb = vec![0.0; part.dim];
                for i in 0..s {
                    let mut acc = 0.0;
                    for j in 0..s {
                        acc += w[(i, j)] * a[1 + j];
                    }
                    amb[1 + i] = acc;
                }
                for (c, v) in coords[window].iter_mut().zip(&amb) {
                    *c = v * crate::jordan::SQRT_2;
                }
            }
        }
    }
    alg.element(coords)
}

/// Curvature action −[[X, Y], Z], a tangent element; vanishes identically on
/// flat tangent triples.
pub fn curvature_triple(
    x: &JordanElement,
    y: &JordanElement,
    z: &JordanElement,
) -> Result<JordanElement> {
    let alg = x.algebra();
    let k = lie_bracket(x, y)?;
    Ok(bracket_action(alg, &k, z)?.scale(-1.0))
}

/// Max distance of [[X, Y], Z] from span(basis) over basis triples; zero
/// certifies a Lie triple system.
pub fn lie_triple_residual(alg: &AlgebraRef, basis: &[JordanElement]) -> Result<f64> {
    let n = alg.dim();
    let m = basis.len();
    let mut b = DMatrix::zeros(n, m);
    for (col, e) in basis.iter().enumerate() {
        for (row, v) in e.coords().iter().enumerate() {
            b[(row, col)] = *v;
        }
    }
    let svd = b.clone().svd(true, true);
    let mut worst = 0.0f64;
    for x in basis {
        for y in basis {
            let k = lie_bracket(x, y)?;
            for z in basis {
                let v = bracket_action(alg, &k, z)?;
                let rhs = DVector::from_column_slice(v.coords());
                let dist = match svd.solve(&rhs, 1e-14) {
                    Ok(sol) => (&rhs - &b * sol).norm(),
                    Err(_) => rhs.norm(),
                };
                worst = worst.max(dist);
            }
        }
    }
    Ok(worst)
}

/// true iff Σ t_i = 0 (within 1e-12) and t_1 < … < t_n strictly.
pub fn weyl_chamber_contains(t_params: &[f64]) -> bool {
    let sum: f64 = t_params.iter().sum();
    if sum.abs() > 1e-12 {
        return false;
    }
    t_params.windows(2).all(|w| w[0] < w[1])
}

/// Second-fundamental-form proxy: ambient C contracted with two flat frame
/// directions and one direction g-orthogonal to the flat, normalized by the
/// in-flat C scale. Near zero certifies the flat totally geodesic.
pub fn totally_geodesic_residual(
    spec: &PotentialSpec,
    flat: &FlatDescriptor,
    params: &[f64],
) -> Result<f64> {
    let alg = flat.algebra();
    let base = flat_point(flat, params)?;
    let chart = Chart::ambient(base.clone());
    let g = metric(spec, &chart)?;
    let n = alg.dim();
    let r = flat.frame.len();

    let gdot = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &g.g * v)[(0, 0)];

    // g-orthonormalize the flat frame
    let mut flat_dirs: Vec<DVector<f64>> = flat
        .frame
        .iter()
        .map(|f| DVector::from_column_slice(f.coords()))
        .collect();
    for a in 0..r {
        for b2 in 0..a {
            let coeff = gdot(&flat_dirs[a].clone(), &flat_dirs[b2]);
            let prev = flat_dirs[b2].clone();
            flat_dirs[a] -= prev * coeff;
        }
        let norm = gdot(&flat_dirs[a].clone(), &flat_dirs[a]).sqrt();
        flat_dirs[a] /= norm;
    }

    // complement: ambient basis vectors projected g-orthogonally off the flat
    let mut complement: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut w = DVector::zeros(n);
        w[i] = 1.0;
        for f in &flat_dirs {
            let coeff = gdot(&w, f);
            w -= f * coeff;
        }
        let norm = gdot(&w, &w).sqrt();
        if norm > 1e-8 {
            complement.push(w / norm);
        }
    }

    let to_element = |v: &DVector<f64>| alg.element(v.as_slice().to_vec()).unwrap();

    // in-flat C magnitude for normalization
    let mut flat_scale = 0.0f64;
    for a in 0..r {
        for b2 in a..r {
            for c in b2..r {
                let jet = directional_jet(
                    spec,
                    &base,
                    &[&flat.frame[a], &flat.frame[b2], &flat.frame[c]],
                    3,
                )?;
                flat_scale = flat_scale.max(jet.mixed(&[0, 1, 2]).abs());
            }
        }
    }

    let mut worst = 0.0f64;
    for a in 0..r {
        for b2 in a..r {
            for w in &complement {
                let we = to_element(w);
                let jet =
                    directional_jet(spec, &base, &[&flat.frame[a], &flat.frame[b2], &we], 3)?;
                worst = worst.max(jet.mixed(&[0, 1, 2]).abs());
            }
        }
    }
    Ok(worst / (1.0 + flat_scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::contains;
    use crate::jordan::{Family, JordanAlgebra, SQRT_2};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symr3_flat_is_three_commuting_diagonals() {
        let j = JordanAlgebra::new(Family::SymR, 3).unwrap();
        let f = cartan_flat(&j);
        assert_eq!(f.dim(), 3);
        for x in f.abasis() {
            for y in f.abasis() {
                let b = lie_bracket(x, y).unwrap();
                assert_eq!(b.max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn spin5_flat_is_two_dimensional() {
        let j = JordanAlgebra::new(Family::Spin, 5).unwrap();
        let f = cartan_flat(&j);
        assert_eq!(f.dim(), 2);
        for x in f.abasis() {
            for y in f.abasis() {
                assert!(lie_bracket(x, y).unwrap().max_abs() < 1e-15);
            }
        }
        // frame elements are orthogonal primitive idempotents
        for (i, c) in f.frame().iter().enumerate() {
            let sq = j.product(c, c).unwrap();
            assert!(sq.sub(c).norm() < 1e-14);
            for (k, d) in f.frame().iter().enumerate() {
                if i != k {
                    assert!(j.product(c, d).unwrap().norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn direct_sum_flat_concatenates() {
        let a = JordanAlgebra::new(Family::SymR, 2).unwrap();
        let b = JordanAlgebra::new(Family::Spin, 3).unwrap();
        let s = JordanAlgebra::direct_sum(&a, &b);
        let f = cartan_flat(&s);
        assert_eq!(f.dim(), 4);
    }

    #[test]
    fn bracket_is_antisymmetric_and_vanishes_on_self() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let j = JordanAlgebra::new(Family::HermC, 2).unwrap();
        let x = j.random_element(&mut rng);
        assert_eq!(lie_bracket(&x, &x).unwrap().max_abs(), 0.0);
        let y = j.random_element(&mut rng);
        let z = j.random_element(&mut rng);
        let r1 = curvature_triple(&x, &y, &z).unwrap();
        let r2 = curvature_triple(&y, &x, &z).unwrap();
        assert!(r1.add(&r2).norm() < 1e-12);
    }

    #[test]
    fn symr2_bracket_explicit() {
        // X = [[0,1],[1,0]], Y = diag(1,−1): [X,Y] = 2[[0,−1],[1,0]]
        let j = JordanAlgebra::new(Family::SymR, 2).unwrap();
        let x = j.element(vec![0.0, 0.0, SQRT_2]).unwrap();
        let y = j.element(vec![1.0, -1.0, 0.0]).unwrap();
        let b = lie_bracket(&x, &y).unwrap();
        match &b.parts[0] {
            BracketPart::MatrixSkew(m) => {
                assert_relative_eq!(m.get(0, 1).real_part(), -2.0, epsilon = 1e-14);
                assert_relative_eq!(m.get(1, 0).real_part(), 2.0, epsilon = 1e-14);
                assert_relative_eq!(m.get(0, 0).real_part(), 0.0, epsilon = 1e-14);
            }
            _ => panic!("expected matrix bracket"),
        }
    }

    #[test]
    fn octonionic_bracket_unsupported() {
        let j = JordanAlgebra::new(Family::Albert, 3).unwrap();
        let f = cartan_flat(&j);
        assert!(matches!(
            lie_bracket(&f.abasis()[0], &f.abasis()[1]),
            Err(Error::UnsupportedBracket)
        ));
    }

    #[test]
    fn cartan_flats_are_lie_triple_systems() {
        for j in [
            JordanAlgebra::new(Family::SymR, 4).unwrap(),
            JordanAlgebra::new(Family::HermC, 3).unwrap(),
            JordanAlgebra::new(Family::HermH, 2).unwrap(),
            JordanAlgebra::new(Family::Spin, 5).unwrap(),
        ] {
            let f = cartan_flat(&j);
            let r = lie_triple_residual(&j, f.abasis()).unwrap();
            assert!(r <= 1e-12, "family {}: residual {r}", j.label());
        }
    }

    #[test]
    fn full_tangent_space_is_a_lie_triple_system() {
        let j = JordanAlgebra::new(Family::SymR, 3).unwrap();
        let basis: Vec<_> = (0..j.dim()).map(|i| j.basis_element(i)).collect();
        let r = lie_triple_residual(&j, &basis).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn random_subspace_is_generically_not_triple() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let j = JordanAlgebra::new(Family::SymR, 3).unwrap();
        let mut saw_positive = false;
        for _ in 0..5 {
            let basis: Vec<_> = (0..3).map(|_| j.random_element(&mut rng)).collect();
            if lie_triple_residual(&j, &basis).unwrap() > 1e-6 {
                saw_positive = true;
            }
        }
        assert!(saw_positive);
    }

    #[test]
    fn curvature_vanishes_on_flat_triples() {
        for j in [
            JordanAlgebra::new(Family::SymR, 3).unwrap(),
            JordanAlgebra::new(Family::HermH, 2).unwrap(),
            JordanAlgebra::new(Family::Spin, 4).unwrap(),
        ] {
            let f = cartan_flat(&j);
            for x in f.abasis() {
                for y in f.abasis() {
                    for z in f.abasis() {
                        let r = curvature_triple(x, y, z).unwrap();
                        assert!(r.norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_generically_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let j = JordanAlgebra::new(Family::HermC, 2).unwrap();
        let x = j.random_element(&mut rng);
        let y = j.random_element(&mut rng);
        let r = curvature_triple(&x, &y, &x).unwrap();
        assert!(r.norm() > 1e-6);
    }

    #[test]
    fn flat_point_at_origin_is_identity() {
        for j in [
            JordanAlgebra::new(Family::SymR, 3).unwrap(),
            JordanAlgebra::new(Family::Spin, 4).unwrap(),
            JordanAlgebra::new(Family::Albert, 3).unwrap(),
        ] {
            let f = cartan_flat(&j);
            let p = flat_point(&f, &vec![0.0; f.dim()]).unwrap();
            assert!(p.element().sub(&j.identity()).norm() < 1e-14);
        }
    }

    #[test]
    fn symr2_flat_point_is_diagonal_exponential() {
        let j = JordanAlgebra::new(Family::SymR, 2).unwrap();
        let f = cartan_flat(&j);
        let p = flat_point(&f, &[2.0f64.ln(), 3.0f64.ln()]).unwrap();
        assert_relative_eq!(p.element().coords()[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(p.element().coords()[1], 3.0, epsilon = 1e-14);
        assert_relative_eq!(p.element().coords()[2], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn flat_points_are_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for j in [
            JordanAlgebra::new(Family::HermC, 3).unwrap(),
            JordanAlgebra::new(Family::Spin, 5).unwrap(),
            JordanAlgebra::new(Family::Albert, 3).unwrap(),
        ] {
            let f = cartan_flat(&j);
            for _ in 0..50 {
                let params: Vec<f64> = (0..f.dim()).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let p = flat_point(&f, &params).unwrap();
                assert!(contains(p.element()));
            }
        }
    }

    #[test]
    fn flat_exponential_is_multiplicative_in_frame_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for j in [
            JordanAlgebra::new(Family::SymR, 3).unwrap(),
            JordanAlgebra::new(Family::Spin, 4).unwrap(),
        ] {
            let f = cartan_flat(&j);
            let s: Vec<f64> = (0..f.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t: Vec<f64> = (0..f.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let st: Vec<f64> = s.iter().zip(&t).map(|(a, b)| a + b).collect();
            let ps = frame_coordinates(&f, flat_point(&f, &s).unwrap().element());
            let pt = frame_coordinates(&f, flat_point(&f, &t).unwrap().element());
            let pst = frame_coordinates(&f, flat_point(&f, &st).unwrap().element());
            for a in 0..f.dim() {
                assert_relative_eq!(pst[a], ps[a] * pt[a], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn weyl_chamber_membership() {
        assert!(weyl_chamber_contains(&[-1.0, 0.0, 1.0]));
        assert!(!weyl_chamber_contains(&[1.0, 0.0, -1.0]));
        assert!(!weyl_chamber_contains(&[-1.0, -1.0, 2.0]));
        assert!(!weyl_chamber_contains(&[-1.0, 0.1, 1.0]));
    }

    #[test]
    fn flats_are_totally_geodesic() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        for j in [
            JordanAlgebra::new(Family::SymR, 3).unwrap(),
            JordanAlgebra::new(Family::HermC, 2).unwrap(),
            JordanAlgebra::new(Family::Spin, 4).unwrap(),
            JordanAlgebra::new(Family::Albert, 3).unwrap(),
        ] {
            let spec = PotentialSpec::new(&j);
            let f = cartan_flat(&j);
            for _ in 0..5 {
                let params: Vec<f64> = (0..f.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = totally_geodesic_residual(&spec, &f, &params).unwrap();
                assert!(r <= 1e-9, "family {}: residual {r}", j.label());
            }
        }
    }
}
