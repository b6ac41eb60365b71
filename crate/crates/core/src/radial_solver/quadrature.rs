//! Radial p-harmonic functions from the constant-flux form
//! `v' = C f^{-(n-1)/(p-1)}`, integrated by adaptive Gauss-Kronrod quadrature.
// Node tables carry more digits than f64 holds so wider scalar types keep accuracy.
#![allow(clippy::excessive_precision)]

use super::{FieldEquation, FieldStatus, Provenance, RadialField, Sample, UniformSamples};
use crate::error::{Error, Result};
use crate::geometry::ModelManifold;
use crate::scalar::{from_usize, lit, Scalar};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: u32 = 48;

fn kronrod<T: Scalar, F: Fn(T) -> Result<T>>(f: &F, a: T, b: T) -> Result<(T, T)> {
    let c = (a + b) * lit(0.5);
    let h = (b - a) * lit(0.5);
    let fc = f(c)?;
    let mut k = fc * lit(WGK[7]);
    let mut g = fc * lit(WG[3]);
    for i in 0..7 {
        let dx = h * lit(XGK[i]);
        let pair = f(c - dx)? + f(c + dx)?;
        k = k + pair * lit(WGK[i]);
        if i % 2 == 1 {
            g = g + pair * lit(WG[i / 2]);
        }
    }
    Ok((k * h, (k - g).abs() * h))
}

/// Adaptive 15-point Gauss-Kronrod integral of `f` over `[a, b]` to
/// absolute accuracy `abs_tol` or relative accuracy `rel_tol`.
pub fn integrate_adaptive<T: Scalar, F: Fn(T) -> Result<T>>(f: &F, a: T, b: T, abs_tol: T, rel_tol: T) -> Result<T> {
    fn rec<T: Scalar, F: Fn(T) -> Result<T>>(f: &F, a: T, b: T, abs_tol: T, rel_tol: T, depth: u32) -> Result<T> {
        let (k, err) = kronrod(f, a, b)?;
        if !k.is_finite() {
            return Err(Error::Solver(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= abs_tol.max(rel_tol * k.abs()) {
            return Ok(k);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Solver(format!("quadrature did not converge on [{a}, {b}], error {err}")));
        }
        let m = (a + b) * lit(0.5);
        Ok(rec(f, a, m, abs_tol, rel_tol, depth + 1)? + rec(f, m, b, abs_tol, rel_tol, depth + 1)?)
    }
    if a == b {
        return Ok(T::zero());
    }
    rec(f, a, b, abs_tol, rel_tol, 0)
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::Domain(format!("p = {p} must be finite and > 1")));
    }
    Ok(())
}

/// `f^{-(n-1)/(p-1)}`, the slope of the unit-flux radial p-harmonic function.
fn unit_flux_slope<T: Scalar>(m: &ModelManifold<T>, beta: T, r: T) -> Result<T> {
    Ok(m.warping(r)?.f.powf(-beta))
}

fn flux_exponent<T: Scalar>(m: &ModelManifold<T>, p: T) -> T {
    from_usize::<T>(m.dim() - 1) / (p - T::one())
}

fn integral_tol<T: Scalar>() -> (T, T) {
    (T::epsilon() * lit(4.0), T::epsilon() * lit(16.0))
}

/// Radial (or horospherical) p-harmonic function with flux constant `cflux`,
/// `v' = cflux f^{-(n-1)/(p-1)}`, sampled on `range` with `v(range.start) = v_start`.
pub fn p_harmonic_radial_quadrature<T: Scalar>(
    m: &ModelManifold<T>,
    p: T,
    cflux: T,
    range: UniformSamples<T>,
    v_start: T,
) -> Result<RadialField<T>> {
    check_p(p)?;
    if !cflux.is_finite() || !v_start.is_finite() {
        return Err(Error::Domain("flux constant and start value must be finite".into()));
    }
    let beta = flux_exponent(m, p);
    let points = range.points();
    for &r in &points {
        m.check_coordinate(r)?;
    }
    let slope = |r: T| unit_flux_slope(m, beta, r);
    let (abs_tol, rel_tol) = integral_tol::<T>();
    let mut samples = Vec::with_capacity(points.len());
    let mut v = v_start;
    for (i, &r) in points.iter().enumerate() {
        if i > 0 && cflux != T::zero() {
            v = v + cflux * integrate_adaptive(&slope, points[i - 1], r, abs_tol, rel_tol)?;
        }
        let w = m.warping(r)?;
        let s = cflux * w.f.powf(-beta);
        samples.push(Sample { r, u: v, s, ds: -beta * w.log_derivative * s });
    }
    RadialField::new(*m, FieldEquation::PHarmonic { p }, Provenance::Quadrature, FieldStatus::Complete, samples)
}

/// Flux constant of the radial p-harmonic function with `v(r_a) = v_a`, `v(r_b) = v_b`.
pub fn fit_flux<T: Scalar>(m: &ModelManifold<T>, p: T, annulus: (T, T), boundary: (T, T)) -> Result<T> {
    check_p(p)?;
    let (ra, rb) = annulus;
    m.check_coordinate(ra)?;
    m.check_coordinate(rb)?;
    if !(rb > ra) {
        return Err(Error::Domain(format!("annulus [{ra}, {rb}] is empty")));
    }
    let beta = flux_exponent(m, p);
    let (abs_tol, rel_tol) = integral_tol::<T>();
    let total = integrate_adaptive(&|r| unit_flux_slope(m, beta, r), ra, rb, abs_tol, rel_tol)?;
    Ok((boundary.1 - boundary.0) / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gauss_kronrod_on_known_integrals() {
        let v = integrate_adaptive(&|x: f64| Ok(x.exp()), 0.0, 1.0, 1e-15, 1e-15).unwrap();
        assert_relative_eq!(v, std::f64::consts::E - 1.0, max_relative = 1e-15);
        let v = integrate_adaptive(&|x: f64| Ok(x.sqrt()), 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn newtonian_potential() {
        let m = ModelManifold::euclidean(3).unwrap();
        let f = p_harmonic_radial_quadrature(&m, 2.0, 1.0, UniformSamples::new(0.5, 4.0, 50).unwrap(), -2.0).unwrap();
        for smp in f.samples() {
            assert_relative_eq!(smp.u, -1.0 / smp.r, max_relative = 1e-13);
        }
        assert!(f.equation_residual().unwrap() < 1e-12);
    }

    #[test]
    fn hyperbolic_plane_harmonic_is_log_tanh() {
        let m = ModelManifold::hyperbolic(1.0, 2).unwrap();
        let start = 0.2f64;
        let v0 = (start / 2.0).tanh().ln();
        let f = p_harmonic_radial_quadrature(&m, 2.0, 1.0, UniformSamples::new(start, 6.0, 80).unwrap(), v0).unwrap();
        for smp in f.samples() {
            assert_relative_eq!(smp.u, (smp.r / 2.0).tanh().ln(), epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_flux_is_constant() {
        let m = ModelManifold::hyperbolic(1.0, 3).unwrap();
        let f = p_harmonic_radial_quadrature(&m, 3.0, 0.0, UniformSamples::new(0.5, 2.0, 10).unwrap(), 7.0).unwrap();
        assert!(f.samples().iter().all(|s| s.u == 7.0 && s.s == 0.0));
    }

    #[test]
    fn fitted_flux_hits_boundary_values() {
        let m = ModelManifold::hyperbolic(1.0, 3).unwrap();
        let c = fit_flux(&m, 4.0, (0.5, 2.0), (1.0, 0.0)).unwrap();
        let f = p_harmonic_radial_quadrature(&m, 4.0, c, UniformSamples::new(0.5, 2.0, 100).unwrap(), 1.0).unwrap();
        assert_relative_eq!(f.last().u, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_pole_and_bad_p() {
        let m = ModelManifold::euclidean(3).unwrap();
        assert!(p_harmonic_radial_quadrature(&m, 2.0, 1.0, UniformSamples::new(0.0, 1.0, 5).unwrap(), 0.0).is_err());
        assert!(p_harmonic_radial_quadrature(&m, 1.0, 1.0, UniformSamples::new(0.5, 1.0, 5).unwrap(), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn flux_conserved_and_residual_small(
            n in 2usize..6,
            p in 1.2f64..5.0,
            b in 0.0f64..2.0,
            c in -3.0f64..3.0,
            ra in 0.1f64..1.0,
            len in 0.1f64..3.0,
        ) {
            let m = ModelManifold::hyperbolic(b, n).unwrap();
            let f = p_harmonic_radial_quadrature(&m, p, c, UniformSamples::new(ra, ra + len, 40).unwrap(), 0.0).unwrap();
            let flux = f.fluxes().unwrap();
            for x in &flux {
                prop_assert!((x - flux[0]).abs() <= 1e-9 * flux[0].abs());
            }
            for (smp, res) in f.samples().iter().zip(f.equation_residuals().unwrap()) {
                let scale = smp.s.abs().powf(p - 1.0) * (1.0 + smp.ds.abs() / smp.s.abs().max(1e-300));
                prop_assert!(res.abs() <= 1e-12 * scale.max(1e-300) || res.abs() < 1e-9);
            }
        }
    }
}
