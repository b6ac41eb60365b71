//! Closed-form model manifolds and comparison-geometry bounds.
//!
//! Radial kinds are warped products `dr^2 + f(r)^2 g_{S^{n-1}}` about a pole;
//! the horospherical kind is `dt^2 + e^{2Bt} g_{R^{n-1}}` and its functions
//! depend on the signed coordinate `t`. On all of them the distance Laplacian
//! and Hessian are explicit, so every comparison inequality can be evaluated.

use crate::error::{Error, Result};
use crate::scalar::{coth, lit, pos, scaled_coth, Scalar};

/// Geometry of a model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind<T> {
    /// Flat space in polar coordinates, `f(r) = r`.
    Euclidean,
    /// Constant curvature `-B^2` in polar coordinates, `f(r) = sinh(Br)/B`.
    Hyperbolic { b: T },
    /// Constant curvature `-B^2` in horospherical coordinates, `f(t) = e^{Bt}`.
    LogModel { b: T },
}

/// A model manifold of dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelManifold<T> {
    kind: ModelKind<T>,
    n: usize,
}

/// Warping function and its logarithmic derivative at one coordinate value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warping<T> {
    pub f: T,
    pub df: T,
    /// `f'/f`, evaluated without cancellation near the pole.
    pub log_derivative: T,
}

/// Upper bound and its relaxed form, as returned by the comparison bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonBound<T> {
    /// The sharp `coth` form.
    pub coth: T,
    /// The relaxed form `(.../r)(1 + Br)`.
    pub relaxed: T,
}

impl<T: Scalar> ModelManifold<T> {
    pub fn new(kind: ModelKind<T>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension n = {n} must be >= 2")));
        }
        match kind {
            ModelKind::Hyperbolic { b } | ModelKind::LogModel { b } if !(b >= T::zero()) || !b.is_finite() => {
                Err(Error::Domain(format!("curvature scale B = {b} must be finite and >= 0")))
            }
            _ => Ok(Self { kind, n }),
        }
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(ModelKind::Euclidean, n)
    }

    pub fn hyperbolic(b: T, n: usize) -> Result<Self> {
        Self::new(ModelKind::Hyperbolic { b }, n)
    }

    pub fn log_model(b: T, n: usize) -> Result<Self> {
        Self::new(ModelKind::LogModel { b }, n)
    }

    pub fn kind(&self) -> ModelKind<T> {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Curvature scale `B`; zero for the flat kind.
    pub fn curvature_scale(&self) -> T {
        match self.kind {
            ModelKind::Euclidean => T::zero(),
            ModelKind::Hyperbolic { b } | ModelKind::LogModel { b } => b,
        }
    }

    /// Whether functions on this model depend on a radial coordinate (`r > 0`)
    /// rather than the signed horospherical coordinate.
    pub fn is_radial(&self) -> bool {
        !matches!(self.kind, ModelKind::LogModel { .. })
    }

    /// Curvature data of the model: constant sectional curvature `-B^2`, so `S = B`.
    pub fn curvature(&self) -> CurvatureData<T> {
        let b = self.curvature_scale();
        CurvatureData { b, s: b }
    }

    /// Checks that `r` is an admissible coordinate value.
    pub fn check_coordinate(&self, r: T) -> Result<()> {
        if !r.is_finite() {
            return Err(Error::Domain(format!("coordinate {r} is not finite")));
        }
        if self.is_radial() && !(r > T::zero()) {
            return Err(Error::Domain(format!("radius r = {r} must be > 0")));
        }
        Ok(())
    }

    /// Warping function `f`, `f'` and `f'/f` at `r`.
    pub fn warping(&self, r: T) -> Result<Warping<T>> {
        self.check_coordinate(r)?;
        let b = self.curvature_scale();
        Ok(match self.kind {
            ModelKind::Euclidean => flat_warping(r),
            ModelKind::Hyperbolic { .. } if b == T::zero() => flat_warping(r),
            ModelKind::Hyperbolic { .. } => {
                let br = b * r;
                Warping { f: br.sinh() / b, df: br.cosh(), log_derivative: b * coth(br) }
            }
            ModelKind::LogModel { .. } => {
                let f = (b * r).exp();
                Warping { f, df: b * f, log_derivative: b }
            }
        })
    }

    /// Radial p-Laplacian `|s|^{p-2}((p-1)s' + (n-1)(f'/f)s)` of a function with
    /// `u'(r) = s`, `u''(r) = ds`.
    pub fn radial_p_laplacian(&self, p: T, r: T, s: T, ds: T) -> Result<T> {
        if !(p > T::one()) {
            return Err(Error::Domain(format!("p = {p} must be > 1")));
        }
        let h = self.warping(r)?.log_derivative;
        let n1 = lit::<T>((self.n - 1) as f64);
        let p_one = p - T::one();
        if p == lit(2.0) {
            return Ok(ds + n1 * h * s);
        }
        if s == T::zero() {
            if p < lit(2.0) {
                return Err(Error::Degenerate(format!("p = {p} < 2 with vanishing gradient at {r}")));
            }
            return Ok(T::zero());
        }
        Ok(s.abs().powf(p - lit(2.0)) * (p_one * ds + n1 * h * s))
    }
}

fn flat_warping<T: Scalar>(r: T) -> Warping<T> {
    Warping { f: r, df: T::one(), log_derivative: r.recip() }
}

/// Curvature bounds entering the barrier argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureData<T> {
    /// Ricci lower-bound scale, `Ric >= (1-n) B^2`.
    pub b: T,
    /// Sectional-curvature magnitude bound, `Sec >= -S^2`.
    pub s: T,
}

impl<T: Scalar> CurvatureData<T> {
    pub fn new(b: T, s: T) -> Result<Self> {
        if !(b >= T::zero() && s >= T::zero()) || !b.is_finite() || !s.is_finite() {
            return Err(Error::Domain(format!("curvature data B = {b}, S = {s} must be finite and >= 0")));
        }
        Ok(Self { b, s })
    }

    /// `B_p = B + (p-2)_+ S`.
    pub fn b_p(&self, p: T) -> T {
        self.b + pos(p - lit(2.0)) * self.s
    }
}

/// Bounds on the Laplacian of the distance function under `Ric >= (1-n)B^2`:
/// `(n-1) B coth(Br)` and the relaxed `(n-1)/r (1 + Br)`.
pub fn laplacian_distance_bound<T: Scalar>(n: usize, b: T, r: T) -> Result<ComparisonBound<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension n = {n} must be >= 2")));
    }
    check_radius_and_scale(b, r)?;
    let n1 = lit::<T>((n - 1) as f64);
    Ok(ComparisonBound { coth: n1 * scaled_coth(b, r), relaxed: n1 / r * (T::one() + b * r) })
}

/// Bounds on the Hessian of the distance function under `-S^2 <= Sec <= 0`, as
/// multiples of the metric: `S coth(Sr)` and the relaxed `(1 + Sr)/r`.
pub fn hessian_distance_bound<T: Scalar>(s: T, r: T) -> Result<ComparisonBound<T>> {
    check_radius_and_scale(s, r)?;
    Ok(ComparisonBound { coth: scaled_coth(s, r), relaxed: (T::one() + s * r) / r })
}

fn check_radius_and_scale<T: Scalar>(b: T, r: T) -> Result<()> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::Domain(format!("radius r = {r} must be finite and > 0")));
    }
    if !(b >= T::zero()) || !b.is_finite() {
        return Err(Error::Domain(format!("curvature scale {b} must be finite and >= 0")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Lambert's continued fraction for tanh, evaluated bottom-up.
    fn coth_oracle(x: f64) -> f64 {
        let x2 = x * x;
        let mut tail = 0.0;
        for k in (1..60).rev() {
            tail = x2 / ((2 * k + 1) as f64 + tail);
        }
        (1.0 + tail) / x
    }

    const COTH_1: f64 = 1.313_035_285_499_331_3;

    #[test]
    fn oracle_value_of_coth_one() {
        assert_relative_eq!(coth_oracle(1.0), COTH_1, max_relative = 1e-15);
    }

    #[test]
    fn euclidean_warping() {
        let m = ModelManifold::<f64>::euclidean(3).unwrap();
        let w = m.warping(2.0).unwrap();
        assert_eq!((w.f, w.df, w.log_derivative), (2.0, 1.0, 0.5));
    }

    #[test]
    fn hyperbolic_warping_near_pole_and_at_one() {
        let m = ModelManifold::hyperbolic(1.0_f64, 3).unwrap();
        let w = m.warping(1e-6).unwrap();
        assert!((w.log_derivative - 1e6).abs() < 1.0);
        let w = m.warping(1.0).unwrap();
        assert_relative_eq!(w.log_derivative, COTH_1, max_relative = 1e-14);
        assert_relative_eq!(w.f, 1.0_f64.sinh(), max_relative = 1e-15);
    }

    #[test]
    fn warping_rejects_nonpositive_radius() {
        let m = ModelManifold::hyperbolic(1.0, 3).unwrap();
        assert!(matches!(m.warping(0.0), Err(Error::Domain(_))));
        assert!(matches!(m.warping(-1.0), Err(Error::Domain(_))));
        // the horospherical coordinate is signed
        let lm = ModelManifold::log_model(1.0, 3).unwrap();
        assert!(lm.warping(-2.0).is_ok());
    }

    #[test]
    fn zero_curvature_kinds_coincide() {
        let e = ModelManifold::<f64>::euclidean(4).unwrap();
        let h = ModelManifold::hyperbolic(0.0, 4).unwrap();
        for r in [0.1, 1.0, 7.5] {
            assert_eq!(e.warping(r).unwrap(), h.warping(r).unwrap());
        }
        assert!(ModelManifold::<f64>::euclidean(1).is_err());
        assert!(ModelManifold::hyperbolic(-1.0, 3).is_err());
    }

    #[test]
    fn laplacian_bound_examples() {
        let b = laplacian_distance_bound(3, 0.0, 2.0).unwrap();
        assert_eq!(b.coth, 1.0);
        let b = laplacian_distance_bound(2, 1.0, 1.0).unwrap();
        assert_relative_eq!(b.coth, coth_oracle(1.0), max_relative = 1e-14);
        let b = laplacian_distance_bound(3, 1.0, 1.0).unwrap();
        assert_eq!(b.relaxed, 4.0);
        assert_relative_eq!(b.coth, 2.0 * coth_oracle(1.0), max_relative = 1e-14);
        assert!(laplacian_distance_bound(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn hessian_bound_examples() {
        let h = hessian_distance_bound(0.0, 0.5).unwrap();
        assert_eq!(h.coth, 2.0);
        let h = hessian_distance_bound(1.0, 1.0).unwrap();
        assert_relative_eq!(h.coth, coth_oracle(1.0), max_relative = 1e-14);
        let h = hessian_distance_bound(2.0, 1.0).unwrap();
        assert_relative_eq!(h.coth, 2.0 * coth_oracle(2.0), max_relative = 1e-14);
        assert_relative_eq!(h.coth, 2.074_629_4, max_relative = 1e-7);
        assert_eq!(h.relaxed, 3.0);
        assert!(h.coth <= h.relaxed);
        assert!(hessian_distance_bound(1.0, -0.1).is_err());
    }

    #[test]
    fn radial_p_laplacian_examples() {
        let e = ModelManifold::<f64>::euclidean(3).unwrap();
        for r in [0.3, 1.0, 4.0] {
            assert_relative_eq!(e.radial_p_laplacian(2.0, r, 2.0 * r, 2.0).unwrap(), 6.0, max_relative = 1e-15);
        }
        let lm = ModelManifold::log_model(1.0, 2).unwrap();
        assert_eq!(lm.radial_p_laplacian(2.0, 0.7, 1.0, 0.0).unwrap(), 1.0);
        let h = ModelManifold::hyperbolic(1.0, 3).unwrap();
        assert_relative_eq!(h.radial_p_laplacian(3.0, 1.0, 1.0, 0.0).unwrap(), 2.0 * coth_oracle(1.0), max_relative = 1e-14);
        assert!(matches!(h.radial_p_laplacian(1.5, 1.0, 0.0, 1.0), Err(Error::Degenerate(_))));
        assert_eq!(h.radial_p_laplacian(3.0, 1.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn curvature_data_b_p() {
        let c = CurvatureData::new(1.0, 2.0).unwrap();
        assert_eq!(c.b_p(3.0), 3.0);
        assert_eq!(c.b_p(1.5), 1.0);
        assert!(c.b_p(4.0) >= c.b);
        assert!(CurvatureData::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn series_and_direct_coth_agree() {
        // direct evaluation in extended form: cosh/sinh
        for i in 0..=800 {
            let x = 10f64.powf(-8.0 + 8.0 * i as f64 / 800.0);
            let c = coth(x);
            let oracle = coth_oracle(x);
            assert!(((c - oracle) / oracle).abs() < 1e-12, "x = {x}");
        }
    }

    proptest! {
        #[test]
        fn laplacian_bound_monotone_and_above_limit(n in 2usize..8, b in 0.0f64..5.0, r in 1e-3f64..50.0, dr in 1e-3f64..10.0) {
            let lo = laplacian_distance_bound(n, b, r).unwrap();
            let hi = laplacian_distance_bound(n, b, r + dr).unwrap();
            let limit = (n - 1) as f64 * b;
            prop_assert!(hi.coth <= lo.coth * (1.0 + 1e-14));
            prop_assert!(lo.coth >= limit * (1.0 - 1e-14));
            prop_assert!(lo.coth <= lo.relaxed * (1.0 + 1e-14));
        }

        #[test]
        fn p_two_has_no_gradient_factor(n in 2usize..6, b in 0.0f64..3.0, r in 1e-3f64..10.0, s in -5.0f64..5.0, ds in -5.0f64..5.0) {
            let m = ModelManifold::hyperbolic(b, n).unwrap();
            let h = m.warping(r).unwrap().log_derivative;
            let lap = m.radial_p_laplacian(2.0, r, s, ds).unwrap();
            prop_assert_eq!(lap, ds + (n - 1) as f64 * h * s);
        }

        #[test]
        fn radial_p_harmonic_profile_has_zero_p_laplacian(n in 2usize..6, b in 0.0f64..2.0, p in 1.2f64..5.0, r in 0.05f64..5.0) {
            let m = ModelManifold::hyperbolic(b, n).unwrap();
            let w = m.warping(r).unwrap();
            let beta = (n - 1) as f64 / (p - 1.0);
            let s = w.f.powf(-beta);
            let ds = -beta * s * w.log_derivative;
            let lap = m.radial_p_laplacian(p, r, s, ds).unwrap();
            let scale = s.abs().powf(p - 1.0) * ((p - 1.0) * ds.abs() + (n - 1) as f64 * w.log_derivative * s.abs());
            prop_assert!(lap.abs() <= 1e-9 * scale.max(1.0));
        }
    }
}
