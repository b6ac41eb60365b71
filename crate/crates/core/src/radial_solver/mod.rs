//! Explicit and numerical solutions in radial and horospherical symmetry.
//!
//! A [`RadialField`] stores samples `(r, u, u', u'')` of a one-variable
//! function on a [`ModelManifold`] together with the equation it is meant to
//! solve. Fields come from four sources: adaptive integration of the reduced
//! Hamilton-Jacobi slope equation, the closed flux form of radial
//! p-harmonic functions, discrete energy minimization, and closed forms.

mod energy;
mod ode;
mod quadrature;

use std::fmt;
use std::io::Write;

pub use energy::{p_harmonic_energy_minimizer, EnergyOptions, EnergyReport};
pub use ode::{solve_radial_hj, solve_radial_hj_with, OdeOptions};
pub use quadrature::{fit_flux, integrate_adaptive, p_harmonic_radial_quadrature};

use crate::error::{Error, Result};
use crate::geometry::{ModelKind, ModelManifold};
use crate::proof_constants::{fmt_sig17, Exponents};
use crate::scalar::{from_usize, lit, Scalar};

/// One sample of a radial function: coordinate, value, first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub r: T,
    pub u: T,
    pub s: T,
    pub ds: T,
}

/// Equation a field is a candidate solution of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldEquation<T> {
    /// `-Delta_p u + |grad u|^q = 0`.
    HamiltonJacobi(Exponents<T>),
    /// `Delta_p v = 0`.
    PHarmonic { p: T },
}

impl<T: Scalar> FieldEquation<T> {
    pub fn p(&self) -> T {
        match self {
            FieldEquation::HamiltonJacobi(e) => e.p(),
            FieldEquation::PHarmonic { p } => *p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    OdeIntegration,
    Quadrature,
    ClosedForm,
    EnergyMinimization,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::OdeIntegration => "ode_integration",
            Provenance::Quadrature => "quadrature",
            Provenance::ClosedForm => "closed_form",
            Provenance::EnergyMinimization => "energy_minimization",
        })
    }
}

/// How a field ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldStatus<T> {
    /// Samples cover the requested range.
    Complete,
    /// The slope escaped to infinity; `at` estimates the blow-up coordinate.
    BlewUp { at: T },
    /// Integration stopped where the slope reached the degenerate level (p < 2).
    Degenerate { at: T },
}

impl<T: Scalar> fmt::Display for FieldStatus<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldStatus::Complete => f.write_str("complete"),
            FieldStatus::BlewUp { at } => write!(f, "blew_up(r={})", fmt_sig17(*at)),
            FieldStatus::Degenerate { at } => write!(f, "degenerate(r={})", fmt_sig17(*at)),
        }
    }
}

/// Uniformly spaced coordinate samples `start, ..., end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformSamples<T> {
    pub start: T,
    pub end: T,
    pub count: usize,
}

impl<T: Scalar> UniformSamples<T> {
    pub fn new(start: T, end: T, count: usize) -> Result<Self> {
        if count < 2 || !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::Domain(format!("sample range [{start}, {end}] with {count} points is invalid")));
        }
        Ok(Self { start, end, count })
    }

    pub fn points(&self) -> Vec<T> {
        let m = from_usize::<T>(self.count - 1);
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.end
                } else {
                    self.start + (self.end - self.start) * from_usize::<T>(i) / m
                }
            })
            .collect()
    }
}

/// Sampled radial or horospherical function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField<T> {
    manifold: ModelManifold<T>,
    equation: FieldEquation<T>,
    provenance: Provenance,
    status: FieldStatus<T>,
    samples: Vec<Sample<T>>,
}

impl<T: Scalar> RadialField<T> {
    /// Builds a field, checking that coordinates are admissible and strictly increasing.
    pub fn new(
        manifold: ModelManifold<T>,
        equation: FieldEquation<T>,
        provenance: Provenance,
        status: FieldStatus<T>,
        samples: Vec<Sample<T>>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("field has no samples".into()));
        }
        for smp in &samples {
            manifold.check_coordinate(smp.r)?;
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[1].r > w[0].r)) {
            return Err(Error::Domain(format!("sample coordinates not increasing at {}", w[1].r)));
        }
        Ok(Self { manifold, equation, provenance, status, samples })
    }

    pub fn manifold(&self) -> &ModelManifold<T> {
        &self.manifold
    }

    pub fn equation(&self) -> FieldEquation<T> {
        self.equation
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn status(&self) -> FieldStatus<T> {
        self.status
    }

    pub fn samples(&self) -> &[Sample<T>] {
        &self.samples
    }

    pub fn first(&self) -> Sample<T> {
        self.samples[0]
    }

    pub fn last(&self) -> Sample<T> {
        self.samples[self.samples.len() - 1]
    }

    /// Largest `|s|` over the samples with `r <= r_cap`, with its coordinate.
    pub fn max_slope_up_to(&self, r_cap: T) -> Option<(T, T)> {
        self.samples
            .iter()
            .filter(|smp| smp.r <= r_cap)
            .map(|smp| (smp.s.abs(), smp.r))
            .fold(None, |acc, x| match acc {
                Some(a) if a.0 >= x.0 => Some(a),
                _ => Some(x),
            })
    }

    /// Pointwise residual of the field's own equation.
    ///
    /// Hamilton-Jacobi fields use `-Delta_p u + |u'|^q`, p-harmonic fields
    /// `Delta_p v`, both from the stored `u'` and `u''`.
    pub fn equation_residuals(&self) -> Result<Vec<T>> {
        self.samples
            .iter()
            .map(|smp| {
                let lap = self.manifold.radial_p_laplacian(self.equation.p(), smp.r, smp.s, smp.ds)?;
                Ok(match self.equation {
                    FieldEquation::HamiltonJacobi(e) => -lap + smp.s.abs().powf(e.q()),
                    FieldEquation::PHarmonic { .. } => lap,
                })
            })
            .collect()
    }

    /// Largest absolute value of [`Self::equation_residuals`].
    pub fn equation_residual(&self) -> Result<T> {
        Ok(self.equation_residuals()?.into_iter().fold(T::zero(), |m, x| m.max(x.abs())))
    }

    /// Radial flux `f^{n-1} |v'|^{p-2} v'` at every sample.
    pub fn fluxes(&self) -> Result<Vec<T>> {
        let p = self.equation.p();
        let n1 = from_usize::<T>(self.manifold.dim() - 1);
        self.samples
            .iter()
            .map(|smp| {
                let f = self.manifold.warping(smp.r)?.f;
                let g = if smp.s == T::zero() { T::zero() } else { smp.s.abs().powf(p - lit(2.0)) * smp.s };
                Ok(f.powf(n1) * g)
            })
            .collect()
    }

    /// Writes `r,u,s` rows preceded by `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# manifold={}", describe_manifold(&self.manifold))?;
        match self.equation {
            FieldEquation::HamiltonJacobi(e) => {
                writeln!(out, "# equation=hamilton_jacobi p={} q={}", fmt_sig17(e.p()), fmt_sig17(e.q()))?
            }
            FieldEquation::PHarmonic { p } => writeln!(out, "# equation=p_harmonic p={}", fmt_sig17(p))?,
        }
        writeln!(out, "# provenance={}", self.provenance)?;
        writeln!(out, "# status={}", self.status)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "u", "s"])?;
        for smp in &self.samples {
            w.write_record([fmt_sig17(smp.r), fmt_sig17(smp.u), fmt_sig17(smp.s)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Short text form of a manifold used in CSV metadata.
pub fn describe_manifold<T: Scalar>(m: &ModelManifold<T>) -> String {
    match m.kind() {
        ModelKind::Euclidean => format!("euclidean n={}", m.dim()),
        ModelKind::Hyperbolic { b } => format!("hyperbolic B={} n={}", fmt_sig17(b), m.dim()),
        ModelKind::LogModel { b } => format!("log_model B={} n={}", fmt_sig17(b), m.dim()),
    }
}

/// Integrates slopes into values with the cubic Hermite rule, starting from `u0`.
///
/// Each step adds `h (s_i + s_{i+1})/2 + h^2 (s'_i - s'_{i+1})/12`, which is
/// exact for cubic `u`.
pub fn recover_values<T: Scalar>(samples: &mut [Sample<T>], u0: T) {
    let Some(first) = samples.first_mut() else { return };
    first.u = u0;
    let half = lit::<T>(0.5);
    let twelfth = lit::<T>(1.0 / 12.0);
    for i in 1..samples.len() {
        let (a, b) = (samples[i - 1], samples[i]);
        let h = b.r - a.r;
        samples[i].u = a.u + h * (a.s + b.s) * half + h * h * (a.ds - b.ds) * twelfth;
    }
}

/// Slope `κ = ((n-1)B)^{1/(q+1-p)}` of the exact linear solution on the log model.
pub fn constant_slope<T: Scalar>(n: usize, b: T, e: &Exponents<T>) -> T {
    let base = from_usize::<T>(n - 1) * b;
    if base == T::zero() {
        T::zero()
    } else {
        base.powf(e.e1().recip())
    }
}

/// Exact solution `u(t) = κ t` of the Hamilton-Jacobi equation on the log model
/// of curvature scale `b`, sampled on `range`. With `b = 0` the field is constant.
pub fn constant_slope_solution<T: Scalar>(
    n: usize,
    b: T,
    e: Exponents<T>,
    range: UniformSamples<T>,
) -> Result<RadialField<T>> {
    let manifold = ModelManifold::log_model(b, n)?;
    let kappa = constant_slope(n, b, &e);
    let samples = range.points().into_iter().map(|t| Sample { r: t, u: kappa * t, s: kappa, ds: T::zero() }).collect();
    RadialField::new(manifold, FieldEquation::HamiltonJacobi(e), Provenance::ClosedForm, FieldStatus::Complete, samples)
}

/// Exact p-harmonic function `v(t) = exp(-(n-1)B t/(p-1))` on the log model.
pub fn exact_p_harmonic_log_model<T: Scalar>(n: usize, b: T, p: T, range: UniformSamples<T>) -> Result<RadialField<T>> {
    if !(p > T::one()) {
        return Err(Error::Domain(format!("p = {p} must be > 1")));
    }
    let manifold = ModelManifold::log_model(b, n)?;
    let rate = from_usize::<T>(n - 1) * b / (p - T::one());
    let samples = range
        .points()
        .into_iter()
        .map(|t| {
            let v = (-rate * t).exp();
            Sample { r: t, u: v, s: -rate * v, ds: rate * rate * v }
        })
        .collect();
    RadialField::new(manifold, FieldEquation::PHarmonic { p }, Provenance::ClosedForm, FieldStatus::Complete, samples)
}

/// Residuals of the equation satisfied by `z = |grad u|^2`,
/// `-Delta u - ((p-2)/2) <grad z, grad u>/z + z^{(q+2-p)/2} = 0`, at every sample.
pub fn z_equation_residuals<T: Scalar>(field: &RadialField<T>) -> Result<Vec<T>> {
    let FieldEquation::HamiltonJacobi(e) = field.equation() else {
        return Err(Error::Config("z-equation residual needs a Hamilton-Jacobi field".into()));
    };
    let n1 = from_usize::<T>(field.manifold().dim() - 1);
    let half = lit::<T>(0.5);
    field
        .samples()
        .iter()
        .map(|smp| {
            let z = smp.s * smp.s;
            if !(z > T::zero()) {
                return Err(Error::Degenerate(format!("gradient vanishes at {}", smp.r)));
            }
            let h = field.manifold().warping(smp.r)?.log_derivative;
            let laplacian = smp.ds + n1 * h * smp.s;
            let dz = lit::<T>(2.0) * smp.s * smp.ds;
            Ok(-laplacian - (e.p() - lit(2.0)) * half * dz * smp.s / z + z.powf(e.e2() * half))
        })
        .collect()
}

/// Largest absolute value of [`z_equation_residuals`].
pub fn z_equation_residual<T: Scalar>(field: &RadialField<T>) -> Result<T> {
    Ok(z_equation_residuals(field)?.into_iter().fold(T::zero(), |m, x| m.max(x.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ex(p: f64, q: f64) -> Exponents<f64> {
        Exponents::new(p, q).unwrap()
    }

    fn range() -> UniformSamples<f64> {
        UniformSamples::new(-2.0, 2.0, 41).unwrap()
    }

    #[test]
    fn constant_slope_examples() {
        let f = constant_slope_solution(2, 1.0, ex(2.0, 2.0), range()).unwrap();
        assert_eq!(f.first().s, 1.0);
        assert!(f.equation_residual().unwrap() < 1e-14);
        let f = constant_slope_solution(3, 1.0, ex(2.0, 3.0), range()).unwrap();
        assert_relative_eq!(f.first().s, 2f64.sqrt(), max_relative = 1e-15);
        assert!(f.equation_residual().unwrap() < 1e-14);
        let f = constant_slope_solution(5, 2.0, ex(2.5, 2.5), range()).unwrap();
        assert_relative_eq!(f.first().s, 8.0, max_relative = 1e-15);
        assert!(f.equation_residual().unwrap() < 1e-12);
    }

    #[test]
    fn constant_slope_with_zero_curvature_is_constant() {
        let f = constant_slope_solution(3, 0.0, ex(2.0, 2.0), range()).unwrap();
        assert!(f.samples().iter().all(|s| s.u == 0.0 && s.s == 0.0));
        assert_eq!(f.equation_residual().unwrap(), 0.0);
    }

    #[test]
    fn z_residual_of_constant_slope_vanishes() {
        for &(n, b, p, q) in &[(2, 1.0, 2.0, 2.0), (3, 0.5, 1.5, 2.0), (5, 2.0, 3.0, 4.0)] {
            let f = constant_slope_solution(n, b, ex(p, q), range()).unwrap();
            assert!(z_equation_residual(&f).unwrap() < 1e-12);
        }
    }

    #[test]
    fn z_residual_rejects_zero_slope() {
        let f = constant_slope_solution(3, 0.0, ex(2.0, 2.0), range()).unwrap();
        assert!(matches!(z_equation_residual(&f), Err(Error::Degenerate(_))));
    }

    #[test]
    fn exact_log_model_p_harmonic() {
        for &(n, b, p) in &[(2, 1.0, 2.0), (3, 1.0, 1.5), (5, 2.0, 4.0)] {
            let f = exact_p_harmonic_log_model(n, b, p, range()).unwrap();
            let scale = f.samples().iter().fold(0.0f64, |m, s| m.max(s.s.abs().powf(p - 1.0)));
            assert!(f.equation_residual().unwrap() <= 1e-13 * scale);
            let flux = f.fluxes().unwrap();
            for x in &flux {
                assert_relative_eq!(*x, flux[0], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn hermite_recovery_exact_for_cubics() {
        let mut samples: Vec<Sample<f64>> = [0.0, 0.3, 0.35, 1.0, 1.7]
            .iter()
            .map(|&r| Sample { r, u: 0.0, s: 3.0 * r * r - 2.0, ds: 6.0 * r })
            .collect();
        recover_values(&mut samples, 1.0);
        for smp in &samples {
            assert_relative_eq!(smp.u, 1.0 + smp.r.powi(3) - 2.0 * smp.r, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_non_increasing_samples() {
        let m = ModelManifold::euclidean(3).unwrap();
        let s = |r| Sample { r, u: 0.0, s: 0.0, ds: 0.0 };
        let err = RadialField::new(m, FieldEquation::PHarmonic { p: 2.0 }, Provenance::ClosedForm, FieldStatus::Complete, vec![s(1.0), s(1.0)]);
        assert!(err.is_err());
        let err = RadialField::new(m, FieldEquation::PHarmonic { p: 2.0 }, Provenance::ClosedForm, FieldStatus::Complete, vec![s(-1.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn csv_has_metadata_and_columns() {
        let f = constant_slope_solution(2, 1.0, ex(2.0, 2.0), UniformSamples::new(0.0, 1.0, 3).unwrap()).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("# manifold=log_model"));
        assert_eq!(lines[2], "# provenance=closed_form");
        assert_eq!(lines[3], "# status=complete");
        assert_eq!(lines[4], "r,u,s");
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[7], "1.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0");
    }
}
