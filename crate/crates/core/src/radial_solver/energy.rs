//! Discrete radial p-Dirichlet energy minimization on an annulus.
//!
//! The energy `sum_i (1/p)|g_i|^p f(m_i)^{n-1} h`, with element slopes `g_i`
//! and midpoints `m_i`, is convex in the nodal values. It is minimized by damped
//! Newton steps on its tridiagonal Hessian with Armijo backtracking.

use super::{FieldEquation, FieldStatus, Provenance, RadialField, Sample};
use crate::error::{Error, Result};
use crate::geometry::ModelManifold;
use crate::scalar::{from_usize, lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions<T> {
    /// Relative energy decrease below which a short step ends the iteration.
    pub rel_energy_tol: T,
    /// Nodal step size, relative to `1 + max|v|`, treated as converged.
    pub step_tol: T,
    pub max_iter: usize,
    pub armijo: T,
}

impl<T: Scalar> Default for EnergyOptions<T> {
    fn default() -> Self {
        Self { rel_energy_tol: lit(1e-14), step_tol: lit(1e-12), max_iter: 200, armijo: lit(1e-4) }
    }
}

/// Diagnostics of a converged minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport<T> {
    pub iterations: usize,
    pub energy: T,
    pub last_step: T,
    pub last_rel_decrease: T,
}

struct Problem<T> {
    p: T,
    h: T,
    weights: Vec<T>,
}

impl<T: Scalar> Problem<T> {
    fn slopes(&self, v: &[T]) -> Vec<T> {
        v.windows(2).map(|w| (w[1] - w[0]) / self.h).collect()
    }

    fn energy(&self, v: &[T]) -> T {
        let inv_p = self.p.recip();
        self.slopes(v)
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (g, w)| acc + g.abs().powf(self.p) * *w)
            * inv_p
            * self.h
    }
}

/// Minimizes the discrete p-energy over piecewise-linear `v` on `mesh_size`
/// equal elements of `annulus` with `v = boundary` at the ends.
pub fn p_harmonic_energy_minimizer<T: Scalar>(
    m: &ModelManifold<T>,
    p: T,
    annulus: (T, T),
    boundary: (T, T),
    mesh_size: usize,
    opts: EnergyOptions<T>,
) -> Result<(RadialField<T>, EnergyReport<T>)> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::Domain(format!("p = {p} must be finite and > 1")));
    }
    if mesh_size < 16 {
        return Err(Error::Domain(format!("mesh size {mesh_size} must be >= 16")));
    }
    let (ra, rb) = annulus;
    m.check_coordinate(ra)?;
    m.check_coordinate(rb)?;
    if !(rb > ra) {
        return Err(Error::Domain(format!("annulus [{ra}, {rb}] is empty")));
    }
    let nn = mesh_size;
    let h = (rb - ra) / from_usize(nn);
    let node = |i: usize| if i == nn { rb } else { ra + h * from_usize::<T>(i) };
    let n1 = from_usize::<T>(m.dim() - 1);
    let weights = (0..nn)
        .map(|i| Ok(m.warping(ra + h * (from_usize::<T>(i) + lit(0.5)))?.f.powf(n1)))
        .collect::<Result<Vec<T>>>()?;
    let prob = Problem { p, h, weights };

    let (va, vb) = boundary;
    let mut v: Vec<T> = (0..=nn).map(|i| va + (vb - va) * from_usize::<T>(i) / from_usize(nn)).collect();
    v[nn] = vb;
    let mut energy = prob.energy(&v);
    let mut report = EnergyReport { iterations: 0, energy, last_step: T::zero(), last_rel_decrease: T::zero() };

    let mut converged = va == vb;
    while !converged {
        if report.iterations >= opts.max_iter {
            return Err(Error::Solver(format!(
                "energy minimization did not converge in {} iterations: energy {}, last step {}, last relative decrease {}",
                opts.max_iter, energy, report.last_step, report.last_rel_decrease
            )));
        }
        report.iterations += 1;
        let g = prob.slopes(&v);
        let g_floor = g.iter().fold(T::zero(), |a, x| a.max(x.abs())) * lit(1e-12);
        let mut flux = Vec::with_capacity(nn);
        let mut stiff = Vec::with_capacity(nn);
        for (gi, wi) in g.iter().zip(&prob.weights) {
            let a = gi.abs().max(g_floor).max(T::min_positive_value());
            let pw = a.powf(p - lit(2.0)) * *wi;
            flux.push(pw * *gi);
            stiff.push((p - T::one()) * pw / h);
        }
        // Gradient and Hessian with respect to the interior nodes 1..nn-1.
        let grad: Vec<T> = (1..nn).map(|j| flux[j - 1] - flux[j]).collect();
        let diag: Vec<T> = (1..nn).map(|j| stiff[j - 1] + stiff[j]).collect();
        let off: Vec<T> = (1..nn - 1).map(|j| -stiff[j]).collect();
        let rhs: Vec<T> = grad.iter().map(|x| -*x).collect();
        let d = solve_tridiagonal(&off, &diag, &off, &rhs)?;
        let slope = grad.iter().zip(&d).fold(T::zero(), |a, (x, y)| a + *x * *y);
        if !(slope < T::zero()) {
            break;
        }
        let d_max = d.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        let v_max = v.iter().fold(T::zero(), |a, x| a.max(x.abs()));

        let mut t = T::one();
        let mut trial = v.clone();
        let accepted = loop {
            for j in 1..nn {
                trial[j] = v[j] + t * d[j - 1];
            }
            let e_new = prob.energy(&trial);
            if e_new <= energy + opts.armijo * t * slope {
                break Some(e_new);
            }
            t = t * lit(0.5);
            if t < lit(1e-12) {
                break None;
            }
        };
        let e_new = match accepted {
            Some(e) => e,
            // Inside the quadratic region the Armijo test is lost in rounding.
            None if d_max <= lit::<T>(1e-8) * (T::one() + v_max) => {
                t = T::one();
                for j in 1..nn {
                    trial[j] = v[j] + d[j - 1];
                }
                prob.energy(&trial)
            }
            None => {
                return Err(Error::Solver(format!(
                    "line search failed at iteration {}: energy {}, Newton step {}",
                    report.iterations, energy, d_max
                )))
            }
        };
        let step = t * d_max;
        let rel = (energy - e_new) / e_new.abs().max(T::min_positive_value());
        v = trial;
        energy = e_new;
        report.last_step = step;
        report.last_rel_decrease = rel;
        let step_scale = T::one() + v_max;
        converged = step <= opts.step_tol * step_scale
            || (rel.abs() < opts.rel_energy_tol && step <= opts.step_tol.sqrt() * step_scale);
    }
    report.energy = energy;

    let g = prob.slopes(&v);
    let samples = (0..=nn)
        .map(|i| {
            let (s, ds) = if i == 0 {
                (g[0], (g[1] - g[0]) / h)
            } else if i == nn {
                (g[nn - 1], (g[nn - 1] - g[nn - 2]) / h)
            } else {
                ((g[i - 1] + g[i]) * lit(0.5), (g[i] - g[i - 1]) / h)
            };
            Sample { r: node(i), u: v[i], s, ds }
        })
        .collect();
    let field = RadialField::new(*m, FieldEquation::PHarmonic { p }, Provenance::EnergyMinimization, FieldStatus::Complete, samples)?;
    Ok((field, report))
}

/// Thomas algorithm for `sub[i-1] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
fn solve_tridiagonal<T: Scalar>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut x = vec![T::zero(); n];
    let mut beta = diag[0];
    if beta == T::zero() {
        return Err(Error::Solver("singular Hessian".into()));
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i - 1] * c[i];
        if beta == T::zero() || !beta.is_finite() {
            return Err(Error::Solver("singular Hessian".into()));
        }
        x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] = x[i] - c[i + 1] * next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::super::{fit_flux, p_harmonic_radial_quadrature, UniformSamples};
    use super::*;
    use approx::assert_relative_eq;

    fn minimize(m: &ModelManifold<f64>, p: f64, ann: (f64, f64), bnd: (f64, f64), mesh: usize) -> RadialField<f64> {
        p_harmonic_energy_minimizer(m, p, ann, bnd, mesh, EnergyOptions::default()).unwrap().0
    }

    fn max_deviation_from_quadrature(m: &ModelManifold<f64>, p: f64, ann: (f64, f64), bnd: (f64, f64), mesh: usize) -> f64 {
        let f = minimize(m, p, ann, bnd, mesh);
        let c = fit_flux(m, p, ann, bnd).unwrap();
        let q = p_harmonic_radial_quadrature(m, p, c, UniformSamples::new(ann.0, ann.1, mesh + 1).unwrap(), bnd.0).unwrap();
        f.samples().iter().zip(q.samples()).fold(0.0, |a, (x, y)| a.max((x.u - y.u).abs()))
    }

    #[test]
    fn tridiagonal_solver() {
        let x = solve_tridiagonal(&[1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0], &[5.0, 6.0, 5.0]).unwrap();
        for xi in x {
            assert_relative_eq!(xi, 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn equal_boundary_gives_constant() {
        let m = ModelManifold::hyperbolic(1.0, 3).unwrap();
        let f = minimize(&m, 3.0, (0.5, 2.0), (1.5, 1.5), 64);
        assert!(f.samples().iter().all(|s| s.u == 1.5));
    }

    #[test]
    fn flat_harmonic_is_inverse_radius() {
        let m = ModelManifold::euclidean(3).unwrap();
        let f = minimize(&m, 2.0, (0.5, 1.0), (2.0, 1.0), 4096);
        for smp in f.samples() {
            assert_relative_eq!(smp.u, 1.0 / smp.r, epsilon = 1e-7);
        }
    }

    #[test]
    fn matches_quadrature_hyperbolic_p4() {
        assert!(max_deviation_from_quadrature(&ModelManifold::hyperbolic(1.0, 3).unwrap(), 4.0, (0.5, 2.0), (1.0, 0.0), 1 << 14) <= 1e-6);
    }

    #[test]
    fn matches_quadrature_sublinear_p() {
        assert!(max_deviation_from_quadrature(&ModelManifold::euclidean(2).unwrap(), 1.5, (0.5, 2.0), (0.0, 1.0), 1 << 12) <= 1e-6);
    }

    #[test]
    fn rejects_small_mesh_and_empty_annulus() {
        let m = ModelManifold::euclidean(3).unwrap();
        assert!(p_harmonic_energy_minimizer(&m, 2.0, (0.5, 1.0), (1.0, 0.0), 8, EnergyOptions::default()).is_err());
        assert!(p_harmonic_energy_minimizer(&m, 2.0, (1.0, 1.0), (1.0, 0.0), 32, EnergyOptions::default()).is_err());
    }

    #[test]
    fn iteration_budget_reports_diagnostics() {
        let m = ModelManifold::hyperbolic(1.0, 3).unwrap();
        let opts = EnergyOptions { max_iter: 1, ..EnergyOptions::default() };
        match p_harmonic_energy_minimizer(&m, 4.0, (0.5, 2.0), (1.0, 0.0), 256, opts) {
            Err(Error::Solver(msg)) => assert!(msg.contains("did not converge")),
            other => panic!("expected solver error, got {other:?}"),
        }
    }
}
