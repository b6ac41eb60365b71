//! Adaptive Dormand-Prince integration of the reduced slope equation
//! `(p-1) s' = s^{q+2-p} - (n-1)(f'/f) s` on the monotone branch `s >= 0`.

use super::{recover_values, FieldEquation, FieldStatus, Provenance, RadialField, Sample, UniformSamples};
use crate::error::{Error, Result};
use crate::geometry::ModelManifold;
use crate::proof_constants::Exponents;
use crate::scalar::{from_usize, lit, Scalar};

/// Integration controls. [`OdeOptions::new`] fills the defaults from `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions<T> {
    /// Mixed absolute/relative local error tolerance.
    pub tol: T,
    pub max_steps: usize,
    /// Slope level beyond which the solution is classified as blowing up.
    pub blowup_level: T,
    /// For `p < 2`, slope level at which integration stops as degenerate.
    pub degeneracy_level: T,
}

impl<T: Scalar> OdeOptions<T> {
    pub fn new(tol: T) -> Self {
        Self {
            tol,
            max_steps: 2_000_000,
            blowup_level: lit::<T>(1e12).max(tol.recip()),
            degeneracy_level: lit(1e-12),
        }
    }
}

/// Samples of the identically zero solution.
const ZERO_FIELD_SAMPLES: usize = 101;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the fifth- and embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct SlopeEquation<T> {
    manifold: ModelManifold<T>,
    e2: T,
    n1: T,
    inv_p1: T,
}

impl<T: Scalar> SlopeEquation<T> {
    fn rhs(&self, r: T, s: T) -> Result<T> {
        let h = self.manifold.warping(r)?.log_derivative;
        let growth = if s > T::zero() { s.powf(self.e2) } else { T::zero() };
        Ok((growth - self.n1 * h * s) * self.inv_p1)
    }

    /// Whether `s^{q+2-p}` exceeds the drift term `(n-1)(f'/f)s` a thousandfold.
    fn growth_dominates(&self, r: T, s: T) -> Result<bool> {
        let h = self.manifold.warping(r)?.log_derivative;
        Ok(s.powf(self.e2) >= lit::<T>(1e3) * self.n1 * h.abs() * s)
    }
}

/// Integrates the radial Hamilton-Jacobi slope equation from `s(r0) = s0`
/// towards `r_max` with default options for `tol`.
pub fn solve_radial_hj<T: Scalar>(
    m: &ModelManifold<T>,
    e: Exponents<T>,
    s0: T,
    r0: T,
    r_max: T,
    tol: T,
) -> Result<RadialField<T>> {
    solve_radial_hj_with(m, e, s0, r0, r_max, OdeOptions::new(tol))
}

/// As [`solve_radial_hj`] with explicit options.
///
/// The returned field ends `Complete` at `r_max`, `BlewUp` once the slope
/// exceeds `blowup_level` (the blow-up coordinate is extrapolated from the
/// dominant `s^{q+2-p}` growth), or `Degenerate` when `p < 2` and the slope
/// decays to `degeneracy_level`. Values `u` start at zero.
pub fn solve_radial_hj_with<T: Scalar>(
    m: &ModelManifold<T>,
    e: Exponents<T>,
    s0: T,
    r0: T,
    r_max: T,
    opts: OdeOptions<T>,
) -> Result<RadialField<T>> {
    if !(opts.tol > T::zero()) {
        return Err(Error::Domain(format!("tolerance {} must be > 0", opts.tol)));
    }
    if !(s0 >= T::zero()) || !s0.is_finite() {
        return Err(Error::Domain(format!("initial slope {s0} must be finite and >= 0")));
    }
    m.check_coordinate(r0)?;
    if !(r_max > r0) || !r_max.is_finite() {
        return Err(Error::Domain(format!("r_max = {r_max} must exceed r0 = {r0}")));
    }
    let eq = SlopeEquation {
        manifold: *m,
        e2: e.e2(),
        n1: from_usize(m.dim() - 1),
        inv_p1: (e.p() - T::one()).recip(),
    };
    let equation = FieldEquation::HamiltonJacobi(e);
    if s0 == T::zero() {
        let samples = UniformSamples::new(r0, r_max, ZERO_FIELD_SAMPLES)?
            .points()
            .into_iter()
            .map(|r| Sample { r, u: T::zero(), s: T::zero(), ds: T::zero() })
            .collect();
        return RadialField::new(*m, equation, Provenance::OdeIntegration, FieldStatus::Complete, samples);
    }

    let degenerate_p = e.p() < lit(2.0);
    let tiny = lit::<T>(1e-14);
    let mut r = r0;
    let mut s = s0;
    let mut k1 = eq.rhs(r, s)?;
    let mut samples = vec![Sample { r, u: T::zero(), s, ds: k1 }];
    let span = r_max - r0;
    let mut h = (span * lit(1e-3)).min(if k1 != T::zero() { lit::<T>(0.01) * s / k1.abs() } else { span });
    h = h.max(tiny * r.abs().max(T::one()));
    let mut status = FieldStatus::Complete;
    let mut steps = 0usize;

    while r < r_max {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Solver(format!(
                "step budget {} exhausted at r = {r}, s = {s}",
                opts.max_steps
            )));
        }
        let last = h >= r_max - r;
        if last {
            h = r_max - r;
        }
        let trial = step(&eq, r, s, k1, h);
        let accepted = match trial {
            Ok((s_new, k7, err_est)) if s_new.is_finite() => {
                let scale = opts.tol * (T::one() + s.abs().max(s_new.abs()));
                let ratio = err_est.abs() / scale;
                if ratio <= T::one() {
                    r = if last { r_max } else { r + h };
                    s = s_new;
                    k1 = k7;
                    samples.push(Sample { r, u: T::zero(), s, ds: k1 });
                    h = h * step_factor(ratio, lit(5.0));
                    true
                } else {
                    h = h * step_factor(ratio, T::one());
                    false
                }
            }
            _ => {
                h = h * lit(0.2);
                false
            }
        };
        let floor = (tiny * r.abs()).max(T::min_positive_value());
        // Remaining distance to blow-up predicted by the dominant growth term.
        let remaining = blowup_estimate(&e, r, s) - r;
        let dominant = s > T::zero() && eq.growth_dominates(r, s)?;
        let imminent = dominant && remaining <= floor;
        if accepted && (s > opts.blowup_level || imminent) {
            status = FieldStatus::BlewUp { at: blowup_estimate(&e, r, s).min(r_max) };
            break;
        }
        if accepted && degenerate_p && s <= opts.degeneracy_level {
            status = FieldStatus::Degenerate { at: r };
            break;
        }
        if h < floor && r < r_max {
            // Step sizes track a fixed fraction of the remaining distance, so a
            // collapse within that regime is the singularity itself.
            if (dominant && remaining <= lit::<T>(1e3) * floor) || s > lit(1e12) {
                status = FieldStatus::BlewUp { at: blowup_estimate(&e, r, s).min(r_max) };
                break;
            }
            return Err(Error::Solver(format!("step size collapsed at r = {r} with s = {s}")));
        }
    }
    recover_values(&mut samples, T::zero());
    RadialField::new(*m, equation, Provenance::OdeIntegration, status, samples)
}

/// Remaining distance to blow-up of `(p-1)s' = s^{q+2-p}` from level `s`, added to `r`.
fn blowup_estimate<T: Scalar>(e: &Exponents<T>, r: T, s: T) -> T {
    r + (e.p() - T::one()) / (e.e1() * s.powf(e.e1()))
}

fn step_factor<T: Scalar>(ratio: T, max_growth: T) -> T {
    if ratio == T::zero() {
        return max_growth;
    }
    (lit::<T>(0.9) * ratio.powf(lit(-0.2))).max(lit(0.2)).min(max_growth)
}

/// One Dormand-Prince step. Returns the new slope, its derivative and the error estimate.
fn step<T: Scalar>(eq: &SlopeEquation<T>, r: T, s: T, k1: T, h: T) -> Result<(T, T, T)> {
    let mut k = [T::zero(); 7];
    k[0] = k1;
    for i in 1..7 {
        let mut acc = s;
        for (j, kj) in k.iter().enumerate().take(i) {
            acc = acc + h * lit::<T>(A[i][j]) * *kj;
        }
        if !acc.is_finite() {
            return Err(Error::Solver("non-finite stage".into()));
        }
        // The stage-7 abscissa coincides with the step end; use that value exactly.
        let ri = if i >= 5 { r + h } else { r + h * lit::<T>(C[i]) };
        k[i] = eq.rhs(ri, acc.max(T::zero()))?;
        if i == 6 {
            let err = k.iter().zip(E.iter()).fold(T::zero(), |a, (kk, ee)| a + *kk * lit::<T>(*ee)) * h;
            return Ok((acc, k[6], err));
        }
    }
    unreachable!("the loop returns at the seventh stage")
}
