//! Gradient, Harnack and Liouville checks on sampled solutions.

use std::io::Write;

use crate::barrier::BarrierParams;
use crate::error::{Error, Result};
use crate::geometry::{CurvatureData, ModelManifold};
use crate::proof_constants::{barrier_lambda_mu, fmt_sig17, Exponents, ProofConstants};
use crate::radial_solver::{
    constant_slope, solve_radial_hj, FieldEquation, FieldStatus, RadialField, Sample,
};
use crate::scalar::{lit, Scalar};

/// Relative slack allowed when comparing an observed value with a bound.
pub const BOUND_SLACK: f64 = 1e-12;

/// Result of comparing an observed supremum with a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOutcome<T> {
    pub bound_value: T,
    pub observed_sup: T,
    pub pass: bool,
    /// Coordinate at which the observed supremum (or worst ratio) occurs.
    pub witness: T,
}

impl<T: Scalar> EstimateOutcome<T> {
    pub fn new(bound_value: T, observed_sup: T, witness: T) -> Self {
        let pass = observed_sup <= bound_value * (T::one() + lit(BOUND_SLACK));
        Self { bound_value, observed_sup, pass, witness }
    }

    /// `(bound - observed) / bound`, or `bound - observed` for a zero bound.
    pub fn relative_margin(&self) -> T {
        let gap = self.bound_value - self.observed_sup;
        if self.bound_value > T::zero() {
            gap / self.bound_value
        } else {
            gap
        }
    }
}

/// Global bound `c_grad B^{1/(q+1-p)}`.
pub fn global_gradient_bound<T: Scalar>(e: &Exponents<T>, b: T, c_grad: T) -> T {
    if b == T::zero() {
        T::zero()
    } else {
        c_grad * b.powf(e.e1().recip())
    }
}

/// `bound / ((n-1)B)^{1/e1}`: how far the global bound sits above the exact slope.
pub fn sharpness_ratio<T: Scalar>(n: usize, e: &Exponents<T>, b: T, c_grad: T) -> T {
    global_gradient_bound(e, b, c_grad) / constant_slope(n, b, e)
}

/// Interior gradient bound at distance `d` from the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorBound<T> {
    /// `sqrt(lambda(d) d^{-4/e1} + A mu)`: the barrier at the centre of `B_d`.
    pub bound: T,
    /// `bound / max{B^{1/e1}, (1+B_p)^{1/(2e1)} d^{-1/(2e1)}}`.
    pub effective_c: T,
}

pub fn interior_gradient_bound<T: Scalar>(n: usize, e: &Exponents<T>, curvature: &CurvatureData<T>, d: T) -> Result<InteriorBound<T>> {
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::Domain(format!("boundary distance d = {d} must be finite and > 0")));
    }
    let coeffs = barrier_lambda_mu(n, e, curvature, d)?;
    let e1 = e.e1();
    let level = coeffs.lambda * d.powf(-lit::<T>(4.0) / e1) + coeffs.amplification * coeffs.mu;
    let bound = level.sqrt();
    let half_inv = (lit::<T>(2.0) * e1).recip();
    let scale = curvature
        .b
        .powf(e1.recip())
        .max((T::one() + curvature.b_p(e.p())).powf(half_inv) * d.powf(-half_inv));
    Ok(InteriorBound { bound, effective_c: bound / scale })
}

/// Checks `|u'(r)| <= interior bound at d(r)` where `d(r)` is the distance to
/// the ends of the field's coordinate range.
///
/// At most `max_points` samples are checked, evenly strided; the outcome
/// compares the worst ratio: `observed` and `bound` are taken at its witness.
pub fn interior_check<T: Scalar>(field: &RadialField<T>, curvature: &CurvatureData<T>, max_points: usize) -> Result<EstimateOutcome<T>> {
    let FieldEquation::HamiltonJacobi(e) = field.equation() else {
        return Err(Error::Config("interior check needs a Hamilton-Jacobi field".into()));
    };
    let (lo, hi) = (field.first().r, field.last().r);
    let samples = field.samples();
    let stride = (samples.len() / max_points.max(1)).max(1);
    let mut worst: Option<(T, EstimateOutcome<T>)> = None;
    for smp in samples.iter().step_by(stride) {
        let d = (smp.r - lo).min(hi - smp.r);
        if !(d > T::zero()) {
            continue;
        }
        let b = interior_gradient_bound(field.manifold().dim(), &e, curvature, d)?.bound;
        let ratio = smp.s.abs() / b;
        if worst.as_ref().is_none_or(|(w, _)| ratio > *w) {
            worst = Some((ratio, EstimateOutcome::new(b, smp.s.abs(), smp.r)));
        }
    }
    worst
        .map(|(_, o)| o)
        .ok_or_else(|| Error::Config("field has no interior samples".into()))
}

/// Compares `z = u'^2` with the barrier of `pc` centred at coordinate `center`,
/// along the coordinate line through the centre.
pub fn compare_to_barrier<T: Scalar>(field: &RadialField<T>, pc: &ProofConstants<T>, center: T) -> Result<EstimateOutcome<T>> {
    let bp = BarrierParams::from_constants(pc, true);
    let r_ball = bp.r_ball;
    let (lo, hi) = (field.first().r, field.last().r);
    if !(center - r_ball >= lo && center + r_ball <= hi) {
        return Err(Error::Config(format!(
            "ball of radius {r_ball} about {center} is not inside the field's range [{lo}, {hi}]"
        )));
    }
    if field.manifold().is_radial() && !(center - r_ball > T::zero()) {
        return Err(Error::Config("ball must avoid the pole".into()));
    }
    let inner = r_ball * (T::one() - lit(1e-6));
    let mut best: Option<(T, EstimateOutcome<T>)> = None;
    for smp in field.samples() {
        let dist = (smp.r - center).abs();
        if dist >= inner {
            continue;
        }
        let w = bp.eval(dist)?.w;
        let z = smp.s * smp.s;
        let ratio = z / w;
        if best.as_ref().is_none_or(|(q, _)| ratio > *q) {
            best = Some((ratio, EstimateOutcome::new(w, z, smp.r)));
        }
    }
    best.map(|(_, o)| o).ok_or_else(|| Error::Config("no samples inside the ball".into()))
}

/// `u = -(p-1) ln v` of a positive p-harmonic field; the result solves the
/// Hamilton-Jacobi equation with `q = p`.
pub fn log_transform<T: Scalar>(v_field: &RadialField<T>) -> Result<RadialField<T>> {
    let FieldEquation::PHarmonic { p } = v_field.equation() else {
        return Err(Error::Config("log transform needs a p-harmonic field".into()));
    };
    let pm = p - T::one();
    let samples = v_field
        .samples()
        .iter()
        .map(|smp| {
            if !(smp.u > T::zero()) {
                return Err(Error::Domain(format!("v = {} is not positive at {}", smp.u, smp.r)));
            }
            let g = smp.s / smp.u;
            Ok(Sample { r: smp.r, u: -pm * smp.u.ln(), s: -pm * g, ds: -pm * (smp.ds / smp.u - g * g) })
        })
        .collect::<Result<Vec<_>>>()?;
    RadialField::new(
        *v_field.manifold(),
        FieldEquation::HamiltonJacobi(Exponents::log_transformed(p)?),
        v_field.provenance(),
        v_field.status(),
        samples,
    )
}

/// `v = exp(-u/(p-1))` of a Hamilton-Jacobi field with `q = p`.
pub fn inverse_log_transform<T: Scalar>(u_field: &RadialField<T>) -> Result<RadialField<T>> {
    let FieldEquation::HamiltonJacobi(e) = u_field.equation() else {
        return Err(Error::Config("inverse transform needs a Hamilton-Jacobi field".into()));
    };
    if e.q() != e.p() {
        return Err(Error::Config(format!("inverse transform needs q = p, got p = {}, q = {}", e.p(), e.q())));
    }
    let pm = e.p() - T::one();
    let samples = u_field
        .samples()
        .iter()
        .map(|smp| {
            let v = (-smp.u / pm).exp();
            let g = -smp.s / pm;
            Sample { r: smp.r, u: v, s: g * v, ds: v * (g * g - smp.ds / pm) }
        })
        .collect();
    RadialField::new(*u_field.manifold(), FieldEquation::PHarmonic { p: e.p() }, u_field.provenance(), u_field.status(), samples)
}

/// Largest relative deviation between the values and slopes of two fields on the same coordinates.
pub fn max_relative_deviation<T: Scalar>(a: &RadialField<T>, b: &RadialField<T>) -> Result<T> {
    if a.samples().len() != b.samples().len() {
        return Err(Error::Config("fields have different sample counts".into()));
    }
    let rel = |x: T, y: T| {
        let scale = x.abs().max(y.abs());
        if scale == T::zero() {
            T::zero()
        } else {
            (x - y).abs() / scale
        }
    };
    Ok(a.samples().iter().zip(b.samples()).fold(T::zero(), |m, (x, y)| m.max(rel(x.u, y.u)).max(rel(x.s, y.s))))
}

/// Value of the field at coordinate `r` by cubic Hermite interpolation.
pub fn value_at<T: Scalar>(field: &RadialField<T>, r: T) -> Result<T> {
    let s = field.samples();
    let (lo, hi) = (field.first().r, field.last().r);
    if !(r >= lo && r <= hi) {
        return Err(Error::Domain(format!("coordinate {r} outside [{lo}, {hi}]")));
    }
    let i = s.partition_point(|smp| smp.r < r);
    if i < s.len() && s[i].r == r {
        return Ok(s[i].u);
    }
    let (a, b) = (s[i - 1], s[i]);
    let h = b.r - a.r;
    let t = (r - a.r) / h;
    let (t2, t3) = (t * t, t * t * t);
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    Ok(a.u * (two * t3 - three * t2 + T::one())
        + a.s * h * (t3 - two * t2 + t)
        + b.u * (three * t2 - two * t3)
        + b.s * h * (t3 - t2))
}

/// Harnack check between two points: `|ln v(x) - ln v(a)| <= c B |x - a|`.
pub fn harnack_check<T: Scalar>(v_field: &RadialField<T>, a: T, x: T, b: T, c_harnack: T) -> Result<EstimateOutcome<T>> {
    let (va, vx) = (value_at(v_field, a)?, value_at(v_field, x)?);
    if !(va > T::zero() && vx > T::zero()) {
        return Err(Error::Domain("Harnack check needs a positive function".into()));
    }
    Ok(EstimateOutcome::new(c_harnack * b * (x - a).abs(), (vx.ln() - va.ln()).abs(), x))
}

/// Harnack check over every pair of samples, with measured gradient ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnackSummary<T> {
    /// Bound `c B` against the largest `|ln v(x_j) - ln v(x_i)| / |x_j - x_i|`.
    pub outcome: EstimateOutcome<T>,
    /// Largest `|v'|/v` at the samples.
    pub gradient_ratio_sup: T,
    /// `(p-1) B`, the comparison level recorded alongside.
    pub reference_level: T,
}

/// All-pairs Harnack check. The largest difference quotient over all pairs is
/// attained by adjacent samples, so only those are scanned.
pub fn harnack_field_check<T: Scalar>(v_field: &RadialField<T>, b: T, c_harnack: T) -> Result<HarnackSummary<T>> {
    let FieldEquation::PHarmonic { p } = v_field.equation() else {
        return Err(Error::Config("Harnack check needs a p-harmonic field".into()));
    };
    let s = v_field.samples();
    let mut ratio_sup = T::zero();
    for smp in s {
        if !(smp.u > T::zero()) {
            return Err(Error::Domain(format!("v = {} is not positive at {}", smp.u, smp.r)));
        }
        ratio_sup = ratio_sup.max((smp.s / smp.u).abs());
    }
    let mut quotient = T::zero();
    let mut witness = s[0].r;
    for w in s.windows(2) {
        let dq = (w[1].u.ln() - w[0].u.ln()).abs() / (w[1].r - w[0].r);
        if dq > quotient {
            quotient = dq;
            witness = w[1].r;
        }
    }
    Ok(HarnackSummary {
        outcome: EstimateOutcome::new(c_harnack * b, quotient, witness),
        gradient_ratio_sup: ratio_sup,
        reference_level: (p - T::one()) * b,
    })
}

/// Classification of one Liouville sweep run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LiouvilleVerdict {
    BlewUp,
    /// No blow-up within a range shorter than the finding threshold.
    Inconclusive,
    /// No blow-up within the full threshold range: contradicts the Liouville property.
    Finding,
}

/// Range beyond which a surviving nonconstant run counts as a finding.
pub const LIOUVILLE_FINDING_RANGE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvilleEntry<T> {
    pub s0: T,
    pub verdict: LiouvilleVerdict,
    pub r_star: Option<T>,
    /// Blow-up coordinate at ten times tighter tolerance.
    pub r_star_reference: Option<T>,
    /// Closed-form blow-up coordinate on the flat planar model.
    pub r_star_exact: T,
}

impl<T: Scalar> LiouvilleEntry<T> {
    /// Relative change of `r*` under tolerance tightening.
    pub fn tolerance_drift(&self) -> Option<T> {
        match (self.r_star, self.r_star_reference) {
            (Some(a), Some(b)) => Some((a - b).abs() / b.abs()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleReport<T> {
    pub entries: Vec<LiouvilleEntry<T>>,
    /// Whether `r*` strictly decreases along increasing `s0`.
    pub monotone: bool,
}

impl<T: Scalar> LiouvilleReport<T> {
    pub fn all_blew_up(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == LiouvilleVerdict::BlewUp)
    }

    pub fn max_drift(&self) -> Option<T> {
        self.entries.iter().map(|e| e.tolerance_drift()).try_fold(T::zero(), |m, d| d.map(|d| m.max(d)))
    }
}

/// `r* = (p-1) / ((q+1-p) s0^{q+1-p})` for `(p-1)s' = s^{q+2-p}`, `s(0) = s0`.
pub fn planar_blowup_radius<T: Scalar>(e: &Exponents<T>, s0: T) -> T {
    (e.p() - T::one()) / (e.e1() * s0.powf(e.e1()))
}

/// Integrates from `s(0) = s0` on flat space in planar symmetry for every
/// `s0`, checking that each nonconstant solution blows up before `r_max`.
pub fn liouville_sweep<T: Scalar>(e: Exponents<T>, n: usize, s0_grid: &[T], r_max: T, tol: T) -> Result<LiouvilleReport<T>> {
    let m = ModelManifold::log_model(T::zero(), n)?;
    let mut sorted: Vec<T> = s0_grid.to_vec();
    if sorted.iter().any(|s| !(*s > T::zero())) {
        return Err(Error::Domain("Liouville sweep needs positive initial slopes".into()));
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite slopes"));
    let blowup = |f: &RadialField<T>| match f.status() {
        FieldStatus::BlewUp { at } => Some(at),
        _ => None,
    };
    let entries = sorted
        .iter()
        .map(|&s0| {
            let f = solve_radial_hj(&m, e, s0, T::zero(), r_max, tol)?;
            let r_star = blowup(&f);
            let r_star_reference = match r_star {
                Some(_) => blowup(&solve_radial_hj(&m, e, s0, T::zero(), r_max, tol / lit(10.0))?),
                None => None,
            };
            let verdict = match r_star {
                Some(_) => LiouvilleVerdict::BlewUp,
                None if r_max >= lit(LIOUVILLE_FINDING_RANGE) => LiouvilleVerdict::Finding,
                None => LiouvilleVerdict::Inconclusive,
            };
            Ok(LiouvilleEntry { s0, verdict, r_star, r_star_reference, r_star_exact: planar_blowup_radius(&e, s0) })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = entries.windows(2).all(|w| match (w[0].r_star, w[1].r_star) {
        (Some(a), Some(b)) => b < a,
        _ => false,
    });
    Ok(LiouvilleReport { entries, monotone })
}

/// One row of an outcome table.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRecord<T> {
    pub check: String,
    pub params: String,
    pub outcome: EstimateOutcome<T>,
}

pub const OUTCOME_HEADER: [&str; 6] = ["check_name", "params", "bound", "observed", "pass", "witness"];

pub fn write_outcomes_csv<T: Scalar, W: Write>(out: W, records: &[OutcomeRecord<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(OUTCOME_HEADER)?;
    for rec in records {
        let o = &rec.outcome;
        w.write_record([
            rec.check.clone(),
            rec.params.clone(),
            fmt_sig17(o.bound_value),
            fmt_sig17(o.observed_sup),
            o.pass.to_string(),
            fmt_sig17(o.witness),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scale used to normalize the residual of a transformed field: the size of
/// the terms `|u'|^p` and `(p-1)|u'|^{p-2}|u''|`.
pub fn transformed_residual_scale<T: Scalar>(u_field: &RadialField<T>) -> T {
    let FieldEquation::HamiltonJacobi(e) = u_field.equation() else {
        return T::one();
    };
    let p = e.p();
    u_field.samples().iter().fold(T::zero(), |m, smp| {
        let a = smp.s.abs();
        let term = a.powf(p) + (p - T::one()) * a.powf(p - lit(2.0)) * smp.ds.abs();
        m.max(term)
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof_constants::{gradient_constant, harnack_constant, limit_level};
    use crate::radial_solver::{
        constant_slope_solution, exact_p_harmonic_log_model, fit_flux, p_harmonic_radial_quadrature, UniformSamples,
    };
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ex(p: f64, q: f64) -> Exponents<f64> {
        Exponents::new(p, q).unwrap()
    }

    #[test]
    fn outcome_pass_rule_has_relative_slack() {
        assert!(EstimateOutcome::new(1.0, 1.0 + 0.5e-12, 0.0).pass);
        assert!(!EstimateOutcome::new(1.0, 1.0 + 2e-12, 0.0).pass);
        assert!(EstimateOutcome::new(0.0, 0.0, 0.0).pass);
    }

    #[test]
    fn global_bound_examples() {
        let e = ex(2.0, 2.0);
        let c = gradient_constant(2, &e).unwrap();
        assert_eq!(global_gradient_bound(&e, 0.0, c), 0.0);
        assert!(global_gradient_bound(&e, 1.0, c) >= 1.0);
        let e = ex(3.0, 2.5);
        let c = gradient_constant(3, &e).unwrap();
        let ratio = global_gradient_bound(&e, 2.0, c) / global_gradient_bound(&e, 1.0, c);
        assert_relative_eq!(ratio, 2f64.powf(1.0 / e.e1()), max_relative = 1e-14);
    }

    #[test]
    fn global_bound_equals_limit_level_at_every_curvature() {
        let e = ex(1.5, 1.2);
        let c = gradient_constant(3, &e).unwrap();
        for b in [0.5, 1.0, 2.0] {
            assert_relative_eq!(global_gradient_bound(&e, b, c), limit_level(3, &e, b).unwrap().sqrt(), max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn sharpness_sandwich(n in 2usize..7, p in 1.1f64..5.0, dq in 0.02f64..3.0, b in 0.1f64..5.0) {
            let e = ex(p, p - 1.0 + dq);
            let c = gradient_constant(n, &e).unwrap();
            prop_assert!(sharpness_ratio(n, &e, b, c) >= 1.0);
        }
    }

    #[test]
    fn interior_bound_reduces_to_global_branch_far_away() {
        let e = ex(2.0, 2.0);
        let curv = CurvatureData::new(1.0, 1.0).unwrap();
        let far = interior_gradient_bound(3, &e, &curv, 1e6).unwrap();
        let global = global_gradient_bound(&e, 1.0, gradient_constant(3, &e).unwrap());
        assert_relative_eq!(far.bound, global, max_relative = 1e-3);
        assert!(far.bound >= global);
        assert!(interior_gradient_bound(3, &e, &curv, 0.0).is_err());
    }

    #[test]
    fn interior_bound_flat_unit_distance() {
        let e = ex(2.0, 2.0);
        let curv = CurvatureData::new(0.0, 0.0).unwrap();
        let ib = interior_gradient_bound(3, &e, &curv, 1.0).unwrap();
        assert_relative_eq!(ib.bound, ib.effective_c, max_relative = 1e-15);
    }

    #[test]
    fn interior_bound_holds_on_flat_solver_fields() {
        let e = ex(2.0, 2.0);
        let m = ModelManifold::euclidean(3).unwrap();
        let curv = m.curvature();
        for s0 in [0.1, 0.5, 0.9, 2.0, 10.0] {
            let f = solve_radial_hj(&m, e, s0, 1.0, 3.0, 1e-10).unwrap();
            let o = interior_check(&f, &curv, 500).unwrap();
            assert!(o.pass, "s0 = {s0}: {o:?}");
        }
    }

    #[test]
    fn barrier_comparison_on_flat_fields() {
        let e = ex(2.0, 2.0);
        let m = ModelManifold::euclidean(3).unwrap();
        let pc = ProofConstants::derive(3, e, m.curvature(), 0.5).unwrap();
        for s0 in [0.1, 0.5, 0.9] {
            let f = solve_radial_hj(&m, e, s0, 1.0, 3.0, 1e-10).unwrap();
            assert_eq!(f.status(), FieldStatus::Complete);
            let o = compare_to_barrier(&f, &pc, 2.0).unwrap();
            assert!(o.pass, "s0 = {s0}: {o:?}");
        }
    }

    #[test]
    fn barrier_comparison_zero_and_constant_slope() {
        let e = ex(2.0, 2.0);
        let m = ModelManifold::euclidean(3).unwrap();
        let pc = ProofConstants::derive(3, e, m.curvature(), 0.5).unwrap();
        let zero = solve_radial_hj(&m, e, 0.0, 1.0, 3.0, 1e-10).unwrap();
        let o = compare_to_barrier(&zero, &pc, 2.0).unwrap();
        assert!(o.pass && o.observed_sup == 0.0);

        let lm = ModelManifold::log_model(1.0, 3).unwrap();
        let pc = ProofConstants::derive(3, e, lm.curvature(), 1.0).unwrap();
        let f = constant_slope_solution(3, 1.0, e, UniformSamples::new(-1.0, 1.0, 201).unwrap()).unwrap();
        assert!(compare_to_barrier(&f, &pc, 0.0).unwrap().pass);
        assert!(f.first().s.powi(2) <= limit_level(3, &e, 1.0).unwrap());
    }

    #[test]
    fn barrier_comparison_domain_mismatch() {
        let e = ex(2.0, 2.0);
        let m = ModelManifold::euclidean(3).unwrap();
        let pc = ProofConstants::derive(3, e, m.curvature(), 1.5).unwrap();
        let f = solve_radial_hj(&m, e, 0.5, 1.0, 3.0, 1e-10).unwrap();
        assert!(matches!(compare_to_barrier(&f, &pc, 2.0), Err(Error::Config(_))));
    }

    #[test]
    fn transform_examples() {
        let lm = ModelManifold::log_model(1.0, 2).unwrap();
        let v = exact_p_harmonic_log_model(2, 1.0, 2.0, UniformSamples::new(-1.0, 1.0, 11).unwrap()).unwrap();
        let u = log_transform(&v).unwrap();
        for smp in u.samples() {
            assert_relative_eq!(smp.u, smp.r, epsilon = 1e-15);
            assert_relative_eq!(smp.s, 1.0, epsilon = 1e-15);
        }
        assert!(u.equation_residual().unwrap() < 1e-14);
        let c = p_harmonic_radial_quadrature(&lm, 3.0, 0.0, UniformSamples::new(0.0, 1.0, 5).unwrap(), 2.0).unwrap();
        assert!(log_transform(&c).unwrap().samples().iter().all(|s| s.s == 0.0));
    }

    #[test]
    fn transform_residual_and_round_trip_on_quadrature_field() {
        let m = ModelManifold::hyperbolic(1.0, 3).unwrap();
        let v = p_harmonic_radial_quadrature(&m, 2.0, -1.0, UniformSamples::new(0.3, 4.0, 200).unwrap(), 5.0).unwrap();
        let u = log_transform(&v).unwrap();
        assert!(u.equation_residual().unwrap() < 1e-8);
        let back = inverse_log_transform(&u).unwrap();
        assert!(max_relative_deviation(&v, &back).unwrap() < 1e-12);
    }

    #[test]
    fn transform_rejects_nonpositive_values() {
        let m = ModelManifold::euclidean(3).unwrap();
        let v = p_harmonic_radial_quadrature(&m, 2.0, 1.0, UniformSamples::new(0.5, 2.0, 20).unwrap(), -3.0).unwrap();
        assert!(matches!(log_transform(&v), Err(Error::Domain(_))));
    }

    #[test]
    fn hermite_value_interpolation() {
        let m = ModelManifold::euclidean(3).unwrap();
        let v = p_harmonic_radial_quadrature(&m, 2.0, 1.0, UniformSamples::new(0.5, 2.0, 301).unwrap(), -2.0).unwrap();
        assert_relative_eq!(value_at(&v, 1.2345).unwrap(), -1.0 / 1.2345, max_relative = 1e-9);
        assert!(value_at(&v, 3.0).is_err());
    }

    #[test]
    fn harnack_on_exact_log_model_function() {
        for &(n, p) in &[(2usize, 1.5), (3, 2.0), (3, 4.0), (5, 2.0)] {
            let v = exact_p_harmonic_log_model(n, 1.0, p, UniformSamples::new(-2.0, 2.0, 401).unwrap()).unwrap();
            let c = harnack_constant(n, p).unwrap();
            let exact_ratio = (n as f64 - 1.0) / (p - 1.0);
            assert!(exact_ratio <= c);
            let summary = harnack_field_check(&v, 1.0, c).unwrap();
            assert!(summary.outcome.pass);
            assert_relative_eq!(summary.gradient_ratio_sup, exact_ratio, max_relative = 1e-12);
            let pair = harnack_check(&v, -1.0, 1.5, 1.0, c).unwrap();
            assert_relative_eq!(pair.observed_sup, exact_ratio * 2.5, max_relative = 1e-12);
            assert!(pair.pass);
        }
    }

    #[test]
    fn harnack_constant_field() {
        let lm = ModelManifold::log_model(1.0, 3).unwrap();
        let v = p_harmonic_radial_quadrature(&lm, 2.0, 0.0, UniformSamples::new(-1.0, 1.0, 11).unwrap(), 3.0).unwrap();
        let s = harnack_field_check(&v, 1.0, 0.0).unwrap();
        assert!(s.outcome.pass && s.outcome.observed_sup == 0.0);
    }

    #[test]
    fn kotschwar_ni_level_is_exceeded_by_exact_function() {
        let v = exact_p_harmonic_log_model(3, 1.0, 2.0, UniformSamples::new(-1.0, 1.0, 11).unwrap()).unwrap();
        let s = harnack_field_check(&v, 1.0, harnack_constant(3, 2.0).unwrap()).unwrap();
        assert_relative_eq!(s.gradient_ratio_sup, 2.0, max_relative = 1e-12);
        assert_eq!(s.reference_level, 1.0);
    }

    #[test]
    fn harnack_on_horospherical_quadrature_fields() {
        for &(n, p) in &[(2usize, 1.5), (3, 2.0), (3, 4.0)] {
            let lm = ModelManifold::log_model(1.0, n).unwrap();
            let c = fit_flux(&lm, p, (-2.0, 2.0), (10.0, 0.5)).unwrap();
            let v = p_harmonic_radial_quadrature(&lm, p, c, UniformSamples::new(-2.0, 2.0, 401).unwrap(), 10.0).unwrap();
            let s = harnack_field_check(&v, 1.0, harnack_constant(n, p).unwrap()).unwrap();
            assert!(s.outcome.pass, "{n} {p}: {s:?}");
        }
    }

    #[test]
    fn liouville_examples() {
        let rep = liouville_sweep(ex(2.0, 2.0), 3, &[10.0, 0.1, 1.0], LIOUVILLE_FINDING_RANGE, 1e-10).unwrap();
        assert!(rep.all_blew_up() && rep.monotone);
        assert!(rep.max_drift().unwrap() < 1e-4);
        for e in &rep.entries {
            assert_relative_eq!(e.r_star.unwrap(), e.r_star_exact, max_relative = 1e-7);
        }
        let rep = liouville_sweep(ex(3.0, 2.5), 2, &[1.0], LIOUVILLE_FINDING_RANGE, 1e-10).unwrap();
        assert!(rep.all_blew_up());
    }

    #[test]
    fn liouville_truncated_range_is_inconclusive() {
        let rep = liouville_sweep(ex(2.0, 2.0), 3, &[0.1], 0.01, 1e-10).unwrap();
        assert_eq!(rep.entries[0].verdict, LiouvilleVerdict::Inconclusive);
        assert!(!rep.all_blew_up());
        assert!(liouville_sweep(ex(2.0, 2.0), 3, &[0.0], 1.0, 1e-10).is_err());
    }

    #[test]
    fn outcome_csv_layout() {
        let mut buf = Vec::new();
        let rec = OutcomeRecord { check: "global".into(), params: "n=2".into(), outcome: EstimateOutcome::new(2.0, 1.0, 0.5) };
        write_outcomes_csv(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "check_name,params,bound,observed,pass,witness\nglobal,n=2,2.0000000000000000e0,1.0000000000000000e0,true,5.0000000000000000e-1\n"
        );
    }
}
