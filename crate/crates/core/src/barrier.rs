//! The radial barrier `w = lambda (R^2 - r^2)^{-2/e1} + mu` and the
//! term-by-term lower bound on `L*(w) = A(w) + C w^{e2} - D|grad w|^2/w - (n-1)B^2 w`.

use crate::error::{Error, Result};
use crate::geometry::{CurvatureData, ModelManifold};
use crate::proof_constants::{Exponents, ProofConstants};
use crate::scalar::{from_usize, lit, scaled_coth, Scalar};

/// Barrier on the geodesic ball `B_R(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams<T> {
    pub r_ball: T,
    pub lambda: T,
    pub mu: T,
    pub exponents: Exponents<T>,
    pub curvature: CurvatureData<T>,
    pub n: usize,
}

/// `(w, w', w'')` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierValue<T> {
    pub w: T,
    pub dw: T,
    pub ddw: T,
}

/// Displayed upper bound on `Delta w` and the directly evaluated comparison value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianBound<T> {
    pub displayed: T,
    pub direct: T,
}

/// Curvature hypothesis under which the Hessian term is bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HessianRegime<T> {
    /// `p >= 2` with `Sec >= -S^2`.
    SectionalLowerBound { s: T },
    /// `p <= 2` with `Sec <= 0`.
    NonPositive,
}

impl<T: Scalar> BarrierParams<T> {
    pub fn new(n: usize, exponents: Exponents<T>, curvature: CurvatureData<T>, r_ball: T, lambda: T, mu: T) -> Result<Self> {
        if !(r_ball > T::zero()) || !r_ball.is_finite() {
            return Err(Error::Domain(format!("ball radius R = {r_ball} must be finite and > 0")));
        }
        if !(lambda >= T::zero() && mu >= T::zero()) {
            return Err(Error::Domain(format!("barrier coefficients lambda = {lambda}, mu = {mu} must be >= 0")));
        }
        Ok(Self { r_ball, lambda, mu, exponents, curvature, n })
    }

    /// Barrier with the ledger's `(lambda, mu)`; `amplified` uses `A mu`.
    pub fn from_constants(pc: &ProofConstants<T>, amplified: bool) -> Self {
        let mu = if amplified { pc.amplified_mu() } else { pc.mu };
        Self { r_ball: pc.r_ball, lambda: pc.lambda, mu, exponents: pc.exponents, curvature: pc.curvature, n: pc.n }
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_mu(mut self, mu: T) -> Self {
        self.mu = mu;
        self
    }

    fn rho(&self, r: T) -> T {
        self.r_ball * self.r_ball - r * r
    }

    fn check_inside(&self, r: T) -> Result<()> {
        if !(r >= T::zero() && r < self.r_ball) {
            return Err(Error::Domain(format!("radius {r} outside [0, {})", self.r_ball)));
        }
        Ok(())
    }

    fn check_open(&self, r: T) -> Result<()> {
        if !(r > T::zero() && r < self.r_ball) {
            return Err(Error::Domain(format!("radius {r} outside (0, {})", self.r_ball)));
        }
        Ok(())
    }

    /// Common prefactor `(4/e1) lambda rho^{-2 e2/e1}`.
    fn prefactor(&self, r: T) -> T {
        let e1 = self.exponents.e1();
        lit::<T>(4.0) / e1 * self.lambda * self.rho(r).powf(-lit::<T>(2.0) * self.exponents.e2() / e1)
    }

    /// `2 r^2 (q+3-p)/e1`, the radial-curvature part of `w''`.
    fn radial_part(&self, r: T) -> T {
        let e = &self.exponents;
        lit::<T>(2.0) * r * r * (e.q() + lit(3.0) - e.p()) / e.e1()
    }

    pub fn eval(&self, r: T) -> Result<BarrierValue<T>> {
        self.check_inside(r)?;
        let e1 = self.exponents.e1();
        let alpha = lit::<T>(2.0) / e1;
        let rho = self.rho(r);
        let w = self.lambda * rho.powf(-alpha) + self.mu;
        let c = lit::<T>(4.0) / e1 * self.lambda;
        let dw = c * r * rho.powf(-alpha - T::one());
        let ddw = c * rho.powf(-alpha - lit(2.0)) * (rho + lit::<T>(2.0) * (alpha + T::one()) * r * r);
        Ok(BarrierValue { w, dw, ddw })
    }

    /// Minimum of the barrier, attained at the centre.
    pub fn minimum(&self) -> T {
        self.lambda * self.r_ball.powf(-lit::<T>(4.0) / self.exponents.e1()) + self.mu
    }

    /// Displayed bound on `Delta_2 w` from the relaxed Laplacian comparison,
    /// together with `w'' + w' (n-1) B coth(Br)`.
    pub fn laplacian_w_upper(&self, manifold: &ModelManifold<T>, r: T) -> Result<LaplacianBound<T>> {
        self.check_open(r)?;
        self.check_manifold(manifold)?;
        let b = self.curvature.b;
        let n1 = from_usize::<T>(self.n - 1);
        let rho = self.rho(r);
        let displayed = self.prefactor(r) * (self.radial_part(r) + rho * (T::one() + n1 * (T::one() + b * r)));
        let v = self.eval(r)?;
        let direct = v.ddw + v.dw * n1 * scaled_coth(manifold.curvature_scale(), r);
        Ok(LaplacianBound { displayed, direct })
    }

    /// The curvature regime a model manifold places this barrier in.
    pub fn default_regime(&self) -> HessianRegime<T> {
        if self.exponents.p() > lit(2.0) {
            HessianRegime::SectionalLowerBound { s: self.curvature.s }
        } else {
            HessianRegime::NonPositive
        }
    }

    /// Displayed upper bound on `<D^2 w(nu), nu>` for unit `nu`.
    pub fn hessian_term_upper(&self, r: T, regime: HessianRegime<T>) -> Result<T> {
        self.check_open(r)?;
        let p = self.exponents.p();
        let rho = self.rho(r);
        let tangential = match regime {
            HessianRegime::SectionalLowerBound { s } => {
                if p < lit(2.0) {
                    return Err(Error::Config(format!("p = {p} < 2 needs the Sec <= 0 regime")));
                }
                rho * (lit::<T>(2.0) + s * r)
            }
            HessianRegime::NonPositive => {
                if p > lit(2.0) {
                    return Err(Error::Config(format!("p = {p} > 2 needs a sectional lower bound S")));
                }
                lit::<T>(2.0) * rho
            }
        };
        Ok(self.prefactor(r) * (self.radial_part(r) + tangential))
    }

    /// `-k lambda rho^{-2 e2/e1} (R^2 + rho B_p r)`.
    pub fn operator_lower_bound(&self, k: T, r: T) -> T {
        let e1 = self.exponents.e1();
        let rho = self.rho(r);
        -k * self.lambda * rho.powf(-lit::<T>(2.0) * self.exponents.e2() / e1)
            * (self.r_ball * self.r_ball + rho * self.curvature.b_p(self.exponents.p()) * r)
    }

    /// Exact infimum over unit directions of
    /// `A(w) = -Delta w - (p-2)<D^2 w(nu), nu>` on a constant-curvature model.
    pub fn operator_exact_inf(&self, manifold: &ModelManifold<T>, r: T) -> Result<T> {
        self.check_open(r)?;
        self.check_manifold(manifold)?;
        let v = self.eval(r)?;
        let b = manifold.curvature_scale();
        let tangential = v.dw * scaled_coth(b, r);
        let lap = v.ddw + from_usize::<T>(self.n - 1) * tangential;
        let p2 = self.exponents.p() - lit(2.0);
        let hess = if p2 > T::zero() { v.ddw.max(tangential) } else { v.ddw.min(tangential) };
        Ok(-lap - p2 * hess)
    }

    /// Term-by-term lower bound on `L*(w)` at `r`.
    pub fn l_star_lower_bound(&self, pc: &ProofConstants<T>, r: T) -> T {
        let e = &self.exponents;
        let (e1, e2) = (e.e1(), e.e2());
        let rho = self.rho(r);
        let tb = from_usize::<T>(self.n - 1) * self.curvature.b * self.curvature.b;
        let lead = self.lambda * rho.powf(-lit::<T>(2.0) * e2 / e1);
        let bracket = -pc.k * (self.r_ball * self.r_ball + rho * self.curvature.b_p(e.p()) * r)
            - pc.d_absorb * lit::<T>(16.0) / (e1 * e1) * r * r
            + pc.c_absorb * self.lambda.powf(e1);
        lead * bracket + pc.c_absorb * self.mu.powf(e2) - tb * self.lambda * rho.powf(-lit::<T>(2.0) / e1) - tb * self.mu
    }

    /// `L*(w)` evaluated directly on the model with the exact operator infimum.
    pub fn l_star_direct(&self, pc: &ProofConstants<T>, manifold: &ModelManifold<T>, r: T) -> Result<T> {
        let v = self.eval(r)?;
        let tb = from_usize::<T>(self.n - 1) * self.curvature.b * self.curvature.b;
        Ok(self.operator_exact_inf(manifold, r)? + pc.c_absorb * v.w.powf(self.exponents.e2()) - pc.d_absorb * v.dw * v.dw / v.w - tb * v.w)
    }

    fn check_manifold(&self, manifold: &ModelManifold<T>) -> Result<()> {
        if manifold.dim() != self.n {
            return Err(Error::Config(format!("manifold dimension {} differs from barrier dimension {}", manifold.dim(), self.n)));
        }
        Ok(())
    }
}

/// Radius grid clustered geometrically toward `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub points: usize,
    /// Outermost point is `R (1 - edge)`.
    pub edge: T,
    /// Innermost point is `inner * R`.
    pub inner: T,
}

impl<T: Scalar> Default for GridSpec<T> {
    fn default() -> Self {
        Self { points: 10_000, edge: lit(1e-6), inner: lit(1e-3) }
    }
}

impl<T: Scalar> GridSpec<T> {
    pub fn with_points(points: usize) -> Self {
        Self { points, ..Self::default() }
    }

    /// Radii from `inner R` to `R(1 - edge)`, gaps to `R` shrinking geometrically.
    pub fn radii(&self, r_ball: T) -> Result<Vec<T>> {
        if self.points == 0 {
            return Err(Error::Config("radius grid is empty".into()));
        }
        if !(self.edge > T::zero() && self.inner > T::zero() && self.inner + self.edge < T::one()) {
            return Err(Error::Config(format!("grid fractions inner = {}, edge = {} are inconsistent", self.inner, self.edge)));
        }
        let first_gap = r_ball * (T::one() - self.inner);
        let last_gap = r_ball * self.edge;
        if self.points == 1 {
            return Ok(vec![r_ball - first_gap]);
        }
        let ratio = last_gap / first_gap;
        let m = from_usize::<T>(self.points - 1);
        Ok((0..self.points).map(|i| r_ball - first_gap * ratio.powf(from_usize::<T>(i) / m)).collect())
    }
}

/// Outcome of a supersolution certification over a radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SupersolutionReport<T> {
    pub min_margin: T,
    pub argmin_r: T,
    /// Lower bound times `rho^{2 e2/e1}` at the outermost grid point.
    pub edge_margin: T,
    pub passed: bool,
    /// `(r, lower bound)` per grid point.
    pub margins: Vec<(T, T)>,
}

/// Evaluates the lower bound on `L*(w)` over the grid; `passed` iff its minimum is `>= 0`.
pub fn certify_supersolution<T: Scalar>(
    bp: &BarrierParams<T>,
    pc: &ProofConstants<T>,
    manifold: &ModelManifold<T>,
    grid: &GridSpec<T>,
) -> Result<SupersolutionReport<T>> {
    bp.check_manifold(manifold)?;
    let radii = grid.radii(bp.r_ball)?;
    let mut min_margin = T::infinity();
    let mut argmin_r = radii[0];
    let mut margins = Vec::with_capacity(radii.len());
    for &r in &radii {
        let m = bp.l_star_lower_bound(pc, r);
        if !(m >= min_margin) {
            min_margin = m;
            argmin_r = r;
        }
        margins.push((r, m));
    }
    let r_out = *radii.last().expect("grid nonempty");
    let e = &bp.exponents;
    let edge_margin = bp.l_star_lower_bound(pc, r_out) * bp.rho(r_out).powf(lit::<T>(2.0) * e.e2() / e.e1());
    Ok(SupersolutionReport { passed: min_margin >= T::zero(), min_margin, argmin_r, edge_margin, margins })
}
