//! Explicit constants behind the gradient estimate.
//!
//! The existence argument introduces a chain of constants without computing
//! them: the Böchner auxiliary `a`, the absorption pair `(C, D)`, the
//! geometric constant `k` bounding the elliptic operator on the barrier, the
//! barrier constant `c`, the amplification `A` of the barrier floor `mu`, and
//! the ellipticity pair `(theta, Theta)`. This module fixes one explicit
//! derivation for each and exposes the randomized and grid certifications that
//! audit them.
//!
//! Derivations used throughout:
//!
//! * Böchner step (`a = 1`): Young's inequality
//!   `e2 z^{(q-p)/2} G >= -(a^2/n) z^{e2} - (n e2^2 / 4a^2) P^2/z` on the cross
//!   term and `G^2 <= P^2 z` on the quadratic terms give
//!   `C = a^2/n`, `D = 1/(n a^2) + (3/2)|p-2| + n e2^2/(4 a^2)`.
//! * Operator bound: with `rho = R^2 - r^2` the barrier satisfies
//!   `A(w) >= -k lambda rho^{-2 e2/e1} (R^2 + rho B_p r)` for
//!   `k = (4/e1) (2(q+3-p)(1+|p-2|)/e1 + n + 2|p-2|)`.
//! * Barrier coefficient: `lambda` is the smallest value with
//!   `(C/2) lambda^{e1} >= max_r [k(R^2 + rho B_p r) + 16 D r^2/e1^2]` and
//!   `(C/2) lambda^{e2} R^{-4 e2/e1} >= (n-1) B^2 lambda R^{-4/e1} + deficit`,
//!   where `deficit = max_{m in {mu, A mu}} ((n-1)B^2 m - C m^{e2})_+` is the
//!   shortfall of the floor terms. The second condition is binding at `r = 0`
//!   and then holds on all of `[0, R)`. `c = lambda / Lambda(R)` is rounded up
//!   to four significant digits, with
//!   `Lambda = max{(R^4 B^2)^{1/e1}, ((1 + B_p) R^3)^{1/e1}}`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::CurvatureData;
use crate::scalar::{from_usize, lit, pos, Scalar};

/// Exponent pair `(p, q)` with `q > p - 1 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents<T> {
    p: T,
    q: T,
}

impl<T: Scalar> Exponents<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::Constraint(format!("exponents p = {p}, q = {q} must be finite")));
        }
        if !(p > T::one()) {
            return Err(Error::Constraint(format!("p - 1 > 0 violated: p = {p}")));
        }
        if !(q > p - T::one()) {
            return Err(Error::Constraint(format!("q > p-1 violated: p = {p}, q = {q}")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// `e1 = q + 1 - p > 0`.
    pub fn e1(&self) -> T {
        self.q + T::one() - self.p
    }

    /// `e2 = q + 2 - p > 1`.
    pub fn e2(&self) -> T {
        self.q + lit(2.0) - self.p
    }

    /// The exponent pair of the logarithmically transformed equation, `q = p`.
    pub fn log_transformed(p: T) -> Result<Self> {
        Self::new(p, p)
    }
}

/// The Böchner auxiliary and the absorption constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BochnerConstants<T> {
    pub a: T,
    pub c: T,
    pub d: T,
}

/// Young-split derivation of `(a, C, D)` with `a = 1`.
pub fn bochner_constants<T: Scalar>(e: &Exponents<T>, n: usize) -> Result<BochnerConstants<T>> {
    check_dim(n)?;
    let a = T::one();
    let nf = from_usize::<T>(n);
    let a2 = a * a;
    let e2 = e.e2();
    let c = a2 / nf;
    let d = (nf * a2).recip() + lit::<T>(1.5) * (e.p() - lit(2.0)).abs() + nf * e2 * e2 / (lit::<T>(4.0) * a2);
    Ok(BochnerConstants { a, c, d })
}

/// Both sides of the Böchner-chain inequality at one admissible tuple.
///
/// `g` stands for `<grad z, grad u>` and `pn` for `|grad z|`; admissible means
/// `z > 0` and `|g| <= pn sqrt(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BochnerSides<T> {
    pub lhs: T,
    pub rhs: T,
    /// Sum of absolute values of all terms, the natural rounding scale.
    pub scale: T,
}

impl<T: Scalar> BochnerSides<T> {
    /// `(lhs - rhs) / scale`.
    pub fn relative_margin(&self) -> T {
        if self.scale == T::zero() {
            T::zero()
        } else {
            (self.lhs - self.rhs) / self.scale
        }
    }
}

pub fn bochner_sides<T: Scalar>(e: &Exponents<T>, n: usize, k: &BochnerConstants<T>, z: T, g: T, pn: T) -> BochnerSides<T> {
    let nf = from_usize::<T>(n);
    let p2 = e.p() - lit(2.0);
    let a2 = k.a * k.a;
    let ze2 = z.powf(e.e2());
    let g2 = g * g / (z * z);
    let p2z = pn * pn / z;
    let terms = [
        lit::<T>(2.0) * a2 / nf * ze2,
        -(nf * a2).recip() * g2,
        -p2 / lit(2.0) * p2z,
        p2 * g2,
        e.e2() * z.powf((e.q() - e.p()) / lit(2.0)) * g,
    ];
    let rhs_terms = [k.c * ze2, -k.d * p2z];
    let lhs = terms.iter().fold(T::zero(), |acc, &t| acc + t);
    let rhs = rhs_terms[0] + rhs_terms[1];
    let scale = terms.iter().chain(rhs_terms.iter()).fold(T::zero(), |acc, &t| acc + t.abs());
    BochnerSides { lhs, rhs, scale }
}

/// Result of the randomized Böchner certification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BochnerCertificate<T> {
    pub samples: usize,
    /// Smallest `(lhs - rhs)/scale` seen.
    pub min_margin: T,
    /// Tuple `(z, G, P)` attaining it.
    pub worst: (T, T, T),
    pub seed: u64,
    pub stream: u64,
}

/// Rounding slack admitted on the relative margin.
pub const BOCHNER_SLACK: f64 = 1e-12;

impl<T: Scalar> BochnerCertificate<T> {
    pub fn passed(&self) -> bool {
        self.min_margin >= -lit::<T>(BOCHNER_SLACK)
    }
}

/// Samples admissible tuples with `z` log-uniform in `[1e-3, 1e3]`, `P`
/// uniform in `[0, 1e3]` and `G` uniform in `[-P sqrt z, P sqrt z]`, and
/// returns the worst relative margin. The random stream is a ChaCha8 stream
/// selected by `(seed, stream)`.
pub fn certify_bochner<T: Scalar>(e: &Exponents<T>, n: usize, samples: usize, seed: u64, stream: u64) -> Result<BochnerCertificate<T>> {
    let k = bochner_constants(e, n)?;
    if samples == 0 {
        return Err(Error::Config("bochner certification needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut min_margin = T::infinity();
    let mut worst = (T::zero(), T::zero(), T::zero());
    for _ in 0..samples {
        let z = lit::<T>(10f64.powf(rng.gen_range(-3.0..=3.0)));
        let pn = lit::<T>(rng.gen_range(0.0..=1e3));
        let g = pn * z.sqrt() * lit::<T>(rng.gen_range(-1.0..=1.0));
        let m = bochner_sides(e, n, &k, z, g, pn).relative_margin();
        if m < min_margin {
            min_margin = m;
            worst = (z, g, pn);
        }
    }
    Ok(BochnerCertificate { samples, min_margin, worst, seed, stream })
}

/// Geometric constant `k(n, p, q)` of the operator bound on the barrier.
pub fn k_constant<T: Scalar>(n: usize, e: &Exponents<T>) -> Result<T> {
    check_dim(n)?;
    let e1 = e.e1();
    let ap = (e.p() - lit(2.0)).abs();
    let lead = lit::<T>(2.0) * (e.q() + lit(3.0) - e.p()) * (T::one() + ap) / e1 + from_usize::<T>(n) + lit::<T>(2.0) * ap;
    let cross = from_usize::<T>(n - 1);
    Ok(lit::<T>(4.0) / e1 * lead.max(cross))
}

/// Ellipticity bounds of `xi -> |xi|^2 + (p-2)<nu, xi>^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipticity<T> {
    pub theta: T,
    pub big_theta: T,
}

pub fn ellipticity<T: Scalar>(p: T) -> Result<Ellipticity<T>> {
    if !(p > T::one()) {
        return Err(Error::Domain(format!("p = {p} must be > 1")));
    }
    let p1 = p - T::one();
    Ok(Ellipticity { theta: p1.min(T::one()), big_theta: p1.max(T::one()) })
}

/// Coefficients of the barrier `w = lambda (R^2 - r^2)^{-2/e1} + mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierCoefficients<T> {
    pub lambda: T,
    /// Floor `((n-1) B^2)^{1/e1}`, before amplification.
    pub mu: T,
    /// Power-of-two amplification of `mu` meeting the comparison trigger.
    pub amplification: T,
    /// Barrier constant `c = lambda / Lambda(R)`, four significant digits.
    pub c: T,
    /// Smallest admissible lambda before rounding `c`.
    pub lambda_min: T,
}

/// Floor `mu = ((n-1) B^2)^{1/e1}`.
pub fn barrier_floor<T: Scalar>(n: usize, e: &Exponents<T>, b: T) -> T {
    (from_usize::<T>(n - 1) * b * b).powf(e.e1().recip())
}

/// Smallest power of two `A >= (1/(C e2))^{1/e1}`, or one when `C e2 >= 1`.
pub fn amplification<T: Scalar>(e: &Exponents<T>, c_absorb: T) -> T {
    let target = (c_absorb * e.e2()).recip().powf(e.e1().recip());
    let mut a = T::one();
    while a < target {
        a = a + a;
    }
    a
}

/// Shortfall of the floor terms `C m^{e2} - (n-1) B^2 m` over `m in {mu, A mu}`.
pub fn floor_deficit<T: Scalar>(n: usize, e: &Exponents<T>, b: T, c_absorb: T, amp: T) -> T {
    let mu = barrier_floor(n, e, b);
    let tb = from_usize::<T>(n - 1) * b * b;
    [mu, amp * mu]
        .iter()
        .map(|&m| pos(tb * m - c_absorb * m.powf(e.e2())))
        .fold(T::zero(), T::max)
}

/// Smallest `y >= 0` with `(C/2) y^{e2} - (n-1) B^2 y >= deficit`.
///
/// `y` is the value `lambda R^{-4/e1}` at the centre; the condition does not
/// depend on `R`.
pub fn absorption_level<T: Scalar>(n: usize, e: &Exponents<T>, b: T, c_absorb: T, deficit: T) -> T {
    let tb = from_usize::<T>(n - 1) * b * b;
    if tb == T::zero() && deficit == T::zero() {
        return T::zero();
    }
    let half_c = c_absorb / lit(2.0);
    let h = |y: T| half_c * y.powf(e.e2()) - tb * y - deficit;
    let mut hi = (tb / half_c).powf(e.e1().recip()).max((deficit / half_c).powf(e.e2().recip()));
    if hi == T::zero() {
        hi = T::one();
    }
    while h(hi) < T::zero() {
        hi = hi + hi;
    }
    let mut lo = T::zero();
    for _ in 0..400 {
        let mid = (lo + hi) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `max_{0 <= r <= R} k (R^2 + (R^2 - r^2) B_p r) + 16 D r^2 / e1^2`.
pub fn max_operator_demand<T: Scalar>(k: T, d: T, e1: T, b_p: T, r_ball: T) -> T {
    let a = lit::<T>(16.0) * d / (e1 * e1);
    let r2 = r_ball * r_ball;
    let g = |r: T| k * (r2 + (r2 - r * r) * b_p * r) + a * r * r;
    let mut best = g(T::zero()).max(g(r_ball));
    if b_p > T::zero() {
        let crit = (a + (a * a + lit::<T>(3.0) * k * k * b_p * b_p * r2).sqrt()) / (lit::<T>(3.0) * k * b_p);
        if crit > T::zero() && crit < r_ball {
            best = best.max(g(crit));
        }
    }
    best
}

/// `Lambda(R) = max{(R^4 B^2)^{1/e1}, ((1 + B_p) R^3)^{1/e1}}`.
pub fn lambda_scale<T: Scalar>(e: &Exponents<T>, curvature: &CurvatureData<T>, r_ball: T) -> T {
    let inv = e.e1().recip();
    let r3 = r_ball * r_ball * r_ball;
    let first = (r3 * r_ball * curvature.b * curvature.b).powf(inv);
    let second = ((T::one() + curvature.b_p(e.p())) * r3).powf(inv);
    first.max(second)
}

/// `(lambda, mu, A)` for the barrier on a ball of radius `R`.
pub fn barrier_lambda_mu<T: Scalar>(n: usize, e: &Exponents<T>, curvature: &CurvatureData<T>, r_ball: T) -> Result<BarrierCoefficients<T>> {
    check_dim(n)?;
    if !(r_ball > T::zero()) || !r_ball.is_finite() {
        return Err(Error::Domain(format!("ball radius R = {r_ball} must be finite and > 0")));
    }
    let bc = bochner_constants(e, n)?;
    let k = k_constant(n, e)?;
    let e1 = e.e1();
    let b = curvature.b;
    let mu = barrier_floor(n, e, b);
    let amp = amplification(e, bc.c);

    let demand = max_operator_demand(k, bc.d, e1, curvature.b_p(e.p()), r_ball);
    let lambda_operator = (lit::<T>(2.0) / bc.c * demand).powf(e1.recip());
    let deficit = floor_deficit(n, e, b, bc.c, amp);
    let level = absorption_level(n, e, b, bc.c, deficit);
    let lambda_floor = level * r_ball.powf(lit::<T>(4.0) / e1);
    let lambda_min = lambda_operator.max(lambda_floor);

    let scale = lambda_scale(e, curvature, r_ball);
    let c = round_up_sig4(lambda_min / scale);
    Ok(BarrierCoefficients { lambda: c * scale, mu, amplification: amp, c, lambda_min })
}

/// Rounds up to four significant digits, strictly above the input.
fn round_up_sig4<T: Scalar>(x: T) -> T {
    if !(x > T::zero()) {
        return x;
    }
    let unit = lit::<T>(10.0).powi(x.log10().floor().to_i32().unwrap_or(0) - 3);
    let bumped = x * (T::one() + lit(1e-9));
    (bumped / unit).ceil() * unit
}

/// Squared gradient level `y* + A mu` that the barrier forces in the limit
/// `R -> infinity`. Its square root is the global gradient bound.
pub fn limit_level<T: Scalar>(n: usize, e: &Exponents<T>, b: T) -> Result<T> {
    let bc = bochner_constants(e, n)?;
    let amp = amplification(e, bc.c);
    let deficit = floor_deficit(n, e, b, bc.c, amp);
    Ok(absorption_level(n, e, b, bc.c, deficit) + amp * barrier_floor(n, e, b))
}

/// `c_{n,p,q}`: the global gradient bound at `B = 1`.
pub fn gradient_constant<T: Scalar>(n: usize, e: &Exponents<T>) -> Result<T> {
    Ok(limit_level(n, e, T::one())?.sqrt())
}

/// `c_{n,p}` of the Harnack bound: `c_{n,p,p} / (p - 1)`.
pub fn harnack_constant<T: Scalar>(n: usize, p: T) -> Result<T> {
    let e = Exponents::log_transformed(p)?;
    Ok(gradient_constant(n, &e)? / (p - T::one()))
}

/// The complete constant ledger for one `(n, p, q, B, S, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofConstants<T> {
    pub n: usize,
    pub exponents: Exponents<T>,
    pub curvature: CurvatureData<T>,
    pub r_ball: T,
    pub a: T,
    pub c_absorb: T,
    pub d_absorb: T,
    pub k: T,
    pub c_barrier: T,
    pub lambda: T,
    pub mu: T,
    pub amplification: T,
    pub theta: T,
    pub big_theta: T,
    pub c_grad: T,
    pub c_harnack: T,
}

impl<T: Scalar> ProofConstants<T> {
    pub fn derive(n: usize, exponents: Exponents<T>, curvature: CurvatureData<T>, r_ball: T) -> Result<Self> {
        let bc = bochner_constants(&exponents, n)?;
        let k = k_constant(n, &exponents)?;
        let coeffs = barrier_lambda_mu(n, &exponents, &curvature, r_ball)?;
        let ell = ellipticity(exponents.p())?;
        Ok(Self {
            n,
            exponents,
            curvature,
            r_ball,
            a: bc.a,
            c_absorb: bc.c,
            d_absorb: bc.d,
            k,
            c_barrier: coeffs.c,
            lambda: coeffs.lambda,
            mu: coeffs.mu,
            amplification: coeffs.amplification,
            theta: ell.theta,
            big_theta: ell.big_theta,
            c_grad: gradient_constant(n, &exponents)?,
            c_harnack: harnack_constant(n, exponents.p())?,
        })
    }

    /// Amplified floor `A mu`.
    pub fn amplified_mu(&self) -> T {
        self.amplification * self.mu
    }
}

pub const LEDGER_HEADER: [&str; 18] = [
    "n", "p", "q", "B", "S", "R", "a", "C", "D", "k", "c", "lambda", "mu", "A", "theta", "Theta", "c_grad", "c_harnack",
];

/// Formats a value with 17 significant digits.
pub fn fmt_sig17<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// Writes ledger records as CSV with the columns of [`LEDGER_HEADER`].
pub fn write_ledger_csv<T: Scalar, W: Write>(out: W, records: &[ProofConstants<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LEDGER_HEADER)?;
    for r in records {
        let mut row = vec![r.n.to_string()];
        row.extend(
            [
                r.exponents.p(),
                r.exponents.q(),
                r.curvature.b,
                r.curvature.s,
                r.r_ball,
                r.a,
                r.c_absorb,
                r.d_absorb,
                r.k,
                r.c_barrier,
                r.lambda,
                r.mu,
                r.amplification,
                r.theta,
                r.big_theta,
                r.c_grad,
                r.c_harnack,
            ]
            .iter()
            .map(|&x| fmt_sig17(x)),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension n = {n} must be >= 2")));
    }
    Ok(())
}
