//! Scalar special functions and quadrature.
//!
//! Every error-probability formula in this crate is a Q-function, an integral
//! of Q-functions against a Gaussian density, or a fading average of one of
//! those. The routines here are pure and reentrant.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Gaussian Q-function, the upper-tail probability of a standard normal.
///
/// Accepts `±inf` as limits. Returns a domain error for NaN.
pub fn q_function(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("q_function of NaN".into()));
    }
    Ok(q(x))
}

/// Unchecked Q-function for use inside integrands; NaN propagates.
#[inline]
pub fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Tolerances and budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 1 << 20,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) || !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::param(format!(
                "quadrature tolerances must be positive and finite (rel {rel_tol}, abs {abs_tol})"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::param("max_subdivisions must be at least 1"));
        }
        Ok(QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    /// Settings with both tolerances set relative to the defaults' ratio.
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(rel_tol, d.abs_tol * rel_tol / d.rel_tol, d.max_subdivisions)
    }

    /// Tolerance budget for an integral nested inside another one: 1/100 of ours.
    pub fn inner(&self) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol / 100.0,
            abs_tol: self.abs_tol / 100.0,
            max_subdivisions: self.max_subdivisions,
        }
    }

    /// Settings with both tolerances halved.
    pub fn halved(&self) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol / 2.0,
            abs_tol: self.abs_tol / 2.0,
            max_subdivisions: self.max_subdivisions,
        }
    }

    /// Error allowed for a result of the given magnitude.
    pub fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

// Gauss-Kronrod 7/15 abscissae and weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    // Largest error first; ties broken by position so the order is total and deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let y = f(x)?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::Domain(format!(
            "integrand is not finite at x = {x:e} ({y})"
        )))
    }
}

fn gauss_kronrod_15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = eval(f, center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for (j, wg) in WG.iter().take(3).enumerate() {
        let jtw = 2 * j + 1;
        let absc = half * XGK[jtw];
        let f1 = eval(f, center - absc)?;
        let f2 = eval(f, center + absc)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += wg * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = half * XGK[jtwm1];
        let f1 = eval(f, center - absc)?;
        let f2 = eval(f, center + absc)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Value of an integral and its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]` with a fallible integrand.
///
/// Errors from `f` abort the integration and are returned unchanged, so nested
/// integrals can propagate inner failures.
pub fn try_integrate_detailed<F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::param(format!(
            "integration limits must be finite ({a}, {b})"
        )));
    }
    if a > b {
        return Err(Error::param(format!(
            "integration limits out of order ({a} > {b})"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
        });
    }

    adaptive(&mut f, &[a, b], spec)
}

/// Adaptive quadrature over `[points[0], points[last]]` starting from the given
/// partition. Interior points let the caller resolve features that a single
/// 15-point rule on the whole interval would step over.
pub fn try_integrate_with_breakpoints<F>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points.len() < 2 {
        return Err(Error::param("need at least two breakpoints"));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::param(format!("breakpoint {p} is not finite")));
    }
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("breakpoints must be nondecreasing"));
    }
    let distinct: Vec<f64> = points.iter().copied().fold(Vec::new(), |mut v, p| {
        if v.last() != Some(&p) {
            v.push(p);
        }
        v
    });
    if distinct.len() < 2 {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    adaptive(&mut f, &distinct, spec)
}

fn adaptive<F>(f: &mut F, points: &[f64], spec: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        let seg = gauss_kronrod_15(f, w[0], w[1])?;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    loop {
        if total_err <= spec.tolerance_for(total) {
            // Running sums drift; confirm with an exact re-summation.
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
            if total_err <= spec.tolerance_for(total) {
                return Ok(Integral {
                    value: total,
                    abs_error: total_err,
                });
            }
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: total,
                error_bound: total_err,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            heap.push(worst);
            return Err(Error::Convergence {
                estimate: total,
                error_bound: total_err,
                subdivisions: heap.len(),
            });
        }
        let left = gauss_kronrod_15(f, worst.a, mid)?;
        let right = gauss_kronrod_15(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

/// Fallible-integrand form of [`integrate`].
pub fn try_integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_detailed(f, a, b, spec).map(|i| i.value)
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// The result satisfies `|result - exact| <= max(abs_tol, rel_tol * |result|)`
/// as far as the local Gauss-Kronrod error estimates can tell. Running out of
/// subdivisions gives [`Error::Convergence`] with the best estimate so far.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, spec)
}

/// Finds where to cut off a semi-infinite integral.
///
/// Grid points are `a + 2^k`; the first one where `tail_bound` drops below the
/// absolute tolerance is returned.
pub fn truncation_point<T>(a: f64, mut tail_bound: T, spec: &QuadratureSpec) -> Result<f64>
where
    T: FnMut(f64) -> f64,
{
    let limit = 1e6 * a.abs() + 1e6;
    let mut offset = 1.0;
    let mut last = (a, f64::INFINITY);
    while a + offset <= limit {
        let x = a + offset;
        let tail = tail_bound(x);
        if tail < spec.abs_tol {
            return Ok(x);
        }
        last = (x, tail);
        offset *= 2.0;
    }
    Err(Error::Divergence {
        at: last.0,
        tail: last.1,
    })
}

/// Integrates `f` over `[a, inf)` by truncation.
///
/// `tail_bound(x)` must bound `|∫_x^∞ f|` from above and decrease to zero.
pub fn integrate_semi_infinite<F, T>(
    f: F,
    a: f64,
    tail_bound: T,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    T: FnMut(f64) -> f64,
{
    let mut f = f;
    try_integrate_semi_infinite(|x| Ok(f(x)), a, tail_bound, spec)
}

/// Fallible-integrand form of [`integrate_semi_infinite`].
pub fn try_integrate_semi_infinite<F, T>(
    f: F,
    a: f64,
    tail_bound: T,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    T: FnMut(f64) -> f64,
{
    let b = truncation_point(a, tail_bound, spec)?;
    try_integrate_with_breakpoints(f, &dyadic_breakpoints(a, b), spec).map(|i| i.value)
}

/// Smallest offset of the geometric partition near the lower limit.
const FINEST_OFFSET_LOG2: i32 = -40;

/// `a, a + 2^-40, a + 2^-39, .., b`: resolves integrands concentrated near `a`
/// at any scale down to about 1e-12.
fn dyadic_breakpoints(a: f64, b: f64) -> Vec<f64> {
    let mut points = vec![a];
    let mut k = FINEST_OFFSET_LOG2;
    loop {
        let x = a + 2f64.powi(k);
        if !(x < b) {
            break;
        }
        if x > *points.last().expect("nonempty") {
            points.push(x);
        }
        k += 1;
    }
    points.push(b);
    points
}
