//! Power series behind the radius equations, evaluated with an explicit
//! bound on the truncation error, and a bisection solver for the monotone
//! root equations they define.
//!
//! Every series here has nonnegative coefficients, so the partial sums
//! approach the limit from below and the reported `tail_bound` is a bound
//! on `limit - value` (plus a small allowance for floating-point roundoff).
//!
//! Two evaluation precisions are offered. `Precision::Double` sums in
//! `f64`. `Precision::Extended` sums in double-double arithmetic (about 106
//! significand bits) and is meant for confirming double-precision results.

use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::binom::DiagonalBinomials;
use crate::error::{LabError, Result};

/// Hard cap on the number of terms a single evaluation may use.
pub const MAX_TERMS: usize = 5_000_000;

/// Iteration cap for [`solve_root`].
pub const MAX_BISECTIONS: usize = 400;

/// Arithmetic used while summing a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl Precision {
    fn unit_roundoff(self) -> f64 {
        match self {
            Precision::Double => f64::EPSILON,
            // 2^-104
            Precision::Extended => 4.930380657631324e-32,
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(LabError::Parse(format!("unknown precision mode `{other}`"))),
        }
    }
}

/// A truncated series value with a certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on `|limit - value|`.
    pub tail_bound: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    pub const ZERO: SeriesValue = SeriesValue {
        value: 0.0,
        tail_bound: 0.0,
        terms_used: 0,
    };

    /// Certified lower and upper ends of the enclosure.
    pub fn enclosure(&self) -> (f64, f64) {
        (self.value - self.tail_bound, self.value + self.tail_bound)
    }
}

/// Scalar used for accumulating partial sums.
trait Accumulator: Copy {
    fn from_f64(x: f64) -> Self;
    fn from_biguint(x: &BigUint) -> Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    fn div(self, other: Self) -> Self;
    fn sqrt(self) -> Self;
    fn to_f64(self) -> f64;
}

impl Accumulator for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_biguint(x: &BigUint) -> Self {
        x.to_f64().unwrap_or(f64::INFINITY)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn div(self, other: Self) -> Self {
        self / other
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Accumulator for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn from_biguint(x: &BigUint) -> Self {
        let hi = x.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return TwoFloat::from(hi);
        }
        let hi_exact = BigInt::from_f64(hi).unwrap_or_default();
        let lo = (BigInt::from(x.clone()) - hi_exact).to_f64().unwrap_or(0.0);
        TwoFloat::new_add(hi, lo)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn div(self, other: Self) -> Self {
        self / other
    }
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(LabError::domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn check_unit_radius(r: f64, what: &str) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(LabError::domain(format!("{what}: radius must lie in [0, 1), got {r}")));
    }
    Ok(())
}

fn check_radius(r: f64, d: u64, what: &str) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(LabError::domain(format!("{what}: radius must be >= 0, got {r}")));
    }
    if r * (d as f64).sqrt() >= 1.0 {
        return Err(LabError::domain(format!(
            "{what}: r * sqrt(d) = {} must be < 1 (d = {d}, r = {r})",
            r * (d as f64).sqrt()
        )));
    }
    Ok(())
}

/// Sums `terms` until `tail(k, term_k)` drops below `tol / 2`.
///
/// `terms` yields `(k, t_k)` with `t_k` already in the accumulator type;
/// `tail` returns a bound on the sum of all terms after index `k`.
fn sum_with_tail<A, I, T>(precision: Precision, tol: f64, terms: I, tail: T) -> Result<SeriesValue>
where
    A: Accumulator,
    I: Iterator<Item = (usize, A)>,
    T: Fn(usize, f64) -> f64,
{
    let mut sum = A::from_f64(0.0);
    let mut used = 0usize;
    for (k, term) in terms {
        sum = sum.add(term);
        used += 1;
        let t = tail(k, term.to_f64());
        if t <= tol / 2.0 {
            let value = sum.to_f64();
            // Each addition rounds once; the bound below also covers the
            // final conversion to f64.
            let roundoff = 2.0 * (used as f64 + 2.0) * precision.unit_roundoff() * value
                + f64::EPSILON * value;
            return Ok(SeriesValue {
                value,
                tail_bound: t * (1.0 + 1e-12) + roundoff,
                terms_used: used,
            });
        }
        if used >= MAX_TERMS {
            break;
        }
    }
    Err(LabError::domain(format!(
        "series did not reach tolerance {tol:e} within {MAX_TERMS} terms"
    )))
}

/// `Li_{-1/2}(r) = sum_{k>=1} sqrt(k) r^k` for `0 <= r < 1`.
pub fn polylog_neg_half(r: f64, tol: f64) -> Result<SeriesValue> {
    polylog_neg_half_in(Precision::Double, r, tol)
}

pub fn polylog_neg_half_in(precision: Precision, r: f64, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    if !(0.0..1.0).contains(&r) {
        return Err(LabError::domain(format!("polylog argument must lie in [0, 1), got {r}")));
    }
    if r == 0.0 {
        return Ok(SeriesValue::ZERO);
    }
    // sqrt(K + j) <= sqrt(K) (1 + j), so the tail after K is at most
    // sqrt(K) r^K sum_{j>=1} (1 + j) r^j.
    let weight = r / ((1.0 - r) * (1.0 - r)) + r / (1.0 - r);
    let tail = move |_k: usize, term: f64| term * weight;
    match precision {
        Precision::Double => {
            let terms = (1usize..).scan(1.0f64, move |pow, k| {
                *pow *= r;
                Some((k, *pow * (k as f64).sqrt()))
            });
            sum_with_tail::<f64, _, _>(precision, tol, terms, tail)
        }
        Precision::Extended => {
            let rr = TwoFloat::from(r);
            let terms = (1usize..).scan(TwoFloat::from(1.0), move |pow, k| {
                *pow = *pow * rr;
                Some((k, *pow * TwoFloat::from(k as f64).sqrt()))
            });
            sum_with_tail::<TwoFloat, _, _>(precision, tol, terms, tail)
        }
    }
}

/// `sum_{k>=1} r^k C(base+k-1, k-1)^{1/2}`. `ratio_at(k)` must bound
/// `t_{j+1} / t_j` for every `j >= k`.
fn diagonal_series<A: Accumulator>(
    precision: Precision,
    r: f64,
    tol: f64,
    base: u64,
    ratio_at: impl Fn(usize) -> f64,
) -> Result<SeriesValue> {
    let rr = A::from_f64(r);
    let mut binoms = DiagonalBinomials::new(base);
    let mut pow = A::from_f64(1.0);
    let terms = (1usize..).map(move |k| {
        pow = pow.mul(rr);
        let c = binoms.next().expect("diagonal is infinite");
        (k, pow.mul(A::from_biguint(&c).sqrt()))
    });
    let tail = |k: usize, term: f64| {
        let q = ratio_at(k);
        term * q / (1.0 - q)
    };
    sum_with_tail::<A, _, _>(precision, tol, terms, tail)
}

/// `sum_{k>=1} r^k C(d+k-2, k-1)^{1/2}`, the series whose root at `1/2`
/// bounds the Bohr-Agler radius from below. Requires `r sqrt(d) < 1`.
pub fn binom_sqrt_series(d: u64, r: f64, tol: f64) -> Result<SeriesValue> {
    binom_sqrt_series_in(Precision::Double, d, r, tol)
}

pub fn binom_sqrt_series_in(precision: Precision, d: u64, r: f64, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    if d == 0 {
        return Err(LabError::domain("dimension d must be >= 1"));
    }
    check_radius(r, d, "binom_sqrt_series")?;
    if r == 0.0 {
        return Ok(SeriesValue::ZERO);
    }
    let df = d as f64;
    // t_{k+1}/t_k = r sqrt((d+k-1)/k), nonincreasing in k and <= r sqrt(d).
    let ratio = move |k: usize| r * ((df + k as f64 - 1.0) / k as f64).sqrt();
    match precision {
        Precision::Double => diagonal_series::<f64>(precision, r, tol, d - 1, ratio),
        Precision::Extended => diagonal_series::<TwoFloat>(precision, r, tol, d - 1, ratio),
    }
}

/// `r + sum_{k>=2} r^k C(d+k-1, k)^{1/2}`, the Boas-Khavinson series for
/// the Bohr radius. Requires `r sqrt(d) < 1`.
pub fn boas_khavinson_series(d: u64, r: f64, tol: f64) -> Result<SeriesValue> {
    boas_khavinson_series_in(Precision::Double, d, r, tol)
}

pub fn boas_khavinson_series_in(
    precision: Precision,
    d: u64,
    r: f64,
    tol: f64,
) -> Result<SeriesValue> {
    check_tol(tol)?;
    if d == 0 {
        return Err(LabError::domain("dimension d must be >= 1"));
    }
    check_radius(r, d, "boas_khavinson_series")?;
    if r == 0.0 {
        return Ok(SeriesValue::ZERO);
    }
    let df = d as f64;
    // For k >= 2: t_{k+1}/t_k = r sqrt((d+k)/(k+1)), nonincreasing in k and
    // <= r sqrt(d). The k = 1 term is r alone, so no ratio bound holds there.
    let ratio = move |k: usize| {
        if k < 2 {
            1.0
        } else {
            r * ((df + k as f64) / (k as f64 + 1.0)).sqrt()
        }
    };
    match precision {
        Precision::Double => bk_series::<f64>(precision, r, tol, d, ratio),
        Precision::Extended => bk_series::<TwoFloat>(precision, r, tol, d, ratio),
    }
}

fn bk_series<A: Accumulator>(
    precision: Precision,
    r: f64,
    tol: f64,
    d: u64,
    ratio_at: impl Fn(usize) -> f64,
) -> Result<SeriesValue> {
    let rr = A::from_f64(r);
    let mut binoms = DiagonalBinomials::new(d - 1);
    binoms.next(); // C(d-1, 0)
    let mut pow = A::from_f64(1.0);
    let terms = (1usize..).map(move |k| {
        pow = pow.mul(rr);
        let c = binoms.next().expect("diagonal is infinite");
        let term = if k == 1 {
            rr
        } else {
            pow.mul(A::from_biguint(&c).sqrt())
        };
        (k, term)
    });
    let tail = |k: usize, term: f64| {
        let q = ratio_at(k);
        if q >= 1.0 {
            f64::INFINITY
        } else {
            term * q / (1.0 - q)
        }
    };
    sum_with_tail::<A, _, _>(precision, tol, terms, tail)
}

/// [`binom_sqrt_series`] on the full convergence domain `0 <= r < 1`.
///
/// Terms come from the ratio recurrence
/// `t_{k+1} = t_k r sqrt((d+k-1)/k)` instead of exact binomials, so huge
/// binomials never overflow. Needed for root finding once `d >= 50`, where
/// the root exceeds `1/sqrt(d)`.
pub fn binom_sqrt_series_wide(d: u64, r: f64, tol: f64) -> Result<SeriesValue> {
    binom_sqrt_series_wide_in(Precision::Double, d, r, tol)
}

pub fn binom_sqrt_series_wide_in(precision: Precision, d: u64, r: f64, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    if d == 0 {
        return Err(LabError::domain("dimension d must be >= 1"));
    }
    check_unit_radius(r, "binom_sqrt_series_wide")?;
    if r == 0.0 {
        return Ok(SeriesValue::ZERO);
    }
    let df = d as f64;
    // t_{k+1}/t_k = r sqrt((d+k-1)/k)
    let step = move |k: usize| (df + k as f64 - 1.0, k as f64);
    match precision {
        Precision::Double => recurrence_series::<f64>(precision, r, tol, r, 1, step),
        Precision::Extended => {
            recurrence_series::<TwoFloat>(precision, r, tol, TwoFloat::from(r), 1, step)
        }
    }
}

/// [`boas_khavinson_series`] on `0 <= r < 1`, by the recurrence
/// `t_{k+1} = t_k r sqrt((d+k)/(k+1))` from `t_2 = r^2 sqrt(C(d+1, 2))`.
pub fn boas_khavinson_series_wide(d: u64, r: f64, tol: f64) -> Result<SeriesValue> {
    boas_khavinson_series_wide_in(Precision::Double, d, r, tol)
}

pub fn boas_khavinson_series_wide_in(
    precision: Precision,
    d: u64,
    r: f64,
    tol: f64,
) -> Result<SeriesValue> {
    check_tol(tol)?;
    if d == 0 {
        return Err(LabError::domain("dimension d must be >= 1"));
    }
    check_unit_radius(r, "boas_khavinson_series_wide")?;
    if r == 0.0 {
        return Ok(SeriesValue::ZERO);
    }
    let df = d as f64;
    let step = move |k: usize| (df + k as f64, k as f64 + 1.0);
    // d (d + 1) / 2 is exact in f64 for every d in range.
    let c2 = df * (df + 1.0) / 2.0;
    let rest = match precision {
        Precision::Double => recurrence_series::<f64>(precision, r, tol, r * r * c2.sqrt(), 2, step),
        Precision::Extended => {
            let rr = TwoFloat::from(r);
            let t2 = rr * rr * TwoFloat::from(c2).sqrt();
            recurrence_series::<TwoFloat>(precision, r, tol, t2, 2, step)
        }
    }?;
    Ok(SeriesValue {
        value: rest.value + r,
        tail_bound: rest.tail_bound + f64::EPSILON * (rest.value + r),
        terms_used: rest.terms_used + 1,
    })
}

/// Sums `t_{k0}, t_{k0+1}, ...` with `t_{k+1} = t_k r sqrt(num/den)` where
/// `(num, den) = step(k)` and the ratio is nonincreasing in `k`.
fn recurrence_series<A: Accumulator>(
    precision: Precision,
    r: f64,
    tol: f64,
    first: A,
    k0: usize,
    step: impl Fn(usize) -> (f64, f64),
) -> Result<SeriesValue> {
    let rr = A::from_f64(r);
    let ratio = |k: usize| {
        let (num, den) = step(k);
        r * (num / den).sqrt()
    };
    let terms = (k0..).scan(first, |t, k| {
        let cur = *t;
        let (num, den) = step(k);
        *t = t.mul(rr).mul(A::from_f64(num).div(A::from_f64(den)).sqrt());
        Some((k, cur))
    });
    let tail = |k: usize, term: f64| {
        let q = ratio(k) * (1.0 + 4.0 * f64::EPSILON);
        if q >= 1.0 {
            f64::INFINITY
        } else {
            term * q / (1.0 - q)
        }
    };
    let v = sum_with_tail::<A, _, _>(precision, tol, terms, tail)?;
    // Each recurrence step rounds a few times, so term k carries relative
    // error about 4 k u on top of what sum_with_tail accounts for.
    let drift = 4.0 * (v.terms_used + k0) as f64 * precision.unit_roundoff() * v.value;
    Ok(SeriesValue {
        tail_bound: v.tail_bound + drift,
        ..v
    })
}

/// `sum_{k>=1} r^k d^{(k-1)/2}`, the geometric majorant of
/// [`binom_sqrt_series`]; its root at `1/2` is `1/(sqrt(d)+2)`.
pub fn geometric_sqrt_d_series(d: u64, r: f64, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    if d == 0 {
        return Err(LabError::domain("dimension d must be >= 1"));
    }
    check_radius(r, d, "geometric_sqrt_d_series")?;
    if r == 0.0 {
        return Ok(SeriesValue::ZERO);
    }
    let rho = r * (d as f64).sqrt();
    let terms = (1usize..).scan(r / rho, move |t, k| {
        *t *= rho;
        Some((k, *t))
    });
    sum_with_tail::<f64, _, _>(Precision::Double, tol, terms, move |_, term| {
        term * rho / (1.0 - rho)
    })
}

/// Bisection for `series(r) = target` on an increasing series.
///
/// `series` receives the abscissa and the truncation tolerance to use;
/// it is always called with `tol / 4`. The returned point is the midpoint
/// of a bracket of width at most `tol` at which the residual
/// `|series(r) - target|` is also at most `tol`.
pub fn solve_root<F>(series: F, target: f64, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<SeriesValue>,
{
    check_tol(tol)?;
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(LabError::domain(format!("empty bracket ({lo}, {hi})")));
    }
    let eval_tol = tol / 4.0;
    let f_lo = series(lo, eval_tol)?;
    let f_hi = series(hi, eval_tol)?;
    if !(f_lo.value < target && target < f_hi.value) {
        return Err(LabError::Bracket {
            lo,
            hi,
            f_lo: f_lo.value,
            f_hi: f_hi.value,
            target,
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            let v = series(mid, eval_tol)?;
            if (v.value - target).abs() <= tol {
                return Ok(mid);
            }
        }
        if mid <= lo || mid >= hi {
            break;
        }
        let v = series(mid, eval_tol)?;
        if v.value < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(LabError::NonConvergence {
        iterations: MAX_BISECTIONS,
        width: hi - lo,
    })
}
