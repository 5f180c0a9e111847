//! Explicit lower and upper bounds on the Bohr radius `K_d`, the
//! Bohr-Agler radius `K(A_d)` and the Schur-Agler radius `SA_d`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::series::{
    binom_sqrt_series_wide_in, boas_khavinson_series_wide_in, solve_root, Precision, SeriesValue,
};

/// Floor on the tolerance used by the report consistency check.
pub const DEFAULT_REPORT_TOL: f64 = 1e-9;

/// Finds `hi` with `series(hi) > target`, starting above `start`.
fn upper_bracket(series: &impl Fn(f64, f64) -> Result<SeriesValue>, target: f64, start: f64, tol: f64) -> Result<f64> {
    let mut hi = start;
    for _ in 0..200 {
        if series(hi, tol)?.value > target {
            return Ok(hi);
        }
        hi = (2.0 * hi).min(0.5 * (1.0 + hi));
    }
    Err(LabError::domain(format!("no upper bracket found for target {target}")))
}

/// Root of `sum_{k>=1} r^k C(d+k-2, k-1)^{1/2} = 1/2`, a lower bound for
/// `K(A_d)`.
pub fn ka_lower_root(d: u64, tol: f64) -> Result<f64> {
    ka_lower_root_in(Precision::Double, d, tol)
}

pub fn ka_lower_root_in(precision: Precision, d: u64, tol: f64) -> Result<f64> {
    if d == 0 {
        return Err(LabError::domain("d must be >= 1"));
    }
    let f = move |r: f64, t: f64| binom_sqrt_series_wide_in(precision, d, r, t);
    // the root sits above 1/(sqrt(d)+2)
    let hi = upper_bracket(&f, 0.5, 2.0 * ka_lower_closed(d), tol)?;
    solve_root(f, 0.5, (0.0, hi), tol)
}

/// `1/(sqrt(d) + 2)`.
pub fn ka_lower_closed(d: u64) -> f64 {
    1.0 / ((d as f64).sqrt() + 2.0)
}

/// Root of `r + sum_{k>=2} r^k C(d+k-1, k)^{1/2} = 1/2`, the
/// Boas-Khavinson lower bound for `K_d`.
pub fn kd_lower_bk(d: u64, tol: f64) -> Result<f64> {
    kd_lower_bk_in(Precision::Double, d, tol)
}

pub fn kd_lower_bk_in(precision: Precision, d: u64, tol: f64) -> Result<f64> {
    if d == 0 {
        return Err(LabError::domain("d must be >= 1"));
    }
    let f = move |r: f64, t: f64| boas_khavinson_series_wide_in(precision, d, r, t);
    let hi = upper_bracket(&f, 0.5, 2.0 / (3.0 * (d as f64).sqrt()), tol)?;
    solve_root(f, 0.5, (0.0, hi), tol)
}

/// `1/sqrt(d-1)`.
pub fn sa_lower(d: u64) -> Result<f64> {
    if d < 2 {
        return Err(LabError::domain(format!("sa_lower needs d >= 2, got {d}")));
    }
    Ok(1.0 / ((d - 1) as f64).sqrt())
}

/// `1/sqrt(1.23)`, from a three-variable polynomial with Agler-to-sup
/// ratio at least 1.23.
pub fn sa3_upper_grinshpan() -> f64 {
    1.0 / 1.23f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MqUpper {
    pub value: f64,
    pub q: u64,
    pub m: u64,
}

/// `min q^{1/(2m) - 1/2}` over `q >= 2, m >= 1, q m <= d`.
///
/// For fixed `m` the exponent is `<= 0`, so `q = floor(d/m)` is optimal.
/// Ties keep the smallest `m`.
pub fn ka_upper_mq(d: u64) -> Result<MqUpper> {
    if d < 2 {
        return Err(LabError::domain(format!("ka_upper_mq needs d >= 2, got {d}")));
    }
    let mut best = MqUpper { value: 1.0, q: d, m: 1 };
    for m in 2..=d / 2 {
        let q = d / m;
        let value = (q as f64).powf(0.5 / m as f64 - 0.5);
        if value < best.value {
            best = MqUpper { value, q, m };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DixonUpper {
    pub value: f64,
    pub n: u64,
}

/// `sqrt(2) 8^{1/k} (log k)^{1/(2k)} k^{(n+1)/(2k)} / d^{n/(2k)}` with
/// `k = 2n + 1`.
pub fn dixon_formula(d: u64, n: u64) -> f64 {
    let k = (2 * n + 1) as f64;
    let (df, nf) = (d as f64, n as f64);
    let log = 0.5 * 2f64.ln() + 8f64.ln() / k + k.ln().ln() / (2.0 * k) + (nf + 1.0) * k.ln() / (2.0 * k)
        - nf * df.ln() / (2.0 * k);
    log.exp()
}

/// Minimum of [`dixon_formula`] over `n >= 1` with `d >= 2(2n+1)`.
pub fn sa_upper_dixon(d: u64) -> Result<DixonUpper> {
    if d < 6 {
        return Err(LabError::domain(format!(
            "sa_upper_dixon is infeasible for d = {d}: needs d >= 6"
        )));
    }
    let n_max = (d / 2 - 1) / 2;
    let mut best = DixonUpper {
        value: dixon_formula(d, 1),
        n: 1,
    };
    for n in 2..=n_max {
        let value = dixon_formula(d, n);
        if value < best.value {
            best = DixonUpper { value, n };
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "K_d")]
    K,
    #[serde(rename = "KA_d")]
    Ka,
    #[serde(rename = "SA_d")]
    Sa,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::K => "K_d",
            Quantity::Ka => "KA_d",
            Quantity::Sa => "SA_d",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Upper,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundEntry {
    pub quantity: Quantity,
    pub direction: Direction,
    pub value: f64,
    pub method: String,
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub d: u64,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn entries_for(&self, q: Quantity, dir: Direction) -> impl Iterator<Item = &BoundEntry> {
        self.entries
            .iter()
            .filter(move |e| e.quantity == q && e.direction == dir)
    }

    pub fn best(&self, q: Quantity, dir: Direction) -> Option<&BoundEntry> {
        let it = self.entries_for(q, dir);
        match dir {
            Direction::Lower => it.max_by(|a, b| a.value.total_cmp(&b.value)),
            Direction::Upper => it.min_by(|a, b| a.value.total_cmp(&b.value)),
        }
    }

    pub fn find(&self, q: Quantity, dir: Direction, method: &str) -> Option<&BoundEntry> {
        self.entries_for(q, dir).find(|e| e.method == method)
    }

    /// Every lower value is at most every upper value (plus `tol`) for the
    /// same quantity, and every value lies in `(0, 1]`.
    pub fn check_consistency(&self, tol: f64) -> Result<()> {
        for e in &self.entries {
            if !(e.value > 0.0 && e.value <= 1.0 + tol) {
                return Err(LabError::Consistency {
                    d: self.d as usize,
                    quantity: e.quantity.to_string(),
                    lower: e.value,
                    lower_method: e.method.clone(),
                    upper: if e.value <= 0.0 { 0.0 } else { 1.0 },
                    upper_method: "range (0, 1]".into(),
                });
            }
        }
        for q in [Quantity::K, Quantity::Ka, Quantity::Sa] {
            for lo in self.entries_for(q, Direction::Lower) {
                for hi in self.entries_for(q, Direction::Upper) {
                    if lo.value > hi.value + tol {
                        return Err(LabError::Consistency {
                            d: self.d as usize,
                            quantity: q.to_string(),
                            lower: lo.value,
                            lower_method: lo.method.clone(),
                            upper: hi.value,
                            upper_method: hi.method.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

pub mod method {
    pub const BK_ROOT: &str = "boas-khavinson-root";
    pub const BK_EXPLICIT_LOWER: &str = "boas-khavinson-1/(3sqrt d)";
    pub const BK_EXPLICIT_UPPER: &str = "boas-khavinson-2sqrt(log d/d)";
    pub const BOHR: &str = "bohr-one-variable";
    pub const K1_MONOTONE: &str = "monotone-from-d=1";
    pub const KA_ROOT: &str = "realization-root";
    pub const KA_CLOSED: &str = "realization-closed-form";
    pub const KA_EQUALS_K2: &str = "realization-root-via-KA2=K2";
    pub const K_LEQ_KA: &str = "bohr-radius-below-agler";
    pub const MQ: &str = "maurizi-queffelec-polynomial";
    pub const SA_DEFECT: &str = "defect-positivity";
    pub const SA_VN_ANDO: &str = "von-neumann-ando";
    pub const SA_TRIVIAL: &str = "trivial";
    pub const SA_GRINSHPAN: &str = "ratio-1.23";
    pub const SA_DIXON: &str = "dixon-random-polynomials";
}

mod anchor {
    pub const BOHR: &str = "Bohr 1914";
    pub const BK: &str = "Boas-Khavinson 1997";
    pub const REALIZATION: &str = "Agler transfer-function realization; coefficient estimate";
    pub const MQ: &str = "Maurizi-Queffelec 2010";
    pub const DEFECT: &str = "Grinshpan et al. defect operators";
    pub const GRINSHPAN: &str = "Grinshpan et al. 2009";
    pub const VN_ANDO: &str = "von Neumann 1951; Ando 1963";
    pub const DIXON: &str = "Dixon 1976";
    pub const MONOTONE: &str = "monotonicity in d";
}

fn entry(quantity: Quantity, direction: Direction, value: f64, method: &str, anchor: &str) -> BoundEntry {
    BoundEntry {
        quantity,
        direction,
        value,
        method: method.to_string(),
        anchor: anchor.to_string(),
    }
}

pub fn assemble_report(d: u64, tol: f64) -> Result<BoundReport> {
    assemble_report_in(Precision::Double, d, tol)
}

/// Gathers every applicable bound for dimension `d` and runs
/// [`BoundReport::check_consistency`] with tolerance `tol` (at least
/// [`DEFAULT_REPORT_TOL`]).
pub fn assemble_report_in(precision: Precision, d: u64, tol: f64) -> Result<BoundReport> {
    use Direction::*;
    use Quantity::*;
    if d == 0 {
        return Err(LabError::domain("d must be >= 1"));
    }
    let mut entries = Vec::new();
    let third = 1.0 / 3.0;

    let bk = kd_lower_bk_in(precision, d, tol)?;
    let ka = ka_lower_root_in(precision, d, tol)?;

    // K_d
    entries.push(entry(K, Lower, bk, method::BK_ROOT, anchor::BK));
    let bk_lo = 1.0 / (3.0 * (d as f64).sqrt());
    entries.push(entry(K, Lower, bk_lo, method::BK_EXPLICIT_LOWER, anchor::BK));
    if d == 1 {
        entries.push(entry(K, Lower, third, method::BOHR, anchor::BOHR));
        entries.push(entry(K, Upper, third, method::BOHR, anchor::BOHR));
    } else {
        entries.push(entry(K, Upper, third, method::K1_MONOTONE, anchor::MONOTONE));
    }
    if d == 2 {
        entries.push(entry(K, Lower, ka, method::KA_EQUALS_K2, anchor::VN_ANDO));
    }
    if d >= 2 {
        let bk_hi = 2.0 * ((d as f64).ln() / d as f64).sqrt();
        if bk_hi < 1.0 {
            entries.push(entry(K, Upper, bk_hi, method::BK_EXPLICIT_UPPER, anchor::BK));
        }
    }

    // K(A_d)
    entries.push(entry(Ka, Lower, ka, method::KA_ROOT, anchor::REALIZATION));
    entries.push(entry(Ka, Lower, ka_lower_closed(d), method::KA_CLOSED, anchor::REALIZATION));
    entries.push(entry(Ka, Lower, bk, method::K_LEQ_KA, anchor::BK));
    if d == 1 {
        entries.push(entry(Ka, Upper, third, method::BOHR, anchor::VN_ANDO));
    } else {
        entries.push(entry(Ka, Upper, third, method::K1_MONOTONE, anchor::MONOTONE));
        let mq = ka_upper_mq(d)?;
        entries.push(entry(Ka, Upper, mq.value, method::MQ, anchor::MQ));
    }

    // SA_d
    entries.push(entry(Sa, Upper, 1.0, method::SA_TRIVIAL, anchor::VN_ANDO));
    entries.push(entry(Sa, Lower, bk, method::BK_ROOT, anchor::BK));
    if d <= 2 {
        entries.push(entry(Sa, Lower, 1.0, method::SA_VN_ANDO, anchor::VN_ANDO));
    }
    if d >= 2 {
        entries.push(entry(Sa, Lower, sa_lower(d)?, method::SA_DEFECT, anchor::DEFECT));
    }
    if d == 3 {
        entries.push(entry(Sa, Upper, sa3_upper_grinshpan(), method::SA_GRINSHPAN, anchor::GRINSHPAN));
    }
    if d >= 6 {
        let dx = sa_upper_dixon(d)?;
        // values above 1 carry no information
        if dx.value <= 1.0 {
            entries.push(entry(Sa, Upper, dx.value, method::SA_DIXON, anchor::DIXON));
        }
    }

    let report = BoundReport { d, entries };
    report.check_consistency(tol.max(DEFAULT_REPORT_TOL))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((ka_lower_closed(1) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(ka_lower_closed(4), 0.25);
        assert_eq!(sa_lower(2).unwrap(), 1.0);
        assert_eq!(sa_lower(5).unwrap(), 0.5);
        assert!(sa_lower(1).is_err());
        assert!((sa3_upper_grinshpan() - 0.901_669_5).abs() < 1e-6);
    }

    #[test]
    fn roots_small_d() {
        assert!((ka_lower_root(1, 1e-12).unwrap() - 1.0 / 3.0).abs() < 1e-11);
        assert!((ka_lower_root(2, 1e-10).unwrap() - 0.300_628_282_985_9).abs() < 1e-9);
        assert!((kd_lower_bk(1, 1e-12).unwrap() - 1.0 / 3.0).abs() < 1e-11);
        assert!((kd_lower_bk(2, 1e-10).unwrap() - 0.287_346_771_473_4).abs() < 1e-9);
        assert!(ka_lower_root(9, 1e-10).unwrap() >= 0.2);
    }

    #[test]
    fn roots_large_d_leave_strict_domain() {
        for d in [64u64, 1000, 100_000] {
            let r = ka_lower_root(d, 1e-10).unwrap();
            assert!(r >= ka_lower_closed(d));
            assert!(r * (d as f64).sqrt() > 1.0);
            let b = kd_lower_bk(d, 1e-10).unwrap();
            assert!(b > 0.0 && b < r + 1.0);
        }
    }

    #[test]
    fn mq_enumeration() {
        let u = ka_upper_mq(2).unwrap();
        assert_eq!((u.value, u.q, u.m), (1.0, 2, 1));
        let u = ka_upper_mq(4).unwrap();
        assert_eq!((u.q, u.m), (2, 2));
        assert!((u.value - 2f64.powf(-0.25)).abs() < 1e-15);
        let u = ka_upper_mq(1000).unwrap();
        assert!(u.value <= 144f64.powf(-5.0 / 12.0));
    }

    #[test]
    fn dixon_small_d() {
        let v = sa_upper_dixon(6).unwrap();
        assert_eq!(v.n, 1);
        let oracle = 2f64.sqrt() * 8f64.powf(1.0 / 3.0) * 3f64.ln().powf(1.0 / 6.0) * 3f64.powf(1.0 / 3.0)
            / 6f64.powf(1.0 / 6.0);
        assert!((v.value - oracle).abs() < 1e-12);
        assert!(sa_upper_dixon(5).is_err());
    }

    #[test]
    fn reports_are_consistent() {
        for d in [1u64, 2, 3, 4, 6, 10, 100, 1000, 100_000] {
            let rep = assemble_report(d, 1e-10).unwrap();
            assert!(!rep.entries.is_empty(), "d = {d}");
        }
        let r2 = assemble_report(2, 1e-10).unwrap();
        let best = r2.best(Quantity::K, Direction::Lower).unwrap();
        assert!((best.value - 0.3006).abs() < 1e-4);
        let r3 = assemble_report(3, 1e-10).unwrap();
        assert!(r3.find(Quantity::Sa, Direction::Upper, method::SA_GRINSHPAN).is_some());
    }

    #[test]
    fn consistency_violation_is_reported() {
        let rep = BoundReport {
            d: 3,
            entries: vec![
                entry(Quantity::Sa, Direction::Lower, 0.8, "a", ""),
                entry(Quantity::Sa, Direction::Upper, 0.7, "b", ""),
            ],
        };
        let err = rep.check_consistency(1e-9).unwrap_err();
        assert!(err.is_invariant_violation());
    }
}
