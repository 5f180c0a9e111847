//! Maurizi-Queffelec polynomials
//! `P(z^(1), ..., z^(m)) = e_1^t A_q D(z^(1)) A_q D(z^(2)) ... A_q D(z^(m)) 1`
//! with `A_q = (w^{ij})` the unnormalized DFT matrix and `D(z)` diagonal.
//!
//! Variable `z^(j)_i` (both 0-based) is flattened to index `j * q + i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::CMatrix;
use crate::operator::OperatorTuple;
use crate::poly::{MultiIndex, SparsePoly};

/// Largest `q * m` accepted.
pub const MQ_VARIABLE_CAP: usize = 4096;
/// Largest number of expanded terms `q^m`.
pub const MQ_TERM_CAP: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MqSpec {
    pub q: usize,
    pub m: usize,
}

impl MqSpec {
    pub fn new(q: usize, m: usize) -> Result<Self> {
        if q < 2 {
            return Err(LabError::domain(format!("q must be >= 2, got {q}")));
        }
        if m < 1 {
            return Err(LabError::domain("m must be >= 1"));
        }
        Ok(MqSpec { q, m })
    }

    pub fn variables(&self) -> usize {
        self.q * self.m
    }

    pub fn var_index(&self, j: usize, i: usize) -> usize {
        j * self.q + i
    }

    /// `q^m`, or `None` on overflow.
    pub fn term_count(&self) -> Option<u128> {
        (self.q as u128).checked_pow(self.m as u32)
    }

    /// `w^k` with `w = exp(2 pi i / q)`, reduced mod `q` first.
    pub fn omega_pow(&self, k: usize) -> Complex64 {
        let k = k % self.q;
        Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / self.q as f64)
    }
}

pub fn dft_matrix(q: usize) -> CMatrix {
    let spec = MqSpec { q, m: 1 };
    CMatrix::from_fn(q, q, |i, j| spec.omega_pow(i * j))
}

fn check_caps(spec: &MqSpec) -> Result<()> {
    if spec.variables() > MQ_VARIABLE_CAP {
        return Err(LabError::Budget {
            what: "MQ variables q*m",
            needed: spec.variables() as u128,
            cap: MQ_VARIABLE_CAP as u128,
        });
    }
    match spec.term_count() {
        Some(t) if t <= MQ_TERM_CAP => Ok(()),
        t => Err(LabError::Budget {
            what: "MQ terms q^m",
            needed: t.unwrap_or(u128::MAX),
            cap: MQ_TERM_CAP,
        }),
    }
}

/// Full expansion: the word `(i_1, ..., i_m)` contributes
/// `w^{0*i_1 + i_1 i_2 + ... + i_{m-1} i_m} z^(1)_{i_1} ... z^(m)_{i_m}`.
pub fn build_mq_poly(spec: &MqSpec) -> Result<SparsePoly> {
    check_caps(spec)?;
    let (q, m) = (spec.q, spec.m);
    let nvars = spec.variables();
    let total = spec.term_count().expect("checked") as usize;
    let mut word = vec![0usize; m];
    let mut terms = Vec::with_capacity(total);
    for _ in 0..total {
        let mut exponent = 0usize;
        let mut prev = 0usize;
        let mut alpha = vec![0u32; nvars];
        for (j, &i) in word.iter().enumerate() {
            exponent = (exponent + prev * i) % q;
            prev = i;
            alpha[spec.var_index(j, i)] = 1;
        }
        terms.push((MultiIndex(alpha), spec.omega_pow(exponent)));
        // odometer, last letter fastest
        for slot in word.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    SparsePoly::from_terms(nvars, terms)
}

/// `q^{(m+1)/2}`, the upper bound on the Agler norm of the MQ polynomial.
pub fn mq_agler_upper(spec: &MqSpec) -> f64 {
    (spec.q as f64).powf((spec.m as f64 + 1.0) / 2.0)
}

/// `P(T)` through the structured product
/// `(e_1^t (x) I)(A_q (x) I) D(T^(1)) ... (A_q (x) I) D(T^(m)) (1 (x) I)`,
/// applied right to left on a column of `q` blocks.
pub fn block_evaluate(spec: &MqSpec, t: &OperatorTuple) -> Result<CMatrix> {
    if t.d() != spec.variables() {
        return Err(LabError::Dimension(format!(
            "MQ({}, {}) needs {} operators, got {}",
            spec.q,
            spec.m,
            spec.variables(),
            t.d()
        )));
    }
    let (q, n) = (spec.q, t.n());
    let a = dft_matrix(q);
    let mut blocks: Vec<CMatrix> = vec![CMatrix::identity(n, n); q];
    for j in (0..spec.m).rev() {
        for (i, b) in blocks.iter_mut().enumerate() {
            *b = t.get(spec.var_index(j, i)) * &*b;
        }
        // The final step only needs row 0 of A_q.
        let rows = if j == 0 { 1 } else { q };
        blocks = (0..rows)
            .map(|r| {
                let mut acc = CMatrix::zeros(n, n);
                for (s, b) in blocks.iter().enumerate() {
                    acc += b * a[(r, s)];
                }
                acc
            })
            .collect();
    }
    Ok(blocks.swap_remove(0))
}

/// Re-validates raw matrices as a commuting contraction tuple, then runs
/// [`block_evaluate`].
pub fn block_evaluate_mats(spec: &MqSpec, mats: Vec<CMatrix>) -> Result<CMatrix> {
    let t = OperatorTuple::new(mats)?;
    block_evaluate(spec, &t)
}
