//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use radii_lab::linalg::CMatrix;
use radii_lab::operator::OperatorTuple;
use radii_lab::transfer::{CVector, Colligation, Word};
use radii_lab::{MultiIndex, SparsePoly};

/// `sum_{w : alpha(w) = alpha} B P_{w(1)} D P_{w(2)} ... D P_{w(k)} C`,
/// by brute force over all `d^k` words.
pub fn word_sum_coefficient(col: &Colligation, alpha: &MultiIndex) -> Complex64 {
    let d = col.d();
    let k = alpha.degree() as usize;
    if k == 0 {
        return col.a();
    }
    let mut total = Complex64::ZERO;
    for w in Word::all(k, d) {
        if w.alpha(d) != *alpha {
            continue;
        }
        // right to left: x = P_{w(k)} C, then x = P_{w(i)} D x
        let mut x = col.project(w.0[k - 1] as usize - 1, col.c());
        for i in (0..k - 1).rev() {
            let dx: CVector = col.dmat() * &x;
            x = col.project(w.0[i] as usize - 1, &dx);
        }
        total += col.b().dot(&x);
    }
    total
}

/// Plain partial sum `sum_{k=1}^{n} t(k)` in f64.
pub fn direct_sum(n: u64, t: impl Fn(u64) -> f64) -> f64 {
    (1..=n).map(t).sum()
}

/// `C(n, k)` in f64 via the multiplicative formula.
pub fn binom_f64(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `f(T)` by expanding every monomial as an explicit product of factors,
/// with no power caching.
pub fn naive_eval(f: &SparsePoly, t: &OperatorTuple) -> CMatrix {
    let n = t.n();
    let mut out = CMatrix::zeros(n, n);
    for (alpha, c) in f.terms() {
        let mut m = CMatrix::identity(n, n);
        for (i, &e) in alpha.0.iter().enumerate() {
            for _ in 0..e {
                m = &m * t.get(i);
            }
        }
        out += m * *c;
    }
    out
}

/// Dense phase grid maximum of `|f|` on the torus.
pub fn dense_grid_sup(f: &SparsePoly, per_dim: usize) -> f64 {
    let d = f.dim();
    let total = per_dim.pow(d as u32);
    let mut best: f64 = 0.0;
    let mut z = vec![Complex64::ZERO; d];
    for idx in 0..total {
        let mut code = idx;
        for zj in z.iter_mut() {
            *zj = Complex64::from_polar(1.0, std::f64::consts::TAU * (code % per_dim) as f64 / per_dim as f64);
            code /= per_dim;
        }
        best = best.max(f.eval(&z).norm());
    }
    best
}

/// Inductive defect: `Delta^{v_0} = I`,
/// `Delta^{v_{k+1}} = Delta^{v_k} - T_{k+1} Delta^{v_k} T_{k+1}^*`
/// along the order given by `s`.
pub fn inductive_defects(t: &OperatorTuple, s: &[usize]) -> Vec<CMatrix> {
    let n = t.n();
    let mut out = vec![CMatrix::identity(n, n)];
    for &j in s {
        let prev = out.last().unwrap();
        let tj = t.get(j);
        out.push(prev - tj * prev * tj.adjoint());
    }
    out
}
