//! Commuting contraction tuples: polynomial evaluation, defect operators,
//! the positivity lemma behind `SA_d >= 1/sqrt(d-1)`, and a randomized
//! search for tuples with a large ratio `||f(T)|| / ||f||_inf`.

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{hermitian_min_eigenvalue, hermitian_part, op_norm, random_unitary, CMatrix};
use crate::poly::{MultiIndex, SparsePoly, SupNormOptions};
use crate::rng::{disk_point, stream, unimodular, LabRng};

pub const DEFAULT_TOL_COMMUTE: f64 = 1e-10;
pub const DEFAULT_TOL_NORM: f64 = 1e-10;

/// Largest defect lattice `prod (alpha_i + 1)` accepted by [`defect_full`].
pub const DEFECT_LATTICE_CAP: usize = 1 << 16;

/// Default spectral radius bound for sampled tuples (strict contractions).
pub const STRICT_RADIUS: f64 = 1.0 - 1e-6;

/// `d` commuting contractions on a common `N`-dimensional space.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    mats: Vec<CMatrix>,
    tol_commute: f64,
    tol_norm: f64,
}

impl OperatorTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerances(mats, DEFAULT_TOL_COMMUTE, DEFAULT_TOL_NORM)
    }

    /// Validates squareness, common size, `||T_i|| <= 1 + tol_norm` and
    /// `||T_i T_j - T_j T_i|| <= tol_commute * max(1, ||T_i|| ||T_j||)`.
    pub fn with_tolerances(mats: Vec<CMatrix>, tol_commute: f64, tol_norm: f64) -> Result<Self> {
        if mats.is_empty() {
            return Err(LabError::Dimension("operator tuple must have d >= 1 members".into()));
        }
        let n = mats[0].nrows();
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(LabError::Dimension(format!(
                    "T{i} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let norms: Vec<f64> = mats.iter().map(op_norm).collect();
        for (i, &nm) in norms.iter().enumerate() {
            if nm > 1.0 + tol_norm {
                return Err(LabError::NotContraction {
                    index: i,
                    norm: nm,
                    allowed: 1.0 + tol_norm,
                });
            }
        }
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let comm = &mats[i] * &mats[j] - &mats[j] * &mats[i];
                let norm = op_norm(&comm);
                let allowed = tol_commute * (norms[i] * norms[j]).max(1.0);
                if norm > allowed {
                    return Err(LabError::Commutation { i, j, norm, allowed });
                }
            }
        }
        Ok(OperatorTuple {
            mats,
            tol_commute,
            tol_norm,
        })
    }

    pub fn zero(d: usize, n: usize) -> Self {
        OperatorTuple {
            mats: vec![CMatrix::zeros(n, n); d],
            tol_commute: DEFAULT_TOL_COMMUTE,
            tol_norm: DEFAULT_TOL_NORM,
        }
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.mats[i]
    }

    pub fn tolerances(&self) -> (f64, f64) {
        (self.tol_commute, self.tol_norm)
    }

    /// `(s T_1, ..., s T_d)`; contractivity is preserved for `|s| <= 1`.
    pub fn scaled(&self, s: Complex64) -> OperatorTuple {
        assert!(s.norm() <= 1.0 + 1e-15, "scaling by |s| > 1 may leave the contraction class");
        OperatorTuple {
            mats: self.mats.iter().map(|m| m * s).collect(),
            tol_commute: self.tol_commute,
            tol_norm: self.tol_norm,
        }
    }

    /// Scales member `i` by `factors[i]`; every factor must have modulus <= 1.
    pub fn scaled_each(&self, factors: &[f64]) -> OperatorTuple {
        assert_eq!(factors.len(), self.d());
        assert!(factors.iter().all(|f| f.abs() <= 1.0 + 1e-15));
        OperatorTuple {
            mats: self
                .mats
                .iter()
                .zip(factors)
                .map(|(m, &f)| m * Complex64::new(f, 0.0))
                .collect(),
            tol_commute: self.tol_commute,
            tol_norm: self.tol_norm,
        }
    }

    /// Block-diagonal direct sum of two tuples with the same `d`.
    pub fn direct_sum(&self, other: &OperatorTuple) -> Result<OperatorTuple> {
        if self.d() != other.d() {
            return Err(LabError::Dimension("direct sum needs equal d".into()));
        }
        let (n1, n2) = (self.n(), other.n());
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| {
                let mut m = CMatrix::zeros(n1 + n2, n1 + n2);
                m.view_mut((0, 0), (n1, n1)).copy_from(a);
                m.view_mut((n1, n1), (n2, n2)).copy_from(b);
                m
            })
            .collect();
        Ok(OperatorTuple {
            mats,
            tol_commute: self.tol_commute,
            tol_norm: self.tol_norm,
        })
    }

    /// `T^alpha = T_1^{alpha_1} ... T_d^{alpha_d}`.
    pub fn power(&self, alpha: &MultiIndex) -> CMatrix {
        PowerCache::new(self).monomial(alpha)
    }
}

/// Caches `T_i^e` so repeated monomials reuse earlier products.
pub struct PowerCache<'a> {
    tuple: &'a OperatorTuple,
    powers: Vec<Vec<CMatrix>>,
}

impl<'a> PowerCache<'a> {
    pub fn new(tuple: &'a OperatorTuple) -> Self {
        let n = tuple.n();
        PowerCache {
            tuple,
            powers: vec![vec![CMatrix::identity(n, n)]; tuple.d()],
        }
    }

    pub fn pow(&mut self, i: usize, e: u32) -> &CMatrix {
        let table = &mut self.powers[i];
        while table.len() <= e as usize {
            let next = table.last().expect("identity present") * &self.tuple.mats[i];
            table.push(next);
        }
        &table[e as usize]
    }

    pub fn monomial(&mut self, alpha: &MultiIndex) -> CMatrix {
        let n = self.tuple.n();
        let mut acc = CMatrix::identity(n, n);
        for (i, &e) in alpha.0.iter().enumerate() {
            if e > 0 {
                acc = acc * self.pow(i, e);
            }
        }
        acc
    }
}

/// `f(T) = sum_alpha f_alpha T^alpha`.
pub fn eval_poly(f: &SparsePoly, t: &OperatorTuple) -> Result<CMatrix> {
    if f.dim() != t.d() {
        return Err(LabError::Dimension(format!(
            "polynomial has {} variables but the tuple has {} members",
            f.dim(),
            t.d()
        )));
    }
    let n = t.n();
    let mut cache = PowerCache::new(t);
    let mut out = CMatrix::zeros(n, n);
    for (alpha, c) in f.terms() {
        out += cache.monomial(alpha) * *c;
    }
    Ok(out)
}

/// `Delta_T^alpha = sum_{0 <= beta <= alpha} (-1)^{|beta|} T^beta (T^beta)^*`
/// for a 0/1 multi-index `alpha`.
pub fn defect(t: &OperatorTuple, alpha: &MultiIndex) -> Result<CMatrix> {
    if alpha.0.iter().any(|&e| e > 1) {
        return Err(LabError::Budget {
            what: "defect exponent (binary lattice; use defect_full for larger entries)",
            needed: alpha.0.iter().copied().max().unwrap_or(0) as u128,
            cap: 1,
        });
    }
    defect_full(t, alpha)
}

/// Defect operator over the full lattice `0 <= beta <= alpha`, capped at
/// [`DEFECT_LATTICE_CAP`] terms.
pub fn defect_full(t: &OperatorTuple, alpha: &MultiIndex) -> Result<CMatrix> {
    if alpha.dim() != t.d() {
        return Err(LabError::Dimension(format!(
            "multi-index {alpha} does not match tuple size {}",
            t.d()
        )));
    }
    let lattice: u128 = alpha.0.iter().map(|&e| e as u128 + 1).product();
    if lattice > DEFECT_LATTICE_CAP as u128 {
        return Err(LabError::Budget {
            what: "defect lattice terms",
            needed: lattice,
            cap: DEFECT_LATTICE_CAP as u128,
        });
    }
    let n = t.n();
    let mut cache = PowerCache::new(t);
    let mut acc = CMatrix::zeros(n, n);
    for beta in alpha.lattice_below() {
        let tb = cache.monomial(&beta);
        let term = &tb * tb.adjoint();
        if beta.degree() % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(hermitian_part(&acc))
}

/// `sum_{j in S} e_j` for 0-based indices `S`.
pub fn indicator(d: usize, s: &[usize]) -> MultiIndex {
    let mut v = vec![0; d];
    for &j in s {
        v[j] = 1;
    }
    MultiIndex(v)
}

/// Which index set the positivity lemma's hypothesis sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisReading {
    /// `sum_{j in S} T_j T_j^* <= I`, the form the induction actually uses.
    InS,
    /// `sum_{j not in S} T_j T_j^* <= I`.
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub holds_hypothesis: bool,
    pub holds_conclusion: bool,
    /// Smallest eigenvalue of `Delta_T^alpha`, `alpha = sum_{j in S} e_j`.
    pub min_eig: f64,
    /// Smallest eigenvalue of `I - sum T_j T_j^*` over the hypothesis set.
    pub hypothesis_min_eig: f64,
}

pub fn check_positivity_lemma(t: &OperatorTuple, s: &[usize], tol: f64) -> Result<PositivityCheck> {
    check_positivity_lemma_with(t, s, HypothesisReading::InS, tol)
}

pub fn check_positivity_lemma_with(
    t: &OperatorTuple,
    s: &[usize],
    reading: HypothesisReading,
    tol: f64,
) -> Result<PositivityCheck> {
    let d = t.d();
    if let Some(&bad) = s.iter().find(|&&j| j >= d) {
        return Err(LabError::domain(format!("index {bad} outside 0..{d}")));
    }
    let n = t.n();
    let in_s = |j: usize| s.contains(&j);
    let mut gap = CMatrix::identity(n, n);
    for j in 0..d {
        let take = match reading {
            HypothesisReading::InS => in_s(j),
            HypothesisReading::Complement => !in_s(j),
        };
        if take {
            gap -= t.get(j) * t.get(j).adjoint();
        }
    }
    let hypothesis_min_eig = hermitian_min_eigenvalue(&gap);
    let delta = defect(t, &indicator(d, s))?;
    let min_eig = hermitian_min_eigenvalue(&delta);
    Ok(PositivityCheck {
        holds_hypothesis: hypothesis_min_eig >= -tol,
        holds_conclusion: min_eig >= -tol,
        min_eig,
        hypothesis_min_eig,
    })
}

/// Membership in `P_{p,q}`: the defects at `sum_{j != p} e_j` and
/// `sum_{j != q} e_j` are both positive semidefinite (to `-tol`).
pub fn in_class_p(t: &OperatorTuple, p: usize, q: usize, tol: f64) -> Result<bool> {
    let d = t.d();
    if p >= d || q >= d {
        return Err(LabError::domain(format!("indices ({p}, {q}) outside 0..{d}")));
    }
    for skip in [p, q] {
        let s: Vec<usize> = (0..d).filter(|&j| j != skip).collect();
        let delta = defect(t, &indicator(d, &s))?;
        if hermitian_min_eigenvalue(&delta) < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Random commuting tuples

/// Simultaneously diagonalizable tuple `U diag(lambda_i) U^*` with
/// eigenvalues in the closed disk of radius `radius`.
pub fn diagonal_family(rng: &mut LabRng, d: usize, n: usize, radius: f64) -> OperatorTuple {
    let u = random_unitary(rng, n);
    let mats = (0..d)
        .map(|_| {
            let diag = DVector::from_fn(n, |_, _| disk_point(rng, radius));
            &u * CMatrix::from_diagonal(&diag) * u.adjoint()
        })
        .collect();
    OperatorTuple {
        mats,
        tol_commute: DEFAULT_TOL_COMMUTE,
        tol_norm: DEFAULT_TOL_NORM,
    }
}

/// Basis of polynomials of total degree `<= g` in `d` variables, graded by
/// degree.
fn graded_basis(d: usize, g: u32) -> Vec<MultiIndex> {
    (0..=g).flat_map(|k| MultiIndex::all_of_degree(d, k)).collect()
}

/// Largest truncation degree whose graded basis has at most `n` elements.
pub fn shift_degree_for(d: usize, n: usize) -> Option<u32> {
    let mut g = None;
    for k in 1.. {
        let size = crate::binom::binomial((d + k) as u64, k as u64);
        if size > num_bigint::BigUint::from(n) {
            break;
        }
        g = Some(k as u32);
    }
    g
}

/// Weighted coordinate shifts on polynomials truncated at degree `g`:
/// `T_i z^alpha = c_i phi_{|alpha|} z^{alpha + e_i}` (zero past degree `g`).
/// The product weight structure makes the tuple commute exactly; each
/// `||T_i|| = |c_i| max phi <= radius`. A common unitary change of basis is
/// applied on top.
pub fn weighted_shift_family(rng: &mut LabRng, d: usize, g: u32, radius: f64) -> OperatorTuple {
    let basis = graded_basis(d, g);
    let n = basis.len();
    let index: HashMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let phi: Vec<f64> = (0..g)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>().sqrt() })
        .collect();
    let coef: Vec<Complex64> = (0..d)
        .map(|_| {
            let rho = if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>() };
            unimodular(rng) * rho * radius
        })
        .collect();
    let u = if rng.random_bool(0.5) {
        random_unitary(rng, n)
    } else {
        CMatrix::identity(n, n)
    };
    let mats = (0..d)
        .map(|i| {
            let mut m = CMatrix::zeros(n, n);
            for (col, alpha) in basis.iter().enumerate() {
                let k = alpha.degree();
                if k < g {
                    let row = index[&alpha.plus_unit(i)];
                    m[(row, col)] = coef[i] * phi[k as usize];
                }
            }
            &u * m * u.adjoint()
        })
        .collect();
    OperatorTuple {
        mats,
        tol_commute: DEFAULT_TOL_COMMUTE,
        tol_norm: DEFAULT_TOL_NORM,
    }
}

/// Draws a commuting contraction tuple of size at most `n_max` from one of
/// the generator families: diagonalizable, weighted shift, or a direct sum
/// of the two.
pub fn random_commuting_tuple(rng: &mut LabRng, d: usize, n_max: usize, radius: f64) -> OperatorTuple {
    let shift_g = shift_degree_for(d, n_max);
    let pick: u8 = rng.random_range(0..3);
    match (pick, shift_g) {
        (1, Some(g)) => {
            let g = rng.random_range(1..=g);
            weighted_shift_family(rng, d, g, radius)
        }
        (2, Some(g)) => {
            let g = rng.random_range(1..=g);
            let shift = weighted_shift_family(rng, d, g, radius);
            let room = n_max - shift.n();
            if room == 0 {
                shift
            } else {
                let n = rng.random_range(1..=room);
                let diag = diagonal_family(rng, d, n, radius);
                shift.direct_sum(&diag).expect("same d")
            }
        }
        _ => {
            let n = rng.random_range(1..=n_max.max(1));
            diagonal_family(rng, d, n, radius)
        }
    }
}

// ---------------------------------------------------------------------------
// Agler-ratio search

#[derive(Debug, Clone)]
pub struct AglerSearchOptions {
    /// Total number of `f(T)` evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Matrix sizes to sample from.
    pub dims: Vec<usize>,
    /// Divide by the l1 norm (a certified upper bound on `||f||_inf`)
    /// instead of the torus sup-norm lower estimate.
    pub certify: bool,
    /// Allow members of norm exactly 1 instead of `1 - 1e-6`.
    pub allow_boundary: bool,
    /// Stop early once this ratio is reached.
    pub stop_at: Option<f64>,
    pub sup_norm: SupNormOptions,
    /// Number of independent random streams.
    pub streams: usize,
}

impl Default for AglerSearchOptions {
    fn default() -> Self {
        AglerSearchOptions {
            budget: 10_000,
            seed: 0,
            dims: vec![4, 6, 8],
            certify: false,
            allow_boundary: false,
            stop_at: None,
            sup_norm: SupNormOptions {
                refine_steps: 16,
                ..SupNormOptions::default()
            },
            streams: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AglerSearchResult {
    pub ratio: f64,
    pub witness: OperatorTuple,
    /// `||f(witness)||`.
    pub witness_norm: f64,
    /// Value used as `||f||_inf` in the denominator.
    pub denominator: f64,
    pub sup_lower: f64,
    pub evaluations: usize,
    /// True when the whole budget was spent without reaching `stop_at`.
    pub budget_exhausted: bool,
}

/// Grid size that keeps `grid^dim` within the sup-norm point cap.
pub fn grid_for_dim(dim: usize, cap: u128) -> usize {
    let mut g = 8usize;
    while (g as u128 + 1).checked_pow(dim as u32).is_some_and(|p| p <= cap) && g < 256 {
        g += 1;
    }
    g
}

/// Random search for a large `||f(T)|| / ||f||_inf`.
pub fn agler_ratio_search(f: &SparsePoly, opts: &AglerSearchOptions) -> Result<AglerSearchResult> {
    let d = f.dim();
    if d == 0 || d > 8 {
        return Err(LabError::domain(format!("agler search supports 1..=8 variables, got {d}")));
    }
    if opts.dims.is_empty() || opts.dims.contains(&0) {
        return Err(LabError::domain("dims must be a nonempty list of positive sizes"));
    }
    if opts.budget == 0 {
        return Err(LabError::domain("budget must be positive"));
    }
    let mut sup_opts = opts.sup_norm.clone();
    sup_opts.grid_per_dim = sup_opts
        .grid_per_dim
        .min(grid_for_dim(d, sup_opts.max_points))
        .max(8);
    let sup = crate::poly::sup_norm_torus_with(f, &sup_opts)?;
    let denominator = if opts.certify { sup.l1_upper } else { sup.lower };
    if !(denominator > 0.0) {
        return Err(LabError::Degenerate("zero polynomial".into()));
    }
    let radius = if opts.allow_boundary { 1.0 } else { STRICT_RADIUS };
    let streams = opts.streams.max(1).min(opts.budget);

    let per_stream: Vec<_> = (0..streams)
        .into_par_iter()
        .map(|s| -> Result<(f64, usize, Option<(OperatorTuple, f64)>, bool)> {
            let quota = opts.budget / streams + usize::from(s < opts.budget % streams);
            let mut rng = stream(opts.seed, s as u64);
            let mut best: Option<(OperatorTuple, f64)> = None;
            let mut used = 0;
            let mut hit = false;
            for k in 0..quota {
                let n = opts.dims[k % opts.dims.len()];
                let t = random_commuting_tuple(&mut rng, d, n, radius);
                let norm = op_norm(&eval_poly(f, &t)?);
                used += 1;
                if best.as_ref().is_none_or(|(_, b)| norm > *b) {
                    best = Some((t, norm));
                }
                if let Some(stop) = opts.stop_at {
                    if norm / denominator >= stop {
                        hit = true;
                        break;
                    }
                }
            }
            let ratio = best.as_ref().map_or(0.0, |(_, b)| b / denominator);
            Ok((ratio, used, best, hit))
        })
        .collect::<Result<Vec<_>>>()?;

    let evaluations = per_stream.iter().map(|x| x.1).sum();
    let any_hit = per_stream.iter().any(|x| x.3);
    // Deterministic best-of: highest ratio, lowest stream index on ties.
    let (ratio, _, best, _) = per_stream
        .into_iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.0.total_cmp(&b.0).then(ib.cmp(ia)))
        .map(|(_, x)| x)
        .expect("at least one stream");
    let (witness, witness_norm) = best.expect("each stream evaluates at least once");
    Ok(AglerSearchResult {
        ratio,
        witness,
        witness_norm,
        denominator,
        sup_lower: sup.lower,
        evaluations,
        budget_exhausted: !any_hit,
    })
}

// ---------------------------------------------------------------------------
// JSON interchange

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleJson {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    /// One entry per member, each a row-major list of `[re, im]` pairs.
    mats: Vec<Vec<[f64; 2]>>,
}

impl OperatorTuple {
    /// `{"d": d, "N": N, "mats": [[[re, im], ...], ...]}`, each matrix
    /// flattened in row-major order.
    pub fn to_json(&self) -> String {
        let n = self.n();
        let doc = TupleJson {
            d: self.d(),
            n,
            mats: self
                .mats
                .iter()
                .map(|m| {
                    (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<OperatorTuple> {
        let doc: TupleJson = serde_json::from_str(text)?;
        if doc.mats.len() != doc.d {
            return Err(LabError::Parse(format!(
                "expected {} matrices, found {}",
                doc.d,
                doc.mats.len()
            )));
        }
        let n = doc.n;
        let mats = doc
            .mats
            .iter()
            .map(|entries| {
                if entries.len() != n * n {
                    return Err(LabError::Parse(format!(
                        "matrix has {} entries, expected {}",
                        entries.len(),
                        n * n
                    )));
                }
                Ok(CMatrix::from_fn(n, n, |i, j| {
                    let [re, im] = entries[i * n + j];
                    Complex64::new(re, im)
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorTuple::new(mats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn jordan() -> CMatrix {
        let mut j = CMatrix::zeros(2, 2);
        j[(0, 1)] = c(1.0, 0.0);
        j
    }

    #[test]
    fn rejects_non_commuting_and_non_contractive() {
        let a = jordan();
        let b = a.adjoint();
        assert!(matches!(
            OperatorTuple::new(vec![a.clone(), b]),
            Err(LabError::Commutation { i: 0, j: 1, .. })
        ));
        let big = CMatrix::identity(2, 2) * c(1.5, 0.0);
        assert!(matches!(
            OperatorTuple::new(vec![a, big]),
            Err(LabError::NotContraction { index: 1, .. })
        ));
    }

    #[test]
    fn eval_simple_polynomials() {
        let mut rng = stream(5, 0);
        let t = diagonal_family(&mut rng, 2, 3, 0.9);
        let z1 = SparsePoly::variable(2, 0);
        let out = eval_poly(&z1, &t).unwrap();
        assert!(crate::linalg::max_abs(&(out - t.get(0))) < 1e-15);

        let d1 = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.0, 0.3)]));
        let d2 = CMatrix::from_diagonal(&DVector::from_vec(vec![c(-0.2, 0.0), c(0.7, 0.0)]));
        let t = OperatorTuple::new(vec![d1, d2]).unwrap();
        let f = SparsePoly::monomial(MultiIndex(vec![1, 1]), c(1.0, 0.0));
        let out = eval_poly(&f, &t).unwrap();
        assert!((out[(0, 0)] - c(-0.1, 0.0)).norm() < 1e-15);
        assert!((out[(1, 1)] - c(0.0, 0.21)).norm() < 1e-15);
        assert!(eval_poly(&SparsePoly::variable(3, 0), &t).is_err());
    }

    #[test]
    fn defect_edge_cases() {
        let t = OperatorTuple::zero(3, 4);
        let delta = defect(&t, &MultiIndex(vec![1, 1, 1])).unwrap();
        assert!(crate::linalg::max_abs(&(delta - CMatrix::identity(4, 4))) < 1e-15);

        let mut rng = stream(9, 0);
        let t = random_commuting_tuple(&mut rng, 1, 5, 1.0);
        let delta = defect(&t, &MultiIndex(vec![1])).unwrap();
        assert!(hermitian_min_eigenvalue(&delta) >= -1e-12);

        assert!(defect(&t, &MultiIndex(vec![2])).is_err());
        assert!(defect_full(&OperatorTuple::zero(2, 1), &MultiIndex(vec![300, 300])).is_err());
    }

    #[test]
    fn defect_two_variable_full_lattice_matches_scalar_formula() {
        let (t1, t2) = (c(0.6, 0.2), c(-0.3, 0.5));
        let t = OperatorTuple::new(vec![
            CMatrix::from_element(1, 1, t1),
            CMatrix::from_element(1, 1, t2),
        ])
        .unwrap();
        let delta = defect_full(&t, &MultiIndex(vec![1, 2])).unwrap();
        let (a, b) = (t1.norm_sqr(), t2.norm_sqr());
        let oracle = (1.0 - a) * (1.0 - b + b * b);
        assert!((delta[(0, 0)].re - oracle).abs() < 1e-14);
    }

    #[test]
    fn all_zero_tuple_satisfies_lemma() {
        let t = OperatorTuple::zero(4, 3);
        let chk = check_positivity_lemma(&t, &[0, 1, 2, 3], 1e-8).unwrap();
        assert!(chk.holds_hypothesis && chk.holds_conclusion);
        assert!((chk.min_eig - 1.0).abs() < 1e-15);
    }

    #[test]
    fn printed_hypothesis_reading_admits_counterexample() {
        // T1 = T2 = J (2x2 Jordan block): the complement sum over S = {1,2}
        // is empty, yet Delta^{(1,1)} = I - 2 J J^* has eigenvalue -1.
        let t = OperatorTuple::new(vec![jordan(), jordan()]).unwrap();
        let printed = check_positivity_lemma_with(&t, &[0, 1], HypothesisReading::Complement, 1e-8).unwrap();
        assert!(printed.holds_hypothesis);
        assert!(!printed.holds_conclusion);
        assert!((printed.min_eig + 1.0).abs() < 1e-12);
        let in_s = check_positivity_lemma(&t, &[0, 1], 1e-8).unwrap();
        assert!(!in_s.holds_hypothesis);
    }

    #[test]
    fn weighted_shifts_commute_and_contract() {
        let mut rng = stream(11, 0);
        for d in 1..=4 {
            for g in 1..=3 {
                let t = weighted_shift_family(&mut rng, d, g, 1.0);
                let checked = OperatorTuple::new(t.mats().to_vec());
                assert!(checked.is_ok(), "d={d} g={g}: {checked:?}");
            }
        }
    }

    #[test]
    fn shift_degree_selection() {
        assert_eq!(shift_degree_for(1, 8), Some(7));
        assert_eq!(shift_degree_for(2, 8), Some(2));
        assert_eq!(shift_degree_for(5, 8), Some(1));
        assert_eq!(shift_degree_for(8, 8), None);
    }

    #[test]
    fn tuple_json_round_trip() {
        let mut rng = stream(2, 0);
        let t = random_commuting_tuple(&mut rng, 3, 6, STRICT_RADIUS);
        let back = OperatorTuple::from_json(&t.to_json()).unwrap();
        assert_eq!(back.d(), t.d());
        for (a, b) in back.mats().iter().zip(t.mats()) {
            assert_eq!(a, b);
        }
    }
}
