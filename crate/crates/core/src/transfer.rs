//! Isometric transfer-function realizations
//! `f(z) = A + B P(z) (I - D P(z))^{-1} C`, `P(z) = sum_j z_j P_j`,
//! their Taylor coefficients, and the coefficient-sum estimate
//! `S_k <= (1 - |f_0|^2) C(d+k-2, k-1)^{1/2}`.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binom::binomial;
use crate::error::{LabError, Result};
use crate::linalg::{random_unitary, CMatrix};
use crate::poly::{MultiIndex, SparsePoly};
use crate::radii::ka_lower_root;
use crate::rng::{disk_point, stream};
use crate::series::binom_sqrt_series_wide;

pub type CVector = DVector<Complex64>;

pub const DEGREE_CAP: u32 = 8;
pub const DIM_CAP: usize = 6;
pub const STATE_CAP: usize = 48;
/// Largest tensor grid used by [`quadrature_check`] and [`taylor_probe`].
pub const GRID_CAP: u128 = 4_000_000;

const ISOMETRY_TOL: f64 = 1e-10;

/// `V = [[A, B], [C, D]]` on `C (+) H`, `H = H_1 (+) ... (+) H_d`, with
/// `H_j` spanned by a consecutive range of basis vectors.
#[derive(Debug, Clone)]
pub struct Colligation {
    a: Complex64,
    b: CVector,
    c: CVector,
    dmat: CMatrix,
    blocks: Vec<Range<usize>>,
    /// Block index of each state coordinate.
    owner: Vec<usize>,
}

fn blocks_from_dims(dims: &[usize]) -> (Vec<Range<usize>>, Vec<usize>) {
    let mut start = 0;
    let mut blocks = Vec::with_capacity(dims.len());
    let mut owner = Vec::new();
    for (j, &n) in dims.iter().enumerate() {
        blocks.push(start..start + n);
        owner.extend(std::iter::repeat_n(j, n));
        start += n;
    }
    (blocks, owner)
}

impl Colligation {
    /// Validates shapes, the isometry `V^* V = I` (to 1e-10 per entry) and
    /// `|B| |C| <= 1 - |A|^2`.
    pub fn new(a: Complex64, b: CVector, c: CVector, dmat: CMatrix, block_dims: &[usize]) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(LabError::Colligation("need d >= 1 blocks".into()));
        }
        let n: usize = block_dims.iter().sum();
        if n == 0 {
            return Err(LabError::Colligation("state space must have dimension >= 1".into()));
        }
        if b.len() != n || c.len() != n || dmat.nrows() != n || dmat.ncols() != n {
            return Err(LabError::Colligation(format!(
                "shapes disagree with state dimension {n}: |B| {}, |C| {}, D {}x{}",
                b.len(),
                c.len(),
                dmat.nrows(),
                dmat.ncols()
            )));
        }
        let (blocks, owner) = blocks_from_dims(block_dims);
        let col = Colligation {
            a,
            b,
            c,
            dmat,
            blocks,
            owner,
        };
        let defect = crate::linalg::isometry_defect(&col.v_matrix());
        if defect > ISOMETRY_TOL {
            return Err(LabError::Colligation(format!("V^* V deviates from I by {defect:e}")));
        }
        let lhs = col.b.norm() * col.c.norm();
        let rhs = 1.0 - col.a.norm_sqr();
        if lhs > rhs + ISOMETRY_TOL {
            return Err(LabError::Colligation(format!("|B||C| = {lhs} exceeds 1 - |A|^2 = {rhs}")));
        }
        Ok(col)
    }

    /// The realization of `f = 1`: `A = 1`, `B = C = 0`, `D = I`.
    pub fn constant_one(block_dims: &[usize]) -> Result<Self> {
        let n: usize = block_dims.iter().sum();
        Colligation::new(
            Complex64::new(1.0, 0.0),
            CVector::zeros(n),
            CVector::zeros(n),
            CMatrix::identity(n, n),
            block_dims,
        )
    }

    /// Splits a unitary `(1+n) x (1+n)` matrix into `A, B, C, D`.
    pub fn from_unitary(v: &CMatrix, block_dims: &[usize]) -> Result<Self> {
        let n = v.nrows().saturating_sub(1);
        if v.ncols() != n + 1 {
            return Err(LabError::Colligation("V must be square".into()));
        }
        Colligation::new(
            v[(0, 0)],
            CVector::from_fn(n, |i, _| v[(0, i + 1)]),
            CVector::from_fn(n, |i, _| v[(i + 1, 0)]),
            v.view((1, 1), (n, n)).into_owned(),
            block_dims,
        )
    }

    pub fn d(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn c(&self) -> &CVector {
        &self.c
    }

    pub fn dmat(&self) -> &CMatrix {
        &self.dmat
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn v_matrix(&self) -> CMatrix {
        let n = self.n();
        let mut v = CMatrix::zeros(n + 1, n + 1);
        v[(0, 0)] = self.a;
        for i in 0..n {
            v[(0, i + 1)] = self.b[i];
            v[(i + 1, 0)] = self.c[i];
        }
        v.view_mut((1, 1), (n, n)).copy_from(&self.dmat);
        v
    }

    /// `P_j x` (0-based `j`).
    pub fn project(&self, j: usize, x: &CVector) -> CVector {
        let r = &self.blocks[j];
        CVector::from_fn(x.len(), |i, _| if r.contains(&i) { x[i] } else { Complex64::ZERO })
    }

    /// `sum_j mu_j P_j` as a diagonal matrix.
    pub fn phase_operator(&self, mu: &[Complex64]) -> CMatrix {
        assert_eq!(mu.len(), self.d());
        let diag = CVector::from_fn(self.n(), |i, _| mu[self.owner[i]]);
        CMatrix::from_diagonal(&diag)
    }

    /// `P(z) x`.
    fn apply_p(&self, z: &[Complex64], x: &CVector) -> CVector {
        CVector::from_fn(x.len(), |i, _| z[self.owner[i]] * x[i])
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.d() {
            return Err(LabError::Dimension(format!("point has {} coordinates, expected {}", z.len(), self.d())));
        }
        Ok(())
    }

    /// `f(z)` via one linear solve. Near-singular systems (possible only on
    /// the boundary) are retried at `(1 - 1e-9) z` and flagged.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Evaluation> {
        self.check_point(z)?;
        if let Some(value) = self.try_evaluate(z) {
            return Ok(Evaluation {
                value,
                regularized: false,
            });
        }
        let shrunk: Vec<Complex64> = z.iter().map(|w| w * (1.0 - 1e-9)).collect();
        match self.try_evaluate(&shrunk) {
            Some(value) => Ok(Evaluation {
                value,
                regularized: true,
            }),
            None => Err(LabError::Degenerate("I - D P(z) is singular".into())),
        }
    }

    fn try_evaluate(&self, z: &[Complex64]) -> Option<Complex64> {
        let n = self.n();
        // (I - D P(z)) x = C
        let mut m = -self.dmat.clone();
        for (jcol, zj) in self.owner.iter().map(|&o| z[o]).enumerate() {
            for i in 0..n {
                m[(i, jcol)] *= zj;
            }
            m[(jcol, jcol)] += Complex64::ONE;
        }
        let x = m.clone().lu().solve(&self.c)?;
        let resid = (&m * &x - &self.c).norm();
        if !x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) || resid > 1e-8 * (1.0 + x.norm()) {
            return None;
        }
        Some(self.a + self.b.dot(&self.apply_p(z, &x)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub regularized: bool,
}

/// Random colligation: `V` is a seeded Haar-like unitary of size `1 + n`.
pub fn random_colligation(seed: u64, block_dims: &[usize]) -> Result<Colligation> {
    let n: usize = block_dims.iter().sum();
    if block_dims.is_empty() || n == 0 {
        return Err(LabError::domain("need at least one block and n >= 1"));
    }
    if n > STATE_CAP {
        return Err(LabError::Budget {
            what: "state dimension n",
            needed: n as u128,
            cap: STATE_CAP as u128,
        });
    }
    let mut rng = stream(seed, 0);
    let v = random_unitary(&mut rng, n + 1);
    Colligation::from_unitary(&v, block_dims)
}

// ---------------------------------------------------------------------------
// Words

/// A word `w(1) ... w(k)` over the letters `1..=d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>, d: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > d) {
            return Err(LabError::domain(format!("letter {bad} outside 1..={d}")));
        }
        Ok(Word(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letter counts: `alpha_j = #{i : w(i) = j}`.
    pub fn alpha(&self, d: usize) -> MultiIndex {
        let mut v = vec![0u32; d];
        for &l in &self.0 {
            v[l as usize - 1] += 1;
        }
        MultiIndex(v)
    }

    /// All `d^k` words of length `k`, lexicographic.
    pub fn all(k: usize, d: usize) -> impl Iterator<Item = Word> {
        let total = (d as u64).pow(k as u32);
        (0..total).map(move |mut code| {
            let mut letters = vec![0u32; k];
            for slot in letters.iter_mut().rev() {
                *slot = (code % d as u64) as u32 + 1;
                code /= d as u64;
            }
            Word(letters)
        })
    }
}

impl FromStr for Word {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| {
                ch.to_digit(10)
                    .filter(|&v| v > 0)
                    .ok_or_else(|| LabError::Parse(format!("bad letter {ch:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Coefficients

fn check_caps(col: &Colligation, k: u32) -> Result<()> {
    if k > DEGREE_CAP {
        return Err(LabError::Budget {
            what: "coefficient degree",
            needed: k as u128,
            cap: DEGREE_CAP as u128,
        });
    }
    if col.d() > DIM_CAP {
        return Err(LabError::Budget {
            what: "number of variables d",
            needed: col.d() as u128,
            cap: DIM_CAP as u128,
        });
    }
    if col.n() > STATE_CAP {
        return Err(LabError::Budget {
            what: "state dimension n",
            needed: col.n() as u128,
            cap: STATE_CAP as u128,
        });
    }
    Ok(())
}

/// One stage of `u_beta = sum_j P_j D u_{beta - e_j}`: the `j`-th block of
/// `u_beta` is the `j`-th block of `D u_{beta - e_j}`, so each block has a
/// single predecessor.
fn next_stage(col: &Colligation, prev: &HashMap<MultiIndex, CVector>, betas: &[MultiIndex]) -> HashMap<MultiIndex, CVector> {
    let pushed: HashMap<&MultiIndex, CVector> = prev.iter().map(|(g, u)| (g, &col.dmat * u)).collect();
    betas
        .iter()
        .map(|beta| {
            let mut u = CVector::zeros(col.n());
            for (j, r) in col.blocks.iter().enumerate() {
                if let Some(src) = beta.minus_unit(j).and_then(|g| pushed.get(&g)) {
                    u.rows_mut(r.start, r.len()).copy_from(&src.rows(r.start, r.len()));
                }
            }
            (beta.clone(), u)
        })
        .collect()
}

fn first_stage(col: &Colligation) -> HashMap<MultiIndex, CVector> {
    (0..col.d())
        .map(|j| (MultiIndex::unit(col.d(), j), col.project(j, &col.c)))
        .collect()
}

/// Taylor coefficient `f_alpha`, from the stage vectors restricted to the
/// lattice below `alpha`.
pub fn coefficient(col: &Colligation, alpha: &MultiIndex) -> Result<Complex64> {
    if alpha.dim() != col.d() {
        return Err(LabError::Dimension(format!("multi-index {alpha} for d = {}", col.d())));
    }
    let k = alpha.degree();
    check_caps(col, k)?;
    if k == 0 {
        return Ok(col.a);
    }
    let mut by_degree: Vec<Vec<MultiIndex>> = vec![Vec::new(); k as usize + 1];
    for beta in alpha.lattice_below() {
        by_degree[beta.degree() as usize].push(beta);
    }
    let mut stage: HashMap<MultiIndex, CVector> = first_stage(col)
        .into_iter()
        .filter(|(b, _)| b.le(alpha))
        .collect();
    for betas in by_degree.iter().skip(2) {
        stage = next_stage(col, &stage, betas);
    }
    Ok(col.b.dot(&stage[alpha]))
}

/// All coefficients of total degree `<= kmax`, grouped by degree. Within
/// a degree the multi-indices come in [`MultiIndex::all_of_degree`] order.
pub fn coefficients_up_to(col: &Colligation, kmax: u32) -> Result<Vec<Vec<(MultiIndex, Complex64)>>> {
    check_caps(col, kmax)?;
    let d = col.d();
    let mut levels = vec![vec![(MultiIndex::zero(d), col.a)]];
    if kmax == 0 {
        return Ok(levels);
    }
    let mut stage = first_stage(col);
    for k in 1..=kmax {
        let betas = MultiIndex::all_of_degree(d, k);
        if k > 1 {
            stage = next_stage(col, &stage, &betas);
        }
        levels.push(betas.iter().map(|b| (b.clone(), col.b.dot(&stage[b]))).collect());
    }
    Ok(levels)
}

/// Taylor polynomial of degree `kmax`.
pub fn taylor_poly(col: &Colligation, kmax: u32) -> Result<SparsePoly> {
    let levels = coefficients_up_to(col, kmax)?;
    SparsePoly::from_terms(col.d(), levels.into_iter().flatten())
}

/// `S_k = sum_{|alpha| = k} |f_alpha|`.
pub fn sk_sum(col: &Colligation, k: u32) -> Result<f64> {
    let levels = coefficients_up_to(col, k)?;
    Ok(levels[k as usize].iter().map(|(_, c)| c.norm()).sum())
}

/// `(1 - |f_0|^2) C(d+k-2, k-1)^{1/2}` for `k >= 1`.
pub fn sk_bound(col: &Colligation, k: u32) -> f64 {
    assert!(k >= 1);
    let c = binomial((col.d() + k as usize - 2) as u64, (k - 1) as u64);
    let c = num_traits::ToPrimitive::to_f64(&c).unwrap_or(f64::INFINITY);
    (1.0 - col.a.norm_sqr()) * c.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub k: u32,
    pub s_k: f64,
    pub bound: f64,
    /// `bound - s_k`.
    pub margin: f64,
}

/// `sum_k S_k r^k <= |f_0| + (1 - |f_0|^2) sum_k r^k C(d+k-2, k-1)^{1/2}`
/// at the root radius, with the left side truncated at `kmax`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Chain {
    pub r: f64,
    /// `sum_{k <= kmax} S_k r^k`.
    pub truncated: f64,
    /// Bound on the omitted `sum_{k > kmax} S_k r^k`, from the lemma and
    /// the series tail.
    pub tail_bound: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub d: usize,
    pub f0_modulus: f64,
    pub rows: Vec<LemmaRow>,
    pub chain: L1Chain,
}

impl LemmaReport {
    pub fn violations(&self, tol: f64) -> Vec<&LemmaRow> {
        self.rows.iter().filter(|r| r.margin < -tol).collect()
    }
}

pub fn verify_lemma(col: &Colligation, kmax: u32, tol: f64) -> Result<LemmaReport> {
    if kmax == 0 {
        return Err(LabError::domain("kmax must be >= 1"));
    }
    let levels = coefficients_up_to(col, kmax)?;
    let d = col.d();
    let a = col.a.norm();
    let rows: Vec<LemmaRow> = (1..=kmax)
        .map(|k| {
            let s_k: f64 = levels[k as usize].iter().map(|(_, c)| c.norm()).sum();
            let bound = sk_bound(col, k);
            LemmaRow {
                k,
                s_k,
                bound,
                margin: bound - s_k,
            }
        })
        .collect();

    let r = ka_lower_root(d as u64, 1e-12)?;
    let series = binom_sqrt_series_wide(d as u64, r, 1e-14)?;
    let series_hi = series.value + series.tail_bound;
    let one_minus = 1.0 - a * a;
    let head: f64 = (1..=kmax)
        .map(|k| {
            let c = binomial((d + k as usize - 2) as u64, (k - 1) as u64);
            r.powi(k as i32) * num_traits::ToPrimitive::to_f64(&c).unwrap_or(f64::INFINITY).sqrt()
        })
        .sum();
    let truncated = a + rows.iter().map(|row| row.s_k * r.powi(row.k as i32)).sum::<f64>();
    let tail_bound = if one_minus > 0.0 {
        (one_minus * (series_hi - head)).max(0.0)
    } else {
        0.0
    };
    let rhs = a + one_minus * series_hi;
    let chain = L1Chain {
        r,
        truncated,
        tail_bound,
        rhs,
        holds: truncated <= rhs + tol,
    };
    Ok(LemmaReport {
        d,
        f0_modulus: a,
        rows,
        chain,
    })
}

// ---------------------------------------------------------------------------
// Quadrature

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCheck {
    pub k: u32,
    pub points_per_axis: usize,
    /// Grid average of `|B (P(z) D)^{k-1}|^2` over the torus.
    pub quadrature: f64,
    /// `sum_{|beta| = k-1} |y_beta|^2` from the row recursion.
    pub exact: f64,
    /// `|B|^2`.
    pub bound: f64,
}

impl QuadratureCheck {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.quadrature - self.exact).abs() <= tol * (1.0 + self.exact)
    }

    pub fn within_bound(&self, tol: f64) -> bool {
        self.quadrature <= self.bound + tol && self.exact <= self.bound + tol
    }
}

/// Integrates `|B (P(z) D)^{k-1}|^2` over `T^d` on a `(2k+1)`-point
/// roots-of-unity grid per axis. The integrand is a trigonometric
/// polynomial of degree `<= k-1` in each variable, so the rule is exact.
pub fn quadrature_check(col: &Colligation, k: u32) -> Result<QuadratureCheck> {
    if k == 0 {
        return Err(LabError::domain("k must be >= 1"));
    }
    check_caps(col, k)?;
    let d = col.d();
    let q = 2 * k as usize + 1;
    let total = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > GRID_CAP {
        return Err(LabError::Budget {
            what: "quadrature grid points",
            needed: total,
            cap: GRID_CAP,
        });
    }
    let roots: Vec<Complex64> = (0..q)
        .map(|i| Complex64::from_polar(1.0, std::f64::consts::TAU * i as f64 / q as f64))
        .collect();
    let dt = col.dmat.transpose();
    let total = total as usize;
    let chunk = 4096;
    let partial: Vec<f64> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let mut acc = 0.0;
            let mut z = vec![Complex64::ZERO; d];
            for idx in ci * chunk..((ci + 1) * chunk).min(total) {
                let mut code = idx;
                for zj in z.iter_mut() {
                    *zj = roots[code % q];
                    code /= q;
                }
                // row vector x <- x P(z) D, stored as a column: D^T P(z) x
                let mut x = col.b.clone();
                for _ in 1..k {
                    x = &dt * col.apply_p(&z, &x);
                }
                acc += x.norm_squared();
            }
            acc
        })
        .collect();
    let quadrature = partial.iter().sum::<f64>() / total as f64;

    // y_0 = B, y_beta = sum_j (y_{beta - e_j} P_j) D
    let mut rows: HashMap<MultiIndex, CVector> = HashMap::from([(MultiIndex::zero(d), col.b.clone())]);
    for level in 1..k {
        rows = MultiIndex::all_of_degree(d, level)
            .into_iter()
            .map(|beta| {
                let mut y = CVector::zeros(col.n());
                for j in 0..d {
                    if let Some(prev) = beta.minus_unit(j).and_then(|g| rows.get(&g)) {
                        y += &dt * col.project(j, prev);
                    }
                }
                (beta, y)
            })
            .collect();
    }
    let exact = rows.values().map(|y| y.norm_squared()).sum();
    Ok(QuadratureCheck {
        k,
        points_per_axis: q,
        quadrature,
        exact,
        bound: col.b.norm_squared(),
    })
}

/// `f_alpha` by the discrete Cauchy formula on the torus of radius
/// `radius` with `m` points per axis. Aliasing from degree `|alpha| + m`
/// is of relative size `radius^m`.
pub fn taylor_probe(col: &Colligation, alpha: &MultiIndex, radius: f64, m: usize) -> Result<Complex64> {
    let d = col.d();
    if alpha.dim() != d {
        return Err(LabError::Dimension(format!("multi-index {alpha} for d = {d}")));
    }
    if !(radius > 0.0 && radius < 1.0) || m == 0 {
        return Err(LabError::domain("need 0 < radius < 1 and m >= 1"));
    }
    let total = (m as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > GRID_CAP {
        return Err(LabError::Budget {
            what: "Cauchy grid points",
            needed: total,
            cap: GRID_CAP,
        });
    }
    let total = total as usize;
    let sum = (0..total)
        .into_par_iter()
        .map(|idx| -> Result<Complex64> {
            let mut code = idx;
            let mut z = vec![Complex64::ZERO; d];
            let mut phase = 0.0;
            for (j, zj) in z.iter_mut().enumerate() {
                let theta = std::f64::consts::TAU * (code % m) as f64 / m as f64;
                *zj = Complex64::from_polar(radius, theta);
                phase -= alpha.0[j] as f64 * theta;
                code /= m;
            }
            Ok(col.evaluate(&z)?.value * Complex64::from_polar(1.0, phase))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<Complex64>();
    Ok(sum / (total as f64 * radius.powi(alpha.degree() as i32)))
}

// ---------------------------------------------------------------------------
// Schur-class probe

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub samples: usize,
    pub max_modulus: f64,
    /// Point (as `[re, im]` pairs) where the maximum was seen.
    pub argmax: Vec<[f64; 2]>,
    /// Samples that needed the regularized solve.
    pub regularized: usize,
}

/// Max of `|f(z)|` over `z = 0` and `samples - 1` random points of the
/// closed polydisk (half of the coordinates drawn on the circle).
pub fn schur_membership_probe(col: &Colligation, samples: usize, seed: u64) -> Result<ProbeResult> {
    let d = col.d();
    let chunk = 1024;
    let chunks = samples.div_ceil(chunk);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|ci| -> Result<(f64, Vec<Complex64>, usize)> {
            let mut rng = stream(seed, ci as u64);
            let mut best = (-1.0, vec![Complex64::ZERO; d], 0usize);
            for s in ci * chunk..((ci + 1) * chunk).min(samples) {
                let z: Vec<Complex64> = if s == 0 {
                    vec![Complex64::ZERO; d]
                } else {
                    (0..d).map(|_| disk_point(&mut rng, 1.0)).collect()
                };
                let e = col.evaluate(&z)?;
                best.2 += usize::from(e.regularized);
                if e.value.norm() > best.0 {
                    best.0 = e.value.norm();
                    best.1 = z;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let regularized = parts.iter().map(|p| p.2).sum();
    let (max_modulus, argmax, _) = parts
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .unwrap_or((0.0, vec![], 0));
    Ok(ProbeResult {
        samples,
        max_modulus: max_modulus.max(0.0),
        argmax: argmax.iter().map(|z| [z.re, z.im]).collect(),
        regularized,
    })
}
