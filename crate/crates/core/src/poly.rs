//! Sparse multivariate polynomials with complex coefficients.
//!
//! A [`SparsePoly`] in `dim` variables stores its nonzero coefficients in a
//! `BTreeMap` keyed by [`MultiIndex`], so iteration order (and therefore all
//! serialized output) is deterministic.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::series::{solve_root, SeriesValue};

/// Exponent vector `alpha` of a monomial `z^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The unit vector `e_i` (0-based `i`).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise order `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn plus_unit(&self, i: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[i] += 1;
        MultiIndex(v)
    }

    /// `self - e_i`, if that is still a multi-index.
    pub fn minus_unit(&self, i: usize) -> Option<MultiIndex> {
        if self.0[i] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some(MultiIndex(v))
    }

    /// All `beta` with `0 <= beta <= self`, in lexicographic order.
    pub fn lattice_below(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.dim())];
        for (i, &a) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for b in &out {
                for e in 0..=a {
                    let mut v = b.0.clone();
                    v[i] = e;
                    next.push(MultiIndex(v));
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices of total degree `k` in `dim` variables, in
    /// lexicographic order.
    pub fn all_of_degree(dim: usize, k: u32) -> Vec<MultiIndex> {
        fn rec(prefix: &mut Vec<u32>, dim: usize, left: u32, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                rec(prefix, dim, left - e, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            if k == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(&mut Vec::with_capacity(dim), dim, k, &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Finitely supported power series `sum_alpha f_alpha z^alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl SparsePoly {
    pub fn zero(dim: usize) -> Self {
        SparsePoly {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = SparsePoly::zero(dim);
        p.insert(MultiIndex::zero(dim), c);
        p
    }

    /// The coordinate function `z_i` (0-based).
    pub fn variable(dim: usize, i: usize) -> Self {
        SparsePoly::monomial(MultiIndex::unit(dim, i), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let mut p = SparsePoly::zero(alpha.dim());
        p.insert(alpha, c);
        p
    }

    /// Builds a polynomial from `(alpha, coefficient)` pairs. Repeated
    /// multi-indices and wrong-length exponent vectors are rejected; exact
    /// zeros are dropped.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut p = SparsePoly::zero(dim);
        let mut seen = std::collections::BTreeSet::new();
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(LabError::Dimension(format!(
                    "exponent {alpha} has length {}, expected {dim}",
                    alpha.dim()
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(LabError::Parse(format!("coefficient of {alpha} is not finite")));
            }
            if !seen.insert(alpha.clone()) {
                return Err(LabError::Parse(format!("duplicate exponent {alpha}")));
            }
            p.insert(alpha, c);
        }
        Ok(p)
    }

    fn insert(&mut self, alpha: MultiIndex, c: Complex64) {
        if c != Complex64::new(0.0, 0.0) {
            self.coeffs.insert(alpha, c);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs.get(alpha).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiIndex::degree).max()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|a| a.degree() == 0)
    }

    /// Coefficient-wise l1 norm `sum |f_alpha|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `f_r(z) = f(r z)`.
    pub fn dilate(&self, r: f64) -> SparsePoly {
        let mut out = SparsePoly::zero(self.dim);
        for (alpha, c) in &self.coeffs {
            out.insert(alpha.clone(), c * r.powi(alpha.degree() as i32));
        }
        out
    }

    pub fn homogeneous_part(&self, k: u32) -> SparsePoly {
        SparsePoly {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.degree() == k)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SparsePoly {
        let mut out = SparsePoly::zero(self.dim);
        for (alpha, c) in &self.coeffs {
            out.insert(alpha.clone(), c * s);
        }
        out
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.dim, "point has wrong dimension");
        self.coeffs
            .iter()
            .map(|(alpha, c)| {
                alpha
                    .0
                    .iter()
                    .zip(z)
                    .fold(*c, |acc, (&e, zi)| acc * zi.powu(e))
            })
            .sum()
    }

    /// `r -> ||f_r||_1` as a polynomial in `r`: entry `k` is the l1 norm of
    /// the degree-`k` part.
    pub fn l1_profile(&self) -> Vec<f64> {
        let deg = self.degree().unwrap_or(0) as usize;
        let mut prof = vec![0.0; deg + 1];
        for (alpha, c) in &self.coeffs {
            prof[alpha.degree() as usize] += c.norm();
        }
        prof
    }

    /// Estimates the sup norm over the polydisk (attained on the torus).
    pub fn sup_norm_torus(&self, grid_per_dim: usize, refine_steps: usize) -> Result<SupNormEstimate> {
        sup_norm_torus_with(
            self,
            &SupNormOptions {
                grid_per_dim,
                refine_steps,
                ..SupNormOptions::default()
            },
        )
    }

    /// Radius `r` at which `||f_r||_1 = 1`; see [`bohr_radius_estimate`].
    pub fn bohr_radius(&self, tol: f64) -> Result<BohrRadius> {
        bohr_radius_estimate(self, tol)
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;

    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.dim, rhs.dim, "adding polynomials of different dimension");
        let mut out = self.clone();
        for (alpha, c) in &rhs.coeffs {
            let sum = out.coeff(alpha) + c;
            out.coeffs.remove(alpha);
            out.insert(alpha.clone(), sum);
        }
        out
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;

    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.dim, rhs.dim, "multiplying polynomials of different dimension");
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &rhs.coeffs {
                let key = MultiIndex(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect());
                *acc.entry(key).or_default() += ca * cb;
            }
        }
        let mut out = SparsePoly::zero(self.dim);
        for (k, v) in acc {
            out.insert(k, v);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Torus sup norm

#[derive(Debug, Clone)]
pub struct SupNormOptions {
    pub grid_per_dim: usize,
    /// Full round-robin sweeps of golden-section refinement.
    pub refine_steps: usize,
    /// Cap on `grid_per_dim^dim`.
    pub max_points: u128,
    /// Number of best grid points used as refinement starts.
    pub starts: usize,
}

impl Default for SupNormOptions {
    fn default() -> Self {
        SupNormOptions {
            grid_per_dim: 32,
            refine_steps: 8,
            max_points: 1 << 24,
            starts: 4,
        }
    }
}

/// Result of [`sup_norm_torus_with`]. `lower` is attained by `|f|` at the
/// reported phases, so it never exceeds the true sup norm; `l1_upper` is
/// the triangle-inequality bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormEstimate {
    pub lower: f64,
    pub l1_upper: f64,
    pub phases: Vec<f64>,
    pub grid_points: u64,
}

fn eval_phases(f: &SparsePoly, theta: &[f64]) -> f64 {
    let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    f.eval(&z).norm()
}

/// Grid-plus-golden-section lower estimate of `sup_{T^d} |f|`.
pub fn sup_norm_torus_with(f: &SparsePoly, opts: &SupNormOptions) -> Result<SupNormEstimate> {
    let d = f.dim();
    let g = opts.grid_per_dim;
    if g < 8 {
        return Err(LabError::domain(format!("grid_per_dim must be >= 8, got {g}")));
    }
    let l1 = f.l1_norm();
    if d == 0 || f.is_constant() {
        let v = f.coeff(&MultiIndex::zero(d)).norm();
        return Ok(SupNormEstimate {
            lower: v,
            l1_upper: l1,
            phases: vec![0.0; d],
            grid_points: 1,
        });
    }
    let needed = (g as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if needed > opts.max_points {
        return Err(LabError::Budget {
            what: "torus grid points",
            needed,
            cap: opts.max_points,
        });
    }
    let total = needed as u64;
    let roots: Vec<Complex64> = (0..g)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / g as f64))
        .collect();
    let terms: Vec<(Vec<u64>, Complex64)> = f
        .terms()
        .map(|(a, c)| (a.0.iter().map(|&e| e as u64 % g as u64).collect(), *c))
        .collect();
    let keep = opts.starts.max(1);

    // Each chunk keeps its best `keep` points; merging is order-independent
    // because ties are broken by the linear grid index.
    let chunk = 4096u64;
    let n_chunks = total.div_ceil(chunk);
    let best = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut local: Vec<(f64, u64)> = Vec::with_capacity(keep + 1);
            let mut idx = vec![0u64; d];
            for lin in ci * chunk..((ci + 1) * chunk).min(total) {
                let mut rest = lin;
                for slot in idx.iter_mut() {
                    *slot = rest % g as u64;
                    rest /= g as u64;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for (exps, c) in &terms {
                    let phase: u64 = exps.iter().zip(&idx).map(|(e, j)| e * j).sum::<u64>() % g as u64;
                    acc += c * roots[phase as usize];
                }
                push_top(&mut local, (acc.norm(), lin), keep);
            }
            local
        })
        .reduce(Vec::new, |mut a, b| {
            for item in b {
                push_top(&mut a, item, keep);
            }
            a
        });

    let decode = |lin: u64| -> Vec<f64> {
        let mut rest = lin;
        (0..d)
            .map(|_| {
                let j = rest % g as u64;
                rest /= g as u64;
                TAU * j as f64 / g as f64
            })
            .collect()
    };

    let h0 = TAU / g as f64;
    let mut overall = (f64::NEG_INFINITY, Vec::new());
    for &(value, lin) in &best {
        let mut theta = decode(lin);
        let mut current = value;
        for _ in 0..opts.refine_steps {
            for i in 0..d {
                let (t, v) = golden_max(
                    |t| {
                        let mut th = theta.clone();
                        th[i] = t;
                        eval_phases(f, &th)
                    },
                    theta[i] - h0,
                    theta[i] + h0,
                    60,
                );
                if v > current {
                    current = v;
                    theta[i] = t;
                }
            }
        }
        // Recompute at the final phases so the reported value is attained.
        let attained = eval_phases(f, &theta).max(value);
        if attained > overall.0 {
            overall = (attained, theta);
        }
    }
    Ok(SupNormEstimate {
        lower: overall.0,
        l1_upper: l1,
        phases: overall.1.into_iter().map(|t| t.rem_euclid(TAU)).collect(),
        grid_points: total,
    })
}

fn push_top(list: &mut Vec<(f64, u64)>, item: (f64, u64), keep: usize) {
    list.push(item);
    list.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    list.truncate(keep);
}

/// Golden-section search for a maximum of `phi` on `[a, b]`.
fn golden_max(phi: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = phi(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = phi(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// ---------------------------------------------------------------------------
// Bohr radius of a single function

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BohrRadius {
    pub radius: f64,
    /// True when `||f||_1 <= 1`, so the radius is reported as 1.
    pub capped: bool,
}

/// The `r` in `(0, 1]` with `||f_r||_1 = 1`, or 1 (capped) when `||f||_1 <= 1`.
///
/// `r -> ||f_r||_1` is strictly increasing for nonconstant `f`, which makes
/// the root unique.
pub fn bohr_radius_estimate(f: &SparsePoly, tol: f64) -> Result<BohrRadius> {
    if f.is_constant() {
        return Err(LabError::Degenerate(format!(
            "constant function (|f_0| = {}) has no Bohr radius root",
            f.l1_norm()
        )));
    }
    let prof = f.l1_profile();
    if prof[0] >= 1.0 {
        return Err(LabError::domain(format!(
            "|f_0| = {} >= 1 for a nonconstant function; not a Schur function",
            prof[0]
        )));
    }
    if f.l1_norm() <= 1.0 {
        return Ok(BohrRadius {
            radius: 1.0,
            capped: true,
        });
    }
    let horner = |r: f64| prof.iter().rev().fold(0.0, |acc, c| acc * r + c);
    let radius = solve_root(
        |r, _| {
            Ok(SeriesValue {
                value: horner(r),
                tail_bound: 0.0,
                terms_used: prof.len(),
            })
        },
        1.0,
        (0.0, 1.0),
        tol,
    )?;
    Ok(BohrRadius {
        radius,
        capped: false,
    })
}

/// Degree-`degree` Taylor truncation of the disk automorphism
/// `(a - z) / (1 - a z)` in one variable:
/// `a - (1 - a^2) sum_{k>=1} a^{k-1} z^k`.
pub fn mobius_truncated(a: f64, degree: u32) -> SparsePoly {
    let mut terms = vec![(MultiIndex(vec![0]), Complex64::new(a, 0.0))];
    let mut ak = 1.0;
    for k in 1..=degree {
        terms.push((MultiIndex(vec![k]), Complex64::new(-(1.0 - a * a) * ak, 0.0)));
        ak *= a;
    }
    SparsePoly::from_terms(1, terms).expect("distinct exponents")
}

/// Smallest degree whose dropped coefficient tail `(1+a) a^N` is below `tail`.
pub fn mobius_degree_for_tail(a: f64, tail: f64) -> u32 {
    let mut n = 0u32;
    let mut t = 1.0 + a;
    while t >= tail && n < 1_000_000 {
        t *= a;
        n += 1;
    }
    n
}

/// Random polynomial with `n_terms` monomials of degree `<= max_degree`
/// and complex Gaussian coefficients.
pub fn random_poly<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_degree: u32, n_terms: usize) -> SparsePoly {
    let mut coeffs = BTreeMap::new();
    for _ in 0..n_terms {
        let deg = rng.random_range(0..=max_degree);
        let mut alpha = vec![0u32; dim];
        for _ in 0..deg {
            alpha[rng.random_range(0..dim)] += 1;
        }
        let c = crate::rng::complex_gaussian(rng);
        coeffs.insert(MultiIndex(alpha), c);
    }
    SparsePoly::from_terms(dim, coeffs).expect("keys are unique")
}

// ---------------------------------------------------------------------------
// JSON interchange

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyTermJson {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    dim: usize,
    terms: Vec<PolyTermJson>,
}

impl SparsePoly {
    /// `{"dim": d, "terms": [{"alpha": [...], "re": x, "im": y}, ...]}`.
    pub fn to_json(&self) -> String {
        let doc = PolyJson {
            dim: self.dim,
            terms: self
                .coeffs
                .iter()
                .map(|(a, c)| PolyTermJson {
                    alpha: a.0.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<SparsePoly> {
        let doc: PolyJson = serde_json::from_str(text)?;
        if doc.dim == 0 {
            return Err(LabError::Parse("dim must be >= 1".into()));
        }
        SparsePoly::from_terms(
            doc.dim,
            doc.terms
                .into_iter()
                .map(|t| (MultiIndex(t.alpha), Complex64::new(t.re, t.im))),
        )
    }
}
