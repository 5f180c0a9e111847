//! Partial Steiner systems, their count bounds, and the constants that
//! feed the Dixon-type upper estimate for `SA_d`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::binom::binomial;
use crate::error::{LabError, Result};
use crate::rng::stream;

/// Largest `C(d, k)` for which [`greedy_steiner`] scans every candidate.
pub const EXHAUSTIVE_CAP: u64 = 100_000;
/// Candidate draws in random-order mode.
pub const RANDOM_ATTEMPTS: usize = 200_000;
/// Largest `C(k, t)` for which covered `t`-subsets are hashed.
pub const SUBSET_CAP: u64 = 1 << 20;

fn check_tkd(t: u64, k: u64, d: u64) -> Result<()> {
    if !(1 <= t && t <= k && k <= d) {
        return Err(LabError::domain(format!(
            "need 1 <= t <= k <= d, got t = {t}, k = {k}, d = {d}"
        )));
    }
    Ok(())
}

fn big(n: u64, k: u64) -> BigInt {
    BigInt::from(binomial(n, k))
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerBounds {
    /// `C(d, t) / C(k, t)`.
    pub upper: BigRational,
    /// `C(d, k) / (C(d, k - t) C(k, t))`.
    pub dixon_lower: BigRational,
    /// `2^{-k} (d/k)^t`, only for `d >= 2k`.
    pub crude_lower: Option<BigRational>,
}

pub fn steiner_bounds(t: u64, k: u64, d: u64) -> Result<SteinerBounds> {
    check_tkd(t, k, d)?;
    let upper = ratio(big(d, t), big(k, t));
    let dixon_lower = ratio(big(d, k), big(d, k - t) * big(k, t));
    let crude_lower = (d >= 2 * k).then(|| {
        let num = BigInt::from(d).pow(t as u32);
        let den = (BigInt::one() << k as usize) * BigInt::from(k).pow(t as u32);
        ratio(num, den)
    });
    Ok(SteinerBounds {
        upper,
        dixon_lower,
        crude_lower,
    })
}

/// Blocks are sorted k-subsets of `{1, ..., d}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialSteiner {
    pub t: u64,
    pub k: u64,
    pub d: u64,
    pub blocks: Vec<Vec<u32>>,
}

/// All `t`-subsets of a sorted block.
fn subsets_of(block: &[u32], t: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    visit_subsets(block, t, |s| {
        out.push(s.to_vec());
        true
    });
    out
}

/// Calls `f` on each `t`-subset in lex order until it returns false.
/// Returns false if stopped early.
fn visit_subsets(block: &[u32], t: usize, mut f: impl FnMut(&[u32]) -> bool) -> bool {
    let n = block.len();
    let mut idx: Vec<usize> = (0..t).collect();
    let mut buf: Vec<u32> = idx.iter().map(|&i| block[i]).collect();
    loop {
        if !f(&buf) {
            return false;
        }
        let mut i = t;
        while i > 0 && idx[i - 1] == n - t + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        idx[i - 1] += 1;
        for j in i..t {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i - 1..t {
            buf[j] = block[idx[j]];
        }
    }
}

/// Conflict tracking for a growing packing. Two blocks conflict when they
/// share `t` or more points, which is the same as sharing a `t`-subset.
/// Either every covered `t`-subset is hashed, or blocks are compared
/// pairwise, whichever is cheaper for the parameters.
enum Packing {
    Subsets { t: usize, used: HashSet<Vec<u32>> },
    Masks { t: u32, blocks: Vec<u128> },
    Sorted { t: usize, blocks: Vec<Vec<u32>> },
}

impl Packing {
    /// `per_block = C(k, t)`; `max_blocks` bounds the number of blocks.
    fn new(t: usize, d: u64, per_block: u64, max_blocks: f64) -> Self {
        if per_block <= SUBSET_CAP && (per_block as f64) < max_blocks {
            Packing::Subsets { t, used: HashSet::new() }
        } else if d <= 128 {
            Packing::Masks { t: t as u32, blocks: Vec::new() }
        } else {
            Packing::Sorted { t, blocks: Vec::new() }
        }
    }

    fn mask(block: &[u32]) -> u128 {
        block.iter().fold(0u128, |m, &x| m | 1u128 << (x - 1))
    }

    fn fits(&self, block: &[u32]) -> bool {
        match self {
            Packing::Subsets { t, used } => visit_subsets(block, *t, |s| !used.contains(s)),
            Packing::Masks { t, blocks } => {
                let m = Self::mask(block);
                blocks.iter().all(|b| (b & m).count_ones() < *t)
            }
            Packing::Sorted { t, blocks } => blocks.iter().all(|b| common_count(b, block) < *t),
        }
    }

    fn add(&mut self, block: &[u32]) {
        match self {
            Packing::Subsets { t, used } => used.extend(subsets_of(block, *t)),
            Packing::Masks { blocks, .. } => blocks.push(Self::mask(block)),
            Packing::Sorted { blocks, .. } => blocks.push(block.to_vec()),
        }
    }
}

/// Size of the intersection of two sorted slices.
fn common_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

impl PartialSteiner {
    /// Checks block sizes, ranges, distinctness and that no `t`-subset
    /// lies in two blocks.
    pub fn validate(&self) -> Result<()> {
        check_tkd(self.t, self.k, self.d)?;
        let mut seen_blocks = HashSet::new();
        for (b, block) in self.blocks.iter().enumerate() {
            if block.len() as u64 != self.k {
                return Err(LabError::domain(format!("block {b} has {} elements, expected {}", block.len(), self.k)));
            }
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LabError::domain(format!("block {b} is not strictly increasing")));
            }
            if block.iter().any(|&x| x < 1 || x as u64 > self.d) {
                return Err(LabError::domain(format!("block {b} leaves 1..={}", self.d)));
            }
            if !seen_blocks.insert(block.clone()) {
                return Err(LabError::domain(format!("block {b} is repeated")));
            }
        }
        let per_block = binomial(self.k, self.t).to_u64().unwrap_or(u64::MAX);
        let mut packing = Packing::new(self.t as usize, self.d, per_block, self.blocks.len() as f64);
        for (b, block) in self.blocks.iter().enumerate() {
            if !packing.fits(block) {
                return Err(LabError::domain(format!(
                    "block {b} shares {} or more points with an earlier block",
                    self.t
                )));
            }
            packing.add(block);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreedyMode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOutcome {
    pub system: PartialSteiner,
    pub mode: GreedyMode,
}

/// Greedy packing: lexicographic scan of all k-subsets when
/// `C(d, k) <= EXHAUSTIVE_CAP`, otherwise seeded random draws with
/// rejection.
pub fn greedy_steiner(t: u64, k: u64, d: u64, seed: u64) -> Result<GreedyOutcome> {
    check_tkd(t, k, d)?;
    if d > u32::MAX as u64 {
        return Err(LabError::domain("d too large"));
    }
    let per_block = binomial(k, t).to_u64().unwrap_or(u64::MAX);
    let max_blocks = rational_to_f64(&ratio(big(d, t), big(k, t)));
    let candidates = binomial(d, k).to_u64();
    let mut packing = Packing::new(t as usize, d, per_block, max_blocks);
    let mut blocks = Vec::new();
    let mut try_block = |block: Vec<u32>, packing: &mut Packing| {
        if packing.fits(&block) {
            packing.add(&block);
            blocks.push(block);
        }
    };
    let mode = if candidates.is_some_and(|c| c <= EXHAUSTIVE_CAP) {
        let mut block: Vec<u32> = (1..=k as u32).collect();
        let (n, kk) = (d as u32, k as usize);
        loop {
            try_block(block.clone(), &mut packing);
            let mut i = kk;
            while i > 0 && block[i - 1] == n - (kk - i) as u32 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            block[i - 1] += 1;
            for j in i..kk {
                block[j] = block[j - 1] + 1;
            }
        }
        GreedyMode::Exhaustive
    } else {
        let mut rng = stream(seed, 0);
        for _ in 0..RANDOM_ATTEMPTS {
            let mut block: Vec<u32> = sample(&mut rng, d as usize, k as usize)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            block.sort_unstable();
            try_block(block, &mut packing);
        }
        GreedyMode::Random
    };
    let system = PartialSteiner { t, k, d, blocks };
    Ok(GreedyOutcome { system, mode })
}

// ---------------------------------------------------------------------------
// Constants

/// `m^{m/2} (m+1)^{(m+1)/2} / (2^m m!)`, Harris's polarization constant.
pub fn pol_bound(m: u64) -> f64 {
    assert!(m >= 1, "pol_bound needs m >= 1");
    let mf = m as f64;
    let ln_fact: f64 = (2..=m).map(|i| (i as f64).ln()).sum();
    (0.5 * mf * mf.ln() + 0.5 * (mf + 1.0) * (mf + 1.0).ln() - mf * 2f64.ln() - ln_fact).exp()
}

/// `(1 - gamma) / 2`.
pub fn bm_exponent(gamma: f64) -> f64 {
    (1.0 - gamma) / 2.0
}

/// `kappa m^{(1-gamma)/2}`, with `kappa` normalized (default 1).
pub fn bm_bound(m: u64, kappa: f64) -> f64 {
    kappa * (m as f64).powf(bm_exponent(EULER_GAMMA))
}

pub const EULER_GAMMA: f64 = 0.5772156649;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DixonConstants {
    /// Complex Grothendieck constant interval.
    pub g_lo: f64,
    pub g_hi: f64,
    pub gamma: f64,
    /// Unnamed constant of the `B_m` bound; 1 means "normalized".
    pub kappa: f64,
    /// Use `B_1 = 1` exactly: for a linear form the l1 norm of the
    /// coefficients equals its sup over the polydisk.
    pub b1_exact: bool,
}

impl Default for DixonConstants {
    fn default() -> Self {
        DixonConstants {
            g_lo: 1.33807,
            g_hi: 1.40491,
            gamma: EULER_GAMMA,
            kappa: 1.0,
            b1_exact: true,
        }
    }
}

impl DixonConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.g_lo <= self.g_hi) {
            return Err(LabError::domain("need g_lo <= g_hi"));
        }
        if !(self.kappa > 0.0) {
            return Err(LabError::domain("kappa must be positive"));
        }
        Ok(())
    }

    pub fn kappa_normalized(&self) -> bool {
        self.kappa == 1.0
    }

    /// `B_m`, either exact at `m = 1` or from [`bm_bound`].
    pub fn b(&self, m: u64) -> f64 {
        if m == 1 && self.b1_exact {
            1.0
        } else {
            self.kappa * (m as f64).powf(bm_exponent(self.gamma))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CkUpper {
    pub k: u64,
    pub d: u64,
    /// `G_hi B_{k-1} d^{(k-2)/2} Pol_k`.
    pub value: f64,
    pub b_used: f64,
    pub pol: f64,
    /// True when `B_{k-1}` came from the `kappa` bound rather than an
    /// explicit value or `B_1 = 1`.
    pub kappa_dependent: bool,
    /// `c k (e/2)^k d^{(k-2)/2}` when `c` is supplied.
    pub crude: Option<f64>,
}

pub fn ck_upper(k: u64, d: u64, consts: &DixonConstants, b_explicit: Option<f64>, c: Option<f64>) -> Result<CkUpper> {
    if k < 2 || d < 2 {
        return Err(LabError::domain(format!("ck_upper needs k, d >= 2, got k = {k}, d = {d}")));
    }
    consts.validate()?;
    let m = k - 1;
    let (b_used, kappa_dependent) = match b_explicit {
        Some(b) => (b, false),
        None => (consts.b(m), !(m == 1 && consts.b1_exact)),
    };
    let pol = pol_bound(k);
    let d_factor = (d as f64).powf((k as f64 - 2.0) / 2.0);
    let crude = c.map(|c| c * k as f64 * (std::f64::consts::E / 2.0).powi(k as i32) * d_factor);
    Ok(CkUpper {
        k,
        d,
        value: consts.g_hi * b_used * d_factor * pol,
        b_used,
        pol,
        kappa_dependent,
        crude,
    })
}

/// `(2^{-k/2} / 8) d^{n/2} / (k^{(n+1)/2} sqrt(log k))`, `k = 2n + 1`.
pub fn dixon_ratio_bound(n: u64, d: u64) -> Result<f64> {
    if n < 1 {
        return Err(LabError::domain("n must be >= 1"));
    }
    let k = 2 * n + 1;
    if d < 2 * k {
        return Err(LabError::domain(format!("dixon_ratio_bound needs d >= 2k = {}, got {d}", 2 * k)));
    }
    let (kf, nf, df) = (k as f64, n as f64, d as f64);
    let log = -0.5 * kf * 2f64.ln() - 8f64.ln() + 0.5 * nf * df.ln()
        - 0.5 * (nf + 1.0) * kf.ln()
        - 0.5 * kf.ln().ln();
    Ok(log.exp())
}
