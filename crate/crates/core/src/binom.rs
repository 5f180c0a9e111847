//! Exact binomial coefficients over arbitrary-size integers.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)` as an exact big integer. Returns zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc = C(n, i) here; the product below is divisible by i + 1.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Walks the diagonal `C(base + j, j)` for `j = 0, 1, 2, ...` with one
/// multiply and one exact division per step.
#[derive(Debug, Clone)]
pub struct DiagonalBinomials {
    base: u64,
    j: u64,
    current: BigUint,
}

impl DiagonalBinomials {
    pub fn new(base: u64) -> Self {
        DiagonalBinomials {
            base,
            j: 0,
            current: BigUint::one(),
        }
    }
}

impl Iterator for DiagonalBinomials {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        let out = self.current.clone();
        // C(base + j + 1, j + 1) = C(base + j, j) * (base + j + 1) / (j + 1)
        self.current *= self.base + self.j + 1;
        self.current /= self.j + 1;
        self.j += 1;
        Some(out)
    }
}

/// Number of multi-indices of total degree `k` in `d` variables, `C(d+k-1, k)`.
pub fn multi_index_count(d: u64, k: u64) -> BigUint {
    if d == 0 {
        return if k == 0 { BigUint::one() } else { BigUint::zero() };
    }
    binomial(d + k - 1, k)
}
