use alloc::vec::Vec;

use super::SamplingError;

/// Integer growth sequence T′_k for k ∈ [m−1, n−1] and its inverse g(t).
///
/// The real-valued companion sequence E_{k+1} = (k+1)/(k+2−m)·E_k anchored
/// at E_{m−1} = 1 unrolls to the binomial C(k, m−1), so it is carried in
/// exact integer arithmetic and T′ never suffers from rounding in the
/// ceiling. Entries that overflow saturate at `u64::MAX`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    m: usize,
    n: usize,
    t_prime: Vec<u64>,
}

impl GrowthTable {
    pub fn new(m: usize, n: usize) -> Result<Self, SamplingError> {
        if m < 2 {
            return Err(SamplingError::DomainError("sample size must be at least 2"));
        }
        if n <= m {
            return Err(SamplingError::DomainError("point count must exceed the sample size"));
        }
        let mut t_prime = Vec::with_capacity(n - m + 1);
        let mut expected: Option<u128> = Some(1);
        let mut current: u64 = 1;
        t_prime.push(current);
        for k in (m - 1)..(n - 1) {
            let next = expected.and_then(|e| e.checked_mul(k as u128 + 1).map(|v| v / (k as u128 + 2 - m as u128)));
            let step = match (expected, next) {
                (Some(e), Some(f)) => u64::try_from(f - e).unwrap_or(u64::MAX),
                _ => u64::MAX,
            };
            current = current.saturating_add(step);
            t_prime.push(current);
            expected = next;
        }
        Ok(Self { m, n, t_prime })
    }

    pub fn sample_size(&self) -> usize {
        self.m
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    /// Smallest k with an entry, m − 1.
    pub fn first_k(&self) -> usize {
        self.m - 1
    }

    /// T′_k; k below m − 1 reads as 1, k past n − 1 as `u64::MAX`.
    pub fn t_prime(&self, k: usize) -> u64 {
        if k < self.m - 1 {
            1
        } else {
            self.t_prime.get(k + 1 - self.m).copied().unwrap_or(u64::MAX)
        }
    }

    /// Entries T′_{m−1}, …, T′_{n−1}.
    pub fn values(&self) -> &[u64] {
        &self.t_prime
    }

    /// g(t) = min{k : T′_k ≥ t}; n once t exceeds T′_{n−1}.
    pub fn g(&self, t: u64) -> usize {
        self.first_k() + self.t_prime.partition_point(|&v| v < t)
    }
}
