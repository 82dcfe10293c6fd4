//! Segmented sieve of Eratosthenes for the prime ranges the experiments
//! use (desk scale, capped at 10^7).

/// Hard cap on sieve ranges; the experiments are density estimates and gain
/// nothing past desk scale.
pub const SIEVE_CAP: u64 = 10_000_000;

const SEGMENT: usize = 1 << 16;

/// All primes up to and including `limit`. Panics above [`SIEVE_CAP`].
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    assert!(
        limit <= SIEVE_CAP,
        "prime range {limit} exceeds the {SIEVE_CAP} cap"
    );
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    // base sieve up to sqrt(limit)
    let mut base = vec![true; (root + 1) as usize];
    base[0] = false;
    if root >= 1 {
        base[1] = false;
    }
    let mut i = 2u64;
    while i * i <= root {
        if base[i as usize] {
            let mut j = i * i;
            while j <= root {
                base[j as usize] = false;
                j += i;
            }
        }
        i += 1;
    }
    let small: Vec<u64> = (2..=root).filter(|&n| base[n as usize]).collect();

    let estimate = (limit as f64 / (limit as f64).ln().max(2.0) * 1.2) as usize + 16;
    let mut primes = Vec::with_capacity(estimate);
    primes.extend(small.iter().copied().filter(|&p| p <= limit));

    let mut mask = vec![true; SEGMENT];
    let mut low = root + 1;
    while low <= limit {
        let high = (low + SEGMENT as u64 - 1).min(limit);
        let len = (high - low + 1) as usize;
        mask[..len].fill(true);
        for &p in &small {
            if p * p > high {
                break;
            }
            let mut start = low.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= high {
                mask[(j - low) as usize] = false;
                j += p;
            }
        }
        for (k, &keep) in mask[..len].iter().enumerate() {
            if keep {
                primes.push(low + k as u64);
            }
        }
        low = high + 1;
    }
    primes
}

/// Prime factorisation as (prime, exponent) pairs, by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Möbius function over the divisors of n: returns the squarefree divisors
/// of n paired with μ(d).
pub fn squarefree_divisors_with_mu(n: u64) -> Vec<(u64, i64)> {
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let mut out = vec![(1u64, 1i64)];
    for p in primes {
        let mut next = Vec::with_capacity(out.len() * 2);
        for &(d, mu) in &out {
            next.push((d, mu));
            next.push((d * p, -mu));
        }
        out = next;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_counts_match_reference() {
        assert_eq!(primes_up_to(1).len(), 0);
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(30).len(), 10);
        assert_eq!(primes_up_to(10_000).len(), 1229);
        assert_eq!(primes_up_to(100_000).len(), 9592);
        assert_eq!(primes_up_to(200_000).len(), 17984);
        assert_eq!(primes_up_to(1_000_000).len(), 78498);
    }

    #[test]
    fn segments_join_cleanly() {
        let primes = primes_up_to(300_000);
        for w in primes.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(primes.contains(&65_537)); // straddles the first segment edge
        assert_eq!(*primes.last().unwrap(), 299_993);
    }

    #[test]
    fn factorization_and_mu() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert!(is_squarefree(30));
        assert!(!is_squarefree(12));
        assert_eq!(
            squarefree_divisors_with_mu(12),
            vec![(1, 1), (2, -1), (3, -1), (6, 1)]
        );
        assert_eq!(squarefree_divisors_with_mu(1), vec![(1, 1)]);
    }
}
