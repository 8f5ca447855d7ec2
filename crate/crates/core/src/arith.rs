//! Elementary arithmetic: sieves, factorization, divisor functions and
//! modular helpers shared by every other module.

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm, normalized
/// to `[0, m)`. Returns `None` when `gcd(a, m) != 1`.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m <= 0 {
        return None;
    }
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(m))
}

/// Legendre symbol `(a | p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let e = pow_mod(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Prime factorization by trial division, as ascending `(p, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Number of ordered factorizations `n = n_1 ... n_t`, from a factorization.
pub fn tau_t_from_factors(factors: &[(u64, u32)], t: u32) -> u64 {
    factors
        .iter()
        .map(|&(_, a)| binomial(a as u64 + t as u64 - 1, t as u64 - 1))
        .product()
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Primes up to and including `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && matches!(factorize(n).as_slice(), [(_, 1)])
}

/// Sieved arithmetic tables: smallest prime factor, Möbius function, and the
/// generalized divisor functions `tau_t` for `t = 1..=6`.
#[derive(Debug, Clone)]
pub struct ArithCache {
    limit: usize,
    spf: Vec<u32>,
    mobius: Vec<i8>,
    /// `tau_t[t - 1][n]` for `t` in 1..=6.
    tau_t: Vec<Vec<u32>>,
}

pub const MAX_TAU_ORDER: u32 = 6;

impl ArithCache {
    pub fn new(limit: usize) -> Self {
        let limit = limit.max(1);
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut mobius = vec![0i8; limit + 1];
        let mut tau_t = vec![vec![0u32; limit + 1]; MAX_TAU_ORDER as usize];
        mobius[1] = 1;
        for row in tau_t.iter_mut() {
            row[1] = 1;
        }
        for n in 2..=limit {
            let p = spf[n] as usize;
            let mut m = n;
            let mut a = 0u32;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            mobius[n] = match a {
                1 => -mobius[m],
                _ => 0,
            };
            for t in 1..=MAX_TAU_ORDER {
                let local = binomial((a + t - 1) as u64, (t - 1) as u64) as u32;
                tau_t[(t - 1) as usize][n] = tau_t[(t - 1) as usize][m] * local;
            }
        }
        Self {
            limit,
            spf,
            mobius,
            tau_t,
        }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn smallest_prime_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    /// Number of divisors.
    pub fn tau(&self, n: usize) -> u32 {
        self.tau_t[1][n]
    }

    pub fn tau_t(&self, t: u32, n: usize) -> u32 {
        assert!((1..=MAX_TAU_ORDER).contains(&t), "tau_t order out of range");
        self.tau_t[(t - 1) as usize][n]
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    /// Factorization through the smallest-prime-factor table.
    pub fn factorize(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    pub fn divisors(&self, n: usize) -> Vec<usize> {
        let mut divs = vec![1usize];
        for (p, e) in self.factorize(n) {
            let len = divs.len();
            let mut pk = 1usize;
            for _ in 0..e {
                pk *= p as usize;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Divisors of `n` from its factorization, ascending.
pub fn divisors_from_factors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Möbius function from a factorization.
pub fn mobius_from_factors(factors: &[(u64, u32)]) -> i32 {
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let c = ArithCache::new(100);
        assert_eq!(c.mobius(1), 1);
        assert_eq!(c.tau(1), 1);
        assert_eq!(c.tau_t(3, 1), 1);
        assert_eq!(c.mobius(30), -1);
        assert_eq!(c.mobius(12), 0);
        assert_eq!(c.tau(12), 6);
        // tau_3(p^2) = C(4, 2) = 6
        assert_eq!(c.tau_t(3, 49), 6);
        for n in 1..=100 {
            assert_eq!(c.tau_t(2, n), c.tau(n));
            assert_eq!(c.tau_t(1, n), 1);
        }
    }

    #[test]
    fn mobius_sums_vanish_off_one() {
        let c = ArithCache::new(2000);
        for n in 1..=2000 {
            let s: i32 = c.divisors(n).iter().map(|&d| c.mobius(d) as i32).sum();
            assert_eq!(s, if n == 1 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn tau_t_matches_brute_force() {
        let c = ArithCache::new(400);
        for n in 1..=400usize {
            // tau_3(n) = sum_{d | n} tau(d)
            let t3: u32 = c.divisors(n).iter().map(|&d| c.tau(d)).sum();
            assert_eq!(c.tau_t(3, n), t3);
            let f = factorize(n as u64);
            assert_eq!(tau_t_from_factors(&f, 6) as u32, c.tau_t(6, n));
        }
    }

    #[test]
    fn inverses_and_legendre() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(-3, 7), Some(2));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(mod_inverse(5, 1), Some(0));
        assert_eq!(legendre(2, 23), 1);
        assert_eq!(legendre(5, 23), -1);
        assert_eq!(legendre(23, 23), 0);
        assert_eq!(legendre(-1, 23), -1);
    }

    #[test]
    fn primes_and_factors() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors_from_factors(&factorize(12)), vec![1, 2, 3, 4, 6, 12]);
        assert!(is_prime(257));
        assert!(!is_prime(1));
    }
}
