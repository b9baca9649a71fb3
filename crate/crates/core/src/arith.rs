//! Small integer helpers: primality by trial division, factorization,
//! Euler phi. Everything here operates at desk scale (inputs well below
//! 2^32), so no sieving or probabilistic tests are needed.

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in ascending order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0u32;
            while n.is_multiple_of(p) {
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

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut phi = 1u64;
    for (p, e) in factor(n) {
        phi *= p.pow(e - 1) * (p - 1);
    }
    phi
}

/// All primes up to and including `n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&m| is_prime(m)).collect()
}

/// Squarefree test for a positive integer.
pub fn is_squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert!(is_prime(2) && is_prime(17) && !is_prime(1) && !is_prime(91));
        assert_eq!(factor(99), vec![(3, 2), (11, 1)]);
        assert_eq!(factor(33), vec![(3, 1), (11, 1)]);
        assert_eq!(euler_phi(33), 20);
        assert_eq!(euler_phi(51), 32);
        assert_eq!(euler_phi(99), 60);
        assert_eq!(euler_phi(9), 6);
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(2) && is_squarefree(23) && is_squarefree(5));
        assert!(!is_squarefree(4) && !is_squarefree(12) && !is_squarefree(0));
    }
}
