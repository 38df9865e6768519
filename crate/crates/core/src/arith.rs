//! Small integer helpers: modular arithmetic with 128-bit intermediates,
//! trial-division factoring, divisor lists and the Möbius function.

use alloc::vec::Vec;

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(a < m && b < m);
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(a < m && b < m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing prime order. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    // 6k ± 1 wheel
    let mut p = 5u64;
    while p <= n / p {
        for q in [p, p + 2] {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            if e > 0 {
                out.push((q, e));
            }
        }
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    matches!(factorize(n).as_slice(), [(_, 1)])
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = alloc::vec![1u64];
    for (p, e) in factorize(n) {
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

/// The Möbius function.
pub fn mobius(n: u64) -> i8 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Splits `m = 2^l * m1` with `m1` odd, returning `(l, m1)`.
pub fn split_two_power(m: u64) -> (u32, u64) {
    let l = m.trailing_zeros();
    (l, m >> l)
}

/// Smallest `k >= 1` with `a^k ≡ 1 (mod m)`, or `None` when `gcd(a, m) != 1`.
/// For `m == 1` the order is 1.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(a % m, m) != 1 {
        return None;
    }
    let mut order = euler_phi(m);
    for (q, _) in factorize(order) {
        while order.is_multiple_of(q) && pow_mod(a, order / q, m) == 1 {
            order /= q;
        }
    }
    Some(order)
}

/// `base^exp` in `u128`, or `None` on overflow.
pub fn checked_pow_u128(base: u64, exp: u32) -> Option<u128> {
    (base as u128).checked_pow(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn factor_and_divisors() {
        assert_eq!(factorize(240), vec![(2, 4), (3, 1), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(27_237_078), vec![(2, 1), (3, 2), (11, 1), (151, 1), (911, 1)]);
        assert_eq!(
            divisors(240),
            vec![1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 16, 20, 24, 30, 40, 48, 60, 80, 120, 240]
        );
        assert_eq!(divisors(1), vec![1]);
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i8> = (1..=12).map(mobius).collect();
        assert_eq!(got, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn orders_of_two() {
        assert_eq!(multiplicative_order(2, 3), Some(2));
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(2, 11), Some(10));
        assert_eq!(multiplicative_order(2, 17), Some(8));
        assert_eq!(multiplicative_order(2, 23), Some(11));
        assert_eq!(multiplicative_order(2, 31), Some(5));
        assert_eq!(multiplicative_order(2, 8), None);
        // brute force over odd moduli
        for m in (3..200u64).step_by(2) {
            let mut k = 1;
            let mut x = 2 % m;
            while x != 1 {
                x = x * 2 % m;
                k += 1;
            }
            assert_eq!(multiplicative_order(2, m), Some(k), "m = {m}");
        }
    }

    #[test]
    fn modular_ops_near_u64_max() {
        let m = u64::MAX - 58; // prime
        assert_eq!(add_mod(m - 1, m - 1, m), m - 2);
        assert_eq!(sub_mod(0, 1, m), m - 1);
        assert_eq!(mul_mod(m - 1, m - 1, m), 1);
        assert_eq!(pow_mod(2, m - 1, m), 1);
    }
}
