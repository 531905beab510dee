use std::sync::OnceLock;

use super::modular::{isqrt, Modulus};

/// Trial-division ceiling; also the range of the cached prime table.
pub const SMALL_PRIME_LIMIT: u32 = 1_000_000;

/// The first 13 primes are a deterministic Miller-Rabin witness set for
/// every n below this bound (Sorenson and Webster).
pub const MR_DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

const MR_WITNESSES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Primes below `limit`, by Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j < n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Cached primes below [`SMALL_PRIME_LIMIT`].
pub fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_below(SMALL_PRIME_LIMIT as u64))
}

/// Deterministic primality test over the whole `u128` range.
///
/// Below [`MR_DETERMINISTIC_BOUND`] the answer is proven by the fixed
/// witness set. Above it the same witnesses are combined with a strong
/// Lucas test (Baillie-PSW); no composite is known to pass that pair.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let m = Modulus::new(n).expect("n >= 2");
    if !MR_WITNESSES.iter().all(|&a| strong_probable_prime(m, a)) {
        return false;
    }
    n < MR_DETERMINISTIC_BOUND || strong_lucas_probable_prime(m)
}

/// One Miller-Rabin round: `n - 1 = 2^s * d`, accept iff `a^d = 1` or
/// `a^(2^k d) = -1` for some `0 <= k < s`.
pub(crate) fn strong_probable_prime(m: Modulus, a: u128) -> bool {
    let n = m.get();
    let a = m.reduce(a);
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = m.pow(a, d);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = m.mul(x, x);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd `n`, with `a` given as a signed value.
fn jacobi(a: i128, n: u128) -> i32 {
    debug_assert!(n & 1 == 1);
    let mut a = if a >= 0 {
        (a as u128) % n
    } else {
        let r = a.unsigned_abs() % n;
        if r == 0 {
            0
        } else {
            n - r
        }
    };
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            let r = n & 7;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn signed_residue(m: Modulus, v: i128) -> u128 {
    if v >= 0 {
        m.reduce(v as u128)
    } else {
        m.sub(0, m.reduce(v.unsigned_abs()))
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters
/// (`P = 1`, `Q = (1 - D) / 4`, `D` the first of 5, -7, 9, -11, ... with
/// Jacobi symbol -1). `n` must be odd and free of factors up to 41.
pub(crate) fn strong_lucas_probable_prime(m: Modulus) -> bool {
    let n = m.get();
    let r = isqrt(n);
    if r * r == n {
        return false;
    }
    let mut d: i128 = 5;
    loop {
        match jacobi(d, n) {
            -1 => break,
            0 if d.unsigned_abs() != n => return false,
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let d_mod = signed_residue(m, d);
    let q_mod = signed_residue(m, q);

    // n + 1 = k * 2^s with k odd. n is odd so n + 1 may overflow only at
    // u128::MAX, which is composite and already rejected.
    let np1 = n + 1;
    let s = np1.trailing_zeros();
    let k = np1 >> s;

    let mut u = 1u128;
    let mut v = 1u128;
    let mut qk = q_mod;
    for bit in (0..127 - k.leading_zeros()).rev() {
        u = m.mul(u, v);
        v = m.sub(m.mul(v, v), m.add(qk, qk));
        qk = m.mul(qk, qk);
        if (k >> bit) & 1 == 1 {
            let nu = m.half(m.add(u, v));
            let nv = m.half(m.add(m.mul(d_mod, u), v));
            u = nu;
            v = nv;
            qk = m.mul(qk, q_mod);
        }
    }
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..s {
        v = m.sub(m.mul(v, v), m.add(qk, qk));
        qk = m.mul(qk, qk);
        if v == 0 {
            return true;
        }
    }
    false
}
