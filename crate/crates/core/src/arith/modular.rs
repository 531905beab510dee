use crate::error::{Error, Result};

/// A nonzero modulus over the full `u128` range.
///
/// Moduli below 2^32 multiply in `u64`, moduli below 2^64 through a native
/// `u128` product. Wider moduli use shift-and-add multiplication with overflow-aware
/// addition, which is exact up to `u128::MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    m: u128,
    width: Width,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Width {
    U32,
    U64,
    Wide,
}

impl Modulus {
    pub fn new(m: u128) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        let width = if m <= u32::MAX as u128 {
            Width::U32
        } else if m <= u64::MAX as u128 {
            Width::U64
        } else {
            Width::Wide
        };
        Ok(Modulus { m, width })
    }

    #[inline]
    pub fn get(self) -> u128 {
        self.m
    }

    #[inline]
    pub fn reduce(self, x: u128) -> u128 {
        x % self.m
    }

    /// `(x + y) mod m` for reduced `x, y`.
    #[inline]
    pub fn add(self, x: u128, y: u128) -> u128 {
        let (s, carry) = x.overflowing_add(y);
        if carry || s >= self.m {
            s.wrapping_sub(self.m)
        } else {
            s
        }
    }

    /// `(x - y) mod m` for reduced `x, y`.
    #[inline]
    pub fn sub(self, x: u128, y: u128) -> u128 {
        if x >= y {
            x - y
        } else {
            self.m - (y - x)
        }
    }

    /// `x * y mod m` for reduced `x, y`.
    #[inline]
    pub fn mul(self, x: u128, y: u128) -> u128 {
        match self.width {
            Width::U32 => return ((x as u64 * y as u64) % self.m as u64) as u128,
            Width::U64 => return (x * y) % self.m,
            Width::Wide => {}
        }
        if let Some(p) = x.checked_mul(y) {
            return p % self.m;
        }
        let mut acc = 0u128;
        for bit in (0..128 - y.leading_zeros()).rev() {
            acc = self.add(acc, acc);
            if (y >> bit) & 1 == 1 {
                acc = self.add(acc, x);
            }
        }
        acc
    }

    /// `x^e mod m` by left-to-right square-and-multiply; `x^0 = 1 mod m`.
    pub fn pow(self, x: u128, mut e: u128) -> u128 {
        let mut base = self.reduce(x);
        let mut acc = self.reduce(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// Halve a reduced value modulo an odd modulus.
    #[inline]
    pub(crate) fn half(self, x: u128) -> u128 {
        if x & 1 == 0 {
            x >> 1
        } else {
            // (x + m) / 2 without overflowing when m is close to 2^128.
            (x >> 1) + (self.m >> 1) + 1
        }
    }
}

/// `x * y mod m`. Inputs need not be reduced.
pub fn mul_mod(x: u128, y: u128, m: u128) -> Result<u128> {
    let m = Modulus::new(m)?;
    Ok(m.mul(m.reduce(x), m.reduce(y)))
}

/// `x^e mod m`, with `pow_mod(x, 0, m) == 1 % m`.
pub fn pow_mod(x: u128, e: u128, m: u128) -> Result<u128> {
    Ok(Modulus::new(m)?.pow(x, e))
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple; `None` on overflow.
pub fn lcm(a: u128, b: u128) -> Option<u128> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    n.isqrt()
}
