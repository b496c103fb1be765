//! Small shared helpers: deterministic RNG, compensated summation,
//! modular arithmetic primitives and exact integer roots.

use num_bigint::BigUint;

/// SplitMix64. Used for every seeded sweep so that identical seeds give
/// identical samples regardless of external crate versions.
#[derive(Clone, Debug)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        DetRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, n)`. `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Rejection sampling keeps the distribution exactly uniform.
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Uniform value in `[lo, hi]`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    pub fn bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

/// Kahan-Babuska-Neumaier compensated summation with a running sum of
/// absolute values, from which a rigorous rounding radius can be derived:
/// the accumulated error is below `4*EPS*abs_sum` for any realistic term
/// count (the second-order `n*EPS^2` contribution is negligible here).
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    #[inline]
    pub fn abs_sum(&self) -> f64 {
        self.abs
    }

    /// Upper bound on the absolute rounding error of `value()`, including
    /// one rounding per input term (generous constant).
    #[inline]
    pub fn rounding_radius(&self) -> f64 {
        8.0 * f64::EPSILON * self.abs
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// `a * b mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    if m <= u32::MAX as u64 {
        (a % m) * (b % m) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// `base ^ exp mod m`.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
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

/// Floor of the cube root, exact (Newton iteration on integers only).
pub fn biguint_cbrt(n: &BigUint) -> BigUint {
    use num_bigint::BigUint as B;
    if n.bits() == 0 {
        return B::from(0u8);
    }
    // Initial guess from the bit length, then monotone Newton descent.
    let mut x = B::from(1u8) << n.bits().div_ceil(3);
    loop {
        // x_{k+1} = (2*x_k + n / x_k^2) / 3
        let x2 = &x * &x;
        let next = (&x * 2u8 + n / &x2) / 3u8;
        if next >= x {
            break;
        }
        x = next;
    }
    while &x * &x * &x > *n {
        x -= 1u8;
    }
    x
}

/// Floor of the 16/3 power `q^(16/3)`, exact.
pub fn floor_pow_16_3(q: u64) -> BigUint {
    biguint_cbrt(&BigUint::from(q).pow(16))
}
