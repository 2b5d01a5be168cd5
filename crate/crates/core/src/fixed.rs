//! Certified fixed-point logarithms and powers of two.
//!
//! Every quantity is an interval `[lo, hi] / 2^frac_bits` with integer
//! endpoints, so rounding never escapes the bound.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default mantissa width used when truncating large integers before a log.
pub const DEFAULT_LOG_PRECISION_BITS: u32 = 64;

/// Mantissa width, overridable through `SRCF_LOG_PRECISION_BITS`.
pub fn log_precision_bits() -> u32 {
    std::env::var("SRCF_LOG_PRECISION_BITS")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&w| (16..=4096).contains(&w))
        .unwrap_or(DEFAULT_LOG_PRECISION_BITS)
}

/// A closed interval `[lo, hi] / 2^frac_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub frac_bits: u32,
}

impl FixedInterval {
    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.frac_bits)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.frac_bits)
    }

    pub fn mid_f64(&self) -> f64 {
        let sum = &self.lo + &self.hi;
        scaled_to_f64(&sum, self.frac_bits + 1)
    }

    pub fn lo_f64(&self) -> f64 {
        scaled_to_f64(&self.lo, self.frac_bits)
    }

    pub fn hi_f64(&self) -> f64 {
        scaled_to_f64(&self.hi, self.frac_bits)
    }

    /// Upper bound on the width, as `f64`.
    pub fn width_f64(&self) -> f64 {
        scaled_to_f64(&(&self.hi - &self.lo), self.frac_bits)
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }
}

/// `v / 2^bits` as `f64`, keeping 64 significant bits before conversion.
pub fn scaled_to_f64(v: &BigInt, bits: u32) -> f64 {
    let len = v.bits();
    if len > 64 {
        let shift = len - 64;
        let top = (v >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(shift as i32 - bits as i32)
    } else {
        v.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(bits as i32))
    }
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_ceil(d)
}

fn shift_down_floor(v: &BigInt, bits: u32) -> BigInt {
    // arithmetic shift on BigInt floors toward negative infinity
    v >> bits
}

fn shift_down_ceil(v: &BigInt, bits: u32) -> BigInt {
    -((-v) >> bits)
}

const GUARD: u32 = 16;

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, FixedInterval>> = RefCell::new(HashMap::new());
}

/// `ln 2` at `frac_bits` fractional bits, from `sum 1/(k 2^k)`.
pub fn ln2(frac_bits: u32) -> FixedInterval {
    if let Some(v) = LN2_CACHE.with(|c| c.borrow().get(&frac_bits).cloned()) {
        return v;
    }
    let v = ln2_uncached(frac_bits);
    LN2_CACHE.with(|c| c.borrow_mut().insert(frac_bits, v.clone()));
    v
}

fn ln2_uncached(frac_bits: u32) -> FixedInterval {
    let work = frac_bits + GUARD;
    let one = BigInt::one() << work;
    let mut sum = BigInt::zero();
    let mut k: u64 = 1;
    let mut terms: u64 = 0;
    loop {
        let t = &one >> k;
        let t = t / BigInt::from(k);
        if t.is_zero() {
            break;
        }
        sum += t;
        terms += 1;
        k += 1;
    }
    // each floor loses < 1 ulp; the tail after the first zero term is < 1 ulp
    let hi = &sum + BigInt::from(terms + 1);
    FixedInterval {
        lo: shift_down_floor(&sum, GUARD),
        hi: shift_down_ceil(&hi, GUARD),
        frac_bits,
    }
}

/// `sum_{j>=0} z^(2j+1)/(2j+1)` for `z = u/v` in `[0, 1/3]`, as an interval
/// at `work` fractional bits.
fn atanh_series(u: &BigInt, v: &BigInt, work: u32) -> (BigInt, BigInt) {
    if u.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let scale = BigInt::one() << work;
    let u2 = u * u;
    let v2 = v * v;
    let mut pu = u.clone();
    let mut pv = v.clone();
    let mut sum = BigInt::zero();
    let mut terms: u64 = 0;
    let mut k: u64 = 1;
    loop {
        let power = (&scale * &pu) / &pv;
        if power.is_zero() {
            break;
        }
        sum += power / BigInt::from(k);
        terms += 1;
        pu *= &u2;
        pv *= &v2;
        k += 2;
    }
    // z^k < 1 ulp with z^2 <= 1/9 bounds the tail by 9/8 ulp
    (sum.clone(), sum + BigInt::from(terms + 2))
}

/// `ln(n / 2^e)` for `n / 2^e` in `[1, 2]`.
fn ln_unit(n: &BigInt, e: u32, work: u32) -> (BigInt, BigInt) {
    let pow = BigInt::one() << e;
    let u = n - &pow;
    let v = n + &pow;
    let (lo, hi) = atanh_series(&u, &v, work);
    (lo << 1, hi << 1)
}

/// Certified `ln x` for `x >= 1`, truncating `x` to `mantissa_bits` bits.
pub fn ln_biguint(x: &BigUint, mantissa_bits: u32) -> FixedInterval {
    assert!(!x.is_zero(), "logarithm of zero");
    let frac_bits = mantissa_bits + 32;
    let work = frac_bits + GUARD;
    let len = x.bits();
    let shift = len.saturating_sub(u64::from(mantissa_bits));
    let m = BigInt::from_biguint(BigSign::Plus, x >> shift);
    let exact = shift == 0 || (x.trailing_zeros().unwrap_or(0) >= shift);
    let e = (m.bits() - 1) as u32;
    let twos = BigInt::from(shift + u64::from(e));

    let ln2_work = ln2(work);
    let (unit_lo, _) = ln_unit(&m, e, work);
    let upper_m = if exact { m.clone() } else { &m + 1 };
    let (_, unit_hi) = if upper_m.bits() - 1 > u64::from(e) {
        // M + 1 reached 2^(e+1); ln(2) = ln_unit at the interval edge
        (BigInt::zero(), ln2_work.hi.clone())
    } else {
        ln_unit(&upper_m, e, work)
    };
    let lo = &twos * &ln2_work.lo + unit_lo;
    let hi = &twos * &ln2_work.hi + unit_hi;
    FixedInterval {
        lo: shift_down_floor(&lo, GUARD),
        hi: shift_down_ceil(&hi, GUARD),
        frac_bits,
    }
}

/// `exp(t / 2^bits)` for fixed-point `t` in `[0, 2^bits)`, lower or upper bound.
fn exp_fixed(t: &BigInt, bits: u32, upper: bool) -> BigInt {
    let one = BigInt::one() << bits;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k: u64 = 1;
    loop {
        let num = &term * t;
        let den = BigInt::from(k) << bits;
        term = if upper { ceil_div(&num, &den) } else { num / den };
        if term.is_zero() {
            break;
        }
        sum += &term;
        if upper && term <= BigInt::one() {
            // remaining terms shrink geometrically with ratio below 1/2
            sum += 2;
            break;
        }
        k += 1;
    }
    sum
}

/// `floor(2^x)` for rational `x >= 0`, exact.
pub fn pow2_floor(x: &BigRational) -> BigInt {
    assert!(!x.is_negative(), "pow2_floor needs x >= 0");
    let m = x.floor().to_integer();
    let f = x - BigRational::from_integer(m.clone());
    let m = m.to_u64().expect("exponent fits in u64");
    if f.is_zero() {
        return BigInt::one() << m;
    }
    let mut bits = (m as u32).saturating_add(64);
    loop {
        let l2 = ln2(bits);
        // t = f * ln 2 at `bits` fractional bits
        let t_lo = (f.numer() * &l2.lo) / f.denom();
        let t_hi = ceil_div(&(f.numer() * &l2.hi), f.denom());
        let e_lo = exp_fixed(&t_lo, bits, false);
        let e_hi = exp_fixed(&t_hi, bits, true);
        let lo = (e_lo << m) >> bits;
        let hi = (e_hi << m) >> bits;
        if lo == hi {
            return lo;
        }
        bits = bits.saturating_mul(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_brackets_known_value() {
        let iv = ln2(80);
        assert!(iv.lo <= iv.hi);
        assert!(iv.lo_f64() <= std::f64::consts::LN_2 + 1e-16);
        assert!(iv.hi_f64() >= std::f64::consts::LN_2 - 1e-16);
        assert!(iv.width_f64() < 1e-20);
    }

    #[test]
    fn ln_of_small_integers() {
        for x in [1u64, 2, 3, 7, 10, 1000, 123456789] {
            let iv = ln_biguint(&BigUint::from(x), 64);
            let truth = (x as f64).ln();
            assert!(iv.lo_f64() <= truth + 1e-12, "x = {x}");
            assert!(iv.hi_f64() >= truth - 1e-12, "x = {x}");
            assert!(iv.width_f64() < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn ln_of_huge_integer() {
        // 3^1000: ln = 1000 ln 3
        let x = BigUint::from(3u32).pow(1000);
        let iv = ln_biguint(&x, 64);
        let truth = 1000.0 * 3f64.ln();
        assert!((iv.mid_f64() - truth).abs() < 1e-9);
        assert!(iv.width_f64() < 1e-12);
    }

    #[test]
    fn ln_of_power_of_two_is_tight() {
        let x = BigUint::one() << 500u32;
        let iv = ln_biguint(&x, 64);
        assert!((iv.mid_f64() - 500.0 * std::f64::consts::LN_2).abs() < 1e-10);
        assert!(iv.width_f64() < 1e-15);
    }

    #[test]
    fn pow2_floor_matches_integer_roots() {
        for (num, den) in [(1i64, 2i64), (9, 4), (27, 8), (81, 16), (5, 3), (243, 32)] {
            let x = BigRational::new(BigInt::from(num), BigInt::from(den));
            let expected = (BigInt::one() << (num as u32)).nth_root(den as u32);
            assert_eq!(pow2_floor(&x), expected, "2^({num}/{den})");
        }
        assert_eq!(pow2_floor(&BigRational::from_integer(BigInt::from(10))), BigInt::from(1024));
    }

    #[test]
    fn pow2_floor_large_exponent() {
        // 2^(3^10 / 2^10) checked against an exact root
        let num = 3u64.pow(10);
        let x = BigRational::new(BigInt::from(num), BigInt::from(1024));
        let expected = (BigInt::one() << num).nth_root(1024);
        assert_eq!(pow2_floor(&x), expected);
    }

    #[test]
    fn precision_env_default() {
        assert!(log_precision_bits() >= 16);
    }
}
