//! Exact arithmetic substrate: integer square roots, fast perfect-square
//! tests, p-adic valuations and Gaussian integer/rational arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Bitmask of quadratic residues modulo 64.
const fn residue_mask_64() -> u64 {
    let mut mask = 0u64;
    let mut r = 0u64;
    while r < 64 {
        mask |= 1 << ((r * r) % 64);
        r += 1;
    }
    mask
}

/// Bitmask of quadratic residues modulo `m` (`m <= 128`).
const fn residue_mask(m: u64) -> u128 {
    let mut mask = 0u128;
    let mut r = 0u64;
    while r < m {
        mask |= 1 << ((r * r) % m);
        r += 1;
    }
    mask
}

const MASK_64: u64 = residue_mask_64();
const MASK_63: u128 = residue_mask(63);
const MASK_65: u128 = residue_mask(65);

/// Cheap necessary condition for `n` to be a perfect square.
///
/// Rejects ~98.4% of uniformly random non-squares without any division
/// beyond three small moduli.
#[inline]
pub fn square_residue_ok_u128(n: u128) -> bool {
    if MASK_64 & (1 << (n % 64)) == 0 {
        return false;
    }
    if MASK_63 & (1 << (n % 63)) == 0 {
        return false;
    }
    MASK_65 & (1 << (n % 65)) != 0
}

/// Floor of the square root of a non-negative `u128`.
pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    // f64 seed, then correct; exact for the full u128 range.
    let mut x = (n as f64).sqrt() as u128;
    // Newton correction to handle the f64 rounding.
    for _ in 0..4 {
        if x == 0 {
            x = 1;
        }
        x = (x + n / x) / 2;
    }
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |s| s <= n) {
        x += 1;
    }
    x
}

/// Perfect-square test on `u128` with residue pre-filtering; the hot path
/// of the census scan. Returns the root when `n` is a square.
#[inline]
pub fn perfect_square_u128(n: u128) -> Option<u128> {
    if !square_residue_ok_u128(n) {
        return None;
    }
    let r = isqrt_u128(n);
    (r * r == n).then_some(r)
}

/// `floor(sqrt(n))` for non-negative `n`. Negative input is rejected.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::NegativeInput(format!("isqrt({n})")));
    }
    Ok(n.sqrt())
}

/// Returns `Some(k)` with `k^2 = n` when `n` is a perfect square,
/// `None` otherwise (negative `n` is never a square).
pub fn perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    if let Some(small) = n.to_u128() {
        return perfect_square_u128(small).map(BigInt::from);
    }
    // Residue filters on the big value before paying for the root.
    let m64 = (n % 64u8).to_u64().unwrap();
    if MASK_64 & (1 << m64) == 0 {
        return None;
    }
    let m63 = (n % 63u8).to_u64().unwrap();
    if MASK_63 & (1 << m63) == 0 {
        return None;
    }
    let m65 = (n % 65u8).to_u64().unwrap();
    if MASK_65 & (1 << m65) == 0 {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Deterministic primality test by trial division; adequate for the
/// word-sized moduli this crate encounters.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = 7u64;
    while d * d <= n {
        for step in [0, 4] {
            let q = d + step;
            if n % q == 0 {
                return false;
            }
        }
        d += 6;
    }
    true
}

/// Prime factorisation of a positive `u64` by trial division.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut d = 5u64;
    while d * d <= n {
        push(d, &mut n);
        push(d + 2, &mut n);
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `v_p(x)` for a non-zero rational `x`: the valuation of the numerator
/// minus the valuation of the denominator.
pub fn padic_val(p: u64, x: &BigRational) -> Result<i64> {
    if !is_prime_u64(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if x.is_zero() {
        return Err(Error::InvalidArgument("v_p(0) is undefined".into()));
    }
    Ok(padic_val_int(p, x.numer()) - padic_val_int(p, x.denom()))
}

/// `v_p(n)` for a non-zero integer.
pub fn padic_val_int(p: u64, n: &BigInt) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// A Gaussian integer `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// `re^2 + im^2`; zero iff the element is zero.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact division; `None` when `rhs` does not divide `self` in `Z[i]`.
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        let n = rhs.norm();
        if n.is_zero() {
            return None;
        }
        let num = self * &rhs.conj();
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        (rr.is_zero() && ri.is_zero()).then(|| Self { re: qr, im: qi })
    }
}

impl fmt::Debug for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: Self) -> GaussianInt {
        GaussianInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: Self) -> GaussianInt {
        GaussianInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: Self) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -&self.re, im: -&self.im }
    }
}

/// An element of `Q(i)` with exact rational coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(z: &GaussianInt) -> Self {
        Self {
            re: BigRational::from_integer(z.re.clone()),
            im: BigRational::from_integer(z.im.clone()),
        }
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// `re^2 + im^2` as an exact rational.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { re: &self.re * c, im: &self.im * c }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let n = rhs.norm();
        let num = self * &rhs.conj();
        Self { re: num.re / &n, im: num.im / &n }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Converts to a Gaussian integer when both coordinates are integral.
    pub fn to_int(&self) -> Option<GaussianInt> {
        (self.re.is_integer() && self.im.is_integer()).then(|| GaussianInt {
            re: self.re.to_integer(),
            im: self.im.to_integer(),
        })
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

/// Parses a rational from a decimal string like `7.98` or `0.0027`,
/// yielding the exact value of the printed digits.
pub fn rational_from_decimal(s: &str) -> BigRational {
    let (sign, s) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int_part, frac_part) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    let digits: BigInt = format!("{int_part}{frac_part}").parse().unwrap();
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    BigRational::new(digits * sign, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn isqrt_small_cases() {
        assert_eq!(isqrt(&BigInt::from(0)).unwrap(), BigInt::from(0));
        assert_eq!(isqrt(&BigInt::from(10)).unwrap(), BigInt::from(3));
        assert!(isqrt(&BigInt::from(-1)).is_err());
    }

    #[test]
    fn isqrt_paper_solution_value() {
        // 3076289^2, squared independently via schoolbook multiply.
        let k: BigInt = "3076289".parse().unwrap();
        let mut sq = BigInt::zero();
        for _ in 0..3076289u32 {
            sq += &k;
        }
        assert_eq!(sq, "9463554011521".parse::<BigInt>().unwrap());
        assert_eq!(isqrt(&sq).unwrap(), k);
    }

    #[test]
    fn perfect_square_cases() {
        // 624*b^2+625 at b=4.
        assert_eq!(perfect_square(&BigInt::from(10609)), Some(BigInt::from(103)));
        assert_eq!(perfect_square(&BigInt::from(-4)), None);
        // 785^2 = 616225, so 616226 sits between consecutive squares.
        assert_eq!(perfect_square(&BigInt::from(616226)), None);
    }

    #[test]
    fn padic_examples() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(padic_val(2, &r(16, 1)).unwrap(), 4);
        assert_eq!(padic_val(2, &r(5, 3)).unwrap(), 0);
        assert_eq!(padic_val(3, &r(5, 3)).unwrap(), -1);
        assert!(padic_val(4, &r(5, 3)).is_err());
        assert!(padic_val(2, &BigRational::zero()).is_err());
    }

    #[test]
    fn gaussian_norm_multiplicative() {
        let z = GaussianInt::new(3, -7);
        let w = GaussianInt::new(-2, 11);
        assert_eq!((&z * &w).norm(), z.norm() * w.norm());
        assert_eq!(&z * &w, &w * &z);
    }

    #[test]
    fn gaussian_exact_division() {
        let z = GaussianInt::new(1, 1);
        let w = GaussianInt::new(5, 3);
        let p = &z * &w;
        assert_eq!(p.checked_div(&z), Some(w));
        assert_eq!(GaussianInt::new(1, 2).checked_div(&GaussianInt::new(1, 1)), None);
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(
            rational_from_decimal("7.98"),
            BigRational::new(BigInt::from(798), BigInt::from(100))
        );
        assert_eq!(rational_from_decimal("-0.5"), BigRational::from_f64(-0.5).unwrap());
        assert_eq!(rational_from_decimal("12"), BigRational::from_integer(12.into()));
    }

    #[test]
    fn u128_square_filter() {
        let mut squares = 0;
        for n in 0u128..100_000 {
            if let Some(r) = perfect_square_u128(n) {
                assert_eq!(r * r, n);
                squares += 1;
            }
        }
        assert_eq!(squares, 317); // floor(sqrt(99999)) + 1
    }
}
