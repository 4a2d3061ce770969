//! Ball arithmetic: mid-point floats at configurable precision with a
//! propagated error radius, so every value encloses the quantity it
//! approximates. Strict inequalities are only reported when they hold for
//! the whole ball; anything decided within the radius is "undecided" and
//! callers escalate precision.

use num_bigint::BigInt;
use num_rational::BigRational;

use rug::float::Constant;

use rug::{Float, Integer as RugInt};

use crate::arith::{GaussianInt, GaussianRational};
use crate::{Error, Result};

const RADIUS_PREC: u32 = 64;
// Absorbs the rounding of radius arithmetic itself, which is done to
// nearest at RADIUS_PREC bits.
const RADIUS_FUDGE: f64 = 1.0 + 1e-9;

fn to_rug(n: &BigInt) -> RugInt {
    // Round-trips through decimal; fine at the sizes we handle.
    RugInt::from_str_radix(&n.to_str_radix(16), 16).unwrap()
}

fn float_from_rational(prec: u32, q: &BigRational) -> Float {
    let num = Float::with_val(prec, to_rug(q.numer()));
    let den = Float::with_val(prec, to_rug(q.denom()));
    num / den
}

/// One unit in the last place of `f` at precision `prec`, padded to also
/// cover a second rounding.
fn ulp(f: &Float, prec: u32) -> Float {
    let exp = f.get_exp().unwrap_or(-(2 * prec as i32));
    Float::with_val(RADIUS_PREC, Float::i_exp(1, exp + 2 - prec as i32))
}

fn rad_fudge(r: Float) -> Float {
    r * RADIUS_FUDGE
}

/// A real ball `mid +/- rad`.
#[derive(Clone, Debug)]
pub struct RealBall {
    pub mid: Float,
    pub rad: Float,
    prec: u32,
}

impl RealBall {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    fn exact(mid: Float, prec: u32) -> Self {
        let rad = ulp(&mid, prec);
        Self { mid, rad, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self { mid: Float::with_val(prec, 0), rad: Float::with_val(RADIUS_PREC, 0), prec }
    }

    pub fn from_int(prec: u32, n: &BigInt) -> Self {
        Self::exact(Float::with_val(prec, to_rug(n)), prec)
    }

    pub fn from_rational(prec: u32, q: &BigRational) -> Self {
        Self::exact(float_from_rational(prec, q), prec)
    }

    pub fn from_u32(prec: u32, n: u32) -> Self {
        Self { mid: Float::with_val(prec, n), rad: Float::with_val(RADIUS_PREC, 0), prec }
    }

    pub fn pi(prec: u32) -> Self {
        Self::exact(Float::with_val(prec, Constant::Pi), prec)
    }

    /// `2^(e/2)` as a ball; exact powers of sqrt(2) appear in the
    /// denominator bookkeeping.
    pub fn sqrt2_pow(prec: u32, e: i32) -> Self {
        let two_e = Float::with_val(prec, Float::i_exp(1, e));
        Self::exact(two_e.sqrt(), prec)
    }

    pub fn neg(&self) -> Self {
        Self { mid: Float::with_val(self.prec, -&self.mid), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        Self { mid: self.mid.clone().abs(), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mid = Float::with_val(self.prec, &self.mid + &o.mid);
        let rad = rad_fudge(Float::with_val(RADIUS_PREC, &self.rad + &o.rad) + ulp(&mid, self.prec));
        Self { mid, rad, prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mid = Float::with_val(self.prec, &self.mid * &o.mid);
        let a = Float::with_val(RADIUS_PREC, self.mid.clone().abs());
        let b = Float::with_val(RADIUS_PREC, o.mid.clone().abs());
        let rad = rad_fudge(
            a * &o.rad
                + b * &self.rad
                + Float::with_val(RADIUS_PREC, &self.rad * &o.rad)
                + ulp(&mid, self.prec),
        );
        Self { mid, rad, prec: self.prec }
    }

    /// Division; fails when the divisor ball straddles zero.
    pub fn div(&self, o: &Self) -> Result<Self> {
        let ob = Float::with_val(RADIUS_PREC, o.mid.clone().abs());
        if ob <= o.rad {
            return Err(Error::InvalidArgument("ball division by interval containing 0".into()));
        }
        let mid = Float::with_val(self.prec, &self.mid / &o.mid);
        let a = Float::with_val(RADIUS_PREC, self.mid.clone().abs());
        let num = a * &o.rad + Float::with_val(RADIUS_PREC, &ob * &self.rad);
        let den = Float::with_val(RADIUS_PREC, &ob * Float::with_val(RADIUS_PREC, &ob - &o.rad));
        let rad = rad_fudge(num / den + ulp(&mid, self.prec));
        Ok(Self { mid, rad, prec: self.prec })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::from_u32(self.prec, 1).div(self)
    }

    /// Square root; requires the whole ball to be non-negative.
    pub fn sqrt(&self) -> Result<Self> {
        let lo = Float::with_val(RADIUS_PREC, &self.mid - &self.rad);
        if lo < 0 {
            return Err(Error::NegativeInput("ball sqrt over interval reaching below 0".into()));
        }
        let mid = self.mid.clone().sqrt();
        let rad = if self.rad.is_zero() {
            ulp(&mid, self.prec)
        } else {
            // |sqrt(x) - sqrt(x0)| <= rad / (sqrt(x0 - rad) + sqrt(x0))
            let den = lo.sqrt() + Float::with_val(RADIUS_PREC, &mid);
            rad_fudge(Float::with_val(RADIUS_PREC, &self.rad) / den + ulp(&mid, self.prec))
        };
        Ok(Self { mid, rad, prec: self.prec })
    }

    pub fn exp(&self) -> Self {
        let mid = self.mid.clone().exp();
        // exp is its own derivative; for rad < 1, e^rad - 1 < 2 rad.
        let grow = Float::with_val(RADIUS_PREC, &mid) * Float::with_val(RADIUS_PREC, &self.rad) * 2;
        let rad = rad_fudge(grow + ulp(&mid, self.prec));
        Self { mid, rad, prec: self.prec }
    }

    /// `atan`; |atan'| <= 1 so the radius carries over.
    pub fn atan(&self) -> Self {
        let mid = self.mid.clone().atan();
        let rad = rad_fudge(self.rad.clone() + ulp(&mid, self.prec));
        Self { mid, rad, prec: self.prec }
    }

    pub fn sin(&self) -> Self {
        let mid = self.mid.clone().sin();
        let rad = rad_fudge(self.rad.clone() + ulp(&mid, self.prec));
        Self { mid, rad, prec: self.prec }
    }

    pub fn cos(&self) -> Self {
        let mid = self.mid.clone().cos();
        let rad = rad_fudge(self.rad.clone() + ulp(&mid, self.prec));
        Self { mid, rad, prec: self.prec }
    }

    pub fn pow_i(&self, e: u32) -> Self {
        let mut acc = Self::from_u32(self.prec, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Grows the radius by `extra`; enclosing an interval around the mid.
    pub fn widen(&self, extra: &Float) -> Self {
        let rad = rad_fudge(Float::with_val(RADIUS_PREC, &self.rad + extra));
        Self { mid: self.mid.clone(), rad, prec: self.prec }
    }

    pub fn upper(&self) -> Float {
        Float::with_val(self.prec, &self.mid + &self.rad)
    }

    pub fn lower(&self) -> Float {
        Float::with_val(self.prec, &self.mid - &self.rad)
    }

    /// True when the whole ball lies strictly below the whole of `o`.
    pub fn definitely_lt(&self, o: &Self) -> bool {
        self.upper() < o.lower()
    }

    pub fn definitely_gt(&self, o: &Self) -> bool {
        self.lower() > o.upper()
    }

    /// Three-way strict comparison: `Some(true)` if `self < o` certainly,
    /// `Some(false)` if `self >= o` certainly, `None` if undecided.
    pub fn try_lt(&self, o: &Self) -> Option<bool> {
        if self.definitely_lt(o) {
            Some(true)
        } else if self.lower() >= o.upper() {
            Some(false)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }
}

/// A complex ball: mid-point `(re, im)` plus a Euclidean error radius.
#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: Float,
    pub im: Float,
    pub err: Float,
    prec: u32,
}

impl ComplexBall {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    fn exact2(re: Float, im: Float, prec: u32) -> Self {
        let err =
            Float::with_val(RADIUS_PREC, ulp(&re, prec) + ulp(&im, prec));
        Self { re, im, err, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, 0),
            im: Float::with_val(prec, 0),
            err: Float::with_val(RADIUS_PREC, 0),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, 1),
            im: Float::with_val(prec, 0),
            err: Float::with_val(RADIUS_PREC, 0),
            prec,
        }
    }

    pub fn from_real(r: &RealBall) -> Self {
        Self {
            re: r.mid.clone(),
            im: Float::with_val(r.prec, 0),
            err: r.rad.clone(),
            prec: r.prec,
        }
    }

    pub fn from_gaussian_int(prec: u32, z: &GaussianInt) -> Self {
        Self::exact2(
            Float::with_val(prec, to_rug(&z.re)),
            Float::with_val(prec, to_rug(&z.im)),
            prec,
        )
    }

    pub fn from_gaussian_rational(prec: u32, z: &GaussianRational) -> Self {
        Self::exact2(float_from_rational(prec, &z.re), float_from_rational(prec, &z.im), prec)
    }

    /// `e^(i theta)` for a real ball angle.
    pub fn exp_i(theta: &RealBall) -> Self {
        let prec = theta.prec;
        let re = theta.mid.clone().cos();
        let im = theta.mid.clone().sin();
        // |d/dθ e^(iθ)| = 1.
        let err = rad_fudge(
            theta.rad.clone() + ulp(&re, prec) + ulp(&im, prec),
        );
        Self { re, im, err, prec }
    }

    fn mid_abs(&self) -> Float {
        Float::with_val(RADIUS_PREC, self.re.clone().hypot(&self.im))
    }

    /// `|z|` as a real ball.
    pub fn abs(&self) -> RealBall {
        let mid = self.re.clone().hypot(&self.im);
        let mid = Float::with_val(self.prec, mid);
        let rad = rad_fudge(self.err.clone() + ulp(&mid, self.prec));
        RealBall { mid, rad, prec: self.prec }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: Float::with_val(self.prec, -&self.im), err: self.err.clone(), prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: Float::with_val(self.prec, -&self.re),
            im: Float::with_val(self.prec, -&self.im),
            err: self.err.clone(),
            prec: self.prec,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let re = Float::with_val(self.prec, &self.re + &o.re);
        let im = Float::with_val(self.prec, &self.im + &o.im);
        let err = rad_fudge(
            Float::with_val(RADIUS_PREC, &self.err + &o.err)
                + ulp(&re, self.prec)
                + ulp(&im, self.prec),
        );
        Self { re, im, err, prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = Float::with_val(self.prec, &self.re * &o.re) - Float::with_val(self.prec, &self.im * &o.im);
        let im = Float::with_val(self.prec, &self.re * &o.im) + Float::with_val(self.prec, &self.im * &o.re);
        let a = self.mid_abs();
        let b = o.mid_abs();
        let err = rad_fudge(
            a * &o.err
                + b * &self.err
                + Float::with_val(RADIUS_PREC, &self.err * &o.err)
                + ulp(&re, self.prec)
                + ulp(&im, self.prec),
        );
        Self { re, im, err, prec: self.prec }
    }

    pub fn mul_real(&self, r: &RealBall) -> Self {
        self.mul(&Self::from_real(r))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let ob = o.mid_abs();
        if ob <= o.err {
            return Err(Error::InvalidArgument("complex ball division by ball containing 0".into()));
        }
        let n2 = Float::with_val(self.prec, &o.re * &o.re) + Float::with_val(self.prec, &o.im * &o.im);
        let re = (Float::with_val(self.prec, &self.re * &o.re)
            + Float::with_val(self.prec, &self.im * &o.im))
            / &n2;
        let im = (Float::with_val(self.prec, &self.im * &o.re)
            - Float::with_val(self.prec, &self.re * &o.im))
            / &n2;
        let a = self.mid_abs();
        let num = a * &o.err + Float::with_val(RADIUS_PREC, &ob * &self.err);
        let den = Float::with_val(RADIUS_PREC, &ob * Float::with_val(RADIUS_PREC, &ob - &o.err));
        let err = rad_fudge(num / den + ulp(&re, self.prec) + ulp(&im, self.prec));
        Ok(Self { re, im, err, prec: self.prec })
    }

    pub fn pow_i(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Principal complex power `z^s` for real `s`, via `exp(s log z)`.
    /// Requires a ball bounded away from the branch cut and from zero.
    pub fn pow_real(&self, s: &RealBall) -> Result<Self> {
        let r = self.abs();
        let lo = r.lower();
        if lo <= 0 {
            return Err(Error::InvalidArgument("complex power of ball containing 0".into()));
        }
        // log z = (ln|z|, arg z); arg error <= err / (|z| - err).
        let ln_r = {
            let mid = Float::with_val(self.prec, r.mid.clone().ln());
            let rad = rad_fudge(
                Float::with_val(RADIUS_PREC, &r.rad) / Float::with_val(RADIUS_PREC, &lo)
                    + ulp(&mid, self.prec),
            );
            RealBall { mid, rad, prec: self.prec }
        };
        let arg = {
            let mid = Float::with_val(self.prec, self.im.clone().atan2(&self.re));
            let rad = rad_fudge(
                Float::with_val(RADIUS_PREC, &self.err) / Float::with_val(RADIUS_PREC, &lo)
                    + ulp(&mid, self.prec),
            );
            RealBall { mid, rad, prec: self.prec }
        };
        let mag = s.mul(&ln_r).exp();
        let phase = ComplexBall::exp_i(&s.mul(&arg));
        Ok(phase.mul_real(&mag))
    }

    /// Widens the error radius by `extra` (used by enclosure arguments in
    /// quadrature).
    pub fn widen(&self, extra: &Float) -> Self {
        let err = rad_fudge(self.err.clone() + Float::with_val(RADIUS_PREC, extra));
        Self { re: self.re.clone(), im: self.im.clone(), err, prec: self.prec }
    }
}

/// Argument of an exact Gaussian rational in `(-pi, pi]`, as a ball.
pub fn arg_of_gaussian(prec: u32, z: &GaussianRational) -> Result<RealBall> {
    if z.is_zero() {
        return Err(Error::InvalidArgument("arg(0) is undefined".into()));
    }
    let re = float_from_rational(prec, &z.re);
    let im = float_from_rational(prec, &z.im);
    let mid = im.clone().atan2(&re);
    let scale = Float::with_val(RADIUS_PREC, re.clone().hypot(&im));
    // Both inputs are half-ulp accurate; arg Lipschitz constant is 1/|z|.
    let inrad = Float::with_val(RADIUS_PREC, ulp(&re, prec) + ulp(&im, prec));
    let rad = rad_fudge(inrad / scale + ulp(&mid, prec));
    Ok(RealBall { mid, rad, prec })
}

/// Runs `f` at doubling precision until it returns a decision, starting at
/// `start` bits and giving up beyond `max` bits.
pub fn escalate<T>(start: u32, max: u32, mut f: impl FnMut(u32) -> Option<T>) -> Result<T> {
    let mut prec = start;
    loop {
        if let Some(v) = f(prec) {
            return Ok(v);
        }
        if prec >= max {
            return Err(Error::InvalidArgument(format!(
                "comparison undecided at {prec} bits"
            )));
        }
        prec = (prec * 2).min(max);
    }
}

/// Parses `s` as an exact decimal into a ball at the given precision.
pub fn ball_from_decimal(prec: u32, s: &str) -> RealBall {
    RealBall::from_rational(prec, &crate::arith::rational_from_decimal(s))
}

// Balls are immutable after construction and Float is Send + Sync, so
// sharing across rayon workers is safe.
const _: fn() = || {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<RealBall>();
    assert_send_sync::<ComplexBall>();
};

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rb(prec: u32, v: f64) -> RealBall {
        RealBall::exact(Float::with_val(prec, v), prec)
    }

    #[test]
    fn enclosure_basics() {
        let a = RealBall::from_rational(128, &crate::arith::rational_from_decimal("0.1"));
        let b = RealBall::from_rational(128, &crate::arith::rational_from_decimal("0.2"));
        let s = a.add(&b);
        // 0.1 + 0.2 encloses 0.3.
        let point3 = RealBall::from_rational(128, &crate::arith::rational_from_decimal("0.3"));
        assert!(s.sub(&point3).abs().upper() < 1e-30);
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let r = RealBall::sqrt2_pow(256, 1);
        let two = r.mul(&r);
        let diff = two.sub(&RealBall::from_u32(256, 2)).abs();
        assert!(diff.upper() < 1e-70);
        assert!(diff.upper() <= diff.rad * 4);
    }

    #[test]
    fn precision_doubling_shrinks_radius() {
        // Re-evaluating a pipeline at 2P must shrink err and stay inside
        // the P-bit enclosure.
        let run = |prec: u32| {
            let x = RealBall::from_rational(prec, &BigRational::new(1.into(), 3.into()));
            x.exp().sqrt().unwrap().mul(&RealBall::pi(prec)).sin()
        };
        let lo = run(256);
        let hi = run(512);
        assert!(hi.rad < lo.rad);
        let delta = Float::with_val(64, &hi.mid - &lo.mid).abs();
        assert!(delta <= Float::with_val(64, &lo.rad + &hi.rad));
    }

    #[test]
    fn complex_unit_circle() {
        let theta = rb(256, 1.234);
        let z = ComplexBall::exp_i(&theta);
        let one = z.abs();
        assert!(one.sub(&RealBall::from_u32(256, 1)).abs().upper() < 1e-60);
    }

    #[test]
    fn complex_pow_matches_repeated_mul() {
        let z = ComplexBall::from_gaussian_int(256, &GaussianInt::new(3, 4));
        let p3 = z.pow_i(3);
        let m3 = z.mul(&z).mul(&z);
        assert!(p3.sub(&m3).abs().upper() < 1e-60);
    }

    #[test]
    fn principal_power_fourth_root() {
        // (e^{i}) ^ {1/4} = e^{i/4}
        let theta = rb(256, 1.0);
        let z = ComplexBall::exp_i(&theta);
        let quarter = RealBall::from_rational(256, &BigRational::new(1.into(), 4.into()));
        let w = z.pow_real(&quarter).unwrap();
        let expect = ComplexBall::exp_i(&rb(256, 0.25));
        assert!(w.sub(&expect).abs().upper() < 1e-60);
    }

    #[test]
    fn arg_of_exact_gaussian() {
        let z = GaussianRational::new(BigRational::one(), BigRational::one());
        let phi = arg_of_gaussian(256, &z).unwrap();
        let quarter_pi = RealBall::pi(256).mul(&rb(256, 0.25));
        assert!(phi.sub(&quarter_pi).abs().upper() < 1e-70);
    }

    #[test]
    fn escalation_decides() {
        // (1 + 2^-200) > 1 is undecidable at 64 bits, decided at higher precision.
        let one_plus = BigRational::one()
            + BigRational::new(BigInt::one(), BigInt::from(2u8).pow(200u32));
        let v = escalate(64, 1 << 14, |prec| {
            RealBall::from_rational(prec, &one_plus)
                .try_lt(&RealBall::from_u32(prec, 1))
        })
        .unwrap();
        assert!(!v);
    }
}
