//! Continued-fraction solvers for `x^2 - D y^2 = 1, -1, -4` and exact
//! powers of the half-integer unit `alpha = (T_1 + U_1 sqrt(D))/2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};


use crate::arith::{isqrt, perfect_square};
use crate::{Error, Result};

/// Periodic continued fraction of `sqrt(D)`: `(a0; period)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtContinuedFraction {
    pub a0: BigInt,
    pub period: Vec<BigInt>,
}

/// Expands `sqrt(D)` for non-square `D > 1`.
pub fn continued_fraction_sqrt(d: &BigInt) -> Result<SqrtContinuedFraction> {
    check_discriminant(d)?;
    let a0 = isqrt(d)?;
    let mut m = BigInt::zero();
    let mut den = BigInt::one();
    let mut a = a0.clone();
    let mut period = Vec::new();
    // The period of sqrt(D) ends exactly when a_k = 2 a_0.
    let two_a0 = &a0 * 2;
    loop {
        m = &a * &den - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        period.push(a.clone());
        if a == two_a0 {
            return Ok(SqrtContinuedFraction { a0, period });
        }
    }
}

fn check_discriminant(d: &BigInt) -> Result<()> {
    if d <= &BigInt::one() {
        return Err(Error::InvalidArgument(format!("D = {d} must exceed 1")));
    }
    if perfect_square(d).is_some() {
        return Err(Error::SquareDiscriminant(d.to_string()));
    }
    Ok(())
}

/// Fundamental solutions of the three Pell norms for a discriminant `D`.
#[derive(Debug, Clone)]
pub struct PellData {
    pub d: BigInt,
    /// Minimal positive solution of `x^2 - D y^2 = 1`.
    pub fund_plus: (BigInt, BigInt),
    /// Minimal positive solution of `x^2 - D y^2 = -1`, when solvable.
    pub fund_minus: Option<(BigInt, BigInt)>,
    /// Minimal positive solution `(T_1, U_1)` of `x^2 - D y^2 = -4`,
    /// when solvable.
    pub t1u1: Option<(BigInt, BigInt)>,
    /// Continued-fraction period length of `sqrt(D)`.
    pub period_len: usize,
}

impl PellData {
    /// The unit `(T_1, U_1)`; errors when `x^2 - D y^2 = -4` is
    /// unsolvable, in which case the paper's theorems do not apply.
    pub fn alpha(&self) -> Result<&(BigInt, BigInt)> {
        self.t1u1
            .as_ref()
            .ok_or_else(|| Error::MinusFourUnsolvable(self.d.to_string()))
    }
}

/// Solves all three Pell norms by one continued-fraction expansion.
pub fn solve_pell(d: &BigInt) -> Result<PellData> {
    let cf = continued_fraction_sqrt(d)?;
    let len = cf.period.len();

    // Convergent at the end of the period: p^2 - D q^2 = (-1)^len.
    let (p, q) = convergent_through(&cf, len - 1);
    let (fund_plus, fund_minus) = if len % 2 == 1 {
        let minus = (p.clone(), q.clone());
        // (x + y sqrt(D))^2 for the norm -1 unit.
        let plus = (&p * &p * 2 + 1, &p * &q * 2);
        (plus, Some(minus))
    } else {
        ((p, q), None)
    };

    let t1u1 = match &fund_minus {
        Some((x, y)) => Some(minimal_minus_four(d, x, y)),
        // For D = 0 mod 4 the -1 equation is unsolvable, but -4 reduces
        // to x = 2m with m^2 - (D/4) y^2 = -1 (e.g. D = 8: (2, 1)).
        None if (d % 4u8).is_zero() => {
            let d4 = d / 4;
            if d4 > BigInt::one() && perfect_square(&d4).is_none() {
                solve_pell(&d4)?.fund_minus.map(|(m, y)| (m * 2, y))
            } else {
                None
            }
        }
        None => None,
    };

    Ok(PellData { d: d.clone(), fund_plus, fund_minus, t1u1, period_len: len })
}

/// Minimal `(T, U)` with `T^2 - D U^2 = -4`, given the fundamental
/// solution of the `-1` equation.
///
/// An odd solution, when one exists, is the cube root of the norm `-1`
/// unit inside the half-integer order; it requires `D = 5 mod 8`.
fn minimal_minus_four(d: &BigInt, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
    if (d % 8u8) == BigInt::from(5u8) {
        // eta^3 = x + y sqrt(D) with eta = (t + u sqrt(D))/2 implies
        // t^3 + 3t = 2x and u (t^2 + 1) = 2y.
        let two_x: BigInt = x * 2;
        let seed = two_x.cbrt();
        for delta in -2i8..=2 {
            let t = &seed + BigInt::from(delta);
            if t.is_positive() && &t * &t * &t + &t * 3 == two_x {
                let den = &t * &t + 1;
                let two_y: BigInt = y * 2;
                let (u, rem) = two_y.div_rem(&den);
                if rem.is_zero() && &t * &t - d * &u * &u == BigInt::from(-4) {
                    return (t, u);
                }
            }
        }
    }
    (x * 2, y * 2)
}

/// Numerator/denominator of the `k`-th convergent of the expansion
/// (indices run over `a0, period[0], period[1], ...` cyclically).
fn convergent_through(cf: &SqrtContinuedFraction, upto: usize) -> (BigInt, BigInt) {
    let mut p_prev = BigInt::one();
    let mut p = cf.a0.clone();
    let mut q_prev = BigInt::zero();
    let mut q = BigInt::one();
    for i in 0..upto {
        let a = &cf.period[i % cf.period.len()];
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
    }
    (p, q)
}

/// `alpha^k = (T_k + U_k sqrt(D)) / 2` with exact integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellPower {
    pub k: u64,
    pub t: BigInt,
    pub u: BigInt,
}

/// Multiplication in the ring of half-integer pairs `(t + u sqrt(D))/2`
/// with `t = u mod 2`; the product of two such elements stays in the ring.
fn half_mul(d: &BigInt, a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    let t = (&a.0 * &b.0 + d * &a.1 * &b.1) / 2;
    let u = (&a.0 * &b.1 + &a.1 * &b.0) / 2;
    (t, u)
}

/// Exact `(T_k, U_k)` by binary exponentiation; never a floating
/// recurrence, since the census reaches coordinates of thousands of bits.
pub fn alpha_power(pd: &PellData, k: u64) -> Result<PellPower> {
    let alpha = pd.alpha()?.clone();
    let mut acc = (BigInt::from(2), BigInt::zero()); // alpha^0 = 1
    let mut base = alpha;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = half_mul(&pd.d, &acc, &base);
        }
        base = half_mul(&pd.d, &base, &base);
        e >>= 1;
    }
    Ok(PellPower { k, t: acc.0, u: acc.1 })
}

/// Multiplies an existing power by `alpha`, for iterating `k -> k+1`.
pub fn alpha_step(pd: &PellData, p: &PellPower) -> Result<PellPower> {
    let alpha = pd.alpha()?;
    let (t, u) = half_mul(&pd.d, &(p.t.clone(), p.u.clone()), alpha);
    Ok(PellPower { k: p.k + 1, t, u })
}

/// The coefficient `c` with `U_{k+2} = c U_{k+1} + U_k` as satisfied by
/// the exactly computed sequence. Exact multiplication by `alpha` gives
/// `c = T_1`; the value is derived from the data rather than assumed, and
/// cross-checked on a second index.
pub fn recurrence_coefficient(pd: &PellData) -> Result<BigInt> {
    let u: Vec<BigInt> = (1..=4)
        .map(|k| alpha_power(pd, k).map(|p| p.u))
        .collect::<Result<_>>()?;
    if u[1].is_zero() {
        return Err(Error::InvalidArgument("degenerate unit".into()));
    }
    let (c, rem) = (&u[2] - &u[0]).div_rem(&u[1]);
    if !rem.is_zero() || &u[3] != &(&c * &u[2] + &u[1]) {
        return Err(Error::MethodMismatch(
            "U_k does not satisfy a fixed three-term recurrence".into(),
        ));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn classic_expansions() {
        let cf = continued_fraction_sqrt(&big(2)).unwrap();
        assert_eq!(cf.a0, big(1));
        assert_eq!(cf.period, vec![big(2)]);

        let cf = continued_fraction_sqrt(&big(10)).unwrap();
        assert_eq!(cf.a0, big(3));
        assert_eq!(cf.period, vec![big(6)]);

        assert!(continued_fraction_sqrt(&big(9)).is_err());
        assert!(continued_fraction_sqrt(&big(1)).is_err());
    }

    #[test]
    fn negative_pell_for_986() {
        // (31, 5) lives over D = 986 where the negative Pell equation is
        // solvable; the period must therefore be odd.
        let pd = solve_pell(&big(986)).unwrap();
        let (x, y) = pd.fund_minus.expect("-1 solvable for 986");
        assert_eq!(&x * &x - big(986) * &y * &y, big(-1));
    }

    #[test]
    fn pell_data_examples() {
        let pd = solve_pell(&big(5)).unwrap();
        assert_eq!(pd.t1u1, Some((big(1), big(1))));

        let pd = solve_pell(&big(2)).unwrap();
        assert_eq!(pd.fund_minus, Some((big(1), big(1))));
        assert_eq!(pd.t1u1, Some((big(2), big(2))));

        let pd = solve_pell(&big(10)).unwrap();
        assert_eq!(pd.fund_plus, (big(19), big(6)));
        assert_eq!(pd.fund_minus, Some((big(3), big(1))));
        assert_eq!(pd.t1u1, Some((big(6), big(2))));
    }

    #[test]
    fn alpha_powers_for_d5() {
        let pd = solve_pell(&big(5)).unwrap();
        let p0 = alpha_power(&pd, 0).unwrap();
        assert_eq!((p0.t, p0.u), (big(2), big(0)));
        let p2 = alpha_power(&pd, 2).unwrap();
        assert_eq!((p2.t, p2.u), (big(3), big(1)));
        let p4 = alpha_power(&pd, 4).unwrap();
        assert_eq!((p4.t.clone(), p4.u.clone()), (big(7), big(3)));
        assert_eq!(&p4.t * &p4.t - big(5) * &p4.u * &p4.u, big(4));
    }

    #[test]
    fn doubling_identities() {
        // T_2k = (T_k^2 + D U_k^2)/2 and U_2k = T_k U_k, for several D.
        for d in [5i64, 10, 13, 986, 442] {
            let d = big(d);
            let pd = match solve_pell(&d) {
                Ok(pd) if pd.t1u1.is_some() => pd,
                _ => continue,
            };
            for k in 0..=50u64 {
                let pk = alpha_power(&pd, k).unwrap();
                let p2k = alpha_power(&pd, 2 * k).unwrap();
                assert_eq!(p2k.t, (&pk.t * &pk.t + &d * &pk.u * &pk.u) / 2);
                assert_eq!(p2k.u, &pk.t * &pk.u);
            }
        }
    }

    #[test]
    fn norm_alternates() {
        let d = big(986);
        let pd = solve_pell(&d).unwrap();
        for k in 0..=200u64 {
            let p = alpha_power(&pd, k).unwrap();
            let sign = if k % 2 == 0 { big(4) } else { big(-4) };
            assert_eq!(&p.t * &p.t - &d * &p.u * &p.u, sign);
        }
    }

    #[test]
    fn recurrence_has_coefficient_t1() {
        // The computed sequence satisfies U_{k+2} = T_1 U_{k+1} + U_k,
        // not the doubled coefficient.
        for d in [5i64, 2, 10, 986] {
            let pd = solve_pell(&big(d)).unwrap();
            let c = recurrence_coefficient(&pd).unwrap();
            assert_eq!(c, pd.t1u1.as_ref().unwrap().0);
        }
    }

    #[test]
    fn minus_four_without_minus_one() {
        // D = 8: -1 is unsolvable but (2, 1) solves -4, through D/4 = 2.
        let pd = solve_pell(&big(8)).unwrap();
        assert_eq!(pd.fund_minus, None);
        assert_eq!(pd.t1u1, Some((big(2), big(1))));
        // D = 12: D/4 = 3 has no -1 solution, so -4 stays unsolvable.
        let pd = solve_pell(&big(12)).unwrap();
        assert_eq!(pd.t1u1, None);
    }

    #[test]
    fn minus_exists_iff_period_odd() {
        for d in 2..400 {
            let d = big(d);
            if perfect_square(&d).is_some() {
                continue;
            }
            let pd = solve_pell(&d).unwrap();
            assert_eq!(pd.fund_minus.is_some(), pd.period_len % 2 == 1, "D = {d}");
        }
    }
}
