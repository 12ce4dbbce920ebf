//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Every coefficient in the engine is a [`Rat`]; character values and
//! twisted-module matrices additionally need fourth roots of unity, which
//! live in [`GaussRat`] (the field `Q(i)`).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number in canonical reduced form.
pub type Rat = num_rational::BigRational;

/// `n` as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational.
pub fn ratq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact power of two, `2^e`, for any integer exponent.
pub fn pow2(e: i64) -> Rat {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

/// Generalized binomial coefficient `binom(top, k)` with rational top.
pub fn binom_rat(top: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    let mut t = top.clone();
    for i in 0..k {
        acc *= &t;
        acc /= rat(i as i64 + 1);
        t -= Rat::one();
    }
    acc
}

/// Binomial coefficient with integer (possibly negative) top.
pub fn binom_int(top: i64, k: u64) -> Rat {
    binom_rat(&rat(top), k)
}

/// Renders a rational as `p/q` (always with the explicit denominator).
pub fn rat_string(x: &Rat) -> String {
    use alloc::format;
    format!("{}/{}", x.numer(), x.denom())
}

/// An element of `Q(i)`: `re + im*i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussRat { re, im: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Squared modulus `re^2 + im^2` (a rational).
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero in Q(i)");
        GaussRat { re: &self.re / &n, im: -(&self.im / &n) }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        GaussRat { re: &self.re * r, im: &self.im * r }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl Mul<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        // Shortcut the (common) purely real cases.
        if self.im.is_zero() {
            return rhs.scale(&self.re);
        }
        if rhs.im.is_zero() {
            return self.scale(&rhs.re);
        }
        GaussRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        (&self) * (&rhs)
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, rhs: &GaussRat) {
        *self = (&*self) * rhs;
    }
}

impl fmt::Display for GaussRat {
    /// `p/q` when real, otherwise `p/q+r/s*i` (with the sign folded in).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}/{}", self.re.numer(), self.re.denom());
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        let abs_im = self.im.abs();
        write!(
            f,
            "{}/{}{}{}/{}*i",
            self.re.numer(),
            self.re.denom(),
            sign,
            abs_im.numer(),
            abs_im.denom()
        )
    }
}

/// Coefficient abstraction shared by the untwisted (rational) and twisted
/// (Gaussian-rational) state spaces.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Zero + One {
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rat(r: Rat) -> Self;
    fn mul_rat(&self, r: &Rat) -> Self;
}

impl Coeff for Rat {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn mul_rat(&self, r: &Rat) -> Self {
        self * r
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::from_int(1)
    }
}

impl Coeff for GaussRat {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
    fn from_rat(r: Rat) -> Self {
        GaussRat::from_rat(r)
    }
    fn mul_rat(&self, r: &Rat) -> Self {
        self.scale(r)
    }
}

/// All integer partitions of `n` (parts descending), including the empty
/// partition of 0.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let top = max_part.min(remaining);
        for part in (1..=top).rev() {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// The coefficient `1 / prod_k (k^{m_k} m_k!)` attached to a partition in
/// the expansion `exp(sum_k x_k y^k / k) = sum_r p_r y^r`; the parts of the
/// partition are given doubled (`part2 = 2k`), so that integer and
/// half-integer gradings share one code path.
pub fn partition_weight_half(parts2: &[u32]) -> Rat {
    let mut denom = Rat::one();
    let mut i = 0;
    while i < parts2.len() {
        let part = parts2[i];
        let mut mult = 0u64;
        while i < parts2.len() && parts2[i] == part {
            mult += 1;
            i += 1;
        }
        // k = part/2 as a rational; contributes k^mult * mult!.
        let k = ratq(part as i64, 2);
        for j in 0..mult {
            denom *= &k;
            denom *= rat(j as i64 + 1);
        }
    }
    Rat::one() / denom
}

/// Partitions of the doubled total `total2` into doubled parts drawn from
/// the arithmetic progression `{step2, step2 + stride2, ...}`.
///
/// With `step2 = 2, stride2 = 2` this enumerates ordinary partitions
/// (doubled); with `step2 = 1, stride2 = 2` it enumerates partitions into
/// half-integer parts `1/2, 3/2, 5/2, ...` as needed in the twisted sector.
pub fn partitions_doubled(total2: u32, odd_parts_only: bool) -> Vec<Vec<u32>> {
    fn go(
        remaining: u32,
        max_part: u32,
        odd_only: bool,
        prefix: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let top = max_part.min(remaining);
        let mut part = top;
        loop {
            if part == 0 {
                break;
            }
            if !odd_only || part % 2 == 1 {
                prefix.push(part);
                go(remaining - part, part, odd_only, prefix, out);
                prefix.pop();
            }
            part -= 1;
        }
    }
    let mut out = Vec::new();
    go(total2, total2, odd_parts_only, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_matches_both_signs() {
        assert_eq!(pow2(0), rat(1));
        assert_eq!(pow2(5), rat(32));
        assert_eq!(pow2(-3), ratq(1, 8));
    }

    #[test]
    fn binom_half_values() {
        // binom(1/2, k) for k = 0..4: 1, 1/2, -1/8, 1/16, -5/128
        let half = ratq(1, 2);
        assert_eq!(binom_rat(&half, 0), rat(1));
        assert_eq!(binom_rat(&half, 1), ratq(1, 2));
        assert_eq!(binom_rat(&half, 2), ratq(-1, 8));
        assert_eq!(binom_rat(&half, 3), ratq(1, 16));
        assert_eq!(binom_rat(&half, 4), ratq(-5, 128));
    }

    #[test]
    fn binom_negative_top() {
        assert_eq!(binom_int(-1, 3), rat(-1));
        assert_eq!(binom_int(-2, 2), rat(3));
    }

    #[test]
    fn gauss_arithmetic() {
        let i = GaussRat::i();
        assert_eq!((&i * &i), GaussRat::from_int(-1));
        let z = GaussRat::new(ratq(1, 2), ratq(-3, 4));
        let w = &z * &z.inv();
        assert_eq!(w, GaussRat::one());
    }

    #[test]
    fn gauss_display_format() {
        use alloc::string::ToString;
        assert_eq!(GaussRat::from_rat(ratq(3, 4)).to_string(), "3/4");
        assert_eq!(GaussRat::new(ratq(1, 2), ratq(-1, 3)).to_string(), "1/2-1/3*i");
        assert_eq!(GaussRat::i().to_string(), "0/1+1/1*i");
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(0).len(), 1);
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(6).len(), 11);
        // partitions of 5/2 into half-integer parts: (5/2), (3/2,1/2,?)..
        // doubled total 5 into odd parts: 5, 3+1+1, 1*5 -> 3
        assert_eq!(partitions_doubled(5, true).len(), 3);
    }

    #[test]
    fn partition_weights() {
        // partition (1,1) of 2: 1/(1^2 * 2!) = 1/2
        assert_eq!(partition_weight_half(&[2, 2]), ratq(1, 2));
        // partition (2) of 2: 1/2
        assert_eq!(partition_weight_half(&[4]), ratq(1, 2));
        // half-integer partition (1/2,1/2) : 1/((1/2)^2 * 2!) = 2
        assert_eq!(partition_weight_half(&[1, 1]), rat(2));
    }
}
