use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use super::{PhiMode, Rational};

/// Field used for evaluation: exact rationals, floating complex numbers,
/// or a small prime field.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `None` when `r` has no image (e.g. its denominator vanishes mod p).
    fn from_rational(r: &Rational) -> Option<Self>;

    fn phi(mode: &PhiMode, x: &Self) -> Option<Self> {
        match mode {
            PhiMode::Rational => Some(x.clone()),
            PhiMode::Trigonometric(_) => None,
        }
    }

    fn phi_prime_zero(mode: &PhiMode) -> Option<Self> {
        match mode {
            PhiMode::Rational => Some(Self::one()),
            PhiMode::Trigonometric(_) => None,
        }
    }

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Option<Self> {
        Some(r.clone())
    }
}

impl Scalar for Complex64 {
    fn from_rational(r: &Rational) -> Option<Self> {
        r.to_f64().map(|x| Complex64::new(x, 0.0))
    }

    fn phi(mode: &PhiMode, x: &Self) -> Option<Self> {
        match mode {
            PhiMode::Rational => Some(*x),
            PhiMode::Trigonometric(q) => {
                let l = q.ln();
                let qx = (x * l).exp();
                Some((qx - qx.inv()) / (q - 1.0 / q))
            }
        }
    }

    fn phi_prime_zero(mode: &PhiMode) -> Option<Self> {
        match mode {
            PhiMode::Rational => Some(Complex64::one()),
            PhiMode::Trigonometric(q) => Some(Complex64::new(2.0 * q.ln() / (q - 1.0 / q), 0.0)),
        }
    }

    fn powi(&self, e: u32) -> Self {
        Complex64::powu(self, e)
    }
}

pub const FP_MODULUS: u64 = 10007;

/// Residues modulo [`FP_MODULUS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u64);

impl Fp {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(FP_MODULUS as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn inv(self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        let mut base = self.0;
        let mut e = FP_MODULUS - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % FP_MODULUS;
            }
            base = base * base % FP_MODULUS;
            e >>= 1;
        }
        Some(Fp(acc))
    }

    /// Every element of the field, in increasing order.
    pub fn all() -> impl Iterator<Item = Fp> {
        (0..FP_MODULUS).map(Fp)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        Fp((self.0 + o.0) % FP_MODULUS)
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        Fp((self.0 + FP_MODULUS - o.0) % FP_MODULUS)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(self.0 * o.0 % FP_MODULUS)
    }
}

impl Div for Fp {
    type Output = Fp;
    fn div(self, o: Fp) -> Fp {
        self * o.inv().expect("division by zero in Fp")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp((FP_MODULUS - self.0) % FP_MODULUS)
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp(1)
    }
}

impl Scalar for Fp {
    fn from_rational(r: &Rational) -> Option<Self> {
        let m = num_bigint::BigInt::from(FP_MODULUS);
        let n = (r.numer() % &m + &m) % &m;
        let d = (r.denom() % &m + &m) % &m;
        let n = Fp(n.to_u64()?);
        let d = Fp(d.to_u64()?);
        Some(n * d.inv()?)
    }
}
