//! Exact expressions in shifted Q-functions.
//!
//! A [`QExpr`] is a sum of [`QMonomial`]s; each monomial is an integer
//! coefficient times a product of factors `Q_a(u + shift)^exp` or
//! `phi(u + shift)^exp`.

mod eval;
mod json;
mod scalar;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{residue, term_residues, to_f64, EvalError, PhiMode, RootAssignment};
pub use json::{expr_from_json, expr_to_json, JsonFactor, JsonTerm};
pub use scalar::{Fp, Scalar, FP_MODULUS};

pub type Rational = BigRational;

/// `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorKind {
    Q(usize),
    Phi,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QFactor {
    pub kind: FactorKind,
    pub shift: Rational,
    pub exp: i32,
}

impl QFactor {
    pub fn q(color: usize, shift: Rational, exp: i32) -> Self {
        QFactor {
            kind: FactorKind::Q(color),
            shift,
            exp,
        }
    }

    pub fn phi(shift: Rational, exp: i32) -> Self {
        QFactor {
            kind: FactorKind::Phi,
            shift,
            exp,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMonomial {
    coef: BigInt,
    factors: Vec<QFactor>,
}

impl QMonomial {
    /// Builds a monomial, merging factors with equal `(kind, shift)` and
    /// dropping those whose exponents cancel.
    pub fn new(coef: BigInt, factors: impl IntoIterator<Item = QFactor>) -> Self {
        let mut merged: BTreeMap<(FactorKind, Rational), i32> = BTreeMap::new();
        for f in factors {
            *merged.entry((f.kind, f.shift)).or_insert(0) += f.exp;
        }
        let factors = merged
            .into_iter()
            .filter(|(_, e)| *e != 0)
            .map(|((kind, shift), exp)| QFactor { kind, shift, exp })
            .collect();
        QMonomial { coef, factors }
    }

    pub fn one() -> Self {
        QMonomial {
            coef: BigInt::one(),
            factors: Vec::new(),
        }
    }

    pub fn coef(&self) -> &BigInt {
        &self.coef
    }

    pub fn factors(&self) -> &[QFactor] {
        &self.factors
    }

    pub fn with_coef(&self, coef: BigInt) -> Self {
        QMonomial {
            coef,
            factors: self.factors.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.with_coef(-&self.coef)
    }

    pub fn mul(&self, other: &QMonomial) -> Self {
        QMonomial::new(
            &self.coef * &other.coef,
            self.factors.iter().chain(other.factors.iter()).cloned(),
        )
    }

    pub fn shifted(&self, d: &Rational) -> Self {
        QMonomial {
            coef: self.coef.clone(),
            factors: self
                .factors
                .iter()
                .map(|f| QFactor {
                    kind: f.kind,
                    shift: &f.shift + d,
                    exp: f.exp,
                })
                .collect(),
        }
    }

    /// Exponent of `kind(u + shift)`, zero when absent.
    pub fn exponent(&self, kind: FactorKind, shift: &Rational) -> i32 {
        self.factors
            .iter()
            .find(|f| f.kind == kind && &f.shift == shift)
            .map_or(0, |f| f.exp)
    }

    /// Total exponent per factor kind.
    pub fn degree_by_kind(&self) -> BTreeMap<FactorKind, i32> {
        let mut out = BTreeMap::new();
        for f in &self.factors {
            *out.entry(f.kind).or_insert(0) += f.exp;
        }
        out
    }

    pub fn is_q_balanced(&self) -> bool {
        self.degree_by_kind()
            .iter()
            .all(|(k, e)| matches!(k, FactorKind::Phi) || *e == 0)
    }
}

fn fmt_shift(f: &mut fmt::Formatter<'_>, shift: &Rational) -> fmt::Result {
    if shift.is_zero() {
        write!(f, "u")
    } else if shift.is_negative() {
        write!(f, "u-{}", -shift)
    } else {
        write!(f, "u+{}", shift)
    }
}

fn fmt_factor(f: &mut fmt::Formatter<'_>, fac: &QFactor, exp: i32) -> fmt::Result {
    match fac.kind {
        FactorKind::Q(a) => write!(f, "Q{}(", a)?,
        FactorKind::Phi => write!(f, "phi(")?,
    }
    fmt_shift(f, &fac.shift)?;
    write!(f, ")")?;
    if exp != 1 {
        write!(f, "^{}", exp)?;
    }
    Ok(())
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num: Vec<&QFactor> = self.factors.iter().filter(|x| x.exp > 0).collect();
        let den: Vec<&QFactor> = self.factors.iter().filter(|x| x.exp < 0).collect();
        if self.coef.is_negative() {
            write!(f, "-")?;
        } else {
            write!(f, "+")?;
        }
        let mag = self.coef.abs();
        if !mag.is_one() || num.is_empty() {
            write!(f, "{}", mag)?;
        }
        for x in &num {
            fmt_factor(f, x, x.exp)?;
        }
        if !den.is_empty() {
            write!(f, "/(")?;
            for x in &den {
                fmt_factor(f, x, -x.exp)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QExpr {
    terms: Vec<QMonomial>,
}

impl QExpr {
    pub fn zero() -> Self {
        QExpr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        QExpr {
            terms: vec![QMonomial::one()],
        }
    }

    pub fn monomial(m: QMonomial) -> Self {
        QExpr { terms: vec![m] }
    }

    /// Keeps the terms as given, without merging.
    pub fn raw(terms: Vec<QMonomial>) -> Self {
        QExpr { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = QMonomial>) -> Self {
        QExpr {
            terms: terms.into_iter().collect(),
        }
        .normalize()
    }

    pub fn terms(&self) -> &[QMonomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Number of terms counted with multiplicity `|coef|`.
    pub fn multiplicity(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.coef.magnitude().to_usize().unwrap_or(usize::MAX))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges monomials with equal factor lists, dropping zero coefficients.
    /// Output is sorted by factor list.
    pub fn normalize(&self) -> Self {
        let mut merged: BTreeMap<Vec<QFactor>, BigInt> = BTreeMap::new();
        for t in &self.terms {
            *merged.entry(t.factors.clone()).or_insert_with(BigInt::zero) += &t.coef;
        }
        QExpr {
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(factors, coef)| QMonomial { coef, factors })
                .collect(),
        }
    }

    pub fn add(&self, other: &QExpr) -> Self {
        QExpr {
            terms: self
                .terms
                .iter()
                .chain(other.terms.iter())
                .cloned()
                .collect(),
        }
        .normalize()
    }

    pub fn sub(&self, other: &QExpr) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QExpr {
            terms: self.terms.iter().map(QMonomial::neg).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        QExpr {
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coef(&t.coef * c))
                .collect(),
        }
        .normalize()
    }

    /// Distributive product without merging equal terms.
    pub fn multiply_raw(&self, other: &QExpr) -> Self {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        QExpr { terms }
    }

    pub fn multiply(&self, other: &QExpr) -> Self {
        self.multiply_raw(other).normalize()
    }

    pub fn mul_monomial(&self, m: &QMonomial) -> Self {
        QExpr {
            terms: self.terms.iter().map(|t| t.mul(m)).collect(),
        }
        .normalize()
    }

    /// Substitutes `u -> u + d`.
    pub fn shift(&self, d: &Rational) -> Self {
        QExpr {
            terms: self.terms.iter().map(|t| t.shifted(d)).collect(),
        }
    }

    /// Distinct `(color, shift)` pairs appearing in some denominator.
    pub fn denominator_sites(&self) -> Vec<(usize, Rational)> {
        let mut sites: Vec<(usize, Rational)> = self
            .terms
            .iter()
            .flat_map(|t| t.factors.iter())
            .filter_map(|f| match f.kind {
                FactorKind::Q(a) if f.exp < 0 => Some((a, f.shift.clone())),
                _ => None,
            })
            .collect();
        sites.sort();
        sites.dedup();
        sites
    }
}

impl fmt::Display for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", t)?;
        }
        Ok(())
    }
}

/// `Q_color(u + shift)^exp` as a one-term expression.
pub fn q(color: usize, shift: Rational, exp: i32) -> QMonomial {
    QMonomial::new(BigInt::one(), [QFactor::q(color, shift, exp)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn box1() -> QMonomial {
        QMonomial::new(
            BigInt::one(),
            [QFactor::q(1, rat(-1, 2), 1), QFactor::q(1, rat(1, 2), -1)],
        )
    }

    #[test]
    fn annihilation() {
        let e = QExpr::raw(vec![box1(), box1().neg()]).normalize();
        assert!(e.is_empty());
    }

    #[test]
    fn doubling_merges_coefficient() {
        let e = QExpr::raw(vec![box1(), box1()]).normalize();
        assert_eq!(e.len(), 1);
        assert_eq!(e.terms()[0].coef(), &BigInt::from(2));
    }

    #[test]
    fn factor_merge_drops_cancelled() {
        let m = QMonomial::new(
            BigInt::one(),
            [
                QFactor::q(2, int(1), 1),
                QFactor::q(2, int(1), -1),
                QFactor::phi(int(0), 2),
            ],
        );
        assert_eq!(m.factors().len(), 1);
        assert!(m.is_q_balanced());
    }

    #[test]
    fn identity_is_neutral() {
        let e = QExpr::from_terms([box1(), box1().shifted(&int(3)).neg()]);
        assert_eq!(e.multiply(&QExpr::one()), e);
    }

    #[test]
    fn shift_round_trip() {
        let e = QExpr::from_terms([box1()]);
        assert_eq!(e.shift(&int(0)), e);
        assert_eq!(e.shift(&rat(7, 3)).shift(&rat(-7, 3)), e);
    }

    #[test]
    fn parse_fractions() {
        assert_eq!(parse_rational("7/2"), Some(rat(7, 2)));
        assert_eq!(parse_rational("-3"), Some(int(-3)));
        assert_eq!(parse_rational("4/-8"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(box1().to_string(), "+Q1(u-1/2)/(Q1(u+1/2))");
        assert_eq!(QExpr::zero().to_string(), "0");
    }

    pub(crate) fn arb_monomial() -> impl Strategy<Value = QMonomial> {
        (
            -3i64..=3,
            prop::collection::vec((1usize..=3, -6i64..=6, -2i32..=2), 0..4),
        )
            .prop_map(|(c, fs)| {
                QMonomial::new(
                    BigInt::from(if c == 0 { 1 } else { c }),
                    fs.into_iter().map(|(a, h, e)| QFactor::q(a, rat(h, 2), e)),
                )
            })
    }

    pub(crate) fn arb_expr() -> impl Strategy<Value = QExpr> {
        prop::collection::vec(arb_monomial(), 0..6).prop_map(QExpr::raw)
    }

    proptest! {
        #[test]
        fn normalize_idempotent(e in arb_expr()) {
            let n = e.normalize();
            prop_assert_eq!(n.normalize(), n);
        }

        #[test]
        fn normalize_order_independent(e in arb_expr()) {
            let mut rev = e.terms().to_vec();
            rev.reverse();
            prop_assert_eq!(QExpr::raw(rev).normalize(), e.normalize());
        }

        #[test]
        fn product_is_commutative(a in arb_expr(), b in arb_expr()) {
            prop_assert_eq!(a.multiply(&b), b.multiply(&a));
        }
    }
}
