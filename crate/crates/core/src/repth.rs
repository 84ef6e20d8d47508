//! Weights, Kac-Dynkin labels, typicality and dimensions of irreducible
//! C(s) modules, plus the conjectured term counts `N_m^(a)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::qalgebra::{int, parse_rational, rat, Rational};
use crate::rootdata::BasisVector;
use crate::tableaux::binom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("label b_{index} = {value} must be a nonnegative integer")]
    NotFinite { index: usize, value: Rational },
    #[error("weight is atypical for {0}")]
    Atypical(String),
    #[error("weight is typical")]
    Typical,
    #[error("weight is atypical for several odd roots: {0}")]
    MultiplyAtypical(String),
    #[error("dimension formula returned the non-integer {0}")]
    NonInteger(Rational),
    #[error("cannot parse label {0:?}")]
    BadLabel(String),
    #[error("rank s = {0} is not supported (need s >= 2)")]
    BadRank(usize),
    #[error("index a = {a} outside 1..={s}")]
    BadIndex { a: usize, s: usize },
}

/// `Λ = Λ_1 ε + Σ Λ̄_i δ_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    pub lam1: Rational,
    pub lbar: Vec<Rational>,
}

impl Weight {
    pub fn new(lam1: Rational, lbar: Vec<Rational>) -> Self {
        Weight { lam1, lbar }
    }

    pub fn zero(s: usize) -> Self {
        Weight {
            lam1: Rational::zero(),
            lbar: vec![Rational::zero(); s - 1],
        }
    }

    pub fn rank(&self) -> usize {
        self.lbar.len() + 1
    }

    /// `ω_a`: `ε` for `a = 1`, `-ε + δ_1 + ... + δ_{a-1}` otherwise.
    pub fn fundamental(s: usize, a: usize) -> Self {
        let mut w = Weight::zero(s);
        if a == 1 {
            w.lam1 = Rational::one();
        } else {
            w.lam1 = -Rational::one();
            for x in w.lbar.iter_mut().take(a - 1) {
                *x = Rational::one();
            }
        }
        w
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight {
            lam1: &self.lam1 + &o.lam1,
            lbar: self.lbar.iter().zip(&o.lbar).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Weight {
        Weight {
            lam1: &self.lam1 * c,
            lbar: self.lbar.iter().map(|x| x * c).collect(),
        }
    }

    pub fn to_basis(&self) -> BasisVector {
        let mut coeffs = vec![self.lam1.clone()];
        coeffs.extend(self.lbar.iter().cloned());
        BasisVector { coeffs }
    }

    pub fn from_basis(v: &BasisVector) -> Self {
        Weight {
            lam1: v.coeffs[0].clone(),
            lbar: v.coeffs[1..].to_vec(),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_basis().fmt(f)
    }
}

/// Kac-Dynkin labels `(b_1, ..., b_s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct KacDynkin {
    #[serde(serialize_with = "ser_labels")]
    pub b: Vec<Rational>,
}

fn ser_labels<S: serde::Serializer>(b: &[Rational], ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_seq(b.iter().map(|x| x.to_string()))
}

impl KacDynkin {
    pub fn new(b: Vec<Rational>) -> Self {
        KacDynkin { b }
    }

    pub fn from_ints(b: &[i64]) -> Self {
        KacDynkin {
            b: b.iter().map(|&x| int(x)).collect(),
        }
    }

    /// Parses space or comma separated labels; `b_1` may be a fraction.
    pub fn parse(src: &str) -> Result<Self, RepError> {
        let b = src
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_rational(t).ok_or_else(|| RepError::BadLabel(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KacDynkin { b })
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    /// `b_j ∈ Z_{>=0}` for every `j != 1`.
    pub fn check_finite(&self) -> Result<(), RepError> {
        for (j, x) in self.b.iter().enumerate().skip(1) {
            if !x.is_integer() || x.is_negative() {
                return Err(RepError::NotFinite {
                    index: j + 1,
                    value: x.clone(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for KacDynkin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.b.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_rank(s: usize) -> Result<(), RepError> {
    if s < 2 {
        return Err(RepError::BadRank(s));
    }
    Ok(())
}

pub fn weight_to_labels(s: usize, w: &Weight) -> Result<KacDynkin, RepError> {
    check_rank(s)?;
    if w.rank() != s {
        return Err(RepError::Dimension {
            expected: s,
            got: w.rank(),
        });
    }
    let l = &w.lbar;
    let mut b = vec![&w.lam1 + &l[0]];
    for j in 2..s {
        b.push(&l[j - 2] - &l[j - 1]);
    }
    b.push(l[s - 2].clone());
    Ok(KacDynkin { b })
}

pub fn labels_to_weight(s: usize, k: &KacDynkin) -> Result<Weight, RepError> {
    check_rank(s)?;
    if k.rank() != s {
        return Err(RepError::Dimension {
            expected: s,
            got: k.rank(),
        });
    }
    let mut lbar = vec![Rational::zero(); s - 1];
    lbar[s - 2] = k.b[s - 1].clone();
    for j in (2..s).rev() {
        lbar[j - 2] = &k.b[j - 1] + &lbar[j - 1];
    }
    Ok(Weight {
        lam1: &k.b[0] - &lbar[0],
        lbar,
    })
}

/// An odd positive root `ε + δ_k` (`plus`) or `ε - δ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OddRoot {
    pub plus: bool,
    pub k: usize,
}

impl fmt::Display for OddRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eps{}delta{}", if self.plus { "+" } else { "-" }, self.k)
    }
}

/// Odd positive roots `α` with `(Λ + ρ | α) = 0`.
pub fn atypical_roots(w: &Weight) -> Vec<OddRoot> {
    let s = w.rank() as i64;
    let e = &w.lam1 - int(s - 1);
    let mut out = Vec::new();
    for (i, lb) in w.lbar.iter().enumerate() {
        let d = lb + int(s - 1 - i as i64);
        for plus in [true, false] {
            // (ε|ε) = 1/2, (δ|δ) = -1/2
            let v = if plus { &e - &d } else { &e + &d };
            if v.is_zero() {
                out.push(OddRoot { plus, k: i + 1 });
            }
        }
    }
    out
}

pub fn is_typical(w: &Weight) -> bool {
    atypical_roots(w).is_empty()
}

fn to_integer(r: Rational) -> Result<BigInt, RepError> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(RepError::NonInteger(r))
    }
}

fn factorial(n: i64) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * int(k))
}

pub fn dim_typical(w: &Weight) -> Result<BigInt, RepError> {
    let roots = atypical_roots(w);
    if let Some(r) = roots.first() {
        return Err(RepError::Atypical(r.to_string()));
    }
    let s = w.rank() as i64;
    let l = |i: i64| &w.lbar[(i - 1) as usize];
    let mut r = int(2).pow(2 * (s as i32 - 1));
    for i in 1..s {
        r *= (l(i) + int(s - i)) / int(s - i);
    }
    for i in 1..s {
        for j in i + 1..s {
            r *= (l(i) - l(j) + int(j - i)) * (l(i) + l(j) + int(2 * s - i - j))
                / int((j - i) * (2 * s - i - j));
        }
    }
    to_integer(r)
}

pub fn dim_atypical(w: &Weight) -> Result<BigInt, RepError> {
    let roots = atypical_roots(w);
    let root = match roots.as_slice() {
        [] => return Err(RepError::Typical),
        [r] => *r,
        many => {
            let names: Vec<String> = many.iter().map(|r| r.to_string()).collect();
            return Err(RepError::MultiplyAtypical(names.join(", ")));
        }
    };
    let s = w.rank() as i64;
    let k = root.k as i64;
    let mut x: Vec<Rational> = (1..s)
        .map(|i| &w.lbar[(i - 1) as usize] + int(s - i))
        .collect();
    if !root.plus {
        x[(k - 1) as usize] = &w.lbar[(k - 1) as usize] + int(s - 1 - k);
    }
    let xi = |i: i64| &x[(i - 1) as usize];
    let mut r = int(2).pow(2 * s as i32 - 3) / factorial(s - 1);
    for i in 1..s {
        r *= factorial(2 * i) / (factorial(s - 1 - i) * factorial(s - 1 + i));
    }
    for i in (1..s).filter(|&i| i != k) {
        r *= xi(i);
    }
    for i in (1..s).filter(|&i| i != k) {
        for j in (i + 1..s).filter(|&j| j != k) {
            r *= (xi(i) - xi(j)) * (xi(i) + xi(j));
        }
    }
    let xk = xi(k);
    let mut total = Rational::zero();
    for j in 0..=2 * s - 3 {
        for l in 0..=j {
            let mut t = Rational::new(BigInt::from(binom(j, l)), BigInt::from(2).pow(j as u32));
            if l % 2 == 1 {
                t = -t;
            }
            t *= xk - int(l);
            for i in (1..s).filter(|&i| i != k) {
                t *= (xk - xi(i) - int(l)) * (xk + xi(i) - int(l));
            }
            total += t;
        }
    }
    if (k - 1) % 2 == 1 {
        total = -total;
    }
    to_integer(r * total)
}

/// Dimension with typicality decided automatically.
pub fn dim(w: &Weight) -> Result<BigInt, RepError> {
    if is_typical(w) {
        dim_typical(w)
    } else {
        dim_atypical(w)
    }
}

pub fn dim_labels(s: usize, k: &KacDynkin) -> Result<BigInt, RepError> {
    k.check_finite()?;
    dim(&labels_to_weight(s, k)?)
}

/// `Λ(c) = c ε` is typical iff `c ∉ {0..s-2} ∪ {s..2s-2}`.
pub fn c_weight_typical(s: usize, c: &Rational) -> bool {
    if !c.is_integer() {
        return true;
    }
    let n = c.to_integer();
    let s = BigInt::from(s);
    let excluded =
        (n >= BigInt::zero() && n <= &s - 2) || (n >= s && n <= BigInt::from(2) * &s - 2);
    !excluded
}

/// `dim V(ε + (a - 2n - 1) δ_1)`, with the even-`a` tail `n = a/2` giving
/// `dim V(0) = 1`.
pub fn column_decomposition_dim(s: usize, a: usize, n: usize) -> Result<BigInt, RepError> {
    check_rank(s)?;
    if 2 * n == a {
        return dim(&Weight::zero(s));
    }
    if 2 * n > a {
        return Ok(BigInt::zero());
    }
    let mut w = Weight::zero(s);
    w.lam1 = Rational::one();
    w.lbar[0] = int(a as i64 - 2 * n as i64 - 1);
    dim(&w)
}

/// Conjugate partition `μ'`.
pub fn conjugate(mu: &[usize]) -> Vec<usize> {
    let top = mu.iter().copied().max().unwrap_or(0);
    (1..=top)
        .map(|i| mu.iter().filter(|&&m| m >= i).count())
        .collect()
}

/// Kac-Dynkin labels attached to the Young superdiagram `μ`.
pub fn diagram_to_labels(s: usize, mu: &[usize]) -> Result<KacDynkin, RepError> {
    check_rank(s)?;
    let mut mu: Vec<usize> = mu.iter().copied().filter(|&m| m > 0).collect();
    mu.sort_unstable_by(|a, b| b.cmp(a));
    let conj = conjugate(&mu);
    let eta = |i: usize| -> i64 { conj.get(i - 1).map_or(0, |&c| (c as i64 - 1).max(0)) };
    let mu1 = mu.first().copied().unwrap_or(0) as i64;
    let mut b = vec![int(mu1 + eta(1))];
    for i in 1..s - 1 {
        b.push(int(eta(i) - eta(i + 1)));
    }
    b.push(int(eta(s - 1)));
    Ok(KacDynkin { b })
}

/// One summand `dim V(-k_1 ω_1 + Σ k_j ω_j)` of the conjectured count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountSummand {
    pub k: Vec<usize>,
    pub labels: KacDynkin,
    pub dim: Option<String>,
    pub note: Option<String>,
}

/// `K_(a,m)`: `k_j >= 0`, `Σ k_j = m`, `k_j` even for `j < a`,
/// `k_a ≡ m (mod 2)`.
pub fn k_set(a: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(a: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == a - 1 {
            if left % 2 == m % 2 {
                let mut v = cur.clone();
                v.push(left);
                out.push(v);
            }
            return;
        }
        for k in (0..=left).step_by(2) {
            cur.push(k);
            rec(a, m, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(a, m, m, &mut Vec::new(), &mut out);
    out
}

/// Summands of `N_m^(a)` for `2 <= a <= s - 1`.
pub fn conjectured_summands(s: usize, a: usize, m: usize) -> Result<Vec<CountSummand>, RepError> {
    check_rank(s)?;
    let mut out = Vec::new();
    for k in k_set(a, m) {
        let mut b = vec![Rational::zero(); s];
        b[0] = -int(k[0] as i64);
        for (j, &kj) in k.iter().enumerate().skip(1) {
            b[j] = int(kj as i64);
        }
        let labels = KacDynkin { b };
        let w = labels_to_weight(s, &labels)?;
        let (d, note) = match dim(&w) {
            Ok(d) => (Some(d.to_string()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(CountSummand {
            k,
            labels,
            dim: d,
            note,
        });
    }
    Ok(out)
}

/// Conjectured number of terms in `T_m^(a)`.
pub fn conjectured_count(s: usize, a: usize, m: usize) -> Result<BigInt, RepError> {
    check_rank(s)?;
    if a == 0 || a > s {
        return Err(RepError::BadIndex { a, s });
    }
    if a == 1 || a == s {
        let w = Weight::fundamental(s, a).scale(&int(m as i64));
        return dim(&w);
    }
    let mut total = BigInt::zero();
    for t in conjectured_summands(s, a, m)? {
        match t.dim {
            Some(d) => total += d.parse::<BigInt>().expect("integer"),
            None => return Err(RepError::MultiplyAtypical(t.note.unwrap_or_default())),
        }
    }
    Ok(total)
}

/// The ε coefficient of `Λ(c)`, as a weight.
pub fn c_weight(s: usize, c: &Rational) -> Weight {
    let mut w = Weight::zero(s);
    w.lam1 = c.clone();
    w
}

/// Known C(3) dimensions: Kac-Dynkin labels and dimension.
pub const C3_DIMENSIONS: [([i64; 3], u64); 25] = [
    ([0, 0, 0], 1),
    ([1, 0, 0], 6),
    ([2, 0, 0], 16),
    ([3, 0, 0], 10),
    ([4, 0, 0], 15),
    ([7, 0, 0], 16),
    ([0, 1, 0], 15),
    ([0, 2, 0], 49),
    ([0, 3, 0], 111),
    ([0, 4, 0], 209),
    ([0, 5, 0], 351),
    ([0, 0, 1], 10),
    ([0, 0, 2], 35),
    ([0, 0, 3], 84),
    ([0, 0, 4], 165),
    ([0, 0, 5], 286),
    ([2, 1, 0], 19),
    ([3, 2, 0], 44),
    ([4, 3, 0], 85),
    ([5, 4, 0], 146),
    ([6, 5, 0], 231),
    ([-2, 1, 0], 64),
    ([-4, 1, 0], 64),
    ([-2, 2, 0], 160),
    ([-2, 3, 0], 320),
];

/// Generic `k` of the row "k 0 0 & 16", away from `{0, 1, 3, 4}`.
pub fn sample_generic_k() -> Vec<Rational> {
    vec![int(-5), int(-2), int(2), rat(7, 2), int(6)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableaux::{count_column_formula, count_row_formula};
    use proptest::prelude::*;

    fn kd(b: &[i64]) -> KacDynkin {
        KacDynkin::from_ints(b)
    }

    #[test]
    fn fundamental_labels() {
        for s in 2..6 {
            for a in 1..=s {
                let b = weight_to_labels(s, &Weight::fundamental(s, a)).unwrap();
                let want: Vec<i64> = (1..=s).map(|j| i64::from(j == a)).collect();
                assert_eq!(b, kd(&want));
            }
        }
    }

    #[test]
    fn label_examples() {
        let s = 3;
        assert_eq!(
            weight_to_labels(s, &c_weight(s, &rat(5, 3))).unwrap().b,
            vec![rat(5, 3), int(0), int(0)]
        );
        for a in 1..6i64 {
            let mut w = Weight::zero(s);
            w.lam1 = int(1);
            w.lbar[0] = int(a - 1);
            assert_eq!(weight_to_labels(s, &w).unwrap(), kd(&[a, a - 1, 0]));
        }
    }

    #[test]
    fn typicality_of_c_family() {
        for s in 2..6usize {
            for c in -3..(2 * s as i64 + 3) {
                let w = c_weight(s, &int(c));
                assert_eq!(is_typical(&w), c_weight_typical(s, &int(c)), "s={s} c={c}");
            }
            assert!(is_typical(&c_weight(s, &rat(1, 2))));
        }
        assert!(is_typical(&c_weight(3, &int(2))));
        assert!(!is_typical(&Weight::zero(3)));
    }

    #[test]
    fn table_dimensions() {
        for (b, d) in C3_DIMENSIONS {
            assert_eq!(
                dim_labels(3, &kd(&b)).unwrap(),
                BigInt::from(d),
                "labels {b:?}"
            );
        }
    }

    #[test]
    fn generic_k_is_sixteen() {
        for k in sample_generic_k() {
            let w = c_weight(3, &k);
            assert_eq!(dim_typical(&w).unwrap(), BigInt::from(16), "k = {k}");
        }
    }

    #[test]
    fn dispatch_errors() {
        assert!(matches!(
            dim_typical(&Weight::zero(3)),
            Err(RepError::Atypical(_))
        ));
        assert_eq!(dim_atypical(&c_weight(3, &int(2))), Err(RepError::Typical));
        assert!(kd(&[0, -1, 0]).check_finite().is_err());
        assert!(dim_labels(3, &kd(&[1, 0])).is_err());
    }

    #[test]
    fn column_decomposition() {
        for a in 0..=6usize {
            let total: BigInt = (0..=a / 2)
                .map(|n| column_decomposition_dim(3, a, n).unwrap())
                .sum();
            assert_eq!(total, BigInt::from(count_column_formula(3, a)), "a = {a}");
        }
        assert_eq!(column_decomposition_dim(3, 4, 0).unwrap(), BigInt::from(85));
    }

    #[test]
    fn rows_match_one_parameter_family() {
        for m in 0..=8usize {
            let d = conjectured_count(3, 1, m).unwrap();
            assert_eq!(d, BigInt::from(count_row_formula(3, m)), "m = {m}");
        }
    }

    #[test]
    fn conjectured_counts_table() {
        let two = [1u64, 15, 65, 175, 385, 735];
        let three = [1u64, 10, 35, 84, 165, 286];
        for m in 0..6 {
            assert_eq!(
                conjectured_count(3, 2, m).unwrap(),
                BigInt::from(two[m]),
                "a=2 m={m}"
            );
            assert_eq!(
                conjectured_count(3, 3, m).unwrap(),
                BigInt::from(three[m]),
                "a=3 m={m}"
            );
        }
        let s = conjectured_summands(3, 2, 5).unwrap();
        let dims: Vec<String> = s.iter().map(|t| t.dim.clone().unwrap()).collect();
        assert_eq!(dims, ["351", "320", "64"]);
    }

    #[test]
    fn inequality_reading_overcounts() {
        let with_le: BigInt = (0..=2usize)
            .filter(|m| m % 2 == 0)
            .flat_map(|m| conjectured_summands(3, 2, m).unwrap())
            .map(|t| t.dim.unwrap().parse::<BigInt>().unwrap())
            .sum();
        assert_eq!(with_le, BigInt::from(66));
        assert_eq!(conjectured_count(3, 2, 2).unwrap(), BigInt::from(65));
    }

    #[test]
    fn diagrams() {
        assert_eq!(diagram_to_labels(3, &[1, 1]).unwrap(), kd(&[2, 1, 0]));
        assert_eq!(diagram_to_labels(3, &[5]).unwrap(), kd(&[5, 0, 0]));
        assert_eq!(diagram_to_labels(3, &[]).unwrap(), kd(&[0, 0, 0]));
        for a in 1..6i64 {
            let col = vec![1usize; a as usize];
            assert_eq!(diagram_to_labels(3, &col).unwrap(), kd(&[a, a - 1, 0]));
        }
        assert_eq!(conjugate(&[3, 1]), vec![2, 1, 1]);
    }

    #[test]
    fn parse_labels() {
        assert_eq!(
            KacDynkin::parse("-7/2 1 0").unwrap().b,
            vec![rat(-7, 2), int(1), int(0)]
        );
        assert_eq!(KacDynkin::parse("2,1,0").unwrap(), kd(&[2, 1, 0]));
        assert!(KacDynkin::parse("a b").is_err());
    }

    #[test]
    fn k_sets() {
        assert_eq!(k_set(2, 3), vec![vec![0, 3], vec![2, 1]]);
        assert_eq!(k_set(2, 0), vec![vec![0, 0]]);
        assert!(k_set(3, 4).iter().all(|k| k.iter().sum::<usize>() == 4));
    }

    proptest! {
        #[test]
        fn labels_round_trip(s in 2usize..6, xs in prop::collection::vec((-40i64..40, 1i64..9), 6)) {
            let lam1 = rat(xs[0].0, xs[0].1);
            let lbar = xs[1..s].iter().map(|&(n, d)| rat(n, d)).collect();
            let w = Weight::new(lam1, lbar);
            let back = labels_to_weight(s, &weight_to_labels(s, &w).unwrap()).unwrap();
            prop_assert_eq!(back, w);
        }

        #[test]
        fn typical_c_weights_have_constant_dim(n in -100i64..100, d in 1i64..7) {
            let c = rat(n, d);
            if c_weight_typical(3, &c) {
                prop_assert_eq!(dim(&c_weight(3, &c)).unwrap(), BigInt::from(16));
            }
        }
    }
}
