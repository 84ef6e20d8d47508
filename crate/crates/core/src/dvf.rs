//! Dressed vacuum forms: boxes, column and row tableau sums, the deformed
//! family `cal T_c`, fundamental DVFs, and the sl(1|2) functions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::qalgebra::{int, parse_rational, rat, FactorKind, QExpr, QFactor, QMonomial, Rational};
use crate::qalgebra::{EvalError, PhiMode, RootAssignment};
use crate::rootdata::{AlgebraId, VacuumSpec};
use crate::tableaux::{enumerate_column, enumerate_row, Letter, Shape, Tableau};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DvfError {
    #[error("rank s = {0} is not supported (need s >= 2)")]
    BadRank(usize),
    #[error("{0} requires the trivial vacuum")]
    NeedsTrivialVacuum(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("cannot parse DVF spec {0:?}")]
    BadSpec(String),
    #[error("{kind} is not defined for algebra {alg}")]
    WrongAlgebra { kind: String, alg: AlgebraId },
}

fn check_rank(s: usize) -> Result<(), DvfError> {
    if s < 2 {
        return Err(DvfError::BadRank(s));
    }
    Ok(())
}

fn half(n: i64) -> Rational {
    rat(n, 2)
}

/// `Q_a(u + shift)^exp`, or nothing when `a` is `0` or `s + 1`.
fn qf(s: usize, a: usize, shift: Rational, exp: i32) -> Option<QFactor> {
    (a >= 1 && a <= s).then(|| QFactor::q(a, shift, exp))
}

fn vacuum_factors(s: usize, l: Letter) -> Vec<QFactor> {
    let s = s as i64;
    let (x, y) = match (l.index, l.barred) {
        (1, false) => (int(1), int(1 - s)),
        (1, true) => (int(0), int(-s)),
        _ => (int(0), int(1 - s)),
    };
    vec![QFactor::phi(x, 1), QFactor::phi(y, 1)]
}

/// The box `[l]_u` with its vacuum part, coefficient `+1`.
pub fn box_monomial(s: usize, l: Letter, vacuum: VacuumSpec) -> QMonomial {
    let si = s as i64;
    let a = l.index;
    let ai = a as i64;
    let mut fs: Vec<Option<QFactor>> = Vec::new();
    match (a, l.barred) {
        (1, false) => {
            fs.push(qf(s, 1, half(-1), 1));
            fs.push(qf(s, 1, half(1), -1));
        }
        (1, true) => {
            fs.push(qf(s, 1, half(3 - 2 * si), 1));
            fs.push(qf(s, 1, half(1 - 2 * si), -1));
        }
        (_, false) if a == s => {
            fs.push(qf(s, s - 1, half(1 - si), 1));
            fs.push(qf(s, s, half(5 - si), 1));
            fs.push(qf(s, s - 1, half(3 - si), -1));
            fs.push(qf(s, s, half(1 - si), -1));
        }
        (_, true) if a == s => {
            fs.push(qf(s, s - 1, half(1 - si), 1));
            fs.push(qf(s, s, half(-3 - si), 1));
            fs.push(qf(s, s - 1, half(-1 - si), -1));
            fs.push(qf(s, s, half(1 - si), -1));
        }
        (_, false) => {
            fs.push(qf(s, a - 1, half(1 - ai), 1));
            fs.push(qf(s, a, half(4 - ai), 1));
            fs.push(qf(s, a - 1, half(3 - ai), -1));
            fs.push(qf(s, a, half(2 - ai), -1));
        }
        (_, true) => {
            let b = 2 * si - ai;
            fs.push(qf(s, a - 1, half(1 - b), 1));
            fs.push(qf(s, a, half(-2 - b), 1));
            fs.push(qf(s, a - 1, half(-1 - b), -1));
            fs.push(qf(s, a, half(-b), -1));
        }
    }
    let mut factors: Vec<QFactor> = fs.into_iter().flatten().collect();
    if vacuum == VacuumSpec::Fundamental {
        factors.extend(vacuum_factors(s, l));
    }
    QMonomial::new(BigInt::one(), factors)
}

pub fn box_expr(s: usize, l: Letter, vacuum: VacuumSpec) -> QExpr {
    QExpr::monomial(box_monomial(s, l, vacuum))
}

/// One term of a DVF together with the tableau that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DvfTerm {
    pub tableau: Tableau,
    #[serde(skip)]
    pub monomial: QMonomial,
}

/// Signed product of boxes, the `k`-th box evaluated at `u + shifts[k]`.
fn tableau_monomial(s: usize, t: &Tableau, shifts: &[Rational], vacuum: VacuumSpec) -> QMonomial {
    let mut m = QMonomial::one().with_coef(BigInt::from(t.sign()));
    for (l, h) in t.entries.iter().zip(shifts) {
        m = m.mul(&box_monomial(s, *l, vacuum).shifted(h));
    }
    m
}

/// `(a-1)/2, (a-3)/2, ..., -(a-1)/2`.
fn column_shifts(a: usize) -> Vec<Rational> {
    (0..a as i64).map(|k| half(a as i64 - 1 - 2 * k)).collect()
}

fn row_shifts(m: usize) -> Vec<Rational> {
    (0..m as i64)
        .map(|k| half(2 * k - (m as i64 - 1)))
        .collect()
}

pub fn column_terms(s: usize, a: usize, vacuum: VacuumSpec) -> Result<Vec<DvfTerm>, DvfError> {
    check_rank(s)?;
    let sh = column_shifts(a);
    Ok(enumerate_column(s, a)
        .into_iter()
        .map(|t| DvfTerm {
            monomial: tableau_monomial(s, &t, &sh, vacuum),
            tableau: t,
        })
        .collect())
}

/// Terms of `T_m^(1)` for `0 <= m <= s - 1`.
pub fn row_terms(s: usize, m: usize, vacuum: VacuumSpec) -> Result<Vec<DvfTerm>, DvfError> {
    check_rank(s)?;
    let sh = row_shifts(m);
    let rows = enumerate_row(s, m).map_err(|e| DvfError::OutOfRange(e.to_string()))?;
    Ok(rows
        .into_iter()
        .map(|t| DvfTerm {
            monomial: tableau_monomial(s, &t, &sh, vacuum),
            tableau: t,
        })
        .collect())
}

fn sum_terms(terms: &[DvfTerm]) -> QExpr {
    QExpr::from_terms(terms.iter().map(|t| t.monomial.clone()))
}

/// `cal T^a(u)`; `cal T^0 = 1`.
pub fn column_dvf(s: usize, a: usize, vacuum: VacuumSpec) -> Result<QExpr, DvfError> {
    Ok(sum_terms(&column_terms(s, a, vacuum)?))
}

/// `T_m^(1)(u)` for any `m >= 0`, deformed beyond `s - 1`.
pub fn row_dvf(s: usize, m: usize, vacuum: VacuumSpec) -> Result<QExpr, DvfError> {
    check_rank(s)?;
    if m < s {
        return Ok(sum_terms(&row_terms(s, m, vacuum)?));
    }
    if vacuum != VacuumSpec::Trivial {
        return Err(DvfError::NeedsTrivialVacuum(format!("row:{m} with m >= s")));
    }
    let cal = deformed(s, &int(m as i64))?;
    if m <= 2 * s - 2 {
        Ok(cal.sub(&row_dvf(s, 2 * s - 2 - m, vacuum)?))
    } else {
        Ok(cal)
    }
}

/// The prefactor `Q_1(u - c/2) / Q_1(u + c/2 - s + 1)` of `cal T_c`.
pub fn deformation_prefactor(s: usize, c: &Rational) -> QMonomial {
    let den = c / int(2) - int(s as i64 - 1);
    QMonomial::new(
        BigInt::one(),
        [QFactor::q(1, -(c / int(2)), 1), QFactor::q(1, den, -1)],
    )
}

/// Monomials of `T_{s-1}^(1)(u + (c-s+1)/2)` before the prefactor is applied.
pub fn deformed_raw_terms(s: usize, c: &Rational) -> Result<Vec<DvfTerm>, DvfError> {
    let d = (c - int(s as i64 - 1)) / int(2);
    Ok(row_terms(s, s - 1, VacuumSpec::Trivial)?
        .into_iter()
        .map(|t| DvfTerm {
            monomial: t.monomial.shifted(&d),
            tableau: t.tableau,
        })
        .collect())
}

/// Terms of `cal T_c`, each still tagged by its `B((s-1)^1)` tableau.
pub fn deformed_terms(s: usize, c: &Rational) -> Result<Vec<DvfTerm>, DvfError> {
    let pre = deformation_prefactor(s, c);
    Ok(deformed_raw_terms(s, c)?
        .into_iter()
        .map(|t| DvfTerm {
            monomial: t.monomial.mul(&pre),
            tableau: t.tableau,
        })
        .collect())
}

/// `cal T_c(u)` for rational `c`, trivial vacuum.
pub fn deformed(s: usize, c: &Rational) -> Result<QExpr, DvfError> {
    Ok(sum_terms(&deformed_terms(s, c)?))
}

/// Whether every monomial of the shifted `T_{s-1}` has `Q_1(u + c/2 - s + 1)`
/// in its numerator.
pub fn divisibility_check(s: usize, c: &Rational) -> Result<bool, DvfError> {
    let site = c / int(2) - int(s as i64 - 1);
    Ok(deformed_raw_terms(s, c)?
        .iter()
        .all(|t| t.monomial.exponent(FactorKind::Q(1), &site) >= 1))
}

/// `T_1^(a) = cal T_{a-2} - T_{a-2}^(1)` for `2 <= a <= s`.
pub fn fundamental_dvf(s: usize, a: usize) -> Result<QExpr, DvfError> {
    check_rank(s)?;
    if !(2..=s).contains(&a) {
        return Err(DvfError::OutOfRange(format!(
            "fundamental index a = {a} outside 2..={s}"
        )));
    }
    Ok(deformed(s, &int(a as i64 - 2))?.sub(&row_dvf(s, a - 2, VacuumSpec::Trivial)?))
}

/// `T_{-m}^(1) := cal T_{-m}` for `m >= 1`.
pub fn negative_row_dvf(s: usize, m: usize) -> Result<QExpr, DvfError> {
    if m == 0 {
        return Err(DvfError::OutOfRange(
            "negative row index must be >= 1".into(),
        ));
    }
    deformed(s, &int(-(m as i64)))
}

/// `T_m^(1)` for any integer `m`: negative values use the deformation.
pub fn row_dvf_signed(s: usize, m: i64) -> Result<QExpr, DvfError> {
    if m < 0 {
        negative_row_dvf(s, m.unsigned_abs() as usize)
    } else {
        row_dvf(s, m as usize, VacuumSpec::Trivial)
    }
}

/// Top monomial `(-1)^{a-1} Q_a(u - 1/t_a) / Q_a(u + 1/t_a)` of `T_1^(a)`.
pub fn fundamental_top(s: usize, a: usize) -> QMonomial {
    let inv_t = if a == s { int(-1) } else { rat(-1, 2) };
    let sign = if a % 2 == 1 { 1 } else { -1 };
    QMonomial::new(
        BigInt::from(sign),
        [QFactor::q(a, -inv_t.clone(), 1), QFactor::q(a, inv_t, -1)],
    )
}

/// Top monomial of `cal T^a`.
pub fn column_top(a: usize) -> QMonomial {
    let ai = a as i64;
    let sign = if a % 2 == 1 { 1 } else { -1 };
    let mut fs = vec![QFactor::q(1, half(-ai), 1), QFactor::q(1, half(ai), -1)];
    if a > 1 {
        fs.push(QFactor::q(2, half(ai - 1), 1));
        fs.push(QFactor::q(2, half(1 - ai), -1));
    }
    QMonomial::new(BigInt::from(sign), fs)
}

/// Top monomial `Q_1(u - m/2) / Q_1(u + m/2)` of `T_m^(1)`.
pub fn row_top(m: &Rational) -> QMonomial {
    let h = m / int(2);
    QMonomial::new(
        BigInt::one(),
        [QFactor::q(1, -h.clone(), 1), QFactor::q(1, h, -1)],
    )
}

/// Invariance of `e` under `u -> -(u - s + 1)` with all roots and
/// inhomogeneities negated. Samples hitting a pole are skipped; an error is
/// returned only if every sample does.
pub fn crossing_check(
    e: &QExpr,
    s: usize,
    a: &RootAssignment,
    samples: &[Rational],
) -> Result<bool, EvalError> {
    if a.phi != PhiMode::Rational {
        return Err(EvalError::UnsupportedPhi);
    }
    let neg = a.negated();
    let mut last_err = None;
    let mut checked = 0;
    for u in samples {
        let v = int(s as i64 - 1) - u;
        match (e.evaluate(a, u), e.evaluate(&neg, &v)) {
            (Ok(x), Ok(y)) => {
                if x != y {
                    return Ok(false);
                }
                checked += 1;
            }
            (Err(err), _) | (_, Err(err)) => last_err = Some(err),
        }
    }
    match (checked, last_err) {
        (0, Some(err)) => Err(err),
        _ => Ok(true),
    }
}

/// Compact term data: each factor is `(color, k, e, exp)` standing for
/// `Q_color(u + (k + e c)/2)^exp`.
type FixtureTerm = (i64, &'static [(usize, i64, i64, i32)]);

const EXAMPLE_DEFORMED_C3: [FixtureTerm; 16] = [
    (1, &[(1, 0, -1, 1), (1, 0, 1, -1)]),
    (1, &[(1, 0, -1, 1), (1, -8, 1, -1)]),
    (
        1,
        &[(1, 0, -1, 1), (1, -4, 1, 1), (1, -6, 1, -1), (1, -2, 1, -1)],
    ),
    (
        -1,
        &[(1, 0, -1, 1), (2, -9, 1, 1), (1, -8, 1, -1), (2, -7, 1, -1)],
    ),
    (
        -1,
        &[
            (1, 0, -1, 1),
            (1, -4, 1, 1),
            (2, -7, 1, 1),
            (1, -6, 1, -1),
            (1, -2, 1, -1),
            (2, -5, 1, -1),
        ],
    ),
    (
        -1,
        &[
            (1, 0, -1, 1),
            (1, -4, 1, 1),
            (2, -1, 1, 1),
            (1, -6, 1, -1),
            (1, -2, 1, -1),
            (2, -3, 1, -1),
        ],
    ),
    (
        1,
        &[
            (1, 0, -1, 1),
            (1, -4, 1, 1),
            (2, -7, 1, 1),
            (2, -1, 1, 1),
            (1, -6, 1, -1),
            (1, -2, 1, -1),
            (2, -5, 1, -1),
            (2, -3, 1, -1),
        ],
    ),
    (
        -1,
        &[(1, 0, -1, 1), (2, 1, 1, 1), (1, 0, 1, -1), (2, -1, 1, -1)],
    ),
    (
        1,
        &[(1, 0, -1, 1), (3, -9, 1, 1), (1, -6, 1, -1), (3, -5, 1, -1)],
    ),
    (
        -1,
        &[
            (1, 0, -1, 1),
            (2, -5, 1, 1),
            (3, -9, 1, 1),
            (1, -6, 1, -1),
            (2, -7, 1, -1),
            (3, -5, 1, -1),
        ],
    ),
    (
        -1,
        &[
            (1, 0, -1, 1),
            (2, -3, 1, 1),
            (3, -7, 1, 1),
            (1, -2, 1, -1),
            (2, -5, 1, -1),
            (3, -3, 1, -1),
        ],
    ),
    (
        1,
        &[
            (1, 0, -1, 1),
            (2, -1, 1, 1),
            (3, -7, 1, 1),
            (1, -2, 1, -1),
            (2, -5, 1, -1),
            (3, -3, 1, -1),
        ],
    ),
    (
        1,
        &[
            (1, 0, -1, 1),
            (2, -7, 1, 1),
            (3, -1, 1, 1),
            (1, -6, 1, -1),
            (2, -3, 1, -1),
            (3, -5, 1, -1),
        ],
    ),
    (
        -1,
        &[
            (1, 0, -1, 1),
            (2, -5, 1, 1),
            (3, -1, 1, 1),
            (1, -6, 1, -1),
            (2, -3, 1, -1),
            (3, -5, 1, -1),
        ],
    ),
    (
        1,
        &[(1, 0, -1, 1), (3, 1, 1, 1), (1, -2, 1, -1), (3, -3, 1, -1)],
    ),
    (
        -1,
        &[
            (1, 0, -1, 1),
            (2, -3, 1, 1),
            (3, 1, 1, 1),
            (1, -2, 1, -1),
            (2, -1, 1, -1),
            (3, -3, 1, -1),
        ],
    ),
];

/// The published 16-term expansion of `cal T_c` for C(3), instantiated at `c`.
pub fn sixteen_term_fixture(c: &Rational) -> QExpr {
    QExpr::from_terms(EXAMPLE_DEFORMED_C3.iter().map(|(sign, fs)| {
        QMonomial::new(
            BigInt::from(*sign),
            fs.iter()
                .map(|&(col, k, e, exp)| QFactor::q(col, (int(k) + int(e) * c) / int(2), exp)),
        )
    }))
}

/// The sl(1|2) boxes `1, 2, 3, -1, -2, -3`.
pub fn sl12_box(k: i8) -> Option<QMonomial> {
    let f = |spec: &[(usize, i64, i32)]| {
        QMonomial::new(
            BigInt::one(),
            spec.iter().map(|&(a, h, e)| QFactor::q(a, int(h), e)),
        )
    };
    Some(match k {
        1 => f(&[(1, -1, 1), (1, 1, -1)]),
        2 => f(&[(1, -1, 1), (2, 2, 1), (1, 1, -1), (2, 0, -1)]),
        3 => f(&[(2, -2, 1), (2, 0, -1)]),
        -1 => f(&[(1, 0, 1), (1, -2, -1)]),
        -2 => f(&[(1, 0, 1), (2, -3, 1), (1, -2, -1), (2, -1, -1)]),
        -3 => f(&[(2, 1, 1), (2, -1, -1)]),
        _ => return None,
    })
}

fn sl12_parity(k: i8) -> usize {
    usize::from(k.abs() != 1)
}

/// Signed product of sl(1|2) boxes at the given shifts.
fn sl12_word(word: &[i8], shifts: &[Rational]) -> QMonomial {
    let odd: usize = word.iter().map(|&k| sl12_parity(k)).sum();
    let mut m = QMonomial::one().with_coef(BigInt::from(if odd % 2 == 0 { 1 } else { -1 }));
    for (&k, h) in word.iter().zip(shifts) {
        m = m.mul(&sl12_box(k).expect("valid box").shifted(h));
    }
    m
}

fn sl12_pair(words: &[[i8; 2]]) -> QExpr {
    let sh = [int(-1), int(1)];
    QExpr::from_terms(words.iter().map(|w| sl12_word(w, &sh)))
}

/// `F_1^(1) = [1] - [2] - [3]`.
pub fn sl12_f1() -> QExpr {
    QExpr::from_terms([1i8, 2, 3].iter().map(|&k| sl12_word(&[k], &[int(0)])))
}

/// `F_2^(1) = [11] - [12] - [13] + [23]`.
pub fn sl12_f2() -> QExpr {
    sl12_pair(&[[1, 1], [1, 2], [1, 3], [2, 3]])
}

/// `F_{-1}^(1) = [-3 -2] - [-3 -1] - [-2 -1] + [-1 -1]`.
pub fn sl12_f_minus1() -> QExpr {
    sl12_pair(&[[-3, -2], [-3, -1], [-2, -1], [-1, -1]])
}

/// `F_c^(1)`: `1` at `c = 0`, `F_1^(1)` at `c = 1`, otherwise
/// `Q_1(u-c)/Q_1(u+c-4) F_2^(1)(u+c-2)`.
pub fn sl12_param(c: &Rational) -> QExpr {
    if c.is_zero() {
        return QExpr::one();
    }
    if c.is_one() {
        return sl12_f1();
    }
    let pre = QMonomial::new(
        BigInt::one(),
        [QFactor::q(1, -c.clone(), 1), QFactor::q(1, c - int(4), -1)],
    );
    sl12_f2().shift(&(c - int(2))).mul_monomial(&pre)
}

/// `F_m^(2)`: columns `-3^p -2^q (-1)^{0|1}` with shifts `m-1, m-3, ...`.
pub fn sl12_row(m: usize) -> QExpr {
    if m == 0 {
        return QExpr::one();
    }
    let shifts: Vec<Rational> = (0..m as i64).map(|k| int(m as i64 - 1 - 2 * k)).collect();
    let mut terms = Vec::new();
    for tail in 0..=1usize.min(m) {
        let rest = m - tail;
        for p in 0..=rest {
            let mut w = vec![-3i8; p];
            w.extend(std::iter::repeat_n(-2i8, rest - p));
            w.extend(std::iter::repeat_n(-1i8, tail));
            terms.push(sl12_word(&w, &shifts));
        }
    }
    QExpr::from_terms(terms)
}

/// `cal F^1_k`: rows over `-3 < -2 < -1` with `-3` and `-2` at most once,
/// shifts `-(k-1), -(k-3), ..., k-1`; zero for `k < 0`.
pub fn sl12_cal_f1(k: i64) -> QExpr {
    if k < 0 {
        return QExpr::zero();
    }
    if k == 0 {
        return QExpr::one();
    }
    let shifts: Vec<Rational> = (0..k).map(|j| int(2 * j - (k - 1))).collect();
    let mut terms = Vec::new();
    for head in [&[][..], &[-3i8][..], &[-2i8][..], &[-3i8, -2][..]] {
        if head.len() as i64 > k {
            continue;
        }
        let mut w = head.to_vec();
        w.extend(std::iter::repeat_n(-1i8, (k - head.len() as i64) as usize));
        terms.push(sl12_word(&w, &shifts));
    }
    QExpr::from_terms(terms)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if prefix.len() == n {
            let inv = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `cal F^a_m = det(cal F^1_{m+i-j}(u + a - i - j + 1))`, expanded as a
/// permutation sum.
pub fn sl12_rect(m: i64, a: usize) -> QExpr {
    if a == 0 {
        return QExpr::one();
    }
    let ai = a as i64;
    let entry = |i: i64, j: i64| sl12_cal_f1(m + i - j).shift(&int(ai - i - j + 1));
    let mut total = QExpr::zero();
    for (perm, sign) in permutations(a) {
        let mut prod = QExpr::one();
        for (i0, &j0) in perm.iter().enumerate() {
            let e = entry(i0 as i64 + 1, j0 as i64 + 1);
            if e.is_empty() {
                prod = QExpr::zero();
                break;
            }
            prod = prod.multiply(&e);
        }
        total = total.add(&prod.scale(&BigInt::from(sign)));
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub enum DvfKind {
    Column(usize),
    Row(usize),
    Deformed(Rational),
    Fundamental(usize),
    NegativeRow(usize),
    Sl12Row(usize),
    Sl12Param(Rational),
    Sl12Rect(i64, usize),
}

impl DvfKind {
    pub fn is_sl12(&self) -> bool {
        matches!(
            self,
            DvfKind::Sl12Row(_) | DvfKind::Sl12Param(_) | DvfKind::Sl12Rect(..)
        )
    }

    /// The tableau shape, for kinds built directly from `B(1^a)` or `B(m^1)`.
    pub fn shape(&self) -> Option<Shape> {
        match self {
            DvfKind::Column(a) => Some(Shape::Column(*a)),
            DvfKind::Row(m) => Some(Shape::Row(*m)),
            _ => None,
        }
    }
}

impl fmt::Display for DvfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DvfKind::Column(a) => write!(f, "col:{a}"),
            DvfKind::Row(m) => write!(f, "row:{m}"),
            DvfKind::Deformed(c) => write!(f, "def:{c}"),
            DvfKind::Fundamental(a) => write!(f, "fun:{a}"),
            DvfKind::NegativeRow(m) => write!(f, "neg:{m}"),
            DvfKind::Sl12Row(m) => write!(f, "sl12row:{m}"),
            DvfKind::Sl12Param(c) => write!(f, "sl12par:{c}"),
            DvfKind::Sl12Rect(m, a) => write!(f, "sl12rect:{m},{a}"),
        }
    }
}

impl FromStr for DvfKind {
    type Err = DvfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DvfError::BadSpec(s.to_string());
        let (tag, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let arg = arg.trim();
        let n = || arg.parse::<usize>().map_err(|_| bad());
        let r = || parse_rational(arg).ok_or_else(bad);
        Ok(match tag.trim() {
            "col" => DvfKind::Column(n()?),
            "row" => DvfKind::Row(n()?),
            "def" => DvfKind::Deformed(r()?),
            "fun" => DvfKind::Fundamental(n()?),
            "neg" => DvfKind::NegativeRow(n()?),
            "sl12row" => DvfKind::Sl12Row(n()?),
            "sl12par" => DvfKind::Sl12Param(r()?),
            "sl12rect" => {
                let (m, a) = arg.split_once(',').ok_or_else(bad)?;
                DvfKind::Sl12Rect(
                    m.trim().parse().map_err(|_| bad())?,
                    a.trim().parse().map_err(|_| bad())?,
                )
            }
            _ => return Err(bad()),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DvfSpec {
    pub algebra: AlgebraId,
    pub kind: DvfKind,
    pub vacuum: VacuumSpec,
}

impl DvfSpec {
    pub fn new(algebra: AlgebraId, kind: DvfKind, vacuum: VacuumSpec) -> Self {
        DvfSpec {
            algebra,
            kind,
            vacuum,
        }
    }

    fn rank(&self) -> Result<usize, DvfError> {
        match self.algebra {
            AlgebraId::C(s) => Ok(s),
            alg => Err(DvfError::WrongAlgebra {
                kind: self.kind.to_string(),
                alg,
            }),
        }
    }

    fn trivial_only(&self) -> Result<(), DvfError> {
        if self.vacuum != VacuumSpec::Trivial {
            return Err(DvfError::NeedsTrivialVacuum(self.kind.to_string()));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<QExpr, DvfError> {
        if self.kind.is_sl12() {
            if self.algebra != AlgebraId::Sl12 {
                return Err(DvfError::WrongAlgebra {
                    kind: self.kind.to_string(),
                    alg: self.algebra,
                });
            }
            self.trivial_only()?;
            return Ok(match &self.kind {
                DvfKind::Sl12Row(m) => sl12_row(*m),
                DvfKind::Sl12Param(c) => sl12_param(c),
                DvfKind::Sl12Rect(m, a) => sl12_rect(*m, *a),
                _ => unreachable!(),
            });
        }
        let s = self.rank()?;
        match &self.kind {
            DvfKind::Column(a) => column_dvf(s, *a, self.vacuum),
            DvfKind::Row(m) => row_dvf(s, *m, self.vacuum),
            DvfKind::Deformed(c) => {
                self.trivial_only()?;
                deformed(s, c)
            }
            DvfKind::Fundamental(a) => {
                self.trivial_only()?;
                fundamental_dvf(s, *a)
            }
            DvfKind::NegativeRow(m) => {
                self.trivial_only()?;
                negative_row_dvf(s, *m)
            }
            _ => unreachable!(),
        }
    }

    /// Terms tagged by tableaux, for column and row kinds only.
    pub fn tagged_terms(&self) -> Result<Option<Vec<DvfTerm>>, DvfError> {
        let s = match self.algebra {
            AlgebraId::C(s) => s,
            AlgebraId::Sl12 => return Ok(None),
        };
        match self.kind {
            DvfKind::Column(a) => Ok(Some(column_terms(s, a, self.vacuum)?)),
            DvfKind::Row(m) if m < s => Ok(Some(row_terms(s, m, self.vacuum)?)),
            _ => Ok(None),
        }
    }
}

/// Sign of a coefficient as `±1`, `0` for zero.
pub fn coef_sign(c: &BigInt) -> i32 {
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::Fp;
    use proptest::prelude::*;

    fn l(x: &str) -> Letter {
        x.parse().unwrap()
    }

    /// Parses `"- P(-2) Q1(-1/2) Q1(-1)^2 | Q1(1/2)"`: sign, numerator,
    /// `|`, denominator. `P` is the vacuum function.
    fn mono(src: &str) -> QMonomial {
        let mut toks = src.split_whitespace();
        let sign = match toks.next().unwrap() {
            "+" => 1,
            "-" => -1,
            t => panic!("sign expected, got {t}"),
        };
        let mut side = 1;
        let mut fs = Vec::new();
        for t in toks {
            if t == "|" {
                side = -1;
                continue;
            }
            let (body, pow) = match t.split_once('^') {
                Some((b, p)) => (b, p.parse::<i32>().unwrap()),
                None => (t, 1),
            };
            let open = body.find('(').unwrap();
            let shift = parse_rational(&body[open + 1..body.len() - 1]).unwrap();
            let head = &body[..open];
            let f = if head == "P" {
                QFactor::phi(shift, side * pow)
            } else {
                QFactor::q(head[1..].parse().unwrap(), shift, side * pow)
            };
            fs.push(f);
        }
        QMonomial::new(BigInt::from(sign), fs)
    }

    fn expr(lines: &[&str]) -> QExpr {
        QExpr::from_terms(lines.iter().map(|x| mono(x)))
    }

    const T1_C3: [&str; 6] = [
        "+ P(-2) P(1) Q1(-1/2) | Q1(1/2)",
        "- P(-2) P(0) Q1(-1/2) Q2(1) | Q1(1/2) Q2(0)",
        "- P(-2) P(0) Q2(-1) Q3(1) | Q2(0) Q3(-1)",
        "- P(-2) P(0) Q2(-1) Q3(-3) | Q2(-2) Q3(-1)",
        "- P(-2) P(0) Q1(-3/2) Q2(-3) | Q1(-5/2) Q2(-2)",
        "+ P(-3) P(0) Q1(-3/2) | Q1(-5/2)",
    ];

    const T21_C3: [&str; 16] = [
        "+ P(-3/2) P(3/2) Q1(-1) | Q1(1)",
        "- P(-3/2) P(1/2) Q1(-1) Q2(3/2) | Q1(1) Q2(1/2)",
        "- P(-3/2) P(1/2) Q1(-1) Q2(-1/2) Q3(3/2) | Q1(0) Q2(1/2) Q3(-1/2)",
        "- P(-3/2) P(1/2) Q1(-1) Q2(-1/2) Q3(-5/2) | Q1(0) Q2(-3/2) Q3(-1/2)",
        "- P(-3/2) P(1/2) Q1(-1)^2 Q2(-5/2) | Q1(-2) Q1(0) Q2(-3/2)",
        "+ P(-5/2) P(1/2) Q1(-1)^2 | Q1(-2) Q1(0)",
        "+ P(-3/2) P(-1/2) Q1(-1) Q3(3/2) | Q1(0) Q3(-1/2)",
        "+ P(-3/2) P(-1/2) Q1(-1) Q2(1/2) Q3(-5/2) | Q1(0) Q2(-3/2) Q3(-1/2)",
        "+ P(-3/2) P(-1/2) Q1(-1)^2 Q2(-5/2) Q2(1/2) | Q1(-2) Q1(0) Q2(-3/2) Q2(-1/2)",
        "- P(-5/2) P(-1/2) Q1(-1)^2 Q2(1/2) | Q1(-2) Q1(0) Q2(-1/2)",
        "+ P(-3/2) P(-1/2) Q1(-1) Q2(-5/2) Q3(1/2) | Q1(-2) Q2(-1/2) Q3(-3/2)",
        "- P(-5/2) P(-1/2) Q1(-1) Q2(-3/2) Q3(1/2) | Q1(-2) Q2(-1/2) Q3(-3/2)",
        "+ P(-3/2) P(-1/2) Q1(-1) Q3(-7/2) | Q1(-2) Q3(-3/2)",
        "- P(-5/2) P(-1/2) Q1(-1) Q2(-3/2) Q3(-7/2) | Q1(-2) Q2(-5/2) Q3(-3/2)",
        "- P(-5/2) P(-1/2) Q1(-1) Q2(-7/2) | Q1(-3) Q2(-5/2)",
        "+ P(-7/2) P(-1/2) Q1(-1) | Q1(-3)",
    ];

    fn common(e: &QExpr, m: &QMonomial) -> QExpr {
        e.mul_monomial(m)
    }

    #[test]
    fn boxes_trivial() {
        assert_eq!(
            box_monomial(3, l("1"), VacuumSpec::Trivial),
            mono("+ Q1(-1/2) | Q1(1/2)")
        );
        assert_eq!(
            box_monomial(3, l("3b"), VacuumSpec::Trivial),
            mono("+ Q2(-1) Q3(-3) | Q2(-2) Q3(-1)")
        );
        assert_eq!(
            box_monomial(4, l("2b"), VacuumSpec::Trivial),
            mono("+ Q1(-5/2) Q2(-4) | Q1(-7/2) Q2(-3)")
        );
    }

    #[test]
    fn box_fundamental_value() {
        let b = QExpr::monomial(box_monomial(3, l("1b"), VacuumSpec::Fundamental));
        let a = RootAssignment::new(vec![vec![int(0)], vec![], vec![]], vec![int(0)]);
        assert_eq!(b.evaluate(&a, &int(5)).unwrap(), int(14));
    }

    #[test]
    fn box_one_cancels_its_conjugate() {
        for s in 2..6 {
            let p = box_monomial(s, l("1"), VacuumSpec::Trivial)
                .mul(&box_monomial(s, l("1b"), VacuumSpec::Trivial).shifted(&int(s as i64 - 1)));
            assert_eq!(p, QMonomial::one());
        }
    }

    #[test]
    fn t1_matches_printed_expansion() {
        let got = column_dvf(3, 1, VacuumSpec::Fundamental).unwrap();
        assert_eq!(got, expr(&T1_C3));
        assert_eq!(row_dvf(3, 1, VacuumSpec::Fundamental).unwrap(), got);
    }

    #[test]
    fn t21_matches_printed_expansion() {
        let pre = mono("+ P(-5/2) P(1/2)");
        assert_eq!(
            row_dvf(3, 2, VacuumSpec::Fundamental).unwrap(),
            common(&expr(&T21_C3), &pre)
        );
        assert_eq!(row_dvf(3, 2, VacuumSpec::Trivial).unwrap().len(), 16);
    }

    #[test]
    fn t2_column_signs_and_count() {
        let terms = column_terms(3, 2, VacuumSpec::Trivial).unwrap();
        assert_eq!(terms.len(), 20);
        let last = terms.iter().find(|t| t.tableau.label() == "3b 3").unwrap();
        assert_eq!(coef_sign(last.monomial.coef()), 1);
        let neg: Vec<String> = terms
            .iter()
            .filter(|t| coef_sign(t.monomial.coef()) < 0)
            .map(|t| t.tableau.label())
            .collect();
        assert_eq!(
            neg,
            ["1 2", "1 3", "1 3b", "1 2b", "2 1b", "3 1b", "3b 1b", "2b 1b"]
        );
        assert_eq!(column_dvf(3, 2, VacuumSpec::Trivial).unwrap().len(), 20);
    }

    #[test]
    fn empty_dvfs_are_one() {
        assert_eq!(
            column_dvf(3, 0, VacuumSpec::Fundamental).unwrap(),
            QExpr::one()
        );
        assert_eq!(row_dvf(3, 0, VacuumSpec::Trivial).unwrap(), QExpr::one());
    }

    #[test]
    fn row_counts_follow_table() {
        let want = [1, 6, 16, 10, 15, 16, 16, 16];
        for (m, &n) in want.iter().enumerate() {
            assert_eq!(
                row_dvf(3, m, VacuumSpec::Trivial).unwrap().len(),
                n,
                "m = {m}"
            );
        }
        assert!(row_dvf(3, 4, VacuumSpec::Fundamental).is_err());
    }

    #[test]
    fn tops_are_present() {
        for m in 1..8 {
            let e = row_dvf(3, m, VacuumSpec::Trivial).unwrap();
            assert!(e.terms().contains(&row_top(&int(m as i64))), "m = {m}");
        }
        for a in 1..5 {
            let e = column_dvf(3, a, VacuumSpec::Trivial).unwrap();
            assert!(e.terms().contains(&column_top(a)), "a = {a}");
        }
        for s in 3..5 {
            for a in 2..=s {
                let e = fundamental_dvf(s, a).unwrap();
                assert!(
                    e.terms().contains(&fundamental_top(s, a)),
                    "s = {s} a = {a}"
                );
            }
        }
    }

    #[test]
    fn fundamental_top_c3() {
        assert_eq!(fundamental_top(3, 3), mono("+ Q3(1) | Q3(-1)"));
    }

    #[test]
    fn fundamental_counts() {
        assert_eq!(fundamental_dvf(3, 2).unwrap().len(), 15);
        assert_eq!(fundamental_dvf(3, 3).unwrap().len(), 10);
        assert!(fundamental_dvf(3, 1).is_err());
        assert!(fundamental_dvf(3, 4).is_err());
    }

    #[test]
    fn deformed_matches_sixteen_term_fixture() {
        for c in [rat(7, 3), rat(-5, 2), int(11), rat(1, 9)] {
            assert_eq!(deformed(3, &c).unwrap(), sixteen_term_fixture(&c), "c = {c}");
        }
    }

    #[test]
    fn deformed_agrees_with_rows_far_out() {
        for s in 2..5 {
            let m = 2 * s - 1;
            assert_eq!(
                deformed(s, &int(m as i64)).unwrap(),
                row_dvf(s, m, VacuumSpec::Trivial).unwrap()
            );
        }
    }

    #[test]
    fn short_rows_embed_in_deformation() {
        for s in 2..5 {
            for m in s..=2 * s - 2 {
                let big = deformed(s, &int(m as i64)).unwrap();
                for t in row_dvf(s, 2 * s - 2 - m, VacuumSpec::Trivial)
                    .unwrap()
                    .terms()
                {
                    assert!(big.terms().contains(t), "s={s} m={m} missing {t}");
                }
            }
        }
    }

    #[test]
    fn divisibility_holds() {
        for s in 2..6 {
            for c in [rat(1, 3), int(-4), rat(17, 5)] {
                assert!(divisibility_check(s, &c).unwrap());
            }
        }
    }

    #[test]
    fn negative_rows_satisfy_first_relation_pointwise() {
        let s = 3;
        let t1 = negative_row_dvf(s, 1).unwrap();
        let t2 = negative_row_dvf(s, 2).unwrap();
        let f = fundamental_dvf(s, 2).unwrap().add(&QExpr::one());
        let lhs = t1.shift(&rat(-1, 2)).multiply(&t1.shift(&rat(1, 2)));
        let rhs = t2.multiply(&f);
        let a = RootAssignment::new(
            vec![
                vec![rat(3, 7), rat(-11, 5)],
                vec![rat(2, 9), rat(5, 13)],
                vec![rat(-1, 3), rat(7, 4)],
            ],
            vec![],
        );
        let fa = a.convert::<Fp>().unwrap();
        let mut hits = 0;
        for k in 0..40 {
            let u = Fp::new(1000 + 37 * k);
            if let (Ok(x), Ok(y)) = (lhs.evaluate(&fa, &u), rhs.evaluate(&fa, &u)) {
                hits += 1;
                assert_eq!(x, y, "u = {u:?}");
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn crossing_invariance() {
        let a = RootAssignment::new(
            vec![
                vec![rat(1, 3), rat(-2, 7)],
                vec![rat(5, 11)],
                vec![rat(-3, 4), rat(2, 5)],
            ],
            vec![rat(1, 6), rat(-7, 9)],
        );
        let samples = [rat(13, 17), rat(-19, 23), rat(29, 31)];
        for vac in [VacuumSpec::Trivial, VacuumSpec::Fundamental] {
            for k in 1..=3 {
                let e = column_dvf(3, k, vac).unwrap();
                assert!(crossing_check(&e, 3, &a, &samples).unwrap(), "col {k}");
            }
            let e = row_dvf(3, 2, vac).unwrap();
            assert!(crossing_check(&e, 3, &a, &samples).unwrap());
        }
        let lone = box_expr(3, l("2"), VacuumSpec::Trivial);
        assert!(!crossing_check(&lone, 3, &a, &samples).unwrap());
    }

    #[test]
    fn sl12_explicit_functions() {
        assert_eq!(sl12_f1().len(), 3);
        assert_eq!(sl12_param(&int(2)), sl12_f2());
        assert_eq!(sl12_param(&int(-1)), sl12_f_minus1());
        assert_eq!(sl12_cal_f1(2), sl12_f_minus1());
        assert_eq!(sl12_cal_f1(1), sl12_row(1));
        assert!(sl12_cal_f1(-1).is_empty());
        assert_eq!(sl12_cal_f1(5).len(), 4);
    }

    #[test]
    fn sl12_top_terms() {
        for c in [int(2), int(3), rat(1, 2), rat(-7, 3)] {
            assert!(sl12_param(&c).terms().contains(&QMonomial::new(
                BigInt::one(),
                [QFactor::q(1, -c.clone(), 1), QFactor::q(1, c.clone(), -1)]
            )));
        }
        for m in 1..5i64 {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let top = QMonomial::new(
                BigInt::from(sign),
                [QFactor::q(2, int(m), 1), QFactor::q(2, int(-m), -1)],
            );
            assert!(sl12_row(m as usize).terms().contains(&top), "m = {m}");
        }
    }

    #[test]
    fn sl12_rect_identities() {
        for a in 1..4 {
            assert_eq!(sl12_rect(2, a), sl12_cal_f1(a as i64 + 1), "a = {a}");
            assert_eq!(sl12_rect(1, a), sl12_row(a), "a = {a}");
        }
        for m in 3..5 {
            for a in 2..4 {
                assert!(sl12_rect(m, a).is_empty(), "m = {m} a = {a}");
            }
        }
    }

    #[test]
    fn c2_identification() {
        assert_eq!(fundamental_dvf(2, 2).unwrap(), sl12_row(1));
        for m in 1..5i64 {
            let c = int(m);
            assert_eq!(
                row_dvf_signed(2, m).unwrap(),
                sl12_param(&(c.clone() / int(2))),
                "m = {m}"
            );
            assert_eq!(
                row_dvf_signed(2, -m).unwrap(),
                sl12_param(&(-c / int(2))),
                "m = -{m}"
            );
        }
    }

    #[test]
    fn spec_parsing() {
        let k: DvfKind = "sl12rect:2,3".parse().unwrap();
        assert_eq!(k, DvfKind::Sl12Rect(2, 3));
        assert_eq!(
            "def:-7/2".parse::<DvfKind>().unwrap(),
            DvfKind::Deformed(rat(-7, 2))
        );
        for s in [
            "col:3",
            "row:2",
            "fun:2",
            "neg:1",
            "sl12row:4",
            "sl12par:1/2",
            "def:5",
        ] {
            assert_eq!(s.parse::<DvfKind>().unwrap().to_string(), s);
        }
        assert!("box:2".parse::<DvfKind>().is_err());
        assert!("col:x".parse::<DvfKind>().is_err());
        let spec = DvfSpec::new(
            AlgebraId::C(3),
            "sl12row:1".parse().unwrap(),
            VacuumSpec::Trivial,
        );
        assert!(matches!(spec.build(), Err(DvfError::WrongAlgebra { .. })));
        let spec = DvfSpec::new(
            AlgebraId::C(3),
            "fun:2".parse().unwrap(),
            VacuumSpec::Fundamental,
        );
        assert!(matches!(spec.build(), Err(DvfError::NeedsTrivialVacuum(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn built_monomials_are_balanced(s in 2usize..5, a in 0usize..4, m in 0usize..7, n in -20i64..20, d in 1i64..6) {
            for t in column_dvf(s, a, VacuumSpec::Trivial).unwrap().terms() {
                prop_assert!(t.is_q_balanced());
            }
            for t in row_dvf(s, m, VacuumSpec::Trivial).unwrap().terms() {
                prop_assert!(t.is_q_balanced());
            }
            for t in deformed(s, &rat(n, d)).unwrap().terms() {
                prop_assert!(t.is_q_balanced());
            }
        }

        #[test]
        fn fixture_matches_at_random_c(n in -60i64..60, d in 1i64..12) {
            let c = rat(n, d);
            prop_assert_eq!(deformed(3, &c).unwrap(), sixteen_term_fixture(&c));
        }

        #[test]
        fn divisibility_for_random_c(s in 2usize..6, n in -60i64..60, d in 1i64..12) {
            prop_assert!(divisibility_check(s, &rat(n, d)).unwrap());
        }
    }
}
