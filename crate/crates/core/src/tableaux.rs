//! The graded alphabet `J = {1, ..., s, s̄, ..., 1̄}` of C(s) and the admissible
//! column and row tableaux built from it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rootdata::BasisVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("cannot parse letter {0:?}")]
    BadLetter(String),
    #[error("cannot parse shape {0:?}")]
    BadShape(String),
    #[error("letter {letter} is outside the alphabet of rank {s}")]
    OutOfAlphabet { letter: Letter, s: usize },
    #[error("row shape requires m <= s-1 (got m = {m}, s-1 = {max}); use dvf def:{m}")]
    RowTooLong { m: usize, max: usize },
    #[error("entries are not admissible for {0}")]
    NotAdmissible(Shape),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub index: usize,
    pub barred: bool,
}

impl Letter {
    pub fn new(index: usize) -> Self {
        Letter {
            index,
            barred: false,
        }
    }

    pub fn bar(index: usize) -> Self {
        Letter {
            index,
            barred: true,
        }
    }

    pub fn conjugate(self) -> Self {
        Letter {
            index: self.index,
            barred: !self.barred,
        }
    }

    /// 0 on `J+ = {1, 1̄}`, 1 otherwise.
    pub fn parity(self) -> u8 {
        u8::from(self.index != 1)
    }

    pub fn is_even(self) -> bool {
        self.parity() == 0
    }

    pub fn in_alphabet(self, s: usize) -> bool {
        (1..=s).contains(&self.index)
    }

    /// Weight in the basis `(ε, δ_1, ..., δ_{s-1})`.
    pub fn weight(self, s: usize) -> BasisVector {
        let v = BasisVector::unit(s, self.index - 1);
        if self.barred {
            v.neg()
        } else {
            v
        }
    }

    /// Position in the alphabet order, starting at 0.
    fn key(self) -> (bool, i64) {
        (
            self.barred,
            if self.barred {
                -(self.index as i64)
            } else {
                self.index as i64
            },
        )
    }

    /// Display with a combining overline.
    pub fn pretty(self) -> String {
        if self.barred {
            format!("{}\u{0305}", self.index)
        } else {
            self.index.to_string()
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.index, if self.barred { "b" } else { "" })
    }
}

impl FromStr for Letter {
    type Err = TableauError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (digits, barred) = match t.strip_suffix('b') {
            Some(d) => (d, true),
            None => match t.strip_suffix('\u{0305}') {
                Some(d) => (d, true),
                None => (t, false),
            },
        };
        match digits.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(Letter { index: i, barred }),
            _ => Err(TableauError::BadLetter(s.to_string())),
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The alphabet of C(s) in increasing order.
pub fn alphabet(s: usize) -> Vec<Letter> {
    (1..=s)
        .map(Letter::new)
        .chain((1..=s).rev().map(Letter::bar))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Column(usize),
    Row(usize),
}

impl Shape {
    pub fn len(self) -> usize {
        match self {
            Shape::Column(a) | Shape::Row(a) => a,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Column(a) => write!(f, "col:{a}"),
            Shape::Row(m) => write!(f, "row:{m}"),
        }
    }
}

impl FromStr for Shape {
    type Err = TableauError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TableauError::BadShape(s.to_string());
        let (kind, n) = s.trim().split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "col" | "column" => Ok(Shape::Column(n)),
            "row" => Ok(Shape::Row(n)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Shape {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tableau {
    pub shape: Shape,
    pub entries: Vec<Letter>,
}

impl Tableau {
    /// Checked constructor.
    pub fn new(s: usize, shape: Shape, entries: Vec<Letter>) -> Result<Self, TableauError> {
        if let Some(&l) = entries.iter().find(|l| !l.in_alphabet(s)) {
            return Err(TableauError::OutOfAlphabet { letter: l, s });
        }
        let ok = entries.len() == shape.len()
            && match shape {
                Shape::Column(_) => admissible_column(s, &entries),
                Shape::Row(_) => admissible_row(s, &entries),
            };
        if !ok {
            return Err(TableauError::NotAdmissible(shape));
        }
        Ok(Tableau { shape, entries })
    }

    pub fn entries(&self) -> &[Letter] {
        &self.entries
    }

    /// Number of odd letters.
    pub fn odd_count(&self) -> usize {
        self.entries.iter().filter(|l| l.parity() == 1).count()
    }

    /// `(-1)^{sum of parities}` as `±1`.
    pub fn sign(&self) -> i64 {
        if self.odd_count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn weight(&self, s: usize) -> BasisVector {
        self.entries
            .iter()
            .fold(BasisVector::zero(s), |acc, l| acc.add(&l.weight(s)))
    }

    /// Entries joined by spaces, e.g. `"1 3b"`.
    pub fn label(&self) -> String {
        self.entries
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn pretty(&self) -> String {
        let sep = match self.shape {
            Shape::Column(_) => "/",
            Shape::Row(_) => " ",
        };
        self.entries
            .iter()
            .map(|l| l.pretty())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.shape, self.label())
    }
}

fn column_pair_ok(s: usize, x: Letter, y: Letter) -> bool {
    if x.is_even() && y.is_even() && x >= y {
        return false;
    }
    x <= y || (x == Letter::bar(s) && y == Letter::new(s))
}

/// Inside the block of `s`/`s̄` letters a column reads `s^l (s̄ s)^n s̄^r`, so
/// the exceptional pair can neither follow `s̄ s̄` nor precede another `s`.
fn column_triple_ok(s: usize, x: Letter, y: Letter, z: Letter) -> bool {
    let (top, bot) = (Letter::new(s), Letter::bar(s));
    !(x == bot && ((y == top && z == top) || (y == bot && z == top)))
}

fn row_pair_ok(x: Letter, y: Letter) -> bool {
    if !x.is_even() && !y.is_even() && x >= y {
        return false;
    }
    x <= y
}

/// Whether placing `d̄` at position `k` (1-based) is compatible with every
/// earlier `d` at position `j`: `s + j - k >= d`.
fn row_bar_ok(s: usize, prefix: &[Letter], y: Letter) -> bool {
    if !y.barred {
        return true;
    }
    let k = prefix.len() + 1;
    prefix
        .iter()
        .enumerate()
        .all(|(j0, &x)| x != y.conjugate() || s + j0 + 1 >= k + y.index)
}

pub fn admissible_column(s: usize, entries: &[Letter]) -> bool {
    entries.iter().all(|l| l.in_alphabet(s))
        && entries.windows(2).all(|w| column_pair_ok(s, w[0], w[1]))
        && entries
            .windows(3)
            .all(|w| column_triple_ok(s, w[0], w[1], w[2]))
}

pub fn admissible_row(s: usize, entries: &[Letter]) -> bool {
    entries.iter().all(|l| l.in_alphabet(s))
        && entries.windows(2).all(|w| row_pair_ok(w[0], w[1]))
        && (0..entries.len()).all(|k| row_bar_ok(s, &entries[..k], entries[k]))
}

fn extend(
    alpha: &[Letter],
    len: usize,
    prefix: &mut Vec<Letter>,
    ok: &dyn Fn(&[Letter], Letter) -> bool,
    out: &mut Vec<Vec<Letter>>,
) {
    if prefix.len() == len {
        out.push(prefix.clone());
        return;
    }
    for &y in alpha {
        if ok(prefix, y) {
            prefix.push(y);
            extend(alpha, len, prefix, ok, out);
            prefix.pop();
        }
    }
}

/// All of `B(1^a)`, lexicographic in the alphabet order.
pub fn enumerate_column(s: usize, a: usize) -> Vec<Tableau> {
    let alpha = alphabet(s);
    let ok = |p: &[Letter], y: Letter| match p {
        [] => true,
        [x] => column_pair_ok(s, *x, y),
        [.., w, x] => column_pair_ok(s, *x, y) && column_triple_ok(s, *w, *x, y),
    };
    let mut out = Vec::new();
    extend(&alpha, a, &mut Vec::with_capacity(a), &ok, &mut out);
    out.into_iter()
        .map(|entries| Tableau {
            shape: Shape::Column(a),
            entries,
        })
        .collect()
}

/// All of `B(m^1)` for `m <= s - 1`, lexicographic in the alphabet order.
pub fn enumerate_row(s: usize, m: usize) -> Result<Vec<Tableau>, TableauError> {
    if m + 1 > s.max(1) && m > 0 {
        return Err(TableauError::RowTooLong {
            m,
            max: s.saturating_sub(1),
        });
    }
    Ok(enumerate_row_unchecked(s, m))
}

/// Row enumeration without the length restriction.
pub fn enumerate_row_unchecked(s: usize, m: usize) -> Vec<Tableau> {
    let alpha = alphabet(s);
    let ok = |p: &[Letter], y: Letter| {
        p.last().is_none_or(|&x| row_pair_ok(x, y)) && row_bar_ok(s, p, y)
    };
    let mut out = Vec::new();
    extend(&alpha, m, &mut Vec::with_capacity(m), &ok, &mut out);
    out.into_iter()
        .map(|entries| Tableau {
            shape: Shape::Row(m),
            entries,
        })
        .collect()
}

/// Binomial coefficient, zero for a negative lower index or `n < k`.
pub fn binom(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn column_block(s: i64, k: i64) -> u64 {
    binom(k + s - 2, k) + binom(k + s - 3, k - 1)
}

/// The summand `D(a, n)` of the column count.
pub fn column_count_summand(s: usize, a: usize, n: usize) -> u64 {
    let (s, top) = (s as i64, a as i64 - 2 * n as i64);
    if top < 0 {
        return 0;
    }
    (0..=top)
        .map(|k| column_block(s, k) * column_block(s, top - k))
        .sum()
}

/// `#B(1^a)` in closed form.
pub fn count_column_formula(s: usize, a: usize) -> u64 {
    (0..=a / 2).map(|n| column_count_summand(s, a, n)).sum()
}

/// Closed form for `#B(m^1)`, valid for `m <= s - 1`.
pub fn count_row_tableaux(s: usize, m: usize) -> u64 {
    let r = 2 * s as i64 - 2;
    (0..=m as i64)
        .map(|k| (binom(r, k) - binom(r, k - 2)) * (m as u64 - k as u64 + 1))
        .sum()
}

/// Number of terms of the row DVF `T_m^(1)`. For `m <= s - 1` this is
/// `#B(m^1)`; beyond that the deformed function keeps `#B((s-1)^1)` terms
/// minus those cancelled by `T_{2s-2-m}`.
pub fn count_row_formula(s: usize, m: usize) -> u64 {
    if m < s {
        return count_row_tableaux(s, m);
    }
    let full = count_row_tableaux(s, s - 1);
    if m <= 2 * s - 2 {
        full - count_row_tableaux(s, 2 * s - 2 - m)
    } else {
        full
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(s: &str) -> Letter {
        s.parse().unwrap()
    }

    fn ls(xs: &[&str]) -> Vec<Letter> {
        xs.iter().map(|x| l(x)).collect()
    }

    #[test]
    fn order_and_parity() {
        let a = alphabet(3);
        assert_eq!(
            a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            ["1", "2", "3", "3b", "2b", "1b"]
        );
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            a.iter().map(|x| x.parity()).collect::<Vec<_>>(),
            [0, 1, 1, 1, 1, 0]
        );
    }

    #[test]
    fn letter_parsing() {
        assert_eq!(l("3b"), Letter::bar(3));
        assert_eq!(l("3\u{0305}"), Letter::bar(3));
        assert_eq!(l(" 2 "), Letter::new(2));
        assert!("0".parse::<Letter>().is_err());
        assert!("x".parse::<Letter>().is_err());
        assert_eq!(
            Letter::bar(2).pretty().parse::<Letter>().unwrap(),
            Letter::bar(2)
        );
    }

    #[test]
    fn column_examples() {
        assert!(admissible_column(3, &ls(&["2", "2"])));
        assert!(admissible_column(3, &ls(&["3b", "3"])));
        assert!(!admissible_column(3, &ls(&["1", "1"])));
        assert!(!admissible_column(3, &ls(&["1b", "1b"])));
        assert!(!admissible_column(3, &ls(&["2b", "2"])));
        assert!(admissible_column(3, &ls(&["3b", "3", "3b", "3"])));
        assert!(admissible_column(3, &ls(&["3", "3b", "3", "3b", "3b"])));
        assert!(!admissible_column(3, &ls(&["3b", "3", "3"])));
        assert!(!admissible_column(3, &ls(&["3b", "3b", "3"])));
        assert!(!admissible_column(3, &ls(&["4"])));
    }

    #[test]
    fn row_examples() {
        assert!(!admissible_row(3, &ls(&["3", "3b"])));
        assert!(admissible_row(3, &ls(&["1", "1b"])));
        assert!(admissible_row(3, &ls(&["1b", "1b"])));
        assert!(admissible_row(3, &ls(&["1", "1"])));
        assert!(!admissible_row(3, &ls(&["2", "2"])));
        assert!(admissible_row(3, &ls(&["2", "2b"])));
        assert!(!admissible_row(3, &ls(&["2", "1"])));
    }

    #[test]
    fn bar_condition_is_positional() {
        // 2 at position 1, 2̄ at position 4: s + 1 - 4 = 0 < 2
        assert!(!admissible_row(3, &ls(&["2", "3", "3b", "2b"])));
        assert!(admissible_row(4, &ls(&["1", "2", "2b"])));
        assert!(!admissible_row(4, &ls(&["1", "4", "4b"])));
    }

    #[test]
    fn column_counts_match_table() {
        let table = [1, 6, 20, 50, 105, 196, 336];
        for (a, &n) in table.iter().enumerate() {
            assert_eq!(enumerate_column(3, a).len() as u64, n);
            assert_eq!(count_column_formula(3, a), n);
        }
    }

    #[test]
    fn row_counts_match_table() {
        assert_eq!(enumerate_row(3, 2).unwrap().len(), 16);
        let table = [1, 6, 16, 10, 15, 16, 16, 16];
        for (m, &n) in table.iter().enumerate() {
            assert_eq!(count_row_formula(3, m), n, "m = {m}");
        }
        assert!(matches!(
            enumerate_row(3, 3),
            Err(TableauError::RowTooLong { .. })
        ));
    }

    #[test]
    fn formulas_agree_with_enumeration() {
        for s in 2..=5 {
            for a in 0..=6 {
                assert_eq!(
                    enumerate_column(s, a).len() as u64,
                    count_column_formula(s, a),
                    "s={s} a={a}"
                );
            }
            for m in 0..s {
                assert_eq!(
                    enumerate_row(s, m).unwrap().len() as u64,
                    count_row_formula(s, m),
                    "s={s} m={m}"
                );
            }
        }
    }

    #[test]
    fn empty_shapes() {
        assert_eq!(enumerate_column(3, 0).len(), 1);
        assert_eq!(enumerate_row(3, 0).unwrap().len(), 1);
        assert_eq!(count_column_formula(7, 0), 1);
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        let c = enumerate_column(3, 3);
        assert!(c.windows(2).all(|w| w[0].entries < w[1].entries));
        assert_eq!(c[0].entries, ls(&["1", "2", "2"]));
    }

    #[test]
    fn tableau_sign_and_weight() {
        let t = Tableau::new(3, Shape::Column(2), ls(&["1", "2"])).unwrap();
        assert_eq!(t.sign(), -1);
        assert_eq!(t.weight(3), BasisVector::from_ints(&[1, 1, 0]));
        assert!(Tableau::new(3, Shape::Row(2), ls(&["3", "3b"])).is_err());
        assert!(Tableau::new(3, Shape::Row(1), ls(&["5"])).is_err());
    }

    #[test]
    fn json_format() {
        let t = Tableau::new(3, Shape::Row(2), ls(&["1", "3b"])).unwrap();
        let j = serde_json::to_string(&t).unwrap();
        assert_eq!(j, r#"{"shape":"row:2","entries":["1","3b"]}"#);
        assert_eq!(serde_json::from_str::<Tableau>(&j).unwrap(), t);
        assert_eq!("col:4".parse::<Shape>().unwrap(), Shape::Column(4));
        assert!("box:1".parse::<Shape>().is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), 6);
        assert_eq!(binom(4, -1), 0);
        assert_eq!(binom(-1, -1), 0);
        assert_eq!(binom(10, 0), 1);
    }

    proptest! {
        #[test]
        fn enumerated_columns_are_admissible(s in 2usize..5, a in 0usize..5) {
            for t in enumerate_column(s, a) {
                prop_assert!(admissible_column(s, &t.entries));
            }
        }

        #[test]
        fn random_words_admissible_iff_enumerated(s in 2usize..5, w in prop::collection::vec((1usize..5, any::<bool>()), 0..4)) {
            let word: Vec<Letter> = w.into_iter().map(|(i, b)| Letter { index: i, barred: b }).collect();
            if word.iter().all(|x| x.in_alphabet(s)) {
                let cols = enumerate_column(s, word.len());
                prop_assert_eq!(admissible_column(s, &word), cols.iter().any(|t| t.entries == word));
                let rows = enumerate_row_unchecked(s, word.len());
                prop_assert_eq!(admissible_row(s, &word), rows.iter().any(|t| t.entries == word));
            }
        }

        #[test]
        fn order_is_total_and_consistent(a in (1usize..6, any::<bool>()), b in (1usize..6, any::<bool>())) {
            let x = Letter { index: a.0, barred: a.1 };
            let y = Letter { index: b.0, barred: b.1 };
            prop_assert_eq!(x == y, x.cmp(&y) == Ordering::Equal);
            prop_assert_eq!(x.conjugate().conjugate(), x);
        }
    }
}
