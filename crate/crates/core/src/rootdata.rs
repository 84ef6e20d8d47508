//! Cartan data: the distinguished simple roots of C(s) and of sl(1|2), the
//! invariant bilinear form, and the Bethe ansatz ratio.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::qalgebra::{int, rat, QExpr, QFactor, QMonomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("unknown algebra {0:?}; expected C:s (s >= 2) or sl12")]
    UnknownAlgebra(String),
    #[error("vector length {got} does not match basis size {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },
    #[error("{0} is not defined for sl(1|2)")]
    NotForSl12(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraId {
    C(usize),
    Sl12,
}

impl AlgebraId {
    /// Number of simple roots (Bethe root colors).
    pub fn colors(self) -> usize {
        match self {
            AlgebraId::C(s) => s,
            AlgebraId::Sl12 => 2,
        }
    }

    /// Size of the epsilon/delta basis.
    pub fn basis_len(self) -> usize {
        match self {
            AlgebraId::C(s) => s,
            AlgebraId::Sl12 => 3,
        }
    }

    pub fn rank_s(self) -> Result<usize, RootError> {
        match self {
            AlgebraId::C(s) => Ok(s),
            AlgebraId::Sl12 => Err(RootError::NotForSl12("rank s")),
        }
    }
}

impl FromStr for AlgebraId {
    type Err = RootError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim();
        let lower = t.to_ascii_lowercase();
        if lower == "sl12" || lower == "sl(1|2)" {
            return Ok(AlgebraId::Sl12);
        }
        let body = t
            .strip_prefix("C:")
            .or_else(|| t.strip_prefix("C(").and_then(|r| r.strip_suffix(')')));
        match body.and_then(|b| b.parse::<usize>().ok()) {
            Some(s) if s >= 2 => Ok(AlgebraId::C(s)),
            _ => Err(RootError::UnknownAlgebra(text.to_string())),
        }
    }
}

impl fmt::Display for AlgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraId::C(s) => write!(f, "C:{}", s),
            AlgebraId::Sl12 => write!(f, "sl12"),
        }
    }
}

/// Coordinates on `(eps, delta_1, ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisVector {
    pub coeffs: Vec<Rational>,
}

impl BasisVector {
    pub fn zero(n: usize) -> Self {
        BasisVector {
            coeffs: vec![Rational::zero(); n],
        }
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.coeffs[i] = Rational::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        BasisVector {
            coeffs: xs.iter().map(|&x| int(x)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &BasisVector) -> Self {
        BasisVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &BasisVector) -> Self {
        BasisVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        BasisVector {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        BasisVector {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

/// Invariant form: `(eps|eps) = 1/2`, `(delta_i|delta_j) = -delta_ij/2` for
/// C(s); `(eps|eps) = 1`, `(delta_i|delta_j) = -delta_ij` for sl(1|2).
pub fn inner(alg: AlgebraId, x: &BasisVector, y: &BasisVector) -> Result<Rational, RootError> {
    let n = alg.basis_len();
    for v in [x, y] {
        if v.len() != n {
            return Err(RootError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let scale = match alg {
        AlgebraId::C(_) => rat(1, 2),
        AlgebraId::Sl12 => int(1),
    };
    let mut acc = &x.coeffs[0] * &y.coeffs[0];
    for i in 1..n {
        acc -= &x.coeffs[i] * &y.coeffs[i];
    }
    Ok(acc * scale)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimpleRootSystem {
    alg: AlgebraId,
    roots: Vec<BasisVector>,
    parity: Vec<u8>,
    gram: Vec<Vec<Rational>>,
}

impl SimpleRootSystem {
    pub fn new(alg: AlgebraId) -> Self {
        let n = alg.basis_len();
        let mut roots = Vec::new();
        match alg {
            AlgebraId::C(s) => {
                roots.push(BasisVector::unit(n, 0).sub(&BasisVector::unit(n, 1)));
                for i in 2..s {
                    roots.push(BasisVector::unit(n, i - 1).sub(&BasisVector::unit(n, i)));
                }
                roots.push(BasisVector::unit(n, s - 1).scale(&int(2)));
            }
            AlgebraId::Sl12 => {
                roots.push(BasisVector::unit(3, 0).sub(&BasisVector::unit(3, 1)));
                roots.push(BasisVector::unit(3, 1).sub(&BasisVector::unit(3, 2)));
            }
        }
        let parity = (1..=roots.len()).map(|a| u8::from(a == 1)).collect();
        let gram = roots
            .iter()
            .map(|x| {
                roots
                    .iter()
                    .map(|y| inner(alg, x, y).expect("basis size"))
                    .collect()
            })
            .collect();
        SimpleRootSystem {
            alg,
            roots,
            parity,
            gram,
        }
    }

    pub fn algebra(&self) -> AlgebraId {
        self.alg
    }

    pub fn colors(&self) -> usize {
        self.roots.len()
    }

    pub fn root(&self, a: usize) -> &BasisVector {
        &self.roots[a - 1]
    }

    pub fn roots(&self) -> &[BasisVector] {
        &self.roots
    }

    /// `deg(alpha_a)`: 1 for the odd root, 0 otherwise.
    pub fn deg(&self, a: usize) -> u8 {
        self.parity[a - 1]
    }

    /// `(alpha_a|alpha_b)`.
    pub fn pairing(&self, a: usize, b: usize) -> &Rational {
        &self.gram[a - 1][b - 1]
    }

    pub fn t_value(&self, a: usize) -> Result<Rational, RootError> {
        let s = self.alg.rank_s()?;
        if a == 0 || a > s {
            return Err(RootError::OutOfRange { index: a, max: s });
        }
        Ok(if a == 1 {
            int(2)
        } else if a < s {
            int(-2)
        } else {
            int(-1)
        })
    }

    /// Coordinates of `v` in the simple root basis, if `v` lies in its span.
    pub fn root_coordinates(&self, v: &BasisVector) -> Option<Vec<Rational>> {
        solve_columns(&self.roots, v)
    }
}

/// Solves `sum_i c_i cols[i] = v` exactly; `None` when inconsistent.
pub fn solve_columns(cols: &[BasisVector], v: &BasisVector) -> Option<Vec<Rational>> {
    let rows = v.len();
    let ncol = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c.coeffs[r].clone()).collect();
            row.push(v.coeffs[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncol {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let lead = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &lead;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=ncol {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[ncol].is_zero()) {
        return None;
    }
    let mut out = vec![Rational::zero(); ncol];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = m[i][ncol].clone();
    }
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VacuumSpec {
    Trivial,
    Fundamental,
}

impl FromStr for VacuumSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trivial" => Ok(VacuumSpec::Trivial),
            "fundamental" => Ok(VacuumSpec::Fundamental),
            _ => Err(format!(
                "unknown vacuum {:?}; expected trivial or fundamental",
                s
            )),
        }
    }
}

/// `R(x)` with `u` standing for `x = u_k^(b)`, so that the Bethe equation for
/// that root reads `R(u_k^(b)) = -1`.
pub fn bae_ratio_expr(rs: &SimpleRootSystem, b: usize, vacuum: VacuumSpec) -> QExpr {
    let sign = if rs.deg(b) == 1 { -1 } else { 1 };
    let mut factors = Vec::new();
    for c in 1..=rs.colors() {
        let p = rs.pairing(b, c);
        if p.is_zero() {
            continue;
        }
        factors.push(QFactor::q(c, p.clone(), 1));
        factors.push(QFactor::q(c, -p, -1));
    }
    if vacuum == VacuumSpec::Fundamental && b == 1 {
        if let Ok(t) = rs.t_value(1) {
            let h = Rational::one() / t;
            factors.push(QFactor::phi(-&h, 1));
            factors.push(QFactor::phi(h, -1));
        }
    }
    QExpr::monomial(QMonomial::new(BigInt::from(sign), factors))
}
