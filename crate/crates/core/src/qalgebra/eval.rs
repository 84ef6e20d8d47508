use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::{FactorKind, QExpr, QMonomial, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum PhiMode {
    /// `Phi(u) = u`.
    Rational,
    /// `Phi(u) = (q^u - q^-u) / (q - q^-1)`, floating point only.
    Trigonometric(f64),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("pole: {kind:?} at shift {shift} vanishes on root {root}")]
    PoleHit {
        kind: FactorKind,
        root: usize,
        shift: Rational,
    },
    #[error("pole of color {color} at shift {shift} is not simple")]
    NonSimplePole { color: usize, shift: Rational },
    #[error("color {0} has no root list")]
    ColorOutOfRange(usize),
    #[error("root index {index} out of range for color {color}")]
    RootOutOfRange { color: usize, index: usize },
    #[error("phi mode not available for this scalar type")]
    UnsupportedPhi,
    #[error("shift {0} has no image in the scalar field")]
    NotRepresentable(Rational),
}

/// Concrete Bethe roots `u_j^(a)` (indexed by `color - 1`) and
/// inhomogeneities `w_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootAssignment<S = Rational> {
    pub roots: Vec<Vec<S>>,
    pub inhom: Vec<S>,
    pub phi: PhiMode,
}

impl<S: Scalar> RootAssignment<S> {
    pub fn new(roots: Vec<Vec<S>>, inhom: Vec<S>) -> Self {
        RootAssignment {
            roots,
            inhom,
            phi: PhiMode::Rational,
        }
    }

    pub fn rank(&self) -> usize {
        self.roots.len()
    }

    pub fn color_roots(&self, color: usize) -> Result<&[S], EvalError> {
        if color == 0 || color > self.roots.len() {
            return Err(EvalError::ColorOutOfRange(color));
        }
        Ok(&self.roots[color - 1])
    }

    pub fn root(&self, color: usize, k: usize) -> Result<&S, EvalError> {
        self.color_roots(color)?
            .get(k)
            .ok_or(EvalError::RootOutOfRange { color, index: k })
    }

    /// All roots and inhomogeneities negated.
    pub fn negated(&self) -> Self {
        RootAssignment {
            roots: self
                .roots
                .iter()
                .map(|c| c.iter().map(|x| -x.clone()).collect())
                .collect(),
            inhom: self.inhom.iter().map(|x| -x.clone()).collect(),
            phi: self.phi.clone(),
        }
    }

    pub fn with_root(&self, color: usize, k: usize, value: S) -> Self {
        let mut out = self.clone();
        out.roots[color - 1][k] = value;
        out
    }

    fn phi(&self, x: &S) -> Result<S, EvalError> {
        S::phi(&self.phi, x).ok_or(EvalError::UnsupportedPhi)
    }

    fn list(&self, kind: FactorKind) -> Result<&[S], EvalError> {
        match kind {
            FactorKind::Q(a) => self.color_roots(a),
            FactorKind::Phi => Ok(&self.inhom),
        }
    }
}

impl RootAssignment<Rational> {
    pub fn convert<T: Scalar>(&self) -> Option<RootAssignment<T>> {
        let conv = |v: &Vec<Rational>| v.iter().map(T::from_rational).collect::<Option<Vec<T>>>();
        Some(RootAssignment {
            roots: self.roots.iter().map(conv).collect::<Option<Vec<_>>>()?,
            inhom: conv(&self.inhom)?,
            phi: self.phi.clone(),
        })
    }
}

fn lift<S: Scalar>(r: &Rational) -> Result<S, EvalError> {
    S::from_rational(r).ok_or_else(|| EvalError::NotRepresentable(r.clone()))
}

fn lift_int<S: Scalar>(n: &BigInt) -> Result<S, EvalError> {
    lift(&Rational::from_integer(n.clone()))
}

fn signed_pow<S: Scalar>(x: &S, e: i32) -> S {
    if e >= 0 {
        x.powi(e as u32)
    } else {
        S::one() / x.powi(e.unsigned_abs())
    }
}

/// Per-root values `Phi(u + shift - r_j)` of one factor, with the index of a
/// vanishing entry if any.
struct FactorValue<S> {
    product: S,
    zero_at: Option<usize>,
}

struct Evaluator<'a, S: Scalar> {
    a: &'a RootAssignment<S>,
    u: S,
    cache: HashMap<(FactorKind, Rational), FactorValue<S>>,
}

impl<'a, S: Scalar> Evaluator<'a, S> {
    fn new(a: &'a RootAssignment<S>, u: S) -> Self {
        Evaluator {
            a,
            u,
            cache: HashMap::new(),
        }
    }

    fn factor(
        &mut self,
        kind: FactorKind,
        shift: &Rational,
        skip: Option<usize>,
    ) -> Result<FactorValue<S>, EvalError> {
        if skip.is_none() {
            if let Some(v) = self.cache.get(&(kind, shift.clone())) {
                return Ok(FactorValue {
                    product: v.product.clone(),
                    zero_at: v.zero_at,
                });
            }
        }
        let base = self.u.clone() + lift::<S>(shift)?;
        let mut product = S::one();
        let mut zero_at = None;
        for (j, r) in self.a.list(kind)?.iter().enumerate() {
            if Some(j) == skip {
                continue;
            }
            let v = self.a.phi(&(base.clone() - r.clone()))?;
            if v.is_zero() {
                zero_at = Some(j);
            }
            product = product * v;
        }
        if skip.is_none() {
            self.cache.insert(
                (kind, shift.clone()),
                FactorValue {
                    product: product.clone(),
                    zero_at,
                },
            );
        }
        Ok(FactorValue { product, zero_at })
    }

    /// Value of `m`, optionally omitting one factor.
    fn monomial(
        &mut self,
        m: &QMonomial,
        omit: Option<(FactorKind, &Rational)>,
    ) -> Result<S, EvalError> {
        let mut acc = lift_int::<S>(m.coef())?;
        let mut zero = false;
        for f in m.factors() {
            if let Some((k, h)) = omit {
                if f.kind == k && &f.shift == h {
                    continue;
                }
            }
            let v = self.factor(f.kind, &f.shift, None)?;
            if let Some(root) = v.zero_at {
                if f.exp < 0 {
                    return Err(EvalError::PoleHit {
                        kind: f.kind,
                        root,
                        shift: f.shift.clone(),
                    });
                }
                zero = true;
            }
            acc = acc * signed_pow(&v.product, f.exp);
        }
        if zero {
            return Ok(S::zero());
        }
        Ok(acc)
    }
}

impl QExpr {
    /// Exact value at spectral parameter `u`.
    pub fn evaluate<S: Scalar>(&self, a: &RootAssignment<S>, u: &S) -> Result<S, EvalError> {
        let mut ev = Evaluator::new(a, u.clone());
        let mut total = S::zero();
        for m in self.terms() {
            total = total + ev.monomial(m, None)?;
        }
        Ok(total)
    }

    /// Values of the individual terms at `u`.
    pub fn evaluate_terms<S: Scalar>(
        &self,
        a: &RootAssignment<S>,
        u: &S,
    ) -> Result<Vec<S>, EvalError> {
        let mut ev = Evaluator::new(a, u.clone());
        self.terms().iter().map(|m| ev.monomial(m, None)).collect()
    }
}

/// Residues of the individual terms of `e` at `u* = u_k^(color) - shift`.
pub fn term_residues<S: Scalar>(
    e: &QExpr,
    a: &RootAssignment<S>,
    color: usize,
    k: usize,
    shift: &Rational,
) -> Result<Vec<S>, EvalError> {
    let kind = FactorKind::Q(color);
    let ustar = a.root(color, k)?.clone() - lift::<S>(shift)?;
    let dphi = S::phi_prime_zero(&a.phi).ok_or(EvalError::UnsupportedPhi)?;
    let mut ev = Evaluator::new(a, ustar);
    let mut out = Vec::with_capacity(e.len());
    for m in e.terms() {
        let exp = m.exponent(kind, shift);
        if exp < -1 {
            return Err(EvalError::NonSimplePole {
                color,
                shift: shift.clone(),
            });
        }
        if exp == -1 {
            let rest = match ev.monomial(m, Some((kind, shift))) {
                Ok(v) => v,
                Err(EvalError::PoleHit { .. }) => {
                    return Err(EvalError::NonSimplePole {
                        color,
                        shift: shift.clone(),
                    })
                }
                Err(err) => return Err(err),
            };
            let others = ev.factor(kind, shift, Some(k))?;
            if others.zero_at.is_some() {
                return Err(EvalError::NonSimplePole {
                    color,
                    shift: shift.clone(),
                });
            }
            out.push(rest / (others.product * dphi.clone()));
        } else {
            match ev.monomial(m, None) {
                Ok(_) => out.push(S::zero()),
                Err(EvalError::PoleHit { .. }) => {
                    return Err(EvalError::NonSimplePole {
                        color,
                        shift: shift.clone(),
                    })
                }
                Err(err) => return Err(err),
            }
        }
    }
    Ok(out)
}

/// Residue of `e` at `u* = u_k^(color) - shift`, where the factor
/// `Q_color(u + shift)` vanishes.
pub fn residue<S: Scalar>(
    e: &QExpr,
    a: &RootAssignment<S>,
    color: usize,
    k: usize,
    shift: &Rational,
) -> Result<S, EvalError> {
    Ok(term_residues(e, a, color, k, shift)?
        .into_iter()
        .fold(S::zero(), |acc, x| acc + x))
}

/// Lossy conversion used for diagnostics.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
