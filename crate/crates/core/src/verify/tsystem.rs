//! Pointwise evaluation of the conjectured T-system for C(s), with the
//! evidence collected for it: sampled `T_{-m}^(1)` relations, symbolic
//! `T_2^(a)` with term counts and pole checks, and regularity of the
//! division steps modulo a prime.

use std::collections::HashMap;

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use super::poles::{check_dvf, CheckMode, PoleContext};
use super::{random_assignment, random_rational, Report, Verdict, VerifyConfig, VerifyError};
use crate::dvf::{fundamental_dvf, negative_row_dvf, row_dvf};
use crate::qalgebra::{int, rat, EvalError, Fp, QExpr, Rational, RootAssignment, Scalar};
use crate::repth::conjectured_count;
use crate::rootdata::{AlgebraId, VacuumSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TsysError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("T_{m}^({a}) divides by zero at this point")]
    ZeroDivisor { a: usize, m: i64 },
    #[error("T_-{0}^(1) was not precomputed")]
    MissingNegative(usize),
}

/// `T_{-j}^(1)` for `0 <= j <= max_neg` and `T_1^(a)` for `2 <= a <= s`.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub s: usize,
    neg: Vec<QExpr>,
    fund: Vec<QExpr>,
}

impl InitialData {
    pub fn new(s: usize, max_neg: usize) -> Result<Self, VerifyError> {
        let mut neg = vec![QExpr::one()];
        for j in 1..=max_neg {
            neg.push(negative_row_dvf(s, j)?);
        }
        let mut fund = vec![QExpr::zero(), row_dvf(s, 1, VacuumSpec::Trivial)?];
        for a in 2..=s {
            fund.push(fundamental_dvf(s, a)?);
        }
        Ok(InitialData { s, neg, fund })
    }

    pub fn negative(&self, j: usize) -> Option<&QExpr> {
        self.neg.get(j)
    }

    pub fn fundamental(&self, a: usize) -> &QExpr {
        &self.fund[a]
    }
}

/// Memoized values `T_m^(a)(u0 + shift)` at one point, computed from the
/// initial data by solving each relation for its highest index.
pub struct TSystemPoint<'a, S: Scalar> {
    data: &'a InitialData,
    roots: &'a RootAssignment<S>,
    u0: S,
    memo: HashMap<(usize, i64, Rational), S>,
}

/// `T_{m-1}^(a)(u-h) T_{m-1}^(a)(u+h) = T_m T_{m-2} + coupling`, split as
/// `(product, coupling, divisor)`.
pub struct Parts<S> {
    pub product: S,
    pub coupling: S,
    pub divisor: S,
}

impl<'a, S: Scalar> TSystemPoint<'a, S> {
    pub fn new(data: &'a InitialData, roots: &'a RootAssignment<S>, u0: S) -> Self {
        TSystemPoint {
            data,
            roots,
            u0,
            memo: HashMap::new(),
        }
    }

    fn at(&self, e: &QExpr, shift: &Rational) -> Result<S, TsysError> {
        let h =
            S::from_rational(shift).ok_or_else(|| EvalError::NotRepresentable(shift.clone()))?;
        Ok(e.evaluate(self.roots, &(self.u0.clone() + h))?)
    }

    /// `T_{-j}^(1)`.
    pub fn negative(&self, j: usize, shift: &Rational) -> Result<S, TsysError> {
        let e = self.data.negative(j).ok_or(TsysError::MissingNegative(j))?;
        self.at(e, shift)
    }

    /// `T_m^(a)` in the coupling role, where color 1 enters as `T_{-m}^(1)`.
    fn coupling_value(&mut self, a: usize, m: i64, shift: &Rational) -> Result<S, TsysError> {
        if a == 1 {
            self.negative(m as usize, shift)
        } else {
            self.t(a, m, shift)
        }
    }

    /// `T_m^(a)(u0 + shift)` for `2 <= a <= s`, `m >= 0`.
    pub fn t(&mut self, a: usize, m: i64, shift: &Rational) -> Result<S, TsysError> {
        if m == 0 {
            return Ok(S::one());
        }
        if m == 1 {
            return self.at(self.data.fundamental(a), shift);
        }
        let key = (a, m, shift.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let p = self.parts(a, m, shift)?;
        if p.divisor.is_zero() {
            return Err(TsysError::ZeroDivisor { a, m });
        }
        let v = (p.product - p.coupling) / p.divisor;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    pub fn parts(&mut self, a: usize, m: i64, shift: &Rational) -> Result<Parts<S>, TsysError> {
        let s = self.data.s;
        let k = m - 1;
        let h = if a == s { int(1) } else { rat(1, 2) };
        let product = self.t(a, k, &(shift - &h))? * self.t(a, k, &(shift + &h))?;
        let coupling = if a == s {
            self.coupling_value(s - 1, 2 * k, shift)?
        } else if a == s - 1 {
            let c = self.coupling_value(s - 2, k, shift)?;
            if k % 2 == 0 {
                let j = k / 2;
                let half = rat(1, 2);
                c * self.t(s, j, &(shift - &half))? * self.t(s, j, &(shift + &half))?
            } else {
                let j = (k + 1) / 2;
                c * self.t(s, j - 1, shift)? * self.t(s, j, shift)?
            }
        } else {
            self.coupling_value(a - 1, k, shift)? * self.t(a + 1, k, shift)?
        };
        let divisor = self.t(a, m - 2, shift)?;
        Ok(Parts {
            product,
            coupling,
            divisor,
        })
    }
}

/// `T_2^(a)` built symbolically; every division in this step is by `T_0 = 1`.
pub fn symbolic_t2(data: &InitialData, a: usize) -> QExpr {
    let s = data.s;
    let f = |b: usize| data.fundamental(b).clone();
    let coupling1 = |b: usize| if b == 1 { data.neg[1].clone() } else { f(b) };
    let sq = |e: &QExpr, h: Rational| e.shift(&-h.clone()).multiply(&e.shift(&h));
    if a == s {
        let c = if s - 1 == 1 {
            data.neg[2].clone()
        } else {
            symbolic_t2(data, s - 1)
        };
        sq(&f(s), int(1)).sub(&c)
    } else if a == s - 1 {
        sq(&f(a), rat(1, 2)).sub(&coupling1(s - 2).multiply(&f(s)))
    } else {
        sq(&f(a), rat(1, 2)).sub(&coupling1(a - 1).multiply(&f(a + 1)))
    }
}

/// Left and right sides of the `T_{-m}^(1)` relation at `(roots, u)`.
fn negative_relation(
    data: &InitialData,
    m: usize,
    a: &RootAssignment,
    u: &Rational,
) -> Result<(Rational, Rational), EvalError> {
    let h = rat(1, 2);
    let neg = |j: usize, x: &Rational| data.neg[j].evaluate(a, x);
    let lhs = neg(m, &(u - &h))? * neg(m, &(u + &h))?;
    let rhs = if m == 1 {
        neg(2, u)? * (data.fundamental(2).evaluate(a, u)? + Rational::one())
    } else {
        neg(m - 1, u)? * neg(m + 1, u)?
    };
    Ok((lhs, rhs))
}

fn sampled_negative_relation(
    data: &InitialData,
    m: usize,
    cfg: &VerifyConfig,
) -> Result<(bool, usize), VerifyError> {
    let mut rng = cfg.rng(&format!("tsys1:{}:{m}", data.s));
    let mut ok = 0;
    let mut attempts = 0;
    while ok < cfg.samples {
        attempts += 1;
        if attempts > 10 * cfg.samples + 10 {
            return Err(VerifyError::TooManyRetries {
                wanted: cfg.samples,
                got: ok,
            });
        }
        let a = random_assignment(&mut rng, data.s, 2, 0);
        let u = random_rational(&mut rng);
        match negative_relation(data, m, &a, &u) {
            Ok((l, r)) if l != r => return Ok((false, ok)),
            Ok(_) => ok += 1,
            Err(_) => continue,
        }
    }
    Ok((true, ok))
}

/// Division steps `(a, m)` with a nontrivial divisor that the recursion
/// reaches when computing every `T_m^(a)` with `m <= m_max`.
pub fn division_steps(s: usize, m_max: i64) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for a in 2..=s {
        let top = if a == s - 1 {
            (2 * (m_max - 1)).max(m_max)
        } else {
            m_max
        };
        for m in 3..=top {
            out.push((a, m));
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
struct RegularityTally {
    divisor_zeros: usize,
    violations: usize,
    control_violations: usize,
    skipped: usize,
}

fn in_window(u: Fp, roots: &RootAssignment<Fp>, width: i64) -> bool {
    let two = Fp::new(2);
    roots.roots.iter().flatten().any(|r| {
        let d = (two * (*r - u)).value() as i64;
        let p = crate::qalgebra::FP_MODULUS as i64;
        d <= width || p - d <= width
    })
}

/// Scans every `u` in the prime field: where the divisor of a division step
/// vanishes away from Q-zeros, the numerator must vanish as well. The same
/// numerator with the coupling sign flipped serves as a control.
fn regularity_scan(
    data: &InitialData,
    steps: &[(usize, i64)],
    seed_rng: &mut impl Rng,
    assignments: usize,
) -> Vec<RegularityTally> {
    let mut tally = vec![RegularityTally::default(); steps.len()];
    for _ in 0..assignments {
        let roots: Vec<Vec<Fp>> = (0..data.s)
            .map(|_| {
                (0..2)
                    .map(|_| Fp::new(seed_rng.random_range(0..10007)))
                    .collect()
            })
            .collect();
        let ra = RootAssignment::new(roots, Vec::new());
        for u in Fp::all() {
            if in_window(u, &ra, 24) {
                continue;
            }
            let mut pt = TSystemPoint::new(data, &ra, u);
            let zero = Rational::zero();
            for (i, &(a, m)) in steps.iter().enumerate() {
                let d = match pt.t(a, m - 2, &zero) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                if !d.is_zero() {
                    continue;
                }
                tally[i].divisor_zeros += 1;
                match pt.parts(a, m, &zero) {
                    Ok(p) => {
                        if p.product != p.coupling {
                            tally[i].violations += 1;
                        }
                        if p.product != -p.coupling {
                            tally[i].control_violations += 1;
                        }
                    }
                    Err(_) => tally[i].skipped += 1,
                }
            }
        }
    }
    tally
}

/// Evidence for the conjectured T-system of C(s) up to `m_max`.
pub fn tsystem_evidence(s: usize, m_max: i64, cfg: &VerifyConfig) -> Result<Report, VerifyError> {
    if s < 2 {
        return Err(VerifyError::OutOfRange {
            id: "tsys".into(),
            what: format!("C({s})"),
        });
    }
    let data = InitialData::new(s, (2 * m_max + 2) as usize)?;
    let mut details: Vec<Value> = Vec::new();
    let mut verdict = Verdict::Pass;

    for m in 1..=m_max as usize {
        let (ok, n) = sampled_negative_relation(&data, m, cfg)?;
        verdict = verdict.and(Verdict::from_bool(ok));
        details.push(json!({ "part": "negative-row", "m": m, "samples": n, "pass": ok }));
    }

    if s >= 3 {
        let ctx = PoleContext::new(AlgebraId::C(s), VacuumSpec::Trivial);
        for a in 2..=s {
            let e = symbolic_t2(&data, a);
            let expected = conjectured_count(s, a, 2).ok().and_then(|n| n.to_usize());
            let count_ok = expected == Some(e.multiplicity());
            let poles = check_dvf(&format!("T_2^({a})"), &e, &ctx, &[], cfg, CheckMode::Auto)?;
            let consistent = symbolic_matches_recursion(&data, &e, a, cfg)?;
            let ok = count_ok && poles.passed() && consistent;
            verdict = verdict.and(Verdict::from_bool(ok));
            details.push(json!({
                "part": "symbolic-T2",
                "a": a,
                "monomials": e.len(),
                "terms": e.multiplicity(),
                "conjectured": expected,
                "pole_free": poles.passed(),
                "matches_recursion": consistent,
                "pass": ok,
            }));
        }
    }

    let (computed, zero_divisors) = recursion_samples(&data, m_max, cfg)?;
    details.push(json!({
        "part": "recursion",
        "m_max": m_max,
        "samples": computed,
        "zero_divisor_resamples": zero_divisors,
    }));

    let steps = division_steps(s, m_max);
    let mut rng = cfg.rng(&format!("regularity:{s}:{m_max}"));
    let tally = regularity_scan(&data, &steps, &mut rng, 3);
    for (&(a, m), t) in steps.iter().zip(&tally) {
        let ok = t.violations == 0;
        let part = if t.divisor_zeros == t.skipped {
            Verdict::Inconclusive
        } else {
            Verdict::from_bool(ok)
        };
        verdict = verdict.and(part);
        details.push(json!({
            "part": "regularity-mod-p",
            "a": a,
            "m": m,
            "divisor_zeros": t.divisor_zeros,
            "violations": t.violations,
            "control_violations": t.control_violations,
            "skipped": t.skipped,
            "verdict": part,
        }));
    }

    Ok(Report {
        check: format!("tsys C({s})"),
        mode: "pointwise".into(),
        sites: None,
        samples: Some(cfg.samples),
        verdict,
        details,
    })
}

fn symbolic_matches_recursion(
    data: &InitialData,
    e: &QExpr,
    a: usize,
    cfg: &VerifyConfig,
) -> Result<bool, VerifyError> {
    let mut rng = cfg.rng(&format!("t2:{}:{a}", data.s));
    let mut ok = 0;
    for _ in 0..10 * cfg.samples + 10 {
        if ok == cfg.samples {
            break;
        }
        let ra = random_assignment(&mut rng, data.s, 2, 0);
        let u = random_rational(&mut rng);
        let direct = match e.evaluate(&ra, &u) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let mut pt = TSystemPoint::new(data, &ra, u);
        match pt.t(a, 2, &Rational::zero()) {
            Ok(v) if v == direct => ok += 1,
            Ok(_) => return Ok(false),
            Err(_) => continue,
        }
    }
    Ok(ok == cfg.samples)
}

/// Evaluates every `T_m^(a)`, `m <= m_max`, at random rational points.
fn recursion_samples(
    data: &InitialData,
    m_max: i64,
    cfg: &VerifyConfig,
) -> Result<(usize, usize), VerifyError> {
    let mut rng = cfg.rng(&format!("recursion:{}", data.s));
    let (mut ok, mut zero) = (0, 0);
    let mut attempts = 0;
    while ok < cfg.samples {
        attempts += 1;
        if attempts > 10 * cfg.samples + 10 {
            return Err(VerifyError::TooManyRetries {
                wanted: cfg.samples,
                got: ok,
            });
        }
        let ra = random_assignment(&mut rng, data.s, 2, 0);
        let u = random_rational(&mut rng);
        let mut pt = TSystemPoint::new(data, &ra, u);
        let all = (2..=data.s)
            .flat_map(|a| (0..=m_max).map(move |m| (a, m)))
            .try_for_each(|(a, m)| pt.t(a, m, &Rational::zero()).map(|_| ()));
        match all {
            Ok(()) => ok += 1,
            Err(TsysError::ZeroDivisor { .. }) => zero += 1,
            Err(_) => {}
        }
    }
    Ok((ok, zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn negative_relation_c3() {
        let data = InitialData::new(3, 4).unwrap();
        for m in 1..=3 {
            let (ok, _) = sampled_negative_relation(&data, m, &VerifyConfig::new(2, 5)).unwrap();
            assert!(ok, "m = {m}");
        }
    }

    #[test]
    fn symbolic_counts_c3() {
        let data = InitialData::new(3, 4).unwrap();
        let t22 = symbolic_t2(&data, 2);
        assert_eq!((t22.len(), t22.multiplicity()), (63, 65));
        assert_eq!(symbolic_t2(&data, 3).multiplicity(), 35);
    }

    #[test]
    fn division_steps_c3() {
        assert_eq!(division_steps(3, 3), vec![(2, 3), (2, 4), (3, 3)]);
    }

    #[test]
    fn recursion_matches_fp_and_rational() {
        let data = InitialData::new(3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ra = random_assignment(&mut rng, 3, 2, 0);
        let u = random_rational(&mut rng);
        let mut pt = TSystemPoint::new(&data, &ra, u.clone());
        let v = pt.t(2, 3, &Rational::zero()).unwrap();
        let rf: RootAssignment<Fp> = ra.convert().unwrap();
        let uf = Fp::from_rational(&u).unwrap();
        let mut pf = TSystemPoint::new(&data, &rf, uf);
        assert_eq!(
            Fp::from_rational(&v),
            Some(pf.t(2, 3, &Rational::zero()).unwrap())
        );
    }
}
