//! Registry of functional relations, each checked by exact evaluation of
//! both sides at random rational points.

use num_traits::Zero;
use serde_json::{json, Value};

use super::tsystem::{tsystem_evidence, InitialData, TSystemPoint};
use super::{random_assignment, random_rational, Report, Verdict, VerifyConfig, VerifyError};
use crate::dvf::{
    sixteen_term_fixture, column_dvf, deformed, fundamental_dvf, negative_row_dvf, row_dvf,
    row_dvf_signed, sl12_cal_f1, sl12_param, sl12_rect, sl12_row,
};
use crate::qalgebra::{int, rat, EvalError, QExpr, Rational, RootAssignment};
use crate::repth::c_weight_typical;
use crate::rootdata::{AlgebraId, VacuumSpec};

/// A signed sum of products of shifted expressions.
#[derive(Clone, Debug, Default)]
pub struct Side {
    terms: Vec<(i64, Vec<(QExpr, Rational)>)>,
}

impl Side {
    pub fn product(factors: Vec<(QExpr, Rational)>) -> Self {
        Side {
            terms: vec![(1, factors)],
        }
    }

    pub fn single(e: QExpr) -> Self {
        Side::product(vec![(e, Rational::zero())])
    }

    /// `e(u - h) e(u + h)`.
    pub fn pair(e: &QExpr, h: Rational) -> Self {
        Side::product(vec![(e.clone(), -h.clone()), (e.clone(), h)])
    }

    pub fn plus(mut self, o: Side) -> Self {
        self.terms.extend(o.terms);
        self
    }

    pub fn evaluate(&self, a: &RootAssignment, u: &Rational) -> Result<Rational, EvalError> {
        let mut total = Rational::zero();
        for (c, fs) in &self.terms {
            let mut p = Rational::from_integer((*c).into());
            for (e, h) in fs {
                p *= e.evaluate(a, &(u + h))?;
            }
            total += p;
        }
        Ok(total)
    }
}

/// Number of agreeing samples, or `None` at the first disagreement.
pub fn sampled_identity(
    salt: &str,
    colors: usize,
    lhs: &Side,
    rhs: &Side,
    cfg: &VerifyConfig,
) -> Result<Option<usize>, VerifyError> {
    let mut rng = cfg.rng(salt);
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
        let a = random_assignment(&mut rng, colors, 2, 0);
        let u = random_rational(&mut rng);
        match (lhs.evaluate(&a, &u), rhs.evaluate(&a, &u)) {
            (Ok(l), Ok(r)) if l == r => ok += 1,
            (Ok(_), Ok(_)) => return Ok(None),
            _ => continue,
        }
    }
    Ok(Some(ok))
}

struct Collector {
    details: Vec<Value>,
    verdict: Verdict,
}

impl Collector {
    fn new() -> Self {
        Collector {
            details: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    fn sampled(
        &mut self,
        label: Value,
        colors: usize,
        lhs: &Side,
        rhs: &Side,
        cfg: &VerifyConfig,
    ) -> Result<(), VerifyError> {
        let r = sampled_identity(&label.to_string(), colors, lhs, rhs, cfg)?;
        self.verdict = self.verdict.and(Verdict::from_bool(r.is_some()));
        self.details
            .push(json!({ "case": label, "samples": r, "pass": r.is_some() }));
        Ok(())
    }

    fn structural(&mut self, label: Value, a: &QExpr, b: &QExpr) {
        let ok = a.sub(b).is_empty();
        self.verdict = self.verdict.and(Verdict::from_bool(ok));
        self.details
            .push(json!({ "case": label, "structural": true, "pass": ok }));
    }

    fn report(self, check: &str, cfg: &VerifyConfig) -> Report {
        Report {
            check: check.to_string(),
            mode: "sampled-exact".into(),
            sites: None,
            samples: Some(cfg.samples),
            verdict: self.verdict,
            details: self.details,
        }
    }
}

/// Relations defined for an algebra.
pub fn relation_ids(alg: AlgebraId) -> Vec<String> {
    match alg {
        AlgebraId::Sl12 => ["dotfun1", "dotfun2", "hiro", "vani", "alta"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        AlgebraId::C(2) => ["eq-c2-1", "eq-c2-2", "c2-sl12", "tsys"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        AlgebraId::C(s) => {
            let mut v = vec!["i".to_string(), "ii".to_string()];
            for k in 1..=8 {
                if !iii_range(s, k).is_empty() {
                    v.push(format!("iii-{k}"));
                }
            }
            v.push("t-sys1".into());
            v.push("tsys".into());
            if s == 3 {
                v.push("sixteen-term".into());
            }
            v
        }
    }
}

/// Values of `m` covered by special case `k` of the `cal T` bilinear relation.
fn iii_range(s: usize, k: usize) -> Vec<usize> {
    if s < 3 {
        return Vec::new();
    }
    match k {
        1 => (1..=s.saturating_sub(3)).collect(),
        2 => vec![s - 2],
        3 => vec![s - 1],
        4 => vec![s],
        5 => (s + 1..=2 * s - 3).collect(),
        6 => vec![2 * s - 2],
        7 => vec![2 * s - 1],
        8 => vec![2 * s, 2 * s + 1],
        _ => Vec::new(),
    }
}

/// `cal T_m` written through `T_m^(1)` and `T_1^(a)` as in the special cases.
fn cal_t_split(s: usize, m: usize) -> Result<QExpr, VerifyError> {
    let t = |k: usize| row_dvf(s, k, VacuumSpec::Trivial);
    Ok(if m + 2 <= s {
        t(m)?.add(&fundamental_dvf(s, m + 2)?)
    } else if m == s - 1 {
        t(m)?
    } else if m <= 2 * s - 2 {
        t(m)?.add(&t(2 * s - 2 - m)?)
    } else {
        t(m)?
    })
}

/// Sides of `T_1(u - 1/2) T_1(u + 1/2) = T_2^(1) + cal T^2` for a given `T_1`.
pub fn relation_i_sides(s: usize, t1: &QExpr) -> Result<(Side, Side), VerifyError> {
    let lhs = Side::pair(t1, rat(1, 2));
    let rhs = Side::single(row_dvf(s, 2, VacuumSpec::Trivial)?).plus(Side::single(column_dvf(
        s,
        2,
        VacuumSpec::Trivial,
    )?));
    Ok((lhs, rhs))
}

fn rank(alg: AlgebraId, id: &str, min: usize) -> Result<usize, VerifyError> {
    match alg {
        AlgebraId::C(s) if s >= min => Ok(s),
        _ => Err(VerifyError::OutOfRange {
            id: id.into(),
            what: alg.to_string(),
        }),
    }
}

fn relation_ii(s: usize, cfg: &VerifyConfig, col: &mut Collector) -> Result<(), VerifyError> {
    let mut rng = cfg.rng(&format!("ii-params:{s}"));
    let mut done = 0;
    while done < 3 {
        let c = random_rational(&mut rng);
        let d = random_rational(&mut rng);
        let shifted = [&c - &d, &c + &d, c.clone()];
        if !shifted.iter().all(|x| c_weight_typical(s, x)) {
            continue;
        }
        let lhs = Side::pair(&deformed(s, &c)?, &d / int(2));
        let rhs = Side::product(vec![
            (deformed(s, &(&c - &d))?, Rational::zero()),
            (deformed(s, &(&c + &d))?, Rational::zero()),
        ]);
        col.sampled(
            json!({ "c": c.to_string(), "d": d.to_string() }),
            s,
            &lhs,
            &rhs,
            cfg,
        )?;
        done += 1;
    }
    Ok(())
}

fn relation_iii(
    s: usize,
    k: usize,
    cfg: &VerifyConfig,
    col: &mut Collector,
) -> Result<(), VerifyError> {
    let ms = iii_range(s, k);
    if ms.is_empty() {
        return Err(VerifyError::OutOfRange {
            id: format!("iii-{k}"),
            what: format!("C({s})"),
        });
    }
    for m in ms {
        let lhs = Side::pair(&cal_t_split(s, m)?, rat(1, 2));
        let below = if m == 0 {
            QExpr::one()
        } else {
            cal_t_split(s, m - 1)?
        };
        let rhs = Side::product(vec![
            (below, Rational::zero()),
            (cal_t_split(s, m + 1)?, Rational::zero()),
        ]);
        col.sampled(json!({ "m": m }), s, &lhs, &rhs, cfg)?;
        col.structural(
            json!({ "m": m, "split_equals_deformed": true }),
            &cal_t_split(s, m)?,
            &deformed(s, &int(m as i64))?,
        );
    }
    Ok(())
}

fn negative_rows(s: usize, cfg: &VerifyConfig, col: &mut Collector) -> Result<(), VerifyError> {
    let neg = |j: usize| -> Result<QExpr, VerifyError> {
        Ok(if j == 0 {
            QExpr::one()
        } else {
            negative_row_dvf(s, j)?
        })
    };
    for m in 1..=3usize {
        let lhs = Side::pair(&neg(m)?, rat(1, 2));
        let rhs = if m == 1 {
            let t12 = fundamental_dvf(s, 2)?.add(&QExpr::one());
            Side::product(vec![(neg(2)?, Rational::zero()), (t12, Rational::zero())])
        } else {
            Side::product(vec![
                (neg(m - 1)?, Rational::zero()),
                (neg(m + 1)?, Rational::zero()),
            ])
        };
        col.sampled(json!({ "m": m }), s, &lhs, &rhs, cfg)?;
    }
    Ok(())
}

/// `F_{-m}^(1) = cal F^1_{m+1}`.
fn f_neg(m: usize) -> QExpr {
    sl12_cal_f1(m as i64 + 1)
}

fn sl12_relations(id: &str, cfg: &VerifyConfig, col: &mut Collector) -> Result<(), VerifyError> {
    let z = Rational::zero;
    match id {
        "dotfun1" => {
            for m in 1..=3usize {
                let lhs = Side::pair(&f_neg(m), int(1));
                let rhs = if m == 1 {
                    Side::product(vec![(f_neg(2), z()), (sl12_row(1).add(&QExpr::one()), z())])
                } else {
                    Side::product(vec![(f_neg(m - 1), z()), (f_neg(m + 1), z())])
                };
                col.sampled(json!({ "m": m }), 2, &lhs, &rhs, cfg)?;
                col.structural(
                    json!({ "m": m, "rect_2_m": true }),
                    &f_neg(m),
                    &sl12_rect(2, m),
                );
            }
        }
        "dotfun2" => {
            for m in 1..=3usize {
                let lhs = Side::pair(&sl12_row(m), int(1));
                let rhs = Side::product(vec![(sl12_row(m + 1), z()), (sl12_row(m - 1), z())])
                    .plus(Side::single(f_neg(m)));
                col.sampled(json!({ "m": m }), 2, &lhs, &rhs, cfg)?;
                col.structural(
                    json!({ "m": m, "rect_m_1": true }),
                    &sl12_row(m),
                    &sl12_rect(1, m),
                );
            }
        }
        "hiro" => {
            for a in 1..=2usize {
                for m in 1..=3i64 {
                    let lhs = Side::pair(&sl12_rect(m, a), int(1));
                    let rhs =
                        Side::product(vec![(sl12_rect(m - 1, a), z()), (sl12_rect(m + 1, a), z())])
                            .plus(Side::product(vec![
                                (sl12_rect(m, a - 1), z()),
                                (sl12_rect(m, a + 1), z()),
                            ]));
                    col.sampled(json!({ "m": m, "a": a }), 2, &lhs, &rhs, cfg)?;
                }
            }
        }
        "vani" => {
            for m in 3..=5i64 {
                for a in 2..=3usize {
                    col.structural(json!({ "m": m, "a": a }), &sl12_rect(m, a), &QExpr::zero());
                }
            }
        }
        "alta" => {
            for a in 1..=4usize {
                col.structural(
                    json!({ "a": a }),
                    &sl12_rect(2, a),
                    &sl12_cal_f1(a as i64 + 1),
                );
            }
        }
        _ => return Err(VerifyError::UnknownRelation(id.into())),
    }
    Ok(())
}

fn c2_relations(id: &str, cfg: &VerifyConfig, col: &mut Collector) -> Result<(), VerifyError> {
    let z = Rational::zero;
    match id {
        "eq-c2-1" => negative_rows(2, cfg, col)?,
        "eq-c2-2" => {
            for m in 1..=3usize {
                let lhs = Side::pair(&sl12_row(m), int(1));
                let rhs = Side::product(vec![(sl12_row(m + 1), z()), (sl12_row(m - 1), z())])
                    .plus(Side::single(negative_row_dvf(2, 2 * m)?));
                col.sampled(json!({ "m": m }), 2, &lhs, &rhs, cfg)?;
            }
        }
        "c2-sl12" => {
            for m in -4..=4i64 {
                col.structural(
                    json!({ "m": m, "row": 1 }),
                    &row_dvf_signed(2, m)?,
                    &sl12_param(&rat(m, 2)),
                );
            }
            col.structural(
                json!({ "m": 1, "row": 2 }),
                &fundamental_dvf(2, 2)?,
                &sl12_row(1),
            );
            c2_recursion_matches(cfg, col)?;
        }
        _ => return Err(VerifyError::UnknownRelation(id.into())),
    }
    Ok(())
}

/// `T_m^(2)` from the C(2) recursion agrees with `F_m^(2)` pointwise.
fn c2_recursion_matches(cfg: &VerifyConfig, col: &mut Collector) -> Result<(), VerifyError> {
    let data = InitialData::new(2, 10)?;
    for m in 2..=4i64 {
        let f = sl12_row(m as usize);
        let mut rng = cfg.rng(&format!("c2-rec:{m}"));
        let mut ok = Some(0usize);
        let mut attempts = 0;
        while ok.is_some_and(|n| n < cfg.samples) && attempts < 10 * cfg.samples + 10 {
            attempts += 1;
            let a = random_assignment(&mut rng, 2, 2, 0);
            let u = random_rational(&mut rng);
            let direct = match f.evaluate(&a, &u) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let mut pt = TSystemPoint::new(&data, &a, u);
            match pt.t(2, m, &Rational::zero()) {
                Ok(v) if v == direct => ok = ok.map(|n| n + 1),
                Ok(_) => ok = None,
                Err(_) => continue,
            }
        }
        let pass = ok == Some(cfg.samples);
        col.verdict = col.verdict.and(Verdict::from_bool(pass));
        col.details.push(
            json!({ "case": { "m": m, "row": 2, "recursion": true }, "samples": ok, "pass": pass }),
        );
    }
    Ok(())
}

/// Runs relation `id` for algebra `alg`.
pub fn relation_check(id: &str, alg: AlgebraId, cfg: &VerifyConfig) -> Result<Report, VerifyError> {
    let mut col = Collector::new();
    match (alg, id) {
        (AlgebraId::Sl12, _) => sl12_relations(id, cfg, &mut col)?,
        (AlgebraId::C(2), "eq-c2-1" | "eq-c2-2" | "c2-sl12") => c2_relations(id, cfg, &mut col)?,
        (AlgebraId::C(s), "tsys") => return tsystem_evidence(s, 3, cfg),
        (_, "i") => {
            let s = rank(alg, id, 3)?;
            let (l, r) = relation_i_sides(s, &row_dvf(s, 1, VacuumSpec::Trivial)?)?;
            col.sampled(json!({ "s": s }), s, &l, &r, cfg)?;
        }
        (_, "ii") => relation_ii(rank(alg, id, 3)?, cfg, &mut col)?,
        (_, "t-sys1") => negative_rows(rank(alg, id, 3)?, cfg, &mut col)?,
        (_, "sixteen-term") => {
            rank(alg, id, 3).and_then(|s| {
                if s == 3 {
                    Ok(())
                } else {
                    Err(VerifyError::OutOfRange {
                        id: id.into(),
                        what: alg.to_string(),
                    })
                }
            })?;
            for c in [rat(7, 2), int(-1), int(2)] {
                let r = sixteen_term_match(&c, cfg)?;
                col.verdict = col.verdict.and(r.verdict);
                col.details.extend(r.details);
            }
        }
        (_, other) => match other
            .strip_prefix("iii-")
            .and_then(|k| k.parse::<usize>().ok())
        {
            Some(k) => relation_iii(rank(alg, id, 3)?, k, cfg, &mut col)?,
            None => return Err(VerifyError::UnknownRelation(id.into())),
        },
    }
    Ok(col.report(&format!("{id} {alg}"), cfg))
}

/// Structural match of `cal T_c` for C(3) with the published expansion,
/// plus agreement at 10 random points.
pub fn sixteen_term_match(c: &Rational, cfg: &VerifyConfig) -> Result<Report, VerifyError> {
    let built = deformed(3, c)?;
    let fixture = sixteen_term_fixture(c);
    let structural = built.sub(&fixture).is_empty() && built.len() == 16;
    let pts = VerifyConfig::new(cfg.seed, 10);
    let sampled = sampled_identity(
        &format!("sixteen-term:{c}"),
        3,
        &Side::single(built.clone()),
        &Side::single(fixture),
        &pts,
    )?;
    let ok = structural && sampled.is_some();
    Ok(Report {
        check: format!("sixteen-term c={c}"),
        mode: "structural".into(),
        sites: None,
        samples: Some(10),
        verdict: Verdict::from_bool(ok),
        details: vec![json!({
            "c": c.to_string(),
            "terms": built.len(),
            "structural": structural,
            "sampled": sampled,
        })],
    })
}
