use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{parse_rational, FactorKind, QExpr, QFactor, QMonomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonFactor {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub color: Option<usize>,
    pub shift: String,
    pub exp: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub coef: String,
    pub factors: Vec<JsonFactor>,
}

pub fn expr_to_json(e: &QExpr) -> Vec<JsonTerm> {
    e.terms()
        .iter()
        .map(|t| JsonTerm {
            coef: t.coef().to_string(),
            factors: t
                .factors()
                .iter()
                .map(|f| JsonFactor {
                    kind: match f.kind {
                        FactorKind::Q(_) => "Q".into(),
                        FactorKind::Phi => "phi".into(),
                    },
                    color: match f.kind {
                        FactorKind::Q(a) => Some(a),
                        FactorKind::Phi => None,
                    },
                    shift: f.shift.to_string(),
                    exp: f.exp,
                })
                .collect(),
        })
        .collect()
}

pub fn expr_from_json(terms: &[JsonTerm]) -> Result<QExpr, String> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let coef: BigInt = t
            .coef
            .parse()
            .map_err(|_| format!("bad coefficient {:?}", t.coef))?;
        let mut factors = Vec::with_capacity(t.factors.len());
        for f in &t.factors {
            let shift =
                parse_rational(&f.shift).ok_or_else(|| format!("bad shift {:?}", f.shift))?;
            if f.exp == 0 {
                return Err("zero exponent".into());
            }
            let kind = match (f.kind.as_str(), f.color) {
                ("Q", Some(a)) if a >= 1 => FactorKind::Q(a),
                ("phi", None) => FactorKind::Phi,
                _ => return Err(format!("bad factor kind {:?}/{:?}", f.kind, f.color)),
            };
            factors.push(QFactor {
                kind,
                shift,
                exp: f.exp,
            });
        }
        out.push(QMonomial::new(coef, factors));
    }
    Ok(QExpr::raw(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::tests::arb_expr;
    use proptest::prelude::*;

    #[test]
    fn schema_shape() {
        let m = QMonomial::new(
            BigInt::from(-1),
            [
                QFactor::q(2, crate::qalgebra::rat(-7, 2), -1),
                QFactor::phi(crate::qalgebra::int(1), 1),
            ],
        );
        let v = serde_json::to_value(expr_to_json(&QExpr::monomial(m))).unwrap();
        assert_eq!(
            v,
            serde_json::json!([{"coef": "-1", "factors": [
                {"kind": "Q", "color": 2, "shift": "-7/2", "exp": -1},
                {"kind": "phi", "shift": "1", "exp": 1}
            ]}])
        );
    }

    proptest! {
        #[test]
        fn round_trip(e in arb_expr()) {
            let e = e.normalize();
            let text = serde_json::to_string(&expr_to_json(&e)).unwrap();
            let back: Vec<JsonTerm> = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(expr_from_json(&back).unwrap(), e);
        }
    }
}
