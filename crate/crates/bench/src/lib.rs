//! Benchmark fixtures for cstrap.

use cstrap::dvf::{column_dvf, row_dvf};
use cstrap::rootdata::{AlgebraId, VacuumSpec};
use cstrap::verify::PoleContext;
use cstrap::QExpr;

/// `(name, rank, expression)` for the column and row DVFs of C(3).
pub fn c3_dvfs() -> Vec<(String, usize, QExpr)> {
    let mut v: Vec<_> = (1..=3)
        .map(|a| {
            (
                format!("col:{a}"),
                3,
                column_dvf(3, a, VacuumSpec::Trivial).unwrap(),
            )
        })
        .collect();
    v.extend((1..=2).map(|m| {
        (
            format!("row:{m}"),
            3,
            row_dvf(3, m, VacuumSpec::Trivial).unwrap(),
        )
    }));
    v
}

pub fn c3_context() -> PoleContext {
    PoleContext::new(AlgebraId::C(3), VacuumSpec::Trivial)
}
