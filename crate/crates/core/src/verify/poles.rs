use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::{random_assignment, ser_rat, Report, Verdict, VerifyConfig, VerifyError};
use crate::qalgebra::{int, term_residues, EvalError, FactorKind, PhiMode, QExpr, Rational};
use crate::qalgebra::{QFactor, QMonomial, RootAssignment};
use crate::rootdata::{bae_ratio_expr, AlgebraId, SimpleRootSystem, VacuumSpec};

/// A denominator factor `Q_color(u + shift)`; its poles sit at
/// `u = u_k^(color) - shift`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PoleSite {
    pub color: usize,
    #[serde(serialize_with = "ser_rat")]
    pub shift: Rational,
}

impl PoleSite {
    pub fn new(color: usize, shift: Rational) -> Self {
        PoleSite { color, shift }
    }

    /// The `b` of a strap label `(a, b)`: the pole is at `u_k^(a) + b`.
    pub fn offset(&self) -> Rational {
        -self.shift.clone()
    }
}

pub fn scan_poles(e: &QExpr) -> Vec<PoleSite> {
    e.denominator_sites()
        .into_iter()
        .map(|(c, h)| PoleSite::new(c, h))
        .collect()
}

/// The color-1 site `u + c/2 - s + 1` of the prefactor of `cal T_c`.
pub fn prefactor_site(s: usize, c: &Rational) -> PoleSite {
    PoleSite::new(1, c / int(2) - int(s as i64 - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    ExactRatio,
    NumericTotal,
    /// Exact first, numeric only where the exact pairing is incomplete.
    Auto,
}

impl std::str::FromStr for CheckMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "exact-ratio" => Ok(CheckMode::ExactRatio),
            "numeric" | "numeric-total" => Ok(CheckMode::NumericTotal),
            "auto" => Ok(CheckMode::Auto),
            _ => Err(format!(
                "unknown mode {s:?}; expected exact, numeric or auto"
            )),
        }
    }
}

/// `Res(target) = R(u_k) Res(source)` at every sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairResult {
    pub source: usize,
    pub target: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericResidue {
    pub total: f64,
    pub max_term: f64,
    pub relative: f64,
    pub newton_iterations: usize,
    pub restarts: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CancellationReport {
    pub site: PoleSite,
    pub participating: Vec<usize>,
    pub pairs: Vec<PairResult>,
    pub leftovers: Vec<usize>,
    pub mode: CheckMode,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericResidue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Algebra, vacuum and the Bethe ratio of each color.
#[derive(Clone, Debug)]
pub struct PoleContext {
    pub algebra: AlgebraId,
    pub vacuum: VacuumSpec,
    ratios: Vec<QExpr>,
    parts: Vec<(QExpr, QExpr)>,
}

impl PoleContext {
    pub fn new(algebra: AlgebraId, vacuum: VacuumSpec) -> Self {
        let rs = SimpleRootSystem::new(algebra);
        let ratios: Vec<QExpr> = (1..=rs.colors())
            .map(|b| bae_ratio_expr(&rs, b, vacuum))
            .collect();
        let parts = ratios.iter().map(split_ratio).collect();
        PoleContext {
            algebra,
            vacuum,
            ratios,
            parts,
        }
    }

    /// A context with explicitly given Bethe ratios, one per color.
    pub fn custom(algebra: AlgebraId, vacuum: VacuumSpec, ratios: Vec<QExpr>) -> Self {
        let parts = ratios.iter().map(split_ratio).collect();
        PoleContext {
            algebra,
            vacuum,
            ratios,
            parts,
        }
    }

    pub fn colors(&self) -> usize {
        self.ratios.len()
    }

    pub fn ratio(&self, b: usize) -> &QExpr {
        &self.ratios[b - 1]
    }

    /// Numerator and denominator of the Bethe ratio, so that the equation
    /// reads `num + den = 0`.
    pub fn ratio_parts(&self, b: usize) -> (&QExpr, &QExpr) {
        let (n, d) = &self.parts[b - 1];
        (n, d)
    }

    fn inhomogeneities(&self) -> usize {
        match self.vacuum {
            VacuumSpec::Trivial => 0,
            VacuumSpec::Fundamental => 2,
        }
    }
}

fn split_ratio(r: &QExpr) -> (QExpr, QExpr) {
    let m = &r.terms()[0];
    let pick = |sign: i32| {
        m.factors()
            .iter()
            .filter(|f| f.exp * sign > 0)
            .map(|f| QFactor {
                exp: f.exp.abs(),
                ..f.clone()
            })
            .collect::<Vec<_>>()
    };
    (
        QExpr::monomial(QMonomial::new(m.coef().clone(), pick(1))),
        QExpr::monomial(QMonomial::new(BigInt::one(), pick(-1))),
    )
}

const ROOTS_PER_COLOR: usize = 2;

fn participating(e: &QExpr, site: &PoleSite) -> (Vec<usize>, i32) {
    let kind = FactorKind::Q(site.color);
    let mut idx = Vec::new();
    let mut worst = 0;
    for (i, t) in e.terms().iter().enumerate() {
        let x = t.exponent(kind, &site.shift);
        if x < 0 {
            idx.push(i);
            worst = worst.min(x);
        }
    }
    (idx, worst)
}

fn empty_report(site: &PoleSite, mode: CheckMode, note: &str) -> CancellationReport {
    CancellationReport {
        site: site.clone(),
        participating: Vec::new(),
        pairs: Vec::new(),
        leftovers: Vec::new(),
        mode,
        verdict: Verdict::Pass,
        numeric: None,
        note: Some(note.to_string()),
    }
}

/// Perfect matching on `n` nodes where `ok(i, j)` is symmetric; the first
/// compatible partner in index order is tried first.
fn perfect_matching(n: usize, ok: &dyn Fn(usize, usize) -> bool) -> Option<Vec<(usize, usize)>> {
    fn rec(
        used: &mut Vec<bool>,
        ok: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<(usize, usize)>,
    ) -> bool {
        let Some(i) = used.iter().position(|u| !u) else {
            return true;
        };
        used[i] = true;
        for j in i + 1..used.len() {
            if !used[j] && ok(i, j) {
                used[j] = true;
                out.push((i, j));
                if rec(used, ok, out) {
                    return true;
                }
                out.pop();
                used[j] = false;
            }
        }
        used[i] = false;
        false
    }
    let mut out = Vec::new();
    rec(&mut vec![false; n], ok, &mut out).then_some(out)
}

/// Greedy pairing that leaves unmatched terms over.
fn greedy_matching(
    n: usize,
    ok: &dyn Fn(usize, usize) -> bool,
) -> (Vec<(usize, usize)>, Vec<usize>) {
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        if let Some(j) = (i + 1..n).find(|&j| !used[j] && ok(i, j)) {
            used[i] = true;
            used[j] = true;
            pairs.push((i, j));
        }
    }
    let left = (0..n).filter(|&i| !used[i]).collect();
    (pairs, left)
}

/// Pairs the terms sharing the pole at `site` so that within each pair the
/// residues satisfy `Res Y / Res X = R(u_k)`, as an identity checked at
/// `cfg.samples` random rational root assignments.
pub fn exact_cancellation_check(
    e: &QExpr,
    ctx: &PoleContext,
    site: &PoleSite,
    cfg: &VerifyConfig,
) -> Result<CancellationReport, VerifyError> {
    let (idx, worst) = participating(e, site);
    if idx.is_empty() {
        return Ok(empty_report(
            site,
            CheckMode::ExactRatio,
            "no term has this pole",
        ));
    }
    if worst < -1 {
        return Ok(CancellationReport {
            site: site.clone(),
            leftovers: idx.clone(),
            participating: idx,
            pairs: Vec::new(),
            mode: CheckMode::ExactRatio,
            verdict: Verdict::Fail,
            numeric: None,
            note: Some("higher-order pole in a single term".into()),
        });
    }
    let sub = QExpr::raw(idx.iter().map(|&i| e.terms()[i].clone()).collect());
    let mut rng = cfg.rng(&format!("exact:{}:{}:{}", site.color, site.shift, e.len()));
    let mut samples: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut attempts = 0;
    while samples.len() < cfg.samples && attempts < 10 * cfg.samples + 10 {
        attempts += 1;
        let a = random_assignment(
            &mut rng,
            ctx.colors(),
            ROOTS_PER_COLOR,
            ctx.inhomogeneities(),
        );
        let x = a.roots[site.color - 1][0].clone();
        let r = match ctx.ratio(site.color).evaluate(&a, &x) {
            Ok(r) => r,
            Err(_) => continue,
        };
        match term_residues(&sub, &a, site.color, 0, &site.shift) {
            Ok(res) => samples.push((res, r)),
            Err(EvalError::NonSimplePole { .. } | EvalError::PoleHit { .. }) => continue,
            Err(err) => return Err(err.into()),
        }
    }
    if samples.len() < cfg.samples {
        return Err(VerifyError::TooManyRetries {
            wanted: cfg.samples,
            got: samples.len(),
        });
    }
    let n = idx.len();
    let directed = |i: usize, j: usize| samples.iter().all(|(res, r)| res[j] == r * &res[i]);
    let ok = |i: usize, j: usize| directed(i, j) || directed(j, i);
    let (pairs, leftovers) = match perfect_matching(n, &ok) {
        Some(p) => (p, Vec::new()),
        None => greedy_matching(n, &ok),
    };
    let pairs: Vec<PairResult> = pairs
        .into_iter()
        .map(|(i, j)| {
            let (source, target) = if directed(i, j) { (i, j) } else { (j, i) };
            PairResult {
                source: idx[source],
                target: idx[target],
                pass: true,
            }
        })
        .collect();
    let leftovers: Vec<usize> = leftovers.into_iter().map(|i| idx[i]).collect();
    Ok(CancellationReport {
        site: site.clone(),
        verdict: Verdict::from_bool(leftovers.is_empty()),
        participating: idx,
        pairs,
        leftovers,
        mode: CheckMode::ExactRatio,
        numeric: None,
        note: None,
    })
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

/// Solves the single Bethe equation `R(u_0^(b)) = -1` for one root with all
/// others random, then sums the residues of every term at the site.
pub fn numeric_total_residue(
    e: &QExpr,
    ctx: &PoleContext,
    site: &PoleSite,
    seed: u64,
    phi: &PhiMode,
) -> Result<NumericResidue, VerifyError> {
    const MAX_ITER: usize = 50;
    const RESTARTS: usize = 20;
    let b = site.color;
    let ratio = ctx.ratio(b);
    let order = -participating(e, site).1;
    let cfg = VerifyConfig::new(seed, 0);
    let mut rng = cfg.rng(&format!("numeric:{}:{}:{}", b, site.shift, e.len()));
    let one = Complex64::new(1.0, 0.0);
    for restart in 0..RESTARTS {
        let roots: Vec<Vec<Complex64>> = (0..ctx.colors())
            .map(|_| {
                (0..ROOTS_PER_COLOR)
                    .map(|_| random_complex(&mut rng))
                    .collect()
            })
            .collect();
        let inhom = (0..ctx.inhomogeneities())
            .map(|_| random_complex(&mut rng))
            .collect();
        let mut base = RootAssignment::new(roots, inhom);
        base.phi = phi.clone();
        let (num, den) = ctx.ratio_parts(b);
        let g = |x: Complex64| -> Option<(Complex64, f64)> {
            let a = base.with_root(b, 0, x);
            let p = num.evaluate(&a, &x).ok()?;
            let q = den.evaluate(&a, &x).ok()?;
            Some((p + q, p.norm() + q.norm()))
        };
        let mut x = base.roots[b - 1][0];
        let mut converged = None;
        for it in 0..MAX_ITER {
            let Some((gx, scale)) = g(x) else { break };
            if gx.norm() <= 1e-14 * scale {
                converged = Some(it);
                break;
            }
            let h = 1e-6 * (1.0 + x.norm());
            let (Some((gp, _)), Some((gm, _))) = (g(x + h), g(x - h)) else {
                break;
            };
            let d = (gp - gm) / (2.0 * h);
            if d.norm() == 0.0 || !d.is_finite() {
                break;
            }
            x -= gx / d;
            if !x.is_finite() || x.norm() > 1e6 {
                break;
            }
        }
        let Some(iters) = converged else { continue };
        let bae = ratio
            .evaluate(&base.with_root(b, 0, x), &x)
            .map(|r| (r + one).norm());
        if !matches!(bae, Ok(v) if v < 1e-10) {
            continue;
        }
        let a = base.with_root(b, 0, x);
        let parts = if order <= 1 {
            term_residues(e, &a, b, 0, &site.shift).map(|r| vec![r])
        } else {
            laurent_coefficients(e, &a, x - lift(&site.shift), order)
        };
        let parts = match parts {
            Ok(r) => r,
            Err(EvalError::PoleHit { .. } | EvalError::NonSimplePole { .. }) => continue,
            Err(err) => return Err(err.into()),
        };
        let mut total = 0.0f64;
        let mut max_term = 0.0f64;
        let mut relative = 0.0f64;
        for coeffs in &parts {
            let t = coeffs
                .iter()
                .fold(Complex64::zero(), |acc, r| acc + r)
                .norm();
            let m = coeffs.iter().map(|r| r.norm()).fold(0.0, f64::max);
            total = total.max(t);
            max_term = max_term.max(m);
            if m > 0.0 {
                relative = relative.max(t / m);
            }
        }
        return Ok(NumericResidue {
            total,
            max_term,
            relative,
            newton_iterations: iters,
            restarts: restart,
        });
    }
    Err(VerifyError::NoConvergence(RESTARTS))
}

fn lift(r: &Rational) -> Complex64 {
    Complex64::new(crate::qalgebra::to_f64(r), 0.0)
}

/// Per-term Laurent coefficients `c_{-k}`, `k = 1..=order`, around `center`,
/// by the trapezoidal rule on a small circle.
fn laurent_coefficients(
    e: &QExpr,
    a: &RootAssignment<Complex64>,
    center: Complex64,
    order: i32,
) -> Result<Vec<Vec<Complex64>>, EvalError> {
    const POINTS: usize = 64;
    const RADIUS: f64 = 1e-3;
    let mut out = vec![vec![Complex64::zero(); e.len()]; order as usize];
    for j in 0..POINTS {
        let w = Complex64::from_polar(
            RADIUS,
            2.0 * std::f64::consts::PI * j as f64 / POINTS as f64,
        );
        let vals = e.evaluate_terms(a, &(center + w))?;
        for (k, row) in out.iter_mut().enumerate() {
            let wk = w.powu(k as u32 + 1) / POINTS as f64;
            for (c, v) in row.iter_mut().zip(&vals) {
                *c += v * wk;
            }
        }
    }
    Ok(out)
}

pub const NUMERIC_TOLERANCE: f64 = 1e-8;

fn numeric_report(
    e: &QExpr,
    ctx: &PoleContext,
    site: &PoleSite,
    cfg: &VerifyConfig,
    mut base: CancellationReport,
) -> Result<CancellationReport, VerifyError> {
    let num = numeric_total_residue(e, ctx, site, cfg.seed, &PhiMode::Rational)?;
    base.mode = CheckMode::NumericTotal;
    base.verdict = Verdict::from_bool(num.relative < NUMERIC_TOLERANCE);
    base.numeric = Some(num);
    Ok(base)
}

/// One site in the requested mode; `Auto` falls back to the numeric total
/// residue when the exact pairing leaves terms over.
pub fn check_site(
    e: &QExpr,
    ctx: &PoleContext,
    site: &PoleSite,
    cfg: &VerifyConfig,
    mode: CheckMode,
) -> Result<CancellationReport, VerifyError> {
    match mode {
        CheckMode::ExactRatio => exact_cancellation_check(e, ctx, site, cfg),
        CheckMode::NumericTotal => {
            let (idx, _) = participating(e, site);
            let base = CancellationReport {
                site: site.clone(),
                participating: idx,
                pairs: Vec::new(),
                leftovers: Vec::new(),
                mode,
                verdict: Verdict::Fail,
                numeric: None,
                note: None,
            };
            numeric_report(e, ctx, site, cfg, base)
        }
        CheckMode::Auto => {
            let exact = exact_cancellation_check(e, ctx, site, cfg)?;
            if exact.verdict.passed() {
                return Ok(exact);
            }
            let mut r = numeric_report(e, ctx, site, cfg, exact)?;
            r.note = Some("exact pairing incomplete; numeric total residue used".into());
            Ok(r)
        }
    }
}

/// Every scanned site of `e` plus `extra` sites.
pub fn check_dvf(
    check: &str,
    e: &QExpr,
    ctx: &PoleContext,
    extra: &[PoleSite],
    cfg: &VerifyConfig,
    mode: CheckMode,
) -> Result<Report, VerifyError> {
    let mut sites = scan_poles(e);
    for s in extra {
        if !sites.contains(s) {
            sites.push(s.clone());
        }
    }
    let reports = sites
        .iter()
        .map(|s| check_site(e, ctx, s, cfg, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = reports.iter().fold(Verdict::Pass, |v, r| v.and(r.verdict));
    Ok(Report {
        check: check.to_string(),
        mode: serde_json::to_value(mode)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
        sites: Some(reports),
        samples: Some(cfg.samples),
        verdict,
        details: vec![json!({ "terms": e.len(), "algebra": ctx.algebra.to_string() })],
    })
}
