use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cstrap::dvf::{divisibility_check, DvfError, DvfKind, DvfSpec};
use cstrap::qalgebra::expr_to_json;
use cstrap::repth::{c_weight_typical, dim_labels, is_typical, labels_to_weight, KacDynkin};
use cstrap::rootdata::{AlgebraId, VacuumSpec};
use cstrap::strapgraph::{build_strap_for, is_connected, pseudo_top_demo, NodeClass};
use cstrap::tableaux::{
    count_column_formula, count_row_formula, enumerate_column, enumerate_row, Shape, Tableau,
};
use cstrap::verify::{
    check_dvf, prefactor_site, relation_check, relation_ids, CheckMode, Report, Verdict,
    VerifyConfig, VerifyError,
};

#[derive(Parser, Debug)]
#[command(
    name = "cstrap",
    version,
    about = "Analytic Bethe ansatz toolkit for C(s)"
)]
struct Cli {
    /// "C:s" or "sl12".
    #[arg(long, global = true, default_value = "C:3")]
    algebra: String,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 20)]
    samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enumerate admissible tableaux.
    Enum {
        /// "col:a" or "row:m".
        #[arg(long)]
        shape: String,
    },
    /// Build a dressed vacuum form.
    Dvf {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "trivial")]
        vacuum: String,
    },
    /// Check pole-freeness of a DVF or a functional relation.
    Verify {
        #[arg(
            long,
            conflicts_with = "relation",
            required_unless_present = "relation"
        )]
        spec: Option<String>,
        /// A relation id, or "all" for every relation defined for the algebra.
        #[arg(long)]
        relation: Option<String>,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value = "trivial")]
        vacuum: String,
    },
    /// Dimension of an irreducible module from Kac-Dynkin labels.
    Dims {
        #[arg(long)]
        labels: String,
    },
    /// Term counts of column and row DVFs.
    Counts {
        #[arg(long, default_value_t = 6)]
        col_max: usize,
        #[arg(long, default_value_t = 5)]
        row_max: usize,
    },
    /// Bethe-strap graph of a column or row DVF.
    Strap {
        #[arg(long, required_unless_present = "pseudo_demo")]
        spec: Option<String>,
        #[arg(long, default_value = "trivial")]
        vacuum: String,
        /// Run the rank-one pseudo-top demo on T_2(u) T_1(u + k), k = -2..2.
        #[arg(long)]
        pseudo_demo: bool,
    },
}

enum CliError {
    Usage(String),
    Internal(String),
}

impl From<DvfError> for CliError {
    fn from(e: DvfError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Dvf(d) => d.into(),
            VerifyError::UnknownRelation(_) | VerifyError::OutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn usage<E: ToString>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

struct Output {
    text: String,
    passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn rank_of(alg: AlgebraId) -> Result<usize, CliError> {
    match alg {
        AlgebraId::C(s) => Ok(s),
        AlgebraId::Sl12 => Err(usage("this command needs --algebra C:s")),
    }
}

fn tableau_json(t: &Tableau) -> Value {
    json!({ "shape": t.shape, "entries": t.entries })
}

fn cmd_enum(cli: &Cli, alg: AlgebraId, shape: &str) -> Result<Output, CliError> {
    let s = rank_of(alg)?;
    let shape: Shape = shape.parse().map_err(usage)?;
    let list = match shape {
        Shape::Column(a) => enumerate_column(s, a),
        Shape::Row(m) => enumerate_row(s, m).map_err(usage)?,
    };
    Ok(Output::ok(match cli.format {
        Format::Table => {
            let mut out = String::new();
            for t in &list {
                let _ = writeln!(out, "{:+} {}", t.sign(), t.label());
            }
            let _ = writeln!(out, "# {} tableaux", list.len());
            out
        }
        _ => pretty(&json!({
            "algebra": alg.to_string(),
            "shape": shape,
            "count": list.len(),
            "tableaux": list.iter().map(tableau_json).collect::<Vec<_>>(),
        })),
    }))
}

fn parse_spec(alg: AlgebraId, spec: &str, vacuum: &str) -> Result<DvfSpec, CliError> {
    let kind: DvfKind = spec.parse()?;
    let vacuum: VacuumSpec = vacuum.parse().map_err(usage)?;
    Ok(DvfSpec::new(alg, kind, vacuum))
}

fn cmd_dvf(cli: &Cli, alg: AlgebraId, spec: &str, vacuum: &str) -> Result<Output, CliError> {
    let spec = parse_spec(alg, spec, vacuum)?;
    let e = spec.build()?;
    Ok(Output::ok(match cli.format {
        Format::Table => {
            let mut out = String::new();
            for t in e.terms() {
                let _ = writeln!(out, "{t}");
            }
            let _ = writeln!(out, "# {} terms", e.len());
            out
        }
        _ => pretty(&json!({
            "algebra": alg.to_string(),
            "spec": spec.kind.to_string(),
            "terms": e.len(),
            "expr": expr_to_json(&e),
        })),
    }))
}

fn report_table(r: &Report) -> String {
    let mut out = String::new();
    let verdict = |v: Verdict| {
        serde_json::to_value(v)
            .ok()
            .and_then(|x| x.as_str().map(String::from))
    };
    if let Some(sites) = &r.sites {
        for s in sites {
            let _ = writeln!(
                out,
                "site ({}, {})  terms {}  pairs {}  {}",
                s.site.color,
                s.site.offset(),
                s.participating.len(),
                s.pairs.len(),
                verdict(s.verdict).unwrap_or_default()
            );
        }
    }
    let _ = writeln!(
        out,
        "{}  [{}]  {}",
        r.check,
        r.mode,
        verdict(r.verdict).unwrap_or_default()
    );
    out
}

fn render_reports(cli: &Cli, reports: &[Report]) -> Output {
    let passed = reports.iter().all(Report::passed);
    let text = match cli.format {
        Format::Table => reports.iter().map(report_table).collect(),
        _ if reports.len() == 1 => pretty(&serde_json::to_value(&reports[0]).expect("report")),
        _ => pretty(&serde_json::to_value(reports).expect("reports")),
    };
    Output { text, passed }
}

fn check_typical(alg: AlgebraId, kind: &DvfKind) -> Result<(), CliError> {
    if let (AlgebraId::C(s), DvfKind::Deformed(c)) = (alg, kind) {
        if !c_weight_typical(s, c) {
            return Err(CliError::Usage(format!(
                "rejected: c = {c} is atypical for C({s}); c must avoid 0..={} and {s}..={}",
                s as i64 - 2,
                2 * s - 2
            )));
        }
    }
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    alg: AlgebraId,
    spec: Option<&str>,
    relation: Option<&str>,
    mode: &str,
    vacuum: &str,
) -> Result<Output, CliError> {
    let cfg = VerifyConfig::new(cli.seed, cli.samples);
    if let Some(id) = relation {
        let ids = if id == "all" {
            relation_ids(alg)
        } else {
            vec![id.to_string()]
        };
        let reports = ids
            .iter()
            .map(|id| relation_check(id, alg, &cfg))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(render_reports(cli, &reports));
    }
    let spec = parse_spec(alg, spec.expect("clap enforces spec or relation"), vacuum)?;
    check_typical(alg, &spec.kind)?;
    let mode: CheckMode = mode.parse().map_err(usage)?;
    let e = spec.build()?;
    let ctx = cstrap::verify::PoleContext::new(alg, spec.vacuum);
    let mut extra = Vec::new();
    let mut structural = None;
    if let (AlgebraId::C(s), DvfKind::Deformed(c)) = (alg, &spec.kind) {
        extra.push(prefactor_site(s, c));
        structural = Some(divisibility_check(s, c)?);
    }
    let mut report = check_dvf(
        &format!("{} {}", spec.kind, alg),
        &e,
        &ctx,
        &extra,
        &cfg,
        mode,
    )?;
    if let Some(ok) = structural {
        report.details.push(json!({ "divisibility": ok }));
        report.verdict = report.verdict.and(Verdict::from_bool(ok));
    }
    Ok(render_reports(cli, &[report]))
}

fn cmd_dims(cli: &Cli, alg: AlgebraId, labels: &str) -> Result<Output, CliError> {
    let s = rank_of(alg)?;
    let k = KacDynkin::parse(labels).map_err(usage)?;
    let w = labels_to_weight(s, &k).map_err(usage)?;
    let typical = is_typical(&w);
    let d = dim_labels(s, &k).map_err(usage)?;
    Ok(Output::ok(match cli.format {
        Format::Table => format!("{d}\n"),
        _ => pretty(&json!({
            "algebra": alg.to_string(),
            "labels": labels.split_whitespace().collect::<Vec<_>>(),
            "typical": typical,
            "dim": d.to_string(),
        })),
    }))
}

fn cmd_counts(
    cli: &Cli,
    alg: AlgebraId,
    col_max: usize,
    row_max: usize,
) -> Result<Output, CliError> {
    let s = rank_of(alg)?;
    let cols: Vec<(usize, usize, u64)> = (0..=col_max)
        .map(|a| (a, enumerate_column(s, a).len(), count_column_formula(s, a)))
        .collect();
    let rows: Vec<(usize, u64)> = (0..=row_max)
        .map(|m| (m, count_row_formula(s, m)))
        .collect();
    Ok(Output::ok(match cli.format {
        Format::Table => {
            let mut out = format!("column T^a of {alg}\n  a  enumerated  formula\n");
            for (a, n, f) in &cols {
                let _ = writeln!(out, "{a:>3}  {n:>10}  {f:>7}");
            }
            let _ = writeln!(out, "row T_m^(1) of {alg}\n  m  terms");
            for (m, n) in &rows {
                let _ = writeln!(out, "{m:>3}  {n:>5}");
            }
            out
        }
        _ => pretty(&json!({
            "algebra": alg.to_string(),
            "columns": cols.iter().map(|(a, n, f)| json!({ "a": a, "enumerated": n, "formula": f })).collect::<Vec<_>>(),
            "rows": rows.iter().map(|(m, n)| json!({ "m": m, "terms": n })).collect::<Vec<_>>(),
        })),
    }))
}

fn cmd_strap(
    cli: &Cli,
    alg: AlgebraId,
    spec: Option<&str>,
    vacuum: &str,
    demo: bool,
) -> Result<Output, CliError> {
    let cfg = VerifyConfig::new(cli.seed, cli.samples);
    if demo {
        let r = pseudo_top_demo(&[-2, -1, 1, 2], &cfg)?;
        return Ok(Output::ok(pretty(&serde_json::to_value(r).expect("demo"))));
    }
    let spec = parse_spec(alg, spec.expect("clap enforces spec"), vacuum)?;
    let g = build_strap_for(&spec, &cfg)?;
    let connected = is_connected(&g);
    let text = match cli.format {
        Format::Dot => g.to_dot(),
        Format::Json => pretty(&g.to_json()),
        Format::Table => {
            let mut out = String::new();
            for (a, b, c, o) in g.labeled_edges() {
                let _ = writeln!(out, "{a} -> {b}  ({c}, {o})");
            }
            for class in [
                NodeClass::Top,
                NodeClass::Bottom,
                NodeClass::PseudoTop,
                NodeClass::PseudoBottom,
            ] {
                for n in g.nodes_of(class) {
                    let _ = writeln!(out, "# {:?}: {}", class, n.label);
                }
            }
            let _ = writeln!(
                out,
                "# {} nodes, {} edges, connected: {connected}",
                g.node_count(),
                g.edge_count()
            );
            out
        }
    };
    Ok(Output {
        text,
        passed: connected,
    })
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let alg: AlgebraId = cli.algebra.parse().map_err(usage)?;
    match &cli.cmd {
        Cmd::Enum { shape } => cmd_enum(cli, alg, shape),
        Cmd::Dvf { spec, vacuum } => cmd_dvf(cli, alg, spec, vacuum),
        Cmd::Verify {
            spec,
            relation,
            mode,
            vacuum,
        } => cmd_verify(cli, alg, spec.as_deref(), relation.as_deref(), mode, vacuum),
        Cmd::Dims { labels } => cmd_dims(cli, alg, labels),
        Cmd::Counts { col_max, row_max } => cmd_counts(cli, alg, *col_max, *row_max),
        Cmd::Strap {
            spec,
            vacuum,
            pseudo_demo,
        } => cmd_strap(cli, alg, spec.as_deref(), vacuum, *pseudo_demo),
    }
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.text) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
