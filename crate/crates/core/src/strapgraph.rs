//! Bethe-strap graphs: terms of a DVF joined by verified common-pole
//! cancellations, oriented along simple roots.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use petgraph::algo::connected_components;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use petgraph::Direction;
use serde::Serialize;

use crate::dvf::{coef_sign, sl12_box, DvfSpec, DvfTerm};
use crate::qalgebra::{int, FactorKind, QExpr, QFactor, QMonomial, Rational};
use crate::rootdata::{solve_columns, AlgebraId, BasisVector, SimpleRootSystem, VacuumSpec};
use crate::tableaux::Tableau;
use crate::verify::{exact_cancellation_check, scan_poles, PoleContext, VerifyConfig, VerifyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeClass {
    Top,
    Bottom,
    PseudoTop,
    PseudoBottom,
    Interior,
}

/// Input to [`build_strap`]: one term with its weight.
#[derive(Clone, Debug)]
pub struct StrapTerm {
    pub label: String,
    pub tableau: Option<Tableau>,
    pub weight: BasisVector,
    pub monomial: QMonomial,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrapNode {
    pub index: usize,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tableau: Option<Tableau>,
    pub sign: i32,
    pub weight: String,
    #[serde(skip)]
    pub weight_vec: BasisVector,
    pub class: NodeClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrapEdge {
    pub color: usize,
    #[serde(serialize_with = "crate::verify::ser_rat")]
    pub offset: Rational,
    /// False when neither orientation satisfies the simple-root rule.
    pub directed: bool,
    /// Whether `Res(target) / Res(source)` is the Bethe ratio itself (rather
    /// than its inverse).
    pub residue_forward: bool,
}

#[derive(Clone, Debug)]
pub struct StrapGraph {
    pub graph: DiGraph<StrapNode, StrapEdge>,
    pub roots: Vec<BasisVector>,
    pub diagnostics: Vec<String>,
}

pub fn terms_from_dvf(s: usize, terms: &[DvfTerm]) -> Vec<StrapTerm> {
    terms
        .iter()
        .map(|t| StrapTerm {
            label: t.tableau.pretty(),
            tableau: Some(t.tableau.clone()),
            weight: t.tableau.weight(s),
            monomial: t.monomial.clone(),
        })
        .collect()
}

/// Whether `hi - lo` is a nonnegative combination of `roots`.
fn dominates(roots: &[BasisVector], hi: &BasisVector, lo: &BasisVector) -> bool {
    solve_columns(roots, &hi.sub(lo)).is_some_and(|c| c.iter().all(|x| !x.is_negative()))
}

/// Nodes are the terms; an edge joins each pair certified by the exact
/// residue-ratio check at a common pole, pointing from the higher weight.
pub fn build_strap(
    terms: Vec<StrapTerm>,
    ctx: &PoleContext,
    roots: &[BasisVector],
    cfg: &VerifyConfig,
) -> Result<StrapGraph, VerifyError> {
    let e = QExpr::raw(terms.iter().map(|t| t.monomial.clone()).collect());
    let mut graph = DiGraph::new();
    let idx: Vec<NodeIndex> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            graph.add_node(StrapNode {
                index: i,
                label: t.label.clone(),
                tableau: t.tableau.clone(),
                sign: coef_sign(t.monomial.coef()),
                weight: t.weight.to_string(),
                weight_vec: t.weight.clone(),
                class: NodeClass::Interior,
            })
        })
        .collect();
    let mut diagnostics = Vec::new();
    for site in scan_poles(&e) {
        let rep = exact_cancellation_check(&e, ctx, &site, cfg)?;
        if !rep.leftovers.is_empty() {
            diagnostics.push(format!(
                "site ({}, {}): terms {:?} left unpaired",
                site.color,
                site.offset(),
                rep.leftovers
            ));
        }
        let alpha = &roots[site.color - 1];
        for p in rep.pairs {
            let d = terms[p.source].weight.sub(&terms[p.target].weight);
            let (from, to, forward, directed) = if &d == alpha {
                (p.source, p.target, true, true)
            } else if &d.neg() == alpha {
                (p.target, p.source, false, true)
            } else {
                diagnostics.push(format!(
                    "edge {} - {} at ({}, {}) does not follow a simple root",
                    terms[p.source].label,
                    terms[p.target].label,
                    site.color,
                    site.offset()
                ));
                (p.source, p.target, true, false)
            };
            graph.add_edge(
                idx[from],
                idx[to],
                StrapEdge {
                    color: site.color,
                    offset: site.offset(),
                    directed,
                    residue_forward: forward,
                },
            );
        }
    }
    let mut g = StrapGraph {
        graph,
        roots: roots.to_vec(),
        diagnostics,
    };
    let classes = classify(&g);
    for (n, c) in g.graph.node_indices().zip(classes) {
        g.graph[n].class = c;
    }
    Ok(g)
}

/// Strap of a column or row DVF of C(s).
pub fn build_strap_for(spec: &DvfSpec, cfg: &VerifyConfig) -> Result<StrapGraph, VerifyError> {
    let AlgebraId::C(s) = spec.algebra else {
        return Err(VerifyError::OutOfRange {
            id: "strap".into(),
            what: spec.algebra.to_string(),
        });
    };
    let terms = spec
        .tagged_terms()?
        .ok_or_else(|| VerifyError::OutOfRange {
            id: "strap".into(),
            what: format!("{} (needs a column or row tableau builder)", spec.kind),
        })?;
    let ctx = PoleContext::new(spec.algebra, spec.vacuum);
    let rs = SimpleRootSystem::new(spec.algebra);
    build_strap(terms_from_dvf(s, &terms), &ctx, rs.roots(), cfg)
}

fn directed_degree(g: &DiGraph<StrapNode, StrapEdge>, n: NodeIndex, dir: Direction) -> usize {
    g.edges_directed(n, dir)
        .filter(|e| e.weight().directed)
        .count()
}

pub fn classify(g: &StrapGraph) -> Vec<NodeClass> {
    let gr = &g.graph;
    let nodes: Vec<NodeIndex> = gr.node_indices().collect();
    let w = |n: NodeIndex| &gr[n].weight_vec;
    nodes
        .iter()
        .map(|&n| {
            let ins = directed_degree(gr, n, Direction::Incoming);
            let outs = directed_degree(gr, n, Direction::Outgoing);
            let highest = nodes.iter().all(|&o| dominates(&g.roots, w(n), w(o)));
            let lowest = nodes.iter().all(|&o| dominates(&g.roots, w(o), w(n)));
            match (ins, outs) {
                (0, 0) if nodes.len() == 1 => NodeClass::Top,
                (0, o) if o > 0 => {
                    if highest {
                        NodeClass::Top
                    } else {
                        NodeClass::PseudoTop
                    }
                }
                (i, 0) if i > 0 => {
                    if lowest {
                        NodeClass::Bottom
                    } else {
                        NodeClass::PseudoBottom
                    }
                }
                _ => NodeClass::Interior,
            }
        })
        .collect()
}

pub fn is_connected(g: &StrapGraph) -> bool {
    g.graph.node_count() == 0 || connected_components(&g.graph) == 1
}

impl StrapGraph {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// `(source label, target label, color, offset)` for every edge.
    pub fn labeled_edges(&self) -> Vec<(String, String, usize, Rational)> {
        self.graph
            .edge_references()
            .map(|e| {
                (
                    self.graph[e.source()].label.clone(),
                    self.graph[e.target()].label.clone(),
                    e.weight().color,
                    e.weight().offset.clone(),
                )
            })
            .collect()
    }

    pub fn nodes_of(&self, class: NodeClass) -> Vec<&StrapNode> {
        self.graph
            .node_weights()
            .filter(|n| n.class == class)
            .collect()
    }

    /// Every directed edge satisfies `wt(source) - wt(target) = alpha_color`.
    pub fn weight_rule_holds(&self) -> bool {
        self.graph.edge_references().all(|e| {
            let d = self.graph[e.source()]
                .weight_vec
                .sub(&self.graph[e.target()].weight_vec);
            e.weight().directed && d == self.roots[e.weight().color - 1]
        })
    }

    /// A copy with one edge removed.
    pub fn without_edge(&self, i: usize) -> StrapGraph {
        let mut g = self.clone();
        g.graph.remove_edge(petgraph::graph::EdgeIndex::new(i));
        g
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph strap {\n  rankdir=LR;\n");
        for n in self.graph.node_indices() {
            let node = &self.graph[n];
            let sign = if node.sign < 0 { "-" } else { "+" };
            let _ = writeln!(
                out,
                "  n{} [label=\"{} {}\"];",
                node.index, sign, node.label
            );
        }
        for e in self.graph.edge_references() {
            let w = e.weight();
            let style = if w.directed { "" } else { ", dir=none" };
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"({}, {})\"{}];",
                self.graph[e.source()].index,
                self.graph[e.target()].index,
                w.color,
                w.offset,
                style
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct EdgeOut<'a> {
            source: usize,
            target: usize,
            #[serde(flatten)]
            edge: &'a StrapEdge,
        }
        let nodes: Vec<&StrapNode> = self.graph.node_weights().collect();
        let edges: Vec<EdgeOut> = self
            .graph
            .edge_references()
            .map(|e| EdgeOut {
                source: self.graph[e.source()].index,
                target: self.graph[e.target()].index,
                edge: e.weight(),
            })
            .collect();
        serde_json::json!({
            "nodes": nodes,
            "edges": edges,
            "connected": is_connected(self),
            "diagnostics": self.diagnostics,
        })
    }
}

/// The rank-one reduction of the sl(1|2) boxes `-3`, `-2` with `Q_1 = 1`.
fn rank_one_box(k: i8) -> QMonomial {
    let m = sl12_box(k).expect("box");
    let fs: Vec<QFactor> = m
        .factors()
        .iter()
        .filter(|f| f.kind != FactorKind::Q(1))
        .cloned()
        .collect();
    QMonomial::new(-BigInt::one(), fs)
}

/// Terms of `T_m(u + k)` over the two reduced boxes, `-3` weighing `+1`.
fn rank_one_row(m: usize, k: i64) -> Vec<(Vec<i8>, QMonomial)> {
    let shifts: Vec<Rational> = (0..m as i64)
        .map(|j| int(m as i64 - 1 - 2 * j + k))
        .collect();
    (0..=m)
        .map(|p| {
            let mut w = vec![-3i8; p];
            w.extend(std::iter::repeat_n(-2i8, m - p));
            let mono = w
                .iter()
                .zip(&shifts)
                .fold(QMonomial::one(), |acc, (&b, h)| {
                    acc.mul(&rank_one_box(b).shifted(h))
                });
            (w, mono)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudoDemo {
    pub k: i64,
    /// The same product with `u -> -u`, where the boxes take the usual sl2
    /// form `Q(u-2)/Q(u)`, `Q(u+2)/Q(u)`.
    pub reflected_k: i64,
    pub nodes: usize,
    pub edges: usize,
    pub classes: BTreeMap<String, usize>,
    pub finding: String,
}

/// Straps of `T_2(u) T_1(u + k)` in the rank-one reduction of sl(1|2).
pub fn pseudo_top_demo(ks: &[i64], cfg: &VerifyConfig) -> Result<Vec<PseudoDemo>, VerifyError> {
    let ratio = QExpr::monomial(QMonomial::new(
        BigInt::one(),
        [QFactor::q(2, int(-2), 1), QFactor::q(2, int(2), -1)],
    ));
    let ctx = PoleContext::custom(
        AlgebraId::Sl12,
        VacuumSpec::Trivial,
        vec![QExpr::one(), ratio],
    );
    let roots = vec![BasisVector::from_ints(&[0]), BasisVector::from_ints(&[2])];
    let wt = |w: &[i8]| w.iter().map(|&b| if b == -3 { 1 } else { -1 }).sum::<i64>();
    let mut out = Vec::new();
    for &k in ks {
        let mut terms = Vec::new();
        for (w2, m2) in rank_one_row(2, 0) {
            for (w1, m1) in rank_one_row(1, k) {
                terms.push(StrapTerm {
                    label: format!("{:?}{:?}", w2, w1),
                    tableau: None,
                    weight: BasisVector::from_ints(&[wt(&w2) + wt(&w1)]),
                    monomial: m2.mul(&m1),
                });
            }
        }
        let g = build_strap(terms, &ctx, &roots, cfg)?;
        let mut classes = BTreeMap::new();
        for n in g.graph.node_weights() {
            let key = serde_json::to_value(n.class)
                .ok()
                .and_then(|v| v.as_str().map(String::from));
            *classes.entry(key.unwrap_or_default()).or_insert(0) += 1;
        }
        let finding = match (
            classes.contains_key("pseudo-top"),
            classes.contains_key("pseudo-bottom"),
        ) {
            (true, false) => "pseudo-top",
            (false, true) => "pseudo-bottom",
            (true, true) => "pseudo-top and pseudo-bottom",
            (false, false) => "none",
        };
        out.push(PseudoDemo {
            k,
            reflected_k: -k,
            nodes: g.node_count(),
            edges: g.edge_count(),
            classes,
            finding: finding.to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvf::DvfKind;
    use crate::qalgebra::rat;

    fn strap(kind: &str) -> StrapGraph {
        let spec = DvfSpec::new(
            AlgebraId::C(3),
            kind.parse::<DvfKind>().unwrap(),
            VacuumSpec::Trivial,
        );
        build_strap_for(&spec, &VerifyConfig::new(1, 8)).unwrap()
    }

    fn norm(x: &str) -> String {
        x.replace('b', "\u{0305}")
    }

    fn edge_set(g: &StrapGraph) -> Vec<(String, String, usize, Rational)> {
        let mut v = g.labeled_edges();
        v.sort();
        v
    }

    fn golden(list: &[(&str, &str, usize, (i64, i64))]) -> Vec<(String, String, usize, Rational)> {
        let mut v: Vec<_> = list
            .iter()
            .map(|&(a, b, c, (n, d))| (norm(a), norm(b), c, rat(n, d)))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn col1_strap_is_labeled_path() {
        let g = strap("col:1");
        let want = golden(&[
            ("1", "2", 1, (-1, 2)),
            ("2", "3", 2, (0, 1)),
            ("3", "3b", 3, (1, 1)),
            ("3b", "2b", 2, (2, 1)),
            ("2b", "1b", 1, (5, 2)),
        ]);
        assert_eq!(edge_set(&g), want);
        assert_eq!(g.nodes_of(NodeClass::Top).len(), 1);
        assert_eq!(g.nodes_of(NodeClass::Top)[0].label, "1");
        assert_eq!(g.nodes_of(NodeClass::Bottom)[0].label, norm("1b"));
        assert!(g.nodes_of(NodeClass::PseudoTop).is_empty());
        assert!(g.weight_rule_holds());
        assert!(is_connected(&g));
    }

    #[test]
    fn col2_strap_edges() {
        let g = strap("col:2");
        let want = golden(&[
            ("2b/2b", "2b/1b", 1, (3, 1)),
            ("3b/3b", "3b/2b", 2, (5, 2)),
            ("3/2b", "3/1b", 1, (3, 1)),
            ("3b/3", "3b/3b", 3, (3, 2)),
            ("3/3b", "3/2b", 2, (5, 2)),
            ("2/2b", "2/1b", 1, (3, 1)),
            ("3/3", "3/3b", 3, (3, 2)),
            ("2/3b", "2/2b", 2, (5, 2)),
            ("1/2b", "1/1b", 1, (3, 1)),
            ("1/3b", "1/2b", 2, (5, 2)),
            ("2/3", "2/3b", 3, (3, 2)),
            ("1/2", "1/3", 2, (1, 2)),
            ("3b/1b", "2b/1b", 2, (3, 2)),
            ("2/1b", "3/1b", 2, (-1, 2)),
            ("3/2b", "3b/2b", 3, (1, 2)),
            ("1/1b", "2/1b", 1, (-1, 1)),
            ("2/2b", "3/2b", 2, (-1, 2)),
            ("3/3b", "3b/3b", 3, (1, 2)),
            ("3/3", "3b/3", 3, (1, 2)),
            ("2/3b", "3/3b", 2, (-1, 2)),
            ("1/2b", "2/2b", 1, (-1, 1)),
            ("2/3", "3/3", 2, (-1, 2)),
            ("1/3b", "2/3b", 1, (-1, 1)),
            ("1/2", "2/2", 1, (-1, 1)),
            ("3b/2b", "2b/2b", 2, (3, 2)),
            ("3/1b", "3b/1b", 3, (1, 2)),
            ("2/2", "2/3", 2, (1, 2)),
            ("1/3", "1/3b", 3, (3, 2)),
            ("3b/2b", "3b/1b", 1, (3, 1)),
            ("1/3", "2/3", 1, (-1, 1)),
        ]);
        assert_eq!(g.node_count(), 20);
        assert_eq!(edge_set(&g), want);
        assert_eq!(g.nodes_of(NodeClass::Top)[0].label, "1/2");
        assert!(g.weight_rule_holds());
        assert!(is_connected(&g));
    }

    #[test]
    fn row2_strap_edges() {
        let g = strap("row:2");
        let want = golden(&[
            ("2b 1b", "1b 1b", 1, (3, 1)),
            ("3b 1b", "2b 1b", 2, (5, 2)),
            ("3 2b", "3b 2b", 3, (3, 2)),
            ("2 1b", "3 1b", 2, (1, 2)),
            ("2 2b", "3 2b", 2, (1, 2)),
            ("1 1b", "2 1b", 1, (0, 1)),
            ("2 3b", "2 2b", 2, (3, 2)),
            ("1 2b", "1 1b", 1, (2, 1)),
            ("2 3", "2 3b", 3, (1, 2)),
            ("1 3b", "1 2b", 2, (3, 2)),
            ("1 2", "1 3", 2, (-1, 2)),
            ("1 1", "1 2", 1, (-1, 1)),
            ("3b 2b", "3b 1b", 1, (2, 1)),
            ("1 3", "1 3b", 3, (1, 2)),
            ("3 1b", "3b 1b", 3, (3, 2)),
            ("1 3", "2 3", 1, (0, 1)),
            ("3 2b", "3 1b", 1, (2, 1)),
            ("2 2b", "2 1b", 1, (2, 1)),
            ("1 2b", "2 2b", 1, (0, 1)),
            ("1 3b", "2 3b", 1, (0, 1)),
        ]);
        assert_eq!(g.node_count(), 16);
        assert_eq!(edge_set(&g), want);
        assert_eq!(g.nodes_of(NodeClass::Top)[0].label, "1 1");
        assert!(g.weight_rule_holds());
        assert!(is_connected(&g));
    }

    #[test]
    fn edge_removal_disconnects_path() {
        let g = strap("col:1");
        assert!(!is_connected(&g.without_edge(0)));
    }

    #[test]
    fn single_term_is_connected() {
        let g = strap("col:0");
        assert!(is_connected(&g));
        assert_eq!(g.nodes_of(NodeClass::Top).len(), 1);
    }

    #[test]
    fn dot_export_has_labels() {
        let dot = strap("col:1").to_dot();
        assert!(dot.contains("label=\"(1, -1/2)\""));
        assert!(dot.starts_with("digraph"));
    }

    #[test]
    fn demo_runs() {
        let r = pseudo_top_demo(&[1, -1], &VerifyConfig::new(1, 5)).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|d| d.nodes == 6));
        assert_eq!(r[0].finding, "pseudo-bottom");
        assert_eq!(r[1].finding, "pseudo-top");
    }
}
