//! Shared-edge route similarity and corpus-level aggregates.

use std::collections::HashSet;
use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::CostModel;
use crate::error::{Error, Result};
use crate::graph::{EdgeIx, IdToken, IndoorGraph, NodeIx};
use crate::router::{plan_route, Route};

/// Dimensionless score in `[0, 1]`; 1 means complete overlap.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(SimilarityScore(value))
        } else {
            Err(Error::Validation(format!("similarity {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Edges of a route, sorted by edge index.
fn edge_set(g: &IndoorGraph, r: &Route) -> Result<Vec<EdgeIx>> {
    let mut edges = r
        .nodes
        .windows(2)
        .map(|w| {
            g.edge_between(w[0], w[1])
                .ok_or_else(|| Error::Validation(format!("route step {}-{} is not an edge", g.id(w[0]), g.id(w[1]))))
        })
        .collect::<Result<Vec<_>>>()?;
    edges.sort_by_key(|e| e.0);
    Ok(edges)
}

fn total(g: &IndoorGraph, edges: impl Iterator<Item = EdgeIx>) -> f64 {
    edges.map(|e| g.edge(e).length).sum()
}

/// Length of shared edges divided by the length of the shorter route.
///
/// Edges match as unordered node pairs. Both sums run in edge-index order so
/// that the score is exactly symmetric and exactly 1 for identical routes.
/// Two single-node routes score 1 when identical and are an error otherwise;
/// a single-node route against a longer one shares nothing and scores 0.
pub fn similarity(g: &IndoorGraph, r1: &Route, r2: &Route) -> Result<SimilarityScore> {
    let e1 = edge_set(g, r1)?;
    let e2 = edge_set(g, r2)?;
    if e1.is_empty() && e2.is_empty() {
        return if r1.nodes == r2.nodes {
            Ok(SimilarityScore(1.0))
        } else {
            Err(Error::Validation(
                "cannot compare two different zero-length routes".into(),
            ))
        };
    }
    let l1 = total(g, e1.iter().copied());
    let l2 = total(g, e2.iter().copied());
    let other: HashSet<EdgeIx> = e2.iter().copied().collect();
    let shared = total(g, e1.iter().copied().filter(|e| other.contains(e)));
    let shorter = l1.min(l2);
    if shorter == 0.0 {
        return Ok(SimilarityScore(0.0));
    }
    Ok(SimilarityScore((shared / shorter).clamp(0.0, 1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRecord {
    pub start: NodeIx,
    pub dest: NodeIx,
    pub preferred: Route,
}

/// Preferred routes between (start, destination) pairs on one graph.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RouteCorpus {
    pub records: Vec<CorpusRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRouteRecord {
    pub start: IdToken,
    pub dest: IdToken,
    pub nodes: Vec<IdToken>,
}

/// On-disk corpus. Route lengths are always recomputed from the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    pub routes: Vec<CorpusRouteRecord>,
}

impl RouteCorpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Builds a corpus from preferred node sequences, checking every invariant.
    pub fn from_routes(g: &IndoorGraph, routes: Vec<Vec<NodeIx>>) -> Result<Self> {
        let records = routes
            .into_iter()
            .enumerate()
            .map(|(i, nodes)| {
                let preferred = Route::evaluate(g, nodes, &CostModel::empty())
                    .map_err(|e| Error::Validation(format!("corpus record {i}: {e}")))?;
                Ok(CorpusRecord {
                    start: preferred.start(),
                    dest: preferred.dest(),
                    preferred,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RouteCorpus { records })
    }

    pub fn from_file(g: &IndoorGraph, file: CorpusFile) -> Result<Self> {
        let mut records = Vec::with_capacity(file.routes.len());
        for (i, rec) in file.routes.into_iter().enumerate() {
            let start = g.require(rec.start.into_id().as_str())?;
            let dest = g.require(rec.dest.into_id().as_str())?;
            let nodes = rec
                .nodes
                .into_iter()
                .map(|t| g.require(t.into_id().as_str()))
                .collect::<Result<Vec<_>>>()?;
            let preferred = Route::evaluate(g, nodes, &CostModel::empty())
                .map_err(|e| Error::Validation(format!("corpus record {i}: {e}")))?;
            if preferred.start() != start || preferred.dest() != dest {
                return Err(Error::Validation(format!(
                    "corpus record {i}: route runs {}..{} but record says {}..{}",
                    g.id(preferred.start()),
                    g.id(preferred.dest()),
                    g.id(start),
                    g.id(dest)
                )));
            }
            records.push(CorpusRecord { start, dest, preferred });
        }
        Ok(RouteCorpus { records })
    }

    pub fn load<R: Read>(g: &IndoorGraph, source: R) -> Result<Self> {
        let file: CorpusFile = serde_json::from_reader(source)?;
        Self::from_file(g, file)
    }

    pub fn load_path(g: &IndoorGraph, path: impl AsRef<std::path::Path>) -> Result<Self> {
        let f = std::fs::File::open(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::load(g, std::io::BufReader::new(f))
    }

    pub fn to_file(&self, g: &IndoorGraph) -> CorpusFile {
        let id = |n: NodeIx| IdToken::Str(g.id(n).0.clone());
        CorpusFile {
            routes: self
                .records
                .iter()
                .map(|r| CorpusRouteRecord {
                    start: id(r.start),
                    dest: id(r.dest),
                    nodes: r.preferred.nodes.iter().map(|&n| id(n)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self, g: &IndoorGraph) -> String {
        serde_json::to_string_pretty(&self.to_file(g)).expect("corpus serializes")
    }
}

/// Plans every record under `model`; one entry per record, in corpus order.
pub fn plan_corpus(g: &IndoorGraph, corpus: &RouteCorpus, model: &CostModel) -> Result<Vec<Option<Route>>> {
    corpus
        .records
        .par_iter()
        .map(|r| plan_route(g, r.start, r.dest, model))
        .collect()
}

/// Mean similarity of a corpus under one model.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusScore {
    pub mean: SimilarityScore,
    /// Records whose destination was unreachable; they scored 0.
    pub unreachable: Vec<usize>,
}

fn score_routes(g: &IndoorGraph, corpus: &RouteCorpus, planned: &[Option<Route>]) -> Result<CorpusScore> {
    let mut unreachable = Vec::new();
    let mut sum = 0.0;
    for (i, (rec, route)) in corpus.records.iter().zip(planned).enumerate() {
        match route {
            Some(r) => sum += similarity(g, r, &rec.preferred)?.value(),
            None => unreachable.push(i),
        }
    }
    let mean = (sum / corpus.len() as f64).clamp(0.0, 1.0);
    Ok(CorpusScore {
        mean: SimilarityScore(mean),
        unreachable,
    })
}

fn require_records(corpus: &RouteCorpus) -> Result<()> {
    if corpus.is_empty() {
        Err(Error::Validation("corpus is empty".into()))
    } else {
        Ok(())
    }
}

/// Arithmetic mean over records of similarity(planned route, preferred route).
pub fn mean_similarity(g: &IndoorGraph, corpus: &RouteCorpus, model: &CostModel) -> Result<CorpusScore> {
    require_records(corpus)?;
    let planned = plan_corpus(g, corpus, model)?;
    score_routes(g, corpus, &planned)
}

fn changed_fraction(baseline: &[Option<Route>], planned: &[Option<Route>]) -> f64 {
    let changed = baseline
        .iter()
        .zip(planned)
        .filter(|(a, b)| a.as_ref().map(|r| &r.nodes) != b.as_ref().map(|r| &r.nodes))
        .count();
    changed as f64 / baseline.len() as f64
}

/// Fraction of records whose route under `model` differs from the plain
/// shortest path.
pub fn impacted_fraction(g: &IndoorGraph, corpus: &RouteCorpus, model: &CostModel) -> Result<f64> {
    require_records(corpus)?;
    let baseline = plan_corpus(g, corpus, &CostModel::empty())?;
    let planned = plan_corpus(g, corpus, model)?;
    Ok(changed_fraction(&baseline, &planned))
}

/// One model's score and impact on a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub score: CorpusScore,
    pub impacted: f64,
    pub routes: Vec<Option<Route>>,
}

/// Caches the shortest-path baseline so many models can be scored cheaply.
pub struct CorpusEvaluator<'a> {
    graph: &'a IndoorGraph,
    corpus: &'a RouteCorpus,
    baseline: Vec<Option<Route>>,
}

impl<'a> CorpusEvaluator<'a> {
    pub fn new(graph: &'a IndoorGraph, corpus: &'a RouteCorpus) -> Result<Self> {
        require_records(corpus)?;
        let baseline = plan_corpus(graph, corpus, &CostModel::empty())?;
        Ok(CorpusEvaluator {
            graph,
            corpus,
            baseline,
        })
    }

    pub fn graph(&self) -> &'a IndoorGraph {
        self.graph
    }

    pub fn corpus(&self) -> &'a RouteCorpus {
        self.corpus
    }

    pub fn baseline_routes(&self) -> &[Option<Route>] {
        &self.baseline
    }

    pub fn evaluate(&self, model: &CostModel) -> Result<Evaluation> {
        let routes = plan_corpus(self.graph, self.corpus, model)?;
        let score = score_routes(self.graph, self.corpus, &routes)?;
        let impacted = changed_fraction(&self.baseline, &routes);
        Ok(Evaluation {
            score,
            impacted,
            routes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::CriterionKind;
    use crate::graph::{EdgeKind, EdgeSpec, Node};

    fn graph() -> IndoorGraph {
        IndoorGraph::new(
            vec![
                Node::plain("A", 0.0, 0.0, 0),
                Node::plain("B", 5.0, 0.0, 0),
                Node::plain("C", 10.0, 0.0, 0),
                Node::plain("D", 5.0, 15.0, 0),
                Node::plain("E", 0.0, 9.0, 0),
            ],
            vec![
                EdgeSpec::walk("A", "B", 5.0),
                EdgeSpec::walk("B", "C", 5.0),
                EdgeSpec::walk("B", "D", 15.0),
                EdgeSpec::walk("A", "E", 9.0),
                EdgeSpec::walk("E", "D", 9.0),
            ],
        )
        .unwrap()
    }

    fn route(g: &IndoorGraph, ids: &[&str]) -> Route {
        Route::from_ids(g, ids, &CostModel::empty()).unwrap()
    }

    #[test]
    fn shared_prefix_half() {
        let g = graph();
        let r1 = route(&g, &["A", "B", "C"]);
        let r2 = route(&g, &["A", "B", "D"]);
        assert_eq!(similarity(&g, &r1, &r2).unwrap().value(), 0.5);
        assert_eq!(similarity(&g, &r2, &r1).unwrap().value(), 0.5);
    }

    #[test]
    fn identical_and_disjoint() {
        let g = graph();
        let r = route(&g, &["C", "B", "A", "E"]);
        assert_eq!(similarity(&g, &r, &r).unwrap().value(), 1.0);
        // direction does not matter
        let rev = route(&g, &["E", "A", "B", "C"]);
        assert_eq!(similarity(&g, &r, &rev).unwrap().value(), 1.0);
        let a = route(&g, &["A", "B"]);
        let b = route(&g, &["E", "D"]);
        assert_eq!(similarity(&g, &a, &b).unwrap().value(), 0.0);
    }

    #[test]
    fn zero_length_routes() {
        let g = graph();
        let a = route(&g, &["A"]);
        assert_eq!(similarity(&g, &a, &a).unwrap().value(), 1.0);
        assert!(similarity(&g, &a, &route(&g, &["B"])).is_err());
        assert_eq!(similarity(&g, &a, &route(&g, &["A", "B"])).unwrap().value(), 0.0);
    }

    #[test]
    fn corpus_file_round_trip_and_validation() {
        let g = graph();
        let c = RouteCorpus::load(
            &g,
            r#"{"routes":[{"start":"A","dest":"D","nodes":["A","E","D"]}]}"#.as_bytes(),
        )
        .unwrap();
        assert_eq!(c.records[0].preferred.metric_length, 18.0);
        let back = RouteCorpus::load(&g, c.to_json_string(&g).as_bytes()).unwrap();
        assert_eq!(back, c);
        for bad in [
            r#"{"routes":[{"start":"A","dest":"C","nodes":["A","E","D"]}]}"#,
            r#"{"routes":[{"start":"A","dest":"D","nodes":["A","D"]}]}"#,
            r#"{"routes":[{"start":"A","dest":"Q","nodes":["A","Q"]}]}"#,
            r#"{"routes":[{"start":"A","dest":"A","nodes":["A","B","A"]}]}"#,
        ] {
            assert!(RouteCorpus::load(&g, bad.as_bytes()).is_err(), "{bad}");
        }
    }

    #[test]
    fn mean_and_impact() {
        let g = graph();
        let corpus = RouteCorpus::from_routes(
            &g,
            vec![route(&g, &["A", "B", "C"]).nodes, route(&g, &["A", "E", "D"]).nodes],
        )
        .unwrap();
        let score = mean_similarity(&g, &corpus, &CostModel::empty()).unwrap();
        assert_eq!(score.mean.value(), 1.0);
        assert_eq!(impacted_fraction(&g, &corpus, &CostModel::empty()).unwrap(), 0.0);
        let single = RouteCorpus {
            records: corpus.records[..1].to_vec(),
        };
        assert_eq!(
            mean_similarity(&g, &single, &CostModel::empty()).unwrap().mean.value(),
            1.0
        );
        assert!(mean_similarity(&g, &RouteCorpus::default(), &CostModel::empty()).is_err());
        assert!(impacted_fraction(&g, &RouteCorpus::default(), &CostModel::empty()).is_err());
    }

    #[test]
    fn unreachable_records_score_zero() {
        let g = IndoorGraph::new(
            vec![
                Node::plain("a", 0.0, 0.0, 0),
                Node::plain("b", 1.0, 0.0, 0),
                Node::plain("c", 0.0, 0.0, 1),
            ],
            vec![EdgeSpec::walk("a", "b", 1.0)],
        )
        .unwrap();
        let mut corpus =
            RouteCorpus::from_routes(&g, vec![vec![g.require("a").unwrap(), g.require("b").unwrap()]]).unwrap();
        // a record the planner cannot serve
        let c = g.require("c").unwrap();
        corpus.records.push(CorpusRecord {
            start: c,
            dest: g.require("a").unwrap(),
            preferred: Route {
                nodes: vec![c],
                metric_length: 0.0,
                weighted_cost: 0.0,
            },
        });
        let score = mean_similarity(&g, &corpus, &CostModel::empty()).unwrap();
        assert_eq!(score.mean.value(), 0.5);
        assert_eq!(score.unreachable, vec![1]);
    }

    #[test]
    fn stair_weight_reroutes_everything() {
        // two floors, stairs short, elevator long; every record crosses floors
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for f in 0..2 {
            for (id, x) in [("w", 0.0), ("m", 5.0), ("e", 10.0)] {
                nodes.push(Node::plain(format!("{id}{f}").as_str(), x, 0.0, f));
            }
            edges.push(EdgeSpec::walk(format!("w{f}").as_str(), format!("m{f}").as_str(), 5.0));
            edges.push(EdgeSpec::walk(format!("m{f}").as_str(), format!("e{f}").as_str(), 5.0));
        }
        edges.push(EdgeSpec::new("w0", "w1", 4.0, EdgeKind::Staircase));
        edges.push(EdgeSpec::new("e0", "e1", 6.0, EdgeKind::Elevator));
        let g = IndoorGraph::new(nodes, edges).unwrap();
        let ix = |s: &str| g.require(s).unwrap();
        let corpus = RouteCorpus::from_routes(
            &g,
            vec![
                vec![ix("m0"), ix("w0"), ix("w1"), ix("m1")],
                vec![ix("w0"), ix("w1"), ix("m1")],
            ],
        )
        .unwrap();
        let heavy = CostModel::single(CriterionKind::Staircases, 1000.0).unwrap();
        assert_eq!(impacted_fraction(&g, &corpus, &heavy).unwrap(), 1.0);
        let eval = CorpusEvaluator::new(&g, &corpus).unwrap();
        assert_eq!(eval.evaluate(&heavy).unwrap().impacted, 1.0);
        assert_eq!(eval.evaluate(&CostModel::empty()).unwrap().score.mean.value(), 1.0);
    }
}
