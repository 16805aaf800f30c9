//! Minimum weighted-cost routes under a [`CostModel`].
//!
//! Turn-style criteria make the cost of `x -> y` depend on the node before
//! `x`, so a per-node distance label is not enough for optimality. The exact
//! planner works in two passes:
//!
//! 1. a backward label-setting search over arc states ("at `v`, arrived from
//!    `u`") computes, for every state, the cheapest cost of any *walk* to the
//!    destination;
//! 2. a best-first search over partial *simple* paths uses those values as an
//!    admissible estimate. Walk costs lower-bound simple-path costs, so the
//!    first complete path popped is the optimal simple route.
//!
//! Labels are ordered by `(weighted cost, metric length, node sequence)`; since
//! node indices follow id order, ties resolve to the lexicographically
//! smallest id sequence, which is also what [`brute_force_route`] does.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::criteria::{penalty_units, step_cost_unchecked, CostModel, CriterionKind, Step};
use crate::error::{Error, Result};
use crate::graph::{IndoorGraph, NodeId, NodeIx};

/// A simple path through the graph with its metric and weighted length.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub nodes: Vec<NodeIx>,
    pub metric_length: f64,
    pub weighted_cost: f64,
}

impl Route {
    /// Validates `nodes` as a simple path in `g` and prices it under `model`.
    pub fn evaluate(g: &IndoorGraph, nodes: Vec<NodeIx>, model: &CostModel) -> Result<Route> {
        validate_path(g, &nodes)?;
        let (weighted_cost, metric_length) = price(g, &nodes, model);
        Ok(Route {
            nodes,
            metric_length,
            weighted_cost,
        })
    }

    /// Like [`Route::evaluate`] with node ids.
    pub fn from_ids<S: AsRef<str>>(g: &IndoorGraph, ids: &[S], model: &CostModel) -> Result<Route> {
        let nodes = ids.iter().map(|s| g.require(s.as_ref())).collect::<Result<Vec<_>>>()?;
        Route::evaluate(g, nodes, model)
    }

    pub fn start(&self) -> NodeIx {
        self.nodes[0]
    }

    pub fn dest(&self) -> NodeIx {
        *self.nodes.last().expect("routes are non-empty")
    }

    pub fn ids<'g>(&self, g: &'g IndoorGraph) -> Vec<&'g NodeId> {
        self.nodes.iter().map(|&n| g.id(n)).collect()
    }

    /// Steps of the route, each with its predecessor context.
    pub(crate) fn steps<'a>(&'a self, g: &'a IndoorGraph) -> impl Iterator<Item = Step> + 'a {
        let dest = self.dest();
        (0..self.nodes.len().saturating_sub(1)).map(move |i| {
            let (x, y) = (self.nodes[i], self.nodes[i + 1]);
            let prev = (i > 0).then(|| {
                let p = self.nodes[i - 1];
                (p, g.edge_between(p, x).expect("validated route"))
            });
            Step {
                prev,
                x,
                y,
                edge: g.edge_between(x, y).expect("validated route"),
                dest,
            }
        })
    }

    /// Total penalty units `kind` charges along the route.
    pub fn occurrences(&self, g: &IndoorGraph, model: &CostModel, kind: CriterionKind) -> f64 {
        self.steps(g).map(|s| penalty_units(g, model, kind, &s)).sum()
    }

    /// Penalty meters per active criterion, in kind order.
    pub fn penalty_breakdown(&self, g: &IndoorGraph, model: &CostModel) -> Vec<(CriterionKind, f64)> {
        model
            .criteria()
            .map(|c| {
                let total: f64 = self.steps(g).map(|s| c.w * penalty_units(g, model, c.kind, &s)).sum();
                (c.kind, total)
            })
            .collect()
    }
}

fn validate_path(g: &IndoorGraph, nodes: &[NodeIx]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::Validation("route has no nodes".into()));
    }
    let mut seen = vec![false; g.node_count()];
    for &n in nodes {
        if n.index() >= g.node_count() {
            return Err(Error::UnknownNode(format!("#{}", n.0)));
        }
        if std::mem::replace(&mut seen[n.index()], true) {
            return Err(Error::Validation(format!("route repeats node {}", g.id(n))));
        }
    }
    for w in nodes.windows(2) {
        if g.edge_between(w[0], w[1]).is_none() {
            return Err(Error::Validation(format!(
                "route step {}-{} is not an edge",
                g.id(w[0]),
                g.id(w[1])
            )));
        }
    }
    Ok(())
}

/// `(weighted, metric)` totals, accumulated step by step in path order.
fn price(g: &IndoorGraph, nodes: &[NodeIx], model: &CostModel) -> (f64, f64) {
    let route = Route {
        nodes: nodes.to_vec(),
        metric_length: 0.0,
        weighted_cost: 0.0,
    };
    let mut w = 0.0;
    let mut m = 0.0;
    for s in route.steps(g) {
        w += step_cost_unchecked(g, model, &s);
        m += g.edge(s.edge).length;
    }
    (w, m)
}

/// How the planner treats predecessor-dependent costs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SearchMode {
    /// Optimal over simple paths for every cost model.
    #[default]
    Exact,
    /// Textbook node-label Dijkstra that reads the turn from the predecessor
    /// stored in the node's label. Reproduces the classic algorithm as
    /// printed; may return suboptimal routes under turn-dependent criteria.
    NodeLabel,
}

/// Lexicographic `(weighted, metric)` cost.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost(f64, f64);

impl Cost {
    const ZERO: Cost = Cost(0.0, 0.0);
    const INF: Cost = Cost(f64::INFINITY, f64::INFINITY);

    fn add(self, w: f64, m: f64) -> Cost {
        Cost(self.0 + w, self.1 + m)
    }

    fn cmp(&self, other: &Cost) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.total_cmp(&other.1))
    }
}

struct Entry<T> {
    key: Cost,
    tie: T,
}

impl<T: Ord> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Ord> Eq for Entry<T> {}
impl<T: Ord> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Ord> Ord for Entry<T> {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp(&self.key).then_with(|| other.tie.cmp(&self.tie))
    }
}

/// Cheapest walk cost from each arc state to `dest`.
fn cost_to_go(g: &IndoorGraph, dest: NodeIx, model: &CostModel) -> Vec<Cost> {
    let mut h = vec![Cost::INF; g.arc_count()];
    let mut done = vec![false; g.arc_count()];
    let mut heap = BinaryHeap::new();
    for out in g.arcs_from(dest) {
        let into = g.arc_reverse(out);
        h[into] = Cost::ZERO;
        heap.push(Entry {
            key: Cost::ZERO,
            tie: into,
        });
    }
    while let Some(Entry { key, tie: arc }) = heap.pop() {
        if std::mem::replace(&mut done[arc], true) {
            continue;
        }
        let x = g.arc_tail(arc);
        if x == dest {
            continue;
        }
        let y = g.arc_head(arc);
        let edge = g.edge_between(x, y).expect("arc edge");
        let len = g.edge(edge).length;
        for back in g.arcs_from(x) {
            let into_x = g.arc_reverse(back);
            if done[into_x] {
                continue;
            }
            let p = g.arc_head(back);
            let step = Step {
                prev: Some((p, g.edge_between(p, x).expect("arc edge"))),
                x,
                y,
                edge,
                dest,
            };
            let cand = key.add(step_cost_unchecked(g, model, &step), len);
            if cand.cmp(&h[into_x]) == Ordering::Less {
                h[into_x] = cand;
                heap.push(Entry { key: cand, tie: into_x });
            }
        }
    }
    h
}

/// Optimal simple route from `start` to `dest`, or `None` if unreachable.
pub fn plan_route(g: &IndoorGraph, start: NodeIx, dest: NodeIx, model: &CostModel) -> Result<Option<Route>> {
    plan_route_with(g, start, dest, model, SearchMode::Exact)
}

/// [`plan_route`] addressed by node ids.
pub fn plan_route_ids(g: &IndoorGraph, start: &str, dest: &str, model: &CostModel) -> Result<Option<Route>> {
    plan_route(g, g.require(start)?, g.require(dest)?, model)
}

pub fn plan_route_with(
    g: &IndoorGraph,
    start: NodeIx,
    dest: NodeIx,
    model: &CostModel,
    mode: SearchMode,
) -> Result<Option<Route>> {
    for n in [start, dest] {
        if n.index() >= g.node_count() {
            return Err(Error::UnknownNode(format!("#{}", n.0)));
        }
    }
    if start == dest {
        return Ok(Some(Route {
            nodes: vec![start],
            metric_length: 0.0,
            weighted_cost: 0.0,
        }));
    }
    Ok(match mode {
        SearchMode::Exact => exact_search(g, start, dest, model),
        SearchMode::NodeLabel => node_label_search(g, start, dest, model),
    })
}

/// Partial simple path; ordered by node sequence only.
struct Partial {
    path: Vec<NodeIx>,
    cost: Cost,
}

impl PartialEq for Partial {
    fn eq(&self, other: &Self) -> bool {
        self.path == other.path
    }
}
impl Eq for Partial {}
impl PartialOrd for Partial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Partial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.path.cmp(&other.path)
    }
}

fn exact_search(g: &IndoorGraph, start: NodeIx, dest: NodeIx, model: &CostModel) -> Option<Route> {
    let h = cost_to_go(g, dest, model);
    let mut heap = BinaryHeap::new();
    heap.push(Entry {
        key: Cost::ZERO,
        tie: Partial {
            path: vec![start],
            cost: Cost::ZERO,
        },
    });
    while let Some(Entry { tie: label, .. }) = heap.pop() {
        let x = *label.path.last().expect("non-empty");
        if x == dest {
            return Some(Route {
                nodes: label.path,
                metric_length: label.cost.1,
                weighted_cost: label.cost.0,
            });
        }
        let prev = (label.path.len() >= 2).then(|| {
            let p = label.path[label.path.len() - 2];
            (p, g.edge_between(p, x).expect("path edge"))
        });
        for arc in g.arcs_from(x) {
            let y = g.arc_head(arc);
            if h[arc].0.is_infinite() || label.path.contains(&y) {
                continue;
            }
            let edge = g.edge_between(x, y).expect("arc edge");
            let step = Step { prev, x, y, edge, dest };
            let cost = label
                .cost
                .add(step_cost_unchecked(g, model, &step), g.edge(edge).length);
            let mut path = Vec::with_capacity(label.path.len() + 1);
            path.extend_from_slice(&label.path);
            path.push(y);
            heap.push(Entry {
                key: Cost(cost.0 + h[arc].0, cost.1 + h[arc].1),
                tie: Partial { path, cost },
            });
        }
    }
    None
}

fn node_label_search(g: &IndoorGraph, start: NodeIx, dest: NodeIx, model: &CostModel) -> Option<Route> {
    let n = g.node_count();
    let mut dist = vec![Cost::INF; n];
    let mut prev: Vec<Option<NodeIx>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[start.index()] = Cost::ZERO;
    heap.push(Entry {
        key: Cost::ZERO,
        tie: start,
    });
    while let Some(Entry { key, tie: u }) = heap.pop() {
        if std::mem::replace(&mut done[u.index()], true) {
            continue;
        }
        if u == dest {
            break;
        }
        let from = prev[u.index()].map(|p| (p, g.edge_between(p, u).expect("tree edge")));
        for (v, edge) in g.neighbors(u) {
            if done[v.index()] {
                continue;
            }
            let step = Step {
                prev: from,
                x: u,
                y: v,
                edge,
                dest,
            };
            let alt = key.add(step_cost_unchecked(g, model, &step), g.edge(edge).length);
            if alt.cmp(&dist[v.index()]) == Ordering::Less {
                dist[v.index()] = alt;
                prev[v.index()] = Some(u);
                heap.push(Entry { key: alt, tie: v });
            }
        }
    }
    if !done[dest.index()] {
        return None;
    }
    let mut nodes = vec![dest];
    let mut cur = dest;
    while let Some(p) = prev[cur.index()] {
        nodes.push(p);
        cur = p;
    }
    nodes.reverse();
    // the tree path is simple; price it with true predecessor context
    let (weighted_cost, metric_length) = price(g, &nodes, model);
    Some(Route {
        nodes,
        metric_length,
        weighted_cost,
    })
}

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 15;

/// Enumerates every simple path and keeps the cheapest; verification oracle.
pub fn brute_force_route(g: &IndoorGraph, start: NodeIx, dest: NodeIx, model: &CostModel) -> Result<Option<Route>> {
    brute_force_route_limited(g, start, dest, model, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn brute_force_route_limited(
    g: &IndoorGraph,
    start: NodeIx,
    dest: NodeIx,
    model: &CostModel,
    max_nodes: usize,
) -> Result<Option<Route>> {
    if g.node_count() > max_nodes {
        return Err(Error::GuardExceeded {
            nodes: g.node_count(),
            limit: max_nodes,
        });
    }
    for n in [start, dest] {
        if n.index() >= g.node_count() {
            return Err(Error::UnknownNode(format!("#{}", n.0)));
        }
    }
    let mut best: Option<(f64, f64, Vec<NodeIx>)> = None;
    let mut path = vec![start];
    let mut on_path = vec![false; g.node_count()];
    on_path[start.index()] = true;
    enumerate(g, dest, model, &mut path, &mut on_path, 0.0, 0.0, &mut best);
    Ok(best.map(|(w, m, nodes)| Route {
        nodes,
        metric_length: m,
        weighted_cost: w,
    }))
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    g: &IndoorGraph,
    dest: NodeIx,
    model: &CostModel,
    path: &mut Vec<NodeIx>,
    on_path: &mut [bool],
    w: f64,
    m: f64,
    best: &mut Option<(f64, f64, Vec<NodeIx>)>,
) {
    let x = *path.last().expect("non-empty");
    if x == dest {
        let better = match best {
            None => true,
            Some((bw, bm, bp)) => w
                .total_cmp(bw)
                .then(m.total_cmp(bm))
                .then_with(|| path.as_slice().cmp(bp.as_slice()))
                .is_lt(),
        };
        if better {
            *best = Some((w, m, path.clone()));
        }
        return;
    }
    let prev = (path.len() >= 2).then(|| {
        let p = path[path.len() - 2];
        (p, g.edge_between(p, x).expect("path edge"))
    });
    for (y, edge) in g.neighbors(x) {
        if on_path[y.index()] {
            continue;
        }
        let step = Step { prev, x, y, edge, dest };
        let sw = step_cost_unchecked(g, model, &step);
        let sm = g.edge(edge).length;
        path.push(y);
        on_path[y.index()] = true;
        enumerate(g, dest, model, path, on_path, w + sw, m + sm, best);
        on_path[y.index()] = false;
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::WeightedCriterion;
    use crate::graph::{EdgeKind, EdgeSpec, Node};

    fn triangle() -> IndoorGraph {
        IndoorGraph::new(
            vec![
                Node::plain("A", 0.0, 0.0, 0),
                Node::plain("B", 1.0, 0.0, 0),
                Node::plain("C", 2.0, 0.0, 0),
            ],
            vec![
                EdgeSpec::walk("A", "B", 1.0),
                EdgeSpec::walk("B", "C", 1.0),
                EdgeSpec::walk("A", "C", 3.0),
            ],
        )
        .unwrap()
    }

    fn ids(g: &IndoorGraph, r: &Route) -> Vec<String> {
        r.ids(g).into_iter().map(|i| i.0.clone()).collect()
    }

    #[test]
    fn degenerate_route() {
        let g = triangle();
        let r = plan_route_ids(&g, "A", "A", &CostModel::empty()).unwrap().unwrap();
        assert_eq!(ids(&g, &r), ["A"]);
        assert_eq!((r.metric_length, r.weighted_cost), (0.0, 0.0));
    }

    #[test]
    fn two_hops_beat_long_direct_edge() {
        let g = triangle();
        let r = plan_route_ids(&g, "A", "C", &CostModel::empty()).unwrap().unwrap();
        assert_eq!(ids(&g, &r), ["A", "B", "C"]);
        assert_eq!(r.metric_length, 2.0);
    }

    #[test]
    fn unknown_and_unreachable() {
        let g = IndoorGraph::new(
            vec![Node::plain("A", 0.0, 0.0, 0), Node::plain("B", 1.0, 0.0, 0)],
            vec![],
        )
        .unwrap();
        assert!(plan_route_ids(&g, "A", "B", &CostModel::empty()).unwrap().is_none());
        assert!(matches!(
            plan_route_ids(&g, "A", "Q", &CostModel::empty()),
            Err(Error::UnknownNode(_))
        ));
    }

    /// 3x3 grid plus one long diagonal. The metric winner needs two right
    /// angles; the diagonal route has none.
    fn dogleg() -> IndoorGraph {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                nodes.push(Node::plain(
                    format!("n{r}{c}").as_str(),
                    c as f64 * 10.0,
                    r as f64 * 10.0,
                    0,
                ));
                if c > 0 {
                    edges.push(EdgeSpec::walk(
                        format!("n{r}{}", c - 1).as_str(),
                        format!("n{r}{c}").as_str(),
                        10.0,
                    ));
                }
                if r > 0 {
                    edges.push(EdgeSpec::walk(
                        format!("n{}{c}", r - 1).as_str(),
                        format!("n{r}{c}").as_str(),
                        10.0,
                    ));
                }
            }
        }
        // straight-line shortcut drawn as a gently bent corridor
        nodes.push(Node::plain("m", 12.0, 8.0, 0));
        edges.push(EdgeSpec::walk("n00", "m", 25.0));
        edges.push(EdgeSpec::walk("m", "n22", 25.0));
        IndoorGraph::new(nodes, edges).unwrap()
    }

    #[test]
    fn turn_weight_prefers_fewer_turns() {
        let g = dogleg();
        let plain = plan_route_ids(&g, "n00", "n22", &CostModel::empty()).unwrap().unwrap();
        assert_eq!(plain.metric_length, 40.0);
        let turns = CostModel::single(CriterionKind::Turns, 50.0).unwrap();
        let r = plan_route_ids(&g, "n00", "n22", &turns).unwrap().unwrap();
        let oracle = brute_force_route(&g, g.require("n00").unwrap(), g.require("n22").unwrap(), &turns)
            .unwrap()
            .unwrap();
        assert_eq!(r.weighted_cost, oracle.weighted_cost);
        assert_eq!(r.nodes, oracle.nodes);
        assert_eq!(r.occurrences(&g, &turns, CriterionKind::Turns), 0.0);
        assert!(r.metric_length > plain.metric_length);
    }

    #[test]
    fn tie_break_prefers_smaller_ids() {
        // square: A-B-D and A-C-D are identical
        let g = IndoorGraph::new(
            vec![
                Node::plain("A", 0.0, 0.0, 0),
                Node::plain("B", 1.0, 0.0, 0),
                Node::plain("C", 0.0, 1.0, 0),
                Node::plain("D", 1.0, 1.0, 0),
            ],
            vec![
                EdgeSpec::walk("A", "C", 1.0),
                EdgeSpec::walk("C", "D", 1.0),
                EdgeSpec::walk("A", "B", 1.0),
                EdgeSpec::walk("B", "D", 1.0),
            ],
        )
        .unwrap();
        for mode in [SearchMode::Exact, SearchMode::NodeLabel] {
            let r = plan_route_with(
                &g,
                g.require("A").unwrap(),
                g.require("D").unwrap(),
                &CostModel::empty(),
                mode,
            )
            .unwrap()
            .unwrap();
            assert_eq!(ids(&g, &r), ["A", "B", "D"]);
        }
    }

    /// The node-label variant keeps one label per node and so can miss the
    /// optimum once the arrival direction matters.
    #[test]
    fn node_label_mode_can_be_suboptimal() {
        // Direct s -> a is cheapest to reach a, but arriving heading east makes
        // a -> t (north) a right-angle turn. Two gentle bends via b avoid it.
        let g = IndoorGraph::new(
            vec![
                Node::plain("s", 0.0, 0.0, 0),
                Node::plain("a", 20.0, 0.0, 0),
                Node::plain("t", 20.0, 10.0, 0),
                Node::plain("b", 15.0, -5.0, 0),
            ],
            vec![
                EdgeSpec::walk("s", "a", 10.0),
                EdgeSpec::walk("a", "t", 10.0),
                EdgeSpec::walk("s", "b", 6.0),
                EdgeSpec::walk("b", "a", 6.0),
            ],
        )
        .unwrap();
        let m = CostModel::single(CriterionKind::Turns, 100.0).unwrap();
        let (s, t) = (g.require("s").unwrap(), g.require("t").unwrap());
        let exact = plan_route_with(&g, s, t, &m, SearchMode::Exact).unwrap().unwrap();
        let label = plan_route_with(&g, s, t, &m, SearchMode::NodeLabel).unwrap().unwrap();
        assert_eq!(ids(&g, &exact), ["s", "b", "a", "t"]);
        assert_eq!(exact.weighted_cost, 22.0);
        assert_eq!(ids(&g, &label), ["s", "a", "t"]);
        assert_eq!(label.weighted_cost, 120.0);
    }

    #[test]
    fn brute_force_single_path_and_guard() {
        let g = IndoorGraph::new(
            vec![
                Node::plain("a", 0.0, 0.0, 0),
                Node::plain("b", 1.0, 0.0, 0),
                Node::plain("c", 1.0, 0.0, 1),
            ],
            vec![
                EdgeSpec::walk("a", "b", 1.0),
                EdgeSpec::new("b", "c", 5.0, EdgeKind::Staircase),
            ],
        )
        .unwrap();
        let m = CostModel::single(CriterionKind::Staircases, 3.0).unwrap();
        let (a, c) = (g.require("a").unwrap(), g.require("c").unwrap());
        let r = brute_force_route(&g, a, c, &m).unwrap().unwrap();
        assert_eq!(ids(&g, &r), ["a", "b", "c"]);
        assert_eq!(r.weighted_cost, 9.0);
        assert!(matches!(
            brute_force_route_limited(&g, a, c, &m, 2),
            Err(Error::GuardExceeded { nodes: 3, limit: 2 })
        ));
    }

    #[test]
    fn route_evaluate_rejects_bad_paths() {
        let g = triangle();
        let m = CostModel::empty();
        assert!(Route::from_ids(&g, &["A", "B", "A"], &m).is_err());
        assert!(Route::from_ids::<&str>(&g, &[], &m).is_err());
        assert!(matches!(
            Route::from_ids(&g, &["A", "X"], &m),
            Err(Error::UnknownNode(_))
        ));
        let r = Route::from_ids(&g, &["C", "A", "B"], &m).unwrap();
        assert_eq!(r.metric_length, 4.0);
    }

    #[test]
    fn breakdown_sums_to_penalty() {
        let g = dogleg();
        let m = CostModel::new([
            WeightedCriterion::new(CriterionKind::Turns, 3.0),
            WeightedCriterion::new(CriterionKind::BranchingFactor, 0.5),
        ])
        .unwrap();
        let r = plan_route_ids(&g, "n00", "n21", &m).unwrap().unwrap();
        let total: f64 = r.penalty_breakdown(&g, &m).iter().map(|p| p.1).sum();
        assert!((total - (r.weighted_cost - r.metric_length)).abs() < 1e-9);
    }
}
