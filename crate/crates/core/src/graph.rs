//! Indoor path network: typed multi-floor undirected graph with planar
//! coordinates, its JSON file format, and the angle geometry the routing
//! criteria are built on.
//!
//! Nodes are stored sorted by id, so comparing [`NodeIx`] values compares
//! ids lexicographically. Adjacency is kept in compressed form: every
//! undirected edge contributes two directed *arcs*, and an arc `u -> v`
//! doubles as the search state "at `v`, arrived from `u`".

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equality tolerance for angle comparisons, in degrees.
pub const ANGLE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// Dense index of a node inside one [`IndoorGraph`]. Ordering follows id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIx(pub u32);

impl NodeIx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeIx(pub u32);

impl EdgeIx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    #[default]
    Plain,
    Doorway,
    Entrance,
    RevolvingDoor,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    #[default]
    Walk,
    Staircase,
    Elevator,
}

impl EdgeKind {
    /// Staircases and elevators connect floors; they carry no plan direction.
    pub fn is_vertical(self) -> bool {
        !matches!(self, EdgeKind::Walk)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    pub floor: i32,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: NodeIx,
    pub b: NodeIx,
    pub length: f64,
    pub kind: EdgeKind,
}

/// Edge description by node id, as accepted by [`IndoorGraph::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
    pub kind: EdgeKind,
}

impl EdgeSpec {
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>, length: f64, kind: EdgeKind) -> Self {
        EdgeSpec {
            a: a.into(),
            b: b.into(),
            length,
            kind,
        }
    }

    pub fn walk(a: impl Into<NodeId>, b: impl Into<NodeId>, length: f64) -> Self {
        Self::new(a, b, length, EdgeKind::Walk)
    }
}

impl Node {
    pub fn new(id: impl Into<NodeId>, x: f64, y: f64, floor: i32, kind: NodeKind) -> Self {
        Node {
            id: id.into(),
            x,
            y,
            floor,
            kind,
        }
    }

    pub fn plain(id: impl Into<NodeId>, x: f64, y: f64, floor: i32) -> Self {
        Self::new(id, x, y, floor, NodeKind::Plain)
    }
}

/// Immutable, validated indoor graph.
#[derive(Debug, Clone, PartialEq)]
pub struct IndoorGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<NodeId, NodeIx>,
    /// `arc_offsets[u]..arc_offsets[u + 1]` are the arcs leaving `u`, sorted by head.
    arc_offsets: Vec<usize>,
    arc_head: Vec<NodeIx>,
    arc_edge: Vec<EdgeIx>,
    arc_reverse: Vec<usize>,
}

impl IndoorGraph {
    /// Validates and builds a graph. Nodes are re-ordered by id; edge order is kept.
    pub fn new(mut nodes: Vec<Node>, edges: Vec<EdgeSpec>) -> Result<Self> {
        nodes.sort_by(|l, r| l.id.cmp(&r.id));
        for pair in nodes.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::Validation(format!("duplicate node id {:?}", pair[0].id.0)));
            }
        }
        for n in &nodes {
            if !n.x.is_finite() || !n.y.is_finite() {
                return Err(Error::Validation(format!(
                    "node {:?} has non-finite coordinates",
                    n.id.0
                )));
            }
        }
        if nodes.len() > u32::MAX as usize {
            return Err(Error::Validation("too many nodes".into()));
        }
        let index: HashMap<NodeId, NodeIx> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), NodeIx(i as u32)))
            .collect();

        let mut seen = HashSet::new();
        let mut built = Vec::with_capacity(edges.len());
        for e in edges {
            let a = *index
                .get(&e.a)
                .ok_or_else(|| Error::Validation(format!("edge references unknown node {:?}", e.a.0)))?;
            let b = *index
                .get(&e.b)
                .ok_or_else(|| Error::Validation(format!("edge references unknown node {:?}", e.b.0)))?;
            if a == b {
                return Err(Error::Validation(format!("self-loop at node {:?}", e.a.0)));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::Validation(format!(
                    "edge {:?}-{:?} has non-positive or non-finite length {}",
                    e.a.0, e.b.0, e.length
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Validation(format!("duplicate edge {:?}-{:?}", e.a.0, e.b.0)));
            }
            let same_floor = nodes[a.index()].floor == nodes[b.index()].floor;
            if same_floor != (e.kind == EdgeKind::Walk) {
                return Err(Error::Validation(format!(
                    "floor/kind mismatch on edge {:?}-{:?}: kind {:?} between floors {} and {}",
                    e.a.0,
                    e.b.0,
                    e.kind,
                    nodes[a.index()].floor,
                    nodes[b.index()].floor
                )));
            }
            built.push(Edge {
                a,
                b,
                length: e.length,
                kind: e.kind,
            });
        }

        let n = nodes.len();
        let mut adj: Vec<Vec<(NodeIx, EdgeIx)>> = vec![Vec::new(); n];
        for (i, e) in built.iter().enumerate() {
            let ei = EdgeIx(i as u32);
            adj[e.a.index()].push((e.b, ei));
            adj[e.b.index()].push((e.a, ei));
        }
        let mut arc_offsets = Vec::with_capacity(n + 1);
        let mut arc_head = Vec::with_capacity(2 * built.len());
        let mut arc_edge = Vec::with_capacity(2 * built.len());
        arc_offsets.push(0);
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
            for &(v, e) in list.iter() {
                arc_head.push(v);
                arc_edge.push(e);
            }
            arc_offsets.push(arc_head.len());
        }
        let mut g = IndoorGraph {
            nodes,
            edges: built,
            index,
            arc_offsets,
            arc_head,
            arc_edge,
            arc_reverse: Vec::new(),
        };
        g.arc_reverse = (0..g.arc_head.len())
            .map(|arc| {
                let tail = g.arc_tail(arc);
                g.arc(g.arc_head[arc], tail).expect("adjacency is symmetric")
            })
            .collect();
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, ix: NodeIx) -> &Node {
        &self.nodes[ix.index()]
    }

    pub fn edge(&self, ix: EdgeIx) -> &Edge {
        &self.edges[ix.index()]
    }

    pub fn id(&self, ix: NodeIx) -> &NodeId {
        &self.nodes[ix.index()].id
    }

    pub fn node_ix(&self, id: &str) -> Option<NodeIx> {
        self.index.get(&NodeId(id.to_string())).copied()
    }

    pub fn require(&self, id: &str) -> Result<NodeIx> {
        self.node_ix(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn node_ixs(&self) -> impl Iterator<Item = NodeIx> {
        (0..self.nodes.len() as u32).map(NodeIx)
    }

    /// Number of distinct neighbors.
    pub fn degree(&self, n: NodeIx) -> usize {
        self.arc_offsets[n.index() + 1] - self.arc_offsets[n.index()]
    }

    /// Neighbors of `n` in id order, with the connecting edge.
    pub fn neighbors(&self, n: NodeIx) -> impl Iterator<Item = (NodeIx, EdgeIx)> + '_ {
        let r = self.arcs_from(n);
        self.arc_head[r.clone()]
            .iter()
            .copied()
            .zip(self.arc_edge[r].iter().copied())
    }

    pub fn edge_between(&self, a: NodeIx, b: NodeIx) -> Option<EdgeIx> {
        self.arc(a, b).map(|arc| self.arc_edge[arc])
    }

    pub(crate) fn arc_count(&self) -> usize {
        self.arc_head.len()
    }

    pub(crate) fn arcs_from(&self, n: NodeIx) -> std::ops::Range<usize> {
        self.arc_offsets[n.index()]..self.arc_offsets[n.index() + 1]
    }

    /// Arc id of `from -> to`, if adjacent.
    pub(crate) fn arc(&self, from: NodeIx, to: NodeIx) -> Option<usize> {
        let r = self.arcs_from(from);
        let start = r.start;
        self.arc_head[r].binary_search(&to).ok().map(|p| start + p)
    }

    pub(crate) fn arc_head(&self, arc: usize) -> NodeIx {
        self.arc_head[arc]
    }

    pub(crate) fn arc_tail(&self, arc: usize) -> NodeIx {
        // offsets are sorted; find the owning node
        let pos = self.arc_offsets.partition_point(|&o| o <= arc);
        NodeIx((pos - 1) as u32)
    }

    pub(crate) fn arc_reverse(&self, arc: usize) -> usize {
        self.arc_reverse[arc]
    }

    /// Plan direction of the walk edge `from -> to`, or `None` when the edge
    /// is vertical or has zero plan extent.
    fn plan_vector(&self, from: NodeIx, to: NodeIx, edge: EdgeIx) -> Option<(f64, f64)> {
        if self.edges[edge.index()].kind.is_vertical() {
            return None;
        }
        let (p, q) = (self.node(from), self.node(to));
        if p.floor != q.floor {
            return None;
        }
        let v = (q.x - p.x, q.y - p.y);
        if v.0 == 0.0 && v.1 == 0.0 {
            None
        } else {
            Some(v)
        }
    }

    /// Interior angle at `via` between `via -> prev` and `via -> next`, in
    /// degrees: 180 is straight on, 0 is a full reversal.
    ///
    /// Returns `Ok(None)` when either edge is vertical or has no plan extent.
    pub fn turn_angle(&self, prev: NodeIx, via: NodeIx, next: NodeIx) -> Result<Option<f64>> {
        let e1 = self
            .edge_between(prev, via)
            .ok_or_else(|| self.not_an_edge(prev, via))?;
        let e2 = self
            .edge_between(via, next)
            .ok_or_else(|| self.not_an_edge(via, next))?;
        Ok(self.turn_angle_unchecked(prev, via, next, e1, e2))
    }

    pub(crate) fn turn_angle_unchecked(
        &self,
        prev: NodeIx,
        via: NodeIx,
        next: NodeIx,
        in_edge: EdgeIx,
        out_edge: EdgeIx,
    ) -> Option<f64> {
        let back = self.plan_vector(via, prev, in_edge)?;
        let out = self.plan_vector(via, next, out_edge)?;
        Some(angle_between(back, out))
    }

    /// Plan angle between the direction `via -> next` and the bearing from
    /// `via` to `dest`: 0 when the edge points straight at the destination.
    pub fn deviation_angle(&self, via: NodeIx, next: NodeIx, dest: NodeIx) -> Result<Option<f64>> {
        let e = self
            .edge_between(via, next)
            .ok_or_else(|| self.not_an_edge(via, next))?;
        if dest.index() >= self.nodes.len() {
            return Err(Error::Precondition(format!("node index {} out of range", dest.0)));
        }
        Ok(self.deviation_angle_unchecked(via, next, dest, e))
    }

    pub(crate) fn deviation_angle_unchecked(
        &self,
        via: NodeIx,
        next: NodeIx,
        dest: NodeIx,
        edge: EdgeIx,
    ) -> Option<f64> {
        let out = self.plan_vector(via, next, edge)?;
        let (p, d) = (self.node(via), self.node(dest));
        let bearing = (d.x - p.x, d.y - p.y);
        if bearing.0 == 0.0 && bearing.1 == 0.0 {
            return None;
        }
        Some(angle_between(out, bearing))
    }

    fn not_an_edge(&self, a: NodeIx, b: NodeIx) -> Error {
        let name = |n: NodeIx| {
            self.nodes
                .get(n.index())
                .map(|n| n.id.0.clone())
                .unwrap_or_else(|| format!("#{}", n.0))
        };
        Error::Precondition(format!("{:?}-{:?} is not an edge", name(a), name(b)))
    }

    pub fn load<R: Read>(source: R) -> Result<Self> {
        let file: GraphFile = serde_json::from_reader(source)?;
        file.into_graph()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::load(s.as_bytes())
    }

    pub fn load_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let f = std::fs::File::open(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::load(std::io::BufReader::new(f))
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: IdToken::Str(n.id.0.clone()),
                    x: n.x,
                    y: n.y,
                    floor: n.floor,
                    kind: n.kind,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    a: IdToken::Str(self.id(e.a).0.clone()),
                    b: IdToken::Str(self.id(e.b).0.clone()),
                    length: e.length,
                    kind: e.kind,
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("graph serializes")
    }
}

/// Planar angle between two non-zero vectors, in `[0, 180]` degrees.
pub(crate) fn angle_between(u: (f64, f64), v: (f64, f64)) -> f64 {
    let dot = u.0 * v.0 + u.1 * v.1;
    let norm = (u.0 * u.0 + u.1 * u.1).sqrt() * (v.0 * v.0 + v.1 * v.1).sqrt();
    (dot / norm).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Ids may be written as JSON strings or integers; both load as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IdToken {
    Str(String),
    Int(i64),
}

impl IdToken {
    pub fn into_id(self) -> NodeId {
        match self {
            IdToken::Str(s) => NodeId(s),
            IdToken::Int(i) => NodeId(i.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: IdToken,
    pub x: f64,
    pub y: f64,
    pub floor: i32,
    #[serde(default)]
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub a: IdToken,
    pub b: IdToken,
    pub length: f64,
    #[serde(default)]
    pub kind: EdgeKind,
}

/// On-disk graph representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<IndoorGraph> {
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| Node::new(n.id.into_id(), n.x, n.y, n.floor, n.kind))
            .collect();
        let edges = self
            .edges
            .into_iter()
            .map(|e| EdgeSpec::new(e.a.into_id(), e.b.into_id(), e.length, e.kind))
            .collect();
        IndoorGraph::new(nodes, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(coords: &[(&str, f64, f64)]) -> IndoorGraph {
        let nodes = coords.iter().map(|&(id, x, y)| Node::plain(id, x, y, 0)).collect();
        let edges = coords.windows(2).map(|w| EdgeSpec::walk(w[0].0, w[1].0, 1.0)).collect();
        IndoorGraph::new(nodes, edges).unwrap()
    }

    fn turn(g: &IndoorGraph, p: &str, v: &str, n: &str) -> Option<f64> {
        g.turn_angle(g.require(p).unwrap(), g.require(v).unwrap(), g.require(n).unwrap())
            .unwrap()
    }

    #[test]
    fn minimal_graph_loads() {
        let g = IndoorGraph::from_json_str(
            r#"{"nodes":[{"id":"A","x":0,"y":0,"floor":0},{"id":"B","x":5,"y":0,"floor":0}],
                "edges":[{"a":"A","b":"B","length":5}]}"#,
        )
        .unwrap();
        assert_eq!(g.degree(g.require("A").unwrap()), 1);
        assert_eq!(g.degree(g.require("B").unwrap()), 1);
        assert_eq!(g.edges()[0].kind, EdgeKind::Walk);
        assert_eq!(g.nodes()[0].kind, NodeKind::Plain);
    }

    #[test]
    fn integer_ids_are_accepted() {
        let g = IndoorGraph::from_json_str(
            r#"{"nodes":[{"id":1,"x":0,"y":0,"floor":0},{"id":"2","x":5,"y":0,"floor":0}],
                "edges":[{"a":1,"b":2,"length":5}]}"#,
        )
        .unwrap();
        assert!(g.node_ix("1").is_some());
    }

    #[test]
    fn dangling_endpoint_is_named() {
        let err = IndoorGraph::from_json_str(
            r#"{"nodes":[{"id":"A","x":0,"y":0,"floor":0}],
                "edges":[{"a":"A","b":"Z","length":5}]}"#,
        )
        .unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("\"Z\"")), "{err}");
    }

    #[test]
    fn walk_between_floors_is_rejected() {
        let err = IndoorGraph::from_json_str(
            r#"{"nodes":[{"id":"A","x":0,"y":0,"floor":0},{"id":"B","x":0,"y":0,"floor":1}],
                "edges":[{"a":"A","b":"B","length":5,"kind":"walk"}]}"#,
        )
        .unwrap_err();
        assert!(
            matches!(&err, Error::Validation(m) if m.contains("floor/kind")),
            "{err}"
        );
    }

    #[test]
    fn staircase_on_one_floor_is_rejected() {
        let nodes = vec![Node::plain("A", 0.0, 0.0, 0), Node::plain("B", 1.0, 0.0, 0)];
        let err = IndoorGraph::new(nodes, vec![EdgeSpec::new("A", "B", 1.0, EdgeKind::Staircase)]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn structural_violations() {
        let nodes = || vec![Node::plain("A", 0.0, 0.0, 0), Node::plain("B", 1.0, 0.0, 0)];
        for edges in [
            vec![EdgeSpec::walk("A", "A", 1.0)],
            vec![EdgeSpec::walk("A", "B", 0.0)],
            vec![EdgeSpec::walk("A", "B", -2.0)],
            vec![EdgeSpec::walk("A", "B", f64::NAN)],
            vec![EdgeSpec::walk("A", "B", 1.0), EdgeSpec::walk("B", "A", 2.0)],
        ] {
            assert!(matches!(IndoorGraph::new(nodes(), edges), Err(Error::Validation(_))));
        }
        let dup = vec![Node::plain("A", 0.0, 0.0, 0), Node::plain("A", 1.0, 0.0, 0)];
        assert!(IndoorGraph::new(dup, vec![]).is_err());
        let inf = vec![Node::plain("A", f64::INFINITY, 0.0, 0)];
        assert!(IndoorGraph::new(inf, vec![]).is_err());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            IndoorGraph::from_json_str("{\"nodes\": ["),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            IndoorGraph::from_json_str(r#"{"nodes":[{"id":"A","x":0,"y":0,"floor":0,"kind":"window"}],"edges":[]}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn turn_angles() {
        let g = line(&[("p", 0.0, 0.0), ("v", 1.0, 0.0), ("n", 2.0, 0.0)]);
        assert_eq!(turn(&g, "p", "v", "n"), Some(180.0));
        let g = line(&[("p", 0.0, 0.0), ("v", 1.0, 0.0), ("n", 1.0, 1.0)]);
        assert!((turn(&g, "p", "v", "n").unwrap() - 90.0).abs() < 1e-9);
        let g = line(&[("p", 0.0, 0.0), ("v", 1.0, 0.0), ("n", 2.0, 1.0)]);
        assert!((turn(&g, "p", "v", "n").unwrap() - 135.0).abs() < 1e-9);
        assert_eq!(turn(&g, "p", "v", "n"), turn(&g, "n", "v", "p"));
    }

    #[test]
    fn turn_angle_requires_edges() {
        let g = line(&[("p", 0.0, 0.0), ("v", 1.0, 0.0), ("n", 2.0, 0.0)]);
        let ix = |s| g.require(s).unwrap();
        assert!(matches!(
            g.turn_angle(ix("p"), ix("n"), ix("v")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn vertical_and_degenerate_segments_have_no_angle() {
        let nodes = vec![
            Node::plain("a", 0.0, 0.0, 0),
            Node::plain("b", 1.0, 0.0, 0),
            Node::plain("c", 1.0, 0.0, 1),
            Node::plain("d", 2.0, 0.0, 1),
        ];
        let g = IndoorGraph::new(
            nodes,
            vec![
                EdgeSpec::walk("a", "b", 1.0),
                EdgeSpec::new("b", "c", 4.0, EdgeKind::Elevator),
                EdgeSpec::walk("c", "d", 1.0),
            ],
        )
        .unwrap();
        assert_eq!(turn(&g, "a", "b", "c"), None);
        assert_eq!(turn(&g, "b", "c", "d"), None);
        let ix = |s| g.require(s).unwrap();
        assert_eq!(g.deviation_angle(ix("b"), ix("c"), ix("d")).unwrap(), None);

        // coincident plan positions on one floor
        let g = line(&[("p", 0.0, 0.0), ("v", 0.0, 0.0), ("n", 1.0, 0.0)]);
        assert_eq!(turn(&g, "p", "v", "n"), None);
    }

    #[test]
    fn deviation_angles() {
        let nodes = vec![
            Node::plain("v", 0.0, 0.0, 0),
            Node::plain("e", 1.0, 0.0, 0),
            Node::plain("n", 0.0, 1.0, 0),
            Node::plain("w", -1.0, 0.0, 0),
            Node::plain("d", 5.0, 0.0, 0),
        ];
        let g = IndoorGraph::new(
            nodes,
            vec![
                EdgeSpec::walk("v", "e", 1.0),
                EdgeSpec::walk("v", "n", 1.0),
                EdgeSpec::walk("v", "w", 1.0),
                EdgeSpec::walk("e", "d", 4.0),
            ],
        )
        .unwrap();
        let ix = |s| g.require(s).unwrap();
        let dev = |n| g.deviation_angle(ix("v"), ix(n), ix("d")).unwrap().unwrap();
        assert_eq!(dev("e"), 0.0);
        assert!((dev("n") - 90.0).abs() < 1e-9);
        assert!((dev("w") - 180.0).abs() < 1e-9);
        // destination at the same plan position as via
        assert_eq!(g.deviation_angle(ix("v"), ix("e"), ix("v")).unwrap(), None);
    }

    #[test]
    fn arcs_are_consistent() {
        let g = line(&[("a", 0.0, 0.0), ("b", 1.0, 0.0), ("c", 2.0, 0.0)]);
        for arc in 0..g.arc_count() {
            let r = g.arc_reverse(arc);
            assert_eq!(g.arc_head(arc), g.arc_tail(r));
            assert_eq!(g.arc_tail(arc), g.arc_head(r));
        }
    }
}
