#![allow(dead_code)]

use prefroute::graph::{EdgeSpec, Node};
use prefroute::{EdgeKind, IndoorGraph, NodeIx, NodeKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Lengths are multiples of 0.25 so path sums are exact in f64.
pub fn quarter_length(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(1..=40) as f64 * 0.25
}

fn node_kind(rng: &mut ChaCha8Rng) -> NodeKind {
    *[
        NodeKind::Plain,
        NodeKind::Plain,
        NodeKind::Doorway,
        NodeKind::Entrance,
        NodeKind::RevolvingDoor,
    ]
    .choose(rng)
    .unwrap()
}

/// Small random multi-floor graph: a random spanning tree plus extra edges.
/// Coordinates sit on a coarse lattice so collinear and coincident points occur.
pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> IndoorGraph {
    let n = rng.gen_range(2..=max_nodes);
    let floors = rng.gen_range(1..=2);
    let nodes: Vec<Node> = (0..n)
        .map(|i| {
            Node::new(
                format!("n{i:02}"),
                rng.gen_range(0..5) as f64,
                rng.gen_range(0..5) as f64,
                rng.gen_range(0..floors),
                node_kind(rng),
            )
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 1..n {
        // occasionally leave a node detached to exercise unreachable pairs
        if rng.gen_bool(0.97) {
            pairs.push((rng.gen_range(0..i), i));
        }
    }
    let extra = rng.gen_range(0..=n / 2 + 1);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !pairs.contains(&(a.min(b), a.max(b))) {
            pairs.push((a.min(b), a.max(b)));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let kind = if nodes[a].floor == nodes[b].floor {
                EdgeKind::Walk
            } else if rng.gen_bool(0.5) {
                EdgeKind::Staircase
            } else {
                EdgeKind::Elevator
            };
            EdgeSpec::new(nodes[a].id.clone(), nodes[b].id.clone(), quarter_length(rng), kind)
        })
        .collect();
    IndoorGraph::new(nodes, edges).expect("generated graph is valid")
}

/// Two distinct nodes; the graph needs at least two.
pub fn random_pair(rng: &mut ChaCha8Rng, g: &IndoorGraph) -> (NodeIx, NodeIx) {
    let n = g.node_count() as u32;
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    (NodeIx(a), NodeIx(b))
}

/// Random simple path: a self-avoiding walk of up to `max_steps` edges.
pub fn random_simple_path(rng: &mut ChaCha8Rng, g: &IndoorGraph, max_steps: usize) -> Vec<NodeIx> {
    let n = g.node_count() as u32;
    let mut path = vec![NodeIx(rng.gen_range(0..n))];
    let steps = rng.gen_range(0..=max_steps);
    for _ in 0..steps {
        let cur = *path.last().unwrap();
        let options: Vec<NodeIx> = g.neighbors(cur).map(|(v, _)| v).filter(|v| !path.contains(v)).collect();
        match options.choose(rng) {
            Some(&v) => path.push(v),
            None => break,
        }
    }
    path
}

/// Textbook node-label Dijkstra on metric lengths.
pub fn dijkstra_distance(g: &IndoorGraph, s: NodeIx, t: NodeIx) -> Option<f64> {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[s.index()] = 0.0;
    loop {
        let u = (0..n)
            .filter(|&i| !done[i] && dist[i].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))?;
        if u == t.index() {
            return Some(dist[u]);
        }
        done[u] = true;
        for e in g.edges() {
            let v = if e.a.index() == u {
                e.b
            } else if e.b.index() == u {
                e.a
            } else {
                continue;
            };
            let d = dist[u] + e.length;
            if d < dist[v.index()] {
                dist[v.index()] = d;
            }
        }
    }
}
