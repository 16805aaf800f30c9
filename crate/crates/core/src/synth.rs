//! Seeded synthetic campuses and planted-model route corpora.
//!
//! Each floor is a rectangular corridor grid split into buildings by vertical
//! boundaries. Every row crosses each boundary through a door node whose kind
//! is drawn from the door densities. Some grid cells get a diagonal corridor
//! so both sharp and shallow turns occur, and some corridors are left out so
//! junction degrees vary. Floors are joined by cores: a staircase shaft and an
//! elevator shaft side by side, each reached from the same grid junction, with
//! slightly jittered lengths so that either may be the shorter one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{CostModel, CostModelFile, CriterionKind};
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, EdgeSpec, IndoorGraph, Node, NodeKind};
use crate::router::plan_route;
use crate::similarity::RouteCorpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub floors: u32,
    pub cols: u32,
    pub rows: u32,
    /// Number of buildings side by side along the columns.
    pub buildings: u32,
    /// Grid spacing in meters.
    pub spacing: f64,
    /// Probability that a grid cell gets a diagonal corridor.
    pub diagonal_density: f64,
    /// Probability that a grid corridor is missing (connectivity is kept).
    pub gap_density: f64,
    /// Door kind probabilities at building-boundary crossings; the rest are
    /// open passages.
    pub doorway_density: f64,
    pub entrance_density: f64,
    pub revolving_door_density: f64,
    /// Interior junctions become doorways/entrances with the boundary
    /// densities scaled by this factor.
    pub interior_door_fraction: f64,
    /// `(col, row)` junctions that host a stair + elevator core; defaults
    /// depend on the grid size.
    pub cores: Option<Vec<(u32, u32)>>,
    pub stair_length: f64,
    pub elevator_length: f64,
    /// Each shaft's length is extended by a uniform draw from `[0, jitter)`.
    pub shaft_jitter: f64,
    pub planted: CostModelFile,
    pub records: u32,
    /// Chance that a record is planned under a randomly rescaled planted model.
    pub noise: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            floors: 3,
            cols: 15,
            rows: 12,
            buildings: 3,
            spacing: 10.0,
            diagonal_density: 0.2,
            gap_density: 0.3,
            doorway_density: 0.3,
            entrance_density: 0.3,
            revolving_door_density: 0.4,
            interior_door_fraction: 0.2,
            cores: None,
            stair_length: 8.0,
            elevator_length: 8.0,
            shaft_jitter: 1.0,
            planted: CostModel::empty().to_file(),
            records: 60,
            noise: 0.0,
        }
    }
}

impl SyntheticSpec {
    pub fn with_planted(mut self, model: &CostModel) -> Self {
        self.planted = model.to_file();
        self
    }

    pub fn planted_model(&self) -> Result<CostModel> {
        self.planted.clone().into_model()
    }

    fn core_positions(&self) -> Vec<(u32, u32)> {
        self.cores.clone().unwrap_or_else(|| {
            let (c, r) = (self.cols - 1, self.rows - 1);
            vec![(1, 1), (c - 1, r - 1), (c - 1, 1), (1, r - 1), (c / 2, r / 2)]
        })
    }

    /// First column of each building after the first.
    fn boundaries(&self) -> Vec<u32> {
        (1..self.buildings).map(|b| b * self.cols / self.buildings).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.floors < 1 || self.cols < 4 || self.rows < 4 {
            return bad(format!(
                "need floors >= 1, cols >= 4, rows >= 4; got {}x{}x{}",
                self.floors, self.cols, self.rows
            ));
        }
        if self.buildings < 1 || self.cols / self.buildings < 2 {
            return bad(format!("{} buildings do not fit {} columns", self.buildings, self.cols));
        }
        for (name, p) in [
            ("diagonal_density", self.diagonal_density),
            ("gap_density", self.gap_density),
            ("doorway_density", self.doorway_density),
            ("entrance_density", self.entrance_density),
            ("revolving_door_density", self.revolving_door_density),
            ("interior_door_fraction", self.interior_door_fraction),
            ("noise", self.noise),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.doorway_density + self.entrance_density + self.revolving_door_density > 1.0 + 1e-12 {
            return bad("door densities must sum to at most 1".into());
        }
        for (name, v) in [
            ("spacing", self.spacing),
            ("stair_length", self.stair_length),
            ("elevator_length", self.elevator_length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.shaft_jitter.is_finite() && self.shaft_jitter >= 0.0) {
            return bad(format!("shaft_jitter must be non-negative, got {}", self.shaft_jitter));
        }
        if self.records < 1 {
            return bad("corpus size must be at least 1".into());
        }
        let mut cores = self.core_positions();
        for &(c, r) in &cores {
            if c >= self.cols || r >= self.rows {
                return bad(format!("core position ({c}, {r}) outside the grid"));
            }
        }
        cores.sort_unstable();
        if cores.windows(2).any(|w| w[0] == w[1]) {
            return bad("two cores share a grid position".into());
        }
        self.planted_model()?;
        Ok(())
    }
}

fn grid_id(f: u32, r: u32, c: u32) -> String {
    format!("f{f}_r{r:02}_c{c:02}")
}

fn door_id(f: u32, r: u32, c: u32) -> String {
    format!("f{f}_r{r:02}_c{c:02}_door")
}

fn is_endpoint_id(id: &str) -> bool {
    !(id.ends_with("_door") || id.ends_with("_stair") || id.ends_with("_lift"))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
        ra != rb
    }
}

/// Builds the campus graph. Consumes random draws from `rng` in a fixed order.
pub fn generate_campus(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Result<IndoorGraph> {
    spec.validate()?;
    let s = spec.spacing;
    let boundaries = spec.boundaries();
    let cores = spec.core_positions();
    let mut nodes = Vec::new();
    let mut fixed = Vec::new();
    // corridors that may be left out: (edge, droppable)
    let mut corridors: Vec<(EdgeSpec, bool)> = Vec::new();

    let door_kind = |rng: &mut ChaCha8Rng, scale: f64, allow_revolving: bool| {
        let u: f64 = rng.gen();
        let d = spec.doorway_density * scale;
        let e = spec.entrance_density * scale;
        let rv = if allow_revolving {
            spec.revolving_door_density * scale
        } else {
            0.0
        };
        if u < d {
            NodeKind::Doorway
        } else if u < d + e {
            NodeKind::Entrance
        } else if u < d + e + rv {
            NodeKind::RevolvingDoor
        } else {
            NodeKind::Plain
        }
    };

    for f in 0..spec.floors {
        let fl = f as i32;
        for r in 0..spec.rows {
            for c in 0..spec.cols {
                let kind = door_kind(rng, spec.interior_door_fraction, false);
                let kind = if cores.contains(&(c, r)) { NodeKind::Plain } else { kind };
                nodes.push(Node::new(grid_id(f, r, c), c as f64 * s, r as f64 * s, fl, kind));
            }
        }
        for r in 0..spec.rows {
            for c in 0..spec.cols {
                if c + 1 < spec.cols {
                    if boundaries.contains(&(c + 1)) {
                        let kind = door_kind(rng, 1.0, true);
                        let door = door_id(f, r, c + 1);
                        nodes.push(Node::new(door.clone(), (c as f64 + 0.5) * s, r as f64 * s, fl, kind));
                        fixed.push(EdgeSpec::walk(grid_id(f, r, c), door.clone(), s / 2.0));
                        fixed.push(EdgeSpec::walk(door, grid_id(f, r, c + 1), s / 2.0));
                    } else {
                        corridors.push((EdgeSpec::walk(grid_id(f, r, c), grid_id(f, r, c + 1), s), true));
                    }
                }
                if r + 1 < spec.rows {
                    corridors.push((EdgeSpec::walk(grid_id(f, r, c), grid_id(f, r + 1, c), s), true));
                }
            }
        }
        for r in 0..spec.rows - 1 {
            for c in 0..spec.cols - 1 {
                let u: f64 = rng.gen();
                let rising: bool = rng.gen();
                if boundaries.contains(&(c + 1)) || u >= spec.diagonal_density {
                    continue;
                }
                let (a, b) = if rising {
                    (grid_id(f, r, c), grid_id(f, r + 1, c + 1))
                } else {
                    (grid_id(f, r, c + 1), grid_id(f, r + 1, c))
                };
                corridors.push((EdgeSpec::walk(a, b, s * std::f64::consts::SQRT_2), false));
            }
        }
        for &(c, r) in &cores {
            let (x, y) = (c as f64 * s, r as f64 * s);
            let off = 0.3 * s;
            let link = off * std::f64::consts::SQRT_2;
            for (suffix, dx) in [("stair", off), ("lift", -off)] {
                let id = format!("{}_{suffix}", grid_id(f, r, c));
                nodes.push(Node::plain(id.clone(), x + dx, y + off, fl));
                fixed.push(EdgeSpec::walk(grid_id(f, r, c), id, link));
            }
        }
    }
    for f in 0..spec.floors.saturating_sub(1) {
        for &(c, r) in &cores {
            let stair = spec.stair_length + spec.shaft_jitter * rng.gen::<f64>();
            let lift = spec.elevator_length + spec.shaft_jitter * rng.gen::<f64>();
            let (lo, hi) = (grid_id(f, r, c), grid_id(f + 1, r, c));
            fixed.push(EdgeSpec::new(
                format!("{lo}_stair"),
                format!("{hi}_stair"),
                stair,
                EdgeKind::Staircase,
            ));
            fixed.push(EdgeSpec::new(
                format!("{lo}_lift"),
                format!("{hi}_lift"),
                lift,
                EdgeKind::Elevator,
            ));
        }
    }

    // drop corridors at random, then restore any needed for connectivity
    let index: std::collections::HashMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let mut uf = UnionFind((0..nodes.len()).collect());
    for e in &fixed {
        uf.union(index[e.a.as_str()], index[e.b.as_str()]);
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (e, droppable) in corridors {
        if droppable && rng.gen::<f64>() < spec.gap_density {
            dropped.push(e);
        } else {
            uf.union(index[e.a.as_str()], index[e.b.as_str()]);
            kept.push(e);
        }
    }
    for e in dropped {
        if uf.union(index[e.a.as_str()], index[e.b.as_str()]) {
            kept.push(e);
        }
    }
    let mut edges = fixed;
    edges.extend(kept);
    IndoorGraph::new(nodes, edges)
}

/// Generated campus and corpus.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub graph: IndoorGraph,
    pub corpus: RouteCorpus,
}

/// Generates a campus and a corpus planned under the planted model; with
/// probability `noise` a record is planned under the planted model with each
/// weight scaled by a factor drawn uniformly from `[0.5, 2]`.
pub fn generate(spec: &SyntheticSpec, seed: u64) -> Result<Synthetic> {
    spec.validate()?;
    let planted = spec.planted_model()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = generate_campus(spec, &mut rng)?;
    let endpoints: Vec<_> = graph
        .node_ixs()
        .filter(|&n| is_endpoint_id(graph.id(n).as_str()))
        .collect();
    let mut routes = Vec::with_capacity(spec.records as usize);
    while routes.len() < spec.records as usize {
        let a = endpoints[rng.gen_range(0..endpoints.len())];
        let b = endpoints[rng.gen_range(0..endpoints.len())];
        let noisy = rng.gen::<f64>() < spec.noise;
        let factors: Vec<f64> = CriterionKind::ALL.iter().map(|_| rng.gen_range(0.5..=2.0)).collect();
        if a == b {
            continue;
        }
        let model = if noisy {
            planted.scaled(|k| factors[k as usize])?
        } else {
            planted.clone()
        };
        let route = plan_route(&graph, a, b, &model)?.ok_or_else(|| Error::Unreachable {
            start: graph.id(a).to_string(),
            dest: graph.id(b).to_string(),
        })?;
        routes.push(route.nodes);
    }
    let corpus = RouteCorpus::from_routes(&graph, routes)?;
    Ok(Synthetic { graph, corpus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::mean_similarity;

    fn small() -> SyntheticSpec {
        SyntheticSpec {
            floors: 2,
            cols: 6,
            rows: 4,
            buildings: 2,
            records: 8,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn campus_passes_validation_round_trip() {
        let syn = generate(&small(), 3).unwrap();
        let reloaded = IndoorGraph::from_json_str(&syn.graph.to_json_string()).unwrap();
        assert_eq!(reloaded, syn.graph);
        let kinds: Vec<_> = syn.graph.edges().iter().map(|e| e.kind).collect();
        assert!(kinds.contains(&EdgeKind::Staircase));
        assert!(kinds.contains(&EdgeKind::Elevator));
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate(&small(), 11).unwrap();
        let b = generate(&small(), 11).unwrap();
        assert_eq!(a.graph.to_json_string(), b.graph.to_json_string());
        assert_eq!(a.corpus.to_json_string(&a.graph), b.corpus.to_json_string(&b.graph));
        let c = generate(&small(), 12).unwrap();
        assert_ne!(a.corpus.to_json_string(&a.graph), c.corpus.to_json_string(&c.graph));
    }

    #[test]
    fn zero_model_corpus_is_shortest_paths() {
        let syn = generate(&small(), 5).unwrap();
        let score = mean_similarity(&syn.graph, &syn.corpus, &CostModel::empty()).unwrap();
        assert_eq!(score.mean.value(), 1.0);
    }

    #[test]
    fn spec_validation() {
        let mut s = small();
        s.noise = 1.5;
        assert!(s.validate().is_err());
        let mut s = small();
        s.records = 0;
        assert!(s.validate().is_err());
        let mut s = small();
        s.doorway_density = 0.6;
        s.entrance_density = 0.6;
        assert!(s.validate().is_err());
        let mut s = small();
        s.cores = Some(vec![(1, 1), (1, 1)]);
        assert!(s.validate().is_err());
        let mut s = small();
        s.cores = Some(vec![(10, 1)]);
        assert!(s.validate().is_err());
        let mut s = small();
        s.buildings = 4;
        assert!(s.validate().is_err());
    }

    #[test]
    fn spec_file_defaults() {
        let s: SyntheticSpec =
            serde_json::from_str(r#"{"floors": 4, "planted": {"criteria": [{"kind": "turns", "w": 3}]}}"#).unwrap();
        assert_eq!(s.floors, 4);
        assert_eq!(s.cols, SyntheticSpec::default().cols);
        assert_eq!(s.planted_model().unwrap().weight(CriterionKind::Turns), Some(3.0));
    }
}
