//! The eleven wayfinding criteria and the additive cost model built from them.
//!
//! Every criterion extends the metric length of a traversed edge `x -> y` by
//! `w` meters (or `n * w` for the branching factor) when its trigger holds.
//! Some triggers need the node the route arrived from, which is why a step is
//! described by a [`StepContext`] rather than a bare edge.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeIx, EdgeKind, IndoorGraph, NodeIx, NodeKind, ANGLE_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Turns,
    Streets,
    DecisionPoints,
    BranchingFactor,
    MinDeviationAngle,
    Linearity,
    Staircases,
    Elevators,
    Doorways,
    Entrances,
    RevolvingDoors,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 11] = [
        CriterionKind::Turns,
        CriterionKind::Streets,
        CriterionKind::DecisionPoints,
        CriterionKind::BranchingFactor,
        CriterionKind::MinDeviationAngle,
        CriterionKind::Linearity,
        CriterionKind::Staircases,
        CriterionKind::Elevators,
        CriterionKind::Doorways,
        CriterionKind::Entrances,
        CriterionKind::RevolvingDoors,
    ];

    /// Snake-case name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Turns => "turns",
            CriterionKind::Streets => "streets",
            CriterionKind::DecisionPoints => "decision_points",
            CriterionKind::BranchingFactor => "branching_factor",
            CriterionKind::MinDeviationAngle => "min_deviation_angle",
            CriterionKind::Linearity => "linearity",
            CriterionKind::Staircases => "staircases",
            CriterionKind::Elevators => "elevators",
            CriterionKind::Doorways => "doorways",
            CriterionKind::Entrances => "entrances",
            CriterionKind::RevolvingDoors => "revolving_doors",
        }
    }

    /// Human-readable label for report tables.
    pub fn label(self) -> &'static str {
        match self {
            CriterionKind::Turns => "Turns",
            CriterionKind::Streets => "Streets",
            CriterionKind::DecisionPoints => "Decision Points",
            CriterionKind::BranchingFactor => "Branching Factor",
            CriterionKind::MinDeviationAngle => "Min. Deviation Angle",
            CriterionKind::Linearity => "Linearity",
            CriterionKind::Staircases => "Staircase",
            CriterionKind::Elevators => "Elevator",
            CriterionKind::Doorways => "Doorway",
            CriterionKind::Entrances => "Entryway",
            CriterionKind::RevolvingDoors => "Revolving Door",
        }
    }

    /// Whether the penalty can depend on the node the route arrived from.
    pub fn uses_predecessor(self) -> bool {
        matches!(
            self,
            CriterionKind::Turns | CriterionKind::Streets | CriterionKind::Linearity | CriterionKind::MinDeviationAngle
        )
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown criterion {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedCriterion {
    pub kind: CriterionKind,
    pub w: f64,
}

impl WeightedCriterion {
    pub fn new(kind: CriterionKind, w: f64) -> Self {
        WeightedCriterion { kind, w }
    }
}

pub const DEFAULT_STRAIGHT_THRESHOLD: f64 = 180.0;
pub const DEFAULT_TURN_THRESHOLD: f64 = 90.0;
pub const DEFAULT_LINEARITY_THRESHOLD: f64 = 150.0;

/// A validated set of weighted criteria (at most one per kind) plus the
/// angle thresholds the angle-based criteria use.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    weights: [Option<f64>; 11],
    straight_threshold: f64,
    turn_threshold: f64,
    linearity_threshold: f64,
    allow_turns_and_streets: bool,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::empty()
    }
}

impl CostModel {
    /// Plain metric distance.
    pub fn empty() -> Self {
        CostModel {
            weights: [None; 11],
            straight_threshold: DEFAULT_STRAIGHT_THRESHOLD,
            turn_threshold: DEFAULT_TURN_THRESHOLD,
            linearity_threshold: DEFAULT_LINEARITY_THRESHOLD,
            allow_turns_and_streets: false,
        }
    }

    pub fn single(kind: CriterionKind, w: f64) -> Result<Self> {
        Self::new([WeightedCriterion::new(kind, w)])
    }

    pub fn new(criteria: impl IntoIterator<Item = WeightedCriterion>) -> Result<Self> {
        Self::build(criteria, false)
    }

    /// Like [`CostModel::new`] but permits turns and streets together.
    pub fn new_with_overlap(criteria: impl IntoIterator<Item = WeightedCriterion>) -> Result<Self> {
        Self::build(criteria, true)
    }

    fn build(criteria: impl IntoIterator<Item = WeightedCriterion>, allow_overlap: bool) -> Result<Self> {
        let mut model = CostModel {
            allow_turns_and_streets: allow_overlap,
            ..CostModel::empty()
        };
        for c in criteria {
            if !(c.w.is_finite() && c.w >= 0.0) {
                return Err(Error::Validation(format!(
                    "weight for {} must be finite and non-negative, got {}",
                    c.kind, c.w
                )));
            }
            let slot = &mut model.weights[c.kind.slot()];
            if slot.is_some() {
                return Err(Error::Validation(format!("criterion {} listed twice", c.kind)));
            }
            *slot = Some(c.w);
        }
        model.validate()?;
        Ok(model)
    }

    pub fn with_thresholds(mut self, straight: f64, turn: f64, linearity: f64) -> Result<Self> {
        self.straight_threshold = straight;
        self.turn_threshold = turn;
        self.linearity_threshold = linearity;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("straight_threshold", self.straight_threshold),
            ("turn_threshold", self.turn_threshold),
            ("linearity_threshold", self.linearity_threshold),
        ] {
            if !(t > 0.0 && t <= 180.0) {
                return Err(Error::Validation(format!("{name} must lie in (0, 180], got {t}")));
            }
        }
        if !self.allow_turns_and_streets
            && self.weight(CriterionKind::Turns).is_some()
            && self.weight(CriterionKind::Streets).is_some()
        {
            return Err(Error::Validation(
                "turns and streets penalize overlapping events; set allow_turns_and_streets to combine them".into(),
            ));
        }
        Ok(())
    }

    pub fn weight(&self, kind: CriterionKind) -> Option<f64> {
        self.weights[kind.slot()]
    }

    /// Active criteria in kind order.
    pub fn criteria(&self) -> impl Iterator<Item = WeightedCriterion> + '_ {
        CriterionKind::ALL
            .into_iter()
            .filter_map(|k| self.weight(k).map(|w| WeightedCriterion::new(k, w)))
    }

    pub fn is_empty(&self) -> bool {
        self.weights.iter().all(Option::is_none)
    }

    pub fn uses_predecessor(&self) -> bool {
        self.criteria().any(|c| c.kind.uses_predecessor() && c.w > 0.0)
    }

    pub fn straight_threshold(&self) -> f64 {
        self.straight_threshold
    }

    pub fn turn_threshold(&self) -> f64 {
        self.turn_threshold
    }

    pub fn linearity_threshold(&self) -> f64 {
        self.linearity_threshold
    }

    pub fn allows_turns_and_streets(&self) -> bool {
        self.allow_turns_and_streets
    }

    /// Same model with every weight multiplied by `factor(kind)`.
    pub fn scaled(&self, mut factor: impl FnMut(CriterionKind) -> f64) -> Result<Self> {
        let mut out = self.clone();
        for k in CriterionKind::ALL {
            if let Some(w) = out.weights[k.slot()] {
                let s = w * factor(k);
                if !(s.is_finite() && s >= 0.0) {
                    return Err(Error::Validation(format!("scaled weight for {k} is invalid: {s}")));
                }
                out.weights[k.slot()] = Some(s);
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> CostModelFile {
        CostModelFile {
            criteria: self.criteria().collect(),
            straight_threshold: Some(self.straight_threshold),
            turn_threshold: Some(self.turn_threshold),
            linearity_threshold: Some(self.linearity_threshold),
            allow_turns_and_streets: Some(self.allow_turns_and_streets),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<CostModelFile>(s)?.into_model()
    }

    pub fn load_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::from_json_str(&text)
    }
}

/// On-disk cost model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModelFile {
    #[serde(default)]
    pub criteria: Vec<WeightedCriterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub straight_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turn_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linearity_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_turns_and_streets: Option<bool>,
}

impl CostModelFile {
    pub fn into_model(self) -> Result<CostModel> {
        let model = CostModel::build(self.criteria, self.allow_turns_and_streets.unwrap_or(false))?;
        model.with_thresholds(
            self.straight_threshold.unwrap_or(DEFAULT_STRAIGHT_THRESHOLD),
            self.turn_threshold.unwrap_or(DEFAULT_TURN_THRESHOLD),
            self.linearity_threshold.unwrap_or(DEFAULT_LINEARITY_THRESHOLD),
        )
    }
}

/// One traversal step `x -> y` towards `dest`, with the node the partial
/// route arrived from (none on the first step).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepContext {
    pub prev: Option<NodeIx>,
    pub x: NodeIx,
    pub y: NodeIx,
    pub dest: NodeIx,
}

/// Resolved step with the traversed edges looked up.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    pub prev: Option<(NodeIx, EdgeIx)>,
    pub x: NodeIx,
    pub y: NodeIx,
    pub edge: EdgeIx,
    pub dest: NodeIx,
}

impl Step {
    pub(crate) fn resolve(g: &IndoorGraph, ctx: &StepContext) -> Result<Step> {
        let n = g.node_count();
        for ix in [Some(ctx.x), Some(ctx.y), Some(ctx.dest), ctx.prev]
            .into_iter()
            .flatten()
        {
            if ix.index() >= n {
                return Err(Error::Precondition(format!("node index {} out of range", ix.0)));
            }
        }
        let edge = g
            .edge_between(ctx.x, ctx.y)
            .ok_or_else(|| Error::Precondition(format!("{}-{} is not an edge", g.id(ctx.x), g.id(ctx.y))))?;
        let prev = match ctx.prev {
            None => None,
            Some(p) => {
                let e = g
                    .edge_between(p, ctx.x)
                    .ok_or_else(|| Error::Precondition(format!("{}-{} is not an edge", g.id(p), g.id(ctx.x))))?;
                Some((p, e))
            }
        };
        Ok(Step {
            prev,
            x: ctx.x,
            y: ctx.y,
            edge,
            dest: ctx.dest,
        })
    }
}

/// Number of penalty units criterion `kind` charges for `step`; the penalty
/// in meters is `units * w`. Independent of the weight itself.
pub(crate) fn penalty_units(g: &IndoorGraph, model: &CostModel, kind: CriterionKind, step: &Step) -> f64 {
    let hit = |b: bool| if b { 1.0 } else { 0.0 };
    let turn = || {
        step.prev
            .and_then(|(p, pe)| g.turn_angle_unchecked(p, step.x, step.y, pe, step.edge))
    };
    let degree = g.degree(step.x);
    match kind {
        CriterionKind::Turns => hit(turn().is_some_and(|a| a <= model.turn_threshold + ANGLE_EPS)),
        CriterionKind::Streets => hit(turn().is_some_and(|a| a < model.straight_threshold - ANGLE_EPS)),
        CriterionKind::DecisionPoints => hit(degree >= 3),
        CriterionKind::BranchingFactor => {
            if degree >= 3 {
                degree as f64
            } else {
                0.0
            }
        }
        CriterionKind::MinDeviationAngle => {
            if degree < 3 {
                return 0.0;
            }
            let excluded = step.prev.map(|(p, _)| p);
            let mut best: Option<f64> = None;
            let mut own: Option<f64> = None;
            for (z, ze) in g.neighbors(step.x) {
                if Some(z) == excluded {
                    continue;
                }
                let a = g.deviation_angle_unchecked(step.x, z, step.dest, ze);
                if z == step.y {
                    own = a;
                }
                if let Some(a) = a {
                    best = Some(best.map_or(a, |b: f64| b.min(a)));
                }
            }
            match (own, best) {
                (Some(a), Some(b)) if a <= b + ANGLE_EPS => 0.0,
                _ => 1.0,
            }
        }
        CriterionKind::Linearity => {
            let Some((p, pe)) = step.prev else { return 0.0 };
            if degree < 3 {
                return 0.0;
            }
            let mut best: Option<f64> = None;
            let mut own: Option<f64> = None;
            for (z, ze) in g.neighbors(step.x) {
                if z == p {
                    continue;
                }
                let a = g.turn_angle_unchecked(p, step.x, z, pe, ze);
                if z == step.y {
                    own = a;
                }
                if let Some(a) = a {
                    best = Some(best.map_or(a, |b: f64| b.max(a)));
                }
            }
            match best {
                Some(b) if b >= model.linearity_threshold - ANGLE_EPS => match own {
                    Some(a) if a >= b - ANGLE_EPS => 0.0,
                    _ => 1.0,
                },
                _ => 0.0,
            }
        }
        CriterionKind::Staircases => hit(g.edge(step.edge).kind == EdgeKind::Staircase),
        CriterionKind::Elevators => hit(g.edge(step.edge).kind == EdgeKind::Elevator),
        CriterionKind::Doorways => hit(g.node(step.y).kind == NodeKind::Doorway),
        CriterionKind::Entrances => hit(g.node(step.y).kind == NodeKind::Entrance),
        CriterionKind::RevolvingDoors => hit(g.node(step.y).kind == NodeKind::RevolvingDoor),
    }
}

/// Weighted length of a resolved step. Penalties are summed in kind order.
pub(crate) fn step_cost_unchecked(g: &IndoorGraph, model: &CostModel, step: &Step) -> f64 {
    let mut cost = g.edge(step.edge).length;
    for c in model.criteria() {
        if c.w > 0.0 {
            cost += c.w * penalty_units(g, model, c.kind, step);
        }
    }
    cost
}

/// Metric length of edge `x -> y` plus every active criterion's penalty.
pub fn step_cost(g: &IndoorGraph, ctx: &StepContext, model: &CostModel) -> Result<f64> {
    let step = Step::resolve(g, ctx)?;
    Ok(step_cost_unchecked(g, model, &step))
}

/// Per-criterion penalty (meters) of one step, in kind order.
pub fn step_penalties(g: &IndoorGraph, ctx: &StepContext, model: &CostModel) -> Result<Vec<(CriterionKind, f64)>> {
    let step = Step::resolve(g, ctx)?;
    Ok(model
        .criteria()
        .map(|c| (c.kind, c.w * penalty_units(g, model, c.kind, &step)))
        .collect())
}

/// How often `kind` triggers on one step (its penalty per unit of weight).
pub fn step_occurrences(g: &IndoorGraph, ctx: &StepContext, model: &CostModel, kind: CriterionKind) -> Result<f64> {
    let step = Step::resolve(g, ctx)?;
    Ok(penalty_units(g, model, kind, &step))
}
