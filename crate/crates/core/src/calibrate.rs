//! Per-criterion weight calibration by grid search, the additive combination
//! of the criteria that helped, and the comparison report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::criteria::{CostModel, CriterionKind, WeightedCriterion};
use crate::error::{Error, Result};
use crate::graph::IndoorGraph;
use crate::similarity::{CorpusEvaluator, RouteCorpus, SimilarityScore};

const W_EPS: f64 = 1e-9;

/// Weights sampled by [`grid_search`], in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSchedule {
    pub fine_max: f64,
    pub fine_step: f64,
    pub coarse_max: f64,
    pub coarse_step: f64,
    pub extension_cap: f64,
}

impl Default for WeightSchedule {
    fn default() -> Self {
        WeightSchedule {
            fine_max: 25.0,
            fine_step: 1.0,
            coarse_max: 100.0,
            coarse_step: 10.0,
            extension_cap: 1000.0,
        }
    }
}

impl WeightSchedule {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.fine_max,
            self.fine_step,
            self.coarse_max,
            self.coarse_step,
            self.extension_cap,
        ]
        .iter()
        .all(|v| v.is_finite());
        let ordered = 0.0 < self.fine_step
            && self.fine_step <= self.fine_max
            && self.fine_max < self.coarse_max
            && self.coarse_max <= self.extension_cap
            && self.coarse_step > 0.0;
        if all_finite && ordered {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "invalid schedule {self:?}: need 0 < fine_step <= fine_max < coarse_max <= extension_cap and coarse_step > 0"
            )))
        }
    }

    /// Parses `fine_max,fine_step,coarse_max,coarse_step`; the extension cap
    /// keeps its default unless that would break ordering.
    pub fn parse(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Validation(format!("bad schedule component {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let [fine_max, fine_step, coarse_max, coarse_step] = parts[..] else {
            return Err(Error::Validation(format!(
                "schedule needs 4 comma-separated numbers, got {s:?}"
            )));
        };
        let base = WeightSchedule::default();
        let sched = WeightSchedule {
            fine_max,
            fine_step,
            coarse_max,
            coarse_step,
            extension_cap: base.extension_cap.max(coarse_max),
        };
        sched.validate()?;
        Ok(sched)
    }

    /// `0, fine_step, ..., fine_max`.
    pub fn fine_points(&self) -> Vec<f64> {
        let n = (self.fine_max / self.fine_step + W_EPS).floor() as usize;
        (0..=n).map(|i| i as f64 * self.fine_step).collect()
    }

    /// Multiples of `coarse_step` in `(fine_max, coarse_max]`, plus
    /// `coarse_max` itself.
    pub fn coarse_points(&self) -> Vec<f64> {
        multiples_in(self.fine_max, self.coarse_max, self.coarse_step)
    }

    /// Initial grid before any refinement or extension.
    pub fn initial_points(&self) -> Vec<f64> {
        let mut pts = self.fine_points();
        pts.extend(self.coarse_points());
        pts
    }
}

/// Multiples of `step` in `(lo, hi]`, always ending with `hi`.
fn multiples_in(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = (lo / step + W_EPS).floor() as i64 + 1;
    loop {
        let w = k as f64 * step;
        if w > hi + W_EPS {
            break;
        }
        out.push(w);
        k += 1;
    }
    if out.last().is_none_or(|&w| (w - hi).abs() > W_EPS) {
        out.push(hi);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub w: f64,
    pub mean_sim: SimilarityScore,
    pub impacted: f64,
}

/// Calibration curve and optimum for one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub kind: CriterionKind,
    /// Sorted by weight.
    pub curve: Vec<CurvePoint>,
    pub best_w: f64,
    pub best_sim: SimilarityScore,
    pub baseline_sim: SimilarityScore,
    pub improved: bool,
    /// The optimum still held at the extension cap.
    pub unbounded: bool,
}

impl SearchResult {
    pub fn point(&self, w: f64) -> Option<&CurvePoint> {
        self.curve.iter().find(|p| (p.w - w).abs() <= W_EPS)
    }

    /// Impacted fraction at the best weight.
    pub fn best_impacted(&self) -> f64 {
        self.point(self.best_w).map_or(0.0, |p| p.impacted)
    }

    pub fn to_file(&self) -> SearchResultFile {
        SearchResultFile {
            kind: self.kind,
            curve: self
                .curve
                .iter()
                .map(|p| (p.w, p.mean_sim.value(), p.impacted))
                .collect(),
            best_w: self.best_w,
            best_sim: self.best_sim.value(),
            baseline_sim: self.baseline_sim.value(),
            improved: self.improved,
            unbounded: self.unbounded,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("result serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<SearchResultFile>(s)?.into_result()
    }
}

/// On-disk search result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchResultFile {
    pub kind: CriterionKind,
    pub curve: Vec<(f64, f64, f64)>,
    pub best_w: f64,
    pub best_sim: f64,
    pub baseline_sim: f64,
    pub improved: bool,
    pub unbounded: bool,
}

impl SearchResultFile {
    pub fn into_result(self) -> Result<SearchResult> {
        let curve = self
            .curve
            .into_iter()
            .map(|(w, s, i)| {
                Ok(CurvePoint {
                    w,
                    mean_sim: SimilarityScore::new(s)?,
                    impacted: i,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if !curve.iter().any(|p| p.w == 0.0) {
            return Err(Error::Validation(format!("curve for {} lacks w = 0", self.kind)));
        }
        Ok(SearchResult {
            kind: self.kind,
            curve,
            best_w: self.best_w,
            best_sim: SimilarityScore::new(self.best_sim)?,
            baseline_sim: SimilarityScore::new(self.baseline_sim)?,
            improved: self.improved,
            unbounded: self.unbounded,
        })
    }
}

struct Sampler<'e, 'a> {
    eval: &'e CorpusEvaluator<'a>,
    kind: CriterionKind,
    curve: Vec<CurvePoint>,
}

impl Sampler<'_, '_> {
    fn sample(&mut self, w: f64) -> Result<()> {
        if self.curve.iter().any(|p| (p.w - w).abs() <= W_EPS) {
            return Ok(());
        }
        let e = self.eval.evaluate(&CostModel::single(self.kind, w)?)?;
        self.curve.push(CurvePoint {
            w,
            mean_sim: e.score.mean,
            impacted: e.impacted,
        });
        Ok(())
    }

    /// Smallest weight attaining the highest similarity.
    fn best(&self) -> CurvePoint {
        let mut best = self.curve[0];
        for p in &self.curve[1..] {
            let better = p.mean_sim > best.mean_sim || (p.mean_sim == best.mean_sim && p.w < best.w);
            if better {
                best = *p;
            }
        }
        best
    }

    fn max_w(&self) -> CurvePoint {
        *self
            .curve
            .iter()
            .max_by(|a, b| a.w.total_cmp(&b.w))
            .expect("curve is non-empty")
    }
}

/// One-dimensional grid search over the weight of `kind`.
///
/// Samples the fine and coarse grids. If the optimum is still attained at
/// the largest sampled weight, the range is doubled (with doubled spacing)
/// until the far end stops attaining it or the extension cap is reached.
/// An optimum above `fine_max` is then refined at `fine_step` within
/// `coarse_step` on either side.
pub fn grid_search(
    g: &IndoorGraph,
    corpus: &RouteCorpus,
    kind: CriterionKind,
    schedule: &WeightSchedule,
) -> Result<SearchResult> {
    let eval = CorpusEvaluator::new(g, corpus)?;
    grid_search_with(&eval, kind, schedule)
}

/// [`grid_search`] reusing an evaluator's cached shortest-path baseline.
pub fn grid_search_with(
    eval: &CorpusEvaluator<'_>,
    kind: CriterionKind,
    schedule: &WeightSchedule,
) -> Result<SearchResult> {
    schedule.validate()?;
    let mut s = Sampler {
        eval,
        kind,
        curve: Vec::new(),
    };
    for w in schedule.initial_points() {
        s.sample(w)?;
    }
    let baseline = s.curve[0].mean_sim;
    let mut unbounded = false;

    if s.best().mean_sim > baseline && s.max_w().mean_sim == s.best().mean_sim {
        let mut spacing = schedule.coarse_step;
        loop {
            let top = s.max_w().w;
            if top >= schedule.extension_cap - W_EPS {
                unbounded = true;
                break;
            }
            spacing *= 2.0;
            let next = (top * 2.0).min(schedule.extension_cap);
            for w in multiples_in(top, next, spacing) {
                s.sample(w)?;
            }
            if s.max_w().mean_sim != s.best().mean_sim {
                break;
            }
        }
    }

    let best = s.best();
    if best.w > schedule.fine_max + W_EPS {
        let top = s.max_w().w;
        let lo = (best.w - schedule.coarse_step).max(schedule.fine_max);
        let hi = (best.w + schedule.coarse_step).min(top);
        let first = (lo / schedule.fine_step + W_EPS).floor() as i64;
        let last = (hi / schedule.fine_step + W_EPS).floor() as i64;
        for k in first..=last {
            let w = k as f64 * schedule.fine_step;
            if w > schedule.fine_max + W_EPS && w >= lo - W_EPS && w <= hi + W_EPS {
                s.sample(w)?;
            }
        }
    }

    s.curve.sort_by(|a, b| a.w.total_cmp(&b.w));
    let best = s.best();
    if unbounded {
        // refinement may have found a strictly better interior point
        unbounded = s.max_w().mean_sim == best.mean_sim;
    }
    Ok(SearchResult {
        kind,
        best_w: best.w,
        best_sim: best.mean_sim,
        baseline_sim: baseline,
        improved: best.mean_sim > baseline,
        unbounded,
        curve: s.curve,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    NotImproved,
    /// Turns and streets penalize overlapping events; only one may be used.
    Overlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub kind: CriterionKind,
    pub reason: ExclusionReason,
}

/// The additive model of every improving criterion at its best weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationResult {
    pub model: CostModel,
    pub mean_sim: SimilarityScore,
    pub impacted: f64,
    pub baseline_sim: SimilarityScore,
    pub excluded: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationFile {
    pub model: crate::criteria::CostModelFile,
    pub mean_sim: f64,
    pub impacted: f64,
    pub baseline_sim: f64,
    pub excluded: Vec<Exclusion>,
}

impl CombinationResult {
    pub fn to_json_string(&self) -> String {
        let file = CombinationFile {
            model: self.model.to_file(),
            mean_sim: self.mean_sim.value(),
            impacted: self.impacted,
            baseline_sim: self.baseline_sim.value(),
            excluded: self.excluded.clone(),
        };
        serde_json::to_string_pretty(&file).expect("combination serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: CombinationFile = serde_json::from_str(s)?;
        Ok(CombinationResult {
            model: file.model.into_model()?,
            mean_sim: SimilarityScore::new(file.mean_sim)?,
            impacted: file.impacted,
            baseline_sim: SimilarityScore::new(file.baseline_sim)?,
            excluded: file.excluded,
        })
    }
}

/// Combines every improving criterion at its best weight, keeping only the
/// stronger of turns and streets when both improve.
pub fn combine(g: &IndoorGraph, corpus: &RouteCorpus, results: &[SearchResult]) -> Result<CombinationResult> {
    let eval = CorpusEvaluator::new(g, corpus)?;
    combine_with(&eval, results)
}

pub fn combine_with(eval: &CorpusEvaluator<'_>, results: &[SearchResult]) -> Result<CombinationResult> {
    let mut sorted: Vec<&SearchResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.kind);
    for pair in sorted.windows(2) {
        if pair[0].kind == pair[1].kind {
            return Err(Error::Validation(format!(
                "duplicate search result for {}",
                pair[0].kind
            )));
        }
    }
    let mut excluded = Vec::new();
    let find = |k| sorted.iter().find(|r| r.kind == k && r.improved).copied();
    let overlap_loser = match (find(CriterionKind::Turns), find(CriterionKind::Streets)) {
        (Some(t), Some(s)) => Some(if s.best_sim > t.best_sim { t.kind } else { s.kind }),
        _ => None,
    };
    let mut criteria = Vec::new();
    for r in &sorted {
        if !r.improved {
            excluded.push(Exclusion {
                kind: r.kind,
                reason: ExclusionReason::NotImproved,
            });
        } else if Some(r.kind) == overlap_loser {
            excluded.push(Exclusion {
                kind: r.kind,
                reason: ExclusionReason::Overlap,
            });
        } else {
            criteria.push(WeightedCriterion::new(r.kind, r.best_w));
        }
    }
    let model = CostModel::new(criteria)?;
    let baseline = eval.evaluate(&CostModel::empty())?;
    let e = eval.evaluate(&model)?;
    Ok(CombinationResult {
        model,
        mean_sim: e.score.mean,
        impacted: e.impacted,
        baseline_sim: baseline.score.mean,
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub factor: String,
    /// Best weight, `"N+"` when unbounded, `"varied"` for the combination.
    pub weight: String,
    pub similarity: f64,
    /// `similarity - baseline`.
    pub difference: f64,
    pub impacted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRow {
    pub factor: String,
    pub best_w: f64,
    pub similarity: f64,
}

/// Factors that improved on the shortest path (plus their combination),
/// best first, and the factors that did not.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub baseline: f64,
    pub rows: Vec<ReportRow>,
    pub not_improved: Vec<BaselineRow>,
}

pub const REPORT_COLUMNS: [&str; 5] = [
    "Factor",
    "Weight",
    "Similarity Score",
    "Difference to SP",
    "Impacted Paths",
];

pub fn report(results: &[SearchResult], combo: &CombinationResult) -> ReportTable {
    let baseline = combo.baseline_sim.value();
    let mut sorted: Vec<&SearchResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.kind);
    let mut rows = Vec::new();
    let mut not_improved = Vec::new();
    for r in sorted {
        if r.improved {
            let weight = if r.unbounded {
                format!("{}+", r.best_w)
            } else {
                format!("{}", r.best_w)
            };
            rows.push(ReportRow {
                factor: r.kind.label().to_string(),
                weight,
                similarity: r.best_sim.value(),
                difference: r.best_sim.value() - baseline,
                impacted: r.best_impacted(),
            });
        } else {
            not_improved.push(BaselineRow {
                factor: r.kind.label().to_string(),
                best_w: r.best_w,
                similarity: r.best_sim.value(),
            });
        }
    }
    if !combo.model.is_empty() {
        rows.push(ReportRow {
            factor: "Combination".to_string(),
            weight: "varied".to_string(),
            similarity: combo.mean_sim.value(),
            difference: combo.mean_sim.value() - baseline,
            impacted: combo.impacted,
        });
    }
    rows.sort_by(|a, b| b.similarity.total_cmp(&a.similarity));
    ReportTable {
        baseline,
        rows,
        not_improved,
    }
}

fn pct(v: f64) -> String {
    format!("{:.2}%", v * 100.0)
}

impl ReportTable {
    /// Plain-text table with fixed-width columns.
    pub fn render_text(&self) -> String {
        let mut cells: Vec<[String; 5]> = vec![REPORT_COLUMNS.map(String::from)];
        for r in &self.rows {
            cells.push([
                r.factor.clone(),
                r.weight.clone(),
                pct(r.similarity),
                pct(r.difference),
                pct(r.impacted),
            ]);
        }
        let mut widths = [0usize; 5];
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let rule: String = widths
            .iter()
            .map(|w| format!("+{}", "-".repeat(w + 2)))
            .collect::<String>()
            + "+\n";
        out.push_str(&rule);
        for (i, row) in cells.iter().enumerate() {
            for (w, c) in widths.iter().zip(row) {
                let _ = write!(out, "| {c:<w$} ", w = *w);
            }
            out.push_str("|\n");
            if i == 0 {
                out.push_str(&rule);
            }
        }
        out.push_str(&rule);
        let _ = writeln!(out, "Shortest path baseline: {}", pct(self.baseline));
        if !self.not_improved.is_empty() {
            out.push_str("No improvement over the shortest path:\n");
            for r in &self.not_improved {
                let _ = writeln!(out, "  {:<22} best w {:<6} {}", r.factor, r.best_w, pct(r.similarity));
            }
        }
        out
    }

    /// CSV with one row per improving factor; percentages as numbers.
    pub fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPORT_COLUMNS).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.factor.clone(),
                r.weight.clone(),
                format!("{:.6}", r.similarity * 100.0),
                format!("{:.6}", r.difference * 100.0),
                format!("{:.6}", r.impacted * 100.0),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}
