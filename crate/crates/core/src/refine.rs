//! The nested refinement ladder `D_k`: candidates of level `k` restricted to
//! the children of `D_{k-1}`, optionally pruned to spanning components.

use serde::Serialize;

use crate::components::{label_components, spanning_components, ComponentLabeling};
use crate::error::{Error, Result};
use crate::geometry::{check_level, hausdorff, BoxSet, Dyadic};
use crate::oracle::Oracle;
use crate::tracer::{candidates_of, classify_level, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceConfig {
    pub k_start: u32,
    pub k_max: u32,
    /// Keep only the union of spanning components at each level.
    pub prune: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { k_start: 2, k_max: 8, prune: true }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        check_level(self.k_max)?;
        if self.k_start == 0 || self.k_start > self.k_max {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= k_start <= k_max, got k_start = {}, k_max = {}",
                self.k_start, self.k_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TraceLevel {
    pub k: u32,
    /// Number of candidates before pruning.
    pub candidates: usize,
    /// `D_k`.
    pub boxes: BoxSet,
    /// Center residual of each member of `boxes`, in the set's order.
    pub residuals: Vec<f64>,
    pub labeling: ComponentLabeling,
    pub spanning: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Every traced level had at least one spanning component.
    SpanningCertified { k_max: u32 },
    /// First level whose candidate set had no spanning component.
    NoSpanningAt { level: u32, boxes: BoxSet },
}

#[derive(Clone, Debug)]
pub struct TraceResult {
    pub oracle: String,
    pub config: TraceConfig,
    pub levels: Vec<TraceLevel>,
    pub outcome: Outcome,
    /// `hausdorff(D_k, D_{k+1})` for consecutive traced levels.
    pub convergence: Vec<Dyadic>,
}

impl TraceResult {
    pub fn is_certified(&self) -> bool {
        matches!(self.outcome, Outcome::SpanningCertified { .. })
    }

    pub fn deepest(&self) -> &TraceLevel {
        self.levels.last().expect("a trace has at least one level")
    }

    /// Explanation for a failed trace.
    pub fn diagnostic(&self) -> Option<String> {
        match &self.outcome {
            Outcome::SpanningCertified { .. } => None,
            Outcome::NoSpanningAt { level, boxes } => Some(format!(
                "no spanning component among {} candidate boxes at level {level} for `{}`. \
                 A continuous self-map always has a connected set of fixed points spanning the \
                 parameter interval, so this indicates an unsound modulus, an oracle that is \
                 not a continuous self-map, or a classification bug.",
                boxes.len(),
                self.oracle
            )),
        }
    }
}

pub fn trace(oracle: &dyn Oracle, config: TraceConfig) -> Result<TraceResult> {
    config.validate()?;
    let dim = oracle.dim() + 1;
    let mut levels: Vec<TraceLevel> = Vec::new();
    let mut outcome = Outcome::SpanningCertified { k_max: config.k_max };

    for k in config.k_start..=config.k_max {
        let restrict = levels.last().map(|l| &l.boxes);
        let classified = classify_level(oracle, k, restrict)?;
        let candidates = candidates_of(k, dim, &classified)?;
        let residuals: Vec<f64> =
            classified.iter().filter(|c| c.verdict == Verdict::Candidate).map(|c| c.residual).collect();
        let labeling = label_components(&candidates);
        let spanning = spanning_components(&labeling);
        let count = candidates.len();

        if spanning.is_empty() {
            levels.push(TraceLevel { k, candidates: count, boxes: candidates.clone(), residuals, labeling, spanning });
            outcome = Outcome::NoSpanningAt { level: k, boxes: candidates };
            break;
        }

        let level = if config.prune && spanning.len() < labeling.len() {
            let keep: Vec<bool> = labeling.labels().iter().map(|l| labeling.components()[*l].spanning).collect();
            let boxes = labeling.select(|id| labeling.components()[id].spanning);
            let residuals = residuals.iter().zip(&keep).filter(|(_, &k)| k).map(|(r, _)| *r).collect();
            let labeling = label_components(&boxes);
            let spanning = spanning_components(&labeling);
            TraceLevel { k, candidates: count, boxes, residuals, labeling, spanning }
        } else {
            TraceLevel { k, candidates: count, boxes: candidates, residuals, labeling, spanning }
        };
        levels.push(level);
    }

    let convergence = levels
        .windows(2)
        .filter(|w| !w[0].boxes.is_empty() && !w[1].boxes.is_empty())
        .map(|w| hausdorff(&w[0].boxes, &w[1].boxes))
        .collect::<Result<Vec<_>>>()?;

    Ok(TraceResult { oracle: oracle.name().to_string(), config, levels, outcome, convergence })
}

#[derive(Clone, Debug)]
pub struct LimitEstimate {
    pub level: u32,
    pub boxes: BoxSet,
    /// Largest state-space extent of a single parameter column.
    pub width: Dyadic,
}

/// The deepest `D_k` of a certified trace, as the current outer approximation
/// of a spanning continuum of fixed points.
pub fn limit_estimate(result: &TraceResult) -> Result<LimitEstimate> {
    if let Outcome::NoSpanningAt { level, .. } = result.outcome {
        return Err(Error::NotSpanning { level });
    }
    let deepest = result.deepest();
    Ok(LimitEstimate { level: deepest.k, boxes: deepest.boxes.clone(), width: column_width(&deepest.boxes) })
}

/// Max over parameter columns of the largest state-coordinate extent.
pub fn column_width(set: &BoxSet) -> Dyadic {
    let dim = set.dim();
    let mut widest = 0u64;
    let mut column: Option<u32> = None;
    let mut lo = vec![u32::MAX; dim];
    let mut hi = vec![0u32; dim];
    let mut flush = |lo: &mut [u32], hi: &mut [u32]| {
        for i in 1..dim {
            if lo[i] <= hi[i] {
                widest = widest.max(u64::from(hi[i] - lo[i]) + 1);
            }
            lo[i] = u32::MAX;
            hi[i] = 0;
        }
    };
    for ix in set.indices() {
        if column != Some(ix[0]) {
            flush(&mut lo, &mut hi);
            column = Some(ix[0]);
        }
        for i in 1..dim {
            lo[i] = lo[i].min(ix[i]);
            hi[i] = hi[i].max(ix[i]);
        }
    }
    flush(&mut lo, &mut hi);
    Dyadic::new(widest, set.level())
}
