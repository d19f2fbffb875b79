//! Run pipelines and their text artifacts. Everything here is deterministic:
//! the same config and seed render byte-identical strings.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::geometry::{BoxSet, DyadicBox, MAX_LEVEL};
use crate::oracle::{lookup, Oracle, TabulatedOracle};
use crate::peano::{d2xy, lift, lookup_two_param, pushforward, CellCoverage, SpaceFillingCurve};
use crate::refine::{trace, Outcome, TraceResult};
use crate::witness::{verify_witness, SeparationWitness, WitnessReport};

pub const DEFAULT_TRACE_FUNCTION: &str = "example1";
pub const DEFAULT_LIFT_FUNCTION: &str = "homotopy2";

/// Parse a claimed-set file: one box per line, `k j_0 j_1 ... j_n`, with `#`
/// comments. Boxes of different levels are refined to the deepest one.
pub fn parse_claimed_set(text: &str) -> Result<BoxSet> {
    let mut boxes = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: n + 1, message };
        let fields: Vec<u32> = line
            .split_whitespace()
            .map(|f| f.parse::<u32>().map_err(|_| err(format!("`{f}` is not a non-negative integer"))))
            .collect::<Result<_>>()?;
        if fields.len() < 3 {
            return Err(err(format!("expected `k j_0 j_1 ...` with at least two indices, found `{line}`")));
        }
        let b = DyadicBox::new(fields[0], fields[1..].to_vec()).map_err(|e| err(e.to_string()))?;
        if let Some(first) = boxes.first() {
            let first: &DyadicBox = first;
            if first.dim() != b.dim() {
                return Err(err(format!("box has {} indices, earlier boxes have {}", b.dim(), first.dim())));
            }
        }
        boxes.push(b);
    }
    let first = boxes.first().ok_or(Error::EmptySet("claimed set"))?;
    let dim = first.dim();
    let level = boxes.iter().map(DyadicBox::level).max().unwrap_or(0);
    let mut out = BoxSet::new(level, dim)?;
    for b in boxes {
        for piece in BoxSet::from_boxes(b.level(), dim, [b])?.refine_to(level)?.boxes() {
            out.insert(piece)?;
        }
    }
    Ok(out)
}

pub fn render_claimed_set(set: &BoxSet) -> String {
    let mut out = String::new();
    for ix in set.indices() {
        write!(out, "{}", set.level()).unwrap();
        for j in ix {
            write!(out, " {j}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `level,j0..jn,component_id,spanning,residual`, sorted by level then index.
pub fn boxes_csv(result: &TraceResult) -> String {
    let dim = result.levels.first().map_or(0, |l| l.boxes.dim());
    let mut out = String::from("level");
    for i in 0..dim {
        write!(out, ",j{i}").unwrap();
    }
    out.push_str(",component_id,spanning,residual\n");
    for level in &result.levels {
        let components = level.labeling.components();
        let rows = level.boxes.indices().zip(level.labeling.labels()).zip(&level.residuals);
        for ((ix, &label), residual) in rows {
            write!(out, "{}", level.k).unwrap();
            for j in ix {
                write!(out, ",{j}").unwrap();
            }
            writeln!(out, ",{label},{},{residual}", components[label].spanning).unwrap();
        }
    }
    out
}

/// Per-level component summary plus convergence distances; keys sorted.
pub fn components_json(result: &TraceResult, oracle: &dyn Oracle) -> String {
    let levels: Vec<Value> = result
        .levels
        .iter()
        .map(|l| {
            json!({
                "level": l.k,
                "candidates": l.candidates,
                "boxes": l.boxes.len(),
                "component_count": l.labeling.len(),
                "spanning_ids": l.spanning,
                "components": l.labeling.components(),
            })
        })
        .collect();
    let convergence: Vec<Value> = result
        .convergence
        .iter()
        .zip(result.levels.windows(2))
        .map(|(d, w)| {
            json!({
                "from": w[0].k,
                "to": w[1].k,
                "hausdorff": d.to_string(),
                "hausdorff_f64": d.to_f64(),
            })
        })
        .collect();
    let outcome = match &result.outcome {
        Outcome::SpanningCertified { k_max } => json!({ "kind": "spanning_certified", "k_max": k_max }),
        Outcome::NoSpanningAt { level, boxes } => json!({
            "kind": "no_spanning_at",
            "level": level,
            "boxes": boxes.len(),
            "diagnostic": result.diagnostic(),
        }),
    };
    let doc = json!({
        "oracle": result.oracle,
        "modulus": oracle.modulus_description(),
        "config": result.config,
        "outcome": outcome,
        "levels": levels,
        "convergence": convergence,
    });
    to_json(&doc)
}

/// Separation, step size and report.
pub fn witness_json(w: &SeparationWitness, report: &WitnessReport) -> String {
    let sep = w.separation();
    let list = |set: &BoxSet| -> Vec<Vec<u32>> { set.indices().map(<[u32]>::to_vec).collect() };
    let doc = json!({
        "oracle": w.oracle().name(),
        "modulus": w.oracle().modulus_description(),
        "separation": {
            "level": sep.level(),
            "a0": list(sep.a0()),
            "a1": list(sep.a1()),
            "margin": sep.margin().to_string(),
            "margin_f64": sep.margin().to_f64(),
            "gap": sep.gap().map(|g| g.to_string()),
        },
        "claimed_boxes": w.claimed().len(),
        "dropped_pieces": w.dropped(),
        "epsilon": w.epsilon().to_string(),
        "delta": w.delta().to_string(),
        "report": report,
    });
    to_json(&doc)
}

/// Every parameter cell in curve order with its coverage flag.
pub fn cells_csv(coverage: &CellCoverage) -> String {
    let mut out = String::from("hilbert_index,u,v,covered\n");
    for d in 0..coverage.total() {
        let (u, v) = d2xy(coverage.order, d);
        writeln!(out, "{d},{u},{v},{}", coverage.contains(u, v)).unwrap();
    }
    out
}

/// Round to 9 significant digits and print in shortest form.
pub fn sig9(v: f64) -> String {
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Overlay of every traced level in the `(t, x)` plane; `None` unless `n = 1`.
///
/// Coarser levels are drawn first and lighter. Deepest-level boxes in a
/// spanning component are drawn in a separate color.
pub fn plot_svg(result: &TraceResult) -> Option<String> {
    let deepest = result.levels.last()?;
    if deepest.boxes.dim() != 2 {
        return None;
    }
    const SIZE: f64 = 800.0;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SIZE
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>"#).unwrap();
    let count = result.levels.len();
    for (i, level) in result.levels.iter().enumerate() {
        let last = i + 1 == count;
        let opacity = sig9(0.15 + 0.6 * (i + 1) as f64 / count as f64);
        writeln!(out, r#"<g data-level="{}" fill-opacity="{opacity}">"#, level.k).unwrap();
        let components = level.labeling.components();
        for (b, &label) in level.boxes.boxes().zip(level.labeling.labels()) {
            let h = b.side() * SIZE;
            let color = if last && components[label].spanning { "#c0392b" } else { "#2c3e50" };
            writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}"/>"#,
                sig9(b.lower(0) * SIZE),
                sig9(SIZE - b.upper(1) * SIZE),
                sig9(h),
                sig9(h)
            )
            .unwrap();
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Some(out)
}

fn to_json(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("values serialize");
    s.push('\n');
    s
}

/// The one-parameter oracle selected by `config`: a table file if given,
/// otherwise a corpus name.
pub fn resolve_oracle(config: &RunConfig) -> Result<Arc<dyn Oracle>> {
    match &config.table {
        Some(path) => Ok(Arc::new(TabulatedOracle::load(path)?)),
        None => lookup(config.function_or(DEFAULT_TRACE_FUNCTION), config.cantor_depth),
    }
}

#[derive(Debug)]
pub struct TraceArtifacts {
    pub result: TraceResult,
    pub boxes_csv: String,
    pub components_json: String,
    pub plot_svg: Option<String>,
}

fn render_trace(result: TraceResult, oracle: &dyn Oracle) -> TraceArtifacts {
    TraceArtifacts {
        boxes_csv: boxes_csv(&result),
        components_json: components_json(&result, oracle),
        plot_svg: plot_svg(&result),
        result,
    }
}

pub fn run_trace(config: &RunConfig) -> Result<TraceArtifacts> {
    config.validate()?;
    let oracle = resolve_oracle(config)?;
    let result = trace(oracle.as_ref(), config.trace_config())?;
    Ok(render_trace(result, oracle.as_ref()))
}

#[derive(Debug)]
pub struct WitnessArtifacts {
    pub witness: SeparationWitness,
    pub report: WitnessReport,
    pub witness_json: String,
}

pub fn run_witness_on(claimed: BoxSet, oracle: Arc<dyn Oracle>, samples: usize, seed: u64) -> Result<WitnessArtifacts> {
    let witness = SeparationWitness::for_claim(claimed, oracle)?;
    let report = verify_witness(&witness, samples, seed)?;
    let witness_json = witness_json(&witness, &report);
    Ok(WitnessArtifacts { witness, report, witness_json })
}

pub fn run_witness(config: &RunConfig) -> Result<WitnessArtifacts> {
    config.validate()?;
    let path = config
        .claimed_set
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("witness needs a claimed set file".into()))?;
    let claimed = load_claimed_set(path)?;
    run_witness_on(claimed, resolve_oracle(config)?, config.samples, config.seed)
}

pub fn load_claimed_set(path: &Path) -> Result<BoxSet> {
    parse_claimed_set(&std::fs::read_to_string(path)?)
}

#[derive(Debug)]
pub struct LiftArtifacts {
    pub trace: TraceArtifacts,
    pub curve: SpaceFillingCurve,
    pub coverage: Option<CellCoverage>,
    pub cells_csv: Option<String>,
}

/// Trace a two-parameter oracle through the curve and push the spanning
/// components of the deepest level forward to parameter cells.
pub fn run_lift_trace(config: &RunConfig) -> Result<LiftArtifacts> {
    config.validate()?;
    let curve = match config.curve_order {
        Some(m) => SpaceFillingCurve::new(m)?,
        None => SpaceFillingCurve::for_depth(config.k_max)?,
    };
    if 2 * curve.order() > config.k_max.min(MAX_LEVEL) {
        return Err(Error::CurveTooCoarse { k: config.k_max, order: curve.order() });
    }
    let base = lookup_two_param(config.function_or(DEFAULT_LIFT_FUNCTION))?;
    let lifted = lift(base, curve);
    let result = trace(&lifted, config.trace_config())?;
    let coverage = if result.is_certified() {
        let deepest = result.deepest();
        let spanning = deepest.labeling.select(|id| deepest.labeling.components()[id].spanning);
        Some(pushforward(&curve, &spanning)?)
    } else {
        None
    };
    let cells_csv = coverage.as_ref().map(cells_csv);
    Ok(LiftArtifacts { trace: render_trace(result, &lifted), curve, coverage, cells_csv })
}

/// `name,dim,modulus` for every built-in oracle.
pub fn corpus_listing(cantor_depth: u32) -> Result<String> {
    let mut out = String::from("name,params,dim,modulus\n");
    let mut oracles = crate::oracle::corpus();
    if !(4..=crate::oracle::DEFAULT_CANTOR_DEPTH).contains(&cantor_depth) {
        oracles.push(lookup("example2", cantor_depth)?);
    }
    for o in oracles {
        writeln!(out, "\"{}\",1,{},\"{}\"", o.name(), o.dim(), o.modulus_description()).unwrap();
    }
    for name in [DEFAULT_LIFT_FUNCTION, "homotopy2-2d"] {
        let o = lookup_two_param(name)?;
        writeln!(out, "{},2,{},\"{}\"", o.name(), o.dim(), o.modulus_description()).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Identity;
    use crate::refine::TraceConfig;

    #[test]
    fn claimed_set_round_trip() {
        let text = "# two boxes\n2 0 0\n\n2 3 3  # far corner\n";
        let set = parse_claimed_set(text).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(render_claimed_set(&set), "2 0 0\n2 3 3\n");
        assert_eq!(parse_claimed_set(&render_claimed_set(&set)).unwrap(), set);
    }

    #[test]
    fn claimed_set_mixed_levels_refine() {
        let set = parse_claimed_set("1 0 0\n2 3 3\n").unwrap();
        assert_eq!(set.level(), 2);
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn claimed_set_errors_name_the_line() {
        let err = parse_claimed_set("2 0 0\n2 0 x\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_claimed_set("2 4 0\n").is_err());
        assert!(parse_claimed_set("2 0\n").is_err());
        assert!(parse_claimed_set("2 0 0\n2 0 0 0\n").is_err());
        assert!(parse_claimed_set("# nothing\n").is_err());
    }

    #[test]
    fn identity_csv_row_count() {
        let r = trace(&Identity::new(1), TraceConfig { k_start: 1, k_max: 4, prune: true }).unwrap();
        let csv = boxes_csv(&r);
        let rows = csv.lines().count() - 1;
        assert_eq!(rows, 4 + 16 + 64 + 256);
        assert!(csv.starts_with("level,j0,j1,component_id,spanning,residual\n1,0,0,0,true,0\n"));
    }

    #[test]
    fn json_keys_are_sorted() {
        let r = trace(&Identity::new(1), TraceConfig { k_start: 1, k_max: 2, prune: true }).unwrap();
        let s = components_json(&r, &Identity::new(1));
        let top: Vec<&str> =
            s.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
        let mut sorted = top.clone();
        sorted.sort();
        assert_eq!(top, sorted);
    }

    #[test]
    fn sig9_rounding() {
        assert_eq!(sig9(125.0), "125");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(800.0 - 800.0 / 3.0), "533.333333");
    }

    #[test]
    fn svg_only_for_one_dimension() {
        let cfg = TraceConfig { k_start: 1, k_max: 2, prune: true };
        let one = trace(&Identity::new(1), cfg).unwrap();
        let svg = plot_svg(&one).unwrap();
        assert_eq!(svg.matches("<rect").count(), 1 + 4 + 16);
        let two = trace(&Identity::new(2), cfg).unwrap();
        assert!(plot_svg(&two).is_none());
    }
}
