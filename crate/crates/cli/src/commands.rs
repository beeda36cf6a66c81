//! Command bodies, generic over the group.

use std::io::Write;
use std::path::PathBuf;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use curvlab::cache::cached_metric;
use curvlab::curvature::{kappa, Mode};
use curvlab::deadend::{backtrack_elements, dead_end_report, depth, scan_dead_ends, DeadEndReport, Depth};
use curvlab::heisenberg::heis_density_experiment;
use curvlab::transport::{question_probe, transport_distance, MeasureSpec};
use curvlab::verify::{self, Tier};
use curvlab::{bfs_metric, word_length, Group, MetricTable, Rational, Scalar, TransportResult};

use crate::literal::{parse_element, CliGroup};
use crate::output::{Format, Sink};
use crate::CliError;

/// Table settings shared by every group command.
#[derive(Clone, Debug)]
pub struct TableConfig {
    pub budget: usize,
    pub horizon: Option<u32>,
    pub cache: Option<PathBuf>,
}

impl TableConfig {
    fn build<G: Group>(&self, group: &G, horizon: u32) -> curvlab::Result<MetricTable<G>> {
        match &self.cache {
            Some(dir) => cached_metric(group, horizon, self.budget, dir),
            None => bfs_metric(group, horizon, self.budget),
        }
    }

    /// A table of horizon at least `base`. When `g` is not covered by a
    /// closed formula and no horizon was given, the table grows until it
    /// reaches `|g| + reach`.
    fn table<G: CliGroup>(
        &self,
        group: &G,
        base: u32,
        g: Option<&G::Elem>,
        reach: u32,
    ) -> curvlab::Result<MetricTable<G>> {
        if let Some(h) = self.horizon {
            return self.build(group, h);
        }
        let table = self.build(group, base.max(group.horizon_floor()))?;
        let Some(g) = g.filter(|g| group.closed_length(g).is_none()) else {
            return Ok(table);
        };
        let len = word_length(group, g, &table)? as u32;
        if len + reach > table.horizon() {
            return self.build(group, len + reach);
        }
        Ok(table)
    }
}

fn parse<G: CliGroup>(group: &G, text: &str) -> Result<G::Elem, CliError> {
    Ok(parse_element(group, text)?)
}

#[derive(Serialize)]
struct LengthRow {
    group: String,
    element: String,
    length: u64,
    source: &'static str,
}

pub fn length<G: CliGroup, W: Write>(
    group: &G,
    cfg: &TableConfig,
    element: &str,
    sink: &mut Sink<W>,
) -> Result<(), CliError> {
    let g = parse(group, element)?;
    let (length, source) = match (group.closed_length(&g), cfg.horizon) {
        (Some(l), None) => (l, "formula"),
        _ => {
            let table = cfg.table(group, 0, Some(&g), 0)?;
            let source = if table.contains(&g) { "bfs" } else { "formula" };
            (word_length(group, &g, &table)?, source)
        }
    };
    let row = LengthRow {
        group: group.id(),
        element: group.format(&g),
        length,
        source,
    };
    match sink.format {
        Format::Json => sink.json(&row)?,
        Format::Csv => sink.csv(
            &["group", "element", "length", "source"],
            [[row.group, row.element, row.length.to_string(), row.source.into()]],
        )?,
    }
    Ok(())
}

pub fn curvature<G: CliGroup, W: Write>(
    group: &G,
    cfg: &TableConfig,
    element: &str,
    radius: u32,
    mode: Mode,
    sink: &mut Sink<W>,
) -> Result<(), CliError> {
    let g = parse(group, element)?;
    let table = cfg.table(group, radius, Some(&g), 2 * radius)?;
    let report = kappa::<_, Rational>(group, &table, &g, radius, mode)?;
    match sink.format {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            let header = [
                "element",
                "radius",
                "mode",
                "base_length",
                "comparison_distance",
                "kappa",
                "conjugator",
                "conjugate_length",
            ];
            let rows = report.breakdown.iter().map(|c| {
                [
                    report.element.clone(),
                    report.radius.to_string(),
                    report.mode.to_string(),
                    report.base_length.to_string(),
                    report.comparison_distance.render(),
                    report.kappa.render(),
                    c.conjugator.clone(),
                    c.length.to_string(),
                ]
            });
            sink.csv(&header, rows)?
        }
    }
    Ok(())
}

const DEADEND_HEADER: [&str; 7] = [
    "element",
    "length",
    "is_dead_end",
    "depth",
    "witness",
    "pocket_depth",
    "strict_depth",
];

fn depth_text(d: Depth) -> String {
    match d {
        Depth::Finite(k) => k.to_string(),
        Depth::Exceeded(limit) => format!(">{limit}"),
    }
}

fn deadend_row(r: &DeadEndReport) -> [String; 7] {
    [
        r.element.clone(),
        r.length.to_string(),
        r.is_dead_end.to_string(),
        depth_text(r.depth),
        r.witness.clone().unwrap_or_default(),
        r.pocket_depth.map_or(String::new(), |p| p.to_string()),
        r.strict_depth.to_string(),
    ]
}

pub fn deadend<G: CliGroup, W: Write>(
    group: &G,
    cfg: &TableConfig,
    element: &str,
    max_depth: u32,
    sink: &mut Sink<W>,
) -> Result<(), CliError> {
    let g = parse(group, element)?;
    let table = cfg.table(group, max_depth, Some(&g), max_depth.max(1))?;
    let report = dead_end_report(group, &table, &g, max_depth)?;
    match sink.format {
        Format::Json => sink.json(&report)?,
        Format::Csv => sink.csv(&DEADEND_HEADER, [deadend_row(&report)])?,
    }
    Ok(())
}

pub fn deadend_scan<G: CliGroup, W: Write>(
    group: &G,
    cfg: &TableConfig,
    radius: u32,
    max_depth: u32,
    sink: &mut Sink<W>,
) -> Result<(), CliError> {
    let base = if group.horizon_floor() > 0 {
        radius + max_depth + 1
    } else {
        radius + 1
    };
    let table = cfg.table(group, base, None, 0)?;
    let found = scan_dead_ends(group, &table, radius)?;
    match sink.format {
        Format::Json => {
            for g in &found {
                sink.json_line(&dead_end_report(group, &table, g, max_depth)?)?;
            }
        }
        Format::Csv => {
            let rows = found
                .iter()
                .map(|g| dead_end_report(group, &table, g, max_depth).map(|r| deadend_row(&r)))
                .collect::<curvlab::Result<Vec<_>>>()?;
            sink.csv(&DEADEND_HEADER, rows)?
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Backtrack {
    element: String,
    length: u64,
}

#[derive(Serialize)]
struct BacktrackReport {
    dead_end: String,
    length: u64,
    depth: Depth,
    backtracks: Vec<Backtrack>,
}

pub fn backtracks<G: CliGroup, W: Write>(
    group: &G,
    cfg: &TableConfig,
    element: &str,
    max_depth: u32,
    sink: &mut Sink<W>,
) -> Result<(), CliError> {
    let g = parse(group, element)?;
    let table = cfg.table(group, max_depth, Some(&g), max_depth.max(1))?;
    let found = backtrack_elements(group, &table, &g, max_depth)?;
    let report = BacktrackReport {
        dead_end: group.format(&g),
        length: word_length(group, &g, &table)?,
        depth: depth(group, &table, &g, max_depth)?.depth,
        backtracks: found
            .iter()
            .map(|x| {
                Ok(Backtrack {
                    element: group.format(x),
                    length: word_length(group, x, &table)?,
                })
            })
            .collect::<curvlab::Result<_>>()?,
    };
    match sink.format {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            let rows = report.backtracks.iter().map(|b| {
                [
                    report.dead_end.clone(),
                    depth_text(report.depth),
                    b.element.clone(),
                    b.length.to_string(),
                ]
            });
            sink.csv(&["dead_end", "depth", "element", "length"], rows)?
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TransportReport<'a> {
    x: String,
    y: String,
    radius: u32,
    mode: Mode,
    #[serde(flatten)]
    result: &'a TransportResult<Rational>,
}

#[allow(clippy::too_many_arguments)]
pub fn transport<G: CliGroup, W: Write>(
    group: &G,
    cfg: &TableConfig,
    from: Option<&str>,
    element: &str,
    radius: u32,
    mode: Mode,
    cap: usize,
    sink: &mut Sink<W>,
) -> Result<(), CliError> {
    let x = match from {
        Some(text) => parse(group, text)?,
        None => group.identity(),
    };
    let y = parse(group, element)?;
    let g = group.difference(&x, &y);
    let table = cfg.table(group, radius, Some(&g), 2 * radius)?;
    let spec = MeasureSpec {
        x: x.clone(),
        y: y.clone(),
        support: mode,
        radius,
    };
    let result: TransportResult<Rational> = transport_distance(group, &table, &spec, cap)?;
    match sink.format {
        Format::Json => sink.json(&TransportReport {
            x: group.format(&x),
            y: group.format(&y),
            radius,
            mode,
            result: &result,
        })?,
        Format::Csv => {
            let n = result.support.len();
            let rows = (0..n * n).map(|k| {
                let (i, j) = (k / n, k % n);
                [
                    i.to_string(),
                    j.to_string(),
                    result.support[i].clone(),
                    result.support[j].clone(),
                    result.cost[i][j].to_string(),
                ]
            });
            sink.csv(&["i", "j", "source", "target", "cost"], rows)?
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn probe<G: CliGroup, W: Write>(
    group: &G,
    cfg: &TableConfig,
    radius: u32,
    sample_radius: u32,
    samples: usize,
    seed: u64,
    cap: usize,
    sink: &mut Sink<W>,
) -> Result<(), CliError> {
    let base = if group.horizon_floor() > 0 {
        sample_radius + 2 * radius
    } else {
        sample_radius.max(radius)
    };
    let table = cfg.table(group, base, None, 0)?;
    let pool: Vec<G::Elem> = table.ball(sample_radius)?.into_iter().skip(1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, pool.len(), samples.min(pool.len())).into_vec();
    picked.sort_unstable();
    let chosen: Vec<G::Elem> = picked.into_iter().map(|i| pool[i].clone()).collect();
    let report = question_probe(group, &table, &chosen, radius, cap)?;
    match sink.format {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            let header = [
                "element",
                "length",
                "sphere_identity_optimal",
                "sphere_optima",
                "ball_identity_optimal",
                "ball_optima",
                "ball_optima_truncated",
                "sphere_preserving",
                "decomposes",
            ];
            let rows = report.rows.iter().map(|r| {
                [
                    r.element.clone(),
                    r.length.to_string(),
                    r.sphere_identity_optimal.to_string(),
                    r.sphere_optima.to_string(),
                    r.ball_identity_optimal.to_string(),
                    r.ball_optima.to_string(),
                    r.ball_optima_truncated.to_string(),
                    r.sphere_preserving.to_string(),
                    r.decomposes.to_string(),
                ]
            });
            sink.csv(&header, rows)?
        }
    }
    Ok(())
}

pub fn density<W: Write>(k: u64, radius: u32, sink: &mut Sink<W>) -> Result<(), CliError> {
    let keep_rows = sink.format == Format::Csv;
    let report = heis_density_experiment(k, radius, keep_rows)?;
    match sink.format {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            let mut header: Vec<String> = ["a", "b", "c", "s"].map(String::from).to_vec();
            header.extend((1..=radius).map(|t| format!("case_t{t}")));
            header.extend(["predicted", "kappa"].map(String::from));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = report.rows.iter().map(|row| {
                let mut out = vec![
                    row.element.a.to_string(),
                    row.element.b.to_string(),
                    row.element.c.to_string(),
                    row.s.to_string(),
                ];
                out.extend(row.labels.iter().map(ToString::to_string));
                out.push(row.predicted.to_string());
                out.push(format!("{}/{}", row.kappa.numer(), row.kappa.denom()));
                out
            });
            sink.csv(&header, rows)?
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyRow {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

/// Runs the acceptance criteria; `Ok(false)` when any fails. Timings go to
/// stderr so stdout stays reproducible.
pub fn verify<W: Write>(tier: Tier, only: Option<u32>, sink: &mut Sink<W>) -> Result<bool, CliError> {
    let ids: Vec<u32> = match only {
        Some(id) => vec![id],
        None => verify::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let mut rows = Vec::new();
    for id in ids {
        let outcome = verify::run_criterion(id, tier);
        eprintln!("{outcome}");
        rows.push(VerifyRow {
            id: outcome.id,
            name: outcome.name,
            passed: outcome.passed,
            detail: outcome.detail,
        });
    }
    let all = rows.iter().all(|r| r.passed);
    match sink.format {
        Format::Json => sink.json(&rows)?,
        Format::Csv => sink.csv(
            &["id", "name", "passed", "detail"],
            rows.iter()
                .map(|r| [r.id.to_string(), r.name.to_string(), r.passed.to_string(), r.detail.clone()]),
        )?,
    }
    Ok(all)
}
