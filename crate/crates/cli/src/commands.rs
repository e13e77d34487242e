use std::path::Path;

use serde_json::json;

use hypwalk_core::boundary::{hitting_samples, stationarity_indicator, uniformity_stats, Binning, BoundaryHistogram, EscapeConfig, UniformityStats};
use hypwalk_core::dehnfill::{instantiate, CoxeterFamily};
use hypwalk_core::estimators::{
    critical_exponent, drift_mc, entropy_estimate, entropy_upper_sequence, family_sweep, DriftConfig, EntropyTable,
    EstimateReport, EstimatorError, ExponentMode, SweepConfig, SWEEP_COLUMNS,
};
use hypwalk_core::groups::{ball, fixtures, triangle_family, verify_relations, vinberg_realize, CoxeterDiagram, Label, MarkedGroup};
use hypwalk_core::hypgeom::BoundaryModel;
use hypwalk_core::measures::{parse_measure, ConvolveOptions, FinSuppMeasure};

use crate::config::RunConfig;
use crate::output::{fmt_f64, Csv, Sink};
use crate::CliError;

const RELATION_TOLERANCE: f64 = 1e-8;

fn block<'a>(cfg: &'a RunConfig, name: &str) -> Result<&'a str, CliError> {
    cfg.blocks
        .get(name)
        .map(String::as_str)
        .ok_or_else(|| CliError::Config(format!("missing [{name}] block")))
}

pub fn build_group(cfg: &RunConfig) -> Result<MarkedGroup, CliError> {
    let text = cfg.group.trim();
    let (kind, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let group = match kind {
        "triangle" => {
            let labels = rest
                .split(',')
                .map(|t| t.parse::<Label>())
                .collect::<Result<Vec<_>, _>>()?;
            if labels.len() != 3 {
                return Err(CliError::Config(format!("triangle needs \"p,q,n\", got {rest:?}")));
            }
            triangle_family(labels[0], labels[1], labels[2])?
        }
        "diagram" => vinberg_realize(&CoxeterDiagram::parse(block(cfg, "diagram")?)?)?,
        "free" => fixtures::free_group_gamma2(),
        "z2" => fixtures::z2_translations(),
        "cyclic" => fixtures::hyperbolic_cyclic(),
        "rotation" => {
            let theta: f64 = rest
                .parse()
                .map_err(|_| CliError::Config(format!("rotation angle {rest:?}")))?;
            fixtures::elliptic_rotation(theta)
        }
        "dihedral" => fixtures::dihedral(rest.parse()?)?,
        "" => return Err(CliError::Config("no group given (set group = ...)".into())),
        other => return Err(CliError::Config(format!("unknown group kind {other:?}"))),
    };
    Ok(group.with_tolerances(cfg.tolerances))
}

pub fn build_measure(cfg: &RunConfig, group: &MarkedGroup) -> Result<FinSuppMeasure, CliError> {
    let text = if cfg.measure.trim() == "block" {
        block(cfg, "measure")?
    } else {
        cfg.measure.as_str()
    };
    Ok(parse_measure(text, group)?)
}

pub fn build_family(cfg: &RunConfig) -> Result<CoxeterFamily, CliError> {
    let text = cfg.family.trim();
    let (kind, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    match kind {
        "dihedral" => Ok(CoxeterFamily::dihedral(
            rest.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("dihedral family needs an order, got {rest:?}")))?,
        )?),
        "" | "block" => Ok(CoxeterFamily::parse(block(cfg, "family")?)?),
        other => Err(CliError::Config(format!("unknown family kind {other:?}"))),
    }
}

fn convolve_options(cfg: &RunConfig) -> ConvolveOptions {
    ConvolveOptions {
        prune_floor: cfg.prune_floor,
        support_cap: cfg.limits.support,
        keep_words: false,
    }
}

fn report_json(r: &EstimateReport) -> serde_json::Value {
    json!({
        "value": r.value,
        "kind": r.kind.name(),
        "half_width": r.half_width,
        "upper_bound": r.upper_bound,
        "samples_or_depth": r.samples_or_depth,
        "seed": r.seed,
    })
}

pub fn cmd_walk(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let group = build_group(cfg)?;
    let mu = build_measure(cfg, &group)?;
    let trace_every = if cfg.trace_every > 0 { cfg.trace_every } else { (cfg.steps / 100).max(1) };
    let dc = DriftConfig {
        steps: cfg.steps,
        trials: cfg.trials,
        seed: cfg.seed,
        trace_every,
    };
    let r = drift_mc(&group, &mu, &dc)?;
    let mut sink = Sink::new(out, cfg, "walk")?;
    let mut csv = Csv::new(&["step", "mean_displacement"]);
    for (k, d) in &r.trace {
        csv.push(vec![k.to_string(), fmt_f64(*d)]);
    }
    sink.csv("walk.csv", &csv)?;
    sink.json("walk_report.json", json!({ "group": group.name(), "drift": report_json(&r.report) }))?;
    println!(
        "drift {} ± {} ({} trials, {} steps, seed {})",
        fmt_f64(r.report.value),
        fmt_f64(r.report.half_width),
        cfg.trials,
        cfg.steps,
        cfg.seed
    );
    sink.finish("ok")
}

fn entropy_csv(t: &EntropyTable) -> Csv {
    let mut csv = Csv::new(&["n", "h", "h_over_n", "delta", "atoms", "dropped", "bias"]);
    for r in &t.rows {
        csv.push(vec![
            r.n.to_string(),
            fmt_f64(r.h),
            fmt_f64(r.h_over_n),
            fmt_f64(r.delta),
            r.atoms.to_string(),
            fmt_f64(r.dropped),
            fmt_f64(r.bias),
        ]);
    }
    csv
}

pub fn cmd_entropy(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let group = build_group(cfg)?;
    let mu = build_measure(cfg, &group)?;
    let mut sink = Sink::new(out, cfg, "entropy")?;
    match entropy_upper_sequence(&mu, cfg.k_max, &convolve_options(cfg), &cfg.limits) {
        Ok(t) => {
            sink.csv("entropy.csv", &entropy_csv(&t))?;
            let est = entropy_estimate(&t);
            sink.json(
                "entropy_report.json",
                json!({ "group": group.name(), "entropy": est.as_ref().map(report_json) }),
            )?;
            if let Some(e) = est {
                println!("entropy increment {} at depth {}", fmt_f64(e.value), e.samples_or_depth);
            }
            sink.finish("ok")
        }
        Err(EstimatorError::ConvolutionOverflow {
            power,
            completed,
            partial,
            source,
        }) => {
            sink.csv("entropy.csv", &entropy_csv(&partial))?;
            let notice = format!("convolution power {power} overflowed ({source}); table holds {completed} powers");
            sink.json(
                "entropy_report.json",
                json!({ "group": group.name(), "entropy": entropy_estimate(&partial).as_ref().map(report_json), "overflow": notice }),
            )?;
            sink.finish("cap-breach")?;
            Err(CliError::Cap(notice))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let family = build_family(cfg)?;
    for n in family.outside_hypothesis() {
        eprintln!("note: n = {n} is below 6, outside the right-angle hypothesis of the family");
    }
    let sc = SweepConfig {
        depth: cfg.k_max,
        drift: DriftConfig {
            steps: cfg.steps,
            trials: cfg.trials,
            seed: cfg.seed,
            trace_every: 0,
        },
        convolve: convolve_options(cfg),
        v_mode: if cfg.ball_estimate { ExponentMode::BallEstimate } else { ExponentMode::LatticeExact },
        ball_radius: cfg.r_max,
        limits: cfg.limits,
    };
    let table = family_sweep(&family, &sc);
    let mut sink = Sink::new(out, cfg, "sweep")?;
    let mut csv = Csv::new(&SWEEP_COLUMNS);
    for r in &table.rows {
        let (lo, hi, verdict) = match &r.diagnostic {
            Some(d) => (fmt_f64(d.lo), fmt_f64(d.hi), d.verdict.name().to_string()),
            None => ("nan".into(), "nan".into(), "error".into()),
        };
        csv.push(vec![
            r.param.to_string(),
            fmt_f64(r.h_upper),
            fmt_f64(r.h_delta),
            r.h_depth.to_string(),
            fmt_f64(r.drift),
            fmt_f64(r.drift_ci),
            fmt_f64(r.v),
            r.v_kind.name().to_string(),
            lo,
            hi,
            verdict,
            r.seed.to_string(),
        ]);
        if let Some(e) = &r.error {
            eprintln!("n = {}: {e}", r.param);
        }
    }
    sink.csv("sweep.csv", &csv)?;

    let mut trend = Csv::new(&["family_param", "h_excess", "common_depth", "drift_gap", "drift_gap_ci"]);
    for t in table.trend() {
        trend.push(vec![
            t.param.to_string(),
            fmt_f64(t.h_excess),
            t.common_depth.to_string(),
            fmt_f64(t.drift_gap),
            fmt_f64(t.drift_gap_ci),
        ]);
    }
    sink.csv("sweep_trend.csv", &trend)?;

    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "family_param": r.param.to_string(),
                "h_sequence": r.h_sequence,
                "ratio": r.diagnostic.map(|d| d.ratio),
                "error": r.error,
            })
        })
        .collect();
    let outside: Vec<String> = family.outside_hypothesis().iter().map(|l| l.to_string()).collect();
    sink.json(
        "sweep_report.json",
        json!({ "family": family.name(), "rows": rows, "outside_hypothesis": outside }),
    )?;
    println!("sweep over {} members of {}", table.rows.len(), family.name());
    sink.finish("ok")
}

fn stats_json(s: &UniformityStats) -> serde_json::Value {
    json!({
        "label": UniformityStats::LABEL,
        "tv": s.tv,
        "chi2": s.chi2,
        "max_ratio": s.max_ratio,
        "bins": s.bins,
        "total": s.total,
        "undersampled": s.undersampled,
    })
}

pub fn cmd_hitting(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let group = build_group(cfg)?;
    let mu = build_measure(cfg, &group)?;
    let binning = match BoundaryModel::for_dim(group.dim()).map_err(|e| CliError::Config(e.to_string()))? {
        BoundaryModel::Circle => Binning::Circle { arcs: cfg.bins },
        BoundaryModel::Sphere => Binning::Sphere {
            bands: cfg.bands,
            longitudes: cfg.longitudes,
        },
    };
    let esc = EscapeConfig {
        escape_radius: cfg.escape_radius,
        max_steps: cfg.max_steps,
    };
    let s = hitting_samples(&group, &mu, cfg.trials, cfg.seed, &esc)?;
    let mut hist = BoundaryHistogram::from_points(binning, &s.points)?;
    hist.non_escaping = s.non_escaping;
    hist.warning = s.non_escaping as f64 > 0.01 * cfg.trials as f64;
    let stats = uniformity_stats(&hist);
    let stationarity = if s.points.is_empty() {
        None
    } else {
        Some(stationarity_indicator(&s.points, &mu, binning)?)
    };

    let mut sink = Sink::new(out, cfg, "hitting")?;
    let mut csv = Csv::new(&["bin_index", "bin_center_coords", "count"]);
    for (i, c) in hist.counts.iter().enumerate() {
        let center: Vec<String> = binning.bin_center(i).into_iter().map(fmt_f64).collect();
        csv.push(vec![i.to_string(), center.join(" "), c.to_string()]);
    }
    sink.csv("hitting.csv", &csv)?;
    sink.json(
        "hitting_stats.json",
        json!({
            "group": group.name(),
            "trials": cfg.trials,
            "escaped": hist.total,
            "non_escaping": hist.non_escaping,
            "non_escaping_warning": hist.warning,
            "uniformity": stats_json(&stats),
            "stationarity": stationarity.map(|st| json!({ "tv": st.tv, "threshold": st.threshold, "passes": st.passes() })),
        }),
    )?;
    if hist.warning {
        eprintln!("warning: {} of {} trials did not escape", hist.non_escaping, cfg.trials);
    }
    println!("hitting: {} escaped samples, TV from uniform {} (indicator only)", hist.total, fmt_f64(stats.tv));
    sink.finish("ok")
}

pub fn cmd_ball(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let group = build_group(cfg)?;
    let b = ball(&group, cfg.r_max, &cfg.limits)?;
    let mut csv = Csv::new(&["radius", "elements", "max_displacement", "log_count_over_radius"]);
    for r in 0..=cfg.r_max {
        let n = b.count_within(r);
        let radius = b.displacements[..n].iter().copied().fold(0.0, f64::max);
        let rate = if radius > 0.0 { (b.count_metric(radius) as f64).ln() / radius } else { f64::NAN };
        csv.push(vec![r.to_string(), n.to_string(), fmt_f64(radius), fmt_f64(rate)]);
    }
    let est = critical_exponent(&group, ExponentMode::BallEstimate, cfg.r_max, &cfg.limits)?;
    let lattice = critical_exponent(&group, ExponentMode::LatticeExact, cfg.r_max, &cfg.limits)?;
    let mut sink = Sink::new(out, cfg, "ball")?;
    sink.csv("ball.csv", &csv)?;
    sink.json(
        "ball_report.json",
        json!({
            "group": group.name(),
            "ball_estimate": report_json(&est),
            "lattice_value": report_json(&lattice),
            "lattice_value_note": "valid only if the group is a lattice",
        }),
    )?;
    println!("ball of radius {}: {} elements", cfg.r_max, b.len());
    sink.finish("ok")
}

pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mut groups = Vec::new();
    if !cfg.family.is_empty() || (cfg.group.is_empty() && cfg.blocks.contains_key("family")) {
        let family = build_family(cfg)?;
        for &n in family.n_values() {
            groups.push((n.to_string(), instantiate(&family, n)?.0));
        }
    } else {
        groups.push(("-".to_string(), build_group(cfg)?));
    }
    let mut csv = Csv::new(&["member", "relator", "residual"]);
    let mut worst = 0.0f64;
    for (name, g) in &groups {
        let rep = verify_relations(g)?;
        for (w, r) in &rep.relators {
            csv.push(vec![name.clone(), w.to_string(), fmt_f64(*r)]);
        }
        worst = worst.max(rep.max_residual);
    }
    let mut sink = Sink::new(out, cfg, "verify")?;
    sink.csv("verify.csv", &csv)?;
    sink.json("verify_report.json", json!({ "max_residual": worst, "tolerance": RELATION_TOLERANCE }))?;
    println!("largest relator residual {}", fmt_f64(worst));
    if worst > RELATION_TOLERANCE {
        sink.finish("audit-failure")?;
        return Err(CliError::Audit(format!(
            "relator residual {worst:e} exceeds {RELATION_TOLERANCE:e}"
        )));
    }
    sink.finish("ok")
}
