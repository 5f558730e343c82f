//! Pass/fail judgements of experiment results against the published tables
//! and the asymptotic predictions.

use serde::{Deserialize, Serialize};

use crate::config::Method;

use super::published::published_value;
use super::studies::{MuScaling, ReflectionCheck};
use super::table::TableRun;

/// One judged property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckLine {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckLine {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// `a` and `b` are positive and within a factor `f` of each other.
pub fn within_factor(a: f64, b: f64, f: f64) -> bool {
    a > 0.0 && b > 0.0 && a / b <= f && b / a <= f
}

fn fmt_row(values: &[Option<f64>]) -> String {
    values
        .iter()
        .map(|v| v.map_or("failed".into(), |v| format!("{v:.2e}")))
        .collect::<Vec<_>>()
        .join(" / ")
}

fn stability(run: &TableRun) -> CheckLine {
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for c in &run.cells {
        match &c.outcome {
            Ok(m) => worst = worst.max(m.stats.growth),
            Err(e) => failed.push(format!("{} r{}: {e}", c.method, c.refinement)),
        }
    }
    CheckLine::new(
        format!("table {} stability", run.spec.table_id),
        failed.is_empty() && worst < 10.0,
        if failed.is_empty() {
            format!("largest growth {worst:.3}")
        } else {
            failed.join("; ")
        },
    )
}

fn published_match(run: &TableRun, factor: f64) -> CheckLine {
    let id = run.spec.table_id;
    let mut misses = Vec::new();
    let mut count = 0;
    for c in &run.cells {
        let Some(target) = published_value(id, c.method, c.group, c.refinement) else {
            continue;
        };
        count += 1;
        match c.value() {
            Some(v) if within_factor(v, target, factor) => {}
            v => misses.push(format!(
                "{} g{} r{}: {} vs {target:.1e}",
                c.method,
                c.group,
                c.refinement,
                v.map_or("failed".into(), |v| format!("{v:.2e}"))
            )),
        }
    }
    CheckLine::new(
        format!("table {id} cells within x{factor}"),
        misses.is_empty() && count > 0,
        if misses.is_empty() {
            format!("{count} cells")
        } else {
            misses.join("; ")
        },
    )
}

fn monotone(run: &TableRun, method: Method, group: usize) -> CheckLine {
    let mut levels: Vec<(u32, Option<f64>)> = run
        .spec
        .refinements
        .iter()
        .map(|&r| (r, run.value(method, group, r)))
        .collect();
    levels.sort_by_key(|l| l.0);
    let values: Vec<Option<f64>> = levels.iter().map(|l| l.1).collect();
    let ok = values.iter().all(Option::is_some)
        && values.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap());
    CheckLine::new(
        format!(
            "table {} {} {} monotone in refinement",
            run.spec.table_id,
            method.label(),
            run.spec.groups()[group].label
        ),
        ok,
        fmt_row(&values),
    )
}

/// Property checks of one table. `companion` is the measured constant-σ
/// table matching a cubic-σ one (1 for 3, 2 for 4); without it the
/// published values stand in.
pub fn check_table(run: &TableRun, companion: Option<&TableRun>) -> Vec<CheckLine> {
    let id = run.spec.table_id;
    let groups = run.spec.groups().len();
    let mut out = vec![stability(run)];
    match id {
        1 => out.push(published_match(run, 2.0)),
        2 => {
            let hml = run.row(Method::HmlV3, 0);
            let r: Vec<u32> = run.spec.refinements.clone();
            let values_ok = r.iter().zip(&hml).all(|(&lvl, v)| {
                matches!((v, published_value(2, Method::HmlV3, 0, lvl)), (Some(v), Some(p)) if within_factor(*v, p, 2.0))
            });
            out.push(CheckLine::new(
                "table 2 HMLV3 normal within x2",
                values_ok,
                fmt_row(&hml),
            ));
            let ratios: Vec<f64> = hml
                .windows(2)
                .filter_map(|w| Some(w[0]? / w[1]?))
                .collect();
            out.push(CheckLine::new(
                "table 2 HMLV3 refinement ratios in [1.3, 2.5]",
                !ratios.is_empty()
                    && ratios.len() + 1 == hml.len()
                    && ratios.iter().all(|q| (1.3..=2.5).contains(q)),
                ratios.iter().map(|q| format!("{q:.2}")).collect::<Vec<_>>().join(", "),
            ));
            for g in 0..groups {
                let row = run.row(Method::Smart, g);
                let vals: Vec<f64> = row.iter().flatten().copied().collect();
                let mean = vals.iter().sum::<f64>() / vals.len().max(1) as f64;
                let spread = vals.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max);
                out.push(CheckLine::new(
                    format!("table 2 Smart {} flat within 30%", run.spec.groups()[g].label),
                    vals.len() == row.len() && spread <= 0.3,
                    format!("{} (spread {:.0}%)", fmt_row(&row), 100.0 * spread),
                ));
            }
        }
        3 | 4 => {
            if run.spec.refinements.contains(&0) {
                let v = run.value(Method::Berenger, 0, 0);
                out.push(CheckLine::new(
                    format!("table {id} Berenger normal r0 <= 1e-3"),
                    v.is_some_and(|v| v <= 1e-3),
                    fmt_row(&[v]),
                ));
            }
            let base = id - 2;
            let mut worst = f64::INFINITY;
            let mut detail = Vec::new();
            let mut ok = true;
            for g in 0..groups {
                for &r in &run.spec.refinements {
                    let v = run.value(Method::HmlV3, g, r);
                    let b = match companion {
                        Some(c) => c.value(Method::HmlV3, g, r),
                        None => published_value(base, Method::HmlV3, g, r),
                    };
                    match (v, b) {
                        (Some(v), Some(b)) => {
                            let q = b / v;
                            worst = worst.min(q);
                            ok &= q >= 100.0;
                            if q < 100.0 {
                                detail.push(format!("g{g} r{r}: {v:.2e} vs {b:.2e}"));
                            }
                        }
                        _ => {
                            ok = false;
                            detail.push(format!("g{g} r{r}: missing"));
                        }
                    }
                }
            }
            out.push(CheckLine::new(
                format!("table {id} HMLV3 at least 100x below table {base}"),
                ok,
                if detail.is_empty() {
                    format!("smallest margin {worst:.0}x")
                } else {
                    detail.join("; ")
                },
            ));
        }
        _ => {
            for m in [Method::Berenger, Method::HmlV2, Method::HmlV3] {
                out.push(monotone(run, m, 0));
            }
            if run.spec.refinements.contains(&2) {
                let (h, s) = (run.value(Method::HmlV3, 0, 2), run.value(Method::Smart, 0, 2));
                out.push(CheckLine::new(
                    format!("table {id} HMLV3 below Smart at r2"),
                    matches!((h, s), (Some(h), Some(s)) if h < s),
                    fmt_row(&[h, s]),
                ));
            }
        }
    }
    out
}

pub fn check_mu_scaling(s: &MuScaling) -> Vec<CheckLine> {
    let line = |m: Method, ok: fn(f64) -> bool, want: &str| {
        let slope = s.slope(m);
        CheckLine::new(
            format!("{} slope {want}", m.label()),
            slope.is_some_and(ok),
            slope.map_or("no fit".into(), |v| format!("{v:.3}")),
        )
    };
    vec![
        line(Method::Smart, |v| (v - 1.0).abs() <= 0.15, "1.0 +- 0.15"),
        line(Method::HmlV3, |v| v >= 1.7, ">= 1.7"),
    ]
}

pub fn check_reflection(r: &ReflectionCheck) -> Vec<CheckLine> {
    vec![
        CheckLine::new(
            "measured/predicted in [0.5, 2]",
            (0.5..=2.0).contains(&r.ratio),
            format!("{:.3e} / {:.3e} = {:.3}", r.measured, r.predicted, r.ratio),
        ),
        CheckLine::new(
            "normal below 0.2x oblique",
            r.normal_over_oblique < 0.2,
            format!("{:.3}", r.normal_over_oblique),
        ),
        CheckLine::new(
            "cubic below 1e-3x constant",
            r.cubic_over_constant < 1e-3,
            format!("{:.2e} / {:.2e}", r.cubic_error, r.constant_error),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_bounds() {
        assert!(within_factor(1.0, 2.0, 2.0));
        assert!(!within_factor(1.0, 2.01, 2.0));
        assert!(!within_factor(0.0, 1.0, 2.0));
    }
}
