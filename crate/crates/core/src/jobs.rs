//! Re-executable units of work. Each job writes its outputs and a manifest
//! to one directory; the manifest embeds the job, so [`rerun`] reproduces
//! the directory from it.

use std::path::Path;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    amplification_map, berenger_symbol_identity, scalar_transport_roots, spml_factorization_residual,
    spml_roots, spml_symbol_det, DirectionLabel, DispersionModel, HyperbolicSystem,
};
use crate::config::{Method, SimConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    check_mu_scaling, check_reflection, check_table, mu_scaling_study, reflection_vs_formula,
    run_table, CheckLine, RunOptions, TableSpec,
};
use crate::io::{
    cell_records, pgm_bytes, reports_csv, sci, table_csv, OutputDir, RunManifest, SnapshotRecord,
};
use crate::reference::{measure, reference_run_with, ReferenceOptions, ReferenceWalls};

/// Quadratic dispersion model of an amplification map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Isotropic,
    Diagonal { entries: [f64; 2] },
    /// Principal axes rotated by `angle_deg` degrees.
    Rotated { angle_deg: f64, eigenvalues: [f64; 2] },
}

impl ModelSpec {
    pub fn build(&self) -> Result<DispersionModel> {
        match *self {
            ModelSpec::Isotropic => DispersionModel::isotropic(2),
            ModelSpec::Diagonal { entries } => DispersionModel::diagonal(&entries),
            ModelSpec::Rotated { angle_deg, eigenvalues } => {
                DispersionModel::rotated(angle_deg.to_radians(), eigenvalues[0], eigenvalues[1])
            }
        }
    }

    /// Whether the form has principal axes along the coordinates.
    pub fn is_aligned(&self) -> bool {
        match *self {
            ModelSpec::Isotropic | ModelSpec::Diagonal { .. } => true,
            ModelSpec::Rotated { angle_deg, eigenvalues } => {
                eigenvalues[0] == eigenvalues[1] || (angle_deg / 90.0).fract() == 0.0
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    RunTable {
        spec: TableSpec,
    },
    Run {
        config: SimConfig,
        reference_walls: ReferenceWalls,
    },
    MuScaling {
        config: SimConfig,
        mu: Vec<f64>,
        methods: Vec<Method>,
    },
    ReflectionCheck {
        config: SimConfig,
    },
    AmplificationMap {
        model: ModelSpec,
        sigma: [f64; 2],
        directions: usize,
    },
    SymbolCheck {
        points: usize,
        seed: u64,
    },
}

/// Result of executing a job.
#[derive(Clone, Debug)]
pub struct JobOutcome {
    pub manifest: RunManifest,
}

impl JobOutcome {
    pub fn checks(&self) -> &[CheckLine] {
        &self.manifest.checks
    }

    pub fn all_pass(&self) -> bool {
        self.manifest.checks.iter().all(|c| c.pass)
    }
}

/// Runs `job` and writes its outputs plus `manifest.json` into `out`.
pub fn execute(job: &Job, opts: &RunOptions, out: &Path) -> Result<JobOutcome> {
    let mut dir = OutputDir::create(out)?;
    let echo = serde_json::to_value(job).expect("job serializes");
    let mut manifest = RunManifest::new(echo, opts.timings);
    match job {
        Job::RunTable { spec } => {
            let run = run_table(spec, opts)?;
            let id = spec.table_id;
            dir.write(&format!("table{id}.csv"), table_csv(&run).as_bytes())?;
            let reports: Vec<_> = run
                .cells
                .iter()
                .filter_map(|c| c.outcome.as_ref().ok().map(|m| m.report.clone()))
                .collect();
            dir.write(&format!("table{id}_cells.csv"), reports_csv(&reports).as_bytes())?;
            if opts.snapshots {
                let groups = spec.groups();
                for c in &run.cells {
                    if let Some(f) = c.outcome.as_ref().ok().and_then(|m| m.snapshot.as_ref()) {
                        let name = format!(
                            "table{id}_{}_{}_r{}.pgm",
                            c.method.name(),
                            groups[c.group].label,
                            c.refinement
                        );
                        let (bytes, mapping) = pgm_bytes(f);
                        dir.write(&name, &bytes)?;
                        manifest.snapshots.push(SnapshotRecord {
                            file: name,
                            quantity: "|Hz - Hz_ref| on the interest region at the final level".into(),
                            mapping,
                        });
                    }
                }
            }
            if matches!(spec.table_id, 7 | 8) {
                manifest.seeds.push(spec.seed);
            }
            manifest.cells = cell_records(&run);
            manifest.checks = check_table(&run, None);
        }
        Job::Run {
            config,
            reference_walls,
        } => {
            let ref_opts = ReferenceOptions {
                walls: *reference_walls,
                exec: opts.exec,
                ..ReferenceOptions::default()
            };
            let reference = reference_run_with(config, &ref_opts)?;
            let at = opts.snapshots.then(|| config.grid().n_steps);
            let mut m = measure(config, &reference, opts.exec, at)?;
            if !opts.timings {
                m.report.runtime = 0.0;
                m.stats.runtime = 0.0;
            }
            dir.write("run.csv", reports_csv(std::slice::from_ref(&m.report)).as_bytes())?;
            if let Some(f) = &m.snapshot {
                let (bytes, mapping) = pgm_bytes(f);
                dir.write("run_error.pgm", &bytes)?;
                manifest.snapshots.push(SnapshotRecord {
                    file: "run_error.pgm".into(),
                    quantity: "|Hz - Hz_ref| on the interest region at the final level".into(),
                    mapping,
                });
            }
            manifest.seeds.extend(config.init.seed());
            manifest.checks.push(CheckLine {
                name: "growth below 10x".into(),
                pass: m.stats.growth < 10.0,
                detail: format!("{:.4}", m.stats.growth),
            });
        }
        Job::MuScaling {
            config,
            mu,
            methods,
        } => {
            let s = mu_scaling_study(config, mu, methods, opts.exec)?;
            let mut text = String::from("method,mu,reflected\n");
            for p in &s.points {
                text += &format!("{},{},{}\n", p.method.name(), sci(p.mu), sci(p.reflected));
            }
            dir.write("mu_scaling.csv", text.as_bytes())?;
            let mut fit = String::from("method,slope,saturated,points_used\n");
            for f in &s.fits {
                fit += &format!(
                    "{},{},{},{}\n",
                    f.method.name(),
                    f.slope.map(sci).unwrap_or_default(),
                    f.saturated,
                    f.points_used
                );
            }
            dir.write("mu_scaling_fit.csv", fit.as_bytes())?;
            if methods.contains(&Method::Smart) && methods.contains(&Method::HmlV3) {
                manifest.checks = check_mu_scaling(&s);
            }
        }
        Job::ReflectionCheck { config } => {
            let r = reflection_vs_formula(config, opts.exec)?;
            let rows = [
                ("carrier_xi1", r.carrier.xi[0]),
                ("carrier_xi2", r.carrier.xi[1]),
                ("carrier_tau", r.carrier.tau),
                ("bandwidth", r.carrier.bandwidth),
                ("incident_amplitude", r.incident_amplitude),
                ("measured", r.measured),
                ("predicted", r.predicted),
                ("ratio", r.ratio),
                ("measured_normal", r.measured_normal),
                ("normal_over_oblique", r.normal_over_oblique),
                ("cubic_error", r.cubic_error),
                ("constant_error", r.constant_error),
                ("cubic_over_constant", r.cubic_over_constant),
            ];
            let mut text = String::from("quantity,value\n");
            for (k, v) in rows {
                text += &format!("{k},{}\n", sci(v));
            }
            dir.write("reflection.csv", text.as_bytes())?;
            manifest.checks = check_reflection(&r);
        }
        Job::AmplificationMap {
            model,
            sigma,
            directions,
        } => {
            let m = model.build()?;
            let map = amplification_map(&m, sigma, *directions)?;
            let mut text = String::from("direction,v1,beta,label\n");
            for s in &map {
                let label = serde_json::to_value(s.label).expect("label serializes");
                text += &format!(
                    "{},{},{},{}\n",
                    sci(s.angle.to_degrees()),
                    sci(s.v1),
                    sci(s.beta),
                    label.as_str().expect("string label")
                );
            }
            dir.write("amplification.csv", text.as_bytes())?;
            manifest.checks = amplification_checks(model, &m, sigma, &map);
        }
        Job::SymbolCheck { points, seed } => {
            let lines = symbol_checks(*points, *seed)?;
            let mut text = String::from("identity,max_residual,tolerance,pass\n");
            for l in &lines {
                text += &format!("{},{},{},{}\n", l.name, sci(l.value), sci(l.tolerance), l.pass());
            }
            dir.write("symbols.csv", text.as_bytes())?;
            manifest.seeds.push(*seed);
            manifest.checks = lines.iter().map(SymbolLine::check).collect();
        }
    }
    Ok(JobOutcome {
        manifest: dir.finish(manifest)?,
    })
}

/// Re-executes the job recorded in a manifest into `out`.
pub fn rerun(manifest_path: &Path, out: &Path, exec: crate::exec::Exec) -> Result<JobOutcome> {
    let old = RunManifest::read(manifest_path)?;
    let job: Job = serde_json::from_value(old.job.clone()).map_err(|e| Error::Parse {
        path: manifest_path.into(),
        reason: format!("job: {e}"),
    })?;
    let opts = RunOptions {
        exec,
        snapshots: !old.snapshots.is_empty(),
        timings: old.timings,
    };
    execute(&job, &opts, out)
}

fn amplification_checks(
    spec: &ModelSpec,
    model: &DispersionModel,
    sigma: &[f64; 2],
    map: &[crate::analysis::DirectionSample],
) -> Vec<CheckLine> {
    // sign rule from the form itself: outgoing iff ∂q/∂ξ₁ < 0, growing iff
    // Σ σ_l ξ_l ∂q/∂ξ_l < 0
    let q = model.form();
    let mut disagree = 0;
    let mut amplified = 0;
    for s in map {
        if s.label == DirectionLabel::Boundary {
            continue;
        }
        let g = [
            q[(0, 0)] * s.xi[0] + q[(0, 1)] * s.xi[1],
            q[(1, 0)] * s.xi[0] + q[(1, 1)] * s.xi[1],
        ];
        let rule = g[0] < 0.0 && sigma[0] * s.xi[0] * g[0] + sigma[1] * s.xi[1] * g[1] < 0.0;
        let got = s.label == DirectionLabel::Amplified;
        amplified += got as usize;
        disagree += (rule != got) as usize;
    }
    let mut out = vec![CheckLine {
        name: "classifier matches the sign rule".into(),
        pass: disagree == 0,
        detail: format!("{disagree} of {} directions disagree", map.len()),
    }];
    if sigma.iter().all(|&s| s >= 0.0) && sigma[1] == 0.0 && sigma[0] > 0.0 {
        let expect_empty = spec.is_aligned();
        out.push(CheckLine {
            name: if expect_empty {
                "aligned model amplifies nothing".into()
            } else {
                "rotated model amplifies some directions".into()
            },
            pass: (amplified == 0) == expect_empty,
            detail: format!("{amplified} amplified directions"),
        });
    }
    out
}

/// Worst residual of one identity over the sampled points.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl SymbolLine {
    pub fn pass(&self) -> bool {
        self.value <= self.tolerance
    }

    fn check(&self) -> CheckLine {
        CheckLine {
            name: self.name.clone(),
            pass: self.pass(),
            detail: format!("{:.2e} (tolerance {:.0e})", self.value, self.tolerance),
        }
    }
}

/// Evaluates every symbol identity at `points` random arguments.
pub fn symbol_checks(points: usize, seed: u64) -> Result<Vec<SymbolLine>> {
    if points == 0 {
        return Err(Error::config("points", "need at least one point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maxwell = HyperbolicSystem::maxwell_te();
    let scalar = HyperbolicSystem::scalar_transport();
    let mut worst = [0.0f64; 5];
    for _ in 0..points {
        let tau = C64::new(rng.gen_range(0.1..2.0), rng.gen_range(-2.0..2.0));
        let xi = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let sigma = [rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)];
        let zero = [0.0, 0.0];
        worst[0] = worst[0].max(berenger_symbol_identity(&maxwell, tau, &xi, &zero)?);
        worst[1] = worst[1].max(berenger_symbol_identity(&scalar, tau, &xi, &zero)?);
        worst[2] = worst[2].max(berenger_symbol_identity(&maxwell, tau, &xi, &sigma)?);
        worst[3] = worst[3].max(berenger_symbol_identity(&scalar, tau, &xi, &sigma)?);
        worst[4] = worst[4].max(spml_factorization_residual(tau, &xi, &sigma)?);
    }
    // co-vanishing: at every root of det R the doubled determinant vanishes
    let mut covanish = 0.0f64;
    for _ in 0..20 {
        let xi = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let sigma = [rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)];
        for tau in spml_roots(&xi, &sigma)? {
            let r = spml_symbol_det(tau, &xi, &sigma)?;
            let t2 = tau.norm_sqr();
            let r_scale = t2
                + xi.iter()
                    .zip(&sigma)
                    .map(|(x, s)| x * x * t2 / (tau + s).norm_sqr())
                    .sum::<f64>();
            let m = maxwell.doubled_symbol(tau, &xi, &sigma)?;
            let hadamard: f64 = m.row_iter().map(|row| row.norm().max(1e-300)).product();
            let d = m.lu().determinant();
            covanish = covanish.max(r.norm() / r_scale).max(d.norm() / hadamard);
        }
    }
    // unbounded imaginary part of the scalar-transport root: |Im τ| ~ √|ξ|
    let mut root_residual = 0.0f64;
    let mut growth = 0.0f64;
    for xi in [-10.0f64, -100.0, -1000.0] {
        for tau in scalar_transport_roots(xi) {
            let m = scalar.doubled_symbol(tau, &[xi, -xi], &[1.0, 0.0])?;
            let hadamard: f64 = m.row_iter().map(|row| row.norm()).product();
            root_residual = root_residual.max(m.lu().determinant().norm() / hadamard);
        }
        let im = scalar_transport_roots(xi)
            .iter()
            .map(|t| t.im.abs())
            .fold(0.0, f64::max);
        growth = growth.max((im / xi.abs().sqrt() - 1.0).abs());
    }
    let line = |name: &str, value: f64, tolerance: f64| SymbolLine {
        name: name.into(),
        value,
        tolerance,
    };
    Ok(vec![
        line("undoubled_maxwell_te", worst[0], 1e-10),
        line("undoubled_scalar_transport", worst[1], 1e-10),
        line("doubled_maxwell_te", worst[2], 1e-10),
        line("doubled_scalar_transport", worst[3], 1e-10),
        line("spml_det_r_maxwell_te", worst[4], 1e-10),
        line("spml_roots_covanish", covanish, 1e-10),
        line("scalar_transport_roots_covanish", root_residual, 1e-10),
        // relative deviation of max |Im τ| / √|ξ| from 1
        line("scalar_transport_root_growth", growth, 0.05),
    ])
}
