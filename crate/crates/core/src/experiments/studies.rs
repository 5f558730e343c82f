//! Reflection measurements against the asymptotic theory: how the
//! reflected amplitude scales with the absorption strength, and how it
//! compares with the leading-order reflection coefficient.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::analysis::smart_reflection_coefficient;
use crate::config::{Method, Region, SimConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::init::InitialCondition;
use crate::profile::{AbsorptionProfile, ProfileKind};
use crate::reference::{measure, reference_run_with, History, ReferenceOptions, ReferenceWalls, Window};
use crate::run::simulate;

/// Errors below this are indistinguishable from round-off.
pub const SATURATION_FLOOR: f64 = 1e-13;

/// Strip in which reflected waves are measured.
pub fn probe_strip() -> Region {
    Region {
        x_min: 4.5,
        x_max: 5.5,
        y_min: 0.0,
        y_max: 10.0,
    }
}

fn shared_reference(cfg: &SimConfig, exec: Exec) -> Result<History> {
    let opts = ReferenceOptions {
        walls: ReferenceWalls::Shared,
        exec,
        ..ReferenceOptions::default()
    };
    reference_run_with(cfg, &opts)
}

/// First level at which the east-going half of a bump has entirely crossed
/// into the layer.
pub fn entry_step(cfg: &SimConfig) -> Result<usize> {
    let InitialCondition::ModulatedBump { center, radius, direction, .. } = cfg.init else {
        return Err(Error::config("init", "needs a modulated bump with a direction"));
    };
    let vx = direction[0] / direction[0].hypot(direction[1]);
    if !(vx > 0.0) {
        return Err(Error::config("init.direction", "packet must move toward the layer"));
    }
    let t = (cfg.layer.start - (center[0] - radius)) / vx;
    Ok((t / cfg.grid().dt).ceil() as usize)
}

/// `max |Hz − Hz_ref|` over the nodes of `strip` and the levels from `from` on.
pub fn probe_error(
    cfg: &SimConfig,
    reference: &History,
    strip: &Region,
    from: usize,
    exec: Exec,
) -> Result<f64> {
    let grid = cfg.grid();
    let window = Window::new(&grid, &cfg.interest)?;
    window.lattice(grid.n_steps + 1).check_same(reference.lattice())?;
    let lat = reference.lattice();
    let cols: Vec<usize> = (0..lat.ni)
        .filter(|&i| {
            let x = lat.x0 + i as f64 * lat.dx;
            x > strip.x_min && x < strip.x_max
        })
        .collect();
    let rows: Vec<usize> = (0..lat.nj)
        .filter(|&j| {
            let y = lat.y0 + j as f64 * lat.dy;
            y > strip.y_min && y < strip.y_max
        })
        .collect();
    if cols.is_empty() || rows.is_empty() {
        return Err(Error::config("strip", "contains no sampled nodes"));
    }
    let mut worst = 0.0f64;
    simulate(cfg, exec, |n, s| {
        if n < from {
            return Ok(());
        }
        let frame = reference.frame(n).expect("lattice checked");
        for &i in &cols {
            let row = s.hz.row(window.i0 + i);
            for &j in &rows {
                worst = worst.max((row[window.j0 + j] - frame[i * lat.nj + j]).abs());
            }
        }
        Ok(())
    })?;
    Ok(worst)
}

/// Study configuration: 45° `k = 10` bump, constant `σ = 2`, refinement 1.
pub fn mu_scaling_config() -> SimConfig {
    let mut cfg = SimConfig::baseline(Method::Smart).with_refinement(1);
    cfg.init = InitialCondition::bump(10.0, [1.0, 1.0]);
    cfg
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuPoint {
    pub method: Method,
    pub mu: f64,
    pub reflected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub method: Method,
    /// Least-squares slope of `ln(reflected)` against `ln μ`.
    pub slope: Option<f64>,
    /// Some positive `μ` gave a reflection below [`SATURATION_FLOOR`].
    pub saturated: bool,
    pub points_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuScaling {
    pub points: Vec<MuPoint>,
    pub fits: Vec<SlopeFit>,
}

impl MuScaling {
    pub fn slope(&self, method: Method) -> Option<f64> {
        self.fits.iter().find(|f| f.method == method).and_then(|f| f.slope)
    }
}

/// Least-squares slope through `(x, y)` pairs.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Reflected amplitude in the probe strip after layer entry, for every
/// method and `μ`, with a log-log slope per method. `μ = 0` is measured but
/// left out of the fit.
pub fn mu_scaling_study(
    cfg: &SimConfig,
    mu_values: &[f64],
    methods: &[Method],
    exec: Exec,
) -> Result<MuScaling> {
    cfg.validate()?;
    if mu_values.iter().any(|&m| !(m >= 0.0 && m.is_finite())) {
        return Err(Error::config("mu", "values must be finite and >= 0"));
    }
    let positive: Vec<f64> = mu_values.iter().copied().filter(|&m| m > 0.0).collect();
    if positive.len() < 4 {
        return Err(Error::config("mu", "need at least 4 positive values"));
    }
    let (lo, hi) = positive
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &m| (a.min(m), b.max(m)));
    if hi / lo < 8.0 {
        return Err(Error::config(
            "mu",
            format!("values must span a factor of at least 8, got {:.3}", hi / lo),
        ));
    }
    if methods.is_empty() || methods.iter().any(|&m| m != Method::Smart && !m.is_hml()) {
        return Err(Error::config("methods", "only smart and HML methods scale with mu"));
    }
    let reference = shared_reference(cfg, exec)?;
    let from = entry_step(cfg)?;
    let strip = probe_strip();
    let mut points = Vec::new();
    for &method in methods {
        for &mu in mu_values {
            let mut c = cfg.with_method(method);
            c.mu = mu;
            let reflected = probe_error(&c, &reference, &strip, from, exec)?;
            points.push(MuPoint { method, mu, reflected });
        }
    }
    let fits = methods
        .iter()
        .map(|&method| {
            let mine: Vec<&MuPoint> = points
                .iter()
                .filter(|p| p.method == method && p.mu > 0.0)
                .collect();
            let saturated = mine.iter().any(|p| p.reflected < SATURATION_FLOOR);
            let usable: Vec<(f64, f64)> = mine
                .iter()
                .filter(|p| p.reflected >= SATURATION_FLOOR)
                .map(|p| (p.mu.ln(), p.reflected.ln()))
                .collect();
            SlopeFit {
                method,
                slope: fit_slope(&usable),
                saturated,
                points_used: usable.len(),
            }
        })
        .collect();
    Ok(MuScaling { points, fits })
}

/// Dominant wave vector of a packet sampled on a lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Carrier {
    /// Wave vector with nonnegative first component.
    pub xi: [f64; 2],
    /// `|ξ|`, the frequency on the light cone.
    pub tau: f64,
    /// Power-weighted spread of the spectrum around `ξ`, relative to `|ξ|`.
    pub bandwidth: f64,
}

/// Packets whose relative spectral spread exceeds this are refused.
pub const MAX_BANDWIDTH: f64 = 0.5;

/// Peak of the power spectrum over the half plane `ξ₁ > 0`, from a
/// zero-padded 2-D FFT of `values` (`ni` rows along x, `nj` along y).
pub fn estimate_carrier(values: &[f64], ni: usize, nj: usize, dx: f64, dy: f64) -> Result<Carrier> {
    if values.len() != ni * nj || ni < 2 || nj < 2 {
        return Err(Error::Estimation("carrier estimation needs a full 2-D frame".into()));
    }
    let (pi, pj) = ((4 * ni).next_power_of_two(), (4 * nj).next_power_of_two());
    let mut buf = vec![C64::new(0.0, 0.0); pi * pj];
    for i in 0..ni {
        for j in 0..nj {
            buf[i * pj + j] = C64::new(values[i * nj + j], 0.0);
        }
    }
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(pj);
    for row in buf.chunks_mut(pj) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(pi);
    let mut col = vec![C64::new(0.0, 0.0); pi];
    for j in 0..pj {
        for i in 0..pi {
            col[i] = buf[i * pj + j];
        }
        col_fft.process(&mut col);
        for i in 0..pi {
            buf[i * pj + j] = col[i];
        }
    }
    let wave = |p: usize, n: usize, h: f64| {
        let s = if p < n / 2 { p as f64 } else { p as f64 - n as f64 };
        2.0 * PI * s / (n as f64 * h)
    };
    let mut bins = Vec::new();
    for i in 1..pi / 2 {
        let kx = wave(i, pi, dx);
        for j in 0..pj {
            bins.push((kx, wave(j, pj, dy), buf[i * pj + j].norm_sqr()));
        }
    }
    let total: f64 = bins.iter().map(|b| b.2).sum();
    let &(kx, ky, peak) = bins
        .iter()
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .ok_or_else(|| Error::Estimation("empty spectrum".into()))?;
    if !(peak > 0.0) || !total.is_finite() {
        return Err(Error::Estimation("packet has no oscillating content".into()));
    }
    let tau = kx.hypot(ky);
    let spread = (bins
        .iter()
        .map(|b| b.2 * ((b.0 - kx).powi(2) + (b.1 - ky).powi(2)))
        .sum::<f64>()
        / total)
        .sqrt();
    let bandwidth = spread / tau;
    if bandwidth > MAX_BANDWIDTH {
        return Err(Error::Estimation(format!(
            "packet is broadband: spectral spread {spread:.3} is {bandwidth:.2} of the carrier {tau:.3}, limit {MAX_BANDWIDTH}"
        )));
    }
    Ok(Carrier {
        xi: [kx, ky],
        tau,
        bandwidth,
    })
}

/// Outcome of the reflection-coefficient comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReflectionCheck {
    pub carrier: Carrier,
    pub incident_amplitude: f64,
    /// Reflected over incident amplitude at the configured incidence.
    pub measured: f64,
    /// `σ·|R(τ, ξ)|`.
    pub predicted: f64,
    pub ratio: f64,
    /// Reflected over incident amplitude for the same packet at normal incidence.
    pub measured_normal: f64,
    pub normal_over_oblique: f64,
    /// Smart-layer table errors at refinement 1, normal incidence.
    pub cubic_error: f64,
    pub constant_error: f64,
    pub cubic_over_constant: f64,
}

fn reflected_ratio(cfg: &SimConfig, exec: Exec) -> Result<(f64, f64, History)> {
    let reference = shared_reference(cfg, exec)?;
    let lat = reference.lattice().clone();
    // both halves are separated once t exceeds the radius
    let radius = cfg.init.support_radius();
    let n_sep = ((1.5 * radius / lat.dt).ceil() as usize).min(reference.len() - 1);
    let amplitude = reference
        .frame(n_sep)
        .expect("in range")
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let reflected = probe_error(cfg, &reference, &probe_strip(), entry_step(cfg)?, exec)?;
    Ok((reflected / amplitude, amplitude, reference))
}

/// Measures the smart layer's reflection of a narrow-band packet and
/// compares it with `σ·|R|` at the packet's carrier.
pub fn reflection_vs_formula(cfg: &SimConfig, exec: Exec) -> Result<ReflectionCheck> {
    cfg.validate()?;
    if cfg.method != Method::Smart {
        return Err(Error::config("method", "the reflection formula is for the smart layer"));
    }
    let ProfileKind::Constant { value: jump } = cfg.layer.kind else {
        return Err(Error::config("layer", "needs a constant (discontinuous) absorption"));
    };
    let InitialCondition::ModulatedBump { center, radius, k, envelope, .. } = cfg.init else {
        return Err(Error::config("init", "needs a modulated bump"));
    };
    let (measured, incident_amplitude, reference) = reflected_ratio(cfg, exec)?;
    let lat = reference.lattice();
    // carrier at first contact with the layer
    let contact = {
        let d = match cfg.init {
            InitialCondition::ModulatedBump { direction, .. } => direction,
            _ => unreachable!(),
        };
        let vx = d[0] / d[0].hypot(d[1]);
        let t = (cfg.layer.start - center[0] - radius).max(0.0) / vx;
        ((t / lat.dt).floor() as usize).min(reference.len() - 1)
    };
    let carrier = estimate_carrier(
        reference.frame(contact).expect("in range"),
        lat.ni,
        lat.nj,
        lat.dx,
        lat.dy,
    )?;
    let r = smart_reflection_coefficient(carrier.tau, &carrier.xi, cfg.mu, cfg.nu)?;
    let predicted = jump * r.norm();

    let mut normal = cfg.clone();
    normal.init = InitialCondition::ModulatedBump {
        center,
        radius,
        k,
        direction: [1.0, 0.0],
        envelope,
    };
    let (measured_normal, _, _) = reflected_ratio(&normal, exec)?;

    let table_error = |layer: AbsorptionProfile| -> Result<f64> {
        let mut c = normal.with_refinement(1);
        c.layer = layer;
        let h = shared_reference(&c, exec)?;
        Ok(measure(&c, &h, exec, None)?.report.linf_error)
    };
    let constant_error = table_error(cfg.layer)?;
    let cubic_error = table_error(AbsorptionProfile::cubic(0.125, cfg.layer.start, cfg.layer.end))?;

    Ok(ReflectionCheck {
        carrier,
        incident_amplitude,
        measured,
        predicted,
        ratio: measured / predicted,
        measured_normal,
        normal_over_oblique: measured_normal / measured,
        cubic_error,
        constant_error,
        cubic_over_constant: cubic_error / constant_error,
    })
}

/// Default comparison: 45° `k = 10` bump, constant `σ = 2`, refinement 2.
pub fn reflection_config() -> SimConfig {
    let mut cfg = SimConfig::baseline(Method::Smart).with_refinement(2);
    cfg.init = InitialCondition::bump(10.0, [1.0, 1.0]);
    cfg
}
