use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::field::Aux;
use crate::profile::AbsorptionProfile;

fn small_grid() -> YeeGrid {
    YeeGrid::new(0.0, 3.0, 0.0, 2.0, 30, 20, 0.07, 100).unwrap()
}

fn random_state(grid: &YeeGrid, seed: u64) -> FieldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = FieldState::zeros(grid);
    for f in [&mut s.ex, &mut s.ey, &mut s.hz] {
        f.as_mut_slice()
            .iter_mut()
            .for_each(|v| *v = rng.gen_range(-1.0..1.0));
    }
    s
}

fn layered_ctx(grid: &YeeGrid, nu: f64) -> StepContext {
    StepContext::new(grid, &AbsorptionProfile::constant(2.0, 1.8, 3.0), nu, 1.0)
}

#[test]
fn zero_state_stays_zero() {
    let g = small_grid();
    let ctx = layered_ctx(&g, 0.3);
    for m in [
        Method::Maxwell,
        Method::Berenger,
        Method::Smart,
        Method::Spml,
    ] {
        let mut s = prepare_state(FieldState::zeros(&g), m);
        for _ in 0..5 {
            step(m, &mut s, &ctx).unwrap();
        }
        assert_eq!(s.max_abs(), 0.0, "{m}");
    }
}

#[test]
fn constant_magnetic_field_is_steady_on_a_periodic_grid() {
    let g = small_grid();
    let ctx = StepContext::free(&g).with_boundaries(Boundaries::Periodic);
    let mut s = FieldState::with_hz(&g, |_, _| 0.75);
    for _ in 0..10 {
        step_maxwell(&mut s, &ctx).unwrap();
    }
    assert_eq!(s.ex.max_abs(), 0.0);
    assert_eq!(s.ey.max_abs(), 0.0);
    assert!(s.hz.as_slice().iter().all(|&v| v == 0.75));
}

/// Least-squares fit of the temporal frequency of a single discrete mode:
/// h_{n+1} + h_{n-1} = 2 cos(ω Δt) h_n for every n.
fn fitted_frequency(samples: &[f64], dt: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for n in 1..samples.len() - 1 {
        num += samples[n] * (samples[n + 1] + samples[n - 1]);
        den += 2.0 * samples[n] * samples[n];
    }
    (num / den).acos() / dt
}

#[test]
fn plane_wave_obeys_the_discrete_dispersion_relation() {
    let g = YeeGrid::new(0.0, 4.0, 0.0, 3.0, 40, 30, 0.0702, 50).unwrap();
    let ctx = StepContext::free(&g).with_boundaries(Boundaries::Periodic);
    let two_pi = 2.0 * std::f64::consts::PI;
    for (mx, my) in [(1, 0), (3, 2), (7, 5)] {
        let kx = two_pi * mx as f64 / 4.0;
        let ky = two_pi * my as f64 / 3.0;
        let mut s = FieldState::with_hz(&g, |x, y| (kx * x + ky * y).cos());
        let mut samples = vec![s.hz.get(5, 7)];
        for _ in 0..50 {
            step_maxwell(&mut s, &ctx).unwrap();
            samples.push(s.hz.get(5, 7));
        }
        let omega = fitted_frequency(&samples, g.dt);
        let lhs = (omega * g.dt / 2.0).sin().powi(2) / (g.dt * g.dt);
        let rhs = (kx * g.dx / 2.0).sin().powi(2) / (g.dx * g.dx)
            + (ky * g.dy / 2.0).sin().powi(2) / (g.dy * g.dy);
        assert!(
            (lhs - rhs).abs() <= 1e-9 * rhs,
            "mode ({mx},{my}): {lhs} vs {rhs}"
        );
    }
}

#[test]
fn absorption_free_steppers_match_maxwell() {
    let g = small_grid();
    let ctx = StepContext::free(&g).with_mu(1.0);
    let base = random_state(&g, 1);

    let mut reference = base.clone();
    let mut berenger = base.clone().into_split();
    let mut smart = base.clone();
    let mut spml = base.clone().into_spml();
    for _ in 0..100 {
        step_maxwell(&mut reference, &ctx).unwrap();
        step_berenger(&mut berenger, &ctx).unwrap();
        step_smart(&mut smart, &ctx).unwrap();
        step_spml(&mut spml, &ctx).unwrap();
    }
    assert!(berenger.max_abs_diff(&reference) <= 1e-12);
    assert!(smart.max_abs_diff(&reference) <= 1e-12);
    assert!(spml.max_abs_diff(&reference) <= 1e-12);
}

#[test]
fn one_berenger_step_without_absorption_is_a_maxwell_step() {
    let g = small_grid();
    let ctx = StepContext::free(&g);
    let base = random_state(&g, 2);
    let mut a = base.clone();
    step_maxwell(&mut a, &ctx).unwrap();
    let mut b = base.into_split();
    step_berenger(&mut b, &ctx).unwrap();
    assert!(a.max_abs_diff(&b) <= 1e-15);
    let Aux::Split { hzx, hzy } = &b.aux else {
        panic!()
    };
    for k in 0..g.nx * g.ny {
        let sum = hzx.as_slice()[k] + hzy.as_slice()[k];
        assert!((sum - b.hz.as_slice()[k]).abs() <= 1e-15);
    }
}

#[test]
fn berenger_split_field_decays_at_the_semi_implicit_rate() {
    let g = small_grid();
    let layer = AbsorptionProfile::cubic(0.7, 0.5, 3.0);
    let ctx = StepContext::new(&g, &layer, 0.0, 1.0);
    let mut s = FieldState::with_hz(&g, |_, _| 1.0).into_split();
    if let Aux::Split { hzx, hzy } = &mut s.aux {
        hzx.fill(1.0);
        hzy.fill(0.0);
    }
    step_berenger(&mut s, &ctx).unwrap();
    let Aux::Split { hzx, .. } = &s.aux else {
        panic!()
    };
    for i in 0..g.nx - 1 {
        let b = ctx.sigma_at_half[i] * g.dt / 2.0;
        let expected = (1.0 - b) / (1.0 + b);
        for j in 0..g.ny {
            assert!((hzx.get(i, j) - expected).abs() <= 1e-15, "column {i}");
        }
    }
    assert_eq!(
        s.ey.row(g.nx / 2)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs())),
        0.0
    );
}

/// Reference integration of the y- and x-uniform smart-layer system
/// d/dt (Ey, Hz) = −σ/2 [[1+ν, 1−ν], [1−ν, 1+ν]] (Ey, Hz) by classical RK4.
fn smart_ode(sigma: f64, nu: f64, y0: [f64; 2], t0: f64, t1: f64) -> [f64; 2] {
    let rhs = |y: [f64; 2]| {
        [
            -0.5 * sigma * ((1.0 + nu) * y[0] + (1.0 - nu) * y[1]),
            -0.5 * sigma * ((1.0 - nu) * y[0] + (1.0 + nu) * y[1]),
        ]
    };
    let n = 20_000;
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for _ in 0..n {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for c in 0..2 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    y
}

#[test]
fn smart_absorption_of_the_outgoing_characteristic_is_second_order() {
    let sigma = 1.5;
    let t_end = 0.6;
    let mut errors = Vec::new();
    for level in 0..3 {
        let n = 10 << level;
        let g = YeeGrid::new(
            0.0,
            8.0,
            0.0,
            2.0,
            80 << level,
            20 << level,
            t_end / n as f64,
            n,
        )
        .unwrap();
        let layer = AbsorptionProfile::constant(sigma, -1.0, 9.0);
        let ctx = StepContext::new(&g, &layer, 0.0, 1.0);
        // Ey at t = 0 and Hz at t = Δt/2 on the continuous trajectory.
        let hz_half = smart_ode(sigma, 0.0, [1.0, 1.0], 0.0, 0.5 * g.dt)[1];
        let mut s = FieldState::with_hz(&g, |_, _| hz_half);
        s.ey.fill(1.0);
        for _ in 0..n {
            step_smart(&mut s, &ctx).unwrap();
        }
        let exact = smart_ode(sigma, 0.0, [1.0, 1.0], 0.0, t_end);
        let mid = g.nx / 2;
        errors.push((s.ey.get(mid, g.ny / 2) - exact[0]).abs());
        // the characteristic Ey + Hz decays at rate σ
        assert!((exact[0] - (-sigma * t_end).exp()).abs() < 1e-12);
    }
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(
            order > 1.8 && order < 2.2,
            "observed order {order}, errors {errors:?}"
        );
    }
}

/// exp(t M) by a truncated power series.
fn expm2(m: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    let mut result = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = result;
    for k in 1..30 {
        let mut next = [[0.0; 2]; 2];
        for (r, row) in next.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = t / k as f64 * (term[r][0] * m[0][c] + term[r][1] * m[1][c]);
            }
        }
        term = next;
        for r in 0..2 {
            for c in 0..2 {
                result[r][c] += term[r][c];
            }
        }
    }
    result
}

#[test]
fn spml_auxiliary_pair_matches_the_matrix_exponential() {
    let g = small_grid();
    let sigma = 1.3;
    let layer = AbsorptionProfile::constant(sigma, -1.0, 4.0);
    let ctx = StepContext::new(&g, &layer, 0.0, 1.0);
    let (ex0, w0) = (0.8, -0.35);
    let mut s = FieldState::zeros(&g).into_spml();
    s.ex.fill(ex0);
    if let Aux::Spml { w } = &mut s.aux {
        w.fill(w0);
    }
    step_spml(&mut s, &ctx).unwrap();
    let e = expm2([[sigma, -sigma * sigma], [1.0, -sigma]], g.dt);
    let ex1 = e[0][0] * ex0 + e[0][1] * w0;
    let w1 = e[1][0] * ex0 + e[1][1] * w0;
    let Aux::Spml { w } = &s.aux else { panic!() };
    let (i, j) = (g.nx / 2, g.ny / 2);
    assert!(
        (s.ex.get(i, j) - ex1).abs() < g.dt.powi(3),
        "{} vs {ex1}",
        s.ex.get(i, j)
    );
    assert!((w.get(i, j) - w1).abs() < g.dt.powi(3));
}

#[test]
fn spml_without_absorption_integrates_w_from_ex() {
    let g = small_grid();
    let ctx = StepContext::free(&g);
    let base = random_state(&g, 5).into_spml();
    let mut s = base.clone();
    step_spml(&mut s, &ctx).unwrap();
    let Aux::Spml { w } = &s.aux else { panic!() };
    for i in 0..g.nx {
        for j in 0..=g.ny {
            let avg = 0.5 * (base.ex.get(i, j) + s.ex.get(i, j));
            assert!((w.get(i, j) - g.dt * avg).abs() < 1e-15);
        }
    }
}

#[test]
fn walls_are_imposed() {
    let g = small_grid();
    let ctx = layered_ctx(&g, 0.0);
    let mut s = random_state(&g, 3);
    step_smart(&mut s, &ctx).unwrap();
    assert_eq!(s.ey.row(0).iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
    for i in 0..g.nx {
        assert_eq!(s.ex.get(i, 0), 0.0);
        assert_eq!(s.ex.get(i, g.ny), 0.0);
    }
}

#[test]
fn east_wall_is_time_centred() {
    let g = small_grid();
    let ctx = layered_ctx(&g, 0.0);
    let mut s = random_state(&g, 4);
    let hz_before = s.hz.clone();
    step_maxwell(&mut s, &ctx).unwrap();
    for j in 0..g.ny {
        let centred = 0.5 * (hz_before.get(g.nx - 1, j) + s.hz.get(g.nx - 1, j));
        assert!((s.ey.get(g.nx, j) - centred).abs() < 1e-14);
    }

    let pec = ctx.with_boundaries(Boundaries::Walls(EastBoundary::Pec));
    step_maxwell(&mut s, &pec).unwrap();
    assert!(s.ey.row(g.nx).iter().all(|&v| v == 0.0));
}

#[test]
fn transparent_east_wall_does_not_amplify_rough_data() {
    let g = small_grid();
    let ctx = StepContext::free(&g);
    let mut s = random_state(&g, 5);
    let start = s.max_abs();
    for _ in 0..400 {
        step_maxwell(&mut s, &ctx).unwrap();
    }
    assert!(s.max_abs() < 10.0 * start, "{} vs {}", s.max_abs(), start);
}

#[test]
fn missing_aux_arrays_are_reported() {
    let g = small_grid();
    let ctx = layered_ctx(&g, 0.0);
    let mut s = FieldState::zeros(&g);
    assert!(matches!(
        step_berenger(&mut s, &ctx),
        Err(Error::MissingAux(_))
    ));
    assert!(matches!(step_spml(&mut s, &ctx), Err(Error::MissingAux(_))));
    let mut wrong = FieldState::zeros(&g.refine());
    assert!(matches!(
        step_maxwell(&mut wrong, &ctx),
        Err(Error::Shape { .. })
    ));
}

#[test]
fn pec_energy_is_conserved() {
    let g = YeeGrid::baseline(4.0);
    let ctx = StepContext::free(&g).with_boundaries(Boundaries::Walls(EastBoundary::Pec));
    let mut s = random_state(&g, 11);
    // start from admissible data: tangential E vanishes on the walls
    apply_state_boundaries(&mut s, &ctx);
    let mut prev = s.hz.clone();
    step_maxwell(&mut s, &ctx).unwrap();
    let e0 = discrete_energy(&s, &prev, &g);
    let mut worst = 0.0f64;
    for _ in 0..g.n_steps {
        prev.clone_from(&s.hz);
        step_maxwell(&mut s, &ctx).unwrap();
        let e = discrete_energy(&s, &prev, &g);
        worst = worst.max(((e - e0) / e0).abs());
    }
    assert!(worst < 1e-12, "relative drift {worst:e}");
}

#[test]
fn sequential_and_parallel_steps_agree_bitwise() {
    let g = small_grid();
    for m in [
        Method::Maxwell,
        Method::Berenger,
        Method::Smart,
        Method::Spml,
    ] {
        let base = prepare_state(random_state(&g, 9), m);
        let mut a = base.clone();
        let mut b = base;
        let seq = layered_ctx(&g, 0.2).with_exec(Exec::Sequential);
        let par = layered_ctx(&g, 0.2).with_exec(Exec::Parallel);
        for _ in 0..7 {
            step(m, &mut a, &seq).unwrap();
            step(m, &mut b, &par).unwrap();
        }
        assert_eq!(a, b, "{m}");
    }
}

mod linearity {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn every_stepper_is_linear(seed in 0u64..10_000, a in -3.0f64..3.0, b in -3.0f64..3.0, nu in 0.0f64..1.0) {
            let g = small_grid();
            let ctx = layered_ctx(&g, nu);
            for m in [Method::Maxwell, Method::Berenger, Method::Smart, Method::Spml] {
                let u = prepare_state(random_state(&g, seed), m);
                let v = prepare_state(random_state(&g, seed + 1), m);
                let mut combo = u.clone();
                combo.axpby(a, b, &v);
                let (mut su, mut sv) = (u, v);
                for _ in 0..3 {
                    step(m, &mut combo, &ctx).unwrap();
                    step(m, &mut su, &ctx).unwrap();
                    step(m, &mut sv, &ctx).unwrap();
                }
                su.axpby(a, b, &sv);
                let scale = su.max_abs().max(1.0);
                prop_assert!(combo.max_abs_diff(&su) <= 1e-13 * scale, "{}", m);
            }
        }
    }
}
