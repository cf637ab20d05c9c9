use std::f64::consts::PI;
use std::sync::Arc;

use slipflow::geometry::{MacGrid, Wall};
use slipflow::saddle::{
    dirichlet_energy, discrete_divergence, norms, solve_navier_stokes, solve_stokes, Gauge,
    PicardOptions, Region, SaddleProblem, StaggeredField,
};
use slipflow::Error;

fn channel(n: usize, top: Wall) -> Arc<MacGrid> {
    Arc::new(MacGrid::channel(4, n, 1.0 / n as f64, 0.0, 0.0).with_walls(Wall::NoSlip, top))
}

#[test]
fn zero_data_gives_zero_field() {
    let g = channel(16, Wall::NoSlip);
    let prob = SaddleProblem::new(g, 1.0).with_gauge(Gauge::Pin { i: 0, j: 0 });
    let (f, stats) = solve_stokes(&prob).unwrap();
    assert_eq!(f.max_abs_velocity(), 0.0);
    assert_eq!(stats.linear_residual, 0.0);
}

#[test]
fn missing_gauge_is_singular() {
    let g = channel(8, Wall::NoSlip);
    let prob = SaddleProblem::new(g, 1.0);
    assert!(matches!(solve_stokes(&prob), Err(Error::SingularSystem(_))));
}

#[test]
fn two_layer_strip_matches_piecewise_linear_profile() {
    // no-slip walls at y = 0 and 1, unit stress jump at y = 1/2:
    // u = -y/2 below, -(1-y)/2 above
    let g = channel(32, Wall::NoSlip);
    let prob = SaddleProblem::new(g.clone(), 1.0)
        .with_jump(16, 1.0)
        .with_gauge(Gauge::Pin { i: 0, j: 0 });
    let (f, stats) = solve_stokes(&prob).unwrap();
    assert!(stats.linear_residual <= 1e-10);
    for j in 0..32 {
        let y = (j as f64 + 0.5) / 32.0;
        let exact = if y < 0.5 { -0.5 * y } else { -0.5 * (1.0 - y) };
        for i in 0..4 {
            assert!((f.u_at(i, j) - exact).abs() <= 1e-8, "row {j}: {} vs {exact}", f.u_at(i, j));
        }
    }
    assert!(f.v.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn two_layer_strip_with_free_top_and_viscosity() {
    // [mu u'] = sigma with stress-free top: u = -sigma y / mu below, constant above
    let (mu, sigma) = (0.3, 0.7);
    let g = channel(40, Wall::FreeSlip);
    let prob = SaddleProblem::new(g, mu)
        .with_jump(10, sigma)
        .with_gauge(Gauge::Pin { i: 0, j: 0 });
    let (f, _) = solve_stokes(&prob).unwrap();
    for j in 0..40 {
        let y = (j as f64 + 0.5) / 40.0;
        let exact = -sigma / mu * y.min(0.25);
        assert!((f.u_at(1, j) - exact).abs() <= 1e-8);
    }
}

struct Manufactured {
    mu: f64,
}

impl Manufactured {
    fn y(&self, y: f64) -> [f64; 4] {
        let s = y * y * (1.0 - y) * (1.0 - y);
        let d1 = 2.0 * y - 6.0 * y * y + 4.0 * y * y * y;
        let d2 = 2.0 - 12.0 * y + 12.0 * y * y;
        let d3 = -12.0 + 24.0 * y;
        [s, d1, d2, d3]
    }
    fn u(&self, x: f64, y: f64) -> f64 {
        (2.0 * PI * x).sin() * self.y(y)[1]
    }
    fn v(&self, x: f64, y: f64) -> f64 {
        -2.0 * PI * (2.0 * PI * x).cos() * self.y(y)[0]
    }
    fn fu(&self, x: f64, y: f64) -> f64 {
        let [_, d1, _, d3] = self.y(y);
        -self.mu * (2.0 * PI * x).sin() * (d3 - 4.0 * PI * PI * d1)
            - 2.0 * PI * (2.0 * PI * x).sin() * (PI * y).cos()
    }
    fn fv(&self, x: f64, y: f64) -> f64 {
        let [s, _, d2, _] = self.y(y);
        2.0 * PI * self.mu * (2.0 * PI * x).cos() * (d2 - 4.0 * PI * PI * s)
            - PI * (2.0 * PI * x).cos() * (PI * y).sin()
    }
}

fn manufactured_error(n: usize) -> (f64, f64) {
    let m = Manufactured { mu: 1.0 };
    let g = Arc::new(MacGrid::channel(n, n, 1.0 / n as f64, 0.0, 0.0));
    let force = StaggeredField::from_fn(g.clone(), |x, y| m.fu(x, y), |x, y| m.fv(x, y), |_, _| 0.0);
    let prob = SaddleProblem::new(g.clone(), m.mu)
        .with_force_field(&force)
        .unwrap()
        .with_gauge(Gauge::Pin { i: 0, j: 0 });
    let (f, stats) = solve_stokes(&prob).unwrap();
    let exact = StaggeredField::from_fn(g, |x, y| m.u(x, y), |x, y| m.v(x, y), |_, _| 0.0);
    let err = f.axpy(-1.0, &exact).unwrap();
    (err.max_abs_velocity(), stats.linear_residual)
}

#[test]
fn manufactured_solution_converges() {
    let errs: Vec<(f64, f64)> = [16, 32, 64].iter().map(|&n| manufactured_error(n)).collect();
    for (_, res) in &errs {
        assert!(*res <= 1e-10);
    }
    for w in errs.windows(2) {
        let order = (w[0].0 / w[1].0).log2();
        assert!(order >= 1.0, "observed order {order} ({:?})", errs);
    }
}

#[test]
fn manufactured_divergence_residual_is_second_order() {
    let m = Manufactured { mu: 1.0 };
    let mut prev: Option<f64> = None;
    for n in [32, 64, 128] {
        let g = Arc::new(MacGrid::channel(n, n, 1.0 / n as f64, 0.0, 0.0));
        // sample without the wall zeroing: all faces active in a channel
        let f = StaggeredField::from_fn(g, |x, y| m.u(x, y), |x, y| m.v(x, y), |_, _| 0.0);
        let d = discrete_divergence(&f).iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if let Some(p) = prev {
            let order: f64 = (p / d).log2();
            assert!(order > 1.8 || d < 1e-12, "divergence order {order}");
        }
        prev = Some(d);
    }
}

#[test]
fn constant_field_is_divergence_free_and_has_area_norm() {
    let g = Arc::new(MacGrid::channel(8, 8, 0.125, 0.0, 0.0).with_walls(Wall::FreeSlip, Wall::FreeSlip));
    let f = StaggeredField::from_fn(g, |_, _| 1.0, |_, _| 0.0, |_, _| 0.0);
    assert!(discrete_divergence(&f).iter().all(|d| *d == 0.0));
    let nm = norms(&f, Region::Whole).unwrap();
    assert!((nm.l2 - 1.0).abs() < 1e-14);
    assert_eq!(nm.grad, 0.0);
    let z = StaggeredField::zeros(f.grid.clone());
    assert_eq!(dirichlet_energy(&z), 0.0);
}

#[test]
fn navier_stokes_zero_forcing_one_iteration() {
    let g = channel(16, Wall::NoSlip);
    let prob = SaddleProblem::new(g, 1.0)
        .with_convection(true)
        .with_gauge(Gauge::Pin { i: 0, j: 0 });
    let (f, stats) = solve_navier_stokes(&prob, &PicardOptions::default()).unwrap();
    assert_eq!(stats.picard_iterations, 1);
    assert_eq!(f.max_abs_velocity(), 0.0);
}

#[test]
fn region_tags_parse() {
    assert_eq!("omega1".parse::<Region>().unwrap(), Region::Fracture);
    assert_eq!("sigma".parse::<Region>().unwrap(), Region::Interface);
    assert!(matches!("gamma".parse::<Region>(), Err(Error::UnknownRegion(_))));
}
