// Temporary debugging harness; removed before release.
use krflow_core::background::Background;
use krflow_core::flow::{step, FlowConfig, FlowState};
use krflow_core::geometry::{self, StencilOrder};
use krflow_core::grid::Grid;
use krflow_core::model::ModelDescriptor;
use krflow_core::profile::Profile;
use krflow_core::soliton;

fn main() {
    // (b) f0 generic mismatch
    for m in [
        ModelDescriptor::cp1(),
        ModelDescriptor::cpn_radial(3).unwrap(),
        ModelDescriptor::hirzebruch1(),
    ] {
        let g = Grid::uniform(-18.0, 18.0, 256).unwrap();
        let bg = Background::new(m.clone(), g.clone());
        let nn = m.dim_n as f64;
        let generic: Vec<f64> = g
            .nodes
            .iter()
            .map(|&x| (m.ma_weight(m.u0_p(x)) * m.u0_pp(x)).ln() - nn * x + m.u0(x))
            .collect();
        let delta0 = generic[0] - bg.f0[0];
        let mut worst = (0.0_f64, 0.0_f64);
        for i in 0..g.num_points {
            let d = (generic[i] - bg.f0[i] - delta0).abs();
            if d > worst.0 {
                worst = (d, g.nodes[i]);
            }
        }
        println!("{:?}: f0 generic worst dev {:e} at x = {}", m.kind, worst.0, worst.1);
    }

    // (a) stepper order mystery
    let bgr = Background::new(ModelDescriptor::cp1(), Grid::uniform(-14.0, 14.0, 256).unwrap());
    let prof = Profile::bump(bgr.clone(), 0.3, 0.0, 2.0);
    let state = FlowState { t: 0.0, prof, dt_last: 0.0 };
    let cfg = FlowConfig { err_tol: 1.0, ..FlowConfig::default() };
    let advance = |dt: f64, steps: usize| -> (Vec<f64>, f64) {
        let mut s = state.clone();
        for _ in 0..steps {
            s = step(&s, dt, &cfg).unwrap();
        }
        (s.prof.phi.clone(), s.t)
    };
    let dt = 2e-3;
    let (full, t1) = advance(dt, 2);
    let (half, t2) = advance(dt / 2.0, 4);
    let (quarter, t3) = advance(dt / 4.0, 8);
    println!("times {t1} {t2} {t3}");
    let d1: f64 = full.iter().zip(&half).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let d2: f64 = half.iter().zip(&quarter).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("richardson d1 {d1:e} d2 {d2:e} order {}", (d1 / d2).log2());
    let delta0: f64 = full
        .iter()
        .zip(&state.prof.phi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("motion over two steps: {delta0:e}");

    // (c) soliton 4th-order residual
    let m = ModelDescriptor::hirzebruch1();
    let grid = Grid::uniform(-20.0, 20.0, 2048).unwrap();
    let sol = soliton::find_soliton(&m, &grid, (-0.9, -0.2), 1e-12).unwrap();
    println!("lambda* {}  mismatch {:e}", sol.lambda_star, sol.mismatch);
    let prof = &sol.profile;
    let bg = &prof.bg;
    let (up, upp) = geometry::u_derivs(prof, StencilOrder::Fourth);
    let u = prof.u_values();
    let lambda = bg.model.field_coeff;
    let mut rs = Vec::new();
    for i in 0..u.len() {
        let r = (bg.model.ma_weight(up[i]) * upp[i]).ln()
            - (2.0 * bg.grid.nodes[i] - u[i] - lambda * up[i]);
        rs.push(r);
    }
    for &i in &[0usize, 1, 2, 5, 100, 512, 1024, 1536, 2040, 2045, 2046, 2047] {
        println!("  r[{i}] (x={}) = {:e}", bg.grid.nodes[i], rs[i]);
    }

    // (d) hamiltonian normalization with 4th-order stencils
    for (npts, order) in [
        (512usize, StencilOrder::Second),
        (512, StencilOrder::Fourth),
        (1024, StencilOrder::Fourth),
        (2048, StencilOrder::Fourth),
    ] {
        let bgr = Background::new(
            ModelDescriptor::hirzebruch1(),
            Grid::uniform(-20.0, 20.0, npts).unwrap(),
        );
        let prof = Profile::random_modes(bgr.clone(), 3, 0.3);
        let theta = krflow_core::potentials::hamiltonian(&prof, order).unwrap();
        let rho = geometry::ma_density(&prof, order).unwrap();
        let integrand: Vec<f64> = (0..theta.len())
            .map(|i| theta[i].exp() * rho[i] * bgr.w0[i])
            .collect();
        let integral = bgr.model.angular_volume * bgr.grid.trapezoid(&integrand);
        println!(
            "theta propagation N={npts} {order:?}: rel dev {:e}",
            integral / bgr.model.volume() - 1.0
        );
    }
}
