// Temporary debugging harness; removed before release.
use krflow_core::background::Background;
use krflow_core::grid::Grid;
use krflow_core::model::ModelDescriptor;
use krflow_core::numerics::tridiag_solve;
use krflow_core::profile::Profile;

fn flow_rhs(bg: &Background, phi: &[f64]) -> Result<Vec<f64>, String> {
    let n = phi.len();
    let h = bg.grid.h;
    let m = &bg.model;
    let (a, b) = m.moment_interval;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let (dp, ddp) = if i == 0 {
            (0.0, 2.0 * (phi[1] - phi[0]) / (h * h))
        } else if i == n - 1 {
            (0.0, 2.0 * (phi[n - 2] - phi[n - 1]) / (h * h))
        } else {
            (
                (phi[i + 1] - phi[i - 1]) / (2.0 * h),
                (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h),
            )
        };
        let up = bg.u0_p[i] + dp;
        let upp = bg.u0_pp[i] + ddp;
        if !(upp > 0.0) {
            return Err(format!("upp {upp:e} at i {i} x {}", bg.grid.nodes[i]));
        }
        if !(up > a && up < b) {
            return Err(format!("up {up} at i {i} x {}", bg.grid.nodes[i]));
        }
        out[i] = (m.ma_weight(up) * upp / bg.w0[i]).ln() + phi[i] + bg.f0[i];
    }
    Ok(out)
}

fn main() {
    let bg = Background::new(
        ModelDescriptor::cp1(),
        Grid::uniform(-14.0, 14.0, 256).unwrap(),
    );
    let prof = Profile::bump(bg.clone(), 0.3, 0.0, 2.0);
    let phi = prof.phi.clone();
    let n = phi.len();
    let h = bg.grid.h;
    let gamma = 1.707_106_781_186_547_5;
    for dt in [2e-3, 1e-3, 1e-4, 1e-5, 3e-6] {
        let rhs0 = flow_rhs(&bg, &phi).unwrap();
        // jacobian
        let mut jl = vec![0.0; n];
        let mut jd = vec![0.0; n];
        let mut ju = vec![0.0; n];
        for i in 0..n {
            let ddp = if i == 0 {
                2.0 * (phi[1] - phi[0]) / (h * h)
            } else if i == n - 1 {
                2.0 * (phi[n - 2] - phi[n - 1]) / (h * h)
            } else {
                (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h)
            };
            let upp = bg.u0_pp[i] + ddp;
            if i == 0 {
                jd[i] = -2.0 / (h * h * upp) + 1.0;
                ju[i] = 2.0 / (h * h * upp);
            } else if i == n - 1 {
                jd[i] = -2.0 / (h * h * upp) + 1.0;
                jl[i] = 2.0 / (h * h * upp);
            } else {
                jl[i] = 1.0 / (h * h * upp);
                jd[i] = -2.0 / (h * h * upp) + 1.0;
                ju[i] = 1.0 / (h * h * upp);
            }
        }
        let ml: Vec<f64> = jl.iter().map(|v| -gamma * dt * v).collect();
        let md: Vec<f64> = jd.iter().map(|v| 1.0 - gamma * dt * v).collect();
        let mu: Vec<f64> = ju.iter().map(|v| -gamma * dt * v).collect();
        let k1 = tridiag_solve(&ml, &md, &mu, &rhs0);
        let stage: Vec<f64> = (0..n).map(|i| phi[i] + dt * k1[i]).collect();
        match flow_rhs(&bg, &stage) {
            Err(e) => println!("dt {dt:e}: STAGE fails: {e}"),
            Ok(rhs1) => {
                let r2: Vec<f64> = (0..n).map(|i| rhs1[i] - 2.0 * k1[i]).collect();
                let k2 = tridiag_solve(&ml, &md, &mu, &r2);
                let out: Vec<f64> = (0..n)
                    .map(|i| phi[i] + dt * (1.5 * k1[i] + 0.5 * k2[i]))
                    .collect();
                match flow_rhs(&bg, &out) {
                    Err(e) => println!("dt {dt:e}: OUT fails: {e}"),
                    Ok(_) => {
                        let err = (0..n)
                            .map(|i| (0.5 * dt * (k1[i] + k2[i])).abs())
                            .fold(0.0_f64, f64::max);
                        println!("dt {dt:e}: ok, err {err:e}, k1 sup {:e}, k2 sup {:e}",
                            k1.iter().fold(0.0_f64, |m,v| m.max(v.abs())),
                            k2.iter().fold(0.0_f64, |m,v| m.max(v.abs())));
                    }
                }
            }
        }
    }
    // Where does the boundary sit initially?
    let rhs0 = flow_rhs(&bg, &phi).unwrap();
    println!("N at boundary: {:e} {:e}; interior N sup {:e}",
        rhs0[0], rhs0[n-1],
        rhs0.iter().fold(0.0_f64, |m,v| m.max(v.abs())));
    println!("u0_pp at boundary {:e}", bg.u0_pp[0]);
    let ddp0 = 2.0*(phi[1]-phi[0])/(h*h);
    println!("phi ddp reflection at boundary {:e}", ddp0);
}
