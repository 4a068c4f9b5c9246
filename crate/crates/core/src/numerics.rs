//! Shared numerical kernels: quadrature, tridiagonal algebra, interpolation,
//! 1D minimization and least squares.

/// Composite Simpson rule with `panels` subintervals (doubled internally to
/// an even count).
pub fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    let m = 2 * panels.max(1);
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, f: F) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 28)
}

/// Solve a tridiagonal system in place (Thomas algorithm).  `lower[0]` and
/// `upper[n-1]` are ignored.  Panics on zero pivots; callers pass diagonally
/// dominant systems.
pub fn tridiag_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Symmetric tridiagonal matrix (diagonal + one off-diagonal band).
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>, // length n-1
}

impl SymTridiag {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    fn count_below(&self, x: f64) -> usize {
        let n = self.diag.len();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let off2 = self.off[i - 1] * self.off[i - 1];
            let denom = if q.abs() < 1e-300 { 1e-300_f64.copysign(q + 1e-300) } else { q };
            q = self.diag[i] - x - off2 / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The k smallest eigenvalues (ascending), by bisection on the Sturm
    /// count.
    pub fn smallest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let n = self.diag.len();
        // Gershgorin bounds.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (0..k.min(n))
            .map(|j| {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m == a || m == b {
                        break;
                    }
                    if self.count_below(m) > j {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }

    /// Eigenvector for an eigenvalue estimate, by shifted inverse iteration.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = eigenvalue + 1e-10 * (1.0 + eigenvalue.abs());
        let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n {
            lower[i] = self.off[i - 1];
        }
        for i in 0..n - 1 {
            upper[i] = self.off[i];
        }
        let mut v = vec![1.0; n];
        for (i, vi) in v.iter_mut().enumerate() {
            // deterministic non-degenerate start
            *vi = 1.0 + 0.3 * ((i as f64) * 0.7).sin();
        }
        for _ in 0..4 {
            let w = tridiag_solve(&lower, &diag, &upper, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = w.iter().map(|x| x / norm).collect();
        }
        v
    }
}

/// Cubic Lagrange interpolation of uniformly spaced samples at x = x0 + s,
/// clamping to the end values outside the grid (profiles are asymptotically
/// constant).
pub fn sample_shifted(values: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let n = values.len();
    let t = (x - x0) / h;
    if t <= 0.0 {
        return values[0];
    }
    if t >= (n - 1) as f64 {
        return values[n - 1];
    }
    let i = (t.floor() as usize).clamp(1, n.saturating_sub(3).max(1));
    let i = i.min(n - 3).max(1);
    let s = t - i as f64; // s in [0,1) for the window [i-1, i, i+1, i+2]
    let (f0, f1, f2, f3) = (values[i - 1], values[i], values[i + 1], values[i + 2]);
    // Lagrange basis on nodes -1, 0, 1, 2.
    let a = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let b = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let c = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let d = (s + 1.0) * s * (s - 1.0) / 6.0;
    a * f0 + b * f1 + c * f2 + d * f3
}

/// Golden-section minimization of a unimodal function on [a, b].
pub fn golden_min<F: Fn(f64) -> f64>(mut a: f64, mut b: f64, tol: f64, f: F) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}

/// Least-squares line y = slope·x + intercept with coefficient of
/// determination r².
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
        syy += (y - ym) * (y - ym);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_exact_on_cubics() {
        let v = simpson(0.0, 2.0, 16, |x| x * x * x - x);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn adaptive_simpson_hits_tolerance() {
        let v = adaptive_simpson(0.0, 1.0, 1e-12, |x| (10.0 * x).sin().exp());
        let reference = simpson(0.0, 1.0, 1 << 16, |x| (10.0 * x).sin().exp());
        assert_abs_diff_eq!(v, reference, epsilon = 1e-10);
    }

    #[test]
    fn tridiag_solves_poisson_row() {
        let n = 64;
        let lower = vec![-1.0; n];
        let upper = vec![-1.0; n];
        let diag = vec![2.5; n];
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).cos()).collect();
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = 2.5 * x_true[i];
            if i > 0 {
                rhs[i] -= x_true[i - 1];
            }
            if i + 1 < n {
                rhs[i] -= x_true[i + 1];
            }
        }
        let x = tridiag_solve(&lower, &diag, &upper, &rhs);
        for i in 0..n {
            assert_abs_diff_eq!(x[i], x_true[i], epsilon = 1e-11);
        }
    }

    #[test]
    fn sturm_eigenvalues_of_laplacian_stencil() {
        // -d²/dx² on (0,1), Dirichlet, n interior nodes: eigenvalues
        // (2 - 2cos(kπh))/h².
        let n = 200;
        let h = 1.0 / (n as f64 + 1.0);
        let m = SymTridiag {
            diag: vec![2.0 / (h * h); n],
            off: vec![-1.0 / (h * h); n - 1],
        };
        let eigs = m.smallest_eigenvalues(3);
        for (k, ev) in eigs.iter().enumerate() {
            let exact = (2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI * h).cos()) / (h * h);
            assert_abs_diff_eq!(*ev, exact, epsilon = 1e-6 * exact);
        }
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let h = 0.1;
        let vals: Vec<f64> = (0..50).map(|i| {
            let x = i as f64 * h;
            x * x * x - 2.0 * x + 1.0
        }).collect();
        let x = 2.3456;
        let exact = x * x * x - 2.0 * x + 1.0;
        assert_abs_diff_eq!(sample_shifted(&vals, 0.0, h, x), exact, epsilon = 1e-12);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, _) = golden_min(-2.0, 3.0, 1e-12, |x| (x - 0.7) * (x - 0.7) + 1.0);
        assert_abs_diff_eq!(x, 0.7, epsilon = 1e-9);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -1.7 * x + 0.3).collect();
        let (m, b, r2) = linear_fit(&xs, &ys);
        assert_abs_diff_eq!(m, -1.7, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.3, epsilon = 1e-11);
        assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-12);
    }
}
