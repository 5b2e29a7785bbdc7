//! Evaluation of the trigonometric polynomials built from dual vectors:
//! `Q(xi) = sum_n q_n e^{-j 2 pi n xi}`, pointwise and on uniform grids.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Pointwise evaluation by Horner in `w = e^{-j 2 pi xi}`.
pub(crate) fn eval(q: &[Complex64], xi: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, -2.0 * PI * xi);
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in q.iter().rev() {
        acc = acc * w + c;
    }
    acc
}

/// Frequency of grid node `g` on a `grid`-point uniform grid over
/// [-1/2, 1/2).
pub(crate) fn grid_xi(g: usize, grid: usize) -> f64 {
    -0.5 + g as f64 / grid as f64
}

/// `|Q|` on the uniform grid, via one zero-padded FFT:
/// `Q(xi_g) = sum_n q_n (-1)^n e^{-j 2 pi n g / G}`.
pub(crate) fn abs_grid(q: &[Complex64], grid: usize) -> Vec<f64> {
    assert!(grid >= q.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    for (n, &c) in q.iter().enumerate() {
        buf[n] = if n % 2 == 0 { c } else { -c };
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(grid).process(&mut buf);
    buf.into_iter().map(|z| z.norm()).collect()
}

/// Maximize `|Q|` over `[lo, hi]` by golden-section search; returns
/// `(xi, |Q(xi)|)`. The interval is expected to bracket a single local
/// maximum (one grid cell plus margins).
pub(crate) fn refine_abs_peak(q: &[Complex64], lo: f64, hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let f = |xi: f64| eval(q, xi).norm_sqr();
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..64 {
        if b - a < 1e-10 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let xi = 0.5 * (a + b);
    (xi, eval(q, xi).norm())
}

/// Global maximum of `|Q|`: grid scan plus local refinement around the
/// best node. Returns `(xi, |Q(xi)|)`.
pub(crate) fn global_abs_max(q: &[Complex64], grid: usize) -> (f64, f64) {
    let vals = abs_grid(q, grid);
    let (g0, &v0) = vals
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .expect("non-empty grid");
    let step = 1.0 / grid as f64;
    let xi0 = grid_xi(g0, grid);
    let (xi, v) = refine_abs_peak(q, xi0 - step, xi0 + step);
    if v >= v0 {
        (xi, v)
    } else {
        (xi0, v0)
    }
}
