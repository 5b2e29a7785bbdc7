//! Spectrum quantization: read atom locations off the dual polynomial,
//! fit their coefficients by constrained l1 minimization over the active
//! atoms, extrapolate the future window. This is the blind predictor:
//! it never sees the true spectral model.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use crate::atomic::{solve_atomic, AtomicSolution, SolveOptions};
use crate::poly;
use crate::spectrum::wrap_frequency;
use crate::Result;

/// Localization threshold: peaks with `|Q| >= 1 - delta` are kept.
pub const LOCALIZE_DELTA: f64 = 1e-2;

/// Recovered discrete spectral measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedSpectrum {
    /// Strictly increasing frequencies in [-1/2, 1/2).
    pub freqs: Vec<f64>,
    /// Complex coefficient per frequency.
    pub coefs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoefJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    freqs: Vec<f64>,
    coefs: Vec<CoefJson>,
}

impl QuantizedSpectrum {
    pub fn empty() -> Self {
        Self {
            freqs: vec![],
            coefs: vec![],
        }
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = SpectrumJson {
            freqs: self.freqs.clone(),
            coefs: self.coefs.iter().map(|c| CoefJson { re: c.re, im: c.im }).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("spectrum serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpectrumJson = serde_json::from_str(text)?;
        if doc.freqs.len() != doc.coefs.len() {
            return Err(crate::Error::Format(
                "freqs and coefs length mismatch".into(),
            ));
        }
        Ok(Self {
            freqs: doc.freqs,
            coefs: doc.coefs.iter().map(|c| Complex64::new(c.re, c.im)).collect(),
        })
    }
}

/// Dual polynomial `Q(xi) = sum_n q_n e^{-j 2 pi n xi}` at one point.
pub fn dual_polynomial(q: &[Complex64], xi: f64) -> Complex64 {
    poly::eval(q, xi)
}

/// `|Q|` on a uniform grid over [-1/2, 1/2); node `g` sits at
/// `-1/2 + g/grid_size`.
pub fn dual_polynomial_abs_grid(q: &[Complex64], grid_size: usize) -> Vec<f64> {
    poly::abs_grid(q, grid_size)
}

/// Export the dual-polynomial trace as CSV rows `xi,abs_q`.
pub fn write_dual_trace_csv<W: Write>(q: &[Complex64], grid_size: usize, mut out: W) -> Result<()> {
    let vals = poly::abs_grid(q, grid_size);
    writeln!(out, "xi,abs_q")?;
    for (g, v) in vals.iter().enumerate() {
        writeln!(out, "{},{}", poly::grid_xi(g, grid_size), v)?;
    }
    Ok(())
}

/// Circular distance between two frequencies on the unit torus.
fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Frequencies where the dual polynomial touches the unit circle: local
/// maxima of `|Q|` on the grid with `|Q| >= 1 - delta`, each refined to
/// the exact local maximizer, then merged within radius `1/(4N)`
/// keeping the larger peak. An empty result is valid and means a zero
/// prediction downstream.
pub fn localize(q: &[Complex64], n: usize, delta: f64, grid_size: usize) -> Vec<f64> {
    let vals = poly::abs_grid(q, grid_size);
    let g = grid_size;
    let mut peaks: Vec<(f64, f64)> = Vec::new(); // (xi, |Q|)
    for i in 0..g {
        let prev = vals[(i + g - 1) % g];
        let next = vals[(i + 1) % g];
        if vals[i] >= prev && vals[i] > next && vals[i] >= 1.0 - delta {
            let xi0 = poly::grid_xi(i, g);
            let step = 1.0 / g as f64;
            let (xi, v) = poly::refine_abs_peak(q, xi0 - step, xi0 + step);
            if v >= 1.0 - delta {
                peaks.push((wrap_frequency(xi), v));
            }
        }
    }
    // merge: keep the larger peak inside each merge radius
    peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let radius = 1.0 / (4.0 * n as f64);
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for (xi, v) in peaks {
        if kept.iter().all(|&(k, _)| circular_distance(xi, k) >= radius) {
            kept.push((xi, v));
        }
    }
    let mut freqs: Vec<f64> = kept.into_iter().map(|(xi, _)| xi).collect();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    freqs
}

/// Vandermonde matrix of active atoms `A = [a(xi_1) ... a(xi_l)]`.
fn atom_matrix(freqs: &[f64], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, freqs.len(), |p, i| {
        Complex64::from_polar(1.0, 2.0 * PI * freqs[i] * p as f64)
    })
}

fn soft_threshold(v: Complex64, t: f64) -> Complex64 {
    let m = v.norm();
    if m <= t {
        Complex64::new(0.0, 0.0)
    } else {
        v * ((m - t) / m)
    }
}

/// Outcome details of the constrained l1 fit.
#[derive(Debug, Clone)]
pub struct FitInfo {
    /// Ball radius actually used (relaxed to the least-squares residual
    /// when the requested one was infeasible).
    pub epsilon_used: f64,
    pub epsilon_relaxed: bool,
    /// Certified duality gap at exit.
    pub duality_gap: f64,
    pub iterations: usize,
}

/// `argmin ||c||_1 s.t. ||A c - y|| <= eps` over the active atoms.
pub fn fit_coefficients(freqs: &[f64], y: &[Complex64], epsilon: f64) -> Vec<Complex64> {
    fit_coefficients_detailed(freqs, y, epsilon).0
}

pub fn fit_coefficients_detailed(
    freqs: &[f64],
    y: &[Complex64],
    epsilon: f64,
) -> (Vec<Complex64>, FitInfo) {
    let l = freqs.len();
    assert!(l >= 1, "no active atoms to fit");
    let n = y.len();
    let yv = DVector::from_column_slice(y);
    let ynorm = yv.norm();
    let mut info = FitInfo {
        epsilon_used: epsilon,
        epsilon_relaxed: false,
        duality_gap: 0.0,
        iterations: 0,
    };
    if ynorm <= epsilon {
        return (vec![Complex64::new(0.0, 0.0); l], info);
    }

    let a = atom_matrix(freqs, n);
    let gram = a.adjoint() * &a;
    // least-squares feasibility: distinct frequencies keep the
    // Vandermonde full column rank, but guard the factorization anyway
    let mut gram_reg = gram.clone();
    for i in 0..l {
        gram_reg[(i, i)] += Complex64::new(1e-12 * n as f64, 0.0);
    }
    let ls_chol = gram_reg
        .clone()
        .cholesky()
        .expect("regularized Gram matrix is positive definite");
    let c_ls = ls_chol.solve(&(a.adjoint() * &yv));
    let ls_residual = (&a * &c_ls - &yv).norm();
    let mut eps = epsilon;
    if ls_residual > eps {
        eps = ls_residual + 1e-9;
        info.epsilon_used = eps;
        info.epsilon_relaxed = true;
    }

    // ADMM splitting: d main block, c the l1 copy, r the ball copy
    let rho = 1.0;
    let mut factor = gram;
    for i in 0..l {
        factor[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let chol = factor
        .cholesky()
        .expect("Gram matrix plus identity is positive definite");
    let mut c = c_ls.clone();
    let mut r = &a * &c_ls - &yv;
    let mut v_c = DVector::<Complex64>::zeros(l);
    let mut v_r = DVector::<Complex64>::zeros(n);
    let mut d = c_ls;
    let max_iter = 50_000;
    for iter in 0..max_iter {
        info.iterations = iter + 1;
        let rhs = (&c - &v_c) + a.adjoint() * (&yv + &r - &v_r);
        d = chol.solve(&rhs);
        let ad = &a * &d;
        c = DVector::from_fn(l, |i, _| soft_threshold(d[i] + v_c[i], 1.0 / rho));
        let ball_arg = &ad - &yv + &v_r;
        let bn = ball_arg.norm();
        r = if bn <= eps {
            ball_arg.clone()
        } else {
            &ball_arg * Complex64::new(eps / bn, 0.0)
        };
        v_c += &d - &c;
        v_r += &ad - &yv - &r;

        if iter % 10 == 9 {
            // duality gap certificate: mu = rho v_r, normalized into the
            // dual-feasible set { mu : ||A^H mu||_inf <= 1 }
            let mu = &v_r * Complex64::new(rho, 0.0);
            let ah_mu = a.adjoint() * &mu;
            let inf = ah_mu.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let scale = inf.max(1.0);
            let dual_val =
                (-yv.dotc(&mu).re - eps * mu.norm()) / scale;
            let primal = c.iter().map(|z| z.norm()).sum::<f64>();
            // primal feasibility slack of the c iterate
            let c_res = (&a * &c - &yv).norm();
            let gap = primal - dual_val;
            if c_res <= eps + 1e-9 && gap.abs() <= 1e-6 * primal.max(1.0) {
                info.duality_gap = gap.abs();
                break;
            }
            info.duality_gap = gap.abs();
        }
    }
    let _ = d;

    // final feasibility polish: least-norm correction onto the ball
    let mut coefs = c;
    let fit_res = &a * &coefs - &yv;
    let fit_norm = fit_res.norm();
    if fit_norm > eps {
        let target = &fit_res * Complex64::new(eps / fit_norm - 1.0, 0.0);
        let corr = ls_chol.solve(&(a.adjoint() * target));
        coefs += corr;
    }
    (coefs.iter().copied().collect(), info)
}

/// Extrapolate the recovered atoms past the observation window:
/// `g_hat[m] = sum_i c_i e^{j 2 pi (n + m) xi_i}`.
pub fn extrapolate(spec: &QuantizedSpectrum, n: usize, horizon: usize) -> Vec<Complex64> {
    let mut g_hat = vec![Complex64::new(0.0, 0.0); horizon];
    for (xi, c) in spec.freqs.iter().zip(&spec.coefs) {
        for (m, slot) in g_hat.iter_mut().enumerate() {
            *slot += c * Complex64::from_polar(1.0, 2.0 * PI * xi * (n + m) as f64);
        }
    }
    g_hat
}

/// Everything the blind pipeline produced for one observation.
#[derive(Debug, Clone)]
pub struct BlindPrediction {
    pub g_hat: Vec<Complex64>,
    pub spectrum: QuantizedSpectrum,
    pub solution: AtomicSolution,
    pub epsilon: f64,
    pub fit: Option<FitInfo>,
}

/// Pipeline configuration; the defaults reproduce the reference
/// experiments.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub solve: SolveOptions,
    /// Localization threshold.
    pub delta: f64,
    /// Multiplier on the default noise budget.
    pub epsilon_scale: f64,
    /// Prediction horizon; defaults to the window length.
    pub horizon: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            delta: LOCALIZE_DELTA,
            epsilon_scale: 1.0,
            horizon: None,
        }
    }
}

/// Default noise budget: an upper quantile of `||z||` for circularly
/// symmetric noise with per-component variance `sigma2`.
pub fn default_epsilon(sigma2: f64, n: usize) -> f64 {
    sigma2.sqrt() * ((n as f64) + 2.0 * (n as f64).sqrt()).sqrt()
}

/// The blind predictor: denoise by the atomic-norm SDP, localize from
/// the dual polynomial, refit coefficients, extrapolate. Never touches
/// the true model; deterministic given `y`.
pub fn blind_predict(y: &[Complex64], sigma2: f64, opts: &PipelineOptions) -> Result<BlindPrediction> {
    let n = y.len();
    let horizon = opts.horizon.unwrap_or(n);
    let ynorm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let epsilon = opts.epsilon_scale * default_epsilon(sigma2, n);
    if ynorm == 0.0 {
        let solution = solve_atomic(y, epsilon, &opts.solve)?;
        return Ok(BlindPrediction {
            g_hat: vec![Complex64::new(0.0, 0.0); horizon],
            spectrum: QuantizedSpectrum::empty(),
            solution,
            epsilon,
            fit: None,
        });
    }
    let solution = solve_atomic(y, epsilon, &opts.solve)?;
    let freqs = localize(&solution.q_star, n, opts.delta, opts.solve.grid_size);
    if freqs.is_empty() {
        return Ok(BlindPrediction {
            g_hat: vec![Complex64::new(0.0, 0.0); horizon],
            spectrum: QuantizedSpectrum::empty(),
            solution,
            epsilon,
            fit: None,
        });
    }
    let (coefs, fit) = fit_coefficients_detailed(&freqs, y, epsilon);
    let spectrum = QuantizedSpectrum { freqs, coefs };
    let g_hat = extrapolate(&spectrum, n, horizon);
    Ok(BlindPrediction {
        g_hat,
        spectrum,
        solution,
        epsilon,
        fit: Some(fit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom(n: usize, xi: f64) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * xi * k as f64))
            .collect()
    }

    #[test]
    fn dual_polynomial_constant_for_first_basis_vector() {
        let mut q = vec![Complex64::new(0.0, 0.0); 8];
        q[0] = Complex64::new(1.0, 0.0);
        for xi in [-0.5, -0.123, 0.0, 0.25, 0.49] {
            assert!((dual_polynomial(&q, xi) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dual_polynomial_second_basis_vector_is_pure_phase() {
        let mut q = vec![Complex64::new(0.0, 0.0); 8];
        q[1] = Complex64::new(1.0, 0.0);
        for xi in [-0.3, 0.1, 0.4] {
            let v = dual_polynomial(&q, xi);
            assert!((v.norm() - 1.0).abs() < 1e-14);
            let expect = Complex64::from_polar(1.0, -2.0 * PI * xi);
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn grid_and_pointwise_evaluations_agree() {
        let q: Vec<Complex64> = (0..32)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let grid = 1 << 12;
        let vals = dual_polynomial_abs_grid(&q, grid);
        for g in (0..grid).step_by(101) {
            let xi = -0.5 + g as f64 / grid as f64;
            assert!((vals[g] - dual_polynomial(&q, xi).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn localize_below_threshold_is_empty() {
        // |Q| = 0.5 everywhere
        let mut q = vec![Complex64::new(0.0, 0.0); 16];
        q[0] = Complex64::new(0.5, 0.0);
        assert!(localize(&q, 16, LOCALIZE_DELTA, 1 << 12).is_empty());
    }

    #[test]
    fn localize_merges_close_peaks() {
        // dual vector of a single atom: |Q| has one global peak at xi0;
        // jittering should not produce two entries within 1/(4N)
        let n = 32;
        let xi0 = 0.2;
        let q: Vec<Complex64> = atom(n, xi0)
            .iter()
            .map(|&a| a / Complex64::new(n as f64, 0.0))
            .collect();
        let freqs = localize(&q, n, LOCALIZE_DELTA, 1 << 14);
        assert_eq!(freqs.len(), 1);
        assert!((freqs[0] - xi0).abs() < 1e-6);
    }

    #[test]
    fn fit_single_exact_atom() {
        let n = 16;
        let xi = 0.3;
        let c0 = Complex64::new(0.7, -1.2);
        let y: Vec<Complex64> = atom(n, xi).iter().map(|&a| a * c0).collect();
        let coefs = fit_coefficients(&[xi], &y, 0.0);
        assert_eq!(coefs.len(), 1);
        assert!((coefs[0] - c0).norm() < 1e-6, "{:?}", coefs[0]);
    }

    #[test]
    fn fit_dominated_by_epsilon_returns_zero() {
        let n = 8;
        let y: Vec<Complex64> = atom(n, 0.1).iter().map(|&a| a * 0.1).collect();
        let coefs = fit_coefficients(&[0.1, -0.2], &y, 100.0);
        assert!(coefs.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn fit_feasibility_and_l1_consistency() {
        let n = 16;
        let freqs = [-0.31, -0.05, 0.22, 0.40];
        // mixture plus a deterministic perturbation, fitted with slack
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        let amps = [
            Complex64::new(0.9, 0.1),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.5, -0.6),
            Complex64::new(0.2, 0.2),
        ];
        for (xi, c) in freqs.iter().zip(&amps) {
            for (k, slot) in y.iter_mut().enumerate() {
                *slot += c * Complex64::from_polar(1.0, 2.0 * PI * xi * k as f64);
            }
        }
        for (k, slot) in y.iter_mut().enumerate() {
            *slot += Complex64::new(0.02 * ((k % 3) as f64 - 1.0), -0.01 * ((k % 5) as f64 - 2.0));
        }
        let eps = 0.2;
        let (coefs, info) = fit_coefficients_detailed(&freqs, &y, eps);
        let a = atom_matrix(&freqs, n);
        let cv = DVector::from_column_slice(&coefs);
        let yv = DVector::from_column_slice(&y);
        let res = (&a * &cv - &yv).norm();
        assert!(res <= eps + 1e-6, "fit residual {res}");
        assert!(info.duality_gap <= 1e-6 * coefs.iter().map(|z| z.norm()).sum::<f64>().max(1.0));
        // l1 of the constrained fit never exceeds the least-squares fit
        let gram = a.adjoint() * &a;
        let c_ls = gram
            .cholesky()
            .unwrap()
            .solve(&(a.adjoint() * &yv));
        let l1 = coefs.iter().map(|z| z.norm()).sum::<f64>();
        let l1_ls = c_ls.iter().map(|z| z.norm()).sum::<f64>();
        assert!(l1 <= l1_ls + 1e-6, "l1 {l1} vs LS l1 {l1_ls}");
    }

    /// Reference solver for the constrained fit: FISTA on the LASSO form
    /// with the multiplier bisected until the ball constraint is met.
    fn fista_bisection_oracle(
        freqs: &[f64],
        y: &[Complex64],
        eps: f64,
    ) -> Vec<Complex64> {
        let n = y.len();
        let l = freqs.len();
        let a = atom_matrix(freqs, n);
        let yv = DVector::from_column_slice(y);
        // Lipschitz constant of the gradient: ||A||_2^2 by power iteration
        let mut v = DVector::from_element(l, Complex64::new(1.0, 0.0));
        for _ in 0..100 {
            v = a.adjoint() * (&a * &v);
            let norm = v.norm();
            v /= Complex64::new(norm.max(1e-300), 0.0);
        }
        let lip = (a.adjoint() * (&a * &v)).norm().max(1e-12);

        let lasso = |gamma: f64| -> DVector<Complex64> {
            let mut x = DVector::<Complex64>::zeros(l);
            let mut z = x.clone();
            let mut t = 1.0_f64;
            for _ in 0..4000 {
                let grad = a.adjoint() * (&a * &z - &yv);
                let step = &z - &grad * Complex64::new(1.0 / lip, 0.0);
                let x_new = DVector::from_fn(l, |i, _| soft_threshold(step[i], gamma / lip));
                let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                z = &x_new + (&x_new - &x) * Complex64::new((t - 1.0) / t_new, 0.0);
                x = x_new;
                t = t_new;
            }
            x
        };
        // residual grows monotonically with gamma
        let (mut lo, mut hi) = (1e-8, 2.0 * (a.adjoint() * &yv).norm());
        let mut best = lasso(lo);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let x = lasso(mid);
            let res = (&a * &x - &yv).norm();
            if res <= eps {
                best = x;
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best.iter().copied().collect()
    }

    #[test]
    fn fit_matches_fista_bisection_oracle() {
        let n = 16;
        let freqs = [-0.35, -0.1, 0.15, 0.38];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        let amps = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(-0.5, 0.5),
            Complex64::new(0.3, -0.3),
        ];
        for (xi, c) in freqs.iter().zip(&amps) {
            for (k, slot) in y.iter_mut().enumerate() {
                *slot += c * Complex64::from_polar(1.0, 2.0 * PI * xi * k as f64);
            }
        }
        for (k, slot) in y.iter_mut().enumerate() {
            *slot += Complex64::new(0.03 * ((k % 4) as f64 - 1.5), 0.02 * ((k % 3) as f64 - 1.0));
        }
        let eps = 0.25;
        let ours = fit_coefficients(&freqs, &y, eps);
        let oracle = fista_bisection_oracle(&freqs, &y, eps);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-4, "ours {a} vs oracle {b}");
        }
    }

    #[test]
    fn extrapolate_constant_atom() {
        let spec = QuantizedSpectrum {
            freqs: vec![0.0],
            coefs: vec![Complex64::new(1.0, 0.0)],
        };
        let g = extrapolate(&spec, 7, 5);
        for v in g {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn extrapolate_quarter_frequency_wraps_to_one() {
        let spec = QuantizedSpectrum {
            freqs: vec![0.25],
            coefs: vec![Complex64::new(1.0, 0.0)],
        };
        let g = extrapolate(&spec, 4, 1);
        assert!((g[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn empty_spectrum_extrapolates_to_zero() {
        let g = extrapolate(&QuantizedSpectrum::empty(), 16, 16);
        assert!(g.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn blind_predict_zero_input_gives_zero() {
        let y = vec![Complex64::new(0.0, 0.0); 8];
        let out = blind_predict(&y, 0.01, &PipelineOptions::default()).unwrap();
        assert!(out.g_hat.iter().all(|z| z.norm() == 0.0));
        assert!(out.spectrum.is_empty());
    }

    #[test]
    fn spectrum_json_round_trip() {
        let spec = QuantizedSpectrum {
            freqs: vec![-0.25, 0.125],
            coefs: vec![Complex64::new(1.5, -0.5), Complex64::new(0.0, 2.0)],
        };
        let text = spec.to_json();
        assert!(text.contains("\"freqs\"") && text.contains("\"re\""));
        let back = QuantizedSpectrum::from_json(&text).unwrap();
        assert_eq!(spec, back);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn extrapolation_is_bounded_by_l1(
            xi1 in -0.5f64..0.5,
            xi2 in -0.5f64..0.5,
            re1 in -2.0f64..2.0,
            im1 in -2.0f64..2.0,
            re2 in -2.0f64..2.0,
            im2 in -2.0f64..2.0,
        ) {
            prop_assume!((xi1 - xi2).abs() > 1e-6);
            let spec = QuantizedSpectrum {
                freqs: vec![xi1.min(xi2), xi1.max(xi2)],
                coefs: vec![Complex64::new(re1, im1), Complex64::new(re2, im2)],
            };
            let l1: f64 = spec.coefs.iter().map(|z| z.norm()).sum();
            let g = extrapolate(&spec, 16, 32);
            let linf = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(linf <= l1 + 1e-12);
        }
    }
}
