//! Measure-dependent drift and diffusion coefficients.
//!
//! A [`CoefficientField`] supplies the drift `V(t, x, μ)` in `R^d` and the
//! noise coefficient `G(t, x, μ)` as a `d × K` matrix, `K` being the number
//! of retained noise modes.  The cylindrical noise space is replaced by
//! `R^K` through a fixed orthonormal basis, so the diffusion matrix is
//! exactly `A = G Gᵀ` with no quadrature in the mode variable.
//!
//! The measure argument enters through a small summary — the weighted mean
//! and second moment — computed once per time step and shared by all
//! particles, which keeps a full step at `O(n)` coefficient work and makes
//! Lipschitz-in-`W₂` probing meaningful.

use crate::measure::{wasserstein2, Ensemble};
use crate::rng::{self, Domain};
use crate::{Error, Result};

/// Measure summary passed to coefficient evaluations.
#[derive(Clone, Debug)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub second_moment: f64,
}

impl Moments {
    pub fn of(ens: &Ensemble) -> Self {
        Self { mean: ens.mean(), second_moment: ens.second_moment() }
    }

    /// Summary of a point mass at the origin, `δ₀`.
    pub fn dirac_zero(dim: usize) -> Self {
        Self { mean: vec![0.0; dim], second_moment: 0.0 }
    }
}

/// Step used by the finite-difference fallbacks for coefficient Jacobians.
const JAC_FD_STEP: f64 = 1e-6;

/// A drift/diffusion coefficient pair.
///
/// Evaluations must be pure and re-entrant: they are called concurrently
/// from many particles and replicas.  The Jacobian methods are only needed
/// by the adjoint gradient; the defaults fall back to central finite
/// differences through the evaluation methods, while built-in fields
/// override them with exact derivatives.
pub trait CoefficientField: Sync {
    fn dim(&self) -> usize;

    /// Number of retained noise modes `K`.
    fn modes(&self) -> usize;

    /// Drift `V(t, x, μ)`, written into `out` (length `d`).
    fn drift(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]);

    /// Noise coefficient `G(t, x, μ)`, written into `out` row-major
    /// (`d × K`, `out[r * K + k]`).
    fn diffusion(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]);

    /// Declared Lipschitz bound, when known; verified empirically by
    /// [`lipschitz_probe`] for the built-ins.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }

    /// `∂V_r/∂x_c` at `out[r * d + c]`.
    fn drift_jac_x(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]) {
        fd_jac(x.len(), self.dim(), out, |xp, buf| self.drift(t, xp, mu, buf), x);
    }

    /// `∂V_r/∂mean_c` at `out[r * d + c]`.
    fn drift_jac_mean(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]) {
        fd_jac_mean(self.dim(), out, |m, buf| self.drift(t, x, m, buf), mu);
    }

    /// `∂G_{r,k}/∂x_c` at `out[(r * K + k) * d + c]`.
    fn diffusion_jac_x(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]) {
        fd_jac(x.len(), self.dim() * self.modes(), out, |xp, buf| self.diffusion(t, xp, mu, buf), x);
    }

    /// `∂G_{r,k}/∂mean_c` at `out[(r * K + k) * d + c]`.
    fn diffusion_jac_mean(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]) {
        fd_jac_mean(self.dim() * self.modes(), out, |m, buf| self.diffusion(t, x, m, buf), mu);
    }
}

fn fd_jac(dim_in: usize, dim_out: usize, out: &mut [f64], eval: impl Fn(&[f64], &mut [f64]), x: &[f64]) {
    let mut xp = x.to_vec();
    let mut plus = vec![0.0; dim_out];
    let mut minus = vec![0.0; dim_out];
    for c in 0..dim_in {
        let h = JAC_FD_STEP * (1.0 + x[c].abs());
        xp[c] = x[c] + h;
        eval(&xp, &mut plus);
        xp[c] = x[c] - h;
        eval(&xp, &mut minus);
        xp[c] = x[c];
        for r in 0..dim_out {
            out[r * dim_in + c] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
}

fn fd_jac_mean(dim_out: usize, out: &mut [f64], eval: impl Fn(&Moments, &mut [f64]), mu: &Moments) {
    let dim_in = mu.mean.len();
    let mut m = mu.clone();
    let mut plus = vec![0.0; dim_out];
    let mut minus = vec![0.0; dim_out];
    for c in 0..dim_in {
        let h = JAC_FD_STEP * (1.0 + mu.mean[c].abs());
        m.mean[c] = mu.mean[c] + h;
        eval(&m, &mut plus);
        m.mean[c] = mu.mean[c] - h;
        eval(&m, &mut minus);
        m.mean[c] = mu.mean[c];
        for r in 0..dim_out {
            out[r * dim_in + c] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
}

/// The diffusion matrix `A = G Gᵀ` (row-major `d × d`).
pub fn diffusion_matrix<F: CoefficientField + ?Sized>(
    field: &F,
    t: f64,
    x: &[f64],
    mu: &Moments,
) -> Vec<f64> {
    let (d, k) = (field.dim(), field.modes());
    let mut g = vec![0.0; d * k];
    field.diffusion(t, x, mu, &mut g);
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = 0.0;
            for m in 0..k {
                s += g[i * k + m] * g[j * k + m];
            }
            a[i * d + j] = s;
            a[j * d + i] = s;
        }
    }
    a
}

/// The built-in catalog.
///
/// Each carries an exact `lipschitz_hint`:
/// * `constant(σ, v)`   — `V ≡ v·1`, `G ≡ σ·1` (K = 1);
/// * `linear(a, σ)`     — `V = a·x`, `G ≡ σ·1` (K = 1);
/// * `mean_field(a, b, σ)` — `V = a·x + b·⟨id, μ⟩`, `G = σ·I` (K = d);
/// * `time_varying(a, σ)`  — `V = a·cos(t)·x`, `G = σ(1 + sin(t)/2)·1` (K = 1).
#[derive(Clone, Debug, PartialEq)]
pub enum StandardField {
    Constant { dim: usize, sigma: f64, v: f64 },
    Linear { dim: usize, a: f64, sigma: f64 },
    MeanField { dim: usize, a: f64, b: f64, sigma: f64 },
    TimeVarying { dim: usize, a: f64, sigma: f64 },
}

pub fn constant(dim: usize, sigma: f64, v: f64) -> StandardField {
    StandardField::Constant { dim, sigma, v }
}

pub fn linear(dim: usize, a: f64, sigma: f64) -> StandardField {
    StandardField::Linear { dim, a, sigma }
}

pub fn mean_field(dim: usize, a: f64, b: f64, sigma: f64) -> StandardField {
    StandardField::MeanField { dim, a, b, sigma }
}

pub fn time_varying(dim: usize, a: f64, sigma: f64) -> StandardField {
    StandardField::TimeVarying { dim, a, sigma }
}

/// Names accepted by [`builtin`], with their parameter lists.
pub fn builtin_names() -> &'static [(&'static str, &'static [&'static str])] {
    &[
        ("constant", &["sigma", "v"]),
        ("linear", &["a", "sigma"]),
        ("mean_field", &["a", "b", "sigma"]),
        ("time_varying", &["a", "sigma"]),
    ]
}

/// Look a built-in up by name and positional parameters.
pub fn builtin(name: &str, params: &[f64], dim: usize) -> Result<StandardField> {
    let expect = |n: usize| -> Result<()> {
        if params.len() != n {
            Err(Error::InvalidParameter(format!(
                "field `{name}` takes {n} parameters, got {}",
                params.len()
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "constant" => {
            expect(2)?;
            Ok(constant(dim, params[0], params[1]))
        }
        "linear" => {
            expect(2)?;
            Ok(linear(dim, params[0], params[1]))
        }
        "mean_field" => {
            expect(3)?;
            Ok(mean_field(dim, params[0], params[1], params[2]))
        }
        "time_varying" => {
            expect(2)?;
            Ok(time_varying(dim, params[0], params[1]))
        }
        other => Err(Error::UnknownField(other.into())),
    }
}

impl CoefficientField for StandardField {
    fn dim(&self) -> usize {
        match *self {
            StandardField::Constant { dim, .. }
            | StandardField::Linear { dim, .. }
            | StandardField::MeanField { dim, .. }
            | StandardField::TimeVarying { dim, .. } => dim,
        }
    }

    fn modes(&self) -> usize {
        match *self {
            StandardField::MeanField { dim, .. } => dim,
            _ => 1,
        }
    }

    fn drift(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]) {
        match *self {
            StandardField::Constant { v, .. } => out.fill(v),
            StandardField::Linear { a, .. } => {
                for (o, &xc) in out.iter_mut().zip(x) {
                    *o = a * xc;
                }
            }
            StandardField::MeanField { a, b, .. } => {
                for ((o, &xc), &mc) in out.iter_mut().zip(x).zip(&mu.mean) {
                    *o = a * xc + b * mc;
                }
            }
            StandardField::TimeVarying { a, .. } => {
                let c = a * t.cos();
                for (o, &xc) in out.iter_mut().zip(x) {
                    *o = c * xc;
                }
            }
        }
    }

    fn diffusion(&self, t: f64, _x: &[f64], _mu: &Moments, out: &mut [f64]) {
        match *self {
            StandardField::Constant { sigma, .. } | StandardField::Linear { sigma, .. } => {
                out.fill(sigma)
            }
            StandardField::MeanField { dim, sigma, .. } => {
                out.fill(0.0);
                for i in 0..dim {
                    out[i * dim + i] = sigma;
                }
            }
            StandardField::TimeVarying { sigma, .. } => out.fill(sigma * (1.0 + 0.5 * t.sin())),
        }
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(match *self {
            StandardField::Constant { dim, sigma, v } => {
                // Lipschitz part is zero; the growth condition at (0, δ₀)
                // needs L >= |V| + ‖G‖_F.
                (v * v * dim as f64).sqrt() + (sigma * sigma * dim as f64).sqrt()
            }
            StandardField::Linear { dim, a, sigma } => {
                a.abs().max((sigma * sigma * dim as f64).sqrt())
            }
            StandardField::MeanField { dim, a, b, sigma } => {
                a.abs().max(b.abs()).max((sigma * sigma * dim as f64).sqrt())
            }
            StandardField::TimeVarying { dim, a, sigma } => {
                a.abs().max(1.5 * (sigma * sigma * dim as f64).sqrt())
            }
        })
    }

    fn drift_jac_x(&self, t: f64, _x: &[f64], _mu: &Moments, out: &mut [f64]) {
        let d = self.dim();
        out.fill(0.0);
        let diag = match *self {
            StandardField::Constant { .. } => 0.0,
            StandardField::Linear { a, .. } => a,
            StandardField::MeanField { a, .. } => a,
            StandardField::TimeVarying { a, .. } => a * t.cos(),
        };
        for i in 0..d {
            out[i * d + i] = diag;
        }
    }

    fn drift_jac_mean(&self, _t: f64, _x: &[f64], _mu: &Moments, out: &mut [f64]) {
        let d = self.dim();
        out.fill(0.0);
        if let StandardField::MeanField { b, .. } = *self {
            for i in 0..d {
                out[i * d + i] = b;
            }
        }
    }

    fn diffusion_jac_x(&self, _t: f64, _x: &[f64], _mu: &Moments, out: &mut [f64]) {
        out.fill(0.0);
    }

    fn diffusion_jac_mean(&self, _t: f64, _x: &[f64], _mu: &Moments, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// A coefficient field given by closures; Jacobians use the finite
/// difference defaults.  Useful for one-off experiments and tests.
pub struct FnField<V, G>
where
    V: Fn(f64, &[f64], &Moments, &mut [f64]) + Sync,
    G: Fn(f64, &[f64], &Moments, &mut [f64]) + Sync,
{
    pub dim: usize,
    pub modes: usize,
    pub drift: V,
    pub diffusion: G,
    pub lipschitz_hint: Option<f64>,
}

impl<V, G> CoefficientField for FnField<V, G>
where
    V: Fn(f64, &[f64], &Moments, &mut [f64]) + Sync,
    G: Fn(f64, &[f64], &Moments, &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn modes(&self) -> usize {
        self.modes
    }

    fn drift(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]) {
        (self.drift)(t, x, mu, out)
    }

    fn diffusion(&self, t: f64, x: &[f64], mu: &Moments, out: &mut [f64]) {
        (self.diffusion)(t, x, mu, out)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }
}

/// Empirical regularity estimates from random probing.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ProbeEstimate {
    /// Largest observed `(|ΔV| + ‖ΔG‖_F) / |x − y|` over pairs differing in x.
    pub l_hat_x: f64,
    /// Largest observed `(|ΔV| + ‖ΔG‖_F) / W₂(μ, ν)` over pairs differing in μ.
    pub l_hat_mu: f64,
    /// Largest observed `(|V| + ‖G‖_F) / (1 + |x| + W₂(μ, δ₀))`.
    pub growth_hat: f64,
}

/// Sample random `(t, x, y, μ, ν)` within `radius` and report the worst
/// observed Lipschitz and growth ratios.  Deterministic in the seed; can
/// only falsify a declared bound, never certify it.
pub fn lipschitz_probe<F: CoefficientField + ?Sized>(
    field: &F,
    n_pairs: usize,
    radius: f64,
    seed: u64,
) -> Result<ProbeEstimate> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be >= 1".into()));
    }
    let d = field.dim();
    let k = field.modes();
    let ens_points = 8usize;
    let stream = rng::stream(Domain::Probe, 0);
    let mut counter = 0u64;
    let mut draw = move || {
        let z = rng::normal(seed, stream, counter);
        counter += 1;
        z
    };

    let mut l_hat_x = 0.0f64;
    let mut l_hat_mu = 0.0f64;
    let mut growth_hat = 0.0f64;

    let mut v_a = vec![0.0; d];
    let mut v_b = vec![0.0; d];
    let mut g_a = vec![0.0; d * k];
    let mut g_b = vec![0.0; d * k];

    for _ in 0..n_pairs {
        let t = 0.5 + 0.5 * draw().tanh(); // smooth map into (0, 1)
        let scale = radius / 3.0;
        let x: Vec<f64> = (0..d).map(|_| scale * draw()).collect();
        let y: Vec<f64> = (0..d).map(|_| scale * draw()).collect();
        let mut pts_mu = Vec::with_capacity(ens_points * d);
        let mut pts_nu = Vec::with_capacity(ens_points * d);
        for _ in 0..ens_points * d {
            pts_mu.push(scale * draw());
            pts_nu.push(scale * draw());
        }
        let w = vec![1.0 / ens_points as f64; ens_points];
        let mu_ens = Ensemble::from_flat(d, pts_mu, w.clone())?;
        let nu_ens = Ensemble::from_flat(d, pts_nu, w)?;
        let mu = Moments::of(&mu_ens);
        let nu = Moments::of(&nu_ens);

        // Vary x with the measure held fixed.
        let dx = dist(&x, &y);
        if dx > 1e-15 {
            field.drift(t, &x, &mu, &mut v_a);
            field.drift(t, &y, &mu, &mut v_b);
            field.diffusion(t, &x, &mu, &mut g_a);
            field.diffusion(t, &y, &mu, &mut g_b);
            l_hat_x = l_hat_x.max((dist(&v_a, &v_b) + dist(&g_a, &g_b)) / dx);
        }

        // Vary the measure with x held fixed.
        let dmu = wasserstein2(&mu_ens, &nu_ens)?;
        if dmu > 1e-15 {
            field.drift(t, &x, &mu, &mut v_a);
            field.drift(t, &x, &nu, &mut v_b);
            field.diffusion(t, &x, &mu, &mut g_a);
            field.diffusion(t, &x, &nu, &mut g_b);
            l_hat_mu = l_hat_mu.max((dist(&v_a, &v_b) + dist(&g_a, &g_b)) / dmu);
        }

        // Growth against the linear bound in |x| and W₂(μ, δ₀).
        field.drift(t, &x, &mu, &mut v_a);
        field.diffusion(t, &x, &mu, &mut g_a);
        let denom = 1.0 + norm(&x) + mu_ens.second_moment().sqrt();
        growth_hat = growth_hat.max((norm(&v_a) + norm(&g_a)) / denom);
    }

    Ok(ProbeEstimate { l_hat_x, l_hat_mu, growth_hat })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn diffusion_matrix_diagonal_case() {
        // G = 2·I (d = K = 2) gives A = 4·I.
        let field = mean_field(2, 0.0, 0.0, 2.0);
        let a = diffusion_matrix(&field, 0.0, &[0.3, -0.4], &Moments::dirac_zero(2));
        assert_eq!(a, vec![4.0, 0.0, 0.0, 4.0]);
        // G = 0 gives A = 0.
        let zero = constant(2, 0.0, 1.0);
        let a0 = diffusion_matrix(&zero, 0.0, &[0.0, 0.0], &Moments::dirac_zero(2));
        assert!(a0.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn diffusion_matrix_hand_check() {
        // [DERIVED] d=2, K=3, rows (1,0,1) and (0,2,1):
        // A11 = 1+0+1 = 2, A12 = 0+0+1 = 1, A22 = 0+4+1 = 5.
        let field = FnField {
            dim: 2,
            modes: 3,
            drift: |_t: f64, _x: &[f64], _m: &Moments, out: &mut [f64]| out.fill(0.0),
            diffusion: |_t: f64, _x: &[f64], _m: &Moments, out: &mut [f64]| {
                out.copy_from_slice(&[1.0, 0.0, 1.0, 0.0, 2.0, 1.0]);
            },
            lipschitz_hint: None,
        };
        let a = diffusion_matrix(&field, 0.0, &[0.0, 0.0], &Moments::dirac_zero(2));
        assert_eq!(a, vec![2.0, 1.0, 1.0, 5.0]);
    }

    #[test]
    fn diffusion_matrix_is_symmetric_and_psd_on_random_inputs() {
        let field = FnField {
            dim: 3,
            modes: 2,
            drift: |_t: f64, _x: &[f64], _m: &Moments, out: &mut [f64]| out.fill(0.0),
            diffusion: |t: f64, x: &[f64], m: &Moments, out: &mut [f64]| {
                for r in 0..3 {
                    for k in 0..2 {
                        out[r * 2 + k] =
                            (x[r] + t).sin() + 0.3 * m.mean[r] + 0.1 * (r as f64 - k as f64);
                    }
                }
            },
            lipschitz_hint: None,
        };
        for trial in 0..50u64 {
            let x: Vec<f64> = (0..3)
                .map(|c| crate::rng::normal(7, crate::rng::stream(Domain::Scratch, 2), trial * 3 + c))
                .collect();
            let mu = Moments { mean: vec![x[2], x[0], x[1]], second_moment: 1.0 };
            let a = diffusion_matrix(&field, 0.25 * trial as f64, &x, &mu);
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(a[i * 3 + j].to_bits(), a[j * 3 + i].to_bits());
                }
            }
            let m = nalgebra::DMatrix::from_row_slice(3, 3, &a);
            let eig = m.symmetric_eigenvalues();
            assert!(eig.iter().all(|&l| l >= -1e-10), "eigenvalues {eig:?}");
        }
    }

    #[test]
    fn probe_constant_field_has_zero_lipschitz_ratio() {
        let field = constant(1, 1.5, 0.7);
        let probe = lipschitz_probe(&field, 200, 2.0, 3).unwrap();
        assert_eq!(probe.l_hat_x, 0.0);
        assert_eq!(probe.l_hat_mu, 0.0);
        assert!(probe.growth_hat <= field.lipschitz_hint().unwrap() + 1e-6);
    }

    #[test]
    fn probe_linear_field_recovers_slope() {
        // V = 3x, G = 0 in one dimension: the x-ratio is exactly 3.
        let field = linear(1, 3.0, 0.0);
        let probe = lipschitz_probe(&field, 500, 1.0, 11).unwrap();
        assert!(probe.l_hat_x > 3.0 - 1e-9 && probe.l_hat_x <= 3.0 + 1e-12, "{}", probe.l_hat_x);
    }

    #[test]
    fn probe_mean_field_dominated_by_w2() {
        // [DERIVED] |mean(μ) − mean(ν)| <= W₂(μ, ν), so V = ⟨id,μ⟩ − x has
        // both ratios at most 1.
        let field = mean_field(1, -1.0, 1.0, 0.0);
        let probe = lipschitz_probe(&field, 500, 2.0, 17).unwrap();
        assert!(probe.l_hat_x <= 1.0 + 1e-9, "{}", probe.l_hat_x);
        assert!(probe.l_hat_mu <= 1.0 + 1e-9, "{}", probe.l_hat_mu);
    }

    #[test]
    fn probe_never_exceeds_hint_for_builtins() {
        let fields: Vec<StandardField> = vec![
            constant(1, 1.0, 0.5),
            linear(1, -1.0, 1.0),
            mean_field(1, -1.0, 1.0, 1.0),
            time_varying(1, 0.8, 1.0),
            mean_field(2, 0.5, -0.25, 2.0),
        ];
        for field in &fields {
            let hint = field.lipschitz_hint().unwrap();
            let probe = lipschitz_probe(field, 10_000, 3.0, 23).unwrap();
            assert!(probe.l_hat_x <= hint + 1e-6, "{field:?}: {} > {hint}", probe.l_hat_x);
            assert!(probe.l_hat_mu <= hint + 1e-6, "{field:?}: {} > {hint}", probe.l_hat_mu);
            assert!(probe.growth_hat <= hint + 1e-6, "{field:?}: {} > {hint}", probe.growth_hat);
        }
    }

    #[test]
    fn builtin_lookup() {
        let f = builtin("constant", &[1.0, 0.0], 1).unwrap();
        let mut v = [f64::NAN];
        let mut g = [f64::NAN];
        f.drift(0.3, &[2.0], &Moments::dirac_zero(1), &mut v);
        f.diffusion(0.3, &[2.0], &Moments::dirac_zero(1), &mut g);
        assert_eq!(v, [0.0]);
        assert_eq!(g, [1.0]);
        assert!(matches!(builtin("nope", &[], 1), Err(Error::UnknownField(_))));
        assert!(builtin("linear", &[1.0], 1).is_err());
    }

    #[test]
    fn fd_jacobian_defaults_match_analytic_for_mean_field() {
        // The FnField route exercises the finite-difference defaults; the
        // StandardField route the analytic overrides.  They must agree.
        let analytic = mean_field(2, -0.7, 0.4, 1.1);
        let wrapped = FnField {
            dim: 2,
            modes: 2,
            drift: |_t: f64, x: &[f64], m: &Moments, out: &mut [f64]| {
                for i in 0..2 {
                    out[i] = -0.7 * x[i] + 0.4 * m.mean[i];
                }
            },
            diffusion: |_t: f64, _x: &[f64], _m: &Moments, out: &mut [f64]| {
                out.fill(0.0);
                out[0] = 1.1;
                out[3] = 1.1;
            },
            lipschitz_hint: None,
        };
        let x = [0.3, -0.2];
        let mu = Moments { mean: vec![0.5, 0.1], second_moment: 0.3 };
        let mut jx_a = vec![0.0; 4];
        let mut jx_f = vec![0.0; 4];
        analytic.drift_jac_x(0.2, &x, &mu, &mut jx_a);
        wrapped.drift_jac_x(0.2, &x, &mu, &mut jx_f);
        for (a, f) in jx_a.iter().zip(&jx_f) {
            assert_abs_diff_eq!(a, f, epsilon = 1e-7);
        }
        let mut jm_a = vec![0.0; 4];
        let mut jm_f = vec![0.0; 4];
        analytic.drift_jac_mean(0.2, &x, &mu, &mut jm_a);
        wrapped.drift_jac_mean(0.2, &x, &mu, &mut jm_f);
        for (a, f) in jm_a.iter().zip(&jm_f) {
            assert_abs_diff_eq!(a, f, epsilon = 1e-7);
        }
        assert_relative_eq!(jm_a[0], 0.4, max_relative = 1e-12);
    }
}
