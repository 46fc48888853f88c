//! Weighted empirical measures on `R^d`.
//!
//! An [`Ensemble`] is a finitely supported probability measure: `n` points
//! with nonnegative weights summing to one.  Initial mass distributions,
//! their pushforwards under a flow, and goal measures for rate-function
//! targets are all ensembles.  Pushing forward just moves the points;
//! weights are conserved exactly, which is what makes the particle
//! representation of a conservative measure path exact.

mod ot;

pub use ot::{sinkhorn_divergence, SinkhornParams, EPSILON_SCHEDULE_FACTORS};

use crate::rng::{self, Domain};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance on `Σ w_i = 1` accepted at construction.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Largest equal-weight ensemble solved by exact optimal assignment;
/// beyond this the entropic solver takes over.
pub const ASSIGNMENT_LIMIT: usize = 256;

/// A finitely supported probability measure on `R^d`.
///
/// Immutable after construction; cheap to share read-only across workers.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    dim: usize,
    points: Vec<f64>, // n × dim, row-major
    weights: Vec<f64>,
}

impl Ensemble {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidParameter("points must have dimension >= 1".into()));
        }
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: p.len() });
            }
            flat.extend_from_slice(p);
        }
        Self::from_flat(dim, flat, weights)
    }

    /// Build from a flat `n × dim` row-major coordinate buffer.
    pub fn from_flat(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if points.len() != weights.len() * dim {
            return Err(Error::LengthMismatch { left: points.len() / dim.max(1), right: weights.len() });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEnsemble);
        }
        let mut sum = 0.0;
        for &w in &weights {
            if !w.is_finite() {
                return Err(Error::NonFiniteEnsemble);
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight(w));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum(sum));
        }
        Ok(Self { dim, points, weights })
    }

    /// Point mass at `x`.
    pub fn dirac(x: Vec<f64>) -> Self {
        let dim = x.len();
        assert!(dim > 0);
        assert!(x.iter().all(|c| c.is_finite()));
        Self { dim, points: x, weights: vec![1.0] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn flat_points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted mean `Σ w_i x_i`.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (p, &w) in self.points().zip(&self.weights) {
            for (mc, &pc) in m.iter_mut().zip(p) {
                *mc += w * pc;
            }
        }
        m
    }

    /// `Σ w_i |x_i|²`, which equals `W₂(μ, δ₀)²`.
    pub fn second_moment(&self) -> f64 {
        self.points()
            .zip(&self.weights)
            .map(|(p, &w)| w * p.iter().map(|c| c * c).sum::<f64>())
            .sum()
    }

    /// Move every point to its image, keeping weights unchanged.
    pub fn pushforward(&self, images: &[Vec<f64>]) -> Result<Self> {
        if images.len() != self.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: images.len() });
        }
        let mut flat = Vec::with_capacity(self.points.len());
        for img in images {
            if img.len() != self.dim {
                return Err(Error::DimensionMismatch { left: self.dim, right: img.len() });
            }
            flat.extend_from_slice(img);
        }
        self.pushforward_flat(&flat)
    }

    /// Pushforward from a flat `n × dim` image buffer.
    pub fn pushforward_flat(&self, images: &[f64]) -> Result<Self> {
        if images.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                left: self.points.len() / self.dim,
                right: images.len() / self.dim,
            });
        }
        if images.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEnsemble);
        }
        Ok(Self { dim: self.dim, points: images.to_vec(), weights: self.weights.clone() })
    }

    /// Read `x_1,..,x_d,weight` rows; the header is required.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
        let dim = headers.len().saturating_sub(1);
        if dim == 0 || headers.iter().last() != Some("weight") {
            return Err(Error::Csv("expected header x_1,..,x_d,weight".into()));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            if record.len() != dim + 1 {
                return Err(Error::Csv(format!("row has {} fields, expected {}", record.len(), dim + 1)));
            }
            for field in record.iter().take(dim) {
                points.push(field.trim().parse::<f64>().map_err(|e| Error::Csv(e.to_string()))?);
            }
            weights.push(record[dim].trim().parse::<f64>().map_err(|e| Error::Csv(e.to_string()))?);
        }
        Self::from_flat(dim, points, weights)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn to_csv_writer<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|i| format!("x_{i}")).collect();
        writeln!(w, "{},weight", header.join(","))?;
        for (p, wt) in self.points().zip(&self.weights) {
            let coords: Vec<String> = p.iter().map(|c| format!("{c:.17e}")).collect();
            writeln!(w, "{},{:.17e}", coords.join(","), wt)?;
        }
        Ok(())
    }
}

/// Recipes for initial mass distributions.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// All mass at one point (replicated if `n > 1`).
    PointMass { x: Vec<f64> },
    /// Equispaced tensor grid on a box, endpoints included, equal weights.
    /// For `d > 1` the requested count must be a perfect `d`-th power.
    UniformGrid { lo: Vec<f64>, hi: Vec<f64> },
    /// `n` iid draws from `N(mean, std² I)`, equal weights.
    Gaussian { mean: Vec<f64>, std: f64 },
    /// Explicit points and weights, validated like any ensemble.
    Explicit { points: Vec<Vec<f64>>, weights: Vec<f64> },
}

/// Materialize a distribution descriptor as an `n`-point ensemble.
///
/// Deterministic in `(spec, n, seed)`; only the Gaussian recipe consumes
/// randomness.
pub fn ensemble_from_spec(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    match spec {
        DistributionSpec::PointMass { x } => {
            let mut flat = Vec::with_capacity(n * x.len());
            for _ in 0..n {
                flat.extend_from_slice(x);
            }
            Ensemble::from_flat(x.len(), flat, equal_weights(n))
        }
        DistributionSpec::UniformGrid { lo, hi } => {
            if lo.len() != hi.len() {
                return Err(Error::DimensionMismatch { left: lo.len(), right: hi.len() });
            }
            let d = lo.len();
            let per_axis = if d == 1 {
                n
            } else {
                let k = (n as f64).powf(1.0 / d as f64).round() as usize;
                if k.pow(d as u32) != n {
                    return Err(Error::InvalidParameter(format!(
                        "grid in dimension {d} needs a perfect {d}-th power of points, got {n}"
                    )));
                }
                k
            };
            let axis_nodes: Vec<Vec<f64>> = (0..d)
                .map(|axis| linspace(lo[axis], hi[axis], per_axis))
                .collect();
            let mut flat = vec![0.0; n * d];
            for i in 0..n {
                let mut rem = i;
                for axis in (0..d).rev() {
                    flat[i * d + axis] = axis_nodes[axis][rem % per_axis];
                    rem /= per_axis;
                }
            }
            Ensemble::from_flat(d, flat, equal_weights(n))
        }
        DistributionSpec::Gaussian { mean, std } => {
            if *std < 0.0 || !std.is_finite() {
                return Err(Error::InvalidParameter(format!("gaussian std {std} invalid")));
            }
            let d = mean.len();
            let mut flat = Vec::with_capacity(n * d);
            for i in 0..n {
                for c in 0..d {
                    let z = rng::normal(seed, rng::stream(Domain::Init, 0), (i * d + c) as u64);
                    flat.push(mean[c] + std * z);
                }
            }
            Ensemble::from_flat(d, flat, equal_weights(n))
        }
        DistributionSpec::Explicit { points, weights } => Ensemble::new(points.clone(), weights.clone()),
    }
}

fn equal_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `Σ w_i |x_i|²` as a free function mirroring the ensemble method.
pub fn second_moment(ens: &Ensemble) -> f64 {
    ens.second_moment()
}

/// How a Wasserstein-2 value was obtained.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum W2Method {
    /// Exact monotone (quantile) coupling, d = 1 only.
    Quantile1d,
    /// Exact optimal assignment (equal weights, equal counts).
    Assignment,
    /// Debiased entropic regularization.
    Entropic { epsilon_reg: f64, iterations: usize, residual: f64 },
}

/// A Wasserstein-2 value together with the method that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct W2Solution {
    pub value: f64,
    #[serde(flatten)]
    pub method: W2Method,
}

/// `W₂(a, b)` with automatic method selection: exact quantile coupling in
/// one dimension, exact assignment for moderate equal-weight ensembles,
/// debiased entropic regularization otherwise.
pub fn wasserstein2(a: &Ensemble, b: &Ensemble) -> Result<f64> {
    Ok(wasserstein2_detailed(a, b)?.value)
}

pub fn wasserstein2_detailed(a: &Ensemble, b: &Ensemble) -> Result<W2Solution> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    if a.dim() == 1 {
        return Ok(W2Solution { value: ot::w2_quantile_1d(a, b), method: W2Method::Quantile1d });
    }
    if equal_weighted_pair(a, b) && a.len() <= ASSIGNMENT_LIMIT {
        let (_, total) = ot::assignment(a, b);
        return Ok(W2Solution {
            value: (total / a.len() as f64).max(0.0).sqrt(),
            method: W2Method::Assignment,
        });
    }
    let params = SinkhornParams::default_for(a, b);
    let out = sinkhorn_divergence(a, b, &params)?;
    Ok(W2Solution {
        value: out.divergence.max(0.0).sqrt(),
        method: W2Method::Entropic {
            epsilon_reg: params.epsilon_reg,
            iterations: out.iterations,
            residual: out.residual,
        },
    })
}

/// Optimal coupling as sparse `(i, j, mass)` triples, used by the
/// measure-target gradient.  Tier selection matches [`wasserstein2_detailed`].
pub fn transport_plan(a: &Ensemble, b: &Ensemble) -> Result<Vec<(usize, usize, f64)>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    if a.dim() == 1 {
        return Ok(ot::quantile_plan_1d(a, b));
    }
    if equal_weighted_pair(a, b) && a.len() <= ASSIGNMENT_LIMIT {
        let (perm, _) = ot::assignment(a, b);
        let w = 1.0 / a.len() as f64;
        return Ok(perm.into_iter().enumerate().map(|(i, j)| (i, j, w)).collect());
    }
    let params = SinkhornParams::default_for(a, b);
    let out = sinkhorn_divergence(a, b, &params)?;
    Ok(out.plan)
}

fn equal_weighted_pair(a: &Ensemble, b: &Ensemble) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let w = 1.0 / a.len() as f64;
    a.weights().iter().chain(b.weights()).all(|&wi| (wi - w).abs() <= WEIGHT_SUM_TOL)
}
