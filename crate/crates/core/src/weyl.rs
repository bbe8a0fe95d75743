//! Leading-order Weyl predictions and simple convergence diagnostics.

use crate::boxspec::{BoxCylinder, SpectralFamily};
use crate::counting::counting_function;
use crate::error::{Error, Result};
use crate::profile::unit_ball_volume;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Geometric input for the Weyl formulas, supplied as scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    /// Ambient dimension `n >= 2`.
    pub n: u32,
    /// `∫ rho^{n-1} ds` over the boundary.
    pub rho_integral: f64,
    /// `vol(∂Ω)`, used when `rho == 1`.
    pub boundary_volume: f64,
}

impl BoundaryData {
    pub fn new(n: u32, rho_integral: f64, boundary_volume: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension must be >= 2, got {n}")));
        }
        for (name, v) in [("rho_integral", rho_integral), ("boundary_volume", boundary_volume)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            n,
            rho_integral,
            boundary_volume,
        })
    }

    /// Data for a box whose only weighted face is the Steklov face.
    pub fn for_box(bx: &BoxCylinder) -> Result<Self> {
        let n = bx.dim() as u32;
        let area = bx.face_area();
        Self::new(n, bx.rho().powi(n as i32 - 1) * area, area)
    }

    fn omega(&self) -> f64 {
        unit_ball_volume(self.n - 1).expect("n >= 2")
    }
}

/// `omega_{n-1} tau^{n-1} ∫rho^{n-1} / (4 pi)^{n-1}`.
pub fn predict_count(b: &BoundaryData, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("tau must be positive and finite, got {tau}")));
    }
    let d = b.n as i32 - 1;
    Ok(b.omega() * (tau / (4.0 * PI)).powi(d) * b.rho_integral)
}

/// `4 pi (k / (omega_{n-1} vol(∂Ω)))^{1/(n-1)}`.
pub fn predict_eigenvalue(b: &BoundaryData, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    let d = (b.n - 1) as f64;
    let x = k as f64 / (b.omega() * b.boundary_volume);
    let root = if b.n == 2 { x } else { x.powf(1.0 / d) };
    Ok(4.0 * PI * root)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    ApproachingOne,
    Inconclusive,
}

impl Trend {
    pub fn name(self) -> &'static str {
        match self {
            Trend::ApproachingOne => "approaching_one",
            Trend::Inconclusive => "inconclusive",
        }
    }

    /// Compares the mean of `|r - 1|` over the last `ceil(L/4)` ratios with
    /// that over the first `ceil(L/4)`. Diagnostic only.
    pub fn from_ratios(ratios: &[f64]) -> Self {
        if ratios.len() < 2 {
            return Trend::Inconclusive;
        }
        let q = ratios.len().div_ceil(4);
        let mean_dev = |r: &[f64]| r.iter().map(|x| (x - 1.0).abs()).sum::<f64>() / r.len() as f64;
        if mean_dev(&ratios[ratios.len() - q..]) < mean_dev(&ratios[..q]) {
            Trend::ApproachingOne
        } else {
            Trend::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `tau` values or eigenvalue indices.
    pub abscissae: Vec<f64>,
    pub exact: Vec<f64>,
    pub predicted: Vec<f64>,
    pub ratio: Vec<f64>,
    pub trend: Trend,
    /// Least-squares `C` in `|ratio - 1| ≈ C / x` over the four largest
    /// abscissae; `None` with fewer than four points.
    pub fit_c: Option<f64>,
}

impl ConvergenceReport {
    fn build(abscissae: Vec<f64>, exact: Vec<f64>, predicted: Vec<f64>) -> Self {
        let ratio: Vec<f64> = exact.iter().zip(&predicted).map(|(e, p)| e / p).collect();
        let trend = Trend::from_ratios(&ratio);
        let fit_c = inverse_fit(&abscissae, &ratio);
        Self {
            abscissae,
            exact,
            predicted,
            ratio,
            trend,
            fit_c,
        }
    }
}

/// `C = sum(e_i / x_i) / sum(1 / x_i^2)` with `e_i = |r_i - 1|`, over the
/// last four points.
pub fn inverse_fit(xs: &[f64], ratios: &[f64]) -> Option<f64> {
    if xs.len() < 4 || xs.len() != ratios.len() {
        return None;
    }
    let start = xs.len() - 4;
    let (num, den) = xs[start..]
        .iter()
        .zip(&ratios[start..])
        .fold((0.0, 0.0), |(n, d), (&x, &r)| {
            (n + (r - 1.0).abs() / x, d + 1.0 / (x * x))
        });
    Some(num / den)
}

/// Exact box counts against the Weyl prediction for the Steklov face.
pub fn convergence_report_counts(
    bx: &BoxCylinder,
    family: SpectralFamily,
    taus: &[f64],
) -> Result<ConvergenceReport> {
    if taus.is_empty() {
        return Err(Error::domain("tau list is empty"));
    }
    if taus.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("taus must be strictly ascending"));
    }
    let data = BoundaryData::for_box(bx)?;
    let exact = taus
        .par_iter()
        .map(|&tau| counting_function(bx, family, tau).map(|c| c as f64))
        .collect::<Result<Vec<_>>>()?;
    let predicted = taus
        .iter()
        .map(|&tau| predict_count(&data, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::build(taus.to_vec(), exact, predicted))
}

/// `lambda_k / predicted lambda_k` for 1-based `k` in `k_range`.
pub fn convergence_report_eigenvalues(
    spectrum: &[f64],
    b: &BoundaryData,
    k_range: &[usize],
) -> Result<ConvergenceReport> {
    if k_range.is_empty() {
        return Err(Error::domain("k range is empty"));
    }
    if let Some(&k) = k_range.iter().find(|&&k| k == 0 || k > spectrum.len()) {
        return Err(Error::domain(format!(
            "k = {k} outside 1..={}",
            spectrum.len()
        )));
    }
    if spectrum.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("spectrum must be sorted ascending"));
    }
    let exact: Vec<f64> = k_range.iter().map(|&k| spectrum[k - 1]).collect();
    let predicted = k_range
        .iter()
        .map(|&k| predict_eigenvalue(b, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::build(
        k_range.iter().map(|&k| k as f64).collect(),
        exact,
        predicted,
    ))
}
