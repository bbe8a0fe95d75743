//! Closed-form Steklov spectra on rectangular cylinders
//! `[0, l_1] x ... x [0, l_{n-1}] x [0, l_n]` with the Steklov face at
//! `x_n = 0`.
//!
//! Separation of variables gives eigenfunctions `X(x_1..x_{n-1}) Y(x_n)`,
//! where `X` is a Laplace eigenfunction of the base with eigenvalue
//! `alpha = sum (m_i pi / l_i)^2` and `Y` is the vertical profile with
//! `eta = sqrt(alpha)`. The Steklov eigenvalue is `t(sqrt(alpha) l_n) / (rho l_n)`.

use crate::error::{Error, Result};
use crate::lattice;
use crate::profile::{self, BoundaryProfile, ProfileKind};
use std::f64::consts::PI;
use std::fmt;

/// Which lateral boundary conditions the box carries, and hence which base
/// modes it admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralFamily {
    /// `u = Δu = 0` on the lateral faces: sine modes, every `m_i >= 1`.
    DirichletLateral,
    /// `∂u/∂ν = ∂(Δu)/∂ν = 0` on the lateral faces: cosine modes,
    /// `m_i >= 0` with `sum m_i != 0`.
    NeumannLateral,
}

impl SpectralFamily {
    pub fn name(self) -> &'static str {
        match self {
            SpectralFamily::DirichletLateral => "dirichlet",
            SpectralFamily::NeumannLateral => "neumann",
        }
    }

    pub fn profile_kind(self) -> ProfileKind {
        match self {
            SpectralFamily::DirichletLateral => ProfileKind::Y,
            SpectralFamily::NeumannLateral => ProfileKind::Z,
        }
    }

    fn admits(self, m: &[u32]) -> bool {
        match self {
            SpectralFamily::DirichletLateral => m.iter().all(|&x| x >= 1),
            SpectralFamily::NeumannLateral => m.iter().any(|&x| x > 0),
        }
    }
}

impl fmt::Display for SpectralFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SpectralFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" | "dirichlet-lateral" | "dirichletlateral" => {
                Ok(SpectralFamily::DirichletLateral)
            }
            "neumann" | "neumann-lateral" | "neumannlateral" => Ok(SpectralFamily::NeumannLateral),
            other => Err(Error::Config(format!(
                "unknown family '{other}' (expected dirichlet or neumann)"
            ))),
        }
    }
}

/// An n-dimensional rectangular cylinder with constant density on the
/// Steklov face.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCylinder {
    base_sides: Vec<f64>,
    height: f64,
    rho: f64,
}

impl BoxCylinder {
    pub fn new(base_sides: Vec<f64>, height: f64, rho: f64) -> Result<Self> {
        lattice::check_sides(&base_sides)?;
        for (name, v) in [("height", height), ("rho", rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            base_sides,
            height,
            rho,
        })
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.base_sides.len() + 1
    }

    pub fn base_sides(&self) -> &[f64] {
        &self.base_sides
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Area of the Steklov face, `prod l_i`.
    pub fn face_area(&self) -> f64 {
        self.base_sides.iter().product()
    }

    /// `max l_i < l_n`, the regime in which the box comparison lemmas are
    /// stated. Violating it is allowed.
    pub fn height_dominates(&self) -> bool {
        self.base_sides.iter().all(|&l| l < self.height)
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.base_sides.clone(), self.height, rho)
    }

    /// Human-readable warnings about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.height_dominates() {
            out.push(format!(
                "height {} does not exceed every base side {:?}",
                self.height, self.base_sides
            ));
        }
        out
    }
}

/// A base Laplace mode: multi-index and eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMode {
    pub m: Vec<u32>,
    pub alpha: f64,
}

/// One separated Steklov eigenmode of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxMode {
    pub m: Vec<u32>,
    pub alpha: f64,
    pub lambda: f64,
    pub family: SpectralFamily,
}

/// `sum_i (m_i pi / l_i)^2`.
pub fn base_eigenvalue(m: &[u32], sides: &[f64]) -> f64 {
    m.iter()
        .zip(sides)
        .map(|(&mi, &li)| {
            let k = mi as f64 * PI / li;
            k * k
        })
        .sum()
}

/// The `k` smallest base eigenvalues (with multiplicity), ascending, ties
/// broken by lexicographic multi-index.
pub fn base_spectrum(
    bx: &BoxCylinder,
    family: SpectralFamily,
    k: usize,
) -> Result<Vec<BaseMode>> {
    if k == 0 {
        return Err(Error::domain("K must be >= 1"));
    }
    let sides = bx.base_sides();
    let d = sides.len() as f64;
    let min_side = sides.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut radius = (k as f64).powf(1.0 / d) / min_side;
    loop {
        let n = lattice::count_points(sides, radius, family)?;
        if n as usize >= k {
            break;
        }
        radius *= 2.0;
    }
    let mut modes = Vec::new();
    lattice::for_each_point(sides, radius, family, |m, _| {
        modes.push(BaseMode {
            m: m.to_vec(),
            alpha: base_eigenvalue(m, sides),
        })
    })?;
    modes.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then_with(|| a.m.cmp(&b.m)));
    modes.truncate(k);
    Ok(modes)
}

/// `t(sqrt(alpha) l_n) / (rho l_n)`.
pub fn steklov_from_base(alpha: f64, height: f64, rho: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("height", height), ("rho", rho)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(profile::t_profile(alpha.sqrt() * height)? / (rho * height))
}

const ORDER_SLACK: f64 = 1e-12;

/// The `k` smallest Steklov eigenvalues of the box for the given family.
///
/// Modes are produced in base-eigenvalue order; the resulting `lambda`
/// sequence is checked to be non-decreasing up to rounding, then sorted.
pub fn spectrum(bx: &BoxCylinder, family: SpectralFamily, k: usize) -> Result<Vec<BoxMode>> {
    let base = base_spectrum(bx, family, k)?;
    let mut out = Vec::with_capacity(base.len());
    for b in base {
        let lambda = steklov_from_base(b.alpha, bx.height, bx.rho)?;
        out.push(BoxMode {
            m: b.m,
            alpha: b.alpha,
            lambda,
            family,
        });
    }
    // Equal base eigenvalues summed in different orders may land an ulp
    // apart; only inversions beyond rounding are errors.
    if let Some(w) = out
        .windows(2)
        .find(|w| w[1].lambda < w[0].lambda * (1.0 - ORDER_SLACK))
    {
        return Err(Error::Consistency(format!(
            "Steklov eigenvalues out of order: {:?} (lambda {}) before {:?} (lambda {})",
            w[0].m, w[0].lambda, w[1].m, w[1].lambda
        )));
    }
    out.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(out)
}

fn check_mode(bx: &BoxCylinder, mode: &BoxMode) -> Result<()> {
    if mode.m.len() != bx.base_sides.len() {
        return Err(Error::domain(format!(
            "mode has {} indices, box base has {} sides",
            mode.m.len(),
            bx.base_sides.len()
        )));
    }
    if !mode.family.admits(&mode.m) {
        return Err(Error::domain(format!(
            "multi-index {:?} is not admissible for the {} family",
            mode.m, mode.family
        )));
    }
    Ok(())
}

fn lateral_factor(bx: &BoxCylinder, mode: &BoxMode, x: &[f64]) -> f64 {
    mode.m
        .iter()
        .zip(&bx.base_sides)
        .zip(x)
        .map(|((&mi, &li), &xi)| {
            let arg = mi as f64 * PI * xi / li;
            match mode.family {
                SpectralFamily::DirichletLateral => {
                    // exact zeros on the lateral faces
                    if xi == 0.0 || xi == li {
                        0.0
                    } else {
                        arg.sin()
                    }
                }
                SpectralFamily::NeumannLateral => arg.cos(),
            }
        })
        .product()
}

fn check_point(bx: &BoxCylinder, x: &[f64]) -> Result<()> {
    if x.len() != bx.dim() {
        return Err(Error::domain(format!(
            "point has {} coordinates, box is {}-dimensional",
            x.len(),
            bx.dim()
        )));
    }
    let inside = x
        .iter()
        .zip(bx.base_sides.iter().chain(std::iter::once(&bx.height)))
        .all(|(&xi, &li)| (0.0..=li).contains(&xi));
    if !inside {
        return Err(Error::domain(format!("point {x:?} lies outside the box")));
    }
    Ok(())
}

/// `u(x) = X(x_1..x_{n-1}) Y(x_n)` with unit amplitude.
pub fn eigenfunction_eval(bx: &BoxCylinder, mode: &BoxMode, x: &[f64]) -> Result<f64> {
    check_mode(bx, mode)?;
    check_point(bx, x)?;
    let n = bx.dim();
    let profile = BoundaryProfile::new(mode.alpha.sqrt(), bx.height, mode.family.profile_kind())?;
    Ok(lateral_factor(bx, mode, &x[..n - 1]) * profile.eval(x[n - 1])?)
}

/// `|Δu + λ ρ ∂u/∂ν|` at a point of the Steklov face, evaluated analytically.
///
/// On `x_n = 0`: `Δu = X Y''(0)` (the lateral part is multiplied by
/// `Y(0) = 0`) and `∂u/∂ν = X Y'(0) = X` for the inward normal `+x_n`.
pub fn steklov_residual(bx: &BoxCylinder, mode: &BoxMode, sample: &[f64]) -> Result<f64> {
    check_mode(bx, mode)?;
    check_point(bx, sample)?;
    let n = bx.dim();
    if sample[n - 1] != 0.0 {
        return Err(Error::domain(format!(
            "sample {sample:?} is not on the Steklov face x_n = 0"
        )));
    }
    let x = lateral_factor(bx, mode, &sample[..n - 1]);
    if x == 0.0 {
        return Ok(0.0);
    }
    let profile = BoundaryProfile::new(mode.alpha.sqrt(), bx.height, mode.family.profile_kind())?;
    let laplacian = x * profile.second_derivative_at_zero();
    let normal = x;
    Ok((laplacian + mode.lambda * bx.rho * normal).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use SpectralFamily::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn one_dimensional_sine_base() {
        let bx = BoxCylinder::new(vec![1.0], 2.0, 1.0).unwrap();
        let base = base_spectrum(&bx, DirichletLateral, 3).unwrap();
        let alphas: Vec<f64> = base.iter().map(|b| b.alpha / (PI * PI)).collect();
        assert_eq!(base.iter().map(|b| b.m[0]).collect::<Vec<_>>(), vec![1, 2, 3]);
        for (a, e) in alphas.iter().zip([1.0, 4.0, 9.0]) {
            assert!(rel(*a, e) < 1e-15);
        }
    }

    #[test]
    fn square_neumann_multiplicity_and_tiebreak() {
        let bx = BoxCylinder::new(vec![1.0, 1.0], 2.0, 1.0).unwrap();
        let base = base_spectrum(&bx, NeumannLateral, 2).unwrap();
        assert_eq!(base[0].m, vec![0, 1]);
        assert_eq!(base[1].m, vec![1, 0]);
        assert_eq!(base[0].alpha, base[1].alpha);
        assert!(rel(base[0].alpha, PI * PI) < 1e-15);
    }

    #[test]
    fn rectangle_dirichlet_ground_mode() {
        let bx = BoxCylinder::new(vec![1.0, 2.0], 3.0, 1.0).unwrap();
        let base = base_spectrum(&bx, DirichletLateral, 1).unwrap();
        assert_eq!(base[0].m, vec![1, 1]);
        assert!(rel(base[0].alpha, 1.25 * PI * PI) < 1e-15);
    }

    #[test]
    fn k_zero_rejected() {
        let bx = BoxCylinder::new(vec![1.0], 2.0, 1.0).unwrap();
        assert!(base_spectrum(&bx, DirichletLateral, 0).is_err());
        assert!(BoxCylinder::new(vec![1.0, -1.0], 2.0, 1.0).is_err());
        assert!(BoxCylinder::new(vec![1.0], 0.0, 1.0).is_err());
        assert!(BoxCylinder::new(vec![1.0], 1.0, f64::NAN).is_err());
    }

    #[test]
    fn height_hypothesis_flag() {
        assert!(BoxCylinder::new(vec![1.0, 1.5], 2.0, 1.0).unwrap().height_dominates());
        let wide = BoxCylinder::new(vec![3.0], 2.0, 1.0).unwrap();
        assert!(!wide.height_dominates());
        assert_eq!(wide.warnings().len(), 1);
    }

    #[test]
    fn rho_scaling_is_division() {
        let a = steklov_from_base(PI * PI, 2.0, 1.0).unwrap();
        let b = steklov_from_base(PI * PI, 2.0, 2.0).unwrap();
        assert_eq!(a / 2.0, b);
        assert!(steklov_from_base(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn large_alpha_limit() {
        let alpha = 1e6;
        let v = steklov_from_base(alpha, 2.0, 3.0).unwrap();
        assert!(rel(v, 2.0 * alpha.sqrt() / 3.0) < 1e-14);
    }

    #[test]
    fn eigenfunction_zero_sets() {
        let bx = BoxCylinder::new(vec![1.0, 1.5], 2.0, 1.0).unwrap();
        for family in [DirichletLateral, NeumannLateral] {
            for mode in spectrum(&bx, family, 6).unwrap() {
                assert_eq!(eigenfunction_eval(&bx, &mode, &[0.3, 0.4, 0.0]).unwrap(), 0.0);
                assert_eq!(eigenfunction_eval(&bx, &mode, &[0.3, 0.4, 2.0]).unwrap(), 0.0);
                if family == DirichletLateral {
                    assert_eq!(eigenfunction_eval(&bx, &mode, &[0.0, 0.4, 1.0]).unwrap(), 0.0);
                    assert_eq!(eigenfunction_eval(&bx, &mode, &[0.3, 1.5, 1.0]).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn eigenfunction_factorizes() {
        let bx = BoxCylinder::new(vec![1.0], 1.0, 1.0).unwrap();
        let mode = spectrum(&bx, DirichletLateral, 1).unwrap().remove(0);
        let y = BoundaryProfile::new(PI, 1.0, ProfileKind::Y).unwrap().eval(0.3).unwrap();
        let u = eigenfunction_eval(&bx, &mode, &[0.5, 0.3]).unwrap();
        assert!((u - y).abs() < 1e-15);
        assert!(eigenfunction_eval(&bx, &mode, &[1.5, 0.3]).is_err());
        assert!(eigenfunction_eval(&bx, &mode, &[0.5]).is_err());
    }

    #[test]
    fn residual_on_nodal_line_is_zero() {
        let bx = BoxCylinder::new(vec![1.0], 2.0, 1.0).unwrap();
        let mode = spectrum(&bx, DirichletLateral, 2).unwrap().remove(1);
        assert!(steklov_residual(&bx, &mode, &[0.5, 0.0]).unwrap() < 1e-12);
        assert_eq!(steklov_residual(&bx, &mode, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(steklov_residual(&bx, &mode, &[0.5, 0.1]).is_err());
    }

    #[test]
    fn inadmissible_mode_rejected() {
        let bx = BoxCylinder::new(vec![1.0], 2.0, 1.0).unwrap();
        let mode = BoxMode {
            m: vec![0],
            alpha: 1.0,
            lambda: 1.0,
            family: DirichletLateral,
        };
        assert!(eigenfunction_eval(&bx, &mode, &[0.5, 0.5]).is_err());
    }
}
