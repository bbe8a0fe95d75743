//! Exact eigenvalue counting functions for boxes.
//!
//! A mode with base multi-index `m` has `lambda <= tau` iff
//! `t(pi sqrt(q) l_n) <= rho l_n tau` with `q = sum (m_i/l_i)^2`. Because `t`
//! is increasing, on `rho l_n tau >= t(1)` this is the lattice condition
//! `q <= (h(rho l_n tau) / (pi l_n))^2`. Both formulations are evaluated and
//! cross-checked.

use crate::boxspec::{BoxCylinder, SpectralFamily};
use crate::error::{Error, Result};
use crate::lattice;
use crate::profile::{self, h_inverse, t_unchecked, unit_ball_volume};
use crate::weyl;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Relative width of the band around the threshold inside which the `t`-side
/// and lattice-side classifications may differ.
pub const TIE_BAND: f64 = 1e-12;

/// Points `m` with `sum (m_i/l_i)^2 <= radius^2`, admissible for `family`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeQuery {
    pub sides: Vec<f64>,
    pub radius: f64,
    pub family: SpectralFamily,
}

impl LatticeQuery {
    pub fn count(&self) -> Result<u64> {
        lattice::count_points(&self.sides, self.radius, self.family)
    }
}

pub fn count_lattice(q: &LatticeQuery) -> Result<u64> {
    q.count()
}

/// Number of modes of `family` with `lambda <= tau`, counted with
/// multiplicity.
///
/// The returned value comes from enumerating modes and testing the `t`
/// inequality. When the inverse `h` is available the lattice count at the
/// equivalent radius is computed as well; a mismatch, or a mode classified
/// differently by the two tests outside a `1e-12` relative band, is a
/// [`Error::Consistency`].
pub fn counting_function(bx: &BoxCylinder, family: SpectralFamily, tau: f64) -> Result<u64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("tau must be positive and finite, got {tau}")));
    }
    let height = bx.height();
    let threshold = bx.rho() * height * tau;
    if !threshold.is_finite() {
        return Err(Error::domain(format!("rho * l_n * tau overflows for tau = {tau}")));
    }
    let sides = bx.base_sides();
    let to_s = |q: f64| PI * q.sqrt() * height;

    // s-domain radii, in q-units
    let band = if threshold >= t_unchecked(1.0) {
        let h = h_inverse(threshold)?;
        Some((
            h * (1.0 - TIE_BAND) / (PI * height),
            h * (1.0 + TIE_BAND) / (PI * height),
        ))
    } else {
        None
    };

    // enumeration radius: large enough that everything outside fails the t test
    let min_side = sides.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut radius = 1.0 / min_side;
    while t_unchecked(PI * height * radius) <= threshold {
        radius *= 2.0;
    }
    if let Some((_, hi)) = band {
        radius = radius.max(hi);
    }

    let mut direct = 0u64;
    let mut conflict: Option<String> = None;
    lattice::for_each_point(sides, radius, family, |m, q| {
        let t_ok = t_unchecked(to_s(q)) <= threshold;
        let counted = match band {
            None => t_ok,
            Some((lo, hi)) => {
                let in_hi = q <= hi * hi;
                let in_lo = q <= lo * lo;
                if conflict.is_none() && (t_ok && !in_hi || !t_ok && in_lo) {
                    conflict = Some(format!(
                        "mode {m:?}: t test says {t_ok}, lattice test disagrees outside the tie band"
                    ));
                }
                t_ok || in_hi
            }
        };
        direct += counted as u64;
    })?;
    if let Some(msg) = conflict {
        return Err(Error::Consistency(msg));
    }

    if let Some((_, hi)) = band {
        let inverse = lattice::count_points(sides, hi, family)?;
        if inverse != direct {
            return Err(Error::Consistency(format!(
                "counting paths disagree at tau = {tau}: direct {direct}, lattice {inverse}"
            )));
        }
    }
    Ok(direct)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::domain(format!("R must be >= 0 and finite, got {r}")));
    }
    Ok(())
}

/// Volume of the positive-orthant part of `sum (m_i/l_i)^2 <= R^2`:
/// `omega_d 2^{-d} prod(l_i) R^d`, `d = n - 1`.
pub fn ellipsoid_volume(bx: &BoxCylinder, r: f64) -> Result<f64> {
    check_radius(r)?;
    let sides = bx.base_sides();
    let d = sides.len() as u32;
    Ok(unit_ball_volume(d)? * 0.5f64.powi(d as i32) * bx.face_area() * r.powi(d as i32))
}

/// `(V, V + sqrt(d) T)` with `T = 2^{-d} d omega_d (l R)^{d-1}` the area of
/// the orthant sphere of radius `l R`. Only cube bases are supported.
pub fn ellipsoid_volume_bound(bx: &BoxCylinder, r: f64) -> Result<(f64, f64)> {
    let v = ellipsoid_volume(bx, r)?;
    let sides = bx.base_sides();
    let l = sides[0];
    if sides.iter().any(|&x| x != l) {
        return Err(Error::Unsupported(format!(
            "surface bound needs equal base sides, got {sides:?}"
        )));
    }
    let d = sides.len() as u32;
    let df = d as f64;
    let area = 0.5f64.powi(d as i32) * df * unit_ball_volume(d)? * (l * r).powi(d as i32 - 1);
    Ok((v, v + df.sqrt() * area))
}

/// `1 / (1 + lambda)`.
pub fn mu_from_lambda(lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(1.0 / (1.0 + lambda))
}

/// `mu* / (1 + mu*)`.
pub fn mu_from_mu_star(mu_star: f64) -> Result<f64> {
    if !(mu_star > 0.0) {
        return Err(Error::domain(format!("mu* must be > 0, got {mu_star}")));
    }
    if mu_star.is_infinite() {
        return Ok(1.0);
    }
    Ok(mu_star / (1.0 + mu_star))
}

/// Dirichlet- and Neumann-family counts on a grid of `tau`, with the Weyl
/// prediction for the Steklov face.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingCurve {
    pub taus: Vec<f64>,
    pub counts0: Vec<u64>,
    pub counts_f: Vec<u64>,
    pub weyl: Vec<f64>,
    pub ratios0: Vec<f64>,
    pub ratios_f: Vec<f64>,
}

pub fn counting_curve(bx: &BoxCylinder, taus: &[f64]) -> Result<CountingCurve> {
    if taus.is_empty() {
        return Err(Error::domain("tau grid is empty"));
    }
    if taus.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("tau grid must be strictly ascending"));
    }
    let data = weyl::BoundaryData::for_box(bx)?;
    let rows: Vec<(u64, u64, f64)> = taus
        .par_iter()
        .map(|&tau| {
            let a0 = counting_function(bx, SpectralFamily::DirichletLateral, tau)?;
            let af = counting_function(bx, SpectralFamily::NeumannLateral, tau)?;
            Ok((a0, af, weyl::predict_count(&data, tau)?))
        })
        .collect::<Result<_>>()?;

    let counts0: Vec<u64> = rows.iter().map(|r| r.0).collect();
    let counts_f: Vec<u64> = rows.iter().map(|r| r.1).collect();
    let weyl: Vec<f64> = rows.iter().map(|r| r.2).collect();
    if let Some(i) = (0..taus.len()).find(|&i| counts0[i] > counts_f[i]) {
        return Err(Error::Consistency(format!(
            "bracket violated at tau = {}: A0 = {} > Af = {}",
            taus[i], counts0[i], counts_f[i]
        )));
    }
    let monotone = |c: &[u64]| c.windows(2).all(|w| w[0] <= w[1]);
    if !monotone(&counts0) || !monotone(&counts_f) {
        return Err(Error::Consistency("counts decrease along the tau grid".into()));
    }
    let ratios0 = counts0.iter().zip(&weyl).map(|(&c, w)| c as f64 / w).collect();
    let ratios_f = counts_f.iter().zip(&weyl).map(|(&c, w)| c as f64 / w).collect();
    Ok(CountingCurve {
        taus: taus.to_vec(),
        counts0,
        counts_f,
        weyl,
        ratios0,
        ratios_f,
    })
}

/// Smallest `tau` at which the family has at least one mode, i.e. the
/// bottom of its spectrum.
pub fn spectral_floor(bx: &BoxCylinder, family: SpectralFamily) -> Result<f64> {
    let alpha = crate::boxspec::base_spectrum(bx, family, 1)?[0].alpha;
    Ok(profile::t_profile(alpha.sqrt() * bx.height())? / (bx.rho() * bx.height()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxspec::spectrum;
    use SpectralFamily::*;

    fn bx(sides: &[f64], h: f64, rho: f64) -> BoxCylinder {
        BoxCylinder::new(sides.to_vec(), h, rho).unwrap()
    }

    #[test]
    fn query_examples() {
        let q = LatticeQuery {
            sides: vec![1.0, 1.0],
            radius: 2.2,
            family: NeumannLateral,
        };
        assert_eq!(count_lattice(&q).unwrap(), 5);
    }

    #[test]
    fn below_spectrum_is_zero() {
        let b = bx(&[1.0], 2.0, 1.0);
        let floor = spectral_floor(&b, DirichletLateral).unwrap();
        assert_eq!(counting_function(&b, DirichletLateral, floor * 0.999).unwrap(), 0);
        assert_eq!(counting_function(&b, DirichletLateral, 1.0).unwrap(), 0);
        assert!(counting_function(&b, DirichletLateral, 0.0).is_err());
    }

    #[test]
    fn counts_jump_at_eigenvalues() {
        let b = bx(&[1.0, 1.3], 2.0, 1.5);
        for family in [DirichletLateral, NeumannLateral] {
            let modes = spectrum(&b, family, 40).unwrap();
            for (k, mode) in modes.iter().enumerate() {
                let at = counting_function(&b, family, mode.lambda).unwrap();
                let below = counting_function(&b, family, mode.lambda * (1.0 - 1e-9)).unwrap();
                assert!(at as usize >= k + 1);
                assert!((below as usize) <= k);
            }
        }
    }

    #[test]
    fn volume_examples() {
        let (v, up) = ellipsoid_volume_bound(&bx(&[1.0, 1.0], 2.0, 1.0), 2.2).unwrap();
        assert!((v - PI * 4.84 / 4.0).abs() < 1e-14);
        assert!((up - (v + 2f64.sqrt() * PI * 2.2 / 2.0)).abs() < 1e-13);
        let (v1, _) = ellipsoid_volume_bound(&bx(&[1.0], 2.0, 1.0), 3.5).unwrap();
        assert_eq!(v1, 3.5);
        assert!(matches!(
            ellipsoid_volume_bound(&bx(&[1.0, 2.0], 3.0, 1.0), 2.0),
            Err(Error::Unsupported(_))
        ));
        assert!(ellipsoid_volume(&bx(&[1.0, 2.0], 3.0, 1.0), 2.0).is_ok());
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_from_lambda(0.0).unwrap(), 1.0);
        assert_eq!(mu_from_lambda(3.0).unwrap(), 0.25);
        assert_eq!(mu_from_mu_star(3.0).unwrap(), 0.75);
        assert!(mu_from_lambda(-1.0).is_err());
        assert!(mu_from_mu_star(0.0).is_err());
        assert!(mu_from_lambda(1e300).unwrap() > 0.0);
    }

    #[test]
    fn curve_brackets() {
        let c = counting_curve(&bx(&[1.0, 1.0], 2.0, 1.0), &[50.0, 100.0, 150.0]).unwrap();
        assert_eq!(c.counts0.len(), 3);
        assert!(counting_curve(&bx(&[1.0], 2.0, 1.0), &[2.0, 1.0]).is_err());
    }
}
