//! Enumeration of non-negative integer points inside the axis-aligned
//! ellipsoid `sum_i (m_i / l_i)^2 <= R^2`.
//!
//! Every membership test evaluates the same left-to-right sum, so a point
//! exactly on the boundary is classified identically by counting, visiting
//! and any naive loop that folds the terms in the same order.

use crate::boxspec::SpectralFamily;
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Largest count the enumerator will attempt; above this `f64` radii can no
/// longer be compared exactly against integer-derived sums.
pub const MAX_COUNT: f64 = 9_007_199_254_740_992.0; // 2^53

#[inline]
pub fn term(m: u32, side: f64) -> f64 {
    let r = m as f64 / side;
    r * r
}

/// `sum_i (m_i / l_i)^2`, folded left to right.
pub fn lattice_norm_sq(m: &[u32], sides: &[f64]) -> f64 {
    m.iter().zip(sides).fold(0.0, |acc, (&mi, &li)| acc + term(mi, li))
}

fn min_index(family: SpectralFamily) -> u32 {
    match family {
        SpectralFamily::DirichletLateral => 1,
        SpectralFamily::NeumannLateral => 0,
    }
}

pub(crate) fn check_sides(sides: &[f64]) -> Result<()> {
    if sides.is_empty() {
        return Err(Error::domain("at least one base side is required"));
    }
    if let Some(bad) = sides.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::domain(format!(
            "base sides must be positive and finite, got {bad}"
        )));
    }
    Ok(())
}

/// Crude a-priori bound `prod_i (floor(l_i R) + 1)` on the number of points.
fn check_size(sides: &[f64], radius: f64) -> Result<()> {
    let bound: f64 = sides.iter().map(|l| (l * radius).floor() + 1.0).product();
    if !(bound <= MAX_COUNT) {
        return Err(Error::Unsupported(format!(
            "radius {radius} implies up to {bound:e} lattice points (limit 2^53)"
        )));
    }
    Ok(())
}

/// Largest `m >= lo` with `partial + term(m, side) <= r2`, if any.
fn last_inside(partial: f64, side: f64, r2: f64, lo: u32) -> Option<u32> {
    if partial + term(lo, side) > r2 {
        return None;
    }
    let room = (r2 - partial).max(0.0);
    let mut hi = ((side * room.sqrt()).floor() as u32).max(lo);
    while hi > lo && partial + term(hi, side) > r2 {
        hi -= 1;
    }
    while partial + term(hi + 1, side) <= r2 {
        hi += 1;
    }
    Some(hi)
}

fn count_rec(sides: &[f64], partial: f64, r2: f64, lo: u32) -> u64 {
    let (side, rest) = (sides[0], &sides[1..]);
    if rest.is_empty() {
        return last_inside(partial, side, r2, lo).map_or(0, |hi| (hi - lo) as u64 + 1);
    }
    let mut total = 0;
    let mut m = lo;
    loop {
        let p = partial + term(m, side);
        if p > r2 {
            break;
        }
        total += count_rec(rest, p, r2, lo);
        m += 1;
    }
    total
}

/// Number of admissible lattice points with `sum (m_i/l_i)^2 <= radius^2`.
///
/// The outermost coordinate is split across threads; the per-slice counts
/// are integers, so the reduction is exact.
pub fn count_points(sides: &[f64], radius: f64, family: SpectralFamily) -> Result<u64> {
    check_sides(sides)?;
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::domain(format!("radius must be >= 0, got {radius}")));
    }
    check_size(sides, radius)?;
    let r2 = radius * radius;
    let lo = min_index(family);
    let (side, rest) = (sides[0], &sides[1..]);
    let total = if rest.is_empty() {
        count_rec(sides, 0.0, r2, lo)
    } else {
        match last_inside(0.0, side, r2, lo) {
            None => 0,
            Some(hi) => (lo..=hi)
                .into_par_iter()
                .map(|m| count_rec(rest, term(m, side), r2, lo))
                .sum(),
        }
    };
    Ok(match family {
        // the origin is always inside and is not an admissible index
        SpectralFamily::NeumannLateral => total - 1,
        SpectralFamily::DirichletLateral => total,
    })
}

fn visit_rec(
    sides: &[f64],
    depth: usize,
    partial: f64,
    r2: f64,
    lo: u32,
    m: &mut Vec<u32>,
    f: &mut dyn FnMut(&[u32], f64),
) {
    let side = sides[depth];
    let mut k = lo;
    loop {
        let p = partial + term(k, side);
        if p > r2 {
            break;
        }
        m[depth] = k;
        if depth + 1 == sides.len() {
            f(m, p);
        } else {
            visit_rec(sides, depth + 1, p, r2, lo, m, f);
        }
        k += 1;
    }
}

/// Calls `f(m, q)` for every admissible point `m` with `q = sum (m_i/l_i)^2 <= radius^2`,
/// in lexicographic order of `m`.
pub fn for_each_point(
    sides: &[f64],
    radius: f64,
    family: SpectralFamily,
    mut f: impl FnMut(&[u32], f64),
) -> Result<()> {
    check_sides(sides)?;
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::domain(format!("radius must be >= 0, got {radius}")));
    }
    check_size(sides, radius)?;
    let lo = min_index(family);
    let mut m = vec![0; sides.len()];
    let neumann = family == SpectralFamily::NeumannLateral;
    visit_rec(sides, 0, 0.0, radius * radius, lo, &mut m, &mut |pt, q| {
        if !(neumann && pt.iter().all(|&x| x == 0)) {
            f(pt, q)
        }
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use SpectralFamily::*;

    fn naive(sides: &[f64], radius: f64, family: SpectralFamily) -> u64 {
        let mut count = 0;
        let lo = min_index(family);
        let bound = |l: f64| (l * radius).ceil() as u32 + 1;
        let mut m = vec![lo; sides.len()];
        loop {
            let admissible = family == DirichletLateral || m.iter().any(|&x| x > 0);
            if admissible && lattice_norm_sq(&m, sides) <= radius * radius {
                count += 1;
            }
            let mut d = 0;
            loop {
                if d == m.len() {
                    return count;
                }
                m[d] += 1;
                if m[d] <= bound(sides[d]) {
                    break;
                }
                m[d] = lo;
                d += 1;
            }
        }
    }

    #[test]
    fn documented_counts() {
        assert_eq!(count_points(&[1.0, 1.0], 2.2, DirichletLateral).unwrap(), 1);
        assert_eq!(count_points(&[1.0, 1.0], 2.2, NeumannLateral).unwrap(), 5);
        assert_eq!(count_points(&[1.0], 3.5, DirichletLateral).unwrap(), 3);
        assert_eq!(count_points(&[1.0], 0.0, NeumannLateral).unwrap(), 0);
    }

    #[test]
    fn boundary_points_are_inside() {
        // (3,4) lies exactly on the circle of radius 5
        let n = count_points(&[1.0, 1.0], 5.0, DirichletLateral).unwrap();
        assert_eq!(n, naive(&[1.0, 1.0], 5.0, DirichletLateral));
        let mut seen = false;
        for_each_point(&[1.0, 1.0], 5.0, DirichletLateral, |m, _| {
            seen |= m == [3, 4];
        })
        .unwrap();
        assert!(seen);
    }

    #[test]
    fn visit_matches_count() {
        for family in [DirichletLateral, NeumannLateral] {
            let sides = [1.0, 0.7, 1.3];
            let mut n = 0u64;
            for_each_point(&sides, 6.3, family, |_, _| n += 1).unwrap();
            assert_eq!(n, count_points(&sides, 6.3, family).unwrap());
            assert_eq!(n, naive(&sides, 6.3, family));
        }
    }

    #[test]
    fn rejects_huge_radius() {
        assert!(matches!(
            count_points(&[1.0, 1.0, 1.0], 1e6, NeumannLateral),
            Err(Error::Unsupported(_))
        ));
        assert!(count_points(&[1.0], -1.0, NeumannLateral).is_err());
        assert!(count_points(&[], 1.0, NeumannLateral).is_err());
    }
}
