use super::banded::BandCholesky;
use super::grid::{BoundaryPartition, Face, FaceCondition, Grid2D};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Largest normwise backward error accepted from an interior solve.
pub const SOLVE_TOL: f64 = 1e-11;

/// Largest condition number accepted for the block eliminated by the Schur
/// complement.
pub const MAX_CONDITION: f64 = 1e12;

/// Factored `-Δ_h` (5-point) on the interior nodes of a grid.
///
/// Fields are passed in x-fastest order ([`Grid2D::interior_index`]); the
/// factorization itself runs along the shorter grid direction to keep the
/// band narrow.
#[derive(Debug, Clone)]
pub struct DiscreteLaplacian {
    grid: Grid2D,
    chol: BandCholesky,
    x_fastest: bool,
}

impl DiscreteLaplacian {
    pub fn new(grid: Grid2D) -> Result<Self> {
        let (px, py) = (grid.nx() - 1, grid.ny() - 1);
        let x_fastest = px <= py;
        let (fast, slow) = if x_fastest { (px, py) } else { (py, px) };
        let (cf, cs) = {
            let (cx, cy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
            if x_fastest {
                (cx, cy)
            } else {
                (cy, cx)
            }
        };
        let diag = 2.0 * cf + 2.0 * cs;
        let entry = |r: usize, c: usize| {
            if r == c {
                diag
            } else if r - c == 1 && r % fast != 0 {
                -cf
            } else if r - c == fast {
                -cs
            } else {
                0.0
            }
        };
        let chol = BandCholesky::factor(fast * slow, fast, entry)?;
        Ok(Self {
            grid,
            chol,
            x_fastest,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn to_solver_order(&self, v: &[f64]) -> Vec<f64> {
        if self.x_fastest {
            return v.to_vec();
        }
        let (px, py) = (self.grid.nx() - 1, self.grid.ny() - 1);
        let mut out = vec![0.0; v.len()];
        for j in 0..py {
            for i in 0..px {
                out[i * py + j] = v[j * px + i];
            }
        }
        out
    }

    fn from_solver_order(&self, v: &[f64]) -> Vec<f64> {
        if self.x_fastest {
            return v.to_vec();
        }
        let (px, py) = (self.grid.nx() - 1, self.grid.ny() - 1);
        let mut out = vec![0.0; v.len()];
        for j in 0..py {
            for i in 0..px {
                out[j * px + i] = v[i * py + j];
            }
        }
        out
    }

    /// Solves `-Δ_h x = rhs` (x-fastest order).
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.to_solver_order(rhs);
        self.chol.solve_in_place(&mut x);
        self.from_solver_order(&x)
    }

    /// `-Δ_h x` with zero boundary values.
    pub fn apply_negative(&self, x: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let (cx, cy) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
        let mut out = vec![0.0; x.len()];
        for j in 1..ny {
            for i in 1..nx {
                let k = g.interior_index(i, j);
                let mut v = (2.0 * cx + 2.0 * cy) * x[k];
                if i > 1 {
                    v -= cx * x[k - 1];
                }
                if i + 1 < nx {
                    v -= cx * x[k + 1];
                }
                if j > 1 {
                    v -= cy * x[k - (nx - 1)];
                }
                if j + 1 < ny {
                    v -= cy * x[k + (nx - 1)];
                }
                out[k] = v;
            }
        }
        out
    }

    /// `‖A‖_∞` of `-Δ_h`.
    fn operator_norm(&self) -> f64 {
        let g = &self.grid;
        4.0 / (g.hx() * g.hx()) + 4.0 / (g.hy() * g.hy())
    }

    /// Boundary contributions `sum g_b / h^2` moved to the right-hand side of
    /// `-Δ_h w = 0`.
    fn boundary_rhs(&self, g: &[f64]) -> Vec<f64> {
        let grid = &self.grid;
        let (nx, ny) = (grid.nx(), grid.ny());
        let (cx, cy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
        let mut rhs = vec![0.0; grid.interior_len()];
        let ob = grid.face_offset(Face::Bottom);
        let ot = grid.face_offset(Face::Top);
        let ol = grid.face_offset(Face::Left);
        let or = grid.face_offset(Face::Right);
        for i in 1..nx {
            rhs[grid.interior_index(i, 1)] += cy * g[ob + i - 1];
            rhs[grid.interior_index(i, ny - 1)] += cy * g[ot + i - 1];
        }
        for j in 1..ny {
            rhs[grid.interior_index(1, j)] += cx * g[ol + j - 1];
            rhs[grid.interior_index(nx - 1, j)] += cx * g[or + j - 1];
        }
        rhs
    }

    fn check_residual(&self, x: &[f64], rhs: &[f64], what: &str) -> Result<()> {
        let ax = self.apply_negative(x);
        let r = ax
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let bn = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let scale = self.operator_norm() * xn + bn;
        if scale > 0.0 && r > SOLVE_TOL * scale {
            return Err(Error::Numerical(format!(
                "{what}: backward error {:e} exceeds {SOLVE_TOL:e} ({} unknowns, direct band solve)",
                r / scale,
                x.len()
            )));
        }
        Ok(())
    }

    /// Discrete-harmonic `w` with boundary values `g` (boundary ordering of
    /// [`Grid2D::boundary_nodes`]).
    pub fn harmonic_extension(&self, g: &[f64]) -> Result<Vec<f64>> {
        check_len(g.len(), self.grid.boundary_len(), "boundary trace")?;
        check_finite(g, "boundary trace")?;
        let rhs = self.boundary_rhs(g);
        let w = self.solve(&rhs);
        self.check_residual(&w, &rhs, "harmonic extension")?;
        Ok(w)
    }

    /// `Δ_h u = f` with `u = 0` on the boundary.
    pub fn poisson_dirichlet(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(f.len(), self.grid.interior_len(), "interior field")?;
        check_finite(f, "right-hand side")?;
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let u = self.solve(&rhs);
        self.check_residual(&u, &rhs, "Poisson solve")?;
        Ok(u)
    }

    /// Inward normal derivative of `u` (zero on the boundary) given
    /// `Δu` on the boundary nodes.
    ///
    /// On a face `u_tt = 0`, so `u_nn = Δu` there and a Taylor step gives
    /// `u_ν = u_1 / h - (h / 2) Δu`, with `u_1` the first interior value
    /// along the normal.
    pub fn normal_derivative(&self, u: &[f64], boundary_laplacian: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        check_len(u.len(), g.interior_len(), "interior field")?;
        check_len(boundary_laplacian.len(), g.boundary_len(), "boundary trace")?;
        let first = self.first_interior(u, 1);
        Ok(g
            .boundary_nodes()
            .iter()
            .zip(first)
            .zip(boundary_laplacian)
            .map(|((node, u1), w)| {
                let h = g.normal_step(node.face);
                u1 / h - 0.5 * h * w
            })
            .collect())
    }

    /// `(4 u_1 - u_2) / (2h)`, the one-sided second-order difference.
    pub fn normal_derivative_one_sided(&self, u: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        check_len(u.len(), g.interior_len(), "interior field")?;
        let u1 = self.first_interior(u, 1);
        let u2 = self.first_interior(u, 2);
        Ok(g
            .boundary_nodes()
            .iter()
            .enumerate()
            .map(|(k, node)| (4.0 * u1[k] - u2[k]) / (2.0 * g.normal_step(node.face)))
            .collect())
    }

    /// Values at distance `depth` steps inward from each boundary node.
    fn first_interior(&self, u: &[f64], depth: usize) -> Vec<f64> {
        let g = &self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        g.boundary_nodes()
            .iter()
            .map(|n| {
                let (i, j) = match n.face {
                    Face::Bottom => (n.i, depth),
                    Face::Top => (n.i, ny - depth),
                    Face::Left => (depth, n.j),
                    Face::Right => (nx - depth, n.j),
                };
                u[g.interior_index(i, j)]
            })
            .collect()
    }

    /// `g -> u_ν` where `w` is the harmonic extension of `g` and
    /// `Δ_h u = w`, `u = 0` on the boundary.
    pub fn boundary_map(&self, g: &[f64]) -> Result<Vec<f64>> {
        let w = self.harmonic_extension(g)?;
        let u = self.poisson_dirichlet(&w)?;
        self.normal_derivative(&u, g)
    }
}

fn check_len(got: usize, want: usize, what: &str) -> Result<()> {
    if got != want {
        return Err(Error::domain(format!("{what} has length {got}, expected {want}")));
    }
    Ok(())
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain(format!("{what} contains non-finite values")));
    }
    Ok(())
}

/// The reduced boundary operator on the Steklov nodes together with what is
/// needed to reconstruct full boundary data.
#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    /// Indices into the boundary ordering of the Steklov nodes.
    pub steklov_nodes: Vec<usize>,
    /// Indices of the `∂u/∂ν = 0` nodes.
    pub hard_nodes: Vec<usize>,
    /// Reduced operator, `|S| x |S|`.
    pub reduced: DMatrix<f64>,
    /// `-F_HH^{-1} F_HS`, mapping Steklov data to the eliminated values.
    pub hard_from_steklov: DMatrix<f64>,
    /// 2-norm condition number of `F_HH` (1 when there are no such nodes).
    pub hard_condition: f64,
}

/// Assembles the boundary map column by column and eliminates the
/// `∂u/∂ν = 0` nodes by a Schur complement.
pub fn assemble_boundary_operator(
    lap: &DiscreteLaplacian,
    part: &BoundaryPartition,
) -> Result<BoundaryOperator> {
    part.validate()?;
    let grid = lap.grid();
    let nodes = grid.boundary_nodes();
    let mut steklov = Vec::new();
    let mut hard = Vec::new();
    for (k, node) in nodes.iter().enumerate() {
        match part.get(node.face) {
            FaceCondition::Steklov(_) => steklov.push(k),
            FaceCondition::HardNu => hard.push(k),
            FaceCondition::SoftFree => {}
        }
    }
    let active: Vec<usize> = steklov.iter().chain(&hard).copied().collect();
    let nb = grid.boundary_len();

    let columns: Vec<Vec<f64>> = active
        .par_iter()
        .map(|&c| {
            let mut g = vec![0.0; nb];
            g[c] = 1.0;
            let trace = lap.boundary_map(&g)?;
            Ok(active.iter().map(|&r| trace[r]).collect())
        })
        .collect::<Result<_>>()?;

    let na = active.len();
    let ns = steklov.len();
    let full = DMatrix::from_fn(na, na, |r, c| columns[c][r]);
    let f_ss = full.view((0, 0), (ns, ns)).into_owned();
    if hard.is_empty() {
        return Ok(BoundaryOperator {
            steklov_nodes: steklov,
            hard_nodes: hard,
            reduced: f_ss,
            hard_from_steklov: DMatrix::zeros(0, ns),
            hard_condition: 1.0,
        });
    }
    let nh = hard.len();
    let f_sh = full.view((0, ns), (ns, nh)).into_owned();
    let f_hs = full.view((ns, 0), (nh, ns)).into_owned();
    let f_hh = full.view((ns, ns), (nh, nh)).into_owned();

    let sv = f_hh.clone().singular_values();
    let (smax, smin) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Config(format!(
            "block on the u_nu = 0 faces is singular (condition estimate {cond:e})"
        )));
    }
    let lu = f_hh.lu();
    let solved = lu.solve(&f_hs).ok_or_else(|| {
        Error::Config(format!(
            "block on the u_nu = 0 faces is singular (condition estimate {cond:e})"
        ))
    })?;
    let reduced = &f_ss - &f_sh * &solved;
    Ok(BoundaryOperator {
        steklov_nodes: steklov,
        hard_nodes: hard,
        reduced,
        hard_from_steklov: -solved,
        hard_condition: cond,
    })
}
