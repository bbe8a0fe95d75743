use super::grid::{BoundaryPartition, FaceCondition, Grid2D};
use super::jacobi::cyclic_jacobi;
use super::operator::{assemble_boundary_operator, BoundaryOperator, DiscreteLaplacian};
use crate::error::{Error, Result};
use nalgebra::DVector;
use std::sync::OnceLock;

/// Off-diagonal stopping threshold of the Jacobi eigensolver, relative to
/// `‖M‖_F`.
pub const JACOBI_TOL: f64 = 1e-12;

/// Largest accepted relative asymmetry of the similarity-transformed
/// operator before symmetrization.
pub const MAX_ASYMMETRY: f64 = 1e-3;

/// Relative gap below which neighbouring eigenvalues are grouped when
/// reporting multiplicities.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Interior and boundary fields belonging to one boundary datum.
#[derive(Debug, Clone)]
pub struct ModeFields {
    /// `Δu` on all boundary nodes (zero on `Δu = 0` faces).
    pub boundary: Vec<f64>,
    /// `w = Δu` on interior nodes.
    pub w: Vec<f64>,
    /// `u` on interior nodes.
    pub u: Vec<f64>,
    /// Inward `∂u/∂ν` on all boundary nodes.
    pub normal: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    /// Ascending, positive.
    pub eigenvalues: Vec<f64>,
    /// `Δu` on the Steklov nodes for each eigenvalue.
    pub boundary_modes: Vec<Vec<f64>>,
    /// `∂u/∂ν` on the Steklov nodes for each eigenvalue.
    pub normal_traces: Vec<Vec<f64>>,
    pub rayleigh_quotients: Vec<f64>,
    /// `|λ - R(g)| / λ`.
    pub rayleigh_residuals: Vec<f64>,
    /// `‖M - M^T‖_F / ‖M‖_F` before symmetrization.
    pub asymmetry_norm: f64,
    /// Largest normalized `ρ`-weighted boundary product of distinct normal
    /// traces.
    pub orthogonality_defect: f64,
    /// Number of Jacobi sweeps used.
    pub sweeps: usize,
}

impl SteklovSpectrum {
    /// Sizes of clusters of eigenvalues closer than [`CLUSTER_TOL`] relative.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            if k > 0 && (l - self.eigenvalues[k - 1]).abs() <= CLUSTER_TOL * l {
                *out.last_mut().unwrap() += 1;
            } else {
                out.push(1);
            }
        }
        out
    }
}

/// A discretized problem: factored Laplacian plus the reduced boundary
/// operator.
#[derive(Debug, Clone)]
pub struct SteklovProblem {
    lap: DiscreteLaplacian,
    part: BoundaryPartition,
    op: BoundaryOperator,
    /// Density on each Steklov node.
    rho: Vec<f64>,
    /// Boundary quadrature weight on each Steklov node.
    weight: Vec<f64>,
}

impl SteklovProblem {
    pub fn new(grid: Grid2D, part: BoundaryPartition) -> Result<Self> {
        part.validate()?;
        let lap = DiscreteLaplacian::new(grid)?;
        let op = assemble_boundary_operator(&lap, &part)?;
        let nodes = grid.boundary_nodes();
        let (rho, weight) = op
            .steklov_nodes
            .iter()
            .map(|&k| {
                let face = nodes[k].face;
                let rho = match part.get(face) {
                    FaceCondition::Steklov(r) => r,
                    _ => unreachable!("Steklov node on a non-Steklov face"),
                };
                (rho, grid.tangential_step(face))
            })
            .unzip();
        Ok(Self {
            lap,
            part,
            op,
            rho,
            weight,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        self.lap.grid()
    }

    pub fn partition(&self) -> &BoundaryPartition {
        &self.part
    }

    pub fn laplacian(&self) -> &DiscreteLaplacian {
        &self.lap
    }

    pub fn operator(&self) -> &BoundaryOperator {
        &self.op
    }

    pub fn steklov_len(&self) -> usize {
        self.op.steklov_nodes.len()
    }

    /// `ρ^{1/2} W^{1/2} F W^{-1/2} ρ^{1/2}` (row-major) with `W` the
    /// boundary quadrature weights.
    fn transformed(&self) -> Vec<f64> {
        let n = self.steklov_len();
        let left: Vec<f64> = (0..n).map(|i| (self.rho[i] * self.weight[i]).sqrt()).collect();
        let right: Vec<f64> = (0..n).map(|i| (self.rho[i] / self.weight[i]).sqrt()).collect();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = left[i] * self.op.reduced[(i, j)] * right[j];
            }
        }
        m
    }

    /// Relative Frobenius asymmetry of the transformed operator.
    pub fn asymmetry_norm(&self) -> f64 {
        let n = self.steklov_len();
        let m = self.transformed();
        let (mut diff, mut norm) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let d = m[i * n + j] - m[j * n + i];
                diff += d * d;
                norm += m[i * n + j] * m[i * n + j];
            }
        }
        (diff / norm).sqrt()
    }

    /// Full boundary data from values on the Steklov nodes, including the
    /// values forced on `∂u/∂ν = 0` faces.
    pub fn full_boundary(&self, g_steklov: &[f64]) -> Result<Vec<f64>> {
        if g_steklov.len() != self.steklov_len() {
            return Err(Error::domain(format!(
                "boundary mode has length {}, expected {}",
                g_steklov.len(),
                self.steklov_len()
            )));
        }
        let mut g = vec![0.0; self.grid().boundary_len()];
        for (&k, &v) in self.op.steklov_nodes.iter().zip(g_steklov) {
            g[k] = v;
        }
        if !self.op.hard_nodes.is_empty() {
            let gh = &self.op.hard_from_steklov * DVector::from_column_slice(g_steklov);
            for (&k, &v) in self.op.hard_nodes.iter().zip(gh.iter()) {
                g[k] = v;
            }
        }
        Ok(g)
    }

    pub fn mode_fields(&self, g_steklov: &[f64]) -> Result<ModeFields> {
        let boundary = self.full_boundary(g_steklov)?;
        let w = self.lap.harmonic_extension(&boundary)?;
        let u = self.lap.poisson_dirichlet(&w)?;
        let normal = self.lap.normal_derivative(&u, &boundary)?;
        Ok(ModeFields {
            boundary,
            w,
            u,
            normal,
        })
    }

    /// Discrete `∫|Δu|^2 / ∫ρ u_ν^2` for boundary data `g` on the Steklov
    /// nodes. Trapezoid weights in the interior, face spacing on the
    /// boundary.
    pub fn rayleigh_quotient(&self, g_steklov: &[f64]) -> Result<f64> {
        let f = self.mode_fields(g_steklov)?;
        Ok(self.quotient_of(&f)?)
    }

    fn quotient_of(&self, f: &ModeFields) -> Result<f64> {
        let grid = self.grid();
        let cell = grid.hx() * grid.hy();
        let num = cell * f.w.iter().map(|v| v * v).sum::<f64>()
            + 0.5 * cell * f.boundary.iter().map(|v| v * v).sum::<f64>();
        let den: f64 = self
            .op
            .steklov_nodes
            .iter()
            .enumerate()
            .map(|(i, &k)| self.rho[i] * self.weight[i] * f.normal[k] * f.normal[k])
            .sum();
        if !(den > 0.0) || !(num > 0.0) {
            return Err(Error::DegenerateMode(format!(
                "Rayleigh quotient undefined (numerator {num:e}, denominator {den:e})"
            )));
        }
        Ok(num / den)
    }

    /// The `k` smallest eigenvalues with modes and diagnostics.
    pub fn spectrum(&self, k: usize) -> Result<SteklovSpectrum> {
        sign_self_test()?;
        let n = self.steklov_len();
        if k == 0 || k > n {
            return Err(Error::domain(format!(
                "K = {k} must lie in 1..={n} (number of Steklov nodes)"
            )));
        }
        let asymmetry = self.asymmetry_norm();
        if !(asymmetry <= MAX_ASYMMETRY) {
            return Err(Error::Discretization(format!(
                "relative asymmetry {asymmetry:e} exceeds {MAX_ASYMMETRY:e}"
            )));
        }
        let raw = self.transformed();
        let mut sym = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                sym[i * n + j] = 0.5 * (raw[i * n + j] + raw[j * n + i]);
            }
        }
        let eig = cyclic_jacobi(&sym, n, JACOBI_TOL)?;
        if let Some(mu) = eig.values.iter().find(|&&m| !(m < 0.0)) {
            return Err(Error::SignContract(format!(
                "boundary operator has eigenvalue {mu:e} >= 0"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        // λ = -1/μ ascending is μ ascending
        order.sort_by(|&a, &b| eig.values[a].total_cmp(&eig.values[b]));

        let mut out = SteklovSpectrum {
            eigenvalues: Vec::with_capacity(k),
            boundary_modes: Vec::with_capacity(k),
            normal_traces: Vec::with_capacity(k),
            rayleigh_quotients: Vec::with_capacity(k),
            rayleigh_residuals: Vec::with_capacity(k),
            asymmetry_norm: asymmetry,
            orthogonality_defect: 0.0,
            sweeps: eig.sweeps,
        };
        for &idx in order.iter().take(k) {
            let lambda = -1.0 / eig.values[idx];
            let v = eig.vector(idx);
            let mut g: Vec<f64> = (0..n)
                .map(|i| (self.rho[i] / self.weight[i]).sqrt() * v[i])
                .collect();
            let pivot = g.iter().cloned().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            if pivot < 0.0 {
                g.iter_mut().for_each(|x| *x = -*x);
            }
            let fields = self.mode_fields(&g)?;
            let q = self.quotient_of(&fields)?;
            out.eigenvalues.push(lambda);
            out.rayleigh_quotients.push(q);
            out.rayleigh_residuals.push((lambda - q).abs() / lambda);
            out.normal_traces
                .push(self.op.steklov_nodes.iter().map(|&s| fields.normal[s]).collect());
            out.boundary_modes.push(g);
        }
        out.orthogonality_defect = self.orthogonality_defect(&out.normal_traces);
        Ok(out)
    }

    /// Largest `|<a, b>_ρ| / (|a|_ρ |b|_ρ)` over distinct traces.
    pub fn orthogonality_defect(&self, traces: &[Vec<f64>]) -> f64 {
        let dot = |a: &[f64], b: &[f64]| -> f64 {
            (0..a.len())
                .map(|i| self.rho[i] * self.weight[i] * a[i] * b[i])
                .sum()
        };
        let norms: Vec<f64> = traces.iter().map(|t| dot(t, t).sqrt()).collect();
        let mut worst = 0.0f64;
        for i in 0..traces.len() {
            for j in i + 1..traces.len() {
                worst = worst.max(dot(&traces[i], &traces[j]).abs() / (norms[i] * norms[j]));
            }
        }
        worst
    }
}

/// Checks once per process that positive boundary data yields a strictly
/// negative inward normal derivative on a small reference grid.
pub fn sign_self_test() -> Result<()> {
    static RESULT: OnceLock<std::result::Result<(), String>> = OnceLock::new();
    RESULT
        .get_or_init(|| {
            let run = || -> Result<bool> {
                let grid = Grid2D::new(1.0, 1.0, 8, 8)?;
                let lap = DiscreteLaplacian::new(grid)?;
                let g = vec![1.0; grid.boundary_len()];
                Ok(lap.boundary_map(&g)?.iter().all(|&v| v < 0.0))
            };
            match run() {
                Ok(true) => Ok(()),
                Ok(false) => Err("positive data produced a non-negative normal derivative".into()),
                Err(e) => Err(e.to_string()),
            }
        })
        .clone()
        .map_err(Error::SignContract)
}

pub fn steklov_spectrum_2d(
    grid: Grid2D,
    part: BoundaryPartition,
    k: usize,
) -> Result<SteklovSpectrum> {
    SteklovProblem::new(grid, part)?.spectrum(k)
}

pub fn rayleigh_quotient(grid: Grid2D, part: BoundaryPartition, g: &[f64]) -> Result<f64> {
    SteklovProblem::new(grid, part)?.rayleigh_quotient(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed(n: usize) -> SteklovProblem {
        let grid = Grid2D::with_short_side_cells(1.0, 2.0, n).unwrap();
        let part = "bottom=steklov:1,top=hardnu".parse().unwrap();
        SteklovProblem::new(grid, part).unwrap()
    }

    #[test]
    fn self_test_passes() {
        sign_self_test().unwrap();
    }

    #[test]
    fn mixed_problem_basic_properties() {
        let p = mixed(16);
        assert!(p.asymmetry_norm() < 1e-12);
        let s = p.spectrum(4).unwrap();
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.eigenvalues[0] > 0.0);
        assert!(s.rayleigh_residuals.iter().all(|&r| r < 1e-8));
        assert!(s.orthogonality_defect < 1e-8);
    }

    #[test]
    fn k_out_of_range() {
        let p = mixed(8);
        assert!(p.spectrum(0).is_err());
        assert!(p.spectrum(p.steklov_len() + 1).is_err());
        assert!(p.rayleigh_quotient(&[1.0]).is_err());
        let zero = vec![0.0; p.steklov_len()];
        assert!(matches!(p.rayleigh_quotient(&zero), Err(Error::DegenerateMode(_))));
    }

    #[test]
    fn multiplicities_of_square() {
        let grid = Grid2D::new(1.0, 1.0, 12, 12).unwrap();
        let s = steklov_spectrum_2d(grid, BoundaryPartition::all_steklov(1.0).unwrap(), 6).unwrap();
        assert_eq!(s.multiplicities().iter().sum::<usize>(), 6);
    }
}
