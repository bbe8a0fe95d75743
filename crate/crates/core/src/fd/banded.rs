use crate::error::{Error, Result};

/// Cholesky factor `L` of a symmetric positive definite band matrix,
/// stored row by row with `bandwidth + 1` entries per row.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factors the matrix whose lower band is given by `entry(i, j)` for
    /// `i - bandwidth <= j <= i`.
    pub fn factor(n: usize, bandwidth: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let bw = bandwidth;
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut sum = entry(i, j);
                let ri = i * w + bw - i;
                let rj = j * w + bw - j;
                for k in k0..j {
                    sum -= l[ri + k] * l[rj + k];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return Err(Error::Numerical(format!(
                            "band Cholesky: non-positive pivot {sum:e} at row {i}"
                        )));
                    }
                    l[ri + i] = sum.sqrt();
                } else {
                    l[ri + j] = sum / l[rj + j];
                }
            }
        }
        Ok(Self { n, bw, l })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.l[i * (self.bw + 1) + self.bw + j - i]
    }

    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let mut s = x[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.at(i, k) * x[k];
            }
            x[i] = s / self.at(i, i);
        }
        for i in (0..self.n).rev() {
            x[i] /= self.at(i, i);
            let xi = x[i];
            for k in i.saturating_sub(self.bw)..i {
                x[k] -= self.at(i, k) * xi;
            }
        }
    }
}
