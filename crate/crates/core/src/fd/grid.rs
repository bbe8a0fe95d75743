use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

pub const MIN_CELLS: usize = 8;

/// Uniform grid on `[0, a] x [0, b]` with `nx x ny` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    a: f64,
    b: f64,
    nx: usize,
    ny: usize,
}

impl Grid2D {
    pub fn new(a: f64, b: f64, nx: usize, ny: usize) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "rectangle side {name} must be positive and finite, got {v}"
                )));
            }
        }
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(Error::domain(format!(
                "grid needs at least {MIN_CELLS} cells per side, got {nx}x{ny}"
            )));
        }
        Ok(Self { a, b, nx, ny })
    }

    /// `n` cells along the shorter side and as close to square cells as the
    /// longer side allows.
    pub fn with_short_side_cells(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(Error::domain(format!("invalid rectangle {a}x{b}")));
        }
        let h = a.min(b) / n as f64;
        let nx = ((a / h).round() as usize).max(1);
        let ny = ((b / h).round() as usize).max(1);
        Self::new(a, b, nx, ny)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> f64 {
        self.a / self.nx as f64
    }
    pub fn hy(&self) -> f64 {
        self.b / self.ny as f64
    }

    /// Interior nodes `(i, j)`, `1 <= i < nx`, `1 <= j < ny`.
    pub fn interior_len(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }

    /// Index of interior node `(i, j)` in x-fastest order.
    #[inline]
    pub fn interior_index(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.nx - 1) + (i - 1)
    }

    pub fn face_len(&self, face: Face) -> usize {
        match face {
            Face::Bottom | Face::Top => self.nx - 1,
            Face::Left | Face::Right => self.ny - 1,
        }
    }

    /// Offset of a face's first node in the boundary ordering.
    pub fn face_offset(&self, face: Face) -> usize {
        Face::ALL
            .iter()
            .take_while(|&&f| f != face)
            .map(|&f| self.face_len(f))
            .sum()
    }

    /// Non-corner boundary nodes.
    pub fn boundary_len(&self) -> usize {
        2 * (self.nx - 1) + 2 * (self.ny - 1)
    }

    /// Boundary nodes in the order bottom, top, left, right, each by
    /// increasing tangential coordinate.
    pub fn boundary_nodes(&self) -> Vec<BoundaryNode> {
        let mut out = Vec::with_capacity(self.boundary_len());
        for face in Face::ALL {
            for k in 1..=self.face_len(face) {
                let (i, j) = match face {
                    Face::Bottom => (k, 0),
                    Face::Top => (k, self.ny),
                    Face::Left => (0, k),
                    Face::Right => (self.nx, k),
                };
                out.push(BoundaryNode {
                    face,
                    i,
                    j,
                    x: i as f64 * self.hx(),
                    y: j as f64 * self.hy(),
                });
            }
        }
        out
    }

    /// Spacing along the face, the boundary quadrature weight.
    pub fn tangential_step(&self, face: Face) -> f64 {
        match face {
            Face::Bottom | Face::Top => self.hx(),
            Face::Left | Face::Right => self.hy(),
        }
    }

    /// Spacing across the face.
    pub fn normal_step(&self, face: Face) -> f64 {
        match face {
            Face::Bottom | Face::Top => self.hy(),
            Face::Left | Face::Right => self.hx(),
        }
    }

    /// The grid reflected across `x = y`.
    pub fn transposed(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            nx: self.ny,
            ny: self.nx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Bottom,
    Top,
    Left,
    Right,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::Bottom, Face::Top, Face::Left, Face::Right];

    pub fn name(self) -> &'static str {
        match self {
            Face::Bottom => "bottom",
            Face::Top => "top",
            Face::Left => "left",
            Face::Right => "right",
        }
    }

    /// Image under `(x, y) -> (y, x)`.
    pub fn transposed(self) -> Self {
        match self {
            Face::Bottom => Face::Left,
            Face::Left => Face::Bottom,
            Face::Top => Face::Right,
            Face::Right => Face::Top,
        }
    }
}

impl FromStr for Face {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Face::ALL
            .into_iter()
            .find(|f| f.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown face '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub face: Face,
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
}

/// Condition on one face, in addition to `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceCondition {
    /// `Δu + λ ρ ∂u/∂ν = 0`.
    Steklov(f64),
    /// `Δu = 0`.
    SoftFree,
    /// `∂u/∂ν = 0`.
    HardNu,
}

impl fmt::Display for FaceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceCondition::Steklov(rho) => write!(f, "steklov:{rho}"),
            FaceCondition::SoftFree => f.write_str("softfree"),
            FaceCondition::HardNu => f.write_str("hardnu"),
        }
    }
}

impl FromStr for FaceCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.split_once(':') {
            Some(("steklov", rho)) => rho
                .parse::<f64>()
                .map(FaceCondition::Steklov)
                .map_err(|_| Error::Config(format!("bad density in '{s}'"))),
            None if s == "steklov" => Ok(FaceCondition::Steklov(1.0)),
            None if s == "softfree" => Ok(FaceCondition::SoftFree),
            None if s == "hardnu" => Ok(FaceCondition::HardNu),
            _ => Err(Error::Config(format!(
                "unknown face condition '{s}' (steklov[:rho], softfree, hardnu)"
            ))),
        }
    }
}

/// Face conditions indexed by [`Face`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPartition {
    pub bottom: FaceCondition,
    pub top: FaceCondition,
    pub left: FaceCondition,
    pub right: FaceCondition,
}

impl BoundaryPartition {
    pub fn new(
        bottom: FaceCondition,
        top: FaceCondition,
        left: FaceCondition,
        right: FaceCondition,
    ) -> Result<Self> {
        let p = Self {
            bottom,
            top,
            left,
            right,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn all_steklov(rho: f64) -> Result<Self> {
        let s = FaceCondition::Steklov(rho);
        Self::new(s, s, s, s)
    }

    pub fn validate(&self) -> Result<()> {
        let mut any = false;
        for face in Face::ALL {
            if let FaceCondition::Steklov(rho) = self.get(face) {
                if !(rho.is_finite() && rho > 0.0) {
                    return Err(Error::domain(format!(
                        "density on {} must be positive and finite, got {rho}",
                        face.name()
                    )));
                }
                any = true;
            }
        }
        if !any {
            return Err(Error::domain("at least one face must be Steklov"));
        }
        Ok(())
    }

    pub fn get(&self, face: Face) -> FaceCondition {
        match face {
            Face::Bottom => self.bottom,
            Face::Top => self.top,
            Face::Left => self.left,
            Face::Right => self.right,
        }
    }

    pub fn set(&mut self, face: Face, c: FaceCondition) {
        match face {
            Face::Bottom => self.bottom = c,
            Face::Top => self.top = c,
            Face::Left => self.left = c,
            Face::Right => self.right = c,
        }
    }

    /// Partition for the transposed grid.
    pub fn transposed(&self) -> Self {
        let mut out = *self;
        for face in Face::ALL {
            out.set(face.transposed(), self.get(face));
        }
        out
    }

    /// Every Steklov density multiplied by `c`.
    pub fn scaled_density(&self, c: f64) -> Result<Self> {
        let mut out = *self;
        for face in Face::ALL {
            if let FaceCondition::Steklov(rho) = self.get(face) {
                out.set(face, FaceCondition::Steklov(rho * c));
            }
        }
        out.validate()?;
        Ok(out)
    }
}

impl FromStr for BoundaryPartition {
    type Err = Error;

    /// `bottom=steklov:1,top=hardnu,left=softfree,right=softfree`.
    /// Unlisted faces default to `softfree`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = BoundaryPartition {
            bottom: FaceCondition::SoftFree,
            top: FaceCondition::SoftFree,
            left: FaceCondition::SoftFree,
            right: FaceCondition::SoftFree,
        };
        let mut seen = Vec::new();
        for item in s.split(',').filter(|x| !x.trim().is_empty()) {
            let (face, cond) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected face=condition, got '{item}'")))?;
            let face: Face = face.parse()?;
            if seen.contains(&face) {
                return Err(Error::Config(format!("face {} given twice", face.name())));
            }
            seen.push(face);
            p.set(face, cond.parse()?);
        }
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for BoundaryPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bottom={},top={},left={},right={}",
            self.bottom, self.top, self.left, self.right
        )
    }
}
