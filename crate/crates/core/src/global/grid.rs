use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::weierstrass::Lattice;
use crate::wirtinger::ChartPoint;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Tensor grid over the real axes `(x₁, y₁, …, x_m, y_m)`, endpoints included.
    Rectangular,
    /// Cell-centred grid on a product of one-dimensional tori `C/Λ_a`.
    Torus,
    /// Per complex axis: `resolution[2a]` radii in `bounds[a]` (endpoints
    /// included) times `resolution[2a+1]` equally spaced angles.
    DiskPolar,
}

/// A sampling grid on a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    /// Points per real axis (rectangular, torus) or (radii, angles) per
    /// complex axis (polar).
    pub resolution: Vec<usize>,
    /// Interval per real axis (rectangular) or radius interval per complex
    /// axis (polar); unused for tori.
    #[serde(default)]
    pub bounds: Vec<[f64; 2]>,
    /// Two generators per complex axis (torus only).
    #[serde(default)]
    pub lattice: Vec<[C64; 2]>,
}

impl GridSpec {
    pub fn rectangular(resolution: Vec<usize>, bounds: Vec<[f64; 2]>) -> Self {
        Self {
            kind: GridKind::Rectangular,
            resolution,
            bounds,
            lattice: Vec::new(),
        }
    }

    /// One-dimensional polar grid `r ∈ [r_min, r_max]`.
    pub fn disk_polar(radii: usize, angles: usize, r_min: f64, r_max: f64) -> Self {
        Self {
            kind: GridKind::DiskPolar,
            resolution: vec![radii, angles],
            bounds: vec![[r_min, r_max]],
            lattice: Vec::new(),
        }
    }

    /// Cell-centred grid on `C/(ω₁Z + ω₂Z)` with `n₁ × n₂` cells.
    pub fn torus(lattice: [C64; 2], n1: usize, n2: usize) -> Self {
        Self {
            kind: GridKind::Torus,
            resolution: vec![n1, n2],
            bounds: Vec::new(),
            lattice: vec![lattice],
        }
    }

    /// Complex dimension of the chart the grid lives on.
    pub fn dim(&self) -> usize {
        match self.kind {
            GridKind::Torus => self.lattice.len(),
            _ => self.resolution.len() / 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution.is_empty() || self.resolution.len() % 2 != 0 {
            return Err(Error::invalid("grid resolution needs two entries per complex axis"));
        }
        if self.resolution.iter().any(|&r| r < 4) {
            return Err(Error::invalid("grid resolution must be at least 4 per axis"));
        }
        let m = self.resolution.len() / 2;
        let finite = |b: &[f64; 2]| b[0].is_finite() && b[1].is_finite() && b[0] <= b[1];
        match self.kind {
            GridKind::Rectangular => {
                if self.bounds.len() != 2 * m || !self.bounds.iter().all(finite) {
                    return Err(Error::invalid("rectangular grid needs one [lo, hi] interval per real axis"));
                }
            }
            GridKind::DiskPolar => {
                if self.bounds.len() != m || !self.bounds.iter().all(|b| finite(b) && b[0] >= 0.0) {
                    return Err(Error::invalid("polar grid needs one radius interval [r_min, r_max] per complex axis"));
                }
            }
            GridKind::Torus => {
                if self.lattice.len() != m {
                    return Err(Error::invalid("torus grid needs one lattice (two generators) per complex axis"));
                }
                if self.resolution.iter().any(|r| r % 2 != 0) {
                    return Err(Error::invalid("torus resolution must be even (the error estimate halves it)"));
                }
                for l in &self.lattice {
                    Lattice::new(l[0], l[1])?;
                }
            }
        }
        Ok(())
    }

    fn axis_values(&self) -> Vec<Vec<C64>> {
        let m = self.resolution.len() / 2;
        (0..m)
            .map(|a| {
                let (n1, n2) = (self.resolution[2 * a], self.resolution[2 * a + 1]);
                let mut out = Vec::with_capacity(n1 * n2);
                match self.kind {
                    GridKind::Rectangular => {
                        let (bx, by) = (self.bounds[2 * a], self.bounds[2 * a + 1]);
                        for i in 0..n1 {
                            for j in 0..n2 {
                                out.push(C64::new(lerp(bx, i, n1), lerp(by, j, n2)));
                            }
                        }
                    }
                    GridKind::DiskPolar => {
                        let b = self.bounds[a];
                        for i in 0..n1 {
                            for j in 0..n2 {
                                let theta = 2.0 * PI * j as f64 / n2 as f64;
                                out.push(C64::from_polar(lerp(b, i, n1), theta));
                            }
                        }
                    }
                    GridKind::Torus => {
                        let [w1, w2] = self.lattice[a];
                        for i in 0..n1 {
                            for j in 0..n2 {
                                let s = (i as f64 + 0.5) / n1 as f64;
                                let t = (j as f64 + 0.5) / n2 as f64;
                                out.push(w1 * s + w2 * t);
                            }
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// All grid points, the first complex axis varying slowest.
    pub fn points(&self) -> Result<Vec<ChartPoint>> {
        self.validate()?;
        let axes = self.axis_values();
        let mut pts: Vec<Vec<C64>> = vec![Vec::new()];
        for axis in &axes {
            pts = pts
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&z| {
                        let mut p = prefix.clone();
                        p.push(z);
                        p
                    })
                })
                .collect();
        }
        pts.into_iter().map(ChartPoint::new).collect()
    }

    /// Lebesgue measure (in the real coordinates) of one torus cell.
    pub fn torus_cell_volume(&self) -> f64 {
        self.lattice
            .iter()
            .enumerate()
            .map(|(a, [w1, w2])| {
                let area = (w1.re * w2.im - w1.im * w2.re).abs();
                area / (self.resolution[2 * a] * self.resolution[2 * a + 1]) as f64
            })
            .product()
    }

    /// The same torus with every resolution halved.
    pub fn torus_coarsened(&self) -> GridSpec {
        GridSpec {
            resolution: self.resolution.iter().map(|r| r / 2).collect(),
            ..self.clone()
        }
    }
}

fn lerp(b: [f64; 2], i: usize, n: usize) -> f64 {
    b[0] + (b[1] - b[0]) * i as f64 / (n - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn polar_grid_includes_outer_radius() {
        let g = GridSpec::disk_polar(10, 8, 0.0, 0.9);
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 80);
        let rmax = pts.iter().map(|p| p.coords()[0].norm()).fold(0.0, f64::max);
        assert!((rmax - 0.9).abs() < 1e-15);
    }

    #[test]
    fn rectangular_product_order() {
        let g = GridSpec::rectangular(vec![4, 4, 4, 4], vec![[-1.0, 1.0]; 4]);
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 256);
        assert_eq!(pts[0].coords(), &[c(-1.0, -1.0), c(-1.0, -1.0)]);
        assert_eq!(pts[1].coords(), &[c(-1.0, -1.0), c(-1.0, -1.0 + 2.0 / 3.0)]);
    }

    #[test]
    fn torus_grid_is_cell_centred() {
        let g = GridSpec::torus([c(1.0, 0.0), c(0.0, 1.0)], 8, 8);
        let pts = g.points().unwrap();
        assert_eq!(pts[0].coords()[0], c(0.0625, 0.0625));
        assert!((g.torus_cell_volume() * 64.0 - 1.0).abs() < 1e-15);
        assert_eq!(g.torus_coarsened().resolution, vec![4, 4]);
    }

    #[test]
    fn invalid_grids() {
        assert!(GridSpec::disk_polar(3, 8, 0.0, 0.9).validate().is_err());
        assert!(GridSpec::torus([c(1.0, 0.0), c(2.0, 0.0)], 4, 4).validate().is_err());
        assert!(GridSpec::torus([c(1.0, 0.0), c(0.0, 1.0)], 9, 8).validate().is_err());
        assert!(GridSpec::torus([c(1.0, 0.0), c(0.0, 1.0)], 4, 4).validate().is_ok());
        assert!(GridSpec::rectangular(vec![4, 4], vec![[0.0, 1.0]]).validate().is_err());
    }
}
