//! Uniform phase-space grids and fields sampled on them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const fn new(q: f64, p: f64) -> Self {
        PhasePoint { q, p }
    }
}

/// Rectangular node lattice, endpoints included. The second-mode slice
/// coordinates default to `q2 = p2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nq: usize,
    pub np: usize,
    pub slice_q2: f64,
    pub slice_p2: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::square(6.0, 201)
    }
}

impl GridSpec {
    /// `[-half_width, half_width]²` with `n` nodes per axis.
    pub fn square(half_width: f64, n: usize) -> Self {
        GridSpec {
            q_min: -half_width,
            q_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            nq: n,
            np: n,
            slice_q2: 1.0,
            slice_p2: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.q_min, self.q_max, self.p_min, self.p_max, self.slice_q2, self.slice_p2]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        if self.nq < 2 || self.np < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 nodes per axis".into()));
        }
        if self.q_max <= self.q_min || self.p_max <= self.p_min {
            return Err(Error::InvalidParameter("grid ranges must be increasing".into()));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.nq - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        if i == self.nq - 1 {
            self.q_max
        } else {
            self.q_min + i as f64 * self.dq()
        }
    }

    pub fn p(&self, j: usize) -> f64 {
        if j == self.np - 1 {
            self.p_max
        } else {
            self.p_min + j as f64 * self.dp()
        }
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index, q outer.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.np + j
    }

    pub fn same_lattice(&self, other: &GridSpec) -> bool {
        self.q_min == other.q_min
            && self.q_max == other.q_max
            && self.p_min == other.p_min
            && self.p_max == other.p_max
            && self.nq == other.nq
            && self.np == other.np
    }
}

/// Real field on a grid, row-major with q as the outer index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field2D {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl Field2D {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: GridSpec, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nq {
            let q = grid.q(i);
            for j in 0..grid.np {
                values.push(f(q, grid.p(j)));
            }
        }
        Field2D {
            grid,
            values,
            metadata: BTreeMap::new(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_complex(&self) -> ComplexField2D {
        ComplexField2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// `# key=value` header lines (with `schema_version`), a `q,p,f` line,
    /// then one row per node, q outer, values to 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 72 + 256);
        let mut meta = self.metadata.clone();
        meta.entry("schema_version".into()).or_insert_with(|| crate::SCHEMA_VERSION.into());
        for (k, v) in &meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let g = &self.grid;
        let _ = writeln!(out, "# grid={},{},{},{},{},{}", g.q_min, g.q_max, g.p_min, g.p_max, g.nq, g.np);
        out.push_str("q,p,f\n");
        for i in 0..g.nq {
            let q = g.q(i);
            for j in 0..g.np {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", q, g.p(j), self.at(i, j));
            }
        }
        out
    }

    /// Inverse of [`Field2D::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameter(format!("field csv: {m}"));
        let mut metadata = BTreeMap::new();
        let mut grid = None;
        let mut values = Vec::new();
        let mut header_seen = false;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once('=').ok_or_else(|| bad("malformed header"))?;
                if k == "grid" {
                    let parts: Vec<&str> = v.split(',').collect();
                    if parts.len() != 6 {
                        return Err(bad("grid header"));
                    }
                    let f = |i: usize| parts[i].parse::<f64>().map_err(|_| bad("grid bound"));
                    let u = |i: usize| parts[i].parse::<usize>().map_err(|_| bad("grid nodes"));
                    let mut g = GridSpec::square(1.0, 2);
                    g.q_min = f(0)?;
                    g.q_max = f(1)?;
                    g.p_min = f(2)?;
                    g.p_max = f(3)?;
                    g.nq = u(4)?;
                    g.np = u(5)?;
                    grid = Some(g);
                } else {
                    metadata.insert(k.to_string(), v.to_string());
                }
            } else if line == "q,p,f" {
                header_seen = true;
            } else if !line.is_empty() {
                let v = line.rsplit(',').next().ok_or_else(|| bad("row"))?;
                values.push(v.parse::<f64>().map_err(|_| bad("value"))?);
            }
        }
        let mut grid = grid.ok_or_else(|| bad("missing grid header"))?;
        if !header_seen || values.len() != grid.len() {
            return Err(bad("row count does not match grid"));
        }
        if let (Some(q2), Some(p2)) = (metadata.get("slice_q2"), metadata.get("slice_p2")) {
            grid.slice_q2 = q2.parse().map_err(|_| bad("slice_q2"))?;
            grid.slice_p2 = p2.parse().map_err(|_| bad("slice_p2"))?;
        }
        Ok(Field2D { grid, values, metadata })
    }

    /// Largest `|f(q,p) − f(−q,p)|` and `|f(q,p) − f(q,−p)|`; meaningful when
    /// the grid is symmetric about the origin.
    pub fn reflection_defect(&self) -> f64 {
        let (nq, np) = (self.grid.nq, self.grid.np);
        let mut worst = 0.0f64;
        for i in 0..nq {
            for j in 0..np {
                let v = self.at(i, j);
                worst = worst.max((v - self.at(nq - 1 - i, j)).abs());
                worst = worst.max((v - self.at(i, np - 1 - j)).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(grid: GridSpec, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nq {
            let q = grid.q(i);
            for j in 0..grid.np {
                values.push(f(q, grid.p(j)));
            }
        }
        ComplexField2D { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn real_part(&self) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.iter().map(|v| v.re).collect(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = GridSpec::square(6.0, 201);
        assert_eq!(g.q(0), -6.0);
        assert_eq!(g.q(200), 6.0);
        assert!((g.q(100)).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let mut g = GridSpec::square(1.0, 1);
        assert!(g.validate().is_err());
        g.nq = 3;
        g.np = 3;
        assert!(g.validate().is_ok());
        g.q_max = f64::NAN;
        assert!(g.validate().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut f = Field2D::from_fn(GridSpec::square(2.0, 5), |q, p| q * 0.1 + p * p / 3.0);
        f.metadata.insert("B".into(), "0.5".into());
        let text = f.to_csv();
        assert!(text.contains("# schema_version=1\n") && text.contains("\nq,p,f\n"));
        let back = Field2D::from_csv(&text).unwrap();
        assert_eq!(back.values, f.values);
        assert!(back.grid.same_lattice(&f.grid));
        assert_eq!(back.metadata["B"], "0.5");
    }

    #[test]
    fn reflection_of_even_field() {
        let f = Field2D::from_fn(GridSpec::square(3.0, 31), |q, p| (-(q * q) - 2.0 * p * p).exp() * q * q);
        assert!(f.reflection_defect() < 1e-15);
        let g = Field2D::from_fn(GridSpec::square(3.0, 31), |q, _| q);
        assert!(g.reflection_defect() > 1.0);
    }
}
