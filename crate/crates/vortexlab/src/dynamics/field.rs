//! Uniform periodic grids on `[-L, L]^2`.

use crate::error::{Error, Result};
use crate::io::write_f64_with_header;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Perturbation vorticity in self-similar variables.
    Sigma,
    /// Vorticity in physical variables.
    Omega,
    VelocityX,
    VelocityY,
    Forcing,
}

/// Samples `data[j * n + i]` at the cell centres `(x_i, y_j) = (-L + (i + 1/2) h, -L + (j + 1/2) h)`,
/// `h = 2L / n`, so the grid is invariant under `x -> -x` and quarter turns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field2D {
    pub n: usize,
    pub half_width: f64,
    pub time: f64,
    pub kind: FieldKind,
    /// Order of the rotational symmetry the field is meant to carry.
    pub symmetry: Option<usize>,
    pub data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DumpHeader {
    n: usize,
    #[serde(rename = "L")]
    half_width: f64,
    time: f64,
    kind: FieldKind,
    symmetry: Option<usize>,
}

impl Field2D {
    pub fn zeros(n: usize, half_width: f64, kind: FieldKind) -> Self {
        Field2D {
            n,
            half_width,
            time: 0.0,
            kind,
            symmetry: None,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, half_width: f64, kind: FieldKind, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let mut out = Self::zeros(n, half_width, kind);
        for j in 0..n {
            for i in 0..n {
                out.data[j * n + i] = f(out.point(i, j));
            }
        }
        out
    }

    /// Same grid, new samples.
    pub fn like(&self, kind: FieldKind, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), self.n * self.n);
        Field2D {
            kind,
            data,
            ..self.clone()
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing().powi(2)
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.spacing();
        [-self.half_width + (i as f64 + 0.5) * h, -self.half_width + (j as f64 + 0.5) * h]
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.n).flat_map(move |j| (0..self.n).map(move |i| self.point(i, j)))
    }

    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.cell_area()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn check_same_grid(&self, other: &Field2D) -> Result<()> {
        if self.n != other.n || (self.half_width - other.half_width).abs() > 1e-12 * self.half_width {
            return Err(Error::MismatchedSampling(format!(
                "grids n={} L={} and n={} L={}",
                self.n, self.half_width, other.n, other.half_width
            )));
        }
        Ok(())
    }

    /// Largest deviation from invariance under rotation by `2 pi / m`, for the
    /// orders that map the square grid onto itself.
    pub fn symmetry_defect(&self, m: usize) -> Option<f64> {
        let n = self.n;
        let at = |i: usize, j: usize| self.data[j * n + i];
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let v = at(i, j);
                let rotated = match m {
                    1 => v,
                    2 => at(n - 1 - i, n - 1 - j),
                    4 => at(n - 1 - j, i),
                    _ => return None,
                };
                worst = worst.max((v - rotated).abs());
            }
        }
        Some(worst)
    }

    /// Keys cubic convolution interpolation; zero outside the box.
    pub fn sample_bicubic(&self, x: [f64; 2]) -> f64 {
        let h = self.spacing();
        let n = self.n as isize;
        let u = (x[0] + self.half_width) / h - 0.5;
        let v = (x[1] + self.half_width) / h - 0.5;
        if !(u >= 0.0 && v >= 0.0 && u <= (n - 1) as f64 && v <= (n - 1) as f64) {
            return 0.0;
        }
        let (i0, j0) = (u.floor() as isize, v.floor() as isize);
        let (fu, fv) = (u - i0 as f64, v - j0 as f64);
        let wu = keys_weights(fu);
        let wv = keys_weights(fv);
        let mut acc = 0.0;
        for (b, wb) in wv.iter().enumerate() {
            let j = (j0 + b as isize - 1).clamp(0, n - 1) as usize;
            let mut row = 0.0;
            for (a, wa) in wu.iter().enumerate() {
                let i = (i0 + a as isize - 1).clamp(0, n - 1) as usize;
                row += wa * self.data[j * self.n + i];
            }
            acc += wb * row;
        }
        acc
    }

    /// Writes `<path>.f64` and the JSON header `<path>.json`.
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let header = DumpHeader {
            n: self.n,
            half_width: self.half_width,
            time: self.time,
            kind: self.kind,
            symmetry: self.symmetry,
        };
        write_f64_with_header(path, &self.data, &header)
    }

    pub fn read_dump(path: &Path) -> Result<Self> {
        let header: DumpHeader = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json"))?)?;
        let data = crate::io::f64_from_le_bytes(&std::fs::read(path.with_extension("f64"))?)?;
        if data.len() != header.n * header.n {
            return Err(Error::Format(format!("expected {} samples, found {}", header.n * header.n, data.len())));
        }
        Ok(Field2D {
            n: header.n,
            half_width: header.half_width,
            time: header.time,
            kind: header.kind,
            symmetry: header.symmetry,
            data,
        })
    }
}

fn keys_weights(f: f64) -> [f64; 4] {
    let a = -0.5;
    let w = |x: f64| {
        let x = x.abs();
        if x <= 1.0 {
            (a + 2.0) * x * x * x - (a + 3.0) * x * x + 1.0
        } else if x < 2.0 {
            a * x * x * x - 5.0 * a * x * x + 8.0 * a * x - 4.0 * a
        } else {
            0.0
        }
    };
    [w(1.0 + f), w(f), w(1.0 - f), w(2.0 - f)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bicubic_reproduces_cubics_inside() {
        let f = Field2D::from_fn(32, 2.0, FieldKind::Omega, |[x, y]| x * x - 0.5 * y + x * y);
        for &p in &[[0.13, -0.71], [1.2, 0.4], [-1.1, 1.3]] {
            let exact = p[0] * p[0] - 0.5 * p[1] + p[0] * p[1];
            assert!((f.sample_bicubic(p) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn half_turn_symmetry_pairs_mirror_nodes() {
        let f = Field2D::from_fn(16, 1.0, FieldKind::Sigma, |[x, y]| {
            let p = std::f64::consts::PI;
            (p * x).sin() * (p * y).sin() + (p * x).cos()
        });
        assert!(f.symmetry_defect(2).unwrap() < 1e-14);
        assert!(f.symmetry_defect(4).unwrap() > 0.1);
        assert!(f.symmetry_defect(3).is_none());
    }

    #[test]
    fn dump_roundtrip() {
        let dir = std::env::temp_dir().join(format!("vortexlab-field-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut f = Field2D::from_fn(8, 1.5, FieldKind::Omega, |[x, y]| x - 2.0 * y);
        f.symmetry = Some(2);
        f.time = 0.25;
        let p = dir.join("snap");
        f.write_dump(&p).unwrap();
        assert_eq!(Field2D::read_dump(&p).unwrap(), f);
        std::fs::remove_dir_all(dir).ok();
    }
}
