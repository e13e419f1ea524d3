//! Sine-basis discretization of `(0, pi)` with homogeneous Dirichlet values.
//!
//! A [`Field`] stores coefficients `a_n` of `sum_n a_n sin(n x)`, `n = 1..N`.
//! Grid values live on the interior nodes `x_j = j pi / (P + 1)`,
//! `j = 1..P`, where the discrete sine transform pair is exact for
//! `N <= P`. Sup-norms start from the `P = 4N` oversampled grid and refine the
//! largest grid values on the series itself, so they are lower bounds of the
//! true sup-norm with spectral accuracy.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Grid oversampling used for sup-norms and for nonlinear products.
pub const OVERSAMPLE: usize = 4;

/// Dirichlet eigenvalue `lambda_n = n^2` of `-d^2/dx^2` on `(0, pi)`.
pub fn eigenvalue(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(invalid("n", "eigenvalue index starts at 1"));
    }
    Ok((n * n) as f64)
}

/// Oversampled grid size for `n_modes` modes.
pub fn oversampled_points(n_modes: usize) -> usize {
    OVERSAMPLE * n_modes
}

/// Interior node `x_j`, `j = 1..=n_points`.
pub fn grid_node(j: usize, n_points: usize) -> f64 {
    j as f64 * PI / (n_points + 1) as f64
}

/// Precomputed sine table for a `(n_modes, n_points)` pair.
#[derive(Debug)]
pub struct SineTransform {
    n_modes: usize,
    n_points: usize,
    /// `sin(n x_j)`, row `j`, column `n - 1`.
    synth: Vec<f64>,
    /// `2/(P+1) sin(n x_j)`, row `n - 1`, column `j`.
    anal: Vec<f64>,
    nodes: Vec<f64>,
}

type TransformCache = Mutex<HashMap<(usize, usize), Arc<SineTransform>>>;

static TRANSFORMS: OnceLock<TransformCache> = OnceLock::new();

impl SineTransform {
    /// Shared transform for the given sizes, built on first use.
    pub fn get(n_modes: usize, n_points: usize) -> Result<Arc<SineTransform>> {
        if n_modes == 0 || n_points == 0 {
            return Err(Error::SizeMismatch("sizes must be positive".into()));
        }
        if n_points < n_modes {
            return Err(Error::SizeMismatch(format!(
                "{n_points} grid points cannot resolve {n_modes} modes"
            )));
        }
        let cache = TRANSFORMS.get_or_init(Default::default);
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        Ok(map
            .entry((n_modes, n_points))
            .or_insert_with(|| Arc::new(SineTransform::build(n_modes, n_points)))
            .clone())
    }

    fn build(n_modes: usize, n_points: usize) -> Self {
        let h = PI / (n_points + 1) as f64;
        let nodes: Vec<f64> = (1..=n_points).map(|j| j as f64 * h).collect();
        let mut synth = vec![0.0; n_points * n_modes];
        let mut anal = vec![0.0; n_points * n_modes];
        let w = 2.0 / (n_points + 1) as f64;
        for j in 0..n_points {
            for n in 0..n_modes {
                // reduce the integer argument first so the table is exact
                // to rounding for high modes
                let m = ((n + 1) * (j + 1)) % (2 * (n_points + 1));
                let s = (m as f64 * h).sin();
                synth[j * n_modes + n] = s;
                anal[n * n_points + j] = w * s;
            }
        }
        SineTransform {
            n_modes,
            n_points,
            synth,
            anal,
            nodes,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Coefficients to grid values.
    pub fn synthesize(&self, coeffs: &[f64], out: &mut [f64]) {
        debug_assert_eq!(coeffs.len(), self.n_modes);
        debug_assert_eq!(out.len(), self.n_points);
        for (o, row) in out.iter_mut().zip(self.synth.chunks_exact(self.n_modes)) {
            *o = dot(row, coeffs);
        }
    }

    /// Grid values to the first `n_modes` coefficients.
    pub fn analyze(&self, values: &[f64], out: &mut [f64]) {
        debug_assert_eq!(values.len(), self.n_points);
        debug_assert_eq!(out.len(), self.n_modes);
        for (o, row) in out.iter_mut().zip(self.anal.chunks_exact(self.n_points)) {
            *o = dot(row, values);
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators so the loop vectorizes
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        for k in 0..4 {
            acc[k] += a[4 * i + k] * b[4 * i + k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Values on the interior grid `x_j = j pi / (P + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub values: Vec<f64>,
}

impl GridSample {
    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let p = self.values.len();
        (1..=p).map(move |j| grid_node(j, p))
    }

    /// Midpoint-type quadrature of `int_0^pi u dx` (endpoint values are zero).
    pub fn integral(&self) -> f64 {
        PI / (self.values.len() + 1) as f64 * self.values.iter().sum::<f64>()
    }
}

/// A function on `(0, pi)` vanishing at both ends, in the sine basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    coeffs: Vec<f64>,
}

impl Field {
    pub fn zeros(n_modes: usize) -> Self {
        Field {
            coeffs: vec![0.0; n_modes],
        }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Field { coeffs }
    }

    /// `amplitude * sin(mode x)` with `n_modes` coefficients.
    pub fn mode(n_modes: usize, mode: usize, amplitude: f64) -> Self {
        assert!(mode >= 1 && mode <= n_modes, "mode {mode} outside 1..={n_modes}");
        let mut f = Field::zeros(n_modes);
        f.coeffs[mode - 1] = amplitude;
        f
    }

    /// Samples `f` on the oversampled grid and projects onto `n_modes` modes.
    pub fn from_fn(n_modes: usize, f: impl Fn(f64) -> f64) -> Self {
        let tr = SineTransform::get(n_modes, oversampled_points(n_modes)).expect("valid sizes");
        let vals: Vec<f64> = tr.nodes().iter().map(|&x| f(x)).collect();
        let mut coeffs = vec![0.0; n_modes];
        tr.analyze(&vals, &mut coeffs);
        Field { coeffs }
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0.0)
    }

    /// Direct evaluation of the sine series.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * ((n + 1) as f64 * x).sin())
            .sum()
    }

    pub fn to_grid(&self, n_points: usize) -> Result<GridSample> {
        let tr = SineTransform::get(self.n_modes(), n_points)?;
        let mut values = vec![0.0; n_points];
        tr.synthesize(&self.coeffs, &mut values);
        Ok(GridSample { values })
    }

    pub fn from_grid(grid: &GridSample, n_modes: usize) -> Result<Field> {
        let tr = SineTransform::get(n_modes, grid.n_points())?;
        let mut coeffs = vec![0.0; n_modes];
        tr.analyze(&grid.values, &mut coeffs);
        Ok(Field { coeffs })
    }

    /// Values on the default `4N` grid.
    pub fn oversampled(&self) -> GridSample {
        self.to_grid(oversampled_points(self.n_modes()))
            .expect("oversampled grid always resolves the field")
    }

    /// `e^{-A t}` with `A = -Delta - beta I`: `a_n -> e^{-(n^2 - beta) t} a_n`.
    pub fn apply_semigroup(&self, t: f64, beta: f64) -> Result<Field> {
        if !(t >= 0.0) {
            return Err(invalid("t", format!("semigroup time must be >= 0, got {t}")));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| {
                let lam = ((n + 1) * (n + 1)) as f64;
                a * (-(lam - beta) * t).exp()
            })
            .collect();
        Ok(Field { coeffs })
    }

    /// Sup-norm: the maximum of `|u|` over the `4N` grid, with the leading
    /// grid maxima polished by Newton steps on the series. The result is
    /// attained at some point, so it never exceeds the true sup-norm.
    pub fn sup_norm(&self) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let g = self.oversampled();
        let vals = &g.values;
        let grid_max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if grid_max == 0.0 {
            return 0.0;
        }
        let p = vals.len();
        let h = PI / (p + 1) as f64;
        let at = |j: isize| -> f64 {
            if j < 0 || j >= p as isize {
                0.0
            } else {
                vals[j as usize].abs()
            }
        };
        let mut best = grid_max;
        for j in 0..p as isize {
            let a = at(j);
            if a < at(j - 1) || a < at(j + 1) || a < 0.99 * grid_max {
                continue;
            }
            let x0 = (j + 1) as f64 * h;
            best = best.max(self.polish_extremum(x0, x0 - h, x0 + h).abs());
        }
        best
    }

    /// Newton iteration for `u'(x) = 0` kept inside `[lo, hi]`; returns `u`
    /// at the final point.
    fn polish_extremum(&self, mut x: f64, lo: f64, hi: f64) -> f64 {
        for _ in 0..8 {
            let (mut d1, mut d2) = (0.0, 0.0);
            for (n, a) in self.coeffs.iter().enumerate() {
                let k = (n + 1) as f64;
                let (s, c) = (k * x).sin_cos();
                d1 += a * k * c;
                d2 -= a * k * k * s;
            }
            if d2 == 0.0 {
                break;
            }
            let next = (x - d1 / d2).clamp(lo, hi);
            let done = (next - x).abs() < 1e-15;
            x = next;
            if done {
                break;
            }
        }
        self.eval(x)
    }

    /// `sqrt((pi/2) sum a_n^2)`.
    pub fn l2_norm(&self) -> f64 {
        (PI / 2.0 * self.coeffs.iter().map(|a| a * a).sum::<f64>()).sqrt()
    }

    /// `u(x_j) <= g(x_j) + tol` at every node of the `4N` grid.
    pub fn pointwise_leq(&self, other: &Field, tol: f64) -> Result<bool> {
        Ok(self.max_excess_over(other)? <= tol)
    }

    /// `max_j (u(x_j) - g(x_j))`, the largest violation of `u <= g`.
    pub fn max_excess_over(&self, other: &Field) -> Result<f64> {
        self.check_same_size(other)?;
        let d = self - other;
        Ok(d.oversampled()
            .values
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v)))
    }

    /// Sup-norm distance on the `4N` grid.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        self.check_same_size(other)?;
        Ok((self - other).sup_norm())
    }

    fn check_same_size(&self, other: &Field) -> Result<()> {
        if self.n_modes() != other.n_modes() {
            return Err(Error::SizeMismatch(format!(
                "fields have {} and {} modes",
                self.n_modes(),
                other.n_modes()
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            coeffs: self.coeffs.iter().map(|a| c * a).collect(),
        }
    }

    /// Writes `x,u` rows on the oversampled grid.
    pub fn write_grid_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,u")?;
        let g = self.oversampled();
        for (x, v) in g.nodes().zip(&g.values) {
            writeln!(w, "{x},{v}")?;
        }
        Ok(())
    }

    /// Writes `n,a_n` rows.
    pub fn write_coeff_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,a_n")?;
        for (n, a) in self.coeffs.iter().enumerate() {
            writeln!(w, "{},{a}", n + 1)?;
        }
        Ok(())
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        assert_eq!(self.n_modes(), rhs.n_modes());
        Field {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        assert_eq!(self.n_modes(), rhs.n_modes());
        Field {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        Field {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul<&Field> for f64 {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        rhs.scaled(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue(1).unwrap(), 1.0);
        assert_eq!(eigenvalue(2).unwrap(), 4.0);
        assert_eq!(eigenvalue(10).unwrap(), 100.0);
        assert!(eigenvalue(0).is_err());
    }

    #[test]
    fn single_mode_on_grid() {
        let f = Field::mode(8, 1, 1.0);
        let g = f.to_grid(32).unwrap();
        for (x, v) in g.nodes().zip(&g.values) {
            assert!((v - x.sin()).abs() < 1e-14);
        }
        assert!(Field::zeros(8).to_grid(32).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dirichlet_values() {
        let f = Field::from_coeffs(vec![0.3, -1.0, 2.0, 0.1]);
        assert!(f.eval(0.0).abs() < 1e-15);
        assert!(f.eval(PI).abs() < 1e-14);
    }

    #[test]
    fn size_errors() {
        assert!(Field::zeros(8).to_grid(4).is_err());
        assert!(Field::from_grid(&GridSample { values: vec![0.0; 3] }, 5).is_err());
        assert!(Field::zeros(3).pointwise_leq(&Field::zeros(4), 0.0).is_err());
    }

    #[test]
    fn semigroup_examples() {
        let f = Field::mode(4, 1, 1.0);
        assert_eq!(f.apply_semigroup(0.0, 0.3).unwrap(), f);
        let e = f.apply_semigroup(1.0, 0.0).unwrap();
        assert!((e.coeffs()[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((e.coeffs()[0] - 0.36788).abs() < 1e-5);
        let g = Field::mode(4, 2, 1.0).apply_semigroup(0.5, 0.5).unwrap();
        assert!((g.coeffs()[1] - (-1.75f64).exp()).abs() < 1e-15);
        assert!((g.coeffs()[1] - 0.17377).abs() < 1e-5);
        assert!(f.apply_semigroup(-1.0, 0.0).is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(Field::zeros(16).sup_norm(), 0.0);
        assert!((Field::mode(16, 1, 1.0).sup_norm() - 1.0).abs() < 1e-6);
        assert!((Field::mode(16, 1, 2.0).sup_norm() - 2.0).abs() < 1e-6);
        assert!((Field::mode(8, 1, 1.0).l2_norm() - 1.25331).abs() < 1e-5);
        let two = Field::from_coeffs(vec![1.0, 1.0, 0.0]);
        assert!((two.l2_norm() - PI.sqrt()).abs() < 1e-14);
        assert!((two.l2_norm() - 1.77245).abs() < 1e-5);
    }

    #[test]
    fn ordering() {
        let s1 = Field::mode(8, 1, 1.0);
        let s2 = Field::mode(8, 2, 1.0);
        assert!(Field::zeros(8).pointwise_leq(&s1, 0.0).unwrap());
        assert!(s1.pointwise_leq(&s1, 0.0).unwrap());
        // sin 2x > sin x just right of zero, and sin x > sin 2x past pi/3
        assert!(!s1.pointwise_leq(&s2, 0.0).unwrap());
        assert!(!s2.pointwise_leq(&s1, 0.0).unwrap());
    }

    #[test]
    fn grid_quadrature_of_sin_squared() {
        let g = Field::mode(8, 1, 1.0).oversampled();
        let sq = GridSample {
            values: g.values.iter().map(|v| v * v).collect(),
        };
        assert!((sq.integral() - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn csv_exports() {
        let f = Field::from_coeffs(vec![1.0, 0.5]);
        let mut a = Vec::new();
        f.write_coeff_csv(&mut a).unwrap();
        assert_eq!(String::from_utf8(a).unwrap(), "n,a_n\n1,1\n2,0.5\n");
        let mut b = Vec::new();
        f.write_grid_csv(&mut b).unwrap();
        let text = String::from_utf8(b).unwrap();
        assert!(text.starts_with("x,u\n"));
        assert_eq!(text.lines().count(), 9);
    }
}
