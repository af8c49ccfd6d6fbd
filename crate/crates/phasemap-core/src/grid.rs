//! Label-space grids (quadrature nodes + weights) and sampled symbol fields.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PhasemapError, Result};

/// Quadrature-weighted sampling of the label space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelGrid {
    /// one real vector per node, all of equal length (the label dimension)
    pub points: Vec<Vec<f64>>,
    /// positive quadrature weights for ∫ dx
    pub weights: Vec<f64>,
}

impl LabelGrid {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<LabelGrid> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(PhasemapError::Domain(format!(
                "grid needs equal nonzero point/weight counts, got {}/{}",
                points.len(),
                weights.len()
            )));
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) {
            return Err(PhasemapError::Domain("grid points have mixed dimensions".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(PhasemapError::Domain("grid weights must all be positive".into()));
        }
        Ok(LabelGrid { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label_dim(&self) -> usize {
        self.points[0].len()
    }

    /// Midpoint nodes on [lo, hi] with uniform weights.
    pub fn uniform_1d(lo: f64, hi: f64, n: usize) -> Result<Axis> {
        if n == 0 || !(hi > lo) {
            return Err(PhasemapError::Domain("uniform_1d needs n >= 1 and hi > lo".into()));
        }
        let h = (hi - lo) / n as f64;
        let nodes = (0..n).map(|k| lo + h * (k as f64 + 0.5)).collect();
        Ok(Axis {
            nodes,
            weights: vec![h; n],
        })
    }

    /// Gauss–Hermite nodes/weights rescaled to integrate plain ∫ f(x) dx for
    /// integrands of the form e^{−c·x²}·(polynomial): nodes t_i/√c, weights
    /// λ_i e^{t_i²}/√c.
    pub fn gauss_hermite_1d(n: usize, c: f64) -> Result<Axis> {
        if n < 2 || !(c > 0.0) {
            return Err(PhasemapError::Domain("gauss_hermite_1d needs n >= 2 and c > 0".into()));
        }
        let mut t = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let b = (k as f64 / 2.0).sqrt();
            t[(k - 1, k)] = b;
            t[(k, k - 1)] = b;
        }
        let eig = SymmetricEigen::new(t);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // weights from the Christoffel function: λ_i = 1 / Σ_k p̃_k(t_i)²
        // with orthonormal Hermite functions p̃ (stable, unlike tiny
        // eigenvector first components)
        let sqrt_c = c.sqrt();
        let p0 = std::f64::consts::PI.powf(-0.25);
        let mut out_nodes = Vec::with_capacity(n);
        let mut out_weights = Vec::with_capacity(n);
        for &ti in &nodes {
            let mut prev = 0.0f64;
            let mut cur = p0;
            let mut sum = cur * cur;
            for k in 0..n - 1 {
                let bk1 = ((k as f64 + 1.0) / 2.0).sqrt();
                let bk = (k as f64 / 2.0).sqrt();
                let next = (ti * cur - bk * prev) / bk1;
                prev = cur;
                cur = next;
                sum += cur * cur;
            }
            let lambda = 1.0 / sum; // weight w.r.t. e^{-t²}
            out_nodes.push(ti / sqrt_c);
            out_weights.push(lambda * (ti * ti).exp() / sqrt_c);
        }
        Ok(Axis {
            nodes: out_nodes,
            weights: out_weights,
        })
    }

    /// Tensor product of per-axis rules, row-major in the given axis order.
    pub fn tensor(axes: &[Axis]) -> Result<LabelGrid> {
        if axes.is_empty() {
            return Err(PhasemapError::Domain("tensor grid needs at least one axis".into()));
        }
        let mut points = vec![Vec::new()];
        let mut weights = vec![1.0f64];
        for ax in axes {
            let mut np = Vec::with_capacity(points.len() * ax.nodes.len());
            let mut nw = Vec::with_capacity(points.len() * ax.nodes.len());
            for (p, w) in points.iter().zip(&weights) {
                for (x, wx) in ax.nodes.iter().zip(&ax.weights) {
                    let mut q = p.clone();
                    q.push(*x);
                    np.push(q);
                    nw.push(w * wx);
                }
            }
            points = np;
            weights = nw;
        }
        LabelGrid::new(points, weights)
    }

    /// Uniform midpoint square over [−radius, radius]², n points per axis.
    pub fn square(radius: f64, n_per_axis: usize) -> Result<LabelGrid> {
        let ax = LabelGrid::uniform_1d(-radius, radius, n_per_axis)?;
        LabelGrid::tensor(&[ax.clone(), ax])
    }

    /// Gauss–Hermite square for Gaussian-decay integrands e^{−c(x²+y²)}·poly.
    pub fn gauss_square(c: f64, n_per_axis: usize) -> Result<LabelGrid> {
        let ax = LabelGrid::gauss_hermite_1d(n_per_axis, c)?;
        LabelGrid::tensor(&[ax.clone(), ax])
    }
}

/// One-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Complex symbol values sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolField {
    pub grid: LabelGrid,
    pub values: Vec<Complex64>,
}

impl SymbolField {
    pub fn new(grid: LabelGrid, values: Vec<Complex64>) -> Result<SymbolField> {
        if grid.len() != values.len() {
            return Err(PhasemapError::DimensionMismatch(format!(
                "{} grid points vs {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(SymbolField { grid, values })
    }

    pub fn zeros(grid: LabelGrid) -> SymbolField {
        let n = grid.len();
        SymbolField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// √Σ|Δ|² against another field on the same grid.
    pub fn frobenius_distance(&self, other: &SymbolField) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(PhasemapError::DimensionMismatch(format!(
                "field lengths {} vs {}",
                self.values.len(),
                other.values.len()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn sup_distance(&self, other: &SymbolField) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(PhasemapError::DimensionMismatch(format!(
                "field lengths {} vs {}",
                self.values.len(),
                other.values.len()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Quadrature ∫ f dx with the grid's own weights.
    pub fn integral(&self) -> Complex64 {
        self.values
            .iter()
            .zip(&self.grid.weights)
            .map(|(v, w)| v * *w)
            .sum()
    }

    /// CSV rows `x1,...,xd,re,im` with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let d = self.grid.label_dim();
        let mut out = String::new();
        let header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",re,im\n");
        for (p, v) in self.grid.points.iter().zip(&self.values) {
            for c in p {
                out.push_str(&format!("{:.11e},", c));
            }
            out.push_str(&format!("{:.11e},{:.11e}\n", v.re, v.im));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_square_weights_sum_to_area() {
        let g = LabelGrid::square(6.0, 64).unwrap();
        let area: f64 = g.weights.iter().sum();
        assert!((area - 144.0).abs() < 1e-9);
        assert_eq!(g.len(), 64 * 64);
    }

    #[test]
    fn gauss_hermite_integrates_gaussian_moments() {
        // oracle: ∫ e^{-c x²} x^{2k} dx = Γ(k+1/2)/c^{k+1/2}
        let c = 2.5f64;
        let ax = LabelGrid::gauss_hermite_1d(24, c).unwrap();
        let cases = [
            (0usize, std::f64::consts::PI.sqrt() / c.sqrt()),
            (1, 0.5 * std::f64::consts::PI.sqrt() / c.powf(1.5)),
            (4, 105.0 / 16.0 * std::f64::consts::PI.sqrt() / c.powf(4.5)),
        ];
        for (k, expect) in cases {
            let got: f64 = ax
                .nodes
                .iter()
                .zip(&ax.weights)
                .map(|(x, w)| w * (-c * x * x).exp() * x.powi(2 * k as i32))
                .sum();
            assert!((got - expect).abs() < 1e-12 * expect.abs().max(1.0), "k={k}: {got} vs {expect}");
        }
    }

    #[test]
    fn gauss_hermite_64_nodes_stay_inside_radius_six() {
        let ax = LabelGrid::gauss_hermite_1d(64, 100.0 / 21.0).unwrap();
        assert!(ax.nodes.iter().all(|x| x.abs() < 6.0));
        // weights all positive and finite
        assert!(ax.weights.iter().all(|w| w.is_finite() && *w > 0.0));
    }

    #[test]
    fn gauss_hermite_high_degree_exactness() {
        // 64 nodes must integrate e^{-c x²} x^{100} to near machine accuracy
        let c = 3.0f64;
        let ax = LabelGrid::gauss_hermite_1d(64, c).unwrap();
        // Γ(50.5)/c^{50.5} via logs
        let mut lg = std::f64::consts::PI.sqrt().ln();
        for k in 0..50 {
            lg += (k as f64 + 0.5).ln();
        }
        let expect = (lg - 50.5 * c.ln()).exp();
        let got: f64 = ax
            .nodes
            .iter()
            .zip(&ax.weights)
            .map(|(x, w)| w * (-c * x * x).exp() * x.powi(100))
            .sum();
        assert!(
            ((got - expect) / expect).abs() < 1e-10,
            "rel err {}",
            ((got - expect) / expect).abs()
        );
    }

    #[test]
    fn field_integral_of_gaussian() {
        let g = LabelGrid::square(8.0, 96).unwrap();
        let vals: Vec<Complex64> = g
            .points
            .iter()
            .map(|p| Complex64::new((-(p[0] * p[0] + p[1] * p[1])).exp(), 0.0))
            .collect();
        let f = SymbolField::new(g, vals).unwrap();
        assert!((f.integral().re - std::f64::consts::PI).abs() < 1e-9);
    }
}

