//! Weyl and s-ordered quantizer/dequantizer pairs with closed-form
//! star-product kernels, the deformed-displacement trace, Wigner fields and
//! purity kernels.
//!
//! Two coordinate conventions appear:
//! * canonical complex labels α = x1 + i·x2 ([`PhasePoint`]), used by the
//!   s-ordered family;
//! * rescaled phase-space coordinates (q, p) with α = (q + i·p)/√2, used by
//!   the Weyl pair and by [`moyal_kernel`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{PhasemapError, Result};
use crate::fock::{displaced_number_power, FockSpace, Operator};
use crate::grid::{LabelGrid, SymbolField};
use crate::pair::{symbol_field, QuantizerPair, TraceMode};

const PI: f64 = std::f64::consts::PI;

/// Ordering parameter s ∈ (−1, 1) and the derived geometric base
/// q = (s+1)/(s−1) < 0.
///
/// The endpoints s = ±1 (normal / antinormal ordering) are poles of the
/// defining formulas and are excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SOrder {
    s: f64,
    q: f64,
}

impl SOrder {
    pub fn new(s: f64) -> Result<SOrder> {
        if !s.is_finite() || s.abs() >= 1.0 {
            return Err(PhasemapError::Domain(format!(
                "ordering parameter must lie in the open interval (-1, 1), got {s}"
            )));
        }
        Ok(SOrder {
            s,
            q: (s + 1.0) / (s - 1.0),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The opposite ordering −s, whose base is 1/q.
    pub fn conjugate(&self) -> SOrder {
        SOrder {
            s: -self.s,
            q: 1.0 / self.q,
        }
    }
}

/// A phase-space label in canonical complex coordinates α = x1 + i·x2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x1: f64,
    pub x2: f64,
}

impl PhasePoint {
    pub fn new(x1: f64, x2: f64) -> PhasePoint {
        PhasePoint { x1, x2 }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.x1, self.x2)
    }

    /// From rescaled coordinates: x1 = q/√2, x2 = p/√2.
    pub fn from_qp(q: f64, p: f64) -> PhasePoint {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        PhasePoint { x1: q * r, x2: p * r }
    }

    /// Rescaled coordinates (q, p) = (√2·x1, √2·x2).
    pub fn to_qp(&self) -> (f64, f64) {
        let r = std::f64::consts::SQRT_2;
        (self.x1 * r, self.x2 * r)
    }
}

fn product_drop_for(dim: usize) -> usize {
    (3.0 * (dim as f64).sqrt()).round() as usize
}

/// Gaussian decay rate of reconstruction integrands for ordering `s`:
/// the quantizer carries e^{−(1−q)|α|²} and the dequantizer e^{−(1−1/q)|α|²},
/// which combine to e^{−4/(1−s²)·|α|²}. The default grids detune this by 10%
/// so the quadrature keeps a measurable, resolution-driven error.
fn envelope_rate(s: f64) -> f64 {
    0.9 * 4.0 / (1.0 - s * s)
}

/// The s-ordered pair over complex labels α = x1 + i·x2:
///
/// Û(α) = (1−q)·D(α)·q^{n̂}·D(−α),  D̂(α) = (1/π)(1−1/q)·D(α)·q^{−n̂}·D(−α),
///
/// i.e. the dequantizer is (1/π)·Û built with the opposite ordering. The pair
/// carries a Gauss–Hermite default grid tuned to the symbols' Gaussian decay
/// and a closed-form N-symbol star kernel ([`s_kernel`]).
pub fn sordered_pair(space: FockSpace, order: SOrder) -> Result<QuantizerPair> {
    let dim = space.dim;
    if dim > 128 {
        return Err(PhasemapError::Resource(format!(
            "displaced-power construction capped at dimension 128, got {dim}"
        )));
    }
    let q = order.q();
    let grid = LabelGrid::gauss_square(envelope_rate(order.s()), 64)?;
    let u_space = space;
    let d_space = space;
    let u_fn = Arc::new(move |x: &[f64]| {
        let alpha = Complex64::new(x[0], x[1]);
        displaced_number_power(u_space, alpha, q)
            .expect("dimension pre-validated")
            .scale(Complex64::new(1.0 - q, 0.0))
    });
    let d_fn = Arc::new(move |x: &[f64]| {
        let alpha = Complex64::new(x[0], x[1]);
        displaced_number_power(d_space, alpha, 1.0 / q)
            .expect("dimension pre-validated")
            .scale(Complex64::new((1.0 - 1.0 / q) / PI, 0.0))
    });
    let kernel_order = order;
    let pair = QuantizerPair::new(
        space,
        2,
        format!("s-ordered(s={})", order.s()),
        grid,
        true,
        true,
        TraceMode::Accelerated {
            product_drop: product_drop_for(dim),
        },
        u_fn,
        d_fn,
    )
    .with_closed_kernel(Arc::new(move |inputs: &[&[f64]], out: &[f64]| {
        let mut alphas: Vec<Complex64> = inputs
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        alphas.push(Complex64::new(out[0], out[1]));
        s_kernel(kernel_order, &alphas)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }));
    Ok(pair)
}

/// The Weyl pair over rescaled labels (q, p), α = (q + i·p)/√2:
/// Û = 2·D(α)·(−1)^{n̂}·D(−α) (displaced parity), D̂ = Û/(2π).
///
/// Equivalent to [`sordered_pair`] at s = 0 up to the coordinate rescaling;
/// the default grid is a uniform midpoint square of radius 6.
pub fn weyl_pair(space: FockSpace) -> Result<QuantizerPair> {
    let dim = space.dim;
    if dim > 128 {
        return Err(PhasemapError::Resource(format!(
            "displaced-power construction capped at dimension 128, got {dim}"
        )));
    }
    let grid = LabelGrid::square(6.0, 64)?;
    let u_space = space;
    let u_fn = Arc::new(move |x: &[f64]| {
        let alpha = Complex64::new(x[0], x[1]) * std::f64::consts::FRAC_1_SQRT_2;
        displaced_number_power(u_space, alpha, -1.0)
            .expect("dimension pre-validated")
            .scale(Complex64::new(2.0, 0.0))
    });
    let uf = u_fn.clone();
    let d_fn = Arc::new(move |x: &[f64]| uf(x).scale(Complex64::new(1.0 / (2.0 * PI), 0.0)));
    let weyl_order = SOrder::new(0.0).expect("s = 0 is admissible");
    let pair = QuantizerPair::new(
        space,
        2,
        "weyl",
        grid,
        true,
        true,
        TraceMode::Accelerated {
            product_drop: product_drop_for(dim),
        },
        u_fn,
        d_fn,
    )
    .with_closed_kernel(Arc::new(move |inputs: &[&[f64]], out: &[f64]| {
        if inputs.len() == 2 {
            // two-symbol kernel in rescaled coordinates; the second argument
            // slot of the printed form labels the first factor
            return moyal_kernel(
                PhasePoint::new(inputs[1][0], inputs[1][1]),
                PhasePoint::new(inputs[0][0], inputs[0][1]),
                PhasePoint::new(out[0], out[1]),
            );
        }
        // general N: evaluate in complex coordinates and apply the Jacobian
        // (dq dp = 2 d²α) once per integrated input slot
        let mut alphas: Vec<Complex64> = inputs
            .iter()
            .map(|p| Complex64::new(p[0], p[1]) * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        alphas.push(Complex64::new(out[0], out[1]) * std::f64::consts::FRAC_1_SQRT_2);
        match s_kernel(weyl_order, &alphas) {
            Ok(v) => v * (0.5f64).powi(inputs.len() as i32),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }));
    Ok(pair)
}

/// Two-symbol star kernel of the Weyl pair in rescaled coordinates:
///
/// K(x″, x′, x) = π⁻² exp{2i[(x₂′−x₂)(x₁−x₁″) + (x₁′−x₁)(x₂″−x₂)]}.
///
/// Under the trace definition Tr[D̂(y)D̂(z)Û(x)], the primed argument x′
/// carries the first factor's label y and the double-primed x″ the second's.
pub fn moyal_kernel(xpp: PhasePoint, xp: PhasePoint, x: PhasePoint) -> Complex64 {
    let phase = 2.0
        * ((xp.x2 - x.x2) * (x.x1 - xpp.x1) + (xp.x1 - x.x1) * (xpp.x2 - x.x2));
    Complex64::new(0.0, phase).exp() / (PI * PI)
}

/// Closed-form Gaussian kernel of the (N−1)-symbol star product,
/// K(α₁, …, α_N) = Tr[D̂(α₁)⋯D̂(α_{N−1})·Û(α_N)], for N = alphas.len() ≥ 3.
///
/// The quadratic form uses q̃ = q^{2−N}; the diagonal |α_i|²-term applies to
/// every input slot i = 1..N−1 (this reading reproduces the two-symbol kernel
/// at N = 3 and matches the trace definition at N = 4).
pub fn s_kernel(order: SOrder, alphas: &[Complex64]) -> Result<Complex64> {
    let n = alphas.len();
    if n < 3 {
        return Err(PhasemapError::Domain(format!(
            "N-symbol kernel needs at least 3 labels (2 inputs + output), got {n}"
        )));
    }
    let q = order.q();
    let qt = q.powi(2 - n as i32);
    if (1.0 - qt).abs() < 1e-12 {
        return Err(PhasemapError::Degenerate(format!(
            "kernel denominator 1 - q^(2-N) vanishes at q = {q}, N = {n}"
        )));
    }
    let qinv = 1.0 / q;
    let pref = (1.0 - q) / (1.0 - qt) * ((1.0 - qinv).powi(n as i32 - 1)) / PI.powi(n as i32 - 1);
    let c_cross = (q - 1.0) * (1.0 - qinv) / (1.0 - qt);
    let c_out = (1.0 - q) * (1.0 - qinv) / (1.0 - qt);
    let diag_in = 0.5 * (qinv - q - (qt + 1.0) / (1.0 - qt) * (1.0 - q) * (1.0 - qinv));
    let diag_out = 0.5 * (q - qinv - (qt + 1.0) / (1.0 - qt) * (1.0 - q) * (1.0 - qinv));
    let a_n = alphas[n - 1];
    let mut e = Complex64::new(diag_out * a_n.norm_sqr(), 0.0);
    for i in 0..n - 1 {
        let ai = alphas[i];
        e += diag_in * ai.norm_sqr();
        // i, j are 1-based in the quadratic form's exponents
        let i1 = (i + 1) as i32;
        e += c_out
            * (q.powi(1 - i1) * ai * a_n.conj() + q.powi(i1 + 1 - n as i32) * a_n * ai.conj());
        for j in i + 1..n - 1 {
            let aj = alphas[j];
            let j1 = (j + 1) as i32;
            e += c_cross
                * (q.powi(j1 - i1 + 2 - n as i32) * ai * aj.conj()
                    + q.powi(i1 - j1) * aj * ai.conj());
        }
    }
    Ok(pref * e.exp())
}

/// Trace of the deformed displacement against the geometric number operator:
///
/// Tr[exp(α·a† − α̃*·a)·q^{n̂}] = 1/(1−q) · exp[−(q/(1−q) + 1/2)·α·α̃*],
///
/// with α and α̃* treated as independent complex parameters.
pub fn z_trace(order: SOrder, alpha: Complex64, alpha_tilde_conj: Complex64) -> Complex64 {
    let q = order.q();
    let c = q / (1.0 - q) + 0.5;
    (-(c * alpha * alpha_tilde_conj)).exp() / (1.0 - q)
}

/// Wigner field of `rho`: the Weyl-pair symbol in rescaled coordinates
/// (q, p). Normalization: ∫ W dq dp / (2π) = Tr ρ.
pub fn wigner(rho: &Operator, grid: &LabelGrid) -> Result<SymbolField> {
    let pair = weyl_pair(rho.space)?;
    symbol_field(rho, &pair, grid)
}

/// Trace of a product of dequantizers,
/// Tr[D̂(α₁)⋯D̂(α_N)] = π/((1−q)(1−1/q)) · K(α₁, …, α_N, 0, 0),
/// obtained from the (N+2)-label kernel with two trailing zero labels.
/// Integrating it against N state symbols yields Tr ρ^N.
pub fn purity_kernel(order: SOrder, alphas: &[Complex64]) -> Result<Complex64> {
    if alphas.len() < 2 {
        return Err(PhasemapError::Domain(format!(
            "purity kernel needs at least 2 labels, got {}",
            alphas.len()
        )));
    }
    let q = order.q();
    let mut ext = alphas.to_vec();
    ext.push(Complex64::new(0.0, 0.0));
    ext.push(Complex64::new(0.0, 0.0));
    Ok(s_kernel(order, &ext)? * PI / ((1.0 - q) * (1.0 - 1.0 / q)))
}
