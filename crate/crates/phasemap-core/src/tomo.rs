//! Symplectic tomography: the quantizer δ(X − μq̂ − νp̂) realized as a
//! Gaussian-smoothed spectral projector, the dequantizer
//! (1/2π)·e^{iX}·exp(−iνp̂ − iμq̂), tomograms of states, homogeneity checks
//! and the closed-form N-symbol star kernel with its delta factor kept
//! symbolic.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{PhasemapError, Result};
use crate::expm::expm;
use crate::fock::{build_ladder, FockSpace, Operator};
use crate::grid::{Axis, LabelGrid};
use crate::pair::{symbol_field, QuantizerPair, TraceMode};

const TAU: f64 = std::f64::consts::TAU;

/// A point (X, μ, ν) of the tomographic label space: X is the quadrature
/// value in the reference frame scaled and rotated by (μ, ν).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoPoint {
    pub x: f64,
    pub mu: f64,
    pub nu: f64,
}

impl TomoPoint {
    pub fn new(x: f64, mu: f64, nu: f64) -> Result<TomoPoint> {
        if !(x.is_finite() && mu.is_finite() && nu.is_finite()) {
            return Err(PhasemapError::Domain("tomographic labels must be finite".into()));
        }
        if mu == 0.0 && nu == 0.0 {
            return Err(PhasemapError::DegenerateFrame(
                "(mu, nu) = (0, 0) does not define a quadrature".into(),
            ));
        }
        Ok(TomoPoint { x, mu, nu })
    }
}

/// A sampled tomogram: real symbol values over an (X, μ, ν) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    pub grid: LabelGrid,
    pub values: Vec<f64>,
}

impl Tomogram {
    /// CSV rows `X,mu,nu,w` with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("X,mu,nu,w\n");
        for (p, v) in self.grid.points.iter().zip(&self.values) {
            out.push_str(&format!("{:.11e},{:.11e},{:.11e},{:.11e}\n", p[0], p[1], p[2], v));
        }
        out
    }
}

/// The star kernel's value split into the linear delta constraint
/// μ·Σν_j − ν·Σμ_j (the kernel is supported where this vanishes) and the
/// smooth complex amplitude multiplying the delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoKernelValue {
    pub constraint: f64,
    pub amplitude: Complex64,
}

/// μq̂ + νp̂ as a Hermitian matrix.
fn quadrature_matrix(space: FockSpace, mu: f64, nu: f64) -> DMatrix<Complex64> {
    let l = build_ladder(space);
    &l.q.entries * Complex64::new(mu, 0.0) + &l.p.entries * Complex64::new(nu, 0.0)
}

/// Spectral data of μq̂ + νp̂: eigenvalues and the diagonal matrix elements
/// ⟨v_k|A|v_k⟩ of `op` in the eigenbasis.
fn frame_decomposition(op: &Operator, mu: f64, nu: f64) -> (Vec<f64>, Vec<Complex64>) {
    let m = quadrature_matrix(op.space, mu, nu);
    let eig = SymmetricEigen::new(m);
    let n = op.space.dim;
    let mut eigs = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        eigs.push(eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += op.entries[(i, j)] * v[j];
            }
            acc += v[i].conj() * row;
        }
        diag.push(acc);
    }
    (eigs, diag)
}

fn gaussian(t: f64, width: f64) -> f64 {
    (-(t * t) / (2.0 * width * width)).exp() / (width * (TAU).sqrt())
}

/// The quantizer: δ(X − μq̂ − νp̂) with the delta replaced by a normalized
/// Gaussian of the given width applied to each spectral projector.
pub fn tomo_quantizer(space: FockSpace, p: TomoPoint, width: f64) -> Result<Operator> {
    if !(width > 0.0) {
        return Err(PhasemapError::Domain("smoothing width must be positive".into()));
    }
    if p.mu == 0.0 && p.nu == 0.0 {
        return Err(PhasemapError::DegenerateFrame(
            "(mu, nu) = (0, 0) does not define a quadrature".into(),
        ));
    }
    let m = quadrature_matrix(space, p.mu, p.nu);
    let eig = SymmetricEigen::new(m);
    let n = space.dim;
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let g = gaussian(p.x - eig.eigenvalues[k], width);
        if g == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += v[i] * v[j].conj() * Complex64::new(g, 0.0);
            }
        }
    }
    Operator::new(space, out)
}

/// The dequantizer (1/2π)·e^{iX}·exp(−iνp̂ − iμq̂): the displacement of
/// ξ = (ν − iμ)/√2, built by matrix exponential.
///
/// The exponential is taken in a Fock space of twice the target dimension and
/// the top-left block is kept. Exponentiating the truncated generator directly
/// pollutes the last ~|ξ|√dim rows, and reconstruction integrals pick that
/// pollution up on the high-occupation diagonal; the padded block instead
/// converges to the infinite-dimensional matrix elements for |ξ|² ≲ dim.
///
/// No truncation guard here: reconstruction quadratures legitimately visit
/// frames whose displacement exceeds the truncation radius, where the
/// integrand is already damped by the state's characteristic-function decay.
pub fn tomo_dequantizer(space: FockSpace, p: TomoPoint) -> Result<Operator> {
    let xi = Complex64::new(p.nu, -p.mu) * std::f64::consts::FRAC_1_SQRT_2;
    let n = space.dim;
    let big = 2 * n;
    let mut g = DMatrix::<Complex64>::zeros(big, big);
    for m in 1..big {
        let r = (m as f64).sqrt();
        g[(m, m - 1)] = xi * r;
        g[(m - 1, m)] = -xi.conj() * r;
    }
    let full = expm(&g);
    let d = Operator::new(space, full.view((0, 0), (n, n)).into_owned())?;
    Ok(d.scale(Complex64::new(0.0, p.x).exp() / TAU))
}

/// The tomographic pair over labels (X, μ, ν). Not delta-complete: the
/// smoothed quantizer family is overcomplete and its pairing kernel is not a
/// delta. The default grid spans X ∈ [−10, 10] (40 points) and
/// μ, ν ∈ [−5, 5] (32 points each).
pub fn tomo_pair(space: FockSpace, delta_width: f64) -> Result<QuantizerPair> {
    if !(delta_width > 0.0) {
        return Err(PhasemapError::Domain("smoothing width must be positive".into()));
    }
    let x_axis = LabelGrid::uniform_1d(-10.0, 10.0, 40)?;
    let f_axis = LabelGrid::uniform_1d(-5.0, 5.0, 32)?;
    let grid = LabelGrid::tensor(&[x_axis, f_axis.clone(), f_axis])?;
    let u_space = space;
    let u_fn = std::sync::Arc::new(move |x: &[f64]| {
        let p = TomoPoint { x: x[0], mu: x[1], nu: x[2] };
        tomo_quantizer(u_space, p, delta_width).expect("grid keeps (mu, nu) away from (0, 0)")
    });
    let d_space = space;
    let d_fn = std::sync::Arc::new(move |x: &[f64]| {
        let p = TomoPoint { x: x[0], mu: x[1], nu: x[2] };
        tomo_dequantizer(d_space, p).expect("displacement of finite labels")
    });
    Ok(QuantizerPair::new(
        space,
        3,
        format!("tomographic(width={delta_width})"),
        grid,
        false,
        false,
        TraceMode::Plain,
        u_fn,
        d_fn,
    ))
}

/// Single tomogram value w(X, μ, ν) = Tr[ρ·Û(X, μ, ν)] with the smoothed
/// quantizer; returns the real part (the imaginary residue is reported as an
/// error above 1e−8 for Hermitian inputs).
pub fn tomogram_value(rho: &Operator, p: TomoPoint, width: f64) -> Result<f64> {
    let (eigs, diag) = frame_decomposition(rho, p.mu, p.nu);
    if !(width > 0.0) {
        return Err(PhasemapError::Domain("smoothing width must be positive".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (e, d) in eigs.iter().zip(&diag) {
        acc += d * gaussian(p.x - e, width);
    }
    if rho.is_hermitian(1e-10) && acc.im.abs() > 1e-8 {
        return Err(PhasemapError::Stability(format!(
            "tomogram of a Hermitian operator has imaginary residue {}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Tomogram of a state over a grid of (X, μ, ν) labels.
pub fn tomogram_of_state(rho: &Operator, grid: &LabelGrid, delta_width: f64) -> Result<Tomogram> {
    let pair = tomo_pair(rho.space, delta_width)?;
    let field = symbol_field(rho, &pair, grid)?;
    let mut values = Vec::with_capacity(field.values.len());
    for v in &field.values {
        if v.im.abs() > 1e-10 {
            return Err(PhasemapError::Stability(format!(
                "tomogram has imaginary residue {}",
                v.im
            )));
        }
        values.push(v.re);
    }
    Ok(Tomogram { grid: grid.clone(), values })
}

/// Homogeneity defect |λ|·w(λX, λμ, λν) − w(X, μ, ν), with the smoothing
/// width scaled by |λ| so both sides are resolved at the same physical scale.
pub fn homogeneity_defect(
    rho: &Operator,
    p: TomoPoint,
    lambda: f64,
    width: f64,
) -> Result<f64> {
    if lambda == 0.0 {
        return Err(PhasemapError::Domain("homogeneity scale must be nonzero".into()));
    }
    let scaled = TomoPoint::new(lambda * p.x, lambda * p.mu, lambda * p.nu)?;
    let ws = tomogram_value(rho, scaled, lambda.abs() * width)?;
    let w0 = tomogram_value(rho, p, width)?;
    Ok(lambda.abs() * ws - w0)
}

/// The N-symbol star kernel at input points x₁..x_N and output point `out`,
/// with the delta factor kept symbolic:
///
/// K = δ(μ·Σν_j − ν·Σμ_j) · (2π)^{−N} ·
///     exp(i/2 {Σ_{k<j}(ν_kμ_j − ν_jμ_k) + 2ΣX_j
///              − [(1−R)/ν·Σν_j + (1+R)/μ·Σμ_j]·X}),  R = √(1 − 4μ²ν²),
///
/// where (X, μ, ν) is the output point. The square root takes the
/// nonnegative real branch; arguments outside its domain are rejected.
pub fn tomo_kernel(points: &[TomoPoint], out: TomoPoint) -> Result<TomoKernelValue> {
    let n = points.len();
    if n < 2 {
        return Err(PhasemapError::Domain(format!(
            "star kernel needs at least 2 input points, got {n}"
        )));
    }
    if out.mu == 0.0 || out.nu == 0.0 {
        return Err(PhasemapError::DegenerateFrame(
            "kernel output frame must have both mu and nu nonzero".into(),
        ));
    }
    let disc = 1.0 - 4.0 * out.mu * out.mu * out.nu * out.nu;
    if disc < 0.0 {
        return Err(PhasemapError::Branch(4.0 * out.mu * out.mu * out.nu * out.nu));
    }
    let r = disc.sqrt();
    let sum_mu: f64 = points.iter().map(|p| p.mu).sum();
    let sum_nu: f64 = points.iter().map(|p| p.nu).sum();
    let sum_x: f64 = points.iter().map(|p| p.x).sum();
    let mut antisym = 0.0;
    for k in 0..n {
        for j in k + 1..n {
            antisym += points[k].nu * points[j].mu - points[j].nu * points[k].mu;
        }
    }
    let phase = 0.5
        * (antisym + 2.0 * sum_x
            - ((1.0 - r) / out.nu * sum_nu + (1.0 + r) / out.mu * sum_mu) * out.x);
    let amplitude = Complex64::new(0.0, phase).exp() / TAU.powi(n as i32);
    Ok(TomoKernelValue {
        constraint: out.mu * sum_nu - out.nu * sum_mu,
        amplitude,
    })
}

/// Kernel-route star product of N tomograms at a single output point.
///
/// Each symbol enters only through e^{iX_j}, so the X-quadratures collapse to
/// one Fourier coefficient S_j(μ, ν) = ∫ w_j(X, μ, ν) e^{iX} dX per frame;
/// the delta constraint is resolved analytically for the last frame's ν with
/// Jacobian 1/|μ_out|. Symbols are supplied as point evaluators.
pub fn tomo_star_via_kernel(
    symbols: &[&(dyn Fn(TomoPoint) -> Complex64 + Sync)],
    out: TomoPoint,
    x_axis: &Axis,
    mu_axis: &Axis,
    nu_axis: &Axis,
) -> Result<Complex64> {
    let n = symbols.len();
    if n < 2 {
        return Err(PhasemapError::Domain("star product needs at least 2 symbols".into()));
    }
    if out.mu == 0.0 || out.nu == 0.0 {
        return Err(PhasemapError::DegenerateFrame(
            "kernel output frame must have both mu and nu nonzero".into(),
        ));
    }
    let fourier = |w: &(dyn Fn(TomoPoint) -> Complex64 + Sync), mu: f64, nu: f64| {
        let mut s = Complex64::new(0.0, 0.0);
        for (x, wx) in x_axis.nodes.iter().zip(&x_axis.weights) {
            s += w(TomoPoint { x: *x, mu, nu }) * Complex64::new(0.0, *x).exp() * *wx;
        }
        s
    };
    // precompute the on-lattice Fourier tables for the first N−1 symbols
    let nmu = mu_axis.nodes.len();
    let nnu = nu_axis.nodes.len();
    let tables: Vec<Vec<Complex64>> = symbols[..n - 1]
        .iter()
        .map(|w| {
            let mut t = Vec::with_capacity(nmu * nnu);
            for mu in &mu_axis.nodes {
                for nu in &nu_axis.nodes {
                    t.push(fourier(*w, *mu, *nu));
                }
            }
            t
        })
        .collect();
    // odometer over (μ_j, ν_j) for j < N−1 plus μ_{N−1}; ν_{N−1} is solved
    // from the constraint μ_out·Σν = ν_out·Σμ
    let mut idx = vec![0usize; 2 * (n - 1) + 1];
    let mut acc = Complex64::new(0.0, 0.0);
    'outer: loop {
        let mut mus = Vec::with_capacity(n);
        let mut nus = Vec::with_capacity(n);
        let mut weight = 1.0;
        let mut sval = Complex64::new(1.0, 0.0);
        for j in 0..n - 1 {
            let im = idx[2 * j];
            let inu = idx[2 * j + 1];
            mus.push(mu_axis.nodes[im]);
            nus.push(nu_axis.nodes[inu]);
            weight *= mu_axis.weights[im] * nu_axis.weights[inu];
            sval *= tables[j][im * nnu + inu];
        }
        let im_last = idx[2 * (n - 1)];
        let mu_last = mu_axis.nodes[im_last];
        weight *= mu_axis.weights[im_last];
        let nu_last =
            (out.nu * (mus.iter().sum::<f64>() + mu_last) - out.mu * nus.iter().sum::<f64>())
                / out.mu;
        mus.push(mu_last);
        nus.push(nu_last);
        if sval.norm() * weight.abs() > 1e-16 {
            let s_last = fourier(symbols[n - 1], mu_last, nu_last);
            // phase of the kernel amplitude with the X_j factors removed
            let mut antisym = 0.0;
            for k in 0..n {
                for j in k + 1..n {
                    antisym += nus[k] * mus[j] - nus[j] * mus[k];
                }
            }
            let disc = 1.0 - 4.0 * out.mu * out.mu * out.nu * out.nu;
            if disc < 0.0 {
                return Err(PhasemapError::Branch(4.0 * out.mu * out.mu * out.nu * out.nu));
            }
            let r = disc.sqrt();
            let phase = 0.5
                * (antisym
                    - ((1.0 - r) / out.nu * nus.iter().sum::<f64>()
                        + (1.0 + r) / out.mu * mus.iter().sum::<f64>())
                        * out.x);
            acc += sval
                * s_last
                * Complex64::new(0.0, phase).exp()
                * (weight / (TAU.powi(n as i32) * out.mu.abs()));
        }
        // advance the odometer
        for k in 0..idx.len() {
            idx[k] += 1;
            let cap = if k == 2 * (n - 1) || k % 2 == 0 { nmu } else { nnu };
            if idx[k] < cap {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    Ok(acc)
}

/// Tomogram evaluator for use as a star-product symbol.
pub fn state_symbol(rho: &Operator, width: f64) -> impl Fn(TomoPoint) -> Complex64 + Sync + '_ {
    move |p: TomoPoint| {
        let (eigs, diag) = frame_decomposition(rho, p.mu, p.nu);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, d) in eigs.iter().zip(&diag) {
            acc += d * gaussian(p.x - e, width);
        }
        acc
    }
}
