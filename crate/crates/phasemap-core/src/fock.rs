//! Truncated Fock-space operator algebra: ladder operators, displacement,
//! diagonal number powers, standard states and trace primitives.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dd::DdComplex;
use crate::error::{PhasemapError, Result};
use crate::expm::expm;

pub type CMat = DMatrix<Complex64>;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncated Fock space of dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpace {
    pub dim: usize,
    /// maximum admissible relative weight on the top basis levels for
    /// states/operators to be considered well-truncated
    pub tail_tolerance: f64,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<FockSpace> {
        FockSpace::with_tail_tolerance(dim, 1e-6)
    }

    pub fn with_tail_tolerance(dim: usize, tail_tolerance: f64) -> Result<FockSpace> {
        if dim < 2 {
            return Err(PhasemapError::Domain(format!("dim must be >= 2, got {dim}")));
        }
        if !(0.0..1.0).contains(&tail_tolerance) {
            return Err(PhasemapError::Domain(format!(
                "tail_tolerance must lie in [0,1), got {tail_tolerance}"
            )));
        }
        Ok(FockSpace { dim, tail_tolerance })
    }
}

/// Dense operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub space: FockSpace,
    pub entries: CMat,
}

impl Operator {
    pub fn new(space: FockSpace, entries: CMat) -> Result<Operator> {
        if entries.nrows() != space.dim || entries.ncols() != space.dim {
            return Err(PhasemapError::DimensionMismatch(format!(
                "matrix is {}x{}, space dim is {}",
                entries.nrows(),
                entries.ncols(),
                space.dim
            )));
        }
        Ok(Operator { space, entries })
    }

    pub fn zeros(space: FockSpace) -> Operator {
        Operator {
            space,
            entries: CMat::zeros(space.dim, space.dim),
        }
    }

    pub fn identity(space: FockSpace) -> Operator {
        Operator {
            space,
            entries: CMat::identity(space.dim, space.dim),
        }
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            space: self.space,
            entries: self.entries.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.space.dim).map(|k| self.entries[(k, k)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul(&self, rhs: &Operator) -> Result<Operator> {
        self.check_space(rhs)?;
        Ok(Operator {
            space: self.space,
            entries: &self.entries * &rhs.entries,
        })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        self.check_space(rhs)?;
        Ok(Operator {
            space: self.space,
            entries: &self.entries + &rhs.entries,
        })
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Operator> {
        self.check_space(rhs)?;
        Ok(Operator {
            space: self.space,
            entries: &self.entries - &rhs.entries,
        })
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Operator {
            space: self.space,
            entries: &self.entries * c,
        }
    }

    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.check_space(rhs)?;
        Ok(Operator {
            space: self.space,
            entries: &self.entries * &rhs.entries - &rhs.entries * &self.entries,
        })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.entries - self.entries.adjoint()).norm() <= tol
    }

    fn check_space(&self, rhs: &Operator) -> Result<()> {
        if self.space.dim != rhs.space.dim {
            return Err(PhasemapError::DimensionMismatch(format!(
                "operator dims {} vs {}",
                self.space.dim, rhs.space.dim
            )));
        }
        Ok(())
    }
}

/// Ladder operators and friends on one space.
pub struct Ladder {
    pub a: Operator,
    pub a_dagger: Operator,
    pub q: Operator,
    pub p: Operator,
    pub identity: Operator,
}

/// a, a†, q = (a+a†)/√2, p = (a−a†)/(i√2) and the identity.
pub fn build_ladder(space: FockSpace) -> Ladder {
    let n = space.dim;
    let mut a = CMat::zeros(n, n);
    for m in 1..n {
        a[(m - 1, m)] = Complex64::new((m as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &adag) * Complex64::new(inv_sqrt2, 0.0);
    let p = (&a - &adag) * Complex64::new(0.0, -inv_sqrt2);
    Ladder {
        a: Operator { space, entries: a },
        a_dagger: Operator { space, entries: adag },
        q: Operator { space, entries: q },
        p: Operator { space, entries: p },
        identity: Operator::identity(space),
    }
}

/// D(α) = exp(α a† − α* a), truncated; scaling-and-squaring exponential.
///
/// Signals `Truncation` if the (0,0) entry strays from e^{−|α|²/2} by more
/// than the space's admissible bound — the sign that `dim` is too small for
/// this displacement.
pub fn displacement(space: FockSpace, alpha: Complex64) -> Result<Operator> {
    let n = space.dim;
    let mut g = CMat::zeros(n, n);
    for m in 1..n {
        let r = (m as f64).sqrt();
        g[(m, m - 1)] = alpha * r; // α a†
        g[(m - 1, m)] = -alpha.conj() * r; // −α* a
    }
    let d = expm(&g);
    let expect00 = (-alpha.norm_sqr() / 2.0).exp();
    let bound = space.tail_tolerance.max(1e-10);
    if (d[(0, 0)] - Complex64::new(expect00, 0.0)).norm() > bound {
        return Err(PhasemapError::Truncation(format!(
            "displacement(|alpha|={:.3}) vacuum overlap off by {:.2e} at dim {}",
            alpha.norm(),
            (d[(0, 0)] - Complex64::new(expect00, 0.0)).norm(),
            n
        )));
    }
    Ok(Operator { space, entries: d })
}

/// Diagonal operator base^{a†a} = diag(base^n).
pub fn number_power(space: FockSpace, base: f64) -> Result<Operator> {
    if base == 0.0 {
        return Err(PhasemapError::Domain("number_power base must be nonzero".into()));
    }
    let n = space.dim;
    let mut m = CMat::zeros(n, n);
    let mut v = 1.0f64;
    for k in 0..n {
        m[(k, k)] = Complex64::new(v, 0.0);
        v *= base;
    }
    Ok(Operator { space, entries: m })
}

/// Normalized coherent-state column |α⟩ via its power series (independent of
/// the matrix-exponential displacement path).
pub fn coherent_vector(space: FockSpace, alpha: Complex64) -> Result<Vec<Complex64>> {
    let n = space.dim;
    let mut v = vec![C_ZERO; n];
    v[0] = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for k in 1..n {
        v[k] = v[k - 1] * alpha / (k as f64).sqrt();
    }
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let tail = 1.0 - norm_sqr;
    if tail > space.tail_tolerance.max(1e-12) {
        return Err(PhasemapError::Truncation(format!(
            "coherent(|alpha|={:.3}) leaves weight {:.2e} beyond dim {}",
            alpha.norm(),
            tail,
            n
        )));
    }
    let inv = Complex64::new(1.0 / norm_sqr.sqrt(), 0.0);
    for z in v.iter_mut() {
        *z *= inv;
    }
    Ok(v)
}

/// Standard density operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Fock(usize),
    Coherent(Complex64),
    Thermal(f64),
}

pub fn make_state(space: FockSpace, kind: StateKind) -> Result<Operator> {
    let n = space.dim;
    let mut m = CMat::zeros(n, n);
    match kind {
        StateKind::Fock(k) => {
            if k >= n {
                return Err(PhasemapError::Domain(format!("fock level {k} >= dim {n}")));
            }
            m[(k, k)] = C_ONE;
        }
        StateKind::Coherent(alpha) => {
            let v = coherent_vector(space, alpha)?;
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = v[i] * v[j].conj();
                }
            }
        }
        StateKind::Thermal(nbar) => {
            if nbar < 0.0 {
                return Err(PhasemapError::Domain(format!("thermal nbar must be >= 0, got {nbar}")));
            }
            if nbar == 0.0 {
                m[(0, 0)] = C_ONE;
            } else {
                let r = nbar / (1.0 + nbar);
                let mut p = 1.0 / (1.0 + nbar);
                let mut total = 0.0;
                let mut diag = vec![0.0f64; n];
                for d in diag.iter_mut() {
                    *d = p;
                    total += p;
                    p *= r;
                }
                // renormalize the truncated geometric tail so the trace is exactly 1
                for (k, d) in diag.iter().enumerate() {
                    m[(k, k)] = Complex64::new(d / total, 0.0);
                }
            }
        }
    }
    Ok(Operator { space, entries: m })
}

/// Tr[op₁ op₂ … op_k], accumulated left-to-right.
pub fn trace_product(ops: &[&Operator]) -> Result<Complex64> {
    match ops {
        [] => Err(PhasemapError::Domain("trace_product needs at least one operator".into())),
        [one] => Ok(one.trace()),
        [first, rest @ ..] => {
            let mut acc = first.entries.clone();
            for (i, op) in rest.iter().enumerate() {
                if op.space.dim != first.space.dim {
                    return Err(PhasemapError::DimensionMismatch(format!(
                        "operator {} has dim {}, expected {}",
                        i + 1,
                        op.space.dim,
                        first.space.dim
                    )));
                }
                acc = &acc * &op.entries;
            }
            Ok((0..first.space.dim).map(|k| acc[(k, k)]).sum())
        }
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0f64; n];
    for k in 1..n {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    lf
}

/// Exact truncated-space projection of D(α)·base^{a†a}·D(−α).
///
/// Matrix elements come from the closed form
///   ⟨m|D(α) t^{n̂} D(−α)|n⟩ = √(m!n!) e^{−(1−t)|α|²}
///       Σ_j t^j w^{m−j} w̄^{n−j} / (j! (m−j)! (n−j)!),   w = (1−t)α,
/// which, unlike the truncated matrix-exponential product, equals the
/// infinite-dimensional matrix element for every (m,n) below the truncation.
///
/// For |base| > 1 the alternating sum cancels catastrophically in f64
/// (term magnitudes can exceed the result by >10^15), so that branch
/// accumulates in double-double precision.
pub fn displaced_number_power(space: FockSpace, alpha: Complex64, base: f64) -> Result<Operator> {
    if base == 0.0 {
        return Err(PhasemapError::Domain("displaced_number_power base must be nonzero".into()));
    }
    let n = space.dim;
    if n > 128 {
        return Err(PhasemapError::Resource(format!(
            "displaced_number_power supports dim <= 128, got {n}"
        )));
    }
    if alpha == C_ZERO {
        return number_power(space, base);
    }
    let lf = ln_factorials(n);
    let z = alpha.norm_sqr();
    let w = alpha * (1.0 - base);
    let wc = w.conj();
    let pref_ln = -(1.0 - base) * z;
    let mut m = CMat::zeros(n, n);
    if base.abs() <= 1.0 {
        // u_k = w^k/k!, v_k = w̄^k/k!, g_j = base^j/j!
        let mut u = vec![C_ZERO; n];
        let mut v = vec![C_ZERO; n];
        u[0] = C_ONE;
        v[0] = C_ONE;
        for k in 1..n {
            u[k] = u[k - 1] * w / (k as f64);
            v[k] = v[k - 1] * wc / (k as f64);
        }
        for mi in 0..n {
            for ni in 0..n {
                let mut s = C_ZERO;
                let mut g = C_ONE;
                for j in 0..=mi.min(ni) {
                    s += g * u[mi - j] * v[ni - j];
                    g *= Complex64::new(base / (j as f64 + 1.0), 0.0);
                }
                let scale = (pref_ln + 0.5 * (lf[mi] + lf[ni])).exp();
                m[(mi, ni)] = s * scale;
            }
        }
    } else {
        let mut u = vec![DdComplex::ZERO; n];
        let mut v = vec![DdComplex::ZERO; n];
        u[0] = DdComplex::ONE;
        v[0] = DdComplex::ONE;
        let wd = DdComplex::new(w.re, w.im);
        let wcd = DdComplex::new(wc.re, wc.im);
        for k in 1..n {
            u[k] = u[k - 1].mul(wd).div_f64(k as f64);
            v[k] = v[k - 1].mul(wcd).div_f64(k as f64);
        }
        for mi in 0..n {
            for ni in 0..n {
                let mut s = DdComplex::ZERO;
                let mut g = DdComplex::ONE;
                for j in 0..=mi.min(ni) {
                    s = s.add(g.mul(u[mi - j]).mul(v[ni - j]));
                    g = g.mul_f64(base).div_f64(j as f64 + 1.0);
                }
                let scale = (pref_ln + 0.5 * (lf[mi] + lf[ni])).exp();
                m[(mi, ni)] = s.to_c64() * scale;
            }
        }
    }
    Ok(Operator { space, entries: m })
}
