//! Finite-dimensional associativity machinery: rank-3 structure tensors
//! defining bilinear products on vector spaces, the quadratic associativity
//! condition on their entries, the Jacobi check for Lie structure constants,
//! and the discretized integral-equation check for star-product kernels.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PhasemapError, Result};
use crate::grid::LabelGrid;

/// A rank-3 tensor M^{ns}_k defining the bilinear product
/// C_k = Σ_{n,s} A_n · M^{ns}_k · B_s on an n-dimensional vector space.
///
/// Storage convention (fixed once, guarded by the random-triple oracle in the
/// tests): `entries[k][n][s]` holds M^{ns}_k — the output index is the
/// outermost one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureTensor {
    pub n: usize,
    pub entries: Vec<Vec<Vec<f64>>>,
}

impl StructureTensor {
    pub fn new(n: usize, entries: Vec<Vec<Vec<f64>>>) -> Result<StructureTensor> {
        if n == 0 {
            return Err(PhasemapError::Domain("tensor dimension must be positive".into()));
        }
        let shape_ok = entries.len() == n
            && entries
                .iter()
                .all(|m| m.len() == n && m.iter().all(|row| row.len() == n));
        if !shape_ok {
            return Err(PhasemapError::DimensionMismatch(format!(
                "structure tensor entries must form an {n}x{n}x{n} array"
            )));
        }
        Ok(StructureTensor { n, entries })
    }

    pub fn zeros(n: usize) -> Result<StructureTensor> {
        StructureTensor::new(n, vec![vec![vec![0.0; n]; n]; n])
    }

    /// M^{ns}_k
    #[inline]
    pub fn get(&self, upper_n: usize, upper_s: usize, lower_k: usize) -> f64 {
        self.entries[lower_k][upper_n][upper_s]
    }

    /// Structure constants of the derived bracket [A, B] = A⊙B − B⊙A:
    /// C^{(k)}_{ns} = M^{ns}_k − M^{sn}_k.
    pub fn commutator_constants(&self) -> StructureTensor {
        let n = self.n;
        let mut out = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    out[k][a][b] = self.entries[k][a][b] - self.entries[k][b][a];
                }
            }
        }
        StructureTensor { n, entries: out }
    }

    /// Whether M^{ns}_k = M^{sn}_k for all k (such tensors give commutative
    /// products).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n;
        (0..n).all(|k| {
            (0..n).all(|a| (0..n).all(|b| (self.entries[k][a][b] - self.entries[k][b][a]).abs() <= tol))
        })
    }
}

/// C_k = Σ_{n,s} A_n M^{ns}_k B_s.
pub fn tensor_product(
    a: &[Complex64],
    b: &[Complex64],
    m: &StructureTensor,
) -> Result<Vec<Complex64>> {
    if a.len() != m.n || b.len() != m.n {
        return Err(PhasemapError::DimensionMismatch(format!(
            "vectors of length {} and {} against a tensor of dimension {}",
            a.len(),
            b.len(),
            m.n
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); m.n];
    for k in 0..m.n {
        let mk = &m.entries[k];
        let mut acc = Complex64::new(0.0, 0.0);
        for (an, row) in a.iter().zip(mk) {
            let inner: Complex64 = b
                .iter()
                .zip(row)
                .map(|(bs, w)| bs * Complex64::new(*w, 0.0))
                .sum();
            acc += an * inner;
        }
        out[k] = acc;
    }
    Ok(out)
}

/// Result of a quadratic structure-tensor check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TensorCheck {
    pub pass: bool,
    pub max_residual: f64,
}

/// The quadratic associativity condition on the tensor entries:
/// Σ_m M^{nm}_l M^{sk}_m = Σ_m M^{ns}_m M^{mk}_l for all (n, s, k, l);
/// passes iff the largest absolute residual is below 1e−12.
pub fn assoc_check(m: &StructureTensor) -> TensorCheck {
    let n = m.n;
    let mut max_residual = 0.0f64;
    for l in 0..n {
        for un in 0..n {
            for us in 0..n {
                for uk in 0..n {
                    let mut lhs = 0.0;
                    let mut rhs = 0.0;
                    for mm in 0..n {
                        lhs += m.get(un, mm, l) * m.get(us, uk, mm);
                        rhs += m.get(un, us, mm) * m.get(mm, uk, l);
                    }
                    max_residual = max_residual.max((lhs - rhs).abs());
                }
            }
        }
    }
    TensorCheck { pass: max_residual < 1e-12, max_residual }
}

/// Result of the Jacobi check for Lie structure constants.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LieCheck {
    pub pass: bool,
    pub max_residual: f64,
    /// Antisymmetry C^{(m)}_{sk} = −C^{(m)}_{ks} is a precondition for the
    /// Lie interpretation; a violation is reported here rather than treated
    /// as fatal.
    pub antisymmetric: bool,
}

/// Jacobi identity for structure constants C^{(m)}_{sk} (stored as
/// `entries[m][s][k]`):
/// Σ_m [ C^{(m)}_{sk} C^{(l)}_{nm} + C^{(m)}_{kn} C^{(l)}_{sm} +
///       C^{(m)}_{ns} C^{(l)}_{km} ] = 0 for all (s, k, n, l).
pub fn lie_jacobi_check(c: &StructureTensor) -> LieCheck {
    let n = c.n;
    let antisymmetric = c
        .entries
        .iter()
        .all(|m| {
            (0..n).all(|s| (0..n).all(|k| (m[s][k] + m[k][s]).abs() <= 1e-12))
        });
    let mut max_residual = 0.0f64;
    for s in 0..n {
        for k in 0..n {
            for un in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        acc += c.entries[m][s][k] * c.entries[l][un][m]
                            + c.entries[m][k][un] * c.entries[l][s][m]
                            + c.entries[m][un][s] * c.entries[l][k][m];
                    }
                    max_residual = max_residual.max(acc.abs());
                }
            }
        }
    }
    LieCheck { pass: max_residual < 1e-12, max_residual, antisymmetric }
}

// --- built-in tensor families -------------------------------------------

/// The standard matrix-multiplication tensor for d×d matrices, acting on
/// their row-major vectorizations (dimension d²).
pub fn standard_matrix_tensor(d: usize) -> Result<StructureTensor> {
    akb_tensor(&identity_matrix(d))
}

/// The tensor of the deformed product a⊙b = a·k·b (standard triple matrix
/// product) for d×d matrices, given the middle factor k as a d×d row-major
/// matrix: M^{(ip)(qj)}_{(ij)} = k_{pq}.
pub fn akb_tensor(k: &[Vec<f64>]) -> Result<StructureTensor> {
    let d = k.len();
    if d == 0 || k.iter().any(|row| row.len() != d) {
        return Err(PhasemapError::DimensionMismatch(
            "middle factor must be a square matrix".into(),
        ));
    }
    let n = d * d;
    let mut m = StructureTensor::zeros(n)?;
    for i in 0..d {
        for j in 0..d {
            for p in 0..d {
                for q in 0..d {
                    m.entries[i * d + j][i * d + p][q * d + j] = k[p][q];
                }
            }
        }
    }
    Ok(m)
}

fn identity_matrix(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// The four printed 4×4 matrices M₁..M₄ defining the nonstandard associative
/// product a⊙b = [[a₁₁b₁₁, a₁₂b₁₂], [a₂₁b₂₁, a₁₁b₂₂ + a₂₂b₂₁]] on
/// vectorized 2×2 matrices.
pub fn nonstandard_family_tensor() -> StructureTensor {
    let mut m = StructureTensor::zeros(4).expect("positive dimension");
    // (M_k)_{ns} = M^{ns}_k, 1-based in the source, 0-based here
    m.entries[0][0][0] = 1.0; // M1 = e11
    m.entries[1][1][1] = 1.0; // M2 = e22
    m.entries[2][2][2] = 1.0; // M3 = e33
    m.entries[3][0][3] = 1.0; // M4 = e14 + e43
    m.entries[3][3][2] = 1.0;
    m
}

/// su(2) structure constants ε_{skm} as a Lie structure tensor
/// (C^{(m)}_{sk} = ε_{skm}).
pub fn su2_constants() -> StructureTensor {
    let mut c = StructureTensor::zeros(3).expect("positive dimension");
    let eps = [(0usize, 1usize, 2usize, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)];
    for (s, k, m, v) in eps {
        c.entries[m][s][k] = v;
        c.entries[m][k][s] = -v;
    }
    c
}

// --- kernel associativity ------------------------------------------------

/// A star-product kernel K(x, y, z) sampled on a common label grid: the
/// value at (x, y, z) = (points[i], points[j], points[k]) is stored at
/// `values[(i·N + j)·N + k]` where N = grid.len().
#[derive(Debug, Clone)]
pub struct KernelSample {
    pub grid: LabelGrid,
    pub values: Vec<Complex64>,
}

impl KernelSample {
    pub fn new(grid: LabelGrid, values: Vec<Complex64>) -> Result<KernelSample> {
        let n = grid.len();
        if values.len() != n * n * n {
            return Err(PhasemapError::DimensionMismatch(format!(
                "kernel sample holds {} values for a grid of {} points (need N³ = {})",
                values.len(),
                n,
                n * n * n
            )));
        }
        Ok(KernelSample { grid, values })
    }

    /// Sample a kernel function over every (x, y, z) triple of the grid.
    pub fn from_fn(
        grid: LabelGrid,
        kernel: impl Fn(&[f64], &[f64], &[f64]) -> Complex64,
    ) -> KernelSample {
        let n = grid.len();
        let mut values = Vec::with_capacity(n * n * n);
        for x in &grid.points {
            for y in &grid.points {
                for z in &grid.points {
                    values.push(kernel(x, y, z));
                }
            }
        }
        KernelSample { grid, values }
    }

    #[inline]
    fn at(&self, i: usize, j: usize, k: usize) -> Complex64 {
        let n = self.grid.len();
        self.values[(i * n + j) * n + k]
    }
}

/// Result of a discretized kernel-associativity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelCheck {
    pub pass: bool,
    pub max_residual: f64,
    /// Root-mean-square residual over the scanned tuples; the stabler
    /// statistic for convergence-trend comparisons.
    pub rms_residual: f64,
    pub tuples_checked: usize,
    /// Seed of the tuple subsample when the exhaustive N⁴ scan exceeded the
    /// budget; `None` for an exhaustive scan.
    pub subsample_seed: Option<u64>,
}

/// Budget on the number of (x, y, l, t) tuples scanned exhaustively.
pub const KERNEL_TUPLE_BUDGET: usize = 2_000_000;

/// Discretized associativity condition for a sampled kernel:
/// Σ_z w_z K(x,y,z)·K(z,l,t) = Σ_z w_z K(x,z,t)·K(z,y,l) over grid tuples
/// (x, y, l, t). When N⁴ exceeds the budget the tuple set is subsampled
/// (2·budget¹ᐟ² tuples) with the given seed recorded in the result.
pub fn kernel_assoc_check(k: &KernelSample, tol: f64, seed: u64) -> KernelCheck {
    let n = k.grid.len();
    let exhaustive = n.pow(4) <= KERNEL_TUPLE_BUDGET;
    let tuples: Vec<[usize; 4]> = if exhaustive {
        let mut v = Vec::with_capacity(n.pow(4));
        for x in 0..n {
            for y in 0..n {
                for l in 0..n {
                    for t in 0..n {
                        v.push([x, y, l, t]);
                    }
                }
            }
        }
        v
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = 2 * (KERNEL_TUPLE_BUDGET as f64).sqrt() as usize;
        (0..count)
            .map(|_| {
                [
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ]
            })
            .collect()
    };
    let mut max_residual = 0.0f64;
    let mut sq_sum = 0.0f64;
    for [x, y, l, t] in &tuples {
        let mut lhs = Complex64::new(0.0, 0.0);
        let mut rhs = Complex64::new(0.0, 0.0);
        for z in 0..n {
            let w = Complex64::new(k.grid.weights[z], 0.0);
            lhs += w * k.at(*x, *y, z) * k.at(z, *l, *t);
            rhs += w * k.at(*x, z, *t) * k.at(z, *y, *l);
        }
        let r = (lhs - rhs).norm();
        max_residual = max_residual.max(r);
        sq_sum += r * r;
    }
    KernelCheck {
        pass: max_residual < tol,
        max_residual,
        rms_residual: (sq_sum / tuples.len() as f64).sqrt(),
        tuples_checked: tuples.len(),
        subsample_seed: if exhaustive { None } else { Some(seed) },
    }
}

/// On-the-fly variant for dense continuum kernels: the outer tuple points
/// (x, y, l, t) are drawn uniformly from the grid's bounding box with the
/// given seed (so the same seed compares identical physical tuples across
/// grid resolutions), while the z-integral runs over the grid with an extra
/// damping window applied to each z node.
pub fn kernel_assoc_check_windowed(
    grid: &LabelGrid,
    kernel: impl Fn(&[f64], &[f64], &[f64]) -> Complex64,
    window: impl Fn(&[f64]) -> f64,
    tuples: usize,
    seed: u64,
    tol: f64,
) -> KernelCheck {
    let dim = grid.label_dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in &grid.points {
        for (d, v) in p.iter().enumerate() {
            lo[d] = lo[d].min(*v);
            hi[d] = hi[d].max(*v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..dim).map(|d| rng.gen_range(lo[d]..hi[d])).collect()
    };
    let mut max_residual = 0.0f64;
    let mut sq_sum = 0.0f64;
    for _ in 0..tuples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let l = draw(&mut rng);
        let t = draw(&mut rng);
        let mut lhs = Complex64::new(0.0, 0.0);
        let mut rhs = Complex64::new(0.0, 0.0);
        for (z, w) in grid.points.iter().zip(&grid.weights) {
            let wz = Complex64::new(*w * window(z), 0.0);
            lhs += wz * kernel(&x, &y, z) * kernel(z, &l, &t);
            rhs += wz * kernel(&x, z, &t) * kernel(z, &y, &l);
        }
        let r = (lhs - rhs).norm();
        max_residual = max_residual.max(r);
        sq_sum += r * r;
    }
    KernelCheck {
        pass: max_residual < tol,
        max_residual,
        rms_residual: (sq_sum / tuples.max(1) as f64).sqrt(),
        tuples_checked: tuples,
        subsample_seed: Some(seed),
    }
}
