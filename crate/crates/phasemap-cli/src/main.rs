//! Command-line surface over `phasemap-core`: compute symbol fields and
//! tomograms of standard states, run kernel-vs-trace validation sweeps,
//! evolve symbols, verify structure tensors, and export plot-ready CSV/JSON
//! artifacts.
//!
//! Every command writes its data artifact(s) plus a `*.manifest.json` run
//! manifest (versioned schema) recording all parameters, the seed, the
//! library version and the residuals of any numerical checks — enough to
//! reproduce the artifact byte for byte.
//!
//! Exit codes: 0 success, 2 configuration/validation failure, 3 numerical
//! check failure (the offending residual is printed).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use phasemap_core::{
    assoc_check, build_ladder, kernel_assoc_check_windowed, lie_jacobi_check, make_state,
    matrix_mechanics_pair, nonstandard_family_tensor, sordered_pair, standard_matrix_tensor,
    star_kernel, star_kernel_closed, su2_constants, symbol_field, tomo_pair, tomogram_of_state,
    weyl_pair, Axis, FockSpace, LabelGrid, QuantizerPair, SOrder, StateKind, StructureTensor,
};

const SCHEMA_VERSION: u32 = 1;

/// Phase-space maps, star-products and tomography on truncated Fock spaces.
#[derive(Parser)]
#[command(name = "phasemap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the symbol field of a state and export it as CSV.
    Symbol {
        /// Map: weyl | sordered:<s> | tomographic:<delta_width> | matrix
        #[arg(long)]
        map: String,
        /// State: coherent:<re>[,<im>] | thermal:<nbar> | fock:<n>
        #[arg(long)]
        state: String,
        #[arg(long)]
        dim: usize,
        /// Per-axis ranges `lo:hi:n`, comma-separated; a single range is
        /// reused for every label axis. Ignored by the matrix map, which has
        /// an intrinsic index grid.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Tolerance on the trace-normalization residual reported in the
        /// manifest (weyl / s-ordered maps only).
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sample the tomogram of a state over an (X, mu, nu) grid.
    Tomogram {
        #[arg(long)]
        state: String,
        #[arg(long)]
        dim: usize,
        /// Gaussian smoothing width of the spectral delta.
        #[arg(long, default_value_t = 0.25)]
        width: f64,
        /// Ranges `X-lo:hi:n,mu-lo:hi:n,nu-lo:hi:n` (one range is reused
        /// for all three axes).
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare the closed-form star kernel against the trace definition at
    /// random label triples.
    StarCheck {
        /// Map: weyl | sordered:<s> (maps with a closed-form kernel)
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        dim: usize,
        /// Sampling radius for the random labels.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Verify discretized associativity of a closed-form two-symbol kernel
    /// by quadrature over windowed label tuples.
    KernelCheck {
        /// Map: weyl | sordered:<s>
        #[arg(long)]
        map: String,
        /// Half-side of the square label window.
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        /// Grid points per axis.
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Number of sampled outer tuples.
        #[arg(long, default_value_t = 200)]
        tuples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evolve the position quadrature under the harmonic oscillator and
    /// compare against exact conjugation.
    Evolve {
        /// Map: weyl | sordered:<s>
        #[arg(long, default_value = "weyl")]
        map: String,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        t_final: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 500)]
        output_every: usize,
        /// Probe grid `lo:hi:n[,lo:hi:n]`.
        #[arg(long, default_value = "-2:2:5", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute Tr rho^2 by kernel quadrature and compare with the direct
    /// matrix trace.
    Purity {
        /// Map: sordered:<s> (the purity kernel lives on complex labels)
        #[arg(long)]
        map: String,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 24)]
        dim: usize,
        /// Gauss–Hermite nodes per axis.
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check a structure tensor: quadratic associativity, or the Jacobi
    /// identity for Lie-type constants.
    AssocVerify {
        /// builtin:<standard-2x2|family1|su2> or file:<path.json>
        #[arg(long)]
        tensor: String,
        /// assoc (quadratic condition) or jacobi (Lie constants); builtin
        /// su2 defaults to jacobi, everything else to assoc.
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Convert a symbol field between two maps and compare with the
    /// directly computed target symbol.
    Intertwine {
        /// Source map: weyl | sordered:<s>
        #[arg(long)]
        from: String,
        /// Target map: weyl | sordered:<s> | tomographic:<delta_width>
        #[arg(long)]
        to: String,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        /// Target grid ranges `lo:hi:n[,…]`; defaults to the target map's
        /// own grid.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Consolidate run manifests into a pass/fail table with convergence
    /// ratios across dimensions.
    Report {
        /// Manifest paths.
        manifests: Vec<PathBuf>,
        /// Optional consolidated JSON output path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// manifest schema

#[derive(Debug, Serialize, Deserialize)]
struct CheckRecord {
    name: String,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    schema_version: u32,
    command: String,
    library_version: String,
    dim: Option<usize>,
    seed: Option<u64>,
    parameters: BTreeMap<String, String>,
    checks: Vec<CheckRecord>,
    artifacts: Vec<String>,
    pass: bool,
}

impl Manifest {
    fn new(command: &str) -> Manifest {
        Manifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            dim: None,
            seed: None,
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            artifacts: Vec::new(),
            pass: true,
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    fn check(&mut self, name: &str, residual: f64, tolerance: f64) {
        let pass = residual.is_finite() && residual <= tolerance;
        self.pass &= pass;
        self.checks.push(CheckRecord {
            name: name.to_string(),
            residual,
            tolerance,
            pass,
        });
    }
}

// ---------------------------------------------------------------------------
// errors and exit codes

enum CliError {
    /// Invalid configuration → exit 2.
    Validation(String),
    /// A numerical check exceeded its tolerance → exit 3.
    Numerical(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

fn validation(msg: impl ToString) -> CliError {
    CliError::Validation(msg.to_string())
}

// ---------------------------------------------------------------------------
// spec parsing

#[derive(Debug, Clone, Copy)]
enum MapSpec {
    Weyl,
    SOrdered(f64),
    Tomographic(f64),
    Matrix,
}

impl MapSpec {
    fn parse(s: &str) -> Result<MapSpec, CliError> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |what: &str| -> Result<f64, CliError> {
            arg.ok_or_else(|| validation(format!("map `{head}` needs `:<{what}>`")))?
                .parse::<f64>()
                .map_err(|e| validation(format!("map `{s}`: bad {what}: {e}")))
        };
        match head {
            "weyl" => Ok(MapSpec::Weyl),
            "sordered" => Ok(MapSpec::SOrdered(num("s")?)),
            "tomographic" => Ok(MapSpec::Tomographic(num("delta_width")?)),
            "matrix" => Ok(MapSpec::Matrix),
            _ => Err(validation(format!(
                "unknown map `{s}` (expected weyl, sordered:<s>, tomographic:<w>, matrix)"
            ))),
        }
    }

    fn build(&self, dim: usize) -> Result<QuantizerPair, CliError> {
        let space = FockSpace::new(dim).map_err(validation)?;
        match self {
            MapSpec::Weyl => weyl_pair(space).map_err(validation),
            MapSpec::SOrdered(s) => {
                let order = SOrder::new(*s).map_err(validation)?;
                sordered_pair(space, order).map_err(validation)
            }
            MapSpec::Tomographic(w) => tomo_pair(space, *w).map_err(validation),
            MapSpec::Matrix => Ok(matrix_mechanics_pair(space)),
        }
    }
}

fn parse_state(s: &str) -> Result<StateKind, CliError> {
    let (head, arg) = s
        .split_once(':')
        .ok_or_else(|| validation(format!("state `{s}` needs `kind:value`")))?;
    match head {
        "coherent" => {
            let (re, im) = match arg.split_once(',') {
                Some((r, i)) => (r, i),
                None => (arg, "0"),
            };
            let re: f64 = re.parse().map_err(|e| validation(format!("state `{s}`: {e}")))?;
            let im: f64 = im.parse().map_err(|e| validation(format!("state `{s}`: {e}")))?;
            Ok(StateKind::Coherent(Complex64::new(re, im)))
        }
        "thermal" => Ok(StateKind::Thermal(
            arg.parse().map_err(|e| validation(format!("state `{s}`: {e}")))?,
        )),
        "fock" => Ok(StateKind::Fock(
            arg.parse().map_err(|e| validation(format!("state `{s}`: {e}")))?,
        )),
        _ => Err(validation(format!(
            "unknown state `{s}` (expected coherent:<re>[,<im>], thermal:<nbar>, fock:<n>)"
        ))),
    }
}

fn parse_axis(spec: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(validation(format!("axis `{spec}` must be `lo:hi:n`")));
    }
    let lo: f64 = parts[0].parse().map_err(|e| validation(format!("axis `{spec}`: {e}")))?;
    let hi: f64 = parts[1].parse().map_err(|e| validation(format!("axis `{spec}`: {e}")))?;
    let n: usize = parts[2].parse().map_err(|e| validation(format!("axis `{spec}`: {e}")))?;
    LabelGrid::uniform_1d(lo, hi, n).map_err(validation)
}

/// Build a tensor grid from comma-separated axis specs; a single spec is
/// replicated across all `label_dim` axes.
fn parse_grid(spec: &str, label_dim: usize) -> Result<LabelGrid, CliError> {
    let specs: Vec<&str> = spec.split(',').collect();
    let axes: Vec<Axis> = if specs.len() == 1 {
        let ax = parse_axis(specs[0])?;
        vec![ax; label_dim]
    } else if specs.len() == label_dim {
        specs.iter().map(|s| parse_axis(s)).collect::<Result<_, _>>()?
    } else {
        return Err(validation(format!(
            "grid `{spec}` has {} axis specs, map needs 1 or {label_dim}",
            specs.len()
        )));
    };
    LabelGrid::tensor(&axes).map_err(validation)
}

// ---------------------------------------------------------------------------
// artifact plumbing

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| validation(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| validation(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn finish(out: &Path, mut manifest: Manifest) -> Result<(), CliError> {
    let name = format!("{}.manifest.json", manifest.command);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = write_file(out, &name, &json)?;
    manifest.artifacts.push(path.display().to_string());
    for check in &manifest.checks {
        println!(
            "[{}] {}: residual {:.3e} (tol {:.1e}) — {}",
            manifest.command,
            check.name,
            check.residual,
            check.tolerance,
            if check.pass { "pass" } else { "FAIL" }
        );
    }
    if manifest.pass {
        println!("[{}] PASS — manifest {}", manifest.command, path.display());
        Ok(())
    } else {
        let worst = manifest
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:.3e}", c.name, c.residual))
            .collect::<Vec<_>>()
            .join(", ");
        Err(CliError::Numerical(format!(
            "numerical check failed: {worst} (manifest {})",
            path.display()
        )))
    }
}

// ---------------------------------------------------------------------------
// commands

fn cmd_symbol(
    map: &str,
    state: &str,
    dim: usize,
    grid: Option<&str>,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    let spec = MapSpec::parse(map)?;
    let kind = parse_state(state)?;
    let pair = spec.build(dim)?;
    let grid = match (spec, grid) {
        (MapSpec::Matrix, Some(_)) => {
            return Err(validation("the matrix map uses its intrinsic index grid; drop --grid"))
        }
        (MapSpec::Matrix, None) => pair.default_grid.clone(),
        (_, Some(g)) => parse_grid(g, pair.label_dim)?,
        (_, None) => pair.default_grid.clone(),
    };
    let space = FockSpace::new(dim).map_err(validation)?;
    let rho = make_state(space, kind).map_err(validation)?;
    let field = symbol_field(&rho, &pair, &grid).map_err(validation)?;

    let mut manifest = Manifest::new("symbol");
    manifest.dim = Some(dim);
    manifest.param("map", map);
    manifest.param("state", state);
    manifest.param("grid_points", grid.len());
    let csv = write_file(out, "symbol.csv", &field.to_csv())?;
    manifest.artifacts.push(csv.display().to_string());

    // the label-space integral of a density symbol recovers Tr rho = 1 up to
    // the map's flat reconstruction measure
    let measure = match spec {
        MapSpec::Weyl => Some(std::f64::consts::TAU),
        MapSpec::SOrdered(_) => Some(std::f64::consts::PI),
        _ => None,
    };
    if let Some(m) = measure {
        let integral = field.integral() / m;
        manifest.param("integral_re", format!("{:.12e}", integral.re));
        manifest.check("normalization", (integral - Complex64::new(1.0, 0.0)).norm(), tol);
    }
    finish(out, manifest)
}

fn cmd_tomogram(
    state: &str,
    dim: usize,
    width: f64,
    grid: &str,
    out: &Path,
) -> Result<(), CliError> {
    let kind = parse_state(state)?;
    let space = FockSpace::new(dim).map_err(validation)?;
    let rho = make_state(space, kind).map_err(validation)?;
    let grid = parse_grid(grid, 3)?;
    if grid.points.iter().any(|p| p[1] == 0.0 && p[2] == 0.0) {
        return Err(validation(
            "grid contains the degenerate frame (mu, nu) = (0, 0); \
             use an even node count or an offset range on the mu/nu axes",
        ));
    }
    let tomogram = tomogram_of_state(&rho, &grid, width).map_err(validation)?;

    let mut manifest = Manifest::new("tomogram");
    manifest.dim = Some(dim);
    manifest.param("state", state);
    manifest.param("width", width);
    manifest.param("grid_points", grid.len());
    let csv = write_file(out, "tomogram.csv", &tomogram.to_csv())?;
    manifest.artifacts.push(csv.display().to_string());
    finish(out, manifest)
}

fn cmd_star_check(
    map: &str,
    samples: usize,
    seed: u64,
    dim: usize,
    radius: f64,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    let spec = MapSpec::parse(map)?;
    match spec {
        MapSpec::Weyl | MapSpec::SOrdered(_) => {}
        _ => return Err(validation("star-check needs a map with a closed-form kernel")),
    }
    let pair = spec.build(dim)?;
    if samples == 0 {
        return Err(validation("--samples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = String::from("y1,y2,z1,z2,x1,x2,residual\n");
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let mut draw = || [rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)];
        let (y, z, x) = (draw(), draw(), draw());
        let traced = star_kernel(&pair, &[&y, &z], &x).map_err(validation)?;
        let closed = star_kernel_closed(&pair, &[&y, &z], &x).map_err(validation)?;
        let residual = (traced - closed).norm() / closed.norm().max(1.0);
        max_residual = max_residual.max(residual);
        rows.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}\n",
            y[0], y[1], z[0], z[1], x[0], x[1], residual
        ));
    }
    let mut manifest = Manifest::new("star-check");
    manifest.dim = Some(dim);
    manifest.seed = Some(seed);
    manifest.param("map", map);
    manifest.param("samples", samples);
    manifest.param("radius", radius);
    let csv = write_file(out, "star-check.csv", &rows)?;
    manifest.artifacts.push(csv.display().to_string());
    manifest.check("kernel_vs_trace", max_residual, tol);
    finish(out, manifest)
}

fn cmd_kernel_check(
    map: &str,
    radius: f64,
    n: usize,
    tuples: usize,
    seed: u64,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    let spec = MapSpec::parse(map)?;
    match spec {
        MapSpec::Weyl | MapSpec::SOrdered(_) => {}
        _ => return Err(validation("kernel-check needs a map with a closed-form kernel")),
    }
    // the pair is only needed for its closed kernel; a small space suffices
    let pair = spec.build(8)?;
    let grid = LabelGrid::square(radius, n).map_err(validation)?;
    let kernel = |x: &[f64], y: &[f64], z: &[f64]| -> Complex64 {
        star_kernel_closed(&pair, &[&x.to_vec(), &y.to_vec()], z)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let window = |p: &[f64]| (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp();
    let check = kernel_assoc_check_windowed(&grid, &kernel, &window, tuples, seed, tol);

    let mut manifest = Manifest::new("kernel-check");
    manifest.seed = Some(seed);
    manifest.param("map", map);
    manifest.param("radius", radius);
    manifest.param("n_per_axis", n);
    manifest.param("tuples", check.tuples_checked);
    manifest.param("rms_residual", format!("{:.12e}", check.rms_residual));
    manifest.check("kernel_associativity_rms", check.rms_residual, tol);
    finish(out, manifest)
}

fn cmd_evolve(
    map: &str,
    dim: usize,
    t_final: f64,
    dt: f64,
    output_every: usize,
    grid: &str,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    let spec = MapSpec::parse(map)?;
    match spec {
        MapSpec::Weyl | MapSpec::SOrdered(_) => {}
        _ => return Err(validation("evolve works on phase-space maps (weyl, sordered)")),
    }
    let pair = spec.build(dim)?;
    let grid = parse_grid(grid, pair.label_dim)?;
    let space = FockSpace::new(dim).map_err(validation)?;
    let l = build_ladder(space);
    let h = l.a_dagger.mul(&l.a).map_err(validation)?;
    let samples = phasemap_core::heisenberg_evolve(&h, &l.q, &pair, &grid, t_final, dt, output_every)
        .map_err(validation)?;

    let mut rows = String::from("t,sup_error\n");
    let mut max_err = 0.0f64;
    for s in &samples {
        let err = s.field.sup_distance(&s.exact_field).map_err(validation)?;
        max_err = max_err.max(err);
        rows.push_str(&format!("{:.11e},{:.11e}\n", s.t, err));
    }
    let mut manifest = Manifest::new("evolve");
    manifest.dim = Some(dim);
    manifest.param("map", map);
    manifest.param("t_final", t_final);
    manifest.param("dt", dt);
    manifest.param("output_every", output_every);
    manifest.param("samples", samples.len());
    let csv = write_file(out, "evolve.csv", &rows)?;
    manifest.artifacts.push(csv.display().to_string());
    manifest.check("evolution_vs_exact", max_err, tol);
    finish(out, manifest)
}

fn cmd_purity(
    map: &str,
    state: &str,
    dim: usize,
    nodes: usize,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    let spec = MapSpec::parse(map)?;
    let order = match spec {
        MapSpec::SOrdered(s) => SOrder::new(s).map_err(validation)?,
        _ => return Err(validation("purity needs --map sordered:<s>")),
    };
    let kind = parse_state(state)?;
    let pair = spec.build(dim)?;
    let space = FockSpace::new(dim).map_err(validation)?;
    let rho = make_state(space, kind).map_err(validation)?;
    let rate = 4.0 / (1.0 - order.s() * order.s());
    let grid = LabelGrid::gauss_square(rate, nodes).map_err(validation)?;
    let field = symbol_field(&rho, &pair, &grid).map_err(validation)?;
    let wf: Vec<Complex64> = field
        .values
        .iter()
        .zip(&grid.weights)
        .map(|(v, w)| v * *w)
        .collect();
    let alphas: Vec<Complex64> = grid.points.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let k = phasemap_core::purity_kernel(order, &[alphas[i], alphas[j]])
                .map_err(validation)?;
            total += wf[i] * wf[j] * k;
        }
    }
    let direct = rho.mul(&rho).map_err(validation)?.trace();
    let residual = (total - direct).norm() / direct.norm().max(1e-12);

    let mut manifest = Manifest::new("purity");
    manifest.dim = Some(dim);
    manifest.param("map", map);
    manifest.param("state", state);
    manifest.param("nodes", nodes);
    manifest.param("purity_kernel_re", format!("{:.12e}", total.re));
    manifest.param("purity_direct_re", format!("{:.12e}", direct.re));
    manifest.check("purity_kernel_vs_trace", residual, tol);
    finish(out, manifest)
}

fn builtin_tensor(name: &str) -> Result<StructureTensor, CliError> {
    match name {
        "standard-2x2" => standard_matrix_tensor(2).map_err(validation),
        "family1" => Ok(nonstandard_family_tensor()),
        "su2" => Ok(su2_constants()),
        _ => Err(validation(format!(
            "unknown builtin tensor `{name}` (expected standard-2x2, family1, su2)"
        ))),
    }
}

fn cmd_assoc_verify(tensor: &str, check: Option<&str>, out: &Path) -> Result<(), CliError> {
    let (source, name) = tensor
        .split_once(':')
        .ok_or_else(|| validation("--tensor must be builtin:<name> or file:<path>"))?;
    let t = match source {
        "builtin" => builtin_tensor(name)?,
        "file" => {
            let text = std::fs::read_to_string(name)
                .map_err(|e| validation(format!("cannot read {name}: {e}")))?;
            let raw: StructureTensor = serde_json::from_str(&text)
                .map_err(|e| validation(format!("cannot parse {name}: {e}")))?;
            // re-validate shape invariants after deserialization
            StructureTensor::new(raw.n, raw.entries).map_err(validation)?
        }
        _ => return Err(validation("--tensor must be builtin:<name> or file:<path>")),
    };
    let kind = match check {
        Some(k) => k.to_string(),
        None if tensor == "builtin:su2" => "jacobi".to_string(),
        None => "assoc".to_string(),
    };
    let mut manifest = Manifest::new("assoc-verify");
    manifest.param("tensor", tensor);
    manifest.param("check", &kind);
    manifest.param("n", t.n);
    match kind.as_str() {
        "assoc" => {
            let r = assoc_check(&t);
            manifest.check("associativity", r.max_residual, 1e-12);
        }
        "jacobi" => {
            let r = lie_jacobi_check(&t);
            manifest.param("antisymmetric", r.antisymmetric);
            manifest.check("jacobi", r.max_residual, 1e-12);
        }
        other => return Err(validation(format!("unknown check `{other}` (assoc or jacobi)"))),
    }
    finish(out, manifest)
}

fn cmd_intertwine(
    from: &str,
    to: &str,
    state: &str,
    dim: usize,
    grid: Option<&str>,
    tol: f64,
    out: &Path,
) -> Result<(), CliError> {
    let from_spec = MapSpec::parse(from)?;
    match from_spec {
        MapSpec::Weyl | MapSpec::SOrdered(_) => {}
        _ => return Err(validation("--from must be weyl or sordered:<s>")),
    }
    let to_spec = MapSpec::parse(to)?;
    if matches!(to_spec, MapSpec::Matrix) {
        return Err(validation("--to must be weyl, sordered:<s> or tomographic:<w>"));
    }
    let source = from_spec.build(dim)?;
    let target = to_spec.build(dim)?;
    let target_grid = match grid {
        Some(g) => parse_grid(g, target.label_dim)?,
        None => target.default_grid.clone(),
    };
    let kind = parse_state(state)?;
    let space = FockSpace::new(dim).map_err(validation)?;
    let rho = make_state(space, kind).map_err(validation)?;
    let f_src = symbol_field(&rho, &source, &source.default_grid).map_err(validation)?;
    let result = phasemap_core::intertwine(&f_src, &source, &target, &target_grid)
        .map_err(validation)?;
    let direct = symbol_field(&rho, &target, &target_grid).map_err(validation)?;
    let residual = result.field.sup_distance(&direct).map_err(validation)?;

    let mut manifest = Manifest::new("intertwine");
    manifest.dim = Some(dim);
    manifest.param("from", from);
    manifest.param("to", to);
    manifest.param("state", state);
    manifest.param("reconstruction_residual", format!("{:.12e}", result.reconstruction_residual));
    let csv = write_file(out, "intertwine.csv", &result.field.to_csv())?;
    manifest.artifacts.push(csv.display().to_string());
    manifest.check("intertwine_vs_direct", residual, tol);
    finish(out, manifest)
}

// ---------------------------------------------------------------------------
// report

fn cmd_report(paths: &[PathBuf], json_out: Option<&Path>) -> Result<(), CliError> {
    if paths.is_empty() {
        return Err(validation("report needs at least one manifest path"));
    }
    let mut manifests = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p)
            .map_err(|e| validation(format!("cannot read {}: {e}", p.display())))?;
        let m: Manifest = serde_json::from_str(&text)
            .map_err(|e| validation(format!("cannot parse {}: {e}", p.display())))?;
        manifests.push(m);
    }

    println!(
        "{:<14} {:>5}  {:<28} {:>12} {:>9}  {}",
        "command", "dim", "check", "residual", "tol", "status"
    );
    let mut all_pass = true;
    for m in &manifests {
        all_pass &= m.pass;
        let dim = m.dim.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        if m.checks.is_empty() {
            println!("{:<14} {:>5}  {:<28} {:>12} {:>9}  {}", m.command, dim, "-", "-", "-", "ok");
        }
        for c in &m.checks {
            println!(
                "{:<14} {:>5}  {:<28} {:>12.3e} {:>9.1e}  {}",
                m.command,
                dim,
                c.name,
                c.residual,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
    }

    // convergence ratios: same command + check at several dimensions
    let mut groups: BTreeMap<(String, String), Vec<(usize, f64)>> = BTreeMap::new();
    for m in &manifests {
        if let Some(dim) = m.dim {
            for c in &m.checks {
                groups
                    .entry((m.command.clone(), c.name.clone()))
                    .or_default()
                    .push((dim, c.residual));
            }
        }
    }
    let mut ratios = Vec::new();
    for ((command, check), mut runs) in groups {
        runs.sort_by_key(|(dim, _)| *dim);
        runs.dedup_by_key(|(dim, _)| *dim);
        for pair in runs.windows(2) {
            let [(d1, r1), (d2, r2)] = pair else { unreachable!() };
            let ratio = r1 / r2.max(1e-300);
            println!(
                "convergence {command}/{check}: dim {d1} → {d2} ratio {ratio:.2}"
            );
            ratios.push(serde_json::json!({
                "command": command, "check": check,
                "dim_from": d1, "dim_to": d2, "ratio": ratio,
            }));
        }
    }

    println!("{}", if all_pass { "PASS" } else { "FAIL" });
    if let Some(path) = json_out {
        let doc = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "manifests": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "pass": all_pass,
            "convergence": ratios,
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc).expect("serializes"))
            .map_err(|e| validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Symbol { map, state, dim, grid, tol, out } => {
            cmd_symbol(map, state, *dim, grid.as_deref(), *tol, out)
        }
        Command::Tomogram { state, dim, width, grid, out } => {
            cmd_tomogram(state, *dim, *width, grid, out)
        }
        Command::StarCheck { map, samples, seed, dim, radius, tol, out } => {
            cmd_star_check(map, *samples, *seed, *dim, *radius, *tol, out)
        }
        Command::KernelCheck { map, radius, n, tuples, seed, tol, out } => {
            cmd_kernel_check(map, *radius, *n, *tuples, *seed, *tol, out)
        }
        Command::Evolve { map, dim, t_final, dt, output_every, grid, tol, out } => {
            cmd_evolve(map, *dim, *t_final, *dt, *output_every, grid, *tol, out)
        }
        Command::Purity { map, state, dim, nodes, tol, out } => {
            cmd_purity(map, state, *dim, *nodes, *tol, out)
        }
        Command::AssocVerify { tensor, check, out } => {
            cmd_assoc_verify(tensor, check.as_deref(), out)
        }
        Command::Intertwine { from, to, state, dim, grid, tol, out } => {
            cmd_intertwine(from, to, state, *dim, grid.as_deref(), *tol, out)
        }
        Command::Report { manifests, json } => cmd_report(manifests, json.as_deref()),
    }
}

fn main() {
    if let Ok(threads) = std::env::var("STARPROD_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            _ => {
                eprintln!("error: STARPROD_THREADS must be a positive integer, got `{threads}`");
                std::process::exit(2);
            }
        }
    }
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}
