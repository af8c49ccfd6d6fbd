//! Operator–symbol correspondences on truncated Fock spaces.
//!
//! The crate centers on the [`pair::QuantizerPair`] abstraction: an indexed
//! family of quantizers Û(x) and dequantizers D̂(x) over a label space, which
//! turns operators into symbol fields (`f(x) = Tr[Â·Û(x)]`), reconstructs
//! operators from fields, and composes symbols with star-product kernels.
//! Concrete pairs cover the Weyl/Wigner map, the one-parameter s-ordered
//! family, symplectic tomography and plain matrix mechanics; companion
//! modules supply deformed (geometrically weighted) products and
//! finite-dimensional associativity checks.

pub mod assoc;
pub mod dd;
pub mod deform;
pub mod error;
pub mod expm;
pub mod fock;
pub mod grid;
pub mod pair;
pub mod sorder;
pub mod tomo;
pub mod wynn;

pub use error::{PhasemapError, Result};
pub use fock::{
    build_ladder, coherent_vector, displacement, displaced_number_power, make_state, number_power,
    trace_product, FockSpace, Ladder, Operator, StateKind,
};
pub use grid::{Axis, LabelGrid, SymbolField};
pub use pair::{
    ehrenfest_star, heisenberg_evolve, intertwine, matrix_mechanics_pair, pairing_kernel,
    poisson_bracket_fields, poisson_bracket_operators, reconstruct, star_kernel,
    star_kernel_closed, star_via_kernel, star_via_operators, symbol_field, trace_power,
    EvolutionSample, IntertwinedField, QuantizerPair, TraceMode,
};
pub use assoc::{
    akb_tensor, assoc_check, kernel_assoc_check, kernel_assoc_check_windowed, lie_jacobi_check,
    nonstandard_family_tensor, standard_matrix_tensor, su2_constants, tensor_product, KernelCheck,
    KernelSample, LieCheck, StructureTensor, TensorCheck,
};
pub use deform::{k_commutator, k_poisson, k_product, k_star, DeformationContext};
pub use sorder::{
    moyal_kernel, purity_kernel, s_kernel, sordered_pair, weyl_pair, wigner, z_trace, PhasePoint,
    SOrder,
};
pub use tomo::{
    homogeneity_defect, state_symbol, tomo_dequantizer, tomo_kernel, tomo_pair, tomo_quantizer,
    tomo_star_via_kernel, tomogram_of_state, tomogram_value, TomoKernelValue, TomoPoint, Tomogram,
};
