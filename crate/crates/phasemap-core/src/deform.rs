//! Deformed associative products: the k-product A·e^{λk̂}·B, its commutator,
//! the deformed star product on symbols and the deformed bracket. The
//! central insertion e^{λk̂} keeps the product associative for any generator
//! k̂ and strength λ.

use num_complex::Complex64;

use crate::error::{PhasemapError, Result};
use crate::expm::expm;
use crate::grid::{LabelGrid, SymbolField};
use crate::fock::Operator;
use crate::pair::{symbol_field, QuantizerPair};

/// Deformation generator k̂ and strength λ with the cached insertion
/// operator e^{λk̂}.
#[derive(Clone)]
pub struct DeformationContext {
    pub k_op: Operator,
    pub lambda: f64,
    pub e_lambda_k: Operator,
}

impl DeformationContext {
    pub fn new(k_op: Operator, lambda: f64) -> Result<DeformationContext> {
        if !lambda.is_finite() {
            return Err(PhasemapError::Domain("deformation strength must be finite".into()));
        }
        let scaled = &k_op.entries * Complex64::new(lambda, 0.0);
        let e_lambda_k = Operator::new(k_op.space, expm(&scaled))?;
        Ok(DeformationContext { k_op, lambda, e_lambda_k })
    }
}

/// A ⊙ B = A·e^{λk̂}·B. Associative because the insertion is a fixed factor.
pub fn k_product(a: &Operator, b: &Operator, ctx: &DeformationContext) -> Result<Operator> {
    a.mul(&ctx.e_lambda_k)?.mul(b)
}

/// The deformed commutator A·e^{λk̂}·B − B·e^{λk̂}·A.
pub fn k_commutator(a: &Operator, b: &Operator, ctx: &DeformationContext) -> Result<Operator> {
    k_product(a, b, ctx)?.sub(&k_product(b, a, ctx)?)
}

/// Deformed star product of two operators' symbols:
/// values are Tr[A·e^{λk̂}·B·Û(x)] on the grid.
pub fn k_star(
    a: &Operator,
    b: &Operator,
    pair: &QuantizerPair,
    ctx: &DeformationContext,
    grid: &LabelGrid,
) -> Result<SymbolField> {
    symbol_field(&k_product(a, b, ctx)?, pair, grid)
}

/// Deformed bracket on symbols: the symbol of the deformed commutator.
pub fn k_poisson(
    a: &Operator,
    b: &Operator,
    pair: &QuantizerPair,
    ctx: &DeformationContext,
    grid: &LabelGrid,
) -> Result<SymbolField> {
    symbol_field(&k_commutator(a, b, ctx)?, pair, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_ladder, FockSpace};
    use crate::grid::LabelGrid;
    use crate::pair::star_via_operators;
    use crate::sorder::{sordered_pair, SOrder};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_op(space: FockSpace, rng: &mut ChaCha8Rng) -> Operator {
        let n = space.dim;
        let m = DMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        Operator::new(space, m).unwrap()
    }

    fn number_ctx(space: FockSpace, lambda: f64) -> DeformationContext {
        let l = build_ladder(space);
        let k = l.a_dagger.mul(&l.a).unwrap();
        DeformationContext::new(k, lambda).unwrap()
    }

    #[test]
    fn cache_matches_exponential_and_zero_strength_is_identity() {
        let space = FockSpace::new(8).unwrap();
        let ctx0 = number_ctx(space, 0.0);
        let id = Operator::identity(space);
        assert!(ctx0.e_lambda_k.sub(&id).unwrap().frobenius_norm() < 1e-12);
        let ctx = number_ctx(space, 0.3);
        // diagonal generator: e^{λ n̂} is diag(e^{0.3 n})
        for k in 0..8 {
            let expect = (0.3 * k as f64).exp();
            assert!((ctx.e_lambda_k.entries[(k, k)] - c(expect, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_strength_reduces_to_the_plain_product() {
        let space = FockSpace::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b) = (random_op(space, &mut rng), random_op(space, &mut rng));
        let ctx = number_ctx(space, 0.0);
        let kp = k_product(&a, &b, &ctx).unwrap();
        let plain = a.mul(&b).unwrap();
        assert!(kp.sub(&plain).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn identity_generator_scales_the_product() {
        let space = FockSpace::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = (random_op(space, &mut rng), random_op(space, &mut rng));
        let lambda = 0.7;
        let ctx = DeformationContext::new(Operator::identity(space), lambda).unwrap();
        let kp = k_product(&a, &b, &ctx).unwrap();
        let scaled = a.mul(&b).unwrap().scale(c(lambda.exp(), 0.0));
        assert!(kp.sub(&scaled).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn deformed_product_is_associative() {
        let space = FockSpace::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = number_ctx(space, 0.3);
        for _ in 0..10 {
            let a = random_op(space, &mut rng);
            let b = random_op(space, &mut rng);
            let d = random_op(space, &mut rng);
            let left = k_product(&k_product(&a, &b, &ctx).unwrap(), &d, &ctx).unwrap();
            let right = k_product(&a, &k_product(&b, &d, &ctx).unwrap(), &ctx).unwrap();
            let defect = left.sub(&right).unwrap().frobenius_norm();
            assert!(defect < 1e-11, "associativity defect {defect}");
        }
    }

    #[test]
    fn deformed_commutator_is_a_lie_bracket() {
        let space = FockSpace::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ctx = number_ctx(space, 0.25);
        for _ in 0..5 {
            // Hermitian triple
            let mk = |rng: &mut ChaCha8Rng| {
                let m = random_op(space, rng);
                m.add(&m.adjoint()).unwrap().scale(c(0.5, 0.0))
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let d = mk(&mut rng);
            // antisymmetry is exact by construction
            let anti = k_commutator(&a, &b, &ctx)
                .unwrap()
                .add(&k_commutator(&b, &a, &ctx).unwrap())
                .unwrap();
            assert!(anti.frobenius_norm() == 0.0 || anti.frobenius_norm() < 1e-14);
            // Jacobi
            let j = k_commutator(&a, &k_commutator(&b, &d, &ctx).unwrap(), &ctx)
                .unwrap()
                .add(&k_commutator(&b, &k_commutator(&d, &a, &ctx).unwrap(), &ctx).unwrap())
                .unwrap()
                .add(&k_commutator(&d, &k_commutator(&a, &b, &ctx).unwrap(), &ctx).unwrap())
                .unwrap();
            assert!(j.frobenius_norm() < 1e-9, "jacobi defect {}", j.frobenius_norm());
        }
    }

    #[test]
    fn star_factorizes_through_the_insertion_symbol() {
        // A ⊙ B = (A·e^{λk̂})·B, so the deformed star equals the plain star
        // of A with e^{λk̂} starred onto B — checked via the operator route
        let space = FockSpace::new(12).unwrap();
        let pair = sordered_pair(space, SOrder::new(-0.4).unwrap()).unwrap();
        let grid = LabelGrid::square(2.0, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (a, b) = (random_op(space, &mut rng), random_op(space, &mut rng));
        let ctx = number_ctx(space, 0.2);
        let deformed = k_star(&a, &b, &pair, &ctx, &grid).unwrap();
        let ae = a.mul(&ctx.e_lambda_k).unwrap();
        let factored = star_via_operators(&ae, &b, &pair, &grid).unwrap();
        let d = deformed.sup_distance(&factored).unwrap();
        assert!(d < 1e-10, "factorization defect {d}");
    }

    #[test]
    fn bracket_antisymmetry_and_plain_limit_on_symbols() {
        let space = FockSpace::new(12).unwrap();
        let pair = sordered_pair(space, SOrder::new(0.0).unwrap()).unwrap();
        let grid = LabelGrid::square(2.0, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let (a, b) = (random_op(space, &mut rng), random_op(space, &mut rng));
        let ctx = number_ctx(space, 0.3);
        let self_bracket = k_poisson(&a, &a, &pair, &ctx, &grid).unwrap();
        assert!(self_bracket.values.iter().all(|v| v.norm() < 1e-10));
        let ctx0 = number_ctx(space, 0.0);
        let plain = symbol_field(&a.commutator(&b).unwrap(), &pair, &grid).unwrap();
        let deformed0 = k_poisson(&a, &b, &pair, &ctx0, &grid).unwrap();
        assert!(deformed0.sup_distance(&plain).unwrap() < 1e-10);
    }

    #[test]
    fn lambda_continuity_is_first_order() {
        let space = FockSpace::new(10).unwrap();
        let pair = sordered_pair(space, SOrder::new(0.0).unwrap()).unwrap();
        let grid = LabelGrid::square(1.5, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let (a, b) = (random_op(space, &mut rng), random_op(space, &mut rng));
        let plain = star_via_operators(&a, &b, &pair, &grid).unwrap();
        let dist = |lambda: f64| {
            let ctx = number_ctx(space, lambda);
            k_star(&a, &b, &pair, &ctx, &grid)
                .unwrap()
                .sup_distance(&plain)
                .unwrap()
        };
        // stay well inside the linear-response regime: at 1e-2 the quadratic
        // term already contributes a couple of percent to the distance
        let (d_small, d_large) = (dist(1e-4), dist(1e-3));
        let slope_ratio = d_large / (10.0 * d_small);
        assert!(
            (slope_ratio - 1.0).abs() < 0.2,
            "deviation from linear response: ratio {slope_ratio}"
        );
    }

    #[test]
    fn conserved_generator_evolution_matches_dense_integration() {
        // k̂ = Ĥ = n̂: the deformed equation dA/dt = i(H e^{λk̂} A − A e^{λk̂} H)
        // rotates each matrix element at a deformed frequency; integrate the
        // operator ODE with RK4 and compare against the closed-form element
        // rotation A_{mn}(t) = A_{mn}(0)·exp(it(m e^{λm} − n e^{λn}))
        let space = FockSpace::new(6).unwrap();
        let l = build_ladder(space);
        let h = l.a_dagger.mul(&l.a).unwrap();
        let lambda = 0.2;
        let ctx = DeformationContext::new(h.clone(), lambda).unwrap();
        let he = h.mul(&ctx.e_lambda_k).unwrap();
        let mut a = l.q.clone();
        let dt = 1e-3;
        let steps = 2000;
        let rhs = |m: &Operator| {
            he.mul(m)
                .unwrap()
                .sub(&m.mul(&he).unwrap())
                .unwrap()
                .scale(c(0.0, 1.0))
        };
        for _ in 0..steps {
            let k1 = rhs(&a);
            let k2 = rhs(&a.add(&k1.scale(c(dt / 2.0, 0.0))).unwrap());
            let k3 = rhs(&a.add(&k2.scale(c(dt / 2.0, 0.0))).unwrap());
            let k4 = rhs(&a.add(&k3.scale(c(dt, 0.0))).unwrap());
            let incr = k1
                .add(&k2.scale(c(2.0, 0.0)))
                .unwrap()
                .add(&k3.scale(c(2.0, 0.0)))
                .unwrap()
                .add(&k4)
                .unwrap()
                .scale(c(dt / 6.0, 0.0));
            a = a.add(&incr).unwrap();
        }
        let t = dt * steps as f64;
        let freq = |k: usize| k as f64 * (lambda * k as f64).exp();
        for m in 0..6 {
            for n in 0..6 {
                let expect = l.q.entries[(m, n)] * c(0.0, t * (freq(m) - freq(n))).exp();
                assert!(
                    (a.entries[(m, n)] - expect).norm() < 1e-6,
                    "element ({m},{n})"
                );
            }
        }
    }
}
