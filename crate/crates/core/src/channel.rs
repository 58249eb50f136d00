//! Random-isometry channels in Stinespring form and their conjugates.
//!
//! A channel is specified by a unitary `U` on the `e*f*g`-dimensional space
//! together with the register split of [`RegisterDims`]: the input is placed
//! next to a fixed ancilla `|0>` on `R`, rotated by `U`, and the environment
//! `B` is traced out. The conjugated variant uses the entrywise conjugate
//! unitary instead. Because the ancilla is the leading register and is pinned
//! to the first basis vector, the effective isometry `S -> A ⊗ B` is simply
//! the first `|S|` columns of `U`.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{CoreError, CoreResult};
use crate::tensor::{
    matrix_as_vector, maximally_entangled_state, permute_registers, vector_as_matrix, CMatrix,
    CVector, DensityOperator, RegisterDims, StateVector, UnitaryMatrix, C64,
};

/// Default cap on the squared total dimension handled by the two-copy
/// evaluation (number of amplitudes of the evolved pure state).
pub const DEFAULT_MEMORY_CAP: usize = 1 << 22;

/// A Stinespring-form channel `rho -> Tr_B[U(|0><0| ⊗ rho)U†]`, or its
/// entrywise conjugate when the flag is set.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    dims: RegisterDims,
    unitary: Arc<UnitaryMatrix>,
    conjugated: bool,
}

impl ChannelSpec {
    pub fn new(dims: RegisterDims, unitary: UnitaryMatrix) -> CoreResult<Self> {
        if unitary.dim() != dims.total_dim() {
            return Err(CoreError::InvalidDimension(
                "unitary side must equal e*f*g".to_string(),
            ));
        }
        Ok(ChannelSpec {
            dims,
            unitary: Arc::new(unitary),
            conjugated: false,
        })
    }

    pub fn dims(&self) -> &RegisterDims {
        &self.dims
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    /// The conjugate channel; an involution.
    pub fn conjugate(&self) -> ChannelSpec {
        ChannelSpec {
            dims: self.dims,
            unitary: Arc::clone(&self.unitary),
            conjugated: !self.conjugated,
        }
    }

    /// The effective isometry `S -> A ⊗ B` (`|A||B| x |S|`), conjugated for
    /// the conjugate channel.
    pub fn isometry(&self) -> CMatrix {
        let s = self.dims.input_dim();
        let w = self.unitary.matrix().columns(0, s).into_owned();
        if self.conjugated {
            w.map(|c| c.conj())
        } else {
            w
        }
    }

    /// Applies the channel to a pure input on `S`.
    pub fn apply_pure(&self, input: &StateVector) -> CoreResult<DensityOperator> {
        if input.total_dim() != self.dims.input_dim() {
            return Err(CoreError::InvalidArgument(
                "input dimension does not match |S|".to_string(),
            ));
        }
        let w = self.isometry();
        let out = &w * input.amplitudes();
        let m = vector_as_matrix(&out, self.dims.output_dim(), self.dims.env_dim());
        let rho = &m * m.adjoint();
        DensityOperator::new(rho, vec![self.dims.output_dim()])
    }

    /// Applies the channel to a density operator on `S` via its Kraus
    /// decomposition.
    pub fn apply_density(&self, input: &DensityOperator) -> CoreResult<DensityOperator> {
        if input.total_dim() != self.dims.input_dim() {
            return Err(CoreError::InvalidArgument(
                "input dimension does not match |S|".to_string(),
            ));
        }
        let a = self.dims.output_dim();
        let mut rho = CMatrix::zeros(a, a);
        for k in self.kraus_operators() {
            let kr = &k * input.matrix();
            rho += kr * k.adjoint();
        }
        DensityOperator::new(rho, vec![a])
    }

    /// The `|B|` Kraus operators `K_b = (I_A ⊗ <b|) W` of shape `|A| x |S|`.
    pub fn kraus_operators(&self) -> Vec<CMatrix> {
        let w = self.isometry();
        let a = self.dims.output_dim();
        let b = self.dims.env_dim();
        let s = self.dims.input_dim();
        (0..b)
            .map(|env| CMatrix::from_fn(a, s, |i, j| w[(i * b + env, j)]))
            .collect()
    }

    /// The pure global state obtained by feeding the maximally entangled
    /// input to the pair (channel, conjugate channel), on registers
    /// `[A, B, A, B]`.
    ///
    /// The amplitude matrix equals `W W† / sqrt(|S|)`, i.e. the normalized
    /// projector onto the embedded input subspace, so the two-copy evaluation
    /// stays at `(e*f*g)^2` amplitudes and never forms the dense product
    /// unitary.
    pub fn product_phi_state_capped(&self, memory_cap: usize) -> CoreResult<StateVector> {
        let d = self.dims.total_dim();
        if d.saturating_mul(d) > memory_cap {
            return Err(CoreError::ResourceLimit(
                "two-copy state exceeds the configured memory cap".to_string(),
            ));
        }
        let s = self.dims.input_dim();
        let w = self.isometry();
        let proj = &w * w.adjoint();
        let x = proj.scale(1.0 / (s as f64).sqrt());
        let a = self.dims.output_dim();
        let b = self.dims.env_dim();
        StateVector::new(matrix_as_vector(&x), vec![a, b, a, b])
    }

    /// `(N ⊗ N̄)(Phi)` on `[A, A]`, computed by evolving the pure global
    /// state and tracing out both environments.
    pub fn apply_product_to_phi_capped(&self, memory_cap: usize) -> CoreResult<DensityOperator> {
        let chi = self.product_phi_state_capped(memory_cap)?;
        chi.reduced_density(&[0, 2])
    }

    /// [`ChannelSpec::apply_product_to_phi_capped`] at [`DEFAULT_MEMORY_CAP`].
    pub fn apply_product_to_phi(&self) -> CoreResult<DensityOperator> {
        self.apply_product_to_phi_capped(DEFAULT_MEMORY_CAP)
    }
}

/// Overlap `<Phi| rho |Phi>` with the maximally entangled state on the two
/// (equal-dimension) registers of `rho`.
pub fn max_entangled_overlap(rho: &DensityOperator) -> CoreResult<f64> {
    let dims = rho.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(CoreError::InvalidArgument(
            "overlap needs an operator on two equal registers".to_string(),
        ));
    }
    let phi = maximally_entangled_state(dims[0])?;
    let v = rho.matrix() * phi.amplitudes();
    Ok(phi.amplitudes().dotc(&v).re)
}

/// Abstraction over isometric dilations used by the entropy minimizer: a map
/// from the input space into `output ⊗ environment`, with its adjoint.
pub trait StinespringMap {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn env_dim(&self) -> usize;
    /// Image of `psi` in the `output ⊗ environment` space (row-major).
    fn forward(&self, psi: &CVector) -> CVector;
    /// Adjoint of [`StinespringMap::forward`].
    fn adjoint(&self, v: &CVector) -> CVector;
}

/// Single-copy dilation: the channel's isometry applied directly.
pub struct SingleCopyMap {
    w: CMatrix,
    w_adj: CMatrix,
    a: usize,
    b: usize,
}

impl SingleCopyMap {
    pub fn new(ch: &ChannelSpec) -> Self {
        let w = ch.isometry();
        let w_adj = w.adjoint();
        SingleCopyMap {
            w,
            w_adj,
            a: ch.dims().output_dim(),
            b: ch.dims().env_dim(),
        }
    }
}

impl StinespringMap for SingleCopyMap {
    fn input_dim(&self) -> usize {
        self.w.ncols()
    }

    fn output_dim(&self) -> usize {
        self.a
    }

    fn env_dim(&self) -> usize {
        self.b
    }

    fn forward(&self, psi: &CVector) -> CVector {
        &self.w * psi
    }

    fn adjoint(&self, v: &CVector) -> CVector {
        &self.w_adj * v
    }
}

/// Two-copy dilation for the pair (channel, conjugate channel), acting on
/// arbitrary inputs on `S ⊗ S`. Output registers are grouped as
/// `(A1 A2) ⊗ (B1 B2)`.
pub struct ProductPairMap {
    w: CMatrix,
    a: usize,
    b: usize,
    s: usize,
}

impl ProductPairMap {
    pub fn new(ch: &ChannelSpec, memory_cap: usize) -> CoreResult<Self> {
        let d = ch.dims().total_dim();
        if d.saturating_mul(d) > memory_cap {
            return Err(CoreError::ResourceLimit(
                "two-copy map exceeds the configured memory cap".to_string(),
            ));
        }
        Ok(ProductPairMap {
            w: ch.isometry(),
            a: ch.dims().output_dim(),
            b: ch.dims().env_dim(),
            s: ch.dims().input_dim(),
        })
    }
}

impl StinespringMap for ProductPairMap {
    fn input_dim(&self) -> usize {
        self.s * self.s
    }

    fn output_dim(&self) -> usize {
        self.a * self.a
    }

    fn env_dim(&self) -> usize {
        self.b * self.b
    }

    fn forward(&self, psi: &CVector) -> CVector {
        // (W ⊗ W̄) psi as the matrix sandwich W Psi W†, then regroup
        // [A1, B1, A2, B2] -> [A1, A2, B1, B2].
        let m = vector_as_matrix(psi, self.s, self.s);
        let out = &self.w * m * self.w.adjoint();
        let flat = matrix_as_vector(&out);
        let (regrouped, _) =
            permute_registers(&flat, &[self.a, self.b, self.a, self.b], &[0, 2, 1, 3]);
        regrouped
    }

    fn adjoint(&self, v: &CVector) -> CVector {
        let (flat, _) = permute_registers(v, &[self.a, self.a, self.b, self.b], &[0, 2, 1, 3]);
        let d = self.a * self.b;
        let m = vector_as_matrix(&flat, d, d);
        let back = self.w.adjoint() * m * &self.w;
        matrix_as_vector(&back)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::sample_haar_state;
    use crate::tensor::sample_haar_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_channel(e: usize, f: usize, g: usize, seed: u64) -> ChannelSpec {
        let dims = RegisterDims::new(e, f, g).unwrap();
        let u = sample_haar_unitary(dims.total_dim(), &mut rng(seed)).unwrap();
        ChannelSpec::new(dims, u).unwrap()
    }

    fn random_input(ch: &ChannelSpec, seed: u64) -> StateVector {
        let s = ch.dims().input_dim();
        StateVector::new(
            sample_haar_state(s, &mut rng(seed)).unwrap(),
            vec![ch.dims().f(), ch.dims().g()],
        )
        .unwrap()
    }

    #[test]
    fn trivial_ancilla_preserves_embedded_purity() {
        // e = 1: the channel is an isometry into A ⊗ B followed by the trace
        // over B, so the output purity equals the purity of the embedded
        // state's A-marginal.
        let ch = random_channel(1, 3, 4, 1);
        let psi = random_input(&ch, 2);
        let out = ch.apply_pure(&psi).unwrap();

        let w = ch.isometry();
        let embedded = StateVector::new(&w * psi.amplitudes(), vec![3, 4]).unwrap();
        let marginal = embedded.reduced_density(&[0]).unwrap();
        assert!((out.purity() - marginal.purity()).abs() < 1e-12);
    }

    #[test]
    fn trivial_environment_gives_pure_outputs() {
        let ch = random_channel(2, 3, 1, 3);
        let psi = random_input(&ch, 4);
        let out = ch.apply_pure(&psi).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-10);
        let spec = out.eigenvalues().unwrap();
        assert!((spec.top() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn outputs_have_unit_trace() {
        let ch = random_channel(2, 3, 4, 5);
        for seed in 0..20 {
            let psi = random_input(&ch, 100 + seed);
            let out = ch.apply_pure(&psi).unwrap();
            assert!((out.trace() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn conjugation_is_an_involution() {
        let ch = random_channel(2, 2, 2, 6);
        let twice = ch.conjugate().conjugate();
        let psi = random_input(&ch, 7);
        let a = ch.apply_pure(&psi).unwrap();
        let b = twice.apply_pure(&psi).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.matrix()[(i, j)] - b.matrix()[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn conjugate_channel_conjugates_outputs() {
        // For real-amplitude input rho, N̄(rho) must equal the entrywise
        // conjugate of N(rho).
        let ch = random_channel(2, 2, 2, 8);
        let mut r = rng(9);
        let real_amps = CVector::from_fn(4, |_, _| {
            C64::new(rand::Rng::sample::<f64, _>(&mut r, rand_distr::StandardNormal), 0.0)
        });
        let normed = &real_amps / C64::new(real_amps.norm(), 0.0);
        let psi = StateVector::new(normed, vec![2, 2]).unwrap();

        let out = ch.apply_pure(&psi).unwrap();
        let out_conj = ch.conjugate().apply_pure(&psi).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = out.matrix()[(i, j)].conj();
                assert!((out_conj.matrix()[(i, j)] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kraus_operators_are_complete_and_consistent() {
        let ch = random_channel(2, 3, 2, 10);
        let s = ch.dims().input_dim();
        let kraus = ch.kraus_operators();
        assert_eq!(kraus.len(), ch.dims().env_dim());

        let mut sum = CMatrix::zeros(s, s);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        for i in 0..s {
            for j in 0..s {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                assert!((sum[(i, j)] - expect).norm() < 1e-10);
            }
        }

        // Kraus-sum application agrees with the isometry path.
        for seed in 0..10 {
            let psi = random_input(&ch, 200 + seed);
            let dense = ch.apply_density(&psi.outer_product()).unwrap();
            let fast = ch.apply_pure(&psi).unwrap();
            let a = ch.dims().output_dim();
            for i in 0..a {
                for j in 0..a {
                    assert!((dense.matrix()[(i, j)] - fast.matrix()[(i, j)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_kraus_for_trivial_environment() {
        let ch = random_channel(3, 2, 1, 11);
        let kraus = ch.kraus_operators();
        assert_eq!(kraus.len(), 1);
        // The single Kraus operator is an isometry.
        let prod = kraus[0].adjoint() * &kraus[0];
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                assert!((prod[(i, j)] - expect).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn row_kraus_for_one_dimensional_output() {
        let ch = random_channel(1, 1, 4, 12);
        let kraus = ch.kraus_operators();
        assert_eq!(kraus.len(), 4);
        let mut total = 0.0;
        for k in &kraus {
            assert_eq!(k.shape(), (1, 4));
            total += k.iter().map(|c| c.norm_sqr()).sum::<f64>();
        }
        assert!((total - 4.0).abs() < 1e-10);
    }

    #[test]
    fn product_phi_is_pure_for_trivial_ancilla() {
        let ch = random_channel(1, 2, 2, 13);
        let rho = ch.apply_product_to_phi().unwrap();
        let overlap = max_entangled_overlap(&rho).unwrap();
        assert!(overlap >= 1.0 - 1e-9, "fidelity {overlap}");
    }

    #[test]
    fn product_phi_overlap_floor_holds() {
        for (e, f, g, seed) in [(2, 2, 2, 14), (2, 3, 2, 15), (3, 2, 4, 16)] {
            let ch = random_channel(e, f, g, seed);
            let rho = ch.apply_product_to_phi().unwrap();
            let overlap = max_entangled_overlap(&rho).unwrap();
            assert!(
                overlap >= 1.0 / e as f64 - 1e-9,
                "dims ({e},{f},{g}): overlap {overlap} below 1/{e}"
            );
        }
    }

    #[test]
    fn product_phi_respects_memory_cap() {
        let ch = random_channel(2, 2, 2, 17);
        let err = ch.apply_product_to_phi_capped(10).unwrap_err();
        assert!(matches!(err, CoreError::ResourceLimit(_)));
    }

    #[test]
    fn output_spectrum_invariant_under_local_rotations() {
        // Replacing U by (V_A ⊗ V_B) U conjugates the output by V_A and so
        // leaves its spectrum unchanged.
        let dims = RegisterDims::new(2, 2, 3).unwrap();
        let mut r = rng(18);
        let u = sample_haar_unitary(dims.total_dim(), &mut r).unwrap();
        let va = sample_haar_unitary(dims.output_dim(), &mut r).unwrap();
        let vb = sample_haar_unitary(dims.env_dim(), &mut r).unwrap();

        let a = dims.output_dim();
        let b = dims.env_dim();
        let local = CMatrix::from_fn(a * b, a * b, |row, col| {
            va.matrix()[(row / b, col / b)] * vb.matrix()[(row % b, col % b)]
        });
        let rotated = UnitaryMatrix::new(local * u.matrix()).unwrap();

        let ch = ChannelSpec::new(dims, u).unwrap();
        let ch_rot = ChannelSpec::new(dims, rotated).unwrap();
        let psi = random_input(&ch, 19);
        let s1 = ch.apply_pure(&psi).unwrap().eigenvalues().unwrap();
        let s2 = ch_rot.apply_pure(&psi).unwrap().eigenvalues().unwrap();
        for (x, y) in s1.values().iter().zip(s2.values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn product_pair_map_matches_phi_evaluation() {
        // Feeding Phi through the generic two-copy map reproduces
        // apply_product_to_phi.
        let ch = random_channel(2, 2, 2, 20);
        let map = ProductPairMap::new(&ch, DEFAULT_MEMORY_CAP).unwrap();
        let s = ch.dims().input_dim();
        let phi = maximally_entangled_state(s).unwrap();
        let out = map.forward(phi.amplitudes());
        let a2 = map.output_dim();
        let b2 = map.env_dim();
        let m = vector_as_matrix(&out, a2, b2);
        let rho = &m * m.adjoint();
        let expect = ch.apply_product_to_phi().unwrap();
        for i in 0..a2 {
            for j in 0..a2 {
                assert!((rho[(i, j)] - expect.matrix()[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn maps_satisfy_adjoint_identity() {
        // <forward(x), y> = <x, adjoint(y)> for both map flavours.
        let ch = random_channel(2, 2, 3, 21);
        let single = SingleCopyMap::new(&ch);
        let pair = ProductPairMap::new(&ch, DEFAULT_MEMORY_CAP).unwrap();
        let mut r = rng(22);

        let x = sample_haar_state(single.input_dim(), &mut r).unwrap();
        let y = sample_haar_state(single.output_dim() * single.env_dim(), &mut r).unwrap();
        let lhs = single.forward(&x).dotc(&y);
        let rhs = x.dotc(&single.adjoint(&y));
        assert!((lhs - rhs).norm() < 1e-12);

        let x = sample_haar_state(pair.input_dim(), &mut r).unwrap();
        let y = sample_haar_state(pair.output_dim() * pair.env_dim(), &mut r).unwrap();
        let lhs = pair.forward(&x).dotc(&y);
        let rhs = x.dotc(&pair.adjoint(&y));
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
