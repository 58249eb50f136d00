//! Dense complex linear algebra over composite registers.
//!
//! States and operators carry an explicit ordered list of register dimensions
//! with row-major composite indexing: for registers `(d0, d1, d2)` the basis
//! vector `|i0 i1 i2>` sits at flat index `(i0*d1 + i1)*d2 + i2`. All types
//! are immutable after construction and validate their defining invariants
//! eagerly; violations are errors, not warnings.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{CoreError, CoreResult};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Max entrywise deviation of `U†U` from the identity.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Max entrywise deviation of a matrix from its adjoint.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Allowed deviation of a density operator's trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed deviation of a pure state's norm from one.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Eigenvalues of a density operator may undershoot zero by at most this.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// The register-dimension triple `(e, f, g)` of the channel construction.
///
/// From it derive the four composite registers used throughout: the ancilla
/// `R` of dimension `e`, the channel input `S = F⊗G` of dimension `f*g`, the
/// channel output `A = E⊗F` of dimension `e*f` and the traced-out environment
/// `B = G` of dimension `g`. By construction `|R|*|S| = |A|*|B| = e*f*g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterDims {
    e: usize,
    f: usize,
    g: usize,
}

impl RegisterDims {
    pub fn new(e: usize, f: usize, g: usize) -> CoreResult<Self> {
        if e == 0 || f == 0 || g == 0 {
            return Err(CoreError::InvalidDimension(
                "register dimensions must be at least 1".to_string(),
            ));
        }
        Ok(RegisterDims { e, f, g })
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// `|R| = e`, the dimension of the fixed ancilla register.
    pub fn ancilla_dim(&self) -> usize {
        self.e
    }

    /// `|S| = f*g`, the channel input dimension.
    pub fn input_dim(&self) -> usize {
        self.f * self.g
    }

    /// `|A| = e*f`, the channel output dimension.
    pub fn output_dim(&self) -> usize {
        self.e * self.f
    }

    /// `|B| = g`, the environment dimension.
    pub fn env_dim(&self) -> usize {
        self.g
    }

    /// `e*f*g`, the dimension the dilation unitary acts on.
    pub fn total_dim(&self) -> usize {
        self.e * self.f * self.g
    }
}

/// Row-major flat index of a multi-index.
pub fn flatten_index(dims: &[usize], multi: &[usize]) -> usize {
    debug_assert_eq!(dims.len(), multi.len());
    let mut k = 0;
    for (d, i) in dims.iter().zip(multi.iter()) {
        debug_assert!(i < d);
        k = k * d + i;
    }
    k
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut multi = vec![0usize; dims.len()];
    for pos in (0..dims.len()).rev() {
        multi[pos] = flat % dims[pos];
        flat /= dims[pos];
    }
    multi
}

/// Reorders the registers of a row-major amplitude vector.
///
/// `order[j]` names the original register that becomes position `j`; returns
/// the permuted amplitudes together with the permuted dimension list.
pub fn permute_registers(
    amplitudes: &CVector,
    dims: &[usize],
    order: &[usize],
) -> (CVector, Vec<usize>) {
    debug_assert_eq!(order.len(), dims.len());
    let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
    let n = amplitudes.len();
    let mut out = CVector::zeros(n);
    for old_flat in 0..n {
        let old_multi = unflatten_index(dims, old_flat);
        let new_multi: Vec<usize> = order.iter().map(|&p| old_multi[p]).collect();
        out[flatten_index(&new_dims, &new_multi)] = amplitudes[old_flat];
    }
    (out, new_dims)
}

/// Interprets a row-major amplitude vector as a `rows x cols` matrix.
pub fn vector_as_matrix(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    debug_assert_eq!(v.len(), rows * cols);
    CMatrix::from_row_iterator(rows, cols, v.iter().copied())
}

/// Row-major flattening of a matrix into an amplitude vector.
pub fn matrix_as_vector(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    CVector::from_iterator(rows * cols, m.transpose().iter().copied())
}

fn validate_keep(keep: &[usize], registers: usize) -> CoreResult<()> {
    if keep.is_empty() {
        return Err(CoreError::InvalidArgument(
            "partial trace must keep at least one register".to_string(),
        ));
    }
    let mut prev: Option<usize> = None;
    for &k in keep {
        if k >= registers {
            return Err(CoreError::InvalidArgument(
                "kept register index out of range".to_string(),
            ));
        }
        if let Some(p) = prev {
            if k <= p {
                return Err(CoreError::InvalidArgument(
                    "kept register indices must be strictly increasing".to_string(),
                ));
            }
        }
        prev = Some(k);
    }
    Ok(())
}

/// A normalized pure state on an ordered list of registers.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> CoreResult<Self> {
        let expected: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(CoreError::InvalidDimension(
                "state dims must be non-empty and positive".to_string(),
            ));
        }
        if amplitudes.len() != expected {
            return Err(CoreError::InvalidDimension(
                "amplitude count does not match the register dimensions".to_string(),
            ));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(CoreError::InvalidArgument(
                "state vector is not normalized".to_string(),
            ));
        }
        Ok(StateVector { amplitudes, dims })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `|psi><psi|` as a dense density operator.
    pub fn outer_product(&self) -> DensityOperator {
        let n = self.amplitudes.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        DensityOperator {
            matrix: m,
            dims: self.dims.clone(),
        }
    }

    /// Tensor product, concatenating the register lists.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let n = self.amplitudes.len() * other.amplitudes.len();
        let mut amps = CVector::zeros(n);
        for i in 0..self.amplitudes.len() {
            for j in 0..other.amplitudes.len() {
                amps[i * other.amplitudes.len() + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector {
            amplitudes: amps,
            dims,
        }
    }

    /// Reduced density operator on the kept registers, contracted directly
    /// from the amplitudes without forming the full outer product.
    pub fn reduced_density(&self, keep: &[usize]) -> CoreResult<DensityOperator> {
        validate_keep(keep, self.dims.len())?;
        let traced: Vec<usize> = (0..self.dims.len()).filter(|r| !keep.contains(r)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&r| self.dims[r]).collect();
        let k: usize = kept_dims.iter().product();
        let t: usize = traced.iter().map(|&r| self.dims[r]).product();

        let mut order = keep.to_vec();
        order.extend_from_slice(&traced);
        let (perm, _) = permute_registers(&self.amplitudes, &self.dims, &order);
        let m = vector_as_matrix(&perm, k, t);
        let rho = &m * m.adjoint();
        DensityOperator::new(rho, kept_dims)
    }
}

/// A unit-trace positive Hermitian operator on an ordered register list.
///
/// Construction checks Hermiticity and trace; positivity is enforced where
/// the spectrum is actually extracted (see [`DensityOperator::eigenvalues`]).
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> CoreResult<Self> {
        let n: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(CoreError::InvalidDimension(
                "density operator dims must be non-empty and positive".to_string(),
            ));
        }
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(CoreError::InvalidDimension(
                "matrix side does not match the register dimensions".to_string(),
            ));
        }
        let mut herm_dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if dev > herm_dev {
                    herm_dev = dev;
                }
            }
        }
        if herm_dev > HERMITICITY_TOL {
            return Err(CoreError::InvalidArgument(
                "matrix is not Hermitian within tolerance".to_string(),
            ));
        }
        let tr: C64 = matrix.diagonal().iter().sum();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(CoreError::InvalidArgument(
                "density operator trace is not one within tolerance".to_string(),
            ));
        }
        Ok(DensityOperator { matrix, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    /// `Tr(rho^2)`; equals the squared Frobenius norm for Hermitian input.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Partial trace keeping the listed registers (in their original order).
    pub fn partial_trace(&self, keep: &[usize]) -> CoreResult<DensityOperator> {
        validate_keep(keep, self.dims.len())?;
        if keep.len() == self.dims.len() {
            return Ok(self.clone());
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&r| self.dims[r]).collect();
        let k: usize = kept_dims.iter().product();
        let n = self.matrix.nrows();

        // Precompute each flat index's kept and traced parts.
        let traced: Vec<usize> = (0..self.dims.len()).filter(|r| !keep.contains(r)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&r| self.dims[r]).collect();
        let mut kept_part = vec![0usize; n];
        let mut traced_part = vec![0usize; n];
        for flat in 0..n {
            let multi = unflatten_index(&self.dims, flat);
            let km: Vec<usize> = keep.iter().map(|&r| multi[r]).collect();
            let tm: Vec<usize> = traced.iter().map(|&r| multi[r]).collect();
            kept_part[flat] = flatten_index(&kept_dims, &km);
            traced_part[flat] = flatten_index(&traced_dims, &tm);
        }

        let mut out = CMatrix::zeros(k, k);
        for i in 0..n {
            for j in 0..n {
                if traced_part[i] == traced_part[j] {
                    out[(kept_part[i], kept_part[j])] += self.matrix[(i, j)];
                }
            }
        }
        DensityOperator::new(out, kept_dims)
    }

    /// Descending real spectrum of the (symmetrized) operator.
    ///
    /// Errors if any eigenvalue undershoots [`EIGENVALUE_FLOOR`]; values in
    /// `[EIGENVALUE_FLOOR, 0)` are clamped to zero.
    pub fn eigenvalues(&self) -> CoreResult<Spectrum> {
        let sym = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_unstable_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
        let sum: f64 = vals.iter().sum();
        let tr = self.trace();
        if (sum - tr).abs() > TRACE_TOL * tr.abs().max(1.0) {
            return Err(CoreError::InvalidArgument(
                "eigenvalue sum deviates from the trace".to_string(),
            ));
        }
        Spectrum::from_values(vals)
    }
}

/// Descending, clamped-nonnegative eigenvalue list.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts descending and clamps values in `[EIGENVALUE_FLOOR, 0)` to zero;
    /// anything below the floor is rejected.
    pub fn from_values(mut values: Vec<f64>) -> CoreResult<Self> {
        if values.is_empty() {
            return Err(CoreError::InvalidArgument(
                "spectrum must be non-empty".to_string(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidArgument(
                "spectrum entries must be finite".to_string(),
            ));
        }
        if values.iter().any(|&v| v < EIGENVALUE_FLOOR) {
            return Err(CoreError::InvalidArgument(
                "spectrum has an eigenvalue below the negativity floor".to_string(),
            ));
        }
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite"));
        Ok(Spectrum { eigenvalues: values })
    }

    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest eigenvalue.
    pub fn top(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// A square matrix validated to be unitary within [`UNITARITY_TOL`].
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> CoreResult<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(CoreError::InvalidDimension(
                "unitary must be square and non-empty".to_string(),
            ));
        }
        let d = matrix.nrows();
        let prod = matrix.adjoint() * &matrix;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                let dev = (prod[(i, j)] - expect).norm();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        if worst > UNITARITY_TOL {
            return Err(CoreError::InvalidArgument(
                "matrix is not unitary within tolerance".to_string(),
            ));
        }
        Ok(UnitaryMatrix { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Samples a complex Gaussian matrix with i.i.d. standard entries.
pub fn ginibre_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let scale = 1.0 / 2.0f64.sqrt();
    CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Draws a unitary from the Haar measure.
///
/// QR-orthonormalizes a complex Ginibre matrix, then multiplies each column
/// by the phase that makes the corresponding diagonal entry of the triangular
/// factor real positive. Without the phase correction the distribution of the
/// orthonormalized columns is not Haar.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CoreResult<UnitaryMatrix> {
    if d == 0 {
        return Err(CoreError::InvalidDimension(
            "cannot sample a unitary of dimension zero".to_string(),
        ));
    }
    let g = ginibre_matrix(d, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let mag = rjj.norm();
        let phase = if mag > 0.0 { rjj / mag } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::new(q)
}

/// Haar-random unit vector of the given dimension.
pub fn sample_haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CoreResult<CVector> {
    if d == 0 {
        return Err(CoreError::InvalidDimension(
            "cannot sample a state of dimension zero".to_string(),
        ));
    }
    let scale = 1.0 / 2.0f64.sqrt();
    let mut v = CVector::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let norm = v.norm();
    if norm == 0.0 {
        v[0] = C64::new(1.0, 0.0);
    } else {
        v /= C64::new(norm, 0.0);
    }
    Ok(v)
}

/// The maximally entangled state `d^{-1/2} sum_i |i>|i>` on two `d`-dim
/// registers, in the computational basis with the identity pairing.
pub fn maximally_entangled_state(d: usize) -> CoreResult<StateVector> {
    if d == 0 {
        return Err(CoreError::InvalidDimension(
            "maximally entangled state needs dimension at least 1".to_string(),
        ));
    }
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    StateVector::new(v, vec![d, d])
}
