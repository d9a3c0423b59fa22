use num_complex::Complex64;

use super::{hermitian_eig, ComplexMatrix, LinalgError, TAU_HERM, TAU_PSD, TAU_TR};

/// A validated density operator on a product of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    subsystem_dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within the fixed
    /// tolerances. `subsystem_dims` must multiply to the matrix dimension.
    pub fn new(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare(matrix.rows(), matrix.cols()));
        }
        let product: usize = subsystem_dims.iter().product();
        if product != matrix.rows() {
            return Err(LinalgError::Shape(format!(
                "subsystem dims {subsystem_dims:?} do not multiply to {}",
                matrix.rows()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > TAU_HERM {
            return Err(LinalgError::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TAU_TR || tr.im.abs() > TAU_TR {
            return Err(LinalgError::Trace(tr.re));
        }
        let min_eig = hermitian_eig(&matrix)?.values.last().copied().unwrap_or(0.0);
        if min_eig < -TAU_PSD {
            return Err(LinalgError::NotPositive(min_eig));
        }
        Ok(Self {
            matrix,
            subsystem_dims,
        })
    }

    /// Skips validation; callers guarantee the matrix is a state, typically
    /// because it is the image of a state under a CPTP map.
    pub fn new_unchecked(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Self {
        debug_assert_eq!(subsystem_dims.iter().product::<usize>(), matrix.rows());
        Self {
            matrix,
            subsystem_dims,
        }
    }

    /// The scalar system: the 1×1 matrix [1] with no subsystems.
    pub fn scalar() -> Self {
        Self::new_unchecked(ComplexMatrix::identity(1), Vec::new())
    }

    /// |k⟩⟨k| on `dims`, with `k` a product-basis index.
    pub fn basis(dims: &[usize], k: usize) -> Self {
        let d = dims.iter().product();
        Self::new_unchecked(ComplexMatrix::basis_projector(d, k), dims.to_vec())
    }

    pub fn pure(psi: &[Complex64], dims: Vec<usize>) -> Result<Self, LinalgError> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(LinalgError::Shape("zero vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&v), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self::new_unchecked(ComplexMatrix::identity(d).scale_real(1.0 / d as f64), dims)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.subsystem_dims.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.subsystem_dims.clone();
        dims.extend_from_slice(&other.subsystem_dims);
        Self::new_unchecked(self.matrix.kron(&other.matrix), dims)
    }

    pub fn tensor_power(&self, n: usize) -> Self {
        let mut out = Self::scalar();
        for _ in 0..n {
            out = out.tensor(self);
        }
        out
    }

    /// Convex combination Σ wᵢ ρᵢ; all inputs must share their dimensions.
    pub fn mixture(weights: &[f64], states: &[&DensityMatrix]) -> Result<Self, LinalgError> {
        let first = states.first().ok_or_else(|| LinalgError::Shape("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, s) in weights.iter().zip(states) {
            if s.subsystem_dims != first.subsystem_dims {
                return Err(LinalgError::Shape("mixture of different systems".into()));
            }
            acc = &acc + &s.matrix.scale_real(*w);
        }
        Ok(Self::new_unchecked(acc, first.subsystem_dims.clone()))
    }
}

/// Kronecker product of two states; subsystem dimensions are concatenated.
pub fn tensor_density(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    a.tensor(b)
}

/// Reorders subsystems: subsystem `i` of the result is subsystem `perm[i]`
/// of the input.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>), LinalgError> {
    let k = dims.len();
    let mut seen = vec![false; k];
    if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(LinalgError::Shape(format!("{perm:?} is not a permutation of {k} subsystems")));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() || !m.is_square() {
        return Err(LinalgError::Shape("dims do not match matrix".into()));
    }
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return Ok((m.clone(), dims.to_vec()));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    // Stride in the old layout of each new position.
    let moved: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let map: Vec<usize> = (0..total).map(|idx| remap(idx, &new_dims, &moved)).collect();
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        let oi = map[i];
        for j in 0..total {
            out[(i, j)] = m[(oi, map[j])];
        }
    }
    Ok((out, new_dims))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn remap(mut idx: usize, new_dims: &[usize], moved: &[usize]) -> usize {
    let mut old = 0;
    for pos in (0..new_dims.len()).rev() {
        let digit = idx % new_dims[pos];
        idx /= new_dims[pos];
        old += digit * moved[pos];
    }
    old
}

/// Reduced state on the subsystems listed in `keep` (kept in ascending order).
/// An empty `keep` yields the 1×1 matrix [tr ρ].
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, LinalgError> {
    let k = rho.num_subsystems();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if let Some(&bad) = keep_sorted.iter().find(|&&i| i >= k) {
        return Err(LinalgError::Subsystem(bad, k));
    }
    let traced: Vec<usize> = (0..k).filter(|i| !keep_sorted.contains(i)).collect();
    let mut perm = keep_sorted.clone();
    perm.extend(&traced);
    let (m, dims) = permute_subsystems(rho.matrix(), rho.subsystem_dims(), &perm)?;
    let kept_dims: Vec<usize> = dims[..keep_sorted.len()].to_vec();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = dims[keep_sorted.len()..].iter().product();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                acc += m[(i * dt + t, j * dt + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::new_unchecked(out, kept_dims))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    if m.hermiticity_defect() <= 1e-12 * m.max_abs().max(1.0) {
        return Ok(hermitian_eig(m)?.values.iter().map(|x| x.abs()).sum());
    }
    let gram = &m.adjoint() * m;
    Ok(hermitian_eig(&gram)?.values.iter().map(|x| x.max(0.0).sqrt()).sum())
}

/// ‖ρ − σ‖₁.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, LinalgError> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(LinalgError::Shape("trace distance between different shapes".into()));
    }
    trace_norm(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)], vec![2]).unwrap()
    }

    #[test]
    fn validation_rejects_bad_states() {
        let not_unit = ComplexMatrix::diag_real(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(not_unit, vec![2]), Err(LinalgError::Trace(_))));
        let negative = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(negative, vec![2]), Err(LinalgError::NotPositive(_))));
        let wrong_dims = ComplexMatrix::diag_real(&[0.5, 0.5]);
        assert!(DensityMatrix::new(wrong_dims, vec![3]).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let zero = DensityMatrix::basis(&[2], 0);
        let p = plus();
        let joint = zero.tensor(&p);
        let a = partial_trace(&joint, &[0]).unwrap();
        let b = partial_trace(&joint, &[1]).unwrap();
        assert!((a.matrix() - zero.matrix()).max_abs() < 1e-15);
        assert!((b.matrix() - p.matrix()).max_abs() < 1e-15);
        let none = partial_trace(&joint, &[]).unwrap();
        assert_eq!(none.dim(), 1);
        assert!((none.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(matches!(partial_trace(&joint, &[2]), Err(LinalgError::Subsystem(2, 2))));
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let bell = DensityMatrix::pure(&[Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)], vec![2, 2]).unwrap();
        let r = partial_trace(&bell, &[1]).unwrap();
        assert!((r.matrix() - DensityMatrix::maximally_mixed(vec![2]).matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn permutation_swaps_factors() {
        let zero = DensityMatrix::basis(&[2], 0);
        let one = DensityMatrix::basis(&[3], 2);
        let joint = zero.tensor(&one);
        let (swapped, dims) = permute_subsystems(joint.matrix(), joint.subsystem_dims(), &[1, 0]).unwrap();
        assert_eq!(dims, vec![3, 2]);
        assert!((&swapped - one.tensor(&zero).matrix()).max_abs() < 1e-15);
        assert!(permute_subsystems(joint.matrix(), joint.subsystem_dims(), &[0, 0]).is_err());
    }

    #[test]
    fn trace_norm_examples() {
        let zero = DensityMatrix::basis(&[2], 0);
        let one = DensityMatrix::basis(&[2], 1);
        assert!((trace_distance(zero.matrix(), one.matrix()).unwrap() - 2.0).abs() < 1e-14);
        // Nilpotent |0⟩⟨1| has a single singular value 1.
        let n = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((trace_norm(&n).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_norm(&ComplexMatrix::zeros(1, 2)).is_err());
    }
}
