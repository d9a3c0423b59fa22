use num_complex::Complex64;

use super::{hermitian_eig, DensityMatrix, LinalgError, TAU_SUPP};

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// S(ρ) = −tr ρ log₂ ρ with 0·log 0 = 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, LinalgError> {
    let e = hermitian_eig(rho.matrix())?;
    Ok(-e.values.iter().map(|&x| xlog2x(x)).sum::<f64>())
}

/// D(ψ‖φ) = tr ψ log₂ ψ − tr ψ log₂ φ, evaluated on supports.
///
/// Returns +∞ when ψ puts more than `TAU_SUPP` weight on eigenvectors of φ whose
/// eigenvalue is at most `TAU_SUPP`.
pub fn quantum_relative_entropy(psi: &DensityMatrix, phi: &DensityMatrix) -> Result<f64, LinalgError> {
    if psi.dim() != phi.dim() {
        return Err(LinalgError::Shape(format!(
            "relative entropy between dimensions {} and {}",
            psi.dim(),
            phi.dim()
        )));
    }
    let ep = hermitian_eig(psi.matrix())?;
    let ef = hermitian_eig(phi.matrix())?;
    let n = psi.dim();
    let mut outside = 0.0;
    let mut cross = 0.0;
    for j in 0..n {
        let b: Vec<Complex64> = ef.vector(j);
        let weight = expectation(psi, &b);
        let q = ef.values[j];
        if q <= TAU_SUPP {
            outside += weight;
        } else {
            cross += weight * q.log2();
        }
    }
    if outside > TAU_SUPP {
        return Ok(f64::INFINITY);
    }
    let neg_entropy: f64 = ep.values.iter().map(|&x| xlog2x(x)).sum();
    Ok(neg_entropy - cross)
}

/// ⟨v|ρ|v⟩ (real part).
fn expectation(rho: &DensityMatrix, v: &[Complex64]) -> f64 {
    let m = rho.matrix();
    let n = v.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += m[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

/// Classical Kullback–Leibler divergence in bits, +∞ on support violations.
pub fn classical_kl(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return f64::INFINITY;
        }
        acc += pi * (pi / qi).log2();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::diag_real(p), vec![p.len()]).unwrap()
    }

    #[test]
    fn entropy_of_quarter_three_quarters() {
        // −(¼ log₂ ¼ + ¾ log₂ ¾)
        let expected = 0.25 * 2.0 + 0.75 * (4.0f64 / 3.0).log2();
        let s = von_neumann_entropy(&diag(&[0.25, 0.75])).unwrap();
        assert!((s - expected).abs() < 1e-12);
        assert!((s - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn pure_states_have_zero_entropy() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(&[Complex64::new(h, 0.0), Complex64::new(0.0, h)], vec![2]).unwrap();
        assert!(von_neumann_entropy(&plus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_matches_kl_when_commuting() {
        let p = [0.1, 0.6, 0.3];
        let q = [0.2, 0.2, 0.6];
        let d = quantum_relative_entropy(&diag(&p), &diag(&q)).unwrap();
        assert!((d - classical_kl(&p, &q)).abs() < 1e-12);
    }

    #[test]
    fn support_violation_is_infinite() {
        let d = quantum_relative_entropy(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0])).unwrap();
        assert!(d.is_infinite() && d > 0.0);
        // The reverse direction is finite: |0⟩ sits inside supp(I/2).
        let r = quantum_relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5])).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(quantum_relative_entropy(&diag(&[1.0]), &diag(&[0.5, 0.5])).is_err());
    }
}
