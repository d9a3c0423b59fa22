use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError, TAU_HERM};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) and eigenvectors (as columns, same order).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `k` as a vector.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// V f(Λ) V† for a real function applied to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let fk = f(self.values[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first rephases column `q` so the pivot becomes real and then
/// applies a real Givens rotation. Eigenvalues come back in descending order;
/// every eigenvector is rephased so that its first entry of non-negligible
/// modulus is real and positive.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows(), a.cols()));
    }
    let scale = a.max_abs().max(1.0);
    if a.hermiticity_defect() > TAU_HERM * scale {
        return Err(LinalgError::NotHermitian(a.hermiticity_defect()));
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let total = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]).then(x.cmp(&y)));

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(diag[src]);
        let lead = (0..n)
            .map(|i| v[(i, src)])
            .find(|z| z.norm() > 1e-8)
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = lead.conj() / lead.norm();
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)] * phase;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    // Rephase so that the pivot is the positive real number r.
    let phase = apq.conj() / r;
    let phase_conj = phase.conj();
    for k in 0..n {
        m[(k, q)] *= phase;
        v[(k, q)] *= phase;
    }
    for k in 0..n {
        m[(q, k)] *= phase_conj;
    }
    m[(p, q)] = Complex64::new(r, 0.0);
    m[(q, p)] = Complex64::new(r, 0.0);

    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let new_kp = akp * c - akq * s;
        let new_kq = akq * c + akp * s;
        m[(k, p)] = new_kp;
        m[(k, q)] = new_kq;
        m[(p, k)] = new_kp.conj();
        m[(q, k)] = new_kq.conj();
    }
    m[(p, p)] = Complex64::new(app - t * r, 0.0);
    m[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn diagonal_input_is_sorted_descending() {
        let d = ComplexMatrix::diag_real(&[0.25, 0.75]);
        let e = hermitian_eig(&d).unwrap();
        assert_eq!(e.values, vec![0.75, 0.25]);
        assert_eq!(e.vectors[(1, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pauli_y_has_unit_eigenvalues() {
        let y = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eig(&y).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        // Leading entry is rephased to the positive real axis.
        let v = e.vector(0);
        assert!(v[0].im.abs() < 1e-14 && v[0].re > 0.0);
    }

    #[test]
    fn reconstruction_up_to_dim_64() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[1usize, 2, 3, 5, 8, 16, 33, 64] {
            let a = random_hermitian(n, &mut rng);
            let e = hermitian_eig(&a).unwrap();
            let err = (&e.reconstruct() - &a).max_abs();
            assert!(err < 1e-10, "n={n} err={err}");
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!((&gram - &ComplexMatrix::identity(n)).max_abs() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(LinalgError::NotHermitian(_))));
        assert!(matches!(hermitian_eig(&ComplexMatrix::zeros(2, 3)), Err(LinalgError::NotSquare(2, 3))));
    }
}
