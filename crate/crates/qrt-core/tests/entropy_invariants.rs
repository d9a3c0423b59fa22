use proptest::prelude::*;

use qrt_core::channels::KrausChannel;
use qrt_core::linalg::{
    partial_trace, quantum_relative_entropy, trace_distance, von_neumann_entropy, Complex64, ComplexMatrix, DensityMatrix,
};
use qrt_core::measures::{relative_entropy_of_resource, FreeSpec, SolverConfig};

const TOL: f64 = 1e-8;

fn pure_state(amps: &[(f64, f64)]) -> DensityMatrix {
    let v: Vec<Complex64> = amps.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
    DensityMatrix::pure(&v, vec![2]).unwrap()
}

/// A full-rank qubit state: a pure state mixed with the identity.
fn qubit() -> impl Strategy<Value = DensityMatrix> {
    (prop::array::uniform4(-1.0f64..1.0), 0.05f64..1.0).prop_filter_map("nonzero amplitude", |(a, p)| {
        if a.iter().map(|x| x * x).sum::<f64>() < 1e-3 {
            return None;
        }
        let psi = pure_state(&[(a[0], a[1]), (a[2], a[3])]);
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        Some(DensityMatrix::mixture(&[1.0 - p, p], &[&psi, &mixed]).unwrap())
    })
}

fn dephase() -> KrausChannel {
    KrausChannel::new(
        "dephase",
        2,
        2,
        vec![ComplexMatrix::basis_projector(2, 0), ComplexMatrix::basis_projector(2, 1)],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_lies_between_zero_and_one_bit(rho in qubit()) {
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!((-TOL..=1.0 + TOL).contains(&s), "S = {s}");
    }

    #[test]
    fn partial_trace_undoes_tensor(a in qubit(), b in qubit()) {
        let ab = a.tensor(&b);
        let left = partial_trace(&ab, &[0]).unwrap();
        let right = partial_trace(&ab, &[1]).unwrap();
        prop_assert!(trace_distance(left.matrix(), a.matrix()).unwrap() < TOL);
        prop_assert!(trace_distance(right.matrix(), b.matrix()).unwrap() < TOL);
    }

    #[test]
    fn relative_entropy_is_nonnegative_and_contracts(a in qubit(), b in qubit()) {
        let d = quantum_relative_entropy(&a, &b).unwrap();
        prop_assert!(d >= -TOL);
        prop_assert!(quantum_relative_entropy(&a, &a).unwrap().abs() < TOL);
        let ch = dephase();
        let da = ch.apply(&a, None).unwrap();
        let db = ch.apply(&b, None).unwrap();
        prop_assert!(quantum_relative_entropy(&da, &db).unwrap() <= d + TOL);
    }

    #[test]
    fn relative_entropy_is_additive(a in qubit(), b in qubit(), c in qubit(), d in qubit()) {
        let joint = quantum_relative_entropy(&a.tensor(&c), &b.tensor(&d)).unwrap();
        let sum = quantum_relative_entropy(&a, &b).unwrap() + quantum_relative_entropy(&c, &d).unwrap();
        prop_assert!((joint - sum).abs() < 1e-7, "{joint} vs {sum}");
    }

    #[test]
    fn more_free_states_never_raise_the_resource(psi in qubit(), f in prop::collection::vec(qubit(), 1..4), g in qubit()) {
        let solver = SolverConfig::default();
        let small = relative_entropy_of_resource(&psi, &FreeSpec::FiniteSet(f.clone()), &solver).unwrap();
        let mut grown = f.clone();
        grown.push(g);
        let large = relative_entropy_of_resource(&psi, &FreeSpec::FiniteSet(grown.clone()), &solver).unwrap();
        let hull = relative_entropy_of_resource(&psi, &FreeSpec::ConvexHull(grown), &solver).unwrap();
        prop_assert!(large.value <= small.value + TOL);
        prop_assert!(hull.value <= large.value + 1e-6);
        prop_assert!(hull.value >= -TOL);
    }
}
