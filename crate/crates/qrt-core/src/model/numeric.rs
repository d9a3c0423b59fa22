use crate::linalg::{permute_subsystems, ComplexMatrix, DensityMatrix};

use super::{ModelError, QrtInstance, Step};

/// Applies a lifted Kraus generator: the inputs are permuted to the front, the
/// channel acts as K ⊗ I on them, and the outputs are moved to their placement.
pub fn apply_step_numeric(q: &QrtInstance, step: &Step, rho: &DensityMatrix) -> Result<DensityMatrix, ModelError> {
    let g = &q.generators[step.generator];
    let ch = g.kraus().expect("numeric instance has Kraus generators");
    let k = rho.num_subsystems();
    let d = q.base_dim;
    let (a, b) = (g.arity_in, g.arity_out);

    let mut perm = step.inputs.clone();
    perm.extend((0..k).filter(|i| !step.inputs.contains(i)));
    let (front, _) = permute_subsystems(rho.matrix(), rho.subsystem_dims(), &perm)?;

    let rest_dim = d.pow((k - a) as u32);
    let id_rest = ComplexMatrix::identity(rest_dim);
    let mut out = ComplexMatrix::zeros(ch.dim_out * rest_dim, ch.dim_out * rest_dim);
    for kr in &ch.kraus {
        out = &out + &kr.kron(&id_rest).sandwich(&front);
    }

    let width = k - a + b;
    let back: Vec<usize> = if a == b {
        let mut p = vec![0; width];
        for (i, &pos) in step.inputs.iter().enumerate() {
            p[pos] = i;
        }
        let others: Vec<usize> = (0..k).filter(|i| !step.inputs.contains(i)).collect();
        for (j, &pos) in others.iter().enumerate() {
            p[pos] = b + j;
        }
        p
    } else {
        (b..b + step.at).chain(0..b).chain(b + step.at..width).collect()
    };
    let dims = vec![d; width];
    let (placed, dims) = permute_subsystems(&out, &dims, &back)?;
    Ok(DensityMatrix::new_unchecked(placed.hermitian_part(), dims))
}
