//! Relative entropy of resource: min over free σ of D(ψ‖σ), over a finite set
//! or over the convex hull of finitely many extreme states.

use num_complex::Complex64;

use crate::linalg::{hermitian_eig, quantum_relative_entropy, ComplexMatrix, DensityMatrix, LinalgError, TAU_SUPP};

use super::MeasureError;

/// Default target for the Frank–Wolfe gap.
pub const DEFAULT_TARGET_RESIDUAL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 20_000;
const LINE_SEARCH_STEPS: usize = 60;

/// The free states a relative entropy is minimized over.
#[derive(Debug, Clone, PartialEq)]
pub enum FreeSpec {
    FiniteSet(Vec<DensityMatrix>),
    /// Convex hull of the listed extreme states.
    ConvexHull(Vec<DensityMatrix>),
}

impl FreeSpec {
    pub fn states(&self) -> &[DensityMatrix] {
        match self {
            FreeSpec::FiniteSet(s) | FreeSpec::ConvexHull(s) => s,
        }
    }
}

/// Step-size rule of the conditional-gradient solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Pairwise steps (weight moves from the worst active vertex to the best
    /// one) with exact line search.
    Pairwise,
    /// Classic Frank–Wolfe steps with exact line search.
    LineSearch,
    /// Classic Frank–Wolfe steps with γ = 2/(t+2).
    OpenLoop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub target_residual: f64,
    pub step: StepRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            target_residual: DEFAULT_TARGET_RESIDUAL,
            step: StepRule::Pairwise,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RerSolution {
    /// Value in bits.
    pub value: f64,
    /// Mixing weights over the free states (a unit vector for finite sets).
    pub weights: Vec<f64>,
    /// Index of the minimizing free state (finite sets only).
    pub argmin: Option<usize>,
    /// Frank–Wolfe gap at the returned weights; zero for finite sets.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn relative_entropy_of_resource(
    psi: &DensityMatrix,
    free: &FreeSpec,
    solver: &SolverConfig,
) -> Result<RerSolution, MeasureError> {
    let states = free.states();
    if states.is_empty() {
        return Err(MeasureError::EmptyFreeSet);
    }
    if let Some(bad) = states.iter().find(|s| s.dim() != psi.dim()) {
        return Err(MeasureError::Linalg(LinalgError::Shape(format!(
            "free state of dimension {} against a state of dimension {}",
            bad.dim(),
            psi.dim()
        ))));
    }
    match free {
        FreeSpec::FiniteSet(_) => finite_minimum(psi, states),
        FreeSpec::ConvexHull(_) if states.len() == 1 => finite_minimum(psi, states),
        FreeSpec::ConvexHull(_) => frank_wolfe(psi, states, solver),
    }
}

fn finite_minimum(psi: &DensityMatrix, states: &[DensityMatrix]) -> Result<RerSolution, MeasureError> {
    let mut best = (f64::INFINITY, 0);
    for (i, s) in states.iter().enumerate() {
        let d = quantum_relative_entropy(psi, s)?;
        if d < best.0 {
            best = (d, i);
        }
    }
    let mut weights = vec![0.0; states.len()];
    weights[best.1] = 1.0;
    Ok(RerSolution {
        value: best.0,
        weights,
        argmin: Some(best.1),
        residual: 0.0,
        iterations: 0,
        converged: true,
    })
}

/// ψ and the extremes rotated into the eigenbasis of one mixture.
struct Objective<'a> {
    psi: &'a DensityMatrix,
    extremes: &'a [DensityMatrix],
}

impl Objective<'_> {
    fn mixture(&self, weights: &[f64]) -> ComplexMatrix {
        let n = self.psi.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (w, s) in weights.iter().zip(self.extremes) {
            if *w != 0.0 {
                out = &out + &s.matrix().scale_real(*w);
            }
        }
        out.hermitian_part()
    }

    fn value(&self, weights: &[f64]) -> Result<f64, MeasureError> {
        let sigma = DensityMatrix::new_unchecked(self.mixture(weights), self.psi.subsystem_dims().to_vec());
        Ok(quantum_relative_entropy(self.psi, &sigma)?)
    }

    /// ∂/∂λᵢ D(ψ‖Σλφ) = −tr ψ Dlog₂[σ](φᵢ), or `None` when ψ leaves the
    /// support of σ.
    fn gradient(&self, weights: &[f64]) -> Result<Option<Vec<f64>>, MeasureError> {
        let e = hermitian_eig(&self.mixture(weights))?;
        let v = &e.vectors;
        let vh = v.adjoint();
        let psi_t = &(&vh * self.psi.matrix()) * v;
        let n = e.dim();
        let inside: Vec<bool> = e.values.iter().map(|&x| x > TAU_SUPP).collect();
        let outside_weight: f64 = (0..n).filter(|&a| !inside[a]).map(|a| psi_t[(a, a)].re).sum();
        if outside_weight > TAU_SUPP {
            return Ok(None);
        }
        // Loewner matrix of ln on the spectrum, restricted to the support.
        let mut loewner = vec![0.0; n * n];
        for a in (0..n).filter(|&a| inside[a]) {
            for b in (0..n).filter(|&b| inside[b]) {
                let (x, y) = (e.values[a], e.values[b]);
                loewner[a * n + b] = if (x - y).abs() <= 1e-12 * x.max(y) {
                    2.0 / (x + y)
                } else {
                    (x.ln() - y.ln()) / (x - y)
                };
            }
        }
        let scale = -1.0 / std::f64::consts::LN_2;
        let mut grad = Vec::with_capacity(self.extremes.len());
        for s in self.extremes {
            let phi_t = &(&vh * s.matrix()) * v;
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    let l = loewner[a * n + b];
                    if l != 0.0 {
                        acc += psi_t[(b, a)] * phi_t[(a, b)] * l;
                    }
                }
            }
            grad.push(scale * acc.re);
        }
        Ok(Some(grad))
    }
}

fn frank_wolfe(psi: &DensityMatrix, extremes: &[DensityMatrix], cfg: &SolverConfig) -> Result<RerSolution, MeasureError> {
    let obj = Objective { psi, extremes };
    let k = extremes.len();
    let mut weights = vec![1.0 / k as f64; k];
    let Some(mut grad) = obj.gradient(&weights)? else {
        // The barycenter has the largest support in the hull.
        return Ok(RerSolution {
            value: f64::INFINITY,
            weights,
            argmin: None,
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    };
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for t in 0..cfg.max_iters {
        let (best, _) = argmin(&grad);
        let inner: f64 = weights.iter().zip(&grad).map(|(w, g)| w * g).sum();
        residual = inner - grad[best];
        if residual <= cfg.target_residual {
            break;
        }
        iterations = t + 1;
        let (direction, gamma_max) = match cfg.step {
            StepRule::Pairwise => {
                let worst = (0..k)
                    .filter(|&i| weights[i] > 0.0)
                    .max_by(|&a, &b| grad[a].total_cmp(&grad[b]))
                    .expect("weights sum to one");
                let mut d = vec![0.0; k];
                d[best] += 1.0;
                d[worst] -= 1.0;
                (d, weights[worst])
            }
            StepRule::LineSearch | StepRule::OpenLoop => {
                let mut d: Vec<f64> = weights.iter().map(|w| -w).collect();
                d[best] += 1.0;
                (d, 1.0)
            }
        };
        let gamma = match cfg.step {
            StepRule::OpenLoop => 2.0 / (t as f64 + 2.0),
            _ => line_search(&obj, &weights, &direction, gamma_max)?,
        };
        let stepped: Vec<f64> = weights.iter().zip(&direction).map(|(w, d)| (w + gamma * d).max(0.0)).collect();
        let Some(g) = obj.gradient(&stepped)? else {
            // Open-loop steps can land on a vertex outside ψ's support; stay put.
            continue;
        };
        let total: f64 = stepped.iter().sum();
        weights = stepped.into_iter().map(|w| w / total).collect();
        grad = g;
    }
    Ok(RerSolution {
        value: obj.value(&weights)?,
        weights,
        argmin: None,
        residual,
        iterations,
        converged: residual <= cfg.target_residual,
    })
}

fn argmin(xs: &[f64]) -> (usize, f64) {
    xs.iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty")
}

/// Bisection on the directional derivative over [0, γmax].
fn line_search(obj: &Objective<'_>, weights: &[f64], direction: &[f64], gamma_max: f64) -> Result<f64, MeasureError> {
    let at = |g: f64| -> Vec<f64> { weights.iter().zip(direction).map(|(w, d)| (w + g * d).max(0.0)).collect() };
    let slope = |g: f64| -> Result<Option<f64>, MeasureError> {
        Ok(obj
            .gradient(&at(g))?
            .map(|grad| grad.iter().zip(direction).map(|(a, b)| a * b).sum()))
    };
    if let Some(s) = slope(gamma_max)? {
        if s <= 0.0 {
            return Ok(gamma_max);
        }
    }
    let (mut lo, mut hi) = (0.0, gamma_max);
    for _ in 0..LINE_SEARCH_STEPS {
        let mid = 0.5 * (lo + hi);
        match slope(mid)? {
            Some(s) if s < 0.0 => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(lo)
}

/// Every n-fold tensor product of the given states, in lexicographic order.
pub fn tensor_hull(extremes: &[DensityMatrix], n: usize) -> Vec<DensityMatrix> {
    let mut out = vec![DensityMatrix::scalar()];
    for _ in 0..n {
        out = out.iter().flat_map(|a| extremes.iter().map(move |b| a.tensor(b))).collect();
    }
    out
}

/// Per-copy relative entropies R_R(ψ^⊗n)/n for n = 1…n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedEstimate {
    pub per_copy: Vec<f64>,
    pub running_min: Vec<f64>,
    pub residuals: Vec<f64>,
    /// First (a, b) with R_R(ψ^(a+b)) > R_R(ψ^a) + R_R(ψ^b) beyond the solver
    /// tolerance.
    pub subadditivity_violation: Option<(usize, usize)>,
}

pub fn regularized_rer_estimate(
    psi: &DensityMatrix,
    free_per_n: impl Fn(usize) -> FreeSpec,
    n_max: usize,
    solver: &SolverConfig,
) -> Result<RegularizedEstimate, MeasureError> {
    let mut totals = Vec::with_capacity(n_max);
    let mut residuals = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let sol = relative_entropy_of_resource(&psi.tensor_power(n), &free_per_n(n), solver)?;
        totals.push(sol.value);
        residuals.push(sol.residual);
    }
    let per_copy: Vec<f64> = totals.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
    let mut running_min = Vec::with_capacity(n_max);
    let mut cur = f64::INFINITY;
    for &v in &per_copy {
        cur = cur.min(v);
        running_min.push(cur);
    }
    let mut subadditivity_violation = None;
    'outer: for a in 1..=n_max {
        for b in a..=n_max - a {
            let slack = residuals[a - 1] + residuals[b - 1] + residuals[a + b - 1] + 1e-9;
            if totals[a + b - 1] > totals[a - 1] + totals[b - 1] + slack {
                subadditivity_violation = Some((a, b));
                break 'outer;
            }
        }
    }
    Ok(RegularizedEstimate {
        per_copy,
        running_min,
        residuals,
        subadditivity_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::von_neumann_entropy;

    fn ket(amps: &[f64]) -> DensityMatrix {
        let v: Vec<Complex64> = amps.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        DensityMatrix::pure(&v, vec![amps.len()]).unwrap()
    }

    fn incoherent() -> Vec<DensityMatrix> {
        vec![DensityMatrix::basis(&[2], 0), DensityMatrix::basis(&[2], 1)]
    }

    /// Δ(ρ): the diagonal part, which for the dephased hull attains the minimum.
    fn dephased(rho: &DensityMatrix) -> DensityMatrix {
        let d: Vec<f64> = (0..rho.dim()).map(|i| rho.matrix()[(i, i)].re).collect();
        DensityMatrix::new(ComplexMatrix::diag_real(&d), rho.subsystem_dims().to_vec()).unwrap()
    }

    fn coherence_oracle(rho: &DensityMatrix) -> f64 {
        von_neumann_entropy(&dephased(rho)).unwrap() - von_neumann_entropy(rho).unwrap()
    }

    #[test]
    fn plus_state_has_one_bit_of_coherence() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ket(&[h, h]);
        let oracle = coherence_oracle(&plus);
        assert!((oracle - 1.0).abs() < 1e-12);
        let sol = relative_entropy_of_resource(&plus, &FreeSpec::ConvexHull(incoherent()), &SolverConfig::default()).unwrap();
        assert!((sol.value - oracle).abs() < 1e-4, "{sol:?}");
        assert!(sol.residual < 1e-6 && sol.converged);
    }

    #[test]
    fn boundary_optimum_converges_for_every_step_rule() {
        // |0⟩⊗ρ with ρ tilted: the optimum puts no weight on |1x⟩.
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let psi = DensityMatrix::basis(&[2], 0).tensor(&ket(&[c, s]));
        let hull = tensor_hull(&incoherent(), 2);
        let oracle = coherence_oracle(&psi);
        // Plain steps zigzag toward a face of the simplex; pairwise steps do not.
        for (step, tol) in [(StepRule::Pairwise, 1e-7), (StepRule::LineSearch, 1e-4)] {
            let cfg = SolverConfig { step, ..SolverConfig::default() };
            let sol = relative_entropy_of_resource(&psi, &FreeSpec::ConvexHull(hull.clone()), &cfg).unwrap();
            assert!((sol.value - oracle).abs() < tol, "{step:?}: {} vs {oracle}", sol.value);
        }
        let open = SolverConfig {
            step: StepRule::OpenLoop,
            max_iters: 2000,
            ..SolverConfig::default()
        };
        let sol = relative_entropy_of_resource(&psi, &FreeSpec::ConvexHull(hull), &open).unwrap();
        assert!(sol.value >= oracle - 1e-9 && sol.value - oracle < 1e-2);
    }

    #[test]
    fn finite_set_against_the_maximally_mixed_state() {
        let zero = DensityMatrix::basis(&[2], 0);
        let free = FreeSpec::FiniteSet(vec![DensityMatrix::maximally_mixed(vec![2])]);
        let sol = relative_entropy_of_resource(&zero, &free, &SolverConfig::default()).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert_eq!(sol.argmin, Some(0));
    }

    #[test]
    fn free_members_score_zero_and_outsiders_infinity() {
        let zero = DensityMatrix::basis(&[2], 0);
        let sol = relative_entropy_of_resource(&zero, &FreeSpec::ConvexHull(incoherent()), &SolverConfig::default()).unwrap();
        assert!(sol.value.abs() < 1e-6);
        let only_one = FreeSpec::ConvexHull(vec![DensityMatrix::basis(&[2], 1)]);
        let sol = relative_entropy_of_resource(&zero, &only_one, &SolverConfig::default()).unwrap();
        assert_eq!(sol.value, f64::INFINITY);
        assert!(matches!(
            relative_entropy_of_resource(&zero, &FreeSpec::FiniteSet(vec![]), &SolverConfig::default()),
            Err(MeasureError::EmptyFreeSet)
        ));
    }

    #[test]
    fn regularization_of_plus_is_flat() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ket(&[h, h]);
        let est = regularized_rer_estimate(
            &plus,
            |n| FreeSpec::ConvexHull(tensor_hull(&incoherent(), n)),
            2,
            &SolverConfig::default(),
        )
        .unwrap();
        for v in &est.per_copy {
            assert!((v - 1.0).abs() < 1e-4);
        }
        assert!(est.running_min.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(est.subadditivity_violation, None);
    }
}
