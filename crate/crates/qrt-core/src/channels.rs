//! Quantum channels in Kraus form and deterministic classical operations on
//! label tuples.

use num_complex::Complex64;

use crate::linalg::{hermitian_eig, trace_norm, ComplexMatrix, DensityMatrix, LinalgError};

/// Allowed trace-norm deviation of Σ K†K from the identity.
pub const TAU_CPTP: f64 = 1e-8;
/// Kraus operators below this Frobenius norm are dropped by [`KrausChannel::simplify`].
pub const TAU_KRAUS_DROP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("Kraus operator {index} is {rows}x{cols}, expected {dim_out}x{dim_in}")]
    Shape {
        index: usize,
        rows: usize,
        cols: usize,
        dim_in: usize,
        dim_out: usize,
    },
    #[error("channel `{label}` has no Kraus operators")]
    Empty { label: String },
    #[error("input has dimension {got}, channel expects {expected}")]
    InputDim { got: usize, expected: usize },
    #[error("cannot compose: earlier output {earlier_out} != later input {later_in}")]
    Compose { earlier_out: usize, later_in: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Outcome of a trace-preservation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    /// ‖Σ K†K − I‖₁
    pub deviation: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<ComplexMatrix>,
    pub label: String,
}

impl KrausChannel {
    pub fn new(label: impl Into<String>, dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Self {
        Self {
            dim_in,
            dim_out,
            kraus,
            label: label.into(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new("id", dim, dim, vec![ComplexMatrix::identity(dim)])
    }

    /// Full trace C^d → C, Kraus operators ⟨i|.
    pub fn trace(dim: usize) -> Self {
        let kraus = (0..dim)
            .map(|i| {
                let mut k = ComplexMatrix::zeros(1, dim);
                k[(0, i)] = Complex64::new(1.0, 0.0);
                k
            })
            .collect();
        Self::new("tr", dim, 1, kraus)
    }

    /// C → C^d preparing `state`; Kraus operators √λ|v⟩ from its spectrum.
    pub fn append(state: &DensityMatrix) -> Result<Self, ChannelError> {
        let e = hermitian_eig(state.matrix())?;
        let d = state.dim();
        let kraus = (0..d)
            .filter(|&k| e.values[k] > 1e-15)
            .map(|k| {
                let scale = e.values[k].sqrt();
                let v: Vec<Complex64> = e.vector(k).iter().map(|z| z * scale).collect();
                ComplexMatrix::column(&v)
            })
            .collect();
        Ok(Self::new("append", 1, d, kraus))
    }

    pub fn unitary(label: impl Into<String>, u: ComplexMatrix) -> Self {
        let d = u.rows();
        Self::new(label, u.cols(), d, vec![u])
    }

    fn check_shapes(&self) -> Result<(), ChannelError> {
        if self.kraus.is_empty() {
            return Err(ChannelError::Empty {
                label: self.label.clone(),
            });
        }
        for (index, k) in self.kraus.iter().enumerate() {
            if k.rows() != self.dim_out || k.cols() != self.dim_in {
                return Err(ChannelError::Shape {
                    index,
                    rows: k.rows(),
                    cols: k.cols(),
                    dim_in: self.dim_in,
                    dim_out: self.dim_out,
                });
            }
        }
        Ok(())
    }

    /// Checks Σ K†K = I within [`TAU_CPTP`]; the report carries the deviation.
    pub fn validate_cptp(&self) -> Result<CptpReport, ChannelError> {
        self.check_shapes()?;
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let deviation = trace_norm(&(&sum - &ComplexMatrix::identity(self.dim_in)))?;
        Ok(CptpReport {
            deviation,
            passes: deviation <= TAU_CPTP,
        })
    }

    /// Σ K ρ K† on a raw matrix.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if rho.rows() != self.dim_in || !rho.is_square() {
            return Err(ChannelError::InputDim {
                got: rho.rows(),
                expected: self.dim_in,
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &k.sandwich(rho);
        }
        Ok(out)
    }

    /// Applies the channel to a state. The output is a single subsystem of
    /// dimension `dim_out` unless `out_dims` says otherwise.
    pub fn apply(&self, rho: &DensityMatrix, out_dims: Option<Vec<usize>>) -> Result<DensityMatrix, ChannelError> {
        let m = self.apply_matrix(rho.matrix())?;
        let dims = out_dims.unwrap_or_else(|| if self.dim_out == 1 { Vec::new() } else { vec![self.dim_out] });
        Ok(DensityMatrix::new_unchecked(m.hermitian_part(), dims))
    }

    /// Drops Kraus operators with negligible norm, keeping at least one.
    pub fn simplify(&self) -> Self {
        let mut kept: Vec<ComplexMatrix> = self
            .kraus
            .iter()
            .filter(|k| k.frobenius_norm() >= TAU_KRAUS_DROP)
            .cloned()
            .collect();
        if kept.is_empty() {
            kept.push(ComplexMatrix::zeros(self.dim_out, self.dim_in));
        }
        Self {
            kraus: kept,
            ..self.clone()
        }
    }
}

/// `later ∘ earlier` with Kraus family {L·E}.
pub fn compose(later: &KrausChannel, earlier: &KrausChannel) -> Result<KrausChannel, ChannelError> {
    if earlier.dim_out != later.dim_in {
        return Err(ChannelError::Compose {
            earlier_out: earlier.dim_out,
            later_in: later.dim_in,
        });
    }
    let mut kraus = Vec::with_capacity(later.kraus.len() * earlier.kraus.len());
    for l in &later.kraus {
        for e in &earlier.kraus {
            kraus.push(l * e);
        }
    }
    Ok(KrausChannel::new(
        format!("{}∘{}", later.label, earlier.label),
        earlier.dim_in,
        later.dim_out,
        kraus,
    )
    .simplify())
}

/// `a ⊗ b` with Kraus family {Kᵃ ⊗ Kᵇ}.
pub fn tensor(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(ka.kron(kb));
        }
    }
    KrausChannel::new(
        format!("{}⊗{}", a.label, b.label),
        a.dim_in * b.dim_in,
        a.dim_out * b.dim_out,
        kraus,
    )
}

/// A deterministic map from `arity_in`-tuples to `arity_out`-tuples over an
/// alphabet of `alphabet_size` symbols. The table is indexed by the base-b
/// big-endian code of the input tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteOperation {
    pub name: String,
    pub alphabet_size: usize,
    pub arity_in: usize,
    pub arity_out: usize,
    table: Vec<Vec<u8>>,
}

impl DiscreteOperation {
    /// Tabulates `f` on every input tuple; `f` must return tuples of length `arity_out`.
    pub fn from_fn(
        name: impl Into<String>,
        alphabet_size: usize,
        arity_in: usize,
        arity_out: usize,
        f: impl Fn(&[u8]) -> Vec<u8>,
    ) -> Self {
        let rows = alphabet_size.pow(arity_in as u32);
        let table = (0..rows)
            .map(|code| {
                let out = f(&decode(code, arity_in, alphabet_size));
                assert_eq!(out.len(), arity_out, "discrete action returned a tuple of the wrong arity");
                out
            })
            .collect();
        Self {
            name: name.into(),
            alphabet_size,
            arity_in,
            arity_out,
            table,
        }
    }

    /// Builds from an explicit table in input-code order.
    pub fn from_table(
        name: impl Into<String>,
        alphabet_size: usize,
        arity_in: usize,
        arity_out: usize,
        table: Vec<Vec<u8>>,
    ) -> Option<Self> {
        let rows = alphabet_size.pow(arity_in as u32);
        let well_formed = table.len() == rows
            && table
                .iter()
                .all(|t| t.len() == arity_out && t.iter().all(|&s| (s as usize) < alphabet_size));
        well_formed.then(|| Self {
            name: name.into(),
            alphabet_size,
            arity_in,
            arity_out,
            table,
        })
    }

    pub fn identity(alphabet_size: usize) -> Self {
        Self::from_fn("id", alphabet_size, 1, 1, |x| x.to_vec())
    }

    pub fn trace(alphabet_size: usize) -> Self {
        Self::from_fn("tr", alphabet_size, 1, 0, |_| Vec::new())
    }

    pub fn append(alphabet_size: usize, symbol: u8) -> Self {
        Self::from_fn("append", alphabet_size, 0, 1, move |_| vec![symbol])
    }

    pub fn table(&self) -> &[Vec<u8>] {
        &self.table
    }

    pub fn apply(&self, input: &[u8]) -> &[u8] {
        debug_assert_eq!(input.len(), self.arity_in);
        &self.table[encode(input, self.alphabet_size)]
    }

    pub fn compose(later: &Self, earlier: &Self) -> Option<Self> {
        (earlier.arity_out == later.arity_in && earlier.alphabet_size == later.alphabet_size).then(|| {
            Self::from_fn(
                format!("{}∘{}", later.name, earlier.name),
                earlier.alphabet_size,
                earlier.arity_in,
                later.arity_out,
                |x| later.apply(earlier.apply(x)).to_vec(),
            )
        })
    }

    pub fn tensor(a: &Self, b: &Self) -> Option<Self> {
        (a.alphabet_size == b.alphabet_size).then(|| {
            Self::from_fn(
                format!("{}⊗{}", a.name, b.name),
                a.alphabet_size,
                a.arity_in + b.arity_in,
                a.arity_out + b.arity_out,
                |x| {
                    let mut out = a.apply(&x[..a.arity_in]).to_vec();
                    out.extend_from_slice(b.apply(&x[a.arity_in..]));
                    out
                },
            )
        })
    }
}

fn encode(tuple: &[u8], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &s| acc * base + s as usize)
}

fn decode(mut code: usize, len: usize, base: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for slot in out.iter_mut().rev() {
        *slot = (code % base) as u8;
        code /= base;
    }
    out
}
