//! CPTP maps as ordered Kraus families.
//!
//! The order of the Kraus list fixes the environment basis: the Stinespring
//! isometry is `V = Σ_i K_i ⊗ |i⟩_E` (output first, environment second) and
//! the complementary channel has Kraus operators `(⟨b| ⊗ I)V`, one per output
//! basis vector `b`.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linmath::random::random_isometry;
use crate::linmath::{
    herm_eigvals, partial_trace, trace_distance, ComplexMatrix, DensityState,
    Subsystem, C64, ZERO,
};

/// Trace-preservation and Choi-positivity tolerance.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Largest input or output dimension produced by tensor products.
pub const DIM_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

/// `J(Φ) = (id ⊗ Φ)(|φ⁺⟩⟨φ⁺|)`, input factor first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoiMatrix {
    pub dim_in: usize,
    pub dim_out: usize,
    pub mat: ComplexMatrix,
}

/// Deviations found by [`KrausChannel::validity`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Validity {
    /// max |Σ K†K − I| entrywise
    pub tp_defect: f64,
    /// smallest Choi eigenvalue
    pub choi_min_eigenvalue: f64,
}

impl Validity {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.tp_defect <= tol && self.choi_min_eigenvalue >= -tol
    }
}

impl KrausChannel {
    /// Build and validate (trace preservation within [`CHANNEL_TOL`]).
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_parts(dim_in, dim_out, kraus)?;
        let defect = ch.tp_defect();
        if defect > CHANNEL_TOL {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from identity by {defect:e}"
            )));
        }
        Ok(ch)
    }

    /// Shape checks only; the caller guarantees trace preservation.
    pub(crate) fn from_parts(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidChannel("dimensions must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus list".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::dims(format!(
                    "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(d)).expect("identity is unitary")
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::dims("unitary channel needs a square matrix"));
        }
        let d = u.rows();
        Self::new(d, d, vec![u])
    }

    /// `ρ ↦ Tr(ρ)` onto a one-dimensional output.
    pub fn trace_out(d: usize) -> Self {
        let kraus = (0..d)
            .map(|a| ComplexMatrix::from_fn(1, d, |_, j| if j == a { C64::new(1.0, 0.0) } else { ZERO }))
            .collect();
        Self {
            dim_in: d,
            dim_out: 1,
            kraus,
        }
    }

    /// `ρ ↦ Tr(ρ) |ψ⟩⟨ψ|`
    pub fn prepare(dim_in: usize, psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > CHANNEL_TOL {
            return Err(Error::InvalidState("prepared vector is not normalized".into()));
        }
        let d = psi.len();
        let kraus = (0..dim_in)
            .map(|a| ComplexMatrix::from_fn(d, dim_in, |o, j| if j == a { psi[o] } else { ZERO }))
            .collect();
        Self::new(dim_in, d, kraus)
    }

    /// Amplitude damping with damping probability `eta`:
    /// `A₀ = diag(1, √(1−η))`, `A₁ = √η |0⟩⟨1|`.
    pub fn amplitude_damping(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::ParameterRange(format!(
                "amplitude damping parameter {eta} outside [0, 1]"
            )));
        }
        let a0 = ComplexMatrix::from_real_diag(&[1.0, (1.0 - eta).sqrt()]);
        let a1 = ComplexMatrix::from_real_rows(&[&[0.0, eta.sqrt()], &[0.0, 0.0]]);
        Ok(Self {
            dim_in: 2,
            dim_out: 2,
            kraus: vec![a0, a1],
        })
    }

    /// Random channel whose Stinespring isometry is Haar distributed.
    /// Needs `dim_out · num_kraus ≥ dim_in`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim_in: usize, dim_out: usize, num_kraus: usize) -> Result<Self> {
        if dim_out * num_kraus < dim_in {
            return Err(Error::ParameterRange(format!(
                "{num_kraus} Kraus operators cannot carry dimension {dim_in} into {dim_out}"
            )));
        }
        let v = random_isometry(rng, dim_out * num_kraus, dim_in);
        let kraus = (0..num_kraus)
            .map(|i| ComplexMatrix::from_fn(dim_out, dim_in, |o, a| v[(o * num_kraus + i, a)]))
            .collect();
        Self::from_parts(dim_in, dim_out, kraus)
    }

    /// Completely dephasing channel with Kraus operators `|a⟩⟨a|`.
    pub fn dephasing(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus: (0..d).map(|a| ComplexMatrix::unit(d, a, a)).collect(),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn tp_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            sum = &sum + &k.dagger().mul_unchecked(k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    pub fn validity(&self) -> Result<Validity> {
        let vals = herm_eigvals(&self.choi().mat)?;
        Ok(Validity {
            tp_defect: self.tp_defect(),
            choi_min_eigenvalue: vals.last().copied().unwrap_or(0.0),
        })
    }

    /// `Σ K ρ K†` on a raw matrix.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !rho.is_square() || rho.rows() != self.dim_in {
            return Err(Error::dims(format!(
                "channel input dimension {} but state is {}x{}",
                self.dim_in,
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            let kr = k.mul_unchecked(rho);
            out = &out + &kr.mul_unchecked(&k.dagger());
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityState) -> Result<DensityState> {
        let out = self.apply_matrix(rho.matrix())?;
        Ok(DensityState::from_matrix_unchecked(out.hermitian_part()))
    }

    pub fn choi(&self) -> ChoiMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let n = din * dout;
        let norm = 1.0 / din as f64;
        let mut mat = ComplexMatrix::zeros(n, n);
        // |K⟩⟩ = (I ⊗ K)|φ⁺⟩ has entry K[o, a]/√d at index a*dout + o.
        for k in &self.kraus {
            let vec: Vec<C64> = (0..n).map(|idx| k[(idx % dout, idx / dout)]).collect();
            for (r, &vr) in vec.iter().enumerate() {
                if vr == ZERO {
                    continue;
                }
                for (c, &vc) in vec.iter().enumerate() {
                    mat[(r, c)] += vr * vc.conj() * norm;
                }
            }
        }
        ChoiMatrix {
            dim_in: din,
            dim_out: dout,
            mat,
        }
    }

    /// `V = Σ_i K_i ⊗ |i⟩`, a `(dim_out·|kraus|) × dim_in` isometry.
    pub fn stinespring(&self) -> ComplexMatrix {
        let nk = self.kraus.len();
        ComplexMatrix::from_fn(self.dim_out * nk, self.dim_in, |row, a| {
            self.kraus[row % nk][(row / nk, a)]
        })
    }

    /// Complementary channel onto the `|kraus|`-dimensional environment.
    pub fn complement(&self) -> KrausChannel {
        let nk = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|b| ComplexMatrix::from_fn(nk, self.dim_in, |i, a| self.kraus[i][(b, a)]))
            .collect();
        KrausChannel {
            dim_in: self.dim_in,
            dim_out: nk,
            kraus,
        }
    }

    /// Append zero Kraus operators up to `n`.
    pub fn pad_kraus(&self, n: usize) -> KrausChannel {
        let mut kraus = self.kraus.clone();
        while kraus.len() < n {
            kraus.push(ComplexMatrix::zeros(self.dim_out, self.dim_in));
        }
        KrausChannel {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus,
        }
    }

    /// Embed the output isometrically into a `d`-dimensional space (zero rows appended).
    pub fn pad_output(&self, d: usize) -> KrausChannel {
        assert!(d >= self.dim_out);
        KrausChannel {
            dim_in: self.dim_in,
            dim_out: d,
            kraus: self.kraus.iter().map(|k| k.pad_to(d, self.dim_in)).collect(),
        }
    }
}

/// `a ∘ b`: apply `b` first. Kraus operators `A_i B_j` in lexicographic `(i, j)` order.
pub fn compose(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    if a.dim_in != b.dim_out {
        return Err(Error::dims(format!(
            "cannot compose: outer input {} vs inner output {}",
            a.dim_in, b.dim_out
        )));
    }
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(ka.mul_unchecked(kb));
        }
    }
    KrausChannel::from_parts(b.dim_in, a.dim_out, kraus)
}

/// `a ⊗ b` with Kraus operators `A_i ⊗ B_j` in lexicographic order.
pub fn tensor(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    let (din, dout) = (a.dim_in * b.dim_in, a.dim_out * b.dim_out);
    if din > DIM_CAP || dout > DIM_CAP {
        return Err(Error::DimensionCap(format!(
            "tensor product has dimensions {din} -> {dout}, cap is {DIM_CAP}"
        )));
    }
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(ka.kron(kb));
        }
    }
    KrausChannel::from_parts(din, dout, kraus)
}

/// `ch^{⊗n}` for `n ∈ {1, 2}`.
pub fn tensor_power(ch: &KrausChannel, n: usize) -> Result<KrausChannel> {
    match n {
        1 => Ok(ch.clone()),
        2 => tensor(ch, ch),
        _ => Err(Error::ParameterRange(format!(
            "tensor power {n} not supported (1 or 2)"
        ))),
    }
}

impl ChoiMatrix {
    /// `Φ(ρ) = d · Tr_in[(ρᵀ ⊗ I) J]`
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !rho.is_square() || rho.rows() != self.dim_in {
            return Err(Error::dims("state does not match Choi input dimension"));
        }
        let lifted = rho.transpose().kron(&ComplexMatrix::identity(self.dim_out));
        let prod = lifted.matmul(&self.mat)?;
        Ok(partial_trace(&prod, (self.dim_in, self.dim_out), Subsystem::B)?
            .scale_real(self.dim_in as f64))
    }

    /// Marginal on the input factor (`ω_in` for trace-preserving maps).
    pub fn input_marginal(&self) -> ComplexMatrix {
        partial_trace(&self.mat, (self.dim_in, self.dim_out), Subsystem::A)
            .expect("Choi dims are consistent")
    }
}

/// Trace distance between normalized Choi states.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim_in != b.dim_in || a.dim_out != b.dim_out {
        return Err(Error::dims(format!(
            "channels {}->{} and {}->{} are not comparable",
            a.dim_in, a.dim_out, b.dim_in, b.dim_out
        )));
    }
    trace_distance(&a.choi().mat, &b.choi().mat)
}

/// Channel equality up to representation: Choi distance at most `tol`.
pub fn channels_equal(a: &KrausChannel, b: &KrausChannel, tol: f64) -> Result<bool> {
    Ok(choi_distance(a, b)? <= tol)
}

/// Choi distance between `d ∘ ch` and `chᶜ`, padding the smaller output space.
pub fn degrading_distance(ch: &KrausChannel, d: &KrausChannel) -> Result<f64> {
    if d.dim_in != ch.dim_out {
        return Err(Error::dims(format!(
            "degrading map input {} does not match channel output {}",
            d.dim_in, ch.dim_out
        )));
    }
    let simulated = compose(d, ch)?;
    let env = ch.complement();
    let target = simulated.dim_out.max(env.dim_out);
    choi_distance(&simulated.pad_output(target), &env.pad_output(target))
}

/// True iff `d ∘ ch` equals `chᶜ` within `tol` in Choi distance.
pub fn verify_degrading_map(ch: &KrausChannel, d: &KrausChannel, tol: f64) -> Result<bool> {
    Ok(degrading_distance(ch, d)? <= tol)
}

/// Analytic degrading map of `AD(η)` for `η < 1/2`: `AD((1−2η)/(1−η))`.
pub fn amplitude_damping_degrader(eta: f64) -> Result<KrausChannel> {
    if !(0.0..0.5).contains(&eta) {
        return Err(Error::ParameterRange(format!(
            "AD({eta}) has no analytic degrading map outside [0, 1/2)"
        )));
    }
    KrausChannel::amplitude_damping((1.0 - 2.0 * eta) / (1.0 - eta))
}

/// Analytic anti-degrading map of `AD(η)` for `η ≥ 1/2`: `AD((2η−1)/η)` applied to the complement.
pub fn amplitude_damping_antidegrader(eta: f64) -> Result<KrausChannel> {
    if !(0.5..=1.0).contains(&eta) {
        return Err(Error::ParameterRange(format!(
            "AD({eta}) has no analytic anti-degrading map outside [1/2, 1]"
        )));
    }
    KrausChannel::amplitude_damping((2.0 * eta - 1.0) / eta)
}

/// If `ch` is an amplitude damping channel, its parameter.
pub fn amplitude_damping_parameter(ch: &KrausChannel) -> Option<f64> {
    if ch.dim_in != 2 || ch.dim_out != 2 {
        return None;
    }
    let out = ch.apply_matrix(&ComplexMatrix::unit(2, 1, 1)).ok()?;
    let eta = out[(0, 0)].re.clamp(0.0, 1.0);
    let reference = KrausChannel::amplitude_damping(eta).ok()?;
    match choi_distance(ch, &reference) {
        Ok(d) if d <= CHANNEL_TOL => Some(eta),
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Serialize for KrausChannel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.kraus.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KrausChannel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = ChannelJson::deserialize(deserializer)?;
        KrausChannel::new(raw.dim_in, raw.dim_out, raw.kraus).map_err(serde::de::Error::custom)
    }
}
