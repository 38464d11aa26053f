//! The experimental measurement chain, emulated end to end.
//!
//! Each basis state fluoresces at its own photoluminescence rate; a
//! measurement runs a post-rotation sequence, collects a shot-noisy PL
//! signal, and a linear reconstruction over four diagonal sequences recovers
//! the diagonal Pauli expectations. Two interferometric sequence pairs
//! recover the XX±YY coherences. A symmetric per-qubit misassignment
//! probability models readout error before the PL conversion.
//!
//! Every sampled quantity draws from its own deterministically derived RNG
//! stream, so parallel and serial evaluation of one energy estimate produce
//! identical output for a given master seed.

use crate::ansatz::{self, Axis, GateSpec};
use crate::dynamics::{self, DynamicsError, HardwareParams, NoiseModel};
use crate::qcore::{
    C64, DensityMatrix, PauliOp, PauliSum, QcoreError, Qubit, QubitMapping, StateVector,
};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReadoutError {
    #[error("PL rate {index} must be positive, got {value}")]
    NonPositiveRate { index: usize, value: f64 },
    #[error("sequence matrix is ill-conditioned (condition number {0:.3e} ≥ 1e6)")]
    IllConditioned(f64),
    #[error("sequence matrix is singular, reconstruction failed")]
    SingularRates,
    #[error("readout error probability must lie in [0, 0.5), got {0}")]
    InvalidEpsilon(f64),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("XX±YY normalization failed: reference rates n1 = {n1} and n4 = {n4} coincide")]
    NormalizationFailure { n1: f64, n4: f64 },
    #[error("XX±YY calibration failed for the {branch:?} branch: {reason}")]
    CalibrationFailure { branch: XxyyBranch, reason: String },
    #[error("Hamiltonian term {0} is not covered by the measured Pauli set")]
    UncoveredTerm(String),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Photoluminescence rates per physical state, counts per sequence
/// repetition, indexed 1..4 = (|0,+1⟩, |0,0⟩, |−1,+1⟩, |−1,0⟩).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlRates {
    pub counts: [f64; 4],
}

impl Default for PlRates {
    fn default() -> Self {
        // Illustrative normalized counts, distinct and comfortably
        // invertible; acceptance-relevant results are rate-invariant.
        PlRates {
            counts: [1.00, 0.92, 0.78, 0.70],
        }
    }
}

impl PlRates {
    pub fn new(counts: [f64; 4]) -> Result<Self, ReadoutError> {
        let rates = PlRates { counts };
        rates.validate()?;
        Ok(rates)
    }

    pub fn validate(&self) -> Result<(), ReadoutError> {
        for (i, &value) in self.counts.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ReadoutError::NonPositiveRate {
                    index: i + 1,
                    value,
                });
            }
        }
        let cond = self
            .condition_number()
            .ok_or(ReadoutError::SingularRates)?;
        if cond >= 1e6 {
            return Err(ReadoutError::IllConditioned(cond));
        }
        Ok(())
    }

    /// The 4x4 map from physical populations to the four diagonal-sequence
    /// signals: each row is the rate vector permuted by that sequence's
    /// population swaps.
    pub fn sequence_matrix(&self) -> [[f64; 4]; 4] {
        let [n1, n2, n3, n4] = self.counts;
        [
            [n1, n2, n3, n4], // plain
            [n3, n2, n1, n4], // π on |0,+1⟩ ↔ |−1,+1⟩
            [n1, n2, n4, n3], // π on |−1,+1⟩ ↔ |−1,0⟩
            [n3, n4, n1, n2], // hard π on both electron lines
        ]
    }

    /// Infinity-norm condition number of the sequence matrix.
    pub fn condition_number(&self) -> Option<f64> {
        let m = self.sequence_matrix();
        let inv = invert4(&m)?;
        Some(inf_norm(&m) * inf_norm(&inv))
    }
}

/// The eight measurement sequences of one energy estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    Plain,
    Pi13,
    Pi34,
    Pi,
    XxyyPlusYPlus,
    XxyyPlusYMinus,
    XxyyMinusYPlus,
    XxyyMinusYMinus,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 8] = [
        SequenceKind::Plain,
        SequenceKind::Pi13,
        SequenceKind::Pi34,
        SequenceKind::Pi,
        SequenceKind::XxyyPlusYPlus,
        SequenceKind::XxyyPlusYMinus,
        SequenceKind::XxyyMinusYPlus,
        SequenceKind::XxyyMinusYMinus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SequenceKind::Plain => "plain",
            SequenceKind::Pi13 => "pi13",
            SequenceKind::Pi34 => "pi34",
            SequenceKind::Pi => "PI",
            SequenceKind::XxyyPlusYPlus => "xxyy_plus_y+",
            SequenceKind::XxyyPlusYMinus => "xxyy_plus_y-",
            SequenceKind::XxyyMinusYPlus => "xxyy_minus_y+",
            SequenceKind::XxyyMinusYMinus => "xxyy_minus_y-",
        }
    }

    /// Post-rotation gates of the sequence, applied in order after state
    /// preparation.
    ///
    /// The diagonal sequences are the π-pulse population permutations. The
    /// XX±YY pairs sandwich a ±y rf half rotation between two π pulses on
    /// one electron hyperfine line: flipping the m_I = 0 line moves the
    /// flip-flop coherence |01⟩↔|10⟩ onto the rf transition (XX+YY), while
    /// flipping the m_I = +1 line moves the double-flip coherence |00⟩↔|11⟩
    /// there (XX−YY).
    pub fn gates(&self) -> Vec<GateSpec> {
        let pi13 = GateSpec::conditioned(Qubit::Electron, Axis::Y, PI, 0);
        let pi24 = GateSpec::conditioned(Qubit::Electron, Axis::Y, PI, 1);
        let rf = |sign: f64| GateSpec::conditioned(Qubit::Nuclear, Axis::Y, sign * FRAC_PI_2, 1);
        match self {
            SequenceKind::Plain => vec![],
            SequenceKind::Pi13 => vec![pi13],
            SequenceKind::Pi34 => vec![GateSpec::conditioned(Qubit::Nuclear, Axis::Y, PI, 1)],
            SequenceKind::Pi => vec![GateSpec::unconditional(Qubit::Electron, Axis::Y, PI)],
            SequenceKind::XxyyPlusYPlus => vec![pi24, rf(1.0), pi24],
            SequenceKind::XxyyPlusYMinus => vec![pi24, rf(-1.0), pi24],
            SequenceKind::XxyyMinusYPlus => vec![pi13, rf(1.0), pi13],
            SequenceKind::XxyyMinusYMinus => vec![pi13, rf(-1.0), pi13],
        }
    }
}

/// The two coherence measurement branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XxyyBranch {
    Plus,
    Minus,
}

impl XxyyBranch {
    fn sequences(&self) -> (SequenceKind, SequenceKind) {
        match self {
            XxyyBranch::Plus => (SequenceKind::XxyyPlusYPlus, SequenceKind::XxyyPlusYMinus),
            XxyyBranch::Minus => (SequenceKind::XxyyMinusYPlus, SequenceKind::XxyyMinusYMinus),
        }
    }
}

/// Per-qubit symmetric misassignment probability applied to populations
/// before PL conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutErrorModel {
    pub epsilon: f64,
}

impl ReadoutErrorModel {
    pub fn new(epsilon: f64) -> Result<Self, ReadoutError> {
        let model = ReadoutErrorModel { epsilon };
        model.validate()?;
        Ok(model)
    }

    pub fn none() -> Self {
        ReadoutErrorModel { epsilon: 0.0 }
    }

    pub fn validate(&self) -> Result<(), ReadoutError> {
        if !(0.0..0.5).contains(&self.epsilon) {
            return Err(ReadoutError::InvalidEpsilon(self.epsilon));
        }
        Ok(())
    }

    /// Apply the per-qubit confusion map to a physical-order population
    /// vector. With ε = 0 the input is returned untouched (bitwise).
    pub fn apply(&self, populations: [f64; 4]) -> [f64; 4] {
        if self.epsilon == 0.0 {
            return populations;
        }
        let eps = self.epsilon;
        let comp = QubitMapping::populations_to_computational(populations);
        let c2 = |same: bool| if same { 1.0 - eps } else { eps };
        let mut noisy = [0.0; 4];
        for (i, n) in noisy.iter_mut().enumerate() {
            for (j, p) in comp.iter().enumerate() {
                *n += c2(i / 2 == j / 2) * c2(i % 2 == j % 2) * p;
            }
        }
        QubitMapping::populations_to_physical(noisy)
    }
}

/// How sampled signals are drawn from their expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotNoise {
    /// Poisson photon statistics on the total count (the physical model).
    Poisson,
    /// White noise of matching magnitude, for procedure replication.
    Gaussian,
    /// No sampling: the expectation itself (the infinite-trials limit).
    Infinite,
}

/// How the XX±YY normalizer n1 − n4 is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Use the configured rates directly (calibration mode).
    Fixed,
    /// Re-measure the two reference states with shot noise per estimate.
    Remeasured,
}

/// One sequence-level outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub kind: SequenceKind,
    pub expected_signal: f64,
    pub sampled_signal: f64,
    pub trials: u64,
    pub seed: u64,
}

/// The Pauli expectations one energy estimate produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliEstimates {
    pub ii: f64,
    pub iz: f64,
    pub zi: f64,
    pub zz: f64,
    pub xx_plus_yy: f64,
    pub xx_minus_yy: f64,
}

impl PauliEstimates {
    pub fn xx(&self) -> f64 {
        (self.xx_plus_yy + self.xx_minus_yy) / 2.0
    }
}

/// Calibration factors fixing the implicit proportionality of the two
/// XX±YY estimators: each branch returns exactly 2 on its Bell state in the
/// noiseless ideal-post-rotation mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XxyyCalibration {
    pub plus: f64,
    pub minus: f64,
}

impl XxyyCalibration {
    pub fn factor(&self, branch: XxyyBranch) -> f64 {
        match branch {
            XxyyBranch::Plus => self.plus,
            XxyyBranch::Minus => self.minus,
        }
    }
}

fn inf_norm(m: &[[f64; 4]; 4]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Gauss-Jordan inverse with partial pivoting; `None` on singular input.
fn invert4(m: &[[f64; 4]; 4]) -> Option<[[f64; 4]; 4]> {
    let mut a = *m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let pivot_row = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot_row][col].abs() < 1e-12 * inf_norm(m).max(1.0) {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for k in 0..4 {
            a[col][k] /= pivot;
            inv[col][k] /= pivot;
        }
        for row in 0..4 {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..4 {
                a[row][k] -= factor * a[col][k];
                inv[row][k] -= factor * inv[col][k];
            }
        }
    }
    Some(inv)
}

fn mat_vec4(m: &[[f64; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

/// Populations in physical order after a sequence's ideal post-rotations.
pub fn sequence_populations(rho: &DensityMatrix, kind: SequenceKind) -> [f64; 4] {
    let mut state = *rho;
    for gate in kind.gates() {
        state = state.evolved_by(&ansatz::gate_unitary(&gate));
    }
    QubitMapping::populations_to_physical(state.populations())
}

/// Populations after pulse-emulated post-rotations: the sequence gates are
/// compiled to pulses and integrated under the full noise model.
pub fn sequence_populations_pulsed(
    rho: &DensityMatrix,
    kind: SequenceKind,
    hw: &HardwareParams,
    noise: &NoiseModel,
) -> Result<[f64; 4], ReadoutError> {
    let gates = kind.gates();
    let schedule = dynamics::compile(&gates, hw);
    let pure_readout = NoiseModel {
        p_init: 0.0,
        ..noise.clone()
    };
    let out = dynamics::simulate_schedule(rho, &schedule, hw, &pure_readout)?;
    Ok(QubitMapping::populations_to_physical(out.populations()))
}

/// Expected PL signal: confusion-mapped populations dotted with the rates.
pub fn expected_pl(populations: [f64; 4], rates: &PlRates, err: &ReadoutErrorModel) -> f64 {
    debug_assert!(
        (populations.iter().sum::<f64>() - 1.0).abs() < 1e-9,
        "populations must sum to 1"
    );
    let noisy = err.apply(populations);
    noisy
        .iter()
        .zip(rates.counts.iter())
        .map(|(p, n)| p * n)
        .sum()
}

/// Draw a sampled signal: the mean of `trials` repetitions whose total
/// follows the configured photon statistic.
pub fn sample_signal(expected: f64, trials: u64, mode: ShotNoise, rng: &mut ChaCha12Rng) -> f64 {
    debug_assert!(expected >= 0.0);
    match mode {
        ShotNoise::Infinite => expected,
        ShotNoise::Poisson => {
            let lambda = expected * trials as f64;
            if lambda <= 0.0 {
                return 0.0;
            }
            let total = Poisson::new(lambda)
                .expect("positive finite lambda")
                .sample(rng);
            total / trials as f64
        }
        ShotNoise::Gaussian => {
            if expected == 0.0 {
                return 0.0;
            }
            let std = (expected / trials as f64).sqrt();
            let value = Normal::new(expected, std)
                .expect("finite parameters")
                .sample(rng);
            value.max(0.0)
        }
    }
}

/// Diagonal Pauli estimates recovered from the four diagonal-sequence
/// signals: solve the sequence matrix for the populations, then apply the
/// sign table derived from the qubit mapping.
pub fn reconstruct_diagonal(
    signals: [f64; 4],
    rates: &PlRates,
) -> Result<PauliEstimates, ReadoutError> {
    let inv = invert4(&rates.sequence_matrix()).ok_or(ReadoutError::SingularRates)?;
    let populations = mat_vec4(&inv, &signals);

    let mut diag = [0.0; 4];
    let labels = [
        [PauliOp::I, PauliOp::I],
        [PauliOp::I, PauliOp::Z],
        [PauliOp::Z, PauliOp::I],
        [PauliOp::Z, PauliOp::Z],
    ];
    for (slot, ops) in diag.iter_mut().zip(labels.iter()) {
        let signs = QubitMapping::diagonal_signs(*ops).expect("I/Z strings are diagonal");
        *slot = signs
            .iter()
            .zip(populations.iter())
            .map(|(s, p)| s * p)
            .sum();
    }
    Ok(PauliEstimates {
        ii: diag[0],
        iz: diag[1],
        zi: diag[2],
        zz: diag[3],
        xx_plus_yy: 0.0,
        xx_minus_yy: 0.0,
    })
}

/// Fix the calibration factor of each XX±YY branch so the noiseless
/// estimator returns exactly 2 on the branch's Bell state.
pub fn calibrate_xxyy(rates: &PlRates) -> Result<XxyyCalibration, ReadoutError> {
    let [n1, _, _, n4] = rates.counts;
    if (n1 - n4).abs() < 1e-12 {
        return Err(ReadoutError::NormalizationFailure { n1, n4 });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = C64::new(0.0, 0.0);
    let amp = C64::new(s, 0.0);
    let bell_minus = StateVector::new([amp, zero, zero, amp]).unwrap();
    let bell_plus = StateVector::new([zero, amp, amp, zero]).unwrap();

    let mut factors = [0.0; 2];
    for (slot, (branch, bell)) in factors.iter_mut().zip([
        (XxyyBranch::Plus, bell_plus),
        (XxyyBranch::Minus, bell_minus),
    ]) {
        let raw = raw_xxyy(
            &bell.to_density(),
            branch,
            rates,
            &ReadoutErrorModel::none(),
        )?;
        if raw.abs() < 1e-12 {
            return Err(ReadoutError::CalibrationFailure {
                branch,
                reason: "the Bell-state signal difference vanished; these rates cannot \
                         resolve the coherence"
                    .to_string(),
            });
        }
        *slot = 2.0 / raw;
    }
    Ok(XxyyCalibration {
        plus: factors[0],
        minus: factors[1],
    })
}

/// Noiseless normalized PL difference of a branch's two sequences.
fn raw_xxyy(
    rho: &DensityMatrix,
    branch: XxyyBranch,
    rates: &PlRates,
    err: &ReadoutErrorModel,
) -> Result<f64, ReadoutError> {
    let [n1, _, _, n4] = rates.counts;
    if (n1 - n4).abs() < 1e-12 {
        return Err(ReadoutError::NormalizationFailure { n1, n4 });
    }
    let (plus_seq, minus_seq) = branch.sequences();
    let s_plus = expected_pl(sequence_populations(rho, plus_seq), rates, err);
    let s_minus = expected_pl(sequence_populations(rho, minus_seq), rates, err);
    Ok((s_plus - s_minus) / (n1 - n4))
}

/// Measure one XX±YY branch with shot noise: run the ±y sequences, take the
/// normalized PL difference, apply the branch's calibration factor.
/// Returns the estimate together with the two sequence records.
#[allow(clippy::too_many_arguments)]
pub fn measure_xxyy(
    rho: &DensityMatrix,
    branch: XxyyBranch,
    rates: &PlRates,
    err: &ReadoutErrorModel,
    trials: u64,
    mode: ShotNoise,
    seeds: [u64; 2],
    calibration: &XxyyCalibration,
) -> Result<(f64, [MeasurementRecord; 2]), ReadoutError> {
    if trials < 1 {
        return Err(ReadoutError::NoTrials);
    }
    let [n1, _, _, n4] = rates.counts;
    if (n1 - n4).abs() < 1e-12 {
        return Err(ReadoutError::NormalizationFailure { n1, n4 });
    }
    let (plus_seq, minus_seq) = branch.sequences();
    let mut records = [MeasurementRecord {
        kind: plus_seq,
        expected_signal: 0.0,
        sampled_signal: 0.0,
        trials,
        seed: 0,
    }; 2];
    for (record, (kind, seed)) in records
        .iter_mut()
        .zip([(plus_seq, seeds[0]), (minus_seq, seeds[1])])
    {
        let expected = expected_pl(sequence_populations(rho, kind), rates, err);
        let mut rng = rand::SeedableRng::seed_from_u64(seed);
        let sampled = sample_signal(expected, trials, mode, &mut rng);
        *record = MeasurementRecord {
            kind,
            expected_signal: expected,
            sampled_signal: sampled,
            trials,
            seed,
        };
    }
    let raw = (records[0].sampled_signal - records[1].sampled_signal) / (n1 - n4);
    Ok((calibration.factor(branch) * raw, records))
}

/// Assemble the energy of a Pauli-sum Hamiltonian from measured estimates.
/// XX comes from the two branches as (XX+YY + XX−YY)/2; any term outside
/// the covered set {II, IZ, ZI, ZZ, XX} is rejected with its label.
pub fn estimate_energy(est: &PauliEstimates, h: &PauliSum) -> Result<f64, ReadoutError> {
    let mut energy = 0.0;
    for term in h.terms() {
        let value = match term.label().as_str() {
            "II" => est.ii,
            "IZ" => est.iz,
            "ZI" => est.zi,
            "ZZ" => est.zz,
            "XX" => est.xx(),
            _ => return Err(ReadoutError::UncoveredTerm(term.label())),
        };
        energy += term.coefficient * value;
    }
    Ok(energy)
}

/// Settings of the sampled measurement pipeline, with the XX±YY calibration
/// fixed up front from the configured rates.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSettings {
    pub rates: PlRates,
    pub error: ReadoutErrorModel,
    pub trials: u64,
    pub shot_noise: ShotNoise,
    pub normalization: Normalization,
    pub calibration: XxyyCalibration,
}

impl MeasurementSettings {
    pub fn new(
        rates: PlRates,
        error: ReadoutErrorModel,
        trials: u64,
        shot_noise: ShotNoise,
        normalization: Normalization,
    ) -> Result<Self, ReadoutError> {
        rates.validate()?;
        error.validate()?;
        if trials < 1 {
            return Err(ReadoutError::NoTrials);
        }
        let calibration = calibrate_xxyy(&rates)?;
        Ok(MeasurementSettings {
            rates,
            error,
            trials,
            shot_noise,
            normalization,
            calibration,
        })
    }

    /// Noiseless settings used by oracle-equivalence checks.
    pub fn noiseless(rates: PlRates) -> Result<Self, ReadoutError> {
        Self::new(
            rates,
            ReadoutErrorModel::none(),
            1,
            ShotNoise::Infinite,
            Normalization::Fixed,
        )
    }
}

/// Per-sequence RNG stream seeds of one energy estimate: eight measurement
/// sequences plus two reference-state signals for the re-measured
/// normalization mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceSeeds {
    pub sequences: [u64; 8],
    pub normalization: [u64; 2],
}

/// One full sampled energy estimate.
#[derive(Debug, Clone)]
pub struct EnergyMeasurement {
    pub energy: f64,
    pub estimates: PauliEstimates,
    pub records: Vec<MeasurementRecord>,
    /// The normalizer n1 − n4 actually used (sampled in re-measured mode).
    pub normalizer: f64,
}

/// Run the eight sequences on a prepared state and assemble the energy.
pub fn measure_energy(
    rho: &DensityMatrix,
    h: &PauliSum,
    settings: &MeasurementSettings,
    seeds: &SequenceSeeds,
) -> Result<EnergyMeasurement, ReadoutError> {
    let mut records = Vec::with_capacity(8);
    let mut signals = [0.0; 8];
    for (k, kind) in SequenceKind::ALL.iter().enumerate() {
        let expected = expected_pl(
            sequence_populations(rho, *kind),
            &settings.rates,
            &settings.error,
        );
        let seed = seeds.sequences[k];
        let mut rng = rand::SeedableRng::seed_from_u64(seed);
        let sampled = sample_signal(expected, settings.trials, settings.shot_noise, &mut rng);
        signals[k] = sampled;
        records.push(MeasurementRecord {
            kind: *kind,
            expected_signal: expected,
            sampled_signal: sampled,
            trials: settings.trials,
            seed,
        });
    }
    let normalizer = sample_normalizer(settings, seeds)?;
    let (energy, estimates) = assemble_energy(&signals, normalizer, settings, h)?;
    Ok(EnergyMeasurement {
        energy,
        estimates,
        records,
        normalizer,
    })
}

/// The XX±YY normalizer for one estimate: fixed from the configured rates
/// or re-measured with shot noise from the two reference states.
pub fn sample_normalizer(
    settings: &MeasurementSettings,
    seeds: &SequenceSeeds,
) -> Result<f64, ReadoutError> {
    let [n1, _, _, n4] = settings.rates.counts;
    match settings.normalization {
        Normalization::Fixed => Ok(n1 - n4),
        Normalization::Remeasured => {
            // Reference states |0,+1⟩ and |−1,0⟩: computational |00⟩, |11⟩.
            let mut sampled = [0.0; 2];
            for (slot, (basis, seed)) in sampled
                .iter_mut()
                .zip([(0usize, seeds.normalization[0]), (3, seeds.normalization[1])])
            {
                let rho = DensityMatrix::basis(basis);
                let expected = expected_pl(
                    sequence_populations(&rho, SequenceKind::Plain),
                    &settings.rates,
                    &settings.error,
                );
                let mut rng = rand::SeedableRng::seed_from_u64(seed);
                *slot = sample_signal(expected, settings.trials, settings.shot_noise, &mut rng);
            }
            let norm = sampled[0] - sampled[1];
            if norm.abs() < 1e-12 {
                return Err(ReadoutError::NormalizationFailure { n1, n4 });
            }
            Ok(norm)
        }
    }
}

/// Reconstruct estimates and energy from the eight sampled signals. Shared
/// by the live pipeline and the Monte Carlo resampler.
pub fn assemble_energy(
    signals: &[f64; 8],
    normalizer: f64,
    settings: &MeasurementSettings,
    h: &PauliSum,
) -> Result<(f64, PauliEstimates), ReadoutError> {
    let diag = reconstruct_diagonal(
        [signals[0], signals[1], signals[2], signals[3]],
        &settings.rates,
    )?;
    let plus = settings.calibration.plus * (signals[4] - signals[5]) / normalizer;
    let minus = settings.calibration.minus * (signals[6] - signals[7]) / normalizer;
    let estimates = PauliEstimates {
        xx_plus_yy: plus,
        xx_minus_yy: minus,
        ..diag
    };
    let energy = estimate_energy(&estimates, h)?;
    Ok((energy, estimates))
}

/// Exact (noiseless, ideal post-rotation) estimates of a state, for
/// oracle-equivalence checks and infinite-trials runs.
pub fn exact_estimates(
    rho: &DensityMatrix,
    settings: &MeasurementSettings,
) -> Result<PauliEstimates, ReadoutError> {
    let none = ReadoutErrorModel::none();
    let mut signals = [0.0; 8];
    for (k, kind) in SequenceKind::ALL.iter().enumerate() {
        signals[k] = expected_pl(sequence_populations(rho, *kind), &settings.rates, &none);
    }
    let [n1, _, _, n4] = settings.rates.counts;
    let diag = reconstruct_diagonal(
        [signals[0], signals[1], signals[2], signals[3]],
        &settings.rates,
    )?;
    let plus = settings.calibration.plus * (signals[4] - signals[5]) / (n1 - n4);
    let minus = settings.calibration.minus * (signals[6] - signals[7]) / (n1 - n4);
    Ok(PauliEstimates {
        xx_plus_yy: plus,
        xx_minus_yy: minus,
        ..diag
    })
}
