//! Open-system and pulse-level physics.
//!
//! Gate sequences compile into finite-duration drives; states evolve under
//! the Lindblad master equation with T2*-calibrated pure dephasing,
//! integrated by fixed-step fourth-order Runge-Kutta.
//!
//! The simulation frame co-rotates with the radio-frequency transition
//! |−1,+1⟩ ↔ |−1,0⟩ and with the microwave carrier of the driven electron
//! line. In that frame the nuclear spin of the electron-|0⟩ manifold
//! precesses at the hyperfine splitting, which enters as an explicit 2π·A
//! diagonal term; everything `phase_correction` reports descends from that
//! term. Energies are dimensionless, time is in microseconds, frequencies
//! in MHz and angular frequencies in rad/μs.

use crate::ansatz::{Axis, GateSpec};
use crate::qcore::{C64, DIM, DensityMatrix, Mat4, Qubit};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

/// Default integrator step in microseconds.
pub const DEFAULT_DT_US: f64 = 0.002;

/// Steps per pulse floor: dt = min(0.002 μs, duration/200).
pub fn pulse_dt(duration_us: f64) -> f64 {
    (duration_us / 200.0).min(DEFAULT_DT_US)
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("hardware parameter {name} must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("rabi_rf_mhz = {rabi} must stay below hyperfine_mhz = {hyperfine} so nuclear drives remain selective")]
    SelectivityViolated { rabi: f64, hyperfine: f64 },
    #[error("dephasing time must be positive, got {0}")]
    InvalidT2(f64),
    #[error("dt = {dt} must be positive and no larger than t_end = {t_end}")]
    InvalidStep { dt: f64, t_end: f64 },
    #[error("integration failed at step {step}: {what}")]
    IntegrationFailure { step: usize, what: String },
    #[error("phase correction requires an electron pulse, got a {0:?} pulse")]
    NotAnElectronPulse(Transition),
    #[error("initialization infidelity must lie in [0, 1), got {0}")]
    InvalidInitInfidelity(f64),
    #[error("collapse rate must be non-negative, got {0}")]
    NegativeRate(f64),
}

/// Calibrated hardware constants of the spin pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareParams {
    /// Hyperfine coupling between electron and nuclear spin, MHz.
    pub hyperfine_mhz: f64,
    /// Electron inhomogeneous dephasing time, μs.
    pub t2_star_us: f64,
    /// Optional nuclear dephasing time, μs; `None` disables the channel.
    pub nuclear_t2_star_us: Option<f64>,
    /// Electron (microwave) Rabi frequency, MHz.
    pub rabi_mw_mhz: f64,
    /// Nuclear (radio-frequency) Rabi frequency, MHz.
    pub rabi_rf_mhz: f64,
}

impl Default for HardwareParams {
    fn default() -> Self {
        HardwareParams {
            hyperfine_mhz: 2.16,
            t2_star_us: 4.367,
            nuclear_t2_star_us: None,
            rabi_mw_mhz: 0.5,
            rabi_rf_mhz: 0.5,
        }
    }
}

impl HardwareParams {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let checks = [
            ("hyperfine_mhz", self.hyperfine_mhz),
            ("t2_star_us", self.t2_star_us),
            ("rabi_mw_mhz", self.rabi_mw_mhz),
            ("rabi_rf_mhz", self.rabi_rf_mhz),
        ];
        for (name, value) in checks {
            if !(value > 0.0) {
                return Err(DynamicsError::NonPositiveParameter { name, value });
            }
        }
        if let Some(t2n) = self.nuclear_t2_star_us {
            if !(t2n > 0.0) {
                return Err(DynamicsError::NonPositiveParameter {
                    name: "nuclear_t2_star_us",
                    value: t2n,
                });
            }
        }
        if self.rabi_rf_mhz >= self.hyperfine_mhz {
            return Err(DynamicsError::SelectivityViolated {
                rabi: self.rabi_rf_mhz,
                hyperfine: self.hyperfine_mhz,
            });
        }
        Ok(())
    }
}

/// Which resonance a pulse drives.
///
/// Transitions are named by the driven spin and the spectator state that
/// selects the line. Computational-basis pairs: electron-on-nuclear-|0⟩₁
/// couples |00⟩↔|01⟩, electron-on-nuclear-|1⟩₁ couples |10⟩↔|11⟩, the hard
/// electron drive couples both pairs, and the nuclear drive couples
/// |01⟩↔|11⟩ inside the m_s = −1 manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transition {
    ElectronNuclear0,
    ElectronNuclear1,
    ElectronHard,
    NuclearElectron1,
}

impl Transition {
    pub fn is_electron(&self) -> bool {
        !matches!(self, Transition::NuclearElectron1)
    }

    fn pairs(&self) -> &'static [(usize, usize)] {
        match self {
            Transition::ElectronNuclear0 => &[(0, 1)],
            Transition::ElectronNuclear1 => &[(2, 3)],
            Transition::ElectronHard => &[(0, 1), (2, 3)],
            Transition::NuclearElectron1 => &[(1, 3)],
        }
    }
}

/// One resonant drive segment. The rotation angle is 2π·rabi·duration; the
/// axis phase encodes x (0) versus y (π/2), shifted by π for negative
/// angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub transition: Transition,
    pub phase: f64,
    pub duration_us: f64,
    pub rabi_mhz: f64,
}

impl Pulse {
    pub fn rotation_angle(&self) -> f64 {
        TAU * self.rabi_mhz * self.duration_us
    }

    /// A drive-free segment of fixed duration (free precession).
    pub fn wait(duration_us: f64) -> Self {
        Pulse {
            transition: Transition::ElectronHard,
            phase: 0.0,
            duration_us,
            rabi_mhz: 0.0,
        }
    }
}

/// Marker for the rotating-frame declaration: resonant with the
/// |−1,+1⟩ ↔ |−1,0⟩ nuclear transition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RotatingFrame;

/// A sequential, non-overlapping list of pulses in the declared frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSchedule {
    pub pulses: Vec<Pulse>,
    pub frame: RotatingFrame,
}

impl PulseSchedule {
    pub fn total_duration_us(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration_us).sum()
    }
}

/// An environmental decoherence channel: dissipator rate·(CρC† − ½{C†C,ρ}).
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOperator {
    pub matrix: Mat4,
    pub rate_per_us: f64,
}

impl CollapseOperator {
    pub fn new(matrix: Mat4, rate_per_us: f64) -> Result<Self, DynamicsError> {
        if !(rate_per_us >= 0.0) {
            return Err(DynamicsError::NegativeRate(rate_per_us));
        }
        Ok(CollapseOperator {
            matrix,
            rate_per_us,
        })
    }
}

/// Everything stochastic or irreversible about a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseModel {
    pub collapses: Vec<CollapseOperator>,
    /// Initialization infidelity: the nominal |00⟩ start mixes uniformly
    /// with the other three basis states.
    pub p_init: f64,
    /// Standard deviation of the per-run electron detuning offset, kHz;
    /// zero disables the channel.
    pub detuning_std_khz: f64,
}

impl NoiseModel {
    pub fn new(
        collapses: Vec<CollapseOperator>,
        p_init: f64,
        detuning_std_khz: f64,
    ) -> Result<Self, DynamicsError> {
        if !(0.0..1.0).contains(&p_init) {
            return Err(DynamicsError::InvalidInitInfidelity(p_init));
        }
        Ok(NoiseModel {
            collapses,
            p_init,
            detuning_std_khz,
        })
    }

    /// No decoherence, ideal initialization.
    pub fn none() -> Self {
        NoiseModel::default()
    }

    /// The default dephasing set of the hardware, ideal initialization.
    pub fn from_hardware(hw: &HardwareParams) -> Self {
        NoiseModel {
            collapses: build_collapse_set(hw),
            p_init: 0.0,
            detuning_std_khz: 0.0,
        }
    }

    /// Mix the initialization infidelity into a nominal-|00⟩ start.
    pub fn apply_init(&self, rho: &DensityMatrix) -> DensityMatrix {
        if self.p_init == 0.0 {
            return *rho;
        }
        let p = self.p_init;
        let mut rest = Mat4::identity();
        rest.e[0][0] = C64::new(0.0, 0.0);
        let m = rho.matrix().scale_re(1.0 - p) + rest.scale_re(p / 3.0);
        DensityMatrix::from_mat_unchecked(m.hermitized())
    }
}

/// Dephasing rate Γ such that a single collapse operator √Γ·diag(0,1) on a
/// qubit decays its coherence as exp(−t/T2*); solving dρ₀₁/dt = −(Γ/2)ρ₀₁
/// gives Γ = 2/T2*. Infinite T2* maps to rate zero.
pub fn dephasing_rate(t2_star_us: f64) -> Result<f64, DynamicsError> {
    if t2_star_us.is_nan() || t2_star_us <= 0.0 {
        return Err(DynamicsError::InvalidT2(t2_star_us));
    }
    if t2_star_us.is_infinite() {
        return Ok(0.0);
    }
    Ok(2.0 / t2_star_us)
}

/// One pure-dephasing collapse per spin: the single-qubit projector
/// diag(0,1) embedded in the four-dimensional space. The electron rate comes
/// from T2*; the nuclear channel is off unless configured.
pub fn build_collapse_set(hw: &HardwareParams) -> Vec<CollapseOperator> {
    let mut set = Vec::new();
    if let Ok(rate) = dephasing_rate(hw.t2_star_us) {
        if rate > 0.0 {
            // |1⟩⟨1| on the electron: diag over |q₁q₂⟩ = (0, 1, 0, 1).
            set.push(CollapseOperator {
                matrix: Mat4::diagonal([0.0, 1.0, 0.0, 1.0]),
                rate_per_us: rate,
            });
        }
    }
    if let Some(t2n) = hw.nuclear_t2_star_us {
        if let Ok(rate) = dephasing_rate(t2n) {
            if rate > 0.0 {
                set.push(CollapseOperator {
                    matrix: Mat4::diagonal([0.0, 0.0, 1.0, 1.0]),
                    rate_per_us: rate,
                });
            }
        }
    }
    set
}

/// Compile ideal gates into resonant pulses: duration = |angle|/(2π·rabi),
/// phase 0 for x and π/2 for y, shifted by π for negative angles.
///
/// Unconditional electron gates become hard pulses; electron gates
/// conditioned on a nuclear state select the corresponding hyperfine line;
/// nuclear gates always ride the rf transition of the m_s = −1 manifold,
/// which is the only one the rf carrier is resonant with.
pub fn compile(gates: &[GateSpec], hw: &HardwareParams) -> PulseSchedule {
    let pulses = gates
        .iter()
        .map(|g| {
            let (transition, rabi) = match g.target {
                Qubit::Electron => match g.condition {
                    None => (Transition::ElectronHard, hw.rabi_mw_mhz),
                    Some(c) if c.state == 0 => (Transition::ElectronNuclear0, hw.rabi_mw_mhz),
                    Some(_) => (Transition::ElectronNuclear1, hw.rabi_mw_mhz),
                },
                Qubit::Nuclear => (Transition::NuclearElectron1, hw.rabi_rf_mhz),
            };
            let mut phase = match g.axis {
                Axis::X => 0.0,
                Axis::Y => FRAC_PI_2,
            };
            if g.angle < 0.0 {
                phase += PI;
            }
            Pulse {
                transition,
                phase,
                duration_us: g.angle.abs() / (TAU * rabi),
                rabi_mhz: rabi,
            }
        })
        .collect();
    PulseSchedule {
        pulses,
        frame: RotatingFrame,
    }
}

/// Frame (drift) Hamiltonian while a pulse's carrier is active, rad/μs.
///
/// The rf pair |01⟩↔|11⟩ is degenerate in every variant, and the
/// electron-|0⟩ nuclear coherence |00⟩↔|10⟩ always precesses at 2π·A.
/// Pulses carried on the m_I = 0 electron line shift the bookkeeping onto
/// |00⟩ instead of |10⟩ so their own pair comes out resonant.
fn frame_hamiltonian(transition: Transition, hyperfine_mhz: f64) -> Mat4 {
    let a = TAU * hyperfine_mhz;
    match transition {
        Transition::ElectronNuclear1 => Mat4::diagonal([0.0, a, a, a]),
        _ => Mat4::diagonal([0.0, 0.0, a, 0.0]),
    }
}

/// Resonant drive term of a pulse in its rotating frame, rad/μs.
fn drive_hamiltonian(pulse: &Pulse) -> Mat4 {
    let mut h = Mat4::zeros();
    if pulse.rabi_mhz == 0.0 {
        return h;
    }
    // exp(−i θ σ_axis/2) with θ = 2π·rabi·t needs coupling strength π·rabi.
    let half_omega = PI * pulse.rabi_mhz;
    let coupling = C64::from_polar(half_omega, -pulse.phase);
    for &(u, v) in pulse.transition.pairs() {
        h.e[u][v] = coupling;
        h.e[v][u] = coupling.conj();
    }
    h
}

/// Full pulse Hamiltonian including an optional electron detuning offset
/// (rad/μs) on the m_s = −1 states.
pub fn pulse_hamiltonian(pulse: &Pulse, hw: &HardwareParams, detuning_rad_us: f64) -> Mat4 {
    let mut h = frame_hamiltonian(pulse.transition, hw.hyperfine_mhz) + drive_hamiltonian(pulse);
    if detuning_rad_us != 0.0 {
        h.e[1][1] += C64::new(detuning_rad_us, 0.0);
        h.e[3][3] += C64::new(detuning_rad_us, 0.0);
    }
    h
}

fn lindblad_rhs(rho: &Mat4, h: &Mat4, collapses: &[CollapseOperator]) -> Mat4 {
    let minus_i = C64::new(0.0, -1.0);
    let mut drho = h.commutator(rho).scale(minus_i);
    for c in collapses {
        if c.rate_per_us == 0.0 {
            continue;
        }
        let cd = c.matrix.adjoint();
        let cdc = cd * c.matrix;
        let jump = c.matrix * *rho * cd;
        let anti = (cdc * *rho + *rho * cdc).scale_re(0.5);
        drho = drho + (jump - anti).scale_re(c.rate_per_us);
    }
    drho
}

/// Integrate the master equation with fixed-step fourth-order Runge-Kutta.
///
/// The state is re-Hermitized ((ρ+ρ†)/2) and trace-renormalized every step;
/// the pre-renormalization drift is tracked and the run fails with the step
/// index if it exceeds its tolerance (1e-8 cumulative per run).
pub fn lindblad_evolve(
    rho: &DensityMatrix,
    h_of_t: impl Fn(f64) -> Mat4,
    collapses: &[CollapseOperator],
    t_end: f64,
    dt: f64,
) -> Result<DensityMatrix, DynamicsError> {
    if t_end == 0.0 {
        return Ok(*rho);
    }
    if !(dt > 0.0) || dt > t_end {
        return Err(DynamicsError::InvalidStep { dt, t_end });
    }

    let n_steps = (t_end / dt).ceil() as usize;
    let step = t_end / n_steps as f64;
    let mut m = *rho.matrix();
    let mut drift = 0.0_f64;

    for k in 0..n_steps {
        let t = k as f64 * step;
        let k1 = lindblad_rhs(&m, &h_of_t(t), collapses);
        let mid = h_of_t(t + step / 2.0);
        let k2 = lindblad_rhs(&(m + k1.scale_re(step / 2.0)), &mid, collapses);
        let k3 = lindblad_rhs(&(m + k2.scale_re(step / 2.0)), &mid, collapses);
        let k4 = lindblad_rhs(&(m + k3.scale_re(step)), &h_of_t(t + step), collapses);
        m = m + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(step / 6.0);

        let hermiticity = m.hermiticity_residual();
        m = m.hermitized();
        let trace = m.trace().re;
        let step_drift = (trace - 1.0).abs();
        drift += step_drift;
        if hermiticity > 1e-6 || step_drift > 1e-6 || !trace.is_finite() {
            return Err(DynamicsError::IntegrationFailure {
                step: k,
                what: format!(
                    "hermiticity residual {hermiticity:.3e}, trace drift {step_drift:.3e}"
                ),
            });
        }
        m = m.scale_re(1.0 / trace);
    }

    if drift > 1e-8 {
        return Err(DynamicsError::IntegrationFailure {
            step: n_steps,
            what: format!("cumulative trace drift {drift:.3e} exceeds 1e-8"),
        });
    }
    Ok(DensityMatrix::from_mat_unchecked(m))
}

/// Run a full schedule: initialization infidelity first, then each pulse
/// under its rotating-frame Hamiltonian with the collapse set active
/// throughout.
pub fn simulate_schedule(
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    hw: &HardwareParams,
    noise: &NoiseModel,
) -> Result<DensityMatrix, DynamicsError> {
    simulate_schedule_with_detuning(rho0, schedule, hw, noise, 0.0)
}

/// Same as [`simulate_schedule`] with an explicit sampled detuning offset
/// (rad/μs) applied to the electron m_s = −1 states for the whole run.
pub fn simulate_schedule_with_detuning(
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    hw: &HardwareParams,
    noise: &NoiseModel,
    detuning_rad_us: f64,
) -> Result<DensityMatrix, DynamicsError> {
    let mut rho = noise.apply_init(rho0);
    for pulse in &schedule.pulses {
        if pulse.duration_us == 0.0 {
            continue;
        }
        let h = pulse_hamiltonian(pulse, hw, detuning_rad_us);
        rho = lindblad_evolve(
            &rho,
            |_| h,
            &noise.collapses,
            pulse.duration_us,
            pulse_dt(pulse.duration_us),
        )?;
    }
    Ok(rho)
}

/// Closed-system (Schrödinger) propagation of a pure state through one
/// pulse, RK4 with the same step policy as the master equation.
fn schrodinger_pulse(
    psi: &[C64; DIM],
    pulse: &Pulse,
    hw: &HardwareParams,
    hyperfine_override: Option<f64>,
) -> [C64; DIM] {
    if pulse.duration_us == 0.0 {
        return *psi;
    }
    let hw_eff = HardwareParams {
        hyperfine_mhz: hyperfine_override.unwrap_or(hw.hyperfine_mhz),
        ..*hw
    };
    let h = pulse_hamiltonian(pulse, &hw_eff, 0.0);
    let rhs = |v: &[C64; DIM]| {
        let hv = h.apply(v);
        let mut out = [C64::new(0.0, 0.0); DIM];
        for i in 0..DIM {
            out[i] = C64::new(0.0, -1.0) * hv[i];
        }
        out
    };
    let add = |a: &[C64; DIM], b: &[C64; DIM], s: f64| {
        let mut out = *a;
        for i in 0..DIM {
            out[i] += b[i] * s;
        }
        out
    };

    let dt = pulse_dt(pulse.duration_us);
    let n_steps = (pulse.duration_us / dt).ceil() as usize;
    let step = pulse.duration_us / n_steps as f64;
    let mut v = *psi;
    for _ in 0..n_steps {
        let k1 = rhs(&v);
        let k2 = rhs(&add(&v, &k1, step / 2.0));
        let k3 = rhs(&add(&v, &k2, step / 2.0));
        let k4 = rhs(&add(&v, &k3, step));
        for i in 0..DIM {
            v[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (step / 6.0);
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

/// Nuclear coherence ⟨0₁| Tr₂ |ψ⟩⟨ψ| |1₁⟩ of a pure state.
fn nuclear_coherence(psi: &[C64; DIM]) -> C64 {
    psi[0] * psi[2].conj() + psi[1] * psi[3].conj()
}

/// Phase discrepancy and readout correction factor of an electron pulse.
///
/// Integrates the closed-system dynamics of the pulse on the nuclear
/// coherence of the m_s = −1 manifold (the coherence the rf pulses address)
/// twice: once as-is and once with the hyperfine precession switched off as
/// the phase reference. Returns the mean phase the coherence accumulated
/// relative to the reference and the coherence-magnitude retention factor
/// lost to phase spreading.
pub fn phase_correction(
    pulse: &Pulse,
    hw: &HardwareParams,
) -> Result<(f64, f64), DynamicsError> {
    phase_correction_segment(std::slice::from_ref(pulse), hw)
}

/// [`phase_correction`] over a multi-pulse segment, e.g. π–wait–π.
pub fn phase_correction_segment(
    pulses: &[Pulse],
    hw: &HardwareParams,
) -> Result<(f64, f64), DynamicsError> {
    for p in pulses {
        if !p.transition.is_electron() {
            return Err(DynamicsError::NotAnElectronPulse(p.transition));
        }
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let probe = [
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
    ];
    let mut with_a = probe;
    let mut without_a = probe;
    for p in pulses {
        with_a = schrodinger_pulse(&with_a, p, hw, None);
        without_a = schrodinger_pulse(&without_a, p, hw, Some(0.0));
    }
    let c = nuclear_coherence(&with_a);
    let c0 = nuclear_coherence(&without_a);
    if c0.norm() < 1e-12 {
        // The pulse destroyed the reference coherence outright; there is no
        // phase left to correct.
        return Ok((0.0, 1.0));
    }
    let ratio = c / c0;
    Ok((ratio.arg(), ratio.norm().clamp(1e-15, 1.0)))
}

/// Per-pulse phase corrections of a compiled schedule, in schedule order;
/// `None` for pulses the correction does not apply to.
pub fn schedule_phase_corrections(
    schedule: &PulseSchedule,
    hw: &HardwareParams,
) -> Vec<(Pulse, Option<(f64, f64)>)> {
    schedule
        .pulses
        .iter()
        .map(|p| {
            let corr = if p.transition.is_electron() {
                phase_correction(p, hw).ok()
            } else {
                None
            };
            (*p, corr)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{self, AnsatzParams};
    use crate::qcore::{StateVector, fidelity};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn superposition_00_01() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new([
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ])
        .unwrap()
        .to_density()
    }

    #[test]
    fn dephasing_rate_closed_form() {
        assert!((dephasing_rate(2.0).unwrap() - 1.0).abs() < 1e-15);
        let got = dephasing_rate(4.367).unwrap();
        assert!((got - 2.0 / 4.367).abs() < 1e-15);
        assert!((got - 0.45798).abs() < 1e-5);
        assert_eq!(dephasing_rate(f64::INFINITY).unwrap(), 0.0);
        assert!(dephasing_rate(0.0).is_err());
        assert!(dephasing_rate(-1.0).is_err());
    }

    #[test]
    fn default_collapse_set_is_electron_only() {
        let hw = HardwareParams::default();
        let set = build_collapse_set(&hw);
        assert_eq!(set.len(), 1);
        assert!((set[0].rate_per_us - 2.0 / 4.367).abs() < 1e-12);
        let want = Mat4::diagonal([0.0, 1.0, 0.0, 1.0]);
        assert!(set[0].matrix.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn infinite_t2_gives_an_empty_collapse_set() {
        let hw = HardwareParams {
            t2_star_us: f64::INFINITY,
            ..Default::default()
        };
        assert!(build_collapse_set(&hw).is_empty());
    }

    #[test]
    fn configured_nuclear_channel_appears() {
        let hw = HardwareParams {
            nuclear_t2_star_us: Some(100.0),
            ..Default::default()
        };
        let set = build_collapse_set(&hw);
        assert_eq!(set.len(), 2);
        assert!((set[1].rate_per_us - 0.02).abs() < 1e-12);
        let want = Mat4::diagonal([0.0, 0.0, 1.0, 1.0]);
        assert!(set[1].matrix.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn hardware_validation_catches_bad_values() {
        assert!(HardwareParams::default().validate().is_ok());
        let bad = HardwareParams {
            rabi_rf_mhz: 3.0,
            ..Default::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(DynamicsError::SelectivityViolated { .. })
        ));
        let bad = HardwareParams {
            t2_star_us: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn compile_maps_angle_to_duration_and_axis_to_phase() {
        let hw = HardwareParams::default();
        let g = GateSpec::unconditional(Qubit::Electron, Axis::Y, PI);
        let s = compile(&[g], &hw);
        assert_eq!(s.pulses.len(), 1);
        let p = s.pulses[0];
        assert_eq!(p.transition, Transition::ElectronHard);
        assert!((p.duration_us - 1.0).abs() < 1e-12);
        assert!((p.phase - FRAC_PI_2).abs() < 1e-12);
        assert!((p.rotation_angle() - PI).abs() < 1e-12);
    }

    #[test]
    fn compile_zero_angle_gives_zero_duration() {
        let hw = HardwareParams::default();
        let g = GateSpec::conditioned(Qubit::Nuclear, Axis::X, 0.0, 1);
        let s = compile(&[g], &hw);
        assert_eq!(s.pulses[0].duration_us, 0.0);
        assert_eq!(s.pulses[0].transition, Transition::NuclearElectron1);
    }

    #[test]
    fn compile_slow_nuclear_pulse_duration() {
        let hw = HardwareParams {
            rabi_rf_mhz: 0.02,
            ..Default::default()
        };
        let g = GateSpec::conditioned(Qubit::Nuclear, Axis::X, FRAC_PI_2, 1);
        let s = compile(&[g], &hw);
        // (π/2) / (2π · 0.02 MHz) = 12.5 μs.
        assert!((s.pulses[0].duration_us - 12.5).abs() < 1e-12);
        assert_eq!(s.pulses[0].phase, 0.0);
    }

    #[test]
    fn compile_negative_angle_flips_the_phase() {
        let hw = HardwareParams::default();
        let g = GateSpec::unconditional(Qubit::Electron, Axis::X, -PI);
        let p = compile(&[g], &hw).pulses[0];
        assert!((p.phase - PI).abs() < 1e-12);
        let g = GateSpec::conditioned(Qubit::Electron, Axis::Y, -1.0, 0);
        let p = compile(&[g], &hw).pulses[0];
        assert_eq!(p.transition, Transition::ElectronNuclear0);
        assert!((p.phase - (FRAC_PI_2 + PI)).abs() < 1e-12);
    }

    #[test]
    fn free_evolution_with_no_generator_is_the_identity() {
        let rho = superposition_00_01();
        let out = lindblad_evolve(&rho, |_| Mat4::zeros(), &[], 3.0, 0.01).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn electron_coherence_decays_to_one_over_e_at_t2_star() {
        let hw = HardwareParams::default();
        let collapses = build_collapse_set(&hw);
        let rho = superposition_00_01();
        let out = lindblad_evolve(
            &rho,
            |_| Mat4::zeros(),
            &collapses,
            hw.t2_star_us,
            DEFAULT_DT_US,
        )
        .unwrap();
        let got = out.matrix().e[0][1].norm();
        let want = 0.5 * (-1.0_f64).exp();
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn resonant_pi_pulse_swaps_populations_like_the_gate() {
        let hw = HardwareParams::default();
        let pulse = Pulse {
            transition: Transition::ElectronHard,
            phase: FRAC_PI_2,
            duration_us: 1.0,
            rabi_mhz: 0.5,
        };
        let h = pulse_hamiltonian(&pulse, &hw, 0.0);
        let rho0 = DensityMatrix::basis(0);
        let out = lindblad_evolve(&rho0, |_| h, &[], 1.0, pulse_dt(1.0)).unwrap();

        let gate = GateSpec::unconditional(Qubit::Electron, Axis::Y, PI);
        let want = rho0.evolved_by(&ansatz::gate_unitary(&gate));
        assert!(out.matrix().max_abs_diff(want.matrix()) < 1e-6);
    }

    #[test]
    fn invalid_steps_are_rejected() {
        let rho = DensityMatrix::basis(0);
        assert!(matches!(
            lindblad_evolve(&rho, |_| Mat4::zeros(), &[], 1.0, 0.0),
            Err(DynamicsError::InvalidStep { .. })
        ));
        assert!(matches!(
            lindblad_evolve(&rho, |_| Mat4::zeros(), &[], 1.0, 2.0),
            Err(DynamicsError::InvalidStep { .. })
        ));
        // t_end = 0 is a no-op.
        assert!(lindblad_evolve(&rho, |_| Mat4::zeros(), &[], 0.0, 0.1).is_ok());
    }

    #[test]
    fn empty_schedule_returns_the_input_after_init_mixing() {
        let hw = HardwareParams::default();
        let rho0 = DensityMatrix::basis(0);
        let out = simulate_schedule(&rho0, &PulseSchedule::default(), &hw, &NoiseModel::none())
            .unwrap();
        assert!(out.matrix().max_abs_diff(rho0.matrix()) < 1e-15);

        let noisy_init = NoiseModel::new(vec![], 0.03, 0.0).unwrap();
        let mixed =
            simulate_schedule(&rho0, &PulseSchedule::default(), &hw, &noisy_init).unwrap();
        let p = mixed.populations();
        assert!((p[0] - 0.97).abs() < 1e-12);
        for k in 1..4 {
            assert!((p[k] - 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_pulse_limit_reproduces_the_gate_circuit() {
        let hw = HardwareParams {
            rabi_mw_mhz: 1e4,
            rabi_rf_mhz: 1e4,
            ..Default::default()
        };
        let mut rng = StdRng::seed_from_u64(0xFA57);
        for _ in 0..100 {
            let theta = [
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
            ];
            let params = AnsatzParams::single_layer(theta).unwrap();
            let schedule = compile(&ansatz::layer_gates(&params).unwrap(), &hw);
            let rho0 = DensityMatrix::basis(0);
            let out = simulate_schedule(&rho0, &schedule, &hw, &NoiseModel::none()).unwrap();
            let target = ansatz::prepare_trial_state(&params).unwrap();
            let f = fidelity(&out, &target);
            assert!(f >= 1.0 - 1e-6, "fidelity {f} at theta {theta:?}");
        }
    }

    #[test]
    fn default_noise_leaves_a_mixed_state() {
        let hw = HardwareParams::default();
        let theta = [0.1 * TAU, 0.2 * TAU, 0.1 * TAU, 0.2 * TAU];
        let params = AnsatzParams::single_layer(theta).unwrap();
        let schedule = compile(&ansatz::layer_gates(&params).unwrap(), &hw);
        let out = simulate_schedule(
            &DensityMatrix::basis(0),
            &schedule,
            &hw,
            &NoiseModel::from_hardware(&hw),
        )
        .unwrap();
        assert!(out.purity() < 1.0 - 1e-6);
    }

    #[test]
    fn purity_never_increases_under_pure_dephasing() {
        let hw = HardwareParams::default();
        let collapses = build_collapse_set(&hw);
        let mut rho = superposition_00_01();
        let mut purity = rho.purity();
        for _ in 0..30 {
            rho = lindblad_evolve(&rho, |_| Mat4::zeros(), &collapses, 0.2, DEFAULT_DT_US)
                .unwrap();
            let next = rho.purity();
            assert!(next <= purity + 1e-12);
            purity = next;
        }
    }

    #[test]
    fn halving_the_step_barely_moves_the_answer() {
        let hw = HardwareParams::default();
        let pulse = Pulse {
            transition: Transition::NuclearElectron1,
            phase: 0.3,
            duration_us: 2.5,
            rabi_mhz: 0.5,
        };
        let h = pulse_hamiltonian(&pulse, &hw, 0.0);
        let collapses = build_collapse_set(&hw);
        let rho0 = superposition_00_01();
        let coarse =
            lindblad_evolve(&rho0, |_| h, &collapses, pulse.duration_us, DEFAULT_DT_US).unwrap();
        let fine = lindblad_evolve(
            &rho0,
            |_| h,
            &collapses,
            pulse.duration_us,
            DEFAULT_DT_US / 2.0,
        )
        .unwrap();
        assert!(coarse.matrix().max_abs_diff(fine.matrix()) < 1e-6);
    }

    #[test]
    fn coherence_decay_tracks_the_exponential_over_three_t2() {
        let hw = HardwareParams::default();
        let collapses = build_collapse_set(&hw);
        let mut rho = superposition_00_01();
        let step = hw.t2_star_us / 10.0;
        let mut t = 0.0;
        while t < 3.0 * hw.t2_star_us {
            rho = lindblad_evolve(&rho, |_| Mat4::zeros(), &collapses, step, DEFAULT_DT_US)
                .unwrap();
            t += step;
            let got = rho.matrix().e[0][1].norm() / 0.5;
            let want = (-t / hw.t2_star_us).exp();
            assert!(
                ((got - want) / want).abs() <= 1e-3,
                "t = {t}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn phase_correction_of_trivial_pulses() {
        let hw = HardwareParams::default();
        let zero = Pulse {
            transition: Transition::ElectronHard,
            phase: 0.0,
            duration_us: 0.0,
            rabi_mhz: 0.5,
        };
        assert_eq!(phase_correction(&zero, &hw).unwrap(), (0.0, 1.0));

        // A drive-free wait never moves the probe out of the m_s = −1
        // manifold, so no hyperfine phase accumulates.
        let (phi, scale) = phase_correction(&Pulse::wait(3.7), &hw).unwrap();
        assert!(phi.abs() < 1e-9);
        assert!((scale - 1.0).abs() < 1e-9);

        let rf = Pulse {
            transition: Transition::NuclearElectron1,
            phase: 0.0,
            duration_us: 1.0,
            rabi_mhz: 0.02,
        };
        assert!(matches!(
            phase_correction(&rf, &hw),
            Err(DynamicsError::NotAnElectronPulse(_))
        ));
    }

    #[test]
    fn echo_free_dwell_accumulates_the_hyperfine_phase() {
        // Fast hard π pulses bracket a wait; the nuclear coherence dwells in
        // the electron-|0⟩ manifold exactly for the wait, so the offset is
        // 2π·A·t_wait.
        let hw = HardwareParams {
            rabi_mw_mhz: 1e8,
            ..Default::default()
        };
        let hard_pi = Pulse {
            transition: Transition::ElectronHard,
            phase: FRAC_PI_2,
            duration_us: 0.5 / hw.rabi_mw_mhz,
            rabi_mhz: hw.rabi_mw_mhz,
        };
        let t_wait = 0.0321;
        let segment = [hard_pi, Pulse::wait(t_wait), hard_pi];
        let (phi, scale) = phase_correction_segment(&segment, &hw).unwrap();
        let want = (TAU * hw.hyperfine_mhz * t_wait).rem_euclid(TAU);
        let got = phi.rem_euclid(TAU);
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        assert!(scale > 1.0 - 1e-6);
    }
}
