//! Parameterized trial-state preparation: the unit layer of the variational
//! circuit, at the ideal gate level.
//!
//! A layer applies, in order, a y then an x rotation on the electron spin
//! (unconditional) and a y then an x rotation on the nuclear spin,
//! conditioned on the electron being in |1⟩₂ (m_s = −1). The radio-frequency
//! drives that realize the nuclear rotations are resonant only with the
//! m_s = −1 nuclear transition, which is what makes the nuclear gates
//! physically electron-conditioned; the conditional gates are the sole
//! entanglement source of the circuit.

use crate::qcore::{C64, Mat2, Mat4, Qubit, StateVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnsatzError {
    #[error("layer count must be at least 1, got {0}")]
    InvalidLayers(usize),
    #[error("rotation angle theta_{0} is not finite")]
    NonFiniteAngle(usize),
    #[error("parameter index {0} out of range 1..=4")]
    IndexOutOfRange(usize),
}

/// The four rotation angles driving trial-state preparation, in radians:
/// (θ₁: nuclear-y, θ₂: nuclear-x, θ₃: electron-y, θ₄: electron-x).
///
/// Angles are stored unwrapped; optimization runs on the unwrapped manifold
/// and wrapping happens only in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub theta: [f64; 4],
    pub layers: usize,
}

impl AnsatzParams {
    pub fn new(theta: [f64; 4], layers: usize) -> Result<Self, AnsatzError> {
        if layers < 1 {
            return Err(AnsatzError::InvalidLayers(layers));
        }
        for (i, t) in theta.iter().enumerate() {
            if !t.is_finite() {
                return Err(AnsatzError::NonFiniteAngle(i + 1));
            }
        }
        Ok(AnsatzParams { theta, layers })
    }

    pub fn single_layer(theta: [f64; 4]) -> Result<Self, AnsatzError> {
        Self::new(theta, 1)
    }

    /// Angles reduced modulo 4π, for logging only.
    pub fn wrapped(&self) -> [f64; 4] {
        let period = 4.0 * std::f64::consts::PI;
        let mut out = self.theta;
        for t in &mut out {
            *t = t.rem_euclid(period);
        }
        out
    }
}

/// Rotation axis available on both spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// Control condition on the other qubit: apply the rotation only where the
/// control occupies `state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateCondition {
    pub control: Qubit,
    pub state: u8,
}

/// One rotation of the circuit, optionally conditioned on the other qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub target: Qubit,
    pub axis: Axis,
    pub angle: f64,
    pub condition: Option<GateCondition>,
}

impl GateSpec {
    pub fn unconditional(target: Qubit, axis: Axis, angle: f64) -> Self {
        GateSpec {
            target,
            axis,
            angle,
            condition: None,
        }
    }

    pub fn conditioned(target: Qubit, axis: Axis, angle: f64, control_state: u8) -> Self {
        GateSpec {
            target,
            axis,
            angle,
            condition: Some(GateCondition {
                control: target.other(),
                state: control_state,
            }),
        }
    }
}

/// Single-qubit rotation exp(−i·angle·σ_axis/2).
pub fn rotation_matrix(axis: Axis, angle: f64) -> Mat2 {
    let c = C64::new((angle / 2.0).cos(), 0.0);
    let s = (angle / 2.0).sin();
    match axis {
        Axis::X => {
            let ms = C64::new(0.0, -s);
            Mat2([[c, ms], [ms, c]])
        }
        Axis::Y => {
            let sp = C64::new(s, 0.0);
            Mat2([[c, -sp], [sp, c]])
        }
    }
}

fn projector(state: u8) -> Mat2 {
    let mut p = Mat2::zeros();
    p.0[state as usize][state as usize] = C64::new(1.0, 0.0);
    p
}

/// The gate list of the full circuit: per layer, Ry(θ₃) and Rx(θ₄) on the
/// electron, then Ry(θ₁) and Rx(θ₂) on the nuclear spin conditioned on the
/// electron being in |1⟩₂.
pub fn layer_gates(params: &AnsatzParams) -> Result<Vec<GateSpec>, AnsatzError> {
    if params.layers < 1 {
        return Err(AnsatzError::InvalidLayers(params.layers));
    }
    for (i, t) in params.theta.iter().enumerate() {
        if !t.is_finite() {
            return Err(AnsatzError::NonFiniteAngle(i + 1));
        }
    }
    let [t1, t2, t3, t4] = params.theta;
    let mut gates = Vec::with_capacity(4 * params.layers);
    for _ in 0..params.layers {
        gates.push(GateSpec::unconditional(Qubit::Electron, Axis::Y, t3));
        gates.push(GateSpec::unconditional(Qubit::Electron, Axis::X, t4));
        gates.push(GateSpec::conditioned(Qubit::Nuclear, Axis::Y, t1, 1));
        gates.push(GateSpec::conditioned(Qubit::Nuclear, Axis::X, t2, 1));
    }
    Ok(gates)
}

/// Copies of the gate list with every condition stripped. Turns the circuit
/// into a product of local rotations; used to confirm the conditional gates
/// are the only entanglement source.
pub fn strip_conditions(gates: &[GateSpec]) -> Vec<GateSpec> {
    gates
        .iter()
        .map(|g| GateSpec {
            condition: None,
            ..*g
        })
        .collect()
}

/// Dense 4x4 unitary of one gate.
///
/// An unconditional gate is the rotation on its target tensored with the
/// identity; a conditional gate applies the rotation only on the control's
/// stated subspace and the identity elsewhere.
pub fn gate_unitary(gate: &GateSpec) -> Mat4 {
    let r = rotation_matrix(gate.axis, gate.angle);
    let id = Mat2::identity();
    match gate.condition {
        None => match gate.target {
            Qubit::Nuclear => Mat4::kron(&r, &id),
            Qubit::Electron => Mat4::kron(&id, &r),
        },
        Some(cond) => {
            debug_assert!(cond.control != gate.target);
            let on = projector(cond.state);
            let off = projector(1 - cond.state);
            match gate.target {
                Qubit::Nuclear => Mat4::kron(&r, &on) + Mat4::kron(&id, &off),
                Qubit::Electron => Mat4::kron(&on, &r) + Mat4::kron(&off, &id),
            }
        }
    }
}

/// Product of the circuit's gate unitaries in application order.
pub fn circuit_unitary(gates: &[GateSpec]) -> Mat4 {
    gates
        .iter()
        .fold(Mat4::identity(), |acc, g| gate_unitary(g) * acc)
}

/// Apply the full circuit to the initialized |00⟩ state (the optically
/// pumped |0,+1⟩ physical state).
pub fn prepare_trial_state(params: &AnsatzParams) -> Result<StateVector, AnsatzError> {
    let gates = layer_gates(params)?;
    let u = circuit_unitary(&gates);
    let amps = u.apply(StateVector::basis(0).amplitudes());
    Ok(StateVector::normalized(amps).expect("unitary evolution preserves the norm"))
}

/// Shift direction for parameter-space neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

impl ShiftSign {
    pub fn factor(&self) -> f64 {
        match self {
            ShiftSign::Plus => 1.0,
            ShiftSign::Minus => -1.0,
        }
    }
}

/// Copy of the parameters with component `i` (1-based) shifted by `delta`.
pub fn shifted_params(
    params: &AnsatzParams,
    i: usize,
    delta: f64,
) -> Result<AnsatzParams, AnsatzError> {
    if !(1..=4).contains(&i) {
        return Err(AnsatzError::IndexOutOfRange(i));
    }
    let mut theta = params.theta;
    theta[i - 1] += delta;
    AnsatzParams::new(theta, params.layers)
}

/// The parameter-shift neighbor θ ± (π/2)·eᵢ.
pub fn neighbor_params(
    params: &AnsatzParams,
    i: usize,
    sign: ShiftSign,
) -> Result<AnsatzParams, AnsatzError> {
    shifted_params(params, i, sign.factor() * std::f64::consts::FRAC_PI_2)
}
