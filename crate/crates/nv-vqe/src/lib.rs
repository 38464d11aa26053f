//! Numerical laboratory for a two-qubit variational quantum eigensolver on
//! an NV-center electron spin hyperfine-coupled to its nitrogen nuclear spin.
//!
//! The crate covers the whole experiment chain: trial-state preparation from
//! four rotation angles, pulse-level open-system dynamics under a Lindblad
//! dephasing model, photoluminescence-based Pauli measurement with shot
//! noise and readout error, parameter-shift gradient descent, Monte Carlo
//! error bars and readout-error sweeps.
//!
//! ## Modules
//!
//! - [`qcore`] — exact 4-dimensional complex linear algebra: states, Pauli
//!   algebra, eigensolver, fidelity, partial traces. The oracle everything
//!   else is tested against.
//! - [`ansatz`] — the parameterized unit layer: electron rotations followed
//!   by electron-conditioned nuclear rotations, plus parameter-space
//!   neighbors for the parameter-shift rule.
//! - [`dynamics`] — pulse compilation, rotating-frame drive Hamiltonians,
//!   fixed-step RK4 Lindblad integration, hyperfine phase bookkeeping.
//! - [`readout`] — photoluminescence rates, post-rotation sequences, shot
//!   noise, the linear reconstruction of diagonal Pauli terms and the
//!   XX±YY difference measurements.
//! - [`vqe`] — the optimization loop: energy evaluation over three backends,
//!   parameter-shift gradients, gradient descent, error bars, sweeps.
//! - [`cli`] — configuration files, the run/oracle/sweep/calibrate commands
//!   and bit-stable result files.
//!
//! ## Runnable examples
//!
//! One example per major capability, under `examples/`:
//!
//! ```bash
//! cargo run --release -p nv-vqe --example exact_spectrum
//! cargo run --release -p nv-vqe --example noiseless_vqe
//! cargo run --release -p nv-vqe --example noisy_vqe
//! cargo run --release -p nv-vqe --example bloch_trajectory
//! cargo run --release -p nv-vqe --example pulse_schedule
//! cargo run --release -p nv-vqe --example dephasing_decay
//! cargo run --release -p nv-vqe --example readout_reconstruction
//! cargo run --release -p nv-vqe --example readout_error_sweep
//! ```
//!
//! The `nvvqe` binary wraps the same capabilities behind a batch CLI; see
//! the README for the file formats it writes.

pub mod ansatz;
pub mod cli;
pub mod dynamics;
pub mod qcore;
pub mod readout;
pub mod vqe;
