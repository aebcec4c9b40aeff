//! Numerical tolerances shared by production code and tests.

/// Default hard cap on the number of qubits of any dense operator.
pub const MAX_QUBITS: usize = 12;

/// Entrywise Hermiticity tolerance for density matrices.
pub const HERMITIAN: f64 = 1e-10;
/// Hermiticity tolerance accepted by the eigensolver.
pub const EIG_HERMITIAN: f64 = 1e-8;
/// Trace-one tolerance for density matrices.
pub const TRACE: f64 = 1e-10;
/// Eigenvalues in `[-PSD, 0)` are clamped to zero; anything lower is rejected.
pub const PSD: f64 = 1e-9;
/// Normalisation tolerance for pure states.
pub const NORM: f64 = 1e-12;
/// Largest imaginary residue tolerated on a real-valued trace.
pub const IMAG_RESIDUE: f64 = 1e-10;
/// Slack allowed when clamping fidelities and distances into `[0, 1]`.
pub const UNIT_INTERVAL: f64 = 1e-10;
/// Reconstruction / orthonormality tolerance of eigendecompositions.
pub const EIG_RECONSTRUCTION: f64 = 1e-9;
/// QFI pairs with `λ_k + λ_l` at or below this value contribute nothing.
pub const QFI_PAIR: f64 = 1e-12;
/// Generator commutation tolerance.
pub const COMMUTATION: f64 = 1e-10;
/// Relative eigenvalue cutoff of the pseudo-inverse in the co-encoding solver.
pub const PINV_RELATIVE: f64 = 1e-10;
/// Distance in radians from `0` or `π` inside which bound formulas refuse
/// to evaluate `1 / sin φ`.
pub const SIN_PHASE: f64 = 1e-6;
/// Tolerance when checking that an input state is the GHZ state.
pub const GHZ_IDENTITY: f64 = 1e-10;
/// Absolute round-off allowance when comparing an integrity bound with its
/// left-hand side.
pub const INEQUALITY_SLACK: f64 = 1e-12;
