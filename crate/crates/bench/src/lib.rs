//! Benchmarks live in `benches/`; run them with `cargo bench -p antipt-bench`.

use antipt_core::ChainParams;

/// The weak-dissipation chain used by most benchmarks: `J = 1`,
/// `V = 2e-4`, `M = 100` (201 sites).
pub fn reference_chain() -> ChainParams {
    ChainParams::new(1.0, 2e-4, 100).expect("valid parameters")
}
