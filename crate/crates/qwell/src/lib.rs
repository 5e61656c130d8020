//! Bound states of one-dimensional quantum wells.
//!
//! A well is a box `[0, d]` bounded by walls of height `v1`, `v2` (possibly
//! infinite) whose interior may hold any non-overlapping arrangement of
//! rectangular barriers and delta spikes. The library computes the full
//! bound-state spectrum by building the 2×2 transfer matrix of the interior
//! potential and root-finding a real residual whose zeros are exactly the
//! eigenenergies. An independent finite-difference eigensolver
//! ([`oracle`]) cross-checks every result.
//!
//! Units: `ℏ²/2m = 1` throughout. Energies and potential heights carry
//! units of length⁻², wavenumbers and delta strengths length⁻¹. Energy
//! zero sits at the well floor — the potential of the element-free
//! interior stretches — and wall heights are measured from there. (A dip
//! or an attractive spike can dig below that floor; states bound down
//! there fall outside the solver's `(0, min(v1, v2))` window.)
//!
//! ```
//! use qwell::potential::{WellSpec, Wall};
//! use qwell::spectrum::{find_bound_states, SolverConfig};
//!
//! // Empty finite well: v = 25, d = 1 — holds two bound states.
//! let spec = WellSpec::new(Wall::Finite(25.0), Wall::Finite(25.0), 1.0, vec![]);
//! let result = find_bound_states(&spec, &SolverConfig::default()).unwrap();
//! assert_eq!(result.energies.len(), 2);
//! ```

pub mod checks;
pub mod error;
pub mod exec;
pub mod oracle;
pub mod potential;
pub mod scattering;
pub mod spectrum;

pub use error::Error;
