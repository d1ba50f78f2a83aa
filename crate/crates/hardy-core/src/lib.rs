//! Numerical verification engine for critical Hardy, Hardy–Sobolev, and
//! uncertainty-type inequalities in the radial (one-dimensional) reduction,
//! together with full-dimensional Euclidean cross-checks.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`] — anisotropic dilation structures and homogeneous quasi-norms;
//! * [`profile`] — radial test profiles `g(r)` with exact derivatives;
//! * [`quad`] — adaptive Gauss–Kronrod quadrature with logarithmic endpoint
//!   substitutions tuned for weights like `1/(r |log(R/r)|^p)`;
//! * [`suite`] — the inequality verifiers and the exact remainder identity;
//! * [`sharpness`] — near-extremal families and constant-sharpness sweeps;
//! * [`cartesian`] — n-dimensional box integration (tensor Gauss and seeded
//!   Monte Carlo) used to validate the radial reduction against full
//!   gradients on Euclidean space.
//!
//! Everything is deterministic: integration orders, parallel merges, and
//! Monte Carlo substreams are all fixed by the inputs (and an explicit seed),
//! never by thread timing.

pub mod cartesian;
pub mod group;
pub mod profile;
pub mod quad;
pub mod sharpness;
pub mod suite;

/// Complex scalar used for profile values throughout the crate.
pub type C64 = num_complex::Complex64;
