//! Heat conduction in one dimension through a variational potential.
//!
//! The Maxwell-Cattaneo-Vernotte equation `τ T̈ + ϱ c_v Ṫ − λ′ T_xx = 0` is
//! reduced, wavenumber by wavenumber, to a damped oscillator
//! `T̈ + 2λ Ṫ + ω² T = 0`. Each mode is then described by a potential `q`
//! whose image under the adjoint operator `q̈ − 2λ q̇ + ω² q` is the
//! observable temperature. The potential obeys a fourth-order equation with
//! two decaying and two growing branches; the initial state chosen in
//! [`mode_solver::potential_initial_conditions`] removes the growing ones.
//!
//! The guide under `book/` walks through the method chapter by chapter.
//!
//! ```
//! use vheat::model::MaterialParams;
//! use vheat::profile::PiecewiseProfile;
//! use vheat::spectral_field::{build_grid, solve_field, spatial_mean, InitialRate};
//!
//! let material = MaterialParams::silicon();
//! let profile = PiecewiseProfile::silicon_bar();
//! let grid = build_grid(1.0, 64, 128).unwrap();
//! let snaps = solve_field(&material, &profile, &grid, &[0.0, 8.0], &InitialRate::Zero).unwrap();
//! assert!((spatial_mean(&snaps[1]) - 11.5).abs() < 1e-9);
//! ```

pub mod cli;
pub mod error;
pub mod fd_oracle;
pub mod mode_solver;
pub mod model;
pub mod profile;
pub mod spectral_field;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/modes.md")]
    struct Modes;
    #[doc = include_str!("../../../book/src/potential.md")]
    struct Potential;
    #[doc = include_str!("../../../book/src/profile.md")]
    struct Profile;
    #[doc = include_str!("../../../book/src/field.md")]
    struct Field;
    #[doc = include_str!("../../../book/src/oracle.md")]
    struct Oracle;
    #[doc = include_str!("../../../book/src/validation.md")]
    struct Validation;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
