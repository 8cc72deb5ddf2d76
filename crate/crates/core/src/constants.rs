//! Physical constants shared by the electromagnetic and thermal solvers.

use std::f64::consts::PI;

/// Permittivity of free space, F/m.
///
/// Rounded to three significant figures on purpose: the bundled tissue tables
/// were converted between conductivity and loss factor with this value, and
/// using the CODATA constant would shift every derived loss factor by ~0.05%.
pub const EPSILON_0: f64 = 8.85e-12;

/// Permeability of free space, H/m. Tissues are treated as non-magnetic.
pub const MU_0: f64 = 4.0e-7 * PI;

/// Speed of light in vacuum, m/s. Used for free-space wavelengths in the
/// regulatory (antenna) calculations.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wave impedance of free space consistent with [`EPSILON_0`] and [`MU_0`], Ω.
pub fn free_space_impedance() -> f64 {
    (MU_0 / EPSILON_0).sqrt()
}

/// Free-space wavenumber ω√(μ₀ε₀), rad/m.
pub fn free_space_wavenumber(frequency: f64) -> f64 {
    2.0 * PI * frequency * (MU_0 * EPSILON_0).sqrt()
}

/// Convective transfer from bare skin to air, W/m²/°C.
pub const SKIN_AIR_HEAT_TRANSFER: f64 = 7.0;

/// Depth below the skin surface at which the temperature elevation is pinned
/// to zero, m.
pub const THERMAL_DEPTH: f64 = 35.0e-3;

pub const DEFAULT_T_AIR: f64 = 23.0;
pub const DEFAULT_T_BLOOD: f64 = 37.0;

pub const GHZ: f64 = 1.0e9;
pub const MM: f64 = 1.0e-3;
