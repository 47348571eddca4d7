//! CODATA 2018 constants (SI) and unit conversions to the internal rad/ns scale.

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817_00e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_80e-12;

/// Rad/s per rad/ns.
pub const PER_NS: f64 = 1e9;
/// W/m² per W/cm².
pub const W_PER_CM2: f64 = 1e4;
/// C·m per table dipole unit (10⁻³⁰ C·m).
pub const DIPOLE_UNIT: f64 = 1e-30;
/// s⁻¹ per table Einstein-coefficient unit (10⁸ s⁻¹).
pub const EINSTEIN_UNIT: f64 = 1e8;

/// Angular frequency (rad/s) of light with vacuum wavelength `nm`.
pub fn angular_frequency(nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (nm * 1e-9)
}

/// Squared field amplitude ℰ² (V²/m²) of a plane wave with intensity
/// `w_per_cm2`, using I = ε₀cℰ²/2.
pub fn field_squared(w_per_cm2: f64) -> f64 {
    2.0 * w_per_cm2 * W_PER_CM2 / (EPSILON_0 * SPEED_OF_LIGHT)
}
