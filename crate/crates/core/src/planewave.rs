//! Plane-wave optics of a single air / lossy half-space interface.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::constants::free_space_wavenumber;
use crate::dielectrics::ComplexPermittivity;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// E-field in the plane of incidence (TM).
    Parallel,
    /// E-field normal to the plane of incidence (TE).
    Perpendicular,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::Parallel, Polarization::Perpendicular];

    pub fn name(self) -> &'static str {
        match self {
            Polarization::Parallel => "parallel",
            Polarization::Perpendicular => "perpendicular",
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "parallel" | "par" | "tm" | "p" => Ok(Polarization::Parallel),
            "perpendicular" | "perp" | "te" | "s" => Ok(Polarization::Perpendicular),
            _ => Err(Error::Parse {
                what: "polarization".into(),
                message: format!("unknown value {s:?}"),
            }),
        }
    }
}

/// Angle of incidence measured from the surface normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceGeometry {
    theta_i: f64,
}

impl IncidenceGeometry {
    pub fn new(theta_i: f64) -> Result<Self> {
        if theta_i.is_finite() && (0.0..FRAC_PI_2).contains(&theta_i) {
            Ok(Self { theta_i })
        } else {
            Err(Error::domain(format!(
                "incidence angle must lie in [0, 90) degrees, got {}",
                theta_i.to_degrees()
            )))
        }
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    pub const NORMAL: Self = Self { theta_i: 0.0 };

    pub fn theta_i(&self) -> f64 {
        self.theta_i
    }
}

/// Complex amplitude reflection coefficient from air into the half-space.
///
/// Uses the principal square root of ε* − sin²θ, which keeps the transmitted
/// wave decaying away from the interface.
pub fn reflection_coefficient(
    eps: ComplexPermittivity,
    geometry: IncidenceGeometry,
    pol: Polarization,
) -> Complex64 {
    let eps = eps.to_complex();
    let (sin, cos) = geometry.theta_i.sin_cos();
    let root = (eps - sin * sin).sqrt();
    match pol {
        Polarization::Parallel => (-eps * cos + root) / (eps * cos + root),
        Polarization::Perpendicular => (cos - root) / (cos + root),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoefficients {
    pub reflectance: f64,
    pub transmittance: f64,
}

/// |R|² and 1 − |R|².
pub fn power_coefficients(
    eps: ComplexPermittivity,
    geometry: IncidenceGeometry,
    pol: Polarization,
) -> PowerCoefficients {
    let reflectance = reflection_coefficient(eps, geometry, pol).norm_sqr();
    PowerCoefficients {
        reflectance,
        transmittance: 1.0 - reflectance,
    }
}

/// Incidence angle minimising the parallel-polarised reflectance, in radians.
///
/// For a lossless medium this is the true Brewster angle atan(√ε′); for a
/// lossy one the minimum stays above zero (pseudo-Brewster angle).
pub fn brewster_angle(eps: ComplexPermittivity) -> Result<f64> {
    if eps.eps_real() <= 1.0 {
        return Err(Error::domain(format!(
            "Brewster search needs eps_real > 1, got {}",
            eps.eps_real()
        )));
    }
    let reflectance = |theta: f64| {
        reflection_coefficient(
            eps,
            IncidenceGeometry { theta_i: theta },
            Polarization::Parallel,
        )
        .norm_sqr()
    };

    let tol = 1e-4_f64.to_radians();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, FRAC_PI_2);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (reflectance(c), reflectance(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = reflectance(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = reflectance(d);
        }
    }
    let theta = 0.5 * (a + b);
    let best = reflectance(theta);

    // Golden-section only finds the global minimum of a unimodal profile.
    let coarse_min = (0..900)
        .map(|i| reflectance((i as f64 * 0.1).to_radians()))
        .fold(f64::INFINITY, f64::min);
    if coarse_min < best - 1e-9 {
        return Err(Error::numeric(format!(
            "reflectance profile is not unimodal: golden-section minimum {best:e} \
             exceeds scanned minimum {coarse_min:e}"
        )));
    }
    Ok(theta)
}

/// Complex wavenumber k = β − jα = ω√(μ₀ε₀ε*) on the decaying branch.
pub fn wavenumber(eps: ComplexPermittivity, frequency: f64) -> Complex64 {
    free_space_wavenumber(frequency) * eps.to_complex().sqrt()
}

/// Attenuation constant α, Np/m.
pub fn attenuation_constant(eps: ComplexPermittivity, frequency: f64) -> f64 {
    -wavenumber(eps, frequency).im
}

fn check_frequency(frequency: f64) -> Result<()> {
    if frequency.is_finite() && frequency > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "frequency must be positive, got {frequency} Hz"
        )))
    }
}

/// Depth 1/α at which the transmitted power density has fallen to 1/e², m.
pub fn penetration_depth(eps: ComplexPermittivity, frequency: f64) -> Result<f64> {
    check_frequency(frequency)?;
    if eps.is_lossless() {
        return Err(Error::InfiniteDepth);
    }
    Ok(1.0 / attenuation_constant(eps, frequency))
}

/// Depth within which `fraction` of the transmitted power is absorbed,
/// −ln(1 − fraction)/(2α), m.
pub fn absorption_depth(eps: ComplexPermittivity, frequency: f64, fraction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::domain(format!(
            "absorbed fraction must lie in [0, 1), got {fraction}"
        )));
    }
    let depth = penetration_depth(eps, frequency)?;
    Ok(-(1.0 - fraction).ln() * depth / 2.0)
}
