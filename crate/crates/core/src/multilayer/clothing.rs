use num_complex::Complex64;
use rayon::prelude::*;

use crate::dielectrics::{DielectricDatabase, Tissue};
use crate::planewave::attenuation_constant;
use crate::{Error, Result};

use super::{solve_layer_fields, LayerStack, PlaneWaveExcitation};

/// Power transmitted through a clothing slab, as fractions of the incident
/// power density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClothingTransmission {
    /// Into the clothing at the air / clothing interface: 1 − |R₀|².
    pub air_clothing: f64,
    /// Into the skin by the two-interface estimate
    /// (1 − |R₀|²)(1 − |R₁|²)e^{−2α₁d_c}, which ignores multiple reflections
    /// inside the clothing.
    pub clothing_skin: f64,
    /// Into the skin from the full multilayer solution.
    pub clothing_skin_full: f64,
}

fn amplitude_reflection(left: Complex64, right: Complex64) -> Complex64 {
    let (n1, n2) = (left.sqrt(), right.sqrt());
    (n1 - n2) / (n1 + n2)
}

/// Transmission coefficients of a stack whose first layer is clothing.
pub fn clothing_transmission(
    stack: &LayerStack,
    frequency: f64,
    db: &DielectricDatabase,
) -> Result<ClothingTransmission> {
    let Some(thickness) = stack.clothing_thickness() else {
        return Err(Error::Usage(
            "clothing transmission needs a stack whose first layer is clothing".into(),
        ));
    };
    let layers = stack.layers();
    let clothing = layers[0].permittivity(frequency, db)?;
    let skin = layers[1].permittivity(frequency, db)?;

    let r0 = amplitude_reflection(Complex64::from(1.0), clothing.to_complex());
    let r1 = amplitude_reflection(clothing.to_complex(), skin.to_complex());
    let alpha = attenuation_constant(clothing, frequency);
    let air_clothing = 1.0 - r0.norm_sqr();
    let clothing_skin = air_clothing * (1.0 - r1.norm_sqr()) * (-2.0 * alpha * thickness).exp();

    let solution = solve_layer_fields(stack, &PlaneWaveExcitation::new(frequency, 1.0)?, db)?;
    Ok(ClothingTransmission {
        air_clothing,
        clothing_skin,
        clothing_skin_full: solution.transmitted_fraction(1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClothingSweepPoint {
    /// m.
    pub thickness: f64,
    pub transmission: ClothingTransmission,
}

/// [`clothing_transmission`] for each clothing thickness, evaluated in
/// parallel and returned in input order.
pub fn clothing_sweep(
    stack: &LayerStack,
    thicknesses: &[f64],
    frequency: f64,
    db: &DielectricDatabase,
) -> Result<Vec<ClothingSweepPoint>> {
    if stack.clothing_thickness().is_none() {
        return Err(Error::Usage("clothing sweep needs a clothed stack".into()));
    }
    thicknesses
        .par_iter()
        .map(|&d| {
            let resized = stack.with_clothing_thickness(d)?;
            Ok(ClothingSweepPoint {
                thickness: d,
                transmission: clothing_transmission(&resized, frequency, db)?,
            })
        })
        .collect()
}

/// Wavelength inside a tabulated tissue, m.
pub fn wavelength_in(tissue: Tissue, frequency: f64, db: &DielectricDatabase) -> Result<f64> {
    let eps = db.tissue_permittivity(tissue, frequency)?.permittivity;
    Ok(2.0 * std::f64::consts::PI / crate::planewave::wavenumber(eps, frequency).re)
}
