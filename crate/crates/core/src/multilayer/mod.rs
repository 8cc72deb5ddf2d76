//! Normal-incidence plane wave in a stratified tissue stack.
//!
//! Each layer carries forward and backward waves in its own local
//! coordinate, measured from the layer's left face. Global depths start at
//! the first interface (the clothing surface for clothed models).

mod clothing;
mod fields;
mod stack;

pub use clothing::{
    clothing_sweep, clothing_transmission, wavelength_in, ClothingSweepPoint, ClothingTransmission,
};
pub use fields::{
    incident_amplitude, solve_layer_fields, LayerField, LayerFieldSolution, PlaneWaveExcitation,
};
pub use stack::{
    DielectricSource, LayerStack, ModelPreset, TissueLayer, DEFAULT_CLOTHING_THICKNESS,
};
