//! Python bindings. Every quantity is in SI units (Hz, m, W, W/m², °C).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mmdose::bioheat::{solve_steady_theta, ThermalStack};
use mmdose::compliance::{self, DeviceFarFieldDescriptor, ExposureContext, Population, Standard};
use mmdose::dielectrics::{self, DielectricDatabase, SkinModel, Tissue};
use mmdose::multilayer::{
    solve_layer_fields, LayerStack, ModelPreset, PlaneWaveExcitation, DEFAULT_CLOTHING_THICKNESS,
};
use mmdose::planewave::{self, IncidenceGeometry, Polarization};

fn err(e: mmdose::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = mmdose::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Complex relative permittivity ε′ − jε″.
#[pyclass(name = "Permittivity", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Permittivity(dielectrics::ComplexPermittivity);

#[pymethods]
impl Permittivity {
    #[new]
    fn new(eps_real: f64, eps_imag: f64) -> PyResult<Self> {
        dielectrics::ComplexPermittivity::new(eps_real, eps_imag)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_conductivity(eps_real: f64, sigma: f64, frequency: f64) -> PyResult<Self> {
        dielectrics::ComplexPermittivity::from_conductivity(eps_real, sigma, frequency)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn eps_real(&self) -> f64 {
        self.0.eps_real()
    }

    #[getter]
    fn eps_imag(&self) -> f64 {
        self.0.eps_imag()
    }

    /// S/m.
    fn conductivity(&self, frequency: f64) -> PyResult<f64> {
        self.0.conductivity(frequency).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Permittivity({}, {})", self.0.eps_real(), self.0.eps_imag())
    }
}

#[pyfunction]
fn sigma_to_eps_imag(sigma: f64, frequency: f64) -> PyResult<f64> {
    dielectrics::sigma_to_eps_imag(sigma, frequency).map_err(err)
}

#[pyfunction]
fn eps_imag_to_sigma(eps_imag: f64, frequency: f64) -> PyResult<f64> {
    dielectrics::eps_imag_to_sigma(eps_imag, frequency).map_err(err)
}

/// Skin permittivity of a published model, e.g. `"Gabriel"`.
#[pyfunction]
fn skin_permittivity(model: &str, frequency: f64) -> PyResult<Permittivity> {
    let lookup =
        dielectrics::lookup_skin_model(parse::<SkinModel>(model)?, frequency).map_err(err)?;
    Ok(Permittivity(lookup.permittivity))
}

/// Tabulated permittivity of a tissue, interpolated between table rows.
#[pyfunction]
fn tissue_permittivity(tissue: &str, frequency: f64) -> PyResult<Permittivity> {
    let lookup =
        dielectrics::tissue_permittivity(parse::<Tissue>(tissue)?, frequency).map_err(err)?;
    Ok(Permittivity(lookup.permittivity))
}

#[pyfunction]
fn skin_models() -> Vec<&'static str> {
    SkinModel::ALL.iter().map(|m| m.name()).collect()
}

/// Power reflectance at an air/medium interface; `theta` in radians.
#[pyfunction]
#[pyo3(signature = (eps, theta=0.0, polarization="parallel"))]
fn reflectance(eps: Permittivity, theta: f64, polarization: &str) -> PyResult<f64> {
    let geometry = IncidenceGeometry::new(theta).map_err(err)?;
    let pol = parse::<Polarization>(polarization)?;
    Ok(planewave::power_coefficients(eps.0, geometry, pol).reflectance)
}

/// Angle of minimum parallel reflectance, radians.
#[pyfunction]
fn brewster_angle(eps: Permittivity) -> PyResult<f64> {
    planewave::brewster_angle(eps.0).map_err(err)
}

/// 1/α, m.
#[pyfunction]
fn penetration_depth(eps: Permittivity, frequency: f64) -> PyResult<f64> {
    planewave::penetration_depth(eps.0, frequency).map_err(err)
}

/// Fields and steady temperature rise for one of the four tissue presets.
#[pyclass(frozen)]
struct Exposure {
    fields: mmdose::multilayer::LayerFieldSolution,
    thermal: mmdose::bioheat::ThermalSolution,
}

#[pymethods]
impl Exposure {
    #[getter]
    fn reflectance(&self) -> f64 {
        self.fields.reflectance()
    }

    /// W/m² absorbed in each layer, surface first.
    #[getter]
    fn absorbed_per_layer(&self) -> Vec<f64> {
        self.fields.absorbed_per_layer()
    }

    /// SAR·ρ in W/m³ at depths measured from the first interface.
    fn sar_rho(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.fields.sar_rho_profile(&z).map_err(err)
    }

    /// Temperature rise in °C at depths measured from the skin surface.
    fn theta(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.thermal.profile(&z).map_err(err)
    }

    #[getter]
    fn surface_theta(&self) -> f64 {
        self.thermal.surface_theta()
    }
}

/// Solves a preset (`1`-`4` or a name such as `"naked-skin"`).
#[pyfunction]
#[pyo3(signature = (preset, frequency, power_density, clothing_thickness=None, skin_model=None))]
fn solve_preset(
    preset: &str,
    frequency: f64,
    power_density: f64,
    clothing_thickness: Option<f64>,
    skin_model: Option<&str>,
) -> PyResult<Exposure> {
    let db = DielectricDatabase::bundled();
    let preset = parse::<ModelPreset>(preset)?;
    let mut stack = LayerStack::preset(
        preset,
        clothing_thickness.unwrap_or(DEFAULT_CLOTHING_THICKNESS),
    )
    .map_err(err)?;
    if let Some(m) = skin_model {
        stack = stack.with_skin_model(parse(m)?);
    }
    let excitation = PlaneWaveExcitation::new(frequency, power_density).map_err(err)?;
    let fields = solve_layer_fields(&stack, &excitation, db).map_err(err)?;
    let thermal = ThermalStack::from_stack(&stack, db)
        .and_then(|t| solve_steady_theta(&t, &fields))
        .map_err(err)?;
    Ok(Exposure { fields, thermal })
}

#[pyclass(frozen, get_all)]
struct ComplianceReport {
    verdict: String,
    power_density: Option<f64>,
    limit: f64,
    margin_db: Option<f64>,
    fraunhofer_distance: f64,
    evaluation_boundary: f64,
    source_clause: String,
    text: String,
}

#[pymethods]
impl ComplianceReport {
    fn __repr__(&self) -> String {
        self.text.clone()
    }
}

/// Far-field check of a device against an exposure standard.
#[pyfunction]
#[pyo3(signature = (
    radiated_power, gain_dbi, largest_dimension, distance, frequency,
    standard="ICNIRP", population="general-public", localized_peak=false
))]
#[allow(clippy::too_many_arguments)]
fn evaluate_compliance(
    radiated_power: f64,
    gain_dbi: f64,
    largest_dimension: f64,
    distance: f64,
    frequency: f64,
    standard: &str,
    population: &str,
    localized_peak: bool,
) -> PyResult<ComplianceReport> {
    let device = DeviceFarFieldDescriptor::new(
        radiated_power,
        compliance::gain_from_db(gain_dbi),
        largest_dimension,
        distance,
        frequency,
    )
    .map_err(err)?;
    let context = ExposureContext::new(
        parse::<Standard>(standard)?,
        parse::<Population>(population)?,
        frequency,
        localized_peak,
    )
    .map_err(err)?;
    let r = compliance::evaluate(&device, &context).map_err(err)?;
    Ok(ComplianceReport {
        verdict: r.verdict.to_string(),
        power_density: r.power_density,
        limit: r.limit.pd_limit,
        margin_db: r.margin_db,
        fraunhofer_distance: r.fraunhofer_distance,
        evaluation_boundary: r.evaluation_boundary,
        source_clause: r.limit.source_clause.clone(),
        text: r.to_string(),
    })
}

#[pymodule]
fn mmdose_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Permittivity>()?;
    m.add_class::<Exposure>()?;
    m.add_class::<ComplianceReport>()?;
    m.add_function(wrap_pyfunction!(sigma_to_eps_imag, m)?)?;
    m.add_function(wrap_pyfunction!(eps_imag_to_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(skin_permittivity, m)?)?;
    m.add_function(wrap_pyfunction!(tissue_permittivity, m)?)?;
    m.add_function(wrap_pyfunction!(skin_models, m)?)?;
    m.add_function(wrap_pyfunction!(reflectance, m)?)?;
    m.add_function(wrap_pyfunction!(brewster_angle, m)?)?;
    m.add_function(wrap_pyfunction!(penetration_depth, m)?)?;
    m.add_function(wrap_pyfunction!(solve_preset, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_compliance, m)?)?;
    Ok(())
}
