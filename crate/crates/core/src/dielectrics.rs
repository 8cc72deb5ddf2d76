//! Tissue and skin dielectric data.
//!
//! Permittivities use the convention ε* = ε′ − jε″ with e^{+jωt} time
//! dependence, so a passive lossy medium always has ε″ ≥ 0. The bundled tables
//! live in `data/*.csv` and can be replaced by user files with the same
//! columns:
//!
//! * `skin_models.csv`: `model,frequency_GHz,eps_real,eps_imag`
//! * `tissue_dielectric.csv`: `tissue,frequency_GHz,eps_real,sigma,eps_imag`;
//!   each row fills exactly one of `sigma` (S/m) or `eps_imag`, and an empty
//!   `frequency_GHz` marks a frequency-independent entry.
//! * `tissue_thermal.csv`: `tissue,rho,c,k_thermal,w,q_m,thickness_mm` with
//!   perfusion `w` in mL/kg/min and metabolic heat `q_m` in W/m³.
//!
//! Between tabulated frequencies the real part and the loss (ε″ for skin
//! models, σ for tissues) are interpolated linearly and the result is flagged.
//! Nothing is extrapolated.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Deserialize;

use crate::constants::{EPSILON_0, GHZ};
use crate::{Error, Result};

const SKIN_MODELS_CSV: &str = include_str!("../data/skin_models.csv");
const TISSUE_DIELECTRIC_CSV: &str = include_str!("../data/tissue_dielectric.csv");
const TISSUE_THERMAL_CSV: &str = include_str!("../data/tissue_thermal.csv");

/// Relative complex permittivity ε* = ε′ − jε″.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPermittivity {
    eps_real: f64,
    eps_imag: f64,
}

impl ComplexPermittivity {
    pub fn new(eps_real: f64, eps_imag: f64) -> Result<Self> {
        if !(eps_real.is_finite() && eps_real > 0.0) {
            return Err(Error::domain(format!(
                "eps_real must be positive, got {eps_real}"
            )));
        }
        if !(eps_imag.is_finite() && eps_imag >= 0.0) {
            return Err(Error::domain(format!(
                "eps_imag must be non-negative (loss convention ε′ − jε″), got {eps_imag}"
            )));
        }
        Ok(Self { eps_real, eps_imag })
    }

    pub const VACUUM: Self = Self {
        eps_real: 1.0,
        eps_imag: 0.0,
    };

    /// Builds ε* from a real permittivity and a conductivity at `frequency`.
    pub fn from_conductivity(eps_real: f64, sigma: f64, frequency: f64) -> Result<Self> {
        Self::new(eps_real, sigma_to_eps_imag(sigma, frequency)?)
    }

    pub fn eps_real(&self) -> f64 {
        self.eps_real
    }

    pub fn eps_imag(&self) -> f64 {
        self.eps_imag
    }

    /// ε′ − jε″ as a complex number.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.eps_real, -self.eps_imag)
    }

    /// Equivalent conductivity σ = ε″·2πfε₀, S/m.
    pub fn conductivity(&self, frequency: f64) -> Result<f64> {
        eps_imag_to_sigma(self.eps_imag, frequency)
    }

    pub fn is_lossless(&self) -> bool {
        self.eps_imag == 0.0
    }
}

impl fmt::Display for ComplexPermittivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - j{}", self.eps_real, self.eps_imag)
    }
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

/// Loss factor ε″ = σ / (2πfε₀).
pub fn sigma_to_eps_imag(sigma: f64, frequency: f64) -> Result<f64> {
    check_frequency(frequency)?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::domain(format!(
            "conductivity must be non-negative, got {sigma}"
        )));
    }
    Ok(sigma / (2.0 * PI * frequency * EPSILON_0))
}

/// Conductivity σ = ε″·2πfε₀, the inverse of [`sigma_to_eps_imag`].
pub fn eps_imag_to_sigma(eps_imag: f64, frequency: f64) -> Result<f64> {
    check_frequency(frequency)?;
    if !(eps_imag.is_finite() && eps_imag >= 0.0) {
        return Err(Error::domain(format!(
            "eps_imag must be non-negative, got {eps_imag}"
        )));
    }
    Ok(eps_imag * 2.0 * PI * frequency * EPSILON_0)
}

named_enum! {
    /// Published skin permittivity models bundled with the crate.
    SkinModel {
        Gandhi => "Gandhi" | "gandi",
        Gabriel => "Gabriel",
        ChahatPalm => "ChahatPalm",
        ChahatWristForearm => "ChahatWristForearm" | "chahatwrist" | "chahatforearm",
        AlekseevPalm => "AlekseevPalm",
        AlekseevForearm => "AlekseevForearm",
    }
}

named_enum! {
    Tissue {
        Skin => "Skin",
        Sat => "SAT" | "fat" | "subcutaneousadiposetissue",
        Muscle => "Muscle",
        Bone => "Bone",
        Clothing => "Clothing" | "cloth",
        Blood => "Blood",
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkinModelRecord {
    pub model: SkinModel,
    /// Hz.
    pub frequency: f64,
    pub permittivity: ComplexPermittivity,
}

/// How a tabulated tissue expresses its loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loss {
    /// S/m; the loss factor then depends on frequency.
    Conductivity(f64),
    /// Dimensionless ε″, held fixed.
    LossFactor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TissueDielectricRecord {
    pub tissue: Tissue,
    /// Hz; `None` for frequency-independent entries.
    pub frequency: Option<f64>,
    pub eps_real: f64,
    pub loss: Loss,
}

impl TissueDielectricRecord {
    pub fn permittivity_at(&self, frequency: f64) -> Result<ComplexPermittivity> {
        match self.loss {
            Loss::Conductivity(sigma) => {
                ComplexPermittivity::from_conductivity(self.eps_real, sigma, frequency)
            }
            Loss::LossFactor(eps_imag) => ComplexPermittivity::new(self.eps_real, eps_imag),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TissueThermalRecord {
    pub tissue: Tissue,
    /// Mass density, kg/m³.
    pub rho: f64,
    /// Specific heat, J/kg/°C.
    pub c: f64,
    /// Thermal conductivity, W/m/°C.
    pub k_thermal: f64,
    /// Blood perfusion, mL/kg/min.
    pub w: f64,
    /// Metabolic heat, W/m³.
    pub q_m: f64,
    /// Nominal layer thickness, m.
    pub thickness: Option<f64>,
}

impl TissueThermalRecord {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("c", self.c),
            ("k_thermal", self.k_thermal),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{}: {name} must be positive, got {v}",
                    self.tissue
                )));
            }
        }
        for (name, v) in [("w", self.w), ("q_m", self.q_m)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!(
                    "{}: {name} must be non-negative, got {v}",
                    self.tissue
                )));
            }
        }
        Ok(())
    }
}

/// A permittivity together with whether it came from interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookup {
    pub permittivity: ComplexPermittivity,
    pub interpolated: bool,
}

#[derive(Debug, Deserialize)]
struct SkinRow {
    model: SkinModel,
    #[serde(rename = "frequency_GHz")]
    frequency_ghz: f64,
    eps_real: f64,
    eps_imag: f64,
}

#[derive(Debug, Deserialize)]
struct TissueRow {
    tissue: Tissue,
    #[serde(rename = "frequency_GHz")]
    frequency_ghz: Option<f64>,
    eps_real: f64,
    sigma: Option<f64>,
    eps_imag: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct ThermalRow {
    tissue: Tissue,
    rho: f64,
    c: f64,
    k_thermal: f64,
    w: f64,
    q_m: f64,
    thickness_mm: Option<f64>,
}

fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(what: &str, reader: R) -> Result<Vec<T>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader)
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Parse {
            what: what.to_string(),
            message: e.to_string(),
        })
}

/// Skin, tissue and thermal tables. Immutable once built.
#[derive(Debug, Clone)]
pub struct DielectricDatabase {
    skin_models: Vec<SkinModelRecord>,
    tissues: Vec<TissueDielectricRecord>,
    thermal: Vec<TissueThermalRecord>,
}

impl DielectricDatabase {
    /// The tables shipped with the crate.
    pub fn bundled() -> &'static DielectricDatabase {
        static DB: OnceLock<DielectricDatabase> = OnceLock::new();
        DB.get_or_init(|| {
            Self::from_readers(
                SKIN_MODELS_CSV.as_bytes(),
                TISSUE_DIELECTRIC_CSV.as_bytes(),
                TISSUE_THERMAL_CSV.as_bytes(),
            )
            .expect("bundled data tables are well formed")
        })
    }

    pub fn from_readers(skin: impl Read, tissue: impl Read, thermal: impl Read) -> Result<Self> {
        let mut db = Self {
            skin_models: Vec::new(),
            tissues: Vec::new(),
            thermal: Vec::new(),
        };
        db.replace_skin_models(skin)?;
        db.replace_tissues(tissue)?;
        db.replace_thermal(thermal)?;
        Ok(db)
    }

    /// Bundled tables with any of `skin_models.csv`, `tissue_dielectric.csv`
    /// or `tissue_thermal.csv` found in `dir` taking their place.
    pub fn load_overrides(dir: &Path) -> Result<Self> {
        let mut db = Self::bundled().clone();
        let open = |name: &str| -> Result<Option<std::fs::File>> {
            let path = dir.join(name);
            if !path.exists() {
                return Ok(None);
            }
            std::fs::File::open(&path).map(Some).map_err(|e| Error::Io {
                what: path.display().to_string(),
                message: e.to_string(),
            })
        };
        if let Some(f) = open("skin_models.csv")? {
            db.replace_skin_models(f)?;
        }
        if let Some(f) = open("tissue_dielectric.csv")? {
            db.replace_tissues(f)?;
        }
        if let Some(f) = open("tissue_thermal.csv")? {
            db.replace_thermal(f)?;
        }
        Ok(db)
    }

    pub fn replace_skin_models(&mut self, reader: impl Read) -> Result<()> {
        let rows: Vec<SkinRow> = read_rows("skin model table", reader)?;
        let mut out = rows
            .into_iter()
            .map(|r| {
                Ok(SkinModelRecord {
                    model: r.model,
                    frequency: positive_ghz(r.frequency_ghz)?,
                    permittivity: ComplexPermittivity::new(r.eps_real, r.eps_imag)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| {
            (a.model, a.frequency)
                .partial_cmp(&(b.model, b.frequency))
                .unwrap()
        });
        self.skin_models = out;
        Ok(())
    }

    pub fn replace_tissues(&mut self, reader: impl Read) -> Result<()> {
        let rows: Vec<TissueRow> = read_rows("tissue dielectric table", reader)?;
        let mut out = rows
            .into_iter()
            .map(|r| {
                let loss = match (r.sigma, r.eps_imag) {
                    (Some(s), None) if s >= 0.0 => Loss::Conductivity(s),
                    (None, Some(e)) if e >= 0.0 => Loss::LossFactor(e),
                    _ => {
                        return Err(Error::Parse {
                            what: "tissue dielectric table".into(),
                            message: format!(
                                "{}: exactly one non-negative sigma or eps_imag is required",
                                r.tissue
                            ),
                        })
                    }
                };
                if r.eps_real.is_nan() || r.eps_real <= 0.0 {
                    return Err(Error::domain(format!(
                        "{}: eps_real must be positive",
                        r.tissue
                    )));
                }
                Ok(TissueDielectricRecord {
                    tissue: r.tissue,
                    frequency: r.frequency_ghz.map(positive_ghz).transpose()?,
                    eps_real: r.eps_real,
                    loss,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| {
            (a.tissue, a.frequency.unwrap_or(0.0))
                .partial_cmp(&(b.tissue, b.frequency.unwrap_or(0.0)))
                .unwrap()
        });
        self.tissues = out;
        Ok(())
    }

    pub fn replace_thermal(&mut self, reader: impl Read) -> Result<()> {
        let rows: Vec<ThermalRow> = read_rows("tissue thermal table", reader)?;
        self.thermal = rows
            .into_iter()
            .map(|r| {
                let rec = TissueThermalRecord {
                    tissue: r.tissue,
                    rho: r.rho,
                    c: r.c,
                    k_thermal: r.k_thermal,
                    w: r.w,
                    q_m: r.q_m,
                    thickness: r.thickness_mm.map(|t| t * 1e-3),
                };
                rec.validate()?;
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    pub fn skin_models(&self) -> &[SkinModelRecord] {
        &self.skin_models
    }

    pub fn tissue_records(&self) -> &[TissueDielectricRecord] {
        &self.tissues
    }

    pub fn thermal_records(&self) -> &[TissueThermalRecord] {
        &self.thermal
    }

    /// Tabulated value at the listed frequencies, linear interpolation of ε′
    /// and ε″ in between.
    pub fn lookup_skin_model(&self, model: SkinModel, frequency: f64) -> Result<Lookup> {
        check_frequency(frequency)?;
        let points: Vec<(f64, f64, f64)> = self
            .skin_models
            .iter()
            .filter(|r| r.model == model)
            .map(|r| {
                (
                    r.frequency,
                    r.permittivity.eps_real,
                    r.permittivity.eps_imag,
                )
            })
            .collect();
        let (eps_real, eps_imag, interpolated) =
            interpolate(&points, frequency, || model.to_string())?;
        Ok(Lookup {
            permittivity: ComplexPermittivity::new(eps_real, eps_imag)?,
            interpolated,
        })
    }

    /// Permittivity of a tissue layer at `frequency`. Conductivity-based rows
    /// interpolate ε′ and σ; constant rows apply at every frequency.
    pub fn tissue_permittivity(&self, tissue: Tissue, frequency: f64) -> Result<Lookup> {
        check_frequency(frequency)?;
        let rows: Vec<&TissueDielectricRecord> =
            self.tissues.iter().filter(|r| r.tissue == tissue).collect();
        if let Some(constant) = rows.iter().find(|r| r.frequency.is_none()) {
            return Ok(Lookup {
                permittivity: constant.permittivity_at(frequency)?,
                interpolated: false,
            });
        }
        let mut points = Vec::with_capacity(rows.len());
        for r in &rows {
            let Loss::Conductivity(sigma) = r.loss else {
                return Err(Error::Parse {
                    what: "tissue dielectric table".into(),
                    message: format!("{tissue}: frequency-specific rows must give sigma"),
                });
            };
            points.push((r.frequency.unwrap_or_default(), r.eps_real, sigma));
        }
        let (eps_real, sigma, interpolated) =
            interpolate(&points, frequency, || tissue.to_string())?;
        Ok(Lookup {
            permittivity: ComplexPermittivity::from_conductivity(eps_real, sigma, frequency)?,
            interpolated,
        })
    }

    pub fn thermal(&self, tissue: Tissue) -> Result<&TissueThermalRecord> {
        self.thermal
            .iter()
            .find(|r| r.tissue == tissue)
            .ok_or_else(|| Error::MissingData(format!("thermal properties of {tissue}")))
    }
}

fn positive_ghz(ghz: f64) -> Result<f64> {
    if ghz.is_finite() && ghz > 0.0 {
        Ok(ghz * GHZ)
    } else {
        Err(Error::domain(format!(
            "tabulated frequency must be positive, got {ghz} GHz"
        )))
    }
}

/// Piecewise-linear interpolation over `(frequency, a, b)` rows sorted by
/// frequency. Returns whether the result is interpolated.
fn interpolate(
    points: &[(f64, f64, f64)],
    frequency: f64,
    what: impl Fn() -> String,
) -> Result<(f64, f64, bool)> {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return Err(Error::MissingData(what()));
    };
    let tol = 1e-9 * frequency;
    if let Some(p) = points.iter().find(|p| (p.0 - frequency).abs() <= tol) {
        return Ok((p.1, p.2, false));
    }
    if frequency < first.0 || frequency > last.0 {
        return Err(Error::OutOfRange {
            what: what(),
            frequency_ghz: frequency / GHZ,
            min_ghz: first.0 / GHZ,
            max_ghz: last.0 / GHZ,
        });
    }
    let hi = points.partition_point(|p| p.0 < frequency);
    let (lo, hi) = (points[hi - 1], points[hi]);
    let t = (frequency - lo.0) / (hi.0 - lo.0);
    Ok((lo.1 + t * (hi.1 - lo.1), lo.2 + t * (hi.2 - lo.2), true))
}

/// [`DielectricDatabase::lookup_skin_model`] on the bundled tables.
pub fn lookup_skin_model(model: SkinModel, frequency: f64) -> Result<Lookup> {
    DielectricDatabase::bundled().lookup_skin_model(model, frequency)
}

/// [`DielectricDatabase::tissue_permittivity`] on the bundled tables.
pub fn tissue_permittivity(tissue: Tissue, frequency: f64) -> Result<Lookup> {
    DielectricDatabase::bundled().tissue_permittivity(tissue, frequency)
}
