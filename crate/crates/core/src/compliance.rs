//! Power-density exposure limits above 6 GHz and far-field dose estimates.
//!
//! Limits come from a TOML catalog of clauses, each a power law in frequency
//! over a half-open band. The bundled catalog covers ICNIRP, the FCC MPE, the
//! ANSI/IEEE C95.1-1992 partial-body peak relaxation and the IEEE C95.1-2005
//! localized peak; [`LimitCatalog::from_toml_str`] accepts a replacement.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::constants::{GHZ, SPEED_OF_LIGHT};
use crate::{Error, Result};

const BUNDLED_LIMITS: &str = include_str!("../data/limits.toml");

/// Closest distance at which power density is considered measurable, m.
pub const MIN_MEASUREMENT_DISTANCE: f64 = 0.05;

named_enum! {
    Standard {
        Icnirp => "ICNIRP",
        FccMpe => "FCC_MPE" | "fcc",
        Ieee1992Peak => "IEEE_1992_peak" | "ieee1992" | "ansi1992" | "c9511992",
        Ieee2005 => "IEEE_2005" | "ieee2005peak" | "c9512005",
    }
}

named_enum! {
    Population {
        GeneralPublic => "general-public" | "general" | "public" | "uncontrolled" | "generalpublicuncontrolled",
        Occupational => "occupational" | "controlled" | "occupationalcontrolled",
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureContext {
    pub standard: Standard,
    pub population: Population,
    /// Hz.
    pub frequency: f64,
    /// Ask for the localized spatial-peak limit instead of the spatially
    /// averaged one. Ignored by standards that only define one of the two.
    pub localized_peak: bool,
}

impl ExposureContext {
    pub fn new(
        standard: Standard,
        population: Population,
        frequency: f64,
        localized_peak: bool,
    ) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::domain(format!(
                "frequency must be positive, got {frequency} Hz"
            )));
        }
        Ok(Self {
            standard,
            population,
            frequency,
            localized_peak,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AveragingArea {
    SquareMetres(f64),
    /// Projected area of the whole body.
    WholeBodyProjected,
    /// The clause gives no averaging area.
    Unspecified,
}

impl fmt::Display for AveragingArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AveragingArea::SquareMetres(a) => write!(f, "{} cm2", a * 1e4),
            AveragingArea::WholeBodyProjected => f.write_str("whole-body projected area"),
            AveragingArea::Unspecified => f.write_str("unspecified"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRecord {
    pub standard: Standard,
    pub population: Population,
    pub localized_peak: bool,
    /// Band of the clause that applied, GHz.
    pub band_ghz: (f64, f64),
    /// W/m².
    pub pd_limit: f64,
    pub averaging_area: AveragingArea,
    /// Minutes.
    pub averaging_time: f64,
    pub source_clause: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Exposure {
    Basic,
    Peak,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
enum FrequencyUnit {
    GHz,
    MHz,
}

fn one() -> f64 {
    1.0
}

/// coefficient · (f / reference)^exponent with f in `unit`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerLaw {
    coefficient: f64,
    #[serde(default = "one")]
    reference: f64,
    #[serde(default)]
    exponent: f64,
    #[serde(default = "default_unit")]
    unit: FrequencyUnit,
}

fn default_unit() -> FrequencyUnit {
    FrequencyUnit::GHz
}

impl PowerLaw {
    fn eval(&self, frequency: f64) -> f64 {
        let f = match self.unit {
            FrequencyUnit::GHz => frequency / GHZ,
            FrequencyUnit::MHz => frequency / 1e6,
        };
        if self.exponent == 0.0 {
            self.coefficient
        } else {
            self.coefficient * (f / self.reference).powf(self.exponent)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
enum AreaRule {
    Fixed {
        cm2: f64,
    },
    ProjectedBody,
    /// `multiple` · λ² with λ in cm, giving cm².
    WavelengthSquared {
        multiple: f64,
    },
    Unspecified,
}

impl AreaRule {
    fn resolve(&self, frequency: f64) -> AveragingArea {
        match *self {
            AreaRule::Fixed { cm2 } => AveragingArea::SquareMetres(cm2 * 1e-4),
            AreaRule::ProjectedBody => AveragingArea::WholeBodyProjected,
            AreaRule::WavelengthSquared { multiple } => {
                let lambda_cm = SPEED_OF_LIGHT / frequency * 100.0;
                AveragingArea::SquareMetres(multiple * lambda_cm * lambda_cm * 1e-4)
            }
            AreaRule::Unspecified => AveragingArea::Unspecified,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct StandardEntry {
    id: Standard,
    title: String,
    min_ghz: f64,
    max_ghz: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Clause {
    standard: Standard,
    population: Population,
    exposure: Exposure,
    min_ghz: f64,
    max_ghz: f64,
    pd: PowerLaw,
    averaging_area: AreaRule,
    averaging_time: PowerLaw,
    source_clause: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    standard: Vec<StandardEntry>,
    clause: Vec<Clause>,
}

#[derive(Debug, Clone)]
pub struct LimitCatalog {
    standards: Vec<StandardEntry>,
    clauses: Vec<Clause>,
}

impl LimitCatalog {
    pub fn bundled() -> &'static LimitCatalog {
        static CATALOG: OnceLock<LimitCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            LimitCatalog::from_toml_str(BUNDLED_LIMITS).expect("bundled limit catalog is valid")
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| Error::Parse {
            what: "limit catalog".into(),
            message: e.to_string(),
        })?;
        for s in &file.standard {
            if !(s.min_ghz > 0.0 && s.min_ghz < s.max_ghz) {
                return Err(Error::domain(format!(
                    "{}: invalid band {}-{} GHz",
                    s.id, s.min_ghz, s.max_ghz
                )));
            }
        }
        for c in &file.clause {
            let Some(scope) = file.standard.iter().find(|s| s.id == c.standard) else {
                return Err(Error::MissingData(format!(
                    "standard entry for {}",
                    c.standard
                )));
            };
            if !(c.min_ghz < c.max_ghz && c.min_ghz >= scope.min_ghz && c.max_ghz <= scope.max_ghz)
            {
                return Err(Error::domain(format!(
                    "{} clause band {}-{} GHz is not inside {}-{} GHz",
                    c.standard, c.min_ghz, c.max_ghz, scope.min_ghz, scope.max_ghz
                )));
            }
            for f in [c.min_ghz, c.max_ghz] {
                let pd = c.pd.eval(f * GHZ);
                let t = c.averaging_time.eval(f * GHZ);
                if !(pd.is_finite() && pd > 0.0 && t.is_finite() && t > 0.0) {
                    return Err(Error::domain(format!(
                        "{} clause at {f} GHz gives non-positive limit or averaging time",
                        c.standard
                    )));
                }
            }
        }
        Ok(Self {
            standards: file.standard,
            clauses: file.clause,
        })
    }

    /// Applicability band of a standard, GHz.
    pub fn band(&self, standard: Standard) -> Result<(f64, f64)> {
        self.entry(standard).map(|s| (s.min_ghz, s.max_ghz))
    }

    pub fn title(&self, standard: Standard) -> Result<&str> {
        self.entry(standard).map(|s| s.title.as_str())
    }

    fn entry(&self, standard: Standard) -> Result<&StandardEntry> {
        self.standards
            .iter()
            .find(|s| s.id == standard)
            .ok_or_else(|| Error::MissingData(format!("limit catalog entry for {standard}")))
    }

    /// Limit record for a context. Bands are half-open `[min, max)` except
    /// at the top of a standard's range, so a shared edge belongs to the
    /// upper clause.
    pub fn limit_for(&self, context: &ExposureContext) -> Result<LimitRecord> {
        let (min, max) = self.band(context.standard)?;
        let f_ghz = context.frequency / GHZ;
        if !(f_ghz >= min && f_ghz <= max) {
            return Err(Error::OutOfScope {
                standard: context.standard.to_string(),
                frequency_ghz: f_ghz,
                min_ghz: min,
                max_ghz: max,
            });
        }
        let wanted = if context.localized_peak {
            Exposure::Peak
        } else {
            Exposure::Basic
        };
        let candidates: Vec<&Clause> = self
            .clauses
            .iter()
            .filter(|c| {
                c.standard == context.standard
                    && c.population == context.population
                    && (c.exposure == wanted || c.exposure == Exposure::Any)
                    && f_ghz >= c.min_ghz
                    && f_ghz <= c.max_ghz
            })
            .collect();
        let clause = candidates
            .iter()
            .find(|c| f_ghz < c.max_ghz)
            .or_else(|| candidates.first())
            .ok_or_else(|| {
                let kind = if context.localized_peak {
                    "localized-peak"
                } else {
                    "spatially averaged"
                };
                Error::MissingData(format!(
                    "{} defines no {kind} power-density limit for the {} population at {f_ghz} GHz",
                    context.standard, context.population
                ))
            })?;
        Ok(LimitRecord {
            standard: context.standard,
            population: context.population,
            localized_peak: clause.exposure == Exposure::Peak
                || (clause.exposure == Exposure::Any && context.localized_peak),
            band_ghz: (clause.min_ghz, clause.max_ghz),
            pd_limit: clause.pd.eval(context.frequency),
            averaging_area: clause.averaging_area.resolve(context.frequency),
            averaging_time: clause.averaging_time.eval(context.frequency),
            source_clause: clause.source_clause.clone(),
        })
    }
}

/// Limit from the bundled catalog.
pub fn limit_for(context: &ExposureContext) -> Result<LimitRecord> {
    LimitCatalog::bundled().limit_for(context)
}

/// Converts an antenna gain in dBi to a linear power ratio.
pub fn gain_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Far-field boundary 2D²/λ of an aperture with largest dimension `d`, m.
pub fn fraunhofer_distance(largest_dimension: f64, frequency: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / frequency;
    2.0 * largest_dimension * largest_dimension / lambda
}

/// Isotropic spreading G·P/(4πd²), W/m², with no far-field check.
pub fn free_space_pd(radiated_power: f64, gain: f64, distance: f64) -> f64 {
    gain * radiated_power / (4.0 * PI * distance * distance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceFarFieldDescriptor {
    /// W.
    pub radiated_power: f64,
    /// Linear.
    pub antenna_gain: f64,
    /// Largest antenna dimension, m.
    pub largest_dimension: f64,
    /// Distance from the antenna, m.
    pub distance: f64,
    /// Carrier frequency, Hz.
    pub frequency: f64,
}

impl DeviceFarFieldDescriptor {
    pub fn new(
        radiated_power: f64,
        antenna_gain: f64,
        largest_dimension: f64,
        distance: f64,
        frequency: f64,
    ) -> Result<Self> {
        let fields = [
            ("radiated power", radiated_power),
            ("antenna gain", antenna_gain),
            ("largest dimension", largest_dimension),
            ("distance", distance),
            ("frequency", frequency),
        ];
        for (what, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{what} must be positive, got {v}")));
            }
        }
        Ok(Self {
            radiated_power,
            antenna_gain,
            largest_dimension,
            distance,
            frequency,
        })
    }

    pub fn with_distance(self, distance: f64) -> Result<Self> {
        Self::new(
            self.radiated_power,
            self.antenna_gain,
            self.largest_dimension,
            distance,
            self.frequency,
        )
    }

    pub fn fraunhofer_distance(&self) -> f64 {
        fraunhofer_distance(self.largest_dimension, self.frequency)
    }

    /// Distance below which a power-density verdict is refused, m.
    pub fn evaluation_boundary(&self) -> f64 {
        self.fraunhofer_distance().max(MIN_MEASUREMENT_DISTANCE)
    }
}

/// Far-field power density at the descriptor's distance, W/m². Refused
/// inside the Fraunhofer distance.
pub fn far_field_pd(device: &DeviceFarFieldDescriptor) -> Result<f64> {
    let boundary = device.fraunhofer_distance();
    if device.distance < boundary {
        return Err(Error::NearField {
            distance_m: device.distance,
            boundary_m: boundary,
        });
    }
    Ok(free_space_pd(
        device.radiated_power,
        device.antenna_gain,
        device.distance,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Compliant,
    NonCompliant,
    NearFieldIndeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Compliant => "Compliant",
            Verdict::NonCompliant => "NonCompliant",
            Verdict::NearFieldIndeterminate => "NearFieldIndeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceReport {
    pub context: ExposureContext,
    pub device: DeviceFarFieldDescriptor,
    pub limit: LimitRecord,
    /// m.
    pub fraunhofer_distance: f64,
    /// max(5 cm, Fraunhofer distance), m.
    pub evaluation_boundary: f64,
    /// W/m²; `None` when the estimate is refused.
    pub power_density: Option<f64>,
    pub verdict: Verdict,
    /// 10·log10(limit / PD); positive when below the limit.
    pub margin_db: Option<f64>,
}

/// Compares the far-field estimate for `device` against the limit of
/// `context`. Inside max(5 cm, Fraunhofer distance) no verdict is given.
pub fn evaluate(
    device: &DeviceFarFieldDescriptor,
    context: &ExposureContext,
) -> Result<ComplianceReport> {
    if (device.frequency - context.frequency).abs() > 1e-9 * context.frequency {
        return Err(Error::Usage(format!(
            "device frequency {} GHz differs from exposure frequency {} GHz",
            device.frequency / GHZ,
            context.frequency / GHZ
        )));
    }
    let limit = limit_for(context)?;
    let fraunhofer = device.fraunhofer_distance();
    let boundary = device.evaluation_boundary();
    let (power_density, verdict, margin_db) = if device.distance < boundary {
        (None, Verdict::NearFieldIndeterminate, None)
    } else {
        let pd = far_field_pd(device)?;
        let verdict = if pd <= limit.pd_limit {
            Verdict::Compliant
        } else {
            Verdict::NonCompliant
        };
        (
            Some(pd),
            verdict,
            Some(10.0 * (limit.pd_limit / pd).log10()),
        )
    };
    Ok(ComplianceReport {
        context: *context,
        device: *device,
        limit,
        fraunhofer_distance: fraunhofer,
        evaluation_boundary: boundary,
        power_density,
        verdict,
        margin_db,
    })
}

impl fmt::Display for ComplianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.context;
        let d = &self.device;
        let l = &self.limit;
        let kind = if l.localized_peak {
            "localized peak"
        } else {
            "spatial average"
        };
        writeln!(
            f,
            "standard:            {} ({}, {kind})",
            c.standard, c.population
        )?;
        writeln!(f, "frequency:           {} GHz", c.frequency / GHZ)?;
        writeln!(f, "radiated power:      {} W", d.radiated_power)?;
        writeln!(f, "antenna gain:        {} (linear)", d.antenna_gain)?;
        writeln!(f, "distance:            {} m", d.distance)?;
        writeln!(f, "fraunhofer distance: {} m", self.fraunhofer_distance)?;
        writeln!(f, "limit:               {} W/m2", l.pd_limit)?;
        writeln!(f, "averaging area:      {}", l.averaging_area)?;
        writeln!(f, "averaging time:      {} min", l.averaging_time)?;
        writeln!(f, "clause:              {}", l.source_clause)?;
        match (self.power_density, self.margin_db) {
            (Some(pd), Some(margin)) => {
                writeln!(f, "power density:       {pd} W/m2")?;
                writeln!(f, "margin:              {margin} dB")?;
            }
            _ => writeln!(
                f,
                "power density:       not estimated; distance is inside {} m, model the near field instead",
                self.evaluation_boundary
            )?,
        }
        write!(f, "verdict:             {}", self.verdict)
    }
}
