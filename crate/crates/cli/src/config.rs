use std::path::{Path, PathBuf};

use mmdose::constants::{DEFAULT_T_AIR, DEFAULT_T_BLOOD, GHZ, MM};
use mmdose::dielectrics::{ComplexPermittivity, DielectricDatabase, SkinModel, Tissue};
use mmdose::multilayer::{
    DielectricSource, LayerStack, ModelPreset, PlaneWaveExcitation, TissueLayer,
    DEFAULT_CLOTHING_THICKNESS,
};
use mmdose::{Error, Result};
use serde::Deserialize;

/// Scenario file. Every field is optional; command-line flags take
/// precedence over values read here.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// `1`-`4` or a preset name such as `naked-skin`.
    pub preset: Option<PresetName>,
    /// Custom stack, surface first; the last layer has no thickness.
    pub layers: Option<Vec<LayerConfig>>,
    pub frequency_ghz: Option<f64>,
    /// W/m².
    pub incident_pd: Option<f64>,
    pub skin_model: Option<SkinModel>,
    pub clothing_thickness_mm: Option<f64>,
    pub t_air: Option<f64>,
    pub t_blood: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PresetName {
    Number(u8),
    Name(String),
}

impl PresetName {
    fn resolve(&self) -> Result<ModelPreset> {
        match self {
            PresetName::Number(n) => n.to_string().parse(),
            PresetName::Name(s) => s.parse(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub tissue: Tissue,
    /// Omitted for the semi-infinite last layer.
    pub thickness_mm: Option<f64>,
    /// Fixed permittivity instead of the tissue table.
    pub eps_real: Option<f64>,
    pub eps_imag: Option<f64>,
    /// Published skin model instead of the tissue table.
    pub skin_model: Option<SkinModel>,
}

impl LayerConfig {
    fn build(&self, index: usize) -> Result<TissueLayer> {
        let mut layer = match self.thickness_mm {
            Some(d) => TissueLayer::new(self.tissue, d * MM),
            None => TissueLayer::semi_infinite(self.tissue),
        };
        match (self.eps_real, self.eps_imag, self.skin_model) {
            (None, None, None) => {}
            (Some(re), Some(im), None) => {
                layer = layer
                    .with_dielectric(DielectricSource::Fixed(ComplexPermittivity::new(re, im)?));
            }
            (None, None, Some(m)) => layer = layer.with_dielectric(DielectricSource::SkinModel(m)),
            _ => {
                return Err(Error::Usage(format!(
                    "layer {index}: give both eps_real and eps_imag, or a skin_model, not a mix"
                )))
            }
        }
        Ok(layer)
    }
}

pub fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        what: path.display().to_string(),
        message: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Scenario values given on the command line.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct ScenarioFlags {
    /// Model preset: 1-4 or naked-skin, naked-forehead, clothed-skin, hat-on-forehead.
    #[arg(long)]
    pub preset: Option<String>,
    /// Frequency, GHz.
    #[arg(long = "frequency", value_name = "GHZ")]
    pub frequency_ghz: Option<f64>,
    /// Incident power density, W/m².
    #[arg(long = "pd", value_name = "W_PER_M2")]
    pub incident_pd: Option<f64>,
    /// Skin permittivity from a published model instead of the tissue table.
    #[arg(long)]
    pub skin_model: Option<SkinModel>,
    /// Clothing thickness of the clothed presets, mm.
    #[arg(long = "clothing", value_name = "MM")]
    pub clothing_thickness_mm: Option<f64>,
    /// Air temperature, °C.
    #[arg(long)]
    pub t_air: Option<f64>,
    /// Blood temperature, °C.
    #[arg(long)]
    pub t_blood: Option<f64>,
}

/// A validated scenario, ready to solve.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub stack: LayerStack,
    pub excitation: PlaneWaveExcitation,
    pub t_air: f64,
    pub t_blood: f64,
}

impl Scenario {
    pub fn frequency(&self) -> f64 {
        self.excitation.frequency()
    }
}

pub fn resolve(
    config: &ScenarioConfig,
    flags: &ScenarioFlags,
    db: &DielectricDatabase,
) -> Result<Scenario> {
    let preset = match &flags.preset {
        Some(p) => Some(p.parse::<ModelPreset>()?),
        None => config
            .preset
            .as_ref()
            .map(PresetName::resolve)
            .transpose()?,
    };
    let clothing = flags.clothing_thickness_mm.or(config.clothing_thickness_mm);
    let mut stack = match (preset, &config.layers) {
        (Some(_), Some(_)) if flags.preset.is_none() => {
            return Err(Error::Usage(
                "config gives both a preset and a layer list".into(),
            ))
        }
        (Some(p), _) => {
            LayerStack::preset(p, clothing.map_or(DEFAULT_CLOTHING_THICKNESS, |d| d * MM))?
        }
        (None, Some(layers)) => {
            let built = layers
                .iter()
                .enumerate()
                .map(|(i, l)| l.build(i))
                .collect::<Result<Vec<_>>>()?;
            LayerStack::new(built)?
        }
        (None, None) => LayerStack::preset(ModelPreset::NakedSkin, DEFAULT_CLOTHING_THICKNESS)?,
    };
    if let Some(d) = clothing {
        if stack.clothing_thickness().is_some() {
            stack = stack.with_clothing_thickness(d * MM)?;
        } else if flags.clothing_thickness_mm.is_some() {
            return Err(Error::Usage(
                "--clothing needs a stack with a clothing layer".into(),
            ));
        }
    }
    if let Some(m) = flags.skin_model.or(config.skin_model) {
        stack = stack.with_skin_model(m);
    }

    let frequency = flags.frequency_ghz.or(config.frequency_ghz).unwrap_or(60.0) * GHZ;
    let pd = flags.incident_pd.or(config.incident_pd).unwrap_or(10.0);
    let excitation = PlaneWaveExcitation::new(frequency, pd)?;

    for layer in stack.layers() {
        layer.permittivity(frequency, db)?;
        if layer.dielectric == DielectricSource::Tabulated
            && db
                .tissue_permittivity(layer.tissue, frequency)?
                .interpolated
        {
            eprintln!(
                "warning: {} permittivity at {} GHz is interpolated between tabulated frequencies",
                layer.tissue,
                frequency / GHZ
            );
        }
    }

    Ok(Scenario {
        stack,
        excitation,
        t_air: flags.t_air.or(config.t_air).unwrap_or(DEFAULT_T_AIR),
        t_blood: flags.t_blood.or(config.t_blood).unwrap_or(DEFAULT_T_BLOOD),
    })
}
