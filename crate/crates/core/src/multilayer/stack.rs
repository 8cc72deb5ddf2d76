use std::fmt;
use std::str::FromStr;

use crate::constants::MM;
use crate::dielectrics::{
    ComplexPermittivity, DielectricDatabase, SkinModel, Tissue, TissueThermalRecord,
};
use crate::{Error, Result};

/// The four body-part models: bare skin over muscle, bare forehead over
/// bone, and the same two covered by a clothing slab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelPreset {
    NakedSkin,
    NakedForehead,
    ClothedSkin,
    HatOnForehead,
}

impl ModelPreset {
    pub const ALL: [ModelPreset; 4] = [
        ModelPreset::NakedSkin,
        ModelPreset::NakedForehead,
        ModelPreset::ClothedSkin,
        ModelPreset::HatOnForehead,
    ];

    /// 1-based model number.
    pub fn number(self) -> u8 {
        match self {
            ModelPreset::NakedSkin => 1,
            ModelPreset::NakedForehead => 2,
            ModelPreset::ClothedSkin => 3,
            ModelPreset::HatOnForehead => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelPreset::NakedSkin => "naked-skin",
            ModelPreset::NakedForehead => "naked-forehead",
            ModelPreset::ClothedSkin => "clothed-skin",
            ModelPreset::HatOnForehead => "hat-on-forehead",
        }
    }

    pub fn is_clothed(self) -> bool {
        matches!(self, ModelPreset::ClothedSkin | ModelPreset::HatOnForehead)
    }

    /// The same body part without clothing.
    pub fn unclothed(self) -> ModelPreset {
        match self {
            ModelPreset::NakedSkin | ModelPreset::ClothedSkin => ModelPreset::NakedSkin,
            ModelPreset::NakedForehead | ModelPreset::HatOnForehead => ModelPreset::NakedForehead,
        }
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "1" | "nakedskin" => Ok(ModelPreset::NakedSkin),
            "2" | "nakedforehead" => Ok(ModelPreset::NakedForehead),
            "3" | "clothedskin" => Ok(ModelPreset::ClothedSkin),
            "4" | "hatonforehead" | "hat" => Ok(ModelPreset::HatOnForehead),
            _ => Err(Error::Parse {
                what: "model preset".into(),
                message: format!("unknown value {s:?}"),
            }),
        }
    }
}

/// Where a layer takes its permittivity from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DielectricSource {
    /// The tissue table, interpolated in frequency when needed.
    Tabulated,
    /// One of the published skin models.
    SkinModel(SkinModel),
    /// A fixed value at every frequency.
    Fixed(ComplexPermittivity),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TissueLayer {
    pub tissue: Tissue,
    /// Thickness in metres; `None` marks the semi-infinite last layer.
    pub thickness: Option<f64>,
    pub dielectric: DielectricSource,
    /// Overrides the thermal table for this layer.
    pub thermal: Option<TissueThermalRecord>,
}

impl TissueLayer {
    pub fn new(tissue: Tissue, thickness: f64) -> Self {
        Self {
            tissue,
            thickness: Some(thickness),
            dielectric: DielectricSource::Tabulated,
            thermal: None,
        }
    }

    pub fn semi_infinite(tissue: Tissue) -> Self {
        Self {
            tissue,
            thickness: None,
            dielectric: DielectricSource::Tabulated,
            thermal: None,
        }
    }

    pub fn with_dielectric(mut self, dielectric: DielectricSource) -> Self {
        self.dielectric = dielectric;
        self
    }

    pub fn permittivity(
        &self,
        frequency: f64,
        db: &DielectricDatabase,
    ) -> Result<ComplexPermittivity> {
        match self.dielectric {
            DielectricSource::Tabulated => {
                Ok(db.tissue_permittivity(self.tissue, frequency)?.permittivity)
            }
            DielectricSource::SkinModel(m) => Ok(db.lookup_skin_model(m, frequency)?.permittivity),
            DielectricSource::Fixed(eps) => Ok(eps),
        }
    }
}

/// Ordered tissue slabs. The first interface sits at z = 0 and the last layer
/// extends to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<TissueLayer>,
    preset: Option<ModelPreset>,
}

pub const DEFAULT_CLOTHING_THICKNESS: f64 = 1.0 * MM;

impl LayerStack {
    pub fn new(layers: Vec<TissueLayer>) -> Result<Self> {
        let Some((last, finite)) = layers.split_last() else {
            return Err(Error::domain("a layer stack needs at least one layer"));
        };
        if last.thickness.is_some() {
            return Err(Error::domain("the last layer must be semi-infinite"));
        }
        for (i, layer) in finite.iter().enumerate() {
            match layer.thickness {
                None => {
                    return Err(Error::domain(format!(
                        "only the last layer may be semi-infinite (layer {i} is not last)"
                    )))
                }
                Some(t) if !(t.is_finite() && t >= 0.0) => {
                    return Err(Error::domain(format!(
                        "layer {i} has invalid thickness {t}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(Self {
            layers,
            preset: None,
        })
    }

    /// Expands a preset. `clothing_thickness` is used only by the clothed
    /// presets.
    pub fn preset(preset: ModelPreset, clothing_thickness: f64) -> Result<Self> {
        let deep = match preset.unclothed() {
            ModelPreset::NakedSkin => Tissue::Muscle,
            _ => Tissue::Bone,
        };
        let mut layers = Vec::with_capacity(4);
        if preset.is_clothed() {
            layers.push(TissueLayer::new(Tissue::Clothing, clothing_thickness));
        }
        layers.push(TissueLayer::new(Tissue::Skin, 1.0 * MM));
        layers.push(TissueLayer::new(Tissue::Sat, 3.0 * MM));
        layers.push(TissueLayer::semi_infinite(deep));
        let mut stack = Self::new(layers)?;
        stack.preset = Some(preset);
        Ok(stack)
    }

    pub fn layers(&self) -> &[TissueLayer] {
        &self.layers
    }

    pub fn model_preset(&self) -> Option<ModelPreset> {
        self.preset
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Depth of the left face of every layer, m.
    pub fn layer_starts(&self) -> Vec<f64> {
        let mut z = 0.0;
        self.layers
            .iter()
            .map(|l| {
                let start = z;
                z += l.thickness.unwrap_or(0.0);
                start
            })
            .collect()
    }

    /// Thickness of a leading clothing layer, if there is one.
    pub fn clothing_thickness(&self) -> Option<f64> {
        match self.layers.first() {
            Some(l) if l.tissue == Tissue::Clothing => l.thickness,
            _ => None,
        }
    }

    /// Copy with the leading clothing layer resized.
    pub fn with_clothing_thickness(&self, thickness: f64) -> Result<Self> {
        if self.clothing_thickness().is_none() {
            return Err(Error::Usage("stack has no leading clothing layer".into()));
        }
        if !(thickness.is_finite() && thickness >= 0.0) {
            return Err(Error::domain(format!(
                "invalid clothing thickness {thickness}"
            )));
        }
        let mut out = self.clone();
        out.layers[0].thickness = Some(thickness);
        Ok(out)
    }

    /// Copy with every skin layer drawing its permittivity from `model`.
    pub fn with_skin_model(&self, model: SkinModel) -> Self {
        let mut out = self.clone();
        for l in out.layers.iter_mut().filter(|l| l.tissue == Tissue::Skin) {
            l.dielectric = DielectricSource::SkinModel(model);
        }
        out
    }

    /// Copy without zero-thickness finite layers.
    pub fn without_empty_layers(&self) -> Self {
        let layers = self
            .layers
            .iter()
            .filter(|l| l.thickness != Some(0.0))
            .cloned()
            .collect();
        Self {
            layers,
            preset: self.preset,
        }
    }
}
