use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checkpoint::{check_version, read_json, write_json, TensorJson, FORMAT_VERSION};
use crate::error::Result;
use crate::nn::{Activation, GcnModel};

/// On-disk GCN checkpoint.
///
/// ```json
/// { "format_version": 1, "activation": "relu",
///   "layer1": {"shape": [d_x, d_h], "data": [[...], ...]},
///   "layer2": {"shape": [d_h, d_h], "data": [[...], ...]} }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCheckpoint {
    pub format_version: u32,
    pub activation: Activation,
    pub layer1: TensorJson,
    pub layer2: TensorJson,
}

impl From<&GcnModel> for ModelCheckpoint {
    fn from(m: &GcnModel) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            activation: m.activation,
            layer1: (&m.layer1).into(),
            layer2: (&m.layer2).into(),
        }
    }
}

impl ModelCheckpoint {
    pub fn into_model(self) -> Result<GcnModel> {
        check_version(self.format_version)?;
        GcnModel::new(
            self.layer1.to_matrix("layer1")?,
            self.layer2.to_matrix("layer2")?,
            self.activation,
        )
    }
}

pub fn save_model(model: &GcnModel, path: impl AsRef<Path>) -> Result<()> {
    write_json(&ModelCheckpoint::from(model), path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GcnModel> {
    read_json::<ModelCheckpoint>(path)?.into_model()
}
