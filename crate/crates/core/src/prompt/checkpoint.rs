use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EpochLog, Projector, PromptConfig, TrainedPrompt};
use crate::checkpoint::{check_version, read_json, write_json, TensorJson, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::nn::LinearProbe;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorJson {
    pub w1: TensorJson,
    pub w2: TensorJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeJson {
    pub weights: TensorJson,
    pub bias: Vec<f64>,
}

/// On-disk prompt: projector and probe tensors plus the tuning config. The
/// training log is written separately as CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptCheckpoint {
    pub format_version: u32,
    pub projector: ProjectorJson,
    pub probe: ProbeJson,
    pub config: PromptConfig,
}

impl From<&TrainedPrompt> for PromptCheckpoint {
    fn from(p: &TrainedPrompt) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            projector: ProjectorJson { w1: (&p.projector.w1).into(), w2: (&p.projector.w2).into() },
            probe: ProbeJson { weights: (&p.probe.weights).into(), bias: p.probe.bias.clone() },
            config: p.config.clone(),
        }
    }
}

impl PromptCheckpoint {
    pub fn into_prompt(self) -> Result<TrainedPrompt> {
        check_version(self.format_version)?;
        let projector = Projector { w1: self.projector.w1.to_matrix("w1")?, w2: self.projector.w2.to_matrix("w2")? };
        projector.validate()?;
        let weights = self.probe.weights.to_matrix("probe.weights")?;
        if weights.cols() != self.probe.bias.len() || weights.rows() != projector.input_dim() {
            return Err(Error::Checkpoint(format!(
                "probe weights {:?} inconsistent with bias of {} and projector input {}",
                weights.shape(),
                self.probe.bias.len(),
                projector.input_dim()
            )));
        }
        self.config.validate()?;
        Ok(TrainedPrompt {
            projector,
            probe: LinearProbe { weights, bias: self.probe.bias },
            config: self.config,
            log: Vec::new(),
        })
    }
}

pub fn save_prompt(prompt: &TrainedPrompt, path: impl AsRef<Path>) -> Result<()> {
    write_json(&PromptCheckpoint::from(prompt), path)
}

/// Load a prompt checkpoint; the returned log is empty.
pub fn load_prompt(path: impl AsRef<Path>) -> Result<TrainedPrompt> {
    read_json::<PromptCheckpoint>(path)?.into_prompt()
}

/// CSV with header `epoch,tau,L_P,L_E,L_S,total`.
pub fn write_log_csv(log: &[EpochLog], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "epoch,tau,L_P,L_E,L_S,total")?;
    for l in log {
        writeln!(out, "{},{},{},{},{},{}", l.epoch, l.tau, l.lp, l.le, l.ls, l.total)?;
    }
    Ok(())
}
