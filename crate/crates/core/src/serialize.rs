//! Versioned, lossless serialization for trained models.
//!
//! Models are stored as JSON with every float emitted through an
//! exact-round-trip encoder, so a reload reproduces bit-identical
//! parameters.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::glasso::GLassoModel;
use crate::inference::TrainedModel;
use crate::io::atomic_write;

pub const MODEL_SCHEMA: &str = "gfamix-model";
pub const GLASSO_SCHEMA: &str = "gfamix-glasso";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    schema: String,
    version: u32,
    model: T,
}

fn to_envelope_json<T: Serialize>(schema: &str, model: &T) -> Result<String> {
    let env = Envelope {
        schema: schema.to_string(),
        version: MODEL_VERSION,
        model,
    };
    Ok(serde_json::to_string_pretty(&env)?)
}

fn from_envelope_json<T: for<'de> Deserialize<'de>>(schema: &str, text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text)?;
    if env.schema != schema {
        return Err(Error::Serialization(format!(
            "expected schema {schema:?}, found {:?}",
            env.schema
        )));
    }
    if env.version != MODEL_VERSION {
        return Err(Error::Serialization(format!(
            "unsupported {schema} version {}",
            env.version
        )));
    }
    Ok(env.model)
}

pub fn model_to_json(model: &TrainedModel) -> Result<String> {
    to_envelope_json(MODEL_SCHEMA, model)
}

pub fn model_from_json(text: &str) -> Result<TrainedModel> {
    let model: TrainedModel = from_envelope_json(MODEL_SCHEMA, text)?;
    model.state.validate()?;
    Ok(model)
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    atomic_write(path, model_to_json(model)?.as_bytes())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    model_from_json(&fs::read_to_string(path)?)
}

pub fn glasso_to_json(model: &GLassoModel) -> Result<String> {
    to_envelope_json(GLASSO_SCHEMA, model)
}

pub fn glasso_from_json(text: &str) -> Result<GLassoModel> {
    from_envelope_json(GLASSO_SCHEMA, text)
}

pub fn save_glasso(model: &GLassoModel, path: &Path) -> Result<()> {
    atomic_write(path, glasso_to_json(model)?.as_bytes())
}

pub fn load_glasso(path: &Path) -> Result<GLassoModel> {
    glasso_from_json(&fs::read_to_string(path)?)
}
