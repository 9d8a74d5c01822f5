use std::fs;
use std::path::Path;

use deuteron_core::model::{REFERENCE_ALPHA_INV_FM, REFERENCE_RANGE_FM, REFERENCE_RATIO};
use deuteron_core::observables::normalized_params;
use deuteron_core::{ModelParams, Shape};
use serde::Deserialize;

use crate::args::ParamArgs;
use crate::error::CliError;

/// Parameter file; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub b_fm: Option<f64>,
    pub b1_fm: Option<f64>,
    pub b2_fm: Option<f64>,
    pub alpha_inv_fm: Option<f64>,
    #[serde(rename = "A")]
    pub norm_s: Option<f64>,
    #[serde(rename = "B")]
    pub norm_d: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Normalization {
    Explicit(f64, f64),
    Ratio(f64),
}

fn file_normalization(file: &ParamsFile) -> Result<Option<Normalization>, CliError> {
    match (file.norm_s, file.norm_d, file.ratio) {
        (None, None, None) => Ok(None),
        (None, None, Some(r)) => Ok(Some(Normalization::Ratio(r))),
        (Some(a), Some(b), None) => Ok(Some(Normalization::Explicit(a, b))),
        (Some(_), Some(_), Some(_)) => Err(CliError::Config(
            "params file sets both A/B and ratio".into(),
        )),
        _ => Err(CliError::Config("params file must set both A and B".into())),
    }
}

pub fn load_file(path: Option<&Path>) -> Result<ParamsFile, CliError> {
    match path {
        None => Ok(ParamsFile::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

/// Merges file and flags and resolves the normalization.
pub fn resolve(args: &ParamArgs) -> Result<ModelParams, CliError> {
    let file = load_file(args.params_json.as_deref())?;
    if file.b_fm.is_some() && (file.b1_fm.is_some() || file.b2_fm.is_some()) {
        return Err(CliError::Config(
            "params file sets both b_fm and b1_fm/b2_fm".into(),
        ));
    }
    let (mut b1, mut b2) = match file.b_fm {
        Some(b) => (b, b),
        None => (
            file.b1_fm.or(file.b2_fm).unwrap_or(REFERENCE_RANGE_FM),
            file.b2_fm.or(file.b1_fm).unwrap_or(REFERENCE_RANGE_FM),
        ),
    };
    if let Some(b) = args.b {
        (b1, b2) = (b, b);
    }
    if let Some(b) = args.b1 {
        b1 = b;
    }
    if let Some(b) = args.b2 {
        b2 = b;
    }
    let alpha = args
        .alpha
        .or(file.alpha_inv_fm)
        .unwrap_or(REFERENCE_ALPHA_INV_FM);

    let flag_norm = match (args.norm_s, args.norm_d, args.ratio) {
        (Some(a), Some(b), _) => Some(Normalization::Explicit(a, b)),
        (_, _, Some(r)) => Some(Normalization::Ratio(r)),
        _ => None,
    };
    let norm = match flag_norm {
        Some(n) => n,
        None => file_normalization(&file)?.unwrap_or(Normalization::Ratio(REFERENCE_RATIO)),
    };
    match norm {
        Normalization::Explicit(a, b) => Ok(ModelParams::new(b1, b2, alpha, a, b)?),
        Normalization::Ratio(ratio) => {
            // validate the shape first so bad ranges report as parameter errors
            ModelParams::new(b1, b2, alpha, 1.0, 1.0)?;
            Ok(normalized_params(&Shape { b1, b2, alpha }, ratio)?)
        }
    }
}
