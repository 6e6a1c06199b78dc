use serde::Serialize;
use sl2r::quadrature::QuadratureSpec;

use crate::output::CliError;
use crate::{Format, GlobalOpts};

pub const TOL_ENV: &str = "SL2R_QUAD_TOL";

/// Effective settings of a run, echoed in every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub version: &'static str,
    pub args: serde_json::Value,
    pub quadrature: QuadratureSpec,
    pub quadrature_source: &'static str,
    pub seed: u64,
    pub format: Format,
}

fn quadrature(global: &GlobalOpts) -> Result<(QuadratureSpec, &'static str), CliError> {
    let (tol, source) = match (global.tol, std::env::var(TOL_ENV)) {
        (Some(t), _) => (t, "flag"),
        (None, Ok(v)) => {
            let t = v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{TOL_ENV}={v:?} is not a number")))?;
            (t, "env")
        }
        (None, Err(_)) => return Ok((QuadratureSpec::default(), "default")),
    };
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage(format!("quadrature tolerance must lie in (0, 1), got {tol}")));
    }
    let spec = QuadratureSpec { rel_tol: tol, abs_tol: tol / 10.0, ..QuadratureSpec::default() };
    Ok((spec, source))
}

/// Validates the global options for `command` and builds its config.
pub fn resolve<A: Serialize>(
    command: &'static str,
    args: &A,
    global: &GlobalOpts,
    formats: &[Format],
) -> Result<RunConfig, CliError> {
    let format = global.format.unwrap_or(formats[0]);
    if !formats.contains(&format) {
        let allowed: Vec<String> = formats.iter().map(|f| format!("{f:?}").to_lowercase()).collect();
        return Err(CliError::Usage(format!(
            "{command} does not support --format {}; use {}",
            format!("{format:?}").to_lowercase(),
            allowed.join(" or ")
        )));
    }
    let (quadrature, quadrature_source) = quadrature(global)?;
    Ok(RunConfig {
        command,
        version: env!("CARGO_PKG_VERSION"),
        args: serde_json::to_value(args).map_err(|e| CliError::Io(e.to_string()))?,
        quadrature,
        quadrature_source,
        seed: global.seed,
        format,
    })
}
