//! Text grammar for weight families and the shared run configuration.
//!
//! ```text
//! constant
//! power:s0=2.0
//! ap:a=1,j=3
//! periodic:1,0,2
//! scaled:base=ap:a=1,j=2;s=1.5
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::asymptotics::{EstimateOptions, DEFAULT_OSC_TOL};
use crate::error::{Error, Result};
use crate::phases::{DEFAULT_K_MAX, DEFAULT_TIE_TOL};
use crate::weights::{Family, WeightSequence};

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parse a family spec into a [`Family`].
pub fn parse_family(spec: &str) -> Result<Family> {
    let spec = spec.trim();
    let (head, body) = match spec.split_once(':') {
        Some((head, body)) => (head.trim(), Some(body.trim())),
        None => (spec, None),
    };
    match (head, body) {
        ("constant", None) => Ok(Family::Constant),
        ("constant", Some(_)) => Err(config_err("constant takes no parameters")),
        ("power", Some(body)) => {
            let mut kv = key_values(body, &["s0"])?;
            Ok(Family::Power {
                s0: take(&mut kv, "s0")?,
            })
        }
        ("ap", Some(body)) => {
            let mut kv = key_values(body, &["a", "j"])?;
            Ok(Family::ArithmeticProgression {
                a: take(&mut kv, "a")?,
                j: take(&mut kv, "j")?,
            })
        }
        ("periodic", Some(body)) => {
            let weights = body
                .split(',')
                .map(|w| parse_number::<f64>("periodic weight", w))
                .collect::<Result<Vec<_>>>()?;
            Ok(Family::Periodic { weights })
        }
        ("scaled", Some(body)) => parse_scaled(body),
        ("power" | "ap" | "periodic" | "scaled", None) => Err(config_err(format!(
            "family `{head}` needs parameters after ':'"
        ))),
        _ => Err(config_err(format!("unknown family `{head}`"))),
    }
}

/// `base=<spec>;s=<x>` in either order; the base may itself be scaled, so
/// the split happens at the `;` that belongs to this level.
fn parse_scaled(body: &str) -> Result<Family> {
    let (base, shift) = if let Some(rest) = body.strip_prefix("base=") {
        let (base, tail) = rest
            .rsplit_once(';')
            .ok_or_else(|| config_err("scaled needs `base=<family>;s=<shift>`"))?;
        (base, tail)
    } else if body.starts_with("s=") {
        let (head, base) = body
            .split_once(';')
            .ok_or_else(|| config_err("scaled needs `s=<shift>;base=<family>`"))?;
        let base = base
            .strip_prefix("base=")
            .ok_or_else(|| config_err(format!("scaled: unexpected `{base}`")))?;
        (base, head)
    } else {
        return Err(config_err(format!("scaled: unexpected `{body}`")));
    };
    let mut kv = key_values(shift, &["s"])?;
    Ok(Family::Scaled {
        base: Box::new(parse_family(base)?),
        shift: take(&mut kv, "s")?,
    })
}

fn key_values<'a>(body: &'a str, allowed: &[&str]) -> Result<HashMap<&'a str, &'a str>> {
    let mut out = HashMap::new();
    for pair in body.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| config_err(format!("expected key=value, got `{pair}`")))?;
        let key = key.trim();
        if !allowed.contains(&key) {
            return Err(config_err(format!(
                "unknown key `{key}` (expected one of {})",
                allowed.join(", ")
            )));
        }
        if out.insert(key, value.trim()).is_some() {
            return Err(config_err(format!("duplicate key `{key}`")));
        }
    }
    for key in allowed {
        if !out.contains_key(key) {
            return Err(config_err(format!("missing key `{key}`")));
        }
    }
    Ok(out)
}

fn take<T: FromStr>(kv: &mut HashMap<&str, &str>, key: &str) -> Result<T> {
    let raw = kv.remove(key).expect("key presence checked");
    parse_number(key, raw)
}

fn parse_number<T: FromStr>(what: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| config_err(format!("{what}: cannot parse `{}`", raw.trim())))
}

/// Parse a family spec and build its [`WeightSequence`].
pub fn parse_sequence(spec: &str) -> Result<WeightSequence> {
    WeightSequence::new(parse_family(spec)?).map_err(|e| match e {
        Error::Config(_) => e,
        other => config_err(other.to_string()),
    })
}

/// Accepts `x`, `x+yi`, `x-yi`, `yi`, `i` and `x,y`.
pub fn parse_complex(raw: &str) -> Result<Complex64> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || config_err(format!("cannot parse complex number `{raw}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((re, im)) = s.split_once(',') {
        return Ok(Complex64::new(
            re.parse().map_err(|_| bad())?,
            im.parse().map_err(|_| bad())?,
        ));
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse().map_err(|_| bad())?, im))
}

/// Comma-separated values and inclusive ranges `a..b` or `a..b:step`.
pub fn parse_n_list(raw: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        if let Some((lo, hi)) = item.split_once("..") {
            let (hi, step) = match hi.split_once(':') {
                Some((hi, step)) => (hi, parse_number::<u64>("step", step)?),
                None => (hi, 1),
            };
            let lo: u64 = parse_number("range start", lo)?;
            let hi: u64 = parse_number("range end", hi)?;
            if step == 0 || lo > hi {
                return Err(config_err(format!("empty or invalid range `{item}`")));
            }
            out.extend((lo..=hi).step_by(step as usize));
        } else {
            out.push(parse_number("n", item)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Ppm,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "ppm" => Ok(Self::Ppm),
            other => Err(config_err(format!("unknown format `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Ppm => "ppm",
        })
    }
}

/// Everything a command needs besides its own positional parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family_spec: String,
    pub sequence: WeightSequence,
    pub k_max: u64,
    pub tie_tol: f64,
    pub osc_tol: f64,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Config for `spec` with every knob at its default.
    pub fn new(spec: &str) -> Result<Self> {
        Ok(Self {
            family_spec: spec.to_string(),
            sequence: parse_sequence(spec)?,
            k_max: DEFAULT_K_MAX,
            tie_tol: DEFAULT_TIE_TOL,
            osc_tol: DEFAULT_OSC_TOL,
            format: None,
            output: None,
        })
    }

    pub fn with_sigma0(mut self, sigma0: f64) -> Result<Self> {
        self.sequence = self.sequence.with_sigma0(sigma0)?;
        Ok(self)
    }

    /// Check the numeric knobs; called before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(config_err("k-max must be at least 1"));
        }
        if !(self.tie_tol > 0.0 && self.tie_tol < 1.0) {
            return Err(config_err(format!(
                "tie-tol = {} outside (0, 1)",
                self.tie_tol
            )));
        }
        if !(self.osc_tol > 0.0 && self.osc_tol < 1.0) {
            return Err(config_err(format!(
                "osc-tol = {} outside (0, 1)",
                self.osc_tol
            )));
        }
        Ok(())
    }

    /// The output format, defaulting to `fallback`, restricted to `allowed`.
    pub fn format_or(
        &self,
        fallback: OutputFormat,
        allowed: &[OutputFormat],
    ) -> Result<OutputFormat> {
        let format = self.format.unwrap_or(fallback);
        if allowed.contains(&format) {
            Ok(format)
        } else {
            Err(config_err(format!(
                "format `{format}` is not available here"
            )))
        }
    }

    pub fn estimate_options(&self) -> EstimateOptions {
        EstimateOptions {
            k_max: self.k_max,
            tie_tol: self.tie_tol,
            osc_tol: self.osc_tol,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family_spec: "constant".into(),
            sequence: WeightSequence::constant(),
            k_max: DEFAULT_K_MAX,
            tie_tol: DEFAULT_TIE_TOL,
            osc_tol: DEFAULT_OSC_TOL,
            format: None,
            output: None,
        }
    }
}
