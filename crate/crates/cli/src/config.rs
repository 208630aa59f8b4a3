use std::path::{Path, PathBuf};

use offsetshape::offset::Branch;
use offsetshape::poly::{parse_poly, RationalPoly};
use offsetshape::scalar::parse_rational;
use offsetshape::shape::{parse_place, TRUNC_CAP};
use offsetshape::{Rational, Tolerance};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const TOL_ENV: &str = "OFFSETSHAPE_TOL";

pub const DEFAULT_TRUNC: usize = TRUNC_CAP;
pub const DEFAULT_H_MAX: f64 = 0.5;
pub const DEFAULT_SAMPLES: usize = 401;

/// Everything one run depends on. Every field is optional so that a config
/// file, the environment and flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub place: Option<String>,
    /// Center `x,y`; defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<String>,
    /// Angle in radians; selects float mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Exact `a,b` with `a^2 + b^2 = 1`; selects exact mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosab: Option<String>,
    /// `+`, `-` or `both`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f.clone(); })*
    };
}

impl SessionConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::parse(format!("invalid config {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(&mut self, top: &SessionConfig) {
        overlay!(
            self, top, curve, place, point, d, theta, cosab, branches, trunc, tol, h_max, samples,
            output, csv, svg
        );
        // the geometry source and the angle are each one choice; a lower
        // layer's choice yields, a conflict within one layer is kept
        if top.curve.is_some() && top.place.is_none() {
            self.place = None;
        } else if top.place.is_some() && top.curve.is_none() {
            self.curve = None;
        }
        if top.theta.is_some() && top.cosab.is_none() {
            self.cosab = None;
        } else if top.cosab.is_some() && top.theta.is_none() {
            self.theta = None;
        }
    }

    /// Config file, then the tolerance environment variable, then flags.
    pub fn layered(
        file: Option<&Path>,
        env_tol: Option<String>,
        flags: &SessionConfig,
    ) -> Result<Self, CliError> {
        let mut cfg = match file {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(text) = env_tol {
            let tol = text
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::parse(format!("{TOL_ENV}={text:?} is not a number")))?;
            cfg.tol = Some(tol);
        }
        cfg.overlay(flags);
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    Float(f64),
    Exact(Rational, Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Curve {
        poly: RationalPoly,
        point: (Rational, Rational),
    },
    Place {
        text: String,
        point: Option<(Rational, Rational)>,
    },
}

/// A validated session.
#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub source: Source,
    pub d: Rational,
    pub angle: Angle,
    pub branches: Vec<Branch>,
    pub trunc: usize,
    pub tol: Tolerance,
    pub h_max: f64,
    pub samples: usize,
}

fn parse_pair(text: &str, what: &str) -> Result<(Rational, Rational), CliError> {
    let bad = || {
        CliError::parse(format!(
            "{what} must be `x,y` with rational entries, got {text:?}"
        ))
    };
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        parse_rational(x).ok_or_else(bad)?,
        parse_rational(y).ok_or_else(bad)?,
    ))
}

impl Session {
    pub fn from_config(cfg: &SessionConfig) -> Result<Self, CliError> {
        let point = cfg
            .point
            .as_deref()
            .map(|p| parse_pair(p, "--point"))
            .transpose()?;
        let source = match (&cfg.curve, &cfg.place) {
            (Some(c), None) => Source::Curve {
                poly: parse_poly(c).map_err(|e| CliError::parse(format!("curve: {e}")))?,
                point: point.unwrap_or_default(),
            },
            (None, Some(p)) => {
                parse_place(p, DEFAULT_TRUNC)
                    .map_err(|e| CliError::parse(format!("place: {e}")))?;
                Source::Place {
                    text: p.clone(),
                    point,
                }
            }
            (Some(_), Some(_)) => {
                return Err(CliError::parse("give either a curve or a place, not both"))
            }
            (None, None) => return Err(CliError::parse("missing --curve or --place")),
        };
        let d = match &cfg.d {
            Some(t) => parse_rational(t)
                .ok_or_else(|| CliError::parse(format!("--d: not a number: {t:?}")))?,
            None => return Err(CliError::parse("missing --d")),
        };
        let angle = match (cfg.theta, &cfg.cosab) {
            (Some(t), None) if t.is_finite() => Angle::Float(t),
            (Some(t), None) => {
                return Err(CliError::parse(format!("--theta must be finite, got {t}")))
            }
            (None, Some(ab)) => {
                let (a, b) = parse_pair(ab, "--cosab")?;
                Angle::Exact(a, b)
            }
            (Some(_), Some(_)) => {
                return Err(CliError::parse("give either --theta or --cosab, not both"))
            }
            (None, None) => return Err(CliError::parse("missing --theta or --cosab")),
        };
        let branches = match cfg.branches.as_deref().map(str::trim) {
            None | Some("both") => Branch::BOTH.to_vec(),
            Some(t) => vec![Branch::parse(t).ok_or_else(|| {
                CliError::parse(format!("--branch must be +, - or both, got {t:?}"))
            })?],
        };
        let tol = cfg.tol.unwrap_or(Tolerance::DEFAULT.0);
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(CliError::parse(format!(
                "tolerance must be a nonnegative number, got {tol}"
            )));
        }
        let h_max = cfg.h_max.unwrap_or(DEFAULT_H_MAX);
        if !(h_max > 0.0 && h_max.is_finite()) {
            return Err(CliError::parse(format!(
                "--h-max must be positive, got {h_max}"
            )));
        }
        let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 3 {
            return Err(CliError::parse(format!(
                "--samples must be at least 3, got {samples}"
            )));
        }
        Ok(Self {
            source,
            d,
            angle,
            branches,
            trunc: cfg.trunc.unwrap_or(DEFAULT_TRUNC),
            tol: Tolerance(tol),
            h_max,
            samples,
        })
    }
}
