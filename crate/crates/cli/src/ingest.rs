use offsetshape::offset::{Branch, OffsetError, OffsetParams};
use offsetshape::puiseux::{places_at_in, IngestError};
use offsetshape::scalar::rational_to_f64;
use offsetshape::shape::{parse_place, Place};
use offsetshape::{Rational, Scalar, Tolerance};

use crate::config::{Angle, Session, Source};
use crate::CliError;

/// Places and offset parameters in one coefficient field.
pub struct Input<S: Scalar> {
    pub places: Vec<Place<S>>,
    pub params: OffsetParams<S>,
    pub diagnostics: Vec<String>,
}

pub enum Prepared {
    Exact(Input<Rational>),
    Float(Input<f64>),
}

fn ingest_error(e: IngestError) -> CliError {
    match e {
        IngestError::TruncTooShallow(_) => CliError::trunc(e.to_string()),
        IngestError::TruncTooSmall(_) => CliError::parse(e.to_string()),
        _ => CliError::geometry(e.to_string()),
    }
}

pub fn offset_error(e: OffsetError) -> CliError {
    CliError::geometry(e.to_string())
}

fn load<S: Scalar>(session: &Session, a: S, b: S) -> Result<Input<S>, CliError> {
    let params = OffsetParams::new(
        S::from_rational(&session.d),
        a,
        b,
        Branch::Plus,
        Tolerance(session.tol.0.max(1e-12)),
    )
    .map_err(offset_error)?;
    let (places, diagnostics) = match &session.source {
        Source::Curve { poly, point } => {
            let set =
                places_at_in::<S>(poly, point, session.trunc, session.tol).map_err(ingest_error)?;
            if set.irrational > 0 && S::EXACT {
                return Err(CliError::irrational(set.irrational));
            }
            (set.places, set.diagnostics)
        }
        Source::Place { text, point } => {
            let mut pl = parse_place(text, session.trunc)
                .map_err(|e| CliError::parse(format!("place: {e}")))?;
            if let Some(c) = point {
                pl = pl.at(c.clone());
            }
            (vec![pl.map(S::from_rational)], Vec::new())
        }
    };
    if places.is_empty() {
        return Err(CliError::geometry(
            "no real branch passes through the point",
        ));
    }
    Ok(Input {
        places,
        params,
        diagnostics,
    })
}

/// Exact mode for `--cosab`, float mode for `--theta`. Exact curves whose
/// branches need irrational coefficients are redone in float mode.
pub fn prepare(session: &Session) -> Result<Prepared, CliError> {
    match &session.angle {
        Angle::Float(t) => Ok(Prepared::Float(load(session, t.cos(), t.sin())?)),
        Angle::Exact(a, b) => match load(session, a.clone(), b.clone()) {
            Ok(input) => Ok(Prepared::Exact(input)),
            Err(e) if e.irrational => {
                let mut input = load(session, rational_to_f64(a), rational_to_f64(b))?;
                input
                    .diagnostics
                    .push(format!("{}; switched to float mode", e.message));
                Ok(Prepared::Float(input))
            }
            Err(e) => Err(e),
        },
    }
}
