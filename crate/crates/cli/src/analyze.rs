use offsetshape::offset::{Branch, CurvatureData, OffsetParams};
use offsetshape::predictor::{predict, PredictError};
use offsetshape::shape::{signature, Place, ShapeError, SignatureReport};
use offsetshape::verifier::{
    cross_check, series_verdict, BranchCheck, CheckConfig, Tri, VerifyError,
};
use offsetshape::Scalar;
use serde::Serialize;

use crate::config::{Session, SessionConfig};
use crate::ingest::{prepare, Input, Prepared};
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub mode: &'static str,
    pub input: SessionConfig,
    pub params: ParamsReport,
    pub diagnostics: Vec<String>,
    pub places: Vec<PlaceReport>,
    pub summary: Summary,
}

#[derive(Debug, Serialize)]
pub struct ParamsReport {
    pub d: String,
    pub a: String,
    pub b: String,
    pub classical: bool,
}

#[derive(Debug, Serialize)]
pub struct CurvatureReport {
    pub k: Option<String>,
    pub kprime: Option<String>,
    pub ktilde: String,
    pub utilde: String,
    pub mtilde: Option<String>,
    pub w: Option<String>,
}

impl CurvatureReport {
    fn of<S: Scalar>(c: &CurvatureData<S>) -> Self {
        let text = |v: &Option<S>| v.as_ref().map(S::to_text);
        Self {
            k: text(&c.k),
            kprime: text(&c.kprime),
            ktilde: c.ktilde.to_text(),
            utilde: c.utilde.to_text(),
            mtilde: text(&c.mtilde),
            w: text(&c.w),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OffsetReport {
    #[serde(flatten)]
    pub check: BranchCheck,
    /// A decisive prediction contradicts the series.
    pub disagreement: bool,
    /// A flagged clause contradicts the series.
    pub flagged_conflict: bool,
}

/// A source point where a classical offset can have a cusp.
#[derive(Debug, Serialize)]
pub struct CuspCandidate {
    pub branch: Branch,
    pub h: f64,
    pub point: (f64, f64),
    pub k: f64,
}

#[derive(Debug, Serialize)]
pub struct PlaceReport {
    pub index: usize,
    pub center: (String, String),
    pub rotation: (String, String),
    pub place: String,
    pub trunc: usize,
    pub signature: SignatureReport,
    pub curvature: CurvatureReport,
    pub offsets: Vec<OffsetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cusp_candidates: Option<Vec<CuspCandidate>>,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub decisive_disagreements: usize,
    pub flagged_conflicts: usize,
    pub truncation_limited: usize,
    pub exit_code: i32,
}

/// First truncation tried for curve branches; it doubles up to the cap.
const START_TRUNC: usize = 12;

pub fn analyze(cfg: &SessionConfig) -> Result<AnalyzeReport, CliError> {
    let cap = Session::from_config(cfg)?;
    let mut input = cfg.clone();
    input.output = None;
    input.csv = None;
    input.svg = None;
    let mut session = Session {
        trunc: START_TRUNC.min(cap.trunc),
        ..cap.clone()
    };
    loop {
        let out = match prepare(&session) {
            Ok(Prepared::Exact(i)) => run(&session, input.clone(), i),
            Ok(Prepared::Float(i)) => run(&session, input.clone(), i),
            Err(e) => Err(e),
        };
        let limited = match &out {
            Ok(r) => r.summary.truncation_limited > 0,
            Err(e) => e.code == crate::EXIT_TRUNC,
        };
        if !limited || session.trunc >= cap.trunc {
            return out;
        }
        session.trunc = (2 * session.trunc).min(cap.trunc);
    }
}

fn run<S: Scalar>(
    session: &Session,
    input: SessionConfig,
    data: Input<S>,
) -> Result<AnalyzeReport, CliError> {
    let Input {
        places,
        params,
        diagnostics,
    } = data;
    let classical = params.classical(session.tol);
    let check = CheckConfig {
        tol: session.tol,
        h_max: session.h_max.min(CheckConfig::default().h_max),
        ..CheckConfig::default()
    };
    let mut summary = Summary::default();
    let mut reports = Vec::new();
    for (index, pl) in places.iter().enumerate() {
        let sig = signature(pl, session.tol).map_err(|e| match e {
            ShapeError::SignatureUndetermined { .. } => {
                CliError::trunc(format!("place {index}: {e}"))
            }
            // a truncated branch may look straight
            ShapeError::Line if !pl.exact => CliError::trunc(format!(
                "place {index}: {e} within trunc {}; raise trunc",
                pl.trunc()
            )),
            _ => CliError::geometry(format!("place {index}: {e}")),
        })?;
        let curvature = CurvatureData::from_place(pl, &sig, session.tol);
        let cc = cross_check(pl, &params, &check)
            .map_err(|e| CliError::geometry(format!("place {index}: {e}")))?;
        let mut offsets = Vec::new();
        for b in cc
            .branches
            .into_iter()
            .filter(|b| session.branches.contains(&b.branch))
        {
            let op = params.with_branch(b.branch);
            let conflict = b.agreement.predictor_series == Tri::Disagree;
            let flagged = b.prediction.as_ref().is_some_and(|p| p.flagged);
            let mut disagreement = conflict && !flagged;
            if b.prediction.is_none() {
                match predict(&sig, &CurvatureData::from_signature(&sig), &op, session.tol) {
                    Err(PredictError::NeedDeeperTrunc) => summary.truncation_limited += 1,
                    Err(PredictError::Invariant(_)) => disagreement = true,
                    _ => {}
                }
            }
            if b.series.is_none() {
                if let Err(VerifyError::Shape(ShapeError::SignatureUndetermined { .. })) =
                    series_verdict(pl, &op, session.tol)
                {
                    summary.truncation_limited += 1;
                }
            }
            summary.decisive_disagreements += disagreement as usize;
            summary.flagged_conflicts += (conflict && flagged) as usize;
            offsets.push(OffsetReport {
                check: b,
                disagreement,
                flagged_conflict: conflict && flagged,
            });
        }
        let cusp_candidates = classical.then(|| cusp_candidates(pl, &params, session));
        reports.push(PlaceReport {
            index,
            center: (pl.center.0.to_text(), pl.center.1.to_text()),
            rotation: (pl.rotation.0.to_text(), pl.rotation.1.to_text()),
            place: pl.describe(),
            trunc: pl.trunc(),
            signature: sig.report(),
            curvature: CurvatureReport::of(&curvature),
            offsets,
            cusp_candidates,
        });
    }
    summary.exit_code = if summary.decisive_disagreements > 0 {
        crate::EXIT_DISAGREEMENT
    } else if summary.truncation_limited > 0 {
        crate::EXIT_TRUNC
    } else {
        0
    };
    Ok(AnalyzeReport {
        mode: S::MODE,
        input,
        params: ParamsReport {
            d: params.d.to_text(),
            a: params.a.to_text(),
            b: params.b.to_text(),
            classical,
        },
        diagnostics,
        places: reports,
        summary,
    })
}

/// Roots of `1 + D k(h) a` on `[-h_max, h_max]`: source points whose
/// classical offset has a vanishing derivative.
fn cusp_candidates<S: Scalar>(
    pl: &Place<S>,
    params: &OffsetParams<S>,
    session: &Session,
) -> Vec<CuspCandidate> {
    let fpl = pl.to_f64();
    let (Ok(dx), Ok(dy)) = (fpl.x.differentiate(), fpl.y.differentiate()) else {
        return Vec::new();
    };
    let (Ok(ddx), Ok(ddy)) = (dx.differentiate(), dy.differentiate()) else {
        return Vec::new();
    };
    let k = |h: f64| {
        let (xp, yp) = (dx.eval_f64(h), dy.eval_f64(h));
        (xp * ddy.eval_f64(h) - ddx.eval_f64(h) * yp) / xp.hypot(yp).powi(3)
    };
    let mut out = Vec::new();
    for &branch in &session.branches {
        let op = params.with_branch(branch);
        let (dd, a) = (op.signed_distance().to_f64(), op.a.to_f64());
        let f = |h: f64| 1.0 + dd * k(h) * a;
        let n = session.samples;
        let hs: Vec<f64> = (0..n)
            .map(|i| -session.h_max + 2.0 * session.h_max * i as f64 / (n - 1) as f64)
            .collect();
        for w in hs.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (flo, fhi) = (f(lo), f(hi));
            if !(flo.is_finite() && fhi.is_finite()) || flo * fhi > 0.0 || fhi == 0.0 {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let h = 0.5 * (lo + hi);
            // a pole of k changes sign without a root
            if f(h).abs() < 1e-8 {
                out.push(CuspCandidate {
                    branch,
                    h,
                    point: fpl.world_point(h),
                    k: k(h),
                });
            }
        }
    }
    out
}
