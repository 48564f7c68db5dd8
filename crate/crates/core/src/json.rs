//! JSON forms of the external data types. Scalars travel as exact
//! strings ("a/b" over the rationals, coefficient lists over proper
//! extensions), so reports are reproducible byte for byte.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::filtration::Filtration;
use crate::mat::Mat;
use crate::monad::SurfacePoint;
use crate::plane::PlaneADHM;
use crate::rep::{BlowupRep, SubrepPair};
use crate::stability::{
    StabilityParam, StabilityStatus, StabilityVerdict, VerdictMethod, Witness,
};
use crate::subspace::Subspace;

pub type MatJson = Vec<Vec<String>>;

pub fn mat_to_json<F: Field>(m: &Mat<F>) -> MatJson {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| m.field.elem_to_string(m.at(r, c))).collect())
        .collect()
}

pub fn mat_from_json<F: Field>(
    field: &F,
    rows: usize,
    cols: usize,
    data: &MatJson,
) -> Result<Mat<F>> {
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(Error::MalformedInput(format!(
            "expected a {rows}x{cols} matrix, found {}x{}",
            data.len(),
            data.first().map(|r| r.len()).unwrap_or(0)
        )));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for row in data {
        for s in row {
            entries.push(field.parse_elem(s)?);
        }
    }
    Ok(Mat::new(field.clone(), rows, cols, entries))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimsJson {
    pub v0: usize,
    pub v1: usize,
    pub w: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepJson {
    pub field: FieldSpec,
    pub dims: DimsJson,
    #[serde(rename = "B1")]
    pub b1: MatJson,
    #[serde(rename = "B2")]
    pub b2: MatJson,
    pub d: MatJson,
    pub i: MatJson,
    pub j: MatJson,
}

pub fn rep_to_json<F: Field>(x: &BlowupRep<F>) -> RepJson {
    RepJson {
        field: x.field.spec(),
        dims: DimsJson { v0: x.n0, v1: x.n1, w: x.r },
        b1: mat_to_json(&x.b1),
        b2: mat_to_json(&x.b2),
        d: mat_to_json(&x.d),
        i: mat_to_json(&x.i),
        j: mat_to_json(&x.j),
    }
}

pub fn rep_from_json<F: Field>(field: &F, json: &RepJson) -> Result<BlowupRep<F>> {
    let DimsJson { v0, v1, w } = json.dims;
    BlowupRep::new(
        field.clone(),
        mat_from_json(field, v0, v1, &json.b1)?,
        mat_from_json(field, v0, v1, &json.b2)?,
        mat_from_json(field, v1, v0, &json.d)?,
        mat_from_json(field, v0, w, &json.i)?,
        mat_from_json(field, w, v1, &json.j)?,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneDimsJson {
    pub v: usize,
    pub w: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneJson {
    pub field: FieldSpec,
    pub dims: PlaneDimsJson,
    #[serde(rename = "B1")]
    pub b1: MatJson,
    #[serde(rename = "B2")]
    pub b2: MatJson,
    pub i: MatJson,
    pub j: MatJson,
}

pub fn plane_to_json<F: Field>(a: &PlaneADHM<F>) -> PlaneJson {
    PlaneJson {
        field: a.field.spec(),
        dims: PlaneDimsJson { v: a.n, w: a.r },
        b1: mat_to_json(&a.b1),
        b2: mat_to_json(&a.b2),
        i: mat_to_json(&a.i),
        j: mat_to_json(&a.j),
    }
}

pub fn plane_from_json<F: Field>(field: &F, json: &PlaneJson) -> Result<PlaneADHM<F>> {
    let PlaneDimsJson { v, w } = json.dims;
    PlaneADHM::new(
        field.clone(),
        mat_from_json(field, v, v, &json.b1)?,
        mat_from_json(field, v, v, &json.b2)?,
        mat_from_json(field, v, w, &json.i)?,
        mat_from_json(field, w, v, &json.j)?,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZetaJson {
    pub zeta0: String,
    pub zeta1: String,
}

pub fn zeta_to_json(z: &StabilityParam) -> ZetaJson {
    let q = crate::field::Rationals;
    ZetaJson { zeta0: q.elem_to_string(&z.zeta0), zeta1: q.elem_to_string(&z.zeta1) }
}

pub fn zeta_from_json(j: &ZetaJson) -> Result<StabilityParam> {
    let q = crate::field::Rationals;
    Ok(StabilityParam::new(q.parse_elem(&j.zeta0)?, q.parse_elem(&j.zeta1)?))
}

fn subspace_to_json<F: Field>(s: &Subspace<F>) -> MatJson {
    mat_to_json(s.basis())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum WitnessJson {
    #[serde(rename = "pair")]
    Pair { s0: MatJson, s1: MatJson, s_inf: u8 },
    #[serde(rename = "space")]
    Space { basis: MatJson },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictJson {
    pub status: String,
    pub witness: Option<WitnessJson>,
    pub method: String,
}

pub fn status_str(s: StabilityStatus) -> &'static str {
    match s {
        StabilityStatus::Stable => "Stable",
        StabilityStatus::StrictlySemistable => "StrictlySemistable",
        StabilityStatus::Unstable => "Unstable",
        StabilityStatus::Unknown => "Unknown",
    }
}

pub fn method_str(m: VerdictMethod) -> &'static str {
    match m {
        VerdictMethod::ExhaustiveSubspaces => "ExhaustiveSubspaces",
        VerdictMethod::HomCriteria => "HomCriteria",
        VerdictMethod::ClosurePair => "ClosurePair",
        VerdictMethod::TheoremBacked => "TheoremBacked",
    }
}

pub fn verdict_to_json<F: Field>(v: &StabilityVerdict<F>) -> VerdictJson {
    VerdictJson {
        status: status_str(v.status).to_string(),
        witness: v.witness.as_ref().map(|w| match w {
            Witness::Pair(p) => WitnessJson::Pair {
                s0: subspace_to_json(&p.s0),
                s1: subspace_to_json(&p.s1),
                s_inf: u8::from(p.s_inf),
            },
            Witness::Space(s) => WitnessJson::Space { basis: subspace_to_json(s) },
        }),
        method: method_str(v.method).to_string(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointJson {
    pub p2: [String; 3],
    pub p1: [String; 2],
}

pub fn point_to_json<F: Field>(p: &SurfacePoint<F>) -> PointJson {
    let f = &p.field;
    PointJson {
        p2: [f.elem_to_string(&p.z0), f.elem_to_string(&p.z1), f.elem_to_string(&p.z2)],
        p1: [f.elem_to_string(&p.z), f.elem_to_string(&p.w)],
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiltrationJson {
    pub steps: Vec<WitnessJson>,
    pub slopes: Vec<String>,
}

pub fn filtration_to_json<F: Field>(filt: &Filtration<F>) -> FiltrationJson {
    let q = crate::field::Rationals;
    FiltrationJson {
        steps: filt
            .steps
            .iter()
            .map(|p: &SubrepPair<F>| WitnessJson::Pair {
                s0: subspace_to_json(&p.s0),
                s1: subspace_to_json(&p.s1),
                s_inf: u8::from(p.s_inf),
            })
            .collect(),
        slopes: filt.slopes.iter().map(|s| q.elem_to_string(s)).collect(),
    }
}
