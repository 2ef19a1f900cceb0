//! JSON file formats. Every document carries `"format": 1`.
//!
//! - basis: `{format, dim, label, states: [[[re, im], ...], ...], phase_order?, phase_exps?}`
//! - entangled basis: the basis fields plus `{b, s, tensor: "row-major mu×nu"}`;
//!   amplitude `n * d + k` belongs to `|n>_mu |k>_nu`
//! - density matrix: `{format, dim, entries: [[re, im], ...]}`, row-major
//! - probability table: `{format, dim, scheme, settings: [{id, outcomes: [p, ...]}]}`

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::entangled::EntangledBasis;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::mub::{BasisLabel, MubBasis};
use crate::state::StateVector;
use crate::tomography::{MeasurementSetting, ProbTable, Scheme};

pub const FORMAT_VERSION: u32 = 1;
pub const TENSOR_CONVENTION: &str = "row-major mu×nu";

type Pair = [f64; 2];

fn pair(z: &Complex64) -> Pair {
    [z.re, z.im]
}

fn unpair(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {v}")));
    }
    Ok(())
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
    s.push('\n');
    s
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct BasisDoc {
    format: u32,
    dim: usize,
    label: BasisLabel,
    states: Vec<Vec<Pair>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase_order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase_exps: Option<Vec<Vec<u32>>>,
}

impl BasisDoc {
    fn new(label: BasisLabel, states: &[StateVector]) -> Self {
        let phases: Option<Vec<_>> = states.iter().map(|s| s.phases()).collect();
        Self {
            format: FORMAT_VERSION,
            dim: states.first().map_or(0, StateVector::dim),
            label,
            states: states.iter().map(|s| s.amps().iter().map(pair).collect()).collect(),
            phase_order: phases.as_ref().and_then(|p| p.first().map(|x| x.order)),
            phase_exps: phases.map(|p| p.into_iter().map(|x| x.exps.clone()).collect()),
        }
    }

    fn into_states(self) -> Result<Vec<StateVector>> {
        check_version(self.format)?;
        self.states
            .into_iter()
            .map(|amps| {
                if amps.len() != self.dim {
                    return Err(Error::DimensionMismatch { expected: self.dim, found: amps.len() });
                }
                StateVector::new(amps.iter().map(unpair).collect())
            })
            .collect()
    }
}

pub fn basis_to_json(basis: &MubBasis) -> String {
    to_json(&BasisDoc::new(basis.label, &basis.states))
}

/// Reads a basis file. Stored phase exponents are not restored; amplitudes are authoritative.
pub fn basis_from_json(text: &str) -> Result<MubBasis> {
    let doc: BasisDoc = from_json(text)?;
    let label = doc.label;
    Ok(MubBasis { label, states: doc.into_states()? })
}

#[derive(Debug, Serialize, Deserialize)]
struct EntangledDoc {
    b: u32,
    s: u32,
    tensor: String,
    #[serde(flatten)]
    basis: BasisDoc,
}

pub fn entangled_basis_to_json(basis: &EntangledBasis) -> String {
    to_json(&EntangledDoc {
        b: basis.b,
        s: basis.s,
        tensor: TENSOR_CONVENTION.into(),
        basis: BasisDoc::new(BasisLabel::Structured(basis.b), &basis.states),
    })
}

pub fn entangled_basis_from_json(text: &str) -> Result<EntangledBasis> {
    let doc: EntangledDoc = from_json(text)?;
    if doc.tensor != TENSOR_CONVENTION {
        return Err(Error::Format(format!("unknown tensor convention {:?}", doc.tensor)));
    }
    Ok(EntangledBasis { b: doc.b, s: doc.s, states: doc.basis.into_states()? })
}

#[derive(Debug, Serialize, Deserialize)]
struct DensityDoc {
    format: u32,
    dim: usize,
    entries: Vec<Pair>,
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    let n = rho.dim();
    let m = rho.matrix();
    let entries = (0..n).flat_map(|i| (0..n).map(move |j| pair(&m[(i, j)]))).collect();
    to_json(&DensityDoc { format: FORMAT_VERSION, dim: n, entries })
}

/// Reads and validates a density matrix.
pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    let doc: DensityDoc = from_json(text)?;
    check_version(doc.format)?;
    if doc.entries.len() != doc.dim * doc.dim {
        return Err(Error::Format(format!("{} entries for dim {}", doc.entries.len(), doc.dim)));
    }
    DensityMatrix::new(CMatrix::from_row_iterator(doc.dim, doc.dim, doc.entries.iter().map(unpair)))
}

#[derive(Debug, Serialize, Deserialize)]
struct SettingDoc {
    id: MeasurementSetting,
    outcomes: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableDoc {
    format: u32,
    dim: u32,
    scheme: Scheme,
    settings: Vec<SettingDoc>,
}

pub fn prob_table_to_json(table: &ProbTable) -> String {
    to_json(&TableDoc {
        format: FORMAT_VERSION,
        dim: table.dim,
        scheme: table.scheme,
        settings: table.entries.iter().map(|(id, p)| SettingDoc { id: *id, outcomes: p.clone() }).collect(),
    })
}

/// Reads and validates a probability table; duplicate settings are rejected.
pub fn prob_table_from_json(text: &str) -> Result<ProbTable> {
    let doc: TableDoc = from_json(text)?;
    check_version(doc.format)?;
    let mut entries = BTreeMap::new();
    for s in doc.settings {
        if entries.insert(s.id, s.outcomes).is_some() {
            return Err(Error::Format(format!("duplicate setting {}", s.id)));
        }
    }
    let table = ProbTable { dim: doc.dim, scheme: doc.scheme, entries };
    table.validate()?;
    Ok(table)
}
