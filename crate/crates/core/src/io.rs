//! File formats: binary tensors, circuit JSON, state and network export.
//!
//! Binary tensor layout (`TNS1`): the magic bytes, the rank as a
//! little-endian `u32`, each dimension as a little-endian `u32`, then the
//! row-major data as interleaved `(re, im)` little-endian `f64`. A JSON
//! sidecar next to the file (`<name>.json`) carries labels and metadata.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitParams, Family, Gate, GateKind, GateOrigin};
use crate::error::{Error, Result};
use crate::families::isotns::{corner_l_support, staircase_support};
use crate::lattice::{Coord, Lattice};
use crate::network::{ArrowedNetwork, Bond, Leg, NetTensor};
use crate::schedule::Preferred;
use crate::statevector::StateVector;
use crate::tensor::{LegLabel, Tensor};
use crate::C64;

pub const TNS_MAGIC: &[u8; 4] = b"TNS1";

pub fn encode_tns(t: &Tensor) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(8 + 4 * t.rank() + 16 * t.len());
    out.extend_from_slice(TNS_MAGIC);
    out.extend_from_slice(&dim_u32(t.rank())?.to_le_bytes());
    for &n in t.shape() {
        out.extend_from_slice(&dim_u32(n)?.to_le_bytes());
    }
    for z in t.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(out)
}

fn dim_u32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::InvalidArgument(format!("dimension {n} does not fit in 32 bits")))
}

pub fn decode_tns(bytes: &[u8]) -> Result<Tensor> {
    let bad = |msg: &str| Error::Schema(format!("TNS1: {msg}"));
    if bytes.len() < 8 || &bytes[..4] != TNS_MAGIC {
        return Err(bad("missing magic bytes"));
    }
    let word = |at: usize| -> Result<usize> {
        let b = bytes.get(at..at + 4).ok_or_else(|| bad("truncated header"))?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
    };
    let rank = word(4)?;
    let shape: Vec<usize> = (0..rank).map(|k| word(8 + 4 * k)).collect::<Result<_>>()?;
    let len = shape.iter().try_fold(1usize, |a, &n| a.checked_mul(n)).ok_or_else(|| bad("shape overflows"))?;
    let start = 8 + 4 * rank;
    if bytes.len() != start + 16 * len {
        return Err(bad(&format!("expected {} data bytes, found {}", 16 * len, bytes.len().saturating_sub(start))));
    }
    let f = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let data = (0..len).map(|i| C64::new(f(start + 16 * i), f(start + 16 * i + 8))).collect();
    Tensor::new(shape, data)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TensorSidecar {
    pub format: String,
    pub shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<LegLabel>>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub meta: serde_json::Value,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Writes the tensor and its sidecar.
pub fn write_tensor(path: &Path, t: &Tensor, meta: serde_json::Value) -> Result<()> {
    fs::write(path, encode_tns(t)?)?;
    let side = TensorSidecar { format: "TNS1".into(), shape: t.shape().to_vec(), labels: t.labels().map(<[_]>::to_vec), meta };
    write_json(&sidecar_path(path), &side)
}

/// Reads a tensor, attaching labels from the sidecar when one exists.
pub fn read_tensor(path: &Path) -> Result<(Tensor, Option<TensorSidecar>)> {
    let t = decode_tns(&fs::read(path)?)?;
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok((t, None));
    }
    let sc: TensorSidecar = serde_json::from_str(&fs::read_to_string(side)?)?;
    if sc.shape != t.shape() {
        return Err(Error::Schema(format!("sidecar shape {:?} differs from tensor shape {:?}", sc.shape, t.shape())));
    }
    let t = match &sc.labels {
        Some(l) => t.with_labels(l.clone())?,
        None => t,
    };
    Ok((t, Some(sc)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct StateMeta {
    lattice: Lattice,
    sites: Vec<Coord>,
    index_convention: String,
}

const INDEX_CONVENTION: &str = "first listed site is the most significant base-d digit";

pub fn write_state(path: &Path, psi: &StateVector) -> Result<()> {
    let t = Tensor::new(vec![psi.amplitudes().len()], psi.amplitudes().to_vec())?;
    let meta = StateMeta { lattice: psi.lattice().clone(), sites: psi.sites().to_vec(), index_convention: INDEX_CONVENTION.into() };
    write_tensor(path, &t, serde_json::to_value(meta)?)
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    let (t, side) = read_tensor(path)?;
    let side = side.ok_or_else(|| Error::Schema(format!("{} has no sidecar", path.display())))?;
    let meta: StateMeta = serde_json::from_value(side.meta)?;
    StateVector::from_amplitudes(&meta.lattice, meta.sites, t.into_data())
}

// ---- circuit JSON ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GateSource {
    Seed,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaquetteFile {
    size: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<Coord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preferred: Option<Preferred>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    bond_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    oc: Option<Coord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateFile {
    pos: Coord,
    support_kind: GateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    custom_support: Option<Vec<Coord>>,
    gate_kind: GateSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    lattice: Lattice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    plaquette: Option<PlaquetteFile>,
    family: String,
    #[serde(default)]
    params: ParamsFile,
    gates: Vec<GateFile>,
}

/// Support an `L` gate at `pos` gets when the file leaves it implicit.
fn default_l_support(lattice: &Lattice, pos: &[usize], s: Option<usize>) -> Option<Vec<Coord>> {
    match lattice.q() {
        2 => s.map(|s| corner_l_support(lattice, pos[0], pos[1], s)),
        3 => Some(staircase_support(lattice, pos)),
        _ => None,
    }
}

fn to_file(c: &Circuit) -> CircuitFile {
    let s = c.params.s(c.lattice.d);
    let gates = c
        .gates
        .iter()
        .map(|g| {
            let custom_support = match g.kind() {
                GateKind::Plaquette => None,
                GateKind::LShaped if default_l_support(&c.lattice, g.pos(), s).as_deref() == Some(g.support()) => None,
                _ => Some(g.support().to_vec()),
            };
            let (gate_kind, seed, matrix) = match g.origin() {
                GateOrigin::Seed(x) => (GateSource::Seed, Some(x), None),
                GateOrigin::Matrix => {
                    let dim = g.dim();
                    let rows = (0..dim)
                        .map(|r| (0..dim).map(|k| {
                            let z = g.matrix().data()[r * dim + k];
                            [z.re, z.im]
                        }).collect())
                        .collect();
                    (GateSource::Matrix, None, Some(rows))
                }
            };
            GateFile { pos: g.pos().to_vec(), support_kind: g.kind(), custom_support, gate_kind, seed, matrix }
        })
        .collect();
    CircuitFile {
        lattice: c.lattice.clone(),
        plaquette: c.params.lp.map(|size| PlaquetteFile { size }),
        family: c.family.as_str().into(),
        params: ParamsFile {
            source: c.params.source.clone(),
            preferred: c.params.preferred.clone(),
            bond_dim: c.params.bond_dim,
            oc: c.params.oc.clone(),
        },
        gates,
    }
}

fn from_file(f: CircuitFile) -> Result<Circuit> {
    let lat = Lattice::new(f.lattice.dims.clone(), f.lattice.d, f.lattice.boundary)?;
    let family = Family::parse(&f.family)?;
    let params = CircuitParams {
        lp: f.plaquette.as_ref().map(|p| p.size),
        bond_dim: f.params.bond_dim,
        source: f.params.source,
        preferred: f.params.preferred,
        oc: f.params.oc,
    };
    let s = params.s(lat.d);
    let mut c = Circuit::new(lat.clone(), family, params);
    for (i, g) in f.gates.into_iter().enumerate() {
        let at = |e: Error| Error::Schema(format!("gates[{i}]: {e}"));
        if g.pos.len() != lat.q() {
            return Err(at(Error::InvalidArgument(format!("position {:?} on a {}D lattice", g.pos, lat.q()))));
        }
        let support = match (g.support_kind, g.custom_support) {
            (_, Some(sup)) => sup,
            (GateKind::Plaquette, None) => {
                let lp = c.params.lp.ok_or_else(|| at(Error::InvalidArgument("plaquette gate without plaquette.size".into())))?;
                lat.plaquette(&g.pos, lp).map_err(at)?
            }
            (GateKind::LShaped, None) => default_l_support(&lat, &g.pos, s)
                .ok_or_else(|| at(Error::InvalidArgument("L gate without custom_support needs params.D".into())))?,
            (GateKind::Custom, None) => return Err(at(Error::InvalidArgument("custom gate without custom_support".into()))),
        };
        let gate = match (g.gate_kind, g.seed, g.matrix) {
            (GateSource::Seed, Some(seed), None) => Gate::seeded(support, g.support_kind, g.pos, lat.d, seed),
            (GateSource::Matrix, None, Some(rows)) => {
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(at(Error::DimensionMismatch("matrix rows of unequal length".into())));
                }
                let data = rows.into_iter().flatten().map(|[re, im]| C64::new(re, im)).collect();
                Gate::new(Tensor::new(vec![dim, dim], data).map_err(at)?, support, g.support_kind, g.pos, lat.d)
            }
            (GateSource::Seed, ..) => return Err(at(Error::InvalidArgument("seed gates carry exactly a seed".into()))),
            (GateSource::Matrix, ..) => return Err(at(Error::InvalidArgument("matrix gates carry exactly a matrix".into()))),
        }
        .map_err(at)?;
        c.push(gate).map_err(at)?;
    }
    c.validate()?;
    Ok(c)
}

/// Canonical JSON text of a circuit (pretty-printed, fixed key order).
pub fn circuit_to_json(c: &Circuit) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_file(c))?;
    s.push('\n');
    Ok(s)
}

/// Parses and validates circuit JSON. Syntax and shape errors report line
/// and column; semantic errors name the offending gate.
pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    let f: CircuitFile = serde_json::from_str(text)
        .map_err(|e| Error::Schema(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    from_file(f)
}

pub fn save_circuit(c: &Circuit, path: &Path) -> Result<()> {
    fs::write(path, circuit_to_json(c)?)?;
    Ok(())
}

pub fn load_circuit(path: &Path) -> Result<Circuit> {
    circuit_from_json(&fs::read_to_string(path)?)
}

// ---- networks ----

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestTensor {
    pub id: Coord,
    pub legs: Vec<Leg>,
    pub shape: Vec<usize>,
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkManifest {
    pub lattice: Lattice,
    pub oc: Option<usize>,
    pub tensors: Vec<ManifestTensor>,
    /// Arrows point from `tail` to `head`.
    pub bonds: Vec<Bond>,
}

/// Writes `manifest.json` and one `tensor_<k>.tns` per tensor into `dir`.
pub fn save_network(net: &ArrowedNetwork, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut tensors = Vec::new();
    for (k, t) in net.tensors.iter().enumerate() {
        let file = format!("tensor_{k}.tns");
        let path = dir.join(&file);
        write_tensor(&path, &t.tensor, serde_json::Value::Null)?;
        written.push(path.clone());
        written.push(sidecar_path(&path));
        tensors.push(ManifestTensor { id: t.id.clone(), legs: t.legs.clone(), shape: t.tensor.shape().to_vec(), file });
    }
    let manifest = NetworkManifest { lattice: net.lattice.clone(), oc: net.oc, tensors, bonds: net.bonds.clone() };
    let path = dir.join("manifest.json");
    write_json(&path, &manifest)?;
    written.push(path);
    Ok(written)
}

pub fn load_network(dir: &Path) -> Result<ArrowedNetwork> {
    let m: NetworkManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let mut tensors = Vec::with_capacity(m.tensors.len());
    for mt in m.tensors {
        let (t, _) = read_tensor(&dir.join(&mt.file))?;
        if t.shape() != mt.shape.as_slice() {
            return Err(Error::Schema(format!("{} has shape {:?}, manifest says {:?}", mt.file, t.shape(), mt.shape)));
        }
        tensors.push(NetTensor { id: mt.id, tensor: t, legs: mt.legs });
    }
    let net = ArrowedNetwork { lattice: m.lattice, tensors, bonds: m.bonds, oc: m.oc };
    net.check()?;
    Ok(net)
}
