//! Gates and sequential circuits over a qudit lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Coord, Lattice};
use crate::linalg;
use crate::schedule::{radial_ordering, Preferred};
use crate::tensor::{random_unitary, Tensor};

/// Unitarity tolerance enforced on every gate.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Plaquette,
    #[serde(rename = "L")]
    LShaped,
    Custom,
}

/// Where a gate matrix came from; seeded gates serialize compactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateOrigin {
    Seed(u64),
    Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    matrix: Tensor,
    support: Vec<Coord>,
    kind: GateKind,
    pos: Coord,
    origin: GateOrigin,
}

impl Gate {
    /// Builds a gate, enforcing `max |U^dag U - I| <= 1e-10` and distinct
    /// support sites. The matrix acts on the support in the given order,
    /// first site most significant.
    pub fn new(matrix: Tensor, support: Vec<Coord>, kind: GateKind, pos: Coord, d: usize) -> Result<Self> {
        let k = support.len();
        if k == 0 {
            return Err(Error::InvalidArgument("gate support is empty".into()));
        }
        let dim = d.checked_pow(k as u32).ok_or_else(|| Error::InvalidArgument("gate too large".into()))?;
        if matrix.shape() != [dim, dim] {
            return Err(Error::DimensionMismatch(format!(
                "gate on {k} sites of dimension {d} needs a {dim}x{dim} matrix, got {:?}",
                matrix.shape()
            )));
        }
        for (i, s) in support.iter().enumerate() {
            if support[..i].contains(s) {
                return Err(Error::InvalidArgument(format!("support site {s:?} repeated")));
            }
        }
        let residual = linalg::unitarity_residual(matrix.data(), dim);
        if residual.is_nan() || residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual, tol: UNITARY_TOL });
        }
        Ok(Self { matrix, support, kind, pos, origin: GateOrigin::Matrix })
    }

    pub fn seeded(support: Vec<Coord>, kind: GateKind, pos: Coord, d: usize, seed: u64) -> Result<Self> {
        let dim = d.pow(support.len() as u32);
        let mut g = Self::new(random_unitary(dim, seed)?, support, kind, pos, d)?;
        g.origin = GateOrigin::Seed(seed);
        Ok(g)
    }

    pub fn identity(support: Vec<Coord>, kind: GateKind, pos: Coord, d: usize) -> Result<Self> {
        let dim = d.pow(support.len() as u32);
        Self::new(Tensor::identity(dim), support, kind, pos, d)
    }

    pub fn matrix(&self) -> &Tensor {
        &self.matrix
    }

    pub fn support(&self) -> &[Coord] {
        &self.support
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    /// Anchor position (plaquette corner, or the site a tensor is attached to).
    pub fn pos(&self) -> &[usize] {
        &self.pos
    }

    pub fn origin(&self) -> GateOrigin {
        self.origin
    }

    pub fn dim(&self) -> usize {
        self.matrix.shape()[0]
    }

    pub fn overlaps(&self, other: &Gate) -> bool {
        self.support.iter().any(|s| other.support.contains(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PPeps,
    RpPeps,
    Isotns,
    Sgs,
    FPeps,
    Custom,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::PPeps => "p-peps",
            Family::RpPeps => "rp-peps",
            Family::Isotns => "isotns",
            Family::Sgs => "sgs",
            Family::FPeps => "f-peps",
            Family::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "p-peps" => Family::PPeps,
            "rp-peps" => Family::RpPeps,
            "isotns" => Family::Isotns,
            "sgs" => Family::Sgs,
            "f-peps" => Family::FPeps,
            "custom" => Family::Custom,
            other => return Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Plaquette side length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp: Option<usize>,
    /// Bond dimension of the represented network.
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub bond_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Coord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferred: Option<Preferred>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oc: Option<Coord>,
}

impl CircuitParams {
    /// `s = ceil(log_d D)`.
    pub fn s(&self, d: usize) -> Option<usize> {
        self.bond_dim.map(|dd| ceil_log(dd, d))
    }
}

/// Smallest `s` with `d^s >= x`.
pub fn ceil_log(x: usize, d: usize) -> usize {
    let mut s = 0;
    let mut p = 1usize;
    while p < x {
        p *= d;
        s += 1;
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub lattice: Lattice,
    pub gates: Vec<Gate>,
    pub family: Family,
    pub params: CircuitParams,
}

impl Circuit {
    pub fn new(lattice: Lattice, family: Family, params: CircuitParams) -> Self {
        Self { lattice, gates: Vec::new(), family, params }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for s in gate.support() {
            self.lattice.check(s)?;
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn supports(&self) -> Vec<Vec<Coord>> {
        self.gates.iter().map(|g| g.support.clone()).collect()
    }

    pub fn positions(&self) -> Vec<Coord> {
        self.gates.iter().map(|g| g.pos.clone()).collect()
    }

    /// Checks the structural invariants of the circuit's family.
    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            for s in g.support() {
                self.lattice.check(s)?;
            }
        }
        match self.family {
            Family::PPeps | Family::RpPeps => self.validate_plaquettes()?,
            _ => {}
        }
        if self.family == Family::RpPeps {
            self.validate_radial()?;
        }
        Ok(())
    }

    fn validate_plaquettes(&self) -> Result<()> {
        let lp = self
            .params
            .lp
            .ok_or_else(|| Error::Schema("plaquette circuits need a plaquette size".into()))?;
        for (i, g) in self.gates.iter().enumerate() {
            if self.gates[..i].iter().any(|h| h.pos == g.pos) {
                return Err(Error::DuplicatePosition(g.pos.clone()));
            }
            let expected = self.lattice.plaquette(&g.pos, lp)?;
            if expected != g.support {
                return Err(Error::Schema(format!(
                    "gate {i} at {:?} does not act on the {lp}-plaquette {expected:?}",
                    g.pos
                )));
            }
        }
        Ok(())
    }

    fn validate_radial(&self) -> Result<()> {
        let lp = self.params.lp.unwrap_or(1);
        let source = self
            .params
            .source
            .clone()
            .ok_or_else(|| Error::Schema("rp-peps circuit needs a source".into()))?;
        let preferred = self.params.preferred.clone().unwrap_or_else(|| Preferred::default_for(self.lattice.q()));
        let ord = radial_ordering(&self.lattice, lp, &source, &preferred)?;
        if ord.positions != self.positions() {
            return Err(Error::Schema(
                "gate order is not the radial ordering for the stored source and preferred direction".into(),
            ));
        }
        Ok(())
    }
}
