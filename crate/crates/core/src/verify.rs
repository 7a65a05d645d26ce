//! End-to-end checks shared by the command line and the acceptance harness.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::families::sgs::direct_state;
use crate::families::{build_fpeps_circuit, build_isotns_circuit, build_sgs, embed_in_plaquettes, Embedding, GateChoice, IsoOc, SgsSpec};
use crate::lattice::{Coord, Lattice};
use crate::network::{contract_network, sgs_to_network, verify_network_isometries};
use crate::statevector::{fidelity, simulate_frozen, simulate_with, StateVector};

/// One named measurement against its tolerance. For fidelities `value` is
/// the infidelity `1 - F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, tol, pass: value <= tol }
    }

    pub fn infidelity(name: impl Into<String>, f: f64, tol: f64) -> Self {
        Self::at_most(name, (1.0 - f).max(0.0), tol)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 0.0 } else { 1.0 }, tol: 0.0, pass: ok }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn new(checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { checks, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inclusion {
    #[serde(rename = "sgs-rppeps")]
    SgsRpPeps,
    #[serde(rename = "sgs-isotns")]
    SgsIsotns,
    #[serde(rename = "isotns-rppeps")]
    IsotnsRpPeps,
    #[serde(rename = "fpeps-ppeps")]
    FpepsPPeps,
}

impl Inclusion {
    pub const ALL: [Inclusion; 4] = [Self::SgsRpPeps, Self::SgsIsotns, Self::IsotnsRpPeps, Self::FpepsPPeps];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SgsRpPeps => "sgs-rppeps",
            Self::SgsIsotns => "sgs-isotns",
            Self::IsotnsRpPeps => "isotns-rppeps",
            Self::FpepsPPeps => "fpeps-ppeps",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown inclusion '{s}'")))
    }
}

fn normalized(s: &StateVector) -> Result<StateVector> {
    let n = s.norm();
    if n == 0.0 {
        return Err(Error::InvalidArgument("zero state".into()));
    }
    StateVector::from_amplitudes(s.lattice(), s.sites().to_vec(), s.amplitudes().iter().map(|a| a / n).collect())
}

/// Fidelity between the original circuit state and the embedded circuit
/// state with its ancillas held in `|0>`, plus the weight kept in that
/// sector.
pub fn embedding_fidelity(exec: Exec, original: &Circuit, e: &Embedding) -> Result<(f64, f64)> {
    let psi = simulate_with(exec, original)?;
    let orig_sites: Vec<Coord> = e.site_map.iter().map(|(s, _)| s.clone()).collect();
    let relabeled =
        StateVector::from_amplitudes(&e.circuit.lattice, e.embedded_sites(), psi.reorder(&orig_sites)?.into_amplitudes())?;
    let projected = simulate_frozen(exec, &e.circuit, &e.ancillas)?;
    let weight = projected.norm().powi(2);
    Ok((fidelity(&relabeled, &normalized(&projected)?)?, weight))
}

/// Seeded instance of one inclusion on an `n x m` qubit lattice.
pub fn verify_inclusion(exec: Exec, inc: Inclusion, n: usize, m: usize, seed: u64, tol: f64) -> Result<Report> {
    let lat = Lattice::open(&[n, m], 2)?;
    let mut checks = Vec::new();
    match inc {
        Inclusion::SgsRpPeps | Inclusion::SgsIsotns => {
            let spec = SgsSpec::random(n, m, 2, 2, seed)?;
            let c = build_sgs(&spec, &lat)?;
            let psi = simulate_with(exec, &c)?;
            checks.push(Check::infidelity("circuit vs direct", fidelity(&psi, &direct_state(&spec)?)?, tol));
            if inc == Inclusion::SgsRpPeps {
                let e = embed_in_plaquettes(&c, 2)?;
                checks.push(Check::holds("embedded ordering valid", e.circuit.validate().is_ok()));
                checks.push(Check::infidelity("circuit vs embedded", fidelity(&psi, &simulate_with(exec, &e.circuit)?)?, tol));
            } else {
                let net = sgs_to_network(&spec)?;
                let iso = verify_network_isometries(&net, 1e-12)?;
                checks.push(Check::at_most("isometry residual", iso.max_residual, 1e-12));
                let phi = contract_network(&net)?;
                checks.push(Check::infidelity("circuit vs network", fidelity(&psi, &phi)?, tol));
            }
        }
        Inclusion::IsotnsRpPeps => {
            let c = build_isotns_circuit(&lat, 2, IsoOc::Corner, GateChoice::Seed(seed))?;
            let e = embed_in_plaquettes(&c, 3)?;
            checks.push(Check::holds("embedded ordering valid", e.circuit.validate().is_ok()));
            let (f, w) = embedding_fidelity(exec, &c, &e)?;
            checks.push(Check::at_most("ancilla leakage", (1.0 - w).abs(), tol));
            checks.push(Check::infidelity("circuit vs embedded", f, tol));
        }
        Inclusion::FpepsPPeps => {
            let c = build_fpeps_circuit(&lat, 2, GateChoice::Seed(seed))?;
            let e = embed_in_plaquettes(&c, 3)?;
            checks.push(Check::holds("embedded ordering valid", e.circuit.validate().is_ok()));
            let (f, w) = embedding_fidelity(exec, &c, &e)?;
            checks.push(Check::at_most("ancilla leakage", (1.0 - w).abs(), tol));
            checks.push(Check::infidelity("circuit vs embedded", f, tol));
        }
    }
    Ok(Report::new(checks))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutBound {
    pub axis: usize,
    /// Region A is every site with `coord[axis] < cut`.
    pub cut: usize,
    pub entropy: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Entropy of every straight cut against `2 ln d` times, summed over the
/// gates straddling the cut, the smaller number of legs on either side.
pub fn area_law(circuit: &Circuit, psi: &StateVector, slack: f64) -> Result<Vec<CutBound>> {
    let lat = &circuit.lattice;
    let ln_d = (lat.d as f64).ln();
    let mut out = Vec::new();
    for axis in 0..lat.q() {
        for cut in 1..lat.dims[axis] {
            let region: Vec<Coord> = psi.sites().iter().filter(|s| s[axis] < cut).cloned().collect();
            let entropy = psi.entanglement_entropy(&region)?;
            let legs: usize = circuit
                .gates
                .iter()
                .map(|g| {
                    let a = g.support().iter().filter(|s| s[axis] < cut).count();
                    a.min(g.support().len() - a)
                })
                .sum();
            let bound = 2.0 * ln_d * legs as f64;
            out.push(CutBound { axis, cut, entropy, bound, pass: entropy <= bound + slack });
        }
    }
    Ok(out)
}
