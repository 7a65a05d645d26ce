//! Local expectation values from the reverse light cone of the observable,
//! correlation scans, and the sequential vs brickwall gate-count comparison.

use crate::circuit::{Circuit, CircuitParams, Family, Gate, GateKind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{Coord, Lattice};
use crate::rng::derive_seed;
use crate::schedule::{brickwall_ordering, plaquette_supports, reverse_light_cone};
use crate::statevector::{expectation, simulate_gates, Observable};
use crate::tensor::Tensor;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CancellationReport {
    pub surviving: Vec<usize>,
    pub reduced_support: Vec<Coord>,
    pub total_gates: usize,
    pub cost_ratio: f64,
}

/// Gates that can influence `support`, and the sites they touch.
pub fn cancellation(circuit: &Circuit, support: &[Coord]) -> CancellationReport {
    let supports = circuit.supports();
    let surviving = reverse_light_cone(&supports, support);
    let mut sites: BTreeSet<Coord> = support.iter().cloned().collect();
    for &g in &surviving {
        sites.extend(supports[g].iter().cloned());
    }
    let total = circuit.gates.len();
    let cost_ratio = if total == 0 { 0.0 } else { surviving.len() as f64 / total as f64 };
    CancellationReport { surviving, reduced_support: sites.into_iter().collect(), total_gates: total, cost_ratio }
}

/// `<psi|O|psi>` simulating only the gates in the reverse light cone of `O`
/// on the sites they touch.
pub fn expectation_via_lightcone(exec: Exec, circuit: &Circuit, obs: &Observable) -> Result<(C64, CancellationReport)> {
    for s in &obs.support {
        circuit.lattice.check(s)?;
    }
    let rep = cancellation(circuit, &obs.support);
    let psi = simulate_gates(
        exec,
        &circuit.lattice,
        rep.reduced_support.clone(),
        rep.surviving.iter().map(|&g| &circuit.gates[g]),
    )?;
    Ok((expectation(&psi, obs)?, rep))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub site_a: Coord,
    pub site_b: Coord,
    /// Manhattan distance.
    pub distance: usize,
    pub value: C64,
}

/// `<A_a B_b> - <A_a><B_b>` for every pair, each from its own light cone.
pub fn correlation_scan(
    exec: Exec,
    circuit: &Circuit,
    op_a: &Tensor,
    op_b: &Tensor,
    pairs: &[(Coord, Coord)],
) -> Result<Vec<CorrelationRow>> {
    let rows = exec.map(pairs, |(a, b)| -> Result<CorrelationRow> {
        if a == b {
            return Err(Error::InvalidArgument(format!("pair on a single site {a:?}")));
        }
        let ab = Observable::product(&[(op_a, a.clone()), (op_b, b.clone())]);
        let (eab, _) = expectation_via_lightcone(Exec::Sequential, circuit, &ab)?;
        let (ea, _) = expectation_via_lightcone(Exec::Sequential, circuit, &Observable::new(op_a.clone(), vec![a.clone()]))?;
        let (eb, _) = expectation_via_lightcone(Exec::Sequential, circuit, &Observable::new(op_b.clone(), vec![b.clone()]))?;
        let distance = a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum();
        Ok(CorrelationRow { site_a: a.clone(), site_b: b.clone(), distance, value: eab - ea * eb })
    });
    rows.into_iter().collect()
}

fn coord_field(c: &[usize]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")
}

/// CSV with columns `site_a,site_b,distance,re,im`; coordinates are written
/// as `i:j`.
pub fn correlations_csv(rows: &[CorrelationRow]) -> String {
    let mut out = String::from("site_a,site_b,distance,re,im\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{:e}",
            coord_field(&r.site_a),
            coord_field(&r.site_b),
            r.distance,
            r.value.re,
            r.value.im
        );
    }
    out
}

/// Brickwall circuit with seeded plaquette gates; gate seeds depend on the
/// sweep and the position.
pub fn brickwall_circuit(lattice: &Lattice, lp: usize, sweeps: usize, seed: u64) -> Result<Circuit> {
    let params = CircuitParams { lp: Some(lp), ..Default::default() };
    let mut c = Circuit::new(lattice.clone(), Family::Custom, params);
    let mut done = 0;
    for s in 0..sweeps {
        let all = brickwall_ordering(lattice, lp, s + 1);
        for pos in &all[done..] {
            let mut parts = vec![s as u64];
            parts.extend(pos.iter().map(|&x| x as u64));
            let support = lattice.plaquette(pos, lp)?;
            c.push(Gate::seeded(support, GateKind::Plaquette, pos.clone(), lattice.d, derive_seed(seed, &parts))?)?;
        }
        done = all.len();
    }
    Ok(c)
}

fn far_corner(lattice: &Lattice) -> Coord {
    lattice.dims.iter().map(|&n| n - 1).collect()
}

/// Fewest brickwall sweeps after which the reverse cones of two opposite
/// corners share a gate. Coinciding corners need none.
pub fn min_brickwall_sweeps(lattice: &Lattice, lp: usize, max_sweeps: usize) -> Result<Option<usize>> {
    let (a, b) = (vec![0; lattice.q()], far_corner(lattice));
    if a == b {
        return Ok(Some(0));
    }
    for sweeps in 1..=max_sweeps {
        let sup = plaquette_supports(lattice, &brickwall_ordering(lattice, lp, sweeps), lp)?;
        let ca: HashSet<usize> = reverse_light_cone(&sup, std::slice::from_ref(&a)).into_iter().collect();
        if reverse_light_cone(&sup, std::slice::from_ref(&b)).iter().any(|g| ca.contains(g)) {
            return Ok(Some(sweeps));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrickwallComparison {
    pub dims: Vec<usize>,
    pub lp: usize,
    pub num_sites: usize,
    /// Plaquettes of one sequential pass, after which every pair of sites
    /// shares a cone.
    pub sequential_gates: usize,
    pub brickwall_min_sweeps: Option<usize>,
    pub brickwall_gates: Option<usize>,
    /// `sequential_gates / N`.
    pub sequential_per_site: f64,
    /// `brickwall_gates / (N max n_i)`.
    pub brickwall_per_site_side: Option<f64>,
}

pub fn brickwall_comparison(lattice: &Lattice, lp: usize) -> Result<BrickwallComparison> {
    if lp == 0 {
        return Err(Error::InvalidArgument("plaquette size must be positive".into()));
    }
    let n = lattice.num_sites();
    let max_side = *lattice.dims.iter().max().unwrap_or(&1);
    let sequential = lattice.anchors(lp).len();
    let bound = 4 * lattice.dims.iter().sum::<usize>() + 4;
    let sweeps = min_brickwall_sweeps(lattice, lp, bound)?;
    let gates = sweeps.map(|s| brickwall_ordering(lattice, lp, s).len());
    Ok(BrickwallComparison {
        dims: lattice.dims.clone(),
        lp,
        num_sites: n,
        sequential_gates: sequential,
        brickwall_min_sweeps: sweeps,
        brickwall_gates: gates,
        sequential_per_site: sequential as f64 / n as f64,
        brickwall_per_site_side: gates.map(|g| g as f64 / (n * max_side) as f64),
    })
}
