//! Rewriting circuits as plaquette circuits on (possibly padded) lattices.
//!
//! Every gate is assigned a plaquette anchor; gates are regrouped in the
//! target anchor order (which must keep every overlapping pair in its
//! original relative order), gates sharing an anchor are multiplied into one
//! plaquette unitary, and unused anchors receive identities.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, CircuitParams, Family, Gate, GateKind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{Boundary, Coord, Lattice};
use crate::linalg::{self, ZERO};
use crate::schedule::{radial_ordering, Preferred};

#[derive(Clone, Debug)]
pub struct Embedding {
    pub circuit: Circuit,
    /// `(original site, embedded site)` for every original site.
    pub site_map: Vec<(Coord, Coord)>,
    /// Embedded sites with no original counterpart; they stay in `|0>`.
    pub ancillas: Vec<Coord>,
}

impl Embedding {
    pub fn embedded_sites(&self) -> Vec<Coord> {
        self.site_map.iter().map(|(_, e)| e.clone()).collect()
    }
}

/// Extends a `d^k` operator on register positions `pos` of an `n`-site
/// register to the full register.
pub fn embed_operator(u: &[C64], pos: &[usize], n: usize, d: usize) -> Vec<C64> {
    let k = pos.len();
    let dk = d.pow(k as u32);
    let dim = d.pow(n as u32);
    let strides: Vec<usize> = pos.iter().map(|&p| d.pow((n - 1 - p) as u32)).collect();
    let offset = |sub: usize| {
        let mut r = sub;
        let mut off = 0;
        for t in (0..k).rev() {
            off += (r % d) * strides[t];
            r /= d;
        }
        off
    };
    let offsets: Vec<usize> = (0..dk).map(offset).collect();
    let mut out = vec![ZERO; dim * dim];
    for c in 0..dim {
        let mut c_sub = 0;
        for &s in &strides {
            c_sub = c_sub * d + (c / s) % d;
        }
        let rest = c - offsets[c_sub];
        for r_sub in 0..dk {
            let v = u[r_sub * dk + c_sub];
            if v != ZERO {
                out[(rest + offsets[r_sub]) * dim + c] = v;
            }
        }
    }
    out
}

struct Plan {
    target: Lattice,
    lp: usize,
    /// embedded site for each original site
    map: HashMap<Coord, Coord>,
    anchors: Vec<Coord>,
    order: Vec<Coord>,
    family: Family,
    params: CircuitParams,
}

fn run(circuit: &Circuit, plan: Plan) -> Result<Embedding> {
    let d = circuit.lattice.d;
    let rank: HashMap<&Coord, usize> = plan.order.iter().enumerate().map(|(r, a)| (a, r)).collect();
    let mapped: Vec<Vec<Coord>> = circuit
        .gates
        .iter()
        .map(|g| g.support().iter().map(|s| plan.map[s].clone()).collect())
        .collect();
    let mut by_anchor: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut gate_rank = Vec::with_capacity(circuit.gates.len());
    for (g, a) in plan.anchors.iter().enumerate() {
        let r = *rank
            .get(a)
            .ok_or_else(|| Error::InvalidArgument(format!("anchor {a:?} is not in the target ordering")))?;
        let plaq: HashSet<Coord> = plan.target.plaquette(a, plan.lp)?.into_iter().collect();
        if !mapped[g].iter().all(|s| plaq.contains(s)) {
            return Err(Error::InvalidArgument(format!(
                "gate {g} on {:?} fits no {}-plaquette at {a:?}",
                circuit.gates[g].support(),
                plan.lp
            )));
        }
        gate_rank.push(r);
        by_anchor.entry(r).or_default().push(g);
    }
    for g in 0..circuit.gates.len() {
        for h in g + 1..circuit.gates.len() {
            if gate_rank[g] > gate_rank[h] && circuit.gates[g].overlaps(&circuit.gates[h]) {
                return Err(Error::InvalidArgument(format!(
                    "target ordering would move overlapping gate {h} before gate {g}"
                )));
            }
        }
    }
    let mut out = Circuit::new(plan.target.clone(), plan.family, plan.params);
    for (r, a) in plan.order.iter().enumerate() {
        let plaq = plan.target.plaquette(a, plan.lp)?;
        let n = plaq.len();
        let dim = d.pow(n as u32);
        let mut m = linalg::identity(dim);
        for &g in by_anchor.get(&r).map(Vec::as_slice).unwrap_or(&[]) {
            let pos: Vec<usize> = mapped[g].iter().map(|s| plaq.iter().position(|p| p == s).expect("checked")).collect();
            let e = embed_operator(circuit.gates[g].matrix().data(), &pos, n, d);
            m = linalg::matmul(Exec::default(), &e, dim, dim, &m, dim);
        }
        out.push(Gate::new(crate::tensor::Tensor::new(vec![dim, dim], m)?, plaq, GateKind::Plaquette, a.clone(), d)?)?;
    }
    let mut site_map: Vec<(Coord, Coord)> = plan.map.into_iter().collect();
    site_map.sort();
    let image: HashSet<&Coord> = site_map.iter().map(|(_, e)| e).collect();
    let ancillas = plan.target.sites().filter(|s| !image.contains(s)).collect();
    Ok(Embedding { circuit: out, site_map, ancillas })
}

/// Plaquette form of a circuit. isoTNS circuits (bond `d^s`) land on the
/// lattice padded by `s` on every side with `L_p = 2s + 1` in radial order
/// from the center; F-PEPS circuits on the `(n+s) x (m+s)` periodic lattice;
/// SGS circuits on their own lattice with `L_p` in radial order from the
/// origin.
pub fn embed_in_plaquettes(circuit: &Circuit, lp_target: usize) -> Result<Embedding> {
    let lat = &circuit.lattice;
    let d = lat.d;
    let q = lat.q();
    let ident: HashMap<Coord, Coord> = lat.sites().map(|s| (s.clone(), s)).collect();
    let plan = match circuit.family {
        Family::PPeps | Family::RpPeps => {
            let anchors = circuit.positions();
            let mut order = anchors.clone();
            if circuit.family == Family::RpPeps {
                let source = circuit.params.source.clone().unwrap_or_else(|| vec![0; q]);
                let pref = circuit.params.preferred.clone().unwrap_or_else(|| Preferred::default_for(q));
                order = radial_ordering(lat, lp_target, &source, &pref)?.positions;
            } else {
                fill_missing(&mut order, lat.anchors(lp_target));
            }
            let params = CircuitParams { lp: Some(lp_target), ..circuit.params.clone() };
            Plan { target: lat.clone(), lp: lp_target, map: ident, anchors, order, family: circuit.family, params }
        }
        Family::Isotns => {
            let s = circuit.params.s(d).unwrap_or(1);
            if q != 2 || lp_target != 2 * s + 1 {
                return Err(Error::InvalidArgument(format!(
                    "a 2D isoTNS circuit with s = {s} embeds with L_p = {}",
                    2 * s + 1
                )));
            }
            let target = Lattice::open(&[lat.dims[0] + 2 * s, lat.dims[1] + 2 * s], d)?;
            let map = lat.sites().map(|c| (c.clone(), vec![c[0] + s, c[1] + s])).collect();
            let oc = circuit.params.oc.clone().unwrap_or_else(|| vec![0, 0]);
            let pref = Preferred::default_for(2);
            let order = radial_ordering(&target, lp_target, &oc, &pref)?.positions;
            let params = CircuitParams {
                lp: Some(lp_target),
                source: Some(oc),
                preferred: Some(pref),
                ..Default::default()
            };
            Plan { target, lp: lp_target, map, anchors: circuit.positions(), order, family: Family::RpPeps, params }
        }
        Family::FPeps => {
            let s = circuit.params.s(d).unwrap_or(1);
            if lp_target != 2 * s + 1 {
                return Err(Error::InvalidArgument(format!("an F-PEPS circuit with s = {s} embeds with L_p = {}", 2 * s + 1)));
            }
            let target = Lattice::new(vec![lat.dims[0] + s, lat.dims[1] + s], d, Boundary::Periodic)?;
            let anchors = circuit.positions();
            let mut order = anchors.clone();
            fill_missing(&mut order, target.anchors(lp_target));
            let params = CircuitParams { lp: Some(lp_target), ..Default::default() };
            Plan { target, lp: lp_target, map: ident, anchors, order, family: Family::PPeps, params }
        }
        Family::Sgs => {
            let lp = circuit.params.lp.unwrap_or(2);
            if lp_target != lp {
                return Err(Error::InvalidArgument(format!("an SGS circuit with L_p = {lp} embeds with the same L_p")));
            }
            let (n, m) = (lat.dims[0], lat.dims[1]);
            let anchors = circuit
                .gates
                .iter()
                .map(|g| {
                    let first = &g.support()[0];
                    let same_row = g.support().iter().all(|s| s[0] == first[0]);
                    let col = first[1].min(m.saturating_sub(lp));
                    if same_row {
                        vec![(first[0] + 1).saturating_sub(lp).min(n - lp), col]
                    } else {
                        vec![first[0], col]
                    }
                })
                .collect();
            let pref = Preferred::default_for(2);
            let order = radial_ordering(lat, lp, &[0, 0], &pref)?.positions;
            let params = CircuitParams { lp: Some(lp), source: Some(vec![0, 0]), preferred: Some(pref), ..Default::default() };
            Plan { target: lat.clone(), lp, map: ident, anchors, order, family: Family::RpPeps, params }
        }
        Family::Custom => return Err(Error::Unsupported("custom circuits carry no embedding rule".into())),
    };
    run(circuit, plan)
}

fn fill_missing(order: &mut Vec<Coord>, all: Vec<Coord>) {
    let have: HashSet<Coord> = order.iter().cloned().collect();
    order.extend(all.into_iter().filter(|a| !have.contains(a)));
}
