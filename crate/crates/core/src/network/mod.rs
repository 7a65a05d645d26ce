//! Arrow-annotated tensor networks and conversion from circuits.
//!
//! A bond's arrow runs from its tail to its head. The legs where a tensor is
//! the tail form its domain: read as a map from its domain legs to all other
//! legs (physical legs and the bonds where it is the head), every tensor of
//! a network built from a sequential circuit is an isometry. When the
//! network comes from a circuit, the tail of a bond is the later gate, so
//! the first gate has every bond pointing into it and is the orthogonality
//! center.

pub mod contract;
pub mod lgate;
pub mod pepo;
pub mod sgs;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{Coord, Lattice};
use crate::statevector::{memory_cap, StateVector};
use crate::tensor::{isometry_residual, qr_split, Tensor};
use contract::{contract_all, Labeled};

pub use lgate::{lgate_from_tensor, tensor_from_lgate};
pub use pepo::{unitary_to_pepo, PepoGrid};
pub use sgs::sgs_to_network;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leg {
    /// Physical leg over these sites (dimension `d^len`, first site most
    /// significant).
    Physical(Vec<Coord>),
    Bond(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetTensor {
    /// Lattice position the tensor is attached to.
    pub id: Coord,
    pub tensor: Tensor,
    pub legs: Vec<Leg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondEnd {
    pub tensor: usize,
    pub leg: usize,
}

/// Bond with its arrow pointing from `tail` to `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub tail: BondEnd,
    pub head: BondEnd,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowedNetwork {
    pub lattice: Lattice,
    pub tensors: Vec<NetTensor>,
    pub bonds: Vec<Bond>,
    /// Index of the orthogonality center, when one exists.
    pub oc: Option<usize>,
}

impl NetTensor {
    pub fn physical_sites(&self) -> Vec<Coord> {
        self.legs
            .iter()
            .filter_map(|l| match l {
                Leg::Physical(s) => Some(s.clone()),
                Leg::Bond(_) => None,
            })
            .flatten()
            .collect()
    }

    pub fn physical_dim(&self) -> usize {
        self.legs
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(l, Leg::Physical(_)))
            .map(|(i, _)| self.tensor.shape()[i])
            .product()
    }

    fn bond_leg(&self, b: usize) -> Option<usize> {
        self.legs.iter().position(|l| *l == Leg::Bond(b))
    }
}

impl ArrowedNetwork {
    /// Legs where tensor `t` is the tail of a bond.
    pub fn domain_legs(&self, t: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.bonds.iter().filter(|b| b.tail.tensor == t).map(|b| b.tail.leg).collect();
        v.sort_unstable();
        v
    }

    /// Number of bonds pointing into tensor `t`.
    pub fn incoming_bonds(&self, t: usize) -> usize {
        self.bonds.iter().filter(|b| b.head.tensor == t).count()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.bonds.iter().map(|b| b.dim).collect()
    }

    /// Indices of tensors whose `id` is `c`.
    pub fn tensors_at(&self, c: &[usize]) -> Vec<usize> {
        (0..self.tensors.len()).filter(|&t| self.tensors[t].id == c).collect()
    }

    /// Bonds joining a tensor at `a` to a tensor at `b`.
    pub fn bonds_between(&self, a: &[usize], b: &[usize]) -> usize {
        self.bonds
            .iter()
            .filter(|x| {
                let (p, q) = (&self.tensors[x.tail.tensor].id, &self.tensors[x.head.tensor].id);
                (p == a && q == b) || (p == b && q == a)
            })
            .count()
    }

    /// Checks leg bookkeeping and that the orthogonality center has only
    /// incoming bonds.
    pub fn check(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (i, b) in self.bonds.iter().enumerate() {
            for e in [b.tail, b.head] {
                let t = self.tensors.get(e.tensor).ok_or_else(|| Error::Schema(format!("bond {i}: no tensor")))?;
                if t.legs.get(e.leg) != Some(&Leg::Bond(i)) || t.tensor.shape()[e.leg] != b.dim {
                    return Err(Error::Schema(format!("bond {i} does not match leg {} of tensor {}", e.leg, e.tensor)));
                }
                if !seen.insert((e.tensor, e.leg)) {
                    return Err(Error::Schema(format!("leg {} of tensor {} is bonded twice", e.leg, e.tensor)));
                }
            }
        }
        for (ti, t) in self.tensors.iter().enumerate() {
            if t.legs.len() != t.tensor.rank() {
                return Err(Error::Schema(format!("tensor {ti} has {} legs for rank {}", t.legs.len(), t.tensor.rank())));
            }
            for (li, l) in t.legs.iter().enumerate() {
                match l {
                    Leg::Bond(_) if !seen.contains(&(ti, li)) => {
                        return Err(Error::Schema(format!("leg {li} of tensor {ti} names a missing bond")));
                    }
                    Leg::Physical(s) if t.tensor.shape()[li] != self.lattice.d.pow(s.len() as u32) => {
                        return Err(Error::Schema(format!("physical leg {li} of tensor {ti} has the wrong dimension")));
                    }
                    _ => {}
                }
            }
        }
        if let Some(oc) = self.oc {
            if !self.domain_legs(oc).is_empty() {
                return Err(Error::Schema("orthogonality center has an outgoing bond".into()));
            }
        }
        Ok(())
    }

    /// Contracts the bonds inside each group into one tensor per group; the
    /// new tensor takes the group's id. External arrows are kept.
    pub fn merge_groups(&self, groups: &[(Coord, Vec<usize>)]) -> Result<ArrowedNetwork> {
        let mut owner = vec![usize::MAX; self.tensors.len()];
        for (g, (_, members)) in groups.iter().enumerate() {
            for &t in members {
                if owner[t] != usize::MAX {
                    return Err(Error::InvalidArgument(format!("tensor {t} is in two groups")));
                }
                owner[t] = g;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::InvalidArgument("every tensor must belong to a group".into()));
        }
        #[derive(Clone, PartialEq, Eq, Hash)]
        enum L {
            Keep(usize, usize),
            Internal(usize),
        }
        let mut merged = Vec::with_capacity(groups.len());
        for (g, (id, members)) in groups.iter().enumerate() {
            let items: Vec<Labeled<L>> = members
                .iter()
                .map(|&t| {
                    let labels = self.tensors[t]
                        .legs
                        .iter()
                        .enumerate()
                        .map(|(li, l)| match l {
                            Leg::Bond(b) => {
                                let bond = &self.bonds[*b];
                                let other = if bond.tail.tensor == t { bond.head.tensor } else { bond.tail.tensor };
                                if owner[other] == g { L::Internal(*b) } else { L::Keep(t, li) }
                            }
                            Leg::Physical(_) => L::Keep(t, li),
                        })
                        .collect();
                    Labeled::new(self.tensors[t].tensor.clone(), labels)
                })
                .collect();
            let out = contract_all(Exec::default(), items, memory_cap())?;
            merged.push((id.clone(), out));
        }
        // rebuild legs and bonds
        let mut tensors = Vec::with_capacity(groups.len());
        let mut leg_of: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (g, (id, lab)) in merged.into_iter().enumerate() {
            let legs = lab
                .labels
                .iter()
                .enumerate()
                .map(|(new_leg, l)| match l {
                    L::Keep(t, li) => {
                        leg_of.insert((*t, *li), (g, new_leg));
                        self.tensors[*t].legs[*li].clone()
                    }
                    L::Internal(_) => unreachable!("internal bonds are contracted"),
                })
                .collect();
            tensors.push(NetTensor { id, tensor: lab.tensor, legs });
        }
        let mut bonds = Vec::new();
        for b in &self.bonds {
            if owner[b.tail.tensor] == owner[b.head.tensor] {
                continue;
            }
            let (tt, tl) = leg_of[&(b.tail.tensor, b.tail.leg)];
            let (ht, hl) = leg_of[&(b.head.tensor, b.head.leg)];
            let id = bonds.len();
            tensors[tt].legs[tl] = Leg::Bond(id);
            tensors[ht].legs[hl] = Leg::Bond(id);
            bonds.push(Bond { tail: BondEnd { tensor: tt, leg: tl }, head: BondEnd { tensor: ht, leg: hl }, dim: b.dim });
        }
        let oc = self.oc.map(|t| owner[t]);
        let net = ArrowedNetwork { lattice: self.lattice.clone(), tensors, bonds, oc };
        net.check()?;
        net.fuse_parallel_bonds()
    }

    /// Splits every physical leg of tensor `t` into single-site legs.
    pub fn expand_physical(&mut self, t: usize) -> Result<()> {
        let d = self.lattice.d;
        let nt = &self.tensors[t];
        let mut shape = Vec::new();
        let mut legs = Vec::new();
        let mut old_to_new = Vec::new();
        for (i, l) in nt.legs.iter().enumerate() {
            match l {
                Leg::Physical(s) if s.len() != 1 => {
                    old_to_new.push(usize::MAX);
                    for site in s {
                        shape.push(d);
                        legs.push(Leg::Physical(vec![site.clone()]));
                    }
                }
                other => {
                    old_to_new.push(legs.len());
                    shape.push(nt.tensor.shape()[i]);
                    legs.push(other.clone());
                }
            }
        }
        let tensor = nt.tensor.reshape(shape)?;
        for b in &mut self.bonds {
            for e in [&mut b.tail, &mut b.head] {
                if e.tensor == t {
                    e.leg = old_to_new[e.leg];
                }
            }
        }
        self.tensors[t] = NetTensor { id: nt.id.clone(), tensor, legs };
        Ok(())
    }

    /// Moves the physical leg of `site`, together with the bonds `carry`, off
    /// tensor `t` into a new tensor at `new_id` via QR. The new tensor is an
    /// isometry from the new bond, which points from it into `t`.
    pub fn split_site(&mut self, t: usize, site: &[usize], carry: &[usize], new_id: Coord) -> Result<usize> {
        self.expand_physical(t)?;
        let mut left = vec![self.tensors[t]
            .legs
            .iter()
            .position(|l| *l == Leg::Physical(vec![site.to_vec()]))
            .ok_or_else(|| Error::InvalidArgument(format!("tensor {t} has no physical leg for {site:?}")))?];
        for &b in carry {
            left.push(
                self.tensors[t]
                    .bond_leg(b)
                    .ok_or_else(|| Error::InvalidArgument(format!("bond {b} is not on tensor {t}")))?,
            );
        }
        let (q, r) = qr_split(&self.tensors[t].tensor, &left)?;
        let new_t = self.tensors.len();
        let bond = self.bonds.len();
        let dim = *q.shape().last().expect("bond leg");
        let old_legs = self.tensors[t].legs.clone();
        let mut q_legs: Vec<Leg> = left.iter().map(|&l| old_legs[l].clone()).collect();
        q_legs.push(Leg::Bond(bond));
        let mut r_legs = vec![Leg::Bond(bond)];
        let mut remap = vec![(t, usize::MAX); old_legs.len()];
        for (qi, &l) in left.iter().enumerate() {
            remap[l] = (new_t, qi);
        }
        for (i, l) in old_legs.into_iter().enumerate() {
            if !left.contains(&i) {
                remap[i] = (t, r_legs.len());
                r_legs.push(l);
            }
        }
        for b in &mut self.bonds {
            for e in [&mut b.tail, &mut b.head] {
                if e.tensor == t {
                    (e.tensor, e.leg) = remap[e.leg];
                }
            }
        }
        let id = self.tensors[t].id.clone();
        self.tensors[t] = NetTensor { id, tensor: r, legs: r_legs };
        let q_bond_leg = q_legs.len() - 1;
        self.tensors.push(NetTensor { id: new_id, tensor: q, legs: q_legs });
        self.bonds.push(Bond { tail: BondEnd { tensor: new_t, leg: q_bond_leg }, head: BondEnd { tensor: t, leg: 0 }, dim });
        Ok(new_t)
    }

    /// Fuses bonds that join the same tail tensor to the same head tensor
    /// into one bond (member order by bond index).
    pub fn fuse_parallel_bonds(&self) -> Result<ArrowedNetwork> {
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, b) in self.bonds.iter().enumerate() {
            groups.entry((b.tail.tensor, b.head.tensor)).or_default().push(i);
        }
        let mut new_id = vec![0; self.bonds.len()];
        let mut dims = Vec::with_capacity(groups.len());
        for (g, members) in groups.values().enumerate() {
            for &b in members {
                new_id[b] = g;
            }
            dims.push(members.iter().map(|&b| self.bonds[b].dim).product::<usize>());
        }
        let mut tensors = Vec::with_capacity(self.tensors.len());
        let mut ends: Vec<[Option<BondEnd>; 2]> = vec![[None, None]; dims.len()];
        for (ti, nt) in self.tensors.iter().enumerate() {
            let mut perm = Vec::new();
            let mut shape = Vec::new();
            let mut legs = Vec::new();
            let mut done = HashSet::new();
            for (li, l) in nt.legs.iter().enumerate() {
                match l {
                    Leg::Bond(b) => {
                        let g = new_id[*b];
                        if !done.insert(g) {
                            continue;
                        }
                        let members = groups.values().nth(g).expect("group");
                        for &m in members {
                            perm.push(nt.bond_leg(m).expect("bond on tensor"));
                        }
                        let side = usize::from(self.bonds[*b].head.tensor == ti);
                        ends[g][side] = Some(BondEnd { tensor: ti, leg: legs.len() });
                        shape.push(dims[g]);
                        legs.push(Leg::Bond(g));
                    }
                    Leg::Physical(_) => {
                        perm.push(li);
                        shape.push(nt.tensor.shape()[li]);
                        legs.push(l.clone());
                    }
                }
            }
            tensors.push(NetTensor { id: nt.id.clone(), tensor: nt.tensor.permute(&perm)?.reshape(shape)?, legs });
        }
        let bonds = ends
            .into_iter()
            .zip(dims)
            .map(|(e, dim)| Bond { tail: e[0].expect("tail"), head: e[1].expect("head"), dim })
            .collect();
        let net = ArrowedNetwork { lattice: self.lattice.clone(), tensors, bonds, oc: self.oc };
        net.check()?;
        Ok(net)
    }
}

/// One tensor per gate. Inputs on sites no earlier gate touched are fixed to
/// `|0>`; every other input/output pair between two gates becomes a bond
/// (sites shared by the same two gates are fused into one bond, in row-major
/// site order); outputs no later gate uses form the physical leg.
///
/// Tensor legs are ordered: physical, bonds to later gates (by gate index),
/// bonds to earlier gates (by gate index).
pub fn circuit_to_network(circuit: &Circuit) -> Result<ArrowedNetwork> {
    let d = circuit.lattice.d;
    let ng = circuit.gates.len();
    let mut last: HashMap<&[usize], usize> = HashMap::new();
    let mut prev: Vec<Vec<Option<usize>>> = Vec::with_capacity(ng);
    let mut next: Vec<Vec<Option<usize>>> = circuit.gates.iter().map(|g| vec![None; g.support().len()]).collect();
    for (gi, g) in circuit.gates.iter().enumerate() {
        let mut p = Vec::with_capacity(g.support().len());
        for s in g.support() {
            let before = last.insert(s.as_slice(), gi);
            if let Some(h) = before {
                let pos = circuit.gates[h].support().iter().position(|x| x == s).expect("site in support");
                next[h][pos] = Some(gi);
            }
            p.push(before);
        }
        prev.push(p);
    }
    // per gate: (group key -> support positions sorted by site)
    let mut tensors = Vec::with_capacity(ng);
    let mut out_groups: Vec<BTreeMap<usize, Vec<usize>>> = Vec::with_capacity(ng);
    let mut in_groups: Vec<BTreeMap<usize, Vec<usize>>> = Vec::with_capacity(ng);
    for (gi, g) in circuit.gates.iter().enumerate() {
        let k = g.support().len();
        let sup = g.support();
        let by_site = |mut v: Vec<usize>| {
            v.sort_by(|&a, &b| sup[a].cmp(&sup[b]));
            v
        };
        let phys = by_site((0..k).filter(|&t| next[gi][t].is_none()).collect());
        let mut outs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut ins: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for t in 0..k {
            if let Some(h) = next[gi][t] {
                outs.entry(h).or_default().push(t);
            }
            if let Some(h) = prev[gi][t] {
                ins.entry(h).or_default().push(t);
            }
        }
        for v in outs.values_mut().chain(ins.values_mut()) {
            *v = by_site(std::mem::take(v));
        }
        // U as [out_1..out_k, in_1..in_k], fresh inputs fixed to 0
        let mut t = g.matrix().reshape(vec![d; 2 * k])?;
        for pos in (0..k).rev() {
            if prev[gi][pos].is_none() {
                t = t.slice(k + pos, 0)?;
            }
        }
        // remaining input legs keep support order
        let in_leg: HashMap<usize, usize> = (0..k)
            .filter(|&p| prev[gi][p].is_some())
            .enumerate()
            .map(|(i, p)| (p, k + i))
            .collect();
        let mut perm: Vec<usize> = phys.clone();
        let mut shape = vec![d.pow(phys.len() as u32)];
        for v in outs.values() {
            perm.extend(v.iter().copied());
            shape.push(d.pow(v.len() as u32));
        }
        for v in ins.values() {
            perm.extend(v.iter().map(|p| in_leg[p]));
            shape.push(d.pow(v.len() as u32));
        }
        let tensor = t.permute(&perm)?.reshape(shape)?;
        let mut legs = vec![Leg::Physical(phys.iter().map(|&p| sup[p].clone()).collect())];
        legs.extend(std::iter::repeat_n(Leg::Bond(usize::MAX), outs.len() + ins.len()));
        tensors.push(NetTensor { id: g.pos().to_vec(), tensor, legs });
        out_groups.push(outs);
        in_groups.push(ins);
    }
    let mut bonds = Vec::new();
    for gi in 0..ng {
        for (oi, (&h, sites)) in out_groups[gi].iter().enumerate() {
            let head_leg = 1 + oi;
            let tail_leg = 1 + out_groups[h].len() + in_groups[h].keys().position(|&x| x == gi).expect("paired");
            let id = bonds.len();
            tensors[gi].legs[head_leg] = Leg::Bond(id);
            tensors[h].legs[tail_leg] = Leg::Bond(id);
            bonds.push(Bond {
                tail: BondEnd { tensor: h, leg: tail_leg },
                head: BondEnd { tensor: gi, leg: head_leg },
                dim: d.pow(sites.len() as u32),
            });
        }
    }
    let oc = if ng > 0 && prev[0].iter().all(Option::is_none) { Some(0) } else { None };
    let net = ArrowedNetwork { lattice: circuit.lattice.clone(), tensors, bonds, oc };
    net.check()?;
    Ok(net)
}

pub fn contract_network(net: &ArrowedNetwork) -> Result<StateVector> {
    contract_network_with(Exec::default(), net)
}

/// Exact contraction to the state on every lattice site (sites no tensor
/// carries are `|0>`).
pub fn contract_network_with(exec: Exec, net: &ArrowedNetwork) -> Result<StateVector> {
    #[derive(Clone, PartialEq, Eq, Hash)]
    enum L {
        Bond(usize),
        Site(Coord),
        Empty(usize),
    }
    let d = net.lattice.d;
    let mut items = Vec::with_capacity(net.tensors.len());
    let mut empty = 0;
    for nt in &net.tensors {
        let mut shape = Vec::new();
        let mut labels = Vec::new();
        for (i, l) in nt.legs.iter().enumerate() {
            match l {
                Leg::Bond(b) => {
                    shape.push(nt.tensor.shape()[i]);
                    labels.push(L::Bond(*b));
                }
                Leg::Physical(s) if s.is_empty() => {
                    shape.push(1);
                    labels.push(L::Empty(empty));
                    empty += 1;
                }
                Leg::Physical(s) => {
                    for site in s {
                        shape.push(d);
                        labels.push(L::Site(site.clone()));
                    }
                }
            }
        }
        items.push(Labeled::new(nt.tensor.reshape(shape)?, labels));
    }
    let all = contract_all(exec, items, memory_cap())?;
    let covered: Vec<Coord> = net.lattice.sites().filter(|s| all.labels.contains(&L::Site(s.clone()))).collect();
    let mut order: Vec<L> = covered.iter().cloned().map(L::Site).collect();
    order.extend(all.labels.iter().filter(|l| matches!(l, L::Empty(_))).cloned());
    let data = all.arranged(&order)?.into_data();
    let psi = StateVector::from_amplitudes(&net.lattice, covered.clone(), data)?;
    let missing: Vec<Coord> = net.lattice.sites().filter(|s| !covered.contains(s)).collect();
    if missing.is_empty() {
        return Ok(psi);
    }
    // pad uncovered sites with |0>
    let full: Vec<Coord> = covered.iter().chain(&missing).cloned().collect();
    let tail = d.pow(missing.len() as u32);
    let mut amps = vec![crate::linalg::ZERO; psi.amplitudes().len() * tail];
    for (i, a) in psi.amplitudes().iter().enumerate() {
        amps[i * tail] = *a;
    }
    StateVector::from_amplitudes(&net.lattice, full, amps)?.reorder(&net.lattice.sites().collect::<Vec<_>>())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteResidual {
    pub tensor: usize,
    pub id: Coord,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryReport {
    pub tol: f64,
    pub sites: Vec<SiteResidual>,
    pub max_residual: f64,
    pub pass: bool,
}

impl IsometryReport {
    pub fn failures(&self) -> Vec<usize> {
        self.sites.iter().filter(|s| !s.pass).map(|s| s.tensor).collect()
    }
}

/// Isometry residual of every tensor from its domain legs.
pub fn verify_network_isometries(net: &ArrowedNetwork, tol: f64) -> Result<IsometryReport> {
    let idx: Vec<usize> = (0..net.tensors.len()).collect();
    let res: Vec<Result<f64>> =
        Exec::default().map(&idx, |&t| isometry_residual(&net.tensors[t].tensor, &net.domain_legs(t)));
    let mut sites = Vec::with_capacity(idx.len());
    let mut max_residual: f64 = 0.0;
    for (t, r) in res.into_iter().enumerate() {
        let residual = r?;
        max_residual = max_residual.max(residual);
        sites.push(SiteResidual { tensor: t, id: net.tensors[t].id.clone(), residual, pass: residual <= tol });
    }
    let pass = sites.iter().all(|s| s.pass);
    Ok(IsometryReport { tol, sites, max_residual, pass })
}
