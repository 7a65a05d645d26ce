//! Gate orderings, ASAP layerization, light cones and depth predictions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, Coord, Lattice};

/// Growth preference for radial orderings: `axes[0]` grows first, and
/// `signs[axis]` says which direction along `axis` is taken first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preferred {
    pub axes: Vec<usize>,
    pub signs: Vec<i8>,
}

impl Preferred {
    /// Axis 0 first, then axis 1, ...; positive direction first.
    pub fn default_for(q: usize) -> Self {
        Self { axes: (0..q).collect(), signs: vec![1; q] }
    }

    pub fn check(&self, q: usize) -> Result<()> {
        let mut seen = vec![false; q];
        if self.axes.len() != q || self.signs.len() != q {
            return Err(Error::InvalidArgument(format!("preferred direction must cover {q} axes")));
        }
        for &a in &self.axes {
            if a >= q || seen[a] {
                return Err(Error::InvalidArgument(format!("preferred axes {:?} is not a permutation", self.axes)));
            }
            seen[a] = true;
        }
        if self.signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("preferred signs must be +1 or -1".into()));
        }
        Ok(())
    }

    /// Parses `"+0,+1"` style specs (sign optional, defaults to +).
    pub fn parse(s: &str, q: usize) -> Result<Self> {
        let mut axes = Vec::new();
        let mut signs = vec![1i8; q];
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (sign, rest) = match tok.as_bytes()[0] {
                b'+' => (1, &tok[1..]),
                b'-' => (-1, &tok[1..]),
                _ => (1, tok),
            };
            let a: usize = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad preferred axis '{tok}'")))?;
            if a < q {
                signs[a] = sign;
            }
            axes.push(a);
        }
        let p = Self { axes, signs };
        p.check(q)?;
        Ok(p)
    }
}

/// Ordered plaquette anchors `v_1, v_2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    pub positions: Vec<Coord>,
    pub plaquette_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Coord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferred: Option<Preferred>,
}

impl Ordering {
    /// Checks distinct positions and that every plaquette exists.
    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        let mut seen = HashSet::new();
        for p in &self.positions {
            if !seen.insert(p.clone()) {
                return Err(Error::DuplicatePosition(p.clone()));
            }
            lattice.plaquette(p, self.plaquette_size)?;
        }
        Ok(())
    }

    pub fn supports(&self, lattice: &Lattice) -> Result<Vec<Vec<Coord>>> {
        plaquette_supports(lattice, &self.positions, self.plaquette_size)
    }
}

pub fn plaquette_supports(lattice: &Lattice, positions: &[Coord], lp: usize) -> Result<Vec<Vec<Coord>>> {
    positions.iter().map(|p| lattice.plaquette(p, lp)).collect()
}

/// Weighted expansion distance of an anchor displacement.
pub(crate) fn radial_key(disp: &[i64], lp: usize, preferred: &Preferred) -> u64 {
    let mut w = 1u64;
    let mut key = 0u64;
    for &axis in &preferred.axes {
        key += w * disp[axis].unsigned_abs();
        w *= lp.max(2) as u64;
    }
    key
}

/// Radial ordering: anchors sorted by their weighted distance from the
/// source, so that consecutive ASAP layers grow the acted region outward.
/// Ties are broken lexicographically on the signed displacement along the
/// preferred axes, larger (preferred sign) first.
pub fn radial_ordering(lattice: &Lattice, lp: usize, source: &[usize], preferred: &Preferred) -> Result<Ordering> {
    if lp == 0 {
        return Err(Error::InvalidArgument("plaquette size must be at least 1".into()));
    }
    preferred.check(lattice.q())?;
    let anchors = lattice.anchors(lp);
    if source.len() != lattice.q() || !anchors.iter().any(|a| a.as_slice() == source) {
        return Err(Error::OutOfLattice(format!(
            "source {source:?} is not a plaquette anchor of {:?} with side {lp}",
            lattice.dims
        )));
    }
    let mut keyed: Vec<(u64, Vec<i64>, Coord)> = anchors
        .into_iter()
        .map(|a| {
            let disp = lattice.displacement(source, &a);
            let key = radial_key(&disp, lp, preferred);
            let tie: Vec<i64> = preferred.axes.iter().map(|&ax| -(disp[ax] * preferred.signs[ax] as i64)).collect();
            (key, tie, a)
        })
        .collect();
    keyed.sort();
    Ok(Ordering {
        positions: keyed.into_iter().map(|(_, _, a)| a).collect(),
        plaquette_size: lp,
        source: Some(source.to_vec()),
        preferred: Some(preferred.clone()),
    })
}

/// Staggered non-overlapping tilings. Sweep `s` places plaquettes at
/// `s mod lp + k lp` along every axis; plaquettes crossing an open boundary
/// are dropped.
pub fn brickwall_ordering(lattice: &Lattice, lp: usize, num_sweeps: usize) -> Vec<Coord> {
    let mut out = Vec::new();
    if lp == 0 {
        return out;
    }
    for s in 0..num_sweeps {
        let off = s % lp;
        let per_axis: Vec<Vec<usize>> = lattice
            .dims
            .iter()
            .map(|&n| {
                let mut v = Vec::new();
                let mut a = off;
                loop {
                    let fits = match lattice.boundary {
                        Boundary::Open => a + lp <= n,
                        Boundary::Periodic => a < n && (a - off) + lp <= n,
                    };
                    if !fits {
                        break;
                    }
                    v.push(a);
                    a += lp;
                }
                v
            })
            .collect();
        let mut idx = vec![0usize; per_axis.len()];
        if per_axis.iter().any(Vec::is_empty) {
            continue;
        }
        'outer: loop {
            out.push(idx.iter().zip(&per_axis).map(|(&i, v)| v[i]).collect());
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < per_axis[k].len() {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    out
}

/// Layers of gate indices, 1-based depth = `layers.len()`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub layers: Vec<Vec<usize>>,
    pub depth: usize,
}

impl Schedule {
    /// Gate indices in layer order.
    pub fn flatten(&self) -> Vec<usize> {
        self.layers.iter().flatten().copied().collect()
    }

    /// `layer_of[g]`, 0-based.
    pub fn layer_of(&self, num_gates: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; num_gates];
        for (l, layer) in self.layers.iter().enumerate() {
            for &g in layer {
                out[g] = l;
            }
        }
        out
    }
}

/// ASAP layerization: each gate lands one layer after the latest earlier
/// gate it overlaps.
pub fn layerize<S: AsRef<[Coord]>>(supports: &[S]) -> Schedule {
    use std::collections::HashMap;
    // last layer (1-based) that touched each site
    let mut frontier: HashMap<&[usize], usize> = HashMap::new();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (g, sup) in supports.iter().enumerate() {
        let sup = sup.as_ref();
        let layer = sup.iter().map(|s| frontier.get(s.as_slice()).copied().unwrap_or(0)).max().unwrap_or(0) + 1;
        for s in sup {
            frontier.insert(s.as_slice(), layer);
        }
        if layers.len() < layer {
            layers.resize(layer, Vec::new());
        }
        layers[layer - 1].push(g);
    }
    let depth = layers.len();
    Schedule { layers, depth }
}

/// Gates that survive cancellation in `U^dag O U` for an observable
/// supported on `targets`, in increasing index order.
pub fn reverse_light_cone<S: AsRef<[Coord]>>(supports: &[S], targets: &[Coord]) -> Vec<usize> {
    let mut acc: HashSet<Coord> = targets.iter().cloned().collect();
    let mut out = Vec::new();
    for g in (0..supports.len()).rev() {
        let sup = supports[g].as_ref();
        if sup.iter().any(|s| acc.contains(s)) {
            acc.extend(sup.iter().cloned());
            out.push(g);
        }
    }
    out.reverse();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthFamily {
    RpPeps,
    Isotns,
}

impl DepthFamily {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "rp-peps" => Ok(Self::RpPeps),
            "isotns" => Ok(Self::Isotns),
            other => Err(Error::InvalidArgument(format!("no depth formula for family '{other}'"))),
        }
    }
}

/// Asymptotic depth: `sum_k lp^k n_{axes[k]}` for radial plaquette circuits,
/// `sum_i n_i` for isometric ones.
pub fn depth_formula(lattice: &Lattice, lp: usize, family: DepthFamily, preferred: &Preferred) -> usize {
    match family {
        DepthFamily::RpPeps => {
            let mut w = 1;
            let mut t = 0;
            for &axis in &preferred.axes {
                t += w * lattice.dims[axis];
                w *= lp;
            }
            t
        }
        DepthFamily::Isotns => lattice.dims.iter().sum(),
    }
}

pub fn depth_formulas(lattice: &Lattice, lp: usize, tag: &str) -> Result<usize> {
    Ok(depth_formula(lattice, lp, DepthFamily::parse(tag)?, &Preferred::default_for(lattice.q())))
}

/// Smallest number of brickwall sweeps on an open chain of `n` sites for
/// which the reverse light cones of the two end sites share a gate.
pub fn brickwall_min_sweeps_for_overlap(n: usize, lp: usize, max_sweeps: usize) -> Result<Option<usize>> {
    let lattice = Lattice::open(&[n], 2)?;
    for sweeps in 1..=max_sweeps {
        let sup = plaquette_supports(&lattice, &brickwall_ordering(&lattice, lp, sweeps), lp)?;
        let a: HashSet<usize> = reverse_light_cone(&sup, &[vec![0]]).into_iter().collect();
        if reverse_light_cone(&sup, &[vec![n - 1]]).iter().any(|g| a.contains(g)) {
            return Ok(Some(sweeps));
        }
    }
    Ok(None)
}
