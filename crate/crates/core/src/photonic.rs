//! Array of coupled ancilla-emitter photon sources.
//!
//! Source `j` owns `w` qudits: the emitter `E_j` (slot 0) and an ancilla of
//! dimension `d^(w-1)` stored as `w - 1` qudits. While a lattice is being
//! produced, source `j` holds a window of `w` consecutive rows of column `j`,
//! the emitter carrying the lowest one. Emitting hands that row to a fresh
//! photon and a cyclic swap inside the source moves the next row onto the
//! emitter. Photons are appended to the register in emission order and are
//! never touched again.

use crate::circuit::{Circuit, CircuitParams, Family, Gate, GateKind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::families::{build_fpeps_circuit, build_ppeps, GateChoice};
use crate::lattice::{Coord, Lattice};
use crate::schedule::Ordering;
use crate::statevector::{checked_dim, memory_cap, StateVector};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Norm drift tolerated per protocol step.
pub const STEP_TOL: f64 = 1e-12;

/// Joint state of `m` sources and the photons emitted so far.
#[derive(Clone, Debug)]
pub struct SourceArrayState {
    sources: usize,
    slots: usize,
    register: StateVector,
    photons: usize,
}

impl SourceArrayState {
    /// `|0_A>|0_E>` for `sources` sources of `slots` qudits each.
    pub fn new(sources: usize, slots: usize, d: usize) -> Result<Self> {
        if sources == 0 || slots == 0 || d < 2 {
            return Err(Error::InvalidArgument("need at least one source, one slot and d >= 2".into()));
        }
        let q = sources * slots;
        checked_dim(d, q)?;
        let lat = Lattice::open(&[usize::MAX >> 1], d)?;
        let register = StateVector::zero_on(&lat, (0..q).map(|i| vec![i]).collect())?;
        Ok(Self { sources, slots, register, photons: 0 })
    }

    pub fn d(&self) -> usize {
        self.register.d()
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Ancilla dimension per source.
    pub fn ancilla_dim(&self) -> usize {
        self.d().pow(self.slots as u32 - 1)
    }

    pub fn num_photons(&self) -> usize {
        self.photons
    }

    pub fn source_qudits(&self) -> usize {
        self.sources * self.slots
    }

    /// Register index of slot `slot` of source `source`.
    pub fn qudit(&self, source: usize, slot: usize) -> usize {
        source * self.slots + slot
    }

    /// Amplitudes over sources then photons (first qudit most significant).
    pub fn amplitudes(&self) -> &[C64] {
        self.register.amplitudes()
    }

    pub fn norm(&self) -> f64 {
        self.register.norm()
    }

    /// Overwrites the joint amplitudes of the current register.
    pub fn set_amplitudes(&mut self, amps: Vec<C64>) -> Result<()> {
        self.register = StateVector::from_amplitudes(self.register.lattice(), self.register.sites().to_vec(), amps)?;
        Ok(())
    }

    /// Applies a unitary to source qudits. Photons are out of reach.
    pub fn apply(&mut self, exec: Exec, matrix: &[C64], qudits: &[usize]) -> Result<()> {
        if let Some(&q) = qudits.iter().find(|&&q| q >= self.source_qudits()) {
            return Err(Error::InvalidArgument(format!("qudit {q} is not a source qudit")));
        }
        let support: Vec<Coord> = qudits.iter().map(|&q| vec![q]).collect();
        self.register.apply_matrix(exec, matrix, &support)
    }

    /// `|k>_E -> |0>_E |k>_ph` on emitter `source`; returns the photon index.
    pub fn emit(&mut self, source: usize) -> Result<usize> {
        if source >= self.sources {
            return Err(Error::InvalidArgument(format!("emitter {source} of {}", self.sources)));
        }
        let d = self.d();
        let t = self.register.sites().len();
        let dim = checked_dim(d, t + 1)?;
        let stride = d.pow((t - 1 - self.qudit(source, 0)) as u32);
        let old = self.register.amplitudes();
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        for (i, &a) in old.iter().enumerate() {
            let k = (i / stride) % d;
            amps[(i - k * stride) * d + k] = a;
        }
        let mut sites = self.register.sites().to_vec();
        sites.push(vec![t]);
        self.register = StateVector::from_amplitudes(self.register.lattice(), sites, amps)?;
        self.photons += 1;
        Ok(self.photons - 1)
    }

    /// Cyclic swap inside a source: slot `k` takes the content of slot `k+1`
    /// and the emitter content goes to the last slot.
    pub fn rotate(&mut self, source: usize) -> Result<()> {
        if source >= self.sources {
            return Err(Error::InvalidArgument(format!("source {source} of {}", self.sources)));
        }
        if self.slots == 1 {
            return Ok(());
        }
        let sites = self.register.sites().to_vec();
        let mut order = sites.clone();
        let b = self.qudit(source, 0);
        order[b..b + self.slots].rotate_left(1);
        let amps = self.register.reorder(&order)?.into_amplitudes();
        self.register = StateVector::from_amplitudes(self.register.lattice(), sites, amps)?;
        Ok(())
    }

    /// Unnormalized photon amplitudes with every source projected on `|0>`.
    pub fn photon_amplitudes(&self) -> Vec<C64> {
        let np = self.d().pow(self.photons as u32);
        self.register.amplitudes()[..np].to_vec()
    }

    /// `1 - <phi_0| rho_sources |phi_0>`.
    pub fn deficit(&self) -> f64 {
        let p: f64 = self.photon_amplitudes().iter().map(|a| a.norm_sqr()).sum();
        (1.0 - p).max(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ProtocolStep {
    Unitary { gate: usize, qudits: Vec<usize> },
    Emit { source: usize, photon: usize, site: Coord },
    Swap { source: usize },
}

#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub lattice: Lattice,
    pub state: SourceArrayState,
    /// Lattice site carried by each photon, in emission order.
    pub photon_map: Vec<Coord>,
    pub trace: Vec<ProtocolStep>,
    /// Whether the final swap-out of the ancillas ran.
    pub completed: bool,
}

impl ProtocolRun {
    /// Photon register after projecting the sources on `|phi_0>`.
    pub fn photonic_state(&self) -> Result<StateVector> {
        StateVector::from_amplitudes(&self.lattice, self.photon_map.clone(), self.state.photon_amplitudes())
    }

    /// Structural check that no unitary acts on an emitted photon.
    pub fn photons_untouched(&self) -> bool {
        let q = self.state.source_qudits();
        self.trace.iter().all(|s| match s {
            ProtocolStep::Unitary { qudits, .. } => qudits.iter().all(|&x| x < q),
            _ => true,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisentanglementReport {
    pub deficit: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_disentangled(run: &ProtocolRun, tol: f64) -> DisentanglementReport {
    let deficit = run.state.deficit();
    DisentanglementReport { deficit, tol, pass: deficit <= tol }
}

/// Rows of one column a source must hold at once for this circuit.
pub fn source_window(circuit: &Circuit) -> usize {
    let mut w = 1;
    for g in &circuit.gates {
        let mut span: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
        for s in g.support() {
            let e = span.entry(s[1]).or_insert((s[0], s[0]));
            e.0 = e.0.min(s[0]);
            e.1 = e.1.max(s[0]);
        }
        w = w.max(span.values().map(|(a, b)| b - a + 1).max().unwrap_or(1));
    }
    w
}

/// Runs `circuit` on a source array, one source per lattice column.
///
/// After each gate every source whose emitter row is finished, and whose
/// window still has a row to take in, emits and swaps. With `swap_out` the
/// rows left in the ancillas are then emitted source by source.
pub fn run_protocol(exec: Exec, circuit: &Circuit, swap_out: bool) -> Result<ProtocolRun> {
    let lat = &circuit.lattice;
    if lat.q() != 2 {
        return Err(Error::Unsupported("photonic generation is implemented for 2D lattices".into()));
    }
    circuit.validate()?;
    let (n, m) = (lat.dims[0], lat.dims[1]);
    let w = source_window(circuit);
    let total = checked_dim(lat.d, m * w)?;
    if total > memory_cap() {
        return Err(Error::MemoryCap { required: total as u128, cap: memory_cap() });
    }
    let mut last_use = vec![None; n * m];
    for (g, gate) in circuit.gates.iter().enumerate() {
        for s in gate.support() {
            last_use[s[0] * m + s[1]] = Some(g);
        }
    }
    let finished = |row: usize, col: usize, done: Option<usize>| match last_use[row * m + col] {
        None => true,
        Some(g) => done.is_some_and(|x| x >= g),
    };

    let mut state = SourceArrayState::new(m, w, lat.d)?;
    let mut base = vec![0usize; m];
    let mut photon_map = Vec::with_capacity(n * m);
    let mut trace = Vec::new();

    let emit = |state: &mut SourceArrayState,
                    base: &mut [usize],
                    photon_map: &mut Vec<Coord>,
                    trace: &mut Vec<ProtocolStep>,
                    j: usize|
     -> Result<()> {
        let site = vec![base[j], j];
        let photon = state.emit(j)?;
        trace.push(ProtocolStep::Emit { source: j, photon, site: site.clone() });
        photon_map.push(site);
        state.rotate(j)?;
        trace.push(ProtocolStep::Swap { source: j });
        base[j] += 1;
        Ok(())
    };

    for (g, gate) in circuit.gates.iter().enumerate() {
        let mut qudits = Vec::with_capacity(gate.support().len());
        for s in gate.support() {
            let (row, col) = (s[0], s[1]);
            if row < base[col] {
                return Err(Error::Unsupported(format!("gate {g} acts on the emitted site {s:?}")));
            }
            if row >= base[col] + w {
                return Err(Error::Unsupported(format!("gate {g} reaches {s:?} outside the window of source {col}")));
            }
            qudits.push(state.qudit(col, row - base[col]));
        }
        state.apply(exec, gate.matrix().data(), &qudits)?;
        trace.push(ProtocolStep::Unitary { gate: g, qudits });
        for j in 0..m {
            while base[j] + w <= n && finished(base[j], j, Some(g)) {
                emit(&mut state, &mut base, &mut photon_map, &mut trace, j)?;
            }
        }
        let drift = (state.norm() - 1.0).abs();
        if drift > STEP_TOL {
            return Err(Error::NotIsometric { residual: drift, tol: STEP_TOL });
        }
    }
    if circuit.gates.is_empty() {
        for j in 0..m {
            while base[j] + w <= n {
                emit(&mut state, &mut base, &mut photon_map, &mut trace, j)?;
            }
        }
    }
    if swap_out {
        for j in 0..m {
            while base[j] < n {
                emit(&mut state, &mut base, &mut photon_map, &mut trace, j)?;
            }
        }
    }
    let completed = base.iter().all(|&b| b >= n);
    Ok(ProtocolRun { lattice: lat.clone(), state, photon_map, trace, completed })
}

/// Plaquette anchors row by row, columns inner: the source array's order.
/// Plaquettes are `lp` rows by `min(lp, m)` columns.
pub fn photonic_ordering(n: usize, m: usize, lp: usize) -> Result<Vec<Coord>> {
    let cw = lp.min(m);
    if lp == 0 || lp > n {
        return Err(Error::InvalidArgument(format!("plaquette size {lp} on {n} rows")));
    }
    Ok((0..=n - lp).flat_map(|i| (0..=m - cw).map(move |j| vec![i, j])).collect())
}

/// Circuit produced by the source array for an `n x m` lattice with
/// plaquettes of size `lp`.
pub fn photonic_circuit(lattice: &Lattice, lp: usize, choice: GateChoice<'_>) -> Result<Circuit> {
    if lattice.q() != 2 {
        return Err(Error::Unsupported("photonic generation is implemented for 2D lattices".into()));
    }
    let (n, m) = (lattice.dims[0], lattice.dims[1]);
    let positions = photonic_ordering(n, m, lp)?;
    if m >= lp {
        let ordering = Ordering { positions, plaquette_size: lp, source: Some(vec![0, 0]), preferred: None };
        return build_ppeps(lattice, &ordering, choice);
    }
    let cw = m;
    let params = CircuitParams { lp: Some(lp), source: Some(vec![0, 0]), ..Default::default() };
    let mut c = Circuit::new(lattice.clone(), Family::Custom, params);
    for p in positions {
        let support: Vec<Coord> =
            (0..lp).flat_map(|a| (0..cw).map(move |b| (a, b))).map(|(a, b)| vec![p[0] + a, p[1] + b]).collect();
        c.push(crate::families::make_gate(&choice, support, GateKind::Plaquette, p, lattice.d)?)?;
    }
    Ok(c)
}

/// Places a chain circuit on an `n x 1` lattice, site `i` going to `(i, 0)`.
pub fn lift_chain(chain: &Circuit) -> Result<Circuit> {
    if chain.lattice.q() != 1 {
        return Err(Error::InvalidArgument("expected a 1D circuit".into()));
    }
    let lat = Lattice::open(&[chain.lattice.dims[0], 1], chain.lattice.d)?;
    let mut c = Circuit::new(lat, Family::Custom, chain.params.clone());
    for g in &chain.gates {
        let support = g.support().iter().map(|s| vec![s[0], 0]).collect();
        c.push(Gate::new(g.matrix().clone(), support, g.kind(), vec![g.pos()[0], 0], chain.lattice.d)?)?;
    }
    Ok(c)
}

/// Source-array run of the F-PEPS helix; the gate at the end of each row
/// couples the last source to the first.
pub fn run_fpeps_protocol(exec: Exec, lattice: &Lattice, bond_dim: usize, choice: GateChoice<'_>) -> Result<(Circuit, ProtocolRun)> {
    let c = build_fpeps_circuit(lattice, bond_dim, choice)?;
    let run = run_protocol(exec, &c, true)?;
    Ok((c, run))
}
