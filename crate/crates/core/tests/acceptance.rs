//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use ppeps::circuit::Circuit;
use ppeps::families::sgs::direct_state;
use ppeps::families::*;
use ppeps::lattice::{Coord, Lattice};
use ppeps::lightcone::{brickwall_circuit, brickwall_comparison, correlation_scan, expectation_via_lightcone};
use ppeps::network::pepo::{pepo_bond_bound, peps_bond_bound};
use ppeps::network::{circuit_to_network, contract_network, sgs_to_network, unitary_to_pepo, verify_network_isometries};
use ppeps::photonic::{lift_chain, photonic_circuit, run_protocol, verify_disentangled};
use ppeps::rng::derive_seed;
use ppeps::schedule::{depth_formula, layerize, radial_ordering, DepthFamily, Ordering, Preferred};
use ppeps::statevector::{expectation, fidelity, ops, set_memory_cap, simulate, Observable};
use ppeps::tensor::{random_unitary, Tensor};
use ppeps::verify::{area_law, embedding_fidelity};
use ppeps::{Exec, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn depth_scaling() -> Outcome {
    let lp = 2;
    let mut out = Vec::new();
    for n in [20usize, 50, 100] {
        let l = e(Lattice::open(&[n, n], 2))?;
        let p = Preferred::default_for(2);
        let sup = e(e(radial_ordering(&l, lp, &[0, 0], &p))?.supports(&l))?;
        let depth = layerize(&sup).depth;
        let f = depth_formula(&l, lp, DepthFamily::RpPeps, &p);
        ensure(depth.abs_diff(f) <= 4 * lp, || format!("{n}x{n}: depth {depth}, n + Lp m = {f}"))?;
        out.push(format!("{n}x{n} {depth}/{f}"));
    }
    Ok(format!("depth/formula {}", out.join(", ")))
}

fn isotns_depth() -> Outcome {
    let depth = |dims: &[usize]| -> Result<usize, String> {
        let l = e(Lattice::open(dims, 2))?;
        let sup: Vec<Vec<Coord>> = e(isotns::isotns_supports(&l, 1, &IsoOc::Corner))?.into_iter().map(|x| x.1).collect();
        Ok(layerize(&sup).depth)
    };
    let d2 = depth(&[50, 50])?;
    ensure(d2.abs_diff(100) <= 4, || format!("50x50 depth {d2}, want 100 +- 4"))?;
    let d3 = depth(&[10, 10, 10])?;
    ensure(d3.abs_diff(30) <= 6, || format!("10x10x10 depth {d3}, want 30 +- 6"))?;
    Ok(format!("50x50 depth {d2} (n+m = 100), 10x10x10 depth {d3} (sum = 30)"))
}

fn conversion_soundness() -> Outcome {
    let mut worst_f: f64 = 1.0;
    let mut worst_iso: f64 = 0.0;
    let mut count = 0;
    for fam in ["rp-peps", "isotns", "sgs", "f-peps"] {
        for k in 0..20u64 {
            let seed = derive_seed(3, &[k]);
            let (n, m) = [(3, 3), (3, 4), (4, 4), (4, 3)][(k % 4) as usize];
            let l = e(Lattice::open(&[n, m], 2))?;
            let c = match fam {
                "rp-peps" => {
                    let src = vec![(k as usize) % (n - 1), (k as usize / 2) % (m - 1)];
                    e(build_rppeps(&l, 2, &src, &Preferred::default_for(2), GateChoice::Seed(seed)))?
                }
                "isotns" => e(build_isotns_circuit(&l, 2, IsoOc::Corner, GateChoice::Seed(seed)))?,
                "sgs" => e(build_sgs(&e(SgsSpec::random(n, m, 2, 2, seed))?, &l))?,
                _ => e(build_fpeps_circuit(&l, 2, GateChoice::Seed(seed)))?,
            };
            let net = e(circuit_to_network(&c))?;
            let iso = e(verify_network_isometries(&net, 1e-12))?;
            let f = e(fidelity(&e(simulate(&c))?, &e(contract_network(&net))?))?;
            ensure(iso.pass, || format!("{fam} seed {seed}: isometry residual {:.2e} at tensors {:?}", iso.max_residual, iso.failures()))?;
            ensure(f >= 1.0 - 1e-10, || format!("{fam} seed {seed}: fidelity {f}"))?;
            worst_f = worst_f.min(f);
            worst_iso = worst_iso.max(iso.max_residual);
            count += 1;
        }
    }
    Ok(format!("{count} circuits, min fidelity 1 - {:.1e}, max isometry residual {worst_iso:.1e}", (1.0 - worst_f).max(0.0)))
}

fn inclusion_chain() -> Outcome {
    let mut worst: f64 = 1.0;
    for seed in [1u64, 2, 3] {
        let l = e(Lattice::open(&[3, 3], 2))?;
        let spec = e(SgsSpec::random(3, 3, 2, 2, seed))?;
        let c = e(build_sgs(&spec, &l))?;
        let psi = e(simulate(&c))?;
        let net = e(sgs_to_network(&spec))?;
        let phi = e(contract_network(&net))?;
        let emb = e(embed_in_plaquettes(&c, 2))?;
        ensure(emb.circuit.validate().is_ok(), || format!("seed {seed}: embedded SGS ordering invalid"))?;
        let chi = e(simulate(&emb.circuit))?;
        let direct = e(direct_state(&spec))?;
        for (name, a, b) in [("circuit/network", &psi, &phi), ("circuit/embedded", &psi, &chi), ("network/embedded", &phi, &chi), ("circuit/direct", &psi, &direct)] {
            let f = e(fidelity(a, b))?;
            ensure(f >= 1.0 - 1e-10, || format!("SGS seed {seed} {name}: fidelity {f}"))?;
            worst = worst.min(f);
        }
        ensure(e(verify_network_isometries(&net, 1e-12))?.pass, || format!("SGS seed {seed}: network not isometric"))?;

        let iso = e(build_isotns_circuit(&l, 2, IsoOc::Corner, GateChoice::Seed(seed)))?;
        let ei = e(embed_in_plaquettes(&iso, 3))?;
        ensure(ei.circuit.lattice.dims == [5, 5], || format!("isoTNS embedded into {:?}", ei.circuit.lattice.dims))?;
        ensure(ei.circuit.validate().is_ok(), || "embedded isoTNS ordering invalid".into())?;
        let (f, w) = e(embedding_fidelity(Exec::default(), &iso, &ei))?;
        ensure(f >= 1.0 - 1e-10 && (w - 1.0).abs() <= 1e-10, || format!("isoTNS seed {seed}: fidelity {f}, weight {w}"))?;
        worst = worst.min(f);

        let fp = e(build_fpeps_circuit(&l, 2, GateChoice::Seed(seed)))?;
        let ef = e(embed_in_plaquettes(&fp, 3))?;
        ensure(ef.circuit.lattice.dims == [4, 4], || format!("F-PEPS embedded into {:?}", ef.circuit.lattice.dims))?;
        ensure(ef.circuit.validate().is_ok(), || "embedded F-PEPS ordering invalid".into())?;
        let (f, w) = e(embedding_fidelity(Exec::default(), &fp, &ef))?;
        ensure(f >= 1.0 - 1e-10 && (w - 1.0).abs() <= 1e-10, || format!("F-PEPS seed {seed}: fidelity {f}, weight {w}"))?;
        worst = worst.min(f);
    }
    Ok(format!("3 seeds, SGS/network/embedded, isoTNS in 5x5, F-PEPS in 4x4; min fidelity 1 - {:.1e}", (1.0 - worst).max(0.0)))
}

fn photonic() -> Outcome {
    let l = e(Lattice::open(&[3, 3], 2))?;
    let seed = 5;
    let c = e(photonic_circuit(&l, 2, GateChoice::Seed(seed)))?;
    let run = e(run_protocol(Exec::default(), &c, true))?;
    let rep = verify_disentangled(&run, 1e-10);
    ensure(rep.pass, || format!("source deficit {:.2e}", rep.deficit))?;
    ensure(run.photons_untouched(), || "a photon was acted on after emission".into())?;
    let rp = e(build_rppeps(&l, 2, &[0, 0], &e(Preferred::parse("+1,+0", 2))?, GateChoice::Seed(seed)))?;
    let f = e(fidelity(&e(run.photonic_state())?, &e(simulate(&rp))?))?;
    ensure(f >= 1.0 - 1e-10, || format!("photons vs RP-PEPS fidelity {f}"))?;

    let ghz = e(run_protocol(Exec::default(), &e(lift_chain(&e(ghz_chain_circuit(8))?))?, true))?;
    let psi = e(ghz.photonic_state())?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let err = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| (a - C64::new(if i == 0 || i == 255 { h } else { 0.0 }, 0.0)).norm())
        .fold(0.0, f64::max);
    ensure(psi.amplitudes().len() == 256 && err <= 1e-12, || format!("GHZ8 amplitude error {err:.2e}"))?;
    Ok(format!("3x3 deficit {:.1e}, fidelity 1 - {:.1e}; GHZ8 max amplitude error {err:.1e}", rep.deficit, (1.0 - f).max(0.0)))
}

fn random_hermitian(seed: u64) -> Result<Tensor, String> {
    let u = e(random_unitary(2, seed))?;
    Ok(Tensor::from_fn(vec![2, 2], |i| u.get(&[i[0], i[1]]) + u.get(&[i[1], i[0]]).conj()))
}

fn lightcone() -> Outcome {
    set_memory_cap(Some(1 << 25));
    // (n, lp, family, circuits, observables per circuit)
    let plan: [(usize, usize, &str, u64, u64); 6] = [
        (3, 2, "rp", 10, 5),
        (4, 2, "rp", 10, 5),
        (4, 3, "rp", 6, 5),
        (4, 2, "iso", 6, 5),
        (4, 2, "sgs", 6, 5),
        (5, 2, "rp", 2, 5),
    ];
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    let mut source_ratio: f64 = 0.0;
    for (n, lp, fam, circuits, obs) in plan {
        let l = e(Lattice::open(&[n, n], 2))?;
        for k in 0..circuits {
            let seed = derive_seed(6, &[n as u64, lp as u64, k]);
            let c: Circuit = match fam {
                "rp" => e(build_rppeps(&l, lp, &[0, 0], &Preferred::default_for(2), GateChoice::Seed(seed)))?,
                "iso" => e(build_isotns_circuit(&l, 2, IsoOc::Corner, GateChoice::Seed(seed)))?,
                _ => e(build_sgs(&e(SgsSpec::random(n, n, 2, 2, seed))?, &l))?,
            };
            let psi = e(simulate(&c))?;
            for j in 0..obs {
                let site = if j == 0 { vec![0, 0] } else { l.coord((derive_seed(seed, &[j]) as usize) % l.num_sites()) };
                let o = Observable::new(random_hermitian(derive_seed(seed, &[j, 1]))?, vec![site.clone()]);
                let (v, rep) = e(expectation_via_lightcone(Exec::default(), &c, &o))?;
                let full = e(expectation(&psi, &o))?;
                let diff = (v - full).norm();
                ensure(diff <= 1e-10, || format!("{fam} {n}x{n} lp {lp} seed {seed} site {site:?}: differs by {diff:.2e}"))?;
                worst = worst.max(diff);
                if j == 0 && fam == "rp" && lp == 2 {
                    source_ratio = source_ratio.max(rep.cost_ratio);
                }
                pairs += 1;
            }
        }
    }
    ensure(pairs == 200, || format!("ran {pairs} pairs"))?;
    Ok(format!("{pairs} pairs, max |difference| {worst:.1e}; source observables at Lp = 2 keep at most {:.0}% of gates", 100.0 * source_ratio))
}

fn area() -> Outcome {
    let l = e(Lattice::open(&[4, 4], 2))?;
    let mut cuts = 0;
    let mut tightest: f64 = f64::INFINITY;
    for k in 0..100u64 {
        let seed = derive_seed(7, &[k]);
        let ord = Ordering { positions: l.anchors(2), plaquette_size: 2, source: None, preferred: None };
        let c = e(build_ppeps(&l, &ord, GateChoice::Seed(seed)))?;
        let psi = e(simulate(&c))?;
        for cut in e(area_law(&c, &psi, 1e-10))? {
            ensure(cut.pass, || format!("seed {seed} axis {} cut {}: S = {} > {}", cut.axis, cut.cut, cut.entropy, cut.bound))?;
            tightest = tightest.min(cut.bound - cut.entropy);
            cuts += 1;
        }
    }
    let ghz = e(simulate(&e(ghz_chain_circuit(10))?))?;
    for cut in 1..10 {
        let region: Vec<Coord> = (0..cut).map(|i| vec![i]).collect();
        let s = e(ghz.entanglement_entropy(&region))?;
        ensure((s - std::f64::consts::LN_2).abs() <= 1e-10, || format!("GHZ10 cut {cut}: S = {s}"))?;
    }
    Ok(format!("100 circuits, {cuts} cuts, smallest margin {tightest:.3}; GHZ10 cuts equal ln 2"))
}

fn pepo() -> Outcome {
    let l = e(Lattice::open(&[2, 2], 2))?;
    let ord = Ordering { positions: vec![vec![0, 0]], plaquette_size: 2, source: None, preferred: None };
    let bound = pepo_bond_bound(2, 2);
    let mut worst: f64 = 0.0;
    let mut max_bond = 0;
    for k in 0..100u64 {
        let c = e(build_ppeps(&l, &ord, GateChoice::Seed(derive_seed(8, &[k]))))?;
        let g = &c.gates[0];
        let p = e(unitary_to_pepo(g))?;
        let err = e(p.recontract())?.max_abs_diff(g.matrix());
        ensure(err <= 1e-10, || format!("gate {k}: recontraction error {err:.2e}"))?;
        ensure(p.max_bond() as u128 <= bound, || format!("gate {k}: bond {} > {bound}", p.max_bond()))?;
        worst = worst.max(err);
        max_bond = max_bond.max(p.max_bond());
    }
    Ok(format!(
        "100 gates, max error {worst:.1e}, max bond {max_bond} <= {bound}; whole-state bond bound {}",
        peps_bond_bound(2, 2)
    ))
}

fn long_range() -> Outcome {
    let seq = e(ghz_chain_circuit(12))?;
    ensure(seq.gates.len() == 11, || format!("sequential circuit has {} gates", seq.gates.len()))?;
    let z = ops::z(2);
    let s = e(correlation_scan(Exec::default(), &seq, &z, &z, &[(vec![0], vec![11])]))?[0].value;
    ensure((s - C64::new(1.0, 0.0)).norm() <= 1e-10, || format!("sequential end-to-end correlator {s}"))?;
    let l = e(Lattice::open(&[12], 2))?;
    let bw = e(brickwall_circuit(&l, 2, 2, 12))?;
    ensure(bw.gates.len() == 11, || format!("brickwall budget {} gates", bw.gates.len()))?;
    let b = e(correlation_scan(Exec::default(), &bw, &z, &z, &[(vec![0], vec![11])]))?[0].value;
    ensure(b.norm() <= 1e-12, || format!("brickwall end-to-end correlator {b}"))?;
    let mut lines = Vec::new();
    for group in [vec![vec![12usize], vec![24], vec![48]], vec![vec![6, 6], vec![10, 10], vec![14, 14]]] {
        let mut reps = Vec::new();
        for d in &group {
            reps.push(e(brickwall_comparison(&e(Lattice::open(d, 2))?, 2))?);
        }
        for r in &reps {
            let bps = r.brickwall_per_site_side.ok_or_else(|| format!("{:?}: no overlap found", r.dims))?;
            ensure(r.sequential_per_site <= 1.0, || format!("{:?}: sequential/N = {}", r.dims, r.sequential_per_site))?;
            ensure(bps > 0.05 && bps <= 2.0, || format!("{:?}: brickwall/(N max n) = {bps}", r.dims))?;
            lines.push(format!("{:?} {}/{}", r.dims, r.sequential_gates, r.brickwall_gates.unwrap_or(0)));
        }
    }
    Ok(format!("GHZ ends {:.1}, brickwall ends {:.0e}; sequential/brickwall gates {}", s.re, b.norm(), lines.join(", ")))
}

fn cluster() -> Outcome {
    let l = e(Lattice::open(&[3, 3], 2))?;
    let c = e(cluster_circuit(&l, &[0, 0]))?;
    ensure(c.validate().is_ok(), || "cluster circuit ordering invalid".into())?;
    let psi = e(simulate(&c))?;
    let f = e(fidelity(&psi, &e(cluster_state_oracle(&l))?))?;
    ensure(f >= 1.0 - 1e-10, || format!("fidelity {f}"))?;
    let (x, z) = (ops::x(2), ops::z(2));
    let mut worst: f64 = 0.0;
    for site in l.sites() {
        let mut factors: Vec<(&Tensor, Coord)> = vec![(&x, site.clone())];
        for nb in l.sites() {
            if nb.iter().zip(&site).map(|(a, b)| a.abs_diff(*b)).sum::<usize>() == 1 {
                factors.push((&z, nb));
            }
        }
        let v = e(expectation(&psi, &Observable::product(&factors)))?;
        let dev = (v - C64::new(1.0, 0.0)).norm();
        ensure(dev <= 1e-10, || format!("stabilizer at {site:?}: {v}"))?;
        worst = worst.max(dev);
    }
    Ok(format!("fidelity 1 - {:.1e}, 9 stabilizers within {worst:.1e} of +1", (1.0 - f).max(0.0)))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("radial depth scaling", depth_scaling),
        ("isoTNS depth", isotns_depth),
        ("conversion soundness", conversion_soundness),
        ("class inclusion chain", inclusion_chain),
        ("photonic protocol", photonic),
        ("light-cone cancellation", lightcone),
        ("area law", area),
        ("PEPO bond bound", pepo),
        ("long-range correlations", long_range),
        ("cluster state", cluster),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
