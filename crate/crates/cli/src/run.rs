use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ppeps::circuit::{Circuit, Family, GateKind};
use ppeps::families::isotns::isotns_supports;
use ppeps::families::*;
use ppeps::io::{circuit_to_json, load_circuit, save_network, write_json, write_state, write_tensor};
use ppeps::lattice::{Coord, Lattice};
use ppeps::lightcone::{brickwall_circuit, brickwall_comparison, cancellation, correlation_scan, correlations_csv, expectation_via_lightcone};
use ppeps::network::pepo::{pepo_bond_bound, peps_bond_bound};
use ppeps::network::{circuit_to_network, contract_network_with, unitary_to_pepo, verify_network_isometries};
use ppeps::photonic::{lift_chain, photonic_circuit, run_protocol, verify_disentangled};
use ppeps::schedule::{depth_formula, layerize, radial_ordering, DepthFamily, Ordering, Preferred};
use ppeps::statevector::{expectation, fidelity, ops, simulate_with, Observable};
use ppeps::tensor::Tensor;
use ppeps::verify::{area_law, verify_inclusion, Check, Inclusion, Report};
use ppeps::{Error, Exec, Result};
use serde_json::json;

use crate::cli::*;

pub struct Ctx {
    pub exec: Exec,
    pub tol: f64,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
}

impl Ctx {
    fn emit_text(&mut self, out: Option<&Path>, text: &str) -> Result<()> {
        match out {
            Some(p) => {
                std::fs::write(p, text)?;
                self.outputs.push(p.to_path_buf());
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit_json<T: serde::Serialize>(&mut self, out: Option<&Path>, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.emit_text(out, &s)
    }

    fn load(&mut self, path: &Path) -> Result<Circuit> {
        let c = load_circuit(path)?;
        self.inputs.push(path.to_path_buf());
        Ok(c)
    }

    fn choice(&mut self, seed: u64, identity: bool) -> GateChoice<'static> {
        if identity {
            GateChoice::Identity
        } else {
            self.seeds.push(seed);
            GateChoice::Seed(seed)
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub fn parse_size(s: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = s
        .split(['x', 'X'])
        .map(|t| t.trim().parse::<usize>().map_err(|_| bad(format!("bad size '{s}'"))))
        .collect::<Result<_>>()?;
    if dims.is_empty() || dims.len() > 3 || dims.contains(&0) {
        return Err(bad(format!("bad size '{s}'")));
    }
    Ok(dims)
}

pub fn parse_coord(s: &str, q: usize) -> Result<Coord> {
    let c: Coord = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| bad(format!("bad coordinate '{s}'"))))
        .collect::<Result<_>>()?;
    if c.len() != q {
        return Err(bad(format!("coordinate '{s}' needs {q} components")));
    }
    Ok(c)
}

fn parse_pairs(s: &str, q: usize) -> Result<Vec<(Coord, Coord)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| bad(format!("pair '{p}' needs the form i,j:k,l")))?;
            Ok((parse_coord(a, q)?, parse_coord(b, q)?))
        })
        .collect()
}

fn parse_oc(s: &str, q: usize) -> Result<IsoOc> {
    if s == "corner" {
        Ok(IsoOc::Corner)
    } else {
        Ok(IsoOc::Bulk(parse_coord(s, q)?))
    }
}

fn source_and_preferred(source: &Option<String>, preferred: &Option<String>, q: usize) -> Result<(Coord, Preferred)> {
    let src = match source {
        Some(s) => parse_coord(s, q)?,
        None => vec![0; q],
    };
    let pref = match preferred {
        Some(p) => Preferred::parse(p, q)?,
        None => Preferred::default_for(q),
    };
    Ok((src, pref))
}

fn two_d(dims: &[usize]) -> Result<(usize, usize)> {
    match dims {
        [n, m] => Ok((*n, *m)),
        _ => Err(bad("this command needs an n x m lattice")),
    }
}

fn local_op(op: LocalOp, d: usize) -> Tensor {
    match op {
        LocalOp::Z => ops::z(d),
        LocalOp::X => ops::x(d),
    }
}

pub fn gen(ctx: &mut Ctx, a: &GenArgs) -> Result<bool> {
    let dims = parse_size(&a.lattice.size)?;
    let q = dims.len();
    let lat = Lattice::open(&dims, a.lattice.d)?;
    let c = match a.family {
        GenFamily::RpPeps => {
            let (src, pref) = source_and_preferred(&a.source, &a.preferred, q)?;
            build_rppeps(&lat, a.lp, &src, &pref, ctx.choice(a.seed, a.identity))?
        }
        GenFamily::PPeps => {
            let ord = Ordering { positions: lat.anchors(a.lp), plaquette_size: a.lp, source: None, preferred: None };
            build_ppeps(&lat, &ord, ctx.choice(a.seed, a.identity))?
        }
        GenFamily::Isotns => build_isotns_circuit(&lat, a.bond_dim, parse_oc(&a.oc, q)?, ctx.choice(a.seed, a.identity))?,
        GenFamily::Fpeps => build_fpeps_circuit(&lat, a.bond_dim, ctx.choice(a.seed, a.identity))?,
        GenFamily::Sgs => {
            let (n, m) = two_d(&dims)?;
            let spec = if a.identity {
                SgsSpec::trivial(n, m, a.lattice.d, a.lp)?
            } else {
                ctx.seeds.push(a.seed);
                SgsSpec::random(n, m, a.lattice.d, a.lp, a.seed)?
            };
            build_sgs(&spec, &lat)?
        }
        GenFamily::Ghz => {
            if q != 1 || a.lattice.d != 2 {
                return Err(bad("ghz needs a qubit chain such as --size 8"));
            }
            ghz_chain_circuit(dims[0])?
        }
        GenFamily::Cluster => {
            if a.lattice.d != 2 {
                return Err(bad("cluster states are built for qubits"));
            }
            let (src, _) = source_and_preferred(&a.source, &None, q)?;
            cluster_circuit(&lat, &src)?
        }
        GenFamily::Brickwall => {
            ctx.seeds.push(a.seed);
            brickwall_circuit(&lat, a.lp, a.sweeps, a.seed)?
        }
    };
    let text = circuit_to_json(&c)?;
    ctx.emit_text(a.out.as_deref(), &text)?;
    Ok(true)
}

pub fn schedule(ctx: &mut Ctx, a: &ScheduleArgs) -> Result<bool> {
    let (family, lat, lp, supports, formula) = if let Some(p) = &a.circuit {
        let c = ctx.load(p)?;
        let lp = c.params.lp.unwrap_or(a.lp);
        let pref = c.params.preferred.clone().unwrap_or_else(|| Preferred::default_for(c.lattice.q()));
        let formula = match c.family {
            Family::RpPeps => Some(depth_formula(&c.lattice, lp, DepthFamily::RpPeps, &pref)),
            Family::Isotns => Some(depth_formula(&c.lattice, lp, DepthFamily::Isotns, &pref)),
            _ => None,
        };
        (c.family.as_str().to_string(), c.lattice.clone(), lp, c.supports(), formula)
    } else {
        let fam = a.family.ok_or_else(|| bad("give --circuit or --family with --size"))?;
        let dims = parse_size(a.size.as_deref().unwrap_or_default())?;
        let q = dims.len();
        let lat = Lattice::open(&dims, 2)?;
        match fam {
            ScheduleFamily::RpPeps => {
                let (src, pref) = source_and_preferred(&a.source, &a.preferred, q)?;
                let sup = radial_ordering(&lat, a.lp, &src, &pref)?.supports(&lat)?;
                let f = depth_formula(&lat, a.lp, DepthFamily::RpPeps, &pref);
                ("rp-peps".into(), lat, a.lp, sup, Some(f))
            }
            ScheduleFamily::Isotns => {
                let s = ppeps::circuit::ceil_log(a.bond_dim, 2);
                let oc = parse_oc(&a.oc, q)?;
                let sup = isotns_supports(&lat, s, &oc)?.into_iter().map(|x| x.1).collect();
                let f = depth_formula(&lat, a.lp, DepthFamily::Isotns, &Preferred::default_for(q));
                ("isotns".into(), lat, a.lp, sup, Some(f))
            }
        }
    };
    let sched = layerize(&supports);
    let mut report = json!({
        "family": family,
        "dims": lat.dims,
        "lp": lp,
        "gates": supports.len(),
        "depth": sched.depth,
        "formula": formula,
        "difference": formula.map(|f| sched.depth as i64 - f as i64),
    });
    if a.layers {
        report["layers"] = json!(sched.layers);
    }
    ctx.emit_json(a.out.as_deref(), &report)?;
    Ok(true)
}

pub fn simulate(ctx: &mut Ctx, a: &SimulateArgs) -> Result<bool> {
    let c = ctx.load(&a.circuit)?;
    let psi = simulate_with(ctx.exec, &c)?;
    write_state(&a.out, &psi)?;
    ctx.outputs.push(a.out.clone());
    ctx.outputs.push(ppeps::io::sidecar_path(&a.out));
    Ok(true)
}

pub fn convert(ctx: &mut Ctx, a: &ConvertArgs) -> Result<bool> {
    let c = ctx.load(&a.circuit)?;
    std::fs::create_dir_all(&a.out)?;
    if a.pepo {
        let lp = c.params.lp.ok_or_else(|| bad("PEPO conversion needs a plaquette circuit"))?;
        let d = c.lattice.d;
        let mut gates = Vec::new();
        let mut pass = true;
        for (k, g) in c.gates.iter().enumerate() {
            if g.kind() != GateKind::Plaquette {
                continue;
            }
            let p = unitary_to_pepo(g)?;
            let back = p.recontract()?;
            let err = back.data().iter().zip(g.matrix().data()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            let bound = pepo_bond_bound(d, lp);
            let ok = err <= ctx.tol && p.max_bond() as u128 <= bound;
            pass &= ok;
            for (t, tensor) in p.tensors.iter().enumerate() {
                let path = a.out.join(format!("gate_{k}_site_{t}.tns"));
                write_tensor(&path, tensor, json!({ "site": p.sites[t], "legs": format!("{:?}", p.legs[t]) }))?;
                ctx.outputs.push(path.clone());
                ctx.outputs.push(ppeps::io::sidecar_path(&path));
            }
            gates.push(json!({
                "gate": k,
                "anchor": g.pos(),
                "bond_dims": p.bond_dims(),
                "max_bond": p.max_bond(),
                "pepo_bound": bound.to_string(),
                "recontraction_error": err,
                "pass": ok,
            }));
        }
        let report = json!({
            "gates": gates,
            "peps_bond_bound": peps_bond_bound(d, lp).to_string(),
            "pass": pass,
        });
        let path = a.out.join("pepo_report.json");
        write_json(&path, &report)?;
        ctx.outputs.push(path);
        return Ok(pass);
    }
    let net = circuit_to_network(&c)?;
    ctx.outputs.extend(save_network(&net, &a.out)?);
    let iso = verify_network_isometries(&net, 1e-12)?;
    let (fid, note) = match (simulate_with(ctx.exec, &c), contract_network_with(ctx.exec, &net)) {
        (Ok(psi), Ok(phi)) => (Some(fidelity(&psi, &phi)?), None),
        (Err(e @ Error::MemoryCap { .. }), _) | (_, Err(e @ Error::MemoryCap { .. })) => (None, Some(e.to_string())),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let pass = iso.pass && fid.is_none_or(|f| f >= 1.0 - ctx.tol);
    let report = json!({
        "tensors": net.tensors.len(),
        "bonds": net.bonds.len(),
        "bond_dims": net.bond_dims(),
        "oc": net.oc,
        "isometry": iso,
        "fidelity": fid,
        "note": note,
        "pass": pass,
    });
    let path = a.out.join("report.json");
    write_json(&path, &report)?;
    ctx.outputs.push(path);
    Ok(pass)
}

pub fn verify(ctx: &mut Ctx, a: &VerifyArgs) -> Result<bool> {
    let mut checks = Vec::new();
    if let Some(inc) = &a.inclusion {
        let inc = Inclusion::parse(inc)?;
        let (n, m) = two_d(&parse_size(&a.size)?)?;
        ctx.seeds.push(a.seed);
        for mut c in verify_inclusion(ctx.exec, inc, n, m, a.seed, ctx.tol)?.checks {
            c.name = format!("{}: {}", inc.as_str(), c.name);
            checks.push(c);
        }
    }
    let circuit = match &a.circuit {
        Some(p) => Some(ctx.load(p)?),
        None => None,
    };
    if a.isometries {
        let c = circuit.as_ref().expect("clap requires --circuit");
        let iso = verify_network_isometries(&circuit_to_network(c)?, 1e-12)?;
        for s in iso.sites.iter().filter(|s| s.residual > iso.tol) {
            checks.push(Check::at_most(format!("isometry: tensor {} at {:?}", s.tensor, s.id), s.residual, iso.tol));
        }
        checks.push(Check::at_most("isometry: max residual", iso.max_residual, iso.tol));
    }
    if a.entropy {
        let c = circuit.as_ref().expect("clap requires --circuit");
        let psi = simulate_with(ctx.exec, c)?;
        for cut in area_law(c, &psi, ctx.tol)? {
            checks.push(Check {
                name: format!("entropy: axis {} cut {} (bound {:.6})", cut.axis, cut.cut, cut.bound),
                value: cut.entropy,
                tol: cut.bound + ctx.tol,
                pass: cut.pass,
            });
        }
    }
    if a.disentanglement {
        let lat = Lattice::open(&parse_size(&a.size)?, 2)?;
        let c = photonic_circuit(&lat, a.lp, ctx.choice(a.seed, false))?;
        let run = run_protocol(ctx.exec, &c, true)?;
        let rep = verify_disentangled(&run, ctx.tol);
        checks.push(Check::at_most("photonic: source deficit", rep.deficit, ctx.tol));
        let f = fidelity(&run.photonic_state()?, &simulate_with(ctx.exec, &c)?)?;
        checks.push(Check::infidelity("photonic: photons vs matter lattice", f, ctx.tol));
        checks.push(Check::holds("photonic: photons never acted on", run.photons_untouched()));
    }
    if checks.is_empty() {
        return Err(bad("nothing to verify: pass --inclusion, --isometries, --entropy or --disentanglement"));
    }
    let report = Report::new(checks);
    for c in report.failures() {
        eprintln!("FAILED {}: measured {:.3e}, allowed {:.3e}", c.name, c.value, c.tol);
    }
    ctx.emit_json(a.out.as_deref(), &report)?;
    Ok(report.pass)
}

pub fn photonic(ctx: &mut Ctx, a: &PhotonicArgs) -> Result<bool> {
    let dims = parse_size(&a.size)?;
    let c = match a.family {
        PhotonicFamily::Ghz => {
            if dims.len() != 1 {
                return Err(bad("ghz takes the photon count, e.g. --size 8"));
            }
            lift_chain(&ghz_chain_circuit(dims[0])?)?
        }
        fam => {
            let (n, m) = two_d(&dims)?;
            let lat = Lattice::open(&[n, m], a.d)?;
            let choice = ctx.choice(a.seed, a.identity);
            match fam {
                PhotonicFamily::RpPeps => photonic_circuit(&lat, a.lp, choice)?,
                PhotonicFamily::Isotns => build_isotns_circuit(&lat, a.bond_dim, IsoOc::Corner, choice)?,
                PhotonicFamily::Fpeps => build_fpeps_circuit(&lat, a.bond_dim, choice)?,
                PhotonicFamily::Ghz => unreachable!(),
            }
        }
    };
    let run = run_protocol(ctx.exec, &c, !a.no_swap)?;
    let rep = verify_disentangled(&run, ctx.tol);
    let fid = if run.completed { Some(fidelity(&run.photonic_state()?, &simulate_with(ctx.exec, &c)?)?) } else { None };
    let pass = rep.pass && run.photons_untouched() && fid.is_some_and(|f| f >= 1.0 - ctx.tol);
    let report = json!({
        "dims": c.lattice.dims,
        "sources": run.state.sources(),
        "ancilla_dim": run.state.ancilla_dim(),
        "photons": run.state.num_photons(),
        "photon_map": run.photon_map,
        "completed": run.completed,
        "photons_untouched": run.photons_untouched(),
        "deficit": rep.deficit,
        "fidelity": fid,
        "pass": pass,
    });
    ctx.emit_json(a.out.as_deref(), &report)?;
    Ok(pass)
}

pub fn lightcone(ctx: &mut Ctx, a: &LightconeArgs) -> Result<bool> {
    let c = ctx.load(&a.circuit)?;
    let q = c.lattice.q();
    let d = c.lattice.d;
    let (op_a, op_b) = (local_op(a.op, d), local_op(a.op_b.unwrap_or(a.op), d));
    if let Some(site) = &a.site {
        let obs = Observable::new(op_a, vec![parse_coord(site, q)?]);
        let (v, rep) = expectation_via_lightcone(ctx.exec, &c, &obs)?;
        let full = if a.check { Some(expectation(&simulate_with(ctx.exec, &c)?, &obs)?) } else { None };
        let diff = full.map(|f| (f - v).norm());
        let pass = diff.is_none_or(|x| x <= ctx.tol);
        let report = json!({
            "value": [v.re, v.im],
            "cancellation": rep,
            "full": full.map(|f| [f.re, f.im]),
            "difference": diff,
            "pass": pass,
        });
        ctx.emit_json(a.out.as_deref(), &report)?;
        return Ok(pass);
    }
    let pairs = match &a.pairs {
        Some(p) => parse_pairs(p, q)?,
        None => return Err(bad("give --site or --pairs")),
    };
    let rows = correlation_scan(ctx.exec, &c, &op_a, &op_b, &pairs)?;
    let mut pass = true;
    if a.check {
        let psi = simulate_with(ctx.exec, &c)?;
        for r in &rows {
            let ab = expectation(&psi, &Observable::product(&[(&op_a, r.site_a.clone()), (&op_b, r.site_b.clone())]))?;
            let ea = expectation(&psi, &Observable::new(op_a.clone(), vec![r.site_a.clone()]))?;
            let eb = expectation(&psi, &Observable::new(op_b.clone(), vec![r.site_b.clone()]))?;
            let diff = (ab - ea * eb - r.value).norm();
            if diff > ctx.tol {
                eprintln!("FAILED light-cone correlator {:?}-{:?}: differs from full simulation by {diff:.3e}", r.site_a, r.site_b);
                pass = false;
            }
        }
    }
    ctx.emit_text(a.out.as_deref(), &correlations_csv(&rows))?;
    Ok(pass)
}

pub fn compare_brickwall(ctx: &mut Ctx, a: &BrickwallArgs) -> Result<bool> {
    let lat = Lattice::open(&parse_size(&a.size)?, 2)?;
    let rep = brickwall_comparison(&lat, a.lp)?;
    ctx.emit_json(a.out.as_deref(), &rep)?;
    Ok(true)
}

pub fn report(ctx: &mut Ctx, a: &ReportArgs) -> Result<bool> {
    std::fs::create_dir_all(&a.out)?;
    let mut depth = String::from("family,n,m,lp,gates,depth,formula\n");
    let sides: Vec<usize> = (1..).map(|k| 4 * k).take_while(|&n| n <= a.max_side.max(4)).collect();
    for &n in &sides {
        let lat = Lattice::open(&[n, n], 2)?;
        let pref = Preferred::default_for(2);
        for lp in [2usize, 3] {
            if lp > n {
                continue;
            }
            let sup = radial_ordering(&lat, lp, &[0, 0], &pref)?.supports(&lat)?;
            let f = depth_formula(&lat, lp, DepthFamily::RpPeps, &pref);
            let _ = writeln!(depth, "rp-peps,{n},{n},{lp},{},{},{f}", sup.len(), layerize(&sup).depth);
        }
        let sup: Vec<Vec<Coord>> = isotns_supports(&lat, 1, &IsoOc::Corner)?.into_iter().map(|x| x.1).collect();
        let f = depth_formula(&lat, 2, DepthFamily::Isotns, &pref);
        let _ = writeln!(depth, "isotns,{n},{n},2,{},{},{f}", sup.len(), layerize(&sup).depth);
    }
    let path = a.out.join("depth_scan.csv");
    std::fs::write(&path, depth)?;
    ctx.outputs.push(path);

    let mut comps = Vec::new();
    for dims in [vec![12usize], vec![24], vec![48], vec![6, 6], vec![10, 10], vec![14, 14]] {
        comps.push(brickwall_comparison(&Lattice::open(&dims, 2)?, 2)?);
    }
    let path = a.out.join("brickwall.json");
    write_json(&path, &comps)?;
    ctx.outputs.push(path);

    let lat = Lattice::open(&[6, 6], 2)?;
    let c = build_rppeps(&lat, 2, &[0, 0], &Preferred::default_for(2), GateChoice::Identity)?;
    let mut csv = String::from("site,surviving,total,ratio\n");
    for s in lat.sites() {
        let r = cancellation(&c, std::slice::from_ref(&s));
        let _ = writeln!(csv, "{}:{},{},{},{}", s[0], s[1], r.surviving.len(), r.total_gates, r.cost_ratio);
    }
    let path = a.out.join("cancellation.csv");
    std::fs::write(&path, csv)?;
    ctx.outputs.push(path);
    Ok(true)
}
