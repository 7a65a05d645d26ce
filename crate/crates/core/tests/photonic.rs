use num_complex::Complex64 as C64;
use ppeps::families::{build_isotns_circuit, build_rppeps, ghz_chain_circuit, GateChoice, IsoOc};
use ppeps::lattice::Lattice;
use ppeps::network::circuit_to_network;
use ppeps::photonic::*;
use ppeps::schedule::Preferred;
use ppeps::statevector::{fidelity, ops, simulate, StateVector};
use ppeps::Exec;

fn swap_matrix(d: usize) -> Vec<C64> {
    let mut m = vec![C64::new(0.0, 0.0); d.pow(4)];
    for a in 0..d {
        for b in 0..d {
            m[(b * d + a) * d * d + a * d + b] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// Dense oracle for one emission: append `|0>`, swap it with the emitter.
fn emission_oracle(amps: &[C64], qudits: usize, emitter: usize, d: usize) -> Vec<C64> {
    let lat = Lattice::open(&[qudits + 1], d).unwrap();
    let mut ext = vec![C64::new(0.0, 0.0); amps.len() * d];
    for (i, &a) in amps.iter().enumerate() {
        ext[i * d] = a;
    }
    let mut sv = StateVector::from_amplitudes(&lat, lat.sites().collect(), ext).unwrap();
    sv.apply_matrix(Exec::Sequential, &swap_matrix(d), &[vec![emitter], vec![qudits]]).unwrap();
    sv.into_amplitudes()
}

#[test]
fn emission_basics() {
    let mut s = SourceArrayState::new(1, 2, 2).unwrap();
    assert_eq!(s.ancilla_dim(), 2);
    assert_eq!(s.emit(0).unwrap(), 0);
    assert_eq!(s.amplitudes()[0], C64::new(1.0, 0.0));
    assert_eq!(s.deficit(), 0.0);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = SourceArrayState::new(1, 2, 2).unwrap();
    s.apply(Exec::Sequential, ops::hadamard().data(), &[0]).unwrap();
    s.emit(0).unwrap();
    let a = s.amplitudes();
    assert!((a[0].re - h).abs() < 1e-15 && (a[1].re - h).abs() < 1e-15);
    assert!(a[2..].iter().all(|x| x.norm() == 0.0));
    assert!(s.emit(1).is_err());
    assert!(s.apply(Exec::Sequential, ops::hadamard().data(), &[2]).is_err());
}

#[test]
fn emission_matches_dense_isometry() {
    for d in [2usize, 3] {
        let mut s = SourceArrayState::new(2, 2, d).unwrap();
        let u = ppeps::tensor::random_unitary(d.pow(3), 11 + d as u64).unwrap();
        s.apply(Exec::Sequential, u.data(), &[1, 2, 3]).unwrap();
        for (emitter_source, photons_before) in [(1usize, 0usize), (0, 1)] {
            let before = s.amplitudes().to_vec();
            let q = 4 + photons_before;
            s.emit(emitter_source).unwrap();
            let want = emission_oracle(&before, q, s.qudit(emitter_source, 0), d);
            let err = s.amplitudes().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-15, "d={d} err {err}");
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn identity_protocol_gives_vacuum() {
    let l = Lattice::open(&[3, 3], 2).unwrap();
    let c = photonic_circuit(&l, 2, GateChoice::Identity).unwrap();
    let run = run_protocol(Exec::default(), &c, true).unwrap();
    assert!(run.completed);
    assert_eq!(run.state.num_photons(), 9);
    let rep = verify_disentangled(&run, 1e-10);
    assert_eq!(rep.deficit, 0.0);
    assert!(rep.pass);
    let psi = run.photonic_state().unwrap();
    assert_eq!(psi.amplitudes()[0], C64::new(1.0, 0.0));
}

#[test]
fn seeded_array_reproduces_matter_lattice() {
    let l = Lattice::open(&[3, 3], 2).unwrap();
    for seed in 0..5 {
        let c = photonic_circuit(&l, 2, GateChoice::Seed(seed)).unwrap();
        let run = run_protocol(Exec::default(), &c, true).unwrap();
        assert!(run.photons_untouched());
        assert!(verify_disentangled(&run, 1e-10).pass, "deficit {}", run.state.deficit());
        let mut sites = run.photon_map.clone();
        sites.sort();
        assert_eq!(sites, l.sites().collect::<Vec<_>>());
        assert_eq!(run.photon_map[0], vec![0, 0]);

        // radial from the corner with columns first is the same gate sequence
        let rp = build_rppeps(&l, 2, &[0, 0], &Preferred::parse("+1,+0", 2).unwrap(), GateChoice::Seed(seed)).unwrap();
        assert_eq!(rp.positions(), c.positions());
        let f = fidelity(&run.photonic_state().unwrap(), &simulate(&rp).unwrap()).unwrap();
        assert!(f >= 1.0 - 1e-10, "fidelity {f}");
    }
}

#[test]
fn larger_plaquettes_and_qutrits() {
    for (n, m, d, lp) in [(4usize, 3usize, 2usize, 3usize), (3, 3, 3, 2), (4, 4, 2, 2)] {
        let l = Lattice::open(&[n, m], d).unwrap();
        let c = photonic_circuit(&l, lp, GateChoice::Seed(9)).unwrap();
        let run = run_protocol(Exec::default(), &c, true).unwrap();
        assert_eq!(run.state.ancilla_dim(), d.pow(lp as u32 - 1));
        assert!(run.state.deficit() <= 1e-10);
        let f = fidelity(&run.photonic_state().unwrap(), &simulate(&c).unwrap()).unwrap();
        assert!(f >= 1.0 - 1e-10);
    }
}

#[test]
fn single_source_emits_ghz() {
    let c = lift_chain(&ghz_chain_circuit(8).unwrap()).unwrap();
    let run = run_protocol(Exec::default(), &c, true).unwrap();
    assert_eq!(run.state.sources(), 1);
    assert_eq!(run.state.num_photons(), 8);
    assert!(run.state.deficit() < 1e-14);
    let psi = run.photonic_state().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, a) in psi.amplitudes().iter().enumerate() {
        let want = if i == 0 || i == 255 { h } else { 0.0 };
        assert!((a - C64::new(want, 0.0)).norm() < 1e-14, "amplitude {i}");
    }
}

#[test]
fn single_source_seeded_chain() {
    let l = Lattice::open(&[6, 1], 2).unwrap();
    let c = photonic_circuit(&l, 3, GateChoice::Seed(4)).unwrap();
    let run = run_protocol(Exec::default(), &c, true).unwrap();
    assert_eq!(run.state.ancilla_dim(), 4);
    assert!(run.state.deficit() <= 1e-10);
    let f = fidelity(&run.photonic_state().unwrap(), &simulate(&c).unwrap()).unwrap();
    assert!(f >= 1.0 - 1e-10);
}

#[test]
fn truncated_protocol_leaves_sources_entangled() {
    let l = Lattice::open(&[3, 3], 2).unwrap();
    let c = photonic_circuit(&l, 2, GateChoice::Seed(1)).unwrap();
    let run = run_protocol(Exec::default(), &c, false).unwrap();
    assert!(!run.completed);
    assert_eq!(run.state.num_photons(), 6);
    let rep = verify_disentangled(&run, 1e-10);
    assert!(rep.deficit > 1e-6 && !rep.pass, "deficit {}", rep.deficit);
}

#[test]
fn fpeps_array_carries_shifted_boundary() {
    let l = Lattice::open(&[3, 3], 2).unwrap();
    let (c, run) = run_fpeps_protocol(Exec::default(), &l, 2, GateChoice::Seed(12)).unwrap();
    assert!(run.photons_untouched());
    assert!(run.state.deficit() <= 1e-10);
    let f = fidelity(&run.photonic_state().unwrap(), &simulate(&c).unwrap()).unwrap();
    assert!(f >= 1.0 - 1e-10);
    let net = circuit_to_network(&c).unwrap();
    assert_eq!(net.bonds_between(&[0, 2], &[1, 0]), 1);
    assert_eq!(net.bonds_between(&[1, 2], &[2, 0]), 1);

    let (_, run) = run_fpeps_protocol(Exec::default(), &l, 2, GateChoice::Identity).unwrap();
    assert_eq!(run.photonic_state().unwrap().amplitudes()[0], C64::new(1.0, 0.0));
}

#[test]
fn isotns_array() {
    let l = Lattice::open(&[3, 3], 2).unwrap();
    let c = build_isotns_circuit(&l, 2, IsoOc::Corner, GateChoice::Seed(7)).unwrap();
    let run = run_protocol(Exec::default(), &c, true).unwrap();
    assert_eq!(run.photon_map[0], vec![0, 0]);
    assert!(run.state.deficit() <= 1e-10);
    let f = fidelity(&run.photonic_state().unwrap(), &simulate(&c).unwrap()).unwrap();
    assert!(f >= 1.0 - 1e-10);
}

#[test]
fn out_of_window_order_is_rejected() {
    let l = Lattice::open(&[3, 6], 2).unwrap();
    let c = build_rppeps(&l, 2, &[0, 0], &Preferred::default_for(2), GateChoice::Seed(1)).unwrap();
    assert!(matches!(run_protocol(Exec::default(), &c, true), Err(ppeps::Error::Unsupported(_))));
}
