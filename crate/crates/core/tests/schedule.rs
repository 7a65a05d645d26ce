use ppeps::circuit::{ceil_log, Gate, GateKind};
use ppeps::families::isotns::isotns_supports;
use ppeps::families::{build_rppeps, GateChoice, IsoOc};
use ppeps::lattice::{Boundary, Coord, Lattice};
use ppeps::schedule::*;
use ppeps::statevector::{expectation, fidelity, ops, simulate_gates, simulate_with, Observable};
use ppeps::{Error, Exec};
use proptest::prelude::*;

#[test]
fn index_round_trip() {
    let l = Lattice::open(&[3, 4, 2], 2).unwrap();
    for i in 0..l.num_sites() {
        assert_eq!(l.index(&l.coord(i)), i);
    }
    assert_eq!(l.index(&[0, 1, 0]), 2);
}

#[test]
fn anchors_and_plaquettes() {
    let l = Lattice::open(&[4, 4], 2).unwrap();
    assert_eq!(l.anchors(2).len(), 9);
    assert_eq!(l.plaquette(&[1, 2], 2).unwrap(), vec![vec![1, 2], vec![1, 3], vec![2, 2], vec![2, 3]]);
    assert!(l.plaquette(&[3, 0], 2).is_err());
    let p = Lattice::new(vec![4, 4], 2, Boundary::Periodic).unwrap();
    assert_eq!(p.anchors(2).len(), 16);
    assert_eq!(p.plaquette(&[3, 3], 2).unwrap()[3], vec![0, 0]);
    assert_eq!(p.displacement(&[0, 0], &[3, 1]), vec![-1, 1]);
}

#[test]
fn rejects_bad_lattices() {
    assert!(Lattice::open(&[0, 2], 2).is_err());
    assert!(Lattice::open(&[2, 2], 1).is_err());
    assert!(Lattice::open(&[1, 1, 1, 1], 2).is_err());
}

#[test]
fn gate_rejects_non_unitary() {
    let m = ppeps::tensor::Tensor::identity(2).scale(ppeps::C64::new(1.001, 0.0));
    let err = Gate::new(m, vec![vec![0]], GateKind::Custom, vec![0], 2).unwrap_err();
    assert!(matches!(err, Error::NotUnitary { .. }));
}

#[test]
fn gate_rejects_repeated_support() {
    let err = Gate::identity(vec![vec![0], vec![0]], GateKind::Custom, vec![0], 2).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
}

#[test]
fn ceil_log_values() {
    assert_eq!(ceil_log(1, 2), 0);
    assert_eq!(ceil_log(2, 2), 1);
    assert_eq!(ceil_log(3, 2), 2);
    assert_eq!(ceil_log(9, 3), 2);
}

#[test]
fn small_radial() {
    let l = Lattice::open(&[2, 2], 2).unwrap();
    let o = radial_ordering(&l, 2, &[0, 0], &Preferred::default_for(2)).unwrap();
    assert_eq!(o.positions, vec![vec![0, 0]]);
    assert_eq!(layerize(&o.supports(&l).unwrap()).depth, 1);
}

#[test]
fn horizontal_first_layer_grouping() {
    let l = Lattice::open(&[11, 11], 2).unwrap();
    let o = radial_ordering(&l, 2, &[4, 4], &Preferred::parse("+1,+0", 2).unwrap()).unwrap();
    let s = layerize(&o.supports(&l).unwrap());
    let want: Vec<Vec<usize>> = [0..1, 1..3, 3..7, 7..13, 13..21].into_iter().map(|r| r.collect()).collect();
    assert_eq!(&s.layers[..5], &want[..]);
    assert_eq!(o.positions[0], vec![4, 4]);
}

#[test]
fn corner_layers_follow_weighted_distance() {
    // From the corner each plaquette waits for its neighbours one step back
    // along axis 0 and two steps back along axis 1.
    let l = Lattice::open(&[4, 4], 2).unwrap();
    let o = radial_ordering(&l, 2, &[0, 0], &Preferred::default_for(2)).unwrap();
    assert_eq!(o.positions.len(), 9);
    let s = layerize(&o.supports(&l).unwrap());
    let layer = s.layer_of(9);
    for (g, p) in o.positions.iter().enumerate() {
        assert_eq!(layer[g], p[0] + 2 * p[1], "anchor {p:?}");
    }
}

#[test]
fn brickwall_counts() {
    let l = Lattice::open(&[4], 2).unwrap();
    assert_eq!(brickwall_ordering(&l, 2, 1), vec![vec![0], vec![2]]);
    let l = Lattice::open(&[12], 2).unwrap();
    let b = brickwall_ordering(&l, 2, 2);
    assert_eq!(b.len(), 11);
    assert_eq!(layerize(&plaquette_supports(&l, &b, 2).unwrap()).depth, 2);
}

#[test]
fn sequential_chain_depth() {
    let sup: Vec<Vec<Coord>> = (0..7).map(|i| vec![vec![i], vec![i + 1]]).collect();
    assert_eq!(layerize(&sup).depth, 7);
    assert_eq!(reverse_light_cone(&sup, &[vec![0]]), vec![0]);
    assert_eq!(reverse_light_cone(&sup, &[vec![3]]), vec![0, 1, 2, 3]);
}

#[test]
fn parse_preferred() {
    let p = Preferred::parse("+1,-0", 2).unwrap();
    assert_eq!(p.axes, vec![1, 0]);
    assert_eq!(p.signs, vec![-1, 1]);
    assert!(Preferred::parse("0,0", 2).is_err());
}

#[test]
fn isotns_two_by_two_corner() {
    let l = Lattice::open(&[2, 2], 2).unwrap();
    let sup: Vec<Vec<Coord>> = isotns_supports(&l, 1, &IsoOc::Corner).unwrap().into_iter().map(|x| x.1).collect();
    assert_eq!(sup, vec![vec![vec![0, 0], vec![0, 1], vec![1, 1]], vec![vec![1, 0], vec![1, 1]]]);
}

#[test]
fn formula_values() {
    let l = Lattice::open(&[7, 9], 2).unwrap();
    let p = Preferred::default_for(2);
    assert_eq!(depth_formula(&l, 2, DepthFamily::RpPeps, &p), 7 + 2 * 9);
    assert_eq!(depth_formula(&l, 2, DepthFamily::Isotns, &p), 16);
    let l = Lattice::open(&[3, 4, 5], 2).unwrap();
    assert_eq!(depth_formulas(&l, 2, "rp-peps").unwrap(), 3 + 8 + 20);
    assert!(depth_formulas(&l, 2, "mps").is_err());
}

#[test]
fn radial_depth_tracks_formula() {
    for n in [20, 50, 100] {
        let l = Lattice::open(&[n, n], 2).unwrap();
        let p = Preferred::default_for(2);
        let sup = radial_ordering(&l, 2, &[0, 0], &p).unwrap().supports(&l).unwrap();
        let depth = layerize(&sup).depth as i64;
        let f = depth_formula(&l, 2, DepthFamily::RpPeps, &p) as i64;
        assert!((depth - f).abs() <= 8, "{n}x{n}: depth {depth}, formula {f}");
    }
}

/// Interval-based oracle: on a chain, a reverse light cone is always a
/// contiguous block of sites.
fn chain_cone(gates: &[Vec<Coord>], site: usize) -> Vec<usize> {
    let (mut lo, mut hi) = (site, site);
    let mut out = Vec::new();
    for g in (0..gates.len()).rev() {
        let a = gates[g].iter().map(|c| c[0]).min().unwrap();
        let b = gates[g].iter().map(|c| c[0]).max().unwrap();
        if a <= hi && b >= lo {
            lo = lo.min(a);
            hi = hi.max(b);
            out.push(g);
        }
    }
    out
}

#[test]
fn brickwall_overlap_matches_interval_oracle() {
    for (n, lp) in [(6, 2), (12, 2), (13, 2), (24, 2), (12, 3), (20, 3)] {
        let l = Lattice::open(&[n], 2).unwrap();
        let oracle = (1..=4 * n).find(|&sw| {
            let sup = plaquette_supports(&l, &brickwall_ordering(&l, lp, sw), lp).unwrap();
            let a = chain_cone(&sup, 0);
            chain_cone(&sup, n - 1).iter().any(|g| a.contains(g))
        });
        assert_eq!(brickwall_min_sweeps_for_overlap(n, lp, 4 * n).unwrap(), oracle, "n={n} lp={lp}");
    }
    assert_eq!(brickwall_min_sweeps_for_overlap(12, 2, 40).unwrap(), Some(7));
}

fn shuffled_anchors(n: usize, m: usize, lp: usize) -> impl Strategy<Value = Vec<Coord>> {
    let l = Lattice::open(&[n, m], 2).unwrap();
    Just(l.anchors(lp)).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn layerize_keeps_overlapping_gates_in_order(order in shuffled_anchors(6, 7, 2)) {
        let l = Lattice::open(&[6, 7], 2).unwrap();
        let sup = plaquette_supports(&l, &order, 2).unwrap();
        let s = layerize(&sup);
        let layer = s.layer_of(sup.len());
        for i in 0..sup.len() {
            let mut earliest = 0;
            for j in 0..i {
                if sup[i].iter().any(|x| sup[j].contains(x)) {
                    prop_assert!(layer[j] < layer[i]);
                    earliest = earliest.max(layer[j] + 1);
                }
            }
            prop_assert_eq!(layer[i], earliest);
        }
        let mut flat = s.flatten();
        flat.sort_unstable();
        prop_assert_eq!(flat, (0..sup.len()).collect::<Vec<_>>());
    }

    #[test]
    fn layerized_order_gives_same_state(seed in any::<u64>(), si in 0usize..2, sj in 0usize..3) {
        let l = Lattice::open(&[3, 4], 2).unwrap();
        let c = build_rppeps(&l, 2, &[si, sj], &Preferred::default_for(2), GateChoice::Seed(seed)).unwrap();
        let s = layerize(&c.supports());
        let flat = simulate_with(Exec::Sequential, &c).unwrap();
        let layered = simulate_gates(Exec::Sequential, &l, l.sites().collect(), s.flatten().into_iter().map(|g| &c.gates[g])).unwrap();
        prop_assert!(fidelity(&flat, &layered).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn light_cone_gates_reproduce_expectations(seed in any::<u64>(), site in 0usize..12, x in any::<bool>()) {
        let l = Lattice::open(&[3, 4], 2).unwrap();
        let c = build_rppeps(&l, 2, &[1, 1], &Preferred::default_for(2), GateChoice::Seed(seed)).unwrap();
        let target = l.coord(site);
        let obs = Observable::new(if x { ops::x(2) } else { ops::z(2) }, vec![target.clone()]);
        let full = expectation(&simulate_with(Exec::Sequential, &c).unwrap(), &obs).unwrap();
        let cone = reverse_light_cone(&c.supports(), &[target]);
        let reduced = simulate_gates(Exec::Sequential, &l, l.sites().collect(), cone.iter().map(|&g| &c.gates[g])).unwrap();
        prop_assert!((expectation(&reduced, &obs).unwrap() - full).norm() <= 1e-10);
    }
}
