use ppeps::linalg::{self, ONE, ZERO};
use ppeps::rng::rng_from_seed;
use ppeps::tensor::*;
use ppeps::{Error, Exec, C64};
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

fn random_tensor(shape: Vec<usize>, seed: u64) -> Tensor {
    let n: usize = shape.iter().product();
    let mut rng = rng_from_seed(seed);
    let data = (0..n)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    Tensor::new(shape, data).unwrap()
}

fn naive_contract_3x2(a: &Tensor, b: &Tensor) -> Tensor {
    // a: (i, j, k) with k paired to b's leg 0; b: (k, l)
    let (ni, nj, nk) = (a.shape()[0], a.shape()[1], a.shape()[2]);
    let nl = b.shape()[1];
    Tensor::from_fn(vec![ni, nj, nl], |x| {
        let mut s = ZERO;
        for k in 0..nk {
            s += a.get(&[x[0], x[1], k]) * b.get(&[k, x[2]]);
        }
        s
    })
}

#[test]
fn identity_times_vector() {
    let v = basis_vector(2, 0);
    let c = contract(&Tensor::identity(2), &v, &[(1, 0)]).unwrap();
    assert_eq!(c.shape(), &[2]);
    assert_eq!(c.data(), &[ONE, ZERO]);
}

#[test]
fn unitary_with_conjugate_is_identity() {
    let u = random_unitary(4, 11).unwrap();
    let c = contract(&u, &u.conj(), &[(1, 1)]).unwrap();
    assert!(c.max_abs_diff(&Tensor::identity(4)) <= 1e-12);
}

#[test]
fn contraction_matches_nested_loops() {
    let a = random_tensor(vec![2, 3, 2], 1);
    let b = random_tensor(vec![2, 2], 2);
    let c = contract(&a, &b, &[(2, 0)]).unwrap();
    assert!(c.max_abs_diff(&naive_contract_3x2(&a, &b)) <= 1e-14);
}

#[test]
fn contract_rejects_bad_pairs() {
    let a = random_tensor(vec![2, 3], 1);
    let b = random_tensor(vec![2, 2], 2);
    assert!(matches!(contract(&a, &b, &[(1, 0)]), Err(Error::DimensionMismatch(_))));
    assert!(matches!(contract(&a, &b, &[(0, 0), (0, 1)]), Err(Error::LegPairedTwice { tensor: 'a', leg: 0 })));
}

#[test]
fn qr_of_identity() {
    let (q, r) = qr_split(&Tensor::identity(4), &[0]).unwrap();
    assert!(q.max_abs_diff(&Tensor::identity(4)) == 0.0);
    assert!(r.max_abs_diff(&Tensor::identity(4)) == 0.0);
}

#[test]
fn qr_of_zero() {
    let (q, r) = qr_split(&Tensor::zeros(vec![2, 2]), &[0]).unwrap();
    assert!(r.norm() == 0.0);
    assert!(isometry_residual(&q, &[1]).unwrap() < 1e-15);
}

#[test]
fn qr_of_plaquette_unitary() {
    let u = random_unitary(16, 5).unwrap().reshape(vec![2; 8]).unwrap();
    let (q, r) = qr_split(&u, &[0, 4]).unwrap();
    assert!(isometry_residual(&q, &[2]).unwrap() <= 1e-12);
    // back legs: 0, 4, then 1, 2, 3, 5, 6, 7
    let back = contract(&q, &r, &[(2, 0)]).unwrap().permute(&[0, 2, 3, 4, 1, 5, 6, 7]).unwrap();
    assert!(back.max_abs_diff(&u) <= 1e-10);
    let rm = r.reshape(vec![4, 64]).unwrap();
    for k in 0..4 {
        let d = rm.get(&[k, k]);
        assert!(d.im == 0.0 && d.re >= 0.0);
    }
}

#[test]
fn isometry_examples() {
    let (ok, res) = is_isometry(&Tensor::identity(3), &[1], 1e-10).unwrap();
    assert!(ok && res == 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = Tensor::new(vec![2, 1], vec![C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
    let (ok, res) = is_isometry(&v, &[1], 1e-10).unwrap();
    assert!(ok && res <= 1e-15);
}

#[test]
fn random_unitary_properties() {
    let u = random_unitary(4, 99).unwrap();
    assert!(linalg::unitarity_residual(u.data(), 4) <= 1e-12);
    assert_eq!(u, random_unitary(4, 99).unwrap());
    let one = random_unitary(1, 3).unwrap();
    assert!((one.data()[0] - ONE).norm() < 1e-15);
    assert!(random_unitary(0, 1).is_err());
}

#[test]
fn labels_must_be_unique() {
    let l = LegLabel { site: vec![0, 0], kind: LegKind::Physical };
    assert!(Tensor::identity(2).with_labels(vec![l.clone(), l]).is_err());
}

#[test]
fn qr_of_zero_matrix_has_orthonormal_q() {
    let (q, r, k) = linalg::qr(&[ZERO; 4], 2, 2);
    assert_eq!(k, 2);
    assert!(r.iter().all(|x| x.norm() == 0.0));
    assert!(linalg::column_isometry_residual(&q, 2, 2) < 1e-14);
}

#[test]
fn completion_yields_unitary() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = vec![C64::new(s, 0.0), C64::new(0.0, s), ZERO];
    let u = linalg::complete_to_unitary(&v, 3, 1);
    assert!(linalg::unitarity_residual(&u, 3) < 1e-14);
    assert_eq!(u[0], v[0]);
    assert_eq!(u[3], v[1]);
}

#[test]
fn hermitian_eigenvalues_of_diagonal() {
    let a = vec![C64::new(2.0, 0.0), ZERO, ZERO, C64::new(-1.0, 0.0)];
    let v = linalg::hermitian_eigenvalues(&a, 2);
    assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 2.0).abs() < 1e-14);
}

/// Shape of rank 2..=5 with legs of size 1..=4, plus a nonempty proper
/// subset of legs.
fn shape_and_split() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    prop::collection::vec(1usize..=4, 2..=5).prop_flat_map(|shape| {
        let r = shape.len();
        (Just(shape), prop::sample::subsequence((0..r).collect::<Vec<_>>(), 1..r).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn qr_split_round_trip((shape, left) in shape_and_split(), seed in any::<u64>()) {
        let t = random_tensor(shape.clone(), seed);
        let (q, r) = qr_split(&t, &left).unwrap();
        let k = left.len();
        prop_assert!(isometry_residual(&q, &[k]).unwrap() <= 1e-10);
        let back = contract(&q, &r, &[(k, 0)]).unwrap();
        // back legs are `left`, then the others in order; invert that.
        let mut order = left.clone();
        order.extend((0..shape.len()).filter(|l| !left.contains(l)));
        let mut inv = vec![0; order.len()];
        for (pos, &leg) in order.iter().enumerate() {
            inv[leg] = pos;
        }
        let back = back.permute(&inv).unwrap();
        prop_assert!(back.max_abs_diff(&t) <= 1e-10, "error {}", back.max_abs_diff(&t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn contract_is_associative(i in 1usize..4, j in 1usize..4, k in 1usize..4, l in 1usize..4, m in 1usize..4, seed in any::<u64>()) {
        let a = random_tensor(vec![i, j], seed);
        let b = random_tensor(vec![j, k, l], seed ^ 1);
        let c = random_tensor(vec![l, m], seed ^ 2);
        let left = contract(&contract(&a, &b, &[(1, 0)]).unwrap(), &c, &[(2, 0)]).unwrap();
        let right = contract(&a, &contract(&b, &c, &[(2, 0)]).unwrap(), &[(1, 0)]).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn unitaries_are_isometries_on_input_legs(n_in in 1usize..=3, seed in any::<u64>()) {
        let u = random_unitary(1 << n_in, seed).unwrap();
        let prop = u.reshape(vec![2; 2 * n_in]).unwrap();
        let inputs: Vec<usize> = (n_in..2 * n_in).collect();
        let (ok, res) = is_isometry(&prop, &inputs, 1e-10).unwrap();
        prop_assert!(ok, "residual {res}");
        prop_assert!(linalg::unitarity_residual(u.data(), 1 << n_in) <= 1e-12);
    }

    #[test]
    fn sequential_and_parallel_contractions_agree(i in 1usize..9, j in 1usize..9, k in 1usize..9, seed in any::<u64>()) {
        let a = random_tensor(vec![i, j], seed);
        let b = random_tensor(vec![j, k], !seed);
        let s = contract_with(Exec::Sequential, &a, &b, &[(1, 0)]).unwrap();
        let p = contract_with(Exec::Parallel, &a, &b, &[(1, 0)]).unwrap();
        prop_assert!(s.max_abs_diff(&p) <= 1e-13);
    }
}
