mod common;

use num_bigint::BigUint;
use num_traits::pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{md, random_monic};
use ppcount::oracle::{self, GaloisRing};
use ppcount::rootcount::{count_roots, CountOptions};

#[test]
fn frobenius_mode_matches_galois_ring_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..60 {
        let p = [2u32, 3][rng.gen_range(0..2)];
        let k = rng.gen_range(1..=2);
        let deg = rng.gen_range(1..=4);
        let f = random_monic(&mut rng, p, k, deg);
        let m = md(p, k);
        let q = BigUint::from(p).pow(2);
        let opts = CountOptions { frobenius_q: Some(q), verify_ideals: true, ..Default::default() };
        let report = count_roots(&f, &m, &opts).unwrap();
        let ring = GaloisRing::standard(m.clone(), 2).unwrap();
        let expected = oracle::brute_force_galois_roots(&f, &ring).unwrap();
        assert_eq!(report.root_count, expected, "f = {f:?}, p = {p}, k = {k}");
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }
}

#[test]
fn oracles_agree_in_degree_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..80 {
        let p = [2u32, 3, 5][rng.gen_range(0..3)];
        let k = rng.gen_range(1..=3);
        let deg = rng.gen_range(1..=5);
        let f = random_monic(&mut rng, p, k, deg);
        let m = md(p, k);
        let ring = GaloisRing::standard(m.clone(), 1).unwrap();
        let listed = oracle::brute_force_roots(&f, &m).unwrap().len();
        assert_eq!(oracle::brute_force_galois_roots(&f, &ring).unwrap(), BigUint::from(listed));
    }
}

#[test]
fn counts_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..30 {
        let deg = rng.gen_range(2..=8);
        let f = random_monic(&mut rng, 7, 6, deg);
        let m = md(7, 6);
        let a = count_roots(&f, &m, &CountOptions::default()).unwrap();
        let b = count_roots(&f, &m, &CountOptions::default()).unwrap();
        assert_eq!(a.root_count, b.root_count);
        assert_eq!(a.msis.len(), b.msis.len());
        assert_eq!(a.stats.pops, b.stats.pops);
    }
}

#[test]
fn root_count_never_exceeds_degree_times_fibre() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..40 {
        let p = [2u32, 3, 5][rng.gen_range(0..3)];
        let k = rng.gen_range(1..=6);
        let deg = rng.gen_range(1..=6);
        let f = random_monic(&mut rng, p, k, deg);
        let report = count_roots(&f, &md(p, k), &CountOptions::default()).unwrap();
        assert!(report.root_count <= BigUint::from(deg) * pow(BigUint::from(p), (k - 1) as usize));
    }
}
