use isingkw::combmap::generate::random_rotation_map;
use isingkw::exactalg::{det_eval, det_field, det_symbolic, exact_sqrt, pfaffian_field, GPoly, GaussRat, SquareMat};
use isingkw::ising::z_ising;
use isingkw::kacward::KacWard;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn skew_from(n: usize, upper: &[(i64, i64)]) -> Vec<Vec<GaussRat>> {
    let mut a = vec![vec![GaussRat::from_int(0); n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let (re, im) = upper[k];
            k += 1;
            a[i][j] = GaussRat::from_ints(re, im);
            a[j][i] = GaussRat::from_ints(-re, -im);
        }
    }
    a
}

fn small_poly(coeffs: &[i64], vars: u32) -> GPoly {
    let mut p = GPoly::one();
    for (k, &c) in coeffs.iter().enumerate() {
        let v = GPoly::var(k as u32 % vars);
        let w = GPoly::var((k as u32 + 1) % vars);
        p = &p + &(&(&v * &w) * &GPoly::from_int(c));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squares_to_determinant(
        n in 0usize..9,
        entries in prop::collection::vec((-3i64..4, -2i64..3), 36),
    ) {
        let a = skew_from(n, &entries);
        let pf = pfaffian_field(a.clone());
        prop_assert_eq!(&pf * &pf, det_field(a));
    }

    #[test]
    fn square_root_recovers_the_root(coeffs in prop::collection::vec(-4i64..5, 0..5)) {
        let q = small_poly(&coeffs, 3);
        let p = &q * &q;
        prop_assert_eq!(exact_sqrt(&p).unwrap(), q);
    }

    #[test]
    fn symbolic_determinant_matches_evaluation(
        entries in prop::collection::vec((-2i64..3, 0u32..3), 16),
        x in -5i64..6,
        y in -5i64..6,
    ) {
        let rows = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let (c, v) = entries[4 * i + j];
                        let base = if i == j { GPoly::one() } else { GPoly::zero() };
                        let term = if v == 2 { GPoly::from_int(c) } else { &GPoly::var(v) * &GPoly::from_int(c) };
                        &base + &term
                    })
                    .collect()
            })
            .collect();
        let m = SquareMat::from_rows(rows);
        let d = det_symbolic(&m).unwrap();
        let point = |v: u32| GaussRat::from_int(if v == 0 { x } else { y });
        prop_assert_eq!(d.eval_with(point), det_eval(&m, &point));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kac_ward_sum_equals_brute_force(seed in any::<u64>(), nv in 1usize..4, extra in 0usize..4) {
        let ne = nv - 1 + extra;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_rotation_map(&mut rng, nv, ne);
        prop_assume!(g.genus() <= 2);
        let kw = KacWard::new(&g).unwrap();
        prop_assert_eq!(kw.z_symbolic().unwrap(), z_ising(&g).unwrap());
    }
}
