//! Property tests for the arithmetic and normal-form layers.

use proptest::prelude::*;

use hopfgamma::linalg::Subspace;
use hopfgamma::qls::{DatumMode, GenPower, QlsDatum};
use hopfgamma::scalar::{CycloScalar, Rat};

fn conductors() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![1u32, 2, 3, 4, 6, 8, 12])
}

fn scalar_in(n: u32) -> impl Strategy<Value = CycloScalar> {
    (
        0..n as i64,
        -4i64..=4,
        1i64..=4,
        0..n as i64,
        -4i64..=4,
        1i64..=4,
    )
        .prop_map(move |(e1, p1, q1, e2, p2, q2)| {
            let t1 = CycloScalar::zeta_pow(n, e1).scale(&Rat::new(p1.into(), q1.into()));
            let t2 = CycloScalar::zeta_pow(n, e2).scale(&Rat::new(p2.into(), q2.into()));
            t1.add(&t2)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn scalar_field_axioms((_n, seeds) in conductors().prop_flat_map(|n| {
        (Just(n), (scalar_in(n), scalar_in(n), scalar_in(n)))
    })) {
        let (a, b, c) = seeds;
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn embed_restrict_round_trip(
        (n, m, a) in conductors().prop_flat_map(|n| {
            let multiples: Vec<u32> = (1..=3u32).map(|k| n * k).filter(|m| *m <= 24).collect();
            (Just(n), prop::sample::select(multiples), scalar_in(n))
        })
    ) {
        let up = a.embed(m).unwrap();
        prop_assert_eq!(up.restrict(n).unwrap(), a);
    }

    #[test]
    fn echelon_canonical_under_permutation(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..5),
        seed in any::<u64>(),
    ) {
        let to_vec = |r: &Vec<i64>| -> Vec<CycloScalar> {
            r.iter().map(|&v| CycloScalar::from_int(1, v)).collect()
        };
        let vs: Vec<Vec<CycloScalar>> = rows.iter().map(to_vec).collect();
        let a = Subspace::from_vectors(vs.clone(), 4, 1);
        let mut shuffled = vs;
        // cheap deterministic shuffle
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let b = Subspace::from_vectors(shuffled, 4, 1);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pbw_normalize_idempotent_and_multiplicative(
        letters in prop::collection::vec((0usize..2, -2i64..=2, prop::bool::ANY), 0..7),
        cut_frac in 0.0f64..1.0,
    ) {
        let d = QlsDatum::new(2, 4, vec![vec![1, 3], vec![1, 1]], DatumMode::Qls).unwrap();
        let kappa = d.character_from_ints(&[2, 3], &[1, 0]).unwrap();
        let word: Vec<GenPower> = letters
            .iter()
            .map(|&(i, e, is_x)| {
                if is_x {
                    GenPower::X(i, e.unsigned_abs() as u32 % 4)
                } else {
                    GenPower::G(i, e)
                }
            })
            .collect();
        let cut = ((word.len() as f64) * cut_frac) as usize;
        let (w1, w2) = word.split_at(cut.min(word.len()));
        let whole = d.pbw_normalize(&word, Some(&kappa)).unwrap();
        let (c1, m1) = d.pbw_normalize(w1, Some(&kappa)).unwrap();
        let (c2, m2) = d.pbw_normalize(w2, Some(&kappa)).unwrap();
        let (c3, m3) = d.mul_monomials(Some(&kappa), &m1, &m2).unwrap();
        let c = c1.mul(&c2).mul(&c3);
        if whole.0.is_zero() {
            prop_assert!(c.is_zero());
        } else {
            prop_assert_eq!(whole.clone(), (c, m3));
        }
        // normal forms are fixed points
        let (c4, m4) = d.mul_monomials(Some(&kappa), &d.unit_monomial(), &whole.1).unwrap();
        prop_assert!(c4.is_one());
        prop_assert_eq!(m4, whole.1);
    }
}
