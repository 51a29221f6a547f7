use proptest::prelude::*;

use sumlevel::exact_kernel::{
    apply_code, cf_cylinder_interval, code_to_cylinder, cylinder_to_farey, cylinder_to_sb, sb_intervals, Alphabet,
    BinaryCode, CFWord, Fraction, Rational,
};
use sumlevel::sum_level::{
    complement_family, e_set_measure, e_set_threshold, enumerate_sum_level, lambda_compensated, lambda_exact,
};

fn unimodular(l: Fraction, r: Fraction) -> bool {
    r.num as i128 * l.den as i128 - l.num as i128 * r.den as i128 == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn coded_intervals_are_unimodular(letters in prop::collection::vec(any::<bool>(), 1..=24), sb in any::<bool>()) {
        let alphabet = if sb { Alphabet::SternBrocot } else { Alphabet::Farey };
        let iv = apply_code(&BinaryCode::new(alphabet, letters.clone()).unwrap()).unwrap();
        prop_assert!(iv.left.to_rational() < iv.right.to_rational());
        prop_assert!(iv.right.num <= iv.right.den);
        prop_assert!(unimodular(iv.left, iv.right));
        let d = Rational::new(1, iv.left.den as u128 * iv.right.den as u128).unwrap();
        prop_assert_eq!(iv.diameter(), d);
        prop_assert_eq!(iv.level as usize, letters.len());
    }

    #[test]
    fn dictionaries_round_trip(digits in prop::collection::vec(1u64..5, 1..6)) {
        let word = CFWord::new(digits).unwrap();
        prop_assume!(word.digit_sum() <= 12);
        let cyl = cf_cylinder_interval(&word).unwrap();
        let farey = cylinder_to_farey(&word).unwrap();
        let sb = cylinder_to_sb(&word).unwrap();
        prop_assert!(apply_code(&farey).unwrap().same_span(&cyl));
        prop_assert!(apply_code(&sb).unwrap().same_span(&cyl));
        prop_assert_eq!(farey.len() as u128, word.digit_sum());
        prop_assert_eq!(code_to_cylinder(&farey).unwrap(), word);
    }

    #[test]
    fn measure_values_are_consistent(n in 1u32..=18) {
        let v = lambda_exact(n).unwrap();
        let exact = v.exact.clone().unwrap();
        let x = exact.to_f64();
        prop_assert!(x > 0.0 && x < 1.0);
        prop_assert!((v.approx - x).abs() <= x * 2f64.powi(-50));
        prop_assert!((lambda_compensated(n).unwrap().approx - x).abs() <= x * 1e-14);
        let comp = complement_family(n).unwrap().measure();
        prop_assert_eq!(exact + comp, Rational::one());
    }

    #[test]
    fn e_set_sandwich(n in 2u32..=14, eps in 0.05f64..2.5) {
        let ell = e_set_threshold(n, eps).unwrap();
        let c = lambda_exact(n).unwrap().exact.unwrap();
        let e = e_set_measure(n, eps).unwrap().exact.unwrap();
        let l = Rational::from_integer(ell);
        prop_assert!(c.clone() / l.clone() <= e);
        prop_assert!(e <= Rational::from_integer(2) * c / l);
    }
}

#[test]
fn sum_level_family_shape() {
    for n in 2..=14 {
        let fam = enumerate_sum_level(n).unwrap();
        assert_eq!(fam.len(), 1 << (n - 1));
        assert_eq!(fam.merged_pairs().unwrap().len(), 1 << (n - 2));
        for w in fam.members.windows(2) {
            assert!(w[0].right.to_rational() <= w[1].left.to_rational());
        }
        assert!(fam.members.iter().all(|iv| unimodular(iv.left, iv.right)));
    }
}

#[test]
fn sb_levels_tile_the_unit_interval() {
    for n in 0..=12 {
        let ivs = sb_intervals(n).unwrap();
        assert_eq!(ivs.len(), 1 << n);
        assert_eq!(ivs[0].left, Fraction::new(0, 1).unwrap());
        assert_eq!(ivs.last().unwrap().right, Fraction::new(1, 1).unwrap());
        for w in ivs.windows(2) {
            assert_eq!(w[0].right, w[1].left);
        }
    }
}
