use proptest::prelude::*;

use privsamp_core::asia::{all_no_probability, asia_table};
use privsamp_core::encode::{empirical_stats, one_hot_encode, BinaryEncoding, CategoricalTable};
use privsamp_core::DataMatrix;

fn table() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<usize>>)> {
    prop::collection::vec(1usize..5, 1..5).prop_flat_map(|vocab| {
        let row = vocab.iter().map(|&v| 0..v).collect::<Vec<_>>();
        (Just(vocab), prop::collection::vec(row, 1..40))
    })
}

fn build(rows: &[Vec<usize>]) -> CategoricalTable {
    let cols = (0..rows[0].len()).map(|i| format!("c{i}")).collect();
    let cells = rows.iter().map(|r| r.iter().map(|v| format!("v{v}")).collect()).collect();
    CategoricalTable::from_rows(cols, cells).unwrap()
}

proptest! {
    #[test]
    fn encoding_round_trips((_, rows) in table(), single in any::<bool>()) {
        let t = build(&rows);
        let binary = if single { BinaryEncoding::SingleCoordinate } else { BinaryEncoding::OneHot };
        let enc = one_hot_encode(&t, &[], binary).unwrap();
        let widths: usize = enc.blocks.iter().map(|b| b.width()).sum();
        prop_assert_eq!(widths, enc.data.dim());
        if !single {
            let vocab: usize = t.vocabularies().iter().map(|v| v.len()).sum();
            prop_assert_eq!(enc.data.dim(), vocab);
        }
        for (i, pt) in enc.data.points().iter().enumerate() {
            let labels: Vec<String> = (0..t.columns().len()).map(|c| t.label(i, c).to_string()).collect();
            prop_assert_eq!(enc.decode(pt).unwrap(), labels);
            if !single {
                for b in &enc.blocks {
                    let hot = pt.coords()[b.start..b.start + b.width()].iter().filter(|&&x| x == 1).count();
                    prop_assert_eq!(hot, 1);
                }
            }
        }
    }

    #[test]
    fn stats_ignore_row_order((_, rows) in table(), seed in any::<u64>()) {
        let enc = one_hot_encode(&build(&rows), &[], BinaryEncoding::OneHot).unwrap();
        let mut pts = enc.data.points().to_vec();
        let k = (seed as usize) % pts.len();
        pts.rotate_left(k);
        pts.reverse();
        let a = empirical_stats(&enc.data).unwrap();
        let b = empirical_stats(&DataMatrix::new(enc.data.dim(), pts).unwrap()).unwrap();
        prop_assert_eq!(&a, &b);
        let n = a.n as f64;
        prop_assert!(a.max_density >= 1.0 / n && a.max_density <= 1.0);
        prop_assert!(((a.max_density * n) - (a.max_density * n).round()).abs() < 1e-9);
    }
}

#[test]
fn asia_fixture_shape() {
    let t = asia_table(20000, 11).unwrap();
    assert!(t.vocabularies().iter().all(|v| v.len() == 2));
    let single = one_hot_encode(&t, &[], BinaryEncoding::SingleCoordinate).unwrap();
    let full = one_hot_encode(&t, &[], BinaryEncoding::OneHot).unwrap();
    assert_eq!((single.data.dim(), full.data.dim()), (8, 16));
    let s = empirical_stats(&single.data).unwrap();
    assert_eq!(s.n, 20000);
    assert!((s.max_density - 0.29).abs() <= 0.05);
    // the sample frequency of the all-"no" row is within 4 sigma of its probability
    let q = all_no_probability();
    assert!((s.max_density - q).abs() <= 4.0 * (q * (1.0 - q) / 20000.0).sqrt());
    assert_eq!(asia_table(50, 3).unwrap(), asia_table(50, 3).unwrap());
}
