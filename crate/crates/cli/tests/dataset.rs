use proptest::prelude::*;
use symstat_cli::dataset::{exact, Dataset};
use symstat_core::Scalar;

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..5, 0usize..12).prop_flat_map(|(cols, rows)| {
        let value = prop_oneof![
            (-1.0e6f64..1.0e6),
            (-1000i64..1000).prop_map(|k| k as f64 / 100.0),
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
        ];
        prop::collection::vec(prop::collection::vec(value, cols), rows).prop_map(move |rows| {
            let names = (0..cols).map(|j| format!("c{j}")).collect();
            Dataset::new(names, rows).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn csv_round_trip_is_exact(d in dataset()) {
        let mut buf = Vec::new();
        d.to_writer(&mut buf).unwrap();
        let back = Dataset::from_reader(buf.as_slice()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn exact_decimal_matches_the_float(v in -1.0e9f64..1.0e9) {
        prop_assert_eq!(f64::from_rational(&exact(v)), v);
    }
}

#[test]
fn file_round_trip_keeps_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("budworm.csv");
    let d = Dataset::budworm();
    d.to_path(&path).unwrap();
    let back = Dataset::from_path(&path).unwrap();
    assert_eq!(back.source(), Some(path.as_path()));
    assert_eq!(back.rows(), d.rows());
    assert_eq!(back.columns(), d.columns());
}
