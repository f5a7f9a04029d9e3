mod common;

use common::*;
use qleb::decomp::lebesgue_decompose;
use qleb::gaussian::GaussianSpec;
use qleb::io::*;
use qleb::linalg::DEFAULT_HERMITIAN_TOL;
use qleb::models::{random_psd_pair, RandomPsdPairSpec};
use qleb::Error;

#[test]
fn matrix_round_trip_is_exact() {
    let (rho, _) = random_psd_pair(&RandomPsdPairSpec::generic(4, 3, 2, 8)).unwrap();
    let json = to_json_string(&MatrixJson::from_matrix(rho.matrix())).unwrap();
    let back: MatrixJson = serde_json::from_str(&json).unwrap();
    assert_eq!(&back.to_matrix().unwrap().into_matrix(), rho.matrix());
}

#[test]
fn matrix_schema() {
    let m: MatrixJson = serde_json::from_str(r#"{"dim": 2, "entries": [[1,0],[0,-1],[0,1],[0,0]]}"#).unwrap();
    assert_eq!(m.to_matrix().unwrap().into_matrix(), mat(2, &[(1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]));
    let bad: MatrixJson = serde_json::from_str(r#"{"dim": 2, "entries": [[1,0]]}"#).unwrap();
    assert!(matches!(bad.to_matrix(), Err(Error::BadShape { .. })));
    let skew: MatrixJson = serde_json::from_str(r#"{"dim": 2, "entries": [[1,0],[1,0],[0,0],[1,0]]}"#).unwrap();
    assert!(matches!(skew.to_positive(DEFAULT_HERMITIAN_TOL, 1e-11), Err(Error::NotHermitianWithinTol { .. })));
    let negative: MatrixJson = serde_json::from_str(r#"{"dim": 1, "entries": [[-1,0]]}"#).unwrap();
    assert!(matches!(negative.to_positive(DEFAULT_HERMITIAN_TOL, 1e-11), Err(Error::NotPositive { .. })));
}

#[test]
fn output_is_deterministic_and_fixed_precision() {
    let (rho, sigma) = random_psd_pair(&RandomPsdPairSpec::generic(3, 2, 2, 4)).unwrap();
    let render = || to_json_string(&DecompositionJson::from(&lebesgue_decompose(&sigma, &rho).unwrap())).unwrap();
    let first = render();
    assert_eq!(first, render());
    assert!(first.ends_with('\n'));
    assert!(first.contains("\"route\":\"block\""));
    assert_eq!(to_json_string(&[0.1f64]).unwrap(), "[1.0000000000000001e-1]\n");
    let back: DecompositionJson = serde_json::from_str(&first).unwrap();
    assert_eq!(to_json_string(&back).unwrap(), first);
}

#[test]
fn gaussian_round_trip() {
    let spec = GaussianSpec::new(vec![0.3, -0.1], spin_j()).unwrap();
    let json = to_json_string(&GaussianJson::from(&spec)).unwrap();
    let back: GaussianJson = serde_json::from_str(&json).unwrap();
    assert_eq!(GaussianSpec::try_from(&back).unwrap(), spec);
    let mut wrong = back.clone();
    wrong.dim = 3;
    assert!(matches!(GaussianSpec::try_from(&wrong), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn csv_layout() {
    assert_eq!(
        convergence_csv(&[10, 100], &[0.5, 0.25]),
        "n,error\n10,5.0000000000000000e-1\n100,2.5000000000000000e-1\n"
    );
}

#[test]
fn atomic_write_replaces_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let value: Vec<u32> = {
        write_atomic(&path, b"[1, 2]").unwrap();
        read_json(&path).unwrap()
    };
    assert_eq!(value, vec![1, 2]);
    assert!(read_json::<Vec<u32>>(&dir.path().join("none.json")).is_err());
}
