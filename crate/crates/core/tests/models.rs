mod common;

use common::*;
use qleb::decomp::{is_mutually_ac, is_singular, lebesgue_decompose};
use qleb::io::MatrixJson;
use qleb::linalg::{c, CMat};
use qleb::models::*;
use qleb::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const THETAS: [[f64; 2]; 6] = [[0.0, 0.0], [0.3, 0.0], [0.2, 0.2], [-1.0, 0.5], [2.5, -3.0], [1e-4, 0.0]];

#[test]
fn pure_states_are_normalized_projectors() {
    assert_eq!(spin_pure_state(&[0.0, 0.0]).unwrap().matrix(), diag(&[1.0, 0.0]).matrix());
    for theta in THETAS {
        let rho = spin_pure_state(&theta).unwrap();
        assert!((rho.trace() - 1.0).abs() <= 1e-14);
        assert!(dist(&(rho.matrix() * rho.matrix()), rho.matrix()) <= 1e-14);
    }
}

#[test]
fn pure_states_tend_to_the_plus_state() {
    let rho = spin_pure_state(&[40.0, 0.0]).unwrap();
    assert!(dist(rho.matrix(), plus_state().matrix()) <= 1e-12);
    assert!(matches!(spin_pure_state(&[1e3, 0.0]), Err(Error::Overflow)));
}

#[test]
fn pure_model_is_mutually_ac_with_its_base_point() {
    let base = SpinPure.base_state().unwrap();
    for theta in &THETAS[1..] {
        assert!(is_mutually_ac(&spin_pure_state(theta).unwrap(), &base).unwrap().mutually_ac);
    }
}

#[test]
fn perturbed_states_decompose_as_constructed() {
    let base = SpinPerturbed::default().base_state().unwrap();
    assert_eq!(base.matrix(), diag(&[1.0, 0.0]).matrix());
    for f in [FRule::Quartic, FRule::Cubic, FRule::Quadratic] {
        for theta in &THETAS[1..5] {
            let rho = spin_perturbed_state(theta, &f).unwrap();
            assert!((rho.trace() - 1.0).abs() <= 1e-14);
            let w = (-f.eval(theta)).exp();
            let dec = lebesgue_decompose(&rho, &base).unwrap();
            let ac = spin_pure_state(theta).unwrap().matrix() * c(w, 0.0);
            assert!(dist(dec.sigma_ac.matrix(), &ac) <= 1e-10, "{f:?} {theta:?}");
            assert!(dist(dec.sigma_sing.matrix(), diag(&[0.0, 1.0 - w]).matrix()) <= 1e-10);
        }
    }
}

#[test]
fn weight_rules() {
    let theta = [0.3, 0.4];
    assert!((FRule::Quartic.eval(&theta) - 0.0625).abs() <= 1e-16);
    assert!((FRule::Cubic.eval(&theta) - 0.125).abs() <= 1e-16);
    assert!((FRule::Quadratic.eval(&theta) - 0.25).abs() <= 1e-16);
    let custom = FRule::custom("sixth", |t: &[f64]| t.iter().map(|x| x.powi(6)).sum());
    assert_eq!(custom.label(), "sixth");
    assert_eq!(SpinPerturbed::new(custom).name(), "spin-perturbed:sixth");
    for f in [FRule::Quartic, FRule::Cubic] {
        for r in [1e-2, 1e-3, 1e-4] {
            let t = [r, 0.0];
            assert!(f.eval(&t) > 0.0);
            assert!(f.eval(&t) / (r * r) <= r * (1.0 + 1e-12));
        }
    }
}

#[test]
fn full_rank_qubit() {
    let rho = QubitFullRank.state_at(&[0.4]).unwrap();
    assert_eq!(rho.matrix(), diag(&[0.7, 0.3]).matrix());
    assert!(matches!(QubitFullRank.state_at(&[1.5]), Err(Error::NotDensity(_))));
    assert!(matches!(QubitFullRank.state_at(&[0.1, 0.2]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn models_by_name() {
    for name in MODEL_NAMES {
        assert_eq!(model_by_name(name).unwrap().name(), name);
    }
    assert_eq!(model_by_name("spin-perturbed").unwrap().name(), "spin-perturbed:quartic");
    assert!(matches!(model_by_name("spin-mixed"), Err(Error::UnknownModel(_))));
}

#[test]
fn random_pairs_have_requested_ranks_and_are_deterministic() {
    for mode in [PairMode::Generic, PairMode::OrthogonalSupports, PairMode::NearSingularOverlap, PairMode::NearRankDeficient] {
        let spec = RandomPsdPairSpec::generic(5, 2, 3, 17).with_mode(mode);
        let (a, b) = random_psd_pair(&spec).unwrap();
        let (a2, b2) = random_psd_pair(&spec).unwrap();
        assert_eq!(a.matrix(), a2.matrix());
        assert_eq!(b.matrix(), b2.matrix());
        assert_eq!((a.rank(), b.rank()), (2, 3), "{mode:?}");
        assert!((a.trace() - 1.0).abs() <= 1e-14 && (b.trace() - 1.0).abs() <= 1e-14);
    }
    let (x, _) = random_psd_pair(&RandomPsdPairSpec::generic(4, 2, 2, 1)).unwrap();
    let (y, _) = random_psd_pair(&RandomPsdPairSpec::generic(4, 2, 2, 2)).unwrap();
    assert_ne!(x.matrix(), y.matrix());
}

#[test]
fn random_pair_modes() {
    let (a, b) = random_psd_pair(&RandomPsdPairSpec::generic(4, 4, 4, 3)).unwrap();
    assert!(is_mutually_ac(&a, &b).unwrap().mutually_ac);

    let (a, b) = random_psd_pair(&RandomPsdPairSpec::generic(2, 1, 1, 3).with_mode(PairMode::OrthogonalSupports)).unwrap();
    assert!(is_singular(&a, &b).unwrap().singular);

    let (a, b) = random_psd_pair(&RandomPsdPairSpec::generic(4, 2, 2, 3).with_mode(PairMode::NearSingularOverlap)).unwrap();
    let overlap = qleb::linalg::trace_product(a.matrix(), b.matrix()).re;
    assert!((overlap - 1e-9).abs() <= 1e-10, "overlap {overlap:e}");

    let (a, _) = random_psd_pair(&RandomPsdPairSpec::generic(4, 3, 2, 3).with_mode(PairMode::NearRankDeficient)).unwrap();
    assert!((a.spectrum().eigenvalues[2] - 1e-8).abs() <= 1e-12);
}

#[test]
fn invalid_ranks() {
    for (d, r, s, mode) in [(3, 0, 1, PairMode::Generic), (3, 4, 1, PairMode::Generic), (3, 2, 2, PairMode::OrthogonalSupports)] {
        assert!(matches!(
            random_psd_pair(&RandomPsdPairSpec::generic(d, r, s, 0).with_mode(mode)),
            Err(Error::InvalidRanks { .. })
        ));
    }
}

#[test]
fn haar_unitaries_and_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in 1..=6 {
        let u = random_unitary(d, &mut rng);
        assert!(dist(&(u.adjoint() * &u), &CMat::identity(d, d)) <= 1e-13);
        assert!((random_unit_vector(d, &mut rng).norm() - 1.0).abs() <= 1e-14);
    }
}

#[test]
fn pure_pairs() {
    let e1 = [c(1.0, 0.0), c(0.0, 0.0)];
    let e2 = [c(0.0, 0.0), c(1.0, 0.0)];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [c(s, 0.0), c(s, 0.0)];
    let (a, b) = pure_pair(&e1, &plus).unwrap();
    assert!(is_mutually_ac(&a, &b).unwrap().mutually_ac);
    let (a, b) = pure_pair(&e1, &e2).unwrap();
    assert!(is_singular(&a, &b).unwrap().singular);
    let (a, b) = pure_pair(&plus, &plus).unwrap();
    assert_eq!(a.matrix(), b.matrix());
    assert!(matches!(pure_pair(&e1, &[c(2.0, 0.0), c(0.0, 0.0)]), Err(Error::NotUnit { .. })));
    assert!(matches!(pure_pair(&e1, &[c(1.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
}

fn table(points: &[(f64, [f64; 2])]) -> TabulatedJson {
    TabulatedJson {
        name: Some("line".into()),
        dim: 2,
        theta_dim: 1,
        theta0: vec![0.0],
        points: points
            .iter()
            .map(|&(t, [a, b])| TabulatedPoint {
                theta: vec![t],
                state: MatrixJson::from_matrix(diag(&[a, b]).matrix()),
            })
            .collect(),
    }
}

#[test]
fn tabulated_lookup_is_exact() {
    let model = TabulatedModel::from_json(table(&[(0.0, [0.5, 0.5]), (0.1, [0.55, 0.45]), (-0.1, [0.45, 0.55])])).unwrap();
    assert_eq!(model.name(), "line");
    assert_eq!(model.state_at(&[0.1]).unwrap().matrix(), diag(&[0.55, 0.45]).matrix());
    assert!(model.state_at(&[0.1 + 1e-13]).is_ok());
    assert!(matches!(model.state_at(&[0.05]), Err(Error::ThetaNotOnGrid(_))));
}

#[test]
fn tabulated_validation() {
    assert!(matches!(TabulatedModel::from_json(table(&[(0.1, [0.5, 0.5])])), Err(Error::ThetaNotOnGrid(_))));
    assert!(matches!(TabulatedModel::from_json(table(&[(0.0, [0.5, 0.6])])), Err(Error::NotDensity(_))));
    let mut bad = table(&[(0.0, [0.5, 0.5])]);
    bad.dim = 3;
    assert!(matches!(TabulatedModel::from_json(bad), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn tabulated_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, serde_json::to_string(&table(&[(0.0, [1.0, 0.0])])).unwrap()).unwrap();
    let model = TabulatedModel::from_file(&path).unwrap();
    assert_eq!(model.base_state().unwrap().rank(), 1);
    assert!(TabulatedModel::from_file(&dir.path().join("missing.json")).is_err());
}
