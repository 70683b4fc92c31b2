use drivosc::dynamics::ForceModel;
use drivosc::grid::UniformGrid;
use drivosc::states::InitialState;
use drivosc::tomography::{
    closed_form_tomogram, optical_tomogram, sample_slice, tomogram_evolve, AsOptical, Frame, OpticalAngle,
    StateTomogram, SymplecticFrame, SymplecticTomogram,
};
use proptest::prelude::*;

fn state() -> impl Strategy<Value = InitialState> {
    prop_oneof![
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x0, p0)| InitialState::Coherent { x0, p0 }),
        (0usize..=3).prop_map(|n| InitialState::Fock { n }),
    ]
}

fn frame() -> impl Strategy<Value = (f64, f64)> {
    (0.0..std::f64::consts::TAU, 0.5..1.5f64).prop_map(|(a, r)| (r * a.cos(), r * a.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slices_are_probability_densities(s in state(), (mu, nu) in frame(), f0 in -1.0..1.0f64, t in 0.0..6.0f64) {
        let grid = UniformGrid::new(-16.0, 16.0, 3201).unwrap();
        let f = Frame::Symplectic(SymplecticFrame::new(mu, nu).unwrap());
        let slice = closed_form_tomogram(&s, &ForceModel::Constant { f0 }, t, f, grid).unwrap();
        prop_assert!((slice.integral() - 1.0).abs() < 1e-6);
        prop_assert!(slice.min_density() >= 0.0);
    }

    #[test]
    fn evolved_tomograms_are_homogeneous(
        s in state(), (mu, nu) in frame(), x in -3.0..3.0f64, lambda in 0.2..4.0f64, t in 0.0..4.0f64,
    ) {
        let w = tomogram_evolve(StateTomogram::of(&s).unwrap(), &ForceModel::Constant { f0: 0.5 }, t).unwrap();
        let base = w.density(x, mu, nu);
        let scaled = w.density(lambda * x, lambda * mu, lambda * nu) * lambda;
        prop_assert!((scaled - base).abs() <= 1e-10 * base.max(1e-3));
    }

    #[test]
    fn optical_slices_are_symplectic_slices(s in state(), theta in -10.0..10.0f64) {
        let w = StateTomogram::of(&s).unwrap();
        let angle = OpticalAngle::new(theta).unwrap();
        let grid = UniformGrid::new(-6.0, 6.0, 121).unwrap();
        let a = optical_tomogram(&AsOptical(w), angle, grid).unwrap();
        let b = sample_slice(&w, Frame::Symplectic(angle.frame()), grid).unwrap();
        prop_assert!(a.sup_distance(&b).unwrap() <= 1e-12);
    }
}
