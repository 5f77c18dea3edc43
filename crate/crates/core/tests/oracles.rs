use beamspec::coefficients::Function1D;
use beamspec::determinant::{FourthOrderOperator, OperatorDet};
use beamspec::oracle::galerkin_spectrum;
use beamspec::spectrum::{eigenvalues, SpectrumOptions};

fn spectrum(op: &FourthOrderOperator, n: usize) -> Vec<f64> {
    eigenvalues(
        &OperatorDet { op: op.clone() },
        &SpectrumOptions::for_operator(op),
        n,
    )
    .unwrap()
    .entries
    .iter()
    .map(|e| e.lambda.re)
    .collect()
}

#[test]
fn determinant_spectrum_matches_galerkin() {
    let op = FourthOrderOperator::new(
        Function1D::fourier(0.4, vec![0.7, -0.2], vec![0.3]),
        Function1D::fourier(-1.0, vec![2.0], vec![0.0, 1.5]),
    );
    let det = spectrum(&op, 8);
    let gal = galerkin_spectrum(&op, 80, 8).unwrap();
    for (n, (d, g)) in det.iter().zip(&gal).enumerate() {
        assert!((d - g).abs() < 1e-7 * d.abs(), "n = {}: {d} vs {g}", n + 1);
    }
}

#[test]
fn spectrum_with_negative_eigenvalue_matches_galerkin() {
    let op = FourthOrderOperator::new(
        Function1D::zero(),
        Function1D::fourier(-150.0, vec![20.0], vec![]),
    );
    let det = spectrum(&op, 5);
    let gal = galerkin_spectrum(&op, 64, 5).unwrap();
    assert!(det[0] < 0.0);
    for (d, g) in det.iter().zip(&gal) {
        assert!((d - g).abs() < 1e-7 * d.abs().max(1.0), "{d} vs {g}");
    }
}
