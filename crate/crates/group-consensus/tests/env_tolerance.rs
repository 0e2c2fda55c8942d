//! The GCL_TOL_ZERO override, isolated in its own binary because env vars
//! are process-global.

use nalgebra::DMatrix;

use group_consensus::spectral;

#[test]
fn env_var_overrides_zero_tolerance() {
    // A Laplacian-like matrix with a small but genuine eigenvalue at 1e-4.
    let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, -1e-4, 1e-4]);

    let spec = spectral::eigenvalues(&m).unwrap();
    assert_eq!(spec.zero_eig_count(), 1, "default tolerance keeps 1e-4 nonzero");

    std::env::set_var("GCL_TOL_ZERO", "1e-2");
    let wide = spectral::eigenvalues(&m).unwrap();
    assert_eq!(wide.zero_tolerance(), 1e-2);
    assert_eq!(wide.zero_eig_count(), 2, "override swallows the 1e-4 mode");

    std::env::set_var("GCL_TOL_ZERO", "not-a-number");
    let fallback = spectral::eigenvalues(&m).unwrap();
    assert_eq!(fallback.zero_eig_count(), 1, "garbage override is ignored");

    std::env::remove_var("GCL_TOL_ZERO");
    let back = spectral::eigenvalues(&m).unwrap();
    assert_eq!(back.zero_eig_count(), 1);
}
