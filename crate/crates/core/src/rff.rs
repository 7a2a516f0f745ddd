//! Random Fourier features: `f(x)_j = exp(i ω_jᵀx)` with `ω_j ~ N(0, σ⁻² I)`,
//! whose expected normalized inner product is the Gaussian kernel
//! `exp(-‖u - v‖² / (2σ²))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{derive_stream, gaussian_draw};
use crate::types::{check_example, FeatureMapSpec, MapParams};

pub const FREQUENCY_TAG: &str = "rff-freq";

#[derive(Clone, Debug)]
pub struct RffMap {
    spec: FeatureMapSpec,
    sigma: f64,
    /// m × n, row-major; row j is ω_j.
    omega: Vec<f64>,
    digest: u64,
}

impl RffMap {
    pub fn build(spec: &FeatureMapSpec) -> Result<Self> {
        let sigma = match spec.params {
            MapParams::Rff { sigma } => sigma,
            _ => return Err(Error::config("RFF map requires an RFF spec")),
        };
        spec.validate()?;
        let n = spec.n;
        let mut omega = Vec::with_capacity(spec.m * n);
        for j in 0..spec.m {
            let mut stream = derive_stream(spec.seed, FREQUENCY_TAG, j as u64);
            omega.extend(gaussian_draw(&mut stream, n).into_iter().map(|g| g / sigma));
        }
        Ok(RffMap {
            spec: spec.clone(),
            sigma,
            omega,
            digest: spec.digest(),
        })
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }

    pub fn frequency(&self, j: usize) -> &[f64] {
        &self.omega[j * self.spec.n..(j + 1) * self.spec.n]
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.omega
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.spec.m];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [Complex64]) -> Result<()> {
        check_example(x, self.spec.n)?;
        debug_assert_eq!(out.len(), self.spec.m);
        for (row, o) in self.omega.chunks_exact(self.spec.n).zip(out.iter_mut()) {
            let theta: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
            let (s, c) = theta.sin_cos();
            *o = Complex64::new(c, s);
        }
        Ok(())
    }
}

/// Gaussian kernel `exp(-‖u - v‖² / (2σ²))`, the expectation the RFF map targets.
pub fn gaussian_kernel(u: &[f64], v: &[f64], sigma: f64) -> f64 {
    let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn normalized_inner(fu: &[Complex64], fv: &[Complex64]) -> Complex64 {
        fu.iter().zip(fv).map(|(a, b)| a * b.conj()).sum::<Complex64>() / fu.len() as f64
    }

    #[test]
    fn rebuild_is_identical() {
        let spec = FeatureMapSpec::rff(2, 3, 1.0, 5);
        let a = RffMap::build(&spec).unwrap();
        let b = RffMap::build(&spec).unwrap();
        assert_eq!(a.frequencies(), b.frequencies());
    }

    #[test]
    fn doubling_sigma_halves_frequencies() {
        let a = RffMap::build(&FeatureMapSpec::rff(2, 3, 1.0, 5)).unwrap();
        let b = RffMap::build(&FeatureMapSpec::rff(2, 3, 2.0, 5)).unwrap();
        for (x, y) in a.frequencies().iter().zip(b.frequencies()) {
            assert_eq!(*y, x / 2.0);
        }
    }

    #[test]
    fn nonpositive_sigma_rejected() {
        assert!(matches!(
            RffMap::build(&FeatureMapSpec::rff(2, 3, 0.0, 5)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn frequency_marginals_are_standard_normal() {
        let map = RffMap::build(&FeatureMapSpec::rff(2, 100_000, 1.0, 17)).unwrap();
        let w = map.frequencies();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn zero_input_maps_to_ones() {
        let map = RffMap::build(&FeatureMapSpec::rff(3, 20, 0.7, 1)).unwrap();
        for c in map.eval(&[0.0; 3]).unwrap() {
            assert_eq!(c, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn unit_frequency_at_pi() {
        let mut map = RffMap::build(&FeatureMapSpec::rff(2, 2, 1.0, 1)).unwrap();
        map.omega[2] = 1.0;
        map.omega[3] = 0.0;
        let f = map.eval(&[PI, 5.0]).unwrap();
        assert!((f[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn components_have_unit_modulus() {
        let map = RffMap::build(&FeatureMapSpec::rff(4, 500, 0.3, 2)).unwrap();
        for c in map.eval(&[0.3, -2.0, 7.5, 1e3]).unwrap() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let map = RffMap::build(&FeatureMapSpec::rff(2, 4, 1.0, 1)).unwrap();
        assert!(matches!(map.eval(&[1.0]), Err(Error::Input(_))));
        assert!(matches!(map.eval(&[1.0, f64::INFINITY]), Err(Error::Input(_))));
    }

    #[test]
    fn kernel_estimate_within_monte_carlo_bound() {
        let m = 10_000;
        let sigma = 0.8;
        let map = RffMap::build(&FeatureMapSpec::rff(2, m, sigma, 99)).unwrap();
        let u = [0.2, -0.4];
        let v = [-0.5, 0.1];
        let est = normalized_inner(&map.eval(&u).unwrap(), &map.eval(&v).unwrap());
        let exact = gaussian_kernel(&u, &v, sigma);
        assert!((est.re - exact).abs() <= 5.0 / (m as f64).sqrt());
    }

    #[test]
    fn estimate_is_exactly_shift_invariant_and_hermitian() {
        let map = RffMap::build(&FeatureMapSpec::rff(2, 300, 0.5, 4)).unwrap();
        let u = [0.3, 0.1];
        let v = [-0.2, 0.6];
        let t = [0.25, -0.125];
        let shifted = |p: &[f64; 2]| [p[0] + t[0], p[1] + t[1]];
        let base = normalized_inner(&map.eval(&u).unwrap(), &map.eval(&v).unwrap());
        let moved = normalized_inner(
            &map.eval(&shifted(&u)).unwrap(),
            &map.eval(&shifted(&v)).unwrap(),
        );
        assert!((base - moved).norm() < 1e-12);
        let swapped = normalized_inner(&map.eval(&v).unwrap(), &map.eval(&u).unwrap());
        assert_eq!(base, swapped.conj());
    }
}
