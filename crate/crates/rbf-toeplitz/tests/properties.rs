//! Property-based invariants for the numerical kernels.

use num_complex::Complex64;
use proptest::prelude::*;

use rbf_toeplitz::kernels::RadialKernel;
use rbf_toeplitz::numkit::{ComplexBuffer, Direction};
use rbf_toeplitz::toeplitz::SymToeplitz;

fn buffer_strategy() -> impl Strategy<Value = Vec<f64>> {
    (0u32..=16).prop_flat_map(|log_len| {
        prop::collection::vec(-1e3f64..1e3, (1usize << log_len)..=(1usize << log_len))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn fft_preserves_energy(values in buffer_strategy()) {
        let time_energy: f64 = values.iter().map(|v| v * v).sum();
        let mut buf = ComplexBuffer::from_real(&values).unwrap();
        buf.transform(Direction::Forward);
        let freq_energy: f64 = buf.values().iter().map(|v| v.norm_sqr()).sum();
        let scaled = freq_energy / values.len() as f64;
        prop_assert!(
            (time_energy - scaled).abs() <= 1e-9 * (1.0 + time_energy),
            "time {time_energy} vs scaled frequency {scaled}"
        );
    }

    #[test]
    fn fft_round_trips(values in buffer_strategy()) {
        let mut buf = ComplexBuffer::from_real(&values).unwrap();
        buf.transform(Direction::Forward);
        buf.transform(Direction::Inverse);
        let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        for (orig, got) in values.iter().zip(buf.values()) {
            prop_assert!(
                (got - Complex64::new(*orig, 0.0)).norm() <= 1e-10 * scale,
                "{orig} became {got}"
            );
        }
    }

    #[test]
    fn toeplitz_matvec_is_symmetric(
        n in 1usize..=12,
        d in 1usize..=2,
        seed in 0u64..1u64 << 48,
        lambda in 0.2f64..3.0,
    ) {
        let kernel = RadialKernel::gaussian(lambda).unwrap();
        let op = SymToeplitz::from_kernel(&kernel, n, d).unwrap();
        let mut rng = rbf_toeplitz::numkit::Rng::new(seed);
        let x = rng.uniform_vector(op.len());
        let y = rng.uniform_vector(op.len());
        let ax = op.matvec(&x);
        let ay = op.matvec(&y);
        let xay: f64 = x.iter().zip(&ay).map(|(a, b)| a * b).sum();
        let yax: f64 = y.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let scale = xay.abs().max(yax.abs()).max(1.0);
        prop_assert!((xay - yax).abs() <= 1e-10 * scale, "x'Ay={xay} vs y'Ax={yax}");
    }
}
