use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tomolab_core::classical::{classical_oscillator_tomogram, radon_density, time_averaged_tomogram, ClassicalModel};
use tomolab_core::quantum::{cat_tomogram, coherent_tomogram, hermite_tomogram, state_tomogram, superposition_tomogram, Parity, StateSpec};
use tomolab_core::{GridFunction2D, TomographyFrame, UniformGrid};

fn frame() -> impl Strategy<Value = TomographyFrame> {
    (0.3f64..2.0, 0.0f64..2.0 * PI).prop_map(|(r, t)| TomographyFrame::new(r * t.cos(), r * t.sin()))
}

fn alpha() -> impl Strategy<Value = Complex64> {
    (0.0f64..1.5, 0.0f64..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// The closed-form tomograms of the oscillator family at one point.
fn closed_forms(f: TomographyFrame, x: f64, hbar: f64, a: Complex64, n: usize) -> [f64; 5] {
    [
        hermite_tomogram(n, f, x, hbar, 1.0).unwrap(),
        coherent_tomogram(a, f, x, hbar, 1.0).unwrap(),
        cat_tomogram(a, Parity::Even, f, x, hbar, 1.0).unwrap(),
        if a.norm() > 0.05 {
            cat_tomogram(a, Parity::Odd, f, x, hbar, 1.0).unwrap()
        } else {
            0.0
        },
        superposition_tomogram(n, n + 2, f, x, hbar, 1.0).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneous_of_degree_minus_one(
        f in frame(), x in -3.0f64..3.0, hbar in 0.2f64..2.0, a in alpha(), n in 0usize..6,
        lambda in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0],
    ) {
        let base = closed_forms(f, x, hbar, a, n);
        let scaled = closed_forms(f.scaled(lambda), lambda * x, hbar, a, n);
        for (b, s) in base.iter().zip(&scaled) {
            prop_assert!((s * lambda.abs() - b).abs() <= 1e-9 * b.abs() + 1e-13, "{b} vs {s}");
        }
    }

    #[test]
    fn closed_forms_are_nonnegative(f in frame(), x in -6.0f64..6.0, hbar in 0.1f64..2.0, a in alpha(), n in 0usize..10) {
        for v in closed_forms(f, x, hbar, a, n) {
            prop_assert!(v >= -1e-14, "{v}");
        }
    }

    #[test]
    fn closed_forms_are_normalized(f in frame(), hbar in 0.1f64..2.0, a in alpha(), n in 0usize..8) {
        let states = [
            StateSpec::ho(n, hbar).unwrap(),
            StateSpec::coherent(a, hbar).unwrap(),
            StateSpec::cat(a.scale(0.5) + 0.3, Parity::Odd, hbar).unwrap(),
            StateSpec::superposition(n, n + 1, hbar).unwrap(),
        ];
        for s in &states {
            let w = s.frame_window(f);
            let g = UniformGrid::with_max_step(w.lo, w.hi, w.max_panel / 8.0).unwrap();
            let t = state_tomogram(s, f, g).unwrap();
            prop_assert!((t.mass() - 1.0).abs() < 1e-6, "{}: {}", s.descriptor(), t.mass());
        }
    }

    #[test]
    fn radon_of_gaussian_is_normalized_and_homogeneous(f in frame(), lambda in 0.3f64..3.0) {
        let g = UniformGrid::symmetric(7.0, 141).unwrap();
        let density = GridFunction2D::from_fn(g, g, |q, p| (-0.5 * (q * q + p * p)).exp() / (2.0 * PI)).unwrap();
        let x = UniformGrid::symmetric(10.0, 201).unwrap();
        let t = radon_density(&density, f, x).unwrap();
        prop_assert!((t.mass() - 1.0).abs() < 1e-4, "{}", t.mass());
        // variance mu² + nu² of the projected unit Gaussian, up to the
        // interpolation error of the 0.1 density grid
        let s2 = f.mu * f.mu + f.nu * f.nu;
        let exact = |x: f64| (-0.5 * x * x / s2).exp() / (2.0 * PI * s2).sqrt();
        let ts = radon_density(&density, f.scaled(lambda), UniformGrid::symmetric(10.0 * lambda, 201).unwrap()).unwrap();
        let peak = exact(0.0);
        for (i, v) in ts.values().iter().enumerate() {
            let xi = x.point(i);
            prop_assert!((v * lambda - t.values()[i]).abs() < 1e-9 * peak, "{} {}", v * lambda - t.values()[i], peak);
            prop_assert!((t.values()[i] - exact(xi)).abs() < 5e-3 * peak, "{} {}", t.values()[i] - exact(xi), peak);
        }
    }
}

#[test]
fn oscillator_orbit_average_matches_arcsine_law() {
    let model = ClassicalModel::oscillator_trajectory(1.0).unwrap();
    let f = TomographyFrame::new(0.6, 0.8);
    let g = UniformGrid::symmetric(1.6, 321).unwrap();
    let t = time_averaged_tomogram(&model, f, g).unwrap();
    assert!((t.mass() - 1.0).abs() < 1e-3, "{}", t.mass());
    // the arcsine density is smooth well inside the turning points
    for (x, v) in g.points().into_iter().zip(t.values()) {
        if x.abs() < 1.0 {
            let exact = classical_oscillator_tomogram(x, f, 1.0).unwrap();
            assert!((v - exact).abs() < 2e-2 * exact, "X = {x}: {v} vs {exact}");
        }
    }
}
