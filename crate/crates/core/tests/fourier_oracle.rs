mod common;

use std::f64::consts::TAU;

use common::{naive_dft2, random_field, relative_l2};
use holobgs::{amplitude, combine, dft2, idft2, phase, ComplexField};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn fast_transforms_match_direct_summation_16x16() {
    let f = random_field(16, 16, 0x5eed);
    let fwd = naive_dft2(16, 16, f.data(), -1.0);
    let inv = naive_dft2(16, 16, f.data(), 1.0);
    assert!(relative_l2(dft2(&f).data(), &fwd) < 1e-10);
    assert!(relative_l2(idft2(&f).data(), &inv) < 1e-10);
}

#[test]
fn fast_transforms_match_direct_summation_all_small_sizes() {
    for h in 2..=16 {
        for w in 2..=16 {
            let f = random_field(w, h, (w * 100 + h) as u64);
            let fwd = naive_dft2(w, h, f.data(), -1.0);
            let inv = naive_dft2(w, h, f.data(), 1.0);
            let e_fwd = relative_l2(dft2(&f).data(), &fwd);
            let e_inv = relative_l2(idft2(&f).data(), &inv);
            assert!(
                e_fwd < 1e-10 && e_inv < 1e-10,
                "{w}x{h}: {e_fwd:e} {e_inv:e}"
            );
        }
    }
}

#[test]
fn round_trip_on_large_and_odd_sizes() {
    for (i, (w, h)) in [(512, 512), (608, 684), (257, 96), (3, 2)]
        .into_iter()
        .enumerate()
    {
        let f = random_field(w, h, i as u64);
        let back = idft2(&dft2(&f));
        let err = relative_l2(back.data(), f.data());
        assert!(err < 1e-12, "{w}x{h}: {err:e}");
        let back = dft2(&idft2(&f));
        assert!(relative_l2(back.data(), f.data()) < 1e-12);
    }
}

#[test]
fn combine_inverts_amplitude_and_phase() {
    let mut state = 7u64;
    let mut next = || {
        // xorshift keeps this test independent of the rand crate
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let f = ComplexField::from_fn(8, 8, |_, _| {
        Complex64::from_polar(0.1 + next(), TAU * next())
    })
    .unwrap();
    let back = combine(&amplitude(&f), &phase(&f)).unwrap();
    for (a, b) in back.data().iter().zip(f.data()) {
        assert!((a - b).norm() < 1e-12);
    }
}

fn field_strategy(max: usize) -> impl Strategy<Value = ComplexField> {
    (2..=max, 2..=max).prop_flat_map(|(w, h)| {
        prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), w * h).prop_map(move |v| {
            ComplexField::new(
                w,
                h,
                v.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_holds(f in field_strategy(40)) {
        let e = f.energy();
        prop_assume!(e > 0.0);
        prop_assert!((dft2(&f).energy() - e).abs() <= 1e-10 * e);
        prop_assert!((idft2(&f).energy() - e).abs() <= 1e-10 * e);
    }

    #[test]
    fn round_trip_is_identity(f in field_strategy(40)) {
        prop_assume!(f.energy() > 0.0);
        prop_assert!(relative_l2(idft2(&dft2(&f)).data(), f.data()) < 1e-12);
    }

    #[test]
    fn phase_and_amplitude_ranges(f in field_strategy(12)) {
        prop_assert!(phase(&f).data().iter().all(|p| (0.0..TAU).contains(p)));
        prop_assert!(amplitude(&f).data().iter().all(|&a| a >= 0.0));
    }
}
