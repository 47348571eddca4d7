use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sacs_core::pulses::{
    effective_two_photon_rabi, intensity_for_rabi, rabi_from_intensity, stark_shift_from_intensity,
    validate_table, MercuryData, PulseEnvelope, StarkContext, TwoPhotonContext,
};

#[test]
fn sine_squared_area_by_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let peak = rng.gen_range(0.1..100.0);
        let width = rng.gen_range(0.1..5.0);
        let p = PulseEnvelope::sine_squared(peak, width, rng.gen_range(-3.0..3.0)).unwrap();
        let (a, b) = p.support().unwrap();
        // Composite Simpson on the support.
        let n = 2000;
        let h = (b - a) / n as f64;
        let mut s = p.value(a) + p.value(b);
        for k in 1..n {
            s += p.value(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let quad = s * h / 3.0;
        let want = peak * PI * width / 2.0;
        assert!((quad / want - 1.0).abs() < 1e-10);
        assert!((p.area() / want - 1.0).abs() < 1e-12);
        assert_eq!(p.value(a - 1e-9), 0.0);
        assert_eq!(p.value(b + 1e-9), 0.0);
    }
}

#[test]
fn intensity_scalings() {
    let data = MercuryData::shipped();
    let (t1, t2) = data.driving_transitions().unwrap();
    let stark = StarkContext::mercury(&data, 1064.0).unwrap();
    let tp = TwoPhotonContext::mercury(&data, 313.0).unwrap();
    for i in [1.0e3, 2.5e5, 9.0e5, 1.6e7] {
        for t in [t1, t2] {
            let a = rabi_from_intensity(t, i).unwrap();
            let b = rabi_from_intensity(t, 4.0 * i).unwrap();
            assert!((b / a - 2.0).abs() < 1e-14);
            assert!((intensity_for_rabi(t, a).unwrap() / i - 1.0).abs() < 1e-12);
        }
        let s = stark_shift_from_intensity(&stark, i).unwrap();
        assert!((stark_shift_from_intensity(&stark, 3.0 * i).unwrap() / s - 3.0).abs() < 1e-14);
        let o = effective_two_photon_rabi(&tp, i).unwrap();
        assert!((effective_two_photon_rabi(&tp, 3.0 * i).unwrap() / o - 3.0).abs() < 1e-14);
    }
}

#[test]
fn mercury_operating_point() {
    let data = MercuryData::shipped();
    let (t1, t2) = data.driving_transitions().unwrap();
    let o1 = rabi_from_intensity(t1, 0.9e6).unwrap();
    let o2 = rabi_from_intensity(t2, 1.9e6).unwrap();
    assert!((o1 - 52.0).abs() < 2.0 && (o2 - 52.0).abs() < 2.0, "{o1} {o2}");
    let stark = StarkContext::mercury(&data, 1064.0).unwrap();
    let c = stark.coefficient().unwrap();
    assert!((c / -1885.0 - 1.0).abs() < 0.15, "{c}");
    let s = stark_shift_from_intensity(&stark, 16e6).unwrap();
    assert!((s - 30.0).abs() < 2.0, "{s}");
}

#[test]
fn table_rows_are_consistent() {
    let data = MercuryData::shipped();
    assert_eq!(data.checksum_ok, Some(true));
    let rows = validate_table(&data.records);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.within_tolerance && r.deviation.abs() < 0.02));
}

#[test]
fn corrupted_dipole_is_reported() {
    let text = sacs_core::pulses::SHIPPED_TABLE.replace("31.67", "35.00");
    let data = MercuryData::parse(&text).unwrap();
    assert_eq!(data.checksum_ok, Some(false));
    let bad: Vec<_> = validate_table(&data.records)
        .into_iter()
        .filter(|r| !r.within_tolerance)
        .collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].transition, "7^1S_0->6^1P_1");
}

#[test]
fn resonant_stark_wavelength_is_rejected() {
    let data = MercuryData::shipped();
    let err = StarkContext::mercury(&data, 1014.254).and_then(|c| c.coefficient()).unwrap_err();
    assert!(err.is_physics(), "{err}");
}
