use lorasf_core::signal::{field_strength, range_sigma, LinkBudget, PropagationParams, TransmitterSpec};
use lorasf_core::{measurement_model, GeoPoint, Sphere};
use proptest::prelude::*;

proptest! {
    #[test]
    fn field_strictly_decreasing(
        power in 1.0f64..500.0,
        d in 1_000.0f64..2_000_000.0,
        extra in 1.0f64..100_000.0,
        alpha in 0.0f64..0.05,
    ) {
        let prop = PropagationParams { alpha_db_per_km: alpha, ..Default::default() };
        prop_assert!(field_strength(power, d + extra, &prop) < field_strength(power, d, &prop));
    }

    #[test]
    fn sigma_non_increasing_in_snr(jitter in 0.0f64..10.0, snr in -40.0f64..60.0, up in 0.0f64..20.0, sigma0 in 0.1f64..100.0) {
        prop_assert!(range_sigma(jitter, snr + up, sigma0) <= range_sigma(jitter, snr, sigma0));
    }

    #[test]
    fn weights_consistent_and_threshold_inclusive(
        lat in 33.0f64..39.0, lon in 124.0f64..131.0,
        threshold in -30.0f64..10.0,
    ) {
        let sphere = Sphere::default();
        let at = |a, b| GeoPoint::new(a, b).unwrap();
        let network = vec![
            TransmitterSpec::new("Pohang", at(36.18, 129.34), 150.0, 2.11).unwrap(),
            TransmitterSpec::new("Gwangju", at(35.04, 126.54), 50.0, 3.21).unwrap(),
            TransmitterSpec::new("Socheong", at(37.76, 124.74), 8.0, 2.11).unwrap(),
        ];
        let link = LinkBudget { snr_threshold_db: threshold, ..Default::default() };
        let mm = measurement_model(&sphere, &network, at(lat, lon), &link);
        prop_assert_eq!(mm.stations.len(), 3);
        for (m, tx) in mm.stations.iter().zip(&network) {
            prop_assert_eq!(m.is_usable(), m.snr_db >= threshold);
            if let Some(u) = m.usable {
                prop_assert!((u.weight * u.sigma_m * u.sigma_m - 1.0).abs() < 1e-12);
                prop_assert!(u.sigma_m >= tx.jitter_m());
            }
        }
    }
}

#[test]
fn just_below_threshold_is_unusable() {
    // field 55 dBuV/m against 70 dBuV/m noise is exactly -15 dB
    let sphere = Sphere::default();
    let rx = GeoPoint::new(36.0, 127.0).unwrap();
    let tx = TransmitterSpec::new("A", GeoPoint::new(36.5, 127.5).unwrap(), 10.0, 2.0).unwrap();
    let mut link = LinkBudget::default();
    let snr = link.measure(&sphere, &tx, rx).snr_db;
    link.snr_threshold_db = snr + 0.0001;
    assert!(!link.measure(&sphere, &tx, rx).is_usable());
    link.snr_threshold_db = snr;
    assert!(link.measure(&sphere, &tx, rx).is_usable());
}
