use std::f64::consts::{FRAC_PI_2, PI, TAU};

use lorasf_core::geo::{build_geometry_matrix, GeoPoint, Sphere, EARTH_RADIUS_M};
use proptest::prelude::*;

/// Destination point on the sphere from `start` at `range` meters along
/// `bearing` (test helper, direct formula).
fn destination(start: GeoPoint, bearing: f64, range: f64) -> GeoPoint {
    let delta = range / EARTH_RADIUS_M;
    let (p1, l1) = (start.lat().to_radians(), start.lon().to_radians());
    let p2 = (p1.sin() * delta.cos() + p1.cos() * delta.sin() * bearing.cos()).asin();
    let l2 = l1 + (bearing.sin() * delta.sin() * p1.cos()).atan2(delta.cos() - p1.sin() * p2.sin());
    GeoPoint::new(p2.to_degrees(), l2.to_degrees()).unwrap()
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

proptest! {
    #[test]
    fn range_is_symmetric(
        lat1 in -89.0f64..89.0, lon1 in -179.0f64..179.0,
        lat2 in -89.0f64..89.0, lon2 in -179.0f64..179.0,
    ) {
        let s = Sphere::default();
        let a = GeoPoint::new(lat1, lon1).unwrap();
        let b = GeoPoint::new(lat2, lon2).unwrap();
        let (r_ab, b_ab) = s.range_bearing(a, b);
        let (r_ba, _) = s.range_bearing(b, a);
        prop_assert_eq!(r_ab, r_ba);
        prop_assert!(r_ab >= 0.0);
        prop_assert!((0.0..TAU).contains(&b_ab));
    }

    #[test]
    fn equatorial_bearings_are_opposite(lon1 in -170.0f64..170.0, dlon in 0.01f64..10.0) {
        let s = Sphere::default();
        let a = GeoPoint::new(0.0, lon1).unwrap();
        let b = GeoPoint::new(0.0, lon1 + dlon).unwrap();
        let (_, fwd) = s.range_bearing(a, b);
        let (_, back) = s.range_bearing(b, a);
        prop_assert!(angle_diff(fwd + PI, back) < 1e-9, "{} {}", fwd, back);
    }

    #[test]
    fn rows_are_unit_with_ones_column(
        lat in 30.0f64..40.0, lon in 120.0f64..130.0,
        bearings in proptest::collection::vec(0.0f64..TAU, 3..7),
        range in 10e3f64..900e3,
    ) {
        let rx = GeoPoint::new(lat, lon).unwrap();
        let stations: Vec<_> = bearings.iter().map(|&b| destination(rx, b, range)).collect();
        let g = build_geometry_matrix(&Sphere::default(), rx, &stations).unwrap();
        prop_assert_eq!(g.len(), stations.len());
        for row in g.rows() {
            prop_assert!((row[0].hypot(row[1]) - 1.0).abs() < 1e-12);
            prop_assert_eq!(row[2], 1.0);
        }
    }

    #[test]
    fn rotating_stations_rotates_rows(
        lat in 30.0f64..40.0, lon in 120.0f64..130.0,
        bearings in proptest::collection::vec(0.0f64..TAU, 3..6),
        range in 50e3f64..600e3,
        quarter_turns in 1usize..=2,
    ) {
        let phi = quarter_turns as f64 * FRAC_PI_2;
        let s = Sphere::default();
        let rx = GeoPoint::new(lat, lon).unwrap();
        let base: Vec<_> = bearings.iter().map(|&b| destination(rx, b, range)).collect();
        let turned: Vec<_> = bearings.iter().map(|&b| destination(rx, b + phi, range)).collect();
        let g = build_geometry_matrix(&s, rx, &base).unwrap();
        let h = build_geometry_matrix(&s, rx, &turned).unwrap();
        // bearings are clockwise, so (east, north) turns clockwise by phi
        let (sp, cp) = phi.sin_cos();
        for (a, b) in g.rows().iter().zip(h.rows()) {
            let east = a[0] * cp + a[1] * sp;
            let north = -a[0] * sp + a[1] * cp;
            prop_assert!((east - b[0]).abs() < 1e-9, "{:?} {:?}", a, b);
            prop_assert!((north - b[1]).abs() < 1e-9, "{:?} {:?}", a, b);
        }
    }
}
