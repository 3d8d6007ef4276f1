//! Piecewise-constant media: cached speeds, critical angles and nesting.

use proptest::prelude::*;

use thermotomo::medium::{critical_angle, interface_gamma};
use thermotomo::{Grid, Layer, Medium};

fn layers() -> impl Strategy<Value = Vec<Layer>> {
    prop::collection::vec((0.1f64..0.9, 0.2f64..3.0), 1..4).prop_filter_map("distinct radii and speeds", |raw| {
        let mut radii: Vec<f64> = raw.iter().map(|r| r.0).collect();
        radii.sort_by(|a, b| b.total_cmp(a));
        let mut out = Vec::new();
        let mut outer = 1.0;
        for (r, (_, c)) in radii.into_iter().zip(raw) {
            if (c - outer).abs() < 1e-3 || out.last().is_some_and(|l: &Layer| l.radius - r < 0.05) {
                return None;
            }
            out.push(Layer { radius: r, speed: c });
            outer = c;
        }
        Some(out)
    })
}

fn grid() -> Grid {
    Grid::new(81, 81, 0.025, -1.0, -1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cached_speeds_match_exact_values_away_from_interfaces(ls in layers()) {
        let m = Medium::new(grid(), &ls).unwrap();
        let g = *m.grid();
        for k in 0..g.len() {
            let (x, y) = g.coord_of(k);
            let r = x.hypot(y);
            if ls.iter().all(|l| (r - l.radius).abs() > g.h) {
                prop_assert_eq!(m.speed_at(x, y).unwrap(), m.c_field()[k]);
            }
        }
    }

    #[test]
    fn critical_angles_satisfy_snell(ls in layers()) {
        let m = Medium::new(grid(), &ls).unwrap();
        for f in m.interfaces() {
            match critical_angle(f) {
                Some(a0) => {
                    prop_assert!(f.c_int < f.c_ext);
                    prop_assert!((a0.sin() * f.c_ext - f.c_int).abs() <= 1e-15);
                }
                None => prop_assert!(f.c_int > f.c_ext),
            }
            prop_assert!((interface_gamma(f) - f.c_int / f.c_ext).abs() <= 1e-15);
        }
    }

    #[test]
    fn speed_is_constant_on_each_annulus(ls in layers(), t in 0.05f64..0.95, phi in 0.0f64..6.3, psi in 0.0f64..6.3) {
        let m = Medium::new(grid(), &ls).unwrap();
        let mut bounds: Vec<f64> = vec![1.0];
        bounds.extend(ls.iter().map(|l| l.radius));
        bounds.push(0.0);
        for w in bounds.windows(2) {
            let r = w[1] + t * (w[0] - w[1]);
            let a = m.speed_at(r * phi.cos(), r * phi.sin()).unwrap();
            let b = m.speed_at(r * psi.cos(), r * psi.sin()).unwrap();
            let r2 = w[1] + (1.0 - t) * (w[0] - w[1]);
            let c = m.speed_at(r2 * psi.cos(), r2 * psi.sin()).unwrap();
            prop_assert_eq!(a, b);
            prop_assert_eq!(a, c);
        }
    }
}

#[test]
fn example_two_profile() {
    let m = Medium::new(grid(), &[Layer { radius: 0.8, speed: 2.0 }, Layer { radius: 0.5, speed: 1.0 }]).unwrap();
    assert_eq!(m.speed_at(0.0, 0.0).unwrap(), 1.0);
    assert_eq!(m.speed_at(0.6, 0.2).unwrap(), 2.0);
    assert_eq!(m.speed_at(0.9, 0.0).unwrap(), 1.0);
    assert_eq!(m.c_max(), 2.0);
    // Inner circle: slow inside fast, critical angle arcsin(1/2).
    let inner = m.interfaces()[1];
    assert!((critical_angle(&inner).unwrap() - std::f64::consts::FRAC_PI_6).abs() < 1e-15);
    assert!(m.speed_at(1.5, 0.0).is_err());
}
