//! Properties of the Dirichlet projection, harmonic extension and discrete
//! operators on random fields and regions.

use proptest::prelude::*;

use thermotomo::grid_field::{
    dirichlet_energy, harmonic_extension, laplacian_into, make_phantom, project_hd, stencil_residual_max, Bump,
    PhantomKind, DEFAULT_HARMONIC_TOL,
};
use thermotomo::{Grid, Region, ScalarField};

const TOL: f64 = DEFAULT_HARMONIC_TOL;

#[derive(Debug, Clone)]
enum Shape {
    Rect(usize, usize, usize, usize),
    Disk(f64, f64, f64),
}

fn region(n: usize, shape: &Shape) -> Region {
    let g = Grid::new(n, n, 1.0 / (n - 1) as f64, 0.0, 0.0).unwrap();
    match *shape {
        Shape::Rect(a, b, c, d) => Region::rectangle(g, a, n - 1 - b, c, n - 1 - d).unwrap(),
        Shape::Disk(cx, cy, r) => Region::disk(g, cx, cy, r).unwrap(),
    }
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (1usize..4, 1usize..4, 1usize..4, 1usize..4).prop_map(|(a, b, c, d)| Shape::Rect(a, b, c, d)),
        (0.45f64..0.55, 0.45f64..0.55, 0.2f64..0.3).prop_map(|(x, y, r)| Shape::Disk(x, y, r)),
    ]
}

fn case() -> impl Strategy<Value = (usize, Shape, Vec<f64>)> {
    (9usize..33, shape()).prop_flat_map(|(n, s)| (Just(n), Just(s), prop::collection::vec(-1.0f64..1.0, n * n)))
}

fn field(r: &Region, data: Vec<f64>) -> ScalarField {
    ScalarField::from_vec(*r.grid(), data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_pythagorean((n, s, data) in case()) {
        let r = region(n, &s);
        let f = field(&r, data);
        let phi = harmonic_extension(&r.trace(&f).unwrap(), &r, TOL).unwrap();
        let p = project_hd(&f, &r, TOL).unwrap();
        let es = dirichlet_energy(&f, &r).unwrap();
        let ep = dirichlet_energy(&p, &r).unwrap();
        let ephi = dirichlet_energy(&phi, &r).unwrap();
        prop_assert!((es - ep - ephi).abs() <= 10.0 * TOL * es);
        prop_assert!(ep <= es * (1.0 + 10.0 * TOL));
    }

    #[test]
    fn projection_is_idempotent((n, s, data) in case()) {
        let r = region(n, &s);
        let p = project_hd(&field(&r, data), &r, TOL).unwrap();
        let pp = project_hd(&p, &r, TOL).unwrap();
        let diff = pp.sub(&p).unwrap().max_abs();
        prop_assert!(diff <= TOL * p.max_abs().max(1.0));
    }

    #[test]
    fn harmonic_extension_obeys_maximum_principle((n, s, data) in case()) {
        let r = region(n, &s);
        let bv = r.trace(&field(&r, data)).unwrap();
        let phi = harmonic_extension(&bv, &r, TOL).unwrap();
        let lo = bv.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = bv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slack = TOL * lo.abs().max(hi.abs()).max(1.0);
        for &k in r.interior() {
            let v = phi.data()[k];
            prop_assert!(v >= lo - slack && v <= hi + slack);
        }
        prop_assert!(stencil_residual_max(&phi, &r).unwrap() <= TOL * lo.abs().max(hi.abs()).max(1.0));
    }

    #[test]
    fn operations_are_linear((n, s, a) in case(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0, seed in 0u64..1000) {
        let r = region(n, &s);
        let b: Vec<f64> = (0..n * n).map(|k| ((k as u64 * 2654435761 + seed) % 1000) as f64 / 500.0 - 1.0).collect();
        let (fa, fb) = (field(&r, a), field(&r, b));
        let comb = fa.lin_comb(alpha, &fb, beta).unwrap();

        let pa = project_hd(&fa, &r, 1e-13).unwrap();
        let pb = project_hd(&fb, &r, 1e-13).unwrap();
        let pc = project_hd(&comb, &r, 1e-13).unwrap();
        let expect = pa.lin_comb(alpha, &pb, beta).unwrap();
        let scale = 1.0 + alpha.abs() + beta.abs();
        prop_assert!(pc.sub(&expect).unwrap().max_abs() <= 1e-10 * scale);

        let lap = |f: &ScalarField| {
            let mut out = vec![0.0; n * n];
            laplacian_into(f.data(), n, n, None, &mut out);
            out
        };
        let (la, lb, lc) = (lap(&fa), lap(&fb), lap(&comb));
        for k in 0..n * n {
            prop_assert!((lc[k] - alpha * la[k] - beta * lb[k]).abs() <= 1e-12 * scale * 8.0);
        }
    }

    #[test]
    fn dirichlet_energy_is_quadratic((n, s, data) in case(), t in -4.0f64..4.0) {
        let r = region(n, &s);
        let f = field(&r, data);
        let e = dirichlet_energy(&f, &r).unwrap();
        let et = dirichlet_energy(&f.scaled(t), &r).unwrap();
        prop_assert!((et - t * t * e).abs() <= 1e-12 * (1.0 + t * t) * e.max(1.0));
    }

    #[test]
    fn phantoms_vanish_off_the_support_interior(x in 0.4f64..0.6, y in 0.4f64..0.6, sigma in 0.02f64..0.08) {
        let r = region(41, &Shape::Disk(0.5, 0.5, 0.4));
        let f = make_phantom(&PhantomKind::GaussianBump(Bump { x, y, sigma }), *r.grid(), &r).unwrap();
        let interior: std::collections::HashSet<usize> = r.interior().iter().copied().collect();
        for (k, &v) in f.data().iter().enumerate() {
            prop_assert!(v >= 0.0 && v <= 1.0 + 1e-15);
            if !interior.contains(&k) {
                prop_assert_eq!(v, 0.0);
            }
        }
    }
}

#[test]
fn harmonic_extension_reproduces_a_bilinear_function() {
    // x y is discretely harmonic for the 5-point stencil.
    let r = region(25, &Shape::Rect(1, 1, 1, 1));
    let g = *r.grid();
    let exact = ScalarField::from_fn(g, |x, y| 3.0 * x * y - x + 2.0);
    let phi = harmonic_extension(&r.trace(&exact).unwrap(), &r, 1e-13).unwrap();
    for &k in r.interior() {
        assert!((phi.data()[k] - exact.data()[k]).abs() < 1e-11);
    }
}

#[test]
fn dirichlet_energy_of_a_linear_ramp() {
    // f = x on the nodes of [0, 1]^2 with all edges touching the interior:
    // horizontal edges contribute h^2 each, vertical edges nothing.
    let n = 11;
    let r = region(n, &Shape::Rect(1, 1, 1, 1));
    let g = *r.grid();
    let f = ScalarField::from_fn(g, |x, _| x);
    // Interior rows are j = 2..=n-3, each with n-3 horizontal edges touching
    // an interior node. Edges along the boundary rows join two boundary nodes
    // and are excluded; vertical differences vanish.
    let interior_rows = n - 4;
    let edges_per_row = n - 3;
    let expected = (interior_rows * edges_per_row) as f64 * g.h * g.h;
    assert!((dirichlet_energy(&f, &r).unwrap() - expected).abs() < 1e-14);
}
