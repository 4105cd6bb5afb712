use heyde::counterexample::{find_psd_pair, DEFAULT_ALPHA};
use heyde::dual::{DualDomain, DualTable};
use heyde::endo::{all_automorphisms, Endo};
use heyde::group::{DualElement, GroupSpec};
use heyde::heyde::{brute_force_conditional_symmetry, charfn_table, check_symmetry_charfn, iterated_difference, FINITE_TOL};
use heyde::measure::FiniteMeasure;
use heyde::torus::{gaussian_charfn, quadratic_form, GaussianParams, TorusCharFn};
use heyde::{ExactMeasure, Measure};
use num_complex::Complex64;
use proptest::prelude::*;

const GROUPS: [&[u64]; 6] = [&[3], &[4], &[5], &[2, 2], &[6], &[7]];

fn finite_case() -> impl Strategy<Value = (GroupSpec, Vec<u64>, Vec<u64>)> {
    (0..GROUPS.len()).prop_flat_map(|i| {
        let spec = GroupSpec::finite(GROUPS[i]).unwrap();
        let n = spec.order().unwrap() as usize;
        let w = proptest::collection::vec(0u64..4, n).prop_filter("nonzero", |w| w.iter().any(|&x| x > 0));
        (Just(spec), w.clone(), w)
    })
}

fn psd2() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..0.2).prop_map(|(a, b, c, d, e)| {
        vec![vec![a * a + b * b + e, a * c + b * d], vec![a * c + b * d, c * c + d * d + e]]
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn convolution_multiplies_charfns((spec, w1, w2) in finite_case()) {
        let mu = Measure::from_weights(&spec, &w1).unwrap();
        let nu = Measure::from_weights(&spec, &w2).unwrap();
        let (a, b, c) = (mu.charfn_table(), nu.charfn_table(), mu.convolve(&nu).unwrap().charfn_table());
        for i in 0..a.len() {
            prop_assert!(close(c[i], a[i] * b[i], 1e-12));
        }
    }

    #[test]
    fn pushforward_is_composition_with_adjoint((spec, w, _) in finite_case(), pick in any::<prop::sample::Index>()) {
        let mu = Measure::from_weights(&spec, &w).unwrap();
        let autos = all_automorphisms(&spec).unwrap();
        let alpha = &autos[pick.index(autos.len())];
        let pushed = mu.pushforward(alpha).unwrap();
        let adj = alpha.adjoint();
        let g = mu.group().clone();
        for y in g.elements() {
            let lhs = pushed.charfn(&DualElement(y.clone()));
            let rhs = mu.charfn(&DualElement(g.reduce(&adj.apply(&y))));
            prop_assert!(close(lhs, rhs, 1e-12));
        }
    }

    #[test]
    fn reflect_conjugates_and_is_involutive((spec, w, _) in finite_case()) {
        let mu = Measure::from_weights(&spec, &w).unwrap();
        let r = mu.reflect();
        prop_assert_eq!(r.reflect(), mu.clone());
        for (a, b) in mu.charfn_table().iter().zip(r.charfn_table()) {
            prop_assert!(close(a.conj(), b, 1e-12));
        }
    }

    #[test]
    fn brute_force_and_charfn_agree((spec, w1, w2) in finite_case(), pick in any::<prop::sample::Index>()) {
        let autos = all_automorphisms(&spec).unwrap();
        let alpha = &autos[pick.index(autos.len())];
        let mu1 = ExactMeasure::from_weights(&spec, &w1).unwrap();
        let mu2 = ExactMeasure::from_weights(&spec, &w2).unwrap();
        let brute = brute_force_conditional_symmetry(&mu1, &mu2, alpha, 0.0).unwrap();
        let dom = DualDomain::Finite(mu1.group().clone());
        let cf = check_symmetry_charfn(&charfn_table(&mu1), &charfn_table(&mu2), alpha, &dom, FINITE_TOL).unwrap();
        prop_assert_eq!(brute.verdict, cf.verdict);
    }

    #[test]
    fn symmetry_survives_compatible_shifts(
        (spec, w1, w2) in finite_case(),
        pick in any::<prop::sample::Index>(),
        x in any::<prop::sample::Index>(),
    ) {
        let autos = all_automorphisms(&spec).unwrap();
        let alpha = &autos[pick.index(autos.len())];
        let mu1 = ExactMeasure::from_weights(&spec, &w1).unwrap();
        let mu2 = ExactMeasure::from_weights(&spec, &w2).unwrap();
        let g = mu1.group().clone();
        let x = g.element(x.index(g.order()));
        let minus_ax: Vec<i64> = g.reduce(&alpha.apply(&x).iter().map(|c| -c).collect::<Vec<_>>());
        let before = brute_force_conditional_symmetry(&mu1, &mu2, alpha, 0.0).unwrap();
        let after = brute_force_conditional_symmetry(
            &mu1.shift(&minus_ax).unwrap(),
            &mu2.shift(&x).unwrap(),
            alpha,
            0.0,
        ).unwrap();
        prop_assert_eq!(before.verdict, after.verdict);
    }

    #[test]
    fn gaussian_parallelogram_identity(a in psd2(), s in proptest::array::uniform2(0.0f64..1.0)) {
        let g = GaussianParams::new(a, Some(s.to_vec())).unwrap();
        let psi = |y: [i64; 2]| -gaussian_charfn(&g, &y).norm().ln();
        let pts: Vec<[i64; 2]> = (-4..=4).flat_map(|i| (-4..=4).map(move |j| [i, j])).collect();
        for &u in &pts {
            for &v in &pts {
                let r = psi([u[0] + v[0], u[1] + v[1]]) + psi([u[0] - v[0], u[1] - v[1]]) - 2.0 * psi(u) - 2.0 * psi(v);
                prop_assert!(r.abs() < 1e-12, "{:?} {:?} {}", u, v, r);
            }
        }
    }

    #[test]
    fn third_differences_of_quadratics_vanish(
        a in psd2(),
        y in proptest::array::uniform2(-3i64..=3),
        h in proptest::array::uniform3(proptest::array::uniform2(-3i64..=3)),
    ) {
        let t = DualTable::tabulate(DualDomain::Window { dim: 2, radius: 12 }, |p| Some(quadratic_form(&a, p)));
        let d = iterated_difference(&t, &y, &[&h[0], &h[1], &h[2]]).unwrap();
        prop_assert!(d.abs() < 1e-10, "{}", d);
    }

    #[test]
    fn torus_convolution_and_pushforward(a in psd2(), b in psd2()) {
        let f = GaussianParams::new(a, None).unwrap().to_charfn(6).unwrap();
        let g = GaussianParams::new(b, Some(vec![0.1, 0.4])).unwrap().to_charfn(6).unwrap();
        let fg = f.convolve(&g).unwrap();
        for (y, c) in fg.iter() {
            prop_assert!(close(c, f.get(&y).unwrap() * g.get(&y).unwrap(), 1e-15));
        }
        let spec = GroupSpec::torus(2).unwrap();
        let alpha = Endo::from_rows(&spec, vec![vec![2, 1], vec![1, 1]]).unwrap();
        let pushed = f.pushforward(&alpha, 2).unwrap();
        let adj = alpha.adjoint();
        for (y, c) in pushed.iter() {
            prop_assert!(close(c, f.get(&adj.apply(&y)).unwrap(), 1e-15));
        }
        let r = g.reflect();
        for (y, c) in g.iter() {
            let neg: Vec<i64> = y.iter().map(|v| -v).collect();
            prop_assert!(close(r.get(&neg).unwrap(), c, 1e-15));
        }
    }

    #[test]
    fn torus_density_integrates_to_one(a in psd2(), s in proptest::array::uniform2(0.0f64..1.0)) {
        let f = GaussianParams::new(a, Some(s.to_vec())).unwrap().to_charfn(5).unwrap();
        let grid = f.density_on_grid(16).unwrap();
        prop_assert!((grid.integral - 1.0).abs() < 1e-12);
        prop_assert!(grid.max_imag < 1e-9);
    }

    #[test]
    fn scaled_quadratic_pairs_solve_the_symmetry_equation(t in 0.01f64..1.0) {
        let spec = GroupSpec::torus(2).unwrap();
        let alpha = Endo::from_rows(&spec, DEFAULT_ALPHA.iter().map(|r| r.to_vec()).collect()).unwrap();
        let pair = find_psd_pair(alpha.adjoint().matrix()).unwrap();
        let scale = |m: &Vec<Vec<f64>>| m.iter().map(|r| r.iter().map(|x| x * t).collect()).collect::<Vec<Vec<f64>>>();
        let window = |m| {
            let g = GaussianParams::new(scale(m), None).unwrap();
            TorusCharFn::from_fn(2, 12, 0.0, |y| gaussian_charfn(&g, y)).unwrap()
        };
        let (g1, g2) = (window(&pair.a1), window(&pair.a2));
        let dom = DualDomain::Window { dim: 2, radius: 3 };
        let r = check_symmetry_charfn(&g1, &g2, &alpha, &dom, 1e-12).unwrap();
        prop_assert!(r.verdict, "{}", r.max_residual);
    }
}

#[test]
fn haar_charfn_is_origin_only() {
    let h = TorusCharFn::haar(3);
    assert_eq!(h.get(&[0, 0, 0]), Some(Complex64::new(1.0, 0.0)));
    assert_eq!(h.get(&[1, 0, 0]), None);
    let m: FiniteMeasure<f64> = FiniteMeasure::uniform(&GroupSpec::finite(&[3, 3]).unwrap()).unwrap();
    let t = m.charfn_table();
    assert!(close(t[0], Complex64::new(1.0, 0.0), 1e-15));
    assert!(t[1..].iter().all(|c| c.norm() < 1e-12));
}
