mod common;

use common::*;
use conproj::affine::{gram_factorize, project_affine, AffineMap, RowBuilder};
use conproj::cones::{cone_violation, moreau, psd_jacobian_apply};
use conproj::linalg::eig_sym;
use conproj::{
    project_cone, project_polar, project_psd, project_soc, BlockPoint, ConeSpec, SymMatrix,
};
use proptest::prelude::*;

fn sym(n: usize, v: &[f64]) -> SymMatrix {
    SymMatrix::from_row_slice(n, v).unwrap()
}

#[test]
fn eig_examples() {
    let d = eig_sym(&SymMatrix::identity(3)).unwrap();
    assert_eq!(d.eigenvalues.as_slice(), &[1.0, 1.0, 1.0]);

    let d = eig_sym(&SymMatrix::from_diagonal(&[3.0, -1.0])).unwrap();
    assert_eq!(d.eigenvalues.as_slice(), &[3.0, -1.0]);
    assert!((d.eigenvectors[(0, 0)].abs() - 1.0).abs() < 1e-15);
    assert!((d.eigenvectors[(1, 1)].abs() - 1.0).abs() < 1e-15);

    // λ² − 1 = 0
    let d = eig_sym(&sym(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    assert!((d.eigenvalues[0] - 1.0).abs() < 1e-15);
    assert!((d.eigenvalues[1] + 1.0).abs() < 1e-15);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u0 = d.eigenvectors.column(0);
    let u1 = d.eigenvectors.column(1);
    assert!((u0[0].abs() - h).abs() < 1e-14 && (u0[0] - u0[1]).abs() < 1e-14);
    assert!((u1[0].abs() - h).abs() < 1e-14 && (u1[0] + u1[1]).abs() < 1e-14);
}

#[test]
fn eig_rejects_nan() {
    let m = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, f64::NAN, 1.0]);
    assert!(SymMatrix::new(m).is_err());
}

#[test]
fn psd_projection_examples() {
    let (x, _) = project_psd(&SymMatrix::from_diagonal(&[1.0, -2.0])).unwrap();
    assert_eq!(x, SymMatrix::from_diagonal(&[1.0, 0.0]));
    let (x, _) = project_psd(&sym(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    assert!(max_abs_diff(x.as_slice(), &[0.5; 4]) < 1e-15);
    let psd = sym(2, &[2.0, 1.0, 1.0, 2.0]);
    assert_eq!(project_psd(&psd).unwrap().0, psd);
}

/// Minimizes the distance to `x` over boundary rays `s·(cos φ·e, 1)` of the
/// 3-dimensional cone by grid search plus golden refinement in `s`.
fn soc_brute(x: &[f64]) -> Vec<f64> {
    if (x[0] * x[0] + x[1] * x[1]).sqrt() <= x[2] {
        return x.to_vec();
    }
    let mut best = (f64::INFINITY, vec![0.0, 0.0, 0.0]);
    let dist = |p: &[f64]| p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    for k in 0..20_000 {
        let phi = k as f64 * std::f64::consts::TAU / 20_000.0;
        let dir = [phi.cos(), phi.sin(), 1.0];
        // optimal scale along the ray, clamped at 0
        let s = (dir.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / 2.0).max(0.0);
        let p: Vec<f64> = dir.iter().map(|d| s * d).collect();
        let v = dist(&p);
        if v < best.0 {
            best = (v, p);
        }
    }
    best.1
}

#[test]
fn soc_examples() {
    assert_eq!(
        project_soc(&[3.0, 4.0, 10.0]).unwrap(),
        vec![3.0, 4.0, 10.0]
    );
    assert_eq!(project_soc(&[0.0, 0.0, -5.0]).unwrap(), vec![0.0, 0.0, 0.0]);
    let p = project_soc(&[3.0, 4.0, 0.0]).unwrap();
    assert!(max_abs_diff(&p, &[1.5, 2.0, 2.5]) < 1e-15);
    assert!(max_abs_diff(&soc_brute(&[3.0, 4.0, 0.0]), &p) < 1e-3);
    assert_eq!(project_soc(&[-2.0]).unwrap(), vec![0.0]);
    assert!(project_soc(&[]).is_err());
    assert!(project_soc(&[f64::INFINITY, 1.0]).is_err());
}

#[test]
fn soc_matches_brute_force() {
    let mut r = rng(3);
    for _ in 0..20 {
        let x: Vec<f64> = (0..3).map(|_| 2.0 * gauss(&mut r)).collect();
        let p = project_soc(&x).unwrap();
        let b = soc_brute(&x);
        assert!(max_abs_diff(&p, &b) < 2e-3, "{x:?}: {p:?} vs {b:?}");
    }
}

#[test]
fn product_cone_example() {
    let cone = ConeSpec::new(vec![2], vec![3], 2).unwrap();
    let x =
        BlockPoint::from_vec(&cone, vec![1.0, 0.0, 0.0, -2.0, 0.0, 0.0, -5.0, -1.0, 2.0]).unwrap();
    let p = project_cone(&cone, &x).unwrap();
    assert_eq!(p.data, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
    let zero = BlockPoint::zeros(&cone);
    assert_eq!(project_cone(&cone, &zero).unwrap(), zero);
    let bad = BlockPoint { data: vec![1.0; 3] };
    assert!(project_cone(&cone, &bad).is_err());
}

#[test]
fn polar_examples() {
    let cone = ConeSpec::psd(2);
    let x = BlockPoint::from_sym(&SymMatrix::from_diagonal(&[1.0, -2.0]));
    assert_eq!(
        project_polar(&cone, &x).unwrap().data,
        vec![0.0, 0.0, 0.0, -2.0]
    );
    let inside = BlockPoint::from_sym(&SymMatrix::identity(2));
    assert!(project_polar(&cone, &inside).unwrap().norm() == 0.0);
    let polar = BlockPoint::from_sym(&SymMatrix::from_diagonal(&[-1.0, -3.0]));
    assert_eq!(project_polar(&cone, &polar).unwrap(), polar);
}

#[test]
fn affine_projection_examples() {
    let cone = ConeSpec::new(vec![], vec![], 2).unwrap();
    let mut r = RowBuilder::new(&cone);
    r.push_nonneg(0, 1.0);
    r.push_nonneg(1, 1.0);
    let a = AffineMap::from_rows(2, vec![r.build()], vec![2.0]).unwrap();
    let g = gram_factorize(&a).unwrap();
    let p = project_affine(
        &a,
        &BlockPoint {
            data: vec![0.0, 0.0],
        },
        &g,
    )
    .unwrap();
    assert_eq!(p.data, vec![1.0, 1.0]);
    let feasible = BlockPoint {
        data: vec![0.5, 1.5],
    };
    assert_eq!(project_affine(&a, &feasible, &g).unwrap(), feasible);

    let rows = (0..2)
        .map(|i| {
            let mut r = RowBuilder::new(&cone);
            r.push_nonneg(i, 1.0);
            r.build()
        })
        .collect();
    let id = AffineMap::from_rows(2, rows, vec![3.0, -4.0]).unwrap();
    let g = gram_factorize(&id).unwrap();
    assert_eq!(g.diagonal(), Some(&[1.0, 1.0][..]));
    let p = project_affine(
        &id,
        &BlockPoint {
            data: vec![9.0, 9.0],
        },
        &g,
    )
    .unwrap();
    assert_eq!(p.data, vec![3.0, -4.0]);
}

#[test]
fn rank_deficient_gram_is_rejected() {
    let cone = ConeSpec::new(vec![], vec![], 2).unwrap();
    let row = || {
        let mut r = RowBuilder::new(&cone);
        r.push_nonneg(0, 1.0);
        r.push_nonneg(1, 1.0);
        r.build()
    };
    let a = AffineMap::from_rows(2, vec![row(), row()], vec![1.0, 1.0]).unwrap();
    let err = gram_factorize(&a).unwrap_err().to_string();
    assert!(err.contains('1'), "{err}");
}

#[test]
fn affine_projection_is_orthogonal() {
    let mut r = rng(11);
    for _ in 0..20 {
        let cone = random_cone(&mut r);
        let m = (cone.ambient_dim() / 3).max(1);
        let a = feasible_map(&mut r, &cone, m);
        let Ok(g) = gram_factorize(&a) else { continue };
        let x = random_point(&mut r, &cone);
        let p = project_affine(&a, &x, &g).unwrap();
        let b = conproj::linalg::norm(&a.rhs);
        assert!(conproj::linalg::norm(&a.residual(&p)) <= 1e-10 * (1.0 + b));
        // a random direction in null(A), built by projecting with b = 0
        let mut a0 = a.clone();
        a0.rhs = vec![0.0; m];
        let d = project_affine(&a0, &random_point(&mut r, &cone), &g).unwrap();
        let ip = x.sub(&p).dot(&d);
        assert!(
            ip.abs() <= 1e-9 * (1.0 + x.norm()) * (1.0 + d.norm()),
            "{ip}"
        );
    }
}

#[test]
fn jacobian_extreme_spectra() {
    let mut r = rng(5);
    let h = random_sym(&mut r, 4);
    let pos = eig_sym(&SymMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0])).unwrap();
    assert_eq!(psd_jacobian_apply(&pos, &h).unwrap(), h);
    let neg = eig_sym(&SymMatrix::from_diagonal(&[-1.0, -2.0, -3.0, -4.0])).unwrap();
    assert_eq!(psd_jacobian_apply(&neg, &h).unwrap(), SymMatrix::zeros(4));
    assert!(psd_jacobian_apply(&neg, &SymMatrix::identity(3)).is_err());
}

#[test]
fn jacobian_matches_central_differences() {
    let mut r = rng(17);
    for _ in 0..50 {
        let n = 2 + (gauss(&mut r).abs() * 3.0) as usize % 7;
        let c = separated_sym(&mut r, n, 1e-3);
        let h = random_sym(&mut r, n);
        let (_, dec) = project_psd(&c).unwrap();
        let jh = psd_jacobian_apply(&dec, &h).unwrap();
        let eps = 1e-6;
        let shift = |s: f64| {
            let m = c.as_matrix() + h.as_matrix() * s;
            project_psd(&SymMatrix::new(m).unwrap()).unwrap().0
        };
        let fd = (shift(eps).as_matrix() - shift(-eps).as_matrix()) / (2.0 * eps);
        let err = (fd - jh.as_matrix()).norm() / (1.0 + jh.frobenius_norm());
        assert!(err <= 1e-5, "n={n}: {err:e}");
    }
}

#[test]
fn jacobian_operator_is_psd() {
    let mut r = rng(23);
    for _ in 0..30 {
        let c = random_sym(&mut r, 5);
        let (_, dec) = project_psd(&c).unwrap();
        let h = random_sym(&mut r, 5);
        let jh = psd_jacobian_apply(&dec, &h).unwrap();
        assert!(h.dot(&jh) >= -1e-12);
        // linear in the direction
        let h2 = random_sym(&mut r, 5);
        let sum = SymMatrix::new(h.as_matrix() + h2.as_matrix()).unwrap();
        let lhs = psd_jacobian_apply(&dec, &sum).unwrap();
        let rhs = jh.as_matrix() + psd_jacobian_apply(&dec, &h2).unwrap().as_matrix();
        assert!((lhs.as_matrix() - rhs).norm() < 1e-12 * (1.0 + sum.frobenius_norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moreau_and_membership(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cone = random_cone(&mut r);
        let x = random_point(&mut r, &cone).scaled(3.0);
        let (p, q) = moreau(&cone, &x).unwrap();
        prop_assert_eq!(&q, &x.sub(&p));
        prop_assert!(max_abs_diff(&p.add(&q).data, &x.data) <= 1e-15 * (1.0 + x.norm()));
        prop_assert!(p.dot(&q).abs() <= 1e-10 * (1.0 + x.norm().powi(2)));
        prop_assert!(cone_violation(&cone, &p).unwrap() <= 1e-10 * (1.0 + x.norm()));
        // q is in the polar: its negation is in K for these self-dual cones
        prop_assert!(cone_violation(&cone, &q.scaled(-1.0)).unwrap() <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn variational_inequality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cone = random_cone(&mut r);
        let x = random_point(&mut r, &cone);
        let p = project_cone(&cone, &x).unwrap();
        let res = x.sub(&p);
        for _ in 0..100 {
            let z = project_cone(&cone, &random_point(&mut r, &cone).scaled(2.0)).unwrap();
            let v = res.dot(&z.sub(&p));
            prop_assert!(v <= 1e-8 * (1.0 + x.norm()) * (1.0 + z.norm()), "{}", v);
        }
    }

    #[test]
    fn nonexpansive_and_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cone = random_cone(&mut r);
        let x = random_point(&mut r, &cone);
        let y = random_point(&mut r, &cone);
        let px = project_cone(&cone, &x).unwrap();
        let py = project_cone(&cone, &y).unwrap();
        prop_assert!(px.sub(&py).norm() <= (1.0 + 1e-12) * x.sub(&y).norm());
        let ppx = project_cone(&cone, &px).unwrap();
        prop_assert!(max_abs_diff(&ppx.data, &px.data) <= 1e-10 * (1.0 + px.norm()));
    }

    #[test]
    fn spectral_decomposition_invariants(seed in any::<u64>(), n in 1usize..30) {
        let mut r = rng(seed);
        let m = random_sym(&mut r, n);
        let d = eig_sym(&m).unwrap();
        let u = &d.eigenvectors;
        let orth = (u.transpose() * u - nalgebra::DMatrix::identity(n, n)).amax();
        prop_assert!(orth <= 1e-12 * n as f64);
        let back = d.reconstruct(|l| l);
        prop_assert!((back.as_matrix() - m.as_matrix()).norm() <= 1e-10 * (1.0 + m.frobenius_norm()));
        prop_assert!(d.eigenvalues.as_slice().windows(2).all(|w| w[0] >= w[1]));
        // same input, same output
        let again = eig_sym(&m).unwrap();
        prop_assert_eq!(&again.eigenvectors, &d.eigenvectors);
    }
}
