#![allow(dead_code)]

use conproj::affine::{AffineMap, SparseRow};
use conproj::polysos::rng_from_seed;
use conproj::{BlockPoint, ConeSpec, ProjectionProblem, SymMatrix};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type TestRng = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> TestRng {
    rng_from_seed(seed)
}

pub fn gauss(rng: &mut TestRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_sym(rng: &mut TestRng, n: usize) -> SymMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| gauss(rng));
    SymMatrix::new(&m + m.transpose()).unwrap()
}

/// Random symmetric matrix whose spectrum has pairwise gaps and keeps away
/// from zero by at least `gap`.
pub fn separated_sym(rng: &mut TestRng, n: usize, gap: f64) -> SymMatrix {
    let q = DMatrix::from_fn(n, n, |_, _| gauss(rng)).qr().q();
    let mut lam: Vec<f64> = Vec::with_capacity(n);
    let mut v = -(n as f64) / 2.0 - 0.5;
    for _ in 0..n {
        v += gap + rng.random::<f64>();
        if v.abs() < gap {
            v += 2.0 * gap;
        }
        lam.push(v);
    }
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lam));
    SymMatrix::new(&q * d * q.transpose()).unwrap()
}

/// Product cone with a PSD block, an SOC block and an orthant block.
pub fn random_cone(rng: &mut TestRng) -> ConeSpec {
    let psd = rng.random_range(1..=6);
    let soc = rng.random_range(1..=5);
    let nn = rng.random_range(0..=4);
    ConeSpec::new(vec![psd], vec![soc], nn).unwrap()
}

/// Random point of the ambient space (PSD blocks symmetric).
pub fn random_point(rng: &mut TestRng, cone: &ConeSpec) -> BlockPoint {
    let mut x = BlockPoint::zeros(cone);
    for (k, &d) in cone.psd.iter().enumerate() {
        let s = random_sym(rng, d);
        let o = cone.psd_offset(k);
        x.data[o..o + d * d].copy_from_slice(s.as_slice());
    }
    let o = cone.psd.iter().map(|d| d * d).sum::<usize>();
    for v in &mut x.data[o..] {
        *v = gauss(rng);
    }
    x
}

/// Random symmetric row: `entries` random coordinates, mirrored in PSD blocks.
pub fn random_row(rng: &mut TestRng, cone: &ConeSpec, entries: usize) -> SparseRow {
    let dir = random_point(rng, cone);
    let mut e = Vec::new();
    let dim = cone.ambient_dim();
    for _ in 0..entries {
        let i = rng.random_range(0..dim);
        e.push(i);
    }
    let mut out = Vec::new();
    for i in e {
        out.push((i, dir.data[i]));
        if let Some((k, r, c)) = psd_coords(cone, i) {
            if r != c {
                out.push((cone.psd_index(k, c, r), dir.data[i]));
            }
        }
    }
    // mirrored duplicates get summed by from_entries, keeping symmetry
    SparseRow::from_entries(out)
}

fn psd_coords(cone: &ConeSpec, i: usize) -> Option<(usize, usize, usize)> {
    for (k, &d) in cone.psd.iter().enumerate() {
        let o = cone.psd_offset(k);
        if i >= o && i < o + d * d {
            return Some((k, (i - o) / d, (i - o) % d));
        }
    }
    None
}

/// Random affine map with `m` rows whose right-hand side is attained at a
/// point of the cone, so the problem is feasible.
pub fn feasible_map(rng: &mut TestRng, cone: &ConeSpec, m: usize) -> AffineMap {
    let dim = cone.ambient_dim();
    let rows: Vec<SparseRow> = (0..m).map(|_| random_row(rng, cone, 4)).collect();
    let p = random_point(rng, cone);
    let x0 = conproj::project_cone(cone, &p).unwrap();
    let mut a = AffineMap::from_rows(dim, rows, vec![0.0; m]).unwrap();
    a.rhs = a.apply(&x0);
    a
}

pub fn random_projection_problem(rng: &mut TestRng, m: usize) -> ProjectionProblem {
    let cone = random_cone(rng);
    let eq = feasible_map(rng, &cone, m);
    let c = random_point(rng, &cone);
    ProjectionProblem::equality(c, eq, cone).unwrap()
}

pub fn random_nearcorr_center(rng: &mut TestRng, n: usize) -> SymMatrix {
    // correlation-like with noise, so some eigenvalues are negative
    let s = random_sym(rng, n);
    let mut m = s.as_matrix() * (1.0 / (n as f64).sqrt());
    for i in 0..n {
        m[(i, i)] = 1.0;
    }
    SymMatrix::new(m).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
