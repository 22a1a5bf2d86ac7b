//! Second Laplacian eigenpair.
//!
//! Below [`DENSE_LIMIT`] vertices the full Laplacian is diagonalised. Above
//! it, block inverse iteration on the complement of the constants (each
//! application of `L⁺` is a Jacobi-preconditioned CG solve) is combined with
//! Rayleigh–Ritz on the exact Laplacian, so the returned value is always the
//! Rayleigh quotient of the returned vector.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::graph::Graph;

pub const DENSE_LIMIT: usize = 512;
pub const EIGEN_TOL: f64 = 1e-10;
const BLOCK: usize = 4;
const MAX_OUTER: usize = 500;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

pub fn laplacian_apply(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        let mut acc = g.degree(v) as f64 * x[v];
        for &w in g.neighbors(v) {
            acc -= x[w];
        }
        *o = acc;
    }
}

pub fn laplacian_dense(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
    }
    l
}

pub(crate) fn project_mean_zero(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Second-smallest Laplacian eigenpair of a connected graph with `n >= 2`.
pub fn fiedler(g: &Graph) -> Eigenpair {
    assert!(g.n() >= 2);
    if g.n() < DENSE_LIMIT {
        fiedler_dense(g)
    } else {
        fiedler_iterative(g)
    }
}

pub fn fiedler_dense(g: &Graph) -> Eigenpair {
    let eig = SymmetricEigen::new(laplacian_dense(g));
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let col = order[1];
    let mut vector: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
    project_mean_zero(&mut vector);
    normalise_sign(&mut vector);
    Eigenpair {
        value: eig.eigenvalues[col].max(0.0),
        vector,
        iterations: 1,
    }
}

/// Fixes the sign so that the first nonzero entry is positive.
fn normalise_sign(v: &mut [f64]) {
    let s = norm(v);
    let flip = v
        .iter()
        .find(|x| x.abs() > 1e-12 * s)
        .is_some_and(|&x| x < 0.0);
    let scale = if flip { -1.0 / s } else { 1.0 / s };
    v.iter_mut().for_each(|x| *x *= scale);
}

/// Solves `L y = b` on the mean-zero subspace. `b` must be mean-zero.
fn cg_solve(g: &Graph, b: &[f64], y: &mut [f64], rel_tol: f64) {
    let n = g.n();
    let inv_deg: Vec<f64> = (0..n).map(|v| 1.0 / g.degree(v) as f64).collect();
    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = r[i] * inv_deg[i];
        }
        project_mean_zero(z);
    };
    y.iter_mut().for_each(|v| *v = 0.0);
    let mut r = b.to_vec();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return;
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..20 * n {
        laplacian_apply(g, &p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            y[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= rel_tol * b_norm {
            break;
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    project_mean_zero(y);
}

/// Modified Gram–Schmidt; drops vectors that become numerically dependent.
fn orthonormalise(block: &mut Vec<Vec<f64>>) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(block.len());
    for mut v in block.drain(..) {
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let nv = norm(&v);
        if nv > 1e-300 {
            v.iter_mut().for_each(|a| *a /= nv);
            out.push(v);
        }
    }
    *block = out;
}

pub fn fiedler_iterative(g: &Graph) -> Eigenpair {
    let n = g.n();
    let b = BLOCK.min(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f1ed);
    let mut block: Vec<Vec<f64>> = (0..b)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            project_mean_zero(&mut v);
            v
        })
        .collect();
    orthonormalise(&mut block);

    let mut lx = vec![0.0; n];
    let mut theta_prev = f64::INFINITY;
    let mut best = Eigenpair {
        value: f64::INFINITY,
        vector: block[0].clone(),
        iterations: 0,
    };
    for outer in 1..=MAX_OUTER {
        let mut next: Vec<Vec<f64>> = block
            .iter()
            .map(|x| {
                let mut y = vec![0.0; n];
                cg_solve(g, x, &mut y, 1e-12);
                y
            })
            .collect();
        orthonormalise(&mut next);
        for v in next.iter_mut() {
            project_mean_zero(v);
        }
        orthonormalise(&mut next);
        let m = next.len();
        let l_block: Vec<Vec<f64>> = next
            .iter()
            .map(|v| {
                let mut out = vec![0.0; n];
                laplacian_apply(g, v, &mut out);
                out
            })
            .collect();
        let small = DMatrix::from_fn(m, m, |i, j| {
            0.5 * (dot(&next[i], &l_block[j]) + dot(&next[j], &l_block[i]))
        });
        let eig = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c]));
        block = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (i, q) in next.iter().enumerate() {
                    let coef = eig.eigenvectors[(i, c)];
                    v.iter_mut().zip(q).for_each(|(a, b)| *a += coef * b);
                }
                v
            })
            .collect();
        orthonormalise(&mut block);

        let x = &block[0];
        laplacian_apply(g, x, &mut lx);
        let theta = dot(x, &lx) / dot(x, x);
        let residual = lx
            .iter()
            .zip(x)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if theta < best.value {
            best = Eigenpair {
                value: theta,
                vector: x.clone(),
                iterations: outer,
            };
        }
        best.iterations = outer;
        let settled = (theta_prev - theta).abs() <= EIGEN_TOL * theta.max(1e-300);
        if residual <= 1e-8 * (1.0 + theta.sqrt()) || (settled && residual <= 1e-6) {
            break;
        }
        theta_prev = theta;
    }
    project_mean_zero(&mut best.vector);
    normalise_sign(&mut best.vector);
    let mut lv = vec![0.0; n];
    laplacian_apply(g, &best.vector, &mut lv);
    best.value = (dot(&best.vector, &lv) / dot(&best.vector, &best.vector)).max(0.0);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    #[test]
    fn dense_small_values() {
        assert!((fiedler_dense(&families::path(2)).value - 2.0).abs() < 1e-12);
        assert!((fiedler_dense(&families::complete(3)).value - 3.0).abs() < 1e-12);
        assert!((fiedler_dense(&families::path(3)).value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iterative_matches_dense() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let graphs = [
            families::path(60),
            families::cycle(45),
            families::connected_gnp(80, 0.06, &mut rng),
            families::random_tree(120, &mut rng),
        ];
        for g in &graphs {
            let d = fiedler_dense(g);
            let it = fiedler_iterative(g);
            assert!(
                (d.value - it.value).abs() <= 1e-10 * d.value.max(1e-3),
                "dense {} vs iterative {}",
                d.value,
                it.value
            );
        }
    }

    #[test]
    fn path_closed_form() {
        // λ₂(P_n) = 2 - 2cos(π/n) = 4 sin²(π/2n).
        let n = 700;
        let g = families::path(n);
        let e = fiedler(&g);
        let exact = 4.0 * (std::f64::consts::PI / (2 * n) as f64).sin().powi(2);
        assert!(
            (e.value - exact).abs() <= EIGEN_TOL,
            "{} vs {exact}",
            e.value
        );
        assert!((e.value - exact).abs() <= 1e-6 * exact);
    }
}
