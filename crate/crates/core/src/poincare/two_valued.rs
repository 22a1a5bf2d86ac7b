//! `p = 1` estimates over two-valued mean-zero functions.
//!
//! For a nonempty proper subset `S` the mean-zero function equal to `|S^c|`
//! on `S` and `-|S|` off it has ratio `n·e(S,S^c) / (2|S||S^c|)` at `p = 1`.
//! The minimum over all `S` is an upper bound on `h^1`.

use super::spectral::fiedler;
use super::{require_connected, Certified, Method, PoincareResult};
use crate::error::Result;
use crate::graph::{Graph, VertexFunction};

pub const EXHAUSTIVE_LIMIT: usize = 20;
const MAX_EXCHANGE_MOVES: usize = 10_000;

/// Ratio at `p` of the two-valued function for a cut of `s` vertices out of
/// `n` crossed by `crossing` edges.
pub fn two_valued_ratio(n: usize, s: usize, crossing: usize, p: f64) -> f64 {
    let (n, s, c) = (n as f64, s as f64, crossing as f64);
    let sc = n - s;
    if p == 1.0 {
        return n * c / (2.0 * s * sc);
    }
    n * c.powf(1.0 / p) / (s * sc.powf(p) + sc * s.powf(p)).powf(1.0 / p)
}

pub(crate) fn two_valued_witness(in_s: &[bool]) -> VertexFunction {
    let n = in_s.len() as f64;
    let s = in_s.iter().filter(|&&b| b).count() as f64;
    let values = in_s
        .iter()
        .map(|&b| if b { (n - s) / n } else { -s / n })
        .collect();
    VertexFunction::from_vec(values)
}

fn finish(g: &Graph, in_s: Vec<bool>, iterations: usize) -> PoincareResult {
    let witness = two_valued_witness(&in_s);
    let value = super::ratio(g, witness.values(), 1.0);
    PoincareResult {
        p: 1.0,
        value,
        witness,
        method: Method::TwoValued,
        certified: Certified::UpperBound,
        iterations,
        seed: None,
    }
}

/// Minimum two-valued ratio: exhaustive up to [`EXHAUSTIVE_LIMIT`] vertices,
/// otherwise the better of the Fiedler sweep cut and the minimum-degree
/// singleton, each refined by single-vertex exchanges.
pub fn h1_sweep(g: &Graph) -> Result<PoincareResult> {
    require_connected(g)?;
    let n = g.n();
    if n <= EXHAUSTIVE_LIMIT {
        return h1_exhaustive(g);
    }
    let f = fiedler(g).vector;
    let (mut sweep, _) = best_level_set(g, &f, 1.0);
    let mut moves = exchange_refine(g, &mut sweep);
    let min_deg = (0..n).min_by_key(|&x| (g.degree(x), x)).expect("n > 0");
    let mut single: Vec<bool> = (0..n).map(|x| x == min_deg).collect();
    moves += exchange_refine(g, &mut single);
    let score = |in_s: &[bool]| {
        let s = in_s.iter().filter(|&&b| b).count();
        let crossing = g
            .edges()
            .iter()
            .filter(|&&(u, v)| in_s[u] != in_s[v])
            .count();
        two_valued_ratio(n, s, crossing, 1.0)
    };
    let in_s = if score(&single) < score(&sweep) {
        single
    } else {
        sweep
    };
    Ok(finish(g, in_s, moves + 2))
}

/// Gray-code enumeration of all cuts, keeping the last vertex outside `S`.
pub fn h1_exhaustive(g: &Graph) -> Result<PoincareResult> {
    require_connected(g)?;
    let n = g.n();
    assert!(n <= 30, "exhaustive search is limited to small graphs");
    let masks: Vec<u32> = (0..n)
        .map(|x| g.neighbors(x).iter().fold(0u32, |m, &y| m | (1 << y)))
        .collect();
    let mut set = 0u32;
    let mut size = 0usize;
    let mut crossing = 0i64;
    let mut best = (f64::INFINITY, 0u32);
    for i in 1u64..(1u64 << (n - 1)) {
        let x = i.trailing_zeros() as usize;
        let a = (masks[x] & set).count_ones() as i64;
        let deg = g.degree(x) as i64;
        if set & (1 << x) == 0 {
            crossing += deg - 2 * a;
            size += 1;
        } else {
            crossing += 2 * a - deg;
            size -= 1;
        }
        set ^= 1 << x;
        let r = two_valued_ratio(n, size, crossing as usize, 1.0);
        if r < best.0 {
            best = (r, set);
        }
    }
    let in_s = (0..n).map(|x| best.1 & (1 << x) != 0).collect();
    Ok(finish(g, in_s, 1usize << (n - 1)))
}

/// Best prefix cut of the vertex order induced by `f` (ascending), scored
/// by the two-valued ratio at `p`.
pub(crate) fn best_level_set(g: &Graph, f: &[f64], p: f64) -> (Vec<bool>, f64) {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let mut in_s = vec![false; n];
    let mut crossing = 0i64;
    let mut best = (f64::INFINITY, 0usize);
    for (k, &x) in order.iter().enumerate().take(n - 1) {
        let a = g.neighbors(x).iter().filter(|&&y| in_s[y]).count() as i64;
        crossing += g.degree(x) as i64 - 2 * a;
        in_s[x] = true;
        let r = two_valued_ratio(n, k + 1, crossing as usize, p);
        if r < best.0 {
            best = (r, k + 1);
        }
    }
    let mut out = vec![false; n];
    for &x in &order[..best.1] {
        out[x] = true;
    }
    (out, best.0)
}

/// Steepest-descent single-vertex moves on the `p = 1` two-valued ratio.
fn exchange_refine(g: &Graph, in_s: &mut [bool]) -> usize {
    let n = g.n();
    let mut same: Vec<i64> = (0..n)
        .map(|x| {
            g.neighbors(x)
                .iter()
                .filter(|&&y| in_s[y] == in_s[x])
                .count() as i64
        })
        .collect();
    let mut s = in_s.iter().filter(|&&b| b).count();
    let mut crossing: i64 = g
        .edges()
        .iter()
        .filter(|&&(u, v)| in_s[u] != in_s[v])
        .count() as i64;
    let mut current = two_valued_ratio(n, s, crossing as usize, 1.0);
    let mut moves = 0;
    while moves < MAX_EXCHANGE_MOVES {
        let mut best: Option<(f64, usize)> = None;
        for x in 0..n {
            let s_new = if in_s[x] { s - 1 } else { s + 1 };
            if s_new == 0 || s_new == n {
                continue;
            }
            let other = g.degree(x) as i64 - same[x];
            let c_new = crossing - other + same[x];
            let r = two_valued_ratio(n, s_new, c_new as usize, 1.0);
            if r < current * (1.0 - 1e-12) && best.is_none_or(|(br, _)| r < br) {
                best = Some((r, x));
            }
        }
        let Some((r, x)) = best else { break };
        let other = g.degree(x) as i64 - same[x];
        crossing += same[x] - other;
        s = if in_s[x] { s - 1 } else { s + 1 };
        in_s[x] = !in_s[x];
        same[x] = other;
        for &y in g.neighbors(x) {
            same[y] += if in_s[y] == in_s[x] { 1 } else { -1 };
        }
        current = r;
        moves += 1;
    }
    moves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    fn brute(g: &Graph) -> f64 {
        let n = g.n();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << n) - 1 {
            let s = mask.count_ones() as usize;
            let c = g
                .edges()
                .iter()
                .filter(|&&(u, v)| ((mask >> u) & 1) != ((mask >> v) & 1))
                .count();
            best = best.min(n as f64 * c as f64 / (2.0 * s as f64 * (n - s) as f64));
        }
        best
    }

    #[test]
    fn examples() {
        assert!((h1_sweep(&families::path(2)).unwrap().value - 1.0).abs() < 1e-12);
        assert!((h1_sweep(&families::complete(5)).unwrap().value - 2.5).abs() < 1e-12);
        assert!((h1_sweep(&families::path(3)).unwrap().value - 0.75).abs() < 1e-12);
        assert!((h1_sweep(&families::complete(3)).unwrap().value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn gray_code_matches_brute_force() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 2..=12 {
            let g = families::connected_gnp(n, 0.4, &mut rng);
            let fast = h1_exhaustive(&g).unwrap().value;
            assert!((fast - brute(&g)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn sweep_on_large_graphs_is_an_upper_bound_of_exhaustive_quality() {
        // P_n: the midpoint cut gives n·1/(2·(n/2)^2) = 2/n.
        let g = families::path(40);
        let r = h1_sweep(&g).unwrap();
        assert!((r.value - 2.0 / 40.0).abs() < 1e-12);
        let g = families::cycle(30);
        let r = h1_sweep(&g).unwrap();
        assert!((r.value - 30.0 * 2.0 / (2.0 * 15.0 * 15.0)).abs() < 1e-12);
    }

    #[test]
    fn sweep_considers_low_degree_singletons() {
        // K_30 with one vertex reduced to degree 2: the singleton beats every
        // balanced cut.
        let n = 30;
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != 0 || v <= 2);
        let g = Graph::from_edges(n, edges).unwrap();
        let r = h1_sweep(&g).unwrap();
        assert!(
            (r.value - 30.0 * 2.0 / (2.0 * 29.0)).abs() < 1e-12,
            "{}",
            r.value
        );
    }

    #[test]
    fn two_valued_formula_agrees_with_ratio() {
        let g = families::cycle(8);
        let in_s: Vec<bool> = (0..8).map(|x| x < 3).collect();
        let w = two_valued_witness(&in_s);
        assert!(w.mean().abs() < 1e-15);
        for p in [1.0, 1.5, 2.0, 4.0] {
            let direct = super::super::ratio(&g, w.values(), p);
            let formula = two_valued_ratio(8, 3, 2, p);
            assert!((direct - formula).abs() < 1e-12 * formula, "p={p}");
        }
    }
}
