//! Independent oracles shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use genmaxent::percolation::{canonical, Cell};
use genmaxent::{EntropyModel, ProblemInstance};
use rand::Rng;

/// Maximum of the separable objective `Σ_a [h_a(p_a) - p_a E_a]` over a
/// simplex grid of step `1/units`, by exhaustive (max, +) convolution.
fn grid_max(values: &[Vec<f64>], units: usize) -> (f64, Vec<usize>) {
    // best[m]: best value using the first symbols with total m units
    let mut best = values[0].clone();
    let mut choice: Vec<Vec<usize>> = vec![(0..=units).collect()];
    for g in &values[1..] {
        let mut next = vec![f64::NEG_INFINITY; units + 1];
        let mut arg = vec![0; units + 1];
        for m in 0..=units {
            for k in 0..=m {
                let v = best[m - k] + g[k];
                if v > next[m] {
                    next[m] = v;
                    arg[m] = k;
                }
            }
        }
        best = next;
        choice.push(arg);
    }
    let mut ks = vec![0; values.len()];
    let mut m = units;
    for a in (1..values.len()).rev() {
        ks[a] = choice[a][m];
        m -= ks[a];
    }
    ks[0] = m;
    (best[units], ks)
}

/// Maximum over `p = center + k δ` with integer `|k_a| ≤ width`, `Σ k_a = 0`
/// and `p ∈ [0, 1]`.
fn local_max<F: Fn(usize, f64) -> f64>(
    g: &F,
    center: &[f64],
    delta: f64,
    width: i64,
) -> (f64, Vec<f64>) {
    let n = center.len();
    let span = (n as i64) * width;
    let idx = |s: i64| (s + span) as usize;
    let mut best = vec![f64::NEG_INFINITY; (2 * span + 1) as usize];
    let mut back: Vec<Vec<i64>> = Vec::new();
    best[idx(0)] = 0.0;
    for (a, &c) in center.iter().enumerate() {
        let vals: Vec<(i64, f64)> = (-width..=width)
            .filter_map(|k| {
                let p = c + k as f64 * delta;
                (-1e-15..=1.0 + 1e-15)
                    .contains(&p)
                    .then(|| (k, g(a, p.clamp(0.0, 1.0))))
            })
            .collect();
        let mut next = vec![f64::NEG_INFINITY; best.len()];
        let mut arg = vec![0i64; best.len()];
        for s in -span..=span {
            let cur = best[idx(s)];
            if cur == f64::NEG_INFINITY {
                continue;
            }
            for &(k, v) in &vals {
                let t = s + k;
                if t.abs() > span {
                    continue;
                }
                if cur + v > next[idx(t)] {
                    next[idx(t)] = cur + v;
                    arg[idx(t)] = k;
                }
            }
        }
        best = next;
        back.push(arg);
    }
    let mut ks = vec![0i64; n];
    let mut s = 0i64;
    for a in (0..n).rev() {
        ks[a] = back[a][idx(s)];
        s -= ks[a];
    }
    let p = center
        .iter()
        .zip(&ks)
        .map(|(c, k)| (c + *k as f64 * delta).clamp(0.0, 1.0))
        .collect();
    (best[idx(0)], p)
}

/// Brute-force maximum of `I(p) - θ·⟨p, H⟩`: global grid of step 1e-3, then
/// local grids of step 1e-4, 1e-5 and 1e-6.
pub fn simplex_oracle(instance: &ProblemInstance, theta: &[f64]) -> (f64, Vec<f64>) {
    let n = instance.alphabet_size();
    let model = instance.model();
    let field: Vec<f64> = (0..n)
        .map(|a| {
            instance
                .hamiltonians()
                .iter()
                .zip(theta)
                .map(|(h, t)| t * h[a])
                .sum()
        })
        .collect();
    let g = |a: usize, p: f64| model.eval_h(a, p).unwrap() - p * field[a];
    let units = 1000;
    let values: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..=units).map(|k| g(a, k as f64 / units as f64)).collect())
        .collect();
    let (mut value, ks) = grid_max(&values, units);
    let mut p: Vec<f64> = ks.iter().map(|&k| k as f64 / units as f64).collect();
    for delta in [1e-4, 1e-5, 1e-6] {
        let (v, q) = local_max(&g, &p, delta, 40);
        if v >= value {
            value = v;
            p = q;
        }
    }
    (value, p)
}

/// Clusters of at most `max_size` sites containing the center of a 9×9
/// window, found by testing every occupation pattern of that size for
/// connectivity. Returns `(s, t, c)` per distinct shape.
pub fn window_shape_classes(max_size: usize) -> BTreeMap<Vec<Cell>, (u32, u32, u64)> {
    const SIDE: i32 = 9;
    let origin = (4, 4);
    let others: Vec<Cell> = (0..SIDE)
        .flat_map(|x| (0..SIDE).map(move |y| (x, y)))
        .filter(|&c| c != origin)
        .collect();
    let mut out: BTreeMap<Vec<Cell>, (u32, u32, u64)> = BTreeMap::new();
    let mut chosen = vec![origin];
    fn rec(
        start: usize,
        left: usize,
        others: &[Cell],
        chosen: &mut Vec<Cell>,
        out: &mut BTreeMap<Vec<Cell>, (u32, u32, u64)>,
    ) {
        if connected(chosen) {
            let key = canonical(chosen);
            let t = perimeter_of(chosen);
            out.entry(key)
                .and_modify(|e| e.2 += 1)
                .or_insert((chosen.len() as u32, t, 1));
        }
        if left == 0 {
            return;
        }
        for i in start..others.len() {
            chosen.push(others[i]);
            rec(i + 1, left - 1, others, chosen, out);
            chosen.pop();
        }
    }
    rec(0, max_size - 1, &others, &mut chosen, &mut out);
    out
}

fn connected(cells: &[Cell]) -> bool {
    let mut seen = vec![false; cells.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..cells.len() {
            let d = (cells[i].0 - cells[j].0).abs() + (cells[i].1 - cells[j].1).abs();
            if !seen[j] && d == 1 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn perimeter_of(cells: &[Cell]) -> u32 {
    let mut border = Vec::new();
    for &(x, y) in cells {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if !cells.contains(&n) && !border.contains(&n) {
                border.push(n);
            }
        }
    }
    border.len() as u32
}

/// Symmetric Dirichlet(1) sample.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|x| x / total).collect()
}

/// Shannon, Tsallis q ∈ {0.7, 1.3, 2} or weighted Shannon, chosen by `kind`.
pub fn model_by_kind<R: Rng>(rng: &mut R, kind: usize, n: usize) -> EntropyModel {
    match kind % 5 {
        0 => EntropyModel::shannon(),
        1 => EntropyModel::tsallis(0.7).unwrap(),
        2 => EntropyModel::tsallis(1.3).unwrap(),
        3 => EntropyModel::tsallis(2.0).unwrap(),
        _ => EntropyModel::weighted_shannon((0..n).map(|_| rng.random_range(1.0..6.0)).collect())
            .unwrap(),
    }
}
