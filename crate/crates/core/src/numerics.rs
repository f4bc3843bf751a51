//! Small numerical helpers shared by the solver and its tests.

/// Lower end of the bracket used when inverting a monotone function on `(0, 1]`.
pub const INVERSE_FLOOR: f64 = 1e-300;
/// Iteration count for [`invert_increasing`].
pub const INVERSE_ITERATIONS: usize = 200;

/// Inverts a strictly increasing `f` on `(lo, hi]` by bisection.
///
/// Returns `None` when `y` lies outside `[f(lo), f(hi)]`.
pub fn invert_increasing<F: Fn(f64) -> f64>(f: F, y: f64, lo: f64, hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(y >= flo && y <= fhi) {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..INVERSE_ITERATIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid) < y {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Smallest eigenvalue of a symmetric matrix given as rows.
pub fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (m[i][j] + m[j][i]));
    mat.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest entrywise absolute difference between two equally shaped matrices.
pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// Largest `|m[i][j] - m[j][i]|`.
#[allow(clippy::needless_range_loop)]
pub fn asymmetry(m: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.len() {
        for j in 0..i {
            worst = worst.max((m[i][j] - m[j][i]).abs());
        }
    }
    worst
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_inverts_cube() {
        let u = invert_increasing(|x| x * x * x, 0.125, INVERSE_FLOOR, 1.0).unwrap();
        assert!((u - 0.5).abs() < 1e-14);
        assert!(invert_increasing(|x| x, 2.0, INVERSE_FLOOR, 1.0).is_none());
    }

    #[test]
    fn simpson_integrates_log() {
        // ∫_{0.1}^1 ln u du = [u ln u - u]
        let exact = -1.0 - (0.1 * 0.1f64.ln() - 0.1);
        let got = adaptive_simpson(&|u: f64| u.ln(), 0.1, 1.0, 1e-12);
        assert!((got - exact).abs() < 1e-10);
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = vec![vec![2.0, 0.0], vec![0.0, -0.5]];
        assert!((min_eigenvalue(&m) + 0.5).abs() < 1e-14);
    }
}
