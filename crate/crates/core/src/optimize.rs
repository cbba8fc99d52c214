//! One-dimensional maximization: coarse grid scan plus golden-section
//! refinement. Deterministic, derivative-free, ties resolved toward the
//! smaller argument.

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximize `f` on `[lo, hi]`: scan `grid_points` equispaced samples, then
/// refine the best bracket by golden-section search until the bracket is
/// shorter than `tol`. Returns `(argmax, max)`.
pub(crate) fn maximize<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    grid_points: usize,
    tol: f64,
) -> (f64, f64) {
    debug_assert!(grid_points >= 3 && hi > lo && tol > 0.0);
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..grid_points {
        let v = f(lo + step * i as f64);
        // strict '>' keeps the first (smallest) argument on ties
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);

    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    // keep the grid maximum unless refinement strictly improved on it; on
    // plateaus this resolves ties toward the smaller argument
    if fm > best_v {
        (xm, fm)
    } else {
        (lo + step * best_i as f64, best_v)
    }
}
