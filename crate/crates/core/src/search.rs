//! Deterministic grid scans and golden-section refinement.

/// `1/φ`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximize `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `tol`. Assumes `f` is unimodal on the interval. Returns the
/// best point seen and its value.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // ~45 iterations take a unit bracket to 1e-9; the cap guards against NaN.
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    [(mid, fm), (x1, f1), (x2, f2)].into_iter().fold((mid, fm), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Evenly spaced points from `lo` to `hi` inclusive with spacing at most `step`.
pub fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let width = hi - lo;
    if width <= 0.0 {
        return vec![lo];
    }
    let n = (width / step).ceil().max(1.0) as usize;
    (0..=n).map(|k| if k == n { hi } else { lo + width * k as f64 / n as f64 }).collect()
}

/// Indices whose value is at least that of every existing neighbour along
/// each axis of a row-major grid of the given shape. Non-finite values never
/// qualify.
pub fn local_maxima(values: &[f64], shape: &[usize]) -> Vec<usize> {
    let strides: Vec<usize> = (0..shape.len()).map(|d| shape[d + 1..].iter().product()).collect();
    (0..values.len())
        .filter(|&idx| {
            let v = values[idx];
            if !v.is_finite() {
                return false;
            }
            shape.iter().zip(&strides).all(|(&n, &stride)| {
                let coord = (idx / stride) % n;
                (coord == 0 || values[idx - stride] <= v) && (coord + 1 == n || values[idx + stride] <= v)
            })
        })
        .collect()
}

/// Multi-index of a flat row-major index.
pub fn unflatten(mut idx: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for d in (0..shape.len()).rev() {
        out[d] = idx % shape[d];
        idx /= shape[d];
    }
    out
}
