//! Bracketing root finders shared by the scans.

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign. Runs until
/// the interval stops shrinking or is below `xtol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= xtol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if !fm.is_finite() {
            return None;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Evenly spaced samples on `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Brackets every sign change of `f` over `grid` and bisects each one.
pub fn all_roots<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], xtol: f64) -> Vec<f64> {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for k in 0..grid.len().saturating_sub(1) {
        let (a, b) = (values[k], values[k + 1]);
        if a == 0.0 {
            roots.push(grid[k]);
            continue;
        }
        if a.is_finite() && b.is_finite() && a.signum() != b.signum() && b != 0.0 {
            if let Some(r) = bisect(&mut f, grid[k], grid[k + 1], xtol) {
                roots.push(r);
            }
        }
    }
    if let (Some(&last), Some(&x)) = (values.last(), grid.last()) {
        if last == 0.0 {
            roots.push(x);
        }
    }
    roots
}
