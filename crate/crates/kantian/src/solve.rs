//! One-dimensional search primitives shared by the solvers. Objective
//! closures return `None` at infeasible points (domain violations);
//! scans skip them and never bracket across a gap.

/// Inclusive sample of `f` at `n + 1` evenly spaced points.
pub(crate) fn sample<F>(f: F, lo: f64, hi: f64, n: usize) -> Vec<(f64, Option<f64>)>
where
    F: Fn(f64) -> Option<f64>,
{
    let n = n.max(1);
    (0..=n)
        .map(|i| {
            let x = lo + (hi - lo) * (i as f64) / (n as f64);
            (x, f(x))
        })
        .collect()
}

/// Index of the largest sampled value; ties go to the smallest x.
pub(crate) fn argmax(samples: &[(f64, Option<f64>)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, (_, v)) in samples.iter().enumerate() {
        if let Some(v) = v {
            match best {
                Some(b) => {
                    let bv = samples[b].1.unwrap();
                    if *v > bv {
                        best = Some(i);
                    }
                }
                None => best = Some(i),
            }
        }
    }
    best
}

/// Widest index separation among samples within `tol` of the maximum.
pub(crate) fn near_max_span(samples: &[(f64, Option<f64>)], max: f64, tol: f64) -> usize {
    let mut first = None;
    let mut last = 0;
    for (i, (_, v)) in samples.iter().enumerate() {
        if let Some(v) = v {
            if *v >= max - tol {
                if first.is_none() {
                    first = Some(i);
                }
                last = i;
            }
        }
    }
    first.map(|f| last - f).unwrap_or(0)
}

/// Golden-section maximization on [a, b]; infeasible evaluations count
/// as minus infinity. Returns (argmax, value).
pub(crate) fn golden_max<F>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> Option<f64>,
{
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let val = |x: f64| f(x).unwrap_or(f64::NEG_INFINITY);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = val(c);
    let mut fd = val(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = val(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = val(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = val(mid);
    if fm.is_finite() {
        (mid, fm)
    } else if fc.is_finite() && fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection on a bracketed sign change. `fa` and `fb` must have
/// opposite signs; returns None if an interior point is infeasible.
pub(crate) fn bisect<F>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    tol: f64,
    max_iter: usize,
) -> Option<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Some(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// All roots of `f` on [lo, hi] found by an n-cell sign-change scan
/// plus exact zeros at grid points. Roots are deduplicated to `merge`.
pub(crate) fn scan_roots<F>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
    tol: f64,
    merge: f64,
    max_iter: usize,
) -> Vec<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let samples = sample(f, lo, hi, n.max(1));
    let mut roots = Vec::new();
    for i in 0..samples.len() {
        let (x, v) = samples[i];
        let Some(v) = v else { continue };
        if v == 0.0 {
            push_root(&mut roots, x, merge);
            continue;
        }
        if i + 1 < samples.len() {
            let (x2, v2) = samples[i + 1];
            let Some(v2) = v2 else { continue };
            if v2 != 0.0 && (v > 0.0) != (v2 > 0.0) {
                if let Some(r) = bisect(f, x, x2, v, tol, max_iter) {
                    push_root(&mut roots, r, merge);
                }
            }
        }
    }
    roots
}

pub(crate) fn push_root(roots: &mut Vec<f64>, r: f64, merge: f64) {
    if !roots.iter().any(|&q| (q - r).abs() <= merge) {
        roots.push(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| Some(-(x - 1.7) * (x - 1.7)), 0.0, 5.0, 1e-10, 200);
        assert!((x - 1.7).abs() < 1e-6);
        assert!(v <= 0.0);
    }

    #[test]
    fn golden_skips_infeasible_region() {
        let f = |x: f64| if x < 0.5 { None } else { Some(-(x - 1.0) * (x - 1.0)) };
        let (x, _) = golden_max(f, 0.4, 3.0, 1e-10, 200);
        assert!((x - 1.0).abs() < 1e-6);
    }

    #[test]
    fn scan_finds_multiple_roots_and_exact_zeros() {
        // Roots at 0 (exact grid point), 1, and 2 on a 4-cell grid over [0, 2].
        let f = |x: f64| Some(x * (x - 1.0) * (x - 2.0));
        let roots = scan_roots(&f, 0.0, 2.0, 4, 1e-12, 1e-6, 200);
        assert_eq!(roots.len(), 3);
        assert!((roots[0] - 0.0).abs() < 1e-9);
        assert!((roots[1] - 1.0).abs() < 1e-9);
        assert!((roots[2] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn scan_does_not_bracket_across_gaps() {
        // Sign flips across an infeasible gap; no root exists there.
        let f = |x: f64| if (0.9..1.1).contains(&x) { None } else { Some(if x < 1.0 { 1.0 } else { -1.0 }) };
        let roots = scan_roots(&f, 0.0, 2.0, 64, 1e-12, 1e-6, 200);
        assert!(roots.is_empty());
    }
}
