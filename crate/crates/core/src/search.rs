//! One-dimensional minimization on closed intervals.

use alloc::vec::Vec;

/// Where the minimum of a function on `[l, u]` may sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    /// Quasi-concave: the minimum is at an endpoint.
    QuasiConcave,
    /// Piecewise linear or piecewise constant with the given breakpoints.
    Breakpoints,
    /// No structure known; dense scan plus golden-section polish.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Minimum {
    pub value: f64,
    pub at: f64,
    pub exact: bool,
}

pub(crate) const DENSE_POINTS: usize = 4001;

pub(crate) fn minimize_on<F: Fn(f64) -> f64>(
    f: F,
    l: f64,
    u: f64,
    breakpoints: &[f64],
    shape: Shape,
) -> Minimum {
    let mut best = Minimum { value: f(l), at: l, exact: true };
    let offer = |t: f64, best: &mut Minimum| {
        let v = f(t);
        if v < best.value {
            best.value = v;
            best.at = t;
        }
    };
    if l == u {
        return best;
    }
    match shape {
        Shape::QuasiConcave => {
            offer(u, &mut best);
        }
        Shape::Breakpoints => {
            let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|&t| t > l && t < u).collect();
            pts.push(l);
            pts.push(u);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            // Midpoints catch the interior value of pieces bounded by jumps.
            for w in pts.windows(2) {
                offer(w[1], &mut best);
                offer(0.5 * (w[0] + w[1]), &mut best);
            }
        }
        Shape::Unknown => {
            best.exact = false;
            let n = DENSE_POINTS;
            let h = (u - l) / (n - 1) as f64;
            for i in 1..n {
                let t = if i == n - 1 { u } else { l + h * i as f64 };
                offer(t, &mut best);
            }
            for &t in breakpoints.iter().filter(|&&t| t > l && t < u) {
                offer(t, &mut best);
            }
            let lo = (best.at - h).max(l);
            let hi = (best.at + h).min(u);
            let (t, v) = golden(&f, lo, hi);
            if v < best.value {
                best.value = v;
                best.at = t;
            }
        }
    }
    best
}

fn golden<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
