//! Small derivative-free optimizers used by the fitting routines.
//!
//! Nothing fancy: a Brent line minimizer for profile likelihoods and a
//! two-dimensional Nelder–Mead simplex for the censored top-k fit.

/// Golden section constant 2 − φ.
const CGOLD: f64 = 0.381_966_011_250_105_1;

/// Minimize `f` on `[lo, hi]` with Brent's combined golden-section /
/// parabolic-interpolation scheme. Returns `(x_min, f(x_min))`.
pub fn brent_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const MAX_ITER: usize = 200;
    const TINY: f64 = 1e-12;

    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = a + CGOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d = 0.0f64;
    let mut e = 0.0f64;

    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + TINY;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            // Try a parabola through (v, w, x).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if (u - a) < tol2 || (b - u) < tol2 {
                    d = if m > x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Minimize a two-dimensional function with the Nelder–Mead simplex.
///
/// `step` sets the initial simplex edge lengths. Returns the best vertex
/// and its value once the function spread across the simplex drops below
/// `tol` (or the iteration budget runs out).
pub fn nelder_mead2<F: FnMut([f64; 2]) -> f64>(
    mut f: F,
    start: [f64; 2],
    step: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> ([f64; 2], f64) {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut pts = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];

    for _ in 0..max_iter {
        // Order vertices: best first.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];

        if (vals[2] - vals[0]).abs() <= tol * (1.0 + vals[0].abs()) {
            break;
        }

        let centroid = [
            0.5 * (pts[0][0] + pts[1][0]),
            0.5 * (pts[0][1] + pts[1][1]),
        ];
        let reflect = [
            centroid[0] + ALPHA * (centroid[0] - pts[2][0]),
            centroid[1] + ALPHA * (centroid[1] - pts[2][1]),
        ];
        let f_reflect = f(reflect);

        if f_reflect < vals[0] {
            let expand = [
                centroid[0] + GAMMA * (reflect[0] - centroid[0]),
                centroid[1] + GAMMA * (reflect[1] - centroid[1]),
            ];
            let f_expand = f(expand);
            if f_expand < f_reflect {
                pts[2] = expand;
                vals[2] = f_expand;
            } else {
                pts[2] = reflect;
                vals[2] = f_reflect;
            }
        } else if f_reflect < vals[1] {
            pts[2] = reflect;
            vals[2] = f_reflect;
        } else {
            let contract = [
                centroid[0] + RHO * (pts[2][0] - centroid[0]),
                centroid[1] + RHO * (pts[2][1] - centroid[1]),
            ];
            let f_contract = f(contract);
            if f_contract < vals[2] {
                pts[2] = contract;
                vals[2] = f_contract;
            } else {
                for i in 1..3 {
                    pts[i] = [
                        pts[0][0] + SIGMA * (pts[i][0] - pts[0][0]),
                        pts[0][1] + SIGMA * (pts[i][1] - pts[0][1]),
                    ];
                    vals[i] = f(pts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (pts[best], vals[best])
}
