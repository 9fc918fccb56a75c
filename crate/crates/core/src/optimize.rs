//! Derivative-free scalar maximization on a bracket (Brent's golden-section /
//! parabolic-interpolation hybrid).

const GOLDEN: f64 = 0.381_966_011_250_105_1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarOptimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// `true` if the objective returned a non-finite value anywhere.
    pub saw_non_finite: bool,
}

/// Maximizes `f` over `[lo, hi]` to absolute tolerance `tol` in `x`.
///
/// Non-finite objective values are treated as `-∞` and flagged in the result.
/// The endpoints are evaluated too, so a monotone objective returns the better
/// endpoint.
pub fn brent_maximize<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> ScalarOptimum
where
    F: FnMut(f64) -> f64,
{
    let mut saw_non_finite = false;
    let mut evaluations = 0;
    // minimize g = −f
    let mut g = |x: f64| {
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            -v
        } else {
            saw_non_finite = true;
            f64::INFINITY
        }
    };

    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (ga, gb) = (g(a), g(b));
    let tol = tol.abs().max(1e-15);

    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = g(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = g(u);
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

    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = (x, fx);
    for (px, pg) in [(lo, ga), (hi, gb)] {
        if pg < best.1 {
            best = (px, pg);
        }
    }
    ScalarOptimum {
        x: best.0,
        value: -best.1,
        evaluations,
        saw_non_finite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_stub() {
        let r = brent_maximize(|a| -(a - 0.5) * (a - 0.5) + 3.0, -10.0, 10.0, 1e-8, 200);
        assert!((r.x - 0.5).abs() < 1e-7, "{}", r.x);
        assert!((r.value - 3.0).abs() < 1e-14);
        assert!(!r.saw_non_finite);
    }

    #[test]
    fn monotone_objective_hits_endpoint() {
        let r = brent_maximize(|a| a, -2.0, 1.0, 1e-10, 200);
        assert_eq!(r.x, 1.0);
    }

    #[test]
    fn asymmetric_concave() {
        // max of x·e^{−x} at x = 1
        let r = brent_maximize(|x| x * libm::exp(-x), 0.0, 8.0, 1e-10, 200);
        assert!((r.x - 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_finite_flagged() {
        let r = brent_maximize(|x| if x > 5.0 { f64::NAN } else { -(x - 1.0) * (x - 1.0) }, -10.0, 10.0, 1e-8, 200);
        assert!(r.saw_non_finite);
        assert!((r.x - 1.0).abs() < 1e-6);
    }
}
