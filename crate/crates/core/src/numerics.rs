//! Small numerical toolbox: Euler Gamma, bisection, finite differences,
//! quadrature, a symmetric Jacobi eigensolver and a deterministic sphere
//! lattice. Everything here is dependency-free and pure.

use num_complex::Complex64;

/// Constant value for `2 * sqrt(e / pi)`.
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;

/// Auxiliary variable when evaluating `gamma`.
const GAMMA_R: f64 = 10.900511;

/// Polynomial coefficients for the Lanczos approximation of the Gamma
/// function (Pugh, "An Analysis of the Lanczos Gamma Approximation", 2004).
static GAMMA_DK: &[f64] = &[
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];

/// Euler Gamma function, accurate to ~14 significant digits on the range
/// used by this crate (arguments in (0, 10)).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (t.0 as f64 - x));
        std::f64::consts::PI
            / ((std::f64::consts::PI * x).sin()
                * s
                * TWO_SQRT_E_OVER_PI
                * ((0.5 - x + GAMMA_R) / std::f64::consts::E).powf(0.5 - x))
    } else {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (x + t.0 as f64 - 1.0));
        s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + GAMMA_R) / std::f64::consts::E).powf(x - 0.5)
    }
}

/// Bisection on a bracketing interval. Returns the midpoint once the bracket
/// width drops below `tol`, or `None` if `f(lo)` and `f(hi)` do not straddle
/// zero.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer representable
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
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

/// Five-point central finite difference, O(h^4) truncation.
pub fn deriv_central5<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Composite trapezoid over an explicit (time, value) sample grid.
/// Zero-width intervals (duplicated abscissae) contribute nothing.
pub fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(ts.len(), ys.len());
    let mut acc = 0.0;
    for i in 1..ts.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (ts[i] - ts[i - 1]);
    }
    acc
}

/// Smallest representative of an angle in (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y <= -std::f64::consts::PI {
        y += two_pi;
    } else if y > std::f64::consts::PI {
        y -= two_pi;
    }
    y
}

/// Deterministic, roughly uniform lattice of `n` points on the unit sphere
/// (golden-angle spiral). Used for reproducible audit sampling.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Eigenvalues of a real symmetric 8x8 matrix by cyclic Jacobi rotations,
/// ascending order.
pub fn symmetric8_eigenvalues(mut a: [[f64; 8]; 8]) -> [f64; 8] {
    const N: usize = 8;
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev = [0.0; 8];
    for (i, e) in ev.iter_mut().enumerate() {
        *e = a[i][i];
    }
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Eigenvalues of a 4x4 Hermitian matrix, ascending. The matrix H = X + iY is
/// embedded as the real symmetric [[X, -Y], [Y, X]], whose spectrum is that of
/// H with every eigenvalue doubled.
pub fn hermitian4_eigenvalues(h: &[[Complex64; 4]; 4]) -> [f64; 4] {
    let mut m = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = h[i][j].re;
            m[i + 4][j + 4] = h[i][j].re;
            m[i][j + 4] = -h[i][j].im;
            m[i + 4][j] = h[i][j].im;
        }
    }
    let ev = symmetric8_eigenvalues(m);
    [ev[0], ev[2], ev[4], ev[6]]
}
