//! Independent reference values: adaptive Gauss–Kronrod quadrature of the
//! defining exponential averages, with `statrs` supplying `erfc`.

#![allow(dead_code, clippy::excessive_precision)]

use noma_linklab::analytic::OperatingPoint;
use noma_linklab::channel::{db_to_linear, FadingProfile};
use statrs::function::erf::erfc;

pub fn q_ref(x: f64) -> f64 {
    if x < 0.0 {
        // statrs loses ~1e-13 relative accuracy for negative arguments
        1.0 - q_ref(-x)
    } else {
        0.5 * erfc(x / std::f64::consts::SQRT_2)
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol || depth >= 40 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1)
}

/// `∫₀^∞ f(t)·e^{−t} dt` to absolute accuracy `tol`. The range is cut at
/// every decade from 1e-24 to 1e2 so features at any scale are resolved;
/// the tail beyond 100 is below `e^{−100}` and dropped.
pub fn exp_average<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    let g = |t: f64| f(t) * (-t).exp();
    let mut edges = vec![0.0];
    edges.extend((-24..=2).map(|k| 10f64.powi(k)));
    let pieces = (edges.len() - 1) as f64;
    edges.windows(2).map(|w| adapt(&g, w[0], w[1], tol / pieces, 0)).sum()
}

/// `E[Q(√(2·c·G))]` with `G ~ Exp(mean)`, to relative accuracy ~1e-10.
pub fn avg_q(c: f64, mean: f64) -> f64 {
    // the value is about 1/(4·c·mean) for large arguments; scale the tolerance accordingly
    let scale = 0.25 / (1.0 + c * mean);
    exp_average(|t| q_ref((2.0 * c * mean * t).sqrt()), 1e-13 * scale)
}

fn betas(alpha: f64) -> [f64; 2] {
    let r = 2.0 * (alpha - alpha * alpha).sqrt();
    [1.0 + r, 1.0 - r]
}

/// Far-symbol detection error on a channel with mean power `sigma_sq`:
/// the two superposed amplitudes are equally likely and each sees its own
/// effective SNR after the estimation error is folded into the noise.
pub fn far_symbol_ref(alpha: f64, rho: f64, sigma_sq: f64, delta_sq: f64) -> f64 {
    betas(alpha)
        .iter()
        .map(|&b| 0.5 * avg_q(b * rho / (b * delta_sq * rho + 1.0), sigma_sq))
        .sum()
}

pub fn far_ref(pt: &OperatingPoint) -> f64 {
    let p = pt.profile();
    far_symbol_ref(pt.alpha(), pt.rho_s(), p.sigma2_sq(), p.delta_sq())
}

pub fn sic_ref(pt: &OperatingPoint) -> f64 {
    let p = pt.profile();
    far_symbol_ref(pt.alpha(), pt.rho_s(), p.sigma1_sq(), p.delta_sq())
}

pub fn near_correct_ref(pt: &OperatingPoint) -> f64 {
    let p = pt.profile();
    let rho = pt.rho_s();
    avg_q(pt.alpha() * rho / (p.delta_sq() * rho + 1.0), p.sigma1_sq())
}

pub fn near_ref(pt: &OperatingPoint) -> f64 {
    let ps = sic_ref(pt);
    0.5 * ps + (1.0 - ps) * near_correct_ref(pt)
}

pub fn point(alpha: f64, snr_db: f64, s1_db: f64, s2_db: f64, delta: f64) -> OperatingPoint {
    let profile = FadingProfile::from_db(s1_db, s2_db, delta).unwrap();
    OperatingPoint::new(alpha, db_to_linear(snr_db), profile).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}
