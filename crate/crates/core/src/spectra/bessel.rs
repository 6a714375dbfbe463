//! Bessel evaluators and zero finders for the rotation-invariant model
//! spectra. J_ν uses the ascending series below the crossover argument and
//! Hankel's asymptotic expansion above it, with upward recurrence from
//! fractional-order anchors (stable while order ≤ argument, which holds at
//! every zero since j_{ν,1} > ν). Y is provided for integer and half-integer
//! orders, where upward recurrence is stable at any order.

use crate::error::{Error, Result};

/// Series/asymptotics crossover. Below: ascending series (cancellation
/// bounded, ≈ 1e−11 absolute at the crossover). Above: Hankel expansion
/// (optimal truncation error ≈ e^{−2x}).
const CROSSOVER: f64 = 16.0;

/// ln Γ(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    let z = x - 1.0;
    let mut a = 0.99999999999980993;
    for (i, c) in COEF.iter().enumerate() {
        a += c / (z + i as f64 + 1.0);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Ascending series for J_ν(x), any ν ≥ 0, small/moderate x.
fn j_series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let q = 0.25 * x * x;
    let mut term = (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term *= -q / (kf * (nu + kf));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-280) && k as f64 > 0.5 * x {
            break;
        }
    }
    sum
}

/// Hankel asymptotic amplitude/phase sums P(ν, x), Q(ν, x), truncated at the
/// smallest term: P = Σ (−1)^k t_{2k}, Q = Σ (−1)^k t_{2k+1} with
/// t_j = Π_{i≤j}(4ν²−(2i−1)²) / (j!·(8x)^j).
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu4 = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut t = 1.0;
    for j in 0..80usize {
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if j % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        let next = t * (mu4 - ((2 * j + 1) as f64).powi(2)) / (((j + 1) as f64) * 8.0 * x);
        if next.abs() >= t.abs() || t.abs() < 1e-18 {
            break;
        }
        t = next;
    }
    (p, q)
}

/// (J_ν, Y_ν) for 0 ≤ ν ≤ 2, x ≥ CROSSOVER, via the Hankel expansion.
fn jy_asymptotic(nu: f64, x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(nu, x);
    let omega = x - nu * std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4;
    let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
    (amp * (p * omega.cos() - q * omega.sin()), amp * (p * omega.sin() + q * omega.cos()))
}

/// (J_ν, neighbor) where neighbor = J_{ν−1} for ν ≥ 1 and J_{ν+1} for ν < 1,
/// so a derivative can always be formed. Requires ν ≥ 0 and, on the
/// asymptotic path, ν ≤ x (guaranteed in zero scans since j_{ν,1} > ν).
fn j_with_neighbor(nu: f64, x: f64) -> Result<(f64, f64)> {
    if !(nu >= 0.0) || !(x > 0.0) {
        return Err(Error::InvalidDomain("Bessel evaluation requires ν ≥ 0, x > 0".into()));
    }
    if x < CROSSOVER {
        let other = if nu >= 1.0 { j_series(nu - 1.0, x) } else { j_series(nu + 1.0, x) };
        return Ok((j_series(nu, x), other));
    }
    if nu > x {
        return Err(Error::Numerical(format!(
            "J_ν upward recurrence invalid for ν = {nu} > x = {x}"
        )));
    }
    // Fractional anchors μ, μ+1 with μ ∈ [0, 1), then stable upward
    // recurrence J_{k+1} = (2k/x)·J_k − J_{k−1}: every order stays ≤ ν ≤ x.
    let mu = nu - nu.floor();
    let (j_mu, _) = jy_asymptotic(mu, x);
    let (j_mu1, _) = jy_asymptotic(mu + 1.0, x);
    if nu < 1.0 {
        return Ok((j_mu, j_mu1));
    }
    let (mut jm, mut j) = (j_mu, j_mu1);
    let mut order = mu + 1.0;
    while order < nu - 0.5 {
        let jn = (2.0 * order / x) * j - jm;
        jm = j;
        j = jn;
        order += 1.0;
    }
    Ok((j, jm))
}

/// J_ν(x) and its derivative J'_ν(x).
pub fn bessel_j_and_deriv(nu: f64, x: f64) -> Result<(f64, f64)> {
    let (j, other) = j_with_neighbor(nu, x)?;
    let deriv = if nu >= 1.0 {
        // other = J_{ν−1}
        other - (nu / x) * j
    } else {
        // other = J_{ν+1}
        (nu / x) * j - other
    };
    Ok((j, deriv))
}

pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    Ok(j_with_neighbor(nu, x)?.0)
}

/// Y_ν(x) for integer or half-integer ν ≥ 0 (upward recurrence is stable for
/// Y at every order).
pub fn bessel_y(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidDomain("Y_ν requires x > 0".into()));
    }
    let two_nu = 2.0 * nu;
    if (two_nu - two_nu.round()).abs() > 1e-12 || nu < 0.0 {
        return Err(Error::Unsupported(
            "Y_ν implemented for integer and half-integer orders only".into(),
        ));
    }
    let half_integer = (nu - nu.floor() - 0.5).abs() < 1e-12;
    let (mut ym, mut y, order) = if half_integer {
        let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
        // Y_{1/2} = −√(2/πx)·cos x; Y_{3/2} = −√(2/πx)·(cos x/x + sin x).
        (-amp * x.cos(), -amp * (x.cos() / x + x.sin()), 0.5)
    } else if x >= CROSSOVER {
        (jy_asymptotic(0.0, x).1, jy_asymptotic(1.0, x).1, 0.0)
    } else {
        (y0_series(x), y1_series(x), 0.0)
    };
    if (nu - order).abs() < 0.25 {
        return Ok(ym);
    }
    let mut k = order + 1.0;
    while k < nu - 0.25 {
        let yn = (2.0 * k / x) * y - ym;
        ym = y;
        y = yn;
        k += 1.0;
    }
    Ok(y)
}

const EULER_GAMMA: f64 = 0.5772156649015328606;

/// Ascending series for Y₀ (x below crossover).
fn y0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0; // (x²/4)^k / (k!)²
    let mut h = 0.0; // harmonic number H_k
    let mut sum = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * kf);
        h += 1.0 / kf;
        let contrib = if k % 2 == 1 { term * h } else { -term * h };
        sum += contrib;
        if term < 1e-18 && kf > 0.5 * x {
            break;
        }
    }
    (2.0 / std::f64::consts::PI) * (((0.5 * x).ln() + EULER_GAMMA) * j_series(0.0, x) + sum)
}

/// Ascending series for Y₁ (x below crossover).
fn y1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    // Σ_k (−1)^k (ψ(k+1) + ψ(k+2)) (x/2)^{2k+1} / (k! (k+1)!)
    let mut term = 0.5 * x; // (x/2)^{2k+1}/(k!(k+1)!), k = 0
    let mut psi_sum = -2.0 * EULER_GAMMA + 1.0; // ψ(1) + ψ(2)
    let mut sum = term * psi_sum;
    for k in 1..400 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        psi_sum += 1.0 / kf + 1.0 / (kf + 1.0);
        sum += term * psi_sum;
        if term.abs() < 1e-18 && kf > 0.5 * x {
            break;
        }
    }
    (2.0 / std::f64::consts::PI) * (0.5 * x).ln() * j_series(1.0, x)
        - (2.0 / (std::f64::consts::PI * x))
        - sum / std::f64::consts::PI
}

/// Refine a bracketed root of `f` by bisection followed by safeguarded
/// Newton steps using `fd` = (value, derivative).
fn refine_root(
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    fd: &mut dyn FnMut(f64) -> Result<(f64, f64)>,
) -> Result<f64> {
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let (fm, _) = fd(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (f, df) = fd(t)?;
        if df == 0.0 {
            break;
        }
        let step = f / df;
        let tn = t - step;
        t = if tn > lo && tn < hi { tn } else { 0.5 * (lo + hi) };
        if step.abs() < 1e-13 * t.max(1.0) {
            break;
        }
    }
    Ok(t)
}

/// Ascending zeros j_{ν,k} of J_ν in (0, t_max], each to 1e−10 absolute.
/// Sign-scan with unit step (consecutive zeros are separated by more than π
/// asymptotically and more near the first zero), then bisection + Newton.
pub fn bessel_zeros(nu: f64, t_max: f64) -> Result<Vec<f64>> {
    if !(nu >= 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidDomain("bessel_zeros requires ν ≥ 0, finite t_max".into()));
    }
    let mut zeros = Vec::new();
    // j_{ν,1} > ν always; start just above ν.
    let start = (nu + 0.25).max(0.05);
    if t_max <= start {
        return Ok(zeros);
    }
    let step = 1.0;
    let mut x = start;
    let mut fx = bessel_j(nu, x)?;
    while x < t_max {
        let xn = (x + step).min(t_max);
        let fn_ = bessel_j(nu, xn)?;
        if fx == 0.0 {
            zeros.push(x);
        } else if fx.signum() != fn_.signum() && fn_ != 0.0 {
            let root =
                refine_root(x, xn, fx, &mut |t| bessel_j_and_deriv(nu, t))?;
            if root <= t_max {
                zeros.push(root);
            }
        }
        x = xn;
        fx = fn_;
        if xn >= t_max {
            break;
        }
    }
    Ok(zeros)
}

/// Uniform (large-order) estimate of #{zeros of J_ν ≤ T}: the Debye phase
/// count (1/π)(√(T²−ν²) − ν·arccos(ν/T)). Used as an independent oracle.
pub fn debye_zero_count(nu: f64, t: f64) -> f64 {
    if t <= nu {
        return 0.0;
    }
    ((t * t - nu * nu).sqrt() - nu * (nu / t).acos()) / std::f64::consts::PI
}

/// Ascending zeros in (0, t_max] of the cylinder cross-product
/// J_ν(a t)·Y_ν(b t) − J_ν(b t)·Y_ν(a t) for 0 < a < b (annulus radial
/// problem). Integer and half-integer ν.
pub fn cross_product_zeros(nu: f64, a: f64, b: f64, t_max: f64) -> Result<Vec<f64>> {
    if !(0.0 < a && a < b) {
        return Err(Error::InvalidDomain("cross product needs 0 < a < b".into()));
    }
    let f = |t: f64| -> Result<f64> {
        Ok(bessel_j(nu, a * t)? * bessel_y(nu, b * t)?
            - bessel_j(nu, b * t)? * bessel_y(nu, a * t)?)
    };
    // Zeros are asymptotically spaced by π/(b−a); scan at a quarter of that.
    let step = 0.25 * std::f64::consts::PI / (b - a);
    let mut zeros = Vec::new();
    let mut x = 0.25 * step;
    let mut fx = f(x)?;
    while x < t_max {
        let xn = (x + step).min(t_max);
        let fn_ = f(xn)?;
        if fx != 0.0 && fx.signum() != fn_.signum() && fn_ != 0.0 {
            let h = 1e-6;
            let root = refine_root(x, xn, fx, &mut |t| {
                Ok((f(t)?, (f(t + h)? - f(t - h)?) / (2.0 * h)))
            })?;
            if root <= t_max {
                zeros.push(root);
            }
        }
        x = xn;
        fx = fn_;
        if xn >= t_max {
            break;
        }
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_zero_classics() {
        let z = bessel_zeros(0.0, 10.0).unwrap();
        let expect = [2.4048255576957728, 5.520078110286311, 8.653727912911013];
        assert_eq!(z.len(), 3);
        for (a, b) in z.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn half_integer_zeros_are_multiples_of_pi() {
        let z = bessel_zeros(0.5, 10.0).unwrap();
        assert_eq!(z.len(), 3);
        for (k, a) in z.iter().enumerate() {
            let expect = (k + 1) as f64 * std::f64::consts::PI;
            assert!((a - expect).abs() < 1e-10, "{a} vs {expect}");
        }
    }

    #[test]
    fn zero_count_matches_debye_estimate() {
        for nu in [0.0, 3.0, 10.5, 40.0] {
            let t = 50.0;
            let z = bessel_zeros(nu, t).unwrap();
            let est = debye_zero_count(nu, t);
            assert!(
                (z.len() as f64 - est).abs() <= 1.0,
                "ν={nu}: {} zeros vs estimate {est}",
                z.len()
            );
        }
    }

    #[test]
    fn zeros_interlace_in_order() {
        let t = 60.0;
        for nu in [0.0, 1.0, 2.5, 7.0] {
            let a = bessel_zeros(nu, t).unwrap();
            let b = bessel_zeros(nu + 1.0, t).unwrap();
            for k in 0..b.len().min(a.len().saturating_sub(1)) {
                assert!(a[k] < b[k] && b[k] < a[k + 1], "interlacing broken at ν={nu}, k={k}");
            }
        }
    }

    #[test]
    fn evaluator_consistency_across_crossover() {
        // Series and asymptotic paths must agree where both are valid;
        // compare through the Wronskian J_ν Y'_ν − J'_ν Y_ν = 2/(πx).
        for nu in [0.0, 1.0, 0.5, 2.5] {
            for x in [14.0, 16.0, 18.0, 30.0] {
                let j = bessel_j(nu, x).unwrap();
                let dy = (nu / x) * bessel_y(nu, x).unwrap() - bessel_y(nu + 1.0, x).unwrap();
                let (_, dj) = bessel_j_and_deriv(nu, x).unwrap();
                let y = bessel_y(nu, x).unwrap();
                let w = j * dy - dj * y;
                let expect = 2.0 / (std::f64::consts::PI * x);
                assert!((w - expect).abs() < 1e-8, "Wronskian ν={nu} x={x}: {w} vs {expect}");
            }
        }
    }

    #[test]
    fn high_order_zero_against_uniform_asymptotics() {
        // j_{ν,1} ≈ ν + 1.8557571·ν^{1/3} + 1.033150·ν^{−1/3} for large ν.
        let nu = 60.0;
        let z = bessel_zeros(nu, 75.0).unwrap();
        let approx = nu + 1.8557571 * nu.powf(1.0 / 3.0) + 1.033150 * nu.powf(-1.0 / 3.0);
        assert!(!z.is_empty());
        assert!((z[0] - approx).abs() < 0.01, "{} vs {approx}", z[0]);
    }

    #[test]
    fn half_integer_cross_product_closed_form() {
        // J_{1/2}, Y_{1/2} reduce the cross product to sin((b−a)t)/(√(ab)·πt/2…);
        // zeros at kπ/(b−a) exactly.
        let (a, b) = (1.0, 2.5);
        let z = cross_product_zeros(0.5, a, b, 12.0).unwrap();
        assert!(!z.is_empty());
        for (k, t) in z.iter().enumerate() {
            let expect = (k + 1) as f64 * std::f64::consts::PI / (b - a);
            assert!((t - expect).abs() < 1e-8, "{t} vs {expect}");
        }
    }

    #[test]
    fn integer_cross_product_residuals_and_spacing() {
        let (a, b) = (1.0, 2.0);
        let z = cross_product_zeros(0.0, a, b, 30.0).unwrap();
        assert!(z.len() >= 8);
        for t in &z {
            let r = bessel_j(0.0, a * t).unwrap() * bessel_y(0.0, b * t).unwrap()
                - bessel_j(0.0, b * t).unwrap() * bessel_y(0.0, a * t).unwrap();
            assert!(r.abs() < 1e-9, "residual {r} at {t}");
        }
        // McMahon: zeros approach spacing π/(b−a).
        let last_gap = z[z.len() - 1] - z[z.len() - 2];
        assert!((last_gap - std::f64::consts::PI / (b - a)).abs() < 0.01);
    }

    #[test]
    fn lgamma_against_factorials() {
        assert!((ln_gamma(5.0) - 24.0f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        assert!((ln_gamma(10.5) - 1133278.3889487855f64.ln()).abs() < 1e-10);
    }
}
