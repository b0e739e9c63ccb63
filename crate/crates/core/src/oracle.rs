//! Slow brute-force references for tests and the verification suite.
//!
//! Nothing here touches the hypergeometric closed forms. Quadrature is an
//! adaptive Gauss–Legendre bisection separate from [`crate::quad`], and the
//! ₂F₁ reference sums its series in double-double arithmetic.

use crate::analytic::{rlfbm_inc_sm, IncrementForm};
use crate::error::{domain, Error, Result};
use crate::specfun::Hyp2F1Args;

/// Tolerance of [`quad_ito_cov`] and [`quad_i`].
pub const COV_TOL: f64 = 1e-11;
/// Tolerance of [`quad_etamsd`].
pub const ETAMSD_TOL: f64 = 1e-9;
/// Term cap of [`series_2f1_ref`].
pub const REF_SERIES_CAP: usize = 50_000_000;

const GL_N: usize = 12;
const MAX_DEPTH: u32 = 80;

fn valid_h(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(domain("H", h, "Hurst exponent must lie in (0, 1)"))
    }
}

struct GaussLegendre {
    x: [f64; GL_N],
    w: [f64; GL_N],
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on P_n.
    fn new() -> Self {
        let mut x = [0.0; GL_N];
        let mut w = [0.0; GL_N];
        let n = GL_N as f64;
        for i in 0..GL_N {
            let mut r = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, r);
                for k in 2..=GL_N {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (r * p1 - p0) / (r * r - 1.0);
                let step = p1 / dp;
                r -= step;
                if step.abs() < 1e-17 {
                    break;
                }
            }
            x[i] = r;
            w[i] = 2.0 / ((1.0 - r * r) * dp * dp);
        }
        Self { x, w }
    }

    fn apply<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> Result<f64> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for i in 0..GL_N {
            let y = f(c + h * self.x[i]);
            if !y.is_finite() {
                return Err(domain("integrand", y, "non-finite value in oracle quadrature"));
            }
            s += self.w[i] * y;
        }
        Ok(s * h)
    }
}

/// Adaptive bisection: a panel is accepted when its two halves agree with
/// the whole to within its length share of the tolerance.
fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let gl = GaussLegendre::new();
    let panels = 16;
    let width = (b - a) / panels as f64;
    let mut stack: alloc::vec::Vec<(f64, f64, f64, u32)> = alloc::vec::Vec::new();
    let mut rough = 0.0;
    for k in 0..panels {
        let lo = a + width * k as f64;
        let hi = if k + 1 == panels { b } else { lo + width };
        let v = gl.apply(&mut f, lo, hi)?;
        rough += v;
        stack.push((lo, hi, v, 0));
    }
    let budget = tol * rough.abs().max(tol);
    let span = (b - a).abs();
    let mut total = 0.0;
    let mut comp = 0.0;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl.apply(&mut f, lo, mid)?;
        let right = gl.apply(&mut f, mid, hi)?;
        let halves = left + right;
        if (halves - whole).abs() <= budget * (hi - lo).abs() / span {
            let y = halves - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
            continue;
        }
        if depth >= MAX_DEPTH || mid == lo || mid == hi {
            return Err(Error::NonConvergence {
                what: "oracle quadrature",
                limit: MAX_DEPTH as usize,
            });
        }
        stack.push((lo, mid, left, depth + 1));
        stack.push((mid, hi, right, depth + 1));
    }
    Ok(total)
}

/// Cov(B*(t), B*(t+τ)) by the Itô isometry,
/// 2H ∫₀^t r^{H−½}(r+τ)^{H−½} dr with r = t − s.
///
/// For H < ½ the substitution r = v^{1/(H+½)} absorbs r^{H−½} exactly, and
/// H > ½ uses r = v^{2/(H+½)} so the integrand stays smooth at zero. At
/// τ = 0 the combined power r^{2H−1} is absorbed by r = v^{1/(2H)}.
pub fn quad_ito_cov(h: f64, t: f64, tau: f64) -> Result<f64> {
    valid_h(h)?;
    if !(t >= 0.0) || !(tau >= 0.0) || t.is_infinite() || tau.is_infinite() {
        return Err(domain("t, tau", t, "need finite t >= 0 and tau >= 0"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if h == 0.5 {
        return Ok(t);
    }
    let e = h - 0.5;
    if tau == 0.0 {
        let k = 1.0 / (2.0 * h);
        return Ok(adaptive(|_| 1.0, 0.0, libm::pow(t, 2.0 * h), COV_TOL)? * 2.0 * h * k);
    }
    if h < 0.5 {
        let k = 1.0 / (h + 0.5);
        let g = |v: f64| libm::pow(libm::pow(v, k) + tau, e);
        let end = libm::pow(t, h + 0.5);
        let knee = libm::pow(tau.min(t), h + 0.5);
        let s = adaptive(g, 0.0, knee, COV_TOL)? + adaptive(g, knee, end, COV_TOL)?;
        return Ok(2.0 * h * k * s);
    }
    // r = v^m with m = 2/(H+½) turns r^{H−½} dr into m v dv
    let m = 2.0 / (h + 0.5);
    let g = |v: f64| m * v * libm::pow(libm::pow(v, m) + tau, e);
    let end = libm::pow(t, 1.0 / m);
    let knee = libm::pow(tau.min(t), 1.0 / m);
    Ok(2.0 * h * (adaptive(g, 0.0, knee, COV_TOL)? + adaptive(g, knee, end, COV_TOL)?))
}

/// I(t, τ; H) = ∫₀^{t/τ} [(1+u)^{H−½} − u^{H−½}]² du.
///
/// On [0, 1] u = v^m with m = max(2, 1/(2H)), so the u^{2H−1} endpoint
/// behaviour becomes bounded; beyond 1 the range is cut into doubling panels.
pub fn quad_i(t: f64, tau: f64, h: f64) -> Result<f64> {
    valid_h(h)?;
    if !(t >= 0.0) || !(tau > 0.0) || t.is_infinite() {
        return Err(domain("t, tau", t, "need finite t >= 0 and tau > 0"));
    }
    let x = t / tau;
    if x == 0.0 || h == 0.5 {
        return Ok(0.0);
    }
    let e = h - 0.5;
    let gap = |u: f64| libm::pow(1.0 + u, e) - libm::pow(u, e);
    let m = (1.0 / (2.0 * h)).max(2.0);
    let head_end = libm::pow(x.min(1.0), 1.0 / m);
    let mut total = adaptive(
        |v| {
            if v <= 0.0 {
                return if m * 2.0 * h == 1.0 { m } else { 0.0 };
            }
            let u = libm::pow(v, m);
            let g = gap(u);
            g * g * m * u / v
        },
        0.0,
        head_end,
        COV_TOL,
    )?;
    let mut lo = 1.0;
    while lo < x {
        let hi = (2.0 * lo).min(x);
        total += adaptive(
            |u| {
                let g = gap(u);
                g * g
            },
            lo,
            hi,
            COV_TOL,
        )?;
        lo = hi;
    }
    Ok(total)
}

/// (1/(T−τ)) ∫₀^{T−τ} E[(B*(t+τ) − B*(t))²] dt with the kernel-form
/// increment moment as integrand.
///
/// [0, τ] uses t = τ v^m, m = max(2, 1/H); the rest runs in s = ln t.
pub fn quad_etamsd(h: f64, tau: f64, horizon: f64) -> Result<f64> {
    valid_h(h)?;
    if !(tau > 0.0) || !(horizon > tau) || horizon.is_infinite() {
        return Err(domain("T", horizon, "need 0 < tau < T < inf"));
    }
    if h == 0.5 {
        return Ok(tau);
    }
    let d = horizon - tau;
    let mut err = None;
    let mut inc = |t: f64| match rlfbm_inc_sm(h, t, tau, IncrementForm::Kernel) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    let m = (1.0 / h).max(2.0);
    let near = d.min(tau);
    let head = adaptive(
        |v| {
            if v <= 0.0 {
                return 0.0;
            }
            let t = near * libm::pow(v, m);
            inc(t) * near * m * t / (near * v)
        },
        0.0,
        1.0,
        ETAMSD_TOL * 0.1,
    );
    let mut total = head?;
    if d > tau {
        let (mut lo, end) = (libm::log(tau), libm::log(d));
        while lo < end {
            let hi = (lo + 1.0).min(end);
            total += adaptive(
                |s| {
                    let t = libm::exp(s);
                    inc(t) * t
                },
                lo,
                hi,
                ETAMSD_TOL * 0.1,
            )?;
            lo = hi;
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total / d)
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let r = Self::renorm(s.hi, s.lo + t.hi);
        Self::renorm(r.hi, r.lo + t.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = libm::fma(self.hi, o.hi, -p);
        Self::renorm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::from(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Self::from(-q2)));
        let q3 = r.hi / o.hi;
        let q = Self::renorm(q1, q2);
        q.add(Self::from(q3))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Reference ₂F₁(a, b; c; z) by exhaustive series summation.
///
/// For z < −½ the Pfaff form (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)) is summed
/// instead. Every term and the running sum are kept in double-double;
/// summation stops once the geometric tail bound falls below 1e-20 of the
/// sum. Arguments mapping to |w| close to one need many terms.
pub fn series_2f1_ref(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, c, z } = args;
    if !(z < 1.0) || !z.is_finite() {
        return Err(domain("z", z, "reference series needs z < 1"));
    }
    if c <= 0.0 && c == libm::floor(c) {
        return Err(domain("c", c, "c must not be a nonpositive integer"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let (a, b, w, pre) = if z < -0.5 {
        let one_minus = Dd::two_sum(1.0, -z);
        let w = Dd::from(z).div(one_minus).mul(Dd::from(-1.0));
        (a, c - b, w, libm::pow(1.0 - z, -a))
    } else {
        (a, b, Dd::from(z), 1.0)
    };
    let wf = w.to_f64().abs();
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    for n in 0..REF_SERIES_CAP {
        let nf = n as f64;
        let num = Dd::two_sum(a, nf).mul(Dd::two_sum(b, nf));
        let den = Dd::two_sum(c, nf).mul(Dd::from(nf + 1.0));
        let ratio = num.div(den).mul(w);
        term = term.mul(ratio);
        if term.hi == 0.0 {
            return Ok(pre * sum.to_f64());
        }
        sum = sum.add(term);
        let r = ratio.hi.abs().max(wf);
        if r < 1.0 && nf > (a.abs() + b.abs() + c.abs()) {
            let tail = term.hi.abs() * r / (1.0 - r);
            if tail <= 1e-20 * sum.hi.abs() {
                return Ok(pre * sum.to_f64());
            }
        }
    }
    Err(Error::NonConvergence {
        what: "reference hypergeometric series",
        limit: REF_SERIES_CAP,
    })
}

/// ln Γ(x) for x > 0 by upward shift and the Stirling series.
///
/// Independent of the main log-gamma; the shift to y ≥ 8 keeps the
/// truncated series below 1e-16 and the leading terms small.
pub fn ln_gamma_ref(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("x", x, "reference log-gamma needs finite x > 0"));
    }
    const SHIFT: f64 = 8.0;
    let mut y = x;
    let mut prod = Dd::from(1.0);
    let mut log_acc = 0.0;
    while y < SHIFT {
        prod = prod.mul(Dd::from(y));
        if prod.hi > 1e200 {
            log_acc += libm::log(prod.hi) + prod.lo / prod.hi;
            prod = Dd::from(1.0);
        }
        y += 1.0;
    }
    log_acc += libm::log(prod.hi) + prod.lo / prod.hi;
    // B_{2k} / (2k (2k − 1)) for k = 1..8
    const STIRLING: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    let ln_y = libm::log(y);
    let main = libm::fma(y - 0.5, ln_y, -y) + 0.918_938_533_204_672_8;
    Ok(main + corr - log_acc)
}

/// C(H) = 2H Γ(½+H)² / (Γ(1+2H) sin πH) from [`ln_gamma_ref`].
pub fn rl_prefactor_ref(h: f64) -> Result<f64> {
    valid_h(h)?;
    let lg = 2.0 * ln_gamma_ref(0.5 + h)? - ln_gamma_ref(1.0 + 2.0 * h)?;
    Ok(2.0 * h * libm::exp(lg) / libm::sin(core::f64::consts::PI * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new();
        let mut f = |x: f64| libm::pow(x, 23.0) + x * x;
        let v = gl.apply(&mut f, 0.0, 1.0).unwrap();
        assert!(rel(v, 1.0 / 24.0 + 1.0 / 3.0) < 1e-14);
    }

    #[test]
    fn ito_cov_trivial_cases() {
        assert_eq!(quad_ito_cov(0.5, 2.5, 0.3).unwrap(), 2.5);
        assert_eq!(quad_ito_cov(0.3, 0.0, 1.0).unwrap(), 0.0);
        assert!(rel(quad_ito_cov(0.3, 2.0, 0.0).unwrap(), libm::pow(2.0, 0.6)) < 1e-13);
    }

    #[test]
    fn ito_cov_frozen() {
        // 40-digit quadrature of the defining integral
        assert!(rel(quad_ito_cov(0.25, 1.0, 1.0).unwrap(), 0.613_977_837_766_164_876_7) < 1e-12);
        assert!(rel(quad_ito_cov(0.75, 1.0, 1.0).unwrap(), 1.336_020_337_976_286_015) < 1e-12);
    }

    #[test]
    fn kernel_integral_limit_constant() {
        let i = quad_i(1e4, 1.0, 0.25).unwrap();
        assert!(rel(i + 2.0, 2.396_280_427_807_642_5) < 1e-11);
        assert!(rel(i + 2.0, 2.396_280_469_471_184) < 5e-3);
        assert_eq!(quad_i(0.0, 1.0, 0.3).unwrap(), 0.0);
        assert_eq!(quad_i(3.0, 1.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn etamsd_frozen() {
        assert_eq!(quad_etamsd(0.5, 0.7, 9.0).unwrap(), 0.7);
        assert!(rel(quad_etamsd(0.25, 1.0, 10.0).unwrap(), 1.192_131_891_884_960_700_7) < 1e-10);
        assert!(rel(quad_etamsd(0.75, 1.0, 10.0).unwrap(), 1.211_004_353_322_295_165_6) < 1e-10);
    }

    #[test]
    fn series_ref_frozen() {
        let r = |a, b, c, z| series_2f1_ref(Hyp2F1Args::new(a, b, c, z)).unwrap();
        assert_eq!(r(0.3, 0.7, 1.2, 0.0), 1.0);
        assert!(rel(r(1.0, 1.0, 2.0, 0.5), 2.0 * core::f64::consts::LN_2) < 1e-15);
        assert!(rel(r(0.25, 1.0, 1.75, 0.9), 1.274_340_508_004_058_554_953_493_7) < 1e-14);
        assert!(rel(r(0.4, 1.0, 1.6, 0.99), 2.075_963_693_812_040_280) < 1e-14);
        assert!(rel(r(0.6, 0.4, 2.6, -1e4), 0.085_544_615_264_752_489_52) < 1e-13);
    }

    #[test]
    fn series_ref_terminating_and_log() {
        let r = |a, b, c, z| series_2f1_ref(Hyp2F1Args::new(a, b, c, z)).unwrap();
        // ₂F₁(−2, b; c; z) = 1 − 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (0.7, 1.3, -3.0);
        let poly = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!(rel(r(-2.0, b, c, z), poly) < 1e-14);
        // ₂F₁(1, 1; 2; z) = −ln(1−z)/z
        for z in [-50.0, -0.7, 0.95] {
            assert!(rel(r(1.0, 1.0, 2.0, z), -libm::log1p(-z) / z) < 1e-14);
        }
    }

    #[test]
    fn ln_gamma_ref_frozen() {
        assert!((ln_gamma_ref(0.75).unwrap() - 0.203_280_951_431_295_37).abs() < 1e-14);
        assert!((ln_gamma_ref(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(ln_gamma_ref(1.0).unwrap().abs() < 1e-14);
        assert!(rel(rl_prefactor_ref(0.25).unwrap(), 1.198_140_234_735_592) < 1e-13);
        assert!(rel(rl_prefactor_ref(0.75).unwrap(), 1.311_028_777_146_060) < 1e-13);
    }

    #[test]
    fn bad_domains() {
        assert!(quad_ito_cov(1.0, 1.0, 1.0).is_err());
        assert!(quad_etamsd(0.3, 2.0, 1.0).is_err());
        assert!(series_2f1_ref(Hyp2F1Args::new(1.0, 1.0, 2.0, 1.0)).is_err());
        assert!(ln_gamma_ref(0.0).is_err());
    }
}
