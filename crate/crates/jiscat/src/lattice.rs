//! Finite-support Jacobi perturbations: class detection, Jost recursions in
//! polynomial form, and the Wronskian polynomials w and s.
//!
//! All scattering formulas assume the translated frame in which the doubled
//! sequence `q_{2n-1} = b_n, q_{2n} = 1 - a_n` is supported in
//! `[1 + nu, 2p - tau]`. `classify` records the translation; forward outputs
//! live in that frame.

use crate::error::{Error, Result};
use crate::poly::{symmetric_product, EtaSign, RealPolynomial, SymmetricLaurent, TRIM_REL_TOL};
use crate::report::Diagnostics;

/// Jacobi coefficients `(a_n, b_n)` on a finite window; `a_n = 1, b_n = 0`
/// outside. Canonical form trims free entries at both window ends.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSequence {
    offset: i64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl JacobiSequence {
    /// Canonicalize a raw window. Free values (`a = 1`, `b = 0`, exactly)
    /// are trimmed from both ends; the all-free input is the designated
    /// zero perturbation.
    pub fn normalize(a: &[f64], b: &[f64], offset: i64) -> Result<Self> {
        Self::normalize_with_tol(a, b, offset, 0.0)
    }

    /// Like `normalize`, treating entries with `|a - 1| <= tol` and
    /// `|b| <= tol` as free. Used on reconstruction output where the guard
    /// slots carry roundoff.
    pub fn normalize_with_tol(a: &[f64], b: &[f64], offset: i64, tol: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidCoefficient(
                "a and b windows must have equal length".into(),
            ));
        }
        for (&an, &bn) in a.iter().zip(b) {
            if !an.is_finite() || !bn.is_finite() {
                return Err(Error::InvalidCoefficient("non-finite entry".into()));
            }
            if an <= 0.0 {
                return Err(Error::InvalidCoefficient(format!(
                    "a entry {an} is not positive"
                )));
            }
        }
        let free = |i: usize| (a[i] - 1.0).abs() <= tol && b[i].abs() <= tol;
        let mut lo = 0;
        let mut hi = a.len();
        while lo < hi && free(lo) {
            lo += 1;
        }
        while hi > lo && free(hi - 1) {
            hi -= 1;
        }
        Ok(Self {
            offset: offset + lo as i64,
            a: a[lo..hi].to_vec(),
            b: b[lo..hi].to_vec(),
        })
    }

    /// The zero perturbation (empty window).
    pub fn free() -> Self {
        Self {
            offset: 0,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn is_free(&self) -> bool {
        self.a.is_empty()
    }

    /// Window as `(first, last)` lattice indices; `None` when free.
    pub fn window(&self) -> Option<(i64, i64)> {
        if self.a.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.a.len() as i64 - 1))
        }
    }

    pub fn a_at(&self, n: i64) -> f64 {
        let i = n - self.offset;
        if i >= 0 && (i as usize) < self.a.len() {
            self.a[i as usize]
        } else {
            1.0
        }
    }

    pub fn b_at(&self, n: i64) -> f64 {
        let i = n - self.offset;
        if i >= 0 && (i as usize) < self.b.len() {
            self.b[i as usize]
        } else {
            0.0
        }
    }

    /// Shift the lattice index by `delta` (entry at `n` moves to `n - delta`).
    pub fn translated(&self, delta: i64) -> Self {
        Self {
            offset: self.offset - delta,
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// Max deviation from `other` over the union of windows.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for q in [self, other] {
            if let Some((a, b)) = q.window() {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        if lo > hi {
            return 0.0;
        }
        let mut d = 0.0f64;
        for n in lo..=hi {
            d = d.max((self.a_at(n) - other.a_at(n)).abs());
            d = d.max((self.b_at(n) - other.b_at(n)).abs());
        }
        d
    }
}

/// Class parameters of a perturbation: `nu`, `tau`, the half-width `p`, the
/// translation into the canonical frame, and the derived sums used by the
/// asymptotic checks.
#[derive(Debug, Clone)]
pub struct ClassParams {
    pub nu: usize,
    pub tau: usize,
    pub p: usize,
    /// Lattice shift applied so the doubled support starts at `1 + nu`.
    pub shift: i64,
    /// Doubled support endpoints after translation: `[1 + nu, 2p - tau]`.
    pub support_lo: usize,
    pub support_hi: usize,
    /// `c_n = 1 - a_n^2` for n = 1..=p (translated frame).
    pub c: Vec<f64>,
    /// `beta_n = b_n + ... + b_p`.
    pub beta: Vec<f64>,
    /// `eta_n = a_n * ... * a_p`.
    pub eta: Vec<f64>,
}

impl ClassParams {
    /// `m = 2p - 1 - tau - nu`, the zero count of w and the sigma length.
    pub fn m(&self) -> usize {
        2 * self.p - 1 - self.tau - self.nu
    }

    /// Theorems require `m >= 3`; smaller inputs are accepted by the
    /// forward maps but flagged.
    pub fn below_theorem_scope(&self) -> bool {
        self.m() < 3
    }

    pub fn c_n(&self, n: usize) -> f64 {
        self.c[n - 1]
    }
    pub fn beta_n(&self, n: usize) -> f64 {
        self.beta[n - 1]
    }
    pub fn eta_n(&self, n: usize) -> f64 {
        self.eta[n - 1]
    }
}

/// Detect `(nu, tau, p)` and the translation into the canonical frame.
///
/// The support endpoints decide the class: `nu = 1` iff the first
/// nontrivial doubled entry sits in an `a` slot (`b_1 = 0`), `tau = 1` iff
/// the last sits in a `b` slot (`a_p = 1`).
pub fn classify(q: &JacobiSequence) -> Result<ClassParams> {
    let (lo, hi) = q.window().ok_or(Error::EmptySupport)?;

    // First nontrivial doubled index: b_n doubles to 2n-1, a_n to 2n.
    let first_doubled = {
        let n = lo;
        if q.b_at(n) != 0.0 {
            2 * n - 1
        } else {
            2 * n
        }
    };
    let last_doubled = {
        let n = hi;
        if q.a_at(n) != 1.0 {
            2 * n
        } else {
            2 * n - 1
        }
    };
    let nu = if first_doubled % 2 == 0 { 1 } else { 0 };
    let tau = if last_doubled % 2 == 0 { 0 } else { 1 };
    let shift = lo - 1;
    let p = (hi - shift) as usize;

    let t = q.translated(shift);
    let mut c = Vec::with_capacity(p);
    let mut beta = vec![0.0; p];
    let mut eta = vec![0.0; p];
    for n in 1..=p {
        let an = t.a_at(n as i64);
        c.push(1.0 - an * an);
    }
    let mut acc_b = 0.0;
    let mut acc_a = 1.0;
    for n in (1..=p).rev() {
        acc_b += t.b_at(n as i64);
        acc_a *= t.a_at(n as i64);
        beta[n - 1] = acc_b;
        eta[n - 1] = acc_a;
    }

    Ok(ClassParams {
        nu,
        tau,
        p,
        shift,
        support_lo: 1 + nu,
        support_hi: 2 * p - tau,
        c,
        beta,
        eta,
    })
}

/// Jost solutions in polynomial form: `psi_n^+ = z^n phi_n(z)` and
/// `psi_n^- = z^-n chi_n(z)`.
#[derive(Debug, Clone)]
pub struct JostTable {
    /// `phi[n]` for n = 0..=p+1; identically 1 from n = p+1 up.
    pub phi: Vec<RealPolynomial>,
    /// `chi[n]` for n = 0..=p+2; identically 1 from n = 0 down.
    pub chi: Vec<RealPolynomial>,
}

impl JostTable {
    pub fn compute(q: &JacobiSequence, params: &ClassParams) -> Self {
        let t = q.translated(params.shift);
        JostTable {
            phi: jost_plus(&t, params),
            chi: jost_minus(&t, params),
        }
    }
}

/// Downward recursion for `phi_n` from `phi_{p+1} = phi_{p+2} = 1`:
/// `a_{n-1} phi_{n-1} = (z^2 + 1 - b_n z) phi_n - a_n z^2 phi_{n+1}`.
/// Expects `q` already translated to the canonical frame.
pub fn jost_plus(q: &JacobiSequence, params: &ClassParams) -> Vec<RealPolynomial> {
    let p = params.p;
    let one = RealPolynomial::constant(1.0);
    let mut phi = vec![RealPolynomial::zero(); p + 2];
    phi[p + 1] = one.clone();
    let mut phi_above = one; // phi_{n+1} seen from index n = p+1
    for n in (1..=p + 1).rev() {
        let an = q.a_at(n as i64);
        let bn = q.b_at(n as i64);
        let a_prev = q.a_at(n as i64 - 1);
        // (z^2 + 1 - b_n z) phi_n
        let tri = RealPolynomial::new(vec![1.0, -bn, 1.0]).expect("finite");
        let term = tri.mul(&phi[n]).coeffs().to_vec();
        let sub = phi_above.shifted_up(2).scaled(an);
        let mut coeffs = term;
        for (k, c) in sub.coeffs().iter().enumerate() {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] -= c;
        }
        let prev = RealPolynomial::new(coeffs).expect("finite").scaled(1.0 / a_prev);
        phi_above = phi[n].clone();
        phi[n - 1] = prev;
    }
    phi
}

/// Upward recursion for `chi_n` from `chi_{-1} = chi_0 = 1`:
/// `a_n chi_{n+1} = (1 + z^2 - b_n z) chi_n - a_{n-1} z^2 chi_{n-1}`.
/// Expects `q` already translated. Entries run to n = p + 2 so Wronskian
/// checks can be evaluated at the upper window edge.
pub fn jost_minus(q: &JacobiSequence, params: &ClassParams) -> Vec<RealPolynomial> {
    let p = params.p;
    let one = RealPolynomial::constant(1.0);
    let mut chi = vec![RealPolynomial::zero(); p + 3];
    chi[0] = one.clone();
    let mut chi_below = one; // chi_{n-1}
    for n in 0..=(p + 1) as i64 {
        let an = q.a_at(n);
        let bn = q.b_at(n);
        let a_prev = q.a_at(n - 1);
        let tri = RealPolynomial::new(vec![1.0, -bn, 1.0]).expect("finite");
        let term = tri.mul(&chi[n as usize]).coeffs().to_vec();
        let sub = chi_below.shifted_up(2).scaled(a_prev);
        let mut coeffs = term;
        for (k, c) in sub.coeffs().iter().enumerate() {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] -= c;
        }
        let next = RealPolynomial::new(coeffs).expect("finite").scaled(1.0 / an);
        chi_below = chi[n as usize].clone();
        chi[n as usize + 1] = next;
    }
    chi
}

/// Forward output: the Wronskian polynomials together with the class data
/// and Jost tables they came from. `class` is `None` for the zero
/// perturbation (`w = 1 - z^2`, `s = 0`).
#[derive(Debug, Clone)]
pub struct WronskianPair {
    pub w: RealPolynomial,
    pub s: RealPolynomial,
    pub class: Option<ClassParams>,
    pub jost: Option<JostTable>,
}

/// Compute `w` and `s` in the translated frame:
/// `w = (1 - b_1 z) phi_1 - a_1 z^2 phi_2`,
/// `s = (z - b_1) phi_1 - a_1 z phi_2`.
pub fn wronskian_pair(q: &JacobiSequence) -> Result<WronskianPair> {
    if q.is_free() {
        return Ok(WronskianPair {
            w: RealPolynomial::new(vec![1.0, 0.0, -1.0]).expect("finite"),
            s: RealPolynomial::zero(),
            class: None,
            jost: None,
        });
    }
    let params = classify(q)?;
    let t = q.translated(params.shift);
    let jost = JostTable::compute(q, &params);
    let a1 = t.a_at(1);
    let b1 = t.b_at(1);
    let phi1 = &jost.phi[1];
    let phi2 = &jost.phi[2];

    let w_raw = {
        let lin = RealPolynomial::new(vec![1.0, -b1]).expect("finite");
        let mut coeffs = lin.mul(phi1).coeffs().to_vec();
        let sub = phi2.shifted_up(2).scaled(a1);
        for (k, c) in sub.coeffs().iter().enumerate() {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] -= c;
        }
        RealPolynomial::new(coeffs).expect("finite")
    };
    let s_raw = {
        let lin = RealPolynomial::new(vec![-b1, 1.0]).expect("finite");
        let mut coeffs = lin.mul(phi1).coeffs().to_vec();
        let sub = phi2.shifted_up(1).scaled(a1);
        for (k, c) in sub.coeffs().iter().enumerate() {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] -= c;
        }
        RealPolynomial::new(coeffs).expect("finite")
    };

    let w = w_raw.trimmed(TRIM_REL_TOL);
    let s = s_raw.trimmed(TRIM_REL_TOL);

    // Degree bookkeeping holds in theorem scope; smaller m hits the
    // boundary cases of the asymptotic expansions and is only flagged.
    let m = params.m();
    if m >= 3 {
        let expect_w = m;
        let expect_s = m + params.nu;
        if w.degree() != Some(expect_w) {
            return Err(Error::DegreeMismatch {
                which: "w",
                got: w.degree().map_or(0, |d| d),
                expected: expect_w,
            });
        }
        if s.degree() != Some(expect_s) {
            return Err(Error::DegreeMismatch {
                which: "s",
                got: s.degree().map_or(0, |d| d),
                expected: expect_s,
            });
        }
    }

    Ok(WronskianPair {
        w,
        s,
        class: Some(params),
        jost: Some(jost),
    })
}

/// The functional-equation residual `w(z)w(1/z) + eta^2 - s(z)s(1/z)`,
/// max over coefficients.
pub fn unitarity_coefficient_residual(w: &RealPolynomial, s: &RealPolynomial) -> f64 {
    let lhs = symmetric_product(w, EtaSign::Plus);
    let rhs = if s.is_zero() {
        SymmetricLaurent::new(vec![])
    } else {
        symmetric_product(s, EtaSign::Zero)
    };
    lhs.sub(&rhs).max_abs_coeff()
}

/// Residuals of the small-z and large-z expansions of w and s:
/// `w(0) = 1/eta_1`, `s(0) = -b_1/eta_1`, `w'(0)/w(0) = -beta_1`, and for
/// `tau = 0` the leading coefficient of s equals `c_p/eta_1`.
pub fn asymptotic_diagnostics(
    q: &JacobiSequence,
    w: &RealPolynomial,
    s: &RealPolynomial,
) -> Result<Diagnostics> {
    let params = classify(q)?;
    let t = q.translated(params.shift);
    let mut d = Diagnostics::new();
    if params.p < 2 {
        d.warn("expansions degenerate at p = 1; diagnostics reported anyway".to_string());
    }
    let eta1 = params.eta_n(1);
    let b1 = t.b_at(1);

    let r_w0 = (w.coeff(0) - 1.0 / eta1).abs();
    d.push("w(0) = 1/eta_1", r_w0 < 1e-9, Some(r_w0), format!("w(0) = {}", w.coeff(0)));

    let r_s0 = (s.coeff(0) - (-b1 / eta1)).abs();
    d.push("s(0) = -b_1/eta_1", r_s0 < 1e-9, Some(r_s0), format!("s(0) = {}", s.coeff(0)));

    let ratio = w.coeff(1) / w.coeff(0);
    let r_beta = (ratio + params.beta_n(1)).abs();
    d.push(
        "w'(0)/w(0) = -beta_1",
        r_beta < 1e-9,
        Some(r_beta),
        format!("ratio = {ratio}"),
    );

    if params.tau == 0 {
        let lead = s.leading();
        let r_lead = (lead - params.c_n(params.p) / eta1).abs();
        d.push(
            "lead(s) = c_p/eta_1",
            r_lead < 1e-9,
            Some(r_lead),
            format!("lead = {lead}"),
        );
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn q1() -> JacobiSequence {
        JacobiSequence::normalize(&[0.5], &[1.0], 1).unwrap()
    }
    pub fn q2() -> JacobiSequence {
        JacobiSequence::normalize(&[1.0, 0.5], &[1.0, 0.0], 1).unwrap()
    }

    #[test]
    fn normalize_trims_free_ends() {
        let q = JacobiSequence::normalize(&[1.0, 0.5, 1.0], &[0.0, 1.0, 0.0], 0).unwrap();
        assert_eq!(q.window(), Some((1, 1)));
        assert_eq!(q.a_at(1), 0.5);
        assert_eq!(q.b_at(1), 1.0);
    }

    #[test]
    fn normalize_all_free() {
        let q = JacobiSequence::normalize(&[1.0, 1.0], &[0.0, 0.0], 3).unwrap();
        assert!(q.is_free());
    }

    #[test]
    fn normalize_q2_with_padding() {
        let q =
            JacobiSequence::normalize(&[1.0, 1.0, 0.5, 1.0], &[0.0, 1.0, 0.0, 0.0], 0).unwrap();
        assert_eq!(q.window(), Some((1, 2)));
    }

    #[test]
    fn normalize_rejects_nonpositive_a() {
        assert!(JacobiSequence::normalize(&[0.0], &[1.0], 0).is_err());
    }

    #[test]
    fn classify_q1() {
        let p = classify(&q1()).unwrap();
        assert_eq!((p.nu, p.tau, p.p, p.m()), (0, 0, 1, 1));
        assert!(p.below_theorem_scope());
    }

    #[test]
    fn classify_q2() {
        let p = classify(&q2()).unwrap();
        assert_eq!((p.nu, p.tau, p.p, p.m()), (0, 0, 2, 3));
        assert_eq!(p.shift, 0);
        assert!(!p.below_theorem_scope());
    }

    #[test]
    fn classify_min_support() {
        // b_1 = 0 and a_2 = 1: support starts in the a slot and ends in the
        // b slot, so nu = tau = 1.
        let q = JacobiSequence::normalize(&[0.5, 1.0], &[0.0, 1.0], 1).unwrap();
        let p = classify(&q).unwrap();
        assert_eq!((p.nu, p.tau, p.p), (1, 1, 2));
    }

    #[test]
    fn classify_zero_perturbation() {
        assert!(matches!(
            classify(&JacobiSequence::free()),
            Err(Error::EmptySupport)
        ));
    }

    #[test]
    fn classify_translates() {
        let q = JacobiSequence::normalize(&[1.0, 0.5], &[1.0, 0.0], 5).unwrap();
        let p = classify(&q).unwrap();
        assert_eq!(p.shift, 4);
        assert_eq!((p.nu, p.tau, p.p), (0, 0, 2));
    }

    #[test]
    fn jost_plus_free() {
        let q = JacobiSequence::normalize(&[1.0, 0.5], &[1.0, 0.0], 1).unwrap();
        let params = classify(&q).unwrap();
        let phi = jost_plus(&q.translated(params.shift), &params);
        assert_eq!(phi[params.p + 1].coeffs(), &[1.0]);
    }

    #[test]
    fn jost_plus_q1() {
        let q = q1();
        let params = classify(&q).unwrap();
        let phi = jost_plus(&q, &params);
        // psi_p^+ = z^p / a_p
        assert_eq!(phi[1].coeffs(), &[2.0]);
        // phi_0 = 2 (0.75 z^2 - z + 1)
        assert_eq!(phi[0].coeffs(), &[2.0, -2.0, 1.5]);
    }

    #[test]
    fn jost_plus_q2() {
        let q = q2();
        let params = classify(&q).unwrap();
        let phi = jost_plus(&q, &params);
        assert_eq!(phi[2].coeffs(), &[2.0]);
        // psi_1^+ = (c_2 z^3 - b_2 z^2 + z)/(a_1 a_2) => phi_1 = 2 + 1.5 z^2
        assert_eq!(phi[1].coeffs(), &[2.0, 0.0, 1.5]);
    }

    #[test]
    fn jost_minus_q1() {
        let q = q1();
        let params = classify(&q).unwrap();
        let chi = jost_minus(&q, &params);
        assert_eq!(chi[1].coeffs(), &[1.0]);
        // psi_2^- = (1 - z b_1)/(a_1 z^2) => chi_2 = 2 (1 - z)
        assert_eq!(chi[2].coeffs(), &[2.0, -2.0]);
    }

    #[test]
    fn jost_minus_q2() {
        let q = q2();
        let params = classify(&q).unwrap();
        let chi = jost_minus(&q, &params);
        assert_eq!(chi[2].coeffs(), &[1.0, -1.0]);
    }

    #[test]
    fn wronskian_free_case() {
        let out = wronskian_pair(&JacobiSequence::free()).unwrap();
        assert_eq!(out.w.coeffs(), &[1.0, 0.0, -1.0]);
        assert!(out.s.is_zero());
        assert!(out.class.is_none());
    }

    #[test]
    fn wronskian_q1() {
        let out = wronskian_pair(&q1()).unwrap();
        assert_eq!(out.w.coeffs(), &[2.0, -2.0, -0.5]);
        assert_eq!(out.s.coeffs(), &[-2.0, 1.5]);
    }

    #[test]
    fn wronskian_q2() {
        let out = wronskian_pair(&q2()).unwrap();
        assert_eq!(out.w.coeffs(), &[2.0, -2.0, -0.5, -1.5]);
        assert_eq!(out.s.coeffs(), &[-2.0, 0.0, -1.5, 1.5]);
    }

    #[test]
    fn unitarity_identity_q2() {
        let out = wronskian_pair(&q2()).unwrap();
        assert!(unitarity_coefficient_residual(&out.w, &out.s) < 1e-12);
    }

    #[test]
    fn asymptotics_q2() {
        let q = q2();
        let out = wronskian_pair(&q).unwrap();
        let d = asymptotic_diagnostics(&q, &out.w, &out.s).unwrap();
        assert!(d.passed(), "{}", d.failure_summary());
        // w(0) = 2 = 1/(1 * 0.5), s(0) = -2, w'(0)/w(0) = -(b1+b2) = -1
        assert_eq!(out.w.coeff(0), 2.0);
        assert_eq!(out.s.coeff(0), -2.0);
        assert_eq!(out.w.coeff(1) / out.w.coeff(0), -1.0);
    }

    #[test]
    fn asymptotics_free_values() {
        let out = wronskian_pair(&JacobiSequence::free()).unwrap();
        assert_eq!(out.w.coeff(0), 1.0);
        assert!(out.s.is_zero());
    }
}
