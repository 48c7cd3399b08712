//! Real-coefficient polynomials, symmetric Laurent polynomials, root
//! finding, and reciprocal-pair bookkeeping. Everything downstream (Jost
//! recursions, class validators, the functional-equation solvers) sits on
//! this module.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for the root iteration.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Iteration budget for the simultaneous root iteration.
pub const ROOT_ITER_BUDGET: usize = 200;
/// Roots closer than this are treated as one zero with multiplicity.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Snap tolerance on ||t| - 1| for unit-circle zeros.
pub const CIRCLE_SNAP_TOL: f64 = 1e-9;
/// Default tolerance on |t * t' - 1| when matching reciprocal partners.
pub const DEFAULT_PAIR_TOL: f64 = 1e-8;
/// Relative tolerance for trimming trailing coefficients.
pub const TRIM_REL_TOL: f64 = 1e-10;

/// Dense real polynomial in ascending powers: `coeffs[k]` multiplies `z^k`.
///
/// Canonical form keeps the highest stored coefficient nonzero; the zero
/// polynomial is the empty coefficient array.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Build from ascending coefficients, trimming exact trailing zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidCoefficient(
                "polynomial coefficient is not finite".into(),
            ));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            Self::zero()
        } else {
            Self { coeffs: vec![c] }
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, 0 beyond the stored window.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drop trailing coefficients below `rel_tol` times the largest one.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let scale = self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs
            .last()
            .map_or(false, |c| c.abs() <= rel_tol * scale)
        {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Horner evaluation at a complex point.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation at a real point.
    pub fn evaluate_real(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        Self { coeffs }
    }

    /// Reversed coefficients: `z^d p(1/z)` for degree-`d` `p`.
    pub fn reversed(&self) -> Self {
        let mut coeffs: Vec<f64> = self.coeffs.iter().rev().copied().collect();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// Multiply by `z^k`.
    pub fn shifted_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Divide by `(z - r)` for a real root `r`, discarding the remainder.
    pub fn deflated_real(&self, r: f64) -> Self {
        let d = self.coeffs.len();
        if d <= 1 {
            return Self::zero();
        }
        let mut out = vec![0.0; d - 1];
        let mut carry = 0.0;
        for k in (0..d - 1).rev() {
            carry = self.coeffs[k + 1] + r * carry;
            out[k] = carry;
        }
        Self { coeffs: out }
    }

    /// Monic polynomial with the given zero multiset. The set must be closed
    /// under conjugation within `pair_tol`; conjugate pairs are multiplied as
    /// real quadratics so the result is exactly real.
    pub fn monic_from_roots(roots: &[Complex64]) -> Result<Self> {
        let mut acc = Self { coeffs: vec![1.0] };
        let mut pool: Vec<Complex64> = roots.to_vec();
        while let Some(z) = pool.pop() {
            if z.im == 0.0 {
                acc = acc.mul(&Self {
                    coeffs: vec![-z.re, 1.0],
                });
                continue;
            }
            let want = z.conj();
            let mut best: Option<(usize, f64)> = None;
            for (i, cand) in pool.iter().enumerate() {
                let d = (cand - want).norm();
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            match best {
                Some((i, d)) if d <= CLUSTER_TOL * (1.0 + z.norm()) => {
                    let partner = pool.swap_remove(i);
                    let re = 0.5 * (z.re + partner.re);
                    let modsq = (0.5 * (z + partner.conj())).norm_sqr();
                    acc = acc.mul(&Self {
                        coeffs: vec![modsq, -2.0 * re, 1.0],
                    });
                }
                _ => {
                    return Err(Error::UnmatchedZero(format!(
                        "root set is not closed under conjugation near {z}"
                    )))
                }
            }
        }
        Ok(acc)
    }
}

/// Sign of the eta-squared correction in `f(z) f(1/z) + sign * eta^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaSign {
    Plus,
    Minus,
    Zero,
}

impl EtaSign {
    fn value(self) -> f64 {
        match self {
            EtaSign::Plus => 1.0,
            EtaSign::Minus => -1.0,
            EtaSign::Zero => 0.0,
        }
    }
}

/// Symmetric Laurent polynomial `L(z) = c[0] + sum_k c[k] (z^k + z^-k)`.
///
/// `L(z) = L(1/z)` holds by construction and L is real on the real axis and
/// on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricLaurent {
    c: Vec<f64>,
}

impl SymmetricLaurent {
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        if c == [0.0] {
            c.clear();
        }
        Self { c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Index of the highest stored coefficient.
    pub fn top_index(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// The coefficient of `z^m + z^-m` (leading symmetric coefficient).
    pub fn top_coefficient(&self) -> f64 {
        self.c.last().copied().unwrap_or(0.0)
    }

    /// Drop top coefficients below `rel_tol` times the largest one.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let scale = self.c.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut c = self.c.clone();
        while c.last().map_or(false, |x| x.abs() <= rel_tol * scale) {
            c.pop();
        }
        Self { c }
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        if self.c.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(self.c[0], 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        let zi = 1.0 / z;
        let mut zn = Complex64::new(1.0, 0.0);
        for &ck in &self.c[1..] {
            zp *= z;
            zn *= zi;
            acc += ck * (zp + zn);
        }
        acc
    }

    pub fn evaluate_real(&self, x: f64) -> f64 {
        if self.c.is_empty() {
            return 0.0;
        }
        let mut acc = self.c[0];
        let mut xp = 1.0;
        let mut xn = 1.0;
        let xi = 1.0 / x;
        for &ck in &self.c[1..] {
            xp *= x;
            xn *= xi;
            acc += ck * (xp + xn);
        }
        acc
    }

    /// `z^m L(z)`: the palindromic polynomial sharing L's nonzero zeros.
    pub fn palindromic(&self) -> RealPolynomial {
        let m = self.top_index();
        let mut coeffs = vec![0.0; 2 * m + 1];
        coeffs[m] = self.coeff(0);
        for k in 1..=m {
            coeffs[m - k] = self.c[k];
            coeffs[m + k] = self.c[k];
        }
        RealPolynomial { coeffs }
    }

    /// Subtract coefficientwise, viewing both in the common index range.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        let c = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self::new(c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// `f(z) f(1/z) + eta_sign * eta^2` with `eta = z - 1/z`, as a symmetric
/// Laurent polynomial. The product is an exact coefficient autocorrelation.
pub fn symmetric_product(f: &RealPolynomial, eta_sign: EtaSign) -> SymmetricLaurent {
    let cf = f.coeffs();
    let d = cf.len();
    let mut c = vec![0.0; d.max(3)];
    for k in 0..d {
        let mut acc = 0.0;
        for j in 0..d - k {
            acc += cf[j] * cf[j + k];
        }
        c[k] = acc;
    }
    // eta^2 = z^2 - 2 + z^-2
    let s = eta_sign.value();
    c[0] -= 2.0 * s;
    c[2] += s;
    SymmetricLaurent::new(c)
}

/// The polynomial `P` with `P(z + 1/z) = L(z)`, via the basis
/// `z^k + z^-k = T_k(lambda)` where `T_0 = 2, T_1 = lambda,
/// T_{k+1} = lambda T_k - T_{k-1}`.
pub fn to_lambda_polynomial(l: &SymmetricLaurent) -> RealPolynomial {
    if l.is_zero() {
        return RealPolynomial::zero();
    }
    let m = l.top_index();
    let mut acc = vec![l.coeff(0)];
    // t_prev = T_{k-1}, t_cur = T_k as coefficient vectors in lambda
    let mut t_prev = vec![2.0];
    let mut t_cur = vec![0.0, 1.0];
    for k in 1..=m {
        let ck = l.coeff(k);
        if ck != 0.0 {
            if acc.len() < t_cur.len() {
                acc.resize(t_cur.len(), 0.0);
            }
            for (i, t) in t_cur.iter().enumerate() {
                acc[i] += ck * t;
            }
        }
        if k < m {
            // T_{k+1} = lambda*T_k - T_{k-1}
            let mut next = vec![0.0; t_cur.len() + 1];
            for (i, t) in t_cur.iter().enumerate() {
                next[i + 1] += t;
            }
            for (i, t) in t_prev.iter().enumerate() {
                next[i] -= t;
            }
            t_prev = std::mem::take(&mut t_cur);
            t_cur = next;
        }
    }
    RealPolynomial::new(acc).expect("finite coefficients")
}

/// All complex roots of `p` with multiplicity (repeated entries), found by
/// the Aberth-Ehrlich simultaneous iteration with Newton polish.
///
/// The returned multiset is exactly closed under conjugation: near-real
/// roots are snapped onto the axis and conjugate partners are averaged.
pub fn find_roots(p: &RealPolynomial, tol: f64) -> Result<Vec<Complex64>> {
    match p.degree() {
        Some(d) if d >= 1 => {}
        _ => {
            return Err(Error::InvalidCoefficient(
                "root finding needs degree >= 1".into(),
            ))
        }
    }

    // Peel off exact zeros at the origin.
    let mut low = 0;
    while p.coeffs[low] == 0.0 {
        low += 1;
    }
    let mut roots: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); low];
    let coeffs = &p.coeffs[low..];
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(roots);
    }

    let monic: Vec<Complex64> = {
        let lead = coeffs[d];
        coeffs.iter().map(|c| Complex64::new(c / lead, 0.0)).collect()
    };
    let deriv: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();

    // Initial guesses on a circle sized by the coefficient bounds, with an
    // angular offset so conjugate-symmetric configurations do not lock up.
    let cauchy = 1.0 + monic[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let r0 = monic[0].norm().powf(1.0 / d as f64).clamp(0.5, cauchy);
    let mut zs: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            r0 * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let horner = |c: &[Complex64], z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ck in c.iter().rev() {
            acc = acc * z + ck;
        }
        acc
    };
    // Machine-level bound on the attainable |p(z)|: roundoff of the Horner
    // scheme. Roots of higher multiplicity stagnate above `tol` in the step
    // size but still hit this floor.
    let residual_floor = |z: Complex64| -> f64 {
        let az = z.norm();
        let mut bound = 0.0;
        let mut pw = 1.0;
        for c in &monic {
            bound += c.norm() * pw;
            pw *= az;
        }
        4.0 * f64::EPSILON * bound * d as f64
    };

    let mut worst_step = f64::INFINITY;
    let mut done = false;
    for _ in 0..ROOT_ITER_BUDGET {
        let mut max_step = 0.0f64;
        let mut all_floored = true;
        for i in 0..d {
            let zi = zs[i];
            let pv = horner(&monic, zi);
            if pv.norm() <= residual_floor(zi) {
                continue;
            }
            all_floored = false;
            let mut dv = horner(&deriv, zi);
            if dv.norm() == 0.0 {
                dv = Complex64::new(f64::EPSILON, f64::EPSILON);
            }
            let newton = pv / dv;
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, zj) in zs.iter().enumerate() {
                if j != i {
                    let diff = zi - zj;
                    if diff.norm() > 0.0 {
                        sum += 1.0 / diff;
                    }
                }
            }
            let denom = 1.0 - newton * sum;
            let step = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            zs[i] = zi - step;
            max_step = max_step.max(step.norm() / (1.0 + zs[i].norm()));
        }
        worst_step = max_step;
        if all_floored || max_step <= tol {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::NonConvergence {
            tol,
            budget: ROOT_ITER_BUDGET,
            residual: worst_step,
        });
    }

    // Newton polish.
    for z in zs.iter_mut() {
        for _ in 0..3 {
            let pv = horner(&monic, *z);
            let dv = horner(&deriv, *z);
            if dv.norm() == 0.0 {
                break;
            }
            let step = pv / dv;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *z -= step;
        }
    }

    roots.extend(symmetrize_conjugates(zs, tol));
    Ok(roots)
}

/// Snap near-real roots onto the axis and average conjugate partners so the
/// output multiset is exactly conjugate-closed.
fn symmetrize_conjugates(zs: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    let real_snap = (10.0 * tol).max(1e-9);
    let pair_tol = 1e-6;
    let mut out = Vec::with_capacity(zs.len());
    let mut pool: Vec<Complex64> = Vec::new();
    for z in zs {
        if z.im.abs() <= real_snap * (1.0 + z.norm()) {
            out.push(Complex64::new(z.re, 0.0));
        } else {
            pool.push(z);
        }
    }
    while let Some(z) = pool.pop() {
        let want = z.conj();
        let mut best: Option<(usize, f64)> = None;
        for (i, cand) in pool.iter().enumerate() {
            let dist = (cand - want).norm();
            if best.map_or(true, |(_, bd)| dist < bd) {
                best = Some((i, dist));
            }
        }
        match best {
            Some((i, dist)) if dist <= pair_tol * (1.0 + z.norm()) => {
                let partner = pool.swap_remove(i);
                let avg = 0.5 * (z + partner.conj());
                out.push(avg);
                out.push(avg.conj());
            }
            _ => {
                // No partner: treat as a real root perturbed off the axis.
                out.push(Complex64::new(z.re, 0.0));
            }
        }
    }
    out
}

/// A reciprocal pair `{t, 1/t}` of zeros (equal for self-reciprocal `t`).
#[derive(Debug, Clone)]
pub struct PairedZero {
    /// Canonical member: inside the unit disk, or on the closed upper
    /// semicircle.
    pub t: Complex64,
    /// Number of pairs carried by this entry.
    pub multiplicity: usize,
    pub on_circle: bool,
}

/// Zeros of a symmetric Laurent polynomial grouped into reciprocal pairs,
/// with the canonical ordered zero list.
#[derive(Debug, Clone)]
pub struct ReciprocalPairing {
    pub pairs: Vec<PairedZero>,
    /// The canonical zeros expanded with multiplicity, ordered by
    /// nondecreasing modulus then nondecreasing argument in `[0, 2*pi)`.
    pub canonical: Vec<Complex64>,
}

impl ReciprocalPairing {
    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }
}

fn arg_in_0_2pi(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// Cluster a conjugate-closed root multiset into (mean, multiplicity)
/// groups. Clustering runs on reals and the upper half plane, then mirrors,
/// so cluster means stay exactly conjugate-closed.
fn cluster_roots(roots: &[Complex64], ctol: f64) -> Vec<(Complex64, usize)> {
    // Multiple roots split either along the axis or into a conjugate pair;
    // members within the cluster tolerance of the axis belong to a real
    // cluster either way (the class keeps genuine complex zeros further
    // out). Their real parts carry the accurate mean.
    let snapped: Vec<Complex64> = roots
        .iter()
        .map(|z| {
            if z.im.abs() <= ctol * (1.0 + z.norm()) {
                Complex64::new(z.re, 0.0)
            } else {
                *z
            }
        })
        .collect();
    let roots = &snapped;
    let mut reals: Vec<f64> = roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut upper: Vec<Complex64> = roots.iter().filter(|z| z.im > 0.0).copied().collect();
    upper.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());

    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    // Real clusters: sorted scan. A near-real complex cluster cannot occur
    // because symmetrize_conjugates snapped those onto the axis.
    let mut i = 0;
    while i < reals.len() {
        let mut j = i + 1;
        let mut sum = reals[i];
        while j < reals.len() && (reals[j] - reals[j - 1]).abs() <= ctol {
            sum += reals[j];
            j += 1;
        }
        let mean = sum / (j - i) as f64;
        clusters.push((Complex64::new(mean, 0.0), j - i));
        i = j;
    }
    // Upper-half clusters, mirrored below.
    let mut used = vec![false; upper.len()];
    for i in 0..upper.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![upper[i]];
        used[i] = true;
        for j in i + 1..upper.len() {
            if !used[j] && (upper[j] - upper[i]).norm() <= ctol {
                members.push(upper[j]);
                used[j] = true;
            }
        }
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        clusters.push((mean, members.len()));
        clusters.push((mean.conj(), members.len()));
    }
    clusters
}

/// Group the zeros of `z^m L(z)` into reciprocal pairs and emit the
/// canonical ordered list of representatives.
///
/// Zeros on the unit circle are snapped onto it; they must occur with even
/// total multiplicity (the input is otherwise not of the form `f(z)f(1/z)`).
pub fn pair_reciprocal(l: &SymmetricLaurent, tol: f64) -> Result<ReciprocalPairing> {
    let trimmed = l.trimmed(TRIM_REL_TOL);
    if trimmed.is_zero() || trimmed.top_index() == 0 {
        return Err(Error::InvalidCoefficient(
            "reciprocal pairing needs a nonconstant symmetric Laurent polynomial".into(),
        ));
    }
    let pal = trimmed.palindromic();
    let roots = find_roots(&pal, DEFAULT_ROOT_TOL)?;
    let clusters = cluster_roots(&roots, CLUSTER_TOL);

    // Partition into circle and off-circle clusters.
    let mut circle: Vec<(Complex64, usize)> = Vec::new();
    let mut interior: Vec<(Complex64, usize)> = Vec::new();
    let mut exterior: Vec<(Complex64, usize)> = Vec::new();
    for (z, mult) in clusters {
        let r = z.norm();
        if (r - 1.0).abs() <= CIRCLE_SNAP_TOL.max(tol) {
            circle.push((z / r, mult));
        } else if r < 1.0 {
            interior.push((z, mult));
        } else {
            exterior.push((z, mult));
        }
    }

    let mut pairs: Vec<PairedZero> = Vec::new();

    // Circle points: even multiplicity required, pairs are self-reciprocal
    // at +-1 and conjugate-reciprocal elsewhere.
    for &(z, mult) in &circle {
        if z.im == 0.0 {
            if mult % 2 != 0 {
                return Err(Error::OddCircleMultiplicity {
                    zero: format!("{z}"),
                    multiplicity: mult,
                });
            }
            pairs.push(PairedZero {
                t: z,
                multiplicity: mult / 2,
                on_circle: true,
            });
        } else if z.im > 0.0 {
            // The mirrored cluster below the axis carries the reciprocals.
            let partner_mult = circle
                .iter()
                .find(|(w, _)| (w - z.conj()).norm() <= CLUSTER_TOL)
                .map(|&(_, m)| m);
            match partner_mult {
                Some(m) if m == mult => {
                    if mult % 2 != 0 {
                        return Err(Error::OddCircleMultiplicity {
                            zero: format!("{z}"),
                            multiplicity: mult,
                        });
                    }
                    pairs.push(PairedZero {
                        t: z,
                        multiplicity: mult,
                        on_circle: true,
                    });
                }
                _ => {
                    return Err(Error::UnpairedRoot {
                        zero: format!("{z}"),
                        tol,
                    })
                }
            }
        }
        // z.im < 0.0 entries are the partners of the upper ones.
    }

    // Off-circle: each interior cluster must find an exterior partner with
    // |t * t' - 1| < tol and equal multiplicity.
    let mut taken = vec![false; exterior.len()];
    for &(t, mult) in &interior {
        let mut best: Option<(usize, f64)> = None;
        for (i, &(u, _)) in exterior.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let defect = (t * u - 1.0).norm();
            if best.map_or(true, |(_, bd)| defect < bd) {
                best = Some((i, defect));
            }
        }
        match best {
            Some((i, defect)) if defect <= tol => {
                if exterior[i].1 != mult {
                    return Err(Error::UnpairedRoot {
                        zero: format!("{t} (multiplicity {mult} vs {})", exterior[i].1),
                        tol,
                    });
                }
                taken[i] = true;
                pairs.push(PairedZero {
                    t,
                    multiplicity: mult,
                    on_circle: false,
                });
            }
            _ => return Err(Error::UnpairedRoot {
                zero: format!("{t}"),
                tol,
            }),
        }
    }
    if let Some(i) = taken.iter().position(|t| !t) {
        return Err(Error::UnpairedRoot {
            zero: format!("{}", exterior[i].0),
            tol,
        });
    }

    // Canonical ordering: nondecreasing modulus, then argument in [0, 2*pi);
    // ties (numerically coincident entries) keep insertion order.
    let mut canonical: Vec<Complex64> = Vec::new();
    for p in &pairs {
        for _ in 0..p.multiplicity {
            canonical.push(p.t);
        }
    }
    canonical.sort_by(|a, b| {
        (a.norm(), arg_in_0_2pi(*a))
            .partial_cmp(&(b.norm(), arg_in_0_2pi(*b)))
            .unwrap()
    });

    pairs.sort_by(|a, b| {
        (a.t.norm(), arg_in_0_2pi(a.t))
            .partial_cmp(&(b.t.norm(), arg_in_0_2pi(b.t)))
            .unwrap()
    });

    Ok(ReciprocalPairing { pairs, canonical })
}
