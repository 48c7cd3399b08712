//! Scattering analysis of a Wronskian pair: S-matrix values, bound states
//! and resonances, norming constants, and the Definition S / Definition W
//! class validators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::lattice::{classify, JacobiSequence, JostTable};
use crate::poly::{
    find_roots, symmetric_product, EtaSign, RealPolynomial, CLUSTER_TOL, DEFAULT_ROOT_TOL,
};
use crate::report::Diagnostics;

/// Default circle-boundary tolerance when partitioning the spectrum.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-9;
/// Number of real-axis samples used by the zero-counting checks.
pub const ZERO_COUNT_GRID: usize = 4096;

fn eta(z: Complex64) -> Complex64 {
    z - 1.0 / z
}

/// One bound state: a real simple zero of w in the open unit disk, indexed
/// by its signed position (negative z get negative indices).
#[derive(Debug, Clone, Copy)]
pub struct BoundState {
    pub index: i32,
    pub z: f64,
    pub lambda: f64,
}

/// Ordered bound states `z_{n-} < ... < z_{-1} < 0 < z_1 < ... < z_{n+}`.
#[derive(Debug, Clone, Default)]
pub struct BoundStateSet {
    pub states: Vec<BoundState>,
    pub n_minus: i32,
    pub n_plus: i32,
}

impl BoundStateSet {
    /// Assemble from raw zero positions (any order).
    pub fn from_z_values(mut zs: Vec<f64>) -> Self {
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let neg: Vec<f64> = zs.iter().copied().filter(|z| *z < 0.0).collect();
        let pos: Vec<f64> = zs.iter().copied().filter(|z| *z > 0.0).collect();
        let n_minus = -(neg.len() as i32);
        let n_plus = pos.len() as i32;
        let mut states = Vec::with_capacity(zs.len());
        // Ascending z; index -1 is the negative state closest to 0.
        for (k, &z) in neg.iter().enumerate() {
            states.push(BoundState {
                index: n_minus + k as i32,
                z,
                lambda: z + 1.0 / z,
            });
        }
        for (k, &z) in pos.iter().enumerate() {
            states.push(BoundState {
                index: 1 + k as i32,
                z,
                lambda: z + 1.0 / z,
            });
        }
        BoundStateSet {
            states,
            n_minus,
            n_plus,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn z_values(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.z).collect()
    }
}

/// A zero of w with `|z| >= 1` (pole of the continued S-matrix).
#[derive(Debug, Clone, Copy)]
pub struct Resonance {
    pub z: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ResonanceSet {
    pub entries: Vec<Resonance>,
    /// Roots suspiciously close to the unit circle away from +-1; not an
    /// error, but a conditioning warning.
    pub boundary_flags: Vec<Complex64>,
}

/// Partition the zeros of w into bound states (inside the disk, must be
/// real and simple) and resonances.
pub fn spectrum(w: &RealPolynomial, tol: f64) -> Result<(BoundStateSet, ResonanceSet)> {
    if w.is_zero() || w.coeff(0) <= 0.0 {
        return Err(Error::ClassViolation(format!(
            "spectrum needs w(0) > 0, got {}",
            w.coeff(0)
        )));
    }
    if w.degree() == Some(0) {
        return Ok((BoundStateSet::default(), ResonanceSet::default()));
    }
    let roots = find_roots(w, DEFAULT_ROOT_TOL)?;
    let mut inside: Vec<f64> = Vec::new();
    let mut outside: Vec<Complex64> = Vec::new();
    let mut flags: Vec<Complex64> = Vec::new();
    for z in &roots {
        let r = z.norm();
        if r < 1.0 - tol {
            if z.im.abs() > tol {
                return Err(Error::NonRealBoundState {
                    z: format!("{z}"),
                    imag: z.im.abs(),
                });
            }
            inside.push(z.re);
        } else {
            if (r - 1.0).abs() <= tol && (z - 1.0).norm() > tol && (z + 1.0).norm() > tol {
                flags.push(*z);
            }
            outside.push(*z);
        }
    }
    // Simplicity of interior zeros.
    let mut sorted = inside.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for pair in sorted.windows(2) {
        if (pair[1] - pair[0]).abs() < CLUSTER_TOL {
            return Err(Error::ClassViolation(format!(
                "bound state {} is not simple",
                pair[0]
            )));
        }
    }

    // Cluster resonances into multiplicity groups.
    let mut entries: Vec<Resonance> = Vec::new();
    'outer: for z in outside {
        for e in entries.iter_mut() {
            if (e.z - z).norm() <= CLUSTER_TOL {
                e.multiplicity += 1;
                continue 'outer;
            }
        }
        entries.push(Resonance { z, multiplicity: 1 });
    }
    entries.sort_by(|a, b| {
        (a.z.norm(), a.z.re, a.z.im)
            .partial_cmp(&(b.z.norm(), b.z.re, b.z.im))
            .unwrap()
    });

    Ok((
        BoundStateSet::from_z_values(inside),
        ResonanceSet {
            entries,
            boundary_flags: flags,
        },
    ))
}

/// S-matrix entries at a point of the unit circle.
#[derive(Debug, Clone, Copy)]
pub struct SMatrixSample {
    pub z: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub r_plus: Complex64,
    pub r_minus: Complex64,
    pub t: Complex64,
}

/// Evaluate `A = w/(1-z^2)`, `B = z^2 s/eta`, the reflection coefficients
/// `R_- = -z^3 s/w`, `R_+ = -s(1/z)/(z w)`, and the transmission `1/A`.
///
/// When w vanishes at +-1 (then s does too) the common factor is deflated
/// before evaluating, so samples near the band edges stay finite.
pub fn smatrix(w: &RealPolynomial, s: &RealPolynomial, z: Complex64) -> Result<SMatrixSample> {
    let tol = 1e-9 * w.max_abs_coeff().max(1.0);
    if (z - 1.0).norm() < 1e-12 || (z + 1.0).norm() < 1e-12 {
        // Evaluate by deflation when possible.
        let at_plus = (z - 1.0).norm() < 1e-12;
        let x = if at_plus { 1.0 } else { -1.0 };
        if w.evaluate_real(x).abs() > tol {
            return Err(Error::PoleAtZ {
                z: format!("{z} (band edge, w({x}) != 0)"),
            });
        }
        let wd = w.deflated_real(x);
        let sd = s.deflated_real(x);
        // With (z - x) removed from w and s: A = -w_defl/(z + x) since
        // 1 - z^2 = -(z - x)(z + x), and B = z^3 s_defl/(z + x) since
        // eta = (z - x)(z + x)/z.
        let a = -wd.evaluate(z) / (z + x);
        let b = z * z * z * sd.evaluate(z) / (z + x);
        let r_minus = b / a;
        // s(1/z) = z^{-ds} s_rev(z); s_rev shares the root at x with w.
        let srev_d = s.reversed().deflated_real(x);
        let ds = s.degree().unwrap_or(0) as i32;
        let r_plus = -srev_d.evaluate(z) / (z.powi(ds + 1) * wd.evaluate(z));
        return Ok(SMatrixSample {
            z,
            a,
            b,
            r_plus,
            r_minus,
            t: 1.0 / a,
        });
    }

    let wz = w.evaluate(z);
    if wz.norm() < tol {
        return Err(Error::PoleAtZ { z: format!("{z}") });
    }
    let sz = s.evaluate(z);
    let a = wz / (1.0 - z * z);
    let b = z * z * sz / eta(z);
    let ds = s.degree().unwrap_or(0) as i32;
    let s_tilde = s.reversed().evaluate(z) / z.powi(ds);
    let r_plus = -s_tilde / (z * wz);
    let r_minus = -z * z * z * sz / wz;
    Ok(SMatrixSample {
        z,
        a,
        b,
        r_plus,
        r_minus,
        t: 1.0 / a,
    })
}

/// Max unitarity and determinant defects over a uniform circle grid.
#[derive(Debug, Clone, Copy)]
pub struct UnitarityReport {
    /// Max of `| |A|^2 - 1 - |B|^2 | / |A|^2 = | |T|^2 + |R|^2 - 1 |`: the
    /// row-norm defect of the S-matrix, whose entries stay bounded on the
    /// circle. `|A|^2 >= 1` there, so this never exceeds the raw defect.
    pub max_defect: f64,
    pub max_det_defect: f64,
    pub grid: usize,
}

fn unitarity_residual_in(
    w: &RealPolynomial,
    s: &RealPolynomial,
    grid: usize,
    mode: Mode,
) -> UnitarityReport {
    let dw = w.degree().unwrap_or(0) as i32;
    let w_rev = w.reversed();
    let defects = exec::map_indexed(mode, grid, |k| {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
        let z = Complex64::new(theta.cos(), theta.sin());
        if (z - 1.0).norm() < 1e-6 || (z + 1.0).norm() < 1e-6 {
            return (0.0, 0.0);
        }
        let sample = match smatrix(w, s, z) {
            Ok(v) => v,
            Err(_) => return (0.0, 0.0),
        };
        let a2 = sample.a.norm_sqr();
        let defect = (a2 - 1.0 - sample.b.norm_sqr()).abs() / a2;
        // det S = -z^2 w(1/z)/w(z)
        let w_tilde = w_rev.evaluate(z) / z.powi(dw);
        let det = -z * z * w_tilde / w.evaluate(z);
        (defect, (det.norm() - 1.0).abs())
    });
    let mut max_defect = 0.0f64;
    let mut max_det = 0.0f64;
    for (d, dd) in defects {
        max_defect = max_defect.max(d);
        max_det = max_det.max(dd);
    }
    UnitarityReport {
        max_defect,
        max_det_defect: max_det,
        grid,
    }
}

/// Sweep the unit circle (default execution mode).
pub fn unitarity_residual(w: &RealPolynomial, s: &RealPolynomial, grid: usize) -> UnitarityReport {
    unitarity_residual_in(w, s, grid, Mode::auto())
}

/// Sequential sweep, for benchmarking against the parallel path.
pub fn unitarity_residual_seq(
    w: &RealPolynomial,
    s: &RealPolynomial,
    grid: usize,
) -> UnitarityReport {
    unitarity_residual_in(w, s, grid, Mode::Sequential)
}

/// Norming constants aligned with a `BoundStateSet`.
#[derive(Debug, Clone, Default)]
pub struct NormingConstants {
    pub m_plus: Vec<f64>,
    pub m_minus: Vec<f64>,
}

/// `m_j^+ = z_j^2 w'(z_j) s(z_j) / eta^2(z_j)` and
/// `m_j^- = m_j^+ / B(z_j)^2` with `B = z^2 s/eta`.
pub fn norming_constants(
    w: &RealPolynomial,
    s: &RealPolynomial,
    bs: &BoundStateSet,
) -> Result<NormingConstants> {
    let dw = w.derivative();
    let mut m_plus = Vec::with_capacity(bs.len());
    let mut m_minus = Vec::with_capacity(bs.len());
    for st in &bs.states {
        let z = st.z;
        let e = z - 1.0 / z;
        let sz = s.evaluate_real(z);
        let mp = z * z * dw.evaluate_real(z) * sz / (e * e);
        if !(mp > 0.0) {
            return Err(Error::NonPositiveNorming {
                index: st.index,
                side: '+',
                value: mp,
            });
        }
        let b = z * z * sz / e;
        let mm = mp / (b * b);
        if !(mm > 0.0) {
            return Err(Error::NonPositiveNorming {
                index: st.index,
                side: '-',
                value: mm,
            });
        }
        m_plus.push(mp);
        m_minus.push(mm);
    }
    Ok(NormingConstants { m_plus, m_minus })
}

/// Direct route to `m_j^+ = sum_n psi_n^+(z_j)^2`: window terms from the
/// Jost table plus the two geometric tails
/// `sum_{n>p} z^{2n} = z^{2p+2}/(1-z^2)` and
/// `sum_{n<=0} B^2 z^{-2n} = B^2/(1-z^2)`.
pub fn norming_direct(q: &JacobiSequence, z_j: f64) -> Result<f64> {
    if z_j.abs() >= 1.0 || z_j == 0.0 {
        return Err(Error::NotABoundState { z: z_j, wz: f64::NAN });
    }
    let fwd = crate::lattice::wronskian_pair(q)?;
    let wz = fwd.w.evaluate_real(z_j);
    if wz.abs() > 1e-8 * fwd.w.max_abs_coeff() {
        return Err(Error::NotABoundState { z: z_j, wz });
    }
    let params = match &fwd.class {
        Some(p) => p,
        None => return Err(Error::NotABoundState { z: z_j, wz }),
    };
    let jost: &JostTable = fwd.jost.as_ref().expect("jost table for nonfree q");
    let p = params.p;
    let z2 = z_j * z_j;
    let geom = 1.0 - z2;

    let mut sum = 0.0;
    // Window terms n = 1..=p: psi_n^+ = z^n phi_n.
    for n in 1..=p {
        let v = z_j.powi(n as i32) * jost.phi[n].evaluate_real(z_j);
        sum += v * v;
    }
    // Upper tail.
    sum += z2.powi(p as i32 + 1) / geom;
    // Lower tail via psi_n^+(z_j) = B(z_j) z_j^{-n} for n <= 0.
    let e = z_j - 1.0 / z_j;
    let b = z2 * fwd.s.evaluate_real(z_j) / e;
    sum += b * b / geom;
    Ok(sum)
}

/// Definition S checks for a pair `(s, E_N)`; never errors, returns the
/// structured list.
///
/// Boundary signs use `(-1)^{n_pm} (+-s(+-1)) >= 0`; the plain reading of
/// the minus side fails on genuine forward data, see the Q2 fixture.
pub fn validate_scattering_class(
    s: &RealPolynomial,
    bs: &BoundStateSet,
    tol: f64,
) -> Diagnostics {
    let mut d = Diagnostics::new();
    d.push("s nonzero", !s.is_zero(), None, "s must not vanish identically");
    if s.is_zero() {
        return d;
    }

    // (S1): strict ordering inside (-1,1) away from 0.
    let zs = bs.z_values();
    let ordered = zs.windows(2).all(|p| p[0] < p[1])
        && zs.iter().all(|z| z.abs() < 1.0 && *z != 0.0);
    d.push(
        "(S1) ordering",
        ordered,
        None,
        format!("bound states {zs:?}"),
    );

    let scale = s.max_abs_coeff();
    // (S2) interior signs and the sw3-1 product identity.
    for st in &bs.states {
        let sign = if st.index % 2 == 0 { 1.0 } else { -1.0 };
        let sz = s.evaluate_real(st.z);
        let szr = s.evaluate_real(1.0 / st.z);
        let v1 = sign * st.z * sz;
        let v2 = sign * st.z * szr;
        d.push(
            format!("(S2) sign at z_{}", st.index),
            v1 > 0.0 && v2 > 0.0,
            None,
            format!("(-1)^j z_j s(z_j) = {v1:e}, (-1)^j z_j s(1/z_j) = {v2:e}"),
        );
        let e = st.z - 1.0 / st.z;
        let resid = (sz * szr - e * e).abs() / (scale * scale).max(1.0);
        d.push(
            format!("(sw3-1) at z_{}", st.index),
            resid <= tol,
            Some(resid),
            format!("s(z)s(1/z) = {:e}, eta^2 = {:e}", sz * szr, e * e),
        );
    }

    // (S2) boundary signs.
    let sp = s.evaluate_real(1.0);
    let sm = s.evaluate_real(-1.0);
    let sign_p = if bs.n_plus % 2 == 0 { 1.0 } else { -1.0 };
    let sign_m = if bs.n_minus % 2 == 0 { 1.0 } else { -1.0 };
    let bp = sign_p * sp;
    let bm = sign_m * (-sm);
    let btol = tol * scale.max(1.0);
    d.push(
        "(S2) boundary at +1",
        bp >= -btol,
        Some((-bp).max(0.0)),
        format!("(-1)^(n+) s(1) = {bp:e}"),
    );
    d.push(
        "(S2) boundary at -1",
        bm >= -btol,
        Some((-bm).max(0.0)),
        format!("(-1)^(n-) (-s(-1)) = {bm:e}"),
    );
    d
}

/// Count sign changes of the palindromic polynomial of F on `[a, b]`,
/// endpoints included (zeros of F crowd toward the bound-state endpoints,
/// where F = eta^2 > 0 pins the sign), with a near-tangency warning.
fn count_sign_changes(
    pal: &RealPolynomial,
    a: f64,
    b: f64,
    grid: usize,
    d: &mut Diagnostics,
) -> usize {
    if b <= a {
        return 0;
    }
    let scale = pal.max_abs_coeff();
    let mut count = 0;
    let mut prev = f64::NAN;
    let mut min_abs = f64::INFINITY;
    for k in 0..=grid {
        let x = a + (b - a) * k as f64 / grid as f64;
        let v = pal.evaluate_real(x);
        min_abs = min_abs.min(v.abs());
        if prev.is_finite() && prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    if count == 0 && min_abs < 1e-9 * scale {
        d.warn(format!(
            "near-tangency of F on ({a}, {b}): min |F| = {min_abs:e} without sign change"
        ));
    }
    count
}

/// Definition W checks for a candidate w: positivity at 0, the circle bound
/// `|w| >= |eta|`, realness and simplicity of disk zeros, and the zero
/// counts of `F = w(z)w(1/z) + eta^2` between bound states.
pub fn validate_resonance_class(w: &RealPolynomial, tol: f64, grid: usize) -> Diagnostics {
    let mut d = Diagnostics::new();
    d.push(
        "w(0) > 0",
        w.coeff(0) > 0.0,
        None,
        format!("w(0) = {}", w.coeff(0)),
    );
    if w.is_zero() || w.degree() == Some(0) {
        d.push("deg w >= 1", false, None, "constant w has no zeros");
        return d;
    }

    // Circle bound: min over the grid of |w| - |eta| >= -tol.
    let scale = w.max_abs_coeff().max(1.0);
    let mut min_gap = f64::INFINITY;
    for k in 0..grid.max(16) {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / grid.max(16) as f64;
        let z = Complex64::new(theta.cos(), theta.sin());
        let gap = w.evaluate(z).norm() - eta(z).norm();
        min_gap = min_gap.min(gap);
    }
    d.push(
        "|w| >= |eta| on circle",
        min_gap >= -tol * scale,
        Some((-min_gap).max(0.0)),
        format!("min(|w| - |eta|) = {min_gap:e}"),
    );

    let roots = match find_roots(w, DEFAULT_ROOT_TOL) {
        Ok(r) => r,
        Err(e) => {
            d.push("roots of w", false, None, format!("root finding failed: {e}"));
            return d;
        }
    };
    let boundary_tol = DEFAULT_SPECTRUM_TOL;
    let mut disk: Vec<f64> = Vec::new();
    let mut circle_ok = true;
    for z in &roots {
        let r = z.norm();
        if r < 1.0 - boundary_tol {
            if z.im != 0.0 {
                d.push(
                    "disk zeros real",
                    false,
                    None,
                    format!("complex zero {z} inside the disk"),
                );
                return d;
            }
            disk.push(z.re);
        } else if (r - 1.0).abs() <= boundary_tol
            && (z - 1.0).norm() > 1e-6
            && (z + 1.0).norm() > 1e-6
        {
            circle_ok = false;
        }
    }
    d.push(
        "circle zeros only at +-1",
        circle_ok,
        None,
        "zeros on the unit circle must sit at +-1",
    );
    disk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let simple = disk.windows(2).all(|p| (p[1] - p[0]).abs() > CLUSTER_TOL);
    d.push("disk zeros simple", simple, None, format!("disk zeros {disk:?}"));
    let nonzero = disk.iter().all(|z| z.abs() > boundary_tol);
    d.push("disk zeros nonzero", nonzero, None, "no zero at the origin");
    if !(simple && nonzero) {
        return d;
    }

    // Zero counts of F on the gaps (defW2), via the palindromic polynomial
    // (same zeros as F away from the origin, no pole at 0).
    let f = symmetric_product(w, EtaSign::Plus).trimmed(1e-12);
    if f.is_zero() {
        d.push("F not identically zero", false, None, "F = 0 means s = 0 (q = 0)");
        return d;
    }
    let pal = f.palindromic();
    let neg: Vec<f64> = disk.iter().copied().filter(|z| *z < 0.0).collect();
    let pos: Vec<f64> = disk.iter().copied().filter(|z| *z > 0.0).collect();

    // Interior gaps between consecutive bound states of like sign.
    for side in [&neg, &pos] {
        for pair in side.windows(2) {
            let n = count_sign_changes(&pal, pair[0], pair[1], ZERO_COUNT_GRID, &mut d);
            d.push(
                format!("#(F, ({}, {})) even >= 2", pair[0], pair[1]),
                n % 2 == 0 && n >= 2,
                None,
                format!("{n} zeros"),
            );
        }
    }
    // The straddling gap I_0 = (z_{-1}, z_1), counted on both sides of the
    // pole at the origin. F has a pole of order m there, so the count
    // parity on I_0 equals the parity of m (the even count printed in the
    // source condition is only consistent for even m).
    if let (Some(&zl), Some(&zr)) = (neg.last(), pos.first()) {
        let n = count_sign_changes(&pal, zl, 0.0, ZERO_COUNT_GRID, &mut d)
            + count_sign_changes(&pal, 0.0, zr, ZERO_COUNT_GRID, &mut d);
        let m = w.degree().unwrap_or(0);
        d.push(
            "#(F, I_0) >= 1 with pole parity",
            n >= 1 && n % 2 == m % 2,
            None,
            format!("{n} zeros, m = {m}"),
        );
    }
    // Edge gaps (z_{n+-}, 1/z_{n+-}): by reciprocal symmetry the count is
    // twice the one-sided count plus the double zero at +-1 when w(+-1)=0.
    // The +-1 endpoint is inset so that double zero cannot leak a phantom
    // sign into the sweep.
    let wtol = 1e-9 * scale;
    if let Some(&zmax) = pos.last() {
        let one_sided = count_sign_changes(&pal, zmax, 1.0 - 1e-9, ZERO_COUNT_GRID, &mut d);
        let at_one = usize::from(w.evaluate_real(1.0).abs() < wtol);
        let half = one_sided + at_one;
        d.push(
            "half-count on (z_max, 1/z_max) even",
            half % 2 == 0,
            None,
            format!("half-count {half}"),
        );
    }
    if let Some(&zmin) = neg.first() {
        let one_sided = count_sign_changes(&pal, -1.0 + 1e-9, zmin, ZERO_COUNT_GRID, &mut d);
        let at_mone = usize::from(w.evaluate_real(-1.0).abs() < wtol);
        let half = one_sided + at_mone;
        d.push(
            "half-count on (1/z_min, z_min) even",
            half % 2 == 0,
            None,
            format!("half-count {half}"),
        );
    }
    d
}

/// Residuals of the coefficient identities: with both arrays padded to
/// length 2p, `2 + <s,s> = <w,w>`, `<V^2 s,s> = 1 + <V^2 w,w>`, and equal
/// autocorrelations at every other lag.
#[derive(Debug, Clone)]
pub struct TraceIdentityReport {
    /// `(lag, lhs, rhs, |lhs - rhs|)` for lags 0..2p-1.
    pub rows: Vec<(usize, f64, f64, f64)>,
}

impl TraceIdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.3))
    }
}

pub fn coefficient_identities(
    w: &RealPolynomial,
    s: &RealPolynomial,
    p: usize,
) -> TraceIdentityReport {
    // Degrees stay below 2p in theorem scope; the max() keeps degenerate
    // fixtures (deg w = 2p at p = 1) from being silently truncated.
    let n = (2 * p).max(w.coeffs().len()).max(s.coeffs().len());
    let pad = |q: &RealPolynomial| -> Vec<f64> { (0..n).map(|k| q.coeff(k)).collect() };
    let wv = pad(w);
    let sv = pad(s);
    let corr = |v: &[f64], lag: usize| -> f64 {
        (0..n - lag).map(|i| v[i] * v[i + lag]).sum()
    };
    let mut rows = Vec::with_capacity(n);
    for lag in 0..n {
        let ss = corr(&sv, lag);
        let ww = corr(&wv, lag);
        let (lhs, rhs) = match lag {
            0 => (2.0 + ss, ww),
            2 => (ss, 1.0 + ww),
            _ => (ss, ww),
        };
        rows.push((lag, lhs, rhs, (lhs - rhs).abs()));
    }
    TraceIdentityReport { rows }
}

/// Cross-check the two norming routes on every bound state of `q`.
/// Returns the max relative disagreement.
pub fn norming_cross_check(q: &JacobiSequence) -> Result<f64> {
    let fwd = crate::lattice::wronskian_pair(q)?;
    let params = classify(q)?;
    let tq = q.translated(params.shift);
    let (bs, _) = spectrum(&fwd.w, DEFAULT_SPECTRUM_TOL)?;
    let nc = norming_constants(&fwd.w, &fwd.s, &bs)?;
    let mut worst = 0.0f64;
    for (st, &mp) in bs.states.iter().zip(&nc.m_plus) {
        let direct = norming_direct(&tq, st.z)?;
        worst = worst.max((direct - mp).abs() / mp.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q1() -> JacobiSequence {
        JacobiSequence::normalize(&[0.5], &[1.0], 1).unwrap()
    }
    fn q2() -> JacobiSequence {
        JacobiSequence::normalize(&[1.0, 0.5], &[1.0, 0.0], 1).unwrap()
    }
    fn w_q1() -> RealPolynomial {
        RealPolynomial::new(vec![2.0, -2.0, -0.5]).unwrap()
    }
    fn s_q1() -> RealPolynomial {
        RealPolynomial::new(vec![-2.0, 1.5]).unwrap()
    }
    fn w_q2() -> RealPolynomial {
        RealPolynomial::new(vec![2.0, -2.0, -0.5, -1.5]).unwrap()
    }
    fn s_q2() -> RealPolynomial {
        RealPolynomial::new(vec![-2.0, 0.0, -1.5, 1.5]).unwrap()
    }
    fn w_free() -> RealPolynomial {
        RealPolynomial::new(vec![1.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn spectrum_free() {
        let (bs, rs) = spectrum(&w_free(), 1e-9).unwrap();
        assert!(bs.is_empty());
        let mut res: Vec<f64> = rs.entries.iter().map(|r| r.z.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((res[0] + 1.0).abs() < 1e-12 && (res[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_q1() {
        let (bs, rs) = spectrum(&w_q1(), 1e-9).unwrap();
        assert_eq!(bs.len(), 1);
        let z1 = 2.0 * 2.0_f64.sqrt() - 2.0;
        assert!((bs.states[0].z - z1).abs() < 1e-10);
        assert!((bs.states[0].lambda - (z1 + 1.0 / z1)).abs() < 1e-10);
        assert_eq!(bs.states[0].index, 1);
        assert_eq!(rs.entries.len(), 1);
        assert!((rs.entries[0].z.re - (-2.0 - 2.0 * 2.0_f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn spectrum_q2() {
        let (bs, rs) = spectrum(&w_q2(), 1e-9).unwrap();
        assert_eq!(bs.len(), 1);
        assert!((bs.states[0].z - 2.0 / 3.0).abs() < 1e-10);
        assert_eq!(rs.entries.len(), 2);
        for r in &rs.entries {
            assert!((r.z.norm() - 2.0_f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn smatrix_free() {
        let sample = smatrix(&w_free(), &RealPolynomial::zero(), Complex64::new(0.0, 1.0)).unwrap();
        assert!((sample.a - 1.0).norm() < 1e-14);
        assert!(sample.b.norm() < 1e-14);
    }

    #[test]
    fn smatrix_q1_hand_values() {
        // w(i) = 2.5 - 2i, B = -0.75 - i, |A|^2 = 2.5625 = 1 + |B|^2.
        let sample = smatrix(&w_q1(), &s_q1(), Complex64::new(0.0, 1.0)).unwrap();
        assert!((sample.a.norm_sqr() - 2.5625).abs() < 1e-12);
        assert!((sample.b - Complex64::new(-0.75, -1.0)).norm() < 1e-12);
        assert!((sample.b.norm_sqr() - 1.5625).abs() < 1e-12);
    }

    #[test]
    fn unitarity_sweep_q2() {
        let rep = unitarity_residual(&w_q2(), &s_q2(), 64);
        assert!(rep.max_defect < 1e-12, "defect {:e}", rep.max_defect);
        assert!(rep.max_det_defect < 1e-12);
    }

    #[test]
    fn norming_q1_exact() {
        // Exact algebra on z1 = 2 sqrt(2) - 2: m+ = (96 sqrt(2) - 64)/7,
        // B = 24 - 16 sqrt(2), m+ m- = (w'/eta)^2.
        let (bs, _) = spectrum(&w_q1(), 1e-9).unwrap();
        let nc = norming_constants(&w_q1(), &s_q1(), &bs).unwrap();
        let s2 = 2.0_f64.sqrt();
        let mp_exact = (96.0 * s2 - 64.0) / 7.0;
        assert!((nc.m_plus[0] - mp_exact).abs() < 1e-10);
        let b_exact = 24.0 - 16.0 * s2;
        assert!((nc.m_plus[0] / nc.m_minus[0]).sqrt() - b_exact < 1e-9);
        assert!((nc.m_plus[0] - 10.2521).abs() < 1e-3);
        assert!((nc.m_minus[0] - 5.4417).abs() < 1e-3);
        let z1 = 2.0 * s2 - 2.0;
        let wp = -2.0 - z1;
        let e = z1 - 1.0 / z1;
        let prod = nc.m_plus[0] * nc.m_minus[0];
        assert!((prod - (wp / e).powi(2)).abs() / prod < 1e-12);
        assert!((prod - 55.788).abs() / prod < 1e-3);
        assert!((wp * wp - 8.0).abs() < 1e-12);
    }

    #[test]
    fn norming_q2_oracle() {
        // z1 = 2/3 exactly; m+ = 896/135, B = 32/27, m- = 189/40.
        let (bs, _) = spectrum(&w_q2(), 1e-9).unwrap();
        let nc = norming_constants(&w_q2(), &s_q2(), &bs).unwrap();
        assert!((nc.m_plus[0] - 896.0 / 135.0).abs() < 1e-10);
        assert!((nc.m_minus[0] - 189.0 / 40.0).abs() < 1e-10);
    }

    #[test]
    fn norming_direct_q1() {
        let z1 = 2.0 * 2.0_f64.sqrt() - 2.0;
        let direct = norming_direct(&q1(), z1).unwrap();
        let mp_exact = (96.0 * 2.0_f64.sqrt() - 64.0) / 7.0;
        assert!((direct - mp_exact).abs() < 1e-4);
        assert!((direct - 10.2521).abs() < 1e-3);
    }

    #[test]
    fn norming_direct_q2_cross_check() {
        let worst = norming_cross_check(&q2()).unwrap();
        assert!(worst < 1e-8, "relative disagreement {worst:e}");
    }

    #[test]
    fn norming_direct_rejects_non_bound_state() {
        assert!(matches!(
            norming_direct(&q1(), 0.5),
            Err(Error::NotABoundState { .. })
        ));
    }

    #[test]
    fn scattering_class_q2_passes() {
        let (bs, _) = spectrum(&w_q2(), 1e-9).unwrap();
        let d = validate_scattering_class(&s_q2(), &bs, 1e-9);
        assert!(d.passed(), "{}", d.failure_summary());
    }

    #[test]
    fn scattering_class_q1_passes() {
        let (bs, _) = spectrum(&w_q1(), 1e-9).unwrap();
        let d = validate_scattering_class(&s_q1(), &bs, 1e-9);
        assert!(d.passed(), "{}", d.failure_summary());
    }

    #[test]
    fn scattering_class_sign_flip_fails() {
        let (bs, _) = spectrum(&w_q2(), 1e-9).unwrap();
        let flipped = s_q2().scaled(-1.0);
        let d = validate_scattering_class(&flipped, &bs, 1e-9);
        assert!(!d.passed());
        assert!(d.failure_summary().contains("(S2)"));
    }

    #[test]
    fn resonance_class_q1_q2_pass() {
        for w in [w_q1(), w_q2()] {
            let d = validate_resonance_class(&w, 1e-9, 512);
            assert!(d.passed(), "{}", d.failure_summary());
        }
    }

    #[test]
    fn resonance_class_circle_zero_fails() {
        // 1 + z^2 vanishes at +-i where |eta| = 2.
        let w = RealPolynomial::new(vec![1.0, 0.0, 1.0]).unwrap();
        let d = validate_resonance_class(&w, 1e-9, 512);
        assert!(!d.passed());
    }

    #[test]
    fn trace_identities_q2_hand_values() {
        let rep = coefficient_identities(&w_q2(), &s_q2(), 2);
        // 2 + 8.5 = 10.5 ; <V^2 s,s> = 3 = 1 + 2 ; <V s,s> = -2.25 ; lag 3: -3.
        assert_eq!(rep.rows[0].0, 0);
        assert!((rep.rows[0].1 - 10.5).abs() < 1e-12);
        assert!((rep.rows[0].2 - 10.5).abs() < 1e-12);
        assert!((rep.rows[2].1 - 3.0).abs() < 1e-12);
        assert!((rep.rows[1].1 - (-2.25)).abs() < 1e-12);
        assert!((rep.rows[3].1 - (-3.0)).abs() < 1e-12);
        assert!(rep.max_residual() < 1e-12);
    }

    #[test]
    fn trace_identities_free() {
        let rep = coefficient_identities(&w_free(), &RealPolynomial::zero(), 1);
        // 2 + 0 = <w,w> = 1 + 1 = 2.
        assert!((rep.rows[0].1 - 2.0).abs() < 1e-14);
        assert!((rep.rows[0].2 - 2.0).abs() < 1e-14);
    }
}
