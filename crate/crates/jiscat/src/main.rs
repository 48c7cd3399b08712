//! Command-line front end: parse a JSON problem file, run the forward,
//! inverse, or iso-resonance pipeline, and emit a deterministic JSON result
//! plus a human-readable check table on stderr.
//!
//! Exit codes: 0 success, 1 class/validation failure, 2 parse or schema
//! error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jiscat::error::Error;
use jiscat::files::{
    to_bytes, write_atomic, BoundStateOut, CheckBlock, CheckOut, Checks, ClassOut, IsoMemberOut,
    ProblemFile, ResonanceOut, ResultFile, SequenceOut,
};
use jiscat::inverse::{boundary_identities, lambda_consistency, recover_s, ScatteringData, SignSequence};
use jiscat::lattice::{classify, wronskian_pair, JacobiSequence, WronskianPair};
use jiscat::marchenko::{inverse_scattering_with_guards, iso_enumerate};
use jiscat::poly::RealPolynomial;
use jiscat::scattering::{
    coefficient_identities, norming_constants, spectrum, unitarity_residual,
    validate_resonance_class, validate_scattering_class, BoundStateSet, NormingConstants,
    DEFAULT_SPECTRUM_TOL,
};

#[derive(Parser)]
#[command(
    name = "jiscat",
    about = "Forward and inverse resonance scattering for Jacobi operators",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Problem file (UTF-8 JSON).
    file: PathBuf,
    /// Circle grid size for unitarity sweeps.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Residual threshold for the check blocks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the result file here instead of stdout (atomic).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Guard slots on each side of the reconstruction window.
    #[arg(long, default_value_t = 2)]
    range: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Sequence file -> w, s, bound states, resonances, norming constants.
    Forward(Common),
    /// Scattering file (s, E_N) -> reconstructed coefficients.
    InverseS(Common),
    /// Resonance file (w, sigma) -> s, E_N, and the coefficients.
    InverseW(Common),
    /// Sequence file -> the full iso-resonance family.
    Iso(Common),
    /// Sequence file -> every diagnostic block, pass/fail against --tol.
    Verify(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (
        &Common,
        fn(&ProblemFile, &Common, &mut ResultFile) -> Result<(), Error>,
    ) = match &cli.command {
        Command::Forward(c) => (c, cmd_forward),
        Command::InverseS(c) => (c, cmd_inverse_s),
        Command::InverseW(c) => (c, cmd_inverse_w),
        Command::Iso(c) => (c, cmd_iso),
        Command::Verify(c) => (c, cmd_verify),
    };

    let text = match std::fs::read_to_string(&common.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("jiscat: cannot read {}: {e}", common.file.display());
            return ExitCode::from(2);
        }
    };
    let problem: ProblemFile = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("jiscat: parse error in {}: {e}", common.file.display());
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = problem.validate() {
        eprintln!("jiscat: schema error in {}: {msg}", common.file.display());
        return ExitCode::from(2);
    }

    let echo: serde_json::Value = serde_json::from_str(&text).expect("parsed once already");
    let mut result = ResultFile::new(problem.kind(), echo);
    let code = match run(&problem, common, &mut result) {
        Ok(()) => {
            if result.status.starts_with("check failure") {
                1
            } else {
                0
            }
        }
        Err(e) => {
            result.status = format!("error: {e}");
            e.exit_code()
        }
    };

    print_table(&result);
    let bytes = match to_bytes(&result) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("jiscat: serialization failed: {e}");
            return ExitCode::from(3);
        }
    };
    match &common.output {
        Some(path) => {
            if let Err(e) = write_atomic(path, &bytes) {
                eprintln!("jiscat: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => {
            use std::io::Write;
            let _ = std::io::stdout().write_all(&bytes);
        }
    }
    ExitCode::from(code as u8)
}

fn sequence_of(problem: &ProblemFile) -> Result<JacobiSequence, Error> {
    match problem {
        ProblemFile::Sequence { offset, a, b } => JacobiSequence::normalize(a, b, *offset),
        _ => Err(Error::InvalidCoefficient(
            "this command needs a sequence file".into(),
        )),
    }
}

fn class_out(params: &jiscat::lattice::ClassParams) -> ClassOut {
    ClassOut {
        nu: params.nu,
        tau: params.tau,
        p: params.p,
        m: params.m(),
        shift: params.shift,
        below_theorem_scope: params.below_theorem_scope(),
    }
}

fn sequence_out(q: &JacobiSequence) -> SequenceOut {
    match q.window() {
        Some((lo, hi)) => SequenceOut {
            offset: lo,
            a: (lo..=hi).map(|n| q.a_at(n)).collect(),
            b: (lo..=hi).map(|n| q.b_at(n)).collect(),
        },
        None => SequenceOut {
            offset: 0,
            a: Vec::new(),
            b: Vec::new(),
        },
    }
}

fn bound_states_out(bs: &BoundStateSet, nc: Option<&NormingConstants>) -> Vec<BoundStateOut> {
    bs.states
        .iter()
        .enumerate()
        .map(|(i, st)| BoundStateOut {
            index: st.index,
            z: st.z,
            lambda: st.lambda,
            m_plus: nc.map(|n| n.m_plus[i]),
            m_minus: nc.map(|n| n.m_minus[i]),
        })
        .collect()
}

fn resonances_out(rs: &jiscat::scattering::ResonanceSet) -> Vec<ResonanceOut> {
    rs.entries
        .iter()
        .map(|r| ResonanceOut {
            re: r.z.re,
            im: r.z.im,
            multiplicity: r.multiplicity,
        })
        .collect()
}

/// Fill all five residual blocks for a (w, s) pair.
fn run_checks(
    w: &RealPolynomial,
    s: &RealPolynomial,
    bs: &BoundStateSet,
    p: usize,
    grid: usize,
    tol: f64,
) -> Checks {
    let uni = unitarity_residual(w, s, grid);
    let coeff_resid = jiscat::lattice::unitarity_coefficient_residual(w, s);
    let mut unitarity = CheckBlock::from_residual(
        "max | |A|^2 - 1 - |B|^2 | on grid",
        uni.max_defect.max(uni.max_det_defect),
        tol,
    );
    unitarity.checks.push(CheckOut {
        name: "coefficientwise w w~ + eta^2 = s s~".into(),
        passed: coeff_resid <= tol,
        residual: Some(coeff_resid),
        detail: format!("grid {grid}"),
    });
    if coeff_resid > tol {
        unitarity.passed = Some(false);
        unitarity.max_residual = Some(unitarity.max_residual.unwrap_or(0.0).max(coeff_resid));
    }

    let trp_rep = coefficient_identities(w, s, p);
    let trp = CheckBlock::from_residual("trace identities", trp_rep.max_residual(), tol);
    let sw5 = CheckBlock::from_diagnostics(&lambda_consistency(s, w));
    let boundary = CheckBlock::from_diagnostics(&boundary_identities(s, w));
    let mut class_diag = validate_resonance_class(w, tol, grid);
    let sc = validate_scattering_class(s, bs, tol);
    class_diag.checks.extend(sc.checks);
    class_diag.warnings.extend(sc.warnings);
    let class = CheckBlock::from_diagnostics(&class_diag);
    Checks {
        unitarity,
        trp,
        sw5,
        boundary,
        class,
    }
}

fn forward_outputs(
    result: &mut ResultFile,
    fwd: &WronskianPair,
    grid: usize,
    tol: f64,
) -> Result<(), Error> {
    result.outputs.w = Some(fwd.w.coeffs().to_vec());
    result.outputs.s = Some(fwd.s.coeffs().to_vec());
    match &fwd.class {
        None => {
            result.status = "degenerate: q=0".into();
            let uni = unitarity_residual(&fwd.w, &fwd.s, grid);
            result.checks.unitarity =
                CheckBlock::from_residual("unitarity (free case)", uni.max_defect, tol);
            let trp = coefficient_identities(&fwd.w, &fwd.s, 1);
            result.checks.trp =
                CheckBlock::from_residual("trace identities", trp.max_residual(), tol);
            Ok(())
        }
        Some(params) => {
            result.outputs.class = Some(class_out(params));
            let (bs, rs) = spectrum(&fwd.w, DEFAULT_SPECTRUM_TOL)?;
            let nc = norming_constants(&fwd.w, &fwd.s, &bs)?;
            result.outputs.bound_states = bound_states_out(&bs, Some(&nc));
            result.outputs.resonances = resonances_out(&rs);
            if !params.below_theorem_scope() {
                if let Ok(pairing) =
                    jiscat::inverse::canonical_zero_list(&fwd.w, jiscat::poly::DEFAULT_PAIR_TOL)
                {
                    if let Ok(sigma) = jiscat::inverse::sigma_of(&fwd.s, &pairing, 1e-6) {
                        result.outputs.sigma = Some(sigma.signs);
                    }
                }
            }
            result.checks = run_checks(&fwd.w, &fwd.s, &bs, params.p, grid, tol);
            Ok(())
        }
    }
}

fn cmd_forward(problem: &ProblemFile, c: &Common, result: &mut ResultFile) -> Result<(), Error> {
    let q = sequence_of(problem)?;
    let fwd = wronskian_pair(&q)?;
    forward_outputs(result, &fwd, c.grid, c.tol)
}

fn scattering_data_of(problem: &ProblemFile) -> Result<ScatteringData, Error> {
    match problem {
        ProblemFile::Scattering {
            s,
            bound_states,
            nu,
        } => {
            let s = RealPolynomial::new(s.clone())?;
            let bs = BoundStateSet::from_z_values(bound_states.clone());
            match nu {
                Some(n) => ScatteringData::with_nu(s, bs, *n),
                None => ScatteringData::infer(s, bs),
            }
        }
        _ => Err(Error::InvalidCoefficient(
            "this command needs a scattering file".into(),
        )),
    }
}

fn cmd_inverse_s(problem: &ProblemFile, c: &Common, result: &mut ResultFile) -> Result<(), Error> {
    let sd = scattering_data_of(problem)?;
    let outcome = inverse_scattering_with_guards(&sd, c.tol.min(1e-8), c.range)?;
    result.outputs.sequence = Some(sequence_out(&outcome.q));
    result.outputs.round_trip_residual = Some(
        outcome
            .s_residual
            .max(outcome.bound_state_residual)
            .max(outcome.guard_residual),
    );
    let params = classify(&outcome.q)?;
    result.outputs.class = Some(class_out(&params));
    let (bs, rs) = spectrum(&outcome.w, DEFAULT_SPECTRUM_TOL)?;
    let nc = norming_constants(&outcome.w, &sd.s, &bs)?;
    result.outputs.w = Some(outcome.w.coeffs().to_vec());
    result.outputs.s = Some(sd.s.coeffs().to_vec());
    result.outputs.bound_states = bound_states_out(&bs, Some(&nc));
    result.outputs.resonances = resonances_out(&rs);
    result.checks = run_checks(&outcome.w, &sd.s, &bs, sd.p, c.grid, c.tol);
    Ok(())
}

fn cmd_inverse_w(problem: &ProblemFile, c: &Common, result: &mut ResultFile) -> Result<(), Error> {
    let (w, sigma, nu) = match problem {
        ProblemFile::Resonance { w, sigma, nu } => (
            RealPolynomial::new(w.clone())?,
            SignSequence::new(sigma.clone())?,
            nu.unwrap_or(0),
        ),
        _ => {
            return Err(Error::InvalidCoefficient(
                "this command needs a resonance file".into(),
            ))
        }
    };
    let sd = recover_s(&w, &sigma, nu, c.tol.min(1e-8))?;
    let outcome = inverse_scattering_with_guards(&sd, c.tol.min(1e-8), c.range)?;
    result.outputs.sequence = Some(sequence_out(&outcome.q));
    result.outputs.sigma = Some(sigma.signs.clone());
    result.outputs.round_trip_residual = Some(
        outcome
            .s_residual
            .max(outcome.bound_state_residual)
            .max(outcome.guard_residual),
    );
    let params = classify(&outcome.q)?;
    result.outputs.class = Some(class_out(&params));
    let (bs, rs) = spectrum(&outcome.w, DEFAULT_SPECTRUM_TOL)?;
    let nc = norming_constants(&outcome.w, &sd.s, &bs)?;
    result.outputs.w = Some(outcome.w.coeffs().to_vec());
    result.outputs.s = Some(sd.s.coeffs().to_vec());
    result.outputs.bound_states = bound_states_out(&bs, Some(&nc));
    result.outputs.resonances = resonances_out(&rs);
    result.checks = run_checks(&outcome.w, &sd.s, &bs, sd.p, c.grid, c.tol);
    Ok(())
}

fn cmd_iso(problem: &ProblemFile, c: &Common, result: &mut ResultFile) -> Result<(), Error> {
    let q = sequence_of(problem)?;
    let members = iso_enumerate(&q, c.tol.min(1e-8))?;
    let fwd = wronskian_pair(&q)?;
    let params = fwd.class.as_ref().expect("iso rejects the free case");
    result.outputs.class = Some(class_out(params));
    result.outputs.w = Some(fwd.w.coeffs().to_vec());
    result.outputs.s = Some(fwd.s.coeffs().to_vec());
    result.outputs.iso_family = Some(
        members
            .iter()
            .map(|m| IsoMemberOut {
                sigma: m.sigma.signs.clone(),
                sequence: sequence_out(&m.q),
                w_residual: m.w_residual,
            })
            .collect(),
    );
    let (bs, rs) = spectrum(&fwd.w, DEFAULT_SPECTRUM_TOL)?;
    let nc = norming_constants(&fwd.w, &fwd.s, &bs)?;
    result.outputs.bound_states = bound_states_out(&bs, Some(&nc));
    result.outputs.resonances = resonances_out(&rs);
    result.checks = run_checks(&fwd.w, &fwd.s, &bs, params.p, c.grid, c.tol);
    Ok(())
}

fn cmd_verify(problem: &ProblemFile, c: &Common, result: &mut ResultFile) -> Result<(), Error> {
    let q = sequence_of(problem)?;
    let fwd = wronskian_pair(&q)?;
    forward_outputs(result, &fwd, c.grid, c.tol)?;
    if result.status.starts_with("degenerate") {
        return Ok(());
    }
    let failed: Vec<&str> = [
        ("unitarity", &result.checks.unitarity),
        ("trp", &result.checks.trp),
        ("sw5", &result.checks.sw5),
        ("boundary", &result.checks.boundary),
        ("class", &result.checks.class),
    ]
    .iter()
    .filter(|(_, b)| b.computed && b.passed == Some(false))
    .map(|(n, _)| *n)
    .collect();
    if !failed.is_empty() {
        result.status = format!("check failure: {}", failed.join(", "));
    }
    Ok(())
}

fn print_table(result: &ResultFile) {
    eprintln!("status: {}", result.status);
    eprintln!("{:<12} {:<10} {}", "block", "status", "max residual");
    for (name, block) in [
        ("unitarity", &result.checks.unitarity),
        ("trp", &result.checks.trp),
        ("sw5", &result.checks.sw5),
        ("boundary", &result.checks.boundary),
        ("class", &result.checks.class),
    ] {
        let status = if !block.computed {
            "pending"
        } else if block.passed == Some(true) {
            "pass"
        } else {
            "FAIL"
        };
        let resid = block
            .max_residual
            .map(|r| format!("{r:.3e}"))
            .unwrap_or_else(|| "-".into());
        eprintln!("{name:<12} {status:<10} {resid}");
    }
}
