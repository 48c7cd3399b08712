//! Problem and result file formats for the command-line front end.
//!
//! Result files are deterministic: fixed field order (declaration order)
//! and every float printed with 17 significant digits, so identical inputs
//! produce byte-identical outputs.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::report::Diagnostics;

/// Input problem file; `kind` selects the payload.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemFile {
    /// Coefficient window: `a` and `b` arrays starting at lattice `offset`.
    Sequence {
        offset: i64,
        a: Vec<f64>,
        b: Vec<f64>,
    },
    /// Scattering data: s coefficients (ascending powers) and bound-state
    /// positions. `nu` may be given explicitly; by default it is inferred
    /// from the constant coefficient of s.
    Scattering {
        s: Vec<f64>,
        bound_states: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu: Option<usize>,
    },
    /// Resonance data: w coefficients (ascending powers) and the sign
    /// sequence `sigma_0..sigma_m`. `nu` as above (default 0; w does not
    /// determine it).
    Resonance {
        w: Vec<f64>,
        sigma: Vec<i8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu: Option<usize>,
    },
}

impl ProblemFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemFile::Sequence { .. } => "sequence",
            ProblemFile::Scattering { .. } => "scattering",
            ProblemFile::Resonance { .. } => "resonance",
        }
    }

    /// Schema checks beyond what serde enforces: finite numbers, valid
    /// signs.
    pub fn validate(&self) -> Result<(), String> {
        let all_finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ProblemFile::Sequence { a, b, .. } => {
                if !all_finite(a) || !all_finite(b) {
                    return Err("non-finite entry in a or b".into());
                }
                if a.len() != b.len() {
                    return Err("a and b must have equal length".into());
                }
            }
            ProblemFile::Scattering {
                s,
                bound_states,
                nu,
            } => {
                if !all_finite(s) || !all_finite(bound_states) {
                    return Err("non-finite entry in s or bound_states".into());
                }
                if let Some(n) = nu {
                    if *n > 1 {
                        return Err("nu must be 0 or 1".into());
                    }
                }
            }
            ProblemFile::Resonance { w, sigma, nu } => {
                if !all_finite(w) {
                    return Err("non-finite entry in w".into());
                }
                if sigma.iter().any(|s| *s != 1 && *s != -1) {
                    return Err("sigma entries must be +1 or -1".into());
                }
                if let Some(n) = nu {
                    if *n > 1 {
                        return Err("nu must be 0 or 1".into());
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ClassOut {
    pub nu: usize,
    pub tau: usize,
    pub p: usize,
    pub m: usize,
    pub shift: i64,
    pub below_theorem_scope: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundStateOut {
    pub index: i32,
    pub z: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_minus: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceOut {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceOut {
    pub offset: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoMemberOut {
    pub sigma: Vec<i8>,
    pub sequence: SequenceOut,
    pub w_residual: f64,
}

/// One named check inside a residual block.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOut {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub detail: String,
}

/// A residual block; present in every result, `computed = false` when the
/// pipeline failed before reaching it.
#[derive(Debug, Clone, Serialize, Default)]
pub struct CheckBlock {
    pub computed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub checks: Vec<CheckOut>,
    pub warnings: Vec<String>,
}

impl CheckBlock {
    pub fn pending() -> Self {
        Self::default()
    }

    pub fn from_diagnostics(d: &Diagnostics) -> Self {
        CheckBlock {
            computed: true,
            passed: Some(d.passed()),
            max_residual: finite_or_none(d.max_residual()),
            checks: d
                .checks
                .iter()
                .map(|c| CheckOut {
                    name: c.name.clone(),
                    passed: c.passed,
                    residual: c.residual.and_then(|r| finite_or_none(r)),
                    detail: c.detail.clone(),
                })
                .collect(),
            warnings: d.warnings.clone(),
        }
    }

    pub fn from_residual(name: &str, residual: f64, tol: f64) -> Self {
        CheckBlock {
            computed: true,
            passed: Some(residual <= tol),
            max_residual: finite_or_none(residual),
            checks: vec![CheckOut {
                name: name.into(),
                passed: residual <= tol,
                residual: finite_or_none(residual),
                detail: format!("threshold {tol:e}"),
            }],
            warnings: Vec::new(),
        }
    }
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// All five residual blocks, always present.
#[derive(Debug, Clone, Serialize)]
pub struct Checks {
    pub unitarity: CheckBlock,
    pub trp: CheckBlock,
    pub sw5: CheckBlock,
    pub boundary: CheckBlock,
    pub class: CheckBlock,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            unitarity: CheckBlock::pending(),
            trp: CheckBlock::pending(),
            sw5: CheckBlock::pending(),
            boundary: CheckBlock::pending(),
            class: CheckBlock::pending(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    pub bound_states: Vec<BoundStateOut>,
    pub resonances: Vec<ResonanceOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iso_family: Option<Vec<IsoMemberOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round_trip_residual: Option<f64>,
}

/// The result file: input echo, outputs, residual blocks, status.
#[derive(Debug, Clone, Serialize)]
pub struct ResultFile {
    pub kind: String,
    pub input: serde_json::Value,
    pub status: String,
    pub outputs: Outputs,
    pub checks: Checks,
}

impl ResultFile {
    pub fn new(kind: &str, input: serde_json::Value) -> Self {
        ResultFile {
            kind: kind.into(),
            input,
            status: "ok".into(),
            outputs: Outputs::default(),
            checks: Checks::default(),
        }
    }
}

/// Pretty formatter printing every f64 with 17 significant digits.
struct SciFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl<'a> SciFormatter<'a> {
    fn new() -> Self {
        SciFormatter {
            inner: PrettyFormatter::new(),
        }
    }
}

impl<'a> Formatter for SciFormatter<'a> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.7e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serialize a result file to bytes with the deterministic formatter.
pub fn to_bytes(result: &ResultFile) -> io::Result<Vec<u8>> {
    let mut out = Vec::with_capacity(4096);
    let mut ser = Serializer::with_formatter(&mut out, SciFormatter::new());
    result
        .serialize(&mut ser)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    out.push(b'\n');
    Ok(out)
}

/// Write atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
