//! Command-line front end and JSON interchange.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 unreadable or unparsable input,
//! 3 input that parses but violates an invariant.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{Channel, UNITAL_TOL};
use crate::choi::{channel_from_choi, choi_from_channel, choi_rank, ChoiState};
use crate::error::Error;
use crate::linalg::{herm_eig, partial_trace, ComplexMatrix, Factor, C64};
use crate::phase_covariant::{build_channel, extract_tau, TauFamily};
use crate::rotation::{spin_rep_from_j, OrbitalSpace};
use crate::states::{make_reference, DensityMatrix, ReferenceState};
use crate::symmetry::{check_covariance, check_modular_covariance, twirl_channel, Representation, COVARIANCE_TOL};
use crate::transpose::{commutant_dual, transpose_channel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Environment variable holding a global tolerance scale factor.
pub const TOL_ENV: &str = "CJKIT_TOL_OVERRIDE";

/// PSD gate used by `check --cp`.
pub const CP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChoiJson {
    pub d_in: usize,
    pub d_out: usize,
    pub s: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RepJson {
    Finite { elements: Vec<MatrixJson> },
    Phase { weights: Vec<i64> },
    Spin { j: f64 },
    /// Block rotation representation of a truncated orbital ⊗ radial space.
    Orbital { l_max: usize, n_rad: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TauEntryJson {
    pub l: i64,
    pub j: usize,
    pub m: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TauJson {
    pub d: usize,
    pub taus: Vec<TauEntryJson>,
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: m.data().iter().map(|z| [clean(z.re), clean(z.im)]).collect() }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, Error> {
        ComplexMatrix::from_vec(self.rows, self.cols, self.data.iter().map(|p| C64::new(p[0], p[1])).collect())
    }
}

impl ChannelJson {
    pub fn from_channel(c: &Channel) -> Self {
        Self { d_in: c.d_in(), d_out: c.d_out(), kraus: c.kraus().iter().map(MatrixJson::from_matrix).collect() }
    }

    pub fn to_channel(&self) -> Result<Channel, Error> {
        let kraus = self.kraus.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>, _>>()?;
        Channel::new(self.d_in, self.d_out, kraus)
    }
}

impl RepJson {
    pub fn to_representation(&self) -> Result<Representation, Error> {
        match self {
            Self::Finite { elements } => {
                Representation::finite(elements.iter().map(MatrixJson::to_matrix).collect::<Result<_, _>>()?)
            }
            Self::Phase { weights } => Ok(Representation::phase(weights.clone())),
            Self::Spin { j } => Ok(spin_rep_from_j(*j)?.into_representation()),
            Self::Orbital { l_max, n_rad } => Ok(OrbitalSpace::new(*l_max, *n_rad)?.representation()),
        }
    }
}

impl TauJson {
    pub fn from_family(tf: &TauFamily) -> Self {
        let taus = tf
            .taus()
            .iter()
            .map(|(&(l, j, m), z)| TauEntryJson { l, j, m, re: clean(z.re), im: clean(z.im) })
            .collect();
        Self { d: tf.d(), taus }
    }

    pub fn to_family(&self) -> Result<TauFamily, Error> {
        let mut map = BTreeMap::new();
        for e in &self.taus {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::InvalidState(format!("non-finite τ at (l={}, j={}, m={})", e.l, e.j, e.m)));
            }
            if map.insert((e.l, e.j, e.m), C64::new(e.re, e.im)).is_some() {
                return Err(Error::InvalidState(format!("duplicate τ entry (l={}, j={}, m={})", e.l, e.j, e.m)));
            }
        }
        TauFamily::new(self.d, map)
    }
}

/// Canonical serialization: pretty JSON, shortest round-trip floats, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse(msg) => write!(f, "parse error: {msg}"),
            Self::Validation(e) => write!(f, "validation error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Validation(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => EXIT_PARSE,
            Self::Validation(_) => EXIT_VALIDATION,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    fs::write(path, to_canonical_json(value)).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn read_channel(path: &Path) -> CliResult<Channel> {
    Ok(read_json::<ChannelJson>(path)?.to_channel()?)
}

fn read_rep(path: &Path) -> CliResult<Representation> {
    Ok(read_json::<RepJson>(path)?.to_representation()?)
}

fn read_reference(path: Option<&PathBuf>, d: usize) -> CliResult<ReferenceState> {
    match path {
        None => Ok(ReferenceState::maximally_mixed(d)),
        Some(p) => {
            let m = read_json::<MatrixJson>(p)?.to_matrix()?;
            if m.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!("ρ₀ is {}x{}, expected {d}x{d}", m.rows(), m.cols())).into());
            }
            Ok(make_reference(&DensityMatrix::new(m)?)?)
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cjkit", version, about = "Choi–Jamiołkowski conversions, transposes and covariance checks for quantum channels")]
pub struct Cli {
    /// Override every check tolerance (further scaled by CJKIT_TOL_OVERRIDE).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Kraus,
    Choi,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between Kraus and Choi form.
    Convert {
        #[arg(long, value_enum)]
        from: Form,
        #[arg(long, value_enum)]
        to: Form,
        /// Reference state (default: maximally mixed; for Choi input, the first margin).
        #[arg(long)]
        rho0: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Check properties of a channel and print a JSON report.
    Check(CheckArgs),
    /// Project a channel onto the covariant channels.
    Twirl {
        #[arg(long)]
        rep_a: PathBuf,
        #[arg(long)]
        rep_b: PathBuf,
        #[arg(long)]
        rho0: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Transpose (or commutant dual) of a unital channel.
    Transpose {
        #[arg(long)]
        rho0: Option<PathBuf>,
        /// Emit the commutant dual instead of the transpose.
        #[arg(long)]
        dual: bool,
        input: PathBuf,
        output: PathBuf,
    },
    /// Build or extract phase-covariant channels from τ tables.
    #[command(subcommand)]
    PhaseFamily(PhaseFamily),
    /// Describe a JSON object.
    Info { input: PathBuf },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Complete positivity (Choi PSD).
    #[arg(long)]
    pub cp: bool,
    /// Σ K†K = I.
    #[arg(long)]
    pub unital: bool,
    /// Covariance under a pair of representation files (input side, output side).
    #[arg(long, num_args = 2, value_names = ["REP_A", "REP_B"])]
    pub covariant: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub rho0: Option<PathBuf>,
    /// Output-side generator H for modular covariance.
    #[arg(long)]
    pub modular: Option<PathBuf>,
    pub input: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum PhaseFamily {
    Build {
        input: PathBuf,
        output: PathBuf,
    },
    Extract {
        #[arg(long)]
        rho0: Option<PathBuf>,
        input: PathBuf,
        output: PathBuf,
    },
}

/// Tolerance in effect for a check whose library default is `default`.
pub fn effective_tol(flag: Option<f64>, default: f64) -> f64 {
    let scale = std::env::var(TOL_ENV).ok().and_then(|v| v.trim().parse::<f64>().ok()).filter(|s| *s > 0.0).unwrap_or(1.0);
    flag.unwrap_or(default) * scale
}

fn check_entry(residual: f64, tol: f64) -> Value {
    json!({ "pass": residual <= tol, "residual": clean(residual) })
}

fn cmd_check(args: &CheckArgs, tol: Option<f64>) -> CliResult<i32> {
    let c = read_channel(&args.input)?;
    let r = read_reference(args.rho0.as_ref(), c.d_in())?;
    let defaults = !args.cp && !args.unital && args.covariant.is_none() && args.modular.is_none();
    let mut report = serde_json::Map::new();
    if args.cp || defaults {
        let s = choi_from_channel(&c, &r)?;
        let low = herm_eig(s.matrix())?.min();
        report.insert("cp".into(), check_entry((-low).max(0.0), effective_tol(tol, CP_TOL)));
    }
    if args.unital || defaults {
        report.insert("unital".into(), check_entry(c.unital_residual(), effective_tol(tol, UNITAL_TOL)));
    }
    if let Some(reps) = &args.covariant {
        let (a, b) = (read_rep(&reps[0])?, read_rep(&reps[1])?);
        let rep = check_covariance(&c, &a, &b, &r)?;
        report.insert("covariant".into(), check_entry(rep.residual, effective_tol(tol, COVARIANCE_TOL)));
    }
    if let Some(path) = &args.modular {
        let h = read_json::<MatrixJson>(path)?.to_matrix()?;
        let rep = check_modular_covariance(&c, &r, &h)?;
        report.insert("modular".into(), check_entry(rep.residual, effective_tol(tol, COVARIANCE_TOL)));
    }
    let all = report.values().all(|v| v["pass"] == Value::Bool(true));
    print!("{}", to_canonical_json(&Value::Object(report)));
    Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_convert(from: Form, to: Form, rho0: Option<&PathBuf>, input: &Path, output: &Path) -> CliResult<()> {
    match from {
        Form::Kraus => {
            let c = read_channel(input)?;
            let r = read_reference(rho0, c.d_in())?;
            match to {
                Form::Kraus => write_json(output, &ChannelJson::from_channel(&channel_from_choi(&choi_from_channel(&c, &r)?)?)),
                Form::Choi => {
                    let s = choi_from_channel(&c, &r)?;
                    if !s.margin_ok() {
                        return Err(Error::MarginViolation(s.margin_residual()).into());
                    }
                    write_json(output, &ChoiJson { d_in: c.d_in(), d_out: c.d_out(), s: MatrixJson::from_matrix(s.matrix()) })
                }
            }
        }
        Form::Choi => {
            let j: ChoiJson = read_json(input)?;
            let m = j.s.to_matrix()?;
            if m.shape() != (j.d_in * j.d_out, j.d_in * j.d_out) {
                return Err(Error::DimensionMismatch(format!(
                    "Choi matrix {}x{} for d_in = {}, d_out = {}",
                    m.rows(),
                    m.cols(),
                    j.d_in,
                    j.d_out
                ))
                .into());
            }
            let r = match rho0 {
                Some(_) => read_reference(rho0, j.d_in)?,
                None => make_reference(&DensityMatrix::new(partial_trace(&m, Factor::Second, (j.d_in, j.d_out))?.hermitian_part())?)?,
            };
            let s = ChoiState::new(r, j.d_out, m)?;
            match to {
                Form::Kraus => write_json(output, &ChannelJson::from_channel(&channel_from_choi(&s)?)),
                Form::Choi => write_json(output, &ChoiJson { d_in: j.d_in, d_out: j.d_out, s: MatrixJson::from_matrix(s.matrix()) }),
            }
        }
    }
}

fn reparse<T: DeserializeOwned>(v: &Value, input: &Path) -> CliResult<T> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Parse(format!("{}: {e}", input.display())))
}

fn cmd_info(input: &Path) -> CliResult<()> {
    let v: Value = read_json(input)?;
    let obj = v.as_object().ok_or_else(|| CliError::Parse("expected a JSON object".into()))?;
    let out = if obj.contains_key("kraus") {
        let c = reparse(&v, input).and_then(|j: ChannelJson| Ok(j.to_channel()?))?;
        let s = choi_from_channel(&c, &ReferenceState::maximally_mixed(c.d_in()))?;
        json!({
            "type": "channel",
            "d_in": c.d_in(),
            "d_out": c.d_out(),
            "kraus_count": c.kraus().len(),
            "unital_residual": c.unital_residual(),
            "choi_rank": choi_rank(&s),
            "minimal": c.is_minimal_kraus(),
        })
    } else if obj.contains_key("s") {
        let j: ChoiJson = reparse(&v, input)?;
        let m = j.s.to_matrix()?;
        let eig = herm_eig(&m)?;
        json!({
            "type": "choi",
            "d_in": j.d_in,
            "d_out": j.d_out,
            "trace": m.trace().re,
            "min_eigenvalue": eig.min(),
            "rank": crate::linalg::psd_rank(&eig, crate::choi::RANK_CUTOFF),
        })
    } else if obj.contains_key("kind") {
        let rep = reparse(&v, input).and_then(|j: RepJson| Ok(j.to_representation()?))?;
        json!({ "type": "representation", "kind": rep.kind(), "dim": rep.dim() })
    } else if obj.contains_key("taus") {
        let tf = reparse(&v, input).and_then(|j: TauJson| Ok(j.to_family()?))?;
        json!({ "type": "tau_family", "d": tf.d(), "entries": tf.taus().len() })
    } else if obj.contains_key("data") {
        let m = reparse(&v, input).and_then(|j: MatrixJson| Ok(j.to_matrix()?))?;
        json!({
            "type": "matrix",
            "rows": m.rows(),
            "cols": m.cols(),
            "trace": if m.is_square() { json!(m.trace().re) } else { Value::Null },
            "hermitian_residual": if m.is_square() { json!(m.hermitian_residual()) } else { Value::Null },
        })
    } else {
        return Err(CliError::Parse("unrecognized object".into()));
    };
    print!("{}", to_canonical_json(&out));
    Ok(())
}

fn dispatch(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Convert { from, to, rho0, input, output } => cmd_convert(*from, *to, rho0.as_ref(), input, output)?,
        Command::Check(args) => return cmd_check(args, cli.tol),
        Command::Twirl { rep_a, rep_b, rho0, input, output } => {
            let c = read_channel(input)?;
            let r = read_reference(rho0.as_ref(), c.d_in())?;
            let (a, b) = (read_rep(rep_a)?, read_rep(rep_b)?);
            // already-covariant input is its own projection; pass it through untouched
            let out = if check_covariance(&c, &a, &b, &r)?.residual <= effective_tol(cli.tol, COVARIANCE_TOL) {
                c
            } else {
                twirl_channel(&c, &a, &b, &r)?
            };
            write_json(output, &ChannelJson::from_channel(&out))?;
        }
        Command::Transpose { rho0, dual, input, output } => {
            let c = read_channel(input)?;
            let r = read_reference(rho0.as_ref(), c.d_in())?;
            let out = if *dual { commutant_dual(&c, &r)? } else { transpose_channel(&c, &r)?.transposed };
            write_json(output, &ChannelJson::from_channel(&out))?;
        }
        Command::PhaseFamily(PhaseFamily::Build { input, output }) => {
            let tf = read_json::<TauJson>(input)?.to_family()?;
            write_json(output, &ChannelJson::from_channel(&build_channel(&tf)?))?;
        }
        Command::PhaseFamily(PhaseFamily::Extract { rho0, input, output }) => {
            let c = read_channel(input)?;
            let r = read_reference(rho0.as_ref(), c.d_in())?;
            write_json(output, &TauJson::from_family(&extract_tau(&c, &r)?))?;
        }
        Command::Info { input } => cmd_info(input)?,
    }
    Ok(EXIT_OK)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cjkit: {e}");
            e.exit_code()
        }
    }
}
