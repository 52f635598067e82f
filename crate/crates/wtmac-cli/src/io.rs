//! File loading, float rounding and artifact output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value};
use wtmac::probkit::{Channel, ChannelJson, Dist, FactoredInput, FactoredJson, WiretapMAC};

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Lib(wtmac::Error),
    /// Bad arguments or unreadable input (exit 1).
    Input(String),
    /// Artifact could not be written (exit 2).
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) => e.exit_code(),
            CliError::Input(_) => 1,
            CliError::Output(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<wtmac::Error> for CliError {
    fn from(e: wtmac::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn tagged<T>(path: &Path, r: wtmac::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        wtmac::Error::Validation(m) => wtmac::Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
    .map_err(CliError::Lib)
}

/// Loads a channel file. Rows are checked at the arithmetic tolerance so
/// that files written with 12 significant digits load again.
pub fn load_channel(path: &Path) -> CliResult<WiretapMAC> {
    let j: ChannelJson = parse(path, &read(path)?)?;
    channel_from_json(path, &j)
}

pub fn channel_from_json(path: &Path, j: &ChannelJson) -> CliResult<WiretapMAC> {
    if j.rows.len() != j.x * j.y || j.rows.iter().any(|r| r.len() != j.t * j.z) {
        return Err(CliError::Input(format!(
            "{}: channel needs {} rows of {} entries",
            path.display(),
            j.x * j.y,
            j.t * j.z
        )));
    }
    let w = tagged(path, Channel::from_arith(j.rows.clone()))?;
    tagged(path, WiretapMAC::from_channel(j.x, j.y, j.t, j.z, w))
}

/// Loads the input factors for `mac`, at the same tolerance as channels.
pub fn load_input(path: &Path, mac: WiretapMAC) -> CliResult<FactoredInput> {
    let j: FactoredJson = parse(path, &read(path)?)?;
    input_from_json(path, &j, mac)
}

pub fn input_from_json(path: &Path, j: &FactoredJson, mac: WiretapMAC) -> CliResult<FactoredInput> {
    let ch = |rows: &Vec<Vec<f64>>| tagged(path, Channel::from_arith(rows.clone()));
    let p = FactoredInput::new(
        tagged(path, Dist::from_arith(j.p_u.clone()))?,
        ch(&j.v1_given_u)?,
        ch(&j.v2_given_u)?,
        ch(&j.x_given_v1)?,
        ch(&j.y_given_v2)?,
        mac,
    );
    tagged(path, p)
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every non-integer number in `v`.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().unwrap_or(0.0));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, v)| (k, round_value(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

/// CSV cell for a float.
pub fn cell(x: f64) -> String {
    round12(x).to_string()
}

/// Wraps a result as `{command, seed, result}` and writes it to `out`
/// (or stdout).
pub fn emit(command: &str, seed: u64, result: Value, out: Option<&PathBuf>) -> CliResult<()> {
    let mut env = Map::new();
    env.insert("command".into(), Value::String(command.into()));
    env.insert("seed".into(), Value::from(seed));
    env.insert("result".into(), round_value(result));
    let text = serde_json::to_string_pretty(&Value::Object(env))
        .map_err(|e| CliError::Output(e.to_string()))?
        + "\n";
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes CSV records (first record is the header).
pub fn write_csv(path: &Path, records: &[Vec<String>]) -> CliResult<()> {
    let err = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(err)?;
    for r in records {
        w.write_record(r).map_err(err)?;
    }
    w.flush()
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

pub fn to_value<T: serde::Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Output(e.to_string()))
}
