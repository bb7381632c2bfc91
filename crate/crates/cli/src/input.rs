use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use tasktrace::{parse_steps, parse_trace, MarkovModel, StepInstance, Trace};
use tasktrace_service::StoreRecord;

use crate::CliError;

fn open(path: &Path) -> Result<Box<dyn BufRead>, CliError> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    Ok(Box::new(BufReader::new(file)))
}

fn read_all(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
    Ok(text)
}

/// Reads one trace per non-blank line. Lines may also be exported store
/// records, in which case the embedded trace is used.
pub fn read_traces(path: &Path) -> Result<Vec<Trace>, CliError> {
    let mut traces = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_trace(&line) {
            Ok(t) => traces.push(t),
            Err(err) => match serde_json::from_str::<StoreRecord>(&line) {
                Ok(record) => traces.push(record.trace),
                Err(_) => {
                    return Err(CliError::Schema {
                        path: path.to_owned(),
                        line: Some(i + 1),
                        source: err,
                    })
                }
            },
        }
    }
    Ok(traces)
}

/// Reads a JSON array of steps.
pub fn read_hint(path: &Path) -> Result<Vec<StepInstance>, CliError> {
    parse_steps(&read_all(path)?).map_err(|source| CliError::Schema {
        path: path.to_owned(),
        line: None,
        source,
    })
}

pub fn read_model(path: &Path) -> Result<MarkovModel, CliError> {
    MarkovModel::from_json(&read_all(path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    read_all(path)
}

/// Writes `text` to `path`, or to `stdout` when the path is `-`.
pub fn write_text(path: &Path, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let fail = |source| CliError::Write {
        path: PathBuf::from(path),
        source,
    };
    if path == Path::new("-") {
        stdout.write_all(text.as_bytes()).map_err(fail)
    } else {
        std::fs::write(path, text).map_err(fail)
    }
}

pub fn jsonl(traces: &[Trace]) -> String {
    let mut buf = Vec::new();
    tasktrace::dataset::write_jsonl(&mut buf, traces).expect("writing to memory");
    String::from_utf8(buf).expect("serialized traces are UTF-8")
}
