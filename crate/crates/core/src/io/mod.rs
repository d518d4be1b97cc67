//! Event logs, run manifests and the trace debug stream.
//!
//! An event log is JSON lines. Each replicate opens with a header object
//! carrying `format_version`, `N`, `rho`, `density`, `seed`, `replicate`,
//! `engine`, the event count and a SHA-256 of the state path; one line per
//! event follows, `{"n":k,"t":…,"ev":{"type":"coal","i":…,"j":…}}` or
//! `{"n":k,"t":…,"ev":{"type":"rec","i":…,"u":…}}`. Times and loci carry 17
//! significant digits.

mod manifest;

pub use manifest::{Layout, RunManifest, STREAM_LIMIT};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::arg::Arg;
use crate::config::{Engine, SimConfig};
use crate::density::BreakpointDensity;
use crate::error::{Error, Result};
use crate::numfmt::g17;
use crate::spatial::TraceState;
use crate::state::Event;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct LogHeader {
    pub format_version: u32,
    pub n_samples: u32,
    pub rho: f64,
    pub density: BreakpointDensity,
    pub seed: u64,
    pub replicate: u64,
    pub engine: Engine,
    pub events: usize,
    pub states_sha256: String,
}

impl LogHeader {
    pub fn for_run(config: &SimConfig, engine: Engine, arg: &Arg) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n_samples: config.n_samples,
            rho: config.rho,
            density: config.density,
            seed: config.seed,
            replicate: config.replicate_index,
            engine,
            events: arg.event_count(),
            states_sha256: states_sha256(arg),
        }
    }

    pub fn to_json_line(&self) -> String {
        format!(
            "{{\"format_version\":{},\"N\":{},\"rho\":{},\"density\":{},\"seed\":{},\"replicate\":{},\"engine\":\"{}\",\"events\":{},\"states_sha256\":\"{}\"}}",
            self.format_version,
            self.n_samples,
            g17(self.rho),
            Value::String(self.density.to_string()),
            self.seed,
            self.replicate,
            self.engine,
            self.events,
            self.states_sha256
        )
    }

    pub fn config(&self) -> SimConfig {
        SimConfig::new(self.n_samples, self.rho)
            .with_density(self.density)
            .with_seed(self.seed)
            .with_replicate(self.replicate)
    }
}

/// SHA-256 over one `time<TAB>state` line per state of the path.
pub fn states_sha256(arg: &Arg) -> String {
    let mut hasher = Sha256::new();
    for (t, x) in arg.states() {
        hasher.update(format!("{}\t{x}\n", g17(t)).as_bytes());
    }
    hasher.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn event_line(n: usize, t: f64, event: &Event) -> String {
    let ev = match *event {
        Event::Coalesce { i, j } => format!("{{\"type\":\"coal\",\"i\":{i},\"j\":{j}}}"),
        Event::Recombine { i, u } => format!("{{\"type\":\"rec\",\"i\":{i},\"u\":{}}}", g17(u)),
    };
    format!("{{\"n\":{n},\"t\":{},\"ev\":{ev}}}", g17(t))
}

/// Header line and event lines of one replicate, newline-terminated.
pub fn write_log(header: &LogHeader, arg: &Arg) -> String {
    let mut out = header.to_json_line();
    out.push('\n');
    for (k, (t, ev)) in arg.events().enumerate() {
        out.push_str(&event_line(k, t, &ev));
        out.push('\n');
    }
    out
}

/// One replicate read back from a log.
#[derive(Clone, Debug, PartialEq)]
pub struct LogRecord {
    pub header: LogHeader,
    pub events: Vec<(f64, Event)>,
    /// Line number of the header, counting from 1.
    pub line: usize,
}

impl LogRecord {
    /// Replays the events from the initial state and checks the checksum.
    pub fn to_arg(&self) -> Result<Arg> {
        let arg = Arg::replay(self.header.n_samples, &self.events)?;
        if states_sha256(&arg) != self.header.states_sha256 {
            return Err(Error::InvalidState(format!(
                "replicate {} does not reproduce its state checksum",
                self.header.replicate
            )));
        }
        Ok(arg)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.header.to_json_line();
        out.push('\n');
        for (k, (t, ev)) in self.events.iter().enumerate() {
            out.push_str(&event_line(k, *t, ev));
            out.push('\n');
        }
        out
    }
}

struct LineCtx<'a> {
    path: &'a Path,
    line: usize,
}

impl LineCtx<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: self.line,
            message: message.into(),
        }
    }

    fn field<'v>(&self, obj: &'v Map<String, Value>, key: &str) -> Result<&'v Value> {
        obj.get(key).ok_or_else(|| self.err(format!("missing field `{key}`")))
    }

    fn uint(&self, obj: &Map<String, Value>, key: &str) -> Result<u64> {
        self.field(obj, key)?
            .as_u64()
            .ok_or_else(|| self.err(format!("`{key}` must be a non-negative integer")))
    }

    fn index(&self, obj: &Map<String, Value>, key: &str) -> Result<usize> {
        usize::try_from(self.uint(obj, key)?).map_err(|_| self.err(format!("`{key}` is too large")))
    }

    fn number(&self, obj: &Map<String, Value>, key: &str) -> Result<f64> {
        self.field(obj, key)?
            .as_f64()
            .ok_or_else(|| self.err(format!("`{key}` must be a number")))
    }

    fn string<'v>(&self, obj: &'v Map<String, Value>, key: &str) -> Result<&'v str> {
        self.field(obj, key)?
            .as_str()
            .ok_or_else(|| self.err(format!("`{key}` must be a string")))
    }
}

fn parse_header(ctx: &LineCtx, obj: &Map<String, Value>) -> Result<LogHeader> {
    let version = ctx.uint(obj, "format_version")?;
    if version != FORMAT_VERSION as u64 {
        return Err(ctx.err(format!("unsupported format_version {version}")));
    }
    let n = ctx.uint(obj, "N")?;
    let n_samples = u32::try_from(n).map_err(|_| ctx.err("`N` is too large"))?;
    let density = ctx
        .string(obj, "density")?
        .parse()
        .map_err(|e: Error| ctx.err(e.to_string()))?;
    let engine = ctx
        .string(obj, "engine")?
        .parse()
        .map_err(|e: Error| ctx.err(e.to_string()))?;
    let sha = ctx.string(obj, "states_sha256")?;
    if sha.len() != 64 || !sha.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(ctx.err("`states_sha256` must be 64 hex digits"));
    }
    Ok(LogHeader {
        format_version: FORMAT_VERSION,
        n_samples,
        rho: ctx.number(obj, "rho")?,
        density,
        seed: ctx.uint(obj, "seed")?,
        replicate: ctx.uint(obj, "replicate")?,
        engine,
        events: ctx.index(obj, "events")?,
        states_sha256: sha.to_string(),
    })
}

fn parse_event(ctx: &LineCtx, obj: &Map<String, Value>, expected: usize) -> Result<(f64, Event)> {
    let n = ctx.index(obj, "n")?;
    if n != expected {
        return Err(ctx.err(format!("event index {n}, expected {expected}")));
    }
    let t = ctx.number(obj, "t")?;
    let ev = ctx
        .field(obj, "ev")?
        .as_object()
        .ok_or_else(|| ctx.err("`ev` must be an object"))?;
    let event = match ctx.string(ev, "type")? {
        "coal" => Event::Coalesce {
            i: ctx.index(ev, "i")?,
            j: ctx.index(ev, "j")?,
        },
        "rec" => Event::Recombine {
            i: ctx.index(ev, "i")?,
            u: ctx.number(ev, "u")?,
        },
        other => return Err(ctx.err(format!("unknown event type `{other}`"))),
    };
    Ok((t, event))
}

/// Parses every replicate in `text`; `path` only labels errors.
pub fn parse_logs(text: &str, path: &Path) -> Result<Vec<LogRecord>> {
    let mut records: Vec<LogRecord> = Vec::new();
    let check_complete = |r: &LogRecord, line: usize| -> Result<()> {
        if r.events.len() != r.header.events {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!(
                    "replicate {} declares {} events but {} were read",
                    r.header.replicate,
                    r.header.events,
                    r.events.len()
                ),
            });
        }
        Ok(())
    };
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let ctx = LineCtx { path, line: k + 1 };
        last_line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(raw).map_err(|e| ctx.err(format!("invalid JSON: {e}")))?;
        let obj = value.as_object().ok_or_else(|| ctx.err("expected a JSON object"))?;
        if obj.contains_key("format_version") {
            if let Some(prev) = records.last() {
                check_complete(prev, k + 1)?;
            }
            records.push(LogRecord {
                header: parse_header(&ctx, obj)?,
                events: Vec::new(),
                line: k + 1,
            });
        } else {
            let current = records.last_mut().ok_or_else(|| ctx.err("event before any header"))?;
            let event = parse_event(&ctx, obj, current.events.len())?;
            current.events.push(event);
        }
    }
    match records.last() {
        Some(r) => check_complete(r, last_line + 1)?,
        None => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: last_line + 1,
                message: "no header found".into(),
            })
        }
    }
    Ok(records)
}

/// Log files of a run: the file itself, or the `.jsonl` files of a directory
/// in name order.
pub fn log_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn read_logs(path: &Path) -> Result<Vec<LogRecord>> {
    let mut records = Vec::new();
    for file in log_files(path)? {
        let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        records.extend(parse_logs(&text, &file)?);
    }
    Ok(records)
}

/// JSON lines of the trace transitions of one replicate.
pub fn trace_lines(replicate: u64, traces: &[TraceState]) -> String {
    let set =
        |z: &crate::typeset::TypeSet| format!("[{}]", z.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    let mut out = String::new();
    for trace in traces {
        for step in &trace.steps {
            let material: Vec<String> = step.xi.entries().iter().map(set).collect();
            let (edge, label) = match step.edge {
                Some((e, k)) => (e.to_string(), k.to_string()),
                None => ("null".into(), "null".into()),
            };
            let _ = writeln!(
                out,
                "{{\"replicate\":{replicate},\"breakpoint\":{},\"locus\":{},\"t0\":{},\"xi\":{},\"j\":{},\"T\":{},\"material\":[{}],\"edge\":{edge},\"label\":{label}}}",
                trace.index,
                g17(trace.locus),
                g17(trace.t0),
                set(&trace.xi),
                step.j,
                g17(step.latitude),
                material.join(",")
            );
        }
    }
    out
}
