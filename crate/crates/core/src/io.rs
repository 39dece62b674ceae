//! File formats: binary field snapshots, diagnostics CSV, JSON run
//! configuration and the compact field-spec strings accepted by the CLI.
//!
//! Snapshot layout (all integers little-endian):
//!
//! | bytes       | content                                   |
//! |-------------|-------------------------------------------|
//! | 0..4        | magic `HFD1`                              |
//! | 4..8        | version `u32 = 1`                         |
//! | 8..12       | `n: u32`                                  |
//! | 12..16      | layout `u32 = 0` (physical samples)       |
//! | 16..        | `3·n³` f64 LE, component-major, `i₃` fastest |

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DiagnosticsRow, DiagnosticsSeries, EvolveConfig};
use crate::error::{Error, Result};
use crate::fields::{abc_field, helical_mode, random_beltrami_field, random_exact_field, Helicity};
use crate::grid::{GridSpec, WaveVector, MIN_RESOLUTION};
use crate::SpectralVectorField;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"HFD1";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const LAYOUT_PHYSICAL: u32 = 0;
const HEADER_LEN: usize = 16;

/// Largest resolution accepted from a file, checked before allocating.
pub const MAX_FILE_RESOLUTION: usize = 1024;

pub const CSV_HEADER: &str = "step,t,energy,helicity,stationarity_residual,max_divergence";

/// Physical samples of a vector field, exactly as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub grid: GridSpec,
    pub samples: [Vec<f64>; 3],
}

impl FieldSnapshot {
    pub fn from_field(field: &SpectralVectorField) -> Self {
        Self {
            grid: *field.grid(),
            samples: field.to_samples(),
        }
    }

    pub fn to_field(&self) -> Result<SpectralVectorField> {
        let s = &self.samples;
        SpectralVectorField::from_samples(self.grid, [&s[0], &s[1], &s[2]])
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 24 * self.grid.len());
        out.extend_from_slice(SNAPSHOT_MAGIC);
        out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.grid.n() as u32).to_le_bytes());
        out.extend_from_slice(&LAYOUT_PHYSICAL.to_le_bytes());
        for comp in &self.samples {
            for v in comp {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::format(
                "header",
                format!("file has {} bytes, header needs {HEADER_LEN}", bytes.len()),
            ));
        }
        if &bytes[0..4] != SNAPSHOT_MAGIC {
            return Err(Error::format(
                "magic",
                format!("expected \"HFD1\", found {:?}", &bytes[0..4]),
            ));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
        let version = word(4);
        if version != SNAPSHOT_VERSION {
            return Err(Error::format(
                "version",
                format!("unsupported version {version}"),
            ));
        }
        let n = word(8) as usize;
        if n < MIN_RESOLUTION || !n.is_multiple_of(2) || n > MAX_FILE_RESOLUTION {
            return Err(Error::format(
                "n",
                format!(
                    "resolution {n} must be even and in {MIN_RESOLUTION}..={MAX_FILE_RESOLUTION}"
                ),
            ));
        }
        let layout = word(12);
        if layout != LAYOUT_PHYSICAL {
            return Err(Error::format(
                "layout",
                format!("unsupported layout {layout}"),
            ));
        }
        let grid = GridSpec::new(n)?;
        let expect = 24 * grid.len();
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expect {
            return Err(Error::format(
                "payload",
                format!(
                    "expected {expect} bytes for n = {n}, found {}",
                    payload.len()
                ),
            ));
        }
        let mut samples: [Vec<f64>; 3] = Default::default();
        for (j, chunk) in payload.chunks_exact(8 * grid.len()).enumerate() {
            samples[j] = chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                .collect();
        }
        Ok(Self { grid, samples })
    }
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_snapshot(path: &Path, snapshot: &FieldSnapshot) -> Result<()> {
    write_atomic(path, &snapshot.encode())
}

pub fn read_snapshot(path: &Path) -> Result<FieldSnapshot> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    FieldSnapshot::decode(&bytes)
}

pub fn save_field(path: &Path, field: &SpectralVectorField) -> Result<()> {
    write_snapshot(path, &FieldSnapshot::from_field(field))
}

pub fn load_field(path: &Path) -> Result<SpectralVectorField> {
    read_snapshot(path)?.to_field()
}

/// `{prefix}_stepNNNNNN.hfd`.
pub fn snapshot_path(prefix: &str, step: usize) -> PathBuf {
    PathBuf::from(format!("{prefix}_step{step:06}.hfd"))
}

/// 17 significant digits, enough for an exact f64 round trip.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn diagnostics_csv(series: &DiagnosticsSeries) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &series.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.step,
            format_f64(r.t),
            format_f64(r.energy),
            format_f64(r.helicity),
            format_f64(r.stationarity_residual),
            format_f64(r.max_divergence),
        ));
    }
    out
}

pub fn write_diagnostics_csv(path: &Path, series: &DiagnosticsSeries) -> Result<()> {
    write_atomic(path, diagnostics_csv(series).as_bytes())
}

pub fn parse_diagnostics_csv<R: Read>(reader: R) -> Result<DiagnosticsSeries> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::format("header", "empty file"))?;
    if header.trim_end() != CSV_HEADER {
        return Err(Error::format(
            "header",
            format!("unexpected header {header:?}"),
        ));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.trim_end().split(',').collect();
        let row_name = format!("row {}", i + 1);
        if cols.len() != 6 {
            return Err(Error::format(
                row_name,
                format!("expected 6 columns, got {}", cols.len()),
            ));
        }
        let num = |c: &str| {
            c.parse::<f64>()
                .map_err(|e| Error::format(row_name.clone(), format!("{c:?}: {e}")))
        };
        rows.push(DiagnosticsRow {
            step: cols[0]
                .parse()
                .map_err(|e| Error::format(row_name.clone(), format!("step: {e}")))?,
            t: num(cols[1])?,
            energy: num(cols[2])?,
            helicity: num(cols[3])?,
            stationarity_residual: num(cols[4])?,
            max_divergence: num(cols[5])?,
        });
    }
    Ok(DiagnosticsSeries { rows })
}

pub fn read_diagnostics_csv(path: &Path) -> Result<DiagnosticsSeries> {
    parse_diagnostics_csv(fs::File::open(path)?)
}

fn default_one() -> f64 {
    1.0
}

/// Initial vorticity of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitSpec {
    Abc {
        #[serde(default = "default_one")]
        a: f64,
        #[serde(default = "default_one")]
        b: f64,
        #[serde(default = "default_one")]
        c: f64,
    },
    Helical {
        k: [i64; 3],
        sign: String,
        #[serde(default = "default_one")]
        amplitude: f64,
    },
    Random {
        seed: u64,
        band: usize,
        #[serde(default = "default_one")]
        amplitude: f64,
    },
    File {
        path: PathBuf,
    },
}

impl InitSpec {
    pub fn build(&self, grid: GridSpec) -> Result<SpectralVectorField> {
        match self {
            InitSpec::Abc { a, b, c } => Ok(abc_field(grid, *a, *b, *c)),
            InitSpec::Helical { k, sign, amplitude } => {
                let s = Helicity::from_str(sign).map_err(Error::InvalidArgument)?;
                helical_mode(grid, WaveVector::from(*k), s, *amplitude)
            }
            InitSpec::Random {
                seed,
                band,
                amplitude,
            } => random_exact_field(grid, *seed, *band, *amplitude),
            InitSpec::File { path } => {
                let f = load_field(path)?;
                grid.check_same(f.grid()).map_err(|_| {
                    Error::invalid(format!(
                        "{} holds n = {}, run uses n = {}",
                        path.display(),
                        f.grid().n(),
                        grid.n()
                    ))
                })?;
                Ok(f)
            }
        }
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be finite")))
            }
        };
        match self {
            InitSpec::Abc { a, b, c } => {
                finite(*a, "a")?;
                finite(*b, "b")?;
                finite(*c, "c")
            }
            InitSpec::Helical { k, sign, amplitude } => {
                finite(*amplitude, "amplitude")?;
                Helicity::from_str(sign).map_err(Error::InvalidArgument)?;
                let k = WaveVector::from(*k);
                if k.is_zero() || !grid.is_retained(&k) {
                    return Err(Error::invalid(format!(
                        "helical k {:?} must be nonzero with max |k_j| <= {}",
                        k.components(),
                        grid.dealias_cutoff()
                    )));
                }
                Ok(())
            }
            InitSpec::Random {
                band, amplitude, ..
            } => {
                finite(*amplitude, "amplitude")?;
                if *band == 0 || *band as i64 > grid.dealias_cutoff() {
                    return Err(Error::invalid(format!(
                        "band must lie in 1..={}",
                        grid.dealias_cutoff()
                    )));
                }
                Ok(())
            }
            InitSpec::File { path } => {
                if path.as_os_str().is_empty() {
                    return Err(Error::invalid("init file path is empty"));
                }
                Ok(())
            }
        }
    }
}

/// JSON mirror of the `evolve` command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub init: InitSpec,
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub snapshot_every: usize,
    pub out: String,
}

fn default_record_every() -> usize {
    1
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::format("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n)
    }

    pub fn evolve_config(&self) -> EvolveConfig {
        EvolveConfig::new(self.dt, self.steps)
            .record_every(self.record_every)
            .snapshot_every(self.snapshot_every)
    }

    /// Range checks only; nothing is allocated or computed.
    pub fn validate(&self) -> Result<()> {
        if self.n > MAX_FILE_RESOLUTION {
            return Err(Error::invalid(format!(
                "n = {} exceeds {MAX_FILE_RESOLUTION}",
                self.n
            )));
        }
        let grid = self.grid()?;
        self.evolve_config().validate()?;
        self.init.validate(&grid)?;
        if self.out.is_empty() {
            return Err(Error::invalid("out prefix is empty"));
        }
        Ok(())
    }

    pub fn csv_path(&self) -> PathBuf {
        PathBuf::from(format!("{}.csv", self.out))
    }
}

/// Field description used on the command line:
/// `abc:A,B,C`, `helical:k1,k2,k3,±[,amp]`, `random:seed,band[,amp]`,
/// `beltrami:seed,shell,±` (random curl eigenfield on `|k|² = shell`) or
/// `file:PATH` (a bare path ending in `.hfd` also works).
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Init(InitSpec),
    Beltrami {
        seed: u64,
        shell: i64,
        sign: Helicity,
    },
}

impl FieldSpec {
    pub fn build(&self, grid: GridSpec) -> Result<SpectralVectorField> {
        match self {
            FieldSpec::Init(init) => init.build(grid),
            FieldSpec::Beltrami { seed, shell, sign } => {
                random_beltrami_field(grid, *seed, *shell, *sign, 1.0)
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::invalid(format!("field spec {s:?}: {msg}"));
        let (kind, rest) = match s.split_once(':') {
            Some(p) => p,
            None if s.ends_with(".hfd") => ("file", s),
            None => return Err(bad("expected KIND:ARGS".into())),
        };
        let args: Vec<&str> = rest.split(',').map(str::trim).collect();
        let num = |i: usize| -> Result<f64> {
            args.get(i)
                .ok_or_else(|| bad(format!("missing argument {}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| bad(e.to_string()))
        };
        let int = |i: usize| -> Result<i64> {
            args.get(i)
                .ok_or_else(|| bad(format!("missing argument {}", i + 1)))?
                .parse::<i64>()
                .map_err(|e| bad(e.to_string()))
        };
        let sign = |i: usize| -> Result<Helicity> {
            Helicity::from_str(
                args.get(i)
                    .ok_or_else(|| bad("missing helicity sign".into()))?,
            )
            .map_err(bad)
        };
        let arity = |lo: usize, hi: usize| {
            if args.len() < lo || args.len() > hi {
                Err(bad(format!(
                    "expected {lo}..={hi} arguments, got {}",
                    args.len()
                )))
            } else {
                Ok(())
            }
        };
        let spec = match kind {
            "abc" => {
                arity(3, 3)?;
                FieldSpec::Init(InitSpec::Abc {
                    a: num(0)?,
                    b: num(1)?,
                    c: num(2)?,
                })
            }
            "helical" => {
                arity(4, 5)?;
                let s = sign(3)?;
                FieldSpec::Init(InitSpec::Helical {
                    k: [int(0)?, int(1)?, int(2)?],
                    sign: if s == Helicity::Plus { "+" } else { "-" }.into(),
                    amplitude: if args.len() == 5 { num(4)? } else { 1.0 },
                })
            }
            "random" => {
                arity(2, 3)?;
                let seed = int(0)?;
                let band = int(1)?;
                if seed < 0 || band < 1 {
                    return Err(bad("seed must be >= 0 and band >= 1".into()));
                }
                FieldSpec::Init(InitSpec::Random {
                    seed: seed as u64,
                    band: band as usize,
                    amplitude: if args.len() == 3 { num(2)? } else { 1.0 },
                })
            }
            "beltrami" => {
                arity(3, 3)?;
                let seed = int(0)?;
                if seed < 0 {
                    return Err(bad("seed must be >= 0".into()));
                }
                FieldSpec::Beltrami {
                    seed: seed as u64,
                    shell: int(1)?,
                    sign: sign(2)?,
                }
            }
            "file" => FieldSpec::Init(InitSpec::File {
                path: PathBuf::from(rest),
            }),
            other => return Err(bad(format!("unknown kind {other:?}"))),
        };
        Ok(spec)
    }
}
