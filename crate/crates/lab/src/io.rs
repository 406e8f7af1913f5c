//! On-disk formats: binary mode and field files, ladder CSV, plot data and
//! fidelity curves.
//!
//! Binary files are one ASCII header line followed by a raw payload. The
//! header is `MAGIC VERSION key=value ...` terminated by `\n`; floats are
//! written in shortest round-trip form. The payload is little-endian `f64`,
//! `(re, im)` interleaved, component-major: all nodes of component 0, then
//! component 1, and so on. `sha256` in the header is the hex digest of the
//! payload bytes and is checked on load.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::grid::{Components, Grid3, GridSpec2D, SpinorField3D};
use crate::landau::{lp_norm, EigenMode2D, LP_EXPONENTS};
use crate::scaling::{Column, NormLadderReport};

pub const MODE_MAGIC: &str = "MAGDIRAC-MODE";
pub const FIELD_MAGIC: &str = "MAGDIRAC-FIELD";
pub const FORMAT_VERSION: u32 = 1;

/// Columns of the ladder CSV, in order.
pub const CSV_COLUMNS: [&str; 10] = [
    "R",
    "norm_fR_Hsigma",
    "norm_fR_L2",
    "norm_fR_H1",
    "norm_WR_mixed",
    "norm_FtildeR_dual",
    "quot_epo25",
    "quot_epo26",
    "quot_epo75",
    "valid",
];

/// Parsed header line of a binary file.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub magic: String,
    pub version: u32,
    pub entries: BTreeMap<String, String>,
}

impl Header {
    fn parse(line: &str) -> Result<Self> {
        let mut tokens = line.split_ascii_whitespace();
        let magic = tokens.next().ok_or_else(|| LabError::Format("empty header".into()))?.to_string();
        let version = tokens
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| LabError::Format(format!("{magic}: missing version")))?;
        let mut entries = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| LabError::Format(format!("bad header token {tok:?}")))?;
            entries.insert(k.to_string(), v.to_string());
        }
        Ok(Self { magic, version, entries })
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| LabError::Format(format!("{}: header lacks {key}", self.magic)))
    }

    pub fn float(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        v.parse().map_err(|_| LabError::Format(format!("{key}={v} is not a number")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.parse().map_err(|_| LabError::Format(format!("{key}={v} is not a count")))
    }

    fn triple<T: std::str::FromStr>(&self, key: &str) -> Result<[T; 3]> {
        let v = self.get(key)?;
        let parts: Vec<T> =
            v.split(',').map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad(key, v))?;
        <[T; 3]>::try_from(parts).map_err(|_| bad(key, v))
    }
}

fn bad(key: &str, v: &str) -> LabError {
    LabError::Format(format!("{key}={v} is not a triple"))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn encode(data: &Components) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.iter().map(|c| c.len() * 16).sum());
    for comp in data {
        for z in comp {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn decode(bytes: &[u8], len: usize) -> Result<Components> {
    if bytes.len() != 64 * len {
        return Err(LabError::Format(format!("payload has {} bytes, expected {}", bytes.len(), 64 * len)));
    }
    let f = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    Ok(std::array::from_fn(|c| {
        (0..len).map(|k| Complex64::new(f(2 * (c * len + k)), f(2 * (c * len + k) + 1))).collect()
    }))
}

fn write_binary(path: &Path, magic: &str, fields: &[(&str, String)], payload: &[u8]) -> Result<String> {
    let digest = sha256_hex(payload);
    let mut line = format!("{magic} {FORMAT_VERSION}");
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push_str(&format!(" sha256={digest}\n"));
    let mut bytes = line.into_bytes();
    bytes.extend_from_slice(payload);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(digest)
}

fn read_binary(path: &Path, magic: &str) -> Result<(Header, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let nl = bytes
        .iter()
        .position(|b| *b == b'\n')
        .ok_or_else(|| LabError::Format(format!("{}: no header line", path.display())))?;
    let line = std::str::from_utf8(&bytes[..nl]).map_err(|_| LabError::Format("header is not UTF-8".into()))?;
    let header = Header::parse(line)?;
    if header.magic != magic || header.version != FORMAT_VERSION {
        return Err(LabError::Format(format!(
            "{}: expected {magic} {FORMAT_VERSION}, found {} {}",
            path.display(),
            header.magic,
            header.version
        )));
    }
    let payload = bytes[nl + 1..].to_vec();
    let digest = sha256_hex(&payload);
    if header.get("sha256")? != digest {
        return Err(LabError::Format(format!("{}: checksum mismatch", path.display())));
    }
    Ok((header, payload))
}

fn opt_hash(config_hash: Option<&str>) -> Vec<(&'static str, String)> {
    config_hash.map(|h| vec![("config", h.to_string())]).unwrap_or_default()
}

/// Writes one eigenmode; returns the payload checksum.
pub fn write_mode(path: &Path, mode: &EigenMode2D, config_hash: Option<&str>) -> Result<String> {
    let mut fields = vec![
        ("L", format!("{:?}", mode.grid.half_width)),
        ("N", mode.grid.n.to_string()),
        ("lambda", format!("{:?}", mode.lambda)),
        ("residual", format!("{:?}", mode.residual)),
        ("decay_rate", format!("{:?}", mode.decay_rate)),
        ("decay_r2", format!("{:?}", mode.decay_r2)),
    ];
    fields.extend(opt_hash(config_hash));
    write_binary(path, MODE_MAGIC, &fields, &encode(&mode.v))
}

/// Reads a mode written by [`write_mode`]; returns it with its checksum.
pub fn read_mode(path: &Path) -> Result<(EigenMode2D, String)> {
    let (h, payload) = read_binary(path, MODE_MAGIC)?;
    let grid = GridSpec2D::small(h.float("L")?, h.usize("N")?)?;
    let v = decode(&payload, grid.len())?;
    let lp_norms = LP_EXPONENTS.map(|p| lp_norm(grid, &v, p));
    let mode = EigenMode2D {
        grid,
        lambda: h.float("lambda")?,
        v,
        residual: h.float("residual")?,
        decay_rate: h.float("decay_rate")?,
        decay_r2: h.float("decay_r2")?,
        lp_norms,
    };
    Ok((mode, h.get("sha256")?.to_string()))
}

/// File of the `index`-th mode of the solve on `grid` inside `dir`.
pub fn mode_path(dir: &Path, grid: GridSpec2D, index: usize) -> PathBuf {
    dir.join(format!("mode_L{}_N{}_{index:02}.bin", grid.half_width, grid.n))
}

/// The cached modes `0..count` of `grid`, or `None` if any file is absent.
/// Present but corrupt files are an error.
pub fn load_modes(dir: &Path, grid: GridSpec2D, count: usize) -> Result<Option<Vec<(EigenMode2D, String)>>> {
    let paths: Vec<PathBuf> = (0..count).map(|i| mode_path(dir, grid, i)).collect();
    if !paths.iter().all(|p| p.is_file()) {
        return Ok(None);
    }
    let modes = paths.iter().map(|p| read_mode(p)).collect::<Result<Vec<_>>>()?;
    if modes.iter().any(|(m, _)| m.grid != grid) {
        return Err(LabError::GridMismatch(format!(
            "cache in {} is not for L={} N={}",
            dir.display(),
            grid.half_width,
            grid.n
        )));
    }
    Ok(Some(modes))
}

/// Writes a 3D field; header keys `dims`, `origin`, `spacing` (comma triples) and `time`.
pub fn write_field(path: &Path, field: &SpinorField3D, config_hash: Option<&str>) -> Result<String> {
    let g = field.grid;
    let triple = |a: [String; 3]| a.join(",");
    let mut fields = vec![
        ("kind", "cartesian".to_string()),
        ("dims", triple(g.dims.map(|d| d.to_string()))),
        ("origin", triple(g.origin.map(|x| format!("{x:?}")))),
        ("spacing", triple(g.spacing.map(|x| format!("{x:?}")))),
        ("time", format!("{:?}", field.time)),
    ];
    fields.extend(opt_hash(config_hash));
    write_binary(path, FIELD_MAGIC, &fields, &encode(&field.data))
}

pub fn read_field(path: &Path) -> Result<SpinorField3D> {
    let (h, payload) = read_binary(path, FIELD_MAGIC)?;
    let grid = Grid3 { origin: h.triple("origin")?, spacing: h.triple("spacing")?, dims: h.triple("dims")? };
    Ok(SpinorField3D { data: decode(&payload, grid.len())?, grid, time: h.float("time")? })
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// The ladder in the CSV schema of [`CSV_COLUMNS`], preceded by a
/// `# config_hash=` comment line.
pub fn write_ladder_csv<W: Write>(out: W, report: &NormLadderReport, config_hash: &str) -> Result<()> {
    let mut out = out;
    writeln!(out, "# config_hash={config_hash}")?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| LabError::Format(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            num(r.r),
            num(r.norm_fr_hsigma),
            num(r.norm_fr_l2),
            num(r.norm_fr_h1),
            num(r.norm_wr_mixed),
            num(r.norm_ftilde_dual),
            num(r.quot_epo25),
            num(r.quot_epo26),
            num(r.quot_epo75),
            r.valid.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `log R` and `log value` of a column over the valid rows.
pub fn write_plot<W: Write>(mut out: W, report: &NormLadderReport, column: Column, config_hash: &str) -> Result<()> {
    writeln!(out, "# config_hash={config_hash}")?;
    writeln!(out, "# log_R log_{}", column.name())?;
    let (x, y) = report.series(column);
    for (r, v) in x.iter().zip(&y) {
        writeln!(out, "{} {}", num(r.ln()), num(v.ln()))?;
    }
    Ok(())
}

/// Two columns `t fidelity`.
pub fn write_curve<W: Write>(mut out: W, name: &str, times: &[f64], values: &[f64], config_hash: &str) -> Result<()> {
    writeln!(out, "# config_hash={config_hash}")?;
    writeln!(out, "# t {name}")?;
    for (t, v) in times.iter().zip(values) {
        writeln!(out, "{} {}", num(*t), num(*v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Scratch(PathBuf);

    impl std::ops::Deref for Scratch {
        type Target = Path;
        fn deref(&self) -> &Path {
            &self.0
        }
    }

    impl Drop for Scratch {
        fn drop(&mut self) {
            let _ = fs::remove_dir_all(&self.0);
        }
    }

    fn scratch(name: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("magdirac-io-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn toy_mode() -> EigenMode2D {
        let grid = GridSpec2D::small(3.0, 6).unwrap();
        let v: Components =
            std::array::from_fn(|c| (0..36).map(|k| Complex64::new(c as f64 + 0.1 * k as f64, -(k as f64))).collect());
        EigenMode2D {
            grid,
            lambda: 1.25,
            lp_norms: LP_EXPONENTS.map(|p| lp_norm(grid, &v, p)),
            v,
            residual: 3.1e-12,
            decay_rate: 0.49,
            decay_r2: 0.9999,
        }
    }

    #[test]
    fn mode_round_trip_and_layout() {
        let dir = scratch("mode");
        let m = toy_mode();
        let path = mode_path(&dir, m.grid, 0);
        let sum = write_mode(&path, &m, Some("abc")).unwrap();
        let bytes = fs::read(&path).unwrap();
        let nl = bytes.iter().position(|b| *b == b'\n').unwrap();
        let header = std::str::from_utf8(&bytes[..nl]).unwrap();
        assert!(header.starts_with("MAGDIRAC-MODE 1 L=3.0 N=6 lambda=1.25 "), "{header}");
        assert_eq!(bytes.len() - nl - 1, 4 * 36 * 16);
        // Component 1, node 2: re = 1.2, im = −2.
        let off = nl + 1 + (36 + 2) * 16;
        assert_eq!(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()), 1.2);
        assert_eq!(f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap()), -2.0);
        let (back, sum2) = read_mode(&path).unwrap();
        assert_eq!(sum, sum2);
        assert_eq!(back, m);
        assert!(load_modes(&dir, m.grid, 2).unwrap().is_none());
        assert_eq!(load_modes(&dir, m.grid, 1).unwrap().unwrap()[0].0, m);
    }

    #[test]
    fn corruption_is_detected() {
        let dir = scratch("corrupt");
        let m = toy_mode();
        let path = dir.join("m.bin");
        write_mode(&path, &m, None).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_mode(&path), Err(LabError::Format(_))));
        fs::write(&path, b"MAGDIRAC-FIELD 1 sha256=00\n").unwrap();
        assert!(matches!(read_mode(&path), Err(LabError::Format(_))));
    }

    #[test]
    fn field_round_trip() {
        let dir = scratch("field");
        let grid = Grid3::cell_centred([-1.0, -2.0, 0.5], [1.0, 2.0, 3.5], [4, 6, 2]).unwrap();
        let f = SpinorField3D::sample(grid, 0.25, |x| {
            [
                Complex64::new(x[0], x[1]),
                Complex64::new(x[2], 0.0),
                Complex64::new(0.0, -x[0]),
                Complex64::new(1.0, 1.0),
            ]
        });
        let path = dir.join("f.bin");
        write_field(&path, &f, Some("h")).unwrap();
        assert_eq!(read_field(&path).unwrap(), f);
    }
}
