//! JSONL reading and hashed shard writing.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

fn is_zstd(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "zst")
}

/// Open a possibly zstd-compressed text file for buffered line reading.
pub fn open_lines(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if is_zstd(path) {
        let dec = zstd::Decoder::new(file).map_err(|e| Error::io(path, e))?;
        Ok(Box::new(BufReader::new(dec)))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Line reader that also fingerprints everything it reads.
pub struct HashedLines {
    path: PathBuf,
    reader: Box<dyn BufRead + Send>,
    hasher: Sha256,
    line_no: usize,
}

impl HashedLines {
    pub fn open(path: &Path) -> Result<Self> {
        Ok(HashedLines {
            path: path.to_path_buf(),
            reader: open_lines(path)?,
            hasher: Sha256::new(),
            line_no: 0,
        })
    }

    /// Next non-blank line with its 1-based line number, without the line terminator.
    pub fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        loop {
            let mut buf = String::new();
            let n = self
                .reader
                .read_line(&mut buf)
                .map_err(|e| Error::io(&self.path, e))?;
            if n == 0 {
                return Ok(None);
            }
            self.hasher.update(buf.as_bytes());
            self.line_no += 1;
            let trimmed = buf.trim_end_matches(['\n', '\r']);
            if trimmed.trim().is_empty() {
                continue;
            }
            let len = trimmed.len();
            buf.truncate(len);
            return Ok(Some((self.line_no, buf)));
        }
    }

    /// Up to `max` lines.
    pub fn next_batch(&mut self, max: usize) -> Result<Vec<(usize, String)>> {
        let mut out = Vec::with_capacity(max.min(4096));
        while out.len() < max {
            match self.next_line()? {
                Some(l) => out.push(l),
                None => break,
            }
        }
        Ok(out)
    }

    pub fn lines_read(&self) -> usize {
        self.line_no
    }

    /// Hex SHA-256 of the decoded content read so far.
    pub fn finish(self) -> String {
        hex(&self.hasher.finalize())
    }
}

/// Read a whole JSONL file into typed values; any bad line is an error.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut lines = HashedLines::open(path)?;
    let mut out = Vec::new();
    while let Some((no, line)) = lines.next_line()? {
        let v = serde_json::from_str(&line).map_err(|e| Error::Parse {
            offset: e.column().saturating_sub(1),
            message: format!("{}:{no}: {e}", path.display()),
        })?;
        out.push(v);
    }
    Ok(out)
}

pub fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write as _;
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex(&h.finalize()))
}

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
    bytes: u64,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

enum Sink {
    Plain(HashingWriter<BufWriter<File>>),
    Zstd(zstd::Encoder<'static, HashingWriter<BufWriter<File>>>),
}

/// JSONL output file whose on-disk bytes are hashed as they are written.
pub struct LineWriter {
    path: PathBuf,
    sink: Sink,
    lines: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenFile {
    pub path: PathBuf,
    pub lines: u64,
    pub bytes: u64,
    pub sha256: String,
}

impl LineWriter {
    pub fn create(path: &Path, compress: bool) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let hw = HashingWriter {
            inner: BufWriter::new(file),
            hasher: Sha256::new(),
            bytes: 0,
        };
        let sink = if compress {
            Sink::Zstd(zstd::Encoder::new(hw, 3).map_err(|e| Error::io(path, e))?)
        } else {
            Sink::Plain(hw)
        };
        Ok(LineWriter {
            path: path.to_path_buf(),
            sink,
            lines: 0,
        })
    }

    pub fn write_line(&mut self, line: &str) -> Result<()> {
        let w: &mut dyn Write = match &mut self.sink {
            Sink::Plain(w) => w,
            Sink::Zstd(w) => w,
        };
        w.write_all(line.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io(&self.path, e))?;
        self.lines += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<WrittenFile> {
        let path = self.path;
        let mut hw = match self.sink {
            Sink::Plain(w) => w,
            Sink::Zstd(enc) => enc.finish().map_err(|e| Error::io(&path, e))?,
        };
        hw.flush().map_err(|e| Error::io(&path, e))?;
        Ok(WrittenFile {
            sha256: hex(&hw.hasher.finalize()),
            bytes: hw.bytes,
            lines: self.lines,
            path,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writer_hash_matches_file_hash() {
        let dir = tempfile::tempdir().unwrap();
        for compress in [false, true] {
            let p = dir.path().join(if compress { "a.jsonl.zst" } else { "a.jsonl" });
            let mut w = LineWriter::create(&p, compress).unwrap();
            w.write_line("{\"a\":1}").unwrap();
            w.write_line("{\"a\":2}").unwrap();
            let info = w.finish().unwrap();
            assert_eq!(info.lines, 2);
            assert_eq!(info.sha256, sha256_file(&p).unwrap());
            assert_eq!(info.bytes, std::fs::metadata(&p).unwrap().len());

            let mut r = HashedLines::open(&p).unwrap();
            assert_eq!(r.next_line().unwrap().unwrap().1, "{\"a\":1}");
            assert_eq!(r.next_line().unwrap().unwrap(), (2, "{\"a\":2}".to_string()));
            assert!(r.next_line().unwrap().is_none());
        }
    }

    #[test]
    fn blank_lines_skipped_but_counted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.jsonl");
        std::fs::write(&p, "a\n\n  \r\nb\r\n").unwrap();
        let mut r = HashedLines::open(&p).unwrap();
        assert_eq!(r.next_batch(10).unwrap(), vec![(1, "a".into()), (4, "b".into())]);
        assert_eq!(r.finish(), sha256_file(&p).unwrap());
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(HashedLines::open(Path::new("/nonexistent/x.jsonl")), Err(Error::Io { .. })));
    }
}
