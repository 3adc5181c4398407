//! Seeded shuffle with bounded memory, and round-robin sharding.
//!
//! An item's position is its `(hash(seed, example_id), line)` sort key, so
//! the permutation is a pure function of the seed and the item set. Items are
//! buffered up to a capacity, spilled as sorted runs to anonymous temp files,
//! and k-way merged at the end.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::hash::{domain, keyed_hash64};
use crate::io::{LineWriter, WrittenFile};

pub const DEFAULT_BUFFER: usize = 1 << 18;

pub struct ExternalShuffler {
    seed: u64,
    capacity: usize,
    buffer: Vec<(u64, String)>,
    runs: Vec<File>,
    len: u64,
}

impl ExternalShuffler {
    pub fn new(seed: u64, capacity: usize) -> Self {
        ExternalShuffler {
            seed,
            capacity: capacity.max(1),
            buffer: Vec::new(),
            runs: Vec::new(),
            len: 0,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    /// Queue `line` (one JSON object, no newline) under `example_id`.
    pub fn push(&mut self, example_id: &str, line: String) -> Result<()> {
        debug_assert!(!line.contains('\n'));
        let key = keyed_hash64(self.seed, domain::SHUFFLE, example_id);
        self.buffer.push((key, line));
        self.len += 1;
        if self.buffer.len() >= self.capacity {
            self.spill()?;
        }
        Ok(())
    }

    fn spill(&mut self) -> Result<()> {
        let tmp = std::env::temp_dir();
        let io_err = |e| Error::io(&tmp, e);
        self.buffer.sort_unstable();
        let mut file = tempfile::tempfile().map_err(io_err)?;
        {
            let mut w = BufWriter::new(&mut file);
            for (key, line) in self.buffer.drain(..) {
                writeln!(w, "{key:016x}\t{line}").map_err(io_err)?;
            }
            w.flush().map_err(io_err)?;
        }
        file.seek(SeekFrom::Start(0)).map_err(io_err)?;
        self.runs.push(file);
        Ok(())
    }

    /// All queued lines in shuffled order.
    pub fn finish(mut self) -> Result<Box<dyn Iterator<Item = Result<String>>>> {
        if self.runs.is_empty() {
            self.buffer.sort_unstable();
            return Ok(Box::new(self.buffer.into_iter().map(|(_, l)| Ok(l))));
        }
        if !self.buffer.is_empty() {
            self.spill()?;
        }
        let mut merge = RunMerge {
            readers: self.runs.into_iter().map(BufReader::new).collect(),
            heap: BinaryHeap::new(),
        };
        for i in 0..merge.readers.len() {
            merge.refill(i)?;
        }
        Ok(Box::new(merge))
    }
}

struct RunMerge {
    readers: Vec<BufReader<File>>,
    heap: BinaryHeap<Reverse<(u64, String, usize)>>,
}

impl RunMerge {
    fn refill(&mut self, run: usize) -> Result<()> {
        let tmp = std::env::temp_dir();
        let mut buf = String::new();
        let n = self.readers[run]
            .read_line(&mut buf)
            .map_err(|e| Error::io(&tmp, e))?;
        if n == 0 {
            return Ok(());
        }
        let entry = buf.trim_end_matches('\n');
        let (key, line) = entry
            .split_once('\t')
            .and_then(|(k, l)| Some((u64::from_str_radix(k, 16).ok()?, l)))
            .ok_or_else(|| Error::Contract("corrupt shuffle run".into()))?;
        self.heap.push(Reverse((key, line.to_string(), run)));
        Ok(())
    }
}

impl Iterator for RunMerge {
    type Item = Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        let Reverse((_, line, run)) = self.heap.pop()?;
        if let Err(e) = self.refill(run) {
            return Some(Err(e));
        }
        Some(Ok(line))
    }
}

pub fn shard_file_name(index: usize, count: usize, compress: bool) -> String {
    let ext = if compress { "jsonl.zst" } else { "jsonl" };
    format!("shard-{index:05}-of-{count:05}.{ext}")
}

/// Write the shuffled lines round-robin into `shard_count` files under `dir`.
pub fn write_shards(
    lines: impl Iterator<Item = Result<String>>,
    dir: &Path,
    shard_count: usize,
    compress: bool,
) -> Result<Vec<WrittenFile>> {
    if shard_count == 0 {
        return Err(Error::Config("shard count must be at least 1".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut writers = (0..shard_count)
        .map(|i| LineWriter::create(&dir.join(shard_file_name(i, shard_count, compress)), compress))
        .collect::<Result<Vec<_>>>()?;
    for (i, line) in lines.enumerate() {
        writers[i % shard_count].write_line(&line?)?;
    }
    writers.into_iter().map(LineWriter::finish).collect()
}

/// Shuffle `(example_id, line)` pairs under `seed` and shard them into `dir`.
pub fn shuffle_and_shard(
    items: impl IntoIterator<Item = (String, String)>,
    seed: u64,
    shard_count: usize,
    dir: &Path,
    compress: bool,
) -> Result<Vec<WrittenFile>> {
    let mut shuffler = ExternalShuffler::new(seed, DEFAULT_BUFFER);
    for (id, line) in items {
        shuffler.push(&id, line)?;
    }
    write_shards(shuffler.finish()?, dir, shard_count, compress)
}

/// Paths relative to `base`, for manifests that must not depend on the output location.
pub(crate) fn relative(path: &Path, base: &Path) -> PathBuf {
    path.strip_prefix(base).unwrap_or(path).to_path_buf()
}
