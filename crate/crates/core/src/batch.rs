//! Sample batches and their on-disk formats.
//!
//! Binary: the 8-byte magic `STBLSMP1`, a little-endian u64 count, then that many
//! little-endian f64 values. CSV: a `value` header followed by one value per line.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"STBLSMP1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub generator: String,
}

impl SampleBatch {
    pub fn new(values: Vec<f64>, seed: u64, generator: impl Into<String>) -> Self {
        SampleBatch {
            values,
            seed,
            generator: generator.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(MAGIC)?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(r: R) -> Result<Vec<f64>> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic in sample file".into()));
        }
        let mut count = [0u8; 8];
        r.read_exact(&mut count)?;
        let n = u64::from_le_bytes(count) as usize;
        let mut values = Vec::with_capacity(n);
        let mut buf = [0u8; 8];
        for _ in 0..n {
            r.read_exact(&mut buf)
                .map_err(|_| Error::Format("sample file shorter than its count".into()))?;
            values.push(f64::from_le_bytes(buf));
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::Format("trailing bytes after samples".into()));
        }
        Ok(values)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Vec<f64>> {
        let mut lines = BufReader::new(r).lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "value" => {}
            _ => return Err(Error::Format("missing `value` header".into())),
        }
        let mut out = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            out.push(
                t.parse::<f64>()
                    .map_err(|_| Error::Format(format!("line {}: `{t}` is not a number", i + 2)))?,
            );
        }
        Ok(out)
    }
}
