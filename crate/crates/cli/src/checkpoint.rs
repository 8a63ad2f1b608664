//! Binary model checkpoints.
//!
//! ```text
//! magic    8 bytes  "DDSAM2CK"
//! version  u32 LE
//! config   encoder + adapter fields, u32 LE each, rates prefixed by
//!          their count
//! count    u32 LE   number of parameter records
//! records  name length u32, name bytes, rank u32, dims u32 x rank,
//!          values f64 LE
//! ```
//!
//! Records are written in sorted name order, so identical states give
//! identical bytes. Loading restores names, dims, and value bits
//! exactly; trainable flags are reapplied by policy afterwards.

use std::fs;
use std::path::Path;

use ddsam2_core::adapter::{AdapterVariant, DDAdapterConfig};
use ddsam2_core::model::{set_trainable, EncoderConfig, FreezePolicy, ModelState};
use ddsam2_core::Tensor;

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 8] = b"DDSAM2CK";
pub const VERSION: u32 = 1;

fn variant_code(v: AdapterVariant) -> u32 {
    match v {
        AdapterVariant::None => 0,
        AdapterVariant::Dd => 1,
        AdapterVariant::StandardMlp => 2,
    }
}

fn variant_from(code: u32, path: &Path) -> Result<AdapterVariant> {
    match code {
        0 => Ok(AdapterVariant::None),
        1 => Ok(AdapterVariant::Dd),
        2 => Ok(AdapterVariant::StandardMlp),
        other => Err(CliError::Input(format!(
            "{}: unknown adapter variant code {other}",
            path.display()
        ))),
    }
}

struct Writer {
    bytes: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        self.bytes.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.bytes.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn save_checkpoint(path: &Path, cfg: &EncoderConfig, state: &ModelState) -> Result<()> {
    let mut w = Writer {
        bytes: Vec::with_capacity(64 + state.total_elements() * 8),
    };
    w.bytes.extend_from_slice(MAGIC);
    w.u32(VERSION);
    for v in [
        cfg.image_size,
        cfg.patch_size,
        cfg.embed_dim,
        cfg.heads,
        cfg.blocks,
        cfg.mlp_ratio,
        cfg.adapter_count,
    ] {
        w.u32(v as u32);
    }
    w.u32(variant_code(cfg.adapter_variant));
    for v in [cfg.adapter.channels, cfg.adapter.reduction, cfg.adapter.kernel] {
        w.u32(v as u32);
    }
    w.u32(cfg.adapter.rates.len() as u32);
    for &r in &cfg.adapter.rates {
        w.u32(r as u32);
    }
    w.u32(state.len() as u32);
    for (name, tensor) in state.iter() {
        w.u32(name.len() as u32);
        w.bytes.extend_from_slice(name.as_bytes());
        w.u32(4);
        for d in tensor.dims() {
            w.u32(d as u32);
        }
        for &v in tensor.data() {
            w.f64(v);
        }
    }
    fs::write(path, &w.bytes)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn fail(&self, what: &str) -> CliError {
        CliError::Input(format!(
            "{}: {what} at byte {}",
            self.path.display(),
            self.pos
        ))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(self.fail("truncated checkpoint"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn load_checkpoint(path: &Path) -> Result<(EncoderConfig, ModelState)> {
    let bytes =
        fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
        path,
    };
    if r.take(8)? != MAGIC {
        return Err(CliError::Input(format!(
            "{}: not a checkpoint file (bad magic)",
            path.display()
        )));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CliError::Input(format!(
            "{}: unsupported checkpoint version {version} (expected {VERSION})",
            path.display()
        )));
    }
    let image_size = r.u32()? as usize;
    let patch_size = r.u32()? as usize;
    let embed_dim = r.u32()? as usize;
    let heads = r.u32()? as usize;
    let blocks = r.u32()? as usize;
    let mlp_ratio = r.u32()? as usize;
    let adapter_count = r.u32()? as usize;
    let adapter_variant = variant_from(r.u32()?, path)?;
    let channels = r.u32()? as usize;
    let reduction = r.u32()? as usize;
    let kernel = r.u32()? as usize;
    let n_rates = r.u32()? as usize;
    let mut rates = Vec::with_capacity(n_rates);
    for _ in 0..n_rates {
        rates.push(r.u32()? as usize);
    }
    let cfg = EncoderConfig {
        image_size,
        patch_size,
        embed_dim,
        heads,
        blocks,
        mlp_ratio,
        adapter_count,
        adapter_variant,
        adapter: DDAdapterConfig {
            channels,
            reduction,
            kernel,
            rates,
        },
    };

    let count = r.u32()? as usize;
    let mut state = ModelState::blank();
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| r.fail("parameter name is not utf-8"))?
            .to_string();
        let rank = r.u32()? as usize;
        if rank != 4 {
            return Err(r.fail("unsupported tensor rank"));
        }
        let mut dims = [0usize; 4];
        for d in dims.iter_mut() {
            *d = r.u32()? as usize;
        }
        let n: usize = dims.iter().product();
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(r.f64()?);
        }
        let tensor = Tensor::new(dims, data).map_err(|e| CliError::Input(e.to_string()))?;
        state.insert_raw(name, tensor);
    }
    if r.pos != bytes.len() {
        return Err(r.fail("trailing bytes after last record"));
    }
    set_trainable(&mut state, FreezePolicy::Paper);
    Ok((cfg, state))
}
