//! Checkpoint container: a text header (format version, owner config JSON,
//! ordered parameter names with shapes and byte offsets) followed by raw
//! little-endian f64 blobs.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{NumericsError, ParamSet, Tensor};

const MAGIC: &str = "sentipipe-checkpoint v1";
const END_HEADER: &str = "end-header";

/// Writes `params` in order after a single-line config payload owned by the
/// caller (the model serializes its own config there).
pub fn save_checkpoint(
    path: impl AsRef<Path>,
    config_json: &str,
    params: &ParamSet,
) -> Result<(), NumericsError> {
    assert!(
        !config_json.contains('\n'),
        "config payload must be a single line"
    );
    let file = std::fs::File::create(path.as_ref()).map_err(|e| {
        NumericsError::Checkpoint(format!("create {}: {e}", path.as_ref().display()))
    })?;
    let mut w = BufWriter::new(file);
    let write_err =
        |e: std::io::Error| NumericsError::Checkpoint(format!("write checkpoint: {e}"));

    writeln!(w, "{MAGIC}").map_err(write_err)?;
    writeln!(w, "config: {config_json}").map_err(write_err)?;
    writeln!(w, "params: {}", params.len()).map_err(write_err)?;
    let mut offset = 0usize;
    for p in params.iter() {
        let byte_len = p.value.len() * 8;
        let dims = p
            .value
            .shape()
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            w,
            "param {} {} {} {} {}",
            p.name,
            p.value.rank(),
            dims,
            offset,
            byte_len
        )
        .map_err(write_err)?;
        offset += byte_len;
    }
    writeln!(w, "{END_HEADER}").map_err(write_err)?;
    for p in params.iter() {
        for v in p.value.data() {
            w.write_all(&v.to_le_bytes()).map_err(write_err)?;
        }
    }
    w.flush().map_err(write_err)?;
    Ok(())
}

/// Reads a checkpoint, validating each header shape against its blob
/// length. Returns the owner config payload and the parameters.
pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(String, ParamSet), NumericsError> {
    let bytes = std::fs::read(path.as_ref()).map_err(|e| {
        NumericsError::Checkpoint(format!("read {}: {e}", path.as_ref().display()))
    })?;
    let header_end = find_header_end(&bytes)?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| NumericsError::Checkpoint("header is not UTF-8".to_string()))?;
    let blob = &bytes[header_end..];

    let mut lines = header.lines();
    let magic = lines.next().unwrap_or_default();
    if magic != MAGIC {
        return Err(NumericsError::Checkpoint(format!(
            "bad magic line: {magic:?}"
        )));
    }
    let config_line = lines
        .next()
        .ok_or_else(|| NumericsError::Checkpoint("missing config line".to_string()))?;
    let config_json = config_line
        .strip_prefix("config: ")
        .ok_or_else(|| NumericsError::Checkpoint("malformed config line".to_string()))?
        .to_string();
    let count_line = lines
        .next()
        .ok_or_else(|| NumericsError::Checkpoint("missing params line".to_string()))?;
    let count: usize = count_line
        .strip_prefix("params: ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| NumericsError::Checkpoint("malformed params line".to_string()))?;

    let mut params = ParamSet::new();
    for _ in 0..count {
        let line = lines
            .next()
            .ok_or_else(|| NumericsError::Checkpoint("truncated header".to_string()))?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some("param") {
            return Err(NumericsError::Checkpoint(format!(
                "expected param line, got {line:?}"
            )));
        }
        let name = fields
            .next()
            .ok_or_else(|| NumericsError::Checkpoint("param line missing name".to_string()))?;
        let rank: usize = parse_field(fields.next(), "rank")?;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(parse_field(fields.next(), "dim")?);
        }
        let offset: usize = parse_field(fields.next(), "offset")?;
        let byte_len: usize = parse_field(fields.next(), "byte length")?;
        let expected: usize = shape.iter().product::<usize>() * 8;
        if expected != byte_len {
            return Err(NumericsError::Checkpoint(format!(
                "shape {shape:?} of `{name}` wants {expected} bytes, header says {byte_len}"
            )));
        }
        if offset + byte_len > blob.len() {
            return Err(NumericsError::Checkpoint(format!(
                "blob truncated for `{name}`"
            )));
        }
        let data: Vec<f64> = blob[offset..offset + byte_len]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let tensor = Tensor::new(shape, data)
            .map_err(|e| NumericsError::Checkpoint(format!("`{name}`: {e}")))?;
        params.add(name, tensor);
    }
    Ok((config_json, params))
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    what: &str,
) -> Result<T, NumericsError> {
    field
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| NumericsError::Checkpoint(format!("param line missing {what}")))
}

fn find_header_end(bytes: &[u8]) -> Result<usize, NumericsError> {
    let marker = format!("\n{END_HEADER}\n");
    let marker = marker.as_bytes();
    bytes
        .windows(marker.len())
        .position(|w| w == marker)
        .map(|p| p + marker.len())
        .ok_or_else(|| NumericsError::Checkpoint("missing end-header marker".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn round_trip_preserves_bits_and_order() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut params = ParamSet::new();
        params.add("embed", Tensor::uniform(&[4, 3], 0.5, &mut rng));
        params.add("head.w", Tensor::uniform(&[3, 2], 0.5, &mut rng));
        params.add("head.b", Tensor::uniform(&[2], 0.5, &mut rng));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&path, "{\"kind\":\"test\"}", &params).unwrap();
        let (config, loaded) = load_checkpoint(&path).unwrap();
        assert_eq!(config, "{\"kind\":\"test\"}");
        assert_eq!(loaded.len(), 3);
        for (a, b) in params.iter().zip(loaded.iter()) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.value.shape(), b.value.shape());
            let bits_match = a
                .value
                .data()
                .iter()
                .zip(b.value.data())
                .all(|(x, y)| x.to_bits() == y.to_bits());
            assert!(bits_match);
        }
    }

    #[test]
    fn shape_blob_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        let mut params = ParamSet::new();
        params.add("w", Tensor::scalar(1.0));
        save_checkpoint(&path, "{}", &params).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let text = String::from_utf8_lossy(&bytes).to_string();
        let patched = text.replace("param w 1 1 0 8", "param w 1 2 0 8");
        bytes = patched.into_bytes();
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(NumericsError::Checkpoint(_))
        ));
    }

    #[test]
    fn missing_file_is_a_checkpoint_error() {
        assert!(matches!(
            load_checkpoint("/nonexistent/x.ckpt"),
            Err(NumericsError::Checkpoint(_))
        ));
    }
}
