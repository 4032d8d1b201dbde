use std::io::Read;

use flate2::read::ZlibDecoder;

use super::object::{Object, Stream};
use crate::doc::DocError;

/// Inflated streams larger than this are treated as corrupt.
pub const MAX_DECODED_LEN: u64 = 256 << 20;

/// Applies the stream's filter chain. Only `/FlateDecode` without a
/// predictor is in the supported subset.
pub fn decode_stream(stream: &Stream) -> Result<Vec<u8>, DocError> {
    let filters: Vec<&str> = match stream.dict.get("Filter") {
        None | Some(Object::Null) => Vec::new(),
        Some(Object::Name(n)) => vec![n.as_str()],
        Some(Object::Array(a)) => a
            .iter()
            .map(|f| f.as_name().ok_or_else(|| DocError::UnsupportedFilter(format!("{f:?}"))))
            .collect::<Result<_, _>>()?,
        Some(other) => return Err(DocError::UnsupportedFilter(format!("{other:?}"))),
    };
    if filters.is_empty() {
        return Ok(stream.data.clone());
    }
    if let Some(parms) = stream.dict.get("DecodeParms") {
        let predicted = |p: &Object| p.as_dict().and_then(|d| d.get("Predictor")).and_then(Object::as_int).is_some_and(|p| p > 1);
        let any = match parms {
            Object::Array(a) => a.iter().any(predicted),
            p => predicted(p),
        };
        if any {
            return Err(DocError::UnsupportedFilter("FlateDecode with predictor".into()));
        }
    }
    let mut data = stream.data.clone();
    for f in filters {
        data = match f {
            "FlateDecode" | "Fl" => inflate(&data)?,
            other => return Err(DocError::UnsupportedFilter(other.to_string())),
        };
    }
    Ok(data)
}

fn inflate(data: &[u8]) -> Result<Vec<u8>, DocError> {
    let mut out = Vec::new();
    ZlibDecoder::new(data)
        .take(MAX_DECODED_LEN + 1)
        .read_to_end(&mut out)
        .map_err(|e| DocError::CorruptStream(e.to_string()))?;
    if out.len() as u64 > MAX_DECODED_LEN {
        return Err(DocError::CorruptStream("inflated size exceeds limit".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::pdf::object::Dict;
    use flate2::write::ZlibEncoder;
    use flate2::Compression;
    use std::io::Write;

    fn stream(filter: Option<Object>, data: &[u8]) -> Stream {
        let mut dict = Dict::new();
        if let Some(f) = filter {
            dict.insert("Filter".into(), f);
        }
        Stream { dict, data: data.to_vec() }
    }

    #[test]
    fn unfiltered_is_identity() {
        let s = stream(None, b"0123456789");
        assert_eq!(decode_stream(&s).unwrap(), b"0123456789");
    }

    #[test]
    fn flate_roundtrip() {
        let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
        enc.write_all(b"Hello").unwrap();
        let s = stream(Some(Object::Name("FlateDecode".into())), &enc.finish().unwrap());
        assert_eq!(decode_stream(&s).unwrap(), b"Hello");
    }

    #[test]
    fn other_filters_are_rejected() {
        let s = stream(Some(Object::Name("DCTDecode".into())), b"x");
        assert!(matches!(decode_stream(&s), Err(DocError::UnsupportedFilter(f)) if f == "DCTDecode"));
    }

    #[test]
    fn garbage_flate_is_corrupt() {
        let s = stream(Some(Object::Name("FlateDecode".into())), b"not zlib");
        assert!(matches!(decode_stream(&s), Err(DocError::CorruptStream(_))));
    }
}
