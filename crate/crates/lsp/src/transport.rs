//! `Content-Length` framing for JSON-RPC over byte streams.

use std::fmt;
use std::io::{self, BufRead, Write};

#[derive(Debug)]
pub enum FrameError {
    Io(io::Error),
    /// A header block without a usable `Content-Length`.
    BadHeader(String),
    /// The stream ended inside a frame.
    Truncated,
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::Io(e) => write!(f, "i/o error: {e}"),
            FrameError::BadHeader(h) => write!(f, "bad frame header: {h}"),
            FrameError::Truncated => f.write_str("stream ended inside a frame"),
        }
    }
}

impl std::error::Error for FrameError {}

impl From<io::Error> for FrameError {
    fn from(e: io::Error) -> Self {
        FrameError::Io(e)
    }
}

/// Reads one frame body. `Ok(None)` means a clean end of stream.
pub fn read_frame<R: BufRead>(reader: &mut R) -> Result<Option<Vec<u8>>, FrameError> {
    let mut length: Option<usize> = None;
    let mut saw_header = false;
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return if saw_header {
                Err(FrameError::Truncated)
            } else {
                Ok(None)
            };
        }
        let header = line.trim_end_matches(['\r', '\n']);
        if header.is_empty() {
            if !saw_header {
                continue;
            }
            break;
        }
        saw_header = true;
        let Some((name, value)) = header.split_once(':') else {
            return Err(FrameError::BadHeader(header.to_string()));
        };
        if name.trim().eq_ignore_ascii_case("content-length") {
            length = Some(
                value
                    .trim()
                    .parse()
                    .map_err(|_| FrameError::BadHeader(header.to_string()))?,
            );
        }
    }
    let length = length.ok_or_else(|| FrameError::BadHeader("missing Content-Length".into()))?;
    let mut body = vec![0; length];
    reader.read_exact(&mut body).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FrameError::Truncated,
        _ => FrameError::Io(e),
    })?;
    Ok(Some(body))
}

pub fn write_frame<W: Write>(writer: &mut W, body: &[u8]) -> io::Result<()> {
    write!(writer, "Content-Length: {}\r\n\r\n", body.len())?;
    writer.write_all(body)?;
    writer.flush()
}

pub fn write_message<W: Write>(writer: &mut W, message: &serde_json::Value) -> io::Result<()> {
    write_frame(writer, message.to_string().as_bytes())
}

/// Splits a byte stream into frame bodies, failing on anything that is not
/// a well-formed frame.
pub fn split_frames(mut bytes: &[u8]) -> Result<Vec<Vec<u8>>, FrameError> {
    let mut frames = Vec::new();
    while let Some(body) = read_frame(&mut bytes)? {
        frames.push(body);
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut out = Vec::new();
        write_frame(&mut out, b"{\"a\":1}").unwrap();
        write_frame(&mut out, "{\"é\":2}".as_bytes()).unwrap();
        assert!(out.starts_with(b"Content-Length: 7\r\n\r\n{\"a\":1}"));
        let frames = split_frames(&out).unwrap();
        assert_eq!(frames, vec![b"{\"a\":1}".to_vec(), "{\"é\":2}".as_bytes().to_vec()]);
    }

    #[test]
    fn extra_headers_are_ignored() {
        let input = b"Content-Type: application/vscode-jsonrpc; charset=utf-8\r\ncontent-length: 2\r\n\r\n{}";
        assert_eq!(split_frames(input).unwrap(), vec![b"{}".to_vec()]);
    }

    #[test]
    fn malformed_frames() {
        assert!(matches!(split_frames(b"Content-Length: 5\r\n\r\n{}"), Err(FrameError::Truncated)));
        assert!(matches!(split_frames(b"Content-Type: x\r\n\r\n{}"), Err(FrameError::BadHeader(_))));
        assert!(matches!(split_frames(b"garbage\r\n\r\n"), Err(FrameError::BadHeader(_))));
        assert!(matches!(split_frames(b"Content-Length: x\r\n\r\n"), Err(FrameError::BadHeader(_))));
        assert!(split_frames(b"").unwrap().is_empty());
    }
}
