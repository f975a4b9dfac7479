//! LZ7F: `"LZ7F" | u8 version | u64 n | u64 f | f x (u64 p, u64 l)`, little-endian.

use std::io::{Read, Write};

use super::{Factorization, Phrase};
use crate::error::{FormatError, Result};

pub const LZ7F_MAGIC: &[u8; 4] = b"LZ7F";
pub const LZ7F_VERSION: u8 = 1;

pub fn write_lz7f<W: Write>(fact: &Factorization, mut out: W) -> Result<()> {
    out.write_all(LZ7F_MAGIC)?;
    out.write_all(&[LZ7F_VERSION])?;
    out.write_all(&fact.n().to_le_bytes())?;
    out.write_all(&(fact.f() as u64).to_le_bytes())?;
    for phrase in fact.phrases() {
        let (p, l) = phrase.as_pair();
        out.write_all(&p.to_le_bytes())?;
        out.write_all(&l.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => FormatError::UnexpectedEnd.into(),
        _ => e.into(),
    })
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(input, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Reads an LZ7F stream. The declared `n` is kept as is; run
/// [`validate`](super::validate) to check it against the phrases.
pub fn read_lz7f<R: Read>(mut input: R) -> Result<Factorization> {
    let mut magic = [0u8; 4];
    read_exact(&mut input, &mut magic)?;
    if &magic != LZ7F_MAGIC {
        return Err(FormatError::BadMagic { expected: "LZ7F" }.into());
    }
    let mut version = [0u8; 1];
    read_exact(&mut input, &mut version)?;
    if version[0] != LZ7F_VERSION {
        return Err(FormatError::UnsupportedVersion(version[0]).into());
    }
    let n = read_u64(&mut input)?;
    let f = read_u64(&mut input)?;
    let mut phrases = Vec::with_capacity(f.min(1 << 24) as usize);
    for record in 0..f {
        let p = read_u64(&mut input)?;
        let l = read_u64(&mut input)?;
        phrases.push(if l == 0 {
            let c = u8::try_from(p).map_err(|_| FormatError::BadLiteral { record, code: p })?;
            Phrase::Literal(c)
        } else {
            Phrase::Copy { src: p, len: l }
        });
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(FormatError::TrailingBytes.into());
    }
    Ok(Factorization::with_declared_len(phrases, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lz::lz77_parse;

    #[test]
    fn layout_and_round_trip() {
        let fact = lz77_parse(b"aaaa").unwrap();
        let mut buf = Vec::new();
        write_lz7f(&fact, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 1 + 8 + 8 + 2 * 16);
        assert_eq!(&buf[..5], b"LZ7F\x01");
        assert_eq!(u64::from_le_bytes(buf[5..13].try_into().unwrap()), 4);
        assert_eq!(u64::from_le_bytes(buf[21..29].try_into().unwrap()), b'a' as u64);
        assert_eq!(read_lz7f(&buf[..]).unwrap(), fact);
    }

    #[test]
    fn rejects_garbage() {
        let fact = lz77_parse(b"abab").unwrap();
        let mut buf = Vec::new();
        write_lz7f(&fact, &mut buf).unwrap();

        let err = read_lz7f(&buf[..buf.len() - 3]).unwrap_err();
        assert!(matches!(err, Error::Format(FormatError::UnexpectedEnd)));

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_lz7f(&bad[..]), Err(Error::Format(FormatError::BadMagic { .. }))));

        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(matches!(
            read_lz7f(&bad[..]),
            Err(Error::Format(FormatError::UnsupportedVersion(9)))
        ));

        let mut bad = buf.clone();
        bad.push(0);
        assert!(matches!(read_lz7f(&bad[..]), Err(Error::Format(FormatError::TrailingBytes))));

        let mut bad = buf;
        bad[21..29].copy_from_slice(&300u64.to_le_bytes());
        assert!(matches!(
            read_lz7f(&bad[..]),
            Err(Error::Format(FormatError::BadLiteral { record: 0, code: 300 }))
        ));
    }
}
