//! Reader and writer for the `.npy` array container.
//!
//! Layout: the magic string `\x93NUMPY`, one major and one minor version
//! byte, a little-endian header length (`u16` for version 1.x, `u32` for
//! 2.x), then an ASCII Python dict literal such as
//! `{'descr': '<f8', 'fortran_order': False, 'shape': (4, 3), }` padded with
//! spaces and a trailing newline so the payload starts on a 64-byte boundary.
//! The payload is the raw little-endian elements in C order.
//!
//! Files are always written as version 1.0.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::error::{Error, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;

/// Element types this crate reads and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    F32,
    F64,
    I32,
    I64,
}

impl DType {
    pub fn descr(self) -> &'static str {
        match self {
            DType::F32 => "<f4",
            DType::F64 => "<f8",
            DType::I32 => "<i4",
            DType::I64 => "<i8",
        }
    }

    pub fn size(self) -> usize {
        match self {
            DType::F32 | DType::I32 => 4,
            DType::F64 | DType::I64 => 8,
        }
    }

    fn from_descr(descr: &str) -> Option<Self> {
        // '=' and '|' mean native/not-applicable; only little-endian hosts
        // write them for these widths in practice.
        let norm = descr.replacen('=', "<", 1);
        match norm.as_str() {
            "<f4" => Some(DType::F32),
            "<f8" => Some(DType::F64),
            "<i4" => Some(DType::I32),
            "<i8" => Some(DType::I64),
            _ => None,
        }
    }

    pub fn is_float(self) -> bool {
        matches!(self, DType::F32 | DType::F64)
    }
}

/// Parsed `.npy` header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayHeader {
    pub dtype: DType,
    pub shape: Vec<usize>,
    pub fortran_order: bool,
    pub version: (u8, u8),
    /// Byte offset of the first payload element.
    pub data_offset: u64,
}

impl ArrayHeader {
    pub fn n_elements(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn payload_bytes(&self) -> u64 {
        (self.n_elements() * self.dtype.size()) as u64
    }
}

/// Reads and validates the header, leaving `reader` positioned at the payload.
pub fn read_header<R: Read>(reader: &mut R, path: &Path) -> Result<ArrayHeader> {
    let mut prefix = [0u8; 8];
    reader
        .read_exact(&mut prefix)
        .map_err(|_| Error::format(path, "file too short for an array header"))?;
    if &prefix[..6] != MAGIC {
        return Err(Error::format(path, "bad magic string, not an .npy file"));
    }
    let version = (prefix[6], prefix[7]);
    let header_len = match version.0 {
        1 => {
            let mut b = [0u8; 2];
            reader.read_exact(&mut b).map_err(|_| Error::format(path, "truncated header length"))?;
            u16::from_le_bytes(b) as usize
        }
        2 => {
            let mut b = [0u8; 4];
            reader.read_exact(&mut b).map_err(|_| Error::format(path, "truncated header length"))?;
            u32::from_le_bytes(b) as usize
        }
        _ => {
            return Err(Error::format(
                path,
                format!("unsupported format version {}.{}", version.0, version.1),
            ))
        }
    };
    let prelude = if version.0 == 1 { 10 } else { 12 };
    let mut text = vec![0u8; header_len];
    reader.read_exact(&mut text).map_err(|_| Error::format(path, "truncated header"))?;
    let text = std::str::from_utf8(&text).map_err(|_| Error::format(path, "header is not ASCII"))?;
    let dict = parse_header_dict(text).map_err(|m| Error::format(path, m))?;
    let dtype = DType::from_descr(&dict.descr)
        .ok_or_else(|| Error::format(path, format!("unsupported dtype '{}'", dict.descr)))?;
    if dict.fortran_order {
        return Err(Error::format(path, "Fortran-ordered arrays are not supported; expected C order"));
    }
    Ok(ArrayHeader {
        dtype,
        shape: dict.shape,
        fortran_order: dict.fortran_order,
        version,
        data_offset: (prelude + header_len) as u64,
    })
}

struct HeaderDict {
    descr: String,
    fortran_order: bool,
    shape: Vec<usize>,
}

/// Parses the restricted Python literal used by `.npy` headers.
fn parse_header_dict(text: &str) -> std::result::Result<HeaderDict, String> {
    let mut p = Lexer { s: text.trim_end().as_bytes(), i: 0 };
    p.expect(b'{')?;
    let (mut descr, mut fortran, mut shape) = (None, None, None);
    loop {
        p.skip_ws();
        if p.peek() == Some(b'}') {
            break;
        }
        let key = p.string()?;
        p.expect(b':')?;
        match key.as_str() {
            "descr" => descr = Some(p.string()?),
            "fortran_order" => fortran = Some(p.boolean()?),
            "shape" => shape = Some(p.tuple()?),
            other => return Err(format!("unexpected header key '{other}'")),
        }
        p.skip_ws();
        match p.peek() {
            Some(b',') => p.i += 1,
            Some(b'}') => {}
            _ => return Err("malformed header dict".into()),
        }
    }
    p.expect(b'}')?;
    p.skip_ws();
    if p.peek().is_some() {
        return Err("trailing characters after header dict".into());
    }
    Ok(HeaderDict {
        descr: descr.ok_or("header missing 'descr'")?,
        fortran_order: fortran.ok_or("header missing 'fortran_order'")?,
        shape: shape.ok_or("header missing 'shape'")?,
    })
}

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl Lexer<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn expect(&mut self, c: u8) -> std::result::Result<(), String> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(format!("malformed header: expected '{}'", c as char))
        }
    }

    fn string(&mut self) -> std::result::Result<String, String> {
        self.skip_ws();
        let q = self.peek().filter(|&c| c == b'\'' || c == b'"').ok_or("malformed header: expected string")?;
        self.i += 1;
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i] != q {
            self.i += 1;
        }
        if self.i == self.s.len() {
            return Err("malformed header: unterminated string".into());
        }
        let out = String::from_utf8_lossy(&self.s[start..self.i]).into_owned();
        self.i += 1;
        Ok(out)
    }

    fn boolean(&mut self) -> std::result::Result<bool, String> {
        self.skip_ws();
        let rest = &self.s[self.i..];
        if rest.starts_with(b"True") {
            self.i += 4;
            Ok(true)
        } else if rest.starts_with(b"False") {
            self.i += 5;
            Ok(false)
        } else {
            Err("malformed header: expected True or False".into())
        }
    }

    fn tuple(&mut self) -> std::result::Result<Vec<usize>, String> {
        self.expect(b'(')?;
        let mut dims = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.i += 1;
                    return Ok(dims);
                }
                Some(b',') if !dims.is_empty() => self.i += 1,
                Some(c) if c.is_ascii_digit() => {
                    let start = self.i;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.i += 1;
                    }
                    let txt = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                    // Python 2 writers append 'L' to long integers.
                    if self.peek() == Some(b'L') {
                        self.i += 1;
                    }
                    dims.push(txt.parse().map_err(|_| "malformed header: bad dimension")?);
                }
                _ => return Err("malformed header: bad shape tuple".into()),
            }
        }
    }
}

fn header_bytes(dtype: DType, shape: &[usize]) -> Vec<u8> {
    let shape_txt = match shape {
        [n] => format!("({n},)"),
        dims => format!("({})", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")),
    };
    let mut dict = format!("{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}", dtype.descr(), shape_txt);
    let unpadded = MAGIC.len() + 2 + 2 + dict.len() + 1;
    let pad = (ALIGN - unpadded % ALIGN) % ALIGN;
    dict.extend(std::iter::repeat_n(' ', pad));
    dict.push('\n');
    let mut out = Vec::with_capacity(10 + dict.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out
}

/// Element types with a little-endian `.npy` encoding.
pub trait Element: Copy {
    const DTYPE: DType;
    fn write_le(self, out: &mut Vec<u8>);
}

impl Element for f32 {
    const DTYPE: DType = DType::F32;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
}

impl Element for f64 {
    const DTYPE: DType = DType::F64;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
}

impl Element for i64 {
    const DTYPE: DType = DType::I64;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
}

/// Writes a C-ordered array of `shape` to `path`.
pub fn write_array<T: Element>(path: impl AsRef<Path>, shape: &[usize], data: &[T]) -> Result<()> {
    let path = path.as_ref();
    if shape.iter().product::<usize>() != data.len() {
        return Err(Error::input(format!(
            "shape {shape:?} does not match {} elements",
            data.len()
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&header_bytes(T::DTYPE, shape)).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::with_capacity(1 << 16);
    for block in data.chunks(8192) {
        buf.clear();
        block.iter().for_each(|v| v.write_le(&mut buf));
        w.write_all(&buf).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes a 2-D matrix.
pub fn write_matrix<T: Element>(path: impl AsRef<Path>, m: &Array2<T>) -> Result<()> {
    let data: Vec<T> = m.iter().copied().collect();
    write_array(path, &[m.nrows(), m.ncols()], &data)
}

/// A whole array decoded into memory.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrayData {
    F32(Vec<f32>),
    F64(Vec<f64>),
    I64(Vec<i64>),
}

/// Reads an entire array. Intended for labels and model tensors; feature
/// matrices go through [`NpyRowReader`].
pub fn read_array(path: impl AsRef<Path>) -> Result<(ArrayHeader, ArrayData)> {
    let mut reader = NpyRowReader::open_any(path.as_ref())?;
    let n = reader.header.n_elements();
    let bytes = reader.read_elements(n)?;
    let data = match reader.header.dtype {
        DType::F32 => ArrayData::F32(bytes.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect()),
        DType::F64 => ArrayData::F64(bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect()),
        DType::I32 => {
            ArrayData::I64(bytes.chunks_exact(4).map(|b| i32::from_le_bytes(b.try_into().unwrap()) as i64).collect())
        }
        DType::I64 => ArrayData::I64(bytes.chunks_exact(8).map(|b| i64::from_le_bytes(b.try_into().unwrap())).collect()),
    };
    Ok((reader.header, data))
}

/// Sequential reader over the rows of a 2-D floating-point array.
pub struct NpyRowReader {
    path: PathBuf,
    header: ArrayHeader,
    reader: BufReader<File>,
    rows_read: usize,
}

impl NpyRowReader {
    /// Opens a 2-D float array, validating that the payload length matches
    /// the header exactly.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let r = Self::open_any(path.as_ref())?;
        if r.header.shape.len() != 2 {
            return Err(Error::format(
                &r.path,
                format!("expected 2-D array, found shape {:?}", r.header.shape),
            ));
        }
        if !r.header.dtype.is_float() {
            return Err(Error::format(&r.path, format!("expected float32/float64 features, found '{}'", r.header.dtype.descr())));
        }
        Ok(r)
    }

    fn open_any(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
        let mut reader = BufReader::with_capacity(1 << 20, file);
        let header = read_header(&mut reader, path)?;
        let payload = file_len.saturating_sub(header.data_offset);
        let expected = header.payload_bytes();
        if payload < expected {
            return Err(Error::format(
                path,
                format!("truncated payload: expected {expected} bytes, found {payload}"),
            ));
        }
        if payload > expected {
            return Err(Error::format(
                path,
                format!("payload length {payload} exceeds the {expected} bytes implied by the header"),
            ));
        }
        Ok(Self { path: path.to_path_buf(), header, reader, rows_read: 0 })
    }

    pub fn header(&self) -> &ArrayHeader {
        &self.header
    }

    pub fn n_rows(&self) -> usize {
        self.header.shape[0]
    }

    pub fn n_cols(&self) -> usize {
        self.header.shape[1]
    }

    fn read_elements(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut bytes = vec![0u8; n * self.header.dtype.size()];
        self.reader.read_exact(&mut bytes).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::format(&self.path, "truncated payload")
            } else {
                Error::io(&self.path, e)
            }
        })?;
        Ok(bytes)
    }

    /// Reads up to `max_rows` rows promoted to `f64`; `None` at end of data.
    /// Non-finite values are rejected with their row index.
    pub fn next_rows(&mut self, max_rows: usize) -> Result<Option<Array2<f64>>> {
        let rows = max_rows.min(self.n_rows() - self.rows_read);
        if rows == 0 {
            return Ok(None);
        }
        let cols = self.n_cols();
        let bytes = self.read_elements(rows * cols)?;
        let values: Vec<f64> = match self.header.dtype {
            DType::F32 => bytes.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64).collect(),
            DType::F64 => bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect(),
            _ => unreachable!("open() only admits float arrays"),
        };
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let row = self.rows_read + pos / cols.max(1);
            return Err(Error::Numeric(format!(
                "non-finite value at row {row}, column {} of {}",
                pos % cols.max(1),
                self.path.display()
            )));
        }
        self.rows_read += rows;
        Ok(Some(Array2::from_shape_vec((rows, cols), values).expect("shape checked")))
    }

    /// Repositions at the first row.
    pub fn rewind(&mut self) -> Result<()> {
        self.reader
            .seek(SeekFrom::Start(self.header.data_offset))
            .map_err(|e| Error::io(&self.path, e))?;
        self.rows_read = 0;
        Ok(())
    }
}
