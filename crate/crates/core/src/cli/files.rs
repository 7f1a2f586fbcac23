//! Binary sidecar files: curved collocation coordinates and solver states.
//!
//! Both formats are little-endian. Layout of a curved-mesh file:
//!
//! ```text
//! offset  size          field
//! 0       4             magic "CDG1"
//! 4       4   u32       format version (1)
//! 8       4   u32       DG degree p
//! 12      4   u32       nodes per element N_p
//! 16      8   u64       element count
//! 24      8   u64       curved element count C
//! 32      4   u32       CRC-32 of the straight mesh (vertices and tets)
//! 36      C * (8 + 24 N_p)  per curved element: u64 index, N_p x (f64 x, y, z)
//! end-4   4   u32       CRC-32 of all preceding bytes
//! ```
//!
//! A state file has magic "CDGS", version, degree, N_p, element count,
//! field count (u32), mesh CRC, then `elements * fields * N_p` f64 values
//! (element-major, field-major, unpadded) and the trailing CRC.

use std::collections::BTreeMap;
use std::path::Path;

use crate::curving::CurvedMesh;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::refelem::n_basis;
use crate::solver::SolutionStore;

const CURVED_MAGIC: &[u8; 4] = b"CDG1";
const STATE_MAGIC: &[u8; 4] = b"CDGS";
const VERSION: u32 = 1;

/// CRC-32 of the mesh vertices and connectivity.
pub fn mesh_checksum(mesh: &Mesh) -> u32 {
    let mut h = crc32fast::Hasher::new();
    for v in &mesh.vertices {
        for c in v {
            h.update(&c.to_le_bytes());
        }
    }
    for t in &mesh.tets {
        for i in t {
            h.update(&(*i as u64).to_le_bytes());
        }
    }
    h.finalize()
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format("file is truncated".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Check magic and trailing checksum; returns the payload reader.
fn open<'a>(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Reader<'a>> {
    if bytes.len() < 8 || &bytes[..4] != magic {
        return Err(Error::Format(format!(
            "bad magic, expected {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    if crc32fast::hash(body) != stored {
        return Err(Error::Format("checksum mismatch".into()));
    }
    let mut r = Reader { buf: body, pos: 4 };
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    Ok(r)
}

fn finish(mut out: Vec<u8>) -> Vec<u8> {
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn encode_curved(curved: &CurvedMesh, mesh_crc: u32) -> Vec<u8> {
    let np = n_basis(curved.degree);
    let mut out = Vec::with_capacity(40 + curved.curved.len() * (8 + 24 * np));
    out.extend_from_slice(CURVED_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(curved.degree as u32).to_le_bytes());
    out.extend_from_slice(&(np as u32).to_le_bytes());
    out.extend_from_slice(&(curved.n_elements as u64).to_le_bytes());
    out.extend_from_slice(&(curved.curved.len() as u64).to_le_bytes());
    out.extend_from_slice(&mesh_crc.to_le_bytes());
    for (k, nodes) in &curved.curved {
        out.extend_from_slice(&(*k as u64).to_le_bytes());
        for x in nodes {
            for c in x {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    finish(out)
}

/// Decoded curved mesh and the mesh checksum it was written against.
pub fn decode_curved(bytes: &[u8]) -> Result<(CurvedMesh, u32)> {
    let mut r = open(bytes, CURVED_MAGIC)?;
    let degree = r.u32()? as usize;
    let np = r.u32()? as usize;
    if np != n_basis(degree) {
        return Err(Error::Format(format!("N_p = {np} does not match degree {degree}")));
    }
    let n_elements = r.u64()? as usize;
    let n_curved = r.u64()? as usize;
    let crc = r.u32()?;
    if n_curved > n_elements {
        return Err(Error::Format("more curved elements than elements".into()));
    }
    let mut curved = BTreeMap::new();
    let mut last: Option<usize> = None;
    for _ in 0..n_curved {
        let k = r.u64()? as usize;
        if k >= n_elements || last.is_some_and(|l| k <= l) {
            return Err(Error::Format(format!("element index {k} out of order or range")));
        }
        last = Some(k);
        let mut nodes = Vec::with_capacity(np);
        for _ in 0..np {
            nodes.push([r.f64()?, r.f64()?, r.f64()?]);
        }
        curved.insert(k, nodes);
    }
    if r.pos != r.buf.len() {
        return Err(Error::Format("trailing data after payload".into()));
    }
    Ok((
        CurvedMesh {
            degree,
            n_elements,
            curved,
        },
        crc,
    ))
}

pub fn encode_state(state: &SolutionStore, degree: usize, mesh_crc: u32) -> Vec<u8> {
    let dense = state.unpack();
    let mut out = Vec::with_capacity(40 + 8 * dense.len());
    out.extend_from_slice(STATE_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(degree as u32).to_le_bytes());
    out.extend_from_slice(&(state.len as u32).to_le_bytes());
    out.extend_from_slice(&(state.n_elements as u64).to_le_bytes());
    out.extend_from_slice(&(state.n_fields as u32).to_le_bytes());
    out.extend_from_slice(&mesh_crc.to_le_bytes());
    for v in dense {
        out.extend_from_slice(&v.to_le_bytes());
    }
    finish(out)
}

/// Decoded state (unpadded layout), its degree and mesh checksum.
pub fn decode_state(bytes: &[u8]) -> Result<(SolutionStore, usize, u32)> {
    let mut r = open(bytes, STATE_MAGIC)?;
    let degree = r.u32()? as usize;
    let np = r.u32()? as usize;
    if np != n_basis(degree) {
        return Err(Error::Format(format!("N_p = {np} does not match degree {degree}")));
    }
    let n_elements = r.u64()? as usize;
    let n_fields = r.u32()? as usize;
    let crc = r.u32()?;
    let count = n_elements * n_fields * np;
    if r.buf.len() - r.pos != 8 * count {
        return Err(Error::Format("state payload size mismatch".into()));
    }
    let mut dense = Vec::with_capacity(count);
    for _ in 0..count {
        dense.push(r.f64()?);
    }
    Ok((
        SolutionStore::pack(&dense, n_elements, n_fields, np, false),
        degree,
        crc,
    ))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}
