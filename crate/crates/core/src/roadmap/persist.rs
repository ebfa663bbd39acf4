//! Binary roadmap files.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic    8 bytes  "RGGROAD\0"
//! version  u32
//! length   u64      payload bytes
//! payload  node table, edge table, geometry blocks
//! crc32    u32      over everything before it
//! ```
//!
//! Files are written to a sibling temporary path and renamed into place.
//! Loading reads and verifies the whole file before building anything.

use super::graph::{Roadmap, RoadmapGeometry};
use crate::error::{Error, Result};
use crate::geometry::{Obb, Sphere, Vec3};
use crate::swept::{BodySpheres, Configuration, EdgeGeometry, Spline};
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"RGGROAD\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8;

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, v: usize) {
        self.u32(u32::try_from(v).expect("table too large for the file format"));
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn vec3(&mut self, v: Vec3) {
        self.f64(v.x);
        self.f64(v.y);
        self.f64(v.z);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Malformed(format!("table runs past the payload at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    /// A count, bounded by the bytes left so corrupt counts cannot trigger
    /// huge allocations.
    fn count(&mut self, min_item_bytes: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_item_bytes) > self.buf.len() - self.pos {
            return Err(Error::Malformed(format!("count {n} exceeds remaining payload")));
        }
        Ok(n)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn vec3(&mut self) -> Result<Vec3> {
        Ok(Vec3::new(self.f64()?, self.f64()?, self.f64()?))
    }
}

fn write_payload(w: &mut Writer, r: &Roadmap, g: &RoadmapGeometry) {
    let dofs = r.nodes().first().map_or(0, Configuration::len);
    w.len(dofs);
    w.len(r.node_count());
    for q in r.nodes() {
        q.0.iter().for_each(|v| w.f64(*v));
    }
    w.len(r.edge_count());
    for &(a, b) in r.edges() {
        w.u32(a);
        w.u32(b);
    }

    w.f64(g.eps);
    w.len(g.segment_cap);
    w.len(g.spheres.per_body.len());
    for body in &g.spheres.per_body {
        w.len(body.len());
        for s in body {
            w.vec3(s.center);
            w.f64(s.radius);
        }
    }
    w.len(g.components.len());
    for c in &g.components {
        w.len(c.over.len());
        for o in &c.over {
            w.vec3(o.center);
            o.axes.iter().for_each(|a| w.vec3(*a));
            w.vec3(o.half_extents);
        }
        w.len(c.under.len());
        for body in &c.under {
            w.len(body.len());
            for pieces in body {
                w.len(pieces.len());
                for s in pieces {
                    w.f64(s.radius);
                    w.len(s.points.len());
                    s.points.iter().for_each(|p| w.vec3(*p));
                }
            }
        }
    }
}

fn read_payload(rd: &mut Reader) -> Result<(Roadmap, RoadmapGeometry)> {
    let dofs = rd.u32()? as usize;
    let n_nodes = rd.count(8 * dofs)?;
    let nodes = (0..n_nodes)
        .map(|_| Ok(Configuration::new((0..dofs).map(|_| rd.f64()).collect::<Result<_>>()?)))
        .collect::<Result<Vec<_>>>()?;
    let n_edges = rd.count(8)?;
    let edges = (0..n_edges)
        .map(|_| Ok((rd.u32()?, rd.u32()?)))
        .collect::<Result<Vec<_>>>()?;
    let roadmap = Roadmap::new(nodes, edges).map_err(|e| Error::Malformed(e.to_string()))?;

    let eps = rd.f64()?;
    let segment_cap = rd.u32()? as usize;
    let n_bodies = rd.count(4)?;
    let per_body = (0..n_bodies)
        .map(|_| {
            let n = rd.count(32)?;
            (0..n)
                .map(|_| Ok(Sphere::new(rd.vec3()?, rd.f64()?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n_comp = rd.count(8)?;
    if n_comp != roadmap.component_count() {
        return Err(Error::Malformed(format!(
            "{n_comp} geometry blocks for {} components",
            roadmap.component_count()
        )));
    }
    let components = (0..n_comp)
        .map(|_| {
            let nb = rd.count(120)?;
            let over = (0..nb)
                .map(|_| {
                    let center = rd.vec3()?;
                    let axes = [rd.vec3()?, rd.vec3()?, rd.vec3()?];
                    Ok(Obb::new(center, axes, rd.vec3()?))
                })
                .collect::<Result<Vec<_>>>()?;
            let nu = rd.count(4)?;
            let under = (0..nu)
                .map(|_| {
                    let ns = rd.count(4)?;
                    (0..ns)
                        .map(|_| {
                            let np = rd.count(12)?;
                            (0..np)
                                .map(|_| {
                                    let radius = rd.f64()?;
                                    let n = rd.count(24)?;
                                    if n == 0 {
                                        return Err(Error::Malformed("empty spline".into()));
                                    }
                                    let points = (0..n).map(|_| rd.vec3()).collect::<Result<Vec<_>>>()?;
                                    Ok(Spline::new(points, radius))
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EdgeGeometry { over, under })
        })
        .collect::<Result<Vec<_>>>()?;
    if rd.pos != rd.buf.len() {
        return Err(Error::Malformed(format!("{} trailing payload bytes", rd.buf.len() - rd.pos)));
    }
    Ok((
        roadmap,
        RoadmapGeometry {
            eps,
            segment_cap,
            spheres: BodySpheres { per_body },
            components,
        },
    ))
}

/// Serializes a roadmap and its geometry to bytes.
pub fn encode_roadmap(r: &Roadmap, g: &RoadmapGeometry) -> Result<Vec<u8>> {
    if g.components.len() != r.component_count() {
        return Err(Error::InvalidParameter("geometry does not match the roadmap".into()));
    }
    let mut payload = Writer::default();
    write_payload(&mut payload, r, g);
    let mut out = Vec::with_capacity(HEADER_LEN + payload.0.len() + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.0.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload.0);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

/// Parses bytes produced by [`encode_roadmap`].
pub fn decode_roadmap(bytes: &[u8]) -> Result<(Roadmap, RoadmapGeometry)> {
    if bytes.len() < MAGIC.len() {
        return Err(Error::Truncated {
            expected: (HEADER_LEN + 4) as u64,
            found: bytes.len() as u64,
        });
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: (HEADER_LEN + 4) as u64,
            found: bytes.len() as u64,
        });
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION,
            found: version,
        });
    }
    let payload_len = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let expected = (HEADER_LEN as u64).saturating_add(payload_len).saturating_add(4);
    if (bytes.len() as u64) < expected {
        return Err(Error::Truncated {
            expected,
            found: bytes.len() as u64,
        });
    }
    if bytes.len() as u64 > expected {
        return Err(Error::Malformed(format!(
            "{} bytes after the checksum",
            bytes.len() as u64 - expected
        )));
    }
    let body_end = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    read_payload(&mut Reader {
        buf: &bytes[HEADER_LEN..body_end],
        pos: 0,
    })
}

pub fn save_roadmap(r: &Roadmap, g: &RoadmapGeometry, path: &Path) -> Result<()> {
    let bytes = encode_roadmap(r, g)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, &bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_roadmap(path: &Path) -> Result<(Roadmap, RoadmapGeometry)> {
    decode_roadmap(&std::fs::read(path)?)
}
