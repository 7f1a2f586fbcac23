//! Gmsh MSH 2.2 ASCII reader and writer.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mesh::{face_global, Mesh, Vec3};

const TYPE_LINE: u32 = 1;
const TYPE_TRIANGLE: u32 = 2;
const TYPE_TET: u32 = 4;
const TYPE_POINT: u32 = 15;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next()
            .ok_or_else(|| perr(self.last, format!("unexpected end of file, expected {what}")))
    }

    fn expect_end(&mut self, section: &str) -> Result<()> {
        let (n, l) = self.expect(&format!("$End{section}"))?;
        if l != format!("$End{section}") {
            return Err(perr(n, format!("expected $End{section}, found '{l}'")));
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("invalid {what}")))
}

/// Parse a Gmsh MSH 2.2 ASCII mesh.
///
/// Tets (type 4) form the volume mesh; triangles (type 2) carry boundary
/// tags from their first (physical) tag. Points and lines are skipped, any
/// other element type is rejected. Unreferenced vertices are dropped.
pub fn parse_gmsh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let mut names: HashMap<i64, String> = HashMap::new();
    let mut nodes: HashMap<i64, Vec3> = HashMap::new();
    let mut tets_raw: Vec<([i64; 4], usize)> = Vec::new();
    let mut tris_raw: Vec<([i64; 3], i64, usize)> = Vec::new();
    let mut seen_format = false;

    while let Some((n, header)) = lines.next() {
        match header {
            "$MeshFormat" => {
                let (ln, l) = lines.expect("format line")?;
                let mut it = l.split_whitespace();
                let version: String = parse_num(it.next(), ln, "version")?;
                let file_type: i32 = parse_num(it.next(), ln, "file type")?;
                if !version.starts_with("2.") {
                    return Err(perr(ln, format!("unsupported MSH version {version}")));
                }
                if file_type != 0 {
                    return Err(perr(ln, "binary MSH files are not supported"));
                }
                lines.expect_end("MeshFormat")?;
                seen_format = true;
            }
            "$PhysicalNames" => {
                let (ln, l) = lines.expect("name count")?;
                let count: usize = parse_num(Some(l), ln, "name count")?;
                for _ in 0..count {
                    let (ln, l) = lines.expect("physical name")?;
                    let mut it = l.splitn(3, char::is_whitespace);
                    let _dim: i32 = parse_num(it.next(), ln, "dimension")?;
                    let tag: i64 = parse_num(it.next(), ln, "physical tag")?;
                    let name = it
                        .next()
                        .ok_or_else(|| perr(ln, "missing physical name"))?
                        .trim()
                        .trim_matches('"')
                        .to_string();
                    names.insert(tag, name);
                }
                lines.expect_end("PhysicalNames")?;
            }
            "$Nodes" => {
                let (ln, l) = lines.expect("node count")?;
                let count: usize = parse_num(Some(l), ln, "node count")?;
                nodes.reserve(count);
                for _ in 0..count {
                    let (ln, l) = lines.expect("node")?;
                    let mut it = l.split_whitespace();
                    let id: i64 = parse_num(it.next(), ln, "node id")?;
                    let x: f64 = parse_num(it.next(), ln, "x")?;
                    let y: f64 = parse_num(it.next(), ln, "y")?;
                    let z: f64 = parse_num(it.next(), ln, "z")?;
                    nodes.insert(id, [x, y, z]);
                }
                lines.expect_end("Nodes")?;
            }
            "$Elements" => {
                let (ln, l) = lines.expect("element count")?;
                let count: usize = parse_num(Some(l), ln, "element count")?;
                for _ in 0..count {
                    let (ln, l) = lines.expect("element")?;
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    let mut it = toks.iter().copied();
                    let _id: i64 = parse_num(it.next(), ln, "element id")?;
                    let ty: u32 = parse_num(it.next(), ln, "element type")?;
                    let ntags: usize = parse_num(it.next(), ln, "tag count")?;
                    let mut tags = Vec::with_capacity(ntags);
                    for _ in 0..ntags {
                        tags.push(parse_num::<i64>(it.next(), ln, "tag")?);
                    }
                    let verts: Vec<i64> = it
                        .map(|t| t.parse().map_err(|_| perr(ln, "invalid vertex index")))
                        .collect::<Result<_>>()?;
                    match ty {
                        TYPE_TET => {
                            if verts.len() != 4 {
                                return Err(perr(ln, "tetrahedron needs 4 vertices"));
                            }
                            tets_raw.push(([verts[0], verts[1], verts[2], verts[3]], ln));
                        }
                        TYPE_TRIANGLE => {
                            if verts.len() != 3 {
                                return Err(perr(ln, "triangle needs 3 vertices"));
                            }
                            let phys = tags.first().copied().unwrap_or(0);
                            tris_raw.push(([verts[0], verts[1], verts[2]], phys, ln));
                        }
                        TYPE_POINT | TYPE_LINE => {}
                        other => {
                            return Err(perr(ln, format!("unsupported element type {other}")));
                        }
                    }
                }
                lines.expect_end("Elements")?;
            }
            other if other.starts_with("$End") => {
                return Err(perr(n, format!("unexpected '{other}'")));
            }
            other if other.starts_with('$') => {
                // Unknown section: skip to its end marker.
                let end = format!("$End{}", &other[1..]);
                loop {
                    let (_, l) = lines.expect(&end)?;
                    if l == end {
                        break;
                    }
                }
            }
            other => return Err(perr(n, format!("malformed section header '{other}'"))),
        }
    }
    if !seen_format {
        return Err(perr(1, "missing $MeshFormat section"));
    }
    if tets_raw.is_empty() {
        return Err(perr(lines.last, "no tetrahedral elements"));
    }

    let mut remap: BTreeMap<i64, usize> = BTreeMap::new();
    for (t, ln) in &tets_raw {
        for v in t {
            if !nodes.contains_key(v) {
                return Err(perr(*ln, format!("element references missing node {v}")));
            }
            remap.insert(*v, 0);
        }
    }
    let mut vertices = Vec::with_capacity(remap.len());
    for (k, (id, slot)) in remap.iter_mut().enumerate() {
        *slot = k;
        vertices.push(nodes[id]);
    }
    let tets: Vec<[usize; 4]> = tets_raw
        .iter()
        .map(|(t, _)| [remap[&t[0]], remap[&t[1]], remap[&t[2]], remap[&t[3]]])
        .collect();
    let mut tris = Vec::with_capacity(tris_raw.len());
    for (t, phys, ln) in &tris_raw {
        let mut local = [0; 3];
        for k in 0..3 {
            local[k] = *remap.get(&t[k]).ok_or_else(|| {
                perr(
                    *ln,
                    format!("triangle references node {} outside the volume mesh", t[k]),
                )
            })?;
        }
        let name = names.get(phys).cloned().unwrap_or_else(|| format!("tag{phys}"));
        tris.push((local, name));
    }
    Mesh::new(vertices, tets, &tris)
}

/// Write a mesh as MSH 2.2 ASCII. Boundary tags become named physical groups
/// numbered in sorted tag order.
pub fn write_gmsh(mesh: &Mesh) -> String {
    let tags = mesh.tags();
    let id_of: HashMap<&str, usize> = tags.iter().enumerate().map(|(i, t)| (t.as_str(), i + 1)).collect();
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(out, "$PhysicalNames\n{}", tags.len() + 1);
    for (i, t) in tags.iter().enumerate() {
        let _ = writeln!(out, "2 {} \"{}\"", i + 1, t);
    }
    let volume_tag = tags.len() + 1;
    let _ = writeln!(out, "3 {volume_tag} \"volume\"\n$EndPhysicalNames");
    let _ = writeln!(out, "$Nodes\n{}", mesh.vertices.len());
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(out, "{} {:?} {:?} {:?}", i + 1, v[0], v[1], v[2]);
    }
    out.push_str("$EndNodes\n");
    let n = mesh.boundary_faces.len() + mesh.tets.len();
    let _ = writeln!(out, "$Elements\n{n}");
    let mut id = 1;
    for b in &mesh.boundary_faces {
        let g = face_global(&mesh.tets[b.element], b.face);
        let tag = id_of[b.tag.as_str()];
        let _ = writeln!(out, "{id} 2 2 {tag} {tag} {} {} {}", g[0] + 1, g[1] + 1, g[2] + 1);
        id += 1;
    }
    for t in &mesh.tets {
        let _ = writeln!(
            out,
            "{id} 4 2 {volume_tag} 1 {} {} {} {}",
            t[0] + 1,
            t[1] + 1,
            t[2] + 1,
            t[3] + 1
        );
        id += 1;
    }
    out.push_str("$EndElements\n");
    out
}

pub fn read_gmsh_file(path: &std::path::Path) -> Result<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gmsh(&text)
}

pub fn write_gmsh_file(mesh: &Mesh, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, write_gmsh(mesh)).map_err(|e| Error::io(path, e))
}
