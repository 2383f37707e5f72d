//! Conforming simplicial triangulations of 2D polygonal domains.
//!
//! A [`Mesh`] stores vertices, counterclockwise triangles, and the derived
//! edge table with triangle adjacency. Boundary edges (exactly one adjacent
//! triangle) carry an outward unit normal. Meshes are immutable after
//! construction, so they can be shared freely between concurrent runs.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};
use std::path::Path;

/// An undirected mesh edge with its adjacent triangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Endpoint vertex indices, `v[0] < v[1]`.
    pub vertices: [usize; 2],
    /// Adjacent triangle indices; boundary edges have `tris[1] == None`.
    pub tris: [Option<usize>; 2],
    /// Outward unit normal for boundary edges, `None` for interior ones.
    pub normal: Option<[f64; 2]>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.tris[1].is_none()
    }
}

/// Affine map data from the reference triangle {(0,0),(1,0),(0,1)} to a
/// physical triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    /// Jacobian of the reference-to-physical map (columns are edge vectors).
    pub jacobian: [[f64; 2]; 2],
    /// det(jacobian) = 2 * area, positive for CCW triangles.
    pub det: f64,
    /// Inverse-transpose of the Jacobian, mapping reference gradients to
    /// physical gradients.
    pub inverse_transpose: [[f64; 2]; 2],
}

/// Immutable conforming triangulation.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    boundary_edges: Vec<usize>,
    /// Per-triangle local-edge -> global-edge map; local edge `e` joins
    /// local vertices `e` and `(e+1) % 3`.
    tri_edges: Vec<[usize; 3]>,
    h_max: f64,
}

impl Mesh {
    /// Builds a mesh from raw vertex and connectivity arrays, deriving the
    /// edge table and validating orientation and conformity.
    pub fn from_raw(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(Error::Mesh(format!(
                        "triangle {t} references vertex {v}, but only {} vertices exist",
                        vertices.len()
                    )));
                }
            }
            let area2 = signed_area2(&vertices, tri);
            if area2 <= 0.0 {
                return Err(Error::Mesh(format!(
                    "triangle {t} has non-positive signed area {:.3e}",
                    0.5 * area2
                )));
            }
        }

        // Edge table keyed by the sorted vertex pair.
        let mut edge_of: std::collections::HashMap<[usize; 2], usize> =
            std::collections::HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut tri_edges = vec![[usize::MAX; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for le in 0..3 {
                let a = tri[le];
                let b = tri[(le + 1) % 3];
                let key = if a < b { [a, b] } else { [b, a] };
                let e = *edge_of.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: key,
                        tris: [None, None],
                        normal: None,
                    });
                    edges.len() - 1
                });
                tri_edges[t][le] = e;
                let slot = &mut edges[e].tris;
                if slot[0].is_none() {
                    slot[0] = Some(t);
                } else if slot[1].is_none() {
                    slot[1] = Some(t);
                } else {
                    return Err(Error::Mesh(format!(
                        "edge ({},{}) is shared by more than two triangles",
                        key[0], key[1]
                    )));
                }
            }
        }

        // Boundary edges and their outward normals.
        let mut boundary_edges = Vec::new();
        for (e, edge) in edges.iter_mut().enumerate() {
            if edge.tris[1].is_none() {
                let t = edge.tris[0].expect("edge with no adjacent triangle");
                let opposite = triangles[t]
                    .iter()
                    .copied()
                    .find(|v| !edge.vertices.contains(v))
                    .expect("boundary edge with no opposite vertex");
                let [a, b] = edge.vertices;
                let d = [
                    vertices[b][0] - vertices[a][0],
                    vertices[b][1] - vertices[a][1],
                ];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                let mut n = [d[1] / len, -d[0] / len];
                let to_opp = [
                    vertices[opposite][0] - vertices[a][0],
                    vertices[opposite][1] - vertices[a][1],
                ];
                if n[0] * to_opp[0] + n[1] * to_opp[1] > 0.0 {
                    n = [-n[0], -n[1]];
                }
                edge.normal = Some(n);
                boundary_edges.push(e);
            }
        }

        let h_max = triangles
            .iter()
            .map(|tri| diameter(&vertices, tri))
            .fold(0.0, f64::max);

        Ok(Mesh {
            vertices,
            triangles,
            edges,
            boundary_edges,
            tri_edges,
            h_max,
        })
    }

    /// Uniform `m x m` criss-cross-free mesh of the unit square: every cell
    /// is split along its lower-left to upper-right diagonal.
    pub fn unit_square(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Mesh("unit_square requires m >= 1".into()));
        }
        let np = m + 1;
        let mut vertices = Vec::with_capacity(np * np);
        for j in 0..np {
            for i in 0..np {
                vertices.push([i as f64 / m as f64, j as f64 / m as f64]);
            }
        }
        let v = |i: usize, j: usize| j * np + i;
        let mut triangles = Vec::with_capacity(2 * m * m);
        for j in 0..m {
            for i in 0..m {
                let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        let mut mesh = Self::from_raw(vertices, triangles)?;
        // The analytic diameter; halving m doubles this exactly in binary
        // arithmetic, which the refinement invariant relies on.
        mesh.h_max = std::f64::consts::SQRT_2 / m as f64;
        Ok(mesh)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: usize) -> [f64; 2] {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Global edge indices of triangle `t`; local edge `e` joins local
    /// vertices `e` and `(e+1) % 3`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Sum of all triangle areas.
    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|tri| 0.5 * signed_area2(&self.vertices, tri))
            .sum()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * signed_area2(&self.vertices, &self.triangles[t])
    }

    /// Affine map data for triangle `t`.
    pub fn element_geometry(&self, t: usize) -> Result<ElementGeometry> {
        let tri = self
            .triangles
            .get(t)
            .ok_or_else(|| Error::Mesh(format!("triangle index {t} out of range")))?;
        let p0 = self.vertices[tri[0]];
        let p1 = self.vertices[tri[1]];
        let p2 = self.vertices[tri[2]];
        let jac = [
            [p1[0] - p0[0], p2[0] - p0[0]],
            [p1[1] - p0[1], p2[1] - p0[1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det <= 0.0 {
            return Err(Error::Mesh(format!(
                "triangle {t} is degenerate (det {det:.3e})"
            )));
        }
        let inv_t = [
            [jac[1][1] / det, -jac[1][0] / det],
            [-jac[0][1] / det, jac[0][0] / det],
        ];
        Ok(ElementGeometry {
            jacobian: jac,
            det,
            inverse_transpose: inv_t,
        })
    }

    /// Maps a reference point to physical coordinates within triangle `t`.
    pub fn map_point(&self, t: usize, p: [f64; 2]) -> [f64; 2] {
        let tri = self.triangles[t];
        let p0 = self.vertices[tri[0]];
        let p1 = self.vertices[tri[1]];
        let p2 = self.vertices[tri[2]];
        [
            p0[0] + (p1[0] - p0[0]) * p[0] + (p2[0] - p0[0]) * p[1],
            p0[1] + (p1[1] - p0[1]) * p[0] + (p2[1] - p0[1]) * p[1],
        ]
    }

    /// Outward unit normal of a boundary edge.
    pub fn boundary_normal(&self, e: usize) -> Result<[f64; 2]> {
        let edge = self
            .edges
            .get(e)
            .ok_or_else(|| Error::Mesh(format!("edge index {e} out of range")))?;
        edge.normal
            .ok_or_else(|| Error::Mesh(format!("edge {e} is interior, no outward normal")))
    }

    /// Writes the plain-text mesh format: header `V T`, then `V` coordinate
    /// lines `x y`, then `T` connectivity lines `i j k` (0-based).
    /// Coordinates use 17 significant digits so reading back is bit-exact.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.vertices.len(), self.triangles.len())?;
        for v in &self.vertices {
            writeln!(w, "{:.16e} {:.16e}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    pub fn write_text_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.write_text(std::io::BufWriter::new(file))
            .map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })
    }

    /// Reads the plain-text mesh format written by [`Mesh::write_text`].
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty mesh file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let mut it = header.split_whitespace();
        let nv: usize = parse_field(it.next(), "vertex count")?;
        let nt: usize = parse_field(it.next(), "triangle count")?;
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing vertex line {i}")))?
                .map_err(|e| Error::Parse(e.to_string()))?;
            let mut it = line.split_whitespace();
            let x: f64 = parse_field(it.next(), "x coordinate")?;
            let y: f64 = parse_field(it.next(), "y coordinate")?;
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for i in 0..nt {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing triangle line {i}")))?
                .map_err(|e| Error::Parse(e.to_string()))?;
            let mut it = line.split_whitespace();
            let a: usize = parse_field(it.next(), "vertex index")?;
            let b: usize = parse_field(it.next(), "vertex index")?;
            let c: usize = parse_field(it.next(), "vertex index")?;
            triangles.push([a, b, c]);
        }
        Self::from_raw(vertices, triangles)
    }

    pub fn read_text_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::read_text(std::io::BufReader::new(file))
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what}")))
}

fn signed_area2(vertices: &[[f64; 2]], tri: &[usize; 3]) -> f64 {
    let a = vertices[tri[0]];
    let b = vertices[tri[1]];
    let c = vertices[tri[2]];
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

fn diameter(vertices: &[[f64; 2]], tri: &[usize; 3]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..3 {
        let a = vertices[tri[i]];
        let b = vertices[tri[(i + 1) % 3]];
        d = d.max(((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt());
    }
    d
}
