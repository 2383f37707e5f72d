//! Legacy ASCII VTK unstructured-grid output of a simulation state.
//!
//! Vertices and triangle cells, with point-data scalars `u`, `v` and the
//! vector `sigma`. The P2 field v is written at vertices only (edge DOFs
//! dropped for visualization).

use crate::error::{Error, Result};
use crate::scheme::State;
use std::io::Write;
use std::path::Path;

pub fn write_vtk(state: &State, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut w = std::io::BufWriter::new(file);
    write_vtk_to(state, &mut w).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_vtk_to<W: Write>(state: &State, w: &mut W) -> std::io::Result<()> {
    let mesh = state.u.space().mesh();
    let nv = mesh.n_vertices();
    let nt = mesh.n_triangles();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "chemorep state step {} t {:e}", state.n, state.t)?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {nv} double")?;
    for v in mesh.vertices() {
        writeln!(w, "{:.17e} {:.17e} 0.0", v[0], v[1])?;
    }
    writeln!(w, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    writeln!(w, "POINT_DATA {nv}")?;
    writeln!(w, "SCALARS u double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for i in 0..nv {
        writeln!(w, "{:.17e}", state.u.coefficients()[i])?;
    }
    writeln!(w, "SCALARS v double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for i in 0..nv {
        // P2 coefficients are vertex values first.
        writeln!(w, "{:.17e}", state.v.coefficients()[i])?;
    }
    writeln!(w, "VECTORS sigma double")?;
    let ns = state.sigma.space().n_scalar_dofs();
    for i in 0..nv {
        writeln!(
            w,
            "{:.17e} {:.17e} 0.0",
            state.sigma.coefficients()[i],
            state.sigma.coefficients()[ns + i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::FeFunction;
    use crate::mesh::Mesh;
    use crate::scheme::Spaces;
    use std::sync::Arc;

    fn tiny_state() -> State {
        let mesh = Arc::new(Mesh::unit_square(1).unwrap());
        let spaces = Spaces::standard(mesh).unwrap();
        State {
            n: 3,
            t: 0.3,
            u: FeFunction::interpolate_scalar(spaces.u.clone(), |_, _| 1.5),
            sigma: FeFunction::interpolate_vector(spaces.sigma.clone(), |_, _| [0.25, -0.5]),
            v: FeFunction::interpolate_scalar(spaces.v.clone(), |_, _| 2.25),
        }
    }

    /// Minimal reread oracle for the slices of the format we write.
    fn parse_vtk(text: &str) -> (Vec<[f64; 3]>, Vec<[usize; 3]>, Vec<f64>, Vec<f64>) {
        let mut lines = text.lines();
        let mut points = Vec::new();
        let mut cells = Vec::new();
        let mut u = Vec::new();
        let mut v = Vec::new();
        while let Some(line) = lines.next() {
            if let Some(rest) = line.strip_prefix("POINTS ") {
                let n: usize = rest.split_whitespace().next().unwrap().parse().unwrap();
                for _ in 0..n {
                    let vals: Vec<f64> = lines
                        .next()
                        .unwrap()
                        .split_whitespace()
                        .map(|s| s.parse().unwrap())
                        .collect();
                    points.push([vals[0], vals[1], vals[2]]);
                }
            } else if let Some(rest) = line.strip_prefix("CELLS ") {
                let n: usize = rest.split_whitespace().next().unwrap().parse().unwrap();
                for _ in 0..n {
                    let vals: Vec<usize> = lines
                        .next()
                        .unwrap()
                        .split_whitespace()
                        .map(|s| s.parse().unwrap())
                        .collect();
                    assert_eq!(vals[0], 3);
                    cells.push([vals[1], vals[2], vals[3]]);
                }
            } else if line.starts_with("SCALARS u") {
                lines.next(); // LOOKUP_TABLE
                for _ in 0..points.len() {
                    u.push(lines.next().unwrap().trim().parse().unwrap());
                }
            } else if line.starts_with("SCALARS v") {
                lines.next();
                for _ in 0..points.len() {
                    v.push(lines.next().unwrap().trim().parse().unwrap());
                }
            }
        }
        (points, cells, u, v)
    }

    #[test]
    fn minimal_mesh_layout() {
        let state = tiny_state();
        let mut buf = Vec::new();
        write_vtk_to(&state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let (points, cells, u, v) = parse_vtk(&text);
        assert_eq!(points.len(), 4);
        assert_eq!(cells.len(), 2);
        // Constant fields give constant point data.
        assert!(u.iter().all(|&x| x == 1.5));
        assert!(v.iter().all(|&x| x == 2.25));
    }

    #[test]
    fn round_trip_preserves_vertex_values() {
        let mesh = Arc::new(Mesh::unit_square(3).unwrap());
        let spaces = Spaces::standard(mesh.clone()).unwrap();
        let state = State {
            n: 0,
            t: 0.0,
            u: FeFunction::interpolate_scalar(spaces.u.clone(), |x, y| x * y + 0.125),
            sigma: FeFunction::interpolate_vector(spaces.sigma.clone(), |x, y| [x, -y]),
            v: FeFunction::interpolate_scalar(spaces.v.clone(), |x, y| x - y),
        };
        let mut buf = Vec::new();
        write_vtk_to(&state, &mut buf).unwrap();
        let (points, _, u, v) = parse_vtk(&String::from_utf8(buf).unwrap());
        for (i, p) in points.iter().enumerate() {
            let vert = mesh.vertex(i);
            assert!((p[0] - vert[0]).abs() <= 1e-12);
            assert!((p[1] - vert[1]).abs() <= 1e-12);
            assert!((u[i] - state.u.coefficients()[i]).abs() <= 1e-12);
            assert!((v[i] - state.v.coefficients()[i]).abs() <= 1e-12);
        }
    }
}
