use std::io::{self, Write};

use super::Mesh;

/// Writes the mesh as a legacy ASCII VTK unstructured grid with optional
/// per-cell and per-point scalar fields.
pub fn write_vtk<W: Write>(
    mesh: &Mesh,
    out: &mut W,
    title: &str,
    cell_data: &[(&str, &[f64])],
    point_data: &[(&str, &[f64])],
) -> io::Result<()> {
    let nv = mesh.vertices().len();
    let nt = mesh.num_triangles();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {nv} double")?;
    for v in mesh.vertices() {
        writeln!(out, "{:e} {:e} 0", v.x, v.y)?;
    }
    writeln!(out, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        let [a, b, c] = t.vertices;
        writeln!(out, "3 {a} {b} {c}")?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "5")?;
    }
    write_fields(out, "CELL_DATA", nt, cell_data)?;
    write_fields(out, "POINT_DATA", nv, point_data)?;
    Ok(())
}

fn write_fields<W: Write>(out: &mut W, section: &str, n: usize, fields: &[(&str, &[f64])]) -> io::Result<()> {
    if fields.is_empty() {
        return Ok(());
    }
    writeln!(out, "{section} {n}")?;
    for (name, values) in fields {
        if values.len() != n {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("field `{name}` has {} values, expected {n}", values.len()),
            ));
        }
        writeln!(out, "SCALARS {} double 1", name.replace(char::is_whitespace, "_"))?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in values.iter() {
            writeln!(out, "{v:e}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::Domain;
    use super::*;

    #[test]
    fn legacy_layout() {
        let m = Mesh::build_initial(Domain::UnitSquare, 1).unwrap();
        let eta: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let mut buf = Vec::new();
        write_vtk(&m, &mut buf, "test", &[("eta", &eta)], &[]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[2], "ASCII");
        assert_eq!(lines[4], "POINTS 9 double");
        assert!(s.contains("CELLS 8 32\n"));
        assert!(s.contains("CELL_DATA 8\nSCALARS eta double 1\nLOOKUP_TABLE default\n"));
        assert!(!s.contains("POINT_DATA"));
    }

    #[test]
    fn rejects_wrong_length() {
        let m = Mesh::build_initial(Domain::UnitSquare, 1).unwrap();
        let mut buf = Vec::new();
        assert!(write_vtk(&m, &mut buf, "t", &[("bad", &[1.0])], &[]).is_err());
    }
}
