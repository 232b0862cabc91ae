//! Artifact writers. JSON summaries and CSV tables are deterministic
//! functions of the run; anything volatile (timestamps, versions) is
//! segregated into run_meta.json so reruns stay byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dirichlet::Solution;
use crate::error::{Error, Result};
use crate::mask::{BoundaryClass, Classified};

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    write_bytes(dir, name, text.as_bytes())
}

/// Pretty JSON plus trailing newline. Field order follows the struct, so
/// identical values produce identical bytes.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Io(std::io::Error::other(format!("{name}: {e}"))))?;
    text.push('\n');
    write_text(dir, name, &text)
}

/// Shortest-roundtrip float formatting, shared by every CSV writer.
pub fn fmt_f(x: f64) -> String {
    format!("{x}")
}

pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_text(dir, name, &text)
}

#[derive(Serialize)]
struct RunMeta<'a> {
    command: &'a str,
    version: &'a str,
    unix_time_s: u64,
}

/// The one deliberately nondeterministic artifact.
pub fn write_run_meta(dir: &Path, command: &str) -> Result<PathBuf> {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_json(
        dir,
        "run_meta.json",
        &RunMeta { command, version: env!("CARGO_PKG_VERSION"), unix_time_s: now },
    )
}

fn grid_header(kind: &str, g: &crate::grid::Grid) -> String {
    format!(
        "caloric {kind} 1\nn {}\nnx {} {} {}\nnt {}\nh {}\ntau {}\nx_lo {} {} {}\nt_lo {}\n",
        g.n, g.nx[0], g.nx[1], g.nx[2], g.nt, g.h, g.tau, g.x_lo[0], g.x_lo[1], g.x_lo[2], g.t_lo
    )
}

/// Flat occupancy dump: text header, blank line, one byte per node in
/// slice-major order (0 exterior, 1 parabolic, 2 interior, 3 flat top).
pub fn write_mask_dump(dir: &Path, name: &str, cl: &Classified) -> Result<PathBuf> {
    let mut bytes = grid_header("mask", &cl.grid).into_bytes();
    bytes.extend_from_slice(b"classes 0=exterior 1=parabolic 2=interior 3=flattop\n\n");
    bytes.extend(cl.class.iter().map(|c| match c {
        BoundaryClass::Exterior => 0u8,
        BoundaryClass::Parabolic => 1,
        BoundaryClass::Interior => 2,
        BoundaryClass::FlatTop => 3,
    }));
    write_bytes(dir, name, &bytes)
}

/// Per-slice ASCII graymaps (exterior 0, parabolic 128, occupied 255);
/// third spatial axis, when present, is stacked vertically. Returns the
/// number of images written.
pub fn write_mask_pgms(dir: &Path, cl: &Classified) -> Result<usize> {
    let g = &cl.grid;
    let sub = dir.join("mask_slices");
    ensure_dir(&sub)?;
    let width = g.nx[0];
    let height: usize = g.nx[1..g.n].iter().product::<usize>().max(1);
    let sl = width * height;
    for it in 0..g.nt {
        let mut text = format!("P2\n{width} {height}\n255\n");
        for row in 0..height {
            let mut line = String::new();
            for ix in 0..width {
                let node = it * sl + row * width + ix;
                let v = match cl.class[node] {
                    BoundaryClass::Exterior => 0,
                    BoundaryClass::Parabolic => 128,
                    _ => 255,
                };
                if ix > 0 {
                    line.push(' ');
                }
                line.push_str(&v.to_string());
            }
            text.push_str(&line);
            text.push('\n');
        }
        write_text(&sub, &format!("slice_{it:04}.pgm"), &text)?;
    }
    Ok(g.nt)
}

/// Flat binary solution dump: text header with the slice stride, blank
/// line, then little-endian f64 nodes in slice-major order (NaN outside).
pub fn write_solution_dump(dir: &Path, name: &str, sol: &Solution) -> Result<PathBuf> {
    let g = &sol.grid;
    let sl = g.node_count() / g.nt;
    let mut bytes = grid_header("solution", g).into_bytes();
    bytes.extend_from_slice(format!("slice_stride_bytes {}\ndata f64le\n\n", sl * 8).as_bytes());
    for &v in &sol.u {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_bytes(dir, name, &bytes)
}

/// One CSV per time slice with node coordinates and values.
pub fn write_solution_csvs(dir: &Path, sol: &Solution) -> Result<usize> {
    let g = &sol.grid;
    let sub = dir.join("solution_slices");
    ensure_dir(&sub)?;
    let sl = g.node_count() / g.nt;
    let coords = ["x", "y", "z"];
    let mut header: Vec<&str> = coords[..g.n].to_vec();
    header.push("t");
    header.push("u");
    for it in 0..g.nt {
        let mut rows = Vec::with_capacity(sl);
        for m in 0..sl {
            let node = it * sl + m;
            let p = g.point(node);
            let mut row: Vec<String> = p.x[..g.n].iter().map(|&c| fmt_f(c)).collect();
            row.push(fmt_f(p.t));
            row.push(fmt_f(sol.u[node]));
            rows.push(row);
        }
        write_csv(&sub, &format!("slice_{it:04}.csv"), &header, &rows)?;
    }
    Ok(g.nt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CoefficientSet, Form, OperatorSource};
    use crate::assemble::Load;
    use crate::dirichlet::solve_dirichlet;
    use crate::domain::{make_domain, Generator};
    use crate::grid::Grid;
    use crate::mask::{classify, distance_field, rasterize};

    fn small_solution() -> (Classified, Solution) {
        let dom =
            make_domain(&Generator::StraightCylinder { n: 1, r: 1.0, t_end: 0.25 }).unwrap();
        let grid = Grid::cover_default(1, 1.0 / 8.0, &dom.bbox).unwrap();
        let cl = classify(&rasterize(&dom, &grid));
        let dist = distance_field(&cl);
        let heat = CoefficientSet::heat(Form::NonDivergence);
        let one = |_: &crate::geom::Point| 1.0;
        let src = OperatorSource::Plain { coeffs: &heat, dist: &dist };
        let sol = solve_dirichlet(&src, &cl, &Load::Scalar(&one)).unwrap();
        (cl, sol)
    }

    #[test]
    fn json_reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        #[derive(Serialize)]
        struct Rec {
            a: f64,
            b: Vec<f64>,
        }
        let rec = Rec { a: 0.1 + 0.2, b: vec![1.0 / 3.0, 2e-9] };
        let p1 = write_json(dir.path(), "one.json", &rec).unwrap();
        let b1 = fs::read(&p1).unwrap();
        let p2 = write_json(dir.path(), "one.json", &rec).unwrap();
        let b2 = fs::read(&p2).unwrap();
        assert_eq!(b1, b2);
        assert!(b1.ends_with(b"\n"));
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            vec![fmt_f(1.0), fmt_f(0.5)],
            vec![fmt_f(f64::NAN), fmt_f(-2.25)],
        ];
        let p = write_csv(dir.path(), "t.csv", &["k", "v"], &rows).unwrap();
        let text = fs::read_to_string(p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,v");
        assert_eq!(lines[1], "1,0.5");
        assert_eq!(lines[2], "NaN,-2.25");
    }

    #[test]
    fn mask_dump_counts_every_node() {
        let (cl, _) = small_solution();
        let dir = tempfile::tempdir().unwrap();
        let p = write_mask_dump(dir.path(), "mask.bin", &cl).unwrap();
        let bytes = fs::read(p).unwrap();
        let split = bytes.windows(2).position(|w| w == b"\n\n").unwrap() + 2;
        let header = std::str::from_utf8(&bytes[..split]).unwrap();
        assert!(header.starts_with("caloric mask 1\n"));
        assert!(header.contains(&format!("nt {}", cl.grid.nt)));
        let data = &bytes[split..];
        assert_eq!(data.len(), cl.grid.node_count());
        for (node, &b) in data.iter().enumerate() {
            assert_eq!(b != 0, cl.occupied(node) || b == 1);
            assert!(b <= 3);
        }
    }

    #[test]
    fn pgm_slices_match_grid() {
        let (cl, _) = small_solution();
        let dir = tempfile::tempdir().unwrap();
        let count = write_mask_pgms(dir.path(), &cl).unwrap();
        assert_eq!(count, cl.grid.nt);
        let first = dir.path().join("mask_slices/slice_0000.pgm");
        let text = fs::read_to_string(first).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some(&*format!("{} 1", cl.grid.nx[0])));
        assert_eq!(lines.next(), Some("255"));
        let row = lines.next().unwrap();
        assert!(row.split(' ').all(|v| matches!(v, "0" | "128" | "255")));
    }

    #[test]
    fn solution_dump_roundtrips_bitwise() {
        let (_, sol) = small_solution();
        let dir = tempfile::tempdir().unwrap();
        let p = write_solution_dump(dir.path(), "u.bin", &sol).unwrap();
        let bytes = fs::read(p).unwrap();
        let split = bytes.windows(2).position(|w| w == b"\n\n").unwrap() + 2;
        let data = &bytes[split..];
        assert_eq!(data.len(), sol.u.len() * 8);
        for (i, chunk) in data.chunks_exact(8).enumerate() {
            let v = f64::from_le_bytes(chunk.try_into().unwrap());
            assert_eq!(v.to_bits(), sol.u[i].to_bits());
        }
    }

    #[test]
    fn solution_csvs_cover_all_slices() {
        let (_, sol) = small_solution();
        let dir = tempfile::tempdir().unwrap();
        let count = write_solution_csvs(dir.path(), &sol).unwrap();
        assert_eq!(count, sol.grid.nt);
        let text =
            fs::read_to_string(dir.path().join("solution_slices/slice_0000.csv")).unwrap();
        assert!(text.starts_with("x,t,u\n"));
        assert_eq!(text.lines().count(), 1 + sol.grid.node_count() / sol.grid.nt);
    }
}
