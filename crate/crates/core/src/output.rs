//! Legacy ASCII VTK field files and the run-level CSV.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::mesh::Mesh;
use crate::sim::{SystemState, Termination, Trajectory};

pub const CSV_HEADER: &str = "t,min_det_G,max_stress,nutrient_min,equilibrium_iters,rho_hat";

/// One row per recorded step, floats with 17 significant digits.
pub fn run_csv(traj: &Trajectory) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for d in &traj.diagnostics {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            d.t, d.min_det_g, d.max_stress, d.nutrient_min, d.equilibrium_iters, d.rho_hat
        )
        .unwrap();
    }
    out
}

fn nodal_average(mesh: &Mesh, cell_values: &[f64]) -> Vec<f64> {
    let mut sum = vec![0.0; mesh.num_vertices()];
    let mut weight = vec![0.0; mesh.num_vertices()];
    for (c, cell) in mesh.cells().iter().enumerate() {
        let a = mesh.cell_area(c);
        for &v in cell {
            sum[v] += a * cell_values[c];
            weight[v] += a;
        }
    }
    sum.iter().zip(&weight).map(|(s, w)| s / w).collect()
}

/// Unstructured grid with point data `displacement` (`y - x`), `nutrient`,
/// `growth_det` and `stress_frobenius` (area-weighted from cells).
pub fn write_vtk(mesh: &Mesh, state: &SystemState, title: &str, mut w: impl Write) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "# vtk DataFile Version 3.0").unwrap();
    writeln!(s, "{} t={:.16e}", title.replace('\n', " "), state.t).unwrap();
    writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(s, "POINTS {} double", mesh.num_vertices()).unwrap();
    for p in mesh.vertices() {
        writeln!(s, "{:.16e} {:.16e} 0", p[0], p[1]).unwrap();
    }
    writeln!(s, "CELLS {} {}", mesh.num_cells(), 4 * mesh.num_cells()).unwrap();
    for c in mesh.cells() {
        writeln!(s, "3 {} {} {}", c[0], c[1], c[2]).unwrap();
    }
    writeln!(s, "CELL_TYPES {}", mesh.num_cells()).unwrap();
    for _ in 0..mesh.num_cells() {
        s.push_str("5\n");
    }
    writeln!(s, "POINT_DATA {}", mesh.num_vertices()).unwrap();
    writeln!(s, "VECTORS displacement double").unwrap();
    for (y, x) in state.deformation.0.iter().zip(mesh.vertices()) {
        writeln!(s, "{:.16e} {:.16e} 0", y[0] - x[0], y[1] - x[1]).unwrap();
    }
    let scalars = [
        ("nutrient", state.nutrient.0.clone()),
        (
            "growth_det",
            state.growth.0.iter().map(|g| g.det()).collect(),
        ),
        ("stress_frobenius", nodal_average(mesh, &state.cell_stress)),
    ];
    for (name, values) in scalars {
        writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
        for v in values {
            writeln!(s, "{v:.16e}").unwrap();
        }
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

/// Writes `run.csv`, one VTK file per stored state and, when the run
/// stopped early, `diagnostic_snapshot.vtk` plus `diagnostic.txt`.
/// Returns the written paths.
pub fn write_outputs(
    traj: &Trajectory,
    mesh: &Mesh,
    dir: &Path,
    vtk: bool,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv = dir.join("run.csv");
    std::fs::write(&csv, run_csv(traj))?;
    written.push(csv);
    if vtk {
        for (k, state) in traj.states.iter().enumerate() {
            let path = dir.join(format!("state_{k:05}.vtk"));
            write_vtk(
                mesh,
                state,
                "morphosim state",
                std::io::BufWriter::new(std::fs::File::create(&path)?),
            )?;
            written.push(path);
        }
    }
    if let Some(state) = &traj.failed_state {
        let path = dir.join("diagnostic_snapshot.vtk");
        write_vtk(
            mesh,
            state,
            "morphosim diagnostic",
            std::io::BufWriter::new(std::fs::File::create(&path)?),
        )?;
        written.push(path);
        let path = dir.join("diagnostic.txt");
        std::fs::write(&path, termination_text(traj))?;
        written.push(path);
    }
    Ok(written)
}

pub fn termination_text(traj: &Trajectory) -> String {
    match &traj.termination {
        Termination::Completed => "completed\n".into(),
        Termination::Guard { t, reason } => format!("guard violation at t = {t:.16e}: {reason}\n"),
        Termination::SolverFailure { step, t, message } => {
            format!("solver failure at step {step}, t = {t:.16e}: {message}\n")
        }
    }
}
