//! Collision-manifold data for contour plots.

use std::path::Path;

use hubkin::lattice::{energy_balance_samples, manifold_contours, Contour};
use hubkin::Dispersion;

use crate::config::ScenarioSpec;
use crate::error::{CliError, Result};
use crate::output::{self, num};

pub const NEAREST: &str = "manifold_nn.csv";
pub const NEXT_NEAREST: &str = "manifold_nnn.csv";
pub const CONTOURS: &str = "contours.csv";

/// `k3, k4, omega_bar` on a `resolution²` lattice of `[0, 1)²`.
pub fn energy_balance_csv(dispersion: Dispersion, k1: f64, resolution: usize) -> String {
    let rows = energy_balance_samples(dispersion, k1, resolution);
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    output::table(&refs, "k3,k4,omega_bar")
}

/// On-grid nodes of each contour, for the grid node nearest `k1`.
pub fn contours_csv(spec: &ScenarioSpec) -> Result<String> {
    let grid = spec.grid()?;
    let k1 = (spec.manifold.k1 * grid.len() as f64).round() as usize % grid.len();
    let c = manifold_contours(k1, &grid);
    let mut out = String::from("contour,k1,k3,k4\n");
    for contour in [Contour::Gamma1, Contour::Gamma2, Contour::Diagonal] {
        for &(a, b) in c.get(contour) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                contour.label(),
                num(grid.momentum(k1)),
                num(grid.momentum(a)),
                num(grid.momentum(b))
            ));
        }
    }
    Ok(out)
}

/// Writes both dispersions' `ω̄` tables and the on-grid contours; returns the
/// file names.
pub fn export(spec: &ScenarioSpec) -> Result<Vec<String>> {
    spec.validate()?;
    let m = &spec.manifold;
    if m.resolution == 0 {
        return Err(CliError::Config(
            "manifold resolution must be positive".into(),
        ));
    }
    let dir: &Path = &spec.output_dir;
    let files = [
        (
            NEAREST,
            energy_balance_csv(Dispersion::NearestNeighbor, m.k1, m.resolution),
        ),
        (
            NEXT_NEAREST,
            energy_balance_csv(Dispersion::NextNearestNeighbor, m.k1, m.resolution),
        ),
        (CONTOURS, contours_csv(spec)?),
    ];
    for (name, text) in &files {
        output::write_text(&dir.join(name), text)?;
    }
    Ok(files.iter().map(|(n, _)| n.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn omega_bar_vanishes_on_contour_rows() {
        let spec = preset("high_t").unwrap();
        let text = contours_csv(&spec).unwrap();
        let mut rows = 0;
        for line in text.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            let k: Vec<f64> = cells[1..].iter().map(|c| c.parse().unwrap()).collect();
            let w = Dispersion::NearestNeighbor.energy_balance(k[0], k[1], k[2]);
            assert!(w.abs() < 1e-12, "{line}");
            rows += 1;
        }
        assert_eq!(rows, 3 * spec.grid);
    }

    #[test]
    fn table_shape() {
        let text = energy_balance_csv(Dispersion::NextNearestNeighbor, 0.3, 8);
        assert_eq!(text.lines().count(), 65);
    }
}
