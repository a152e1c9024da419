//! Image and CSV output: binary PPM (P6) heat maps, one pixel per grid cell,
//! with a raw-value CSV sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{CellClass, ColorGrid, DiffCell, DiffGrid, Scenario, SimError, SpatialErrorGrid};

fn io_err(path: &Path, source: std::io::Error) -> SimError {
    SimError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Colour of a classified cell. Linear ramps: green gets darker towards
/// lower error, grey gets darker towards higher error, blue is flat (the
/// band is cropped for contrast), anchors are pure red.
fn class_rgb(class: CellClass) -> [u8; 3] {
    match class {
        CellClass::Green { ratio } => {
            let t = ratio.clamp(0.0, 1.0);
            lerp_rgb([0, 100, 0], [170, 255, 170], t)
        }
        CellClass::Grey { ratio } => {
            let t = ((ratio - 1.0) / 4.0).clamp(0.0, 1.0);
            lerp_rgb([210, 210, 210], [40, 40, 40], t)
        }
        CellClass::Blue => [0, 0, 255],
        CellClass::Anchor => [255, 0, 0],
    }
}

/// Colour of a difference cell. Red shades mean the first grid is better,
/// blue-to-white shades mean the second is; the shade saturates at a margin
/// of five thresholds. Equivalent cells are green.
fn diff_rgb(cell: DiffCell, threshold: f64) -> [u8; 3] {
    let saturate = |margin: f64| (margin / (5.0 * threshold)).clamp(0.0, 1.0);
    match cell {
        DiffCell::Equivalent => [0, 170, 0],
        DiffCell::FirstBetter { margin } => lerp_rgb([255, 220, 220], [220, 0, 0], saturate(margin)),
        DiffCell::SecondBetter { margin } => {
            lerp_rgb([235, 235, 255], [0, 0, 220], saturate(margin))
        }
    }
}

fn lerp_rgb(from: [u8; 3], to: [u8; 3], t: f64) -> [u8; 3] {
    let mut out = [0u8; 3];
    for i in 0..3 {
        out[i] = (from[i] as f64 + (to[i] as f64 - from[i] as f64) * t).round() as u8;
    }
    out
}

/// Write a binary P6 pixmap, one pixel per cell. Grid row 0 is the bottom of
/// the field and is written as the bottom image row.
fn write_ppm<F: Fn(usize) -> [u8; 3]>(
    path: &Path,
    cols: usize,
    rows: usize,
    pixel: F,
) -> Result<(), SimError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write!(w, "P6\n{cols} {rows}\n255\n").map_err(|e| io_err(path, e))?;
    for row in (0..rows).rev() {
        for col in 0..cols {
            w.write_all(&pixel(row * cols + col))
                .map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn write_csv(path: &Path, cols: usize, values: &[f64]) -> Result<(), SimError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(csv_string(cols, values).as_bytes())
        .map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Full-precision CSV body: one line per grid row, comma-separated shortest
/// round-trip decimals.
pub(crate) fn csv_string(cols: usize, values: &[f64]) -> String {
    let mut out = String::new();
    for chunk in values.chunks(cols) {
        let line: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Write the raw cell means of a grid as CSV.
pub fn write_grid_csv(grid: &SpatialErrorGrid, path: &Path) -> Result<(), SimError> {
    write_csv(path, grid.scenario.grid_cols, &grid.values)
}

/// Read a grid back from CSV. The scenario must be supplied (CSV carries no
/// metadata) and its dimensions must match.
pub fn read_grid_csv(path: &Path, scenario: &Scenario) -> Result<SpatialErrorGrid, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |message: String| SimError::BadGrid {
        path: path.display().to_string(),
        message,
    };
    let mut values = Vec::with_capacity(scenario.n_cells());
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let row = row.map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if row.len() != scenario.grid_cols {
            return Err(bad(format!(
                "row {} has {} columns, scenario expects {}",
                i + 1,
                row.len(),
                scenario.grid_cols
            )));
        }
        values.extend(row);
    }
    if values.len() != scenario.n_cells() {
        return Err(bad(format!(
            "{} cells read, scenario expects {}",
            values.len(),
            scenario.n_cells()
        )));
    }
    Ok(SpatialErrorGrid {
        scenario: scenario.clone(),
        values,
        trial_std: None,
    })
}

/// Write `<base>.ppm` and `<base>.csv` for a classified grid.
pub fn render_color_grid(grid: &ColorGrid, base: &Path) -> Result<(), SimError> {
    let scenario = &grid.scenario;
    write_ppm(
        &base.with_extension("ppm"),
        scenario.grid_cols,
        scenario.grid_rows,
        |idx| class_rgb(grid.classes[idx]),
    )?;
    write_csv(&base.with_extension("csv"), scenario.grid_cols, &grid.raw)
}

/// Write `<base>.ppm` and `<base>.csv` for a difference grid. The CSV holds
/// the raw per-cell differences.
pub fn render_diff_grid(grid: &DiffGrid, base: &Path) -> Result<(), SimError> {
    let scenario = &grid.scenario;
    write_ppm(
        &base.with_extension("ppm"),
        scenario.grid_cols,
        scenario.grid_rows,
        |idx| diff_rgb(grid.cells[idx], grid.threshold),
    )?;
    write_csv(&base.with_extension("csv"), scenario.grid_cols, &grid.raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2D;
    use crate::sim::{classify, MixtureModelSpec, NlosRateUnit};

    fn scenario_2x2(anchor: Point2D) -> Scenario {
        Scenario {
            field_width: 1.0,
            field_height: 1.0,
            anchors: vec![anchor],
            grid_cols: 2,
            grid_rows: 2,
            trials_per_cell: 1,
            error_model: MixtureModelSpec {
                bias: 0.05,
                sigma: 0.0,
                nlos_prob: 0.0,
                nlos_rate: 2.0,
                nlos_rate_unit: NlosRateUnit::Coordinate,
            },
            seed: 0,
            expected_error: None,
        }
    }

    #[test]
    fn all_green_grid_renders_identical_pixels() {
        let dir = tempfile::tempdir().unwrap();
        // Anchor far outside any cell is clamped into one; keep values below
        // 1x so non-anchor cells are green.
        let scenario = scenario_2x2(Point2D::new(0.1, 0.1));
        let grid = SpatialErrorGrid {
            scenario,
            values: vec![0.01; 4],
            trial_std: None,
        };
        let color = classify(&grid, 0.05);
        let base = dir.path().join("img");
        render_color_grid(&color, &base).unwrap();
        let bytes = std::fs::read(base.with_extension("ppm")).unwrap();
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let body = &bytes[header.len()..];
        assert_eq!(body.len(), 12);
        // Cell (0,0) holds the anchor: pure red; the rest share one green.
        let pixels: Vec<&[u8]> = body.chunks(3).collect();
        // Image bottom row is written last: pixel index 2 is cell (0,0).
        assert_eq!(pixels[2], &[255, 0, 0]);
        assert_eq!(pixels[0], pixels[1]);
        assert_eq!(pixels[0], pixels[3]);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = scenario_2x2(Point2D::new(0.1, 0.1));
        let grid = SpatialErrorGrid {
            scenario: scenario.clone(),
            values: vec![0.1, 0.25, 1.0 / 3.0, 0.0625],
            trial_std: None,
        };
        let path = dir.path().join("grid.csv");
        write_grid_csv(&grid, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 2);
        let loaded = read_grid_csv(&path, &scenario).unwrap();
        assert_eq!(loaded.values, grid.values);
    }

    #[test]
    fn csv_dimension_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        std::fs::write(&path, "1.0,2.0,3.0\n").unwrap();
        let scenario = scenario_2x2(Point2D::new(0.1, 0.1));
        assert!(matches!(
            read_grid_csv(&path, &scenario),
            Err(SimError::BadGrid { .. })
        ));
    }
}
