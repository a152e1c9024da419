//! Classified heat maps and pairwise difference maps over spatial error
//! grids. Both are pure cell-wise maps.

use super::{Scenario, SimError, SpatialErrorGrid};

/// Classification of one cell relative to the expected ranging error.
///
/// Bands are left-closed, right-open: [0, 1x) green, [1x, 5x) grey,
/// [5x, inf) blue. The stored ratio is cell error / expected error. Cells
/// containing an anchor are overdrawn red.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellClass {
    Green { ratio: f64 },
    Grey { ratio: f64 },
    Blue,
    Anchor,
}

/// A classified grid plus the raw per-cell means it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorGrid {
    pub scenario: Scenario,
    pub classes: Vec<CellClass>,
    pub raw: Vec<f64>,
}

/// Classify one cell mean against the expected error.
pub fn classify_cell(error: f64, expected_error: f64) -> CellClass {
    let ratio = error / expected_error;
    if ratio < 1.0 {
        CellClass::Green { ratio }
    } else if ratio < 5.0 {
        CellClass::Grey { ratio }
    } else {
        CellClass::Blue
    }
}

/// Classify every cell of a grid; cells containing an anchor become
/// [`CellClass::Anchor`].
pub fn classify(grid: &SpatialErrorGrid, expected_error: f64) -> ColorGrid {
    assert!(expected_error > 0.0, "expected_error must be positive");
    let scenario = &grid.scenario;
    let mut classes: Vec<CellClass> = grid
        .values
        .iter()
        .map(|&v| classify_cell(v, expected_error))
        .collect();
    for &anchor in &scenario.anchors {
        let (row, col) = scenario.cell_of(anchor);
        classes[row * scenario.grid_cols + col] = CellClass::Anchor;
    }
    ColorGrid {
        scenario: scenario.clone(),
        classes,
        raw: grid.values.clone(),
    }
}

/// Per-cell outcome of comparing two grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffCell {
    /// |a - b| within the equivalence threshold.
    Equivalent,
    /// First grid strictly better; margin is |a - b| - threshold.
    FirstBetter { margin: f64 },
    /// Second grid strictly better.
    SecondBetter { margin: f64 },
}

/// A cell-wise difference map plus the raw differences (a - b).
#[derive(Debug, Clone, PartialEq)]
pub struct DiffGrid {
    pub scenario: Scenario,
    pub cells: Vec<DiffCell>,
    pub raw: Vec<f64>,
    pub threshold: f64,
}

/// Compare one pair of cell means.
pub fn diff_cell(a: f64, b: f64, threshold: f64) -> DiffCell {
    let d = a - b;
    if d.abs() <= threshold {
        DiffCell::Equivalent
    } else if d < 0.0 {
        DiffCell::FirstBetter {
            margin: d.abs() - threshold,
        }
    } else {
        DiffCell::SecondBetter {
            margin: d.abs() - threshold,
        }
    }
}

/// Compare two grids cell by cell. Both must come from the same scenario.
/// The default threshold is 1.6% of the field width.
pub fn diff(
    a: &SpatialErrorGrid,
    b: &SpatialErrorGrid,
    threshold: Option<f64>,
) -> Result<DiffGrid, SimError> {
    if a.scenario != b.scenario {
        return Err(SimError::ScenarioMismatch);
    }
    let threshold = threshold.unwrap_or(0.016 * a.scenario.field_width);
    let cells = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| diff_cell(x, y, threshold))
        .collect();
    let raw = a.values.iter().zip(&b.values).map(|(&x, &y)| x - y).collect();
    Ok(DiffGrid {
        scenario: a.scenario.clone(),
        cells,
        raw,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2D;
    use crate::sim::{MixtureModelSpec, NlosRateUnit};

    fn tiny_scenario() -> Scenario {
        Scenario {
            field_width: 1.0,
            field_height: 1.0,
            anchors: vec![Point2D::new(0.1, 0.1)],
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

    fn grid_with(values: Vec<f64>) -> SpatialErrorGrid {
        SpatialErrorGrid {
            scenario: tiny_scenario(),
            values,
            trial_std: None,
        }
    }

    #[test]
    fn classify_bands() {
        assert!(matches!(classify_cell(0.04, 0.05), CellClass::Green { .. }));
        // Boundary at exactly 1x belongs to grey.
        assert!(matches!(classify_cell(0.05, 0.05), CellClass::Grey { .. }));
        assert!(matches!(
            classify_cell(0.25 + 1e-9, 0.05),
            CellClass::Blue
        ));
        // Boundary at exactly 5x belongs to blue.
        assert!(matches!(classify_cell(0.25, 0.05), CellClass::Blue));
    }

    #[test]
    fn classify_marks_anchor_cell() {
        let grid = grid_with(vec![0.01, 0.02, 0.03, 0.04]);
        let color = classify(&grid, 0.05);
        // Anchor (0.1, 0.1) sits in cell (0, 0).
        assert_eq!(color.classes[0], CellClass::Anchor);
        assert!(matches!(color.classes[1], CellClass::Green { .. }));
    }

    #[test]
    fn diff_identity_is_all_equivalent() {
        let g = grid_with(vec![0.1, 0.2, 0.3, 0.4]);
        let d = diff(&g, &g, None).unwrap();
        assert!(d.cells.iter().all(|c| *c == DiffCell::Equivalent));
    }

    #[test]
    fn diff_first_strictly_better_everywhere() {
        let b = grid_with(vec![0.5, 0.5, 0.5, 0.5]);
        let threshold = 0.016;
        let a = grid_with(vec![0.5 - 10.0 * threshold; 4]);
        let d = diff(&a, &b, Some(threshold)).unwrap();
        assert!(d
            .cells
            .iter()
            .all(|c| matches!(c, DiffCell::FirstBetter { .. })));
    }

    #[test]
    fn diff_matches_scalar_classifier_cell_wise() {
        let a = grid_with(vec![0.10, 0.50, 0.30, 0.01]);
        let b = grid_with(vec![0.11, 0.20, 0.30, 0.40]);
        let d = diff(&a, &b, Some(0.05)).unwrap();
        for i in 0..4 {
            assert_eq!(d.cells[i], diff_cell(a.values[i], b.values[i], 0.05));
        }
        assert_eq!(d.cells[0], DiffCell::Equivalent);
        assert!(matches!(d.cells[1], DiffCell::SecondBetter { .. }));
        assert_eq!(d.cells[2], DiffCell::Equivalent);
        assert!(matches!(d.cells[3], DiffCell::FirstBetter { .. }));
    }

    #[test]
    fn diff_rejects_mismatched_scenarios() {
        let a = grid_with(vec![0.0; 4]);
        let mut other = tiny_scenario();
        other.seed = 99;
        let b = SpatialErrorGrid {
            scenario: other,
            values: vec![0.0; 4],
            trial_std: None,
        };
        assert!(matches!(diff(&a, &b, None), Err(SimError::ScenarioMismatch)));
    }
}
