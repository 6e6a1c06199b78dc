#![allow(dead_code)]

/// Published packing table: (p, q, rho, ball volume, prism volume, density).
pub const PACKING_TABLE: [(u32, u32, f64, f64, f64, f64); 16] = [
    (3, 11, 0.237999, 0.057543, 0.169931, 0.338626),
    (3, 12, 0.261799, 0.076892, 0.205617, 0.373960),
    (3, 13, 0.279134, 0.093489, 0.238467, 0.392044),
    (3, 14, 0.287083, 0.101857, 0.268561, 0.379271),
    (3, 50, 0.350810, 0.188371, 0.636918, 0.295754),
    (3, 1000, 0.370822, 0.223543, 0.812627, 0.275087),
    (5, 7, 0.493679, 0.546132, 1.218594, 0.448165),
    (6, 8, 0.654498, 1.350812, 2.570209, 0.525565),
    (6, 9, 0.692287, 1.624770, 2.924327, 0.555605),
    (7, 9, 0.772932, 2.347696, 4.181962, 0.561386),
    (7, 10, 0.789635, 2.523909, 4.568217, 0.552493),
    (8, 10, 0.860471, 3.387783, 5.971111, 0.567362),
    (9, 11, 0.930662, 4.456867, 7.887074, 0.565085),
    (9, 3000, 1.003711, 5.838784, 13.410609, 0.435385),
    (20, 60, 1.361357, 18.712577, 37.065848, 0.504847),
    (20, 2000, 1.387192, 20.205264, 39.883121, 0.506612),
];

/// Vertex parameter b for p = 3. The (3,7) and (3,10) entries are
/// recomputed; the printed ones each carry one spurious digit.
pub const VERTEX_PARAMS: [(u32, f64); 6] =
    [(7, 0.3007426), (8, 0.40561640), (9, 0.47611091), (10, 0.52893551), (50, 0.89636657), (1000, 0.99457331)];

/// Published entries for the rows above that needed recomputing.
pub const VERTEX_PARAM_MISPRINTS: [(u32, &str); 2] = [(7, "0.30007426"), (10, "0.50289355")];

/// Rows whose radius is half the prism height.
pub const HALF_HEIGHT_ROWS: [(u32, u32); 6] = [(3, 11), (3, 12), (5, 7), (6, 8), (7, 9), (20, 60)];

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
