//! Reference values of the eight comparison tables, row by row.
//!
//! Bump tables list normal incidence at refinements 0, 1, 2 followed by 45°
//! incidence at refinements 0, 1, 2; the other tables have three values.

use crate::config::Method;

const ROWS: [Method; 5] = Method::TABLE_ROWS;

const T1: [[f64; 6]; 5] = [
    [9.4e-2, 3.9e-2, 7.9e-3, 1.3e-1, 2.9e-2, 5.6e-3],
    [5.2e-2, 1.3e-2, 5.1e-4, 6.2e-2, 1.1e-2, 5.3e-3],
    [3.4e-2, 3.1e-3, 2.1e-5, 4.5e-2, 1.2e-3, 5.5e-4],
    [2.5e-2, 6.0e-3, 1.2e-3, 7.4e-2, 1.1e-2, 1.7e-3],
    [2.1e-2, 4.2e-3, 5.1e-4, 4.5e-2, 5.3e-3, 5.7e-4],
];

const T2: [[f64; 6]; 5] = [
    [1.5e-2, 7.1e-3, 3.5e-3, 1.3e-2, 6.1e-3, 3.0e-3],
    [2.0e-2, 2.0e-2, 2.01e-2, 4.3e-2, 4.2e-2, 4.2e-2],
    [1.7e-2, 1.60e-2, 1.6e-2, 3.4e-2, 3.3e-2, 3.2e-2],
    [1.8e-2, 1.1e-2, 6.7e-3, 3.1e-2, 1.9e-2, 1.1e-2],
    [4.3e-3, 2.6e-3, 1.4e-3, 8.2e-3, 4.8e-3, 2.6e-3],
];

const T3: [[f64; 6]; 5] = [
    [3.8e-5, 1.9e-7, 2.1e-9, 2.0e-4, 9.1e-7, 1.6e-9],
    [2.7e-5, 2.2e-7, 1.7e-7, 1.7e-4, 9.0e-7, 3.1e-8],
    [5.5e-7, 6.0e-8, 5.6e-8, 5.6e-6, 1.2e-8, 4.7e-9],
    [6.8e-7, 6.5e-8, 3.1e-8, 2.6e-6, 8.1e-9, 2.8e-9],
    [5.8e-8, 2.4e-9, 1.1e-9, 1.5e-6, 9.5e-10, 9.0e-11],
];

const T4: [[f64; 6]; 5] = [
    [6.2e-7, 3.2e-8, 7.8e-10, 5.2e-7, 2.9e-8, 6.5e-10],
    [5.3e-4, 5.3e-4, 5.2e-4, 3.9e-4, 3.8e-4, 3.7e-4],
    [1.6e-4, 1.6e-4, 1.5e-4, 8.6e-5, 8.3e-5, 8.2e-5],
    [4.1e-4, 2.0e-4, 9.6e-5, 2.0e-4, 9.8e-5, 4.8e-5],
    [1.1e-5, 5.4e-6, 2.7e-6, 5.9e-6, 2.9e-6, 1.4e-6],
];

const T5: [[f64; 3]; 5] = [
    [1.5e-2, 6.7e-3, 3.3e-3],
    [3.4e-2, 3.4e-2, 3.3e-2],
    [3.0e-2, 2.9e-2, 2.8e-2],
    [3.6e-2, 2.5e-2, 1.6e-2],
    [1.0e-2, 6.6e-3, 3.9e-3],
];

const T6: [[f64; 3]; 5] = [
    [7.5e-7, 2.0e-8, 8.3e-10],
    [4.3e-4, 4.2e-4, 4.1e-4],
    [1.3e-4, 1.2e-4, 1.2e-4],
    [3.0e-4, 1.5e-4, 7.3e-5],
    [8.8e-6, 4.3e-6, 2.1e-6],
];

const T7: [[f64; 3]; 5] = [
    [5.7e-2, 4.9e-2, 4.4e-2],
    [6.7e-2, 6.3e-2, 5.4e-2],
    [5.1e-2, 4.5e-2, 4.0e-2],
    [6.4e-2, 3.0e-2, 1.9e-2],
    [3.2e-2, 1.5e-2, 6.7e-3],
];

const T8: [[f64; 3]; 5] = [
    [1.1e-4, 5.0e-5, 4.4e-6],
    [7.2e-4, 6.9e-4, 6.4e-4],
    [2.1e-4, 2.2e-4, 2.0e-4],
    [5.0e-4, 2.7e-4, 1.2e-4],
    [1.5e-5, 7.9e-6, 3.7e-6],
];

/// Published error for `method` in column group `incidence` (0 = normal,
/// 1 = 45°; always 0 for single-group tables) at `refinement`.
pub fn published_value(table: u8, method: Method, incidence: usize, refinement: u32) -> Option<f64> {
    let row = ROWS.iter().position(|&m| m == method)?;
    let r = refinement as usize;
    if r > 2 {
        return None;
    }
    let six = |t: &[[f64; 6]; 5]| (incidence < 2).then(|| t[row][3 * incidence + r]);
    let three = |t: &[[f64; 3]; 5]| (incidence == 0).then(|| t[row][r]);
    match table {
        1 => six(&T1),
        2 => six(&T2),
        3 => six(&T3),
        4 => six(&T4),
        5 => three(&T5),
        6 => three(&T6),
        7 => three(&T7),
        8 => three(&T8),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(published_value(1, Method::Smart, 0, 2), Some(5.1e-4));
        assert_eq!(published_value(4, Method::Berenger, 0, 2), Some(7.8e-10));
        assert_eq!(published_value(7, Method::HmlV3, 0, 2), Some(6.7e-3));
        assert_eq!(published_value(1, Method::HmlV1, 1, 0), Some(4.5e-2));
    }

    #[test]
    fn out_of_range_lookups() {
        assert_eq!(published_value(9, Method::Smart, 0, 0), None);
        assert_eq!(published_value(5, Method::Smart, 1, 0), None);
        assert_eq!(published_value(1, Method::Spml, 0, 0), None);
        assert_eq!(published_value(1, Method::Smart, 0, 3), None);
    }
}
