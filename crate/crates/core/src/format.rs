//! Number formatting shared by the CSV and text writers.

/// Scientific notation with 17 significant digits (lossless for `f64`).
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}
