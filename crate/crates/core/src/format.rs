//! Numeric formatting for CSV and report output.

/// Formats a value rounded to 6 significant digits, printed in the shortest
/// form that round-trips the rounded value. Keeps golden files stable across
/// platforms while computations stay in full double precision.
pub fn sig6(x: f64) -> String {
    sig(x, 6)
}

pub fn sig(x: f64, digits: i32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - magnitude);
    let rounded = (x * scale).round() / scale;
    format!("{rounded}")
}
