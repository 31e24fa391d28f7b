//! Text formatting shared by table and report writers.

/// Scientific notation with 17 significant digits, which round-trips every
/// `f64` exactly.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}
