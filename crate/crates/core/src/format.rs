/// Scientific notation with 17 significant digits, enough to round-trip
/// any `f64` exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}
