//! Number formatting for CSV artifacts.

/// Shortest decimal string that round-trips to `x` (at most 17 significant
/// digits). Plain notation in `[1e-4, 1e15)`, exponent notation otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
