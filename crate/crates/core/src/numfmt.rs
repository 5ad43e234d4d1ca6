//! Decimal formatting for CSV output.

/// Shortest decimal that parses back to the same `f64`. Magnitudes outside
/// `[1e-5, 1e16)` use exponent notation.
pub fn shortest(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// `x` rounded to 12 significant digits, printed without trailing zeros.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return shortest(x);
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    shortest(rounded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(shortest(-0.0), "0");
        assert_eq!(shortest(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(shortest(1e-300), "1e-300");
        assert_eq!(shortest(-2.5e22), "-2.5e22");
        assert_eq!(shortest(3.0), "3");
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(sig12(12345.678901234567), "12345.6789012");
        assert_eq!(sig12(-0.0), "0");
    }
}
