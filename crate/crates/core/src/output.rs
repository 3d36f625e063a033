//! Locale-independent numeric formatting for emitted tables.

/// Formats `x` with 12 significant digits. Fixed notation for moderate
/// magnitudes, exponent notation otherwise; always `.` as decimal separator.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1.00000000000");
        assert_eq!(sig12(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(sig12(-2.5), "-2.50000000000");
        assert_eq!(sig12(70.0), "70.0000000000");
        assert_eq!(sig12(1.5e-17), "1.50000000000e-17");
    }

    #[test]
    fn reparse_is_stable() {
        for x in [
            0.123456789012345,
            1.0 / 3.0,
            2.0f64.sqrt() * 1e-7,
            12345.678,
        ] {
            let s = sig12(x);
            let y: f64 = s.parse().unwrap();
            assert_eq!(sig12(y), s);
            assert!((x - y).abs() <= x.abs() * 1e-11);
        }
    }
}
