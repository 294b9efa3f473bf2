//! Locale-independent number formatting for CSV output.

/// Shortest decimal string that parses back to exactly `x`.
///
/// Plain notation for moderate magnitudes, exponent notation otherwise, so a
/// value never needs more than 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let m = x.abs();
    if m == 0.0 || (1e-5..1e16).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(-2.5), "-2.5");
        assert_eq!(fmt_f64(1e-20), "1e-20");
        assert_eq!(fmt_f64(3e20), "3e20");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    proptest! {
        #[test]
        fn round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s.trim_start_matches('-').split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect::<String>();
            prop_assert!(digits.trim_start_matches('0').len() <= 17, "{}", s);
        }
    }
}
