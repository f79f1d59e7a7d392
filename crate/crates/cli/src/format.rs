//! Number formatting for emitted files.
//!
//! Results are written in scientific notation with 10 significant digits. Rust's float
//! formatting rounds the exact binary value half-to-even, so the text is a pure function
//! of the bits. Input rates are echoed in their shortest round-trip form.

pub fn value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        String::new()
    }
}

pub fn rate(p: f64) -> String {
    format!("{p}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(value(1.0), "1.000000000e0");
        assert_eq!(value(0.00074962518740629), "7.496251874e-4");
        assert_eq!(value(-36.64775), "-3.664775000e1");
        assert_eq!(value(f64::NAN), "");
    }

    #[test]
    fn round_half_even_on_exact_ties() {
        assert_eq!(format!("{:.0e}", 2.5f64), "2e0");
        assert_eq!(format!("{:.0e}", 3.5f64), "4e0");
    }

    #[test]
    fn rates_round_trip() {
        assert_eq!(rate(0.0015), "0.0015");
        assert_eq!(rate(0.0), "0");
        assert_eq!(rate(0.02).parse::<f64>().unwrap(), 0.02);
    }
}
