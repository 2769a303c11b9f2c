//! Number formatting shared by every emitted JSON file.

/// Rounds to six significant digits so that serialized output is stable.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

pub(crate) fn serialize_sig6<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(sig6(*x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_six_digits() {
        assert_eq!(sig6(1.2 / 3.7), 0.324324);
        assert_eq!(sig6(1.0 / 6.0), 0.166667);
        assert_eq!(sig6(123456789.0), 123457000.0);
        assert_eq!(sig6(-0.0), 0.0);
        assert_eq!(sig6(1.0), 1.0);
    }
}
