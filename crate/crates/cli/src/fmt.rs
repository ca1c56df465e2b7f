//! Number formatting shared by every output.

/// Nine significant digits, `%g`-style: fixed notation for exponents in
/// `[-5, 9)`, scientific otherwise, trailing zeros trimmed.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        return format!("{}e{exp}", trim(mant));
    }
    let decimals = (8 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round to nine significant digits for JSON output; non-finite values pass
/// through (and serialize as `null`).
pub fn round9(x: f64) -> f64 {
    if x.is_finite() {
        sig9(x).parse().unwrap_or(x)
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(10.0), "10");
        assert_eq!(sig9(0.825699385), "0.825699385");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(9.9999999999), "10");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1.5e9), "1.5e9");
        assert_eq!(sig9(-2.5e-7), "-2.5e-7");
        assert_eq!(sig9(f64::INFINITY), "inf");
        assert_eq!(round9(2.0 / 3.0), 0.666666667);
    }
}
