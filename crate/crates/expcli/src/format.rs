//! Deterministic number formatting for tabular output.

/// Twelve significant digits. Plain decimal for `1e-3 <= |x| < 1e6`,
/// scientific otherwise. Zero (of either sign) prints as `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let a = x.abs();
    if (1e-3..1e6).contains(&a) {
        let s = format!("{:.11e}", x);
        let exp: i32 = s.split_once('e').map(|(_, e)| e.parse().unwrap()).unwrap();
        let decimals = (11 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x))
    } else {
        let s = format!("{:.11e}", x);
        let (mantissa, exp) = s.split_once('e').unwrap();
        format!("{}e{}", trim_fraction(mantissa), exp)
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
