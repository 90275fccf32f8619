//! Text formatting shared by the CSV writers.

/// Formats `x` with 12 significant digits, `%#.12g` style; zero prints as `0`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..DIGITS).contains(&exp) {
        format!("{:.*}", (DIGITS - 1 - exp) as usize, x)
    } else {
        sci
    }
}
