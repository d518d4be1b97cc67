//! Round-trippable decimal rendering of binary64 values.

/// Formats `x` with 17 significant digits in the style of C's `%.17g`:
/// fixed notation for decimal exponents in `[-5, 17)`, scientific otherwise,
/// trailing zeros removed. Parsing the result with `str::parse::<f64>`
/// recovers `x` bit for bit.
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    if !(-5..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let head = &digits[..1];
        let body = if frac.is_empty() {
            head.to_string()
        } else {
            format!("{head}.{frac}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{body}e{esign}{:02}", exp.abs());
    }
    if exp >= 0 {
        let split = (exp + 1) as usize;
        let (int, frac) = digits.split_at(split);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        let frac = digits.trim_end_matches('0');
        format!("{sign}0.{zeros}{frac}")
    }
}
