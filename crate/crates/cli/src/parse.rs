//! Value parsers for the argument grammar.

use qho_lg::scan::AxisRange;
use qho_lg::{Order, SignChoice};
use num_complex::Complex64;

fn float(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

/// `x,p`
pub fn pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b got {s:?}"))?;
    Ok((float(a)?, float(b)?))
}

pub fn complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = pair(s)?;
    Ok(Complex64::new(re, im))
}

/// `start:stop:step`, inclusive of stop.
pub fn axis(s: &str) -> Result<AxisRange<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:step, got {s:?}"));
    }
    AxisRange::new(float(parts[0])?, float(parts[1])?, float(parts[2])?).map_err(|e| e.to_string())
}

/// `start:stop`
pub fn span(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected start:stop, got {s:?}"))?;
    let (a, b) = (float(a)?, float(b)?);
    if b < a {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}


pub fn order(s: &str) -> Result<Order, String> {
    let n: u32 = s.trim().parse().map_err(|_| format!("order must be 2, 3 or 4, got {s:?}"))?;
    Order::from_int(n).map_err(|e| e.to_string())
}

/// `+`, `-`, `plus`, `minus`.
pub fn sign(s: &str) -> Result<SignChoice, String> {
    match s.trim() {
        "+" | "plus" | "+1" | "1" => Ok(SignChoice::Plus),
        "-" | "minus" | "-1" => Ok(SignChoice::Minus),
        _ => Err(format!("sign must be + or -, got {s:?}")),
    }
}

pub fn positive(s: &str) -> Result<f64, String> {
    let v = float(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {s:?}"))
    }
}

pub fn finite(s: &str) -> Result<f64, String> {
    float(s)
}

pub fn values(r: &AxisRange<f64>) -> Vec<f64> {
    (0..r.len()).map(|i| r.value(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(pair("0.55,-1.925").unwrap(), (0.55, -1.925));
        assert!(pair("0.55").is_err());
        assert!(pair("nan,1").is_err());
        assert_eq!(values(&axis("0:1:0.25").unwrap()).len(), 5);
        assert!(axis("0:1").is_err());
        assert!(axis("1:0:0.1").is_err());
        assert_eq!(span("0:1.6").unwrap(), (0.0, 1.6));
        assert!(order("5").is_err());
        assert_eq!(sign("-").unwrap(), SignChoice::Minus);
        assert!(positive("0").is_err());
    }
}
