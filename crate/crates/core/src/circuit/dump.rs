//! Line-oriented circuit dump: `KIND q1 [q2] [angle]` with angles written as
//! C99 hexadecimal floats so a dump round-trips bit for bit.
//!
//! ```text
//! QUBITS 3
//! H 2
//! CP 1 2 0x1.921fb54442d18p+0
//! P 0 -0x1.8p-3
//! SWAP 0 1
//! GPHASE 0x0p+0
//! ```

use super::gate::{Circuit, Gate};
use crate::error::{Error, Result};

/// `%a`-style formatting of a finite `f64`.
pub fn format_hex_float(x: f64) -> String {
    let sign = if x.is_sign_negative() { "-" } else { "" };
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    if exp_bits == 0x7ff {
        return if mantissa == 0 {
            format!("{sign}inf")
        } else {
            "nan".into()
        };
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022)
    } else {
        (1, exp_bits - 1023)
    };
    let mut frac = format!("{mantissa:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    let exp_sign = if exp < 0 { '-' } else { '+' };
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp_sign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{frac}p{exp_sign}{}", exp.abs())
    }
}

fn pow2(e: i64) -> Option<f64> {
    match e {
        -1022..=1023 => Some(f64::from_bits(((e + 1023) as u64) << 52)),
        -1074..=-1023 => Some(f64::from_bits(1u64 << (e + 1074))),
        _ => None,
    }
}

/// Parse a hexadecimal float such as `-0x1.8p-3`. Mantissas are limited to
/// 15 hex digits, which covers everything [`format_hex_float`] emits.
pub fn parse_hex_float(s: &str) -> Option<f64> {
    let (neg, rest) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant, exp) = rest.split_once(['p', 'P'])?;
    let exp: i64 = exp.parse().ok()?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits.len() > 15 {
        return None;
    }
    let m = u64::from_str_radix(&digits, 16).ok()?;
    let scale = exp - 4 * frac_part.len() as i64;
    let v = if m == 0 {
        0.0
    } else {
        // split the scaling so neither factor leaves the f64 range early
        let hi = scale.clamp(-1000, 1000);
        let lo = scale - hi;
        (m as f64) * pow2(hi)? * pow2(lo)?
    };
    Some(if neg { -v } else { v })
}

impl Circuit {
    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.n_qubits());
        for g in self.gates() {
            let line = match *g {
                Gate::Hadamard(q) => format!("H {q}"),
                Gate::Phase(q, a) => format!("P {q} {}", format_hex_float(a)),
                Gate::ControlledPhase(a, b, phi) => format!("CP {a} {b} {}", format_hex_float(phi)),
                Gate::Swap(a, b) => format!("SWAP {a} {b}"),
                Gate::GlobalPhase(a) => format!("GPHASE {}", format_hex_float(a)),
                Gate::CompensationRotation(q) => format!("COMP {q}"),
            };
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| Error::Parse {
                line: line_no,
                reason: format!("{reason}: `{raw}`"),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let qubit = |k: usize| -> Result<usize> {
                fields
                    .get(k)
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| err("bad qubit index"))
            };
            let angle = |k: usize| -> Result<f64> {
                fields
                    .get(k)
                    .and_then(|f| parse_hex_float(f))
                    .ok_or_else(|| err("bad hex-float angle"))
            };
            let arity = |n: usize| -> Result<()> {
                if fields.len() == n {
                    Ok(())
                } else {
                    Err(err("wrong number of fields"))
                }
            };
            if fields[0] == "QUBITS" {
                arity(2)?;
                if circuit.is_some() {
                    return Err(err("duplicate QUBITS line"));
                }
                circuit = Some(Circuit::new(qubit(1)?));
                continue;
            }
            let gate = match fields[0] {
                "H" => {
                    arity(2)?;
                    Gate::Hadamard(qubit(1)?)
                }
                "P" => {
                    arity(3)?;
                    Gate::Phase(qubit(1)?, angle(2)?)
                }
                "CP" => {
                    arity(4)?;
                    Gate::ControlledPhase(qubit(1)?, qubit(2)?, angle(3)?)
                }
                "SWAP" => {
                    arity(3)?;
                    Gate::Swap(qubit(1)?, qubit(2)?)
                }
                "GPHASE" => {
                    arity(2)?;
                    Gate::GlobalPhase(angle(1)?)
                }
                "COMP" => {
                    arity(2)?;
                    Gate::CompensationRotation(qubit(1)?)
                }
                _ => return Err(err("unknown gate kind")),
            };
            let c = circuit.as_mut().ok_or_else(|| err("gate before QUBITS line"))?;
            c.push(gate).map_err(|e| err(&e.to_string()))?;
        }
        circuit.ok_or(Error::Parse {
            line: 0,
            reason: "missing QUBITS line".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_hex_floats() {
        assert_eq!(format_hex_float(1.0), "0x1p+0");
        assert_eq!(format_hex_float(-0.1875), "-0x1.8p-3");
        assert_eq!(format_hex_float(std::f64::consts::PI), "0x1.921fb54442d18p+1");
        assert_eq!(format_hex_float(0.0), "0x0p+0");
        assert_eq!(format_hex_float(-0.0), "-0x0p+0");
        assert_eq!(parse_hex_float("0x1.921fb54442d18p+1"), Some(std::f64::consts::PI));
        assert_eq!(parse_hex_float("0x10p-4"), Some(1.0));
        assert_eq!(parse_hex_float("1.5"), None);
    }

    #[test]
    fn subnormals_round_trip() {
        for x in [f64::MIN_POSITIVE, f64::MIN_POSITIVE / 3.0, 5e-324, -f64::MAX, f64::MAX] {
            assert_eq!(parse_hex_float(&format_hex_float(x)).unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = Circuit::from_text("QUBITS 2\nH 0\nCP 0 1 zz\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(Circuit::from_text("H 0\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nH 5\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nFOO 1\n").is_err());
    }

    proptest! {
        #[test]
        fn hex_float_round_trip(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            prop_assert_eq!(parse_hex_float(&format_hex_float(x)).unwrap().to_bits(), bits);
        }

        #[test]
        fn circuit_text_round_trip(ops in prop::collection::vec((0u8..6, 0usize..5, 0usize..5, any::<f64>()), 0..40)) {
            let mut c = Circuit::new(5);
            for (kind, a, b, phi) in ops {
                let phi = if phi.is_finite() { phi } else { 0.25 };
                let b = if a == b { (b + 1) % 5 } else { b };
                let g = match kind {
                    0 => Gate::Hadamard(a),
                    1 => Gate::Phase(a, phi),
                    2 => Gate::ControlledPhase(a, b, phi),
                    3 => Gate::Swap(a, b),
                    4 => Gate::GlobalPhase(phi),
                    _ => Gate::CompensationRotation(a),
                };
                c.push(g).unwrap();
            }
            let back = Circuit::from_text(&c.to_text()).unwrap();
            prop_assert_eq!(back.to_text(), c.to_text());
            prop_assert_eq!(back.counts(), c.counts());
        }
    }
}
