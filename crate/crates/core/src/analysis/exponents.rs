use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which power-law representation an exponent belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// `f(x) ~ x^-a`
    Pdf,
    /// `P[X > x] ~ x^-k` (Pareto)
    Ccdf,
    /// `E[x](r) ~ r^-b` (Zipf)
    Rank,
}

/// Converts between `a`, `k` and `b` using `a = 1 + k` and `k = 1 / b`.
pub fn convert_exponents(value: f64, from: Representation, to: Representation) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::input(format!("exponent {value} is not finite")));
    }
    if from == to {
        return Ok(value);
    }
    let k = match from {
        Representation::Pdf => value - 1.0,
        Representation::Ccdf => value,
        Representation::Rank => {
            if value == 0.0 {
                return Err(Error::input("Zipf exponent b = 0 has no Pareto counterpart"));
            }
            1.0 / value
        }
    };
    match to {
        Representation::Pdf => Ok(1.0 + k),
        Representation::Ccdf => Ok(k),
        Representation::Rank => {
            if k == 0.0 {
                return Err(Error::input("Pareto exponent k = 0 has no Zipf counterpart"));
            }
            Ok(1.0 / k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::Representation::*;
    use super::*;

    #[test]
    fn unit_zipf() {
        assert_eq!(convert_exponents(1.0, Rank, Ccdf).unwrap(), 1.0);
        assert_eq!(convert_exponents(1.0, Rank, Pdf).unwrap(), 2.0);
        assert_eq!(convert_exponents(2.0, Pdf, Rank).unwrap(), 1.0);
    }

    #[test]
    fn income_rank_slope() {
        let a = convert_exponents(0.86, Rank, Pdf).unwrap();
        assert!((a - 2.162_790_697_674_4).abs() < 1e-12);
    }

    #[test]
    fn singular_conversions() {
        assert!(convert_exponents(0.0, Rank, Pdf).is_err());
        assert!(convert_exponents(1.0, Pdf, Rank).is_err());
        assert!(convert_exponents(0.0, Ccdf, Rank).is_err());
        assert!(convert_exponents(f64::NAN, Ccdf, Pdf).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rep() -> impl Strategy<Value = Representation> {
            prop_oneof![Just(Pdf), Just(Ccdf), Just(Rank)]
        }

        proptest! {
            #[test]
            fn round_trip(v in 0.05f64..20.0, from in rep(), to in rep()) {
                // Keep k away from 0 so every conversion is defined.
                let v = if from == Pdf { v + 1.0 } else { v };
                let there = convert_exponents(v, from, to).unwrap();
                let back = convert_exponents(there, to, from).unwrap();
                prop_assert!((back - v).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}
