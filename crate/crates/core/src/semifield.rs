//! Idempotent semifield scalars.
//!
//! Four linearly ordered, radicable semifields are provided:
//!
//! | type       | ⊕   | ⊗ | 𝟘   | 𝟙 | value type  |
//! |------------|-----|---|------|---|-------------|
//! | [`MaxPlus`]  | max | + | −∞   | 0 | exact rational |
//! | [`MinPlus`]  | min | + | +∞   | 0 | exact rational |
//! | [`MaxTimes`] | max | × | 0    | 1 | `f64` > 0   |
//! | [`MinTimes`] | min | × | +∞   | 1 | `f64` > 0   |
//!
//! The zero element is always the explicit `Bottom` variant. `Ord` on every
//! scalar type is the order induced by ⊕ (`a <= b` iff `a ⊕ b == b`), so for the
//! min-semifields it is the reverse of the order on the reals, and `Bottom` is
//! always the least element.
//!
//! Additive semifields (max-plus, min-plus) are exact. Multiplicative ones use
//! floating point, with [`Semifield::approx_eq`] comparing at a relative
//! tolerance (see [`relative_tolerance`]).

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number used for additive-semifield values and for exponents.
pub type Rational = Rational64;

/// Exponents are always exact rationals `p/q`.
pub type Exponent = Rational64;

/// Default relative tolerance for multiplicative semifields.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3e11_2e0b_e826_d695); // 1e-9

/// Relative tolerance used by [`Semifield::approx_eq`] in multiplicative semifields.
pub fn relative_tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(AtomicOrdering::Relaxed))
}

/// Sets the process-wide relative tolerance for multiplicative semifields.
///
/// Non-finite or negative values are ignored.
pub fn set_relative_tolerance(tolerance: f64) {
    if tolerance.is_finite() && tolerance >= 0.0 {
        TOLERANCE_BITS.store(tolerance.to_bits(), AtomicOrdering::Relaxed);
    }
}

/// Shorthand for the exponent `numer/denom`.
pub fn exponent(numer: i64, denom: i64) -> Exponent {
    Rational64::new(numer, denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemifieldId {
    #[serde(rename = "max-plus")]
    MaxPlus,
    #[serde(rename = "min-plus")]
    MinPlus,
    #[serde(rename = "max-times")]
    MaxTimes,
    #[serde(rename = "min-times")]
    MinTimes,
}

impl SemifieldId {
    pub const ALL: [SemifieldId; 4] = [
        SemifieldId::MaxPlus,
        SemifieldId::MinPlus,
        SemifieldId::MaxTimes,
        SemifieldId::MinTimes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemifieldId::MaxPlus => "max-plus",
            SemifieldId::MinPlus => "min-plus",
            SemifieldId::MaxTimes => "max-times",
            SemifieldId::MinTimes => "min-times",
        }
    }
}

impl Display for SemifieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SemifieldId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SemifieldId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown semifield `{s}`")))
    }
}

/// A linearly ordered, radicable idempotent semifield.
pub trait Semifield:
    Copy + Debug + Display + PartialEq + Eq + PartialOrd + Ord + Send + Sync + 'static
{
    /// Representation of finite (non-zero) elements.
    type Value: Copy + Debug + PartialEq;

    const ID: SemifieldId;

    /// `true` when arithmetic is exact (rational values).
    const EXACT: bool;

    /// The zero element 𝟘.
    fn zero() -> Self;

    /// The identity element 𝟙.
    fn one() -> Self;

    /// Wraps a finite value, rejecting values outside the carrier set.
    fn finite(value: Self::Value) -> Result<Self>;

    fn value(self) -> Option<Self::Value>;

    fn is_zero(self) -> bool {
        self.value().is_none()
    }

    fn oplus(self, rhs: Self) -> Self {
        self.max(rhs)
    }

    fn otimes(self, rhs: Self) -> Self;

    /// Multiplicative inverse `a⁻¹` with `a⁻¹ ⊗ a = 𝟙`.
    fn inverse(self) -> Result<Self>;

    /// Rational power `a^(p/q)`. `𝟘^e = 𝟘` for `e > 0`; non-positive powers of 𝟘 are errors.
    fn power(self, exponent: Exponent) -> Result<Self>;

    /// Order-preserving embedding of `(ℚ, +)` into the multiplicative group,
    /// so that `from_scale(r) ≥ 𝟙` exactly when `r ≥ 0`.
    fn from_scale(r: Rational) -> Self;

    /// Parses a finite value literal (integer, decimal or `p/q`).
    fn parse_value(text: &str) -> Result<Self>;

    /// Renders a finite value; `Bottom` renders as [`Semifield::bottom_label`].
    fn render(self) -> String;

    /// Human-readable label for 𝟘 in this semifield.
    fn bottom_label() -> &'static str;

    /// The finite value as an ordinary real number.
    fn to_f64(self) -> Option<f64>;

    /// Equality: exact in additive semifields, relative tolerance in multiplicative ones.
    fn approx_eq(self, other: Self) -> bool {
        self == other
    }

    /// `self ≤ other` up to [`Semifield::approx_eq`].
    fn approx_le(self, other: Self) -> bool {
        self <= other || self.approx_eq(other)
    }

    /// Greatest lower bound in the semifield order.
    fn meet(self, other: Self) -> Self {
        self.min(other)
    }

    /// `a ⊗ b⁻¹`, with `𝟘 / b = 𝟘`.
    fn divide(self, rhs: Self) -> Result<Self> {
        Ok(self.otimes(rhs.inverse()?))
    }
}

/// Parses an exact rational literal: `"3"`, `"-2.5"`, `"8/3"`, `"1e-3"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let err = || Error::ParseScalar(text.to_string());
    if text.contains('/') {
        return Rational::from_str(text).map_err(|_| err());
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (
            &text[..pos],
            text[pos + 1..].parse::<i32>().map_err(|_| err())?,
        ),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let numer: i64 = format!("{int_part}{frac_part}")
        .parse::<i64>()
        .map_err(|_| err())?;
    let scale = exp - frac_part.len() as i32;
    let ten = 10i64;
    let value = if scale >= 0 {
        let factor = ten.checked_pow(scale as u32).ok_or_else(err)?;
        Rational::from_integer(numer.checked_mul(factor).ok_or_else(err)?)
    } else {
        let factor = ten.checked_pow((-scale) as u32).ok_or_else(err)?;
        Rational::new(numer, factor)
    };
    Ok(if negative { -value } else { value })
}

fn rational_to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

mod additive {
    use super::*;

    pub fn valid(_: Rational) -> bool {
        true
    }
    pub fn one() -> Rational {
        Rational::zero()
    }
    pub fn mul(a: Rational, b: Rational) -> Rational {
        a + b
    }
    pub fn inv(a: Rational) -> Rational {
        -a
    }
    pub fn pow(a: Rational, e: Exponent) -> Rational {
        a * e
    }
    pub fn cmp(a: &Rational, b: &Rational) -> Ordering {
        a.cmp(b)
    }
    pub fn scale(r: Rational) -> Rational {
        r
    }
    pub fn parse(text: &str) -> Result<Rational> {
        parse_rational(text)
    }
    pub fn to_f64(a: Rational) -> f64 {
        rational_to_f64(a)
    }
    pub fn approx_eq(a: Rational, b: Rational) -> bool {
        a == b
    }
}

mod multiplicative {
    use super::*;

    pub fn valid(a: f64) -> bool {
        a.is_finite() && a > 0.0
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn mul(a: f64, b: f64) -> f64 {
        a * b
    }
    pub fn inv(a: f64) -> f64 {
        1.0 / a
    }
    pub fn pow(a: f64, e: Exponent) -> f64 {
        if *e.denom() == 1 {
            if let Ok(k) = i32::try_from(*e.numer()) {
                return a.powi(k);
            }
        }
        a.powf(rational_to_f64(e))
    }
    pub fn cmp(a: &f64, b: &f64) -> Ordering {
        a.total_cmp(b)
    }
    pub fn scale(r: Rational) -> f64 {
        rational_to_f64(r).exp()
    }
    pub fn parse(text: &str) -> Result<f64> {
        let text = text.trim();
        if text.contains('/') {
            return parse_rational(text).map(rational_to_f64);
        }
        text.parse::<f64>()
            .map_err(|_| Error::ParseScalar(text.to_string()))
    }
    pub fn to_f64(a: f64) -> f64 {
        a
    }
    pub fn approx_eq(a: f64, b: f64) -> bool {
        (a - b).abs() <= relative_tolerance() * a.abs().max(b.abs())
    }
}

macro_rules! semifield_type {
    (
        $(#[$meta:meta])*
        $name:ident {
            id: $id:expr,
            value: $value:ty,
            exact: $exact:expr,
            descending: $descending:expr,
            bottom: $bottom:expr,
            ops: $ops:ident $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug)]
        pub enum $name {
            Bottom,
            Finite($value),
        }

        impl $name {
            /// Panicking constructor for literals known to be valid.
            pub fn new(value: $value) -> Self {
                <Self as Semifield>::finite(value).expect("invalid semifield literal")
            }
        }

        impl PartialEq for $name {
            fn eq(&self, other: &Self) -> bool {
                self.cmp(other) == Ordering::Equal
            }
        }

        impl Eq for $name {}

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                match (self, other) {
                    ($name::Bottom, $name::Bottom) => Ordering::Equal,
                    ($name::Bottom, _) => Ordering::Less,
                    (_, $name::Bottom) => Ordering::Greater,
                    ($name::Finite(a), $name::Finite(b)) => {
                        let natural = $ops::cmp(a, b);
                        if $descending {
                            natural.reverse()
                        } else {
                            natural
                        }
                    }
                }
            }
        }

        impl Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.render())
            }
        }

        impl Semifield for $name {
            type Value = $value;
            const ID: SemifieldId = $id;
            const EXACT: bool = $exact;

            fn zero() -> Self {
                $name::Bottom
            }

            fn one() -> Self {
                $name::Finite($ops::one())
            }

            fn finite(value: $value) -> Result<Self> {
                if $ops::valid(value) {
                    Ok($name::Finite(value))
                } else {
                    Err(Error::InvalidValue {
                        value: format!("{value:?}"),
                        semifield: $id,
                    })
                }
            }

            fn value(self) -> Option<$value> {
                match self {
                    $name::Bottom => None,
                    $name::Finite(v) => Some(v),
                }
            }

            fn otimes(self, rhs: Self) -> Self {
                match (self, rhs) {
                    ($name::Finite(a), $name::Finite(b)) => $name::Finite($ops::mul(a, b)),
                    _ => $name::Bottom,
                }
            }

            fn inverse(self) -> Result<Self> {
                match self {
                    $name::Bottom => Err(Error::InvertZero),
                    $name::Finite(a) => Ok($name::Finite($ops::inv(a))),
                }
            }

            fn power(self, exponent: Exponent) -> Result<Self> {
                match self {
                    $name::Finite(a) => Ok($name::Finite($ops::pow(a, exponent))),
                    $name::Bottom if exponent > Exponent::zero() => Ok($name::Bottom),
                    $name::Bottom => Err(Error::ZeroPower {
                        exponent: exponent.to_string(),
                    }),
                }
            }

            fn from_scale(r: Rational) -> Self {
                $name::Finite($ops::scale(if $descending { -r } else { r }))
            }

            fn parse_value(text: &str) -> Result<Self> {
                Self::finite($ops::parse(text)?)
            }

            fn render(self) -> String {
                match self {
                    $name::Bottom => $bottom.to_string(),
                    $name::Finite(v) => v.to_string(),
                }
            }

            fn bottom_label() -> &'static str {
                $bottom
            }

            fn to_f64(self) -> Option<f64> {
                self.value().map($ops::to_f64)
            }

            fn approx_eq(self, other: Self) -> bool {
                match (self, other) {
                    ($name::Finite(a), $name::Finite(b)) => $ops::approx_eq(a, b),
                    (a, b) => a == b,
                }
            }
        }
    };
}

semifield_type! {
    /// `ℝ_max,+` over exact rationals: ⊕ = max, ⊗ = +, 𝟘 = −∞, 𝟙 = 0.
    MaxPlus {
        id: SemifieldId::MaxPlus,
        value: Rational,
        exact: true,
        descending: false,
        bottom: "-inf",
        ops: additive,
    }
}

semifield_type! {
    /// `ℝ_min,+` over exact rationals: ⊕ = min, ⊗ = +, 𝟘 = +∞, 𝟙 = 0.
    MinPlus {
        id: SemifieldId::MinPlus,
        value: Rational,
        exact: true,
        descending: true,
        bottom: "+inf",
        ops: additive,
    }
}

semifield_type! {
    /// `ℝ_max,×` over positive floats: ⊕ = max, ⊗ = ×, 𝟘 = 0, 𝟙 = 1.
    MaxTimes {
        id: SemifieldId::MaxTimes,
        value: f64,
        exact: false,
        descending: false,
        bottom: "0",
        ops: multiplicative,
    }
}

semifield_type! {
    /// `ℝ_min,×` over positive floats: ⊕ = min, ⊗ = ×, 𝟘 = +∞, 𝟙 = 1.
    MinTimes {
        id: SemifieldId::MinTimes,
        value: f64,
        exact: false,
        descending: true,
        bottom: "+inf",
        ops: multiplicative,
    }
}

impl MaxPlus {
    /// Integer literal.
    pub fn int(v: i64) -> Self {
        MaxPlus::Finite(Rational::from_integer(v))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        MaxPlus::Finite(Rational::new(numer, denom))
    }
}

impl MinPlus {
    pub fn int(v: i64) -> Self {
        MinPlus::Finite(Rational::from_integer(v))
    }
}
