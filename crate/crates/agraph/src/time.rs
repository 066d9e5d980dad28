//! Exact decimal time references.
//!
//! Times are non-negative decimals of arbitrary precision. Binary floating
//! point is never used for storage or comparison, so values read from a
//! source document round-trip exactly and sample-to-seconds conversions stay
//! exact whenever the rate divides a power of ten.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;

/// Fractional digits kept when a ratio does not terminate in decimal.
const MAX_RATIO_SCALE: u32 = 12;

/// A point in time, in seconds.
///
/// Two `TimeRef`s compare equal when their numeric values are equal:
/// `"2.5"` and `"2.50"` are the same instant. The lexical form seen at
/// construction is preserved and used for display, so `"0.0000"` prints as
/// written. Values produced by arithmetic display in shortest form.
#[derive(Clone)]
pub struct TimeRef {
    /// Canonical unscaled value: no trailing decimal zeros (scale is minimal).
    units: BigUint,
    /// Number of fractional digits; `value = units / 10^scale`.
    scale: u32,
    /// Display form.
    text: String,
}

/// Error for malformed time literals.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid time literal {0:?}: expected digits with optional fraction")]
pub struct InvalidTime(pub String);

impl TimeRef {
    /// Parses a literal of the form `digits[.digits]`, preserving it for display.
    pub fn parse(s: &str) -> Result<TimeRef, InvalidTime> {
        let bad = || InvalidTime(s.to_string());
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if s.contains('.') && (frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit())) {
            return Err(bad());
        }
        let mut digits = String::with_capacity(int.len() + frac.len());
        digits.push_str(int);
        digits.push_str(frac);
        let units = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
        let (units, scale) = normalize(units, frac.len() as u32);
        Ok(TimeRef { units, scale, text: s.to_string() })
    }

    /// Zero seconds.
    pub fn zero() -> TimeRef {
        TimeRef { units: BigUint::ZERO, scale: 0, text: "0".to_string() }
    }

    /// Whole seconds.
    pub fn from_secs(n: u64) -> TimeRef {
        TimeRef { units: BigUint::from(n), scale: 0, text: n.to_string() }
    }

    /// Exact value of `numer / denom`, e.g. a sample count over a sample rate.
    ///
    /// When the ratio terminates in decimal the result is exact; otherwise it
    /// is rounded half-to-even at twelve fractional digits. Displays in
    /// shortest form. `denom` must be nonzero.
    pub fn from_ratio(numer: u64, denom: u64) -> TimeRef {
        assert!(denom != 0, "zero denominator");
        Self::big_ratio(BigUint::from(numer), BigUint::from(denom))
    }

    /// This value divided by a positive integer, with `from_ratio` rounding.
    pub fn div_by(&self, divisor: u64) -> TimeRef {
        assert!(divisor != 0, "zero divisor");
        let denom = BigUint::from(10u32).pow(self.scale) * BigUint::from(divisor);
        Self::big_ratio(self.units.clone(), denom)
    }

    fn big_ratio(numer: BigUint, denom: BigUint) -> TimeRef {
        let g = gcd(numer.clone(), denom.clone());
        let n = &numer / &g;
        let mut d = &denom / &g;
        let two = BigUint::from(2u32);
        let five = BigUint::from(5u32);
        let mut twos = 0u32;
        let mut fives = 0u32;
        while (&d % &two) == BigUint::ZERO {
            d /= &two;
            twos += 1;
        }
        while (&d % &five) == BigUint::ZERO {
            d /= &five;
            fives += 1;
        }
        let (units, scale) = if d == BigUint::from(1u32) {
            // Terminating: n / (2^twos * 5^fives) scaled to 10^max(twos,fives).
            let scale = twos.max(fives);
            let units = n * two.pow(scale - twos) * five.pow(scale - fives);
            normalize(units, scale)
        } else {
            // Non-terminating: round half-to-even at fixed precision.
            let scale = MAX_RATIO_SCALE;
            let den = d * two.pow(twos) * five.pow(fives);
            let scaled = n * BigUint::from(10u32).pow(scale);
            let q = &scaled / &den;
            let rem = &scaled - &q * &den;
            let q = match (&rem * &two).cmp(&den) {
                Ordering::Less => q,
                Ordering::Greater => q + BigUint::from(1u32),
                Ordering::Equal => {
                    if (&q % &two) == BigUint::ZERO {
                        q
                    } else {
                        q + BigUint::from(1u32)
                    }
                }
            };
            normalize(q, scale)
        };
        let text = render(&units, scale);
        TimeRef { units, scale, text }
    }

    /// Shortest decimal form comparing equal to this value.
    pub fn shortest(&self) -> String {
        render(&self.units, self.scale)
    }

    /// The display form chosen at construction.
    pub fn text(&self) -> &str {
        &self.text
    }

    /// Approximate value for layout purposes only.
    pub fn to_f64(&self) -> f64 {
        let s = render(&self.units, self.scale);
        s.parse().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.units == BigUint::ZERO
    }
}

/// Strips trailing fractional zeros so equal values share a representation.
fn normalize(mut units: BigUint, mut scale: u32) -> (BigUint, u32) {
    let ten = BigUint::from(10u32);
    while scale > 0 && (&units % &ten) == BigUint::ZERO {
        units /= &ten;
        scale -= 1;
    }
    (units, scale)
}

fn render(units: &BigUint, scale: u32) -> String {
    let digits = units.to_string();
    if scale == 0 {
        return digits;
    }
    let scale = scale as usize;
    if digits.len() <= scale {
        let mut out = String::from("0.");
        out.extend(std::iter::repeat('0').take(scale - digits.len()));
        out.push_str(&digits);
        out
    } else {
        let (int, frac) = digits.split_at(digits.len() - scale);
        format!("{int}.{frac}")
    }
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while b != BigUint::ZERO {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

impl PartialEq for TimeRef {
    fn eq(&self, other: &Self) -> bool {
        self.scale == other.scale && self.units == other.units
    }
}

impl Eq for TimeRef {}

impl Hash for TimeRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.units.hash(state);
        self.scale.hash(state);
    }
}

impl Ord for TimeRef {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.scale == other.scale {
            return self.units.cmp(&other.units);
        }
        let max = self.scale.max(other.scale);
        let a = &self.units * BigUint::from(10u32).pow(max - self.scale);
        let b = &other.units * BigUint::from(10u32).pow(max - other.scale);
        a.cmp(&b)
    }
}

impl PartialOrd for TimeRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TimeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl fmt::Debug for TimeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeRef({})", self.text)
    }
}

impl std::str::FromStr for TimeRef {
    type Err = InvalidTime;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimeRef::parse(s)
    }
}
