use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Branch multiplicity: exact while it fits in `2^512`, natural log beyond.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplicity {
    Exact(BigUint),
    Log(f64),
}

impl Multiplicity {
    pub const EXACT_BITS: u64 = 512;

    /// Wraps a big integer, switching to log-space above `2^512`.
    pub fn from_big(n: BigUint) -> Self {
        if n.bits() > Self::EXACT_BITS {
            Multiplicity::Log(ln_big(&n))
        } else {
            Multiplicity::Exact(n)
        }
    }

    pub fn one() -> Self {
        Multiplicity::Exact(BigUint::from(1u32))
    }

    pub fn from_u64(n: u64) -> Self {
        Multiplicity::Exact(BigUint::from(n))
    }

    /// `ln N`, `-∞` for a zero count.
    pub fn ln(&self) -> f64 {
        match self {
            Multiplicity::Exact(n) => {
                if n.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    ln_big(n)
                }
            }
            Multiplicity::Log(l) => *l,
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Multiplicity::Exact(n) => Some(n),
            Multiplicity::Log(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Multiplicity::Exact(n) if n.is_zero())
    }
}

/// Natural log of a big integer from its leading 64 bits.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_u64().map(|v| (v as f64).ln()).unwrap_or(f64::NEG_INFINITY);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 leading bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Text(String),
    Int(u64),
    Log { ln: f64 },
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Exact(n) => Repr::Text(n.to_str_radix(10)).serialize(s),
            Multiplicity::Log(l) => Repr::Log { ln: *l }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Text(t) => BigUint::parse_bytes(t.as_bytes(), 10)
                .map(Multiplicity::Exact)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid count {t:?}"))),
            Repr::Int(v) => Ok(Multiplicity::from_u64(v)),
            Repr::Log { ln } => Ok(Multiplicity::Log(ln)),
        }
    }
}
