//! Primitive literals and builtin operations.
//!
//! Integers (money) are arbitrary precision and signed; naturals (addresses,
//! slots) are arbitrary precision and unsigned. Builtins are binary and are
//! exposed to programs as global constants.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Name of the inductive that comparison builtins return.
pub const BOOL: &str = "Bool";
pub const TRUE: &str = "True";
pub const FALSE: &str = "False";

/// A primitive literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrimVal {
    Int(BigInt),
    Nat(BigUint),
}

impl PrimVal {
    pub fn int(v: impl Into<BigInt>) -> Self {
        PrimVal::Int(v.into())
    }

    pub fn nat(v: impl Into<BigUint>) -> Self {
        PrimVal::Nat(v.into())
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            PrimVal::Int(i) => Some(i),
            PrimVal::Nat(_) => None,
        }
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            PrimVal::Nat(n) => Some(n),
            PrimVal::Int(_) => None,
        }
    }
}

impl fmt::Display for PrimVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimVal::Int(i) => write!(f, "{i}z"),
            PrimVal::Nat(n) => write!(f, "{n}"),
        }
    }
}

// JSON form: {"tag": "PInt", "value": "-5"}; values are decimal strings so
// that arbitrary precision survives round-trips.
#[derive(Serialize, Deserialize)]
#[serde(tag = "tag")]
enum PrimRepr {
    PInt { value: String },
    PNat { value: String },
}

impl Serialize for PrimVal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            PrimVal::Int(i) => PrimRepr::PInt { value: i.to_string() },
            PrimVal::Nat(n) => PrimRepr::PNat { value: n.to_string() },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrimVal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match PrimRepr::deserialize(d)? {
            PrimRepr::PInt { value } => value
                .parse()
                .map(PrimVal::Int)
                .map_err(|e| D::Error::custom(format!("bad integer literal {value:?}: {e}"))),
            PrimRepr::PNat { value } => value
                .parse()
                .map(PrimVal::Nat)
                .map_err(|e| D::Error::custom(format!("bad natural literal {value:?}: {e}"))),
        }
    }
}

/// Builtin binary operations on primitive literals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PrimOp {
    AddInt,
    SubInt,
    MulInt,
    MaxInt,
    LtInt,
    LeInt,
    EqInt,
    AddNat,
    LebNat,
    LtbNat,
    EqbNat,
}

/// Result of a fully applied builtin: either a literal or a boolean that the
/// caller encodes as a `Bool` constructor in its own representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimOutcome {
    Lit(PrimVal),
    Bool(bool),
}

impl PrimOp {
    pub const ALL: [PrimOp; 11] = [
        PrimOp::AddInt,
        PrimOp::SubInt,
        PrimOp::MulInt,
        PrimOp::MaxInt,
        PrimOp::LtInt,
        PrimOp::LeInt,
        PrimOp::EqInt,
        PrimOp::AddNat,
        PrimOp::LebNat,
        PrimOp::LtbNat,
        PrimOp::EqbNat,
    ];

    /// Canonical constant name under which the stdlib exposes the builtin.
    pub fn name(self) -> &'static str {
        match self {
            PrimOp::AddInt => "addInt",
            PrimOp::SubInt => "subInt",
            PrimOp::MulInt => "mulInt",
            PrimOp::MaxInt => "maxInt",
            PrimOp::LtInt => "ltInt",
            PrimOp::LeInt => "leInt",
            PrimOp::EqInt => "eqInt",
            PrimOp::AddNat => "addNat",
            PrimOp::LebNat => "lebNat",
            PrimOp::LtbNat => "ltbNat",
            PrimOp::EqbNat => "eqbNat",
        }
    }

    pub fn arity(self) -> usize {
        2
    }

    /// Applies the operation. `None` means the arguments have the wrong
    /// shape (wrong literal kind or wrong count).
    pub fn apply(self, args: &[&PrimVal]) -> Option<PrimOutcome> {
        let [a, b] = args else { return None };
        match self {
            PrimOp::AddInt | PrimOp::SubInt | PrimOp::MulInt | PrimOp::MaxInt => {
                let (a, b) = (a.as_int()?, b.as_int()?);
                let r = match self {
                    PrimOp::AddInt => a + b,
                    PrimOp::SubInt => a - b,
                    PrimOp::MulInt => a * b,
                    _ => a.max(b).clone(),
                };
                Some(PrimOutcome::Lit(PrimVal::Int(r)))
            }
            PrimOp::LtInt => Some(PrimOutcome::Bool(a.as_int()? < b.as_int()?)),
            PrimOp::LeInt => Some(PrimOutcome::Bool(a.as_int()? <= b.as_int()?)),
            PrimOp::EqInt => Some(PrimOutcome::Bool(a.as_int()? == b.as_int()?)),
            PrimOp::AddNat => Some(PrimOutcome::Lit(PrimVal::Nat(a.as_nat()? + b.as_nat()?))),
            PrimOp::LebNat => Some(PrimOutcome::Bool(a.as_nat()? <= b.as_nat()?)),
            PrimOp::LtbNat => Some(PrimOutcome::Bool(a.as_nat()? < b.as_nat()?)),
            PrimOp::EqbNat => Some(PrimOutcome::Bool(a.as_nat()? == b.as_nat()?)),
        }
    }
}

/// True for a non-negative integer literal.
pub fn is_non_negative(v: &BigInt) -> bool {
    v.sign() != num_bigint::Sign::Minus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keeps_big_values() {
        let v = PrimVal::int(BigInt::parse_bytes(b"-123456789012345678901234567890", 10).unwrap());
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"tag":"PInt","value":"-123456789012345678901234567890"}"#);
        assert_eq!(serde_json::from_str::<PrimVal>(&s).unwrap(), v);
    }

    #[test]
    fn builtins_check_literal_kinds() {
        let one = PrimVal::int(1);
        let n = PrimVal::nat(1u32);
        assert_eq!(PrimOp::AddInt.apply(&[&one, &one]), Some(PrimOutcome::Lit(PrimVal::int(2))));
        assert_eq!(PrimOp::AddInt.apply(&[&one, &n]), None);
        assert_eq!(PrimOp::LtbNat.apply(&[&n, &n]), Some(PrimOutcome::Bool(false)));
        assert_eq!(PrimOp::MaxInt.apply(&[&PrimVal::int(-3), &one]), Some(PrimOutcome::Lit(one.clone())));
        assert_eq!(PrimOp::AddInt.apply(&[&one]), None);
    }
}
