//! Qualification domains: lattices with extreme points `⊥`/`⊤` and an
//! attenuation operator.
//!
//! Three chains are built in (`B`, `U`, `W`) and arbitrary nesting of
//! cartesian products. The weight domain `W` uses the *reverse* of the
//! numeric order, so its `⊤` is `0`, its `⊥` is infinity, and a glb is a
//! numeric maximum. Products are not chains; nothing here assumes that the
//! order is total.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("value `{value}` does not belong to domain {domain}")]
    Mismatch { domain: String, value: String },
    #[error("invalid literal `{literal}` for domain {domain}: {reason}")]
    Literal {
        domain: String,
        literal: String,
        reason: &'static str,
    },
    #[error("unknown domain `{0}` (expected b, u, w or prod:<d1>,<d2>)")]
    UnknownDomain(String),
}

/// Descriptor of a qualification domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    /// Classical truth values `{0,1}` with conjunction.
    Bool,
    /// Certainty values `[0,1]` with multiplication.
    Cert,
    /// Weights `[0,∞]` ordered by `≥`, with addition.
    Weight,
    Product(Box<Domain>, Box<Domain>),
}

/// An element of the weight domain.
///
/// The derived `Ord` is the *numeric* order (finite values below infinity),
/// not the domain order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weight {
    Finite(BigRational),
    Infinity,
}

/// A qualification value. Which domain it belongs to is decided by
/// [`Domain::contains`]; the derived orderings are structural only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QualValue {
    Bool(bool),
    Cert(BigRational),
    Weight(Weight),
    Pair(Box<QualValue>, Box<QualValue>),
}

impl QualValue {
    pub fn pair(left: QualValue, right: QualValue) -> Self {
        QualValue::Pair(Box::new(left), Box::new(right))
    }

    /// Exact certainty value `numer/denom`.
    pub fn cert(numer: i64, denom: i64) -> Self {
        QualValue::Cert(BigRational::new(numer.into(), denom.into()))
    }

    pub fn weight(numer: i64, denom: i64) -> Self {
        QualValue::Weight(Weight::Finite(BigRational::new(numer.into(), denom.into())))
    }

    pub fn infinity() -> Self {
        QualValue::Weight(Weight::Infinity)
    }

    /// Left and right projections of a pair value.
    pub fn components(&self) -> Option<(&QualValue, &QualValue)> {
        match self {
            QualValue::Pair(l, r) => Some((l, r)),
            _ => None,
        }
    }

    /// Renders with at least one fractional digit on exact decimals
    /// (`1.0`, `0.8`), the shape constraint-system listings expect.
    pub fn to_decimal_string(&self) -> String {
        match self {
            QualValue::Bool(b) => String::from(if *b { "1" } else { "0" }),
            QualValue::Cert(q) | QualValue::Weight(Weight::Finite(q)) => {
                let s = format_rational(q);
                if q.is_integer() {
                    format!("{s}.0")
                } else {
                    s
                }
            }
            QualValue::Weight(Weight::Infinity) => String::from("inf"),
            QualValue::Pair(l, r) => format!("({},{})", l.to_decimal_string(), r.to_decimal_string()),
        }
    }
}

impl fmt::Display for QualValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QualValue::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
            QualValue::Cert(q) => f.write_str(&format_rational(q)),
            QualValue::Weight(Weight::Finite(q)) => f.write_str(&format_rational(q)),
            QualValue::Weight(Weight::Infinity) => f.write_str("inf"),
            QualValue::Pair(l, r) => write!(f, "({l},{r})"),
        }
    }
}

/// Exact decimal expansion when the denominator divides a power of ten,
/// `n/d` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let mut denom = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let digits = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = (q * BigRational::from_integer(scale)).to_integer();
    let negative = scaled.is_negative();
    let mut text = scaled.abs().to_string();
    while text.len() <= digits as usize {
        text.insert(0, '0');
    }
    let point = text.len() - digits as usize;
    text.insert(point, '.');
    if negative {
        text.insert(0, '-');
    }
    text
}

/// Parses `123`, `0.80`, `.5` or `n/d` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_unsigned_int(n.trim())?;
        let d = parse_unsigned_int(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let int_value = if int_part.is_empty() {
        BigInt::zero()
    } else {
        parse_unsigned_int(int_part)?
    };
    if frac_part.is_empty() {
        return Some(BigRational::from_integer(int_value));
    }
    let frac_value = parse_unsigned_int(frac_part)?;
    let scale = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::from_integer(int_value) + BigRational::new(frac_value, scale))
}

fn parse_unsigned_int(text: &str) -> Option<BigInt> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(text.as_bytes(), 10)
}

fn split_pair(text: &str) -> Option<(&str, &str)> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => return Some((&inner[..i], &inner[i + 1..])),
            _ => {}
        }
    }
    None
}

impl Domain {
    pub fn product(left: Domain, right: Domain) -> Self {
        Domain::Product(Box::new(left), Box::new(right))
    }

    pub fn bot(&self) -> QualValue {
        match self {
            Domain::Bool => QualValue::Bool(false),
            Domain::Cert => QualValue::Cert(BigRational::zero()),
            Domain::Weight => QualValue::Weight(Weight::Infinity),
            Domain::Product(l, r) => QualValue::pair(l.bot(), r.bot()),
        }
    }

    pub fn top(&self) -> QualValue {
        match self {
            Domain::Bool => QualValue::Bool(true),
            Domain::Cert => QualValue::Cert(BigRational::one()),
            Domain::Weight => QualValue::Weight(Weight::Finite(BigRational::zero())),
            Domain::Product(l, r) => QualValue::pair(l.top(), r.top()),
        }
    }

    pub fn is_bot(&self, v: &QualValue) -> bool {
        *v == self.bot()
    }

    pub fn is_top(&self, v: &QualValue) -> bool {
        *v == self.top()
    }

    /// Full membership test, including the numeric range of `U` and `W`.
    pub fn contains(&self, v: &QualValue) -> bool {
        match (self, v) {
            (Domain::Bool, QualValue::Bool(_)) => true,
            (Domain::Cert, QualValue::Cert(q)) => !q.is_negative() && *q <= BigRational::one(),
            (Domain::Weight, QualValue::Weight(Weight::Infinity)) => true,
            (Domain::Weight, QualValue::Weight(Weight::Finite(q))) => !q.is_negative(),
            (Domain::Product(dl, dr), QualValue::Pair(l, r)) => dl.contains(l) && dr.contains(r),
            _ => false,
        }
    }

    fn mismatch(&self, v: &QualValue) -> DomainError {
        DomainError::Mismatch {
            domain: self.to_string(),
            value: v.to_string(),
        }
    }

    /// The domain order `a ⊑ b`.
    pub fn leq(&self, a: &QualValue, b: &QualValue) -> Result<bool, DomainError> {
        match (self, a, b) {
            (Domain::Bool, QualValue::Bool(x), QualValue::Bool(y)) => Ok(x <= y),
            (Domain::Cert, QualValue::Cert(x), QualValue::Cert(y)) => Ok(x <= y),
            // reversed: a ⊑ b iff b ≤ a numerically
            (Domain::Weight, QualValue::Weight(x), QualValue::Weight(y)) => Ok(y <= x),
            (Domain::Product(dl, dr), QualValue::Pair(al, ar), QualValue::Pair(bl, br)) => {
                Ok(dl.leq(al, bl)? && dr.leq(ar, br)?)
            }
            _ => Err(self.mismatch_of(a, b)),
        }
    }

    /// `a ⊏ b`.
    pub fn lt(&self, a: &QualValue, b: &QualValue) -> Result<bool, DomainError> {
        Ok(self.leq(a, b)? && a != b)
    }

    pub fn glb(&self, a: &QualValue, b: &QualValue) -> Result<QualValue, DomainError> {
        match (self, a, b) {
            (Domain::Bool, QualValue::Bool(x), QualValue::Bool(y)) => Ok(QualValue::Bool(*x && *y)),
            (Domain::Cert, QualValue::Cert(x), QualValue::Cert(y)) => Ok(QualValue::Cert(x.min(y).clone())),
            (Domain::Weight, QualValue::Weight(x), QualValue::Weight(y)) => {
                Ok(QualValue::Weight(x.max(y).clone()))
            }
            (Domain::Product(dl, dr), QualValue::Pair(al, ar), QualValue::Pair(bl, br)) => {
                Ok(QualValue::pair(dl.glb(al, bl)?, dr.glb(ar, br)?))
            }
            _ => Err(self.mismatch_of(a, b)),
        }
    }

    pub fn lub(&self, a: &QualValue, b: &QualValue) -> Result<QualValue, DomainError> {
        match (self, a, b) {
            (Domain::Bool, QualValue::Bool(x), QualValue::Bool(y)) => Ok(QualValue::Bool(*x || *y)),
            (Domain::Cert, QualValue::Cert(x), QualValue::Cert(y)) => Ok(QualValue::Cert(x.max(y).clone())),
            (Domain::Weight, QualValue::Weight(x), QualValue::Weight(y)) => {
                Ok(QualValue::Weight(x.min(y).clone()))
            }
            (Domain::Product(dl, dr), QualValue::Pair(al, ar), QualValue::Pair(bl, br)) => {
                Ok(QualValue::pair(dl.lub(al, bl)?, dr.lub(ar, br)?))
            }
            _ => Err(self.mismatch_of(a, b)),
        }
    }

    /// The attenuation operator `d ∘ e`.
    pub fn attenuate(&self, d: &QualValue, e: &QualValue) -> Result<QualValue, DomainError> {
        match (self, d, e) {
            (Domain::Bool, QualValue::Bool(x), QualValue::Bool(y)) => Ok(QualValue::Bool(*x && *y)),
            (Domain::Cert, QualValue::Cert(x), QualValue::Cert(y)) => Ok(QualValue::Cert(x * y)),
            (Domain::Weight, QualValue::Weight(x), QualValue::Weight(y)) => Ok(QualValue::Weight(match (x, y) {
                (Weight::Finite(x), Weight::Finite(y)) => Weight::Finite(x + y),
                _ => Weight::Infinity,
            })),
            (Domain::Product(dl, dr), QualValue::Pair(al, ar), QualValue::Pair(bl, br)) => {
                Ok(QualValue::pair(dl.attenuate(al, bl)?, dr.attenuate(ar, br)?))
            }
            _ => Err(self.mismatch_of(d, e)),
        }
    }

    /// `⊓S`, which is `⊤` for the empty set.
    pub fn big_glb<'a, I>(&self, values: I) -> Result<QualValue, DomainError>
    where
        I: IntoIterator<Item = &'a QualValue>,
    {
        values
            .into_iter()
            .try_fold(self.top(), |acc, v| self.glb(&acc, v))
    }

    fn mismatch_of(&self, a: &QualValue, b: &QualValue) -> DomainError {
        if self.shape_matches(a) {
            self.mismatch(b)
        } else {
            self.mismatch(a)
        }
    }

    fn shape_matches(&self, v: &QualValue) -> bool {
        match (self, v) {
            (Domain::Bool, QualValue::Bool(_))
            | (Domain::Cert, QualValue::Cert(_))
            | (Domain::Weight, QualValue::Weight(_)) => true,
            (Domain::Product(dl, dr), QualValue::Pair(l, r)) => dl.shape_matches(l) && dr.shape_matches(r),
            _ => false,
        }
    }

    /// Parses a value literal: `0|1` for `B`, a decimal in `[0,1]` for `U`,
    /// a decimal or `inf` for `W`, `(l,r)` for products. Fractions `n/d`
    /// are accepted wherever decimals are.
    pub fn parse_value(&self, literal: &str) -> Result<QualValue, DomainError> {
        let text = literal.trim();
        let fail = |reason| DomainError::Literal {
            domain: self.to_string(),
            literal: String::from(text),
            reason,
        };
        match self {
            Domain::Bool => match text {
                "0" => Ok(QualValue::Bool(false)),
                "1" => Ok(QualValue::Bool(true)),
                _ => Err(fail("boolean values are 0 or 1")),
            },
            Domain::Cert => {
                let q = parse_rational(text).ok_or_else(|| fail("not a decimal number"))?;
                if q > BigRational::one() {
                    return Err(fail("certainty values lie in [0,1]"));
                }
                Ok(QualValue::Cert(q))
            }
            Domain::Weight => {
                if text == "inf" {
                    return Ok(QualValue::infinity());
                }
                let q = parse_rational(text).ok_or_else(|| fail("not a decimal number or `inf`"))?;
                Ok(QualValue::Weight(Weight::Finite(q)))
            }
            Domain::Product(dl, dr) => {
                let (l, r) = split_pair(text).ok_or_else(|| fail("product values are written `(l,r)`"))?;
                Ok(QualValue::pair(dl.parse_value(l)?, dr.parse_value(r)?))
            }
        }
    }

    /// Operator symbol used when rendering constraints.
    pub fn op_symbol(&self) -> String {
        match self {
            Domain::Bool => String::from("&"),
            Domain::Cert => String::from("*"),
            Domain::Weight => String::from("+"),
            Domain::Product(l, r) => format!("({},{})", l.op_symbol(), r.op_symbol()),
        }
    }

    /// True for `B`, `U` and `W`, whose order is total.
    pub fn is_chain(&self) -> bool {
        !matches!(self, Domain::Product(..))
    }

    fn parse_prefix(text: &str) -> Result<(Domain, &str), DomainError> {
        let unknown = || DomainError::UnknownDomain(String::from(text));
        let t = text.trim_start();
        if let Some(rest) = t.strip_prefix("prod:") {
            let (left, rest) = Self::parse_prefix(rest)?;
            let rest = rest.trim_start().strip_prefix(',').ok_or_else(unknown)?;
            let (right, rest) = Self::parse_prefix(rest)?;
            return Ok((Domain::product(left, right), rest));
        }
        let end = t.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(t.len());
        let domain = match t[..end].to_ascii_lowercase().as_str() {
            "b" => Domain::Bool,
            "u" => Domain::Cert,
            "w" => Domain::Weight,
            _ => return Err(unknown()),
        };
        Ok((domain, &t[end..]))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool => f.write_str("b"),
            Domain::Cert => f.write_str("u"),
            Domain::Weight => f.write_str("w"),
            Domain::Product(l, r) => write!(f, "prod:{l},{r}"),
        }
    }
}

impl FromStr for Domain {
    type Err = DomainError;

    /// `b`, `u`, `w` or `prod:<d1>,<d2>` with recursive components.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (domain, rest) = Domain::parse_prefix(s)?;
        if rest.trim().is_empty() {
            Ok(domain)
        } else {
            Err(DomainError::UnknownDomain(String::from(s)))
        }
    }
}
