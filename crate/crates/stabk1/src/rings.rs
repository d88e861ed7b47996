//! Exact arithmetic for a tower of concrete commutative rings.
//!
//! Supported rings: the integers, Z/n, prime fields, single-variable
//! polynomial rings over any supported base (nest for more variables), and
//! localizations A_s at a non-nilpotent element s. Every element is kept in a
//! canonical form, so equal elements have identical representations and
//! equality is plain structural equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::fmt;
use thiserror::Error;

/// Errors produced by ring construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("localizer must be a non-nilpotent element of the base ring")]
    NilpotentLocalizer,
    #[error("localization over base {0} is not supported")]
    UnsupportedLocalizationBase(String),
    #[error("operation requires the {0} capability, which {1} lacks")]
    MissingCapability(&'static str, String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element is not a unit")]
    NotAUnit,
}

pub type Result<T> = std::result::Result<T, RingError>;

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, ascending primes.
fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.checked_mul(p).map_or(false, |sq| sq <= n) {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A concrete commutative ring.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingDescriptor {
    Integers,
    IntegersMod(u64),
    PrimeField(u64),
    PolynomialRing(Box<RingDescriptor>, String),
    Localization(Box<RingDescriptor>, Box<RingElement>),
}

use RingDescriptor::*;

impl RingDescriptor {
    pub fn integers() -> Self {
        Integers
    }

    pub fn integers_mod(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(RingError::BadModulus(n));
        }
        Ok(IntegersMod(n))
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(PrimeField(p))
    }

    pub fn polynomial(base: RingDescriptor, var: &str) -> Result<Self> {
        base.validate()?;
        if var.is_empty() {
            return Err(RingError::Parse("empty variable name".into()));
        }
        Ok(PolynomialRing(Box::new(base), var.to_string()))
    }

    pub fn localization(base: RingDescriptor, s: RingElement) -> Result<Self> {
        base.validate()?;
        if s.ring != base {
            return Err(RingError::RingMismatch(s.ring.to_string(), base.to_string()));
        }
        match &base {
            Integers => {
                if s.is_zero() {
                    return Err(RingError::NilpotentLocalizer);
                }
            }
            IntegersMod(_) | PrimeField(_) => {
                if s.is_nilpotent() {
                    return Err(RingError::NilpotentLocalizer);
                }
            }
            PolynomialRing(inner, _) if **inner == Integers || matches!(**inner, PrimeField(_)) => {
                if s.is_zero() {
                    return Err(RingError::NilpotentLocalizer);
                }
            }
            other => {
                return Err(RingError::UnsupportedLocalizationBase(other.to_string()));
            }
        }
        Ok(Localization(Box::new(base), Box::new(s)))
    }

    /// Re-checks the construction invariants of the whole tower.
    pub fn validate(&self) -> Result<()> {
        match self {
            Integers => Ok(()),
            IntegersMod(n) => {
                if *n < 2 {
                    Err(RingError::BadModulus(*n))
                } else {
                    Ok(())
                }
            }
            PrimeField(p) => {
                if is_prime_u64(*p) {
                    Ok(())
                } else {
                    Err(RingError::NotPrime(*p))
                }
            }
            PolynomialRing(base, _) => base.validate(),
            Localization(base, s) => {
                RingDescriptor::localization((**base).clone(), (**s).clone())?;
                Ok(())
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Integers => false,
            IntegersMod(_) | PrimeField(_) => true,
            PolynomialRing(..) => false,
            Localization(base, _) => base.is_finite(),
        }
    }

    /// Number of elements for finite rings. For a finite localization this is
    /// an upper bound (the size of the base); use `enumerate` for the exact
    /// count.
    pub fn cardinality_bound(&self) -> Option<u64> {
        match self {
            IntegersMod(n) => Some(*n),
            PrimeField(p) => Some(*p),
            Localization(base, _) => base.cardinality_bound(),
            _ => None,
        }
    }

    /// Euclidean division is available: Z, prime fields, and one-variable
    /// polynomials over a prime field.
    pub fn is_euclidean(&self) -> bool {
        match self {
            Integers | PrimeField(_) => true,
            PolynomialRing(base, _) => matches!(**base, PrimeField(_)),
            _ => false,
        }
    }

    /// Integral domain test, used to pick determinant algorithms.
    pub fn is_domain(&self) -> bool {
        match self {
            Integers | PrimeField(_) => true,
            IntegersMod(n) => is_prime_u64(*n),
            PolynomialRing(base, _) => base.is_domain(),
            Localization(base, _) => base.is_domain(),
        }
    }

    /// CRT decomposition into more than one factor is available.
    pub fn has_crt(&self) -> bool {
        match self {
            IntegersMod(n) => factorize_u64(*n).len() > 1,
            _ => false,
        }
    }

    pub fn zero(&self) -> RingElement {
        match self {
            Integers => RingElement::make(self.clone(), ValueRepr::Int(BigInt::zero())),
            IntegersMod(_) | PrimeField(_) => RingElement::make(self.clone(), ValueRepr::Res(0)),
            PolynomialRing(..) => RingElement::make(self.clone(), ValueRepr::Poly(vec![])),
            Localization(base, _) => RingElement::make(
                self.clone(),
                ValueRepr::Frac(Box::new(base.zero()), 0),
            ),
        }
    }

    pub fn one(&self) -> RingElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElement {
        match self {
            Integers => RingElement::make(self.clone(), ValueRepr::Int(BigInt::from(v))),
            IntegersMod(n) | PrimeField(n) => {
                let m = *n as i128;
                let r = ((v as i128 % m) + m) % m;
                RingElement::make(self.clone(), ValueRepr::Res(r as u64))
            }
            PolynomialRing(base, _) => {
                RingElement::make(self.clone(), ValueRepr::Poly(vec![base.from_i64(v)]))
            }
            Localization(base, _) => RingElement::make(
                self.clone(),
                ValueRepr::Frac(Box::new(base.from_i64(v)), 0),
            ),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> RingElement {
        match self {
            Integers => RingElement::make(self.clone(), ValueRepr::Int(v.clone())),
            IntegersMod(n) | PrimeField(n) => {
                let m = BigInt::from(*n);
                let r = ((v % &m) + &m) % &m;
                let r: u64 = r.try_into().expect("reduced residue fits");
                RingElement::make(self.clone(), ValueRepr::Res(r))
            }
            PolynomialRing(base, _) => {
                RingElement::make(self.clone(), ValueRepr::Poly(vec![base.from_bigint(v)]))
            }
            Localization(base, _) => RingElement::make(
                self.clone(),
                ValueRepr::Frac(Box::new(base.from_bigint(v)), 0),
            ),
        }
    }

    /// Polynomial with the given coefficients, low degree first.
    pub fn from_coeffs(&self, coeffs: Vec<RingElement>) -> Result<RingElement> {
        match self {
            PolynomialRing(base, _) => {
                for c in &coeffs {
                    if c.ring != **base {
                        return Err(RingError::RingMismatch(
                            c.ring.to_string(),
                            base.to_string(),
                        ));
                    }
                }
                Ok(RingElement::make(self.clone(), ValueRepr::Poly(coeffs)))
            }
            _ => Err(RingError::Parse(format!("{self} is not a polynomial ring"))),
        }
    }

    /// Fraction num / s^pow for a localization ring.
    pub fn frac(&self, num: RingElement, pow: u32) -> Result<RingElement> {
        match self {
            Localization(base, _) => {
                if num.ring != **base {
                    return Err(RingError::RingMismatch(
                        num.ring.to_string(),
                        base.to_string(),
                    ));
                }
                Ok(RingElement::make(self.clone(), ValueRepr::Frac(Box::new(num), pow)))
            }
            _ => Err(RingError::Parse(format!("{self} is not a localization"))),
        }
    }

    /// Every element exactly once, in a fixed deterministic order.
    pub fn enumerate(&self) -> Result<Vec<RingElement>> {
        match self {
            IntegersMod(n) | PrimeField(n) => Ok((0..*n)
                .map(|v| RingElement::make(self.clone(), ValueRepr::Res(v)))
                .collect()),
            Localization(base, _) => {
                let mut seen = std::collections::BTreeSet::new();
                for b in base.enumerate()? {
                    seen.insert(self.frac(b, 0).expect("base element"));
                }
                Ok(seen.into_iter().collect())
            }
            _ => Err(RingError::MissingCapability("finite", self.to_string())),
        }
    }

    /// Deterministic candidate stream for searches: the enumeration order for
    /// finite rings, the spiral 0, 1, -1, 2, -2, ... for the integers.
    pub fn search_candidates(&self) -> Result<Box<dyn Iterator<Item = RingElement>>> {
        if self.is_finite() {
            Ok(Box::new(self.enumerate()?.into_iter()))
        } else if *self == Integers {
            let ring = self.clone();
            Ok(Box::new((0u64..).map(move |k| {
                let v = if k == 0 {
                    BigInt::zero()
                } else if k % 2 == 1 {
                    BigInt::from((k + 1) / 2)
                } else {
                    -BigInt::from(k / 2)
                };
                RingElement::make(ring.clone(), ValueRepr::Int(v))
            })))
        } else {
            Err(RingError::MissingCapability("searchable", self.to_string()))
        }
    }

    /// CRT decomposition of Z/n into prime-power components, ascending primes.
    pub fn crt_decompose(&self) -> Result<Vec<CrtComponent>> {
        let n = match self {
            IntegersMod(n) => *n,
            _ => return Err(RingError::MissingCapability("crt", self.to_string())),
        };
        let mut comps = Vec::new();
        for (p, e) in factorize_u64(n) {
            let q = p.pow(e);
            let m = n / q;
            // Idempotent congruent to 1 mod q and 0 mod n/q.
            let inv = inverse_mod_u64(m % q, q).expect("m and q are coprime");
            let idem = ((m as u128 * inv as u128) % n as u128) as u64;
            comps.push(CrtComponent {
                parent: self.clone(),
                ring: IntegersMod(q),
                modulus: q,
                idempotent: RingElement::make(self.clone(), ValueRepr::Res(idem)),
            });
        }
        Ok(comps)
    }

    // JSON descriptors: {"type":"Z"} | {"type":"Zmod","n":6} | {"type":"Fp","p":5}
    // | {"type":"Poly","base":...,"var":"X"} | {"type":"Loc","base":...,"s":...}.
    pub fn to_json(&self) -> Value {
        match self {
            Integers => json!({"type": "Z"}),
            IntegersMod(n) => json!({"type": "Zmod", "n": n}),
            PrimeField(p) => json!({"type": "Fp", "p": p}),
            PolynomialRing(base, var) => json!({"type": "Poly", "base": base.to_json(), "var": var}),
            Localization(base, s) => {
                json!({"type": "Loc", "base": base.to_json(), "s": s.to_json()})
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| RingError::Parse("ring descriptor must be an object".into()))?;
        let ty = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| RingError::Parse("ring descriptor needs a \"type\" field".into()))?;
        match ty {
            "Z" => Ok(Integers),
            "Zmod" => {
                let n = obj
                    .get("n")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| RingError::Parse("Zmod needs integer \"n\"".into()))?;
                RingDescriptor::integers_mod(n)
            }
            "Fp" => {
                let p = obj
                    .get("p")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| RingError::Parse("Fp needs integer \"p\"".into()))?;
                RingDescriptor::prime_field(p)
            }
            "Poly" => {
                let base = RingDescriptor::from_json(
                    obj.get("base")
                        .ok_or_else(|| RingError::Parse("Poly needs \"base\"".into()))?,
                )?;
                let var = obj
                    .get("var")
                    .and_then(Value::as_str)
                    .ok_or_else(|| RingError::Parse("Poly needs string \"var\"".into()))?;
                RingDescriptor::polynomial(base, var)
            }
            "Loc" => {
                let base = RingDescriptor::from_json(
                    obj.get("base")
                        .ok_or_else(|| RingError::Parse("Loc needs \"base\"".into()))?,
                )?;
                let s = base.element_from_json(
                    obj.get("s")
                        .ok_or_else(|| RingError::Parse("Loc needs \"s\"".into()))?,
                )?;
                RingDescriptor::localization(base, s)
            }
            other => Err(RingError::Parse(format!("unknown ring type {other:?}"))),
        }
    }

    /// Parses an element: decimal strings for integer-like rings, coefficient
    /// arrays (low degree first) for polynomials, {"num":..., "pow":k} for
    /// localizations (a bare base element is accepted as power 0).
    pub fn element_from_json(&self, v: &Value) -> Result<RingElement> {
        match self {
            Integers => {
                let s = json_number_string(v)?;
                let n = s
                    .parse::<BigInt>()
                    .map_err(|_| RingError::Parse(format!("bad integer {s:?}")))?;
                Ok(RingElement::make(self.clone(), ValueRepr::Int(n)))
            }
            IntegersMod(n) | PrimeField(n) => {
                let s = json_number_string(v)?;
                let x = s
                    .parse::<BigInt>()
                    .map_err(|_| RingError::Parse(format!("bad residue {s:?}")))?;
                let m = BigInt::from(*n);
                let r = ((x % &m) + &m) % &m;
                let r: u64 = r.try_into().expect("reduced residue fits");
                Ok(RingElement::make(self.clone(), ValueRepr::Res(r)))
            }
            PolynomialRing(base, _) => match v {
                Value::Array(items) => {
                    let coeffs = items
                        .iter()
                        .map(|c| base.element_from_json(c))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(RingElement::make(self.clone(), ValueRepr::Poly(coeffs)))
                }
                // Constant shorthand.
                other => {
                    let c = base.element_from_json(other)?;
                    Ok(RingElement::make(self.clone(), ValueRepr::Poly(vec![c])))
                }
            },
            Localization(base, _) => match v {
                Value::Object(obj) if obj.contains_key("num") => {
                    let num = base.element_from_json(&obj["num"])?;
                    let pow = obj
                        .get("pow")
                        .and_then(Value::as_u64)
                        .ok_or_else(|| RingError::Parse("fraction needs integer \"pow\"".into()))?;
                    Ok(RingElement::make(
                        self.clone(),
                        ValueRepr::Frac(Box::new(num), pow as u32),
                    ))
                }
                other => {
                    let num = base.element_from_json(other)?;
                    Ok(RingElement::make(self.clone(), ValueRepr::Frac(Box::new(num), 0)))
                }
            },
        }
    }
}

fn json_number_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(RingError::Parse(format!(
            "expected a decimal string, got {other}"
        ))),
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integers => write!(f, "Z"),
            IntegersMod(n) => write!(f, "Z/{n}"),
            PrimeField(p) => write!(f, "F_{p}"),
            PolynomialRing(base, var) => write!(f, "{base}[{var}]"),
            Localization(base, s) => write!(f, "{base}[1/{s}]"),
        }
    }
}

/// One prime-power factor of Z/n together with its orthogonal idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtComponent {
    pub parent: RingDescriptor,
    pub ring: RingDescriptor,
    pub modulus: u64,
    /// Element of the parent ring, congruent to 1 in this factor and 0 in the
    /// others. The idempotents of a decomposition sum to 1.
    pub idempotent: RingElement,
}

impl CrtComponent {
    /// Image of a parent element in this factor.
    pub fn project(&self, x: &RingElement) -> Result<RingElement> {
        if x.ring != self.parent {
            return Err(RingError::RingMismatch(
                x.ring.to_string(),
                self.parent.to_string(),
            ));
        }
        match &x.value {
            ValueRepr::Res(v) => Ok(RingElement::make(
                self.ring.clone(),
                ValueRepr::Res(v % self.modulus),
            )),
            _ => unreachable!("crt parents are Z/n"),
        }
    }

    /// Canonical lift (residue value) of a factor element into the parent.
    pub fn lift(&self, x: &RingElement) -> Result<RingElement> {
        if x.ring != self.ring {
            return Err(RingError::RingMismatch(
                x.ring.to_string(),
                self.ring.to_string(),
            ));
        }
        match &x.value {
            ValueRepr::Res(v) => Ok(RingElement::make(self.parent.clone(), ValueRepr::Res(*v))),
            _ => unreachable!(),
        }
    }
}

fn inverse_mod_u64(a: u64, n: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        let tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        let tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if old_r.abs() != 1 {
        return None;
    }
    let inv = old_s * old_r.signum();
    Some(inv.rem_euclid(n as i128) as u64)
}

/// Canonical value payload of a ring element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueRepr {
    /// Integer.
    Int(BigInt),
    /// Residue in [0, n).
    Res(u64),
    /// Coefficients, low degree first, trailing zeros stripped; empty = 0.
    Poly(Vec<RingElement>),
    /// num / s^pow in lowest admissible power (finite bases always power 0).
    Frac(Box<RingElement>, u32),
}

/// An element of a described ring, always in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingElement {
    pub(crate) ring: RingDescriptor,
    pub(crate) value: ValueRepr,
}

impl RingElement {
    /// Builds the canonical representative for the given raw value.
    pub(crate) fn make(ring: RingDescriptor, value: ValueRepr) -> RingElement {
        let value = canonicalize(&ring, value);
        RingElement { ring, value }
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn value(&self) -> &ValueRepr {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            ValueRepr::Int(v) => v.is_zero(),
            ValueRepr::Res(v) => *v == 0,
            ValueRepr::Poly(c) => c.is_empty(),
            ValueRepr::Frac(num, _) => num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring.one()
    }

    fn check_same_ring(&self, other: &RingElement) -> Result<()> {
        if self.ring != other.ring {
            return Err(RingError::RingMismatch(
                self.ring.to_string(),
                other.ring.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.check_same_ring(other)?;
        let value = match (&self.value, &other.value) {
            (ValueRepr::Int(a), ValueRepr::Int(b)) => ValueRepr::Int(a + b),
            (ValueRepr::Res(a), ValueRepr::Res(b)) => {
                let n = modulus_of(&self.ring);
                ValueRepr::Res(((*a as u128 + *b as u128) % n as u128) as u64)
            }
            (ValueRepr::Poly(a), ValueRepr::Poly(b)) => {
                let base = poly_base(&self.ring);
                let len = a.len().max(b.len());
                let mut out = Vec::with_capacity(len);
                for i in 0..len {
                    let x = a.get(i).cloned().unwrap_or_else(|| base.zero());
                    let y = b.get(i).cloned().unwrap_or_else(|| base.zero());
                    out.push(x.add(&y)?);
                }
                ValueRepr::Poly(out)
            }
            (ValueRepr::Frac(a, i), ValueRepr::Frac(b, j)) => {
                let s = loc_s(&self.ring);
                let m = (*i).max(*j);
                let x = a.mul(&s.pow(u64::from(m - i))?)?;
                let y = b.mul(&s.pow(u64::from(m - j))?)?;
                ValueRepr::Frac(Box::new(x.add(&y)?), m)
            }
            _ => unreachable!("same ring, same repr"),
        };
        Ok(RingElement::make(self.ring.clone(), value))
    }

    pub fn neg(&self) -> RingElement {
        let value = match &self.value {
            ValueRepr::Int(a) => ValueRepr::Int(-a),
            ValueRepr::Res(a) => {
                let n = modulus_of(&self.ring);
                ValueRepr::Res(if *a == 0 { 0 } else { n - *a })
            }
            ValueRepr::Poly(c) => ValueRepr::Poly(c.iter().map(RingElement::neg).collect()),
            ValueRepr::Frac(num, p) => ValueRepr::Frac(Box::new(num.neg()), *p),
        };
        RingElement::make(self.ring.clone(), value)
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check_same_ring(other)?;
        let value = match (&self.value, &other.value) {
            (ValueRepr::Int(a), ValueRepr::Int(b)) => ValueRepr::Int(a * b),
            (ValueRepr::Res(a), ValueRepr::Res(b)) => {
                let n = modulus_of(&self.ring);
                ValueRepr::Res(((*a as u128 * *b as u128) % n as u128) as u64)
            }
            (ValueRepr::Poly(a), ValueRepr::Poly(b)) => {
                if a.is_empty() || b.is_empty() {
                    ValueRepr::Poly(vec![])
                } else {
                    let base = poly_base(&self.ring);
                    let mut out = vec![base.zero(); a.len() + b.len() - 1];
                    for (i, x) in a.iter().enumerate() {
                        for (j, y) in b.iter().enumerate() {
                            out[i + j] = out[i + j].add(&x.mul(y)?)?;
                        }
                    }
                    ValueRepr::Poly(out)
                }
            }
            (ValueRepr::Frac(a, i), ValueRepr::Frac(b, j)) => {
                ValueRepr::Frac(Box::new(a.mul(b)?), i + j)
            }
            _ => unreachable!(),
        };
        Ok(RingElement::make(self.ring.clone(), value))
    }

    pub fn pow(&self, e: u64) -> Result<RingElement> {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse when the element is a unit, `None` otherwise.
    pub fn inverse(&self) -> Option<RingElement> {
        match (&self.ring, &self.value) {
            (Integers, ValueRepr::Int(v)) => {
                if v.abs().is_one() {
                    Some(self.clone())
                } else {
                    None
                }
            }
            (IntegersMod(n) | PrimeField(n), ValueRepr::Res(a)) => {
                inverse_mod_u64(*a, *n).map(|i| RingElement::make(self.ring.clone(), ValueRepr::Res(i)))
            }
            (PolynomialRing(..), ValueRepr::Poly(c)) => {
                // Unit iff the constant term is a unit and every higher
                // coefficient is nilpotent; invert by the finite geometric
                // series against the nilpotent part.
                if c.is_empty() {
                    return None;
                }
                let c0inv = c[0].inverse()?;
                if !c.iter().skip(1).all(RingElement::is_nilpotent) {
                    return None;
                }
                let one = self.ring.one();
                let c0inv_poly =
                    RingElement::make(self.ring.clone(), ValueRepr::Poly(vec![c0inv]));
                let nu = self.mul(&c0inv_poly).ok()?.sub(&one).ok()?; // nilpotent
                // inverse = c0inv * sum_k (-nu)^k, a finite sum.
                let mut sum = one.clone();
                let mut term = one;
                let mut guard = 0usize;
                loop {
                    term = term.mul(&nu.neg()).ok()?;
                    if term.is_zero() {
                        break;
                    }
                    sum = sum.add(&term).ok()?;
                    guard += 1;
                    if guard > 512 {
                        return None;
                    }
                }
                let inv = sum.mul(&c0inv_poly).ok()?;
                // Exactness check; guards the nilpotency reasoning.
                if self.mul(&inv).ok()?.is_one() {
                    Some(inv)
                } else {
                    None
                }
            }
            (Localization(base, s), ValueRepr::Frac(num, pow)) => {
                if num.is_zero() {
                    return None;
                }
                if base.is_finite() {
                    // Normal form lives in the idempotent subring eA; x is a
                    // unit iff some power of x equals e, and the previous
                    // power is the inverse.
                    let (e, _) = loc_normal_data(base, s)?;
                    let bound = base.cardinality_bound().unwrap_or(4096) + 2;
                    let mut p = num.clone();
                    for _ in 0..bound {
                        let next = p.mul(num).ok()?;
                        if next == e {
                            return Some(RingElement::make(
                                self.ring.clone(),
                                ValueRepr::Frac(p, 0),
                            ));
                        }
                        p = Box::new(next.clone());
                        if next.is_zero() {
                            return None;
                        }
                    }
                    if **num == e {
                        return Some(self.clone());
                    }
                    None
                } else {
                    // Domain base: num / s^pow is a unit iff num divides some
                    // power of s; then s^t = num * b and the inverse is
                    // b * s^pow / s^t.
                    for t in 0..128u32 {
                        let st = s.pow(u64::from(t)).ok()?;
                        if let Some(b) = try_exact_div_base(&st, num) {
                            let numerator = b.mul(&s.pow(u64::from(*pow)).ok()?).ok()?;
                            return Some(RingElement::make(
                                self.ring.clone(),
                                ValueRepr::Frac(Box::new(numerator), t),
                            ));
                        }
                    }
                    None
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.inverse().is_some()
    }

    /// Exact nilpotency test for the supported rings.
    pub fn is_nilpotent(&self) -> bool {
        match (&self.ring, &self.value) {
            (Integers, _) => self.is_zero(),
            (PrimeField(_), _) => self.is_zero(),
            (IntegersMod(n), ValueRepr::Res(_)) => {
                let mut x = self.clone();
                for _ in 0..=*n {
                    if x.is_zero() {
                        return true;
                    }
                    x = x.mul(self).expect("same ring");
                    if x == *self {
                        // Cycle without reaching zero.
                        return self.is_zero();
                    }
                }
                x.is_zero()
            }
            (PolynomialRing(..), ValueRepr::Poly(c)) => c.iter().all(RingElement::is_nilpotent),
            (Localization(base, _), ValueRepr::Frac(num, _)) => {
                if base.is_domain() {
                    self.is_zero()
                } else {
                    // Normal form: zero in A_s iff the eA component is zero.
                    num.is_zero() || {
                        let bound = base.cardinality_bound().unwrap_or(4096) + 2;
                        let mut x = (**num).clone();
                        let mut k = 0u64;
                        loop {
                            if x.is_zero() {
                                return true;
                            }
                            x = x.mul(num).expect("same ring");
                            k += 1;
                            if k > bound {
                                return false;
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.value {
            ValueRepr::Int(v) => Value::String(v.to_string()),
            ValueRepr::Res(v) => Value::String(v.to_string()),
            ValueRepr::Poly(c) => Value::Array(c.iter().map(RingElement::to_json).collect()),
            ValueRepr::Frac(num, pow) => json!({"num": num.to_json(), "pow": pow}),
        }
    }

    /// Canonical residue for Z/n and prime field elements.
    pub fn residue_value(&self) -> Option<u64> {
        match &self.value {
            ValueRepr::Res(v) => Some(*v),
            _ => None,
        }
    }

    /// Underlying integer for elements of Z.
    pub fn int_value(&self) -> Option<&BigInt> {
        match &self.value {
            ValueRepr::Int(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            ValueRepr::Int(v) => write!(f, "{v}"),
            ValueRepr::Res(v) => write!(f, "{v}"),
            _ => write!(f, "{}", self.to_json()),
        }
    }
}

fn modulus_of(ring: &RingDescriptor) -> u64 {
    match ring {
        IntegersMod(n) | PrimeField(n) => *n,
        _ => unreachable!("residue rings only"),
    }
}

fn poly_base(ring: &RingDescriptor) -> RingDescriptor {
    match ring {
        PolynomialRing(base, _) => (**base).clone(),
        _ => unreachable!("polynomial rings only"),
    }
}

fn loc_s(ring: &RingDescriptor) -> RingElement {
    match ring {
        Localization(_, s) => (**s).clone(),
        _ => unreachable!("localizations only"),
    }
}

/// Idempotent e with eA isomorphic to A_s (finite base), plus the inverse of
/// e*s inside eA. Returns `None` when s is nilpotent.
fn loc_normal_data(base: &RingDescriptor, s: &RingElement) -> Option<(RingElement, RingElement)> {
    let bound = base.cardinality_bound().unwrap_or(4096) + 2;
    // Scan for m >= 1 with s^m == s^{2m}; e = s^m is then the unique
    // idempotent power of s, and m <= |A| because s^1 .. s^{index+period-1}
    // are pairwise distinct.
    let mut pow_m = s.clone();
    let mut e = None;
    for _ in 1..=bound {
        let pow_2m = pow_m.mul(&pow_m).expect("same ring");
        if pow_2m == pow_m {
            e = Some(pow_m.clone());
            break;
        }
        pow_m = pow_m.mul(s).expect("same ring");
    }
    let e = e?;
    if e.is_zero() {
        return None;
    }
    // Inverse of es inside eA: (es)^r == e for some r >= 1; inverse is the
    // previous power (with (es)^0 taken to be e).
    let es = e.mul(s).expect("same ring");
    let mut prev = e.clone();
    let mut cur = es.clone();
    for _ in 0..=bound {
        if cur == e {
            return Some((e, prev));
        }
        prev = cur.clone();
        cur = cur.mul(&es).expect("same ring");
    }
    None
}

fn canonicalize(ring: &RingDescriptor, value: ValueRepr) -> ValueRepr {
    match (ring, value) {
        (Integers, v @ ValueRepr::Int(_)) => v,
        (IntegersMod(n) | PrimeField(n), ValueRepr::Res(v)) => ValueRepr::Res(v % *n),
        (PolynomialRing(..), ValueRepr::Poly(mut c)) => {
            while c.last().map_or(false, RingElement::is_zero) {
                c.pop();
            }
            ValueRepr::Poly(c)
        }
        (Localization(base, s), ValueRepr::Frac(num, pow)) => {
            if num.is_zero() {
                return ValueRepr::Frac(Box::new(base.zero()), 0);
            }
            if base.is_finite() {
                // Map into the idempotent subring; power always 0.
                let (e, inv_es) =
                    loc_normal_data(base, s).expect("validated localizer is not nilpotent");
                let mut x = e.mul(&num).expect("same ring");
                for _ in 0..pow {
                    x = x.mul(&inv_es).expect("same ring");
                }
                ValueRepr::Frac(Box::new(x), 0)
            } else {
                // Domain base: strip s-divisibility.
                let mut num = *num;
                let mut pow = pow;
                while pow > 0 {
                    match try_exact_div_base(&num, s) {
                        Some(q) => {
                            num = q;
                            pow -= 1;
                        }
                        None => break,
                    }
                }
                ValueRepr::Frac(Box::new(num), pow)
            }
        }
        _ => unreachable!("value shape must match ring"),
    }
}

/// Exact division in the base rings that support it; `None` when b does not
/// divide a (or division is not implemented for the ring).
pub(crate) fn try_exact_div_base(a: &RingElement, b: &RingElement) -> Option<RingElement> {
    if a.ring != b.ring {
        return None;
    }
    if b.is_zero() {
        return None;
    }
    match (&a.ring, &a.value, &b.value) {
        (Integers, ValueRepr::Int(x), ValueRepr::Int(y)) => {
            let (q, r) = x.div_rem(y);
            if r.is_zero() {
                Some(RingElement::make(a.ring.clone(), ValueRepr::Int(q)))
            } else {
                None
            }
        }
        (PrimeField(_), _, _) => b.inverse().map(|i| a.mul(&i).expect("same ring")),
        (IntegersMod(_), _, _) => b.inverse().map(|i| a.mul(&i).expect("same ring")),
        (PolynomialRing(..), _, _) => {
            let (q, r) = poly_divmod(a, b)?;
            if r.is_zero() {
                Some(q)
            } else {
                None
            }
        }
        (Localization(base, s), ValueRepr::Frac(x, i), ValueRepr::Frac(y, j)) => {
            if base.is_finite() {
                return b.inverse().map(|inv| a.mul(&inv).expect("same ring"));
            }
            // (x/s^i) / (y/s^j) = (x s^{j+t} / y) / s^{i+t}; search the
            // smallest power t making the base division exact.
            for t in 0..64u32 {
                let numer = x
                    .mul(&s.pow(u64::from(*j + t)).ok()?)
                    .ok()?;
                if let Some(q) = try_exact_div_base(&numer, y) {
                    return Some(RingElement::make(
                        a.ring.clone(),
                        ValueRepr::Frac(Box::new(q), i + t),
                    ));
                }
            }
            None
        }
        _ => None,
    }
}

/// Polynomial division with remainder; requires the divisor's leading
/// coefficient to be a unit. Returns (quotient, remainder).
pub(crate) fn poly_divmod(a: &RingElement, b: &RingElement) -> Option<(RingElement, RingElement)> {
    let (ring, ac, bc) = match (&a.ring, &a.value, &b.value) {
        (r @ PolynomialRing(..), ValueRepr::Poly(x), ValueRepr::Poly(y)) if a.ring == b.ring => {
            (r.clone(), x.clone(), y.clone())
        }
        _ => return None,
    };
    if bc.is_empty() {
        return None;
    }
    let lead_inv = bc.last().unwrap().inverse()?;
    let base = poly_base(&ring);
    let mut rem = ac;
    let db = bc.len() - 1;
    let mut quot = vec![base.zero(); rem.len().saturating_sub(db)];
    while rem.len() > db || (rem.len() == bc.len() && !rem.is_empty() && db == rem.len() - 1) {
        // Strip leading zeros first.
        while rem.last().map_or(false, RingElement::is_zero) {
            rem.pop();
        }
        if rem.len() <= db {
            break;
        }
        let shift = rem.len() - 1 - db;
        let factor = rem.last().unwrap().mul(&lead_inv).ok()?;
        for (k, bkc) in bc.iter().enumerate() {
            let idx = shift + k;
            let delta = factor.mul(bkc).ok()?;
            rem[idx] = rem[idx].sub(&delta).ok()?;
        }
        if quot.len() <= shift {
            quot.resize(shift + 1, base.zero());
        }
        quot[shift] = quot[shift].add(&factor).ok()?;
        while rem.last().map_or(false, RingElement::is_zero) {
            rem.pop();
        }
    }
    Some((
        RingElement::make(ring.clone(), ValueRepr::Poly(quot)),
        RingElement::make(ring, ValueRepr::Poly(rem)),
    ))
}

/// The generator X of a polynomial ring.
pub fn poly_gen(ring: &RingDescriptor) -> Result<RingElement> {
    match ring {
        PolynomialRing(base, _) => Ok(RingElement::make(
            ring.clone(),
            ValueRepr::Poly(vec![base.zero(), base.one()]),
        )),
        other => Err(RingError::Parse(format!("{other} is not a polynomial ring"))),
    }
}

/// Horner evaluation of a polynomial at a base-ring point.
pub fn poly_eval(a: &RingElement, point: &RingElement) -> Result<RingElement> {
    match (&a.ring, &a.value) {
        (PolynomialRing(base, _), ValueRepr::Poly(c)) => {
            if point.ring != **base {
                return Err(RingError::RingMismatch(
                    point.ring.to_string(),
                    base.to_string(),
                ));
            }
            let mut acc = base.zero();
            for coeff in c.iter().rev() {
                acc = acc.mul(point)?.add(coeff)?;
            }
            Ok(acc)
        }
        _ => Err(RingError::Parse("poly_eval needs a polynomial element".into())),
    }
}

/// Rebuilds a polynomial with each coefficient replaced by f(coefficient),
/// landing in the polynomial ring over f's target.
pub fn poly_map_coeffs(
    a: &RingElement,
    target: &RingDescriptor,
    f: &dyn Fn(&RingElement) -> Result<RingElement>,
) -> Result<RingElement> {
    match (&a.ring, &a.value) {
        (PolynomialRing(..), ValueRepr::Poly(c)) => {
            let mapped = c.iter().map(f).collect::<Result<Vec<_>>>()?;
            target.from_coeffs(mapped)
        }
        _ => Err(RingError::Parse("poly_map_coeffs needs a polynomial element".into())),
    }
}

/// Degree of a polynomial element, `None` for the zero polynomial.
pub fn poly_degree(a: &RingElement) -> Option<usize> {
    match &a.value {
        ValueRepr::Poly(c) => {
            if c.is_empty() {
                None
            } else {
                Some(c.len() - 1)
            }
        }
        _ => None,
    }
}

/// Coefficient accessor for polynomial elements (zero beyond the degree).
pub fn poly_coeff(a: &RingElement, k: usize) -> RingElement {
    match (&a.ring, &a.value) {
        (PolynomialRing(base, _), ValueRepr::Poly(c)) => {
            c.get(k).cloned().unwrap_or_else(|| base.zero())
        }
        _ => panic!("poly_coeff on a non-polynomial element"),
    }
}

/// Extended gcd over the Euclidean rings: g together with u, v satisfying
/// u*a + v*b = g exactly. For Z the gcd is non-negative; over F_p[X] it is
/// monic (or zero).
pub fn bezout(a: &RingElement, b: &RingElement) -> Result<(RingElement, RingElement, RingElement)> {
    if a.ring != b.ring {
        return Err(RingError::RingMismatch(a.ring.to_string(), b.ring.to_string()));
    }
    if !a.ring.is_euclidean() {
        return Err(RingError::MissingCapability("euclidean", a.ring.to_string()));
    }
    let ring = a.ring.clone();
    let one = ring.one();
    let zero = ring.zero();
    // Iterative extended Euclid with ring-specific division.
    let div = |x: &RingElement, y: &RingElement| -> Result<RingElement> {
        match (&ring, &x.value, &y.value) {
            (Integers, ValueRepr::Int(p), ValueRepr::Int(q)) => Ok(RingElement::make(
                ring.clone(),
                ValueRepr::Int(p.div_floor(q)),
            )),
            (PrimeField(_), _, _) => {
                let inv = y.inverse().ok_or(RingError::NotAUnit)?;
                x.mul(&inv)
            }
            (PolynomialRing(..), _, _) => {
                let (q, _) = poly_divmod(x, y).ok_or(RingError::NotAUnit)?;
                Ok(q)
            }
            _ => unreachable!(),
        }
    };
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (one.clone(), zero.clone());
    let (mut old_t, mut t) = (zero.clone(), one.clone());
    let mut guard = 0;
    while !r.is_zero() {
        let q = div(&old_r, &r)?;
        let nr = old_r.sub(&q.mul(&r)?)?;
        old_r = std::mem::replace(&mut r, nr);
        let ns = old_s.sub(&q.mul(&s)?)?;
        old_s = std::mem::replace(&mut s, ns);
        let nt = old_t.sub(&q.mul(&t)?)?;
        old_t = std::mem::replace(&mut t, nt);
        guard += 1;
        if guard > 10_000 {
            return Err(RingError::BudgetExceeded("extended euclid".into()));
        }
    }
    // Normalize: non-negative over Z, monic over F_p[X].
    let (g, u, v) = (old_r, old_s, old_t);
    match &ring {
        Integers => {
            if let ValueRepr::Int(gv) = &g.value {
                if gv.is_negative() {
                    return Ok((g.neg(), u.neg(), v.neg()));
                }
            }
            Ok((g, u, v))
        }
        PolynomialRing(..) => {
            if g.is_zero() {
                return Ok((g, u, v));
            }
            if let ValueRepr::Poly(c) = &g.value {
                let lead_inv = c
                    .last()
                    .unwrap()
                    .inverse()
                    .expect("field leading coefficient");
                let scale = RingElement::make(ring.clone(), ValueRepr::Poly(vec![lead_inv]));
                return Ok((g.mul(&scale)?, u.mul(&scale)?, v.mul(&scale)?));
            }
            Ok((g, u, v))
        }
        _ => Ok((g, u, v)),
    }
}

/// A finitely generated ideal in a ring with decidable membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealDescriptor {
    pub ring: RingDescriptor,
    pub generators: Vec<RingElement>,
}

impl IdealDescriptor {
    pub fn new(ring: RingDescriptor, generators: Vec<RingElement>) -> Result<Self> {
        for g in &generators {
            if g.ring != ring {
                return Err(RingError::RingMismatch(g.ring.to_string(), ring.to_string()));
            }
        }
        Ok(IdealDescriptor { ring, generators })
    }

    /// Decides membership: finite rings by additive closure of the generator
    /// multiples, Euclidean rings by gcd.
    pub fn member(&self, a: &RingElement) -> Result<bool> {
        if a.ring != self.ring {
            return Err(RingError::RingMismatch(a.ring.to_string(), self.ring.to_string()));
        }
        if self.ring.is_finite() {
            let elements = self.ring.enumerate()?;
            let mut reached = std::collections::BTreeSet::new();
            reached.insert(self.ring.zero());
            let mut frontier = vec![self.ring.zero()];
            while let Some(x) = frontier.pop() {
                for g in &self.generators {
                    for r in &elements {
                        let y = x.add(&g.mul(r)?)?;
                        if reached.insert(y.clone()) {
                            frontier.push(y);
                        }
                    }
                }
            }
            Ok(reached.contains(a))
        } else if self.ring.is_euclidean() {
            let mut g = self.ring.zero();
            for gen in &self.generators {
                let (ng, _, _) = bezout(&g, gen)?;
                g = ng;
            }
            if g.is_zero() {
                return Ok(a.is_zero());
            }
            match &self.ring {
                Integers => Ok(try_exact_div_base(a, &g).is_some()),
                PolynomialRing(..) => Ok(poly_divmod(a, &g)
                    .map(|(_, r)| r.is_zero())
                    .unwrap_or(false)),
                PrimeField(_) => Ok(true),
                _ => unreachable!(),
            }
        } else {
            Err(RingError::MissingCapability(
                "ideal membership",
                self.ring.to_string(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> RingDescriptor {
        RingDescriptor::integers()
    }
    fn zmod(n: u64) -> RingDescriptor {
        RingDescriptor::integers_mod(n).unwrap()
    }
    fn fp(p: u64) -> RingDescriptor {
        RingDescriptor::prime_field(p).unwrap()
    }

    // Small rings used for exhaustive axiom checks (8 elements or fewer).
    fn small_rings() -> Vec<RingDescriptor> {
        let mut rings: Vec<RingDescriptor> = (2..=8).map(zmod).collect();
        rings.push(fp(2));
        rings.push(fp(3));
        rings.push(fp(5));
        rings.push(fp(7));
        let base = zmod(12);
        rings.push(RingDescriptor::localization(base.clone(), base.from_i64(2)).unwrap());
        rings
    }

    #[test]
    fn construction_gates() {
        assert_eq!(RingDescriptor::integers_mod(1), Err(RingError::BadModulus(1)));
        assert_eq!(RingDescriptor::integers_mod(0), Err(RingError::BadModulus(0)));
        assert_eq!(RingDescriptor::prime_field(6), Err(RingError::NotPrime(6)));
        assert!(RingDescriptor::prime_field(7919).is_ok());
        // Nilpotent localizer rejected: 6 is nilpotent in Z/12.
        let base = zmod(12);
        assert_eq!(
            RingDescriptor::localization(base.clone(), base.from_i64(6)),
            Err(RingError::NilpotentLocalizer)
        );
        assert_eq!(
            RingDescriptor::localization(z(), z().from_i64(0)),
            Err(RingError::NilpotentLocalizer)
        );
    }

    #[test]
    fn ring_axioms_exhaustive_on_small_rings() {
        for ring in small_rings() {
            let elems = ring.enumerate().unwrap();
            assert!(elems.len() <= 12);
            for a in &elems {
                assert_eq!(a.add(&ring.zero()).unwrap(), *a);
                assert_eq!(a.mul(&ring.one()).unwrap(), *a);
                assert!(a.add(&a.neg()).unwrap().is_zero());
                for b in &elems {
                    assert_eq!(a.add(b).unwrap(), b.add(a).unwrap(), "comm + in {ring}");
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap(), "comm * in {ring}");
                    for c in &elems {
                        let ab_c = a.add(b).unwrap().add(c).unwrap();
                        let a_bc = a.add(&b.add(c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc, "assoc + in {ring}");
                        let ab_c = a.mul(b).unwrap().mul(c).unwrap();
                        let a_bc = a.mul(&b.mul(c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc, "assoc * in {ring}");
                        let lhs = a.mul(&b.add(c).unwrap()).unwrap();
                        let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs, "distrib in {ring}");
                    }
                }
            }
        }
    }

    #[test]
    fn canonicalization_is_idempotent() {
        for ring in small_rings() {
            for a in ring.enumerate().unwrap() {
                let again = RingElement::make(a.ring.clone(), a.value.clone());
                assert_eq!(a, again);
            }
        }
        // Polynomial trailing zeros strip.
        let pr = RingDescriptor::polynomial(fp(5), "X").unwrap();
        let p = pr
            .from_coeffs(vec![fp(5).from_i64(1), fp(5).from_i64(0), fp(5).from_i64(0)])
            .unwrap();
        assert_eq!(poly_degree(&p), Some(0));
        // Localization lowest terms over Z.
        let l = RingDescriptor::localization(z(), z().from_i64(2)).unwrap();
        let x = l.frac(z().from_i64(8), 2).unwrap();
        assert_eq!(x, l.from_i64(2));
    }

    // Independent convolution oracle for the polynomial product example.
    #[test]
    fn poly_mul_matches_term_by_term_oracle() {
        let pr = RingDescriptor::polynomial(fp(5), "X").unwrap();
        // (2X + 1) * 3X over F_5 = 6X^2 + 3X = X^2 + 3X.
        let a = pr
            .from_coeffs(vec![fp(5).from_i64(1), fp(5).from_i64(2)])
            .unwrap();
        let b = pr.from_coeffs(vec![fp(5).from_i64(0), fp(5).from_i64(3)]).unwrap();
        let prod = a.mul(&b).unwrap();
        // Oracle: convolution computed with plain u64 arithmetic.
        let av = [1u64, 2];
        let bv = [0u64, 3];
        let mut conv = [0u64; 3];
        for (i, x) in av.iter().enumerate() {
            for (j, y) in bv.iter().enumerate() {
                conv[i + j] = (conv[i + j] + x * y) % 5;
            }
        }
        let expect = pr
            .from_coeffs(conv.iter().map(|&c| fp(5).from_i64(c as i64)).collect())
            .unwrap();
        assert_eq!(prod, expect);
        assert_eq!(conv, [0, 3, 1]);
    }

    #[test]
    fn arith_examples() {
        let r6 = zmod(6);
        assert_eq!(r6.from_i64(4).add(&r6.from_i64(5)).unwrap(), r6.from_i64(3));
        for ring in [z(), zmod(6), fp(5)] {
            let x = ring.from_i64(4);
            assert_eq!(x.mul(&ring.one()).unwrap(), x);
        }
    }

    #[test]
    fn is_unit_examples() {
        let r6 = zmod(6);
        assert_eq!(r6.from_i64(5).inverse(), Some(r6.from_i64(5)));
        assert_eq!(z().from_i64(2).inverse(), None);
        assert_eq!(z().from_i64(-1).inverse(), Some(z().from_i64(-1)));
        // Exhaustive oracle: no k has 3k = 1 mod 9.
        let r9 = zmod(9);
        for k in 0..9 {
            assert!(!r9.from_i64(3).mul(&r9.from_i64(k)).unwrap().is_one());
        }
        assert_eq!(r9.from_i64(3).inverse(), None);
        // Unit inverses multiply back to one across small rings.
        for ring in small_rings() {
            for a in ring.enumerate().unwrap() {
                if let Some(inv) = a.inverse() {
                    assert!(a.mul(&inv).unwrap().is_one(), "{a} in {ring}");
                }
            }
        }
    }

    #[test]
    fn bezout_examples() {
        let (g, u, v) = bezout(&z().from_i64(4), &z().from_i64(7)).unwrap();
        assert_eq!(
            (g.clone(), u.clone(), v.clone()),
            (z().from_i64(1), z().from_i64(2), z().from_i64(-1))
        );
        // Identity holds by direct evaluation.
        let lhs = u
            .mul(&z().from_i64(4))
            .unwrap()
            .add(&v.mul(&z().from_i64(7)).unwrap())
            .unwrap();
        assert_eq!(lhs, g);
        let b = z().from_i64(11);
        assert_eq!(
            bezout(&z().zero(), &b).unwrap(),
            (b.clone(), z().zero(), z().one())
        );
        // F_5[X]: (X^2+1, X) -> (1, 1, -X).
        let pr = RingDescriptor::polynomial(fp(5), "X").unwrap();
        let a = pr
            .from_coeffs(vec![fp(5).from_i64(1), fp(5).from_i64(0), fp(5).from_i64(1)])
            .unwrap();
        let x = pr.from_coeffs(vec![fp(5).from_i64(0), fp(5).from_i64(1)]).unwrap();
        let (g, u, v) = bezout(&a, &x).unwrap();
        assert!(g.is_one());
        assert!(u.is_one());
        assert_eq!(v, x.neg());
        let lhs = u.mul(&a).unwrap().add(&v.mul(&x).unwrap()).unwrap();
        assert!(lhs.is_one());
        // Capability gate.
        assert!(matches!(
            bezout(&zmod(6).from_i64(2), &zmod(6).from_i64(3)),
            Err(RingError::MissingCapability(..))
        ));
    }

    #[test]
    fn enumerate_counts_and_uniqueness() {
        for (ring, count) in [(zmod(3), 3usize), (fp(2), 2), (zmod(6), 6)] {
            let elems = ring.enumerate().unwrap();
            assert_eq!(elems.len(), count);
            let set: std::collections::BTreeSet<_> = elems.iter().cloned().collect();
            assert_eq!(set.len(), count);
        }
        assert!(matches!(
            z().enumerate(),
            Err(RingError::MissingCapability(..))
        ));
    }

    #[test]
    fn crt_idempotents_and_round_trip() {
        let comps = zmod(6).crt_decompose().unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].ring, zmod(2));
        assert_eq!(comps[1].ring, zmod(3));
        assert_eq!(comps[0].idempotent, zmod(6).from_i64(3));
        assert_eq!(comps[1].idempotent, zmod(6).from_i64(4));
        let comps = zmod(12).crt_decompose().unwrap();
        assert_eq!(comps[0].idempotent, zmod(12).from_i64(9));
        assert_eq!(comps[1].idempotent, zmod(12).from_i64(4));
        // Exhaustive round trip for n up to 60: x = sum e_i * lift(x mod q_i).
        for n in 2..=60u64 {
            let ring = zmod(n);
            let comps = ring.crt_decompose().unwrap();
            // Idempotent sanity: they sum to one and are orthogonal.
            let mut sum = ring.zero();
            for c in &comps {
                sum = sum.add(&c.idempotent).unwrap();
            }
            assert!(sum.is_one(), "idempotents of Z/{n} sum to 1");
            for (i, a) in comps.iter().enumerate() {
                for (j, b) in comps.iter().enumerate() {
                    if i != j {
                        assert!(a.idempotent.mul(&b.idempotent).unwrap().is_zero());
                    }
                }
            }
            for x in ring.enumerate().unwrap() {
                let mut back = ring.zero();
                for c in &comps {
                    let piece = c.idempotent.mul(&c.lift(&c.project(&x).unwrap()).unwrap()).unwrap();
                    back = back.add(&piece).unwrap();
                }
                assert_eq!(back, x, "round trip in Z/{n}");
            }
        }
        assert!(matches!(
            fp(5).crt_decompose(),
            Err(RingError::MissingCapability(..))
        ));
    }

    #[test]
    fn ideal_membership() {
        let r9 = zmod(9);
        let ideal = IdealDescriptor::new(r9.clone(), vec![r9.from_i64(3)]).unwrap();
        assert!(ideal.member(&r9.from_i64(6)).unwrap());
        assert!(!ideal.member(&r9.from_i64(1)).unwrap());
        let ideal = IdealDescriptor::new(z(), vec![z().from_i64(4), z().from_i64(6)]).unwrap();
        assert!(ideal.member(&z().from_i64(2)).unwrap());
        assert!(!ideal.member(&z().from_i64(3)).unwrap());
    }

    #[test]
    fn localization_normal_forms() {
        // Z localized at 2: 1/2 + 1/2 = 1.
        let l = RingDescriptor::localization(z(), z().from_i64(2)).unwrap();
        let half = l.frac(z().one(), 1).unwrap();
        assert!(half.add(&half).unwrap().is_one());
        // Cross-multiplication consistency: a/s^k == (a*s)/s^{k+1}.
        for a in -6i64..=6 {
            for k in 0..4u32 {
                let lhs = l.frac(z().from_i64(a), k).unwrap();
                let rhs = l.frac(z().from_i64(2 * a), k + 1).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        // Composite localizer over Z keeps unique lowest terms: 3/6 stays.
        let l6 = RingDescriptor::localization(z(), z().from_i64(6)).unwrap();
        let x = l6.frac(z().from_i64(3), 1).unwrap();
        match &x.value {
            ValueRepr::Frac(num, pow) => {
                assert_eq!(**num, z().from_i64(3));
                assert_eq!(*pow, 1);
            }
            _ => panic!(),
        }
        // Finite base: (Z/12) localized at 2 collapses to the idempotent
        // subring {0,4,8} with unity 4; one() is 4 and 1/2 is 8.
        let base = zmod(12);
        let lf = RingDescriptor::localization(base.clone(), base.from_i64(2)).unwrap();
        let one = lf.one();
        assert_eq!(one, lf.frac(base.from_i64(4), 0).unwrap());
        let half = lf.frac(base.one(), 1).unwrap();
        assert_eq!(half, lf.frac(base.from_i64(8), 0).unwrap());
        assert_eq!(half.mul(&lf.from_i64(2)).unwrap(), one);
        assert_eq!(lf.enumerate().unwrap().len(), 3);
        // Inverse of 1/2 is 2.
        assert_eq!(half.inverse(), Some(lf.from_i64(2)));
    }

    #[test]
    fn localization_units_over_z() {
        let l = RingDescriptor::localization(z(), z().from_i64(2)).unwrap();
        // 4 = 2^2 is a unit; 3 is not; -8 is a unit.
        let four = l.from_i64(4);
        let inv = four.inverse().unwrap();
        assert!(four.mul(&inv).unwrap().is_one());
        assert_eq!(l.from_i64(3).inverse(), None);
        let m8 = l.from_i64(-8);
        assert!(m8.mul(&m8.inverse().unwrap()).unwrap().is_one());
    }

    #[test]
    fn nilpotency() {
        let r12 = zmod(12);
        assert!(r12.from_i64(6).is_nilpotent());
        assert!(!r12.from_i64(2).is_nilpotent());
        assert!(!r12.from_i64(4).is_nilpotent());
        let r8 = zmod(8);
        assert!(r8.from_i64(2).is_nilpotent());
        let pr = RingDescriptor::polynomial(zmod(4), "X").unwrap();
        let p = pr
            .from_coeffs(vec![zmod(4).from_i64(0), zmod(4).from_i64(2)])
            .unwrap();
        assert!(p.is_nilpotent());
        // 1 + 2X is a unit of (Z/4)[X].
        let u = pr
            .from_coeffs(vec![zmod(4).from_i64(1), zmod(4).from_i64(2)])
            .unwrap();
        let inv = u.inverse().expect("unit");
        assert!(u.mul(&inv).unwrap().is_one());
        // 1 + X is not a unit there.
        let v = pr
            .from_coeffs(vec![zmod(4).from_i64(1), zmod(4).from_i64(1)])
            .unwrap();
        assert_eq!(v.inverse(), None);
    }

    #[test]
    fn poly_division() {
        let pr = RingDescriptor::polynomial(fp(5), "X").unwrap();
        let a = pr
            .from_coeffs(vec![fp(5).from_i64(1), fp(5).from_i64(0), fp(5).from_i64(1)])
            .unwrap();
        let b = pr.from_coeffs(vec![fp(5).from_i64(0), fp(5).from_i64(1)]).unwrap();
        let (q, r) = poly_divmod(&a, &b).unwrap();
        assert_eq!(q, b);
        assert!(r.is_one());
        // a = q*b + r reconstructs.
        assert_eq!(q.mul(&b).unwrap().add(&r).unwrap(), a);
    }

    #[test]
    fn json_round_trips() {
        let rings = vec![
            z(),
            zmod(6),
            fp(5),
            RingDescriptor::polynomial(zmod(6), "X").unwrap(),
            RingDescriptor::localization(z(), z().from_i64(2)).unwrap(),
        ];
        for ring in rings {
            let j = ring.to_json();
            assert_eq!(RingDescriptor::from_json(&j).unwrap(), ring);
            for v in [-3i64, 0, 1, 7] {
                let x = ring.from_i64(v);
                let back = ring.element_from_json(&x.to_json()).unwrap();
                assert_eq!(back, x);
            }
        }
        // Canonical descriptor strings.
        assert_eq!(zmod(6).to_json().to_string(), "{\"n\":6,\"type\":\"Zmod\"}");
        assert_eq!(z().to_json().to_string(), "{\"type\":\"Z\"}");
    }

    #[test]
    fn search_candidates_order() {
        let spiral: Vec<_> = z()
            .search_candidates()
            .unwrap()
            .take(5)
            .map(|e| format!("{e}"))
            .collect();
        assert_eq!(spiral, ["0", "1", "-1", "2", "-2"]);
        let finite: Vec<_> = zmod(3)
            .search_candidates()
            .unwrap()
            .map(|e| format!("{e}"))
            .collect();
        assert_eq!(finite, ["0", "1", "2"]);
    }
}
