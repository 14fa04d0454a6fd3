//! Exact arithmetic in `F_q`, `A = F_q[T]` and `F = F_q(T)`: places,
//! valuations, residue fields and factorization.

pub mod text;

use std::cmp::Ordering;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor;
use crate::field::{Field, FiniteField, Fq, FqElem};
use crate::poly::{Poly, PolyRing};
use text::{unknown_symbol, ExprTarget};

/// Elements of `A = F_q[T]`.
pub type APoly = Poly<FqElem>;

/// Constant-field parameters as they appear in input documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u32,
    #[serde(default = "one_u32")]
    pub m: u32,
    /// Modulus of `F_q` over `F_p` as a polynomial in `g`; required iff `m > 1`.
    #[serde(default)]
    pub modulus: Option<String>,
}

fn one_u32() -> u32 {
    1
}

impl FieldParams {
    pub fn prime(p: u32) -> Self {
        FieldParams {
            p,
            m: 1,
            modulus: None,
        }
    }

    pub fn build(&self) -> Result<Fq> {
        if self.m == 0 {
            return Err(Error::invalid("extension exponent m must be at least 1"));
        }
        match (&self.modulus, self.m) {
            (None, 1) => Fq::prime(self.p),
            (None, _) => Err(Error::invalid(
                "a modulus polynomial in g is required when m > 1",
            )),
            (Some(s), m) => {
                let fp = Fq::prime(self.p)?;
                let target = PolyTarget {
                    fq: fp,
                    var: "g",
                    allow_g: false,
                };
                let poly = target.parse(s)?;
                if poly.degree() != Some(m as usize) {
                    return Err(Error::invalid(format!(
                        "modulus `{s}` must have degree m = {m}"
                    )));
                }
                let coeffs: Vec<u32> = poly.coeffs().iter().map(|c| c.0).collect();
                Fq::extension(self.p, &coeffs)
            }
        }
    }
}

/// Parser target for polynomials over `F_q` in a single variable (`T` by default).
#[derive(Clone, Debug)]
pub struct PolyTarget {
    pub fq: Fq,
    pub var: &'static str,
    /// Whether the symbol `g` denotes the generator of `F_q`.
    pub allow_g: bool,
}

impl PolyTarget {
    pub fn new(fq: &Fq) -> Self {
        PolyTarget {
            fq: fq.clone(),
            var: "T",
            allow_g: fq.m() > 1,
        }
    }
}

impl ExprTarget for PolyTarget {
    type Value = APoly;

    fn int(&self, n: u64) -> Result<APoly> {
        Ok(Poly::new(vec![self.fq.from_int((n % self.fq.p() as u64) as i64)]))
    }
    fn sym(&self, name: &str) -> Result<APoly> {
        if name == self.var {
            Ok(Poly::new(vec![FqElem::ZERO, FqElem::ONE]))
        } else if name == "g" && self.allow_g {
            Ok(Poly::new(vec![self.fq.generator().unwrap()]))
        } else {
            unknown_symbol(name)
        }
    }
    fn add(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        Ok(PolyRing::new(self.fq.clone()).add(a, b))
    }
    fn neg(&self, a: &APoly) -> Result<APoly> {
        Ok(PolyRing::new(self.fq.clone()).neg(a))
    }
    fn mul(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        Ok(PolyRing::new(self.fq.clone()).mul(a, b))
    }
    fn div(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        let ring = PolyRing::new(self.fq.clone());
        if b.is_zero() {
            return Err(Error::parse("/", "division by zero"));
        }
        ring.div_exact(a, b)
            .ok_or_else(|| Error::parse("/", "inexact division in a polynomial"))
    }
}

/// An element of `F = F_q(T)` in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: APoly,
    den: APoly,
}

impl RationalFunction {
    pub fn num(&self) -> &APoly {
        &self.num
    }
    pub fn den(&self) -> &APoly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }
}

/// The rational function field `F_q(T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunctions {
    ring: PolyRing<Fq>,
}

impl RationalFunctions {
    pub fn new(fq: Fq) -> Self {
        RationalFunctions {
            ring: PolyRing::new(fq),
        }
    }

    pub fn ring(&self) -> &PolyRing<Fq> {
        &self.ring
    }

    pub fn fq(&self) -> &Fq {
        self.ring.field()
    }

    pub fn from_poly(&self, a: APoly) -> RationalFunction {
        RationalFunction {
            num: a,
            den: self.ring.one(),
        }
    }

    pub fn t(&self) -> RationalFunction {
        self.from_poly(self.ring.x())
    }

    /// `num/den` reduced to lowest terms; errors on a zero denominator.
    pub fn fraction(&self, num: APoly, den: APoly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(self.normalize(num, den))
    }

    fn normalize(&self, num: APoly, den: APoly) -> RationalFunction {
        let r = &self.ring;
        if num.is_zero() {
            return RationalFunction {
                num,
                den: r.one(),
            };
        }
        let g = r.gcd(&num, &den);
        let (mut n, mut d) = if r.is_one(&g) {
            (num, den)
        } else {
            (r.div_exact(&num, &g).unwrap(), r.div_exact(&den, &g).unwrap())
        };
        let lc = *d.lc().unwrap();
        if lc != FqElem::ONE {
            let inv = self.fq().inv_e(lc).unwrap();
            n = r.scale(&inv, &n);
            d = r.scale(&inv, &d);
        }
        RationalFunction { num: n, den: d }
    }

    pub fn parse(&self, s: &str) -> Result<RationalFunction> {
        FTarget { field: self }.parse(s)
    }

    /// The polynomial `a` if `x ∈ A`.
    pub fn as_poly(&self, x: &RationalFunction) -> Option<APoly> {
        x.is_polynomial().then(|| x.num.clone())
    }
}

impl Field for RationalFunctions {
    type Elem = RationalFunction;

    fn base(&self) -> &Fq {
        self.ring.field()
    }
    fn zero(&self) -> RationalFunction {
        self.from_poly(self.ring.zero())
    }
    fn one(&self) -> RationalFunction {
        self.from_poly(self.ring.one())
    }
    fn is_zero(&self, a: &RationalFunction) -> bool {
        a.num.is_zero()
    }
    fn add(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        let r = &self.ring;
        if a.den == b.den {
            let n = r.add(&a.num, &b.num);
            if a.is_polynomial() {
                return self.from_poly(n);
            }
            return self.normalize(n, a.den.clone());
        }
        if a.is_polynomial() {
            return RationalFunction {
                num: r.add(&r.mul(&a.num, &b.den), &b.num),
                den: b.den.clone(),
            };
        }
        if b.is_polynomial() {
            return RationalFunction {
                num: r.add(&a.num, &r.mul(&b.num, &a.den)),
                den: a.den.clone(),
            };
        }
        let n = r.add(&r.mul(&a.num, &b.den), &r.mul(&b.num, &a.den));
        self.normalize(n, r.mul(&a.den, &b.den))
    }
    fn neg(&self, a: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self.ring.neg(&a.num),
            den: a.den.clone(),
        }
    }
    fn mul(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        let r = &self.ring;
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        if a.is_polynomial() && b.is_polynomial() {
            return self.from_poly(r.mul(&a.num, &b.num));
        }
        // cross-cancel before multiplying
        let g1 = r.gcd(&a.num, &b.den);
        let g2 = r.gcd(&b.num, &a.den);
        let an = r.div_exact(&a.num, &g1).unwrap();
        let bd = r.div_exact(&b.den, &g1).unwrap();
        let bn = r.div_exact(&b.num, &g2).unwrap();
        let ad = r.div_exact(&a.den, &g2).unwrap();
        let num = r.mul(&an, &bn);
        let den = r.mul(&ad, &bd);
        let lc = *den.lc().unwrap();
        if lc == FqElem::ONE {
            RationalFunction { num, den }
        } else {
            let inv = self.fq().inv_e(lc).unwrap();
            RationalFunction {
                num: r.scale(&inv, &num),
                den: r.scale(&inv, &den),
            }
        }
    }
    fn inv(&self, a: &RationalFunction) -> Option<RationalFunction> {
        if a.is_zero() {
            return None;
        }
        let lc = *a.num.lc().unwrap();
        let inv = self.fq().inv_e(lc).unwrap();
        Some(RationalFunction {
            num: self.ring.scale(&inv, &a.den),
            den: self.ring.scale(&inv, &a.num),
        })
    }
    fn from_base(&self, c: FqElem) -> RationalFunction {
        self.from_poly(Poly::new(vec![c]))
    }
    fn frobenius(&self, a: &RationalFunction, k: u32) -> RationalFunction {
        // c^q = c on F_q, so the Frobenius is T -> T^(q^k) on coefficients
        let stride = (self.q()).pow(k) as usize;
        let spread = |p: &APoly| {
            if p.len() <= 1 {
                return p.clone();
            }
            let mut v = vec![FqElem::ZERO; (p.len() - 1) * stride + 1];
            for (i, c) in p.coeffs().iter().enumerate() {
                v[i * stride] = *c;
            }
            Poly::new(v)
        };
        RationalFunction {
            num: spread(&a.num),
            den: spread(&a.den),
        }
    }
    fn format_elem(&self, a: &RationalFunction) -> String {
        let n = self.ring.format(&a.num, "T");
        if a.is_polynomial() {
            n
        } else {
            format!("({})/({})", n, self.ring.format(&a.den, "T"))
        }
    }
}

/// Parser target for elements of `F`.
pub struct FTarget<'a> {
    pub field: &'a RationalFunctions,
}

impl ExprTarget for FTarget<'_> {
    type Value = RationalFunction;

    fn int(&self, n: u64) -> Result<RationalFunction> {
        let fq = self.field.fq();
        Ok(self
            .field
            .from_base(fq.from_int((n % fq.p() as u64) as i64)))
    }
    fn sym(&self, name: &str) -> Result<RationalFunction> {
        let p = PolyTarget::new(self.field.fq()).sym(name)?;
        Ok(self.field.from_poly(p))
    }
    fn add(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.field.add(a, b))
    }
    fn neg(&self, a: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.field.neg(a))
    }
    fn mul(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.field.mul(a, b))
    }
    fn div(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        self.field
            .div(a, b)
            .ok_or_else(|| Error::parse("/", "division by zero"))
    }
}

/// Parse an element of `A`; rejects non-polynomial input.
pub fn parse_poly(fq: &Fq, s: &str) -> Result<APoly> {
    PolyTarget::new(fq).parse(s)
}

pub fn format_poly(fq: &Fq, a: &APoly) -> String {
    PolyRing::new(fq.clone()).format(a, "T")
}

/// A place of `F_q(T)`: a monic irreducible of `A`, or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(APoly),
    Infinity,
}

impl Place {
    /// Normalizes to monic and checks irreducibility.
    pub fn finite(fq: &Fq, l: &APoly) -> Result<Place> {
        let ring = PolyRing::new(fq.clone());
        if l.degree().unwrap_or(0) == 0 {
            return Err(Error::invalid("a finite place needs a nonconstant generator"));
        }
        let l = ring.monic(l);
        if !factor::is_irreducible(&ring, &l) {
            return Err(Error::invalid(format!(
                "`{}` is not irreducible",
                ring.format(&l, "T")
            )));
        }
        Ok(Place::Finite(l))
    }

    /// Parses `inf`/`infinity`/`∞` or a polynomial generator.
    pub fn parse(fq: &Fq, s: &str) -> Result<Place> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "oo" => Ok(Place::Infinity),
            other => Place::finite(fq, &parse_poly(fq, other)?),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(l) => l.degree().unwrap(),
            Place::Infinity => 1,
        }
    }

    pub fn generator(&self) -> Option<&APoly> {
        match self {
            Place::Finite(l) => Some(l),
            Place::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn label(&self, fq: &Fq) -> String {
        match self {
            Place::Finite(l) => format_poly(fq, l),
            Place::Infinity => "inf".to_string(),
        }
    }

    /// Canonical report order: degree, then finite before `∞`, then generator coefficients
    /// from the leading one down.
    pub fn canonical_cmp(&self, other: &Place) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| match (self, other) {
                (Place::Finite(a), Place::Finite(b)) => a.lex_key().cmp(&b.lex_key()),
                (Place::Finite(_), Place::Infinity) => Ordering::Less,
                (Place::Infinity, Place::Finite(_)) => Ordering::Greater,
                (Place::Infinity, Place::Infinity) => Ordering::Equal,
            })
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(l) => {
                let s: Vec<String> = l.coeffs().iter().map(|c| c.0.to_string()).collect();
                write!(f, "({})", s.join(","))
            }
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// Multiplicity of the irreducible `l` in the nonzero polynomial `a`.
pub fn poly_multiplicity(ring: &PolyRing<Fq>, a: &APoly, l: &APoly) -> i64 {
    let mut cur = a.clone();
    let mut k = 0;
    loop {
        let (q, r) = ring.divrem(&cur, l);
        if !r.is_zero() {
            return k;
        }
        cur = q;
        k += 1;
    }
}

/// Normalized valuation; `None` stands for `+∞` (the valuation of 0).
pub fn valuation(field: &RationalFunctions, x: &RationalFunction, v: &Place) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(match v {
        Place::Finite(l) => {
            poly_multiplicity(field.ring(), &x.num, l) - poly_multiplicity(field.ring(), &x.den, l)
        }
        Place::Infinity => x.den.degree().unwrap() as i64 - x.num.degree().unwrap() as i64,
    })
}

/// Factor a nonzero element of `A` into monic irreducibles with multiplicities.
/// The splitting randomness is drawn from a generator seeded with `seed`.
pub fn factor_poly(fq: &Fq, a: &APoly, seed: u64) -> Result<Vec<(APoly, usize)>> {
    if a.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let ring = PolyRing::new(fq.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(factor::factor(&ring, a, &mut rng))
}

/// Residue field `F_v` of a place, with the reduction map on `v`-integral elements.
#[derive(Clone, Debug)]
pub struct ResidueField {
    place: Place,
    field: FiniteField,
}

impl ResidueField {
    pub fn new(fq: &Fq, place: &Place) -> Self {
        let field = match place {
            Place::Finite(l) => FiniteField::new_unchecked(fq.clone(), l.clone()),
            Place::Infinity => FiniteField::constant_field(fq.clone()),
        };
        ResidueField {
            place: place.clone(),
            field,
        }
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// Number of elements, `q^deg v` (saturating).
    pub fn cardinality(&self) -> u128 {
        (self.field.q() as u128).saturating_pow(self.place.degree() as u32)
    }

    pub fn reduce(&self, rf: &RationalFunctions, x: &RationalFunction) -> Result<Vec<FqElem>> {
        let k = &self.field;
        match &self.place {
            Place::Finite(_) => {
                let d = k.from_poly(&x.den);
                if k.is_zero(&d) {
                    // lowest terms: the numerator is a unit, so v(x) < 0
                    return Err(Error::NotIntegral);
                }
                Ok(k.mul(&k.from_poly(&x.num), &k.inv(&d).unwrap()))
            }
            Place::Infinity => {
                if x.is_zero() {
                    return Ok(k.zero());
                }
                let (dn, dd) = (x.num.degree().unwrap(), x.den.degree().unwrap());
                match dn.cmp(&dd) {
                    Ordering::Greater => Err(Error::NotIntegral),
                    Ordering::Less => Ok(k.zero()),
                    Ordering::Equal => {
                        let c = rf
                            .fq()
                            .mul_e(*x.num.lc().unwrap(), rf.fq().inv_e(*x.den.lc().unwrap()).unwrap());
                        Ok(k.from_base(c))
                    }
                }
            }
        }
    }
}

pub fn residue_field(fq: &Fq, v: &Place) -> ResidueField {
    ResidueField::new(fq, v)
}
