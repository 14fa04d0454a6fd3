//! Truncated Laurent series `k((u))` modelling the completion `F_v`.

use std::fmt;
use std::sync::Arc;

use crate::base_field::{poly_multiplicity, APoly, Place, RationalFunction, RationalFunctions};
use crate::error::{Error, Result};
use crate::field::{Field, FiniteField, FiniteFieldOps, Fq, FqElem};
use crate::poly::PolyRing;

type KElem = Vec<FqElem>;

/// `u^val · Σ digits[i] u^i + O(u^(val + len))`. The leading digit is nonzero
/// unless `digits` is empty, in which case the element is zero modulo
/// `u^val`; `val == EXACT` marks the exact zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LSeries {
    val: i64,
    digits: Vec<KElem>,
}

const EXACT: i64 = i64::MAX;

impl LSeries {
    /// Valuation if a nonzero digit is known.
    pub fn valuation(&self) -> Option<i64> {
        (!self.digits.is_empty()).then_some(self.val)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.val == EXACT
    }

    /// Absolute precision: the element is known modulo `u^abs`.
    pub fn abs_precision(&self) -> i64 {
        if self.val == EXACT {
            EXACT
        } else {
            self.val + self.digits.len() as i64
        }
    }

    pub fn rel_precision(&self) -> usize {
        self.digits.len()
    }

    /// Leading digit in the residue field.
    pub fn leading(&self) -> Option<&KElem> {
        self.digits.first()
    }

    /// Coefficient of `u^i`, if known.
    pub fn digit(&self, i: i64) -> Option<KElem> {
        if i >= self.abs_precision() {
            return None;
        }
        if i < self.val {
            return Some(Vec::new());
        }
        Some(self.digits[(i - self.val) as usize].clone())
    }
}

struct Inner {
    place: Place,
    residue: FiniteField,
    prec: usize,
    /// Image of `T`.
    t: LSeries,
}

/// The completion `F_v ≅ k((u))` at precision `N`, with `u = l` at a finite
/// place and `u = 1/T` at infinity.
#[derive(Clone)]
pub struct LocalField {
    inner: Arc<Inner>,
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.place == other.inner.place
                && self.inner.prec == other.inner.prec
                && self.inner.residue == other.inner.residue)
    }
}

impl fmt::Debug for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalField({}, N={})", self.inner.place, self.inner.prec)
    }
}

impl fmt::Debug for LSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        write!(f, "u^{}*{:?} + O(u^{})", self.val, self.digits.first(), self.abs_precision())
    }
}

impl LocalField {
    pub fn new(fq: &Fq, place: &Place, prec: usize) -> Result<Self> {
        if prec == 0 {
            return Err(Error::invalid("local precision must be at least 1"));
        }
        let residue = match place {
            Place::Finite(l) => FiniteField::new_unchecked(fq.clone(), l.clone()),
            Place::Infinity => FiniteField::constant_field(fq.clone()),
        };
        let mut lf = LocalField {
            inner: Arc::new(Inner {
                place: place.clone(),
                residue: residue.clone(),
                prec,
                t: LSeries {
                    val: EXACT,
                    digits: Vec::new(),
                },
            }),
        };
        let t = match place {
            Place::Infinity => LSeries {
                val: -1,
                digits: lf.padded(vec![residue.one()]),
            },
            Place::Finite(l) => lf.solve_uniformizer(l),
        };
        Arc::get_mut(&mut lf.inner).unwrap().t = t;
        Ok(lf)
    }

    pub fn place(&self) -> &Place {
        &self.inner.place
    }

    pub fn residue(&self) -> &FiniteField {
        &self.inner.residue
    }

    pub fn precision(&self) -> usize {
        self.inner.prec
    }

    pub fn uniformizer(&self) -> LSeries {
        self.monomial(self.residue().one(), 1)
    }

    /// `c·u^k` at full relative precision.
    pub fn monomial(&self, c: KElem, k: i64) -> LSeries {
        if self.residue().is_zero(&c) {
            return self.zero();
        }
        LSeries {
            val: k,
            digits: self.padded(vec![c]),
        }
    }

    fn padded(&self, mut d: Vec<KElem>) -> Vec<KElem> {
        d.resize(self.inner.prec, self.residue().zero());
        d
    }

    fn normalize(&self, mut val: i64, mut digits: Vec<KElem>) -> LSeries {
        let k = self.residue();
        let lead = digits.iter().position(|c| !k.is_zero(c)).unwrap_or(digits.len());
        val += lead as i64;
        digits.drain(..lead);
        digits.truncate(self.inner.prec);
        LSeries { val, digits }
    }

    /// Newton iteration for `T = θ + …` with `l(T) = u`.
    fn solve_uniformizer(&self, l: &APoly) -> LSeries {
        let k = self.residue();
        let ring = PolyRing::new(k.base().clone());
        let dl = ring.derivative(l);
        let mut t = LSeries {
            val: 0,
            digits: self.padded(vec![k.gen()]),
        };
        if k.degree() == 1 && k.is_zero(&k.gen()) {
            t = self.zero();
        }
        let u = self.uniformizer();
        let mut correct = 1usize;
        while correct < self.inner.prec + 1 {
            let lt = self.sub(&self.eval_poly(l, &t), &u);
            let d = self.eval_poly(&dl, &t);
            let step = self.mul(&lt, &self.inv(&d).expect("l is separable"));
            t = self.sub(&t, &step);
            correct *= 2;
        }
        t
    }

    fn eval_poly(&self, a: &APoly, x: &LSeries) -> LSeries {
        let mut acc = self.zero();
        for c in a.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_base(*c));
        }
        acc
    }

    /// Image of a polynomial that is a unit at this place, with full relative precision.
    fn embed_unit(&self, a: &APoly) -> LSeries {
        match &self.inner.place {
            Place::Finite(_) => self.eval_poly(a, &self.inner.t),
            Place::Infinity => {
                // a(1/u) = u^(-deg a) · Σ a_i u^(deg a - i)
                let k = self.residue();
                let d = a.degree().unwrap();
                let digits: Vec<KElem> = (0..=d).rev().map(|i| k.from_base(a.coeffs()[i])).collect();
                LSeries {
                    val: 0,
                    digits: self.padded(digits),
                }
            }
        }
    }

    fn embed_poly(&self, a: &APoly) -> LSeries {
        if a.is_zero() {
            return self.zero();
        }
        match &self.inner.place {
            Place::Finite(l) => {
                let ring = PolyRing::new(self.residue().base().clone());
                let k = poly_multiplicity(&ring, a, l);
                let unit = ring.div_exact(a, &ring.pow(l, k as u64)).unwrap();
                let s = self.embed_unit(&unit);
                LSeries {
                    val: s.val + k,
                    digits: s.digits,
                }
            }
            Place::Infinity => {
                let s = self.embed_unit(a);
                LSeries {
                    val: -(a.degree().unwrap() as i64),
                    digits: s.digits,
                }
            }
        }
    }

    /// The image of `x ∈ F`, with its exact valuation and `N` correct digits.
    pub fn embed(&self, field: &RationalFunctions, x: &RationalFunction) -> LSeries {
        let _ = field;
        if x.is_zero() {
            return self.zero();
        }
        let n = self.embed_poly(x.num());
        let d = self.embed_poly(x.den());
        self.mul(&n, &self.inv(&d).unwrap())
    }

}

impl Field for LocalField {
    type Elem = LSeries;

    fn base(&self) -> &Fq {
        self.residue().base()
    }
    fn zero(&self) -> LSeries {
        LSeries {
            val: EXACT,
            digits: Vec::new(),
        }
    }
    fn one(&self) -> LSeries {
        self.from_base(FqElem::ONE)
    }
    fn is_zero(&self, a: &LSeries) -> bool {
        a.is_exact_zero()
    }
    fn add(&self, a: &LSeries, b: &LSeries) -> LSeries {
        if a.is_exact_zero() {
            return b.clone();
        }
        if b.is_exact_zero() {
            return a.clone();
        }
        let k = self.residue();
        let abs = a.abs_precision().min(b.abs_precision());
        let lo = a.val.min(b.val).min(abs);
        let n = (abs - lo) as usize;
        let mut digits = vec![k.zero(); n];
        for s in [a, b] {
            for (i, c) in s.digits.iter().enumerate() {
                let pos = s.val + i as i64 - lo;
                if pos >= n as i64 {
                    break;
                }
                let pos = pos as usize;
                digits[pos] = k.add(&digits[pos], c);
            }
        }
        self.normalize(lo, digits)
    }
    fn neg(&self, a: &LSeries) -> LSeries {
        let k = self.residue();
        LSeries {
            val: a.val,
            digits: a.digits.iter().map(|c| k.neg(c)).collect(),
        }
    }
    fn mul(&self, a: &LSeries, b: &LSeries) -> LSeries {
        if a.is_exact_zero() || b.is_exact_zero() {
            return self.zero();
        }
        let k = self.residue();
        let val = a.val + b.val;
        let n = a.digits.len().min(b.digits.len());
        let mut digits = vec![k.zero(); n];
        for (i, x) in a.digits.iter().take(n).enumerate() {
            if k.is_zero(x) {
                continue;
            }
            for (j, y) in b.digits.iter().take(n - i).enumerate() {
                if !k.is_zero(y) {
                    digits[i + j] = k.add(&digits[i + j], &k.mul(x, y));
                }
            }
        }
        self.normalize(val, digits)
    }
    fn inv(&self, a: &LSeries) -> Option<LSeries> {
        let lead = a.digits.first()?;
        let k = self.residue();
        let n = a.digits.len();
        let l_inv = k.inv(lead)?;
        let mut out: Vec<KElem> = Vec::with_capacity(n);
        out.push(l_inv.clone());
        for i in 1..n {
            let mut s = k.zero();
            for j in 1..=i {
                s = k.add(&s, &k.mul(&a.digits[j], &out[i - j]));
            }
            out.push(k.neg(&k.mul(&s, &l_inv)));
        }
        Some(LSeries { val: -a.val, digits: out })
    }
    fn from_base(&self, c: FqElem) -> LSeries {
        self.monomial(self.residue().from_base(c), 0)
    }
    fn frobenius(&self, a: &LSeries, k: u32) -> LSeries {
        if a.is_exact_zero() {
            return a.clone();
        }
        let kf = self.residue();
        let stride = (self.q() as usize).pow(k);
        let len = (a.digits.len() * stride).min(self.inner.prec);
        let mut digits = vec![kf.zero(); len];
        for (i, c) in a.digits.iter().enumerate() {
            if i * stride >= len {
                break;
            }
            digits[i * stride] = kf.frobenius(c, k);
        }
        LSeries {
            val: a.val.saturating_mul(stride as i64),
            digits,
        }
    }
    fn format_elem(&self, a: &LSeries) -> String {
        if a.is_exact_zero() {
            return "0".to_string();
        }
        let k = self.residue();
        let terms: Vec<String> = a
            .digits
            .iter()
            .enumerate()
            .filter(|(_, c)| !k.is_zero(c))
            .take(4)
            .map(|(i, c)| format!("({})*u^{}", k.format_elem(c), a.val + i as i64))
            .collect();
        format!("{} + O(u^{})", terms.join(" + "), a.abs_precision())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_field::{parse_poly, valuation};

    fn setup(place: &str, prec: usize) -> (RationalFunctions, LocalField) {
        let fq = Fq::prime(3).unwrap();
        let rf = RationalFunctions::new(fq.clone());
        let v = Place::parse(&fq, place).unwrap();
        (rf, LocalField::new(&fq, &v, prec).unwrap())
    }

    #[test]
    fn uniformizer_equation_holds() {
        for pl in ["T", "T+1", "T^2+1", "T^3+2*T+1"] {
            let (rf, lf) = setup(pl, 16);
            let l = parse_poly(rf.fq(), pl).unwrap();
            let img = lf.embed(&rf, &rf.from_poly(l));
            assert_eq!(img.valuation(), Some(1));
            let diff = lf.sub(&img, &lf.uniformizer());
            assert!(diff.valuation().is_none(), "{pl}: {diff:?}");
            assert!(diff.abs_precision() >= 16);
        }
    }

    #[test]
    fn embedding_preserves_valuation_and_is_multiplicative() {
        for pl in ["T+1", "T^2+1", "inf"] {
            let (rf, lf) = setup(pl, 12);
            let v = lf.place().clone();
            let xs = ["(T+1)^2*T/(T^2+1)", "T^4+2*T+1", "1/(T+2)^3", "T"];
            for a in xs {
                let a = rf.parse(a).unwrap();
                let ea = lf.embed(&rf, &a);
                assert_eq!(ea.valuation(), valuation(&rf, &a, &v));
                assert_eq!(ea.rel_precision(), 12);
                for b in xs {
                    let b = rf.parse(b).unwrap();
                    let lhs = lf.embed(&rf, &rf.mul(&a, &b));
                    let rhs = lf.mul(&ea, &lf.embed(&rf, &b));
                    assert_eq!(lhs, rhs);
                    let s = lf.sub(&lf.embed(&rf, &rf.add(&a, &b)), &lf.add(&ea, &lf.embed(&rf, &b)));
                    assert!(s.valuation().is_none());
                }
            }
        }
    }

    #[test]
    fn frobenius_is_qth_power() {
        let (rf, lf) = setup("T^2+1", 10);
        let x = lf.embed(&rf, &rf.parse("(T+2)/(T^2+1)").unwrap());
        let cube = lf.mul(&x, &lf.mul(&x, &x));
        assert_eq!(lf.frobenius(&x, 1), cube);
    }

    #[test]
    fn precision_is_tracked() {
        let (rf, lf) = setup("T", 8);
        let x = lf.embed(&rf, &rf.parse("T+1").unwrap());
        let d = lf.sub(&x, &lf.one());
        // T + 1 - 1 = u exactly; relative precision drops by the cancelled digit
        assert_eq!(d.valuation(), Some(1));
        assert_eq!(d.rel_precision(), 7);
        let z = lf.sub(&x, &x);
        assert!(!z.is_exact_zero());
        assert_eq!(z.valuation(), None);
        assert!(lf.inv(&z).is_none());
    }
}
