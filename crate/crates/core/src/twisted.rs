//! The twisted polynomial ring `K{τ}` with `τ·α = α^q·τ`, and its identification
//! with `F_q`-linear polynomials under composition.

use std::collections::BTreeMap;
use std::fmt;

use crate::base_field::text::{unknown_symbol, ExprTarget};
use crate::base_field::{FTarget, RationalFunctions};
use crate::error::{Error, Result};
use crate::field::Field;

/// `Σ a_i τ^i` over the field `K`. The field travels with the value so that
/// mixing elements of different fields is caught at run time.
#[derive(Clone)]
pub struct TwistedPoly<K: Field> {
    field: K,
    coeffs: Vec<K::Elem>,
}

impl<K: Field> PartialEq for TwistedPoly<K> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl<K: Field> fmt::Debug for TwistedPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwistedPoly({})", self.format())
    }
}

/// Height, degree, formal derivative and separability of a nonzero twisted polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants<E> {
    pub ht: usize,
    pub deg: usize,
    pub derivative: E,
    pub separable: bool,
}

impl<K: Field> TwistedPoly<K> {
    pub fn new(field: &K, mut coeffs: Vec<K::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        TwistedPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &K) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &K) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &K, c: K::Elem) -> Self {
        Self::new(field, vec![c])
    }

    /// `c·τ^k`.
    pub fn monomial(field: &K, c: K::Elem, k: usize) -> Self {
        let mut v = vec![field.zero(); k];
        v.push(c);
        Self::new(field, v)
    }

    pub fn tau(field: &K) -> Self {
        Self::monomial(field, field.one(), 1)
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn coeffs(&self) -> &[K::Elem] {
        &self.coeffs
    }

    /// Coefficient of `τ^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> K::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Result<usize> {
        self.coeffs.len().checked_sub(1).ok_or(Error::ZeroTwisted)
    }

    pub fn ht(&self) -> Result<usize> {
        self.coeffs
            .iter()
            .position(|c| !self.field.is_zero(c))
            .ok_or(Error::ZeroTwisted)
    }

    /// `∂f = a_0`; zero for the zero element.
    pub fn derivative(&self) -> K::Elem {
        self.coeff(0)
    }

    pub fn is_separable(&self) -> Result<bool> {
        Ok(self.ht()? == 0)
    }

    pub fn invariants(&self) -> Result<Invariants<K::Elem>> {
        let ht = self.ht()?;
        Ok(Invariants {
            ht,
            deg: self.deg()?,
            derivative: self.derivative(),
            separable: ht == 0,
        })
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => f.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Ok(Self::new(f, v))
    }

    pub fn neg(&self) -> Self {
        let v = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Self::new(&self.field, v)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `f·g` under `τ^i·b = b^(q^i)·τ^i`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let f = &self.field;
        let (n, m) = (self.coeffs.len(), other.coeffs.len());
        let mut out = vec![f.zero(); n + m - 1];
        // twisted[j] holds b_j^(q^i) for the current i
        let mut twisted: Vec<K::Elem> = other.coeffs.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                for b in twisted.iter_mut() {
                    if !f.is_zero(b) {
                        *b = f.frobenius(b, 1);
                    }
                }
            }
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in twisted.iter().enumerate() {
                if !f.is_zero(b) {
                    out[i + j] = f.add(&out[i + j], &f.mul(a, b));
                }
            }
        }
        Ok(Self::new(f, out))
    }

    /// `c·f`.
    pub fn scale_left(&self, c: &K::Elem) -> Self {
        let v = self.coeffs.iter().map(|a| self.field.mul(c, a)).collect();
        Self::new(&self.field, v)
    }

    /// `f·c = Σ a_i c^(q^i) τ^i`.
    pub fn scale_right(&self, c: &K::Elem) -> Self {
        let f = &self.field;
        let mut cq = c.clone();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                cq = f.frobenius(&cq, 1);
            }
            v.push(f.mul(a, &cq));
        }
        Self::new(f, v)
    }

    /// Value of `η(f)` at `x`.
    pub fn evaluate(&self, x: &K::Elem) -> K::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        let mut xq = x.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xq = f.frobenius(&xq, 1);
            }
            if !f.is_zero(a) {
                acc = f.add(&acc, &f.mul(a, &xq));
            }
        }
        acc
    }

    /// Push coefficients through a field homomorphism `K → L`.
    pub fn map_coeffs<L: Field>(&self, target: &L, map: impl Fn(&K::Elem) -> L::Elem) -> TwistedPoly<L> {
        TwistedPoly::new(target, self.coeffs.iter().map(map).collect())
    }

    /// `η(f) = Σ a_i x^(q^i)`.
    pub fn eta(&self) -> SparsePoly<K::Elem> {
        let q = self.field.q();
        let mut terms = BTreeMap::new();
        let mut e = 1u64;
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                e = e.checked_mul(q).expect("x-degree overflows u64");
            }
            if !self.field.is_zero(a) {
                terms.insert(e, a.clone());
            }
        }
        SparsePoly { terms }
    }

    /// Inverse of [`eta`](Self::eta); rejects exponents that are not powers of `q`.
    pub fn eta_inv(field: &K, g: &SparsePoly<K::Elem>) -> Result<Self> {
        let q = field.q();
        let mut coeffs = Vec::new();
        for (&e, c) in &g.terms {
            if field.is_zero(c) {
                continue;
            }
            let mut k = 0usize;
            let mut pw = 1u64;
            while pw < e {
                pw = pw.saturating_mul(q);
                k += 1;
            }
            if pw != e {
                return Err(Error::NotLinear);
            }
            if coeffs.len() <= k {
                coeffs.resize(k + 1, field.zero());
            }
            coeffs[k] = c.clone();
        }
        Ok(Self::new(field, coeffs))
    }

    /// Text form: ascending powers of `t` (standing for `τ`), e.g. `T + 1*t^1`.
    pub fn format(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let f = &self.field;
        let mut parts = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            let s = f.format_elem(a);
            if i == 0 {
                parts.push(s);
            } else if s.contains(['+', '-', '/', ' ']) {
                parts.push(format!("({s})*t^{i}"));
            } else {
                parts.push(format!("{s}*t^{i}"));
            }
        }
        parts.join(" + ")
    }
}

impl TwistedPoly<RationalFunctions> {
    /// Parse the text form over `F_q(T)`.
    pub fn parse(field: &RationalFunctions, s: &str) -> Result<Self> {
        TwistedTarget {
            field,
            coeff: FTarget { field },
        }
        .parse(s)
    }
}

/// Parser target for twisted polynomials: `t` is `τ`, every other symbol is
/// delegated to the coefficient target.
pub struct TwistedTarget<'a, K: Field, C: ExprTarget<Value = K::Elem>> {
    pub field: &'a K,
    pub coeff: C,
}

impl<K: Field, C: ExprTarget<Value = K::Elem>> ExprTarget for TwistedTarget<'_, K, C> {
    type Value = TwistedPoly<K>;

    fn int(&self, n: u64) -> Result<TwistedPoly<K>> {
        Ok(TwistedPoly::constant(self.field, self.coeff.int(n)?))
    }
    fn sym(&self, name: &str) -> Result<TwistedPoly<K>> {
        if name == "t" {
            return Ok(TwistedPoly::tau(self.field));
        }
        match self.coeff.sym(name) {
            Ok(c) => Ok(TwistedPoly::constant(self.field, c)),
            Err(_) => unknown_symbol(name),
        }
    }
    fn add(&self, a: &TwistedPoly<K>, b: &TwistedPoly<K>) -> Result<TwistedPoly<K>> {
        a.add(b)
    }
    fn neg(&self, a: &TwistedPoly<K>) -> Result<TwistedPoly<K>> {
        Ok(a.neg())
    }
    fn mul(&self, a: &TwistedPoly<K>, b: &TwistedPoly<K>) -> Result<TwistedPoly<K>> {
        a.mul(b)
    }
    fn div(&self, a: &TwistedPoly<K>, b: &TwistedPoly<K>) -> Result<TwistedPoly<K>> {
        // right division by a nonzero constant
        match b.coeffs() {
            [c] => {
                let inv = self.field.inv(c).unwrap();
                Ok(a.scale_right(&inv))
            }
            [] => Err(Error::parse("/", "division by zero")),
            _ => Err(Error::parse("/", "can only divide by a constant")),
        }
    }
}

/// A sparse ordinary polynomial in `x`, exponent → coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly<E> {
    pub terms: BTreeMap<u64, E>,
}

impl<E: Clone> SparsePoly<E> {
    pub fn x<K: Field<Elem = E>>(field: &K) -> Self {
        SparsePoly {
            terms: BTreeMap::from([(1, field.one())]),
        }
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add<K: Field<Elem = E>>(&self, field: &K, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let v = match terms.get(e) {
                Some(a) => field.add(a, c),
                None => c.clone(),
            };
            if field.is_zero(&v) {
                terms.remove(e);
            } else {
                terms.insert(*e, v);
            }
        }
        SparsePoly { terms }
    }

    /// Ordinary (commutative) product.
    pub fn mul<K: Field<Elem = E>>(&self, field: &K, other: &Self) -> Self {
        let mut terms: BTreeMap<u64, E> = BTreeMap::new();
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let p = field.mul(a, b);
                let e = ea + eb;
                let v = match terms.get(&e) {
                    Some(c) => field.add(c, &p),
                    None => p,
                };
                terms.insert(e, v);
            }
        }
        terms.retain(|_, c| !field.is_zero(c));
        SparsePoly { terms }
    }

    pub fn scale<K: Field<Elem = E>>(&self, field: &K, c: &E) -> Self {
        let mut terms: BTreeMap<u64, E> =
            self.terms.iter().map(|(e, a)| (*e, field.mul(c, a))).collect();
        terms.retain(|_, c| !field.is_zero(c));
        SparsePoly { terms }
    }

    /// `self(g(x))`, computed with ordinary multiplication only. Powers `g^(q^i)`
    /// are built by repeated `q`-fold products, other exponents by square-and-multiply.
    pub fn compose<K: Field<Elem = E>>(&self, field: &K, g: &Self) -> Self {
        let q = field.q();
        let one = SparsePoly {
            terms: BTreeMap::from([(0, field.one())]),
        };
        let mut qpows: Vec<(u64, Self)> = vec![(1, g.clone())];
        let mut out = SparsePoly {
            terms: BTreeMap::new(),
        };
        for (&e, c) in &self.terms {
            let gp = if e == 0 {
                one.clone()
            } else if e.is_power_of_base(q) {
                while qpows.last().unwrap().0 < e {
                    let (pe, prev) = qpows.last().unwrap().clone();
                    let mut acc = prev.clone();
                    for _ in 1..q {
                        acc = acc.mul(field, &prev);
                    }
                    qpows.push((pe * q, acc));
                }
                qpows.iter().find(|(pe, _)| *pe == e).unwrap().1.clone()
            } else {
                let mut acc = one.clone();
                let mut base = g.clone();
                let mut k = e;
                while k > 0 {
                    if k & 1 == 1 {
                        acc = acc.mul(field, &base);
                    }
                    k >>= 1;
                    if k > 0 {
                        base = base.mul(field, &base);
                    }
                }
                acc
            };
            out = out.add(field, &gp.scale(field, c));
        }
        out
    }

    /// Evaluate at `x` by plain powering.
    pub fn eval<K: Field<Elem = E>>(&self, field: &K, x: &E) -> E {
        let mut acc = field.zero();
        for (&e, c) in &self.terms {
            acc = field.add(&acc, &field.mul(c, &field.pow(x, e)));
        }
        acc
    }
}

trait PowerOfBase {
    fn is_power_of_base(self, b: u64) -> bool;
}

impl PowerOfBase for u64 {
    fn is_power_of_base(self, b: u64) -> bool {
        let mut x = 1u64;
        while x < self {
            x = x.saturating_mul(b);
        }
        x == self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FiniteField, FiniteFieldOps, Fq};
    use crate::poly::Poly;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f3() -> RationalFunctions {
        RationalFunctions::new(Fq::prime(3).unwrap())
    }

    fn tw(f: &RationalFunctions, s: &str) -> TwistedPoly<RationalFunctions> {
        TwistedPoly::parse(f, s).unwrap()
    }

    #[test]
    fn tau_times_t() {
        let f = f3();
        assert_eq!(tw(&f, "t").mul(&tw(&f, "T")).unwrap(), tw(&f, "T^3*t"));
        assert_eq!(tw(&f, "t*T"), tw(&f, "T^3*t"));
    }

    #[test]
    fn square_of_carlitz() {
        let f = f3();
        let x = tw(&f, "T+t");
        assert_eq!(x.mul(&x).unwrap(), tw(&f, "T^2 + (T+T^3)*t + t^2"));
        assert_eq!(TwistedPoly::one(&f).mul(&x).unwrap(), x);
    }

    #[test]
    fn eta_examples() {
        let f = f3();
        let e = tw(&f, "t^2 + T*t + 2").eta();
        let keys: Vec<u64> = e.terms.keys().copied().collect();
        assert_eq!(keys, vec![1, 3, 9]);
        assert_eq!(TwistedPoly::one(&f).eta(), SparsePoly::x(&f));
        let lhs = tw(&f, "t").mul(&tw(&f, "T*t")).unwrap().eta();
        let rhs = tw(&f, "t").eta().compose(&f, &tw(&f, "T*t").eta());
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.terms.get(&9), Some(&f.parse("T^3").unwrap()));
    }

    #[test]
    fn eta_inv_rejects_nonlinear() {
        let f = f3();
        let mut sp = SparsePoly::x(&f);
        sp.terms.insert(2, f.one());
        assert_eq!(TwistedPoly::eta_inv(&f, &sp), Err(Error::NotLinear));
        let g = tw(&f, "T + (T+1)*t^2");
        assert_eq!(TwistedPoly::eta_inv(&f, &g.eta()).unwrap(), g);
    }

    #[test]
    fn invariants_examples() {
        let f = f3();
        let i = tw(&f, "t^2+t").invariants().unwrap();
        assert_eq!((i.ht, i.deg, i.separable), (1, 2, false));
        assert!(f.is_zero(&i.derivative));
        let i = tw(&f, "T+t").invariants().unwrap();
        assert_eq!((i.ht, i.deg, i.separable), (0, 1, true));
        assert_eq!(i.derivative, f.t());
        let i = tw(&f, "t").invariants().unwrap();
        assert_eq!((i.ht, i.deg, i.separable), (1, 1, false));
        assert_eq!(TwistedPoly::zero(&f).ht(), Err(Error::ZeroTwisted));
        assert!(f.is_zero(&TwistedPoly::zero(&f).derivative()));
    }

    #[test]
    fn evaluate_over_residue_field() {
        // T + τ reduced at (T+1): -1 + τ, at x = 1 gives 0
        let fq = Fq::prime(3).unwrap();
        let k = FiniteField::new(fq.clone(), Poly::from_u32(&[1, 1])).unwrap();
        let f = TwistedPoly::new(&k, vec![k.from_base(fq.from_int(-1)), k.one()]);
        assert!(k.is_zero(&f.evaluate(&k.one())));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = TwistedPoly::tau(&f3());
        let b = TwistedPoly::tau(&RationalFunctions::new(Fq::prime(5).unwrap()));
        assert_eq!(a.mul(&b), Err(Error::MixedFields));
    }

    #[test]
    fn format_round_trips() {
        let f = f3();
        let x = tw(&f, "T+t");
        assert_eq!(x.format(), "T + 1*t^1");
        for s in ["T + 1*t^1", "0", "(T+1)/(T^2+2) + (2*T)*t^3", "t^2*(T+1)*t"] {
            let x = tw(&f, s);
            assert_eq!(tw(&f, &x.format()), x);
        }
        assert!(matches!(TwistedPoly::parse(&f, "T + s"), Err(Error::Parse { token, .. }) if token == "s"));
    }

    fn random_f27(seed: u64, n: usize) -> (FiniteField, Vec<TwistedPoly<FiniteField>>, Vec<Vec<crate::field::FqElem>>) {
        let fq = Fq::prime(3).unwrap();
        let k = FiniteField::new(fq, Poly::from_u32(&[1, 2, 0, 1])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let polys = (0..n)
            .map(|_| {
                let d = rng.gen_range(0..4);
                TwistedPoly::new(&k, (0..=d).map(|_| k.random_elem(&mut rng)).collect())
            })
            .collect();
        let xs = (0..n).map(|_| k.random_elem(&mut rng)).collect();
        (k, polys, xs)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws_and_evaluation(seed in any::<u64>()) {
            let (_, p, xs) = random_f27(seed, 3);
            let (a, b, c) = (&p[0], &p[1], &p[2]);
            prop_assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(c).unwrap()).unwrap(),
                a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.add(b).unwrap().mul(c).unwrap(),
                a.mul(c).unwrap().add(&b.mul(c).unwrap()).unwrap()
            );
            let ab = a.mul(b).unwrap();
            if !a.is_zero() && !b.is_zero() {
                prop_assert_eq!(ab.deg().unwrap(), a.deg().unwrap() + b.deg().unwrap());
                prop_assert_eq!(ab.ht().unwrap(), a.ht().unwrap() + b.ht().unwrap());
            }
            prop_assert_eq!(ab.evaluate(&xs[0]), a.evaluate(&b.evaluate(&xs[0])));
            let k = a.field();
            prop_assert_eq!(
                a.evaluate(&k.add(&xs[0], &xs[1])),
                k.add(&a.evaluate(&xs[0]), &a.evaluate(&xs[1]))
            );
            prop_assert_eq!(a.eta().eval(k, &xs[2]), a.evaluate(&xs[2]));
        }

        #[test]
        fn eta_is_multiplicative(seed in any::<u64>()) {
            let (k, p, _) = random_f27(seed, 2);
            let lhs = p[0].mul(&p[1]).unwrap().eta();
            let rhs = p[0].eta().compose(&k, &p[1].eta());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
