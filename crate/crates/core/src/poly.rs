//! Dense univariate polynomials over any [`Field`].

use crate::field::{Field, FqElem};

/// Dense coefficient vector, lowest degree first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E> Poly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lc(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.coeffs.get(i)
    }
}

impl Poly<FqElem> {
    pub fn new(mut coeffs: Vec<FqElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_u32(coeffs: &[u32]) -> Self {
        Self::new(coeffs.iter().map(|&c| FqElem(c)).collect())
    }

    /// Leading-coefficient-first comparison key; orders polynomials of equal degree lexicographically.
    pub fn lex_key(&self) -> (usize, Vec<u32>) {
        (
            self.coeffs.len(),
            self.coeffs.iter().rev().map(|c| c.0).collect(),
        )
    }
}

/// Polynomial ring `K[x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing<K: Field> {
    field: K,
}

impl<K: Field> PolyRing<K> {
    pub fn new(field: K) -> Self {
        PolyRing { field }
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn from_coeffs(&self, mut coeffs: Vec<K::Elem>) -> Poly<K::Elem> {
        while coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero(&self) -> Poly<K::Elem> {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(&self) -> Poly<K::Elem> {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: K::Elem) -> Poly<K::Elem> {
        self.from_coeffs(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(&self, c: K::Elem, k: usize) -> Poly<K::Elem> {
        if self.field.is_zero(&c) {
            return self.zero();
        }
        let mut v = vec![self.field.zero(); k + 1];
        v[k] = c;
        Poly { coeffs: v }
    }

    pub fn x(&self) -> Poly<K::Elem> {
        self.monomial(self.field.one(), 1)
    }

    pub fn is_one(&self, a: &Poly<K::Elem>) -> bool {
        a.coeffs.len() == 1 && self.field.is_one(&a.coeffs[0])
    }

    pub fn is_monic(&self, a: &Poly<K::Elem>) -> bool {
        a.lc().is_some_and(|c| self.field.is_one(c))
    }

    pub fn add(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        let f = &self.field;
        let n = a.len().max(b.len());
        let v = (0..n)
            .map(|i| match (a.coeffs.get(i), b.coeffs.get(i)) {
                (Some(x), Some(y)) => f.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.from_coeffs(v)
    }

    pub fn neg(&self, a: &Poly<K::Elem>) -> Poly<K::Elem> {
        Poly {
            coeffs: a.coeffs.iter().map(|c| self.field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, c: &K::Elem, a: &Poly<K::Elem>) -> Poly<K::Elem> {
        if self.field.is_zero(c) {
            return self.zero();
        }
        self.from_coeffs(a.coeffs.iter().map(|x| self.field.mul(c, x)).collect())
    }

    /// `a * x^k`.
    pub fn shift(&self, a: &Poly<K::Elem>, k: usize) -> Poly<K::Elem> {
        if a.is_zero() {
            return self.zero();
        }
        let mut v = vec![self.field.zero(); k];
        v.extend(a.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn mul(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let f = &self.field;
        let mut v = vec![f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if f.is_zero(y) {
                    continue;
                }
                v[i + j] = f.add(&v[i + j], &f.mul(x, y));
            }
        }
        self.from_coeffs(v)
    }

    /// Product truncated below `x^n`.
    pub fn mul_trunc(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>, n: usize) -> Poly<K::Elem> {
        if a.is_zero() || b.is_zero() || n == 0 {
            return self.zero();
        }
        let f = &self.field;
        let len = (a.len() + b.len() - 1).min(n);
        let mut v = vec![f.zero(); len];
        for (i, x) in a.coeffs.iter().enumerate().take(len) {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                v[i + j] = f.add(&v[i + j], &f.mul(x, y));
            }
        }
        self.from_coeffs(v)
    }

    pub fn truncate(&self, a: &Poly<K::Elem>, n: usize) -> Poly<K::Elem> {
        self.from_coeffs(a.coeffs.iter().take(n).cloned().collect())
    }

    pub fn pow(&self, a: &Poly<K::Elem>, mut e: u64) -> Poly<K::Elem> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> (Poly<K::Elem>, Poly<K::Elem>) {
        let f = &self.field;
        let db = b.degree().expect("division by the zero polynomial");
        let lc_inv = f.inv(b.lc().unwrap()).expect("leading coefficient must be invertible");
        let mut r = a.coeffs.clone();
        if r.len() <= db {
            return (self.zero(), a.clone());
        }
        let mut q = vec![f.zero(); r.len() - db];
        for k in (db..r.len()).rev() {
            let c = f.mul(&r[k], &lc_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                let idx = k - db + i;
                r[idx] = f.sub(&r[idx], &f.mul(&c, bc));
            }
            q[k - db] = c;
        }
        r.truncate(db);
        (self.from_coeffs(q), self.from_coeffs(r))
    }

    pub fn rem(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        if a.len() <= b.len().saturating_sub(1) {
            return a.clone();
        }
        self.divrem(a, b).1
    }

    pub fn divides(&self, d: &Poly<K::Elem>, a: &Poly<K::Elem>) -> bool {
        self.rem(a, d).is_zero()
    }

    /// Exact quotient `a / b`, `None` when `b` does not divide `a`.
    pub fn div_exact(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Option<Poly<K::Elem>> {
        let (q, r) = self.divrem(a, b);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self, a: &Poly<K::Elem>) -> Poly<K::Elem> {
        match a.lc() {
            None => self.zero(),
            Some(c) => {
                let inv = self.field.inv(c).expect("nonzero leading coefficient");
                self.scale(&inv, a)
            }
        }
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Extended gcd: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn xgcd(
        &self,
        a: &Poly<K::Elem>,
        b: &Poly<K::Elem>,
    ) -> (Poly<K::Elem>, Poly<K::Elem>, Poly<K::Elem>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1);
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.lc() {
            None => (r0, s0, t0),
            Some(c) => {
                let inv = self.field.inv(c).unwrap();
                (
                    self.scale(&inv, &r0),
                    self.scale(&inv, &s0),
                    self.scale(&inv, &t0),
                )
            }
        }
    }

    pub fn eval(&self, a: &Poly<K::Elem>, x: &K::Elem) -> K::Elem {
        let f = &self.field;
        a.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn derivative(&self, a: &Poly<K::Elem>) -> Poly<K::Elem> {
        let f = &self.field;
        let v = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(&f.from_base(f.base().from_int(i as i64)), c))
            .collect();
        self.from_coeffs(v)
    }

    pub fn mulmod(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>, m: &Poly<K::Elem>) -> Poly<K::Elem> {
        self.rem(&self.mul(a, b), m)
    }

    pub fn powmod(&self, a: &Poly<K::Elem>, mut e: u64, m: &Poly<K::Elem>) -> Poly<K::Elem> {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&self.one(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = self.mulmod(&base, &base, m);
            }
        }
        acc
    }

    /// Apply the coefficient Frobenius `c -> c^(q^k)` to every coefficient.
    pub fn map_frobenius(&self, a: &Poly<K::Elem>, k: u32) -> Poly<K::Elem> {
        Poly {
            coeffs: a.coeffs.iter().map(|c| self.field.frobenius(c, k)).collect(),
        }
    }

    /// Render with the given variable name, highest degree first, e.g. `T^3+2*T+1`.
    pub fn format(&self, a: &Poly<K::Elem>, var: &str) -> String {
        if a.is_zero() {
            return "0".to_string();
        }
        let f = &self.field;
        let mut out = String::new();
        for (i, c) in a.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let cs = f.format_elem(c);
            let mon = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let compound = cs.contains('+') || cs.contains('-') || cs.contains('/');
            let term = if i == 0 {
                cs
            } else if f.is_one(c) {
                mon
            } else if compound {
                format!("({cs})*{mon}")
            } else {
                format!("{cs}*{mon}")
            };
            if !out.is_empty() {
                out.push('+');
            }
            out.push_str(&term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fq;

    fn ring() -> PolyRing<Fq> {
        PolyRing::new(Fq::prime(5).unwrap())
    }

    #[test]
    fn divrem_reconstructs() {
        let r = ring();
        let a = Poly::from_u32(&[1, 2, 3, 4, 1]);
        let b = Poly::from_u32(&[2, 0, 1]);
        let (q, rem) = r.divrem(&a, &b);
        assert_eq!(r.add(&r.mul(&q, &b), &rem), a);
        assert!(rem.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn xgcd_identity() {
        let r = ring();
        let a = Poly::from_u32(&[4, 0, 1]); // (x-2)(x+2)... x^2 - 1 over F_5
        let b = Poly::from_u32(&[1, 1]); // x + 1
        let (g, s, t) = r.xgcd(&a, &b);
        assert_eq!(g, Poly::from_u32(&[1, 1]));
        assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&t, &b)), g);
    }

    #[test]
    fn formatting() {
        let r = ring();
        assert_eq!(r.format(&Poly::from_u32(&[1, 2, 0, 1]), "T"), "T^3+2*T+1");
        assert_eq!(r.format(&r.zero(), "T"), "0");
    }
}
