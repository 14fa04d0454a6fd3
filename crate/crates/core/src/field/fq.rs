use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{Field, FiniteFieldOps};
use crate::error::{Error, Result};

/// Largest supported constant-field size; multiplication runs through log tables.
pub const MAX_Q: u32 = 1 << 16;

/// An element of `F_q`, stored as the base-`p` integer whose digits are the
/// coefficients over `F_p` in the power basis of the generator `g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(pub u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FqInner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus over `F_p`, low degree first. `[0, 1]` for the prime field.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The constant field `F_q`, `q = p^m`.
#[derive(Clone)]
pub struct Fq {
    inner: Arc<FqInner>,
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.m == 1 {
            write!(f, "F_{}", self.inner.p)
        } else {
            write!(f, "F_{}[g]/({:?})", self.inner.p, self.inner.modulus)
        }
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fq {
    pub fn prime(p: u32) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if p > MAX_Q {
            return Err(Error::invalid(format!("q = {p} exceeds the supported maximum {MAX_Q}")));
        }
        Ok(Self::build(p, 1, vec![0, 1]))
    }

    /// `F_{p^m}` presented as `F_p[g]/(modulus)`. The modulus is given low degree first
    /// and must be monic irreducible of degree `m`.
    pub fn extension(p: u32, modulus: &[u32]) -> Result<Fq> {
        let fp = Fq::prime(p)?;
        let mut modulus: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        while modulus.last() == Some(&0) {
            modulus.pop();
        }
        if modulus.len() < 2 {
            return Err(Error::invalid("modulus must have positive degree"));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::invalid("modulus must be monic"));
        }
        let m = (modulus.len() - 1) as u32;
        if m == 1 {
            return Ok(fp);
        }
        let q = (p as u64).pow(m);
        if q > MAX_Q as u64 {
            return Err(Error::invalid(format!("q = {q} exceeds the supported maximum {MAX_Q}")));
        }
        let ring = crate::poly::PolyRing::new(fp.clone());
        let poly = crate::poly::Poly::new(modulus.iter().map(|&c| FqElem(c)).collect());
        if !crate::factor::is_irreducible(&ring, &poly) {
            return Err(Error::invalid("modulus is not irreducible over F_p"));
        }
        Ok(Self::build(p, m, modulus))
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Fq {
        let q = p.pow(m);
        let slow = |a: u32, b: u32| slow_mul(p, &modulus, a, b);
        let mut exp = vec![0u32; 2 * (q as usize - 1).max(1)];
        let mut log = vec![0u32; q as usize];
        if q == 2 {
            exp[0] = 1;
            exp[1] = 1;
        } else {
            'search: for cand in 2..q.max(3) {
                let mut x = 1u32;
                for k in 0..(q - 1) {
                    exp[k as usize] = x;
                    x = slow(x, cand);
                    if x == 1 && k + 1 < q - 1 {
                        continue 'search;
                    }
                }
                break;
            }
            for k in 0..(q - 1) as usize {
                exp[k + (q - 1) as usize] = exp[k];
            }
        }
        for k in 0..(q - 1) {
            log[exp[k as usize] as usize] = k;
        }
        Fq {
            inner: Arc::new(FqInner {
                p,
                m,
                q,
                modulus,
                exp,
                log,
            }),
        }
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn m(&self) -> u32 {
        self.inner.m
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Modulus of `F_q` over `F_p` (low degree first), `None` for a prime field.
    pub fn modulus(&self) -> Option<&[u32]> {
        (self.inner.m > 1).then_some(&self.inner.modulus[..])
    }

    /// Image of an integer under `Z -> F_p ⊂ F_q`.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// The generator `g` of `F_q` over `F_p` (equal to 0 for a prime field, where no generator symbol exists).
    pub fn generator(&self) -> Option<FqElem> {
        (self.inner.m > 1).then_some(FqElem(self.inner.p))
    }

    /// Build an element from its `F_p` coordinates in the basis `1, g, g^2, ...`.
    pub fn from_digits(&self, digits: &[u32]) -> FqElem {
        let p = self.inner.p;
        let mut acc = 0u32;
        for &d in digits.iter().take(self.inner.m as usize).rev() {
            acc = acc * p + d % p;
        }
        FqElem(acc)
    }

    pub fn digits(&self, a: FqElem) -> Vec<u32> {
        let p = self.inner.p;
        let mut x = a.0;
        (0..self.inner.m)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.inner.q).map(FqElem)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElem {
        FqElem(rng.gen_range(0..self.inner.q))
    }

    #[inline]
    pub fn add_e(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.inner.p;
        if self.inner.m == 1 {
            let s = a.0 + b.0;
            return FqElem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y, mut acc, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            acc += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        FqElem(acc)
    }

    #[inline]
    pub fn neg_e(&self, a: FqElem) -> FqElem {
        let p = self.inner.p;
        if self.inner.m == 1 {
            return FqElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let (mut x, mut acc, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            let d = x % p;
            acc += ((p - d) % p) * place;
            place *= p;
            x /= p;
        }
        FqElem(acc)
    }

    #[inline]
    pub fn sub_e(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add_e(a, self.neg_e(b))
    }

    #[inline]
    pub fn mul_e(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        if self.inner.m == 1 {
            return FqElem(((a.0 as u64 * b.0 as u64) % self.inner.p as u64) as u32);
        }
        let i = self.inner.log[a.0 as usize] + self.inner.log[b.0 as usize];
        FqElem(self.inner.exp[i as usize])
    }

    #[inline]
    pub fn inv_e(&self, a: FqElem) -> Option<FqElem> {
        if a.0 == 0 {
            return None;
        }
        let q1 = self.inner.q - 1;
        let l = self.inner.log[a.0 as usize];
        Some(FqElem(self.inner.exp[((q1 - l) % q1) as usize]))
    }

    pub fn pow_e(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.0 == 0 {
            return FqElem::ZERO;
        }
        let q1 = (self.inner.q - 1) as u64;
        let l = self.inner.log[a.0 as usize] as u64;
        FqElem(self.inner.exp[((l * (e % q1)) % q1) as usize])
    }

    pub fn format_e(&self, a: FqElem) -> String {
        if self.inner.m == 1 {
            return a.0.to_string();
        }
        let digits = self.digits(a);
        let mut terms = Vec::new();
        for (i, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            };
            terms.push(match (d, i) {
                (_, 0) => d.to_string(),
                (1, _) => mon,
                _ => format!("{d}*{mon}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

fn slow_mul(p: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let m = modulus.len() - 1;
    let dig = |mut x: u32| {
        let mut v = vec![0u32; m];
        for d in v.iter_mut() {
            *d = x % p;
            x /= p;
        }
        v
    };
    let (da, db) = (dig(a), dig(b));
    let mut prod = vec![0u64; 2 * m];
    for i in 0..m {
        for j in 0..m {
            prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p as u64;
        }
    }
    for k in (m..2 * m).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (i, &mc) in modulus.iter().enumerate().take(m) {
            let idx = k - m + i;
            prod[idx] = (prod[idx] + (p as u64 - c) * mc as u64) % p as u64;
        }
        prod[k] = 0;
    }
    let mut acc = 0u32;
    for k in (0..m).rev() {
        acc = acc * p + prod[k] as u32;
    }
    acc
}

impl Field for Fq {
    type Elem = FqElem;

    fn base(&self) -> &Fq {
        self
    }
    fn zero(&self) -> FqElem {
        FqElem::ZERO
    }
    fn one(&self) -> FqElem {
        FqElem::ONE
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.0 == 0
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add_e(*a, *b)
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        self.neg_e(*a)
    }
    fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.sub_e(*a, *b)
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.mul_e(*a, *b)
    }
    fn inv(&self, a: &FqElem) -> Option<FqElem> {
        self.inv_e(*a)
    }
    fn from_base(&self, c: FqElem) -> FqElem {
        c
    }
    fn frobenius(&self, a: &FqElem, _k: u32) -> FqElem {
        *a
    }
    fn pow(&self, a: &FqElem, e: u64) -> FqElem {
        self.pow_e(*a, e)
    }
    fn format_elem(&self, a: &FqElem) -> String {
        self.format_e(*a)
    }
}

impl FiniteFieldOps for Fq {
    fn degree(&self) -> usize {
        1
    }
    fn to_coords(&self, a: &FqElem) -> Vec<FqElem> {
        vec![*a]
    }
    fn from_coords(&self, c: &[FqElem]) -> FqElem {
        c.first().copied().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverses() {
        let f = Fq::prime(7).unwrap();
        for a in 1..7 {
            let inv = f.inv_e(FqElem(a)).unwrap();
            assert_eq!(f.mul_e(FqElem(a), inv), FqElem::ONE);
        }
        assert!(Fq::prime(9).is_err());
    }

    #[test]
    fn f9_is_a_field() {
        // g^2 + 1 over F_3
        let f = Fq::extension(3, &[1, 0, 1]).unwrap();
        assert_eq!(f.q(), 9);
        let g = f.generator().unwrap();
        assert_eq!(f.add_e(f.mul_e(g, g), FqElem::ONE), FqElem::ZERO);
        for a in f.elements().skip(1) {
            assert_eq!(f.mul_e(a, f.inv_e(a).unwrap()), FqElem::ONE);
            assert_eq!(f.pow_e(a, 8), FqElem::ONE);
        }
        assert!(Fq::extension(3, &[2, 0, 1]).is_err(), "g^2 - 1 is reducible");
    }

    #[test]
    fn f4_arithmetic() {
        let f = Fq::extension(2, &[1, 1, 1]).unwrap();
        let g = f.generator().unwrap();
        // g^2 = g + 1
        assert_eq!(f.mul_e(g, g), f.add_e(g, FqElem::ONE));
        assert_eq!(f.format_e(f.add_e(g, FqElem::ONE)), "g+1");
    }
}
