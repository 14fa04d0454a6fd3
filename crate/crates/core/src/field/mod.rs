//! Coefficient-field interface shared by every ring in the crate.
//!
//! Fields are runtime objects (a prime, a modulus, a precision) and elements
//! are plain data; all arithmetic goes through the field value. The q-power
//! Frobenius is part of the interface because twisted multiplication calls it
//! in its inner loop and every implementor has a cheaper form than `pow`.

pub(crate) mod ext;
mod fq;

pub use ext::{Embedding, FiniteField};
pub use fq::{Fq, FqElem};

use rand::Rng;
use std::fmt::Debug;
use std::hash::Hash;

pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn base(&self) -> &Fq;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero (or, for approximate fields, an element with no known nonzero digit).
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// The structural embedding of the constants `F_q`.
    fn from_base(&self, c: FqElem) -> Self::Elem;
    /// `a^(q^k)`.
    fn frobenius(&self, a: &Self::Elem, k: u32) -> Self::Elem;
    fn format_elem(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn scale(&self, c: FqElem, a: &Self::Elem) -> Self::Elem {
        self.mul(&self.from_base(c), a)
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
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

    fn q(&self) -> u64 {
        self.base().q() as u64
    }
}

/// Finite extensions of `F_q`, viewed as `F_q`-vector spaces.
pub trait FiniteFieldOps: Field {
    /// Degree over `F_q`.
    fn degree(&self) -> usize;
    fn to_coords(&self, a: &Self::Elem) -> Vec<FqElem>;
    fn from_coords(&self, c: &[FqElem]) -> Self::Elem;

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        let fq = self.base();
        let c: Vec<FqElem> = (0..self.degree()).map(|_| fq.random(rng)).collect();
        self.from_coords(&c)
    }

    /// The `F_q`-basis element `e_i`.
    fn basis_elem(&self, i: usize) -> Self::Elem {
        let mut c = vec![FqElem::ZERO; self.degree()];
        c[i] = FqElem::ONE;
        self.from_coords(&c)
    }

    /// Enumerates every element in coordinate order; only sensible for small fields.
    fn element_at(&self, mut index: u64) -> Self::Elem {
        let q = self.base().q() as u64;
        let c: Vec<FqElem> = (0..self.degree())
            .map(|_| {
                let d = (index % q) as u32;
                index /= q;
                FqElem(d)
            })
            .collect();
        self.from_coords(&c)
    }
}
