use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{Field, FiniteFieldOps, Fq, FqElem};
use crate::error::{Error, Result};
use crate::factor;
use crate::poly::{Poly, PolyRing};

struct Inner {
    fq: Fq,
    modulus: Poly<FqElem>,
    /// Column `i` holds the coordinates of `(x^i)^q`.
    frob: Vec<Vec<FqElem>>,
    var: String,
}

/// The finite field `F_q[x]/(G)` for a monic irreducible `G`, with elements
/// stored as coordinate vectors of length `deg G` in the power basis.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<Inner>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.fq == other.inner.fq && self.inner.modulus == other.inner.modulus)
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = PolyRing::new(self.inner.fq.clone());
        write!(
            f,
            "{:?}[{}]/({})",
            self.inner.fq,
            self.inner.var,
            ring.format(&self.inner.modulus, &self.inner.var)
        )
    }
}

impl FiniteField {
    pub fn new(fq: Fq, modulus: Poly<FqElem>) -> Result<Self> {
        let ring = PolyRing::new(fq.clone());
        if !ring.is_monic(&modulus) {
            return Err(Error::invalid("field modulus must be monic"));
        }
        if !factor::is_irreducible(&ring, &modulus) {
            return Err(Error::invalid("field modulus must be irreducible"));
        }
        Ok(Self::new_unchecked(fq, modulus))
    }

    /// Caller guarantees `modulus` is monic irreducible.
    pub fn new_unchecked(fq: Fq, modulus: Poly<FqElem>) -> Self {
        let d = modulus.degree().expect("nonconstant modulus");
        let ring = PolyRing::new(fq.clone());
        let xq = ring.powmod(&ring.x(), fq.q() as u64, &modulus);
        let mut frob = Vec::with_capacity(d);
        let mut cur = ring.one();
        for _ in 0..d {
            let mut col = cur.coeffs().to_vec();
            col.resize(d, FqElem::ZERO);
            frob.push(col);
            cur = ring.mulmod(&cur, &xq, &modulus);
        }
        FiniteField {
            inner: Arc::new(Inner {
                fq,
                modulus,
                frob,
                var: "x".to_string(),
            }),
        }
    }

    /// `F_q` itself, presented as `F_q[x]/(x)`.
    pub fn constant_field(fq: Fq) -> Self {
        Self::new_unchecked(fq, Poly::from_u32(&[0, 1]))
    }

    pub fn modulus(&self) -> &Poly<FqElem> {
        &self.inner.modulus
    }

    /// The class of `x`.
    pub fn gen(&self) -> Vec<FqElem> {
        let d = self.degree();
        let mut v = vec![FqElem::ZERO; d];
        if d == 1 {
            // x = -G(0) in F_q[x]/(x - c)
            v[0] = self.inner.fq.neg_e(self.inner.modulus.coeffs()[0]);
        } else {
            v[1] = FqElem::ONE;
        }
        v
    }

    /// Reduce a polynomial over `F_q` into the field (i.e. evaluate at `x`).
    pub fn from_poly(&self, a: &Poly<FqElem>) -> Vec<FqElem> {
        let ring = PolyRing::new(self.inner.fq.clone());
        let r = ring.rem(a, &self.inner.modulus);
        let mut v = r.into_coeffs();
        v.resize(self.degree(), FqElem::ZERO);
        v
    }

    pub fn to_poly(&self, a: &[FqElem]) -> Poly<FqElem> {
        Poly::new(a.to_vec())
    }

    /// A degree-`e` extension `E ⊇ self` with an explicit embedding, the modulus of `E`
    /// chosen by seeded random search.
    pub fn extension<R: Rng + ?Sized>(&self, e: usize, rng: &mut R) -> (FiniteField, Embedding) {
        let fq = self.inner.fq.clone();
        let ring = PolyRing::new(fq.clone());
        let big = if e == 1 {
            self.clone()
        } else {
            let g = factor::random_irreducible(&ring, self.degree() * e, rng);
            FiniteField::new_unchecked(fq, g)
        };
        let emb = Embedding::new(self, &big, rng);
        (big, emb)
    }

    fn reduce(&self, mut v: Vec<FqElem>) -> Vec<FqElem> {
        let fq = &self.inner.fq;
        let m = self.inner.modulus.coeffs();
        let d = m.len() - 1;
        for k in (d..v.len()).rev() {
            let c = v[k];
            if c.is_zero() {
                continue;
            }
            for i in 0..d {
                if !m[i].is_zero() {
                    v[k - d + i] = fq.sub_e(v[k - d + i], fq.mul_e(c, m[i]));
                }
            }
        }
        v.truncate(d);
        v.resize(d, FqElem::ZERO);
        v
    }

    fn frob_once(&self, a: &[FqElem]) -> Vec<FqElem> {
        let fq = &self.inner.fq;
        let d = a.len();
        let mut out = vec![FqElem::ZERO; d];
        for (i, &c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // c^q = c for c in F_q
            for (j, &m) in self.inner.frob[i].iter().enumerate() {
                if !m.is_zero() {
                    out[j] = fq.add_e(out[j], fq.mul_e(c, m));
                }
            }
        }
        out
    }
}

impl Field for FiniteField {
    type Elem = Vec<FqElem>;

    fn base(&self) -> &Fq {
        &self.inner.fq
    }
    fn zero(&self) -> Vec<FqElem> {
        vec![FqElem::ZERO; self.degree()]
    }
    fn one(&self) -> Vec<FqElem> {
        let mut v = self.zero();
        v[0] = FqElem::ONE;
        v
    }
    fn is_zero(&self, a: &Vec<FqElem>) -> bool {
        a.iter().all(|c| c.is_zero())
    }
    fn add(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Vec<FqElem> {
        let fq = &self.inner.fq;
        a.iter().zip(b).map(|(&x, &y)| fq.add_e(x, y)).collect()
    }
    fn neg(&self, a: &Vec<FqElem>) -> Vec<FqElem> {
        let fq = &self.inner.fq;
        a.iter().map(|&x| fq.neg_e(x)).collect()
    }
    fn sub(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Vec<FqElem> {
        let fq = &self.inner.fq;
        a.iter().zip(b).map(|(&x, &y)| fq.sub_e(x, y)).collect()
    }
    fn mul(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Vec<FqElem> {
        let fq = &self.inner.fq;
        let d = self.degree();
        let mut prod = vec![FqElem::ZERO; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = fq.add_e(prod[i + j], fq.mul_e(x, y));
                }
            }
        }
        self.reduce(prod)
    }
    fn inv(&self, a: &Vec<FqElem>) -> Option<Vec<FqElem>> {
        if self.is_zero(a) {
            return None;
        }
        let ring = PolyRing::new(self.inner.fq.clone());
        let (g, s, _) = ring.xgcd(&Poly::new(a.clone()), &self.inner.modulus);
        debug_assert!(ring.is_one(&g));
        let mut v = s.into_coeffs();
        v.resize(self.degree(), FqElem::ZERO);
        Some(v)
    }
    fn from_base(&self, c: FqElem) -> Vec<FqElem> {
        let mut v = self.zero();
        v[0] = c;
        v
    }
    fn frobenius(&self, a: &Vec<FqElem>, k: u32) -> Vec<FqElem> {
        let k = k as usize % self.degree();
        let mut cur = a.clone();
        for _ in 0..k {
            cur = self.frob_once(&cur);
        }
        cur
    }
    fn format_elem(&self, a: &Vec<FqElem>) -> String {
        let ring = PolyRing::new(self.inner.fq.clone());
        ring.format(&Poly::new(a.clone()), &self.inner.var)
    }
}

impl FiniteFieldOps for FiniteField {
    fn degree(&self) -> usize {
        self.inner.modulus.degree().unwrap()
    }
    fn to_coords(&self, a: &Vec<FqElem>) -> Vec<FqElem> {
        a.clone()
    }
    fn from_coords(&self, c: &[FqElem]) -> Vec<FqElem> {
        let mut v = c.to_vec();
        v.resize(self.degree(), FqElem::ZERO);
        v
    }
}

/// An `F_q`-algebra embedding `k -> E` determined by the image of the generator of `k`.
#[derive(Clone, Debug)]
pub struct Embedding {
    target: FiniteField,
    /// Images of `1, x, x^2, ...` of the source field.
    gen_pows: Vec<Vec<FqElem>>,
}

impl Embedding {
    /// Embed `source` into `target`; requires `deg source | deg target`.
    pub fn new<R: Rng + ?Sized>(source: &FiniteField, target: &FiniteField, rng: &mut R) -> Self {
        let d = source.degree();
        assert!(
            target.degree().is_multiple_of(d),
            "embedding requires the source degree to divide the target degree"
        );
        let theta = if source == target {
            source.gen()
        } else {
            // a root of the source modulus in the target
            let ring = PolyRing::new(target.clone());
            let lifted: Vec<Vec<FqElem>> = source
                .modulus()
                .coeffs()
                .iter()
                .map(|&c| target.from_base(c))
                .collect();
            let f = ring.from_coeffs(lifted);
            let rts = factor::roots(&ring, &f, rng);
            rts.into_iter().next().expect("modulus splits in the target field")
        };
        let mut gen_pows = Vec::with_capacity(d);
        let mut cur = target.one();
        for _ in 0..d {
            gen_pows.push(cur.clone());
            cur = target.mul(&cur, &theta);
        }
        Embedding {
            target: target.clone(),
            gen_pows,
        }
    }

    pub fn target(&self) -> &FiniteField {
        &self.target
    }

    pub fn map(&self, a: &[FqElem]) -> Vec<FqElem> {
        let t = &self.target;
        let mut acc = t.zero();
        for (c, pw) in a.iter().zip(&self.gen_pows) {
            if !c.is_zero() {
                acc = t.add(&acc, &t.scale(*c, pw));
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_axioms_f27() {
        let fq = Fq::prime(3).unwrap();
        let k = FiniteField::new(fq, Poly::from_u32(&[1, 2, 0, 1])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = k.random_elem(&mut rng);
            let b = k.random_elem(&mut rng);
            let c = k.random_elem(&mut rng);
            assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            if !k.is_zero(&a) {
                assert!(k.is_one(&k.mul(&a, &k.inv(&a).unwrap())));
            }
            assert_eq!(k.frobenius(&a, 1), k.pow(&a, 3));
            assert_eq!(k.frobenius(&a, 3), a);
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let fq = Fq::prime(3).unwrap();
        let k = FiniteField::new(fq, Poly::from_u32(&[1, 0, 1])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (big, emb) = k.extension(3, &mut rng);
        assert_eq!(big.degree(), 6);
        for _ in 0..30 {
            let a = k.random_elem(&mut rng);
            let b = k.random_elem(&mut rng);
            assert_eq!(emb.map(&k.mul(&a, &b)), big.mul(&emb.map(&a), &emb.map(&b)));
            assert_eq!(emb.map(&k.add(&a, &b)), big.add(&emb.map(&a), &emb.map(&b)));
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        let fq = Fq::prime(3).unwrap();
        assert!(FiniteField::new(fq, Poly::from_u32(&[2, 0, 1])).is_err());
    }
}
