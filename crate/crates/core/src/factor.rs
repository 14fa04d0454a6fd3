//! Factorization of polynomials over finite fields: squarefree decomposition,
//! distinct-degree splitting and Cantor–Zassenhaus equal-degree splitting.
//!
//! Random choices come from a caller-supplied RNG so results are reproducible
//! under a fixed seed.

use rand::Rng;

use crate::field::FiniteFieldOps;
use crate::poly::{Poly, PolyRing};

/// Precomputed data for raising residues modulo `f` to the `q`-th power, where
/// `q` is the size of the constant field `F_q` (not of `K`).
struct FrobMod<'a, K: FiniteFieldOps> {
    ring: &'a PolyRing<K>,
    modulus: &'a Poly<K::Elem>,
    /// `x^(q*i) mod f` for `i < deg f`.
    xq_pows: Vec<Poly<K::Elem>>,
}

impl<'a, K: FiniteFieldOps> FrobMod<'a, K> {
    fn new(ring: &'a PolyRing<K>, modulus: &'a Poly<K::Elem>) -> Self {
        let n = modulus.degree().unwrap_or(0);
        let xq = ring.powmod(&ring.x(), ring.field().q(), modulus);
        let mut xq_pows = Vec::with_capacity(n);
        let mut cur = ring.rem(&ring.one(), modulus);
        for _ in 0..n {
            xq_pows.push(cur.clone());
            cur = ring.mulmod(&cur, &xq, modulus);
        }
        FrobMod {
            ring,
            modulus,
            xq_pows,
        }
    }

    /// `z^q mod f`.
    fn apply(&self, z: &Poly<K::Elem>) -> Poly<K::Elem> {
        let f = self.ring.field();
        let mut acc = self.ring.zero();
        for (i, c) in z.coeffs().iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let cq = f.frobenius(c, 1);
            acc = self.ring.add(&acc, &self.ring.scale(&cq, &self.xq_pows[i]));
        }
        acc
    }

    /// `z^(|K|) mod f`.
    fn apply_field_order(&self, z: &Poly<K::Elem>) -> Poly<K::Elem> {
        let mut cur = z.clone();
        for _ in 0..self.ring.field().degree() {
            cur = self.apply(&cur);
        }
        cur
    }

    fn x(&self) -> Poly<K::Elem> {
        self.ring.rem(&self.ring.x(), self.modulus)
    }
}

/// Ben-Or irreducibility test. Constants and zero are not irreducible.
pub fn is_irreducible<K: FiniteFieldOps>(ring: &PolyRing<K>, f: &Poly<K::Elem>) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let f = ring.monic(f);
    let fm = FrobMod::new(ring, &f);
    let x = fm.x();
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = fm.apply_field_order(&h);
        let g = ring.gcd(&ring.sub(&h, &x), &f);
        if !ring.is_one(&g) {
            return false;
        }
    }
    true
}

fn pth_root_elem<K: FiniteFieldOps>(field: &K, c: &K::Elem) -> K::Elem {
    // c^(1/p) = c^(p^(e-1)) where p^e = |K|.
    let p = field.base().p() as u64;
    let e = field.base().m() as usize * field.degree();
    let mut r = c.clone();
    for _ in 0..e.saturating_sub(1) {
        r = field.pow(&r, p);
    }
    r
}

/// Squarefree decomposition of a monic polynomial: pairs `(g_i, i)` with
/// `f = prod g_i^i` and each `g_i` squarefree, monic, pairwise coprime.
pub fn squarefree_decomposition<K: FiniteFieldOps>(
    ring: &PolyRing<K>,
    f: &Poly<K::Elem>,
) -> Vec<(Poly<K::Elem>, usize)> {
    let mut out = Vec::new();
    sqf_rec(ring, &ring.monic(f), 1, &mut out);
    out.sort_by_key(|(_, m)| *m);
    // merge equal multiplicities coming from different recursion branches
    let mut merged: Vec<(Poly<K::Elem>, usize)> = Vec::new();
    for (g, m) in out {
        if let Some(last) = merged.last_mut() {
            if last.1 == m {
                last.0 = ring.mul(&last.0, &g);
                continue;
            }
        }
        merged.push((g, m));
    }
    merged
}

fn sqf_rec<K: FiniteFieldOps>(
    ring: &PolyRing<K>,
    f: &Poly<K::Elem>,
    mult: usize,
    out: &mut Vec<(Poly<K::Elem>, usize)>,
) {
    if f.degree().unwrap_or(0) == 0 {
        return;
    }
    let p = ring.field().base().p() as usize;
    let df = ring.derivative(f);
    if df.is_zero() {
        // f = g(x^p)
        let g: Vec<K::Elem> = f
            .coeffs()
            .iter()
            .step_by(p)
            .map(|c| pth_root_elem(ring.field(), c))
            .collect();
        sqf_rec(ring, &ring.from_coeffs(g), mult * p, out);
        return;
    }
    let mut c = ring.gcd(f, &df);
    let mut w = ring.div_exact(f, &c).unwrap();
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = ring.gcd(&w, &c);
        let z = ring.div_exact(&w, &y).unwrap();
        if z.degree().unwrap_or(0) > 0 {
            out.push((z, i * mult));
        }
        i += 1;
        w = y;
        c = ring.div_exact(&c, &w).unwrap();
    }
    if c.degree().unwrap_or(0) > 0 {
        // remaining factor is a p-th power
        let g: Vec<K::Elem> = c
            .coeffs()
            .iter()
            .step_by(p)
            .map(|x| pth_root_elem(ring.field(), x))
            .collect();
        sqf_rec(ring, &ring.from_coeffs(g), mult * p, out);
    }
}

/// Distinct-degree factorization of a squarefree monic polynomial: pairs
/// `(g_d, d)` where `g_d` is the product of all irreducible factors of degree `d`.
pub fn distinct_degree<K: FiniteFieldOps>(
    ring: &PolyRing<K>,
    f: &Poly<K::Elem>,
) -> Vec<(Poly<K::Elem>, usize)> {
    let mut out = Vec::new();
    let mut rest = ring.monic(f);
    let mut d = 0;
    let mut h = ring.x();
    while rest.degree().unwrap_or(0) > 0 {
        d += 1;
        if 2 * d > rest.degree().unwrap() {
            let deg = rest.degree().unwrap();
            out.push((rest, deg));
            break;
        }
        let fm = FrobMod::new(ring, &rest);
        h = fm.apply_field_order(&ring.rem(&h, &rest));
        let g = ring.gcd(&ring.sub(&h, &fm.x()), &rest);
        if g.degree().unwrap_or(0) > 0 {
            rest = ring.div_exact(&rest, &g).unwrap();
            out.push((g, d));
        }
    }
    out
}

/// Number of irreducible factors of a squarefree polynomial.
pub fn count_irreducible_factors<K: FiniteFieldOps>(ring: &PolyRing<K>, f: &Poly<K::Elem>) -> usize {
    distinct_degree(ring, f)
        .iter()
        .map(|(g, d)| g.degree().unwrap() / d)
        .sum()
}

/// Split a monic squarefree polynomial whose irreducible factors all have degree `d`.
pub fn equal_degree<K: FiniteFieldOps, R: Rng + ?Sized>(
    ring: &PolyRing<K>,
    f: &Poly<K::Elem>,
    d: usize,
    rng: &mut R,
) -> Vec<Poly<K::Elem>> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![ring.monic(f)];
    }
    let field = ring.field();
    let fq = field.base();
    loop {
        let a: Vec<K::Elem> = (0..n).map(|_| field.random_elem(rng)).collect();
        let a = ring.from_coeffs(a);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = ring.gcd(&a, f);
        if g.degree().unwrap_or(0) > 0 {
            return split_both(ring, f, &g, d, rng);
        }
        let fm = FrobMod::new(ring, f);
        let b = if fq.p() == 2 {
            // absolute trace to F_2: sum of a^(2^j), j < [K_d : F_2]
            let steps = fq.m() as usize * field.degree() * d;
            let mut cur = ring.rem(&a, f);
            let mut acc = cur.clone();
            for _ in 1..steps {
                cur = ring.mulmod(&cur, &cur, f);
                acc = ring.add(&acc, &cur);
            }
            acc
        } else {
            // a^((Q^d - 1)/2) = (prod_{j < k d} a^(q^j))^((q-1)/2)
            let steps = field.degree() * d;
            let mut cur = ring.rem(&a, f);
            let mut norm = cur.clone();
            for _ in 1..steps {
                cur = fm.apply(&cur);
                norm = ring.mulmod(&norm, &cur, f);
            }
            let e = (fq.q() as u64 - 1) / 2;
            let pw = ring.powmod(&norm, e, f);
            ring.sub(&pw, &ring.one())
        };
        let g = ring.gcd(&b, f);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            return split_both(ring, f, &g, d, rng);
        }
    }
}

fn split_both<K: FiniteFieldOps, R: Rng + ?Sized>(
    ring: &PolyRing<K>,
    f: &Poly<K::Elem>,
    g: &Poly<K::Elem>,
    d: usize,
    rng: &mut R,
) -> Vec<Poly<K::Elem>> {
    let h = ring.div_exact(f, g).unwrap();
    let mut out = equal_degree(ring, g, d, rng);
    out.extend(equal_degree(ring, &ring.monic(&h), d, rng));
    out
}

/// Full factorization of a nonzero polynomial into monic irreducibles with
/// multiplicities, sorted by degree and then coefficients. The leading unit is dropped.
pub fn factor<K: FiniteFieldOps, R: Rng + ?Sized>(
    ring: &PolyRing<K>,
    f: &Poly<K::Elem>,
    rng: &mut R,
) -> Vec<(Poly<K::Elem>, usize)>
where
    K::Elem: Ord,
{
    let mut out = Vec::new();
    for (g, mult) in squarefree_decomposition(ring, f) {
        for (h, d) in distinct_degree(ring, &g) {
            for irr in equal_degree(ring, &h, d, rng) {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|a, b| {
        a.0.len()
            .cmp(&b.0.len())
            .then_with(|| a.0.coeffs().iter().rev().cmp(b.0.coeffs().iter().rev()))
    });
    out
}

/// Roots of `f` lying in `K` (without multiplicity), sorted.
pub fn roots<K: FiniteFieldOps, R: Rng + ?Sized>(
    ring: &PolyRing<K>,
    f: &Poly<K::Elem>,
    rng: &mut R,
) -> Vec<K::Elem>
where
    K::Elem: Ord,
{
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let f = ring.monic(f);
    let fm = FrobMod::new(ring, &f);
    let xq = fm.apply_field_order(&fm.x());
    let g = ring.gcd(&ring.sub(&xq, &fm.x()), &f);
    let field = ring.field();
    let mut out: Vec<K::Elem> = equal_degree(ring, &g, 1, rng)
        .into_iter()
        .map(|lin| field.neg(&lin.coeffs()[0]))
        .collect();
    out.sort();
    out
}

/// A monic irreducible polynomial of the given degree, found by seeded random search.
pub fn random_irreducible<K: FiniteFieldOps, R: Rng + ?Sized>(
    ring: &PolyRing<K>,
    degree: usize,
    rng: &mut R,
) -> Poly<K::Elem> {
    let field = ring.field();
    loop {
        let mut c: Vec<K::Elem> = (0..degree).map(|_| field.random_elem(rng)).collect();
        c.push(field.one());
        let f = ring.from_coeffs(c);
        if is_irreducible(ring, &f) {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fq, FqElem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn t_squared_plus_one_irreducible_mod_3() {
        let r = PolyRing::new(Fq::prime(3).unwrap());
        assert!(is_irreducible(&r, &Poly::from_u32(&[1, 0, 1])));
        assert!(!is_irreducible(&r, &Poly::from_u32(&[2, 0, 1])));
    }

    #[test]
    fn t_q_minus_t_splits_into_linears() {
        for p in [2u32, 3, 5, 7] {
            let fq = Fq::prime(p).unwrap();
            let r = PolyRing::new(fq.clone());
            let mut c = vec![FqElem::ZERO; p as usize + 1];
            c[1] = fq.from_int(-1);
            c[p as usize] = FqElem::ONE;
            let f = Poly::new(c);
            let fac = factor(&r, &f, &mut rng());
            assert_eq!(fac.len(), p as usize);
            for (g, m) in &fac {
                assert_eq!(*m, 1);
                assert_eq!(g.degree(), Some(1));
            }
        }
    }

    #[test]
    fn factors_with_multiplicity_and_p_th_powers() {
        let fq = Fq::prime(3).unwrap();
        let r = PolyRing::new(fq);
        // (T+1)^3 (T^2+1)^2 T
        let a = Poly::from_u32(&[1, 1]);
        let b = Poly::from_u32(&[1, 0, 1]);
        let t = Poly::from_u32(&[0, 1]);
        let f = r.mul(&r.mul(&r.pow(&a, 3), &r.pow(&b, 2)), &t);
        let fac = factor(&r, &f, &mut rng());
        assert_eq!(fac, vec![(t, 1), (a, 3), (b, 2)]);
    }

    #[test]
    fn even_characteristic_splitting() {
        let f4 = Fq::extension(2, &[1, 1, 1]).unwrap();
        let r = PolyRing::new(f4.clone());
        // x^4 - x splits completely over F_4
        let f = Poly::new(vec![FqElem(0), FqElem(1), FqElem(0), FqElem(0), FqElem(1)]);
        let rts = roots(&r, &f, &mut rng());
        assert_eq!(rts.len(), 4);
    }
}
