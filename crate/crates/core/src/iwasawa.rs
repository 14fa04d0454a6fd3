//! The Iwasawa algebra `Λ = O⟦T⟧` for `O = A_p`, with `O` truncated to
//! `A/(ϖ^N)`: distinguished polynomials, Weierstrass preparation, elementary
//! modules and their `μ`/`λ` invariants.
//!
//! Two variables are in play. Coefficients are elements of `A = F_q[T]` read
//! modulo `ϖ^N`; the series variable is written positionally (`coeffs_T[i]` is the
//! coefficient of `T^i` in `Λ`).

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base_field::text::ExprTarget;
use crate::base_field::{format_poly, poly_multiplicity, APoly, FieldParams, Place, PolyTarget};
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::poly::{Poly, PolyRing};

#[derive(Debug)]
struct ORingInner {
    fq: Fq,
    ring: PolyRing<Fq>,
    place: Place,
    pi_pows: Vec<APoly>,
}

/// `O/ϖ^N = A/(ϖ^N)`. Elements are polynomials of degree `< N·deg ϖ`.
#[derive(Clone, Debug)]
pub struct ORing(Arc<ORingInner>);

impl PartialEq for ORing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.fq == other.0.fq
                && self.0.place == other.0.place
                && self.precision() == other.precision())
    }
}

impl ORing {
    pub fn new(fq: &Fq, place: &Place, n: usize) -> Result<Self> {
        let pi = place
            .generator()
            .ok_or_else(|| Error::invalid("O needs a finite place"))?
            .clone();
        if n == 0 {
            return Err(Error::invalid("ϖ-adic precision must be at least 1"));
        }
        let ring = PolyRing::new(fq.clone());
        let mut pi_pows = vec![ring.one()];
        for k in 1..=n {
            let next = ring.mul(&pi_pows[k - 1], &pi);
            pi_pows.push(next);
        }
        Ok(ORing(Arc::new(ORingInner {
            fq: fq.clone(),
            ring,
            place: place.clone(),
            pi_pows,
        })))
    }

    pub fn fq(&self) -> &Fq {
        &self.0.fq
    }

    pub fn ring(&self) -> &PolyRing<Fq> {
        &self.0.ring
    }

    pub fn place(&self) -> &Place {
        &self.0.place
    }

    pub fn pi(&self) -> &APoly {
        &self.0.pi_pows[1]
    }

    /// `N`.
    pub fn precision(&self) -> usize {
        self.0.pi_pows.len() - 1
    }

    /// `[A/ϖ : F_q]`.
    pub fn residue_degree(&self) -> usize {
        self.place().degree()
    }

    pub fn pi_pow(&self, k: usize) -> &APoly {
        &self.0.pi_pows[k.min(self.precision())]
    }

    pub fn reduce(&self, a: &APoly, k: usize) -> APoly {
        self.ring().rem(a, self.pi_pow(k))
    }

    /// `ϖ`-adic valuation of `a mod ϖ^k`, equal to `k` for zero.
    pub fn valuation(&self, a: &APoly, k: usize) -> usize {
        let a = self.reduce(a, k);
        if a.is_zero() {
            k.min(self.precision())
        } else {
            poly_multiplicity(self.ring(), &a, self.pi()) as usize
        }
    }

    pub fn is_unit(&self, a: &APoly) -> bool {
        !self.ring().rem(a, self.pi()).is_zero()
    }

    pub fn mul(&self, a: &APoly, b: &APoly, k: usize) -> APoly {
        self.reduce(&self.ring().mul(a, b), k)
    }

    pub fn inv(&self, a: &APoly, k: usize) -> Option<APoly> {
        if !self.is_unit(a) {
            return None;
        }
        let (_, s, _) = self.ring().xgcd(a, self.pi_pow(k));
        Some(self.reduce(&s, k))
    }

    pub fn random<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> APoly {
        let len = k.min(self.precision()) * self.residue_degree();
        Poly::new((0..len).map(|_| self.fq().random(rng)).collect())
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> APoly {
        loop {
            let a = self.random(k, rng);
            if self.is_unit(&a) {
                return a;
            }
        }
    }

    /// Polynomial expressions in `T`, with `pi` or `ϖ` standing for the generator.
    pub fn parse_coeff(&self, s: &str) -> Result<APoly> {
        let target = OTarget {
            base: PolyTarget::new(self.fq()),
            pi: self.pi().clone(),
        };
        Ok(self.reduce(&target.parse(s)?, self.precision()))
    }

    pub fn format_coeff(&self, a: &APoly) -> String {
        format_poly(self.fq(), a)
    }
}

struct OTarget {
    base: PolyTarget,
    pi: APoly,
}

impl ExprTarget for OTarget {
    type Value = APoly;

    fn int(&self, n: u64) -> Result<APoly> {
        self.base.int(n)
    }
    fn sym(&self, name: &str) -> Result<APoly> {
        match name {
            "pi" | "ϖ" => Ok(self.pi.clone()),
            _ => self.base.sym(name),
        }
    }
    fn add(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        self.base.add(a, b)
    }
    fn neg(&self, a: &APoly) -> Result<APoly> {
        self.base.neg(a)
    }
    fn mul(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        self.base.mul(a, b)
    }
    fn div(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        self.base.div(a, b)
    }
}

/// A truncated element of `Λ`: coefficients are known modulo `ϖ^prec_pi`, and
/// modulo `T^prec_t` unless the element is an exact polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct IwasawaSeries {
    ring: ORing,
    prec_pi: usize,
    prec_t: Option<usize>,
    coeffs: Vec<APoly>,
}

impl IwasawaSeries {
    pub fn new(ring: &ORing, coeffs: Vec<APoly>, prec_pi: usize, prec_t: Option<usize>) -> Result<Self> {
        if prec_pi == 0 || prec_pi > ring.precision() {
            return Err(Error::invalid(format!(
                "ϖ-adic precision {prec_pi} outside 1..={}",
                ring.precision()
            )));
        }
        if prec_t == Some(0) {
            return Err(Error::invalid("T-adic precision must be at least 1"));
        }
        Ok(Self::build(ring, coeffs, prec_pi, prec_t))
    }

    fn build(ring: &ORing, mut coeffs: Vec<APoly>, prec_pi: usize, prec_t: Option<usize>) -> Self {
        if let Some(d) = prec_t {
            coeffs.truncate(d);
        }
        for c in coeffs.iter_mut() {
            *c = ring.reduce(c, prec_pi);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IwasawaSeries {
            ring: ring.clone(),
            prec_pi,
            prec_t,
            coeffs,
        }
    }

    /// An exact polynomial at full `ϖ`-adic precision.
    pub fn polynomial(ring: &ORing, coeffs: Vec<APoly>) -> Self {
        Self::build(ring, coeffs, ring.precision(), None)
    }

    pub fn one(ring: &ORing) -> Self {
        Self::polynomial(ring, vec![ring.ring().one()])
    }

    /// `ϖ^k`.
    pub fn pi_power(ring: &ORing, k: usize) -> Self {
        Self::polynomial(ring, vec![ring.pi_pow(k).clone()])
    }

    pub fn ring(&self) -> &ORing {
        &self.ring
    }

    pub fn prec_pi(&self) -> usize {
        self.prec_pi
    }

    pub fn prec_t(&self) -> Option<usize> {
        self.prec_t
    }

    pub fn is_polynomial(&self) -> bool {
        self.prec_t.is_none()
    }

    pub fn coeffs(&self) -> &[APoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> APoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.ring().zero())
    }

    /// Degree of an exact polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_polynomial() {
            self.coeffs.len().checked_sub(1)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of coefficients that are meaningful.
    fn span(&self) -> usize {
        self.prec_t.unwrap_or(self.coeffs.len())
    }

    fn min_t(a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        }
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::MixedFields);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let r = self.ring.ring();
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| r.add(&self.coeff(i), &other.coeff(i))).collect();
        Ok(Self::build(
            &self.ring,
            coeffs,
            self.prec_pi.min(other.prec_pi),
            Self::min_t(self.prec_t, other.prec_t),
        ))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring.ring();
        Self::build(
            &self.ring,
            self.coeffs.iter().map(|c| r.neg(c)).collect(),
            self.prec_pi,
            self.prec_t,
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let k = self.prec_pi.min(other.prec_pi);
        let prec_t = Self::min_t(self.prec_t, other.prec_t);
        let len = match prec_t {
            Some(d) => d.min(self.coeffs.len() + other.coeffs.len()),
            None => self.coeffs.len() + other.coeffs.len(),
        };
        let coeffs = convolve(&self.ring, &self.coeffs, &other.coeffs, len, k);
        Ok(Self::build(&self.ring, coeffs, k, prec_t))
    }

    /// Multiply by `ϖ^k`; the product is known to `k` more digits.
    pub fn shift_pi(&self, k: usize) -> Self {
        let r = self.ring.ring();
        let p = self.ring.pi_pow(k);
        Self::build(
            &self.ring,
            self.coeffs.iter().map(|c| r.mul(c, p)).collect(),
            (self.prec_pi + k).min(self.ring.precision()),
            self.prec_t,
        )
    }

    /// Equality modulo `ϖ^min` and `T^min` of the two precisions.
    pub fn congruent(&self, other: &Self) -> bool {
        if self.ring != other.ring {
            return false;
        }
        let k = self.prec_pi.min(other.prec_pi);
        let d = match Self::min_t(self.prec_t, other.prec_t) {
            Some(d) => d,
            None => self.coeffs.len().max(other.coeffs.len()),
        };
        (0..d).all(|i| {
            self.ring.reduce(&self.ring.ring().sub(&self.coeff(i), &other.coeff(i)), k).is_zero()
        })
    }

    /// Least `ϖ`-adic valuation of a coefficient; `None` for zero at this precision.
    pub fn valuation_pi(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| self.ring.valuation(c, self.prec_pi))
            .min()
    }

    /// `T`-adic order of the reduction mod `ϖ`.
    pub fn residual_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| self.ring.is_unit(c))
    }

    /// Monic of degree `λ` with every lower coefficient of positive valuation.
    pub fn random_distinguished<R: Rng + ?Sized>(ring: &ORing, lambda: usize, rng: &mut R) -> Self {
        let n = ring.precision();
        let mut coeffs: Vec<APoly> = (0..lambda).map(|_| ring.mul(ring.pi(), &ring.random(n, rng), n)).collect();
        coeffs.push(ring.ring().one());
        Self::polynomial(ring, coeffs)
    }

    /// A polynomial of degree `≤ deg` with unit constant term.
    pub fn random_unit<R: Rng + ?Sized>(ring: &ORing, deg: usize, rng: &mut R) -> Self {
        let n = ring.precision();
        let mut coeffs = vec![ring.random_unit(n, rng)];
        coeffs.extend((0..deg).map(|_| ring.random(n, rng)));
        Self::polynomial(ring, coeffs)
    }

    /// Coefficients as strings, lowest `T`-degree first.
    pub fn format_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| self.ring.format_coeff(c)).collect()
    }
}

/// `Σ a_i b_j T^(i+j)` truncated to `len` terms, reduced mod `ϖ^k`.
fn convolve(o: &ORing, a: &[APoly], b: &[APoly], len: usize, k: usize) -> Vec<APoly> {
    let r = o.ring();
    let mut out = vec![r.zero(); len];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(len.saturating_sub(i)) {
            if !y.is_zero() {
                out[i + j] = r.add(&out[i + j], &r.mul(x, y));
            }
        }
    }
    out.iter().map(|c| o.reduce(c, k)).collect()
}

fn sub_vec(o: &ORing, a: &[APoly], b: &[APoly], k: usize) -> Vec<APoly> {
    let r = o.ring();
    let z = r.zero();
    (0..a.len().max(b.len()))
        .map(|i| o.reduce(&r.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)), k))
        .collect()
}

/// Inverse of a power series with unit constant term, modulo `T^len` and `ϖ^k`.
fn series_inverse(o: &ORing, h: &[APoly], len: usize, k: usize) -> Option<Vec<APoly>> {
    let r = o.ring();
    let c0 = o.inv(h.first()?, k)?;
    let mut t = vec![c0.clone()];
    for m in 1..len {
        let mut acc = r.zero();
        for j in 1..=m.min(h.len() - 1) {
            acc = r.add(&acc, &r.mul(&h[j], &t[m - j]));
        }
        t.push(o.reduce(&r.neg(&o.mul(&acc, &c0, k)), k));
    }
    Some(t)
}

pub fn is_distinguished(g: &IwasawaSeries) -> Result<bool> {
    let Some(d) = g.degree() else {
        if g.is_polynomial() {
            return Ok(false);
        }
        return Err(Error::invalid("distinguishedness needs an exact polynomial"));
    };
    let o = g.ring();
    Ok(o.ring().is_one(&g.coeffs[d]) && g.coeffs[..d].iter().all(|c| !o.is_unit(c)))
}

/// `f = ϖ^μ · u · g` with `g` distinguished of degree `λ` and `u` a unit.
///
/// `g` and `u` are known modulo `ϖ^(N-μ)`. For a series known modulo `T^D`
/// they are the factors of the polynomial `f mod T^D`, and `u` is reported
/// with `T`-precision `D`; the reconstruction is then exact modulo `(ϖ^N, T^D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weierstrass {
    pub mu: usize,
    pub lambda: usize,
    pub g: IwasawaSeries,
    pub u: IwasawaSeries,
}

impl Weierstrass {
    pub fn reconstruct(&self) -> Result<IwasawaSeries> {
        Ok(self.u.mul(&self.g)?.shift_pi(self.mu))
    }
}

pub fn weierstrass_prep(f: &IwasawaSeries) -> Result<Weierstrass> {
    let o = f.ring();
    let r = o.ring();
    let mu = f.valuation_pi().ok_or(Error::InsufficientPiPrecision)?;
    let k = f.prec_pi - mu;
    let d = f.span();
    let big_f: Vec<APoly> = (0..d)
        .map(|i| o.reduce(&r.div_exact(&f.coeff(i), o.pi_pow(mu)).unwrap(), k))
        .collect();
    let lambda = big_f
        .iter()
        .position(|c| o.is_unit(c))
        .ok_or(Error::InsufficientTPrecision)?;
    if lambda >= d {
        return Err(Error::InsufficientTPrecision);
    }
    let mut g: Vec<APoly> = vec![r.zero(); lambda];
    g.push(r.one());
    let mut h: Vec<APoly> = big_f[lambda..].to_vec();
    for _ in 0..=k {
        let e = sub_vec(o, &big_f, &convolve(o, &g, &h, d, k), k);
        if e.iter().all(|c| c.is_zero()) {
            let gs = IwasawaSeries::build(o, g, k, None);
            let us = IwasawaSeries::build(o, h, k, f.prec_t);
            return Ok(Weierstrass { mu, lambda, g: gs, u: us });
        }
        // h·δg ≡ e (mod T^λ) and T^λ·δh = e - h·δg
        let t = series_inverse(o, &h, lambda, k).ok_or_else(|| Error::Internal("unit part lost its unit".into()))?;
        let dg = convolve(o, &t, &e, lambda, k);
        let rest = sub_vec(o, &e, &convolve(o, &h, &dg, d, k), k);
        debug_assert!(rest[..lambda].iter().all(|c| c.is_zero()));
        let dh = &rest[lambda..];
        for (gi, x) in g.iter_mut().zip(&dg) {
            *gi = o.reduce(&r.add(gi, x), k);
        }
        for (hi, x) in h.iter_mut().zip(dh) {
            *hi = o.reduce(&r.add(hi, x), k);
        }
    }
    Err(Error::Internal("Hensel lifting did not converge".into()))
}

pub fn mu_lambda(f: &IwasawaSeries) -> Result<(usize, usize)> {
    let w = weierstrass_prep(f)?;
    Ok((w.mu, w.lambda))
}

/// `Λ^ρ ⊕ ⊕_i Λ/(ϖ^(μ_i)) ⊕ ⊕_j Λ/(f_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryModule {
    pub free_rank: usize,
    pub mu_parts: Vec<usize>,
    pub poly_parts: Vec<IwasawaSeries>,
}

impl ElementaryModule {
    pub fn new(free_rank: usize, mu_parts: Vec<usize>, poly_parts: Vec<IwasawaSeries>) -> Result<Self> {
        if mu_parts.contains(&0) {
            return Err(Error::invalid("every μ_i must be at least 1"));
        }
        for f in &poly_parts {
            if !is_distinguished(f)? {
                return Err(Error::invalid(format!(
                    "[{}] is not a distinguished polynomial",
                    f.format_coeffs().join(", ")
                )));
            }
        }
        Ok(ElementaryModule {
            free_rank,
            mu_parts,
            poly_parts,
        })
    }

    pub fn zero() -> Self {
        ElementaryModule {
            free_rank: 0,
            mu_parts: vec![],
            poly_parts: vec![],
        }
    }

    /// `(Σ μ_i, Σ deg f_j)`.
    pub fn mu_lambda(&self) -> (usize, usize) {
        (
            self.mu_parts.iter().sum(),
            self.poly_parts.iter().map(|f| f.degree().unwrap_or(0)).sum(),
        )
    }
}

/// `∏ ϖ^(μ_i) · ∏ f_j`.
pub fn char_element(m: &ElementaryModule, ring: &ORing) -> Result<IwasawaSeries> {
    if m.free_rank > 0 {
        return Err(Error::NotTorsion);
    }
    let mut acc = IwasawaSeries::pi_power(ring, m.mu_parts.iter().sum());
    for f in &m.poly_parts {
        acc = acc.mul(f)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finiteness {
    /// Torsion with `μ = 0`, i.e. the dual is cofinitely generated cotorsion with `μ = 0`.
    pub cofg_cotorsion_mu0: bool,
    /// `dim N/ϖN` over the residue field; `None` when infinite.
    pub dim_mod_pi: Option<usize>,
    pub lambda: Option<usize>,
    pub lambda_bound_check: bool,
}

pub fn finiteness_predicates(m: &ElementaryModule) -> Finiteness {
    let cotorsion = m.free_rank == 0 && m.mu_parts.is_empty();
    let dim_mod_pi = if cotorsion {
        // Λ/(ϖ, f) = F_p⟦T⟧/(f̄) has length ord_T(f̄)
        m.poly_parts.iter().map(|f| f.residual_order()).sum::<Option<usize>>()
    } else {
        None
    };
    let lambda = (m.free_rank == 0).then(|| m.mu_lambda().1);
    let lambda_bound_check = match (dim_mod_pi, lambda) {
        (Some(d), Some(l)) => l <= d,
        _ => false,
    };
    Finiteness {
        cofg_cotorsion_mu0: cotorsion,
        dim_mod_pi,
        lambda,
        lambda_bound_check,
    }
}

fn default_p() -> u32 {
    3
}

fn default_m() -> u32 {
    1
}

fn default_place() -> String {
    "T".into()
}

/// Where `O` lives: the constant field and the place `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ORingDoc {
    #[serde(default = "default_p")]
    pub p: u32,
    #[serde(default = "default_m")]
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(default = "default_place")]
    pub p_place: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec_pi: Option<usize>,
}

impl ORingDoc {
    pub fn build(&self, default_prec_pi: usize) -> Result<ORing> {
        let fq = FieldParams {
            p: self.p,
            m: self.m,
            modulus: self.modulus.clone(),
        }
        .build()?;
        let place = Place::parse(&fq, &self.p_place)?;
        ORing::new(&fq, &place, self.prec_pi.unwrap_or(default_prec_pi))
    }

    pub fn from_ring(ring: &ORing, params: &FieldParams) -> Self {
        ORingDoc {
            p: params.p,
            m: params.m,
            modulus: params.modulus.clone(),
            p_place: ring.place().label(ring.fq()),
            prec_pi: Some(ring.precision()),
        }
    }
}

/// Series document. Without `prec_T` the coefficients form an exact polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDoc {
    #[serde(flatten)]
    pub ring: ORingDoc,
    #[serde(rename = "prec_T", default, skip_serializing_if = "Option::is_none")]
    pub prec_t: Option<usize>,
    #[serde(rename = "coeffs_T")]
    pub coeffs_t: Vec<String>,
}

impl SeriesDoc {
    pub fn build(&self, default_prec_pi: usize) -> Result<IwasawaSeries> {
        let ring = self.ring.build(default_prec_pi)?;
        self.build_in(&ring)
    }

    pub fn build_in(&self, ring: &ORing) -> Result<IwasawaSeries> {
        let coeffs = self
            .coeffs_t
            .iter()
            .map(|s| ring.parse_coeff(s))
            .collect::<Result<Vec<_>>>()?;
        if let Some(d) = self.prec_t {
            if coeffs.len() > d {
                return Err(Error::invalid(format!(
                    "{} coefficients given at T-adic precision {d}",
                    coeffs.len()
                )));
            }
        }
        IwasawaSeries::new(ring, coeffs, ring.precision(), self.prec_t)
    }

    /// The document of `f`; its `prec_pi` is that of `f`, so reading it back
    /// reproduces `f` exactly.
    pub fn from_series(f: &IwasawaSeries, params: &FieldParams) -> Self {
        let mut ring = ORingDoc::from_ring(f.ring(), params);
        ring.prec_pi = Some(f.prec_pi());
        SeriesDoc {
            ring,
            prec_t: f.prec_t(),
            coeffs_t: f.format_coeffs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryDoc {
    #[serde(flatten)]
    pub ring: ORingDoc,
    #[serde(default)]
    pub free_rank: usize,
    #[serde(default)]
    pub mu_parts: Vec<usize>,
    /// Coefficient lists of the distinguished polynomials, lowest degree first.
    #[serde(default)]
    pub poly_parts: Vec<Vec<String>>,
}

impl ElementaryDoc {
    pub fn build(&self, default_prec_pi: usize) -> Result<(ORing, ElementaryModule)> {
        let ring = self.ring.build(default_prec_pi)?;
        let polys = self
            .poly_parts
            .iter()
            .map(|cs| {
                let coeffs = cs.iter().map(|s| ring.parse_coeff(s)).collect::<Result<Vec<_>>>()?;
                Ok(IwasawaSeries::polynomial(&ring, coeffs))
            })
            .collect::<Result<Vec<_>>>()?;
        let m = ElementaryModule::new(self.free_rank, self.mu_parts.clone(), polys)?;
        Ok((ring, m))
    }
}

/// Field parameters recovered from an `O` ring, for documents built from scratch.
pub fn field_params(fq: &Fq) -> FieldParams {
    FieldParams {
        p: fq.p(),
        m: fq.m(),
        modulus: fq.modulus().map(|m| {
            let fp = Fq::prime(fq.p()).unwrap();
            let poly = Poly::new(m.iter().map(|&c| FqElem(c)).collect());
            PolyRing::new(fp).format(&poly, "g")
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn o(n: usize) -> ORing {
        let fq = Fq::prime(3).unwrap();
        ORing::new(&fq, &Place::parse(&fq, "T").unwrap(), n).unwrap()
    }

    fn poly(ring: &ORing, cs: &[&str]) -> IwasawaSeries {
        IwasawaSeries::polynomial(ring, cs.iter().map(|s| ring.parse_coeff(s).unwrap()).collect())
    }

    #[test]
    fn o_ring_basics() {
        let r = o(4);
        let a = r.parse_coeff("pi^2*(1+T)").unwrap();
        assert_eq!(r.valuation(&a, 4), 2);
        assert_eq!(r.valuation(&r.parse_coeff("ϖ^5").unwrap(), 4), 4);
        let u = r.parse_coeff("2 + T + T^3").unwrap();
        let inv = r.inv(&u, 4).unwrap();
        assert!(r.ring().is_one(&r.mul(&u, &inv, 4)));
        assert!(r.inv(&a, 4).is_none());
        assert!(r.parse_coeff("x").is_err());
    }

    #[test]
    fn distinguished_examples() {
        let r = o(8);
        assert!(is_distinguished(&poly(&r, &["pi", "0", "1"])).unwrap());
        assert!(!is_distinguished(&poly(&r, &["1", "1"])).unwrap());
        assert!(!is_distinguished(&poly(&r, &["0", "1", "pi"])).unwrap());
        let s = IwasawaSeries::new(&r, vec![r.pi().clone()], 8, Some(4)).unwrap();
        assert!(is_distinguished(&s).is_err());
    }

    #[test]
    fn weierstrass_examples() {
        let r = o(8);
        let w = weierstrass_prep(&poly(&r, &["pi^3"])).unwrap();
        assert_eq!((w.mu, w.lambda), (3, 0));
        assert!(w.g.congruent(&poly(&r, &["1"])) && w.u.congruent(&poly(&r, &["1"])));

        let f = poly(&r, &["pi", "0", "1"]);
        let w = weierstrass_prep(&f).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 2));
        assert_eq!(w.g.coeffs(), f.coeffs());
        assert_eq!(w.u.coeffs(), poly(&r, &["1"]).coeffs());

        let f = poly(&r, &["pi", "1+pi", "1"]);
        let w = weierstrass_prep(&f).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 1));
        assert_eq!(w.g.coeffs(), poly(&r, &["pi", "1"]).coeffs());
        assert_eq!(w.u.coeffs(), poly(&r, &["1", "1"]).coeffs());
        assert!(w.reconstruct().unwrap().congruent(&f));

        let zero = IwasawaSeries::new(&r, vec![], 8, Some(4)).unwrap();
        assert_eq!(weierstrass_prep(&zero), Err(Error::InsufficientPiPrecision));
    }

    #[test]
    fn char_element_examples() {
        let r = o(16);
        let f = poly(&r, &["pi", "pi", "0", "1"]);
        let m = ElementaryModule::new(0, vec![2], vec![f]).unwrap();
        assert_eq!(m.mu_lambda(), (2, 3));
        assert_eq!(mu_lambda(&char_element(&m, &r).unwrap()).unwrap(), (2, 3));
        assert_eq!(mu_lambda(&char_element(&ElementaryModule::zero(), &r).unwrap()).unwrap(), (0, 0));
        let free = ElementaryModule::new(1, vec![], vec![]).unwrap();
        assert_eq!(char_element(&free, &r), Err(Error::NotTorsion));

        let prod = poly(&r, &["pi"])
            .mul(&poly(&r, &["pi", "pi", "1"]))
            .unwrap()
            .mul(&poly(&r, &["pi", "1"]))
            .unwrap();
        assert_eq!(mu_lambda(&prod).unwrap(), (1, 3));
        assert!(ElementaryModule::new(0, vec![], vec![poly(&r, &["1", "1"])]).is_err());
    }

    #[test]
    fn finiteness_examples() {
        let r = o(8);
        let n = ElementaryModule::new(0, vec![], vec![poly(&r, &["pi", "1"])]).unwrap();
        let f = finiteness_predicates(&n);
        assert!(f.cofg_cotorsion_mu0 && f.lambda_bound_check);
        assert_eq!((f.dim_mod_pi, f.lambda), (Some(1), Some(1)));
        let f = finiteness_predicates(&ElementaryModule::new(0, vec![1], vec![]).unwrap());
        assert!(!f.cofg_cotorsion_mu0);
        assert_eq!(f.dim_mod_pi, None);
        let f = finiteness_predicates(&ElementaryModule::new(1, vec![], vec![]).unwrap());
        assert!(!f.cofg_cotorsion_mu0 && f.lambda.is_none());
    }

    #[test]
    fn series_doc_round_trip() {
        let doc: SeriesDoc =
            serde_json::from_str(r#"{"coeffs_T":["pi","1"],"prec_pi":8}"#).unwrap();
        let f = doc.build(32).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(mu_lambda(&f).unwrap(), (0, 1));
        let back = SeriesDoc::from_series(&f, &field_params(f.ring().fq()));
        assert_eq!(back.build(32).unwrap(), f);
        let s: SeriesDoc =
            serde_json::from_str(r#"{"coeffs_T":["1","2"],"prec_T":1}"#).unwrap();
        assert!(s.build(4).is_err());
    }

    #[test]
    fn extension_constant_field_and_higher_degree_place() {
        let fq = Fq::extension(3, &[1, 0, 1]).unwrap();
        let place = Place::parse(&fq, "T^2+T+g").unwrap_or_else(|_| Place::parse(&fq, "T").unwrap());
        let r = ORing::new(&fq, &place, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = IwasawaSeries::random_distinguished(&r, 3, &mut rng);
        let u = IwasawaSeries::random_unit(&r, 4, &mut rng);
        let f = u.mul(&g).unwrap().shift_pi(2);
        let w = weierstrass_prep(&f).unwrap();
        assert_eq!((w.mu, w.lambda), (2, 3));
        assert!(w.g.congruent(&g) && w.u.congruent(&u));
        let doc = field_params(&fq);
        assert_eq!(doc.build().unwrap(), fq);
    }

    fn planted(seed: u64, mu: usize, lambda: usize, series: bool) -> (IwasawaSeries, IwasawaSeries, IwasawaSeries) {
        let r = o(16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = IwasawaSeries::random_distinguished(&r, lambda, &mut rng);
        let u = IwasawaSeries::random_unit(&r, if series { 30 } else { 4 }, &mut rng);
        let mut f = u.mul(&g).unwrap().shift_pi(mu);
        if series {
            f = IwasawaSeries::new(&r, f.coeffs().to_vec(), 16, Some(24)).unwrap();
        }
        (f, g, u)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prep_recovers_planted_factors(seed in any::<u64>(), mu in 0usize..=3, lambda in 0usize..=5) {
            let (f, g, u) = planted(seed, mu, lambda, false);
            let w = weierstrass_prep(&f).unwrap();
            prop_assert_eq!((w.mu, w.lambda), (mu, lambda));
            prop_assert!(w.g.congruent(&g));
            prop_assert!(w.u.congruent(&u));
            prop_assert!(is_distinguished(&w.g).unwrap());
        }

        #[test]
        fn prep_reconstructs_series(seed in any::<u64>(), mu in 0usize..=3, lambda in 0usize..=5) {
            let (f, _, _) = planted(seed, mu, lambda, true);
            let w = weierstrass_prep(&f).unwrap();
            prop_assert_eq!((w.mu, w.lambda), (mu, lambda));
            let back = w.reconstruct().unwrap();
            prop_assert_eq!(back.prec_pi(), 16);
            prop_assert!(back.congruent(&f));
            prop_assert!(w.u.residual_order() == Some(0));
        }

        #[test]
        fn prep_is_idempotent(seed in any::<u64>(), lambda in 0usize..=5) {
            let (f, _, _) = planted(seed, 0, lambda, true);
            let w = weierstrass_prep(&f).unwrap();
            let again = weierstrass_prep(&w.g).unwrap();
            prop_assert_eq!(again.g.coeffs(), w.g.coeffs());
            let one = IwasawaSeries::one(w.g.ring());
            prop_assert_eq!(again.u.coeffs(), one.coeffs());
        }

        #[test]
        fn mu_lambda_is_additive(s1 in any::<u64>(), s2 in any::<u64>(), m1 in 0usize..=3, m2 in 0usize..=3, l1 in 0usize..=5, l2 in 0usize..=5) {
            let (f, _, _) = planted(s1, m1, l1, true);
            let (g, _, _) = planted(s2, m2, l2, true);
            let (a, b) = (mu_lambda(&f).unwrap(), mu_lambda(&g).unwrap());
            prop_assert_eq!(mu_lambda(&f.mul(&g).unwrap()).unwrap(), (a.0 + b.0, a.1 + b.1));
        }
    }
}
