//! Local invariants at a place `v` of `F_q(T)` along the constant `Z_p`-tower:
//! splitting counts, Frobenius-fixed torsion `H⁰(F_w, φ[p^n])`, Eisenstein and
//! Newton-polygon vanishing at ramified places, and the tensor term
//! `dim H⁰(F_w, φ[p^∞]) ⊗ F_p`.

pub mod newton;
pub mod series;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use newton::{count_roots_local, hensel_lift, newton_polygon, NewtonPolygon, Ratio, RootCount, Segment};
pub use series::{LSeries, LocalField};

use crate::base_field::{valuation, APoly, Place};
use crate::config::Config;
use crate::drinfeld::{GlobalModule, ReductionType};
use crate::error::{Error, Result};
use crate::factor;
use crate::field::{Field, FiniteField, FiniteFieldOps, Fq};
use crate::poly::PolyRing;
use crate::twisted::TwistedPoly;

/// Places of the constant `Z_p`-extension above `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    /// `p^(v_p(deg v))`.
    pub count: u64,
    pub residue_degree: usize,
    /// Degree over `F_q` of each residue field `κ_w` at finite tower layer `m`
    /// is `deg v · p^m / count`; the union over `m` is `κ_w`.
    pub p_part: u64,
}

pub fn splitting_count(v: &Place, p: u32) -> Splitting {
    let d = v.degree();
    let mut rest = d as u64;
    let mut p_part = 1u64;
    while rest.is_multiple_of(p as u64) {
        rest /= p as u64;
        p_part *= p as u64;
    }
    Splitting {
        count: p_part,
        residue_degree: d,
        p_part,
    }
}

/// Number of irreducible factors of the residue polynomial of `v` over
/// `F_(q^(p^n))` for `n = 0, 1, …` until two consecutive counts agree. This is
/// the number of places above `v` in the layer of degree `p^n`, computed by
/// factoring instead of by the closed formula.
pub fn splitting_count_by_factoring(fq: &Fq, v: &Place, max_n: u32, seed: u64) -> Option<u64> {
    let l = match v {
        Place::Finite(l) => l.clone(),
        Place::Infinity => APoly::new(vec![crate::field::FqElem::ZERO, crate::field::FqElem::ONE]),
    };
    let p = fq.p() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = FiniteField::constant_field(fq.clone());
    let mut last = None;
    for n in 0..=max_n {
        let (ext, _) = base.extension(p.pow(n), &mut rng);
        let ring = PolyRing::new(ext.clone());
        let lifted = ring.from_coeffs(l.coeffs().iter().map(|&c| ext.from_base(c)).collect());
        let c = factor::count_irreducible_factors(&ring, &lifted) as u64;
        if last == Some(c) {
            return Some(c);
        }
        last = Some(c);
    }
    None
}

/// `H⁰` values and where they came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Unramified,
    Eisenstein,
    NewtonHensel,
    WorstCase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum LocalDim {
    Dim(usize),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalH0 {
    pub value: LocalDim,
    pub method: Method,
}

impl LocalH0 {
    pub fn dim(&self) -> Option<usize> {
        match self.value {
            LocalDim::Dim(d) => Some(d),
            LocalDim::Unknown => None,
        }
    }

    fn unknown() -> Self {
        LocalH0 {
            value: LocalDim::Unknown,
            method: Method::WorstCase,
        }
    }
}

fn prime_generator(p: &Place) -> Result<&APoly> {
    p.generator()
        .ok_or_else(|| Error::invalid("the fixed prime must be a finite place"))
}

/// Length over `F_p = A/p` of the `Frob_v^(p^m)`-fixed points of `φ̄[p^n]`:
/// the `F_q`-dimension of the kernel of `φ̄_{p^n}` on the degree-`deg v · p^m`
/// extension of `F_q`, divided by `deg p`.
pub fn h0_layer(phi: &GlobalModule, p: &Place, n: u32, v: &Place, m: u32, cfg: &Config) -> Result<usize> {
    let pg = prime_generator(p)?;
    if v.is_infinite() || v == p || phi.reduction_type(v)? != ReductionType::Good {
        return Err(Error::UnramifiedInapplicable);
    }
    if n == 0 {
        return Ok(0);
    }
    let red = phi.reduce(v)?;
    let fq = phi.field().fq();
    let e = (fq.p() as usize).pow(m);
    if v.degree() * e > cfg.max_dim {
        return Err(Error::InsufficientPrecision(format!(
            "tower layer m = {m} needs an extension of dimension {} > max_dim = {}",
            v.degree() * e,
            cfg.max_dim
        )));
    }
    let ring = PolyRing::new(fq.clone());
    let a = ring.pow(pg, n as u64);
    let kernel = red.torsion_kernel(&a, e, cfg.seed, cfg.execution)?;
    let dp = p.degree();
    if kernel.dim % dp != 0 {
        return Err(Error::Internal(format!(
            "kernel dimension {} not divisible by deg p = {dp}",
            kernel.dim
        )));
    }
    Ok(kernel.dim / dp)
}

/// `h0_layer` at the first `m` where two consecutive layers agree; `None` if
/// that does not happen within `max_m` (or `max_dim`).
///
/// Agreement certifies stabilization: the fixed points of `σ^(p^m)` for a
/// Frobenius `σ` of `p`-power order on a `p`-group form an increasing chain of
/// kernels of powers of the nilpotent `σ^(p^m) - 1`, and such a chain stops for good
/// once two terms agree.
pub fn h0_stable(phi: &GlobalModule, p: &Place, n: u32, v: &Place, cfg: &Config) -> Result<Option<usize>> {
    let mut last = None;
    for m in 0..=cfg.max_m {
        let h = match h0_layer(phi, p, n, v, m, cfg) {
            Ok(h) => h,
            Err(Error::InsufficientPrecision(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if last == Some(h) {
            return Ok(Some(h));
        }
        last = Some(h);
    }
    Ok(None)
}

/// `φ_p(x)/x` is Eisenstein at `v`: unit leading coefficient, positive valuation in
/// between and constant term of valuation exactly 1. Uses the integral model.
pub fn eisenstein_vanishing(phi: &GlobalModule, p: &Place, v: &Place) -> Result<bool> {
    let pg = prime_generator(p)?;
    let model = phi.integral_model();
    let pp = model.phi_of(pg);
    let k = phi.field();
    let top = pp.deg()?;
    let vals: Vec<Option<i64>> = pp.coeffs().iter().map(|c| valuation(k, c, v)).collect();
    Ok(vals[top] == Some(0)
        && vals[0] == Some(1)
        && vals[1..top].iter().all(|x| x.is_none_or(|x| x > 0)))
}

/// `φ_p` of the integral model, as a twisted polynomial over `F_v` at precision `N`.
pub fn local_phi_p(phi: &GlobalModule, p: &Place, v: &Place, prec: usize) -> Result<TwistedPoly<LocalField>> {
    let pg = prime_generator(p)?;
    let model = phi.integral_model();
    let k = phi.field();
    let lf = LocalField::new(k.fq(), v, prec)?;
    Ok(model.phi_of(pg).map_coeffs(&lf, |c| lf.embed(k, c)))
}

/// Roots of `φ_p` over the residue-tower completion `F_w`: counts over the
/// unramified layers of degree `p^m` until two consecutive ones agree.
pub fn local_p_torsion(phi: &GlobalModule, p: &Place, v: &Place, cfg: &Config) -> Result<RootCount> {
    let f = local_phi_p(phi, p, v, cfg.local_n)?;
    let pch = phi.field().fq().p() as usize;
    let mut last = None;
    for m in 0..=cfg.max_m {
        let e = pch.pow(m);
        if v.degree() * e > cfg.max_dim {
            break;
        }
        let c = count_roots_local(&f, e, cfg.seed)?;
        if c == RootCount::Unknown {
            return Ok(RootCount::Unknown);
        }
        if last == Some(c) {
            return Ok(c);
        }
        last = Some(c);
    }
    Ok(RootCount::Unknown)
}

/// `dim_{F_p} H⁰(F_w, φ[p^∞]) ⊗ F_p` for any `w | v`, with the method used.
pub fn h0_tensor_term(phi: &GlobalModule, p: &Place, v: &Place, cfg: &Config) -> Result<LocalH0> {
    prime_generator(p)?;
    let good = !v.is_infinite() && phi.reduction_type(v)? == ReductionType::Good;
    if good && v != p {
        return Ok(unramified_term(phi, p, v, cfg)?.unwrap_or_else(LocalH0::unknown));
    }
    if eisenstein_vanishing(phi, p, v)? {
        return Ok(LocalH0 {
            value: LocalDim::Dim(0),
            method: Method::Eisenstein,
        });
    }
    match local_p_torsion(phi, p, v, cfg) {
        Ok(RootCount::Known { dim: 0 }) => Ok(LocalH0 {
            value: LocalDim::Dim(0),
            method: Method::NewtonHensel,
        }),
        Ok(_) | Err(Error::InsufficientPrecision(_)) => Ok(LocalH0::unknown()),
        Err(e) => Err(e),
    }
}

/// `h_1 - c` where `c` is the corank, read off as the common value of two
/// consecutive increments `h_(n+1) - h_n`.
fn unramified_term(phi: &GlobalModule, p: &Place, v: &Place, cfg: &Config) -> Result<Option<LocalH0>> {
    let mut h = vec![0usize];
    for n in 1..=cfg.max_n {
        let Some(hn) = h0_stable(phi, p, n, v, cfg)? else {
            return Ok(None);
        };
        h.push(hn);
        if hn == 0 && n == 1 {
            // nothing fixed at level 1, so nothing at any level
            return Ok(Some(LocalH0 {
                value: LocalDim::Dim(0),
                method: Method::Unramified,
            }));
        }
        let k = h.len() - 1;
        if k >= 3 {
            let (d1, d2) = (h[k - 1] - h[k - 2], h[k] - h[k - 1]);
            if d1 == d2 && d2 <= h[1] {
                return Ok(Some(LocalH0 {
                    value: LocalDim::Dim(h[1] - d2),
                    method: Method::Unramified,
                }));
            }
        }
    }
    Ok(None)
}

/// Brute-force `F_q`-dimension of `φ̄[a]` over the degree-`e` extension, by
/// evaluating `φ̄_a` at every element. Only for small fields.
pub fn brute_force_kernel_dim(
    red: &crate::drinfeld::ReducedModule,
    a: &APoly,
    e: usize,
    seed: u64,
) -> usize {
    let (ext, emb) = red.extension(e, seed);
    let f = red.phi_of(a).map_coeffs(&ext, |c| emb.map(c));
    let q = ext.q();
    let size = q.pow(ext.degree() as u32);
    let mut zeros = 0u64;
    for i in 0..size {
        if ext.is_zero(&f.evaluate(&ext.element_at(i))) {
            zeros += 1;
        }
    }
    let mut d = 0;
    let mut c = 1;
    while c < zeros {
        c *= q;
        d += 1;
    }
    assert_eq!(c, zeros, "kernel size is not a power of q");
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_field::RationalFunctions;

    fn setup(q: u32, phi: &str) -> (Fq, GlobalModule) {
        let fq = Fq::prime(q).unwrap();
        let rf = RationalFunctions::new(fq.clone());
        (fq, GlobalModule::parse(&rf, phi).unwrap())
    }

    #[test]
    fn splitting_examples() {
        let fq = Fq::prime(3).unwrap();
        assert_eq!(splitting_count(&Place::Infinity, 3).count, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ring = PolyRing::new(fq.clone());
        for d in 1..=6 {
            let l = factor::random_irreducible(&ring, d, &mut rng);
            let v = Place::Finite(l);
            let expect = if d % 3 == 0 { 3 } else { 1 };
            assert_eq!(splitting_count(&v, 3).count, expect);
            assert_eq!(splitting_count_by_factoring(&fq, &v, 4, 1), Some(expect));
        }
        assert_eq!(splitting_count_by_factoring(&fq, &Place::Infinity, 3, 1), Some(1));
    }

    #[test]
    fn carlitz_layer_examples() {
        let (fq, c) = setup(3, "T + t");
        let cfg = Config::default();
        let p = Place::parse(&fq, "T").unwrap();
        let v = Place::parse(&fq, "T+1").unwrap();
        assert_eq!(h0_layer(&c, &p, 1, &v, 0, &cfg).unwrap(), 1);
        assert_eq!(h0_layer(&c, &p, 0, &v, 0, &cfg).unwrap(), 0);
        assert_eq!(h0_layer(&c, &p, 1, &p, 0, &cfg), Err(Error::UnramifiedInapplicable));
        for m in 0..3 {
            let a = h0_layer(&c, &p, 1, &v, m, &cfg).unwrap();
            let b = h0_layer(&c, &p, 1, &v, m + 1, &cfg).unwrap();
            assert!(a <= b && b <= 1);
        }
    }

    #[test]
    fn carlitz_eisenstein() {
        for q in [3, 5] {
            let (fq, c) = setup(q, "T + t");
            let p = Place::parse(&fq, "T").unwrap();
            assert!(eisenstein_vanishing(&c, &p, &p).unwrap());
            assert!(!eisenstein_vanishing(&c, &p, &Place::parse(&fq, "T+1").unwrap()).unwrap());
            let cfg = Config::default();
            let at_p = h0_tensor_term(&c, &p, &p, &cfg).unwrap();
            assert_eq!(at_p, LocalH0 { value: LocalDim::Dim(0), method: Method::Eisenstein });
            let at_inf = h0_tensor_term(&c, &p, &Place::Infinity, &cfg).unwrap();
            assert_eq!(at_inf, LocalH0 { value: LocalDim::Dim(0), method: Method::NewtonHensel });
        }
    }

    #[test]
    fn unit_middle_coefficient_is_not_eisenstein() {
        let (fq, m) = setup(3, "T + t + t^2");
        let p = Place::parse(&fq, "T").unwrap();
        assert!(!eisenstein_vanishing(&m, &p, &p).unwrap());
    }

    #[test]
    fn carlitz_good_place_term() {
        // Frob_v acts on C[T^n] = A/T^n as multiplication by T+1, and
        // (T+1)^(3^m) = 1 + T^(3^m), so the tower fixes all of C[T^∞]: h_n = n,
        // corank 1, and the divisible module contributes nothing after ⊗ F_p.
        let (fq, c) = setup(3, "T + t");
        let p = Place::parse(&fq, "T").unwrap();
        let v = Place::parse(&fq, "T+1").unwrap();
        let t = h0_tensor_term(&c, &p, &v, &Config::default()).unwrap();
        assert_eq!(t.method, Method::Unramified);
        assert_eq!(t.dim(), Some(0));
        let cfg = Config::default();
        for n in 1..=3 {
            assert_eq!(h0_stable(&c, &p, n, &v, &cfg).unwrap(), Some(n as usize));
        }
    }

    #[test]
    fn layer_matches_brute_force() {
        let (fq, m) = setup(3, "T + (T+1)*t + t^2");
        let p = Place::parse(&fq, "T").unwrap();
        let cfg = Config::default();
        for v in ["T+1", "T+2", "T^2+1"] {
            let v = Place::parse(&fq, v).unwrap();
            if m.reduction_type(&v).unwrap() != ReductionType::Good {
                continue;
            }
            let red = m.reduce(&v).unwrap();
            for mm in 0..=1 {
                let e = 3usize.pow(mm);
                if v.degree() * e > 9 {
                    continue;
                }
                let brute = brute_force_kernel_dim(&red, p.generator().unwrap(), e, cfg.seed);
                assert_eq!(h0_layer(&m, &p, 1, &v, mm, &cfg).unwrap(), brute);
            }
        }
    }
}
