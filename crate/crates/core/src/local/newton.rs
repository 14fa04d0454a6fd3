//! Newton polygons of `F_q`-linear polynomials over a completion, and counting
//! of their roots in unramified extensions.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::series::{LSeries, LocalField};
use crate::error::{Error, Result};
use crate::field::{Field, FiniteFieldOps};
use crate::linalg;
use crate::twisted::TwistedPoly;

/// A reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

impl Ratio {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let s = if den < 0 { -1 } else { 1 };
        Ratio {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// One edge of the lower convex hull of the points `(q^i, v(a_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Indices `i` of the end points.
    pub from: usize,
    pub to: usize,
    pub slope: Ratio,
    /// Horizontal length `q^to - q^from`.
    pub length: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    pub fn total_length(&self) -> u128 {
        self.segments.iter().map(|s| s.length).sum()
    }
}

/// Number of roots in the unramified extension of degree `e`, as an `F_q`-dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RootCount {
    /// Exactly `q^dim` roots, zero included.
    Known { dim: usize },
    Unknown,
}

fn qpow(q: u64, i: usize) -> u128 {
    (q as u128).pow(i as u32)
}

/// Lower convex hull of `(q^i, v(a_i))` over the nonzero coefficients.
pub fn newton_polygon(f: &TwistedPoly<LocalField>) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::invalid("Newton polygon of the zero polynomial"));
    }
    let q = f.field().q();
    let mut pts: Vec<(usize, u128, i64)> = Vec::new();
    for (i, a) in f.coeffs().iter().enumerate() {
        if a.is_exact_zero() {
            continue;
        }
        match a.valuation() {
            Some(v) => pts.push((i, qpow(q, i), v)),
            None => {
                return Err(Error::InsufficientPrecision(format!(
                    "coefficient of τ^{i} vanishes to the working precision"
                )))
            }
        }
    }
    let mut hull: Vec<(usize, u128, i64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above the chord a -> p
            let lhs = (b.2 as i128 - a.2 as i128) * (p.1 as i128 - a.1 as i128);
            let rhs = (p.2 as i128 - a.2 as i128) * (b.1 as i128 - a.1 as i128);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let dx = b.1 - a.1;
            Segment {
                from: a.0,
                to: b.0,
                slope: Ratio::new(b.2 as i128 - a.2 as i128, dx as i128),
                length: dx,
            }
        })
        .collect();
    Ok(NewtonPolygon { segments })
}

/// Roots of a separable `F_q`-linear `f` in the unramified extension of `F_v` of degree `e`.
///
/// Roots of valuation `s` exist only on segments of integral slope `-s`. Their
/// leading digits are the nonzero roots of the residual polynomial
/// `Σ lc(a_i) y^(q^i)` over the segment. If the segment starts at `i = 0` the
/// residual has constant nonzero derivative, so each residual root lifts
/// uniquely; if it starts higher and has nonzero residual roots the count is
/// left undecided.
pub fn count_roots_local(f: &TwistedPoly<LocalField>, e: usize, seed: u64) -> Result<RootCount> {
    if f.ht()? != 0 {
        return Err(Error::invalid("root counting needs a separable polynomial"));
    }
    let poly = newton_polygon(f)?;
    let lf = f.field();
    let k = lf.residue();
    let q = lf.q();
    let (ext, emb) = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        k.extension(e, &mut rng)
    };
    let mut total: u128 = 1;
    for seg in &poly.segments {
        if !seg.slope.is_integer() {
            continue;
        }
        // residual over the segment, mapped into the extension
        let s = -seg.slope.num as i64;
        let m = f.coeff(seg.from).valuation().unwrap() + s * qpow(q, seg.from) as i64;
        let mut res = vec![ext.zero(); seg.to + 1];
        for (i, r) in res.iter_mut().enumerate().take(seg.to + 1).skip(seg.from) {
            let a = f.coeff(i);
            if let Some(v) = a.valuation() {
                if v + s * qpow(q, i) as i64 == m {
                    *r = emb.map(a.leading().unwrap());
                }
            }
        }
        let rp = TwistedPoly::new(&ext, res);
        let cols: Vec<_> = (0..ext.degree())
            .map(|j| ext.to_coords(&rp.evaluate(&ext.basis_elem(j))))
            .collect();
        let kdim = linalg::kernel_of_columns(ext.base(), &cols, ext.degree()).len();
        if kdim == 0 {
            continue;
        }
        if seg.from != 0 {
            return Ok(RootCount::Unknown);
        }
        total += qpow(q, kdim) - 1;
    }
    let mut dim = 0;
    let mut c = 1u128;
    while c < total {
        c *= q as u128;
        dim += 1;
    }
    if c != total {
        return Err(Error::Internal(format!(
            "root count {total} is not a power of q = {q}"
        )));
    }
    Ok(RootCount::Known { dim })
}

/// Lift a simple residual root `y0` (a residue-field element, for a segment starting at
/// `i = 0` with integral slope `-s`) to a root `u^s·y` of `f` at the field's precision.
pub fn hensel_lift(f: &TwistedPoly<LocalField>, s: i64, y0: &[crate::field::FqElem]) -> Result<LSeries> {
    let lf = f.field();
    let a0 = f.coeff(0);
    let mut x = lf.mul(&lf.monomial(y0.to_vec(), 0), &lf.monomial(lf.residue().one(), s));
    let inv = lf
        .inv(&a0)
        .ok_or_else(|| Error::InsufficientPrecision("linear coefficient vanishes".into()))?;
    // f'(x) = a_0, so Newton's step is x -> x - f(x)/a_0
    for _ in 0..=lf.precision() {
        let fx = f.evaluate(&x);
        if fx.is_exact_zero() || fx.valuation().is_none() {
            break;
        }
        x = lf.sub(&x, &lf.mul(&fx, &inv));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_field::{Place, RationalFunctions};
    use crate::field::Fq;

    fn local_poly(q: u32, place: &str, s: &str, n: usize) -> TwistedPoly<LocalField> {
        let fq = Fq::prime(q).unwrap();
        let rf = RationalFunctions::new(fq.clone());
        let v = Place::parse(&fq, place).unwrap();
        let lf = LocalField::new(&fq, &v, n).unwrap();
        let f = TwistedPoly::parse(&rf, s).unwrap();
        f.map_coeffs(&lf, |c| lf.embed(&rf, c))
    }

    #[test]
    fn carlitz_at_t_is_totally_ramified() {
        for q in [3, 5] {
            let f = local_poly(q, "T", "T + t", 16);
            let np = newton_polygon(&f).unwrap();
            assert_eq!(np.segments.len(), 1);
            assert_eq!(np.segments[0].slope, Ratio::new(-1, q as i128 - 1));
            assert_eq!(np.total_length(), q as u128 - 1);
            assert_eq!(count_roots_local(&f, 1, 0).unwrap(), RootCount::Known { dim: 0 });
        }
    }

    #[test]
    fn x_q_minus_t_x() {
        let f = local_poly(3, "T", "2*T + t", 16);
        assert_eq!(count_roots_local(&f, 1, 0).unwrap(), RootCount::Known { dim: 0 });
    }

    #[test]
    fn x_q_minus_t_q_minus_1_x() {
        for q in [3u32, 5] {
            let s = format!("{}*T^{} + t", q - 1, q - 1);
            let f = local_poly(q, "T", &s, 16);
            let np = newton_polygon(&f).unwrap();
            assert_eq!(np.segments[0].slope, Ratio::new(-1, 1));
            assert_eq!(count_roots_local(&f, 1, 0).unwrap(), RootCount::Known { dim: 1 });
            // each residual root lifts to an actual root
            let lf = f.field().clone();
            let k = lf.residue().clone();
            let x = hensel_lift(&f, 1, &k.one()).unwrap();
            let fx = f.evaluate(&x);
            assert!(fx.valuation().is_none() || fx.valuation().unwrap() >= 16);
        }
    }

    #[test]
    fn carlitz_at_infinity_has_no_rational_torsion() {
        for q in [3, 5] {
            let f = local_poly(q, "inf", "T + t", 16);
            let np = newton_polygon(&f).unwrap();
            assert_eq!(np.segments[0].slope, Ratio::new(1, q as i128 - 1));
            assert_eq!(count_roots_local(&f, 1, 0).unwrap(), RootCount::Known { dim: 0 });
        }
    }

    #[test]
    fn inseparable_residual_is_unknown() {
        // points (1,2), (3,0), (9,0): the second segment is flat and starts at i = 1
        let f = local_poly(3, "T", "T^2 + t + 2*t^2", 16);
        let np = newton_polygon(&f).unwrap();
        assert_eq!(np.segments.len(), 2);
        assert_eq!(np.segments[1].slope, Ratio::new(0, 1));
        // y^3 + 2 y^9 = 0 has the nonzero root y = 1 in F_3
        assert_eq!(count_roots_local(&f, 1, 0).unwrap(), RootCount::Unknown);
    }

    #[test]
    fn unramified_extension_picks_up_roots() {
        // residual y^3 + y: only y = 0 over F_3, the F_3-line {0, ±i} over F_9
        let f = local_poly(3, "T", "T^2 + t", 16);
        assert_eq!(count_roots_local(&f, 1, 0).unwrap(), RootCount::Known { dim: 0 });
        assert_eq!(count_roots_local(&f, 2, 0).unwrap(), RootCount::Known { dim: 1 });
    }
}
