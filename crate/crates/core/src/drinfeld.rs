//! Drinfeld modules `φ: A → K{τ}` given by `φ_T`, their reduction at finite
//! places and torsion kernels over finite fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base_field::{
    factor_poly, format_poly, valuation, APoly, FieldParams, Place, RationalFunctions, ResidueField,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{Embedding, Field, FiniteField, FiniteFieldOps, Fq, FqElem};
use crate::linalg;
use crate::poly::PolyRing;
use crate::twisted::TwistedPoly;

/// A Drinfeld module over the `A`-field `K`, stored through `φ_T = γ(T) + a_1 τ + … + a_r τ^r`.
#[derive(Clone, Debug, PartialEq)]
pub struct DrinfeldModule<K: Field> {
    phi_t: TwistedPoly<K>,
}

pub type GlobalModule = DrinfeldModule<RationalFunctions>;
pub type ReducedModule = DrinfeldModule<FiniteField>;

impl<K: Field> DrinfeldModule<K> {
    /// Requires rank `deg_τ φ_T ≥ 1`.
    pub fn new(phi_t: TwistedPoly<K>) -> Result<Self> {
        match phi_t.deg() {
            Ok(r) if r >= 1 => Ok(DrinfeldModule { phi_t }),
            _ => Err(Error::invalid("φ_T must have τ-degree at least 1")),
        }
    }

    pub fn from_coeffs(field: &K, gamma_t: K::Elem, coeffs: Vec<K::Elem>) -> Result<Self> {
        let mut v = vec![gamma_t];
        v.extend(coeffs);
        Self::new(TwistedPoly::new(field, v))
    }

    pub fn field(&self) -> &K {
        self.phi_t.field()
    }

    pub fn phi_t(&self) -> &TwistedPoly<K> {
        &self.phi_t
    }

    pub fn gamma_t(&self) -> K::Elem {
        self.phi_t.coeff(0)
    }

    pub fn rank(&self) -> usize {
        self.phi_t.deg().unwrap()
    }

    /// `a_i` for `0 ≤ i ≤ r`.
    pub fn coeff(&self, i: usize) -> K::Elem {
        self.phi_t.coeff(i)
    }

    /// `γ(a)`: the image of `a` under `A → K`, `T ↦ γ(T)`.
    pub fn gamma(&self, a: &APoly) -> K::Elem {
        let k = self.field();
        let g = self.gamma_t();
        let mut acc = k.zero();
        for c in a.coeffs().iter().rev() {
            acc = k.add(&k.mul(&acc, &g), &k.from_base(*c));
        }
        acc
    }

    /// `φ_a = Σ c_j φ_T^j`, by Horner's rule in `K{τ}`.
    pub fn phi_of(&self, a: &APoly) -> TwistedPoly<K> {
        let k = self.field();
        let mut acc = TwistedPoly::zero(k);
        for c in a.coeffs().iter().rev() {
            acc = acc
                .mul(&self.phi_t)
                .unwrap()
                .add(&TwistedPoly::constant(k, k.from_base(*c)))
                .unwrap();
        }
        acc
    }

    /// The isomorphic module `c φ c^{-1}`, with `a_i ↦ c^(q^i - 1) a_i`.
    pub fn twist(&self, c: &K::Elem) -> Result<Self> {
        let k = self.field();
        let inv = k.inv(c).ok_or(Error::ZeroTwist)?;
        let mut cq = c.clone();
        let coeffs = self
            .phi_t
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i > 0 {
                    cq = k.frobenius(&cq, 1);
                }
                k.mul(a, &k.mul(&cq, &inv))
            })
            .collect();
        Self::new(TwistedPoly::new(k, coeffs))
    }
}

/// Reduction behaviour at a finite place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ReductionType {
    Good,
    StableBad { reduced_rank: usize },
    Undetermined,
}

/// Classification together with the normalization that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionInfo {
    pub kind: ReductionType,
    /// `w = v_l(c)` of the optimal normalizing twist, when one exists.
    pub w: Option<i64>,
    /// Several positive indices reach a unit coefficient under `w`.
    pub tie: bool,
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl GlobalModule {
    /// Module over `F_q(T)` with `γ(T) = T`.
    pub fn over_f(field: &RationalFunctions, coeffs: Vec<crate::base_field::RationalFunction>) -> Result<Self> {
        Self::from_coeffs(field, field.t(), coeffs)
    }

    pub fn parse(field: &RationalFunctions, phi_t: &str) -> Result<Self> {
        let f = TwistedPoly::parse(field, phi_t)?;
        if f.coeff(0) != field.t() {
            return Err(Error::invalid("φ_T must have constant term T"));
        }
        Self::new(f)
    }

    /// The lcm `d` of the denominators of `a_1..a_r`; twisting by `d` gives a model with
    /// coefficients in `A`.
    pub fn denominator(&self) -> APoly {
        let ring = self.field().ring();
        let mut d = ring.one();
        for c in &self.phi_t.coeffs()[1..] {
            let g = ring.gcd(&d, c.den());
            d = ring.div_exact(&ring.mul(&d, c.den()), &g).unwrap();
        }
        d
    }

    /// Model with all coefficients in `A`, obtained by twisting with [`denominator`](Self::denominator).
    pub fn integral_model(&self) -> Self {
        let d = self.denominator();
        let ring = self.field().ring();
        if ring.is_one(&d) {
            return self.clone();
        }
        self.twist(&self.field().from_poly(d)).unwrap()
    }

    /// `(q^i - 1) w + v(a_i) ≥ 0` for all `i ≥ 1`, minimized over integers `w`.
    pub fn reduction_info(&self, l: &Place) -> Result<ReductionInfo> {
        if l.is_infinite() {
            return Err(Error::invalid("reduction type is defined at finite places only"));
        }
        let k = self.field();
        let q = k.q() as i64;
        let vals: Vec<(usize, i64, i64)> = (1..=self.rank())
            .filter_map(|i| {
                valuation(k, &self.coeff(i), l).map(|v| (i, v, q.pow(i as u32) - 1))
            })
            .collect();
        let w = vals
            .iter()
            .map(|&(_, v, m)| div_ceil(-v, m))
            .max()
            .unwrap();
        let units: Vec<usize> = vals
            .iter()
            .filter(|&&(_, v, m)| m * w + v == 0)
            .map(|&(i, _, _)| i)
            .collect();
        let r = self.rank();
        Ok(match units.last() {
            None => ReductionInfo {
                kind: ReductionType::Undetermined,
                w: None,
                tie: false,
            },
            Some(&top) => ReductionInfo {
                kind: if top == r {
                    ReductionType::Good
                } else {
                    ReductionType::StableBad { reduced_rank: top }
                },
                w: Some(w),
                tie: units.len() > 1 && top != r,
            },
        })
    }

    pub fn reduction_type(&self, l: &Place) -> Result<ReductionType> {
        Ok(self.reduction_info(l)?.kind)
    }

    /// The reduction of the optimally normalized model modulo `l`.
    pub fn reduce(&self, l: &Place) -> Result<ReducedModule> {
        let info = self.reduction_info(l)?;
        let w = info
            .w
            .ok_or_else(|| Error::invalid("reduction is undetermined at this place"))?;
        let k = self.field();
        let gen = l.generator().unwrap();
        let lw = k.pow(&k.from_poly(gen.clone()), w.unsigned_abs());
        let c = if w >= 0 { lw } else { k.inv(&lw).unwrap() };
        let model = if w == 0 { self.clone() } else { self.twist(&c)? };
        let res = ResidueField::new(k.fq(), l);
        let kf = res.field().clone();
        let coeffs = model
            .phi_t
            .coeffs()
            .iter()
            .map(|a| res.reduce(k, a))
            .collect::<Result<Vec<_>>>()?;
        DrinfeldModule::new(TwistedPoly::new(&kf, coeffs))
    }

    /// `H = ht_τ(φ̄_l) / deg l` at a place of good reduction.
    pub fn height_of_reduction(&self, l: &Place) -> Result<usize> {
        if self.reduction_type(l)? != ReductionType::Good {
            return Err(Error::NotGoodReduction);
        }
        let red = self.reduce(l)?;
        let ht = red.phi_of(l.generator().unwrap()).ht()?;
        let d = l.degree();
        if ht % d != 0 {
            return Err(Error::Internal(format!(
                "height {ht} of the reduction is not divisible by deg l = {d}"
            )));
        }
        Ok(ht / d)
    }

    /// Prime divisors of `a_r` in the integral model, sorted canonically.
    pub fn leading_primes(&self, seed: u64) -> Result<Vec<Place>> {
        let integral = self.integral_model();
        let ar = integral.coeff(integral.rank());
        let num = ar.num().clone();
        let fq = self.field().fq();
        let mut out: Vec<Place> = factor_poly(fq, &num, seed)?
            .into_iter()
            .map(|(g, _)| Place::Finite(g))
            .collect();
        out.sort_by(|a, b| a.canonical_cmp(b));
        Ok(out)
    }
}

/// Kernel of `φ̄_a` on a finite extension of the residue field.
#[derive(Clone, Debug)]
pub struct TorsionKernel {
    pub extension: FiniteField,
    pub embedding: Embedding,
    /// `F_q`-dimension of the kernel.
    pub dim: usize,
    /// `F_q`-basis of the kernel, as elements of `extension`.
    pub basis: Vec<Vec<FqElem>>,
}

/// Elementary divisors `l^k` of a finite torsion module, grouped by prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionStructure {
    pub primary: Vec<PrimaryPart>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryPart {
    pub prime: String,
    /// Exponents `k` of the cyclic summands `A/l^k`, largest first.
    pub exponents: Vec<usize>,
}

impl TorsionStructure {
    /// Whether the module is `(A/a)^r` for `a = Π l_i^(e_i)`.
    pub fn is_full(&self, fq: &Fq, a: &APoly, r: usize, seed: u64) -> Result<bool> {
        let fac = factor_poly(fq, a, seed)?;
        if fac.len() != self.primary.len() {
            return Ok(false);
        }
        Ok(fac.iter().zip(&self.primary).all(|((l, e), part)| {
            part.prime == format_poly(fq, l) && part.exponents == vec![*e; r]
        }))
    }

    pub fn is_trivial(&self) -> bool {
        self.primary.iter().all(|p| p.exponents.is_empty())
    }
}

impl ReducedModule {
    /// Degree-`e` extension of the coefficient field with a seeded modulus.
    pub fn extension(&self, e: usize, seed: u64) -> (FiniteField, Embedding) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.field().extension(e, &mut rng)
    }

    fn check_torsion_order(&self, a: &APoly) -> Result<()> {
        if a.is_zero() {
            return Err(Error::invalid("torsion of the zero element is the whole module"));
        }
        if self.field().is_zero(&self.gamma(a)) {
            return Err(Error::InseparableTorsion);
        }
        Ok(())
    }

    /// Columns of the `F_q`-linear map `y ↦ φ̄_a(y)` on `ext`.
    pub fn evaluation_columns(
        &self,
        a: &APoly,
        ext: &FiniteField,
        emb: &Embedding,
        exec: Execution,
    ) -> Vec<Vec<FqElem>> {
        let f = self.phi_of(a).map_coeffs(ext, |c| emb.map(c));
        exec.map_range(ext.degree(), |j| ext.to_coords(&f.evaluate(&ext.basis_elem(j))))
    }

    pub fn kernel_on(&self, a: &APoly, ext: &FiniteField, emb: &Embedding, exec: Execution) -> Vec<Vec<FqElem>> {
        let cols = self.evaluation_columns(a, ext, emb, exec);
        linalg::kernel_of_columns(ext.base(), &cols, ext.degree())
    }

    /// `φ̄[a]` on the degree-`e` extension of the coefficient field.
    pub fn torsion_kernel(&self, a: &APoly, e: usize, seed: u64, exec: Execution) -> Result<TorsionKernel> {
        self.check_torsion_order(a)?;
        if e == 0 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        let (ext, emb) = self.extension(e, seed);
        let basis = self.kernel_on(a, &ext, &emb, exec);
        Ok(TorsionKernel {
            dim: basis.len(),
            extension: ext,
            embedding: emb,
            basis,
        })
    }

    /// Smallest `e` with `F_q`-dimension of the extension at most `max_dim` over which
    /// `φ̄[a]` is fully rational, i.e. has `q^(r deg a)` points.
    pub fn splitting_degree(&self, a: &APoly, max_dim: usize, seed: u64) -> Result<Option<usize>> {
        self.check_torsion_order(a)?;
        let full = self.rank() * a.degree().unwrap();
        let d = self.field().degree();
        for e in 1..=(max_dim / d) {
            if self.torsion_kernel(a, e, seed, Execution::Sequential)?.dim == full {
                return Ok(Some(e));
            }
        }
        Ok(None)
    }

    /// Elementary divisors of `φ̄[a]` over the degree-`e` extension, read off from the
    /// kernel dimensions of `φ̄_{l^j}`: the number of summands `A/l^k` with `k ≥ j`
    /// is `(δ_j - δ_{j-1}) / deg l`.
    pub fn torsion_module_structure(&self, a: &APoly, e: usize, seed: u64) -> Result<TorsionStructure> {
        self.check_torsion_order(a)?;
        let fq = self.field().base().clone();
        let ring = PolyRing::new(fq.clone());
        let (ext, emb) = self.extension(e, seed);
        let mut primary = Vec::new();
        for (l, mult) in factor_poly(&fq, a, seed)? {
            let dl = l.degree().unwrap();
            let mut dims = vec![0usize];
            for j in 1..=mult {
                let lj = ring.pow(&l, j as u64);
                dims.push(self.kernel_on(&lj, &ext, &emb, Execution::Sequential).len());
            }
            let at_least: Vec<usize> = (1..=mult)
                .map(|j| {
                    let diff = dims[j] - dims[j - 1];
                    debug_assert_eq!(diff % dl, 0);
                    diff / dl
                })
                .collect();
            let mut exponents = Vec::new();
            for j in (1..=mult).rev() {
                let exact = at_least[j - 1] - at_least.get(j).copied().unwrap_or(0);
                exponents.extend(std::iter::repeat_n(j, exact));
            }
            primary.push(PrimaryPart {
                prime: format_poly(&fq, &l),
                exponents,
            });
        }
        Ok(TorsionStructure { primary })
    }
}

/// Input document for a module over `F_q(T)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDoc {
    #[serde(flatten)]
    pub params: FieldParams,
    /// `[a_0, a_1, …, a_r]` with `a_0 = "T"`; a list not starting with `T`
    /// (or of length one) is read as `[a_1, …, a_r]`.
    #[serde(rename = "phi_T")]
    pub phi_t: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ModuleDoc {
    pub fn build(&self) -> Result<(Fq, GlobalModule)> {
        let fq = self.params.build()?;
        let field = RationalFunctions::new(fq.clone());
        let parsed = self
            .phi_t
            .iter()
            .map(|s| field.parse(s))
            .collect::<Result<Vec<_>>>()?;
        let coeffs = if parsed.len() >= 2 && parsed[0] == field.t() {
            parsed[1..].to_vec()
        } else {
            parsed
        };
        let m = GlobalModule::over_f(&field, coeffs)?;
        Ok((fq, m))
    }

    pub fn from_module(params: &FieldParams, m: &GlobalModule) -> Self {
        let k = m.field();
        ModuleDoc {
            params: params.clone(),
            phi_t: (0..=m.rank()).map(|i| k.format_elem(&m.coeff(i))).collect(),
            note: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_field::{parse_poly, RationalFunction};
    use crate::field::Fq;
    use proptest::prelude::*;
    use rand::Rng;

    fn f3() -> RationalFunctions {
        RationalFunctions::new(Fq::prime(3).unwrap())
    }

    fn module(f: &RationalFunctions, s: &str) -> GlobalModule {
        GlobalModule::parse(f, s).unwrap()
    }

    fn place(f: &RationalFunctions, s: &str) -> Place {
        Place::parse(f.fq(), s).unwrap()
    }

    #[test]
    fn carlitz_phi_of_t_squared() {
        let f = f3();
        let c = module(&f, "T + t");
        let a = parse_poly(f.fq(), "T^2").unwrap();
        assert_eq!(c.phi_of(&a), TwistedPoly::parse(&f, "T^2 + (T+T^3)*t + t^2").unwrap());
        // oracle: compose η-images
        let eta = c.phi_t().eta();
        assert_eq!(c.phi_of(&a).eta(), eta.compose(&f, &eta));
        let two = parse_poly(f.fq(), "2").unwrap();
        assert_eq!(c.phi_of(&two), TwistedPoly::constant(&f, f.parse("2").unwrap()));
    }

    #[test]
    fn rank_two_degree_three() {
        let f = f3();
        let m = module(&f, "T + t + T*t^2");
        let a = parse_poly(f.fq(), "T^3+T+2").unwrap();
        let pa = m.phi_of(&a);
        assert_eq!(pa.deg().unwrap(), 6);
        assert_eq!(pa.derivative(), f.from_poly(a));
    }

    #[test]
    fn twist_examples() {
        let f = f3();
        let c = module(&f, "T + t");
        assert_eq!(c.twist(&f.one()).unwrap(), c);
        let x = f.parse("T+1").unwrap();
        let u = f.pow(&x, 2);
        assert_eq!(
            c.twist(&x).unwrap().phi_t(),
            &TwistedPoly::new(&f, vec![f.t(), u])
        );
        let m = module(&f, "T + (T^2+1)*t + 1/(T+2)*t^2");
        let back = m.twist(&x).unwrap().twist(&f.inv(&x).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(c.twist(&f.zero()), Err(Error::ZeroTwist));
    }

    /// Oracle: scan a window of integers `w` for all-integral normalizations with a unit
    /// coefficient of positive index; report the largest such index at the least such `w`.
    fn brute_reduction(m: &GlobalModule, l: &Place) -> ReductionType {
        let k = m.field();
        let q = k.q() as i64;
        for w in -40..=40i64 {
            let vals: Vec<Option<i64>> = (1..=m.rank())
                .map(|i| valuation(k, &m.coeff(i), l).map(|v| v + (q.pow(i as u32) - 1) * w))
                .collect();
            if vals.iter().any(|v| v.is_some_and(|v| v < 0)) {
                continue;
            }
            let units: Vec<usize> = (1..=m.rank()).filter(|&i| vals[i - 1] == Some(0)).collect();
            return match units.last() {
                None => ReductionType::Undetermined,
                Some(&i) if i == m.rank() => ReductionType::Good,
                Some(&i) => ReductionType::StableBad { reduced_rank: i },
            };
        }
        unreachable!("window too small")
    }

    #[test]
    fn reduction_examples() {
        let f = f3();
        let c = module(&f, "T + t");
        for s in ["T", "T+1", "T^2+1", "T^3+2*T+1"] {
            assert_eq!(c.reduction_type(&place(&f, s)).unwrap(), ReductionType::Good);
        }
        let m = module(&f, "T + t + (T+1)*t^2");
        assert_eq!(
            m.reduction_type(&place(&f, "T+1")).unwrap(),
            ReductionType::StableBad { reduced_rank: 1 }
        );
        assert_eq!(brute_reduction(&m, &place(&f, "T+1")), ReductionType::StableBad { reduced_rank: 1 });
        let red = m.reduce(&place(&f, "T+1")).unwrap();
        assert_eq!(red.rank(), 1);
        // v(a_1) = 1 at (T) and q - 1 = 2: no integral w
        let u = module(&f, "T + T*t");
        assert_eq!(u.reduction_type(&place(&f, "T")).unwrap(), ReductionType::Undetermined);
    }

    #[test]
    fn height_examples() {
        let f = f3();
        assert_eq!(module(&f, "T + t").height_of_reduction(&place(&f, "T")).unwrap(), 1);
        assert_eq!(module(&f, "T + t").height_of_reduction(&place(&f, "T^2+1")).unwrap(), 1);
        assert_eq!(module(&f, "T + t^2").height_of_reduction(&place(&f, "T")).unwrap(), 2);
        let m = module(&f, "T + t + (T+1)*t^2");
        assert_eq!(
            m.height_of_reduction(&place(&f, "T+1")),
            Err(Error::NotGoodReduction)
        );
    }

    #[test]
    fn torsion_examples() {
        let f = f3();
        let fq = f.fq().clone();
        let red = module(&f, "T + t").reduce(&place(&f, "T+1")).unwrap();
        let t = parse_poly(&fq, "T").unwrap();
        let k = red.torsion_kernel(&t, 1, 0, Execution::Sequential).unwrap();
        assert_eq!(k.dim, 1);
        let one = parse_poly(&fq, "1").unwrap();
        assert_eq!(red.torsion_kernel(&one, 3, 0, Execution::Sequential).unwrap().dim, 0);
        let tp1 = parse_poly(&fq, "T+1").unwrap();
        assert!(matches!(
            red.torsion_kernel(&tp1, 1, 0, Execution::Sequential),
            Err(Error::InseparableTorsion)
        ));
        let s = red.torsion_module_structure(&t, 1, 0).unwrap();
        assert!(s.is_full(&fq, &t, 1, 0).unwrap());
        let s = red.torsion_module_structure(&one, 1, 0).unwrap();
        assert!(s.is_trivial());
    }

    #[test]
    fn full_torsion_over_splitting_field() {
        let f = f3();
        let fq = f.fq().clone();
        let red = module(&f, "T + t + t^2").reduce(&place(&f, "T+2")).unwrap();
        for a in ["T", "T^2", "T^2+1"] {
            let a = parse_poly(&fq, a).unwrap();
            let e = red.splitting_degree(&a, 40, 1).unwrap().expect("splits");
            let s = red.torsion_module_structure(&a, e, 1).unwrap();
            assert!(s.is_full(&fq, &a, 2, 0).unwrap(), "{s:?}");
            let k = red.torsion_kernel(&a, e, 1, Execution::Parallel).unwrap();
            assert_eq!(k.dim, 2 * a.degree().unwrap());
        }
    }

    #[test]
    fn module_doc_conventions() {
        let doc: ModuleDoc = serde_json::from_str(r#"{"p":3,"m":1,"modulus":null,"phi_T":["T","1"]}"#).unwrap();
        let (_, m) = doc.build().unwrap();
        assert_eq!(m.rank(), 1);
        let doc: ModuleDoc = serde_json::from_str(r#"{"p":3,"phi_T":["1","T+1"]}"#).unwrap();
        let (_, m) = doc.build().unwrap();
        assert_eq!(m.rank(), 2);
        let again = ModuleDoc::from_module(&doc.params, &m);
        assert_eq!(again.phi_t, vec!["T", "1", "T+1"]);
        assert_eq!(again.build().unwrap().1, m);
    }

    fn random_rf(f: &RationalFunctions, rng: &mut ChaCha8Rng, deg: usize) -> RationalFunction {
        let fq = f.fq();
        loop {
            let c: Vec<FqElem> = (0..=deg).map(|_| fq.random(rng)).collect();
            let x = f.from_poly(APoly::new(c));
            if !x.is_zero() {
                return x;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homomorphism_laws_small(seed in any::<u64>()) {
            let f = f3();
            let fq = f.fq().clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..=2);
            let coeffs = (0..r).map(|_| random_rf(&f, &mut rng, 1)).collect();
            let m = GlobalModule::over_f(&f, coeffs).unwrap();
            let a = APoly::new((0..=rng.gen_range(0..2)).map(|_| fq.random(&mut rng)).collect());
            let b = APoly::new((0..=rng.gen_range(0..2)).map(|_| fq.random(&mut rng)).collect());
            let ring = f.ring();
            prop_assert_eq!(m.phi_of(&ring.add(&a, &b)), m.phi_of(&a).add(&m.phi_of(&b)).unwrap());
            prop_assert_eq!(m.phi_of(&ring.mul(&a, &b)), m.phi_of(&a).mul(&m.phi_of(&b)).unwrap());
            if !a.is_zero() {
                let pa = m.phi_of(&a);
                prop_assert_eq!(pa.deg().unwrap(), r * a.degree().unwrap());
                prop_assert_eq!(pa.derivative(), f.from_poly(a.clone()));
                prop_assert!(pa.is_separable().unwrap());
            }
        }

        #[test]
        fn reduction_matches_window_oracle_and_twists(seed in any::<u64>()) {
            let f = f3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = place(&f, ["T", "T+1", "T^2+1"][rng.gen_range(0..3)]);
            let lf = f.from_poly(l.generator().unwrap().clone());
            let r = rng.gen_range(1..=3);
            let coeffs: Vec<RationalFunction> = (0..r)
                .map(|_| {
                    let e = rng.gen_range(-3i64..=3);
                    let unit = f.parse(["1", "2", "T+2", "T^2+T+2"][rng.gen_range(0..4)]).unwrap();
                    let le = f.pow(&lf, e.unsigned_abs());
                    let le = if e < 0 { f.inv(&le).unwrap() } else { le };
                    f.mul(&unit, &le)
                })
                .collect();
            let m = GlobalModule::over_f(&f, coeffs).unwrap();
            let kind = m.reduction_type(&l).unwrap();
            prop_assert_eq!(kind, brute_reduction(&m, &l));
            let c = random_rf(&f, &mut rng, 2);
            prop_assert_eq!(m.twist(&c).unwrap().reduction_type(&l).unwrap(), kind);
            let integral = m.integral_model();
            for i in 1..=r {
                prop_assert!(integral.coeff(i).is_polynomial());
            }
            if kind != ReductionType::Undetermined {
                let red = m.reduce(&l).unwrap();
                let expect = match kind { ReductionType::StableBad { reduced_rank } => reduced_rank, _ => r };
                prop_assert_eq!(red.rank(), expect);
            }
        }

        #[test]
        fn kernel_inclusions(seed in any::<u64>()) {
            let f = f3();
            let fq = f.fq().clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs = (0..2).map(|_| f.from_base(fq.from_int(rng.gen_range(1..3)))).collect();
            let m = GlobalModule::over_f(&f, coeffs).unwrap();
            let red = m.reduce(&place(&f, "T^2+1")).unwrap();
            let a = parse_poly(&fq, "T").unwrap();
            let b = parse_poly(&fq, "T+1").unwrap();
            let ab = f.ring().mul(&a, &b);
            let (ext, emb) = red.extension(2, seed);
            let ker_ab = red.kernel_on(&ab, &ext, &emb, Execution::Sequential);
            let ker_a = red.kernel_on(&a, &ext, &emb, Execution::Sequential);
            let pa = red.phi_of(&a).map_coeffs(&ext, |c| emb.map(c));
            let pab = red.phi_of(&ab).map_coeffs(&ext, |c| emb.map(c));
            let pb = red.phi_of(&b).map_coeffs(&ext, |c| emb.map(c));
            for v in &ker_a {
                prop_assert!(ext.is_zero(&pab.evaluate(&ext.from_coords(v))));
            }
            for v in &ker_ab {
                let y = pa.evaluate(&ext.from_coords(v));
                prop_assert!(ext.is_zero(&pb.evaluate(&y)));
            }
            let dims: Vec<usize> = (0..=4)
                .map(|e| if e == 0 { 0 } else { red.torsion_kernel(&a, e, seed, Execution::Sequential).unwrap().dim })
                .collect();
            prop_assert!(dims[1] <= dims[2] && dims[2] <= dims[4] && dims[1] <= dims[3]);
            prop_assert!(dims.iter().all(|&d| d <= 2));
        }
    }
}
