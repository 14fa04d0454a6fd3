//! The `λ`-bound: the set `S`, one local term per place of `S` weighted by the
//! number of places above it in the constant `Z_p`-tower, and the final report.

use serde::{Deserialize, Serialize};

use crate::base_field::{FieldParams, Place};
use crate::config::Config;
use crate::drinfeld::{GlobalModule, ModuleDoc, ReductionType};
use crate::error::{Error, Result};
use crate::local::{h0_tensor_term, splitting_count, LocalDim, LocalH0, Method};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reason {
    P,
    Infinity,
    Bad,
}

/// A place of `S` and why it is there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPlace {
    pub place: Place,
    pub reasons: Vec<Reason>,
    /// `None` at `∞`.
    pub reduction: Option<ReductionType>,
    pub tie: bool,
}

/// `{p, ∞}` together with the prime divisors of `a_r` (integral model) where the
/// reduction is not good, in canonical order.
pub fn s_set(phi: &GlobalModule, p: &Place, seed: u64) -> Result<Vec<SPlace>> {
    if p.is_infinite() {
        return Err(Error::invalid("the fixed prime must be a finite place"));
    }
    let mut candidates = phi.leading_primes(seed)?;
    candidates.push(p.clone());
    candidates.sort_by(|a, b| a.canonical_cmp(b));
    candidates.dedup();
    let mut out = Vec::new();
    for v in candidates {
        let info = phi.reduction_info(&v)?;
        let mut reasons = Vec::new();
        if &v == p {
            reasons.push(Reason::P);
        }
        if info.kind != ReductionType::Good {
            reasons.push(Reason::Bad);
        }
        if !reasons.is_empty() {
            out.push(SPlace {
                place: v,
                reasons,
                reduction: Some(info.kind),
                tie: info.tie,
            });
        }
    }
    out.push(SPlace {
        place: Place::Infinity,
        reasons: vec![Reason::Infinity],
        reduction: None,
        tie: false,
    });
    out.sort_by(|a, b| a.place.canonical_cmp(&b.place));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SEntry {
    pub place: String,
    pub reasons: Vec<Reason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionType>,
    #[serde(default)]
    pub tie: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub place: String,
    pub degree: usize,
    pub splitting_count: u64,
    /// `None` when undetermined; the row then contributes `splitting_count · r`.
    pub local_dim: Option<usize>,
    pub method: Method,
    pub contribution: u64,
}

impl BoundRow {
    fn term(&self, rank: usize) -> u64 {
        self.local_dim.unwrap_or(rank) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub module: ModuleDoc,
    pub prime: String,
    pub rank: usize,
    #[serde(rename = "S")]
    pub s: Vec<SEntry>,
    pub rows: Vec<BoundRow>,
    pub residual_dim: u64,
    pub residual_dim_provenance: String,
    pub bound: u64,
    pub exact: bool,
    pub seed: u64,
}

impl BoundReport {
    /// Recompute contributions, `bound` and `exact` from the rows.
    pub fn recompute(&mut self) {
        let r = self.rank;
        for row in &mut self.rows {
            row.contribution = row.splitting_count * row.term(r);
        }
        self.bound = self.residual_dim + self.rows.iter().map(|r| r.contribution).sum::<u64>();
        self.exact = self.rows.iter().all(|r| r.local_dim.is_some());
    }

    /// The report with row `i` replaced by the worst case.
    pub fn with_forced_unknown(&self, i: usize) -> Self {
        let mut out = self.clone();
        if let Some(row) = out.rows.get_mut(i) {
            row.local_dim = None;
            row.method = Method::WorstCase;
        }
        out.recompute();
        out
    }

    /// Internal consistency of a report read back from JSON.
    pub fn validate(&self) -> Result<()> {
        let (fq, phi) = self.module.build()?;
        if phi.rank() != self.rank {
            return Err(Error::invalid(format!(
                "report rank {} differs from the module's rank {}",
                self.rank,
                phi.rank()
            )));
        }
        Place::parse(&fq, &self.prime)?;
        if self.rows.len() != self.s.len() {
            return Err(Error::invalid("one row per place of S is expected"));
        }
        let mut places = Vec::new();
        for (row, entry) in self.rows.iter().zip(&self.s) {
            if row.place != entry.place {
                return Err(Error::invalid(format!("row `{}` does not match S", row.place)));
            }
            let v = Place::parse(&fq, &row.place)?;
            if v.degree() != row.degree {
                return Err(Error::invalid(format!("wrong degree for place `{}`", row.place)));
            }
            if splitting_count(&v, fq.p()).count != row.splitting_count {
                return Err(Error::invalid(format!("wrong splitting count at `{}`", row.place)));
            }
            if row.local_dim.is_some_and(|d| d > self.rank) {
                return Err(Error::invalid(format!("local term above the rank at `{}`", row.place)));
            }
            if row.contribution != row.splitting_count * row.term(self.rank) {
                return Err(Error::invalid(format!("wrong contribution at `{}`", row.place)));
            }
            places.push(v);
        }
        if !places.windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt()) {
            return Err(Error::invalid("rows are not in canonical place order"));
        }
        let mut check = self.clone();
        check.recompute();
        if check.bound != self.bound || check.exact != self.exact {
            return Err(Error::invalid("bound or exact flag inconsistent with the rows"));
        }
        Ok(())
    }
}

/// Assemble the bound. `residual_dim` is the dimension of the residual fine
/// Selmer group, supplied by the caller together with where it came from.
pub fn lambda_bound(
    phi: &GlobalModule,
    params: &FieldParams,
    p: &Place,
    residual_dim: i64,
    provenance: &str,
    cfg: &Config,
) -> Result<BoundReport> {
    cfg.validate()?;
    if residual_dim < 0 {
        return Err(Error::invalid(format!(
            "residual dimension must be non-negative, got {residual_dim}"
        )));
    }
    let fq = phi.field().fq();
    let s = s_set(phi, p, cfg.seed)?;
    let terms: Vec<Result<LocalH0>> = cfg
        .execution
        .map(&s, |sp| h0_tensor_term(phi, p, &sp.place, cfg));
    let mut rows = Vec::with_capacity(s.len());
    for (sp, term) in s.iter().zip(terms) {
        let term = term?;
        rows.push(BoundRow {
            place: sp.place.label(fq),
            degree: sp.place.degree(),
            splitting_count: splitting_count(&sp.place, fq.p()).count,
            local_dim: match term.value {
                LocalDim::Dim(d) => Some(d),
                LocalDim::Unknown => None,
            },
            method: term.method,
            contribution: 0,
        });
    }
    let mut report = BoundReport {
        module: ModuleDoc::from_module(params, phi),
        prime: p.label(fq),
        rank: phi.rank(),
        s: s
            .iter()
            .map(|sp| SEntry {
                place: sp.place.label(fq),
                reasons: sp.reasons.clone(),
                reduction: sp.reduction,
                tie: sp.tie,
            })
            .collect(),
        rows,
        residual_dim: residual_dim as u64,
        residual_dim_provenance: provenance.to_string(),
        bound: 0,
        exact: true,
        seed: cfg.seed,
    };
    report.recompute();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_field::RationalFunctions;
    use crate::exec::Execution;
    use crate::field::Fq;

    fn setup(q: u32, phi: &str) -> (Fq, GlobalModule) {
        let fq = Fq::prime(q).unwrap();
        let rf = RationalFunctions::new(fq.clone());
        (fq, GlobalModule::parse(&rf, phi).unwrap())
    }

    #[test]
    fn s_set_examples() {
        let (fq, c) = setup(3, "T + t");
        let p = Place::parse(&fq, "T").unwrap();
        let s: Vec<Place> = s_set(&c, &p, 0).unwrap().into_iter().map(|x| x.place).collect();
        assert_eq!(s, vec![p.clone(), Place::Infinity]);

        let (_, m) = setup(3, "T + t + (T+1)*t^2");
        let s: Vec<Place> = s_set(&m, &p, 0).unwrap().into_iter().map(|x| x.place).collect();
        assert_eq!(s, vec![p.clone(), Place::parse(&fq, "T+1").unwrap(), Place::Infinity]);

        let (_, u) = setup(3, "T + T*t + 2*t^2");
        assert_eq!(s_set(&u, &p, 0).unwrap().len(), 2);
    }

    #[test]
    fn carlitz_bound_equals_residual() {
        for q in [3, 5] {
            let (fq, c) = setup(q, "T + t");
            let p = Place::parse(&fq, "T").unwrap();
            for s in [0, 2] {
                let r = lambda_bound(&c, &FieldParams::prime(q), &p, s, "given", &Config::default()).unwrap();
                assert_eq!(r.bound, s as u64);
                assert!(r.exact);
                assert_eq!(r.rows[0].method, Method::Eisenstein);
                r.validate().unwrap();
            }
        }
    }

    #[test]
    fn worked_example_and_forcing() {
        let (fq, m) = setup(3, "T + t + (T+1)*t^2");
        let p = Place::parse(&fq, "T").unwrap();
        let r = lambda_bound(&m, &FieldParams::prime(3), &p, 0, "given", &Config::default()).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.iter().all(|row| row.splitting_count == 1));
        let all_unknown = (0..3).fold(r.clone(), |acc, i| acc.with_forced_unknown(i));
        assert_eq!(all_unknown.bound, 3 * 2);
        assert!(!all_unknown.exact);
        for i in 0..3 {
            let f = r.with_forced_unknown(i);
            assert!(f.bound >= r.bound);
            f.validate().unwrap();
        }
        let seq = Config {
            execution: Execution::Sequential,
            ..Config::default()
        };
        assert_eq!(lambda_bound(&m, &FieldParams::prime(3), &p, 0, "given", &seq).unwrap(), r);
        assert!(lambda_bound(&m, &FieldParams::prime(3), &p, -1, "given", &seq).is_err());
    }

    #[test]
    fn json_round_trip_and_tamper_detection() {
        let (fq, c) = setup(3, "T + t");
        let p = Place::parse(&fq, "T").unwrap();
        let r = lambda_bound(&c, &FieldParams::prime(3), &p, 1, "given", &Config::default()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let mut bad = r.clone();
        bad.bound += 1;
        assert!(bad.validate().is_err());
    }
}
