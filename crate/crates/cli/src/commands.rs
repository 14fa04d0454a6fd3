use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use drinfeld_core::base_field::{parse_poly, FieldParams, Place};
use drinfeld_core::config::Config;
use drinfeld_core::drinfeld::{GlobalModule, ModuleDoc, ReductionType, TorsionStructure};
use drinfeld_core::error::{Error, Result};
use drinfeld_core::field::{Field, Fq};
use drinfeld_core::iwasawa::{
    field_params, finiteness_predicates, is_distinguished, weierstrass_prep, ElementaryDoc, ElementaryModule,
    Finiteness, IwasawaSeries, ORing, ORingDoc, SeriesDoc,
};
use drinfeld_core::local::{h0_tensor_term, splitting_count, LocalDim, Method};
use drinfeld_core::selmer_bound::{lambda_bound, BoundReport};

use crate::pretty::{pairs, table};
use crate::{Command, Common};

pub struct Rendered {
    pub json: String,
    pub pretty: String,
}

fn render<T: Serialize>(value: &T, pretty: String) -> Result<Rendered> {
    let json = serde_json::to_string(value).map_err(|e| Error::Internal(e.to_string()))? + "\n";
    Ok(Rendered { json, pretty })
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn load<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::parse(arg, format!("cannot read file: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| {
        let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("");
        let token: String = line.chars().skip(e.column().saturating_sub(1)).take(24).collect();
        Error::parse(if token.is_empty() { format!("line {}", e.line()) } else { token }, e.to_string())
    })
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::parse(flag, "required unless --input is given"))
}

fn load_module(arg: &str) -> Result<(ModuleDoc, Fq, GlobalModule)> {
    let doc: ModuleDoc = load(arg)?;
    let (fq, phi) = doc.build()?;
    // canonical form, so that emitted documents read back identically
    let canon = ModuleDoc {
        note: doc.note.clone(),
        ..ModuleDoc::from_module(&doc.params, &phi)
    };
    Ok((canon, fq, phi))
}

fn mismatch(what: &str) -> Error {
    Error::invalid(format!("{what} document does not match a recomputation from its inputs"))
}

pub fn run(cmd: &Command, common: &Common) -> Result<Rendered> {
    let cfg = common.config();
    cfg.validate()?;
    match cmd {
        Command::Reduction { module, place } => {
            let out: ReductionOut = match &common.input {
                Some(path) => {
                    let doc: ReductionOut = load(path)?;
                    let (_, fq, phi) = load_module_doc(&doc.module)?;
                    if reduction(&doc.module, &fq, &phi, &doc.place)? != doc {
                        return Err(mismatch("reduction"));
                    }
                    doc
                }
                None => {
                    let (doc, fq, phi) = load_module(need(module, "--module")?)?;
                    reduction(&doc, &fq, &phi, need(place, "--place")?)?
                }
            };
            let p = out.pretty();
            render(&out, p)
        }
        Command::Torsion { module, place, a, e } => {
            let out: TorsionOut = match &common.input {
                Some(path) => {
                    let doc: TorsionOut = load(path)?;
                    let (_, fq, phi) = load_module_doc(&doc.module)?;
                    let again = torsion(&doc.module, &fq, &phi, &doc.place, &doc.a, doc.e, doc.seed, &cfg)?;
                    if again != doc {
                        return Err(mismatch("torsion"));
                    }
                    doc
                }
                None => {
                    let (doc, fq, phi) = load_module(need(module, "--module")?)?;
                    torsion(&doc, &fq, &phi, need(place, "--place")?, need(a, "--a")?, *e as usize, cfg.seed, &cfg)?
                }
            };
            let p = out.pretty();
            render(&out, p)
        }
        Command::LocalH0 { module, prime, place } => {
            let out: LocalH0Out = match &common.input {
                Some(path) => {
                    let doc: LocalH0Out = load(path)?;
                    doc.config.validate()?;
                    let (_, fq, phi) = load_module_doc(&doc.module)?;
                    if local_h0(&doc.module, &fq, &phi, &doc.prime, &doc.place, &doc.config)? != doc {
                        return Err(mismatch("local-h0"));
                    }
                    doc
                }
                None => {
                    let (doc, fq, phi) = load_module(need(module, "--module")?)?;
                    local_h0(&doc, &fq, &phi, need(prime, "--prime")?, need(place, "--place")?, &cfg)?
                }
            };
            let p = out.pretty();
            render(&out, p)
        }
        Command::Weierstrass { series } => {
            let out: WeierstrassOut = match &common.input {
                Some(path) => {
                    let doc: WeierstrassOut = load(path)?;
                    let f = doc.series.build(cfg.prec_pi)?;
                    if weierstrass(&f)? != doc {
                        return Err(mismatch("weierstrass"));
                    }
                    doc
                }
                None => weierstrass(&load_series(need(series, "--series")?, common, &cfg)?)?,
            };
            let p = out.pretty();
            render(&out, p)
        }
        Command::MuLambda { series, elementary } => {
            let out: MuLambdaOut = match &common.input {
                Some(path) => {
                    let doc: MuLambdaOut = load(path)?;
                    let again = match (&doc.series, &doc.elementary) {
                        (Some(s), None) => mu_lambda_series(&s.build(cfg.prec_pi)?)?,
                        (None, Some(m)) => {
                            let (ring, module) = m.build(cfg.prec_pi)?;
                            mu_lambda_elementary(&ring, &module)?
                        }
                        _ => return Err(Error::invalid("exactly one of `series` and `elementary` is expected")),
                    };
                    if again != doc {
                        return Err(mismatch("mu-lambda"));
                    }
                    doc
                }
                None => match (series, elementary) {
                    (Some(s), None) => mu_lambda_series(&load_series(s, common, &cfg)?)?,
                    (None, Some(m)) => {
                        let doc: ElementaryDoc = load(m)?;
                        let (ring, module) = doc.build(cfg.prec_pi)?;
                        mu_lambda_elementary(&ring, &module)?
                    }
                    _ => return Err(Error::parse("--series", "one of --series or --elementary is required")),
                },
            };
            let p = out.pretty();
            render(&out, p)
        }
        Command::LambdaBound {
            module,
            prime,
            residual_dim,
            residual_dim_provenance,
        } => {
            let report = match &common.input {
                Some(path) => {
                    let doc: BoundReport = load(path)?;
                    doc.validate()?;
                    doc
                }
                None => {
                    let (doc, fq, phi) = load_module(need(module, "--module")?)?;
                    let p = Place::parse(&fq, need(prime, "--prime")?)?;
                    let s = residual_dim.ok_or_else(|| Error::parse("--residual-dim", "required unless --input is given"))?;
                    let mut r = lambda_bound(&phi, &doc.params, &p, s, residual_dim_provenance, &cfg)?;
                    r.module.note = doc.note;
                    r
                }
            };
            let p = pretty_bound(&report);
            render(&report, p)
        }
    }
}

fn load_module_doc(doc: &ModuleDoc) -> Result<(ModuleDoc, Fq, GlobalModule)> {
    let (fq, phi) = doc.build()?;
    Ok((doc.clone(), fq, phi))
}

fn load_series(arg: &str, common: &Common, cfg: &Config) -> Result<IwasawaSeries> {
    let mut doc: SeriesDoc = load(arg)?;
    if let Some(d) = common.prec_t {
        doc.prec_t = Some(doc.prec_t.map_or(d as usize, |x| x.min(d as usize)));
        doc.coeffs_t.truncate(doc.prec_t.unwrap());
    }
    doc.build(cfg.prec_pi)
}

fn fmt_opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".into(), |v| v.to_string())
}

fn fmt_reduction(r: &ReductionType) -> String {
    match r {
        ReductionType::Good => "Good".into(),
        ReductionType::StableBad { reduced_rank } => format!("StableBad (reduced rank {reduced_rank})"),
        ReductionType::Undetermined => "Undetermined".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOut {
    #[serde(flatten)]
    pub reduction: ReductionType,
    pub place: String,
    /// Valuation of the normalizing twist.
    pub w: Option<i64>,
    pub tie: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<usize>,
    pub module: ModuleDoc,
}

impl ReductionOut {
    fn pretty(&self) -> String {
        pairs(&[
            ("place", self.place.clone()),
            ("reduction", fmt_reduction(&self.reduction)),
            ("w", fmt_opt(&self.w)),
            ("tie", self.tie.to_string()),
            ("height", fmt_opt(&self.height)),
        ])
    }
}

fn reduction(doc: &ModuleDoc, fq: &Fq, phi: &GlobalModule, place: &str) -> Result<ReductionOut> {
    let v = Place::parse(fq, place)?;
    let info = phi.reduction_info(&v)?;
    let height = match info.kind {
        ReductionType::Good => Some(phi.height_of_reduction(&v)?),
        _ => None,
    };
    Ok(ReductionOut {
        reduction: info.kind,
        place: v.label(fq),
        w: info.w,
        tie: info.tie,
        height,
        module: doc.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionOut {
    pub place: String,
    pub a: String,
    /// Degree of the extension of the residue field.
    pub e: usize,
    /// `F_q`-dimension of that extension.
    pub extension_dim: usize,
    /// Modulus of the extension over `F_q`, as a polynomial in `x`.
    pub extension_modulus: String,
    /// `F_q`-dimension of the kernel.
    pub dim: usize,
    /// `r · deg a`, the dimension of the full torsion.
    pub full_dim: usize,
    pub full: bool,
    pub structure: TorsionStructure,
    /// Kernel basis, elements written as polynomials in the extension generator `x`.
    pub basis: Vec<String>,
    pub seed: u64,
    pub module: ModuleDoc,
}

impl TorsionOut {
    fn pretty(&self) -> String {
        let mut s = pairs(&[
            ("place", self.place.clone()),
            ("a", self.a.clone()),
            ("e", self.e.to_string()),
            ("extension dim", self.extension_dim.to_string()),
            ("kernel dim", format!("{} of {}", self.dim, self.full_dim)),
            ("full", self.full.to_string()),
        ]);
        let rows: Vec<Vec<String>> = self
            .structure
            .primary
            .iter()
            .map(|p| {
                let ex: Vec<String> = p.exponents.iter().map(|e| e.to_string()).collect();
                vec![p.prime.clone(), ex.join(" ")]
            })
            .collect();
        s.push('\n');
        s += &table(&["prime", "exponents"], &rows);
        s
    }
}

#[allow(clippy::too_many_arguments)]
fn torsion(
    doc: &ModuleDoc,
    fq: &Fq,
    phi: &GlobalModule,
    place: &str,
    a: &str,
    e: usize,
    seed: u64,
    cfg: &Config,
) -> Result<TorsionOut> {
    let v = Place::parse(fq, place)?;
    if v.is_infinite() {
        return Err(Error::invalid("torsion of a reduction needs a finite place"));
    }
    if e == 0 {
        return Err(Error::invalid("extension degree must be at least 1"));
    }
    let a_poly = parse_poly(fq, a)?;
    let red = phi.reduce(&v)?;
    let kernel = red.torsion_kernel(&a_poly, e, seed, cfg.execution)?;
    let structure = red.torsion_module_structure(&a_poly, e, seed)?;
    let full_dim = red.rank() * a_poly.degree().unwrap_or(0);
    let ext = &kernel.extension;
    let ring = drinfeld_core::poly::PolyRing::new(fq.clone());
    Ok(TorsionOut {
        place: v.label(fq),
        a: drinfeld_core::base_field::format_poly(fq, &a_poly),
        e,
        extension_dim: v.degree() * e,
        extension_modulus: ring.format(ext.modulus(), "x"),
        dim: kernel.dim,
        full_dim,
        full: structure.is_full(fq, &a_poly, red.rank(), seed)?,
        structure,
        basis: kernel.basis.iter().map(|b| ext.format_elem(b)).collect(),
        seed,
        module: doc.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalH0Out {
    pub prime: String,
    pub place: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionType>,
    pub splitting_count: u64,
    pub local_dim: Option<usize>,
    pub method: Method,
    pub config: Config,
    pub module: ModuleDoc,
}

impl LocalH0Out {
    fn pretty(&self) -> String {
        pairs(&[
            ("prime", self.prime.clone()),
            ("place", self.place.clone()),
            ("reduction", self.reduction.as_ref().map_or("-".into(), fmt_reduction)),
            ("splitting count", self.splitting_count.to_string()),
            ("local dim", self.local_dim.map_or("unknown".into(), |d| d.to_string())),
            ("method", format!("{:?}", self.method)),
        ])
    }
}

fn local_h0(doc: &ModuleDoc, fq: &Fq, phi: &GlobalModule, prime: &str, place: &str, cfg: &Config) -> Result<LocalH0Out> {
    let p = Place::parse(fq, prime)?;
    let v = Place::parse(fq, place)?;
    let term = h0_tensor_term(phi, &p, &v, cfg)?;
    let reduction = if v.is_infinite() {
        None
    } else {
        Some(phi.reduction_type(&v)?)
    };
    Ok(LocalH0Out {
        prime: p.label(fq),
        place: v.label(fq),
        reduction,
        splitting_count: splitting_count(&v, fq.p()).count,
        local_dim: match term.value {
            LocalDim::Dim(d) => Some(d),
            LocalDim::Unknown => None,
        },
        method: term.method,
        config: cfg.clone(),
        module: doc.clone(),
    })
}

fn series_doc(f: &IwasawaSeries) -> SeriesDoc {
    SeriesDoc::from_series(f, &field_params(f.ring().fq()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassOut {
    pub mu: usize,
    pub lambda: usize,
    /// The distinguished polynomial.
    pub g: SeriesDoc,
    /// The unit.
    pub u: SeriesDoc,
    /// `ϖ^μ · u · g` equals the input modulo `ϖ^prec_pi` and, for a series, `T^prec_T`.
    pub prec_pi: usize,
    #[serde(rename = "prec_T", default, skip_serializing_if = "Option::is_none")]
    pub prec_t: Option<usize>,
    pub series: SeriesDoc,
}

impl WeierstrassOut {
    fn pretty(&self) -> String {
        pairs(&[
            ("mu", self.mu.to_string()),
            ("lambda", self.lambda.to_string()),
            ("g", format!("[{}]", self.g.coeffs_t.join(", "))),
            ("u", format!("[{}]", self.u.coeffs_t.join(", "))),
            ("prec_pi", self.prec_pi.to_string()),
            ("prec_T", fmt_opt(&self.prec_t)),
        ])
    }
}

fn weierstrass(f: &IwasawaSeries) -> Result<WeierstrassOut> {
    let w = weierstrass_prep(f)?;
    let back = w.reconstruct()?;
    if !back.congruent(f) || !is_distinguished(&w.g)? {
        return Err(Error::Internal("preparation failed its own check".into()));
    }
    Ok(WeierstrassOut {
        mu: w.mu,
        lambda: w.lambda,
        g: series_doc(&w.g),
        u: series_doc(&w.u),
        prec_pi: f.prec_pi(),
        prec_t: f.prec_t(),
        series: series_doc(f),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuLambdaOut {
    pub mu: usize,
    pub lambda: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finiteness: Option<Finiteness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elementary: Option<ElementaryDoc>,
}

impl MuLambdaOut {
    fn pretty(&self) -> String {
        let mut items = vec![("mu", self.mu.to_string()), ("lambda", self.lambda.to_string())];
        if let Some(f) = &self.finiteness {
            items.push(("torsion, mu = 0", f.cofg_cotorsion_mu0.to_string()));
            items.push(("dim N/piN", f.dim_mod_pi.map_or("infinite".into(), |d| d.to_string())));
            items.push(("lambda <= dim N/piN", f.lambda_bound_check.to_string()));
        }
        pairs(&items)
    }
}

fn mu_lambda_series(f: &IwasawaSeries) -> Result<MuLambdaOut> {
    let w = weierstrass_prep(f)?;
    Ok(MuLambdaOut {
        mu: w.mu,
        lambda: w.lambda,
        finiteness: None,
        series: Some(series_doc(f)),
        elementary: None,
    })
}

fn mu_lambda_elementary(ring: &ORing, m: &ElementaryModule) -> Result<MuLambdaOut> {
    let (mu, lambda) = if m.free_rank == 0 {
        m.mu_lambda()
    } else {
        return Err(Error::NotTorsion);
    };
    let params: FieldParams = field_params(ring.fq());
    let doc = ElementaryDoc {
        ring: ORingDoc::from_ring(ring, &params),
        free_rank: m.free_rank,
        mu_parts: m.mu_parts.clone(),
        poly_parts: m.poly_parts.iter().map(|f| f.format_coeffs()).collect(),
    };
    Ok(MuLambdaOut {
        mu,
        lambda,
        finiteness: Some(finiteness_predicates(m)),
        series: None,
        elementary: Some(doc),
    })
}

fn pretty_bound(r: &BoundReport) -> String {
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.place.clone(),
                row.degree.to_string(),
                row.splitting_count.to_string(),
                row.local_dim.map_or(format!("unknown (r = {})", r.rank), |d| d.to_string()),
                format!("{:?}", row.method),
                row.contribution.to_string(),
            ]
        })
        .collect();
    let mut s = table(
        &["place", "degree", "splitting", "local dim", "method", "contribution"],
        &rows,
    );
    s.push('\n');
    s += &pairs(&[
        ("prime", r.prime.clone()),
        ("rank", r.rank.to_string()),
        ("residual dim", format!("{} ({})", r.residual_dim, r.residual_dim_provenance)),
        ("bound", r.bound.to_string()),
        ("exact", r.exact.to_string()),
    ]);
    s
}
