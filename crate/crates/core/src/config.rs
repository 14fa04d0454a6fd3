use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Tunables shared by the pipelines. Every randomized step derives its
/// generator from `seed`, so equal configs give equal outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub seed: u64,
    /// Relative precision of local expansions, in uniformizer digits.
    pub local_n: usize,
    /// Largest `n` tried when detecting the corank of `φ[p^n]` fixed points.
    pub max_n: u32,
    /// Largest tower layer `m` (extension degree `p^m`) tried for stabilization.
    pub max_m: u32,
    /// Largest `F_q`-dimension of an extension built for linear algebra.
    pub max_dim: usize,
    /// `ϖ`-adic precision of Iwasawa coefficients.
    pub prec_pi: usize,
    /// `T`-adic precision of Iwasawa series.
    pub prec_t: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            local_n: 64,
            max_n: 4,
            max_m: 3,
            max_dim: 256,
            prec_pi: 32,
            prec_t: 64,
            execution: Execution::default(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("local_n", self.local_n),
            ("max_n", self.max_n as usize),
            ("max_dim", self.max_dim),
            ("prec_pi", self.prec_pi),
            ("prec_T", self.prec_t),
        ];
        for (name, v) in checks {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}
