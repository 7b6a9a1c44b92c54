//! Seeded generators for the max-autoregressive ±X sequence, the
//! 3-dependent `(Z_n, Z_{n+2}, Z_{n+1})` sequence and associated i.i.d.
//! samples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::margins::Margin;
use crate::models::ModelSpec;
use crate::rng::{self, Domain};
use crate::sample::SampleMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub model: ModelSpec,
    /// df of the underlying noise `Y_n` / `U_n`.
    #[serde(default)]
    pub margin: Margin,
    pub n: usize,
    pub seed: u64,
}

impl SeriesConfig {
    pub fn new(model: ModelSpec, n: usize, seed: u64) -> Self {
        SeriesConfig {
            model,
            margin: Margin::default(),
            n,
            seed,
        }
    }

    pub fn with_margin(mut self, margin: Margin) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.n == 0 {
            return Err(Error::invalid("series length must be >= 1"));
        }
        Ok(())
    }
}

/// Appends `n` rows of the stationary sequence described by `spec`.
pub(crate) fn fill_series<R: Rng + ?Sized>(
    spec: &ModelSpec,
    margin: Margin,
    n: usize,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    match *spec {
        ModelSpec::MaxAr { p, q } => {
            let y: Vec<f64> = (0..=n).map(|_| margin.sample(rng)).collect();
            for w in y.windows(2) {
                let x = w[0].max(w[1]);
                out.extend(std::iter::repeat(x).take(p));
                out.extend(std::iter::repeat(-x).take(q));
            }
        }
        ModelSpec::ThreeDependent => {
            let u: Vec<f64> = (0..n + 3).map(|_| margin.sample(rng)).collect();
            let z: Vec<f64> = (0..n + 2)
                .map(|i| if rng.random::<bool>() { u[i + 1] } else { u[i] })
                .collect();
            for i in 0..n {
                out.extend_from_slice(&[z[i], z[i + 2], z[i + 1]]);
            }
        }
        ModelSpec::IidProduct { d } => {
            out.extend((0..n * d).map(|_| margin.sample(rng)));
        }
    }
}

/// Appends `count` independent rows, each with the stationary df `Q`.
pub(crate) fn fill_iid<R: Rng + ?Sized>(
    spec: &ModelSpec,
    margin: Margin,
    count: usize,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    match *spec {
        ModelSpec::MaxAr { p, q } => {
            for _ in 0..count {
                let x = margin.sample(rng).max(margin.sample(rng));
                out.extend(std::iter::repeat(x).take(p));
                out.extend(std::iter::repeat(-x).take(q));
            }
        }
        ModelSpec::ThreeDependent => {
            for _ in 0..count {
                let u: [f64; 4] = std::array::from_fn(|_| margin.sample(rng));
                let z: [f64; 3] = std::array::from_fn(|i| if rng.random::<bool>() { u[i + 1] } else { u[i] });
                out.extend_from_slice(&[z[0], z[2], z[1]]);
            }
        }
        ModelSpec::IidProduct { .. } => fill_series(spec, margin, count, rng, out),
    }
}

/// The stationary vector series for `cfg.model`.
pub fn simulate_series(cfg: &SeriesConfig) -> Result<SampleMatrix> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, Domain::Series, 0);
    let mut data = Vec::with_capacity(cfg.n * cfg.model.dim());
    fill_series(&cfg.model, cfg.margin, cfg.n, &mut rng, &mut data);
    SampleMatrix::from_rows(cfg.model.dim(), data)
}

/// `X_1, …, X_n` with `X_i = max{Y_i, Y_{i+1}}` built from `n + 1` i.i.d. `Y`.
/// The marginal df of each `X_i` is `F²`. `cfg.model` is not consulted.
pub fn gen_max_ar_series(cfg: &SeriesConfig) -> Result<SampleMatrix> {
    gen_vector_series_ex31(1, 0, cfg)
}

/// Rows `(X_n, …, X_n, −X_n, …, −X_n)` with `p` copies of `X_n` and `q` of
/// `−X_n`. `q = 0` gives the plain univariate series. `cfg.model` is not consulted.
pub fn gen_vector_series_ex31(p: usize, q: usize, cfg: &SeriesConfig) -> Result<SampleMatrix> {
    if p == 0 && q == 0 {
        return Err(Error::invalid("need p + q >= 1"));
    }
    let cfg = SeriesConfig {
        model: ModelSpec::MaxAr {
            p: p.max(1),
            q: q.max(1),
        },
        ..cfg.clone()
    };
    cfg.validate()?;
    let full = simulate_series(&cfg)?;
    if p >= 1 && q >= 1 {
        return Ok(full);
    }
    // One of the blocks is empty: keep only the requested column.
    let keep = if p == 0 { 1 } else { 0 };
    SampleMatrix::from_rows(1, full.column(keep))
}

/// `(Z_n, Z_{n+2}, Z_{n+1})`, where `Z_n = U_n` if `J_n = 0` and `U_{n+1}`
/// otherwise, with fair i.i.d. coins `J`. `cfg.model` is not consulted.
pub fn gen_three_dependent_series(cfg: &SeriesConfig) -> Result<SampleMatrix> {
    simulate_series(&SeriesConfig {
        model: ModelSpec::ThreeDependent,
        ..cfg.clone()
    })
}

/// `count` i.i.d. vectors with the stationary df of `spec`, each built from
/// fresh noise. Uses `cfg.margin` and `cfg.seed`.
pub fn gen_iid_associated(spec: &ModelSpec, count: usize, cfg: &SeriesConfig) -> Result<SampleMatrix> {
    spec.validate()?;
    let mut rng = rng::stream(cfg.seed, Domain::IidSample, 0);
    let mut data = Vec::with_capacity(count * spec.dim());
    fill_iid(spec, cfg.margin, count, &mut rng, &mut data);
    SampleMatrix::from_rows(spec.dim(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(model: ModelSpec, n: usize, seed: u64) -> SeriesConfig {
        SeriesConfig::new(model, n, seed)
    }

    #[test]
    fn max_ar_structure() {
        let c = cfg(ModelSpec::MaxAr { p: 1, q: 1 }, 3, 11).with_margin(Margin::StandardUniform);
        let x = gen_max_ar_series(&c).unwrap();
        assert_eq!((x.nrows(), x.ncols()), (3, 1));
        // Recompute the Y draws from the same stream.
        let mut rng = rng::stream(11, Domain::Series, 0);
        let y: Vec<f64> = (0..4).map(|_| Margin::StandardUniform.sample(&mut rng)).collect();
        for i in 0..3 {
            assert_eq!(x.row(i)[0], y[i].max(y[i + 1]));
        }
        assert!(x.row(1)[0] >= y[1].min(y[2]));
    }

    #[test]
    fn ex31_negation_is_exact() {
        let m = gen_vector_series_ex31(1, 1, &cfg(ModelSpec::ThreeDependent, 10, 1)).unwrap();
        assert_eq!(m.column(1), m.column(0).iter().map(|v| -v).collect::<Vec<_>>());
        let m = gen_vector_series_ex31(2, 3, &cfg(ModelSpec::ThreeDependent, 10, 1)).unwrap();
        for row in m.rows() {
            assert!(row[..2].iter().all(|v| *v == row[0]));
            assert!(row[2..].iter().all(|v| *v == -row[0]));
        }
        let neg = gen_vector_series_ex31(0, 1, &cfg(ModelSpec::ThreeDependent, 10, 1)).unwrap();
        assert_eq!(neg.column(0), m.column(2));
    }

    #[test]
    fn three_dependent_overlap() {
        let m = gen_three_dependent_series(&cfg(ModelSpec::ThreeDependent, 500, 3)).unwrap();
        // X_{n,3} = Z_{n+1} = X_{n+1,1}
        for i in 0..m.nrows() - 1 {
            assert_eq!(m.row(i)[2], m.row(i + 1)[0]);
        }
        // X_{n,2} = Z_{n+2} = X_{n+1,3}
        for i in 0..m.nrows() - 1 {
            assert_eq!(m.row(i)[1], m.row(i + 1)[2]);
        }
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let c = cfg(ModelSpec::ThreeDependent, 200, 5);
        assert_eq!(simulate_series(&c).unwrap(), simulate_series(&c).unwrap());
        let other = cfg(ModelSpec::ThreeDependent, 200, 6);
        assert_ne!(simulate_series(&c).unwrap(), simulate_series(&other).unwrap());
    }

    #[test]
    fn iid_associated_shapes() {
        let c = cfg(ModelSpec::ThreeDependent, 1, 5);
        let empty = gen_iid_associated(&ModelSpec::MaxAr { p: 2, q: 1 }, 0, &c).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.ncols(), 3);
        let s = gen_iid_associated(&ModelSpec::IidProduct { d: 4 }, 10, &c).unwrap();
        assert_eq!((s.nrows(), s.ncols()), (10, 4));
    }

    #[test]
    fn config_validation() {
        assert!(simulate_series(&cfg(ModelSpec::ThreeDependent, 0, 1)).is_err());
        assert!(simulate_series(&cfg(ModelSpec::MaxAr { p: 0, q: 1 }, 5, 1)).is_err());
        assert!(gen_vector_series_ex31(0, 0, &cfg(ModelSpec::ThreeDependent, 5, 1)).is_err());
    }
}
