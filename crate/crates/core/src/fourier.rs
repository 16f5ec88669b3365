//! Fourier-basis regression for `x mod p`.
//!
//! The regressors are `sin(2 pi j x / p)` and `cos(2 pi j x / p)` for
//! `j = 1..=J`, with `J = floor((p - 1) / 2)` for odd `p` and one more pair
//! for even `p`. Trig arguments are reduced as `r = (j * x) mod p` in exact
//! integer arithmetic before evaluating `sin(2 pi r / p)`; this is the
//! periodicity identity of the basis and never touches labels, but without it
//! phases near `2^32` lose most of their significant bits.
//!
//! Labels are `round(raw) mod p`. The rounding tolerance (default `1e-5`) only
//! decides whether a prediction is reported as confident.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::dataset::{LabeledDataset, Modulus};
use crate::error::{Error, Result};
use crate::ols::{self, DesignMatrix, OlsFit};

pub const DEFAULT_ROUND_TOLERANCE: f64 = 1e-5;

/// Which trig terms each frequency contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    SineCosine,
    SineOnly,
}

impl Terms {
    fn name(self) -> &'static str {
        match self {
            Terms::SineCosine => "sine_cosine",
            Terms::SineOnly => "sine_only",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierBasisSpec {
    p: Modulus,
    frequencies: Vec<u64>,
    terms: Terms,
}

/// Standard basis: `J` pairs per the odd/even rule.
pub fn basis_spec(p: Modulus) -> FourierBasisSpec {
    let half = (p.get() - 1) / 2;
    let pairs = if p.get().is_multiple_of(2) {
        half + 1
    } else {
        half
    };
    FourierBasisSpec {
        p,
        frequencies: (1..=pairs).collect(),
        terms: Terms::SineCosine,
    }
}

impl FourierBasisSpec {
    /// Over-complete basis with frequencies `1..=p-1`.
    pub fn extended(p: Modulus) -> Self {
        Self {
            p,
            frequencies: (1..p.get()).collect(),
            terms: Terms::SineCosine,
        }
    }

    /// Same frequencies with the cosine columns removed.
    pub fn sine_only(mut self) -> Self {
        self.terms = Terms::SineOnly;
        self
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequencies
    }

    pub fn terms(&self) -> Terms {
        self.terms
    }

    pub fn pair_count(&self) -> usize {
        self.frequencies.len()
    }

    pub fn dimension(&self) -> usize {
        match self.terms {
            Terms::SineCosine => 2 * self.pair_count(),
            Terms::SineOnly => self.pair_count(),
        }
    }

    /// `2 pi ((j x) mod p) / p`.
    fn reduced_phase(&self, x: u64, j: u64) -> f64 {
        let p = self.p.get();
        let r = ((j as u128 * x as u128) % p as u128) as u64;
        2.0 * PI * r as f64 / p as f64
    }
}

/// Feature row `[sin_1, cos_1, ..., sin_J, cos_J]` (sines only for
/// [`Terms::SineOnly`]).
pub fn basis_features(x: u64, spec: &FourierBasisSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.dimension());
    for &j in &spec.frequencies {
        let phase = spec.reduced_phase(x, j);
        out.push(phase.sin());
        if spec.terms == Terms::SineCosine {
            out.push(phase.cos());
        }
    }
    out
}

/// Summary of the OLS fit behind a model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    pub r_squared: f64,
    pub residual_norm: f64,
    pub condition_estimate: f64,
    pub rank: usize,
    pub rank_warning: bool,
}

impl From<&OlsFit> for FitDiagnostics {
    fn from(f: &OlsFit) -> Self {
        Self {
            r_squared: f.r_squared,
            residual_norm: f.residual_norm,
            condition_estimate: f.condition_estimate,
            rank: f.rank,
            rank_warning: f.rank_warning,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifiedPrediction {
    pub raw_value: f64,
    pub label: u64,
    pub confident: bool,
}

/// `gamma + sum_j alpha_j sin(2 pi j x / p) + beta_j cos(2 pi j x / p)`.
///
/// For sine-only bases every `beta_j` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierModel {
    pub basis: FourierBasisSpec,
    pub intercept: f64,
    pub sine_coeffs: Vec<f64>,
    pub cosine_coeffs: Vec<f64>,
    pub diagnostics: Option<FitDiagnostics>,
    pub round_tolerance: f64,
}

impl FourierModel {
    pub fn modulus(&self) -> Modulus {
        self.basis.p
    }

    /// Model value at an integer.
    pub fn raw(&self, x: u64) -> f64 {
        let mut v = self.intercept;
        for (idx, &j) in self.basis.frequencies.iter().enumerate() {
            let phase = self.basis.reduced_phase(x, j);
            v += self.sine_coeffs[idx] * phase.sin() + self.cosine_coeffs[idx] * phase.cos();
        }
        v
    }

    /// Model value at a real point, for plotting the continuous curve.
    pub fn raw_at(&self, x: f64) -> f64 {
        let p = self.basis.p.get() as f64;
        let shifted = x.rem_euclid(p);
        let mut v = self.intercept;
        for (idx, &j) in self.basis.frequencies.iter().enumerate() {
            let phase = 2.0 * PI * j as f64 * shifted / p;
            v += self.sine_coeffs[idx] * phase.sin() + self.cosine_coeffs[idx] * phase.cos();
        }
        v
    }

    pub fn classify(&self, raw_value: f64) -> ClassifiedPrediction {
        let p = self.basis.p.get();
        let nearest = raw_value.round();
        let label = if nearest.is_finite() {
            (nearest as i128).rem_euclid(p as i128) as u64
        } else {
            0
        };
        let confident = (raw_value - nearest).abs() <= self.round_tolerance
            && nearest >= 0.0
            && nearest <= (p - 1) as f64;
        ClassifiedPrediction {
            raw_value,
            label,
            confident,
        }
    }

    pub fn predict_residue(&self, x: u64) -> ClassifiedPrediction {
        self.classify(self.raw(x))
    }

    /// Fraction of samples whose predicted label equals the true residue.
    pub fn evaluate_accuracy(&self, test: &LabeledDataset) -> Result<f64> {
        if test.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch {
                model: self.modulus().get(),
                data: test.modulus().get(),
            });
        }
        if test.is_empty() {
            return Err(Error::Config("test set is empty".into()));
        }
        let correct = test
            .samples()
            .iter()
            .filter(|s| self.predict_residue(s.x).label == s.y)
            .count();
        Ok(correct as f64 / test.len() as f64)
    }

    /// Plain-text `key=value` form; parsed back by [`FourierModel::from_text`].
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|c| fmt_real(*c)).collect::<Vec<_>>().join(",");
        let freqs: Vec<String> = self.basis.frequencies.iter().map(u64::to_string).collect();
        let mut s = String::new();
        let _ = writeln!(s, "p={}", self.basis.p);
        let _ = writeln!(s, "J={}", self.basis.pair_count());
        let _ = writeln!(s, "frequencies={}", freqs.join(","));
        let _ = writeln!(s, "terms={}", self.basis.terms.name());
        let _ = writeln!(s, "gamma={}", fmt_real(self.intercept));
        let _ = writeln!(s, "alpha={}", join(&self.sine_coeffs));
        let _ = writeln!(s, "beta={}", join(&self.cosine_coeffs));
        let _ = writeln!(s, "tolerance={}", fmt_real(self.round_tolerance));
        if let Some(d) = &self.diagnostics {
            let _ = writeln!(s, "r_squared={}", fmt_real(d.r_squared));
            let _ = writeln!(s, "residual_norm={}", fmt_real(d.residual_norm));
            let _ = writeln!(s, "condition_estimate={}", fmt_real(d.condition_estimate));
            let _ = writeln!(s, "rank={}", d.rank);
            let _ = writeln!(s, "rank_warning={}", d.rank_warning);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let kv = crate::harness::parse_key_values(text)?;
        let get = |k: &str| {
            kv.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Parse(format!("missing key `{k}`")))
        };
        let real = |k: &str| -> Result<f64> {
            let v = get(k)?;
            v.parse()
                .map_err(|_| Error::Parse(format!("`{k}`: bad number `{v}`")))
        };
        let reals = |k: &str| -> Result<Vec<f64>> {
            let v = get(k)?;
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(',')
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("`{k}`: bad number `{t}`")))
                })
                .collect()
        };
        let p = Modulus::new(
            get("p")?
                .parse()
                .map_err(|_| Error::Parse("`p` is not an integer".into()))?,
        )?;
        let frequencies: Vec<u64> = get("frequencies")?
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad frequency `{t}`")))
            })
            .collect::<Result<_>>()?;
        let terms = match get("terms")? {
            "sine_cosine" => Terms::SineCosine,
            "sine_only" => Terms::SineOnly,
            other => return Err(Error::Parse(format!("unknown terms `{other}`"))),
        };
        let basis = FourierBasisSpec {
            p,
            frequencies,
            terms,
        };
        let j: usize = get("J")?
            .parse()
            .map_err(|_| Error::Parse("`J` is not an integer".into()))?;
        let sine_coeffs = reals("alpha")?;
        let cosine_coeffs = reals("beta")?;
        if j != basis.pair_count() || sine_coeffs.len() != j || cosine_coeffs.len() != j {
            return Err(Error::Parse("coefficient counts do not match J".into()));
        }
        let diagnostics = if kv.contains_key("r_squared") {
            Some(FitDiagnostics {
                r_squared: real("r_squared")?,
                residual_norm: real("residual_norm")?,
                condition_estimate: real("condition_estimate")?,
                rank: get("rank")?
                    .parse()
                    .map_err(|_| Error::Parse("`rank` is not an integer".into()))?,
                rank_warning: get("rank_warning")?
                    .parse()
                    .map_err(|_| Error::Parse("`rank_warning` is not a bool".into()))?,
            })
        } else {
            None
        };
        Ok(Self {
            basis,
            intercept: real("gamma")?,
            sine_coeffs,
            cosine_coeffs,
            diagnostics,
            round_tolerance: real("tolerance")?,
        })
    }
}

/// 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Design matrix (with intercept) of `basis_features` over the samples.
pub fn design_matrix(d: &LabeledDataset, spec: &FourierBasisSpec) -> Result<DesignMatrix> {
    let values: Vec<f64> = d.xs().flat_map(|x| basis_features(x, spec)).collect();
    DesignMatrix::new(d.len(), spec.dimension(), values, true)
}

/// Fits the standard basis by OLS.
pub fn fit_fourier(train: &LabeledDataset, round_tolerance: f64) -> Result<FourierModel> {
    fit_fourier_with(train, basis_spec(train.modulus()), round_tolerance)
}

/// Fits an arbitrary basis (extended or sine-only variants) by OLS.
pub fn fit_fourier_with(
    train: &LabeledDataset,
    spec: FourierBasisSpec,
    round_tolerance: f64,
) -> Result<FourierModel> {
    if spec.p != train.modulus() {
        return Err(Error::ModulusMismatch {
            model: spec.p.get(),
            data: train.modulus().get(),
        });
    }
    if !(round_tolerance > 0.0 && round_tolerance.is_finite()) {
        return Err(Error::Config(format!(
            "round tolerance must be positive, got {round_tolerance}"
        )));
    }
    let seen: BTreeSet<u64> = train.labels().collect();
    if let Some(missing) = (0..spec.p.get()).find(|c| !seen.contains(c)) {
        return Err(Error::UnderdeterminedLabels {
            missing,
            modulus: spec.p.get(),
        });
    }

    let design = design_matrix(train, &spec)?;
    let y: Vec<f64> = train.labels().map(|v| v as f64).collect();
    let fit = ols::fit(&design, &y)?;

    let pairs = spec.pair_count();
    let (sine_coeffs, cosine_coeffs) = match spec.terms {
        Terms::SineCosine => (
            fit.coefficients.iter().step_by(2).copied().collect(),
            fit.coefficients
                .iter()
                .skip(1)
                .step_by(2)
                .copied()
                .collect(),
        ),
        Terms::SineOnly => (fit.coefficients.clone(), vec![0.0; pairs]),
    };
    Ok(FourierModel {
        basis: spec,
        intercept: fit.intercept.unwrap_or(0.0),
        sine_coeffs,
        cosine_coeffs,
        diagnostics: Some(FitDiagnostics::from(&fit)),
        round_tolerance,
    })
}

/// Exact trigonometric interpolant of the residue sequence `0, 1, ..., p-1`
/// on the standard basis, computed as a discrete Fourier decomposition over
/// one period.
pub fn closed_form_coefficients(p: Modulus) -> FourierModel {
    let spec = basis_spec(p);
    let n = p.get();
    let nf = n as f64;
    let intercept = (n - 1) as f64 / 2.0;
    let mut sine_coeffs = Vec::with_capacity(spec.pair_count());
    let mut cosine_coeffs = Vec::with_capacity(spec.pair_count());
    for &j in &spec.frequencies {
        let (mut s, mut c) = (0.0, 0.0);
        for r in 0..n {
            let phase = spec.reduced_phase(r, j);
            s += r as f64 * phase.sin();
            c += r as f64 * phase.cos();
        }
        if 2 * j == n {
            // Nyquist term: the sine column vanishes at integers.
            sine_coeffs.push(0.0);
            cosine_coeffs.push(c / nf);
        } else {
            sine_coeffs.push(2.0 * s / nf);
            cosine_coeffs.push(2.0 * c / nf);
        }
    }
    FourierModel {
        basis: spec,
        intercept,
        sine_coeffs,
        cosine_coeffs,
        diagnostics: None,
        round_tolerance: DEFAULT_ROUND_TOLERANCE,
    }
}

/// Piecewise-linear interpolation of `x mod p`: the identity on `[0, p-1]`
/// and the line back down to 0 on `(p-1, p)`, repeated with period `p`.
pub fn sawtooth_interp(x: f64, p: Modulus) -> f64 {
    let pf = p.get() as f64;
    let t = x.rem_euclid(pf);
    if t <= pf - 1.0 {
        t
    } else {
        (1.0 - pf) * t + (pf - 1.0) * pf
    }
}
