//! Integer-to-vector feature encoders.
//!
//! All encodings are left-zero-padded to a fixed width fixed by the largest
//! input, `2^32`: 33 binary digits, 21 base-3 digits and 10 decimal digits.
//! Digits are ordered most-significant first. N-gram encodings take the
//! overlapping windows of the padded 10-digit string and flatten them in
//! window order. Combined encodings concatenate one-gram, two-gram and
//! three-gram blocks in that order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::{LabeledDataset, Modulus, MAX_INPUT};
use crate::error::{Error, Result};

pub const BINARY_DIGITS: usize = 33;
pub const BASE3_DIGITS: usize = 21;
pub const DECIMAL_DIGITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncoderKind {
    Raw,
    Binary,
    Base3,
    OneGram,
    TwoGram,
    ThreeGram,
    OneTwoGram,
    OneTwoThreeGram,
    OneGramSum,
    OneGramSumMod3,
}

impl EncoderKind {
    pub const ALL: [EncoderKind; 10] = [
        EncoderKind::Raw,
        EncoderKind::Binary,
        EncoderKind::Base3,
        EncoderKind::OneGram,
        EncoderKind::TwoGram,
        EncoderKind::ThreeGram,
        EncoderKind::OneTwoGram,
        EncoderKind::OneTwoThreeGram,
        EncoderKind::OneGramSum,
        EncoderKind::OneGramSumMod3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EncoderKind::Raw => "raw",
            EncoderKind::Binary => "binary",
            EncoderKind::Base3 => "base3",
            EncoderKind::OneGram => "one_gram",
            EncoderKind::TwoGram => "two_gram",
            EncoderKind::ThreeGram => "three_gram",
            EncoderKind::OneTwoGram => "one_two_gram",
            EncoderKind::OneTwoThreeGram => "one_two_three_gram",
            EncoderKind::OneGramSum => "one_gram_sum",
            EncoderKind::OneGramSumMod3 => "one_gram_sum_mod3",
        }
    }

    pub fn width(self) -> usize {
        match self {
            EncoderKind::Raw => 1,
            EncoderKind::Binary => BINARY_DIGITS,
            EncoderKind::Base3 => BASE3_DIGITS,
            EncoderKind::OneGram => DECIMAL_DIGITS,
            EncoderKind::TwoGram => 2 * (DECIMAL_DIGITS - 1),
            EncoderKind::ThreeGram => 3 * (DECIMAL_DIGITS - 2),
            EncoderKind::OneTwoGram => EncoderKind::OneGram.width() + EncoderKind::TwoGram.width(),
            EncoderKind::OneTwoThreeGram => {
                EncoderKind::OneTwoGram.width() + EncoderKind::ThreeGram.width()
            }
            EncoderKind::OneGramSum | EncoderKind::OneGramSumMod3 => DECIMAL_DIGITS + 1,
        }
    }

    /// Raw, binary, base-3 and one-gram encodings can be inverted.
    pub fn is_positional(self) -> bool {
        matches!(
            self,
            EncoderKind::Raw | EncoderKind::Binary | EncoderKind::Base3 | EncoderKind::OneGram
        )
    }

    /// Largest value each column can take over the input domain.
    ///
    /// Dividing by these maps every feature into `[0, 1]`.
    pub fn column_maxima(self) -> Vec<f64> {
        let digits = |n: usize| vec![9.0; n];
        match self {
            EncoderKind::Raw => vec![MAX_INPUT as f64],
            EncoderKind::Binary => vec![1.0; BINARY_DIGITS],
            EncoderKind::Base3 => vec![2.0; BASE3_DIGITS],
            EncoderKind::OneGram
            | EncoderKind::TwoGram
            | EncoderKind::ThreeGram
            | EncoderKind::OneTwoGram
            | EncoderKind::OneTwoThreeGram => digits(self.width()),
            EncoderKind::OneGramSum => {
                let mut v = digits(DECIMAL_DIGITS);
                v.push(9.0 * DECIMAL_DIGITS as f64);
                v
            }
            EncoderKind::OneGramSumMod3 => {
                let mut v = digits(DECIMAL_DIGITS);
                v.push(2.0);
                v
            }
        }
    }
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EncoderKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = EncoderKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown encoder `{s}`; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

fn digits_msb_first(mut x: u64, base: u64, width: usize) -> Vec<u8> {
    let mut out = vec![0u8; width];
    for slot in out.iter_mut().rev() {
        *slot = (x % base) as u8;
        x /= base;
    }
    debug_assert_eq!(x, 0, "width too small for value");
    out
}

fn push_grams(out: &mut Vec<f64>, digits: &[u8], n: usize) {
    for window in digits.windows(n) {
        out.extend(window.iter().map(|&d| d as f64));
    }
}

/// Encodes one integer. Fails if `x > 2^32`.
pub fn encode(x: u64, kind: EncoderKind) -> Result<Vec<f64>> {
    if x > MAX_INPUT {
        return Err(Error::Domain(x));
    }
    let mut out = Vec::with_capacity(kind.width());
    match kind {
        EncoderKind::Raw => out.push(x as f64),
        EncoderKind::Binary => out.extend(
            digits_msb_first(x, 2, BINARY_DIGITS)
                .iter()
                .map(|&d| d as f64),
        ),
        EncoderKind::Base3 => out.extend(
            digits_msb_first(x, 3, BASE3_DIGITS)
                .iter()
                .map(|&d| d as f64),
        ),
        _ => {
            let dec = digits_msb_first(x, 10, DECIMAL_DIGITS);
            let use_one = !matches!(kind, EncoderKind::TwoGram | EncoderKind::ThreeGram);
            let use_two = matches!(
                kind,
                EncoderKind::TwoGram | EncoderKind::OneTwoGram | EncoderKind::OneTwoThreeGram
            );
            let use_three = matches!(kind, EncoderKind::ThreeGram | EncoderKind::OneTwoThreeGram);
            if use_one {
                push_grams(&mut out, &dec, 1);
            }
            if use_two {
                push_grams(&mut out, &dec, 2);
            }
            if use_three {
                push_grams(&mut out, &dec, 3);
            }
            let digit_sum: u64 = dec.iter().map(|&d| d as u64).sum();
            match kind {
                EncoderKind::OneGramSum => out.push(digit_sum as f64),
                EncoderKind::OneGramSumMod3 => out.push((digit_sum % 3) as f64),
                _ => {}
            }
        }
    }
    debug_assert_eq!(out.len(), kind.width());
    Ok(out)
}

/// Inverts a positional encoding.
pub fn decode(v: &[f64], kind: EncoderKind) -> Result<u64> {
    if !kind.is_positional() {
        return Err(Error::UnsupportedDecode(kind.name()));
    }
    if v.len() != kind.width() {
        return Err(Error::Dimension {
            expected: kind.width(),
            actual: v.len(),
            context: "decode input",
        });
    }
    let base: u64 = match kind {
        EncoderKind::Raw => MAX_INPUT + 1,
        EncoderKind::Binary => 2,
        EncoderKind::Base3 => 3,
        _ => 10,
    };
    let mut x: u64 = 0;
    for (i, &d) in v.iter().enumerate() {
        if !(d.is_finite() && d >= 0.0 && d.fract() == 0.0 && d < base as f64) {
            return Err(Error::Malformed(format!(
                "entry {i} = {d} is not a base-{base} digit"
            )));
        }
        x = x
            .checked_mul(base)
            .and_then(|x| x.checked_add(d as u64))
            .ok_or_else(|| Error::Malformed("value overflows".into()))?;
    }
    if x > MAX_INPUT {
        return Err(Error::Malformed(format!("decoded value {x} exceeds 2^32")));
    }
    Ok(x)
}

/// Identity of the dataset a feature matrix was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetRef {
    pub seed: u64,
    pub len: usize,
    pub modulus: Modulus,
}

/// Row-major encoded features with the labels of their source dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    kind: EncoderKind,
    rows: usize,
    values: Vec<f64>,
    labels: Vec<u64>,
    source: DatasetRef,
}

impl FeatureMatrix {
    pub fn kind(&self) -> EncoderKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.kind.width()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.cols();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn source(&self) -> DatasetRef {
        self.source
    }

    /// Copy with every column divided by its maximum attainable value.
    pub fn normalized(&self) -> Vec<f64> {
        let maxima = self.kind.column_maxima();
        self.values
            .chunks_exact(self.cols())
            .flat_map(|row| row.iter().zip(&maxima).map(|(v, m)| v / m))
            .collect()
    }

    /// CSV with header `f0,...,f{w-1},y`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.cols()).map(|i| format!("f{i}")).collect();
        writeln!(out, "{},y", header.join(","))?;
        for (i, y) in self.labels.iter().enumerate() {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{},{}", row.join(","), y)?;
        }
        Ok(())
    }
}

/// Encodes every sample; row `i` is `encode(x_i)`.
pub fn encode_dataset(d: &LabeledDataset, kind: EncoderKind) -> Result<FeatureMatrix> {
    let rows: Vec<Vec<f64>> = d
        .samples()
        .par_iter()
        .enumerate()
        .map(|(row, s)| {
            encode(s.x, kind).map_err(|e| Error::Row {
                row,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(FeatureMatrix {
        kind,
        rows: rows.len(),
        values: rows.concat(),
        labels: d.labels().collect(),
        source: DatasetRef {
            seed: d.seed(),
            len: d.len(),
            modulus: d.modulus(),
        },
    })
}
