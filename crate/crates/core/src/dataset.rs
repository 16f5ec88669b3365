//! Integer datasets labelled by their residue modulo `p`.
//!
//! Samples are drawn uniformly with replacement from `[0, 2^32]` (both ends
//! inclusive) using [`SplitMix64`] seeded with the dataset seed: each sample
//! is `rng.below(2^32 + 1)`.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Largest sampled integer, `2^32`.
pub const MAX_INPUT: u64 = 1 << 32;

/// A modulus `p >= 2`. Primality is not required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidModulus(p));
        }
        Ok(Self(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Ground-truth label: `x mod p` by exact integer arithmetic.
pub fn residue_oracle(x: u64, p: Modulus) -> u64 {
    x % p.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub x: u64,
    pub y: u64,
}

/// Split bookkeeping. A freshly generated dataset is `(count, 0)`; the two
/// halves produced by [`LabeledDataset::split`] are `(n, 0)` and `(0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitInfo {
    pub train_count: usize,
    pub test_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    modulus: Modulus,
    samples: Vec<Sample>,
    seed: u64,
    split: SplitInfo,
}

impl LabeledDataset {
    /// Draw `count` integers uniformly from `[0, 2^32]` and label them.
    pub fn generate(seed: u64, count: usize, p: Modulus) -> Result<Self> {
        if count == 0 {
            return Err(Error::Config("dataset count must be at least 1".into()));
        }
        let mut rng = SplitMix64::new(seed);
        let samples = (0..count)
            .map(|_| {
                let x = rng.below(MAX_INPUT + 1);
                Sample {
                    x,
                    y: residue_oracle(x, p),
                }
            })
            .collect();
        Ok(Self {
            modulus: p,
            samples,
            seed,
            split: SplitInfo {
                train_count: count,
                test_count: 0,
            },
        })
    }

    /// Build a dataset from explicit integers; labels come from the oracle.
    pub fn from_values(values: &[u64], p: Modulus, seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config(
                "dataset must contain at least one sample".into(),
            ));
        }
        if let Some(&x) = values.iter().find(|&&x| x > MAX_INPUT) {
            return Err(Error::Domain(x));
        }
        let samples = values
            .iter()
            .map(|&x| Sample {
                x,
                y: residue_oracle(x, p),
            })
            .collect();
        Ok(Self {
            modulus: p,
            samples,
            seed,
            split: SplitInfo {
                train_count: values.len(),
                test_count: 0,
            },
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn split_info(&self) -> SplitInfo {
        self.split
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = u64> + '_ {
        self.samples.iter().map(|s| s.x)
    }

    pub fn labels(&self) -> impl Iterator<Item = u64> + '_ {
        self.samples.iter().map(|s| s.y)
    }

    /// Prefix/suffix split: the first `floor(fraction * n)` samples train.
    pub fn split(&self, train_fraction: f64) -> Result<(LabeledDataset, LabeledDataset)> {
        let n_train = split_point(self.len(), train_fraction)?;
        let (head, tail) = self.samples.split_at(n_train);
        let part = |samples: &[Sample], split| LabeledDataset {
            modulus: self.modulus,
            samples: samples.to_vec(),
            seed: self.seed,
            split,
        };
        Ok((
            part(
                head,
                SplitInfo {
                    train_count: head.len(),
                    test_count: 0,
                },
            ),
            part(
                tail,
                SplitInfo {
                    train_count: 0,
                    test_count: tail.len(),
                },
            ),
        ))
    }

    /// Writes `x,y` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y")?;
        for s in &self.samples {
            writeln!(out, "{},{}", s.x, s.y)?;
        }
        Ok(())
    }

    /// Key=value sidecar describing how the CSV was produced.
    pub fn meta_string(&self, split: SplitInfo) -> String {
        format!(
            "seed={}\ncount={}\np={}\nsplit={}/{}\n",
            self.seed,
            self.len(),
            self.modulus,
            split.train_count,
            split.test_count
        )
    }

    /// Parses the `x,y` CSV format. Labels are checked against the oracle.
    pub fn read_csv(text: &str, p: Modulus, seed: u64) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,y" => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `x,y`, found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut values = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let (xs, ys) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `x,y`", i + 2)))?;
            let x: u64 = xs
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
            let y: u64 = ys
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
            if y != residue_oracle(x, p) {
                return Err(Error::Parse(format!(
                    "line {}: label {y} is not {x} mod {p}",
                    i + 2
                )));
            }
            values.push(x);
        }
        Self::from_values(&values, p, seed)
    }
}

/// Number of training samples for a prefix split of `total` items.
pub fn split_point(total: usize, train_fraction: f64) -> Result<usize> {
    let invalid = Error::InvalidSplit {
        fraction: train_fraction,
        total,
    };
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(invalid);
    }
    let n_train = (train_fraction * total as f64).floor() as usize;
    if n_train == 0 || n_train >= total {
        return Err(invalid);
    }
    Ok(n_train)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> Modulus {
        Modulus::new(p).unwrap()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(residue_oracle(0, m(7)), 0);
        assert_eq!(residue_oracle(123, m(3)), 0);
        assert_eq!(residue_oracle(59, m(3)), 2);
        assert_eq!(residue_oracle(MAX_INPUT, m(7)), 4);
    }

    #[test]
    fn modulus_rejects_small() {
        assert_eq!(Modulus::new(1), Err(Error::InvalidModulus(1)));
        assert_eq!(Modulus::new(0), Err(Error::InvalidModulus(0)));
        assert!(Modulus::new(4).is_ok());
    }

    #[test]
    fn generate_labels_and_range() {
        let d = LabeledDataset::generate(1, 30_000, m(3)).unwrap();
        assert_eq!(d.len(), 30_000);
        for s in d.samples() {
            assert!(s.x <= MAX_INPUT);
            assert!(s.y < 3);
            assert_eq!(s.y, s.x % 3);
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let a = LabeledDataset::generate(1, 5, m(2)).unwrap();
        let b = LabeledDataset::generate(1, 5, m(2)).unwrap();
        assert_eq!(a, b);
        let c = LabeledDataset::generate(2, 5, m(2)).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn generate_rejects_empty() {
        assert!(LabeledDataset::generate(1, 0, m(2)).is_err());
    }

    #[test]
    fn label_histogram_is_balanced() {
        // Binomial(n, 1/7): sd = sqrt(n * 1/7 * 6/7).
        let n = 10_000usize;
        let d = LabeledDataset::generate(2, n, m(7)).unwrap();
        let mut hist = [0usize; 7];
        for y in d.labels() {
            hist[y as usize] += 1;
        }
        let mean = n as f64 / 7.0;
        let sd = (n as f64 * (1.0 / 7.0) * (6.0 / 7.0)).sqrt();
        for h in hist {
            assert!((h as f64 - mean).abs() <= 5.0 * sd, "{hist:?}");
        }
    }

    #[test]
    fn split_examples() {
        let d = LabeledDataset::generate(1, 30_000, m(3)).unwrap();
        let (tr, te) = d.split(25_000.0 / 30_000.0).unwrap();
        assert_eq!((tr.len(), te.len()), (25_000, 5_000));

        let d = LabeledDataset::generate(4, 10, m(3)).unwrap();
        let (tr, te) = d.split(0.5).unwrap();
        assert_eq!(tr.samples(), &d.samples()[..5]);
        assert_eq!(te.samples(), &d.samples()[5..]);
        assert_eq!(tr.split_info().train_count, 5);
        assert_eq!(te.split_info().test_count, 5);

        let d = LabeledDataset::generate(1, 50_000, m(2)).unwrap();
        let (tr, te) = d.split(0.9).unwrap();
        assert_eq!((tr.len(), te.len()), (45_000, 5_000));
    }

    #[test]
    fn split_rejects_empty_side() {
        let d = LabeledDataset::generate(1, 10, m(3)).unwrap();
        for f in [0.0, 1.0, 0.05, -0.2, 1.5, f64::NAN] {
            assert!(matches!(d.split(f), Err(Error::InvalidSplit { .. })), "{f}");
        }
    }

    #[test]
    fn csv_round_trip_and_meta() {
        let d = LabeledDataset::generate(11, 20, m(5)).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y\n"));
        assert!(!text.contains('\r'));
        let back = LabeledDataset::read_csv(&text, m(5), 11).unwrap();
        assert_eq!(back.samples(), d.samples());

        let meta = d.meta_string(SplitInfo {
            train_count: 15,
            test_count: 5,
        });
        assert_eq!(meta, "seed=11\ncount=20\np=5\nsplit=15/5\n");
    }

    #[test]
    fn read_csv_rejects_wrong_label() {
        let err = LabeledDataset::read_csv("x,y\n5,1\n", m(3), 0).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }
}
