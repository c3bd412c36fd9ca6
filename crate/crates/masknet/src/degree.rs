//! Degree distributions with exact PGF, excess-degree PGF, moments and
//! sampling. The probabilistic substrate for both graph generation and the
//! analytic solvers.

use std::path::Path;

use rand::Rng;

use crate::error::DegreeError;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Poisson { lambda: f64 },
    PowerLaw { exponent: f64, kmin: usize },
    Empirical,
}

/// A degree distribution truncated to a finite support `0..=kmax`.
///
/// All variants keep an explicit pmf table for series evaluation and
/// sampling; Poisson additionally uses closed forms for its PGFs and
/// moments.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    kind: Kind,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    mean: f64,
    second_moment: f64,
}

impl DegreeDistribution {
    /// Poisson(lambda), truncated where the tail mass drops below ~1e-12.
    pub fn poisson(lambda: f64) -> Self {
        assert!(lambda >= 0.0 && lambda.is_finite(), "lambda must be >= 0");
        let kmax = (lambda + 12.0 * lambda.sqrt() + 20.0).ceil() as usize;
        let mut pmf = Vec::with_capacity(kmax + 1);
        let mut p = (-lambda).exp();
        pmf.push(p);
        for k in 1..=kmax {
            p *= lambda / k as f64;
            pmf.push(p);
        }
        let mut dist = Self {
            kind: Kind::Poisson { lambda },
            pmf,
            cdf: Vec::new(),
            mean: lambda,
            second_moment: lambda + lambda * lambda,
        };
        dist.cdf = cumulative(&dist.pmf);
        dist
    }

    /// Pure power law p_k proportional to k^(-exponent) on [kmin, kmax],
    /// normalized numerically.
    pub fn power_law(exponent: f64, kmin: usize, kmax: usize) -> Result<Self, DegreeError> {
        if exponent <= 0.0 || !exponent.is_finite() {
            return Err(DegreeError::BadExponent(exponent));
        }
        if kmin == 0 || kmin > kmax {
            return Err(DegreeError::EmptySupport { kmin, kmax });
        }
        let mut pmf = vec![0.0; kmax + 1];
        let mut total = 0.0;
        for (k, slot) in pmf.iter_mut().enumerate().take(kmax + 1).skip(kmin) {
            let w = (k as f64).powf(-exponent);
            *slot = w;
            total += w;
        }
        for p in &mut pmf {
            *p /= total;
        }
        Ok(Self::from_table(Kind::PowerLaw { exponent, kmin }, pmf))
    }

    /// Empirical distribution from (degree, probability) pairs. The pmf must
    /// be nonnegative and sum to 1 within 1e-6; it is renormalized exactly.
    pub fn empirical(entries: &[(usize, f64)]) -> Result<Self, DegreeError> {
        if entries.is_empty() {
            return Err(DegreeError::EmptyPmf);
        }
        let kmax = entries.iter().map(|&(k, _)| k).max().unwrap();
        let mut pmf = vec![0.0; kmax + 1];
        for &(k, p) in entries {
            if p < 0.0 || !p.is_finite() {
                return Err(DegreeError::NegativePmf { degree: k, value: p });
            }
            pmf[k] += p;
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(DegreeError::NotNormalized(total));
        }
        for p in &mut pmf {
            *p /= total;
        }
        Ok(Self::from_table(Kind::Empirical, pmf))
    }

    /// Load an empirical pmf from a two-column text file `degree,probability`
    /// (comma or whitespace separated; header optional; `#` starts a comment).
    pub fn from_pmf_file(path: &Path) -> Result<Self, DegreeError> {
        let text = std::fs::read_to_string(path)?;
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(|c: char| c == ',' || c.is_whitespace());
            let a = fields.next().unwrap_or("");
            let b = fields
                .filter(|f| !f.is_empty())
                .next()
                .ok_or_else(|| DegreeError::MalformedFile {
                    line: lineno + 1,
                    reason: "expected two columns".into(),
                })?;
            match (a.parse::<usize>(), b.parse::<f64>()) {
                (Ok(k), Ok(p)) => entries.push((k, p)),
                _ if entries.is_empty() => continue, // header line
                _ => {
                    return Err(DegreeError::MalformedFile {
                        line: lineno + 1,
                        reason: format!("cannot parse '{line}'"),
                    })
                }
            }
        }
        Self::empirical(&entries)
    }

    fn from_table(kind: Kind, pmf: Vec<f64>) -> Self {
        let mut mean = 0.0;
        let mut second = 0.0;
        for (k, &p) in pmf.iter().enumerate() {
            mean += k as f64 * p;
            second += (k * k) as f64 * p;
        }
        let cdf = cumulative(&pmf);
        Self {
            kind,
            pmf,
            cdf,
            mean,
            second_moment: second,
        }
    }

    pub fn kmax(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn pmf_table(&self) -> &[f64] {
        &self.pmf
    }

    /// First and second moments (⟨k⟩, ⟨k²⟩); exact for Poisson.
    pub fn moments(&self) -> (f64, f64) {
        (self.mean, self.second_moment)
    }

    pub fn mean_degree(&self) -> f64 {
        self.mean
    }

    /// Mean excess degree (⟨k²⟩ - ⟨k⟩) / ⟨k⟩, the branching factor of the
    /// configuration model. Zero for a distribution with zero mean.
    pub fn mean_excess_degree(&self) -> f64 {
        if self.mean <= 0.0 {
            0.0
        } else {
            (self.second_moment - self.mean) / self.mean
        }
    }

    /// PGF g(z) = sum_k p_k z^k for z in [0, 1].
    pub fn pgf(&self, z: f64) -> Result<f64, DegreeError> {
        check_unit(z)?;
        Ok(self.pgf_unchecked(z))
    }

    pub(crate) fn pgf_unchecked(&self, z: f64) -> f64 {
        match self.kind {
            Kind::Poisson { lambda } => (lambda * (z - 1.0)).exp(),
            _ => polyval(&self.pmf, z),
        }
    }

    /// Size-biased PGF G(z) = sum_k (k p_k / ⟨k⟩) z^k, with exponent k.
    ///
    /// For Poisson this closes to z * exp(lambda (z - 1)). See
    /// [`excess_pgf_children`](Self::excess_pgf_children) for the variant
    /// with exponent k - 1 that the branching recursions use.
    pub fn excess_pgf(&self, z: f64) -> Result<f64, DegreeError> {
        check_unit(z)?;
        if self.mean <= 0.0 {
            return Err(DegreeError::ZeroMeanDegree);
        }
        Ok(z * self.excess_pgf_children_unchecked(z))
    }

    /// Excess-degree PGF over the k - 1 children of a node reached along a
    /// random edge: sum_k (k p_k / ⟨k⟩) z^(k-1). For Poisson this equals
    /// g(z) itself.
    pub fn excess_pgf_children(&self, z: f64) -> Result<f64, DegreeError> {
        check_unit(z)?;
        if self.mean <= 0.0 {
            return Err(DegreeError::ZeroMeanDegree);
        }
        Ok(self.excess_pgf_children_unchecked(z))
    }

    pub(crate) fn excess_pgf_children_unchecked(&self, z: f64) -> f64 {
        match self.kind {
            Kind::Poisson { lambda } => (lambda * (z - 1.0)).exp(),
            _ => {
                // sum k p_k z^(k-1) / <k> via Horner on the derivative table
                let mut acc = 0.0;
                for k in (1..self.pmf.len()).rev() {
                    acc = acc * z + k as f64 * self.pmf[k];
                }
                acc / self.mean
            }
        }
    }

    /// Draw `n` i.i.d. degrees; if the sum is odd, one uniformly chosen
    /// entry is resampled until the sum is even, so the sequence can serve
    /// as a stub sequence.
    pub fn sample_degrees<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        assert!(n >= 1);
        let mut degrees: Vec<usize> = (0..n).map(|_| self.sample_one(rng)).collect();
        let mut sum: u64 = degrees.iter().map(|&d| d as u64).sum();
        while sum % 2 == 1 {
            let i = rng.random_range(0..n);
            sum -= degrees[i] as u64;
            degrees[i] = self.sample_one(rng);
            sum += degrees[i] as u64;
        }
        degrees
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        // cdf is nondecreasing; partition_point gives the inverse-CDF index.
        self.cdf.partition_point(|&c| c < u).min(self.kmax())
    }
}

fn check_unit(z: f64) -> Result<(), DegreeError> {
    if (0.0..=1.0).contains(&z) {
        Ok(())
    } else {
        Err(DegreeError::ArgumentOutOfRange(z))
    }
}

fn cumulative(pmf: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    pmf.iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect()
}

fn polyval(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}
