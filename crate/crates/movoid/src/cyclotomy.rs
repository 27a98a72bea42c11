//! Cyclotomic classes, exact additive character sums, Gauss periods, and
//! the predicted spectra of the cyclotomic Cayley graphs.
//!
//! Character sums are never touched as floating-point complex numbers. A sum
//! over a set S is carried as the histogram of Tr_{q/p} values over S
//! (a [`TraceCountVector`]); it collapses to a rational integer exactly when
//! the tail counts agree, which the semiprimitive case guarantees.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf::{Field, FieldElement, GfError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CyclotomyError {
    #[error("gf error: {0}")]
    Gf(#[from] GfError),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("parameters are not semiprimitive: no l with {p}^l = -1 (mod {n})")]
    NotSemiprimitive { p: u64, n: u64 },
    #[error("character sum over class {0} is not a rational integer")]
    NonIntegralPeriod(u64),
}

/// The N-th cyclotomic classes of a field, N | q-1.
pub struct CyclotomicSystem {
    field: Arc<Field>,
    n: u64,
    class_size: u64,
    /// Tr_{q/p}(γ^i) for every i, as an integer in 0..p.
    trace_p: Vec<u8>,
}

impl CyclotomicSystem {
    pub fn new(field: Arc<Field>, n: u64) -> Result<Self, CyclotomyError> {
        let q = field.q();
        if n <= 1 || (q - 1) % n != 0 {
            return Err(CyclotomyError::BadParameters(format!(
                "N = {n} must be a divisor of q-1 = {} greater than 1",
                q - 1
            )));
        }
        assert!(field.p() < 256, "trace table stores prime-field values as bytes");
        let mut trace_p = vec![0u8; (q - 1) as usize];
        for (i, t) in trace_p.iter_mut().enumerate() {
            *t = field.trace_to_prime(field.from_log(i as u64)) as u8;
        }
        Ok(CyclotomicSystem { class_size: (q - 1) / n, field, n, trace_p })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn class_size(&self) -> u64 {
        self.class_size
    }

    /// Index of the cyclotomic class containing x.
    pub fn class_of(&self, x: FieldElement) -> Result<u64, CyclotomyError> {
        Ok(self.field.discrete_log(x)? % self.n)
    }

    /// Elements of the class C_i.
    pub fn class_elements(&self, i: u64) -> impl Iterator<Item = FieldElement> + '_ {
        let i = i % self.n;
        (0..self.class_size).map(move |j| self.field.from_log(j * self.n + i))
    }

    /// Per-class histograms of Tr_{q/p}, all classes in one pass.
    pub fn class_trace_counts(&self) -> Vec<TraceCountVector> {
        let p = self.field.p() as usize;
        let n = self.n as usize;
        let mut counts = vec![vec![0u64; p]; n];
        for (log, &t) in self.trace_p.iter().enumerate() {
            counts[log % n][t as usize] += 1;
        }
        counts
            .into_iter()
            .map(|c| TraceCountVector { p: p as u64, counts: c })
            .collect()
    }

    /// ψ(C_i) for all i; integral exactly in the semiprimitive case.
    pub fn gauss_periods(&self) -> Result<Vec<i64>, CyclotomyError> {
        if semiprimitive_l(self.field.p(), self.n).is_none() {
            return Err(CyclotomyError::NotSemiprimitive { p: self.field.p(), n: self.n });
        }
        self.class_trace_counts()
            .iter()
            .enumerate()
            .map(|(i, v)| v.as_integer().ok_or(CyclotomyError::NonIntegralPeriod(i as u64)))
            .collect()
    }

    /// ψ(γ^i D_J) for all i in Z_N, exactly, via the per-class histograms
    /// (γ^i C_j = C_{i+j}).
    pub fn shifted_sums(&self, j: &ExponentSet) -> Result<Vec<i64>, CyclotomyError> {
        if j.n != self.n {
            return Err(CyclotomyError::BadParameters("exponent set modulus mismatch".into()));
        }
        if semiprimitive_l(self.field.p(), self.n).is_none() {
            return Err(CyclotomyError::NotSemiprimitive { p: self.field.p(), n: self.n });
        }
        let per_class = self.class_trace_counts();
        let p = self.field.p() as usize;
        (0..self.n)
            .map(|i| {
                let mut acc = TraceCountVector { p: p as u64, counts: vec![0; p] };
                for &jj in &j.members {
                    let c = &per_class[((i + jj) % self.n) as usize];
                    for (a, b) in acc.counts.iter_mut().zip(&c.counts) {
                        *a += b;
                    }
                }
                acc.as_integer().ok_or(CyclotomyError::NonIntegralPeriod(i))
            })
            .collect()
    }

    /// ψ_{F_q,y}(D_J) for one fixed y, summed directly over D_J. Used to
    /// spot-check that the sum depends on y only through class_of(y).
    pub fn direct_sum_at(&self, j: &ExponentSet, y: FieldElement) -> Result<Option<i64>, CyclotomyError> {
        let y_log = self.field.discrete_log(y)?;
        let p = self.field.p() as usize;
        let q1 = self.field.q() - 1;
        let mut counts = vec![0u64; p];
        let members: Vec<bool> = {
            let mut v = vec![false; self.n as usize];
            for &m in &j.members {
                v[m as usize] = true;
            }
            v
        };
        for log in 0..q1 {
            if members[(log % self.n) as usize] {
                counts[self.trace_p[((log + y_log) % q1) as usize] as usize] += 1;
            }
        }
        Ok(TraceCountVector { p: p as u64, counts }.as_integer())
    }

    /// Check on `samples` seeded-random y that ψ_{F_q,y}(D_J) matches the
    /// class-shift reduction.
    pub fn spot_check_reduction(
        &self,
        j: &ExponentSet,
        shifted: &[i64],
        samples: u32,
        seed: u64,
    ) -> Result<bool, CyclotomyError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q1 = self.field.q() - 1;
        for _ in 0..samples {
            let y_log = rng.gen_range(0..q1);
            let y = self.field.from_log(y_log);
            let direct = self.direct_sum_at(j, y)?;
            let expected = shifted[(y_log % self.n) as usize];
            if direct != Some(expected) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Histogram of Tr_{q/p} values over a finite set: the exact value of the
/// canonical-character sum Σ_j n_j ω_p^j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceCountVector {
    p: u64,
    counts: Vec<u64>,
}

impl TraceCountVector {
    pub fn new(p: u64, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len() as u64, p);
        TraceCountVector { p, counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// n_0 - n_1 when all of n_1..n_{p-1} agree, i.e. the sum is the
    /// rational integer it represents; None otherwise. Rests on
    /// 1 + ω_p + ... + ω_p^{p-1} = 0 and the linear independence of
    /// {1, ω_p, ..., ω_p^{p-2}}.
    pub fn as_integer(&self) -> Option<i64> {
        let tail = self.counts[1];
        if self.counts[1..].iter().all(|&c| c == tail) {
            Some(self.counts[0] as i64 - tail as i64)
        } else {
            None
        }
    }
}

/// Exact character sum over an arbitrary finite set of field elements.
pub fn char_sum<I: IntoIterator<Item = FieldElement>>(field: &Field, set: I) -> TraceCountVector {
    let p = field.p();
    let mut counts = vec![0u64; p as usize];
    for x in set {
        counts[field.trace_to_prime(x) as usize] += 1;
    }
    TraceCountVector { p, counts }
}

/// Smallest l with p^l = -1 (mod n), if one exists.
pub fn semiprimitive_l(p: u64, n: u64) -> Option<u32> {
    let mut v = 1 % n;
    for l in 1..=2 * n {
        v = v * (p % n) % n;
        if v == n - 1 {
            return Some(l as u32);
        }
        if v == 1 % n {
            return None;
        }
    }
    None
}

/// A subset of Z_N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentSet {
    pub n: u64,
    pub members: BTreeSet<u64>,
}

impl ExponentSet {
    pub fn new(n: u64, members: impl IntoIterator<Item = u64>) -> Self {
        let members: BTreeSet<u64> = members.into_iter().map(|m| m % n).collect();
        ExponentSet { n, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        (self.members.len() as u64) < self.n
    }

    pub fn contains(&self, i: u64) -> bool {
        self.members.contains(&(i % self.n))
    }

    /// {f(i) : i in J} for a map on Z_N.
    pub fn map(&self, f: impl Fn(u64) -> u64) -> ExponentSet {
        ExponentSet::new(self.n, self.members.iter().map(|&i| f(i) % self.n))
    }
}

/// The two restricted eigenvalues and bookkeeping for Cay(F_q, D_J) in the
/// semiprimitive construction with N = p^l + 1, s = 2lt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumPrediction {
    pub p: u64,
    pub l: u32,
    pub t: u32,
    pub u: u64,
    pub n: u64,
    pub sqrt_q: i128,
    /// Valency (q-1)u/N.
    pub k: i128,
    pub alpha1: i128,
    pub alpha2: i128,
    pub eps: i8,
    /// ε^s; always +1 here since s = 2lt is even.
    pub eps_s: i8,
    pub t_even: bool,
}

/// Evaluate the displayed eigenvalue formulas for N = p^l + 1, u = |J|.
pub fn predicted_spectrum(p: u64, l: u32, t: u32, u: u64) -> Result<SpectrumPrediction, CyclotomyError> {
    if l == 0 || t == 0 {
        return Err(CyclotomyError::BadParameters("l and t must be positive".into()));
    }
    let n = (p as i128)
        .checked_pow(l)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| CyclotomyError::BadParameters("p^l overflows".into()))? as u64;
    if u == 0 || u >= n {
        return Err(CyclotomyError::BadParameters(format!("u = {u} must satisfy 1 <= u < N = {n}")));
    }
    let sqrt_q = (p as i128)
        .checked_pow(l * t)
        .ok_or_else(|| CyclotomyError::BadParameters("p^{lt} overflows".into()))?;
    let q = sqrt_q
        .checked_mul(sqrt_q)
        .ok_or_else(|| CyclotomyError::BadParameters("q overflows".into()))?;
    if (q - 1) % (2 * n as i128) != 0 {
        return Err(CyclotomyError::BadParameters(format!("N = {n} does not divide (q-1)/2")));
    }
    let t_even = t % 2 == 0;
    let sign = if t_even { 1 } else { -1 };
    let alpha1 = (u as i128) * (-1 + sign * sqrt_q) / n as i128;
    let alpha2 = alpha1 - sign * sqrt_q;
    let k = (q - 1) * u as i128 / n as i128;
    // ε = -1 iff N is even and (p^l + 1)/N is odd; here (p^l+1)/N = 1.
    let eps: i8 = if n % 2 == 0 { -1 } else { 1 };
    // s = 2lt is even, so ε^s = 1 either way.
    let eps_s: i8 = 1;
    Ok(SpectrumPrediction { p, l, t, u, n, sqrt_q, k, alpha1, alpha2, eps, eps_s, t_even })
}

/// The exponent set where ψ(γ^i D_J) attains α₂: -J mod N when ε^s = 1,
/// shifted by N/2 when ε^s = -1.
pub fn dual_exponents(j: &ExponentSet, pred: &SpectrumPrediction) -> ExponentSet {
    let n = j.n;
    let shift = if pred.eps_s == 1 { 0 } else { n / 2 };
    j.map(|i| ((n - i) % n + shift) % n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;

    fn gf81() -> Arc<Field> {
        Arc::new(build_field(3, 4).unwrap())
    }

    #[test]
    fn class_of_reduces_mod_n() {
        let f = gf81();
        let sys = CyclotomicSystem::new(f.clone(), 8).unwrap();
        assert_eq!(sys.class_of(f.from_log(0)).unwrap(), 0);
        assert_eq!(sys.class_of(f.from_log(8 + 3)).unwrap(), 3);
        assert_eq!(sys.class_of(f.zero()).unwrap_err(), CyclotomyError::Gf(GfError::LogOfZero));
    }

    #[test]
    fn class_sizes_partition() {
        let f = gf81();
        let sys = CyclotomicSystem::new(f.clone(), 8).unwrap();
        assert_eq!(sys.class_size(), 10);
        for i in 0..8 {
            assert_eq!(sys.class_elements(i).count(), 10);
        }
    }

    #[test]
    fn char_sum_full_field_vanishes() {
        let f = gf81();
        let whole = char_sum(&f, f.elements());
        assert_eq!(whole.counts(), &[27, 27, 27]);
        assert_eq!(whole.as_integer(), Some(0));
        let units = char_sum(&f, (0..f.q() - 1).map(|i| f.from_log(i)));
        assert_eq!(units.as_integer(), Some(-1));
        let empty = char_sum(&f, std::iter::empty());
        assert_eq!(empty.counts(), &[0, 0, 0]);
    }

    #[test]
    fn as_integer_cases() {
        assert_eq!(TraceCountVector::new(3, vec![5, 5, 5]).as_integer(), Some(0));
        assert_eq!(TraceCountVector::new(3, vec![7, 4, 4]).as_integer(), Some(3));
        assert_eq!(TraceCountVector::new(3, vec![7, 5, 4]).as_integer(), None);
    }

    #[test]
    fn periods_sum_to_minus_one() {
        let f = gf81();
        // N = 10: 3^2 = 9 = -1 (mod 10), semiprimitive.
        let sys = CyclotomicSystem::new(f, 10).unwrap();
        let periods = sys.gauss_periods().unwrap();
        assert_eq!(periods.iter().sum::<i64>(), -1);
    }

    #[test]
    fn non_semiprimitive_rejected() {
        let f = gf81();
        // N = 16 divides 80 but 3 has order 4 mod 16 without hitting -1.
        let sys = CyclotomicSystem::new(f, 16).unwrap();
        assert!(matches!(sys.gauss_periods(), Err(CyclotomyError::NotSemiprimitive { .. })));
    }

    #[test]
    fn spectrum_small_case() {
        // GF(81) = GF(3^{2*1*2}), N = 4, u = 1: α1 = (9-1)/4 = 2, α2 = -7.
        let pred = predicted_spectrum(3, 1, 2, 1).unwrap();
        assert_eq!(pred.n, 4);
        assert_eq!(pred.k, 20);
        assert_eq!(pred.alpha1, 2);
        assert_eq!(pred.alpha2, -7);
        assert_eq!(pred.eps_s, 1);

        let f = gf81();
        let sys = CyclotomicSystem::new(f, 4).unwrap();
        let periods = sys.gauss_periods().unwrap();
        let mut sorted = periods.clone();
        sorted.sort();
        assert_eq!(sorted, vec![-7, 2, 2, 2]);
    }

    #[test]
    fn dual_exponents_examples() {
        let pred = predicted_spectrum(3, 3, 2, 4).unwrap();
        assert_eq!(pred.n, 28);
        let j0 = ExponentSet::new(28, [0]);
        assert_eq!(dual_exponents(&j0, &pred).members, ExponentSet::new(28, [0]).members);
        let j = ExponentSet::new(28, [0, 13, 14, 27]);
        assert_eq!(
            dual_exponents(&j, &pred).members,
            ExponentSet::new(28, [0, 1, 14, 15]).members
        );
        let j1 = ExponentSet::new(28, [1]);
        assert_eq!(dual_exponents(&j1, &pred).members, ExponentSet::new(28, [27]).members);
    }

    #[test]
    fn spectrum_formulas_3_12() {
        let pred = predicted_spectrum(3, 3, 2, 4).unwrap();
        assert_eq!(pred.k, 75920);
        assert_eq!(pred.alpha1, 104);
        assert_eq!(pred.alpha2, -625);
        let pred1 = predicted_spectrum(3, 3, 2, 1).unwrap();
        assert_eq!(pred1.alpha1, 26);
        assert_eq!(pred1.alpha2, -703);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(predicted_spectrum(3, 1, 2, 0), Err(CyclotomyError::BadParameters(_))));
        assert!(matches!(predicted_spectrum(3, 1, 2, 4), Err(CyclotomyError::BadParameters(_))));
    }
}
