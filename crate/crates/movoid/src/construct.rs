//! The construction pipeline: parameter analysis (d₀ and the two cases),
//! dihedral orbit decomposition of Z_N, exponent-set selection, and assembly
//! of candidate point sets; plus the published-table calculators and the
//! exact conjecture-ratio evaluation.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclotomy::{CyclotomicSystem, CyclotomyError, ExponentSet};
use crate::gf::GfError;
use crate::symplectic::{make_space, PointSet, SymplecticError, SymplecticSpace};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("gf error: {0}")]
    Gf(#[from] GfError),
    #[error("cyclotomy error: {0}")]
    Cyclotomy(#[from] CyclotomyError),
    #[error("symplectic error: {0}")]
    Symplectic(#[from] SymplecticError),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("d0 = {0} is not greater than 1; no construction at these parameters")]
    D0NotGreaterThanOne(BigUint),
    #[error("b = {b} out of range 1..={max}")]
    BOutOfRange { b: u64, max: u64 },
}

/// Which dihedral orbits feed J.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitChoice {
    /// First b orbits in order of minimal element.
    FirstB,
    /// Explicit orbit indices into the sorted decomposition.
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub p: u64,
    /// The rank r; an odd prime in the published families.
    pub p0: u32,
    pub l: u32,
    pub t: u32,
    pub b: u64,
    pub orbit_choice: OrbitChoice,
}

impl ConstructionParams {
    pub fn first_b(p: u64, p0: u32, l: u32, t: u32, b: u64) -> Self {
        ConstructionParams { p, p0, l, t, b, orbit_choice: OrbitChoice::FirstB }
    }

    /// e with p0·e = ℓ·t.
    pub fn e(&self) -> Result<u32, ConstructError> {
        let lt = self.l as u64 * self.t as u64;
        if self.p0 == 0 || lt % self.p0 as u64 != 0 {
            return Err(ConstructError::BadParameters(format!(
                "p0 = {} does not divide l*t = {lt}",
                self.p0
            )));
        }
        Ok((lt / self.p0 as u64) as u32)
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        if self.t % 2 != 0 {
            return Err(ConstructError::BadParameters(format!("t = {} must be even", self.t)));
        }
        if self.p0 % 2 == 0 || self.p0 < 3 {
            return Err(ConstructError::BadParameters(format!("r = p0 = {} must be odd and >= 3", self.p0)));
        }
        if self.l == 0 {
            return Err(ConstructError::BadParameters("l must be positive".into()));
        }
        self.e()?;
        Ok(())
    }
}

/// d₀ together with the oddness report from the lemma that introduces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D0Report {
    pub n: BigUint,
    pub d0: BigUint,
    pub odd: bool,
}

/// d₀ = gcd(N/2, (√q−1)/(p^e−1)) with N = p^ℓ+1, in exact big integers.
/// The source lemma calls d₀ odd; that is asserted into the report rather
/// than assumed.
pub fn compute_d0(p: u64, l: u32, t: u32, e: u32) -> Result<D0Report, ConstructError> {
    if t % 2 != 0 {
        return Err(ConstructError::BadParameters(format!("t = {t} must be even")));
    }
    let lt = l as u64 * t as u64;
    if e == 0 || lt % e as u64 != 0 {
        return Err(ConstructError::BadParameters(format!("e = {e} does not divide l*t = {lt}")));
    }
    let big_p = BigUint::from(p);
    let n = big_p.pow(l) + 1u32;
    let sqrt_q = big_p.pow((lt) as u32);
    let pe = big_p.pow(e);
    let quotient = (&sqrt_q - 1u32) / (&pe - 1u32);
    let d0 = (&n / 2u32).gcd(&quotient);
    let odd = (&d0 % 2u32) == BigUint::one();
    Ok(D0Report { n, d0, odd })
}

#[derive(Clone, Debug)]
pub struct OrbitDecomposition {
    pub n: u64,
    pub d0: u64,
    /// Orbits of ⟨ρ: i↦i+2d₀, σ: i↦−1−i⟩ on Z_N, sorted by minimal element.
    pub orbits: Vec<Vec<u64>>,
}

pub fn dihedral_orbits(n: u64, d0: u64) -> OrbitDecomposition {
    assert!(d0 >= 1 && (n / 2) % d0 == 0, "d0 must divide N/2");
    let mut seen = vec![false; n as usize];
    let mut orbits = Vec::new();
    for start in 0..n {
        if seen[start as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            if seen[i as usize] {
                continue;
            }
            seen[i as usize] = true;
            orbit.push(i);
            stack.push((i + 2 * d0) % n);
            stack.push((2 * n - 1 - i) % n);
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    assert_eq!(orbits.len(), d0 as usize, "decomposition must have d0 orbits");
    for o in &orbits {
        assert_eq!(o.len() as u64, n / d0, "orbits must have equal length N/d0");
    }
    OrbitDecomposition { n, d0, orbits }
}

/// A constructed candidate m-ovoid.
pub struct OvoidCandidate {
    pub params: ConstructionParams,
    pub space: Arc<SymplecticSpace>,
    pub sys: CyclotomicSystem,
    pub n: u64,
    pub d0: u64,
    pub j: ExponentSet,
    pub points: PointSet,
    pub m_claimed: u64,
    /// |D_J| = |J|(q−1)/N.
    pub d_size: u64,
}

pub fn build_candidate(params: ConstructionParams) -> Result<OvoidCandidate, ConstructError> {
    params.validate()?;
    let e = params.e()?;
    // cheap big-integer checks before committing to a field build
    let report = compute_d0(params.p, params.l, params.t, e)?;
    if report.d0 <= BigUint::one() {
        return Err(ConstructError::D0NotGreaterThanOne(report.d0));
    }
    if let Some(d0) = report.d0.to_u64() {
        if params.b < 1 || params.b > d0 - 1 {
            return Err(ConstructError::BOutOfRange { b: params.b, max: d0 - 1 });
        }
    }
    let space = Arc::new(make_space(params.p, e, params.p0)?);
    build_candidate_in(params, space)
}

/// Same as `build_candidate` but reusing an already built space (b-sweeps).
pub fn build_candidate_in(
    params: ConstructionParams,
    space: Arc<SymplecticSpace>,
) -> Result<OvoidCandidate, ConstructError> {
    params.validate()?;
    let e = params.e()?;
    let report = compute_d0(params.p, params.l, params.t, e)?;
    let d0_big = &report.d0;
    if *d0_big <= BigUint::one() {
        return Err(ConstructError::D0NotGreaterThanOne(report.d0));
    }
    let n = report
        .n
        .to_u64()
        .ok_or_else(|| ConstructError::BadParameters("N exceeds the field budget".into()))?;
    let d0 = d0_big.to_u64().expect("d0 <= N/2 fits u64 when N does");
    if params.b < 1 || params.b > d0 - 1 {
        return Err(ConstructError::BOutOfRange { b: params.b, max: d0 - 1 });
    }
    let decomp = dihedral_orbits(n, d0);
    let chosen: Vec<usize> = match &params.orbit_choice {
        OrbitChoice::FirstB => (0..params.b as usize).collect(),
        OrbitChoice::Explicit(idx) => {
            let mut idx = idx.clone();
            idx.sort_unstable();
            idx.dedup();
            if idx.len() as u64 != params.b {
                return Err(ConstructError::BadParameters(format!(
                    "explicit orbit list has {} distinct indices, b = {}",
                    idx.len(),
                    params.b
                )));
            }
            if idx.iter().any(|&i| i >= d0 as usize) {
                return Err(ConstructError::BadParameters(format!("orbit index out of range 0..{d0}")));
            }
            idx
        }
    };
    let j = ExponentSet::new(n, chosen.iter().flat_map(|&i| decomp.orbits[i].iter().copied()));
    if !j.is_proper() || j.is_empty() {
        return Err(ConstructError::BadParameters("J must be a proper non-empty subset of Z_N".into()));
    }
    let sys = CyclotomicSystem::new(space.field().clone(), n)?;
    let q = space.field().q();
    let d_size = j.len() as u64 * ((q - 1) / n);
    let pe = space.pe();
    assert_eq!(d_size % (pe - 1), 0, "D_J must be a union of punctured F_{{p^e}}-lines");
    let m_claimed = d_size / ((space.sqrt_q() + 1) * (pe - 1));
    assert_eq!(m_claimed * (space.sqrt_q() + 1) * (pe - 1), d_size, "|D| mod (sqrt(q)+1)(p^e-1)");
    // M: residues whose whole coset lies in D_J; by ρ-invariance this is
    // just the residue classes of J.
    let pm = space.point_modulus();
    let reps: Vec<u32> = (0..pm as u32).filter(|&rep| j.contains(rep as u64 % n)).collect();
    let points = PointSet::from_reps(pm, reps);
    assert_eq!(points.len() as u64, d_size / (pe - 1), "|M| = |D|/(p^e-1)");
    Ok(OvoidCandidate { params, space, sys, n, d0, j, points, m_claimed, d_size })
}

/// Case label from the parameter shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    /// p0 | t.
    A,
    /// p0 ∤ t, hence p0 | ℓ.
    B,
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub case: CaseLabel,
    pub e: u32,
    pub n: BigUint,
    pub d0: BigUint,
    pub d0_odd: bool,
    pub applies: bool,
    /// (√q−1)/(d₀(p^e−1)): the m-menu is {b·m_unit : 1 ≤ b ≤ d₀−1}.
    pub m_unit: BigUint,
    pub b_max: BigUint,
}

pub fn case_analysis(p0: u32, p: u64, l: u32, t: u32) -> Result<CaseReport, ConstructError> {
    if t % 2 != 0 {
        return Err(ConstructError::BadParameters(format!("t = {t} must be even")));
    }
    let lt = l as u64 * t as u64;
    if p0 == 0 || lt % p0 as u64 != 0 {
        return Err(ConstructError::BadParameters(format!("p0 = {p0} does not divide l*t = {lt}")));
    }
    let e = (lt / p0 as u64) as u32;
    let case = if t % p0 == 0 {
        CaseLabel::A
    } else if l % p0 == 0 {
        CaseLabel::B
    } else {
        return Err(ConstructError::BadParameters(format!(
            "p0 = {p0} divides neither t = {t} nor l = {l}"
        )));
    };
    let report = compute_d0(p, l, t, e)?;
    if case == CaseLabel::A {
        // the case-A reduction: d0 = gcd(N, p0)
        let by_case = report.n.gcd(&BigUint::from(p0));
        assert_eq!(report.d0, by_case, "case-A gcd reduction must agree with the definition");
    }
    let applies = report.d0 > BigUint::one();
    let big_p = BigUint::from(p);
    let m_unit = if applies {
        (big_p.pow(lt as u32) - 1u32) / (&report.d0 * (big_p.pow(e) - 1u32))
    } else {
        BigUint::zero()
    };
    let b_max = if applies { &report.d0 - 1u32 } else { BigUint::zero() };
    Ok(CaseReport { case, e, n: report.n, d0: report.d0, d0_odd: report.odd, applies, m_unit, b_max })
}

/// m/p^{e(p₀−2)} = b(p^{e·p₀}−1)/(d₀(p^{e(p₀−1)}−p^{e(p₀−2)})), exact,
/// for the Case-B shape ℓ = ℓ₀p₀, e = ℓ₀t.
pub fn conjecture_ratio(p: u64, p0: u32, t: u32, l0: u32, b: u64) -> Result<BigRational, ConstructError> {
    if l0 == 0 || b == 0 {
        return Err(ConstructError::BadParameters("l0 and b must be positive".into()));
    }
    if t % 2 != 0 || t % p0 == 0 {
        return Err(ConstructError::BadParameters(format!(
            "case B requires t even and not divisible by p0 (t = {t}, p0 = {p0})"
        )));
    }
    let l = l0 * p0;
    let e = l0 * t;
    let report = compute_d0(p, l, t, e)?;
    if report.d0 <= BigUint::one() {
        return Err(ConstructError::D0NotGreaterThanOne(report.d0));
    }
    let big_p = BigUint::from(p);
    let num = BigUint::from(b) * (big_p.pow(e * p0) - 1u32);
    let den = &report.d0 * (big_p.pow(e * (p0 - 1)) - big_p.pow(e * (p0 - 2)));
    Ok(BigRational::new(num.into(), den.into()))
}

/// (p^{ℓ₀p₀}+1)/(p^{ℓ₀}+1), the divisor of d₀ exhibited in the worked
/// examples of the conjecture refutation.
pub fn example_divisor(p: u64, p0: u32, l0: u32) -> BigUint {
    let big_p = BigUint::from(p);
    let num = big_p.pow(l0 * p0) + 1u32;
    let den = big_p.pow(l0) + 1u32;
    assert!((&num % &den).is_zero());
    num / den
}

/// The p-column of a printed table row: a concrete prime or the symbolic
/// "p odd" family of the first row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowPrime {
    Fixed(u64),
    AnyOddPrime,
}

/// A row as printed, with the m-column encoded structurally as
/// b(base^{top·k}−1)/(d₀(base^{bot·k}−1)).
#[derive(Clone, Debug)]
pub struct PrintedRow {
    pub table: u8,
    pub p0: u32,
    pub p: RowPrime,
    pub l: u32,
    /// t = t_coeff·k.
    pub t_coeff: u32,
    pub printed_d0: u64,
    pub printed_m_base: u64,
    pub printed_m_top: u32,
    pub printed_m_bot: u32,
}

/// The rows of the two published tables, as printed (including anomalies).
pub fn printed_tables() -> Vec<PrintedRow> {
    let r = |table, p0, p, l, t_coeff, printed_d0, printed_m_base, printed_m_top, printed_m_bot| PrintedRow {
        table,
        p0,
        p,
        l,
        t_coeff,
        printed_d0,
        printed_m_base,
        printed_m_top,
        printed_m_bot,
    };
    use RowPrime::*;
    vec![
        // table 1: p0 | t
        r(1, 3, AnyOddPrime, 1, 6, 3, 0, 6, 2),
        r(1, 5, Fixed(3), 2, 10, 5, 3, 20, 4),
        r(1, 5, Fixed(7), 2, 10, 5, 7, 20, 4),
        r(1, 5, Fixed(13), 2, 10, 5, 13, 20, 4),
        r(1, 5, Fixed(17), 2, 10, 5, 17, 20, 4),
        r(1, 5, Fixed(19), 1, 10, 5, 19, 10, 2),
        r(1, 7, Fixed(3), 3, 14, 7, 3, 42, 6),
        r(1, 7, Fixed(5), 3, 14, 7, 5, 42, 6),
        r(1, 7, Fixed(13), 3, 14, 7, 13, 42, 6),
        r(1, 11, Fixed(7), 5, 22, 11, 7, 110, 10),
        r(1, 11, Fixed(13), 5, 22, 11, 13, 110, 10),
        r(1, 11, Fixed(17), 5, 22, 11, 17, 110, 10),
        r(1, 11, Fixed(19), 5, 22, 11, 19, 110, 10),
        r(1, 13, Fixed(5), 2, 26, 13, 5, 52, 4),
        // last row prints base 5 in the m-column although p = 7
        r(1, 13, Fixed(7), 6, 26, 13, 5, 156, 12),
        // table 2: p0 | l
        r(2, 3, Fixed(3), 3, 2, 7, 3, 6, 2),
        r(2, 3, Fixed(5), 3, 2, 21, 5, 6, 2),
        r(2, 3, Fixed(7), 3, 2, 43, 7, 6, 2),
        r(2, 5, Fixed(3), 5, 2, 61, 3, 10, 2),
        r(2, 5, Fixed(5), 5, 2, 521, 5, 10, 2),
        r(2, 7, Fixed(3), 7, 2, 547, 3, 14, 2),
        r(2, 7, Fixed(5), 7, 2, 13021, 5, 14, 2),
        r(2, 11, Fixed(3), 11, 2, 44287, 3, 22, 2),
    ]
}

#[derive(Clone, Debug)]
pub struct RowReport {
    pub row: PrintedRow,
    /// (p evaluated at, recomputed d₀, d₀ matches printed) — one entry for a
    /// fixed-p row, several sample primes for the symbolic row.
    pub evaluations: Vec<(u64, BigUint, bool)>,
    /// Recomputed m(k=1) per evaluated p, b = 1, when the construction applies.
    pub m_at_k1: Vec<(u64, Option<BigUint>)>,
    pub flags: Vec<String>,
}

impl RowReport {
    pub fn consistent(&self) -> bool {
        self.flags.is_empty() && self.evaluations.iter().all(|&(_, _, ok)| ok)
    }
}

/// Recompute d₀ and m(k=1, b=1) for a printed row and flag mismatches.
pub fn table_row(row: &PrintedRow, k: u32) -> Result<RowReport, ConstructError> {
    let primes: Vec<u64> = match row.p {
        RowPrime::Fixed(p) => vec![p],
        RowPrime::AnyOddPrime => vec![3, 5, 7, 11, 13],
    };
    let t = row.t_coeff * k;
    let mut evaluations = Vec::new();
    let mut m_at_k1 = Vec::new();
    let mut flags = Vec::new();
    for &p in &primes {
        let lt = row.l as u64 * t as u64;
        let e = (lt / row.p0 as u64) as u32;
        let report = compute_d0(p, row.l, t, e)?;
        let matches = report.d0 == BigUint::from(row.printed_d0);
        if !matches {
            flags.push(format!(
                "d0 mismatch at p = {p}: printed {} but recomputed {}",
                row.printed_d0, report.d0
            ));
        }
        if !report.odd {
            flags.push(format!("d0 = {} is even at p = {p}, contradicting the oddness claim", report.d0));
        }
        let big_p = BigUint::from(p);
        let m = if report.d0 > BigUint::one() {
            Some((big_p.pow(lt as u32) - 1u32) / (&report.d0 * (big_p.pow(e) - 1u32)))
        } else {
            None
        };
        // printed m-formula evaluated at this p, b = 1
        if let RowPrime::Fixed(_) = row.p {
            if row.printed_m_base != p {
                flags.push(format!(
                    "m-column base mismatch: printed base {} but p = {p}; recomputed value uses base {p}",
                    row.printed_m_base
                ));
            } else if matches && report.d0 > BigUint::one() {
                let printed = (big_p.pow(row.printed_m_top * k) - 1u32)
                    / (BigUint::from(row.printed_d0) * (big_p.pow(row.printed_m_bot * k) - 1u32));
                if Some(&printed) != m.as_ref() {
                    flags.push(format!("m mismatch at p = {p}: printed formula gives {printed}"));
                }
            }
        }
        evaluations.push((p, report.d0, matches));
        m_at_k1.push((p, m));
    }
    Ok(RowReport { row: row.clone(), evaluations, m_at_k1, flags })
}
