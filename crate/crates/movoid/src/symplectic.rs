//! The W(2r-1, p^e) model on F_q with q = p^{2er}: the linearized form
//! L(X) = δX^√q, the alternating form f(x,y) = Tr_{q/p^e}(x L(y)),
//! projective point indexing over the subfield, perps, and duplicate-free
//! enumeration of the maximal totally isotropic subspaces (generators).
//!
//! Projective points are coset residues: ⟨x⟩ is discrete_log(x) reduced mod
//! (q-1)/(p^e-1), so F_{p^e}^*-invariant subsets of F_q^* are literally sets
//! of residues and perp tests are table lookups.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::gf::{build_field, mod_pow, mul_mod, Field, FieldElement, GfError};

#[derive(Debug, Error)]
pub enum SymplecticError {
    #[error("gf error: {0}")]
    Gf(#[from] GfError),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("form self-check failed: {0} (implementation bug)")]
    FormCheckFailed(String),
    #[error("enumeration budget exceeded: {0} generators")]
    BudgetExceeded(u128),
}

/// Collecting more generators than this requires the streaming visitor.
pub const GENERATOR_COLLECT_CAP: u128 = 1 << 23;

/// L(X) = Σ c_i X^{p^{ie}}, coefficients indexed by i = 0..2r-1.
#[derive(Clone, Debug)]
pub struct LinearizedForm {
    pub coeffs: Vec<FieldElement>,
    pub e: u32,
}

/// Outcome of the alternating-criterion check, with a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlternatingCheck {
    Alternating,
    /// c_0 != 0.
    NonzeroConstant,
    /// c_{2r-i}^{p^{ie}} != -c_i at this i.
    SymmetryBroken { i: usize },
    /// f(x,x) != 0 at this element (exhaustive cross-validation).
    NonIsotropicVector { log: u64 },
}

impl LinearizedForm {
    pub fn monomial(field: &Field, i: usize, coeff: FieldElement, e: u32, r: u32) -> Self {
        let mut coeffs = vec![field.zero(); 2 * r as usize];
        coeffs[i] = coeff;
        LinearizedForm { coeffs, e }
    }

    /// L(y).
    pub fn eval(&self, field: &Field, y: FieldElement) -> FieldElement {
        let mut acc = field.zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = field.add(acc, field.mul(c, field.frobenius(y, i as u32 * self.e)));
            }
        }
        acc
    }
}

/// Coefficient criterion for f(x,y) = Tr(x L(y)) to be alternating:
/// c_0 = 0 and c_{2r-i}^{p^{ie}} = -c_i for 1 <= i <= 2r-1. On small fields
/// this is cross-validated by evaluating f(x,x) over the whole field.
pub fn check_alternating(field: &Field, form: &LinearizedForm) -> AlternatingCheck {
    let two_r = form.coeffs.len();
    if !form.coeffs[0].is_zero() {
        return AlternatingCheck::NonzeroConstant;
    }
    for i in 1..two_r {
        let lhs = field.frobenius(form.coeffs[two_r - i], i as u32 * form.e);
        if lhs != field.neg(form.coeffs[i]) {
            return AlternatingCheck::SymmetryBroken { i };
        }
    }
    if field.exhaustive_ok() {
        for log in 0..field.q() - 1 {
            let x = field.from_log(log);
            let v = field.trace(field.mul(x, form.eval(field, x)), form.e).expect("e | s");
            if !v.is_zero() {
                return AlternatingCheck::NonIsotropicVector { log };
            }
        }
    }
    AlternatingCheck::Alternating
}

/// Non-degeneracy of f, i.e. bijectivity of x -> L(x). Monomial forms are
/// decided directly; general forms through the rank of the Gram matrix of f
/// on the F_{p^e}-basis {γ^i : 0 <= i < 2r} (independence certified by the
/// Moore determinant).
pub fn check_nondegenerate(field: &Field, form: &LinearizedForm) -> Result<bool, SymplecticError> {
    let nonzero: Vec<usize> = (0..form.coeffs.len()).filter(|&i| !form.coeffs[i].is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(false);
    }
    if nonzero.len() == 1 {
        // scaled Frobenius power, always a bijection
        return Ok(true);
    }
    let two_r = form.coeffs.len();
    let basis: Vec<FieldElement> = (0..two_r as u64).map(|i| field.from_log(i)).collect();
    let moore: Vec<Vec<FieldElement>> = (0..two_r)
        .map(|i| basis.iter().map(|&b| field.frobenius(b, i as u32 * form.e)).collect())
        .collect();
    if !matrix_invertible(field, moore) {
        return Err(SymplecticError::FormCheckFailed(
            "powers of the generator are F_{p^e}-dependent".into(),
        ));
    }
    let gram: Vec<Vec<FieldElement>> = basis
        .iter()
        .map(|&x| {
            basis
                .iter()
                .map(|&y| {
                    field
                        .trace(field.mul(x, form.eval(field, y)), form.e)
                        .expect("e | s")
                })
                .collect()
        })
        .collect();
    Ok(matrix_invertible(field, gram))
}

fn matrix_invertible(field: &Field, mut m: Vec<Vec<FieldElement>>) -> bool {
    let n = m.len();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return false;
        };
        m.swap(col, pivot);
        let inv = field.inv(m[col][col]).expect("pivot is non-zero");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = field.mul(m[r][col], inv);
            for c in col..n {
                let sub = field.mul(factor, m[col][c]);
                m[r][c] = field.sub(m[r][c], sub);
            }
        }
    }
    true
}

/// An F_{p^e}^*-invariant point set, stored as a bitset plus a sorted list
/// of residues.
#[derive(Clone, Debug)]
pub struct PointSet {
    n_points: u64,
    words: Vec<u64>,
    reps: Vec<u32>,
}

impl PointSet {
    pub fn from_reps(n_points: u64, mut reps: Vec<u32>) -> Self {
        reps.sort_unstable();
        reps.dedup();
        let mut words = vec![0u64; (n_points as usize + 63) / 64];
        for &r in &reps {
            assert!((r as u64) < n_points);
            words[r as usize / 64] |= 1 << (r % 64);
        }
        PointSet { n_points, words, reps }
    }

    pub fn universe(&self) -> u64 {
        self.n_points
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    #[inline]
    pub fn contains(&self, rep: u32) -> bool {
        self.words[rep as usize / 64] >> (rep % 64) & 1 == 1
    }

    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn without(&self, rep: u32) -> PointSet {
        PointSet::from_reps(self.n_points, self.reps.iter().copied().filter(|&r| r != rep).collect())
    }
}

/// A totally isotropic subspace given by a basis of field elements.
#[derive(Clone, Debug)]
pub struct IsotropicSubspace {
    pub basis: Vec<FieldElement>,
    pub dim: u32,
}

/// The symplectic polar space W(2r-1, p^e) modeled on GF(p^{2er}).
pub struct SymplecticSpace {
    field: Arc<Field>,
    e: u32,
    r: u32,
    delta: FieldElement,
    delta_log: u64,
    sqrt_q: u64,
    pe: u64,
    point_modulus: u64,
    form: LinearizedForm,
    /// Bit i set iff Tr_{q/p^e}(γ^i) = 0.
    trace_zero: Vec<u64>,
}

/// Build the space: GF(p^{2er}), δ = γ^{(√q+1)/2}, L(X) = δX^√q, with both
/// Lemma-level form checks enforced.
pub fn make_space(p: u64, e: u32, r: u32) -> Result<SymplecticSpace, SymplecticError> {
    if r < 2 {
        return Err(SymplecticError::BadParameters(format!("rank r = {r} must be at least 2")));
    }
    let field = Arc::new(build_field(p, 2 * e * r)?);
    SymplecticSpace::with_field(field, e, r)
}

impl SymplecticSpace {
    pub fn with_field(field: Arc<Field>, e: u32, r: u32) -> Result<Self, SymplecticError> {
        if r < 2 {
            return Err(SymplecticError::BadParameters(format!("rank r = {r} must be at least 2")));
        }
        if field.s() != 2 * e * r {
            return Err(SymplecticError::BadParameters(format!(
                "field exponent {} is not 2er = {}",
                field.s(),
                2 * e * r
            )));
        }
        let q = field.q();
        let sqrt_q = mod_pow_exact(field.p(), e * r);
        let delta_log = (sqrt_q + 1) / 2;
        let delta = field.from_log(delta_log);
        // δ^√q = -δ
        if field.frobenius(delta, e * r) != field.neg(delta) {
            return Err(SymplecticError::FormCheckFailed("delta^sqrt(q) != -delta".into()));
        }
        let form = LinearizedForm::monomial(&field, r as usize, delta, e, r);
        match check_alternating(&field, &form) {
            AlternatingCheck::Alternating => {}
            w => return Err(SymplecticError::FormCheckFailed(format!("{w:?}"))),
        }
        if !check_nondegenerate(&field, &form)? {
            return Err(SymplecticError::FormCheckFailed("form is degenerate".into()));
        }
        let pe = mod_pow_exact(field.p(), e);
        let point_modulus = (q - 1) / (pe - 1);
        let mut trace_zero = vec![0u64; ((q - 1) as usize + 63) / 64];
        for i in 0..q - 1 {
            let t = field.trace(field.from_log(i), e).expect("e | s");
            if t.is_zero() {
                trace_zero[i as usize / 64] |= 1 << (i % 64);
            }
        }
        Ok(SymplecticSpace { field, e, r, delta, delta_log, sqrt_q, pe, point_modulus, form, trace_zero })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn delta(&self) -> FieldElement {
        self.delta
    }

    pub fn form(&self) -> &LinearizedForm {
        &self.form
    }

    /// p^e, the order of the point-coordinate subfield.
    pub fn pe(&self) -> u64 {
        self.pe
    }

    pub fn sqrt_q(&self) -> u64 {
        self.sqrt_q
    }

    /// Number of projective points, (q-1)/(p^e-1); also the residue modulus.
    pub fn point_modulus(&self) -> u64 {
        self.point_modulus
    }

    /// f(x,y) = Tr_{q/p^e}(x L(y)).
    pub fn eval_form(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.field
            .trace(self.field.mul(x, self.form.eval(&self.field, y)), self.e)
            .expect("e | s")
    }

    #[inline]
    fn trace_zero_at(&self, log: u64) -> bool {
        self.trace_zero[log as usize / 64] >> (log % 64) & 1 == 1
    }

    /// f(lift(x), lift(y)) = 0, by table lookup.
    #[inline]
    pub fn points_perp(&self, x_rep: u32, y_rep: u32) -> bool {
        self.perp_with_base(self.perp_base(y_rep), x_rep)
    }

    /// The y-dependent part of the perp test, hoisted out of sweep loops.
    #[inline]
    pub fn perp_base(&self, y_rep: u32) -> u64 {
        let q1 = self.field.q() - 1;
        (self.delta_log + mul_mod(self.sqrt_q, y_rep as u64, q1)) % q1
    }

    #[inline]
    pub fn perp_with_base(&self, base: u64, x_rep: u32) -> bool {
        let q1 = self.field.q() - 1;
        let mut log = base + x_rep as u64;
        if log >= q1 {
            log -= q1;
        }
        self.trace_zero_at(log)
    }

    pub fn point_of(&self, x: FieldElement) -> Result<u32, GfError> {
        Ok((self.field.discrete_log(x)? % self.point_modulus) as u32)
    }

    pub fn lift(&self, rep: u32) -> FieldElement {
        self.field.from_log(rep as u64)
    }

    /// |⟨y⟩^⊥ ∩ M|.
    pub fn perp_count(&self, y_rep: u32, m: &PointSet) -> u64 {
        let q1 = self.field.q() - 1;
        let base = (self.delta_log + mul_mod(self.sqrt_q, y_rep as u64, q1)) % q1;
        let mut count = 0u64;
        for &x in m.reps() {
            let mut log = base + x as u64;
            if log >= q1 {
                log -= q1;
            }
            if self.trace_zero_at(log) {
                count += 1;
            }
        }
        count
    }

    /// Basis independence over F_{p^e} plus f vanishing on all pairs.
    pub fn is_totally_isotropic(&self, basis: &[FieldElement]) -> bool {
        if basis.is_empty() || basis.iter().any(|b| b.is_zero()) {
            return false;
        }
        for (i, &x) in basis.iter().enumerate() {
            for &y in &basis[i..] {
                if !self.eval_form(x, y).is_zero() {
                    return false;
                }
            }
        }
        let vecs = self.span_vectors(basis);
        vecs.len() as u128 == (self.pe as u128).pow(basis.len() as u32)
    }

    /// All vectors of the F_{p^e}-span, as polynomial encodings (0 included).
    fn span_vectors(&self, basis: &[FieldElement]) -> Vec<u32> {
        let q1 = self.field.q() - 1;
        let exp = self.field.exp_table();
        let mut vecs: Vec<u32> = vec![0];
        for &b in basis {
            let b_log = b.log().expect("basis vectors are non-zero");
            let mut next = Vec::with_capacity(vecs.len() * self.pe as usize);
            next.extend_from_slice(&vecs);
            for j in 0..self.pe - 1 {
                let scaled = exp[((b_log + j * self.point_modulus) % q1) as usize];
                for &v in &vecs {
                    next.push(self.field.add_enc(scaled, v));
                }
            }
            vecs = next;
        }
        vecs.sort_unstable();
        vecs.dedup();
        vecs
    }

    /// Projective points of the span of a subspace.
    pub fn points_of_subspace(&self, sub: &IsotropicSubspace) -> Vec<u32> {
        let mut pts: Vec<u32> = self
            .span_vectors(&sub.basis)
            .into_iter()
            .filter(|&v| v != 0)
            .map(|v| (self.field.log_of_enc(v) as u64 % self.point_modulus) as u32)
            .collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    /// ∏_{i=1}^{r} (p^{ei} + 1), the number of generators.
    pub fn generator_count(&self) -> u128 {
        (1..=self.r).fold(1u128, |acc, i| acc * ((self.pe as u128).pow(i) + 1))
    }

    /// Collect every generator; refuses spaces past the collect cap.
    pub fn enumerate_generators(&self) -> Result<Vec<IsotropicSubspace>, SymplecticError> {
        let expected = self.generator_count();
        if expected > GENERATOR_COLLECT_CAP {
            return Err(SymplecticError::BudgetExceeded(expected));
        }
        let found = Mutex::new(Vec::new());
        self.visit_generators(|basis_reps, _points| {
            found.lock().unwrap().push(IsotropicSubspace {
                basis: basis_reps.iter().map(|&r| self.lift(r)).collect(),
                dim: self.r,
            });
            ControlFlow::Continue(())
        });
        let mut v = found.into_inner().unwrap();
        v.sort_by(|a, b| {
            let ka: Vec<_> = a.basis.iter().map(|x| x.log()).collect();
            let kb: Vec<_> = b.basis.iter().map(|x| x.log()).collect();
            ka.cmp(&kb)
        });
        Ok(v)
    }

    /// Stream every generator exactly once through `visit`, parallelized over
    /// the first basis point. The visitor receives the canonical basis as
    /// point residues and the full projective point list of the subspace;
    /// returning `Break` stops the sweep early (best effort across workers).
    pub fn visit_generators<F>(&self, visit: F)
    where
        F: Fn(&[u32], &[u32]) -> ControlFlow<()> + Sync,
    {
        let pm = self.point_modulus as u32;
        let stop = AtomicBool::new(false);
        let progress = AtomicU64::new(0);
        (0..pm).into_par_iter().for_each_init(
            || DfsScratch::new(self),
            |scratch, b1| {
                if stop.load(Ordering::Relaxed) {
                    return;
                }
                if self.dfs_from(b1, scratch, &visit) == ControlFlow::Break(()) {
                    stop.store(true, Ordering::Relaxed);
                }
                let done = progress.fetch_add(1, Ordering::Relaxed) + 1;
                if crate::progress_enabled() && done % 4096 == 0 {
                    eprintln!("movoid: generator sweep {done}/{pm} start points");
                }
            },
        );
    }

    fn dfs_from<F>(&self, b1: u32, scratch: &mut DfsScratch, visit: &F) -> ControlFlow<()>
    where
        F: Fn(&[u32], &[u32]) -> ControlFlow<()> + Sync,
    {
        let pm = self.point_modulus as u32;
        let q1 = self.field.q() - 1;
        // candidates: points above b1 in its perp
        let mut cands = std::mem::take(&mut scratch.cands_root);
        cands.clear();
        let base = self.perp_base(b1);
        for x in b1 + 1..pm {
            if self.perp_with_base(base, x) {
                cands.push(x);
            }
        }
        // non-zero span vectors of <b1>, as discrete logs
        let span_logs: Vec<u64> =
            (0..self.pe - 1).map(|j| (b1 as u64 + j * self.point_modulus) % q1).collect();
        let mut basis = vec![b1];
        let mut span_points = vec![b1];
        let flow = self.dfs_node(&mut basis, &span_logs, &mut span_points, &cands, scratch, visit);
        scratch.cands_root = cands;
        flow
    }

    fn dfs_node<F>(
        &self,
        basis: &mut Vec<u32>,
        span_logs: &[u64],
        span_points: &mut Vec<u32>,
        cands: &[u32],
        scratch: &mut DfsScratch,
        visit: &F,
    ) -> ControlFlow<()>
    where
        F: Fn(&[u32], &[u32]) -> ControlFlow<()> + Sync,
    {
        let depth = basis.len();
        let pm = self.point_modulus;
        let q1 = self.field.q() - 1;
        let leaf = depth + 1 == self.r as usize;

        let (visited, stamp) = scratch.visited_mut(depth);
        *stamp += 1;
        let st = *stamp;
        for &p in span_points.iter() {
            visited[p as usize] = st;
        }

        for (idx, &c) in cands.iter().enumerate() {
            if scratch.visited(depth)[c as usize] == st {
                continue;
            }
            // New layer of span(basis, c): c itself plus one point per
            // non-zero span vector. c is canonical for this layer iff no
            // layer point is below it.
            let mut new_pts = std::mem::take(&mut scratch.layer_buf);
            new_pts.clear();
            new_pts.push(c);
            scratch.visited(depth)[c as usize] = st;
            let mut canonical = true;
            for &v in span_logs {
                let w = self.field.add_logs(v, c as u64).expect("candidate outside the span");
                let rep = (w % pm) as u32;
                if rep < c {
                    canonical = false;
                }
                scratch.visited(depth)[rep as usize] = st;
                new_pts.push(rep);
            }
            if canonical {
                let layer_len = new_pts.len();
                span_points.extend_from_slice(&new_pts);
                let flow = if leaf {
                    basis.push(c);
                    let f = visit(basis, span_points);
                    basis.pop();
                    f
                } else {
                    let base = self.perp_base(c);
                    let new_cands: Vec<u32> =
                        cands[idx + 1..].iter().copied().filter(|&x| self.perp_with_base(base, x)).collect();
                    let mut new_span_logs = span_logs.to_vec();
                    for j in 0..self.pe - 1 {
                        let scaled = (c as u64 + j * pm) % q1;
                        new_span_logs.push(scaled);
                        for &v in span_logs {
                            new_span_logs
                                .push(self.field.add_logs(v, scaled).expect("candidate outside the span"));
                        }
                    }
                    basis.push(c);
                    scratch.layer_buf = new_pts;
                    let f = self.dfs_node(basis, &new_span_logs, span_points, &new_cands, scratch, visit);
                    new_pts = std::mem::take(&mut scratch.layer_buf);
                    basis.pop();
                    f
                };
                span_points.truncate(span_points.len() - layer_len);
                scratch.layer_buf = new_pts;
                if flow == ControlFlow::Break(()) {
                    return ControlFlow::Break(());
                }
            } else {
                scratch.layer_buf = new_pts;
            }
        }
        ControlFlow::Continue(())
    }
}

struct DfsScratch {
    /// Stamped visited arrays, one per depth.
    visited: Vec<(Vec<u32>, u32)>,
    layer_buf: Vec<u32>,
    cands_root: Vec<u32>,
}

impl DfsScratch {
    fn new(space: &SymplecticSpace) -> Self {
        let pm = space.point_modulus as usize;
        let depths = space.r as usize;
        DfsScratch {
            visited: (0..depths).map(|_| (vec![0u32; pm], 0u32)).collect(),
            layer_buf: Vec::new(),
            cands_root: Vec::new(),
        }
    }

    fn visited_mut(&mut self, depth: usize) -> (&mut Vec<u32>, &mut u32) {
        let (v, s) = &mut self.visited[depth];
        (v, s)
    }

    fn visited(&mut self, depth: usize) -> &mut Vec<u32> {
        &mut self.visited[depth].0
    }
}

fn mod_pow_exact(p: u64, k: u32) -> u64 {
    mod_pow(p, k as u64, u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w33() -> SymplecticSpace {
        make_space(3, 1, 2).unwrap()
    }

    #[test]
    fn w33_shape() {
        let sp = w33();
        assert_eq!(sp.field().q(), 81);
        assert_eq!(sp.point_modulus(), 40);
        assert_eq!(sp.delta(), sp.field().from_log(5));
    }

    #[test]
    fn w59_shape() {
        let sp = make_space(3, 2, 3).unwrap();
        assert_eq!(sp.field().q(), 531441);
        assert_eq!(sp.delta(), sp.field().from_log(365));
        assert_eq!(sp.point_modulus(), 66430);
    }

    #[test]
    fn rank_below_two_rejected() {
        assert!(matches!(make_space(3, 1, 1), Err(SymplecticError::BadParameters(_))));
    }

    #[test]
    fn form_alternating_and_antisymmetric_exhaustive() {
        let sp = w33();
        let f = sp.field().clone();
        let els: Vec<_> = f.elements().collect();
        for &x in &els {
            assert!(sp.eval_form(x, x).is_zero());
            for &y in &els {
                assert_eq!(sp.eval_form(x, y), f.neg(sp.eval_form(y, x)));
            }
        }
        assert!(sp.eval_form(f.zero(), f.generator()).is_zero());
    }

    #[test]
    fn alternating_check_witnesses() {
        let sp = w33();
        let f = sp.field();
        // L(X) = X: c_0 = 1
        let bad0 = LinearizedForm::monomial(f, 0, f.one(), 1, 2);
        assert_eq!(check_alternating(f, &bad0), AlternatingCheck::NonzeroConstant);
        // L(X) = X^{√q} with coefficient 1, r odd: symmetry fails at i = r
        let sp3 = make_space(3, 1, 3).unwrap();
        let f3 = sp3.field();
        let bad1 = LinearizedForm::monomial(f3, 3, f3.one(), 1, 3);
        assert_eq!(check_alternating(f3, &bad1), AlternatingCheck::SymmetryBroken { i: 3 });
    }

    #[test]
    fn nondegeneracy_cases() {
        let sp = w33();
        let f = sp.field();
        assert!(check_nondegenerate(f, sp.form()).unwrap());
        let zero = LinearizedForm::monomial(f, 1, f.zero(), 1, 2);
        assert!(!check_nondegenerate(f, &zero).unwrap());
        // L(X) = X^{p^e} - X has kernel GF(p^e)
        let mut lf = LinearizedForm::monomial(f, 1, f.one(), 1, 2);
        lf.coeffs[0] = f.neg(f.one());
        assert!(!check_nondegenerate(f, &lf).unwrap());
    }

    #[test]
    fn point_round_trip_and_coset_invariance() {
        let sp = w33();
        let f = sp.field();
        for rep in 0..sp.point_modulus() as u32 {
            assert_eq!(sp.point_of(sp.lift(rep)).unwrap(), rep);
        }
        // θ in F_3^*: θ = γ^40
        let x = f.from_log(7);
        let theta = f.from_log(40);
        assert_eq!(sp.point_of(x).unwrap(), sp.point_of(f.mul(theta, x)).unwrap());
    }

    #[test]
    fn perp_counts_small() {
        let sp = w33();
        let empty = PointSet::from_reps(40, vec![]);
        assert_eq!(sp.perp_count(3, &empty), 0);
        let own = PointSet::from_reps(40, vec![3]);
        assert_eq!(sp.perp_count(3, &own), 1);
        // hyperplane size: every perp holds (3^3 - 1)/2 = 13 points
        let all = PointSet::from_reps(40, (0..40).collect());
        for y in 0..40 {
            assert_eq!(sp.perp_count(y, &all), 13);
        }
    }

    #[test]
    fn w33_generator_enumeration() {
        let sp = w33();
        assert_eq!(sp.generator_count(), 40);
        let gens = sp.enumerate_generators().unwrap();
        assert_eq!(gens.len(), 40);
        for g in &gens {
            assert!(sp.is_totally_isotropic(&g.basis));
            assert_eq!(sp.points_of_subspace(g).len(), 4);
        }
        // pairwise distinct point sets
        let mut sets: Vec<Vec<u32>> = gens.iter().map(|g| sp.points_of_subspace(g)).collect();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), 40);
    }

    #[test]
    fn w53_generator_enumeration() {
        let sp = make_space(3, 1, 3).unwrap();
        assert_eq!(sp.generator_count(), 4 * 10 * 28);
        let gens = sp.enumerate_generators().unwrap();
        assert_eq!(gens.len(), 1120);
        for g in gens.iter().step_by(97) {
            assert!(sp.is_totally_isotropic(&g.basis));
            assert_eq!(sp.points_of_subspace(g).len(), 13);
        }
    }

    #[test]
    fn dependent_basis_not_isotropic() {
        let sp = w33();
        let f = sp.field();
        let x = f.from_log(2);
        let theta = f.from_log(40);
        assert!(sp.is_totally_isotropic(&[x]));
        assert!(!sp.is_totally_isotropic(&[x, f.mul(theta, x)]));
    }
}
