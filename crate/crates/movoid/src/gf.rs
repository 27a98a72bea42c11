//! Exact arithmetic in GF(p^s) backed by discrete-log tables.
//!
//! Fields are built deterministically: the modulus is the lexicographically
//! smallest monic irreducible polynomial of degree `s` over GF(p), with
//! coefficient sequences compared from the constant term upward, and the
//! generator is the smallest element in the same ordering whose
//! multiplicative order is exactly `p^s - 1`. Any two builds of the same
//! `(p, s)` therefore agree element by element.
//!
//! Elements are stored as discrete logs relative to the generator, with a
//! sentinel for zero. Multiplication is index addition mod `q - 1`;
//! addition goes through the `exp` table to polynomial coordinates and back.

use std::sync::atomic::{AtomicU32, Ordering};

use thiserror::Error;

/// Hard cap on field size; the log/exp tables are materialized in memory.
pub const FIELD_SIZE_CAP: u64 = 1 << 31;

/// Fields larger than this disable exhaustive property sweeps.
pub const EXHAUSTIVE_SWEEP_CAP: u64 = 1 << 26;

const ZERO_IDX: u32 = u32::MAX;

static NEXT_FIELD_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("field size {0} exceeds the table budget {1}")]
    BudgetExceeded(u128, u64),
    #[error("irreducible-polynomial search exhausted (internal error)")]
    SearchExhausted,
    #[error("discrete log of zero")]
    LogOfZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} does not divide the field exponent {1}")]
    NotADivisor(u32, u32),
    #[error("elements belong to different fields")]
    FieldMismatch,
}

/// An element of a [`Field`], stored as a discrete log (or the zero sentinel)
/// together with the id of the field it belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    field: u32,
    idx: u32,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.idx == ZERO_IDX
    }

    /// Discrete log relative to the field generator, if non-zero.
    pub fn log(&self) -> Option<u64> {
        if self.is_zero() {
            None
        } else {
            Some(self.idx as u64)
        }
    }
}

/// Deterministic parameters of a built field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u64,
    pub s: u32,
    /// Monic modulus, constant term first, length `s + 1`.
    pub modulus: Vec<u32>,
    /// Polynomial encoding of the generator (base-p digits, constant first).
    pub generator: u64,
}

/// GF(p^s) with full log/exp tables. Immutable after construction.
pub struct Field {
    id: u32,
    p: u64,
    s: u32,
    q: u64,
    modulus: Vec<u32>,
    generator_enc: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Zech logarithms: zech[i] = log(1 + γ^i), ZERO_IDX where 1 + γ^i = 0.
    zech: Vec<u32>,
    q1_factors: Vec<u64>,
}

/// Build GF(p^s). `p` must be an odd prime and `p^s` within the table budget.
pub fn build_field(p: u64, s: u32) -> Result<Field, GfError> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    assert!(s >= 1, "field exponent must be positive");
    let q_wide = (p as u128).checked_pow(s).ok_or(GfError::BudgetExceeded(u128::MAX, FIELD_SIZE_CAP))?;
    if q_wide > FIELD_SIZE_CAP as u128 {
        return Err(GfError::BudgetExceeded(q_wide, FIELD_SIZE_CAP));
    }
    let q = q_wide as u64;
    if q > EXHAUSTIVE_SWEEP_CAP {
        eprintln!("movoid: field of size {q} exceeds {EXHAUSTIVE_SWEEP_CAP}; exhaustive property sweeps disabled");
    }

    let modulus = smallest_irreducible(p, s)?;
    let q1_factors = prime_factors(q - 1);
    let generator_enc = smallest_generator(p, s, q, &modulus, &q1_factors)?;

    // exp table by repeated multiplication with the generator.
    let gamma = decode(generator_enc, p, s);
    let mut exp = vec![0u32; (q - 1) as usize];
    let mut log = vec![ZERO_IDX; q as usize];
    let mut cur = vec![0u32; s as usize];
    cur[0] = 1;
    for i in 0..(q - 1) as usize {
        let enc = encode(&cur, p);
        exp[i] = enc as u32;
        debug_assert!(log[enc as usize] == ZERO_IDX, "generator order below q-1");
        log[enc as usize] = i as u32;
        cur = poly_mul_mod(&cur, &gamma, &modulus, p);
    }
    // Closing the cycle certifies the generator order exactly.
    if encode(&cur, p) != 1 {
        return Err(GfError::SearchExhausted);
    }

    let zech = {
        let mut z = vec![0u32; (q - 1) as usize];
        for i in 0..(q - 1) as usize {
            z[i] = log[add_encoded(1, exp[i], p as u32) as usize];
        }
        z
    };

    Ok(Field {
        id: NEXT_FIELD_ID.fetch_add(1, Ordering::Relaxed),
        p,
        s,
        q,
        modulus,
        generator_enc,
        exp,
        log,
        zech,
        q1_factors,
    })
}

impl Field {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Field size q = p^s.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn params(&self) -> FieldParams {
        FieldParams {
            p: self.p,
            s: self.s,
            modulus: self.modulus.clone(),
            generator: self.generator_enc,
        }
    }

    /// Whether exhaustive whole-field sweeps are enabled for this size.
    pub fn exhaustive_ok(&self) -> bool {
        self.q <= EXHAUSTIVE_SWEEP_CAP
    }

    pub fn prime_factors_of_order(&self) -> &[u64] {
        &self.q1_factors
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.id, idx: ZERO_IDX }
    }

    pub fn one(&self) -> FieldElement {
        self.from_log(0)
    }

    pub fn generator(&self) -> FieldElement {
        self.from_log(1)
    }

    /// γ^i (i reduced mod q-1).
    pub fn from_log(&self, i: u64) -> FieldElement {
        FieldElement { field: self.id, idx: (i % (self.q - 1)) as u32 }
    }

    /// Element from its polynomial-coordinate encoding.
    pub fn from_enc(&self, enc: u64) -> FieldElement {
        assert!(enc < self.q, "encoding out of range");
        FieldElement { field: self.id, idx: self.log[enc as usize] }
    }

    /// The prime-subfield constant c (0 <= c < p).
    pub fn from_prime(&self, c: u64) -> FieldElement {
        self.from_enc(c % self.p)
    }

    /// Polynomial-coordinate encoding of an element.
    pub fn enc(&self, x: FieldElement) -> u64 {
        self.check(x);
        if x.is_zero() {
            0
        } else {
            self.exp[x.idx as usize] as u64
        }
    }

    pub fn ensure_same(&self, x: FieldElement) -> Result<(), GfError> {
        if x.field == self.id {
            Ok(())
        } else {
            Err(GfError::FieldMismatch)
        }
    }

    fn check(&self, x: FieldElement) {
        assert!(x.field == self.id, "field mismatch");
    }

    pub fn discrete_log(&self, x: FieldElement) -> Result<u64, GfError> {
        self.ensure_same(x)?;
        x.log().ok_or(GfError::LogOfZero)
    }

    /// Raw exp table: discrete log -> polynomial encoding.
    pub(crate) fn exp_table(&self) -> &[u32] {
        &self.exp
    }

    /// Raw log table: polynomial encoding -> discrete log (sentinel for 0).
    pub(crate) fn log_of_enc(&self, enc: u32) -> u32 {
        self.log[enc as usize]
    }

    /// Digit-wise addition of two polynomial encodings.
    pub fn add_enc(&self, a: u32, b: u32) -> u32 {
        add_encoded(a, b, self.p as u32)
    }

    /// log(γ^a + γ^b) via the Zech table, or None when the sum is zero.
    #[inline]
    pub fn add_logs(&self, a: u64, b: u64) -> Option<u64> {
        let q1 = self.q - 1;
        let d = if a >= b { a - b } else { a + q1 - b };
        let z = self.zech[d as usize];
        if z == ZERO_IDX {
            return None;
        }
        let mut r = b + z as u64;
        if r >= q1 {
            r -= q1;
        }
        Some(r)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let ea = if a.is_zero() { 0 } else { self.exp[a.idx as usize] };
        let eb = if b.is_zero() { 0 } else { self.exp[b.idx as usize] };
        FieldElement { field: self.id, idx: self.log[self.add_enc(ea, eb) as usize] }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.check(a);
        if a.is_zero() {
            return a;
        }
        // -1 = γ^{(q-1)/2} in odd characteristic.
        let half = (self.q - 1) / 2;
        self.from_log(a.idx as u64 + half)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        self.from_log(a.idx as u64 + b.idx as u64)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        self.ensure_same(a)?;
        let i = a.log().ok_or(GfError::DivisionByZero)?;
        Ok(self.from_log((self.q - 1) - i % (self.q - 1)))
    }

    /// x^k with x^0 = 1 (including 0^0 = 1).
    pub fn pow(&self, a: FieldElement, k: u64) -> FieldElement {
        self.check(a);
        if k == 0 {
            return self.one();
        }
        if a.is_zero() {
            return self.zero();
        }
        let q1 = (self.q - 1) as u128;
        self.from_log(((a.idx as u128 * k as u128) % q1) as u64)
    }

    /// Frobenius power x -> x^{p^k}.
    pub fn frobenius(&self, a: FieldElement, k: u32) -> FieldElement {
        self.check(a);
        if a.is_zero() {
            return a;
        }
        let q1 = self.q - 1;
        let pk = mod_pow(self.p % q1, k as u64, q1);
        self.from_log(mul_mod(a.idx as u64, pk, q1))
    }

    /// Tr_{q/p^e}(x) = x + x^{p^e} + ... + x^{p^{e(s/e-1)}}.
    pub fn trace(&self, x: FieldElement, e: u32) -> Result<FieldElement, GfError> {
        self.ensure_same(x)?;
        if e == 0 || self.s % e != 0 {
            return Err(GfError::NotADivisor(e, self.s));
        }
        if x.is_zero() {
            return Ok(self.zero());
        }
        let q1 = self.q - 1;
        let pe = mod_pow(self.p % q1, e as u64, q1);
        let mut term = x.idx as u64;
        let mut acc = 0u32;
        for _ in 0..self.s / e {
            acc = self.add_enc(acc, self.exp[term as usize]);
            term = mul_mod(term, pe, q1);
        }
        Ok(self.from_enc(acc as u64))
    }

    /// Tr_{q/p}(x) as an integer in 0..p (prime-subfield encodings are the
    /// constants 0..p-1).
    pub fn trace_to_prime(&self, x: FieldElement) -> u64 {
        self.trace(x, 1).expect("1 divides s").pipe_enc(self)
    }

    /// All q elements, zero first then γ^0, γ^1, ...
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        std::iter::once(self.zero()).chain((0..self.q - 1).map(move |i| self.from_log(i)))
    }
}

impl FieldElement {
    fn pipe_enc(self, f: &Field) -> u64 {
        f.enc(self)
    }
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({}^{}) [q={}]", self.p, self.s, self.q)
    }
}

// ---- deterministic construction ---------------------------------------

/// Lexicographically smallest monic irreducible of degree s over GF(p),
/// coefficient sequences read constant term first.
fn smallest_irreducible(p: u64, s: u32) -> Result<Vec<u32>, GfError> {
    let total = (p as u128).pow(s);
    // Lex order with c_0 most significant is numeric order of the mirrored
    // encoding. For s >= 2 a zero constant term is divisible by x.
    let start: u128 = if s >= 2 { (p as u128).pow(s - 1) } else { 0 };
    let mut rank = start;
    while rank < total {
        let coeffs = decode_mirrored(rank, p, s);
        let mut f: Vec<u32> = coeffs;
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(f);
        }
        rank += 1;
    }
    Err(GfError::SearchExhausted)
}

/// Smallest element (same lexicographic ordering read constant term first)
/// of multiplicative order exactly q-1.
fn smallest_generator(
    p: u64,
    s: u32,
    q: u64,
    modulus: &[u32],
    q1_factors: &[u64],
) -> Result<u64, GfError> {
    let total = (p as u128).pow(s);
    for rank in 1..total {
        let coeffs = decode_mirrored(rank, p, s);
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        if has_full_order(&coeffs, q, modulus, p, q1_factors) {
            return Ok(encode(&coeffs, p));
        }
    }
    Err(GfError::SearchExhausted)
}

fn has_full_order(el: &[u32], q: u64, modulus: &[u32], p: u64, q1_factors: &[u64]) -> bool {
    for &l in q1_factors {
        let pw = poly_pow_mod(el, (q - 1) / l, modulus, p);
        if is_one(&pw) {
            return false;
        }
    }
    true
}

fn is_one(a: &[u32]) -> bool {
    a.first() == Some(&1) && a.iter().skip(1).all(|&c| c == 0)
}

/// Rabin irreducibility test: x^{p^s} = x mod f, and for each prime divisor
/// d of s, gcd(x^{p^{s/d}} - x, f) = 1.
fn is_irreducible(f: &[u32], p: u64) -> bool {
    let s = (f.len() - 1) as u32;
    if s == 0 || f[s as usize] != 1 {
        return false;
    }
    let xq = x_frobenius_power(p, s, f);
    if !poly_eq_x(&xq, f, p) {
        return false;
    }
    for d in prime_factors(s as u64) {
        let xd = x_frobenius_power(p, s / d as u32, f);
        let mut g = xd;
        // g := x^{p^{s/d}} - x
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = ((g[1] as u64 + p - 1) % p) as u32;
        trim(&mut g);
        let gc = poly_gcd(&g, f, p);
        if gc.len() > 1 {
            return false;
        }
    }
    true
}

/// x^{p^k} mod f by square-and-multiply on the exponent p^k (fits u64
/// under the field size cap).
fn x_frobenius_power(p: u64, k: u32, f: &[u32]) -> Vec<u32> {
    let e = (p as u128).pow(k);
    debug_assert!(e <= u64::MAX as u128);
    let x = vec![0u32, 1];
    poly_pow_mod(&x, e as u64, f, p)
}

// ---- dense polynomial arithmetic over GF(p) ----------------------------

fn trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u64) -> Vec<u32> {
    let s = modulus.len() - 1;
    let mut prod = vec![0u64; (a.len() + b.len() - 1).max(s)];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] += ai as u64 * bj as u64;
        }
    }
    // reduce mod the monic modulus
    for i in (s..prod.len()).rev() {
        let c = prod[i] % p;
        if c != 0 {
            for k in 0..s {
                let m = modulus[k] as u64;
                if m != 0 {
                    // subtract c * m * x^{i-s+k}
                    prod[i - s + k] += c * (p - m);
                }
            }
        }
        prod[i] = 0;
    }
    let mut out: Vec<u32> = prod[..s].iter().map(|&c| (c % p) as u32).collect();
    if out.is_empty() {
        out.push(0);
    }
    out
}

fn poly_pow_mod(base: &[u32], mut e: u64, modulus: &[u32], p: u64) -> Vec<u32> {
    let s = modulus.len() - 1;
    let mut result = vec![0u32; s.max(1)];
    result[0] = 1;
    let mut b: Vec<u32> = {
        // reduce base mod modulus first
        let one = vec![1u32];
        poly_mul_mod(base, &one, modulus, p)
    };
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul_mod(&result, &b, modulus, p);
        }
        b = poly_mul_mod(&b, &b, modulus, p);
        e >>= 1;
    }
    result
}

fn poly_eq_x(a: &[u32], modulus: &[u32], _p: u64) -> bool {
    let s = modulus.len() - 1;
    if s == 1 {
        // x mod f is the constant -f[0]; callers only use this through the
        // Rabin test where a is already reduced.
        let x_red = {
            let x = vec![0u32, 1];
            poly_mul_mod(&x, &[1], modulus, _p)
        };
        let mut aa = a.to_vec();
        let mut bb = x_red;
        trim(&mut aa);
        trim(&mut bb);
        return aa == bb;
    }
    let mut aa = a.to_vec();
    trim(&mut aa);
    aa == vec![0, 1]
}

fn poly_rem(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    let db = b.len() - 1;
    if db == 0 {
        return vec![0];
    }
    let mut r: Vec<u64> = a.iter().map(|&c| (c as u64) % p).collect();
    let lead_inv = mod_inv(b[db] as u64, p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = (r[dr] % p * lead_inv) % p;
        if c != 0 {
            for k in 0..=db {
                let sub = c * b[k] as u64 % p;
                r[dr - db + k] = (r[dr - db + k] + p - sub) % p;
            }
        }
        r.pop();
    }
    let mut out: Vec<u32> = r.iter().map(|&c| (c % p) as u32).collect();
    if out.is_empty() {
        out.push(0);
    }
    trim(&mut out);
    out
}

fn poly_gcd(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

// ---- encodings ---------------------------------------------------------

/// Carry-free digit-wise addition of two base-p encodings.
fn add_encoded(a: u32, b: u32, p: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut shift = 1u32;
    while a != 0 || b != 0 {
        let d = (a % p + b % p) % p;
        out += d * shift;
        a /= p;
        b /= p;
        shift *= p;
    }
    out
}

fn encode(coeffs: &[u32], p: u64) -> u64 {
    let mut out = 0u64;
    for &c in coeffs.iter().rev() {
        out = out * p + c as u64;
    }
    out
}

fn decode(enc: u64, p: u64, s: u32) -> Vec<u32> {
    let mut out = vec![0u32; s as usize];
    let mut e = enc;
    for d in out.iter_mut() {
        *d = (e % p) as u32;
        e /= p;
    }
    out
}

/// Digits of `rank` with c_0 as the most significant digit: the iteration
/// order that realizes constant-term-first lexicographic order.
fn decode_mirrored(rank: u128, p: u64, s: u32) -> Vec<u32> {
    let mut out = vec![0u32; s as usize];
    let mut r = rank;
    for i in (0..s as usize).rev() {
        out[s as usize - 1 - i] = (r / (p as u128).pow(i as u32) % p as u128) as u32;
        r %= (p as u128).pow(i as u32);
    }
    out
}

// ---- integer helpers ----------------------------------------------------

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors by trial division (complete for the supported
/// range, q - 1 < 2^31).
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf3_generator_is_two() {
        let f = build_field(3, 1).unwrap();
        assert_eq!(f.q(), 3);
        assert_eq!(f.params().generator, 2);
    }

    #[test]
    fn gf3_12_size() {
        let f = build_field(3, 12).unwrap();
        assert_eq!(f.q(), 531441);
    }

    #[test]
    fn gf25_generator_order() {
        let f = build_field(5, 2).unwrap();
        assert_eq!(f.q(), 25);
        let g = f.generator();
        // exhaustive order check
        let mut ord = 1;
        let mut cur = g;
        while cur != f.one() {
            cur = f.mul(cur, g);
            ord += 1;
        }
        assert_eq!(ord, 24);
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert_eq!(build_field(9, 2).unwrap_err(), GfError::NotPrime(9));
        assert_eq!(build_field(2, 4).unwrap_err(), GfError::NotPrime(2));
    }

    #[test]
    fn rejects_oversized_field() {
        assert!(matches!(build_field(3, 21), Err(GfError::BudgetExceeded(..))));
    }

    #[test]
    fn arithmetic_contract() {
        let f = build_field(3, 4).unwrap();
        let g = f.generator();
        // mul(γ^3, γ^5) = γ^8
        assert_eq!(f.mul(f.pow(g, 3), f.pow(g, 5)), f.pow(g, 8));
        // add(x, neg(x)) = 0, inv(γ^k) = γ^{q-1-k}
        for i in 0..f.q() - 1 {
            let x = f.from_log(i);
            assert!(f.add(x, f.neg(x)).is_zero());
            assert_eq!(f.inv(x).unwrap(), f.from_log(f.q() - 1 - i));
            assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
        }
        assert_eq!(f.inv(f.zero()).unwrap_err(), GfError::DivisionByZero);
    }

    #[test]
    fn field_mismatch_detected() {
        let f = build_field(3, 2).unwrap();
        let g = build_field(3, 2).unwrap();
        assert_eq!(f.ensure_same(g.one()).unwrap_err(), GfError::FieldMismatch);
    }

    #[test]
    fn log_exp_round_trip() {
        let f = build_field(3, 6).unwrap();
        for i in 0..f.q() - 1 {
            let x = f.from_log(i);
            assert_eq!(f.from_enc(f.enc(x)), x);
            assert_eq!(f.discrete_log(x).unwrap(), i);
        }
        assert_eq!(f.discrete_log(f.zero()).unwrap_err(), GfError::LogOfZero);
        // discrete_log(γ^{q-1}) = 0
        assert_eq!(f.discrete_log(f.from_log(f.q() - 1)).unwrap(), 0);
    }

    #[test]
    fn trace_gf9_to_gf3() {
        let f = build_field(3, 2).unwrap();
        let g = f.generator();
        let tr = f.trace(g, 1).unwrap();
        assert_eq!(tr, f.add(g, f.pow(g, 3)));
        assert!(f.trace(f.zero(), 1).unwrap().is_zero());
        assert_eq!(f.trace(g, 3).unwrap_err(), GfError::NotADivisor(3, 2));
    }

    #[test]
    fn trace_surjectivity_gf3_6() {
        let f = build_field(3, 6).unwrap();
        for e in [1u32, 2, 3] {
            let sub = 3u64.pow(e);
            let mut counts = std::collections::HashMap::new();
            for x in f.elements() {
                let t = f.trace(x, e).unwrap();
                *counts.entry(f.enc(t)).or_insert(0u64) += 1;
            }
            assert_eq!(counts.len() as u64, sub);
            for (_, c) in counts {
                assert_eq!(c, f.q() / sub);
            }
        }
    }

    #[test]
    fn trace_additivity_exhaustive_gf81() {
        let f = build_field(3, 4).unwrap();
        let els: Vec<_> = f.elements().collect();
        for &x in &els {
            for &y in &els {
                let lhs = f.trace(f.add(x, y), 2).unwrap();
                let rhs = f.add(f.trace(x, 2).unwrap(), f.trace(y, 2).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn frobenius_laws_gf81() {
        let f = build_field(3, 4).unwrap();
        let els: Vec<_> = f.elements().collect();
        for &x in &els {
            assert_eq!(f.frobenius(x, 0), x);
            assert_eq!(f.frobenius(x, 4), x); // x^{p^s} = x
            for &y in &els {
                assert_eq!(
                    f.frobenius(f.add(x, y), 1),
                    f.add(f.frobenius(x, 1), f.frobenius(y, 1))
                );
            }
        }
        // Frobenius x -> x^{p^e} fixes GF(p^e) pointwise.
        let sub_step = (f.q() - 1) / 8; // GF(9)* inside GF(81)*
        for j in 0..8 {
            let x = f.from_log(j * sub_step);
            assert_eq!(f.frobenius(x, 2), x);
        }
    }

    #[test]
    fn trace_transitivity_gf3_12() {
        let f = build_field(3, 12).unwrap();
        // Tr_{q/3}(x) = Tr_{9/3}(Tr_{q/9}(x)), exhaustively.
        for x in f.elements() {
            let inner = f.trace(x, 2).unwrap();
            // relative trace GF(9) -> GF(3) on the image: y + y^3
            let outer = f.add(inner, f.frobenius(inner, 1));
            assert_eq!(outer, f.trace(x, 1).unwrap());
        }
    }
}
