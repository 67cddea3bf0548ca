//! Exact arithmetic in `F_q` and `F_{q^m}`, and dense matrices over both.
//!
//! `F_q` elements are `u32` values whose base-`p` digits are the polynomial
//! coefficients modulo the base modulus. `F_{q^m}` elements are [`Felt`]
//! coordinate vectors in the basis `(1, beta, ..., beta^{m-1})`, where `beta`
//! is a root of the top modulus. Both moduli are the smallest monic
//! irreducible polynomials of their degree, reading the coefficient vector as
//! a base-`q` number with the constant term as the least significant digit.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::sync::Arc;

use itertools::Itertools;
use rand::Rng;

use crate::{Error, Result};

/// Largest `q` for which multiplication goes through log/exp tables.
const LOG_TABLE_LIMIT: u64 = 1 << 16;

/// Upper bound on the number of column subsets examined by
/// [`MatExt::all_maximal_minors_nonzero`].
pub const MINOR_BUDGET: u128 = 1_000_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[derive(Debug)]
enum MulKind {
    Prime,
    Log { exp: Vec<u32>, log: Vec<u32> },
    Poly,
}

/// The field `F_q`, `q = p^e`.
#[derive(Debug)]
pub struct Fq {
    p: u32,
    e: u32,
    q: u64,
    modulus: Vec<u32>,
    kind: MulKind,
}

impl Fq {
    pub fn new(p: u64, e: u32) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::Precondition("extension degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(e).filter(|&q| q <= 1u128 << 32);
        let Some(q) = q else {
            return Err(Error::FieldTooLarge(format!("{p}^{e} exceeds 2^32 base-field elements")));
        };
        let prime = Fq::prime(p as u32);
        if e == 1 {
            return Ok(prime);
        }
        let modulus = poly::smallest_irreducible(&prime, e as usize);
        let mut f = Fq { p: p as u32, e, q: q as u64, modulus, kind: MulKind::Poly };
        if f.q <= LOG_TABLE_LIMIT {
            f.kind = f.log_tables();
        }
        Ok(f)
    }

    fn prime(p: u32) -> Fq {
        Fq { p, e: 1, q: p as u64, modulus: vec![0, 1], kind: MulKind::Prime }
    }

    fn log_tables(&self) -> MulKind {
        let order = (self.q - 1) as usize;
        for g in 2..self.q as u32 {
            let mut exp = Vec::with_capacity(2 * order);
            let mut x = 1u32;
            for _ in 0..order {
                exp.push(x);
                x = self.poly_mul(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() != order {
                continue;
            }
            let mut log = vec![0u32; self.q as usize];
            for (i, &v) in exp.iter().enumerate() {
                log[v as usize] = i as u32;
            }
            exp.extend_from_within(..);
            return MulKind::Log { exp, log };
        }
        MulKind::Poly
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Base modulus over `F_p`, low-to-high, monic of degree `e`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0; self.e as usize];
        for x in d.iter_mut() {
            *x = a % self.p;
            a /= self.p;
        }
        d
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0u64, |acc, &x| acc * self.p as u64 + x as u64) as u32
    }

    fn digitwise(&self, a: u32, b: u32, f: impl Fn(u64, u64) -> u64) -> u32 {
        let (mut a, mut b) = (a as u64, b as u64);
        let p = self.p as u64;
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.e {
            out += f(a % p, b % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.e == 1 {
            ((a as u64 + b as u64) % self.p as u64) as u32
        } else {
            let p = self.p as u64;
            self.digitwise(a, b, |x, y| (x + y) % p)
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 || a == 0 {
            a
        } else if self.e == 1 {
            self.p - a
        } else {
            let p = self.p as u64;
            self.digitwise(a, 0, |x, _| (p - x) % p)
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            MulKind::Prime => ((a as u64 * b as u64) % self.p as u64) as u32,
            MulKind::Log { exp, log } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
            MulKind::Poly => self.poly_mul(a, b),
        }
    }

    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let e = self.e as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut t = vec![0u64; 2 * e - 1];
        for i in 0..e {
            for j in 0..e {
                t[i + j] = (t[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for d in (e..t.len()).rev() {
            let c = t[d];
            if c != 0 {
                for i in 0..e {
                    t[d - e + i] = (t[d - e + i] + (p - c) * self.modulus[i] as u64) % p;
                }
                t[d] = 0;
            }
        }
        let out: Vec<u32> = t[..e].iter().map(|&x| x as u32).collect();
        self.undigits(&out)
    }

    pub fn pow(&self, a: u32, mut k: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv_nz(a))
    }

    /// Inverse of an element known to be nonzero.
    pub(crate) fn inv_nz(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        match &self.kind {
            MulKind::Log { exp, log } => exp[(self.q - 1) as usize - log[a as usize] as usize],
            _ => self.pow(a, self.q - 2),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q as u32
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.q) as u32
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(1..self.q) as u32
    }
}

/// Polynomials over `F_q` as low-to-high coefficient vectors.
pub(crate) mod poly {
    use super::{prime_divisors, Fq};

    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(fq: &Fq, a: &[u32], f: &[u32]) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let df = f.len() - 1;
        let lead_inv = fq.inv_nz(f[df]);
        while r.len() > df {
            let d = r.len() - 1;
            let c = fq.mul(r[d], lead_inv);
            for i in 0..=df {
                r[d - df + i] = fq.sub(r[d - df + i], fq.mul(c, f[i]));
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(fq: &Fq, a: &[u32], b: &[u32], f: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut t = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                t[i + j] = fq.add(t[i + j], fq.mul(x, y));
            }
        }
        rem(fq, &t, f)
    }

    pub fn powmod(fq: &Fq, a: &[u32], mut k: u64, f: &[u32]) -> Vec<u32> {
        let mut base = rem(fq, a, f);
        let mut acc = rem(fq, &[1], f);
        while k > 0 {
            if k & 1 == 1 {
                acc = mulmod(fq, &acc, &base, f);
            }
            base = mulmod(fq, &base, &base, f);
            k >>= 1;
        }
        acc
    }

    pub fn gcd(fq: &Fq, a: &[u32], b: &[u32]) -> Vec<u32> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(fq, &a, &b);
            a = b;
            b = r;
        }
        a
    }

    fn sub(fq: &Fq, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; a.len().max(b.len())];
        for (i, x) in out.iter_mut().enumerate() {
            let u = a.get(i).copied().unwrap_or(0);
            let v = b.get(i).copied().unwrap_or(0);
            *x = fq.sub(u, v);
        }
        trim(&mut out);
        out
    }

    /// Rabin's test for a monic `f` of degree `d >= 1`.
    pub fn is_irreducible(fq: &Fq, f: &[u32]) -> bool {
        let d = f.len() - 1;
        let x = rem(fq, &[0, 1], f);
        // frob[i] = x^{q^i} mod f
        let mut frob = vec![x.clone()];
        for i in 1..=d {
            let next = powmod(fq, &frob[i - 1], fq.q(), f);
            frob.push(next);
        }
        if frob[d] != x {
            return false;
        }
        prime_divisors(d).into_iter().all(|r| {
            let g = sub(fq, &frob[d / r], &x);
            let h = gcd(fq, &g, f);
            h.len() == 1
        })
    }

    pub fn smallest_irreducible(fq: &Fq, d: usize) -> Vec<u32> {
        let q = fq.q() as u128;
        let total = q.pow(d as u32);
        for code in 0..total {
            let mut f = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                f.push((c % q) as u32);
                c /= q;
            }
            f.push(1);
            if d > 1 && f[0] == 0 {
                continue;
            }
            if is_irreducible(fq, &f) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

/// An element of `F_{q^m}` in the polynomial basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Felt {
    pub coeffs: Vec<u32>,
}

impl Felt {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// The field `F_{q^m}` over `F_q`.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    base: Arc<Fq>,
    m: usize,
    modulus: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &FieldCtx) -> bool {
        self.base.p == other.base.p && self.base.e == other.base.e && self.m == other.m
    }
}

impl Eq for FieldCtx {}

/// Builds `F_{p^{e m}}` as a degree-`m` extension of `F_{p^e}`.
pub fn make_field(p: u64, e: u32, m: usize) -> Result<FieldCtx> {
    FieldCtx::new(p, e, m)
}

impl FieldCtx {
    pub fn new(p: u64, e: u32, m: usize) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 || m == 0 {
            return Err(Error::Precondition("extension degrees must be at least 1".into()));
        }
        let size = (e as u64)
            .checked_mul(m as u64)
            .and_then(|em| u32::try_from(em).ok())
            .and_then(|em| (p as u128).checked_pow(em));
        if size.is_none_or(|s| s > 1u128 << 64) {
            return Err(Error::FieldTooLarge(format!("{p}^({e}*{m}) exceeds 2^64 elements")));
        }
        let base = Arc::new(Fq::new(p, e)?);
        Ok(FieldCtx::over(base, m))
    }

    /// Degree-`m` extension of an existing base field.
    pub fn over(base: Arc<Fq>, m: usize) -> FieldCtx {
        let modulus = poly::smallest_irreducible(&base, m);
        FieldCtx { base, m, modulus }
    }

    /// [`FieldCtx::over`] with the degree and size checks of [`FieldCtx::new`].
    pub fn try_over(base: Arc<Fq>, m: usize) -> Result<FieldCtx> {
        if m == 0 {
            return Err(Error::Precondition("extension degrees must be at least 1".into()));
        }
        let size = u32::try_from(m).ok().and_then(|m| (base.q as u128).checked_pow(m));
        if size.is_none_or(|s| s > 1u128 << 64) {
            return Err(Error::FieldTooLarge(format!("{}^{m} exceeds 2^64 elements", base.q)));
        }
        Ok(FieldCtx::over(base, m))
    }

    pub fn base(&self) -> &Fq {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<Fq> {
        Arc::clone(&self.base)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.base.q
    }

    /// Top modulus over `F_q`, low-to-high, monic of degree `m`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn size(&self) -> u128 {
        (self.base.q as u128).pow(self.m as u32)
    }

    pub fn zero(&self) -> Felt {
        Felt { coeffs: vec![0; self.m] }
    }

    pub fn one(&self) -> Felt {
        self.from_base(1)
    }

    pub fn from_base(&self, c: u32) -> Felt {
        let mut f = self.zero();
        f.coeffs[0] = c;
        f
    }

    pub fn from_coeffs(&self, coeffs: Vec<u32>) -> Result<Felt> {
        if coeffs.len() != self.m || coeffs.iter().any(|&c| c as u64 >= self.base.q) {
            return Err(Error::ContextMismatch);
        }
        Ok(Felt { coeffs })
    }

    pub fn beta(&self) -> Felt {
        self.reduce(vec![0, 1])
    }

    pub fn beta_pow(&self, j: u64) -> Felt {
        self.pow(&self.beta(), j as u128)
    }

    /// Element whose base-`q` digits are its coordinates.
    pub fn from_index(&self, mut idx: u128) -> Felt {
        let q = self.base.q as u128;
        let mut f = self.zero();
        for c in f.coeffs.iter_mut() {
            *c = (idx % q) as u32;
            idx /= q;
        }
        f
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Felt {
        Felt { coeffs: (0..self.m).map(|_| self.base.random(rng)).collect() }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Felt {
        loop {
            let f = self.random(rng);
            if !f.is_zero() {
                return f;
            }
        }
    }

    fn reduce(&self, mut t: Vec<u32>) -> Felt {
        let m = self.m;
        let fq = &self.base;
        for d in (m..t.len()).rev() {
            let c = t[d];
            if c != 0 {
                for i in 0..m {
                    t[d - m + i] = fq.sub(t[d - m + i], fq.mul(c, self.modulus[i]));
                }
            }
        }
        t.resize(m, 0);
        Felt { coeffs: t }
    }

    pub fn add(&self, a: &Felt, b: &Felt) -> Felt {
        let fq = &self.base;
        Felt { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| fq.add(x, y)).collect() }
    }

    pub fn sub(&self, a: &Felt, b: &Felt) -> Felt {
        let fq = &self.base;
        Felt { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| fq.sub(x, y)).collect() }
    }

    pub fn neg(&self, a: &Felt) -> Felt {
        Felt { coeffs: a.coeffs.iter().map(|&x| self.base.neg(x)).collect() }
    }

    pub fn scale(&self, c: u32, a: &Felt) -> Felt {
        Felt { coeffs: a.coeffs.iter().map(|&x| self.base.mul(c, x)).collect() }
    }

    pub fn mul(&self, a: &Felt, b: &Felt) -> Felt {
        let fq = &self.base;
        let mut t = vec![0u32; 2 * self.m - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                if y != 0 {
                    t[i + j] = fq.add(t[i + j], fq.mul(x, y));
                }
            }
        }
        self.reduce(t)
    }

    pub fn pow(&self, a: &Felt, mut k: u128) -> Felt {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Felt) -> Result<Felt> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv_nz(a))
    }

    pub(crate) fn inv_nz(&self, a: &Felt) -> Felt {
        self.pow(a, self.size() - 2)
    }

    /// `a^{[i]} = a^{q^i}`.
    pub fn frobenius(&self, a: &Felt, i: u64) -> Felt {
        let mut x = a.clone();
        for _ in 0..(i % self.m as u64) {
            x = self.pow(&x, self.base.q as u128);
        }
        x
    }

    pub fn belongs(&self, a: &Felt) -> bool {
        a.coeffs.len() == self.m && a.coeffs.iter().all(|&c| (c as u64) < self.base.q)
    }

    /// Checked arithmetic entry point.
    pub fn arith(&self, a: &Felt, b: &Felt, kind: Arith) -> Result<Felt> {
        if !self.belongs(a) || !self.belongs(b) {
            return Err(Error::ContextMismatch);
        }
        Ok(match kind {
            Arith::Add => self.add(a, b),
            Arith::Sub => self.sub(a, b),
            Arith::Mul => self.mul(a, b),
            Arith::Inv => self.inv(a)?,
            Arith::Pow(k) => self.pow(a, k),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arith {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u128),
}

/// Rank of the row-major `rows x cols` matrix in `a`, destroying it.
pub fn rank_in_place(fq: &Fq, a: &mut [u32], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in c..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = fq.inv_nz(a[r * cols + c]);
        for i in r + 1..rows {
            let f = a[i * cols + c];
            if f != 0 {
                let f = fq.mul(f, inv);
                for j in c..cols {
                    let v = fq.mul(f, a[r * cols + j]);
                    a[i * cols + j] = fq.sub(a[i * cols + j], v);
                }
            }
        }
        r += 1;
    }
    r
}

/// Dense row-major matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatFq {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl MatFq {
    pub fn zeros(rows: usize, cols: usize) -> MatFq {
        MatFq { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> MatFq {
        let mut m = MatFq::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> MatFq {
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        MatFq { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> MatFq {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        MatFq { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> MatFq {
        let mut t = MatFq::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn add(&self, fq: &Fq, other: &MatFq) -> MatFq {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| fq.add(a, b)).collect();
        MatFq { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, fq: &Fq, c: u32) -> MatFq {
        let data = self.data.iter().map(|&a| fq.mul(c, a)).collect();
        MatFq { rows: self.rows, cols: self.cols, data }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, fq: &Fq, c: u32, other: &MatFq) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = fq.add(*a, fq.mul(c, b));
        }
    }

    pub fn mul(&self, fq: &Fq, other: &MatFq) -> MatFq {
        assert_eq!(self.cols, other.rows);
        let mut out = MatFq::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = fq.add(out[(i, j)], fq.mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, fq: &Fq, v: &[u32]) -> Vec<u32> {
        (0..self.rows).map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| fq.add(acc, fq.mul(a, b)))).collect()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self, fq: &Fq) -> (MatFq, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| a[(i, c)] != 0) else {
                continue;
            };
            a.swap_rows(p, r);
            let inv = fq.inv_nz(a[(r, c)]);
            for j in c..a.cols {
                a[(r, j)] = fq.mul(inv, a[(r, j)]);
            }
            for i in 0..a.rows {
                let f = a[(i, c)];
                if i != r && f != 0 {
                    for j in c..a.cols {
                        let v = fq.mul(f, a[(r, j)]);
                        a[(i, j)] = fq.sub(a[(i, j)], v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    pub fn rank(&self, fq: &Fq) -> usize {
        rank_in_place(fq, &mut self.data.clone(), self.rows, self.cols)
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn kernel_basis(&self, fq: &Fq) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref(fq);
        let free = (0..self.cols).filter(|c| !pivots.contains(c));
        free.map(|f| {
            let mut v = vec![0u32; self.cols];
            v[f] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = fq.neg(r[(i, f)]);
            }
            v
        })
        .collect()
    }
}

impl Index<(usize, usize)> for MatFq {
    type Output = u32;

    fn index(&self, (i, j): (usize, usize)) -> &u32 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatFq {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u32 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for MatFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{}", self.row(i).iter().join(" "))?;
        }
        Ok(())
    }
}

/// Dense row-major matrix over `F_{q^m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatExt {
    rows: usize,
    cols: usize,
    data: Vec<Felt>,
}

impl MatExt {
    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> MatExt {
        MatExt { rows, cols, data: vec![ctx.zero(); rows * cols] }
    }

    pub fn identity(ctx: &FieldCtx, n: usize) -> MatExt {
        let mut g = MatExt::zeros(ctx, n, n);
        for i in 0..n {
            g[(i, i)] = ctx.one();
        }
        g
    }

    pub fn from_rows(rows: Vec<Vec<Felt>>) -> MatExt {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        MatExt { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Felt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Felt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> MatExt {
        let data = (0..self.rows).flat_map(|i| cols.iter().map(move |&j| (i, j))).map(|ij| self[ij].clone()).collect();
        MatExt { rows: self.rows, cols: cols.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> MatExt {
        let data = rows.iter().flat_map(|&i| self.row(i).iter().cloned()).collect();
        MatExt { rows: rows.len(), cols: self.cols, data }
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &MatExt) -> MatExt {
        assert_eq!(self.cols, other.rows);
        let mut out = MatExt::zeros(ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = ctx.mul(&self[(i, k)], &other[(k, j)]);
                    out[(i, j)] = ctx.add(&out[(i, j)], &v);
                }
            }
        }
        out
    }

    /// Product with a matrix over the base field.
    pub fn mul_fq(&self, ctx: &FieldCtx, b: &MatFq) -> MatExt {
        assert_eq!(self.cols, b.rows());
        let mut out = MatExt::zeros(ctx, self.rows, b.cols());
        for i in 0..self.rows {
            for k in 0..self.cols {
                for j in 0..b.cols() {
                    let c = b[(k, j)];
                    if c != 0 {
                        let v = ctx.scale(c, &self[(i, k)]);
                        out[(i, j)] = ctx.add(&out[(i, j)], &v);
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self, ctx: &FieldCtx) -> (MatExt, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            let inv = ctx.inv_nz(&a[(r, c)]);
            for j in c..a.cols {
                a[(r, j)] = ctx.mul(&inv, &a[(r, j)]);
            }
            for i in 0..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in c..a.cols {
                    let v = ctx.mul(&f, &a[(r, j)]);
                    a[(i, j)] = ctx.sub(&a[(i, j)], &v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        self.rref(ctx).1.len()
    }

    pub fn det(&self, ctx: &FieldCtx) -> Felt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut a = self.clone();
        let mut det = ctx.one();
        for c in 0..a.cols {
            let Some(p) = (c..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                return ctx.zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = ctx.neg(&det);
            }
            det = ctx.mul(&det, &a[(c, c)]);
            let inv = ctx.inv_nz(&a[(c, c)]);
            for i in c + 1..a.rows {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = ctx.mul(&a[(i, c)], &inv);
                for j in c..a.cols {
                    let v = ctx.mul(&f, &a[(c, j)]);
                    a[(i, j)] = ctx.sub(&a[(i, j)], &v);
                }
            }
        }
        det
    }

    /// True iff every `rows x rows` minor is nonzero.
    pub fn all_maximal_minors_nonzero(&self, ctx: &FieldCtx) -> Result<bool> {
        if self.rows > self.cols {
            return Err(Error::Dimension(format!("{} rows exceed {} columns", self.rows, self.cols)));
        }
        let subsets = binomial(self.cols, self.rows);
        if subsets > MINOR_BUDGET {
            return Err(Error::Budget(format!("{subsets} maximal minors exceed the budget of {MINOR_BUDGET}")));
        }
        Ok((0..self.cols).combinations(self.rows).all(|cols| self.select_cols(&cols).rank(ctx) == self.rows))
    }

    /// One solution of `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, ctx: &FieldCtx, b: &[Felt]) -> Option<Vec<Felt>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = MatExt::zeros(ctx, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref(ctx);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![ctx.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }
}

impl Index<(usize, usize)> for MatExt {
    type Output = Felt;

    fn index(&self, (i, j): (usize, usize)) -> &Felt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatExt {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Felt {
        &mut self.data[i * self.cols + j]
    }
}
