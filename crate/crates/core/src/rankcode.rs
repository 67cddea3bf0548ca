//! Rank-metric codes as sets of `m x n` matrices over `F_q`.
//!
//! Vector codes over `F_{q^m}` enter through [`psi`], which writes the
//! coordinates of entry `j` into column `j`. Minimum distance is found by
//! walking the message space in a `q`-ary Gray order, so consecutive
//! codewords differ by a multiple of one basis matrix.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rank_in_place, Felt, FieldCtx, Fq, MatExt, MatFq};
use crate::ferrers::FerrersDiagram;
use crate::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Budget for [`mrd_criterion_check`]: number of unitriangular matrices.
pub const CRITERION_BUDGET: u64 = 1 << 16;

/// `Psi_m`: column `j` holds the basis coordinates of `v[j]`.
pub fn psi(ctx: &FieldCtx, v: &[Felt]) -> MatFq {
    let mut a = MatFq::zeros(ctx.m(), v.len());
    for (j, x) in v.iter().enumerate() {
        for (i, &c) in x.coeffs.iter().enumerate() {
            a[(i, j)] = c;
        }
    }
    a
}

pub fn psi_inv(ctx: &FieldCtx, a: &MatFq) -> Result<Vec<Felt>> {
    if a.rows() != ctx.m() {
        return Err(Error::Dimension(format!("{} rows, field degree {}", a.rows(), ctx.m())));
    }
    Ok((0..a.cols()).map(|j| Felt { coeffs: (0..a.rows()).map(|i| a[(i, j)]).collect() }).collect())
}

/// A generator matrix over `F_{q^m}` with independent rows.
#[derive(Clone, Debug)]
pub struct ExtGenerator {
    ctx: FieldCtx,
    g: MatExt,
}

impl ExtGenerator {
    pub fn new(ctx: FieldCtx, g: MatExt) -> Result<ExtGenerator> {
        if g.rank(&ctx) != g.rows() {
            return Err(Error::Dimension("generator rows are dependent".into()));
        }
        Ok(ExtGenerator { ctx, g })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn matrix(&self) -> &MatExt {
        &self.g
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    pub fn encode(&self, u: &[Felt]) -> Vec<Felt> {
        let ctx = &self.ctx;
        (0..self.n())
            .map(|j| u.iter().enumerate().fold(ctx.zero(), |acc, (i, x)| ctx.add(&acc, &ctx.mul(x, &self.g[(i, j)]))))
            .collect()
    }

    /// `Psi_m(beta^j * row_i)`.
    pub fn expanded_row(&self, i: usize, j: usize) -> MatFq {
        let b = self.ctx.beta_pow(j as u64);
        let row: Vec<Felt> = self.g.row(i).iter().map(|x| self.ctx.mul(&b, x)).collect();
        psi(&self.ctx, &row)
    }
}

/// An `F_q`-linear code of `m x n` matrices.
#[derive(Clone, Debug)]
pub struct RankCode {
    fq: Arc<Fq>,
    m: usize,
    n: usize,
    basis: Vec<MatFq>,
    delta: usize,
    diagram: Option<FerrersDiagram>,
}

impl RankCode {
    /// Validated code: shapes agree, basis independent, support respected.
    pub fn new(
        fq: Arc<Fq>,
        m: usize,
        n: usize,
        basis: Vec<MatFq>,
        delta: usize,
        diagram: Option<FerrersDiagram>,
    ) -> Result<RankCode> {
        let code = RankCode::from_parts(fq, m, n, basis, delta, diagram)?;
        if code.flattened().rank(&code.fq) != code.basis.len() {
            return Err(Error::Dimension("basis matrices are dependent".into()));
        }
        if let Some(f) = &code.diagram {
            if let Some(i) = code.basis.iter().position(|b| !f.supports(b)) {
                return Err(Error::Precondition(format!("basis matrix {i} leaves the diagram")));
            }
        }
        Ok(code)
    }

    /// Shape-checked code that trusts nothing else; see [`certify`].
    pub fn from_parts(
        fq: Arc<Fq>,
        m: usize,
        n: usize,
        basis: Vec<MatFq>,
        delta: usize,
        diagram: Option<FerrersDiagram>,
    ) -> Result<RankCode> {
        if let Some(b) = basis.iter().find(|b| b.rows() != m || b.cols() != n) {
            return Err(Error::Dimension(format!("basis matrix is {}x{}, code is {m}x{n}", b.rows(), b.cols())));
        }
        if let Some(f) = &diagram {
            if (f.m(), f.n()) != (m, n) {
                return Err(Error::Dimension(format!("diagram is {}x{}, code is {m}x{n}", f.m(), f.n())));
            }
        }
        Ok(RankCode { fq, m, n, basis, delta, diagram })
    }

    pub fn zero(fq: Arc<Fq>, m: usize, n: usize, delta: usize, diagram: Option<FerrersDiagram>) -> RankCode {
        RankCode { fq, m, n, basis: Vec::new(), delta, diagram }
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    pub fn fq_arc(&self) -> Arc<Fq> {
        Arc::clone(&self.fq)
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[MatFq] {
        &self.basis
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn diagram(&self) -> Option<&FerrersDiagram> {
        self.diagram.as_ref()
    }

    pub fn with_delta(mut self, delta: usize) -> RankCode {
        self.delta = delta;
        self
    }

    /// Attaches `f` after checking shape and support.
    pub fn on_diagram(self, f: FerrersDiagram) -> Result<RankCode> {
        RankCode::new(self.fq, self.m, self.n, self.basis, self.delta, Some(f))
    }

    /// `k x mn` matrix whose rows are the flattened basis matrices.
    pub fn flattened(&self) -> MatFq {
        let data = self.basis.iter().flat_map(|b| b.data().iter().copied()).collect();
        MatFq::from_vec(self.basis.len(), self.m * self.n, data)
    }

    pub fn combination(&self, coeffs: &[u32]) -> MatFq {
        let mut out = MatFq::zeros(self.m, self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                out.add_scaled(&self.fq, *c, b);
            }
        }
        out
    }

    pub fn contains(&self, mat: &MatFq) -> bool {
        let mut rows = self.flattened().data().to_vec();
        rows.extend_from_slice(mat.data());
        let stacked = MatFq::from_vec(self.k() + 1, self.m * self.n, rows);
        stacked.rank(&self.fq) == self.k()
    }

    /// Same code with zero rows appended so every matrix has `m` rows.
    pub fn pad_rows(&self, m: usize) -> RankCode {
        assert!(m >= self.m, "cannot shrink a code by padding");
        let basis = self
            .basis
            .iter()
            .map(|b| {
                let mut data = b.data().to_vec();
                data.resize(m * self.n, 0);
                MatFq::from_vec(m, self.n, data)
            })
            .collect();
        RankCode { fq: self.fq_arc(), m, n: self.n, basis, delta: self.delta, diagram: None }
    }

    /// Basis of the same span in reduced echelon form (dependent rows dropped).
    pub fn reduced(&self) -> RankCode {
        let (r, piv) = self.flattened().rref(&self.fq);
        let basis = (0..piv.len()).map(|i| MatFq::from_vec(self.m, self.n, r.row(i).to_vec())).collect();
        RankCode { basis, ..self.clone() }
    }
}

/// Expands `G` into the `F_q`-code `{Psi_m(uG)}` with basis
/// `Psi_m(beta^j e_i G)`, rows outer and powers inner.
pub fn expand_generator(g: &ExtGenerator) -> Result<RankCode> {
    let ctx = g.ctx();
    let basis = (0..g.k()).flat_map(|i| (0..ctx.m()).map(move |j| (i, j))).map(|(i, j)| g.expanded_row(i, j)).collect();
    let delta = g.n() + 1 - g.k();
    RankCode::new(ctx.base_arc(), ctx.m(), g.n(), basis, delta, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMethod {
    Exhaustive,
    Sampled(u64),
    BoundOnly,
}

impl fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceMethod::Exhaustive => f.write_str("exhaustive"),
            DistanceMethod::Sampled(n) => write!(f, "sampled({n})"),
            DistanceMethod::BoundOnly => f.write_str("bound-only"),
        }
    }
}

/// Controls the distance search.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Codes with at most this many codewords are enumerated exhaustively.
    pub budget: u64,
    /// Random codewords drawn beyond the budget; defaults to `budget`.
    pub samples: Option<u64>,
    pub workers: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions { budget: DEFAULT_BUDGET, samples: None, workers: 1, seed: 0x5eed }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: u64) -> SearchOptions {
        SearchOptions { budget, ..SearchOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    /// `None` when the code has no nonzero codeword.
    pub distance: Option<usize>,
    pub method: DistanceMethod,
}

/// Minimum rank over nonzero codewords: exhaustive when `q^k <= budget`,
/// otherwise over `budget` distinct random codewords (an upper bound only).
pub fn min_rank_distance(code: &RankCode, budget: u64) -> (usize, DistanceMethod) {
    assert!(code.k() > 0, "distance of the zero code is undefined");
    let r = min_rank_distance_with(code, &SearchOptions::with_budget(budget));
    (r.distance.unwrap_or(0), r.method)
}

pub fn min_rank_distance_with(code: &RankCode, opts: &SearchOptions) -> DistanceReport {
    let k = code.k();
    if k == 0 {
        return DistanceReport { distance: None, method: DistanceMethod::Exhaustive };
    }
    let engine = Engine::new(code);
    let total = (code.fq.q() as u128).checked_pow(k as u32);
    let workers = opts.workers.max(1);
    match total {
        Some(total) if total <= opts.budget as u128 => {
            let d = parallel_min(workers, total, |lo, hi| engine.scan_gray(lo, hi));
            DistanceReport { distance: Some(d), method: DistanceMethod::Exhaustive }
        }
        _ => {
            let wanted = opts.samples.unwrap_or(opts.budget).max(1);
            let cap = total.map_or(u128::MAX, |t| t - 1);
            let count = (wanted as u128).min(cap) as usize;
            let messages = sample_messages(code.fq(), k, count, opts.seed);
            let d = parallel_min(workers, messages.len() as u128, |lo, hi| {
                messages[lo as usize..hi as usize].iter().map(|u| engine.rank_of(u)).min().unwrap_or(usize::MAX)
            });
            DistanceReport { distance: Some(d), method: DistanceMethod::Sampled(messages.len() as u64) }
        }
    }
}

fn sample_messages(fq: &Fq, k: usize, count: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: Vec<u32> = (0..k).map(|_| fq.random(&mut rng)).collect();
        if u.iter().any(|&x| x != 0) && seen.insert(u.clone()) {
            out.push(u);
        }
    }
    out
}

/// Splits `0..total` into contiguous ranges, one per worker, and takes the
/// minimum of the per-range results.
fn parallel_min<F>(workers: usize, total: u128, f: F) -> usize
where
    F: Fn(u128, u128) -> usize + Sync,
{
    let workers = (workers as u128).min(total.max(1)) as usize;
    if workers <= 1 {
        return f(0, total);
    }
    let bounds: Vec<u128> = (0..=workers).map(|w| total * w as u128 / workers as u128).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = bounds
            .windows(2)
            .map(|w| {
                let (lo, hi, f) = (w[0], w[1], &f);
                s.spawn(move || f(lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("distance worker panicked")).min().unwrap()
    })
}

/// Codeword arithmetic and rank, with a bit-packed path for `q = 2`.
enum Engine<'a> {
    Binary { basis: Vec<Vec<u64>>, q: u128 },
    Generic { code: &'a RankCode, q: u128 },
}

impl<'a> Engine<'a> {
    fn new(code: &'a RankCode) -> Engine<'a> {
        let fq = code.fq();
        let q = fq.q() as u128;
        if fq.q() == 2 && code.n.min(code.m) <= 64 {
            let wide = code.n > 64;
            let basis = code
                .basis
                .iter()
                .map(|b| {
                    let b = if wide { b.transpose() } else { b.clone() };
                    (0..b.rows())
                        .map(|i| b.row(i).iter().enumerate().fold(0u64, |acc, (j, &x)| acc | ((x as u64) << j)))
                        .collect()
                })
                .collect();
            Engine::Binary { basis, q }
        } else {
            Engine::Generic { code, q }
        }
    }

    fn q(&self) -> u128 {
        match self {
            Engine::Binary { q, .. } | Engine::Generic { q, .. } => *q,
        }
    }

    fn rank_of(&self, u: &[u32]) -> usize {
        match self {
            Engine::Binary { basis, .. } => {
                let mut rows = vec![0u64; basis[0].len()];
                for (c, b) in u.iter().zip(basis) {
                    if *c != 0 {
                        rows.iter_mut().zip(b).for_each(|(r, x)| *r ^= x);
                    }
                }
                binary_rank(&rows)
            }
            Engine::Generic { code, .. } => {
                let mut cw = code.combination(u).data().to_vec();
                rank_in_place(code.fq(), &mut cw, code.m, code.n)
            }
        }
    }

    /// Minimum rank over the Gray-order messages with index in `lo..hi`,
    /// skipping the zero message.
    fn scan_gray(&self, lo: u128, hi: u128) -> usize {
        if lo >= hi {
            return usize::MAX;
        }
        let q = self.q();
        let k = match self {
            Engine::Binary { basis, .. } => basis.len(),
            Engine::Generic { code, .. } => code.k(),
        };
        let mut digits = gray_digits(lo, q, k);
        let mut best = usize::MAX;
        match self {
            Engine::Binary { basis, .. } => {
                let mut rows = vec![0u64; basis[0].len()];
                for (c, b) in digits.iter().zip(basis) {
                    if *c != 0 {
                        rows.iter_mut().zip(b).for_each(|(r, x)| *r ^= x);
                    }
                }
                if lo != 0 {
                    best = binary_rank(&rows);
                }
                for t in lo + 1..hi {
                    let j = t.trailing_zeros() as usize;
                    rows.iter_mut().zip(&basis[j]).for_each(|(r, x)| *r ^= x);
                    best = best.min(binary_rank(&rows));
                    if best == 1 {
                        break;
                    }
                }
            }
            Engine::Generic { code, .. } => {
                let fq = code.fq();
                let mut cw = code.combination(&digits);
                let mut scratch = vec![0u32; code.m * code.n];
                let mut rank = |cw: &MatFq| {
                    scratch.copy_from_slice(cw.data());
                    rank_in_place(fq, &mut scratch, code.m, code.n)
                };
                if lo != 0 {
                    best = rank(&cw);
                }
                for t in lo + 1..hi {
                    let j = trailing_digits(t, q);
                    let old = digits[j];
                    let new = ((old as u128 + 1) % q) as u32;
                    digits[j] = new;
                    cw.add_scaled(fq, fq.sub(new, old), &code.basis[j]);
                    best = best.min(rank(&cw));
                    if best == 1 {
                        break;
                    }
                }
            }
        }
        best
    }
}

fn trailing_digits(mut t: u128, q: u128) -> usize {
    let mut j = 0;
    while t.is_multiple_of(q) {
        t /= q;
        j += 1;
    }
    j
}

/// Message at position `t` of the modular Gray order: `g_i = t_i - t_{i+1}`.
fn gray_digits(t: u128, q: u128, k: usize) -> Vec<u32> {
    let mut plain = Vec::with_capacity(k + 1);
    let mut x = t;
    for _ in 0..k {
        plain.push(x % q);
        x /= q;
    }
    plain.push(0);
    (0..k).map(|i| ((plain[i] + q - plain[i + 1]) % q) as u32).collect()
}

fn binary_rank(rows: &[u64]) -> usize {
    let mut piv = [0u64; 64];
    let mut r = 0;
    for &row in rows {
        let mut x = row;
        while x != 0 {
            let h = 63 - x.leading_zeros() as usize;
            if piv[h] == 0 {
                piv[h] = x;
                r += 1;
                break;
            }
            x ^= piv[h];
        }
    }
    r
}

/// `(1, beta, ..., beta^{n-1})`.
pub fn default_gabidulin_vector(ctx: &FieldCtx, n: usize) -> Vec<Felt> {
    (0..n as u64).map(|j| ctx.beta_pow(j)).collect()
}

/// Row `i` is `g^{[i]}`, `i < k`.
pub fn gabidulin_generator(ctx: &FieldCtx, g: &[Felt], k: usize) -> Result<ExtGenerator> {
    let n = g.len();
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if psi(ctx, g).rank(ctx.base()) != n {
        return Err(Error::Precondition("g is not linearly independent over F_q".into()));
    }
    let rows = (0..k as u64).map(|i| g.iter().map(|x| ctx.frobenius(x, i)).collect()).collect();
    ExtGenerator::new(ctx.clone(), MatExt::from_rows(rows))
}

/// Row-reduces `G` to `(I_k | A)`.
pub fn systematic_form(g: &ExtGenerator) -> Result<ExtGenerator> {
    let (r, pivots) = g.matrix().rref(g.ctx());
    if pivots != (0..g.k()).collect::<Vec<_>>() {
        return Err(Error::Precondition("leading k x k block is singular".into()));
    }
    Ok(ExtGenerator { ctx: g.ctx().clone(), g: r })
}

/// Every maximal minor of `GB` is nonzero for every upper unitriangular `B`
/// over `F_q`.
pub fn mrd_criterion_check(g: &ExtGenerator, budget: u64) -> Result<bool> {
    let ctx = g.ctx();
    let n = g.n();
    if ctx.m() < n {
        return Err(Error::Precondition(format!("criterion needs m >= n, got m = {}", ctx.m())));
    }
    let free: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let q = ctx.q() as u128;
    let count = q.checked_pow(free.len() as u32).filter(|&c| c <= budget as u128);
    let Some(count) = count else {
        return Err(Error::Budget(format!("{q}^{} unitriangular matrices exceed the budget of {budget}", free.len())));
    };
    for idx in 0..count {
        let mut b = MatFq::identity(n);
        let mut x = idx;
        for &cell in &free {
            b[cell] = (x % q) as u32;
            x /= q;
        }
        if !g.matrix().mul_fq(ctx, &b).all_maximal_minors_nonzero(ctx)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Systematic generator of a `[theta, theta-delta+1, delta]` Reed-Solomon
/// code over `F_q`, evaluated at `0, 1, ..., q-1` and, for `theta = q+1`,
/// the point at infinity.
pub fn mds_generator(fq: &Fq, theta: usize, delta: usize) -> Result<MatFq> {
    if delta == 0 || delta > theta {
        return Err(Error::Precondition(format!("need 1 <= delta <= theta, got {delta}, {theta}")));
    }
    if theta as u64 > fq.q() + 1 {
        return Err(Error::Precondition(format!("no Reed-Solomon code of length {theta} over F_{}", fq.q())));
    }
    let k = theta - delta + 1;
    let mut g = MatFq::zeros(k, theta);
    for j in 0..theta {
        if j as u64 == fq.q() {
            g[(k - 1, j)] = 1;
            continue;
        }
        for i in 0..k {
            g[(i, j)] = fq.pow(j as u32, i as u64);
        }
    }
    Ok(g.rref(fq).0)
}

/// Minimum Hamming weight of the nonzero codewords spanned by `g`.
pub fn hamming_min_distance(fq: &Fq, g: &MatFq) -> usize {
    let (k, n) = (g.rows(), g.cols());
    let q = fq.q() as u128;
    let mut best = usize::MAX;
    for idx in 1..q.pow(k as u32) {
        let mut x = idx;
        let u: Vec<u32> = (0..k)
            .map(|_| {
                let d = (x % q) as u32;
                x /= q;
                d
            })
            .collect();
        let w = (0..n).filter(|&j| (0..k).fold(0, |acc, i| fq.add(acc, fq.mul(u[i], g[(i, j)]))) != 0).count();
        best = best.min(w);
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Optimality {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Optimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimality::Yes => "true",
            Optimality::No => "false",
            Optimality::Unknown => "unknown(sampled)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub k_observed: usize,
    pub k_claimed: usize,
    pub support_ok: bool,
    pub delta_claimed: usize,
    pub distance_observed: Option<usize>,
    pub distance_method: DistanceMethod,
    pub bound_value: usize,
    pub optimal: Optimality,
}

impl Certificate {
    pub fn independent(&self) -> bool {
        self.k_observed == self.k_claimed
    }

    pub fn distance_ok(&self) -> bool {
        self.distance_observed.is_none_or(|d| d >= self.delta_claimed)
    }

    /// First failed claim, if any.
    pub fn failure(&self) -> Option<String> {
        if !self.independent() {
            return Some(format!(
                "dimension mismatch: {} basis matrices span dimension {}",
                self.k_claimed, self.k_observed
            ));
        }
        if !self.support_ok {
            return Some("support: a basis matrix has an entry outside the diagram".into());
        }
        if !self.distance_ok() {
            return Some(format!(
                "distance: found a codeword of rank {} < {}",
                self.distance_observed.unwrap_or(0),
                self.delta_claimed
            ));
        }
        if self.k_observed > self.bound_value {
            return Some(format!("bound: k = {} exceeds {}", self.k_observed, self.bound_value));
        }
        None
    }

    pub fn passes(&self) -> bool {
        self.failure().is_none()
    }
}

/// Checks dimension, support, distance and optimality of `code` on `f`.
pub fn certify(code: &RankCode, f: &FerrersDiagram, delta: usize, opts: &SearchOptions) -> Result<Certificate> {
    if (code.m(), code.n()) != (f.m(), f.n()) {
        return Err(Error::Dimension(format!("code is {}x{}, diagram is {}x{}", code.m(), code.n(), f.m(), f.n())));
    }
    let bound_value = f.bound(delta)?;
    let reduced = code.reduced();
    let k_observed = reduced.k();
    let support_ok = code.basis().iter().all(|b| f.supports(b));
    let report = min_rank_distance_with(&reduced, opts);
    let mut cert = Certificate {
        k_observed,
        k_claimed: code.k(),
        support_ok,
        delta_claimed: delta,
        distance_observed: report.distance,
        distance_method: report.method,
        bound_value,
        optimal: Optimality::No,
    };
    if cert.passes() && k_observed == bound_value {
        cert.optimal = match report.method {
            DistanceMethod::Exhaustive => Optimality::Yes,
            _ => Optimality::Unknown,
        };
    }
    Ok(cert)
}

/// Uniformly random message of length `k`.
pub fn random_message<R: Rng + ?Sized>(ctx: &FieldCtx, k: usize, rng: &mut R) -> Vec<Felt> {
    (0..k).map(|_| ctx.random(rng)).collect()
}
