//! Constructions of Ferrers diagram rank-metric codes.
//!
//! Each function takes a diagram and parameters and returns a [`RankCode`]
//! attached to that diagram, with `delta` set to the distance the
//! construction promises. Nothing here enumerates codewords; pass the result
//! to [`certify`](crate::rankcode::certify) for that.

use std::collections::HashSet;
use std::sync::Arc;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Felt, FieldCtx, Fq, MatExt, MatFq};
use crate::ferrers::{proper_combination_check, Cell, CellMap, FerrersDiagram};
use crate::rankcode::{
    default_gabidulin_vector, expand_generator, gabidulin_generator, mds_generator, psi, ExtGenerator, RankCode,
};
use crate::{Error, Result};

/// Gabidulin vectors tried by [`shorten_to_diagram`] per orientation.
const SHORTEN_ATTEMPTS: usize = 6;

fn precondition<T>(msg: String) -> Result<T> {
    Err(Error::Precondition(msg))
}

/// Promised distance, with the zero code imposing no constraint.
fn reach(code: &RankCode) -> usize {
    if code.k() == 0 {
        usize::MAX
    } else {
        code.delta()
    }
}

fn is_systematic(g: &ExtGenerator) -> bool {
    let (ctx, a) = (g.ctx(), g.matrix());
    (0..g.k()).all(|i| (0..g.k()).all(|j| a[(i, j)] == if i == j { ctx.one() } else { ctx.zero() }))
}

/// Subcode of the expanded code of `G = (I_k | A)` in which message `u_i`
/// keeps only its first `lambda[i]` coordinates. Basis order follows
/// [`expand_generator`].
pub fn subcode_select(g: &ExtGenerator, lambda: &[usize]) -> Result<RankCode> {
    let ctx = g.ctx();
    if lambda.len() != g.k() {
        return Err(Error::Dimension(format!("{} lengths for {} rows", lambda.len(), g.k())));
    }
    if let Some(&l) = lambda.iter().find(|&&l| l > ctx.m()) {
        return precondition(format!("length {l} exceeds the extension degree {}", ctx.m()));
    }
    if !is_systematic(g) {
        return precondition("generator is not of the form (I_k | A)".into());
    }
    let basis = lambda
        .iter()
        .enumerate()
        .flat_map(|(i, &l)| (0..l).map(move |j| (i, j)))
        .map(|(i, j)| g.expanded_row(i, j))
        .collect();
    RankCode::new(ctx.base_arc(), ctx.m(), g.n(), basis, g.n() + 1 - g.k(), None)
}

/// Keeps the first `rows` rows, which must carry every nonzero entry.
fn cut_rows(code: &RankCode, rows: usize) -> Result<Vec<MatFq>> {
    code.basis()
        .iter()
        .map(|b| {
            if b.data()[rows * b.cols()..].iter().any(|&x| x != 0) {
                return precondition(format!("a codeword reaches below row {rows}"));
            }
            Ok(MatFq::from_vec(rows, b.cols(), b.data()[..rows * b.cols()].to_vec()))
        })
        .collect()
}

fn nonzero_minors(fq: &Fq, a: &MatFq) -> bool {
    (1..=a.rows().min(a.cols())).all(|s| {
        (0..a.rows())
            .combinations(s)
            .all(|rows| (0..a.cols()).combinations(s).all(|cols| square_minor(fq, a, &rows, &cols)))
    })
}

fn square_minor(fq: &Fq, a: &MatFq, rows: &[usize], cols: &[usize]) -> bool {
    let data = rows.iter().flat_map(|&i| cols.iter().map(move |&j| a[(i, j)])).collect();
    MatFq::from_vec(rows.len(), cols.len(), data).rank(fq) == rows.len()
}

/// Coefficients `a_{i,j}` of a systematic generator with monomial entries,
/// stored as a `k x (n - k)` array over `F_q^*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SysMrdSpec {
    a: MatFq,
}

impl SysMrdSpec {
    pub fn new(fq: &Fq, rows: &[Vec<u32>]) -> Result<SysMrdSpec> {
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(Error::Dimension("coefficient rows are empty or ragged".into()));
        }
        if rows.iter().flatten().any(|&x| x == 0 || u64::from(x) >= fq.q()) {
            return precondition(format!("coefficients must be nonzero elements of F_{}", fq.q()));
        }
        Ok(SysMrdSpec { a: MatFq::from_rows(rows) })
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.rows() + self.a.cols()
    }

    pub fn coefficients(&self) -> &MatFq {
        &self.a
    }

    /// All rows, last column dropped.
    pub fn a1(&self) -> MatFq {
        let w = self.a.cols().saturating_sub(1);
        let data = (0..self.a.rows()).flat_map(|i| self.a.row(i)[..w].to_vec()).collect();
        MatFq::from_vec(self.a.rows(), w, data)
    }

    /// All columns, first row dropped.
    pub fn a2(&self) -> MatFq {
        let data = self.a.data()[self.a.cols()..].to_vec();
        MatFq::from_vec(self.a.rows() - 1, self.a.cols(), data)
    }

    /// Every minor of every order of `A1` and `A2` is nonzero.
    pub fn minors_nonzero(&self, fq: &Fq) -> bool {
        nonzero_minors(fq, &self.a1()) && nonzero_minors(fq, &self.a2())
    }
}

/// Minors of `A1`/`A2` whose bottom-right cell is `(i, j)`, all other cells
/// already assigned.
fn corner_minors_ok(fq: &Fq, a: &MatFq, i: usize, j: usize) -> bool {
    let w = a.cols();
    let check = |first_row: usize| {
        (1..=(i + 1 - first_row).min(j + 1)).all(|s| {
            (first_row..i).combinations(s - 1).all(|mut rows| {
                rows.push(i);
                (0..j).combinations(s - 1).all(|mut cols| {
                    cols.push(j);
                    square_minor(fq, a, &rows, &cols)
                })
            })
        })
    };
    (j + 1 == w || check(0)) && (i == 0 || check(1))
}

fn extend_search(fq: &Fq, a: &mut MatFq, pos: usize, visited: &mut u64, budget: u64) -> Result<bool> {
    let w = a.cols();
    if pos == a.rows() * w {
        return Ok(true);
    }
    let (i, j) = (pos / w, pos % w);
    for v in 1..fq.q() as u32 {
        *visited += 1;
        if *visited > budget {
            return Err(Error::Budget(format!("coefficient search visited {budget} nodes")));
        }
        a[(i, j)] = v;
        if corner_minors_ok(fq, a, i, j) && extend_search(fq, a, pos + 1, visited, budget)? {
            return Ok(true);
        }
    }
    a[(i, j)] = 0;
    Ok(false)
}

/// First coefficient array in lexicographic order (row-major, entries
/// `1..q-1`) whose `A1` and `A2` have only nonzero minors. Partial arrays are
/// pruned as soon as a completed minor vanishes; `budget` bounds the number
/// of assignments tried.
pub fn sys_mrd_search(fq: &Fq, n: usize, delta: usize, budget: u64) -> Result<Option<SysMrdSpec>> {
    if delta == 0 || delta > n {
        return precondition(format!("need 1 <= delta <= n, got delta = {delta}, n = {n}"));
    }
    let k = n - delta + 1;
    let mut a = MatFq::zeros(k, n - k);
    if n == k {
        return Ok(Some(SysMrdSpec { a }));
    }
    let mut visited = 0;
    Ok(extend_search(fq, &mut a, 0, &mut visited, budget)?.then_some(SysMrdSpec { a }))
}

/// The systematic generator with entry `a_{l,j} beta^{j-l}` in row `l`,
/// column `k <= j <= n-2`, and `a_{l,n-1} beta^n` (row 0) or
/// `a_{l,n-1} beta^{n-1-l}` (other rows) in the last column.
pub fn sys_mrd_build(ctx: &FieldCtx, n: usize, delta: usize, spec: &SysMrdSpec) -> Result<ExtGenerator> {
    let m = ctx.m();
    if delta == 0 || delta > n || n > m {
        return precondition(format!("need m >= n >= delta >= 1, got {m}, {n}, {delta}"));
    }
    let k = n - delta + 1;
    if (spec.k(), spec.n()) != (k, n) {
        return Err(Error::Dimension(format!(
            "coefficients are {}x{}, need {k}x{}",
            spec.k(),
            spec.n() - spec.k(),
            n - k
        )));
    }
    if m + k * k < k * n + 2 {
        return precondition(format!("extension degree {m} is below kn - k^2 + 2 = {}", k * n + 2 - k * k));
    }
    if !spec.minors_nonzero(ctx.base()) {
        return precondition("a minor of A1 or A2 vanishes".into());
    }
    let mut g = MatExt::identity(ctx, k).row_vecs();
    for (l, row) in g.iter_mut().enumerate() {
        row.resize(n, ctx.zero());
        for (j, entry) in row.iter_mut().enumerate().skip(k) {
            let power = match (j + 1 == n, l) {
                (false, _) => j - l,
                (true, 0) => n,
                (true, _) => n - 1 - l,
            };
            *entry = ctx.scale(spec.a[(l, j - k)], &ctx.beta_pow(power as u64));
        }
    }
    ExtGenerator::new(ctx.clone(), MatExt::from_rows(g))
}

/// Code on `f` from a generator built by [`sys_mrd_build`]: message `u_i`
/// keeps `gamma_i` coordinates, and the column heights of `f` beyond the
/// first `k` must be exactly the valid lengths those messages produce.
pub fn construct_from_sys_mrd(g: &ExtGenerator, f: &FerrersDiagram) -> Result<RankCode> {
    let (k, n, m) = (g.k(), g.n(), g.ctx().m());
    if f.n() != n {
        return Err(Error::Dimension(format!("diagram has {} columns, generator {n}", f.n())));
    }
    let gamma = f.gamma();
    if k < n {
        for i in k..n - 1 {
            let want = (0..k).map(|l| gamma[l] + i - l).max().unwrap().min(m);
            if gamma[i] != want {
                return precondition(format!("column {i} has {} dots, the generator fills exactly {want}", gamma[i]));
            }
        }
        let tail = (1..k).map(|l| gamma[l] + n - 1 - l).fold(gamma[0] + n, usize::max).min(m);
        if f.m() != tail {
            return precondition(format!("diagram has {} rows, the last column fills exactly {tail}", f.m()));
        }
    }
    let code = subcode_select(g, &gamma[..k])?;
    let basis = cut_rows(&code, f.m())?;
    RankCode::new(code.fq_arc(), f.m(), n, basis, n + 1 - k, Some(f.clone()))
}

/// Smallest extension degree allowed for [`vandermonde_mrd_build`].
pub fn vandermonde_min_degree(n: usize, k: usize) -> usize {
    let (n, k) = (n as i64, k as i64);
    let num = if n < 2 * k {
        let t = n - k;
        3 * (n - 1) * t * t + (3 * n + 1) * t - 4 * t * t * t
    } else {
        k * (3 * k * n - 4 * k * k - 3 * k + 3 * n + 1)
    };
    (num.max(0) as usize).div_ceil(6) + 1
}

/// Systematic generator whose row `l`, column `j >= k` holds
/// `beta^{(j-k+1)(k-l)}`.
pub fn vandermonde_mrd_build(ctx: &FieldCtx, n: usize, delta: usize) -> Result<ExtGenerator> {
    let m = ctx.m();
    if delta == 0 || delta > n || n > m {
        return precondition(format!("need m >= n >= delta >= 1, got {m}, {n}, {delta}"));
    }
    let k = n - delta + 1;
    let need = vandermonde_min_degree(n, k);
    if m < need {
        return precondition(format!("extension degree {m} is below {need}"));
    }
    let mut g = MatExt::identity(ctx, k).row_vecs();
    for (l, row) in g.iter_mut().enumerate() {
        row.extend((k..n).map(|j| ctx.beta_pow(((j - k + 1) * (k - l)) as u64)));
    }
    ExtGenerator::new(ctx.clone(), MatExt::from_rows(g))
}

fn candidate_vectors(ctx: &FieldCtx, n: usize) -> Vec<Vec<Felt>> {
    let first = default_gabidulin_vector(ctx, n);
    let mut out = vec![first.clone(), first.into_iter().rev().collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut tries = 0;
    while out.len() < SHORTEN_ATTEMPTS && tries < 64 {
        tries += 1;
        let g: Vec<Felt> = (0..n).map(|_| ctx.random(&mut rng)).collect();
        if psi(ctx, &g).rank(ctx.base()) == n && !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Subcode of the expanded Gabidulin code of `g` vanishing off the dots.
fn shorten_with(f: &FerrersDiagram, delta: usize, ctx: &FieldCtx, g: &[Felt]) -> Result<RankCode> {
    let full = expand_generator(&gabidulin_generator(ctx, g, f.n() + 1 - delta)?)?;
    let holes: Vec<Cell> = (0..f.m()).cartesian_product(0..f.n()).filter(|&c| !f.is_dot(c)).collect();
    let data = holes.iter().flat_map(|&c| full.basis().iter().map(move |b| b[c])).collect();
    let constraints = MatFq::from_vec(holes.len(), full.k(), data);
    let basis = constraints.kernel_basis(ctx.base()).iter().map(|x| full.combination(x)).collect();
    RankCode::new(ctx.base_arc(), f.m(), f.n(), basis, delta, Some(f.clone()))
}

/// Shortens an MRD code to `f` by forcing zeros at every non-dot, aiming
/// for the dimension bound. Works on the taller orientation of `f` and
/// retries with other Gabidulin vectors (and, for square diagrams, the
/// transpose) when the first attempt falls short.
pub fn shorten_to_diagram(f: &FerrersDiagram, delta: usize, fq: Arc<Fq>) -> Result<RankCode> {
    let target = f.bound(delta)?;
    if target == 0 {
        return Ok(RankCode::zero(fq, f.m(), f.n(), delta, Some(f.clone())));
    }
    let t = f.transpose();
    let flips: &[bool] = match f.m().cmp(&f.n()) {
        std::cmp::Ordering::Greater => &[false],
        std::cmp::Ordering::Equal => &[false, true],
        std::cmp::Ordering::Less => &[true],
    };
    let mut best = 0;
    for &flip in flips {
        let d = if flip { &t } else { f };
        let ctx = FieldCtx::try_over(Arc::clone(&fq), d.m())?;
        for g in candidate_vectors(&ctx, d.n()) {
            let code = shorten_with(d, delta, &ctx, &g)?;
            if code.k() < target {
                best = best.max(code.k());
                continue;
            }
            if !flip {
                return Ok(code);
            }
            let basis = code.basis().iter().map(|b| t.transpose_matrix(b)).collect();
            return RankCode::new(fq, f.m(), f.n(), basis, delta, Some(f.clone()));
        }
    }
    Err(Error::Dimension(format!("shortening reached k = {best}, the bound is {target}")))
}

/// One Reed-Solomon code per diagonal (all `m + n - 1` of them), its
/// coordinates laid on the diagonal's dots from the top down.
pub fn mds_diagonal_construct(f: &FerrersDiagram, delta: usize, fq: Arc<Fq>) -> Result<RankCode> {
    if delta == 0 || delta > f.n() {
        return precondition(format!("need 1 <= delta <= n = {}, got {delta}", f.n()));
    }
    let mut basis = Vec::new();
    for i in 0..f.diagonal_count() {
        let cells = f.diagonal(i);
        if cells.len() < delta {
            continue;
        }
        if cells.len() as u64 > fq.q() + 1 {
            return precondition(format!(
                "diagonal {i} has {} dots, which needs q >= {}",
                cells.len(),
                cells.len() - 1
            ));
        }
        let g = mds_generator(&fq, cells.len(), delta)?;
        for row in 0..g.rows() {
            let mut mat = MatFq::zeros(f.m(), f.n());
            for (c, &cell) in cells.iter().enumerate() {
                mat[cell] = g[(row, c)];
            }
            basis.push(mat);
        }
    }
    RankCode::new(fq, f.m(), f.n(), basis, delta, Some(f.clone()))
}

/// Parameters of the staircase generator and of the subcode built on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GabSubcodeSpec {
    pub eta: usize,
    pub r: usize,
    pub d: usize,
    pub kappa: usize,
    pub mu: usize,
    /// Block heights minus one, one per `l < r`.
    pub s: Vec<usize>,
    /// Coordinates kept in message `u_l`, one per row of the generator.
    pub lambda: Vec<usize>,
}

impl GabSubcodeSpec {
    /// Generator parameters only; `kappa = eta - r - d + 1`.
    pub fn engine(eta: usize, r: usize, d: usize, mu: usize) -> Result<GabSubcodeSpec> {
        if d == 0 || eta < r + d {
            return precondition(format!("need d >= 1 and eta >= r + d, got eta = {eta}, r = {r}, d = {d}"));
        }
        let spec = GabSubcodeSpec { eta, r, d, kappa: eta - r - d + 1, mu, s: Vec::new(), lambda: Vec::new() };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.kappa + self.r + self.d != self.eta + 1 {
            return precondition(format!("kappa = {} is not eta - r - d + 1", self.kappa));
        }
        if self.r >= self.kappa {
            return precondition(format!("need r < kappa, got r = {}, kappa = {}", self.r, self.kappa));
        }
        if self.eta > self.mu + self.r {
            return precondition(format!("need eta <= mu + r, got eta = {}, mu = {}", self.eta, self.mu));
        }
        if !self.s.is_empty() && (self.s.len() != self.r || self.s.windows(2).any(|w| w[0] > w[1])) {
            return precondition(format!("s = {:?} is not a nondecreasing sequence of length r", self.s));
        }
        Ok(())
    }
}

fn row_sub(ctx: &FieldCtx, a: &[Felt], b: &[Felt]) -> Vec<Felt> {
    a.iter().zip(b).map(|(x, y)| ctx.sub(x, y)).collect()
}

fn row_axpy(ctx: &FieldCtx, a: &[Felt], t: &Felt, b: &[Felt]) -> Vec<Felt> {
    a.iter().zip(b).map(|(x, y)| ctx.add(x, &ctx.mul(t, y))).collect()
}

/// One column-adding step on rows whose block below row `i` consists of
/// Frobenius powers of a single row.
fn staircase_step(ctx: &FieldCtx, rows: &mut [Vec<Felt>], i: usize) -> Result<()> {
    let kappa = rows.len();
    for l in i + 1..kappa {
        rows[l] = row_sub(ctx, &rows[l], &rows[i]);
    }
    let system =
        MatExt::from_rows((i + 1..kappa).map(|c| (i + 1..kappa).map(|l| rows[l][c].clone()).collect()).collect());
    let rhs: Vec<Felt> = (i + 1..kappa).map(|c| ctx.neg(&rows[i][c])).collect();
    let t = system
        .solve(ctx, &rhs)
        .ok_or_else(|| Error::Precondition(format!("step {i}: no row combination clears row {i}")))?;
    for (x, l) in t.iter().zip(i + 1..kappa) {
        rows[i] = row_axpy(ctx, &rows[i], x, &rows[l]);
    }
    for l in (i + 2..kappa).rev() {
        rows[l] = row_sub(ctx, &rows[l], &rows[l - 1]);
    }
    let f = &rows[i + 1][i + 1..];
    let rank = psi(ctx, f).rank(ctx.base());
    let extra = (0..ctx.m() as u64)
        .map(|j| ctx.beta_pow(j))
        .find(|b| {
            let mut v = f.to_vec();
            v.push(b.clone());
            psi(ctx, &v).rank(ctx.base()) > rank
        })
        .ok_or_else(|| Error::Precondition(format!("step {i}: no independent element left")))?;
    for (l, row) in rows.iter_mut().enumerate() {
        row.push(if l <= i { ctx.zero() } else { ctx.frobenius(&extra, (l - i - 1) as u64) });
    }
    for row in rows.iter_mut().skip(i + 1) {
        let p = ctx.inv(&row[i + 1])?;
        *row = row.iter().map(|x| ctx.mul(x, &p)).collect();
    }
    Ok(())
}

/// The `kappa x eta` staircase generator over `F_{q^mu}`: a Gabidulin code
/// of length `eta - r` grown by `r` columns, row `l < r` vanishing from
/// column `eta - r + l` on, and `(I_kappa | A)` on the left.
pub fn gab_subcode_matrix(ctx: &FieldCtx, spec: &GabSubcodeSpec) -> Result<ExtGenerator> {
    spec.check()?;
    if ctx.m() != spec.mu {
        return Err(Error::Dimension(format!("field degree {} but mu = {}", ctx.m(), spec.mu)));
    }
    let (kappa, r) = (spec.kappa, spec.r);
    let g0 = gabidulin_generator(ctx, &default_gabidulin_vector(ctx, spec.eta - r), kappa)?;
    let mut rows = g0.matrix().row_vecs();
    for i in 0..r {
        staircase_step(ctx, &mut rows, i)?;
    }
    let (bottom, pivots) = MatExt::from_rows(rows[r..].to_vec()).rref(ctx);
    if pivots != (r..kappa).collect::<Vec<_>>() {
        return precondition("lower block does not reduce to the identity".into());
    }
    rows.splice(r.., bottom.row_vecs());
    ExtGenerator::new(ctx.clone(), MatExt::from_rows(rows))
}

/// Rows `i..kappa` and columns `i..eta-r+i` of the staircase generator.
pub fn staircase_block(g: &ExtGenerator, spec: &GabSubcodeSpec, i: usize) -> Result<ExtGenerator> {
    let a = g
        .matrix()
        .select_rows(&(i..spec.kappa).collect::<Vec<_>>())
        .select_cols(&(i..spec.eta - spec.r + i).collect::<Vec<_>>());
    ExtGenerator::new(g.ctx().clone(), a)
}

/// Subcode of the staircase generator on `f`: the top `n - r` rows carry
/// `Psi(uG)`, and column `n - r + t` continues below them with the first
/// `s_l + 1` coordinates of `u_t, u_{t-1}, ..., u_0`, stacked without gaps.
pub fn construct_gab_subcode(f: &FerrersDiagram, delta: usize, r: usize, fq: Arc<Fq>) -> Result<RankCode> {
    let n = f.n();
    if r == 0 || delta < r + 1 || delta + r > n {
        return precondition(format!("need r + 1 <= delta <= n - r, got r = {r}, delta = {delta}, n = {n}"));
    }
    let mu = n - r;
    let gamma = f.gamma();
    if let Some(j) = (n + 1 - delta..n).find(|&j| gamma[j] < mu) {
        return precondition(format!("column {j} has {} dots, fewer than n - r = {mu}", gamma[j]));
    }
    let mut s: Vec<usize> = Vec::with_capacity(r);
    let mut used = 0;
    for l in 0..r {
        let room = gamma[n - r + l] as i64 - (mu + used) as i64 - 1;
        let sl = (gamma[l].min(mu) as i64 - 1).min(room);
        if sl < 0 {
            return precondition(format!("s_{l} = {sl} is negative"));
        }
        let sl = sl as usize;
        if s.last().is_some_and(|&p| sl < p) {
            return precondition(format!("s_{l} = {sl} drops below s_{} = {}", l - 1, s[l - 1]));
        }
        s.push(sl);
        used += sl + 1;
    }
    let kappa = n + 1 - delta;
    let lambda = (0..kappa).map(|l| if l < r { s[l] + 1 } else { gamma[l].min(mu) }).collect();
    let spec = GabSubcodeSpec { eta: n, r, d: delta - r, kappa, mu, s, lambda };
    let ctx = FieldCtx::try_over(fq, mu)?;
    let g = gab_subcode_matrix(&ctx, &spec)?;
    let mut basis = Vec::new();
    for (l, &len) in spec.lambda.iter().enumerate() {
        for j in 0..len {
            let top = g.expanded_row(l, j);
            let mut mat = MatFq::zeros(f.m(), n);
            place(&mut mat, &top, 0, 0);
            for t in l..r.max(l) {
                let offset = mu + (l + 1..=t).map(|x| spec.s[x] + 1).sum::<usize>();
                mat[(offset + j, n - r + t)] = 1;
            }
            basis.push(mat);
        }
    }
    RankCode::new(ctx.base_arc(), f.m(), n, basis, delta, Some(f.clone()))
}

/// Smallest `r` for which `f` meets the optimality conditions of the
/// staircase subcode: `gamma_{n-r-1} <= n - r`, the last `r` columns tall
/// enough for every block, and the last `delta - 1` columns holding at
/// least `n - r` dots.
pub fn optimal_subcode_r(f: &FerrersDiagram, delta: usize) -> Option<usize> {
    let (n, gamma) = (f.n(), f.gamma());
    (1..delta).find(|&r| {
        r + delta <= n
            && gamma[n - r - 1] <= n - r
            && (0..r).all(|i| gamma[n - r + i] >= n - r + gamma[..=i].iter().sum::<usize>())
            && (n + 1 - delta..n).all(|i| gamma[i] >= n - r)
    })
}

pub fn optimal_gab_subcode(f: &FerrersDiagram, delta: usize, fq: Arc<Fq>) -> Result<RankCode> {
    match optimal_subcode_r(f, delta) {
        Some(r) => construct_gab_subcode(f, delta, r, fq),
        None => precondition(format!("no r in 1..{delta} satisfies the staircase conditions on {f}")),
    }
}

/// A code of dimension at least `want` on `f`: the staircase subcode with
/// `r = 1` when it gets there, shortening otherwise.
fn fit_code(f: &FerrersDiagram, delta: usize, fq: &Arc<Fq>, want: usize) -> Result<RankCode> {
    if let Ok(code) = construct_gab_subcode(f, delta, 1, Arc::clone(fq)) {
        if code.k() >= want {
            return Ok(code);
        }
    }
    let code = shorten_to_diagram(f, delta, Arc::clone(fq))?;
    if code.k() < want {
        return Err(Error::Dimension(format!("reached k = {} on {f}, need {want}", code.k())));
    }
    Ok(code)
}

/// What goes in the top-right block of [`combine_block`].
#[derive(Clone, Debug)]
pub enum BlockFill {
    Code(RankCode),
    /// A full `m x n` block carrying a shortened MRD code.
    FullMrd {
        m: usize,
        n: usize,
        delta: usize,
    },
}

fn diagram_of(code: &RankCode) -> Result<&FerrersDiagram> {
    code.diagram().ok_or_else(|| Error::Precondition("code carries no diagram".into()))
}

/// `F1` top-left, `D` top-right widened to the left as little as needed,
/// `F2` right-aligned under `D`.
pub fn block_diagram(f1: &FerrersDiagram, f2: &FerrersDiagram, d: &FerrersDiagram) -> Result<FerrersDiagram> {
    let (m3, n3) = (d.m(), d.n());
    if m3 < f1.m() || n3 < f2.n() {
        return precondition(format!("the {m3}x{n3} block must be at least {} tall and {} wide", f1.m(), f2.n()));
    }
    let off = n3 - f2.n();
    let mut gamma = f1.gamma().to_vec();
    for j in 0..n3 {
        let prev = *gamma.last().unwrap();
        gamma.push(if j >= off { m3 + f2.gamma()[j - off] } else { d.gamma()[j].max(prev) });
    }
    FerrersDiagram::new(gamma)
}

fn place(dst: &mut MatFq, src: &MatFq, r0: usize, c0: usize) {
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            dst[(r0 + i, c0 + j)] = src[(i, j)];
        }
    }
}

/// `{(X, D; 0, phi(X))}` with `phi` pairing the bases of `c1` and `c2` by
/// index and `D` ranging over the block code.
pub fn combine_block(c1: &RankCode, c2: &RankCode, fill: &BlockFill) -> Result<RankCode> {
    let c3 = match fill {
        BlockFill::Code(c) => c.clone(),
        BlockFill::FullMrd { m, n, delta } => shorten_to_diagram(&FerrersDiagram::full(*m, *n), *delta, c1.fq_arc())?,
    };
    if c1.k() != c2.k() {
        return Err(Error::Dimension(format!("paired codes have dimensions {} and {}", c1.k(), c2.k())));
    }
    let f = block_diagram(diagram_of(c1)?, diagram_of(c2)?, diagram_of(&c3)?)?;
    let (n1, m3) = (c1.n(), c3.m());
    let c2_col = f.n() - c2.n();
    let mut basis = Vec::with_capacity(c1.k() + c3.k());
    for (x, y) in c1.basis().iter().zip(c2.basis()) {
        let mut mat = MatFq::zeros(f.m(), f.n());
        place(&mut mat, x, 0, 0);
        place(&mut mat, y, m3, c2_col);
        basis.push(mat);
    }
    for d in c3.basis() {
        let mut mat = MatFq::zeros(f.m(), f.n());
        place(&mut mat, d, 0, n1);
        basis.push(mat);
    }
    let delta = reach(c1).saturating_add(reach(c2)).min(reach(&c3));
    RankCode::new(c1.fq_arc(), f.m(), f.n(), basis, delta, Some(f))
}

/// A sub-diagram of `F` together with the cells of `F` its dots occupy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub diagram: FerrersDiagram,
    pub at: CellMap,
}

impl Part {
    /// `diagram` sitting in `F` with its top-left corner at `(r0, c0)`.
    pub fn window(diagram: FerrersDiagram, r0: usize, c0: usize) -> Part {
        let at = CellMap::new(diagram.dots().into_iter().map(|(i, j)| ((i, j), (i + r0, j + c0))).collect());
        Part { diagram, at }
    }

    fn dims(part: Option<&Part>) -> (usize, usize) {
        part.map_or((0, 0), |p| (p.diagram.m(), p.diagram.n()))
    }
}

fn check_parts(f: &FerrersDiagram, parts: &[&Part]) -> Result<()> {
    let mut seen = HashSet::new();
    for part in parts {
        part.at.check(&part.diagram, f)?;
        if let Some(&(_, t)) = part.at.pairs().iter().find(|&&(_, t)| !seen.insert(t)) {
            return Err(Error::CellMap(format!("two parts claim cell {t:?}")));
        }
    }
    Ok(())
}

fn check_quadrants(f: &FerrersDiagram, d: [(usize, usize); 4]) -> Result<()> {
    let [(m1, n1), (m2, n2), (m3, n3), (m4, n4)] = d;
    if f.m() != m3 + m4 || f.n() != n1 + n4 || m4 < m1 + m2 || n4 < n2 + n3 {
        return precondition(format!(
            "part shapes {m1}x{n1}, {m2}x{n2}, {m3}x{n3}, {m4}x{n4} do not tile a {}x{} diagram",
            f.m(),
            f.n()
        ));
    }
    Ok(())
}

fn check_code_on(code: &RankCode, d: &FerrersDiagram, name: &str) -> Result<()> {
    if diagram_of(code)? != d {
        return precondition(format!("{name} lives on {}, expected {d}", diagram_of(code)?));
    }
    Ok(())
}

fn ensure_combination(parts: &[(&FerrersDiagram, &CellMap)], comb: &FerrersDiagram) -> Result<()> {
    if !proper_combination_check(parts, comb)? {
        return precondition(format!("{comb} is not a proper combination of the parts"));
    }
    Ok(())
}

/// Pulls codes back onto `f`: each map sends cells of `f` to cells of its
/// code's matrices.
fn assemble(f: &FerrersDiagram, fq: Arc<Fq>, delta: usize, sources: &[(&RankCode, &CellMap)]) -> Result<RankCode> {
    let mut basis = Vec::new();
    for (code, psi) in sources {
        let covered: HashSet<Cell> = psi.pairs().iter().map(|p| p.1).collect();
        for b in code.basis() {
            let lost = (0..b.rows()).cartesian_product(0..b.cols()).find(|&c| b[c] != 0 && !covered.contains(&c));
            if let Some(c) = lost {
                return precondition(format!("entry {c:?} of a part codeword has no cell in the diagram"));
            }
            let mut mat = MatFq::zeros(f.m(), f.n());
            for &(cell, src) in psi.pairs() {
                mat[cell] = b[src];
            }
            basis.push(mat);
        }
    }
    RankCode::new(fq, f.m(), f.n(), basis, delta, Some(f.clone()))
}

fn compose(part: &Part, inner: &CellMap) -> Vec<(Cell, Cell)> {
    part.at.pairs().iter().filter_map(|&(s, t)| inner.get(s).map(|u| (t, u))).collect()
}

fn truncate(code: &RankCode, k: usize) -> Result<RankCode> {
    RankCode::new(code.fq_arc(), code.m(), code.n(), code.basis()[..k].to_vec(), code.delta(), code.diagram().cloned())
}

/// Parts for [`combine_com1`]: `F1` and `F2` combine into the diagram of
/// `C12` through `phi1` and `phi2`.
#[derive(Clone, Debug)]
pub struct Com1Parts {
    pub f1: Part,
    pub f2: Option<Part>,
    pub f3: Part,
    pub f4: Part,
    pub phi1: CellMap,
    pub phi2: CellMap,
}

/// Builds the block code on `F* = (F12, F4; ., F3)` and moves it back onto
/// `f` cell by cell.
pub fn combine_com1(
    f: &FerrersDiagram,
    parts: &Com1Parts,
    c12: &RankCode,
    c3: &RankCode,
    c4: &RankCode,
) -> Result<RankCode> {
    let mut placed = vec![&parts.f1, &parts.f3, &parts.f4];
    placed.extend(parts.f2.as_ref());
    check_parts(f, &placed)?;
    let (m4, n4) = Part::dims(Some(&parts.f4));
    let (m3, n3) = Part::dims(Some(&parts.f3));
    check_quadrants(f, [Part::dims(Some(&parts.f1)), Part::dims(parts.f2.as_ref()), (m3, n3), (m4, n4)])?;
    let f12 = diagram_of(c12)?;
    let mut comb = vec![(&parts.f1.diagram, &parts.phi1)];
    if let Some(p2) = &parts.f2 {
        comb.push((&p2.diagram, &parts.phi2));
    }
    ensure_combination(&comb, f12)?;
    check_code_on(c3, &parts.f3.diagram, "C3")?;
    check_code_on(c4, &parts.f4.diagram, "C4")?;
    let k = c12.k().min(c3.k());
    let star = combine_block(&truncate(c12, k)?, &truncate(c3, k)?, &BlockFill::Code(c4.clone()))?;
    let n12 = f12.n();
    let mut psi = compose(&parts.f1, &parts.phi1);
    if let Some(p2) = &parts.f2 {
        psi.extend(compose(p2, &parts.phi2));
    }
    psi.extend(parts.f4.at.pairs().iter().map(|&((i, j), t)| (t, (i, n12 + j))));
    psi.extend(parts.f3.at.pairs().iter().map(|&((i, j), t)| (t, (m4 + i, n12 + n4 - n3 + j))));
    assemble(f, c12.fq_arc(), star.delta(), &[(&star, &CellMap::new(psi))])
}

/// Parts for [`combine_com2`]: up to three parts combine into the diagram
/// of `C123`.
#[derive(Clone, Debug)]
pub struct Com2Parts {
    pub f1: Part,
    pub f2: Option<Part>,
    pub f3: Option<Part>,
    pub f4: Part,
    pub phi1: CellMap,
    pub phi2: CellMap,
    pub phi3: CellMap,
}

/// `C123` pulled back through the combination maps plus `C4` in place.
pub fn combine_com2(f: &FerrersDiagram, parts: &Com2Parts, c123: &RankCode, c4: &RankCode) -> Result<RankCode> {
    let mut placed = vec![&parts.f1, &parts.f4];
    placed.extend(parts.f2.as_ref());
    placed.extend(parts.f3.as_ref());
    check_parts(f, &placed)?;
    check_quadrants(
        f,
        [
            Part::dims(Some(&parts.f1)),
            Part::dims(parts.f2.as_ref()),
            Part::dims(parts.f3.as_ref()),
            Part::dims(Some(&parts.f4)),
        ],
    )?;
    let members: Vec<(&Part, &CellMap)> =
        [(Some(&parts.f1), &parts.phi1), (parts.f2.as_ref(), &parts.phi2), (parts.f3.as_ref(), &parts.phi3)]
            .into_iter()
            .filter_map(|(p, phi)| p.map(|p| (p, phi)))
            .collect();
    let comb: Vec<_> = members.iter().map(|(p, phi)| (&p.diagram, *phi)).collect();
    ensure_combination(&comb, diagram_of(c123)?)?;
    check_code_on(c4, &parts.f4.diagram, "C4")?;
    let psi1 = CellMap::new(members.iter().flat_map(|(p, phi)| compose(p, phi)).collect());
    let psi2 = CellMap::new(parts.f4.at.pairs().iter().map(|&(s, t)| (t, s)).collect());
    let delta = reach(c123).min(reach(c4));
    assemble(f, c123.fq_arc(), delta, &[(c123, &psi1), (c4, &psi2)])
}

/// The diagram of the two-block recipe: `n - y` columns of height
/// `delta - 1`, then `y - delta + 1` columns of height `delta - 1 + z_t`,
/// then `delta - 2` columns of height `y - 1` and a full last column.
pub fn thm_com1_diagram(m: usize, n: usize, y: usize, delta: usize, z: &[usize]) -> Result<FerrersDiagram> {
    if delta < 2 || y < delta || y + delta > m + 2 || y + delta + 1 > n {
        return precondition(format!(
            "need 2 <= delta <= y <= min(m - delta + 2, n - delta - 1), got m = {m}, n = {n}, y = {y}, delta = {delta}"
        ));
    }
    if z.len() != y - delta + 1 || z.iter().any(|&h| h > y - delta) || z.windows(2).any(|w| w[0] > w[1]) {
        return precondition(format!(
            "z = {z:?} must be {} nondecreasing heights of at most {}",
            y - delta + 1,
            y - delta
        ));
    }
    if z[0] > n - y {
        return precondition(format!("z_0 = {} exceeds n - y = {}", z[0], n - y));
    }
    let mut gamma = vec![delta - 1; n - y];
    gamma.extend(z.iter().map(|&h| delta - 1 + h));
    gamma.extend(std::iter::repeat_n(y - 1, delta - 2));
    gamma.push(m);
    FerrersDiagram::new(gamma)
}

/// Which part fills a row of `F123` in the two-block recipe.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Row123 {
    F1(usize),
    F2,
    F3,
}

/// Splits the recipe diagram into four parts, combines three of them into
/// one short wide diagram and builds the code through [`combine_com2`].
pub fn recipe_thm_com1(m: usize, n: usize, y: usize, delta: usize, z: &[usize], fq: Arc<Fq>) -> Result<RankCode> {
    let f = thm_com1_diagram(m, n, y, delta, z)?;
    let (z0, p_size) = (z[0], z.iter().sum::<usize>());
    let l3 = m + 2 - y - delta;
    let w1 = n - y;
    let f1 = Part::window(FerrersDiagram::full(delta - 1, w1), 0, 0);
    let f2 = (z0 > 0).then(|| Part::window(FerrersDiagram::full(z0, 1), delta - 1, w1));
    let f3 = (l3 > 0).then(|| Part::window(FerrersDiagram::full(l3, 1), y + delta - 2, n - 1));
    let mut gamma4 = vec![delta - 1];
    gamma4.extend(z[1..].iter().map(|&h| delta - 1 + h));
    gamma4.extend(std::iter::repeat_n(y - 1, delta - 2));
    gamma4.push(y + delta - 2);
    let f4 = Part::window(FerrersDiagram::new(gamma4)?, 0, w1);

    let wide = n < m + 2 - delta;
    let mut order: Vec<(Row123, usize)> = Vec::new();
    if wide {
        order.push((Row123::F3, l3));
    }
    order.extend((0..delta - 1).map(|i| (Row123::F1(i), w1)));
    if wide {
        order.push((Row123::F2, z0));
    } else if l3 >= z0 {
        order.extend([(Row123::F3, l3), (Row123::F2, z0)]);
    } else {
        order.extend([(Row123::F2, z0), (Row123::F3, l3)]);
    }
    order.retain(|&(_, len)| len > 0);
    let width = order[0].1;
    let (mut phi1, mut phi2, mut phi3) = (Vec::new(), Vec::new(), Vec::new());
    for (row, &(who, len)) in order.iter().enumerate() {
        let c0 = width - len;
        match who {
            Row123::F1(i) => phi1.extend((0..len).map(|j| ((i, j), (row, c0 + j)))),
            Row123::F2 => phi2.extend((0..len).map(|t| ((t, 0), (row, c0 + t)))),
            Row123::F3 => phi3.extend((0..len).map(|t| ((t, 0), (row, c0 + t)))),
        }
    }
    let f123 = FerrersDiagram::from_rows(&order.iter().map(|o| o.1).collect::<Vec<_>>())?;
    let want123 = if wide { w1 + z0 } else { l3 + z0 };
    let c123 = shorten_to_diagram(&f123, delta, Arc::clone(&fq))?;
    if c123.k() < want123 {
        return Err(Error::Dimension(format!("combined part reached k = {}, need {want123}", c123.k())));
    }
    let want4 = (y + 1 - delta) * (delta - 1) + p_size - z0;
    let c4 = fit_code(&f4.diagram, delta, &fq, want4)?;
    let parts =
        Com2Parts { f1, f2, f3, f4, phi1: CellMap::new(phi1), phi2: CellMap::new(phi2), phi3: CellMap::new(phi3) };
    let code = combine_com2(&f, &parts, &c123, &c4)?;
    let formula = if m <= n + delta - 2 {
        m + 1 - y + (y - delta) * (delta - 1) + p_size
    } else {
        n - 1 + (y - delta) * (delta - 2) + p_size
    };
    let bound = f.bound(delta)?;
    if code.k() != formula || formula != bound {
        return Err(Error::Dimension(format!("built k = {}, formula gives {formula}, bound is {bound}", code.k())));
    }
    Ok(code)
}

/// Cell bookkeeping for [`combine_com3`] on a split of `f` at row `m1`,
/// column `n1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Com3Layout {
    pub m1: usize,
    pub n1: usize,
    /// Sorted heights `1`, the row lengths of `F1`, the column heights of `F3`.
    pub alpha: Vec<usize>,
    pub f123: FerrersDiagram,
    pub f4: FerrersDiagram,
    psi1: CellMap,
    psi2: CellMap,
}

impl Com3Layout {
    /// `F1` is the top-left `m1 x n1` corner, the single dot `(m1, n1-1)`
    /// is `F2`, `F3` lies below the full top-right block `F4`.
    pub fn new(f: &FerrersDiagram, m1: usize, n1: usize) -> Result<Com3Layout> {
        let (m, n, gamma) = (f.m(), f.n(), f.gamma());
        if m1 == 0 || m1 >= m || n1 == 0 || n1 >= n {
            return precondition(format!("split ({m1}, {n1}) is outside the {m}x{n} diagram"));
        }
        if gamma[n1 - 1] != m1 + 1 || gamma[..n1 - 1].iter().any(|&h| h > m1) {
            return precondition(format!("column {} must be the only left column reaching row {m1}", n1 - 1));
        }
        let n3 = n - n1;
        let rho = f.rho();
        let mut items: Vec<(usize, Row123)> = vec![(1, Row123::F2)];
        items.extend((0..m1).map(|i| (rho[i] - n3, Row123::F1(i))));
        items.extend((0..n3).map(|j| (gamma[n1 + j] - m1, Row123::F3)));
        let f3_cols: Vec<usize> = (0..n3).collect();
        let mut f3_iter = f3_cols.iter();
        let tagged: Vec<(usize, Row123, usize)> = items
            .into_iter()
            .map(|(h, who)| {
                let j = if who == Row123::F3 { *f3_iter.next().unwrap() } else { 0 };
                (h, who, j)
            })
            .sorted_by_key(|t| t.0)
            .collect();
        let alpha: Vec<usize> = tagged.iter().map(|t| t.0).collect();
        let mut psi1 = Vec::new();
        for (c, &(h, who, j)) in tagged.iter().enumerate() {
            match who {
                Row123::F2 => psi1.push(((m1, n1 - 1), (0, c))),
                Row123::F1(i) => psi1.extend((0..h).map(|t| ((i, n1 - 1 - t), (t, c)))),
                Row123::F3 => psi1.extend((0..h).map(|t| ((m1 + t, n1 + j), (t, c)))),
            }
        }
        let psi2 = (0..m1).cartesian_product(0..n3).map(|(i, j)| ((i, n1 + j), (i, j))).collect();
        Ok(Com3Layout {
            m1,
            n1,
            f123: FerrersDiagram::new(alpha.clone())?,
            alpha,
            f4: FerrersDiagram::full(m1, n3),
            psi1: CellMap::new(psi1),
            psi2: CellMap::new(psi2),
        })
    }

    /// Every split of `f` that yields a layout.
    pub fn all(f: &FerrersDiagram) -> Vec<Com3Layout> {
        (1..f.n())
            .filter(|&n1| f.gamma()[n1 - 1] >= 2)
            .filter_map(|n1| Com3Layout::new(f, f.gamma()[n1 - 1] - 1, n1).ok())
            .collect()
    }
}

/// `C123` read through the layout's pivot-absorbing map plus `C4` in the
/// top-right block.
pub fn combine_com3(f: &FerrersDiagram, layout: &Com3Layout, c123: &RankCode, c4: &RankCode) -> Result<RankCode> {
    if Com3Layout::new(f, layout.m1, layout.n1)? != *layout {
        return precondition("layout was not built from this diagram".into());
    }
    check_code_on(c123, &layout.f123, "C123")?;
    check_code_on(c4, &layout.f4, "C4")?;
    let delta = reach(c123).min(reach(c4));
    assemble(f, c123.fq_arc(), delta, &[(c123, &layout.psi1), (c4, &layout.psi2)])
}

/// Why `layout` fails the single-dot recipe at distance `delta`, if it does.
fn com3_violation(f: &FerrersDiagram, layout: &Com3Layout, delta: usize) -> Option<String> {
    let (m1, n1) = (layout.m1, layout.n1);
    let (m3, n3) = (f.m() - m1, f.n() - n1);
    let rho = f.rho();
    if delta < 2 || delta > m1 + 1 {
        return Some(format!("need 2 <= delta <= m1 + 1 = {}", m1 + 1));
    }
    if delta < m1 + 1 && n3 < m1 {
        return Some(format!("n3 = {n3} < m1 = {m1}"));
    }
    if 1 + m1 + n3 > n1.max(m3) {
        return Some(format!("1 + m1 + n3 = {} exceeds max(n1, m3) = {}", 1 + m1 + n3, n1.max(m3)));
    }
    if layout.alpha[m1 + n3 + 2 - delta] < m1 + n3 {
        return Some(format!("alpha_{} < m1 + n3 = {}", m1 + n3 + 2 - delta, m1 + n3));
    }
    if rho[delta - 2] < n3 + m3 {
        return Some(format!("row {} has {} dots, fewer than n3 + m3 = {}", delta - 2, rho[delta - 2], n3 + m3));
    }
    None
}

/// Finds a split of `f` meeting the single-dot recipe and builds the code
/// from a shortened `C4` and a subcode-built `C123`.
pub fn recipe_thm_com3(f: &FerrersDiagram, delta: usize, fq: Arc<Fq>) -> Result<RankCode> {
    let layouts = Com3Layout::all(f);
    let mut reasons = Vec::new();
    let layout = layouts.into_iter().find(|l| match com3_violation(f, l, delta) {
        Some(why) => {
            reasons.push(format!("split ({}, {}): {why}", l.m1, l.n1));
            false
        }
        None => true,
    });
    let Some(layout) = layout else {
        return precondition(if reasons.is_empty() {
            format!("{f} has no single-dot split")
        } else {
            reasons.join("; ")
        });
    };
    let (m1, n3) = (layout.m1, f.n() - layout.n1);
    let c4 = if delta == m1 + 1 {
        RankCode::zero(Arc::clone(&fq), m1, n3, delta, Some(layout.f4.clone()))
    } else {
        shorten_to_diagram(&layout.f4, delta, Arc::clone(&fq))?
    };
    let want = layout.alpha[..m1 + n3 + 2 - delta].iter().sum();
    let c123 = fit_code(&layout.f123, delta, &fq, want)?;
    let code = combine_com3(f, &layout, &c123, &c4)?;
    let formula: usize = f.rho()[delta - 1..].iter().sum();
    if code.k() != formula {
        return Err(Error::Dimension(format!("built k = {}, expected {formula}", code.k())));
    }
    Ok(code)
}
