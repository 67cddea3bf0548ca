//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the distance engine or the bound code of the library.

#![allow(dead_code)]

use fdrm::algebra::{FieldCtx, Fq, MatFq};
use fdrm::ferrers::FerrersDiagram;
use fdrm::rankcode::{psi, ExtGenerator, RankCode};

/// Rank by plain Gaussian elimination on a copy.
pub fn rank(fq: &Fq, m: &MatFq) -> usize {
    let mut a: Vec<Vec<u32>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let mut r = 0;
    for c in 0..m.cols() {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        let inv = fq.inv(a[r][c]).unwrap();
        let pivot: Vec<u32> = a[r].iter().map(|&x| fq.mul(x, inv)).collect();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = fq.sub(*x, fq.mul(f, y));
                }
            }
        }
        a[r] = pivot;
        r += 1;
    }
    r
}

/// Minimum rank over every nonzero `F_q` combination of the basis, or
/// `None` for the zero code. Counting through all `q^k` coefficient vectors.
pub fn brute_distance(code: &RankCode) -> Option<usize> {
    let fq = code.fq();
    let q = fq.q() as u128;
    let k = code.k();
    (1..q.pow(k as u32))
        .map(|mut x| {
            let mut acc = MatFq::zeros(code.m(), code.n());
            for b in code.basis() {
                let c = (x % q) as u32;
                x /= q;
                if c != 0 {
                    acc = acc.add(fq, &b.scale(fq, c));
                }
            }
            rank(fq, &acc)
        })
        .min()
}

/// Minimum rank of `Psi(uG)` over every nonzero message `u` in `F_{q^m}^k`.
pub fn brute_ext_distance(g: &ExtGenerator) -> usize {
    let ctx: &FieldCtx = g.ctx();
    let size = ctx.size();
    let total = size.pow(g.k() as u32);
    (1..total)
        .map(|mut x| {
            let u: Vec<_> = (0..g.k())
                .map(|_| {
                    let e = ctx.from_index(x % size);
                    x /= size;
                    e
                })
                .collect();
            rank(ctx.base(), &psi(ctx, &g.encode(&u)))
        })
        .min()
        .unwrap_or(0)
}

/// Dots outside the first `i` rows and the last `delta-1-i` columns,
/// counted cell by cell.
pub fn counted_bound(f: &FerrersDiagram, delta: usize) -> (usize, Vec<usize>) {
    let v: Vec<usize> = (0..delta)
        .map(|i| f.dots().into_iter().filter(|&(r, c)| r >= i && c + (delta - 1 - i) < f.n()).count())
        .collect();
    (*v.iter().min().unwrap(), v)
}
