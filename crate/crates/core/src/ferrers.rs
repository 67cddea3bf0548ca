//! Ferrers diagrams and the cell maps used to combine them.
//!
//! A diagram is stored by its column profile `gamma`: column `j` holds dots in
//! rows `0..gamma[j]`, the profile is nondecreasing and the last column is
//! full. Row `0` is therefore always full.

use std::collections::{HashMap, HashSet};
use std::fmt;

use itertools::Itertools;

use crate::algebra::MatFq;
use crate::{Error, Result};

pub type Cell = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FerrersDiagram {
    m: usize,
    n: usize,
    gamma: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub gamma: Vec<usize>,
    pub rho: Vec<usize>,
    pub dot_count: usize,
    pub theta: Vec<usize>,
}

impl FerrersDiagram {
    pub fn new(gamma: Vec<usize>) -> Result<FerrersDiagram> {
        if gamma.is_empty() {
            return Err(Error::Diagram("no columns".into()));
        }
        if let Some(j) = gamma.iter().position(|&g| g == 0) {
            return Err(Error::Diagram(format!("column {j} is empty")));
        }
        if let Some((j, _)) = gamma.iter().tuple_windows().find_position(|(a, b)| a > b) {
            return Err(Error::Diagram(format!("profile decreases between columns {j} and {}", j + 1)));
        }
        let m = *gamma.last().unwrap();
        Ok(FerrersDiagram { m, n: gamma.len(), gamma })
    }

    pub fn full(m: usize, n: usize) -> FerrersDiagram {
        assert!(m > 0 && n > 0, "full diagram needs positive dimensions");
        FerrersDiagram { m, n, gamma: vec![m; n] }
    }

    /// Diagram whose row `i` holds `rho[i]` dots.
    pub fn from_rows(rho: &[usize]) -> Result<FerrersDiagram> {
        if rho.is_empty() || rho[0] == 0 {
            return Err(Error::Diagram("first row is empty".into()));
        }
        if let Some(i) = rho.iter().position(|&r| r == 0) {
            return Err(Error::Diagram(format!("row {i} is empty")));
        }
        if let Some((i, _)) = rho.iter().tuple_windows().find_position(|(a, b)| a < b) {
            return Err(Error::Diagram(format!("row {} is longer than row {i}", i + 1)));
        }
        let n = rho[0];
        let gamma = (0..n).map(|j| rho.iter().filter(|&&r| r >= n - j).count()).collect();
        FerrersDiagram::new(gamma)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    pub fn is_dot(&self, (i, j): Cell) -> bool {
        j < self.n && i < self.gamma[j]
    }

    pub fn dot_count(&self) -> usize {
        self.gamma.iter().sum()
    }

    /// Dots in row-major order.
    pub fn dots(&self) -> Vec<Cell> {
        (0..self.m).flat_map(|i| (0..self.n).map(move |j| (i, j))).filter(|&c| self.is_dot(c)).collect()
    }

    pub fn rho(&self) -> Vec<usize> {
        (0..self.m).map(|i| self.gamma.iter().filter(|&&g| g > i).count()).collect()
    }

    /// Dots of the diagonal starting at `(i, n-1)` and running up-left,
    /// topmost first.
    pub fn diagonal(&self, i: usize) -> Vec<Cell> {
        let mut cells: Vec<Cell> = (0..=i.min(self.n - 1))
            .filter(|&t| i - t < self.m)
            .map(|t| (i - t, self.n - 1 - t))
            .filter(|&c| self.is_dot(c))
            .collect();
        cells.reverse();
        cells
    }

    /// Number of diagonals that can hold a dot.
    pub fn diagonal_count(&self) -> usize {
        self.m + self.n - 1
    }

    pub fn theta(&self) -> Vec<usize> {
        (0..self.m).map(|i| self.diagonal(i).len()).collect()
    }

    pub fn profile(&self) -> Profile {
        Profile { gamma: self.gamma.clone(), rho: self.rho(), dot_count: self.dot_count(), theta: self.theta() }
    }

    /// Transpose, re-normalized so dots stay right-shifted: dot `(i, j)`
    /// moves to `(n-1-j, m-1-i)`.
    pub fn transpose(&self) -> FerrersDiagram {
        let mut gamma = self.rho();
        gamma.reverse();
        FerrersDiagram { m: self.n, n: self.m, gamma }
    }

    /// Cell of the transpose corresponding to `(i, j)`.
    pub fn transpose_cell(&self, (i, j): Cell) -> Cell {
        (self.n - 1 - j, self.m - 1 - i)
    }

    /// Matrix on the transpose holding the same entries as `mat`.
    pub fn transpose_matrix(&self, mat: &MatFq) -> MatFq {
        let mut t = MatFq::zeros(self.n, self.m);
        for i in 0..self.m {
            for j in 0..self.n {
                t[self.transpose_cell((i, j))] = mat[(i, j)];
            }
        }
        t
    }

    /// `(k_max, v)` with `v[i]` the number of dots outside the first `i` rows
    /// and the rightmost `delta-1-i` columns.
    pub fn singleton_like_bound(&self, delta: usize) -> Result<(usize, Vec<usize>)> {
        if delta == 0 || delta > self.n {
            return Err(Error::Precondition(format!("delta = {delta} outside 1..={}", self.n)));
        }
        let v: Vec<usize> = (0..delta)
            .map(|i| {
                let cols = self.n - (delta - 1 - i);
                self.gamma[..cols].iter().map(|&g| g.saturating_sub(i)).sum()
            })
            .collect();
        Ok((*v.iter().min().unwrap(), v))
    }

    pub fn bound(&self, delta: usize) -> Result<usize> {
        Ok(self.singleton_like_bound(delta)?.0)
    }

    /// True iff `mat` vanishes outside the dots.
    pub fn supports(&self, mat: &MatFq) -> bool {
        mat.rows() >= self.m
            && mat.cols() == self.n
            && (0..mat.rows()).all(|i| (0..self.n).all(|j| mat[(i, j)] == 0 || self.is_dot((i, j))))
    }

    pub fn to_grid(&self) -> String {
        let mut s = String::new();
        for i in 0..self.m {
            for j in 0..self.n {
                s.push(if self.is_dot((i, j)) { '*' } else { '.' });
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for FerrersDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cols:{}", self.gamma.iter().join(","))
    }
}

/// Parses `cols:a,b,...` or a right-aligned grid of `.` and `*`.
pub fn parse_diagram(text: &str) -> Result<FerrersDiagram> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("cols:") {
        let gamma = rest
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad column count {:?}", s.trim()))))
            .collect::<Result<Vec<_>>>()?;
        return FerrersDiagram::new(gamma);
    }
    let lines: Vec<String> = text
        .lines()
        .map(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<String>())
        .filter(|l| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(Error::Parse("empty diagram".into()));
    }
    let width = lines.iter().map(|l| l.chars().count()).max().unwrap();
    let mut rho = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if let Some(c) = line.chars().find(|&c| c != '.' && c != '*') {
            return Err(Error::Parse(format!("unexpected character {c:?} in row {i}")));
        }
        let dots = line.chars().rev().take_while(|&c| c == '*').count();
        if line.chars().filter(|&c| c == '*').count() != dots {
            return Err(Error::Diagram(format!("row {i} is not right-shifted")));
        }
        rho.push(dots);
    }
    if rho[0] != width {
        return Err(Error::Diagram("some column is empty".into()));
    }
    FerrersDiagram::from_rows(&rho)
}

/// An explicit injective assignment of source cells to target cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellMap {
    pairs: Vec<(Cell, Cell)>,
}

impl CellMap {
    pub fn new(pairs: Vec<(Cell, Cell)>) -> CellMap {
        CellMap { pairs }
    }

    pub fn identity(f: &FerrersDiagram) -> CellMap {
        CellMap { pairs: f.dots().into_iter().map(|c| (c, c)).collect() }
    }

    /// Composition `outer . self`; cells that `outer` does not map are dropped.
    pub fn then(&self, outer: &CellMap) -> CellMap {
        let lookup: HashMap<Cell, Cell> = outer.pairs.iter().copied().collect();
        CellMap { pairs: self.pairs.iter().filter_map(|&(s, t)| lookup.get(&t).map(|&u| (s, u))).collect() }
    }

    pub fn pairs(&self) -> &[(Cell, Cell)] {
        &self.pairs
    }

    pub fn get(&self, src: Cell) -> Option<Cell> {
        self.pairs.iter().find(|(s, _)| *s == src).map(|&(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn validate_source(&self, src: &FerrersDiagram) -> Result<()> {
        let sources: HashSet<Cell> = self.pairs.iter().map(|p| p.0).collect();
        let targets: HashSet<Cell> = self.pairs.iter().map(|p| p.1).collect();
        if sources.len() != self.pairs.len() {
            return Err(Error::CellMap("a source cell is mapped twice".into()));
        }
        if targets.len() != self.pairs.len() {
            return Err(Error::CellMap("map is not injective".into()));
        }
        if let Some(&(s, _)) = self.pairs.iter().find(|(s, _)| !src.is_dot(*s)) {
            return Err(Error::CellMap(format!("source cell {s:?} is not a dot")));
        }
        if sources.len() != src.dot_count() {
            return Err(Error::CellMap("map does not cover every source dot".into()));
        }
        Ok(())
    }

    /// Injective, covers every dot of `src`, and lands on dots of `dst`.
    pub fn check(&self, src: &FerrersDiagram, dst: &FerrersDiagram) -> Result<()> {
        self.validate_source(src)?;
        if let Some(&(_, t)) = self.pairs.iter().find(|(_, t)| !dst.is_dot(*t)) {
            return Err(Error::CellMap(format!("target cell {t:?} lies outside the diagram")));
        }
        Ok(())
    }
}

/// Checks that `f` is a proper combination of the given parts: images are
/// pairwise disjoint, dot counts add up to `|f|`, and dots sharing a row or
/// column in a part land on cells sharing a row or column.
pub fn proper_combination_check(parts: &[(&FerrersDiagram, &CellMap)], f: &FerrersDiagram) -> Result<bool> {
    for (src, phi) in parts {
        phi.check(src, f)?;
    }
    let mut seen = HashSet::new();
    let disjoint = parts.iter().flat_map(|(_, phi)| phi.pairs.iter().map(|p| p.1)).all(|t| seen.insert(t));
    let total: usize = parts.iter().map(|(src, _)| src.dot_count()).sum();
    let coherent = parts.iter().all(|(_, phi)| {
        phi.pairs.iter().tuple_combinations().all(|(&(a, x), &(b, y))| {
            let linked = a.0 == b.0 || a.1 == b.1;
            !linked || x.0 == y.0 || x.1 == y.1
        })
    });
    Ok(disjoint && total == f.dot_count() && coherent)
}

/// Builds `M12` with `M_l(i, j)` placed at `phi_l(i, j)`.
pub fn proper_embed(parts: &[(&MatFq, &CellMap)], f: &FerrersDiagram) -> Result<MatFq> {
    let mut out = MatFq::zeros(f.m(), f.n());
    for (mat, phi) in parts {
        let lookup: HashMap<Cell, Cell> = phi.pairs.iter().copied().collect();
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                let v = mat[(i, j)];
                if v == 0 {
                    continue;
                }
                match lookup.get(&(i, j)) {
                    Some(&t) if f.is_dot(t) => out[t] = v,
                    _ => {
                        return Err(Error::Precondition(format!(
                            "nonzero entry at {:?} has no image in the diagram",
                            (i, j)
                        )))
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Image shape of a part inside a proper combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Invariant,
    Transposed,
    SingleRow,
    SingleCol,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Invariant => "invariant",
            Shape::Transposed => "transposed",
            Shape::SingleRow => "single_row",
            Shape::SingleCol => "single_col",
        })
    }
}

/// Classifies how `phi` places `src`. Shape-preserving classes win over the
/// degenerate ones when several apply.
pub fn degeneration_shape(src: &FerrersDiagram, phi: &CellMap) -> Result<Shape> {
    phi.validate_source(src)?;
    let pairs = phi.pairs();
    let keeps = |row_to_row: bool| {
        pairs.iter().tuple_combinations().all(|(&(a, x), &(b, y))| {
            let (same_r, same_c) = (x.0 == y.0, x.1 == y.1);
            let (tr, tc) = if row_to_row { (same_r, same_c) } else { (same_c, same_r) };
            (a.0 == b.0) == tr && (a.1 == b.1) == tc
        })
    };
    if keeps(true) {
        Ok(Shape::Invariant)
    } else if keeps(false) {
        Ok(Shape::Transposed)
    } else if pairs.iter().map(|p| p.1 .0).all_equal() {
        Ok(Shape::SingleRow)
    } else if pairs.iter().map(|p| p.1 .1).all_equal() {
        Ok(Shape::SingleCol)
    } else {
        Err(Error::CellMap("image keeps no shape and does not degenerate".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fq;

    fn d(s: &str) -> FerrersDiagram {
        parse_diagram(s).unwrap()
    }

    /// Cells outside the first `i` rows and the last `delta-1-i` columns,
    /// counted straight from the dot set.
    fn bound_by_counting(f: &FerrersDiagram, delta: usize) -> Vec<usize> {
        (0..delta)
            .map(|i| f.dots().into_iter().filter(|&(r, c)| r >= i && c < f.n() - (delta - 1 - i)).count())
            .collect()
    }

    #[test]
    fn parses_profiles_and_grids() {
        let f = d("cols:2,3,4,5");
        assert_eq!((f.m(), f.n(), f.dot_count()), (5, 4, 14));
        assert_eq!(d("cols:1").dots(), vec![(0, 0)]);
        let g = d("****\n****\n.***\n..**\n...*");
        assert_eq!(g, f);
        assert_eq!(d(" ****\n ***\n  **\n   *\n"), d("cols:1,2,3,4"));
        assert_eq!(d(&f.to_grid()), f);
    }

    #[test]
    fn rejects_bad_diagrams() {
        assert!(matches!(parse_diagram("cols:3,2"), Err(Error::Diagram(_))));
        assert!(matches!(parse_diagram("cols:0,2"), Err(Error::Diagram(_))));
        assert!(matches!(parse_diagram("cols:a"), Err(Error::Parse(_))));
        assert!(matches!(parse_diagram("*.*\n***"), Err(Error::Diagram(_))));
        assert!(matches!(parse_diagram("**\n***"), Err(Error::Diagram(_))));
        assert!(matches!(parse_diagram(".*\n.*"), Err(Error::Diagram(_))));
        assert!(matches!(parse_diagram("*x"), Err(Error::Parse(_))));
    }

    #[test]
    fn profile_of_first_example() {
        let p = d("cols:2,3,4,5").profile();
        assert_eq!(p.theta, vec![1, 2, 3, 4, 4]);
        assert_eq!(p.rho, vec![4, 4, 3, 2, 1]);
        assert_eq!(p.dot_count, 14);
        let full = FerrersDiagram::full(3, 3).profile();
        assert_eq!(full.theta, vec![1, 2, 3]);
        assert_eq!(full.rho, vec![3, 3, 3]);
    }

    #[test]
    fn diagonals_run_top_first() {
        let f = d("cols:2,3,4,5");
        assert_eq!(f.diagonal(3), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(f.diagonal(4), vec![(1, 0), (2, 1), (3, 2), (4, 3)]);
        let all: usize = (0..f.diagonal_count()).map(|i| f.diagonal(i).len()).sum();
        assert_eq!(all, f.dot_count());
    }

    #[test]
    fn transpose_cases() {
        let f = d("cols:2,3,4,5");
        assert_eq!(f.transpose(), d("cols:1,2,3,4,4"));
        assert_eq!(f.transpose().transpose(), f);
        assert_eq!(d("cols:4").transpose(), d("cols:1,1,1,1"));
        for c in f.dots() {
            assert!(f.transpose().is_dot(f.transpose_cell(c)));
        }
    }

    #[test]
    fn bound_examples() {
        let f = d("cols:2,3,4,5");
        assert_eq!(f.singleton_like_bound(2).unwrap(), (9, vec![9, 10]));
        assert_eq!(f.singleton_like_bound(2).unwrap().1, bound_by_counting(&f, 2));
        assert_eq!(f.bound(3).unwrap(), 5);
        assert_eq!(f.bound(1).unwrap(), 14);
        assert_eq!(d("cols:2,3,3,4,4,4,4,10").bound(4).unwrap(), 10);
        assert!(f.singleton_like_bound(0).is_err());
        assert!(f.singleton_like_bound(5).is_err());
    }

    #[test]
    fn bound_matches_counting_on_all_small_diagrams() {
        for n in 1..=4 {
            for gamma in (0..n).map(|_| 1..=5usize).multi_cartesian_product() {
                let Ok(f) = FerrersDiagram::new(gamma) else { continue };
                for delta in 1..=n {
                    let (k, v) = f.singleton_like_bound(delta).unwrap();
                    assert_eq!(v, bound_by_counting(&f, delta));
                    assert_eq!(k, *v.iter().min().unwrap());
                }
            }
        }
    }

    /// The two-part example with `F1 = cols:2,6` and `F2 = cols:1,3`.
    fn sample_parts() -> (FerrersDiagram, FerrersDiagram) {
        (d("cols:2,6"), d("cols:1,3"))
    }

    fn d1_maps() -> (FerrersDiagram, CellMap, CellMap) {
        let phi1 = CellMap::new(vec![
            ((0, 0), (0, 1)),
            ((1, 0), (1, 1)),
            ((0, 1), (0, 3)),
            ((1, 1), (1, 3)),
            ((2, 1), (2, 3)),
            ((3, 1), (3, 3)),
            ((4, 1), (4, 3)),
            ((5, 1), (5, 3)),
        ]);
        let phi2 = CellMap::new(vec![((0, 0), (0, 0)), ((0, 1), (0, 2)), ((1, 1), (1, 2)), ((2, 1), (2, 2))]);
        (d("cols:1,2,3,6"), phi1, phi2)
    }

    fn d3_maps() -> (FerrersDiagram, CellMap, CellMap) {
        let phi1 = CellMap::new(vec![
            ((0, 0), (0, 4)),
            ((1, 0), (1, 4)),
            ((0, 1), (0, 5)),
            ((1, 1), (1, 5)),
            ((2, 1), (2, 5)),
            ((3, 1), (3, 5)),
            ((4, 1), (4, 5)),
            ((5, 1), (5, 5)),
        ]);
        let phi2 = CellMap::new(vec![((0, 0), (0, 0)), ((0, 1), (0, 1)), ((1, 1), (0, 2)), ((2, 1), (0, 3))]);
        (d("cols:1,1,1,1,2,6"), phi1, phi2)
    }

    #[test]
    fn sample_assemblies_are_proper() {
        let (f1, f2) = sample_parts();
        for (f, phi1, phi2) in [d1_maps(), d3_maps()] {
            assert!(proper_combination_check(&[(&f1, &phi1), (&f2, &phi2)], &f).unwrap());
            assert_eq!(degeneration_shape(&f1, &phi1).unwrap(), Shape::Invariant);
        }
        assert_eq!(degeneration_shape(&f2, &d1_maps().2).unwrap(), Shape::Invariant);
        assert_eq!(degeneration_shape(&f2, &d3_maps().2).unwrap(), Shape::SingleRow);
    }

    #[test]
    fn identity_combination_is_proper() {
        let f = d("cols:2,3,4,5");
        let id = CellMap::identity(&f);
        assert!(proper_combination_check(&[(&f, &id)], &f).unwrap());
        assert_eq!(degeneration_shape(&f, &id).unwrap(), Shape::Invariant);
    }

    #[test]
    fn incoherent_map_is_rejected() {
        let src = d("cols:1,1");
        let f = d("cols:1,2");
        let phi = CellMap::new(vec![((0, 0), (0, 0)), ((0, 1), (1, 1))]);
        let rest = d("cols:1");
        let psi = CellMap::new(vec![((0, 0), (0, 1))]);
        assert!(!proper_combination_check(&[(&src, &phi), (&rest, &psi)], &f).unwrap());
    }

    #[test]
    fn malformed_maps_error() {
        let f = d("cols:1,2");
        let src = d("cols:1");
        let outside = CellMap::new(vec![((0, 0), (1, 0))]);
        assert!(proper_combination_check(&[(&src, &outside)], &f).is_err());
        let src2 = d("cols:1,1");
        let clash = CellMap::new(vec![((0, 0), (0, 1)), ((0, 1), (0, 1))]);
        assert!(proper_combination_check(&[(&src2, &clash)], &f).is_err());
    }

    #[test]
    fn embed_places_entries() {
        let fq = Fq::new(2, 1).unwrap();
        let (f1, f2) = sample_parts();
        let (f, phi1, phi2) = d1_maps();
        let m1 = MatFq::from_rows(&[vec![1, 1], vec![0, 1], vec![0, 1], vec![0, 0], vec![0, 0], vec![0, 1]]);
        let m2 = MatFq::zeros(3, 2);
        assert!(f1.supports(&m1) && f2.supports(&m2));
        let out = proper_embed(&[(&m1, &phi1), (&m2, &phi2)], &f).unwrap();
        assert_eq!(out[(0, 1)], 1);
        assert_eq!(out[(5, 3)], 1);
        assert_eq!(out.rank(&fq), m1.rank(&fq));
        let z = proper_embed(&[(&MatFq::zeros(6, 2), &phi1), (&m2, &phi2)], &f).unwrap();
        assert!(z.is_zero());
        let bad = MatFq::from_rows(&[vec![1, 0], vec![0, 0], vec![1, 0]]);
        assert!(proper_embed(&[(&bad, &phi2)], &f).is_err());
    }
}
