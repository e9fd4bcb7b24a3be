//! Young diagrams as torus fixed points.
//!
//! A partition `lambda` of `n` is the monomial ideal `I_lambda` of colength `n`;
//! a [`MarkedDiagram`] (a diagram of `n + r` boxes with `r` marked elbows) is a
//! fixed point of the nested scheme `H^[n,n+r]`. Boxes use 1-based coordinates
//! `(col, row)`, columns counted from the left and rows from the bottom, so
//! the box `(a, b)` stands for the monomial `x^{a-1} y^{b-1}`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{choose2, LaurentPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("parts must be positive and weakly decreasing: {0:?}")]
    NotAPartition(Vec<u32>),
    #[error("box ({col},{row}) is not an elbow of the diagram")]
    NotAnElbow { col: u32, row: u32 },
    #[error("box ({col},{row}) is marked twice")]
    DuplicateMark { col: u32, row: u32 },
}

/// A Young diagram; `parts[b - 1]` is the length of row `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

/// A box `(col, row)` of a diagram, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: u32,
    pub row: u32,
}

impl Cell {
    pub fn new(col: u32, row: u32) -> Self {
        Self { col, row }
    }
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, DiagramError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(DiagramError::NotAPartition(parts));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The staircase `(k-1, k-2, ..., 1)`, i.e. the ideal `m^{k-1}`.
    pub fn staircase(k: u32) -> Self {
        Self {
            parts: (1..k).rev().collect(),
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.col >= 1 && c.row >= 1 && self.row_len(c.row) >= c.col
    }

    fn row_len(&self, row: u32) -> u32 {
        self.parts.get(row as usize - 1).copied().unwrap_or(0)
    }

    fn col_height(&self, col: u32) -> u32 {
        self.parts.iter().take_while(|&&p| p >= col).count() as u32
    }

    /// Number of boxes strictly above `c` in its column.
    pub fn boxes_above(&self, c: Cell) -> i64 {
        i64::from(self.col_height(c.col)) - i64::from(c.row)
    }

    /// Number of boxes strictly to the right of `c` in its row.
    pub fn boxes_right(&self, c: Cell) -> i64 {
        i64::from(self.row_len(c.row)) - i64::from(c.col)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (1..=len).map(move |col| Cell::new(col, i as u32 + 1)))
    }

    /// Removable corners, ordered by column (left to right). There is one per
    /// distinct part value, sitting in the topmost row of that length.
    pub fn elbows(&self) -> Vec<Cell> {
        let mut out: Vec<_> = self
            .parts
            .iter()
            .enumerate()
            .filter(|&(i, &len)| self.parts.get(i + 1).is_none_or(|&next| next < len))
            .map(|(i, &len)| Cell::new(len, i as u32 + 1))
            .collect();
        out.sort();
        out
    }

    /// Removes the given elbows (each must be an elbow of `self`).
    pub fn remove_elbows(&self, cells: &[Cell]) -> Result<Self, DiagramError> {
        let elbows = self.elbows();
        let mut parts = self.parts.clone();
        for (i, c) in cells.iter().enumerate() {
            if !elbows.contains(c) {
                return Err(DiagramError::NotAnElbow { col: c.col, row: c.row });
            }
            if cells[..i].contains(c) {
                return Err(DiagramError::DuplicateMark { col: c.col, row: c.row });
            }
            parts[c.row as usize - 1] -= 1;
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Self::new(parts)
    }
}

/// All partitions of `n`, each once, in reverse lexicographic order.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn go(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Minimal number of generators of the monomial ideal: its concave corners,
/// one more than the number of elbows. The unit ideal has one generator.
pub fn mu_of_partition(lambda: &Partition) -> u32 {
    lambda.elbows().len() as u32 + 1
}

/// Largest `k` with `C(k,2) <= n`: the maximal number of generators of a
/// colength-`n` ideal.
pub fn mu_max(n: u32) -> u32 {
    let mut k = 1u32;
    while choose2(i64::from(k) + 1) <= i64::from(n) {
        k += 1;
    }
    k
}

/// Number of partitions of `n` with `mu = m`, i.e. the Euler characteristic
/// of the stratum of `m`-generated ideals.
pub fn count_partitions_with_mu(n: u32, m: u32) -> u64 {
    partitions_of(n)
        .iter()
        .filter(|l| mu_of_partition(l) == m)
        .count() as u64
}

/// A fixed point of `H^[n,n+r]`: the larger diagram `delta_j` together with
/// `r` marked elbows whose removal gives the smaller diagram `delta_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedDiagram {
    delta_j: Partition,
    delta_i: Partition,
    marks: Vec<Cell>,
}

impl MarkedDiagram {
    pub fn new(delta_j: Partition, mut marks: Vec<Cell>) -> Result<Self, DiagramError> {
        let delta_i = delta_j.remove_elbows(&marks)?;
        marks.sort();
        Ok(Self { delta_j, delta_i, marks })
    }

    /// An unmarked diagram, i.e. a fixed point of `H^[n]`.
    pub fn unmarked(lambda: Partition) -> Self {
        Self {
            delta_i: lambda.clone(),
            delta_j: lambda,
            marks: Vec::new(),
        }
    }

    pub fn delta_j(&self) -> &Partition {
        &self.delta_j
    }

    pub fn delta_i(&self) -> &Partition {
        &self.delta_i
    }

    /// Marked elbows, ordered by column.
    pub fn marks(&self) -> &[Cell] {
        &self.marks
    }

    /// `n`, the size of the smaller diagram.
    pub fn n(&self) -> u32 {
        self.delta_i.size()
    }

    pub fn r(&self) -> u32 {
        self.marks.len() as u32
    }

    /// For each pair of marks `(a,b)`, `(c,d)` with `a < c` and `d < b`, the
    /// box `(a, d)`.
    pub fn q_boxes(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = self
            .marks
            .iter()
            .cartesian_product(self.marks.iter())
            .filter(|(l, r)| l.col < r.col && r.row < l.row)
            .map(|(l, r)| Cell::new(l.col, r.row))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Torus weights `(w1, w2)` of the tangent space, one pair of characters
    /// `T1^{-l_J} T2^{a_I + 1}` and `T1^{l_I + 1} T2^{-a_J}` per box of
    /// `delta_j` that is neither marked nor a Q-box. Here `a` counts boxes
    /// above and `l` boxes to the right, in the subscripted diagram.
    pub fn tangent_character(&self) -> WeightList {
        let q = self.q_boxes();
        let mut weights = Vec::new();
        for c in self.delta_j.cells() {
            if self.marks.contains(&c) || q.contains(&c) {
                continue;
            }
            weights.push((-self.delta_j.boxes_right(c), self.delta_i.boxes_above(c) + 1));
            weights.push((self.delta_i.boxes_right(c) + 1, -self.delta_j.boxes_above(c)));
        }
        WeightList { weights }
    }

    pub fn to_json_repr(&self) -> MarkedDiagramRepr {
        MarkedDiagramRepr {
            parts: self.delta_j.parts.clone(),
            marks: self.marks.iter().map(|c| [c.col, c.row]).collect(),
        }
    }

    pub fn from_json_repr(repr: MarkedDiagramRepr) -> Result<Self, DiagramError> {
        let marks = repr.marks.iter().map(|&[a, b]| Cell::new(a, b)).collect();
        Self::new(Partition::new(repr.parts)?, marks)
    }
}

/// Wire form `{"parts": [...], "marks": [[a, b], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedDiagramRepr {
    pub parts: Vec<u32>,
    pub marks: Vec<[u32; 2]>,
}

impl Serialize for MarkedDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MarkedDiagramRepr::deserialize(d)?;
        Self::from_json_repr(repr).map_err(serde::de::Error::custom)
    }
}

/// Fixed points of `H^[n,n+r]`, in the order of [`partitions_of`] and then
/// of mark subsets (lexicographic in column order). Empty iff `n < C(r,2)`.
pub fn enumerate_marked(n: u32, r: u32) -> Vec<MarkedDiagram> {
    let mut out = Vec::new();
    for lambda in partitions_of(n + r) {
        let elbows = lambda.elbows();
        for marks in elbows.into_iter().combinations(r as usize) {
            out.push(MarkedDiagram::new(lambda.clone(), marks).expect("marks are elbows"));
        }
    }
    out
}

/// Multiset of tangent weights at a fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightList {
    pub weights: Vec<(i64, i64)>,
}

impl WeightList {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Positivity for the one-parameter subgroup `s -> (s, s^N)` with `N` large:
/// `(w1, w2)` is positive iff `w2 > 0`, or `w2 = 0` and `w1 > 0`.
pub fn is_positive_weight(w: (i64, i64)) -> bool {
    w.1 > 0 || (w.1 == 0 && w.0 > 0)
}

/// Number of positive weights: the dimension of the attracting cell.
pub fn alpha(w: &WeightList) -> u32 {
    w.weights.iter().filter(|&&w| is_positive_weight(w)).count() as u32
}

fn fixed_points(n: u32, r: u32) -> Vec<MarkedDiagram> {
    if r == 0 {
        partitions_of(n).into_iter().map(MarkedDiagram::unmarked).collect()
    } else {
        enumerate_marked(n, r)
    }
}

/// `E(H^[n,n+r]) = sum_p t^{alpha(p)}` over fixed points; `r = 0` gives `E(H^[n])`.
pub fn e_poly_hnnr_fixed(n: u32, r: u32) -> LaurentPoly {
    fixed_points(n, r)
        .iter()
        .map(|p| LaurentPoly::t_pow(i64::from(alpha(&p.tangent_character()))))
        .sum()
}

/// `E(B^[n,n+r]) = sum_p t^{2n - r(r-1) - alpha(p)}`; `r = 0` gives `E(B^[n])`.
pub fn e_poly_bnnr_fixed(n: u32, r: u32) -> LaurentPoly {
    let dim = 2 * i64::from(n) - i64::from(r) * (i64::from(r) - 1);
    fixed_points(n, r)
        .iter()
        .map(|p| LaurentPoly::t_pow(dim - i64::from(alpha(&p.tangent_character()))))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{series_h, series_hnnr};

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    fn poly(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    /// p(n) via Euler's pentagonal number recurrence.
    fn pentagonal_partition_count(n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut acc = 0i64;
            for k in 1i64.. {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * p[m - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    acc += sign * p[m - g2];
                }
            }
            p[m] = acc;
        }
        p
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(part(&[3, 3, 2, 1]).size(), 9);
    }

    #[test]
    fn partitions_examples() {
        assert_eq!(partitions_of(0), vec![Partition::empty()]);
        assert_eq!(partitions_of(3), vec![part(&[3]), part(&[2, 1]), part(&[1, 1, 1])]);
        assert_eq!(partitions_of(14).len(), 135);
        let oracle = pentagonal_partition_count(16);
        for n in 0..=16 {
            let ps = partitions_of(n);
            assert_eq!(ps.len() as i64, oracle[n as usize]);
            assert!(ps.iter().all(|p| p.size() == n));
            let mut dedup = ps.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), ps.len());
        }
    }

    #[test]
    fn elbow_examples() {
        assert_eq!(part(&[3]).elbows(), vec![Cell::new(3, 1)]);
        assert_eq!(part(&[2, 1]).elbows(), vec![Cell::new(1, 2), Cell::new(2, 1)]);
        assert_eq!(
            part(&[3, 3, 2, 1]).elbows(),
            vec![Cell::new(1, 4), Cell::new(2, 3), Cell::new(3, 2)]
        );
        assert!(Partition::empty().elbows().is_empty());
    }

    #[test]
    fn elbows_are_removable_corners() {
        for n in 0..=10 {
            for l in partitions_of(n) {
                let expected: Vec<Cell> = l
                    .cells()
                    .filter(|c| {
                        !l.contains(Cell::new(c.col, c.row + 1))
                            && !l.contains(Cell::new(c.col + 1, c.row))
                    })
                    .sorted()
                    .collect();
                assert_eq!(l.elbows(), expected);
            }
        }
    }

    #[test]
    fn removing_any_elbow_subset_gives_a_partition() {
        for n in 0..=12 {
            for l in partitions_of(n) {
                let elbows = l.elbows();
                for subset in elbows.iter().copied().powerset() {
                    let smaller = l.remove_elbows(&subset).unwrap();
                    assert_eq!(smaller.size() as usize, n as usize - subset.len());
                    assert!(smaller.cells().all(|c| l.contains(c)));
                }
            }
        }
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_of_partition(&part(&[3])), 2);
        assert_eq!(mu_of_partition(&part(&[2, 1])), 3);
        assert_eq!(mu_of_partition(&Partition::empty()), 1);
        for k in 1..=7 {
            assert_eq!(mu_of_partition(&Partition::staircase(k)), k);
        }
        assert_eq!(mu_max(0), 1);
        assert_eq!(mu_max(1), 2);
        assert_eq!(mu_max(2), 2);
        assert_eq!(mu_max(3), 3);
        assert_eq!(mu_max(14), 5);
        assert_eq!(mu_max(15), 6);
        for n in 0..=14 {
            let best = partitions_of(n).iter().map(mu_of_partition).max().unwrap();
            assert_eq!(best, mu_max(n), "n={n}");
        }
    }

    #[test]
    fn count_with_mu_examples() {
        assert_eq!(count_partitions_with_mu(3, 3), 1);
        assert_eq!(count_partitions_with_mu(5, 3), 5);
        for n in 1..=10 {
            assert_eq!(count_partitions_with_mu(n, 1), 0);
        }
        assert_eq!(count_partitions_with_mu(0, 1), 1);
    }

    #[test]
    fn marked_enumeration_examples() {
        let pts = enumerate_marked(1, 2);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].delta_j(), &part(&[2, 1]));
        assert_eq!(pts[0].marks(), &[Cell::new(1, 2), Cell::new(2, 1)]);
        let pts = enumerate_marked(0, 1);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].delta_j(), &part(&[1]));
        assert_eq!(pts[0].delta_i(), &Partition::empty());
        assert!(enumerate_marked(2, 3).is_empty());
    }

    #[test]
    fn marked_enumeration_empty_exactly_below_staircase() {
        for r in 1..=5u32 {
            for n in 0..=12u32 {
                let pts = enumerate_marked(n, r);
                let threshold = r * (r - 1) / 2;
                assert_eq!(pts.is_empty(), n < threshold, "n={n} r={r}");
                if n == threshold {
                    assert_eq!(pts.len(), 1);
                    assert_eq!(pts[0].delta_i(), &Partition::staircase(r));
                    assert_eq!(pts[0].delta_j(), &Partition::staircase(r + 1));
                }
            }
        }
    }

    #[test]
    fn marked_diagram_rejects_non_elbows() {
        assert_eq!(
            MarkedDiagram::new(part(&[2, 1]), vec![Cell::new(1, 1)]),
            Err(DiagramError::NotAnElbow { col: 1, row: 1 })
        );
        assert!(MarkedDiagram::new(part(&[2]), vec![Cell::new(2, 1), Cell::new(2, 1)]).is_err());
    }

    #[test]
    fn q_box_examples() {
        // delta_j with marks (1,4) and (2,2), as in the intersection-of-elbows picture
        let md = MarkedDiagram::new(part(&[4, 2, 1, 1]), vec![Cell::new(1, 4), Cell::new(2, 2)]).unwrap();
        assert!(md.q_boxes().contains(&Cell::new(1, 2)));
        let single = MarkedDiagram::new(part(&[3]), vec![Cell::new(3, 1)]).unwrap();
        assert!(single.q_boxes().is_empty());
        let md = MarkedDiagram::new(part(&[2, 1]), vec![Cell::new(2, 1), Cell::new(1, 2)]).unwrap();
        assert_eq!(md.q_boxes(), vec![Cell::new(1, 1)]);
    }

    #[test]
    fn q_boxes_lie_in_delta_i() {
        for size in 0..=12 {
            for l in partitions_of(size) {
                for marks in l.elbows().into_iter().powerset() {
                    let r = marks.len();
                    let md = MarkedDiagram::new(l.clone(), marks).unwrap();
                    let q = md.q_boxes();
                    assert_eq!(q.len(), r * r.saturating_sub(1) / 2);
                    for c in &q {
                        assert!(!md.marks().contains(c));
                        assert!(md.delta_i().contains(*c));
                    }
                }
            }
        }
    }

    #[test]
    fn tangent_character_examples() {
        let pt = &enumerate_marked(1, 2)[0];
        assert!(pt.tangent_character().is_empty());

        let w = MarkedDiagram::unmarked(part(&[1])).tangent_character();
        assert_eq!(w.weights, vec![(0, 1), (1, 0)]);
        assert_eq!(alpha(&w), 2);

        let w = MarkedDiagram::unmarked(part(&[2])).tangent_character();
        let mut got = w.weights.clone();
        got.sort();
        let mut want = vec![(-1, 1), (2, 0), (0, 1), (1, 0)];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(alpha(&w), 4);

        let w = MarkedDiagram::unmarked(part(&[1, 1])).tangent_character();
        let mut got = w.weights.clone();
        got.sort();
        let mut want = vec![(0, 2), (1, -1), (0, 1), (1, 0)];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(alpha(&w), 3);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&WeightList::default()), 0);
        assert_eq!(alpha(&WeightList { weights: vec![(0, 1), (1, 0)] }), 2);
        assert_eq!(alpha(&WeightList { weights: vec![(-3, 0), (0, -1), (5, -2)] }), 0);
    }

    #[test]
    fn fixed_point_e_poly_examples() {
        assert_eq!(e_poly_hnnr_fixed(1, 2), LaurentPoly::one());
        assert_eq!(e_poly_hnnr_fixed(2, 0), poly("t^4+t^3"));
        assert_eq!(e_poly_hnnr_fixed(1, 1), poly("t^2+t"));
        assert_eq!(e_poly_bnnr_fixed(2, 0), poly("1+t"));
        assert_eq!(e_poly_bnnr_fixed(1, 2), LaurentPoly::one());
        assert_eq!(e_poly_bnnr_fixed(0, 0), LaurentPoly::one());
    }

    #[test]
    fn weights_count_and_cell_dimension_bounds() {
        for r in 0..=4u32 {
            for n in 0..=10u32 {
                let dim = 2 * i64::from(n) - i64::from(r) * (i64::from(r) - 1);
                for p in fixed_points(n, r) {
                    let w = p.tangent_character();
                    assert_eq!(w.len() as i64, dim, "n={n} r={r}");
                    let a = i64::from(alpha(&w));
                    assert!(0 <= a && a <= dim);
                }
            }
        }
    }

    #[test]
    fn fixed_points_match_series() {
        let h = series_h(10);
        for n in 0..=10u32 {
            assert_eq!(e_poly_hnnr_fixed(n, 0), h.coeff(n as usize), "n={n}");
        }
        for r in 1..=4u32 {
            let s = series_hnnr(r as usize, 10);
            for n in 0..=10u32 {
                assert_eq!(e_poly_hnnr_fixed(n, r), s.coeff(n as usize), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn marked_diagram_json() {
        let md = MarkedDiagram::new(part(&[2, 1]), vec![Cell::new(2, 1), Cell::new(1, 2)]).unwrap();
        let s = serde_json::to_string(&md).unwrap();
        assert_eq!(s, r#"{"parts":[2,1],"marks":[[1,2],[2,1]]}"#);
        assert_eq!(serde_json::from_str::<MarkedDiagram>(&s).unwrap(), md);
        assert!(serde_json::from_str::<MarkedDiagram>(r#"{"parts":[2,1],"marks":[[1,1]]}"#).is_err());
    }
}
