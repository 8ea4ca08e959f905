//! Exact densities, Furstenberg-Weiss measures and finite probability spaces.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::cs_tree::CsTree;
use crate::error::{Error, Result};
use crate::rational::{int, parse_rational, ratio, serde_rational, Rational};
use crate::wordset::WordSet;

/// Which levels a Furstenberg-Weiss measure averages over.
#[derive(Clone, Copy, Debug)]
pub enum FwShape<'a> {
    /// Levels `0..=m` of `[k]^{<N}`.
    Initial(usize),
    /// The levels `W(0), ..., W(dim W)` of a tree.
    Tree(&'a CsTree),
    /// An arbitrary nonempty level set.
    Levels(&'a [usize]),
}

pub fn fw_measure(a: &WordSet, shape: FwShape<'_>) -> Result<Rational> {
    match shape {
        FwShape::Initial(m) => {
            let levels: Vec<usize> = (0..=m).collect();
            fw_measure(a, FwShape::Levels(&levels))
        }
        FwShape::Levels(levels) => {
            if levels.is_empty() {
                return Err(Error::Precondition("empty level set".into()));
            }
            let mut sum = Rational::zero();
            for &n in levels {
                sum += a.level_density(n)?;
            }
            Ok(sum / int(levels.len() as u64))
        }
        FwShape::Tree(w) => {
            let mut sum = Rational::zero();
            for level in w.levels() {
                sum += a.density_in(level);
            }
            Ok(sum / int(w.dim() as u64 + 1))
        }
    }
}

/// A finite probability space with exact weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteProbSpace {
    points: Vec<String>,
    #[serde(with = "rational_vec")]
    weights: Vec<Rational>,
}

mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(crate::rational::format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl FiniteProbSpace {
    pub fn new(points: Vec<String>, weights: Vec<Rational>) -> Result<Self> {
        if points.len() != weights.len() || points.is_empty() {
            return Err(Error::Precondition("points and weights must be nonempty and equal in number".into()));
        }
        if weights.iter().any(|w| *w < Rational::zero()) {
            return Err(Error::Precondition("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Precondition(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(
            (0..n).map(|i| i.to_string()).collect(),
            vec![ratio(1, n as i64); n],
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FiniteProbSpace = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.points, raw.weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn event(&self, indices: impl IntoIterator<Item = usize>) -> BitSet {
        BitSet::from_indices(self.len(), indices)
    }

    pub fn measure(&self, e: &BitSet) -> Rational {
        e.iter().map(|i| &self.weights[i]).sum()
    }

    /// `μ_Y(A) = μ(A ∩ Y) / μ(Y)`, undefined when `μ(Y) = 0`.
    pub fn conditional(&self, a: &BitSet, y: &BitSet) -> Option<Rational> {
        let my = self.measure(y);
        if my.is_zero() {
            return None;
        }
        let mut ay = a.clone();
        ay.intersect_with(y);
        Some(self.measure(&ay) / my)
    }
}

/// A product of finite spaces, iterated lazily.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    factors: Vec<FiniteProbSpace>,
}

impl ProductSpace {
    pub fn new(factors: Vec<FiniteProbSpace>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[FiniteProbSpace] {
        &self.factors
    }

    /// Every point as an index tuple with its weight.
    pub fn points(&self) -> impl Iterator<Item = (Vec<usize>, Rational)> + '_ {
        let sizes: Vec<usize> = self.factors.iter().map(FiniteProbSpace::len).collect();
        let total: usize = sizes.iter().product();
        (0..total).map(move |mut r| {
            let mut idx = vec![0; sizes.len()];
            for (slot, &s) in idx.iter_mut().zip(&sizes).rev() {
                *slot = r % s;
                r /= s;
            }
            let w = idx
                .iter()
                .zip(&self.factors)
                .map(|(&i, f)| f.weights[i].clone())
                .product();
            (idx, w)
        })
    }

    /// Measure of a cylinder `E_0 × ... × E_{d-1}`.
    pub fn cylinder_measure(&self, events: &[BitSet]) -> Rational {
        self.factors
            .iter()
            .zip(events)
            .map(|(f, e)| f.measure(e))
            .product()
    }

    pub fn measure_where(&self, pred: impl Fn(&[usize]) -> bool) -> Rational {
        self.points().filter(|(p, _)| pred(p)).map(|(_, w)| w).sum()
    }
}

/// Outcome of the Markov-type selection.
#[derive(Clone, Debug, Serialize)]
pub struct MarkovCertificate {
    pub points: Vec<usize>,
    #[serde(with = "serde_rational")]
    pub measure: Rational,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    pub precondition_holds: bool,
    pub certified: bool,
}

/// `{ω : |L_ω| >= (δ/2) n}` where `L_ω = {i : ω ∈ A_i}`, with its measure
/// compared against `δ/2`.
pub fn markov_select(space: &FiniteProbSpace, events: &[BitSet], delta: &Rational) -> MarkovCertificate {
    let n = events.len();
    let threshold = delta * int(n as u64) / int(2);
    let points: Vec<usize> = (0..space.len())
        .filter(|&w| int(events.iter().filter(|e| e.contains(w)).count() as u64) >= threshold)
        .collect();
    let measure = space.measure(&space.event(points.iter().copied()));
    let bound = delta / int(2);
    let precondition_holds = events.iter().all(|e| space.measure(e) >= *delta);
    let certified = measure >= bound;
    MarkovCertificate {
        points,
        measure,
        bound,
        precondition_holds,
        certified,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionCertificate {
    pub indices: Vec<usize>,
    #[serde(with = "serde_rational")]
    pub mass: Rational,
    #[serde(with = "serde_rational")]
    pub mass_bound: Rational,
    pub equal_cells: bool,
    pub count_certified: Option<bool>,
}

/// `I = {i : μ_{Q_i}(A) >= (λ-ε) μ_{Q_i}(B) and μ_{Q_i}(B) >= βε/4}` and the
/// certificate `Σ_{i∈I} μ(Q_i) >= βε/4`.
pub fn partition_select(
    space: &FiniteProbSpace,
    a: &BitSet,
    b: &BitSet,
    cells: &[BitSet],
    lambda: &Rational,
    beta: &Rational,
    eps: &Rational,
) -> Result<PartitionCertificate> {
    if !a.is_subset(b) {
        return Err(Error::Precondition("A must be a subset of B".into()));
    }
    let (ma, mb) = (space.measure(a), space.measure(b));
    if ma < lambda * &mb {
        return Err(Error::Precondition("μ(A) < λ μ(B)".into()));
    }
    if mb < *beta {
        return Err(Error::Precondition("μ(B) < β".into()));
    }
    let mut covered = BitSet::new(space.len());
    for (i, q) in cells.iter().enumerate() {
        if covered.intersection_count(q) > 0 {
            return Err(Error::Precondition(format!("cell {i} overlaps an earlier cell")));
        }
        if space.measure(q).is_zero() {
            return Err(Error::Precondition(format!("cell {i} has measure zero")));
        }
        covered.union_with(q);
    }
    let mut outside = b.clone();
    outside.difference_with(&covered);
    let four = int(4);
    if space.measure(&outside) > eps * beta / int(2) {
        return Err(Error::Precondition("μ(B minus the cells) > εβ/2".into()));
    }
    let floor_b = beta * eps / &four;
    let mut indices = Vec::new();
    for (i, q) in cells.iter().enumerate() {
        // μ_Q(B) = 0 gives a_i = 0 and b_i = 0, so the cell never qualifies.
        let qa = space.conditional(a, q).expect("positive cell");
        let qb = space.conditional(b, q).expect("positive cell");
        if qa >= (lambda - eps) * &qb && qb >= floor_b {
            indices.push(i);
        }
    }
    let mass: Rational = indices.iter().map(|&i| space.measure(&cells[i])).sum();
    let first = space.measure(&cells[0]);
    let equal_cells = cells.iter().all(|q| space.measure(q) == first);
    let count_certified =
        equal_cells.then(|| int(indices.len() as u64) >= &floor_b * int(cells.len() as u64));
    if mass < floor_b {
        return Err(Error::Precondition(format!(
            "certificate failed: selected mass {mass} < {floor_b}"
        )));
    }
    Ok(PartitionCertificate {
        indices,
        mass,
        mass_bound: floor_b,
        equal_cells,
        count_certified,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCertificate {
    pub i: usize,
    pub j: usize,
    #[serde(with = "serde_rational")]
    pub measure: Rational,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    pub precondition_holds: bool,
}

/// The least pair `i < j` with `μ(A_i ∩ A_j) >= θ²`.
///
/// The hypotheses `0 < θ < ε <= 1`, `n >= (ε² - θ²)^{-1}` and `μ(A_i) >= ε`
/// are checked and reported; the scan runs regardless. Finding no pair is an
/// error, since under the hypotheses a pair always exists.
pub fn pair_intersect(
    space: &FiniteProbSpace,
    events: &[BitSet],
    eps: &Rational,
    theta: &Rational,
) -> Result<PairCertificate> {
    let ordered = Rational::zero() < *theta && theta < eps && *eps <= Rational::one();
    let gap = eps * eps - theta * theta;
    let enough = int(events.len() as u64) * &gap >= Rational::one();
    let dense = events.iter().all(|e| space.measure(e) >= *eps);
    let precondition_holds = ordered && enough && dense;
    let bound = theta * theta;
    for i in 0..events.len() {
        for j in i + 1..events.len() {
            let measure = space.measure(&intersection(&events[i], &events[j]));
            if measure >= bound {
                return Ok(PairCertificate {
                    i,
                    j,
                    measure,
                    bound,
                    precondition_holds,
                });
            }
        }
    }
    Err(Error::Precondition(if precondition_holds {
        "no pair reaches θ² although the hypotheses hold".into()
    } else {
        "no pair reaches θ²; the hypotheses fail".into()
    }))
}

fn intersection(a: &BitSet, b: &BitSet) -> BitSet {
    let mut c = a.clone();
    c.intersect_with(b);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{VariableWord, Word};

    #[test]
    fn fw_examples() {
        let a = WordSet::full_levels(2, &[1]).unwrap();
        assert_eq!(fw_measure(&a, FwShape::Initial(1)).unwrap(), ratio(1, 2));
        let t = CsTree::new(2, Word::parse("1").unwrap(), vec![VariableWord::parse("v").unwrap()]).unwrap();
        let a = WordSet::from_words(2, &[Word::parse("1").unwrap(), Word::parse("12").unwrap()]).unwrap();
        assert_eq!(fw_measure(&a, FwShape::Tree(&t)).unwrap(), ratio(3, 4));
        assert_eq!(
            fw_measure(&a, FwShape::Levels(&[0, 1, 2])).unwrap(),
            fw_measure(&a, FwShape::Initial(2)).unwrap()
        );
        assert!(fw_measure(&a, FwShape::Levels(&[])).is_err());
    }

    #[test]
    fn markov_examples() {
        let s = FiniteProbSpace::uniform(2).unwrap();
        let a = s.event([0]);
        let c = markov_select(&s, &[a.clone(), a], &ratio(1, 2));
        assert_eq!(c.points, vec![0]);
        assert_eq!(c.measure, ratio(1, 2));
        assert!(c.certified && c.precondition_holds);
        let full = BitSet::full(2);
        let c = markov_select(&s, &[full.clone(), full], &int(1));
        assert_eq!(c.points, vec![0, 1]);
    }

    #[test]
    fn partition_examples() {
        let s = FiniteProbSpace::uniform(4).unwrap();
        let b = BitSet::full(4);
        let a = s.event([0, 1]);
        let cells = [s.event([0, 1]), s.event([2, 3])];
        let c = partition_select(&s, &a, &b, &cells, &ratio(1, 2), &int(1), &ratio(1, 4)).unwrap();
        assert!(c.indices.contains(&0));
        assert_eq!(c.count_certified, Some(true));
        let small = [s.event([0])];
        assert!(partition_select(&s, &a, &b, &small, &ratio(1, 2), &int(1), &ratio(1, 4)).is_err());
    }

    #[test]
    fn pair_examples() {
        let s = FiniteProbSpace::uniform(4).unwrap();
        let ev = [s.event([0, 1]), s.event([1, 2]), s.event([2, 3])];
        let p = pair_intersect(&s, &ev, &ratio(1, 2), &ratio(1, 4)).unwrap();
        assert_eq!((p.i, p.j), (0, 1));
        assert_eq!(p.measure, ratio(1, 4));
        // three events are too few for the estimate at these parameters
        assert!(!p.precondition_holds);
        let same: Vec<BitSet> = (0..6).map(|_| s.event([0, 1])).collect();
        let p = pair_intersect(&s, &same, &ratio(1, 2), &ratio(1, 4)).unwrap();
        assert!(p.precondition_holds);
        assert_eq!((p.i, p.j), (0, 1));
        let disjoint = [s.event([0]), s.event([1])];
        assert!(pair_intersect(&s, &disjoint, &ratio(1, 4), &ratio(1, 8)).is_err());
    }

    #[test]
    fn product_space_measures() {
        let p = ProductSpace::new(vec![FiniteProbSpace::uniform(2).unwrap(), FiniteProbSpace::uniform(3).unwrap()]);
        assert_eq!(p.points().count(), 6);
        let e = [BitSet::from_indices(2, [0]), BitSet::from_indices(3, [0, 2])];
        let direct = p.measure_where(|x| x[0] == 0 && x[1] != 1);
        assert_eq!(p.cylinder_measure(&e), direct);
        assert_eq!(direct, ratio(1, 3));
    }
}
