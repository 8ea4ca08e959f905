//! Energy of level sets, `(ε, L)`-regularity and the energy-increment search
//! for regular level sets, including the `τ`-sparse variant.

use num::{BigUint, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rational::{abs_diff, floor, frac, pow, Rational};
use crate::words::{level_size, Letter, Word};
use crate::wordset::WordSet;

/// A subset of a single level `[k]^n`, viewed through its rank bitset.
#[derive(Clone, Copy, Debug)]
pub struct LevelView<'a> {
    k: u32,
    n: usize,
    bits: &'a BitSet,
}

impl<'a> LevelView<'a> {
    pub fn new(k: u32, n: usize, bits: &'a BitSet) -> Result<Self> {
        let size = level_size(k, n)?;
        if bits.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                got: bits.len(),
            });
        }
        Ok(Self { k, n, bits })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn density(&self) -> Rational {
        frac(self.bits.count(), self.bits.len() as u64)
    }

    fn check_positions(&self, sets: &[&[usize]]) -> Result<()> {
        let mut seen = vec![false; self.n];
        for s in sets {
            for &p in *s {
                if p >= self.n {
                    return Err(Error::OutOfRange(format!("coordinate {p} outside 0..{}", self.n)));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::Precondition(format!("coordinate {p} repeated")));
                }
            }
        }
        Ok(())
    }

    /// `|A_y|` for every `y ∈ [k]^positions`, indexed by the lexicographic
    /// rank of `y` read along `positions` in the order given.
    pub fn section_counts(&self, positions: &[usize]) -> Result<Vec<u64>> {
        self.check_positions(&[positions])?;
        let k = self.k as usize;
        let cells = level_size(self.k, positions.len())?;
        let weights: Vec<usize> = positions
            .iter()
            .map(|&p| k.pow((self.n - 1 - p) as u32))
            .collect();
        let mut counts = vec![0u64; cells];
        for r in self.bits.iter() {
            let idx = weights.iter().fold(0usize, |acc, &w| acc * k + (r / w) % k);
            counts[idx] += 1;
        }
        Ok(counts)
    }

    fn section_size(&self, fixed: usize) -> u64 {
        (self.k as u64).pow((self.n - fixed) as u32)
    }

    /// `dens(A_y)` for `y ∈ [k]^positions`.
    pub fn section_density(&self, positions: &[usize], y: &[Letter]) -> Result<Rational> {
        if y.len() != positions.len() {
            return Err(Error::LengthMismatch {
                expected: positions.len(),
                got: y.len(),
            });
        }
        let counts = self.section_counts(positions)?;
        let idx = Word(y.to_vec()).rank(self.k);
        Ok(frac(counts[idx], self.section_size(positions.len())))
    }

    /// `e_I(A) = avg_{y ∈ [k]^I} dens(A_y)^2`.
    pub fn energy(&self, positions: &[usize]) -> Result<Rational> {
        let counts = self.section_counts(positions)?;
        let sq: BigUint = counts.iter().map(|&c| BigUint::from(c) * c).sum();
        let sec = BigUint::from(self.section_size(positions.len()));
        let den = &sec * &sec * BigUint::from(counts.len());
        Ok(Rational::new(sq.into(), den.into()))
    }

    /// `e_{I∪J}(A) - e_J(A)` for disjoint `I`, `J`.
    pub fn energy_gap(&self, i: &[usize], j: &[usize]) -> Result<Rational> {
        self.check_positions(&[i, j])?;
        let both: Vec<usize> = i.iter().chain(j).copied().collect();
        Ok(self.energy(&both)? - self.energy(j)?)
    }

    /// `dens(A_{(y,z)})` as a `|[k]^I| × |[k]^J|` table.
    fn pair_table(&self, i: &[usize], j: &[usize]) -> Result<Vec<Vec<Rational>>> {
        self.check_positions(&[i, j])?;
        let both: Vec<usize> = i.iter().chain(j).copied().collect();
        let counts = self.section_counts(&both)?;
        let zs = level_size(self.k, j.len())?;
        let sec = self.section_size(both.len());
        Ok(counts
            .chunks(zs)
            .map(|row| row.iter().map(|&c| frac(c, sec)).collect())
            .collect())
    }

    /// `avg_z avg_y (dens A_{(y,z)} - avg_y dens A_{(y,z)})^2`.
    pub fn variance_gap(&self, i: &[usize], j: &[usize]) -> Result<Rational> {
        let table = self.pair_table(i, j)?;
        let ys = table.len();
        let zs = table[0].len();
        let mut total = Rational::zero();
        for z in 0..zs {
            let mean: Rational = table.iter().map(|row| &row[z]).sum::<Rational>() / Rational::from_integer(ys.into());
            for row in &table {
                let d = &row[z] - &mean;
                total += &d * &d;
            }
        }
        Ok(total / Rational::from_integer((ys * zs).into()))
    }

    /// Density of `{z ∈ [k]^J : |dens A_{(y,z)} - dens A_z| <= ε for all y ∈ [k]^I}`.
    pub fn z_set_density(&self, i: &[usize], j: &[usize], eps: &Rational) -> Result<Rational> {
        let table = self.pair_table(i, j)?;
        let ys = table.len();
        let zs = table[0].len();
        let good = (0..zs)
            .filter(|&z| {
                let mean: Rational =
                    table.iter().map(|row| &row[z]).sum::<Rational>() / Rational::from_integer(ys.into());
                table.iter().all(|row| abs_diff(&row[z], &mean) <= *eps)
            })
            .count();
        Ok(frac(good as u64, zs as u64))
    }

    /// `max_{y ∈ [k]^I} |dens(A_y) - dens(A)|` with the least maximizing `y`.
    pub fn max_deviation(&self, positions: &[usize]) -> Result<(Rational, Word)> {
        let counts = self.section_counts(positions)?;
        let sec = self.section_size(positions.len());
        let dens = self.density();
        let mut best = (Rational::zero(), 0usize);
        for (idx, &c) in counts.iter().enumerate() {
            let d = abs_diff(&frac(c, sec), &dens);
            if d > best.0 {
                best = (d, idx);
            }
        }
        Ok((best.0, Word::unrank(self.k, positions.len(), best.1)))
    }
}

/// A `τ`-sparse finite level set: distinct elements differ by at least `τ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseLevels {
    tau: usize,
    levels: Vec<usize>,
}

impl SparseLevels {
    pub fn new(tau: usize, levels: &[usize]) -> Result<Self> {
        if tau == 0 {
            return Err(Error::OutOfRange("sparseness needs tau >= 1".into()));
        }
        let mut v = levels.to_vec();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::Precondition("level set must be nonempty".into()));
        }
        if !is_sparse(tau, &v) {
            return Err(Error::Precondition(format!("{v:?} is not {tau}-sparse")));
        }
        Ok(Self { tau, levels: v })
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// `(L)_τ = L + {0, ..., τ-1}`.
    pub fn extension(&self) -> Vec<usize> {
        extension(self.tau, &self.levels)
    }
}

pub fn is_sparse(tau: usize, sorted: &[usize]) -> bool {
    sorted.windows(2).all(|w| w[1] - w[0] >= tau)
}

pub fn extension(tau: usize, levels: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = levels.iter().flat_map(|&l| l..l + tau).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// A failed instance of the regularity inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub member: usize,
    pub level: usize,
    /// The subset `I` of earlier levels.
    pub subset: Vec<usize>,
    /// The coordinates actually fixed: `I`, or `(I)_τ` in the sparse case.
    pub coordinates: Vec<usize>,
    pub section: Word,
    #[serde(with = "crate::rational::serde_rational")]
    pub section_density: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub level_density: Rational,
}

fn subsets(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u64..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}

/// First violation of `(ε, L)`-regularity (or `(ε, τ, L)`-regularity when
/// `tau` is given), scanning members, then levels, then subsets by bitmask.
pub fn find_violation(
    family: &[WordSet],
    eps: &Rational,
    levels: &[usize],
    tau: Option<usize>,
) -> Result<Option<Violation>> {
    let mut l = levels.to_vec();
    l.sort_unstable();
    l.dedup();
    if l.is_empty() {
        return Err(Error::Precondition("level set must be nonempty".into()));
    }
    if let Some(t) = tau {
        SparseLevels::new(t, &l)?;
    }
    for (member, a) in family.iter().enumerate() {
        for (idx, &n) in l.iter().enumerate() {
            let bits = a.level_bits(n)?;
            let view = LevelView::new(a.k(), n, &bits)?;
            let dens = view.density();
            for subset in subsets(&l[..idx]) {
                let coordinates = match tau {
                    Some(t) => extension(t, &subset),
                    None => subset.clone(),
                };
                let (dev, y) = view.max_deviation(&coordinates)?;
                if dev > *eps {
                    let section_density = view.section_density(&coordinates, &y.0)?;
                    return Ok(Some(Violation {
                        member,
                        level: n,
                        subset,
                        coordinates,
                        section: y,
                        section_density,
                        level_density: dens,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_regular(family: &[WordSet], eps: &Rational, levels: &[usize], tau: Option<usize>) -> Result<bool> {
    Ok(find_violation(family, eps, levels, tau)?.is_none())
}

/// `ρ = min{ε, k^{-ℓ}/2}`, or `min{ε, k^{-τ(ℓ+1)}/2}` in the sparse case.
pub fn rho(k: u32, ell: usize, eps: &Rational, tau: Option<usize>) -> Rational {
    let exp = match tau {
        Some(t) => t * (ell + 1),
        None => ell,
    };
    let cap = pow(&Rational::from_integer(k.into()), -(exp as i64)) / Rational::from_integer(2.into());
    if *eps < cap {
        eps.clone()
    } else {
        cap
    }
}

/// `F(m) = (q⌊16ρ^{-4}⌋+1)m + 1`, or `(q⌊16ρ^{-4}⌋+1)(m+1) + 1` in the sparse case.
pub fn step_function(k: u32, ell: usize, q: usize, eps: &Rational, tau: Option<usize>) -> impl Fn(&BigUint) -> BigUint {
    let r = rho(k, ell, eps, tau);
    let r4 = pow(&r, -4) * Rational::from_integer(16.into());
    let slope = BigUint::from(q) * floor(&r4).to_biguint().expect("positive") + 1u32;
    let sparse = tau.is_some();
    move |m: &BigUint| {
        if sparse {
            &slope * (m + 1u32) + 1u32
        } else {
            &slope * m + 1u32
        }
    }
}

/// `F^{(ℓ)}(0)` if it does not exceed `limit`.
pub fn strict_size(k: u32, ell: usize, q: usize, eps: &Rational, tau: Option<usize>, limit: usize) -> Option<usize> {
    let f = step_function(k, ell, q, eps, tau);
    let mut v = BigUint::zero();
    for _ in 0..ell {
        v = f(&v);
        if v > BigUint::from(limit) {
            return None;
        }
    }
    v.to_usize()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegMode {
    /// Only run when `|N|` reaches the proven size.
    Strict,
    /// Fall back to shorter blocks and then to exhaustive search.
    BestEffort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegPath {
    Strict,
    EnergyIncrement,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regularized {
    pub levels: Vec<usize>,
    pub path: RegPath,
    /// The chosen block index at each energy step.
    pub blocks: Vec<usize>,
}

struct Step {
    block: usize,
    chosen: Vec<usize>,
    within_threshold: bool,
}

/// One energy-increment step on `M` with block size `m`: scans the blocks
/// `I_p` of `M \ {max M}` (or of its `τ`-extension) against `J_p = [0, min I_p)`.
fn energy_step(
    family: &[WordSet],
    current: &[usize],
    m: usize,
    threshold: &Rational,
    tau: Option<usize>,
) -> Result<Option<Step>> {
    let Some((&top, rest)) = current.split_last() else {
        return Ok(None);
    };
    let coords = match tau {
        Some(t) => extension(t, rest),
        None => rest.to_vec(),
    };
    let width = match tau {
        Some(t) => t * (m + 1),
        None => m,
    };
    if width == 0 || coords.len() < width {
        return Ok(None);
    }
    let blocks = coords.len() / width;
    let views: Vec<BitSet> = family
        .iter()
        .map(|a| a.level_bits(top))
        .collect::<Result<_>>()?;
    let k = family.first().map_or(2, WordSet::k);
    let gaps: Vec<Rational> = (0..blocks)
        .into_par_iter()
        .map(|p| -> Result<Rational> {
            let block = &coords[p * width..(p + 1) * width];
            let j: Vec<usize> = (0..block[0]).collect();
            let mut worst = Rational::zero();
            for bits in &views {
                let g = LevelView::new(k, top, bits)?.energy_gap(block, &j)?;
                if g > worst {
                    worst = g;
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (p, within) = match gaps.iter().position(|g| g <= threshold) {
        Some(p) => (p, true),
        None => {
            let best = gaps.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).map(|(i, _)| i);
            (best.expect("at least one block"), false)
        }
    };
    let block = &coords[p * width..(p + 1) * width];
    let chosen = match tau {
        Some(t) => rest
            .iter()
            .copied()
            .filter(|&l| (l..l + t).all(|x| block.binary_search(&x).is_ok()))
            .take(m)
            .collect(),
        None => block.to_vec(),
    };
    Ok(Some(Step {
        block: p,
        chosen,
        within_threshold: within,
    }))
}

/// Runs `ℓ` nested energy steps starting from `m0`; `sizes[i]` is the block size
/// used to produce `M_{i+1}`.
fn energy_path(
    family: &[WordSet],
    m0: &[usize],
    sizes: &[usize],
    threshold: &Rational,
    tau: Option<usize>,
) -> Result<Option<(Vec<usize>, Vec<usize>, bool)>> {
    let mut current = m0.to_vec();
    let mut tops = vec![*current.last().expect("nonempty")];
    let mut blocks = Vec::new();
    let mut all_within = true;
    for &m in sizes {
        let Some(step) = energy_step(family, &current, m, threshold, tau)? else {
            return Ok(None);
        };
        all_within &= step.within_threshold;
        blocks.push(step.block);
        current = step.chosen;
        if current.len() < m {
            return Ok(None);
        }
        tops.push(*current.last().expect("nonempty"));
    }
    tops.reverse();
    Ok(Some((tops, blocks, all_within)))
}

/// Lexicographically least `ℓ`-subset of `N` passing the regularity check.
fn exhaustive(family: &[WordSet], eps: &Rational, n: &[usize], ell: usize, tau: Option<usize>) -> Result<Option<Vec<usize>>> {
    fn rec(
        family: &[WordSet],
        eps: &Rational,
        n: &[usize],
        ell: usize,
        tau: Option<usize>,
        start: usize,
        acc: &mut Vec<usize>,
    ) -> Result<bool> {
        if acc.len() == ell {
            return Ok(find_violation(family, eps, acc, tau)?.is_none());
        }
        for i in start..n.len() {
            if n.len() - i < ell - acc.len() {
                break;
            }
            if let (Some(t), Some(&last)) = (tau, acc.last()) {
                if n[i] - last < t {
                    continue;
                }
            }
            acc.push(n[i]);
            if rec(family, eps, n, ell, tau, i + 1, acc)? {
                return Ok(true);
            }
            acc.pop();
        }
        Ok(false)
    }
    let mut acc = Vec::new();
    Ok(rec(family, eps, n, ell, tau, 0, &mut acc)?.then_some(acc))
}

/// Finds `L ⊆ N` with `|L| = ℓ` such that the family is `(ε, L)`-regular
/// (`(ε, τ, L)`-regular when `tau` is given). Every answer is re-checked.
pub fn regularize(
    family: &[WordSet],
    eps: &Rational,
    ell: usize,
    candidates: &[usize],
    tau: Option<usize>,
    mode: RegMode,
) -> Result<Regularized> {
    if ell == 0 {
        return Err(Error::OutOfRange("ell must be at least 1".into()));
    }
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::OutOfRange("eps must lie in (0, 1]".into()));
    }
    if family.is_empty() {
        return Err(Error::Precondition("family must be nonempty".into()));
    }
    let k = family[0].k();
    if family.iter().any(|a| a.k() != k) {
        return Err(Error::Precondition("family members use different alphabets".into()));
    }
    let mut n = candidates.to_vec();
    n.sort_unstable();
    n.dedup();
    if n.len() < ell {
        return Err(Error::Precondition(format!("need at least {ell} candidate levels, got {}", n.len())));
    }
    if let Some(t) = tau {
        SparseLevels::new(t, &n)?;
    }
    let r = rho(k, ell, eps, tau);
    let threshold = pow(&r, 4) / Rational::from_integer(16.into());
    let q = family.len();

    let certify = |levels: Vec<usize>, path: RegPath, blocks: Vec<usize>| -> Result<Option<Regularized>> {
        Ok(find_violation(family, eps, &levels, tau)?
            .is_none()
            .then_some(Regularized { levels, path, blocks }))
    };

    if let Some(size) = strict_size(k, ell, q, eps, tau, n.len()) {
        let f = step_function(k, ell, q, eps, tau);
        let mut iterates = vec![BigUint::zero()];
        for i in 0..ell {
            let next = f(&iterates[i]);
            iterates.push(next);
        }
        let sizes: Vec<usize> = (1..ell)
            .map(|i| iterates[ell - i].to_usize().expect("fits under the limit"))
            .collect();
        if let Some((levels, blocks, _)) = energy_path(family, &n[..size], &sizes, &threshold, tau)? {
            if let Some(out) = certify(levels, RegPath::Strict, blocks)? {
                return Ok(out);
            }
        }
        return Err(Error::BestEffortFailure("strict energy path produced an irregular set".into()));
    }
    if mode == RegMode::Strict {
        return Err(Error::Precondition(format!(
            "{} candidate levels are below the proven size F^({ell})(0)",
            n.len()
        )));
    }
    let sizes: Vec<usize> = (1..ell).map(|i| ell - i).collect();
    if let Some((levels, blocks, _)) = energy_path(family, &n, &sizes, &threshold, tau)? {
        if let Some(out) = certify(levels, RegPath::EnergyIncrement, blocks)? {
            return Ok(out);
        }
    }
    match exhaustive(family, eps, &n, ell, tau)? {
        Some(levels) => Ok(Regularized {
            levels,
            path: RegPath::Exhaustive,
            blocks: Vec::new(),
        }),
        None => Err(Error::BestEffortFailure(format!(
            "no {ell}-subset of {n:?} is regular at eps = {eps}"
        ))),
    }
}

/// Interval search on a single family of subsets of `[k]^{max N}`:
/// a block `M` of `N \ {max N}` of size `m` on which all sections along subsets
/// of `M` stay within `ε` of the level density.
pub fn stable_interval(family: &[WordSet], eps: &Rational, m: usize, candidates: &[usize]) -> Result<Option<Vec<usize>>> {
    let mut n = candidates.to_vec();
    n.sort_unstable();
    n.dedup();
    let threshold = pow(eps, 4) / Rational::from_integer(16.into());
    Ok(energy_step(family, &n, m, &threshold, None)?
        .filter(|s| s.within_threshold)
        .map(|s| s.chosen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn level(k: u32, n: usize, words: &[&str]) -> BitSet {
        let size = level_size(k, n).unwrap();
        BitSet::from_indices(size, words.iter().map(|w| Word::parse(w).unwrap().rank(k)))
    }

    fn family(k: u32, words: &[&str]) -> WordSet {
        let ws: Vec<Word> = words.iter().map(|w| Word::parse(w).unwrap()).collect();
        WordSet::from_words(k, &ws).unwrap()
    }

    #[test]
    fn energy_examples() {
        let full = BitSet::full(4);
        let v = LevelView::new(2, 2, &full).unwrap();
        assert_eq!(v.energy(&[0]).unwrap(), ratio(1, 1));
        let a = level(2, 2, &["11", "12"]);
        let v = LevelView::new(2, 2, &a).unwrap();
        assert_eq!(v.energy(&[]).unwrap(), ratio(1, 4));
        assert_eq!(v.energy(&[0]).unwrap(), ratio(1, 2));
        assert_eq!(v.energy(&[1]).unwrap(), ratio(1, 4));
    }

    #[test]
    fn variance_identity_on_sample() {
        let a = level(2, 3, &["111", "122", "212", "221", "222"]);
        let v = LevelView::new(2, 3, &a).unwrap();
        for (i, j) in [(vec![0], vec![1]), (vec![2], vec![0, 1]), (vec![1, 2], vec![])] {
            assert_eq!(v.energy_gap(&i, &j).unwrap(), v.variance_gap(&i, &j).unwrap());
        }
        assert!(v.energy_gap(&[0], &[0]).is_err());
    }

    #[test]
    fn regularity_examples() {
        let eps = ratio(1, 10);
        assert!(is_regular(&[WordSet::new(2).unwrap()], &eps, &[1, 2], None).unwrap());
        assert!(is_regular(&[WordSet::full_levels(2, &[1, 2]).unwrap()], &eps, &[1, 2], None).unwrap());
        assert!(is_regular(&[family(2, &["1", "11", "12"])], &eps, &[1, 2], None).unwrap());
        // Single coordinates split {11, 22} evenly; fixing both does not.
        let diag = family(2, &["11", "22"]);
        assert!(is_regular(&[diag.clone()], &eps, &[1, 2], None).unwrap());
        let v = find_violation(&[diag], &eps, &[0, 1, 2], None).unwrap().unwrap();
        assert_eq!(v.level, 2);
        assert_eq!(v.subset, vec![0, 1]);
        assert_eq!(v.section, Word::parse("11").unwrap());
        assert_eq!(v.section_density, ratio(1, 1));
        assert_eq!(v.level_density, ratio(1, 2));
        let w = find_violation(&[family(2, &["11", "21"])], &eps, &[1, 2], None).unwrap();
        assert_eq!(w.unwrap().coordinates, vec![1]);
    }

    #[test]
    fn sparse_extension() {
        let s = SparseLevels::new(2, &[0, 3, 5]).unwrap();
        assert_eq!(s.extension(), vec![0, 1, 3, 4, 5, 6]);
        assert!(SparseLevels::new(3, &[0, 2]).is_err());
    }

    #[test]
    fn strict_size_matches_hand_value() {
        assert_eq!(strict_size(2, 1, 1, &ratio(1, 4), None, 10), Some(1));
        assert_eq!(strict_size(2, 2, 1, &ratio(1, 4), None, 1 << 20), Some(65538));
    }

    #[test]
    fn regularize_full_and_adversarial() {
        let full = WordSet::full_levels(2, &[1, 2, 3, 4]).unwrap();
        let out = regularize(&[full.clone()], &ratio(1, 4), 2, &[1, 2, 3, 4], None, RegMode::BestEffort).unwrap();
        assert!(is_regular(&[full], &ratio(1, 4), &out.levels, None).unwrap());
        let a = family(2, &["11", "22", "111", "112", "1111", "2222", "121212"]);
        let out = regularize(&[a.clone()], &ratio(1, 2), 2, &[1, 2, 3, 4, 5, 6], None, RegMode::BestEffort).unwrap();
        assert_eq!(out.levels.len(), 2);
        assert!(is_regular(&[a], &ratio(1, 2), &out.levels, None).unwrap());
    }

    #[test]
    fn regularize_single_level_strict() {
        let a = family(2, &["1", "12"]);
        let out = regularize(&[a], &ratio(1, 4), 1, &[1, 2, 3], None, RegMode::Strict).unwrap();
        assert_eq!(out.levels, vec![1]);
        assert_eq!(out.path, RegPath::Strict);
    }

    #[test]
    fn regularize_sparse() {
        let a = family(2, &["11", "1211", "1122", "2121", "111111"]);
        let out = regularize(&[a.clone()], &ratio(1, 2), 2, &[0, 2, 4, 6], Some(2), RegMode::BestEffort).unwrap();
        assert!(is_regular(&[a], &ratio(1, 2), &out.levels, Some(2)).unwrap());
    }
}
