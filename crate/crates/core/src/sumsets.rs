//! Product-set machinery on finite abelian groups: bit-vector class sets,
//! pointwise translated-OR products, stabilizer subgroups, Kneser's
//! inequality and the stabilizer-index case analysis that turns a dense
//! class set into a guaranteed fraction of the group covered by `A*A`.
//!
//! Two group flavours are supported: the unit group `(Z/qZ)^*` (the one the
//! theorem lives on) and small additive cyclic groups `Z/n`, which exercise
//! nontrivial stabilizers in tests.

use std::sync::Arc;

use num_rational::Ratio;
use thiserror::Error;

use crate::arith::{self, BoundReport, UnitGroupStructure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SumsetError {
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error("class sets live on different groups")]
    GroupMismatch,
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("residue {0} is not a unit modulo {1}")]
    NotAUnit(u64, u64),
    #[error("set density {size}/{order} is below the required 13/32")]
    DensityTooLow { size: u64, order: u64 },
    #[error("set does not generate the group")]
    NotGenerating,
    #[error(
        "stabilizer has index 2 but A*A does not meet both cosets of the kernel; \
         the index-2 argument does not apply to this set"
    )]
    KernelHypothesis,
}

#[derive(Debug)]
enum GroupRepr {
    Units(UnitGroupStructure),
    Cyclic(u64),
}

/// A finite abelian group with elements indexed `0..order`.
///
/// Cheap to clone; all sets on the same group share one representation.
#[derive(Clone, Debug)]
pub struct Group {
    repr: Arc<GroupRepr>,
}

impl Group {
    /// The multiplicative group `(Z/qZ)^*`.
    pub fn units(q: u64) -> Result<Group, SumsetError> {
        Ok(Group::from_unit_structure(arith::unit_group(q)?))
    }

    pub fn from_unit_structure(g: UnitGroupStructure) -> Group {
        Group {
            repr: Arc::new(GroupRepr::Units(g)),
        }
    }

    /// The additive cyclic group `Z/n`, written multiplicatively here.
    pub fn cyclic(n: u64) -> Group {
        assert!(n >= 1, "cyclic group needs n >= 1");
        Group {
            repr: Arc::new(GroupRepr::Cyclic(n)),
        }
    }

    pub fn order(&self) -> u64 {
        match &*self.repr {
            GroupRepr::Units(g) => g.phi(),
            GroupRepr::Cyclic(n) => *n,
        }
    }

    /// The modulus `q` for unit groups, `n` for cyclic groups.
    pub fn modulus(&self) -> u64 {
        match &*self.repr {
            GroupRepr::Units(g) => g.modulus(),
            GroupRepr::Cyclic(n) => *n,
        }
    }

    pub fn unit_structure(&self) -> Option<&UnitGroupStructure> {
        match &*self.repr {
            GroupRepr::Units(g) => Some(g),
            GroupRepr::Cyclic(_) => None,
        }
    }

    pub fn identity(&self) -> usize {
        match &*self.repr {
            GroupRepr::Units(g) => g.identity_index(),
            GroupRepr::Cyclic(_) => 0,
        }
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &*self.repr {
            GroupRepr::Units(g) => g.mul_idx(i, j),
            GroupRepr::Cyclic(n) => ((i as u64 + j as u64) % n) as usize,
        }
    }

    pub fn inv(&self, i: usize) -> usize {
        match &*self.repr {
            GroupRepr::Units(g) => g.inv_idx(i),
            GroupRepr::Cyclic(n) => ((n - i as u64) % n) as usize,
        }
    }

    /// The residue a set element index stands for.
    pub fn element(&self, i: usize) -> u64 {
        match &*self.repr {
            GroupRepr::Units(g) => g.unit_at(i),
            GroupRepr::Cyclic(_) => i as u64,
        }
    }

    /// Index of a residue, if it names a group element.
    pub fn index_of(&self, r: u64) -> Option<usize> {
        match &*self.repr {
            GroupRepr::Units(g) => g.index_of(r),
            GroupRepr::Cyclic(n) => Some((r % n) as usize),
        }
    }

    pub fn same_group(&self, other: &Group) -> bool {
        match (&*self.repr, &*other.repr) {
            (GroupRepr::Units(a), GroupRepr::Units(b)) => a.modulus() == b.modulus(),
            (GroupRepr::Cyclic(a), GroupRepr::Cyclic(b)) => a == b,
            _ => false,
        }
    }
}

/// Subset of a group as a bit vector indexed by element index.
#[derive(Clone, Debug)]
pub struct ClassSet {
    group: Group,
    bits: Vec<u64>,
}

impl PartialEq for ClassSet {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_group(&other.group) && self.bits == other.bits
    }
}

impl ClassSet {
    pub fn empty(group: &Group) -> ClassSet {
        let words = (group.order() as usize).div_ceil(64);
        ClassSet {
            group: group.clone(),
            bits: vec![0; words],
        }
    }

    pub fn full(group: &Group) -> ClassSet {
        let mut s = ClassSet::empty(group);
        for w in &mut s.bits {
            *w = u64::MAX;
        }
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let order = self.group.order() as usize;
        let extra = self.bits.len() * 64 - order;
        if extra > 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= u64::MAX >> extra;
        }
    }

    pub fn from_indices(group: &Group, idx: impl IntoIterator<Item = usize>) -> ClassSet {
        let mut s = ClassSet::empty(group);
        for i in idx {
            s.insert_index(i);
        }
        s
    }

    /// Builds a set from residues; fails on residues outside the group.
    pub fn from_residues(
        group: &Group,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<ClassSet, SumsetError> {
        let mut s = ClassSet::empty(group);
        for r in residues {
            let i = group
                .index_of(r)
                .ok_or(SumsetError::NotAUnit(r, group.modulus()))?;
            s.insert_index(i);
        }
        Ok(s)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    #[inline]
    pub fn insert_index(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains_index(&self, i: usize) -> bool {
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn contains_residue(&self, r: u64) -> bool {
        self.group
            .index_of(r)
            .is_some_and(|i| self.contains_index(i))
    }

    /// Cardinality (popcount).
    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.group.order()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let base = wi * 64;
            SetBits { word: w, base }
        })
    }

    /// Member residues, in increasing element-index order.
    pub fn residues(&self) -> Vec<u64> {
        self.indices().map(|i| self.group.element(i)).collect()
    }

    pub fn or_assign(&mut self, other: &ClassSet) {
        debug_assert!(self.group.same_group(&other.group));
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> ClassSet {
        let mut out = self.clone();
        for w in &mut out.bits {
            *w = !*w;
        }
        out.mask_tail();
        out
    }

    pub fn intersect(&self, other: &ClassSet) -> ClassSet {
        debug_assert!(self.group.same_group(&other.group));
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        out
    }

    pub fn is_subset_of(&self, other: &ClassSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// The translate `g * S` (one shifted-OR pass; a group translation,
    /// not an integer shift).
    pub fn translate(&self, g: usize) -> ClassSet {
        let mut out = ClassSet::empty(&self.group);
        for i in self.indices() {
            out.insert_index(self.group.mul(g, i));
        }
        out
    }

    /// OR the translate `g * S` into `self`.
    pub fn or_translate(&mut self, src: &ClassSet, g: usize) {
        debug_assert!(self.group.same_group(&src.group));
        let group = self.group.clone();
        for i in src.indices() {
            self.insert_index(group.mul(g, i));
        }
    }
}

struct SetBits {
    word: u64,
    base: usize,
}

impl Iterator for SetBits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

/// The product set `A * B = { ab : a in A, b in B }`, computed by
/// translated-OR passes of the smaller set over the larger one.
pub fn product_set(a: &ClassSet, b: &ClassSet) -> Result<ClassSet, SumsetError> {
    if !a.group().same_group(b.group()) {
        return Err(SumsetError::GroupMismatch);
    }
    let (outer, inner) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = ClassSet::empty(a.group());
    for g in outer.indices() {
        out.or_translate(inner, g);
    }
    Ok(out)
}

/// A subgroup of the ambient group, stored as its element set.
#[derive(Clone, Debug, PartialEq)]
pub struct Subgroup {
    pub elements: ClassSet,
    pub index: u64,
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.elements.len()
    }
}

/// The stabilizer `H = { h : hS = S }`, by direct scan over the group.
pub fn stabilizer(s: &ClassSet) -> Result<Subgroup, SumsetError> {
    if s.is_empty() {
        return Err(SumsetError::EmptySet);
    }
    let group = s.group();
    let order = group.order() as usize;
    let mut elements = ClassSet::empty(group);
    let members: Vec<usize> = s.indices().collect();
    'h: for h in 0..order {
        // |hS| = |S|, so hS subset of S suffices.
        for &i in &members {
            if !s.contains_index(group.mul(h, i)) {
                continue 'h;
            }
        }
        elements.insert_index(h);
    }
    let size = elements.len();
    debug_assert_eq!(group.order() % size, 0);
    Ok(Subgroup {
        index: group.order() / size,
        elements,
    })
}

/// Smallest subgroup containing `A` (multiplicative closure).
pub fn generated_subgroup(a: &ClassSet) -> Result<ClassSet, SumsetError> {
    if a.is_empty() {
        return Err(SumsetError::EmptySet);
    }
    let group = a.group();
    let mut closure = ClassSet::empty(group);
    closure.insert_index(group.identity());
    let gens: Vec<usize> = a.indices().collect();
    let mut frontier: Vec<usize> = vec![group.identity()];
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            let y = group.mul(g, x);
            if !closure.contains_index(y) {
                closure.insert_index(y);
                frontier.push(y);
            }
        }
    }
    Ok(closure)
}

/// Verifies Kneser's inequality `|A*B| >= |A*H| + |B*H| - |H|` with
/// `H = stab(A*B)` on concrete sets.
pub fn kneser_check(a: &ClassSet, b: &ClassSet) -> Result<BoundReport, SumsetError> {
    if a.is_empty() || b.is_empty() {
        return Err(SumsetError::EmptySet);
    }
    let ab = product_set(a, b)?;
    let h = stabilizer(&ab)?;
    let ah = product_set(a, &h.elements)?;
    let bh = product_set(b, &h.elements)?;
    let lhs = ab.len();
    let rhs = ah.len() + bh.len() - h.order();
    Ok(BoundReport::exact(
        format!(
            "|A*B| >= |A*H| + |B*H| - |H| on {} (|A|={}, |B|={})",
            group_label(a.group()),
            a.len(),
            b.len()
        ),
        lhs as f64,
        rhs as f64,
        crate::arith::Relation::GreaterEq,
        lhs >= rhs,
    ))
}

fn group_label(g: &Group) -> String {
    match g.unit_structure() {
        Some(u) => format!("(Z/{})^*", u.modulus()),
        None => format!("Z/{}", g.modulus()),
    }
}

/// Which branch of the stabilizer-index case analysis fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    Index1,
    Index2,
    Index3,
    Index4,
    LargeIndex(u64),
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseLabel::Index1 => write!(f, "index 1"),
            CaseLabel::Index2 => write!(f, "index 2"),
            CaseLabel::Index3 => write!(f, "index 3"),
            CaseLabel::Index4 => write!(f, "index 4"),
            CaseLabel::LargeIndex(y) => write!(f, "index {y}"),
        }
    }
}

/// Guaranteed value of `|A*A| / |G|` produced by the case analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseBound {
    pub fraction: Ratio<u64>,
    pub case: CaseLabel,
}

/// Number of `H`-cosets met by `A*H` that the density alone forces:
/// `ceil(index * |A| / |G|)`.
pub fn coset_count_lower(index: u64, set_size: u64, group_order: u64) -> u64 {
    Ratio::new(index * set_size, group_order)
        .ceil()
        .to_integer()
}

/// The large-index fraction `(2 * ceil(Y/U) - 1) / Y` expressed through the
/// coset count.
pub fn large_index_fraction(index: u64, cosets: u64) -> Ratio<u64> {
    Ratio::new(2 * cosets - 1, index)
}

/// Stabilizer-index case analysis for a set `A` of density at least 13/32
/// that generates the group: returns the fraction of the group that `A*A`
/// is guaranteed to cover, together with the case that fired.
///
/// Index 1, 2 or 3 force `A*A = G`; index 4 forces 3/4; index `Y >= 5`
/// forces `(2*ceil(Y/U) - 1)/Y >= 7/10` where `U = |G|/|A|`. The index-2
/// branch requires `A*A` to meet both cosets of the stabilizer (the kernel
/// of the associated quadratic character); this is checked on the actual
/// data and a typed error is returned when it fails.
pub fn case_analysis_lower_bound(a: &ClassSet) -> Result<CaseBound, SumsetError> {
    let group = a.group();
    let order = group.order();
    let size = a.len();
    if 32 * size < 13 * order {
        return Err(SumsetError::DensityTooLow { size, order });
    }
    if !generated_subgroup(a)?.is_full() {
        return Err(SumsetError::NotGenerating);
    }
    let aa = product_set(a, a)?;
    let h = stabilizer(&aa)?;
    let (fraction, case) = match h.index {
        1 => (Ratio::from_integer(1), CaseLabel::Index1),
        2 => {
            // A*A is a union of H-cosets; with a point in the kernel and one
            // outside it, A*A covers both cosets, i.e. A*A = G.
            let in_kernel = !aa.intersect(&h.elements).is_empty();
            let off_kernel = !aa.intersect(&h.elements.complement()).is_empty();
            if !(in_kernel && off_kernel) {
                return Err(SumsetError::KernelHypothesis);
            }
            (Ratio::from_integer(1), CaseLabel::Index2)
        }
        3 => (Ratio::from_integer(1), CaseLabel::Index3),
        4 => (Ratio::new(3, 4), CaseLabel::Index4),
        y => {
            let cosets = coset_count_lower(y, size, order);
            let f = large_index_fraction(y, cosets);
            debug_assert!(f >= Ratio::new(7, 10));
            (f, CaseLabel::LargeIndex(y))
        }
    };
    Ok(CaseBound { fraction, case })
}
