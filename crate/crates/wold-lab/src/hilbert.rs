//! The ambient space: square-summable sequences over a countable orthonormal
//! basis `e_1, e_2, ...`, represented exactly by their finite supports, and
//! the two countable dense families the metrics are built on.
//!
//! The staged family enumerates every vector with dyadic-rational coordinates
//! in the box `[-1, 1] + i[-1, 1]`: stage `c` contributes the vectors
//! supported in the first `c` coordinates whose real and imaginary parts are
//! integer multiples of `2^-c`. Stages are ordered, inside a stage the digit
//! tuples are ordered lexicographically, and a vector is skipped when an
//! earlier stage already produced it (all digits even and the last coordinate
//! pair zero). That makes the enumeration injective and exhaustive over the
//! box, and its closed linear span is the whole space. The basis-first
//! variant plays a fixed prefix of standard basis vectors before the staged
//! stream, skipping them when the stream would repeat them.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("vector has a coordinate outside the dyadic box [-1,1] + i[-1,1]")]
    NotRepresentable,
    #[error("search needs a stage beyond the scan budget (stage {budget})")]
    ScanBudgetExceeded { budget: u32 },
    #[error("index arithmetic overflowed (stage too deep for exact ranking)")]
    IndexOverflow,
    #[error("cannot search for the zero vector")]
    ZeroTarget,
}

/// A finitely supported vector: strictly increasing 1-based coordinates with
/// nonzero complex values. Inner products and norms over the orthonormal
/// basis reduce to exact finite sums.
#[derive(Clone, Debug, PartialEq)]
pub struct FinSuppVec {
    support: Vec<usize>,
    values: Vec<Complex64>,
}

impl FinSuppVec {
    pub fn zero() -> Self {
        FinSuppVec {
            support: vec![],
            values: vec![],
        }
    }

    /// Standard basis vector `e_i`, `i >= 1`.
    pub fn basis(i: usize) -> Self {
        assert!(i >= 1, "basis index is 1-based");
        FinSuppVec {
            support: vec![i],
            values: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Builds from (index, value) pairs in any order; duplicate indices are
    /// summed and exact zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Complex64)>) -> Self {
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (i, v) in pairs {
            assert!(i >= 1, "coordinates are 1-based");
            *acc.entry(i).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let (support, values): (Vec<_>, Vec<_>) = acc
            .into_iter()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .unzip();
        FinSuppVec { support, values }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, i: usize) -> Complex64 {
        match self.support.binary_search(&i) {
            Ok(pos) => self.values[pos],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn max_support(&self) -> Option<usize> {
        self.support.last().copied()
    }

    pub fn norm_sq(&self) -> f64 {
        // fold from +0.0: an empty `sum()` would yield -0.0, which leaks
        // into displayed output as "-0".
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, |a, b| a + b)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `<x, y> = sum_k x_k conj(y_k)`, linear in `self`.
    pub fn inner(&self, other: &FinSuppVec) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let (mut a, mut b) = (0usize, 0usize);
        while a < self.support.len() && b < other.support.len() {
            match self.support[a].cmp(&other.support[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b].conj();
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    pub fn add(&self, other: &FinSuppVec) -> FinSuppVec {
        FinSuppVec::from_pairs(self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &FinSuppVec) -> FinSuppVec {
        FinSuppVec::from_pairs(self.iter().chain(other.iter().map(|(i, v)| (i, -v))))
    }

    pub fn scale(&self, z: Complex64) -> FinSuppVec {
        if z.re == 0.0 && z.im == 0.0 {
            return FinSuppVec::zero();
        }
        FinSuppVec {
            support: self.support.clone(),
            values: self.values.iter().map(|v| v * z).collect(),
        }
    }

    pub fn dist(&self, other: &FinSuppVec) -> f64 {
        self.sub(other).norm()
    }
}

/// Which dense family the metrics run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMode {
    /// `e_1 .. e_D` first (D = 64), then the staged dyadic stream minus the
    /// vectors already played.
    BasisFirst,
    /// The staged dyadic enumeration from stage 1.
    StagedDyadic,
}

/// Length of the standard-basis prefix in `BasisFirst` mode.
pub const BASIS_PREFIX: usize = 64;

/// Vectors cached eagerly; beyond this the enumeration is re-streamed on
/// demand so deep indices cost time, not memory.
const CACHE_CAP: usize = 200_000;

/// Highest stage `index_near` will fully scan. Stage 3 has ~24 million
/// vectors (seconds); stage 4 has ~1.4e12 and is out of reach by design.
const SCAN_BUDGET_STAGE: u32 = 3;

/// Highest stage for which exact u128 rank arithmetic in `index_of_basis`
/// cannot overflow: stage 7 needs (2^8+1)^14 < 2^113.
const RANK_STAGE_LIMIT: u32 = 7;

/// One staged vector in exact integer form: coordinate `k` (1-based) has real
/// part `digits[2(k-1)] / 2^stage` and imaginary part `digits[2k-1] / 2^stage`.
#[derive(Clone, Debug, PartialEq)]
struct StagedEntry {
    stage: u32,
    digits: Vec<i64>,
}

impl StagedEntry {
    fn to_vec(&self) -> FinSuppVec {
        let denom = (1u64 << self.stage) as f64;
        let pairs = (0..self.digits.len() / 2).filter_map(|k| {
            let re = self.digits[2 * k] as f64 / denom;
            let im = self.digits[2 * k + 1] as f64 / denom;
            if re == 0.0 && im == 0.0 {
                None
            } else {
                Some((k + 1, Complex64::new(re, im)))
            }
        });
        FinSuppVec::from_pairs(pairs)
    }

    /// True when some earlier stage already produced this vector: all digits
    /// even (the value exists on the coarser grid) and the last coordinate
    /// pair zero (it fits the shorter window). Stage 1 has no predecessor.
    fn is_duplicate_of_earlier_stage(&self) -> bool {
        if self.stage == 1 {
            return false;
        }
        let n = self.digits.len();
        self.digits.iter().all(|d| d % 2 == 0) && self.digits[n - 2] == 0 && self.digits[n - 1] == 0
    }

    fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// The digit tuple of `e_j` at stage `j` (real part 1 = 2^j / 2^j).
    fn basis_at_own_stage(j: usize) -> StagedEntry {
        let mut digits = vec![0i64; 2 * j];
        digits[2 * (j - 1)] = 1i64 << j;
        StagedEntry {
            stage: j as u32,
            digits,
        }
    }

    /// Squared distance to `y` without materializing a `FinSuppVec`.
    fn dist_sq_to(&self, y: &FinSuppVec) -> f64 {
        let denom = (1u64 << self.stage) as f64;
        let window = self.digits.len() / 2;
        let mut acc = 0.0f64;
        for k in 0..window {
            let z = y.get(k + 1);
            let dre = self.digits[2 * k] as f64 / denom - z.re;
            let dim = self.digits[2 * k + 1] as f64 / denom - z.im;
            acc += dre * dre + dim * dim;
        }
        for (i, v) in y.iter() {
            if i > window {
                acc += v.norm_sqr();
            }
        }
        acc
    }
}

/// Streaming cursor over the staged enumeration: stages ascending, digit
/// tuples in lexicographic order from all-minimal, invalid tuples skipped.
#[derive(Clone, Debug)]
struct StageCursor {
    stage: u32,
    digits: Vec<i64>,
}

impl StageCursor {
    fn start() -> Self {
        StageCursor {
            stage: 0,
            digits: vec![],
        }
    }

    fn start_of_stage(stage: u32) -> Self {
        let bound = 1i64 << stage;
        StageCursor {
            stage,
            digits: vec![-bound; 2 * stage as usize],
        }
    }

    /// Odometer step; rolls into the next stage when the tuple wraps.
    fn advance_raw(&mut self) {
        if self.stage == 0 {
            *self = StageCursor::start_of_stage(1);
            return;
        }
        let bound = 1i64 << self.stage;
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                *self = StageCursor::start_of_stage(self.stage + 1);
                return;
            }
            pos -= 1;
            if self.digits[pos] < bound {
                self.digits[pos] += 1;
                for d in &mut self.digits[pos + 1..] {
                    *d = -bound;
                }
                return;
            }
        }
    }

    /// Steps to the next entry the enumeration actually emits.
    fn next_valid(&mut self, skip_basis_prefix: bool) -> StagedEntry {
        loop {
            self.advance_raw();
            let entry = StagedEntry {
                stage: self.stage,
                digits: self.digits.clone(),
            };
            if entry.is_zero() || entry.is_duplicate_of_earlier_stage() {
                continue;
            }
            if skip_basis_prefix
                && self.stage as usize <= BASIS_PREFIX
                && entry == StagedEntry::basis_at_own_stage(self.stage as usize)
            {
                continue;
            }
            return entry;
        }
    }
}

struct FamilyState {
    cursor: StageCursor,
    cache: Vec<StagedEntry>,
}

/// A countable dense family `x_1, x_2, ...` with a fixed total order, lazy
/// enumeration, and exact arithmetic on the staged dyadic grid.
pub struct DenseFamily {
    mode: FamilyMode,
    state: Mutex<FamilyState>,
}

impl DenseFamily {
    pub fn new(mode: FamilyMode) -> Self {
        DenseFamily {
            mode,
            state: Mutex::new(FamilyState {
                cursor: StageCursor::start(),
                cache: Vec::new(),
            }),
        }
    }

    pub fn mode(&self) -> FamilyMode {
        self.mode
    }

    /// The `j`-th family vector, 1-based.
    pub fn vector(&self, j: usize) -> FinSuppVec {
        assert!(j >= 1, "family indices are 1-based");
        match self.mode {
            FamilyMode::BasisFirst => {
                if j <= BASIS_PREFIX {
                    FinSuppVec::basis(j)
                } else {
                    self.staged_entry(j - BASIS_PREFIX, true).to_vec()
                }
            }
            FamilyMode::StagedDyadic => self.staged_entry(j, false).to_vec(),
        }
    }

    /// The `k`-th entry of the staged stream (1-based), through the cache up
    /// to `CACHE_CAP` and by re-streaming past it.
    fn staged_entry(&self, k: usize, skip_basis_prefix: bool) -> StagedEntry {
        let mut state = self.state.lock().unwrap();
        while state.cache.len() < k && state.cache.len() < CACHE_CAP {
            let entry = state.cursor.next_valid(skip_basis_prefix);
            state.cache.push(entry);
        }
        if k <= state.cache.len() {
            return state.cache[k - 1].clone();
        }
        let mut cursor = state.cursor.clone();
        let mut produced = state.cache.len();
        loop {
            let entry = cursor.next_valid(skip_basis_prefix);
            produced += 1;
            if produced == k {
                return entry;
            }
        }
    }

    /// Iterates the family from `x_1` on, independent of the shared cache.
    pub fn iter(&self) -> FamilyIter {
        FamilyIter {
            mode: self.mode,
            next_index: 1,
            cursor: StageCursor::start(),
        }
    }

    /// Finds the first family index `m` with `||x_m - y|| <= eta`, returning
    /// `(m, ||x_m - y||)`. `eta = 0` demands an exact grid point.
    ///
    /// The search is exact, not heuristic: it verifies some stage within the
    /// scan budget has a grid point within `eta` (else
    /// `ScanBudgetExceeded`), then walks the enumeration in order, so the
    /// returned `m` is minimal.
    pub fn index_near(&self, y: &FinSuppVec, eta: f64) -> Result<(usize, f64), FamilyError> {
        if y.is_zero() {
            return Err(FamilyError::ZeroTarget);
        }
        assert!(eta >= 0.0 && eta.is_finite(), "eta must be finite and >= 0");
        for (_, v) in y.iter() {
            if v.re.abs() > 1.0 || v.im.abs() > 1.0 {
                return Err(FamilyError::NotRepresentable);
            }
        }
        match self.mode {
            FamilyMode::BasisFirst => {
                for j in 1..=BASIS_PREFIX {
                    let d = FinSuppVec::basis(j).dist(y);
                    if d <= eta {
                        return Ok((j, d));
                    }
                }
                let (m, gap) = scan_staged(y, eta, true)?;
                Ok((BASIS_PREFIX + m, gap))
            }
            FamilyMode::StagedDyadic => scan_staged(y, eta, false),
        }
    }

    /// Exact 1-based position of `e_i` in the enumeration, by combinatorial
    /// ranking rather than streaming. Exact through stage `RANK_STAGE_LIMIT`;
    /// deeper basis vectors report `IndexOverflow`.
    pub fn index_of_basis(&self, i: usize) -> Result<u128, FamilyError> {
        assert!(i >= 1);
        match self.mode {
            FamilyMode::BasisFirst => {
                if i <= BASIS_PREFIX {
                    Ok(i as u128)
                } else {
                    // e_i for i > prefix would sit at stage i > 64, far past
                    // exact-ranking reach.
                    Err(FamilyError::IndexOverflow)
                }
            }
            FamilyMode::StagedDyadic => rank_of_basis(i),
        }
    }
}

pub struct FamilyIter {
    mode: FamilyMode,
    next_index: usize,
    cursor: StageCursor,
}

impl Iterator for FamilyIter {
    type Item = FinSuppVec;

    fn next(&mut self) -> Option<FinSuppVec> {
        let j = self.next_index;
        self.next_index += 1;
        match self.mode {
            FamilyMode::BasisFirst => {
                if j <= BASIS_PREFIX {
                    Some(FinSuppVec::basis(j))
                } else {
                    Some(self.cursor.next_valid(true).to_vec())
                }
            }
            FamilyMode::StagedDyadic => Some(self.cursor.next_valid(false).to_vec()),
        }
    }
}

fn scan_staged(
    y: &FinSuppVec,
    eta: f64,
    skip_basis_prefix: bool,
) -> Result<(usize, f64), FamilyError> {
    let max_supp = y.max_support().unwrap_or(1) as u32;
    let feasible = (max_supp..=SCAN_BUDGET_STAGE).any(|c| grid_distance(y, c) <= eta);
    if !feasible {
        return Err(FamilyError::ScanBudgetExceeded {
            budget: SCAN_BUDGET_STAGE,
        });
    }
    let eta_sq = eta * eta;
    let mut cursor = StageCursor::start();
    let mut m = 0usize;
    loop {
        let entry = cursor.next_valid(skip_basis_prefix);
        if entry.stage > SCAN_BUDGET_STAGE {
            // Feasibility said a grid point is within eta, but that point may
            // be the (never emitted) zero vector; report the budget honestly.
            return Err(FamilyError::ScanBudgetExceeded {
                budget: SCAN_BUDGET_STAGE,
            });
        }
        m += 1;
        let d_sq = entry.dist_sq_to(y);
        if d_sq <= eta_sq {
            return Ok((m, d_sq.sqrt()));
        }
    }
}

/// Exact distance from `y` to the nearest stage-`c` grid vector (coordinates
/// on the `2^-c` grid in the closed box, support within the first `c`
/// coordinates).
fn grid_distance(y: &FinSuppVec, c: u32) -> f64 {
    let denom = (1u64 << c) as f64;
    let mut acc = 0.0f64;
    for (i, v) in y.iter() {
        if i > c as usize {
            acc += v.norm_sqr();
        } else {
            let dre = v.re - (v.re * denom).round() / denom;
            let dim = v.im - (v.im * denom).round() / denom;
            acc += dre * dre + dim * dim;
        }
    }
    acc.sqrt()
}

/// Number of vectors stage `c` newly contributes: all tuples on its grid
/// minus the ones the previous stage already covered (and minus the zero
/// vector at stage 1).
fn stage_new_count(c: u32) -> Result<u128, FamilyError> {
    let side = |bits: u32| -> u128 { (1u128 << (bits + 1)) + 1 };
    let total = side(c)
        .checked_pow(2 * c)
        .ok_or(FamilyError::IndexOverflow)?;
    if c == 1 {
        return Ok(total - 1);
    }
    let prev = side(c - 1)
        .checked_pow(2 * (c - 1))
        .ok_or(FamilyError::IndexOverflow)?;
    Ok(total - prev)
}

/// 1-based rank of `e_i` in the staged enumeration.
fn rank_of_basis(i: usize) -> Result<u128, FamilyError> {
    if i as u32 > RANK_STAGE_LIMIT {
        return Err(FamilyError::IndexOverflow);
    }
    let mut before: u128 = 0;
    for s in 1..i as u32 {
        before = before
            .checked_add(stage_new_count(s)?)
            .ok_or(FamilyError::IndexOverflow)?;
    }
    let in_stage = rank_within_stage(&StagedEntry::basis_at_own_stage(i))?;
    before
        .checked_add(in_stage)
        .ok_or(FamilyError::IndexOverflow)
}

/// 1-based rank of an emitted tuple within its stage: raw lexicographic
/// position minus the skipped tuples before it. The skipped set at any stage
/// is exactly the "pattern" set {all digits even, last pair zero}, which at
/// stage 1 degenerates to the zero tuple alone.
fn rank_within_stage(t: &StagedEntry) -> Result<u128, FamilyError> {
    let c = t.stage;
    let bound = 1i64 << c;
    let base = (2u128 * bound as u128) + 1;
    let n = t.digits.len();

    let mut raw: u128 = 0;
    for &d in &t.digits {
        let shifted = (d + bound) as u128;
        raw = raw
            .checked_mul(base)
            .and_then(|x| x.checked_add(shifted))
            .ok_or(FamilyError::IndexOverflow)?;
    }

    // Count pattern tuples strictly before t by walking shared prefixes.
    let evens_per_digit = (bound as u128) + 1; // even values in [-2^c, 2^c]
    let mut skipped: u128 = 0;
    for pos in 0..n {
        let is_last_pair = pos >= n - 2;
        let tp = t.digits[pos];
        let here: u128 = if is_last_pair {
            u128::from(tp > 0) // the only pattern value is 0
        } else {
            ((tp + bound + 1) / 2).max(0) as u128 // even values in [-2^c, tp)
        };
        // Remaining free positions are the even-zone ones before the fixed
        // last pair.
        let free_even_positions = (n - 2).saturating_sub(pos + 1);
        let mut mult: u128 = 1;
        for _ in 0..free_even_positions {
            mult = mult
                .checked_mul(evens_per_digit)
                .ok_or(FamilyError::IndexOverflow)?;
        }
        skipped = skipped
            .checked_add(here.checked_mul(mult).ok_or(FamilyError::IndexOverflow)?)
            .ok_or(FamilyError::IndexOverflow)?;
        let compatible = if is_last_pair { tp == 0 } else { tp % 2 == 0 };
        if !compatible {
            break;
        }
    }
    Ok(raw - skipped + 1)
}
