//! Quadratic forms Q(x) = Tr(u x^2 + v x^{p^k+1} + w x^{p^{2k}+1}) over F_p.
//!
//! Character sums of a form are carried exactly as residue profiles: the
//! counts N_t = #{x : Q(x) = t}. Since Σ_x ζ^{Q(x)} = Σ_t N_t ζ^t, the profile
//! determines the cyclotomic value without any floating point.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{pow_mod, ExtensionField, FieldElement, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("DependentBasis: basis of {len} elements has rank {rank}")]
    DependentBasis { len: usize, rank: usize },
    #[error("InvalidRank: rank {rank} with discriminant class {disc} in {m} variables")]
    InvalidRank { rank: usize, disc: i8, m: u32 },
    #[error("LemmaViolation: {0}")]
    LemmaViolation(String),
}

/// The parameters (u, v, w) and k of a form.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormParams {
    pub u: FieldElement,
    pub v: FieldElement,
    pub w: FieldElement,
    pub k: u32,
}

impl FormParams {
    pub fn new(u: FieldElement, v: FieldElement, w: FieldElement, k: u32) -> Self {
        Self { u, v, w, k }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero() && self.w.is_zero()
    }
}

/// The exponents d1 = p^k + 1 and d2 = p^{2k} + 1, reduced modulo p^m - 1.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct FormExponents {
    pub d1: u64,
    pub d2: u64,
}

impl FormExponents {
    pub fn new(field: &ExtensionField, k: u32) -> Self {
        let n = field.order() as u64;
        let p = field.p() as u64;
        Self {
            d1: (pow_mod(p, k as u64, n) + 1) % n,
            d2: (pow_mod(p, 2 * k as u64, n) + 1) % n,
        }
    }
}

#[inline]
fn trace_term(field: &ExtensionField, coeff: FieldElement, x_log: u64, exp: u64) -> u32 {
    match coeff.log() {
        None => 0,
        Some(c) => {
            let n = field.order() as u64;
            field.trace_by_log()[((c as u64 + x_log * exp) % n) as usize]
        }
    }
}

/// Q_{u,v,w}(x) in F_p.
pub fn form_value(field: &ExtensionField, q: &FormParams, x: FieldElement) -> u32 {
    let Some(lx) = x.log() else { return 0 };
    let e = FormExponents::new(field, q.k);
    form_value_with(field, q, &e, lx as u64)
}

pub(crate) fn form_value_with(
    field: &ExtensionField,
    q: &FormParams,
    e: &FormExponents,
    x_log: u64,
) -> u32 {
    let p = field.p();
    (trace_term(field, q.u, x_log, 2)
        + trace_term(field, q.v, x_log, e.d1)
        + trace_term(field, q.w, x_log, e.d2))
        % p
}

/// Rank of a matrix over F_p by row reduction.
pub fn rank_mod_p(mut rows: Vec<Vec<u32>>, prime: &PrimeField) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = prime.inv(rows[rank][col]).unwrap();
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = prime.mul(rows[r][col], inv);
                for c in col..cols {
                    let t = prime.mul(f, rows[rank][c]);
                    rows[r][c] = prime.sub(rows[r][c], t);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A symmetric m×m matrix A over F_p with Q(x) = X A Xᵀ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    p: u32,
    m: usize,
    entries: Vec<u32>,
}

impl GramMatrix {
    pub fn from_entries(p: u32, m: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), m * m);
        Self { p, m, entries }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.m).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&a| a == 0)
    }

    /// X A Xᵀ for a coordinate row vector X.
    pub fn evaluate(&self, x: &[u32]) -> u32 {
        let p = self.p as u64;
        let mut acc = 0u64;
        for i in 0..self.m {
            for j in 0..self.m {
                acc = (acc + x[i] as u64 * self.get(i, j) as u64 % p * x[j] as u64) % p;
            }
        }
        acc as u32
    }

    /// Rows as vectors, for generic row reduction.
    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.m).map(<[u32]>::to_vec).collect()
    }
}

/// The basis 1, π, ..., π^{m-1}.
pub fn polynomial_basis(field: &ExtensionField) -> Vec<FieldElement> {
    (0..field.m() as i64).map(|j| field.from_log(j)).collect()
}

/// Gram matrix of Q in the given basis: A_ii = Q(e_i) and
/// A_ij = (Q(e_i + e_j) - Q(e_i) - Q(e_j)) / 2.
pub fn gram_matrix(
    field: &ExtensionField,
    q: &FormParams,
    basis: &[FieldElement],
) -> Result<GramMatrix, QuadError> {
    let m = field.m() as usize;
    let rank = field.rank_over_prime(basis);
    if basis.len() != m || rank != m {
        return Err(QuadError::DependentBasis {
            len: basis.len(),
            rank,
        });
    }
    let prime = field.prime();
    let half = prime.inv(2).unwrap();
    let diag: Vec<u32> = basis.iter().map(|&e| form_value(field, q, e)).collect();
    let mut entries = vec![0u32; m * m];
    for i in 0..m {
        entries[i * m + i] = diag[i];
        for j in 0..i {
            let both = form_value(field, q, field.add(basis[i], basis[j]));
            let polar = prime.sub(prime.sub(both, diag[i]), diag[j]);
            let a = prime.mul(polar, half);
            entries[i * m + j] = a;
            entries[j * m + i] = a;
        }
    }
    Ok(GramMatrix::from_entries(field.p(), m, entries))
}

/// Pivot order for congruence diagonalization.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PivotStrategy {
    FirstFound,
    LastFound,
}

/// Result of diagonalizing a symmetric matrix by congruence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalForm {
    /// Nonzero diagonal entries d_1..d_r.
    pub diagonal: Vec<u32>,
    pub rank: usize,
    /// Legendre symbol of d_1···d_r; 0 when r = 0.
    pub disc_class: i8,
}

pub fn rank_and_disc(a: &GramMatrix, prime: &PrimeField) -> DiagonalForm {
    rank_and_disc_with(a, prime, PivotStrategy::FirstFound)
}

pub fn rank_and_disc_with(
    a: &GramMatrix,
    prime: &PrimeField,
    strategy: PivotStrategy,
) -> DiagonalForm {
    let mut work = a.entries.clone();
    let mut diagonal = Vec::new();
    let (rank, disc_class) = diagonalize_in_place(&mut work, a.m, prime, strategy, &mut diagonal);
    DiagonalForm {
        diagonal,
        rank,
        disc_class,
    }
}

/// Symmetric congruence elimination on a row-major m×m buffer. Pushes the
/// nonzero pivots into `diagonal` and returns (rank, disc_class).
pub(crate) fn diagonalize_in_place(
    a: &mut [u32],
    m: usize,
    prime: &PrimeField,
    strategy: PivotStrategy,
    diagonal: &mut Vec<u32>,
) -> (usize, i8) {
    diagonal.clear();
    let p = prime.p() as u64;
    let idx = |i: usize, j: usize| i * m + j;
    for s in 0..m {
        let mut pivot = match strategy {
            PivotStrategy::FirstFound => (s..m).find(|&i| a[idx(i, i)] != 0),
            PivotStrategy::LastFound => (s..m).rev().find(|&i| a[idx(i, i)] != 0),
        };
        if pivot.is_none() {
            // All remaining diagonal entries vanish: add row/column j to i
            // for some nonzero a_ij, making a_ii = 2 a_ij != 0.
            let off = (s..m).find_map(|i| (i + 1..m).find(|&j| a[idx(i, j)] != 0).map(|j| (i, j)));
            let Some((i, j)) = off else { break };
            for c in 0..m {
                a[idx(i, c)] = ((a[idx(i, c)] as u64 + a[idx(j, c)] as u64) % p) as u32;
            }
            for r in 0..m {
                a[idx(r, i)] = ((a[idx(r, i)] as u64 + a[idx(r, j)] as u64) % p) as u32;
            }
            pivot = Some(i);
        }
        let pv = pivot.unwrap();
        if pv != s {
            for c in 0..m {
                a.swap(idx(s, c), idx(pv, c));
            }
            for r in 0..m {
                a.swap(idx(r, s), idx(r, pv));
            }
        }
        let d = a[idx(s, s)];
        let d_inv = prime.inv(d).unwrap() as u64;
        for r in s + 1..m {
            let ars = a[idx(r, s)] as u64;
            if ars == 0 {
                continue;
            }
            let f = ars * d_inv % p;
            for c in s..m {
                let t = f * a[idx(s, c)] as u64 % p;
                a[idx(r, c)] = ((a[idx(r, c)] as u64 + p - t) % p) as u32;
            }
            for rr in s..m {
                let t = f * a[idx(rr, s)] as u64 % p;
                a[idx(rr, r)] = ((a[idx(rr, r)] as u64 + p - t) % p) as u32;
            }
        }
        diagonal.push(d);
    }
    let rank = diagonal.len();
    if rank == 0 {
        return (0, 0);
    }
    let prod = diagonal.iter().fold(1u64, |acc, &d| acc * d as u64 % p);
    (rank, prime.legendre(prod as i64))
}

/// Counts N_t = #{x : Q(x) = t} for t in F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueProfile {
    counts: Vec<u64>,
}

impl ResidueProfile {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, t: u32) -> u64 {
        self.counts[t as usize]
    }

    pub fn zeros(&self) -> u64 {
        self.counts[0]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Exhaustive residue profile over all p^m inputs.
pub fn residue_profile(field: &ExtensionField, q: &FormParams) -> ResidueProfile {
    let e = FormExponents::new(field, q.k);
    let mut counts = vec![0u64; field.p() as usize];
    counts[0] += 1; // x = 0
    for lx in 0..field.order() as u64 {
        counts[form_value_with(field, q, &e, lx) as usize] += 1;
    }
    ResidueProfile { counts }
}

/// The residue profile forced by the Gauss-sum evaluation of a rank-r form
/// with discriminant class `disc` in m variables.
///
/// Even r: Σ_x ζ^{yQ(x)} = c for every y != 0 with c = ((-1)^{r/2}Δ / p) p^{m-r/2},
/// so N_t = (p^m - c)/p for t != 0 and N_0 = (p^m - c)/p + c.
/// Odd r: Σ_x ζ^{yQ(x)} = (y/p) C g with g the quadratic Gauss sum and
/// C = ((-1)^{(r-1)/2}Δ / p) p^{m-(r+1)/2}, so N_0 = p^{m-1} and
/// N_t = p^{m-1} + C (t/p).
pub fn lemma21_predict(
    r: usize,
    disc: i8,
    prime: &PrimeField,
    m: u32,
) -> Result<ResidueProfile, QuadError> {
    let p = prime.p() as i128;
    let valid_disc = if r == 0 { disc == 0 } else { disc == 1 || disc == -1 };
    if r > m as usize || !valid_disc {
        return Err(QuadError::InvalidRank { rank: r, disc, m });
    }
    let size = p.pow(m);
    let mut counts = vec![0i128; p as usize];
    if r == 0 {
        counts[0] = size;
    } else if r % 2 == 0 {
        let eta = disc as i128 * (prime.minus_one_symbol() as i128).pow(r as u32 / 2);
        let c = eta * p.pow(m - r as u32 / 2);
        let rest = (size - c) / p;
        counts.iter_mut().for_each(|n| *n = rest);
        counts[0] = rest + c;
    } else {
        let eta = disc as i128 * (prime.minus_one_symbol() as i128).pow((r as u32 - 1) / 2);
        let c = eta * p.pow(m - (r as u32 + 1) / 2);
        for (t, n) in counts.iter_mut().enumerate() {
            *n = size / p + c * prime.legendre(t as i64) as i128;
        }
    }
    Ok(ResidueProfile {
        counts: counts.into_iter().map(|n| n as u64).collect(),
    })
}

/// Whether a y-twisted sum value is consistent with the parity rule for rank r:
/// zero for odd r, ±(p-1)p^{m-r/2} for even r.
pub fn lemma22_consistent(value: i64, r: usize, p: u32, m: u32) -> bool {
    if r % 2 == 1 {
        value == 0
    } else {
        value.unsigned_abs() == (p as u64 - 1) * (p as u64).pow(m - r as u32 / 2)
    }
}

/// Σ_{y ∈ F_p*} Σ_x ζ^{yQ(x)} = p·N_0 - p^m, checked against the rank parity.
pub fn y_twisted_sum(field: &ExtensionField, q: &FormParams) -> Result<i64, QuadError> {
    let profile = residue_profile(field, q);
    let value = field.p() as i64 * profile.zeros() as i64 - field.size() as i64;
    let gram = gram_matrix(field, q, &polynomial_basis(field))?;
    let diag = rank_and_disc(&gram, field.prime());
    if lemma22_consistent(value, diag.rank, field.p(), field.m()) {
        Ok(value)
    } else {
        Err(QuadError::LemmaViolation(format!(
            "y-twisted sum {value} for a rank-{} form",
            diag.rank
        )))
    }
}

/// Tallies of per-form checks accumulated during an exhaustive scan.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormScanTally {
    pub forms: u64,
    /// rank -> number of forms
    pub rank_histogram: BTreeMap<usize, u64>,
    /// nonzero parameter triples whose rank is below m - 4
    pub rank_floor_violations: u64,
    /// forms whose exhaustive profile differs from the rank/disc prediction
    pub profile_mismatches: u64,
    /// forms whose y-twisted sum breaks the rank-parity rule
    pub parity_violations: u64,
    /// forms whose disc class differs between pivot strategies
    pub pivot_disagreements: u64,
    /// y-twisted sum value -> number of forms
    pub twisted_sums: BTreeMap<i64, u64>,
}

impl FormScanTally {
    pub fn merge(&mut self, other: &FormScanTally) {
        self.forms += other.forms;
        for (r, c) in &other.rank_histogram {
            *self.rank_histogram.entry(*r).or_default() += c;
        }
        self.rank_floor_violations += other.rank_floor_violations;
        self.profile_mismatches += other.profile_mismatches;
        self.parity_violations += other.parity_violations;
        self.pivot_disagreements += other.pivot_disagreements;
        for (v, c) in &other.twisted_sums {
            *self.twisted_sums.entry(*v).or_default() += c;
        }
    }

    /// Smallest rank among nonzero forms, if any were tallied.
    pub fn min_nonzero_rank(&self) -> Option<usize> {
        self.rank_histogram.keys().copied().find(|&r| r > 0)
    }

    pub fn all_passed(&self) -> bool {
        self.rank_floor_violations == 0
            && self.profile_mismatches == 0
            && self.parity_violations == 0
            && self.pivot_disagreements == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f35() -> ExtensionField {
        ExtensionField::new(3, 5).unwrap()
    }

    fn params(f: &ExtensionField, u: usize, v: usize, w: usize, k: u32) -> FormParams {
        FormParams::new(f.element_at(u), f.element_at(v), f.element_at(w), k)
    }

    #[test]
    fn form_value_examples() {
        let f = f35();
        let zero = FormParams::new(FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO, 1);
        assert!(f.elements().all(|x| form_value(&f, &zero, x) == 0));
        let q = FormParams::new(FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO, 1);
        assert_eq!(form_value(&f, &q, FieldElement::ZERO), 0);
        assert_eq!(form_value(&f, &q, FieldElement::ONE), 2);
    }

    #[test]
    fn gram_reproduces_form() {
        let f = f35();
        let basis = polynomial_basis(&f);
        let zero = params(&f, 0, 0, 0, 1);
        assert!(gram_matrix(&f, &zero, &basis).unwrap().is_zero());
        let trace_form = params(&f, 1, 0, 0, 1);
        let a = gram_matrix(&f, &trace_form, &basis).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(a.get(i, j), f.trace(f.from_log((i + j) as i64)));
            }
        }
        for q in [trace_form, params(&f, 17, 40, 99, 1), params(&f, 0, 3, 200, 2)] {
            let a = gram_matrix(&f, &q, &basis).unwrap();
            assert!(a.is_symmetric());
            for x in f.elements() {
                assert_eq!(a.evaluate(&f.coords(x)), form_value(&f, &q, x));
            }
        }
    }

    #[test]
    fn dependent_basis_rejected() {
        let f = f35();
        let mut basis = polynomial_basis(&f);
        basis[4] = f.add(basis[0], basis[1]);
        assert!(matches!(
            gram_matrix(&f, &params(&f, 1, 0, 0, 1), &basis),
            Err(QuadError::DependentBasis { rank: 4, .. })
        ));
    }

    #[test]
    fn rank_examples() {
        let f = f35();
        let zero = GramMatrix::from_entries(3, 5, vec![0; 25]);
        let d = rank_and_disc(&zero, f.prime());
        assert_eq!((d.rank, d.disc_class), (0, 0));
        let a = gram_matrix(&f, &params(&f, 1, 0, 0, 1), &polynomial_basis(&f)).unwrap();
        assert_eq!(rank_and_disc(&a, f.prime()).rank, 5);
    }

    #[test]
    fn zero_diagonal_pivot() {
        // Hyperbolic plane x1*x2: diagonal empty, rank 2, -Δ is a square.
        let prime = PrimeField::new(3).unwrap();
        let a = GramMatrix::from_entries(3, 2, vec![0, 2, 2, 0]);
        for s in [PivotStrategy::FirstFound, PivotStrategy::LastFound] {
            let d = rank_and_disc_with(&a, &prime, s);
            assert_eq!(d.rank, 2);
            assert_eq!(prime.legendre(-(d.diagonal[0] as i64 * d.diagonal[1] as i64)), 1);
        }
    }

    #[test]
    fn rank_is_basis_independent() {
        let f = f35();
        let other: Vec<FieldElement> = (0..5).map(|j| f.from_log(7 + 31 * j)).collect();
        assert_eq!(f.rank_over_prime(&other), 5);
        for q in [params(&f, 1, 0, 0, 1), params(&f, 5, 9, 0, 1), params(&f, 0, 0, 3, 2), params(&f, 60, 2, 150, 1)] {
            let a = rank_and_disc(&gram_matrix(&f, &q, &polynomial_basis(&f)).unwrap(), f.prime());
            let b = rank_and_disc(&gram_matrix(&f, &q, &other).unwrap(), f.prime());
            assert_eq!((a.rank, a.disc_class), (b.rank, b.disc_class));
            let radical = 5 - rank_mod_p(gram_matrix(&f, &q, &other).unwrap().rows(), f.prime());
            assert_eq!(a.rank, 5 - radical);
        }
    }

    #[test]
    fn prediction_edge_cases() {
        let prime = PrimeField::new(3).unwrap();
        assert_eq!(lemma21_predict(0, 0, &prime, 5).unwrap().counts(), &[243, 0, 0]);
        assert!(lemma21_predict(6, 1, &prime, 5).is_err());
        assert!(lemma21_predict(2, 0, &prime, 5).is_err());
        for r in 1..=5 {
            for d in [-1, 1] {
                assert_eq!(lemma21_predict(r, d, &prime, 5).unwrap().total(), 243);
            }
        }
        let odd = lemma21_predict(5, 1, &prime, 5).unwrap();
        assert_eq!(odd.zeros(), 81);
        assert_eq!((odd.count(1) as i64 - odd.count(2) as i64).abs(), 18);
        let even = lemma21_predict(4, -1, &prime, 5).unwrap();
        assert_eq!(even.count(1), even.count(2));
    }

    #[test]
    fn twisted_sum_examples() {
        let f = f35();
        assert_eq!(y_twisted_sum(&f, &params(&f, 0, 0, 0, 1)).unwrap(), 486);
        assert_eq!(y_twisted_sum(&f, &params(&f, 1, 0, 0, 1)).unwrap(), 0);
    }

    /// Profiles of sampled forms over several fields agree with the
    /// rank/discriminant prediction, including p = 1 mod 4.
    #[test]
    fn prediction_matches_sampled_profiles() {
        for (p, m, k) in [(3u64, 5u32, 1u32), (3, 5, 2), (5, 3, 1), (7, 3, 1), (13, 2, 1)] {
            let f = ExtensionField::new(p, m).unwrap();
            let basis = polynomial_basis(&f);
            let size = f.size() as usize;
            for i in 0..150usize {
                let q = params(&f, (i * 7) % size, (i * i * 3 + 1) % size, (i * 11) % size, k);
                let diag = rank_and_disc(&gram_matrix(&f, &q, &basis).unwrap(), f.prime());
                let predicted = lemma21_predict(diag.rank, diag.disc_class, f.prime(), m).unwrap();
                assert_eq!(predicted, residue_profile(&f, &q), "p={p} m={m} i={i}");
            }
        }
    }

    proptest! {
        #[test]
        fn scaling_law(u in 0usize..243, v in 0usize..243, w in 0usize..243, x in 0usize..243, a in 0u32..3) {
            let f = f35();
            let q = params(&f, u, v, w, 1);
            let x = f.element_at(x);
            let lhs = form_value(&f, &q, f.scale(x, a));
            prop_assert_eq!(lhs, (a * a * form_value(&f, &q, x)) % 3);
        }

        #[test]
        fn pivot_strategies_agree(u in 0usize..243, v in 0usize..243, w in 0usize..243) {
            let f = f35();
            let a = gram_matrix(&f, &params(&f, u, v, w, 1), &polynomial_basis(&f)).unwrap();
            let first = rank_and_disc_with(&a, f.prime(), PivotStrategy::FirstFound);
            let last = rank_and_disc_with(&a, f.prime(), PivotStrategy::LastFound);
            prop_assert_eq!(first.rank, last.rank);
            prop_assert_eq!(first.disc_class, last.disc_class);
        }
    }
}
