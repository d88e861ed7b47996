//! Row reduction to the first basis vector, factorization of determinant-one
//! matrices into elementary generators, stable dimension of finite rings, and
//! the two-operation reduction of (vector, scalar) pairs.
//!
//! Rows transform on the right: applying a word w to a row v means
//! v * eval(w), and ge_{ij}(x) adds x*v_i to v_j.

use crate::budget::Budget;
use crate::matgroups::{ElementaryWord, Mat, WordKind};
use crate::rings::{bezout, RingDescriptor, RingElement, RingError};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("row is not unimodular")]
    NotUnimodular,
    #[error("matrix determinant is not 1")]
    DetNotOne,
    #[error("matrix determinant is not a unit")]
    DetNotUnit,
    #[error("row too short: need length at least {0}")]
    TooShort(usize),
    #[error("search budget exhausted after {0} candidates")]
    SearchBudget(u64),
    #[error("word length budget exceeded")]
    WordBudget,
}

pub type RResult<T> = std::result::Result<T, ReduceError>;

/// v * eval(w) computed letter by letter (cheaper than the full product).
pub fn apply_word_to_row(row: &[RingElement], w: &ElementaryWord) -> RResult<Vec<RingElement>> {
    assert_eq!(row.len(), w.n, "row length must match word size");
    assert_eq!(w.kind, WordKind::Linear, "row application is linear-only");
    let mut v = row.to_vec();
    for g in &w.letters {
        // Right multiplication by a linear generator.
        let delta = v[g.i].mul(&g.x)?;
        v[g.j] = v[g.j].add(&delta)?;
    }
    Ok(v)
}

/// Coefficients c with sum c_i * row_i = 1, or None when the row is not
/// unimodular. Works over Z/n by lifting to Z, over Euclidean rings by
/// iterated extended gcd, and over other finite rings by breadth-first
/// closure of the generated ideal.
pub fn unimodular_witness(
    ring: &RingDescriptor,
    row: &[RingElement],
) -> RResult<Option<Vec<RingElement>>> {
    for e in row {
        if e.ring() != ring {
            return Err(RingError::RingMismatch(e.ring().to_string(), ring.to_string()).into());
        }
    }
    match ring {
        RingDescriptor::IntegersMod(n) => {
            // Lift to Z and run the Euclidean witness with the modulus added
            // as an extra generator.
            let z = RingDescriptor::integers();
            let mut gens: Vec<RingElement> = row
                .iter()
                .map(|e| z.from_i64(e.residue_value().expect("residue repr") as i64))
                .collect();
            gens.push(z.from_i64(*n as i64));
            match euclidean_witness(&z, &gens)? {
                None => Ok(None),
                Some(coeffs) => {
                    let back = coeffs[..row.len()]
                        .iter()
                        .map(|c| ring.from_bigint(c.int_value().expect("integer repr")))
                        .collect();
                    Ok(Some(back))
                }
            }
        }
        _ if ring.is_euclidean() => euclidean_witness(ring, row),
        _ if ring.is_finite() => bfs_witness(ring, row),
        _ => Err(RingError::MissingCapability("unimodularity test", ring.to_string()).into()),
    }
}

fn euclidean_witness(
    ring: &RingDescriptor,
    row: &[RingElement],
) -> RResult<Option<Vec<RingElement>>> {
    if row.is_empty() {
        return Ok(None);
    }
    let mut g = row[0].clone();
    let mut coeffs = vec![ring.one()];
    for a in &row[1..] {
        let (ng, s, t) = bezout(&g, a)?;
        for c in &mut coeffs {
            *c = c.mul(&s)?;
        }
        coeffs.push(t);
        g = ng;
    }
    match g.inverse() {
        None => Ok(None),
        Some(ginv) => {
            for c in &mut coeffs {
                *c = c.mul(&ginv)?;
            }
            Ok(Some(coeffs))
        }
    }
}

fn bfs_witness(ring: &RingDescriptor, row: &[RingElement]) -> RResult<Option<Vec<RingElement>>> {
    let elems = ring.enumerate()?;
    let zero_coeffs = vec![ring.zero(); row.len()];
    let mut seen: BTreeMap<RingElement, Vec<RingElement>> = BTreeMap::new();
    seen.insert(ring.zero(), zero_coeffs.clone());
    let mut frontier = vec![(ring.zero(), zero_coeffs)];
    while let Some((val, coeffs)) = frontier.pop() {
        for (i, gen) in row.iter().enumerate() {
            for r in &elems {
                let nv = val.add(&gen.mul(r)?)?;
                if !seen.contains_key(&nv) {
                    let mut nc = coeffs.clone();
                    nc[i] = nc[i].add(r)?;
                    seen.insert(nv.clone(), nc.clone());
                    frontier.push((nv, nc));
                }
            }
        }
    }
    Ok(seen.remove(&ring.one()))
}

/// Lexicographic tuple stream over the ring's search order: all length-`len`
/// tuples, first coordinate most significant. Over Z the stream is graded by
/// total spiral radius so every tuple appears at a finite position.
pub fn tuple_candidates(
    ring: &RingDescriptor,
    len: usize,
) -> RResult<Box<dyn Iterator<Item = Vec<RingElement>>>> {
    if ring.is_finite() {
        let elems = ring.enumerate()?;
        let mut idx = vec![0usize; len];
        let mut done = false;
        let it = std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out: Vec<RingElement> = idx.iter().map(|&k| elems[k].clone()).collect();
            // Odometer increment, last coordinate fastest.
            let mut pos = len;
            loop {
                if pos == 0 {
                    done = true;
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break;
                }
                idx[pos] = 0;
            }
            Some(out)
        });
        Ok(Box::new(it))
    } else if *ring == RingDescriptor::Integers {
        let ring = ring.clone();
        let mut radius = 0usize;
        let mut queue: Vec<Vec<usize>> = Vec::new();
        let it = std::iter::from_fn(move || {
            while queue.is_empty() {
                queue = compositions(radius, len);
                queue.reverse();
                radius += 1;
                if radius > 2_000 {
                    return None;
                }
            }
            let comp = queue.pop()?;
            let spiral_at = |k: usize| -> RingElement {
                let v: i64 = if k == 0 {
                    0
                } else if k % 2 == 1 {
                    ((k + 1) / 2) as i64
                } else {
                    -((k / 2) as i64)
                };
                ring.from_i64(v)
            };
            Some(comp.into_iter().map(spiral_at).collect())
        });
        Ok(Box::new(it))
    } else {
        Err(RingError::MissingCapability("searchable", ring.to_string()).into())
    }
}

/// All length-`len` tuples of non-negative integers with the given sum, in
/// lexicographic order.
fn compositions(sum: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return if sum == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=sum {
        for mut rest in compositions(sum - first, len - 1) {
            let mut c = vec![first];
            c.append(&mut rest);
            out.push(c);
        }
    }
    out
}

/// Exhaustive check of the stable range condition of index m over a finite
/// ring: every unimodular (m+1)-tuple can be shortened by adding multiples of
/// its last entry to the others so that the first m entries are unimodular.
pub fn condition_r(ring: &RingDescriptor, m: usize, budget: &Budget) -> RResult<bool> {
    if !ring.is_finite() {
        return Err(RingError::MissingCapability("finite", ring.to_string()).into());
    }
    assert!(m >= 1);
    let mut steps = 0u64;
    for tuple in tuple_candidates(ring, m + 1)? {
        steps += 1;
        if steps > budget.element_steps {
            return Err(ReduceError::SearchBudget(steps));
        }
        if unimodular_witness(ring, &tuple)?.is_none() {
            continue;
        }
        let last = &tuple[m];
        let mut shortened_ok = false;
        for xs in tuple_candidates(ring, m)? {
            steps += 1;
            if steps > budget.element_steps {
                return Err(ReduceError::SearchBudget(steps));
            }
            let cand: Vec<RingElement> = (0..m)
                .map(|i| tuple[i].add(&last.mul(&xs[i])?))
                .collect::<Result<_, _>>()?;
            if unimodular_witness(ring, &cand)?.is_some() {
                shortened_ok = true;
                break;
            }
        }
        if !shortened_ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stable dimension: the least d such that the stable range condition of
/// index d+1 holds. Finite rings are checked exhaustively; for the integers
/// the classical value 1 is returned directly (condition index 1 fails on
/// pairs like (5,7), index 2 holds).
pub fn stable_dimension(ring: &RingDescriptor, budget: &Budget) -> RResult<usize> {
    if *ring == RingDescriptor::Integers {
        return Ok(1);
    }
    if !ring.is_finite() {
        return Err(RingError::MissingCapability("finite", ring.to_string()).into());
    }
    for m in 1..=4usize {
        if condition_r(ring, m, budget)? {
            return Ok(m - 1);
        }
    }
    Err(ReduceError::SearchBudget(budget.element_steps))
}

fn size_of(e: &RingElement) -> num_bigint::BigInt {
    use crate::rings::{poly_degree, ValueRepr};
    use num_traits::Signed;
    match e.value() {
        ValueRepr::Int(v) => v.abs(),
        _ => match poly_degree(e) {
            Some(d) => num_bigint::BigInt::from(d as u64 + 1),
            None => num_bigint::BigInt::from(0),
        },
    }
}

/// Euclidean quotient used by the cascade: floor division over Z, long
/// division over F_p[X].
fn euclid_quot(a: &RingElement, b: &RingElement) -> RResult<RingElement> {
    use crate::rings::{poly_divmod, ValueRepr};
    match (a.value(), b.value()) {
        (ValueRepr::Int(x), ValueRepr::Int(y)) => {
            use num_integer::Integer;
            Ok(a.ring().from_bigint(&x.div_floor(y)))
        }
        (ValueRepr::Poly(_), ValueRepr::Poly(_)) => {
            let (q, _r) = poly_divmod(a, b).ok_or(ReduceError::NotUnimodular)?;
            Ok(q)
        }
        _ => Err(RingError::MissingCapability("euclidean division", a.ring().to_string()).into()),
    }
}

/// Word w with row * eval(w) = (1, 0, ..., 0).
///
/// Finite rings need length >= 2; the integers and F_p[X] need length >= 3.
pub fn reduce_row_linear(
    ring: &RingDescriptor,
    row: &[RingElement],
    budget: &Budget,
) -> RResult<ElementaryWord> {
    let n = row.len();
    if ring.is_finite() {
        if n < 2 {
            return Err(ReduceError::TooShort(2));
        }
    } else if ring.is_euclidean() {
        if n < 3 {
            return Err(ReduceError::TooShort(3));
        }
    } else {
        return Err(RingError::MissingCapability("finite or euclidean", ring.to_string()).into());
    }
    if unimodular_witness(ring, row)?.is_none() {
        return Err(ReduceError::NotUnimodular);
    }
    let mut w = ElementaryWord::new(ring.clone(), n, WordKind::Linear);
    let mut v = row.to_vec();
    if ring.is_finite() {
        reduce_finite(ring, &mut v, &mut w, budget)?;
    } else {
        reduce_euclidean(ring, &mut v, &mut w)?;
    }
    debug_assert!(v[0].is_one() && v[1..].iter().all(RingElement::is_zero));
    if w.letters.len() > budget.word_length {
        return Err(ReduceError::WordBudget);
    }
    Ok(w)
}

fn push_and_apply(
    w: &mut ElementaryWord,
    v: &mut [RingElement],
    i: usize,
    j: usize,
    x: RingElement,
) -> RResult<()> {
    if x.is_zero() {
        return Ok(());
    }
    let delta = v[i].mul(&x)?;
    v[j] = v[j].add(&delta)?;
    w.push(i, j, x)?;
    Ok(())
}

fn reduce_finite(
    ring: &RingDescriptor,
    v: &mut Vec<RingElement>,
    w: &mut ElementaryWord,
    budget: &Budget,
) -> RResult<()> {
    let n = v.len();
    // Stages n, n-1, ..., 3: make the prefix unimodular with multiples of the
    // stage entry, then zero the stage entry against a prefix witness.
    for k in (3..=n).rev() {
        let mut steps = 0u64;
        let mut found = None;
        'outer: for xs in tuple_candidates(ring, k - 1)? {
            steps += 1;
            if steps > budget.element_steps {
                return Err(ReduceError::SearchBudget(steps));
            }
            let cand: Vec<RingElement> = (0..k - 1)
                .map(|i| v[i].add(&v[k - 1].mul(&xs[i])?))
                .collect::<Result<_, _>>()?;
            if unimodular_witness(ring, &cand)?.is_some() {
                found = Some(xs);
                break 'outer;
            }
        }
        let xs = found.ok_or(ReduceError::NotUnimodular)?;
        for (i, x) in xs.into_iter().enumerate() {
            push_and_apply(w, v, k - 1, i, x)?;
        }
        let cs = unimodular_witness(ring, &v[..k - 1])?.expect("prefix arranged unimodular");
        let vk = v[k - 1].clone();
        for (i, c) in cs.into_iter().enumerate() {
            push_and_apply(w, v, i, k - 1, c.mul(&vk)?.neg())?;
        }
        debug_assert!(v[k - 1].is_zero());
    }
    // Endgame on (v1, v2) with zeros beyond.
    if n >= 3 {
        // (v1, v2, 0): set v3 = 1 with a witness, then pivot through it.
        let cs = unimodular_witness(ring, &v[..2])?.expect("pair stays unimodular");
        push_and_apply(w, v, 0, 2, cs[0].clone())?;
        push_and_apply(w, v, 1, 2, cs[1].clone())?;
        debug_assert!(v[2].is_one());
        let fix = ring.one().sub(&v[0])?;
        push_and_apply(w, v, 2, 0, fix)?;
        let v2 = v[1].clone();
        push_and_apply(w, v, 0, 1, v2.neg())?;
        push_and_apply(w, v, 0, 2, ring.from_i64(-1))?;
    } else {
        // n = 2: make v1 a unit, clear v2, then normalize the unit.
        let mut steps = 0u64;
        let mut found = None;
        for x in ring.search_candidates().map_err(ReduceError::Ring)? {
            steps += 1;
            if steps > budget.element_steps {
                return Err(ReduceError::SearchBudget(steps));
            }
            if v[0].add(&v[1].mul(&x)?)?.is_unit() {
                found = Some(x);
                break;
            }
        }
        let x = found.ok_or(ReduceError::NotUnimodular)?;
        push_and_apply(w, v, 1, 0, x)?;
        let u = v[0].clone();
        let uinv = u.inverse().expect("arranged unit");
        let tail = v[1].clone();
        push_and_apply(w, v, 0, 1, uinv.mul(&tail)?.neg())?;
        normalize_unit_head(ring, v, w, &u, &uinv)?;
    }
    Ok(())
}

/// (u, 0, ...) -> (1, 0, ...) in three letters through position 2.
fn normalize_unit_head(
    ring: &RingDescriptor,
    v: &mut [RingElement],
    w: &mut ElementaryWord,
    u: &RingElement,
    uinv: &RingElement,
) -> RResult<()> {
    if u.is_one() {
        return Ok(());
    }
    let one = ring.one();
    push_and_apply(w, v, 0, 1, uinv.mul(&one.sub(u)?)?)?;
    push_and_apply(w, v, 1, 0, one.clone())?;
    push_and_apply(w, v, 0, 1, u.sub(&one)?)?;
    Ok(())
}

fn reduce_euclidean(
    ring: &RingDescriptor,
    v: &mut Vec<RingElement>,
    w: &mut ElementaryWord,
) -> RResult<()> {
    let n = v.len();
    // Cascade: repeatedly reduce every other entry by the smallest nonzero
    // entry until one nonzero entry remains. Each pass strictly shrinks the
    // reduced entries (floor remainders are smaller than the pivot), so the
    // loop terminates.
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(ReduceError::WordBudget);
        }
        let mut nonzero: Vec<usize> = (0..n).filter(|&i| !v[i].is_zero()).collect();
        if nonzero.len() <= 1 {
            break;
        }
        nonzero.sort_by_key(|&i| size_of(&v[i]));
        let pivot = nonzero[0];
        for &i in &nonzero[1..] {
            let q = euclid_quot(&v[i], &v[pivot])?;
            if q.is_zero() {
                continue;
            }
            push_and_apply(w, v, pivot, i, q.neg())?;
        }
    }
    let pos = (0..n).find(|&i| !v[i].is_zero()).ok_or(ReduceError::NotUnimodular)?;
    if !v[pos].is_unit() {
        return Err(ReduceError::NotUnimodular);
    }
    // Move the unit to the front.
    if pos != 0 {
        push_and_apply(w, v, pos, 0, ring.one())?;
        push_and_apply(w, v, 0, pos, ring.from_i64(-1))?;
    }
    let u = v[0].clone();
    let uinv = u.inverse().expect("checked unit");
    normalize_unit_head(ring, v, w, &u, &uinv)?;
    Ok(())
}

/// Factorization of a determinant-one matrix as a product of elementary
/// generators: eval(word) == mat exactly.
pub fn factor_sl(ring: &RingDescriptor, mat: &Mat, budget: &Budget) -> RResult<ElementaryWord> {
    if mat.rows() != mat.cols() || mat.rows() == 0 {
        return Err(RingError::Parse("factorization needs a square matrix".into()).into());
    }
    if !mat.det()?.is_one() {
        return Err(ReduceError::DetNotOne);
    }
    let word = factor_sl_inner(ring, mat, budget)?;
    if word.letters.len() > budget.word_length {
        return Err(ReduceError::WordBudget);
    }
    Ok(word)
}

fn factor_sl_inner(ring: &RingDescriptor, mat: &Mat, budget: &Budget) -> RResult<ElementaryWord> {
    let n = mat.rows();
    if n == 1 {
        // Determinant 1 forces the single entry to be 1.
        return Ok(ElementaryWord::new(ring.clone(), 1, WordKind::Linear));
    }
    if n == 2 {
        return factor_sl2(ring, mat, budget);
    }
    // Reduce the first row to e1 on the right.
    let w_r = reduce_row_linear(ring, &mat.row_vec(0), budget)?;
    let m = mat.mul(&w_r.eval()?)?;
    debug_assert!(m[(0, 0)].is_one());
    // Clear the first column with left letters; their inverses lead the word.
    let mut lead = ElementaryWord::new(ring.clone(), n, WordKind::Linear);
    let mut cleared = m.clone();
    for i in 1..n {
        let x = m[(i, 0)].clone();
        if x.is_zero() {
            continue;
        }
        // Left multiplication by ge_{i,0}(-x) adds -x * row 0 to row i.
        for j in 0..n {
            let delta = x.mul(&cleared[(0, j)])?;
            let nv = cleared[(i, j)].sub(&delta)?;
            cleared.set(i, j, nv);
        }
        // alpha = ge_{i,0}(x) * (cleared part), so the word starts with the
        // non-inverted letters in clearing order.
        lead.push(i, 0, x)?;
    }
    let beta = Mat::from_fn(ring.clone(), n - 1, n - 1, |i, j| cleared[(i + 1, j + 1)].clone());
    let w_beta = factor_sl_inner(ring, &beta, budget)?;
    let word = lead
        .concat(&w_beta.shifted(1, n)?)?
        .concat(&w_r.inverse_word())?;
    Ok(word)
}

fn factor_sl2(ring: &RingDescriptor, mat: &Mat, budget: &Budget) -> RResult<ElementaryWord> {
    let mut m = mat.clone();
    // Row operations on the left; alpha = inverse(ops) * diag(u, 1/u).
    let mut ops = ElementaryWord::new(ring.clone(), 2, WordKind::Linear);
    let left = |m: &mut Mat, ops: &mut ElementaryWord, i: usize, j: usize, x: &RingElement| -> RResult<()> {
        if x.is_zero() {
            return Ok(());
        }
        for c in 0..2 {
            let delta = x.mul(&m[(j, c)])?;
            let nv = m[(i, c)].add(&delta)?;
            m.set(i, c, nv);
        }
        ops.push(i, j, x.clone())?;
        Ok(())
    };
    if ring.is_finite() {
        if !m[(0, 0)].is_unit() {
            let mut found = None;
            let mut steps = 0u64;
            for x in ring.search_candidates().map_err(ReduceError::Ring)? {
                steps += 1;
                if steps > budget.element_steps {
                    return Err(ReduceError::SearchBudget(steps));
                }
                if m[(0, 0)].add(&x.mul(&m[(1, 0)])?)?.is_unit() {
                    found = Some(x);
                    break;
                }
            }
            let x = found.ok_or(ReduceError::NotUnimodular)?;
            left(&mut m, &mut ops, 0, 1, &x)?;
        }
    } else if ring.is_euclidean() {
        // Column-one Euclid by left row operations; sizes strictly decrease.
        loop {
            let a = m[(0, 0)].clone();
            let bb = m[(1, 0)].clone();
            if bb.is_zero() {
                break;
            }
            if a.is_zero() {
                // (0, b) -> (b, b) -> (b, 0).
                left(&mut m, &mut ops, 0, 1, &ring.one())?;
                left(&mut m, &mut ops, 1, 0, &ring.from_i64(-1))?;
                continue;
            }
            if size_of(&a) >= size_of(&bb) {
                let q = euclid_quot(&a, &bb)?;
                left(&mut m, &mut ops, 0, 1, &q.neg())?;
            } else {
                let q = euclid_quot(&bb, &a)?;
                left(&mut m, &mut ops, 1, 0, &q.neg())?;
            }
        }
    } else {
        return Err(RingError::MissingCapability("finite or euclidean", ring.to_string()).into());
    }
    let u = m[(0, 0)].clone();
    let uinv = u.inverse().ok_or(ReduceError::DetNotOne)?;
    // Clear below and to the right of the unit pivot.
    let x = m[(1, 0)].mul(&uinv)?.neg();
    left(&mut m, &mut ops, 1, 0, &x)?;
    // Now m = [[u, b], [0, d]] with u*d = 1.
    let x = m[(0, 1)].mul(&u)?.neg();
    left(&mut m, &mut ops, 0, 1, &x)?;
    debug_assert!(m[(0, 1)].is_zero() && m[(1, 0)].is_zero());
    debug_assert_eq!(m[(1, 1)], uinv);
    // The ops were applied on the left in order E1, E2, ..., Ek, so
    // mat = inv(E1) * inv(E2) * ... * inv(Ek) * diag(u, 1/u): the word is the
    // letters in pushed order with negated parameters.
    let mut word = ops.map_params(ring, &|x| Ok(x.neg()))?;
    word = word.concat(&whitehead_diag(ring, &u, &uinv)?)?;
    Ok(word)
}

/// Six-letter word for diag(u, 1/u) inside the elementary group.
pub fn whitehead_diag(
    ring: &RingDescriptor,
    u: &RingElement,
    uinv: &RingElement,
) -> RResult<ElementaryWord> {
    let mut w = ElementaryWord::new(ring.clone(), 2, WordKind::Linear);
    if u.is_one() {
        return Ok(w);
    }
    w.push(0, 1, u.clone())?;
    w.push(1, 0, uinv.neg())?;
    w.push(0, 1, u.clone())?;
    w.push(0, 1, ring.from_i64(-1))?;
    w.push(1, 0, ring.one())?;
    w.push(0, 1, ring.from_i64(-1))?;
    Ok(w)
}

/// Whitehead rotation of a unit, the class map target: returns (unit, word)
/// with mat == diag(u, 1, ..., 1) * eval(word) and det(mat) = u.
pub fn k1_class(
    ring: &RingDescriptor,
    mat: &Mat,
    budget: &Budget,
) -> RResult<(RingElement, ElementaryWord)> {
    if mat.rows() != mat.cols() || mat.rows() == 0 {
        return Err(RingError::Parse("class map needs a square matrix".into()).into());
    }
    let u = mat.det()?;
    let uinv = u.inverse().ok_or(ReduceError::DetNotUnit)?;
    let n = mat.rows();
    if n == 1 {
        return Ok((u, ElementaryWord::new(ring.clone(), 1, WordKind::Linear)));
    }
    // diag(1/u, 1, ..., 1) * mat has determinant 1; factor it.
    let mut scaled = mat.clone();
    for j in 0..n {
        let nv = scaled[(0, j)].mul(&uinv)?;
        scaled.set(0, j, nv);
    }
    let word = factor_sl(ring, &scaled, budget)?;
    Ok((u, word))
}

/// Letters acting on pairs (p, a) in R^n + R: `Add(x)` sends (p, a) to
/// (p + a x, a); `Dual(c)` sends (p, a) to (p, a + c . p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairLetter {
    Add(Vec<RingElement>),
    Dual(Vec<RingElement>),
}

impl PairLetter {
    pub fn apply(&self, p: &mut [RingElement], a: &mut RingElement) -> RResult<()> {
        match self {
            PairLetter::Add(x) => {
                for (pi, xi) in p.iter_mut().zip(x) {
                    *pi = pi.add(&a.mul(xi)?)?;
                }
            }
            PairLetter::Dual(c) => {
                let mut dot = a.ring().zero();
                for (pi, ci) in p.iter().zip(c) {
                    dot = dot.add(&pi.mul(ci)?)?;
                }
                *a = a.add(&dot)?;
            }
        }
        Ok(())
    }

    /// (n+1) x (n+1) matrix in the column convention on (p, a).
    pub fn matrix(&self, ring: &RingDescriptor) -> Mat {
        let (vec, dual) = match self {
            PairLetter::Add(x) => (x, false),
            PairLetter::Dual(c) => (c, true),
        };
        let n = vec.len();
        let mut m = Mat::identity(ring.clone(), n + 1);
        for (k, e) in vec.iter().enumerate() {
            if dual {
                m.set(n, k, e.clone());
            } else {
                m.set(k, n, e.clone());
            }
        }
        m
    }

    pub fn to_json(&self) -> Value {
        match self {
            PairLetter::Add(x) => json!({
                "op": "add",
                "x": x.iter().map(RingElement::to_json).collect::<Vec<_>>(),
            }),
            PairLetter::Dual(c) => json!({
                "op": "dual",
                "c": c.iter().map(RingElement::to_json).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Reduces a unimodular pair (p, a) to (0, 1) with the two pair operations.
/// Unimodular means the combined row (p_1 .. p_n, a) is unimodular.
pub fn reduce_pair(
    ring: &RingDescriptor,
    p: &[RingElement],
    a: &RingElement,
    budget: &Budget,
) -> RResult<Vec<PairLetter>> {
    let n = p.len();
    if ring.is_finite() {
        if n < 1 {
            return Err(ReduceError::TooShort(1));
        }
    } else if *ring == RingDescriptor::Integers {
        if n < 2 {
            return Err(ReduceError::TooShort(2));
        }
    } else {
        return Err(RingError::MissingCapability("finite or integers", ring.to_string()).into());
    }
    let mut all: Vec<RingElement> = p.to_vec();
    all.push(a.clone());
    if unimodular_witness(ring, &all)?.is_none() {
        return Err(ReduceError::NotUnimodular);
    }
    let mut letters = Vec::new();
    let mut p = p.to_vec();
    let mut a = a.clone();
    // Step 1: make p unimodular by adding a multiple of a.
    if unimodular_witness(ring, &p)?.is_none() {
        let mut steps = 0u64;
        let mut found = None;
        'outer: for xs in tuple_candidates(ring, n)? {
            steps += 1;
            if steps > budget.element_steps {
                return Err(ReduceError::SearchBudget(steps));
            }
            let cand: Vec<RingElement> = p
                .iter()
                .zip(&xs)
                .map(|(pi, xi)| pi.add(&a.mul(xi)?))
                .collect::<Result<_, _>>()?;
            if unimodular_witness(ring, &cand)?.is_some() {
                found = Some(xs);
                break 'outer;
            }
        }
        let xs = found.ok_or(ReduceError::NotUnimodular)?;
        let letter = PairLetter::Add(xs);
        letter.apply(&mut p, &mut a)?;
        letters.push(letter);
    }
    // Step 2: witness c with c . p = 1; push a to exactly 1.
    let c = unimodular_witness(ring, &p)?.expect("arranged unimodular");
    let gap = ring.one().sub(&a)?;
    if !gap.is_zero() {
        let scaled: Vec<RingElement> = c
            .iter()
            .map(|ci| ci.mul(&gap))
            .collect::<Result<_, _>>()?;
        let letter = PairLetter::Dual(scaled);
        letter.apply(&mut p, &mut a)?;
        letters.push(letter);
    }
    debug_assert!(a.is_one());
    // Step 3: clear p.
    if !p.iter().all(RingElement::is_zero) {
        let letter = PairLetter::Add(p.iter().map(RingElement::neg).collect());
        letter.apply(&mut p, &mut a)?;
        letters.push(letter);
    }
    debug_assert!(p.iter().all(RingElement::is_zero) && a.is_one());
    Ok(letters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::IdealDescriptor;

    fn z() -> RingDescriptor {
        RingDescriptor::integers()
    }
    fn zmod(n: u64) -> RingDescriptor {
        RingDescriptor::integers_mod(n).unwrap()
    }
    fn fp(p: u64) -> RingDescriptor {
        RingDescriptor::prime_field(p).unwrap()
    }
    fn b() -> Budget {
        Budget::default()
    }

    // Oracle: unimodularity decided through ideal membership of 1, which is
    // an independent breadth-first computation.
    fn unimodular_oracle(ring: &RingDescriptor, row: &[RingElement]) -> bool {
        let ideal = IdealDescriptor::new(ring.clone(), row.to_vec()).unwrap();
        ideal.member(&ring.one()).unwrap()
    }

    #[test]
    fn witness_agrees_with_ideal_membership_oracle() {
        for ring in [zmod(4), zmod(6), zmod(9)] {
            let elems = ring.enumerate().unwrap();
            for a in &elems {
                for bb in &elems {
                    let row = vec![a.clone(), bb.clone()];
                    let w = unimodular_witness(&ring, &row).unwrap();
                    assert_eq!(w.is_some(), unimodular_oracle(&ring, &row), "{a},{bb} in {ring}");
                    if let Some(c) = w {
                        let mut acc = ring.zero();
                        for (ci, ri) in c.iter().zip(&row) {
                            acc = acc.add(&ci.mul(ri).unwrap()).unwrap();
                        }
                        assert!(acc.is_one());
                    }
                }
            }
        }
        // Euclidean cases.
        let w = unimodular_witness(&z(), &[z().from_i64(6), z().from_i64(10), z().from_i64(15)])
            .unwrap()
            .expect("gcd(6,10,15)=1");
        let acc = w[0]
            .mul(&z().from_i64(6))
            .unwrap()
            .add(&w[1].mul(&z().from_i64(10)).unwrap())
            .unwrap()
            .add(&w[2].mul(&z().from_i64(15)).unwrap())
            .unwrap();
        assert!(acc.is_one());
        assert!(unimodular_witness(&z(), &[z().from_i64(6), z().from_i64(10)])
            .unwrap()
            .is_none());
    }

    #[test]
    fn stable_dimension_of_small_residue_rings_is_zero() {
        for n in 2..=12u64 {
            assert_eq!(stable_dimension(&zmod(n), &b()).unwrap(), 0, "Z/{n}");
        }
    }

    #[test]
    fn stable_dimension_of_integers_is_one() {
        assert_eq!(stable_dimension(&z(), &b()).unwrap(), 1);
        // Spot check the failing pair from the documented argument: (5, 7)
        // cannot be shortened over Z since 7 + 5x is never a unit.
        for x in -30i64..=30 {
            assert!(!z().from_i64(7 + 5 * x).is_unit());
        }
    }

    #[test]
    fn reduce_row_over_residue_rings() {
        // Every unimodular pair over Z/6 and triple over Z/4 reduces to e1,
        // and the word stays within the ring.
        let ring = zmod(6);
        let elems = ring.enumerate().unwrap();
        for a in &elems {
            for bb in &elems {
                let row = vec![a.clone(), bb.clone()];
                if !unimodular_oracle(&ring, &row) {
                    assert!(matches!(
                        reduce_row_linear(&ring, &row, &b()),
                        Err(ReduceError::NotUnimodular)
                    ));
                    continue;
                }
                let w = reduce_row_linear(&ring, &row, &b()).unwrap();
                let got = apply_word_to_row(&row, &w).unwrap();
                assert!(got[0].is_one() && got[1].is_zero(), "({a},{bb})");
            }
        }
        let ring = zmod(4);
        let elems = ring.enumerate().unwrap();
        for a in &elems {
            for bb in &elems {
                for c in &elems {
                    let row = vec![a.clone(), bb.clone(), c.clone()];
                    if !unimodular_oracle(&ring, &row) {
                        continue;
                    }
                    let w = reduce_row_linear(&ring, &row, &b()).unwrap();
                    let got = apply_word_to_row(&row, &w).unwrap();
                    assert!(
                        got[0].is_one() && got[1].is_zero() && got[2].is_zero(),
                        "({a},{bb},{c})"
                    );
                    // Word letters all live in the expected group size.
                    assert_eq!(w.n, 3);
                }
            }
        }
    }

    #[test]
    fn reduce_row_over_integers() {
        let rows: Vec<Vec<i64>> = vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, -1],
            vec![2, 3, 5],
            vec![6, 10, 15],
            vec![-9, 14, 4],
            vec![35, 21, 15],
            vec![1, 1000000, -999999],
        ];
        for r in rows {
            let row: Vec<_> = r.iter().map(|&x| z().from_i64(x)).collect();
            let w = reduce_row_linear(&z(), &row, &b()).unwrap();
            let got = apply_word_to_row(&row, &w).unwrap();
            assert!(got[0].is_one() && got[1..].iter().all(RingElement::is_zero), "{r:?}");
        }
        // Length 2 over Z is rejected by precondition.
        assert!(matches!(
            reduce_row_linear(&z(), &[z().from_i64(2), z().from_i64(3)], &b()),
            Err(ReduceError::TooShort(3))
        ));
        // Non-unimodular input errors.
        assert!(matches!(
            reduce_row_linear(&z(), &[z().from_i64(2), z().from_i64(4), z().from_i64(6)], &b()),
            Err(ReduceError::NotUnimodular)
        ));
    }

    #[test]
    fn reduce_row_over_polynomials() {
        let pr = RingDescriptor::polynomial(fp(5), "X").unwrap();
        let c = |v: &[i64]| {
            pr.from_coeffs(v.iter().map(|&x| fp(5).from_i64(x)).collect()).unwrap()
        };
        // (X, X+1, X^2): gcd 1.
        let row = vec![c(&[0, 1]), c(&[1, 1]), c(&[0, 0, 1])];
        let w = reduce_row_linear(&pr, &row, &b()).unwrap();
        let got = apply_word_to_row(&row, &w).unwrap();
        assert!(got[0].is_one() && got[1].is_zero() && got[2].is_zero());
    }

    #[test]
    fn factor_sl_round_trips() {
        // Finite ring matrices built from known elementary products.
        let ring = zmod(6);
        let mut w = ElementaryWord::new(ring.clone(), 3, WordKind::Linear);
        for (i, j, x) in [(0, 1, 2i64), (2, 0, 5), (1, 2, 3), (0, 2, 1), (1, 0, 4)] {
            w.push(i, j, ring.from_i64(x)).unwrap();
        }
        let m = w.eval().unwrap();
        let factored = factor_sl(&ring, &m, &b()).unwrap();
        assert_eq!(factored.eval().unwrap(), m);
        // Integer matrices with moderate entries.
        let mats = [
            Mat::from_i64(&z(), &[&[7, 2], &[3, 1]]),
            Mat::from_i64(&z(), &[&[1, 0], &[0, 1]]),
            Mat::from_i64(&z(), &[&[0, -1], &[1, 0]]),
            Mat::from_i64(&z(), &[&[-1, 0], &[0, -1]]),
        ];
        for m in mats {
            let wrd = factor_sl(&z(), &m, &b()).unwrap();
            assert_eq!(wrd.eval().unwrap(), m, "2x2 over Z");
        }
        let m3 = Mat::from_i64(&z(), &[&[2, 3, 0], &[1, 2, 0], &[3, 4, 1]]);
        assert!(m3.det().unwrap().is_one());
        let wrd = factor_sl(&z(), &m3, &b()).unwrap();
        assert_eq!(wrd.eval().unwrap(), m3);
        // Determinant gate.
        let bad = Mat::from_i64(&z(), &[&[2, 0], &[0, 1]]);
        assert!(matches!(factor_sl(&z(), &bad, &b()), Err(ReduceError::DetNotOne)));
    }

    #[test]
    fn factor_sl2_exhaustive_over_f3() {
        // All of SL_2(F_3), 24 matrices, reconstructed exactly.
        let ring = fp(3);
        let elems = ring.enumerate().unwrap();
        let mut count = 0;
        for a in &elems {
            for bb in &elems {
                for c in &elems {
                    for d in &elems {
                        let m = Mat::new(
                            ring.clone(),
                            2,
                            2,
                            vec![a.clone(), bb.clone(), c.clone(), d.clone()],
                        )
                        .unwrap();
                        if !m.det().unwrap().is_one() {
                            continue;
                        }
                        count += 1;
                        let w = factor_sl(&ring, &m, &b()).unwrap();
                        assert_eq!(w.eval().unwrap(), m);
                    }
                }
            }
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn k1_class_splits_determinant() {
        let ring = zmod(5);
        let m = Mat::from_i64(&ring, &[&[2, 1, 0], &[0, 1, 3], &[1, 0, 2]]);
        let d = m.det().unwrap();
        assert!(d.is_unit() && !d.is_one());
        let (u, w) = k1_class(&ring, &m, &b()).unwrap();
        assert_eq!(u, d);
        // mat = diag(u,1,1) * eval(word).
        let mut diag = Mat::identity(ring.clone(), 3);
        diag.set(0, 0, u);
        assert_eq!(diag.mul(&w.eval().unwrap()).unwrap(), m);
    }

    #[test]
    fn pair_reduction_lands_on_zero_one() {
        // Exhaustive over Z/4 pairs (p in R^2, a in R).
        let ring = zmod(4);
        let elems = ring.enumerate().unwrap();
        for p1 in &elems {
            for p2 in &elems {
                for a in &elems {
                    let p = vec![p1.clone(), p2.clone()];
                    let mut all = p.clone();
                    all.push(a.clone());
                    let uni = unimodular_oracle(&ring, &all);
                    let got = reduce_pair(&ring, &p, a, &b());
                    if !uni {
                        assert!(matches!(got, Err(ReduceError::NotUnimodular)));
                        continue;
                    }
                    let letters = got.unwrap();
                    assert!(letters.len() <= 3);
                    let mut pp = p.clone();
                    let mut aa = a.clone();
                    for l in &letters {
                        l.apply(&mut pp, &mut aa).unwrap();
                    }
                    assert!(pp.iter().all(RingElement::is_zero) && aa.is_one());
                    // Matrix form agrees with the functional action.
                    let mut vec_col = p.clone();
                    vec_col.push(a.clone());
                    let mut m = Mat::identity(ring.clone(), 3);
                    for l in &letters {
                        m = l.matrix(&ring).mul(&m).unwrap();
                    }
                    let col = Mat::column(ring.clone(), vec_col).unwrap();
                    let out = m.mul(&col).unwrap();
                    assert!(out[(0, 0)].is_zero() && out[(1, 0)].is_zero() && out[(2, 0)].is_one());
                }
            }
        }
        // Over Z, a pair with p not unimodular but (p, a) unimodular.
        let p = vec![z().from_i64(4), z().from_i64(6)];
        let a = z().from_i64(3);
        let letters = reduce_pair(&z(), &p, &a, &b()).unwrap();
        let mut pp = p.clone();
        let mut aa = a.clone();
        for l in &letters {
            l.apply(&mut pp, &mut aa).unwrap();
        }
        assert!(pp.iter().all(RingElement::is_zero) && aa.is_one());
    }

    #[test]
    fn condition_monotone_on_small_rings() {
        for n in 2..=8u64 {
            let ring = zmod(n);
            assert!(condition_r(&ring, 1, &b()).unwrap());
            assert!(condition_r(&ring, 2, &b()).unwrap(), "R2 over Z/{n}");
        }
    }
}
