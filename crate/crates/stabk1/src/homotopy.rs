//! Matrices over polynomial rings treated as paths: substitution, the unit
//! test for polynomial determinants, dilation of a conjugated elementary
//! letter over a localization into a word with integral parameters, patching
//! of per-factor factorizations into one global elementary word over a
//! finite base ring, and a replay harness that upgrades a finite
//! factorization to a certified path argument.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One as _, Signed as _, Zero as _};
use thiserror::Error;

use crate::budget::Budget;
use crate::matgroups::{
    is_symplectic, letter_matrix, standard_symplectic_gram, ElementaryWord, Gen, Mat, WordKind,
};
use crate::reduction::{factor_sl, reduce_row_linear, whitehead_diag, ReduceError};
use crate::rings::{
    poly_coeff, poly_degree, poly_eval, poly_gen, poly_map_coeffs, CrtComponent, RingDescriptor,
    RingElement, RingError, ValueRepr,
};
use crate::symplectic::{factor_sp, sp_factor_product, SpError, SpFactorLetter};

#[derive(Debug, Error)]
pub enum HomotopyError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Sp(#[from] SpError),
    #[error("expected a matrix over a polynomial ring, got {0}")]
    NotPolyMatrix(String),
    #[error("not a path starting at the identity: {0}")]
    NotIsotopy(String),
    #[error("dilation needs {0}")]
    BadDilation(String),
    #[error("no power up to {0} clears the denominators; the smallest sufficient power is {1}")]
    BoundExhausted(u32, u32),
    #[error("degree {0} exceeds the cap {1}")]
    DegreeOverflow(usize, usize),
    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type HResult<T> = std::result::Result<T, HomotopyError>;

fn poly_parts(ring: &RingDescriptor) -> HResult<(RingDescriptor, String)> {
    match ring {
        RingDescriptor::PolynomialRing(base, var) => Ok(((**base).clone(), var.clone())),
        other => Err(HomotopyError::NotPolyMatrix(other.to_string())),
    }
}

fn constant_in(pring: &RingDescriptor, x: &RingElement) -> Result<RingElement, RingError> {
    pring.from_coeffs(vec![x.clone()])
}

/// Word with every parameter x replaced by x * X; evaluating at X = 1
/// recovers the original word, at X = 0 the identity.
fn scale_word_by_gen(w: &ElementaryWord, pring: &RingDescriptor) -> HResult<ElementaryWord> {
    let x = poly_gen(pring)?;
    Ok(w.map_params(pring, &|c| constant_in(pring, c)?.mul(&x))?)
}

/// Entrywise substitution of a base-ring point into a polynomial matrix.
pub fn eval_poly_matrix(m: &Mat, point: &RingElement) -> HResult<Mat> {
    let (base, _) = poly_parts(m.ring())?;
    Ok(m.map_entries(&base, &|e| poly_eval(e, point))?)
}

/// Constant-coefficient embedding of a matrix into the polynomial ring.
pub fn lift_matrix_to_poly(m: &Mat, pring: &RingDescriptor) -> HResult<Mat> {
    let (base, _) = poly_parts(pring)?;
    if &base != m.ring() {
        return Err(HomotopyError::NotPolyMatrix(format!(
            "cannot lift a matrix over {} into {}",
            m.ring(),
            pring
        )));
    }
    Ok(m.map_entries(pring, &|e| constant_in(pring, e))?)
}

fn max_entry_degree(m: &Mat) -> usize {
    let mut d = 0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            d = d.max(poly_degree(&m[(i, j)]).unwrap_or(0));
        }
    }
    d
}

/// A square polynomial matrix is a path starting at the identity when its
/// value at 0 is I and its determinant is a unit polynomial (unit constant
/// term, nilpotent higher coefficients). The symplectic kind additionally
/// demands that the standard form is preserved identically in the variable.
pub fn is_isotopy(m: &Mat, kind: WordKind) -> HResult<bool> {
    if m.rows() != m.cols() {
        return Ok(false);
    }
    let (base, _) = poly_parts(m.ring())?;
    if !eval_poly_matrix(m, &base.zero())?.is_identity() {
        return Ok(false);
    }
    if !m.det()?.is_unit() {
        return Ok(false);
    }
    if kind == WordKind::Symplectic {
        if m.rows() % 2 != 0 {
            return Ok(false);
        }
        let gram = standard_symplectic_gram(m.ring(), m.rows() / 2);
        if !is_symplectic(m, &gram)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of clearing the denominators of one conjugated elementary letter
/// over a localization of the integers. `flattened` is a word over Z[X]
/// whose evaluation, pushed back into the localized ring, equals the
/// conjugated letter with the variable rescaled by h^m. The `core` letters
/// all carry parameters divisible by X; the `dressing` is a constant word
/// conjugating the core into place, so flattened = dressing^-1 core dressing.
#[derive(Debug, Clone)]
pub struct DilationResult {
    pub m: u32,
    pub dressing: ElementaryWord,
    pub core: ElementaryWord,
    pub flattened: ElementaryWord,
}

/// Integral primitive vector and content of a vector over Z localized at h:
/// entries = mu * primitive, primitive has coprime integer entries and a
/// positive leading nonzero entry.
fn primitive_part(
    loc: &RingDescriptor,
    h: &BigInt,
    entries: &[RingElement],
) -> HResult<(Vec<BigInt>, RingElement)> {
    let mut nums: Vec<BigInt> = Vec::with_capacity(entries.len());
    let mut pows: Vec<u32> = Vec::with_capacity(entries.len());
    for e in entries {
        match e.value() {
            ValueRepr::Frac(num, pow) => {
                nums.push(num.int_value().cloned().ok_or_else(|| {
                    HomotopyError::Internal("localized entry without integer numerator".into())
                })?);
                pows.push(*pow);
            }
            _ => {
                return Err(HomotopyError::Internal(
                    "localized entry with a foreign representation".into(),
                ))
            }
        }
    }
    let maxpow = pows.iter().copied().max().unwrap_or(0);
    let ints: Vec<BigInt> = nums
        .iter()
        .zip(&pows)
        .map(|(n, p)| n * h.pow(maxpow - p))
        .collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return Err(HomotopyError::Internal(
            "zero column or row in an invertible matrix".into(),
        ));
    }
    if ints.iter().find(|v| !v.is_zero()).map(|v| v.is_negative()) == Some(true) {
        g = -g;
    }
    let primitive: Vec<BigInt> = ints.iter().map(|v| v / &g).collect();
    let z = RingDescriptor::integers();
    let mu = loc.frac(z.from_bigint(&g), maxpow)?;
    for (i, e) in entries.iter().enumerate() {
        if mu.mul(&loc.from_bigint(&primitive[i]))? != *e {
            return Err(HomotopyError::Internal("content extraction mismatch".into()));
        }
    }
    Ok((primitive, mu))
}

/// Clears the denominators of delta ge_{kl}(X f) delta^{-1} over Z localized
/// at h: finds the smallest power m within the bound such that substituting
/// h^m X makes the letter expressible as a word with integer parameters.
/// Indices are zero-based and the row index k must avoid the first row, so
/// that a spare slot exists for the dressing; three rows are the floor.
pub fn dilate(
    delta: &Mat,
    k: usize,
    l: usize,
    f: &RingElement,
    budget: &Budget,
) -> HResult<DilationResult> {
    let loc = delta.ring().clone();
    let h = match &loc {
        RingDescriptor::Localization(base, s) if **base == RingDescriptor::Integers => s
            .int_value()
            .cloned()
            .ok_or_else(|| HomotopyError::Internal("integer localizer without value".into()))?,
        other => {
            return Err(HomotopyError::BadDilation(format!(
                "a localization of the integers, got {other}"
            )))
        }
    };
    let r = delta.rows();
    if r != delta.cols() {
        return Err(HomotopyError::BadDilation("a square conjugator".into()));
    }
    if r < 3 {
        return Err(HomotopyError::BadDilation(
            "at least three rows, so a spare index exists".into(),
        ));
    }
    if k == 0 {
        return Err(HomotopyError::BadDilation(
            "a row index other than the first row".into(),
        ));
    }
    if k == l || k >= r || l >= r {
        return Err(HomotopyError::BadDilation(format!(
            "distinct in-range indices, got ({k}, {l}) with {r} rows"
        )));
    }
    let var = match f.ring() {
        RingDescriptor::PolynomialRing(base, var) if **base == loc => var.clone(),
        other => {
            return Err(HomotopyError::BadDilation(format!(
                "a polynomial over the localized ring, got {other}"
            )))
        }
    };
    let fdeg = poly_degree(f).unwrap_or(0);
    if fdeg + 1 > budget.degree_cap {
        return Err(HomotopyError::DegreeOverflow(fdeg + 1, budget.degree_cap));
    }
    let z = RingDescriptor::integers();
    let pz = RingDescriptor::polynomial(z.clone(), &var)?;
    let delta_inv = delta.inverse()?;
    let u = delta.col_vec(k);
    let v = delta_inv.row_vec(l);
    let (u0, mu_u) = primitive_part(&loc, &h, &u)?;
    let (v0, mu_v) = primitive_part(&loc, &h, &v)?;
    let dot: BigInt = u0.iter().zip(&v0).map(|(a, b)| a * b).sum();
    if !dot.is_zero() {
        return Err(HomotopyError::Internal(
            "row of the inverse not orthogonal to the column".into(),
        ));
    }
    let mu = mu_u.mul(&mu_v)?;

    // Scaled coefficients of the letter parameter: the X^(i+1) coefficient of
    // the cleared parameter is c_i mu h^(m(i+1)), integral iff the canonical
    // denominator power of c_i mu is at most m(i+1).
    let mut scaled: Vec<(BigInt, u32)> = Vec::with_capacity(fdeg + 1);
    for i in 0..=fdeg {
        let ci = poly_coeff(f, i).mul(&mu)?;
        match ci.value() {
            ValueRepr::Frac(num, pow) => {
                let n = num.int_value().cloned().ok_or_else(|| {
                    HomotopyError::Internal("localized coefficient without integer value".into())
                })?;
                scaled.push((n, *pow));
            }
            _ => return Err(HomotopyError::Internal("foreign coefficient".into())),
        }
    }
    if scaled.iter().all(|(n, _)| n.is_zero()) {
        let empty = ElementaryWord::new(pz, r, WordKind::Linear);
        return Ok(DilationResult {
            m: 0,
            dressing: empty.clone(),
            core: empty.clone(),
            flattened: empty,
        });
    }
    let integral_at = |m: u32| {
        scaled
            .iter()
            .enumerate()
            .all(|(i, (n, p))| n.is_zero() || m as u64 * (i as u64 + 1) >= *p as u64)
    };
    let m = match (0..=budget.dilation_bound).find(|m| integral_at(*m)) {
        Some(m) => m,
        None => {
            let needed = scaled
                .iter()
                .enumerate()
                .filter(|(_, (n, _))| !n.is_zero())
                .map(|(i, (_, p))| (*p as u64).div_ceil(i as u64 + 1))
                .max()
                .unwrap_or(0) as u32;
            return Err(HomotopyError::BoundExhausted(budget.dilation_bound, needed));
        }
    };

    // qhat in Z[X]: coefficient i+1 is n_i h^(m(i+1) - p_i).
    let mut qhat_coeffs = vec![z.zero(); fdeg + 2];
    for (i, (n, p)) in scaled.iter().enumerate() {
        if n.is_zero() {
            continue;
        }
        let exp = m * (i as u32 + 1) - p;
        qhat_coeffs[i + 1] = z.from_bigint(&(n * h.pow(exp)));
    }
    let qhat = pz.from_coeffs(qhat_coeffs)?;

    let unit_slot = |w: &[BigInt]| -> Option<usize> {
        let mut slot = None;
        for (i, x) in w.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if slot.is_some() || !x.is_one() {
                return None;
            }
            slot = Some(i);
        }
        slot
    };

    let mut dressing = ElementaryWord::new(pz.clone(), r, WordKind::Linear);
    let mut core = ElementaryWord::new(pz.clone(), r, WordKind::Linear);
    match (unit_slot(&u0), unit_slot(&v0)) {
        (Some(i0), Some(j0)) => {
            core.push(i0, j0, qhat.clone())?;
        }
        _ => {
            let u0_row: Vec<RingElement> = u0.iter().map(|x| z.from_bigint(x)).collect();
            let w = reduce_row_linear(&z, &u0_row, budget)?;
            let eps = w.transposed();
            let e_mat = eps.eval()?;
            let e_inv = e_mat.inverse()?;
            let v0_row = Mat::new(
                z.clone(),
                1,
                r,
                v0.iter().map(|x| z.from_bigint(x)).collect(),
            )?;
            let w_row = v0_row.mul(&e_inv)?;
            if !w_row[(0, 0)].is_zero() {
                return Err(HomotopyError::Internal(
                    "dressed row keeps a first coordinate".into(),
                ));
            }
            for j in 1..r {
                let c = &w_row[(0, j)];
                if c.is_zero() {
                    continue;
                }
                core.push(0, j, qhat.mul(&constant_in(&pz, c)?)?)?;
            }
            dressing = eps.map_params(&pz, &|c| constant_in(&pz, c))?;
        }
    }
    let flattened = dressing.inverse_word().concat(&core)?.concat(&dressing)?;

    let tau = flattened.eval()?;
    if !eval_poly_matrix(&tau, &z.zero())?.is_identity() {
        return Err(HomotopyError::Internal("dilated word does not start at I".into()));
    }
    // Exact localization identity: tau pushed into the localized ring equals
    // delta ge_{kl}(y) delta^{-1} with y = h^m X f(h^m X).
    let ploc = RingDescriptor::polynomial(loc.clone(), &var)?;
    let tau_loc = tau.map_entries(&ploc, &|e| {
        poly_map_coeffs(e, &ploc, &|c| {
            Ok(loc.from_bigint(c.int_value().expect("integer coefficient")))
        })
    })?;
    let hm = loc.from_bigint(&h.pow(m));
    let mut y_coeffs = vec![loc.zero(); fdeg + 2];
    let mut hm_pow = hm.clone();
    for i in 0..=fdeg {
        y_coeffs[i + 1] = poly_coeff(f, i).mul(&hm_pow)?;
        hm_pow = hm_pow.mul(&hm)?;
    }
    let y = ploc.from_coeffs(y_coeffs)?;
    let letter = letter_matrix(&ploc, r, WordKind::Linear, &Gen { i: k, j: l, x: y });
    let lhs = lift_matrix_to_poly(delta, &ploc)?
        .mul(&letter)?
        .mul(&lift_matrix_to_poly(&delta_inv, &ploc)?)?;
    if tau_loc != lhs {
        return Err(HomotopyError::Internal(
            "localized word does not match the rescaled letter".into(),
        ));
    }
    Ok(DilationResult { m, dressing, core, flattened })
}

/// Per-factor verdict of the patching pass.
#[derive(Debug, Clone)]
pub struct LgComponent {
    pub modulus: u64,
    pub ok: bool,
    pub detail: String,
}

/// Patching outcome: the word is present exactly when every factor succeeds.
#[derive(Debug, Clone)]
pub struct LgOutcome {
    pub components: Vec<LgComponent>,
    pub word: Option<ElementaryWord>,
}

fn smallest_prime_factor(q: u64) -> u64 {
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return d;
        }
        d += 1;
    }
    q
}

/// One prime-power factor of the base ring, with maps in and out.
struct LgComp {
    modulus: u64,
    prime: u64,
    ring_q: RingDescriptor,
    idempotent: RingElement,
    crt: Option<CrtComponent>,
}

impl LgComp {
    fn project(&self, x: &RingElement) -> Result<RingElement, RingError> {
        match &self.crt {
            Some(c) => c.project(x),
            None => Ok(x.clone()),
        }
    }

    fn lift(&self, x: &RingElement) -> Result<RingElement, RingError> {
        match &self.crt {
            Some(c) => c.lift(x),
            None => Ok(x.clone()),
        }
    }
}

fn lg_components(base: &RingDescriptor) -> HResult<Vec<LgComp>> {
    match base {
        RingDescriptor::IntegersMod(_) => Ok(base
            .crt_decompose()?
            .into_iter()
            .map(|c| LgComp {
                modulus: c.modulus,
                prime: smallest_prime_factor(c.modulus),
                ring_q: c.ring.clone(),
                idempotent: c.idempotent.clone(),
                crt: Some(c),
            })
            .collect()),
        RingDescriptor::PrimeField(p) => Ok(vec![LgComp {
            modulus: *p,
            prime: *p,
            ring_q: base.clone(),
            idempotent: base.one(),
            crt: None,
        }]),
        other => Err(RingError::MissingCapability(
            "prime power factorization",
            other.to_string(),
        )
        .into()),
    }
}

/// Factors a determinant-one polynomial matrix over Z/q[X], q a prime power,
/// into elementary letters: first the image mod p is factored by Euclidean
/// division over F_p[X], then the residual matrix, congruent to I mod p, is
/// cleared by diagonal-pivot elimination (the pivots stay units) and a chain
/// of two-row diagonal words.
fn factor_component(sigma_q: &Mat, comp: &LgComp, budget: &Budget) -> HResult<ElementaryWord> {
    let pq = sigma_q.ring().clone();
    let (_, var) = poly_parts(&pq)?;
    let n = sigma_q.rows();
    let fp = RingDescriptor::prime_field(comp.prime)?;
    let pfp = RingDescriptor::polynomial(fp.clone(), &var)?;

    let sigma_bar = sigma_q.map_entries(&pfp, &|e| {
        poly_map_coeffs(e, &pfp, &|c| {
            Ok(fp.from_bigint(&BigInt::from(c.residue_value().expect("residue"))))
        })
    })?;
    let wbar = factor_sl(&pfp, &sigma_bar, budget)?;
    let lifted = wbar.map_params(&pq, &|x| {
        poly_map_coeffs(x, &pq, &|c| {
            Ok(comp
                .ring_q
                .from_bigint(&BigInt::from(c.residue_value().expect("residue"))))
        })
    })?;
    let resid = sigma_q.mul(&lifted.inverse_word().eval()?)?;

    // All off-diagonal coefficients of resid are divisible by p and the
    // diagonal is 1 plus such terms; both survive row operations with
    // p-divisible multipliers, so every pivot is a unit.
    let mut rows: Vec<Vec<RingElement>> = (0..n).map(|i| resid.row_vec(i)).collect();
    let mut ops: Vec<Gen> = Vec::new();
    for j in 0..n {
        let pinv = rows[j][j].inverse().ok_or_else(|| {
            HomotopyError::Internal("pivot of the residual matrix is not a unit".into())
        })?;
        for i in 0..n {
            if i == j || rows[i][j].is_zero() {
                continue;
            }
            let c = rows[i][j].mul(&pinv)?.neg();
            let source = rows[j].clone();
            for (col, s) in source.iter().enumerate() {
                rows[i][col] = rows[i][col].add(&c.mul(s)?)?;
            }
            ops.push(Gen { i, j, x: c });
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if i != j && !e.is_zero() {
                return Err(HomotopyError::Internal("elimination left a remainder".into()));
            }
        }
    }

    let mut word = ElementaryWord::new(pq.clone(), n, WordKind::Linear);
    for op in &ops {
        word.push(op.i, op.j, op.x.neg())?;
    }
    let mut cumulative = pq.one();
    for (i, row) in rows.iter().enumerate().take(n - 1) {
        cumulative = cumulative.mul(&row[i])?;
        let inv = cumulative
            .inverse()
            .ok_or_else(|| HomotopyError::Internal("diagonal entry is not a unit".into()))?;
        let wh = whitehead_diag(&pq, &cumulative, &inv)?.shifted(i, n)?;
        word = word.concat(&wh)?;
    }
    word = word.concat(&lifted)?;
    if word.eval()? != *sigma_q {
        return Err(HomotopyError::Internal("component word does not evaluate back".into()));
    }
    Ok(word)
}

/// Mixes per-factor words over Z/q[X] into one word over the full base, each
/// parameter multiplied by the factor's idempotent and lifted.
fn mix_component_words(
    pring: &RingDescriptor,
    size: usize,
    comps: &[LgComp],
    words: &[ElementaryWord],
) -> HResult<ElementaryWord> {
    let mut global = ElementaryWord::new(pring.clone(), size, WordKind::Linear);
    for (comp, w) in comps.iter().zip(words) {
        let mixed = w.map_params(pring, &|x| {
            poly_map_coeffs(x, pring, &|c| comp.idempotent.mul(&comp.lift(c)?))
        })?;
        global = global.concat(&mixed)?;
    }
    Ok(global)
}

/// Splits a determinant-one path over (Z/n)[X] into prime power factors,
/// factors each into elementary letters, and patches the factor words back
/// into one global word through the idempotents. A factor whose determinant
/// is not 1 is reported by modulus instead; the global word is returned only
/// if every factor succeeds, and it always evaluates back to the input
/// exactly.
pub fn local_global_verify(sigma: &Mat, kind: WordKind, budget: &Budget) -> HResult<LgOutcome> {
    if kind == WordKind::Symplectic {
        return Err(RingError::MissingCapability(
            "form-preserving letter factorization over polynomial rings",
            "the patching pass".to_string(),
        )
        .into());
    }
    if sigma.rows() != sigma.cols() || sigma.rows() == 0 {
        return Err(HomotopyError::NotIsotopy("a square matrix is needed".into()));
    }
    let pring = sigma.ring().clone();
    let (base, _) = poly_parts(&pring)?;
    let deg = max_entry_degree(sigma);
    if deg > budget.degree_cap {
        return Err(HomotopyError::DegreeOverflow(deg, budget.degree_cap));
    }
    if !eval_poly_matrix(sigma, &base.zero())?.is_identity() {
        return Err(HomotopyError::NotIsotopy("the value at 0 is not the identity".into()));
    }
    let comps = lg_components(&base)?;
    let (_, var) = poly_parts(&pring)?;
    let n = sigma.rows();
    let mut reports = Vec::with_capacity(comps.len());
    let mut words = Vec::with_capacity(comps.len());
    let mut all_ok = true;
    for comp in &comps {
        let pq = RingDescriptor::polynomial(comp.ring_q.clone(), &var)?;
        let sigma_q = sigma.map_entries(&pq, &|e| {
            poly_map_coeffs(e, &pq, &|c| comp.project(c))
        })?;
        let det = sigma_q.det()?;
        if !det.is_one() {
            all_ok = false;
            reports.push(LgComponent {
                modulus: comp.modulus,
                ok: false,
                detail: format!("determinant {} is not 1", det.to_json()),
            });
            continue;
        }
        let word = factor_component(&sigma_q, comp, budget)?;
        reports.push(LgComponent {
            modulus: comp.modulus,
            ok: true,
            detail: format!("elementary with {} letters", word.letters.len()),
        });
        words.push(word);
    }
    if !all_ok {
        return Ok(LgOutcome { components: reports, word: None });
    }
    let global = mix_component_words(&pring, n, &comps, &words)?;
    if global.eval()? != *sigma {
        return Err(HomotopyError::Internal("patched word does not evaluate back".into()));
    }
    Ok(LgOutcome { components: reports, word: Some(global) })
}

/// Word moving a unimodular polynomial column to the last standard basis
/// vector, built factor by factor: reduce mod p by Euclidean division, then
/// clear the p-divisible remainder with unit pivots.
fn reduce_poly_column(
    pring: &RingDescriptor,
    v: &[RingElement],
    budget: &Budget,
) -> HResult<ElementaryWord> {
    let (base, var) = poly_parts(pring)?;
    let n = v.len();
    let is_last_basis = |col: &[RingElement], one: &RingElement| {
        col[..n - 1].iter().all(RingElement::is_zero) && col[n - 1] == *one
    };
    if is_last_basis(v, &pring.one()) {
        return Ok(ElementaryWord::new(pring.clone(), n, WordKind::Linear));
    }
    let comps = lg_components(&base)?;
    let mut words = Vec::with_capacity(comps.len());
    for comp in &comps {
        let pq = RingDescriptor::polynomial(comp.ring_q.clone(), &var)?;
        let fp = RingDescriptor::prime_field(comp.prime)?;
        let pfp = RingDescriptor::polynomial(fp.clone(), &var)?;
        let v_q: Vec<RingElement> = v
            .iter()
            .map(|e| poly_map_coeffs(e, &pq, &|c| comp.project(c)))
            .collect::<Result<_, _>>()?;
        let v_bar: Vec<RingElement> = v_q
            .iter()
            .map(|e| {
                poly_map_coeffs(e, &pfp, &|c| {
                    Ok(fp.from_bigint(&BigInt::from(c.residue_value().expect("residue"))))
                })
            })
            .collect::<Result<_, _>>()?;
        let mut word_q = ElementaryWord::new(pq.clone(), n, WordKind::Linear);
        if !is_last_basis(&v_bar, &pfp.one()) {
            let rr = reduce_row_linear(&pfp, &v_bar, budget)?;
            let wt = rr.transposed();
            let mut moved = ElementaryWord::new(pfp.clone(), n, WordKind::Linear);
            moved.push(0, n - 1, pfp.one().neg())?;
            moved.push(n - 1, 0, pfp.one())?;
            let phase1 = moved.concat(&wt)?;
            word_q = phase1.map_params(&pq, &|x| {
                poly_map_coeffs(x, &pq, &|c| {
                    Ok(comp
                        .ring_q
                        .from_bigint(&BigInt::from(c.residue_value().expect("residue"))))
                })
            })?;
        }
        let c1_mat = word_q.eval()?.mul(&Mat::new(pq.clone(), n, 1, v_q.clone())?)?;
        let c1: Vec<RingElement> = (0..n).map(|i| c1_mat[(i, 0)].clone()).collect();
        let u = c1[n - 1].clone();
        let uinv = u.inverse().ok_or_else(|| {
            HomotopyError::Internal("last coordinate is not a unit after reduction".into())
        })?;
        // Listed order is the reverse of the application order: the
        // normalization triple first, then the clearing letters, then the
        // mod-p word.
        let mut tail = ElementaryWord::new(pq.clone(), n, WordKind::Linear);
        if !u.is_one() {
            tail.push(0, n - 1, u.sub(&pq.one())?)?;
            tail.push(n - 1, 0, pq.one())?;
            tail.push(0, n - 1, pq.one().sub(&u)?.mul(&uinv)?)?;
        }
        for j in (0..n - 1).rev() {
            if c1[j].is_zero() {
                continue;
            }
            tail.push(j, n - 1, c1[j].mul(&uinv)?.neg())?;
        }
        let full = tail.concat(&word_q)?;
        let out = full.eval()?.mul(&Mat::new(pq.clone(), n, 1, v_q)?)?;
        if !is_last_basis(&(0..n).map(|i| out[(i, 0)].clone()).collect::<Vec<_>>(), &pq.one()) {
            return Err(HomotopyError::Internal("column reduction missed the target".into()));
        }
        words.push(full);
    }
    let global = mix_component_words(pring, n, &comps, &words)?;
    let out = global.eval()?.mul(&Mat::new(pring.clone(), n, 1, v.to_vec())?)?;
    if !is_last_basis(&(0..n).map(|i| out[(i, 0)].clone()).collect::<Vec<_>>(), &pring.one()) {
        return Err(HomotopyError::Internal("mixed column reduction missed the target".into()));
    }
    Ok(global)
}

/// Report of the replay pipeline. The linear variant carries the stabilized
/// path, the peeled square path, the per-factor verdicts, and a fully
/// verified letter word for the input; the symplectic variant carries the
/// path of the stabilized matrix and a direct letter factorization, with a
/// note on what is not attempted at the path level.
#[derive(Debug, Clone)]
pub enum ReplayReport {
    Linear {
        isotopy_word: ElementaryWord,
        isotopy: Mat,
        components: Vec<LgComponent>,
        word: ElementaryWord,
        degree_cap_used: usize,
    },
    Symplectic {
        isotopy: Vec<SpFactorLetter>,
        factorization: Vec<SpFactorLetter>,
        note: String,
    },
}

fn replay_linear(gamma: &Mat, budget: &Budget) -> HResult<ReplayReport> {
    let ring = gamma.ring().clone();
    if !gamma.det()?.is_one() {
        return Err(ReduceError::DetNotOne.into());
    }
    let r = gamma.rows();
    let n = r + 1;
    let stabilized = gamma.block_diag(&Mat::identity(ring.clone(), 1))?;
    let base_word = factor_sl(&ring, &stabilized, budget)?;
    let pring = RingDescriptor::polynomial(ring.clone(), "X")?;
    let eta_word = scale_word_by_gen(&base_word, &pring)?;
    let eta = eta_word.eval()?;
    if !eval_poly_matrix(&eta, &ring.zero())?.is_identity() {
        return Err(HomotopyError::Internal("scaled word does not start at I".into()));
    }
    if eval_poly_matrix(&eta, &ring.one())? != stabilized {
        return Err(HomotopyError::Internal("scaled word does not end at the input".into()));
    }

    let v = eta.col_vec(n - 1);
    let w_word = reduce_poly_column(&pring, &v, budget)?;
    let w_mat = w_word.eval()?;
    let w0 = eval_poly_matrix(&w_mat, &ring.zero())?;
    let w1 = eval_poly_matrix(&w_mat, &ring.one())?;
    let bridge = w0.mul(&w1.inverse()?)?;
    for i in 0..n - 1 {
        if !bridge[(i, n - 1)].is_zero() {
            return Err(HomotopyError::Internal("bridge does not fix the last column".into()));
        }
    }
    if !bridge[(n - 1, n - 1)].is_one() {
        return Err(HomotopyError::Internal("bridge does not fix the last column".into()));
    }
    let block = Mat::from_fn(ring.clone(), n - 1, n - 1, |i, j| bridge[(i, j)].clone());
    let rho = Mat::from_fn(ring.clone(), 1, n - 1, |_, j| bridge[(n - 1, j)].clone());
    let rho_adj = rho.mul(&block.inverse()?)?;
    let mut bridge_word = ElementaryWord::new(ring.clone(), n, WordKind::Linear);
    for j in 0..n - 1 {
        if rho_adj[(0, j)].is_zero() {
            continue;
        }
        bridge_word.push(n - 1, j, rho_adj[(0, j)].clone())?;
    }
    bridge_word = bridge_word.concat(&factor_sl(&ring, &block, budget)?.embed(n)?)?;
    if bridge_word.eval()? != bridge {
        return Err(HomotopyError::Internal("bridge word does not evaluate back".into()));
    }
    let d_word = scale_word_by_gen(&bridge_word, &pring)?;
    let w0_const = w_word.map_params(&pring, &|x| {
        constant_in(&pring, &poly_eval(x, &ring.zero())?)
    })?;
    let s_word = w0_const.inverse_word().concat(&d_word)?.concat(&w_word)?;
    let m = s_word.eval()?.mul(&eta)?;
    for i in 0..n - 1 {
        if !m[(i, n - 1)].is_zero() {
            return Err(HomotopyError::Internal("combined path moves the last column".into()));
        }
    }
    if !m[(n - 1, n - 1)].is_one() {
        return Err(HomotopyError::Internal("combined path moves the last column".into()));
    }
    if !eval_poly_matrix(&m, &ring.zero())?.is_identity() {
        return Err(HomotopyError::Internal("combined path does not start at I".into()));
    }
    if eval_poly_matrix(&m, &ring.one())? != stabilized {
        return Err(HomotopyError::Internal("combined path does not end at the input".into()));
    }
    let beta = Mat::from_fn(pring.clone(), r, r, |i, j| m[(i, j)].clone());
    let widened = budget.with_degree_cap_at_least(max_entry_degree(&beta));
    let lg = local_global_verify(&beta, WordKind::Linear, &widened)?;
    let global = lg.word.ok_or_else(|| {
        HomotopyError::Internal("patching failed on a determinant-one path".into())
    })?;
    let word = global.map_params(&ring, &|x| poly_eval(x, &ring.one()))?;
    if word.eval()? != *gamma {
        return Err(HomotopyError::Internal("final word does not evaluate to the input".into()));
    }
    Ok(ReplayReport::Linear {
        isotopy_word: eta_word,
        isotopy: beta,
        components: lg.components,
        word,
        degree_cap_used: widened.degree_cap,
    })
}

fn replay_symplectic(gamma: &Mat, budget: &Budget) -> HResult<ReplayReport> {
    let ring = gamma.ring().clone();
    let size = gamma.rows();
    if size != gamma.cols() || size == 0 || size % 2 != 0 {
        return Err(SpError::BadGramShape.into());
    }
    let gram = standard_symplectic_gram(&ring, size / 2);
    if !is_symplectic(gamma, &gram)? {
        return Err(SpError::NotSymplectic.into());
    }
    let stabilized = gamma.block_diag(&Mat::identity(ring.clone(), 2))?;
    let letters = factor_sp(&ring, &stabilized, budget)?;
    let pring = RingDescriptor::polynomial(ring.clone(), "X")?;
    let x = poly_gen(&pring)?;
    let scaled: Vec<SpFactorLetter> = letters
        .iter()
        .map(|l| l.map_params(&|c| constant_in(&pring, c)?.mul(&x)))
        .collect::<Result<_, _>>()?;
    let path = sp_factor_product(&pring, &scaled, size + 2)?;
    if !eval_poly_matrix(&path, &ring.zero())?.is_identity() {
        return Err(HomotopyError::Internal("scaled letters do not start at I".into()));
    }
    if eval_poly_matrix(&path, &ring.one())? != stabilized {
        return Err(HomotopyError::Internal("scaled letters do not end at the input".into()));
    }
    let factorization = factor_sp(&ring, gamma, budget)?;
    if sp_factor_product(&ring, &factorization, size)? != *gamma {
        return Err(HomotopyError::Internal("letter product does not evaluate back".into()));
    }
    Ok(ReplayReport::Symplectic {
        isotopy: scaled,
        factorization,
        note: "the column reduction over the polynomial ring is done at the linear level \
               only; the form-preserving letters are reported as a path of the stabilized \
               matrix plus a direct factorization of the input"
            .to_string(),
    })
}

/// Replays a finite factorization as a path argument: the input is
/// stabilized by one extra basis vector, factored into letters, the letters
/// are rescaled by the variable into a path from I, the last column of the
/// path is moved back to the last basis vector by an exact column reduction,
/// and the peeled square path goes through the per-factor patching pass. The
/// returned word is verified by evaluation; this is a demonstration harness,
/// and a failed search is reported as an error, never as a refutation.
pub fn replay_injectivity(gamma: &Mat, kind: WordKind, budget: &Budget) -> HResult<ReplayReport> {
    if gamma.rows() != gamma.cols() || gamma.rows() == 0 {
        return Err(HomotopyError::NotIsotopy("a square matrix is needed".into()));
    }
    match gamma.ring() {
        RingDescriptor::IntegersMod(_) | RingDescriptor::PrimeField(_) => {}
        other => {
            return Err(RingError::MissingCapability(
                "finite base ring",
                other.to_string(),
            )
            .into())
        }
    }
    match kind {
        WordKind::Linear => replay_linear(gamma, budget),
        WordKind::Symplectic => replay_symplectic(gamma, budget),
    }
}
