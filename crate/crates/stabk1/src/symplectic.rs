//! Symplectic spaces with an attached rank-one extension, transvection-style
//! letters acting on triples, reduction of unimodular triples to the base
//! point, hyperbolic splitting, and factorization of symplectic matrices.
//!
//! A space carries an alternating unit-determinant Gram matrix G of even size
//! 2n. Triples (p, b, a) with p in R^2n live in the extended module whose
//! form is G perp S, S = [[0,-1],[1,0]] on the (b, a) block. Letters apply to
//! triples in listed order; as matrices the composite is the reversed
//! product.

use crate::budget::Budget;
use crate::matgroups::{is_symplectic, standard_symplectic_gram, Mat};
use crate::reduction::{tuple_candidates, unimodular_witness, ReduceError};
use crate::rings::{IdealDescriptor, RingDescriptor, RingElement, RingError};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("gram matrix must be square of even size at least 2")]
    BadGramShape,
    #[error("gram matrix is not alternating")]
    NotAlternating,
    #[error("gram determinant is not a unit")]
    GramNotUnit,
    #[error("triple is not unimodular")]
    NotUnimodular,
    #[error("relative input violates the ideal congruence: {0}")]
    CongruenceFails(String),
    #[error("no complement subset yields a unit determinant")]
    NoComplement,
    #[error("matrix is not symplectic for the given form")]
    NotSymplectic,
    #[error("search budget exhausted")]
    SearchBudget,
}

pub type SpResult<T> = std::result::Result<T, SpError>;

/// A free module with an alternating unit-determinant form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSpace {
    ring: RingDescriptor,
    gram: Mat,
    gram_inv: Mat,
}

impl SymplecticSpace {
    pub fn new(gram: Mat) -> SpResult<SymplecticSpace> {
        let n = gram.rows();
        if n != gram.cols() || n == 0 || n % 2 != 0 {
            return Err(SpError::BadGramShape);
        }
        // Alternating: skew-symmetric with zero diagonal (the diagonal
        // condition is not implied when 2 is a zero divisor).
        if gram.transpose() != gram.neg() {
            return Err(SpError::NotAlternating);
        }
        for i in 0..n {
            if !gram[(i, i)].is_zero() {
                return Err(SpError::NotAlternating);
            }
        }
        let det = gram.det()?;
        if !det.is_unit() {
            return Err(SpError::GramNotUnit);
        }
        let gram_inv = gram.inverse()?;
        Ok(SymplecticSpace { ring: gram.ring().clone(), gram, gram_inv })
    }

    pub fn standard(ring: &RingDescriptor, pairs: usize) -> SpResult<SymplecticSpace> {
        SymplecticSpace::new(standard_symplectic_gram(ring, pairs))
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// Rank of the underlying module.
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Form value <v, w> = v^t G w.
    pub fn form(&self, v: &[RingElement], w: &[RingElement]) -> SpResult<RingElement> {
        assert_eq!(v.len(), self.dim());
        assert_eq!(w.len(), self.dim());
        let mut acc = self.ring.zero();
        for i in 0..v.len() {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..w.len() {
                let gij = &self.gram[(i, j)];
                if gij.is_zero() || w[j].is_zero() {
                    continue;
                }
                acc = acc.add(&v[i].mul(gij)?.mul(&w[j])?)?;
            }
        }
        Ok(acc)
    }

    /// Row functional <., u> as coefficients: (G u)^t.
    fn dual_row(&self, u: &[RingElement]) -> SpResult<Vec<RingElement>> {
        let col = Mat::column(self.ring.clone(), u.to_vec())?;
        let gu = self.gram.mul(&col)?;
        Ok(gu.col_vec(0))
    }

    /// Preimage u with (G u)^t = delta.
    fn dual_vector(&self, delta: &[RingElement]) -> SpResult<Vec<RingElement>> {
        let col = Mat::column(self.ring.clone(), delta.to_vec())?;
        let u = self.gram_inv.mul(&col)?;
        Ok(u.col_vec(0))
    }

    /// Gram matrix of the extended module holding the triples.
    pub fn extended_gram(&self) -> Mat {
        let ring = &self.ring;
        let mut s = Mat::zero(ring.clone(), 2, 2);
        s.set(0, 1, ring.from_i64(-1));
        s.set(1, 0, ring.one());
        self.gram.block_diag(&s).expect("same ring")
    }
}

/// A point of the extended module: p in the base, then the (b, a) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub p: Vec<RingElement>,
    pub b: RingElement,
    pub a: RingElement,
}

impl Triple {
    pub fn base_point(space: &SymplecticSpace) -> Triple {
        Triple {
            p: vec![space.ring.zero(); space.dim()],
            b: space.ring.zero(),
            a: space.ring.one(),
        }
    }

    pub fn as_vec(&self) -> Vec<RingElement> {
        let mut v = self.p.clone();
        v.push(self.b.clone());
        v.push(self.a.clone());
        v
    }

    pub fn from_vec(mut v: Vec<RingElement>) -> Triple {
        assert!(v.len() >= 2);
        let a = v.pop().unwrap();
        let b = v.pop().unwrap();
        Triple { p: v, b, a }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p.iter().map(RingElement::to_json).collect::<Vec<_>>(),
            "b": self.b.to_json(),
            "a": self.a.to_json(),
        })
    }

    pub fn from_json(ring: &RingDescriptor, v: &Value) -> Result<Triple, RingError> {
        let obj = v
            .as_object()
            .ok_or_else(|| RingError::Parse("triple must be an object".into()))?;
        let p = obj
            .get("p")
            .and_then(Value::as_array)
            .ok_or_else(|| RingError::Parse("triple needs \"p\" array".into()))?
            .iter()
            .map(|e| ring.element_from_json(e))
            .collect::<Result<Vec<_>, _>>()?;
        let b = ring.element_from_json(
            obj.get("b").ok_or_else(|| RingError::Parse("triple needs \"b\"".into()))?,
        )?;
        let a = ring.element_from_json(
            obj.get("a").ok_or_else(|| RingError::Parse("triple needs \"a\"".into()))?,
        )?;
        Ok(Triple { p, b, a })
    }
}

/// Letters acting on triples. `Theta` moves along the last coordinate,
/// `Tau` along the dual direction, and `ConjTau` is the Theta-conjugate of a
/// Tau, kept as one letter so each letter of a relative reduction is
/// congruent to the identity modulo the ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpLetter {
    Theta { t: RingElement, q: Vec<RingElement> },
    Tau { g: RingElement, delta: Vec<RingElement> },
    ConjTau { t: RingElement, q: Vec<RingElement>, g: RingElement, delta: Vec<RingElement> },
}

impl SpLetter {
    /// Matrix on the extended module, columns ordered (p-block, b, a).
    pub fn matrix(&self, space: &SymplecticSpace) -> SpResult<Mat> {
        let n = space.dim();
        let ring = &space.ring;
        match self {
            SpLetter::Theta { t, q } => {
                assert_eq!(q.len(), n);
                let mut m = Mat::identity(ring.clone(), n + 2);
                let gq = space.dual_row(q)?;
                for i in 0..n {
                    m.set(i, n + 1, q[i].clone());
                    m.set(n, i, gq[i].clone());
                }
                m.set(n, n + 1, t.clone());
                Ok(m)
            }
            SpLetter::Tau { g, delta } => {
                assert_eq!(delta.len(), n);
                let u = space.dual_vector(delta)?;
                let mut m = Mat::identity(ring.clone(), n + 2);
                for i in 0..n {
                    m.set(i, n, u[i].neg());
                    m.set(n + 1, i, delta[i].clone());
                }
                m.set(n + 1, n, g.clone());
                Ok(m)
            }
            SpLetter::ConjTau { t, q, g, delta } => {
                let fwd = SpLetter::Theta { t: t.clone(), q: q.clone() }.matrix(space)?;
                let back = SpLetter::Theta { t: t.neg(), q: q.iter().map(RingElement::neg).collect() }
                    .matrix(space)?;
                let mid = SpLetter::Tau { g: g.clone(), delta: delta.clone() }.matrix(space)?;
                // Conjugate: apply theta, then tau, then theta inverse.
                Ok(back.mul(&mid)?.mul(&fwd)?)
            }
        }
    }

    /// Functional action on a triple, matching `matrix` in the column
    /// convention.
    pub fn apply(&self, space: &SymplecticSpace, tr: &Triple) -> SpResult<Triple> {
        match self {
            SpLetter::Theta { t, q } => {
                let mut p = Vec::with_capacity(tr.p.len());
                for (pi, qi) in tr.p.iter().zip(q) {
                    p.push(pi.add(&tr.a.mul(qi)?)?);
                }
                let form_pq = space.form(&tr.p, q)?;
                let b = tr.b.add(&tr.a.mul(t)?)?.add(&form_pq)?;
                Ok(Triple { p, b, a: tr.a.clone() })
            }
            SpLetter::Tau { g, delta } => {
                let u = space.dual_vector(delta)?;
                let mut p = Vec::with_capacity(tr.p.len());
                for (pi, ui) in tr.p.iter().zip(&u) {
                    p.push(pi.sub(&ui.mul(&tr.b)?)?);
                }
                let mut dp = space.ring.zero();
                for (di, pi) in delta.iter().zip(&tr.p) {
                    dp = dp.add(&di.mul(pi)?)?;
                }
                let a = tr.a.add(&g.mul(&tr.b)?)?.add(&dp)?;
                Ok(Triple { p, b: tr.b.clone(), a })
            }
            SpLetter::ConjTau { t, q, g, delta } => {
                let th = SpLetter::Theta { t: t.clone(), q: q.clone() };
                let ta = SpLetter::Tau { g: g.clone(), delta: delta.clone() };
                let th_inv = SpLetter::Theta {
                    t: t.neg(),
                    q: q.iter().map(RingElement::neg).collect(),
                };
                th_inv.apply(space, &ta.apply(space, &th.apply(space, tr)?)?)
            }
        }
    }

    pub fn inverse(&self) -> SpLetter {
        match self {
            SpLetter::Theta { t, q } => SpLetter::Theta {
                t: t.neg(),
                q: q.iter().map(RingElement::neg).collect(),
            },
            SpLetter::Tau { g, delta } => SpLetter::Tau {
                g: g.neg(),
                delta: delta.iter().map(RingElement::neg).collect(),
            },
            SpLetter::ConjTau { t, q, g, delta } => SpLetter::ConjTau {
                t: t.clone(),
                q: q.clone(),
                g: g.neg(),
                delta: delta.iter().map(RingElement::neg).collect(),
            },
        }
    }

    /// Rebuilds the letter with every parameter mapped by f.
    pub fn map_params(
        &self,
        f: &dyn Fn(&RingElement) -> Result<RingElement, RingError>,
    ) -> Result<SpLetter, RingError> {
        let map_vec = |v: &[RingElement]| -> Result<Vec<RingElement>, RingError> {
            v.iter().map(f).collect()
        };
        Ok(match self {
            SpLetter::Theta { t, q } => SpLetter::Theta { t: f(t)?, q: map_vec(q)? },
            SpLetter::Tau { g, delta } => SpLetter::Tau { g: f(g)?, delta: map_vec(delta)? },
            SpLetter::ConjTau { t, q, g, delta } => SpLetter::ConjTau {
                t: f(t)?,
                q: map_vec(q)?,
                g: f(g)?,
                delta: map_vec(delta)?,
            },
        })
    }

    pub fn to_json(&self) -> Value {
        let vecj = |v: &[RingElement]| -> Value {
            Value::Array(v.iter().map(RingElement::to_json).collect())
        };
        match self {
            SpLetter::Theta { t, q } => json!({"kind": "theta", "t": t.to_json(), "q": vecj(q)}),
            SpLetter::Tau { g, delta } => {
                json!({"kind": "tau", "g": g.to_json(), "delta": vecj(delta)})
            }
            SpLetter::ConjTau { t, q, g, delta } => json!({
                "kind": "conj_tau",
                "t": t.to_json(),
                "q": vecj(q),
                "g": g.to_json(),
                "delta": vecj(delta),
            }),
        }
    }

    pub fn from_json(ring: &RingDescriptor, v: &Value) -> Result<SpLetter, RingError> {
        let obj = v
            .as_object()
            .ok_or_else(|| RingError::Parse("letter must be an object".into()))?;
        let getv = |key: &str| -> Result<Vec<RingElement>, RingError> {
            obj.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| RingError::Parse(format!("letter needs \"{key}\" array")))?
                .iter()
                .map(|e| ring.element_from_json(e))
                .collect()
        };
        let gete = |key: &str| -> Result<RingElement, RingError> {
            ring.element_from_json(
                obj.get(key)
                    .ok_or_else(|| RingError::Parse(format!("letter needs \"{key}\"")))?,
            )
        };
        match obj.get("kind").and_then(Value::as_str) {
            Some("theta") => Ok(SpLetter::Theta { t: gete("t")?, q: getv("q")? }),
            Some("tau") => Ok(SpLetter::Tau { g: gete("g")?, delta: getv("delta")? }),
            Some("conj_tau") => Ok(SpLetter::ConjTau {
                t: gete("t")?,
                q: getv("q")?,
                g: gete("g")?,
                delta: getv("delta")?,
            }),
            _ => Err(RingError::Parse("unknown letter kind".into())),
        }
    }
}

/// Shared search: (q, t) with (p + a q, b + a t) unimodular, plus the
/// witness data (gamma coefficients on the shifted vector, g on the shifted
/// b). Returns (q, t, delta_row, g).
fn reduction_search(
    space: &SymplecticSpace,
    tr: &Triple,
    budget: &Budget,
) -> SpResult<(Vec<RingElement>, RingElement, Vec<RingElement>, RingElement)> {
    let ring = &space.ring;
    let n = space.dim();
    let mut steps = 0u64;
    for q in tuple_candidates(ring, n)? {
        let shifted_p: Vec<RingElement> = tr
            .p
            .iter()
            .zip(&q)
            .map(|(pi, qi)| pi.add(&tr.a.mul(qi)?))
            .collect::<Result<_, _>>()
            .map_err(SpError::Ring)?;
        for t in ring.search_candidates().map_err(SpError::Ring)? {
            steps += 1;
            if steps > budget.element_steps {
                return Err(SpError::SearchBudget);
            }
            let shifted_b = tr.b.add(&tr.a.mul(&t)?)?;
            let mut row = shifted_p.clone();
            row.push(shifted_b);
            if let Some(w) = unimodular_witness(ring, &row)? {
                let g = w[n].clone();
                let gamma = &w[..n];
                // delta = gamma + g * q^t G, a functional on the base module.
                let qg = space.dual_row(&q)?;
                // (G q)^t row gives <., q>^t with a sign; the needed row is
                // q^t G = -(G q)^t.
                let mut delta = Vec::with_capacity(n);
                for i in 0..n {
                    delta.push(gamma[i].add(&g.mul(&qg[i].neg())?)?);
                }
                return Ok((q, t, delta, g));
            }
        }
    }
    Err(SpError::NotUnimodular)
}

/// Reduces a unimodular triple to (0, 0, 1). The result applies in listed
/// order and always has exactly three letters (identity parameters allowed),
/// except that an already reduced triple yields the empty word.
pub fn symplectic_reduce(
    space: &SymplecticSpace,
    tr: &Triple,
    budget: &Budget,
) -> SpResult<Vec<SpLetter>> {
    let ring = &space.ring;
    if tr.p.len() != space.dim() {
        return Err(SpError::Ring(RingError::Parse("triple length mismatch".into())));
    }
    if unimodular_witness(ring, &tr.as_vec())?.is_none() {
        return Err(SpError::NotUnimodular);
    }
    if *tr == Triple::base_point(space) {
        return Ok(Vec::new());
    }
    let (q, t, delta, g) = reduction_search(space, tr, budget)?;
    let one_minus_a = ring.one().sub(&tr.a)?;
    let l1 = SpLetter::Theta { t: t.clone(), q: q.clone() };
    let after1 = l1.apply(space, tr)?;
    let l2 = SpLetter::Tau {
        g: one_minus_a.mul(&g)?,
        delta: delta
            .iter()
            .map(|d| one_minus_a.mul(d))
            .collect::<Result<_, _>>()
            .map_err(SpError::Ring)?,
    };
    let after2 = l2.apply(space, &after1)?;
    debug_assert!(after2.a.is_one());
    let l3 = SpLetter::Theta {
        t: after2.b.neg(),
        q: after2.p.iter().map(RingElement::neg).collect(),
    };
    let after3 = l3.apply(space, &after2)?;
    debug_assert_eq!(after3, Triple::base_point(space));
    Ok(vec![l1, l2, l3])
}

/// Relative variant: the triple must be congruent to (0, 0, 1) modulo the
/// ideal, and every letter of the result is congruent to the identity matrix
/// modulo the ideal. Two letters: one conjugated Tau, one Theta.
pub fn symplectic_reduce_relative(
    space: &SymplecticSpace,
    tr: &Triple,
    ideal: &IdealDescriptor,
    budget: &Budget,
) -> SpResult<Vec<SpLetter>> {
    let ring = &space.ring;
    if ideal.ring != *ring {
        return Err(SpError::Ring(RingError::RingMismatch(
            ideal.ring.to_string(),
            ring.to_string(),
        )));
    }
    for (i, pi) in tr.p.iter().enumerate() {
        if !ideal.member(pi)? {
            return Err(SpError::CongruenceFails(format!("p[{}] is not in the ideal", i + 1)));
        }
    }
    if !ideal.member(&tr.b)? {
        return Err(SpError::CongruenceFails("b is not in the ideal".into()));
    }
    if !ideal.member(&tr.a.sub(&ring.one())?)? {
        return Err(SpError::CongruenceFails("a - 1 is not in the ideal".into()));
    }
    if unimodular_witness(ring, &tr.as_vec())?.is_none() {
        return Err(SpError::NotUnimodular);
    }
    if *tr == Triple::base_point(space) {
        return Ok(Vec::new());
    }
    let (q, t, delta, g) = reduction_search(space, tr, budget)?;
    let x = ring.one().sub(&tr.a)?; // in the ideal
    let l1 = SpLetter::ConjTau {
        t: t.clone(),
        q: q.clone(),
        g: x.mul(&g)?,
        delta: delta
            .iter()
            .map(|d| x.mul(d))
            .collect::<Result<_, _>>()
            .map_err(SpError::Ring)?,
    };
    let after1 = l1.apply(space, tr)?;
    debug_assert!(after1.a.is_one());
    let l2 = SpLetter::Theta {
        t: after1.b.neg(),
        q: after1.p.iter().map(RingElement::neg).collect(),
    };
    let after2 = l2.apply(space, &after1)?;
    debug_assert_eq!(after2, Triple::base_point(space));
    Ok(vec![l1, l2])
}

/// Result of splitting off the hyperbolic plane spanned by p and its dual
/// partner f: the change of basis U = [p | f | complement] satisfies
/// U^t G U = [[0,1],[-1,0]] perp complement_gram.
#[derive(Debug, Clone)]
pub struct HyperbolicSplit {
    pub f: Vec<RingElement>,
    pub basis: Mat,
    pub complement_gram: Mat,
}

/// Projection onto the complement of the (p, f) plane:
/// z + <z,p> f - <z,f> p.
pub fn hyperbolic_project(
    space: &SymplecticSpace,
    p: &[RingElement],
    f: &[RingElement],
    z: &[RingElement],
) -> SpResult<Vec<RingElement>> {
    let zp = space.form(z, p)?;
    let zf = space.form(z, f)?;
    let mut out = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        let v = z[i].add(&zp.mul(&f[i])?)?.sub(&zf.mul(&p[i])?)?;
        out.push(v);
    }
    Ok(out)
}

/// Splits off a hyperbolic plane containing the unimodular vector p.
/// Requires 2 to be a unit.
pub fn hyperbolic_split(
    space: &SymplecticSpace,
    p: &[RingElement],
) -> SpResult<HyperbolicSplit> {
    let ring = &space.ring;
    let n = space.dim();
    if p.len() != n {
        return Err(SpError::Ring(RingError::Parse("vector length mismatch".into())));
    }
    if !ring.from_i64(2).is_unit() {
        return Err(SpError::Ring(RingError::MissingCapability(
            "invertible 2",
            ring.to_string(),
        )));
    }
    let alpha = unimodular_witness(ring, p)?.ok_or(SpError::NotUnimodular)?;
    // f = G^{-1} alpha^t, so <p, f> = alpha . p = 1.
    let f = space.dual_vector(&alpha)?;
    debug_assert!(space.form(p, &f)?.is_one());
    // Projected standard basis spans the complement; pick columns making the
    // full determinant a unit.
    let mut projected = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = vec![ring.zero(); n];
        e[k] = ring.one();
        projected.push(hyperbolic_project(space, p, &f, &e)?);
    }
    let build = |subset: &[usize]| -> SpResult<Mat> {
        let mut u = Mat::zero(ring.clone(), n, n);
        for i in 0..n {
            u.set(i, 0, p[i].clone());
            u.set(i, 1, f[i].clone());
        }
        for (c, &k) in subset.iter().enumerate() {
            for i in 0..n {
                u.set(i, c + 2, projected[k][i].clone());
            }
        }
        Ok(u)
    };
    let mut found: Option<Mat> = None;
    for subset in subsets(n, n - 2) {
        let u = build(&subset)?;
        if u.det()?.is_unit() {
            found = Some(u);
            break;
        }
    }
    if found.is_none() {
        if let RingDescriptor::IntegersMod(_) = ring {
            found = crt_mixed_complement(ring, &build, n)?;
        }
    }
    let u = found.ok_or(SpError::NoComplement)?;
    let full = u.transpose().mul(&space.gram)?.mul(&u)?;
    // Exact block check: [[0,1],[-1,0]] in the corner, zeros across.
    let psi1 = standard_symplectic_gram(ring, 1);
    for i in 0..2 {
        for j in 0..2 {
            if full[(i, j)] != psi1[(i, j)] {
                return Err(SpError::NoComplement);
            }
        }
        for j in 2..n {
            if !full[(i, j)].is_zero() || !full[(j, i)].is_zero() {
                return Err(SpError::NoComplement);
            }
        }
    }
    let complement_gram =
        Mat::from_fn(ring.clone(), n - 2, n - 2, |i, j| full[(i + 2, j + 2)].clone());
    // The complement inherits an alternating unit form.
    SymplecticSpace::new(complement_gram.clone())?;
    Ok(HyperbolicSplit { f, basis: u, complement_gram })
}

/// Per-factor complement choice over composite Z/n, recombined through the
/// orthogonal idempotents.
fn crt_mixed_complement(
    ring: &RingDescriptor,
    build: &dyn Fn(&[usize]) -> SpResult<Mat>,
    n: usize,
) -> SpResult<Option<Mat>> {
    let comps = ring.crt_decompose()?;
    if comps.len() < 2 {
        return Ok(None);
    }
    let mut per_factor: Vec<Mat> = Vec::new();
    for comp in &comps {
        let mut found = None;
        for subset in subsets(n, n - 2) {
            let u = build(&subset)?;
            let proj = u.map_entries(&comp.ring, &|e| comp.project(e))?;
            if proj.det()?.is_unit() {
                found = Some(u);
                break;
            }
        }
        match found {
            Some(u) => per_factor.push(u),
            None => return Ok(None),
        }
    }
    // Mix columns: sum of idempotent * factor choice.
    let mut mixed = Mat::zero(ring.clone(), n, n);
    for (comp, u) in comps.iter().zip(&per_factor) {
        let scaled = u.scalar_mul(&comp.idempotent)?;
        mixed = mixed.add(&scaled)?;
    }
    if mixed.det()?.is_unit() {
        Ok(Some(mixed))
    } else {
        Ok(None)
    }
}

/// Size-k index subsets of 0..n in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=n.saturating_sub(k) {
            cur.push(i);
            go(i + 1, n, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Conjugator between the extended module of the standard space on m-1 pairs
/// and the standard form on m pairs: identity except diag(-1, 1) on the last
/// two coordinates. Self-inverse.
pub fn dhat(ring: &RingDescriptor, size: usize) -> Mat {
    assert!(size >= 2 && size % 2 == 0);
    let mut m = Mat::identity(ring.clone(), size);
    m.set(size - 2, size - 2, ring.from_i64(-1));
    m
}

/// Reduces a unimodular row to the last standard basis row by symplectic
/// matrices: returns matrices E_1 .. E_k, each preserving the standard form,
/// with row * E_1 * ... * E_k = e_size. Requires a finite ring in which 2 is
/// a unit and size >= 6.
pub fn sp_row_reduce(
    ring: &RingDescriptor,
    row: &[RingElement],
    budget: &Budget,
) -> SpResult<Vec<Mat>> {
    let size = row.len();
    if size < 6 || size % 2 != 0 {
        return Err(SpError::Ring(RingError::Parse(
            "row length must be even and at least 6".into(),
        )));
    }
    if !ring.is_finite() {
        return Err(SpError::Ring(RingError::MissingCapability("finite", ring.to_string())));
    }
    if !ring.from_i64(2).is_unit() {
        return Err(SpError::Ring(RingError::MissingCapability(
            "invertible 2",
            ring.to_string(),
        )));
    }
    if unimodular_witness(ring, row)?.is_none() {
        return Err(SpError::NotUnimodular);
    }
    let space = SymplecticSpace::standard(ring, size / 2 - 1)?;
    let d = dhat(ring, size);
    // Treat the row as a column of the extended module through the
    // conjugator, reduce to the base point, and transpose the letters.
    let col: Vec<RingElement> = {
        let cm = d.mul(&Mat::column(ring.clone(), row.to_vec())?)?;
        cm.col_vec(0)
    };
    let letters = symplectic_reduce(&space, &Triple::from_vec(col), budget)?;
    let mut out = Vec::with_capacity(letters.len());
    for l in &letters {
        let m = d.mul(&l.matrix(&space)?)?.mul(&d)?;
        out.push(m.transpose());
    }
    Ok(out)
}

/// One dressed letter of a symplectic factorization: a triple-space letter
/// conjugated into standard coordinates on the leading `block` coordinates
/// (identity elsewhere), or a 2x2 elementary letter from the base case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpFactorLetter {
    pub block: usize,
    pub body: SpFactorBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpFactorBody {
    Triple(SpLetter),
    Lin { i: usize, j: usize, x: RingElement },
}

impl SpFactorLetter {
    /// Matrix at the given full size (block sum with the identity).
    pub fn matrix(&self, ring: &RingDescriptor, full: usize) -> SpResult<Mat> {
        assert!(self.block <= full);
        let core = match &self.body {
            SpFactorBody::Triple(letter) => {
                let space = SymplecticSpace::standard(ring, self.block / 2 - 1)?;
                let d = dhat(ring, self.block);
                d.mul(&letter.matrix(&space)?)?.mul(&d)?
            }
            SpFactorBody::Lin { i, j, x } => {
                let mut m = Mat::identity(ring.clone(), self.block);
                m.set(*i, *j, x.clone());
                m
            }
        };
        if self.block == full {
            Ok(core)
        } else {
            Ok(core.block_diag(&Mat::identity(ring.clone(), full - self.block))?)
        }
    }

    pub fn map_params(
        &self,
        f: &dyn Fn(&RingElement) -> Result<RingElement, RingError>,
    ) -> Result<SpFactorLetter, RingError> {
        let body = match &self.body {
            SpFactorBody::Triple(l) => SpFactorBody::Triple(l.map_params(f)?),
            SpFactorBody::Lin { i, j, x } => SpFactorBody::Lin { i: *i, j: *j, x: f(x)? },
        };
        Ok(SpFactorLetter { block: self.block, body })
    }

    pub fn to_json(&self) -> Value {
        match &self.body {
            SpFactorBody::Triple(l) => {
                let mut v = l.to_json();
                v["block"] = json!(self.block);
                v
            }
            SpFactorBody::Lin { i, j, x } => json!({
                "kind": "lin",
                "block": self.block,
                "i": i + 1,
                "j": j + 1,
                "x": x.to_json(),
            }),
        }
    }
}

/// Product of factor letters at the given size, in listed order.
pub fn sp_factor_product(
    ring: &RingDescriptor,
    letters: &[SpFactorLetter],
    full: usize,
) -> SpResult<Mat> {
    let mut acc = Mat::identity(ring.clone(), full);
    for l in letters {
        acc = acc.mul(&l.matrix(ring, full)?)?;
    }
    Ok(acc)
}

/// Factors a matrix preserving the standard form into dressed transvection
/// letters: the listed product of the letter matrices equals the input.
/// Finite rings only.
pub fn factor_sp(ring: &RingDescriptor, gamma: &Mat, budget: &Budget) -> SpResult<Vec<SpFactorLetter>> {
    let size = gamma.rows();
    if size != gamma.cols() || size == 0 || size % 2 != 0 {
        return Err(SpError::BadGramShape);
    }
    if !ring.is_finite() {
        return Err(SpError::Ring(RingError::MissingCapability("finite", ring.to_string())));
    }
    let psi = standard_symplectic_gram(ring, size / 2);
    if !is_symplectic(gamma, &psi)? {
        return Err(SpError::NotSymplectic);
    }
    factor_sp_inner(ring, gamma, budget)
}

fn factor_sp_inner(
    ring: &RingDescriptor,
    gamma: &Mat,
    budget: &Budget,
) -> SpResult<Vec<SpFactorLetter>> {
    let size = gamma.rows();
    if size == 2 {
        // Sp_2 = SL_2; both base generators preserve the rank-one form.
        let word = crate::reduction::factor_sl(ring, gamma, budget)?;
        return Ok(word
            .letters
            .iter()
            .map(|g| SpFactorLetter {
                block: 2,
                body: SpFactorBody::Lin { i: g.i, j: g.j, x: g.x.clone() },
            })
            .collect());
    }
    let space = SymplecticSpace::standard(ring, size / 2 - 1)?;
    let d = dhat(ring, size);
    // Last column of gamma as an extended-module point.
    let x = gamma.col_vec(size - 1);
    let xt = {
        let cm = d.mul(&Mat::column(ring.clone(), x)?)?;
        Triple::from_vec(cm.col_vec(0))
    };
    let letters = symplectic_reduce(&space, &xt, budget)?;
    // C maps the column to e_size; letters applied in order means the
    // composite is the reversed matrix product.
    let mut c_psi = Mat::identity(ring.clone(), size);
    for l in &letters {
        let m = d.mul(&l.matrix(&space)?)?.mul(&d)?;
        c_psi = m.mul(&c_psi)?;
    }
    let delta = c_psi.mul(gamma)?;
    debug_assert_eq!(delta.col_vec(size - 1), {
        let mut e = vec![ring.zero(); size];
        e[size - 1] = ring.one();
        e
    });
    // Peel: in extended coordinates the fixed last vector forces the b-row
    // to be a coordinate row, leaving a single Tau letter and a smaller
    // symplectic block.
    let dg = d.mul(&delta)?.mul(&d)?;
    let nb = size - 2;
    for j in 0..size {
        let want_b = if j == nb { ring.one() } else { ring.zero() };
        if dg[(nb, j)] != want_b {
            return Err(SpError::NotSymplectic);
        }
        let want_a = if j == size - 1 { ring.one() } else { ring.zero() };
        if dg[(j, size - 1)] != want_a {
            return Err(SpError::NotSymplectic);
        }
    }
    let beta = Mat::from_fn(ring.clone(), nb, nb, |i, j| dg[(i, j)].clone());
    let p_prime: Vec<RingElement> = (0..nb).map(|i| dg[(i, nb)].clone()).collect();
    let s = dg[(size - 1, nb)].clone();
    let tau = SpLetter::Tau {
        g: s,
        delta: space.dual_row(&p_prime.iter().map(RingElement::neg).collect::<Vec<_>>())?,
    };
    // Verify the peel identity exactly: dg == M(tau) * (beta perp I_2).
    let tau_m = tau.matrix(&space)?;
    let beta_ext = beta.block_diag(&Mat::identity(ring.clone(), 2))?;
    if tau_m.mul(&beta_ext)? != dg {
        return Err(SpError::NotSymplectic);
    }
    // gamma = inv(C_psi) * (D tau D) * (beta perp I_2); inv(C_psi) is the
    // product of the inverted letters in original order.
    let mut out: Vec<SpFactorLetter> = letters
        .iter()
        .map(|l| SpFactorLetter { block: size, body: SpFactorBody::Triple(l.inverse()) })
        .collect();
    out.push(SpFactorLetter { block: size, body: SpFactorBody::Triple(tau) });
    let rec = factor_sp_inner(ring, &beta, budget)?;
    out.extend(rec);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroups::{letter_matrix, ElementaryWord, Gen, WordKind};

    fn zmod(n: u64) -> RingDescriptor {
        RingDescriptor::integers_mod(n).unwrap()
    }
    fn fp(p: u64) -> RingDescriptor {
        RingDescriptor::prime_field(p).unwrap()
    }
    fn b() -> Budget {
        Budget::default()
    }

    fn els(ring: &RingDescriptor, vals: &[i64]) -> Vec<RingElement> {
        vals.iter().map(|&v| ring.from_i64(v)).collect()
    }

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> u64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            self.0 >> 33
        }
        fn el(&mut self, ring: &RingDescriptor, span: u64) -> RingElement {
            ring.from_i64((self.next() % span) as i64)
        }
    }

    // A non-standard alternating unit-determinant form used to exercise the
    // machinery away from the standard basis.
    fn twisted_space(ring: &RingDescriptor) -> SymplecticSpace {
        // E^t psi E for an elementary E stays alternating with unit det.
        let psi = standard_symplectic_gram(ring, 2);
        let mut w = ElementaryWord::new(ring.clone(), 4, WordKind::Linear);
        w.push(0, 2, ring.from_i64(1)).unwrap();
        w.push(3, 1, ring.from_i64(2)).unwrap();
        w.push(1, 0, ring.from_i64(1)).unwrap();
        let e = w.eval().unwrap();
        let g = e.transpose().mul(&psi).unwrap().mul(&e).unwrap();
        SymplecticSpace::new(g).unwrap()
    }

    #[test]
    fn space_validation() {
        let ring = zmod(6);
        assert!(SymplecticSpace::standard(&ring, 2).is_ok());
        // Non-alternating gram rejected.
        let mut g = standard_symplectic_gram(&ring, 1);
        g.set(0, 0, ring.one());
        assert!(matches!(SymplecticSpace::new(g), Err(SpError::NotAlternating)));
        // Singular gram rejected.
        let g = Mat::zero(ring.clone(), 2, 2);
        assert!(matches!(SymplecticSpace::new(g), Err(SpError::GramNotUnit)));
    }

    #[test]
    fn letters_are_isometries_of_the_extended_form() {
        let mut rng = Lcg(5);
        for ring in [zmod(6), fp(5), zmod(9)] {
            for space in [SymplecticSpace::standard(&ring, 2).unwrap(), twisted_space(&ring)] {
                let ext = space.extended_gram();
                for _ in 0..6 {
                    let t = rng.el(&ring, 6);
                    let q: Vec<_> = (0..4).map(|_| rng.el(&ring, 6)).collect();
                    let th = SpLetter::Theta { t, q };
                    let m = th.matrix(&space).unwrap();
                    assert!(is_symplectic(&m, &ext).unwrap(), "theta over {ring}");
                    let g = rng.el(&ring, 6);
                    let delta: Vec<_> = (0..4).map(|_| rng.el(&ring, 6)).collect();
                    let ta = SpLetter::Tau { g, delta };
                    let m = ta.matrix(&space).unwrap();
                    assert!(is_symplectic(&m, &ext).unwrap(), "tau over {ring}");
                    let ct = SpLetter::ConjTau {
                        t: rng.el(&ring, 6),
                        q: (0..4).map(|_| rng.el(&ring, 6)).collect(),
                        g: rng.el(&ring, 6),
                        delta: (0..4).map(|_| rng.el(&ring, 6)).collect(),
                    };
                    let m = ct.matrix(&space).unwrap();
                    assert!(is_symplectic(&m, &ext).unwrap(), "conj tau over {ring}");
                }
            }
        }
    }

    #[test]
    fn letter_matrix_matches_functional_action() {
        let mut rng = Lcg(23);
        let ring = zmod(8);
        let space = twisted_space(&ring);
        for _ in 0..10 {
            let tr = Triple {
                p: (0..4).map(|_| rng.el(&ring, 8)).collect(),
                b: rng.el(&ring, 8),
                a: rng.el(&ring, 8),
            };
            let letters = [
                SpLetter::Theta { t: rng.el(&ring, 8), q: (0..4).map(|_| rng.el(&ring, 8)).collect() },
                SpLetter::Tau { g: rng.el(&ring, 8), delta: (0..4).map(|_| rng.el(&ring, 8)).collect() },
                SpLetter::ConjTau {
                    t: rng.el(&ring, 8),
                    q: (0..4).map(|_| rng.el(&ring, 8)).collect(),
                    g: rng.el(&ring, 8),
                    delta: (0..4).map(|_| rng.el(&ring, 8)).collect(),
                },
            ];
            for l in &letters {
                let by_fn = l.apply(&space, &tr).unwrap().as_vec();
                let by_mat = l
                    .matrix(&space)
                    .unwrap()
                    .mul(&Mat::column(ring.clone(), tr.as_vec()).unwrap())
                    .unwrap()
                    .col_vec(0);
                assert_eq!(by_fn, by_mat);
            }
        }
    }

    #[test]
    fn letter_inverses_cancel() {
        let mut rng = Lcg(41);
        let ring = zmod(6);
        let space = SymplecticSpace::standard(&ring, 2).unwrap();
        for _ in 0..8 {
            let letters = [
                SpLetter::Theta { t: rng.el(&ring, 6), q: (0..4).map(|_| rng.el(&ring, 6)).collect() },
                SpLetter::Tau { g: rng.el(&ring, 6), delta: (0..4).map(|_| rng.el(&ring, 6)).collect() },
                SpLetter::ConjTau {
                    t: rng.el(&ring, 6),
                    q: (0..4).map(|_| rng.el(&ring, 6)).collect(),
                    g: rng.el(&ring, 6),
                    delta: (0..4).map(|_| rng.el(&ring, 6)).collect(),
                },
            ];
            for l in &letters {
                let m = l.matrix(&space).unwrap();
                let mi = l.inverse().matrix(&space).unwrap();
                assert!(m.mul(&mi).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn reduce_all_unimodular_triples_over_small_ring() {
        // Base module of rank 2 over Z/4: every unimodular 4-vector, read as
        // a triple, reduces to the base point in exactly three letters.
        let ring = zmod(4);
        let space = SymplecticSpace::standard(&ring, 1).unwrap();
        let ext = space.extended_gram();
        let elems = ring.enumerate().unwrap();
        let mut reduced = 0;
        for p1 in &elems {
            for p2 in &elems {
                for bb in &elems {
                    for aa in &elems {
                        let tr = Triple {
                            p: vec![p1.clone(), p2.clone()],
                            b: bb.clone(),
                            a: aa.clone(),
                        };
                        let uni = unimodular_witness(&ring, &tr.as_vec()).unwrap().is_some();
                        let got = symplectic_reduce(&space, &tr, &b());
                        if !uni {
                            assert!(matches!(got, Err(SpError::NotUnimodular)));
                            continue;
                        }
                        let letters = got.unwrap();
                        if tr == Triple::base_point(&space) {
                            assert!(letters.is_empty());
                            continue;
                        }
                        assert_eq!(letters.len(), 3);
                        let mut cur = tr.clone();
                        for l in &letters {
                            assert!(is_symplectic(&l.matrix(&space).unwrap(), &ext).unwrap());
                            cur = l.apply(&space, &cur).unwrap();
                        }
                        assert_eq!(cur, Triple::base_point(&space));
                        reduced += 1;
                    }
                }
            }
        }
        assert!(reduced > 100, "{reduced} triples reduced");
    }

    #[test]
    fn relative_reduction_letters_are_congruent_to_identity() {
        // Z/9 with the ideal (3).
        let ring = zmod(9);
        let space = SymplecticSpace::standard(&ring, 1).unwrap();
        let ideal = IdealDescriptor::new(ring.clone(), vec![ring.from_i64(3)]).unwrap();
        let in_ideal = [0i64, 3, 6];
        let mut count = 0;
        for p1 in in_ideal {
            for p2 in in_ideal {
                for bb in in_ideal {
                    for da in in_ideal {
                        let tr = Triple {
                            p: els(&ring, &[p1, p2]),
                            b: ring.from_i64(bb),
                            a: ring.from_i64(1 + da),
                        };
                        if unimodular_witness(&ring, &tr.as_vec()).unwrap().is_none() {
                            continue;
                        }
                        let letters =
                            symplectic_reduce_relative(&space, &tr, &ideal, &b()).unwrap();
                        if tr == Triple::base_point(&space) {
                            assert!(letters.is_empty());
                            continue;
                        }
                        count += 1;
                        assert_eq!(letters.len(), 2);
                        let mut cur = tr.clone();
                        for l in &letters {
                            let m = l.matrix(&space).unwrap();
                            // Every entry of M - I lies in the ideal.
                            let id = Mat::identity(ring.clone(), 4);
                            let diff = m.sub(&id).unwrap();
                            for i in 0..4 {
                                for j in 0..4 {
                                    assert!(
                                        ideal.member(&diff[(i, j)]).unwrap(),
                                        "letter not congruent at ({i},{j})"
                                    );
                                }
                            }
                            cur = l.apply(&space, &cur).unwrap();
                        }
                        assert_eq!(cur, Triple::base_point(&space));
                    }
                }
            }
        }
        assert!(count > 10, "{count} relative reductions");
        // Congruence violations are named.
        let bad = Triple { p: els(&ring, &[1, 0]), b: ring.zero(), a: ring.one() };
        assert!(matches!(
            symplectic_reduce_relative(&space, &bad, &ideal, &b()),
            Err(SpError::CongruenceFails(_))
        ));
        let bad = Triple { p: els(&ring, &[0, 0]), b: ring.zero(), a: ring.from_i64(2) };
        assert!(matches!(
            symplectic_reduce_relative(&space, &bad, &ideal, &b()),
            Err(SpError::CongruenceFails(_))
        ));
    }

    #[test]
    fn hyperbolic_split_identities() {
        for ring in [fp(5), fp(7)] {
            for space in [SymplecticSpace::standard(&ring, 2).unwrap(), twisted_space(&ring)] {
                let mut rng = Lcg(17);
                for _ in 0..5 {
                    let p: Vec<_> = (0..4).map(|_| rng.el(&ring, 5)).collect();
                    if unimodular_witness(&ring, &p).unwrap().is_none() {
                        continue;
                    }
                    let split = hyperbolic_split(&space, &p).unwrap();
                    // <p, f> = 1.
                    assert!(space.form(&p, &split.f).unwrap().is_one());
                    // U^t G U = psi_1 perp G'.
                    let full = split
                        .basis
                        .transpose()
                        .mul(space.gram())
                        .unwrap()
                        .mul(&split.basis)
                        .unwrap();
                    let expect = standard_symplectic_gram(&ring, 1)
                        .block_diag(&split.complement_gram)
                        .unwrap();
                    assert_eq!(full, expect);
                    // Projection annihilates p and f and lands in the
                    // orthogonal complement on every basis vector.
                    assert!(hyperbolic_project(&space, &p, &split.f, &p)
                        .unwrap()
                        .iter()
                        .all(RingElement::is_zero));
                    assert!(hyperbolic_project(&space, &p, &split.f, &split.f)
                        .unwrap()
                        .iter()
                        .all(RingElement::is_zero));
                    for k in 0..4 {
                        let mut e = vec![ring.zero(); 4];
                        e[k] = ring.one();
                        let z = hyperbolic_project(&space, &p, &split.f, &e).unwrap();
                        assert!(space.form(&z, &p).unwrap().is_zero());
                        assert!(space.form(&z, &split.f).unwrap().is_zero());
                        // Idempotence.
                        let zz = hyperbolic_project(&space, &p, &split.f, &z).unwrap();
                        assert_eq!(zz, z);
                    }
                }
            }
        }
        // 2 must be a unit.
        let ring = zmod(6);
        let space = SymplecticSpace::standard(&ring, 2).unwrap();
        let p = els(&ring, &[1, 0, 0, 0]);
        assert!(matches!(
            hyperbolic_split(&space, &p),
            Err(SpError::Ring(RingError::MissingCapability(..)))
        ));
    }

    #[test]
    fn dhat_conjugates_extended_form_to_standard() {
        for ring in [zmod(6), fp(5)] {
            for pairs in [1usize, 2] {
                let space = SymplecticSpace::standard(&ring, pairs).unwrap();
                let ext = space.extended_gram();
                let size = 2 * pairs + 2;
                let d = dhat(&ring, size);
                let conj = d.transpose().mul(&ext).unwrap().mul(&d).unwrap();
                assert_eq!(conj, standard_symplectic_gram(&ring, pairs + 1));
                assert!(d.mul(&d).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn sp_row_reduce_lands_on_last_basis_row() {
        let mut rng = Lcg(29);
        for ring in [fp(3), fp(5)] {
            let psi = standard_symplectic_gram(&ring, 3);
            let mut done = 0;
            while done < 8 {
                let row: Vec<_> = (0..6).map(|_| rng.el(&ring, 5)).collect();
                if unimodular_witness(&ring, &row).unwrap().is_none() {
                    continue;
                }
                done += 1;
                let letters = sp_row_reduce(&ring, &row, &b()).unwrap();
                let mut v = Mat::row(ring.clone(), row.clone()).unwrap();
                for e in &letters {
                    assert!(is_symplectic(e, &psi).unwrap());
                    v = v.mul(e).unwrap();
                }
                let got = v.row_vec(0);
                assert!(got[5].is_one() && got[..5].iter().all(RingElement::is_zero), "{row:?}");
            }
        }
        // Gates: odd characteristic and length.
        assert!(sp_row_reduce(&zmod(6), &els(&zmod(6), &[1, 0, 0, 0, 0, 0]), &b()).is_err());
        assert!(sp_row_reduce(&fp(5), &els(&fp(5), &[1, 0, 0, 0]), &b()).is_err());
    }

    #[test]
    fn factor_sp_reconstructs_generator_products() {
        // Base case: every matrix of the smallest symplectic group over F_3.
        let ring = fp(3);
        let elems = ring.enumerate().unwrap();
        let psi1 = standard_symplectic_gram(&ring, 1);
        let mut count = 0;
        for a in &elems {
            for bb in &elems {
                for c in &elems {
                    for dd in &elems {
                        let m = Mat::new(
                            ring.clone(),
                            2,
                            2,
                            vec![a.clone(), bb.clone(), c.clone(), dd.clone()],
                        )
                        .unwrap();
                        if !is_symplectic(&m, &psi1).unwrap() {
                            continue;
                        }
                        count += 1;
                        let letters = factor_sp(&ring, &m, &b()).unwrap();
                        assert_eq!(sp_factor_product(&ring, &letters, 2).unwrap(), m);
                    }
                }
            }
        }
        assert_eq!(count, 24);
        // Size 4: random products of the standard generator family.
        let ring = fp(5);
        let mut rng = Lcg(71);
        let psi2 = standard_symplectic_gram(&ring, 2);
        for _ in 0..6 {
            let mut g = Mat::identity(ring.clone(), 4);
            for _ in 0..7 {
                let i = (rng.next() % 4) as usize;
                let mut j = (rng.next() % 4) as usize;
                if i == j {
                    j = (j + 1) % 4;
                }
                let letter = letter_matrix(
                    &ring,
                    4,
                    WordKind::Symplectic,
                    &Gen { i, j, x: rng.el(&ring, 5) },
                );
                g = g.mul(&letter).unwrap();
            }
            assert!(is_symplectic(&g, &psi2).unwrap());
            let letters = factor_sp(&ring, &g, &b()).unwrap();
            let back = sp_factor_product(&ring, &letters, 4).unwrap();
            assert_eq!(back, g);
            // Every dressed letter preserves the standard form.
            for l in &letters {
                let m = l.matrix(&ring, 4).unwrap();
                assert!(is_symplectic(&m, &psi2).unwrap());
            }
        }
        // Size 6 over Z/4 (2 not a unit): the triple machinery still factors.
        let ring = zmod(4);
        let mut rng = Lcg(113);
        let psi3 = standard_symplectic_gram(&ring, 3);
        for _ in 0..2 {
            let mut g = Mat::identity(ring.clone(), 6);
            for _ in 0..5 {
                let i = (rng.next() % 6) as usize;
                let mut j = (rng.next() % 6) as usize;
                if i == j {
                    j = (j + 1) % 6;
                }
                let letter = letter_matrix(
                    &ring,
                    6,
                    WordKind::Symplectic,
                    &Gen { i, j, x: rng.el(&ring, 4) },
                );
                g = g.mul(&letter).unwrap();
            }
            assert!(is_symplectic(&g, &psi3).unwrap());
            let letters = factor_sp(&ring, &g, &b()).unwrap();
            assert_eq!(sp_factor_product(&ring, &letters, 6).unwrap(), g);
        }
    }

    #[test]
    fn letter_json_round_trips() {
        let ring = zmod(6);
        let letters = [
            SpLetter::Theta { t: ring.from_i64(2), q: els(&ring, &[1, 0, 3, 5]) },
            SpLetter::Tau { g: ring.from_i64(4), delta: els(&ring, &[0, 2, 0, 1]) },
            SpLetter::ConjTau {
                t: ring.from_i64(1),
                q: els(&ring, &[2, 2, 0, 0]),
                g: ring.from_i64(3),
                delta: els(&ring, &[1, 1, 4, 0]),
            },
        ];
        for l in &letters {
            let j = l.to_json();
            let back = SpLetter::from_json(&ring, &j).unwrap();
            assert_eq!(back, *l);
        }
    }
}
