//! Dense matrices over the supported rings, elementary generator words for
//! SL_n and Sp_2n, and the standard alternating forms.
//!
//! Words multiply in listed order: eval([g1, g2, g3]) = M(g1) * M(g2) * M(g3).
//! Generator indices are 0-based in the API and 1-based in JSON.

use crate::rings::{
    try_exact_div_base, RingDescriptor, RingElement, RingError, Result,
};
use serde_json::{json, Value};
use std::ops::Index;

/// Dense row-major matrix with all entries in one ring.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat {
    ring: RingDescriptor,
    rows: usize,
    cols: usize,
    data: Vec<RingElement>,
}

impl Index<(usize, usize)> for Mat {
    type Output = RingElement;
    fn index(&self, (i, j): (usize, usize)) -> &RingElement {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl Mat {
    pub fn new(ring: RingDescriptor, rows: usize, cols: usize, data: Vec<RingElement>) -> Result<Mat> {
        if data.len() != rows * cols {
            return Err(RingError::Parse(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        for e in &data {
            if *e.ring() != ring {
                return Err(RingError::RingMismatch(
                    e.ring().to_string(),
                    ring.to_string(),
                ));
            }
        }
        Ok(Mat { ring, rows, cols, data })
    }

    pub fn zero(ring: RingDescriptor, rows: usize, cols: usize) -> Mat {
        let data = vec![ring.zero(); rows * cols];
        Mat { ring, rows, cols, data }
    }

    pub fn identity(ring: RingDescriptor, n: usize) -> Mat {
        let mut m = Mat::zero(ring, n, n);
        for i in 0..n {
            let one = m.ring.one();
            m.set(i, i, one);
        }
        m
    }

    pub fn from_fn(
        ring: RingDescriptor,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> RingElement,
    ) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { ring, rows, cols, data }
    }

    /// Convenience constructor from integer literals.
    pub fn from_i64(ring: &RingDescriptor, rows: &[&[i64]]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat::from_fn(ring.clone(), r, c, |i, j| ring.from_i64(rows[i][j]))
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElement) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        assert!(*v.ring() == self.ring, "ring mismatch in set");
        self.data[i * self.cols + j] = v;
    }

    pub fn row_vec(&self, i: usize) -> Vec<RingElement> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn col_vec(&self, j: usize) -> Vec<RingElement> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Column vector as an n x 1 matrix.
    pub fn column(ring: RingDescriptor, entries: Vec<RingElement>) -> Result<Mat> {
        let n = entries.len();
        Mat::new(ring, n, 1, entries)
    }

    /// Row vector as a 1 x n matrix.
    pub fn row(ring: RingDescriptor, entries: Vec<RingElement>) -> Result<Mat> {
        let n = entries.len();
        Mat::new(ring, 1, n, entries)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Mat {
        let data = self.data.iter().map(RingElement::neg).collect();
        Mat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    fn same_shape(&self, other: &Mat) -> Result<()> {
        if self.ring != other.ring {
            return Err(RingError::RingMismatch(
                self.ring.to_string(),
                other.ring.to_string(),
            ));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(RingError::Parse(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.ring != other.ring {
            return Err(RingError::RingMismatch(
                self.ring.to_string(),
                other.ring.to_string(),
            ));
        }
        if self.cols != other.rows {
            return Err(RingError::Parse(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zero(self.ring.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].add(&a.mul(b)?)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, x: &RingElement) -> Result<Mat> {
        let data = self
            .data
            .iter()
            .map(|a| a.mul(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.ring.clone(), self.cols, self.rows, |i, j| {
            self[(j, i)].clone()
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Mat::identity(self.ring.clone(), self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RingElement::is_zero)
    }

    /// Deletes row i and column j.
    pub fn submatrix(&self, i: usize, j: usize) -> Mat {
        Mat::from_fn(self.ring.clone(), self.rows - 1, self.cols - 1, |r, c| {
            let rr = if r < i { r } else { r + 1 };
            let cc = if c < j { c } else { c + 1 };
            self[(rr, cc)].clone()
        })
    }

    /// Block diagonal sum self | other.
    pub fn block_diag(&self, other: &Mat) -> Result<Mat> {
        if self.ring != other.ring {
            return Err(RingError::RingMismatch(
                self.ring.to_string(),
                other.ring.to_string(),
            ));
        }
        let (r1, c1) = (self.rows, self.cols);
        Ok(Mat::from_fn(
            self.ring.clone(),
            r1 + other.rows,
            c1 + other.cols,
            |i, j| {
                if i < r1 && j < c1 {
                    self[(i, j)].clone()
                } else if i >= r1 && j >= c1 {
                    other[(i - r1, j - c1)].clone()
                } else {
                    self.ring.zero()
                }
            },
        ))
    }

    /// Entrywise image under a ring map, landing in `target`.
    pub fn map_entries(
        &self,
        target: &RingDescriptor,
        f: &dyn Fn(&RingElement) -> Result<RingElement>,
    ) -> Result<Mat> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Mat::new(target.clone(), self.rows, self.cols, data)
    }

    /// Exact determinant. Cofactor expansion for n <= 4, fraction-free
    /// elimination over domains for larger n, and a column-subset expansion
    /// for larger matrices over non-domains.
    pub fn det(&self) -> Result<RingElement> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n <= 4 {
            return self.cofactor_det();
        }
        if self.ring.is_domain() {
            if let Some(d) = self.bareiss_det()? {
                return Ok(d);
            }
        }
        self.laplace_det()
    }

    fn cofactor_det(&self) -> Result<RingElement> {
        let n = self.rows;
        if n == 0 {
            return Ok(self.ring.one());
        }
        if n == 1 {
            return Ok(self[(0, 0)].clone());
        }
        let mut acc = self.ring.zero();
        for j in 0..n {
            if self[(0, j)].is_zero() {
                continue;
            }
            let term = self[(0, j)].mul(&self.submatrix(0, j).cofactor_det()?)?;
            acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        Ok(acc)
    }

    /// Fraction-free Gaussian elimination; `Ok(None)` when an exact division
    /// is unavailable (caller falls back to the subset expansion).
    fn bareiss_det(&self) -> Result<Option<RingElement>> {
        let n = self.rows;
        let mut m: Vec<Vec<RingElement>> = (0..n).map(|i| self.row_vec(i)).collect();
        let mut negate = false;
        let mut prev = self.ring.one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        negate = !negate;
                    }
                    None => return Ok(Some(self.ring.zero())),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k]
                        .mul(&m[i][j])?
                        .sub(&m[i][k].mul(&m[k][j])?)?;
                    match try_exact_div_base(&num, &prev) {
                        Some(q) => m[i][j] = q,
                        None => return Ok(None),
                    }
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        Ok(Some(if negate { d.neg() } else { d }))
    }

    /// Expansion over column subsets, O(2^n * n) ring operations; works over
    /// any ring.
    fn laplace_det(&self) -> Result<RingElement> {
        let n = self.rows;
        if n > 20 {
            return Err(RingError::BudgetExceeded(format!(
                "subset determinant on a {n}x{n} matrix"
            )));
        }
        let mut memo: Vec<Option<RingElement>> = vec![None; 1 << n];
        memo[0] = Some(self.ring.one());
        for mask in 1usize..(1 << n) {
            let k = mask.count_ones() as usize;
            let mut acc = self.ring.zero();
            let mut idx = 0usize;
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let a = &self[(k - 1, j)];
                if !a.is_zero() {
                    let sub = memo[mask ^ (1 << j)]
                        .as_ref()
                        .expect("smaller masks are filled")
                        .clone();
                    let term = a.mul(&sub)?;
                    acc = if (k - 1 + idx) % 2 == 0 {
                        acc.add(&term)?
                    } else {
                        acc.sub(&term)?
                    };
                }
                idx += 1;
            }
            memo[mask] = Some(acc);
        }
        Ok(memo[(1 << n) - 1].clone().expect("full mask filled"))
    }

    /// Adjugate matrix: adj * self = det * I over any commutative ring.
    pub fn adjugate(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols, "adjugate of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let mut out = Mat::zero(self.ring.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.submatrix(i, j).det()?;
                let v = if (i + j) % 2 == 0 { c } else { c.neg() };
                out.set(j, i, v);
            }
        }
        Ok(out)
    }

    /// Exact inverse; requires the determinant to be a unit.
    pub fn inverse(&self) -> Result<Mat> {
        let d = self.det()?;
        let dinv = d.inverse().ok_or(RingError::NotAUnit)?;
        self.adjugate()?.scalar_mul(&dinv)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| {
                    Value::Array((0..self.cols).map(|j| self[(i, j)].to_json()).collect())
                })
                .collect(),
        )
    }

    pub fn from_json(ring: &RingDescriptor, v: &Value) -> Result<Mat> {
        let rows = v
            .as_array()
            .ok_or_else(|| RingError::Parse("matrix must be an array of rows".into()))?;
        let r = rows.len();
        let mut data = Vec::new();
        let mut c = None;
        for row in rows {
            let entries = row
                .as_array()
                .ok_or_else(|| RingError::Parse("matrix row must be an array".into()))?;
            match c {
                None => c = Some(entries.len()),
                Some(w) if w != entries.len() => {
                    return Err(RingError::Parse("ragged matrix rows".into()))
                }
                _ => {}
            }
            for e in entries {
                data.push(ring.element_from_json(e)?);
            }
        }
        let c = c.unwrap_or(0);
        Mat::new(ring.clone(), r, c, data)
    }
}

/// Which generator family a word takes its letters from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordKind {
    Linear,
    Symplectic,
}

impl WordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WordKind::Linear => "linear",
            WordKind::Symplectic => "symplectic",
        }
    }
}

/// One generator: index pair plus parameter, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gen {
    pub i: usize,
    pub j: usize,
    pub x: RingElement,
}

/// A word in elementary (or elementary symplectic) generators of fixed size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryWord {
    pub ring: RingDescriptor,
    /// Matrix size the letters act on (even for symplectic words).
    pub n: usize,
    pub kind: WordKind,
    pub letters: Vec<Gen>,
}

/// Index paired with i by the standard alternating form, 0-based pairs
/// (0,1), (2,3), ...
pub fn paired(i: usize) -> usize {
    i ^ 1
}

fn pair_sign(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Matrix of a single generator.
pub fn letter_matrix(ring: &RingDescriptor, n: usize, kind: WordKind, g: &Gen) -> Mat {
    assert!(g.i != g.j && g.i < n && g.j < n, "bad generator indices");
    let mut m = Mat::identity(ring.clone(), n);
    m.set(g.i, g.j, g.x.clone());
    if kind == WordKind::Symplectic && g.j != paired(g.i) {
        // Companion entry keeps the standard form invariant.
        let v = if pair_sign(g.i as usize) * pair_sign(g.j as usize) > 0 {
            g.x.neg()
        } else {
            g.x.clone()
        };
        m.set(paired(g.j), paired(g.i), v);
    }
    m
}

impl ElementaryWord {
    pub fn new(ring: RingDescriptor, n: usize, kind: WordKind) -> ElementaryWord {
        if kind == WordKind::Symplectic {
            assert!(n % 2 == 0, "symplectic words need even size");
        }
        ElementaryWord { ring, n, kind, letters: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, x: RingElement) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(RingError::Parse(format!(
                "generator indices ({i},{j}) out of range for size {}",
                self.n
            )));
        }
        if *x.ring() != self.ring {
            return Err(RingError::RingMismatch(
                x.ring().to_string(),
                self.ring.to_string(),
            ));
        }
        self.letters.push(Gen { i, j, x });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Product of the letter matrices in listed order.
    pub fn eval(&self) -> Result<Mat> {
        let mut acc = Mat::identity(self.ring.clone(), self.n);
        for g in &self.letters {
            acc = acc.mul(&letter_matrix(&self.ring, self.n, self.kind, g))?;
        }
        Ok(acc)
    }

    /// Word evaluating to the inverse matrix: reversed order, negated
    /// parameters.
    pub fn inverse_word(&self) -> ElementaryWord {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|g| Gen { i: g.i, j: g.j, x: g.x.neg() })
            .collect();
        ElementaryWord { ring: self.ring.clone(), n: self.n, kind: self.kind, letters }
    }

    /// Merges adjacent letters at the same position and drops zero letters.
    /// The evaluation is unchanged.
    pub fn normalize(&self) -> ElementaryWord {
        let mut out: Vec<Gen> = Vec::new();
        for g in &self.letters {
            if g.x.is_zero() {
                continue;
            }
            if let Some(top) = out.last_mut() {
                if top.i == g.i && top.j == g.j {
                    top.x = top.x.add(&g.x).expect("same ring");
                    if top.x.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            out.push(g.clone());
        }
        ElementaryWord { ring: self.ring.clone(), n: self.n, kind: self.kind, letters: out }
    }

    /// Same letters regarded in a larger group; the evaluation becomes the
    /// block sum with an identity block.
    pub fn embed(&self, new_n: usize) -> Result<ElementaryWord> {
        if new_n < self.n {
            return Err(RingError::Parse("embedding must not shrink".into()));
        }
        if self.kind == WordKind::Symplectic && new_n % 2 != 0 {
            return Err(RingError::Parse("symplectic size must be even".into()));
        }
        Ok(ElementaryWord {
            ring: self.ring.clone(),
            n: new_n,
            kind: self.kind,
            letters: self.letters.clone(),
        })
    }

    /// Letters moved to the lower-right block of a larger matrix.
    pub fn shifted(&self, offset: usize, new_n: usize) -> Result<ElementaryWord> {
        if self.n + offset > new_n {
            return Err(RingError::Parse("shift exceeds target size".into()));
        }
        let letters = self
            .letters
            .iter()
            .map(|g| Gen { i: g.i + offset, j: g.j + offset, x: g.x.clone() })
            .collect();
        Ok(ElementaryWord { ring: self.ring.clone(), n: new_n, kind: self.kind, letters })
    }

    /// Word for the transpose matrix: reversed order, indices swapped.
    /// Linear words only.
    pub fn transposed(&self) -> ElementaryWord {
        assert_eq!(self.kind, WordKind::Linear, "transpose word is linear-only");
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|g| Gen { i: g.j, j: g.i, x: g.x.clone() })
            .collect();
        ElementaryWord { ring: self.ring.clone(), n: self.n, kind: self.kind, letters }
    }

    pub fn concat(&self, other: &ElementaryWord) -> Result<ElementaryWord> {
        if self.ring != other.ring || self.n != other.n || self.kind != other.kind {
            return Err(RingError::Parse("word concat shape mismatch".into()));
        }
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Ok(ElementaryWord { ring: self.ring.clone(), n: self.n, kind: self.kind, letters })
    }

    /// Rebuilds the word with every parameter replaced by f(parameter),
    /// landing in `target`.
    pub fn map_params(
        &self,
        target: &RingDescriptor,
        f: &dyn Fn(&RingElement) -> Result<RingElement>,
    ) -> Result<ElementaryWord> {
        let letters = self
            .letters
            .iter()
            .map(|g| {
                Ok(Gen { i: g.i, j: g.j, x: f(&g.x)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ElementaryWord { ring: target.clone(), n: self.n, kind: self.kind, letters })
    }

    // JSON layout: {"kind":"linear","n":3,"letters":[{"i":1,"j":2,"x":...}]}
    // with 1-based indices.
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "n": self.n,
            "letters": self.letters.iter().map(|g| json!({
                "i": g.i + 1,
                "j": g.j + 1,
                "x": g.x.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(ring: &RingDescriptor, v: &Value) -> Result<ElementaryWord> {
        let obj = v
            .as_object()
            .ok_or_else(|| RingError::Parse("word must be an object".into()))?;
        let kind = match obj.get("kind").and_then(Value::as_str) {
            Some("linear") => WordKind::Linear,
            Some("symplectic") => WordKind::Symplectic,
            _ => return Err(RingError::Parse("word kind must be linear or symplectic".into())),
        };
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| RingError::Parse("word needs integer \"n\"".into()))?
            as usize;
        if kind == WordKind::Symplectic && n % 2 != 0 {
            return Err(RingError::Parse("symplectic size must be even".into()));
        }
        let mut word = ElementaryWord::new(ring.clone(), n, kind);
        let letters = obj
            .get("letters")
            .and_then(Value::as_array)
            .ok_or_else(|| RingError::Parse("word needs \"letters\" array".into()))?;
        for l in letters {
            let lo = l
                .as_object()
                .ok_or_else(|| RingError::Parse("letter must be an object".into()))?;
            let i = lo
                .get("i")
                .and_then(Value::as_u64)
                .ok_or_else(|| RingError::Parse("letter needs \"i\"".into()))?;
            let j = lo
                .get("j")
                .and_then(Value::as_u64)
                .ok_or_else(|| RingError::Parse("letter needs \"j\"".into()))?;
            if i == 0 || j == 0 {
                return Err(RingError::Parse("letter indices are 1-based".into()));
            }
            let x = ring.element_from_json(
                lo.get("x")
                    .ok_or_else(|| RingError::Parse("letter needs \"x\"".into()))?,
            )?;
            word.push(i as usize - 1, j as usize - 1, x)?;
        }
        Ok(word)
    }
}

/// Standard alternating form: block diagonal [[0,1],[-1,0]], `pairs` blocks.
pub fn standard_symplectic_gram(ring: &RingDescriptor, pairs: usize) -> Mat {
    let mut m = Mat::zero(ring.clone(), 2 * pairs, 2 * pairs);
    for k in 0..pairs {
        m.set(2 * k, 2 * k + 1, ring.one());
        m.set(2 * k + 1, 2 * k, ring.from_i64(-1));
    }
    m
}

/// Exact test m^t * gram * m == gram.
pub fn is_symplectic(m: &Mat, gram: &Mat) -> Result<bool> {
    if m.rows() != m.cols() || gram.rows() != gram.cols() || m.rows() != gram.rows() {
        return Err(RingError::Parse("form check needs square matrices of one size".into()));
    }
    Ok(m.transpose().mul(gram)?.mul(m)? == *gram)
}

/// Elementary symplectic generator as a matrix. Requires 2 to be a unit in
/// the ring, matching the group theory this generator family comes from.
pub fn sp_generator(
    ring: &RingDescriptor,
    size: usize,
    i: usize,
    j: usize,
    x: RingElement,
) -> Result<Mat> {
    if size % 2 != 0 || size < 2 {
        return Err(RingError::Parse(format!("symplectic size {size} must be even")));
    }
    if i == j || i >= size || j >= size {
        return Err(RingError::Parse(format!(
            "generator indices ({i},{j}) out of range for size {size}"
        )));
    }
    if *x.ring() != *ring {
        return Err(RingError::RingMismatch(x.ring().to_string(), ring.to_string()));
    }
    if !ring.from_i64(2).is_unit() {
        return Err(RingError::MissingCapability("invertible 2", ring.to_string()));
    }
    Ok(letter_matrix(ring, size, WordKind::Symplectic, &Gen { i, j, x }))
}

/// One-step stabilization: identity block sum, size +1 linear, +2 symplectic.
pub fn embed_stable(m: &Mat, kind: WordKind) -> Result<Mat> {
    let pad = match kind {
        WordKind::Linear => 1,
        WordKind::Symplectic => 2,
    };
    m.block_diag(&Mat::identity(m.ring().clone(), pad))
}
