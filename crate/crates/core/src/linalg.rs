//! Vectors and matrices over a [`FieldCtx`](crate::gf::FieldCtx).
//!
//! Row spaces are kept in reduced row echelon form (leftmost pivots, pivot
//! entries 1, zero rows dropped), which makes equality of row spaces a plain
//! comparison of matrices.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

/// Which bilinear or sesquilinear form an inner product uses.
///
/// The Hermitian form conjugates its FIRST argument:
/// `<a, b>_h = sum a_i^q b_i`. It is linear in `b` and conjugate-linear in `a`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerForm {
    Euclidean,
    Hermitian,
}

impl fmt::Display for InnerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InnerForm::Euclidean => "euclidean",
            InnerForm::Hermitian => "hermitian",
        })
    }
}

impl FromStr for InnerForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(InnerForm::Euclidean),
            "hermitian" => Ok(InnerForm::Hermitian),
            _ => Err(Error::Unsupported(format!("unknown inner product {s:?}"))),
        }
    }
}

pub(crate) fn same_field(a: &Field, b: &Field) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::FieldMismatch)
    }
}

pub(crate) fn check_form(ctx: &Field, form: InnerForm) -> Result<()> {
    if form == InnerForm::Hermitian && !ctx.is_quadratic() {
        return Err(Error::NotQuadratic {
            p: ctx.characteristic(),
            m: ctx.degree(),
        });
    }
    Ok(())
}

/// Inner product of raw slices; the caller has validated lengths and form.
pub(crate) fn dot(ctx: &Field, a: &[Fe], b: &[Fe], form: InnerForm) -> Fe {
    a.iter().zip(b).fold(Fe::ZERO, |acc, (&x, &y)| {
        let x = match form {
            InnerForm::Euclidean => x,
            InnerForm::Hermitian => ctx.conj_unchecked(x),
        };
        ctx.add(acc, ctx.mul(x, y))
    })
}

/// `a + c * b`, entrywise.
pub(crate) fn axpy(ctx: &Field, a: &[Fe], c: Fe, b: &[Fe]) -> Vec<Fe> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| ctx.add(x, ctx.mul(c, y)))
        .collect()
}

fn check_entries(ctx: &Field, entries: &[Fe]) -> Result<()> {
    match entries.iter().find(|x| x.0 >= ctx.order()) {
        Some(x) => Err(Error::ElementOutOfRange {
            value: x.0 as u64,
            q: ctx.order() as u64,
        }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecF {
    ctx: Field,
    entries: Vec<Fe>,
}

impl VecF {
    pub fn new(ctx: &Field, entries: Vec<Fe>) -> Result<Self> {
        check_entries(ctx, &entries)?;
        Ok(VecF {
            ctx: ctx.clone(),
            entries,
        })
    }

    pub fn from_values(ctx: &Field, values: &[u32]) -> Result<Self> {
        Self::new(ctx, values.iter().map(|&v| Fe(v)).collect())
    }

    pub fn zero(ctx: &Field, n: usize) -> Self {
        VecF {
            ctx: ctx.clone(),
            entries: vec![Fe::ZERO; n],
        }
    }

    pub(crate) fn from_raw(ctx: &Field, entries: Vec<Fe>) -> Self {
        VecF {
            ctx: ctx.clone(),
            entries,
        }
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn values(&self) -> Vec<u32> {
        self.entries.iter().map(|x| x.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.entries.iter().filter(|x| !x.is_zero()).count()
    }

    fn check_compatible(&self, other: &VecF) -> Result<()> {
        same_field(&self.ctx, &other.ctx)?;
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    pub fn add(&self, other: &VecF) -> Result<VecF> {
        self.axpy(Fe::ONE, other)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Fe, other: &VecF) -> Result<VecF> {
        self.check_compatible(other)?;
        Ok(VecF::from_raw(
            &self.ctx,
            axpy(&self.ctx, &self.entries, c, &other.entries),
        ))
    }

    pub fn scale(&self, c: Fe) -> VecF {
        let entries = self.entries.iter().map(|&x| self.ctx.mul(c, x)).collect();
        VecF::from_raw(&self.ctx, entries)
    }

    /// Entrywise conjugation `x -> x^q` in GF(q²).
    pub fn conj(&self) -> Result<VecF> {
        check_form(&self.ctx, InnerForm::Hermitian)?;
        let entries = self
            .entries
            .iter()
            .map(|&x| self.ctx.conj_unchecked(x))
            .collect();
        Ok(VecF::from_raw(&self.ctx, entries))
    }
}

impl fmt::Display for VecF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `<a, b>` under the chosen form.
pub fn inner(a: &VecF, b: &VecF, form: InnerForm) -> Result<Fe> {
    a.check_compatible(b)?;
    check_form(&a.ctx, form)?;
    Ok(dot(&a.ctx, &a.entries, &b.entries, form))
}

/// A dense matrix stored as rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatF {
    ctx: Field,
    ncols: usize,
    rows: Vec<Vec<Fe>>,
}

/// Result of [`MatF::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: MatF,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl MatF {
    pub fn new(ctx: &Field, ncols: usize, rows: Vec<Vec<Fe>>) -> Result<Self> {
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::LengthMismatch(ncols, row.len()));
            }
            check_entries(ctx, row)?;
        }
        Ok(MatF {
            ctx: ctx.clone(),
            ncols,
            rows,
        })
    }

    pub fn from_values(ctx: &Field, ncols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Fe(v)).collect())
            .collect();
        Self::new(ctx, ncols, rows)
    }

    pub fn from_vecs(ctx: &Field, ncols: usize, vecs: &[VecF]) -> Result<Self> {
        for v in vecs {
            same_field(ctx, &v.ctx)?;
        }
        Self::new(ctx, ncols, vecs.iter().map(|v| v.entries.clone()).collect())
    }

    pub fn empty(ctx: &Field, ncols: usize) -> Self {
        MatF {
            ctx: ctx.clone(),
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn identity(ctx: &Field, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![Fe::ZERO; n];
                r[i] = Fe::ONE;
                r
            })
            .collect();
        MatF {
            ctx: ctx.clone(),
            ncols: n,
            rows,
        }
    }

    pub(crate) fn from_raw(ctx: &Field, ncols: usize, rows: Vec<Vec<Fe>>) -> Self {
        MatF {
            ctx: ctx.clone(),
            ncols,
            rows,
        }
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> VecF {
        VecF::from_raw(&self.ctx, self.rows[i].clone())
    }

    pub fn row_vecs(&self) -> Vec<VecF> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    pub fn values(&self) -> Vec<Vec<u32>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.0).collect())
            .collect()
    }

    /// The rows of `self` followed by the rows of `other`.
    pub fn stack(&self, other: &MatF) -> Result<MatF> {
        same_field(&self.ctx, &other.ctx)?;
        if self.ncols != other.ncols {
            return Err(Error::LengthMismatch(self.ncols, other.ncols));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(MatF::from_raw(&self.ctx, self.ncols, rows))
    }

    pub fn with_row(&self, v: &VecF) -> Result<MatF> {
        same_field(&self.ctx, &v.ctx)?;
        if v.len() != self.ncols {
            return Err(Error::LengthMismatch(self.ncols, v.len()));
        }
        let mut rows = self.rows.clone();
        rows.push(v.entries.clone());
        Ok(MatF::from_raw(&self.ctx, self.ncols, rows))
    }

    /// Entrywise conjugation `x -> x^q` in GF(q²).
    pub fn conj(&self) -> Result<MatF> {
        check_form(&self.ctx, InnerForm::Hermitian)?;
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| self.ctx.conj_unchecked(x)).collect())
            .collect();
        Ok(MatF::from_raw(&self.ctx, self.ncols, rows))
    }

    /// Reduced row echelon form with zero rows removed.
    pub fn rref(&self) -> Rref {
        let f = &self.ctx;
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.ncols {
            let Some(found) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, found);
            let scale = f.inv(rows[r][col]).expect("pivot is nonzero");
            for x in rows[r].iter_mut() {
                *x = f.mul(*x, scale);
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && !row[col].is_zero() {
                    let c = f.neg(row[col]);
                    *row = axpy(f, row, c, &pivot_row);
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        Rref {
            matrix: MatF::from_raw(f, self.ncols, rows),
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// RREF basis of `{x : M x^T = 0}`.
    pub fn nullspace(&self) -> MatF {
        let f = &self.ctx;
        let Rref { matrix, pivots, .. } = self.rref();
        let basis = (0..self.ncols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut x = vec![Fe::ZERO; self.ncols];
                x[free] = Fe::ONE;
                for (row, &pc) in matrix.rows.iter().zip(&pivots) {
                    x[pc] = f.neg(row[free]);
                }
                x
            })
            .collect();
        MatF::from_raw(f, self.ncols, basis).rref().matrix
    }
}

impl fmt::Display for MatF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let parts: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// An incrementally grown echelon basis used for membership and rank growth.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    ctx: Field,
    /// `(pivot column, row)` with the pivot entry normalized to 1.
    rows: Vec<(usize, Vec<Fe>)>,
}

impl Echelon {
    pub(crate) fn new(ctx: &Field) -> Self {
        Echelon {
            ctx: ctx.clone(),
            rows: Vec::new(),
        }
    }

    pub(crate) fn from_rows(ctx: &Field, rows: &[Vec<Fe>]) -> Self {
        let mut e = Echelon::new(ctx);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn reduce(&self, v: &[Fe]) -> Vec<Fe> {
        let f = &self.ctx;
        let mut v = v.to_vec();
        for (pc, row) in &self.rows {
            if !v[*pc].is_zero() {
                let c = f.neg(v[*pc]);
                v = axpy(f, &v, c, row);
            }
        }
        v
    }

    pub(crate) fn contains(&self, v: &[Fe]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v` if it is independent of the current rows; reports whether it was.
    pub(crate) fn insert(&mut self, v: &[Fe]) -> bool {
        let r = self.reduce(v);
        let Some(pc) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let scale = self.ctx.inv(r[pc]).expect("pivot is nonzero");
        let r: Vec<Fe> = r.iter().map(|&x| self.ctx.mul(x, scale)).collect();
        self.rows.push((pc, r));
        true
    }
}

fn check_containment(inner: &MatF, ambient: &MatF) -> Result<Echelon> {
    same_field(&inner.ctx, &ambient.ctx)?;
    if inner.ncols != ambient.ncols {
        return Err(Error::LengthMismatch(inner.ncols, ambient.ncols));
    }
    let amb = Echelon::from_rows(&ambient.ctx, &ambient.rows);
    if !inner.rows.iter().all(|r| amb.contains(r)) {
        return Err(Error::NotContained);
    }
    Ok(amb)
}

/// Rows completing `inner` to a basis of the row space of `ambient`.
///
/// Ambient rows are scanned in order and kept when they grow the rank.
pub fn extend_basis(inner: &MatF, ambient: &MatF) -> Result<MatF> {
    check_containment(inner, ambient)?;
    let mut basis = Echelon::from_rows(&inner.ctx, &inner.rows);
    let block = ambient
        .rows
        .iter()
        .filter(|r| basis.insert(r))
        .cloned()
        .collect();
    Ok(MatF::from_raw(&inner.ctx, inner.ncols, block))
}

/// Like [`extend_basis`], but the candidates are random combinations of the
/// ambient rows drawn from `rng`.
pub fn extend_basis_seeded<R: Rng + ?Sized>(
    inner: &MatF,
    ambient: &MatF,
    rng: &mut R,
) -> Result<MatF> {
    let amb = check_containment(inner, ambient)?;
    let f = &inner.ctx;
    let mut basis = Echelon::from_rows(f, &inner.rows);
    let target = amb.rank();
    let mut block = Vec::new();
    while basis.rank() < target {
        let candidate = ambient
            .rows
            .iter()
            .fold(vec![Fe::ZERO; inner.ncols], |acc, row| {
                axpy(f, &acc, f.random(rng), row)
            });
        if basis.insert(&candidate) {
            block.push(candidate);
        }
    }
    Ok(MatF::from_raw(f, inner.ncols, block))
}

/// Orthogonalizes `vectors` against each other and against the nondegenerate
/// members of `start_orthogonal`.
///
/// Each output is `b_j - sum (<g_i, b_j> / <g_i, g_i>) g_i` over the earlier
/// outputs `g_i` (and the start vectors with nonzero self product). Start
/// vectors with zero self product are assumed to be orthogonal to the input
/// already. A vector may have zero self product only if nothing after it
/// needs to divide by it; otherwise [`Error::DegenerateVector`] names it.
pub fn gram_schmidt(
    vectors: &[VecF],
    form: InnerForm,
    start_orthogonal: &[VecF],
) -> Result<Vec<VecF>> {
    let Some(first) = vectors.first().or(start_orthogonal.first()) else {
        return Ok(Vec::new());
    };
    let f = first.ctx.clone();
    check_form(&f, form)?;
    for v in vectors.iter().chain(start_orthogonal) {
        first.check_compatible(v)?;
    }

    let mut pivots: Vec<(Vec<Fe>, Fe)> = start_orthogonal
        .iter()
        .map(|s| (s.entries.clone(), dot(&f, &s.entries, &s.entries, form)))
        .filter(|(_, norm)| !norm.is_zero())
        .collect();
    let mut out: Vec<VecF> = Vec::with_capacity(vectors.len());
    for (j, b) in vectors.iter().enumerate() {
        if j > 0 {
            let prev = &out[j - 1];
            let norm = dot(&f, &prev.entries, &prev.entries, form);
            if norm.is_zero() {
                return Err(Error::DegenerateVector(j - 1));
            }
            pivots.push((prev.entries.clone(), norm));
        }
        let mut g = b.entries.clone();
        for (p, norm) in &pivots {
            let coef = f.div(dot(&f, p, &b.entries, form), *norm)?;
            if !coef.is_zero() {
                g = axpy(&f, &g, f.neg(coef), p);
            }
        }
        out.push(VecF::from_raw(&f, g));
    }
    Ok(out)
}
