//! Linear codes held as canonical (RREF) generator matrices.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg::{check_form, dot, same_field, Echelon, InnerForm, MatF, VecF};

/// Default cap on the number of codewords walked by [`LinearCode::codewords`]
/// and [`LinearCode::min_distance`].
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Default cap on the number of coset representatives scanned by the
/// expansion oracles.
pub const DEFAULT_ORACLE_CAP: u64 = 1_000_000;

/// Limits for the exhaustive routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub enum_cap: u64,
    pub oracle_cap: u64,
    /// Worker threads for enumerations; 1 runs everything on the caller.
    pub threads: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enum_cap: DEFAULT_ENUM_CAP,
            oracle_cap: DEFAULT_ORACLE_CAP,
            threads: 1,
        }
    }
}

impl Budget {
    /// Both caps set to `cap`.
    pub fn with_cap(cap: u64) -> Self {
        Budget {
            enum_cap: cap,
            oracle_cap: cap,
            threads: 1,
        }
    }
}

/// `q^e`, or an error when it exceeds `cap`.
pub(crate) fn checked_count(q: u32, e: usize, cap: u64) -> Result<u64> {
    let size = (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::CapExceeded { size, cap });
    }
    Ok(size as u64)
}

/// An `[n, k]` linear code. The generator is in RREF with exactly `k` rows,
/// so two codes are equal iff they have the same field, length and rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    gen: MatF,
}

impl LinearCode {
    /// The row space of `rows`; dependent rows collapse.
    pub fn new(rows: &MatF) -> Result<Self> {
        if rows.ncols() == 0 {
            return Err(Error::Unsupported("codes need length at least 1".into()));
        }
        Ok(LinearCode {
            gen: rows.rref().matrix,
        })
    }

    pub fn from_values(ctx: &Field, n: usize, rows: &[Vec<u32>]) -> Result<Self> {
        Self::new(&MatF::from_values(ctx, n, rows)?)
    }

    /// The `[n, 0]` code.
    pub fn zero(ctx: &Field, n: usize) -> Result<Self> {
        Self::new(&MatF::empty(ctx, n))
    }

    /// The `[n, n]` code.
    pub fn full(ctx: &Field, n: usize) -> Result<Self> {
        Self::new(&MatF::identity(ctx, n))
    }

    pub fn ctx(&self) -> &Field {
        self.gen.ctx()
    }

    pub fn n(&self) -> usize {
        self.gen.ncols()
    }

    pub fn k(&self) -> usize {
        self.gen.nrows()
    }

    pub fn generator(&self) -> &MatF {
        &self.gen
    }

    /// Flattened generator entries; the ordering key for tie-breaks.
    pub fn canonical_key(&self) -> Vec<u32> {
        self.gen.rows().iter().flatten().map(|x| x.0).collect()
    }

    /// The code spanned by `self` and `v`.
    pub fn span_with(&self, v: &VecF) -> Result<LinearCode> {
        LinearCode::new(&self.gen.with_row(v)?)
    }

    fn check_vec(&self, v: &VecF) -> Result<()> {
        same_field(self.ctx(), v.ctx())?;
        if v.len() != self.n() {
            return Err(Error::LengthMismatch(self.n(), v.len()));
        }
        Ok(())
    }

    fn check_code(&self, other: &LinearCode) -> Result<()> {
        same_field(self.ctx(), other.ctx())?;
        if self.n() != other.n() {
            return Err(Error::LengthMismatch(self.n(), other.n()));
        }
        Ok(())
    }

    /// Euclidean dual, or Hermitian dual `{x : sum g_i^q x_i = 0 for all g in C}`.
    pub fn dual(&self, form: InnerForm) -> Result<LinearCode> {
        check_form(self.ctx(), form)?;
        let annihilated = match form {
            InnerForm::Euclidean => self.gen.clone(),
            InnerForm::Hermitian => self.gen.conj()?,
        };
        Ok(LinearCode {
            gen: annihilated.nullspace(),
        })
    }

    pub fn contains(&self, v: &VecF) -> Result<bool> {
        self.check_vec(v)?;
        // The rows are already echelon with unit pivots.
        Ok(Echelon::from_rows(self.ctx(), self.gen.rows()).contains(v.entries()))
    }

    /// True when every codeword of `self` lies in `other`.
    pub fn is_subcode_of(&self, other: &LinearCode) -> Result<bool> {
        self.check_code(other)?;
        let basis = Echelon::from_rows(other.ctx(), other.gen.rows());
        Ok(self.gen.rows().iter().all(|r| basis.contains(r)))
    }

    /// Inner products of all generator pairs.
    pub fn gram(&self, form: InnerForm) -> Result<Vec<Vec<Fe>>> {
        check_form(self.ctx(), form)?;
        let rows = self.gen.rows();
        Ok(rows
            .iter()
            .map(|a| rows.iter().map(|b| dot(self.ctx(), a, b, form)).collect())
            .collect())
    }

    /// `C` is contained in its dual, tested on the generator Gram matrix.
    pub fn is_self_orthogonal(&self, form: InnerForm) -> Result<bool> {
        check_form(self.ctx(), form)?;
        let rows = self.gen.rows();
        Ok(rows.iter().enumerate().all(|(i, a)| {
            rows[i..]
                .iter()
                .all(|b| dot(self.ctx(), a, b, form).is_zero())
        }))
    }

    pub fn is_self_dual(&self, form: InnerForm) -> Result<bool> {
        Ok(2 * self.k() == self.n() && self.is_self_orthogonal(form)?)
    }

    /// All `q^k` codewords in lexicographic message order.
    pub fn codewords(&self) -> Result<Codewords> {
        self.codewords_capped(DEFAULT_ENUM_CAP)
    }

    pub fn codewords_capped(&self, cap: u64) -> Result<Codewords> {
        let total = checked_count(self.ctx().order(), self.k(), cap)?;
        Ok(Codewords {
            walker: Walker::new(self, 0),
            remaining: total,
        })
    }

    /// Minimum Hamming weight of a nonzero codeword, by exhaustive search.
    pub fn min_distance(&self) -> Result<usize> {
        self.min_distance_with(&Budget::default())
    }

    pub fn min_distance_with(&self, budget: &Budget) -> Result<usize> {
        if self.k() == 0 {
            return Err(Error::ZeroCode);
        }
        let q = self.ctx().order();
        checked_count(q, self.k(), budget.enum_cap)?;
        let threads = budget.threads.clamp(1, q as usize);
        if threads == 1 {
            return Ok((0..q).map(|lead| self.min_weight_with_lead(lead)).min().unwrap());
        }
        let best = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    scope.spawn(move || {
                        (t as u32..q)
                            .step_by(threads)
                            .map(|lead| self.min_weight_with_lead(lead))
                            .min()
                            .unwrap_or(usize::MAX)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("distance worker panicked"))
                .min()
                .unwrap()
        });
        Ok(best)
    }

    /// Smallest nonzero weight among codewords whose first message symbol is `lead`.
    fn min_weight_with_lead(&self, lead: u32) -> usize {
        let q = self.ctx().order() as u64;
        let mut walker = Walker::new(self, lead);
        let count = q.pow(self.k() as u32 - 1);
        let mut best = usize::MAX;
        for _ in 0..count {
            let w = walker.weight();
            if w > 0 && w < best {
                best = w;
                if best == 1 {
                    break;
                }
            }
            walker.advance();
        }
        best
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}] over GF({})", self.n(), self.k(), self.ctx().name())
    }
}

pub fn is_subcode(c: &LinearCode, d: &LinearCode) -> Result<bool> {
    c.is_subcode_of(d)
}

/// Odometer over message vectors. Digit 0 is the most significant and is
/// held fixed at the starting value; the others run through all `q` values.
struct Walker {
    ctx: Field,
    /// `multiples[j][e]` is `Fe(e)` times generator row `j`.
    multiples: Vec<Vec<Vec<Fe>>>,
    digits: Vec<u32>,
    current: Vec<Fe>,
}

impl Walker {
    fn new(code: &LinearCode, lead: u32) -> Walker {
        let ctx = code.ctx().clone();
        let multiples: Vec<Vec<Vec<Fe>>> = code
            .gen
            .rows()
            .iter()
            .map(|row| {
                ctx.elements()
                    .map(|e| row.iter().map(|&x| ctx.mul(e, x)).collect())
                    .collect()
            })
            .collect();
        let mut digits = vec![0; code.k()];
        let current = match multiples.first() {
            Some(first) => {
                digits[0] = lead;
                first[lead as usize].clone()
            }
            None => vec![Fe::ZERO; code.n()],
        };
        Walker {
            ctx,
            multiples,
            digits,
            current,
        }
    }

    fn weight(&self) -> usize {
        self.current.iter().filter(|x| !x.is_zero()).count()
    }

    /// Steps to the next message; the leading digit only moves when walking
    /// the whole space.
    fn advance(&mut self) {
        let q = self.ctx.order();
        for j in (0..self.digits.len()).rev() {
            let old = self.digits[j];
            let new = if old + 1 == q { 0 } else { old + 1 };
            let (from, to) = (&self.multiples[j][old as usize], &self.multiples[j][new as usize]);
            for ((c, &a), &b) in self.current.iter_mut().zip(from).zip(to) {
                *c = self.ctx.add(self.ctx.sub(*c, a), b);
            }
            self.digits[j] = new;
            if new != 0 {
                return;
            }
        }
    }
}

/// Iterator returned by [`LinearCode::codewords`].
pub struct Codewords {
    walker: Walker,
    remaining: u64,
}

impl Iterator for Codewords {
    type Item = VecF;

    fn next(&mut self) -> Option<VecF> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = VecF::from_raw(&self.walker.ctx, self.walker.current.clone());
        if self.remaining > 0 {
            self.walker.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}
