//! Finite fields GF(p^m) in a polynomial basis.
//!
//! Elements are encoded as integers in `[0, q)` whose base-`p` digits (least
//! significant first) are the coefficients of the residue polynomial. The
//! modulus is the monic irreducible of degree `m` with the smallest digit
//! encoding, so two contexts built from the same `(p, m)` agree bit for bit.
//! Codes written to disk are only portable between programs that use the same
//! modulus rule.
//!
//! When `m` is even the context doubles as GF(q²) for q = p^(m/2): the base
//! field GF(q) is the fixed set of the conjugation `x -> x^q`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest field size accepted by [`make_field`].
pub const DEFAULT_FIELD_CAP: u64 = 1 << 16;

/// Up to this field size the norm equation is solved by scanning the field.
pub const NORM_BRUTE_FORCE_LIMIT: u64 = 1 << 16;

/// A field element, identified by its integer encoding.
///
/// The element carries no pointer to its field; every operation goes through
/// a [`FieldCtx`]. Vectors and matrices hold the context and check that
/// operands agree.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shared handle to an immutable field context.
pub type Field = Arc<FieldCtx>;

#[derive(Clone)]
struct BaseSubfield {
    /// Size of the base field.
    q: u32,
    /// Number of `x -> x^p` iterations making up the conjugation.
    degree: u32,
    elements: Vec<Fe>,
}

/// The field GF(p^m) together with log/antilog tables and, for even `m`,
/// the embedded base field of its quadratic-extension view.
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: Fe,
    /// `exp[i] = g^i` for `i < 2(q-1)`, doubled to skip a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    base: Option<BaseSubfield>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) mod {}", self.name(), self.modulus_string())
    }
}

/// Builds GF(p^m) with the canonical modulus and the default size cap.
pub fn make_field(p: u64, m: u32) -> Result<Field> {
    make_field_with_cap(p, m, DEFAULT_FIELD_CAP)
}

pub fn make_field_with_cap(p: u64, m: u32, cap: u64) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::ZeroDegree);
    }
    let too_large = Error::FieldTooLarge { p, m, cap };
    let q = (p as u128)
        .checked_pow(m)
        .filter(|&q| q <= cap as u128 && q <= u32::MAX as u128)
        .ok_or(too_large)? as u32;
    let p = p as u32;

    let modulus = canonical_modulus(p, m);
    let raw = RawField { p, m, modulus: &modulus };

    let generator = find_generator(&raw, q);
    let order = (q - 1) as usize;
    let mut exp = vec![0u32; 2 * order.max(1)];
    let mut log = vec![0u32; q as usize];
    let mut cur = 1u32;
    for (i, slot) in exp[..order].iter_mut().enumerate() {
        *slot = cur;
        log[cur as usize] = i as u32;
        cur = raw.mul(cur, generator);
    }
    exp.copy_within(..order, order);

    let mut ctx = FieldCtx {
        p,
        m,
        q,
        modulus,
        generator: Fe(generator),
        exp,
        log,
        base: None,
    };
    if m.is_multiple_of(2) {
        let degree = m / 2;
        let sub_q = p.pow(degree);
        let elements = ctx
            .elements()
            .filter(|&x| ctx.pow(x, sub_q as u64) == x)
            .collect::<Vec<_>>();
        debug_assert_eq!(elements.len(), sub_q as usize);
        ctx.base = Some(BaseSubfield {
            q: sub_q,
            degree,
            elements,
        });
    }
    Ok(Arc::new(ctx))
}

/// Parses a field name of the form `"p^m"` (a bare prime means `m = 1`).
pub fn parse_field_spec(spec: &str) -> Result<(u64, u32)> {
    let bad = || Error::Parse {
        line: 0,
        msg: format!("field must be written as p^m, got {spec:?}"),
    };
    let spec = spec.trim();
    let (p, m) = match spec.split_once('^') {
        Some((p, m)) => (p.trim(), m.trim()),
        None => (spec, "1"),
    };
    let p = p.parse::<u64>().map_err(|_| bad())?;
    let m = m.parse::<u32>().map_err(|_| bad())?;
    Ok((p, m))
}

impl FieldCtx {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements.
    pub fn order(&self) -> u32 {
        self.q
    }

    /// The field name in `p^m` form.
    pub fn name(&self) -> String {
        format!("{}^{}", self.p, self.m)
    }

    /// Low-order coefficients `c_0..c_{m-1}` of the monic modulus.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut terms = vec![if self.m == 1 {
            "x".to_string()
        } else {
            format!("x^{}", self.m)
        }];
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        terms.join("+")
    }

    /// Smallest-encoding generator of the multiplicative group.
    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn elem(&self, value: u64) -> Result<Fe> {
        if value < self.q as u64 {
            Ok(Fe(value as u32))
        } else {
            Err(Error::ElementOutOfRange {
                value,
                q: self.q as u64,
            })
        }
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.q))
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if self.m == 1 {
            return Fe((a.0 + b.0) % self.p);
        }
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.m {
            out += (x % p + y % p) % p * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        if self.m == 1 {
            return Fe((self.p - a.0) % self.p);
        }
        let p = self.p;
        let mut x = a.0;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.m {
            out += (p - x % p) % p * place;
            x /= p;
            place *= p;
        }
        Fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fe(self.exp[i as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        Ok(Fe(self.exp[((order - self.log[a.0 as usize]) % order.max(1)) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by square-and-multiply; `0^0 = 1`.
    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^i)`.
    pub fn frobenius(&self, a: Fe, i: u32) -> Fe {
        (0..i % self.m).fold(a, |x, _| self.pow(x, self.p as u64))
    }

    /// True when the degree is even, so the field is GF(q²) over GF(q).
    pub fn is_quadratic(&self) -> bool {
        self.base.is_some()
    }

    fn base(&self) -> Result<&BaseSubfield> {
        self.base.as_ref().ok_or(Error::NotQuadratic {
            p: self.p,
            m: self.m,
        })
    }

    /// Size `q` of the base field when this context is GF(q²).
    pub fn base_order(&self) -> Result<u32> {
        Ok(self.base()?.q)
    }

    /// Sorted elements of the base field GF(q) inside GF(q²).
    pub fn base_subfield(&self) -> Result<&[Fe]> {
        Ok(&self.base()?.elements)
    }

    /// The conjugation `a -> a^q` of GF(q²).
    pub fn conj(&self, a: Fe) -> Result<Fe> {
        let degree = self.base()?.degree;
        Ok(self.frobenius(a, degree))
    }

    /// Conjugation for callers that already checked [`Self::is_quadratic`].
    pub(crate) fn conj_unchecked(&self, a: Fe) -> Fe {
        match &self.base {
            Some(base) if a.0 != 0 => {
                let order = (self.q - 1) as u64;
                let i = self.log[a.0 as usize] as u64 * base.q as u64 % order;
                Fe(self.exp[i as usize])
            }
            _ => a,
        }
    }

    pub fn in_base_subfield(&self, a: Fe) -> Result<bool> {
        Ok(self.conj(a)? == a)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        if a.0 == 0 || self.p == 2 {
            return true;
        }
        self.pow(a, ((self.q - 1) / 2) as u64) == Fe::ONE
    }

    /// A square root of `a`, or `None` for a non-residue.
    ///
    /// In characteristic 2 the root is unique. Otherwise the smaller of the
    /// two roots (by encoding) is returned.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if self.p == 2 {
            return Some(self.pow(a, (self.q / 2) as u64));
        }
        if !self.is_square(a) {
            return None;
        }
        if a.0 == 0 {
            return Some(Fe::ZERO);
        }
        if self.q % 4 == 3 {
            let r = self.pow(a, ((self.q + 1) / 4) as u64);
            return Some(r.min(self.neg(r)));
        }
        self.elements().find(|&x| self.mul(x, x) == a)
    }

    /// All `t` in GF(q²) with `t^(q+1) = c`, sorted by encoding.
    ///
    /// There is exactly one root for `c = 0` and `q + 1` roots otherwise.
    pub fn solve_norm(&self, c: Fe) -> Result<Vec<Fe>> {
        if !self.in_base_subfield(c)? {
            return Err(Error::NotInBaseSubfield);
        }
        if self.q as u64 <= NORM_BRUTE_FORCE_LIMIT {
            self.solve_norm_brute(c)
        } else {
            self.solve_norm_by_log(c)
        }
    }

    /// Norm roots by scanning every element.
    pub fn solve_norm_brute(&self, c: Fe) -> Result<Vec<Fe>> {
        let e = self.base()?.q as u64 + 1;
        Ok(self.elements().filter(|&t| self.pow(t, e) == c).collect())
    }

    /// Norm roots through the discrete log of `c` to base `g^(q+1)`.
    pub fn solve_norm_by_log(&self, c: Fe) -> Result<Vec<Fe>> {
        let sub_q = self.base()?.q;
        if !self.in_base_subfield(c)? {
            return Err(Error::NotInBaseSubfield);
        }
        if c.is_zero() {
            return Ok(vec![Fe::ZERO]);
        }
        // c = g^L with (q+1) | L; t = g^j solves it iff j = L/(q+1) mod (q-1).
        let order = self.q - 1;
        let first = self.log[c.0 as usize] / (sub_q + 1);
        let mut roots = (0..=sub_q)
            .map(|i| Fe(self.exp[((first + i * (sub_q - 1)) % order) as usize]))
            .collect::<Vec<_>>();
        roots.sort();
        Ok(roots)
    }

    fn check_diag_quadratic(&self, coeffs: [Fe; 3]) -> Result<()> {
        if self.p == 2 {
            return Err(Error::Unsupported(
                "a + b s^2 + c t^2 = 0 is solved by square roots in characteristic 2".into(),
            ));
        }
        if coeffs.iter().any(|x| x.is_zero()) {
            return Err(Error::Unsupported(
                "a + b s^2 + c t^2 = 0 needs nonzero coefficients".into(),
            ));
        }
        Ok(())
    }

    /// Solves `a + b s² + c t² = 0` in odd characteristic.
    ///
    /// The values `a + b s²` and `-c t²` each take `(q+1)/2` distinct values,
    /// so the two sets meet. The returned pair has the smallest `s`, then the
    /// smallest `t`.
    pub fn solve_diag_quadratic(&self, a: Fe, b: Fe, c: Fe) -> Result<(Fe, Fe)> {
        self.check_diag_quadratic([a, b, c])?;
        let mut right: HashMap<Fe, Fe> = HashMap::with_capacity(self.q as usize / 2 + 1);
        for t in self.elements() {
            let v = self.neg(self.mul(c, self.mul(t, t)));
            right.entry(v).or_insert(t);
        }
        for s in self.elements() {
            let v = self.add(a, self.mul(b, self.mul(s, s)));
            if let Some(&t) = right.get(&v) {
                return Ok((s, t));
            }
        }
        unreachable!("value sets of size (q+1)/2 always intersect")
    }

    /// Every `(s, t)` with `a + b s² + c t² = 0`, ordered by `s` then `t`.
    pub fn diag_quadratic_solutions(&self, a: Fe, b: Fe, c: Fe) -> Result<Vec<(Fe, Fe)>> {
        self.check_diag_quadratic([a, b, c])?;
        let mut right: HashMap<Fe, Vec<Fe>> = HashMap::new();
        for t in self.elements() {
            let v = self.neg(self.mul(c, self.mul(t, t)));
            right.entry(v).or_default().push(t);
        }
        let mut out = Vec::new();
        for s in self.elements() {
            let v = self.add(a, self.mul(b, self.mul(s, s)));
            if let Some(ts) = right.get(&v) {
                out.extend(ts.iter().map(|&t| (s, t)));
            }
        }
        Ok(out)
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `(p, m)` with `q = p^m`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let (mut m, mut r) = (0, q);
    while r > 1 {
        r /= p;
        m += 1;
    }
    Some((p, m))
}

fn digits(mut value: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(value % p);
        value /= p;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `f` modulo the monic polynomial `g`, coefficients low first.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let dg = g.len() - 1;
    let mut r = f.to_vec();
    while r.len() > dg {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let base = r.len() - dg;
            for (j, &gj) in g[..dg].iter().enumerate() {
                r[base + j] = (r[base + j] + (p - gj) * lead) % p;
            }
        }
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    for d in 1..=m / 2 {
        for enc in 0..p.pow(d as u32) {
            let mut g = digits(enc, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn canonical_modulus(p: u32, m: u32) -> Vec<u32> {
    (0..p.pow(m))
        .map(|enc| digits(enc, p, m as usize))
        .find(|c| {
            let mut f = c.clone();
            f.push(1);
            is_irreducible(&f, p)
        })
        .expect("an irreducible polynomial exists in every degree")
}

/// Table-free residue arithmetic used while the tables are being built.
struct RawField<'a> {
    p: u32,
    m: u32,
    modulus: &'a [u32],
}

impl RawField<'_> {
    fn mul(&self, a: u32, b: u32) -> u32 {
        let (p, m) = (self.p, self.m as usize);
        let (x, y) = (digits(a, p, m), digits(b, p, m));
        let mut prod = vec![0u32; 2 * m - 1];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % p;
            }
        }
        let mut f = self.modulus.to_vec();
        f.push(1);
        encode(&poly_rem(&prod, &f, p), p)
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn find_generator(raw: &RawField<'_>, q: u32) -> u32 {
    let order = (q - 1) as u64;
    let factors = prime_factors(order);
    (1..q)
        .find(|&g| factors.iter().all(|&r| raw.pow(g, order / r) != 1))
        .expect("the multiplicative group of a finite field is cyclic")
}
