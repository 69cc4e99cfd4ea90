//! One-dimension-at-a-time expansion of self-orthogonal codes.
//!
//! Every routine follows the same outline. Extend a basis of `C` to a basis
//! of its dual, which adds vectors `b_1, b_2, ...` that are independent
//! modulo `C`. Look for an isotropic vector in their span, i.e. one with
//! `<v, v> = 0`. Then `span(C, v)` is self-orthogonal of dimension `k + 1`.
//! The cross terms `<c, v>` vanish because `v` lies in the dual.
//!
//! * Hermitian (`n > 2k+1`): use any isotropic `b_i`. Otherwise orthogonalize
//!   `b_1, b_2` into `g_1, g_2` and solve the norm equation
//!   `t^(q+1) = -<g_2,g_2>/<g_1,g_1>`; the vector is `t g_1 + g_2`.
//! * Euclidean, odd `p` (`n >= 2k+3`): use an isotropic `b_i`, `g_2` or
//!   `g_3`. Otherwise solve `<g_1,g_1> + s^2 <g_2,g_2> + t^2 <g_3,g_3> = 0`;
//!   the vector is `g_1 + s g_2 + t g_3`.
//! * Euclidean, `p = 2` (`n >= 2k+2`): the vector is `g_1 + s g_2` with
//!   `s^2 = <g_1,g_1>/<g_2,g_2>`.
//! * Euclidean, odd `p`, `n = 2k+2`: a self-dual superset exists iff
//!   `-<g_1,g_1><g_2,g_2>` is a square.
//!
//! Without a seed every choice is deterministic: basis extension is greedy
//! and solvers return their smallest-encoding root. With a seed the basis
//! extension draws random combinations and solver roots are picked at random.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::{checked_count, Budget, LinearCode};
use crate::error::{Error, Result};
use crate::gf::{prime_power, Fe, Field};
use crate::linalg::{
    axpy, check_form, dot, extend_basis, extend_basis_seeded, gram_schmidt, inner, InnerForm,
    VecF,
};

/// Which case of the construction produced the new vector.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// A basis-extension vector was already isotropic.
    DirectBeta,
    /// The second orthogonalized vector was isotropic.
    GsGamma2Null,
    /// The third orthogonalized vector was isotropic (odd `p`, Euclidean).
    GsGamma3Null,
    NormSolve,
    DiagQuadratic,
    Char2Sqrt,
    BoundarySquare,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::DirectBeta => "direct-beta",
            Branch::GsGamma2Null => "gs-gamma2-null",
            Branch::GsGamma3Null => "gs-gamma3-null",
            Branch::NormSolve => "norm-solve",
            Branch::DiagQuadratic => "diag-quadratic",
            Branch::Char2Sqrt => "char2-sqrt",
            Branch::BoundarySquare => "boundary-square",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named pass/fail fact recomputed from a result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, pass: bool) -> Self {
        Check { name, pass }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// One expansion step `C -> C' = span(C, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionReport {
    pub input: LinearCode,
    pub output: LinearCode,
    pub form: InnerForm,
    pub branch: Branch,
    pub new_vector: VecF,
    /// `[t]` for the norm equation, `[s, t]` for the diagonal quadratic,
    /// `[s]` for the square-root branches, empty otherwise.
    pub solver_witness: Vec<Fe>,
}

impl ExpansionReport {
    /// Recomputes the step invariants from `input`, `output` and `new_vector`.
    pub fn checks(&self) -> Result<Vec<Check>> {
        let dual = self.input.dual(self.form)?;
        let v = &self.new_vector;
        Ok(vec![
            Check::new("dimension", self.output.k() == self.input.k() + 1),
            Check::new("subcode", self.input.is_subcode_of(&self.output)?),
            Check::new("self-orthogonal", self.output.is_self_orthogonal(self.form)?),
            Check::new("vector-in-dual", dual.contains(v)?),
            Check::new("vector-outside-input", !self.input.contains(v)?),
            Check::new("vector-isotropic", inner(v, v, self.form)?.is_zero()),
            Check::new("vector-in-output", self.output.contains(v)?),
        ])
    }

    pub fn verified(&self) -> Result<bool> {
        Ok(all_pass(&self.checks()?))
    }
}

/// Outcome of the odd-characteristic `n = 2k+2` case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryVerdict {
    pub expandable: bool,
    /// `-det` of the Gram matrix of the two basis-extension vectors, which
    /// equals `-<g_1,g_1><g_2,g_2>` after orthogonalization.
    pub square_class_witness: Fe,
    pub result: Option<LinearCode>,
    pub step: Option<ExpansionReport>,
}

/// A chain `C_0 ⊆ C_1 ⊆ ... ⊆ C_r` of self-orthogonal codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub start: LinearCode,
    pub steps: Vec<ExpansionReport>,
    pub terminal: LinearCode,
    pub form: InnerForm,
    /// `n - 2k` of the start code.
    pub l: usize,
    pub r_steps: usize,
    /// The boundary attempt, when one was made.
    pub boundary: Option<BoundaryVerdict>,
}

impl Tower {
    pub fn checks(&self) -> Result<Vec<Check>> {
        let mut chain = true;
        let mut prev = &self.start;
        for step in &self.steps {
            chain &= step.input == *prev && step.verified()?;
            prev = &step.output;
        }
        let expected = terminal_dimension(self.start.ctx(), self.start.n(), self.form)
            .max(self.start.k());
        let boundary_gain = usize::from(self.boundary.as_ref().is_some_and(|b| b.expandable));
        Ok(vec![
            Check::new("chain", chain && *prev == self.terminal),
            Check::new("r-steps", self.r_steps == self.steps.len()),
            Check::new(
                "terminal-dimension",
                self.terminal.k() == expected + boundary_gain,
            ),
            Check::new(
                "terminal-self-orthogonal",
                self.terminal.is_self_orthogonal(self.form)?,
            ),
        ])
    }
}

/// Dimension at which the unconditional expansion stops for length `n`.
///
/// Hermitian: `floor(n/2)`. Euclidean: `(n-1)/2` for odd `n`, `n/2` for even
/// `n` in characteristic 2, `n/2 - 1` for even `n` in odd characteristic.
pub fn terminal_dimension(ctx: &Field, n: usize, form: InnerForm) -> usize {
    match form {
        InnerForm::Hermitian => n / 2,
        InnerForm::Euclidean if n % 2 == 1 => (n - 1) / 2,
        InnerForm::Euclidean if ctx.characteristic() == 2 => n / 2,
        InnerForm::Euclidean => n / 2 - 1,
    }
}

/// Whether the one-step theorem applies to an `[n, k]` code.
pub fn can_expand(ctx: &Field, n: usize, k: usize, form: InnerForm) -> bool {
    match form {
        InnerForm::Hermitian => n > 2 * k + 1,
        InnerForm::Euclidean if ctx.characteristic() == 2 => n >= 2 * k + 2,
        InnerForm::Euclidean => n >= 2 * k + 3,
    }
}

fn require_self_orthogonal(c: &LinearCode, form: InnerForm) -> Result<()> {
    if !c.is_self_orthogonal(form)? {
        return Err(Error::hypothesis(format!(
            "input {c} is not {form} self-orthogonal"
        )));
    }
    Ok(())
}

fn rng_from(seed: Option<u64>) -> Option<ChaCha8Rng> {
    seed.map(ChaCha8Rng::seed_from_u64)
}

/// Vectors completing a basis of `c` to a basis of its dual.
fn beta_block(
    c: &LinearCode,
    form: InnerForm,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<Vec<VecF>> {
    let dual = c.dual(form)?;
    let block = match rng {
        Some(rng) => extend_basis_seeded(c.generator(), dual.generator(), rng)?,
        None => extend_basis(c.generator(), dual.generator())?,
    };
    Ok(block.row_vecs())
}

fn self_product(v: &VecF, form: InnerForm) -> Fe {
    dot(v.ctx(), v.entries(), v.entries(), form)
}

fn pick<T: Copy>(options: &[T], rng: Option<&mut ChaCha8Rng>) -> T {
    match rng {
        Some(rng) => *options.choose(rng).expect("nonempty solution set"),
        None => options[0],
    }
}

fn finish(
    c: &LinearCode,
    form: InnerForm,
    branch: Branch,
    v: VecF,
    solver_witness: Vec<Fe>,
) -> Result<ExpansionReport> {
    debug_assert!(self_product(&v, form).is_zero());
    let output = c.span_with(&v)?;
    debug_assert_eq!(output.k(), c.k() + 1);
    Ok(ExpansionReport {
        input: c.clone(),
        output,
        form,
        branch,
        new_vector: v,
        solver_witness,
    })
}

/// Expands a Hermitian self-orthogonal `[n, k]` code over GF(q²) with
/// `n > 2k+1` to an `[n, k+1]` Hermitian self-orthogonal code containing it.
pub fn expand_hermitian(c: &LinearCode, seed: Option<u64>) -> Result<ExpansionReport> {
    let form = InnerForm::Hermitian;
    let f = c.ctx().clone();
    check_form(&f, form)?;
    require_self_orthogonal(c, form)?;
    let (n, k) = (c.n(), c.k());
    if !can_expand(&f, n, k, form) {
        return Err(Error::hypothesis(format!(
            "hermitian expansion requires n > 2k+1 (got n={n}, k={k}): \
             a self-orthogonal [{n},{}] code would need 2(k+1) <= n",
            k + 1
        )));
    }
    let mut rng = rng_from(seed);
    let betas = beta_block(c, form, rng.as_mut())?;
    if let Some(b) = betas.iter().find(|b| self_product(b, form).is_zero()) {
        return finish(c, form, Branch::DirectBeta, b.clone(), vec![]);
    }

    let gammas = gram_schmidt(&betas[..2], form, &[])?;
    let (g1, g2) = (&gammas[0], &gammas[1]);
    let rhs = f.neg(f.div(self_product(g2, form), self_product(g1, form))?);
    let roots = f.solve_norm(rhs)?;
    let t0 = pick(&roots, rng.as_mut());
    let v = g1.scale(t0).add(g2)?;
    finish(c, form, Branch::NormSolve, v, vec![t0])
}

/// Expands a Euclidean self-orthogonal `[n, k]` code to an `[n, k+1]` one,
/// for `n >= 2k+3` in odd characteristic and `n >= 2k+2` in characteristic 2.
pub fn expand_euclidean(c: &LinearCode, seed: Option<u64>) -> Result<ExpansionReport> {
    let form = InnerForm::Euclidean;
    let f = c.ctx().clone();
    require_self_orthogonal(c, form)?;
    let (n, k) = (c.n(), c.k());
    if !can_expand(&f, n, k, form) {
        let msg = if f.characteristic() == 2 {
            format!("euclidean expansion in characteristic 2 requires n >= 2k+2 (got n={n}, k={k})")
        } else if n == 2 * k + 2 {
            format!(
                "euclidean expansion in odd characteristic requires n >= 2k+3 (got n={n}, k={k}); \
                 the case n = 2k+2 is decided by the boundary test"
            )
        } else {
            format!("euclidean expansion in odd characteristic requires n >= 2k+3 (got n={n}, k={k})")
        };
        return Err(Error::hypothesis(msg));
    }
    let mut rng = rng_from(seed);
    let betas = beta_block(c, form, rng.as_mut())?;
    if let Some(b) = betas.iter().find(|b| self_product(b, form).is_zero()) {
        return finish(c, form, Branch::DirectBeta, b.clone(), vec![]);
    }

    let gammas = gram_schmidt(&betas[..2], form, &[])?;
    let (g1, g2) = (&gammas[0], &gammas[1]);
    let (n1, n2) = (self_product(g1, form), self_product(g2, form));
    if n2.is_zero() {
        return finish(c, form, Branch::GsGamma2Null, g2.clone(), vec![]);
    }

    if f.characteristic() == 2 {
        let s0 = f.sqrt(f.div(n1, n2)?).expect("every element is a square in characteristic 2");
        let v = g1.axpy(s0, g2)?;
        return finish(c, form, Branch::Char2Sqrt, v, vec![s0]);
    }

    let gammas = gram_schmidt(&betas[..3], form, &[])?;
    let g3 = &gammas[2];
    let n3 = self_product(g3, form);
    if n3.is_zero() {
        return finish(c, form, Branch::GsGamma3Null, g3.clone(), vec![]);
    }
    let (s0, t0) = match rng.as_mut() {
        Some(rng) => pick(&f.diag_quadratic_solutions(n1, n2, n3)?, Some(rng)),
        None => f.solve_diag_quadratic(n1, n2, n3)?,
    };
    let v = g1.axpy(s0, g2)?.axpy(t0, g3)?;
    finish(c, form, Branch::DiagQuadratic, v, vec![s0, t0])
}

/// Decides whether a Euclidean self-orthogonal `[2k+2, k]` code in odd
/// characteristic lies in a self-dual code, and builds one when it does.
pub fn try_expand_boundary(c: &LinearCode, seed: Option<u64>) -> Result<BoundaryVerdict> {
    let form = InnerForm::Euclidean;
    let f = c.ctx().clone();
    if f.characteristic() == 2 {
        return Err(Error::hypothesis(
            "the boundary test applies to odd characteristic; in characteristic 2 \
             n = 2k+2 is covered by ordinary expansion",
        ));
    }
    let (n, k) = (c.n(), c.k());
    if n != 2 * k + 2 {
        return Err(Error::hypothesis(format!(
            "the boundary test requires n = 2k+2 (got n={n}, k={k})"
        )));
    }
    require_self_orthogonal(c, form)?;
    let mut rng = rng_from(seed);
    let betas = beta_block(c, form, rng.as_mut())?;
    let (b1, b2) = (&betas[0], &betas[1]);
    let cross = dot(&f, b1.entries(), b2.entries(), form);
    let det = f.sub(
        f.mul(self_product(b1, form), self_product(b2, form)),
        f.mul(cross, cross),
    );
    let witness = f.neg(det);

    let step = if let Some(b) = betas.iter().find(|b| self_product(b, form).is_zero()) {
        Some(finish(c, form, Branch::DirectBeta, b.clone(), vec![])?)
    } else {
        let gammas = gram_schmidt(&betas, form, &[])?;
        let (g1, g2) = (&gammas[0], &gammas[1]);
        let (n1, n2) = (self_product(g1, form), self_product(g2, form));
        if n2.is_zero() {
            Some(finish(c, form, Branch::GsGamma2Null, g2.clone(), vec![])?)
        } else {
            match f.sqrt(f.neg(f.div(n1, n2)?)) {
                Some(root) => {
                    let s0 = pick(&[root, f.neg(root)], rng.as_mut());
                    let v = g1.axpy(s0, g2)?;
                    Some(finish(c, form, Branch::BoundarySquare, v, vec![s0])?)
                }
                None => None,
            }
        }
    };
    debug_assert_eq!(step.is_some(), f.is_square(witness));
    Ok(BoundaryVerdict {
        expandable: step.is_some(),
        square_class_witness: witness,
        result: step.as_ref().map(|s| s.output.clone()),
        step,
    })
}

/// Repeats the one-step expansion until its hypothesis fails.
///
/// With `attempt_boundary`, a Euclidean tower in odd characteristic that
/// stops at `n = 2k+2` also runs [`try_expand_boundary`], recording the
/// verdict whether or not it succeeds.
pub fn tower(
    c: &LinearCode,
    form: InnerForm,
    seed: Option<u64>,
    attempt_boundary: bool,
) -> Result<Tower> {
    let f = c.ctx().clone();
    check_form(&f, form)?;
    require_self_orthogonal(c, form)?;
    let mut master = rng_from(seed);
    let mut next_seed = || master.as_mut().map(|r| r.gen::<u64>());

    let mut steps: Vec<ExpansionReport> = Vec::new();
    let mut current = c.clone();
    while can_expand(&f, current.n(), current.k(), form) {
        let step = match form {
            InnerForm::Hermitian => expand_hermitian(&current, next_seed())?,
            InnerForm::Euclidean => expand_euclidean(&current, next_seed())?,
        };
        current = step.output.clone();
        steps.push(step);
    }

    let mut boundary = None;
    let at_boundary = form == InnerForm::Euclidean
        && f.characteristic() != 2
        && current.n() == 2 * current.k() + 2;
    if attempt_boundary && at_boundary {
        let verdict = try_expand_boundary(&current, next_seed())?;
        if let Some(step) = &verdict.step {
            current = step.output.clone();
            steps.push(step.clone());
        }
        boundary = Some(verdict);
    }

    Ok(Tower {
        start: c.clone(),
        r_steps: steps.len(),
        steps,
        terminal: current,
        form,
        l: c.n() - 2 * c.k(),
        boundary,
    })
}

/// All `[n, k+1]` self-orthogonal codes containing `c`, sorted by
/// [`LinearCode::canonical_key`].
///
/// Isotropy is constant on cosets `v + C` for `v` in the dual, so it is
/// enough to scan one representative per line of the quotient `dual / C`.
pub fn enumerate_expansions(
    c: &LinearCode,
    form: InnerForm,
    budget: &Budget,
) -> Result<Vec<LinearCode>> {
    let f = c.ctx().clone();
    check_form(&f, form)?;
    require_self_orthogonal(c, form)?;
    let betas = beta_block(c, form, None)?;
    let d = betas.len();
    let q = f.order();
    checked_count(q, d, budget.oracle_cap)?;

    let betas: Vec<Vec<Fe>> = betas.iter().map(|b| b.entries().to_vec()).collect();
    let scan = |worker: u64, workers: u64| -> Result<Vec<LinearCode>> {
        let mut found = Vec::new();
        // Lines of the quotient: the first nonzero coordinate is 1.
        for lead in 0..d {
            let tail = d - lead - 1;
            let count = (q as u64).pow(tail as u32);
            for idx in (worker..count).step_by(workers as usize) {
                let mut v = betas[lead].clone();
                let mut rest = idx;
                for b in &betas[lead + 1..] {
                    let x = Fe((rest % q as u64) as u32);
                    rest /= q as u64;
                    if !x.is_zero() {
                        v = axpy(&f, &v, x, b);
                    }
                }
                if dot(&f, &v, &v, form).is_zero() {
                    found.push(c.span_with(&VecF::new(&f, v)?)?);
                }
            }
        }
        Ok(found)
    };

    let workers = budget.threads.max(1) as u64;
    let mut all = if workers == 1 {
        scan(0, 1)?
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| scope.spawn(move || scan(w, workers)))
                .collect();
            let mut all = Vec::new();
            for h in handles {
                all.extend(h.join().expect("enumeration worker panicked")?);
            }
            Ok::<_, Error>(all)
        })?
    };
    let mut seen = BTreeSet::new();
    all.retain(|code| seen.insert(code.canonical_key()));
    all.sort_by_key(|code| code.canonical_key());
    Ok(all)
}

/// An expansion of `c` with the largest minimum distance among all of them,
/// found by exhaustive search. Ties go to the smallest canonical generator.
pub fn best_expansion(
    c: &LinearCode,
    form: InnerForm,
    budget: &Budget,
) -> Result<(LinearCode, usize)> {
    let candidates = enumerate_expansions(c, form, budget)?;
    let mut best: Option<(LinearCode, usize)> = None;
    for code in candidates {
        let d = code.min_distance_with(budget)?;
        if best.as_ref().is_none_or(|(_, bd)| d > *bd) {
            best = Some((code, d));
        }
    }
    best.ok_or_else(|| {
        Error::NoExpansion(format!(
            "no {form} self-orthogonal [{},{}] code contains the input",
            c.n(),
            c.k() + 1
        ))
    })
}

/// True when no self-dual `[2k+2, k+1]` code over GF(q) exists at all, which
/// happens for `q = 3 (mod 4)` and even `k`: a systematic generator
/// `[I | P]` would need `P P^T = -I`, so `-1 = det(P)^2`.
pub fn selfdual_obstruction(q: u64, k: usize) -> Result<bool> {
    let Some((p, _)) = prime_power(q) else {
        return Err(Error::hypothesis(format!("{q} is not a prime power")));
    };
    if p == 2 {
        return Err(Error::hypothesis(
            "the obstruction concerns odd q; no claim is made in characteristic 2",
        ));
    }
    Ok(q % 4 == 3 && k.is_multiple_of(2))
}

/// The `[4, 2]` code spanned by `a` and `(-a3, -a4, a1, a2)` for an isotropic
/// `a` with `a1 a2 != 0`.
///
/// The two rows are always orthogonal and isotropic, but when `-1` is a
/// square they can be proportional: `(-a3, -a4, a1, a2) = λ a` with
/// `λ² = -1` whenever `(a3, a4) = -λ (a1, a2)`. That input is rejected.
pub fn remark_quad_expand(a: &VecF) -> Result<LinearCode> {
    let f = a.ctx().clone();
    if a.len() != 4 {
        return Err(Error::LengthMismatch(4, a.len()));
    }
    if !self_product(a, InnerForm::Euclidean).is_zero() {
        return Err(Error::hypothesis(format!("{a} is not self-orthogonal")));
    }
    let x = a.entries();
    if x[0].is_zero() || x[1].is_zero() {
        return Err(Error::hypothesis(format!("{a} needs a1 a2 != 0")));
    }
    let partner = VecF::new(&f, vec![f.neg(x[2]), f.neg(x[3]), x[0], x[1]])?;
    let code = LinearCode::new(&crate::linalg::MatF::from_vecs(&f, 4, &[a.clone(), partner])?)?;
    if code.k() != 2 {
        return Err(Error::hypothesis(format!(
            "(-a3,-a4,a1,a2) is a multiple of {a}; the construction only spans a line"
        )));
    }
    Ok(code)
}

/// A self-orthogonal `[n, k]` code reached from the zero code by `k` seeded
/// expansion steps.
///
/// Reproducible per seed, but not uniformly distributed over all
/// self-orthogonal codes.
pub fn random_self_orthogonal(
    ctx: &Field,
    n: usize,
    k: usize,
    form: InnerForm,
    seed: u64,
) -> Result<LinearCode> {
    check_form(ctx, form)?;
    if k > 0 && !can_expand(ctx, n, k - 1, form) {
        return Err(Error::hypothesis(format!(
            "a {form} self-orthogonal [{n},{k}] code over GF({}) is not reachable by expansion steps",
            ctx.name()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut code = LinearCode::zero(ctx, n)?;
    for _ in 0..k {
        let step_seed = Some(rng.gen::<u64>());
        code = match form {
            InnerForm::Hermitian => expand_hermitian(&code, step_seed)?,
            InnerForm::Euclidean => expand_euclidean(&code, step_seed)?,
        }
        .output;
    }
    Ok(code)
}
