//! Polynomial reconstruction from noisy point sets: the Guruswami-Sudan
//! list decoder (Koetter's incremental interpolation followed by
//! Roth-Ruckenstein Y-root extraction), the decoding threshold, and a
//! brute-force subset decoder used as an oracle and timing unit.

use std::collections::HashSet;

use crate::galois::FieldContext;
use crate::polyring::{lagrange_interpolate, secret_hash, Polynomial};
use crate::{Error, Result};

/// Caller-facing decoder configuration.
#[derive(Debug, Clone, Copy)]
pub struct DecodeParams {
    /// Secret length: candidates have degree < k.
    pub k: usize,
    /// Upper bound on the interpolation multiplicity.
    pub mu_max: usize,
}

impl DecodeParams {
    pub fn new(k: usize, mu_max: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::BadDecodeParams("k must be at least 1".into()));
        }
        if mu_max < 1 {
            return Err(Error::BadDecodeParams("mu_max must be at least 1".into()));
        }
        Ok(DecodeParams { k, mu_max })
    }
}

/// Multiplicity and weighted-degree bound chosen for one decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GsParameters {
    pub mu: usize,
    pub l: usize,
    /// True when no multiplicity <= mu_max guarantees recovery at the
    /// decoding threshold; the returned pair is then the best achievable.
    pub degraded: bool,
}

/// Result of a list decode.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    /// Deduplicated candidate polynomials, each of degree < k.
    pub candidates: Vec<Polynomial>,
    pub mu_used: usize,
    pub l_used: usize,
    pub degraded: bool,
}

/// Smallest overlap that guarantees Guruswami-Sudan recovery: the least
/// integer w with w^2 > u*(k-1), never below 1.
pub fn omega_threshold(u: usize, k: usize) -> usize {
    let target = u as u64 * (k as u64 - 1);
    let mut w = (target as f64).sqrt() as u64;
    while w * w <= target {
        w += 1;
    }
    while w > 1 && (w - 1) * (w - 1) > target {
        w -= 1;
    }
    w.max(1) as usize
}

/// Number of monomials X^a Y^b with (1,k-1)-weighted degree a + b(k-1) <= l.
/// Requires k >= 2.
pub fn monomial_count(l: u64, k: usize) -> u64 {
    let w = (k - 1) as u64;
    let b_max = l / w;
    // sum over b of (l - b*w + 1)
    (b_max + 1) * (l + 1) - w * b_max * (b_max + 1) / 2
}

/// Smallest l such that the monomial count strictly exceeds `constraints`.
fn minimal_l(constraints: u64, k: usize) -> u64 {
    let (mut lo, mut hi) = (0u64, constraints + 1);
    // monomial_count(l) >= l + 1, so hi is always sufficient
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if monomial_count(mid, k) > constraints {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Picks the smallest multiplicity (and its minimal weighted-degree bound)
/// that guarantees recovery of every polynomial agreeing with at least
/// `omega_threshold(u, k)` of the u points. When the cap binds, returns the
/// achievable pair with the lowest effective radius and sets `degraded`.
pub fn select_gs_parameters(u: usize, params: &DecodeParams) -> Result<GsParameters> {
    let k = params.k;
    if u < k {
        return Err(Error::TooFewPoints { points: u, k });
    }
    if k == 1 {
        // degree-0 candidates: any single point determines one, w_t = 1
        return Ok(GsParameters { mu: 1, l: 0, degraded: false });
    }
    let omega_t = omega_threshold(u, k) as u64;
    let mut best: Option<GsParameters> = None;
    let mut best_radius = u64::MAX;
    for mu in 1..=params.mu_max {
        let constraints = u as u64 * mu as u64 * (mu as u64 + 1) / 2;
        let l = minimal_l(constraints, k);
        let radius = l / mu as u64;
        if radius < omega_t {
            return Ok(GsParameters { mu, l: l as usize, degraded: false });
        }
        if radius < best_radius {
            best_radius = radius;
            best = Some(GsParameters { mu, l: l as usize, degraded: true });
        }
    }
    Ok(best.expect("mu_max >= 1 yields at least one pair"))
}

/// A bivariate polynomial stored as X-coefficient rows per Y-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    /// layers[b][a] = coefficient of X^a Y^b.
    layers: Vec<Vec<u16>>,
}

impl BivariatePoly {
    pub fn from_layers(layers: Vec<Vec<u16>>) -> Self {
        let mut p = BivariatePoly { layers };
        p.trim();
        p
    }

    pub fn layers(&self) -> &[Vec<u16>] {
        &self.layers
    }

    pub fn coeff(&self, x_deg: usize, y_deg: usize) -> u16 {
        self.layers
            .get(y_deg)
            .and_then(|row| row.get(x_deg))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(|row| row.iter().all(|&c| c == 0))
    }

    fn trim(&mut self) {
        for row in &mut self.layers {
            while row.last() == Some(&0) {
                row.pop();
            }
        }
        while self.layers.last().is_some_and(|row| row.is_empty()) {
            self.layers.pop();
        }
    }

    /// Max of a + b(k-1) over nonzero coefficients; None when zero.
    pub fn weighted_degree(&self, k: usize) -> Option<usize> {
        let w = k - 1;
        self.layers
            .iter()
            .enumerate()
            .filter_map(|(b, row)| {
                row.iter()
                    .rposition(|&c| c != 0)
                    .map(|a| a + b * w)
            })
            .max()
    }

    /// Q(X, c) as a univariate polynomial in X.
    pub fn eval_y_const(&self, ctx: &FieldContext, c: u16) -> Polynomial {
        let width = self.layers.iter().map(Vec::len).max().unwrap_or(0);
        let mut acc = vec![0u16; width];
        let mut power = 1u16;
        for row in &self.layers {
            if power != 0 {
                for (a, &q) in row.iter().enumerate() {
                    acc[a] ^= ctx.mul_raw(q, power);
                }
            }
            power = ctx.mul_raw(power, c);
        }
        Polynomial::from_raw(acc)
    }

    /// Full composition Q(X, f(X)); used for soundness checks.
    pub fn compose(&self, ctx: &FieldContext, f: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        let mut power = Polynomial::one();
        for row in &self.layers {
            let term = Polynomial::from_raw(row.clone()).mul(ctx, &power);
            acc = acc.add(&term);
            power = power.mul(ctx, f);
        }
        acc
    }
}

/// Binomial coefficient parity via Lucas' theorem.
#[inline]
fn binom_odd(n: usize, k: usize) -> bool {
    n & k == k
}

/// Hasse derivative coefficient D_{a,b} Q (x, y): the coefficient of
/// X^a Y^b in Q(X + x, Y + y).
fn hasse_at(ctx: &FieldContext, layers: &[Vec<u16>], a: usize, b: usize, x: u16, y: u16) -> u16 {
    let mut outer = 0u16;
    for j in (b..layers.len()).rev() {
        outer = ctx.mul_raw(outer, y);
        if !binom_odd(j, b) {
            continue;
        }
        let row = &layers[j];
        if row.len() <= a {
            continue;
        }
        let mut inner = 0u16;
        for i in (a..row.len()).rev() {
            inner = ctx.mul_raw(inner, x);
            if binom_odd(i, a) {
                inner ^= row[i];
            }
        }
        outer ^= inner;
    }
    outer
}

/// Koetter's incremental interpolation: returns a nonzero Q of
/// (1,k-1)-weighted degree at most l vanishing with multiplicity >= mu at
/// every point.
pub fn koetter_interpolate(
    ctx: &FieldContext,
    points: &[(u16, u16)],
    k: usize,
    mu: usize,
    l: usize,
) -> Result<BivariatePoly> {
    if k < 2 {
        return Err(Error::BadDecodeParams("koetter interpolation requires k >= 2".into()));
    }
    check_distinct_x(points)?;
    let u = points.len() as u64;
    let constraints = u * mu as u64 * (mu as u64 + 1) / 2;
    let monomials = monomial_count(l as u64, k);
    if monomials <= constraints {
        return Err(Error::InfeasibleParams { monomials, constraints });
    }
    let weight = k - 1;
    let l_y = l / weight;

    // G_j keeps a leading term of Y-degree exactly j throughout; orders are
    // compared as (weighted degree, y-degree).
    let mut polys: Vec<Vec<Vec<u16>>> = (0..=l_y)
        .map(|j| {
            let mut layers = vec![Vec::new(); j + 1];
            layers[j] = vec![1u16];
            layers
        })
        .collect();
    let mut lead_x: Vec<usize> = vec![0; l_y + 1];

    let order_key = |j: usize, lead_x: &[usize]| (lead_x[j] + j * weight, j);

    for &(x, y) in points {
        for b in 0..mu {
            for a in 0..mu - b {
                let mut pivot: Option<usize> = None;
                let mut discrepancies = vec![0u16; polys.len()];
                for j in 0..polys.len() {
                    let d = hasse_at(ctx, &polys[j], a, b, x, y);
                    discrepancies[j] = d;
                    if d != 0 {
                        let better = match pivot {
                            None => true,
                            Some(p) => order_key(j, &lead_x) < order_key(p, &lead_x),
                        };
                        if better {
                            pivot = Some(j);
                        }
                    }
                }
                let Some(p) = pivot else { continue };
                let dp = discrepancies[p];
                let pivot_poly = std::mem::take(&mut polys[p]);
                for j in 0..polys.len() {
                    if j == p || discrepancies[j] == 0 {
                        continue;
                    }
                    let c = ctx.div_raw(discrepancies[j], dp);
                    add_scaled(ctx, &mut polys[j], &pivot_poly, c);
                }
                polys[p] = pivot_poly;
                mul_by_x_plus(ctx, &mut polys[p], x);
                lead_x[p] += 1;
            }
        }
    }

    let best = (0..polys.len())
        .min_by_key(|&j| order_key(j, &lead_x))
        .expect("at least one candidate");
    Ok(BivariatePoly::from_layers(polys[best].clone()))
}

fn add_scaled(ctx: &FieldContext, target: &mut Vec<Vec<u16>>, source: &[Vec<u16>], c: u16) {
    if target.len() < source.len() {
        target.resize(source.len(), Vec::new());
    }
    for (trow, srow) in target.iter_mut().zip(source.iter()) {
        if trow.len() < srow.len() {
            trow.resize(srow.len(), 0);
        }
        for (t, &s) in trow.iter_mut().zip(srow.iter()) {
            *t ^= ctx.mul_raw(s, c);
        }
    }
}

/// Multiplies every layer by (X + x).
fn mul_by_x_plus(ctx: &FieldContext, poly: &mut [Vec<u16>], x: u16) {
    for row in poly.iter_mut() {
        row.push(0);
        for i in (1..row.len()).rev() {
            row[i] = row[i - 1] ^ ctx.mul_raw(row[i], x);
        }
        row[0] = ctx.mul_raw(row[0], x);
    }
}

fn check_distinct_x(points: &[(u16, u16)]) -> Result<()> {
    let mut seen = HashSet::with_capacity(points.len());
    for &(x, _) in points {
        if !seen.insert(x) {
            return Err(Error::DuplicateAbscissa);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Univariate root finding over GF(2^w)
// ---------------------------------------------------------------------------

fn poly_divrem(ctx: &FieldContext, a: &Polynomial, b: &Polynomial) -> (Polynomial, Polynomial) {
    let db = b.degree().expect("division by zero polynomial");
    let lead_inv = ctx.inv_raw(*b.coeffs().last().unwrap());
    let mut rem: Vec<u16> = a.coeffs().to_vec();
    let mut quot = vec![0u16; a.coeffs().len().saturating_sub(db)];
    while rem.len() > db {
        let shift = rem.len() - 1 - db;
        let factor = ctx.mul_raw(*rem.last().unwrap(), lead_inv);
        if factor != 0 {
            quot[shift] = factor;
            for (i, &bc) in b.coeffs().iter().enumerate() {
                rem[shift + i] ^= ctx.mul_raw(bc, factor);
            }
        }
        rem.pop();
    }
    (Polynomial::from_raw(quot), Polynomial::from_raw(rem))
}

fn poly_gcd(ctx: &FieldContext, a: &Polynomial, b: &Polynomial) -> Polynomial {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = poly_divrem(ctx, &a, &b);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.coeffs().last() {
        if lead != 1 {
            return a.scale(ctx, ctx.inv_raw(lead));
        }
    }
    a
}

fn poly_sq_mod(ctx: &FieldContext, p: &Polynomial, m: &Polynomial) -> Polynomial {
    let sq = p.mul(ctx, p);
    poly_divrem(ctx, &sq, m).1
}

/// All roots in the field of a nonzero univariate polynomial, ascending.
pub fn univariate_roots(ctx: &FieldContext, f: &Polynomial) -> Vec<u16> {
    let mut roots = Vec::new();
    if f.is_zero() || f.degree() == Some(0) {
        return roots;
    }
    // factor out X^v; 0 is a root once stripped
    let mut coeffs = f.coeffs().to_vec();
    let v = coeffs.iter().position(|&c| c != 0).unwrap();
    if v > 0 {
        roots.push(0);
        coeffs.drain(0..v);
    }
    let mut g = Polynomial::from_raw(coeffs);
    if let Some(&lead) = g.coeffs().last() {
        if lead != 1 {
            g = g.scale(ctx, ctx.inv_raw(lead));
        }
    }
    if g.degree() == Some(0) {
        roots.sort_unstable();
        return roots;
    }
    // product of the distinct linear factors: gcd(g, X^(2^w) - X)
    let linear_part = if g.degree() == Some(1) {
        g.clone()
    } else {
        let mut h = Polynomial::from_raw(vec![0, 1]); // X
        for _ in 0..ctx.width() {
            h = poly_sq_mod(ctx, &h, &g);
        }
        let h_minus_x = h.add(&Polynomial::from_raw(vec![0, 1]));
        poly_gcd(ctx, &g, &h_minus_x)
    };
    split_linear_product(ctx, &linear_part, &mut roots);
    roots.sort_unstable();
    roots
}

/// Collects the roots of a monic product of distinct linear factors by
/// deterministic trace-map splitting.
fn split_linear_product(ctx: &FieldContext, g: &Polynomial, roots: &mut Vec<u16>) {
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            roots.push(g.coeff(0)); // monic X + c has root c in char 2
            return;
        }
        _ => {}
    }
    for beta in 1..ctx.order() as u64 {
        // trace polynomial sum_{i<w} (beta X)^(2^i) mod g
        let bx = Polynomial::from_raw(vec![0, beta as u16]);
        let mut term = poly_divrem(ctx, &bx, g).1;
        let mut acc = term.clone();
        for _ in 1..ctx.width() {
            term = poly_sq_mod(ctx, &term, g);
            acc = acc.add(&term);
        }
        let h = poly_gcd(ctx, g, &acc);
        let dh = h.degree().unwrap_or(0);
        if dh > 0 && dh < g.degree().unwrap() {
            let (quot, _) = poly_divrem(ctx, g, &h);
            split_linear_product(ctx, &h, roots);
            split_linear_product(ctx, &quot, roots);
            return;
        }
    }
    unreachable!("distinct roots are separated by some trace map")
}

// ---------------------------------------------------------------------------
// Roth-Ruckenstein Y-root extraction
// ---------------------------------------------------------------------------

/// All polynomials f of degree < k with Q(X, f(X)) identically zero,
/// found by depth-first coefficient recovery.
pub fn rr_roots(ctx: &FieldContext, q: &BivariatePoly, k: usize) -> Vec<Polynomial> {
    let mut found: Vec<Vec<u16>> = Vec::new();
    if !q.is_zero() && k >= 1 {
        let mut prefix = Vec::with_capacity(k);
        rr_dfs(ctx, q.layers().to_vec(), k, &mut prefix, &mut found);
    }
    let mut out: Vec<Polynomial> = found.into_iter().map(Polynomial::from_raw).collect();
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    out.dedup();
    out
}

fn rr_dfs(
    ctx: &FieldContext,
    mut layers: Vec<Vec<u16>>,
    k: usize,
    prefix: &mut Vec<u16>,
    found: &mut Vec<Vec<u16>>,
) {
    strip_common_x(&mut layers);
    // constant-in-X slice: R(Y) = sum_b layers[b][0] Y^b (nonzero after strip)
    let r = Polynomial::from_raw(layers.iter().map(|row| row.first().copied().unwrap_or(0)).collect());
    for gamma in univariate_roots(ctx, &r) {
        prefix.push(gamma);
        let q = BivariatePoly::from_layers(layers.clone());
        if q.eval_y_const(ctx, gamma).is_zero() {
            found.push(prefix.clone());
        }
        if prefix.len() < k {
            rr_dfs(ctx, substitute_shift(ctx, &layers, gamma), k, prefix, found);
        }
        prefix.pop();
    }
}

/// Divides out the largest common power of X.
fn strip_common_x(layers: &mut [Vec<u16>]) {
    let v = layers
        .iter()
        .filter(|row| row.iter().any(|&c| c != 0))
        .map(|row| row.iter().position(|&c| c != 0).unwrap())
        .min()
        .unwrap_or(0);
    if v > 0 {
        for row in layers.iter_mut() {
            if row.len() >= v {
                row.drain(0..v);
            } else {
                row.clear();
            }
        }
    }
}

/// Q(X, X*Y + gamma): layer j of the result is
/// X^j * sum_{b >= j, C(b,j) odd} gamma^(b-j) Q_b(X).
fn substitute_shift(ctx: &FieldContext, layers: &[Vec<u16>], gamma: u16) -> Vec<Vec<u16>> {
    let n = layers.len();
    let mut out: Vec<Vec<u16>> = Vec::with_capacity(n);
    // powers of gamma up to n
    let mut powers = Vec::with_capacity(n);
    let mut p = 1u16;
    for _ in 0..n {
        powers.push(p);
        p = ctx.mul_raw(p, gamma);
    }
    for j in 0..n {
        let width = layers[j..]
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        let mut row = vec![0u16; width + j];
        for (b, layer) in layers.iter().enumerate().skip(j) {
            if !binom_odd(b, j) {
                continue;
            }
            let scale = powers[b - j];
            if scale == 0 {
                continue;
            }
            for (a, &c) in layer.iter().enumerate() {
                row[a + j] ^= ctx.mul_raw(c, scale);
            }
        }
        out.push(row);
    }
    out
}

// ---------------------------------------------------------------------------
// Top-level decoders
// ---------------------------------------------------------------------------

/// Guruswami-Sudan list decoding: every polynomial of degree < k agreeing
/// with at least `omega_threshold(u, k)` points is in the candidate list
/// whenever the parameter selection achieved the guarantee.
pub fn gs_decode(
    ctx: &FieldContext,
    points: &[(u16, u16)],
    params: &DecodeParams,
) -> Result<DecodeOutcome> {
    check_distinct_x(points)?;
    if points.len() < params.k {
        return Err(Error::TooFewPoints { points: points.len(), k: params.k });
    }
    if params.k == 1 {
        // constants: every y value present is a candidate
        let mut values: Vec<u16> = points.iter().map(|&(_, y)| y).collect();
        values.sort_unstable();
        values.dedup();
        let candidates = values
            .into_iter()
            .map(|y| Polynomial::from_raw(vec![y]))
            .collect();
        return Ok(DecodeOutcome { candidates, mu_used: 1, l_used: 0, degraded: false });
    }
    let gs = select_gs_parameters(points.len(), params)?;
    let q = koetter_interpolate(ctx, points, params.k, gs.mu, gs.l)?;
    let candidates = rr_roots(ctx, &q, params.k);
    Ok(DecodeOutcome {
        candidates,
        mu_used: gs.mu,
        l_used: gs.l,
        degraded: gs.degraded,
    })
}

/// Iterates k-subsets of the points in lexicographic index order,
/// Lagrange-interpolates each, and returns the first polynomial whose
/// canonical hash matches `target_hash`, giving up after `max_iterations`
/// subsets. Serves as a test oracle and as the unit of the runtime ratio t.
pub fn bruteforce_decode(
    ctx: &FieldContext,
    points: &[(u16, u16)],
    k: usize,
    target_hash: &[u8; 32],
    max_iterations: u64,
) -> Result<Option<Polynomial>> {
    check_distinct_x(points)?;
    let u = points.len();
    if u < k {
        return Err(Error::TooFewPoints { points: u, k });
    }
    let mut iterations = 0u64;
    let mut indices: Vec<usize> = (0..k).collect();
    let mut subset = Vec::with_capacity(k);
    loop {
        if iterations >= max_iterations {
            return Ok(None);
        }
        iterations += 1;
        subset.clear();
        subset.extend(indices.iter().map(|&i| points[i]));
        let candidate = lagrange_interpolate(ctx, &subset)?;
        if candidate.coeffs().len() <= k && secret_hash(&candidate, k)? == *target_hash {
            return Ok(Some(candidate));
        }
        if !advance_combination(&mut indices, u) {
            return Ok(None);
        }
    }
}

/// Advances a k-combination over [0, u) in lexicographic order; false at end.
fn advance_combination(indices: &mut [usize], u: usize) -> bool {
    let k = indices.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if indices[i] != i + u - k {
            indices[i] += 1;
            for j in i + 1..k {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
