//! Arithmetic in small finite fields GF(p^e).
//!
//! Elements are polynomials over GF(p) of degree < e, reduced modulo a fixed
//! monic irreducible polynomial. Internally every element also has a dense
//! index `Σ cᵢ·pⁱ` in `0..p^e`; the geometry constructions work on indices
//! and go through the cached tables, while [`FieldElement`] is the checked
//! public surface.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order accepted by [`FieldSpec::new`].
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

/// Fields up to this order get precomputed addition/multiplication tables.
const TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{e} exceeds {MAX_FIELD_ORDER}")]
    TooLarge { p: u32, e: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("field is not tagged as a quadratic extension")]
    NotQuadraticExtension,
    #[error("coefficient vector does not describe an element of GF({order})")]
    BadCoefficients { order: u32 },
}

/// Returns true if `n` is prime (trial division; `n` is small here).
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Decomposes `q = p^f` with `p` prime and `f ≥ 1`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut f = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        f += 1;
    }
    (rest == 1).then_some((p, f))
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    inv: Vec<u16>,
}

struct FieldInner {
    p: u32,
    e: u32,
    order: u32,
    irreducible: Vec<u32>,
    base_order: Option<u32>,
    tables: Option<Tables>,
}

/// A finite field GF(p^e) together with its defining polynomial.
///
/// Cloning is cheap; clones share the same arithmetic tables. Two specs are
/// equal when they describe the same field representation (same `p`, `e`,
/// polynomial and quadratic-extension tag).
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldInner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.e == other.inner.e
                && self.inner.irreducible == other.inner.irreducible
                && self.inner.base_order == other.inner.base_order)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("e", &self.inner.e)
            .field("irreducible", &self.inner.irreducible)
            .field("base_order", &self.inner.base_order)
            .finish()
    }
}

impl FieldSpec {
    /// Builds GF(p^e) using the lexicographically least monic irreducible
    /// polynomial of degree `e` (coefficients compared from `x^{e-1}` down
    /// to the constant term).
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        Self::build(p, e, None)
    }

    /// Builds GF(q²) tagged as a quadratic extension of GF(q), so that
    /// [`FieldElement::conjugate`] is available.
    pub fn quadratic_extension(q: u32) -> Result<Self, FieldError> {
        let (p, f) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::build(p, 2 * f, Some(q))
    }

    /// The field of order `q`, for any prime power `q`.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, f) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, f)
    }

    fn build(p: u32, e: u32, base_order: Option<u32>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::CompositeCharacteristic(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = p
            .checked_pow(e)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or(FieldError::TooLarge { p, e })?;
        let irreducible = least_irreducible(p, e);
        let mut inner = FieldInner {
            p,
            e,
            order,
            irreducible,
            base_order,
            tables: None,
        };
        if order <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldSpec {
            inner: Arc::new(inner),
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    pub fn order(&self) -> u32 {
        self.inner.order
    }

    /// Monic defining polynomial, little-endian, length `e + 1`.
    pub fn irreducible(&self) -> &[u32] {
        &self.inner.irreducible
    }

    /// `Some(q)` when this spec was built as GF(q²) over GF(q).
    pub fn base_order(&self) -> Option<u32> {
        self.inner.base_order
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The element with dense index `index` (panics if out of range).
    pub fn element(&self, index: u32) -> FieldElement {
        assert!(index < self.order(), "element index out of range");
        FieldElement {
            coeffs: self.coeffs_of(index),
            spec: self.clone(),
        }
    }

    /// Element from a little-endian coefficient vector of length `e`.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.inner.e as usize || coeffs.iter().any(|&c| c >= self.inner.p) {
            return Err(FieldError::BadCoefficients {
                order: self.order(),
            });
        }
        Ok(FieldElement {
            coeffs: coeffs.to_vec(),
            spec: self.clone(),
        })
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    fn coeffs_of(&self, mut index: u32) -> Vec<u32> {
        let p = self.inner.p;
        (0..self.inner.e)
            .map(|_| {
                let c = index % p;
                index /= p;
                c
            })
            .collect()
    }

    fn index_of(&self, coeffs: &[u32]) -> u32 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.inner.p + c)
    }

    // Index-level arithmetic. All arguments must be `< order()`.

    pub fn add_idx(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.add[(a * self.order() + b) as usize] as u32,
            None => add_raw(&self.inner, a, b),
        }
    }

    pub fn neg_idx(&self, a: u32) -> u32 {
        let p = self.inner.p;
        let c: Vec<u32> = self.coeffs_of(a).into_iter().map(|c| (p - c) % p).collect();
        self.index_of(&c)
    }

    pub fn sub_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.neg_idx(b))
    }

    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.mul[(a * self.order() + b) as usize] as u32,
            None => mul_raw(&self.inner, a, b),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv_idx(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        match &self.inner.tables {
            Some(t) => Some(t.inv[a as usize] as u32),
            // a^(order-2) = a^-1 in the multiplicative group
            None => Some(self.pow_idx(a, (self.order() - 2) as u64)),
        }
    }

    pub fn pow_idx(&self, a: u32, mut n: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_idx(acc, base);
            }
            base = self.mul_idx(base, base);
            n >>= 1;
        }
        acc
    }

    /// `a^q` for a quadratic extension GF(q²).
    pub fn conjugate_idx(&self, a: u32) -> Result<u32, FieldError> {
        let q = self.base_order().ok_or(FieldError::NotQuadraticExtension)?;
        Ok(self.pow_idx(a, q as u64))
    }
}

fn add_raw(f: &FieldInner, mut a: u32, mut b: u32) -> u32 {
    let p = f.p;
    let mut out = 0;
    let mut scale = 1;
    for _ in 0..f.e {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

fn digits(f: &FieldInner, mut a: u32) -> Vec<u32> {
    (0..f.e)
        .map(|_| {
            let c = a % f.p;
            a /= f.p;
            c
        })
        .collect()
}

fn mul_raw(f: &FieldInner, a: u32, b: u32) -> u32 {
    let p = f.p as u64;
    let e = f.e as usize;
    let da = digits(f, a);
    let db = digits(f, b);
    let mut prod = vec![0u64; 2 * e - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    // reduce modulo the monic irreducible, top degree first
    for deg in (e..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        for (k, &m) in f.irreducible.iter().enumerate().take(e) {
            let idx = deg - e + k;
            prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
        }
        prod[deg] = 0;
    }
    prod[..e].iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}

fn build_tables(f: &FieldInner) -> Tables {
    let n = f.order as usize;
    let mut add = vec![0u16; n * n];
    let mut mul = vec![0u16; n * n];
    let mut inv = vec![0u16; n];
    for a in 0..n {
        for b in 0..n {
            add[a * n + b] = add_raw(f, a as u32, b as u32) as u16;
            let m = mul_raw(f, a as u32, b as u32);
            mul[a * n + b] = m as u16;
            if m == 1 {
                inv[a] = b as u16;
            }
        }
    }
    Tables { add, mul, inv }
}

/// Remainder of `num` modulo monic `den` over GF(p) (little-endian vectors).
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if top != 0 {
            for (k, &c) in den.iter().enumerate() {
                r[shift + k] = (r[shift + k] + (p - top) * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn monic_of_degree(p: u32, d: u32, n: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(d as usize + 1);
    let mut rest = n;
    for _ in 0..d {
        v.push(rest % p);
        rest /= p;
    }
    v.push(1);
    v
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let e = (poly.len() - 1) as u32;
    if e <= 1 {
        return true;
    }
    for d in 1..=e / 2 {
        for n in 0..p.pow(d) {
            let factor = monic_of_degree(p, d, n);
            if poly_rem(poly, &factor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    (0..p.pow(e))
        .map(|n| monic_of_degree(p, e, n))
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Binary and unary operations accepted by [`FieldElement::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
    Pow(u64),
}

/// An element of a [`FieldSpec`], stored in canonical reduced form.
#[derive(Clone)]
pub struct FieldElement {
    coeffs: Vec<u32>,
    spec: FieldSpec,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})[{:?}]", self.spec.order(), self.coeffs)
    }
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Little-endian polynomial coefficients.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn index(&self) -> u32 {
        self.spec.index_of(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn wrap(&self, index: u32) -> FieldElement {
        self.spec.element(index)
    }

    fn same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.add_idx(self.index(), other.index())))
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.sub_idx(self.index(), other.index())))
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.spec.mul_idx(self.index(), other.index())))
    }

    pub fn negated(&self) -> FieldElement {
        self.wrap(self.spec.neg_idx(self.index()))
    }

    pub fn inverse(&self) -> Result<FieldElement, FieldError> {
        self.spec
            .inv_idx(self.index())
            .map(|i| self.wrap(i))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn pow(&self, n: u64) -> FieldElement {
        self.wrap(self.spec.pow_idx(self.index(), n))
    }

    /// `a^q` in GF(q²); requires a spec built by
    /// [`FieldSpec::quadratic_extension`].
    pub fn conjugate(&self) -> Result<FieldElement, FieldError> {
        self.spec.conjugate_idx(self.index()).map(|i| self.wrap(i))
    }

    /// `a · conjugate(a)`, which lies in the subfield GF(q).
    pub fn norm(&self) -> Result<FieldElement, FieldError> {
        let c = self.conjugate()?;
        self.checked_mul(&c)
    }

    /// Applies `op`; `rhs` is ignored by unary operations.
    pub fn apply(&self, op: FieldOp, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        match op {
            FieldOp::Add => self.checked_add(rhs),
            FieldOp::Sub => self.checked_sub(rhs),
            FieldOp::Mul => self.checked_mul(rhs),
            FieldOp::Neg => Ok(self.negated()),
            FieldOp::Inv => self.inverse(),
            FieldOp::Pow(n) => Ok(self.pow(n)),
        }
    }
}
