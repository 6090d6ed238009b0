//! Exact arithmetic in the cyclotomic field Q(zeta_N).
//!
//! A scalar is a dense coefficient vector of length N over arbitrary-precision
//! rationals, interpreted as a polynomial in zeta_N and kept reduced modulo
//! the N-th cyclotomic polynomial. Degrees at or above deg Phi_N always carry
//! coefficient zero, so equality of scalars is equality of vectors.
//!
//! All values are immutable; operations are pure functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Euler totient, desk scale.
pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut d: Vec<u64> = (1..=n).filter(|k| n.is_multiple_of(*k)).collect();
    d.sort_unstable();
    d
}

// Dense polynomial helpers over Q. Vectors store coefficients by ascending
// degree, with no trailing-zero guarantee unless noted.

fn poly_trim(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            out[i + j] += ca * cb;
        }
    }
    out
}

/// In-place remainder of `p` modulo the monic polynomial `m`.
fn poly_rem(p: &mut Vec<Rat>, m: &[Rat]) {
    let dm = m.len() - 1;
    debug_assert!(m[dm].is_one(), "modulus must be monic");
    poly_trim(p);
    while p.len() > dm {
        let lead = p.last().unwrap().clone();
        let shift = p.len() - 1 - dm;
        if !lead.is_zero() {
            for (k, mk) in m.iter().enumerate() {
                if !mk.is_zero() {
                    let delta = &lead * mk;
                    p[shift + k] -= delta;
                }
            }
        }
        p.pop();
        poly_trim(p);
    }
}

/// Exact division, panics if not divisible. Used only for building Phi_N.
fn poly_div_exact(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
    let mut rem: Vec<Rat> = num.to_vec();
    poly_trim(&mut rem);
    let dd = den.len() - 1;
    assert!(!den[dd].is_zero());
    let mut quot = vec![Rat::zero(); rem.len().saturating_sub(dd)];
    while rem.len() > dd || (rem.len() == dd + 1 && !rem[dd].is_zero()) {
        if rem.iter().all(|c| c.is_zero()) {
            break;
        }
        let dr = rem.len() - 1;
        if dr < dd {
            break;
        }
        let c = &rem[dr] / &den[dd];
        quot[dr - dd] = c.clone();
        for (k, dk) in den.iter().enumerate() {
            let delta = &c * dk;
            rem[dr - dd + k] -= delta;
        }
        poly_trim(&mut rem);
        if rem.len() == 1 && rem[0].is_zero() {
            break;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact division");
    quot
}

/// Extended Euclid on polynomials: returns (g, u) with u*a = g mod m and
/// g the (nonzero, not necessarily monic) gcd of a and m.
fn poly_half_egcd(a: &[Rat], m: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0: Vec<Rat> = m.to_vec();
    let mut r1: Vec<Rat> = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut u0 = vec![Rat::zero()];
    let mut u1 = vec![Rat::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        // divide r0 by r1
        let mut q = vec![Rat::zero(); r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        let d1 = r1.len() - 1;
        while rem.len() > d1 || (rem.len() == d1 + 1 && !rem[d1].is_zero()) {
            poly_trim(&mut rem);
            if rem.len() < r1.len() || (rem.len() == 1 && rem[0].is_zero()) {
                break;
            }
            let dr = rem.len() - 1;
            let c = &rem[dr] / &r1[d1];
            q[dr - d1] = q[dr - d1].clone() + c.clone();
            for (k, rk) in r1.iter().enumerate() {
                let delta = &c * rk;
                rem[dr - d1 + k] -= delta;
            }
            poly_trim(&mut rem);
            if rem.len() == 1 && rem[0].is_zero() {
                break;
            }
        }
        let u2_sub = poly_mul(&q, &u1);
        let mut u2 = u0.clone();
        u2.resize(u2.len().max(u2_sub.len()), Rat::zero());
        for (k, c) in u2_sub.iter().enumerate() {
            u2[k] -= c;
        }
        poly_trim(&mut u2);
        r0 = r1;
        r1 = rem;
        poly_trim(&mut r1);
        u0 = u1;
        u1 = u2;
    }
    (r0, u0)
}

/// The N-th cyclotomic polynomial, monic with rational (in fact integer)
/// coefficients, cached process-wide.
pub fn cyclotomic_poly(n: u32) -> Vec<Rat> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Rat>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = compute_cyclotomic(n);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

fn compute_cyclotomic(n: u32) -> Vec<Rat> {
    assert!(n >= 1);
    if n == 1 {
        return vec![-Rat::one(), Rat::one()]; // x - 1
    }
    // x^n - 1 divided by the product of Phi_d over proper divisors d.
    let mut num = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    let mut den = vec![Rat::one()];
    for d in 1..n {
        if n.is_multiple_of(d) {
            den = poly_mul(&den, &cyclotomic_poly(d));
        }
    }
    poly_div_exact(&num, &den)
}

/// An element of Q(zeta_N) in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    conductor: u32,
    coeffs: Vec<Rat>,
}

impl CycloScalar {
    fn reduced(conductor: u32, mut coeffs: Vec<Rat>) -> Self {
        let phi = cyclotomic_poly(conductor);
        poly_rem(&mut coeffs, &phi);
        coeffs.resize(conductor as usize, Rat::zero());
        CycloScalar { conductor, coeffs }
    }

    pub fn zero(conductor: u32) -> Self {
        CycloScalar {
            conductor,
            coeffs: vec![Rat::zero(); conductor as usize],
        }
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_rational(conductor, Rat::one())
    }

    pub fn from_rational(conductor: u32, r: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); conductor as usize];
        coeffs[0] = r;
        // degree 0 is always below deg Phi_N, no reduction needed
        CycloScalar { conductor, coeffs }
    }

    pub fn from_int(conductor: u32, n: i64) -> Self {
        Self::from_rational(conductor, rat(n))
    }

    /// zeta_N^e, exponent taken modulo N.
    pub fn zeta_pow(conductor: u32, e: i64) -> Self {
        let n = conductor as i64;
        let k = e.rem_euclid(n) as usize;
        let mut coeffs = vec![Rat::zero(); conductor as usize];
        coeffs[k] = Rat::one();
        Self::reduced(conductor, coeffs)
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        if self.is_rational() {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn assert_same_conductor(&self, other: &Self) {
        assert_eq!(
            self.conductor, other.conductor,
            "conductor mismatch in scalar arithmetic; embed first"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_conductor(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycloScalar {
            conductor: self.conductor,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_conductor(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycloScalar {
            conductor: self.conductor,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        CycloScalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_conductor(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.conductor);
        }
        Self::reduced(self.conductor, poly_mul(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CycloScalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidScalar("division by zero".into()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.conductor, r.recip()));
        }
        let phi = cyclotomic_poly(self.conductor);
        let (g, u) = poly_half_egcd(&self.coeffs, &phi);
        // Phi_N is irreducible over Q, so the gcd is a nonzero constant.
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip();
        let inv: Vec<Rat> = u.iter().map(|c| c * &ginv).collect();
        Ok(Self::reduced(self.conductor, inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Checked arithmetic used by the public surface; returns
    /// [`Error::ConductorMismatch`] instead of panicking.
    pub fn checked_binop(&self, other: &Self, op: ScalarOp) -> Result<Self> {
        if self.conductor != other.conductor {
            return Err(Error::ConductorMismatch(self.conductor, other.conductor));
        }
        match op {
            ScalarOp::Add => Ok(self.add(other)),
            ScalarOp::Mul => Ok(self.mul(other)),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = CycloScalar::one(self.conductor);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Canonical embedding into Q(zeta_M), zeta_N -> zeta_M^{M/N}.
    pub fn embed(&self, m: u32) -> Result<Self> {
        if !m.is_multiple_of(self.conductor) {
            return Err(Error::ConductorMismatch(self.conductor, m));
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        let step = (m / self.conductor) as usize;
        let mut coeffs = vec![Rat::zero(); (m as usize - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[k * step] = c.clone();
            }
        }
        Ok(Self::reduced(m, coeffs))
    }

    /// Express this scalar in the subfield Q(zeta_M) for M dividing N,
    /// if possible. Round-trips with [`CycloScalar::embed`].
    pub fn restrict(&self, m: u32) -> Result<Self> {
        if !self.conductor.is_multiple_of(m) {
            return Err(Error::ConductorMismatch(self.conductor, m));
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        // Solve embed(y) = self for y by rational elimination on the
        // embedding images of the canonical basis of Q(zeta_M).
        let phi_m = euler_phi(m) as usize;
        let n = self.conductor as usize;
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(phi_m);
        for k in 0..phi_m {
            let mut basis = vec![Rat::zero(); m as usize];
            basis[k] = Rat::one();
            let b = CycloScalar {
                conductor: m,
                coeffs: basis,
            };
            cols.push(b.embed(self.conductor)?.coeffs);
        }
        // Augmented system: n equations, phi_m unknowns.
        let mut aug: Vec<Vec<Rat>> = (0..n)
            .map(|row| {
                let mut r: Vec<Rat> = cols.iter().map(|c| c[row].clone()).collect();
                r.push(self.coeffs[row].clone());
                r
            })
            .collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; phi_m];
        let mut rank = 0usize;
        for col in 0..phi_m {
            let Some(pr) = (rank..n).find(|&r| !aug[r][col].is_zero()) else {
                continue;
            };
            aug.swap(rank, pr);
            let inv = aug[rank][col].recip();
            for c in col..=phi_m {
                aug[rank][c] = &aug[rank][c] * &inv;
            }
            for r in 0..n {
                if r != rank && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in col..=phi_m {
                        let delta = &f * &aug[rank][c];
                        aug[r][c] -= delta;
                    }
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
        }
        for row in aug.iter().skip(rank) {
            if !row[phi_m].is_zero() {
                return Err(Error::InvalidScalar(format!(
                    "scalar does not lie in Q(zeta_{m})"
                )));
            }
        }
        let mut y = vec![Rat::zero(); m as usize];
        for (col, piv) in pivot_of_col.iter().enumerate() {
            if let Some(r) = piv {
                y[col] = aug[*r][phi_m].clone();
            }
        }
        Ok(CycloScalar {
            conductor: m,
            coeffs: y,
        })
    }

    /// Least n >= 1 with self^n = 1, or None when the scalar is not a root
    /// of unity. Roots of unity in Q(zeta_N) all have order dividing
    /// lcm(2, N), so a divisor sweep is exhaustive.
    pub fn multiplicative_order(&self) -> Result<Option<u64>> {
        if self.is_zero() {
            return Err(Error::InvalidScalar(
                "zero has no multiplicative order".into(),
            ));
        }
        if let Some(r) = self.as_rational() {
            if r.is_one() {
                return Ok(Some(1));
            }
            if (-r).is_one() {
                return Ok(Some(2));
            }
            return Ok(None);
        }
        let bound = (2 * self.conductor as u64) / num_integer::gcd(2, self.conductor as u64);
        for d in divisors(bound) {
            if self.pow(d as i64)?.is_one() {
                return Ok(Some(d));
            }
        }
        Ok(None)
    }

    /// Canonical text form, e.g. "1/2 + -1/2*z^3". Conductor not included.
    pub fn to_poly_string(&self) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coef = if c.denom().is_one() {
                format!("{}", c.numer())
            } else {
                format!("{}/{}", c.numer(), c.denom())
            };
            let term = match k {
                0 => coef,
                1 => format!("{coef}*z"),
                _ => format!("{coef}*z^{k}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Parse the text form against a given conductor. Accepts "-" joins,
    /// bare "z^k" terms and integer or p/q coefficients.
    pub fn parse_poly(s: &str, conductor: u32) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::ParseError("empty scalar string".into()));
        }
        // Split into signed terms at top-level '+' and '-'.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut at_term_start = true;
        for ch in compact.chars() {
            match ch {
                '+' if !at_term_start => {
                    terms.push((neg, cur.clone()));
                    cur.clear();
                    neg = false;
                    at_term_start = true;
                }
                '-' if !at_term_start => {
                    terms.push((neg, cur.clone()));
                    cur.clear();
                    neg = true;
                    at_term_start = true;
                }
                '-' if at_term_start => {
                    neg = !neg;
                }
                '+' if at_term_start => {}
                _ => {
                    cur.push(ch);
                    at_term_start = false;
                }
            }
        }
        if cur.is_empty() {
            return Err(Error::ParseError(format!("dangling sign in '{s}'")));
        }
        terms.push((neg, cur));

        let mut out = CycloScalar::zero(conductor);
        for (is_neg, t) in terms {
            let (coef_str, pow): (&str, usize) = if let Some(star) = t.find('*') {
                let (c, z) = t.split_at(star);
                (c, parse_zpow(&z[1..])?)
            } else if t.starts_with('z') {
                ("1", parse_zpow(&t)?)
            } else {
                (t.as_str(), 0)
            };
            let mut coef: Rat = coef_str
                .parse()
                .map_err(|_| Error::ParseError(format!("bad coefficient '{coef_str}' in '{s}'")))?;
            if is_neg {
                coef = -coef;
            }
            if pow >= conductor as usize {
                return Err(Error::ParseError(format!(
                    "exponent {pow} exceeds conductor {conductor} in '{s}'"
                )));
            }
            let mut term = CycloScalar::zeta_pow(conductor, pow as i64);
            term = term.scale(&coef);
            out = out.add(&term);
        }
        Ok(out)
    }
}

fn parse_zpow(z: &str) -> Result<usize> {
    if z == "z" {
        return Ok(1);
    }
    let rest = z
        .strip_prefix("z^")
        .ok_or_else(|| Error::ParseError(format!("bad power term '{z}'")))?;
    rest.parse()
        .map_err(|_| Error::ParseError(format!("bad exponent in '{z}'")))
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo({}; {})", self.conductor, self.to_poly_string())
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly_string())
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ScalarOp {
    Add,
    Mul,
}

// Standalone JSON form carries the conductor; embedded contexts (Hopf data,
// characters) serialize the bare polynomial string instead.
impl Serialize for CycloScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CycloScalar", 2)?;
        st.serialize_field("conductor", &self.conductor)?;
        st.serialize_field("poly", &self.to_poly_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycloScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            conductor: u32,
            poly: String,
        }
        let r = Repr::deserialize(d)?;
        CycloScalar::parse_poly(&r.poly, r.conductor).map_err(D::Error::custom)
    }
}
