//! The quantum-linear-space construction.
//!
//! Input is a theta x theta matrix of root-of-unity exponents q_ij =
//! zeta_N^{e_ij} with q_ij q_ji = 1 off the diagonal. The ambient algebra has
//! generators x_1..x_theta and invertible grouplikes g_1..g_theta subject to
//!
//!   x_i x_j = q_ij x_j x_i,   g_i x_j = q_ij x_j g_i,   g_i g_j = g_j g_i,
//!
//! with x_i skew-primitive: Delta(x_i) = x_i (x) 1 + g_i (x) x_i. The central
//! subalgebra generated by x_i^{N_i} and g_i^{+-N_i} (N_i the order of q_ii,
//! equal to the lcm M_i of the orders in row i) has character group B^theta,
//! B = {(t, s) : t != 0} with (t, s)(t', s') = (t t', s + t s'). Each
//! character kappa cuts out a fiber algebra of dimension prod N_i^2 on the
//! PBW basis x^a g^b with exponents below N_i, via the wrap-around
//! substitutions x_i^{N_i} -> s_i and g_i^{N_i} -> t_i.
//!
//! `group_only` mode drops the x generators; fibers are then quotients of the
//! Laurent algebra of the free abelian group, of dimension prod N_i.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::hopf::{ComultTable, HopfData, MultTable};
use crate::linalg::{vec_zero, ExactMatrix, Vector};
use crate::scalar::CycloScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatumMode {
    Qls,
    GroupOnly,
}

#[derive(Serialize, Deserialize, Clone)]
struct DatumRepr {
    theta: usize,
    conductor: u32,
    exponents: Vec<Vec<i64>>,
    #[serde(default = "default_mode")]
    mode: DatumMode,
}

fn default_mode() -> DatumMode {
    DatumMode::Qls
}

/// Braiding datum: the exponent grid of a diagonal braiding whose entries
/// are roots of unity in Q(zeta_N).
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "DatumRepr", into = "DatumRepr")]
pub struct QlsDatum {
    theta: usize,
    conductor: u32,
    exponents: Vec<Vec<i64>>,
    mode: DatumMode,
    orders: Vec<u32>,
    lcm_orders: Vec<u32>,
}

impl TryFrom<DatumRepr> for QlsDatum {
    type Error = Error;
    fn try_from(r: DatumRepr) -> Result<Self> {
        QlsDatum::new(r.theta, r.conductor, r.exponents, r.mode)
    }
}

impl From<QlsDatum> for DatumRepr {
    fn from(d: QlsDatum) -> DatumRepr {
        DatumRepr {
            theta: d.theta,
            conductor: d.conductor,
            exponents: d.exponents,
            mode: d.mode,
        }
    }
}

impl QlsDatum {
    /// Shape-checks the grid and derives the orders N_i and lcms M_i.
    /// Mathematical validity is reported by [`QlsDatum::validate`], not
    /// enforced here.
    pub fn new(
        theta: usize,
        conductor: u32,
        exponents: Vec<Vec<i64>>,
        mode: DatumMode,
    ) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::InvalidDatum("conductor must be positive".into()));
        }
        if exponents.len() != theta || exponents.iter().any(|row| row.len() != theta) {
            return Err(Error::InvalidDatum(format!(
                "exponent grid must be {theta} x {theta}"
            )));
        }
        let mut orders = Vec::with_capacity(theta);
        let mut lcm_orders = Vec::with_capacity(theta);
        for i in 0..theta {
            let qii = CycloScalar::zeta_pow(conductor, exponents[i][i]);
            let ni = qii
                .multiplicative_order()?
                .expect("powers of zeta are roots of unity") as u32;
            orders.push(ni);
            let mut m = 1u64;
            for j in 0..theta {
                let qij = CycloScalar::zeta_pow(conductor, exponents[i][j]);
                let o = qij.multiplicative_order()?.unwrap();
                m = num_integer::lcm(m, o);
            }
            lcm_orders.push(m as u32);
        }
        Ok(QlsDatum {
            theta,
            conductor,
            exponents,
            mode,
            orders,
            lcm_orders,
        })
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn mode(&self) -> DatumMode {
        self.mode
    }

    pub fn is_group_only(&self) -> bool {
        self.mode == DatumMode::GroupOnly
    }

    /// The order N_i of q_ii (in `group_only` mode, the torsion order of the
    /// i-th grouplike).
    pub fn order(&self, i: usize) -> u32 {
        self.orders[i]
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn q(&self, i: usize, j: usize) -> CycloScalar {
        CycloScalar::zeta_pow(self.conductor, self.exponents[i][j])
    }

    /// Per-invariant report. The `orders_match_lcm` entry is fatal: when it
    /// fails, centrality of the distinguished subalgebra fails and no fiber
    /// may be built.
    pub fn validate(&self) -> CheckReport {
        let mut report = CheckReport::new();
        let n = self.conductor as i64;

        let mut ok = true;
        let mut detail = String::new();
        'sym: for i in 0..self.theta {
            for j in 0..self.theta {
                if i != j && (self.exponents[i][j] + self.exponents[j][i]).rem_euclid(n) != 0 {
                    ok = false;
                    detail = format!(
                        "q_{}{} * q_{}{} != 1 (exponents {} + {} mod {n})",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1,
                        self.exponents[i][j],
                        self.exponents[j][i]
                    );
                    break 'sym;
                }
            }
        }
        report.push("braiding_symmetric", ok, detail);

        let mut ok = true;
        let mut detail = String::new();
        if self.mode == DatumMode::Qls {
            for i in 0..self.theta {
                if self.orders[i] <= 1 {
                    ok = false;
                    detail = format!("order of q_{}{} must exceed 1", i + 1, i + 1);
                    break;
                }
            }
        }
        report.push("diagonal_orders", ok, detail);

        let mut ok = true;
        let mut detail = String::new();
        for i in 0..self.theta {
            if self.orders[i] != self.lcm_orders[i] {
                ok = false;
                detail = format!(
                    "N_{} = {} but lcm of row orders M_{} = {}",
                    i + 1,
                    self.orders[i],
                    i + 1,
                    self.lcm_orders[i]
                );
                break;
            }
        }
        report.push_with_evidence(
            "orders_match_lcm",
            ok,
            detail,
            json!({"orders": self.orders, "lcm_orders": self.lcm_orders}),
        );
        report
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if !report.all_passed() {
            return Err(Error::InvalidDatum(format!(
                "{:?}",
                report.failed().iter().map(|e| &e.detail).collect::<Vec<_>>()
            )));
        }
        Ok(())
    }

    pub fn fiber_dim(&self) -> usize {
        let base: usize = self.orders.iter().map(|&n| n as usize).product();
        match self.mode {
            DatumMode::Qls => base * base,
            DatumMode::GroupOnly => base,
        }
    }

    /// Fiber basis monomials in lexicographic (a_1..a_theta, b_1..b_theta)
    /// order; index 0 is the unit monomial.
    pub fn fiber_monomials(&self) -> Vec<PbwMonomial> {
        let mut out = Vec::with_capacity(self.fiber_dim());
        let radices: Vec<u32> = match self.mode {
            DatumMode::Qls => self
                .orders
                .iter()
                .chain(self.orders.iter())
                .copied()
                .collect(),
            DatumMode::GroupOnly => self.orders.to_vec(),
        };
        let mut digits = vec![0u32; radices.len()];
        loop {
            let (x, g) = match self.mode {
                DatumMode::Qls => (
                    digits[..self.theta].to_vec(),
                    digits[self.theta..].iter().map(|&d| d as i64).collect(),
                ),
                DatumMode::GroupOnly => (
                    vec![0; self.theta],
                    digits.iter().map(|&d| d as i64).collect(),
                ),
            };
            out.push(PbwMonomial { x, g });
            // increment mixed-radix counter, last digit fastest
            let mut pos = radices.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < radices[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    pub fn monomial_index(&self, m: &PbwMonomial) -> usize {
        let mut idx = 0usize;
        if self.mode == DatumMode::Qls {
            for i in 0..self.theta {
                idx = idx * self.orders[i] as usize + m.x[i] as usize;
            }
        }
        for i in 0..self.theta {
            idx = idx * self.orders[i] as usize + m.g[i] as usize;
        }
        idx
    }

    pub fn monomial_label(&self, m: &PbwMonomial) -> String {
        let mut parts = Vec::new();
        for (i, &a) in m.x.iter().enumerate() {
            if a == 1 {
                parts.push(format!("x{}", i + 1));
            } else if a > 1 {
                parts.push(format!("x{}^{}", i + 1, a));
            }
        }
        for (i, &b) in m.g.iter().enumerate() {
            if b == 1 {
                parts.push(format!("g{}", i + 1));
            } else if b != 0 {
                parts.push(format!("g{}^{}", i + 1, b));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    // ---- characters -----------------------------------------------------

    pub fn character(&self, t: Vec<CycloScalar>, s: Vec<CycloScalar>) -> Result<Character> {
        if t.len() != self.theta {
            return Err(Error::DatumMismatch(format!(
                "character t-vector has length {}, theta is {}",
                t.len(),
                self.theta
            )));
        }
        let expected_s = if self.is_group_only() { 0 } else { self.theta };
        if s.len() != expected_s {
            return Err(Error::DatumMismatch(format!(
                "character s-vector has length {}, expected {expected_s}",
                s.len()
            )));
        }
        for v in t.iter().chain(&s) {
            if v.conductor() != self.conductor {
                return Err(Error::ConductorMismatch(v.conductor(), self.conductor));
            }
        }
        if t.iter().any(|v| v.is_zero()) {
            return Err(Error::InvalidDatum(
                "character t-values must be nonzero".into(),
            ));
        }
        Ok(Character { t, s })
    }

    /// Character with rational (t, s) data, a convenience for tests and
    /// scenario files.
    pub fn character_from_ints(&self, t: &[i64], s: &[i64]) -> Result<Character> {
        let tv = t
            .iter()
            .map(|&v| CycloScalar::from_int(self.conductor, v))
            .collect();
        let sv = s
            .iter()
            .map(|&v| CycloScalar::from_int(self.conductor, v))
            .collect();
        self.character(tv, sv)
    }

    pub fn char_identity(&self) -> Character {
        let one = CycloScalar::one(self.conductor);
        let zero = CycloScalar::zero(self.conductor);
        Character {
            t: vec![one; self.theta],
            s: if self.is_group_only() {
                vec![]
            } else {
                vec![zero; self.theta]
            },
        }
    }

    /// Convolution product (t, s)(t', s') = (t t', s + t s') per factor.
    pub fn char_mul(&self, a: &Character, b: &Character) -> Result<Character> {
        self.check_char(a)?;
        self.check_char(b)?;
        let t: Vec<CycloScalar> = a.t.iter().zip(&b.t).map(|(x, y)| x.mul(y)).collect();
        let s: Vec<CycloScalar> = a
            .s
            .iter()
            .zip(&b.s)
            .zip(&a.t)
            .map(|((sa, sb), ta)| sa.add(&ta.mul(sb)))
            .collect();
        Ok(Character { t, s })
    }

    pub fn char_inv(&self, a: &Character) -> Result<Character> {
        self.check_char(a)?;
        let t: Vec<CycloScalar> = a.t.iter().map(|x| x.inv()).collect::<Result<_>>()?;
        let s: Vec<CycloScalar> = a
            .s
            .iter()
            .zip(&t)
            .map(|(sa, tinv)| tinv.mul(sa).neg())
            .collect();
        Ok(Character { t, s })
    }

    pub fn char_pow(&self, a: &Character, e: i64) -> Result<Character> {
        let base = if e < 0 { self.char_inv(a)? } else { a.clone() };
        let mut out = self.char_identity();
        for _ in 0..e.unsigned_abs() {
            out = self.char_mul(&out, &base)?;
        }
        Ok(out)
    }

    fn check_char(&self, a: &Character) -> Result<()> {
        let expected_s = if self.is_group_only() { 0 } else { self.theta };
        if a.t.len() != self.theta || a.s.len() != expected_s {
            return Err(Error::DatumMismatch(
                "character shape does not match datum".into(),
            ));
        }
        Ok(())
    }

    /// Value of a character on the distinguished subalgebra monomial
    /// x^{N c} g^{N d} (componentwise powers of the generators x_i^{N_i},
    /// g_i^{N_i}).
    pub fn char_value(&self, a: &Character, c: &[u32], d: &[i64]) -> Result<CycloScalar> {
        self.check_char(a)?;
        let mut out = CycloScalar::one(self.conductor);
        for (i, &ci) in c.iter().enumerate() {
            if ci > 0 {
                out = out.mul(&a.s[i].pow(ci as i64)?);
            }
        }
        for (i, &di) in d.iter().enumerate() {
            if di != 0 {
                out = out.mul(&a.t[i].pow(di)?);
            }
        }
        Ok(out)
    }

    pub fn character_from_json(&self, v: &Value) -> Result<Character> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::ParseError("character must be an object".into()))?;
        let parse_list = |key: &str, required: bool| -> Result<Vec<CycloScalar>> {
            match obj.get(key) {
                None if !required => Ok(vec![]),
                None => Err(Error::ParseError(format!("character missing '{key}'"))),
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|s| {
                        CycloScalar::parse_poly(
                            s.as_str().ok_or_else(|| {
                                Error::ParseError(format!("character '{key}' entries are strings"))
                            })?,
                            self.conductor,
                        )
                    })
                    .collect(),
                Some(_) => Err(Error::ParseError(format!("character '{key}' must be a list"))),
            }
        };
        let t = parse_list("t", true)?;
        let s = parse_list("s", false)?;
        self.character(t, s)
    }

    pub fn character_to_json(&self, k: &Character) -> Value {
        let t: Vec<String> = k.t.iter().map(|c| c.to_poly_string()).collect();
        if self.is_group_only() {
            json!({ "t": t })
        } else {
            json!({ "t": t, "s": k.s.iter().map(|c| c.to_poly_string()).collect::<Vec<_>>() })
        }
    }

    // ---- PBW engine ------------------------------------------------------

    /// Product of normal monomials, in the ambient algebra (`fiber` = None,
    /// exponents accumulate freely) or in the fiber at a character
    /// (wrap-around substitutions apply).
    pub fn mul_monomials(
        &self,
        fiber: Option<&Character>,
        m1: &PbwMonomial,
        m2: &PbwMonomial,
    ) -> Result<(CycloScalar, PbwMonomial)> {
        let n = self.conductor as i64;
        let mut zeta_exp: i64 = 0;
        // g-part of m1 moves right past the x-part of m2
        for i in 0..self.theta {
            if m1.g[i] == 0 {
                continue;
            }
            for j in 0..self.theta {
                let c = m2.x[j] as i64;
                if c != 0 {
                    zeta_exp = (zeta_exp + self.exponents[i][j].rem_euclid(n) * ((m1.g[i] % n + n) % n) % n * (c % n)) % n;
                }
            }
        }
        // merge x-parts: x_i^{c_i} of m2 crosses x_j^{a_j} of m1 for j > i
        for i in 0..self.theta {
            let c = m2.x[i] as i64;
            if c == 0 {
                continue;
            }
            for j in (i + 1)..self.theta {
                let a = m1.x[j] as i64;
                if a != 0 {
                    zeta_exp = (zeta_exp + self.exponents[j][i].rem_euclid(n) * (a % n) % n * (c % n)) % n;
                }
            }
        }
        let mut scalar = CycloScalar::zeta_pow(self.conductor, zeta_exp);
        let mut x: Vec<u32> = m1.x.iter().zip(&m2.x).map(|(a, c)| a + c).collect();
        let mut g: Vec<i64> = m1.g.iter().zip(&m2.g).map(|(b, d)| b + d).collect();
        if let Some(kappa) = fiber {
            self.check_char(kappa)?;
            for i in 0..self.theta {
                let ni = self.orders[i];
                while x[i] >= ni {
                    x[i] -= ni;
                    scalar = scalar.mul(&kappa.s[i]);
                    if scalar.is_zero() {
                        x = vec![0; self.theta];
                        g = vec![0; self.theta];
                        return Ok((scalar, PbwMonomial { x, g }));
                    }
                }
                let ni = ni as i64;
                let q = g[i].div_euclid(ni);
                if q != 0 {
                    scalar = scalar.mul(&kappa.t[i].pow(q)?);
                    g[i] = g[i].rem_euclid(ni);
                }
            }
        }
        Ok((scalar, PbwMonomial { x, g }))
    }

    /// Normal form of a word in the generators. Outside a fiber, the letters
    /// must respect the basis bounds on x-exponents; accumulated powers of
    /// x_i^{N_i} stay as explicit exponents (they generate the distinguished
    /// subalgebra and never rewrite to scalars).
    pub fn pbw_normalize(
        &self,
        word: &[GenPower],
        fiber: Option<&Character>,
    ) -> Result<(CycloScalar, PbwMonomial)> {
        let mut scalar = CycloScalar::one(self.conductor);
        let mut mon = self.unit_monomial();
        for letter in word {
            let lm = match *letter {
                GenPower::X(i, e) => {
                    if i >= self.theta {
                        return Err(Error::NotInBasis(format!("x{} out of range", i + 1)));
                    }
                    if self.is_group_only() {
                        return Err(Error::NotInBasis(
                            "group_only datum has no x generators".into(),
                        ));
                    }
                    if fiber.is_none() && e >= self.orders[i] {
                        return Err(Error::NotInBasis(format!(
                            "x{}^{} exceeds the basis bound {}; reduce via the x^N generator first",
                            i + 1,
                            e,
                            self.orders[i]
                        )));
                    }
                    let mut m = self.unit_monomial();
                    m.x[i] = e;
                    m
                }
                GenPower::G(i, e) => {
                    if i >= self.theta {
                        return Err(Error::NotInBasis(format!("g{} out of range", i + 1)));
                    }
                    let mut m = self.unit_monomial();
                    m.g[i] = e;
                    m
                }
            };
            let (c, next) = self.mul_monomials(fiber, &mon, &lm)?;
            scalar = scalar.mul(&c);
            mon = next;
            if scalar.is_zero() {
                return Ok((scalar, self.unit_monomial()));
            }
        }
        // outside a fiber, negative g-exponents are legal; inside they were
        // already wrapped by mul_monomials
        Ok((scalar, mon))
    }

    pub fn unit_monomial(&self) -> PbwMonomial {
        PbwMonomial {
            x: vec![0; self.theta],
            g: vec![0; self.theta],
        }
    }
}

/// One generator with an integer power. `G` powers may be negative; `X`
/// powers may not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenPower {
    X(usize, u32),
    G(usize, i64),
}

/// Normal-form monomial x^a g^b.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PbwMonomial {
    pub x: Vec<u32>,
    pub g: Vec<i64>,
}

/// A point of the character group of the distinguished central subalgebra:
/// t_i is the value on g_i^{N_i} (nonzero), s_i the value on x_i^{N_i}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    pub t: Vec<CycloScalar>,
    pub s: Vec<CycloScalar>,
}

impl Character {
    /// Canonical text key, suitable for caches.
    pub fn key(&self) -> String {
        let t: Vec<String> = self.t.iter().map(|c| c.to_poly_string()).collect();
        let s: Vec<String> = self.s.iter().map(|c| c.to_poly_string()).collect();
        format!("t=[{}];s=[{}]", t.join(","), s.join(","))
    }
}

/// A fiber algebra on the monomial basis, with the full Hopf structure
/// filled in at the identity character only.
#[derive(Clone)]
pub struct FiberHopf {
    pub kappa: Character,
    pub hopf: HopfData,
}

/// Structure constants of the fiber at `kappa`. At the identity character the
/// comultiplication, counit and antipode are filled in and the datum passes
/// the full axiom battery; construction fails otherwise.
pub fn build_fiber(d: &QlsDatum, kappa: &Character) -> Result<FiberHopf> {
    d.ensure_valid()?;
    d.check_char(kappa)?;
    let dim = d.fiber_dim();
    let mons = d.fiber_monomials();
    let mut mult: MultTable = vec![vec![vec![]; dim]; dim];
    for (i, mi) in mons.iter().enumerate() {
        for (j, mj) in mons.iter().enumerate() {
            let (c, m) = d.mul_monomials(Some(kappa), mi, mj)?;
            if !c.is_zero() {
                mult[i][j].push((d.monomial_index(&m), c));
            }
        }
    }
    let mut unit = vec_zero(dim, d.conductor());
    unit[0] = CycloScalar::one(d.conductor());
    let identity = d.char_identity();
    let at_identity = *kappa == identity;
    let (comult, counit, antipode) = if at_identity {
        let delta = delta_fiber(d, &identity, &identity)?;
        let mut comult: ComultTable = vec![vec![]; dim];
        for src in 0..dim {
            for p in 0..dim * dim {
                let c = delta.get(p, src);
                if !c.is_zero() {
                    comult[src].push((p / dim, p % dim, c.clone()));
                }
            }
        }
        let counit: Vector = mons
            .iter()
            .map(|m| {
                if m.x.iter().all(|&a| a == 0) {
                    CycloScalar::one(d.conductor())
                } else {
                    CycloScalar::zero(d.conductor())
                }
            })
            .collect();
        let s = antipode_fiber(d, &identity)?;
        (comult, counit, Some(s))
    } else {
        (
            vec![vec![]; dim],
            vec_zero(dim, d.conductor()),
            None,
        )
    };
    let hopf = HopfData {
        dim,
        conductor: d.conductor(),
        basis_labels: mons.iter().map(|m| d.monomial_label(m)).collect(),
        mult,
        unit,
        comult,
        counit,
        antipode,
    };
    if at_identity {
        let report = hopf.verify_hopf();
        if !report.all_passed() {
            return Err(Error::TheoremViolation(format!(
                "identity fiber fails axioms: {:?}",
                report.failed().iter().map(|e| &e.name).collect::<Vec<_>>()
            )));
        }
    }
    Ok(FiberHopf {
        kappa: kappa.clone(),
        hopf,
    })
}

/// The connecting comultiplication from the fiber at kappa*gamma into the
/// tensor product of the fibers at kappa and gamma, as a D^2 x D matrix.
/// Computed by expanding the coproducts of the generators and multiplying
/// inside the tensor-square algebra, each leg in its own fiber normal form.
/// The result is checked to be an algebra map on products of basis pairs.
pub fn delta_fiber(d: &QlsDatum, kappa: &Character, gamma: &Character) -> Result<ExactMatrix> {
    d.ensure_valid()?;
    d.check_char(kappa)?;
    d.check_char(gamma)?;
    let dim = d.fiber_dim();
    let mons = d.fiber_monomials();
    let mut m = ExactMatrix::zeros(dim * dim, dim, d.conductor());
    for (src, mon) in mons.iter().enumerate() {
        let acc = expand_delta(d, kappa, gamma, mon)?;
        for ((l, r), c) in acc {
            let li = d.monomial_index(&l);
            let ri = d.monomial_index(&r);
            m.set(li * dim + ri, src, c);
        }
    }
    // algebra-map guard: Delta(uv) = Delta(u) Delta(v) on basis pairs
    let source = d.char_mul(kappa, gamma)?;
    for (i, mi) in mons.iter().enumerate() {
        for (j, mj) in mons.iter().enumerate() {
            let (c, mij) = d.mul_monomials(Some(&source), mi, mj)?;
            let mut lhs = vec_zero(dim * dim, d.conductor());
            if !c.is_zero() {
                let col = m.col(d.monomial_index(&mij));
                for (slot, v) in lhs.iter_mut().zip(&col) {
                    *slot = c.mul(v);
                }
            }
            let rhs = tensor_mul(d, kappa, gamma, &m.col(i), &m.col(j))?;
            if lhs != rhs {
                return Err(Error::TheoremViolation(format!(
                    "connecting comultiplication is not an algebra map at pair ({i},{j})"
                )));
            }
        }
    }
    Ok(m)
}

type TensorTerms = BTreeMap<(PbwMonomial, PbwMonomial), CycloScalar>;

fn expand_delta(
    d: &QlsDatum,
    kappa: &Character,
    gamma: &Character,
    mon: &PbwMonomial,
) -> Result<TensorTerms> {
    let mut acc: TensorTerms = BTreeMap::new();
    acc.insert(
        (d.unit_monomial(), d.unit_monomial()),
        CycloScalar::one(d.conductor()),
    );
    // Delta(x_i) = x_i (x) 1 + g_i (x) x_i, applied a_i times in ascending i
    for i in 0..d.theta() {
        for _ in 0..mon.x[i] {
            let mut next: TensorTerms = BTreeMap::new();
            for ((l, r), c) in &acc {
                // term x_i (x) 1
                let mut xi = d.unit_monomial();
                xi.x[i] = 1;
                let (cl, nl) = d.mul_monomials(Some(kappa), l, &xi)?;
                if !cl.is_zero() {
                    let coeff = c.mul(&cl);
                    add_term(&mut next, (nl, r.clone()), coeff);
                }
                // term g_i (x) x_i
                let mut gi = d.unit_monomial();
                gi.g[i] = 1;
                let (cl, nl) = d.mul_monomials(Some(kappa), l, &gi)?;
                let (cr, nr) = d.mul_monomials(Some(gamma), r, &xi)?;
                let coeff = c.mul(&cl).mul(&cr);
                if !coeff.is_zero() {
                    add_term(&mut next, (nl, nr), coeff);
                }
            }
            acc = next;
        }
    }
    // Delta(g^b) = g^b (x) g^b
    let mut gb = d.unit_monomial();
    gb.g = mon.g.clone();
    let mut next: TensorTerms = BTreeMap::new();
    for ((l, r), c) in &acc {
        let (cl, nl) = d.mul_monomials(Some(kappa), l, &gb)?;
        let (cr, nr) = d.mul_monomials(Some(gamma), r, &gb)?;
        let coeff = c.mul(&cl).mul(&cr);
        if !coeff.is_zero() {
            add_term(&mut next, (nl, nr), coeff);
        }
    }
    Ok(next)
}

fn add_term(acc: &mut TensorTerms, key: (PbwMonomial, PbwMonomial), c: CycloScalar) {
    match acc.remove(&key) {
        Some(prev) => {
            let s = prev.add(&c);
            if !s.is_zero() {
                acc.insert(key, s);
            }
        }
        None => {
            acc.insert(key, c);
        }
    }
}

/// Product in the tensor-square algebra H_kappa (x) H_gamma on flattened
/// coordinate vectors.
pub fn tensor_mul(
    d: &QlsDatum,
    kappa: &Character,
    gamma: &Character,
    u: &[CycloScalar],
    v: &[CycloScalar],
) -> Result<Vector> {
    let dim = d.fiber_dim();
    let mons = d.fiber_monomials();
    let mut out = vec_zero(dim * dim, d.conductor());
    for (p, a) in u.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let (p1, p2) = (p / dim, p % dim);
        for (q, b) in v.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let (q1, q2) = (q / dim, q % dim);
            let (cl, ml) = d.mul_monomials(Some(kappa), &mons[p1], &mons[q1])?;
            if cl.is_zero() {
                continue;
            }
            let (cr, mr) = d.mul_monomials(Some(gamma), &mons[p2], &mons[q2])?;
            if cr.is_zero() {
                continue;
            }
            let idx = d.monomial_index(&ml) * dim + d.monomial_index(&mr);
            out[idx] = out[idx].add(&a.mul(b).mul(&cl).mul(&cr));
        }
    }
    Ok(out)
}

/// The antipode map from the fiber at kappa to the fiber at kappa^{-1},
/// induced by S(x_i) = -g_i^{-1} x_i and S(g_i) = g_i^{-1} and checked to be
/// anti-multiplicative into the target fiber.
pub fn antipode_fiber(d: &QlsDatum, kappa: &Character) -> Result<ExactMatrix> {
    d.ensure_valid()?;
    d.check_char(kappa)?;
    let target = d.char_inv(kappa)?;
    let dim = d.fiber_dim();
    let mons = d.fiber_monomials();
    let mut s = ExactMatrix::zeros(dim, dim, d.conductor());
    for (src, mon) in mons.iter().enumerate() {
        // S(x^a g^b) = g^{-b} * S(x_theta)^{a_theta} ... S(x_1)^{a_1}
        let mut word: Vec<GenPower> = Vec::new();
        for i in 0..d.theta() {
            if mon.g[i] != 0 {
                word.push(GenPower::G(i, -mon.g[i]));
            }
        }
        let mut sign = 0u32;
        for i in (0..d.theta()).rev() {
            for _ in 0..mon.x[i] {
                word.push(GenPower::G(i, -1));
                word.push(GenPower::X(i, 1));
                sign += 1;
            }
        }
        let (mut c, m) = d.pbw_normalize(&word, Some(&target))?;
        if sign % 2 == 1 {
            c = c.neg();
        }
        if !c.is_zero() {
            s.set(d.monomial_index(&m), src, c);
        }
    }
    // anti-multiplicativity into the target fiber
    for (i, mi) in mons.iter().enumerate() {
        for (j, mj) in mons.iter().enumerate() {
            let (c, mij) = d.mul_monomials(Some(kappa), mi, mj)?;
            let mut lhs = vec_zero(dim, d.conductor());
            if !c.is_zero() {
                for (slot, v) in lhs.iter_mut().zip(&s.col(d.monomial_index(&mij))) {
                    *slot = c.mul(v);
                }
            }
            // S(b_j) * S(b_i) in the target fiber
            let sj = s.col(j);
            let si = s.col(i);
            let mut rhs = vec_zero(dim, d.conductor());
            for (p, a) in sj.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (q, b) in si.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let (cc, mm) = d.mul_monomials(Some(&target), &mons[p], &mons[q])?;
                    if !cc.is_zero() {
                        let idx = d.monomial_index(&mm);
                        rhs[idx] = rhs[idx].add(&a.mul(b).mul(&cc));
                    }
                }
            }
            if lhs != rhs {
                return Err(Error::TheoremViolation(format!(
                    "fiber antipode not anti-multiplicative at pair ({i},{j})"
                )));
            }
        }
    }
    Ok(s)
}

/// Both sides of the antipode identity for the pair (kappa, kappa^{-1}):
/// m(id (x) S)Delta and m(S (x) id)Delta must equal unit * counit.
pub fn antipode_identity_holds(d: &QlsDatum, kappa: &Character) -> Result<bool> {
    let inv = d.char_inv(kappa)?;
    let dim = d.fiber_dim();
    let fiber = build_fiber(d, kappa)?;
    let mons = d.fiber_monomials();

    let check = |delta: &ExactMatrix, s: &ExactMatrix, s_on_left: bool| -> Result<bool> {
        for j in 0..dim {
            let v = delta.col(j);
            let mut acc = vec_zero(dim, d.conductor());
            for (idx, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (l, r) = (idx / dim, idx % dim);
                let (lvec, rvec) = if s_on_left {
                    (s.col(l), fiber.hopf.basis_vec(r))
                } else {
                    (fiber.hopf.basis_vec(l), s.col(r))
                };
                let prod = fiber.hopf.product(&lvec, &rvec);
                for (slot, p) in acc.iter_mut().zip(&prod) {
                    *slot = slot.add(&c.mul(p));
                }
            }
            // expected: eps(source basis j) * unit; the source is the
            // identity fiber, whose counit kills x-monomials
            let mut expected = vec_zero(dim, d.conductor());
            if mons[j].x.iter().all(|&a| a == 0) {
                expected[0] = CycloScalar::one(d.conductor());
            }
            if acc != expected {
                return Ok(false);
            }
        }
        Ok(true)
    };

    // m_k (id (x) S_{k^{-1}}) Delta_{k, k^{-1}}
    let delta1 = delta_fiber(d, kappa, &inv)?;
    let s1 = antipode_fiber(d, &inv)?; // H_{k^{-1}} -> H_k
    let first = check(&delta1, &s1, false)?;
    // m_k (S_{k^{-1}} (x) id) Delta_{k^{-1}, k}
    let delta2 = delta_fiber(d, &inv, kappa)?;
    let second = check(&delta2, &s1, true)?;
    Ok(first && second)
}

/// The cleaving section of the fiber at kappa as a comodule algebra over the
/// identity fiber, with coaction Delta_{kappa, e}.
///
/// chi carries the monomial basis onto the monomial basis up to the scalar
/// t^{-floor((a+b)/N)} per factor (the wrap debt of the left coproduct leg);
/// the comodule condition forces exactly this correction. Its convolution
/// inverse is found by solving the convolution identity as a linear system,
/// and xi is the induced coinvariant projection r -> r_0 chi^{-1}(r_1).
pub fn cleaving_section(d: &QlsDatum, kappa: &Character) -> Result<(ExactMatrix, ExactMatrix)> {
    d.ensure_valid()?;
    d.check_char(kappa)?;
    let identity = d.char_identity();
    let dim = d.fiber_dim();
    let mons = d.fiber_monomials();

    let mut chi = ExactMatrix::zeros(dim, dim, d.conductor());
    for (i, m) in mons.iter().enumerate() {
        let mut c = CycloScalar::one(d.conductor());
        for f in 0..d.theta() {
            let n = d.order(f) as i64;
            let debt = (m.x[f] as i64 + m.g[f]).div_euclid(n);
            if debt != 0 {
                c = c.mul(&kappa.t[f].pow(-debt)?);
            }
        }
        chi.set(i, i, c);
    }

    // comodule condition: rho chi = (chi (x) id) Delta_e
    let rho = delta_fiber(d, kappa, &identity)?;
    let delta_e = delta_fiber(d, &identity, &identity)?;
    let lhs = rho.matmul(&chi)?;
    let chi_tensor_id = chi.kron(&ExactMatrix::identity(dim, d.conductor()));
    let rhs = chi_tensor_id.matmul(&delta_e)?;
    if lhs != rhs {
        return Err(Error::TheoremViolation(
            "cleaving section fails the comodule condition".into(),
        ));
    }

    // convolution inverse of chi: unknown psi with chi(h_1) psi(h_2) = eps(h) 1
    let fiber = build_fiber(d, kappa)?;
    let mut rows: Vec<Vector> = Vec::with_capacity(dim * dim);
    let mut rhs_vec: Vec<CycloScalar> = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        let dv = delta_e.col(j);
        let mut coeffs = vec![vec_zero(dim * dim, d.conductor()); dim];
        for (idx, c) in dv.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (h1, h2) = (idx / dim, idx % dim);
            let chi_h1 = chi.col(h1);
            for r in 0..dim {
                // contribution of psi[r][h2] via chi(h1) * b_r
                let prod = fiber.hopf.product(&chi_h1, &fiber.hopf.basis_vec(r));
                for (t, p) in prod.iter().enumerate() {
                    if !p.is_zero() {
                        coeffs[t][r * dim + h2] = coeffs[t][r * dim + h2].add(&c.mul(p));
                    }
                }
            }
        }
        let eps_j = if mons[j].x.iter().all(|&a| a == 0) {
            CycloScalar::one(d.conductor())
        } else {
            CycloScalar::zero(d.conductor())
        };
        for (t, row) in coeffs.into_iter().enumerate() {
            rows.push(row);
            rhs_vec.push(if t == 0 { eps_j.clone() } else { CycloScalar::zero(d.conductor()) });
        }
    }
    let system = ExactMatrix::from_rows(rows, dim * dim, d.conductor());
    let sol = system.solve(&rhs_vec)?.ok_or_else(|| {
        Error::TheoremViolation("convolution-inverse system for the cleaving map is singular".into())
    })?;
    let mut psi = ExactMatrix::zeros(dim, dim, d.conductor());
    for r in 0..dim {
        for c in 0..dim {
            psi.set(r, c, sol[r * dim + c].clone());
        }
    }

    // xi(r) = r_0 psi(r_1), which must land on the line through 1
    let mut xi = ExactMatrix::zeros(1, dim, d.conductor());
    for i in 0..dim {
        let coact = rho.col(i);
        let mut acc = vec_zero(dim, d.conductor());
        for (idx, c) in coact.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (r0, h1) = (idx / dim, idx % dim);
            let prod = fiber.hopf.product(&fiber.hopf.basis_vec(r0), &psi.col(h1));
            for (slot, p) in acc.iter_mut().zip(&prod) {
                *slot = slot.add(&c.mul(p));
            }
        }
        if acc[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::TheoremViolation(
                "coinvariant projection does not land on the unit line".into(),
            ));
        }
        xi.set(0, i, acc[0].clone());
    }
    Ok((chi, xi))
}
