//! Exact Cayley-ball growth of finitely generated subgroups of B^theta,
//! where B = {(t, s) : t != 0} with (t, s)(t', s') = (t t', s + t s'), and
//! the dimension/Noetherianity/regularity verdicts driven by it.
//!
//! Ball sizes are exact (BFS over canonical forms); floats enter only in the
//! final log fits of the classifier.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qls::Character;
use crate::scalar::CycloScalar;

/// An element of B^theta: pairs (t_i, s_i) with t_i nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BorelElement {
    pub pairs: Vec<(CycloScalar, CycloScalar)>,
}

impl BorelElement {
    pub fn identity(theta: usize, conductor: u32) -> Self {
        BorelElement {
            pairs: vec![(CycloScalar::one(conductor), CycloScalar::zero(conductor)); theta],
        }
    }

    pub fn new(pairs: Vec<(CycloScalar, CycloScalar)>) -> Result<Self> {
        if pairs.iter().any(|(t, _)| t.is_zero()) {
            return Err(Error::InvalidDatum(
                "Borel elements need nonzero scaling parts".into(),
            ));
        }
        Ok(BorelElement { pairs })
    }

    pub fn from_character(k: &Character, conductor: u32) -> Self {
        let pairs = k
            .t
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let s = k
                    .s
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| CycloScalar::zero(conductor));
                (t.clone(), s)
            })
            .collect();
        BorelElement { pairs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let pairs = self
            .pairs
            .iter()
            .zip(&other.pairs)
            .map(|((t, s), (t2, s2))| (t.mul(t2), s.add(&t.mul(s2))))
            .collect();
        BorelElement { pairs }
    }

    pub fn inv(&self) -> Result<Self> {
        let pairs = self
            .pairs
            .iter()
            .map(|(t, s)| -> Result<_> {
                let tinv = t.inv()?;
                Ok((tinv.clone(), tinv.mul(s).neg()))
            })
            .collect::<Result<_>>()?;
        Ok(BorelElement { pairs })
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(t, s)| t.is_one() && s.is_zero())
    }

    /// Rough per-element heap footprint used for the memory budget.
    fn approx_bytes(&self) -> usize {
        let per_scalar: usize = self
            .pairs
            .first()
            .map(|(t, _)| 48 + 64 * t.conductor() as usize)
            .unwrap_or(64);
        64 + 2 * self.pairs.len() * per_scalar
    }
}

/// Exact ball sizes |B_0|..|B_{n_max}| of the Cayley graph on gens and their
/// inverses. Errors with partial results when the visited set would exceed
/// the memory budget.
pub fn ball_growth(gens: &[BorelElement], n_max: usize, budget_mb: usize) -> Result<Vec<u64>> {
    if gens.is_empty() || n_max < 1 {
        return Err(Error::InvalidDatum(
            "ball growth needs generators and a positive radius".into(),
        ));
    }
    let theta = gens[0].pairs.len();
    let conductor = gens[0].pairs[0].0.conductor();
    let mut alphabet: Vec<BorelElement> = Vec::new();
    for g in gens {
        if g.pairs.len() != theta {
            return Err(Error::ShapeError("generator arity mismatch".into()));
        }
        alphabet.push(g.clone());
        alphabet.push(g.inv()?);
    }
    let id = BorelElement::identity(theta, conductor);
    let elem_bytes = id.approx_bytes().max(64);
    let max_elems = budget_mb.saturating_mul(1024 * 1024) / elem_bytes;

    let mut visited: HashSet<BorelElement> = HashSet::new();
    visited.insert(id.clone());
    let mut frontier: Vec<BorelElement> = vec![id];
    let mut sizes: Vec<u64> = vec![1];
    for _radius in 1..=n_max {
        let mut next = Vec::new();
        for e in &frontier {
            for a in &alphabet {
                let n = e.mul(a);
                if !visited.contains(&n) {
                    if visited.len() + 1 > max_elems {
                        return Err(Error::BudgetExceeded {
                            completed: sizes.len() - 1,
                            partial: sizes,
                        });
                    }
                    visited.insert(n.clone());
                    next.push(n);
                }
            }
        }
        sizes.push(visited.len() as u64);
        frontier = next;
        if frontier.is_empty() {
            // group exhausted; remaining radii repeat the total
            while sizes.len() <= n_max {
                sizes.push(visited.len() as u64);
            }
            break;
        }
    }
    Ok(sizes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Polynomial { degree: u32 },
    Exponential,
    Inconclusive,
}

/// Fit diagnostics reported alongside a classification. Floats are rounded
/// so reports stay byte-stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub degree_estimates: Vec<f64>,
    pub tail_ratios: Vec<f64>,
}

// Classifier constants: stabilization window of 4 degree estimates within
// 0.25 of a common integer; exponential when every consecutive ratio stays
// at or above 1 + 1/16. Calibrated so that the three canonical families
// (one free generator, two independent commuting generators, the solvable
// scaling-plus-shift pair) classify correctly at radius 12.
const DEGREE_WINDOW: usize = 4;
const DEGREE_TOLERANCE: f64 = 0.25;
const RATIO_BOUND: f64 = 1.0 + 1.0 / 16.0;

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

/// Classify exact ball sizes as polynomial of integer degree, exponential,
/// or inconclusive. Requires at least six sizes.
pub fn classify_growth(sizes: &[u64]) -> Result<(Classification, FitDiagnostics)> {
    if sizes.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "need at least 6 ball sizes, got {}",
            sizes.len()
        )));
    }
    let n_max = sizes.len() - 1;
    let mut estimates = Vec::new();
    for n in (n_max - DEGREE_WINDOW + 1)..=n_max {
        let num = (sizes[n] as f64 / sizes[n - 1] as f64).ln();
        let den = (n as f64 / (n - 1) as f64).ln();
        estimates.push(round4(num / den));
    }
    let ratios: Vec<f64> = (1..sizes.len())
        .map(|n| round4(sizes[n] as f64 / sizes[n - 1] as f64))
        .collect();
    let diag = FitDiagnostics {
        degree_estimates: estimates.clone(),
        tail_ratios: ratios.iter().rev().take(4).rev().copied().collect(),
    };

    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let candidate = mean.round();
    if candidate >= 0.0
        && estimates
            .iter()
            .all(|e| (e - candidate).abs() <= DEGREE_TOLERANCE)
    {
        return Ok((
            Classification::Polynomial {
                degree: candidate as u32,
            },
            diag,
        ));
    }
    if ratios.iter().all(|r| *r >= RATIO_BOUND) {
        return Ok((Classification::Exponential, diag));
    }
    Ok((Classification::Inconclusive, diag))
}

/// Smith normal form diagonal of an integer matrix. Returns the nonzero
/// diagonal entries, each dividing the next.
pub fn smith_diagonal(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut t = 0usize;
    let mut diag: Vec<BigInt> = Vec::new();
    while t < rows.min(cols) {
        // find a nonzero pivot of least absolute value
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() {
                    match &pivot {
                        None => pivot = Some((i, j)),
                        Some((pi, pj)) => {
                            if m[i][j].abs() < m[*pi][*pj].abs() {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        // clear row and column by division with remainder; restart when a
        // remainder appears, since the pivot shrinks each round
        let mut clean = true;
        for i in (t + 1)..rows {
            if !m[i][t].is_zero() {
                let q = &m[i][t] / &m[t][t];
                for j in t..cols {
                    let sub = &q * &m[t][j];
                    m[i][j] = &m[i][j] - sub;
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in (t + 1)..cols {
            if !m[t][j].is_zero() {
                let q = &m[t][j] / &m[t][t];
                for row in m.iter_mut().take(rows).skip(t) {
                    let sub = &q * &row[t];
                    row[j] = &row[j] - sub;
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // enforce divisibility into the remaining block
        let mut fixed = true;
        'div: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    // fold that row in and redo this pivot
                    for jj in t..cols {
                        let add = m[i][jj].clone();
                        m[t][jj] += add;
                    }
                    fixed = false;
                    break 'div;
                }
            }
        }
        if !fixed {
            continue;
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// All generator pairs commute. The rank and torsion come from the
    /// relation lattice discovered by collisions up to the search bound; the
    /// rank is exact precisely when that lattice is complete, and always an
    /// upper bound for the Hirsch number.
    Abelian {
        rank: usize,
        torsion: Vec<u64>,
        relations_found: usize,
        search_bound: usize,
        finite_order: Option<u64>,
    },
    NonAbelian {
        witness: (usize, usize),
    },
}

/// Pairwise commutation check with an abelian-structure certificate via
/// Smith normal form on the discovered relation lattice.
pub fn commutation_certificate(gens: &[BorelElement], search_bound: usize) -> Result<Certificate> {
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            if gens[i].mul(&gens[j]) != gens[j].mul(&gens[i]) {
                return Ok(Certificate::NonAbelian { witness: (i, j) });
            }
        }
    }
    // BFS with exponent tracking: collisions yield relations
    let m = gens.len();
    let theta = gens[0].pairs.len();
    let conductor = gens[0].pairs[0].0.conductor();
    let id = BorelElement::identity(theta, conductor);
    let mut seen: HashMap<BorelElement, Vec<i64>> = HashMap::new();
    seen.insert(id.clone(), vec![0; m]);
    let mut relations: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<(BorelElement, Vec<i64>, usize)> = VecDeque::new();
    queue.push_back((id, vec![0; m], 0));
    let mut closed = true;
    while let Some((e, exp, depth)) = queue.pop_front() {
        if depth >= search_bound {
            closed = false;
            continue;
        }
        for (gi, g) in gens.iter().enumerate() {
            for step in [1i64, -1] {
                let n = if step == 1 { e.mul(g) } else { e.mul(&g.inv()?) };
                let mut nexp = exp.clone();
                nexp[gi] += step;
                match seen.get(&n) {
                    Some(old) => {
                        let rel: Vec<i64> = nexp.iter().zip(old).map(|(a, b)| a - b).collect();
                        if rel.iter().any(|&v| v != 0) {
                            // sign convention for dedup
                            let canon = if rel.iter().find(|&&v| v != 0).map(|&v| v < 0)
                                == Some(true)
                            {
                                rel.iter().map(|v| -v).collect()
                            } else {
                                rel.clone()
                            };
                            relations.insert(canon);
                        }
                    }
                    None => {
                        seen.insert(n.clone(), nexp.clone());
                        queue.push_back((n, nexp, depth + 1));
                    }
                }
            }
        }
    }
    let rel_rows: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let relations_found = rel_rows.len();
    let diag = smith_diagonal(rel_rows);
    let lattice_rank = diag.len();
    let rank = m - lattice_rank;
    let torsion: Vec<u64> = diag
        .iter()
        .filter(|d| **d > BigInt::from(1))
        .map(|d| {
            d.to_string()
                .parse::<u64>()
                .expect("torsion fits in u64 at desk scale")
        })
        .collect();
    let finite_order = if closed && rank == 0 {
        Some(seen.len() as u64)
    } else {
        None
    };
    Ok(Certificate::Abelian {
        rank,
        torsion,
        relations_found,
        search_bound,
        finite_order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GkVerdict {
    Finite { value: u32 },
    Infinite,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoetherianVerdict {
    Yes,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularVerdict {
    Yes,
    No,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictBlock {
    pub gk: GkVerdict,
    pub noetherian: NoetherianVerdict,
    pub certificate: Certificate,
    pub regular: RegularVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gldim_bound: Option<usize>,
}

/// Full growth report for one generator set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthReport {
    pub ball_sizes: Vec<u64>,
    pub classification: Classification,
    pub diagnostics: FitDiagnostics,
    pub verdicts: VerdictBlock,
}

/// Derive the verdict block from a classification, a commutation
/// certificate and the semisimplicity of the identity fiber.
///
/// Dimension growth of the graded algebra matches the growth of the grading
/// group; Noetherianity is only ever asserted positively (finitely generated
/// abelian, or a finite group exhausted by the BFS); when Noetherian,
/// regularity reduces to the semisimplicity of the identity fiber, with the
/// abelian rank bounding the global dimension.
pub fn verdicts(
    classification: Classification,
    certificate: Certificate,
    h_eps_semisimple: bool,
    ball_sizes: &[u64],
) -> VerdictBlock {
    let gk = match classification {
        Classification::Polynomial { degree } => GkVerdict::Finite { value: degree },
        Classification::Exponential => GkVerdict::Infinite,
        Classification::Inconclusive => GkVerdict::Inconclusive,
    };
    let stabilized = ball_sizes.len() >= 2
        && ball_sizes[ball_sizes.len() - 1] == ball_sizes[ball_sizes.len() - 2];
    let (noetherian, hirsch_bound) = match &certificate {
        Certificate::Abelian { rank, .. } => (NoetherianVerdict::Yes, Some(*rank)),
        Certificate::NonAbelian { .. } if stabilized => {
            // ball sizes stopped growing: the group is finite
            (NoetherianVerdict::Yes, Some(0))
        }
        Certificate::NonAbelian { .. } => (NoetherianVerdict::Undetermined, None),
    };
    let (regular, gldim_bound) = match noetherian {
        NoetherianVerdict::Yes => {
            if h_eps_semisimple {
                (RegularVerdict::Yes, hirsch_bound)
            } else {
                (RegularVerdict::No, None)
            }
        }
        NoetherianVerdict::Undetermined => (RegularVerdict::NotApplicable, None),
    };
    VerdictBlock {
        gk,
        noetherian,
        certificate,
        regular,
        gldim_bound,
    }
}
