//! Exact q-expansion synthesis of CM eigenforms: a_n is the sum of psi over
//! the integral ideals of norm n coprime to the character modulus. The
//! resulting form has weight u+1, level |D|·Nm and nebentypus
//! eps(m) = (D|m)·psi^inf(m). A residue backend synthesizes the same sums
//! inside a Galois ring when the anchors leave Z[omega].

use num_bigint::BigInt;
use num_integer::Integer;
#[cfg(test)]
use num_traits::One;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::heckechar::{HeckeChar, RootOfUnity};
use crate::quadfield::{kronecker, QuadInt};
use crate::residue::{GRElement, GaloisRing};

/// A coefficient: exact in Z[omega], or in a residue ring shared by the
/// whole expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffValue {
    Exact(QuadInt),
    Residue(GRElement),
}

impl CoeffValue {
    pub fn is_zero(&self) -> bool {
        match self {
            CoeffValue::Exact(q) => q.is_zero(),
            CoeffValue::Residue(e) => e.coords().iter().all(|c| c.is_zero()),
        }
    }

    pub fn exact(&self) -> Option<&QuadInt> {
        match self {
            CoeffValue::Exact(q) => Some(q),
            CoeffValue::Residue(_) => None,
        }
    }

    /// Rational value when exact with no omega part.
    pub fn rational(&self) -> Option<&BigInt> {
        self.exact().and_then(|q| q.rational())
    }
}

/// The nebentypus as an explicit character table modulo the level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nebentypus {
    level: u64,
    table: Vec<Option<RootOfUnity>>, // index m-1 for m in 1..=level
}

impl Nebentypus {
    /// eps(m) = (D|m)·psi^inf(m) tabulated on residues coprime to the level.
    pub fn of_char(psi: &HeckeChar) -> Nebentypus {
        let level = psi.level();
        let disc = psi.field().disc();
        let mut table = Vec::with_capacity(level as usize);
        for m in 1..=level {
            if m.gcd(&level) != 1 {
                table.push(None);
                continue;
            }
            let kr = match kronecker(disc, m as i64) {
                1 => RootOfUnity::one(),
                -1 => RootOfUnity::minus_one(),
                _ => unreachable!("m is coprime to |D|"),
            };
            let fin = psi
                .finite()
                .eval_int(psi.field(), m as i64)
                .expect("m coprime to the level is coprime to the modulus");
            table.push(Some(kr.mul(&fin)));
        }
        Nebentypus { level, table }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// eps(m); None when m is not coprime to the level.
    pub fn eval(&self, m: u64) -> Option<RootOfUnity> {
        self.table[((m - 1) % self.level) as usize]
    }

    /// Smallest divisor f of the level such that eps factors through
    /// (Z/f)^*.
    pub fn conductor(&self) -> u64 {
        'f: for f in 1..=self.level {
            if !self.level.is_multiple_of(f) {
                continue;
            }
            let mut classes: Vec<Option<RootOfUnity>> = vec![None; f as usize];
            for m in 1..=self.level {
                if let Some(v) = self.table[(m - 1) as usize] {
                    let r = (m % f) as usize;
                    match classes[r] {
                        Some(w) if w != v => continue 'f,
                        Some(_) => {}
                        None => classes[r] = Some(v),
                    }
                }
            }
            return f;
        }
        self.level
    }
}

/// A q-expansion with exact or residue coefficients for 1 <= n <= bound.
#[derive(Clone, Debug)]
pub struct QExpansion {
    weight: u64,
    level: u64,
    disc: i64,
    nebentypus: Nebentypus,
    coeffs: Vec<CoeffValue>,
    bound: u64,
    ring: Option<GaloisRing>,
}

impl QExpansion {
    /// Assemble an expansion from stored data (deserialization, tests).
    pub fn from_parts(
        weight: u64,
        level: u64,
        disc: i64,
        nebentypus: Nebentypus,
        coeffs: Vec<CoeffValue>,
        bound: u64,
    ) -> Result<QExpansion> {
        if coeffs.len() as u64 != bound {
            return Err(Error::Message(format!(
                "expected {bound} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(QExpansion { weight, level, disc, nebentypus, coeffs, bound, ring: None })
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn nebentypus(&self) -> &Nebentypus {
        &self.nebentypus
    }

    pub fn is_exact(&self) -> bool {
        self.ring.is_none()
    }

    pub fn ring(&self) -> Option<&GaloisRing> {
        self.ring.as_ref()
    }

    pub fn coeff(&self, n: u64) -> Result<&CoeffValue> {
        if n == 0 || n > self.bound {
            return Err(Error::BeyondBound { n, bound: self.bound });
        }
        Ok(&self.coeffs[(n - 1) as usize])
    }

    pub fn coeffs(&self) -> &[CoeffValue] {
        &self.coeffs
    }

    /// Coefficientwise n^r·a_n; the weight moves by 2r formally.
    pub fn theta_power(&self, r: u32) -> QExpansion {
        let mut out = self.clone();
        out.weight += 2 * r as u64;
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let n = BigInt::from(idx as u64 + 1).pow(r);
            match c {
                CoeffValue::Exact(q) => {
                    *q = QuadInt::new(&q.x * &n, &q.y * &n);
                }
                CoeffValue::Residue(e) => {
                    let ring = self.ring.as_ref().expect("residue coefficients carry a ring");
                    let nr = n.mod_floor(&BigInt::from(ring.modulus().clone()));
                    *e = ring.scale(e, &nr.to_biguint().unwrap());
                }
            }
        }
        out
    }
}

/// Exact synthesis: weight u+1, level |D|·Nm, coefficients summed over
/// ideals of each norm. Requires u >= 1 and every needed value to lie in
/// Z[omega]; otherwise the residue backend applies.
pub fn synthesize(psi: &HeckeChar, bound: u64) -> Result<QExpansion> {
    if psi.infinity_exponent() < 1 {
        return Err(Error::Message("synthesis needs infinity exponent u >= 1".into()));
    }
    let k = psi.field();
    let modulus = psi.finite().modulus().clone();
    let mut coeffs = Vec::with_capacity(bound as usize);
    for n in 1..=bound {
        let mut acc = QuadInt::zero();
        for ideal in k.ideals_of_norm(n, &modulus) {
            acc = acc.add(&psi.eval_ideal(&ideal)?);
        }
        coeffs.push(CoeffValue::Exact(acc));
    }
    if bound >= 1 {
        assert!(
            matches!(&coeffs[0], CoeffValue::Exact(q) if q.is_one()),
            "synthesized expansion is normalized"
        );
    }
    Ok(QExpansion {
        weight: psi.infinity_exponent() + 1,
        level: psi.level(),
        disc: k.disc(),
        nebentypus: Nebentypus::of_char(psi),
        coeffs,
        bound,
        ring: None,
    })
}

/// Residue-backend synthesis: the same sums evaluated in the Galois ring
/// over Z/p^t determined by the canonical split prime above p.
pub fn synthesize_mod(psi: &HeckeChar, bound: u64, p: u64, t: u32) -> Result<QExpansion> {
    if psi.infinity_exponent() < 1 {
        return Err(Error::Message("synthesis needs infinity exponent u >= 1".into()));
    }
    let k = psi.field();
    let prime = match k.splitting_type(p)? {
        crate::quadfield::SplittingType::Split(pr) => pr,
        crate::quadfield::SplittingType::Ramified(_) => {
            return Err(Error::NotSplit { p, kind: "ramified" })
        }
        crate::quadfield::SplittingType::Inert => {
            return Err(Error::NotSplit { p, kind: "inert" })
        }
    };
    let emb = k.residue_embedding(&prime, t)?;
    let ring = GaloisRing::new(p, t, psi.required_root_order())?;
    let modulus = psi.finite().modulus().clone();
    let mut coeffs = Vec::with_capacity(bound as usize);
    for n in 1..=bound {
        let mut acc = ring.zero();
        for ideal in k.ideals_of_norm(n, &modulus) {
            acc = ring.add(&acc, &psi.eval_ideal_in_ring(&ideal, &ring, &emb)?);
        }
        coeffs.push(CoeffValue::Residue(acc));
    }
    Ok(QExpansion {
        weight: psi.infinity_exponent() + 1,
        level: psi.level(),
        disc: k.disc(),
        nebentypus: Nebentypus::of_char(psi),
        coeffs,
        bound,
        ring: Some(ring),
    })
}

/// Where a Hecke self-check first failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConsistencyViolation {
    Multiplicativity { m: u64, n: u64 },
    HeckeRecursion { p: u64, power: u32 },
}

/// Report of the eigenform identity checks.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub ok: bool,
    pub checked_pairs: u64,
    pub checked_powers: u64,
    pub first_violation: Option<ConsistencyViolation>,
}

/// Verify a_{mn} = a_m·a_n for coprime m, n and the Hecke recursion
/// a_{p^{r+1}} = a_p·a_{p^r} - eps(p)·p^{k-1}·a_{p^{r-1}} for p not dividing
/// the level, up to the bound.
pub fn hecke_consistency(
    f: &QExpansion,
    primes: Option<&[u64]>,
    bound: u64,
) -> Result<ConsistencyReport> {
    if bound > f.bound() {
        return Err(Error::BeyondBound { n: bound, bound: f.bound() });
    }
    let k = crate::quadfield::QuadField::from_disc(f.disc())?;
    let get = |n: u64| -> Result<&QuadInt> {
        f.coeff(n)?.exact().ok_or(Error::ExactBackendUnavailable)
    };
    let mut checked_pairs = 0u64;
    let mut checked_powers = 0u64;
    let mut first_violation = None;
    'pairs: for m in 2..=bound {
        for n in m + 1..=bound {
            if m * n > bound {
                break;
            }
            if m.gcd(&n) != 1 {
                continue;
            }
            checked_pairs += 1;
            if get(m * n)? != &get(m)?.mul(get(n)?, &k) {
                first_violation = Some(ConsistencyViolation::Multiplicativity { m, n });
                break 'pairs;
            }
        }
    }
    if first_violation.is_none() {
        let plist: Vec<u64> = match primes {
            Some(ps) => ps.to_vec(),
            None => crate::arith::primes_up_to(bound),
        };
        let pk = |p: u64| BigInt::from(p).pow(f.weight() as u32 - 1);
        'powers: for &p in &plist {
            if f.level().is_multiple_of(p) || p * p > bound {
                continue;
            }
            let eps = f
                .nebentypus()
                .eval(p)
                .expect("p coprime to the level")
                .materialize(&k)
                .ok_or(Error::ExactBackendUnavailable)?;
            let mut r = 1u32;
            while (p as u128).pow(r + 1) <= bound as u128 {
                checked_powers += 1;
                let lhs = get(p.pow(r + 1))?;
                let scale = eps.mul(&QuadInt::new(pk(p), BigInt::zero()), &k);
                let rhs = get(p)?
                    .mul(get(p.pow(r))?, &k)
                    .sub(&scale.mul(get(p.pow(r - 1))?, &k));
                if lhs != &rhs {
                    first_violation = Some(ConsistencyViolation::HeckeRecursion { p, power: r });
                    break 'powers;
                }
                r += 1;
            }
        }
    }
    Ok(ConsistencyReport {
        ok: first_violation.is_none(),
        checked_pairs,
        checked_powers,
        first_violation,
    })
}

/// Convenience: the rational coefficients of an exact expansion.
pub fn rational_coefficients(f: &QExpansion) -> Result<Vec<BigInt>> {
    f.coeffs()
        .iter()
        .map(|c| c.rational().cloned().ok_or(Error::ExactBackendUnavailable))
        .collect()
}
