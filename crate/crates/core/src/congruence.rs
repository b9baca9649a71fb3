//! Verification primitives: the twisted coefficient congruence
//! a_n(f) = n^{k-1}·a_n(h) mod M on indices coprime to level·M, CM
//! detection through inert-prime vanishing, and the nebentypus table of a
//! character.
//!
//! Rational coefficients reduce mod M directly. A coefficient with an omega
//! part is reduced per prime p | M through the residue embedding at the
//! canonical split prime, and the per-prime residues are recombined by CRT
//! so the report always speaks modulo M.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{factor, primes_up_to};
use crate::error::{Error, Result};
use crate::heckechar::HeckeChar;
use crate::qexpansion::{CoeffValue, Nebentypus, QExpansion};
use crate::quadfield::{kronecker, QuadField, ResidueEmbedding};

/// Outcome of a congruence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub pass: bool,
    pub modulus: u64,
    /// Indices n <= bound with gcd(n, level·M) = 1 that were verified.
    pub checked: u64,
    /// Indices excluded by the gcd condition.
    pub skipped: u64,
    pub first_failure: Option<FailureWitness>,
}

/// The smallest failing index with both residues mod M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureWitness {
    pub n: u64,
    pub lhs: BigUint,
    pub rhs: BigUint,
}

/// Reduces exact coefficients modulo M, using split-prime embeddings for
/// the omega part.
struct CoeffReducer {
    m: u64,
    parts: Vec<(u64, ResidueEmbedding)>, // (p^t, embedding) per prime p | M
}

impl CoeffReducer {
    fn new(k: &QuadField, m: u64) -> Result<CoeffReducer> {
        let mut parts = Vec::new();
        for (p, t) in factor(m) {
            match k.splitting_type(p)? {
                crate::quadfield::SplittingType::Split(pr) => {
                    parts.push((p.pow(t), k.residue_embedding(&pr, t)?));
                }
                _ => parts.push((p.pow(t), k.residue_embedding_unavailable(p)?)),
            }
        }
        Ok(CoeffReducer { m, parts })
    }

    fn reduce(&self, c: &CoeffValue) -> Result<BigUint> {
        let q = c.exact().ok_or(Error::ExactBackendUnavailable)?;
        if let Some(r) = q.rational() {
            return Ok(r.mod_floor(&BigInt::from(self.m)).to_biguint().unwrap());
        }
        // CRT over the prime-power parts
        let mut acc = BigInt::zero();
        let mut acc_mod = BigInt::one();
        for (pt, emb) in &self.parts {
            let r = BigInt::from(emb.map(q));
            let ptb = BigInt::from(*pt);
            // x = acc mod acc_mod, x = r mod pt
            let eg = acc_mod.extended_gcd(&ptb);
            debug_assert!(eg.gcd.is_one());
            let diff = (&r - &acc).mod_floor(&ptb);
            acc = (&acc + &acc_mod * ((eg.x * diff).mod_floor(&ptb))).mod_floor(&(&acc_mod * &ptb));
            acc_mod *= ptb;
        }
        debug_assert_eq!(acc_mod, BigInt::from(self.m));
        Ok(acc.to_biguint().unwrap())
    }
}

impl QuadField {
    /// Helper for the reducer: a named error when a non-split prime blocks
    /// reduction of non-rational coefficients.
    fn residue_embedding_unavailable(&self, p: u64) -> Result<ResidueEmbedding> {
        Err(Error::IrrationalAtInert { p })
    }
}

/// Check a_n(f) = n^{k-1}·a_n(h) mod M at every n <= bound with
/// gcd(n, level·M) = 1.
pub fn twisted_congruence(
    f: &QExpansion,
    h: &QExpansion,
    k: u64,
    m: u64,
    level: u64,
    bound: u64,
) -> Result<CongruenceReport> {
    if bound > f.bound() {
        return Err(Error::BeyondBound { n: bound, bound: f.bound() });
    }
    if bound > h.bound() {
        return Err(Error::BeyondBound { n: bound, bound: h.bound() });
    }
    let field = QuadField::from_disc(f.disc())?;
    let needs_reduction = |e: &QExpansion| {
        e.coeffs().iter().any(|c| matches!(c, CoeffValue::Exact(q) if q.rational().is_none()))
    };
    let reducer = if needs_reduction(f) || needs_reduction(h) {
        CoeffReducer::new(&field, m)?
    } else {
        CoeffReducer { m, parts: vec![] }
    };
    let mb = BigUint::from(m);
    let mut checked = 0u64;
    let mut skipped = 0u64;
    let mut first_failure = None;
    for n in 1..=bound {
        if n.gcd(&(level * m)) != 1 {
            skipped += 1;
            continue;
        }
        checked += 1;
        let lhs = reducer.reduce(f.coeff(n)?)?;
        let twist = BigUint::from(n).modpow(&BigUint::from(k - 1), &mb);
        let rhs = reducer.reduce(h.coeff(n)?)? * twist % &mb;
        if lhs != rhs && first_failure.is_none() {
            first_failure = Some(FailureWitness { n, lhs, rhs });
        }
    }
    Ok(CongruenceReport { pass: first_failure.is_none(), modulus: m, checked, skipped, first_failure })
}

/// CM detection: every inert prime q <= bound coprime to the level must have
/// a vanishing coefficient; the witness is the first prime violating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmReport {
    pub is_cm: bool,
    pub witness: Option<u64>,
}

pub fn detect_cm(f: &QExpansion, disc: i64, bound: u64) -> Result<CmReport> {
    if !crate::quadfield::is_fundamental(disc) {
        return Err(Error::NotFundamental(disc));
    }
    if bound > f.bound() {
        return Err(Error::BeyondBound { n: bound, bound: f.bound() });
    }
    for q in primes_up_to(bound) {
        if f.level().is_multiple_of(q) {
            continue;
        }
        if kronecker(disc, q as i64) == -1 && !f.coeff(q)?.is_zero() {
            return Ok(CmReport { is_cm: false, witness: Some(q) });
        }
    }
    Ok(CmReport { is_cm: true, witness: None })
}

/// The nebentypus table eps(m) = (D|m)·psi^inf(m) modulo the level.
pub fn nebentypus_of(psi: &HeckeChar) -> Nebentypus {
    Nebentypus::of_char(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heckechar::{FiniteType, RootOfUnity};
    use crate::qexpansion::{synthesize, QExpansion};
    use crate::quadfield::{Ideal, QuadInt};

    fn psi(u: u64) -> HeckeChar {
        let k = QuadField::from_disc(-8).unwrap();
        let cg = k.class_group(&Ideal::unit()).unwrap();
        HeckeChar::new(k, FiniteType::trivial(), u, cg, vec![]).unwrap()
    }

    #[test]
    fn golden_congruence_mod_33() {
        let f = synthesize(&psi(2), 25).unwrap();
        let h19 = synthesize(&psi(18), 25).unwrap();
        let rep = twisted_congruence(&f, &h19, 3, 33, 8, 25).unwrap();
        assert!(rep.pass, "failure: {:?}", rep.first_failure);
        assert_eq!(rep.checked + rep.skipped, 25);
        // the spot value from the listing at n = 17
        let a17 = h19.coeff(17).unwrap().rational().unwrap().clone();
        assert_eq!(a17, BigInt::from(119842447106i64));
        assert_eq!(
            (BigInt::from(17 * 17) * a17).mod_floor(&BigInt::from(33)),
            BigInt::from(2)
        );
    }

    #[test]
    fn perturbed_coefficient_fails_at_17() {
        let f = synthesize(&psi(2), 25).unwrap();
        let h19 = synthesize(&psi(18), 25).unwrap();
        let mut coeffs = h19.coeffs().to_vec();
        if let CoeffValue::Exact(q) = &mut coeffs[16] {
            *q = q.add(&QuadInt::one());
        }
        let bad = QExpansion::from_parts(
            h19.weight(),
            h19.level(),
            h19.disc(),
            h19.nebentypus().clone(),
            coeffs,
            25,
        )
        .unwrap();
        let rep = twisted_congruence(&f, &bad, 3, 33, 8, 25).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.first_failure.as_ref().unwrap().n, 17);
    }

    #[test]
    fn trivial_twist_self_congruence() {
        // k - 1 = 0 mod phi(M): n^{k-1} = 1 for coprime n, so f = f passes
        let f = synthesize(&psi(20), 40).unwrap(); // k = 21, phi(5)=4 | 20
        let rep = twisted_congruence(&f, &f, 21, 5, 8, 40).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn congruence_symmetry() {
        // (k-1) + (k'-1) = 0 mod phi(M) makes companionship symmetric
        let f = synthesize(&psi(2), 120).unwrap();
        for (u, m) in [(18u64, 33u64), (30, 51), (58, 99)] {
            let h = synthesize(&psi(u), 120).unwrap();
            let fwd = twisted_congruence(&f, &h, 3, m, 8, 120).unwrap();
            let back = twisted_congruence(&h, &f, u + 1, m, 8, 120).unwrap();
            assert!(fwd.pass && back.pass, "m = {m}");
            assert_eq!(fwd.checked, back.checked);
            assert_eq!(fwd.skipped, back.skipped);
        }
    }

    #[test]
    fn report_counts_partition_the_range() {
        let f = synthesize(&psi(2), 100).unwrap();
        let rep = twisted_congruence(&f, &f, 3, 9, 8, 100).unwrap();
        assert_eq!(rep.checked + rep.skipped, 100);
        // 1..100 coprime to 72: phi-style count
        let expect = (1..=100u64).filter(|n| n.gcd(&72) == 1).count() as u64;
        assert_eq!(rep.checked, expect);
    }

    #[test]
    fn irrational_coefficients_reduce_through_split_primes() {
        // character with order-2 finite type on p3 over Q(sqrt(-2)), u = 3:
        // coefficients land in Z[omega] \ Z, and 11, 17 split
        let k = QuadField::from_disc(-8).unwrap();
        let p3 = k.prime_above(3).unwrap();
        let cg = k.class_group(&Ideal::unit()).unwrap();
        let ft = FiniteType::from_values(
            &k,
            p3,
            &[(QuadInt::from_i64(2, 0), RootOfUnity::minus_one())],
        )
        .unwrap();
        let chi = HeckeChar::new(k.clone(), ft, 3, cg, vec![]).unwrap();
        let g = synthesize(&chi, 40).unwrap();
        // self-congruence with twist exponent 0 mod phi(11·17)... too big;
        // instead check reduction machinery: q - q = 0 mod 11 at every index
        let rep = twisted_congruence(&g, &g, 1, 11, g.level(), 40).unwrap();
        assert!(rep.pass);
        // and a genuinely irrational coefficient is present
        assert!(g.coeffs().iter().any(|c| c.exact().unwrap().rational().is_none()));
        // reduction at an inert prime must fail loudly
        let err = twisted_congruence(&g, &g, 1, 5, g.level(), 40);
        assert!(matches!(err, Err(Error::IrrationalAtInert { p: 5 })));
    }

    #[test]
    fn detect_cm_examples() {
        let f = synthesize(&psi(2), 25).unwrap();
        assert_eq!(detect_cm(&f, -8, 25).unwrap(), CmReport { is_cm: true, witness: None });
        assert_eq!(
            detect_cm(&f, -4, 25).unwrap(),
            CmReport { is_cm: false, witness: Some(3) }
        );
        let mut coeffs = f.coeffs().to_vec();
        coeffs[4] = CoeffValue::Exact(QuadInt::one());
        let bad =
            QExpansion::from_parts(3, 8, -8, f.nebentypus().clone(), coeffs, 25).unwrap();
        assert_eq!(
            detect_cm(&bad, -8, 25).unwrap(),
            CmReport { is_cm: false, witness: Some(5) }
        );
        assert!(detect_cm(&f, -12, 25).is_err());
    }

    #[test]
    fn detect_cm_structural_on_synthesized_forms() {
        for (disc, u, twists) in [(-8i64, 2u64, vec![]), (-20, 2, vec![0]), (-20, 4, vec![1])] {
            let k = QuadField::from_disc(disc).unwrap();
            let cg = k.class_group(&Ideal::unit()).unwrap();
            let ch = HeckeChar::new(k, FiniteType::trivial(), u, cg, twists).unwrap();
            let f = synthesize(&ch, 300).unwrap();
            let rep = detect_cm(&f, disc, 300).unwrap();
            assert!(rep.is_cm, "disc {disc} u {u}");
        }
    }

    #[test]
    fn nebentypus_of_matches_expansion() {
        let ch = psi(2);
        let eps = nebentypus_of(&ch);
        assert_eq!(eps.conductor(), 8);
        assert_eq!(eps.eval(3), Some(RootOfUnity::one()));
        assert_eq!(eps.eval(5), Some(RootOfUnity::minus_one()));
    }
}
