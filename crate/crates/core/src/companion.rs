//! Companion weights, ordinarity tests, and the constructive procedure
//! producing a companion CM form modulo an odd integer M.
//!
//! Given psi of infinity exponent k-1, the companion character psi' shares
//! its finite type, has infinity exponent k'-1 with k+k' = 2 mod phi(M), and
//! twists each class anchor by the d_i making
//! psi'(a_i) = psi(conj a_i)/N(a_i)^{k-1} hold modulo p^{t_p} for every
//! p | M. The selection works inside Galois rings over Z/p^{t_p}: the twist
//! is found by direct search over the c_i candidates against the
//! conjugate-inverse character, so the certificate is checked at the moment
//! it is produced. Whatever the search returns, the full coefficient
//! congruence is re-verified on the synthesized expansion before a result
//! is handed back.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{euler_phi, factor};
use crate::congruence::{twisted_congruence, CongruenceReport};
use crate::error::{Error, Result};
use crate::heckechar::HeckeChar;
use crate::qexpansion::{synthesize, CoeffValue, QExpansion};
use crate::quadfield::{ClassGroup, Ideal, QuadField, ResidueEmbedding, SplittingType};
use crate::residue::GaloisRing;

/// Smallest k' >= 2 with k + k' = 2 mod phi(M).
pub fn companion_weight_modm(k: u64, m: u64) -> u64 {
    assert!(k >= 2 && m >= 3);
    let phi = euler_phi(m);
    let r = (2i128 - k as i128).rem_euclid(phi as i128) as u64;
    if r >= 2 {
        r
    } else {
        r + phi
    }
}

/// Smallest k_m >= 2 with k_m + k - 2 = 0 mod p^{m-1}(p-1); agrees with
/// companion_weight_modm(k, p^m).
pub fn companion_weight_p_power(k: u64, p: u64, m: u32) -> u64 {
    companion_weight_modm(k, p.pow(m))
}

/// a_p is a unit above p: for exact coefficients this is p not dividing the
/// ring norm of a_p, which covers split, inert and ramified p at once.
pub fn is_ordinary_at(f: &QExpansion, p: u64) -> Result<bool> {
    let c = f.coeff(p)?;
    match c {
        CoeffValue::Exact(q) => {
            let k = QuadField::from_disc(f.disc())?;
            Ok(!q.norm(&k).mod_floor(&BigInt::from(p)).is_zero())
        }
        CoeffValue::Residue(e) => {
            let ring = f.ring().ok_or(Error::ExactBackendUnavailable)?;
            if ring.p() != p {
                return Err(Error::ExactBackendUnavailable);
            }
            Ok(e.coords().iter().any(|c| !(c % p).is_zero()))
        }
    }
}

/// Per-prime data for one p^{t_p} dividing M.
#[derive(Clone, Debug)]
pub struct PrimeLocal {
    pub p: u64,
    pub t: u32,
    pub prime: Ideal,
    pub embedding: ResidueEmbedding,
    pub ring: GaloisRing,
}

/// Validated inputs of the construction: factorization of M, split primes
/// with their rings, source and companion weights, and a class group whose
/// representatives avoid both the character modulus and M.
#[derive(Clone, Debug)]
pub struct CompanionPlan {
    pub m: u64,
    pub k: u64,
    pub k_prime: u64,
    pub primes: Vec<PrimeLocal>,
    pub class_group: ClassGroup,
}

/// Check every hypothesis of the construction and assemble the plan.
pub fn plan_companion(psi: &HeckeChar, k: u64, m: u64) -> Result<CompanionPlan> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::BadModulus(m));
    }
    if psi.infinity_exponent() + 1 != k {
        return Err(Error::InfinityExponent {
            got: psi.infinity_exponent() as i64,
            expected: k as i64 - 1,
        });
    }
    let field = psi.field();
    if matches!(field.disc(), -3 | -4) {
        return Err(Error::DiscriminantExcluded(field.disc()));
    }
    let level = psi.level();
    if level.gcd(&m) != 1 {
        return Err(Error::LevelNotCoprime { level, m });
    }
    let h = crate::quadfield::class_number(field.disc())?;
    if h.gcd(&m) != 1 {
        return Err(Error::ClassNumberNotCoprime { h, m });
    }
    let mut primes = Vec::new();
    let ext_modulus = psi.finite().modulus().mul(&Ideal::from_int(m), field);
    let class_group = field.class_group(&ext_modulus)?;
    let mut n0 = psi.finite().value_order();
    for &c in class_group.orders() {
        n0 = n0.lcm(&c);
    }
    for (p, t) in factor(m) {
        let prime = match field.splitting_type(p)? {
            SplittingType::Split(pr) => pr,
            SplittingType::Ramified(_) => return Err(Error::NotSplit { p, kind: "ramified" }),
            SplittingType::Inert => return Err(Error::NotSplit { p, kind: "inert" }),
        };
        let embedding = field.residue_embedding(&prime, t)?;
        let ring = GaloisRing::new(p, t, n0)?;
        primes.push(PrimeLocal { p, t, prime, embedding, ring });
    }
    Ok(CompanionPlan {
        m,
        k,
        k_prime: companion_weight_modm(k, m),
        primes,
        class_group,
    })
}

/// How one twist exponent was certified at one prime.
#[derive(Clone, Debug)]
pub struct PrimeCertificate {
    pub p: u64,
    pub t: u32,
    pub d: u64,
    /// Residue of phi(a_i) = psi(conj a_i)/N(a_i)^{k-1} in the ring.
    pub phi_value: String,
    /// Residue of the selected anchor psi'(a_i) — equal to phi_value.
    pub anchor_value: String,
}

/// One selected d_i with its per-prime certificates.
#[derive(Clone, Debug)]
pub struct AnchorCertificate {
    pub rep: usize,
    pub d: u64,
    pub order: u64,
    pub per_prime: Vec<PrimeCertificate>,
}

/// Choose the twist exponents: for each representative and each p | M, find
/// the d with psi'(a_i) = phi(a_i) in the ring over Z/p^{t_p}, then require
/// a single d to work for every prime. The search is over all c_i
/// candidates, so a certificate is correct by construction; disagreement
/// across primes is reported, not resolved.
pub fn select_anchor_exponents(
    plan: &CompanionPlan,
    psi: &HeckeChar,
) -> Result<Vec<AnchorCertificate>> {
    let field = psi.field().clone();
    let phi = psi.conj_inverse();
    let u_prime = plan.k_prime - 1;
    let mut out = Vec::new();
    for i in 0..plan.class_group.reps().len() {
        let c = plan.class_group.orders()[i];
        let rep = &plan.class_group.reps()[i];
        let mut chosen: Option<(u64, PrimeCertificate)> = None;
        let mut per_prime = Vec::new();
        for local in &plan.primes {
            let target = phi.eval_ideal_in_ring(rep, &local.ring, &local.embedding)?;
            let mut found = None;
            for d in 0..c {
                let mut twists = vec![0u64; plan.class_group.reps().len()];
                twists[i] = d;
                let cand = HeckeChar::new(
                    field.clone(),
                    psi.finite().clone(),
                    u_prime,
                    plan.class_group.clone(),
                    twists,
                )?;
                let val = cand.anchor_in_ring(i, &local.ring, &local.embedding)?;
                if val == target {
                    found = Some((d, val));
                    break;
                }
            }
            let Some((d, val)) = found else {
                return Err(Error::Message(format!(
                    "no twist of the anchor at representative {i} matches phi at p = {}",
                    local.p
                )));
            };
            let cert = PrimeCertificate {
                p: local.p,
                t: local.t,
                d,
                phi_value: target.to_string(),
                anchor_value: val.to_string(),
            };
            match &chosen {
                None => chosen = Some((d, cert.clone())),
                Some((d0, prev)) if *d0 != d => {
                    return Err(Error::AnchorConflict {
                        rep: i,
                        p1: prev.p,
                        d1: *d0,
                        p2: local.p,
                        d2: d,
                    });
                }
                Some(_) => {}
            }
            per_prime.push(cert);
        }
        let d = chosen.map(|(d, _)| d).unwrap_or(0);
        out.push(AnchorCertificate { rep: i, d, order: c, per_prime });
    }
    Ok(out)
}

/// The constructed companion with its verification report.
#[derive(Clone, Debug)]
pub struct CompanionResult {
    pub psi_prime: HeckeChar,
    pub h: QExpansion,
    pub k_prime: u64,
    pub certificates: Vec<AnchorCertificate>,
    pub congruence: CongruenceReport,
}

/// The construction end to end: validate hypotheses, pick anchors,
/// synthesize the weight-k' form, and verify the twisted congruence up to
/// the bound as a postcondition. The result embeds the congruence report;
/// a construction can only be handed back with its verification attached.
pub fn construct_companion(
    psi: &HeckeChar,
    k: u64,
    m: u64,
    bound: u64,
) -> Result<CompanionResult> {
    let plan = plan_companion(psi, k, m)?;
    let certificates = select_anchor_exponents(&plan, psi)?;
    let twists: Vec<u64> = certificates.iter().map(|c| c.d).collect();
    let psi_prime = HeckeChar::new(
        psi.field().clone(),
        psi.finite().clone(),
        plan.k_prime - 1,
        plan.class_group.clone(),
        twists,
    )?;
    let h = synthesize(&psi_prime, bound)?;
    let f = synthesize(psi, bound)?;
    let congruence = twisted_congruence(&f, &h, k, m, psi.level(), bound)?;
    Ok(CompanionResult { psi_prime, h, k_prime: plan.k_prime, certificates, congruence })
}
