//! Hecke characters of imaginary quadratic fields: finite types on
//! (O_K/m)^*, infinity types sigma^u, evaluation on ideals through class
//! anchors, and the conjugate-inverse character used by the companion
//! construction.
//!
//! Roots of unity are carried as exact rational angles (j/e means the value
//! exp(2·pi·i·j/e) under the fixed embedding). A value is materialized into
//! O_K only when the field contains it; everything else is routed through
//! Galois-ring arithmetic. Anchors are stored formally as a radicand
//! psi^inf(alpha_i)·alpha_i^u together with a twist exponent d_i against a
//! primitive c_i-th root; the exact backend realizes them in Z[omega] when
//! a c_i-th root exists there.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quadfield::{Ideal, QuadField, QuadInt, ResidueEmbedding};
use crate::residue::{GRElement, GaloisRing};

/// A root of unity as an exact angle num/den in [0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub fn new(num: u64, den: u64) -> RootOfUnity {
        assert!(den >= 1);
        let num = num % den;
        let g = num.gcd(&den);
        if num == 0 {
            RootOfUnity { num: 0, den: 1 }
        } else {
            RootOfUnity { num: num / g, den: den / g }
        }
    }

    pub fn one() -> RootOfUnity {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn minus_one() -> RootOfUnity {
        RootOfUnity { num: 1, den: 2 }
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn mul(&self, rhs: &RootOfUnity) -> RootOfUnity {
        let den = self.den.lcm(&rhs.den);
        RootOfUnity::new(self.num * (den / self.den) + rhs.num * (den / rhs.den), den)
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(self.den - self.num, self.den)
    }

    pub fn pow(&self, e: i64) -> RootOfUnity {
        let r = (e.rem_euclid(self.den as i64)) as u64;
        RootOfUnity::new(self.num * r, self.den)
    }

    /// Exponent against a primitive e-th root, when the order divides e.
    pub fn exponent_against(&self, e: u64) -> Option<u64> {
        e.is_multiple_of(self.den).then(|| self.num * (e / self.den))
    }

    /// The corresponding unit of O_K, when the field contains it.
    pub fn materialize(&self, k: &QuadField) -> Option<QuadInt> {
        let w = k.unit_count() as u64;
        w.is_multiple_of(self.den).then(|| {
            let idx = (self.num * (w / self.den)) as usize;
            k.units()[idx].clone()
        })
    }

    /// Ring image: exact unit embedded when the field has it, zeta power
    /// otherwise. Routing through the materialization keeps the two
    /// evaluation paths consistent.
    pub fn in_ring(
        &self,
        k: &QuadField,
        ring: &GaloisRing,
        emb: &ResidueEmbedding,
    ) -> Result<GRElement> {
        if let Some(u) = self.materialize(k) {
            return Ok(ring.embed_quadint(emb, &u));
        }
        ring.root_of_unity(self.den, self.num)
    }
}

/// The angle of a unit of O_K (index into the angle-ordered unit list).
fn unit_angle(k: &QuadField, w: &QuadInt) -> Option<RootOfUnity> {
    let units = k.units();
    let n = units.len() as u64;
    units.iter().position(|u| u == w).map(|j| RootOfUnity::new(j as u64, n))
}

/// A character of (O_K/m)^*, validated over the whole finite group and
/// tabulated for evaluation.
#[derive(Clone, Debug)]
pub struct FiniteType {
    modulus: Ideal,
    generators: Vec<QuadInt>,
    images: Vec<RootOfUnity>,
    exponent: u64,
    table: BTreeMap<(BigInt, BigInt), RootOfUnity>,
}

impl FiniteType {
    /// The trivial character of modulus (1).
    pub fn trivial() -> FiniteType {
        let mut table = BTreeMap::new();
        table.insert((BigInt::zero(), BigInt::zero()), RootOfUnity::one());
        FiniteType {
            modulus: Ideal::unit(),
            generators: vec![],
            images: vec![],
            exponent: 1,
            table,
        }
    }

    /// Character from images of a generating set, checked exhaustively over
    /// the unit group.
    pub fn from_values(
        k: &QuadField,
        modulus: Ideal,
        assignments: &[(QuadInt, RootOfUnity)],
    ) -> Result<FiniteType> {
        if modulus.is_unit() {
            if !assignments.is_empty() {
                return Err(Error::TrivialModulus);
            }
            return Ok(FiniteType::trivial());
        }
        let units = unit_residues(k, &modulus);
        let exponent = units
            .iter()
            .map(|r| residue_order(k, &modulus, r))
            .fold(1u64, |acc, o| acc.lcm(&o));
        for (gen, img) in assignments {
            let gr = reduce_residue(k, &modulus, gen);
            if !units.contains(&gr) {
                return Err(Error::NotCoprime);
            }
            let go = residue_order(k, &modulus, &gr);
            if !go.is_multiple_of(img.order()) {
                return Err(Error::ImageOrder { order: img.order(), exponent: go });
            }
        }
        // label the group by breadth-first products of the generators; a
        // disagreement on an already-labeled residue is a broken relation
        let one = reduce_residue(k, &modulus, &QuadInt::one());
        let mut table: BTreeMap<(BigInt, BigInt), RootOfUnity> = BTreeMap::new();
        table.insert(one.clone(), RootOfUnity::one());
        let mut queue = vec![one];
        while let Some(res) = queue.pop() {
            let lab = table[&res];
            let rq = QuadInt::new(res.0.clone(), res.1.clone());
            for (gen, img) in assignments {
                let next = reduce_residue(k, &modulus, &rq.mul(gen, k));
                let nlab = lab.mul(img);
                match table.get(&next) {
                    Some(old) if *old != nlab => return Err(Error::RelationViolation),
                    Some(_) => {}
                    None => {
                        table.insert(next.clone(), nlab);
                        queue.push(next);
                    }
                }
            }
        }
        if table.len() != units.len() {
            return Err(Error::NonGeneratingSet { got: table.len(), need: units.len() });
        }
        Ok(FiniteType {
            modulus,
            generators: assignments.iter().map(|(g, _)| g.clone()).collect(),
            images: assignments.iter().map(|(_, i)| *i).collect(),
            exponent,
            table,
        })
    }

    pub fn modulus(&self) -> &Ideal {
        &self.modulus
    }

    pub fn generators(&self) -> &[QuadInt] {
        &self.generators
    }

    pub fn images(&self) -> &[RootOfUnity] {
        &self.images
    }

    /// Exponent of the unit group (the e the images are stated against).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.table.values().all(|v| v.is_one())
    }

    /// psi^inf(alpha) as a root of unity.
    pub fn eval(&self, k: &QuadField, alpha: &QuadInt) -> Result<RootOfUnity> {
        if self.modulus.is_unit() {
            return Ok(RootOfUnity::one());
        }
        let res = reduce_residue(k, &self.modulus, alpha);
        self.table.get(&res).copied().ok_or(Error::NotCoprime)
    }

    /// psi^inf at a rational integer.
    pub fn eval_int(&self, k: &QuadField, m: i64) -> Result<RootOfUnity> {
        self.eval(k, &QuadInt::from_i64(m, 0))
    }

    /// The largest root-of-unity order appearing among the values.
    pub fn value_order(&self) -> u64 {
        self.table.values().fold(1u64, |acc, v| acc.lcm(&v.order()))
    }
}

/// Canonical residue of alpha modulo the lattice of an ideal.
fn reduce_residue(k: &QuadField, modulus: &Ideal, alpha: &QuadInt) -> (BigInt, BigInt) {
    let _ = k;
    let g = modulus.content();
    let ga = g * modulus.a();
    let yr = alpha.y.mod_floor(g);
    let n = (&alpha.y - &yr) / g;
    let xr = (&alpha.x - n * g * modulus.b()).mod_floor(&ga);
    (xr, yr)
}

/// All unit residues of O_K/m in canonical form.
fn unit_residues(k: &QuadField, modulus: &Ideal) -> Vec<(BigInt, BigInt)> {
    let g = modulus.content().to_u64().expect("desk-scale modulus");
    let ga = (modulus.content() * modulus.a()).to_u64().expect("desk-scale modulus");
    let mut out = Vec::new();
    for y in 0..g {
        for x in 0..ga {
            if x == 0 && y == 0 {
                continue;
            }
            let q = QuadInt::from_i64(x as i64, y as i64);
            if k.principal_ideal(&q).is_coprime(modulus, k) {
                out.push((BigInt::from(x), BigInt::from(y)));
            }
        }
    }
    out
}

fn residue_order(k: &QuadField, modulus: &Ideal, res: &(BigInt, BigInt)) -> u64 {
    let one = reduce_residue(k, modulus, &QuadInt::one());
    let base = QuadInt::new(res.0.clone(), res.1.clone());
    let mut acc = base.clone();
    let mut n = 1u64;
    while reduce_residue(k, modulus, &acc) != one {
        acc = acc.mul(&base, k);
        n += 1;
    }
    n
}

/// Exact division in Z[omega].
pub(crate) fn div_exact(k: &QuadField, num: &QuadInt, den: &QuadInt) -> Result<QuadInt> {
    let nd = den.norm(k);
    let q = num.mul(&den.conj(k), k);
    if q.x.mod_floor(&nd).is_zero() && q.y.mod_floor(&nd).is_zero() {
        Ok(QuadInt::new(&q.x / &nd, &q.y / &nd))
    } else {
        Err(Error::ExactBackendUnavailable)
    }
}

/// Unit compatibility of a finite type with infinity exponent u:
/// psi^inf(w)·w^u = 1 for every unit w of O_K.
pub fn unit_compatibility(k: &QuadField, ft: &FiniteType, u: i64) -> bool {
    k.units().iter().all(|w| {
        let fin = ft.eval(k, w).expect("units are coprime to every modulus");
        let ang = unit_angle(k, w).expect("unit list is complete");
        fin.mul(&ang.pow(u)).is_one()
    })
}

/// A Hecke character: finite type, infinity exponent u >= 0, and anchor
/// twists d_i against the class-group representatives.
#[derive(Clone, Debug)]
pub struct HeckeChar {
    field: QuadField,
    finite: FiniteType,
    u: u64,
    class_group: crate::quadfield::ClassGroup,
    twists: Vec<u64>,
}

impl HeckeChar {
    pub fn new(
        field: QuadField,
        finite: FiniteType,
        u: u64,
        class_group: crate::quadfield::ClassGroup,
        twists: Vec<u64>,
    ) -> Result<HeckeChar> {
        if !unit_compatibility(&field, &finite, u as i64) {
            return Err(Error::UnitIncompatible { u: u as i64 });
        }
        if twists.len() != class_group.reps().len() {
            return Err(Error::AnchorCount {
                expected: class_group.reps().len(),
                got: twists.len(),
            });
        }
        for (&d, &c) in twists.iter().zip(class_group.orders()) {
            if d >= c {
                return Err(Error::AnchorRange { d, order: c });
            }
        }
        let ch = HeckeChar { field, finite, u, class_group, twists };
        // anchor consistency: when the exact backend applies, the realized
        // anchor must recover the radicand
        for i in 0..ch.twists.len() {
            if let Ok(v) = ch.exact_anchor(i) {
                let c = ch.class_group.orders()[i];
                let (rad_fin, alpha) = ch.anchor_radicand(i)?;
                if let Some(rf) = rad_fin.materialize(&ch.field) {
                    let rad = rf.mul(&alpha.pow(ch.u, &ch.field), &ch.field);
                    assert_eq!(v.pow(c, &ch.field), rad, "anchor consistency");
                }
            }
        }
        Ok(ch)
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn finite(&self) -> &FiniteType {
        &self.finite
    }

    /// Infinity exponent u (the weight is u + 1).
    pub fn infinity_exponent(&self) -> u64 {
        self.u
    }

    pub fn weight(&self) -> u64 {
        self.u + 1
    }

    pub fn class_group(&self) -> &crate::quadfield::ClassGroup {
        &self.class_group
    }

    pub fn twists(&self) -> &[u64] {
        &self.twists
    }

    pub fn modulus_norm(&self) -> u64 {
        self.finite.modulus().norm().to_u64().expect("desk-scale modulus")
    }

    /// Level of the attached eigenform: |D|·Nm.
    pub fn level(&self) -> u64 {
        self.field.disc().unsigned_abs() * self.modulus_norm()
    }

    /// Finite part and alpha of the anchor radicand psi^inf(alpha_i)·alpha_i^u.
    pub fn anchor_radicand(&self, i: usize) -> Result<(RootOfUnity, QuadInt)> {
        let alpha = self.class_group.gens()[i].clone();
        let fin = self.finite.eval(&self.field, &alpha)?;
        Ok((fin, alpha))
    }

    /// Anchor value in Z[omega] when a c_i-th root of the radicand exists
    /// there and the twist materializes; the root choice is the canonical
    /// associate-ordered one.
    pub fn exact_anchor(&self, i: usize) -> Result<QuadInt> {
        let c = self.class_group.orders()[i];
        let d = self.twists[i];
        let (fin, alpha) = self.anchor_radicand(i)?;
        let fin_m = fin.materialize(&self.field).ok_or(Error::ExactBackendUnavailable)?;
        let rad = fin_m.mul(&alpha.pow(self.u, &self.field), &self.field);
        let root = exact_nth_root(&self.field, &rad, c).ok_or(Error::ExactBackendUnavailable)?;
        let twist = RootOfUnity::new(d, c)
            .materialize(&self.field)
            .ok_or(Error::ExactBackendUnavailable)?;
        Ok(root.mul(&twist, &self.field))
    }

    /// psi((alpha)) = psi^inf(alpha)·alpha^u, exact.
    pub fn eval_principal(&self, alpha: &QuadInt) -> Result<QuadInt> {
        let fin = self.finite.eval(&self.field, alpha)?;
        let fin_m = fin.materialize(&self.field).ok_or(Error::ExactBackendUnavailable)?;
        Ok(fin_m.mul(&alpha.pow(self.u, &self.field), &self.field))
    }

    /// psi on any coprime integral ideal: decompose the class against the
    /// representatives, evaluate anchors and the principal remainder.
    pub fn eval_ideal(&self, ideal: &Ideal) -> Result<QuadInt> {
        if !ideal.is_coprime(self.finite.modulus(), &self.field) {
            return Err(Error::NotCoprime);
        }
        let k = &self.field;
        let e = self.class_group.decompose(k, ideal);
        let mut j = ideal.clone();
        for (i, (&ei, &ci)) in e.iter().zip(self.class_group.orders()).enumerate() {
            if ei > 0 {
                j = j.mul(&self.class_group.reps()[i].pow(ci - ei, k), k);
            }
        }
        let gamma = k.is_principal(&j).expect("class decomposition leaves a principal ideal");
        let mut num = self.eval_principal(&gamma)?;
        let mut den = QuadInt::one();
        for (i, &ei) in e.iter().enumerate() {
            if ei == 0 {
                continue;
            }
            let anchor = self.exact_anchor(i)?;
            num = num.mul(&anchor.pow(ei, k), k);
            let (fin, alpha) = self.anchor_radicand(i)?;
            let fin_m = fin.materialize(k).ok_or(Error::ExactBackendUnavailable)?;
            den = den.mul(&fin_m.mul(&alpha.pow(self.u, k), k), k);
        }
        div_exact(k, &num, &den)
    }

    /// Root-of-unity order a Galois ring must carry to evaluate this
    /// character: finite-type values and all anchor twists.
    pub fn required_root_order(&self) -> u64 {
        let mut n0 = self.finite.value_order();
        for &c in self.class_group.orders() {
            n0 = n0.lcm(&c);
        }
        n0
    }

    /// Anchor value in a Galois ring. The exact realization is embedded when
    /// it exists, so ring evaluation agrees with the exact backend; otherwise
    /// the radicand is embedded and its canonical c-th root is taken there.
    pub fn anchor_in_ring(
        &self,
        i: usize,
        ring: &GaloisRing,
        emb: &ResidueEmbedding,
    ) -> Result<GRElement> {
        if let Ok(v) = self.exact_anchor(i) {
            return Ok(ring.embed_quadint(emb, &v));
        }
        let c = self.class_group.orders()[i];
        let d = self.twists[i];
        let (fin, alpha) = self.anchor_radicand(i)?;
        let fin_r = fin.in_ring(&self.field, ring, emb)?;
        let rad = ring.mul(&fin_r, &ring.pow(&ring.embed_quadint(emb, &alpha), self.u));
        let root = ring.nth_root_unit(c, &rad)?;
        let twist = ring.root_of_unity(c, d)?;
        Ok(ring.mul(&root, &twist))
    }

    /// psi((alpha)) in a Galois ring.
    pub fn eval_principal_in_ring(
        &self,
        alpha: &QuadInt,
        ring: &GaloisRing,
        emb: &ResidueEmbedding,
    ) -> Result<GRElement> {
        let fin = self.finite.eval(&self.field, alpha)?;
        let fin_r = fin.in_ring(&self.field, ring, emb)?;
        Ok(ring.mul(&fin_r, &ring.pow(&ring.embed_quadint(emb, alpha), self.u)))
    }

    /// psi on an ideal, evaluated in a Galois ring.
    pub fn eval_ideal_in_ring(
        &self,
        ideal: &Ideal,
        ring: &GaloisRing,
        emb: &ResidueEmbedding,
    ) -> Result<GRElement> {
        if !ideal.is_coprime(self.finite.modulus(), &self.field) {
            return Err(Error::NotCoprime);
        }
        let k = &self.field;
        let e = self.class_group.decompose(k, ideal);
        let mut j = ideal.clone();
        for (i, (&ei, &ci)) in e.iter().zip(self.class_group.orders()).enumerate() {
            if ei > 0 {
                j = j.mul(&self.class_group.reps()[i].pow(ci - ei, k), k);
            }
        }
        let gamma = k.is_principal(&j).expect("class decomposition leaves a principal ideal");
        let mut acc = self.eval_principal_in_ring(&gamma, ring, emb)?;
        for (i, &ei) in e.iter().enumerate() {
            if ei == 0 {
                continue;
            }
            let anchor = self.anchor_in_ring(i, ring, emb)?;
            acc = ring.mul(&acc, &ring.pow(&anchor, ei));
            let (fin, alpha) = self.anchor_radicand(i)?;
            let fin_r = fin.in_ring(k, ring, emb)?;
            let den = ring.mul(&fin_r, &ring.pow(&ring.embed_quadint(emb, &alpha), self.u));
            acc = ring.mul(&acc, &ring.inv(&den)?);
        }
        Ok(acc)
    }

    /// The conjugate-inverse character phi = conj(psi)^{-1}.
    pub fn conj_inverse(&self) -> ConjInverseChar {
        ConjInverseChar { base: self.clone() }
    }
}

/// Canonical n-th root in Z[omega]: all candidates are found by norm search,
/// the associate-ordered minimum is returned.
fn exact_nth_root(k: &QuadField, rad: &QuadInt, c: u64) -> Option<QuadInt> {
    if c == 1 {
        return Some(rad.clone());
    }
    let n = rad.norm(k);
    let nr = n.nth_root(c as u32);
    if num_traits::Pow::pow(&nr, c as u32) != n {
        return None;
    }
    let four_nr = BigInt::from(4) * &nr;
    let ymax = (&four_nr / BigInt::from(-k.disc())).sqrt().to_u64()?;
    let tr = BigInt::from(k.omega_trace());
    let mut hits: Vec<QuadInt> = Vec::new();
    for ya in 0..=ymax {
        let ys: &[i64] = if ya == 0 { &[0] } else { &[ya as i64, -(ya as i64)] };
        for &y in ys {
            let yb = BigInt::from(y);
            let s2 = &four_nr + BigInt::from(k.disc()) * &yb * &yb;
            if s2.is_negative() {
                continue;
            }
            let s = s2.sqrt();
            if &s * &s != s2 {
                continue;
            }
            let signs: &[i32] = if s.is_zero() { &[1] } else { &[1, -1] };
            for &sg in signs {
                let numx = if sg == 1 { &s - &tr * &yb } else { -&s - &tr * &yb };
                if !numx.mod_floor(&BigInt::from(2)).is_zero() {
                    continue;
                }
                let cand = QuadInt::new(numx / BigInt::from(2), yb.clone());
                if &cand.pow(c, k) == rad {
                    hits.push(cand);
                }
            }
        }
    }
    hits.into_iter().min_by_key(|q| {
        (q.y.abs().clone(), q.x.is_negative(), q.x.abs().clone(), q.y.is_negative())
    })
}

/// phi = conj(psi)^{-1}: finite type of psi, infinity exponent 1-k. Negative
/// infinity exponents never materialize as q-expansions; phi is evaluated
/// only inside residue rings, through phi(a) = psi(conj a)/Na^{k-1}.
#[derive(Clone, Debug)]
pub struct ConjInverseChar {
    base: HeckeChar,
}

impl ConjInverseChar {
    pub fn base(&self) -> &HeckeChar {
        &self.base
    }

    pub fn finite(&self) -> &FiniteType {
        self.base.finite()
    }

    /// 1 - k = -u.
    pub fn infinity_exponent(&self) -> i64 {
        -(self.base.u as i64)
    }

    /// Double application recovers the original infinity exponent.
    pub fn conj_inverse(self) -> HeckeChar {
        self.base
    }

    /// phi(ideal) in a Galois ring: psi(conj ideal)·(N ideal)^{-(k-1)}.
    pub fn eval_ideal_in_ring(
        &self,
        ideal: &Ideal,
        ring: &GaloisRing,
        emb: &ResidueEmbedding,
    ) -> Result<GRElement> {
        let k = self.base.field();
        let num = self.base.eval_ideal_in_ring(&ideal.conj(k), ring, emb)?;
        let nrm = ring.from_const(
            (ideal.norm().mod_floor(&BigInt::from(ring.modulus().clone())))
                .to_biguint()
                .unwrap(),
        );
        let den = ring.pow(&nrm, self.base.u);
        Ok(ring.mul(&num, &ring.inv(&den)?))
    }
}
