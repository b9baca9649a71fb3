//! Galois rings Z/p^t[x]/(g) for an odd prime p, where g is a monic lift of
//! an irreducible polynomial over F_p. The ring hosts a primitive n0-th root
//! of unity (gcd(n0, p) = 1) obtained by Hensel-lifting a root from the
//! residue field; its degree f is the multiplicative order of p mod n0, the
//! minimal degree containing those roots. Distinct prime-to-p roots of unity
//! stay distinct mod p, which is what makes root-of-unity discrete logs and
//! canonical root extraction well defined here.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factor, is_prime};
use crate::error::{Error, Result};
use crate::quadfield::{QuadInt, ResidueEmbedding};

// ---- dense polynomial arithmetic over F_p, coefficients in u64 ----

fn fp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // m monic
    let mut r: Vec<u64> = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let t = (lead as u128 * mi as u128) % p as u128;
                let idx = i + shift;
                r[idx] = ((r[idx] as u128 + p as u128 - t) % p as u128) as u64;
            }
        }
        r.pop();
        fp_trim(&mut r);
    }
    r
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + ai as u128 * bj as u128) % p as u128) as u64;
        }
    }
    out
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    fp_rem(&fp_mul(a, b, p), m, p)
}

fn fp_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &b, m, p);
        }
        b = fp_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        // make b monic for fp_rem
        let lead = *b.last().unwrap();
        let linv = mod_inv_u64(lead, p);
        let bm: Vec<u64> = b.iter().map(|&c| (c as u128 * linv as u128 % p as u128) as u64).collect();
        let r = fp_rem(&a, &bm, p);
        a = b;
        b = r;
    }
    a
}

/// Extended Euclid over F_p[x]: returns s with s·a = gcd(a, m) mod m.
fn fp_invmod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut r0, mut r1) = (m.to_vec(), fp_rem(a, m, p));
    let (mut s0, mut s1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        // divide r0 by r1
        let lead = *r1.last().unwrap();
        let linv = mod_inv_u64(lead, p);
        let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        while rem.len() >= r1.len() && !rem.is_empty() {
            let c = (*rem.last().unwrap() as u128 * linv as u128 % p as u128) as u64;
            let shift = rem.len() - r1.len();
            q[shift] = c;
            for i in 0..r1.len() {
                let t = (c as u128 * r1[i] as u128) % p as u128;
                rem[i + shift] = ((rem[i + shift] as u128 + p as u128 - t) % p as u128) as u64;
            }
            fp_trim(&mut rem);
        }
        let s_new = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s_new;
    }
    // r0 = gcd; need it to be a nonzero constant
    if r0.len() != 1 {
        return None;
    }
    let ginv = mod_inv_u64(r0[0], p);
    Some(s0.iter().map(|&c| (c as u128 * ginv as u128 % p as u128) as u64).collect())
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = ((x as u128 + p as u128 - y as u128 % p as u128) % p as u128) as u64;
    }
    fp_trim(&mut out);
    out
}

fn mod_inv_u64(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    let eg = BigInt::from(a).extended_gcd(&BigInt::from(p));
    eg.x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn fp_is_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    if f == 0 {
        return false;
    }
    // x^{p^f} == x mod g, and gcd(x^{p^{f/l}} - x, g) = 1 for primes l | f
    let x = vec![0u64, 1];
    let frob = |k: usize| -> Vec<u64> {
        let mut h = fp_rem(&x, g, p);
        for _ in 0..k {
            h = fp_powmod(&h, p, g, p);
        }
        h
    };
    if fp_rem(&fp_sub(&frob(f), &x, p), g, p) != Vec::<u64>::new() {
        return false;
    }
    for (l, _) in factor(f as u64) {
        let h = fp_sub(&frob(f / l as usize), &x, p);
        let d = fp_gcd(&h, g, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}

/// First irreducible monic polynomial of degree f over F_p, ordering
/// candidates by the base-p digits of an index (constant coefficient first).
fn first_irreducible(p: u64, f: usize) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1]; // x itself
    }
    let total = (p as u128).pow(f as u32);
    let mut m: u128 = 0;
    while m < total {
        let mut g = Vec::with_capacity(f + 1);
        let mut rest = m;
        for _ in 0..f {
            g.push((rest % p as u128) as u64);
            rest /= p as u128;
        }
        g.push(1);
        if fp_is_irreducible(&g, p) {
            return g;
        }
        m += 1;
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Element of a Galois ring: coordinate vector of length f over Z/p^t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GRElement(Vec<BigUint>);

impl std::fmt::Display for GRElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl GRElement {
    pub fn coords(&self) -> &[BigUint] {
        &self.0
    }

    /// Constant part, meaningful for degree-1 rings and embedded constants.
    pub fn constant(&self) -> &BigUint {
        &self.0[0]
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().skip(1).all(|c| c.is_zero())
    }
}

/// The ring Z/p^t[x]/(modulus) with a chosen primitive n0-th root of unity.
/// theta generates the full group of prime-to-p roots of unity (order
/// p^f - 1) and anchors canonical root extraction.
#[derive(Clone, Debug)]
pub struct GaloisRing {
    p: u64,
    t: u32,
    f: usize,
    n0: u64,
    pt: BigUint,
    modulus: Vec<BigUint>,
    zeta: GRElement,
    theta: GRElement,
    teich_order: u64,
}

impl GaloisRing {
    /// Build the ring containing a primitive n0-th root of unity over Z/p^t.
    pub fn new(p: u64, t: u32, n0: u64) -> Result<GaloisRing> {
        assert!(t >= 1 && n0 >= 1);
        if !is_prime(p) || p == 2 {
            return Err(Error::NotPrime(p));
        }
        if n0.gcd(&p) != 1 {
            return Err(Error::BadRootOrder { n0, p });
        }
        // degree = multiplicative order of p mod n0
        let f = if n0 == 1 {
            1
        } else {
            let mut ord = 1usize;
            let mut acc = p % n0;
            while acc != 1 {
                acc = acc * p % n0;
                ord += 1;
            }
            ord
        };
        let g0 = first_irreducible(p, f);
        let pt = BigUint::from(p).pow(t);
        let modulus: Vec<BigUint> = g0.iter().map(|&c| BigUint::from(c)).collect();
        let field_size = (p as u128).pow(f as u32);
        if field_size > u64::MAX as u128 {
            return Err(Error::Message(format!("residue field of degree {f} over {p} too large")));
        }
        let teich_order = field_size as u64 - 1;
        let mut ring = GaloisRing {
            p,
            t,
            f,
            n0,
            pt,
            modulus,
            zeta: GRElement(vec![BigUint::one()]),
            theta: GRElement(vec![BigUint::one()]),
            teich_order,
        };
        ring.zeta = ring.find_root(n0)?;
        ring.theta =
            if n0 == teich_order { ring.zeta.clone() } else { ring.find_root(teich_order)? };
        Ok(ring)
    }

    /// Residue-field element of minimal index with exact multiplicative
    /// order, Hensel lifted so root^order = 1 holds exactly in the ring.
    fn find_root(&self, order: u64) -> Result<GRElement> {
        if order == 1 {
            return Ok(self.one());
        }
        let p = self.p;
        let field_size = (p as u128).pow(self.f as u32);
        let prime_divs: Vec<u64> = factor(order).into_iter().map(|(l, _)| l).collect();
        let g0: Vec<u64> = self.modulus.iter().map(|c| c.to_u64().unwrap()).collect();
        let mut z0 = None;
        for m in 1..field_size {
            let mut elem = Vec::with_capacity(self.f);
            let mut rest = m;
            for _ in 0..self.f {
                elem.push((rest % p as u128) as u64);
                rest /= p as u128;
            }
            let mut e = elem.clone();
            fp_trim(&mut e);
            if fp_powmod(&e, order, &g0, p) != vec![1u64] {
                continue;
            }
            if prime_divs.iter().all(|&l| fp_powmod(&e, order / l, &g0, p) != vec![1u64]) {
                z0 = Some(elem);
                break;
            }
        }
        let z0 = z0.expect("the residue field carries roots of every order dividing p^f - 1");
        let mut z = GRElement(
            (0..self.f).map(|i| BigUint::from(*z0.get(i).unwrap_or(&0))).collect(),
        );
        // Newton on x^order - 1; the derivative order·z^{order-1} is a unit
        loop {
            let zn = self.pow(&z, order);
            if zn == self.one() {
                break;
            }
            let err = self.sub(&zn, &self.one());
            let deriv = self.scale(&self.pow(&z, order - 1), &BigUint::from(order));
            let step = self.mul(&err, &self.inv(&deriv)?);
            z = self.sub(&z, &step);
        }
        Ok(z)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn root_order(&self) -> u64 {
        self.n0
    }

    pub fn modulus(&self) -> &BigUint {
        &self.pt
    }

    pub fn modulus_poly(&self) -> &[BigUint] {
        &self.modulus
    }

    pub fn zeta(&self) -> &GRElement {
        &self.zeta
    }

    pub fn zero(&self) -> GRElement {
        GRElement(vec![BigUint::zero(); self.f])
    }

    pub fn one(&self) -> GRElement {
        self.from_const(BigUint::one())
    }

    pub fn from_const(&self, c: BigUint) -> GRElement {
        let mut v = vec![BigUint::zero(); self.f];
        v[0] = c % &self.pt;
        GRElement(v)
    }

    pub fn add(&self, a: &GRElement, b: &GRElement) -> GRElement {
        GRElement(
            a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % &self.pt).collect(),
        )
    }

    pub fn sub(&self, a: &GRElement, b: &GRElement) -> GRElement {
        GRElement(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| (x + &self.pt - (y % &self.pt)) % &self.pt)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GRElement) -> GRElement {
        self.sub(&self.zero(), a)
    }

    pub fn scale(&self, a: &GRElement, c: &BigUint) -> GRElement {
        GRElement(a.0.iter().map(|x| x * c % &self.pt).collect())
    }

    pub fn mul(&self, a: &GRElement, b: &GRElement) -> GRElement {
        let mut prod = vec![BigUint::zero(); 2 * self.f - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                prod[i + j] = (&prod[i + j] + x * y) % &self.pt;
            }
        }
        // reduce by the monic modulus
        for i in (self.f..prod.len()).rev() {
            let c = std::mem::replace(&mut prod[i], BigUint::zero());
            if c.is_zero() {
                continue;
            }
            for j in 0..self.f {
                let sub = &c * &self.modulus[j] % &self.pt;
                let idx = i - self.f + j;
                prod[idx] = (&prod[idx] + &self.pt - sub) % &self.pt;
            }
        }
        prod.truncate(self.f);
        GRElement(prod)
    }

    pub fn pow(&self, a: &GRElement, mut e: u64) -> GRElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, a: &GRElement, e: &BigUint) -> GRElement {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e.clone();
        while !e.is_zero() {
            if e.bit(0) {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit: field inverse mod p lifted by Newton iteration.
    pub fn inv(&self, a: &GRElement) -> Result<GRElement> {
        let g0: Vec<u64> = self.modulus.iter().map(|c| c.to_u64().unwrap()).collect();
        let a0: Vec<u64> = {
            let mut v: Vec<u64> =
                a.0.iter().map(|c| (c % self.p).to_u64().unwrap()).collect();
            fp_trim(&mut v);
            v
        };
        let inv0 = fp_invmod(&a0, &g0, self.p)
            .ok_or_else(|| Error::Message("element is not a unit in the Galois ring".into()))?;
        let mut v = GRElement(
            (0..self.f).map(|i| BigUint::from(*inv0.get(i).unwrap_or(&0))).collect(),
        );
        let two = self.from_const(BigUint::from(2u32));
        loop {
            let av = self.mul(a, &v);
            if av == self.one() {
                break;
            }
            v = self.mul(&v, &self.sub(&two, &av));
        }
        Ok(v)
    }

    /// Discrete log against the fixed zeta: the unique d in [0, c) with
    /// zeta^{(n0/c)·d} = target, for c | n0 and target a c-th root of unity.
    pub fn lift_root_of_unity(&self, c: u64, target: &GRElement) -> Result<u64> {
        if c == 0 || !self.n0.is_multiple_of(c) {
            return Err(Error::OrderNotDividing { c, n0: self.n0 });
        }
        if self.pow(target, c) != self.one() {
            return Err(Error::NotRootOfUnity { c });
        }
        let step = self.pow(&self.zeta, self.n0 / c);
        let mut acc = self.one();
        for d in 0..c {
            if &acc == target {
                return Ok(d);
            }
            acc = self.mul(&acc, &step);
        }
        Err(Error::NotRootOfUnity { c })
    }

    /// zeta^{(n0/order)·exp}: the ring image of an abstract root of unity.
    pub fn root_of_unity(&self, order: u64, exp: u64) -> Result<GRElement> {
        if order == 0 || !self.n0.is_multiple_of(order) {
            return Err(Error::OrderNotDividing { c: order, n0: self.n0 });
        }
        Ok(self.pow(&self.zeta, self.n0 / order * (exp % order)))
    }

    /// Image of a ring integer under O_K -> Z/p^t ⊆ R.
    pub fn embed_quadint(&self, emb: &ResidueEmbedding, x: &QuadInt) -> GRElement {
        assert_eq!((emb.p(), emb.t()), (self.p, self.t), "embedding targets another ring");
        self.from_const(emb.map(x))
    }

    /// Canonical c-th root of a unit u (gcd(c, p) = 1; u must be a c-th
    /// power): the Teichmüller part takes the root of minimal exponent
    /// against theta, the 1-unit part takes its unique c-th root.
    pub fn nth_root_unit(&self, c: u64, u: &GRElement) -> Result<GRElement> {
        assert!(c >= 1 && c.gcd(&self.p) == 1);
        if c == 1 {
            return Ok(u.clone());
        }
        let mu = self.teich_order;
        let pf_t1 = BigUint::from(self.p).pow(self.f as u32 * (self.t - 1));
        // alpha·p^{f(t-1)} = 1 mod mu
        let alpha = BigInt::from(pf_t1.clone())
            .extended_gcd(&BigInt::from(mu))
            .x
            .mod_floor(&BigInt::from(mu))
            .to_biguint()
            .unwrap();
        let tau = self.pow_big(u, &(alpha * pf_t1));
        let upsilon = self.mul(u, &self.inv(&tau)?);
        // discrete log of the Teichmüller part against the full generator
        let mut j = None;
        let mut acc = self.one();
        for e in 0..mu {
            if acc == tau {
                j = Some(e);
                break;
            }
            acc = self.mul(&acc, &self.theta);
        }
        let j = j.expect("Teichmüller parts lie in <theta>");
        // c·x = j mod mu, minimal solution; unsolvable means u is no c-th power
        let g = c.gcd(&mu);
        if j % g != 0 {
            return Err(Error::NotNthPower { c });
        }
        let mg = mu / g;
        let cinv = BigInt::from(c / g)
            .extended_gcd(&BigInt::from(mg))
            .x
            .mod_floor(&BigInt::from(mg))
            .to_u64()
            .unwrap();
        let x = ((j / g) as u128 * cinv as u128 % mg as u128) as u64;
        let tau_root = self.pow(&self.theta, x);
        // unique c-th root of the 1-unit part by Newton on x^c - upsilon
        let c_elem = self.from_const(BigUint::from(c));
        let mut z = self.one();
        loop {
            let zc = self.pow(&z, c);
            if zc == upsilon {
                break;
            }
            let err = self.sub(&zc, &upsilon);
            let deriv = self.mul(&c_elem, &self.pow(&z, c - 1));
            z = self.sub(&z, &self.mul(&err, &self.inv(&deriv)?));
        }
        Ok(self.mul(&tau_root, &z))
    }
}
