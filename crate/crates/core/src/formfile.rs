//! Machine-readable form files (schema_version 1): the synthesized
//! q-expansion together with the full character data needed to rebuild it.
//! Coefficients are arbitrary-precision decimal strings (never exponent
//! notation); a coefficient with an omega part is a coordinate pair.
//! Serialization is deterministic, so identical inputs produce
//! byte-identical files.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heckechar::{FiniteType, HeckeChar, RootOfUnity};
use crate::qexpansion::{CoeffValue, Nebentypus, QExpansion};
use crate::quadfield::{ClassGroup, Ideal, QuadField, QuadInt};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealDesc {
    pub content: String,
    pub a: String,
    pub b: String,
}

impl IdealDesc {
    fn of(ideal: &Ideal) -> IdealDesc {
        IdealDesc {
            content: ideal.content().to_string(),
            a: ideal.a().to_string(),
            b: ideal.b().to_string(),
        }
    }

    fn to_ideal(&self, k: &QuadField) -> Result<Ideal> {
        Ideal::new(k, parse_int(&self.content)?, parse_int(&self.a)?, parse_int(&self.b)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTypeDesc {
    pub modulus: IdealDesc,
    /// Exponent e of the unit group; images are exponents against a fixed
    /// primitive e-th root.
    pub root_order: u64,
    pub generators: Vec<[String; 2]>,
    pub images: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorDesc {
    pub rep: IdealDesc,
    pub order: u64,
    /// Generator alpha_i of rep^order; the radicand is
    /// psi^inf(alpha_i)·alpha_i^u with the finite part recorded as an
    /// exponent against the root_order-th root.
    pub alpha: [String; 2],
    pub finite_exponent: u64,
    pub twist: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDesc {
    Rational(String),
    Quad([String; 2]),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormFile {
    pub schema_version: u32,
    pub disc: i64,
    pub weight: u64,
    pub level: u64,
    pub modulus_norm: u64,
    pub finite_type: FiniteTypeDesc,
    pub infinity_exponent: u64,
    pub anchors: Vec<AnchorDesc>,
    pub coeffs: Vec<(u64, CoeffDesc)>,
    pub bound: u64,
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>()
        .map_err(|_| Error::Message(format!("invalid integer literal {s:?} in form file")))
}

fn quad_pair(q: &QuadInt) -> [String; 2] {
    [q.x.to_string(), q.y.to_string()]
}

fn parse_quad(p: &[String; 2]) -> Result<QuadInt> {
    Ok(QuadInt::new(parse_int(&p[0])?, parse_int(&p[1])?))
}

impl FormFile {
    /// Bundle a character and its synthesized expansion.
    pub fn from_synthesis(psi: &HeckeChar, f: &QExpansion) -> Result<FormFile> {
        let k = psi.field();
        let ft = psi.finite();
        let e = ft.exponent();
        let images = ft
            .images()
            .iter()
            .map(|r| {
                r.exponent_against(e)
                    .ok_or_else(|| Error::Message("image order does not divide e".into()))
            })
            .collect::<Result<Vec<u64>>>()?;
        let mut anchors = Vec::new();
        for (i, rep) in psi.class_group().reps().iter().enumerate() {
            let (fin, alpha) = psi.anchor_radicand(i)?;
            anchors.push(AnchorDesc {
                rep: IdealDesc::of(rep),
                order: psi.class_group().orders()[i],
                alpha: quad_pair(&alpha),
                finite_exponent: fin.exponent_against(e).ok_or_else(|| {
                    Error::Message("anchor finite part does not divide e".into())
                })?,
                twist: psi.twists()[i],
            });
        }
        let coeffs = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let q = c.exact().ok_or(Error::ExactBackendUnavailable)?;
                let desc = match q.rational() {
                    Some(r) => CoeffDesc::Rational(r.to_string()),
                    None => CoeffDesc::Quad(quad_pair(q)),
                };
                Ok((idx as u64 + 1, desc))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FormFile {
            schema_version: SCHEMA_VERSION,
            disc: k.disc(),
            weight: f.weight(),
            level: f.level(),
            modulus_norm: psi.modulus_norm(),
            finite_type: FiniteTypeDesc {
                modulus: IdealDesc::of(ft.modulus()),
                root_order: e,
                generators: ft.generators().iter().map(quad_pair).collect(),
                images,
            },
            infinity_exponent: psi.infinity_exponent(),
            anchors,
            coeffs,
            bound: f.bound(),
        })
    }

    /// Rebuild the Hecke character, re-running every validation.
    pub fn to_char(&self) -> Result<HeckeChar> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Message(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        let field = QuadField::from_disc(self.disc)?;
        let modulus = self.finite_type.modulus.to_ideal(&field)?;
        let assignments = self
            .finite_type
            .generators
            .iter()
            .zip(&self.finite_type.images)
            .map(|(g, &img)| {
                Ok((parse_quad(g)?, RootOfUnity::new(img, self.finite_type.root_order)))
            })
            .collect::<Result<Vec<_>>>()?;
        let ft = FiniteType::from_values(&field, modulus, &assignments)?;
        let mut reps = Vec::new();
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        let mut twists = Vec::new();
        for a in &self.anchors {
            reps.push(a.rep.to_ideal(&field)?);
            orders.push(a.order);
            gens.push(parse_quad(&a.alpha)?);
            twists.push(a.twist);
        }
        let cg = if self.anchors.is_empty() {
            field.class_group(ft.modulus())?
        } else {
            ClassGroup::from_parts(&field, reps, orders, gens)?
        };
        HeckeChar::new(field, ft, self.infinity_exponent, cg, twists)
    }

    /// Rebuild the stored expansion; the nebentypus is recomputed from the
    /// character.
    pub fn to_expansion(&self) -> Result<QExpansion> {
        let psi = self.to_char()?;
        if self.coeffs.len() as u64 != self.bound {
            return Err(Error::Message(format!(
                "form file stores {} coefficients for bound {}",
                self.coeffs.len(),
                self.bound
            )));
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (idx, (n, c)) in self.coeffs.iter().enumerate() {
            if *n != idx as u64 + 1 {
                return Err(Error::Message(format!(
                    "coefficient index {n} out of order in form file"
                )));
            }
            let q = match c {
                CoeffDesc::Rational(s) => QuadInt::new(parse_int(s)?, BigInt::from(0)),
                CoeffDesc::Quad(p) => parse_quad(p)?,
            };
            coeffs.push(CoeffValue::Exact(q));
        }
        QExpansion::from_parts(
            self.weight,
            self.level,
            self.disc,
            Nebentypus::of_char(&psi),
            coeffs,
            self.bound,
        )
    }

    /// Deterministic pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("form files always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<FormFile> {
        serde_json::from_str(s).map_err(|e| Error::Message(format!("invalid form file: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexpansion::synthesize;

    fn char_and_form(disc: i64, u: u64, twists: Vec<u64>, bound: u64) -> (HeckeChar, QExpansion) {
        let k = QuadField::from_disc(disc).unwrap();
        let cg = k.class_group(&Ideal::unit()).unwrap();
        let psi = HeckeChar::new(k, FiniteType::trivial(), u, cg, twists).unwrap();
        let f = synthesize(&psi, bound).unwrap();
        (psi, f)
    }

    #[test]
    fn roundtrip_simple_form() {
        let (psi, f) = char_and_form(-8, 2, vec![], 25);
        let ff = FormFile::from_synthesis(&psi, &f).unwrap();
        let json = ff.to_json();
        let back = FormFile::from_json(&json).unwrap();
        assert_eq!(ff, back);
        assert_eq!(back.to_json(), json);
        let f2 = back.to_expansion().unwrap();
        assert_eq!(f2.coeffs(), f.coeffs());
        assert_eq!(f2.level(), 8);
    }

    #[test]
    fn roundtrip_huge_coefficients() {
        let (psi, h) = char_and_form(-8, 58, vec![], 25);
        let ff = FormFile::from_synthesis(&psi, &h).unwrap();
        let json = ff.to_json();
        assert!(json.contains("34694469519536141888238489627838134765625"));
        let back = FormFile::from_json(&json).unwrap();
        assert_eq!(back.to_expansion().unwrap().coeffs(), h.coeffs());
    }

    #[test]
    fn roundtrip_anchored_character() {
        let (psi, f) = char_and_form(-20, 2, vec![1], 30);
        let ff = FormFile::from_synthesis(&psi, &f).unwrap();
        let back = FormFile::from_json(&ff.to_json()).unwrap();
        let psi2 = back.to_char().unwrap();
        assert_eq!(psi2.twists(), psi.twists());
        assert_eq!(psi2.class_group().orders(), psi.class_group().orders());
        let f2 = back.to_expansion().unwrap();
        assert_eq!(f2.coeffs(), f.coeffs());
    }

    #[test]
    fn roundtrip_nontrivial_finite_type() {
        let k = QuadField::from_disc(-8).unwrap();
        let p3 = k.prime_above(3).unwrap();
        let cg = k.class_group(&Ideal::unit()).unwrap();
        let ft = FiniteType::from_values(
            &k,
            p3,
            &[(QuadInt::from_i64(2, 0), RootOfUnity::minus_one())],
        )
        .unwrap();
        let psi = HeckeChar::new(k, ft, 3, cg, vec![]).unwrap();
        let f = synthesize(&psi, 20).unwrap();
        let ff = FormFile::from_synthesis(&psi, &f).unwrap();
        assert_eq!(ff.finite_type.root_order, 2);
        assert_eq!(ff.finite_type.images, vec![1]);
        let back = FormFile::from_json(&ff.to_json()).unwrap();
        assert_eq!(back.to_expansion().unwrap().coeffs(), f.coeffs());
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(FormFile::from_json("{").is_err());
        let (psi, f) = char_and_form(-8, 2, vec![], 5);
        let ff = FormFile::from_synthesis(&psi, &f).unwrap();
        let mut bad = ff.clone();
        bad.schema_version = 99;
        assert!(bad.to_char().is_err());
        let mut bad = ff.clone();
        bad.coeffs[2].0 = 7;
        assert!(bad.to_expansion().is_err());
        let mut bad = ff;
        bad.infinity_exponent = 3; // parity breaks unit compatibility
        assert!(matches!(bad.to_char(), Err(Error::UnitIncompatible { .. })));
    }
}
