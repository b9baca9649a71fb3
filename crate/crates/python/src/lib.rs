//! Python bindings for the main types and operations: field and class-group
//! queries, eigenform synthesis from Hecke characters with trivial finite
//! type, companion construction and the congruence checks. Coefficients
//! cross the boundary as arbitrary-precision Python ints (pairs [x, y] stand
//! for x + y·omega).

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use heckecm::companion::{companion_weight_modm, construct_companion, is_ordinary_at};
use heckecm::congruence::{detect_cm, twisted_congruence};
use heckecm::error::Error;
use heckecm::heckechar::{FiniteType, HeckeChar};
use heckecm::qexpansion::{synthesize, QExpansion};
use heckecm::quadfield::{self, Ideal, QuadField};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn trivial_char(disc: i64, u: u64, twists: Vec<u64>) -> Result<HeckeChar, Error> {
    let k = QuadField::from_disc(disc)?;
    let cg = k.class_group(&Ideal::unit())?;
    HeckeChar::new(k, FiniteType::trivial(), u, cg, twists)
}

fn coeff_list(f: &QExpansion) -> PyResult<Vec<(BigInt, BigInt)>> {
    f.coeffs()
        .iter()
        .map(|c| {
            let q = c.exact().ok_or_else(|| PyValueError::new_err("residue coefficients"))?;
            Ok((q.x.clone(), q.y.clone()))
        })
        .collect()
}

/// Kronecker symbol (d|n).
#[pyfunction]
fn kronecker(d: i64, n: i64) -> i32 {
    quadfield::kronecker(d, n)
}

/// Class number of the field with fundamental discriminant disc.
#[pyfunction]
fn class_number(disc: i64) -> PyResult<u64> {
    quadfield::class_number(disc).map_err(err)
}

/// Reduced binary quadratic forms (a, b, c) of the discriminant.
#[pyfunction]
fn reduced_forms(disc: i64) -> PyResult<Vec<(i64, i64, i64)>> {
    quadfield::reduced_forms(disc).map_err(err)
}

/// Companion weight k' for source weight k modulo m.
#[pyfunction]
fn companion_weight(k: u64, m: u64) -> PyResult<u64> {
    if k < 2 || m < 3 || m.is_multiple_of(2) {
        return Err(PyValueError::new_err("need k >= 2 and odd m >= 3"));
    }
    Ok(companion_weight_modm(k, m))
}

/// Coefficients (x, y) meaning x + y·omega of the CM form attached to the
/// trivial-finite-type character of infinity exponent u, up to the bound.
#[pyfunction]
#[pyo3(signature = (disc, u, bound, twists = vec![]))]
fn synthesize_form(
    disc: i64,
    u: u64,
    bound: u64,
    twists: Vec<u64>,
) -> PyResult<Vec<(BigInt, BigInt)>> {
    let psi = trivial_char(disc, u, twists).map_err(err)?;
    let f = synthesize(&psi, bound).map_err(err)?;
    coeff_list(&f)
}

/// (k_prime, coefficients, selected twists, congruence_pass)
type CompanionTuple = (u64, Vec<(BigInt, BigInt)>, Vec<u64>, bool);

/// Construct the companion mod m.
#[pyfunction]
#[pyo3(signature = (disc, u, m, bound, twists = vec![]))]
fn companion(
    disc: i64,
    u: u64,
    m: u64,
    bound: u64,
    twists: Vec<u64>,
) -> PyResult<CompanionTuple> {
    let psi = trivial_char(disc, u, twists).map_err(err)?;
    let res = construct_companion(&psi, u + 1, m, bound).map_err(err)?;
    Ok((
        res.k_prime,
        coeff_list(&res.h)?,
        res.certificates.iter().map(|c| c.d).collect(),
        res.congruence.pass,
    ))
}

/// Twisted congruence a_n(f) = n^{k-1}·a_n(h) mod m between two synthesized
/// forms of infinity exponents u and u_prime.
#[pyfunction]
fn verify_companion(disc: i64, u: u64, u_prime: u64, m: u64, bound: u64) -> PyResult<bool> {
    let psi = trivial_char(disc, u, vec![]).map_err(err)?;
    let psi2 = trivial_char(disc, u_prime, vec![]).map_err(err)?;
    let f = synthesize(&psi, bound).map_err(err)?;
    let h = synthesize(&psi2, bound).map_err(err)?;
    let rep = twisted_congruence(&f, &h, u + 1, m, psi.level(), bound).map_err(err)?;
    Ok(rep.pass)
}

/// Ordinarity of the synthesized form at p.
#[pyfunction]
fn ordinary_at(disc: i64, u: u64, p: u64, bound: u64) -> PyResult<bool> {
    let psi = trivial_char(disc, u, vec![]).map_err(err)?;
    let f = synthesize(&psi, bound).map_err(err)?;
    is_ordinary_at(&f, p).map_err(err)
}

/// Inert-prime vanishing check; returns (is_cm, witness_prime_or_None).
#[pyfunction]
fn detect_cm_form(disc: i64, u: u64, bound: u64) -> PyResult<(bool, Option<u64>)> {
    let psi = trivial_char(disc, u, vec![]).map_err(err)?;
    let f = synthesize(&psi, bound).map_err(err)?;
    let rep = detect_cm(&f, disc, bound).map_err(err)?;
    Ok((rep.is_cm, rep.witness))
}

#[pymodule]
fn heckecm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(class_number, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_forms, m)?)?;
    m.add_function(wrap_pyfunction!(companion_weight, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_form, m)?)?;
    m.add_function(wrap_pyfunction!(companion, m)?)?;
    m.add_function(wrap_pyfunction!(verify_companion, m)?)?;
    m.add_function(wrap_pyfunction!(ordinary_at, m)?)?;
    m.add_function(wrap_pyfunction!(detect_cm_form, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
