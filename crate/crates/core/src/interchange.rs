//! Canonical JSON interchange documents.
//!
//! A document is `{"kind": K, "payload": P, "version": "1"}`. Canonical form has
//! sorted keys, no insignificant whitespace, and every integer written as a decimal
//! string. Rationals are strings "num/den" (or "num" when integral).

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fcrystal::FCrystal;
use crate::fgl::{BaseRing, LawKind, Scalar, TruncatedSeries, FGL1};
use crate::field::{FiniteField, Fq};
use crate::galois::GaloisRing;
use crate::geometry::{CensusReport, FZip};
use crate::k3crystal::{CharSubspace, K3Crystal, PeriodCoordinates};
use crate::matrix::Matrix;
use crate::polygon::IntegralPolygon;
use crate::quadform::{FpForm, ZpLattice};
use crate::witt::WittVector;

pub const VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Witt,
    Polygon,
    FCrystal,
    FpForm,
    ZpLattice,
    K3Crystal,
    CharSubspace,
    PeriodCoords,
    Fgl,
    FZip,
    Census,
    Report,
}

impl Kind {
    pub const ALL: [Kind; 12] = [
        Kind::Witt,
        Kind::Polygon,
        Kind::FCrystal,
        Kind::FpForm,
        Kind::ZpLattice,
        Kind::K3Crystal,
        Kind::CharSubspace,
        Kind::PeriodCoords,
        Kind::Fgl,
        Kind::FZip,
        Kind::Census,
        Kind::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Witt => "witt",
            Kind::Polygon => "polygon",
            Kind::FCrystal => "fcrystal",
            Kind::FpForm => "fpform",
            Kind::ZpLattice => "zplattice",
            Kind::K3Crystal => "k3crystal",
            Kind::CharSubspace => "charsubspace",
            Kind::PeriodCoords => "periodcoords",
            Kind::Fgl => "fgl",
            Kind::FZip => "fzip",
            Kind::Census => "census",
            Kind::Report => "report",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| bad(format!("unknown document kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub kind: Kind,
    pub payload: Value,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Rejects JSON numbers, booleans and nulls anywhere in a payload.
fn check_canonical_values(v: &Value, path: &str) -> Result<()> {
    match v {
        Value::String(_) => Ok(()),
        Value::Array(a) => a.iter().enumerate().try_for_each(|(i, x)| check_canonical_values(x, &format!("{path}[{i}]"))),
        Value::Object(m) => m.iter().try_for_each(|(k, x)| check_canonical_values(x, &format!("{path}.{k}"))),
        _ => Err(bad(format!("{path}: only strings, arrays and objects are allowed"))),
    }
}

impl Document {
    pub fn new(kind: Kind, payload: Value) -> Self {
        Document { kind, payload }
    }

    pub fn to_value(&self) -> Value {
        json!({"kind": self.kind.as_str(), "version": VERSION, "payload": self.payload})
    }

    /// Canonical serialization: serde_json's default map is ordered by key.
    pub fn to_canonical(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("JSON values serialize")
    }

    pub fn parse(text: &str) -> Result<Document> {
        let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
        let obj = v.as_object().ok_or_else(|| bad("document must be a JSON object"))?;
        if obj.len() != 3 {
            return Err(bad("document needs exactly the keys kind, payload, version"));
        }
        let version = str_field(obj, "version")?;
        if version != VERSION {
            return Err(bad(format!("unsupported version {version:?}, expected {VERSION:?}")));
        }
        let kind: Kind = str_field(obj, "kind")?.parse()?;
        let payload = obj.get("payload").ok_or_else(|| bad("missing payload"))?.clone();
        check_canonical_values(&payload, "payload")?;
        Ok(Document { kind, payload })
    }

    pub fn expect(&self, kind: Kind) -> Result<&Value> {
        if self.kind != kind {
            return Err(bad(format!("expected a {} document, got {}", kind.as_str(), self.kind.as_str())));
        }
        Ok(&self.payload)
    }
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str> {
    obj.get(key).and_then(Value::as_str).ok_or_else(|| bad(format!("missing string field {key:?}")))
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

pub fn int<T: std::fmt::Display>(x: T) -> Value {
    Value::String(x.to_string())
}

pub fn parse_int<T: FromStr>(v: &Value, what: &str) -> Result<T> {
    v.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| bad(format!("{what} must be a decimal integer string")))
}

fn int_field<T: FromStr>(v: &Value, key: &str) -> Result<T> {
    parse_int(get(v, key)?, key)
}

pub fn int_list<T: std::fmt::Display>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

fn parse_int_list<T: FromStr>(v: &Value, what: &str) -> Result<Vec<T>> {
    arr(v, what)?.iter().map(|x| parse_int(x, what)).collect()
}

fn int_matrix<T: std::fmt::Display>(m: &[Vec<T>]) -> Value {
    Value::Array(m.iter().map(|r| int_list(r)).collect())
}

fn parse_int_matrix<T: FromStr>(v: &Value, what: &str) -> Result<Vec<Vec<T>>> {
    arr(v, what)?.iter().map(|r| parse_int_list(r, what)).collect()
}

pub fn rational(q: &BigRational) -> Value {
    if q.is_integer() {
        int(q.numer())
    } else {
        Value::String(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn parse_rational(v: &Value) -> Result<BigRational> {
    let s = v.as_str().ok_or_else(|| bad("rational must be a string"))?;
    let parse = |t: &str| BigInt::from_str(t).map_err(|_| bad(format!("bad rational {s:?}")));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse(s)?)),
        Some((n, d)) => {
            let d = parse(d)?;
            if d == BigInt::from(0) {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
    }
}

pub fn field_value(k: &FiniteField) -> Value {
    json!({"p": int(k.p()), "degree": int(k.degree()), "modulus": int_list(k.modulus())})
}

pub fn parse_field(v: &Value) -> Result<FiniteField> {
    let p: u64 = int_field(v, "p")?;
    let degree: usize = int_field(v, "degree")?;
    let modulus: Vec<u64> = parse_int_list(get(v, "modulus")?, "modulus")?;
    if modulus.len() != degree + 1 {
        return Err(bad("modulus length must be degree + 1"));
    }
    FiniteField::with_modulus(p, modulus)
}

pub fn fq_value(e: &Fq) -> Value {
    int_list(e)
}

pub fn parse_fq(k: &FiniteField, v: &Value) -> Result<Fq> {
    let c: Vec<u64> = parse_int_list(v, "field element")?;
    if c.len() != k.degree() || c.iter().any(|&x| x >= k.p()) {
        return Err(bad(format!("field element must have {} reduced coordinates", k.degree())));
    }
    Ok(c)
}

// Witt vectors: {p, degree, modulus, n, coords}.

pub fn witt_value(w: &WittVector<FiniteField>) -> Value {
    let k = w.ring();
    json!({
        "p": int(k.p()),
        "degree": int(k.degree()),
        "modulus": int_list(k.modulus()),
        "n": int(w.len()),
        "coords": Value::Array(w.coords().iter().map(fq_value).collect()),
    })
}

pub fn parse_witt(v: &Value) -> Result<WittVector<FiniteField>> {
    let k = parse_field(v)?;
    let n: usize = int_field(v, "n")?;
    let coords: Vec<Fq> = arr(get(v, "coords")?, "coords")?.iter().map(|c| parse_fq(&k, c)).collect::<Result<_>>()?;
    if coords.len() != n {
        return Err(bad(format!("expected {n} Witt coordinates, got {}", coords.len())));
    }
    WittVector::new(k.clone(), k.p(), coords)
}

// Polygons: {segments: [[num, den, mult]]}.

pub fn polygon_value(poly: &IntegralPolygon) -> Value {
    let segs = poly.segments().iter().map(|(s, m)| json!([int(s.numer()), int(s.denom()), int(m)])).collect();
    json!({"segments": Value::Array(segs)})
}

pub fn parse_polygon(v: &Value) -> Result<IntegralPolygon> {
    let mut pairs = Vec::new();
    for s in arr(get(v, "segments")?, "segments")? {
        let t: Vec<BigInt> = parse_int_list(s, "segment")?;
        if t.len() != 3 || t[1] == BigInt::from(0) {
            return Err(bad("segments are [num, den, mult] with den ≠ 0"));
        }
        let m: u64 = u64::try_from(&t[2]).map_err(|_| bad("multiplicity must be a non-negative integer"))?;
        pairs.push((BigRational::new(t[0].clone(), t[1].clone()), m));
    }
    IntegralPolygon::from_slopes(&pairs)
}

// F-crystals: {field, precision, rank, matrix: [[Witt records]]}.

fn galois_matrix_value(ring: &GaloisRing, m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| witt_value(&ring.to_witt(m.get(i, j)))).collect()))
            .collect(),
    )
}

fn parse_galois_matrix(ring: &GaloisRing, v: &Value, rank: usize) -> Result<Matrix> {
    let rows = arr(v, "matrix")?;
    if rows.len() != rank {
        return Err(bad(format!("matrix must have {rank} rows")));
    }
    let mut out = Vec::with_capacity(rank);
    for r in rows {
        let r = arr(r, "matrix row")?;
        if r.len() != rank {
            return Err(bad(format!("matrix rows must have {rank} entries")));
        }
        out.push(r.iter().map(|e| ring.from_witt(&parse_witt(e)?)).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(out)
}

pub fn fcrystal_value(c: &FCrystal) -> Value {
    json!({
        "field": field_value(c.field()),
        "precision": int(c.precision()),
        "rank": int(c.rank()),
        "matrix": galois_matrix_value(c.ring(), c.matrix()),
    })
}

pub fn parse_fcrystal(v: &Value) -> Result<FCrystal> {
    let k = parse_field(get(v, "field")?)?;
    let n: u32 = int_field(v, "precision")?;
    let rank: usize = int_field(v, "rank")?;
    let ring = GaloisRing::new(&k, n)?;
    let m = parse_galois_matrix(&ring, get(v, "matrix")?, rank)?;
    FCrystal::new(&ring, m)
}

// Forms and lattices.

pub fn fpform_value(f: &FpForm) -> Value {
    json!({"p": int(f.p()), "gram": int_matrix(f.gram())})
}

pub fn parse_fpform(v: &Value) -> Result<FpForm> {
    let p: u64 = int_field(v, "p")?;
    FpForm::new(p, parse_int_matrix(get(v, "gram")?, "gram")?)
}

pub fn zplattice_value(l: &ZpLattice) -> Value {
    json!({"p": int(l.p()), "precision": int(l.precision()), "gram": int_matrix(l.gram())})
}

pub fn parse_zplattice(v: &Value) -> Result<ZpLattice> {
    ZpLattice::new(int_field(v, "p")?, int_field(v, "precision")?, parse_int_matrix(get(v, "gram")?, "gram")?)
}

// K3 crystals: {crystal, gram}.

pub fn k3crystal_value(c: &K3Crystal) -> Value {
    json!({"crystal": fcrystal_value(c.crystal()), "gram": galois_matrix_value(c.ring(), c.gram())})
}

pub fn parse_k3crystal(v: &Value) -> Result<K3Crystal> {
    let crystal = parse_fcrystal(get(v, "crystal")?)?;
    let gram = parse_galois_matrix(crystal.ring(), get(v, "gram")?, crystal.rank())?;
    K3Crystal::new(crystal, gram)
}

// Characteristic subspaces and period coordinates.

fn fq_rows(rows: &[Vec<Fq>]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(fq_value).collect())).collect())
}

fn parse_fq_rows(k: &FiniteField, v: &Value) -> Result<Vec<Vec<Fq>>> {
    arr(v, "rows")?.iter().map(|r| arr(r, "row")?.iter().map(|e| parse_fq(k, e)).collect()).collect()
}

pub fn charsubspace_value(s: &CharSubspace) -> Value {
    json!({
        "sigma0": int(s.sigma0),
        "ambient": fpform_value(&s.ambient),
        "field": field_value(&s.field),
        "basis": fq_rows(&s.basis),
    })
}

pub fn parse_charsubspace(v: &Value) -> Result<CharSubspace> {
    let k = parse_field(get(v, "field")?)?;
    let basis = parse_fq_rows(&k, get(v, "basis")?)?;
    CharSubspace::new(int_field(v, "sigma0")?, parse_fpform(get(v, "ambient")?)?, k, basis)
}

pub fn periodcoords_value(pc: &PeriodCoordinates) -> Value {
    json!({
        "sigma0": int(pc.sigma0),
        "field": field_value(&pc.field),
        "a": Value::Array(pc.a.iter().map(fq_value).collect()),
        "line_generator": Value::Array(pc.line_generator.iter().map(fq_value).collect()),
    })
}

pub fn parse_periodcoords(v: &Value) -> Result<PeriodCoordinates> {
    let k = parse_field(get(v, "field")?)?;
    let sigma0: u32 = int_field(v, "sigma0")?;
    let a: Vec<Fq> = arr(get(v, "a")?, "a")?.iter().map(|e| parse_fq(&k, e)).collect::<Result<_>>()?;
    if a.len() + 1 != sigma0 as usize {
        return Err(bad(format!("σ0 = {sigma0} needs {} coordinates", sigma0.saturating_sub(1))));
    }
    let line_generator = match v.get("line_generator") {
        Some(g) => arr(g, "line_generator")?.iter().map(|e| parse_fq(&k, e)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(PeriodCoordinates { sigma0, field: k, a, line_generator })
}

// Formal group laws: {ring, order, law_kind, terms: [[i, j, coeff]]}.

fn base_ring_value(r: &BaseRing) -> Value {
    match r {
        BaseRing::Finite(k) => json!({"type": "finite", "field": field_value(k)}),
        BaseRing::Rationals => json!({"type": "rationals"}),
    }
}

fn parse_base_ring(v: &Value) -> Result<BaseRing> {
    match get(v, "type")?.as_str() {
        Some("finite") => Ok(BaseRing::Finite(parse_field(get(v, "field")?)?)),
        Some("rationals") => Ok(BaseRing::Rationals),
        _ => Err(bad("ring type must be \"finite\" or \"rationals\"")),
    }
}

pub fn scalar_value(s: &Scalar) -> Value {
    match s {
        Scalar::F(e) => fq_value(e),
        Scalar::Q(q) => rational(q),
    }
}

fn parse_scalar(r: &BaseRing, v: &Value) -> Result<Scalar> {
    match r {
        BaseRing::Finite(k) => Ok(Scalar::F(parse_fq(k, v)?)),
        BaseRing::Rationals => Ok(Scalar::Q(parse_rational(v)?)),
    }
}

pub fn series_value(s: &TruncatedSeries) -> Value {
    let terms = s
        .terms()
        .map(|(e, c)| {
            let mut t: Vec<Value> = e[..s.vars() as usize].iter().map(int).collect();
            t.push(scalar_value(c));
            Value::Array(t)
        })
        .collect();
    json!({"ring": base_ring_value(s.ring()), "vars": int(s.vars()), "order": int(s.order()), "terms": Value::Array(terms)})
}

pub fn parse_series(v: &Value) -> Result<TruncatedSeries> {
    let ring = parse_base_ring(get(v, "ring")?)?;
    let vars: u8 = int_field(v, "vars")?;
    let order: u32 = int_field(v, "order")?;
    let mut terms = Vec::new();
    for t in arr(get(v, "terms")?, "terms")? {
        let t = arr(t, "term")?;
        if t.len() != vars as usize + 1 {
            return Err(bad("each term lists one exponent per variable and a coefficient"));
        }
        let mut e = [0u32; 3];
        for (i, x) in t[..vars as usize].iter().enumerate() {
            e[i] = parse_int(x, "exponent")?;
        }
        terms.push((e, parse_scalar(&ring, &t[vars as usize])?));
    }
    TruncatedSeries::from_terms(&ring, vars, order, terms)
}

fn law_kind_value(k: &LawKind) -> Value {
    match k {
        LawKind::Additive => json!({"type": "additive"}),
        LawKind::Multiplicative => json!({"type": "multiplicative"}),
        LawKind::Elliptic(a) => json!({"type": "elliptic", "a": int_list(a)}),
        LawKind::Custom => json!({"type": "custom"}),
    }
}

fn parse_law_kind(v: &Value) -> Result<LawKind> {
    match get(v, "type")?.as_str() {
        Some("additive") => Ok(LawKind::Additive),
        Some("multiplicative") => Ok(LawKind::Multiplicative),
        Some("custom") => Ok(LawKind::Custom),
        Some("elliptic") => {
            let a: Vec<i64> = parse_int_list(get(v, "a")?, "a")?;
            let a: [i64; 5] = a.try_into().map_err(|_| bad("elliptic laws carry a1, a2, a3, a4, a6"))?;
            Ok(LawKind::Elliptic(a))
        }
        _ => Err(bad("unknown law type")),
    }
}

pub fn fgl_value(f: &FGL1) -> Value {
    json!({"law": series_value(f.law()), "law_kind": law_kind_value(f.kind())})
}

pub fn parse_fgl(v: &Value) -> Result<FGL1> {
    FGL1::new(parse_series(get(v, "law")?)?, parse_law_kind(get(v, "law_kind")?)?)
}

// F-zips and census.

pub fn fzip_value(z: &FZip) -> Value {
    json!({
        "dim": int(z.dim),
        "c": int_list(&z.c),
        "d": int_list(&z.d),
        "tau": int_list(&z.tau),
        "intersections": int_matrix(&z.intersections),
    })
}

pub fn parse_fzip(v: &Value) -> Result<FZip> {
    let z = FZip::new(
        int_field(v, "dim")?,
        parse_int_list(get(v, "c")?, "c")?,
        parse_int_list(get(v, "d")?, "d")?,
        parse_int_matrix(get(v, "intersections")?, "intersections")?,
    )?;
    let tau: Vec<usize> = parse_int_list(get(v, "tau")?, "tau")?;
    if tau != z.tau {
        return Err(bad("tau disagrees with the filtration dimensions"));
    }
    Ok(z)
}

pub fn census_value(c: &CensusReport) -> Value {
    json!({
        "p": int(c.p),
        "field": field_value(&c.field),
        "j_invariants": Value::Array(c.j_invariants.iter().map(fq_value).collect()),
        "automorphism_orders": int_list(&c.automorphism_orders),
        "mass": rational(&c.mass),
        "classical_count": int(c.classical_count),
        "epsilon_p": int(c.epsilon_p),
    })
}

pub fn parse_census(v: &Value) -> Result<CensusReport> {
    let field = parse_field(get(v, "field")?)?;
    let j_invariants: Vec<Fq> = arr(get(v, "j_invariants")?, "j_invariants")?.iter().map(|e| parse_fq(&field, e)).collect::<Result<_>>()?;
    let automorphism_orders: Vec<u64> = parse_int_list(get(v, "automorphism_orders")?, "automorphism_orders")?;
    if automorphism_orders.len() != j_invariants.len() {
        return Err(bad("one automorphism order per j-invariant"));
    }
    let mass = parse_rational(get(v, "mass")?)?;
    let expected: BigRational = automorphism_orders.iter().map(|&a| BigRational::new(1.into(), BigInt::from(a))).sum();
    if mass != expected {
        return Err(bad("mass differs from Σ 1/|Aut|"));
    }
    Ok(CensusReport {
        p: int_field(v, "p")?,
        j_invariants,
        automorphism_orders,
        mass,
        classical_count: int_field(v, "classical_count")?,
        epsilon_p: int_field(v, "epsilon_p")?,
        field,
    })
}

/// Any parsed object, for validation of arbitrary documents.
#[derive(Clone, Debug)]
pub enum Parsed {
    Witt(WittVector<FiniteField>),
    Polygon(IntegralPolygon),
    FCrystal(FCrystal),
    FpForm(FpForm),
    ZpLattice(ZpLattice),
    K3Crystal(Box<K3Crystal>),
    CharSubspace(CharSubspace),
    PeriodCoords(PeriodCoordinates),
    Fgl(Box<FGL1>),
    FZip(FZip),
    Census(CensusReport),
    Report(Value),
}

impl Document {
    /// Decodes the payload and checks the type's invariants.
    pub fn decode(&self) -> Result<Parsed> {
        let v = &self.payload;
        Ok(match self.kind {
            Kind::Witt => Parsed::Witt(parse_witt(v)?),
            Kind::Polygon => Parsed::Polygon(parse_polygon(v)?),
            Kind::FCrystal => Parsed::FCrystal(parse_fcrystal(v)?),
            Kind::FpForm => Parsed::FpForm(parse_fpform(v)?),
            Kind::ZpLattice => Parsed::ZpLattice(parse_zplattice(v)?),
            Kind::K3Crystal => Parsed::K3Crystal(Box::new(parse_k3crystal(v)?)),
            Kind::CharSubspace => Parsed::CharSubspace(parse_charsubspace(v)?),
            Kind::PeriodCoords => Parsed::PeriodCoords(parse_periodcoords(v)?),
            Kind::Fgl => Parsed::Fgl(Box::new(parse_fgl(v)?)),
            Kind::FZip => Parsed::FZip(parse_fzip(v)?),
            Kind::Census => Parsed::Census(parse_census(v)?),
            Kind::Report => {
                if !v.is_object() {
                    return Err(bad("report payload must be an object"));
                }
                Parsed::Report(v.clone())
            }
        })
    }
}

impl Parsed {
    /// Re-encodes into a document of the same kind.
    pub fn encode(&self) -> Document {
        match self {
            Parsed::Witt(w) => Document::new(Kind::Witt, witt_value(w)),
            Parsed::Polygon(p) => Document::new(Kind::Polygon, polygon_value(p)),
            Parsed::FCrystal(c) => Document::new(Kind::FCrystal, fcrystal_value(c)),
            Parsed::FpForm(f) => Document::new(Kind::FpForm, fpform_value(f)),
            Parsed::ZpLattice(l) => Document::new(Kind::ZpLattice, zplattice_value(l)),
            Parsed::K3Crystal(c) => Document::new(Kind::K3Crystal, k3crystal_value(c)),
            Parsed::CharSubspace(s) => Document::new(Kind::CharSubspace, charsubspace_value(s)),
            Parsed::PeriodCoords(pc) => Document::new(Kind::PeriodCoords, periodcoords_value(pc)),
            Parsed::Fgl(f) => Document::new(Kind::Fgl, fgl_value(f)),
            Parsed::FZip(z) => Document::new(Kind::FZip, fzip_value(z)),
            Parsed::Census(c) => Document::new(Kind::Census, census_value(c)),
            Parsed::Report(v) => Document::new(Kind::Report, v.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::gm;

    #[test]
    fn canonical_form_is_stable() {
        let k = FiniteField::new(3, 2).unwrap();
        let c = FCrystal::standard_n(2, 3, &k, 5).unwrap();
        let doc = Document::new(Kind::FCrystal, fcrystal_value(&c));
        let text = doc.to_canonical();
        assert!(!text.contains(' ') && !text.contains('\n'));
        let back = Document::parse(&text).unwrap();
        assert_eq!(back.to_canonical(), text);
        match back.decode().unwrap() {
            Parsed::FCrystal(d) => assert_eq!(d, c),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn numbers_and_versions_rejected() {
        assert!(Document::parse(r#"{"kind":"fpform","payload":{"p":3,"gram":[]},"version":"1"}"#).is_err());
        assert!(Document::parse(r#"{"kind":"fpform","payload":{"p":"3","gram":[["1"]]},"version":"2"}"#).is_err());
        assert!(Document::parse(r#"{"kind":"nope","payload":{},"version":"1"}"#).is_err());
    }

    #[test]
    fn fgl_round_trip() {
        let f = gm(&BaseRing::Rationals, 5).unwrap();
        let doc = Parsed::Fgl(Box::new(f.clone())).encode();
        let back = Document::parse(&doc.to_canonical()).unwrap().decode().unwrap();
        assert!(matches!(back, Parsed::Fgl(g) if *g == f));
    }
}
