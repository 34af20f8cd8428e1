//! One handler per command group. Handlers return an `Output`; main decides how to print it.

use std::collections::BTreeMap;

use crystalline::fcrystal::FCrystal;
use crystalline::fgl::{self, cartier_crystal, elliptic_fgl, BaseRing, HeightResult, TruncatedSeries, Weierstrass, FGL1};
use crystalline::geometry::{
    evdg_class, igusa_artin_mazur_check, quartic_frobenius_h2, supersingular_census, weyl_coset_count, BrauerHeight,
    Quartic, Stratum,
};
use crystalline::interchange::{self as ic, Document, Kind, Parsed};
use crystalline::k3crystal::{
    crystal_from_periods, enumerate_generatrices, periods_from_crystal, recommended_precision, sample_strict_subspace,
    subspace_from_coordinates, CharSubspace, K3Crystal,
};
use crystalline::polygon::lies_on_or_above;
use crystalline::quadform::{build_nonneutral, disc_class, is_neutral, ss_lattice_local, witt_split, DiscClass};
use crystalline::witt::WittVector;
use crystalline::{Error, FiniteField, Rationals};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::io::{fq_text, list_text, load_kind, read_text, Output};
use crate::CliError;

type Res = Result<Output, CliError>;

const DEFAULT_PRECISION: u32 = 8;

pub struct Ctx {
    pub seed: u64,
    pub precision: Option<u32>,
}

impl Ctx {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn precision(&self, explicit: Option<u32>, fallback: u32) -> u32 {
        explicit.or(self.precision).unwrap_or(fallback)
    }
}

fn field(f: &FieldArgs) -> Result<FiniteField, CliError> {
    Ok(FiniteField::new(f.p, f.degree)?)
}

fn witt_operand(op: &str) -> Result<WittVector<FiniteField>, CliError> {
    match load_kind(op, &[Kind::Witt])? {
        Parsed::Witt(w) => Ok(w),
        _ => unreachable!("kind checked"),
    }
}

fn witt_out(w: &WittVector<FiniteField>) -> Output {
    Output::object(Document::new(Kind::Witt, ic::witt_value(w)))
}

pub fn witt(cmd: &WittCmd, ctx: &Ctx) -> Res {
    Ok(match cmd {
        WittCmd::Add { a, b } => witt_out(&witt_operand(a)?.add(&witt_operand(b)?)?),
        WittCmd::Mul { a, b } => witt_out(&witt_operand(a)?.mul(&witt_operand(b)?)?),
        WittCmd::Frob { a } => witt_out(&witt_operand(a)?.frobenius()?),
        WittCmd::Versch { a } => witt_out(&witt_operand(a)?.verschiebung()?),
        WittCmd::Fromint { m, field: f, n } => {
            let m: num_bigint::BigInt = m.parse().map_err(|_| CliError::Usage(format!("--m {m:?} is not an integer")))?;
            witt_out(&WittVector::from_int(field(f)?, f.p, *n, &m)?)
        }
        WittCmd::Random { field: f, n } => witt_out(&WittVector::random(&field(f)?, *n, &mut ctx.rng())),
        WittCmd::Ghost { p, coords } => {
            let xs = coords
                .iter()
                .map(|c| ic::parse_rational(&Value::String(c.trim().to_string())))
                .collect::<crystalline::Result<Vec<_>>>()?;
            let ghost = WittVector::new(Rationals, *p, xs)?.ghost()?;
            let text = list_text(&ghost);
            Output::report(json!({"ghost": ghost.iter().map(ic::rational).collect::<Vec<_>>()}), text)
        }
    })
}

fn polygon_operand(op: &str) -> Result<crystalline::polygon::IntegralPolygon, CliError> {
    match load_kind(op, &[Kind::Polygon])? {
        Parsed::Polygon(p) => Ok(p),
        _ => unreachable!("kind checked"),
    }
}

pub fn polygon(cmd: &PolygonCmd) -> Res {
    let PolygonCmd::Compare { upper, lower } = cmd;
    let (u, l) = (polygon_operand(upper)?, polygon_operand(lower)?);
    let d = lies_on_or_above(&u, &l)?;
    let text = match d.witness {
        Some(x) if !d.holds => format!("upper lies below lower at x = {x}"),
        _ if !d.endpoints_equal => "endpoints differ".to_string(),
        _ => "upper lies on or above lower; endpoints agree".to_string(),
    };
    let witness = d.witness.map_or(Value::Null, ic::int);
    let mut payload = json!({"holds": d.holds.to_string(), "endpoints_equal": d.endpoints_equal.to_string()});
    if !witness.is_null() {
        payload["witness"] = witness;
    }
    Ok(Output::report(payload, text))
}

fn crystal_operand(op: &str) -> Result<FCrystal, CliError> {
    match load_kind(op, &[Kind::FCrystal, Kind::K3Crystal])? {
        Parsed::FCrystal(c) => Ok(c),
        Parsed::K3Crystal(c) => Ok(c.crystal().clone()),
        _ => unreachable!("kind checked"),
    }
}

fn slopes_text(s: &[(num_rational::BigRational, u64)]) -> String {
    let parts: Vec<String> = s.iter().map(|(a, m)| format!("{a} ×{m}")).collect();
    parts.join(", ")
}

pub fn crystal(cmd: &CrystalCmd, ctx: &Ctx) -> Res {
    Ok(match cmd {
        CrystalCmd::Hodge { crystal } => {
            let c = crystal_operand(crystal)?;
            let h = c.hodge_numbers()?;
            Output::new(Document::new(Kind::Polygon, ic::polygon_value(&c.hodge_polygon()?)), list_text(&h))
        }
        CrystalCmd::Newton { crystal } => {
            let s = crystal_operand(crystal)?.newton_slopes()?;
            if !s.certified {
                return Err(Error::InsufficientPrecision("Newton slopes changed when precision was doubled".into()).into());
            }
            Output::new(Document::new(Kind::Polygon, ic::polygon_value(&s.polygon)), slopes_text(s.slopes()))
        }
        CrystalCmd::Tate { crystal } => {
            let t = crystal_operand(crystal)?.tate_module()?;
            let text = format!("Tate module rank {} (stable: {}, reliable to p^{})", t.rank, t.stable, t.reliable_precision);
            Output::report(
                json!({"rank": ic::int(t.rank), "stable": t.stable.to_string(), "reliable_precision": ic::int(t.reliable_precision)}),
                text,
            )
        }
        CrystalCmd::Mazur { crystal } => {
            let r = crystal_operand(crystal)?.verify_mazur()?;
            let text = format!(
                "Hodge {}, Newton {}: {}",
                list_text(&r.hodge),
                slopes_text(r.newton.slopes()),
                if r.holds() { "Newton lies on or above Hodge" } else { "Mazur's inequality fails" }
            );
            Output::report(
                json!({
                    "holds": r.holds().to_string(),
                    "hodge": ic::int_list(&r.hodge),
                    "newton": ic::polygon_value(&r.newton.polygon),
                }),
                text,
            )
        }
        CrystalCmd::Standard { kind, r, s, field: f, n } => {
            let k = field(f)?;
            let n = ctx.precision(*n, DEFAULT_PRECISION);
            let c = match kind {
                StandardKind::M => FCrystal::standard_m(*r, *s, &k, n)?,
                StandardKind::N => FCrystal::standard_n(*r, *s, &k, n)?,
            };
            Output::object(Document::new(Kind::FCrystal, ic::fcrystal_value(&c)))
        }
        CrystalCmd::Random { rank, max_exp, field: f, n } => {
            let k = field(f)?;
            let n = ctx.precision(*n, *rank as u32 * max_exp + 4);
            let c = FCrystal::random(&k, n, *rank, *max_exp, &mut ctx.rng())?;
            Output::object(Document::new(Kind::FCrystal, ic::fcrystal_value(&c)))
        }
    })
}

fn fpform_operand(op: &str) -> Result<crystalline::quadform::FpForm, CliError> {
    match load_kind(op, &[Kind::FpForm])? {
        Parsed::FpForm(f) => Ok(f),
        _ => unreachable!("kind checked"),
    }
}

fn lattice_operand(op: &str) -> Result<crystalline::quadform::ZpLattice, CliError> {
    match load_kind(op, &[Kind::ZpLattice])? {
        Parsed::ZpLattice(l) => Ok(l),
        _ => unreachable!("kind checked"),
    }
}

pub fn form(cmd: &FormCmd, ctx: &Ctx) -> Res {
    Ok(match cmd {
        FormCmd::Disc { form } => {
            let name = match disc_class(&fpform_operand(form)?) {
                DiscClass::Zero => "zero",
                DiscClass::Square => "square",
                DiscClass::Nonsquare => "nonsquare",
            };
            Output::report(json!({"disc": name}), name)
        }
        FormCmd::Split { form } => {
            let (planes, kernel) = witt_split(&fpform_operand(form)?, ctx.seed)?;
            let text = format!("{planes} hyperbolic plane(s) ⊥ anisotropic kernel of dimension {}", kernel.dim());
            Output::report(json!({"hyperbolic_planes": ic::int(planes), "kernel": ic::fpform_value(&kernel)}), text)
        }
        FormCmd::Neutral { form } => {
            let b = is_neutral(&fpform_operand(form)?, ctx.seed)?;
            Output::report(json!({"neutral": b.to_string()}), b.to_string())
        }
        FormCmd::Hasse { lattice } => {
            let h = lattice_operand(lattice)?.hasse_invariant()?;
            Output::report(json!({"hasse": ic::int(h)}), h.to_string())
        }
        FormCmd::Jordan { lattice } => {
            let j = lattice_operand(lattice)?.jordan_decompose()?;
            let text = format!("p·G0 ⊥ G1 with rank G0 = {}, rank G1 = {}", j.g0.rank(), j.g1.rank());
            Output::report(
                json!({"g0": ic::zplattice_value(&j.g0), "g1": ic::zplattice_value(&j.g1), "base_change": j.base_change.iter().map(|r| ic::int_list(r)).collect::<Vec<_>>()}),
                text,
            )
        }
        FormCmd::Sslattice { sigma0, p, n } => {
            let l = ss_lattice_local(*sigma0, *p, ctx.precision(*n, DEFAULT_PRECISION))?;
            Output::object(Document::new(Kind::ZpLattice, ic::zplattice_value(&l)))
        }
        FormCmd::Nonneutral { sigma0, p } => {
            Output::object(Document::new(Kind::FpForm, ic::fpform_value(&build_nonneutral(*sigma0, *p)?)))
        }
    })
}

fn k3_operand(op: &str) -> Result<K3Crystal, CliError> {
    match load_kind(op, &[Kind::K3Crystal])? {
        Parsed::K3Crystal(c) => Ok(*c),
        _ => unreachable!("kind checked"),
    }
}

fn charsub_out(s: &CharSubspace) -> Output {
    Output::object(Document::new(Kind::CharSubspace, ic::charsubspace_value(s)))
}

pub fn k3(cmd: &K3Cmd, ctx: &Ctx) -> Res {
    Ok(match cmd {
        K3Cmd::Axioms { crystal } => {
            let r = k3_operand(crystal)?.check_axioms()?;
            let lines: Vec<String> = r
                .checks
                .iter()
                .map(|c| format!("axiom {} ({}): {}{}", c.axiom, c.name, if c.passed { "ok" } else { "FAILS" }, if c.passed { String::new() } else { format!(" — {}", c.witness) }))
                .collect();
            let checks: Vec<Value> = r
                .checks
                .iter()
                .map(|c| json!({"axiom": ic::int(c.axiom), "name": c.name, "passed": c.passed.to_string(), "witness": c.witness}))
                .collect();
            Output::report(json!({"all_passed": r.all_passed().to_string(), "checks": checks}), lines.join("\n"))
        }
        K3Cmd::Ss { crystal } => {
            let b = k3_operand(crystal)?.is_supersingular()?;
            Output::report(json!({"supersingular": b.to_string()}), b.to_string())
        }
        K3Cmd::Artin { crystal } => {
            let s = k3_operand(crystal)?.artin_invariant()?;
            Output::report(json!({"artin_invariant": ic::int(s)}), s.to_string())
        }
        K3Cmd::Periods { crystal } => charsub_out(&periods_from_crystal(&k3_operand(crystal)?)?.subspace),
        K3Cmd::Frompc { periods, n } => {
            let sub = match load_kind(periods, &[Kind::CharSubspace, Kind::PeriodCoords])? {
                Parsed::CharSubspace(s) => s,
                Parsed::PeriodCoords(pc) => subspace_from_coordinates(&pc)?,
                _ => unreachable!("kind checked"),
            };
            let n = ctx.precision(*n, recommended_precision(22, sub.field.degree()));
            let c = crystal_from_periods(sub.sigma0, &sub, n)?;
            Output::object(Document::new(Kind::K3Crystal, ic::k3crystal_value(&c)))
        }
        K3Cmd::Enumerate { sigma0, p, m } => {
            let g = enumerate_generatrices(*sigma0, *p, *m)?;
            let text = format!(
                "{} totally isotropic subspaces K with dim(K + φK) = σ0 + 1, {} of them characteristic",
                g.count_total, g.count_characteristic
            );
            Output::report(
                json!({"count_total": ic::int(g.count_total), "count_characteristic": ic::int(g.count_characteristic)}),
                text,
            )
        }
        K3Cmd::Sample { sigma0, p, m } => {
            let ambient = build_nonneutral(*sigma0, *p)?;
            let k = FiniteField::new(*p, *m)?;
            charsub_out(&sample_strict_subspace(&ambient, *sigma0, &k, 1_000_000, &mut ctx.rng())?)
        }
    })
}

fn base_ring(p: Option<u64>) -> Result<BaseRing, CliError> {
    Ok(match p {
        Some(p) => BaseRing::finite(&FiniteField::prime(p)?),
        None => BaseRing::Rationals,
    })
}

fn law_from(src: &LawSource, default_order: u32) -> Result<FGL1, CliError> {
    let ring = base_ring(src.p)?;
    let n = src.n.unwrap_or(default_order);
    if let Some(op) = &src.law {
        return match load_kind(op, &[Kind::Fgl])? {
            Parsed::Fgl(f) => Ok(*f),
            _ => unreachable!("kind checked"),
        };
    }
    if src.gm {
        return Ok(fgl::gm(&ring, n)?);
    }
    if src.ga {
        return Ok(fgl::ga(&ring, n)?);
    }
    if let Some(a) = &src.elliptic {
        let coeffs: [i64; 5] = a.as_slice().try_into().map_err(|_| CliError::Usage("--elliptic takes five coefficients".into()))?;
        return Ok(elliptic_fgl(&Weierstrass::new(coeffs), &ring, n)?);
    }
    Err(CliError::Usage("give a formal group law document or one of --gm, --ga, --elliptic".into()))
}

fn fgl_out(f: &FGL1) -> Output {
    Output::object(Document::new(Kind::Fgl, ic::fgl_value(f)))
}

fn series_text(s: &TruncatedSeries) -> String {
    let parts: Vec<String> = s.terms().map(|(e, c)| format!("({c})·x^{}", e[0])).collect();
    format!("{} + O(x^{})", if parts.is_empty() { "0".into() } else { parts.join(" + ") }, s.order() + 1)
}

pub fn fgl(cmd: &FglCmd, ctx: &Ctx) -> Res {
    Ok(match cmd {
        FglCmd::Gm { p, n } => fgl_out(&fgl::gm(&base_ring(*p)?, *n)?),
        FglCmd::Ga { p, n } => fgl_out(&fgl::ga(&base_ring(*p)?, *n)?),
        FglCmd::Elliptic { a, p, n } => {
            let coeffs: [i64; 5] = a.as_slice().try_into().map_err(|_| CliError::Usage("--a takes five coefficients".into()))?;
            fgl_out(&elliptic_fgl(&Weierstrass::new(coeffs), &base_ring(*p)?, *n)?)
        }
        FglCmd::Height { source, max_h } => {
            let max_h = max_h.unwrap_or(if source.elliptic.is_some() { 2 } else { fgl::DEFAULT_MAX_HEIGHT });
            let q = source.p.map_or(2, |p| p.saturating_pow(max_h).min(u32::MAX as u64)) as u32;
            let f = law_from(source, q.max(2))?;
            let (text, payload) = match f.height(max_h)? {
                HeightResult::Finite(h, lead) => {
                    (format!("Finite({h})"), json!({"height": ic::int(h), "leading": ic::scalar_value(&lead)}))
                }
                HeightResult::ExceedsBound(b) => (format!("ExceedsBound({b})"), json!({"exceeds_bound": ic::int(b)})),
            };
            Output::report(payload, text)
        }
        FglCmd::Log { source } => {
            let log = law_from(source, 10)?.logarithm()?;
            Output::report(json!({"series": ic::series_value(&log)}), series_text(&log))
        }
        FglCmd::Mulbyn { source, k } => {
            let s = law_from(source, 10)?.mul_by_n(*k)?;
            Output::report(json!({"series": ic::series_value(&s)}), series_text(&s))
        }
        FglCmd::Cartier { h, field: f, n } => {
            let c = cartier_crystal(*h, &field(f)?, ctx.precision(*n, 2 * h + 4))?;
            Output::object(Document::new(Kind::FCrystal, ic::fcrystal_value(&c)))
        }
    })
}

pub fn census(p: u64) -> Res {
    let c = supersingular_census(p)?;
    let mut text = format!("supersingular j-invariants over F_{p}² (p = {p})\n{:>12}  {:>5}\n", "j", "|Aut|");
    for (j, a) in c.j_invariants.iter().zip(&c.automorphism_orders) {
        text.push_str(&format!("{:>12}  {:>5}\n", fq_text(j), a));
    }
    text.push_str(&format!("classes: {} = [p/12] + ε_p with ε_p = {}\nmass Σ 1/|Aut| = {}", c.j_invariants.len(), c.epsilon_p, c.mass));
    Ok(Output::new(Document::new(Kind::Census, ic::census_value(&c)), text))
}

/// Parses `c*x0^a*x1^b...` terms joined by + and -.
pub fn parse_quartic(p: u64, text: &str) -> Result<Quartic, CliError> {
    let bad = |m: String| CliError::Usage(format!("polynomial: {m}"));
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(bad("empty input".into()));
    }
    let mut terms: BTreeMap<[u32; 4], i64> = BTreeMap::new();
    let mut rest = cleaned.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        rest = tail;
        let mut coeff = sign;
        let mut exps = [0u32; 4];
        for factor in term.split('*') {
            if let Some(var) = factor.strip_prefix('x') {
                let (idx, e) = var.split_once('^').unwrap_or((var, "1"));
                let i: usize = idx.parse().ok().filter(|&i| i < 4).ok_or_else(|| bad(format!("unknown variable x{idx}")))?;
                exps[i] += e.parse::<u32>().map_err(|_| bad(format!("bad exponent in {factor:?}")))?;
            } else {
                coeff *= factor.parse::<i64>().map_err(|_| bad(format!("bad factor {factor:?}")))?;
            }
        }
        *terms.entry(exps).or_insert(0) += coeff;
    }
    let list: Vec<([u32; 4], i64)> = terms.into_iter().collect();
    Ok(Quartic::new(p, &list)?)
}

pub fn quartic(cmd: &QuarticCmd) -> Res {
    let QuarticCmd::H2 { p, poly } = cmd;
    let f = parse_quartic(*p, &read_text(poly)?)?;
    let h = quartic_frobenius_h2(&f);
    let text = format!("{h} ({})", if h == 0 { "not ordinary" } else { "ordinary" });
    Ok(Output::report(json!({"h2": ic::int(h), "ordinary": (h != 0).to_string()}), text))
}

pub fn strata(cmd: &StrataCmd) -> Res {
    Ok(match cmd {
        StrataCmd::Class { i, p, artin } => {
            let stratum = match (i.as_str(), artin) {
                ("inf" | "∞", false) => Stratum::Supersingular,
                (s, a) => {
                    let i: u32 = s.parse().map_err(|_| CliError::Usage(format!("--i {s:?} is neither an integer nor inf")))?;
                    if *a { Stratum::Artin(i) } else { Stratum::Height(i) }
                }
            };
            let c = evdg_class(stratum, *p)?;
            let text = format!("{} · λ1^{}", c.coefficient, c.lambda_power);
            Output::report(json!({"coefficient": ic::rational(&c.coefficient), "lambda_power": ic::int(c.lambda_power)}), text)
        }
        StrataCmd::Cosets => {
            let c = weyl_coset_count()?;
            let text = format!("{} cosets; ρ⁻¹(1) takes the values {}", c.num_cosets, list_text(&c.invariants));
            Output::report(
                json!({
                    "num_cosets": ic::int(c.num_cosets),
                    "order_w": ic::int(&c.order_w),
                    "invariants": ic::int_list(&c.invariants),
                    "representatives": c.representatives.iter().map(|r| ic::int_list(r)).collect::<Vec<_>>(),
                }),
                text,
            )
        }
    })
}

pub fn check(cmd: &CheckCmd) -> Res {
    let CheckCmd::Iam { rho, height } = cmd;
    let h = match height.as_str() {
        "inf" | "∞" => BrauerHeight::Infinite,
        s => BrauerHeight::Finite(s.parse().map_err(|_| CliError::Usage(format!("--height {s:?} is neither an integer nor inf")))?),
    };
    let v = igusa_artin_mazur_check(*rho, h)?;
    let text = if v.consistent { "consistent".to_string() } else { format!("inconsistent: {}", v.flags.join("; ")) };
    Ok(Output::report(json!({"consistent": v.consistent.to_string(), "flags": v.flags}), text))
}

pub fn validate(files: &[String]) -> Res {
    let mut lines = Vec::new();
    let mut results = Vec::new();
    for f in files {
        let text = read_text(f)?;
        let doc = Document::parse(&text)?;
        let again = doc.decode()?.encode().to_canonical();
        let identical = again == text.trim_end_matches('\n');
        if !identical {
            return Err(Error::Parse(format!("{f}: re-serialization differs from the input")).into());
        }
        lines.push(format!("{f}: {} ok", doc.kind.as_str()));
        results.push(json!({"file": f, "kind": doc.kind.as_str()}));
    }
    Ok(Output::report(json!({"validated": results}), lines.join("\n")))
}
