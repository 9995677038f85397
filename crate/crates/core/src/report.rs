//! Deterministic JSON, Markdown and CSV renderings of cones and tables.

use serde::Serialize;
use serde_json::{json, Value};

use crate::additivity::coords::{alpha_from, alpha_vector};
use crate::additivity::{block_cone, AdditivityCone, Basis, RayCertificate};
use crate::decouplings::{
    case_cross_reference, decoupling_json, enumerate_standard, esv_term, output_label, reduce_by_symmetry,
    DecouplingCode, DecouplingJson, Reduction,
};
use crate::entropic::formula::{render_decomposed, render_pretty};
use crate::error::Result;
use crate::polyhedra::Rational;

#[derive(Clone, Debug, Serialize)]
pub struct TermReport {
    pub kind: String,
    pub inequality: String,
    pub coefficient: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayReport {
    pub vector: Vec<Rational>,
    pub formula: String,
    pub lineality: bool,
    pub certificate: Option<Vec<TermReport>>,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub name: String,
    pub tight_on: Vec<usize>,
    pub equality: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    pub class: Value,
    pub basis: Basis,
    pub coords: Vec<String>,
    pub boundedness: Vec<Vec<Rational>>,
    pub equalities: Vec<Vec<Rational>>,
    pub equality_formulas: Vec<String>,
    pub facets: Vec<Vec<Rational>>,
    pub facet_formulas: Vec<String>,
    pub rays: Vec<RayReport>,
    pub witnesses: Vec<WitnessReport>,
    pub exact: bool,
    pub gaps: Vec<String>,
}

pub fn class_value(code: &DecouplingCode) -> Value {
    match code.pairs() {
        [(a, b)] => json!([a, b]),
        pairs => json!(pairs.iter().map(|(a, b)| [a, b]).collect::<Vec<_>>()),
    }
}

/// `a_V + 2a_BV - a_EV` style rendering of a row over named coordinates.
pub fn linear_form(names: &[String], row: &[Rational]) -> String {
    let mut out = String::new();
    for (name, c) in names.iter().zip(row) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let coef = if mag == Rational::one() { String::new() } else { mag.to_string() };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&coef);
        out.push_str(name);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// `row ≥ 0`, flipped to `≤ 0` when every coefficient is negative.
pub fn inequality_form(names: &[String], row: &[Rational]) -> String {
    if row.iter().all(|x| !x.is_positive()) {
        let neg: Vec<Rational> = row.iter().map(|x| -x).collect();
        format!("{} <= 0", linear_form(names, &neg))
    } else {
        format!("{} >= 0", linear_form(names, row))
    }
}

fn term_reports(c: &RayCertificate) -> Vec<TermReport> {
    c.terms
        .iter()
        .map(|(inst, k)| TermReport {
            kind: serde_json::to_value(inst.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            inequality: inst.describe(),
            coefficient: k.clone(),
        })
        .collect()
}

pub fn cone_report(cone: &AdditivityCone) -> ConeReport {
    let names = cone.coord_names();
    let generators = cone.generators();
    let n_rays = cone.rays.len();
    let rays = generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let cert = cone.certificates.iter().find(|c| &alpha_vector(&c.alpha, &cone.coords) == g);
            RayReport {
                vector: g.clone(),
                formula: formula_of(cone, g),
                lineality: i >= n_rays,
                certificate: cert.map(term_reports),
                verified: cert.is_some_and(|c| c.verify(&cone.code)),
            }
        })
        .collect();
    ConeReport {
        class: class_value(&cone.code),
        basis: cone.basis,
        coords: names.clone(),
        boundedness: cone.boundedness.clone(),
        equalities: cone.equalities.clone(),
        equality_formulas: cone.equalities.iter().map(|e| format!("{} = 0", linear_form(&names, e))).collect(),
        facets: cone.facets.clone(),
        facet_formulas: cone.facets.iter().map(|f| inequality_form(&names, f)).collect(),
        rays,
        witnesses: cone
            .witnesses
            .iter()
            .map(|w| WitnessReport { name: w.name.clone(), tight_on: w.tight_on.clone(), equality: w.equality })
            .collect(),
        exact: cone.is_exact(),
        gaps: cone.gaps.clone(),
    }
}

fn greek(s: &str) -> String {
    s.replace("a_", "α_").replace(">=", "≥").replace("<=", "≤")
}

pub fn formula_of(cone: &AdditivityCone, v: &[Rational]) -> String {
    match alpha_from(cone.n_aux, &cone.coords, v) {
        Ok(a) => render_pretty(&a),
        Err(_) => linear_form(&cone.coord_names(), v),
    }
}

/// Formulas of the displayed rays, lineality marked `±`.
pub fn ray_formulas(cone: &AdditivityCone) -> Vec<String> {
    let mut out: Vec<String> = cone.rays.iter().map(|r| formula_of(cone, r)).collect();
    for l in &cone.lineality {
        let f = formula_of(cone, l);
        if f.contains(' ') {
            out.push(format!("±[{f}]"));
        } else {
            out.push(format!("±{}", f.trim_start_matches('-')));
        }
    }
    out
}

/// Constraint list of a cone for tables: extra equalities, then facets.
pub fn constraint_formulas(cone: &AdditivityCone) -> Vec<String> {
    let names = cone.coord_names();
    let mut out: Vec<String> = cone.equalities.iter().map(|e| format!("{} = 0", linear_form(&names, e))).collect();
    out.extend(cone.facets.iter().map(|f| inequality_form(&names, f)));
    out
}

/// One row of the single-variable summary table.
#[derive(Clone, Debug)]
pub struct SummaryRow {
    pub case: String,
    pub code: DecouplingCode,
    pub equivalents: Vec<DecouplingCode>,
    pub cone: AdditivityCone,
}

/// The five duality-reduced cases, each under its table label, followed by
/// the two swap classes that duality folds into other cases.
pub fn summary_rows() -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for r in case_cross_reference()? {
        let equivalents = r.members.iter().filter(|c| **c != r.label).cloned().collect();
        rows.push(SummaryRow { case: r.case.to_string(), cone: block_cone(&r.label, Basis::Quantum)?, code: r.label, equivalents });
    }
    let seven = reduce_by_symmetry(&enumerate_standard(1)?, Reduction::Swaps)?;
    for (i, rep) in [(1u8, 0u8), (0, 0)].iter().enumerate() {
        let code = DecouplingCode::single(rep.0, rep.1)?;
        let class = seven.iter().find(|c| c.representative == code).expect("swap class exists");
        rows.push(SummaryRow {
            case: format!("SM-{}", 6 + i),
            cone: block_cone(&code, Basis::Quantum)?,
            code,
            equivalents: class.equivalents.clone(),
        });
    }
    Ok(rows)
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn codes_list(codes: &[DecouplingCode]) -> String {
    codes.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn summary_markdown(rows: &[SummaryRow]) -> String {
    let mut s = String::from("| Case | (a,b) | M̂1 | M̃2 | Equivalent | Additive cone | Extreme rays |\n");
    s.push_str("|---|---|---|---|---|---|---|\n");
    for r in rows {
        let (a, b) = r.code.as_single().expect("single-variable row");
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            r.case,
            r.code,
            output_label(a, 1),
            output_label(b, 2),
            codes_list(&r.equivalents),
            md_escape(&greek(&constraint_formulas(&r.cone).join("; "))),
            md_escape(&ray_formulas(&r.cone).join(", ")),
        ));
    }
    s
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Validation(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Validation(format!("csv: {e}"))
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    csv_string(
        &["case", "code", "m_hat_1", "m_tilde_2", "equivalents", "constraints", "rays"],
        rows.iter()
            .map(|r| {
                let (a, b) = r.code.as_single().expect("single-variable row");
                vec![
                    r.case.clone(),
                    r.code.to_string(),
                    output_label(a, 1),
                    output_label(b, 2),
                    codes_list(&r.equivalents),
                    constraint_formulas(&r.cone).join("; "),
                    ray_formulas(&r.cone).join("; "),
                ]
            })
            .collect(),
    )
}

/// Markdown for a single cone: constraints, rays, witnesses.
pub fn cone_markdown(title: &str, cone: &AdditivityCone) -> String {
    let mut s = format!("## {title}\n\nCoordinates: {}\n\n", cone.coord_names().join(", "));
    if !cone.boundedness.is_empty() {
        s.push_str("Boundedness:\n\n");
        for b in &cone.boundedness {
            s.push_str(&format!("- {} = 0\n", greek(&linear_form(&cone.coord_names(), b))));
        }
        s.push('\n');
    }
    s.push_str("Constraints:\n\n");
    for c in constraint_formulas(cone) {
        s.push_str(&format!("- {}\n", greek(&c)));
    }
    s.push_str("\nExtreme rays:\n\n");
    for r in ray_formulas(cone) {
        s.push_str(&format!("- {r}\n"));
    }
    s.push_str("\n| Witness | Tight on | Equality |\n|---|---|---|\n");
    for w in &cone.witnesses {
        let tight: Vec<String> = w.tight_on.iter().map(|i| i.to_string()).collect();
        s.push_str(&format!("| {} | {} | {} |\n", w.name, tight.join(", "), if w.equality { "yes" } else { "" }));
    }
    if !cone.gaps.is_empty() {
        s.push_str("\nGaps:\n\n");
        for g in &cone.gaps {
            s.push_str(&format!("- {g}\n"));
        }
    }
    s
}

pub fn cone_csv(cone: &AdditivityCone) -> Result<String> {
    let mut rows: Vec<Vec<String>> = constraint_formulas(cone).into_iter().map(|c| vec!["constraint".into(), c]).collect();
    rows.extend(ray_formulas(cone).into_iter().map(|r| vec!["ray".into(), r]));
    csv_string(&["kind", "value"], rows)
}

pub fn decouplings_json(n_aux: usize) -> Result<Vec<DecouplingJson>> {
    let codes = enumerate_standard(n_aux)?;
    if n_aux == 1 {
        decoupling_json(&reduce_by_symmetry(&codes, Reduction::Swaps)?)
    } else {
        Ok(codes
            .into_iter()
            .map(|code| DecouplingJson { aux: n_aux, class_rep: [0, 0], equivalents: vec![], code })
            .collect())
    }
}

pub fn decouplings_markdown() -> Result<String> {
    let codes = enumerate_standard(1)?;
    let seven = reduce_by_symmetry(&codes, Reduction::Swaps)?;
    let mut s = String::from("| Class | (a,b) | M̂1 | M̃2 | Equivalent |\n|---|---|---|---|---|\n");
    for (i, class) in seven.iter().enumerate() {
        let (a, b) = class.representative.as_single()?;
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            i + 1,
            class.representative,
            output_label(a, 1),
            output_label(b, 2),
            codes_list(&class.equivalents)
        ));
    }
    s.push_str("\n| Case | Label | Swap classes | Members |\n|---|---|---|---|\n");
    for r in case_cross_reference()? {
        s.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            r.case,
            r.label,
            codes_list(&r.swap_classes),
            codes_list(&r.members)
        ));
    }
    Ok(s)
}

pub fn decouplings_csv() -> Result<String> {
    let rows = decouplings_json(1)?
        .into_iter()
        .map(|d| {
            let eq: Vec<String> = d.equivalents.iter().map(|[a, b]| format!("({a},{b})")).collect();
            vec![d.code.to_string(), format!("({},{})", d.class_rep[0], d.class_rep[1]), eq.join(", ")]
        })
        .collect();
    csv_string(&["code", "class_rep", "equivalents"], rows)
}

/// `E_sV` entries for `s` in `{B, E}`: rows `M̂1`, columns `M̃2`.
#[derive(Clone, Debug, Serialize)]
pub struct EsvEntry {
    pub s: String,
    pub m_hat: String,
    pub m_tilde: String,
    pub formula: String,
    pub functional: crate::entropic::LinearEntropyFunctional,
}

pub fn esv_entries() -> Result<Vec<EsvEntry>> {
    let mut out = Vec::new();
    for (s, name) in [(1, "B"), (2, "E")] {
        for a in [0u8, 1, 2, 3] {
            for b in [0u8, 1, 2, 3] {
                let f = esv_term(s, &DecouplingCode::single(a, b)?)?;
                out.push(EsvEntry {
                    s: name.into(),
                    m_hat: output_label(a, 1),
                    m_tilde: output_label(b, 2),
                    formula: render_decomposed(&f),
                    functional: f,
                });
            }
        }
    }
    Ok(out)
}

pub fn esv_markdown() -> Result<String> {
    let entries = esv_entries()?;
    let mut s = String::new();
    for name in ["B", "E"] {
        s.push_str(&format!("### s = {name}\n\n| M̂1 \\ M̃2 | ∅ | B2 | E2 | B2E2 |\n|---|---|---|---|---|\n"));
        for row in entries.iter().filter(|e| e.s == name).collect::<Vec<_>>().chunks(4) {
            let cells: Vec<String> = row.iter().map(|e| md_escape(&e.formula)).collect();
            s.push_str(&format!("| {} | {} |\n", row[0].m_hat, cells.join(" | ")));
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn esv_csv() -> Result<String> {
    csv_string(
        &["s", "m_hat_1", "m_tilde_2", "formula"],
        esv_entries()?.into_iter().map(|e| vec![e.s, e.m_hat, e.m_tilde, e.formula]).collect(),
    )
}
