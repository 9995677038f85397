use addicone::additivity::{block_cone, multi_var_cone, one_var_cone, AdditivityCone, Basis};
use addicone::decouplings::{case_cross_reference, DecouplingCode};
use addicone::report::{
    class_value, cone_csv, cone_markdown, cone_report, decouplings_csv, decouplings_json, decouplings_markdown,
    esv_csv, esv_entries, esv_markdown, summary_csv, summary_markdown, summary_rows,
};
use anyhow::{anyhow, bail, Result};
use serde_json::json;

use crate::{Format, Output};

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    ZeroVar,
    OneVarAll,
    OneVar(DecouplingCode),
    MultiVar(usize, DecouplingCode),
    Decouplings(usize),
    EsvTables,
}

impl Target {
    pub fn parse(s: &str, class: Option<&str>, aux: Option<usize>) -> Result<Target> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let code = |c: &str| c.parse::<DecouplingCode>().map_err(|e| anyhow!("{e}"));
        Ok(match (head, arg.or(class)) {
            ("zero-var", None) => Target::ZeroVar,
            ("one-var", Some(a)) if a.eq_ignore_ascii_case("all") => Target::OneVarAll,
            ("one-var", None) => Target::OneVarAll,
            ("one-var", Some(c)) => {
                let c = code(c)?;
                if c.n_aux() != 1 {
                    bail!("one-var takes a single (a,b) pair, got {c}");
                }
                Target::OneVar(c)
            }
            ("multi-var", Some(a)) => {
                let (n, c) = a.split_once(',').ok_or_else(|| anyhow!("multi-var target is multi-var:n,code"))?;
                let n: usize = n.trim().parse().map_err(|_| anyhow!("bad variable count {n:?}"))?;
                Target::MultiVar(n, code(c)?)
            }
            ("decouplings", None) => Target::Decouplings(aux.unwrap_or(1)),
            ("esv-tables", None) => Target::EsvTables,
            _ => bail!("unknown report target {s:?}"),
        })
    }

    pub fn stem(&self) -> String {
        let slug = |c: &DecouplingCode| c.to_string().replace(")(", "_").replace(['(', ')'], "").replace(',', "-");
        match self {
            Target::ZeroVar => "zero-var".into(),
            Target::OneVarAll => "one-var-all".into(),
            Target::OneVar(c) => format!("one-var-{}", slug(c)),
            Target::MultiVar(n, c) => format!("multi-var-{n}-{}", slug(c)),
            Target::Decouplings(n) => format!("decouplings-aux{n}"),
            Target::EsvTables => "esv-tables".into(),
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn render_cone(title: &str, cone: &AdditivityCone, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => pretty(&cone_report(cone))?,
        Format::Markdown => cone_markdown(title, cone),
        Format::Csv => cone_csv(cone)?,
    })
}

fn certified(cone: &AdditivityCone) -> bool {
    cone.is_exact() && cone.verify_certificates()
}

/// Rendered report plus whether every ray certificate verified.
pub fn run(target: &Target, format: Format) -> Result<(Output, bool)> {
    let ext = format.extension();
    let (content, ok) = match target {
        Target::ZeroVar => {
            let cone = block_cone(&DecouplingCode::trivial(), Basis::Quantum)?;
            (render_cone("Zero-variable cone", &cone, format)?, certified(&cone))
        }
        Target::OneVar(code) => {
            let cone = one_var_cone(code)?;
            (render_cone(&format!("One-variable cone {code}"), &cone, format)?, certified(&cone))
        }
        Target::MultiVar(n, code) => {
            let cone = multi_var_cone(*n, code)?;
            (render_cone(&format!("{n}-variable cone {code}"), &cone, format)?, certified(&cone))
        }
        Target::OneVarAll => {
            let rows = summary_rows()?;
            let ok = rows.iter().all(|r| certified(&r.cone));
            let content = match format {
                Format::Json => pretty(
                    &rows
                        .iter()
                        .map(|r| {
                            json!({
                                "case": r.case,
                                "code": class_value(&r.code),
                                "equivalents": r.equivalents.iter().map(class_value).collect::<Vec<_>>(),
                                "cone": cone_report(&r.cone),
                            })
                        })
                        .collect::<Vec<_>>(),
                )?,
                Format::Markdown => {
                    let mut s = String::from("# One-variable additivity cones\n\n");
                    s.push_str(&summary_markdown(&rows));
                    for r in &rows {
                        s.push('\n');
                        s.push_str(&cone_markdown(&format!("Case {} {}", r.case, r.code), &r.cone));
                    }
                    s
                }
                Format::Csv => summary_csv(&rows)?,
            };
            (content, ok)
        }
        Target::Decouplings(n) => {
            let content = match format {
                Format::Json => {
                    let mut v = json!({ "aux": n, "codes": decouplings_json(*n)? });
                    if *n == 1 {
                        v["cases"] = serde_json::to_value(case_cross_reference()?)?;
                    }
                    pretty(&v)?
                }
                Format::Markdown if *n == 1 => decouplings_markdown()?,
                Format::Csv if *n == 1 => decouplings_csv()?,
                _ => {
                    let codes = decouplings_json(*n)?;
                    let lines: Vec<String> = codes.iter().map(|d| d.code.to_string()).collect();
                    match format {
                        Format::Markdown => format!("{} consistent codes\n\n{}\n", lines.len(), lines.iter().map(|l| format!("- {l}\n")).collect::<String>()),
                        _ => format!("code\n{}\n", lines.join("\n")),
                    }
                }
            };
            (content, true)
        }
        Target::EsvTables => {
            let content = match format {
                Format::Json => pretty(&esv_entries()?)?,
                Format::Markdown => esv_markdown()?,
                Format::Csv => esv_csv()?,
            };
            (content, true)
        }
    };
    Ok((Output { name: format!("{}.{ext}", target.stem()), content }, ok))
}
