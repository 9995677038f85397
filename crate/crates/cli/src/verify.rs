use addicone::additivity::coords::block_coords;
use addicone::additivity::{
    block_cone, coincidence_check, multi_var_cone, witness_library, witnesses_for, AdditivityCone, Basis,
};
use addicone::decouplings::{enumerate_standard, DecouplingCode};
use addicone::entropic::formula::render_pretty;
use addicone::numlab::{classical_delta_check, numeric_delta_check, DeltaDims};
use addicone::polyhedra::{cones_equal, ConeRep};
use addicone::report::linear_form;
use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

const NUMERIC_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Witnesses,
    Certificates,
    Numeric,
    Coincidence,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub total: usize,
    pub failed: usize,
    pub passed: bool,
    pub first_failure: Option<Check>,
    pub checks: Vec<Check>,
}

/// Zero-variable code, one representative per swap class, and three
/// two-variable codes.
fn shipped_codes() -> Result<Vec<DecouplingCode>> {
    let mut codes = vec![DecouplingCode::trivial()];
    for (a, b) in [(3, 3), (3, 1), (3, 0), (1, 1), (1, 2), (1, 0), (0, 0)] {
        codes.push(DecouplingCode::single(a, b)?);
    }
    for pairs in [vec![(3, 3), (0, 0)], vec![(1, 2), (2, 0)], vec![(3, 0), (0, 1)]] {
        codes.push(DecouplingCode::new(pairs)?);
    }
    Ok(codes)
}

fn cone_of(code: &DecouplingCode) -> Result<AdditivityCone> {
    if code.n_aux() <= 1 {
        Ok(block_cone(code, Basis::Quantum)?)
    } else {
        Ok(multi_var_cone(code.n_aux(), code)?)
    }
}

fn witnesses(out: &mut Vec<Check>) -> Result<()> {
    let mut run = |name: String, w: &addicone::additivity::WitnessSpec| -> Result<()> {
        let coords = block_coords(w.n_aux());
        let names = addicone::additivity::coords::coord_names(w.n_aux(), &coords)?;
        let expected: Vec<_> = coords.iter().map(|&m| w.expected_delta.coeff(m)).collect();
        out.push(Check {
            suite: "witnesses",
            name,
            expected: linear_form(&names, &expected),
            observed: linear_form(&names, &w.delta_form(&coords)?),
            tolerance: "exact, modulo boundedness".into(),
            passed: w.matches_expected()?,
        });
        Ok(())
    };
    for w in witness_library() {
        run(w.name.clone(), w)?;
    }
    for code in enumerate_standard(1)? {
        for w in witnesses_for(&code)? {
            if !witness_library().contains(&w) {
                run(format!("{code} {}", w.name), &w)?;
            }
        }
    }
    Ok(())
}

fn certificates(out: &mut Vec<Check>) -> Result<()> {
    for code in shipped_codes()? {
        let cone = cone_of(&code)?;
        out.push(Check {
            suite: "certificates",
            name: format!("{code} exact"),
            expected: "no gaps".into(),
            observed: if cone.gaps.is_empty() { "no gaps".into() } else { cone.gaps.join("; ") },
            tolerance: "exact".into(),
            passed: cone.is_exact(),
        });
        let hv = cones_equal(&ConeRep::H(cone.h.clone()), &ConeRep::V(cone.v.clone()))?;
        out.push(Check {
            suite: "certificates",
            name: format!("{code} H = V"),
            expected: "equal".into(),
            observed: format!("{hv:?}"),
            tolerance: "exact".into(),
            passed: hv.is_equal(),
        });
        for c in &cone.certificates {
            let ok = c.verify(&code);
            out.push(Check {
                suite: "certificates",
                name: format!("{code} ray {}", c.formula),
                expected: "Δ = Σ c_i g_i, c_i > 0".into(),
                observed: format!("{} terms, {}", c.terms.len(), if ok { "verified" } else { "mismatch" }),
                tolerance: "exact".into(),
                passed: ok,
            });
        }
    }
    Ok(())
}

fn numeric(out: &mut Vec<Check>, samples: usize, seed: u64) -> Result<()> {
    for code in shipped_codes()?.into_iter().filter(|c| c.n_aux() <= 1) {
        let cone = cone_of(&code)?;
        for c in &cone.certificates {
            let q = numeric_delta_check(&c.alpha, &code, samples, &DeltaDims::default(), seed)?;
            let k = classical_delta_check(&c.alpha, &code, samples, 2, seed)?;
            let min = q.min.min(k.min);
            out.push(Check {
                suite: "numeric",
                name: format!("{code} ray {}", render_pretty(&c.alpha)),
                expected: format!("min Δ ≥ -{NUMERIC_TOL:e}"),
                observed: format!("quantum min {:.3e} (sample {}), classical min {:.3e} (sample {})", q.min, q.argmin, k.min, k.argmin),
                tolerance: format!("{NUMERIC_TOL:e}"),
                passed: min >= -NUMERIC_TOL,
            });
        }
    }
    Ok(())
}

fn coincidence(out: &mut Vec<Check>) -> Result<()> {
    for code in shipped_codes()? {
        let r = coincidence_check(&code)?;
        out.push(Check {
            suite: "coincidence",
            name: code.to_string(),
            expected: "classical cone = quantum cone".into(),
            observed: match &r.counterexample {
                None => format!("equal (inner cones equal: {:?})", r.inner_equal),
                Some(g) => format!("differs at {g:?}"),
            },
            tolerance: "exact".into(),
            passed: r.passed(),
        });
    }
    Ok(())
}

pub fn run(suite: Suite, samples: usize, seed: u64) -> Result<Summary> {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Witnesses {
        witnesses(&mut checks)?;
    }
    if all || suite == Suite::Certificates {
        certificates(&mut checks)?;
    }
    if all || suite == Suite::Numeric {
        numeric(&mut checks, samples, seed)?;
    }
    if all || suite == Suite::Coincidence {
        coincidence(&mut checks)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(Summary {
        suite,
        samples,
        seed,
        total: checks.len(),
        failed,
        passed: failed == 0,
        first_failure: checks.iter().find(|c| !c.passed).cloned(),
        checks,
    })
}

pub fn markdown(s: &Summary) -> String {
    let mut out = format!(
        "# Verification: {:?}\n\n{} checks, {} failed\n\n| Suite | Check | Expected | Observed | Tolerance | Result |\n|---|---|---|---|---|---|\n",
        s.suite, s.total, s.failed
    );
    for c in &s.checks {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            c.suite,
            c.name.replace('|', "\\|"),
            c.expected.replace('|', "\\|"),
            c.observed.replace('|', "\\|"),
            c.tolerance,
            if c.passed { "pass" } else { "FAIL" }
        ));
    }
    out
}
