//! Plain-text summaries printed to stdout.

use std::fmt::Write;

use thermo2d::analysis::AnalysisBundle;
use thermo2d::decay::Exponent;
use thermo2d::media::AssumptionReport;
use thermo2d::simulate::SimResult;

fn angle(phi: f64, degrees: bool) -> String {
    if degrees {
        format!("{}°", phi.to_degrees())
    } else {
        format!("{phi}")
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn assumptions(r: &AssumptionReport, degrees: bool) -> String {
    let mut s = String::new();
    let p = &r.positivity;
    let _ = writeln!(s, "class: {:?}", r.class);
    let _ = write!(
        s,
        "(A1)-(A2) positivity          {}  min trace {} at phi = {}, min det {} at phi = {}",
        verdict(r.a1a2_ok),
        p.min_trace,
        angle(p.min_trace_phi, degrees),
        p.min_det,
        angle(p.min_det_phi, degrees)
    );
    if let Some(q) = p.violated {
        let _ = write!(s, "; {q:?} violated at phi = {}", angle(p.worst_phi, degrees));
    }
    s.push('\n');
    if p.strict_exceptional_bound == Some(false) && r.a1a2_ok {
        let _ = writeln!(s, "  warning: only the relaxed bound holds, not lambda > mu > 0");
    }
    let d = &r.distinct;
    let _ = write!(
        s,
        "(A3) distinct eigenvalues     {}  min gap {} at phi = {}",
        verdict(r.a3_ok),
        d.min_gap,
        angle(d.min_gap_phi, degrees)
    );
    if d.everywhere {
        s.push_str("; degenerate in every direction");
    } else if !d.degenerate_angles.is_empty() {
        let list: Vec<String> = d.degenerate_angles.iter().map(|&a| angle(a, degrees)).collect();
        let _ = write!(s, "; degenerate at {}", list.join(", "));
    }
    s.push('\n');
    match &r.a4 {
        Some(a4) => {
            let vals: Vec<String> = a4.excluded.iter().map(|e| e.value.to_string()).collect();
            let _ = write!(
                s,
                "(A4) coupling constant        {}  gamma^2 = {}, excluded {{{}}}",
                verdict(a4.ok),
                a4.gamma_squared,
                vals.join(", ")
            );
            if let Some(phi) = a4.violating_phi {
                let _ = write!(s, "; hit at phi = {}", angle(phi, degrees));
            }
            s.push('\n');
        }
        None => {
            let _ = writeln!(s, "(A4) coupling constant        not evaluated");
        }
    }
    s
}

pub fn bundle(b: &AnalysisBundle, degrees: bool) -> String {
    let mut s = assumptions(&b.assumptions, degrees);
    if let Some(c) = &b.catalog {
        if c.identically_hyperbolic {
            let _ = writeln!(s, "hyperbolic directions: all (one coupling function vanishes identically)");
        } else {
            let _ = writeln!(s, "hyperbolic directions: {}", c.len());
            let _ = writeln!(s, "  {:>24}  sheet  mult  ell  gamma_bar  exponent", "phi");
            for (d, t) in c.directions.iter().zip(&b.tangency) {
                let e = thermo2d::decay::microlocal_exponent(d.ell, t.gamma_bar);
                let _ = writeln!(
                    s,
                    "  {:>24}  {:>5}  {:>4}  {:>3}  {:>9}  {:>8}",
                    angle(d.phi, degrees),
                    d.sheet.to_string(),
                    d.poly_multiplicity,
                    d.ell,
                    t.gamma_bar,
                    e.to_string()
                );
            }
        }
    }
    match &b.decay {
        Some(d) => {
            let _ = writeln!(s, "overall decay rate: {}", d.rate);
        }
        None => {
            let _ = writeln!(s, "overall decay rate: not available (assumptions violated)");
        }
    }
    s
}

pub fn figure_table(rows: &[(&str, AnalysisBundle)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<18} {:<13} {:>10} {:>6} {:>10}", "medium", "class", "directions", "sum l", "rate");
    for (name, b) in rows {
        let (dirs, ell) = match &b.catalog {
            Some(c) if c.identically_hyperbolic => ("all".to_string(), "-".to_string()),
            Some(c) => (c.len().to_string(), c.ell_sum().to_string()),
            None => ("-".to_string(), "-".to_string()),
        };
        let rate = b.decay.as_ref().map_or("n/a".to_string(), |d| d.rate.clone());
        let _ = writeln!(
            s,
            "{:<18} {:<13} {:>10} {:>6} {:>10}",
            name,
            format!("{:?}", b.class),
            dirs,
            ell,
            rate
        );
    }
    s
}

pub fn simulation(r: &SimResult, predicted: Exponent) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "modes: {}, dt: {}, steps: {}", r.modes, r.dt, r.steps);
    let _ = writeln!(s, "predicted exponent: {} ({})", predicted, predicted.to_f64());
    match &r.fit {
        Some(f) => {
            let _ = writeln!(
                s,
                "fitted exponent:    {:.4} ± {:.4} over t in [{}, {}]",
                f.exponent, f.stderr, f.t_lo, f.t_hi
            );
        }
        None => {
            let _ = writeln!(s, "fitted exponent:    unavailable (too few samples in [T/4, T])");
        }
    }
    s
}
