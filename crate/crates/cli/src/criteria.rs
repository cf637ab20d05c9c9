//! Pass/fail verdicts computed from a sweep summary.

use std::f64::consts::PI;

use slipflow::boundary_layer::{CellConstants, TRUNCATION_TOL};

use crate::config::RunConfig;
use crate::pipeline::{SlipAnalysis, Summary, TruncationOutcome, Verdict};

pub const DUAL_TOL: f64 = 1e-6;
pub const DECAY_FLOOR: f64 = 0.9 * 2.0 * PI;
pub const STRIP_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const RATE_SLACK: f64 = 0.3;
pub const CLOSED_LOOP_TOL: f64 = 1e-3;
pub const DNS_LIN_TOL: f64 = 0.2;
/// A constant below this fraction of |C1| is treated as zero.
pub const VANISHING: f64 = 1e-9;
/// ⟨β₁¹|Σ⟩ counts as resolved above this fraction of |C1|.
pub const RESOLVED: f64 = 1e-6;
/// Relative size below which a term is indistinguishable from round-off.
pub const ROUNDOFF: f64 = 1e-12;

fn verdict(id: u8, name: &str, pass: bool, detail: String) -> Verdict {
    Verdict {
        id,
        name: name.to_string(),
        pass,
        detail,
    }
}

pub fn evaluate(cfg: &RunConfig, s: &Summary) -> Vec<Verdict> {
    vec![
        dual_identity(s),
        sign_of_c1(s),
        decay(s),
        truncation(s),
        solver(s),
        apriori(s),
        hierarchy(s),
        slip_law(cfg, s),
        saffman(cfg, s),
    ]
}

fn dual_identity(s: &Summary) -> Verdict {
    let d = &s.cell.dual_identity;
    verdict(
        1,
        "dual identity",
        d.relative <= DUAL_TOL,
        format!(
            "trace {:.10e}, -energy {:.10e}, relative gap {:.2e} (tol {DUAL_TOL:e})",
            d.trace, -d.energy, d.relative
        ),
    )
}

fn sign_of_c1(s: &Summary) -> Verdict {
    let c = &s.cell;
    let all_neg = c.constants.c1 < 0.0 && c.radii.iter().all(|r| r.c1 < 0.0);
    let radii: Vec<String> = c.radii.iter().map(|r| format!("r={}: {:.6e}", r.radius, r.c1)).collect();
    verdict(
        2,
        "C1 < 0",
        all_neg && c.radii.len() >= 3,
        format!("default {:.6e}; {}", c.constants.c1, radii.join(", ")),
    )
}

fn decay(s: &Summary) -> Verdict {
    let d = &s.cell.decay;
    let rate = |f: &Option<slipflow::boundary_layer::DecayFit>| f.map(|f| f.rate);
    let (above, pressure, below) = (rate(&d.above), rate(&d.pressure_above), rate(&d.below));
    let pass = above.is_some_and(|r| r >= DECAY_FLOOR)
        && pressure.is_some_and(|r| r >= DECAY_FLOOR)
        && below.is_some_and(|r| r > 0.0);
    verdict(
        3,
        "exponential stabilization",
        pass,
        format!(
            "velocity above {above:?}, pressure above {pressure:?} (floor {DECAY_FLOOR:.4}), below {below:?}"
        ),
    )
}

/// A constant that vanishes in all three runs has no meaningful relative
/// shift; it passes if it stays below the vanishing threshold.
fn vanishes(get: fn(&CellConstants) -> f64, r: &slipflow::boundary_layer::TruncationReport) -> bool {
    let scale = r.base.c1.abs();
    [&r.base, &r.tall, &r.deep].iter().all(|c| get(c).abs() <= VANISHING * scale)
}

fn truncation_one(t: &TruncationOutcome) -> (bool, String) {
    let Some(r) = &t.report else {
        return (false, t.error.clone().unwrap_or_default());
    };
    let getters: [(&str, fn(&CellConstants) -> f64); 3] =
        [("C1", |c| c.c1), ("C_omega", |c| c.c_omega), ("C11", |c| c.c11)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, (name, get)) in getters.iter().enumerate() {
        let shift = r.shift_height[k].max(r.shift_rows[k]);
        if shift <= TRUNCATION_TOL {
            parts.push(format!("{name} {shift:.1e}"));
        } else if k > 0 && vanishes(*get, r) {
            parts.push(format!("{name} vanishes ({:.1e})", get(&r.base)));
        } else {
            pass = false;
            parts.push(format!("{name} {shift:.1e} FAIL"));
        }
    }
    (pass, parts.join(", "))
}

fn truncation(s: &Summary) -> Verdict {
    let mut pass = !s.cell.truncation.is_empty();
    let mut parts = Vec::new();
    for (label, t) in ["default", "asymmetric"].iter().zip(&s.cell.truncation) {
        let (p, d) = truncation_one(t);
        pass &= p;
        parts.push(format!("{label}: {d}"));
    }
    verdict(4, "truncation insensitivity", pass, parts.join("; "))
}

fn solver(s: &Summary) -> Verdict {
    let v = &s.verification;
    let orders_ok = !v.manufactured_orders.is_empty() && v.manufactured_orders.iter().all(|o| *o >= 1.0);
    let ref_res = v
        .manufactured
        .iter()
        .chain(std::iter::once(&v.strip))
        .fold(0.0_f64, |m, r| m.max(r.residual));
    let dns_res = s
        .points
        .iter()
        .filter_map(|p| p.ok())
        .fold(0.0_f64, |m, d| m.max(d.residual).max(d.linear_residual));
    let pass = v.strip.max_error <= STRIP_TOL && orders_ok && ref_res <= RESIDUAL_TOL && dns_res <= RESIDUAL_TOL;
    verdict(
        5,
        "solver correctness",
        pass,
        format!(
            "strip error {:.2e}, manufactured orders {:?}, reference residual {:.1e}, DNS residual {:.1e}",
            v.strip.max_error, v.manufactured_orders, ref_res, dns_res
        ),
    )
}

fn apriori(s: &Summary) -> Verdict {
    let Some(r) = s.rates.iter().find(|r| r.regime.eta == Some(0.5)) else {
        return verdict(6, "a priori smallness", false, "no eta = 0.5 regime in the sweep".into());
    };
    let floor = r.theoretical.apriori - RATE_SLACK;
    match &r.apriori {
        Some(f) => verdict(
            6,
            "a priori smallness",
            f.rate >= floor,
            format!("rate {:.4} (r2 {:.4}), floor {floor:.4}", f.rate, f.r_squared),
        ),
        None => verdict(6, "a priori smallness", false, "fewer than 3 usable points".into()),
    }
}

fn hierarchy(s: &Summary) -> Verdict {
    let mut pass = !s.rates.is_empty();
    let mut parts = Vec::new();
    for r in &s.rates {
        let label = r.regime.label();
        let Some(fits) = r.orders.iter().map(|f| f.map(|f| f.rate)).collect::<Option<Vec<f64>>>() else {
            pass = false;
            parts.push(format!("{label}: missing rates"));
            continue;
        };
        let increasing = fits.windows(2).all(|w| w[1] > w[0]);
        let margins: Vec<f64> = (0..3).map(|k| fits[k] - (r.theoretical.for_order(k) - RATE_SLACK)).collect();
        let above = margins.iter().all(|m| *m >= 0.0);
        pass &= increasing && above;
        parts.push(format!(
            "{label}: rates [{:.6}, {:.6}, {:.6}] theory [{:.4}, {:.4}, {:.4}] steps [{:+.2e}, {:+.2e}]{}{}",
            fits[0],
            fits[1],
            fits[2],
            r.theoretical.order0,
            r.theoretical.order1,
            r.theoretical.order2,
            fits[1] - fits[0],
            fits[2] - fits[1],
            if increasing { "" } else { " not increasing" },
            if above { "" } else { " below floor" },
        ));
    }
    verdict(7, "corrector hierarchy", pass, parts.join("; "))
}

fn resolved(a: &SlipAnalysis) -> bool {
    a.constants.beta1_trace.abs() >= RESOLVED * a.constants.c1.abs()
}

/// Whether the quadratic part of the generated samples rises above
/// round-off of the linear part.
fn identifiable(a: &SlipAnalysis, max_force: f64) -> bool {
    let s = 0.5 * max_force * a.consistent.shear[0].abs();
    (a.consistent.a_quad_taylor * s).abs() >= ROUNDOFF * a.consistent.a_lin_pred.abs()
}

fn slip_law(cfg: &RunConfig, s: &Summary) -> Verdict {
    let max_force = cfg.analysis.closed_loop_forces.iter().fold(0.0_f64, |m, f| m.max(f.abs()));
    let mut pass = true;
    let mut parts = Vec::new();
    for a in &s.slip {
        match a.closed_loop_error {
            Some([lin, quad]) => {
                pass &= lin <= CLOSED_LOOP_TOL;
                if identifiable(a, max_force) {
                    pass &= quad <= CLOSED_LOOP_TOL;
                    parts.push(format!("{}: closed loop lin {lin:.1e}, quad {quad:.1e}", a.label));
                } else {
                    parts.push(format!(
                        "{}: closed loop lin {lin:.1e}, quad below round-off (a_quad {:.1e})",
                        a.label, a.consistent.a_quad_taylor
                    ));
                }
            }
            None => {
                pass = false;
                parts.push(format!("{}: closed loop regression failed", a.label));
            }
        }
    }
    let mut signs_checked = 0;
    for a in &s.slip {
        let Some(fit) = a.dns_fit else {
            pass = false;
            parts.push(format!("{}: DNS regression unavailable", a.label));
            continue;
        };
        let lin_err = (fit.a_lin - a.leading).abs() / a.leading.abs();
        if a.label == "default" {
            pass &= lin_err <= DNS_LIN_TOL;
        }
        let mut line = format!(
            "{}: DNS a_lin {:.6e} vs -eps C1 {:.6e} ({:.2}%), consistent {:.6e}, published {:.6e}; a_quad {:.3e}",
            a.label,
            fit.a_lin,
            a.leading,
            100.0 * lin_err,
            a.consistent.a_lin_pred,
            a.published.a_lin_pred,
            fit.a_quad
        );
        if resolved(a) {
            signs_checked += 1;
            let expected = -a.constants.beta1_trace.signum();
            let ok = fit.a_quad.signum() == expected;
            pass &= ok;
            line += &format!(
                ", predicted sign {} from <B1> = {:.3e}{}",
                if expected > 0.0 { "+" } else { "-" },
                a.constants.beta1_trace,
                if ok { "" } else { " MISMATCH" }
            );
        } else {
            line += &format!(
                ", sign not predicted (<B1> = {:.1e} is below {RESOLVED:e} |C1|)",
                a.constants.beta1_trace
            );
        }
        parts.push(line);
    }
    if signs_checked == 0 {
        pass = false;
        parts.push("no geometry with a resolved <B1>, quadratic sign untestable".into());
    }
    verdict(8, "slip law", pass, parts.join("; "))
}

fn saffman(cfg: &RunConfig, s: &Summary) -> Verdict {
    let mut rows: Vec<(f64, f64)> = s
        .saffman
        .iter()
        .filter(|a| a.regime.eta.is_some())
        .filter_map(|a| Some((a.regime.eta?, a.at_epsilon.as_ref()?.relative)))
        .collect();
    if rows.len() < 3 {
        return verdict(9, "linear-law degradation", false, "fewer than 3 eta values".into());
    }
    rows.sort_by(|a, b| b.0.total_cmp(&a.0));
    let pass = rows.windows(2).all(|w| w[1].1 > w[0].1);
    let listing: Vec<String> = rows.iter().map(|(e, r)| format!("eta={e}: {r:.3e}")).collect();
    verdict(
        9,
        "linear-law degradation",
        pass,
        format!(
            "relative residual of v = -eps C1 s at eps={}: {}",
            cfg.analysis.saffman_epsilon,
            listing.join(", ")
        ),
    )
}
