//! Text report and gnuplot data built from `summary.json` alone.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Result;

use crate::cache::{read_json, write_atomic};
use crate::error::HarnessError;
use crate::output::SUMMARY_FILE;
use crate::pipeline::Summary;

pub fn load_summary(dir: &Path) -> Result<Summary> {
    let path = dir.join(SUMMARY_FILE);
    if !path.exists() {
        return Err(HarnessError::MissingArtifacts(path).into());
    }
    read_json(&path)
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".to_string(), |v| format!("{v:.4}"))
}

pub fn render_text(s: &Summary) -> String {
    let mut t = String::new();
    let c = &s.cell.constants;
    let _ = writeln!(t, "config {}", s.config_hash);
    let _ = writeln!(t);
    let _ = writeln!(t, "cell constants ({} cells per period)", c.cells_per_period);
    for (name, v) in [
        ("C1", c.c1),
        ("C1 (trace)", c.c1_trace),
        ("C_omega", c.c_omega),
        ("C11", c.c11),
        ("C_pi1", c.c_pi1),
        ("<beta1^1 on S>", c.beta1_trace),
        ("<d2 beta1^1 on S>", c.beta1_shear),
    ] {
        let _ = writeln!(t, "  {name:<20} {v:>+.10e}");
    }
    let a = &s.cell.asymmetric;
    let _ = writeln!(
        t,
        "  asymmetric shape: C1 {:+.6e}, C11 {:+.6e}, <beta1^1 on S> {:+.3e}",
        a.c1, a.c11, a.beta1_trace
    );
    if let Some(r) = &s.cell.refine {
        let _ = writeln!(
            t,
            "  refinement {:?}: delta {:?}, extrapolated {:?}",
            r.cells_per_period, r.delta, r.extrapolated
        );
    }

    let _ = writeln!(t);
    let _ = writeln!(t, "convergence rates (theoretical / observed)");
    let _ = writeln!(t, "  {:<28} {:>15} {:>15} {:>15} {:>15}", "regime", "a priori", "U", "U1", "U2");
    for r in &s.rates {
        let th = &r.theoretical;
        let cell = |th: f64, f: Option<f64>| format!("{th:.4}/{}", opt(f));
        let _ = writeln!(
            t,
            "  {:<28} {:>15} {:>15} {:>15} {:>15}",
            r.regime.label(),
            cell(th.apriori, r.apriori.map(|f| f.rate)),
            cell(th.order0, r.orders[0].map(|f| f.rate)),
            cell(th.order1, r.orders[1].map(|f| f.rate)),
            cell(th.order2, r.orders[2].map(|f| f.rate)),
        );
    }

    let _ = writeln!(t);
    let _ = writeln!(t, "slip law");
    for a in &s.slip {
        let _ = writeln!(t, "  {} (eps {}, eta {}):", a.label, a.epsilon, a.eta);
        for smp in &a.samples {
            let _ = writeln!(
                t,
                "    F {:<6} v1_eff {:+.10e}  shear_eff {:+.10e}",
                smp.force, smp.v1_eff, smp.shear_eff
            );
        }
        if let Some(f) = a.dns_fit {
            let _ = writeln!(t, "    DNS fit       a_lin {:+.6e}  a_quad {:+.3e}", f.a_lin, f.a_quad);
        }
        let _ = writeln!(t, "    -eps C1       a_lin {:+.6e}", a.leading);
        let _ = writeln!(
            t,
            "    consistent    a_lin {:+.6e}  a_quad {:+.3e}",
            a.consistent.a_lin_pred, a.consistent.a_quad_pred
        );
        let _ = writeln!(t, "    published     a_lin {:+.6e}", a.published.a_lin_pred);
        if let Some([l, q]) = a.closed_loop_error {
            let _ = writeln!(t, "    closed loop   rel. error a_lin {l:.1e}  a_quad {q:.1e}");
        }
    }

    let _ = writeln!(t);
    let _ = writeln!(t, "linear-law residual (v = -eps C1 s)");
    for a in &s.saffman {
        let row = a.at_epsilon.as_ref().map_or("-".to_string(), |r| format!("{:.3e}", r.relative));
        let rate = a.table.as_ref().map_or("-".to_string(), |tb| {
            format!("{:.4} (reference {:.4})", tb.residual_rate.rate, tb.reference_rate)
        });
        let _ = writeln!(t, "  {:<28} relative {row:>10}  absolute decay rate {rate}", a.regime.label());
    }

    let _ = writeln!(t);
    let _ = writeln!(t, "criteria");
    for v in &s.criteria {
        let _ = writeln!(
            t,
            "  [{}] {:>2} {:<26} {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
    }
    let failed = s.failed_points();
    let _ = writeln!(t);
    let _ = writeln!(
        t,
        "points: {} total, {} failed, {} outside hypotheses",
        s.points.len(),
        failed,
        s.points
            .iter()
            .filter(|p| p.status == crate::pipeline::PointStatus::HypothesisFail)
            .count()
    );
    t
}

/// `epsilon` followed by the a priori norm and the three corrector norms,
/// one block per regime.
pub fn rates_dat(s: &Summary) -> String {
    let mut t = String::from("# epsilon apriori U U1 U2\n");
    for r in &s.rates {
        let _ = writeln!(t, "# {}", r.regime.label());
        let mut rows: Vec<(f64, [f64; 4])> = s
            .points
            .iter()
            .filter(|p| p.spec.regime() == r.regime && p.spec.force == r.force)
            .filter_map(|p| {
                let n = p.ok()?.norms?;
                Some((
                    p.spec.epsilon,
                    [n.apriori.total(), n.orders[0].total(), n.orders[1].total(), n.orders[2].total()],
                ))
            })
            .collect();
        rows.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (e, n) in rows {
            let _ = writeln!(t, "{e:e} {:e} {:e} {:e} {:e}", n[0], n[1], n[2], n[3]);
        }
        t.push_str("\n\n");
    }
    t
}

pub fn slip_dat(s: &Summary) -> String {
    let mut t = String::from("# F shear_eff v1_eff\n");
    for a in &s.slip {
        let _ = writeln!(t, "# {}", a.label);
        for smp in &a.samples {
            let _ = writeln!(t, "{:e} {:e} {:e}", smp.force, smp.shear_eff, smp.v1_eff);
        }
        t.push_str("\n\n");
    }
    t
}

pub fn saffman_dat(s: &Summary) -> String {
    let mut t = String::from("# epsilon relative absolute\n");
    for a in &s.saffman {
        let _ = writeln!(t, "# {}", a.regime.label());
        if let Some(tb) = &a.table {
            for r in &tb.rows {
                let _ = writeln!(t, "{:e} {:e} {:e}", r.epsilon, r.relative, r.absolute);
            }
        }
        t.push_str("\n\n");
    }
    t
}

/// Writes `report.txt` and the `.dat` files next to the summary.
pub fn write_report(dir: &Path) -> Result<(String, Vec<PathBuf>)> {
    let s = load_summary(dir)?;
    let text = render_text(&s);
    let files = [
        ("report.txt", text.clone()),
        ("rates.dat", rates_dat(&s)),
        ("slip.dat", slip_dat(&s)),
        ("saffman.dat", saffman_dat(&s)),
    ];
    let mut out = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        out.push(path);
    }
    Ok((text, out))
}
