//! CSV rendering. Floating-point values are printed with 17 significant
//! digits so output is bit-exact under round-trip, and byte-identical for
//! identical runs.

use std::fmt::Write as _;

use crate::harness::contour::ContourSet;
use crate::harness::shots::ShotEnsemble;
use crate::harness::sweep::{ComparePoint, FloquetPoint, SweepGrid, TauPoint};

/// 17 significant digits, scientific.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    fmt_f64(x.unwrap_or(f64::NAN))
}

/// Loop-duration sweep rows.
pub fn tau_sweep_csv(points: &[TauPoint]) -> String {
    let mut out = String::from(
        "tau_us,p_pp,p_pm,p_mp,p_mm,exp_work_avg,deviation,mean_work,asym,pt_class,je_condition,error_code\n",
    );
    for p in points {
        let tm = p.tm.as_ref();
        let je = p.je.as_ref();
        let pt =
            p.pt.map(|c| c.spectrum.to_string())
                .unwrap_or_else(|| "nan".into());
        let jc = p
            .je_cond
            .map(|b| b.to_string())
            .unwrap_or_else(|| "nan".into());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(p.tau),
            opt(tm.map(|t| t.pp())),
            opt(tm.map(|t| t.pm())),
            opt(tm.map(|t| t.mp())),
            opt(tm.map(|t| t.mm())),
            opt(je.map(|j| j.value)),
            opt(je.map(|j| j.deviation)),
            opt(je.map(|j| j.mean_work)),
            opt(je.map(|j| j.asym)),
            pt,
            jc,
            p.error,
        )
        .unwrap();
    }
    out
}

/// Grid sweep rows, `delta_max`-major.
pub fn grid_csv(grid: &SweepGrid) -> String {
    let mut out = String::from("delta_max,tau_us,exp_work_avg\n");
    for (i, &d) in grid.delta_values.iter().enumerate() {
        for (j, &t) in grid.tau_values.iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                fmt_f64(d),
                fmt_f64(t),
                fmt_f64(grid.value(i, j))
            )
            .unwrap();
        }
    }
    out
}

/// Shot-ensemble rows, one per prepared state. The `p_hat_pp`/`p_hat_mp`
/// columns hold the post-selected estimates of `P(+x | prep)` and
/// `P(-x | prep)` for the row's preparation, with their standard errors.
pub fn shots_csv(e: &ShotEnsemble) -> String {
    let mut out =
        String::from("prep,n,n_g,n_plus,n_minus,discard_fraction,p_hat_pp,p_hat_mp,se_pp,se_mp\n");
    for (j, label) in ["plus", "minus"].iter().enumerate() {
        let c = &e.counts[j];
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            label,
            e.n_per_prep,
            c.n_g,
            c.n_plus,
            c.n_minus,
            fmt_f64(e.discard_fraction),
            fmt_f64(e.p_hat.p[0][j]),
            fmt_f64(e.p_hat.p[1][j]),
            fmt_f64(e.se[0][j]),
            fmt_f64(e.se[1][j]),
        )
        .unwrap();
    }
    out
}

/// Contour vertices grouped by polyline, plus one row per tangency cell.
pub fn contours_csv(set: &ContourSet) -> String {
    let mut out = String::from("kind,contour_id,vertex_id,delta_max,tau_us,exp_work_avg,refined\n");
    for (cid, line) in set.polylines.iter().enumerate() {
        for (vid, v) in line.iter().enumerate() {
            writeln!(
                out,
                "vertex,{},{},{},{},{},{}",
                cid,
                vid,
                fmt_f64(v.delta_max),
                fmt_f64(v.tau),
                fmt_f64(v.value),
                v.refined,
            )
            .unwrap();
        }
    }
    for (i, j) in &set.tangency_cells {
        writeln!(out, "tangency,{i},{j},nan,nan,nan,false").unwrap();
    }
    out
}

/// Floquet diagnostics rows.
pub fn floquet_csv(points: &[FloquetPoint]) -> String {
    let mut out = String::from(
        "tau_us,slices,est_error,g_ee_re,g_ee_im,g_ef_re,g_ef_im,g_fe_re,g_fe_im,g_ff_re,g_ff_im,\
         h0_re,h0_im,hx_re,hx_im,hy_re,hy_im,hz_re,hz_im,h_sq_re,h_sq_im,pt_class,pt_margin,\
         branch_warning,je_condition,error_code\n",
    );
    for p in points {
        let g = p.g.as_ref();
        let co = p.coeffs.as_ref();
        let pt =
            p.pt.map(|c| c.spectrum.to_string())
                .unwrap_or_else(|| "nan".into());
        let jc = p
            .je_cond
            .map(|b| b.to_string())
            .unwrap_or_else(|| "nan".into());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(p.tau),
            p.slices,
            fmt_f64(p.est_error),
            opt(g.map(|g| g.m[0][0].re)),
            opt(g.map(|g| g.m[0][0].im)),
            opt(g.map(|g| g.m[0][1].re)),
            opt(g.map(|g| g.m[0][1].im)),
            opt(g.map(|g| g.m[1][0].re)),
            opt(g.map(|g| g.m[1][0].im)),
            opt(g.map(|g| g.m[1][1].re)),
            opt(g.map(|g| g.m[1][1].im)),
            opt(co.map(|c| c.h0.re)),
            opt(co.map(|c| c.h0.im)),
            opt(co.map(|c| c.hx.re)),
            opt(co.map(|c| c.hx.im)),
            opt(co.map(|c| c.hy.re)),
            opt(co.map(|c| c.hy.im)),
            opt(co.map(|c| c.hz.re)),
            opt(co.map(|c| c.hz.im)),
            opt(p.h_sq.map(|h| h.re)),
            opt(p.h_sq.map(|h| h.im)),
            pt,
            opt(p.pt.map(|c| c.margin)),
            p.branch_warning,
            jc,
            p.error,
        )
        .unwrap();
    }
    out
}

/// Engine-comparison rows.
pub fn compare_csv(points: &[ComparePoint]) -> String {
    let mut out = String::from(
        "tau_us,nh_p_pp,nh_p_pm,nh_p_mp,nh_p_mm,oracle_p_pp,oracle_p_pm,oracle_p_mp,oracle_p_mm,max_abs_diff,error_code\n",
    );
    for p in points {
        let a = p.nonhermitian.as_ref();
        let b = p.oracle.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(p.tau),
            opt(a.map(|t| t.pp())),
            opt(a.map(|t| t.pm())),
            opt(a.map(|t| t.mp())),
            opt(a.map(|t| t.mm())),
            opt(b.map(|t| t.pp())),
            opt(b.map(|t| t.pm())),
            opt(b.map(|t| t.mp())),
            opt(b.map(|t| t.mm())),
            fmt_f64(p.max_diff),
            p.error,
        )
        .unwrap();
    }
    out
}
