//! CSV rendering. Floats are written with 17 significant digits so that
//! identical runs give identical bytes.

use std::fmt::Write;

use crate::grid::GridFunction;
use crate::identities::IdentityReport;

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// `identity,alpha1,alpha2,family,n,norm_kind,residual,observed_order`
pub fn identity_csv(rows: &[&IdentityReport]) -> String {
    let mut out = String::from("identity,alpha1,alpha2,family,n,norm_kind,residual,observed_order\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.id.tag(),
            float(r.alpha1),
            opt(r.alpha2),
            r.family,
            r.n,
            r.norm_kind,
            float(r.residual),
            opt(r.observed_order)
        )
        .expect("writing to a String");
    }
    out
}

/// Columns of `trajectory.csv`; `x_linear` is left empty when absent.
pub struct TrajectoryRows<'a> {
    pub x_ritz: &'a GridFunction,
    pub x_linear: Option<&'a GridFunction>,
    pub el: &'a GridFunction,
    pub eom: &'a GridFunction,
}

/// `t,x_ritz,x_linear,el_residual,eom_residual`
pub fn trajectory_csv(rows: &TrajectoryRows<'_>) -> String {
    let grid = rows.x_ritz.grid();
    let mut out = String::from("t,x_ritz,x_linear,el_residual,eom_residual\n");
    for i in 0..=grid.n() {
        writeln!(
            out,
            "{},{},{},{},{}",
            float(grid.node(i)),
            float(rows.x_ritz.values()[i]),
            opt(rows.x_linear.map(|x| x.values()[i])),
            float(rows.el.values()[i]),
            float(rows.eom.values()[i])
        )
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use crate::identities::{IdentityForm, IdentityId};

    #[test]
    fn identity_rows_format() {
        let r = IdentityReport {
            id: IdentityId::MixedIbp,
            form: IdentityForm::Stated,
            alpha1: 0.25,
            alpha2: Some(0.75),
            family: "power1".into(),
            n: 512,
            norm_kind: "abs".into(),
            residual: 1.0 / 3.0,
            lhs: 0.0,
            rhs: 0.0,
            observed_order: None,
        };
        let csv = identity_csv(&[&r]);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "MIXED_IBP,2.5000000000000000e-1,7.5000000000000000e-1,power1,512,abs,3.3333333333333331e-1,"
        );
    }

    #[test]
    fn trajectory_rows_format() {
        let g = make_grid(0.0, 1.0, 2).unwrap();
        let x = sample(|t| t, &g).unwrap();
        let csv = trajectory_csv(&TrajectoryRows {
            x_ritz: &x,
            x_linear: None,
            el: &x,
            eom: &x,
        });
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(
            csv.lines().nth(3).unwrap(),
            "1.0000000000000000e0,1.0000000000000000e0,,1.0000000000000000e0,1.0000000000000000e0"
        );
    }
}
