use kirchhoff_core::functionals::{fiber_project, pohozaev_p, RootClass};
use kirchhoff_core::radial::{make_bubble, GridSpec, RadialGrid};
use kirchhoff_core::regime::{classify, sweep, sweep_csv, Depth, RegimeTag, SweepAxis};
use kirchhoff_core::scalar::{b0, b1, thresholds};
use kirchhoff_core::ProblemParams;

#[test]
fn grid_bubble_projects_onto_the_closed_form_levels() {
    let p = ProblemParams::new(5, 1.0, 0.5 * (b0(5, 1.0) + b1(5, 1.0)), 0.0, 2.5, 1.0).unwrap();
    let grid = RadialGrid::new(GridSpec::for_bubble(5, 1.0, 16384)).unwrap();
    let u = make_bubble(&grid, 1.0).project_mass(p.c).unwrap();
    let t = u.norm_tuple(p.q);
    let rep = fiber_project(&t, &p).unwrap();
    let th = thresholds(&p, None).unwrap();
    let classes: Vec<RootClass> = rep.roots.iter().map(|r| r.class).collect();
    assert_eq!(classes, [RootClass::Minus, RootClass::Plus]);
    let (cm, cp) = (th.c_n_minus.unwrap(), th.c_n_plus.unwrap());
    assert!((rep.roots[0].psi - cm).abs() < 5e-4 * cm);
    assert!((rep.roots[1].psi - cp).abs() < 5e-4 * cp);
    for r in &rep.roots {
        let d = t.dilated(r.s, &p);
        assert!(pohozaev_p(&d, &p).abs() <= 1e-10 * p.a * d.grad2);
    }
}

#[test]
fn sweep_rows_agree_with_classification() {
    let base = ProblemParams::new(5, 1.0, 0.01, 0.0, 2.5, 1.0).unwrap();
    let top = b0(5, 1.0);
    let values = [-0.5 * top, 0.9 * top, 3.0 * top];
    let rows = sweep(SweepAxis::B, &values, &base, Depth::Quick);
    for (row, &b) in rows.iter().zip(&values) {
        assert_eq!(row.regime_tag, classify(&base.with_b(b)).tag);
        assert_eq!(row.passed, Some(true), "{row:?}");
    }
    assert_eq!(
        rows.iter().map(|r| r.regime_tag).collect::<Vec<_>>(),
        [RegimeTag::PureCriticalNegativeB, RegimeTag::PureCriticalTwoLevels, RegimeTag::PureCriticalNonexistence]
    );
    let csv = sweep_csv(&rows);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("b,")));
}
