use std::f64::consts::PI;
use std::sync::Arc;

use maslov_core::expr::Scope;
use maslov_core::grassmannian::{adapted_frame, parallel_transport_plane};
use maslov_core::immersion::{mean_curvature, Immersion, LoopPath, ShapeRegistry};
use maslov_core::maslov::{
    bump_family, closure_defect, compatible_from_metric, generator_loops, index_integral,
    index_winding, metric_sweep, period_vector, theorem_residual, MaslovReport, Status,
};
use maslov_core::metric::{Euclidean, FubiniStudy, MetricField};
use maslov_core::{LagrangianFrame, RealVector};

fn build(spec: &str) -> Box<dyn Immersion> {
    ShapeRegistry::builtin().build_str(spec, 42).unwrap()
}

fn expr_loop(name: &str, coords: &[&str]) -> LoopPath {
    let srcs: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
    LoopPath::from_expressions(name, &srcs, &Scope::loop_parameter()).unwrap()
}

/// Every closed loop of the analytic catalog used by the suites.
fn analytic_suite() -> Vec<(String, Box<dyn Immersion>, LoopPath)> {
    let mut out = Vec::new();
    for spec in ["circle:r=1", "circle:r=3"] {
        let imm = build(spec);
        let lp = LoopPath::full(imm.domain()).unwrap();
        out.push((spec.to_string(), imm, lp));
    }
    for spec in ["product-torus:r1=1,r2=0.5", "product-torus:r1=2,r2=0.3,r3=0.8", "su-plane:n=2"] {
        for lp in generator_loops(build(spec).as_ref()).unwrap() {
            out.push((spec.to_string(), build(spec), lp));
        }
    }
    out.push(("line".into(), build("line"), expr_loop("wiggle", &["0.5*sin(2*pi*t)"])));
    out.push((
        "plane:n=2".into(),
        build("plane:n=2,phases=0.4|1.3"),
        expr_loop("ellipse", &["0.5*cos(2*pi*t)", "0.3*sin(2*pi*t)"]),
    ));
    out
}

#[test]
fn engines_agree_and_theorem_holds_pointwise() {
    for (name, imm, lp) in analytic_suite() {
        let r = MaslovReport::compute(imm.as_ref(), &name, &lp, 512, 1e-6).unwrap();
        assert_eq!(r.status, Status::Verified, "{name} {}: {r:?}", lp.name());
        let integral = r.index_integral.unwrap();
        assert!((integral - integral.round()).abs() <= 1e-6, "{name}: {integral}");
    }
}

#[test]
fn finite_difference_shapes_meet_the_looser_tier() {
    let mut suite: Vec<(String, Box<dyn Immersion>, LoopPath)> = Vec::new();
    for spec in ["circle:r=1,jets=fd", "product-torus:r1=1,r2=0.5,jets=fd", "gradient-graph:phi=cos(u1)*sin(u2),n=2,period=2*pi"] {
        let imm = build(spec);
        let loops = if imm.n() == 1 {
            vec![LoopPath::full(imm.domain()).unwrap()]
        } else {
            generator_loops(imm.as_ref()).unwrap()
        };
        for lp in loops {
            suite.push((spec.to_string(), build(spec), lp));
        }
    }
    for (name, imm, lp) in suite {
        assert!(theorem_residual(imm.as_ref(), &lp, 512).unwrap() <= 1e-3, "{name}");
        let r = MaslovReport::compute(imm.as_ref(), &name, &lp, 512, 1e-3).unwrap();
        assert_eq!(r.status, Status::Verified, "{name}: {r:?}");
    }
}

#[test]
fn reversal_negates_both_engines() {
    let reference = LagrangianFrame::standard(2);
    let t = build("product-torus:r1=1,r2=0.5");
    for lp in generator_loops(t.as_ref()).unwrap() {
        let w = index_winding(t.as_ref(), &lp, 512, &reference).unwrap();
        let wr = index_winding(t.as_ref(), &lp.reversed(), 512, &reference).unwrap();
        assert_eq!(w, -wr);
        let i = index_integral(t.as_ref(), &lp, 512).unwrap();
        let ir = index_integral(t.as_ref(), &lp.reversed(), 512).unwrap();
        assert!((i + ir).abs() <= 1e-10);
    }
}

#[test]
fn homotopic_loops_share_the_index() {
    let t = build("product-torus:r1=1,r2=0.5");
    let reference = LagrangianFrame::standard(2);
    let straight = LoopPath::generator(t.domain(), 0).unwrap();
    let wavy = expr_loop("wavy", &["2*pi*t", "0.4*sin(2*pi*t) + 0.2*sin(6*pi*t)"]);
    let diagonal = expr_loop("diagonal", &["2*pi*t", "2*pi*t"]);
    let a = index_winding(t.as_ref(), &straight, 512, &reference).unwrap();
    let b = index_winding(t.as_ref(), &wavy, 512, &reference).unwrap();
    assert_eq!(a, b);
    // (1, 1) class pairs to the sum of the periods
    assert_eq!(index_winding(t.as_ref(), &diagonal, 512, &reference).unwrap(), 4);
}

#[test]
fn reference_plane_does_not_change_the_winding() {
    let c = build("circle:r=1");
    let lp = LoopPath::full(c.domain()).unwrap();
    for phase in [0.0, 0.4, 2.0, -1.0] {
        let reference = LagrangianFrame::new(vec![RealVector::from_column_slice(&[
            f64::cos(phase),
            f64::sin(phase),
        ])])
        .unwrap();
        assert_eq!(index_winding(c.as_ref(), &lp, 64, &reference).unwrap(), 2);
    }
}

#[test]
fn minimal_shapes_have_vanishing_class() {
    for seed in 0..5 {
        let p = build(&format!("su-plane:n=3,seed={seed}"));
        for u in p.domain().grid(3) {
            assert!(mean_curvature(p.as_ref(), &u).unwrap().amax() <= 1e-9);
        }
        let basis = generator_loops(p.as_ref()).unwrap();
        assert_eq!(period_vector(p.as_ref(), &basis, 64).unwrap(), vec![0, 0, 0]);
        for lp in &basis {
            assert!(index_integral(p.as_ref(), lp, 64).unwrap().abs() <= 1e-8);
        }
    }
    assert!(period_vector(build("plane:n=2").as_ref(), &[], 64).unwrap().is_empty());
}

#[test]
fn torus_periods_do_not_depend_on_radii() {
    for spec in ["product-torus:r1=1,r2=0.5", "product-torus:r1=2,r2=0.3"] {
        let t = build(spec);
        let basis = generator_loops(t.as_ref()).unwrap();
        assert_eq!(period_vector(t.as_ref(), &basis, 512).unwrap(), vec![2, 2]);
    }
}

fn arc(s: f64) -> (RealVector, RealVector) {
    let a = 0.5 * PI * s;
    let x = RealVector::from_column_slice(&[0.3 + 0.4 * a.cos(), 0.4 * a.sin(), 0.2 * s, -0.1]);
    let v = RealVector::from_column_slice(&[-0.2 * PI * a.sin(), 0.2 * PI * a.cos(), 0.2, 0.0]);
    (x, v)
}

fn arc_back(s: f64) -> (RealVector, RealVector) {
    let (x, v) = arc(1.0 - s);
    (x, -v)
}

#[test]
fn transport_there_and_back_is_the_identity() {
    let metrics: Vec<Box<dyn MetricField>> = vec![Box::new(Euclidean::new(2)), Box::new(FubiniStudy::new(2, 1.0))];
    for metric in metrics {
        let (x0, _) = arc(0.0);
        let f0 = adapted_frame(metric.as_ref(), &x0, &LagrangianFrame::standard(2)).unwrap();
        let there = parallel_transport_plane(metric.as_ref(), &arc, &f0, 10_000).unwrap();
        assert!(there.drift() <= 1e-6 && !there.drift_warning);
        let back = parallel_transport_plane(metric.as_ref(), &arc_back, &there.vectors, 10_000).unwrap();
        let err = back.vectors.iter().zip(&f0).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        assert!(err <= 1e-6, "{}: {err}", metric.id());
    }
}

#[test]
fn standard_structure_closes_the_mean_curvature_form() {
    let flat = compatible_from_metric(Arc::new(Euclidean::new(2)), &[]).unwrap();
    for spec in ["product-torus:r1=1,r2=0.5", "product-torus:r1=2,r2=0.3", "su-plane:n=2"] {
        let t = build(spec);
        let d = closure_defect(t.as_ref(), &flat, &t.domain().grid(6)).unwrap();
        assert!(d <= 1e-6, "{spec}: {d}");
    }
    let c = build("circle:r=1");
    let flat1 = compatible_from_metric(Arc::new(Euclidean::new(1)), &[]).unwrap();
    assert_eq!(closure_defect(c.as_ref(), &flat1, &c.domain().grid(4)).unwrap(), 0.0);
}

#[test]
fn bump_sweep_is_minimal_at_zero() {
    let t = build("product-torus:r1=1,r2=0.5");
    let grid = t.domain().grid(5);
    let table = metric_sweep(t.as_ref(), &bump_family(2, &[0.0, 0.05, 0.1]), &grid).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.rows.iter().all(|r| r.defect.is_some_and(|d| d >= 0.0)));
    assert_eq!(table.argmin, Some(0.0));
    assert!(table.rows[0].defect.unwrap() <= 1e-6);
    assert!(metric_sweep(t.as_ref(), &bump_family(2, &[0.0]), &[]).is_err());
}
