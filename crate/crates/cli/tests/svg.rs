use antipt_cli::svg::{emit_svg, observable_curve, Curve, PlotStyle, Quantity, SvgError};
use antipt_core::{ObservableSeries, SiteState};
use antipt_core::Complex64;

fn style() -> PlotStyle {
    PlotStyle::versus_time("test", "F(t)")
}

#[test]
fn one_point_gives_a_single_marker() {
    let svg = emit_svg(&[Curve::line("p", vec![(1.0, 0.5)])], &style()).unwrap();
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    // one marker in the plot and one in the legend
    assert_eq!(svg.matches("<circle").count(), 2);
    assert!(!svg.contains("<polyline"));
}

#[test]
fn output_is_deterministic() {
    let pts: Vec<(f64, f64)> = (0..200).map(|i| (i as f64 * 0.5, (i as f64 * 0.1).sin())).collect();
    let a = emit_svg(&[Curve::line("sin", pts.clone())], &style()).unwrap();
    let b = emit_svg(&[Curve::line("sin", pts)], &style()).unwrap();
    assert_eq!(a.as_bytes(), b.as_bytes());
}

#[test]
fn empty_input_is_rejected() {
    assert!(matches!(emit_svg(&[], &style()), Err(SvgError::Empty(_))));
    assert!(matches!(emit_svg(&[Curve::line("x", vec![])], &style()), Err(SvgError::Empty(_))));
    assert!(matches!(
        emit_svg(&[Curve::line("x", vec![(0.0, f64::NAN)])], &style()),
        Err(SvgError::NonFinite(_))
    ));
}

#[test]
fn axes_legend_and_no_external_assets() {
    let curves: Vec<Curve> = ["0.01", "0.1", "0.4"]
        .iter()
        .enumerate()
        .map(|(k, r)| Curve::line(format!("ω/J = {r}"), (0..50).map(|i| (i as f64, 1.0 + k as f64 * i as f64)).collect()))
        .collect();
    let svg = emit_svg(&curves, &style()).unwrap();
    assert!(svg.contains("time t (1/J)"));
    assert!(svg.contains(">F(t)<"));
    for r in ["0.01", "0.1", "0.4"] {
        assert!(svg.contains(&format!("ω/J = {r}")));
    }
    assert!(!svg.contains("href"));
    assert!(!svg.contains("<image"));
    assert!(!svg.contains("<style"));
}

#[test]
fn curves_from_a_recorded_series() {
    let target = SiteState::new(1, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], "g").unwrap();
    let mut s = ObservableSeries::new(vec![("g".into(), target.clone())]).unwrap();
    s.record(0.0, &target, 0.0).unwrap();
    s.record(1.0, &target.scaled(Complex64::new(0.5, 0.0)), 0.0).unwrap();
    let f = observable_curve(&s, &Quantity::Fidelity("g".into()), "F_g");
    assert_eq!(f.points, vec![(0.0, 1.0), (1.0, 1.0)]);
    let p = observable_curve(&s, &Quantity::Probability, "P");
    assert_eq!(p.points[1], (1.0, 0.0625));
    assert!(observable_curve(&s, &Quantity::Fidelity("x".into()), "none").points.is_empty());
    assert!(emit_svg(&[f, p], &style()).is_ok());
}
