use circles_core::measures::{
    compare_measures, critical_exponent_orbit, omega_empirical, omega_from_ps, orbit_points, poincare_sum,
    ps_measure_grid, GridSpec, MeasureGrid, DEFAULT_HEIGHT_CUT, DEFAULT_S_OFFSET,
};
use circles_core::moebius::{CircleGeometry, MobiusMap, UHPoint};
use circles_core::packing::{apollonian_enumerate, DescartesQuadruple, Generator, GroupPresentation, Packing};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn root() -> DescartesQuadruple {
    DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap()
}

/// Whether the circle `|z − center| = r` passes through the closed box.
fn curve_meets_box(center: Complex64, r: f64, lo: Complex64, hi: Complex64) -> bool {
    let near = c(center.re.clamp(lo.re, hi.re), center.im.clamp(lo.im, hi.im));
    let far_x = (center.re - lo.re).abs().max((center.re - hi.re).abs());
    let far_y = (center.im - lo.im).abs().max((center.im - hi.im).abs());
    (near - center).norm() <= r && far_x.hypot(far_y) >= r
}

fn cells_meeting(packing: &Packing, grid: &GridSpec) -> Vec<bool> {
    (0..grid.cells())
        .map(|cell| {
            let (lo, hi) = grid.cell_bounds(cell);
            packing.iter().any(|e| match e.shape {
                CircleGeometry::Circle { center, radius, .. } => curve_meets_box(center, radius, lo, hi),
                CircleGeometry::Line { .. } => false,
            })
        })
        .collect()
}

#[test]
fn ps_mass_sits_on_cells_meeting_the_gasket() {
    let r = root();
    let orbit = orbit_points(&r.dual_group().unwrap(), 10);
    let delta = critical_exponent_orbit(&orbit).unwrap().delta;
    let packing = apollonian_enumerate(&r, 200.0).unwrap();
    let grid = GridSpec::around(&packing, 16, 16).unwrap();
    let ps = ps_measure_grid(&orbit, delta + DEFAULT_S_OFFSET, DEFAULT_HEIGHT_CUT, &grid).unwrap();
    let hit = cells_meeting(&packing, &grid);
    let on: f64 = ps.weights.iter().zip(&hit).filter(|(_, &h)| h).map(|(w, _)| w).sum();
    assert!(on >= 0.9, "mass on packing cells {on}");
}

#[test]
fn empirical_grid_is_mirror_symmetric() {
    let packing = apollonian_enumerate(&root(), 2e3).unwrap();
    // odd cell count, so the mirror axis runs through the middle column
    let grid = GridSpec::new(c(-1.05, -1.05), c(1.05, 1.05), 15, 15).unwrap();
    let m = omega_empirical(&packing, &grid, 1e3, 2.0).unwrap();
    for iy in 0..15 {
        for ix in 0..7 {
            let (a, b) = (m.weight(ix, iy), m.weight(14 - ix, iy));
            assert!((a - b).abs() <= 0.1 * a.max(b), "cell ({ix}, {iy}): {a} vs {b}");
        }
    }
}

#[test]
fn empirical_and_ps_measures_agree_on_coarse_grid() {
    let r = root();
    let packing = apollonian_enumerate(&r, 4e3).unwrap();
    let grid = GridSpec::around(&packing, 8, 8).unwrap();
    let orbit = orbit_points(&r.dual_group().unwrap(), 11);
    let delta = critical_exponent_orbit(&orbit).unwrap().delta;
    let ps = ps_measure_grid(&orbit, delta + DEFAULT_S_OFFSET, DEFAULT_HEIGHT_CUT, &grid).unwrap();
    let omega = omega_from_ps(&ps, delta).unwrap();
    let empirical = omega_empirical(&packing, &grid, 2e3, 2.0).unwrap();
    let cmp = compare_measures(&empirical, &omega).unwrap();
    assert!(cmp.pearson >= 0.8, "{cmp:?}");
}

#[test]
fn comparison_of_partially_mixed_grids() {
    let spec = GridSpec::new(c(0.0, 0.0), c(1.0, 1.0), 2, 2).unwrap();
    let m1 = MeasureGrid::new(spec, vec![0.7, 0.1, 0.1, 0.1]).unwrap();
    let mixed: Vec<f64> = m1.weights.iter().map(|w| 0.5 * w + 0.125).collect();
    let m2 = MeasureGrid::new(spec, mixed).unwrap();
    let cmp = compare_measures(&m1, &m2).unwrap();
    // halfway to uniform keeps the shape: correlation 1, TV half the distance to uniform
    assert!((cmp.pearson - 1.0).abs() < 1e-12);
    assert!((cmp.total_variation - 0.5 * 0.45).abs() < 1e-12);
    let other = MeasureGrid::new(spec, vec![0.1, 0.7, 0.1, 0.1]).unwrap();
    let cmp = compare_measures(&m1, &other).unwrap();
    assert!(cmp.pearson > -1.0 && cmp.pearson < 1.0);
    assert!(cmp.total_variation > 0.0 && cmp.total_variation < 1.0);
}

#[test]
fn cyclic_orbit_is_a_geodesic_line() {
    let group = GroupPresentation::new(vec![Generator::new(MobiusMap::diagonal(1.0))]).unwrap();
    let orbit = orbit_points(&group, 5);
    assert_eq!(orbit.len(), 11);
    let mut heights: Vec<f64> = orbit.atoms().iter().map(|a| a.point.r.ln()).collect();
    heights.sort_by(f64::total_cmp);
    for (k, h) in (-5..=5).zip(heights) {
        assert!((h - k as f64).abs() < 1e-12);
    }
    let at = UHPoint::new(c(0.0, 0.0), std::f64::consts::E).unwrap();
    let s = 2.0;
    let expected: f64 = (-5i32..=5).map(|k| (-s * (k - 1).abs() as f64).exp()).sum();
    assert!((poincare_sum(&orbit, s, &at).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn consecutive_empirical_windows_agree() {
    let packing = apollonian_enumerate(&root(), 4e3).unwrap();
    let grid = GridSpec::around(&packing, 16, 16).unwrap();
    let early = omega_empirical(&packing, &grid, 1e3, 2.0).unwrap();
    let late = omega_empirical(&packing, &grid, 2e3, 2.0).unwrap();
    let cmp = compare_measures(&early, &late).unwrap();
    assert!(cmp.pearson >= 0.9, "{cmp:?}");
}
