use pointscatter_core::resonance::min_decay_rate;
use pointscatter_core::optimize::{optimize_line, ObjectiveSpec, OptimizerSettings};
use pointscatter_core::refdata::{entries, get_reference, quadratic_fit, Family, PUBLISHED_FIT};
use pointscatter_core::{total_cross_section, IncidentWave, ScattererModel};

fn sigma0(e: &pointscatter_core::refdata::ReferenceEntry) -> f64 {
    total_cross_section(&e.configuration(), &IncidentWave::along_z(), &ScattererModel::resonant()).unwrap()
}

#[test]
fn every_entry_reproduces_its_cross_section() {
    for e in entries() {
        let s = sigma0(e);
        assert!((s - e.sigma).abs() <= 0.1, "{}: {s} vs {}", e.label(), e.sigma);
    }
}

#[test]
fn narrow_and_wide_entries_reproduce_decay_rates() {
    for e in entries().iter().filter(|e| e.family != Family::Decay) {
        let g = min_decay_rate(&e.configuration()).unwrap();
        assert!((g - e.gamma_min).abs() <= 0.15 * e.gamma_min, "{}: {g:e} vs {:e}", e.label(), e.gamma_min);
    }
}

#[test]
fn decay_entries_within_a_factor_of_three() {
    for n in [8, 9] {
        let e = get_reference(n, Family::Decay).unwrap();
        let g = min_decay_rate(&e.configuration()).unwrap();
        assert!(g <= 3.0 * e.gamma_min && g >= e.gamma_min / 3.0, "{}: {g:e}", e.label());
    }
}

#[test]
fn eight_scatterer_entries_are_mirror_symmetric() {
    for f in Family::ALL {
        let z = get_reference(8, f).unwrap().positions;
        for k in 0..4 {
            assert_eq!(z[k], -z[7 - k]);
        }
    }
}

#[test]
fn fit_through_optimized_small_chains_and_table_values() {
    let mut points = Vec::new();
    for n in 2..=7 {
        let r = optimize_line(n, ObjectiveSpec::max_cross_section(), false, &OptimizerSettings::desk(n as u64)).unwrap();
        points.push((n as f64, r.best_objective().unwrap()));
    }
    points.push((8.0, 23.6));
    points.push((9.0, 26.2));
    let fit = quadratic_fit(&points).unwrap();
    println!("points {points:?}\nfit a = {:.4}, b = {:.4}", fit.a, fit.b);
    assert!((fit.a - PUBLISHED_FIT.a).abs() <= 0.03, "a = {} outside {} ± 0.03", fit.a, PUBLISHED_FIT.a);
}
