use proptest::prelude::*;

use qbath::environment::*;
use qbath::optimizer::{reference_balanced_design, EvalContext, Evaluator};

fn clean_site() -> SiteClimate {
    SiteClimate { turbidity_beta: 0.0, water_vapor_cm: 0.0, ..SiteClimate::default_site() }
}

#[test]
fn sun_geometry_examples() {
    // near the equinox δ ≈ 0; at latitude φ = δ the noon sun is overhead
    let g = sun_geometry(0.0, 81.0, 0.0).unwrap();
    assert!(g.declination_deg.abs() < 1.0);
    let g = sun_geometry(g.declination_deg, 81.0, 0.0).unwrap();
    assert!(g.zenith_deg.abs() < 1e-6 && (g.air_mass - 1.0).abs() < 1e-12);

    let s = sun_geometry(40.0, 172.0, 0.0).unwrap();
    assert!((s.declination_deg - 23.4).abs() < 0.1, "{}", s.declination_deg);

    // find h with θz = 60° at the equator on a zero-declination day
    let d0 = sun_geometry(0.0, 81.0, 0.0).unwrap().declination_deg.to_radians();
    let h = (0.5 / d0.cos()).acos().to_degrees();
    let g = sun_geometry(0.0, 81.0, h).unwrap();
    assert!((g.zenith_deg - 60.0).abs() < 1e-9 && (g.air_mass - 2.0).abs() < 1e-9);

    let night = sun_geometry(50.0, 10.0, 180.0).unwrap();
    assert!(night.air_mass.is_infinite());
    assert!(sun_geometry(50.0, 366.0, 0.0).is_err());
}

#[test]
fn angstrom_example_and_beer_lambert() {
    let site = SiteClimate { turbidity_beta: 0.1, angstrom_alpha: 1.3, water_vapor_cm: 0.0, ..SiteClimate::default_site() };
    let w = WaterVaporCurve::default();
    let t = atmospheric_transmission(500.0, 1.0, &site, &w).unwrap();
    assert!((t - 0.782).abs() < 1e-3, "{t}");
    assert!((t - (-0.1f64 * 0.5f64.powf(-1.3)).exp()).abs() < 1e-12);
    assert_eq!(atmospheric_transmission(700.0, 3.0, &clean_site(), &w).unwrap(), 1.0);
    let wet = SiteClimate { water_vapor_cm: 2.0, ..site.clone() };
    for l in [400.0, 940.0, 1400.0] {
        let a = atmospheric_transmission(l, 1.7, &wet, &w).unwrap();
        let b = atmospheric_transmission(l, 3.4, &wet, &w).unwrap();
        assert!((b - a * a).abs() < 1e-12);
    }
    assert!(atmospheric_transmission(500.0, 0.9, &site, &w).is_err());
}

#[test]
fn water_vapor_peaks_sit_at_tabulated_bands() {
    let w = WaterVaporCurve::default();
    for c in [940.0, 1100.0, 1400.0] {
        assert!(w.eval(c) > w.eval(c - 60.0) && w.eval(c) > w.eval(c + 60.0));
    }
}

#[test]
fn sky_thresholds() {
    assert_eq!(classify_sky(0.70).unwrap().category, SkyCategory::Clear);
    assert_eq!(classify_sky(0.50).unwrap().category, SkyCategory::PartlyCloudy);
    assert_eq!(classify_sky(0.20).unwrap().category, SkyCategory::Overcast);
    assert!((classify_sky(0.2).unwrap().diffuse_fraction - 0.95).abs() < 1e-12);
    assert!((classify_sky(0.9).unwrap().diffuse_fraction - 0.15).abs() < 1e-12);
    assert!(classify_sky(1.2).is_err());
}

#[test]
fn dust_examples() {
    let site = SiteClimate::default_site();
    let clean = SoilingState { mass_mg_cm2: 0.0, gamma_dust: 0.1, clean_transmission: 0.97 };
    assert_eq!(dust_transmission(&clean), 0.97);
    let one = SoilingState { mass_mg_cm2: 1.0, ..clean };
    assert!((dust_transmission(&one) / 0.97 - (-1.0f64).exp()).abs() < 1e-12);
    let no_growth = SiteClimate { cleaning_fraction: 1.0, ..site.clone() };
    let s = dust_step(&one, &no_growth, 30.0).unwrap();
    assert_eq!(s.mass_mg_cm2, 1.0);
    let grown = dust_step(&one, &site, 1.0).unwrap();
    assert!(grown.mass_mg_cm2 > 1.0);
    assert!((dust_wash(&one, 0.25).mass_mg_cm2 - 0.75).abs() < 1e-15);
}

#[test]
fn temperature_examples() {
    let flat = SiteClimate { temperature_annual_amp_k: 0.0, temperature_diurnal_amp_k: 0.0, ..SiteClimate::default_site() };
    assert_eq!(temperature_profile(&flat, 120.0, 7.0), flat.temperature_mean_k);
    let site = SiteClimate::default_site();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in 0..365 {
        for h in 0..24 {
            let t = temperature_profile(&site, d as f64, h as f64);
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    assert!(lo >= 283.0 && hi <= 303.0, "[{lo}, {hi}]");
    let annual_only = SiteClimate { temperature_diurnal_amp_k: 0.0, ..site.clone() };
    let max = temperature_profile(&annual_only, 365.0 / 4.0, 0.0);
    let min = temperature_profile(&annual_only, 3.0 * 365.0 / 4.0, 0.0);
    assert!(((max + min) / 2.0 - site.temperature_mean_k).abs() < 1e-9);
}

#[test]
fn bundled_sites_load() {
    let db = site_database();
    assert_eq!(db.len(), 9);
    for s in &db {
        s.validate().unwrap();
    }
    assert!(load_site_database("[{\"name\": 1}]").is_err());
}

fn evaluator() -> Evaluator {
    Evaluator::new(EvalContext::fmo_default()).unwrap()
}

#[test]
fn static_conditions_do_not_degrade() {
    let ev = evaluator();
    let l = annual_simulation(&SiteClimate::static_conditions(40.0), &reference_balanced_design(), &ev, &AnnualConfig::new(1)).unwrap();
    assert!(l.pce_degradation_pct.abs() < 1e-9 && l.etr_degradation_pct.abs() < 1e-9);
}

#[test]
fn default_year_stays_below_one_percent_and_respects_bounds() {
    let ev = evaluator();
    let site = SiteClimate::default_site();
    let l = annual_simulation(&site, &reference_balanced_design(), &ev, &AnnualConfig::new(2024)).unwrap();
    assert!(l.pce_degradation_pct < 1.0 && l.etr_degradation_pct < 1.0, "{} {}", l.pce_degradation_pct, l.etr_degradation_pct);
    assert_eq!(l.rows.len(), 365 * 24);
    for w in l.rows.windows(2) {
        let washed = w[0].day != w[1].day && site.cleaning_events.washes_on(w[0].day);
        if !washed {
            assert!(w[1].dust_um >= w[0].dust_um);
        }
    }
    for r in &l.rows {
        assert!((0.0..=1.0).contains(&r.dust_transmission));
        assert!((0.0..=1.0).contains(&r.min_atmospheric_transmission));
        assert!(r.min_atmospheric_transmission <= 1.0 && r.dust_transmission * r.min_atmospheric_transmission <= r.dust_transmission);
        if let (Some(p), Some(e)) = (r.rel_pce, r.rel_etr) {
            assert!(p.is_finite() && e.is_finite() && p > 0.0 && e > 0.0);
        }
    }
    let csv = l.to_csv("x");
    assert_eq!(csv.lines().nth(1).unwrap(), "day,hour,temp_K,humidity,dust_um,rel_pce,rel_etr");
    assert_eq!(l.reference_day0_pce_etr, (0.1688, 0.8936));
}

#[test]
fn ledger_is_deterministic_per_seed() {
    let ev = evaluator();
    let site = &site_database()[0];
    let a = annual_simulation(site, &reference_balanced_design(), &ev, &AnnualConfig::new(9)).unwrap();
    let b = annual_simulation(site, &reference_balanced_design(), &ev, &AnnualConfig::new(9)).unwrap();
    assert_eq!(a.to_csv("h"), b.to_csv("h"));
}

proptest! {
    #[test]
    fn declination_is_bounded(day in 0.0f64..=365.0, lat in -90.0f64..=90.0, h in -180.0f64..180.0) {
        let g = sun_geometry(lat, day, h).unwrap();
        prop_assert!(g.declination_deg.abs() <= 23.45 + 1e-12);
        prop_assert!(g.air_mass >= 1.0);
    }

    #[test]
    fn air_mass_increases_with_zenith(h1 in 0.0f64..85.0, dh in 0.01f64..5.0) {
        // equator on a near-zero declination day: θz tracks the hour angle
        let day = 81.0;
        let a = sun_geometry(0.0, day, h1).unwrap();
        let b = sun_geometry(0.0, day, (h1 + dh).min(85.0)).unwrap();
        prop_assert!(b.zenith_deg >= a.zenith_deg);
        prop_assert!(b.air_mass >= a.air_mass);
    }

    #[test]
    fn transmissions_stay_in_unit_interval(l in 280.0f64..4000.0, am in 1.0f64..38.0, beta in 0.0f64..0.3, w in 0.0f64..5.0) {
        let site = SiteClimate { turbidity_beta: beta, water_vapor_cm: w, ..SiteClimate::default_site() };
        let t = atmospheric_transmission(l, am, &site, &WaterVaporCurve::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
    }

    #[test]
    fn dust_mass_never_decreases_between_washes(m0 in 0.0f64..5.0, dt in 0.0f64..30.0, r in 0.0f64..1.0) {
        let site = SiteClimate { cleaning_fraction: r, ..SiteClimate::default_site() };
        let s0 = SoilingState { mass_mg_cm2: m0, gamma_dust: 0.1, clean_transmission: 1.0 };
        let s1 = dust_step(&s0, &site, dt).unwrap();
        prop_assert!(s1.mass_mg_cm2 >= s0.mass_mg_cm2);
        prop_assert!(dust_transmission(&s1) <= dust_transmission(&s0));
    }
}
