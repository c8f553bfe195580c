//! Cross-engine properties: closed forms, amplitude snapshots and the oracle.

use std::f64::consts::PI;

use amplitude_flow::channels::ChannelModel;
use amplitude_flow::invariants::{conservation_residual, Branch};
use amplitude_flow::oracle::{flat_mode_grid, Oracle};
use amplitude_flow::schmidt::{
    closed_form_partner_weight, closed_form_qubit_weight, moon_weight, snapshot_weight, BipartitionCut,
    PreparationAngle,
};
use proptest::prelude::*;

fn angle(theta: f64) -> PreparationAngle {
    PreparationAngle::new(theta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_matches_closed_form_for_jc(theta in 0.0..PI, t in 0.0..20.0_f64, g in 0.1..3.0_f64) {
        let model = ChannelModel::jaynes_cummings(g, 0.0).unwrap();
        let channel = model.prepare().unwrap();
        let s = Oracle::new(&model).unwrap().sample(angle(theta), t).unwrap();
        let p = channel.flow(t).unwrap();
        prop_assert!((s.k_qubit - closed_form_qubit_weight(p, angle(theta))).abs() < 1e-9);
        prop_assert!((s.k_partner - closed_form_partner_weight(p, angle(theta))).abs() < 1e-9);
        prop_assert!((s.k_moon - moon_weight(angle(theta))).abs() < 1e-9);
    }

    #[test]
    fn oracle_matches_closed_form_for_xy(theta in 0.0..PI, t in 0.0..60.0_f64, sites in 1usize..12) {
        let model = ChannelModel::xy_chain(sites, 1.0).unwrap();
        let channel = model.prepare().unwrap();
        let s = Oracle::new(&model).unwrap().sample(angle(theta), t).unwrap();
        let p = channel.flow(t).unwrap();
        prop_assert!((s.p - p.value()).abs() < 1e-12);
        prop_assert!((s.k_qubit - closed_form_qubit_weight(p, angle(theta))).abs() < 1e-9);
        prop_assert!(s.max_third_eigenvalue < 1e-10);
    }

    #[test]
    fn snapshots_reproduce_closed_forms(theta in 0.0..PI, t in 0.0..30.0_f64, sites in 1usize..12) {
        for model in [
            ChannelModel::spontaneous_emission(0.7, 0.0, None).unwrap(),
            ChannelModel::jaynes_cummings(1.3, 0.0).unwrap(),
            ChannelModel::xy_chain(sites, 0.8).unwrap(),
        ] {
            let channel = model.prepare().unwrap();
            let snap = channel.snapshot(angle(theta), t).unwrap();
            let p = channel.flow(t).unwrap();
            let k_qubit = snapshot_weight(&snap, BipartitionCut::QubitVsRest).unwrap();
            let k_partner = snapshot_weight(&snap, BipartitionCut::PartnerVsRest).unwrap();
            prop_assert!((k_qubit - closed_form_qubit_weight(p, angle(theta))).abs() < 1e-9);
            prop_assert!((k_partner - closed_form_partner_weight(p, angle(theta))).abs() < 1e-9);
        }
    }

    #[test]
    fn discretized_reservoir_obeys_conservation(theta in PI / 4.0..3.0 * PI / 4.0, t in 0.0..5.0_f64) {
        let grid = flat_mode_grid(120, 30.0, 1.0, 0.0).unwrap();
        let model = ChannelModel::spontaneous_emission(1.0, 0.0, Some(grid)).unwrap();
        let s = Oracle::new(&model).unwrap().sample(angle(theta), t).unwrap();
        let r = conservation_residual(s.k_qubit, s.k_partner, s.k_moon, Branch::MoonDominant).unwrap();
        prop_assert!(r < 1e-7, "residual {r}");
    }
}

/// The window error of the flat grid is set by the bandwidth, not the
/// spacing: widening the band tenfold brings the population within 1%.
#[test]
fn wide_band_grid_tracks_exponential_decay() {
    let grid = flat_mode_grid(1000, 400.0, 1.0, 0.0).unwrap();
    let model = ChannelModel::spontaneous_emission(1.0, 0.0, Some(grid)).unwrap();
    let oracle = Oracle::new(&model).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..=50 {
        let t = 5.0 * i as f64 / 50.0;
        let s = oracle.sample(angle(PI / 3.0), t).unwrap();
        worst = worst.max((s.p - (-t).exp()).abs() / (-t).exp());
    }
    assert!(worst < 1e-2, "relative error {worst}");
}
