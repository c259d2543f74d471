//! Built-in experiment presets.
//!
//! Each preset is a complete config text for one standard experiment at the
//! reference dimensions; the CLI layers `--config` and `--set` overrides on
//! top. Names follow the `figN` convention of the accompanying report
//! figures; the catalog is contiguous except `fig4`, which in the report is
//! a partitioning sketch with no data to reproduce.

/// Named presets in catalog order: `(name, config text)`.
pub fn experiment_catalog() -> &'static [(&'static str, &'static str)] {
    PRESETS
}

/// Looks up one preset's config text.
pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

const PRESETS: &[(&str, &str)] = &[
    (
        "fig2",
        "\
# Transmit-power trace of exact and iterative precoding vs array size.
experiment = power_vs_n
n_users = 16
n_bs_grid = 32,64,128,256
schemes = zf,gs:2
trials = 200
seed = 2
",
    ),
    (
        "fig3",
        "\
# Mean Gauss-Seidel contraction energy vs load factor, with the closed form.
experiment = frobenius_vs_alpha
n_users = 16
alpha_grid = 2,4,8,16
trials = 200
seed = 3
",
    ),
    (
        "fig5",
        "\
# Exact power scaling vs load factor, with the large-array shortcut.
experiment = beta_vs_alpha
n_users = 16
alpha_grid = 2,4,8,16
trials = 200
seed = 5
",
    ),
    (
        "fig6",
        "\
# Complex-multiplication counts vs user count at a fixed 256-antenna array.
experiment = mult_count_vs_k
n_bs = 256
n_users_grid = 4,8,16,32,64
schemes = zf,neumann:2,neumann:3,neumann:4,gs:2,gs:3,gs:4
seed = 6
",
    ),
    (
        "fig7",
        "\
# Mean sum rate vs SNR, 256 antennas / 16 users.
experiment = capacity_vs_snr
n_bs = 256
n_users = 16
snr_db = 0,5,10,15,20,25,30
schemes = zf,neumann:2,neumann:3,neumann:4,gs:2,gs:3,gs:4
trials = 200
seed = 7
",
    ),
    (
        "fig8",
        "\
# Mean sum rate vs SNR, 256 antennas / 32 users.
experiment = capacity_vs_snr
n_bs = 256
n_users = 32
snr_db = 0,5,10,15,20,25,30
schemes = zf,neumann:2,neumann:3,neumann:4,gs:2,gs:3,gs:4
trials = 200
seed = 8
",
    ),
    (
        "fig9",
        "\
# Uncoded 64-QAM BER vs SNR, zero-initialized sweeps, 256x16.
experiment = ber_vs_snr
n_bs = 256
n_users = 16
qam = 64
snr_db = 0,2,4,6,8,10,12,14
schemes = zf,mf,neumann:2,neumann:3,gs:1,gs:2,gs:3
ber_target_errors = 100
ber_max_trials = 20000
seed = 9
",
    ),
    (
        "fig10",
        "\
# Uncoded 64-QAM BER vs SNR with zone initialization, 256x16.
experiment = ber_vs_snr
n_bs = 256
n_users = 16
qam = 64
snr_db = 0,2,4,6,8,10,12,14
schemes = zf,gs:1:zone:4,gs:2:zone:4,gs:3:zone:4
ber_target_errors = 100
ber_max_trials = 20000
seed = 10
",
    ),
    (
        "fig11",
        "\
# Uncoded BER vs SNR under moderate base-station correlation.
experiment = ber_vs_snr
n_bs = 256
n_users = 16
xi = 0.2
snr_db = 0,2,4,6,8,10,12,14,16
schemes = zf,neumann:3,neumann:4,gs:3,gs:4,gs:4:zone:4
ber_target_errors = 100
ber_max_trials = 10000
seed = 11
",
    ),
    (
        "fig12",
        "\
# Uncoded BER vs SNR under strong base-station correlation.
experiment = ber_vs_snr
n_bs = 256
n_users = 16
xi = 0.5
snr_db = 0,2,4,6,8,10,12,14,16
schemes = zf,neumann:4,gs:4,gs:5:zone:4
ber_target_errors = 100
ber_max_trials = 10000
seed = 12
",
    ),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::config::parse_config;

    #[test]
    fn every_preset_parses_and_validates() {
        assert_eq!(experiment_catalog().len(), 10);
        for (name, text) in experiment_catalog() {
            let cfg = parse_config(text)
                .unwrap_or_else(|e| panic!("preset {name} does not validate: {e}"));
            assert!(cfg.trials >= 1, "{name}");
        }
    }

    #[test]
    fn lookup_finds_known_names_only() {
        assert!(preset_text("fig7").unwrap().contains("capacity_vs_snr"));
        assert!(preset_text("fig4").is_none(), "fig4 is a sketch, not a data preset");
        assert!(preset_text("fig13").is_none());
    }

    #[test]
    fn preset_seeds_are_distinct() {
        let mut seeds: Vec<u64> = experiment_catalog()
            .iter()
            .map(|(_, text)| parse_config(text).unwrap().seed)
            .collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), experiment_catalog().len());
    }
}
