//! Search-parameter resolution shared by `solve` and `bench`.

use std::time::Duration;

use gdrr::model::Instance;
use gdrr::search::{auto_history_length, auto_mean_removals, scale_history_length, SearchParams};

/// Optional command-line overrides on top of the auto-tiered defaults.
#[derive(Debug, Clone, Default)]
pub struct ParamOverrides {
    pub value_power: Option<f64>,
    pub blink_rate: Option<f64>,
    pub mean_removals: Option<u32>,
    pub history_length: Option<usize>,
    pub no_history_scaling: bool,
    pub paper_strict_bin_open: bool,
    pub iteration_limit: Option<u64>,
    pub target_area: Option<u64>,
}

/// Rejects override values outside their domains before a run starts.
pub fn check_overrides(overrides: &ParamOverrides) -> Result<(), String> {
    if let Some(alpha) = overrides.value_power {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(format!("--alpha must be positive, got {alpha}"));
        }
    }
    if let Some(beta) = overrides.blink_rate {
        if !(0.0..1.0).contains(&beta) {
            return Err(format!("--beta must lie in [0, 1), got {beta}"));
        }
    }
    if overrides.history_length == Some(0) {
        return Err("--history-length must be at least 1".to_string());
    }
    Ok(())
}

/// Builds the effective parameters: tier by item-copy count, scale the
/// history to the time limit (unless disabled or explicitly set), then
/// apply explicit overrides verbatim.
pub fn build_params(
    instance: &Instance,
    time_limit: Duration,
    seed: u64,
    overrides: &ParamOverrides,
) -> SearchParams {
    let copies = instance.total_copies();
    let history_length = match overrides.history_length {
        Some(explicit) => explicit,
        None => {
            let tier = auto_history_length(copies);
            if overrides.no_history_scaling || time_limit.is_zero() {
                tier
            } else {
                scale_history_length(tier, time_limit)
            }
        }
    };
    SearchParams {
        value_power: overrides.value_power.unwrap_or(1.2),
        blink_rate: overrides.blink_rate.unwrap_or(0.05),
        mean_removals: overrides
            .mean_removals
            .unwrap_or_else(|| auto_mean_removals(copies)),
        history_length,
        time_limit,
        seed,
        iteration_limit: overrides.iteration_limit,
        target_area: overrides.target_area,
        open_unfitting_bins: overrides.paper_strict_bin_open,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gdrr::model::{BinId, BinSpec, ItemId, ItemSpec};

    fn inst(copies: u32) -> Instance {
        Instance::new(
            vec![ItemSpec {
                id: ItemId(0),
                width: 2,
                height: 2,
                demand: copies,
            }],
            vec![BinSpec {
                id: BinId(0),
                width: 10,
                height: 10,
                quantity: None,
            }],
            false,
        )
        .unwrap()
    }

    #[test]
    fn tiers_and_scaling_apply_without_overrides() {
        let p = build_params(&inst(20), Duration::from_secs(60), 1, &Default::default());
        assert_eq!(p.mean_removals, 8);
        assert_eq!(p.history_length, 200); // 2000 * 60/600
        let p = build_params(&inst(400), Duration::from_secs(600), 1, &Default::default());
        assert_eq!((p.mean_removals, p.history_length), (4, 500));
    }

    #[test]
    fn explicit_history_is_used_verbatim() {
        let overrides = ParamOverrides {
            history_length: Some(123),
            ..Default::default()
        };
        let p = build_params(&inst(20), Duration::from_secs(60), 1, &overrides);
        assert_eq!(p.history_length, 123);
    }

    #[test]
    fn scaling_can_be_disabled() {
        let overrides = ParamOverrides {
            no_history_scaling: true,
            ..Default::default()
        };
        let p = build_params(&inst(20), Duration::from_secs(60), 1, &overrides);
        assert_eq!(p.history_length, 2000);
    }
}
