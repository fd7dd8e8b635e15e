//! Tabular run reports: one row per solved instance, plus per-group
//! aggregates (sum of bins for identical-bin sets, mean utilization for
//! variable-sized sets).

use std::fmt::Write as _;

/// Result of one instance run.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRow {
    pub instance: String,
    pub class: String,
    pub n_copies: u32,
    pub threads: usize,
    pub seed: u64,
    pub time_limit_s: f64,
    pub status: String,
    pub best_area: u64,
    pub bins_used: u32,
    pub utilization: f64,
    pub time_to_best_ms: u64,
    pub iterations: u64,
    /// `bin_id:count` pairs joined by `;`.
    pub bins_by_type: String,
    /// Published goal limits in publication order, joined by `;`.
    pub goal_trace: String,
    /// Effective search parameters, `key=value` pairs joined by `;`.
    pub params: String,
}

/// Aggregate over one (threads, class, item-count) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub threads: usize,
    pub class: String,
    pub n_copies: u32,
    pub instances: u32,
    pub solved: u32,
    pub total_bins: u32,
    pub mean_utilization: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub rows: Vec<InstanceRow>,
}

impl RunReport {
    /// Groups rows by (threads, class, n); aggregates are recomputable from
    /// the row data by construction.
    pub fn aggregate(&self) -> Vec<GroupRow> {
        let mut groups: Vec<GroupRow> = Vec::new();
        for row in &self.rows {
            let key = (row.threads, row.class.clone(), row.n_copies);
            let group = match groups
                .iter_mut()
                .find(|g| (g.threads, g.class.clone(), g.n_copies) == key)
            {
                Some(g) => g,
                None => {
                    groups.push(GroupRow {
                        threads: row.threads,
                        class: row.class.clone(),
                        n_copies: row.n_copies,
                        instances: 0,
                        solved: 0,
                        total_bins: 0,
                        mean_utilization: 0.0,
                    });
                    groups.last_mut().unwrap()
                }
            };
            group.instances += 1;
            if row.status == "ok" {
                group.solved += 1;
                group.total_bins += row.bins_used;
                group.mean_utilization += row.utilization;
            }
        }
        for group in &mut groups {
            if group.solved > 0 {
                group.mean_utilization /= group.solved as f64;
            }
        }
        groups.sort_by(|a, b| {
            (a.threads, &a.class, a.n_copies).cmp(&(b.threads, &b.class, b.n_copies))
        });
        groups
    }

    pub fn rows_csv(&self) -> String {
        let mut out = String::from(
            "instance,class,n_copies,threads,seed,time_limit_s,status,best_area,bins_used,\
             utilization,time_to_best_ms,iterations,bins_by_type,goal_trace,params\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{:.4},{},{},{},{},{}",
                r.instance,
                r.class,
                r.n_copies,
                r.threads,
                r.seed,
                r.time_limit_s,
                r.status,
                r.best_area,
                r.bins_used,
                r.utilization,
                r.time_to_best_ms,
                r.iterations,
                r.bins_by_type,
                r.goal_trace,
                r.params
            );
        }
        out
    }

    pub fn groups_csv(&self) -> String {
        let mut out =
            String::from("threads,class,n_copies,instances,solved,total_bins,mean_utilization\n");
        for g in self.aggregate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.4}",
                g.threads, g.class, g.n_copies, g.instances, g.solved, g.total_bins,
                g.mean_utilization
            );
        }
        out
    }

    /// Plain-text aggregate table for stdout.
    pub fn group_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:<16} {:>8} {:>10} {:>10} {:>12}",
            "threads", "class", "items", "instances", "bins", "util[%]"
        );
        for g in self.aggregate() {
            let _ = writeln!(
                out,
                "{:<8} {:<16} {:>8} {:>10} {:>10} {:>12.2}",
                g.threads, g.class, g.n_copies, g.instances, g.total_bins, g.mean_utilization
            );
        }
        out
    }
}

/// Derives the (class, item-count) grouping key from an instance file stem:
/// `<class>_<n>_<k>` groups by class and n, `<class>_<k>` by class alone,
/// and anything else under its own stem.
pub fn group_key(stem: &str, fallback_copies: u32) -> (String, u32) {
    let parts: Vec<&str> = stem.split('_').collect();
    if parts.len() >= 3 {
        let k_ok = parts[parts.len() - 1].parse::<u32>().is_ok();
        if let (true, Ok(n)) = (k_ok, parts[parts.len() - 2].parse::<u32>()) {
            return (parts[..parts.len() - 2].join("_"), n);
        }
    }
    if parts.len() == 2 && parts[1].parse::<u32>().is_ok() {
        return (parts[0].to_string(), fallback_copies);
    }
    (stem.to_string(), fallback_copies)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(class: &str, n: u32, bins: u32, util: f64) -> InstanceRow {
        InstanceRow {
            instance: format!("{class}_{n:03}_01"),
            class: class.into(),
            n_copies: n,
            threads: 4,
            seed: 0,
            time_limit_s: 60.0,
            status: "ok".into(),
            best_area: 100,
            bins_used: bins,
            utilization: util,
            time_to_best_ms: 10,
            iterations: 1000,
            bins_by_type: "0:7".into(),
            goal_trace: "900;800;700".into(),
            params: "alpha=1.2;beta=0.05;mu=8;lh=200".into(),
        }
    }

    #[test]
    fn group_key_parses_class_and_items() {
        assert_eq!(group_key("cl01_020_03", 7), ("cl01".into(), 20));
        assert_eq!(group_key("nice_25_1", 7), ("nice".into(), 25));
        assert_eq!(group_key("one_off", 7), ("one_off".into(), 7));
        assert_eq!(group_key("m1_2", 9), ("m1".into(), 9));
    }

    #[test]
    fn aggregates_sum_bins_and_average_utilization() {
        let report = RunReport {
            rows: vec![
                row("cl01", 20, 7, 90.0),
                row("cl01", 20, 8, 94.0),
                row("cl02", 20, 1, 88.0),
            ],
        };
        let groups = report.aggregate();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].total_bins, 15);
        assert!((groups[0].mean_utilization - 92.0).abs() < 1e-12);
        assert_eq!(groups[1].total_bins, 1);
    }

    #[test]
    fn failed_rows_count_as_instances_but_not_results() {
        let mut bad = row("cl01", 20, 0, 0.0);
        bad.status = "error: boom".into();
        let report = RunReport {
            rows: vec![row("cl01", 20, 7, 90.0), bad],
        };
        let g = &report.aggregate()[0];
        assert_eq!((g.instances, g.solved, g.total_bins), (2, 1, 7));
        assert!((g.mean_utilization - 90.0).abs() < 1e-12);
    }

    #[test]
    fn csv_headers_match_row_layout() {
        let report = RunReport {
            rows: vec![row("cl01", 20, 7, 90.0)],
        };
        let csv = report.rows_csv();
        let mut lines = csv.lines();
        let header_fields = lines.next().unwrap().split(',').count();
        let row_fields = lines.next().unwrap().split(',').count();
        assert_eq!(header_fields, row_fields);
        let gcsv = report.groups_csv();
        let mut lines = gcsv.lines();
        let header_fields = lines.next().unwrap().split(',').count();
        let row_fields = lines.next().unwrap().split(',').count();
        assert_eq!(header_fields, row_fields);
    }
}
