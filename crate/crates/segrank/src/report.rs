//! Plain-text artifact renderers: CSV and Markdown tables plus the scree
//! SVG. All numeric formatting is fixed-precision so identical inputs give
//! byte-identical files.

use crate::efa::{FactorScores, FactorSolution};
use crate::lcca::{ComparisonRow, CovariateProfile};
use crate::mcdm::RankVector;
use crate::psych::{AdequacyReport, AlphaReport};
use crate::rankagg::AggregationResult;
use crate::survey::{weighted_mean, DistributionRow};
use nalgebra::DMatrix;

fn fmt(value: f64, decimals: usize) -> String {
    format!("{value:.decimals$}")
}

fn markdown_row(cells: &[String]) -> String {
    format!("| {} |\n", cells.join(" | "))
}

fn markdown_separator(n: usize) -> String {
    format!("|{}\n", " --- |".repeat(n))
}

/// One row per item: 7 level shares, the weighted mean, and n.
pub fn descriptives_csv(rows: &[DistributionRow]) -> String {
    let mut out = String::from("item,share_1,share_2,share_3,share_4,share_5,share_6,share_7,mean,n\n");
    for row in rows {
        let shares: Vec<String> = row.shares.iter().map(|&s| fmt(s, 4)).collect();
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.item,
            shares.join(","),
            fmt(weighted_mean(row), 4),
            row.n
        ));
    }
    out
}

pub fn descriptives_markdown(rows: &[DistributionRow]) -> String {
    let mut out = String::from("# Item response distributions\n\n");
    let header: Vec<String> = ["Item", "1", "2", "3", "4", "5", "6", "7", "Mean"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    out.push_str(&markdown_row(&header));
    out.push_str(&markdown_separator(header.len()));
    for row in rows {
        let mut cells = vec![row.item.clone()];
        cells.extend(row.shares.iter().map(|&s| fmt(s, 1)));
        cells.push(fmt(weighted_mean(row), 2));
        out.push_str(&markdown_row(&cells));
    }
    out
}

pub fn reliability_csv(reports: &[AlphaReport]) -> String {
    let mut out = String::from("scale,items,alpha_raw,alpha_standardized,below_threshold\n");
    for report in reports {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            report.scale_id,
            report.items,
            fmt(report.raw, 4),
            fmt(report.standardized, 4),
            report.below_threshold
        ));
    }
    out
}

pub fn adequacy_csv(report: &AdequacyReport) -> String {
    let mut out = String::from("statistic,value\n");
    out.push_str(&format!("kmo_overall,{}\n", fmt(report.kmo.overall, 4)));
    out.push_str(&format!("kmo_adequate,{}\n", report.kmo.adequate));
    for (item, msa) in &report.kmo.msa {
        out.push_str(&format!("msa_{item},{}\n", fmt(*msa, 4)));
    }
    out.push_str(&format!("bartlett_chi2,{}\n", fmt(report.bartlett.chi2, 4)));
    out.push_str(&format!("bartlett_df,{}\n", report.bartlett.df));
    out.push_str(&format!("bartlett_p,{:.6e}\n", report.bartlett.p_value));
    out
}

pub fn adequacy_markdown(report: &AdequacyReport) -> String {
    let mut out = String::from("# Sampling adequacy\n\n");
    out.push_str(&format!(
        "Overall KMO: {} ({})\n\n",
        fmt(report.kmo.overall, 3),
        if report.kmo.adequate { "adequate" } else { "inadequate" }
    ));
    out.push_str(&format!(
        "Bartlett sphericity: chi2 = {}, df = {}, p = {:.3e}\n\n",
        fmt(report.bartlett.chi2, 2),
        report.bartlett.df,
        report.bartlett.p_value
    ));
    out.push_str(&markdown_row(&["Item".into(), "MSA".into()]));
    out.push_str(&markdown_separator(2));
    for (item, msa) in &report.kmo.msa {
        out.push_str(&markdown_row(&[item.clone(), fmt(*msa, 3)]));
    }
    out
}

pub fn scree_csv(eigenvalues: &[f64]) -> String {
    let mut out = String::from("component,eigenvalue\n");
    for (i, &value) in eigenvalues.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt(value, 6)));
    }
    out
}

/// Minimal scree line plot; the suggested count is marked with a vertical
/// rule.
pub fn scree_svg(eigenvalues: &[f64], suggested: usize) -> String {
    let width = 640.0;
    let height = 400.0;
    let margin = 48.0;
    let plot_w = width - 2.0 * margin;
    let plot_h = height - 2.0 * margin;
    let max_y = eigenvalues.iter().cloned().fold(1.0f64, f64::max) * 1.05;
    let n = eigenvalues.len().max(2);
    let x_of = |i: usize| margin + plot_w * i as f64 / (n - 1) as f64;
    let y_of = |v: f64| margin + plot_h * (1.0 - (v.max(0.0) / max_y));

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = margin,
        b = height - margin,
        r = width - margin
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = margin,
        b = height - margin
    ));
    // elbow marker
    if suggested >= 1 && suggested <= eigenvalues.len() {
        let x = x_of(suggested - 1);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{m}\" x2=\"{x:.2}\" y2=\"{b}\" stroke=\"silver\" stroke-dasharray=\"4 4\"/>\n",
            m = margin,
            b = height - margin
        ));
    }
    let points: Vec<String> = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &v)| format!("{:.2},{:.2}", x_of(i), y_of(v)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
        points.join(" ")
    ));
    for (i, &v) in eigenvalues.iter().enumerate() {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\n",
            x_of(i),
            y_of(v)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            x_of(i),
            height - margin + 14.0,
            i + 1
        ));
    }
    for tick in 0..=4 {
        let v = max_y * tick as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            margin - 6.0,
            y_of(v) + 3.0,
            fmt(v, 2)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Pattern matrix, factor correlations, communalities and both eigenvalue
/// sequences in one flat CSV.
pub fn factor_solution_csv(solution: &FactorSolution) -> String {
    let m = solution.n_factors();
    let mut out = String::from("section,name");
    for j in 0..m {
        out.push_str(&format!(",f{}", j + 1));
    }
    out.push('\n');
    for (i, item) in solution.items.iter().enumerate() {
        out.push_str(&format!("pattern,{item}"));
        for j in 0..m {
            out.push_str(&format!(",{}", fmt(solution.pattern[(i, j)], 4)));
        }
        out.push('\n');
    }
    for (i, item) in solution.items.iter().enumerate() {
        out.push_str(&format!("structure,{item}"));
        for j in 0..m {
            out.push_str(&format!(",{}", fmt(solution.structure[(i, j)], 4)));
        }
        out.push('\n');
    }
    for i in 0..m {
        out.push_str(&format!("factor_correlation,f{}", i + 1));
        for j in 0..m {
            out.push_str(&format!(
                ",{}",
                fmt(solution.factor_correlations[(i, j)], 4)
            ));
        }
        out.push('\n');
    }
    for (i, item) in solution.items.iter().enumerate() {
        out.push_str(&format!(
            "communality,{item},{}\n",
            fmt(solution.communalities[i], 4)
        ));
    }
    for (i, &v) in solution.reduced_eigenvalues.iter().enumerate() {
        out.push_str(&format!("reduced_eigenvalue,{},{}\n", i + 1, fmt(v, 6)));
    }
    for (i, &v) in solution.initial_eigenvalues.iter().enumerate() {
        out.push_str(&format!("initial_eigenvalue,{},{}\n", i + 1, fmt(v, 6)));
    }
    out
}

/// Loading table in the measurement-model layout: one row per item, its
/// strongest loading, blanks under the interpretation threshold.
pub fn factor_solution_markdown(solution: &FactorSolution, threshold: f64) -> String {
    let m = solution.n_factors();
    let mut out = String::from("# Rotated factor solution (pattern loadings)\n\n");
    let mut header = vec!["Item".to_string()];
    header.extend((0..m).map(|j| format!("F{}", j + 1)));
    header.push("h2".into());
    out.push_str(&markdown_row(&header));
    out.push_str(&markdown_separator(header.len()));
    for (i, item) in solution.items.iter().enumerate() {
        let mut cells = vec![item.clone()];
        for j in 0..m {
            let value = solution.pattern[(i, j)];
            cells.push(if value.abs() >= threshold {
                fmt(value, 3)
            } else {
                String::new()
            });
        }
        cells.push(fmt(solution.communalities[i], 3));
        out.push_str(&markdown_row(&cells));
    }
    out.push('\n');
    out.push_str(&format!(
        "Variance explained (reduced spectrum): {}%\n",
        fmt(crate::efa::variance_explained(solution), 1)
    ));
    out.push_str(&format!(
        "Variance explained (initial spectrum): {}%\n",
        fmt(crate::efa::initial_variance_share(solution), 1)
    ));
    out
}

pub fn factor_scores_csv(scores: &FactorScores) -> String {
    let m = scores.factor_count;
    let mut out = String::from("respondent_id");
    for j in 0..m {
        out.push_str(&format!(",f{}", j + 1));
    }
    out.push('\n');
    for (i, id) in scores.respondent_ids.iter().enumerate() {
        out.push_str(id);
        for j in 0..m {
            out.push_str(&format!(",{}", fmt(scores.scores[(i, j)], 6)));
        }
        out.push('\n');
    }
    out
}

pub fn model_comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("k,log_likelihood,n_parameters,aic,bic,error\n");
    for row in rows {
        let value = |x: Option<f64>| x.map(|v| fmt(v, 4)).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.k,
            value(row.log_likelihood),
            row.n_parameters.map(|v| v.to_string()).unwrap_or_default(),
            value(row.aic),
            value(row.bic),
            row.error.clone().unwrap_or_default()
        ));
    }
    out
}

/// Class-by-factor mean table (the class-means bar data).
pub fn class_means_csv(means: &DMatrix<f64>, factor_names: &[String]) -> String {
    let mut out = String::from("class");
    for name in factor_names {
        out.push_str(&format!(",{name}"));
    }
    out.push('\n');
    for c in 0..means.nrows() {
        out.push_str(&format!("{}", c + 1));
        for j in 0..means.ncols() {
            out.push_str(&format!(",{}", fmt(means[(c, j)], 4)));
        }
        out.push('\n');
    }
    out
}

pub fn class_means_markdown(means: &DMatrix<f64>, factor_names: &[String]) -> String {
    let mut out = String::from("# Class factor means\n\n");
    let mut header = vec!["Class".to_string()];
    header.extend(factor_names.iter().cloned());
    out.push_str(&markdown_row(&header));
    out.push_str(&markdown_separator(header.len()));
    for c in 0..means.nrows() {
        let mut cells = vec![format!("{}", c + 1)];
        for j in 0..means.ncols() {
            cells.push(fmt(means[(c, j)], 3));
        }
        out.push_str(&markdown_row(&cells));
    }
    out
}

pub fn covariate_profiles_csv(profiles: &[CovariateProfile], k: usize) -> String {
    let mut out = String::from("covariate,level");
    for c in 0..k {
        out.push_str(&format!(",class_{}", c + 1));
    }
    out.push_str(",overall\n");
    for profile in profiles {
        match profile {
            CovariateProfile::Categorical { code, levels, class_shares, overall } => {
                for (li, level) in levels.iter().enumerate() {
                    out.push_str(&format!("{code},{level}"));
                    for shares in class_shares {
                        out.push_str(&format!(",{}", fmt(shares[li], 2)));
                    }
                    out.push_str(&format!(",{}\n", fmt(overall[li], 2)));
                }
            }
            CovariateProfile::Continuous { code, class_means, overall } => {
                out.push_str(&format!("{code},mean"));
                for &mean in class_means {
                    out.push_str(&format!(",{}", fmt(mean, 2)));
                }
                out.push_str(&format!(",{}\n", fmt(*overall, 2)));
            }
        }
    }
    out
}

pub fn covariate_profiles_markdown(profiles: &[CovariateProfile], k: usize) -> String {
    let mut out = String::from("# Class covariate profiles\n\n");
    let mut header = vec!["Covariate".to_string(), "Level".to_string()];
    header.extend((0..k).map(|c| format!("Class {}", c + 1)));
    header.push("Overall".into());
    out.push_str(&markdown_row(&header));
    out.push_str(&markdown_separator(header.len()));
    for profile in profiles {
        match profile {
            CovariateProfile::Categorical { code, levels, class_shares, overall } => {
                for (li, level) in levels.iter().enumerate() {
                    let mut cells = vec![code.clone(), level.clone()];
                    for shares in class_shares {
                        cells.push(fmt(shares[li], 1));
                    }
                    cells.push(fmt(overall[li], 1));
                    out.push_str(&markdown_row(&cells));
                }
            }
            CovariateProfile::Continuous { code, class_means, overall } => {
                let mut cells = vec![code.clone(), "mean".into()];
                for &mean in class_means {
                    cells.push(fmt(mean, 1));
                }
                cells.push(fmt(*overall, 1));
                out.push_str(&markdown_row(&cells));
            }
        }
    }
    out
}

/// One attribute battery's ranking table: per-method, per-class competition
/// ranks plus the fused meta column per class.
#[derive(Debug, Clone)]
pub struct RankingTable {
    pub battery: String,
    pub labels: Vec<String>,
    pub method_names: Vec<String>,
    /// `[method][class]` rank vectors.
    pub method_ranks: Vec<Vec<RankVector>>,
    /// `[class]` fused total orders.
    pub meta: Vec<Vec<usize>>,
}

impl RankingTable {
    pub fn n_classes(&self) -> usize {
        self.meta.len()
    }
}

pub fn rankings_csv(table: &RankingTable) -> String {
    let k = table.n_classes();
    let mut out = String::from("attribute");
    for method in &table.method_names {
        for c in 0..k {
            out.push_str(&format!(",{}_class_{}", method.to_lowercase(), c + 1));
        }
    }
    for c in 0..k {
        out.push_str(&format!(",meta_class_{}", c + 1));
    }
    out.push('\n');
    for (i, label) in table.labels.iter().enumerate() {
        out.push_str(label);
        for ranks in &table.method_ranks {
            for class_ranks in ranks {
                out.push_str(&format!(",{}", class_ranks.competition[i]));
            }
        }
        for meta in &table.meta {
            out.push_str(&format!(",{}", meta[i]));
        }
        out.push('\n');
    }
    out
}

pub fn rankings_markdown(table: &RankingTable) -> String {
    let k = table.n_classes();
    let mut out = format!("# {} rankings\n\n", table.battery);
    let mut header = vec!["Attribute".to_string()];
    for method in &table.method_names {
        for c in 0..k {
            header.push(format!("{method} C{}", c + 1));
        }
    }
    for c in 0..k {
        header.push(format!("Meta C{}", c + 1));
    }
    out.push_str(&markdown_row(&header));
    out.push_str(&markdown_separator(header.len()));
    for (i, label) in table.labels.iter().enumerate() {
        let mut cells = vec![label.clone()];
        for ranks in &table.method_ranks {
            for class_ranks in ranks {
                cells.push(class_ranks.competition[i].to_string());
            }
        }
        for meta in &table.meta {
            cells.push(meta[i].to_string());
        }
        out.push_str(&markdown_row(&cells));
    }
    out
}

pub fn aggregation_toml(result: &AggregationResult) -> String {
    #[derive(serde::Serialize)]
    struct View<'a> {
        labels: &'a [String],
        meta: &'a [usize],
        objective: f64,
        metric: crate::rankagg::Metric,
        method: crate::rankagg::AggregationMethod,
        optimal: bool,
        tie_count: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    }
    toml::to_string_pretty(&View {
        labels: &result.labels,
        meta: &result.meta,
        objective: result.objective,
        metric: result.metric,
        method: result.method,
        optimal: result.optimal,
        tie_count: result.tie_count,
        seed: result.seed,
    })
    .expect("aggregation result serializes")
}

/// Footer appended to Markdown reports listing accumulated warnings.
pub fn warnings_footer(warnings: &[String]) -> String {
    if warnings.is_empty() {
        "\nwarnings: none\n".to_string()
    } else {
        let mut out = String::from("\nwarnings:\n");
        for warning in warnings {
            out.push_str(&format!("- {warning}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::DistributionRow;

    #[test]
    fn descriptives_layout_one_row_per_item() {
        let rows = vec![
            DistributionRow::new("I1", [10.0, 10.0, 10.0, 10.0, 20.0, 20.0, 20.0], 100).unwrap(),
            DistributionRow::new("I2", [0.0, 0.0, 0.0, 100.0, 0.0, 0.0, 0.0], 100).unwrap(),
        ];
        let csv = descriptives_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("item,share_1"));
        assert!(lines[2].contains("4.0000")); // constant level-4 mean
        let md = descriptives_markdown(&rows);
        assert!(md.contains("| I1 |"));
    }

    #[test]
    fn scree_svg_is_wellformed() {
        let svg = scree_svg(&[4.0, 2.0, 1.0, 0.5, 0.4], 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 5);
    }

    #[test]
    fn warnings_footer_handles_both_cases() {
        assert!(warnings_footer(&[]).contains("warnings: none"));
        let footer = warnings_footer(&["something odd".into()]);
        assert!(footer.contains("- something odd"));
    }
}
