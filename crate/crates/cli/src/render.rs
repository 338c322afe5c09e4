use std::fmt::Write;

use greentrip_core::nudge::{BannerPayload, NudgeBanner};
use greentrip_core::report::{Explanation, RecommendationResponse};
use greentrip_core::Catalog;

pub fn validation(catalog: &Catalog) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "cities:      {}", catalog.len());
    let _ = writeln!(s, "rejected:    {}", catalog.rejected().len());
    let _ = writeln!(s, "warnings:    {}", catalog.warnings().len());
    let categories: Vec<&str> = catalog.categories().iter().map(|c| c.as_str()).collect();
    let _ = writeln!(s, "categories:  {}", categories.join(", "));
    let _ = writeln!(s, "fingerprint: {}", catalog.fingerprint());
    for d in catalog.rejected() {
        let _ = writeln!(s, "rejected row {}: {}", d.row, d.reason);
    }
    for d in catalog.warnings() {
        let _ = writeln!(s, "warning row {}: {}", d.row, d.reason);
    }
    s
}

fn truncate(text: &str, width: usize) -> String {
    if text.chars().count() <= width {
        text.to_string()
    } else {
        let cut: String = text.chars().take(width - 1).collect();
        format!("{cut}~")
    }
}

pub fn ranking(r: &RecommendationResponse) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<4}  {:<20}  {:>6}  {:>8}  {:<6}  BADGE", "RANK", "CITY", "SCORE", "CO2E_KG", "LIGHT");
    for e in &r.results {
        let _ = writeln!(
            s,
            "{:<4}  {:<20}  {:>6.3}  {:>8.1}  {:<6}  {}",
            e.rank,
            truncate(&e.name, 20),
            e.score,
            e.min_co2e_kg,
            e.traffic_light.as_str(),
            e.badge_label.as_deref().unwrap_or("-"),
        );
    }
    for banner in &r.banners {
        s.push('\n');
        s.push_str(&banner_text(banner));
    }
    s
}

fn banner_text(b: &NudgeBanner) -> String {
    match &b.payload {
        BannerPayload::AlternativeSuggestion { alternatives } => {
            let mut s = format!("{} has a high footprint ({:.1} kg CO2e). Similar, cleaner options:\n", b.trigger_city_id, b.trigger_co2e_kg);
            for a in alternatives {
                let _ = writeln!(s, "  - {} (saves {:.1} kg CO2e)", a.city_id, a.co2e_saving_kg);
            }
            s
        }
        BannerPayload::PositiveReinforcement { reinforcement } => format!(
            "{} saves {:.1} kg CO2e versus the typical choice, about {:.1} trees' yearly uptake.\n",
            b.trigger_city_id, reinforcement.co2e_saved_kg, reinforcement.trees_equivalent
        ),
    }
}

pub fn explanation(e: &Explanation) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} from {} in month {}: rank {} of {}, score {:.4}",
        e.city_id, e.departure_id, e.month, e.rank, e.candidate_count, e.score
    );
    let _ = writeln!(s, "{:<24}  {:>7}  {:>7}  {:>12}", "COMPONENT", "VALUE", "WEIGHT", "CONTRIBUTION");
    for l in &e.lines {
        let _ = writeln!(s, "{:<24}  {:>7.4}  {:>7.4}  {:>12.4}", l.component, l.value, l.weight, l.contribution);
    }
    let _ = writeln!(s, "{:<24}  {:>7}  {:>7}  {:>12.4}", "total", "", "", e.weighted_sum);
    let _ = writeln!(s, "interest match {:.3}, cleanest mode {:.1} kg CO2e", e.interest_match, e.min_co2e_kg);
    for n in &e.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}
