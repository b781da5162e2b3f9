use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Shiftable,
    NonShiftable,
}

const NON_SHIFTABLE: &[&str] = &["light", "tv", "cooking stove", "computer", "water heater"];
const SHIFTABLE: &[&str] = &[
    "washing machine",
    "clothes dryer",
    "dish washer",
    "pool pump",
    "oven",
];

/// Canonical form of an appliance name: lowercase, single spaces, no plural `s`,
/// with `dishwasher`/`television`/`lights` style variants folded together.
pub fn canonical_name(name: &str) -> String {
    let lowered = name
        .trim()
        .to_lowercase()
        .replace(['_', '-'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    let folded = match lowered.as_str() {
        "dishwasher" | "dishwashers" => "dish washer".to_string(),
        "television" | "televisions" | "tvs" => "tv".to_string(),
        "stove" | "cooker" => "cooking stove".to_string(),
        "washer" => "washing machine".to_string(),
        "dryer" => "clothes dryer".to_string(),
        other => other.to_string(),
    };
    // Singularize the last word ("washing machines" -> "washing machine").
    match folded.rsplit_once(' ') {
        Some((head, last)) => format!("{head} {}", singular(last)),
        None => singular(&folded).to_string(),
    }
}

fn singular(word: &str) -> &str {
    match word.strip_suffix('s') {
        Some(stem) if word != "clothes" && !stem.ends_with('s') => stem,
        _ => word,
    }
}

/// Category of one of the ten named household appliances.
pub fn classify_appliance(name: &str) -> Result<Category> {
    let canonical = canonical_name(name);
    if NON_SHIFTABLE.contains(&canonical.as_str()) {
        Ok(Category::NonShiftable)
    } else if SHIFTABLE.contains(&canonical.as_str()) {
        Ok(Category::Shiftable)
    } else {
        Err(Error::UnknownAppliance(name.to_string()))
    }
}

/// Physical appliance model plus the timing freedom the occupant grants it.
///
/// All interval indices are interval-of-day on the household's grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplianceSpec {
    pub id: String,
    pub name: String,
    pub rated_power_kw: f64,
    /// Run length in intervals once started.
    pub duration: usize,
    pub category: Category,
    pub earliest_start: usize,
    pub latest_start: usize,
    pub preferred_start: usize,
    /// Intervals of the day during which the appliance must not run.
    #[serde(default)]
    pub curfew: BTreeSet<usize>,
}

impl ApplianceSpec {
    /// A non-shiftable appliance pinned at `start`.
    pub fn fixed(id: &str, name: &str, rated_power_kw: f64, duration: usize, start: usize) -> Self {
        Self {
            id: id.to_string(),
            name: name.to_string(),
            rated_power_kw,
            duration,
            category: Category::NonShiftable,
            earliest_start: start,
            latest_start: start,
            preferred_start: start,
            curfew: BTreeSet::new(),
        }
    }

    pub fn shiftable(
        id: &str,
        name: &str,
        rated_power_kw: f64,
        duration: usize,
        window: (usize, usize),
        preferred_start: usize,
    ) -> Self {
        Self {
            id: id.to_string(),
            name: name.to_string(),
            rated_power_kw,
            duration,
            category: Category::Shiftable,
            earliest_start: window.0,
            latest_start: window.1,
            preferred_start,
            curfew: BTreeSet::new(),
        }
    }

    pub fn with_curfew(mut self, curfew: impl IntoIterator<Item = usize>) -> Self {
        self.curfew = curfew.into_iter().collect();
        self
    }

    pub fn is_shiftable(&self) -> bool {
        self.category == Category::Shiftable
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        let bad = |reason: String| {
            Err(Error::InvalidHousehold {
                household: String::new(),
                reason: format!("appliance '{}': {reason}", self.id),
            })
        };
        if self.id.is_empty() {
            return bad("empty id".into());
        }
        if !(self.rated_power_kw.is_finite() && self.rated_power_kw > 0.0) {
            return bad(format!("rated_power_kw={} must be > 0", self.rated_power_kw));
        }
        if self.duration == 0 {
            return bad("duration must be >= 1".into());
        }
        if self.earliest_start > self.latest_start {
            return bad(format!(
                "window [{}, {}] is empty",
                self.earliest_start, self.latest_start
            ));
        }
        if self.latest_start + self.duration > grid.intervals_per_day() {
            return bad(format!(
                "run starting at {} for {} intervals crosses midnight",
                self.latest_start, self.duration
            ));
        }
        if !(self.earliest_start..=self.latest_start).contains(&self.preferred_start) {
            return bad(format!(
                "preferred_start {} outside window [{}, {}]",
                self.preferred_start, self.earliest_start, self.latest_start
            ));
        }
        if self.category == Category::NonShiftable && self.earliest_start != self.latest_start {
            return bad("non-shiftable appliance must have a single-start window".into());
        }
        if let Some(&c) = self.curfew.iter().next_back() {
            if c >= grid.intervals_per_day() {
                return bad(format!("curfew interval {c} beyond end of day"));
            }
        }
        Ok(())
    }

    /// True when a run starting at `start` stays inside the window and clear of curfew.
    pub fn is_feasible_start(&self, start: usize) -> bool {
        (self.earliest_start..=self.latest_start).contains(&start)
            && !(start..start + self.duration).any(|t| self.curfew.contains(&t))
    }

    /// Feasible starts in ascending order.
    pub fn feasible_starts(&self) -> Vec<usize> {
        (self.earliest_start..=self.latest_start)
            .filter(|&s| self.is_feasible_start(s))
            .collect()
    }

    /// Nearest feasible start to `target`, ties toward the earlier start.
    pub fn nearest_feasible(&self, target: usize) -> Result<usize> {
        self.feasible_starts()
            .into_iter()
            .min_by_key(|&s| (s.abs_diff(target), s))
            .ok_or_else(|| Error::InfeasibleWindow {
                appliance: self.id.clone(),
                reason: format!(
                    "window [{}, {}] lies entirely inside the curfew",
                    self.earliest_start, self.latest_start
                ),
            })
    }
}

/// Interval-of-day indices covering `from_hour` up to (not including) `to_hour`, wrapping midnight.
pub fn hours_curfew(grid: &TimeGrid, from_hour: f64, to_hour: f64) -> BTreeSet<usize> {
    let per_day = grid.intervals_per_day();
    let from = grid.interval_of_hour(from_hour);
    let to = if to_hour >= 24.0 {
        per_day
    } else {
        grid.interval_of_hour(to_hour)
    };
    if from <= to {
        (from..to).collect()
    } else {
        (from..per_day).chain(0..to).collect()
    }
}

/// Default sleeping-hours curfew for noisy appliances, 23:00 to 06:00.
pub fn night_curfew(grid: &TimeGrid) -> BTreeSet<usize> {
    hours_curfew(grid, 23.0, 6.0)
}
