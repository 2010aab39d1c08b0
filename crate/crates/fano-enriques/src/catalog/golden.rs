//! Golden files: the published basket list and quotient tables, and the
//! worked examples, checked against what the engine computes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bundled_catalog;
use crate::enumeration::{canonicalize, enumerate_all, BtCandidate, EnumerationOptions};
use crate::exact::{format_rational, int, rational_string, Rational};
use crate::gradedrings::{ActionData, Status};
use crate::hilbert::{altinok_series, bigraded_series, FanoData, FanoEnriquesData};
use crate::orbifold::{MarkedBasket, TypeBasket};
use crate::quotient::{search, LabelledBt, QuotientCandidate, SearchOptions, SearchReport};
use crate::series::Bidegree;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasketRow {
    pub label: String,
    pub r: usize,
    pub bt: MarkedBasket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub no: String,
    pub cover: String,
    pub weights: Vec<usize>,
    pub degrees: Vec<usize>,
    pub r: usize,
    pub bt_label: String,
    pub bt: MarkedBasket,
    pub be: TypeBasket,
    #[serde(rename = "minusK3", with = "rational_string")]
    pub minus_k3: Rational,
    /// `Z/r` exponent of each ambient coordinate, in the order of `weights`.
    pub action: Vec<usize>,
    /// `(degree, exponent)` of each equation.
    pub second_degrees: Vec<(usize, usize)>,
    /// Lower-codimension cover whose series the row shares.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repair: Option<String>,
}

#[derive(Deserialize)]
struct Rows<T> {
    rows: Vec<T>,
}

fn rows<T: for<'de> Deserialize<'de>>(text: &str) -> Vec<T> {
    serde_json::from_str::<Rows<T>>(text)
        .expect("bundled golden file parses")
        .rows
}

pub fn basket_table() -> Vec<BasketRow> {
    rows(include_str!("../../fixtures/table1.json"))
}

/// Quotient table 2, 3 or 4.
pub fn quotient_table(n: usize) -> Vec<TableRow> {
    match n {
        2 => rows(include_str!("../../fixtures/table2.json")),
        3 => rows(include_str!("../../fixtures/table3.json")),
        4 => rows(include_str!("../../fixtures/table4.json")),
        _ => panic!("no quotient table {n}"),
    }
}

impl TableRow {
    pub fn key(&self) -> RowKey {
        let bt = BtCandidate::new(self.r, self.bt.clone()).expect("golden basket is valid");
        RowKey {
            cover: self.cover.clone(),
            r: self.r,
            bt: canonicalize(&bt).entries().clone(),
            be: self.be.clone(),
            minus_k3: self.minus_k3.clone(),
        }
    }

    pub fn action_data(&self) -> ActionData {
        ActionData {
            coordinates: self
                .weights
                .iter()
                .copied()
                .zip(self.action.iter().copied())
                .collect(),
            relation_second_degrees: self.second_degrees.clone(),
        }
    }
}

/// What identifies a quotient: cover, torsion order, `B_t` up to rescaling, `B_e`, `-K^3`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowKey {
    pub cover: String,
    pub r: usize,
    pub bt: MarkedBasket,
    pub be: TypeBasket,
    pub minus_k3: Rational,
}

impl RowKey {
    pub fn of(c: &QuotientCandidate) -> RowKey {
        RowKey {
            cover: c.cover.clone(),
            r: c.data.r(),
            bt: c.data.bt().clone(),
            be: c.data.be().clone(),
            minus_k3: c.data.minus_k3().clone(),
        }
    }
}

impl std::fmt::Display for RowKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} r={} Bt {} Be {} -K^3 {}",
            self.cover,
            self.r,
            self.bt,
            self.be,
            format_rational(&self.minus_k3)
        )
    }
}

/// The admissible baskets labelled as in the published list where they
/// appear there, and `r.?k` otherwise.
pub fn standard_baskets(opts: EnumerationOptions) -> Vec<LabelledBt> {
    let known: BTreeMap<MarkedBasket, String> = basket_table()
        .into_iter()
        .map(|row| {
            let bt = BtCandidate::new(row.r, row.bt).expect("golden basket is valid");
            (canonicalize(&bt).entries().clone(), row.label)
        })
        .collect();
    let mut out = Vec::new();
    for (r, list) in enumerate_all(opts) {
        for (k, bt) in list.into_iter().enumerate() {
            let label = known
                .get(bt.entries())
                .cloned()
                .unwrap_or_else(|| format!("{r}.?{}", k + 1));
            out.push(LabelledBt { label, bt });
        }
    }
    out.sort_by_key(|a| label_order(&a.label));
    out
}

fn label_order(label: &str) -> (usize, usize, String) {
    let mut parts = label.split('.');
    let r = parts
        .next()
        .and_then(|p| p.parse().ok())
        .unwrap_or(usize::MAX);
    let k = parts
        .next()
        .and_then(|p| p.parse().ok())
        .unwrap_or(usize::MAX);
    (r, k, label.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl FixtureCheck {
    fn new(name: &str, problems: Vec<String>, ok_detail: String) -> Self {
        FixtureCheck {
            name: name.to_string(),
            passed: problems.is_empty(),
            detail: if problems.is_empty() {
                ok_detail
            } else {
                problems.join("; ")
            },
        }
    }
}

/// Matches emitted candidates against table rows. Returns the problems found.
pub fn compare_rows(expected: &[TableRow], got: &[&QuotientCandidate]) -> Vec<String> {
    let mut problems = Vec::new();
    let mut by_key: BTreeMap<RowKey, &QuotientCandidate> = BTreeMap::new();
    for c in got {
        by_key.insert(RowKey::of(c), c);
    }
    for row in expected {
        match by_key.remove(&row.key()) {
            None => problems.push(format!("No. {} not emitted ({})", row.no, row.key())),
            Some(c) => {
                if c.bt_label != row.bt_label {
                    problems.push(format!(
                        "No. {}: basket label {} vs {}",
                        row.no, c.bt_label, row.bt_label
                    ));
                }
                let gens: Vec<usize> = c.presentation.generator_degrees();
                let mut weights = row.weights.clone();
                weights.sort();
                let mut degrees = row.degrees.clone();
                degrees.sort();
                if gens != weights || c.presentation.relation_degrees() != degrees {
                    problems.push(format!(
                        "No. {}: presentation {} against the cover degrees",
                        row.no, c.presentation
                    ));
                }
                if !c.action.equivalent_to(&row.action_data(), row.r, true) {
                    problems.push(format!(
                        "No. {}: action {} not equivalent to the listed one",
                        row.no, c.action
                    ));
                }
                if (c.presentation.status == Status::Special) != row.special_from.is_some() {
                    problems.push(format!("No. {}: status {}", row.no, c.presentation.status));
                }
            }
        }
    }
    for key in by_key.keys() {
        problems.push(format!("unexpected quotient {key}"));
    }
    problems
}

#[derive(Deserialize)]
struct FanoExample {
    data: FanoData,
    coefficients: Vec<i64>,
    peel: Vec<(usize, usize)>,
    peeled: String,
}

#[derive(Deserialize)]
struct FanoEnriquesExample {
    data: FanoEnriquesData,
    printed: Vec<Vec<i64>>,
    exact_component: usize,
    exact_up_to: usize,
    peel: Vec<(usize, usize)>,
    peeled: String,
}

#[derive(Deserialize)]
struct Examples {
    fano: FanoExample,
    fano_enriques: FanoEnriquesExample,
}

const EXAMPLE_TRUNC: usize = 20;

fn check_examples() -> Vec<String> {
    let ex: Examples =
        serde_json::from_str(include_str!("../../fixtures/examples.json")).expect("examples parse");
    let mut problems = Vec::new();
    let plain = altinok_series(&ex.fano.data, EXAMPLE_TRUNC).expect("example data valid");
    for (n, &c) in ex.fano.coefficients.iter().enumerate() {
        if *plain.coeff(0, n) != int(c) {
            problems.push(format!(
                "plain series at t^{n}: {}",
                format_rational(plain.coeff(0, n))
            ));
        }
    }
    let mut peeled = plain.clone();
    for &(n, i) in &ex.fano.peel {
        peeled.peel_in_place(Bidegree::new(n, i));
    }
    if peeled.to_string() != format!("{} + O(t^{})", ex.fano.peeled, EXAMPLE_TRUNC + 1) {
        problems.push(format!("plain series peels to {peeled}"));
    }

    let fe = &ex.fano_enriques;
    let s = bigraded_series(&fe.data, EXAMPLE_TRUNC).expect("example data valid");
    for (i, row) in fe.printed.iter().enumerate() {
        for (n, &c) in row.iter().enumerate() {
            let must = i == fe.exact_component || n <= fe.exact_up_to;
            if must && *s.coeff(i, n) != int(c) {
                problems.push(format!(
                    "e^{i} t^{n}: {} against printed {c}",
                    format_rational(s.coeff(i, n))
                ));
            }
        }
    }
    if s.collapse() != plain {
        problems.push("components do not sum to the plain series".to_string());
    }
    let mut peeled = s.clone();
    for &(n, i) in &fe.peel {
        peeled.peel_in_place(Bidegree::new(n, i));
    }
    if peeled.to_string() != format!("{} + O(t^{})", fe.peeled, EXAMPLE_TRUNC + 1) {
        problems.push(format!("bigraded series peels to {peeled}"));
    }
    problems
}

/// Searches for all three tables at once.
pub struct TableSearches {
    pub codim1: SearchReport,
    pub codim2: SearchReport,
    pub codim3: SearchReport,
}

pub fn table_searches(opts: SearchOptions, baskets: &[LabelledBt]) -> TableSearches {
    let run = |name: &str| {
        search(
            &bundled_catalog(name).expect("bundled catalog valid"),
            baskets,
            opts,
        )
    };
    TableSearches {
        codim1: run("codim1"),
        codim2: run("codim2"),
        codim3: run("codim3"),
    }
}

/// Candidates of a report whose presentation has the given codimension.
pub fn in_codim(
    report: &SearchReport,
    codim: i64,
    status: Option<Status>,
) -> Vec<&QuotientCandidate> {
    report
        .candidates
        .iter()
        .filter(|c| {
            c.presentation.codim == codim && status.is_none_or(|s| c.presentation.status == s)
        })
        .collect()
}

/// Runs every golden-file check.
pub fn verify_fixtures(enumeration: EnumerationOptions, opts: SearchOptions) -> Vec<FixtureCheck> {
    let mut checks = Vec::new();

    let mut problems = Vec::new();
    for (name, _) in super::BUNDLED {
        if let Err(e) = bundled_catalog(name) {
            problems.push(format!("{name}: {e}"));
        }
    }
    checks.push(FixtureCheck::new(
        "catalogs",
        problems,
        format!("{} bundled catalogs valid", super::BUNDLED.len()),
    ));

    checks.push(FixtureCheck::new(
        "worked examples",
        check_examples(),
        "series and peels match".to_string(),
    ));

    let baskets = standard_baskets(enumeration);
    let table = basket_table();
    let mut problems: Vec<String> = baskets
        .iter()
        .filter(|b| b.label.contains('?'))
        .map(|b| format!("unlisted basket {}", b.bt))
        .collect();
    if baskets.len() != table.len() {
        problems.push(format!(
            "{} baskets against {} listed",
            baskets.len(),
            table.len()
        ));
    }
    checks.push(FixtureCheck::new(
        "baskets",
        problems,
        format!("{} baskets, all listed", baskets.len()),
    ));

    let s = table_searches(opts, &baskets);

    let t2 = quotient_table(2);
    let clean1 = in_codim(&s.codim1, 1, Some(Status::Clean));
    checks.push(FixtureCheck::new(
        "quotients in codimension 1",
        compare_rows(&t2, &clean1),
        format!("{} rows match", t2.len()),
    ));

    let t3 = quotient_table(3);
    let got2 = in_codim(&s.codim2, 2, None);
    let mut problems = compare_rows(&t3, &got2);
    for row in t3.iter().filter(|r| r.special_from.is_some()) {
        let origin = row.special_from.as_deref().unwrap_or_default();
        let found = s.codim1.candidates.iter().any(|c| {
            c.cover == origin
                && c.data.r() == row.r
                && c.presentation.status == Status::Special
                && c.presentation.codim == 2
                && c.data.bt() == &row.key().bt
        });
        if !found {
            problems.push(format!("No. {} does not arise from {origin}", row.no));
        }
    }
    checks.push(FixtureCheck::new(
        "quotients in codimension 2",
        problems,
        format!("{} rows match", t3.len()),
    ));

    let t4 = quotient_table(4);
    let clean3 = in_codim(&s.codim3, 3, Some(Status::Clean));
    let mut problems = compare_rows(&t4, &clean3);
    let specials: Vec<&QuotientCandidate> = s
        .codim3
        .candidates
        .iter()
        .filter(|c| c.presentation.status == Status::Special)
        .collect();
    if specials.len() != 2
        || specials
            .iter()
            .any(|c| c.cover_codim != 3 || c.presentation.codim <= 3)
    {
        problems.push(format!(
            "{} special codimension-3 quotients, expected 2 beyond codimension 3",
            specials.len()
        ));
    }
    checks.push(FixtureCheck::new(
        "quotients in codimension 3",
        problems,
        format!("{} rows match; {} special", t4.len(), specials.len()),
    ));
    checks
}
