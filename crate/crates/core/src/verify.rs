//! Claim-by-claim verification of the counting and structure results.
//!
//! Each acceptance criterion produces one or more [`ClaimRecord`]s. A claim
//! either passes, fails, or (for empirical probes whose outcome is not fixed
//! in advance) is recorded. Reports contain no timings or thread counts, so
//! their JSON is byte-identical across runs.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::count::BigCount;
use crate::dimers::{
    count_dimer_deficient, count_dimer_tilings, diagonal_profile, diagonal_profile_deficient,
    kasteleyn_closed_form,
};
use crate::geometry::{
    admissible_positions, classify_side, deficient_square_at, Cell, Region, SquareClass,
};
use crate::projection::{
    diagonal_balance, lift, preimage_cardinality, project, ImageTiling, LiftChoices,
};
use crate::propagation::propagate;
use crate::solver::{count_tilings_with, enumerate_tilings, validate_tiling, CountLedger, Tiling};
use crate::structure::{crack_from_decomposition, decompose, validate_crack};
use crate::tiles::{Placement, TileSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quick,
    Full,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Suite::Quick),
            "full" => Ok(Suite::Full),
            other => Err(format!("unknown suite {other:?} (expected quick or full)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Recorded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Recorded => "recorded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimRecord {
    pub claim: String,
    pub criterion: u8,
    pub expected: Value,
    pub observed: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub claims: Vec<ClaimRecord>,
    pub summary: Summary,
    #[serde(skip)]
    pub runtime: Duration,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub recorded: usize,
}

impl Summary {
    pub fn of(claims: &[ClaimRecord]) -> Self {
        let mut s = Summary::default();
        for c in claims {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Recorded => s.recorded += 1,
            }
        }
        s
    }
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Reference values the suite compares against. Any field missing from a
/// golden file keeps its default.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Golden {
    /// T4 counts per side, one per admissible position in increasing order
    pub t4_counts: BTreeMap<usize, Vec<u64>>,
    pub dimer_counts: BTreeMap<usize, u64>,
    pub t4_census: BTreeMap<usize, u64>,
    pub t4plus_census: BTreeMap<usize, u64>,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl Default for Golden {
    fn default() -> Self {
        let mut t4_census = BTreeMap::new();
        let mut t4plus_census = BTreeMap::new();
        for side in [5usize, 7, 9, 11, 13] {
            let m = (side as u64 - 1) / 4;
            let doubled = if side % 4 == 3 { 2 } else { 1 };
            t4_census.insert(side, doubled * binomial(2 * m, m));
            t4plus_census.insert(side, doubled * 4u64.pow(m as u32));
        }
        Golden {
            t4_counts: BTreeMap::from([
                (5, vec![2, 2, 2]),
                (7, vec![8, 4, 8]),
                (9, vec![36; 5]),
                (11, vec![384, 224, 392, 224, 384]),
                (13, vec![6728; 7]),
            ]),
            dimer_counts: BTreeMap::from([(2, 2), (4, 36), (6, 6728)]),
            t4_census,
            t4plus_census,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub threads: usize,
    pub golden: Golden,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            suite: Suite::Quick,
            threads: 1,
            golden: Golden::default(),
        }
    }
}

/// One-line titles of the criteria, by number.
pub const CRITERIA: [(u8, &str); 11] = [
    (1, "golden T4 counts"),
    (2, "dimer oracle triangle"),
    (3, "cross-law identities"),
    (4, "structure of every tiling"),
    (5, "crack census"),
    (6, "bijection and double cover"),
    (7, "surjection fibers"),
    (8, "empirical probes"),
    (9, "nonexistence sweep"),
    (10, "propagation"),
    (11, "thread independence"),
];

fn big(v: &BigCount) -> Value {
    match v.to_u64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

fn claim(
    criterion: u8,
    name: impl Into<String>,
    expected: Value,
    observed: Value,
    ok: bool,
) -> ClaimRecord {
    ClaimRecord {
        claim: name.into(),
        criterion,
        expected,
        observed,
        status: if ok { Status::Pass } else { Status::Fail },
        note: None,
    }
}

fn error_claim(
    criterion: u8,
    name: impl Into<String>,
    expected: Value,
    err: impl fmt::Display,
) -> ClaimRecord {
    claim(
        criterion,
        name,
        expected,
        json!({ "error": err.to_string() }),
        false,
    )
}

fn recorded(
    criterion: u8,
    name: impl Into<String>,
    expected: Value,
    observed: Value,
    note: String,
) -> ClaimRecord {
    ClaimRecord {
        claim: name.into(),
        criterion,
        expected,
        observed,
        status: Status::Recorded,
        note: Some(note),
    }
}

/// Everything the suite needs from one exhaustive pass over the tilings of
/// a deficient square.
#[derive(Clone, Debug, Default)]
struct Family {
    tilings: u64,
    /// tilings whose decomposition, crack or verdict failed
    violations: u64,
    unequal_area: u64,
    /// crack cell set -> distinct irregular fillings
    cracks: BTreeMap<Vec<Cell>, BTreeSet<Vec<Placement>>>,
    images: BTreeMap<ImageTiling, u64>,
    project_errors: u64,
}

impl Family {
    fn weighted_cracks(&self) -> usize {
        self.cracks.values().map(BTreeSet::len).sum()
    }
}

fn survey(side: usize, pos: usize, set: TileSet) -> Result<Family, String> {
    let region = deficient_square_at(side, pos).map_err(|e| e.to_string())?;
    let mut fam = Family::default();
    for tiling in enumerate_tilings(&region, set, None).map_err(|e| e.to_string())? {
        fam.tilings += 1;
        let verdict = decompose(&region, &tiling).and_then(|d| {
            let report = crack_from_decomposition(&region, &d)?;
            let mut filling = d.irregular.clone();
            filling.sort();
            let v = validate_crack(&report, side, set);
            fam.cracks
                .entry(report.crack_cells)
                .or_default()
                .insert(filling);
            Ok(v)
        });
        match verdict {
            Ok(v) => {
                if !v.is_ok() {
                    fam.violations += 1;
                }
                if !v.equal_area_ok {
                    fam.unequal_area += 1;
                }
            }
            Err(_) => fam.violations += 1,
        }
        match project(&region, &tiling) {
            Ok(image) => *fam.images.entry(image).or_default() += 1,
            Err(_) => fam.project_errors += 1,
        }
    }
    Ok(fam)
}

/// Runs criteria, sharing exhaustive enumerations between them.
pub struct Verifier {
    opts: VerifyOptions,
    families: RefCell<BTreeMap<(usize, usize, TileSet), Result<Family, String>>>,
    ledger: RefCell<CountLedger>,
}

impl Verifier {
    pub fn new(opts: VerifyOptions) -> Self {
        Self {
            families: RefCell::new(BTreeMap::new()),
            ledger: RefCell::new(CountLedger::new(opts.threads)),
            opts,
        }
    }

    fn full(&self) -> bool {
        self.opts.suite == Suite::Full
    }

    fn t4_sides(&self) -> Vec<usize> {
        if self.full() {
            vec![5, 7, 9, 11, 13]
        } else {
            vec![5, 7, 9, 11]
        }
    }

    fn family<R>(
        &self,
        side: usize,
        pos: usize,
        set: TileSet,
        f: impl FnOnce(&Family) -> R,
    ) -> Result<R, String> {
        let mut cache = self.families.borrow_mut();
        let fam = cache
            .entry((side, pos, set))
            .or_insert_with(|| survey(side, pos, set));
        fam.as_ref().map(f).map_err(Clone::clone)
    }

    fn count(&self, side: usize, pos: usize, set: TileSet) -> Result<BigCount, String> {
        self.ledger
            .borrow_mut()
            .count(side, pos, set)
            .map_err(|e| e.to_string())
    }

    fn counts(&self, side: usize, set: TileSet) -> Result<Vec<BigCount>, String> {
        admissible_positions(side)
            .into_iter()
            .map(|p| self.count(side, p, set))
            .collect()
    }

    pub fn criterion(&self, n: u8) -> Vec<ClaimRecord> {
        match n {
            1 => self.golden_counts(),
            2 => self.dimer_oracles(),
            3 => self.cross_laws(),
            4 => self.structure(),
            5 => self.census(),
            6 => self.bijection(),
            7 => self.fibers(),
            8 => self.probes(),
            9 => self.nonexistence(),
            10 => self.propagation(),
            11 => self.thread_independence(),
            _ => Vec::new(),
        }
    }

    pub fn run(&self) -> VerificationReport {
        let start = Instant::now();
        let claims: Vec<ClaimRecord> = CRITERIA
            .iter()
            .flat_map(|&(n, _)| self.criterion(n))
            .collect();
        VerificationReport {
            suite: self.opts.suite,
            summary: Summary::of(&claims),
            claims,
            runtime: start.elapsed(),
        }
    }

    fn golden_counts(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        for side in self.t4_sides() {
            let name = format!("golden/t4/side{side}");
            let Some(expected) = self.opts.golden.t4_counts.get(&side) else {
                continue;
            };
            match self.counts(side, TileSet::RibbonT4) {
                Ok(obs) => {
                    let ok = obs.len() == expected.len()
                        && obs
                            .iter()
                            .zip(expected)
                            .all(|(o, &e)| *o == BigCount::from(e));
                    out.push(claim(
                        1,
                        name,
                        json!(expected),
                        obs.iter().map(big).collect(),
                        ok,
                    ));
                }
                Err(e) => out.push(error_claim(1, name, json!(expected), e)),
            }
        }
        out
    }

    fn dimer_oracles(&self) -> Vec<ClaimRecord> {
        self.opts
            .golden
            .dimer_counts
            .iter()
            .map(|(&n, &expected)| {
                let name = format!("dimers/oracles/n{n}");
                let brute = BigCount::from(brute_force_matchings(n, n, None));
                match (count_dimer_tilings(n), kasteleyn_closed_form(n)) {
                    (Ok(dp), Ok(kast)) => {
                        let e = BigCount::from(expected);
                        let ok = brute == e && dp == e && kast == e;
                        let obs = json!({ "brute_force": big(&brute), "profile_dp": big(&dp), "kasteleyn": big(&kast) });
                        claim(2, name, json!(expected), obs, ok)
                    }
                    (Err(e), _) | (_, Err(e)) => error_claim(2, name, json!(expected), e),
                }
            })
            .collect()
    }

    fn cross_laws(&self) -> Vec<ClaimRecord> {
        let mut sides = vec![5usize, 7, 9, 11];
        if self.full() {
            sides.push(13);
        }
        let mut out = Vec::new();
        for side in sides {
            let m = classify_side(side).m().expect("odd side");
            let name = format!("cross/side{side}");
            let expected: Result<Vec<BigCount>, String> = admissible_positions(side)
                .into_iter()
                .map(|p| match classify_side(side) {
                    SquareClass::FourMPlusOne { .. } => count_dimer_tilings(2 * m),
                    _ => count_dimer_deficient(2 * m + 1, p / 2).map(|v| v * 2u8),
                })
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string());
            let law = match classify_side(side) {
                SquareClass::FourMPlusOne { .. } => {
                    format!("dimer tilings of the {0}x{0} board", 2 * m)
                }
                _ => format!(
                    "twice the dimer tilings of the deficient {0}x{0} board at p/2",
                    2 * m + 1
                ),
            };
            match (expected, self.counts(side, TileSet::RibbonT4)) {
                (Ok(exp), Ok(obs)) => {
                    let ok = exp == obs;
                    let mut c = claim(
                        3,
                        name,
                        exp.iter().map(big).collect(),
                        obs.iter().map(big).collect(),
                        ok,
                    );
                    c.note = Some(law);
                    out.push(c);
                }
                (Err(e), _) | (_, Err(e)) => out.push(error_claim(3, name, json!(law), e)),
            }
        }
        out
    }

    fn structure(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        let plus_sides = [5usize, 7, 9];
        let jobs = self
            .t4_sides()
            .into_iter()
            .map(|s| (s, TileSet::RibbonT4))
            .chain(plus_sides.iter().map(|&s| (s, TileSet::RibbonT4Plus)));
        for (side, set) in jobs {
            let name = format!("structure/{}/side{side}", set.name());
            let mut tilings = 0;
            let mut violations = 0;
            let mut err = None;
            for pos in admissible_positions(side) {
                match self.family(side, pos, set, |f| (f.tilings, f.violations)) {
                    Ok((t, v)) => {
                        tilings += t;
                        violations += v;
                    }
                    Err(e) => err = Some(e),
                }
            }
            let expected = json!({ "violations": 0 });
            match err {
                Some(e) => out.push(error_claim(4, name, expected, e)),
                None => {
                    let obs = json!({ "tilings": tilings, "violations": violations });
                    out.push(claim(
                        4,
                        name,
                        expected,
                        obs,
                        violations == 0 && tilings > 0,
                    ));
                }
            }
        }
        out
    }

    fn census(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        let jobs = self
            .t4_sides()
            .into_iter()
            .filter_map(|s| Some((s, TileSet::RibbonT4, *self.opts.golden.t4_census.get(&s)?)))
            .chain([5usize, 7, 9].into_iter().filter_map(|s| {
                Some((
                    s,
                    TileSet::RibbonT4Plus,
                    *self.opts.golden.t4plus_census.get(&s)?,
                ))
            }))
            .collect::<Vec<_>>();
        for (side, set, expected) in jobs {
            let name = format!("census/{}/side{side}", set.name());
            let per_pos: Result<Vec<usize>, String> = admissible_positions(side)
                .into_iter()
                .map(|p| self.family(side, p, set, Family::weighted_cracks))
                .collect();
            match per_pos {
                Ok(obs) => {
                    let ok = obs.iter().all(|&w| w as u64 == expected);
                    out.push(claim(5, name, json!(expected), json!(obs), ok));
                }
                Err(e) => out.push(error_claim(5, name, json!(expected), e)),
            }
        }
        out
    }

    fn bijection(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        let mut sides = vec![5usize, 7, 9, 11];
        if self.full() {
            sides.push(13);
        }
        for side in sides {
            let m = classify_side(side).m().expect("odd side");
            let four_m_one = side % 4 == 1;
            let fiber = if four_m_one { 1 } else { 2 };
            let name = format!("bijection/side{side}");
            let mut obs = Vec::new();
            let mut ok = true;
            let mut image_sets = Vec::new();
            for pos in admissible_positions(side) {
                let target = if four_m_one {
                    count_dimer_tilings(2 * m)
                } else {
                    count_dimer_deficient(2 * m + 1, pos / 2)
                };
                let row = self.family(side, pos, TileSet::RibbonT4, |f| {
                    let bad_fibers = f.images.values().filter(|&&c| c != fiber).count();
                    let unbalanced = f
                        .images
                        .keys()
                        .filter(|im| diagonal_balance(im) != (m, m))
                        .count();
                    let round_trip_failures = f
                        .images
                        .keys()
                        .filter(|im| !project_lift_identity(im, side, pos))
                        .count();
                    image_sets.push(f.images.keys().cloned().collect::<BTreeSet<_>>());
                    (
                        f.images.len(),
                        bad_fibers,
                        unbalanced,
                        round_trip_failures,
                        f.project_errors,
                    )
                });
                match (row, target) {
                    (Ok((images, bad, unbal, rt, perr)), Ok(target)) => {
                        let row_ok = BigCount::from(images) == target
                            && bad == 0
                            && unbal == 0
                            && rt == 0
                            && perr == 0;
                        ok &= row_ok;
                        obs.push(json!({
                            "position": pos,
                            "images": images,
                            "dimer_tilings": big(&target),
                            "wrong_fibers": bad,
                            "unbalanced": unbal,
                            "round_trip_failures": rt,
                            "projection_errors": perr,
                        }));
                    }
                    (Err(e), _) => {
                        ok = false;
                        obs.push(json!({ "position": pos, "error": e }));
                    }
                    (_, Err(e)) => {
                        ok = false;
                        obs.push(json!({ "position": pos, "error": e.to_string() }));
                    }
                }
            }
            let expected = json!({
                "fiber_size": fiber,
                "images": "all dimer tilings of the image board",
                "balance": [m, m],
            });
            out.push(claim(6, name, expected, Value::Array(obs), ok));
            if four_m_one {
                let same = image_sets.windows(2).all(|w| w[0] == w[1]);
                out.push(claim(
                    6,
                    format!("bijection/position-independence/side{side}"),
                    json!(true),
                    json!(same),
                    same && !image_sets.is_empty(),
                ));
            }
        }
        out
    }

    fn fibers(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        for side in [5usize, 7, 9] {
            let m = classify_side(side).m().expect("odd side");
            let name = format!("fibers/t4plus/side{side}");
            let mut obs = Vec::new();
            let mut ok = true;
            for pos in admissible_positions(side) {
                let profile = if side % 4 == 1 {
                    diagonal_profile(2 * m)
                } else {
                    diagonal_profile_deficient(2 * m + 1, pos / 2)
                };
                let row = self.family(side, pos, TileSet::RibbonT4Plus, |f| {
                    let wrong = f
                        .images
                        .iter()
                        .filter(|(im, &size)| {
                            preimage_cardinality(im, side)
                                .map_or(true, |c| c != BigCount::from(size))
                        })
                        .count();
                    (f.images.len(), wrong, f.project_errors)
                });
                match (row, profile) {
                    (Ok((images, wrong, perr)), Ok(profile)) => {
                        let total = profile.total();
                        ok &= wrong == 0 && perr == 0 && BigCount::from(images) == total;
                        obs.push(json!({
                            "position": pos,
                            "images": images,
                            "image_board_tilings": big(&total),
                            "wrong_fibers": wrong,
                            "projection_errors": perr,
                        }));
                    }
                    (Err(e), _) => {
                        ok = false;
                        obs.push(json!({ "position": pos, "error": e }));
                    }
                    (_, Err(e)) => {
                        ok = false;
                        obs.push(json!({ "position": pos, "error": e.to_string() }));
                    }
                }
            }
            let expected = json!({ "fiber_size": "2^k, doubled for sides 4m+3", "images": "every domino+monomer tiling of the image board" });
            out.push(claim(7, name, expected, Value::Array(obs), ok));
        }
        out
    }

    fn probes(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        // lower index of the weighted sum, side 5
        match (diagonal_profile(2), self.counts(5, TileSet::RibbonT4Plus)) {
            (Ok(p), Ok(counts)) => {
                let from1 = p.weighted(false);
                let from0 = p.weighted(true);
                let matches: Vec<&str> = counts
                    .iter()
                    .map(|c| {
                        if *c == from0 {
                            "k>=0"
                        } else if *c == from1 {
                            "k>=1"
                        } else {
                            "neither"
                        }
                    })
                    .collect();
                out.push(recorded(
                    8,
                    "weighted-sum-index/t4plus/side5",
                    json!({ "k>=1": big(&from1), "k>=0": big(&from0) }),
                    json!({ "counts": counts.iter().map(big).collect::<Vec<_>>(), "matches": matches }),
                    "which lower index of the weighted diagonal-monomer sum reproduces the 5x5 counts".into(),
                ));
            }
            (Err(e), _) => out.push(error_claim(
                8,
                "weighted-sum-index/t4plus/side5",
                Value::Null,
                e,
            )),
            (_, Err(e)) => out.push(error_claim(
                8,
                "weighted-sum-index/t4plus/side5",
                Value::Null,
                e,
            )),
        }

        // 4m+3 law for T4+: literal 2N(m) against the observed counts
        match (diagonal_profile(2), self.counts(7, TileSet::RibbonT4Plus)) {
            (Ok(p), Ok(counts)) => {
                let twice1 = p.weighted(false) * 2u8;
                let twice0 = p.weighted(true) * 2u8;
                let by_image_board: Vec<Value> = admissible_positions(7)
                    .into_iter()
                    .map(|pos| {
                        diagonal_profile_deficient(3, pos / 2)
                            .map(|q| big(&(q.weighted(true) * 2u8)))
                            .unwrap_or(Value::Null)
                    })
                    .collect();
                out.push(recorded(
                    8,
                    "position-independence/t4plus/side7",
                    json!({ "2N(1), k>=1": big(&twice1), "2N(1), k>=0": big(&twice0) }),
                    json!({
                        "counts": counts.iter().map(big).collect::<Vec<_>>(),
                        "twice_weighted_sum_on_deficient_3x3": by_image_board,
                    }),
                    "counts depend on the position and match neither value of 2N(1); they equal twice the weighted sum over the deficient 3x3 image board".into(),
                ));
            }
            (Err(e), _) => out.push(error_claim(
                8,
                "position-independence/t4plus/side7",
                Value::Null,
                e,
            )),
            (_, Err(e)) => out.push(error_claim(
                8,
                "position-independence/t4plus/side7",
                Value::Null,
                e,
            )),
        }

        // complement areas for T4+
        for side in [5usize, 7, 9] {
            let per_pos: Result<Vec<u64>, String> = admissible_positions(side)
                .into_iter()
                .map(|p| self.family(side, p, TileSet::RibbonT4Plus, |f| f.unequal_area))
                .collect();
            let name = format!("equal-area/t4plus/side{side}");
            match per_pos {
                Ok(v) => out.push(recorded(
                    8,
                    name,
                    json!("tilings whose two crack complements differ in area"),
                    json!(v),
                    "equal areas are a property of T4 tilings; for T4+ the value is only measured"
                        .into(),
                )),
                Err(e) => out.push(error_claim(8, name, Value::Null, e)),
            }
        }

        // T4+ tilings at every diagonal position, admissible or not
        for side in [3usize, 5, 7] {
            let name = format!("all-positions/t4plus/side{side}");
            let counts: Result<Vec<BigCount>, String> = (1..=side)
                .map(|p| self.count(side, p, TileSet::RibbonT4Plus))
                .collect();
            match counts {
                Ok(c) => out.push(recorded(
                    8,
                    name,
                    json!({ "admissible_positions": admissible_positions(side) }),
                    json!(c.iter().map(big).collect::<Vec<_>>()),
                    "T4+ counts at every diagonal position; the square tile allows tilings at positions of the wrong parity".into(),
                )),
                Err(e) => out.push(error_claim(8, name, Value::Null, e)),
            }
        }

        // side 3 lies below the range the statements cover
        let side3 = (|| -> Result<Value, String> {
            let t4 = self.count(3, 2, TileSet::RibbonT4)?;
            let dimer = count_dimer_deficient(1, 1).map_err(|e| e.to_string())? * 2u8;
            let region = deficient_square_at(3, 2).map_err(|e| e.to_string())?;
            let census = crate::structure::crack_census(&region, TileSet::RibbonT4)
                .map_err(|e| e.to_string())?
                .weighted_cracks;
            Ok(
                json!({ "t4_count": big(&t4), "twice_dimer_count_1x1_deficient": big(&dimer), "weighted_cracks": census }),
            )
        })();
        match side3 {
            Ok(obs) => out.push(recorded(
                8,
                "small-side/t4/side3",
                json!({ "t4_count": 2, "weighted_cracks": 2 }),
                obs,
                "the 4m+3 formulas at m = 0".into(),
            )),
            Err(e) => out.push(error_claim(8, "small-side/t4/side3", Value::Null, e)),
        }

        if self.full() {
            match self.counts(11, TileSet::RibbonT4Plus) {
                Ok(c) => out.push(recorded(
                    8,
                    "counts/t4plus/side11",
                    Value::Null,
                    json!(c.iter().map(big).collect::<Vec<_>>()),
                    "computed, no reference value".into(),
                )),
                Err(e) => out.push(error_claim(8, "counts/t4plus/side11", Value::Null, e)),
            }
        }
        out
    }

    fn nonexistence(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        for p in 3..=9usize {
            for q in 3..=9usize {
                if p * q % 4 != 1 {
                    continue;
                }
                let name = format!("nonexistence/t4/{p}x{q}");
                let mut expected = Vec::new();
                let mut observed = Vec::new();
                let mut err = None;
                for r in 0..p {
                    for c in 0..q {
                        let cell = Cell::new(r, c);
                        if p == q && r == c && classify_side(p).admits_position(r + 1) {
                            expected.push(cell);
                        }
                        let region =
                            Region::from_cells(p, q, Region::rectangle(p, q).cells(), Some(cell))
                                .expect("cell in the box");
                        match count_tilings_with::<u64>(
                            &region,
                            TileSet::RibbonT4,
                            self.opts.threads,
                        ) {
                            Ok(0) => {}
                            Ok(_) => observed.push(cell),
                            Err(e) => err = Some(e),
                        }
                    }
                }
                match err {
                    Some(e) => out.push(error_claim(9, name, json!(expected), e)),
                    None => {
                        let ok = expected == observed;
                        out.push(claim(
                            9,
                            name,
                            json!({ "tileable_missing_cells": expected }),
                            json!({ "tileable_missing_cells": observed }),
                            ok,
                        ));
                    }
                }
            }
        }
        out
    }

    fn propagation(&self) -> Vec<ClaimRecord> {
        let mut out = Vec::new();
        let mut sides = vec![5usize, 7];
        if self.full() {
            sides.push(11);
        }
        for side in sides {
            let name = format!("propagation/t4/side{side}");
            let mut tilings = 0u64;
            let mut failures = 0u64;
            for pos in admissible_positions(side) {
                let region = deficient_square_at(side, pos).expect("valid square");
                for t in enumerate_tilings(&region, TileSet::RibbonT4, None).expect("enumerable") {
                    tilings += 1;
                    if !propagates_cleanly(&region, &t) {
                        failures += 1;
                    }
                }
            }
            out.push(claim(
                10,
                name,
                json!({ "failures": 0 }),
                json!({ "tilings": tilings, "failures": failures }),
                failures == 0 && tilings > 0,
            ));
        }

        let mut chains = 0u64;
        let mut failures = 0u64;
        for pos in admissible_positions(5) {
            let region = deficient_square_at(5, pos).expect("valid square");
            for t in enumerate_tilings(&region, TileSet::RibbonT4, None).expect("enumerable") {
                chains += 1;
                let ok = propagate(&region, &t, TileSet::RibbonT4)
                    .and_then(|(r9, t9)| propagate(&r9, &t9, TileSet::RibbonT4))
                    .is_ok_and(|(r13, t13)| {
                        r13.deficient_square_side() == Some(13)
                            && validate_tiling(&r13, &t13).is_ok()
                    });
                if !ok {
                    failures += 1;
                }
            }
        }
        out.push(claim(
            10,
            "propagation/t4/chain5-9-13",
            json!({ "failures": 0 }),
            json!({ "chains": chains, "failures": failures }),
            failures == 0 && chains > 0,
        ));
        out
    }

    fn thread_independence(&self) -> Vec<ClaimRecord> {
        let threads = self.opts.threads.max(4);
        let mut mismatches = Vec::new();
        for side in [9usize, 11] {
            for pos in admissible_positions(side) {
                let region = deficient_square_at(side, pos).expect("valid square");
                for set in [TileSet::RibbonT4, TileSet::RibbonT4Plus] {
                    let one = count_tilings_with::<BigCount>(&region, set, 1);
                    let many = count_tilings_with::<BigCount>(&region, set, threads);
                    if one != many || one.is_err() {
                        mismatches.push(json!([side, pos, set.name()]));
                    }
                }
            }
        }
        vec![claim(
            11,
            "determinism/thread-count",
            json!({ "mismatches": [] }),
            json!({ "mismatches": mismatches }),
            mismatches.is_empty(),
        )]
    }
}

/// `project(lift(image))` returns `image` for every choice of crack variant.
fn project_lift_identity(image: &ImageTiling, side: usize, pos: usize) -> bool {
    let region = match deficient_square_at(side, pos) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let bits: &[Option<u8>] = if image.missing_image.is_some() {
        &[Some(0), Some(1)]
    } else {
        &[None]
    };
    let mut lifted = BTreeSet::new();
    for &variant_bit in bits {
        let choices = LiftChoices {
            variant_bit,
            monomer_sides: BTreeMap::new(),
        };
        match lift(image, side, pos, &choices) {
            Ok(t) if project(&region, &t).as_ref() == Ok(image) => {
                lifted.insert(t);
            }
            _ => return false,
        }
    }
    lifted.len() == bits.len()
}

fn propagates_cleanly(region: &Region, tiling: &Tiling) -> bool {
    let side = region.deficient_square_side().unwrap_or(0);
    let Ok((big_region, big_tiling)) = propagate(region, tiling, TileSet::RibbonT4) else {
        return false;
    };
    let embedded = tiling
        .placements
        .iter()
        .all(|p| big_tiling.placements.contains(p));
    let old_crack = decompose(region, tiling)
        .and_then(|d| crack_from_decomposition(region, &d))
        .map(|r| r.crack_cells);
    let new_crack = decompose(&big_region, &big_tiling)
        .and_then(|d| crack_from_decomposition(&big_region, &d))
        .map(|r| {
            r.crack_cells
                .into_iter()
                .filter(|c| c.row < side && c.col < side)
                .collect::<Vec<_>>()
        });
    embedded
        && big_region.missing() == region.missing()
        && big_region.deficient_square_side() == Some(side + 4)
        && matches!((old_crack, new_crack), (Ok(a), Ok(b)) if a == b)
}

/// Perfect matchings of the `h × w` grid (minus an optional cell) by plain
/// backtracking over the first free cell. Exponential; for small boards only.
pub fn brute_force_matchings(h: usize, w: usize, hole: Option<Cell>) -> u64 {
    assert!(h * w <= 64, "brute force is limited to 64 cells");
    let mut filled = 0u64;
    if let Some(c) = hole {
        filled |= 1 << (c.row * w + c.col);
    }
    fn go(filled: u64, h: usize, w: usize) -> u64 {
        let n = h * w;
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if filled == full {
            return 1;
        }
        let i = (!filled).trailing_zeros() as usize;
        let (r, c) = (i / w, i % w);
        let mut total = 0;
        if c + 1 < w && filled & 1 << (i + 1) == 0 {
            total += go(filled | 1 << i | 1 << (i + 1), h, w);
        }
        if r + 1 < h && filled & 1 << (i + w) == 0 {
            total += go(filled | 1 << i | 1 << (i + w), h, w);
        }
        total
    }
    go(filled, h, w)
}
