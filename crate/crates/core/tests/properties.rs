mod common;

use bmcm::data::{load_csv, NullClass};
use bmcm::engine::{decide_operators, run_exhaustive, run_sampled, Choice, SlotCounts, SlotTally};
use bmcm::expr::{enumerate_assignments, BitRow, ModelTemplate, OperatorAssignment};
use bmcm::stats::{chi2_sf, contingency_chisq, fisher_exact, ln_chi2_sf, Table2x2};
use bmcm::Dataset;
use proptest::prelude::*;

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Builds template text over `vars`, nesting at most `groups` parenthesised
/// groups, with choices drawn from `pick`.
fn build(vars: &[&str], pick: &mut dyn FnMut(usize) -> usize, groups: &mut usize) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < vars.len() {
        let remaining = vars.len() - i;
        let len = 1 + pick(remaining);
        let chunk = &vars[i..i + len];
        if len > 1 && len < vars.len() && *groups > 0 {
            *groups -= 1;
            parts.push(format!("({})", build(chunk, pick, groups)));
        } else {
            parts.extend(chunk.iter().map(|v| v.to_string()));
        }
        i += len;
    }
    parts.join(" ? ")
}

#[derive(Debug, Clone)]
struct Case {
    text: String,
    vars: Vec<&'static str>,
}

fn template_case() -> impl Strategy<Value = Case> {
    (
        Just(NAMES.to_vec()).prop_shuffle(),
        1usize..=5,
        prop::collection::vec(any::<usize>(), 16),
    )
        .prop_map(|(names, count, choices)| {
            let vars = names[..count].to_vec();
            let mut it = choices.into_iter().cycle();
            let mut pick = |n: usize| it.next().unwrap() % n;
            let mut groups = 3;
            let body = build(&vars, &mut pick, &mut groups);
            Case {
                text: format!("{body} = y"),
                vars,
            }
        })
}

fn row_of(vars: &[&str], bits: &[bool]) -> BitRow {
    vars.iter().zip(bits).map(|(v, b)| (*v, *b)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn evaluate_matches_textual_oracle(case in template_case(), index in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 5)) {
        let template = ModelTemplate::parse(&case.text).unwrap();
        prop_assert_eq!(template.variables().len(), case.vars.len());
        let assignment = OperatorAssignment::from_index(index % (1 << template.slot_count()), template.slot_count());
        let row = row_of(&case.vars, &bits);
        let lookup = |name: &str| row.get(name).unwrap();
        let text = common::substitute(&template, &assignment);
        prop_assert_eq!(template.evaluate(&assignment, &row).unwrap(), common::naive_eval(&text, &lookup));
    }

    #[test]
    fn null_rows_are_trivial(case in template_case()) {
        let template = ModelTemplate::parse(&case.text).unwrap();
        for assignment in enumerate_assignments(template.slot_count()).unwrap() {
            let zeros = row_of(&case.vars, &[false; 5]);
            let ones = row_of(&case.vars, &[true; 5]);
            prop_assert!(!template.evaluate(&assignment, &zeros).unwrap());
            prop_assert!(template.evaluate(&assignment, &ones).unwrap());
        }
    }

    #[test]
    fn canonical_text_round_trips(case in template_case()) {
        let template = ModelTemplate::parse(&case.text).unwrap();
        let printed = template.to_string();
        let reparsed = ModelTemplate::parse(&printed).unwrap();
        prop_assert_eq!(&reparsed, &template);
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    #[test]
    fn evaluation_is_monotone(case in template_case(), index in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 5), flip in 0usize..5) {
        let template = ModelTemplate::parse(&case.text).unwrap();
        let assignment = OperatorAssignment::from_index(index % (1 << template.slot_count()), template.slot_count());
        let flip = flip % case.vars.len();
        let mut low = bits.clone();
        low[flip] = false;
        let mut high = bits;
        high[flip] = true;
        let f_low = template.evaluate(&assignment, &row_of(&case.vars, &low)).unwrap();
        let f_high = template.evaluate(&assignment, &row_of(&case.vars, &high)).unwrap();
        prop_assert!(!f_low || f_high);
    }

    #[test]
    fn null_classes_partition_rows(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 4), 1..60)) {
        let ds = Dataset::new(["x1", "x2", "x3", "xO"].map(String::from).to_vec(), "xO", rows.clone()).unwrap();
        let classes = ds.null_classes(&["x1", "x2", "x3"]).unwrap();
        let count = |c: NullClass| classes.iter().filter(|&&k| k == c).count();
        let all_one = |r: &Vec<bool>| r[..3].iter().all(|&b| b);
        let all_zero = |r: &Vec<bool>| r[..3].iter().all(|&b| !b);
        prop_assert_eq!(count(NullClass::AllOnePos), rows.iter().filter(|r| all_one(r) && r[3]).count());
        prop_assert_eq!(count(NullClass::AllOneNeg), rows.iter().filter(|r| all_one(r) && !r[3]).count());
        prop_assert_eq!(count(NullClass::AllZeroPos), rows.iter().filter(|r| all_zero(r) && r[3]).count());
        prop_assert_eq!(count(NullClass::AllZeroNeg), rows.iter().filter(|r| all_zero(r) && !r[3]).count());
        let total: usize = [NullClass::AllOnePos, NullClass::AllOneNeg, NullClass::AllZeroPos, NullClass::AllZeroNeg, NullClass::NonNull]
            .into_iter()
            .map(count)
            .sum();
        prop_assert_eq!(total, ds.n());
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 4), 1..30)) {
        let ds = Dataset::new(["x1", "x2", "x3", "xO"].map(String::from).to_vec(), "xO", rows).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        prop_assert_eq!(load_csv(buf.as_slice(), "xO").unwrap(), ds);
    }

    #[test]
    fn sampled_runs_are_deterministic(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 4), 1..30), seed in any::<u64>()) {
        let ds = Dataset::new(["x1", "x2", "x3", "xO"].map(String::from).to_vec(), "xO", rows).unwrap();
        let template = ModelTemplate::parse("(x1 ? x2) ? x3 = xO").unwrap();
        prop_assert_eq!(
            run_sampled(&ds, &template, 7, seed, true).unwrap(),
            run_sampled(&ds, &template, 7, seed, true).unwrap()
        );
        let exhaustive = run_exhaustive(&ds, &template, true).unwrap();
        let sampled = run_sampled(&ds, &template, 7, seed, true).unwrap();
        prop_assert_eq!(sampled.total_trials, 7 * (exhaustive.total_trials / 4));
    }

    #[test]
    fn choice_ignores_unfaithful_counts(
        fa in 0u64..400, fo in 0u64..400,
        ua in 0u64..400, uo in 0u64..400,
        ua2 in 0u64..400, uo2 in 0u64..400,
        alpha in 0.001f64..0.2,
    ) {
        prop_assume!(fa + fo > 0);
        let tally = |ua, uo| SlotTally {
            slots: vec![SlotCounts { faithful_and: fa, faithful_or: fo, unfaithful_and: ua, unfaithful_or: uo }],
            total_trials: fa + fo + ua + uo,
        };
        let first = decide_operators(&tally(ua, uo), alpha).unwrap().remove(0);
        let second = decide_operators(&tally(ua2, uo2), alpha).unwrap().remove(0);
        prop_assert_eq!(first.choice, second.choice);
        prop_assert_eq!(first.faithful_test, second.faithful_test);
        let expected = if first.faithful_test.p_value >= alpha {
            Choice::Inconclusive
        } else if fa > fo {
            Choice::And
        } else {
            Choice::Or
        };
        prop_assert_eq!(first.choice, expected);
        if first.choice != Choice::Inconclusive {
            prop_assert!(first.faithful_test.p_value < alpha);
        }
    }

    #[test]
    fn fisher_tracks_corrected_chisq_on_large_tables(
        a in 50u64..400, b in 50u64..400, c in 50u64..400, d in 50u64..400,
    ) {
        let t = Table2x2::new(a, b, c, d);
        let chisq = contingency_chisq(&t, true).unwrap();
        prop_assume!((1e-6..=0.5).contains(&chisq.p_value));
        let fisher = fisher_exact(&t);
        prop_assert!(
            (fisher.log10_p_value - chisq.log10_p_value).abs() <= 1.0,
            "{} fisher {} chisq {}", t, fisher.p_value, chisq.p_value
        );
    }

    #[test]
    fn chi2_sf_decreases(x in 0.0f64..3000.0, dx in 1e-6f64..50.0) {
        prop_assert!(chi2_sf(x + dx, 1).unwrap() <= chi2_sf(x, 1).unwrap());
        prop_assert!(ln_chi2_sf(x + dx, 1).unwrap() < ln_chi2_sf(x, 1).unwrap());
    }
}
