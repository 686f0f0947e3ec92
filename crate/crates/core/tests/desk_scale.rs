//! End-to-end checks at p = 3, m = 5 against exhaustive scans.

use fivezero_core::charsum::{moments, s_distribution_oracle, scan_all, ScanOptions};
use fivezero_core::field::ExtensionField;
use fivezero_core::wdist::{reconcile, s_table, weight_table, ClosedFormCounts, OracleEvidence};
use num_bigint::BigUint;

fn field() -> ExtensionField {
    ExtensionField::new(3, 5).unwrap()
}

#[test]
fn scans_match_closed_forms_for_both_parities() {
    let f = field();
    let counts = ClosedFormCounts::new(3, 5).unwrap();
    let mut oracles = Vec::new();
    for k in [1, 2] {
        let scan = scan_all(&f, k, &ScanOptions::default()).unwrap();
        assert_eq!(scan.per_w.len(), 243);
        assert!(scan.per_w[0].same_table(&counts.w_zero_distribution(k)));
        assert!(scan.per_w[1..]
            .iter()
            .all(|d| d.same_table(&counts.w_nonzero_distribution(k))));
        moments(&scan.per_w[17], 3, 5).check().unwrap();

        let oracle = s_distribution_oracle(&scan);
        assert_eq!(oracle.total(), BigUint::from(3u32).pow(25));
        assert!(oracle.same_table(&s_table(3, 5).unwrap().distribution(k)));

        let report = reconcile(
            3,
            5,
            k,
            &OracleEvidence {
                s_distribution: Some(oracle.clone()),
                w_independent: Some(scan.w_independent()),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.passed(), "{}", report.to_json());
        assert_eq!(report.min_distance.oracle, Some(72));
        oracles.push(oracle);
    }
    // T at odd k and S at even k have the same distribution.
    assert!(oracles[0].same_table(&oracles[1]));
}

#[test]
fn orbit_reduction_and_thread_count_do_not_change_results() {
    let f = field();
    let direct = scan_all(&f, 1, &ScanOptions::default()).unwrap();
    let reduced = scan_all(
        &f,
        1,
        &ScanOptions {
            orbit_reduction: true,
            threads: 3,
            ..ScanOptions::default()
        },
    )
    .unwrap();
    assert_eq!(direct.to_cache_text(), reduced.to_cache_text());
}

#[test]
fn cache_file_round_trip() {
    let f = field();
    let scan = scan_all(&f, 2, &ScanOptions { orbit_reduction: true, ..ScanOptions::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("scan.txt");
    scan.write_cache(&path).unwrap();
    let back = fivezero_core::charsum::ScanOutput::read_cache(&path, &f, 2).unwrap();
    assert_eq!(back, scan);
}

#[test]
fn closed_form_tables_at_larger_parameters() {
    for (p, m) in [(3, 7), (5, 5)] {
        let wd = weight_table(p, m, 1).unwrap();
        wd.check_invariants().unwrap();
        assert_eq!(wd.total(), BigUint::from(p).pow(5 * m));
    }
}
