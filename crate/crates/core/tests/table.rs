use mmv_core::table::{build_report, bundled_records, parse_records, DEFAULT_RISK_FREE};

fn published() -> Vec<(String, f64)> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/table1_published.csv");
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].parse().unwrap())
        })
        .collect()
}

#[test]
fn bundled_table_matches_published_values() {
    let report = build_report(&bundled_records::<f64>(), DEFAULT_RISK_FREE).unwrap();
    let expected = published();
    assert_eq!(report.rows.len(), 23);
    for (row, (ticker, value)) in report.rows.iter().zip(&expected) {
        assert_eq!(&row.ticker, ticker);
        assert!((row.zeta_gamma - value).abs() <= 5e-6, "{ticker}: {} vs {value}", row.zeta_gamma);
    }
    assert!(report.all_pass());
    assert_eq!(report.min_ticker, "GM");
    assert!((report.min_zeta_gamma - 0.082924).abs() <= 5e-6);
}

#[test]
fn higher_rate_shrinks_the_premium() {
    let recs = bundled_records::<f64>();
    let lo = build_report(&recs, 0.02).unwrap();
    let hi = build_report(&recs, 0.06).unwrap();
    for (a, b) in lo.rows.iter().zip(&hi.rows) {
        assert!(a.zeta_gamma.abs() >= b.zeta_gamma.abs() || a.zeta_gamma.signum() != b.zeta_gamma.signum());
    }
}

#[test]
fn validation_errors_name_row_and_field() {
    let text = "ticker,drift,sigma,nu,gamma\nAAA,0.1,0.2,1,0.1\nBBB,0.1,-0.2,1,0.1\n";
    let err = parse_records::<f64, _>(text.as_bytes()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("sigma"), "{msg}");
    assert!(msg.contains('3'), "{msg}");
}
