use euclid_core::engine::check_script;
use euclid_core::library::Library;
use euclid_core::parser::parse_script;

#[test]
fn corpus_checks() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");
    let mut lib = Library::new();
    for file in ["prelude.e", "book1.e"] {
        let path = format!("{root}/{file}");
        let src = std::fs::read_to_string(&path).unwrap();
        let script = parse_script(&src)
            .unwrap_or_else(|e| panic!("{file}:{}:{}: {}", e.span.line, e.span.col, e.msg));
        let report = check_script(&script, &mut lib, file);
        let mut ok = true;
        for v in &report.verdicts {
            let status = if v.assumed {
                "assumed"
            } else if v.passed {
                "pass"
            } else {
                ok = false;
                "FAIL"
            };
            eprintln!(
                "{file}: {:<20} {status:<8} {:>5} ms  {}",
                v.name,
                v.millis,
                v.error.as_ref().map(|e| e.to_string()).unwrap_or_default()
            );
        }
        assert!(ok, "{file} had failures");
    }
}
