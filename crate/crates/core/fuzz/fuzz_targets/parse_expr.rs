#![no_main]
use helmsplit::expr::Expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(e) = Expr::parse(data) else { return };
    let printed = e.to_string();
    let back = Expr::parse(&printed).expect("printed expression parses");
    let p = [0.3, -1.7, 2.9];
    let (a, b) = (e.eval(p), back.eval(p));
    assert!(
        a == b || (a.is_nan() && b.is_nan()),
        "{printed}: {a} vs {b}"
    );
});
