//! Tau vectors: parse, print entry-wise and parse again.
#![no_main]

use extremaldep::TauVector;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(tau) = text.parse::<TauVector>() else {
        return;
    };

    assert!(tau.dim() >= 1);
    assert!(tau.as_slice().iter().all(|v| v.is_finite() && *v >= 0.0));

    let printed: Vec<String> = tau.as_slice().iter().map(|v| v.to_string()).collect();
    let back: TauVector = printed.join(",").parse().expect("printed tau reparses");
    assert_eq!(back, tau);
});
