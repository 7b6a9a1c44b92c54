//! ModelSpec JSON; accepted specs must build and survive a serde round trip.
#![no_main]

use extremaldep::ModelSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<ModelSpec>(data) else {
        return;
    };

    spec.validate().expect("deserialized spec is valid");
    let model = spec.build().expect("valid spec builds");
    assert_eq!(model.dim(), spec.dim());

    let text = serde_json::to_string(&spec).unwrap();
    let back: ModelSpec = serde_json::from_str(&text).expect("serialized spec reparses");
    assert_eq!(back, spec);
});
