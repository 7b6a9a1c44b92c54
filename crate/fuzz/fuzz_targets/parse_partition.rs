//! Partition strings such as `1,2|3`.
#![no_main]

use extremaldep::PartitionSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(split) = text.parse::<PartitionSpec>() else {
        return;
    };

    let mut seen: Vec<usize> = split.p_block().iter().chain(split.q_block()).copied().collect();
    seen.sort_unstable();
    assert_eq!(seen, (0..split.dim()).collect::<Vec<_>>());
    assert!(!split.p_block().is_empty() && !split.q_block().is_empty());

    let back: PartitionSpec = split.to_string().parse().expect("printed partition reparses");
    assert_eq!(back, split);
});
