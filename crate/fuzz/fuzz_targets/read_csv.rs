//! Series CSV: anything the reader accepts is written and read back unchanged.
#![no_main]

use extremaldep::SampleMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = SampleMatrix::read_csv(data) else {
        return;
    };

    assert!(m.ncols() >= 1);
    assert_eq!(m.values().len(), m.nrows() * m.ncols());

    let mut buf = Vec::new();
    m.write_csv(&mut buf).expect("write to memory");
    let back = SampleMatrix::read_csv(buf.as_slice()).expect("written CSV reparses");
    assert_eq!(back.ncols(), m.ncols());
    assert_eq!(back.labels(), m.labels());
    let bits = |s: &SampleMatrix| s.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&back), bits(&m));
});
