#![no_main]

use hasf::netpbm::{decode, encode_pgm, Decoded};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(Decoded::Graymap(g)) = decode(data) else {
        return;
    };
    match decode(&encode_pgm(&g)) {
        Ok(Decoded::Graymap(back)) => assert_eq!(back, g),
        other => panic!("re-encoded graymap decoded as {other:?}"),
    }
    for t in [0, g.maxval / 2, g.maxval] {
        let img = g.threshold(t);
        let expected = g.samples.iter().filter(|&&s| s > t).count();
        assert_eq!(img.count_foreground(), expected);
    }
});
