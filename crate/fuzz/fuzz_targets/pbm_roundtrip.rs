#![no_main]

use hasf::netpbm::{decode, decode_binary, encode_pbm, Decoded};
use libfuzzer_sys::fuzz_target;

// First byte picks the graymap threshold, the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&t, file)) = data.split_first() else {
        return;
    };
    let Ok(img) = decode_binary(file, t as u16) else {
        return;
    };
    for plain in [false, true] {
        match decode(&encode_pbm(&img, plain)) {
            Ok(Decoded::Bitmap(back)) => assert_eq!(back, img),
            other => panic!("re-encoded bitmap decoded as {other:?}"),
        }
    }
});
