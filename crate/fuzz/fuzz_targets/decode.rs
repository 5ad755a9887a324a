#![no_main]

use hasf::netpbm::{decode, Decoded};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    match decode(data) {
        Ok(Decoded::Bitmap(img)) => {
            assert_eq!(img.cells().len(), img.width() * img.height());
            assert!(img.width() * img.height() <= data.len() * 8);
        }
        Ok(Decoded::Graymap(g)) => {
            assert!(g.maxval >= 1);
            assert_eq!(g.samples.len(), g.width * g.height);
            assert!(g.samples.iter().all(|&s| s <= g.maxval));
        }
        Err(e) => assert!(e.offset() <= data.len(), "{e} past the end of {} bytes", data.len()),
    }
});
