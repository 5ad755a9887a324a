//! Replays the fuzzing corpus seeds on the stable toolchain.

use std::fs;
use std::path::PathBuf;

use hasf::netpbm::{decode, encode_pbm, encode_pgm, Decoded};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("seed-"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn decode_seeds_either_parse_or_point_inside_the_input() {
    let mut parsed = 0;
    for (name, bytes) in seeds("decode") {
        match decode(&bytes) {
            Ok(Decoded::Bitmap(img)) => {
                parsed += 1;
                assert_eq!(img.cells().len(), img.width() * img.height(), "{name}");
            }
            Ok(Decoded::Graymap(g)) => {
                parsed += 1;
                assert!(g.samples.iter().all(|&s| s <= g.maxval), "{name}");
            }
            Err(e) => assert!(e.offset() <= bytes.len(), "{name}: {e}"),
        }
    }
    assert!(parsed >= 5);
}

#[test]
fn round_trip_seeds_survive_re_encoding() {
    for (name, bytes) in seeds("pbm_roundtrip") {
        let img = decode(&bytes[1..]).unwrap().into_binary(bytes[0] as u16);
        for plain in [false, true] {
            assert_eq!(decode(&encode_pbm(&img, plain)).unwrap(), Decoded::Bitmap(img.clone()), "{name}");
        }
    }
    for (name, bytes) in seeds("pgm_roundtrip") {
        let Decoded::Graymap(g) = decode(&bytes).unwrap() else {
            panic!("{name} is not a graymap");
        };
        assert_eq!(decode(&encode_pgm(&g)).unwrap(), Decoded::Graymap(g), "{name}");
    }
}
